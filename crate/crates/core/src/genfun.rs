//! Generating functions `G(z) = sum p_n z^n` stored by their Taylor
//! coefficients, the coefficient-level transforms that mirror the four
//! operators, and distribution families defined through differential
//! equations for `G`.
//!
//! All families ship closed-form coefficients; none of them is obtained by
//! integrating an ODE numerically.

use std::f64::consts::E;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::error::{FockError, Result};
use crate::fock::{ensure_cutoff, CutoffPolicy, PhotonDistribution, EPS_NEG, EPS_ZERO};
use crate::operators::EXP_PHASE_FLOOR;

/// First coefficient of a candidate generating function that is not a
/// probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativityReport {
    pub index: usize,
    pub value: f64,
}

/// Truncated power series whose coefficients are meant to be probabilities.
///
/// A `GenFun` may hold negative coefficients: it is then a candidate that
/// failed validation, which [`GenFun::validate`] reports.
#[derive(Debug, Clone, PartialEq)]
pub struct GenFun {
    coeffs: Vec<f64>,
    tail_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// `G'(z) / nbar`
    Minus,
    /// `z d/dz [z G(z)] / (1 + nbar)`
    Plus,
    /// `(G(z) - G(0)) / (z (1 - p0))`
    TildeMinus,
    /// `z G(z)`
    TildePlus,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [
        TransformKind::Minus,
        TransformKind::Plus,
        TransformKind::TildeMinus,
        TransformKind::TildePlus,
    ];
}

impl GenFun {
    pub fn from_coeffs(coeffs: Vec<f64>, tail_tol: f64) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self { coeffs, tail_tol }
    }

    pub fn from_distribution(dist: &PhotonDistribution) -> Self {
        Self::from_coeffs(dist.probs().to_vec(), dist.tail_tol())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Horner evaluation of the truncated series.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// `d^r G / dz^r` at `z = 1`, i.e. the factorial moment `n^(r)`.
    pub fn derivative_at_one(&self, r: usize) -> f64 {
        crate::statistics::factorial_moment(&self.coeffs, r)
    }

    pub fn validate(&self) -> std::result::Result<(), NegativityReport> {
        match self
            .coeffs
            .iter()
            .position(|&c| c < -EPS_NEG || !c.is_finite())
        {
            Some(index) => Err(NegativityReport {
                index,
                value: self.coeffs[index],
            }),
            None => Ok(()),
        }
    }

    pub fn to_distribution(&self) -> Result<PhotonDistribution> {
        if let Err(neg) = self.validate() {
            return Err(FockError::InvalidDistribution(format!(
                "coefficient {} = {:e} is negative",
                neg.index, neg.value
            )));
        }
        PhotonDistribution::new(self.coeffs.clone(), self.tail_tol)
    }

    /// Coefficient-level image of `G` under one of the four transforms.
    /// `nbar` and `p0` are the mean and vacuum probability of the source.
    pub fn transform(&self, kind: TransformKind, nbar: f64, p0: f64) -> Result<GenFun> {
        let c = &self.coeffs;
        let coeffs = match kind {
            TransformKind::Minus => {
                if !(nbar > EPS_ZERO) {
                    return Err(FockError::ZeroState("G' / nbar needs nbar > 0".into()));
                }
                if c.len() < 2 {
                    return Err(FockError::ZeroState("derivative of a constant".into()));
                }
                c.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(n, &cn)| n as f64 * cn / nbar)
                    .collect()
            }
            TransformKind::Plus => std::iter::once(0.0)
                .chain(
                    c.iter()
                        .enumerate()
                        .map(|(n, &cn)| (n + 1) as f64 * cn / (1.0 + nbar)),
                )
                .collect(),
            TransformKind::TildeMinus => {
                let excited = 1.0 - p0;
                if !(excited >= EXP_PHASE_FLOOR) || c.len() < 2 {
                    return Err(FockError::ZeroState(format!(
                        "(G - G(0)) / z needs p0 < 1, got p0 = {p0}"
                    )));
                }
                c[1..].iter().map(|&cn| cn / excited).collect()
            }
            TransformKind::TildePlus => std::iter::once(0.0).chain(c.iter().copied()).collect(),
        };
        Ok(GenFun::from_coeffs(coeffs, self.tail_tol))
    }

    /// Convenience: transform using the series' own mean and `p0`.
    pub fn transform_self(&self, kind: TransformKind) -> Result<GenFun> {
        self.transform(kind, self.derivative_at_one(1), self.coeffs[0])
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(FockError::InvalidParams(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `exp(n ln(lambda) - lambda - ln n!)`
fn poisson_term(lambda: f64, n: usize) -> f64 {
    if n == 0 {
        return (-lambda).exp();
    }
    (n as f64 * lambda.ln() - lambda - ln_factorial(n as u64)).exp()
}

/// Largest `nbar` for which the multiplication-factor family exists at a
/// given `gamma < 1`: `gamma nbar <= |ln(1 - gamma)|`.
pub fn gamma_family_nbar_limit(gamma: f64) -> f64 {
    if gamma >= 1.0 {
        f64::INFINITY
    } else {
        -(-gamma).ln_1p() / gamma
    }
}

/// Distribution with mean `nbar` whose subtracted partner has mean
/// `gamma nbar`:
/// `p0 = 1 - 1/gamma + exp(-gamma nbar)/gamma`,
/// `p_n = exp(-gamma nbar) (gamma nbar)^n / (gamma n!)`.
pub fn gamma_family(nbar: f64, gamma: f64, policy: &CutoffPolicy) -> Result<PhotonDistribution> {
    check_positive("nbar", nbar)?;
    check_positive("gamma", gamma)?;
    let limit = gamma_family_nbar_limit(gamma);
    if nbar > limit * (1.0 + 1e-12) {
        return Err(FockError::InvalidParams(format!(
            "for gamma = {gamma} < 1 the distribution needs gamma*nbar <= |ln(1-gamma)|, \
             i.e. nbar <= {limit}; got nbar = {nbar} (p0 would be negative)"
        )));
    }
    let lambda = gamma * nbar;
    let p0 = (1.0 + (-lambda).exp_m1() / gamma).max(0.0);
    PhotonDistribution::from_fn(
        |n| {
            if n == 0 {
                p0
            } else {
                poisson_term(lambda, n) / gamma
            }
        },
        policy,
    )
}

/// Outcome of the cosh/sinh family: either a genuine distribution or the
/// first coefficient that came out negative.
#[derive(Debug, Clone, PartialEq)]
pub enum CoshOutcome {
    Valid(PhotonDistribution),
    Negative(NegativityReport),
}

impl CoshOutcome {
    pub fn negativity(&self) -> Option<&NegativityReport> {
        match self {
            CoshOutcome::Negative(r) => Some(r),
            CoshOutcome::Valid(_) => None,
        }
    }
}

/// Taylor coefficients of `cosh(a (z-1)) + gamma^{-1/2} sinh(a (z-1))` with
/// `a = nbar sqrt(gamma)`:
/// `p_n = [(1+g) e^{-a} a^n + (1-g) e^{a} (-a)^n] / (2 n!)`, `g = gamma^{-1/2}`.
pub fn cosh_coefficient(nbar: f64, gamma: f64, n: usize) -> f64 {
    let a = nbar * gamma.sqrt();
    let g = 1.0 / gamma.sqrt();
    let ln_pow = n as f64 * a.ln() - ln_factorial(n as u64);
    let decaying = 0.5 * (1.0 + g) * (ln_pow - a).exp();
    let growing = 0.5 * (1.0 - g) * (ln_pow + a).exp();
    if n.is_multiple_of(2) {
        decaying + growing
    } else {
        decaying - growing
    }
}

pub fn cosh_family(nbar: f64, gamma: f64, policy: &CutoffPolicy) -> Result<CoshOutcome> {
    check_positive("nbar", nbar)?;
    check_positive("gamma", gamma)?;
    let a = nbar * gamma.sqrt();
    let g = 1.0 / gamma.sqrt();
    // Envelope |p_n| <= C a^n / n!; its tail past n > a is bounded by a
    // geometric series with ratio a / (n + 2).
    let ln_c = (0.5 * ((1.0 + g) * (-a).exp() + (1.0 - g).abs() * a.exp())).ln();
    let mut cutoff = None;
    for n in 0..=policy.max_cutoff {
        let ratio = a / (n + 2) as f64;
        if ratio < 1.0 {
            let next = (ln_c + (n + 1) as f64 * a.ln() - ln_factorial(n as u64 + 1)).exp();
            if next / (1.0 - ratio) < policy.tail_tol {
                cutoff = Some(n);
                break;
            }
        }
    }
    let cutoff = cutoff.ok_or(FockError::CutoffOverflow {
        max_cutoff: policy.max_cutoff,
        tail: f64::NAN,
        tail_tol: policy.tail_tol,
    })?;
    let coeffs: Vec<f64> = (0..=cutoff)
        .map(|n| cosh_coefficient(nbar, gamma, n))
        .collect();
    if let Some(index) = coeffs.iter().position(|&p| p < -EPS_NEG) {
        return Ok(CoshOutcome::Negative(NegativityReport {
            index,
            value: coeffs[index],
        }));
    }
    Ok(CoshOutcome::Valid(PhotonDistribution::renormalized(
        coeffs,
        policy.tail_tol,
    )?))
}

/// Largest `nbar` with a nonnegative vacuum probability in the
/// logarithmic-q family: `q (e - 1) / (1 - e^{-q})`.
pub fn log_q_nbar_limit(q: f64) -> f64 {
    q * (E - 1.0) / -(-q).exp_m1()
}

/// `p0 = ln[q e / (q + nbar (1 - e^{-q}))]`
pub fn log_q_p0(nbar: f64, q: f64) -> f64 {
    1.0 + q.ln() - (q + nbar * -(-q).exp_m1()).ln()
}

const KSUM_REL_TOL: f64 = 1e-18;
const KSUM_MAX_TERMS: usize = 1_000_000;

/// `p_n = q^n / n! sum_{k>=1} k^{n-1} x^k` with `x = nbar e^{-q} / (q + nbar)`,
/// summed until a post-peak term is below `1e-18` of the partial sum.
/// `None` if that does not happen within `10^6` terms.
pub fn log_q_ksum(n: usize, nbar: f64, q: f64) -> Option<f64> {
    assert!(n >= 1);
    let ln_x = nbar.ln() - q - (q + nbar).ln();
    let prefix = n as f64 * q.ln() - ln_factorial(n as u64);
    let power = (n - 1) as f64;
    let peak = power / -ln_x;
    let mut sum = 0.0;
    for k in 1..=KSUM_MAX_TERMS {
        let kf = k as f64;
        let term = (power * kf.ln() + kf * ln_x + prefix).exp();
        sum += term;
        if kf > peak && term <= KSUM_REL_TOL * sum {
            return Some(sum);
        }
    }
    None
}

/// Coefficients of `-ln(w(z))` for `w = 1 + (nbar/q)(1 - e^{q(z-1)})`,
/// extended on demand through `n L_n w_0 = n w_n - sum_{k<n} k L_k w_{n-k}`.
/// Every term has the same sign, so the recurrence is free of cancellation.
struct LogSeries {
    w: Vec<f64>,
    neg_ln: Vec<f64>,
    nbar: f64,
    q: f64,
}

impl LogSeries {
    fn new(nbar: f64, q: f64) -> Self {
        let w0 = 1.0 + nbar / q * -(-q).exp_m1();
        Self {
            w: vec![w0],
            neg_ln: vec![-w0.ln()],
            nbar,
            q,
        }
    }

    fn w_coeff(&self, j: usize) -> f64 {
        // -(nbar/q) e^{-q} q^j / j!
        -(self.nbar.ln() - self.q + (j as f64 - 1.0) * self.q.ln() - ln_factorial(j as u64)).exp()
    }

    /// Coefficient `n` of `-ln w`.
    fn get(&mut self, n: usize) -> f64 {
        while self.neg_ln.len() <= n {
            let m = self.neg_ln.len();
            self.w.push(self.w_coeff(m));
            // L_k = -neg_ln[k]
            let conv: f64 = (1..m)
                .map(|k| k as f64 * -self.neg_ln[k] * self.w[m - k])
                .sum();
            let l_m = (m as f64 * self.w[m] - conv) / (m as f64 * self.w[0]);
            self.neg_ln.push(-l_m);
        }
        self.neg_ln[n]
    }
}

/// Distribution with prescribed mean `nbar` and Mandel parameter `q > 0`,
/// generated by `G(z) = 1 - ln[1 + (nbar/q)(1 - e^{q(z-1)})]`.
///
/// Coefficients come from the k-sum; when that sum cannot converge within
/// its term cap (small `q`, where `x -> 1`), the whole distribution is taken
/// from the logarithm recurrence instead.
pub fn log_q_family(nbar: f64, q: f64, policy: &CutoffPolicy) -> Result<PhotonDistribution> {
    check_positive("nbar", nbar)?;
    check_positive("q", q)?;
    let limit = log_q_nbar_limit(q);
    if nbar > limit * (1.0 + 1e-12) {
        return Err(FockError::InvalidParams(format!(
            "vacuum probability needs nbar <= q(e-1)/(1-e^-q) = {limit} for q = {q}; got nbar = {nbar}"
        )));
    }
    let p0 = log_q_p0(nbar, q).max(0.0);

    let mut converged = true;
    let cutoff = ensure_cutoff(
        |n| {
            if n == 0 {
                return p0;
            }
            if !converged {
                return 0.0;
            }
            log_q_ksum(n, nbar, q).unwrap_or_else(|| {
                converged = false;
                0.0
            })
        },
        policy,
    );
    if converged {
        let cutoff = cutoff?;
        let probs = (0..=cutoff)
            .map(|n| {
                if n == 0 {
                    p0
                } else {
                    log_q_ksum(n, nbar, q).expect("converged above")
                }
            })
            .collect();
        return PhotonDistribution::renormalized(probs, policy.tail_tol);
    }
    log_q_family_by_recurrence(nbar, q, policy)
}

/// Same family, every coefficient from the logarithm recurrence.
pub fn log_q_family_by_recurrence(
    nbar: f64,
    q: f64,
    policy: &CutoffPolicy,
) -> Result<PhotonDistribution> {
    check_positive("nbar", nbar)?;
    check_positive("q", q)?;
    let p0 = log_q_p0(nbar, q).max(0.0);
    let mut series = LogSeries::new(nbar, q);
    let cutoff = ensure_cutoff(|n| if n == 0 { p0 } else { series.get(n) }, policy)?;
    let probs = (0..=cutoff)
        .map(|n| if n == 0 { p0 } else { series.get(n) })
        .collect();
    PhotonDistribution::renormalized(probs, policy.tail_tol)
}

/// Largest mean of the `q -> 0` logarithmic family, `e - 1`.
pub const LOG0_NBAR_LIMIT: f64 = E - 1.0;

/// `q -> 0` member: `p0 = 1 - ln(1 + nbar)`, `p_n = (nbar/(1+nbar))^n / n`.
/// Factorial moments are `(r-1)! nbar^r` and Mandel q is zero.
pub fn log0_family(nbar: f64, policy: &CutoffPolicy) -> Result<PhotonDistribution> {
    check_positive("nbar", nbar)?;
    if nbar > LOG0_NBAR_LIMIT * (1.0 + 1e-15) {
        return Err(FockError::InvalidParams(format!(
            "sub-coherent logarithmic state needs nbar <= e - 1 ~ 1.71828; got nbar = {nbar} \
             (p0 = 1 - ln(1 + nbar) would be negative)"
        )));
    }
    let p0 = 1.0 - nbar.ln_1p();
    let p0 = if p0.abs() < EPS_NEG { 0.0 } else { p0 };
    let ln_x = nbar.ln() - nbar.ln_1p();
    PhotonDistribution::from_fn(
        |n| {
            if n == 0 {
                p0
            } else {
                (n as f64 * ln_x).exp() / n as f64
            }
        },
        policy,
    )
}

/// Factorial moment `n^(r)` read off the factorial-moment generating function
/// `Q1(x) = sum_v (-x)^v n^(v) / v! = ln[(1 - A) nbar x + 1] / (A - 1) + 1`:
/// `n^(r) = (-1)^r r! [x^r] Q1`. With this convention `A = 0` gives
/// `(r-1)! nbar^r` and `n^(2) = nbar^2 (1 - A)`.
pub fn balazs_moments(nbar: f64, a: f64, r: usize) -> Result<f64> {
    check_positive("nbar", nbar)?;
    if !(a.is_finite() && (0.0..=1.0).contains(&a)) {
        return Err(FockError::InvalidParams(format!(
            "A must lie in [0, 1] (A > 1 makes n^(2) negative), got {a}"
        )));
    }
    if r == 0 {
        return Err(FockError::InvalidParams(
            "moment order r must be >= 1".into(),
        ));
    }
    let coeff = if a == 1.0 {
        // Q1 = 1 - nbar x exactly.
        if r == 1 {
            -nbar
        } else {
            0.0
        }
    } else {
        let b = (1.0 - a) * nbar;
        // [x^r] ln(1 + b x) = (-1)^{r+1} b^r / r
        let ln_coeff = series_ln_coeffs(&[1.0, b], r)[r];
        ln_coeff / (a - 1.0)
    };
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * (ln_factorial(r as u64)).exp() * coeff)
}

/// First `len + 1` Taylor coefficients of `ln w(x)` for a series with
/// `w_0 > 0`.
fn series_ln_coeffs(w: &[f64], len: usize) -> Vec<f64> {
    let at = |j: usize| w.get(j).copied().unwrap_or(0.0);
    let mut l = vec![at(0).ln()];
    for n in 1..=len {
        let conv: f64 = (1..n).map(|k| k as f64 * l[k] * at(n - k)).sum();
        l.push((n as f64 * at(n) - conv) / (n as f64 * at(0)));
    }
    l
}
