//! Pure states and photon-number distributions on a truncated Fock basis.
//!
//! Every value carries the tail tolerance it was truncated with. Builders go
//! through [`ensure_cutoff`], which grows the cutoff until the discarded
//! probability mass (and, optionally, the discarded low-order moments) fall
//! below that tolerance, and then renormalize on the truncated basis so that
//! every identity checked later holds exactly for the object actually stored.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{FockError, Result};

/// Slack on unit norm after normalization.
pub const EPS_NORM: f64 = 1e-12;
/// Probabilities in `(-EPS_NEG, 0)` are rounding noise and get clamped to zero.
pub const EPS_NEG: f64 = 1e-12;
/// Amplitudes (and squared norms) below this are treated as exactly zero.
pub const EPS_ZERO: f64 = 1e-300;
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_CUTOFF: usize = 4096;
/// Moment order whose tail is also bounded by the default policy.
pub const DEFAULT_MOMENT_ORDER: u32 = 8;
pub const MAX_CUTOFF_ENV: &str = "FOCKLEDGER_MAX_CUTOFF";

/// How far a builder may grow the Fock basis, and what it must leave behind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    /// Admitted probability mass above the cutoff.
    pub tail_tol: f64,
    pub max_cutoff: usize,
    /// When nonzero, the tail of `sum (n+1)^k p_n` must also be below
    /// `tail_tol`, so factorial moments up to order `k` are not truncated.
    pub moment_order: u32,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self {
            tail_tol: DEFAULT_TAIL_TOL,
            max_cutoff: DEFAULT_MAX_CUTOFF,
            moment_order: DEFAULT_MOMENT_ORDER,
        }
    }
}

impl CutoffPolicy {
    /// Default policy with `max_cutoff` taken from `FOCKLEDGER_MAX_CUTOFF`
    /// when that variable holds a positive integer.
    pub fn from_env() -> Self {
        let mut policy = Self::default();
        if let Some(cap) = std::env::var(MAX_CUTOFF_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
        {
            policy.max_cutoff = cap;
        }
        policy
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn with_max_cutoff(mut self, max_cutoff: usize) -> Self {
        self.max_cutoff = max_cutoff;
        self
    }

    pub fn with_moment_order(mut self, order: u32) -> Self {
        self.moment_order = order;
        self
    }
}

const LOOKAHEAD: usize = 4;

/// Smallest cutoff `N` such that the weights `p_0..p_N` of a unit-mass
/// source leave less than `tail_tol` behind.
///
/// The mass criterion is exact (`1 - sum_{n<=N} p_n`). The moment criterion
/// extrapolates the weighted tail geometrically from two lookahead blocks,
/// which is a bound for the log-concave tails of every family in this crate
/// and exact for finite supports.
pub fn ensure_cutoff<F>(mut prob: F, policy: &CutoffPolicy) -> Result<usize>
where
    F: FnMut(usize) -> f64,
{
    let k = policy.moment_order as i32;
    let mut cache: Vec<f64> = Vec::with_capacity(64);
    let mut at = |n: usize, cache: &mut Vec<f64>| -> f64 {
        while cache.len() <= n {
            let i = cache.len();
            cache.push(prob(i));
        }
        cache[n]
    };

    // Neumaier-compensated running sum.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut tail = 1.0;
    for n in 0..=policy.max_cutoff {
        let p = at(n, &mut cache);
        let t = sum + p;
        if sum.abs() >= p.abs() {
            comp += (sum - t) + p;
        } else {
            comp += (p - t) + sum;
        }
        sum = t;
        tail = 1.0 - (sum + comp);
        if tail >= policy.tail_tol {
            continue;
        }
        if k == 0 {
            return Ok(n);
        }
        let (mut near, mut far) = (0.0f64, 0.0f64);
        for j in 1..=2 * LOOKAHEAD {
            let i = n + j;
            let w = at(i, &mut cache).abs() * ((i + 1) as f64).powi(k);
            if j <= LOOKAHEAD {
                near += w;
            } else {
                far += w;
            }
        }
        if near == 0.0 && far == 0.0 {
            return Ok(n);
        }
        if near > 0.0 && far < near {
            let estimate = near / (1.0 - far / near);
            if estimate < policy.tail_tol {
                return Ok(n);
            }
        }
    }
    Err(FockError::CutoffOverflow {
        max_cutoff: policy.max_cutoff,
        tail: tail.max(0.0),
        tail_tol: policy.tail_tol,
    })
}

/// Pure state `sum_n c_n |n>` on `|0>..|cutoff>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amps: Vec<Complex64>,
    tail_tol: f64,
}

impl FockState {
    /// Wraps raw amplitudes as given; call [`FockState::normalize`] to get a
    /// physical state. An empty vector is read as the zero vector on `|0>`.
    pub fn new(mut amps: Vec<Complex64>) -> Self {
        if amps.is_empty() {
            amps.push(Complex64::new(0.0, 0.0));
        }
        Self {
            amps,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn fock(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    /// Materializes `amp(n)` up to the cutoff the policy demands for the
    /// weights `|amp(n)|^2` (which must sum to one over all `n`), then
    /// renormalizes on the truncated basis.
    pub fn from_fn<F>(amp: F, policy: &CutoffPolicy) -> Result<Self>
    where
        F: Fn(usize) -> Complex64,
    {
        let cutoff = ensure_cutoff(|n| amp(n).norm_sqr(), policy)?;
        Self::new((0..=cutoff).map(amp).collect())
            .with_tail_tol(policy.tail_tol)
            .normalize()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<n>` of the (assumed normalized) state.
    pub fn mean_n(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Rescales to unit norm; phases are untouched.
    pub fn normalize(&self) -> Result<Self> {
        let scale = self.amps.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale <= EPS_ZERO {
            return Err(FockError::ZeroState(
                "all amplitudes vanish; nothing to normalize".into(),
            ));
        }
        // Scale first so tiny-but-nonzero vectors do not underflow in norm_sqr.
        let scaled: Vec<Complex64> = self.amps.iter().map(|c| c / scale).collect();
        let norm = scaled.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Ok(Self {
            amps: scaled.into_iter().map(|c| c / norm).collect(),
            tail_tol: self.tail_tol,
        })
    }

    /// Zero-pads to `cutoff` (never truncates).
    pub fn padded(&self, cutoff: usize) -> Self {
        let mut amps = self.amps.clone();
        if amps.len() <= cutoff {
            amps.resize(cutoff + 1, Complex64::default());
        }
        Self {
            amps,
            tail_tol: self.tail_tol,
        }
    }

    /// CSV dump with header `n,re_c,im_c`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,re_c,im_c")?;
        for (n, c) in self.amps.iter().enumerate() {
            writeln!(out, "{n},{:.16e},{:.16e}", c.re, c.im)?;
        }
        Ok(())
    }
}

/// `sum_n conj(a_n) b_n`, zero-padding the shorter vector.
pub fn inner_product(a: &FockState, b: &FockState) -> Complex64 {
    a.amps
        .iter()
        .zip(b.amps.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// `|<a|b>|^2` for normalized inputs.
pub fn fidelity(a: &FockState, b: &FockState) -> f64 {
    inner_product(a, b).norm_sqr()
}

/// Nonnegative photon-number probabilities `p_0..p_cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
    tail_tol: f64,
}

impl PhotonDistribution {
    /// Validates and clamps: entries in `(-EPS_NEG, 0)` become zero; anything
    /// more negative, non-finite, or a total outside
    /// `[1 - tail_tol, 1 + EPS_NORM]` is rejected.
    pub fn new(probs: Vec<f64>, tail_tol: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(FockError::InvalidDistribution("empty distribution".into()));
        }
        let mut probs = probs;
        for (n, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(FockError::InvalidDistribution(format!(
                    "p_{n} is not finite"
                )));
            }
            if *p < -EPS_NEG {
                return Err(FockError::InvalidDistribution(format!(
                    "p_{n} = {p:e} is negative beyond rounding"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if total < 1.0 - tail_tol - EPS_NORM || total > 1.0 + EPS_NORM {
            return Err(FockError::InvalidDistribution(format!(
                "total probability {total:.17} outside [1 - {tail_tol:e}, 1 + {EPS_NORM:e}]"
            )));
        }
        Ok(Self { probs, tail_tol })
    }

    /// Clamps rounding negatives, then rescales to unit total. Used by builders
    /// after truncation; fails like [`PhotonDistribution::new`] on genuine
    /// negativity.
    pub fn renormalized(probs: Vec<f64>, tail_tol: f64) -> Result<Self> {
        let mut probs = probs;
        for (n, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -EPS_NEG {
                return Err(FockError::InvalidDistribution(format!(
                    "p_{n} = {p:e} is not a probability"
                )));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if total <= EPS_ZERO {
            return Err(FockError::InvalidDistribution(
                "zero total probability".into(),
            ));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Self::new(probs, tail_tol)
    }

    /// Materializes a unit-mass probability source up to the policy cutoff.
    pub fn from_fn<F>(prob: F, policy: &CutoffPolicy) -> Result<Self>
    where
        F: Fn(usize) -> f64,
    {
        let cutoff = ensure_cutoff(&prob, policy)?;
        Self::renormalized((0..=cutoff).map(prob).collect(), policy.tail_tol)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn p(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    pub fn cutoff(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// CSV dump with header `n,p_n`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,p_n")?;
        for (n, p) in self.probs.iter().enumerate() {
            writeln!(out, "{n},{p:.16e}")?;
        }
        Ok(())
    }
}

/// `p_n = |c_n|^2`. Fails if the state is not normalized.
pub fn distribution_of(state: &FockState) -> Result<PhotonDistribution> {
    PhotonDistribution::new(
        state.amps.iter().map(|c| c.norm_sqr()).collect(),
        state.tail_tol,
    )
}

/// `c_n = exp(i phi_n) sqrt(p_n)`; phases beyond `phases.len()` are zero.
pub fn state_from_distribution(dist: &PhotonDistribution, phases: &[f64]) -> FockState {
    let amps = dist
        .probs
        .iter()
        .enumerate()
        .map(|(n, &p)| Complex64::from_polar(p.sqrt(), phases.get(n).copied().unwrap_or(0.0)))
        .collect();
    FockState::new(amps).with_tail_tol(dist.tail_tol)
}
