//! Photon-counting statistics and the closed-form predictions for the
//! subtracted, added and phase-shifted partners of a state.
//!
//! Every quantity here is a direct finite sum over the stored distribution.
//! Factorial moments are never obtained by differentiating a generating
//! function numerically.

use serde::Serialize;

use crate::error::{FockError, Result};
use crate::fock::{PhotonDistribution, EPS_ZERO};
use crate::operators::EXP_PHASE_FLOOR;

/// Half-width of the band around `q = 0` (and around each tier boundary)
/// inside which a state is not promoted to the next class.
pub const EPS_Q: f64 = 1e-9;

/// Photon-statistics class, strongest applicable tier.
///
/// Tiers nest: `HyperPoissonian => SuperChaotic => SuperPoissonian`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatsClass {
    /// `q < 0`
    SubPoissonian,
    /// `|q| <= EPS_Q`
    Poissonian,
    /// `q > 0`
    SuperPoissonian,
    /// `q > nbar`, i.e. `g2 > 2`
    SuperChaotic,
    /// `q > 1 + 2 nbar`
    HyperPoissonian,
}

impl StatsClass {
    pub fn classify(mean: f64, q: f64) -> Self {
        if q.abs() <= EPS_Q {
            Self::Poissonian
        } else if q < 0.0 {
            Self::SubPoissonian
        } else if q - (1.0 + 2.0 * mean) > EPS_Q {
            Self::HyperPoissonian
        } else if q - mean > EPS_Q {
            Self::SuperChaotic
        } else {
            Self::SuperPoissonian
        }
    }
}

/// Statistics of one distribution. `None` marks a quantity that is
/// undefined for the vacuum (a `0/0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub mean: f64,
    pub variance: f64,
    /// `n^(1)..n^(4)`, the expectations of `n (n-1) ... (n-r+1)`.
    pub factorial_moments: [f64; 4],
    pub mandel_q: Option<f64>,
    pub g2: Option<f64>,
    pub klass: Option<StatsClass>,
}

/// `sum_n n (n-1) ... (n-r+1) p_n`
pub fn factorial_moment(probs: &[f64], r: usize) -> f64 {
    probs
        .iter()
        .enumerate()
        .skip(r)
        .map(|(n, p)| {
            let falling: f64 = (0..r).map(|j| (n - j) as f64).product();
            falling * p
        })
        .sum()
}

pub fn stats(dist: &PhotonDistribution) -> StatsReport {
    let probs = dist.probs();
    let factorial_moments = [
        factorial_moment(probs, 1),
        factorial_moment(probs, 2),
        factorial_moment(probs, 3),
        factorial_moment(probs, 4),
    ];
    let mean = factorial_moments[0];
    // Two-pass variance; avoids the n^(2) + n - n^2 cancellation at large n.
    let variance: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let d = n as f64 - mean;
            d * d * p
        })
        .sum();
    let (mandel_q, g2, klass) = if mean > EPS_ZERO {
        let q = variance / mean - 1.0;
        (
            Some(q),
            Some(factorial_moments[1] / (mean * mean)),
            Some(StatsClass::classify(mean, q)),
        )
    } else {
        (None, None, None)
    };
    StatsReport {
        mean,
        variance,
        factorial_moments,
        mandel_q,
        g2,
        klass,
    }
}

/// Closed-form expectations for the partners of a state, from its moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    /// Mean of the photon-subtracted state, `n^(2) / nbar`.
    pub n_minus: Option<f64>,
    /// Mean of the photon-added state, `nbar + 1 + var / (1 + nbar)`.
    pub n_plus: f64,
    /// Mandel q of the photon-subtracted state,
    /// `(nbar n^(3) - n^(2)^2) / (nbar n^(2))`.
    pub q_minus: Option<f64>,
    /// Mean after the lowering phase operator, `nbar / (1 - p0) - 1`.
    pub n_tilde_minus: Option<f64>,
    /// Mean after the raising phase operator, `nbar + 1`.
    pub n_tilde_plus: f64,
    /// Modified photon excess, `p0 nbar / (1 - p0) - 1`.
    pub q_tilde: Option<f64>,
}

pub fn predictions(dist: &PhotonDistribution) -> PredictionReport {
    let s = stats(dist);
    let mean = s.mean;
    let [_, n2, n3, _] = s.factorial_moments;
    let p0 = dist.p(0);
    let excited: f64 = dist.probs().iter().skip(1).sum();

    let n_minus = (mean > EPS_ZERO).then(|| n2 / mean);
    let q_minus = (mean > EPS_ZERO && n2 > EPS_ZERO).then(|| (mean * n3 - n2 * n2) / (mean * n2));
    let phase_ok = excited >= EXP_PHASE_FLOOR;
    PredictionReport {
        n_minus,
        n_plus: mean + 1.0 + s.variance / (1.0 + mean),
        q_minus,
        n_tilde_minus: phase_ok.then(|| mean / excited - 1.0),
        n_tilde_plus: mean + 1.0,
        q_tilde: phase_ok.then(|| p0 * mean / excited - 1.0),
    }
}

/// Audit record for the hyper-Poissonian test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperCheck {
    /// `q > 1 + 2 nbar` (outside the `EPS_Q` band)
    pub hyper: bool,
    pub q: f64,
    pub bound: f64,
    pub n_minus: f64,
    pub n_plus: f64,
    /// `N- > N+` from the two direct sums, with the same band scaled by
    /// `1 / (1 + nbar)` (since `N- - N+ = (q - 1 - 2 nbar) / (1 + nbar)`).
    pub subtraction_wins: bool,
}

pub fn check_hyper(dist: &PhotonDistribution) -> Result<HyperCheck> {
    let probs = dist.probs();
    let mean = dist.mean();
    if mean <= EPS_ZERO {
        return Err(FockError::ZeroState(
            "hyper-Poissonian test needs nbar > 0".into(),
        ));
    }
    let q = stats(dist).mandel_q.expect("mean > 0");
    let bound = 1.0 + 2.0 * mean;
    // N- and N+ as independent direct sums, not via q.
    let n_minus: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p)
        .sum::<f64>()
        / mean;
    let n_plus: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| ((n + 1) * (n + 1)) as f64 * p)
        .sum::<f64>()
        / (1.0 + mean);
    Ok(HyperCheck {
        hyper: q - bound > EPS_Q,
        q,
        bound,
        n_minus,
        n_plus,
        subtraction_wins: (n_minus - n_plus) * (1.0 + mean) > EPS_Q,
    })
}

/// Closed forms for `sqrt(r)|n> + sqrt(1-r)|m>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoFockAnalysis {
    pub nbar: f64,
    pub n_minus: f64,
    pub q: f64,
    /// `r (1-r) (n-m)^2 > r (n-m) + m`, equivalent to `N- > nbar`.
    pub condition_holds: bool,
    pub condition_lhs: f64,
    pub condition_rhs: f64,
    /// Mandel q of the subtracted state; `None` when that state is the vacuum.
    pub q_minus: Option<f64>,
    /// Large-`n` limit of `q_minus`: `(1-r) m / r - 1`.
    pub q_minus_limit: f64,
}

pub fn two_fock_analysis(n: usize, m: usize, r: f64) -> Result<TwoFockAnalysis> {
    if n <= m {
        return Err(FockError::InvalidParams(format!(
            "two-Fock superposition needs n > m, got n={n}, m={m}"
        )));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(FockError::InvalidParams(format!(
            "two-Fock weight must satisfy 0 < r < 1, got r={r}"
        )));
    }
    let (nf, mf) = (n as f64, m as f64);
    let d = nf - mf;
    let nbar = r * nf + (1.0 - r) * mf;
    let n_minus = (r * nf * (nf - 1.0) + (1.0 - r) * mf * (mf - 1.0)) / nbar;
    let condition_lhs = r * (1.0 - r) * d * d;
    let condition_rhs = r * d + mf;

    // Subtracted state: weights r n on |n-1>, (1-r) m on |m-1>.
    let high = r * nf;
    let low = (1.0 - r) * mf;
    let p_high = high / (high + low);
    let mean_minus = p_high * (nf - 1.0) + (1.0 - p_high) * (mf - 1.0).max(0.0);
    let var_minus = if m == 0 {
        0.0
    } else {
        p_high * (1.0 - p_high) * d * d
    };
    let q_minus = (mean_minus > EPS_ZERO).then(|| var_minus / mean_minus - 1.0);

    Ok(TwoFockAnalysis {
        nbar,
        n_minus,
        q: n_minus - nbar,
        condition_holds: condition_lhs > condition_rhs,
        condition_lhs,
        condition_rhs,
        q_minus,
        q_minus_limit: (1.0 - r) * mf / r - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::DEFAULT_TAIL_TOL;

    fn dist(p: &[f64]) -> PhotonDistribution {
        PhotonDistribution::new(p.to_vec(), DEFAULT_TAIL_TOL).unwrap()
    }

    fn poisson(lambda: f64, cutoff: usize) -> PhotonDistribution {
        let mut p = vec![(-lambda).exp()];
        for n in 1..=cutoff {
            let prev = p[n - 1];
            p.push(prev * lambda / n as f64);
        }
        PhotonDistribution::renormalized(p, DEFAULT_TAIL_TOL).unwrap()
    }

    fn squeezed_vacuum(nbar: f64, cutoff: usize) -> PhotonDistribution {
        let s = nbar.sqrt().asinh();
        let t2 = s.tanh().powi(2);
        let mut p = vec![0.0; cutoff + 1];
        p[0] = 1.0 / s.cosh();
        let mut m = 1;
        while 2 * m <= cutoff {
            // p_{2m} / p_{2m-2} = (2m)(2m-1) t^2 / (4 m^2)
            p[2 * m] = p[2 * m - 2] * (2 * m * (2 * m - 1)) as f64 * t2 / (4 * m * m) as f64;
            m += 1;
        }
        PhotonDistribution::renormalized(p, DEFAULT_TAIL_TOL).unwrap()
    }

    #[test]
    fn fock_state_is_sub_poissonian() {
        let mut p = vec![0.0; 6];
        p[5] = 1.0;
        let s = stats(&dist(&p));
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.mandel_q, Some(-1.0));
        assert_eq!(s.klass, Some(StatsClass::SubPoissonian));
        assert_eq!(s.factorial_moments, [5.0, 20.0, 60.0, 120.0]);
    }

    #[test]
    fn coherent_is_poissonian() {
        let s = stats(&poisson(4.0, 80));
        assert!((s.mean - 4.0).abs() < 1e-12);
        assert!(s.mandel_q.unwrap().abs() < 1e-12);
        assert!((s.g2.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.klass, Some(StatsClass::Poissonian));
    }

    #[test]
    fn squeezed_vacuum_on_hyper_boundary() {
        let nbar = 1f64.sinh().powi(2);
        let s = stats(&squeezed_vacuum(nbar, 400));
        assert!((s.mean - 1.381097845541).abs() < 1e-10);
        assert!((s.mandel_q.unwrap() - 3.762195691082).abs() < 1e-10);
        // On the boundary, so the band keeps it one tier below.
        assert_eq!(s.klass, Some(StatsClass::SuperChaotic));
    }

    #[test]
    fn vacuum_is_unclassified() {
        let s = stats(&dist(&[1.0, 0.0]));
        assert_eq!(s.mean, 0.0);
        assert_eq!((s.mandel_q, s.g2, s.klass), (None, None, None));
        let p = predictions(&dist(&[1.0]));
        assert_eq!(
            (p.n_minus, p.q_minus, p.n_tilde_minus, p.q_tilde),
            (None, None, None, None)
        );
        assert_eq!(p.n_plus, 1.0);
    }

    #[test]
    fn variance_matches_factorial_moments() {
        let d = dist(&[0.1, 0.2, 0.3, 0.15, 0.25]);
        let s = stats(&d);
        let [n1, n2, ..] = s.factorial_moments;
        assert!((s.variance - (n2 + n1 - n1 * n1)).abs() < 1e-12);
        assert!((s.mandel_q.unwrap() - (s.variance / s.mean - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn class_tiers() {
        assert_eq!(StatsClass::classify(1.0, -0.5), StatsClass::SubPoissonian);
        assert_eq!(StatsClass::classify(1.0, 1e-10), StatsClass::Poissonian);
        assert_eq!(StatsClass::classify(1.0, 0.5), StatsClass::SuperPoissonian);
        assert_eq!(StatsClass::classify(1.0, 2.0), StatsClass::SuperChaotic);
        assert_eq!(StatsClass::classify(1.0, 3.5), StatsClass::HyperPoissonian);
    }

    #[test]
    fn negative_binomial_predictions() {
        // xi = 0.5, mu = 2: p_n = (1-xi)^mu (n+1) xi^n
        let p: Vec<f64> = (0..200)
            .map(|n| 0.25 * (n + 1) as f64 * 0.5f64.powi(n))
            .collect();
        let pr = predictions(&PhotonDistribution::renormalized(p, DEFAULT_TAIL_TOL).unwrap());
        assert!((pr.n_minus.unwrap() - 3.0).abs() < 1e-12);
        assert!((pr.q_minus.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fock_added_gap_is_one() {
        for n in 0..6 {
            let mut p = vec![0.0; n + 1];
            p[n] = 1.0;
            let pr = predictions(&dist(&p));
            assert!((pr.n_plus - n as f64 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hyper_check_witnesses() {
        // coherent + vacuum at alpha = 3, eta = 0.1
        let (alpha2, eta) = (9.0f64, 0.1);
        let mut p = vec![0.0; 80];
        let mut term = (-alpha2).exp();
        p[0] = 1.0 - eta * (1.0 - (-alpha2).exp());
        for (n, slot) in p.iter_mut().enumerate().skip(1) {
            term *= alpha2 / n as f64;
            *slot = eta * term;
        }
        let h =
            check_hyper(&PhotonDistribution::renormalized(p, DEFAULT_TAIL_TOL).unwrap()).unwrap();
        assert!(h.hyper && h.subtraction_wins);
        assert!((h.n_minus - 9.0).abs() < 1e-10);
        assert!((h.n_plus - 11.8 / 1.9).abs() < 1e-10);

        let h = check_hyper(&poisson(3.0, 80)).unwrap();
        assert!(!h.hyper && !h.subtraction_wins);

        // mu = 1, xi = 0.9: geometric with q = 9, nbar = 9
        let p: Vec<f64> = (0..800).map(|n| 0.1 * 0.9f64.powi(n)).collect();
        let h =
            check_hyper(&PhotonDistribution::renormalized(p, DEFAULT_TAIL_TOL).unwrap()).unwrap();
        assert!((h.q - 9.0).abs() < 1e-9 && (h.bound - 19.0).abs() < 1e-9);
        assert!(!h.hyper && !h.subtraction_wins);

        assert!(check_hyper(&dist(&[1.0])).is_err());
    }

    #[test]
    fn two_fock_examples() {
        let a = two_fock_analysis(10, 0, 0.5).unwrap();
        assert_eq!((a.nbar, a.n_minus), (5.0, 9.0));
        assert!(a.condition_holds);
        assert_eq!(a.q_minus, Some(-1.0));

        let a = two_fock_analysis(2, 1, 0.5).unwrap();
        assert_eq!((a.condition_lhs, a.condition_rhs), (0.25, 1.5));
        assert!(!a.condition_holds);

        let a = two_fock_analysis(100, 1, 0.5).unwrap();
        assert_eq!(a.q_minus_limit, 0.0);
        assert!(a.q_minus.unwrap().abs() < 0.1);

        assert!(two_fock_analysis(3, 3, 0.5).is_err());
        assert!(two_fock_analysis(3, 1, 1.0).is_err());
        assert!(two_fock_analysis(1, 0, 0.5).unwrap().q_minus.is_none());
    }
}
