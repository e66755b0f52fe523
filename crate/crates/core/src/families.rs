//! Named state families, their parameter domains, canonical text form, and
//! the closed-form expectations known for them.

use std::f64::consts::{E, LN_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use statrs::function::factorial::{ln_binomial, ln_factorial};
use statrs::function::gamma::ln_gamma;

use crate::error::{FockError, Result};
use crate::fock::{fidelity, state_from_distribution, CutoffPolicy, FockState};
use crate::genfun::{
    gamma_family, gamma_family_nbar_limit, log0_family, log_q_family, log_q_nbar_limit,
    LOG0_NBAR_LIMIT,
};
use crate::operators::subtracted;
use crate::statistics::two_fock_analysis;

/// Largest `|z|` for which the logarithmic state has a real vacuum
/// amplitude: `1 + ln(1 - z^2) >= 0`.
pub fn simon_log_z_limit() -> f64 {
    (1.0 - (-1.0f64).exp()).sqrt()
}

/// Threshold used by the fidelity checks below.
pub const FIDELITY_THRESHOLD: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FamilyKind {
    Fock,
    TwoFock,
    Coherent,
    CoherentVacuum,
    NegativeBinomial,
    Binomial,
    OddCoherent,
    SqueezedVacuum,
    SimonLog,
    PhaseCoherent,
    GammaFamily,
    LogQ,
    Log0,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 13] = [
        FamilyKind::Fock,
        FamilyKind::TwoFock,
        FamilyKind::Coherent,
        FamilyKind::CoherentVacuum,
        FamilyKind::NegativeBinomial,
        FamilyKind::Binomial,
        FamilyKind::OddCoherent,
        FamilyKind::SqueezedVacuum,
        FamilyKind::SimonLog,
        FamilyKind::PhaseCoherent,
        FamilyKind::GammaFamily,
        FamilyKind::LogQ,
        FamilyKind::Log0,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FamilyKind::Fock => "fock",
            FamilyKind::TwoFock => "twofock",
            FamilyKind::Coherent => "coherent",
            FamilyKind::CoherentVacuum => "cohvac",
            FamilyKind::NegativeBinomial => "negbin",
            FamilyKind::Binomial => "binomial",
            FamilyKind::OddCoherent => "oddcoh",
            FamilyKind::SqueezedVacuum => "sqvac",
            FamilyKind::SimonLog => "simonlog",
            FamilyKind::PhaseCoherent => "phase",
            FamilyKind::GammaFamily => "gamma",
            FamilyKind::LogQ => "logq",
            FamilyKind::Log0 => "log0",
        }
    }
}

/// A family member with its parameters. All parameters are real and
/// nonnegative; global phases are irrelevant to every statistic here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    Fock {
        n: usize,
    },
    /// `sqrt(r)|n> + sqrt(1-r)|m>`
    TwoFock {
        n: usize,
        m: usize,
        r: f64,
    },
    Coherent {
        alpha: f64,
    },
    /// `sqrt(eta)|alpha> + xi|0>` with real `xi` fixed by normalization.
    CoherentVacuum {
        alpha: f64,
        eta: f64,
    },
    NegativeBinomial {
        xi: f64,
        mu: f64,
    },
    Binomial {
        p: f64,
        trials: usize,
    },
    OddCoherent {
        alpha: f64,
    },
    /// Parameterized by its mean, `s = asinh(sqrt(nbar))`.
    SqueezedVacuum {
        nbar: f64,
    },
    SimonLog {
        z: f64,
    },
    PhaseCoherent {
        z: f64,
    },
    GammaFamily {
        nbar: f64,
        gamma: f64,
    },
    LogQ {
        nbar: f64,
        q: f64,
    },
    Log0 {
        nbar: f64,
    },
}

fn invalid(msg: String) -> FockError {
    FockError::InvalidParams(msg)
}

fn finite_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// `n ln x` with `0 ln 0 = 0`.
fn xlnx(n: usize, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * x.ln()
    }
}

fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - LN_2
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Real vacuum coefficient `xi` of `sqrt(eta)|alpha> + xi|0>`, the root of
/// `eta + xi^2 + 2 sqrt(eta) e^{-alpha^2/2} xi = 1` with the smaller `|xi|`.
pub fn coherent_vacuum_xi(alpha: f64, eta: f64) -> Result<f64> {
    let b = eta.sqrt() * (-alpha * alpha / 2.0).exp();
    let disc = b * b + 1.0 - eta;
    if disc < 0.0 {
        return Err(FockError::NoRealRoot { alpha, eta });
    }
    let root = disc.sqrt();
    let (plus, minus) = (-b + root, -b - root);
    Ok(if plus.abs() <= minus.abs() {
        plus
    } else {
        minus
    })
}

fn coherent_amp(alpha: f64, n: usize) -> f64 {
    (-alpha * alpha / 2.0 + xlnx(n, alpha) - 0.5 * ln_factorial(n as u64)).exp()
}

impl FamilySpec {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FamilySpec::Fock { .. } => FamilyKind::Fock,
            FamilySpec::TwoFock { .. } => FamilyKind::TwoFock,
            FamilySpec::Coherent { .. } => FamilyKind::Coherent,
            FamilySpec::CoherentVacuum { .. } => FamilyKind::CoherentVacuum,
            FamilySpec::NegativeBinomial { .. } => FamilyKind::NegativeBinomial,
            FamilySpec::Binomial { .. } => FamilyKind::Binomial,
            FamilySpec::OddCoherent { .. } => FamilyKind::OddCoherent,
            FamilySpec::SqueezedVacuum { .. } => FamilyKind::SqueezedVacuum,
            FamilySpec::SimonLog { .. } => FamilyKind::SimonLog,
            FamilySpec::PhaseCoherent { .. } => FamilyKind::PhaseCoherent,
            FamilySpec::GammaFamily { .. } => FamilyKind::GammaFamily,
            FamilySpec::LogQ { .. } => FamilyKind::LogQ,
            FamilySpec::Log0 { .. } => FamilyKind::Log0,
        }
    }

    /// Checks the parameter domain; the error names the violated bound.
    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::Fock { .. } => Ok(()),
            FamilySpec::TwoFock { n, m, r } => {
                if n <= m {
                    return Err(invalid(format!(
                        "twofock needs n > m >= 0, got n={n}, m={m}"
                    )));
                }
                if !(r > 0.0 && r < 1.0) {
                    return Err(invalid(format!("twofock needs 0 < r < 1, got r={r}")));
                }
                Ok(())
            }
            FamilySpec::Coherent { alpha } | FamilySpec::OddCoherent { alpha } => {
                finite_nonneg("alpha", alpha)?;
                if matches!(self, FamilySpec::OddCoherent { .. })
                    && !(alpha > 0.0 && alpha * alpha < 700.0)
                {
                    return Err(invalid(format!(
                        "oddcoh needs 0 < alpha^2 < 700, got alpha={alpha}"
                    )));
                }
                Ok(())
            }
            FamilySpec::CoherentVacuum { alpha, eta } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(invalid(format!(
                        "cohvac needs alpha > 0, got alpha={alpha}"
                    )));
                }
                if !(eta.is_finite() && eta > 0.0) {
                    return Err(invalid(format!("cohvac needs eta > 0, got eta={eta}")));
                }
                coherent_vacuum_xi(alpha, eta).map(|_| ())
            }
            FamilySpec::NegativeBinomial { xi, mu } => {
                if !(0.0..1.0).contains(&xi) {
                    return Err(invalid(format!("negbin needs 0 <= xi < 1, got xi={xi}")));
                }
                if !(mu.is_finite() && mu > 0.0) {
                    return Err(invalid(format!("negbin needs mu > 0, got mu={mu}")));
                }
                Ok(())
            }
            FamilySpec::Binomial { p, trials } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("binomial needs 0 <= p <= 1, got p={p}")));
                }
                if trials == 0 {
                    return Err(invalid("binomial needs M >= 1".into()));
                }
                Ok(())
            }
            FamilySpec::SqueezedVacuum { nbar } => finite_nonneg("sqvac nbar", nbar),
            FamilySpec::SimonLog { z } => {
                let limit = simon_log_z_limit();
                if !(z >= 0.0 && z <= limit) {
                    return Err(invalid(format!(
                        "simonlog needs 0 <= z <= sqrt(1 - 1/e) ~ {limit:.6} so that \
                         |c0|^2 = 1 + ln(1 - z^2) >= 0 (mean <= e - 1); got z={z}"
                    )));
                }
                Ok(())
            }
            FamilySpec::PhaseCoherent { z } => {
                if !(0.0..1.0).contains(&z) {
                    return Err(invalid(format!("phase needs 0 <= z < 1, got z={z}")));
                }
                Ok(())
            }
            FamilySpec::GammaFamily { nbar, gamma } => {
                if !(nbar.is_finite() && nbar > 0.0 && gamma.is_finite() && gamma > 0.0) {
                    return Err(invalid(format!(
                        "gamma family needs nbar > 0 and gamma > 0, got nbar={nbar}, gamma={gamma}"
                    )));
                }
                let limit = gamma_family_nbar_limit(gamma);
                if nbar > limit * (1.0 + 1e-12) {
                    return Err(invalid(format!(
                        "gamma family with gamma < 1 needs gamma*nbar <= |ln(1-gamma)| \
                         (nbar <= {limit}), got nbar={nbar}"
                    )));
                }
                Ok(())
            }
            FamilySpec::LogQ { nbar, q } => {
                if !(nbar.is_finite() && nbar > 0.0 && q.is_finite() && q > 0.0) {
                    return Err(invalid(format!(
                        "logq needs nbar > 0 and q > 0, got nbar={nbar}, q={q}"
                    )));
                }
                let limit = log_q_nbar_limit(q);
                if nbar > limit * (1.0 + 1e-12) {
                    return Err(invalid(format!(
                        "logq needs nbar <= q(e-1)/(1-e^-q) = {limit} for q={q}, got nbar={nbar}"
                    )));
                }
                Ok(())
            }
            FamilySpec::Log0 { nbar } => {
                if !(nbar.is_finite() && nbar > 0.0 && nbar <= LOG0_NBAR_LIMIT * (1.0 + 1e-15)) {
                    return Err(invalid(format!(
                        "log0 needs 0 < nbar <= e - 1 ~ {:.5} (p0 = 1 - ln(1+nbar) >= 0), got nbar={nbar}",
                        E - 1.0
                    )));
                }
                Ok(())
            }
        }
    }

    /// Builds the normalized truncated state.
    pub fn build(&self, policy: &CutoffPolicy) -> Result<FockState> {
        self.validate()?;
        let finite = |amps: Vec<Complex64>| -> Result<FockState> {
            if amps.len() > policy.max_cutoff + 1 {
                return Err(FockError::CutoffOverflow {
                    max_cutoff: policy.max_cutoff,
                    tail: 1.0,
                    tail_tol: policy.tail_tol,
                });
            }
            FockState::new(amps)
                .with_tail_tol(policy.tail_tol)
                .normalize()
        };
        match *self {
            FamilySpec::Fock { n } => {
                let mut amps = vec![real(0.0); n + 1];
                amps[n] = real(1.0);
                finite(amps)
            }
            FamilySpec::TwoFock { n, m, r } => {
                let mut amps = vec![real(0.0); n + 1];
                amps[n] = real(r.sqrt());
                amps[m] = real((1.0 - r).sqrt());
                finite(amps)
            }
            FamilySpec::Binomial { p, trials } => finite(
                (0..=trials)
                    .map(|n| {
                        let ln_p = ln_binomial(trials as u64, n as u64)
                            + xlnx(n, p)
                            + xlnx(trials - n, 1.0 - p);
                        real((0.5 * ln_p).exp())
                    })
                    .collect(),
            ),
            FamilySpec::Coherent { alpha } => {
                FockState::from_fn(|n| real(coherent_amp(alpha, n)), policy)
            }
            FamilySpec::CoherentVacuum { alpha, eta } => {
                let xi = coherent_vacuum_xi(alpha, eta)?;
                let root_eta = eta.sqrt();
                FockState::from_fn(
                    |n| {
                        let coh = root_eta * coherent_amp(alpha, n);
                        real(if n == 0 { coh + xi } else { coh })
                    },
                    policy,
                )
            }
            FamilySpec::NegativeBinomial { xi, mu } => {
                if xi == 0.0 {
                    return finite(vec![real(1.0)]);
                }
                let base = mu * (-xi).ln_1p() - ln_gamma(mu);
                FockState::from_fn(
                    |n| {
                        let ln_p =
                            base + ln_gamma(mu + n as f64) - ln_factorial(n as u64) + xlnx(n, xi);
                        real((0.5 * ln_p).exp())
                    },
                    policy,
                )
            }
            FamilySpec::OddCoherent { alpha } => {
                let ln_norm = ln_sinh(alpha * alpha);
                FockState::from_fn(
                    |n| {
                        if n % 2 == 0 {
                            real(0.0)
                        } else {
                            real(
                                (xlnx(n, alpha) - 0.5 * ln_factorial(n as u64) - 0.5 * ln_norm)
                                    .exp(),
                            )
                        }
                    },
                    policy,
                )
            }
            FamilySpec::SqueezedVacuum { nbar } => {
                let s = nbar.sqrt().asinh();
                let (t, ln_cosh) = (s.tanh(), s.cosh().ln());
                FockState::from_fn(
                    |n| {
                        if n % 2 == 1 {
                            return real(0.0);
                        }
                        let m = n / 2;
                        let ln_mag = xlnx(m, t) + 0.5 * ln_factorial(n as u64)
                            - m as f64 * LN_2
                            - ln_factorial(m as u64)
                            - 0.5 * ln_cosh;
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        real(sign * ln_mag.exp())
                    },
                    policy,
                )
            }
            FamilySpec::SimonLog { z } => {
                let c0 = (1.0 + (-z * z).ln_1p()).max(0.0).sqrt();
                FockState::from_fn(
                    |n| {
                        if n == 0 {
                            real(c0)
                        } else {
                            real((xlnx(n, z) - 0.5 * (n as f64).ln()).exp())
                        }
                    },
                    policy,
                )
            }
            FamilySpec::PhaseCoherent { z } => {
                let c0 = (1.0 - z * z).sqrt();
                FockState::from_fn(|n| real(c0 * xlnx(n, z).exp()), policy)
            }
            FamilySpec::GammaFamily { nbar, gamma } => Ok(state_from_distribution(
                &gamma_family(nbar, gamma, policy)?,
                &[],
            )),
            FamilySpec::LogQ { nbar, q } => Ok(state_from_distribution(
                &log_q_family(nbar, q, policy)?,
                &[],
            )),
            FamilySpec::Log0 { nbar } => {
                Ok(state_from_distribution(&log0_family(nbar, policy)?, &[]))
            }
        }
    }

    /// Closed-form values known for this family.
    pub fn relations(&self) -> Result<Relations> {
        self.validate()?;
        let mut rel = Relations::default();
        match *self {
            FamilySpec::TwoFock { n, m, r } => {
                let a = two_fock_analysis(n, m, r)?;
                rel.nbar = Some(a.nbar);
                rel.n_minus = Some(a.n_minus);
                rel.q = Some(a.q);
            }
            FamilySpec::CoherentVacuum { alpha, eta } => {
                let a2 = alpha * alpha;
                let nbar = eta * a2;
                rel.nbar = Some(nbar);
                rel.n_minus = Some(a2);
                rel.q = Some(a2 - nbar);
                rel.n_plus = Some((eta * a2 * a2 + 3.0 * eta * a2 + 1.0) / (1.0 + eta * a2));
            }
            FamilySpec::NegativeBinomial { xi, mu } => {
                let q = xi / (1.0 - xi);
                let nbar = mu * q;
                rel.q = Some(q);
                rel.nbar = Some(nbar);
                rel.n_minus = Some(nbar + q);
                rel.n_plus = Some(nbar + 1.0 + q + xi * (mu - 1.0) / (1.0 + xi * (mu - 1.0)));
            }
            FamilySpec::SqueezedVacuum { nbar } => {
                rel.nbar = Some(nbar);
                rel.q = Some(1.0 + 2.0 * nbar);
            }
            FamilySpec::SimonLog { z } => {
                rel.nbar = Some(z * z / (1.0 - z * z));
                rel.q = Some(0.0);
            }
            FamilySpec::PhaseCoherent { z } => {
                let nbar = z * z / (1.0 - z * z);
                rel.nbar = Some(nbar);
                rel.n_tilde_minus = Some(nbar);
            }
            _ => {
                return Err(FockError::UnsupportedSpec(format!(
                    "no closed-form relations recorded for '{}'",
                    self.kind().tag()
                )))
            }
        }
        Ok(rel)
    }

    /// Draws a member with parameters in a range that keeps cutoffs small.
    pub fn random<R: Rng + ?Sized>(kind: FamilyKind, rng: &mut R) -> Self {
        match kind {
            FamilyKind::Fock => FamilySpec::Fock {
                n: rng.random_range(1..=40),
            },
            FamilyKind::TwoFock => {
                let n = rng.random_range(1..=60);
                FamilySpec::TwoFock {
                    n,
                    m: rng.random_range(0..n),
                    r: rng.random_range(0.02..0.98),
                }
            }
            FamilyKind::Coherent => FamilySpec::Coherent {
                alpha: rng.random_range(0.1..4.0),
            },
            FamilyKind::CoherentVacuum => FamilySpec::CoherentVacuum {
                alpha: rng.random_range(0.3..4.0),
                eta: rng.random_range(0.05..1.0),
            },
            FamilyKind::NegativeBinomial => FamilySpec::NegativeBinomial {
                xi: rng.random_range(0.05..0.85),
                mu: rng.random_range(0.2..5.0),
            },
            FamilyKind::Binomial => FamilySpec::Binomial {
                p: rng.random_range(0.05..0.95),
                trials: rng.random_range(1..=40),
            },
            FamilyKind::OddCoherent => FamilySpec::OddCoherent {
                alpha: rng.random_range(0.1..3.0),
            },
            FamilyKind::SqueezedVacuum => FamilySpec::SqueezedVacuum {
                nbar: rng.random_range(0.05..4.0),
            },
            FamilyKind::SimonLog => FamilySpec::SimonLog {
                z: rng.random_range(0.05..simon_log_z_limit()),
            },
            FamilyKind::PhaseCoherent => FamilySpec::PhaseCoherent {
                z: rng.random_range(0.05..0.9),
            },
            FamilyKind::GammaFamily => {
                let gamma: f64 = rng.random_range(0.2..6.0);
                let hi = gamma_family_nbar_limit(gamma).min(5.0);
                FamilySpec::GammaFamily {
                    nbar: rng.random_range(0.05..hi),
                    gamma,
                }
            }
            FamilyKind::LogQ => {
                let q: f64 = rng.random_range(0.05..5.0);
                let hi = log_q_nbar_limit(q).min(5.0);
                FamilySpec::LogQ {
                    nbar: rng.random_range(0.05..hi),
                    q,
                }
            }
            FamilyKind::Log0 => FamilySpec::Log0 {
                nbar: rng.random_range(0.05..LOG0_NBAR_LIMIT),
            },
        }
    }
}

/// Closed-form expectations for a family member; `None` where none is known.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Relations {
    pub nbar: Option<f64>,
    pub q: Option<f64>,
    pub n_minus: Option<f64>,
    pub n_plus: Option<f64>,
    pub n_tilde_minus: Option<f64>,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = self.kind().tag();
        match *self {
            FamilySpec::Fock { n } => write!(f, "{tag}:n={n}"),
            FamilySpec::TwoFock { n, m, r } => write!(f, "{tag}:n={n},m={m},r={r}"),
            FamilySpec::Coherent { alpha } | FamilySpec::OddCoherent { alpha } => {
                write!(f, "{tag}:alpha={alpha}")
            }
            FamilySpec::CoherentVacuum { alpha, eta } => write!(f, "{tag}:alpha={alpha},eta={eta}"),
            FamilySpec::NegativeBinomial { xi, mu } => write!(f, "{tag}:xi={xi},mu={mu}"),
            FamilySpec::Binomial { p, trials } => write!(f, "{tag}:p={p},M={trials}"),
            FamilySpec::SqueezedVacuum { nbar } => write!(f, "{tag}:nbar={nbar}"),
            FamilySpec::SimonLog { z } | FamilySpec::PhaseCoherent { z } => {
                write!(f, "{tag}:z={z}")
            }
            FamilySpec::GammaFamily { nbar, gamma } => write!(f, "{tag}:nbar={nbar},gamma={gamma}"),
            FamilySpec::LogQ { nbar, q } => write!(f, "{tag}:nbar={nbar},q={q}"),
            FamilySpec::Log0 { nbar } => write!(f, "{tag}:nbar={nbar}"),
        }
    }
}

struct Params<'a> {
    tag: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn raw(&self, keys: &[&str]) -> Result<&'a str> {
        self.pairs
            .iter()
            .find(|(k, _)| keys.contains(k))
            .map(|(_, v)| *v)
            .ok_or_else(|| {
                FockError::Parse(format!("'{}' is missing parameter '{}'", self.tag, keys[0]))
            })
    }

    fn float(&self, keys: &[&str]) -> Result<f64> {
        let v = self.raw(keys)?;
        v.parse::<f64>().map_err(|_| {
            FockError::Parse(format!(
                "parameter '{}' of '{}' is not a number: '{v}'",
                keys[0], self.tag
            ))
        })
    }

    fn int(&self, keys: &[&str]) -> Result<usize> {
        let v = self.raw(keys)?;
        v.parse::<usize>().map_err(|_| {
            FockError::Parse(format!(
                "parameter '{}' of '{}' is not a nonnegative integer: '{v}'",
                keys[0], self.tag
            ))
        })
    }
}

impl FromStr for FamilySpec {
    type Err = FockError;

    /// Parses `tag:key=value,...`, e.g. `negbin:xi=0.5,mu=2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (tag, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut pairs = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| FockError::Parse(format!("expected key=value, got '{item}'")))?;
            pairs.push((k.trim(), v.trim()));
        }
        let p = Params { tag, pairs };
        let spec = match tag {
            "fock" => FamilySpec::Fock { n: p.int(&["n"])? },
            "twofock" => FamilySpec::TwoFock {
                n: p.int(&["n"])?,
                m: p.int(&["m"])?,
                r: p.float(&["r"])?,
            },
            "coherent" => FamilySpec::Coherent {
                alpha: p.float(&["alpha"])?,
            },
            "cohvac" => FamilySpec::CoherentVacuum {
                alpha: p.float(&["alpha"])?,
                eta: p.float(&["eta"])?,
            },
            "negbin" => FamilySpec::NegativeBinomial {
                xi: p.float(&["xi"])?,
                mu: p.float(&["mu"])?,
            },
            "binomial" => FamilySpec::Binomial {
                p: p.float(&["p"])?,
                trials: p.int(&["M", "trials"])?,
            },
            "oddcoh" => FamilySpec::OddCoherent {
                alpha: p.float(&["alpha"])?,
            },
            "sqvac" => {
                let nbar = match p.float(&["nbar"]) {
                    Ok(v) => v,
                    Err(_) => p.float(&["s"])?.sinh().powi(2),
                };
                FamilySpec::SqueezedVacuum { nbar }
            }
            "simonlog" => FamilySpec::SimonLog {
                z: p.float(&["z"])?,
            },
            "phase" => FamilySpec::PhaseCoherent {
                z: p.float(&["z"])?,
            },
            "gamma" => FamilySpec::GammaFamily {
                nbar: p.float(&["nbar"])?,
                gamma: p.float(&["gamma"])?,
            },
            "logq" => FamilySpec::LogQ {
                nbar: p.float(&["nbar"])?,
                q: p.float(&["q"])?,
            },
            "log0" => FamilySpec::Log0 {
                nbar: p.float(&["nbar"])?,
            },
            other => {
                return Err(FockError::Parse(format!(
                    "unknown family '{other}' (expected one of: {})",
                    FamilyKind::ALL.map(FamilyKind::tag).join(", ")
                )))
            }
        };
        Ok(spec)
    }
}

/// `|<alpha| a psi>|^2` for `psi = sqrt(eta)|alpha> + xi|0>`.
pub fn subtracted_coherent_fidelity(alpha: f64, eta: f64, policy: &CutoffPolicy) -> Result<f64> {
    let psi = FamilySpec::CoherentVacuum { alpha, eta }.build(policy)?;
    let coh = FamilySpec::Coherent { alpha }.build(policy)?;
    Ok(fidelity(&subtracted(&psi)?.state, &coh))
}

/// Subtracting a photon from the coherent+vacuum superposition leaves the
/// coherent state alone, for any `eta`.
pub fn subtracted_is_coherent_check(alpha: f64, eta: f64, policy: &CutoffPolicy) -> Result<bool> {
    Ok(subtracted_coherent_fidelity(alpha, eta, policy)? > FIDELITY_THRESHOLD)
}

pub fn simonlog_subtract_fidelity(z: f64, policy: &CutoffPolicy) -> Result<f64> {
    let log = FamilySpec::SimonLog { z }.build(policy)?;
    let phase = FamilySpec::PhaseCoherent { z }.build(policy)?;
    Ok(fidelity(&subtracted(&log)?.state, &phase))
}

/// The subtracted partner of the logarithmic state is the coherent phase
/// state with the same `z`.
pub fn simonlog_subtract_is_phase_coherent(z: f64, policy: &CutoffPolicy) -> Result<bool> {
    if !(z > 0.0) {
        return Err(invalid(format!("needs z > 0, got z={z}")));
    }
    Ok(simonlog_subtract_fidelity(z, policy)? > FIDELITY_THRESHOLD)
}
