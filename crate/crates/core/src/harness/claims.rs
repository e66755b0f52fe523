//! Registry of numerical claims. Each claim measures something with the
//! library and compares it to a closed form at a fixed tolerance.

use std::cell::OnceCell;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::factorial::{factorial, ln_factorial};

use crate::error::{FockError, StepError};
use crate::families::{subtracted_coherent_fidelity, FamilyKind, FamilySpec};
use crate::fock::{
    distribution_of, fidelity, state_from_distribution, CutoffPolicy, FockState, PhotonDistribution,
};
use crate::genfun::{
    balazs_moments, cosh_family, gamma_family, gamma_family_nbar_limit, log0_family, log_q_family,
    log_q_nbar_limit, GenFun, TransformKind, LOG0_NBAR_LIMIT,
};
use crate::operators::{
    added, exp_phase, iterate, subtracted, weighted_annihilate, OperatorKind, PhaseDirection,
    Weight,
};
use crate::statistics::{stats, StatsReport};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_DRAWS: usize = 100;
/// Default tolerance for exact identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Default relative tolerance for limits that are approached, not attained.
pub const LIMIT_REL_TOL: f64 = 1e-2;
/// Width of the dead band used when comparing signs of near-zero quantities.
const SIGN_BAND: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random states drawn per family.
    pub draws: usize,
    pub policy: CutoffPolicy,
    /// Only claims whose id starts with this prefix run.
    pub filter: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            draws: DEFAULT_DRAWS,
            policy: CutoffPolicy::from_env(),
            filter: None,
        }
    }
}

/// A random family member, built once and shared by the claims that need it.
#[derive(Debug, Clone)]
pub struct Draw {
    pub spec: FamilySpec,
    pub state: FockState,
    pub dist: PhotonDistribution,
    pub stats: StatsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimError(pub String);

impl fmt::Display for ClaimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<FockError> for ClaimError {
    fn from(e: FockError) -> Self {
        ClaimError(e.to_string())
    }
}

impl From<StepError> for ClaimError {
    fn from(e: StepError) -> Self {
        ClaimError(e.to_string())
    }
}

type ClaimRun = Result<Outcome, ClaimError>;

pub struct Context {
    config: VerifyConfig,
    draws: OnceCell<Result<Vec<Draw>, ClaimError>>,
}

impl Context {
    pub fn new(config: VerifyConfig) -> Self {
        Self {
            config,
            draws: OnceCell::new(),
        }
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.config
    }

    pub fn policy(&self) -> &CutoffPolicy {
        &self.config.policy
    }

    /// All random draws, family by family in [`FamilyKind::ALL`] order.
    pub fn draws(&self) -> Result<&[Draw], ClaimError> {
        self.draws
            .get_or_init(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
                let mut out = Vec::with_capacity(FamilyKind::ALL.len() * self.config.draws);
                for kind in FamilyKind::ALL {
                    for _ in 0..self.config.draws {
                        let spec = FamilySpec::random(kind, &mut rng);
                        let fail = |e: FockError| ClaimError(format!("draw {spec}: {e}"));
                        let state = spec.build(&self.config.policy).map_err(fail)?;
                        let dist = distribution_of(&state).map_err(fail)?;
                        let stats = stats(&dist);
                        out.push(Draw {
                            spec,
                            state,
                            dist,
                            stats,
                        });
                    }
                }
                Ok(out)
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    fn draws_of(&self, kind: FamilyKind) -> Result<impl Iterator<Item = &Draw>, ClaimError> {
        Ok(self.draws()?.iter().filter(move |d| d.spec.kind() == kind))
    }
}

/// Measured and expected values of one claim.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub measured: Vec<f64>,
    pub expected: Vec<f64>,
    pub tolerance: f64,
    pub detail: Option<String>,
}

impl Outcome {
    pub fn values(measured: Vec<f64>, expected: Vec<f64>, tolerance: f64) -> Self {
        Self {
            measured,
            expected,
            tolerance,
            detail: None,
        }
    }

    pub fn scalar(measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::values(vec![measured], vec![expected], tolerance)
    }

    /// A yes/no claim encoded as `1 == 1`.
    pub fn flag(ok: bool) -> Self {
        Self::scalar(if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// `|measured - expected| <= tolerance` elementwise; NaN never passes.
    pub fn passed(&self) -> bool {
        !self.measured.is_empty()
            && self.measured.len() == self.expected.len()
            && self
                .measured
                .iter()
                .zip(&self.expected)
                .all(|(m, e)| (m - e).abs() <= self.tolerance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Passed => "passed",
            Status::Failed => "failed",
            Status::Skipped => "skipped",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimResult {
    pub claim_id: String,
    pub paper_anchor: String,
    pub status: Status,
    pub passed: bool,
    pub measured: Vec<f64>,
    pub expected: Vec<f64>,
    pub tolerance: f64,
    /// Skip reason, error message, or a short note on what was measured.
    pub detail: Option<String>,
    pub runtime_ms: u64,
}

pub struct Claim {
    pub id: String,
    pub anchor: String,
    needs_draws: bool,
    run: Box<dyn Fn(&Context) -> ClaimRun>,
}

impl Claim {
    fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        run: impl Fn(&Context) -> ClaimRun + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            needs_draws: false,
            run: Box::new(run),
        }
    }

    fn on_draws(mut self) -> Self {
        self.needs_draws = true;
        self
    }

    pub fn run(&self, ctx: &Context) -> ClaimResult {
        let start = Instant::now();
        let mut result = ClaimResult {
            claim_id: self.id.clone(),
            paper_anchor: self.anchor.clone(),
            status: Status::Skipped,
            passed: false,
            measured: Vec::new(),
            expected: Vec::new(),
            tolerance: 0.0,
            detail: None,
            runtime_ms: 0,
        };
        if self.needs_draws && ctx.config.draws == 0 {
            result.detail = Some("no random draws requested (--draws 0)".into());
            return result;
        }
        match (self.run)(ctx) {
            Ok(o) => {
                result.passed = o.passed();
                result.status = if result.passed {
                    Status::Passed
                } else {
                    Status::Failed
                };
                result.measured = o.measured;
                result.expected = o.expected;
                result.tolerance = o.tolerance;
                result.detail = o.detail;
            }
            Err(e) => {
                result.status = Status::Error;
                result.detail = Some(e.0);
            }
        }
        result.runtime_ms = start.elapsed().as_millis() as u64;
        result
    }
}

/// Runs every registered claim whose id matches the filter, ordered by id.
pub fn run_claims(config: &VerifyConfig) -> Vec<ClaimResult> {
    let ctx = Context::new(config.clone());
    registry()
        .iter()
        .filter(|c| config.filter.as_deref().is_none_or(|f| c.id.starts_with(f)))
        .map(|c| c.run(&ctx))
        .collect()
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |acc: f64, x| {
        if acc.is_nan() || x.is_nan() {
            f64::NAN
        } else {
            acc.max(x.abs())
        }
    })
}

fn mandel_q(s: &StatsReport) -> Result<f64, ClaimError> {
    s.mandel_q
        .ok_or_else(|| ClaimError("Mandel q undefined for the vacuum".into()))
}

fn n_minus(state: &FockState) -> Result<f64, ClaimError> {
    Ok(subtracted(state)?.state.mean_n())
}

fn n_plus(state: &FockState) -> f64 {
    added(state).state.mean_n()
}

fn tilde_means(state: &FockState) -> Result<(f64, f64), ClaimError> {
    let down = exp_phase(state, PhaseDirection::Down)?.state.mean_n();
    let up = exp_phase(state, PhaseDirection::Up)?.state.mean_n();
    Ok((down, up))
}

/// Sign with a dead band: values within `band` of zero count as zero.
fn banded_sign(x: f64, band: f64) -> i8 {
    if x > band {
        1
    } else if x < -band {
        -1
    } else {
        0
    }
}

fn build(spec: FamilySpec, policy: &CutoffPolicy) -> Result<(FockState, StatsReport), ClaimError> {
    let state = spec.build(policy)?;
    let s = stats(&distribution_of(&state)?);
    Ok((state, s))
}

fn max_coeff_gap(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    max_abs((0..n).map(|i| a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)))
}

fn poisson(lambda: f64, n: usize) -> f64 {
    if n == 0 {
        (-lambda).exp()
    } else {
        (n as f64 * lambda.ln() - lambda - ln_factorial(n as u64)).exp()
    }
}

/// Every registered claim, sorted by id.
pub fn registry() -> Vec<Claim> {
    let mut claims = Vec::new();
    photon_excess_claims(&mut claims);
    photon_added_claims(&mut claims);
    hyper_claims(&mut claims);
    coherent_vacuum_claims(&mut claims);
    negative_binomial_claims(&mut claims);
    gamma_claims(&mut claims);
    cosh_claims(&mut claims);
    log_q_claims(&mut claims);
    log0_claims(&mut claims);
    phase_operator_claims(&mut claims);
    two_fock_claims(&mut claims);
    transform_claims(&mut claims);
    claims.sort_by(|a, b| a.id.cmp(&b.id));
    claims
}

fn photon_excess_claims(claims: &mut Vec<Claim>) {
    for kind in FamilyKind::ALL {
        claims.push(
            Claim::new(
                format!("eq7.photon_excess.{}", kind.tag()),
                "photon excess: N- - nbar = q (Mandel)",
                move |ctx| {
                    let mut devs = Vec::new();
                    for d in ctx.draws_of(kind)? {
                        devs.push(n_minus(&d.state)? - d.stats.mean - mandel_q(&d.stats)?);
                    }
                    Ok(Outcome::scalar(max_abs(devs), 0.0, IDENTITY_TOL)
                        .with_detail("max |N- - nbar - q| over draws"))
                },
            )
            .on_draws(),
        );
    }
}

fn photon_added_claims(claims: &mut Vec<Claim>) {
    for kind in FamilyKind::ALL {
        claims.push(
            Claim::new(
                format!("eq10.photon_added_mean.{}", kind.tag()),
                "photon-added mean: N+ = nbar + 1 + var / (1 + nbar)",
                move |ctx| {
                    let devs = ctx.draws_of(kind)?.map(|d| {
                        let s = &d.stats;
                        n_plus(&d.state) - (s.mean + 1.0 + s.variance / (1.0 + s.mean))
                    });
                    Ok(Outcome::scalar(max_abs(devs), 0.0, IDENTITY_TOL)
                        .with_detail("max |N+ - nbar - 1 - var/(1+nbar)| over draws"))
                },
            )
            .on_draws(),
        );
    }
    claims.push(
        Claim::new(
            "eq10.added_excess_floor",
            "photon-added excess: N+ - nbar >= 1",
            |ctx| {
                let worst = ctx
                    .draws()?
                    .iter()
                    .map(|d| n_plus(&d.state) - d.stats.mean - 1.0)
                    .fold(f64::INFINITY, f64::min);
                let violation = (-worst).max(0.0);
                Ok(Outcome::scalar(violation, 0.0, 1e-10)
                    .with_detail(format!("min (N+ - nbar - 1) = {worst:e}")))
            },
        )
        .on_draws(),
    );
    claims.push(
        Claim::new(
            "eq10.fock_equality",
            "photon-added excess: N+ - nbar = 1 exactly on Fock states",
            |ctx| {
                let policy = ctx.policy();
                let mut cases: Vec<(FockState, f64, bool)> = Vec::new();
                for n in 0..=8 {
                    let (state, s) = build(FamilySpec::Fock { n }, policy)?;
                    cases.push((state, s.mean, true));
                }
                for d in ctx.draws()? {
                    cases.push((
                        d.state.clone(),
                        d.stats.mean,
                        d.spec.kind() == FamilyKind::Fock,
                    ));
                }
                let mismatches = cases
                    .iter()
                    .filter(|(state, mean, is_fock)| {
                        let equal = (n_plus(state) - mean - 1.0).abs() <= 1e-10;
                        equal != *is_fock
                    })
                    .count();
                Ok(Outcome::scalar(mismatches as f64, 0.0, 0.0)
                    .with_detail(format!("{} states checked", cases.len())))
            },
        )
        .on_draws(),
    );
}

fn hyper_claims(claims: &mut Vec<Claim>) {
    claims.push(
        Claim::new(
            "eq11.hyper_equivalence",
            "hyper-Poissonian: N- > N+ iff q > 1 + 2 nbar",
            |ctx| {
                let mut mismatches = 0usize;
                let mut hyper = 0usize;
                let draws = ctx.draws()?;
                for d in draws {
                    let s = &d.stats;
                    let q = mandel_q(s)?;
                    let by_ops = banded_sign(
                        (n_minus(&d.state)? - n_plus(&d.state)) * (1.0 + s.mean),
                        SIGN_BAND,
                    ) > 0;
                    let by_q = banded_sign(q - 1.0 - 2.0 * s.mean, SIGN_BAND) > 0;
                    hyper += usize::from(by_q);
                    mismatches += usize::from(by_ops != by_q);
                }
                Ok(Outcome::scalar(mismatches as f64, 0.0, 0.0)
                    .with_detail(format!("{hyper} of {} draws hyper-Poissonian", draws.len())))
            },
        )
        .on_draws(),
    );
    claims.push(Claim::new(
        "eq11.squeezed_boundary",
        "squeezed vacuum lies on the boundary q = 1 + 2 nbar",
        |ctx| {
            let mut measured = Vec::new();
            for nbar in [0.5, 1.3811, 5.0] {
                let (_, s) = build(FamilySpec::SqueezedVacuum { nbar }, ctx.policy())?;
                measured.push(mandel_q(&s)? - 1.0 - 2.0 * s.mean);
            }
            Ok(Outcome::values(measured, vec![0.0; 3], 1e-8)
                .with_detail("q - (1 + 2 nbar) at nbar = 0.5, 1.3811, 5"))
        },
    ));
}

fn coherent_vacuum_claims(claims: &mut Vec<Claim>) {
    const ALPHA: f64 = 3.0;
    const ETA: f64 = 0.1;
    let spec = FamilySpec::CoherentVacuum {
        alpha: ALPHA,
        eta: ETA,
    };
    claims.push(Claim::new(
        "eq13.cohvac.moments",
        "coherent+vacuum superposition: nbar = eta alpha^2, N- = alpha^2, \
         N+ = (eta alpha^4 + 3 eta alpha^2 + 1) / (1 + eta alpha^2)",
        move |ctx| {
            let rel = spec.relations()?;
            let (state, s) = build(spec, ctx.policy())?;
            let measured = vec![s.mean, n_minus(&state)?, n_plus(&state)];
            let expected = vec![
                rel.nbar.unwrap_or(f64::NAN),
                rel.n_minus.unwrap_or(f64::NAN),
                rel.n_plus.unwrap_or(f64::NAN),
            ];
            Ok(Outcome::values(measured, expected, 1e-6)
                .with_detail("[nbar, N-, N+] at alpha=3, eta=0.1"))
        },
    ));
    claims.push(Claim::new(
        "eq13.cohvac.subtracted_fidelity",
        "subtraction turns the coherent+vacuum superposition into |alpha>",
        |ctx| {
            let mut measured = Vec::new();
            for (alpha, eta) in [(ALPHA, ETA), (1.0, 0.5), (0.2, 0.9)] {
                measured.push(subtracted_coherent_fidelity(alpha, eta, ctx.policy())?);
            }
            Ok(Outcome::values(measured, vec![1.0; 3], 1e-10)
                .with_detail("|<alpha|a psi>|^2 at (3, 0.1), (1, 0.5), (0.2, 0.9)"))
        },
    ));
    claims.push(Claim::new(
        "eq13.cohvac.regime",
        "coherent+vacuum superposition realizes nbar << 1 < N+ << N- when 3 eta + alpha^-2 < 1",
        move |ctx| {
            let (state, s) = build(spec, ctx.policy())?;
            let (nm, np) = (n_minus(&state)?, n_plus(&state));
            let ratio = 3.0 * ETA + ALPHA.powi(-2);
            let ok = s.mean < 1.0 && 1.0 < np && np < nm && ratio < 1.0;
            Ok(Outcome::flag(ok).with_detail(format!(
                "nbar = {:.6}, N+ = {np:.6}, N- = {nm:.6}, 3 eta + alpha^-2 = {ratio:.6}",
                s.mean
            )))
        },
    ));
}

fn negative_binomial_claims(claims: &mut Vec<Claim>) {
    claims.push(Claim::new(
        "negbin.iterated_subtraction",
        "negative binomial: k subtractions give mean nbar + k q with q = xi / (1 - xi) unchanged",
        |ctx| {
            let mut measured = Vec::new();
            let mut expected = Vec::new();
            for (xi, mu) in [(0.5, 2.0), (0.3, 1.7), (0.8, 0.25), (0.2, 4.0)] {
                let q = xi / (1.0 - xi);
                let nbar = mu * q;
                let state = FamilySpec::NegativeBinomial { xi, mu }.build(ctx.policy())?;
                let steps = iterate(&state, &OperatorKind::Annihilate, 5)?;
                for (k, step) in steps.iter().enumerate() {
                    measured.push(step.stats.mean);
                    expected.push(nbar + (k + 1) as f64 * q);
                    measured.push(mandel_q(&step.stats)?);
                    expected.push(q);
                }
            }
            Ok(Outcome::values(measured, expected, 1e-8)
                .with_detail("[mean_k, q_k] for k = 1..5 at (xi, mu) = (0.5, 2), (0.3, 1.7), (0.8, 0.25), (0.2, 4)"))
        },
    ));
    claims.push(Claim::new(
        "negbin.hyper_regime",
        "negative binomial with mu < 1/2 < xi (1 - mu) has N- > N+",
        |ctx| {
            let (xi, mu) = (0.8, 0.25);
            let state = FamilySpec::NegativeBinomial { xi, mu }.build(ctx.policy())?;
            let (nm, np) = (n_minus(&state)?, n_plus(&state));
            let ok = mu < 0.5 && 0.5 < xi * (1.0 - mu) && nm > np;
            Ok(Outcome::flag(ok)
                .with_detail(format!("xi = 0.8, mu = 0.25: N- = {nm:.6}, N+ = {np:.6}")))
        },
    ));
}

fn gamma_claims(claims: &mut Vec<Claim>) {
    claims.push(Claim::new(
        "eq20.gamma.ratio",
        "multiplication-factor family: N- / nbar = gamma",
        |ctx| {
            let mut measured = Vec::new();
            let mut expected = Vec::new();
            for gamma in [1.0, 2.0, 5.0] {
                for nbar in [0.5, 1.0, 5.0] {
                    let state =
                        state_from_distribution(&gamma_family(nbar, gamma, ctx.policy())?, &[]);
                    measured.push(n_minus(&state)? / state.mean_n());
                    expected.push(gamma);
                }
            }
            Ok(Outcome::values(measured, expected, 1e-8)
                .with_detail("gamma in {1, 2, 5} x nbar in {0.5, 1, 5}"))
        },
    ));
    claims.push(Claim::new(
        "eq20.gamma.boundary_p0",
        "multiplication-factor family: p0 = 0 on the existence boundary gamma nbar = |ln(1 - gamma)|",
        |ctx| {
            let mut measured = Vec::new();
            for gamma in [0.25, 0.5, 0.9] {
                let dist = gamma_family(gamma_family_nbar_limit(gamma), gamma, ctx.policy())?;
                measured.push(dist.p(0));
            }
            Ok(Outcome::values(measured, vec![0.0; 3], 1e-10).with_detail("p0 at gamma = 0.25, 0.5, 0.9"))
        },
    ));
    claims.push(Claim::new(
        "eq20.gamma.poisson_limit",
        "multiplication-factor family: gamma = 1 is Poisson",
        |ctx| {
            let policy = ctx.policy().with_tail_tol(ctx.policy().tail_tol.min(1e-15));
            let mut measured = Vec::new();
            for nbar in [0.5, 1.0, 5.0] {
                let dist = gamma_family(nbar, 1.0, &policy)?;
                measured.push(max_abs(
                    dist.probs()
                        .iter()
                        .enumerate()
                        .map(|(n, p)| p - poisson(nbar, n)),
                ));
            }
            Ok(Outcome::values(measured, vec![0.0; 3], 1e-14)
                .with_detail("max_n |p_n - Poisson_n| at nbar = 0.5, 1, 5"))
        },
    ));
}

fn cosh_claims(claims: &mut Vec<Claim>) {
    claims.push(Claim::new(
        "coshfam.negativity.p1",
        "cosh family: p1 < 0 for nbar sqrt(gamma) >> 1 and gamma > 1",
        |ctx| {
            let outcome = cosh_family(10.0, 4.0, ctx.policy())?;
            let index = outcome.negativity().map_or(f64::NAN, |r| r.index as f64);
            Ok(Outcome::scalar(index, 1.0, 0.0)
                .with_detail("first negative index at nbar=10, gamma=4"))
        },
    ));
    claims.push(Claim::new(
        "coshfam.negativity.p0",
        "cosh family: p0 < 0 for nbar sqrt(gamma) >> 1 and gamma < 1",
        |ctx| {
            let outcome = cosh_family(100.0, 0.25, ctx.policy())?;
            let index = outcome.negativity().map_or(f64::NAN, |r| r.index as f64);
            Ok(Outcome::scalar(index, 0.0, 0.0)
                .with_detail("first negative index at nbar=100, gamma=0.25"))
        },
    ));
    claims.push(Claim::new(
        "coshfam.valid_at_gamma_one",
        "cosh family at gamma = 1 is Poisson and never negative",
        |ctx| {
            let mut measured = Vec::new();
            for nbar in [0.5, 2.0, 10.0] {
                measured.push(
                    if cosh_family(nbar, 1.0, ctx.policy())?.negativity().is_none() {
                        1.0
                    } else {
                        0.0
                    },
                );
            }
            Ok(Outcome::values(measured, vec![1.0; 3], 0.0)
                .with_detail("valid at nbar = 0.5, 2, 10"))
        },
    ));
}

fn log_q_claims(claims: &mut Vec<Claim>) {
    const CASES: [(f64, f64); 5] = [(1.0, 0.5), (0.5, 2.0), (1.0, 50.0), (2.0, 1.0), (0.3, 0.1)];
    claims.push(Claim::new(
        "eq26.logq.roundtrip",
        "logarithmic-q family reproduces its (nbar, q)",
        |ctx| {
            let mut measured = Vec::new();
            let mut expected = Vec::new();
            for (nbar, q) in CASES {
                let s = stats(&log_q_family(nbar, q, ctx.policy())?);
                measured.extend([s.mean, mandel_q(&s)?]);
                expected.extend([nbar, q]);
            }
            Ok(Outcome::values(measured, expected, 1e-8)
                .with_detail("[mean, q] per (nbar, q) case"))
        },
    ));
    claims.push(Claim::new(
        "eq26.logq.subtracted",
        "logarithmic-q family: subtracted state has mean nbar + q and Mandel q = nbar",
        |ctx| {
            let mut measured = Vec::new();
            let mut expected = Vec::new();
            for (nbar, q) in CASES {
                let state = state_from_distribution(&log_q_family(nbar, q, ctx.policy())?, &[]);
                let s = stats(&distribution_of(&subtracted(&state)?.state)?);
                measured.extend([s.mean, mandel_q(&s)?]);
                expected.extend([nbar + q, nbar]);
            }
            Ok(Outcome::values(measured, expected, 1e-7)
                .with_detail("[mean, q] of the subtracted state"))
        },
    ));
    claims.push(Claim::new(
        "eq27.logq.bound",
        "logarithmic-q family exists only for nbar <= q (e - 1) / (1 - e^-q)",
        |ctx| {
            let mut ok = true;
            for q in [0.1, 0.5, 2.0, 10.0] {
                let limit = log_q_nbar_limit(q);
                ok &= log_q_family(limit * 1.01, q, ctx.policy()).is_err();
                ok &= log_q_family(limit, q, ctx.policy()).is_ok();
            }
            Ok(Outcome::flag(ok).with_detail(
                "rejected at 1.01 x bound, accepted at the bound, q = 0.1, 0.5, 2, 10",
            ))
        },
    ));
    claims.push(Claim::new(
        "eq31.logq.q0_limit",
        "logarithmic-q family tends to the q = 0 logarithmic distribution",
        |ctx| {
            let near = log_q_family(1.0, 1e-6, ctx.policy())?;
            let limit = log0_family(1.0, ctx.policy())?;
            Ok(
                Outcome::scalar(max_coeff_gap(near.probs(), limit.probs()), 0.0, 1e-4)
                    .with_detail("max |p_n(q=1e-6) - p_n(q=0)| at nbar = 1"),
            )
        },
    ));
}

fn log0_claims(claims: &mut Vec<Claim>) {
    const NBARS: [f64; 4] = [0.5, 1.0, 1.5, LOG0_NBAR_LIMIT];
    claims.push(Claim::new(
        "eq31.log0.mandel_q",
        "sub-coherent logarithmic distribution has q = 0",
        |ctx| {
            let mut measured = Vec::new();
            for nbar in NBARS {
                measured.push(mandel_q(&stats(&log0_family(nbar, ctx.policy())?))?);
            }
            Ok(Outcome::values(measured, vec![0.0; 4], IDENTITY_TOL)
                .with_detail("q at nbar = 0.5, 1, 1.5, e - 1"))
        },
    ));
    claims.push(Claim::new(
        "eq31.log0.bound",
        "sub-coherent logarithmic distribution exists only for nbar <= e - 1",
        |ctx| {
            let ok = log0_family(LOG0_NBAR_LIMIT, ctx.policy()).is_ok()
                && log0_family(LOG0_NBAR_LIMIT * 1.001, ctx.policy()).is_err()
                && log0_family(2.0, ctx.policy()).is_err();
            Ok(Outcome::flag(ok).with_detail("accepted at e - 1, rejected above"))
        },
    ));
    claims.push(Claim::new(
        "eq32.log0.factorial_moments",
        "sub-coherent logarithmic distribution: n^(r) = (r - 1)! nbar^r",
        |ctx| {
            let mut measured = Vec::new();
            let mut expected = Vec::new();
            for nbar in NBARS {
                let s = stats(&log0_family(nbar, ctx.policy())?);
                for r in 1..=4 {
                    measured.push(s.factorial_moments[r - 1]);
                    expected.push(factorial(r as u64 - 1) * nbar.powi(r as i32));
                }
            }
            Ok(Outcome::values(measured, expected, 1e-8)
                .with_detail("r = 1..4 at nbar = 0.5, 1, 1.5, e - 1"))
        },
    ));
    claims.push(Claim::new(
        "eq33.balazs.small_a",
        "Balazs expansion at A -> 0 gives n^(r) = (r - 1)! nbar^r",
        |_| {
            let mut measured = Vec::new();
            let mut expected = Vec::new();
            for nbar in [0.5, 1.0, 1.5] {
                for r in 1..=4 {
                    measured.push(balazs_moments(nbar, 1e-8, r)?);
                    expected.push(factorial(r as u64 - 1) * nbar.powi(r as i32));
                }
            }
            Ok(Outcome::values(measured, expected, 1e-6)
                .with_detail("A = 1e-8, r = 1..4, nbar = 0.5, 1, 1.5"))
        },
    ));
    claims.push(Claim::new(
        "eq33.balazs.scaling",
        "Balazs expansion: n^(r) = (r - 1)! (1 - A)^(r - 1) nbar^r",
        |_| {
            let mut measured = Vec::new();
            let mut expected = Vec::new();
            for a in [0.25, 0.5, 0.75] {
                for r in 1..=4 {
                    measured.push(balazs_moments(1.0, a, r)?);
                    expected.push(factorial(r as u64 - 1) * (1.0 - a).powi(r as i32 - 1));
                }
            }
            Ok(Outcome::values(measured, expected, IDENTITY_TOL)
                .with_detail("nbar = 1, A = 0.25, 0.5, 0.75, r = 1..4"))
        },
    ));
}

fn phase_operator_claims(claims: &mut Vec<Claim>) {
    claims.push(
        Claim::new(
            "ephase.plus_mean",
            "raising phase operator: N~+ = nbar + 1",
            |ctx| {
                let mut devs = Vec::new();
                for d in ctx.draws()? {
                    devs.push(
                        exp_phase(&d.state, PhaseDirection::Up)?.state.mean_n()
                            - d.stats.mean
                            - 1.0,
                    );
                }
                Ok(Outcome::scalar(max_abs(devs), 0.0, 1e-10)
                    .with_detail("max |N~+ - nbar - 1| over draws"))
            },
        )
        .on_draws(),
    );
    claims.push(
        Claim::new(
            "ephase.minus_mean",
            "lowering phase operator: N~- = nbar / (1 - p0) - 1",
            |ctx| {
                let mut devs = Vec::new();
                for d in ctx.draws()? {
                    let p0 = d.dist.p(0);
                    let down = exp_phase(&d.state, PhaseDirection::Down)?.state.mean_n();
                    devs.push(down - (d.stats.mean / (1.0 - p0) - 1.0));
                }
                Ok(Outcome::scalar(max_abs(devs), 0.0, IDENTITY_TOL)
                    .with_detail("max |N~- - nbar/(1-p0) + 1| over draws"))
            },
        )
        .on_draws(),
    );
    claims.push(Claim::new(
        "ephase.phase_eigenstate",
        "coherent phase state is an eigenstate of the lowering phase operator: N~- = nbar",
        |ctx| {
            let mut measured = Vec::new();
            for z in [0.1, 0.6, 0.9] {
                let (state, s) = build(FamilySpec::PhaseCoherent { z }, ctx.policy())?;
                measured.push(exp_phase(&state, PhaseDirection::Down)?.state.mean_n() - s.mean);
            }
            Ok(Outcome::values(measured, vec![0.0; 3], 1e-10)
                .with_detail("N~- - nbar at z = 0.1, 0.6, 0.9"))
        },
    ));
    claims.push(Claim::new(
        "ephase.coherent_small_limit",
        "weak coherent state: N~- / nbar -> 1/2",
        |ctx| {
            let (state, s) = build(FamilySpec::Coherent { alpha: 0.1 }, ctx.policy())?;
            let ratio = exp_phase(&state, PhaseDirection::Down)?.state.mean_n() / s.mean;
            Ok(Outcome::scalar(ratio, 0.5, 0.5 * LIMIT_REL_TOL)
                .with_detail("N~- / nbar at alpha = 0.1"))
        },
    ));
    claims.push(Claim::new(
        "ephase.tilde_hyper",
        "lowering beats raising (N~- > N~+) iff nbar > 2 (1 - p0) / p0",
        |ctx| {
            let mut mismatches = 0usize;
            let mut cases = 0usize;
            let mut holds = 0usize;
            for gamma in [0.5, 1.0, 2.0, 5.0, 10.0] {
                for nbar in [0.25, 0.5, 1.0, 2.0, 5.0, 10.0] {
                    if nbar > gamma_family_nbar_limit(gamma) {
                        continue;
                    }
                    let dist = gamma_family(nbar, gamma, ctx.policy())?;
                    let state = state_from_distribution(&dist, &[]);
                    let (down, up) = tilde_means(&state)?;
                    let p0 = dist.p(0);
                    let by_ops = banded_sign(down - up, SIGN_BAND) > 0;
                    let by_bound =
                        banded_sign(state.mean_n() * p0 - 2.0 * (1.0 - p0), SIGN_BAND) > 0;
                    cases += 1;
                    holds += usize::from(by_bound);
                    mismatches += usize::from(by_ops != by_bound);
                }
            }
            Ok(
                Outcome::scalar(mismatches as f64, 0.0, 0.0).with_detail(format!(
                    "{holds} of {cases} multiplication-factor states satisfy the bound"
                )),
            )
        },
    ));
}

fn two_fock_claims(claims: &mut Vec<Claim>) {
    claims.push(Claim::new(
        "twofock.condition_grid",
        "two-Fock superposition: N- > nbar iff r (1 - r) (n - m)^2 > r (n - m) + m",
        |ctx| {
            let mut mismatches = 0usize;
            let mut cases = 0usize;
            for m in 0..=5usize {
                for n in m + 1..=100 {
                    for k in 1..=9 {
                        let r = k as f64 / 10.0;
                        let (state, s) = build(FamilySpec::TwoFock { n, m, r }, ctx.policy())?;
                        let d = (n - m) as f64;
                        let rhs = r * d + m as f64;
                        let predicted =
                            banded_sign(r * (1.0 - r) * d * d - rhs, SIGN_BAND * (1.0 + rhs));
                        let measured =
                            banded_sign(n_minus(&state)? - s.mean, SIGN_BAND * (1.0 + s.mean));
                        cases += 1;
                        mismatches += usize::from(predicted != measured);
                    }
                }
            }
            Ok(
                Outcome::scalar(mismatches as f64, 0.0, 0.0).with_detail(format!(
                    "{cases} grid points, n <= 100, m <= 5, r = 0.1..0.9"
                )),
            )
        },
    ));
    claims.push(Claim::new(
        "twofock.q_minus_limit",
        "two-Fock superposition: q- -> (1 - r) m / r - 1 for n >> m",
        |ctx| {
            let (n, m, r) = (2000, 1, 0.5);
            let state = FamilySpec::TwoFock { n, m, r }.build(ctx.policy())?;
            let s = stats(&distribution_of(&subtracted(&state)?.state)?);
            let limit = (1.0 - r) * m as f64 / r - 1.0;
            Ok(Outcome::scalar(mandel_q(&s)?, limit, 0.05)
                .with_detail("q of the subtracted state at n=2000, m=1, r=0.5"))
        },
    ));
    claims.push(Claim::new(
        "twofock.weighted_annihilation",
        "f(n) a maps sqrt(r)|n> + sqrt(1 - r)|0> to |n - 1> for any f",
        |ctx| {
            let n = 7;
            let state = FamilySpec::TwoFock { n, m: 0, r: 0.3 }.build(ctx.policy())?;
            let target = FockState::fock(n - 1);
            let weights = [
                Weight::real(|k| 1.0 + k as f64),
                Weight::real(|k| (-(k as f64) / 3.0).exp()),
                Weight::new(|k| Complex64::from_polar(2.0 + (k as f64).cos(), k as f64)),
            ];
            let mut measured = Vec::new();
            for w in &weights {
                measured.push(fidelity(&weighted_annihilate(&state, w)?.state, &target));
            }
            Ok(Outcome::values(measured, vec![1.0; 3], 1e-12)
                .with_detail("fidelity to |6> for f = 1 + n, e^{-n/3}, (2 + cos n) e^{i n}"))
        },
    ));
}

fn transform_claims(claims: &mut Vec<Claim>) {
    for kind in TransformKind::ALL {
        let (suffix, anchor) = match kind {
            TransformKind::Minus => (
                "minus",
                "G- = G' / nbar matches the photon-subtracted distribution",
            ),
            TransformKind::Plus => (
                "plus",
                "G+ = z (z G)' / (1 + nbar) matches the photon-added distribution",
            ),
            TransformKind::TildeMinus => (
                "tilde_minus",
                "(G - p0) / (z (1 - p0)) matches the lowering phase operator",
            ),
            TransformKind::TildePlus => ("tilde_plus", "z G matches the raising phase operator"),
        };
        claims.push(
            Claim::new(format!("transform.{suffix}"), anchor, move |ctx| {
                let mut worst = 0.0f64;
                let mut families = std::collections::BTreeSet::new();
                for d in ctx.draws()? {
                    let by_series = GenFun::from_distribution(&d.dist).transform_self(kind)?;
                    let image = match kind {
                        TransformKind::Minus => subtracted(&d.state)?.state,
                        TransformKind::Plus => added(&d.state).state,
                        TransformKind::TildeMinus => {
                            exp_phase(&d.state, PhaseDirection::Down)?.state
                        }
                        TransformKind::TildePlus => exp_phase(&d.state, PhaseDirection::Up)?.state,
                    };
                    let by_ops = distribution_of(&image)?;
                    worst = max_abs([worst, max_coeff_gap(by_series.coeffs(), by_ops.probs())]);
                    families.insert(d.spec.kind().tag());
                }
                Ok(Outcome::scalar(worst, 0.0, 1e-10).with_detail(format!(
                    "max coefficient gap over {} families",
                    families.len()
                )))
            })
            .on_draws(),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_sorted() {
        let ids: Vec<String> = registry().into_iter().map(|c| c.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn outcome_pass_rule() {
        assert!(Outcome::scalar(1.0, 1.0 + 1e-10, 1e-9).passed());
        assert!(!Outcome::scalar(f64::NAN, 0.0, 1.0).passed());
        assert!(!Outcome::values(vec![1.0], vec![1.0, 2.0], 1.0).passed());
        assert!(!Outcome::flag(false).passed());
    }

    #[test]
    fn zero_draws_skip_explicitly() {
        let config = VerifyConfig {
            draws: 0,
            filter: Some("eq7.".into()),
            ..VerifyConfig::default()
        };
        let results = run_claims(&config);
        assert_eq!(results.len(), FamilyKind::ALL.len());
        assert!(results
            .iter()
            .all(|r| r.status == Status::Skipped && r.detail.is_some()));
    }
}
