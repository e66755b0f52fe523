//! Ladder operators, exponential phase operators and `f(n) a` acting on
//! truncated pure states.
//!
//! Each operator returns the normalized image together with the squared norm
//! of the raw image. For a normalized input those norms are `nbar` for the
//! annihilator, `1 + nbar` for the creator, `1 - p0` for the lowering phase
//! operator and `1` for the raising one.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{FockError, Result, StepError};
use crate::fock::{distribution_of, FockState, EPS_ZERO};
use crate::statistics::{stats, StatsReport};

/// Relative weight of the non-vacuum part below which the lowering phase
/// operator refuses to renormalize.
pub const EXP_PHASE_FLOOR: f64 = 1e-14;

/// Weight function `f(n)` of a generalized annihilator `f(n) a`.
#[derive(Clone)]
pub struct Weight(Arc<dyn Fn(usize) -> Complex64 + Send + Sync>);

impl Weight {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(usize) -> Complex64 + Send + Sync + 'static,
    {
        Self(Arc::new(f))
    }

    pub fn real<F>(f: F) -> Self
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self::new(move |n| Complex64::new(f(n), 0.0))
    }

    pub fn eval(&self, n: usize) -> Complex64 {
        (self.0)(n)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Weight(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseDirection {
    Down,
    Up,
}

#[derive(Debug, Clone)]
pub enum OperatorKind {
    Annihilate,
    Create,
    ExpPhaseDown,
    ExpPhaseUp,
    WeightedAnnihilate(Weight),
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Annihilate => "sub",
            Self::Create => "add",
            Self::ExpPhaseDown => "eminus",
            Self::ExpPhaseUp => "eplus",
            Self::WeightedAnnihilate(_) => "weighted",
        }
    }

    /// Parses the CLI names `sub`, `add`, `eminus`, `eplus`.
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "sub" => Ok(Self::Annihilate),
            "add" => Ok(Self::Create),
            "eminus" => Ok(Self::ExpPhaseDown),
            "eplus" => Ok(Self::ExpPhaseUp),
            other => Err(FockError::Parse(format!(
                "unknown operator '{other}' (expected sub, add, eminus or eplus)"
            ))),
        }
    }
}

/// Normalized image of a state plus the squared norm before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub state: FockState,
    pub norm_sq: f64,
}

fn finish(raw: Vec<Complex64>, tail_tol: f64, what: &str) -> Result<Applied> {
    let norm_sq: f64 = raw.iter().map(|c| c.norm_sqr()).sum();
    if !(norm_sq > EPS_ZERO) {
        return Err(FockError::ZeroState(format!(
            "{what} maps the state to zero"
        )));
    }
    let scale = norm_sq.sqrt();
    let amps = raw.into_iter().map(|c| c / scale).collect();
    Ok(Applied {
        state: FockState::new(amps).with_tail_tol(tail_tol),
        norm_sq,
    })
}

/// `a|psi> / sqrt(nbar)`: `c'_n = c_{n+1} sqrt(n+1) / sqrt(nbar)`.
/// The cutoff drops by one.
pub fn subtracted(state: &FockState) -> Result<Applied> {
    let amps = state.amplitudes();
    let raw: Vec<Complex64> = amps
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| c * (n as f64).sqrt())
        .collect();
    finish(raw, state.tail_tol(), "annihilation")
}

/// `a^dag|psi> / sqrt(1 + nbar)`. The cutoff grows by one, so nothing is
/// dropped.
pub fn added(state: &FockState) -> Applied {
    let amps = state.amplitudes();
    let mut raw = Vec::with_capacity(amps.len() + 1);
    raw.push(Complex64::default());
    raw.extend(
        amps.iter()
            .enumerate()
            .map(|(n, c)| c * ((n + 1) as f64).sqrt()),
    );
    finish(raw, state.tail_tol(), "creation").expect("a^dag has no kernel")
}

/// Lowering (`E-`) or raising (`E+`) exponential phase operator.
///
/// `E-` drops the vacuum component and shifts down by one with unit
/// amplitude; it is rejected when the non-vacuum weight is below
/// [`EXP_PHASE_FLOOR`] relative to the total. `E+` shifts up exactly.
pub fn exp_phase(state: &FockState, direction: PhaseDirection) -> Result<Applied> {
    let amps = state.amplitudes();
    match direction {
        PhaseDirection::Down => {
            let total = state.norm_sqr();
            let excited: f64 = amps.iter().skip(1).map(|c| c.norm_sqr()).sum();
            if !(excited > EXP_PHASE_FLOOR * total) {
                return Err(FockError::ZeroState(format!(
                    "E- on a state with 1 - p0 = {:e}",
                    excited / total
                )));
            }
            finish(amps[1..].to_vec(), state.tail_tol(), "E-")
        }
        PhaseDirection::Up => {
            let mut raw = Vec::with_capacity(amps.len() + 1);
            raw.push(Complex64::default());
            raw.extend_from_slice(amps);
            finish(raw, state.tail_tol(), "E+")
        }
    }
}

/// `f(n) a |psi>`, normalized: `c'_n ∝ f(n) c_{n+1} sqrt(n+1)`.
pub fn weighted_annihilate(state: &FockState, f: &Weight) -> Result<Applied> {
    let amps = state.amplitudes();
    let mut raw = Vec::with_capacity(amps.len().saturating_sub(1));
    for (n, c) in amps.iter().enumerate().skip(1) {
        let w = f.eval(n - 1);
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(FockError::InvalidParams(format!(
                "weight function is not finite at n={}",
                n - 1
            )));
        }
        raw.push(w * c * (n as f64).sqrt());
    }
    finish(raw, state.tail_tol(), "f(n) a")
}

pub fn apply(state: &FockState, op: &OperatorKind) -> Result<Applied> {
    match op {
        OperatorKind::Annihilate => subtracted(state),
        OperatorKind::Create => Ok(added(state)),
        OperatorKind::ExpPhaseDown => exp_phase(state, PhaseDirection::Down),
        OperatorKind::ExpPhaseUp => exp_phase(state, PhaseDirection::Up),
        OperatorKind::WeightedAnnihilate(f) => weighted_annihilate(state, f),
    }
}

/// One step of an operator chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub state: FockState,
    pub norm_sq: f64,
    pub stats: StatsReport,
}

/// Applies `ops` in order and records every intermediate normalized state.
pub fn apply_chain(state: &FockState, ops: &[OperatorKind]) -> Result<Vec<Step>, StepError> {
    let mut current = state.clone();
    let mut steps = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        let at = |error| StepError { step: i + 1, error };
        let Applied { state, norm_sq } = apply(&current, op).map_err(at)?;
        let stats = stats(&distribution_of(&state).map_err(at)?);
        steps.push(Step {
            state: state.clone(),
            norm_sq,
            stats,
        });
        current = state;
    }
    Ok(steps)
}

/// `op` applied `k` times.
pub fn iterate(state: &FockState, op: &OperatorKind, k: usize) -> Result<Vec<Step>, StepError> {
    if k == 0 {
        return Err(StepError {
            step: 0,
            error: FockError::InvalidParams("iteration count must be at least 1".into()),
        });
    }
    apply_chain(state, &vec![op.clone(); k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fidelity, CutoffPolicy};

    fn coherent(alpha: f64) -> FockState {
        let ln_a = alpha.ln();
        FockState::from_fn(
            |n| {
                let lf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
                Complex64::new(
                    (-alpha * alpha / 2.0 + n as f64 * ln_a - 0.5 * lf).exp(),
                    0.0,
                )
            },
            &CutoffPolicy::default(),
        )
        .unwrap()
    }

    fn phase_state(z: f64) -> FockState {
        FockState::from_fn(
            |n| Complex64::new((1.0 - z * z).sqrt() * z.powi(n as i32), 0.0),
            &CutoffPolicy::default(),
        )
        .unwrap()
    }

    fn assert_same(a: &FockState, b: &FockState) {
        let len = a.cutoff().max(b.cutoff()) + 1;
        for n in 0..len {
            assert!(
                (a.amplitude(n) - b.amplitude(n)).norm() < 1e-14,
                "n={n}: {} vs {}",
                a.amplitude(n),
                b.amplitude(n)
            );
        }
    }

    #[test]
    fn subtract_fock() {
        for n in 1..6 {
            let out = subtracted(&FockState::fock(n)).unwrap();
            assert_same(&out.state, &FockState::fock(n - 1));
            assert_eq!(out.state.cutoff(), n - 1);
            assert!((out.norm_sq - n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn subtract_vacuum_is_zero_state() {
        assert!(matches!(
            subtracted(&FockState::vacuum()),
            Err(FockError::ZeroState(_))
        ));
        assert!(matches!(
            subtracted(&FockState::vacuum().padded(4)),
            Err(FockError::ZeroState(_))
        ));
    }

    #[test]
    fn subtract_coherent_is_eigenstate() {
        let psi = coherent(2.0);
        let out = subtracted(&psi).unwrap();
        assert!(fidelity(&out.state, &psi) > 1.0 - 1e-12);
        assert!((out.state.mean_n() - psi.mean_n()).abs() < 1e-9);
        assert!((out.norm_sq - 4.0).abs() < 1e-9);
    }

    #[test]
    fn add_fock_and_vacuum() {
        for n in 0..5 {
            let out = added(&FockState::fock(n));
            assert_same(&out.state, &FockState::fock(n + 1));
            assert!((out.norm_sq - (n + 1) as f64).abs() < 1e-14);
        }
        assert!((added(&FockState::vacuum()).state.mean_n() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn add_coherent_mean() {
        let out = added(&coherent(2.0));
        assert!((out.state.mean_n() - 5.8).abs() < 1e-9);
    }

    #[test]
    fn exp_phase_up_adds_one() {
        let out = exp_phase(&FockState::fock(3), PhaseDirection::Up).unwrap();
        assert_same(&out.state, &FockState::fock(4));
        let psi = coherent(1.3);
        let out = exp_phase(&psi, PhaseDirection::Up).unwrap();
        assert!((out.state.mean_n() - psi.mean_n() - 1.0).abs() < 1e-12);
        assert!((out.norm_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exp_phase_down_on_phase_state_is_eigen() {
        let psi = phase_state(0.6);
        let out = exp_phase(&psi, PhaseDirection::Down).unwrap();
        assert!(fidelity(&out.state, &psi) > 1.0 - 1e-12);
        assert!((out.state.mean_n() - 0.5625).abs() < 1e-10);
        assert!((out.norm_sq - 0.36).abs() < 1e-12);
    }

    #[test]
    fn exp_phase_down_small_coherent_halves_mean() {
        let psi = coherent(0.1);
        let out = exp_phase(&psi, PhaseDirection::Down).unwrap();
        let ratio = out.state.mean_n() / psi.mean_n();
        assert!((ratio - 0.5).abs() < 0.005, "{ratio}");
    }

    #[test]
    fn exp_phase_down_rejects_vacuum() {
        assert!(exp_phase(&FockState::vacuum(), PhaseDirection::Down).is_err());
        let nearly = FockState::from_real(&[1.0, 1e-8]).normalize().unwrap();
        assert!(matches!(
            exp_phase(&nearly, PhaseDirection::Down),
            Err(FockError::ZeroState(_))
        ));
    }

    #[test]
    fn weighted_unit_matches_subtracted() {
        let psi = coherent(1.7);
        let a = weighted_annihilate(&psi, &Weight::real(|_| 1.0)).unwrap();
        assert_eq!(a, subtracted(&psi).unwrap());
    }

    #[test]
    fn weighted_inverse_sqrt_matches_exp_phase() {
        let psi = coherent(1.1);
        let a =
            weighted_annihilate(&psi, &Weight::real(|n| 1.0 / ((n + 1) as f64).sqrt())).unwrap();
        let b = exp_phase(&psi, PhaseDirection::Down).unwrap();
        assert_same(&a.state, &b.state);
    }

    #[test]
    fn weighted_on_two_fock_gives_fock() {
        let psi = FockState::from_real(&[0.6f64.sqrt(), 0.0, 0.0, 0.0, 0.4f64.sqrt()]);
        let f = Weight::new(|n| Complex64::from_polar((n + 2) as f64, n as f64));
        let out = weighted_annihilate(&psi, &f).unwrap();
        assert!(fidelity(&out.state, &FockState::fock(3)) > 1.0 - 1e-14);
    }

    #[test]
    fn weighted_errors() {
        let psi = FockState::fock(2);
        assert!(matches!(
            weighted_annihilate(&psi, &Weight::real(|_| 0.0)),
            Err(FockError::ZeroState(_))
        ));
        assert!(matches!(
            weighted_annihilate(&psi, &Weight::real(|_| f64::INFINITY)),
            Err(FockError::InvalidParams(_))
        ));
    }

    #[test]
    fn iterate_fock_down_to_vacuum() {
        let steps = iterate(&FockState::fock(5), &OperatorKind::Annihilate, 5).unwrap();
        assert_same(&steps[4].state, &FockState::vacuum());
        let err = iterate(&FockState::fock(5), &OperatorKind::Annihilate, 6).unwrap_err();
        assert_eq!(err.step, 6);
        assert!(matches!(err.error, FockError::ZeroState(_)));
    }

    #[test]
    fn iterate_eplus_from_vacuum() {
        let steps = iterate(&FockState::vacuum(), &OperatorKind::ExpPhaseUp, 3).unwrap();
        let means: Vec<f64> = steps.iter().map(|s| s.stats.mean).collect();
        assert_eq!(means, vec![1.0, 2.0, 3.0]);
        assert_same(&steps[2].state, &FockState::fock(3));
    }

    #[test]
    fn operator_names_round_trip() {
        for name in ["sub", "add", "eminus", "eplus"] {
            assert_eq!(OperatorKind::parse(name).unwrap().name(), name);
        }
        assert!(OperatorKind::parse("nope").is_err());
    }
}
