//! Reference computations written independently of the library: closed-form
//! or recursive photon-number distributions, plain moment sums, power-series
//! logarithms and a contour-integral coefficient extractor.

#![allow(dead_code)]

use fockledger::{FamilySpec, FockState};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Length at which an oracle series is cut: past the peak and with
/// `(n+1)^6 p_n` below `1e-30` for a run of terms.
const ORACLE_MAX: usize = 20_000;

fn run_until_negligible(mut next: impl FnMut(usize) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut quiet = 0;
    let mut peak = 0.0f64;
    for n in 0..ORACLE_MAX {
        let p = next(n);
        out.push(p);
        peak = peak.max(p.abs());
        let weight = p.abs() * ((n + 1) as f64).powi(6);
        if n > 4 && p.abs() < peak && weight < 1e-30 {
            quiet += 1;
            if quiet >= 16 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    out
}

/// Distribution built from a ratio recursion `p_{n+1} = p_n * ratio(n)`.
fn by_ratio(p0: f64, ratio: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut p = p0;
    run_until_negligible(|n| {
        if n > 0 {
            p *= ratio(n - 1);
        }
        p
    })
}

pub fn poisson(lambda: f64) -> Vec<f64> {
    by_ratio((-lambda).exp(), |n| lambda / (n + 1) as f64)
}

/// Coefficients of `ln w(z)` from those of `w(z)`, `w_0 > 0`.
pub fn series_ln(w: &[f64]) -> Vec<f64> {
    let mut l = vec![0.0; w.len()];
    l[0] = w[0].ln();
    for n in 1..w.len() {
        let mut acc = n as f64 * w[n];
        for k in 1..n {
            acc -= k as f64 * l[k] * w[n - k];
        }
        l[n] = acc / (n as f64 * w[0]);
    }
    l
}

/// Log-q family as `1 - ln w(z)`, `w(z) = 1 + (nbar/q)(1 - e^{q(z-1)})`,
/// expanded term by term.
pub fn log_q_probs(nbar: f64, q: f64, len: usize) -> Vec<f64> {
    let mut w = vec![0.0; len];
    let mut term = (-q).exp();
    w[0] = 1.0 + nbar / q * (1.0 - term);
    for (j, wj) in w.iter_mut().enumerate().skip(1) {
        term *= q / j as f64;
        *wj = -nbar / q * term;
    }
    let l = series_ln(&w);
    l.iter()
        .enumerate()
        .map(|(n, v)| if n == 0 { 1.0 - v } else { -v })
        .collect()
}

/// Photon-number distribution of a family member from its defining formula.
pub fn oracle_probs(spec: &FamilySpec) -> Vec<f64> {
    match *spec {
        FamilySpec::Fock { n } => {
            let mut p = vec![0.0; n + 1];
            p[n] = 1.0;
            p
        }
        FamilySpec::TwoFock { n, m, r } => {
            let mut p = vec![0.0; n + 1];
            p[n] = r;
            p[m] = 1.0 - r;
            p
        }
        FamilySpec::Coherent { alpha } => poisson(alpha * alpha),
        FamilySpec::CoherentVacuum { alpha, eta } => {
            let a2 = alpha * alpha;
            let b = eta.sqrt() * (-a2 / 2.0).exp();
            // eta + xi^2 + 2 b xi = 1, smaller root
            let r = (b * b + 1.0 - eta).sqrt();
            let xi = if (-b + r).abs() <= (-b - r).abs() {
                -b + r
            } else {
                -b - r
            };
            let mut p: Vec<f64> = poisson(a2).into_iter().map(|v| eta * v).collect();
            p[0] = (b + xi).powi(2);
            p
        }
        FamilySpec::NegativeBinomial { xi, mu } => by_ratio((1.0 - xi).powf(mu), |n| {
            xi * (mu + n as f64) / (n + 1) as f64
        }),
        FamilySpec::Binomial { p, trials } => {
            let mut out = vec![(1.0 - p).powi(trials as i32)];
            for n in 0..trials {
                let next = out[n] * (trials - n) as f64 / (n + 1) as f64 * p / (1.0 - p);
                out.push(next);
            }
            out
        }
        FamilySpec::OddCoherent { alpha } => {
            let a2 = alpha * alpha;
            let mut term = 1.0;
            let s = a2.sinh();
            run_until_negligible(|n| {
                if n > 0 {
                    term *= a2 / n as f64;
                }
                if n % 2 == 1 {
                    term / s
                } else {
                    0.0
                }
            })
        }
        FamilySpec::SqueezedVacuum { nbar } => {
            let s = nbar.sqrt().asinh();
            let t2 = s.tanh().powi(2);
            let mut even = 1.0 / s.cosh();
            run_until_negligible(|n| {
                if n % 2 == 1 {
                    return 0.0;
                }
                if n > 0 {
                    // p_{2m} / p_{2m-2} = t^2 (2m - 1) / (2m)
                    even *= t2 * (n - 1) as f64 / n as f64;
                }
                even
            })
        }
        FamilySpec::SimonLog { z } => {
            let z2 = z * z;
            run_until_negligible(|n| {
                if n == 0 {
                    1.0 + (1.0 - z2).ln()
                } else {
                    z2.powi(n as i32) / n as f64
                }
            })
        }
        FamilySpec::PhaseCoherent { z } => by_ratio(1.0 - z * z, |_| z * z),
        FamilySpec::GammaFamily { nbar, gamma } => {
            let lam = gamma * nbar;
            let mut p = poisson(lam);
            for v in p.iter_mut() {
                *v /= gamma;
            }
            p[0] = 1.0 - 1.0 / gamma + (-lam).exp() / gamma;
            p
        }
        FamilySpec::LogQ { nbar, q } => {
            let mut len = 64;
            loop {
                let p = log_q_probs(nbar, q, len);
                let tail = p[len - 8..]
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.abs() * ((len - 8 + i) as f64).powi(6))
                    .sum::<f64>();
                if tail < 1e-30 || len >= 8192 {
                    return p;
                }
                len *= 2;
            }
        }
        FamilySpec::Log0 { nbar } => {
            let x = nbar / (1.0 + nbar);
            run_until_negligible(|n| {
                if n == 0 {
                    1.0 - (1.0 + nbar).ln()
                } else {
                    x.powi(n as i32) / n as f64
                }
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub mean: f64,
    pub var: f64,
    pub q: f64,
    pub p0: f64,
    /// n^(1)..n^(4)
    pub fact: [f64; 4],
}

pub fn moments(p: &[f64]) -> Moments {
    let mut fact = [0.0; 4];
    for (n, &pn) in p.iter().enumerate() {
        let mut falling = 1.0;
        for (r, slot) in fact.iter_mut().enumerate() {
            falling *= n as f64 - r as f64;
            *slot += falling * pn;
        }
    }
    let mean = fact[0];
    let var: f64 = p
        .iter()
        .enumerate()
        .map(|(n, pn)| (n as f64 - mean).powi(2) * pn)
        .sum();
    Moments {
        mean,
        var,
        q: var / mean - 1.0,
        p0: p.first().copied().unwrap_or(0.0),
        fact,
    }
}

pub fn probs_of(state: &FockState) -> Vec<f64> {
    let amps = state.amplitudes();
    let total: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    amps.iter().map(|c| c.norm_sqr() / total).collect()
}

pub fn mean_of(state: &FockState) -> f64 {
    moments(&probs_of(state)).mean
}

/// Taylor coefficients `0..count` of an analytic `g` by the trapezoid rule
/// on the circle `|z| = radius` with `points` nodes.
pub fn cauchy_coeffs(
    g: impl Fn(Complex64) -> Complex64,
    count: usize,
    points: usize,
    radius: f64,
) -> Vec<f64> {
    let values: Vec<Complex64> = (0..points)
        .map(|k| {
            g(Complex64::from_polar(
                radius,
                2.0 * PI * k as f64 / points as f64,
            ))
        })
        .collect();
    (0..count)
        .map(|n| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    v * Complex64::from_polar(
                        1.0,
                        -2.0 * PI * ((k * n) % points) as f64 / points as f64,
                    )
                })
                .sum();
            sum.re / points as f64 / radius.powi(n as i32)
        })
        .collect()
}

pub fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}
