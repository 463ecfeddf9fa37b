//! Edge-state reduction of a weakly excited LJJ plus its termination JJ to a
//! single effective junction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gates::{OneBitInterfaceParams, TwoBitInterfaceParams};
use crate::ljj::LjjParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdgeError {
    #[error("mu*a must be positive, got {0}")]
    NonPositive(f64),
    #[error("bulk frequency is not real at mu={mu} (omega^2={omega2})")]
    Evanescent { mu: f64, omega2: f64 },
    #[error("no intersection of the two frequency curves in (0, {mu_max})")]
    NoIntersection { mu_max: f64, table: Vec<CurvePoint> },
    #[error("two-fluxon reduction needs vertically symmetric parameters")]
    Asymmetric,
}

/// Amplitude and decay of an exponentially localized phase field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeState {
    pub amplitude: f64,
    /// Inverse decay length in units of 1/λ_J.
    pub mu: f64,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl EdgeState {
    /// Small-amplitude validity of the quadratic reduction.
    pub fn is_linear(&self) -> bool {
        self.amplitude.abs() < 0.5
    }

    /// Phase of junction n (n = 0 is the termination JJ).
    pub fn phase(&self, n: usize, a_over_lambda: f64) -> f64 {
        self.amplitude * (-self.mu * a_over_lambda * n as f64).exp()
    }
}

/// f = Σ_{n≥1} e^{−2μan} = 1/(e^{2μa} − 1).
pub fn f_mu(mu_a: f64) -> Result<f64, EdgeError> {
    if !(mu_a > 0.0) {
        return Err(EdgeError::NonPositive(mu_a));
    }
    Ok(1.0 / (2.0 * mu_a).exp_m1())
}

/// g = Σ_{n≥1} (e^{−μan} − e^{−μa(n−1)})² = (e^{μa} − 1)² f, evaluated as
/// tanh(μa/2) which stays finite for large μa.
pub fn g_mu(mu_a: f64) -> Result<f64, EdgeError> {
    if !(mu_a > 0.0) {
        return Err(EdgeError::NonPositive(mu_a));
    }
    Ok((0.5 * mu_a).tanh())
}

/// Single junction equivalent to a termination JJ plus a weakly excited
/// chain, in units of the chain's C_J and I_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveJJ {
    pub cj_alpha: f64,
    pub ic_alpha: f64,
    pub l_alpha: f64,
    pub omega_alpha: f64,
}

/// `mu` in units of 1/λ_J of `chain`; `term` is (Ĉ_J, Î_c). Lengths are in
/// cells throughout, so μa = μ/λ_J.
pub fn effective_jj(
    term: (f64, f64),
    mu: f64,
    chain: &LjjParams,
) -> Result<EffectiveJJ, EdgeError> {
    let mu_a = mu / chain.lambda_j();
    let f = f_mu(mu_a)?;
    let g = g_mu(mu_a)?;
    let cj_alpha = term.0 + chain.cj * f;
    let ic_alpha = term.1 + chain.ic * f + g / chain.l;
    Ok(EffectiveJJ {
        cj_alpha,
        ic_alpha,
        l_alpha: 1.0 / ic_alpha,
        omega_alpha: (ic_alpha / cj_alpha).sqrt(),
    })
}

/// ω² of a bulk edge-state oscillation, discrete chain: ω_J² + 2c²/a² (1 − cosh aμ).
pub fn bulk_dispersion_sq(mu: f64, chain: &LjjParams) -> f64 {
    let wj = chain.omega_j();
    let c = chain.c();
    let mu_a = mu / chain.lambda_j();
    wj * wj - 2.0 * c * c * (mu_a.cosh() - 1.0)
}

pub fn bulk_dispersion(mu: f64, chain: &LjjParams) -> Result<f64, EdgeError> {
    let w2 = bulk_dispersion_sq(mu, chain);
    if w2 <= 0.0 {
        return Err(EdgeError::Evanescent { mu, omega2: w2 });
    }
    Ok(w2.sqrt())
}

/// Continuum limit ω_J² (1 − λ_J² μ²), `mu` in units of 1/λ_J.
pub fn bulk_dispersion_continuum(mu: f64, chain: &LjjParams) -> Result<f64, EdgeError> {
    let wj = chain.omega_j();
    let w2 = wj * wj * (1.0 - mu * mu);
    if w2 <= 0.0 {
        return Err(EdgeError::Evanescent { mu, omega2: w2 });
    }
    Ok(w2.sqrt())
}

/// Largest μ (units of 1/λ_J) with a real bulk frequency.
pub fn mu_max(chain: &LjjParams) -> f64 {
    let wj = chain.omega_j();
    let c = chain.c();
    let x = 1.0 + wj * wj / (2.0 * c * c);
    x.acosh() * chain.lambda_j()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub mu: f64,
    pub omega_alpha: f64,
    pub omega_bulk: f64,
    pub omega_bulk_continuum: Option<f64>,
}

/// Both frequency curves on `n` points of (0, μ_max).
pub fn tabulate(term: (f64, f64), chain: &LjjParams, n: usize) -> Vec<CurvePoint> {
    let top = mu_max(chain);
    (1..=n)
        .map(|k| {
            let mu = top * k as f64 / (n + 1) as f64;
            CurvePoint {
                mu,
                omega_alpha: effective_jj(term, mu, chain).map_or(f64::NAN, |e| e.omega_alpha),
                omega_bulk: bulk_dispersion_sq(mu, chain).max(0.0).sqrt(),
                omega_bulk_continuum: bulk_dispersion_continuum(mu, chain).ok(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuSolution {
    /// Units of 1/λ_J.
    pub mu: f64,
    pub omega_alpha: f64,
    pub omega_bulk: f64,
    pub effective: EffectiveJJ,
}

/// Root of ω_J^α(μ) − ω_bulk(μ) by bisection on (0, μ_max).
pub fn solve_mu(term: (f64, f64), chain: &LjjParams) -> Result<MuSolution, EdgeError> {
    let top = mu_max(chain);
    let h = |mu: f64| -> f64 {
        let wa = effective_jj(term, mu, chain).map_or(f64::NAN, |e| e.omega_alpha);
        wa - bulk_dispersion_sq(mu, chain).max(0.0).sqrt()
    };
    // f diverges as μ → 0, so scan upward for the first sign change
    let n = 400;
    let mut lo = top * 1e-6;
    let mut hlo = h(lo);
    let mut bracket = None;
    for k in 1..=n {
        let hi = top * k as f64 / n as f64;
        let hhi = h(hi);
        if hlo.is_finite() && hhi.is_finite() && hlo.signum() != hhi.signum() {
            bracket = Some((lo, hi, hlo));
            break;
        }
        lo = hi;
        hlo = hhi;
    }
    let (mut a, mut b, mut ha) = bracket.ok_or_else(|| EdgeError::NoIntersection {
        mu_max: top,
        table: tabulate(term, chain, 20),
    })?;
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        let hm = h(m);
        if hm.signum() == ha.signum() {
            a = m;
            ha = hm;
        } else {
            b = m;
        }
    }
    let mu = 0.5 * (a + b);
    let effective = effective_jj(term, mu, chain)?;
    Ok(MuSolution {
        mu,
        omega_alpha: effective.omega_alpha,
        omega_bulk: bulk_dispersion(mu, chain)?,
        effective,
    })
}

/// Equivalent reduced circuits of the IDSN for the two input cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OneBitEquivalent {
    /// Two synchronized same-polarity fluxons: the B-rail current cancels and
    /// each half is a 1-bit interface with rail A.
    TwoFluxon(OneBitInterfaceParams),
    /// A single fluxon on S1: the lower chains and their termination JJs
    /// become junctions α; rails A and B stay.
    SingleFluxon {
        idsn: TwoBitInterfaceParams,
        alpha: EffectiveJJ,
        solution: MuSolution,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputCase {
    Single,
    TwoFluxon,
}

pub fn equivalent_one_bit(
    p: &TwoBitInterfaceParams,
    case: InputCase,
) -> Result<OneBitEquivalent, EdgeError> {
    match case {
        InputCase::TwoFluxon => {
            if !p.is_vertically_symmetric() {
                return Err(EdgeError::Asymmetric);
            }
            Ok(OneBitEquivalent::TwoFluxon(OneBitInterfaceParams {
                term_cj: p.term_upper.0,
                term_ic: p.term_upper.1,
                rail_cj: p.rail_a.cj,
                rail_ic: p.rail_a.ic,
                bridge_l: p.rail_a.l,
                left: p.s1,
                right: p.s1p,
            }))
        }
        InputCase::Single => {
            let solution = solve_mu(p.term_lower, &p.s2p)?;
            Ok(OneBitEquivalent::SingleFluxon {
                idsn: *p,
                alpha: solution.effective,
                solution,
            })
        }
    }
}

/// Outcome of comparing a full run with its reduced circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub max_rail_deviation: f64,
    pub polarity_match: bool,
    pub vf_full: Option<f64>,
    pub vf_reduced: Option<f64>,
    pub pass: bool,
}

/// Largest allowed difference of output velocities, units of c.
pub const VELOCITY_TOLERANCE: f64 = 0.05;

/// Compare two rail-phase traces (sampled at the same times) and the
/// observed output fluxons.
pub fn equivalence_check(
    rail_full: &[(f64, f64)],
    rail_reduced: &[(f64, f64)],
    out_full: (Option<i8>, Option<f64>),
    out_reduced: (Option<i8>, Option<f64>),
) -> EquivalenceReport {
    let max_rail_deviation = rail_full
        .iter()
        .zip(rail_reduced)
        .map(|(a, b)| (a.1 - b.1).abs())
        .fold(0.0, f64::max);
    let polarity_match = out_full.0 == out_reduced.0;
    let dv = match (out_full.1, out_reduced.1) {
        (Some(a), Some(b)) => (a - b).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };
    EquivalenceReport {
        max_rail_deviation,
        polarity_match,
        vf_full: out_full.1,
        vf_reduced: out_reduced.1,
        pass: polarity_match && dv < VELOCITY_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::UnitSystem;

    fn chain() -> LjjParams {
        LjjParams::data(200, &UnitSystem::default())
    }

    #[test]
    fn f_matches_series() {
        for mu_a in [0.05, 0.2267, 1.0, 3.0] {
            let series: f64 = (1..20000).map(|n| (-2.0 * mu_a * n as f64).exp()).sum();
            assert!((f_mu(mu_a).unwrap() - series).abs() < 1e-10 * series.max(1.0));
        }
        assert!((f_mu(0.2267).unwrap() - 1.744).abs() < 1e-3);
        assert!(f_mu(10.0).unwrap() < 1e-8);
        assert!(f_mu(0.0).is_err());
        assert!(g_mu(-1.0).is_err());
    }

    #[test]
    fn g_matches_series() {
        let mu_a: f64 = 0.7;
        let series: f64 = (1..5000)
            .map(|n| {
                let d = (-mu_a * n as f64).exp() - (-mu_a * (n - 1) as f64).exp();
                d * d
            })
            .sum();
        assert!((g_mu(mu_a).unwrap() - series).abs() < 1e-12);
        for x in [0.01, 0.5, 2.9] {
            let e: f64 = (x as f64).exp() - 1.0;
            assert!((g_mu(x).unwrap() - e * e * f_mu(x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_limit() {
        let e = effective_jj((5.8, 1.5), 60.0, &chain()).unwrap();
        assert!((e.cj_alpha - 5.8).abs() < 1e-8);
        // g → 1 as μ → ∞ so the inductive term tends to 1/L
        let mut big = chain();
        big.l = 1e12;
        let e = effective_jj((5.8, 1.5), 60.0, &big).unwrap();
        assert!((e.ic_alpha - 1.5).abs() < 1e-8);
    }

    #[test]
    fn dispersion_limits() {
        let c = chain();
        assert!((bulk_dispersion(1e-9, &c).unwrap() - 1.0).abs() < 1e-9);
        let w = bulk_dispersion(0.68, &c).unwrap();
        assert!((w - 0.73).abs() < 0.01, "{w}");
        // a/λ_J = 1/3000
        let mut fine = c;
        fine.l = 1.0 / 9.0e6;
        let w = bulk_dispersion(0.5, &fine).unwrap();
        assert!((w * w - 0.75).abs() < 1e-4);
        assert!(bulk_dispersion(mu_max(&c) * 1.01, &c).is_err());
        let mut prev = f64::INFINITY;
        for k in 1..50 {
            let w2 = bulk_dispersion_sq(k as f64 * 0.05, &c);
            assert!(w2 < prev);
            prev = w2;
        }
    }

    #[test]
    fn idsn_root() {
        let s = solve_mu((5.8, 1.5), &chain()).unwrap();
        assert!((s.omega_alpha - s.omega_bulk).abs() < 1e-9);
        assert!(s.mu > 0.61 && s.mu < 0.75, "{}", s.mu);
        assert!(s.effective.cj_alpha > 5.8 && s.effective.ic_alpha > 1.5);
    }
}
