//! Exact time evolution in the characteristic representation.
//!
//! With Γ = 1 - exp(-γt), the solution of the first-order equation
//! ∂χ/∂t = [(k/M - γΔ)∂_Δ - D_pp Δ² - D_xx k²]χ is
//!
//!   χ(k, Δ, t) = χ(k, Δ(1-Γ) + kΓ/(γM), 0)
//!     × exp{ -[D_xx t + (D_pp/M²)∫₀ᵗ(Γ(s)/γ)²ds] k²
//!            - (D_pp/M)(Γ/γ)² kΔ - D_pp (Γ/γ)(2-Γ)/2 · Δ² },
//!
//! which on an exponential term acts as a closed map on the six
//! coefficients:
//!
//!   a_t = a₀ + b₀Γ/(Mγ) + c₀(Γ/(Mγ))² + D_xx t + (D_pp/M²)∫₀ᵗ(Γ/γ)²ds
//!   b_t = b₀(1-Γ) + 2c₀ Γ(1-Γ)/(Mγ) + (D_pp/M)(Γ/γ)²
//!   c_t = c₀(1-Γ)² + D_pp (Γ/γ)(2-Γ)/2
//!   d_t = d₀ + e₀ Γ/(Mγ),   e_t = e₀(1-Γ),   f_t = f₀.
//!
//! f_t = f₀ makes trace preservation exact, and the map composes as a
//! semigroup. γ = 0 selects explicit free-limit expressions (Γ/γ → t,
//! ∫(Γ/γ)² → t³/3) rather than small-γ substitution, and the secular
//! integral ∫₀ᵗ(Γ/γ)²ds = (γt - Γ - Γ²/2)/γ³ switches to a series for
//! small γt where the direct form cancels catastrophically.

use num_complex::Complex64;

use crate::statekit::{to_characteristic, CharTerm, DiffusionCoeffs, ExpSumState};
use crate::{QbmError, Result};

/// Damping, mass and diffusion entering the evolution map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    /// Damping rate γ (1/s); γ = 0 selects the free-limit code path.
    pub gamma: f64,
    /// Particle mass M (kg).
    pub mass: f64,
    pub diffusion: DiffusionCoeffs,
    pub hbar: f64,
}

impl EvolutionParams {
    pub fn new(gamma: f64, mass: f64, diffusion: DiffusionCoeffs, hbar: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(QbmError::InvalidSpec(format!(
                "gamma must be non-negative, got {gamma}"
            )));
        }
        if !(mass > 0.0) || !(hbar > 0.0) {
            return Err(QbmError::InvalidSpec("mass and hbar must be positive".into()));
        }
        diffusion.validate()?;
        Ok(EvolutionParams {
            gamma,
            mass,
            diffusion,
            hbar,
        })
    }
}

/// The relaxation interpolant Γ = 1 - exp(-γt) and its stable ratio Γ/γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactor {
    /// Time (s).
    pub t: f64,
    /// Γ = 1 - exp(-γt), dimensionless.
    pub gamma_cap: f64,
    /// Γ/γ (s); equals t in the γ → 0 limit.
    pub gamma_over_gamma: f64,
}

/// Threshold below which γt uses series branches for Γ/γ.
const GOG_SERIES_THRESHOLD: f64 = 1e-8;
/// Threshold below which γt uses the series branch for the secular integral.
const SECULAR_SERIES_THRESHOLD: f64 = 0.25;

/// Γ = 1 - exp(-γt), cancellation-free via expm1.
pub fn one_minus_exp_neg(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// Γ/γ = (1 - exp(-γt))/γ with the γ → 0 limit t; a short series covers
/// γt < 1e-8 (truncation below 1e-24 relative).
pub fn gamma_over_gamma(gamma: f64, t: f64) -> f64 {
    if gamma == 0.0 {
        return t;
    }
    let eps = gamma * t;
    if eps < GOG_SERIES_THRESHOLD {
        t * (1.0 - eps / 2.0 + eps * eps / 6.0)
    } else {
        one_minus_exp_neg(eps) / gamma
    }
}

/// ∫₀ᵗ [(1 - e^{-γs})/γ]² ds = (γt - Γ - Γ²/2)/γ³  (s³).
///
/// Multiplied by D_pp/M² this is the momentum-diffusion contribution to the
/// position variance; it behaves as t³/3 for γt ≪ 1. The direct expression
/// loses ~3ε_machine/(γt)² relative accuracy to cancellation, so γt ≤ 0.25
/// uses the Taylor series of ε + 2(e^{-ε}-1) - (e^{-2ε}-1)/2 (terms through
/// ε¹³, truncation ≤ 1e-13 relative at the switch point).
pub fn integrated_gamma_sq(gamma: f64, t: f64) -> f64 {
    if gamma == 0.0 {
        return t * t * t / 3.0;
    }
    let eps = gamma * t;
    let g3 = gamma * gamma * gamma;
    if eps <= SECULAR_SERIES_THRESHOLD {
        // Coefficients of ε^n for n = 3..13: (-1)^n (2 - 2^{n-1})/n!.
        const C: [f64; 11] = [
            1.0 / 3.0,
            -0.25,
            7.0 / 60.0,
            -1.0 / 24.0,
            31.0 / 2520.0,
            -1.0 / 320.0,
            127.0 / 181440.0,
            -17.0 / 120960.0,
            511.0 / 19958400.0,
            -341.0 / 79833600.0,
            2047.0 / 3113510400.0,
        ];
        let mut acc = 0.0;
        for &cn in C.iter().rev() {
            acc = acc * eps + cn;
        }
        acc * eps * eps * eps / g3
    } else {
        (eps + 2.0 * (-eps).exp_m1() - 0.5 * (-2.0 * eps).exp_m1()) / g3
    }
}

/// Build the Γ factor at time t.
pub fn gamma_factor(gamma: f64, t: f64) -> Result<GammaFactor> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QbmError::InvalidTime(format!(
            "evolution time must be non-negative, got {t}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(QbmError::InvalidSpec(format!(
            "gamma must be non-negative, got {gamma}"
        )));
    }
    Ok(GammaFactor {
        t,
        gamma_cap: one_minus_exp_neg(gamma * t),
        gamma_over_gamma: gamma_over_gamma(gamma, t),
    })
}

/// Evolve one characteristic term by time t.
pub fn evolve_term(term: &CharTerm, t: f64, params: &EvolutionParams) -> Result<CharTerm> {
    let gf = gamma_factor(params.gamma, t)?;
    let m = params.mass;
    let d_pp = params.diffusion.d_pp;
    let d_xx = params.diffusion.d_xx;

    let decay = (-params.gamma * t).exp(); // 1 - Γ
    let gog = gf.gamma_over_gamma;
    let gog_m = gog / m;
    let igs = integrated_gamma_sq(params.gamma, t);

    let a = term.a
        + term.b * gog_m
        + term.c * (gog_m * gog_m)
        + Complex64::new(d_xx * t + d_pp / (m * m) * igs, 0.0);
    let b = term.b * decay
        + term.c * (2.0 * gog_m * decay)
        + Complex64::new(d_pp / m * gog * gog, 0.0);
    let c = term.c * (decay * decay)
        + Complex64::new(d_pp * gog * (2.0 - gf.gamma_cap) / 2.0, 0.0);
    let d = term.d + term.e * gog_m;
    let e = term.e * decay;

    Ok(CharTerm {
        a,
        b,
        c,
        d,
        e,
        f: term.f,
    })
}

/// Evolve a state by time t: converts to the characteristic representation
/// if needed and maps every term, preserving term count and order.
pub fn evolve_state(state: &ExpSumState, t: f64, params: &EvolutionParams) -> Result<ExpSumState> {
    let ch = to_characteristic(state, params.hbar)?;
    let terms = ch
        .char_terms()
        .expect("characteristic state stores char terms")
        .iter()
        .map(|term| evolve_term(term, t, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpSumState::from_char_terms(terms))
}

/// Evaluate the exact solution at one (k, Δ) point for an arbitrary initial
/// characteristic function (not restricted to exponential sums).
pub fn char_solution_pointwise<F>(
    chi0: F,
    k: f64,
    delta: f64,
    t: f64,
    params: &EvolutionParams,
) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let gf = gamma_factor(params.gamma, t)?;
    let m = params.mass;
    let d_pp = params.diffusion.d_pp;
    let d_xx = params.diffusion.d_xx;
    let gog = gf.gamma_over_gamma;
    let decay = (-params.gamma * t).exp();

    let delta0 = delta * decay + k * gog / m;
    let igs = integrated_gamma_sq(params.gamma, t);
    let exponent = -(d_xx * t + d_pp / (m * m) * igs) * k * k
        - d_pp / m * gog * gog * k * delta
        - d_pp * gog * (2.0 - gf.gamma_cap) / 2.0 * delta * delta;
    Ok(chi0(k, delta0) * exponent.exp())
}
