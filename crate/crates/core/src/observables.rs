//! Moments, purity, spreads, coherence lengths and uncertainty products.
//!
//! For a single Gaussian term the first and second moments read off the
//! characteristic coefficients directly: ⟨x⟩ = -d, ⟨p⟩ = -e, Δx² = 2a,
//! Δp² = 2c, and the symmetrized covariance is b (an identification
//! validated against the moment-ODE oracle rather than assumed).
//!
//! For general exponential sums every trace reduces to closed 2D Gaussian
//! integrals over term pairs in the rotated variables r = x-x', s = x+x':
//!
//!   tr(ρ² Ô) = Σ_{ij} ∬ w(r,s) exp[-P r² - iQ rs - R s² - iS r - U s - V],
//!
//! with P = A_i+A_j, Q = B_i-B_j, R = C_i+C_j, S = D_i-D_j, U = E_i+E_j,
//! V = F_i+F_j and w a polynomial of degree ≤ 2. Momentum analogues use the
//! same machinery on the momentum representation. The exponent of each pair
//! is assembled as one complex scalar before exponentiation so the huge
//! compensating offsets of interference terms never overflow, and the
//! double sum uses compensated accumulation in a fixed order so results are
//! schedule-independent.
//!
//! Spread and coherence length follow
//!
//!   M² = [tr(ρ²x̂²) + tr(ρx̂ρx̂)]/tr(ρ²) - 2[tr(ρ²x̂)/tr(ρ²)]²,
//!   L² = [tr(ρ²x̂²) - tr(ρx̂ρx̂)]/tr(ρ²),
//!
//! and for a single Gaussian collapse to the closed forms
//! tr(ρ²) = (ħ/2)/√(4ac-b²) and L_x² = (ħ²a/2)/(4ac-b²).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::propagator::EvolutionParams;
use crate::statekit::{
    momentum_rep, to_characteristic, to_position, CoordTerm, ExpSumState, GaussianSpec,
    Representation,
};
use crate::{QbmError, Result};

/// First and second moments at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// ⟨x⟩ (m).
    pub mean_x: f64,
    /// ⟨p⟩ (kg·m/s).
    pub mean_p: f64,
    /// Δx² (m²).
    pub var_x: f64,
    /// Δp² (kg²m²/s²).
    pub var_p: f64,
    /// Symmetrized covariance ⟨{x-⟨x⟩, p-⟨p⟩}⟩/2 (kg·m²/s).
    pub cov_xp: f64,
}

impl MomentSet {
    /// Positive variances and the uncertainty inequality
    /// var_x·var_p - cov² ≥ ħ²/4 (up to rounding slack).
    pub fn validate(&self, hbar: f64) -> Result<()> {
        if !(self.var_x > 0.0) || !(self.var_p > 0.0) {
            return Err(QbmError::InvalidSpec(
                "moment set needs positive variances".into(),
            ));
        }
        let det = self.var_x * self.var_p - self.cov_xp * self.cov_xp;
        let floor = hbar * hbar / 4.0;
        if det < floor * (1.0 - 1e-9) {
            return Err(QbmError::InvalidSpec(format!(
                "moment set violates the uncertainty floor: det/floor = {}",
                det / floor
            )));
        }
        Ok(())
    }
}

/// The seven trace functionals entering spreads and coherence lengths.
/// Mixed SI units; all real for Hermitian states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceMoments {
    pub tr_rho2: f64,
    pub tr_rho2_x: f64,
    pub tr_rho2_x2: f64,
    pub tr_rho_x_rho_x: f64,
    pub tr_rho2_p: f64,
    pub tr_rho2_p2: f64,
    pub tr_rho_p_rho_p: f64,
}

/// Observable axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    P,
}

/// Moments of a single-term (Gaussian) state from its characteristic
/// coefficients. Multi-term states are rejected; use `trace_moments`.
pub fn gaussian_moments(state: &ExpSumState, hbar: f64) -> Result<MomentSet> {
    let ch = to_characteristic(state, hbar)?;
    let terms = ch.char_terms().expect("characteristic terms");
    if terms.len() != 1 {
        return Err(QbmError::Unsupported(format!(
            "gaussian_moments needs a single-term state, got {} terms (use trace_moments)",
            terms.len()
        )));
    }
    let t = &terms[0];
    Ok(MomentSet {
        mean_x: -t.d.re,
        mean_p: -t.e.re,
        var_x: 2.0 * t.a.re,
        var_p: 2.0 * t.c.re,
        cov_xp: t.b.re,
    })
}

/// Raw pairwise integrals over one coordinate-shaped term list:
/// (tr ρ², tr ρ²û, tr ρ²û², tr ρûρû) for û the kernel variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairIntegrals {
    pub norm: f64,
    pub first: f64,
    pub second: f64,
    pub exchange: f64,
}

/// Neumaier-compensated complex sum, fixed accumulation order.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedC64 {
    sum: Complex64,
    comp: Complex64,
    abs: f64,
}

impl CompensatedC64 {
    fn add(&mut self, v: Complex64) {
        self.abs += v.norm();
        let t = self.sum + v;
        let corr_re = if self.sum.re.abs() >= v.re.abs() {
            (self.sum.re - t.re) + v.re
        } else {
            (v.re - t.re) + self.sum.re
        };
        let corr_im = if self.sum.im.abs() >= v.im.abs() {
            (self.sum.im - t.im) + v.im
        } else {
            (v.im - t.im) + self.sum.im
        };
        self.comp += Complex64::new(corr_re, corr_im);
        self.sum = t;
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Closed-form pairwise Gaussian integrals over all term pairs.
///
/// Fails with `SingularState` when a pair's quadratic form is not
/// convergent (real part not positive definite).
pub fn pairwise_integrals(terms: &[CoordTerm]) -> Result<PairIntegrals> {
    if terms.is_empty() {
        return Err(QbmError::InvalidSpec("state has no terms".into()));
    }
    let mut norm = CompensatedC64::default();
    let mut first = CompensatedC64::default();
    let mut second = CompensatedC64::default();
    let mut exchange = CompensatedC64::default();

    for ti in terms {
        for tj in terms {
            let p = ti.a + tj.a;
            let q = ti.b - tj.b;
            let r = ti.c + tj.c;
            let s = ti.d - tj.d;
            let u = ti.e + tj.e;
            let v = ti.f + tj.f;

            if !(p.re > 0.0 && r.re > 0.0 && p.re * r.re > 0.25 * q.im * q.im) {
                return Err(QbmError::SingularState(format!(
                    "divergent pair integral: P = {p}, Q = {q}, R = {r}"
                )));
            }
            let det = p * r + q * q / 4.0;
            // Whole exponent first, then one exp: offsets of thousands in V
            // are compensated by the completed square.
            let w = (p * u * u + q * s * u - r * s * s) / (4.0 * det) - v
                + Complex64::new((PI / 2.0).ln(), 0.0)
                - 0.5 * det.ln();
            let i0 = w.exp();

            let z0r = -Complex64::new(0.0, 1.0) * (2.0 * r * s - q * u) / (4.0 * det);
            let z0s = -(q * s + 2.0 * p * u) / (4.0 * det);
            let r2 = z0r * z0r + r / (2.0 * det);
            let s2 = z0s * z0s + p / (2.0 * det);
            let rs = z0r * z0s - Complex64::new(0.0, 1.0) * q / (4.0 * det);

            norm.add(i0);
            first.add(i0 * (z0s + z0r) / 2.0);
            second.add(i0 * (s2 + 2.0 * rs + r2) / 4.0);
            exchange.add(i0 * (s2 - r2) / 4.0);
        }
    }

    // Hermitian states pair conjugate contributions; a surviving imaginary
    // part signals inconsistent inputs.
    for (acc, name) in [
        (&norm, "tr rho^2"),
        (&first, "tr rho^2 x"),
        (&second, "tr rho^2 x^2"),
        (&exchange, "tr rho x rho x"),
    ] {
        let v = acc.value();
        if v.im.abs() > 1e-9 * acc.abs.max(1e-300) {
            return Err(QbmError::NumericalInconsistency(format!(
                "{name} has imaginary residue {} against contribution scale {}",
                v.im, acc.abs
            )));
        }
    }

    Ok(PairIntegrals {
        norm: norm.value().re,
        first: first.value().re,
        second: second.value().re,
        exchange: exchange.value().re,
    })
}

/// All seven trace functionals of a state. Accepts position- or
/// characteristic-representation input; the momentum block is computed on
/// the analytic momentum representation.
pub fn trace_moments(state: &ExpSumState, hbar: f64) -> Result<TraceMoments> {
    if state.rep == Representation::Momentum {
        return Err(QbmError::Unsupported(
            "trace_moments expects a position- or characteristic-representation state".into(),
        ));
    }
    let pos = to_position(state, hbar)?;
    let x_terms = pos.coord_terms().expect("position terms");
    let xi = pairwise_integrals(x_terms)?;
    let mom = momentum_rep(&pos, hbar)?;
    let pi = pairwise_integrals(mom.coord_terms().expect("momentum terms"))?;

    if !(xi.norm > 0.0) {
        return Err(QbmError::SingularState(format!(
            "non-positive purity {}",
            xi.norm
        )));
    }
    // The two representations compute tr ρ² independently; disagreement
    // beyond rounding is a hard inconsistency.
    if (xi.norm - pi.norm).abs() > 1e-8 * xi.norm {
        return Err(QbmError::NumericalInconsistency(format!(
            "position/momentum purity mismatch: {} vs {}",
            xi.norm, pi.norm
        )));
    }

    Ok(TraceMoments {
        tr_rho2: xi.norm,
        tr_rho2_x: xi.first,
        tr_rho2_x2: xi.second,
        tr_rho_x_rho_x: xi.exchange,
        tr_rho2_p: pi.first,
        tr_rho2_p2: pi.second,
        tr_rho_p_rho_p: pi.exchange,
    })
}

fn guarded_sqrt(radicand: f64, scale: f64, what: &str) -> Result<f64> {
    if radicand < -1e-12 * scale {
        return Err(QbmError::NumericalInconsistency(format!(
            "{what} has negative radicand {radicand} at scale {scale}"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Spread M from precomputed traces.
pub fn spread_from(tm: &TraceMoments, axis: Axis) -> Result<f64> {
    let (t2u2, tu_tu, t2u) = match axis {
        Axis::X => (tm.tr_rho2_x2, tm.tr_rho_x_rho_x, tm.tr_rho2_x),
        Axis::P => (tm.tr_rho2_p2, tm.tr_rho_p_rho_p, tm.tr_rho2_p),
    };
    let mean = t2u / tm.tr_rho2;
    let m2 = (t2u2 + tu_tu) / tm.tr_rho2 - 2.0 * mean * mean;
    let scale = (t2u2.abs() + tu_tu.abs()) / tm.tr_rho2 + 2.0 * mean * mean;
    guarded_sqrt(m2, scale.max(1e-300), "spread")
}

/// Coherence length L from precomputed traces.
pub fn coherence_length_from(tm: &TraceMoments, axis: Axis) -> Result<f64> {
    let (t2u2, tu_tu) = match axis {
        Axis::X => (tm.tr_rho2_x2, tm.tr_rho_x_rho_x),
        Axis::P => (tm.tr_rho2_p2, tm.tr_rho_p_rho_p),
    };
    let l2 = (t2u2 - tu_tu) / tm.tr_rho2;
    let scale = (t2u2.abs() + tu_tu.abs()) / tm.tr_rho2;
    guarded_sqrt(l2, scale.max(1e-300), "coherence length")
}

/// Spread M of the state along one axis.
pub fn spread(state: &ExpSumState, axis: Axis, hbar: f64) -> Result<f64> {
    spread_from(&trace_moments(state, hbar)?, axis)
}

/// Coherence length L of the state along one axis.
pub fn coherence_length(state: &ExpSumState, axis: Axis, hbar: f64) -> Result<f64> {
    coherence_length_from(&trace_moments(state, hbar)?, axis)
}

/// Purity of a single Gaussian from its coefficients:
/// tr(ρ²) = (ħ/2)/√(4ac - b²). Equals both L_x/Δx and L_p/Δp.
pub fn coherence_ratio(state: &ExpSumState, hbar: f64) -> Result<f64> {
    let ch = to_characteristic(state, hbar)?;
    let terms = ch.char_terms().expect("characteristic terms");
    if terms.len() != 1 {
        return Err(QbmError::Unsupported(
            "coherence_ratio is defined for single-Gaussian states".into(),
        ));
    }
    let t = &terms[0];
    let det = 4.0 * t.a.re * t.c.re - t.b.re * t.b.re;
    guarded_sqrt(
        det,
        (4.0 * t.a.re * t.c.re).abs() + t.b.re * t.b.re,
        "coherence ratio",
    )
    .map(|s| hbar / 2.0 / s)
}

/// Closed-form coherence lengths of a single Gaussian:
/// L_x² = ħ²a/2/(4ac - b²), L_p² = ħ²c/2/(4ac - b²).
pub fn gaussian_coherence_lengths(state: &ExpSumState, hbar: f64) -> Result<(f64, f64)> {
    let ch = to_characteristic(state, hbar)?;
    let terms = ch.char_terms().expect("characteristic terms");
    if terms.len() != 1 {
        return Err(QbmError::Unsupported(
            "closed-form coherence lengths need a single-term state".into(),
        ));
    }
    let t = &terms[0];
    let det = 4.0 * t.a.re * t.c.re - t.b.re * t.b.re;
    if !(det > 0.0) {
        return Err(QbmError::NumericalInconsistency(format!(
            "non-positive 4ac - b² = {det}"
        )));
    }
    let h2 = hbar * hbar;
    Ok(((h2 * t.a.re / 2.0 / det).sqrt(), (h2 * t.c.re / 2.0 / det).sqrt()))
}

/// The three uncertainty products. The Gaussian pair L_xΔp, L_pΔx is only
/// defined for single-term states; L_xM_p is computed for any state via the
/// trace machinery. All satisfy product ≥ ħ/2 for valid states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyProducts {
    pub lx_dp: Option<f64>,
    pub lp_dx: Option<f64>,
    pub lx_mp: f64,
}

pub fn uncertainty_products(state: &ExpSumState, hbar: f64) -> Result<UncertaintyProducts> {
    let tm = trace_moments(state, hbar)?;
    let lx = coherence_length_from(&tm, Axis::X)?;
    let mp = spread_from(&tm, Axis::P)?;
    let single = {
        let ch = to_characteristic(state, hbar)?;
        ch.char_terms().map(|t| t.len() == 1).unwrap_or(false)
    };
    let (lx_dp, lp_dx) = if single {
        let (lxc, lpc) = gaussian_coherence_lengths(state, hbar)?;
        let m = gaussian_moments(state, hbar)?;
        (
            Some(lxc * m.var_p.sqrt()),
            Some(lpc * m.var_x.sqrt()),
        )
    } else {
        (None, None)
    };
    Ok(UncertaintyProducts {
        lx_dp,
        lp_dx,
        lx_mp: lx * mp,
    })
}

/// Time regime of the closed-form reference expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// t ≪ 1/γ.
    Short,
    /// t ≫ 1/γ.
    Long,
}

/// Reference values from the short/long-time expansions (test references,
/// never substituted for the exact formulas).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticReference {
    pub var_x: f64,
    pub var_p: f64,
    pub lx2: f64,
    pub lp2: f64,
}

/// Closed-form asymptotics for an initially minimum-uncertainty packet:
///
/// short: Δx² ≈ Δx₀² + 2D_xx t, Δp² ≈ Δp₀² + 2(D_pp - γΔp₀²)t,
///        L_x² ≈ Δx₀²[1 - 2(D_pp/Δp₀² - γ)t], L_p² ≈ Δp₀²(1 - 2D_xx t/Δx₀²);
/// long:  Δx² ≈ 2(D_xx + D_pp/M²γ²)t, Δp² ≈ D_pp/γ,
///        L_x² ≈ ħ²γ/(4D_pp), L_p² ≈ ħ²/(4Δx²).
pub fn asymptotic_reference(
    spec: &GaussianSpec,
    params: &EvolutionParams,
    regime: Regime,
    t: f64,
) -> Result<AsymptoticReference> {
    spec.validate()?;
    let dx2 = spec.dx0 * spec.dx0;
    let dp0 = spec.dp0();
    let dp2 = dp0 * dp0;
    let d_pp = params.diffusion.d_pp;
    let d_xx = params.diffusion.d_xx;
    match regime {
        Regime::Short => Ok(AsymptoticReference {
            var_x: dx2 + 2.0 * d_xx * t,
            var_p: dp2 + 2.0 * (d_pp - params.gamma * dp2) * t,
            lx2: dx2 * (1.0 - 2.0 * (d_pp / dp2 - params.gamma) * t),
            lp2: dp2 * (1.0 - 2.0 * d_xx / dx2 * t),
        }),
        Regime::Long => {
            if params.gamma == 0.0 || d_pp == 0.0 {
                return Err(QbmError::InvalidSpec(
                    "long-time asymptotics need gamma > 0 and D_pp > 0".into(),
                ));
            }
            let var_x = 2.0 * (d_xx + d_pp / (params.mass * params.mass * params.gamma * params.gamma)) * t;
            Ok(AsymptoticReference {
                var_x,
                var_p: d_pp / params.gamma,
                lx2: params.hbar * params.hbar * params.gamma / (4.0 * d_pp),
                lp2: params.hbar * params.hbar / (4.0 * var_x),
            })
        }
    }
}
