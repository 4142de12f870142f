//! State representations and representation maps.
//!
//! Density matrices are stored as finite sums of Gaussian-exponential terms.
//! In the position representation a term is
//!
//!   ρ(x, x') = exp[-A(x-x')² - iB(x-x')(x+x') - C(x+x')² - iD(x-x') - E(x+x') - F],
//!
//! and in the characteristic-function representation, with
//! χ(k, Δ) = ∫ dx e^{ikx} ρ(x + ħΔ/2, x - ħΔ/2),
//!
//!   χ(k, Δ) = exp[-a k² - b kΔ - c Δ² - i d k - i e Δ - f].
//!
//! Note the kΔ coupling enters without an imaginary unit: a Hermitian term
//! has all six of a, b, c, d, e, f real, and the damping exponent of the
//! exact solution feeds b directly. Terms with imaginary d, e (interference
//! terms of superposition states) appear in conjugate pairs.
//!
//! The maps between the two coefficient sets follow from a single Gaussian
//! integral; both directions are exact inverses of each other. Normalization
//! constants live inside F (resp. f); there is no separate weight field, so
//! tr ρ = Σ_terms exp(-f).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::{QbmError, Result};

/// SI constants and system parameters of the Brownian particle + medium.
///
/// `var_sigma_x` and `var_sigma_p` are the measurement-induced variance
/// increases (Δσx)² and (Δσp)². The bundled reference set assigns both the
/// same numeric value ħ/2 × 10⁴, which is dimensionally odd ((Δσx)² is an
/// area, (Δσp)² a squared momentum) but is stored numerically as given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Brownian particle mass M (kg).
    pub mass: f64,
    /// Environment particle mass m (kg).
    pub env_mass: f64,
    /// Damping rate γ (1/s).
    pub gamma: f64,
    /// Temperature T (K).
    pub temperature: f64,
    /// Average collision rate R (1/s).
    pub collision_rate: f64,
    /// Measurement position-variance increase (Δσx)² (m²).
    pub var_sigma_x: f64,
    /// Measurement momentum-variance increase (Δσp)² (kg²m²/s²).
    pub var_sigma_p: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
}

/// Default ħ used by the reference parameter set (J·s).
pub const HBAR_REF: f64 = 1.06e-34;
/// Default k_B used by the reference parameter set (J/K).
pub const KB_REF: f64 = 1.38e-23;

impl PhysicalParams {
    /// Reference parameter set used by the bundled scenarios (SI units):
    /// M = 5.01e-22, m = 5.01e-26, γ = 1000, R = γM/2m = 5e6, T = 300,
    /// (Δσp)² = (Δσx)² = ħ/2 × 10⁴.
    pub fn reference() -> Self {
        PhysicalParams {
            mass: 5.01e-22,
            env_mass: 5.01e-26,
            gamma: 1000.0,
            temperature: 300.0,
            collision_rate: 5.0e6,
            var_sigma_x: HBAR_REF / 2.0 * 1.0e4,
            var_sigma_p: HBAR_REF / 2.0 * 1.0e4,
            hbar: HBAR_REF,
            k_b: KB_REF,
        }
    }

    /// All fields must be strictly positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("env_mass", self.env_mass),
            ("gamma", self.gamma),
            ("temperature", self.temperature),
            ("collision_rate", self.collision_rate),
            ("var_sigma_x", self.var_sigma_x),
            ("var_sigma_p", self.var_sigma_p),
            ("hbar", self.hbar),
            ("k_b", self.k_b),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(QbmError::InvalidSpec(format!(
                    "physical parameter {name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Provenance of a diffusion-coefficient pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionSource {
    /// Derived from the measurement-based collision model.
    Measurement,
    /// Caldeira-Leggett comparison values: D_pp = γMk_BT, D_xx = 0.
    CaldeiraLeggett,
    /// Supplied directly.
    Explicit,
}

/// The diffusion pair of the master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionCoeffs {
    /// Momentum diffusion D_pp (kg²m²/s³).
    pub d_pp: f64,
    /// Position diffusion D_xx (m²/s).
    pub d_xx: f64,
    pub source: DiffusionSource,
}

impl DiffusionCoeffs {
    /// Explicitly supplied pair; both coefficients must be non-negative.
    pub fn explicit(d_pp: f64, d_xx: f64) -> Result<Self> {
        if !(d_pp >= 0.0) || !(d_xx >= 0.0) || !d_pp.is_finite() || !d_xx.is_finite() {
            return Err(QbmError::InvalidSpec(format!(
                "diffusion coefficients must be non-negative, got D_pp = {d_pp}, D_xx = {d_xx}"
            )));
        }
        Ok(DiffusionCoeffs {
            d_pp,
            d_xx,
            source: DiffusionSource::Explicit,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_pp >= 0.0) || !(self.d_xx >= 0.0) {
            return Err(QbmError::InvalidSpec(
                "diffusion coefficients must be non-negative".into(),
            ));
        }
        if self.source == DiffusionSource::CaldeiraLeggett && self.d_xx != 0.0 {
            return Err(QbmError::InvalidSpec(
                "Caldeira-Leggett coefficients require D_xx = 0".into(),
            ));
        }
        Ok(())
    }
}

/// Minimum-uncertainty Gaussian wave packet: mean position x₀, mean momentum
/// p₀, position spread Δx₀; Δp₀ = ħ/(2Δx₀) is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    /// Initial mean position (m).
    pub x0: f64,
    /// Initial mean momentum (kg·m/s).
    pub p0: f64,
    /// Initial position spread Δx₀ (m).
    pub dx0: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
}

impl GaussianSpec {
    /// Implied momentum spread Δp₀ = ħ/(2Δx₀).
    pub fn dp0(&self) -> f64 {
        self.hbar / (2.0 * self.dx0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dx0 > 0.0) || !self.dx0.is_finite() {
            return Err(QbmError::InvalidSpec(format!(
                "gaussian spread dx0 must be positive, got {}",
                self.dx0
            )));
        }
        if !(self.hbar > 0.0) {
            return Err(QbmError::InvalidSpec("hbar must be positive".into()));
        }
        if !self.x0.is_finite() || !self.p0.is_finite() {
            return Err(QbmError::InvalidSpec("x0/p0 must be finite".into()));
        }
        Ok(())
    }
}

/// Two-packet superposition: packets of width σ at ±l/2 approaching each
/// other with speed v (each carries momentum ∓Mv).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    /// Packet separation l (m).
    pub separation: f64,
    /// Packet width σ (m).
    pub sigma: f64,
    /// Approach speed v (m/s).
    pub speed: f64,
    /// Particle mass M (kg).
    pub mass: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
}

impl CatSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(QbmError::InvalidSpec(format!(
                "cat width sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.separation >= 0.0) || !self.separation.is_finite() {
            return Err(QbmError::InvalidSpec(format!(
                "cat separation must be non-negative, got {}",
                self.separation
            )));
        }
        if !(self.mass > 0.0) || !(self.hbar > 0.0) {
            return Err(QbmError::InvalidSpec("mass and hbar must be positive".into()));
        }
        if !self.speed.is_finite() {
            return Err(QbmError::InvalidSpec("speed must be finite".into()));
        }
        Ok(())
    }

    /// Overlap of the two packets: exp(-l²/8σ² - 2M²v²σ²/ħ²).
    ///
    /// Both the position offset and the momentum offset suppress it; the
    /// state normalization 2(1 + overlap) uses this exact value so that
    /// tr ρ = 1 holds identically.
    pub fn packet_overlap(&self) -> f64 {
        (-self.separation_suppression() - self.velocity_suppression()).exp()
    }

    /// l²/(8σ²), dimensionless.
    pub fn separation_suppression(&self) -> f64 {
        self.separation * self.separation / (8.0 * self.sigma * self.sigma)
    }

    /// 2M²v²σ²/ħ², dimensionless.
    pub fn velocity_suppression(&self) -> f64 {
        let mv = self.mass * self.speed;
        2.0 * mv * mv * self.sigma * self.sigma / (self.hbar * self.hbar)
    }
}

/// Which variable pair a state's terms are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// ρ(x, x′), coordinate kernel.
    Position,
    /// ρ(p, p′), momentum kernel.
    Momentum,
    /// χ(k, Δ), characteristic function (k conjugate to x, Δ to p).
    Characteristic,
}

/// One exponential term in the position (or momentum) representation:
/// exp[-a(x-x')² - i b(x-x')(x+x') - c(x+x')² - i d(x-x') - e(x+x') - f].
///
/// `a`..`f` here are the capital coefficients A..F. Units for the position
/// representation: a, b, c in 1/m²; d, e in 1/m; f dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordTerm {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub f: Complex64,
}

/// One exponential term in the characteristic-function representation:
/// exp[-a k² - b kΔ - c Δ² - i d k - i e Δ - f].
///
/// Units: a in m², c in kg²m²/s²·(s/(kg·m))²-dual — i.e. chosen so that
/// a k², b kΔ, c Δ², d k, e Δ and f are all dimensionless with k in 1/m and
/// Δ in s/(kg·m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharTerm {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub f: Complex64,
}

impl CoordTerm {
    /// Normalizability: Re c (the (x+x')² coefficient) strictly positive,
    /// Re a non-negative.
    pub fn validate(&self) -> Result<()> {
        if !(self.c.re > 0.0) {
            return Err(QbmError::SingularTerm(format!(
                "coordinate term needs Re C > 0, got {}",
                self.c.re
            )));
        }
        if self.a.re < 0.0 {
            return Err(QbmError::SingularTerm(format!(
                "coordinate term needs Re A >= 0, got {}",
                self.a.re
            )));
        }
        Ok(())
    }

    /// Exponent Φ with ρ = exp(-Φ) at r = x-x', s = x+x'.
    pub fn exponent(&self, r: f64, s: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.a * (r * r) + i * self.b * (r * s) + self.c * (s * s) + i * self.d * r + self.e * s
            + self.f
    }
}

impl CharTerm {
    /// Admissibility: Re a > 0 and Re c > 0.
    pub fn validate(&self) -> Result<()> {
        if !(self.a.re > 0.0) || !(self.c.re > 0.0) {
            return Err(QbmError::SingularTerm(format!(
                "characteristic term needs Re a > 0 and Re c > 0, got {} and {}",
                self.a.re, self.c.re
            )));
        }
        Ok(())
    }

    /// Exponent φ with χ = exp(-φ).
    pub fn exponent(&self, k: f64, delta: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.a * (k * k) + self.b * (k * delta) + self.c * (delta * delta) + i * self.d * k
            + i * self.e * delta
            + self.f
    }
}

/// Term storage matching the representation tag.
#[derive(Debug, Clone, PartialEq)]
pub enum TermData {
    Coord(Vec<CoordTerm>),
    Char(Vec<CharTerm>),
}

/// A density matrix as a finite sum of exponential terms plus its
/// representation tag. The universal state container of this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumState {
    pub rep: Representation,
    pub terms: TermData,
}

impl ExpSumState {
    /// State from characteristic-function terms.
    pub fn from_char_terms(terms: Vec<CharTerm>) -> Self {
        ExpSumState {
            rep: Representation::Characteristic,
            terms: TermData::Char(terms),
        }
    }

    /// State from position-representation terms.
    pub fn from_coord_terms(terms: Vec<CoordTerm>, rep: Representation) -> Result<Self> {
        if rep == Representation::Characteristic {
            return Err(QbmError::Unsupported(
                "coordinate-shaped terms cannot carry the Characteristic tag".into(),
            ));
        }
        Ok(ExpSumState {
            rep,
            terms: TermData::Coord(terms),
        })
    }

    pub fn term_count(&self) -> usize {
        match &self.terms {
            TermData::Coord(v) => v.len(),
            TermData::Char(v) => v.len(),
        }
    }

    pub fn char_terms(&self) -> Option<&[CharTerm]> {
        match &self.terms {
            TermData::Char(v) => Some(v),
            TermData::Coord(_) => None,
        }
    }

    pub fn coord_terms(&self) -> Option<&[CoordTerm]> {
        match &self.terms {
            TermData::Coord(v) => Some(v),
            TermData::Char(_) => None,
        }
    }

    /// Multiply the state by a positive scalar (absorbed into the offsets).
    pub fn scaled_by(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(QbmError::InvalidSpec("scale factor must be positive".into()));
        }
        let shift = Complex64::new(factor.ln(), 0.0);
        let mut out = self.clone();
        match &mut out.terms {
            TermData::Coord(v) => v.iter_mut().for_each(|t| t.f -= shift),
            TermData::Char(v) => v.iter_mut().for_each(|t| t.f -= shift),
        }
        Ok(out)
    }
}

/// Build a trace-normalized minimum-uncertainty Gaussian in the
/// characteristic representation: a₀ = Δx₀²/2, b₀ = 0, c₀ = Δp₀²/2,
/// d₀ = -x₀, e₀ = -p₀, f₀ = 0.
pub fn build_gaussian(spec: &GaussianSpec) -> Result<ExpSumState> {
    spec.validate()?;
    let dx2 = spec.dx0 * spec.dx0;
    let dp = spec.dp0();
    let term = CharTerm {
        a: Complex64::new(dx2 / 2.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(dp * dp / 2.0, 0.0),
        d: Complex64::new(-spec.x0, 0.0),
        e: Complex64::new(-spec.p0, 0.0),
        f: Complex64::new(0.0, 0.0),
    };
    Ok(ExpSumState::from_char_terms(vec![term]))
}

/// Build a trace-normalized two-packet superposition as four characteristic
/// terms. Terms 1, 2 are the packets (real d, e); terms 3, 4 are the
/// interference pair (imaginary d, e) whose offsets carry the overlap
/// suppression l²/8σ² + 2M²v²σ²/ħ².
pub fn build_cat(spec: &CatSpec) -> Result<ExpSumState> {
    spec.validate()?;
    let s2 = spec.sigma * spec.sigma;
    let a0 = Complex64::new(s2 / 2.0, 0.0);
    let c0 = Complex64::new(spec.hbar * spec.hbar / (8.0 * s2), 0.0);
    let b0 = Complex64::new(0.0, 0.0);

    let overlap = spec.packet_overlap();
    let f_packet = Complex64::new((2.0 * (1.0 + overlap)).ln(), 0.0);
    let f_interf = f_packet
        + Complex64::new(
            spec.separation_suppression() + spec.velocity_suppression(),
            0.0,
        );

    let d_packet = spec.separation / 2.0;
    let e_packet = spec.mass * spec.speed;
    let d_interf = 2.0 * spec.mass * spec.speed * s2 / spec.hbar;
    let e_interf = spec.hbar * spec.separation / (4.0 * s2);

    let terms = vec![
        CharTerm {
            a: a0,
            b: b0,
            c: c0,
            d: Complex64::new(-d_packet, 0.0),
            e: Complex64::new(e_packet, 0.0),
            f: f_packet,
        },
        CharTerm {
            a: a0,
            b: b0,
            c: c0,
            d: Complex64::new(d_packet, 0.0),
            e: Complex64::new(-e_packet, 0.0),
            f: f_packet,
        },
        CharTerm {
            a: a0,
            b: b0,
            c: c0,
            d: Complex64::new(0.0, -d_interf),
            e: Complex64::new(0.0, -e_interf),
            f: f_interf,
        },
        CharTerm {
            a: a0,
            b: b0,
            c: c0,
            d: Complex64::new(0.0, d_interf),
            e: Complex64::new(0.0, e_interf),
            f: f_interf,
        },
    ];
    Ok(ExpSumState::from_char_terms(terms))
}

/// Position term → characteristic term (one Gaussian integral over x at
/// fixed separation):
///
///   a = 1/(16C),  b = -Bħ/(4C),  c = (4AC + B²)ħ²/(4C),
///   d = E/(4C),   e = (2CD - BE)ħ/(2C),
///   f = F - E²/(4C) + ½ Ln(4C/π).
pub fn coord_to_char(term: &CoordTerm, hbar: f64) -> Result<CharTerm> {
    if term.c == Complex64::new(0.0, 0.0) || !(term.c.re > 0.0) {
        return Err(QbmError::SingularTerm(format!(
            "coord_to_char needs Re C > 0, got C = {}",
            term.c
        )));
    }
    let (a_c, b_c, c_c, d_c, e_c, f_c) = (term.a, term.b, term.c, term.d, term.e, term.f);
    let h = Complex64::new(hbar, 0.0);
    let a = 1.0 / (16.0 * c_c);
    let b = -b_c * h / (4.0 * c_c);
    let c = (4.0 * a_c * c_c + b_c * b_c) * h * h / (4.0 * c_c);
    let d = e_c / (4.0 * c_c);
    let e = (2.0 * c_c * d_c - b_c * e_c) * h / (2.0 * c_c);
    // Principal branch; Re C > 0 keeps 4C/π in the right half-plane.
    let f = f_c - e_c * e_c / (4.0 * c_c) + 0.5 * (4.0 * c_c / PI).ln();
    Ok(CharTerm { a, b, c, d, e, f })
}

/// Characteristic term → position term (inverse Fourier integral over k):
///
///   A = (4ac - b²)/(4ħ²a),  B = -b/(4ħa),  C = 1/(16a),
///   D = (2ae - bd)/(2ħa),   E = d/(4a),
///   F = f + d²/(4a) + ½ Ln(4πa).
pub fn char_to_coord(term: &CharTerm, hbar: f64) -> Result<CoordTerm> {
    if term.a == Complex64::new(0.0, 0.0) || !(term.a.re > 0.0) {
        return Err(QbmError::SingularTerm(format!(
            "char_to_coord needs Re a > 0, got a = {}",
            term.a
        )));
    }
    let (a, b, c, d, e, f) = (term.a, term.b, term.c, term.d, term.e, term.f);
    let h = Complex64::new(hbar, 0.0);
    let a_c = (4.0 * a * c - b * b) / (4.0 * h * h * a);
    let b_c = -b / (4.0 * h * a);
    let c_c = 1.0 / (16.0 * a);
    let d_c = (2.0 * a * e - b * d) / (2.0 * h * a);
    let e_c = d / (4.0 * a);
    let f_c = f + d * d / (4.0 * a) + 0.5 * (4.0 * PI * a).ln();
    Ok(CoordTerm {
        a: a_c,
        b: b_c,
        c: c_c,
        d: d_c,
        e: e_c,
        f: f_c,
    })
}

/// Convert a state to the characteristic representation (no-op if already
/// there). Momentum-representation states are not converted here; their
/// characteristic dual is reached via `momentum_rep` first.
pub fn to_characteristic(state: &ExpSumState, hbar: f64) -> Result<ExpSumState> {
    match state.rep {
        Representation::Characteristic => Ok(state.clone()),
        Representation::Position => {
            let coord = state.coord_terms().expect("position state stores coord terms");
            let terms = coord
                .iter()
                .map(|t| coord_to_char(t, hbar))
                .collect::<Result<Vec<_>>>()?;
            Ok(ExpSumState::from_char_terms(terms))
        }
        Representation::Momentum => Err(QbmError::Unsupported(
            "characteristic conversion is defined for position-representation states".into(),
        )),
    }
}

/// Convert a state to the position representation.
pub fn to_position(state: &ExpSumState, hbar: f64) -> Result<ExpSumState> {
    match state.rep {
        Representation::Position => Ok(state.clone()),
        Representation::Characteristic => {
            let ch = state.char_terms().expect("characteristic state stores char terms");
            let terms = ch
                .iter()
                .map(|t| char_to_coord(t, hbar))
                .collect::<Result<Vec<_>>>()?;
            ExpSumState::from_coord_terms(terms, Representation::Position)
        }
        Representation::Momentum => momentum_rep(state, hbar),
    }
}

/// Evaluate the state at one point: (u, v) = (x, x′) for Position, (p, p′)
/// for Momentum, (k, Δ) for Characteristic. Total function; each term's
/// exponent is assembled as a complex scalar before the single `exp`, so
/// interference terms with large compensating offsets stay finite.
pub fn evaluate(state: &ExpSumState, u: f64, v: f64) -> Complex64 {
    match &state.terms {
        TermData::Coord(terms) => {
            let r = u - v;
            let s = u + v;
            terms.iter().map(|t| (-t.exponent(r, s)).exp()).sum()
        }
        TermData::Char(terms) => terms.iter().map(|t| (-t.exponent(u, v)).exp()).sum(),
    }
}

/// Trace of the state: χ(0, 0) = Σ_terms exp(-f) after conversion to the
/// characteristic representation. For momentum-representation states the
/// same per-term integral ∫ρ(p,p)dp is used.
pub fn trace_of(state: &ExpSumState, hbar: f64) -> Result<Complex64> {
    let tr = match (&state.rep, &state.terms) {
        (Representation::Characteristic, TermData::Char(terms)) => {
            terms.iter().map(|t| (-t.f).exp()).sum()
        }
        (_, TermData::Coord(terms)) => {
            // ∫ exp[-4C u² - 2E u - F] du = √(π/4C) exp(E²/4C - F) = exp(-f).
            let mut sum = Complex64::new(0.0, 0.0);
            for t in terms {
                let ch = coord_to_char(t, hbar)?;
                sum += (-ch.f).exp();
            }
            sum
        }
        (Representation::Position | Representation::Momentum, TermData::Char(_)) => {
            return Err(QbmError::Unsupported(
                "state representation tag does not match its term storage".into(),
            ))
        }
    };
    Ok(tr)
}

/// Fourier-conjugate coefficients of one coordinate-shaped term,
/// ρ(p, p′) = (1/2πħ)∬ e^{-i(px - p′x′)/ħ} ρ(x, x′) dx dx′:
///
///   Z = 4(B² + 4AC)ħ²,
///   A′ = A/Z, B′ = -B/Z, C′ = C/Z,
///   D′ = -2ħ(BD + 2AE)/Z,  E′ = 2ħ(2CD - BE)/Z,
///   F′ = F + 4ħ²(CD² - BDE - AE²)/Z + ½ Ln Z.
pub fn fourier_conjugate_term(term: &CoordTerm, hbar: f64) -> Result<CoordTerm> {
    // Convergence of the double Gaussian integral: positive-definite real
    // part of [[A, iB/2], [iB/2, C]].
    let re_ok = term.a.re > 0.0
        && term.c.re > 0.0
        && term.a.re * term.c.re > 0.25 * term.b.im * term.b.im;
    if !re_ok {
        return Err(QbmError::SingularTransform(format!(
            "term has non-convergent Fourier integral: A = {}, B = {}, C = {}",
            term.a, term.b, term.c
        )));
    }
    let (a, b, c, d, e, f) = (term.a, term.b, term.c, term.d, term.e, term.f);
    let h2 = hbar * hbar;
    let z = 4.0 * (b * b + 4.0 * a * c) * h2;
    if z == Complex64::new(0.0, 0.0) {
        return Err(QbmError::SingularTransform("Z = 0".into()));
    }
    Ok(CoordTerm {
        a: a / z,
        b: -b / z,
        c: c / z,
        d: -2.0 * hbar * (b * d + 2.0 * a * e) / z,
        e: 2.0 * hbar * (2.0 * c * d - b * e) / z,
        f: f + 4.0 * h2 * (c * d * d - b * d * e - a * e * e) / z + 0.5 * z.ln(),
    })
}

/// Term-by-term analytic double Fourier transform between the position and
/// momentum kernels. Applying it twice returns the original coefficients up
/// to the parity flip x → -x (D, E negated), which is absorbed by
/// convention.
pub fn momentum_rep(state: &ExpSumState, hbar: f64) -> Result<ExpSumState> {
    let (terms, new_rep) = match (&state.rep, &state.terms) {
        (Representation::Position, TermData::Coord(v)) => (v, Representation::Momentum),
        (Representation::Momentum, TermData::Coord(v)) => (v, Representation::Position),
        (Representation::Characteristic, _) => {
            return Err(QbmError::Unsupported(
                "convert to the position representation before momentum_rep".into(),
            ))
        }
        _ => {
            return Err(QbmError::Unsupported(
                "state representation tag does not match its term storage".into(),
            ))
        }
    };
    let out = terms
        .iter()
        .map(|t| fourier_conjugate_term(t, hbar))
        .collect::<Result<Vec<_>>>()?;
    ExpSumState::from_coord_terms(out, new_rep)
}

/// Per-axis extents of the state in its coordinate-shaped representation:
/// returns (mid_center, mid_halfwidth, sep_center, sep_halfwidth) covering
/// all terms' peaks plus `n_sigma` standard widths, with x = (x₁+x₂)/2 on
/// the mid axis and r = x₁-x₂ on the separation axis.
pub fn coord_extents(terms: &[CoordTerm], n_sigma: f64) -> Result<(f64, f64, f64, f64)> {
    if terms.is_empty() {
        return Err(QbmError::InvalidSpec("state has no terms".into()));
    }
    let mut mid_lo = f64::INFINITY;
    let mut mid_hi = f64::NEG_INFINITY;
    let mut sep_lo = f64::INFINITY;
    let mut sep_hi = f64::NEG_INFINITY;
    for t in terms {
        t.validate()?;
        let w_mid = 1.0 / (8.0 * t.c.re).sqrt();
        // Re A = 0 is admissible (pure plane-wave separation profile); fall
        // back to the mid width scale for the grid in that case.
        let w_sep = if t.a.re > 0.0 {
            1.0 / (2.0 * t.a.re).sqrt()
        } else {
            2.0 * w_mid
        };
        // Peak of exp(-C s² - E s) on the mid axis (x = s/2) and of
        // exp(-A r² - iD r) on the separation axis (imaginary D shifts r).
        let x_peak = -t.e.re / (4.0 * t.c.re);
        let r_peak = if t.a.re > 0.0 { -t.d.im / (2.0 * t.a.re) } else { 0.0 };
        mid_lo = mid_lo.min(x_peak - n_sigma * w_mid);
        mid_hi = mid_hi.max(x_peak + n_sigma * w_mid);
        sep_lo = sep_lo.min(r_peak - n_sigma * w_sep);
        sep_hi = sep_hi.max(r_peak + n_sigma * w_sep);
    }
    let mid_c = 0.5 * (mid_lo + mid_hi);
    let sep_c = 0.5 * (sep_lo + sep_hi);
    Ok((mid_c, mid_hi - mid_c, sep_c, sep_hi - sep_c))
}

/// Extents of a characteristic-representation state: returns
/// (k_center, k_halfwidth, Δ_center, Δ_halfwidth) covering peaks plus
/// `n_sigma` widths (imaginary d, e shift the peaks off the origin).
pub fn char_extents(terms: &[CharTerm], n_sigma: f64) -> Result<(f64, f64, f64, f64)> {
    if terms.is_empty() {
        return Err(QbmError::InvalidSpec("state has no terms".into()));
    }
    let mut k_lo = f64::INFINITY;
    let mut k_hi = f64::NEG_INFINITY;
    let mut d_lo = f64::INFINITY;
    let mut d_hi = f64::NEG_INFINITY;
    for t in terms {
        t.validate()?;
        let wk = 1.0 / (2.0 * t.a.re).sqrt();
        let wd = 1.0 / (2.0 * t.c.re).sqrt();
        let k_peak = t.d.im / (2.0 * t.a.re);
        let d_peak = t.e.im / (2.0 * t.c.re);
        k_lo = k_lo.min(k_peak - n_sigma * wk);
        k_hi = k_hi.max(k_peak + n_sigma * wk);
        d_lo = d_lo.min(d_peak - n_sigma * wd);
        d_hi = d_hi.max(d_peak + n_sigma * wd);
    }
    let kc = 0.5 * (k_lo + k_hi);
    let dc = 0.5 * (d_lo + d_hi);
    Ok((kc, k_hi - kc, dc, d_hi - dc))
}
