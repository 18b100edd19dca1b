//! Mixed-state (Uhlmann) connection, holonomy and phase for thermal states
//! of the four-level Γ-model.
//!
//! A full-rank density matrix ρ(t) along a parameter loop is lifted to an
//! amplitude W = √ρ·𝒰 with 𝒰 unitary. Demanding parallelity of the lift,
//! W†dW = dW†W, fixes 𝒰 as the path-ordered exponential of the Uhlmann
//! connection 𝒜, an anti-Hermitian 1-form. The geometric content of the
//! loop is the holonomy 𝒰_loop = 𝒫exp(−∮𝒜) and the mixed-state phase
//!
//!   θ_U = arg Tr[ρ(0)·𝒰_loop].
//!
//! Three algebraically equivalent constructions of 𝒜 are implemented and
//! cross-checked:
//!
//! * [`connection_spectral`] — basis-free function calculus: in the
//!   eigenbasis of ρ, (d√ρ)ᵢⱼ = (dρ)ᵢⱼ/(√λᵢ+√λⱼ) (Daleckii–Krein), and
//!   𝒜ᵢⱼ = −[d√ρ, √ρ]ᵢⱼ/(λᵢ+λⱼ). Works for any full-rank ρ.
//! * [`connection_gamma`] — the closed form for thermal states of
//!   H = RₐΓᵃ: 𝒜 = −χ/(2R²)·M with χ = 1 − sech(R/T) and M the explicit
//!   anti-Hermitian matrix of 1-forms RₐdR_b ΓᵃΓᵇ (a ≠ b), written out
//!   entry by entry below. This is the production route: no
//!   diagonalization, stable all the way into T → 0.
//! * [`connection_alt`] — the spectral-decomposition form
//!   𝒜 = −Σ_{i≠j} (√λᵢ−√λⱼ)²/(λᵢ+λⱼ) |i⟩⟨i|dj⟩⟨j| over eigenstate pairs,
//!   fed with analytic frames and their derivatives. Within a degenerate
//!   doublet the weight vanishes identically — the connection only sees
//!   population differences.
//!
//! On the sphere-equator family the connection is constant in φ,
//! 𝒜 = i(χ/2)(σ₃ ⊕ (−σ₁))dφ, so the holonomy and phase have closed forms
//! ([`equator_phase_analytic`]): Tr[ρ(0)𝒰] = cos(πχ). On the kₓ loop of
//! the tight-binding family 𝒜 ∝ K dkₓ with one constant matrix K, K² = −1₄,
//! giving 𝒰 = cos(I)·1₄ − sin(I)·K with I the scalar integral
//! [`tb4d_integral`]; the phase is arg cos I ([`tb4d_phase_analytic`]).
//! Both closed forms quantize the phase to {0, π}, and both serve as
//! oracles for the generic path-ordered product in the tests.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix, EigenSystem};
use crate::model::{self, LoopPath, ParamPoint, ThermalState};
use crate::{principal_arg, Error, Result};

/// Trace magnitudes below this floor make `arg` numerically meaningless;
/// the phase is then flagged [`PhaseStatus::NearCritical`] instead of being
/// silently reported as 0 or π.
pub const MAG_FLOOR: f64 = 1e-9;

/// Eigenvalues of ρ at or below this are treated as a rank deficiency: the
/// Uhlmann construction needs a strictly full-rank state.
pub const RANK_FLOOR: f64 = 1e-14;

/// Default number of loop segments for path-ordered holonomies.
pub const DEFAULT_SEGMENTS: usize = 4096;

/// Reduced segment count for quick runs (second-order stepping keeps
/// roughly 1e-5 accuracy here, versus ~1e-7 at the default).
pub const QUICK_SEGMENTS: usize = 512;

/// One sample of the Uhlmann connection: an anti-Hermitian matrix, the
/// contraction 𝒜_a·ΔR_a of the 1-form with a concrete parameter increment.
#[derive(Clone, Debug)]
pub struct ConnectionSample {
    /// 4×4 anti-Hermitian matrix.
    pub matrix: CMatrix,
}

impl ConnectionSample {
    /// Wraps `matrix`, enforcing anti-Hermiticity within
    /// 1e-10·(1 + ‖𝒜‖_F).
    pub fn new(matrix: CMatrix) -> Result<ConnectionSample> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch);
        }
        if matrix.anti_hermitian_deviation() > 1e-10 * (1.0 + matrix.frob()) {
            return Err(Error::NotAntiHermitian);
        }
        Ok(ConnectionSample { matrix })
    }
}

/// Uhlmann connection from the eigensystem of ρ and a Hermitian variation
/// dρ — no model assumptions, any dimension.
///
/// In the eigenbasis of ρ the square-root derivative is
/// (d√ρ)ᵢⱼ = (dρ)ᵢⱼ/(√λᵢ+√λⱼ), and
///
///   𝒜ᵢⱼ = −(√λⱼ−√λᵢ)/((√λᵢ+√λⱼ)(λᵢ+λⱼ))·(dρ)ᵢⱼ.
///
/// The result is independent of the basis choice inside degenerate
/// clusters: equal eigenvalues zero the weight.
///
/// Errors: [`Error::RankDeficient`] if any λᵢ ≤ [`RANK_FLOOR`];
/// [`Error::NotHermitian`] if dρ is not Hermitian within 1e-12 relative.
pub fn connection_spectral(eig: &EigenSystem, drho: &CMatrix) -> Result<ConnectionSample> {
    let n = eig.values.len();
    if eig.vectors.rows() != n || eig.vectors.cols() != n || drho.rows() != n || drho.cols() != n {
        return Err(Error::DimensionMismatch);
    }
    if drho.hermitian_deviation() > 1e-12 * drho.frob().max(1.0) {
        return Err(Error::NotHermitian);
    }
    if eig.values.iter().any(|&l| l <= RANK_FLOOR) {
        return Err(Error::RankDeficient);
    }
    let v = &eig.vectors;
    let d = v.adjoint().mul(drho).mul(v);
    let roots: Vec<f64> = eig.values.iter().map(|&l| l.sqrt()).collect();
    let mut a_eig = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let weight =
                (roots[j] - roots[i]) / ((roots[i] + roots[j]) * (eig.values[i] + eig.values[j]));
            a_eig[(i, j)] = -d[(i, j)] * weight;
        }
    }
    ConnectionSample::new(v.mul(&a_eig).mul(&v.adjoint()))
}

/// The matrix of 1-forms M = −Σ_{a≠b} Rₐ dR_b ΓᵃΓᵇ, contracted with the
/// increment `d`, written out entry by entry in the computational basis.
///
/// M is anti-Hermitian and traceless by construction (M₂₂ = −M₁₁,
/// M₄₄ = −M₃₃, M₃₁ = M₂₄, M₄₂ = M₁₃). The in-file test rebuilds it from
/// the Γ products directly and compares, so a transcription slip in any
/// entry is caught mechanically.
pub(crate) fn m_matrix(r: &[f64; 5], d: &[f64; 5]) -> CMatrix {
    let (r1, r2, r3, r4, r5) = (r[0], r[1], r[2], r[3], r[4]);
    let (d1, d2, d3, d4, d5) = (d[0], d[1], d[2], d[3], d[4]);
    let z = Complex64::new;
    let m11 = z(0.0, r2 * d1 - r1 * d2 + r4 * d3 - r3 * d4);
    let m12 = z(r1, -r2) * z(d3, -d4) - z(r3, -r4) * z(d1, -d2);
    let m13 = z(-r5 * d3 + r3 * d5, r5 * d4 - r4 * d5);
    let m14 = z(-r5 * d1 + r1 * d5, r5 * d2 - r2 * d5);
    let m21 = z(r3, r4) * z(d1, d2) - z(r1, r2) * z(d3, d4);
    let m22 = z(0.0, -(r2 * d1) + r1 * d2 - r4 * d3 + r3 * d4);
    let m23 = z(r1 * d5 - r5 * d1, r2 * d5 - r5 * d2);
    let m24 = z(r5 * d3 - r3 * d5, r5 * d4 - r4 * d5);
    let m31 = z(r5 * d3 - r3 * d5, r5 * d4 - r4 * d5);
    let m32 = z(r5 * d1 - r1 * d5, -(r5 * d2) + r2 * d5);
    let m33 = z(0.0, r2 * d1 - r1 * d2 - r4 * d3 + r3 * d4);
    let m34 = z(r1, -r2) * z(d3, d4) - z(r3, r4) * z(d1, -d2);
    let m41 = z(r5 * d1 - r1 * d5, r5 * d2 - r2 * d5);
    let m42 = z(-r5 * d3 + r3 * d5, r5 * d4 - r4 * d5);
    let m43 = z(r3, -r4) * z(d1, d2) - z(r1, r2) * z(d3, -d4);
    let m44 = z(0.0, -(r2 * d1) + r1 * d2 + r4 * d3 - r3 * d4);
    CMatrix::from_rows(&[
        vec![m11, m12, m13, m14],
        vec![m21, m22, m23, m24],
        vec![m31, m32, m33, m34],
        vec![m41, m42, m43, m44],
    ])
}

/// Closed-form Uhlmann connection of the thermal state along `dp`:
///
///   𝒜 = −χ/(2R²)·M,  χ = 1 − sech(R/T),
///
/// with M from [`m_matrix`]. No diagonalization, no square roots of ρ —
/// this stays finite and correct arbitrarily close to T = 0, where the
/// spectral routes lose rank.
///
/// Errors: [`Error::NonpositiveTemperature`]; [`Error::GapClosure`] at
/// R ≈ 0 (the thermal state itself is fine there, but the closed form and
/// the model's doublet structure are not).
pub fn connection_gamma(p: &ParamPoint, dp: &[f64; 5], temperature: f64) -> Result<ConnectionSample> {
    if !(temperature > 0.0) {
        return Err(Error::NonpositiveTemperature);
    }
    if p.gap_closed() {
        return Err(Error::GapClosure);
    }
    let r = p.norm();
    let chi = model::thermal_weight(r / temperature);
    let scale = Complex64::new(-chi / (2.0 * r * r), 0.0);
    ConnectionSample::new(m_matrix(&p.r, dp).scale(scale))
}

/// Pair weight of the spectral-decomposition form:
/// w(λᵢ, λⱼ) = (√λᵢ−√λⱼ)²/(λᵢ+λⱼ) ∈ [0, 1).
///
/// Zero for equal populations (in particular within a degenerate doublet),
/// → 1 as the ratio degenerates; w = 0.4 at ratio 9.
#[must_use]
pub fn alt_weight(li: f64, lj: f64) -> f64 {
    let diff = li.sqrt() - lj.sqrt();
    diff * diff / (li + lj)
}

/// Uhlmann connection as a sum over eigenstate pairs:
///
///   𝒜 = −Σ_{i≠j} w(λᵢ, λⱼ)·|i⟩⟨i|dj⟩⟨j|,
///
/// assembled from an orthonormal eigenframe (`basis`, columns |i⟩), its
/// derivative along the increment (`dbasis`, columns |di⟩) and the matching
/// populations λᵢ of ρ per column.
///
/// The frame must be smooth in the parameter: derivatives produced by
/// differencing misaligned numerical frames violate ⟨i|dj⟩ = −⟨dj|i⟩* and
/// are rejected as [`Error::NotAntiHermitian`]; upstream alignment failures
/// surface as [`Error::GaugeDiscontinuity`] from the frame-matching
/// helpers.
///
/// Errors: [`Error::RankDeficient`] if any population ≤ [`RANK_FLOOR`].
pub fn connection_alt(
    populations: &[f64],
    basis: &CMatrix,
    dbasis: &CMatrix,
) -> Result<ConnectionSample> {
    let n = populations.len();
    if basis.rows() != n || basis.cols() != n || dbasis.rows() != n || dbasis.cols() != n {
        return Err(Error::DimensionMismatch);
    }
    if populations.iter().any(|&l| l <= RANK_FLOOR) {
        return Err(Error::RankDeficient);
    }
    let b = basis.adjoint().mul(dbasis);
    let mut a_eig = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            a_eig[(i, j)] = -b[(i, j)] * alt_weight(populations[i], populations[j]);
        }
    }
    ConnectionSample::new(basis.mul(&a_eig).mul(&basis.adjoint()))
}

/// Path-ordered Uhlmann holonomy of a closed loop.
#[derive(Clone, Debug)]
pub struct Holonomy {
    /// 4×4 transport unitary 𝒫exp(−∮𝒜).
    pub matrix: CMatrix,
    /// Number of segments folded into the product.
    pub steps: usize,
}

/// Wire shape of a holonomy: `{"dim":4,"steps":N,"matrix":[[[re,im],…],…]}`.
#[derive(Serialize, Deserialize)]
struct HolonomyWire {
    dim: usize,
    steps: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl Holonomy {
    /// ‖𝒰†𝒰 − 1‖_F; produced holonomies keep this below 1e-9.
    #[must_use]
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.rows();
        linalg::frob_diff(&self.matrix.adjoint().mul(&self.matrix), &CMatrix::identity(n))
    }

    /// Serializes to the wire shape (row-major, [re, im] pairs).
    #[must_use]
    pub fn to_json(&self) -> String {
        let n = self.matrix.rows();
        let matrix = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let z = self.matrix[(r, c)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        serde_json::to_string(&HolonomyWire { dim: n, steps: self.steps, matrix })
            .expect("plain float serialization cannot fail")
    }

    /// Parses the wire shape back; rejects shape mismatches and matrices
    /// that are not unitary within 1e-9.
    pub fn from_json(text: &str) -> Result<Holonomy> {
        let wire: HolonomyWire = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        if wire.dim == 0
            || wire.matrix.len() != wire.dim
            || wire.matrix.iter().any(|row| row.len() != wire.dim)
        {
            return Err(Error::Parse {
                line: 0,
                msg: format!("matrix shape does not match dim = {}", wire.dim),
            });
        }
        let matrix = CMatrix::from_fn(wire.dim, wire.dim, |r, c| {
            let [re, im] = wire.matrix[r][c];
            Complex64::new(re, im)
        });
        let hol = Holonomy { matrix, steps: wire.steps };
        if hol.unitarity_defect() > 1e-9 {
            return Err(Error::Parse {
                line: 0,
                msg: "holonomy matrix is not unitary within 1e-9".into(),
            });
        }
        Ok(hol)
    }
}

/// A gap closure met while stepping along a path is a path-level error.
pub(crate) fn on_path(e: Error) -> Error {
    match e {
        Error::GapClosure => Error::GapClosureOnPath,
        other => other,
    }
}

/// One transport step: exp(−𝒜) with 𝒜 sampled at the segment midpoint and
/// contracted with the segment increment. Midpoint sampling makes the
/// composite product second-order accurate in the segment width.
fn transport_step(lp: &LoopPath, k: usize, temperature: f64) -> Result<CMatrix> {
    let sample =
        connection_gamma(&lp.midpoint(k), &lp.increment(k), temperature).map_err(on_path)?;
    linalg::unitary_exp(&sample.matrix.scale(Complex64::new(-1.0, 0.0)))
}

/// Uhlmann holonomy 𝒰 = 𝒫exp(−∮𝒜) of a closed loop at temperature T,
/// as the ordered product of segment steps, last segment leftmost.
///
/// Uses [`connection_gamma`] per segment. Unitary within 1e-9 (each factor
/// is spectrally unitary; defects only accumulate linearly in N·ε).
pub fn holonomy(lp: &LoopPath, temperature: f64) -> Result<Holonomy> {
    let n = lp.segments();
    let mut u = CMatrix::identity(4);
    for k in 0..n {
        u = transport_step(lp, k, temperature)?.mul(&u);
    }
    Ok(Holonomy { matrix: u, steps: n })
}

/// All partial holonomies 𝒰_k transporting from the loop start to sample
/// k; 𝒰_0 = 1₄ and 𝒰_N is the full holonomy. Length N + 1.
pub fn holonomy_partials(lp: &LoopPath, temperature: f64) -> Result<Vec<CMatrix>> {
    let n = lp.segments();
    let mut us = Vec::with_capacity(n + 1);
    let mut u = CMatrix::identity(4);
    us.push(u.clone());
    for k in 0..n {
        u = transport_step(lp, k, temperature)?.mul(&u);
        us.push(u.clone());
    }
    Ok(us)
}

/// How trustworthy a reported phase is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseStatus {
    /// Trace magnitude comfortably above [`MAG_FLOOR`].
    Defined,
    /// Trace magnitude under the floor: the system sits numerically on a
    /// critical point and arg carries no information.
    NearCritical,
}

impl PhaseStatus {
    /// Stable lowercase token for serialized tables.
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseStatus::Defined => "defined",
            PhaseStatus::NearCritical => "near-critical",
        }
    }
}

/// A geometric phase extracted from a trace, with its provenance.
#[derive(Clone, Copy, Debug)]
pub struct PhaseResult {
    /// Principal value in (−π, π], the branch cut pinned to +π.
    pub phase: f64,
    /// The raw trace the phase came from.
    pub trace_value: Complex64,
    /// |trace|, the interference visibility.
    pub magnitude: f64,
    /// [`PhaseStatus::NearCritical`] when the magnitude is under
    /// [`MAG_FLOOR`].
    pub status: PhaseStatus,
}

impl PhaseResult {
    /// Classifies a raw trace into phase + visibility + status.
    #[must_use]
    pub fn from_trace(trace: Complex64) -> PhaseResult {
        let magnitude = trace.norm();
        PhaseResult {
            phase: principal_arg(trace),
            trace_value: trace,
            magnitude,
            status: if magnitude < MAG_FLOOR {
                PhaseStatus::NearCritical
            } else {
                PhaseStatus::Defined
            },
        }
    }

    /// True when the phase is numerically meaningful.
    #[must_use]
    pub fn is_defined(&self) -> bool {
        self.status == PhaseStatus::Defined
    }
}

/// Mixed-state geometric phase of a loop: θ_U = arg Tr[ρ(0)·𝒰_loop], with
/// ρ(0) the thermal state at the loop's first sample.
pub fn phase(lp: &LoopPath, temperature: f64) -> Result<PhaseResult> {
    let hol = holonomy(lp, temperature)?;
    let rho0 = model::thermal_density(lp.sample(0), temperature)?.rho;
    Ok(PhaseResult::from_trace(rho0.mul(&hol.matrix).trace()))
}

/// Closed-form mixed-state phase of the sphere-equator loop.
///
/// With χ = 1 − sech(R/T) the connection is constant,
/// 𝒜 = i(χ/2)(σ₃ ⊕ (−σ₁))dφ, the holonomy is
/// diag(e^{−iπχ}, e^{iπχ}) ⊕ [cos πχ·1₂ + i sin πχ·σ₁], and the trace
/// collapses to Tr[ρ(0)·𝒰] = cos(πχ) exactly — real, so the phase is
/// quantized to 0 (cos > 0) or π (cos < 0), with a critical temperature at
/// every χ where cos(πχ) = 0.
pub fn equator_phase_analytic(temperature: f64, radius: f64) -> Result<PhaseResult> {
    if !(temperature > 0.0) {
        return Err(Error::NonpositiveTemperature);
    }
    if !(radius > 0.0) {
        return Err(Error::GapClosure);
    }
    let chi = model::thermal_weight(radius / temperature);
    Ok(PhaseResult::from_trace(Complex64::new((PI * chi).cos(), 0.0)))
}

/// Quadrature control for the tight-binding loop integral.
#[derive(Clone, Copy, Debug)]
pub enum QuadSpec {
    /// Composite Simpson with interval doubling from `start` until two
    /// successive values agree within `tol`; intervals past `cap` error
    /// with [`Error::NoConvergence`].
    Adaptive { start: usize, tol: f64, cap: usize },
    /// One composite-Simpson pass with a fixed interval count (forced even
    /// and at least 2).
    Fixed(usize),
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec::Adaptive { start: 64, tol: 1e-9, cap: 1 << 20 }
    }
}

/// Composite Simpson over [0, 2π] with n (even) intervals.
fn simpson_2pi(f: &impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = TAU / n as f64;
    let mut sum = f(0.0) + f(TAU);
    for j in 1..n {
        sum += if j % 2 == 1 { 4.0 } else { 2.0 } * f(j as f64 * h);
    }
    sum * h / 3.0
}

/// Scalar Uhlmann integral of the tight-binding kₓ loop:
///
///   I(m, T) = ∫₀^{2π} (sech(R/T) − 1)/(2R²)·[(m+3)·cos kₓ + 1] dkₓ,
///
/// with R(kₓ)² = a² + 2a·cos kₓ + 1, a = m + 3. The holonomy of the loop
/// is cos(I)·1₄ − sin(I)·K with a constant K, so I alone carries the
/// phase. Limits worth knowing: I(−3, T) = π(sech(1/T) − 1) exactly, and
/// as T → 0 the integral becomes −(1/2)∫(a·cos k + 1)/R² dk = −π for
/// |a| < 1 and 0 for |a| > 1 — the topological step this model exists to
/// show.
///
/// Errors: [`Error::GapClosureOnPath`] when the continuum minimum gap
/// ‖a| − 1| closes; [`Error::NoConvergence`] past the doubling cap.
pub fn tb4d_integral(m: f64, temperature: f64, quad: &QuadSpec) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::NonpositiveTemperature);
    }
    let a = m + 3.0;
    if (a.abs() - 1.0).abs() <= model::GAP_FLOOR * (a.abs() + 1.0) {
        return Err(Error::GapClosureOnPath);
    }
    // sech − 1 = −χ, evaluated cancellation-free by the thermal weight.
    let f = move |k: f64| {
        let c = k.cos();
        let r2 = a * a + 2.0 * a * c + 1.0;
        -model::thermal_weight(r2.sqrt() / temperature) * (a * c + 1.0) / (2.0 * r2)
    };
    match *quad {
        QuadSpec::Fixed(n) => {
            let n = n.max(2);
            Ok(simpson_2pi(&f, n + n % 2))
        }
        QuadSpec::Adaptive { start, tol, cap } => {
            let mut n = start.max(4);
            n += n % 2;
            let mut prev = simpson_2pi(&f, n);
            loop {
                n = match n.checked_mul(2) {
                    Some(v) if v <= cap => v,
                    _ => return Err(Error::NoConvergence),
                };
                let cur = simpson_2pi(&f, n);
                if (cur - prev).abs() < tol {
                    return Ok(cur);
                }
                prev = cur;
            }
        }
    }
}

/// Closed-form mixed-state phase of the tight-binding kₓ loop:
/// Tr[ρ(0)·𝒰] = cos I(m, T), quantized to {0, π} like the equator case.
pub fn tb4d_phase_analytic(m: f64, temperature: f64, quad: &QuadSpec) -> Result<PhaseResult> {
    let i = tb4d_integral(m, temperature, quad)?;
    Ok(PhaseResult::from_trace(Complex64::new(i.cos(), 0.0)))
}

/// Amplitude (purification) W = √ρ·𝒰 of a density matrix with transport
/// unitary 𝒰; WW† = ρ whenever 𝒰 is exactly unitary.
#[derive(Clone, Debug)]
pub struct PurifiedAmplitude {
    /// The amplitude matrix W.
    pub matrix: CMatrix,
}

impl PurifiedAmplitude {
    /// Builds W = √ρ·𝒰 for a thermal state.
    pub fn new(state: &ThermalState, transport: &CMatrix) -> Result<PurifiedAmplitude> {
        if transport.rows() != state.rho.rows() || !transport.is_square() {
            return Err(Error::DimensionMismatch);
        }
        Ok(PurifiedAmplitude { matrix: linalg::psd_sqrt(&state.rho)?.mul(transport) })
    }

    /// ‖WW† − ρ‖_F — how far the transport's non-unitarity has leaked into
    /// the recovered density matrix.
    #[must_use]
    pub fn density_defect(&self, state: &ThermalState) -> f64 {
        linalg::frob_diff(&self.matrix.mul(&self.matrix.adjoint()), &state.rho)
    }
}

/// Discrete parallelity residual of the transported amplitudes: the
/// Uhlmann condition is W†dW = dW†W, so
///
///   max_k ‖W_k†W_{k+1} − W_{k+1}†W_k‖_F / Δt,  Δt = 1/N,
///
/// measures how parallel the computed transport actually is. With
/// midpoint-sampled transport steps the forward-difference estimator's
/// O(Δt) term cancels at the midpoint, so the residual is second order:
/// halving the step quarters it.
pub fn transport_check(lp: &LoopPath, temperature: f64) -> Result<f64> {
    let partials = holonomy_partials(lp, temperature)?;
    let n = lp.segments();
    let mut amps = Vec::with_capacity(n + 1);
    for (k, u) in partials.iter().enumerate() {
        let state = model::thermal_density(lp.sample(k), temperature)?;
        amps.push(PurifiedAmplitude::new(&state, u)?.matrix);
    }
    let dt = 1.0 / n as f64;
    let mut worst = 0.0f64;
    for k in 0..n {
        let cross = amps[k].adjoint().mul(&amps[k + 1]);
        worst = worst.max(cross.sub(&cross.adjoint()).frob() / dt);
    }
    Ok(worst)
}
