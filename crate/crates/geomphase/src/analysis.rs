//! Cross-cutting analyses on top of the connection/holonomy machinery:
//! the T → 0 limit of the mixed-state connection, critical temperatures,
//! the (m, T) phase diagram with its dome fit, winding numbers of unitary
//! deformations, and the pure↔mixed correspondence report.
//!
//! The analytic backbone is the zero-temperature limit
//!
//!   𝒜_U(T→0) = 𝒜_WZ − Σ_{j,m} |dψ_m⁽ʲ⁾⟩⟨ψ_m⁽ʲ⁾| = −(P₊dP₋ + P₋dP₊),
//!
//! implemented by [`zero_t_connection`]: the doublet-diagonal Wilczek–Zee
//! part cancels against the same-subspace content of the frame-derivative
//! sum, leaving a purely cross-doublet 1-form. For loops with constant
//! spectrum the evolution is a unitary deformation
//! ψ(𝐑(t)) = 𝒟(t)·ψ(𝐑(0)) and the limit collapses further to
//! 𝒜_WZ − d𝒟𝒟† ([`decomposition_holonomy`]); the deformation's homotopy
//! class in π₁(U(N)) = ℤ is the winding number
//! κ = (1/2πi)∮Tr(d𝒟𝒟†) ([`winding_number`]), which shifts the
//! mixed-state phase by a full 2πκ — invisible in the principal value but
//! a useful classifier of the deformation.
//!
//! The temperature side: both loop families quantize the mixed-state phase
//! to {0, π} through a real order scalar — cos(πχ) on the sphere equator,
//! cos I(m, T) on the tight-binding kₓ loop — so critical temperatures are
//! sign changes of that scalar ([`critical_temperature`]; the equator case
//! has the closed form T_c = R/ln(2+√3) ≈ 0.759326·R,
//! [`equator_critical_temperature`]). Sweeping (m, T) yields the phase
//! diagram ([`phase_diagram`]): a dome of θ_U = π over |m+3| < 1 that
//! terminates at T = 0 in the topological step of the underlying band
//! model. [`dome_fit`] extracts the dome boundary per mass column and fits
//! the scaling law T_c(m) ≈ A·(1 − (m+3)²)^p.
//!
//! [`correspondence`] ties the two sides together for one loop: a
//! descending temperature ladder of mixed-state phases against the scalar
//! Wilczek–Zee phase, with a match/mismatch/undecided verdict and, for
//! constant-spectrum loops, the winding diagnostic and the size of the
//! commutator [𝒜_WZ, d𝒟𝒟†] whose vanishing would make the holonomy
//! factorize exactly.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use crate::linalg::{self, CMatrix};
use crate::model::{self, LoopPath, ParamPoint};
use crate::uhlmann::{self, on_path, PhaseResult, QuadSpec};
use crate::wz;
use crate::{phase_distance, principal_arg, Error, Result};

/// Number of equal scan intervals used to locate a sign change inside a
/// critical-temperature bracket before bisecting.
const SCAN_INTERVALS: usize = 64;

/// Columns with |m + 3| above this are left out of the dome fit: the
/// scaling abscissa 1 − (m+3)² degenerates at the dome edge.
pub const DOME_INTERIOR_CUTOFF: f64 = 0.95;

/// Bisection steps refining the dome boundary between two grid rows.
pub const DOME_REFINE_STEPS: usize = 20;

/// Per-step ceiling on ‖𝒟_{k+1}𝒟_k† − 1‖_F in [`winding_number`]. Under
/// this bound the eigenphases of an n×n step (n ≤ 8) sum to under π, so
/// the principal argument of the determinant is the exact phase increment
/// and no winding can hide inside one step.
pub const WINDING_STEP_CEILING: f64 = 0.5;

/// Largest tolerated distance between the accumulated winding and its
/// nearest integer.
pub const WINDING_RESIDUAL_CEILING: f64 = 0.1;

/// Circular distance under which the coldest mixed-state phase and the
/// scalar Wilczek–Zee phase count as matching.
pub const MATCH_TOLERANCE: f64 = 1e-2;

/// Circular distance under which the two coldest ladder rungs count as
/// settled — close enough to call the T → 0 limit reached.
pub const SETTLE_TOLERANCE: f64 = 1e-3;

/// Slack allowed in the monotone-convergence check of the ladder.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// Relative spread of ‖𝐑‖ along a loop below which the evolution counts
/// as a unitary deformation (constant spectrum).
pub const SPECTRUM_DRIFT_CEILING: f64 = 1e-9;

/// Zero-temperature limit of the mixed-state connection along `dp`:
///
///   𝒜_U(T→0) = V·𝒜_eig·V† − dV·V†,
///
/// with V the analytic eigenbasis (columns [ψ_c, ψ_d, ψ_a, ψ_b]) and
/// 𝒜_eig = 𝒜₋ ⊕ 𝒜₊ the assembled Wilczek–Zee blocks. Algebraically this
/// equals −(P₊dP₋ + P₋dP₊) = H·W/(2R) with W = Σₐ dR̂ₐΓᵃ — the in-file
/// tests pin that identity — so the result is purely cross-doublet: in the
/// eigenbasis its same-subspace 2×2 blocks vanish and the off-diagonal
/// blocks are −⟨ψᵢ|dψⱼ⟩ between opposite doublets.
///
/// Errors: [`Error::GapClosure`] at 𝐑 ≈ 0; [`Error::GaugePole`] where the
/// analytic frames degenerate (R₅ → ±R).
pub fn zero_t_connection(p: &ParamPoint, dp: &[f64; 5]) -> Result<uhlmann::ConnectionSample> {
    let fd = model::analytic_state_derivatives(p, dp)?;
    let v = fd.frames.basis();
    let dv = fd.dbasis();
    let a_eig = wz::wz_connection_analytic(p, dp)?.assemble();
    let vh = v.adjoint();
    uhlmann::ConnectionSample::new(v.mul(&a_eig).mul(&vh).sub(&dv.mul(&vh)))
}

/// Loop families with a scalar order parameter whose sign change marks the
/// mixed-state phase transition.
#[derive(Clone, Copy, Debug)]
pub enum CriticalModel {
    /// Sphere equator of radius R: order scalar cos(πχ), χ = 1 − sech(R/T).
    Equator {
        /// Sphere radius R > 0.
        radius: f64,
    },
    /// Tight-binding kₓ loop at mass m: order scalar cos I(m, T).
    Tb4d {
        /// Mass parameter m.
        m: f64,
    },
}

/// Closed-form equator critical temperature T_c = R/ln(2+√3): the unique
/// temperature where χ = 1/2, i.e. sech(R/T) = 1/2, so cos(πχ) changes
/// sign. Numerically T_c ≈ 0.759326·R.
#[must_use]
pub fn equator_critical_temperature(radius: f64) -> f64 {
    radius / (2.0 + 3.0_f64.sqrt()).ln()
}

/// The order scalar of `family` at temperature `t`.
fn order_scalar(family: &CriticalModel, t: f64, quad: &QuadSpec) -> Result<f64> {
    match *family {
        CriticalModel::Equator { radius } => {
            if !(radius > 0.0) {
                return Err(Error::GapClosure);
            }
            Ok((std::f64::consts::PI * model::thermal_weight(radius / t)).cos())
        }
        CriticalModel::Tb4d { m } => Ok(uhlmann::tb4d_integral(m, t, quad)?.cos()),
    }
}

/// Locates a critical temperature of `family` inside `bracket = (lo, hi)`:
/// scans [`SCAN_INTERVALS`] equal subintervals for a sign change of the
/// order scalar, then bisects the first one found until the bracket is
/// narrower than `tol`.
///
/// `Ok(None)` means the bracket is valid but the scalar never changes
/// sign — the absence of a transition is an answer, not a failure (the
/// tight-binding family outside the dome, |m+3| > 1, behaves exactly so).
///
/// Errors: [`Error::NonpositiveTemperature`] for lo ≤ 0;
/// [`Error::NoBracket`] for an unusable bracket (lo ≥ hi, non-finite
/// bounds, or tol ≤ 0); model failures propagate (e.g.
/// [`Error::GapClosureOnPath`] at |m+3| = 1).
pub fn critical_temperature(
    family: &CriticalModel,
    bracket: (f64, f64),
    tol: f64,
    quad: &QuadSpec,
) -> Result<Option<f64>> {
    let (lo, hi) = bracket;
    if !(lo > 0.0) {
        return Err(Error::NonpositiveTemperature);
    }
    if !(hi > lo) || !hi.is_finite() || !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::NoBracket);
    }
    let step = (hi - lo) / SCAN_INTERVALS as f64;
    let ts: Vec<f64> = (0..=SCAN_INTERVALS).map(|i| lo + step * i as f64).collect();
    let mut values = Vec::with_capacity(ts.len());
    for &t in &ts {
        values.push(order_scalar(family, t, quad)?);
    }
    let crossing = (0..SCAN_INTERVALS)
        .find(|&i| values[i].signum() != values[i + 1].signum() || values[i + 1] == 0.0);
    let Some(i) = crossing else {
        return Ok(None);
    };
    let (mut lo, mut hi) = (ts[i], ts[i + 1]);
    let low_sign = values[i].signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if order_scalar(family, mid, quad)?.signum() == low_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Specification of a rectangular (m, T) grid for [`phase_diagram`].
#[derive(Clone, Debug)]
pub struct GridSpec {
    /// Mass axis range, inclusive on both ends.
    pub m_min: f64,
    pub m_max: f64,
    /// Number of mass samples (≥ 2).
    pub m_count: usize,
    /// Temperature axis range, inclusive; t_min must be > 0.
    pub t_min: f64,
    pub t_max: f64,
    /// Number of temperature samples (≥ 2).
    pub t_count: usize,
    /// Quadrature control for each cell's loop integral.
    pub quad: QuadSpec,
    /// Worker threads (≥ 1). The cell values are bit-identical for every
    /// thread count: cells are pure functions of (m, T) and are gathered
    /// by index.
    pub threads: usize,
}

/// What one phase-diagram cell holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellValue {
    /// A defined mixed-state phase (principal value, here 0 or ±π).
    Phase(f64),
    /// Trace magnitude under the floor: the cell sits on the transition.
    NearCritical,
    /// The cell's evaluation failed; carries the stable error code.
    Failed(&'static str),
}

/// One cell of the (m, T) phase diagram.
#[derive(Clone, Copy, Debug)]
pub struct PhaseCell {
    pub value: CellValue,
    /// Interference visibility |Tr[ρ𝒰]| of the cell; NaN for failed cells.
    pub magnitude: f64,
}

/// The evaluated grid: `cells[i][j]` belongs to (`m_values[i]`,
/// `t_values[j]`); both axes are strictly increasing with exact range
/// endpoints.
#[derive(Clone, Debug)]
pub struct PhaseDiagramGrid {
    pub m_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub cells: Vec<Vec<PhaseCell>>,
}

/// `n` equally spaced values over [lo, hi], endpoints exact.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

/// One phase-diagram cell; failures become data, not early exits.
fn diagram_cell(m: f64, t: f64, quad: &QuadSpec) -> PhaseCell {
    match uhlmann::tb4d_phase_analytic(m, t, quad) {
        Ok(pr) => PhaseCell {
            value: if pr.is_defined() {
                CellValue::Phase(pr.phase)
            } else {
                CellValue::NearCritical
            },
            magnitude: pr.magnitude,
        },
        Err(e) => PhaseCell { value: CellValue::Failed(e.code()), magnitude: f64::NAN },
    }
}

/// Evaluates the tight-binding phase diagram over `spec`'s grid.
///
/// Cells are distributed over `spec.threads` scoped workers in contiguous
/// index chunks and gathered back by index, so the result — including the
/// bit pattern of every float — is independent of the thread count. A
/// failed cell (gap closure at |m+3| = 1, non-convergent quadrature) is
/// recorded in place and never aborts the sweep.
///
/// Errors: [`Error::NonpositiveTemperature`] for t_min ≤ 0;
/// [`Error::DimensionMismatch`] for counts < 2, inverted ranges, or zero
/// threads.
pub fn phase_diagram(spec: &GridSpec) -> Result<PhaseDiagramGrid> {
    if !(spec.t_min > 0.0) {
        return Err(Error::NonpositiveTemperature);
    }
    if spec.m_count < 2
        || spec.t_count < 2
        || !(spec.m_max > spec.m_min)
        || !(spec.t_max > spec.t_min)
        || spec.threads == 0
    {
        return Err(Error::DimensionMismatch);
    }
    let m_values = linspace(spec.m_min, spec.m_max, spec.m_count);
    let t_values = linspace(spec.t_min, spec.t_max, spec.t_count);
    let t_count = spec.t_count;
    let total = spec.m_count * t_count;
    let workers = spec.threads.min(total);
    let chunk = (total + workers - 1) / workers;
    let (mv, tv, quad) = (&m_values, &t_values, &spec.quad);
    let flat: Vec<PhaseCell> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(total);
                    (lo..hi)
                        .map(|idx| diagram_cell(mv[idx / t_count], tv[idx % t_count], quad))
                        .collect::<Vec<PhaseCell>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("phase-diagram worker panicked"))
            .collect()
    });
    let cells = flat.chunks(t_count).map(<[PhaseCell]>::to_vec).collect();
    Ok(PhaseDiagramGrid { m_values, t_values, cells })
}

/// Result of fitting the dome boundary to T_c(m) = A·(1 − (m+3)²)^p.
#[derive(Clone, Debug)]
pub struct DomeFit {
    /// Fitted prefactor A.
    pub amplitude: f64,
    /// Fitted exponent p.
    pub exponent: f64,
    /// Root-mean-square residual of ln T_c about the fitted line.
    pub residual: f64,
    /// Refined (m, T_c) boundary points actually used in the fit.
    pub boundary: Vec<(f64, f64)>,
}

/// Extracts the π-dome boundary from a phase-diagram grid and fits the
/// scaling law T_c(m) = A·(1 − (m+3)²)^p by least squares in log–log form.
///
/// Per mass column inside the dome interior (|m+3| ≤
/// [`DOME_INTERIOR_CUTOFF`]): find the hottest π cell and the first 0 cell
/// above it, then sharpen the boundary between those two rows with
/// [`DOME_REFINE_STEPS`] bisection steps on the sign of cos I(m, T).
/// Columns without a π/0 pair (dome exterior, grids that never reach the
/// transition) contribute nothing.
///
/// Errors: [`Error::EmptyDome`] when fewer than two boundary points
/// survive — nothing to fit; quadrature failures during refinement
/// propagate.
pub fn dome_fit(grid: &PhaseDiagramGrid, quad: &QuadSpec) -> Result<DomeFit> {
    let is_pi = |cell: &PhaseCell| matches!(cell.value, CellValue::Phase(p) if p.abs() > FRAC_PI_2);
    let is_zero =
        |cell: &PhaseCell| matches!(cell.value, CellValue::Phase(p) if p.abs() <= FRAC_PI_2);
    let mut boundary = Vec::new();
    for (mi, &m) in grid.m_values.iter().enumerate() {
        let a = m + 3.0;
        if a.abs() > DOME_INTERIOR_CUTOFF {
            continue;
        }
        let column = &grid.cells[mi];
        let Some(last_pi) = (0..column.len()).rev().find(|&ti| is_pi(&column[ti])) else {
            continue;
        };
        let Some(first_zero) = (last_pi + 1..column.len()).find(|&ti| is_zero(&column[ti]))
        else {
            continue;
        };
        let mut lo = grid.t_values[last_pi];
        let mut hi = grid.t_values[first_zero];
        if !(uhlmann::tb4d_integral(m, lo, quad)?.cos() < 0.0
            && uhlmann::tb4d_integral(m, hi, quad)?.cos() > 0.0)
        {
            continue;
        }
        for _ in 0..DOME_REFINE_STEPS {
            let mid = 0.5 * (lo + hi);
            if uhlmann::tb4d_integral(m, mid, quad)?.cos() < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        boundary.push((m, 0.5 * (lo + hi)));
    }
    if boundary.len() < 2 {
        return Err(Error::EmptyDome);
    }
    let pts: Vec<(f64, f64)> = boundary
        .iter()
        .map(|&(m, tc)| {
            let a = m + 3.0;
            ((1.0 - a * a).ln(), tc.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        // All boundary points share one abscissa — a line through them is
        // underdetermined, which is as empty as having no dome at all.
        return Err(Error::EmptyDome);
    }
    let exponent = (n * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / n;
    let residual = (pts
        .iter()
        .map(|&(x, y)| {
            let e = y - intercept - exponent * x;
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DomeFit { amplitude: intercept.exp(), exponent, residual, boundary })
}

/// Integer winding of a unitary family around a loop, with the rounding
/// residual that was discarded.
#[derive(Clone, Copy, Debug)]
pub struct WindingReport {
    /// κ = (1/2πi)∮Tr(d𝒟𝒟†), rounded to the nearest integer.
    pub kappa: i64,
    /// |raw − κ|, how far the accumulated winding was from that integer.
    pub residual: f64,
}

/// Winding number κ = (1/2πi)∮Tr(d𝒟𝒟†) of a sampled family of matrices
/// 𝒟_0 … 𝒟_N closing a loop (𝒟_N = 𝒟_0).
///
/// Tr(d𝒟𝒟†) integrates to d ln det 𝒟, so the winding accumulates as the
/// principal argument of det(𝒟_{k+1}𝒟_k†) per step. Each step must stay
/// within [`WINDING_STEP_CEILING`] of the identity in Frobenius norm —
/// under that bound the eigenphases of one step sum to under π (for
/// dimensions up to 8), the principal branch is exact, and no integer can
/// hide inside a single step.
///
/// Errors: [`Error::NotClosed`] if the family has fewer than two samples
/// or the ends differ by ≥ 1e-9; [`Error::DimensionMismatch`] for ragged
/// or non-square samples; [`Error::StepTooLarge`] when a step strays too
/// far from the identity; [`Error::NoConvergence`] if the accumulated
/// winding misses every integer by ≥ [`WINDING_RESIDUAL_CEILING`].
pub fn winding_number(samples: &[CMatrix]) -> Result<WindingReport> {
    let Some(first) = samples.first() else {
        return Err(Error::NotClosed);
    };
    if samples.len() < 2 {
        return Err(Error::NotClosed);
    }
    if !first.is_square() {
        return Err(Error::DimensionMismatch);
    }
    let dim = first.rows();
    if samples.iter().any(|s| s.rows() != dim || s.cols() != dim) {
        return Err(Error::DimensionMismatch);
    }
    if linalg::frob_diff(first, samples.last().expect("nonempty")) >= 1e-9 {
        return Err(Error::NotClosed);
    }
    let eye = CMatrix::identity(dim);
    let mut total = 0.0;
    for pair in samples.windows(2) {
        let step = pair[1].mul(&pair[0].adjoint());
        if linalg::frob_diff(&step, &eye) >= WINDING_STEP_CEILING {
            return Err(Error::StepTooLarge);
        }
        total += principal_arg(step.det());
    }
    let raw = total / TAU;
    let kappa = raw.round();
    let residual = (raw - kappa).abs();
    if residual >= WINDING_RESIDUAL_CEILING {
        return Err(Error::NoConvergence);
    }
    Ok(WindingReport { kappa: kappa as i64, residual })
}

/// True when ‖𝐑‖ is constant along the loop within
/// [`SPECTRUM_DRIFT_CEILING`] relative — the evolution is then a unitary
/// deformation of the initial eigenstates.
#[must_use]
pub fn is_unitary_family(lp: &LoopPath) -> bool {
    let r0 = lp.sample(0).norm();
    lp.samples().iter().all(|p| (p.norm() - r0).abs() <= SPECTRUM_DRIFT_CEILING * r0)
}

/// The unitary deformation 𝒟_k = V(𝐑_k)·V(𝐑_0)† carrying the base
/// eigenframes to the frames at sample k, for every sample of the loop.
/// Meaningful as a family when [`is_unitary_family`] holds; always a
/// well-defined sequence of unitaries wherever the analytic frames exist.
///
/// Errors: [`Error::GapClosureOnPath`] / [`Error::GaugePole`] when a
/// sample leaves the analytic chart.
pub fn unitary_family_deformation(lp: &LoopPath) -> Result<Vec<CMatrix>> {
    let b0h = model::eigensystem_analytic(lp.sample(0)).map_err(on_path)?.basis().adjoint();
    lp.samples()
        .iter()
        .map(|p| Ok(model::eigensystem_analytic(p).map_err(on_path)?.basis().mul(&b0h)))
        .collect()
}

/// Path-ordered decomposition holonomy 𝒫exp(−∮(𝒜_WZ − d𝒟𝒟†)) of a
/// constant-spectrum loop — the T → 0 limit of the mixed-state transport,
/// assembled from the pure-state side.
///
/// Per segment, 𝒜_WZ is sampled at the midpoint in the lab basis
/// (V·𝒜_eig·V†) and d𝒟𝒟† is the centered difference
/// (𝒟_{k+1} − 𝒟_k)·𝒟_mid†, skew-projected to remove the O(h³) Hermitian
/// discretization noise; the product is second-order accurate like the
/// mixed-state route it mirrors.
pub fn decomposition_holonomy(lp: &LoopPath) -> Result<CMatrix> {
    let d = unitary_family_deformation(lp)?;
    let b0h = model::eigensystem_analytic(lp.sample(0)).map_err(on_path)?.basis().adjoint();
    let half = Complex64::new(0.5, 0.0);
    let mut u = CMatrix::identity(4);
    for k in 0..lp.segments() {
        let mid = lp.midpoint(k);
        let v = model::eigensystem_analytic(&mid).map_err(on_path)?.basis();
        let a_eig = wz::wz_connection_analytic(&mid, &lp.increment(k)).map_err(on_path)?;
        let a_lab = v.mul(&a_eig.assemble()).mul(&v.adjoint());
        let d_mid = v.mul(&b0h);
        let term = d[k + 1].sub(&d[k]).mul(&d_mid.adjoint());
        let skew = term.sub(&term.adjoint()).scale(half);
        u = linalg::unitary_exp(&skew.sub(&a_lab))?.mul(&u);
    }
    Ok(u)
}

/// How the temperature ladder relates the mixed-state phase to the scalar
/// Wilczek–Zee phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Coldest rung within [`MATCH_TOLERANCE`] of θ_WZ and the ladder
    /// converges monotonically.
    Match,
    /// The ladder has settled (two coldest rungs agree within
    /// [`SETTLE_TOLERANCE`]) on a value away from θ_WZ.
    Mismatch,
    /// Neither: not settled, not monotone, or a phase lost its meaning.
    Undecided,
}

impl Verdict {
    /// Stable lowercase token for serialized tables.
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
            Verdict::Undecided => "undecided",
        }
    }
}

/// One rung of the temperature ladder.
#[derive(Clone, Copy, Debug)]
pub struct LadderRung {
    pub temperature: f64,
    /// Mixed-state phase of the loop at this temperature.
    pub theta_u: PhaseResult,
}

/// Everything [`correspondence`] determines about one loop.
#[derive(Clone, Debug)]
pub struct CorrespondenceReport {
    /// Human-readable loop descriptor.
    pub loop_label: String,
    /// Mixed-state phases down the temperature ladder, hottest first.
    pub ladder: Vec<LadderRung>,
    /// Scalar Wilczek–Zee phase of the ground doublet.
    pub theta_wz: PhaseResult,
    /// The coldest rung — the numerical stand-in for θ_U(T → 0).
    pub theta_u_limit: PhaseResult,
    pub verdict: Verdict,
    /// Whether the loop's spectrum is constant (unitary deformation).
    pub unitary_family: bool,
    /// Winding of the deformation, when the loop is a unitary family and
    /// the analytic frames exist along it.
    pub winding: Option<WindingReport>,
    /// max_k ‖[𝒜_WZ, d𝒟𝒟†]‖_F/‖Δ𝐑_k‖² — the obstruction to factorizing
    /// the decomposition holonomy into separate pure and deformation
    /// factors. Diagnostic only: the correspondence can hold without it
    /// vanishing, and with the frame-pinned deformation 𝒟 = V(t)V(0)† it
    /// happens to vanish on the equator (the cross-doublet overlaps there
    /// commute with the doublet connection) while generic sphere loops
    /// leave it O(1).
    pub commutator_max: Option<f64>,
}

/// The default descending temperature ladder, `scale`·{0.1 … 0.001}.
#[must_use]
pub fn default_ladder(scale: f64) -> Vec<f64> {
    [1e-1, 3e-2, 1e-2, 3e-3, 1e-3].iter().map(|f| f * scale).collect()
}

/// Winding and commutator diagnostics for a constant-spectrum loop. Any
/// failure here (chart poles along the loop, oversized winding steps)
/// degrades to "no diagnostic" at the call site rather than failing the
/// whole report.
fn correspondence_diagnostics(lp: &LoopPath) -> Result<(WindingReport, f64)> {
    let d = unitary_family_deformation(lp)?;
    let winding = winding_number(&d)?;
    let b0h = model::eigensystem_analytic(lp.sample(0)).map_err(on_path)?.basis().adjoint();
    let mut cmax = 0.0_f64;
    for k in 0..lp.segments() {
        let inc = lp.increment(k);
        let u2: f64 = inc.iter().map(|x| x * x).sum();
        if u2 <= 1e-300 {
            continue;
        }
        let mid = lp.midpoint(k);
        let v = model::eigensystem_analytic(&mid).map_err(on_path)?.basis();
        let a_lab = v
            .mul(&wz::wz_connection_analytic(&mid, &inc).map_err(on_path)?.assemble())
            .mul(&v.adjoint());
        let term = d[k + 1].sub(&d[k]).mul(&v.mul(&b0h).adjoint());
        cmax = cmax.max(a_lab.commutator(&term).frob() / u2);
    }
    Ok((winding, cmax))
}

/// Confronts the mixed-state phase of a loop with its pure-state scalar
/// phase down a descending temperature `ladder` (strictly positive,
/// strictly descending, at least four rungs — hot enough to see movement,
/// cold enough to call a limit).
///
/// The verdict is [`Verdict::Match`] when the coldest rung lands within
/// [`MATCH_TOLERANCE`] of θ_WZ and the circular distances shrink
/// monotonically down the ladder; [`Verdict::Mismatch`] when the two
/// coldest rungs agree with each other ([`SETTLE_TOLERANCE`]) yet sit away
/// from θ_WZ — the loop converged to something else, as the tight-binding
/// loop does inside its dome (π against a pure-state 0);
/// [`Verdict::Undecided`] otherwise. Rungs flagged near-critical are
/// excluded from the monotonicity evidence and can never settle a verdict.
///
/// For constant-spectrum loops the report adds the deformation winding κ
/// and the commutator obstruction; both are diagnostics of *why* the
/// correspondence holds, never part of the verdict.
///
/// Errors: [`Error::NonpositiveTemperature`] for a rung ≤ 0;
/// [`Error::DimensionMismatch`] for a short or non-descending ladder;
/// phase evaluations propagate their own failures.
pub fn correspondence(lp: &LoopPath, ladder: &[f64]) -> Result<CorrespondenceReport> {
    if ladder.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::NonpositiveTemperature);
    }
    if ladder.len() < 4 || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::DimensionMismatch);
    }
    let theta_wz = wz::scalar_wz_phase(lp)?;
    let mut rungs = Vec::with_capacity(ladder.len());
    for &t in ladder {
        rungs.push(LadderRung { temperature: t, theta_u: uhlmann::phase(lp, t)? });
    }
    let theta_u_limit = rungs.last().expect("ladder nonempty").theta_u;
    let second_coldest = rungs[rungs.len() - 2].theta_u;
    let settled = theta_u_limit.is_defined()
        && second_coldest.is_defined()
        && phase_distance(theta_u_limit.phase, second_coldest.phase) < SETTLE_TOLERANCE;
    let distances: Vec<f64> = rungs
        .iter()
        .filter(|r| r.theta_u.is_defined())
        .map(|r| phase_distance(r.theta_u.phase, theta_wz.phase))
        .collect();
    let monotone = distances.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    let comparable = theta_wz.is_defined() && theta_u_limit.is_defined();
    let limit_distance = phase_distance(theta_u_limit.phase, theta_wz.phase);
    let verdict = if comparable && monotone && limit_distance < MATCH_TOLERANCE {
        Verdict::Match
    } else if comparable && settled && limit_distance >= MATCH_TOLERANCE {
        Verdict::Mismatch
    } else {
        Verdict::Undecided
    };
    let unitary_family = is_unitary_family(lp);
    let (winding, commutator_max) = if unitary_family {
        match correspondence_diagnostics(lp) {
            Ok((w, c)) => (Some(w), Some(c)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(CorrespondenceReport {
        loop_label: lp.label(),
        ladder: rungs,
        theta_wz,
        theta_u_limit,
        verdict,
        unitary_family,
        winding,
        commutator_max,
    })
}
