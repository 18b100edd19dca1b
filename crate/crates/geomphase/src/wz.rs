//! Wilczek–Zee connection, holonomy and scalar phase of the degenerate
//! subspaces.
//!
//! Each doublet of H = RₐΓᵃ carries a non-Abelian connection
//! 𝒜_{±,ij} = ⟨ψᵢ|dψⱼ⟩ (anti-Hermitian 2×2; the convention absorbs the
//! usual factor of i so holonomies read 𝒫exp(−∮𝒜), matching the
//! mixed-state module). Because the full 4×4 connection is block-diagonal
//! in the two doublets, transport factorizes into U₊ ⊕ U₋; the physical
//! scalar phase of the ground doublet is
//!
//!   θ_WZ = arg Tr[(1/D)·P₋·U₋(C)],  D = 2,
//!
//! equivalently arg⟨W₋(0)|W₋(τ)⟩ with the pure-state amplitude
//! W₋ = (1/√D)·√P₋·𝒰 — the T → 0 shadow of the Uhlmann purification.
//!
//! Two routes to the connection are implemented:
//!
//! * [`wz_connection_analytic`] — closed-form matrix elements in the model's
//!   analytic eigenframes. With g = R₂dR₁ − R₁dR₂ − R₄dR₃ + R₃dR₄ and
//!   h = (R₁dR₄ − R₄dR₁ − R₂dR₃ + R₃dR₂) + i(R₁dR₃ − R₃dR₁ + R₂dR₄ − R₄dR₂),
//!   each block is [[g, h*], [h, −g]]/(2iR(R∓R₅)) — anti-Hermitian because
//!   conjugating flips both the numerator and the 2i, with poles only where
//!   the frames themselves degenerate (R₅ → ±R). Note dR₅ never appears:
//!   its contributions cancel exactly between the two components of each
//!   eigenvector.
//! * [`overlap_connection`] / [`wz_connection_numeric`] — the
//!   finite-difference overlap skew((F_k)†F_{k+1}) between consecutive
//!   orthonormal frames, gauge-agnostic and usable with eigensolver output
//!   once frames are made continuous by [`align_frame`] (polar correction
//!   of the overlap). In the fully aligned gauge the per-segment connection
//!   vanishes and the whole holonomy condenses into the closing fold that
//!   [`frame_holonomy`] applies.
//!
//! On the sphere family 𝒜_± = (1 ± cosθ)/(2i)·σ₁·dφ; around the equator
//! both doublets wind to U_± = −1₂, so θ_WZ = π. On the tight-binding kₓ
//! loop the connection vanishes identically and θ_WZ = 0 for every mass —
//! the pure-state phase is blind to the topological step that the
//! mixed-state phase sees at finite T.

use num_complex::Complex64;

use crate::linalg::{self, CMatrix};
use crate::model::{self, LoopPath, ParamPoint};
use crate::uhlmann::{on_path, PhaseResult};
use crate::{Error, Result, MIN_SEGMENTS};

/// Which degenerate doublet to transport.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subspace {
    /// The +R (excited) doublet, frame columns (ψ_a, ψ_b).
    Plus,
    /// The −R (ground) doublet, frame columns (ψ_c, ψ_d).
    Minus,
}

/// One sample of the Wilczek–Zee connection: both 2×2 blocks, each the
/// subspace connection contracted with a concrete tangent increment.
#[derive(Clone, Debug)]
pub struct WZConnectionSample {
    /// Block of the +R doublet.
    pub a_plus: CMatrix,
    /// Block of the −R doublet.
    pub a_minus: CMatrix,
}

impl WZConnectionSample {
    /// Wraps the blocks, enforcing 2×2 shape and anti-Hermiticity within
    /// 1e-10·(1 + ‖·‖_F) on each.
    pub fn new(a_plus: CMatrix, a_minus: CMatrix) -> Result<WZConnectionSample> {
        for block in [&a_plus, &a_minus] {
            if block.rows() != 2 || block.cols() != 2 {
                return Err(Error::DimensionMismatch);
            }
            if block.anti_hermitian_deviation() > 1e-10 * (1.0 + block.frob()) {
                return Err(Error::NotAntiHermitian);
            }
        }
        Ok(WZConnectionSample { a_plus, a_minus })
    }

    /// The block for one subspace.
    #[must_use]
    pub fn block(&self, subspace: Subspace) -> &CMatrix {
        match subspace {
            Subspace::Plus => &self.a_plus,
            Subspace::Minus => &self.a_minus,
        }
    }

    /// Full 4×4 connection in the analytic basis [ψ_c, ψ_d, ψ_a, ψ_b]:
    /// block-diagonal 𝒜₋ ⊕ 𝒜₊ by construction.
    #[must_use]
    pub fn assemble(&self) -> CMatrix {
        let mut a = CMatrix::zeros(4, 4);
        a.set_block(0, 0, &self.a_minus);
        a.set_block(2, 2, &self.a_plus);
        a
    }
}

/// Closed-form Wilczek–Zee connection at a point, contracted with `dp`.
///
/// Blocks are [[g, h*], [h, −g]]/(2iR(R∓R₅)) as in the module docs — the
/// upper sign (denominator R−R₅) belongs to the +R doublet. The diagonal is
/// purely imaginary, the second-row-first-column element carries h, and the
/// first-row-second-column element is its anti-Hermitian completion
/// h*/(2iR(R∓R₅)) — the placement 𝒜ᵢⱼ = ⟨ψᵢ|dψⱼ⟩ demands of the model's
/// frames (pinned by the frame-derivative test below; the sphere family
/// cannot distinguish the two placements because h is real along it).
///
/// Errors: [`Error::GapClosure`] at R ≈ 0, [`Error::GaugePole`] when
/// R₅ → ±R degenerates the frames.
pub fn wz_connection_analytic(p: &ParamPoint, dp: &[f64; 5]) -> Result<WZConnectionSample> {
    if p.gap_closed() {
        return Err(Error::GapClosure);
    }
    let r = p.norm();
    let [r1, r2, r3, r4, r5] = p.r;
    if r - r5 <= model::POLE_FLOOR * r || r + r5 <= model::POLE_FLOOR * r {
        return Err(Error::GaugePole);
    }
    let [d1, d2, d3, d4, _] = *dp;
    let g = r2 * d1 - r1 * d2 - r4 * d3 + r3 * d4;
    let h = Complex64::new(
        r1 * d4 - r4 * d1 - r2 * d3 + r3 * d2,
        r1 * d3 - r3 * d1 + r2 * d4 - r4 * d2,
    );
    let block = |denominator: f64| -> CMatrix {
        // x/(2i·den) = −i·x/(2·den)
        let s = 1.0 / (2.0 * denominator);
        let diag = Complex64::new(0.0, -g * s);
        let lower = Complex64::new(h.im * s, -h.re * s);
        CMatrix::from_rows(&[vec![diag, -lower.conj()], vec![lower, -diag]])
    };
    WZConnectionSample::new(block(r * (r - r5)), block(r * (r + r5)))
}

/// Discrete WZ connection increment between two consecutive orthonormal
/// 2-frames: the skew part (B − B†)/2 of the overlap B = F_prev†·F_next.
///
/// For frames sampled from a smooth gauge this equals the continuum
/// connection at the segment midpoint to O(Δt³) (so to O(Δt²) against the
/// segment-start value); for frames polar-aligned by [`align_frame`] it
/// vanishes identically and the holonomy moves into the closing fold.
///
/// Errors: [`Error::GaugeDiscontinuity`] when the overlap strays far from
/// the identity (‖B − 1‖_F > 0.5) — consecutive frames from different
/// branches, or a step too coarse to trust.
pub fn overlap_connection(prev: &CMatrix, next: &CMatrix) -> Result<CMatrix> {
    if prev.rows() != next.rows() || prev.cols() != next.cols() || prev.cols() > prev.rows() {
        return Err(Error::DimensionMismatch);
    }
    let b = prev.adjoint().mul(next);
    if linalg::frob_diff(&b, &CMatrix::identity(b.rows())) > 0.5 {
        return Err(Error::GaugeDiscontinuity);
    }
    Ok(b.sub(&b.adjoint()).scale(Complex64::new(0.5, 0.0)))
}

/// Both WZ blocks from consecutive frames of the two doublets.
pub fn wz_connection_numeric(
    prev_minus: &CMatrix,
    next_minus: &CMatrix,
    prev_plus: &CMatrix,
    next_plus: &CMatrix,
) -> Result<WZConnectionSample> {
    WZConnectionSample::new(
        overlap_connection(prev_plus, next_plus)?,
        overlap_connection(prev_minus, next_minus)?,
    )
}

/// Gauge-aligns `frame` against `reference`: F ← F·polar(F†·reference),
/// after which the overlap F†·reference is Hermitian positive — the
/// discrete parallel-transport gauge, free of arbitrary per-sample phases
/// and doublet rotations that an eigensolver leaves behind.
///
/// Errors: [`Error::GaugeDiscontinuity`] when the overlap is near-singular
/// (the frames barely span a common subspace).
pub fn align_frame(frame: &CMatrix, reference: &CMatrix) -> Result<CMatrix> {
    let overlap = frame.adjoint().mul(reference);
    let rotation = linalg::polar_unitary(&overlap).map_err(|e| match e {
        Error::RankDeficient => Error::GaugeDiscontinuity,
        other => other,
    })?;
    Ok(frame.mul(&rotation))
}

/// Path-ordered WZ holonomy of both doublets along a closed loop, from the
/// analytic connection sampled at segment midpoints.
#[derive(Clone, Debug)]
pub struct WZHolonomy {
    /// Transport unitary of the −R doublet.
    pub u_minus: CMatrix,
    /// Transport unitary of the +R doublet.
    pub u_plus: CMatrix,
    /// Number of segments folded into the products.
    pub steps: usize,
}

/// Computes both holonomy blocks in one sweep along the loop.
pub fn wz_holonomy_blocks(lp: &LoopPath) -> Result<WZHolonomy> {
    let n = lp.segments();
    let mut u_minus = CMatrix::identity(2);
    let mut u_plus = CMatrix::identity(2);
    let flip = Complex64::new(-1.0, 0.0);
    for k in 0..n {
        let sample =
            wz_connection_analytic(&lp.midpoint(k), &lp.increment(k)).map_err(on_path)?;
        u_minus = linalg::unitary_exp(&sample.a_minus.scale(flip))?.mul(&u_minus);
        u_plus = linalg::unitary_exp(&sample.a_plus.scale(flip))?.mul(&u_plus);
    }
    Ok(WZHolonomy { u_minus, u_plus, steps: n })
}

/// The 2×2 WZ holonomy of one doublet: 𝒫exp(−∮𝒜_±), unitary within 1e-9.
pub fn wz_holonomy(lp: &LoopPath, subspace: Subspace) -> Result<CMatrix> {
    let blocks = wz_holonomy_blocks(lp)?;
    Ok(match subspace {
        Subspace::Plus => blocks.u_plus,
        Subspace::Minus => blocks.u_minus,
    })
}

/// WZ holonomy straight from an explicit frame sequence (N+1 frames along
/// a closed loop, any gauge), for loops where no closed-form connection is
/// available.
///
/// Per segment the increment is [`overlap_connection`]; the product
/// ∏ exp(−𝒜_k) is then completed by the closing fold polar(F₀†·F_N), the
/// unitary that re-expresses the final gauge in the initial one. For a
/// single-valued smooth frame sequence the fold is the identity; for
/// sequentially [`align_frame`]-ed frames every 𝒜_k vanishes and the fold
/// alone carries the holonomy. Both routes agree with the analytic one to
/// O(Δt²).
pub fn frame_holonomy(frames: &[CMatrix]) -> Result<CMatrix> {
    if frames.len() < MIN_SEGMENTS + 1 {
        return Err(Error::TooFewSegments);
    }
    let width = frames[0].cols();
    let mut u = CMatrix::identity(width);
    for pair in frames.windows(2) {
        let a = overlap_connection(&pair[0], &pair[1])?;
        u = linalg::unitary_exp(&a.scale(Complex64::new(-1.0, 0.0)))?.mul(&u);
    }
    let overlap = frames[0].adjoint().mul(frames.last().expect("nonempty"));
    let fold = linalg::polar_unitary(&overlap).map_err(|e| match e {
        Error::RankDeficient => Error::GaugeDiscontinuity,
        other => other,
    })?;
    Ok(fold.mul(&u))
}

/// The analytic eigenframe of one doublet at every loop sample (N+1
/// entries, last = first up to the frames' smooth dependence on the
/// bitwise-closed samples). Single-valued by construction away from poles.
pub fn analytic_frame_path(lp: &LoopPath, subspace: Subspace) -> Result<Vec<CMatrix>> {
    lp.samples()
        .iter()
        .map(|p| {
            let frames = model::eigensystem_analytic(p).map_err(on_path)?;
            Ok(match subspace {
                Subspace::Plus => frames.plus,
                Subspace::Minus => frames.minus,
            })
        })
        .collect()
}

/// Eigensolver frames of one doublet at every loop sample, made
/// gauge-continuous by sequential polar alignment — the generic-loop lane
/// that needs no closed-form eigenvectors.
pub fn aligned_eig_frame_path(lp: &LoopPath, subspace: Subspace) -> Result<Vec<CMatrix>> {
    let columns = match subspace {
        Subspace::Minus => 0..2,
        Subspace::Plus => 2..4,
    };
    let mut out: Vec<CMatrix> = Vec::with_capacity(lp.samples().len());
    for p in lp.samples() {
        let eig = linalg::herm_eig(&model::hamiltonian(p))?;
        let frame = eig.vectors.block(0, columns.start, 4, 2);
        match out.last() {
            None => out.push(frame),
            Some(prev) => {
                let aligned = align_frame(&frame, prev)?;
                out.push(aligned);
            }
        }
    }
    Ok(out)
}

/// Scalar Wilczek–Zee phase of the ground doublet:
/// θ_WZ = arg Tr[(1/D)·P₋·U₋(C)] = arg[(1/2)·Tr U₋].
pub fn scalar_wz_phase(lp: &LoopPath) -> Result<PhaseResult> {
    let u = wz_holonomy(lp, Subspace::Minus)?;
    let dim = u.rows() as f64;
    Ok(PhaseResult::from_trace(u.trace() / dim))
}

/// Scalar WZ phase through the purification overlap ⟨W₋(0)|W₋(τ)⟩ with
/// W₋(0) = (1/√D)·√P₋ = P₋/√2 and W₋(τ) = W₋(0)·𝒢, where
/// 𝒢 = F₋U₋F₋† + F₊U₊F₊† is the assembled 4×4 transport at the loop start.
///
/// Algebraically this collapses to (1/2)·Tr U₋; its value as a check is
/// that P₋ comes from the Γ-matrix projector while the transport comes from
/// eigenframes — two representations that must cohere within 1e-8. The
/// overlap only uses the frames through P₋F₋ = F₋ and P₋F₊ = 0, so any
/// orthonormal frame pair serves: the analytic chart where defined, the
/// eigensolver's frames at its poles (e.g. the tight-binding loop base
/// point, where 𝐑 points along the fifth axis).
pub fn scalar_wz_phase_purified(lp: &LoopPath) -> Result<PhaseResult> {
    let blocks = wz_holonomy_blocks(lp)?;
    let start = lp.sample(0);
    let (f_minus, f_plus) = match model::eigensystem_analytic(start) {
        Ok(frames) => (frames.minus, frames.plus),
        Err(Error::GaugePole) => {
            let eig = linalg::herm_eig(&model::hamiltonian(start))?;
            (eig.vectors.block(0, 0, 4, 2), eig.vectors.block(0, 2, 4, 2))
        }
        Err(other) => return Err(other),
    };
    let transport = f_minus
        .mul(&blocks.u_minus)
        .mul(&f_minus.adjoint())
        .add(&f_plus.mul(&blocks.u_plus).mul(&f_plus.adjoint()));
    let w0 = model::projectors(start)?
        .minus
        .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let overlap = w0.adjoint().mul(&w0.mul(&transport)).trace();
    Ok(PhaseResult::from_trace(overlap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob_diff, unitary_exp};
    use crate::model::{analytic_state_derivatives, sphere_point, tb4d_point};
    use crate::uhlmann::Holonomy;
    use crate::phase_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_point(rng: &mut ChaCha8Rng) -> ParamPoint {
        loop {
            let mut r = [0.0; 5];
            for c in &mut r {
                *c = rng.gen_range(-1.0..1.0);
            }
            let p = ParamPoint::new(r);
            let norm = p.norm();
            if norm > 0.3 && norm - r[4].abs() > 0.2 * norm {
                return p;
            }
        }
    }

    fn random_increment(rng: &mut ChaCha8Rng) -> [f64; 5] {
        let mut d = [0.0; 5];
        for c in &mut d {
            *c = rng.gen_range(-1.0..1.0);
        }
        d
    }

    /// (1 ± cosθ)/(2i)·σ₁ per unit dφ.
    fn sphere_block_closed_form(theta: f64, upper: bool) -> CMatrix {
        let sign = if upper { 1.0 } else { -1.0 };
        let w = Complex64::new(0.0, -(1.0 + sign * theta.cos()) / 2.0);
        CMatrix::from_rows(&[vec![Complex64::new(0.0, 0.0), w], vec![w, Complex64::new(0.0, 0.0)]])
    }

    /// d𝐑/dφ on the sphere family.
    fn sphere_phi_tangent(theta: f64, phi: f64, radius: f64) -> [f64; 5] {
        let s = radius / 2f64.sqrt() * theta.sin();
        [-s * phi.sin(), s * phi.cos(), -s * phi.sin(), s * phi.cos(), 0.0]
    }

    /// A smooth closed loop exercising all five components: a wobbling
    /// circle θ(t) = θ₀ + a·sin t, φ = t on the sphere of radius `r`.
    fn wobble_loop(n: usize) -> LoopPath {
        let mut samples = Vec::with_capacity(n + 1);
        for j in 0..n {
            let t = 2.0 * PI * j as f64 / n as f64;
            samples.push(sphere_point(PI / 3.0 + 0.25 * t.sin(), t, 1.2));
        }
        samples.push(samples[0]);
        LoopPath::explicit(samples).unwrap()
    }

    #[test]
    fn analytic_connection_matches_frame_derivatives() {
        // The defining property 𝒜ᵢⱼ = ⟨ψᵢ|dψⱼ⟩, with frames and their
        // exact derivatives from the model — settles every sign, the
        // denominators, and the off-diagonal conjugation at once.
        let mut r = rng(71);
        for _ in 0..100 {
            let p = random_point(&mut r);
            let d = random_increment(&mut r);
            let fd = analytic_state_derivatives(&p, &d).unwrap();
            let sample = wz_connection_analytic(&p, &d).unwrap();
            let b_minus = fd.frames.minus.adjoint().mul(&fd.dminus);
            let b_plus = fd.frames.plus.adjoint().mul(&fd.dplus);
            let scale = 1.0 + b_minus.frob() + b_plus.frob();
            assert!(frob_diff(&sample.a_minus, &b_minus) < 1e-12 * scale);
            assert!(frob_diff(&sample.a_plus, &b_plus) < 1e-12 * scale);
        }
    }

    #[test]
    fn sphere_family_connection_closed_form() {
        let (theta, phi, radius) = (0.9, 2.2, 1.3);
        let p = sphere_point(theta, phi, radius);
        let dp = sphere_phi_tangent(theta, phi, radius);
        let sample = wz_connection_analytic(&p, &dp).unwrap();
        assert!(frob_diff(&sample.a_plus, &sphere_block_closed_form(theta, true)) < 1e-12);
        assert!(frob_diff(&sample.a_minus, &sphere_block_closed_form(theta, false)) < 1e-12);

        // Equator: 𝒜₋ = −(i/2)σ₁ per unit dφ.
        let p = sphere_point(PI / 2.0, 0.4, 1.0);
        let dp = sphere_phi_tangent(PI / 2.0, 0.4, 1.0);
        let sample = wz_connection_analytic(&p, &dp).unwrap();
        let half_i = Complex64::new(0.0, -0.5);
        assert!((sample.a_minus[(0, 1)] - half_i).norm() < 1e-13);
        assert!((sample.a_minus[(1, 0)] - half_i).norm() < 1e-13);
        assert!(sample.a_minus[(0, 0)].norm() < 1e-13);
    }

    #[test]
    fn tb4d_connection_vanishes() {
        let (m, kx) = (-2.2, 0.7);
        let p = tb4d_point(&[kx, 0.0, 0.0, 0.0], m);
        let dp = [kx.cos(), 0.0, 0.0, 0.0, -kx.sin()];
        let sample = wz_connection_analytic(&p, &dp).unwrap();
        assert!(sample.a_minus.max_abs() < 1e-15);
        assert!(sample.a_plus.max_abs() < 1e-15);
    }

    #[test]
    fn analytic_connection_error_paths() {
        let origin = ParamPoint::new([0.0; 5]);
        let d = [1.0, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(wz_connection_analytic(&origin, &d), Err(Error::GapClosure)));
        let pole = ParamPoint::new([0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(wz_connection_analytic(&pole, &d), Err(Error::GaugePole)));
        let south = ParamPoint::new([0.0, 0.0, 0.0, 0.0, -1.0]);
        assert!(matches!(wz_connection_analytic(&south, &d), Err(Error::GaugePole)));
    }

    #[test]
    fn assembled_connection_is_block_diagonal() {
        let mut r = rng(73);
        let p = random_point(&mut r);
        let d = random_increment(&mut r);
        let sample = wz_connection_analytic(&p, &d).unwrap();
        let a = sample.assemble();
        assert!(a.block(0, 2, 2, 2).max_abs() == 0.0);
        assert!(a.block(2, 0, 2, 2).max_abs() == 0.0);
        assert!(frob_diff(&a.block(0, 0, 2, 2), &sample.a_minus) == 0.0);
        assert!(a.anti_hermitian_deviation() < 1e-14 * (1.0 + a.frob()));
    }

    #[test]
    fn overlap_connection_identical_frames_zero() {
        let frames = model::eigensystem_analytic(&ParamPoint::new([0.4, 0.1, -0.2, 0.3, 0.5]))
            .unwrap();
        let a = overlap_connection(&frames.minus, &frames.minus).unwrap();
        assert!(a.max_abs() < 1e-14);
    }

    #[test]
    fn overlap_connection_recovers_small_rotation() {
        // next = prev·exp(εX): the skew overlap must return εX to O(ε³).
        let frames = model::eigensystem_analytic(&ParamPoint::new([0.4, 0.1, -0.2, 0.3, 0.5]))
            .unwrap();
        let eps = 1e-3;
        let x = CMatrix::from_rows(&[
            vec![Complex64::new(0.0, 0.7), Complex64::new(0.3, -0.4)],
            vec![Complex64::new(-0.3, -0.4), Complex64::new(0.0, -0.2)],
        ]);
        let rot = unitary_exp(&x.scale(Complex64::new(eps, 0.0))).unwrap();
        let next = frames.minus.mul(&rot);
        let a = overlap_connection(&frames.minus, &next).unwrap();
        assert!(frob_diff(&a, &x.scale(Complex64::new(eps, 0.0))) < 1e-8);
    }

    #[test]
    fn overlap_connection_rejects_branch_jumps() {
        let frames = model::eigensystem_analytic(&ParamPoint::new([0.4, 0.1, -0.2, 0.3, 0.5]))
            .unwrap();
        // Opposite doublets barely overlap: that is a branch jump, not a
        // step.
        assert!(matches!(
            overlap_connection(&frames.minus, &frames.plus),
            Err(Error::GaugeDiscontinuity)
        ));
        assert!(matches!(
            align_frame(&frames.minus, &frames.plus),
            Err(Error::GaugeDiscontinuity)
        ));
    }

    #[test]
    fn numeric_connection_tracks_analytic_along_equator() {
        let lp = LoopPath::equator(1.0, 2048).unwrap();
        let frames: Vec<_> = lp
            .samples()
            .iter()
            .map(|p| model::eigensystem_analytic(p).unwrap())
            .collect();
        let mut worst = 0.0f64;
        for k in 0..lp.segments() {
            let numeric = wz_connection_numeric(
                &frames[k].minus,
                &frames[k + 1].minus,
                &frames[k].plus,
                &frames[k + 1].plus,
            )
            .unwrap();
            let analytic = wz_connection_analytic(lp.sample(k), &lp.increment(k)).unwrap();
            worst = worst
                .max(frob_diff(&numeric.a_minus, &analytic.a_minus))
                .max(frob_diff(&numeric.a_plus, &analytic.a_plus));
        }
        assert!(worst < 1e-5, "numeric overlap connection drifted: {worst}");
    }

    #[test]
    fn equator_holonomy_is_minus_identity_in_both_doublets() {
        let lp = LoopPath::equator(1.0, 4096).unwrap();
        let blocks = wz_holonomy_blocks(&lp).unwrap();
        let minus_one = CMatrix::identity(2).scale(Complex64::new(-1.0, 0.0));
        assert!(frob_diff(&blocks.u_minus, &minus_one) < 1e-6);
        assert!(frob_diff(&blocks.u_plus, &minus_one) < 1e-6);
        let defect = |u: &CMatrix| frob_diff(&u.adjoint().mul(u), &CMatrix::identity(2));
        assert!(defect(&blocks.u_minus) < 1e-9);
        assert!(defect(&blocks.u_plus) < 1e-9);
    }

    #[test]
    fn tb4d_holonomy_is_identity() {
        for m in [-3.0, -2.5] {
            let lp = LoopPath::tb4d_kx(m, 512).unwrap();
            let u = wz_holonomy(&lp, Subspace::Minus).unwrap();
            assert!(frob_diff(&u, &CMatrix::identity(2)) < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn constant_loop_holonomy_is_identity() {
        let p = ParamPoint::new([0.2, -0.4, 0.1, 0.3, 0.6]);
        let lp = LoopPath::explicit(vec![p; 9]).unwrap();
        let u = wz_holonomy(&lp, Subspace::Minus).unwrap();
        assert!(frob_diff(&u, &CMatrix::identity(2)) < 1e-13);
        let res = scalar_wz_phase(&lp).unwrap();
        assert!(res.is_defined());
        assert!(phase_distance(res.phase, 0.0) < 1e-12);
    }

    #[test]
    fn scalar_phase_values() {
        // Equator: U₋ = −1₂ → θ_WZ = arg(−1) = π with full visibility.
        let lp = LoopPath::equator(1.0, 4096).unwrap();
        let res = scalar_wz_phase(&lp).unwrap();
        assert!(res.is_defined());
        assert!(phase_distance(res.phase, PI) < 1e-6);
        assert!((res.magnitude - 1.0).abs() < 1e-6);

        // Tight-binding loop: 𝒜₋ = 0 → θ_WZ = 0 at any mass.
        for m in [-3.0, -2.5, -1.2] {
            let lp = LoopPath::tb4d_kx(m, 512).unwrap();
            let res = scalar_wz_phase(&lp).unwrap();
            assert!(res.is_defined());
            assert!(phase_distance(res.phase, 0.0) < 1e-12, "m = {m}");
            assert!((res.magnitude - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn purified_overlap_agrees_with_trace_form() {
        let cases = [
            LoopPath::equator(1.0, 1024).unwrap(),
            LoopPath::tb4d_kx(-2.5, 512).unwrap(),
            wobble_loop(1024),
        ];
        for lp in &cases {
            let trace_form = scalar_wz_phase(lp).unwrap();
            let purified = scalar_wz_phase_purified(lp).unwrap();
            assert!(
                (trace_form.trace_value - purified.trace_value).norm() < 1e-8,
                "purified overlap drifted from (1/2)·Tr U₋"
            );
            assert!(phase_distance(trace_form.phase, purified.phase) < 1e-8);
        }
    }

    #[test]
    fn wobble_loop_holonomy_converges_and_is_unitary() {
        // No closed form here: check internal convergence (second order)
        // and unitarity instead.
        let u = |n: usize| wz_holonomy(&wobble_loop(n), Subspace::Minus).unwrap();
        let (u256, u512, u1024) = (u(256), u(512), u(1024));
        let d1 = frob_diff(&u256, &u512);
        let d2 = frob_diff(&u512, &u1024);
        assert!(d1 / d2 >= 3.5, "got ratio {}", d1 / d2);
        assert!(frob_diff(&u1024.adjoint().mul(&u1024), &CMatrix::identity(2)) < 1e-9);
    }

    #[test]
    fn gauge_covariance_under_fixed_rotation() {
        let lp = LoopPath::equator(1.0, 512).unwrap();
        let frames = analytic_frame_path(&lp, Subspace::Minus).unwrap();
        let base = frame_holonomy(&frames).unwrap();

        let x = CMatrix::from_rows(&[
            vec![Complex64::new(0.0, 0.4), Complex64::new(0.8, -0.3)],
            vec![Complex64::new(-0.8, -0.3), Complex64::new(0.0, -0.9)],
        ]);
        let g = unitary_exp(&x).unwrap();
        let rotated: Vec<_> = frames.iter().map(|f| f.mul(&g)).collect();
        let conjugated = frame_holonomy(&rotated).unwrap();

        let expected = g.adjoint().mul(&base).mul(&g);
        assert!(frob_diff(&conjugated, &expected) < 1e-9);
        assert!((conjugated.trace() - base.trace()).norm() < 1e-9);
    }

    #[test]
    fn frame_routes_agree_with_analytic_holonomy() {
        let lp = LoopPath::equator(1.0, 2048).unwrap();
        let analytic = wz_holonomy(&lp, Subspace::Minus).unwrap();

        // Smooth single-valued frames: fold is the identity.
        let smooth = frame_holonomy(&analytic_frame_path(&lp, Subspace::Minus).unwrap()).unwrap();
        assert!(frob_diff(&smooth, &analytic) < 1e-5);

        // Eigensolver frames in the polar-aligned gauge: the holonomy
        // lives in the closing fold.
        let aligned = frame_holonomy(&aligned_eig_frame_path(&lp, Subspace::Minus).unwrap())
            .unwrap();
        assert!(frob_diff(&aligned, &analytic) < 1e-5);
    }

    #[test]
    fn wz_block_shares_wire_format() {
        let lp = LoopPath::equator(1.0, 512).unwrap();
        let u = wz_holonomy(&lp, Subspace::Minus).unwrap();
        let hol = Holonomy { matrix: u, steps: 512 };
        let text = hol.to_json();
        assert!(text.starts_with("{\"dim\":2,\"steps\":512,"));
        let back = Holonomy::from_json(&text).unwrap();
        assert!(frob_diff(&back.matrix, &hol.matrix) == 0.0);
    }

    #[test]
    fn connection_sample_rejects_bad_blocks() {
        assert!(matches!(
            WZConnectionSample::new(CMatrix::identity(2), CMatrix::zeros(2, 2)),
            Err(Error::NotAntiHermitian)
        ));
        assert!(matches!(
            WZConnectionSample::new(CMatrix::zeros(3, 3), CMatrix::zeros(2, 2)),
            Err(Error::DimensionMismatch)
        ));
    }
}
