//! The four-level model: Γ matrices, spectrum, thermal states, and loops.
//!
//! The Hamiltonian is H(𝐑) = Σₐ Rₐ Γᵃ with the Clifford quintet
//!
//! ```text
//! Γ¹ = σ₁⊗σ₁,  Γ² = σ₁⊗σ₂,  Γ³ = σ₁⊗σ₃,  Γ⁴ = σ₂⊗1₂,  Γ⁵ = σ₃⊗1₂,
//! ```
//!
//! so {Γᵃ, Γᵇ} = 2δ_{ab}·1₄, H² = R²·1₄ and the spectrum is ±R = ±‖𝐑‖,
//! each level twofold degenerate. Explicit eigenframes:
//!
//! ```text
//! ψ_{a,c} = (−R₃+iR₄, −R₁−iR₂, R₅∓R, 0)ᵀ / √(2R(R∓R₅)),
//! ψ_{b,d} = (−R₁+iR₂, R₃+iR₄, 0, R₅∓R)ᵀ / √(2R(R∓R₅)),
//! ```
//!
//! with (a, b) at +R and (c, d) at −R. The frame is smooth except where its
//! normalization √(2R(R∓R₅)) vanishes — the coordinate poles R₅ → ±R — and
//! those points are refused ([`Error::GaugePole`]) rather than patched.
//!
//! Thermal equilibrium at temperature T (ħ = k_B = 1) is
//! ρ = (1₄ − tanh(R/T)·R̂ₐΓᵃ)/4 = λ₊P₊ + λ₋P₋ with doublet weights
//! λ± = e^{∓R/T}/(4cosh(R/T)).
//!
//! Two loop families cover the analytic examples: a great circle on the
//! parameter sphere R₁=R₃=(R/√2)sinθcosφ, R₂=R₄=(R/√2)sinθsinφ, R₅=Rcosθ
//! at θ = π/2, and the kₓ circle of the four-dimensional tight-binding
//! model R = (sin kₓ, sin k_y, sin k_z, sin k_u, m + Σ_α cos k_α). Explicit
//! point lists complete the set.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::linalg::{CMatrix, C_ONE, C_ZERO};
use crate::{Error, Result, MIN_SEGMENTS};

/// Points with R below this multiple of the largest |Rₐ| count as gap
/// closures (absolute guard [`GAP_FLOOR_ABS`] for the all-zero vector).
pub const GAP_FLOOR: f64 = 1e-8;
/// Absolute backstop for [`GAP_FLOOR`].
pub const GAP_FLOOR_ABS: f64 = 1e-300;
/// The analytic eigenframe is refused when R ∓ R₅ ≤ [`POLE_FLOOR`]·R.
pub const POLE_FLOOR: f64 = 1e-8;

/// A point 𝐑 = (R₁, …, R₅) in parameter space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamPoint {
    pub r: [f64; 5],
}

impl ParamPoint {
    #[must_use]
    pub fn new(r: [f64; 5]) -> Self {
        ParamPoint { r }
    }

    /// R = ‖𝐑‖, half the spectral gap.
    #[must_use]
    pub fn norm(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[must_use]
    pub fn max_component(&self) -> f64 {
        self.r.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Chord midpoint with `other`.
    #[must_use]
    pub fn midpoint_with(&self, other: &ParamPoint) -> ParamPoint {
        let mut r = [0.0; 5];
        for a in 0..5 {
            r[a] = 0.5 * (self.r[a] + other.r[a]);
        }
        ParamPoint { r }
    }

    /// Component-wise difference `other − self`.
    #[must_use]
    pub fn delta_to(&self, other: &ParamPoint) -> [f64; 5] {
        let mut d = [0.0; 5];
        for a in 0..5 {
            d[a] = other.r[a] - self.r[a];
        }
        d
    }

    fn bits(&self) -> [u64; 5] {
        self.r.map(f64::to_bits)
    }

    /// True when the spectral gap at this point is numerically closed.
    #[must_use]
    pub fn gap_closed(&self) -> bool {
        let r = self.norm();
        r <= GAP_FLOOR * self.max_component() || r <= GAP_FLOOR_ABS
    }
}

/// The five Γ matrices, in order Γ¹…Γ⁵.
pub fn gamma_matrices() -> &'static [CMatrix; 5] {
    static GAMMAS: OnceLock<[CMatrix; 5]> = OnceLock::new();
    GAMMAS.get_or_init(|| {
        let c = Complex64::new;
        let sigma1 = CMatrix::from_rows(&[vec![C_ZERO, C_ONE], vec![C_ONE, C_ZERO]]);
        let sigma2 = CMatrix::from_rows(&[vec![C_ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), C_ZERO]]);
        let sigma3 = CMatrix::from_rows(&[vec![C_ONE, C_ZERO], vec![C_ZERO, c(-1.0, 0.0)]]);
        let one2 = CMatrix::identity(2);
        [
            sigma1.kron(&sigma1),
            sigma1.kron(&sigma2),
            sigma1.kron(&sigma3),
            sigma2.kron(&one2),
            sigma3.kron(&one2),
        ]
    })
}

/// H(𝐑) = Σₐ Rₐ Γᵃ.
#[must_use]
pub fn hamiltonian(p: &ParamPoint) -> CMatrix {
    let gammas = gamma_matrices();
    let mut h = CMatrix::zeros(4, 4);
    for a in 0..5 {
        if p.r[a] != 0.0 {
            h = h.add(&gammas[a].scale(Complex64::new(p.r[a], 0.0)));
        }
    }
    h
}

/// The analytic eigenframes of H(𝐑): columns (ψ_c, ψ_d) spanning the −R
/// (ground) doublet and (ψ_a, ψ_b) spanning the +R doublet.
///
/// Wherever a 4×4 basis is assembled from these frames, the column order is
/// ascending in energy: [ψ_c, ψ_d, ψ_a, ψ_b].
#[derive(Clone, Debug)]
pub struct AnalyticFrames {
    /// R = ‖𝐑‖; the eigenvalues are ±R.
    pub energy: f64,
    /// 4×2 frame of the −R doublet, columns ψ_c, ψ_d.
    pub minus: CMatrix,
    /// 4×2 frame of the +R doublet, columns ψ_a, ψ_b.
    pub plus: CMatrix,
}

impl AnalyticFrames {
    /// Full 4×4 unitary basis, columns [ψ_c, ψ_d, ψ_a, ψ_b].
    #[must_use]
    pub fn basis(&self) -> CMatrix {
        let mut v = CMatrix::zeros(4, 4);
        v.set_block(0, 0, &self.minus);
        v.set_block(0, 2, &self.plus);
        v
    }
}

fn check_point(p: &ParamPoint) -> Result<f64> {
    if p.gap_closed() {
        return Err(Error::GapClosure);
    }
    Ok(p.norm())
}

fn check_poles(p: &ParamPoint, r: f64) -> Result<()> {
    if r - p.r[4] <= POLE_FLOOR * r || r + p.r[4] <= POLE_FLOOR * r {
        return Err(Error::GaugePole);
    }
    Ok(())
}

/// Eigenframes from the closed-form expressions; see the module docs.
pub fn eigensystem_analytic(p: &ParamPoint) -> Result<AnalyticFrames> {
    let r = check_point(p)?;
    check_poles(p, r)?;
    let [r1, r2, r3, r4, r5] = p.r;
    let c = Complex64::new;
    // branch sign +1 for the +R pair (a, b), −1 for the −R pair (c, d)
    let pair = |branch: f64| -> (Vec<Complex64>, Vec<Complex64>) {
        let n = 1.0 / (2.0 * r * (r - branch * r5)).sqrt();
        let first = vec![
            c(-r3 * n, r4 * n),
            c(-r1 * n, -r2 * n),
            c((r5 - branch * r) * n, 0.0),
            C_ZERO,
        ];
        let second = vec![
            c(-r1 * n, r2 * n),
            c(r3 * n, r4 * n),
            C_ZERO,
            c((r5 - branch * r) * n, 0.0),
        ];
        (first, second)
    };
    let (psi_a, psi_b) = pair(1.0);
    let (psi_c, psi_d) = pair(-1.0);
    Ok(AnalyticFrames {
        energy: r,
        minus: CMatrix::from_columns(&[psi_c, psi_d]),
        plus: CMatrix::from_columns(&[psi_a, psi_b]),
    })
}

/// Analytic frames together with their exact directional derivatives along
/// a tangent d𝐑 (the derivative of the closed-form eigenvectors, contracted
/// with d𝐑 — not a finite difference).
#[derive(Clone, Debug)]
pub struct FrameDerivatives {
    pub frames: AnalyticFrames,
    /// Columns dψ_c, dψ_d.
    pub dminus: CMatrix,
    /// Columns dψ_a, dψ_b.
    pub dplus: CMatrix,
}

impl FrameDerivatives {
    /// d of [`AnalyticFrames::basis`]: columns [dψ_c, dψ_d, dψ_a, dψ_b].
    #[must_use]
    pub fn dbasis(&self) -> CMatrix {
        let mut v = CMatrix::zeros(4, 4);
        v.set_block(0, 0, &self.dminus);
        v.set_block(0, 2, &self.dplus);
        v
    }
}

/// Differentiates the closed-form eigenvectors along `dp`.
///
/// Writing ψ = n·v with n = (2R(R∓R₅))^{−1/2} and v the unnormalized
/// column, dψ = dn·v + n·dv with dn = −n³·[(2R∓R₅)dR ∓ R·dR₅] and
/// dR = R̂·d𝐑.
pub fn analytic_state_derivatives(p: &ParamPoint, dp: &[f64; 5]) -> Result<FrameDerivatives> {
    let frames = eigensystem_analytic(p)?;
    let r = frames.energy;
    let [r1, r2, r3, r4, r5] = p.r;
    let [d1, d2, d3, d4, d5] = *dp;
    let dr = p.r.iter().zip(dp).map(|(a, b)| a * b).sum::<f64>() / r;
    let c = Complex64::new;
    let pair = |branch: f64| -> (Vec<Complex64>, Vec<Complex64>) {
        let n = 1.0 / (2.0 * r * (r - branch * r5)).sqrt();
        let dn = -n * n * n * ((2.0 * r - branch * r5) * dr - branch * r * d5);
        let dlast = r5 - branch * r;
        let ddlast = d5 - branch * dr;
        // dψ = dn·v + n·dv, column by column.
        let dfirst = vec![
            c(-r3, r4) * dn + c(-d3, d4) * n,
            c(-r1, -r2) * dn + c(-d1, -d2) * n,
            c(dlast, 0.0) * dn + c(ddlast, 0.0) * n,
            C_ZERO,
        ];
        let dsecond = vec![
            c(-r1, r2) * dn + c(-d1, d2) * n,
            c(r3, r4) * dn + c(d3, d4) * n,
            C_ZERO,
            c(dlast, 0.0) * dn + c(ddlast, 0.0) * n,
        ];
        (dfirst, dsecond)
    };
    let (da, db) = pair(1.0);
    let (dc, dd) = pair(-1.0);
    Ok(FrameDerivatives {
        frames,
        dminus: CMatrix::from_columns(&[dc, dd]),
        dplus: CMatrix::from_columns(&[da, db]),
    })
}

/// The spectral projectors of H(𝐑).
#[derive(Clone, Debug)]
pub struct Projectors {
    /// P₊ = (1₄ + R̂ₐΓᵃ)/2, onto the +R doublet.
    pub plus: CMatrix,
    /// P₋ = (1₄ − R̂ₐΓᵃ)/2, onto the −R doublet.
    pub minus: CMatrix,
}

/// P± = (1₄ ± R̂ₐΓᵃ)/2 from the Γ representation (no diagonalization).
pub fn projectors(p: &ParamPoint) -> Result<Projectors> {
    let r = check_point(p)?;
    let unit_h = hamiltonian(p).scale(Complex64::new(1.0 / r, 0.0));
    let half = Complex64::new(0.5, 0.0);
    let eye = CMatrix::identity(4);
    Ok(Projectors {
        plus: eye.add(&unit_h).scale(half),
        minus: eye.sub(&unit_h).scale(half),
    })
}

/// χ(x) = 1 − sech(x), the thermal weight that scales the mixed-state
/// connection; χ(0) = 0 (pure mixing limit T → ∞), χ(∞) = 1 (ground state).
///
/// Evaluated as 2·sinh²(x/2)/cosh(x) for small |x| to avoid the 1 − 1
/// cancellation; for large |x|, cosh overflows to +inf and the expression
/// saturates cleanly at 1.
#[must_use]
pub fn thermal_weight(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        let s = (0.5 * x).sinh();
        2.0 * s * s / x.cosh()
    } else {
        1.0 - 1.0 / x.cosh()
    }
}

/// Thermal equilibrium state at temperature T > 0.
#[derive(Clone, Debug)]
pub struct ThermalState {
    pub rho: CMatrix,
    pub temperature: f64,
    /// Weight e^{−R/T}/(4cosh(R/T)) of each +R state; underflows to 0 below
    /// T ≈ R/370, where ρ is the ground-state projector to working precision.
    pub lambda_plus: f64,
    /// Weight e^{+R/T}/(4cosh(R/T)) of each −R state.
    pub lambda_minus: f64,
    /// Z = 4cosh(R/T); saturates to +inf below T ≈ R/709.
    pub partition: f64,
}

/// ρ = (1₄ − tanh(R/T)·R̂ₐΓᵃ)/4.
pub fn thermal_density(p: &ParamPoint, temperature: f64) -> Result<ThermalState> {
    if !(temperature > 0.0) {
        return Err(Error::NonpositiveTemperature);
    }
    let r = check_point(p)?;
    let x = r / temperature;
    let t = x.tanh();
    let quarter = Complex64::new(0.25, 0.0);
    let unit_h = hamiltonian(p).scale(Complex64::new(1.0 / r, 0.0));
    let rho = CMatrix::identity(4).sub(&unit_h.scale(Complex64::new(t, 0.0))).scale(quarter);
    // Overflow-safe doublet weights: λ₊ = 1/(2(e^{2x}+1)), λ₋ = 1/(2(1+e^{−2x})).
    let lambda_plus = 0.5 / ((2.0 * x).exp() + 1.0);
    let lambda_minus = 0.5 / (1.0 + (-2.0 * x).exp());
    Ok(ThermalState {
        rho,
        temperature,
        lambda_plus,
        lambda_minus,
        partition: 4.0 * x.cosh(),
    })
}

/// dρ along `dp` at fixed T, from the closed form:
/// dρ = −[sech²(x)·(dR/T)·R̂ₐ + tanh(x)·dR̂ₐ]·Γᵃ/4 with x = R/T.
pub fn thermal_density_derivative(p: &ParamPoint, dp: &[f64; 5], temperature: f64) -> Result<CMatrix> {
    if !(temperature > 0.0) {
        return Err(Error::NonpositiveTemperature);
    }
    let r = check_point(p)?;
    let x = r / temperature;
    let t = x.tanh();
    let sech = 1.0 / x.cosh();
    let dr = p.r.iter().zip(dp).map(|(a, b)| a * b).sum::<f64>() / r;
    let gammas = gamma_matrices();
    let mut drho = CMatrix::zeros(4, 4);
    for a in 0..5 {
        let rhat = p.r[a] / r;
        let drhat = dp[a] / r - p.r[a] * dr / (r * r);
        let coeff = -0.25 * (sech * sech * (dr / temperature) * rhat + t * drhat);
        if coeff != 0.0 {
            drho = drho.add(&gammas[a].scale(Complex64::new(coeff, 0.0)));
        }
    }
    Ok(drho)
}

/// Point on the parameter sphere:
/// R₁ = R₃ = (R/√2)sinθcosφ, R₂ = R₄ = (R/√2)sinθsinφ, R₅ = Rcosθ.
#[must_use]
pub fn sphere_point(theta: f64, phi: f64, radius: f64) -> ParamPoint {
    let s = radius / std::f64::consts::SQRT_2 * theta.sin();
    ParamPoint::new([
        s * phi.cos(),
        s * phi.sin(),
        s * phi.cos(),
        s * phi.sin(),
        radius * theta.cos(),
    ])
}

/// Momentum-space point of the four-dimensional tight-binding model:
/// R = (sin kₓ, sin k_y, sin k_z, sin k_u, m + Σ_α cos k_α).
#[must_use]
pub fn tb4d_point(k: &[f64; 4], m: f64) -> ParamPoint {
    ParamPoint::new([
        k[0].sin(),
        k[1].sin(),
        k[2].sin(),
        k[3].sin(),
        m + k.iter().map(|ka| ka.cos()).sum::<f64>(),
    ])
}

/// Which generator produced a loop (explicit loops carry no generator).
#[derive(Clone, Debug, PartialEq)]
pub enum LoopFamily {
    /// Great circle θ = π/2 on the sphere of the given radius, φ: 0 → 2π.
    Equator { radius: f64 },
    /// kₓ: 0 → 2π at k_y = k_z = k_u = 0 and fixed mass m.
    Tb4dKx { m: f64 },
    /// Hand-built or loaded point list.
    Explicit,
}

/// A closed, discretized loop in parameter space: N+1 samples with
/// samples[0] = samples[N] bitwise, uniform in the family parameter.
#[derive(Clone, Debug)]
pub struct LoopPath {
    family: LoopFamily,
    samples: Vec<ParamPoint>,
    /// Family parameter (φ or kₓ) per sample; `None` for explicit loops.
    angles: Option<Vec<f64>>,
}

impl LoopPath {
    /// Equator loop of the sphere family with N segments.
    pub fn equator(radius: f64, n: usize) -> Result<LoopPath> {
        if n < MIN_SEGMENTS {
            return Err(Error::TooFewSegments);
        }
        if !(radius > GAP_FLOOR_ABS) {
            return Err(Error::GapClosure);
        }
        let theta = std::f64::consts::FRAC_PI_2;
        let mut samples = Vec::with_capacity(n + 1);
        let mut angles = Vec::with_capacity(n + 1);
        for j in 0..n {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            samples.push(sphere_point(theta, phi, radius));
            angles.push(phi);
        }
        samples.push(samples[0]);
        angles.push(2.0 * std::f64::consts::PI);
        Ok(LoopPath { family: LoopFamily::Equator { radius }, samples, angles: Some(angles) })
    }

    /// kₓ loop of the tight-binding family with N segments.
    ///
    /// On this loop R(kₓ)² = a² + 2a·cos kₓ + 1 with a = m + 3, so the
    /// smallest gap along the continuum loop is ‖a| − 1|; masses where it
    /// closes (|m + 3| = 1) are rejected up front rather than left to blow
    /// up at whichever discrete midpoint lands nearest the closure.
    pub fn tb4d_kx(m: f64, n: usize) -> Result<LoopPath> {
        if n < MIN_SEGMENTS {
            return Err(Error::TooFewSegments);
        }
        let a = m + 3.0;
        if (a.abs() - 1.0).abs() <= GAP_FLOOR * (a.abs() + 1.0) {
            return Err(Error::GapClosureOnPath);
        }
        let mut samples = Vec::with_capacity(n + 1);
        let mut angles = Vec::with_capacity(n + 1);
        for j in 0..n {
            let kx = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            samples.push(tb4d_point(&[kx, 0.0, 0.0, 0.0], m));
            angles.push(kx);
        }
        samples.push(samples[0]);
        angles.push(2.0 * std::f64::consts::PI);
        Ok(LoopPath { family: LoopFamily::Tb4dKx { m }, samples, angles: Some(angles) })
    }

    /// Wrap an explicit sample list (N+1 points, closed bitwise).
    pub fn explicit(samples: Vec<ParamPoint>) -> Result<LoopPath> {
        if samples.len() < MIN_SEGMENTS + 1 {
            return Err(Error::TooFewSegments);
        }
        let first = samples.first().expect("nonempty");
        let last = samples.last().expect("nonempty");
        if first.bits() != last.bits() {
            return Err(Error::OpenPath);
        }
        Ok(LoopPath { family: LoopFamily::Explicit, samples, angles: None })
    }

    /// Parse the plain-text loop format: one sample per line, five
    /// whitespace-separated reals R₁…R₅. Blank lines and lines starting
    /// with `#` are skipped. The first and last samples must match bitwise.
    pub fn parse(text: &str) -> Result<LoopPath> {
        let mut samples = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 5 fields, found {}", fields.len()),
                });
            }
            let mut r = [0.0; 5];
            for (a, field) in fields.iter().enumerate() {
                r[a] = field.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("field {}: {e}", a + 1),
                })?;
            }
            samples.push(ParamPoint::new(r));
        }
        LoopPath::explicit(samples)
    }

    /// Load the plain-text format from a file.
    pub fn load(path: &std::path::Path) -> Result<LoopPath> {
        LoopPath::parse(&std::fs::read_to_string(path)?)
    }

    #[must_use]
    pub fn family(&self) -> &LoopFamily {
        &self.family
    }

    /// Number of segments N (one less than the sample count).
    #[must_use]
    pub fn segments(&self) -> usize {
        self.samples.len() - 1
    }

    #[must_use]
    pub fn samples(&self) -> &[ParamPoint] {
        &self.samples
    }

    #[must_use]
    pub fn sample(&self, k: usize) -> &ParamPoint {
        &self.samples[k]
    }

    /// Family parameter values (φ or kₓ) when family-generated.
    #[must_use]
    pub fn angles(&self) -> Option<&[f64]> {
        self.angles.as_deref()
    }

    /// Midpoint of segment k. Family loops evaluate the generator at the
    /// half-step parameter (exactly on the manifold); explicit loops use the
    /// chord midpoint. Either choice keeps the midpoint rule second order.
    #[must_use]
    pub fn midpoint(&self, k: usize) -> ParamPoint {
        let n = self.segments() as f64;
        match self.family {
            LoopFamily::Equator { radius } => {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n;
                sphere_point(std::f64::consts::FRAC_PI_2, phi, radius)
            }
            LoopFamily::Tb4dKx { m } => {
                let kx = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n;
                tb4d_point(&[kx, 0.0, 0.0, 0.0], m)
            }
            LoopFamily::Explicit => self.samples[k].midpoint_with(&self.samples[k + 1]),
        }
    }

    /// Chord increment Δ𝐑 of segment k.
    #[must_use]
    pub fn increment(&self, k: usize) -> [f64; 5] {
        self.samples[k].delta_to(&self.samples[k + 1])
    }

    /// Short human-readable descriptor for reports.
    #[must_use]
    pub fn label(&self) -> String {
        match self.family {
            LoopFamily::Equator { radius } => {
                format!("equator(R={radius}, N={})", self.segments())
            }
            LoopFamily::Tb4dKx { m } => format!("tb4d-kx(m={m}, N={})", self.segments()),
            LoopFamily::Explicit => format!("explicit(N={})", self.segments()),
        }
    }
}
