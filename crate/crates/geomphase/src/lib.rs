//! Geometric phases of a degenerate four-level system, pure and thermal.
//!
//! The engine works with Hamiltonians H = Σₐ Rₐ Γᵃ built on a Clifford
//! quintet {Γᵃ, Γᵇ} = 2δ_{ab}·1₄; the spectrum is ±R with R = ‖𝐑‖ and both
//! levels doubly degenerate. Two holonomies are computed along closed loops
//! 𝐑(t) in parameter space:
//!
//! * [`wz`] — the Wilczek–Zee holonomy of each pure degenerate subspace,
//!   the path-ordered exponential of the non-Abelian connection
//!   𝒜ᵢⱼ = ⟨ψᵢ|dψⱼ⟩, plus the scalar phase carried by its trace.
//! * [`uhlmann`] — the Uhlmann connection of the thermal state
//!   ρ ∝ e^{−H/T}, its holonomy, and the mixed-state phase
//!   arg Tr[ρ(0)·hol]. Three algebraically equivalent constructions of the
//!   connection are implemented and cross-checked against each other.
//!
//! [`model`] owns the Γ matrices, the analytic eigenframes, thermal states
//! and loop families (a great circle on a parameter sphere and the kₓ
//! circle of a four-dimensional tight-binding model). [`analysis`] derives
//! the headline numbers: critical temperatures where the mixed-state phase
//! jumps, the (m, T) phase diagram with its dome fit, winding numbers of
//! unitary deformation families, and the T→0 limit in which the Uhlmann
//! holonomy degrades to the Wilczek–Zee one. [`selftest`] bundles the
//! internal consistency suites behind one report.
//!
//! All matrices are dense, complex and tiny (dim ≤ 8); [`linalg`] carries
//! the hand-rolled kernels (cyclic Jacobi eigensolver, unitary exponential,
//! PSD square root, polar factor) so results are bit-reproducible across
//! platforms and thread counts.

pub mod analysis;
pub mod linalg;
pub mod model;
pub mod selftest;
pub mod uhlmann;
pub mod wz;

pub use num_complex::Complex64;

use thiserror::Error;

/// Minimum number of segments a closed loop must carry.
pub const MIN_SEGMENTS: usize = 8;

/// Everything that can go numerically or structurally wrong in the engine.
///
/// [`Error::code`] gives the stable token used in serialized tables
/// (`ERROR:<code>`), so variant renames would be breaking there.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("matrix is not anti-Hermitian within tolerance")]
    NotAntiHermitian,
    #[error("matrix has an eigenvalue below -1e-12; not positive semidefinite")]
    NotPsd,
    #[error("iteration failed to converge")]
    NoConvergence,
    #[error("matrix is singular or numerically rank-deficient")]
    RankDeficient,
    #[error("operands have incompatible dimensions")]
    DimensionMismatch,
    #[error("spectral gap closes at the requested parameter point")]
    GapClosure,
    #[error("spectral gap closes somewhere on the integration path")]
    GapClosureOnPath,
    #[error("analytic eigenframe hits its coordinate pole (R5 -> +-R)")]
    GaugePole,
    #[error("temperature must be positive")]
    NonpositiveTemperature,
    #[error("loop endpoints differ; path is not closed")]
    OpenPath,
    #[error("loop carries fewer than {MIN_SEGMENTS} segments")]
    TooFewSegments,
    #[error("frame alignment broke down: overlap matrix near-singular")]
    GaugeDiscontinuity,
    #[error("no sign change found when scanning for a critical temperature")]
    NoBracket,
    #[error("grid contains no topological cells to fit")]
    EmptyDome,
    #[error("deformation family endpoints differ; family is not closed")]
    NotClosed,
    #[error("deformation step too large for the principal logarithm")]
    StepTooLarge,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable short code for serialized output.
    #[must_use]
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotHermitian => "NotHermitian",
            Error::NotAntiHermitian => "NotAntiHermitian",
            Error::NotPsd => "NotPSD",
            Error::NoConvergence => "NoConvergence",
            Error::RankDeficient => "RankDeficient",
            Error::DimensionMismatch => "DimensionMismatch",
            Error::GapClosure => "GapClosure",
            Error::GapClosureOnPath => "GapClosureOnPath",
            Error::GaugePole => "GaugePole",
            Error::NonpositiveTemperature => "NonpositiveTemperature",
            Error::OpenPath => "OpenPath",
            Error::TooFewSegments => "TooFewSegments",
            Error::GaugeDiscontinuity => "GaugeDiscontinuity",
            Error::NoBracket => "NoBracket",
            Error::EmptyDome => "EmptyDome",
            Error::NotClosed => "NotClosed",
            Error::StepTooLarge => "StepTooLarge",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Distance between two angles on the circle, in [0, π].
///
/// Phases are reported as principal values in (−π, π]; comparisons of
/// quantized phases must be circular so that −π + ε and π count as close.
#[must_use]
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut d = (a - b).rem_euclid(two_pi);
    if d > std::f64::consts::PI {
        d = two_pi - d;
    }
    d
}

/// Principal argument of z in (−π, π], with the branch-cut value pinned to
/// +π.
///
/// `atan2` alone maps a negative real with a −0.0 imaginary part to −π;
/// quantized phases must come out as the single representative +π instead.
#[must_use]
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}
