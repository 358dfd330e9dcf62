//! Rigorous upper and lower bounds on the quantum survival amplitude
//! |A(t)| = |⟨ψ(0)|ψ(t)⟩| of a state, computed from the energy moments of
//! its spectral density ρ(E).
//!
//! The toolbox:
//! - [`distributions`]: the density ρ(E) (analytic, discrete or tabulated),
//!   its cut-off weight α and raw/truncated energy moments;
//! - [`moments`]: the factorial-scaled algebra turning energy moments into
//!   autocorrelation moments ēₙ and cut-off-edge moments bₙ;
//! - [`series_bounds`]: alternating partial-sum bounds on P(t) and on the
//!   real/imaginary parts of A(t), plus the cos²(ΔE·t) bound;
//! - [`cutoff_bounds`]: the fixed-cut-off bounds α√pₙ(t,c) ± (1−α);
//! - [`envelope`]: envelope optimization over the cut-off, discrete
//!   schedules and composite best bounds;
//! - [`oracle`]: the exact evolution A(t) used as ground truth in tests.
//!
//! ħ = 1 everywhere; energies are in units of the distribution scale and
//! times in the reciprocal unit.

pub mod distributions;
pub mod envelope;
pub mod error;
pub mod grid;
pub mod moments;
pub mod oracle;
pub mod quad;
pub mod series_bounds;
pub mod special;

pub mod cutoff_bounds;

/// Largest supported moment order; factorial scaling keeps this range
/// safe in 64-bit floating point.
pub const MAX_ORDER: usize = 16;

pub use distributions::{
    load_spec_file, normalize, DistributionSpec, EnergyDistribution, Normalized,
    RawDistribution, TruncationView,
};
pub use error::{Error, Result};
pub use moments::{
    b_from_h, e_brute_force, e_from_h, ebar_from_b, CorrelationMoments, EdgeMoments,
    MomentVector,
};
pub use quad::QuadSettings;
pub use series_bounds::{BoundCurve, BoundSample, CutoffMode, Direction, Target};
