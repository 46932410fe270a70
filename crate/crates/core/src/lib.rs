//! Local models of isolated singularities of conformal hyperbolic metrics.
//!
//! The library turns the constructive classification of an isolated
//! singularity of a curvature −1 conformal metric on the punctured disk into
//! executable algorithms:
//!
//! * [`series`] — truncated power/Laurent series arithmetic over complex
//!   coefficients, the algebraic engine for coordinate construction.
//! * [`mobius`] — the isometry groups PSU(1,1) and PSL(2,ℝ), their
//!   classification into elliptic/parabolic/hyperbolic, and normal forms.
//! * [`devmap`] — developing maps as branch-tracked multivalued functions,
//!   analytic continuation around the puncture, monodromy extraction.
//! * [`metrics`] — conformal metric models (ambient hyperbolic, conical,
//!   cusp, pullback), density evaluation and curvature residuals.
//! * [`classify`] — the pipeline from a developing map to a
//!   [`classify::SingularityReport`]: monodromy type ⇒ singularity type,
//!   Fourier development of the periodic part, and the normalizing
//!   coordinate ξ.
//! * [`verify`] — independent numerical oracles: Schwarzian Laurent
//!   structure, curvature residuals, Schwarz–Pick, displacement bounds.
//! * [`synth`] — synthesis of developing maps with known classification,
//!   used by the verification suite and tests.

pub mod cplx;
pub mod series;
pub mod mobius;
pub mod devmap;
pub mod metrics;
pub mod classify;
pub mod verify;
pub mod synth;

pub use num_complex::Complex64;
