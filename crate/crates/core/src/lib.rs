//! Directional polynomial wavelet tight frames on the spheres `𝕊^{d-1}`, `d ≥ 3`.
//!
//! The crate builds discrete frames `{Ψ^{j,ℓ,m}}` from exact sphere and rotation
//! quadratures, analyzes and synthesizes band-limited signals given by their
//! spherical harmonic coefficients, and provides numerical diagnostics for
//! localization, norm scaling, auto-correlation and steerability of the wavelets.

mod basis;
pub mod coeffs;
pub mod diagnostics;
pub mod error;
pub mod filters;
pub mod frame;
pub mod io;
pub mod quadrature;
pub mod signal;
pub mod specfun;
pub mod sphere;
pub mod transform;
pub mod wavelet;

pub use coeffs::CoefficientVector;
pub use error::{Error, Result};
pub use filters::FilterProfile;
pub use frame::{build_frame, Frame, FrameCoefficients};

pub use num_complex::Complex64;
pub use quadrature::{DirectionalRule, Rule1D, SphereRule};
pub use sphere::{HarmonicIndex, Rotation, SpherePoint};
pub use wavelet::{DirectionalProfile, WaveletSpec};

