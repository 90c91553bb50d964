//! Equilibrium and quench physics of the one-dimensional anisotropic XY chain
//! with Dzyaloshinskii–Moriya (DM) coupling in a uniform plus alternating
//! transverse field.
//!
//! The dimensionless Hamiltonian on an `N`-site ring is
//!
//! ```text
//! H/J = 1/2 Σ_j [ (1+γ)/2 σx_j σx_{j+1} + (1-γ)/2 σy_j σy_{j+1}
//!               + d/2 (σx_j σy_{j+1} - σy_j σx_{j+1})
//!               + (λ1 + (-1)^j λ2) σz_j ]
//! ```
//!
//! Analytic routes work directly in the thermodynamic limit:
//!
//! * [`uniform`]: closed forms for `λ2 = 0`,
//! * [`blocks`]: momentum-block diagonalisation for general fields,
//! * [`quench`]: sudden switch-off of both fields,
//!
//! while [`ed`] is an exact-diagonalisation oracle for rings of up to 12 sites.
//!
//! Numeric kernels are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, which is what the oracle and the CLI use.

pub mod blocks;
pub mod correlators;
pub mod ed;
mod error;
pub mod order;
pub mod params;
pub mod quad;
pub mod quench;
pub mod rdm;
pub mod uniform;

pub use correlators::{equilibrium_correlators, CorrelatorSet};
pub use error::Error;
pub use params::{classify_regime, Beta, ModelParams, Regime};
pub use quad::QuadratureSpec;

/// Scalar type accepted by the numeric kernels.
pub trait Real:
    nalgebra::RealField + Copy + num_traits::FloatConst + num_traits::FromPrimitive + num_traits::ToPrimitive
{
}

impl<T> Real for T where
    T: nalgebra::RealField + Copy + num_traits::FloatConst + num_traits::FromPrimitive + num_traits::ToPrimitive
{
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub type Params = ModelParams<f64>;
pub type Correlators = CorrelatorSet<f64>;
pub type Quadrature = QuadratureSpec<f64>;
