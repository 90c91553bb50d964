//! Nearest-neighbour correlators and sublattice magnetisations.

use crate::Real;

/// Bond correlators `C^{αμ} = <σ^α_e σ^μ_o>` on an (even, odd) pair and the
/// two sublattice magnetisations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrelatorSet<T> {
    pub xx: T,
    pub yy: T,
    pub xy: T,
    pub yx: T,
    pub zz: T,
    pub mz_even: T,
    pub mz_odd: T,
}

impl<T: Real> CorrelatorSet<T> {
    /// Builds the set with `zz` from the Gaussian-state identity.
    pub fn from_transverse(xx: T, yy: T, xy: T, yx: T, mz_even: T, mz_odd: T) -> Self {
        let mut cs = Self { xx, yy, xy, yx, zz: T::zero(), mz_even, mz_odd };
        cs.zz = cs.wick_zz();
        cs
    }

    /// `m_e m_o - C^xx C^yy + C^xy C^yx`.
    pub fn wick_zz(&self) -> T {
        self.mz_even * self.mz_odd - self.xx * self.yy + self.xy * self.yx
    }

    pub fn wick_residual(&self) -> T {
        (self.zz - self.wick_zz()).abs()
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    /// `[xx, yy, xy, yx, zz, mz_even, mz_odd]`.
    pub fn to_array(&self) -> [T; 7] {
        [self.xx, self.yy, self.xy, self.yx, self.zz, self.mz_even, self.mz_odd]
    }

    pub const NAMES: [&'static str; 7] = ["Cxx", "Cyy", "Cxy", "Cyx", "Czz", "mz_e", "mz_o"];
}

/// Equilibrium correlators at any fields and temperature.
///
/// Takes the closed-form route when `λ2 = 0` and the momentum blocks otherwise.
pub fn equilibrium_correlators<T: Real>(
    p: &crate::ModelParams<T>,
    q: &crate::QuadratureSpec<T>,
) -> crate::Result<CorrelatorSet<T>> {
    if p.is_uniform() {
        crate::uniform::correlators_uniform(p, q)
    } else {
        crate::blocks::thermal_correlators_alt(p, q)
    }
}
