//! Order parameters and the phase label built from them.

use crate::blocks::{min_gap, GAP_GRID};
use crate::correlators::equilibrium_correlators;
use crate::ed::{self, C64};
use crate::params::regime;
use crate::uniform::root_pair;
use crate::{lit, Beta, CorrelatorSet, Error, ModelParams, QuadratureSpec, Real, Result};

/// `S = m^z_e m^z_o`: near `+1` in the polarised paramagnet, near `-1` in the
/// staggered one.
pub fn pm_discriminator<T: Real>(cs: &CorrelatorSet<T>) -> T {
    cs.mz_even * cs.mz_odd
}

/// `|C^xy - C^yx|`.
pub fn chiral_order<T: Real>(cs: &CorrelatorSet<T>) -> T {
    (cs.xy - cs.yx).abs()
}

/// Zero-temperature chiral order of the uniform chain from the roots of
/// the dispersion: `(2/π)|cos φ1 - cos φ2|` when `d > γ` and the roots are
/// real, zero otherwise.
pub fn chiral_order_closed_form<T: Real>(p: &ModelParams<T>) -> Result<T> {
    p.require_uniform("closed-form chiral order")?;
    if !p.beta().is_infinite() {
        return Err(Error::Domain("closed-form chiral order is a zero-temperature result".into()));
    }
    if !regime(p).strong() {
        return Ok(T::zero());
    }
    Ok(root_pair(p)
        .map(|r| (r.phi1.cos() - r.phi2.cos()).abs() * T::frac_2_pi())
        .unwrap_or_else(T::zero))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Afm,
    PmI,
    PmII,
    Chiral,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::Afm, Phase::PmI, Phase::PmII, Phase::Chiral];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Afm => "AFM",
            Phase::PmI => "PM-I",
            Phase::PmII => "PM-II",
            Phase::Chiral => "CH",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cut-offs turning evidence into a label; all must be positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseThresholds {
    pub magnetization: f64,
    pub chiral: f64,
    pub paramagnet: f64,
    pub gap: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        Self { magnetization: 0.1, chiral: 0.05, paramagnet: 0.3, gap: 1e-4 }
    }
}

impl PhaseThresholds {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("theta_M", self.magnetization),
            ("theta_C", self.chiral),
            ("theta_S", self.paramagnet),
            ("theta_g", self.gap),
        ];
        for (name, value) in named {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParam { name, value, reason: "threshold must be positive" });
            }
        }
        Ok(())
    }
}

/// Raw order parameters at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    pub mx: f64,
    pub s: f64,
    pub chiral: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLabel {
    pub phase: Phase,
    pub evidence: Evidence,
}

/// AFM, then gapless chiral, then the sign of `S`; anything else is
/// reported as unclassified.
pub fn classify(e: &Evidence, th: &PhaseThresholds) -> Result<Phase> {
    if e.mx > th.magnetization {
        Ok(Phase::Afm)
    } else if e.chiral > th.chiral && e.gap < th.gap {
        Ok(Phase::Chiral)
    } else if e.s > th.paramagnet {
        Ok(Phase::PmI)
    } else if e.s < -th.paramagnet {
        Ok(Phase::PmII)
    } else {
        Err(Error::Unclassified { mx: e.mx, s: e.s, chiral: e.chiral, gap: e.gap })
    }
}

/// Finite-chain settings for the staggered magnetisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaggeredProbe {
    pub sites: usize,
    pub hx: f64,
}

impl Default for StaggeredProbe {
    fn default() -> Self {
        Self { sites: 12, hx: 1e-3 }
    }
}

/// Zero-temperature evidence; `start` warm-starts the finite-chain solver
/// and is replaced by this point's ground state.
pub fn gather_evidence(
    p: &ModelParams<f64>,
    probe: &StaggeredProbe,
    q: &QuadratureSpec<f64>,
    start: &mut Option<Vec<C64>>,
) -> Result<Evidence> {
    let p = p.with_beta(Beta::Infinite);
    let cs = equilibrium_correlators(&p, q)?;
    let (mx, ground) = ed::staggered_mx_from(&p, probe.sites, probe.hx, start.as_deref())?;
    *start = Some(ground);
    Ok(Evidence { mx, s: pm_discriminator(&cs), chiral: chiral_order(&cs), gap: min_gap(&p, GAP_GRID) })
}

pub fn classify_point(
    p: &ModelParams<f64>,
    th: &PhaseThresholds,
    probe: &StaggeredProbe,
    q: &QuadratureSpec<f64>,
) -> Result<PhaseLabel> {
    th.validate()?;
    let evidence = gather_evidence(p, probe, q, &mut None)?;
    classify(&evidence, th).map(|phase| PhaseLabel { phase, evidence })
}

/// Gapless test used by maps: `min_gap < tol`.
pub fn is_gapless<T: Real>(p: &ModelParams<T>, tol: f64) -> bool {
    min_gap(p, GAP_GRID) < lit(tol)
}
