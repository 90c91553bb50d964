//! Model parameters, inverse temperature and the DM-strength regime.

use crate::{lit, Error, Real, Result};

/// Tolerance for deciding `d == γ` in [`classify_regime`].
pub const REGIME_EPS: f64 = 1e-12;

/// Inverse temperature in units of `1/J`.
///
/// Zero temperature is its own variant so that ground-state formulas are used
/// instead of overflowing Boltzmann factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Beta<T> {
    /// Maps `+∞` to [`Beta::Infinite`]; rejects negative or NaN input.
    pub fn from_value(x: T) -> Result<Self> {
        if x.is_finite() {
            if x < T::zero() {
                return Err(Error::InvalidParam {
                    name: "betaJ",
                    value: x.to_f64().unwrap_or(f64::NAN),
                    reason: "must be non-negative",
                });
            }
            Ok(Beta::Finite(x))
        } else if x > T::zero() {
            Ok(Beta::Infinite)
        } else {
            Err(Error::InvalidParam {
                name: "betaJ",
                value: x.to_f64().unwrap_or(f64::NAN),
                reason: "must be finite or +inf",
            })
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Beta::Infinite)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Beta::Finite(b) => Some(b),
            Beta::Infinite => None,
        }
    }

    /// The value as a float, with `+∞` for zero temperature.
    pub fn to_f64(&self) -> f64 {
        match *self {
            Beta::Finite(b) => b.to_f64().unwrap_or(f64::NAN),
            Beta::Infinite => f64::INFINITY,
        }
    }
}

/// Dimensionless couplings of the chain.
///
/// `anisotropy` is γ, `dm` is D/J, `uniform_field` is h1/J and
/// `alternating_field` is h2/J; even sites feel `h1 + h2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    anisotropy: T,
    dm: T,
    uniform_field: T,
    alternating_field: T,
    coupling: T,
    beta: Beta<T>,
}

fn check<T: Real>(name: &'static str, value: T, ok: bool, reason: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            name,
            value: value.to_f64().unwrap_or(f64::NAN),
            reason,
        })
    }
}

impl<T: Real> ModelParams<T> {
    /// Zero-temperature parameters with `J = 1`.
    pub fn new(anisotropy: T, dm: T, uniform_field: T, alternating_field: T) -> Result<Self> {
        check("gamma", anisotropy, anisotropy > T::zero() && anisotropy <= T::one(), "must lie in (0, 1]")?;
        check("d", dm, dm >= T::zero(), "must be non-negative")?;
        check("lambda1", uniform_field, true, "must be finite")?;
        check("lambda2", alternating_field, true, "must be finite")?;
        Ok(Self {
            anisotropy,
            dm,
            uniform_field,
            alternating_field,
            coupling: T::one(),
            beta: Beta::Infinite,
        })
    }

    pub fn with_beta(mut self, beta: Beta<T>) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_coupling(mut self, coupling: T) -> Result<Self> {
        check("J", coupling, coupling > T::zero(), "must be positive")?;
        self.coupling = coupling;
        Ok(self)
    }

    pub fn with_dm(self, dm: T) -> Result<Self> {
        Self::new(self.anisotropy, dm, self.uniform_field, self.alternating_field)
            .map(|p| p.with_beta(self.beta))
            .map(|p| Self { coupling: self.coupling, ..p })
    }

    pub fn with_fields(self, uniform: T, alternating: T) -> Result<Self> {
        Self::new(self.anisotropy, self.dm, uniform, alternating)
            .map(|p| p.with_beta(self.beta))
            .map(|p| Self { coupling: self.coupling, ..p })
    }

    pub fn anisotropy(&self) -> T {
        self.anisotropy
    }
    pub fn dm(&self) -> T {
        self.dm
    }
    pub fn uniform_field(&self) -> T {
        self.uniform_field
    }
    pub fn alternating_field(&self) -> T {
        self.alternating_field
    }
    pub fn coupling(&self) -> T {
        self.coupling
    }
    pub fn beta(&self) -> Beta<T> {
        self.beta
    }

    pub fn is_uniform(&self) -> bool {
        self.alternating_field == T::zero()
    }

    /// Same couplings with both fields switched off.
    pub fn field_free(&self) -> Self {
        Self {
            uniform_field: T::zero(),
            alternating_field: T::zero(),
            ..*self
        }
    }

    pub(crate) fn require_uniform(&self, what: &str) -> Result<()> {
        if self.is_uniform() {
            Ok(())
        } else {
            Err(Error::Domain(format!("{what} requires lambda2 = 0")))
        }
    }
}

/// How the DM strength compares with the anisotropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    WeakDm,
    Boundary,
    StrongDm,
}

impl Regime {
    /// The boundary case shares the weak-DM formulas.
    pub fn strong(self) -> bool {
        self == Regime::StrongDm
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::WeakDm => "weak",
            Regime::Boundary => "boundary",
            Regime::StrongDm => "strong",
        }
    }
}

/// `WeakDm` iff `d < γ - eps`, `StrongDm` iff `d > γ + eps`.
pub fn classify_regime<T: Real>(p: &ModelParams<T>, eps: T) -> Regime {
    debug_assert!(eps > T::zero());
    if p.dm < p.anisotropy - eps {
        Regime::WeakDm
    } else if p.dm > p.anisotropy + eps {
        Regime::StrongDm
    } else {
        Regime::Boundary
    }
}

/// [`classify_regime`] at the default tolerance.
pub fn regime<T: Real>(p: &ModelParams<T>) -> Regime {
    classify_regime(p, lit(REGIME_EPS))
}
