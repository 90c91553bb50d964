//! What a grid point reports, and how it is computed.

use std::fmt;
use std::str::FromStr;

use datxy::ed::{Boundary, SpinChainED, C64};
use datxy::order::{chiral_order, classify, gather_evidence, pm_discriminator, PhaseThresholds, StaggeredProbe};
use datxy::quench::{default_tprime_grid, ergodicity_verdict};
use datxy::rdm::{assemble_rdm, derivative_ladder, equilibrium_ln, log_negativity, FieldAxis, STEP_LADDER};
use datxy::{blocks, ed, equilibrium_correlators, Correlators, Error, Params, Quadrature};

use crate::output::num;

/// Ring sizes compared by the oracle check.
pub const ORACLE_SIZES: [usize; 3] = [8, 10, 12];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Ln,
    DlnDl1,
    DlnDl2,
    Mx,
    S,
    Cchi,
    Gap,
    Mz,
    Correlators,
    PhaseLabel,
    /// Correlators and LN; the `quench` trace.
    Trace,
    Ergodicity,
    OracleCheck,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Ln => "LN",
            Quantity::DlnDl1 => "dLN_dl1",
            Quantity::DlnDl2 => "dLN_dl2",
            Quantity::Mx => "Mx",
            Quantity::S => "S",
            Quantity::Cchi => "Cchi",
            Quantity::Gap => "gap",
            Quantity::Mz => "mz",
            Quantity::Correlators => "correlators",
            Quantity::PhaseLabel => "phase_label",
            Quantity::Trace => "trace",
            Quantity::Ergodicity => "ergodicity",
            Quantity::OracleCheck => "oracle_check",
        }
    }

    pub fn columns(self) -> Vec<String> {
        let names: Vec<String> = match self {
            Quantity::Ln => vec!["LN".into()],
            Quantity::DlnDl1 | Quantity::DlnDl2 => STEP_LADDER
                .iter()
                .map(|h| format!("dLN_h{h:e}"))
                .chain(["dLN_richardson".into()])
                .collect(),
            Quantity::Mx => vec!["Mx".into()],
            Quantity::S => vec!["S".into()],
            Quantity::Cchi => vec!["Cchi".into()],
            Quantity::Gap => vec!["gap".into()],
            Quantity::Mz => vec!["mz_e".into(), "mz_o".into()],
            Quantity::Correlators => Correlators::NAMES.map(String::from).to_vec(),
            Quantity::PhaseLabel => ["phase", "Mx", "S", "Cchi", "gap"].map(String::from).to_vec(),
            Quantity::Trace => Correlators::NAMES.iter().map(|s| s.to_string()).chain(["LN".into()]).collect(),
            Quantity::Ergodicity => ["LN_equilibrium_max", "LN_late_average", "best_betaJ", "ergodic"].map(String::from).to_vec(),
            Quantity::OracleCheck => {
                ORACLE_SIZES.iter().map(|n| format!("dev_N{n}")).chain(["converging".into()]).collect()
            }
        };
        names
    }

    /// Defined only for the ground state.
    pub fn zero_temperature_only(self) -> bool {
        matches!(self, Quantity::DlnDl1 | Quantity::DlnDl2 | Quantity::Mx | Quantity::PhaseLabel)
    }

    /// Computable on a post-quench state, i.e. along a `t` axis.
    pub fn follows_quench(self) -> bool {
        matches!(self, Quantity::Ln | Quantity::S | Quantity::Cchi | Quantity::Mz | Quantity::Correlators | Quantity::Trace)
    }

    /// Uses the finite-chain ground state, which neighbours along a row
    /// can warm-start.
    pub fn warm_starts(self) -> bool {
        matches!(self, Quantity::Mx | Quantity::PhaseLabel)
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let selectable = [
            Quantity::Ln,
            Quantity::DlnDl1,
            Quantity::DlnDl2,
            Quantity::Mx,
            Quantity::S,
            Quantity::Cchi,
            Quantity::Gap,
            Quantity::Mz,
            Quantity::Correlators,
            Quantity::PhaseLabel,
        ];
        selectable.into_iter().find(|q| q.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = selectable.iter().map(|q| q.as_str()).collect();
            format!("unknown quantity `{s}` ({})", names.join(", "))
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Numerical settings shared by every point of a run.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub quadrature: Quadrature,
    pub probe: StaggeredProbe,
    pub thresholds: PhaseThresholds,
}

/// Cells of a correlator-derived quantity.
pub fn from_correlators(quantity: Quantity, cs: &Correlators) -> datxy::Result<Vec<String>> {
    let ln = || assemble_rdm(cs).map(|s| log_negativity(&s));
    Ok(match quantity {
        Quantity::Ln => vec![num(ln()?)],
        Quantity::S => vec![num(pm_discriminator(cs))],
        Quantity::Cchi => vec![num(chiral_order(cs))],
        Quantity::Mz => vec![num(cs.mz_even), num(cs.mz_odd)],
        Quantity::Correlators => cs.to_array().map(num).to_vec(),
        Quantity::Trace => cs.to_array().into_iter().map(num).chain([num(ln()?)]).collect(),
        other => unreachable!("{other} is not a correlator quantity"),
    })
}

/// Cells of one equilibrium point; `start` carries the finite-chain ground
/// state between neighbours when warm-starting.
pub fn evaluate(quantity: Quantity, p: &Params, ctx: &Context, start: &mut Option<Vec<C64>>) -> datxy::Result<Vec<String>> {
    let q = &ctx.quadrature;
    match quantity {
        Quantity::Ln => Ok(vec![num(equilibrium_ln(p, q)?)]),
        Quantity::DlnDl1 | Quantity::DlnDl2 => {
            let axis = if quantity == Quantity::DlnDl1 { FieldAxis::Uniform } else { FieldAxis::Alternating };
            let ladder = derivative_ladder(p, axis, &STEP_LADDER, q)?;
            Ok(ladder.values.iter().chain([&ladder.richardson]).map(|&v| num(v)).collect())
        }
        Quantity::Mx => {
            let (mx, ground) = ed::staggered_mx_from(p, ctx.probe.sites, ctx.probe.hx, start.as_deref())?;
            *start = Some(ground);
            Ok(vec![num(mx)])
        }
        Quantity::Gap => Ok(vec![num(blocks::min_gap(p, blocks::GAP_GRID))]),
        Quantity::PhaseLabel => {
            let e = gather_evidence(p, &ctx.probe, q, start)?;
            let label = match classify(&e, &ctx.thresholds) {
                Ok(phase) => phase.as_str(),
                Err(Error::Unclassified { .. }) => "unclassified",
                Err(other) => return Err(other),
            };
            Ok(vec![label.to_owned(), num(e.mx), num(e.s), num(e.chiral), num(e.gap)])
        }
        Quantity::Ergodicity => {
            let v = ergodicity_verdict(p, &default_tprime_grid(), q)?;
            Ok(vec![num(v.lhs), num(v.rhs), num(v.best_beta.to_f64()), v.ergodic.to_string()])
        }
        Quantity::OracleCheck => {
            let exact = equilibrium_correlators(p, q)?;
            let dev = ORACLE_SIZES
                .iter()
                .map(|&n| Ok(SpinChainED::new(n, Boundary::Periodic, *p)?.thermal_correlators(p.beta())?.max_abs_diff(&exact)))
                .collect::<datxy::Result<Vec<f64>>>()?;
            let converging = dev.windows(2).all(|w| w[1] < w[0]);
            Ok(dev.iter().map(|&v| num(v)).chain([converging.to_string()]).collect())
        }
        _ => from_correlators(quantity, &equilibrium_correlators(p, q)?),
    }
}
