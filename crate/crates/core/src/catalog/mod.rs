//! Parameterized systems with their Poisson structure, Hamiltonian `L` and
//! known solutions `G` of the extension equation.
//!
//! Every served `G` passes a residual gate at instantiation.

pub mod noext;
pub mod params;
pub mod quartic;
pub mod vortex;

use serde::Serialize;

use crate::diffkit::{merge_singular, ScalarField, SingularSet};
use crate::error::{Error, Result};
use crate::extension::{Extension, ExtensionParams, GSolution, GlobalStatus, Verification};
use crate::poisson::HamiltonianSystem;
use crate::verify::residual::system_singular;
use crate::verify::{pde_residual, sample_points, SampleSpec};

pub use params::{ParamMap, ParamReader, UniFn};

pub const GATE_POINTS: usize = 100;
pub const GATE_TOL: f64 = 1e-7;
pub const GATE_SEED: u64 = 0x6a7e_5eed;

/// Entry whose `G` is served even when the gate fails.
pub const UNGATED: &str = "quartic2b";

pub(crate) struct Seed {
    pub field: ScalarField,
    pub constraints: String,
    pub global: GlobalStatus,
}

pub(crate) struct Built {
    pub system: HamiltonianSystem,
    pub seeds: Vec<Seed>,
    pub regime: Option<(f64, f64)>,
    pub domain: Vec<(f64, f64)>,
    pub margin: f64,
}

type Builder = fn(&mut ParamReader) -> Result<Built>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub dim: usize,
    pub has_g: bool,
    pub notes: &'static str,
    pub coords: Vec<&'static str>,
    pub params: Vec<&'static str>,
}

struct Entry {
    info: fn() -> EntryInfo,
    build: Builder,
}

macro_rules! info {
    ($id:literal, $dim:literal, $has_g:literal, $notes:literal, [$($c:literal),*], [$($p:literal),*]) => {
        || EntryInfo {
            id: $id,
            dim: $dim,
            has_g: $has_g,
            notes: $notes,
            coords: vec![$($c),*],
            params: vec![$($p),*],
        }
    };
}

const ENTRIES: [Entry; 8] = [
    Entry {
        info: info!(
            "quartic1",
            2,
            true,
            "globally defined; perfect square in p plus a constant",
            ["q", "p"],
            ["C1", "C2", "C3", "f", "c", "c0"]
        ),
        build: quartic::quartic1,
    },
    Entry {
        info: info!(
            "quartic2a",
            2,
            true,
            "globally defined away from C1 q + C2 = 0",
            ["q", "p"],
            ["C1", "C2", "C3", "C4", "c", "c0"]
        ),
        build: quartic::quartic2a,
    },
    Entry {
        info: info!(
            "quartic2b",
            2,
            true,
            "globally defined away from C1 q + C2 = 0; closed-form V verified numerically",
            ["q", "p"],
            ["C1", "C2", "C3", "C4", "c", "c0"]
        ),
        build: quartic::quartic2b,
    },
    Entry {
        info: info!(
            "square_polar",
            4,
            true,
            "globally defined; requires c0 = 0",
            ["q1", "q2", "p1", "p2"],
            ["C1", "C2", "C3", "F", "c", "c0"]
        ),
        build: quartic::square_polar,
    },
    Entry {
        info: info!(
            "vortex_equal",
            4,
            true,
            "conditionally-single-valued: G is single-valued when the exponent is an integer",
            ["X1t", "Y1t", "X2t", "Y2t"],
            ["k", "c", "c0", "alpha", "F1", "F2"]
        ),
        build: vortex::vortex_equal,
    },
    Entry {
        info: info!(
            "vortex_opposite",
            4,
            true,
            "globally defined up to Y2t = 0; four independent constants of motion",
            ["X1t", "Y1t", "X2t", "Y2t"],
            ["k", "c", "c0", "alpha", "F1", "F2"]
        ),
        build: vortex::vortex_opposite,
    },
    Entry {
        info: info!(
            "lotka_volterra",
            2,
            false,
            "no-extension: known G involves the multi-valued Lambert W function",
            ["x", "y"],
            ["a", "b", "d", "g"]
        ),
        build: noext::lotka_volterra,
    },
    Entry {
        info: info!(
            "euler_top",
            3,
            false,
            "no-extension: the Kuru-Negro G is multi-valued (elliptic integral); local residual only",
            ["m1", "m2", "m3"],
            ["I1", "I2", "I3"]
        ),
        build: noext::euler_top,
    },
];

pub fn list_entries() -> Vec<EntryInfo> {
    ENTRIES.iter().map(|e| (e.info)()).collect()
}

pub fn entry_info(id: &str) -> Result<EntryInfo> {
    list_entries()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownSystem(id.to_string()))
}

/// A built system with its gated solutions.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub system: HamiltonianSystem,
    pub solutions: Vec<GSolution>,
    /// Resolved parameters, defaults included.
    pub params: ParamMap,
    /// `(c, c₀)` for which the solutions hold.
    pub regime: Option<(f64, f64)>,
    /// Default sampling box.
    pub domain: Vec<(f64, f64)>,
    /// Default distance kept from singular sets.
    pub margin: f64,
}

impl Instance {
    pub fn solution(&self) -> Result<&GSolution> {
        self.solutions
            .first()
            .ok_or_else(|| Error::NoGSolution(self.id.clone()))
    }

    pub fn sample_spec(&self, count: usize, seed: u64) -> SampleSpec {
        SampleSpec::new(self.domain.clone(), count, seed).with_margin(self.margin)
    }

    /// Sampling box `[u, p_u, x…]` for extended states: a regular
    /// `u`-interval, `p_u ∈ [−1, 1]`, and the base domain.
    pub fn extended_spec(&self, params: &ExtensionParams, count: usize, seed: u64) -> SampleSpec {
        let mut intervals = vec![params.regular_u_interval(), (-1.0, 1.0)];
        intervals.extend(self.domain.iter().copied());
        SampleSpec::new(intervals, count, seed).with_margin(self.margin)
    }

    /// Singular set of `L` and of every served `G`.
    pub fn singular_set(&self) -> Option<SingularSet> {
        let mut acc = self.system.hamiltonian.singular_set();
        for s in &self.solutions {
            acc = merge_singular(acc, s.field.singular_set());
        }
        acc
    }

    /// Extension of `L` by its first solution. `params.c`, `params.c0` must
    /// match the regime of the solution.
    pub fn extension(&self, params: ExtensionParams) -> Result<Extension> {
        Extension::new(self.system.clone(), self.solution()?.clone(), params)
    }
}

fn probes(built: &Built, singular: Option<SingularSet>) -> Result<Vec<Vec<f64>>> {
    let spec = SampleSpec::new(built.domain.clone(), 8, GATE_SEED ^ 1).with_margin(built.margin);
    let pts = match singular {
        Some(p) => {
            let pred = move |x: &[f64], m: f64| p(x, m);
            sample_points(&spec, Some(&pred))?
        }
        None => sample_points(&spec, None)?,
    };
    Ok(pts.points)
}

/// Builds entry `id` and gates each of its solutions.
pub fn instantiate(id: &str, params: &ParamMap) -> Result<Instance> {
    let entry = ENTRIES
        .iter()
        .find(|e| (e.info)().id == id)
        .ok_or_else(|| Error::UnknownSystem(id.to_string()))?;
    let mut reader = ParamReader::new(params);
    let built = (entry.build)(&mut reader)?;
    let resolved = reader.finish()?;
    let mut solutions = Vec::with_capacity(built.seeds.len());
    if let Some((c, c0)) = built.regime {
        for seed in &built.seeds {
            let singular = system_singular(&built.system, seed.field.singular_set());
            let probe_points = probes(&built, singular)?;
            let mut gsol = GSolution::new(
                seed.field.clone(),
                c,
                c0,
                seed.constraints.clone(),
                seed.global,
                &probe_points,
            )?;
            let spec = SampleSpec::new(built.domain.clone(), GATE_POINTS, GATE_SEED).with_margin(built.margin);
            let report = pde_residual(&built.system, &gsol, c, c0, &spec)?;
            if report.max <= GATE_TOL {
                gsol.verification = Verification::Passed {
                    max_residual: report.max,
                };
            } else if id == UNGATED {
                gsol.verification = Verification::Failed {
                    max_residual: report.max,
                };
            } else {
                return Err(Error::Degenerate(format!(
                    "G of {id} failed the residual gate: max {:e} > {GATE_TOL:e} at {:?}",
                    report.max, report.worst_point
                )));
            }
            solutions.push(gsol);
        }
    }
    Ok(Instance {
        id: id.to_string(),
        system: built.system,
        solutions,
        params: resolved,
        regime: built.regime,
        domain: built.domain,
        margin: built.margin,
    })
}
