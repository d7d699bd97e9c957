//! Local cohomology as the stable value of Koszul cohomology, plus the
//! cellular/null triangle around it.

mod cech;
mod triangle;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{koszul, transition_between, GradedComplex};
use crate::error::Error;
use crate::linalg::{induced_map_is_iso, FGAbGroup, Subquotient};
use crate::module::{GradedModule, IdealSpec};

pub use cech::cech_local_cohomology;
pub use triangle::{colocalization_triangle, is_cellular, CellularVerdict, TriangleResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub min: i64,
    pub max: i64,
}

impl Window {
    pub fn new(min: i64, max: i64) -> Result<Self, Error> {
        if min > max {
            return Err(Error::InvalidInput(format!(
                "window [{min}, {max}] is empty"
            )));
        }
        Ok(Window { min, max })
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationPolicy {
    pub max_power: u32,
    pub stable_steps: u32,
}

impl Default for StabilizationPolicy {
    fn default() -> Self {
        StabilizationPolicy {
            max_power: 64,
            stable_steps: 2,
        }
    }
}

/// Why an entry is trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// The transition maps were isomorphisms this many times in a row.
    StableSteps { steps: u32 },
    /// The ideal generators form a regular sequence on the module, so every
    /// group below the top vanishes outright.
    RegularSequence,
    /// The module vanishes above `bound`, so the Koszul complex collapses to
    /// the module itself once the powers push everything past the bound.
    GradingBound { bound: i64 },
}

impl Certificate {
    pub fn is_proof(&self) -> bool {
        !matches!(self, Certificate::StableSteps { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCohomologyEntry {
    pub group: FGAbGroup,
    pub stabilized_at: u32,
    pub certificates: Vec<Certificate>,
}

impl LocalCohomologyEntry {
    pub fn certified(&self) -> bool {
        self.certificates.iter().any(Certificate::is_proof)
    }
}

#[derive(Clone, Debug)]
pub struct LocalCohomologyResult {
    pub ideal_size: usize,
    pub window: Window,
    pub policy: StabilizationPolicy,
    /// Keyed by `(i, j)`: cohomological degree and internal degree.
    pub entries: BTreeMap<(usize, i64), LocalCohomologyEntry>,
    /// Koszul power at which every `i` was inside its stable run, per `j`.
    pub final_power: BTreeMap<i64, u32>,
    pub regular_sequence: bool,
    pub grading_bound: Option<i64>,
}

impl LocalCohomologyResult {
    pub fn group(&self, i: usize, j: i64) -> FGAbGroup {
        self.entries
            .get(&(i, j))
            .map_or_else(FGAbGroup::zero, |e| e.group.clone())
    }

    pub fn groups(&self) -> BTreeMap<(usize, i64), FGAbGroup> {
        self.entries
            .iter()
            .map(|(k, e)| (*k, e.group.clone()))
            .collect()
    }

    pub fn nonzero(&self) -> BTreeMap<(usize, i64), FGAbGroup> {
        self.entries
            .iter()
            .filter(|(_, e)| !e.group.is_zero())
            .map(|(k, e)| (*k, e.group.clone()))
            .collect()
    }

    /// No group above the number of ideal generators carries anything.
    pub fn vanishes_above_generators(&self) -> bool {
        self.entries
            .iter()
            .all(|(&(i, _), e)| i <= self.ideal_size || e.group.is_zero())
    }

    /// Cohomological degrees whose groups have positive rational rank.
    pub fn rational_degrees(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .entries
            .iter()
            .filter(|(_, e)| e.group.rational_rank() > 0)
            .map(|(&(i, _), _)| i)
            .collect();
        out.dedup();
        out
    }
}

/// Every `H^i(cell)⟨j⟩` with `j > b` vanishes.
pub fn grading_bound_check(result: &LocalCohomologyResult, b: i64) -> bool {
    result
        .entries
        .iter()
        .all(|(&(_, j), e)| j <= b || e.group.is_zero())
}

/// First power worth looking at: every summand of `K(x^t; M)` other than `M`
/// itself sits above `top`, the presentation degree or the grading bound.
pub(crate) fn start_power(ideal: &IdealSpec, top: i64, j: i64) -> u32 {
    if ideal.is_empty() {
        return 1;
    }
    let step = ideal.min_degree();
    let needed = (top - j).div_euclid(step) + 1;
    needed.max(1) as u32
}

/// Koszul data at one internal degree and one power.
pub(crate) struct KoszulSlice {
    pub power: u32,
    pub complex: GradedComplex,
    pub homology: Vec<Subquotient>,
}

impl KoszulSlice {
    pub(crate) fn new(m: &GradedModule, ideal: &IdealSpec, t: u32, j: i64) -> Result<Self, Error> {
        let complex = koszul(m, ideal, t);
        let homology = (0..=ideal.len() as i32)
            .map(|i| complex.homology_at(i, j))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KoszulSlice {
            power: t,
            complex,
            homology,
        })
    }
}

pub(crate) struct DegreeRun {
    pub slice: KoszulSlice,
    pub stabilized_at: Vec<u32>,
}

/// Raises the Koszul power at degree `j` until each `H^i` has seen
/// `stable_steps` consecutive isomorphic transitions.
pub(crate) fn stabilize(
    m: &GradedModule,
    ideal: &IdealSpec,
    j: i64,
    top: i64,
    policy: StabilizationPolicy,
) -> Result<DegreeRun, Error> {
    let levels = ideal.len() + 1;
    let t0 = start_power(ideal, top, j);
    if t0 > policy.max_power {
        return Err(Error::StabilizationNotReached {
            i: 0,
            j,
            max_power: policy.max_power,
        });
    }
    let mut current = KoszulSlice::new(m, ideal, t0, j)?;
    let mut run_start = vec![t0; levels];
    let mut run_length = vec![0u32; levels];
    let done = |lengths: &[u32]| lengths.iter().all(|&l| l >= policy.stable_steps);
    while !done(&run_length) {
        let t = current.power;
        if t + 1 > policy.max_power {
            let i = run_length
                .iter()
                .position(|&l| l < policy.stable_steps)
                .unwrap_or(0);
            return Err(Error::StabilizationNotReached {
                i,
                j,
                max_power: policy.max_power,
            });
        }
        let next = KoszulSlice::new(m, ideal, t + 1, j)?;
        let map = transition_between(m, ideal, current.complex.clone(), next.complex.clone());
        for i in 0..levels {
            if run_length[i] >= policy.stable_steps {
                continue;
            }
            let phi = map.realize(i as i32, j);
            if induced_map_is_iso(&phi, &current.homology[i], &next.homology[i]) {
                run_length[i] += 1;
            } else {
                run_length[i] = 0;
                run_start[i] = t + 1;
            }
        }
        current = next;
    }
    Ok(DegreeRun {
        slice: current,
        stabilized_at: run_start,
    })
}

/// Whether `H^{<m}(K(x; M))` vanishes across the degrees where Koszul
/// cohomology of a finitely presented module can start.
fn detect_regular_sequence(m: &GradedModule, ideal: &IdealSpec) -> Result<bool, Error> {
    let count = ideal.len();
    if count == 0 {
        return Ok(false);
    }
    let Some(low) = m.min_generator_degree() else {
        return Ok(true);
    };
    let spread = ideal.total_degree();
    let k = koszul(m, ideal, 1);
    for d in low - spread..=m.presentation_degree() + spread {
        for i in 0..count {
            if !k.homology_at(i as i32, d)?.group.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `H^i_I(M)⟨j⟩` for `0 ≤ i ≤ m` and `j` in the window.
pub fn local_cohomology(
    m: &GradedModule,
    ideal: &IdealSpec,
    window: Window,
    policy: StabilizationPolicy,
) -> Result<LocalCohomologyResult, Error> {
    local_cohomology_with_runs(m, ideal, window, policy).map(|(r, _)| r)
}

pub(crate) fn local_cohomology_with_runs(
    m: &GradedModule,
    ideal: &IdealSpec,
    window: Window,
    policy: StabilizationPolicy,
) -> Result<(LocalCohomologyResult, Vec<(i64, DegreeRun)>), Error> {
    if policy.stable_steps == 0 {
        return Err(Error::InvalidInput(
            "stable_steps must be at least 1".into(),
        ));
    }
    let bound = m.grading_bound(window.max.max(m.presentation_degree()));
    let top = bound.map_or(m.presentation_degree(), |b| b.max(m.presentation_degree()));
    let runs: Vec<(i64, DegreeRun)> = window
        .degrees()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|j| stabilize(m, ideal, j, top, policy).map(|r| (j, r)))
        .collect::<Result<_, _>>()?;
    let regular = detect_regular_sequence(m, ideal)?;
    let count = ideal.len();
    let mut entries = BTreeMap::new();
    let mut final_power = BTreeMap::new();
    for (j, run) in &runs {
        final_power.insert(*j, run.slice.power);
        for (i, sq) in run.slice.homology.iter().enumerate() {
            let mut certificates = vec![Certificate::StableSteps {
                steps: policy.stable_steps,
            }];
            if regular && i < count {
                certificates.push(Certificate::RegularSequence);
            }
            if let Some(b) = bound {
                certificates.push(Certificate::GradingBound { bound: b });
            }
            entries.insert(
                (i, *j),
                LocalCohomologyEntry {
                    group: sq.group.clone(),
                    stabilized_at: run.stabilized_at[i],
                    certificates,
                },
            );
        }
    }
    let result = LocalCohomologyResult {
        ideal_size: count,
        window,
        policy,
        entries,
        final_power,
        regular_sequence: regular,
        grading_bound: bound,
    };
    Ok((result, runs))
}

#[cfg(test)]
mod tests;
