use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::complex::GradedComplex;
use crate::error::Error;
use crate::linalg::{
    is_exact_at, subquotient_homology, ExactMatrix, FGAbGroup, Scalars, Subquotient,
};
use crate::module::{GradedModule, IdealSpec, RadicalCertificate, RadicalOptions};

use super::{
    local_cohomology_with_runs, DegreeRun, LocalCohomologyResult, StabilizationPolicy, Window,
};

/// `cell → M → null` read off degree by degree. Tables are keyed by
/// homological index `p = −i` and internal degree `j`.
#[derive(Clone, Debug)]
pub struct TriangleResult {
    pub cell: BTreeMap<(i32, i64), FGAbGroup>,
    pub module: BTreeMap<(i32, i64), FGAbGroup>,
    pub null: BTreeMap<(i32, i64), FGAbGroup>,
    /// Exactness of the long exact sequence at every spot and every degree.
    pub les_verified: bool,
    /// Every cell class is killed by the Koszul powers of the ideal generators.
    pub cell_torsion_verified: bool,
    pub local: LocalCohomologyResult,
}

fn zero_node(scalars: Scalars) -> Subquotient {
    Subquotient::presented(&ExactMatrix::zeros(scalars, 0, 0))
}

/// Null cohomology `H^k` where `null^k = K^{k+1}`; only `k = 0` differs from `H^{k+1}(K)`.
fn null_zero(k: &GradedComplex, j: i64) -> Result<Subquotient, Error> {
    let scalars = k.ring().scalars();
    let d1 = k.realize_differential(1, j);
    let here = k.term(1).realize(j);
    let next = k.term(2).realize(j);
    let none = ExactMatrix::zeros(scalars, here.dim(), 0);
    subquotient_homology(&none, &d1, &here.relations, &next.relations)
}

struct DegreeTriangle {
    null: Vec<Subquotient>,
    exact: bool,
    torsion: bool,
}

fn triangle_at(
    m: &GradedModule,
    ideal: &IdealSpec,
    j: i64,
    run: &DegreeRun,
) -> Result<DegreeTriangle, Error> {
    let k = &run.slice.complex;
    let h = &run.slice.homology;
    let count = ideal.len();
    let scalars = m.ring().scalars();
    let dim = |i: i32| k.term(i).realize(j).dim();
    let module = Subquotient::presented(&k.term(0).realize(j).relations);

    let mut null = Vec::new();
    if count >= 1 {
        null.push(null_zero(k, j)?);
        null.extend(h[2..=count].iter().cloned());
    }

    // 0 → H⁰K → M → H⁰N → H¹K → 0 → H¹N → H²K → 0 → …
    let zero = zero_node(scalars);
    let mut nodes = vec![zero.clone(), h[0].clone(), module];
    let mut maps = vec![
        ExactMatrix::zeros(scalars, dim(0), 0),
        ExactMatrix::identity(scalars, dim(0)),
    ];
    if count == 0 {
        maps.push(ExactMatrix::zeros(scalars, 0, dim(0)));
        nodes.push(zero);
    } else {
        maps.push(k.realize_differential(0, j));
        nodes.push(null[0].clone());
        maps.push(ExactMatrix::identity(scalars, dim(1)));
        nodes.push(h[1].clone());
        for i in 1..count {
            let term = i as i32 + 1;
            maps.push(ExactMatrix::zeros(scalars, 0, dim(term - 1)));
            nodes.push(zero.clone());
            maps.push(ExactMatrix::zeros(scalars, dim(term), 0));
            nodes.push(null[i].clone());
            maps.push(ExactMatrix::identity(scalars, dim(term)));
            nodes.push(h[i + 1].clone());
        }
        maps.push(ExactMatrix::zeros(scalars, 0, dim(count as i32)));
        nodes.push(zero);
    }
    let exact = (1..nodes.len() - 1).all(|n| {
        is_exact_at(
            &maps[n - 1],
            &nodes[n - 1],
            &nodes[n],
            &maps[n],
            &nodes[n + 1],
        )
    });

    let powers = vec![run.slice.power; count];
    let mut torsion = true;
    for (i, hi) in h.iter().enumerate() {
        torsion &= killed_by_powers(k, i as i32, j, ideal, &powers, hi)?;
    }
    Ok(DegreeTriangle {
        null,
        exact,
        torsion,
    })
}

/// Every class of `H^i(C)⟨j⟩` is sent into boundaries by `x_s^{e_s}` for each generator.
fn killed_by_powers(
    c: &GradedComplex,
    i: i32,
    j: i64,
    ideal: &IdealSpec,
    powers: &[u32],
    h: &Subquotient,
) -> Result<bool, Error> {
    if h.group.is_zero() {
        return Ok(true);
    }
    let term = c.term(i);
    for ((x, &deg), &e) in ideal.generators().iter().zip(ideal.degrees()).zip(powers) {
        let shift = deg * e as i64;
        let act = term.action_matrix(&x.pow(e), shift, j);
        let landing = c.homology_at(i, j + shift)?;
        if !landing.boundaries.contains(&h.cycles.image(&act)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Local cohomology, the module, and the null part in one window, with the
/// long exact sequence checked at the Koszul power where everything is stable.
pub fn colocalization_triangle(
    m: &GradedModule,
    ideal: &IdealSpec,
    window: Window,
    policy: StabilizationPolicy,
) -> Result<TriangleResult, Error> {
    let (local, runs) = local_cohomology_with_runs(m, ideal, window, policy)?;
    let pieces: Vec<(i64, DegreeTriangle)> = runs
        .par_iter()
        .map(|(j, run)| triangle_at(m, ideal, *j, run).map(|t| (*j, t)))
        .collect::<Result<_, _>>()?;
    let mut cell = BTreeMap::new();
    let mut module = BTreeMap::new();
    let mut null = BTreeMap::new();
    let mut les_verified = true;
    let mut cell_torsion_verified = true;
    for ((i, j), e) in &local.entries {
        cell.insert((-(*i as i32), *j), e.group.clone());
    }
    for (j, t) in pieces {
        module.insert((0, j), m.realize_degree(j));
        for (k, sq) in t.null.iter().enumerate() {
            null.insert((-(k as i32), j), sq.group.clone());
        }
        les_verified &= t.exact;
        cell_torsion_verified &= t.torsion;
    }
    Ok(TriangleResult {
        cell,
        module,
        null,
        les_verified,
        cell_torsion_verified,
        local,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularVerdict {
    pub cellular: bool,
    pub certificate: RadicalCertificate,
    /// `(i, j)` spots holding a class that is not torsion.
    pub failures: Vec<(i32, i64)>,
}

/// Whether every cohomology group of `c` in the window is `I`-power torsion.
pub fn is_cellular(
    c: &GradedComplex,
    ideal: &IdealSpec,
    window: Window,
    options: RadicalOptions,
) -> Result<CellularVerdict, Error> {
    let Some((a, b)) = c.support() else {
        return Ok(CellularVerdict {
            cellular: true,
            certificate: RadicalCertificate::Certified { bound: window.min },
            failures: Vec::new(),
        });
    };
    let mut bound: Option<i64> = Some(i64::MIN);
    for m in c.terms().values() {
        bound = match (bound, m.grading_bound(window.max)) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
    }
    if options.require_certified && bound.is_none() {
        return Err(Error::WindowTooSmall(format!(
            "a term has no grading bound up to degree {}",
            window.max
        )));
    }
    let certificate = match bound {
        Some(b) => RadicalCertificate::Certified { bound: b },
        None => RadicalCertificate::WithinWindow {
            n_max: options.n_max,
        },
    };
    let spots: Vec<(i32, i64)> = (a..=b)
        .flat_map(|i| window.degrees().map(move |j| (i, j)))
        .collect();
    let results: Vec<((i32, i64), bool)> = spots
        .into_par_iter()
        .map(|(i, j)| {
            let powers: Vec<u32> = ideal
                .degrees()
                .iter()
                .map(|&x| match bound {
                    Some(b) if b >= j => ((b - j) / x + 1) as u32,
                    Some(_) => 1,
                    None => options.n_max,
                })
                .collect();
            let h = c.homology_at(i, j)?;
            Ok(((i, j), killed_by_powers(c, i, j, ideal, &powers, &h)?))
        })
        .collect::<Result<_, Error>>()?;
    let failures: Vec<(i32, i64)> = results
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(s, _)| s)
        .collect();
    Ok(CellularVerdict {
        cellular: failures.is_empty(),
        certificate,
        failures,
    })
}
