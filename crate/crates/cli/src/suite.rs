//! Seeded randomized invariant suites, shared by `coloc check` and the
//! acceptance target.

use std::sync::Arc;
use std::time::Instant;

use coloc_core::colocal::{
    cech_local_cohomology, colocalization_triangle, grading_bound_check, StabilizationPolicy,
    TriangleResult, Window,
};
use coloc_core::complex::koszul;
use coloc_core::linalg::smith_normal_form;
use coloc_core::module::{torsion_radical, Generator, GradedModule, IdealSpec, RadicalOptions};
use coloc_core::ring::{GradedRing, Poly, Variable};
use coloc_core::specpage::e2_page;
use coloc_core::{ExactMatrix, Scalars};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub snf_cases: usize,
    pub snf_max_dim: usize,
    pub snf_entry_bound: i64,
    /// Split evenly between `ℤ[v]` and `𝔽₃[u,v]`.
    pub module_cases: usize,
    pub max_window_width: i64,
    pub bounded_cases: usize,
}

impl SuiteConfig {
    pub fn from_json(src: &str) -> Result<Self, CliError> {
        serde_json::from_str(src).map_err(|e| CliError::Validation(format!("suite config: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub name: String,
    /// Inputs drawn.
    pub cases: usize,
    /// Individual comparisons made.
    pub checks: usize,
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl Outcome {
    fn new(name: &str) -> Self {
        Outcome {
            name: name.into(),
            cases: 0,
            checks: 0,
            failures: Vec::new(),
            seconds: 0.0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }
}

pub fn integer_polynomials() -> Arc<GradedRing> {
    let v = Variable {
        name: "v".into(),
        degree: 2,
    };
    Arc::new(GradedRing::parse(Scalars::Integers, vec![v], &[]).expect("valid ring"))
}

pub fn ternary_plane() -> Arc<GradedRing> {
    let vars = ["u", "v"]
        .iter()
        .map(|n| Variable {
            name: n.to_string(),
            degree: 2,
        })
        .collect();
    Arc::new(
        GradedRing::parse(Scalars::prime_field(3).expect("3 is prime"), vars, &[])
            .expect("valid ring"),
    )
}

fn random_element(ring: &GradedRing, d: i64, rng: &mut impl Rng) -> Poly {
    let basis = ring.monomials(d);
    let mut p = Poly::zero();
    for mono in &basis.monomials {
        let c: i64 = rng.gen_range(-3..=3);
        if c != 0 {
            p = p.add(&Poly::term(mono.clone(), c));
        }
    }
    ring.normalize(&p)
}

/// One or two generators in even degrees `0..=4` and up to three random
/// homogeneous relations.
pub fn random_module(ring: &Arc<GradedRing>, rng: &mut impl Rng) -> GradedModule {
    let ngens = rng.gen_range(1..=2);
    let step = ring.min_variable_degree();
    let gens: Vec<Generator> = (0..ngens)
        .map(|k| Generator::new(format!("e{k}"), step * rng.gen_range(0..3)))
        .collect();
    let low = gens.iter().map(|g| g.degree).min().unwrap_or(0);
    let mut relations = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let target = low + step * rng.gen_range(0..4);
        let rel: Vec<Poly> = gens
            .iter()
            .map(|g| random_element(ring, target - g.degree, rng))
            .collect();
        if rel.iter().any(|p| !p.is_zero()) {
            relations.push(rel);
        }
    }
    GradedModule::new(ring.clone(), gens, relations).expect("homogeneous by construction")
}

/// A random module cut down to finite length by killing `x^e · g` for every
/// variable `x` and generator `g`.
pub fn random_bounded_module(ring: &Arc<GradedRing>, rng: &mut impl Rng) -> GradedModule {
    let m = random_module(ring, rng);
    let n = m.ngens();
    let mut kills = Vec::new();
    for k in 0..n {
        for v in 0..ring.nvars() {
            let e = rng.gen_range(1..=3);
            let mut rel = vec![Poly::zero(); n];
            rel[k] = Poly::var(v, ring.nvars()).pow(e);
            kills.push(rel);
        }
    }
    m.quotient(kills).expect("homogeneous by construction")
}

fn random_window(cfg: &SuiteConfig, rng: &mut impl Rng) -> Window {
    let width = rng.gen_range(8..=cfg.max_window_width.clamp(8, 24));
    let lo = rng.gen_range(-16..=-4);
    Window::new(lo, lo + width).expect("nonempty")
}

fn random_matrix(cfg: &SuiteConfig, rng: &mut impl Rng) -> ExactMatrix {
    let rows = rng.gen_range(0..=cfg.snf_max_dim);
    let cols = rng.gen_range(0..=cfg.snf_max_dim);
    let b = cfg.snf_entry_bound;
    let sparse = rng.gen_bool(0.3);
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if sparse && rng.gen_bool(0.6) {
                        0
                    } else {
                        rng.gen_range(-b..=b)
                    }
                })
                .collect()
        })
        .collect();
    if rows == 0 {
        return ExactMatrix::zeros(Scalars::Integers, 0, cols);
    }
    ExactMatrix::from_rows(Scalars::Integers, &data)
}

fn is_unit(x: &BigInt) -> bool {
    x.abs() == BigInt::from(1)
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// `gcd` of all `k × k` minors.
fn determinantal_divisor(a: &ExactMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rows in combinations(a.rows(), k) {
        for cols in combinations(a.cols(), k) {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|&r| cols.iter().map(|&c| a.get(r, c).clone()).collect())
                .collect();
            let m = ExactMatrix::from_big_rows(Scalars::Integers, minor, k);
            g = gcd(&g, &m.determinant());
        }
    }
    g
}

fn check_snf(a: &ExactMatrix, out: &mut Outcome, case: usize) {
    let s = smith_normal_form(a);
    let (r, c) = (a.rows(), a.cols());
    out.check(s.u.mul(a).mul(&s.v) == s.d, || {
        format!("case {case}: U·A·V ≠ D")
    });
    out.check(is_unit(&s.u.determinant()), || {
        format!("case {case}: U not unimodular")
    });
    out.check(is_unit(&s.v.determinant()), || {
        format!("case {case}: V not unimodular")
    });
    let mut diagonal = true;
    for i in 0..r {
        for j in 0..c {
            if i != j && !s.d.get(i, j).is_zero() {
                diagonal = false;
            }
        }
    }
    out.check(diagonal, || format!("case {case}: D not diagonal"));
    let diag: Vec<BigInt> = (0..r.min(c)).map(|i| s.d.get(i, i).clone()).collect();
    out.check(diag.iter().all(|x| !x.is_negative()), || {
        format!("case {case}: negative diagonal entry")
    });
    let chain = diag.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            (&w[1] % &w[0]).is_zero()
        }
    });
    out.check(chain, || format!("case {case}: divisibility chain broken"));
    // Small matrices: the diagonal must match the determinantal divisors.
    if r.max(c) <= 5 {
        let mut prefix = BigInt::from(1);
        let mut agree = true;
        for (k, d) in diag.iter().enumerate() {
            prefix *= d;
            if determinantal_divisor(a, k + 1) != prefix {
                agree = false;
            }
        }
        out.check(agree, || {
            format!("case {case}: invariant factors disagree with minors")
        });
    }
}

/// Criterion (a): Smith normal form validity.
pub fn snf_suite(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Outcome::new("smith normal form");
    for case in 0..cfg.snf_cases {
        let a = random_matrix(cfg, &mut rng);
        check_snf(&a, &mut out, case);
        out.cases += 1;
    }
    out.seconds = start.elapsed().as_secs_f64();
    out
}

/// Suites (b) through (e), each tallied separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleOutcomes {
    pub radical: Outcome,
    pub cech: Outcome,
    pub vanishing: Outcome,
    pub exactness: Outcome,
    pub grading_bound: Outcome,
}

fn run_checks(
    m: &GradedModule,
    ideal: &IdealSpec,
    tri: &TriangleResult,
    tag: &str,
    outs: &mut ModuleOutcomes,
) {
    let lc = &tri.local;
    let count = ideal.len();
    let mut vanish = lc.vanishes_above_generators();
    for (&j, &t) in &lc.final_power {
        let k = koszul(m, ideal, t);
        for extra in 1..=2 {
            vanish &= k
                .homology_at((count + extra) as i32, j)
                .is_ok_and(|h| h.group.is_zero());
        }
    }
    outs.vanishing
        .check(vanish, || format!("{tag}: H^i above {count} nonzero"));
    outs.vanishing.cases += 1;
    outs.exactness.check(tri.les_verified, || {
        format!("{tag}: long exact sequence fails")
    });
    outs.exactness.check(tri.cell_torsion_verified, || {
        format!("{tag}: cell classes not torsion")
    });
    outs.exactness.cases += 1;
}

pub fn module_suites(cfg: &SuiteConfig) -> ModuleOutcomes {
    let mut outs = ModuleOutcomes {
        radical: Outcome::new("H0 is the torsion radical"),
        cech: Outcome::new("Koszul agrees with Cech"),
        vanishing: Outcome::new("vanishing above the number of generators"),
        exactness: Outcome::new("long exact sequence on triangles"),
        grading_bound: Outcome::new("grading bound preserved"),
    };
    let policy = StabilizationPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let rings = [integer_polynomials(), ternary_plane()];

    let start = Instant::now();
    for case in 0..cfg.module_cases {
        let ring = &rings[case % 2];
        let m = random_module(ring, &mut rng);
        let w = random_window(cfg, &mut rng);
        let ideal = IdealSpec::maximal(ring);
        let tag = format!("module case {case}");
        let tri = match colocalization_triangle(&m, &ideal, w, policy) {
            Ok(t) => t,
            Err(e) => {
                outs.radical.check(false, || format!("{tag}: {e}"));
                continue;
            }
        };
        run_checks(&m, &ideal, &tri, &tag, &mut outs);
        let lc = &tri.local;
        match torsion_radical(&m, &ideal, w.min, w.max, RadicalOptions::default()) {
            Ok(rad) => {
                for j in w.degrees() {
                    outs.radical
                        .check(rad.group(j) == Some(&lc.group(0, j)), || {
                            format!("{tag}: H0 differs from t(M) in degree {j}")
                        });
                }
            }
            Err(e) => outs.radical.check(false, || format!("{tag}: {e}")),
        }
        outs.radical.cases += 1;
        for j in w.degrees() {
            for i in 0..=ideal.len() {
                let c = cech_local_cohomology(&m, &ideal, i, j, policy);
                outs.cech.check(c.as_ref() == Ok(&lc.group(i, j)), || {
                    format!("{tag}: Cech differs at H^{i}<{j}>")
                });
            }
        }
        outs.cech.cases += 1;
    }
    let module_time = start.elapsed().as_secs_f64();
    outs.radical.seconds = module_time;
    outs.cech.seconds = module_time;

    let start = Instant::now();
    for case in 0..cfg.bounded_cases {
        let ring = &rings[case % 2];
        let m = random_bounded_module(ring, &mut rng);
        let ideal = IdealSpec::maximal(ring);
        let tag = format!("bounded case {case}");
        let limit = m.max_generator_degree().unwrap_or(0) + 8 * ring.max_variable_degree();
        let Some(b) = m.grading_bound(limit) else {
            outs.grading_bound
                .check(false, || format!("{tag}: no grading bound found"));
            continue;
        };
        let b = b.max(0);
        let lo = b - rng.gen_range(6..=16);
        let hi = b + rng.gen_range(2..=6);
        let w = Window::new(lo, hi).expect("nonempty");
        let tri = match colocalization_triangle(&m, &ideal, w, policy) {
            Ok(t) => t,
            Err(e) => {
                outs.grading_bound.check(false, || format!("{tag}: {e}"));
                continue;
            }
        };
        run_checks(&m, &ideal, &tri, &tag, &mut outs);
        let lc = &tri.local;
        outs.grading_bound.check(grading_bound_check(lc, b), || {
            format!("{tag}: class above {b}")
        });
        outs.grading_bound
            .check(e2_page(lc).respects_grading_bound(), || {
                format!("{tag}: page exceeds its bound")
            });
        // A finite length module is all torsion: H^0 = M and nothing above.
        for j in w.degrees() {
            outs.grading_bound
                .check(lc.group(0, j) == m.realize_degree(j), || {
                    format!("{tag}: H0<{j}> is not M<{j}>")
                });
            for i in 1..=ideal.len() {
                outs.grading_bound.check(lc.group(i, j).is_zero(), || {
                    format!("{tag}: H^{i}<{j}> nonzero")
                });
            }
        }
        outs.grading_bound.cases += 1;
    }
    outs.grading_bound.seconds = start.elapsed().as_secs_f64();
    let total = module_time + outs.grading_bound.seconds;
    outs.vanishing.seconds = total;
    outs.exactness.seconds = total;
    outs
}
