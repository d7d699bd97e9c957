use crate::complex::{koszul_sign, subset_degree, subsets_of_size};
use crate::error::Error;
use crate::linalg::{subquotient_homology, ExactMatrix, FGAbGroup, Span};
use crate::module::{GradedModule, IdealSpec};
use crate::ring::Poly;

use super::{start_power, StabilizationPolicy};

/// One Čech term at internal degree `j` and truncation `n`: the blocks
/// `M⟨j + n|x_S|⟩ / ker(x_S^n)` for each `S` of the given size.
struct CechTerm {
    subsets: Vec<u32>,
    offsets: Vec<usize>,
    dim: usize,
    relations: ExactMatrix,
}

fn monomial_of(m: &GradedModule, ideal: &IdealSpec, mask: u32) -> Poly {
    let mut p = m.ring().one();
    for (s, g) in ideal.generators().iter().enumerate() {
        if mask & (1 << s) != 0 {
            p = p.mul(g);
        }
    }
    p
}

fn cech_term(m: &GradedModule, ideal: &IdealSpec, size: usize, n: u32, j: i64) -> CechTerm {
    let scalars = m.ring().scalars();
    let subsets = subsets_of_size(ideal.len(), size);
    let mut offsets = Vec::new();
    let mut blocks = Vec::new();
    let mut dim = 0;
    for &s in &subsets {
        let deg = n as i64 * subset_degree(s, ideal.degrees());
        let here = m.realize(j + deg);
        let lattice = if s == 0 {
            Span::from_generators(&here.relations)
        } else {
            let x_s = m.ring().normalize(&monomial_of(m, ideal, s).pow(n));
            let act = m.action_matrix(&x_s, deg, j + deg);
            let there = m.realize(j + 2 * deg);
            Span::preimage(&act, &Span::from_generators(&there.relations))
        };
        offsets.push(dim);
        dim += here.dim();
        blocks.push(lattice.basis_matrix());
    }
    let cols: usize = blocks.iter().map(ExactMatrix::cols).sum();
    let mut relations = ExactMatrix::zeros(scalars, dim, cols);
    let mut c0 = 0;
    for (b, &r0) in blocks.iter().zip(&offsets) {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                relations.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
        c0 += b.cols();
    }
    CechTerm {
        subsets,
        offsets,
        dim,
        relations,
    }
}

/// `± x_s^n` from the `S` block to the `S ∪ {s}` block.
fn cech_differential(
    m: &GradedModule,
    ideal: &IdealSpec,
    from: &CechTerm,
    to: &CechTerm,
    n: u32,
    j: i64,
) -> ExactMatrix {
    let mut d = ExactMatrix::zeros(m.ring().scalars(), to.dim, from.dim);
    for (a, &s) in from.subsets.iter().enumerate() {
        let src_deg = j + n as i64 * subset_degree(s, ideal.degrees());
        for (x, (g, &gd)) in ideal.generators().iter().zip(ideal.degrees()).enumerate() {
            if s & (1 << x) != 0 {
                continue;
            }
            let b = to
                .subsets
                .iter()
                .position(|&u| u == s | (1 << x))
                .expect("superset listed");
            let power = m
                .ring()
                .normalize(&g.pow(n).scale(&koszul_sign(s, x).into()));
            let block = m.action_matrix(&power, gd * n as i64, src_deg);
            for r in 0..block.rows() {
                for c in 0..block.cols() {
                    let v = block.get(r, c);
                    if v.sign() != num_bigint::Sign::NoSign {
                        d.set(to.offsets[b] + r, from.offsets[a] + c, v.clone());
                    }
                }
            }
        }
    }
    d
}

fn cech_homology(
    m: &GradedModule,
    ideal: &IdealSpec,
    i: usize,
    n: u32,
    j: i64,
) -> Result<FGAbGroup, Error> {
    let count = ideal.len();
    let scalars = m.ring().scalars();
    let here = cech_term(m, ideal, i, n, j);
    let d_in = if i == 0 {
        ExactMatrix::zeros(scalars, here.dim, 0)
    } else {
        let prev = cech_term(m, ideal, i - 1, n, j);
        cech_differential(m, ideal, &prev, &here, n, j)
    };
    let (d_out, next_rel) = if i == count {
        (
            ExactMatrix::zeros(scalars, 0, here.dim),
            ExactMatrix::zeros(scalars, 0, 0),
        )
    } else {
        let next = cech_term(m, ideal, i + 1, n, j);
        (
            cech_differential(m, ideal, &here, &next, n, j),
            next.relations.clone(),
        )
    };
    Ok(subquotient_homology(&d_in, &d_out, &here.relations, &next_rel)?.group)
}

/// `H^i_I(M)⟨j⟩` from the Čech complex of truncated localizations, doubling
/// the truncation until two successive answers agree.
pub fn cech_local_cohomology(
    m: &GradedModule,
    ideal: &IdealSpec,
    i: usize,
    j: i64,
    policy: StabilizationPolicy,
) -> Result<FGAbGroup, Error> {
    if i > ideal.len() {
        return Ok(FGAbGroup::zero());
    }
    let mut n = start_power(ideal, m.presentation_degree(), j);
    let mut previous = cech_homology(m, ideal, i, n, j)?;
    loop {
        let next_n = n * 2;
        if next_n > policy.max_power {
            return Err(Error::StabilizationNotReached {
                i,
                j,
                max_power: policy.max_power,
            });
        }
        let current = cech_homology(m, ideal, i, next_n, j)?;
        if current == previous {
            return Ok(current);
        }
        previous = current;
        n = next_n;
    }
}
