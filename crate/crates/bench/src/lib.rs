//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use coloc_core::module::{GradedModule, IdealSpec};
use coloc_core::ring::{GradedRing, Variable};
use coloc_core::{ExactMatrix, Scalars};

fn var(name: &str, degree: i64) -> Variable {
    Variable {
        name: name.into(),
        degree,
    }
}

/// `ℤ[u,v]/(2u)` with `|u| = 2`, `|v| = 6`, as a module over itself, and `I = (u, v)`.
pub fn stiefel() -> (GradedModule, IdealSpec) {
    let ring = Arc::new(
        GradedRing::parse(Scalars::Integers, vec![var("u", 2), var("v", 6)], &["2*u"])
            .expect("valid ring"),
    );
    let ideal = IdealSpec::maximal(&ring);
    (GradedModule::ring_itself(ring), ideal)
}

/// `𝔽₂[u,y]` with `|u| = 2`, `|y| = 3`, and its maximal ideal.
pub fn mod_two_plane() -> (GradedModule, IdealSpec) {
    let ring = Arc::new(
        GradedRing::parse(
            Scalars::prime_field(2).expect("2 is prime"),
            vec![var("u", 2), var("y", 3)],
            &[],
        )
        .expect("valid ring"),
    );
    let ideal = IdealSpec::maximal(&ring);
    (GradedModule::ring_itself(ring), ideal)
}

/// A dense square integer matrix with entries in `[-20, 20]`, fixed by `seed`.
pub fn dense_matrix(n: usize, seed: u64) -> ExactMatrix {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    ((state >> 33) % 41) as i64 - 20
                })
                .collect()
        })
        .collect();
    ExactMatrix::from_rows(Scalars::Integers, &rows)
}
