use std::collections::BTreeMap;

use super::{
    idempotents, q, semidirect, CornerData, FiniteGroup, GroupAction, Side, TableAlgebra,
    TableModule,
};
use crate::error::Error;
use crate::linalg::{FGAbGroup, RationalMatrix};

/// The two-sheeted cover `S^{2n} → ℝP^{2n}` seen through loop space homology:
/// `A = ℚ⟨x⟩ ⋊ ℤ/2` with `|x| = 2n − 1` and `gxg = −x`, and the fiber's
/// homology `ℚ[ℤ/2]` in degree zero.
#[derive(Clone, Debug)]
pub struct Rp2nExample {
    pub n: u32,
    pub algebra: TableAlgebra,
    pub corner: CornerData,
    pub fiber_homology: TableModule,
    pub group_algebra: TableAlgebra,
    /// Rational cohomology of `S^{2n}` placed at total degree `−k`.
    pub target: BTreeMap<i64, FGAbGroup>,
}

pub fn rp2n(n: u32, top: i64) -> Result<Rp2nExample, Error> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let x = 2 * n as i64 - 1;
    let u = TableAlgebra::tensor_algebra("x", x, top)?;
    let group = FiniteGroup::cyclic(2);
    let action = GroupAction::new(group.clone(), &u, |g, d| {
        let dim = u.dim(d);
        let flips = g == 1 && d % x == 0 && (d / x) % 2 == 1;
        RationalMatrix::identity(dim).scale(&q(if flips { -1 } else { 1 }))
    });
    let algebra = semidirect(&u, &action)?;
    let corner = idempotents(&algebra)?;
    let fiber_homology = TableModule::concentrated(&algebra, Side::Right, 0, 2, |h| {
        let mut m = RationalMatrix::zeros(2, 2);
        for g in 0..2 {
            m.set(group.mul(g, h), g, q(1));
        }
        m
    })?;
    let target = BTreeMap::from([(0, FGAbGroup::free(1)), (-2 * n as i64, FGAbGroup::free(1))]);
    Ok(Rp2nExample {
        n,
        algebra,
        corner,
        fiber_homology,
        group_algebra: TableAlgebra::group_algebra(&group),
        target,
    })
}
