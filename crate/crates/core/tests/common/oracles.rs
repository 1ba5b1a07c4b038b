//! Independent brute-force oracles shared by the property suites.

use num_bigint::BigInt;
use siegel_core::exact_linalg::smith_normal_form;
use siegel_core::local_systems::{CohomologyResult, TwistedComplex};
use siegel_core::symplectic_lattices::sp_type_membership;
use siegel_core::uduality::{FiniteScalarModel, HolonomySubgroup};
use siegel_core::IntegerMatrix;

/// Cellular cohomology with ℤ^{2n} coefficients from the incidence matrices
/// alone: `(free rank, torsion)` per degree.
pub fn untwisted_cohomology(c: &TwistedComplex) -> Vec<(usize, Vec<BigInt>)> {
    let r = c.fiber_rank();
    let coboundary = |k: usize| -> (usize, Vec<BigInt>) {
        // δ^k = ∂_{k+1}ᵀ
        match c.boundaries().get(k) {
            Some(b) => {
                let snf = smith_normal_form(&b.transpose());
                (snf.rank(), snf.torsion())
            }
            None => (0, Vec::new()),
        }
    };
    (0..=c.dimension())
        .map(|k| {
            let (rk, _) = coboundary(k);
            let (rprev, tprev) = if k == 0 { (0, Vec::new()) } else { coboundary(k - 1) };
            let free = (c.cells()[k] - rk - rprev) * r;
            let mut torsion: Vec<BigInt> = tprev.iter().flat_map(|t| std::iter::repeat(t.clone()).take(r)).collect();
            torsion.sort();
            (free, torsion)
        })
        .collect()
}

pub fn summary(h: &[CohomologyResult]) -> Vec<(usize, Vec<BigInt>)> {
    h.iter().map(|x| (x.free_rank, x.torsion.clone())).collect()
}

/// Every `m × m` integer matrix with entries in `[−bound, bound]`.
pub fn box_matrices(m: usize, bound: i64) -> Vec<IntegerMatrix> {
    let side = (2 * bound + 1) as usize;
    let total = side.pow((m * m) as u32);
    (0..total)
        .map(|mut idx| {
            let entries: Vec<BigInt> = (0..m * m)
                .map(|_| {
                    let v = (idx % side) as i64 - bound;
                    idx /= side;
                    BigInt::from(v)
                })
                .collect();
            IntegerMatrix::from_entries(m, m, entries).unwrap()
        })
        .collect()
}

pub fn brute_centralizer(h: &HolonomySubgroup, bound: i64) -> Vec<IntegerMatrix> {
    let mut out: Vec<IntegerMatrix> = box_matrices(h.dim(), bound)
        .into_iter()
        .filter(|x| {
            sp_type_membership(x, h.lattice_type()).unwrap() && h.generators().iter().all(|g| &(x * g) == &(g * x))
        })
        .collect();
    out.sort_by_key(|m| m.entries().to_vec());
    out
}

pub fn brute_fiber_product(model: &FiniteScalarModel, bound: i64) -> Vec<(usize, IntegerMatrix)> {
    let mut out = Vec::new();
    for (f, perm) in model.isometries().iter().enumerate() {
        for u in box_matrices(model.dim(), bound) {
            if !sp_type_membership(&u, model.lattice_type()).unwrap() {
                continue;
            }
            let uf = u.to_f64();
            let ui = u.inverse_unimodular().unwrap().to_f64();
            let ok = (0..model.points()).all(|p| {
                let lhs = &uf * model.tamings()[p].j() * &ui;
                (lhs - model.tamings()[perm[p]].j()).amax() < 1e-9
            });
            if ok {
                out.push((f, u));
            }
        }
    }
    out.sort_by_key(|(f, u)| (*f, u.entries().to_vec()));
    out
}
