//! Commutants, bounded centralizers and discrete U-duality groups.
//!
//! Centralizers in `Sp_t(2n, ℤ)` are infinite in general. What is computed
//! here is exact but box-limited: the commutant lattice, a membership
//! predicate, and enumeration of all members whose entries lie in
//! `[−bound, bound]`. Scalar manifolds are replaced by finite point sets with
//! a finite isometry group and one taming per point.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact_linalg::{canonical_column_basis, json, kernel_lattice, IntegerMatrix};
use crate::polarization::{matrix_from_rows, matrix_to_rows, PolarizationError, Taming, DEFAULT_TOLERANCE};
use crate::siegel_group::reduce_unit;
use crate::symplectic_lattices::{sp_type_membership, LatticeType};

/// Search volume allowed when no explicit budget is given.
pub const DEFAULT_BUDGET: u128 = 20_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UDualityError {
    #[error("generator {0} is not in the symplectic group of the type")]
    NotInGroup(usize),
    #[error("search volume {volume} exceeds the budget {budget}")]
    BoundTooLargeForBudget { volume: u128, budget: u128 },
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("commutant entries exceed the enumeration range")]
    Overflow,
    #[error(transparent)]
    Polarization(#[from] PolarizationError),
}

/// Finitely many generators of a subgroup of `Sp_t(2n, ℤ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HolonomyRepr", into = "HolonomyRepr")]
pub struct HolonomySubgroup {
    generators: Vec<IntegerMatrix>,
    lattice_type: LatticeType,
}

#[derive(Serialize, Deserialize)]
struct HolonomyRepr {
    generators: Vec<IntegerMatrix>,
    t: Vec<u64>,
}

impl TryFrom<HolonomyRepr> for HolonomySubgroup {
    type Error = String;

    fn try_from(r: HolonomyRepr) -> Result<Self, String> {
        let t = LatticeType::new(r.t).map_err(|e| e.to_string())?;
        HolonomySubgroup::new(r.generators, t).map_err(|e| e.to_string())
    }
}

impl From<HolonomySubgroup> for HolonomyRepr {
    fn from(h: HolonomySubgroup) -> Self {
        HolonomyRepr {
            generators: h.generators,
            t: h.lattice_type.entries().to_vec(),
        }
    }
}

impl HolonomySubgroup {
    pub fn new(generators: Vec<IntegerMatrix>, lattice_type: LatticeType) -> Result<Self, UDualityError> {
        for (i, g) in generators.iter().enumerate() {
            if !sp_type_membership(g, &lattice_type).unwrap_or(false) {
                return Err(UDualityError::NotInGroup(i));
            }
        }
        Ok(Self {
            generators,
            lattice_type,
        })
    }

    /// The trivial subgroup, generated by the identity.
    pub fn trivial(lattice_type: LatticeType) -> Self {
        let dim = 2 * lattice_type.half_rank();
        Self {
            generators: vec![IntegerMatrix::identity(dim)],
            lattice_type,
        }
    }

    pub fn generators(&self) -> &[IntegerMatrix] {
        &self.generators
    }

    pub fn lattice_type(&self) -> &LatticeType {
        &self.lattice_type
    }

    pub fn dim(&self) -> usize {
        2 * self.lattice_type.half_rank()
    }
}

/// Matrix of `vec(X) ↦ vec(Xγ − γX)` with row-major vectorisation.
fn sylvester_map(gamma: &IntegerMatrix) -> IntegerMatrix {
    let m = gamma.rows();
    let mut out = IntegerMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            let col = i * m + j;
            // (E_ij γ)_{i,l} = γ_{j,l};  (γ E_ij)_{k,j} = γ_{k,i}
            for l in 0..m {
                out[(i * m + l, col)] += &gamma[(j, l)];
            }
            for k in 0..m {
                out[(k * m + j, col)] -= &gamma[(k, i)];
            }
        }
    }
    out
}

/// The stacked Sylvester system whose kernel is the commutant.
pub fn sylvester_system(h: &HolonomySubgroup) -> IntegerMatrix {
    let m = h.dim();
    h.generators
        .iter()
        .map(sylvester_map)
        .reduce(|a, b| a.vstack(&b).expect("equal widths"))
        .unwrap_or_else(|| IntegerMatrix::zeros(0, m * m))
}

/// ℤ-basis of `{X : Xγ = γX for all generators}`, as columns holding the
/// row-major vectorisations, in Hermite-canonical form.
pub fn commutant_lattice(h: &HolonomySubgroup) -> IntegerMatrix {
    canonical_column_basis(&kernel_lattice(&sylvester_system(h)))
}

/// The commutant basis as matrices.
pub fn commutant_matrices(h: &HolonomySubgroup) -> Vec<IntegerMatrix> {
    let m = h.dim();
    commutant_lattice(h)
        .columns()
        .into_iter()
        .map(|c| IntegerMatrix::from_entries(m, m, c).expect("m² entries"))
        .collect()
}

/// Exact membership in the centralizer of `h` inside `Sp_t(2n, ℤ)`.
pub fn centralizer_contains(h: &HolonomySubgroup, gamma: &IntegerMatrix) -> bool {
    if !sp_type_membership(gamma, &h.lattice_type).unwrap_or(false) {
        return false;
    }
    h.generators.iter().all(|g| &(gamma * g) == &(g * gamma))
}

fn volume(bound: u64, rank: usize) -> u128 {
    let side = u128::from(2 * bound + 1);
    (0..rank).try_fold(1u128, |acc, _| acc.checked_mul(side)).unwrap_or(u128::MAX)
}

struct Search {
    m: usize,
    bound: i128,
    basis: Vec<Vec<i128>>,
    pivots: Vec<usize>,
    omega: Vec<i128>,
}

impl Search {
    fn in_box(&self, x: &[i128], from: usize, to: usize) -> bool {
        x[from..to].iter().all(|v| v.abs() <= self.bound)
    }

    fn symplectic(&self, x: &[i128]) -> bool {
        let m = self.m;
        // xᵀ Ω x = Ω
        let mut ox = vec![0i128; m * m];
        for i in 0..m {
            for k in 0..m {
                let o = self.omega[i * m + k];
                if o != 0 {
                    for j in 0..m {
                        ox[i * m + j] += o * x[k * m + j];
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                let v: i128 = (0..m).map(|k| x[k * m + i] * ox[k * m + j]).sum();
                if v != self.omega[i * m + j] {
                    return false;
                }
            }
        }
        true
    }

    fn descend(&self, j: usize, x: Vec<i128>, out: &mut Vec<Vec<i128>>) {
        let checked_to = if j == 0 { 0 } else { self.pivots[j - 1] + 1 };
        if j == self.basis.len() {
            if self.in_box(&x, checked_to, x.len()) && self.symplectic(&x) {
                out.push(x);
            }
            return;
        }
        let p = self.pivots[j];
        if !self.in_box(&x, checked_to, p) {
            return;
        }
        for c in self.choices(j, &x) {
            let mut y = x.clone();
            for (yi, bi) in y.iter_mut().zip(&self.basis[j]) {
                *yi += c * bi;
            }
            self.descend(j + 1, y, out);
        }
    }

    /// Coefficients of the `j`-th basis vector that keep the pivot entry in the box.
    fn choices(&self, j: usize, x: &[i128]) -> Vec<i128> {
        let p = self.pivots[j];
        let piv = self.basis[j][p];
        (-self.bound..=self.bound)
            .filter_map(|v| {
                let d = v - x[p];
                (d % piv == 0).then_some(d / piv)
            })
            .collect()
    }
}

/// Every element of the centralizer of `h` in `Sp_t(2n, ℤ)` with entries in
/// `[−bound, bound]`, sorted by row-major entries.
///
/// The search runs over commutant-lattice coordinates; `budget` caps
/// `(2·bound + 1)^rank`.
pub fn centralizer_enumerate(
    h: &HolonomySubgroup,
    bound: u64,
    budget: u128,
) -> Result<Vec<IntegerMatrix>, UDualityError> {
    if bound == 0 {
        return Err(UDualityError::ZeroBound);
    }
    let m = h.dim();
    let lattice = commutant_lattice(h);
    let rank = lattice.cols();
    let vol = volume(bound, rank);
    if vol > budget {
        return Err(UDualityError::BoundTooLargeForBudget { volume: vol, budget });
    }
    let to_i128 = |x: &BigInt| x.to_i128().ok_or(UDualityError::Overflow);
    let basis: Vec<Vec<i128>> = lattice
        .columns()
        .iter()
        .map(|c| c.iter().map(to_i128).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let pivots: Vec<usize> = basis
        .iter()
        .map(|b| b.iter().position(|v| *v != 0).expect("nonzero basis vector"))
        .collect();
    let omega: Vec<i128> = h
        .lattice_type
        .omega()
        .entries()
        .iter()
        .map(to_i128)
        .collect::<Result<_, _>>()?;
    let search = Search {
        m,
        bound: i128::from(bound),
        basis,
        pivots,
        omega,
    };

    let zero = vec![0i128; m * m];
    let mut found: Vec<Vec<i128>> = if rank == 0 {
        let mut out = Vec::new();
        search.descend(0, zero, &mut out);
        out
    } else {
        let slabs = if search.in_box(&zero, 0, search.pivots[0]) {
            search.choices(0, &zero)
        } else {
            Vec::new()
        };
        slabs
            .into_par_iter()
            .flat_map_iter(|c| {
                let start: Vec<i128> = search.basis[0].iter().map(|b| c * b).collect();
                let mut out = Vec::new();
                search.descend(1, start, &mut out);
                out
            })
            .collect()
    };
    found.sort();
    Ok(found
        .into_iter()
        .map(|x| IntegerMatrix::from_entries(m, m, x.into_iter().map(BigInt::from).collect()).expect("m² entries"))
        .collect())
}

/// Finite model of a scalar manifold: points, a finite isometry group acting
/// by permutations, and one taming per point for a fixed `Ω_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct FiniteScalarModel {
    points: usize,
    isometries: Vec<Vec<usize>>,
    tamings: Vec<Taming>,
    lattice_type: LatticeType,
    tol: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    points: usize,
    isometries: Vec<Vec<usize>>,
    tamings: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

impl TryFrom<ModelRepr> for FiniteScalarModel {
    type Error = String;

    fn try_from(r: ModelRepr) -> Result<Self, String> {
        let js = r
            .tamings
            .iter()
            .map(|rows| matrix_from_rows(rows))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let t = match r.t {
            Some(t) => LatticeType::new(t).map_err(|e| e.to_string())?,
            None => LatticeType::principal(js.first().map_or(0, |j| j.nrows() / 2)),
        };
        FiniteScalarModel::new(r.points, r.isometries, js, t, r.tol.unwrap_or(DEFAULT_TOLERANCE))
            .map_err(|e| e.to_string())
    }
}

impl From<FiniteScalarModel> for ModelRepr {
    fn from(m: FiniteScalarModel) -> Self {
        ModelRepr {
            points: m.points,
            isometries: m.isometries,
            tamings: m.tamings.iter().map(|t| matrix_to_rows(t.j())).collect(),
            t: Some(m.lattice_type.entries().to_vec()),
            tol: Some(m.tol),
        }
    }
}

fn compose_perm(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&p| f[p]).collect()
}

fn invert_perm(f: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; f.len()];
    for (p, &q) in f.iter().enumerate() {
        inv[q] = p;
    }
    inv
}

impl FiniteScalarModel {
    /// Validates the tamings and replaces the isometries by the group they
    /// generate, sorted, so index 0 is the identity.
    pub fn new(
        points: usize,
        isometries: Vec<Vec<usize>>,
        tamings: Vec<DMatrix<f64>>,
        lattice_type: LatticeType,
        tol: f64,
    ) -> Result<Self, UDualityError> {
        let invalid = |m: String| UDualityError::InvalidModel(m);
        for (i, f) in isometries.iter().enumerate() {
            let mut seen = vec![false; points];
            if f.len() != points || f.iter().any(|&p| p >= points || std::mem::replace(&mut seen[p], true)) {
                return Err(invalid(format!("isometry {i} is not a permutation of {points} points")));
            }
        }
        if tamings.len() != points {
            return Err(invalid(format!("{} tamings for {points} points", tamings.len())));
        }
        let omega = lattice_type.omega();
        let tamings = tamings
            .into_iter()
            .enumerate()
            .map(|(p, j)| Taming::new(j, omega.clone(), tol).map_err(|e| invalid(format!("point {p}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;

        let mut group: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier: Vec<Vec<usize>> = vec![(0..points).collect()];
        while let Some(f) = frontier.pop() {
            if !group.insert(f.clone()) {
                continue;
            }
            for g in &isometries {
                let fg = compose_perm(&f, g);
                if !group.contains(&fg) {
                    frontier.push(fg);
                }
            }
        }
        Ok(Self {
            points,
            isometries: group.into_iter().collect(),
            tamings,
            lattice_type,
            tol,
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn isometries(&self) -> &[Vec<usize>] {
        &self.isometries
    }

    pub fn tamings(&self) -> &[Taming] {
        &self.tamings
    }

    pub fn lattice_type(&self) -> &LatticeType {
        &self.lattice_type
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        2 * self.lattice_type.half_rank()
    }

    /// Index of a permutation in the isometry group.
    pub fn isometry_index(&self, f: &[usize]) -> Option<usize> {
        self.isometries.binary_search_by(|g| g.as_slice().cmp(f)).ok()
    }

    /// `max_p ‖U·J(p)·U⁻¹ − J(f(p))‖_∞`.
    pub fn compatibility_residual(&self, isometry: usize, rotation: &IntegerMatrix) -> f64 {
        let f = &self.isometries[isometry];
        let u = rotation.to_f64();
        let uinv = rotation
            .inverse_unimodular()
            .expect("symplectic matrices are unimodular")
            .to_f64();
        (0..self.points)
            .map(|p| {
                let moved = &u * self.tamings[p].j() * &uinv;
                (moved - self.tamings[f[p]].j()).amax()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_compatible(&self, isometry: usize, rotation: &IntegerMatrix) -> bool {
        let scale = self.tamings.iter().map(|t| t.j().amax()).fold(1.0, f64::max);
        self.compatibility_residual(isometry, rotation) <= self.tol * scale * scale.max(1.0)
    }
}

/// `(f, u, U)`: an isometry (by index into the model's group), an optional
/// torus-valued gauge part with one point per model point, and a rotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UDualityElement {
    pub isometry: usize,
    pub rotation: IntegerMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_torus")]
    pub torus: Option<Vec<Vec<BigRational>>>,
}

mod opt_torus {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Point(#[serde(with = "json::rational_vec")] Vec<BigRational>);

    pub fn serialize<S: serde::Serializer>(v: &Option<Vec<Vec<BigRational>>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|pts| pts.iter().map(|p| Point(p.clone())).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Vec<Vec<BigRational>>>, D::Error> {
        Ok(Option::<Vec<Point>>::deserialize(d)?.map(|pts| pts.into_iter().map(|p| p.0).collect()))
    }
}

impl UDualityElement {
    pub fn new(isometry: usize, rotation: IntegerMatrix) -> Self {
        Self {
            isometry,
            rotation,
            torus: None,
        }
    }

    pub fn identity(model: &FiniteScalarModel) -> Self {
        Self::new(0, IntegerMatrix::identity(model.dim()))
    }

    /// `(id, u, I)`.
    pub fn translation(model: &FiniteScalarModel, u: Vec<Vec<BigRational>>) -> Self {
        Self {
            isometry: 0,
            rotation: IntegerMatrix::identity(model.dim()),
            torus: Some(u.iter().map(|p| p.iter().map(reduce_unit).collect()).collect()),
        }
    }

    fn torus_or_zero(&self, model: &FiniteScalarModel) -> Vec<Vec<BigRational>> {
        self.torus
            .clone()
            .unwrap_or_else(|| vec![vec![BigRational::zero(); model.dim()]; model.points()])
    }

    pub fn is_pure_translation(&self) -> bool {
        self.isometry == 0 && self.rotation.is_identity()
    }
}

/// Checks shapes, group membership and the compatibility condition.
pub fn validate_element(model: &FiniteScalarModel, e: &UDualityElement) -> Result<(), UDualityError> {
    let bad = |m: String| UDualityError::InvalidElement(m);
    if e.isometry >= model.isometries.len() {
        return Err(bad(format!("isometry index {} out of range", e.isometry)));
    }
    if !sp_type_membership(&e.rotation, &model.lattice_type).unwrap_or(false) {
        return Err(bad("rotation is not in the symplectic group of the type".into()));
    }
    if let Some(u) = &e.torus {
        if u.len() != model.points || u.iter().any(|p| p.len() != model.dim()) {
            return Err(bad("torus part has the wrong shape".into()));
        }
    }
    if !model.is_compatible(e.isometry, &e.rotation) {
        return Err(bad(format!(
            "U·J·U⁻¹ differs from J∘f by {:e}",
            model.compatibility_residual(e.isometry, &e.rotation)
        )));
    }
    Ok(())
}

fn act_on_torus(u: &IntegerMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..u.rows())
        .map(|i| {
            let s = (0..u.cols()).fold(BigRational::zero(), |acc, j| {
                acc + BigRational::from_integer(u[(i, j)].clone()) * &v[j]
            });
            reduce_unit(&s)
        })
        .collect()
}

/// `(f₁, u₁, U₁)(f₂, u₂, U₂) = (f₁f₂, u₁ + U₁·(u₂∘f₁⁻¹), U₁U₂)`.
pub fn compose_elements(model: &FiniteScalarModel, x: &UDualityElement, y: &UDualityElement) -> UDualityElement {
    let f1 = &model.isometries[x.isometry];
    let f2 = &model.isometries[y.isometry];
    let f = compose_perm(f1, f2);
    let isometry = model.isometry_index(&f).expect("isometries form a group");
    let rotation = &x.rotation * &y.rotation;
    let torus = if x.torus.is_none() && y.torus.is_none() {
        None
    } else {
        let u1 = x.torus_or_zero(model);
        let u2 = y.torus_or_zero(model);
        let f1inv = invert_perm(f1);
        Some(
            (0..model.points)
                .map(|p| {
                    let moved = act_on_torus(&x.rotation, &u2[f1inv[p]]);
                    u1[p].iter().zip(&moved).map(|(a, b)| reduce_unit(&(a + b))).collect()
                })
                .collect(),
        )
    };
    UDualityElement {
        isometry,
        rotation,
        torus,
    }
}

/// `(f, u, U)⁻¹ = (f⁻¹, −U⁻¹·(u∘f), U⁻¹)`.
pub fn invert_element(model: &FiniteScalarModel, x: &UDualityElement) -> UDualityElement {
    let f = &model.isometries[x.isometry];
    let finv = invert_perm(f);
    let uinv = x.rotation.inverse_unimodular().expect("unimodular rotation");
    let torus = x.torus.as_ref().map(|u| {
        (0..model.points)
            .map(|p| {
                let neg: Vec<BigRational> = u[f[p]].iter().map(|v| -v).collect();
                act_on_torus(&uinv, &neg)
            })
            .collect()
    });
    UDualityElement {
        isometry: model.isometry_index(&finv).expect("isometries form a group"),
        rotation: uinv,
        torus,
    }
}

/// `(f, u, U) ↦ (f, U)`.
pub fn adjoint_map(e: &UDualityElement) -> (usize, IntegerMatrix) {
    (e.isometry, e.rotation.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub pairs_checked: usize,
    /// Products whose rotation stays in the entry box.
    pub products_in_box: usize,
    pub closed: bool,
    /// Index pairs whose in-box product is missing from the result.
    pub missing: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberProduct {
    pub elements: Vec<UDualityElement>,
    pub closure: ClosureReport,
}

/// All `(f, U)` with `U` in the bound-box of `Sp_t(2n, ℤ)` and
/// `U·J(p)·U⁻¹ = J(f(p))` at every point, within the model tolerance.
pub fn uduality_fiber_product(
    model: &FiniteScalarModel,
    bound: u64,
    budget: u128,
) -> Result<FiberProduct, UDualityError> {
    let candidates = centralizer_enumerate(&HolonomySubgroup::trivial(model.lattice_type.clone()), bound, budget)?;
    let elements: Vec<UDualityElement> = (0..model.isometries.len())
        .flat_map(|f| {
            candidates
                .iter()
                .filter(move |u| model.is_compatible(f, u))
                .map(move |u| UDualityElement::new(f, u.clone()))
        })
        .collect();

    let index: BTreeMap<(usize, Vec<BigInt>), usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.isometry, e.rotation.entries().to_vec()), i))
        .collect();
    let b = BigInt::from(bound);
    let mut pairs_checked = 0;
    let mut products_in_box = 0;
    let mut missing = Vec::new();
    for (i, x) in elements.iter().enumerate() {
        for (j, y) in elements.iter().enumerate() {
            pairs_checked += 1;
            let p = compose_elements(model, x, y);
            if p.rotation.max_abs() > b {
                continue;
            }
            products_in_box += 1;
            if !index.contains_key(&(p.isometry, p.rotation.entries().to_vec())) {
                missing.push((i, j));
            }
        }
    }
    Ok(FiberProduct {
        elements,
        closure: ClosureReport {
            pairs_checked,
            products_in_box,
            closed: missing.is_empty(),
            missing,
        },
    })
}
