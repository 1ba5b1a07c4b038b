//! ℤ^{2n}-local systems on finite Δ-complexes and their twisted cohomology.
//!
//! A k-simplex lists its k+1 faces; face `i` omits vertex `i`, so an edge
//! `[v0, v1]` is written `[v1, v0]`. The fiber of a simplex is the fiber at
//! its first vertex, and the transport on an edge maps the fiber at `v1`
//! into the fiber at `v0`. The coboundary is
//!
//! `(dx)(σ) = γ_{v0v1}·x(∂₀σ) + Σ_{i≥1} (−1)^i x(∂ᵢσ)`,
//!
//! which squares to zero exactly when `γ_{v0v1}·γ_{v1v2} = γ_{v0v2}` on
//! every triangle. Cochains are flat integer vectors indexed by
//! `cell · 2n + component`.
//!
//! Complexes given only by incidence matrices are accepted when they carry
//! no twisting above degree zero: either every transport is trivial or
//! there are no cells of dimension two or more.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact_linalg::{json, kernel_lattice, rational_vec, smith_normal_form, IntegerMatrix, RationalMatrix};
use crate::symplectic_lattices::{sp_type_membership, LatticeType};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LocalSystemError {
    #[error("malformed complex: {0}")]
    Malformed(String),
    #[error("invalid local system: {0}")]
    InvalidComplex(String),
    #[error("not a cocycle: coboundary is nonzero on cells {0:?}")]
    NotACocycle(Vec<usize>),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Attaching data of the cells of one dimension.
#[derive(Debug, Clone, PartialEq)]
enum Attaching {
    /// `faces[k-1][σ]` are the faces of the k-simplex `σ`.
    Faces(Vec<Vec<Vec<usize>>>),
    /// Edge endpoints `(v0, v1)` derived from `∂₁`.
    Incidence(Vec<(usize, usize)>),
}

/// A finite Δ-complex with symplectic transports on its edges.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedComplex {
    lattice_type: LatticeType,
    cells: Vec<usize>,
    attaching: Attaching,
    boundaries: Vec<IntegerMatrix>,
    transports: Vec<IntegerMatrix>,
}

#[derive(Serialize, Deserialize)]
struct TransportEntry {
    cell: usize,
    gamma: IntegerMatrix,
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    cells: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    faces: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundaries: Option<Vec<IntegerMatrix>>,
    #[serde(default)]
    transports: Vec<TransportEntry>,
    t: Vec<u64>,
}

impl Serialize for TwistedComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let faces = match &self.attaching {
            Attaching::Faces(f) => Some(f.clone()),
            Attaching::Incidence(_) => None,
        };
        let transports = self
            .transports
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_identity())
            .map(|(cell, g)| TransportEntry { cell, gamma: g.clone() })
            .collect();
        ComplexRepr {
            cells: self.cells.clone(),
            faces,
            boundaries: Some(self.boundaries.clone()),
            transports,
            t: self.lattice_type.entries().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwistedComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ComplexRepr::deserialize(d)?;
        let t = LatticeType::new(r.t).map_err(serde::de::Error::custom)?;
        let mut transports = BTreeMap::new();
        for e in r.transports {
            if transports.insert(e.cell, e.gamma).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate transport for cell {}", e.cell)));
            }
        }
        TwistedComplex::from_parts(t, r.cells, r.faces, r.boundaries, transports).map_err(serde::de::Error::custom)
    }
}

fn boundaries_from_faces(cells: &[usize], faces: &[Vec<Vec<usize>>]) -> Vec<IntegerMatrix> {
    faces
        .iter()
        .enumerate()
        .map(|(km1, list)| {
            let k = km1 + 1;
            let mut m = IntegerMatrix::zeros(cells[k - 1], cells[k]);
            for (sigma, fs) in list.iter().enumerate() {
                for (i, &f) in fs.iter().enumerate() {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    m[(f, sigma)] += BigInt::from(sign);
                }
            }
            m
        })
        .collect()
}

impl TwistedComplex {
    /// Assembles a complex. `transports` maps edge indices to matrices;
    /// missing edges carry the identity.
    pub fn from_parts(
        lattice_type: LatticeType,
        cells: Vec<usize>,
        faces: Option<Vec<Vec<Vec<usize>>>>,
        boundaries: Option<Vec<IntegerMatrix>>,
        transports: BTreeMap<usize, IntegerMatrix>,
    ) -> Result<Self, LocalSystemError> {
        let malformed = |m: String| LocalSystemError::Malformed(m);
        if cells.is_empty() {
            return Err(malformed("at least the 0-cells must be given".into()));
        }
        let dim = cells.len() - 1;
        let two_n = 2 * lattice_type.half_rank();
        let edges = cells.get(1).copied().unwrap_or(0);

        let (attaching, derived) = match (faces, boundaries) {
            (Some(faces), given) => {
                if faces.len() != dim {
                    return Err(malformed(format!("expected face lists for dimensions 1..={dim}, got {}", faces.len())));
                }
                for (km1, list) in faces.iter().enumerate() {
                    let k = km1 + 1;
                    if list.len() != cells[k] {
                        return Err(malformed(format!("{} faces lists for {} cells of dimension {k}", list.len(), cells[k])));
                    }
                    for (sigma, fs) in list.iter().enumerate() {
                        if fs.len() != k + 1 {
                            return Err(malformed(format!("cell {sigma} of dimension {k} needs {} faces", k + 1)));
                        }
                        if let Some(&f) = fs.iter().find(|&&f| f >= cells[k - 1]) {
                            return Err(malformed(format!("cell {sigma} of dimension {k} has out-of-range face {f}")));
                        }
                    }
                }
                let derived = boundaries_from_faces(&cells, &faces);
                if let Some(given) = given {
                    if given != derived {
                        return Err(malformed("boundaries disagree with the face data".into()));
                    }
                }
                (Attaching::Faces(faces), derived)
            }
            (None, Some(given)) => {
                if given.len() != dim {
                    return Err(malformed(format!("expected {dim} boundary matrices, got {}", given.len())));
                }
                for (km1, b) in given.iter().enumerate() {
                    if b.rows() != cells[km1] || b.cols() != cells[km1 + 1] {
                        return Err(malformed(format!("boundary {} has shape {}x{}", km1 + 1, b.rows(), b.cols())));
                    }
                }
                let mut ends = Vec::with_capacity(edges);
                if let Some(d1) = given.first() {
                    for e in 0..edges {
                        let col = d1.column(e);
                        let plus: Vec<usize> = (0..col.len()).filter(|&i| col[i] == BigInt::one()).collect();
                        let minus: Vec<usize> = (0..col.len()).filter(|&i| col[i] == -BigInt::one()).collect();
                        let nonzero = col.iter().filter(|x| !x.is_zero()).count();
                        match (plus.as_slice(), minus.as_slice(), nonzero) {
                            ([v1], [v0], 2) => ends.push((*v0, *v1)),
                            ([], [], 0) if cells[0] == 1 => ends.push((0, 0)),
                            _ => return Err(malformed(format!("cannot read the endpoints of edge {e} from the incidence matrix"))),
                        }
                    }
                }
                (Attaching::Incidence(ends), given)
            }
            (None, None) => return Err(malformed("either faces or boundaries must be given".into())),
        };

        let mut all = vec![IntegerMatrix::identity(two_n); edges];
        for (cell, gamma) in transports {
            if cell >= edges {
                return Err(malformed(format!("transport on nonexistent edge {cell}")));
            }
            if gamma.rows() != two_n || gamma.cols() != two_n {
                return Err(LocalSystemError::DimensionMismatch(format!(
                    "transport on edge {cell} is {}x{}, expected {two_n}x{two_n}",
                    gamma.rows(),
                    gamma.cols()
                )));
            }
            all[cell] = gamma;
        }
        if matches!(attaching, Attaching::Incidence(_)) && dim >= 2 && all.iter().any(|g| !g.is_identity()) {
            return Err(malformed("twisted transports on a complex of dimension ≥ 2 need face data".into()));
        }
        Ok(Self {
            lattice_type,
            cells,
            attaching,
            boundaries: derived,
            transports: all,
        })
    }

    /// Δ-complex from face lists and per-edge transports (identity if `None`).
    pub fn from_faces(
        lattice_type: LatticeType,
        faces: Vec<Vec<Vec<usize>>>,
        vertices: usize,
        transports: BTreeMap<usize, IntegerMatrix>,
    ) -> Result<Self, LocalSystemError> {
        let mut cells = vec![vertices];
        cells.extend(faces.iter().map(Vec::len));
        Self::from_parts(lattice_type, cells, Some(faces), None, transports)
    }

    /// One vertex and one loop carrying `γ`.
    pub fn circle(lattice_type: LatticeType, gamma: IntegerMatrix) -> Result<Self, LocalSystemError> {
        Self::from_faces(lattice_type, vec![vec![vec![0, 0]]], 1, BTreeMap::from([(0, gamma)]))
    }

    /// Two triangles glued along their common boundary; trivial transports.
    pub fn sphere(lattice_type: LatticeType) -> Result<Self, LocalSystemError> {
        let edges = vec![vec![2, 1], vec![2, 0], vec![1, 0]];
        let triangles = vec![vec![0, 1, 2], vec![0, 1, 2]];
        Self::from_faces(lattice_type, vec![edges, triangles], 3, BTreeMap::new())
    }

    /// `T²` with monodromies `γ₁`, `γ₂` around the two generating loops.
    pub fn torus(lattice_type: LatticeType, g1: IntegerMatrix, g2: IntegerMatrix) -> Result<Self, LocalSystemError> {
        Self::torus_n(lattice_type, vec![g1, g2])
    }

    /// `Tⁿ` with one vertex and the standard simplices of the cube, with
    /// monodromy `gammas[j]` around the `j`-th circle factor.
    ///
    /// A k-simplex is an ordered sequence of k disjoint nonempty subsets of
    /// the coordinate directions; the edge of a subset carries the product of
    /// the corresponding monodromies in increasing order.
    pub fn torus_n(lattice_type: LatticeType, gammas: Vec<IntegerMatrix>) -> Result<Self, LocalSystemError> {
        let n = gammas.len();
        let two_n = 2 * lattice_type.half_rank();
        let full: u32 = (1u32 << n) - 1;
        let mut by_dim: Vec<Vec<Vec<u32>>> = vec![vec![vec![]]];
        for k in 1..=n {
            let mut next = Vec::new();
            for seq in &by_dim[k - 1] {
                let used = seq.iter().fold(0, |a, b| a | b);
                let free = full & !used;
                let mut sub = free;
                let mut blocks = Vec::new();
                while sub != 0 {
                    blocks.push(sub);
                    sub = (sub - 1) & free;
                }
                blocks.sort_unstable();
                for b in blocks {
                    let mut s = seq.clone();
                    s.push(b);
                    next.push(s);
                }
            }
            next.sort();
            by_dim.push(next);
        }
        let index: Vec<BTreeMap<Vec<u32>, usize>> = by_dim
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut faces = Vec::with_capacity(n);
        for k in 1..=n {
            let list: Vec<Vec<usize>> = by_dim[k]
                .iter()
                .map(|seq| {
                    (0..=k)
                        .map(|i| {
                            let face: Vec<u32> = if i == 0 {
                                seq[1..].to_vec()
                            } else if i == k {
                                seq[..k - 1].to_vec()
                            } else {
                                let mut f = seq[..i - 1].to_vec();
                                f.push(seq[i - 1] | seq[i]);
                                f.extend_from_slice(&seq[i + 1..]);
                                f
                            };
                            index[k - 1][&face]
                        })
                        .collect()
                })
                .collect();
            faces.push(list);
        }
        let mut transports = BTreeMap::new();
        if n > 0 {
            for (e, seq) in by_dim[1].iter().enumerate() {
                let mut g = IntegerMatrix::identity(two_n);
                for (j, gamma) in gammas.iter().enumerate() {
                    if seq[0] & (1 << j) != 0 {
                        g = g.checked_mul(gamma).map_err(|e| LocalSystemError::DimensionMismatch(e.to_string()))?;
                    }
                }
                transports.insert(e, g);
            }
        }
        Self::from_faces(lattice_type, faces, 1, transports)
    }

    pub fn lattice_type(&self) -> &LatticeType {
        &self.lattice_type
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn dimension(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn fiber_rank(&self) -> usize {
        2 * self.lattice_type.half_rank()
    }

    pub fn transports(&self) -> &[IntegerMatrix] {
        &self.transports
    }

    /// Untwisted incidence matrices `∂_k`, `k = 1..=D`.
    pub fn boundaries(&self) -> &[IntegerMatrix] {
        &self.boundaries
    }

    /// Number of cochain coordinates in degree `k`.
    pub fn cochain_dim(&self, k: usize) -> usize {
        self.cells.get(k).copied().unwrap_or(0) * self.fiber_rank()
    }

    /// `Σ (−1)^k · #cells_k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Same complex with every transport conjugated, `γ ↦ P γ P⁻¹`.
    pub fn conjugated(&self, p: &IntegerMatrix) -> Result<Self, LocalSystemError> {
        let pinv = p
            .inverse_unimodular()
            .map_err(|e| LocalSystemError::DimensionMismatch(e.to_string()))?;
        let mut out = self.clone();
        for g in &mut out.transports {
            *g = p
                .checked_mul(g)
                .and_then(|x| x.checked_mul(&pinv))
                .map_err(|e| LocalSystemError::DimensionMismatch(e.to_string()))?;
        }
        Ok(out)
    }

    /// Same cells with every transport replaced by the identity.
    pub fn untwisted(&self) -> Self {
        let mut out = self.clone();
        let id = IntegerMatrix::identity(self.fiber_rank());
        out.transports.iter_mut().for_each(|g| *g = id.clone());
        out
    }

    fn faces_of(&self, k: usize, sigma: usize) -> Option<&[usize]> {
        match &self.attaching {
            Attaching::Faces(f) => Some(&f[k - 1][sigma]),
            Attaching::Incidence(_) => None,
        }
    }

    /// Edge from the first to the second vertex of a k-simplex, `k ≥ 1`.
    fn leading_edge(&self, k: usize, sigma: usize) -> usize {
        let mut k = k;
        let mut s = sigma;
        while k > 1 {
            s = self.faces_of(k, s).expect("face data")[k];
            k -= 1;
        }
        s
    }

    /// Twisted coboundary `d^k : C^k → C^{k+1}`.
    pub fn coboundary_matrix(&self, k: usize) -> IntegerMatrix {
        let r = self.fiber_rank();
        let rows = self.cochain_dim(k + 1);
        let cols = self.cochain_dim(k);
        let mut m = IntegerMatrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        let add_block = |m: &mut IntegerMatrix, sigma: usize, tau: usize, block: &IntegerMatrix, sign: i64| {
            for i in 0..r {
                for j in 0..r {
                    let x = &block[(i, j)];
                    if !x.is_zero() {
                        m[(sigma * r + i, tau * r + j)] += x * sign;
                    }
                }
            }
        };
        let id = IntegerMatrix::identity(r);
        match &self.attaching {
            Attaching::Incidence(ends) if k == 0 => {
                for (e, &(v0, v1)) in ends.iter().enumerate() {
                    add_block(&mut m, e, v1, &self.transports[e], 1);
                    add_block(&mut m, e, v0, &id, -1);
                }
            }
            Attaching::Incidence(_) => {
                let b = &self.boundaries[k];
                for sigma in 0..b.cols() {
                    for tau in 0..b.rows() {
                        let c = &b[(tau, sigma)];
                        if !c.is_zero() {
                            let sign: i64 = c.try_into().expect("small incidence");
                            add_block(&mut m, sigma, tau, &id, sign);
                        }
                    }
                }
            }
            Attaching::Faces(faces) => {
                for (sigma, fs) in faces[k].iter().enumerate() {
                    let edge = self.leading_edge(k + 1, sigma);
                    for (i, &tau) in fs.iter().enumerate() {
                        if i == 0 {
                            add_block(&mut m, sigma, tau, &self.transports[edge], 1);
                        } else {
                            add_block(&mut m, sigma, tau, &id, if i % 2 == 0 { 1 } else { -1 });
                        }
                    }
                }
            }
        }
        m
    }
}

/// Failures found by [`validate_local_system`], each with cell identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSystemReport {
    pub valid: bool,
    /// Degrees `k` with `∂_k ∘ ∂_{k+1} ≠ 0`.
    pub boundary_failures: Vec<usize>,
    /// `(dimension, cell)` pairs violating the face identities `∂ᵢ∂ⱼ = ∂_{j−1}∂ᵢ`.
    pub face_identity_failures: Vec<(usize, usize)>,
    /// Triangles whose boundary transports do not compose to the identity.
    pub flatness_failures: Vec<usize>,
    /// Edges whose transport is not in the symplectic group of the type.
    pub membership_failures: Vec<usize>,
    /// Degrees `k` with `d^{k+1} ∘ d^k ≠ 0`.
    pub twisted_failures: Vec<usize>,
}

/// Reports every structural, flatness and integrality failure.
pub fn validate_local_system(c: &TwistedComplex) -> LocalSystemReport {
    let boundary_failures: Vec<usize> = (1..c.boundaries.len())
        .filter(|&k| {
            c.boundaries[k - 1]
                .checked_mul(&c.boundaries[k])
                .map_or(true, |m| !m.is_zero())
        })
        .collect();

    let mut face_identity_failures = Vec::new();
    let mut flatness_failures = Vec::new();
    if let Attaching::Faces(faces) = &c.attaching {
        for k in 2..=faces.len() {
            for (sigma, fs) in faces[k - 1].iter().enumerate() {
                let ok = (0..=k).all(|j| {
                    (0..j).all(|i| {
                        let a = faces[k - 2][fs[j]][i];
                        let b = faces[k - 2][fs[i]][j - 1];
                        a == b
                    })
                });
                if !ok {
                    face_identity_failures.push((k, sigma));
                }
            }
        }
        if let Some(triangles) = faces.get(1) {
            for (sigma, fs) in triangles.iter().enumerate() {
                let lhs = c.transports[fs[2]].checked_mul(&c.transports[fs[0]]);
                if lhs.as_ref() != Ok(&c.transports[fs[1]]) {
                    flatness_failures.push(sigma);
                }
            }
        }
    }

    let membership_failures: Vec<usize> = c
        .transports
        .iter()
        .enumerate()
        .filter(|(_, g)| !sp_type_membership(g, &c.lattice_type).unwrap_or(false))
        .map(|(e, _)| e)
        .collect();

    let twisted_failures: Vec<usize> = if face_identity_failures.is_empty() {
        (0..c.dimension().saturating_sub(1))
            .filter(|&k| {
                c.coboundary_matrix(k + 1)
                    .checked_mul(&c.coboundary_matrix(k))
                    .map_or(true, |m| !m.is_zero())
            })
            .collect()
    } else {
        Vec::new()
    };

    let valid = boundary_failures.is_empty()
        && face_identity_failures.is_empty()
        && flatness_failures.is_empty()
        && membership_failures.is_empty()
        && twisted_failures.is_empty();
    LocalSystemReport {
        valid,
        boundary_failures,
        face_identity_failures,
        flatness_failures,
        membership_failures,
        twisted_failures,
    }
}

fn require_valid(c: &TwistedComplex) -> Result<(), LocalSystemError> {
    let r = validate_local_system(c);
    if r.valid {
        return Ok(());
    }
    let mut parts = Vec::new();
    if !r.boundary_failures.is_empty() {
        parts.push(format!("boundary squares nonzero in degrees {:?}", r.boundary_failures));
    }
    if !r.face_identity_failures.is_empty() {
        parts.push(format!("face identities fail on {:?}", r.face_identity_failures));
    }
    if !r.flatness_failures.is_empty() {
        parts.push(format!("not flat on triangles {:?}", r.flatness_failures));
    }
    if !r.membership_failures.is_empty() {
        parts.push(format!("transports outside the symplectic group on edges {:?}", r.membership_failures));
    }
    if !r.twisted_failures.is_empty() {
        parts.push(format!("twisted differential squares nonzero in degrees {:?}", r.twisted_failures));
    }
    Err(LocalSystemError::InvalidComplex(parts.join("; ")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyResult {
    pub degree: usize,
    pub free_rank: usize,
    #[serde(with = "json::integer_vec")]
    pub torsion: Vec<BigInt>,
    /// Integer cocycles whose classes span the free part.
    #[serde(with = "json::integer_vecs")]
    pub free_basis: Vec<Vec<BigInt>>,
}

/// Cocycle lattice in a basis adapted to the coboundaries: the first
/// `image_rank` columns span the coboundaries up to the factors `diag`.
struct AdaptedCocycles {
    basis: IntegerMatrix,
    diag: Vec<BigInt>,
    image_rank: usize,
}

fn left_inverse(k: &IntegerMatrix) -> RationalMatrix {
    let kq = k.to_rational();
    let kt = kq.transpose();
    let gram = kt.checked_mul(&kq).expect("shapes agree");
    gram.inverse().expect("full column rank").checked_mul(&kt).expect("shapes agree")
}

fn adapted_cocycles(c: &TwistedComplex, k: usize) -> AdaptedCocycles {
    let dk = c.coboundary_matrix(k);
    let kernel = kernel_lattice(&dk);
    let r = kernel.cols();
    if r == 0 {
        return AdaptedCocycles {
            basis: kernel,
            diag: Vec::new(),
            image_rank: 0,
        };
    }
    let prev = if k == 0 {
        IntegerMatrix::zeros(c.cochain_dim(0), 0)
    } else {
        c.coboundary_matrix(k - 1)
    };
    let coords = left_inverse(&kernel)
        .checked_mul(&prev.to_rational())
        .expect("shapes agree")
        .to_integer()
        .expect("coboundaries lie in the saturated cocycle lattice");
    let snf = smith_normal_form(&coords);
    let uinv = snf.u.inverse_unimodular().expect("unimodular");
    let basis = kernel.checked_mul(&uinv).expect("shapes agree");
    let diag = snf.diagonal();
    let image_rank = snf.rank();
    AdaptedCocycles { basis, diag, image_rank }
}

/// `H^k` of the complex with coefficients in the local system.
pub fn twisted_cohomology(c: &TwistedComplex, k: usize) -> Result<CohomologyResult, LocalSystemError> {
    require_valid(c)?;
    Ok(cohomology_unchecked(c, k))
}

fn cohomology_unchecked(c: &TwistedComplex, k: usize) -> CohomologyResult {
    let a = adapted_cocycles(c, k);
    let torsion: Vec<BigInt> = a.diag[..a.image_rank]
        .iter()
        .filter(|d| !d.is_one())
        .cloned()
        .collect();
    let free_basis: Vec<Vec<BigInt>> = (a.image_rank..a.basis.cols()).map(|j| a.basis.column(j)).collect();
    let dk = c.coboundary_matrix(k);
    debug_assert!(free_basis.iter().all(|v| dk.mul_vec(v).iter().all(Zero::is_zero)));
    CohomologyResult {
        degree: k,
        free_rank: free_basis.len(),
        torsion,
        free_basis,
    }
}

/// Cohomology in every degree `0..=D`, computed concurrently.
pub fn twisted_cohomology_all(c: &TwistedComplex) -> Result<Vec<CohomologyResult>, LocalSystemError> {
    require_valid(c)?;
    Ok((0..=c.dimension()).into_par_iter().map(|k| cohomology_unchecked(c, k)).collect())
}

/// Integer 2-cocycles whose classes form a basis of the image of integral
/// `H²` in rational cohomology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeLatticeBasis {
    #[serde(with = "json::integer_vecs")]
    pub basis: Vec<Vec<BigInt>>,
    #[serde(with = "json::integer_vec")]
    pub torsion: Vec<BigInt>,
}

pub fn charge_lattice_basis(c: &TwistedComplex) -> Result<ChargeLatticeBasis, LocalSystemError> {
    require_valid(c)?;
    let h2 = cohomology_unchecked(c, 2);
    Ok(ChargeLatticeBasis {
        basis: h2.free_basis,
        torsion: h2.torsion,
    })
}

/// A rational twisted 2-cocycle, in units of 2π.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeClass {
    #[serde(with = "json::rational_vec")]
    pub coefficients: Vec<BigRational>,
}

impl ChargeClass {
    pub fn new(coefficients: Vec<BigRational>) -> Self {
        Self { coefficients }
    }

    pub fn from_integers(v: &[BigInt]) -> Self {
        Self::new(rational_vec(v))
    }

    /// `Σ cᵢ·bᵢ` for rational weights and integer cochains of length `len`.
    pub fn combination(len: usize, weights: &[BigRational], cochains: &[Vec<BigInt>]) -> Self {
        let mut out = vec![BigRational::zero(); len];
        for (w, b) in weights.iter().zip(cochains) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += w * BigRational::from_integer(x.clone());
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DszVerdict {
    pub integral: bool,
    /// Integer coordinates in the charge-lattice basis, when integral.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_integer_vec")]
    pub coordinates: Option<Vec<BigInt>>,
    /// Coordinates of the class over ℚ, always reported.
    #[serde(with = "json::rational_vec")]
    pub rational_coordinates: Vec<BigRational>,
}

mod opt_integer_vec {
    use super::*;

    pub fn serialize<S: serde::Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        let strings: Option<Vec<String>> = v.as_ref().map(|v| v.iter().map(ToString::to_string).collect());
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        let strings = Option::<Vec<String>>::deserialize(d)?;
        strings
            .map(|v| {
                v.iter()
                    .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
                    .collect()
            })
            .transpose()
    }
}

/// Whether the class of `cls` lies in the charge lattice.
pub fn dsz_check(cls: &ChargeClass, c: &TwistedComplex) -> Result<DszVerdict, LocalSystemError> {
    require_valid(c)?;
    let n2 = c.cochain_dim(2);
    if cls.coefficients.len() != n2 {
        return Err(LocalSystemError::DimensionMismatch(format!(
            "class has {} coefficients, degree-2 cochains have {n2}",
            cls.coefficients.len()
        )));
    }
    let d2 = c.coboundary_matrix(2).to_rational();
    let image = d2.mul_vec(&cls.coefficients);
    let r = c.fiber_rank();
    let bad: Vec<usize> = (0..image.len() / r.max(1))
        .filter(|&cell| image[cell * r..(cell + 1) * r].iter().any(|x| !x.is_zero()))
        .collect();
    if !bad.is_empty() {
        return Err(LocalSystemError::NotACocycle(bad));
    }
    let a = adapted_cocycles(c, 2);
    let w = if a.basis.cols() == 0 {
        Vec::new()
    } else {
        left_inverse(&a.basis).mul_vec(&cls.coefficients)
    };
    let rational_coordinates: Vec<BigRational> = w[a.image_rank..].to_vec();
    let integral = rational_coordinates.iter().all(|x| x.is_integer());
    let coordinates = integral.then(|| rational_coordinates.iter().map(|x| x.to_integer()).collect());
    Ok(DszVerdict {
        integral,
        coordinates,
        rational_coordinates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn principal() -> LatticeType {
        LatticeType::principal(1)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn circle_examples() {
        let id = IntegerMatrix::identity(2);
        let c = TwistedComplex::circle(principal(), id).unwrap();
        assert!(validate_local_system(&c).valid);
        let h = twisted_cohomology_all(&c).unwrap();
        assert_eq!((h[0].free_rank, h[1].free_rank), (2, 2));

        let u = IntegerMatrix::from_rows(&[[1, 1], [0, 1]]);
        let c = TwistedComplex::circle(principal(), u).unwrap();
        let h = twisted_cohomology_all(&c).unwrap();
        assert_eq!((h[0].free_rank, h[1].free_rank), (1, 1));
        assert!(h[0].torsion.is_empty() && h[1].torsion.is_empty());

        let c = TwistedComplex::circle(principal(), -&IntegerMatrix::identity(2)).unwrap();
        let h = twisted_cohomology_all(&c).unwrap();
        assert_eq!(h[0].free_rank, 0);
        assert_eq!(h[1].free_rank, 0);
        assert_eq!(h[1].torsion, ints(&[2, 2]));
        assert!(charge_lattice_basis(&c).unwrap().basis.is_empty());
    }

    #[test]
    fn torus_flatness() {
        let s = IntegerMatrix::from_rows(&[[0, -1], [1, 0]]);
        let t = IntegerMatrix::from_rows(&[[1, 1], [0, 1]]);
        let c = TwistedComplex::torus(principal(), s.clone(), t).unwrap();
        let r = validate_local_system(&c);
        assert!(!r.valid);
        assert!(!r.flatness_failures.is_empty());
        assert!(matches!(twisted_cohomology(&c, 1), Err(LocalSystemError::InvalidComplex(_))));

        let c = TwistedComplex::torus(principal(), s.clone(), s).unwrap();
        assert!(validate_local_system(&c).valid);
    }

    #[test]
    fn membership_failure_reported() {
        let g = IntegerMatrix::from_rows(&[[2, 0], [0, 1]]);
        let c = TwistedComplex::circle(principal(), g).unwrap();
        assert_eq!(validate_local_system(&c).membership_failures, vec![0]);
    }

    #[test]
    fn sphere_and_torus_charge_lattices() {
        let s2 = TwistedComplex::sphere(principal()).unwrap();
        assert_eq!(charge_lattice_basis(&s2).unwrap().basis.len(), 2);
        let id = IntegerMatrix::identity(2);
        let t2 = TwistedComplex::torus(principal(), id.clone(), id).unwrap();
        assert_eq!(charge_lattice_basis(&t2).unwrap().basis.len(), 2);
        assert_eq!(t2.cells(), &[1, 3, 2]);
    }

    #[test]
    fn torus_n_cell_counts() {
        let id = IntegerMatrix::identity(2);
        let t4 = TwistedComplex::torus_n(principal(), vec![id; 4]).unwrap();
        assert_eq!(t4.cells(), &[1, 15, 50, 60, 24]);
        assert!(validate_local_system(&t4).valid);
        assert_eq!(t4.euler_characteristic(), 0);
    }

    #[test]
    fn dsz_examples() {
        let id = IntegerMatrix::identity(2);
        let t2 = TwistedComplex::torus(principal(), id.clone(), id).unwrap();
        let b = charge_lattice_basis(&t2).unwrap().basis;
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());

        let cls = ChargeClass::combination(t2.cochain_dim(2), &[q(3, 1), q(-2, 1)], &b);
        let v = dsz_check(&cls, &t2).unwrap();
        assert!(v.integral);
        assert_eq!(v.coordinates, Some(ints(&[3, -2])));

        let half = ChargeClass::combination(t2.cochain_dim(2), &[q(1, 2)], &b[..1]);
        let v = dsz_check(&half, &t2).unwrap();
        assert!(!v.integral);
        assert_eq!(v.coordinates, None);

        let d1 = t2.coboundary_matrix(1).to_rational();
        let x: Vec<BigRational> = (0..t2.cochain_dim(1)).map(|i| q(i as i64 + 1, 3)).collect();
        let cob = ChargeClass::new(d1.mul_vec(&x));
        let v = dsz_check(&ChargeClass::combination(t2.cochain_dim(2), &[q(1, 1)], &b[..1]).add(&cob), &t2).unwrap();
        assert_eq!(v.coordinates, Some(ints(&[1, 0])));
    }

    #[test]
    fn dsz_rejects_non_cocycles_and_bad_lengths() {
        let s2 = TwistedComplex::sphere(principal()).unwrap();
        let q = |n: i64| BigRational::from_integer(n.into());
        assert!(matches!(
            dsz_check(&ChargeClass::new(vec![q(1)]), &s2),
            Err(LocalSystemError::DimensionMismatch(_))
        ));
        let id = IntegerMatrix::identity(2);
        let t3 = TwistedComplex::torus_n(principal(), vec![id; 3]).unwrap();
        let mut v = vec![q(0); t3.cochain_dim(2)];
        v[0] = q(1);
        assert!(matches!(dsz_check(&ChargeClass::new(v), &t3), Err(LocalSystemError::NotACocycle(_))));
    }

    #[test]
    fn incidence_only_circle_and_json() {
        let text = r#"{"cells":[1,1],"boundaries":[[[0]]],"transports":[{"cell":0,"gamma":[[-1,0],[0,-1]]}],"t":[1]}"#;
        let c: TwistedComplex = serde_json::from_str(text).unwrap();
        let h = twisted_cohomology(&c, 1).unwrap();
        assert_eq!(h.torsion, ints(&[2, 2]));
        let back: TwistedComplex = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);

        let faces = r#"{"cells":[1,1],"faces":[[[0,0]]],"boundaries":[[[1]]],"t":[1]}"#;
        assert!(serde_json::from_str::<TwistedComplex>(faces).is_err());
        let twisted_sphere = r#"{"cells":[3,3,2],"boundaries":[[[0,-1,-1],[-1,0,1],[1,1,0]],[[1,1],[-1,-1],[1,1]]],
            "transports":[{"cell":0,"gamma":[[1,1],[0,1]]}],"t":[1]}"#;
        assert!(serde_json::from_str::<TwistedComplex>(twisted_sphere).is_err());
    }

    #[test]
    fn round_trip_with_faces() {
        let s = IntegerMatrix::from_rows(&[[0, -1], [1, 0]]);
        let c = TwistedComplex::torus(principal(), s.clone(), s).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: TwistedComplex = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
