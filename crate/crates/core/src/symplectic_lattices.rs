//! Integral symplectic lattices: types, Frobenius bases, the modified Siegel
//! modular groups `Sp_t(2n, ℤ)`, and isomorphism testing.
//!
//! A lattice is always presented in a ℤ-basis of itself, by the integer Gram
//! matrix of the symplectic form on that basis. Preserving the lattice then
//! means being an integer unimodular matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exact_linalg::IntegerMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("invalid lattice type: {0}")]
    InvalidType(String),
    #[error("Gram matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("symplectic form is degenerate")]
    DegenerateForm,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A divisor chain `t_1 | t_2 | … | t_n` of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TypeRepr", into = "TypeRepr")]
pub struct LatticeType(Vec<u64>);

#[derive(Serialize, Deserialize)]
struct TypeRepr {
    t: Vec<u64>,
}

impl TryFrom<TypeRepr> for LatticeType {
    type Error = LatticeError;

    fn try_from(r: TypeRepr) -> Result<Self, LatticeError> {
        LatticeType::new(r.t)
    }
}

impl From<LatticeType> for TypeRepr {
    fn from(t: LatticeType) -> Self {
        TypeRepr { t: t.0 }
    }
}

impl LatticeType {
    /// Accepts any divisor chain, including the empty one (rank zero).
    pub fn new(entries: Vec<u64>) -> Result<Self, LatticeError> {
        if let Some(&bad) = entries.iter().find(|&&t| t == 0) {
            return Err(LatticeError::InvalidType(format!("entry {bad} is not positive")));
        }
        if let Some(w) = entries.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(LatticeError::InvalidType(format!("{} does not divide {}", w[0], w[1])));
        }
        Ok(Self(entries))
    }

    /// The principal type `(1, …, 1)`.
    pub fn principal(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn half_rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_principal(&self) -> bool {
        self.0.iter().all(|&t| t == 1)
    }

    /// `Ω_t = [[0, T], [-T, 0]]` with `T = diag(t)`.
    pub fn omega(&self) -> IntegerMatrix {
        let n = self.0.len();
        let mut m = IntegerMatrix::zeros(2 * n, 2 * n);
        for (i, &t) in self.0.iter().enumerate() {
            m[(i, n + i)] = BigInt::from(t);
            m[(n + i, i)] = -BigInt::from(t);
        }
        m
    }
}

impl std::fmt::Display for LatticeType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A full lattice with an integral nondegenerate symplectic form, given by
/// its Gram matrix in a ℤ-basis of the lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct IntegralSymplecticSpace {
    gram: IntegerMatrix,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    gram: IntegerMatrix,
}

impl TryFrom<SpaceRepr> for IntegralSymplecticSpace {
    type Error = LatticeError;

    fn try_from(r: SpaceRepr) -> Result<Self, LatticeError> {
        if let Some(n) = r.n {
            if 2 * n != r.gram.rows() {
                return Err(LatticeError::DimensionMismatch(format!(
                    "n = {n} but the Gram matrix is {}x{}",
                    r.gram.rows(),
                    r.gram.cols()
                )));
            }
        }
        IntegralSymplecticSpace::new(r.gram)
    }
}

impl From<IntegralSymplecticSpace> for SpaceRepr {
    fn from(s: IntegralSymplecticSpace) -> Self {
        SpaceRepr {
            n: Some(s.half_rank()),
            gram: s.gram,
        }
    }
}

impl IntegralSymplecticSpace {
    pub fn new(gram: IntegerMatrix) -> Result<Self, LatticeError> {
        if !gram.is_square() || gram.rows() % 2 != 0 {
            return Err(LatticeError::DimensionMismatch(format!(
                "Gram matrix must be square of even size, got {}x{}",
                gram.rows(),
                gram.cols()
            )));
        }
        if !gram.is_antisymmetric() {
            return Err(LatticeError::NotAntisymmetric);
        }
        if gram.determinant().expect("square").is_zero() {
            return Err(LatticeError::DegenerateForm);
        }
        Ok(Self { gram })
    }

    pub fn gram(&self) -> &IntegerMatrix {
        &self.gram
    }

    pub fn half_rank(&self) -> usize {
        self.gram.rows() / 2
    }

    pub fn lattice_type(&self) -> LatticeType {
        frobenius_reduce(&self.gram).1
    }
}

/// The standard lattice `Λ_t` with Gram matrix `Ω_t`.
pub fn standard_space(t: &LatticeType) -> Result<IntegralSymplecticSpace, LatticeError> {
    if t.half_rank() == 0 {
        return Err(LatticeError::InvalidType("empty type".into()));
    }
    IntegralSymplecticSpace::new(t.omega())
}

/// A unimodular change of basis bringing the form to `Ω_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusBasis {
    pub change_of_basis: IntegerMatrix,
    #[serde(rename = "t")]
    pub lattice_type: LatticeType,
}

/// Frobenius basis of `space`: columns `λ_1..λ_n, μ_1..μ_n` of the returned
/// matrix `P` satisfy `Pᵀ·G·P = Ω_t`.
pub fn frobenius_basis(space: &IntegralSymplecticSpace) -> FrobeniusBasis {
    let (change_of_basis, lattice_type) = frobenius_reduce(&space.gram);
    FrobeniusBasis {
        change_of_basis,
        lattice_type,
    }
}

/// Same as [`frobenius_basis`] but starting from an unchecked Gram matrix.
pub fn frobenius_basis_of(gram: &IntegerMatrix) -> Result<FrobeniusBasis, LatticeError> {
    IntegralSymplecticSpace::new(gram.clone()).map(|s| frobenius_basis(&s))
}

// Basis vector k += c * basis vector l, keeping `g = Pᵀ G P` in sync.
fn congruence_add(g: &mut IntegerMatrix, p: &mut IntegerMatrix, k: usize, l: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    p.add_col_multiple(k, l, c);
    g.add_col_multiple(k, l, c);
    g.add_row_multiple(k, l, c);
}

fn congruence_swap(g: &mut IntegerMatrix, p: &mut IntegerMatrix, k: usize, l: usize) {
    p.swap_cols(k, l);
    g.swap_cols(k, l);
    g.swap_rows(k, l);
}

fn congruence_negate(g: &mut IntegerMatrix, p: &mut IntegerMatrix, k: usize) {
    p.negate_col(k);
    g.negate_col(k);
    g.negate_row(k);
}

/// Symplectic analogue of Smith reduction. Pairs are extracted into
/// positions `(2m, 2m+1)` and reordered into Frobenius order at the end.
fn frobenius_reduce(gram: &IntegerMatrix) -> (IntegerMatrix, LatticeType) {
    let dim = gram.rows();
    let n = dim / 2;
    let mut g = gram.clone();
    let mut p = IntegerMatrix::identity(dim);
    let mut types = Vec::with_capacity(n);

    for m in 0..n {
        let s = 2 * m;
        loop {
            // minimal nonzero pairing in the active block, lowest indices first
            let mut best: Option<(usize, usize, BigInt)> = None;
            for i in s..dim {
                for j in i + 1..dim {
                    let x = g[(i, j)].abs();
                    if !x.is_zero() && best.as_ref().is_none_or(|b| x < b.2) {
                        best = Some((i, j, x));
                    }
                }
            }
            let (i, j, _) = best.expect("nondegenerate form has a nonzero pairing");
            congruence_swap(&mut g, &mut p, s, i);
            let j = if j == s { i } else { j };
            congruence_swap(&mut g, &mut p, s + 1, j);
            if g[(s, s + 1)].is_negative() {
                congruence_negate(&mut g, &mut p, s + 1);
            }
            let d = g[(s, s + 1)].clone();

            let mut reduced = true;
            for k in s + 2..dim {
                let q = &g[(s, k)] / &d;
                congruence_add(&mut g, &mut p, k, s + 1, &-q);
                if !g[(s, k)].is_zero() {
                    reduced = false;
                    break;
                }
                let q = &g[(s + 1, k)] / &d;
                congruence_add(&mut g, &mut p, k, s, &q);
                if !g[(s + 1, k)].is_zero() {
                    reduced = false;
                    break;
                }
            }
            if !reduced {
                continue;
            }
            let offender = (s + 2..dim)
                .find(|&k| (k + 1..dim).any(|l| !g[(k, l)].is_multiple_of(&d)));
            match offender {
                Some(k) => congruence_add(&mut g, &mut p, s, k, &BigInt::one()),
                None => {
                    types.push(d);
                    break;
                }
            }
        }
    }

    let order: Vec<usize> = (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect();
    let cols: Vec<Vec<BigInt>> = order.iter().map(|&j| p.column(j)).collect();
    let change = IntegerMatrix::from_columns(dim, &cols);
    let t = types
        .iter()
        .map(|d| d.to_u64().expect("lattice type entries fit in u64"))
        .collect();
    (change, LatticeType(t))
}

/// `γ ∈ Sp_t(2n, ℤ)`: integer, unimodular, and `γᵀ Ω_t γ = Ω_t`.
pub fn sp_type_membership(gamma: &IntegerMatrix, t: &LatticeType) -> Result<bool, LatticeError> {
    let dim = 2 * t.half_rank();
    if gamma.rows() != dim || gamma.cols() != dim {
        return Err(LatticeError::DimensionMismatch(format!(
            "expected {dim}x{dim} for type {t}, got {}x{}",
            gamma.rows(),
            gamma.cols()
        )));
    }
    Ok(preserves_form(gamma, &t.omega()))
}

/// `γᵀ Ω γ = Ω` and `γ` unimodular.
pub fn preserves_form(gamma: &IntegerMatrix, omega: &IntegerMatrix) -> bool {
    gamma.is_unimodular() && &(&gamma.transpose() * omega) * gamma == *omega
}

/// A unimodular `P` with `Pᵀ·gram_a·P = gram_b` when the types agree.
pub fn lattice_isomorphism(
    a: &IntegralSymplecticSpace,
    b: &IntegralSymplecticSpace,
) -> Result<Option<IntegerMatrix>, LatticeError> {
    if a.gram.rows() != b.gram.rows() {
        return Err(LatticeError::DimensionMismatch(format!(
            "rank {} vs rank {}",
            a.gram.rows(),
            b.gram.rows()
        )));
    }
    let fa = frobenius_basis(a);
    let fb = frobenius_basis(b);
    if fa.lattice_type != fb.lattice_type {
        return Ok(None);
    }
    let pb_inv = fb
        .change_of_basis
        .inverse_unimodular()
        .expect("Frobenius change of basis is unimodular");
    Ok(Some(&fa.change_of_basis * &pb_inv))
}

/// Standard generators of `Sp(2n, ℤ)` in principal Frobenius coordinates:
/// the symplectic involution `[[0, -I], [I, 0]]`, the shears `[[I, E], [0, I]]`
/// for elementary symmetric `E`, and `diag(A, A^{-T})` for elementary `A`.
pub fn sp2n_generators(n: usize) -> Vec<IntegerMatrix> {
    let dim = 2 * n;
    let mut gens = Vec::new();
    let mut j0 = IntegerMatrix::zeros(dim, dim);
    for i in 0..n {
        j0[(i, n + i)] = BigInt::from(-1);
        j0[(n + i, i)] = BigInt::one();
    }
    gens.push(j0);
    for i in 0..n {
        for j in i..n {
            let mut m = IntegerMatrix::identity(dim);
            m[(i, n + j)] = BigInt::one();
            m[(j, n + i)] = BigInt::one();
            gens.push(m);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // A = I + E_ij, A^{-T} = I - E_ji
            let mut m = IntegerMatrix::identity(dim);
            m[(i, j)] = BigInt::one();
            m[(n + j, n + i)] = BigInt::from(-1);
            gens.push(m);
        }
    }
    gens
}
