//! Tamings of integral symplectic forms and the quantities they induce.
//!
//! Matrix conventions: `ω(x, y) = xᵀ Ω y`, a taming `J` acts on column
//! vectors, and the induced metric is `Q(ξ₁, ξ₂) = ω(ξ₁, Jξ₂)`, i.e.
//! `Q = Ω·J`. With these conventions the pair `Ω = [[0, I], [-I, 0]]`,
//! `J₀ = [[0, -I], [I, 0]]` gives `Q = I`.

use nalgebra::{Complex, DMatrix};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact_linalg::{IntegerMatrix, RationalMatrix};
use crate::symplectic_lattices::{frobenius_basis_of, preserves_form, LatticeError};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Which pairing order the positivity axiom uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingOrder {
    /// `ω(ξ, Jξ) > 0`, equivalently `Ω·J` positive definite.
    XiThenJXi,
    /// `ω(Jξ, ξ) > 0`, equivalently `Jᵀ·Ω` positive definite.
    JXiThenXi,
}

/// The positivity convention used throughout the crate.
pub const POSITIVITY: PairingOrder = PairingOrder::XiThenJXi;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolarizationError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid taming: {0}")]
    InvalidTaming(String),
    #[error("imaginary part of the Siegel point is not positive definite")]
    NonPositiveY,
    #[error("invalid Siegel point: {0}")]
    InvalidSiegelPoint(String),
    #[error("transformation does not preserve the symplectic form")]
    NotSymplectic,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    m.nrows() == 0 || m.clone().cholesky().is_some()
}

fn min_eigenvalue(sym: &DMatrix<f64>) -> f64 {
    if sym.nrows() == 0 {
        return f64::INFINITY;
    }
    sym.clone().symmetric_eigen().eigenvalues.min()
}

/// Outcome of checking the three taming axioms, with measured residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TamingReport {
    pub squares_to_minus_one: bool,
    pub square_residual: f64,
    pub compatible: bool,
    pub compatibility_residual: f64,
    pub positive: bool,
    pub q_symmetry_residual: f64,
    pub q_min_eigenvalue: f64,
}

impl TamingReport {
    pub fn passed(&self) -> bool {
        self.squares_to_minus_one && self.compatible && self.positive
    }

    fn failures(&self) -> String {
        let mut out = Vec::new();
        if !self.squares_to_minus_one {
            out.push(format!("J^2 != -I (residual {:e})", self.square_residual));
        }
        if !self.compatible {
            out.push(format!("J^T Omega J != Omega (residual {:e})", self.compatibility_residual));
        }
        if !self.positive {
            out.push(format!(
                "Q not symmetric positive definite (asymmetry {:e}, min eigenvalue {:e})",
                self.q_symmetry_residual, self.q_min_eigenvalue
            ));
        }
        out.join("; ")
    }
}

fn check_shapes(j: &DMatrix<f64>, omega: &IntegerMatrix) -> Result<(), PolarizationError> {
    if j.nrows() != j.ncols() || !omega.is_square() || j.nrows() != omega.rows() || j.nrows() % 2 != 0 {
        return Err(PolarizationError::DimensionMismatch(format!(
            "J is {}x{}, omega is {}x{}",
            j.nrows(),
            j.ncols(),
            omega.rows(),
            omega.cols()
        )));
    }
    Ok(())
}

/// Checks `J² = −I`, `JᵀΩJ = Ω` and positivity of `Q = ΩJ` within `tol`.
pub fn validate_taming(j: &DMatrix<f64>, omega: &IntegerMatrix, tol: f64) -> Result<TamingReport, PolarizationError> {
    check_shapes(j, omega)?;
    let dim = j.nrows();
    let om = omega.to_f64();
    let id = DMatrix::<f64>::identity(dim, dim);
    let square_residual = max_abs(&(j * j + &id));
    let compatibility_residual = max_abs(&(j.transpose() * &om * j - &om));
    let q = match POSITIVITY {
        PairingOrder::XiThenJXi => &om * j,
        PairingOrder::JXiThenXi => j.transpose() * &om,
    };
    let q_symmetry_residual = max_abs(&(&q - q.transpose()));
    let sym = (&q + q.transpose()) * 0.5;
    let q_min_eigenvalue = min_eigenvalue(&sym);
    Ok(TamingReport {
        squares_to_minus_one: square_residual <= tol,
        square_residual,
        compatible: compatibility_residual <= tol,
        compatibility_residual,
        positive: q_symmetry_residual <= tol && is_positive_definite(&sym),
        q_symmetry_residual,
        q_min_eigenvalue,
    })
}

/// Exact-mode report for a rational `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTamingReport {
    pub squares_to_minus_one: bool,
    pub compatible: bool,
    pub positive: bool,
}

impl ExactTamingReport {
    pub fn passed(&self) -> bool {
        self.squares_to_minus_one && self.compatible && self.positive
    }
}

/// Exact version of [`validate_taming`]; positivity via leading principal
/// minors of `Q = ΩJ`.
pub fn validate_taming_exact(j: &RationalMatrix, omega: &IntegerMatrix) -> Result<ExactTamingReport, PolarizationError> {
    let dim = j.rows();
    if j.cols() != dim || omega.rows() != dim || omega.cols() != dim {
        return Err(PolarizationError::DimensionMismatch("J and omega must agree".into()));
    }
    let om = omega.to_rational();
    let minus_id = {
        let mut m = RationalMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = -BigRational::one();
        }
        m
    };
    let squares_to_minus_one = &(j * j) == &minus_id;
    let compatible = &(&j.transpose() * &om) * j == om;
    let q = &om * j;
    let positive = q == q.transpose() && (1..=dim).all(|k| leading_minor(&q, k) > BigRational::zero());
    Ok(ExactTamingReport {
        squares_to_minus_one,
        compatible,
        positive,
    })
}

fn leading_minor(m: &RationalMatrix, k: usize) -> BigRational {
    let mut sub = RationalMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            sub[(i, j)] = m[(i, j)].clone();
        }
    }
    let mut a = sub;
    let mut det = BigRational::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !a[(r, c)].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            for j in 0..k {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(c, j)].clone();
                a[(c, j)] = tmp;
            }
            det = -det;
        }
        let piv = a[(c, c)].clone();
        det *= &piv;
        for r in c + 1..k {
            let f = &a[(r, c)] / &piv;
            for j in c..k {
                let v = &f * &a[(c, j)];
                a[(r, j)] -= v;
            }
        }
    }
    det
}

/// A validated taming of an integral symplectic form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TamingRepr", into = "TamingRepr")]
pub struct Taming {
    j: DMatrix<f64>,
    omega: IntegerMatrix,
    tol: f64,
}

#[derive(Serialize, Deserialize)]
struct TamingRepr {
    #[serde(rename = "J")]
    j: Vec<Vec<f64>>,
    omega: IntegerMatrix,
    #[serde(default = "default_tol")]
    tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, PolarizationError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(PolarizationError::DimensionMismatch("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

impl TryFrom<TamingRepr> for Taming {
    type Error = PolarizationError;

    fn try_from(r: TamingRepr) -> Result<Self, PolarizationError> {
        Taming::new(matrix_from_rows(&r.j)?, r.omega, r.tol)
    }
}

impl From<Taming> for TamingRepr {
    fn from(t: Taming) -> Self {
        TamingRepr {
            j: matrix_to_rows(&t.j),
            omega: t.omega,
            tol: t.tol,
        }
    }
}

impl Taming {
    pub fn new(j: DMatrix<f64>, omega: IntegerMatrix, tol: f64) -> Result<Self, PolarizationError> {
        let report = validate_taming(&j, &omega, tol)?;
        if !report.passed() {
            return Err(PolarizationError::InvalidTaming(report.failures()));
        }
        Ok(Self { j, omega, tol })
    }

    /// `J₀ = [[0, −I], [I, 0]]`, which tames every `Ω_t`.
    pub fn standard(omega: IntegerMatrix) -> Result<Self, PolarizationError> {
        let n = omega.rows() / 2;
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = -1.0;
            j[(n + i, i)] = 1.0;
        }
        Self::new(j, omega, DEFAULT_TOLERANCE)
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn omega(&self) -> &IntegerMatrix {
        &self.omega
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// `Q = Ω·J`, symmetric positive definite for a valid taming.
pub fn q_metric(taming: &Taming) -> DMatrix<f64> {
    let om = taming.omega.to_f64();
    match POSITIVITY {
        PairingOrder::XiThenJXi => om * &taming.j,
        PairingOrder::JXiThenXi => taming.j.transpose() * om,
    }
}

/// A point `Z = X + iY` of the Siegel upper half space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SiegelRepr", into = "SiegelRepr")]
pub struct SiegelPoint {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct SiegelRepr {
    #[serde(rename = "X")]
    x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    y: Vec<Vec<f64>>,
}

impl TryFrom<SiegelRepr> for SiegelPoint {
    type Error = PolarizationError;

    fn try_from(r: SiegelRepr) -> Result<Self, PolarizationError> {
        SiegelPoint::new(matrix_from_rows(&r.x)?, matrix_from_rows(&r.y)?)
    }
}

impl From<SiegelPoint> for SiegelRepr {
    fn from(p: SiegelPoint) -> Self {
        SiegelRepr {
            x: matrix_to_rows(&p.x),
            y: matrix_to_rows(&p.y),
        }
    }
}

impl SiegelPoint {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self, PolarizationError> {
        let n = x.nrows();
        if x.ncols() != n || y.nrows() != n || y.ncols() != n {
            return Err(PolarizationError::InvalidSiegelPoint("X and Y must be n x n".into()));
        }
        let scale = 1.0 + max_abs(&x).max(max_abs(&y));
        if max_abs(&(&x - x.transpose())) > DEFAULT_TOLERANCE * scale
            || max_abs(&(&y - y.transpose())) > DEFAULT_TOLERANCE * scale
        {
            return Err(PolarizationError::InvalidSiegelPoint("X and Y must be symmetric".into()));
        }
        if !is_positive_definite(&y) {
            return Err(PolarizationError::NonPositiveY);
        }
        Ok(Self { x, y })
    }

    /// `Z = iI_n`.
    pub fn base_point(n: usize) -> Self {
        Self {
            x: DMatrix::zeros(n, n),
            y: DMatrix::identity(n, n),
        }
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Period-matrix block formula for the principal form:
    /// `J = [[XY⁻¹, −Y − XY⁻¹X], [Y⁻¹, −Y⁻¹X]]`. Its `+i` eigenspace is
    /// spanned by the columns of `(Z; I)`.
    fn principal_taming(&self) -> DMatrix<f64> {
        let n = self.n();
        let yinv = self.y.clone().try_inverse().expect("Y is positive definite");
        let xyinv = &self.x * &yinv;
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        j.view_mut((0, 0), (n, n)).copy_from(&xyinv);
        j.view_mut((0, n), (n, n)).copy_from(&(-&self.y - &xyinv * &self.x));
        j.view_mut((n, 0), (n, n)).copy_from(&yinv);
        j.view_mut((n, n), (n, n)).copy_from(&(-&yinv * &self.x));
        j
    }
}

/// Result of [`taming_from_siegel_point`] together with the frame that
/// relates it to the principal construction.
#[derive(Debug, Clone)]
pub struct SiegelTaming {
    pub taming: Taming,
    /// Real `2n × n` complex matrix whose columns span the `+i` eigenspace of `J`.
    pub lagrangian: DMatrix<Complex<f64>>,
}

/// Taming of `omega` attached to a Siegel point.
///
/// `omega` is first brought to Frobenius form `PᵀΩP = Ω_t` (with `P = I`
/// when it already is `Ω_t`); then `E = diag(√T, √T)` relates `Ω_t` to the
/// principal form and `J = P·E⁻¹·J_Z·E·P⁻¹`.
pub fn taming_from_siegel_point(z: &SiegelPoint, omega: &IntegerMatrix) -> Result<SiegelTaming, PolarizationError> {
    let n = z.n();
    if omega.rows() != 2 * n || omega.cols() != 2 * n {
        return Err(PolarizationError::DimensionMismatch(format!(
            "Siegel point of genus {n} against a {}x{} form",
            omega.rows(),
            omega.cols()
        )));
    }
    let fb = frobenius_basis_of(omega)?;
    let p = if fb.lattice_type.omega() == *omega {
        IntegerMatrix::identity(2 * n)
    } else {
        fb.change_of_basis
    };
    let p_inv = p.inverse_unimodular().expect("unimodular");
    let (p, p_inv) = (p.to_f64(), p_inv.to_f64());
    let sqrt_t: Vec<f64> = fb.lattice_type.entries().iter().map(|&t| (t as f64).sqrt()).collect();
    let e = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { sqrt_t[i % n.max(1)] } else { 0.0 });
    let e_inv = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { 1.0 / sqrt_t[i % n.max(1)] } else { 0.0 });

    let j = &p * &e_inv * z.principal_taming() * &e * &p_inv;
    let taming = Taming::new(j, omega.clone(), DEFAULT_TOLERANCE)?;

    let mut frame = DMatrix::<Complex<f64>>::zeros(2 * n, n);
    for r in 0..n {
        for c in 0..n {
            frame[(r, c)] = Complex::new(z.x[(r, c)], z.y[(r, c)]);
        }
        frame[(n + r, r)] = Complex::new(1.0, 0.0);
    }
    let transform = (&p * &e_inv).map(|v| Complex::new(v, 0.0));
    Ok(SiegelTaming {
        taming,
        lagrangian: transform * frame,
    })
}

/// `γ·J·γ⁻¹` for `γ` preserving the form.
pub fn push_forward_taming(gamma: &IntegerMatrix, taming: &Taming) -> Result<Taming, PolarizationError> {
    if gamma.rows() != taming.dim() || gamma.cols() != taming.dim() {
        return Err(PolarizationError::DimensionMismatch(format!(
            "gamma is {}x{}, taming has dimension {}",
            gamma.rows(),
            gamma.cols(),
            taming.dim()
        )));
    }
    if !preserves_form(gamma, &taming.omega) {
        return Err(PolarizationError::NotSymplectic);
    }
    let inv = gamma.inverse_unimodular().expect("symplectic integer matrices are unimodular");
    let j = gamma.to_f64() * &taming.j * inv.to_f64();
    let tol = taming.tol.max(DEFAULT_TOLERANCE * (1.0 + max_abs(&j)).powi(2));
    Taming::new(j, taming.omega.clone(), tol).map(|t| t.with_tol(taming.tol))
}

/// Exact `γ·J·γ⁻¹` for rational `J`.
pub fn push_forward_exact(gamma: &IntegerMatrix, j: &RationalMatrix, omega: &IntegerMatrix) -> Result<RationalMatrix, PolarizationError> {
    if gamma.rows() != j.rows() || !gamma.is_square() || j.rows() != j.cols() {
        return Err(PolarizationError::DimensionMismatch("gamma and J must agree".into()));
    }
    if !preserves_form(gamma, omega) {
        return Err(PolarizationError::NotSymplectic);
    }
    let inv = gamma.inverse_unimodular().expect("unimodular").to_rational();
    Ok(&(&gamma.to_rational() * j) * &inv)
}

/// Samples `Ψ(v_k)` of the fundamental form along chosen vertical directions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FundamentalFormSample {
    pub components: Vec<DMatrix<f64>>,
}

impl Serialize for FundamentalFormSample {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Vec<f64>>> = self.components.iter().map(matrix_to_rows).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FundamentalFormSample {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Vec<f64>>>::deserialize(d)?;
        let components = rows
            .iter()
            .map(|r| matrix_from_rows(r))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Self { components })
    }
}

impl FundamentalFormSample {
    pub fn new(components: Vec<DMatrix<f64>>) -> Self {
        Self { components }
    }

    pub fn zero(dim: usize, directions: usize) -> Self {
        Self {
            components: vec![DMatrix::zeros(dim, dim); directions],
        }
    }

    pub fn directions(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|&x| x == 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionCheck {
    pub antilinearity_residual: f64,
    pub q_symmetry_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalFormReport {
    pub directions: Vec<DirectionCheck>,
    pub unitary: bool,
}

impl FundamentalFormReport {
    pub fn passed(&self) -> bool {
        self.directions.iter().all(|d| d.passed)
    }
}

/// Per direction: `ΨJ + JΨ = 0` and `QΨ` symmetric, within the taming's tolerance.
pub fn validate_fundamental_form(
    psi: &FundamentalFormSample,
    taming: &Taming,
) -> Result<FundamentalFormReport, PolarizationError> {
    let dim = taming.dim();
    let q = q_metric(taming);
    let mut directions = Vec::with_capacity(psi.directions());
    for (k, c) in psi.components.iter().enumerate() {
        if c.nrows() != dim || c.ncols() != dim {
            return Err(PolarizationError::DimensionMismatch(format!(
                "component {k} is {}x{}, expected {dim}x{dim}",
                c.nrows(),
                c.ncols()
            )));
        }
        let anti = max_abs(&(c * &taming.j + &taming.j * c));
        let qc = &q * c;
        let sym = max_abs(&(&qc - qc.transpose()));
        let scale = 1.0 + max_abs(c);
        directions.push(DirectionCheck {
            antilinearity_residual: anti,
            q_symmetry_residual: sym,
            passed: anti <= taming.tol * scale && sym <= taming.tol * scale,
        });
    }
    Ok(FundamentalFormReport {
        directions,
        unitary: psi.is_zero(),
    })
}

/// The `J`-antilinear, `Q`-symmetric part `½(M + JMJ)` of `M = Q⁻¹S` for a
/// symmetric `S`. Produces admissible fundamental-form samples.
pub fn antilinear_q_symmetric(s: &DMatrix<f64>, taming: &Taming) -> DMatrix<f64> {
    let q = q_metric(taming);
    let sym = (s + s.transpose()) * 0.5;
    let m = q.try_inverse().expect("Q is positive definite") * sym;
    (&m + &taming.j * &m * &taming.j) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic_lattices::LatticeType;

    fn omega(t: &[u64]) -> IntegerMatrix {
        LatticeType::new(t.to_vec()).unwrap().omega()
    }

    fn j0(n: usize) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = -1.0;
            j[(n + i, i)] = 1.0;
        }
        j
    }

    #[test]
    fn standard_taming_passes() {
        for n in 1..=3 {
            let r = validate_taming(&j0(n), &omega(&vec![1; n]), 1e-10).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn sign_flip_fails_positivity() {
        let r = validate_taming(&-j0(1), &omega(&[1]), 1e-10).unwrap();
        assert!(r.squares_to_minus_one && r.compatible);
        assert!(!r.positive);
        assert!(r.q_min_eigenvalue < 0.0);
    }

    #[test]
    fn identity_fails_square() {
        let r = validate_taming(&DMatrix::identity(2, 2), &omega(&[1]), 1e-10).unwrap();
        assert!(!r.squares_to_minus_one);
        assert!(validate_taming(&DMatrix::identity(3, 3), &omega(&[1]), 1e-10).is_err());
    }

    #[test]
    fn q_metric_examples() {
        let t = Taming::standard(omega(&[1, 1])).unwrap();
        assert_eq!(q_metric(&t), DMatrix::identity(4, 4));
        let t = Taming::standard(omega(&[2])).unwrap();
        assert_eq!(q_metric(&t), DMatrix::identity(2, 2) * 2.0);
    }

    #[test]
    fn exact_mode() {
        let j = RationalMatrix::from_integer(&IntegerMatrix::from_rows(&[[0, -1], [1, 0]]));
        assert!(validate_taming_exact(&j, &omega(&[1])).unwrap().passed());
        let neg = RationalMatrix::from_integer(&IntegerMatrix::from_rows(&[[0, 1], [-1, 0]]));
        let r = validate_taming_exact(&neg, &omega(&[1])).unwrap();
        assert!(r.squares_to_minus_one && r.compatible && !r.positive);
    }

    #[test]
    fn siegel_base_point_gives_standard() {
        for n in 1..=3 {
            let st = taming_from_siegel_point(&SiegelPoint::base_point(n), &omega(&vec![1; n])).unwrap();
            assert!(max_abs(&(st.taming.j() - j0(n))) < 1e-14);
        }
    }

    #[test]
    fn siegel_diag_two() {
        let z = SiegelPoint::new(DMatrix::zeros(1, 1), DMatrix::from_element(1, 1, 2.0)).unwrap();
        let st = taming_from_siegel_point(&z, &omega(&[1])).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 0.5, 0.0]);
        assert!(max_abs(&(st.taming.j() - expected)) < 1e-14);
    }

    #[test]
    fn siegel_with_real_part() {
        let z = SiegelPoint::new(DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 1.0)).unwrap();
        for t in [[1u64], [3]] {
            let st = taming_from_siegel_point(&z, &omega(&t)).unwrap();
            let r = validate_taming(st.taming.j(), &omega(&t), 1e-10).unwrap();
            assert!(r.passed());
            // +i eigenspace
            let jc = st.taming.j().map(|v| Complex::new(v, 0.0));
            let lhs = &jc * &st.lagrangian;
            let rhs = &st.lagrangian * Complex::new(0.0, 1.0);
            assert!((lhs - rhs).iter().all(|c| c.norm() < 1e-12));
        }
    }

    #[test]
    fn siegel_rejects_nonpositive() {
        let bad = SiegelPoint::new(DMatrix::zeros(1, 1), DMatrix::from_element(1, 1, -1.0));
        assert_eq!(bad, Err(PolarizationError::NonPositiveY));
    }

    #[test]
    fn siegel_nonstandard_gram() {
        // Ω_(1,2) in a sheared basis
        let u = IntegerMatrix::from_rows(&[[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 1, 1]]);
        let g = &(&u.transpose() * &omega(&[1, 2])) * &u;
        let z = SiegelPoint::new(
            DMatrix::from_row_slice(2, 2, &[0.3, 0.1, 0.1, -0.2]),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
        )
        .unwrap();
        let st = taming_from_siegel_point(&z, &g).unwrap();
        assert!(validate_taming(st.taming.j(), &g, 1e-10).unwrap().passed());
    }

    #[test]
    fn push_forward() {
        let t = Taming::standard(omega(&[1])).unwrap();
        let same = push_forward_taming(&IntegerMatrix::identity(2), &t).unwrap();
        assert_eq!(same.j(), t.j());
        let j0i = IntegerMatrix::from_rows(&[[0, -1], [1, 0]]);
        let fixed = push_forward_taming(&j0i, &t).unwrap();
        assert!(max_abs(&(fixed.j() - t.j())) < 1e-15);
        let g = IntegerMatrix::from_rows(&[[2, 1], [1, 1]]);
        let moved = push_forward_taming(&g, &t).unwrap();
        assert!(validate_taming(moved.j(), moved.omega(), 1e-10).unwrap().passed());
        assert_eq!(
            push_forward_taming(&IntegerMatrix::from_rows(&[[1, 0], [0, -1]]), &t),
            Err(PolarizationError::NotSymplectic)
        );
    }

    #[test]
    fn fundamental_form_checks() {
        let t = Taming::standard(omega(&[1])).unwrap();
        let r = validate_fundamental_form(&FundamentalFormSample::zero(2, 3), &t).unwrap();
        assert!(r.passed() && r.unitary);

        let bad = FundamentalFormSample::new(vec![t.j().clone()]);
        let r = validate_fundamental_form(&bad, &t).unwrap();
        assert!(!r.passed() && !r.unitary);
        assert!((r.directions[0].antilinearity_residual - 2.0).abs() < 1e-15);

        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -2.0]);
        let good = FundamentalFormSample::new(vec![antilinear_q_symmetric(&s, &t)]);
        let r = validate_fundamental_form(&good, &t).unwrap();
        assert!(r.passed() && !r.unitary, "{r:?}");
    }

    #[test]
    fn taming_json_roundtrip() {
        let t = Taming::standard(omega(&[1])).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        let back: Taming = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"J": [[1,0],[0,1]], "omega": [[0,1],[-1,0]]}"#;
        assert!(serde_json::from_str::<Taming>(bad).is_err());
    }
}
