//! Pointwise Lorentzian calculus for duality-covariant field strengths.
//!
//! A 2-form is stored as the 6-vector of its components `F_{μν}`, `μ < ν`,
//! in the order `(01, 02, 03, 12, 13, 23)`, and identified with the
//! antisymmetric tensor `F_{μν} = −F_{νμ}`. A field strength with values in
//! the duality space is a `6 × 2n` matrix whose column `a` is the 2-form
//! paired with the `a`-th basis vector. Symplectic matrices act on it by
//! right multiplication with `γᵀ`, tamings by right multiplication with `Jᵀ`.
//!
//! Signature is mostly plus `(−,+,+,+)`. Curvature terms are never computed
//! here: Einstein tensors and scalar-equation left-hand sides enter as
//! user-supplied samples.

use nalgebra::{DMatrix, Matrix4, Matrix6};
use serde::{Deserialize, Serialize};

use crate::exact_linalg::IntegerMatrix;
use crate::polarization::{
    matrix_from_rows, matrix_to_rows, push_forward_taming, q_metric, validate_fundamental_form,
    FundamentalFormSample, PolarizationError, Taming,
};

/// Index pairs of the 2-form basis.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("metric is not Lorentzian: {0}")]
    BadSignature(String),
    #[error("orientation must be +1 or -1, got {0}")]
    BadOrientation(i8),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sample contains non-finite entries")]
    NonFinite,
    #[error("invalid fundamental form: {0}")]
    InvalidFundamentalForm(String),
    #[error("invalid scalar sector sample: {0}")]
    InvalidScalarSample(String),
    #[error(transparent)]
    Polarization(#[from] PolarizationError),
}

fn mat4_from_rows(rows: &[Vec<f64>]) -> Result<Matrix4<f64>, FieldError> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(FieldError::DimensionMismatch("expected a 4x4 matrix".into()));
    }
    Ok(Matrix4::from_fn(|i, j| rows[i][j]))
}

fn mat4_to_rows(m: &Matrix4<f64>) -> Vec<Vec<f64>> {
    (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect()
}

/// Metric components and orientation at a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameRepr", into = "FrameRepr")]
pub struct PointFrame {
    g: Matrix4<f64>,
    orientation: i8,
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    g: Vec<Vec<f64>>,
    #[serde(default = "positive")]
    orientation: i8,
}

fn positive() -> i8 {
    1
}

impl TryFrom<FrameRepr> for PointFrame {
    type Error = FieldError;

    fn try_from(r: FrameRepr) -> Result<Self, FieldError> {
        PointFrame::new(mat4_from_rows(&r.g)?, r.orientation)
    }
}

impl From<PointFrame> for FrameRepr {
    fn from(f: PointFrame) -> Self {
        FrameRepr {
            g: mat4_to_rows(&f.g),
            orientation: f.orientation,
        }
    }
}

impl PointFrame {
    pub fn new(g: Matrix4<f64>, orientation: i8) -> Result<Self, FieldError> {
        if orientation != 1 && orientation != -1 {
            return Err(FieldError::BadOrientation(orientation));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(FieldError::NonFinite);
        }
        let scale = g.amax().max(1.0);
        if (g - g.transpose()).amax() > 1e-12 * scale {
            return Err(FieldError::BadSignature("metric is not symmetric".into()));
        }
        let det = g.determinant();
        if det >= 0.0 {
            return Err(FieldError::BadSignature(format!("det g = {det} is not negative")));
        }
        let eig = g.symmetric_eigen().eigenvalues;
        let negative = eig.iter().filter(|&&e| e < 0.0).count();
        let positive = eig.iter().filter(|&&e| e > 0.0).count();
        if (negative, positive) != (1, 3) {
            return Err(FieldError::BadSignature(format!(
                "signature ({negative} negative, {positive} positive)"
            )));
        }
        Ok(Self { g, orientation })
    }

    /// `η = diag(−1, 1, 1, 1)` with the positive orientation.
    pub fn minkowski() -> Self {
        Self {
            g: Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0)),
            orientation: 1,
        }
    }

    pub fn g(&self) -> &Matrix4<f64> {
        &self.g
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn inverse(&self) -> Matrix4<f64> {
        self.g.try_inverse().expect("Lorentzian metrics are invertible")
    }

    pub fn with_orientation(&self, orientation: i8) -> Result<Self, FieldError> {
        Self::new(self.g, orientation)
    }

    pub fn scaled(&self, c: f64) -> Result<Self, FieldError> {
        Self::new(self.g * c, self.orientation)
    }
}

fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut v = idx;
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if v[i] == v[j] {
                return 0.0;
            }
            if v[i] > v[j] {
                v.swap(i, j);
                sign = -sign;
            }
        }
    }
    sign
}

/// Antisymmetric tensor of a 2-form 6-vector.
pub fn two_form_tensor(v: &[f64]) -> Matrix4<f64> {
    let mut t = Matrix4::zeros();
    for (k, &(a, b)) in PAIRS.iter().enumerate() {
        t[(a, b)] = v[k];
        t[(b, a)] = -v[k];
    }
    t
}

/// Matrix of the Hodge star on 2-forms in the `PAIRS` basis.
pub fn hodge_star_matrix(frame: &PointFrame) -> Matrix6<f64> {
    let ginv = frame.inverse();
    let vol = f64::from(frame.orientation) * frame.g.determinant().abs().sqrt();
    let mut h = Matrix6::zeros();
    for col in 0..6 {
        let mut e = [0.0; 6];
        e[col] = 1.0;
        let lower = two_form_tensor(&e);
        let upper = ginv * lower * ginv;
        for (row, &(m, n)) in PAIRS.iter().enumerate() {
            let mut acc = 0.0;
            for &(a, b) in &PAIRS {
                acc += levi_civita([a, b, m, n]) * upper[(a, b)];
            }
            h[(row, col)] = vol * acc;
        }
    }
    h
}

/// Metric on 2-forms: `(α, β)_g = ½ α_{μν} β^{μν}` in the `PAIRS` basis.
pub fn lambda2_metric(frame: &PointFrame) -> Matrix6<f64> {
    let gi = frame.inverse();
    Matrix6::from_fn(|r, c| {
        let (m, n) = PAIRS[r];
        let (p, s) = PAIRS[c];
        gi[(m, p)] * gi[(n, s)] - gi[(m, s)] * gi[(n, p)]
    })
}

/// Duality-valued 2-form at a point: a `6 × 2n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStrengthSample(DMatrix<f64>);

impl Serialize for FieldStrengthSample {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldStrengthSample {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let m = matrix_from_rows(&rows).map_err(serde::de::Error::custom)?;
        FieldStrengthSample::new(m).map_err(serde::de::Error::custom)
    }
}

impl FieldStrengthSample {
    pub fn new(f: DMatrix<f64>) -> Result<Self, FieldError> {
        if f.nrows() != 6 {
            return Err(FieldError::DimensionMismatch(format!("expected 6 rows, got {}", f.nrows())));
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(FieldError::NonFinite);
        }
        Ok(Self(f))
    }

    pub fn zeros(width: usize) -> Self {
        Self(DMatrix::zeros(6, width))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.ncols()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn column_tensor(&self, a: usize) -> Matrix4<f64> {
        let col: Vec<f64> = self.0.column(a).iter().copied().collect();
        two_form_tensor(&col)
    }
}

fn check_width(f: &FieldStrengthSample, dim: usize, what: &str) -> Result<(), FieldError> {
    if f.width() != dim {
        return Err(FieldError::DimensionMismatch(format!(
            "sample width {} does not match {what} dimension {dim}",
            f.width()
        )));
    }
    Ok(())
}

/// `⋆_{g,J} = ∗_g ⊗ J`, acting as `F ↦ H·F·Jᵀ`.
#[derive(Debug, Clone)]
pub struct PolarizedStar {
    hodge: Matrix6<f64>,
    j: DMatrix<f64>,
}

impl PolarizedStar {
    pub fn apply(&self, f: &FieldStrengthSample) -> Result<FieldStrengthSample, FieldError> {
        check_width(f, self.j.nrows(), "taming")?;
        let h = DMatrix::from_fn(6, 6, |i, j| self.hodge[(i, j)]);
        Ok(FieldStrengthSample(h * &f.0 * self.j.transpose()))
    }

    pub fn hodge(&self) -> &Matrix6<f64> {
        &self.hodge
    }

    /// The operator on column-major vectorised samples: `J ⊗ H`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let h = DMatrix::from_fn(6, 6, |i, j| self.hodge[(i, j)]);
        self.j.kronecker(&h)
    }

    /// Dimensions of the `+1` and `−1` eigenspaces.
    pub fn eigenspace_dimensions(&self, tol: f64) -> (usize, usize) {
        let m = self.matrix();
        let dim = m.nrows();
        let id = DMatrix::<f64>::identity(dim, dim);
        let nullity = |a: DMatrix<f64>| dim - a.svd(false, false).rank(tol);
        (nullity(&m - &id), nullity(&m + &id))
    }
}

pub fn polarized_star(frame: &PointFrame, taming: &Taming) -> PolarizedStar {
    PolarizedStar {
        hodge: hodge_star_matrix(frame),
        j: taming.j().clone(),
    }
}

/// `F₊ = ½(F + ⋆F)`.
pub fn project_selfdual(
    f: &FieldStrengthSample,
    frame: &PointFrame,
    taming: &Taming,
) -> Result<FieldStrengthSample, FieldError> {
    let star = polarized_star(frame, taming).apply(f)?;
    Ok(FieldStrengthSample((&f.0 + &star.0) * 0.5))
}

/// `‖⋆F − F‖` in the Frobenius norm.
pub fn maxwell_residual(f: &FieldStrengthSample, frame: &PointFrame, taming: &Taming) -> Result<f64, FieldError> {
    let star = polarized_star(frame, taming).apply(f)?;
    Ok((star.0 - &f.0).norm())
}

/// `√tr(RᵀR·Q)` for `R = ⋆F − F`: unchanged under `(F, J) ↦ (F·γᵀ, γJγ⁻¹)`.
pub fn maxwell_residual_q(f: &FieldStrengthSample, frame: &PointFrame, taming: &Taming) -> Result<f64, FieldError> {
    let star = polarized_star(frame, taming).apply(f)?;
    let r = star.0 - &f.0;
    let q = q_metric(taming);
    Ok((r.transpose() * &r * q).trace().max(0.0).sqrt())
}

fn check_q(q: &DMatrix<f64>, f1: &FieldStrengthSample, f2: &FieldStrengthSample) -> Result<(), FieldError> {
    if q.nrows() != q.ncols() {
        return Err(FieldError::DimensionMismatch("Q must be square".into()));
    }
    check_width(f1, q.nrows(), "Q")?;
    check_width(f2, q.nrows(), "Q")
}

/// `(F₁ ⊘_Q F₂)_{μν} = Q_{ab} F₁ᵃ_{μα} g^{αβ} F₂ᵇ_{νβ}`.
pub fn inner_contraction(
    f1: &FieldStrengthSample,
    f2: &FieldStrengthSample,
    frame: &PointFrame,
    q: &DMatrix<f64>,
) -> Result<Matrix4<f64>, FieldError> {
    check_q(q, f1, f2)?;
    let ginv = frame.inverse();
    let mut out = Matrix4::zeros();
    for a in 0..q.nrows() {
        let left = f1.column_tensor(a) * ginv;
        for b in 0..q.ncols() {
            if q[(a, b)] == 0.0 {
                continue;
            }
            out += left * f2.column_tensor(b).transpose() * q[(a, b)];
        }
    }
    Ok(out)
}

/// `(F₁, F₂)_{g,Q} = Σ Q_{ab} (F₁ᵃ, F₂ᵇ)_g`.
pub fn twisted_pairing(
    f1: &FieldStrengthSample,
    f2: &FieldStrengthSample,
    frame: &PointFrame,
    q: &DMatrix<f64>,
) -> Result<f64, FieldError> {
    check_q(q, f1, f2)?;
    let g2 = lambda2_metric(frame);
    let g2 = DMatrix::from_fn(6, 6, |i, j| g2[(i, j)]);
    let gram = f1.0.transpose() * g2 * &f2.0;
    Ok(gram.component_mul(q).sum())
}

/// `Tr_g(T) = g^{μν} T_{μν}`.
pub fn metric_trace(frame: &PointFrame, t: &Matrix4<f64>) -> f64 {
    frame.inverse().component_mul(t).sum()
}

/// Scalar-sector data at a point; curvature terms are supplied, not computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScalarRepr", into = "ScalarRepr")]
pub struct ScalarSectorSample {
    pullback_metric: Matrix4<f64>,
    einstein_lhs: Option<Matrix4<f64>>,
    scalar_lhs: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    pullback_metric: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    einstein_lhs: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalar_lhs: Option<Vec<f64>>,
}

impl TryFrom<ScalarRepr> for ScalarSectorSample {
    type Error = FieldError;

    fn try_from(r: ScalarRepr) -> Result<Self, FieldError> {
        let lhs = r.einstein_lhs.as_deref().map(mat4_from_rows).transpose()?;
        ScalarSectorSample::new(mat4_from_rows(&r.pullback_metric)?, lhs, r.scalar_lhs)
    }
}

impl From<ScalarSectorSample> for ScalarRepr {
    fn from(s: ScalarSectorSample) -> Self {
        ScalarRepr {
            pullback_metric: mat4_to_rows(&s.pullback_metric),
            einstein_lhs: s.einstein_lhs.as_ref().map(mat4_to_rows),
            scalar_lhs: s.scalar_lhs,
        }
    }
}

impl ScalarSectorSample {
    pub fn new(
        pullback_metric: Matrix4<f64>,
        einstein_lhs: Option<Matrix4<f64>>,
        scalar_lhs: Option<Vec<f64>>,
    ) -> Result<Self, FieldError> {
        let tol = 1e-10 * pullback_metric.amax().max(1.0);
        if (pullback_metric - pullback_metric.transpose()).amax() > tol {
            return Err(FieldError::InvalidScalarSample("pullback metric is not symmetric".into()));
        }
        let min = pullback_metric.symmetric_eigen().eigenvalues.min();
        if min < -tol {
            return Err(FieldError::InvalidScalarSample(format!(
                "pullback metric is not positive semidefinite (eigenvalue {min:e})"
            )));
        }
        Ok(Self {
            pullback_metric,
            einstein_lhs,
            scalar_lhs,
        })
    }

    pub fn zero() -> Self {
        Self {
            pullback_metric: Matrix4::zeros(),
            einstein_lhs: None,
            scalar_lhs: None,
        }
    }

    /// Formal sample with an arbitrary symmetric tensor, skipping the
    /// semidefiniteness check.
    pub fn formal(pullback_metric: Matrix4<f64>) -> Self {
        Self {
            pullback_metric,
            einstein_lhs: None,
            scalar_lhs: None,
        }
    }

    pub fn pullback_metric(&self) -> &Matrix4<f64> {
        &self.pullback_metric
    }

    pub fn einstein_lhs(&self) -> Option<&Matrix4<f64>> {
        self.einstein_lhs.as_ref()
    }

    pub fn scalar_lhs(&self) -> Option<&[f64]> {
        self.scalar_lhs.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EinsteinEvaluation {
    #[serde(serialize_with = "ser_mat4")]
    pub rhs: Matrix4<f64>,
    /// `‖LHS − RHS‖_∞` when a left-hand side was supplied.
    pub residual: Option<f64>,
}

fn ser_mat4<S: serde::Serializer>(m: &Matrix4<f64>, s: S) -> Result<S::Ok, S::Error> {
    mat4_to_rows(m).serialize(s)
}

/// `½ Tr_g(s*G)·g − s*G + 2 F ⊘_Q F`.
pub fn einstein_rhs(
    f: &FieldStrengthSample,
    frame: &PointFrame,
    q: &DMatrix<f64>,
    scalar: &ScalarSectorSample,
) -> Result<EinsteinEvaluation, FieldError> {
    let p = &scalar.pullback_metric;
    let stress = inner_contraction(f, f, frame, q)?;
    let rhs = frame.g * (0.5 * metric_trace(frame, p)) - p + stress * 2.0;
    let residual = scalar.einstein_lhs.map(|lhs| (lhs - rhs).amax());
    Ok(EinsteinEvaluation { rhs, residual })
}

/// `r_k = ½ (∗F, Ψ(v_k)F)_{g,Q}` for every sampled vertical direction.
pub fn scalar_rhs(
    f: &FieldStrengthSample,
    frame: &PointFrame,
    taming: &Taming,
    psi: &FundamentalFormSample,
) -> Result<Vec<f64>, FieldError> {
    check_width(f, taming.dim(), "taming")?;
    let report = validate_fundamental_form(psi, taming)?;
    if !report.passed() {
        let bad: Vec<String> = report
            .directions
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.passed)
            .map(|(k, d)| {
                format!(
                    "direction {k}: antilinearity {:e}, Q-symmetry {:e}",
                    d.antilinearity_residual, d.q_symmetry_residual
                )
            })
            .collect();
        return Err(FieldError::InvalidFundamentalForm(bad.join("; ")));
    }
    let q = q_metric(taming);
    let h = hodge_star_matrix(frame);
    let h = DMatrix::from_fn(6, 6, |i, j| h[(i, j)]);
    let star_f = FieldStrengthSample(h * &f.0);
    psi.components
        .iter()
        .map(|c| {
            let moved = FieldStrengthSample(&f.0 * c.transpose());
            twisted_pairing(&star_f, &moved, frame, &q).map(|v| 0.5 * v)
        })
        .collect()
}

/// Acts on a sample and its taming by a symplectic integer matrix:
/// `(F·γᵀ, γJγ⁻¹)`.
pub fn duality_transform_sample(
    gamma: &IntegerMatrix,
    f: &FieldStrengthSample,
    taming: &Taming,
) -> Result<(FieldStrengthSample, Taming), FieldError> {
    check_width(f, taming.dim(), "taming")?;
    let pushed = push_forward_taming(gamma, taming)?;
    let moved = &f.0 * gamma.to_f64().transpose();
    Ok((FieldStrengthSample(moved), pushed))
}
