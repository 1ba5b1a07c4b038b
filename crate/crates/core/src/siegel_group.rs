//! The affine Siegel group `Aff_t = U(1)^{2n} ⋊ Sp_t(2n, ℤ)` acting on the
//! symplectic torus `ℝ^{2n}/Λ_t`.
//!
//! Torus coordinates are taken in the Frobenius basis of `Λ_t`, so the torus
//! is `ℚ^{2n}/ℤ^{2n}` componentwise and integer matrices act on it directly.
//! [`TorusPoint::from_ambient`] converts from coordinates on `ℝ^{2n}` where
//! `Λ_t = ℤ^n ⊕ t_1ℤ ⊕ … ⊕ t_nℤ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exact_linalg::{json, IntegerMatrix};
use crate::symplectic_lattices::{sp_type_membership, LatticeError, LatticeType};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SiegelError {
    #[error("type mismatch: {0} vs {1}")]
    TypeMismatch(LatticeType, LatticeType),
    #[error("rotation is not in Sp_t(2n, Z) for type {0}")]
    NotInGroup(LatticeType),
    #[error("translation has length {got}, expected {expected}")]
    BadTranslation { got: usize, expected: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn reduce_unit(x: &BigRational) -> BigRational {
    x - x.floor()
}

fn reduce_all(v: &[BigRational]) -> Vec<BigRational> {
    v.iter().map(reduce_unit).collect()
}

fn int_mul_rational(m: &IntegerMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .filter(|(a, _)| !a.is_zero())
                .map(|(a, x)| x * BigRational::from_integer(a.clone()))
                .fold(BigRational::zero(), |acc, y| acc + y)
        })
        .collect()
}

/// `uᵀ Ω_t v` for rational vectors in lattice coordinates.
pub fn omega_pairing(t: &LatticeType, u: &[BigRational], v: &[BigRational]) -> BigRational {
    let omega = t.omega();
    let ov = int_mul_rational(&omega, v);
    u.iter().zip(&ov).map(|(a, b)| a * b).fold(BigRational::zero(), |acc, y| acc + y)
}

/// A point of the torus `ℝ^{2n}/Λ_t`, in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct TorusPoint {
    coords: Vec<BigRational>,
    lattice_type: LatticeType,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    #[serde(with = "json::rational_vec")]
    coords: Vec<BigRational>,
    t: Vec<u64>,
}

impl TryFrom<PointRepr> for TorusPoint {
    type Error = SiegelError;

    fn try_from(r: PointRepr) -> Result<Self, SiegelError> {
        TorusPoint::new(r.coords, LatticeType::new(r.t)?)
    }
}

impl From<TorusPoint> for PointRepr {
    fn from(p: TorusPoint) -> Self {
        PointRepr {
            coords: p.coords,
            t: p.lattice_type.entries().to_vec(),
        }
    }
}

impl TorusPoint {
    pub fn new(coords: Vec<BigRational>, lattice_type: LatticeType) -> Result<Self, SiegelError> {
        let expected = 2 * lattice_type.half_rank();
        if coords.len() != expected {
            return Err(SiegelError::BadTranslation {
                got: coords.len(),
                expected,
            });
        }
        Ok(Self {
            coords: reduce_all(&coords),
            lattice_type,
        })
    }

    pub fn origin(t: &LatticeType) -> Self {
        Self {
            coords: vec![BigRational::zero(); 2 * t.half_rank()],
            lattice_type: t.clone(),
        }
    }

    /// From coordinates on `ℝ^{2n}` with the standard lattice `Λ_t`: the
    /// second block is divided by `t_i`.
    pub fn from_ambient(x: &[BigRational], t: &LatticeType) -> Result<Self, SiegelError> {
        let n = t.half_rank();
        if x.len() != 2 * n {
            return Err(SiegelError::BadTranslation {
                got: x.len(),
                expected: 2 * n,
            });
        }
        let coords = x
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                if i < n {
                    xi.clone()
                } else {
                    xi / BigRational::from_integer(BigInt::from(t.entries()[i - n]))
                }
            })
            .collect();
        Self::new(coords, t.clone())
    }

    /// Reduced representative on `ℝ^{2n}`.
    pub fn to_ambient(&self) -> Vec<BigRational> {
        let n = self.lattice_type.half_rank();
        self.coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i < n {
                    c.clone()
                } else {
                    c * BigRational::from_integer(BigInt::from(self.lattice_type.entries()[i - n]))
                }
            })
            .collect()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn lattice_type(&self) -> &LatticeType {
        &self.lattice_type
    }

    /// Torus group law.
    pub fn add(&self, other: &Self) -> Result<Self, SiegelError> {
        same_type(&self.lattice_type, &other.lattice_type)?;
        let sum: Vec<BigRational> = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(Self {
            coords: reduce_all(&sum),
            lattice_type: self.lattice_type.clone(),
        })
    }
}

fn same_type(a: &LatticeType, b: &LatticeType) -> Result<(), SiegelError> {
    if a == b {
        Ok(())
    } else {
        Err(SiegelError::TypeMismatch(a.clone(), b.clone()))
    }
}

/// An element `(a, γ)` of `Aff_t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AffRepr", into = "AffRepr")]
pub struct AffineSymplectomorphism {
    translation: Vec<BigRational>,
    rotation: IntegerMatrix,
    lattice_type: LatticeType,
}

#[derive(Serialize, Deserialize)]
struct AffRepr {
    #[serde(with = "json::rational_vec")]
    translation: Vec<BigRational>,
    rotation: IntegerMatrix,
    t: Vec<u64>,
}

impl TryFrom<AffRepr> for AffineSymplectomorphism {
    type Error = SiegelError;

    fn try_from(r: AffRepr) -> Result<Self, SiegelError> {
        AffineSymplectomorphism::new(r.translation, r.rotation, LatticeType::new(r.t)?)
    }
}

impl From<AffineSymplectomorphism> for AffRepr {
    fn from(x: AffineSymplectomorphism) -> Self {
        AffRepr {
            translation: x.translation,
            rotation: x.rotation,
            t: x.lattice_type.entries().to_vec(),
        }
    }
}

impl AffineSymplectomorphism {
    pub fn new(
        translation: Vec<BigRational>,
        rotation: IntegerMatrix,
        lattice_type: LatticeType,
    ) -> Result<Self, SiegelError> {
        let expected = 2 * lattice_type.half_rank();
        if translation.len() != expected {
            return Err(SiegelError::BadTranslation {
                got: translation.len(),
                expected,
            });
        }
        if !sp_type_membership(&rotation, &lattice_type)? {
            return Err(SiegelError::NotInGroup(lattice_type));
        }
        Ok(Self {
            translation: reduce_all(&translation),
            rotation,
            lattice_type,
        })
    }

    pub fn identity(t: &LatticeType) -> Self {
        Self {
            translation: vec![BigRational::zero(); 2 * t.half_rank()],
            rotation: IntegerMatrix::identity(2 * t.half_rank()),
            lattice_type: t.clone(),
        }
    }

    pub fn translation_by(point: &TorusPoint) -> Self {
        let t = point.lattice_type().clone();
        Self {
            translation: point.coords().to_vec(),
            rotation: IntegerMatrix::identity(2 * t.half_rank()),
            lattice_type: t,
        }
    }

    pub fn translation(&self) -> &[BigRational] {
        &self.translation
    }

    pub fn rotation(&self) -> &IntegerMatrix {
        &self.rotation
    }

    pub fn lattice_type(&self) -> &LatticeType {
        &self.lattice_type
    }

    pub fn is_identity(&self) -> bool {
        self.rotation.is_identity() && self.translation.iter().all(Zero::is_zero)
    }

    /// Whether this element lies in the identity component (pure translation).
    pub fn is_translation(&self) -> bool {
        self.rotation.is_identity()
    }
}

/// `(a₁, γ₁)(a₂, γ₂) = (a₁ + γ₁a₂, γ₁γ₂)`.
pub fn aff_compose(
    x: &AffineSymplectomorphism,
    y: &AffineSymplectomorphism,
) -> Result<AffineSymplectomorphism, SiegelError> {
    same_type(&x.lattice_type, &y.lattice_type)?;
    let moved = int_mul_rational(&x.rotation, &y.translation);
    let sum: Vec<BigRational> = x.translation.iter().zip(&moved).map(|(a, b)| a + b).collect();
    Ok(AffineSymplectomorphism {
        translation: reduce_all(&sum),
        rotation: &x.rotation * &y.rotation,
        lattice_type: x.lattice_type.clone(),
    })
}

/// `(a, γ)⁻¹ = (−γ⁻¹a, γ⁻¹)`.
pub fn aff_inverse(x: &AffineSymplectomorphism) -> AffineSymplectomorphism {
    let inv = x
        .rotation
        .inverse_unimodular()
        .expect("elements of Sp_t(2n, Z) are unimodular");
    let moved = int_mul_rational(&inv, &x.translation);
    let neg: Vec<BigRational> = moved.iter().map(|v| -v).collect();
    AffineSymplectomorphism {
        translation: reduce_all(&neg),
        rotation: inv,
        lattice_type: x.lattice_type.clone(),
    }
}

/// `p ↦ γp + a mod Λ_t`.
pub fn aff_act(x: &AffineSymplectomorphism, p: &TorusPoint) -> Result<TorusPoint, SiegelError> {
    same_type(&x.lattice_type, &p.lattice_type)?;
    let moved = int_mul_rational(&x.rotation, &p.coords);
    let sum: Vec<BigRational> = moved.iter().zip(&x.translation).map(|(a, b)| a + b).collect();
    Ok(TorusPoint {
        coords: reduce_all(&sum),
        lattice_type: p.lattice_type.clone(),
    })
}

/// The natural representation on `ℤ^{2n}`; translations act trivially.
pub fn lattice_rep(x: &AffineSymplectomorphism) -> IntegerMatrix {
    x.rotation.clone()
}

/// Linear action of the rotation part on an unreduced rational vector.
pub fn rotate_vector(x: &AffineSymplectomorphism, v: &[BigRational]) -> Vec<BigRational> {
    int_mul_rational(&x.rotation, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn t1() -> LatticeType {
        LatticeType::principal(1)
    }

    fn elem(a: [(i64, i64); 2], g: [[i64; 2]; 2]) -> AffineSymplectomorphism {
        AffineSymplectomorphism::new(
            vec![q(a[0].0, a[0].1), q(a[1].0, a[1].1)],
            IntegerMatrix::from_rows(&g),
            t1(),
        )
        .unwrap()
    }

    #[test]
    fn compose_examples() {
        let x = elem([(1, 3), (5, 7)], [[1, 1], [0, 1]]);
        assert_eq!(aff_compose(&AffineSymplectomorphism::identity(&t1()), &x).unwrap(), x);

        let h = elem([(1, 2), (0, 1)], [[1, 0], [0, 1]]);
        assert!(aff_compose(&h, &h).unwrap().is_identity());

        let shear = elem([(0, 1), (0, 1)], [[1, 1], [0, 1]]);
        let third = elem([(1, 3), (0, 1)], [[1, 0], [0, 1]]);
        assert_eq!(aff_compose(&shear, &third).unwrap(), elem([(1, 3), (0, 1)], [[1, 1], [0, 1]]));
    }

    #[test]
    fn inverse_examples() {
        let id = AffineSymplectomorphism::identity(&t1());
        assert_eq!(aff_inverse(&id), id);
        let x = elem([(1, 4), (0, 1)], [[1, 0], [0, 1]]);
        assert_eq!(aff_inverse(&x), elem([(3, 4), (0, 1)], [[1, 0], [0, 1]]));
        let s = elem([(0, 1), (0, 1)], [[0, -1], [1, 0]]);
        assert_eq!(aff_inverse(&s), elem([(0, 1), (0, 1)], [[0, 1], [-1, 0]]));
    }

    #[test]
    fn act_examples() {
        let p = TorusPoint::new(vec![q(1, 2), q(1, 2)], t1()).unwrap();
        let id = AffineSymplectomorphism::identity(&t1());
        assert_eq!(aff_act(&id, &p).unwrap(), p);
        let tr = elem([(1, 2), (1, 2)], [[1, 0], [0, 1]]);
        assert_eq!(aff_act(&tr, &TorusPoint::origin(&t1())).unwrap(), p);
        let shear = elem([(0, 1), (0, 1)], [[1, 1], [0, 1]]);
        let out = aff_act(&shear, &p).unwrap();
        assert_eq!(out.coords(), &[q(0, 1), q(1, 2)]);
    }

    #[test]
    fn rep_forgets_translation() {
        let x = elem([(1, 3), (0, 1)], [[1, 0], [0, 1]]);
        assert!(lattice_rep(&x).is_identity());
        let y = elem([(1, 3), (0, 1)], [[2, 1], [1, 1]]);
        assert_eq!(lattice_rep(&y), IntegerMatrix::from_rows(&[[2, 1], [1, 1]]));
    }

    #[test]
    fn errors() {
        let t2 = LatticeType::new(vec![2]).unwrap();
        let a = AffineSymplectomorphism::identity(&t1());
        let b = AffineSymplectomorphism::identity(&t2);
        assert!(matches!(aff_compose(&a, &b), Err(SiegelError::TypeMismatch(..))));
        assert!(matches!(
            AffineSymplectomorphism::new(vec![q(0, 1); 2], IntegerMatrix::from_rows(&[[2, 0], [0, 1]]), t1()),
            Err(SiegelError::NotInGroup(_))
        ));
        assert!(AffineSymplectomorphism::new(vec![q(0, 1)], IntegerMatrix::identity(2), t1()).is_err());
    }

    #[test]
    fn ambient_chart() {
        let t = LatticeType::new(vec![1, 3]).unwrap();
        let x = vec![q(1, 2), q(5, 2), q(1, 1), q(4, 1)];
        let p = TorusPoint::from_ambient(&x, &t).unwrap();
        assert_eq!(p.coords(), &[q(1, 2), q(1, 2), q(0, 1), q(1, 3)]);
        assert_eq!(p.to_ambient(), vec![q(1, 2), q(1, 2), q(0, 1), q(1, 1)]);
    }

    #[test]
    fn json_roundtrip() {
        let x = elem([(1, 3), (2, 5)], [[1, 1], [0, 1]]);
        let text = serde_json::to_string(&x).unwrap();
        assert!(text.contains(r#""translation":["1/3","2/5"]"#));
        let back: AffineSymplectomorphism = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
    }
}
