mod common;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use siegel_core::siegel_group::{aff_act, aff_compose, aff_inverse, lattice_rep};
use siegel_core::{AffineSymplectomorphism, LatticeType, TorusPoint};

fn random_element(rng: &mut rand_chacha::ChaCha8Rng, t: &LatticeType) -> AffineSymplectomorphism {
    let a: Vec<BigRational> = (0..2 * t.half_rank()).map(|_| common::random_rational(rng, 9, 7)).collect();
    let g = common::random_sp(rng, t, 3, 2);
    AffineSymplectomorphism::new(a, g, t.clone()).unwrap()
}

fn random_point(rng: &mut rand_chacha::ChaCha8Rng, t: &LatticeType) -> TorusPoint {
    let c: Vec<BigRational> = (0..2 * t.half_rank()).map(|_| common::random_rational(rng, 9, 5)).collect();
    TorusPoint::new(c, t.clone()).unwrap()
}

#[test]
fn group_laws() {
    let mut rng = common::rng(31);
    for _ in 0..300 {
        let n = rng.gen_range(1..=3);
        let t = common::random_type(&mut rng, n);
        let (x, y, z) = (random_element(&mut rng, &t), random_element(&mut rng, &t), random_element(&mut rng, &t));
        let xy_z = aff_compose(&aff_compose(&x, &y).unwrap(), &z).unwrap();
        let x_yz = aff_compose(&x, &aff_compose(&y, &z).unwrap()).unwrap();
        assert_eq!(xy_z, x_yz);
        let e = AffineSymplectomorphism::identity(&t);
        assert_eq!(aff_compose(&e, &x).unwrap(), x);
        assert_eq!(aff_compose(&x, &e).unwrap(), x);
        assert!(aff_compose(&x, &aff_inverse(&x)).unwrap().is_identity());
        assert!(aff_compose(&aff_inverse(&x), &x).unwrap().is_identity());
    }
}

#[test]
fn action_and_representation() {
    let mut rng = common::rng(32);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let t = common::random_type(&mut rng, n);
        let (x, y) = (random_element(&mut rng, &t), random_element(&mut rng, &t));
        let p = random_point(&mut rng, &t);
        let lhs = aff_act(&aff_compose(&x, &y).unwrap(), &p).unwrap();
        let rhs = aff_act(&x, &aff_act(&y, &p).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lattice_rep(&aff_compose(&x, &y).unwrap()), &lattice_rep(&x) * &lattice_rep(&y));
        assert!(p.coords().iter().all(|c| !c.is_negative_like()));
    }
}

#[test]
fn mismatched_types_rejected() {
    let a = AffineSymplectomorphism::identity(&LatticeType::new(vec![1]).unwrap());
    let b = AffineSymplectomorphism::identity(&LatticeType::new(vec![2]).unwrap());
    assert!(aff_compose(&a, &b).is_err());
}

trait NonNeg {
    fn is_negative_like(&self) -> bool;
}

impl NonNeg for BigRational {
    fn is_negative_like(&self) -> bool {
        self < &BigRational::zero() || self >= &BigRational::from_integer(1.into())
    }
}
