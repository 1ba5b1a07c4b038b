//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs as a plain binary so the lines are printed on every `cargo test`.

mod common;

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use siegel_core::exact_linalg::smith_normal_form;
use siegel_core::field_calculus::{
    duality_transform_sample, inner_contraction, maxwell_residual_q, metric_trace, polarized_star, scalar_rhs,
};
use siegel_core::local_systems::{charge_lattice_basis, dsz_check, twisted_cohomology_all, ChargeClass, TwistedComplex};
use siegel_core::polarization::{push_forward_taming, q_metric, FundamentalFormSample, Taming};
use siegel_core::siegel_group::{aff_compose, aff_inverse};
use siegel_core::symplectic_lattices::{frobenius_basis_of, IntegralSymplecticSpace};
use siegel_core::uduality::{
    adjoint_map, centralizer_enumerate, compose_elements, uduality_fiber_product, validate_element,
    FiniteScalarModel, HolonomySubgroup, UDualityElement, DEFAULT_BUDGET,
};
use siegel_core::{AffineSymplectomorphism, IntegerMatrix, LatticeType};

use common::oracles;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Instance {
    t: LatticeType,
    gram: IntegerMatrix,
}

fn lattice_instances() -> Vec<Instance> {
    let mut rng = common::rng(1001);
    (0..1000)
        .map(|_| {
            let n = rng.gen_range(1..=3);
            let t = common::random_type(&mut rng, n);
            let u = common::random_unimodular(&mut rng, 2 * n, 12);
            let gram = &(&u.transpose() * &t.omega()) * &u;
            Instance { t, gram }
        })
        .collect()
}

fn criterion_type_invariance() -> Outcome {
    let instances = lattice_instances();
    for (i, inst) in instances.iter().enumerate() {
        let base = IntegralSymplecticSpace::new(inst.t.omega()).map_err(|e| e.to_string())?;
        let moved = IntegralSymplecticSpace::new(inst.gram.clone()).map_err(|e| e.to_string())?;
        ensure(moved.lattice_type() == base.lattice_type(), || format!("instance {i}: type changed"))?;
        let doubled: Vec<BigInt> = inst.t.entries().iter().flat_map(|&x| [BigInt::from(x), BigInt::from(x)]).collect();
        ensure(smith_normal_form(&inst.gram).diagonal() == doubled, || format!("instance {i}: SNF mismatch"))?;
    }
    Ok(format!("{} instances", instances.len()))
}

fn criterion_frobenius_certificate() -> Outcome {
    let instances = lattice_instances();
    for (i, inst) in instances.iter().enumerate() {
        let fb = frobenius_basis_of(&inst.gram).map_err(|e| e.to_string())?;
        let p = &fb.change_of_basis;
        ensure(p.is_unimodular(), || format!("instance {i}: change of basis not unimodular"))?;
        ensure(&(&p.transpose() * &inst.gram) * p == inst.t.omega(), || format!("instance {i}: PᵀGP ≠ Ω_t"))?;
    }
    Ok(format!("{} certificates", instances.len()))
}

fn criterion_aff_group_laws() -> Outcome {
    let mut rng = common::rng(1003);
    for i in 0..1000 {
        let n = rng.gen_range(1..=3);
        let t = common::random_type(&mut rng, n);
        let mut element = || {
            let a: Vec<BigRational> = (0..2 * n).map(|_| common::random_rational(&mut rng, 9, 7)).collect();
            let g = common::random_sp(&mut rng, &t, 2, 2);
            AffineSymplectomorphism::new(a, g, t.clone()).unwrap()
        };
        let (x, y, z) = (element(), element(), element());
        let c = |a: &AffineSymplectomorphism, b: &AffineSymplectomorphism| aff_compose(a, b).unwrap();
        ensure(c(&c(&x, &y), &z) == c(&x, &c(&y, &z)), || format!("triple {i}: not associative"))?;
        let e = AffineSymplectomorphism::identity(&t);
        ensure(c(&e, &x) == x && c(&x, &e) == x, || format!("triple {i}: identity law"))?;
        ensure(
            c(&x, &aff_inverse(&x)).is_identity() && c(&aff_inverse(&x), &x).is_identity(),
            || format!("triple {i}: inverse law"),
        )?;
    }
    Ok("1000 triples".into())
}

fn criterion_star_involution() -> Outcome {
    let mut rng = common::rng(1004);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(1..=3);
        let t = common::random_type(&mut rng, n);
        let frame = common::random_frame(&mut rng);
        let taming = common::random_taming(&mut rng, &t);
        let star = polarized_star(&frame, &taming);
        let m = star.matrix();
        let err = (&m * &m - DMatrix::<f64>::identity(12 * n, 12 * n)).amax();
        worst = worst.max(err);
        ensure(err <= 1e-10, || format!("pair {i}: ‖⋆² − I‖ = {err:e}"))?;
        let dims = star.eigenspace_dimensions(1e-8);
        ensure(dims == (6 * n, 6 * n), || format!("pair {i}: eigenspaces {dims:?}, n = {n}"))?;
    }
    Ok(format!("100 pairs, max ‖⋆² − I‖ = {worst:.1e}"))
}

fn criterion_tracelessness() -> Outcome {
    let mut rng = common::rng(1005);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(1..=3);
        let t = common::random_type(&mut rng, n);
        let frame = common::random_frame(&mut rng);
        let taming = common::random_taming(&mut rng, &t);
        let f = common::random_selfdual(&mut rng, &frame, &taming);
        let c = inner_contraction(&f, &f, &frame, &q_metric(&taming)).map_err(|e| e.to_string())?;
        let ratio = metric_trace(&frame, &c).abs() / f.norm().powi(2).max(f64::MIN_POSITIVE);
        worst = worst.max(ratio);
        ensure(ratio <= 1e-9, || format!("sample {i}: |Tr| / ‖F‖² = {ratio:e}"))?;
    }
    Ok(format!("100 samples, max |Tr|/‖F‖² = {worst:.1e}"))
}

fn criterion_equivariance() -> Outcome {
    let mut rng = common::rng(1006);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(1..=3);
        let t = common::random_small_type(&mut rng, n);
        let frame = common::random_frame(&mut rng);
        let taming = common::random_siegel_taming(&mut rng, &t);
        let f = common::random_field(&mut rng, 2 * n);
        let gamma = common::random_sp(&mut rng, &t, 2, 1);
        let (fg, tg) = duality_transform_sample(&gamma, &f, &taming).map_err(|e| e.to_string())?;
        let r0 = maxwell_residual_q(&f, &frame, &taming).map_err(|e| e.to_string())?;
        let r1 = maxwell_residual_q(&fg, &frame, &tg).map_err(|e| e.to_string())?;
        let dr = (r0 - r1).abs() / (1.0 + r0);
        let c0 = inner_contraction(&f, &f, &frame, &q_metric(&taming)).map_err(|e| e.to_string())?;
        let c1 = inner_contraction(&fg, &fg, &frame, &q_metric(&tg)).map_err(|e| e.to_string())?;
        let dc = (c0 - c1).amax() / (1.0 + c0.amax());
        worst = worst.max(dr).max(dc);
        ensure(dr <= 1e-9 && dc <= 1e-9, || format!("γ {i}: residual drift {dr:e}, stress drift {dc:e}"))?;
    }
    Ok(format!("100 γ, max relative drift = {worst:.1e}"))
}

fn criterion_cohomology_oracles() -> Outcome {
    let mut rng = common::rng(1007);
    let t = LatticeType::principal(1);
    let id = IntegerMatrix::identity(2);
    let mut gammas = vec![-&id];
    while gammas.len() < 50 {
        let letters = rng.gen_range(1..5);
        gammas.push(common::random_sl2(&mut rng, letters));
    }
    for (i, g) in gammas.iter().enumerate() {
        let c = TwistedComplex::circle(t.clone(), g.clone()).map_err(|e| e.to_string())?;
        let h = twisted_cohomology_all(&c).map_err(|e| e.to_string())?;
        let snf = smith_normal_form(&(g - &id));
        ensure(h[0].free_rank == 2 - snf.rank() && h[0].torsion.is_empty(), || format!("circle {i}: H⁰ ≠ ker(γ − I)"))?;
        ensure(h[1].free_rank == 2 - snf.rank() && h[1].torsion == snf.torsion(), || format!("circle {i}: H¹ ≠ coker(γ − I)"))?;
    }
    let minus = twisted_cohomology_all(&TwistedComplex::circle(t.clone(), -&id).unwrap()).unwrap();
    ensure(minus[1].torsion == vec![BigInt::from(2), BigInt::from(2)], || "γ = −I: torsion is not (2, 2)".into())?;

    let models = [
        ("S²", TwistedComplex::sphere(t.clone()).unwrap()),
        ("T²", TwistedComplex::torus(t.clone(), id.clone(), id.clone()).unwrap()),
        ("T⁴", TwistedComplex::torus_n(t.clone(), vec![id.clone(); 4]).unwrap()),
    ];
    for (name, c) in &models {
        let h = twisted_cohomology_all(c).map_err(|e| e.to_string())?;
        ensure(oracles::summary(&h) == oracles::untwisted_cohomology(c), || format!("{name}: differs from untwisted cohomology"))?;
    }
    Ok("50 circles, S², T², T⁴".into())
}

fn criterion_dsz() -> Outcome {
    let mut rng = common::rng(1008);
    let t = LatticeType::principal(1);
    let id = IntegerMatrix::identity(2);
    let s = IntegerMatrix::from_rows(&[[0, -1], [1, 0]]);
    let complexes = [
        TwistedComplex::sphere(t.clone()).unwrap(),
        TwistedComplex::torus(t.clone(), id.clone(), id.clone()).unwrap(),
        TwistedComplex::torus(t.clone(), s, id.clone()).unwrap(),
        TwistedComplex::torus_n(t.clone(), vec![id.clone(); 3]).unwrap(),
    ];
    let mut instances = 0;
    for (ci, c) in complexes.iter().enumerate() {
        let basis = charge_lattice_basis(c).map_err(|e| e.to_string())?.basis;
        let len = c.cochain_dim(2);
        let d1 = c.coboundary_matrix(1).to_rational();
        for _ in 0..5 {
            let coeffs: Vec<BigInt> = basis.iter().map(|_| BigInt::from(rng.gen_range(-6..=6))).collect();
            let weights: Vec<BigRational> = coeffs.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            let integral = ChargeClass::combination(len, &weights, &basis);
            let fractional = (!basis.is_empty()).then(|| {
                let mut w = weights.clone();
                let k = rng.gen_range(0..w.len());
                w[k] += BigRational::new(rng.gen_range(1..4).into(), 4.into());
                ChargeClass::combination(len, &w, &basis)
            });
            for _ in 0..20 {
                let x: Vec<BigRational> = (0..c.cochain_dim(1)).map(|_| common::random_rational(&mut rng, 9, 6)).collect();
                let cob = ChargeClass::new(d1.mul_vec(&x));
                let v = dsz_check(&integral.add(&cob), c).map_err(|e| e.to_string())?;
                ensure(v.integral && v.coordinates.as_ref() == Some(&coeffs), || format!("complex {ci}: integral class misjudged"))?;
                if let Some(fr) = &fractional {
                    let v = dsz_check(&fr.add(&cob), c).map_err(|e| e.to_string())?;
                    ensure(!v.integral, || format!("complex {ci}: fractional class accepted"))?;
                }
            }
            instances += 1;
        }
    }
    Ok(format!("{instances} classes × 20 coboundaries"))
}

fn criterion_centralizer() -> Outcome {
    let s = IntegerMatrix::from_rows(&[[0, -1], [1, 0]]);
    let h = HolonomySubgroup::new(vec![s.clone()], LatticeType::principal(1)).map_err(|e| e.to_string())?;
    let got = centralizer_enumerate(&h, 3, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let id = IntegerMatrix::identity(2);
    let mut want = vec![id.clone(), -&id, s.clone(), -&s];
    want.sort_by_key(|m| m.entries().to_vec());
    ensure(got == want, || format!("got {} elements, expected {{±I, ±S}}", got.len()))?;
    ensure(got == oracles::brute_centralizer(&h, 3), || "disagrees with the brute-force filter".into())?;
    Ok("{±I, ±S}, 2401 matrices filtered".into())
}

fn criterion_fiber_product() -> Outcome {
    let t = LatticeType::principal(1);
    let base = Taming::standard(t.omega()).map_err(|e| e.to_string())?;
    let gamma = IntegerMatrix::from_rows(&[[1, 1], [0, 1]]);
    let moved = push_forward_taming(&gamma, &base).map_err(|e| e.to_string())?;
    let model = FiniteScalarModel::new(2, vec![vec![1, 0]], vec![base.j().clone(), moved.j().clone()], t, 1e-10)
        .map_err(|e| e.to_string())?;
    let bound = 2;
    let fp = uduality_fiber_product(&model, bound, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let mut got: Vec<(usize, IntegerMatrix)> = fp.elements.iter().map(adjoint_map).collect();
    got.sort_by_key(|(f, u)| (*f, u.entries().to_vec()));
    ensure(got == oracles::brute_fiber_product(&model, bound as i64), || "disagrees with the brute-force filter".into())?;
    ensure(fp.closure.closed, || "result not closed under in-box products".into())?;

    let mut rng = common::rng(1010);
    let mut torus = || -> Vec<Vec<BigRational>> {
        (0..2).map(|_| (0..2).map(|_| common::random_rational(&mut rng, 9, 8)).collect()).collect()
    };
    let mut gauge: Vec<UDualityElement> = fp
        .elements
        .iter()
        .map(|e| UDualityElement {
            torus: Some(torus()),
            ..e.clone()
        })
        .collect();
    gauge.extend((0..5).map(|_| UDualityElement::translation(&model, torus())));
    for x in &gauge {
        validate_element(&model, x).map_err(|e| e.to_string())?;
        for y in &gauge {
            let (fx, ux) = adjoint_map(x);
            let (fy, uy) = adjoint_map(y);
            let (fxy, uxy) = adjoint_map(&compose_elements(&model, x, y));
            let composed: Vec<usize> = model.isometries()[fy].iter().map(|&p| model.isometries()[fx][p]).collect();
            ensure(uxy == &ux * &uy && model.isometries()[fxy] == composed, || "ad is not a homomorphism".into())?;
        }
        let in_kernel = adjoint_map(x) == (0, IntegerMatrix::identity(2));
        ensure(in_kernel == x.is_pure_translation(), || "kernel of ad is not the pure translations".into())?;
    }
    Ok(format!("{} elements at bound {bound}, {} gauge elements", got.len(), gauge.len()))
}

fn criterion_unitary_degeneration() -> Outcome {
    let mut rng = common::rng(1011);
    for i in 0..100 {
        let n = rng.gen_range(1..=3);
        let t = common::random_type(&mut rng, n);
        let frame = common::random_frame(&mut rng);
        let taming = common::random_taming(&mut rng, &t);
        let f = common::random_field(&mut rng, 2 * n);
        let directions = rng.gen_range(1..=4);
        let r = scalar_rhs(&f, &frame, &taming, &FundamentalFormSample::zero(2 * n, directions)).map_err(|e| e.to_string())?;
        ensure(r.len() == directions && r.iter().all(|&x| x == 0.0), || format!("sample {i}: {r:?}"))?;
    }
    Ok("100 samples, exact zeros".into())
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 11] = [
        ("type invariance and Smith form", Some(Duration::from_secs(10)), criterion_type_invariance),
        ("Frobenius certificate", None, criterion_frobenius_certificate),
        ("affine group laws", Some(Duration::from_secs(5)), criterion_aff_group_laws),
        ("polarized star involution and split", Some(Duration::from_secs(5)), criterion_star_involution),
        ("self-dual stress tracelessness", Some(Duration::from_secs(2)), criterion_tracelessness),
        ("duality equivariance", None, criterion_equivariance),
        ("twisted cohomology oracles", Some(Duration::from_secs(30)), criterion_cohomology_oracles),
        ("charge quantization verdicts", None, criterion_dsz),
        ("centralizer of S", Some(Duration::from_secs(5)), criterion_centralizer),
        ("U-duality fiber product and ad", None, criterion_fiber_product),
        ("unitary degeneration", None, criterion_unitary_degeneration),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > *limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
