//! Seeded run of the module invariants. The transcript depends only on the
//! seed and the case count: no timings, no thread-dependent output.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use siegel_core::exact_linalg::{kernel_lattice, smith_normal_form};
use siegel_core::field_calculus::{
    duality_transform_sample, inner_contraction, maxwell_residual_q, metric_trace, polarized_star,
};
use siegel_core::local_systems::{charge_lattice_basis, dsz_check, twisted_cohomology_all, ChargeClass, TwistedComplex};
use siegel_core::polarization::{push_forward_taming, q_metric, Taming};
use siegel_core::sampling::{self as sample, rng};
use siegel_core::siegel_group::{aff_act, aff_compose, aff_inverse, lattice_rep};
use siegel_core::symplectic_lattices::{frobenius_basis_of, preserves_form};
use siegel_core::uduality::{
    adjoint_map, centralizer_enumerate, compose_elements, invert_element, uduality_fiber_product, validate_element,
    FiniteScalarModel, HolonomySubgroup, UDualityElement, DEFAULT_BUDGET,
};
use siegel_core::{AffineSymplectomorphism, IntegerMatrix, IntegralSymplecticSpace, LatticeType, TorusPoint};

use crate::io::Outcome;

type Check = Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntegerMatrix {
    let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
    let entries = (0..r * c).map(|_| BigInt::from(rng.gen_range(-20..=20))).collect();
    IntegerMatrix::from_entries(r, c, entries).expect("r·c entries")
}

fn smith_forms(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    for i in 0..cases {
        let a = random_matrix(rng);
        let snf = smith_normal_form(&a);
        ensure(&(&snf.u * &a) * &snf.v == snf.s, || format!("case {i}: U·A·V ≠ S"))?;
        ensure(snf.u.is_unimodular() && snf.v.is_unimodular(), || format!("case {i}: transform not unimodular"))?;
        let d = snf.diagonal();
        let off_diagonal = (0..snf.s.rows()).any(|r| (0..snf.s.cols()).any(|c| r != c && snf.s[(r, c)] != BigInt::from(0)));
        ensure(!off_diagonal, || format!("case {i}: S not diagonal"))?;
        let zero = BigInt::from(0);
        let chain = d.iter().all(|x| !x.is_negative())
            && d.windows(2).all(|w| w[1] == zero || (w[0] != zero && &w[1] % &w[0] == zero));
        ensure(chain, || format!("case {i}: divisibility chain broken"))?;
        ensure(snf.rank() == a.to_rational().rank(), || format!("case {i}: rank mismatch"))?;
    }
    Ok(format!("{cases} matrices"))
}

fn kernels(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    for i in 0..cases {
        let a = random_matrix(rng);
        let k = kernel_lattice(&a);
        ensure((&a * &k).is_zero(), || format!("case {i}: A·K ≠ 0"))?;
        ensure(k.cols() == a.cols() - a.to_rational().rank(), || format!("case {i}: kernel rank"))?;
    }
    Ok(format!("{cases} matrices"))
}

fn lattice_types(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    for i in 0..cases {
        let n = rng.gen_range(1..=3);
        let t = sample::random_type(rng, n);
        let u = sample::random_unimodular(rng, 2 * n, 12);
        let gram = &(&u.transpose() * &t.omega()) * &u;
        let space = IntegralSymplecticSpace::new(gram.clone()).map_err(err)?;
        ensure(space.lattice_type() == t, || format!("case {i}: type changed"))?;
        let fb = frobenius_basis_of(&gram).map_err(err)?;
        let p = &fb.change_of_basis;
        ensure(&(&p.transpose() * &gram) * p == t.omega(), || format!("case {i}: PᵀGP ≠ Ω_t"))?;
        let doubled: Vec<BigInt> = t.entries().iter().flat_map(|&x| [BigInt::from(x), BigInt::from(x)]).collect();
        ensure(smith_normal_form(&gram).diagonal() == doubled, || format!("case {i}: Smith form"))?;
    }
    Ok(format!("{cases} changes of basis"))
}

fn random_aff(rng: &mut ChaCha8Rng, t: &LatticeType) -> Result<AffineSymplectomorphism, String> {
    let a = (0..2 * t.half_rank()).map(|_| sample::random_rational(rng, 9, 12)).collect();
    AffineSymplectomorphism::new(a, sample::random_sp(rng, t, 2, 2), t.clone()).map_err(err)
}

fn affine_laws(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    for i in 0..cases {
        let n = rng.gen_range(1..=3);
        let t = sample::random_type(rng, n);
        let (x, y, z) = (random_aff(rng, &t)?, random_aff(rng, &t)?, random_aff(rng, &t)?);
        let xy_z = aff_compose(&aff_compose(&x, &y).map_err(err)?, &z).map_err(err)?;
        let x_yz = aff_compose(&x, &aff_compose(&y, &z).map_err(err)?).map_err(err)?;
        ensure(xy_z == x_yz, || format!("case {i}: not associative"))?;
        let e = AffineSymplectomorphism::identity(&t);
        ensure(aff_compose(&e, &x).map_err(err)? == x, || format!("case {i}: left identity"))?;
        ensure(aff_compose(&x, &aff_inverse(&x)).map_err(err)?.is_identity(), || format!("case {i}: inverse"))?;
        ensure(lattice_rep(&aff_compose(&x, &y).map_err(err)?) == &lattice_rep(&x) * &lattice_rep(&y), || {
            format!("case {i}: ℓ not multiplicative")
        })?;
        let coords: Vec<BigRational> = (0..2 * n).map(|_| sample::random_rational(rng, 9, 12)).collect();
        let p = TorusPoint::new(coords, t.clone()).map_err(err)?;
        let lhs = aff_act(&aff_compose(&x, &y).map_err(err)?, &p).map_err(err)?;
        let rhs = aff_act(&x, &aff_act(&y, &p).map_err(err)?).map_err(err)?;
        ensure(lhs == rhs, || format!("case {i}: not an action"))?;
    }
    Ok(format!("{cases} triples"))
}

fn star_involution(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let n = rng.gen_range(1..=3);
        let t = sample::random_type(rng, n);
        let frame = sample::random_frame(rng);
        let taming = sample::random_taming(rng, &t);
        let star = polarized_star(&frame, &taming);
        let m = star.matrix();
        let e = (&m * &m - DMatrix::<f64>::identity(12 * n, 12 * n)).amax();
        worst = worst.max(e);
        ensure(e <= 1e-10, || format!("case {i}: ‖⋆² − I‖ = {e:.1e}"))?;
        let dims = star.eigenspace_dimensions(1e-8);
        ensure(dims == (6 * n, 6 * n), || format!("case {i}: eigenspaces {dims:?}"))?;
    }
    Ok(format!("{cases} pairs, max ‖⋆² − I‖ = {worst:.1e}"))
}

fn tracelessness(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let n = rng.gen_range(1..=3);
        let t = sample::random_type(rng, n);
        let frame = sample::random_frame(rng);
        let taming = sample::random_taming(rng, &t);
        let f = sample::random_selfdual(rng, &frame, &taming);
        let c = inner_contraction(&f, &f, &frame, &q_metric(&taming)).map_err(err)?;
        let ratio = metric_trace(&frame, &c).abs() / f.norm().powi(2).max(f64::MIN_POSITIVE);
        worst = worst.max(ratio);
        ensure(ratio <= 1e-9, || format!("case {i}: |Tr| / ‖F‖² = {ratio:.1e}"))?;
    }
    Ok(format!("{cases} self-dual samples, max |Tr|/‖F‖² = {worst:.1e}"))
}

fn equivariance(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let n = rng.gen_range(1..=3);
        let t = sample::random_small_type(rng, n);
        let frame = sample::random_frame(rng);
        let taming = sample::random_siegel_taming(rng, &t);
        let f = sample::random_field(rng, 2 * n);
        let gamma = sample::random_sp(rng, &t, 2, 1);
        let (fg, tg) = duality_transform_sample(&gamma, &f, &taming).map_err(err)?;
        let r0 = maxwell_residual_q(&f, &frame, &taming).map_err(err)?;
        let r1 = maxwell_residual_q(&fg, &frame, &tg).map_err(err)?;
        let c0 = inner_contraction(&f, &f, &frame, &q_metric(&taming)).map_err(err)?;
        let c1 = inner_contraction(&fg, &fg, &frame, &q_metric(&tg)).map_err(err)?;
        let drift = ((r0 - r1).abs() / (1.0 + r0)).max((c0 - c1).amax() / (1.0 + c0.amax()));
        worst = worst.max(drift);
        ensure(drift <= 1e-9, || format!("case {i}: relative drift {drift:.1e}"))?;
    }
    Ok(format!("{cases} transformations, max relative drift = {worst:.1e}"))
}

fn circle_cohomology(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let t = LatticeType::principal(1);
    let id = IntegerMatrix::identity(2);
    for i in 0..cases {
        let g = if i == 0 {
            -&id
        } else {
            let letters = rng.gen_range(1..5);
            sample::random_sl2(rng, letters)
        };
        let c = TwistedComplex::circle(t.clone(), g.clone()).map_err(err)?;
        let h = twisted_cohomology_all(&c).map_err(err)?;
        let snf = smith_normal_form(&(&g - &id));
        ensure(h[0].free_rank == 2 - snf.rank() && h[0].torsion.is_empty(), || format!("case {i}: H⁰"))?;
        ensure(h[1].free_rank == 2 - snf.rank() && h[1].torsion == snf.torsion(), || format!("case {i}: H¹"))?;
    }
    Ok(format!("{cases} circles"))
}

fn charge_quantization(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let t = LatticeType::principal(1);
    let id = IntegerMatrix::identity(2);
    let s = IntegerMatrix::from_rows(&[[0, -1], [1, 0]]);
    let complexes = [
        TwistedComplex::sphere(t.clone()).map_err(err)?,
        TwistedComplex::torus(t.clone(), id.clone(), id.clone()).map_err(err)?,
        TwistedComplex::torus(t.clone(), s, id).map_err(err)?,
    ];
    let mut checked = 0;
    for (ci, c) in complexes.iter().enumerate() {
        let basis = charge_lattice_basis(c).map_err(err)?.basis;
        if basis.is_empty() {
            continue;
        }
        let len = c.cochain_dim(2);
        let d1 = c.coboundary_matrix(1).to_rational();
        for _ in 0..cases.div_ceil(complexes.len()) {
            let coeffs: Vec<BigInt> = basis.iter().map(|_| BigInt::from(rng.gen_range(-6..=6))).collect();
            let mut weights: Vec<BigRational> = coeffs.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            let x: Vec<BigRational> = (0..c.cochain_dim(1)).map(|_| sample::random_rational(rng, 9, 6)).collect();
            let cob = ChargeClass::new(d1.mul_vec(&x));
            let v = dsz_check(&ChargeClass::combination(len, &weights, &basis).add(&cob), c).map_err(err)?;
            ensure(v.integral && v.coordinates.as_ref() == Some(&coeffs), || format!("complex {ci}: integral class rejected"))?;
            let k = rng.gen_range(0..weights.len());
            weights[k] += BigRational::new(1.into(), 2.into());
            let v = dsz_check(&ChargeClass::combination(len, &weights, &basis).add(&cob), c).map_err(err)?;
            ensure(!v.integral, || format!("complex {ci}: half-integral class accepted"))?;
            checked += 2;
        }
    }
    Ok(format!("{checked} verdicts"))
}

fn centralizers(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let t = LatticeType::principal(1);
    let bound = 2i64;
    let all: Vec<IntegerMatrix> = (0..5i64.pow(4))
        .map(|mut k| {
            let mut e = [0i64; 4];
            for x in &mut e {
                *x = k % 5 - bound;
                k /= 5;
            }
            IntegerMatrix::from_rows(&[[e[0], e[1]], [e[2], e[3]]])
        })
        .filter(|m| preserves_form(m, &t.omega()))
        .collect();
    let runs = cases.min(20);
    for i in 0..runs {
        let letters = rng.gen_range(1..4);
        let g = sample::random_sl2(rng, letters);
        let h = HolonomySubgroup::new(vec![g.clone()], t.clone()).map_err(err)?;
        let got = centralizer_enumerate(&h, bound as u64, DEFAULT_BUDGET).map_err(err)?;
        let mut want: Vec<IntegerMatrix> = all.iter().filter(|m| &(*m * &g) == &(&g * *m)).cloned().collect();
        want.sort_by_key(|m| m.entries().to_vec());
        ensure(got == want, || format!("case {i}: {} elements, brute force finds {}", got.len(), want.len()))?;
    }
    Ok(format!("{runs} holonomies against {} box elements", all.len()))
}

fn gauge_group(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let t = LatticeType::principal(1);
    let base = Taming::standard(t.omega()).map_err(err)?;
    let moved = push_forward_taming(&IntegerMatrix::from_rows(&[[1, 1], [0, 1]]), &base).map_err(err)?;
    let model = FiniteScalarModel::new(2, vec![vec![1, 0]], vec![base.j().clone(), moved.j().clone()], t, 1e-10)
        .map_err(err)?;
    let fp = uduality_fiber_product(&model, 2, DEFAULT_BUDGET).map_err(err)?;
    ensure(fp.closure.closed, || "fiber product not closed in the box".into())?;
    let mut torus = || -> Vec<Vec<BigRational>> {
        (0..2).map(|_| (0..2).map(|_| sample::random_rational(rng, 9, 8)).collect()).collect()
    };
    let gauge: Vec<UDualityElement> = (0..cases.min(30))
        .map(|k| UDualityElement {
            torus: Some(torus()),
            ..fp.elements[k % fp.elements.len()].clone()
        })
        .collect();
    for (i, x) in gauge.iter().enumerate() {
        validate_element(&model, x).map_err(err)?;
        let xi = invert_element(&model, x);
        let e = compose_elements(&model, x, &xi);
        let trivial_torus = e.torus.iter().flatten().flatten().all(|c| *c == BigRational::from_integer(0.into()));
        ensure(e.is_pure_translation() && trivial_torus, || format!("element {i}: x·x⁻¹ ≠ 1"))?;
        for y in &gauge {
            let (fx, ux) = adjoint_map(x);
            let (fy, uy) = adjoint_map(y);
            let (fxy, uxy) = adjoint_map(&compose_elements(&model, x, y));
            let composed: Vec<usize> = model.isometries()[fy].iter().map(|&p| model.isometries()[fx][p]).collect();
            ensure(uxy == &ux * &uy && model.isometries()[fxy] == composed, || format!("element {i}: ad not multiplicative"))?;
        }
    }
    Ok(format!("{} fiber-product elements, {} gauge elements", fp.elements.len(), gauge.len()))
}

const CHECKS: [(&str, fn(&mut ChaCha8Rng, usize) -> Check); 11] = [
    ("smith normal form", smith_forms),
    ("kernel lattice", kernels),
    ("lattice type and Frobenius basis", lattice_types),
    ("affine group laws", affine_laws),
    ("polarized star", star_involution),
    ("self-dual stress trace", tracelessness),
    ("duality equivariance", equivariance),
    ("circle cohomology", circle_cohomology),
    ("charge quantization", charge_quantization),
    ("centralizer enumeration", centralizers),
    ("gauge U-duality group", gauge_group),
];

pub fn run(seed: u64, cases: usize) -> Outcome {
    let mut all_passed = true;
    let mut transcript = format!("selftest seed={seed} cases={cases}\n");
    let checks: Vec<_> = CHECKS
        .iter()
        .enumerate()
        .map(|(k, (name, check))| {
            let mut r = rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
            let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| check(&mut r, cases)))
                .unwrap_or_else(|_| Err("panicked".into()));
            all_passed &= outcome.is_ok();
            let (mark, detail) = match &outcome {
                Ok(d) => ("ok", d),
                Err(d) => ("FAILED", d),
            };
            transcript.push_str(&format!("{mark:>6}  {name}: {detail}\n"));
            match outcome {
                Ok(detail) => json!({ "name": name, "passed": true, "detail": detail }),
                Err(why) => json!({ "name": name, "passed": false, "detail": why }),
            }
        })
        .collect();
    transcript.push_str(if all_passed { "all checks passed\n" } else { "some checks FAILED\n" });
    Outcome {
        text: Some(transcript),
        ..Outcome::verdict(
            json!({ "seed": seed, "cases": cases, "passed": all_passed, "checks": checks }),
            all_passed,
        )
    }
}
