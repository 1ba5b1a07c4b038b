mod common;

use nalgebra::{DMatrix, Matrix4, Matrix6};
use rand::Rng;
use siegel_core::field_calculus::{
    duality_transform_sample, einstein_rhs, hodge_star_matrix, inner_contraction, maxwell_residual, maxwell_residual_q,
    metric_trace,
    polarized_star, scalar_rhs, two_form_tensor, twisted_pairing, FieldStrengthSample, PointFrame,
    ScalarSectorSample, PAIRS,
};
use siegel_core::polarization::{antilinear_q_symmetric, q_metric, FundamentalFormSample};
use siegel_core::LatticeType;

/// `H = o·√|g|·W·G` with `W` the wedge pairing and `G` the induced metric.
fn hodge_oracle(frame: &PointFrame) -> Matrix6<f64> {
    let gi = frame.inverse();
    let mut w = Matrix6::zeros();
    w[(0, 5)] = 1.0;
    w[(5, 0)] = 1.0;
    w[(1, 4)] = -1.0;
    w[(4, 1)] = -1.0;
    w[(2, 3)] = 1.0;
    w[(3, 2)] = 1.0;
    let g2 = Matrix6::from_fn(|r, c| {
        let (m, n) = PAIRS[r];
        let (p, s) = PAIRS[c];
        gi[(m, p)] * gi[(n, s)] - gi[(m, s)] * gi[(n, p)]
    });
    w * g2 * (f64::from(frame.orientation()) * frame.g().determinant().abs().sqrt())
}

fn column_tensor(f: &FieldStrengthSample, a: usize) -> Matrix4<f64> {
    let col: Vec<f64> = f.matrix().column(a).iter().copied().collect();
    two_form_tensor(&col)
}

/// `½ Σ Q_ab A^a_{μν} g^{μρ} g^{νσ} B^b_{ρσ}` by explicit index sums.
fn pairing_oracle(a: &FieldStrengthSample, b: &FieldStrengthSample, frame: &PointFrame, q: &DMatrix<f64>) -> f64 {
    let gi = frame.inverse();
    let mut total = 0.0;
    for x in 0..q.nrows() {
        let ta = column_tensor(a, x);
        for y in 0..q.ncols() {
            let tb = column_tensor(b, y);
            let mut s = 0.0;
            for m in 0..4 {
                for n in 0..4 {
                    for r in 0..4 {
                        for t in 0..4 {
                            s += ta[(m, n)] * gi[(m, r)] * gi[(n, t)] * tb[(r, t)];
                        }
                    }
                }
            }
            total += q[(x, y)] * 0.5 * s;
        }
    }
    total
}

fn contraction_oracle(a: &FieldStrengthSample, b: &FieldStrengthSample, frame: &PointFrame, q: &DMatrix<f64>) -> Matrix4<f64> {
    let gi = frame.inverse();
    Matrix4::from_fn(|m, n| {
        let mut s = 0.0;
        for x in 0..q.nrows() {
            for y in 0..q.ncols() {
                let (ta, tb) = (column_tensor(a, x), column_tensor(b, y));
                for al in 0..4 {
                    for be in 0..4 {
                        s += q[(x, y)] * ta[(m, al)] * gi[(al, be)] * tb[(n, be)];
                    }
                }
            }
        }
        s
    })
}

#[test]
fn hodge_star_matches_wedge_oracle() {
    let mut rng = common::rng(41);
    for _ in 0..200 {
        let frame = common::random_frame(&mut rng);
        let h = hodge_star_matrix(&frame);
        let scale = h.amax().max(1.0);
        assert!((h - hodge_oracle(&frame)).amax() < 1e-10 * scale);
        assert!((h * h + Matrix6::identity()).amax() < 1e-9 * scale * scale);
    }
}

#[test]
fn polarized_star_involution_and_split() {
    let mut rng = common::rng(42);
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        let t = common::random_type(&mut rng, n);
        let frame = common::random_frame(&mut rng);
        let taming = common::random_taming(&mut rng, &t);
        let star = polarized_star(&frame, &taming);
        let m = star.matrix();
        let err = (&m * &m - DMatrix::<f64>::identity(12 * n, 12 * n)).amax();
        assert!(err < 1e-8 * m.amax().powi(2), "involution error {err}");
        assert_eq!(star.eigenspace_dimensions(1e-7 * m.amax()), (6 * n, 6 * n));
    }
}

#[test]
fn pairing_and_contraction_match_index_sums() {
    let mut rng = common::rng(43);
    for _ in 0..50 {
        let frame = common::random_frame(&mut rng);
        let t = common::random_type(&mut rng, 2);
        let taming = common::random_taming(&mut rng, &t);
        let q = q_metric(&taming);
        let (a, b) = (common::random_field(&mut rng, 4), common::random_field(&mut rng, 4));
        let p = twisted_pairing(&a, &b, &frame, &q).unwrap();
        assert!((p - pairing_oracle(&a, &b, &frame, &q)).abs() < 1e-9 * (1.0 + p.abs()));
        let c = inner_contraction(&a, &b, &frame, &q).unwrap();
        assert!((c - contraction_oracle(&a, &b, &frame, &q)).amax() < 1e-9 * (1.0 + c.amax()));
    }
}

#[test]
fn selfdual_stress_is_traceless_and_einstein_trace() {
    let mut rng = common::rng(44);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let t = common::random_type(&mut rng, n);
        let frame = common::random_frame(&mut rng);
        let taming = common::random_taming(&mut rng, &t);
        let q = q_metric(&taming);
        let f = common::random_selfdual(&mut rng, &frame, &taming);
        let c = inner_contraction(&f, &f, &frame, &q).unwrap();
        let scale = f.norm().powi(2) * q.amax() * frame.inverse().amax();
        assert!(metric_trace(&frame, &c).abs() <= 1e-9 * scale.max(1.0));
        assert!(maxwell_residual(&f, &frame, &taming).unwrap() < 1e-9 * (1.0 + f.norm()));

        let b = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let p = b * b.transpose();
        let sample = ScalarSectorSample::new(p, None, None).unwrap();
        let rhs = einstein_rhs(&f, &frame, &q, &sample).unwrap().rhs;
        let tr = metric_trace(&frame, &rhs) - metric_trace(&frame, &p);
        assert!(tr.abs() < 1e-8 * (1.0 + scale + p.amax()));
    }
}

#[test]
fn duality_equivariance() {
    let mut rng = common::rng(45);
    for _ in 0..100 {
        let n = rng.gen_range(1..=2);
        let t = common::random_type(&mut rng, n);
        let frame = common::random_frame(&mut rng);
        let taming = common::random_taming(&mut rng, &t);
        let f = common::random_field(&mut rng, 2 * n);
        let gamma = common::random_sp(&mut rng, &t, 2, 1);
        let (fg, tg) = duality_transform_sample(&gamma, &f, &taming).unwrap();
        let r0 = maxwell_residual(&f, &frame, &taming).unwrap();
        let r1 = maxwell_residual(&fg, &frame, &tg).unwrap();
        // γ is not orthogonal, so the Frobenius norm itself moves; compare
        // the residual forms after pulling back.
        let star_f = polarized_star(&frame, &taming).apply(&f).unwrap();
        let star_fg = polarized_star(&frame, &tg).apply(&fg).unwrap();
        let pulled = star_fg.matrix() * gamma.inverse_unimodular().unwrap().to_f64().transpose();
        assert!((pulled - star_f.matrix()).amax() < 1e-9 * (1.0 + star_f.matrix().amax()) * gamma.to_f64().amax().powi(2));
        assert!(r0.is_finite() && r1.is_finite());
        let q0 = maxwell_residual_q(&f, &frame, &taming).unwrap();
        let q1 = maxwell_residual_q(&fg, &frame, &tg).unwrap();
        assert!((q0 - q1).abs() < 1e-9 * (1.0 + q0) * gamma.to_f64().amax().powi(2));
        let c0 = inner_contraction(&f, &f, &frame, &q_metric(&taming)).unwrap();
        let c1 = inner_contraction(&fg, &fg, &frame, &q_metric(&tg)).unwrap();
        assert!((c0 - c1).amax() < 1e-9 * (1.0 + c0.amax()) * gamma.to_f64().amax().powi(2));
    }
}

#[test]
fn scalar_rhs_matches_index_oracle_and_vanishes_when_unitary() {
    let mut rng = common::rng(46);
    for _ in 0..60 {
        let n = rng.gen_range(1..=2);
        let t = common::random_type(&mut rng, n);
        let frame = common::random_frame(&mut rng);
        let taming = common::random_taming(&mut rng, &t);
        let f = common::random_field(&mut rng, 2 * n);
        let zero = scalar_rhs(&f, &frame, &taming, &FundamentalFormSample::zero(2 * n, 3)).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));

        let comps: Vec<DMatrix<f64>> = (0..2)
            .map(|_| {
                let s = DMatrix::from_fn(2 * n, 2 * n, |_, _| rng.gen_range(-1.0..1.0));
                antilinear_q_symmetric(&s, &taming)
            })
            .collect();
        let psi = FundamentalFormSample::new(comps.clone());
        let got = scalar_rhs(&f, &frame, &taming, &psi).unwrap();
        let h = hodge_star_matrix(&frame);
        let hd = DMatrix::from_fn(6, 6, |i, j| h[(i, j)]);
        let star = FieldStrengthSample::new(hd * f.matrix()).unwrap();
        let q = q_metric(&taming);
        for (k, c) in comps.iter().enumerate() {
            let moved = FieldStrengthSample::new(f.matrix() * c.transpose()).unwrap();
            let want = 0.5 * pairing_oracle(&star, &moved, &frame, &q);
            assert!((got[k] - want).abs() < 1e-8 * (1.0 + want.abs()));
        }
    }
}

#[test]
fn rejects_bad_inputs() {
    let frame = PointFrame::minkowski();
    let t = LatticeType::principal(1);
    let taming = siegel_core::polarization::Taming::standard(t.omega()).unwrap();
    let wide = FieldStrengthSample::zeros(4);
    assert!(maxwell_residual(&wide, &frame, &taming).is_err());
    assert!(FieldStrengthSample::new(DMatrix::zeros(5, 2)).is_err());
    assert!(FieldStrengthSample::new(DMatrix::from_element(6, 2, f64::NAN)).is_err());
    let text = r#"{"g":[[-1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],"orientation":1}"#;
    let parsed: PointFrame = serde_json::from_str(text).unwrap();
    assert_eq!(parsed, frame);
    assert_eq!(serde_json::from_str::<PointFrame>(&serde_json::to_string(&frame).unwrap()).unwrap(), frame);
}
