use nalgebra::{DMatrix, Matrix4, Matrix6};
use serde_json::{json, Value};
use siegel_core::field_calculus::{
    duality_transform_sample, einstein_rhs, inner_contraction, maxwell_residual, maxwell_residual_q, metric_trace,
    polarized_star, project_selfdual, scalar_rhs, FieldStrengthSample, PointFrame, ScalarSectorSample,
};
use siegel_core::polarization::{max_abs, q_metric, validate_fundamental_form, FundamentalFormSample, Taming};
use siegel_core::IntegerMatrix;

use crate::io::{field, invalid, optional, to_value, CliError, Context, Outcome};
use crate::FieldCmd;

/// Tolerance for numerical rank in the eigenspace count.
const EIGEN_TOL: f64 = 1e-8;

fn rows4(m: &Matrix4<f64>) -> Vec<Vec<f64>> {
    (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect()
}

fn rows6(m: &Matrix6<f64>) -> Vec<Vec<f64>> {
    (0..6).map(|i| (0..6).map(|j| m[(i, j)]).collect()).collect()
}

fn taming(v: &Value, ctx: &Context) -> Result<Taming, CliError> {
    let t: Taming = field(v, "taming")?;
    Ok(match ctx.tol {
        Some(tol) => t.with_tol(tol),
        None => t,
    })
}

pub fn run(cmd: FieldCmd, ctx: &Context) -> Result<Outcome, CliError> {
    let v = ctx.value()?;
    let taming = taming(&v, ctx)?;
    let frame = || field::<PointFrame>(&v, "frame");
    match cmd {
        FieldCmd::Star => {
            let frame = frame()?;
            let star = polarized_star(&frame, &taming);
            let m = star.matrix();
            let id = DMatrix::<f64>::identity(m.nrows(), m.ncols());
            let (plus, minus) = star.eigenspace_dimensions(ctx.tol.unwrap_or(EIGEN_TOL));
            let mut out = json!({
                "hodge": rows6(star.hodge()),
                "involution_residual": max_abs(&(&m * &m - id)),
                "eigenspaces": [plus, minus],
            });
            if let Some(f) = optional::<FieldStrengthSample>(&v, "F")? {
                out["star_F"] = to_value(&star.apply(&f).map_err(invalid)?);
            }
            Ok(Outcome::ok(&out))
        }
        FieldCmd::Project => {
            let frame = frame()?;
            let f: FieldStrengthSample = field(&v, "F")?;
            let plus = project_selfdual(&f, &frame, &taming).map_err(invalid)?;
            let residual = maxwell_residual_q(&plus, &frame, &taming).map_err(invalid)?;
            Ok(Outcome::ok(&json!({ "F_plus": plus, "residual_q": residual })))
        }
        FieldCmd::Residual => {
            let frame = frame()?;
            let f: FieldStrengthSample = field(&v, "F")?;
            Ok(Outcome::ok(&json!({
                "residual": maxwell_residual(&f, &frame, &taming).map_err(invalid)?,
                "residual_q": maxwell_residual_q(&f, &frame, &taming).map_err(invalid)?,
            })))
        }
        FieldCmd::Stress => {
            let frame = frame()?;
            let f: FieldStrengthSample = field(&v, "F")?;
            let q = q_metric(&taming);
            let c = inner_contraction(&f, &f, &frame, &q).map_err(invalid)?;
            let mut out = json!({ "contraction": rows4(&c), "trace": metric_trace(&frame, &c) });
            if let Some(scalar) = optional::<ScalarSectorSample>(&v, "scalar")? {
                out["einstein"] = to_value(&einstein_rhs(&f, &frame, &q, &scalar).map_err(invalid)?);
            }
            Ok(Outcome::ok(&out))
        }
        FieldCmd::ScalarRhs => {
            let frame = frame()?;
            let f: FieldStrengthSample = field(&v, "F")?;
            let psi: FundamentalFormSample = field(&v, "psi")?;
            let report = validate_fundamental_form(&psi, &taming).map_err(invalid)?;
            if !report.passed() {
                return Ok(Outcome::verdict(json!({ "valid": false, "fundamental_form": report }), false));
            }
            let rhs = scalar_rhs(&f, &frame, &taming, &psi).map_err(invalid)?;
            let mut out = json!({ "valid": true, "rhs": rhs, "fundamental_form": report });
            if let Some(lhs) = optional::<Vec<f64>>(&v, "lhs")? {
                if lhs.len() != rhs.len() {
                    return Err(CliError::Parse(format!("lhs has {} entries, psi has {}", lhs.len(), rhs.len())));
                }
                let r = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                out["residual"] = json!(r);
            }
            Ok(Outcome::ok(&out))
        }
        FieldCmd::Transform => {
            let gamma: IntegerMatrix = field(&v, "gamma")?;
            let f: FieldStrengthSample = field(&v, "F")?;
            let (moved, pushed) = duality_transform_sample(&gamma, &f, &taming).map_err(invalid)?;
            Ok(Outcome::ok(&json!({ "F": moved, "taming": pushed })))
        }
    }
}
