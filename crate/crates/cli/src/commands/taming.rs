use nalgebra::DMatrix;
use serde_json::{json, Value};
use siegel_core::polarization::{
    matrix_from_rows, matrix_to_rows, push_forward_taming, taming_from_siegel_point, validate_taming, SiegelPoint,
    Taming, DEFAULT_TOLERANCE,
};
use siegel_core::{IntegerMatrix, LatticeType};

use crate::io::{field, invalid, optional, to_value, CliError, Context, Outcome};
use crate::TamingCmd;

fn real_matrix(v: &Value, key: &str) -> Result<DMatrix<f64>, CliError> {
    let rows: Vec<Vec<f64>> = field(v, key)?;
    matrix_from_rows(&rows).map_err(|e| CliError::Parse(e.to_string()))
}

/// `omega` if given, else `Ω_t` for a given `t`, else the principal form.
fn ambient_form(v: &Value, n: usize) -> Result<IntegerMatrix, CliError> {
    if let Some(omega) = optional::<IntegerMatrix>(v, "omega")? {
        return Ok(omega);
    }
    let t = match optional::<Vec<u64>>(v, "t")? {
        Some(t) => LatticeType::new(t).map_err(|e| CliError::Parse(e.to_string()))?,
        None => LatticeType::principal(n),
    };
    Ok(t.omega())
}

pub fn run(cmd: TamingCmd, ctx: &Context) -> Result<Outcome, CliError> {
    let v = ctx.value()?;
    match cmd {
        TamingCmd::Validate => {
            let j = real_matrix(&v, "J")?;
            let omega: IntegerMatrix = field(&v, "omega")?;
            let tol = ctx.tol.or(optional(&v, "tol")?).unwrap_or(DEFAULT_TOLERANCE);
            let report = validate_taming(&j, &omega, tol).map_err(invalid)?;
            let passed = report.passed();
            let mut out = to_value(&report);
            out["passed"] = json!(passed);
            out["tol"] = json!(tol);
            Ok(Outcome::verdict(out, passed))
        }
        TamingCmd::FromSiegel => {
            let z = SiegelPoint::new(real_matrix(&v, "X")?, real_matrix(&v, "Y")?).map_err(invalid)?;
            let omega = ambient_form(&v, z.n())?;
            let st = taming_from_siegel_point(&z, &omega).map_err(invalid)?;
            let taming = match ctx.tol {
                Some(tol) => st.taming.with_tol(tol),
                None => st.taming,
            };
            Ok(Outcome::ok(&json!({
                "taming": taming,
                "lagrangian": {
                    "re": matrix_to_rows(&st.lagrangian.map(|c| c.re)),
                    "im": matrix_to_rows(&st.lagrangian.map(|c| c.im)),
                },
            })))
        }
        TamingCmd::Push => {
            let gamma: IntegerMatrix = field(&v, "gamma")?;
            let taming: Taming = field(&v, "taming")?;
            Ok(Outcome::ok(&push_forward_taming(&gamma, &taming).map_err(invalid)?))
        }
    }
}
