use num_rational::BigRational;
use serde_json::{json, Value};
use siegel_core::exact_linalg::json::rational_vec;
use siegel_core::local_systems::{
    charge_lattice_basis, dsz_check, twisted_cohomology, twisted_cohomology_all, validate_local_system, ChargeClass,
    LocalSystemError, TwistedComplex,
};

use crate::io::{field_or_whole, invalid, optional, to_value, CliError, Context, Outcome};
use crate::CohomologyCmd;

#[derive(serde::Deserialize)]
struct ClassInput(#[serde(with = "rational_vec")] Vec<BigRational>);

/// The complex, or the validation report when it is not a local system.
fn checked_complex(v: &Value) -> Result<Result<TwistedComplex, Outcome>, CliError> {
    let c: TwistedComplex = field_or_whole(v, "complex")?;
    let report = validate_local_system(&c);
    if report.valid {
        Ok(Ok(c))
    } else {
        Ok(Err(Outcome::verdict(json!({ "valid": false, "report": report }), false)))
    }
}

pub fn run(cmd: CohomologyCmd, ctx: &Context) -> Result<Outcome, CliError> {
    let v = ctx.value()?;
    let c = match checked_complex(&v)? {
        Ok(c) => c,
        Err(rejected) => return Ok(rejected),
    };
    match cmd {
        CohomologyCmd::Compute => {
            let groups = match optional::<usize>(&v, "degree")? {
                Some(k) => vec![twisted_cohomology(&c, k).map_err(invalid)?],
                None => twisted_cohomology_all(&c).map_err(invalid)?,
            };
            let dims: Vec<usize> = (0..c.cells().len()).map(|k| c.cochain_dim(k)).collect();
            Ok(Outcome::ok(&json!({
                "valid": true,
                "cochain_dims": dims,
                "euler_characteristic": c.euler_characteristic(),
                "cohomology": groups,
            })))
        }
        CohomologyCmd::ChargeLattice => {
            let basis = charge_lattice_basis(&c).map_err(invalid)?;
            let mut out = to_value(&basis);
            out["cochain_dim"] = json!(c.cochain_dim(2));
            Ok(Outcome::ok(&out))
        }
        CohomologyCmd::Dsz => {
            let class = ChargeClass::new(
                optional::<ClassInput>(&v, "class")?
                    .ok_or_else(|| CliError::Parse("missing field `class`".into()))?
                    .0,
            );
            match dsz_check(&class, &c) {
                Ok(verdict) => {
                    let integral = verdict.integral;
                    Ok(Outcome::verdict(to_value(&verdict), integral))
                }
                Err(LocalSystemError::NotACocycle(cells)) => Ok(Outcome::verdict(
                    json!({ "integral": false, "cocycle": false, "failing_cells": cells }),
                    false,
                )),
                Err(LocalSystemError::DimensionMismatch(m)) => Err(CliError::Parse(m)),
                Err(e) => Err(invalid(e)),
            }
        }
    }
}
