use serde_json::{json, Value};
use siegel_core::uduality::{
    adjoint_map, centralizer_enumerate, commutant_matrices, uduality_fiber_product, validate_element,
    FiniteScalarModel, HolonomySubgroup, UDualityElement, UDualityError,
};
use siegel_core::{IntegerMatrix, LatticeType};

use crate::io::{field, field_or_whole, invalid, CliError, Context, Outcome};
use crate::UdualityCmd;

/// Generators outside the symplectic group are a validation failure, not a
/// parse error.
fn holonomy(v: &Value) -> Result<HolonomySubgroup, CliError> {
    let h = v.get("holonomy").unwrap_or(v);
    let generators: Vec<IntegerMatrix> = field(h, "generators")?;
    let t = LatticeType::new(field(h, "t")?).map_err(|e| CliError::Parse(e.to_string()))?;
    HolonomySubgroup::new(generators, t).map_err(invalid)
}

fn budget_error(e: UDualityError) -> CliError {
    match e {
        UDualityError::BoundTooLargeForBudget { volume, budget } => CliError::Budget { volume, budget },
        other => invalid(other),
    }
}

pub fn run(cmd: UdualityCmd, ctx: &Context) -> Result<Outcome, CliError> {
    let v = ctx.value()?;
    match cmd {
        UdualityCmd::Commutant => {
            let basis = commutant_matrices(&holonomy(&v)?);
            Ok(Outcome::ok(&json!({ "rank": basis.len(), "basis": basis })))
        }
        UdualityCmd::Centralizer => {
            let bound = ctx.bound();
            let elements = centralizer_enumerate(&holonomy(&v)?, bound, ctx.budget).map_err(budget_error)?;
            Ok(Outcome::ok(&json!({ "bound": bound, "count": elements.len(), "elements": elements })))
        }
        UdualityCmd::FiberProduct => {
            let model: FiniteScalarModel = field_or_whole(&v, "model")?;
            let bound = ctx.bound();
            let fp = uduality_fiber_product(&model, bound, ctx.budget).map_err(budget_error)?;
            Ok(Outcome::ok(&json!({
                "bound": bound,
                "count": fp.elements.len(),
                "elements": fp.elements,
                "closure": fp.closure,
            })))
        }
        UdualityCmd::Ad => {
            let model: FiniteScalarModel = field(&v, "model")?;
            let element: UDualityElement = field(&v, "element")?;
            validate_element(&model, &element).map_err(invalid)?;
            let (isometry, rotation) = adjoint_map(&element);
            Ok(Outcome::ok(&json!({ "isometry": isometry, "rotation": rotation })))
        }
    }
}
