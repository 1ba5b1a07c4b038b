use serde_json::{json, Value};
use siegel_core::symplectic_lattices::{frobenius_basis, lattice_isomorphism, sp_type_membership};
use siegel_core::{IntegerMatrix, IntegralSymplecticSpace, LatticeType};

use crate::io::{field, invalid, optional, parse, to_value, CliError, Context, Outcome};
use crate::LatticeCmd;

/// Accepts `{"n"?, "gram": matrix}` or a bare matrix. Shape is checked by
/// the parser; antisymmetry and nondegeneracy are validation failures.
fn space(v: &Value) -> Result<IntegralSymplecticSpace, CliError> {
    let gram: IntegerMatrix = match v.get("gram") {
        Some(g) => parse(g.clone())?,
        None => parse(v.clone())?,
    };
    if let Some(n) = optional::<usize>(v, "n")? {
        if 2 * n != gram.rows() {
            return Err(CliError::Parse(format!("n = {n} but the Gram matrix has {} rows", gram.rows())));
        }
    }
    IntegralSymplecticSpace::new(gram).map_err(invalid)
}

pub fn run(cmd: LatticeCmd, ctx: &Context) -> Result<Outcome, CliError> {
    let v = ctx.value()?;
    match cmd {
        LatticeCmd::Type => Ok(Outcome::ok(&space(&v)?.lattice_type())),
        LatticeCmd::Frobenius => {
            let fb = frobenius_basis(&space(&v)?);
            Ok(Outcome::ok(&json!({
                "change_of_basis": fb.change_of_basis,
                "t": fb.lattice_type.entries(),
            })))
        }
        LatticeCmd::Member => {
            let gamma: IntegerMatrix = field(&v, "gamma")?;
            let t = LatticeType::new(field(&v, "t")?).map_err(|e| CliError::Parse(e.to_string()))?;
            let member = sp_type_membership(&gamma, &t).map_err(invalid)?;
            Ok(Outcome::verdict(json!({ "member": member }), member))
        }
        LatticeCmd::Isom => {
            let a = space(v.get("a").ok_or_else(|| CliError::Parse("missing field `a`".into()))?)?;
            let b = space(v.get("b").ok_or_else(|| CliError::Parse("missing field `b`".into()))?)?;
            let p = lattice_isomorphism(&a, &b).map_err(invalid)?;
            let mut out = json!({
                "isomorphic": p.is_some(),
                "t_a": a.lattice_type().entries(),
                "t_b": b.lattice_type().entries(),
            });
            if let Some(p) = &p {
                out["change_of_basis"] = to_value(p);
            }
            Ok(Outcome::verdict(out, p.is_some()))
        }
    }
}
