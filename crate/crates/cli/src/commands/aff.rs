use siegel_core::siegel_group::{aff_act, aff_compose, aff_inverse, lattice_rep};
use siegel_core::{AffineSymplectomorphism, TorusPoint};

use crate::io::{field, field_or_whole, invalid, CliError, Context, Outcome};
use crate::AffCmd;

pub fn run(cmd: AffCmd, ctx: &Context) -> Result<Outcome, CliError> {
    let v = ctx.value()?;
    match cmd {
        AffCmd::Compose => {
            let x: AffineSymplectomorphism = field(&v, "x")?;
            let y: AffineSymplectomorphism = field(&v, "y")?;
            Ok(Outcome::ok(&aff_compose(&x, &y).map_err(invalid)?))
        }
        AffCmd::Inverse => {
            let x: AffineSymplectomorphism = field_or_whole(&v, "x")?;
            Ok(Outcome::ok(&aff_inverse(&x)))
        }
        AffCmd::Act => {
            let x: AffineSymplectomorphism = field(&v, "x")?;
            let p: TorusPoint = field(&v, "point")?;
            Ok(Outcome::ok(&aff_act(&x, &p).map_err(invalid)?))
        }
        AffCmd::Rep => {
            let x: AffineSymplectomorphism = field_or_whole(&v, "x")?;
            Ok(Outcome::ok(&lattice_rep(&x)))
        }
    }
}
