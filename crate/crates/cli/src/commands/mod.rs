//! One module per subcommand group.

pub mod aff;
pub mod cohomology;
pub mod field;
pub mod lattice;
pub mod taming;
pub mod uduality;
