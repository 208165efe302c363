//! Script parsing and pipeline driving behind the `specglue` binary.

pub mod driver;
pub mod script;
