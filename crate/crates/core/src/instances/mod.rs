//! Instance I/O, canonical families and reduction generators.

pub mod families;
pub mod io;
pub mod sat;

pub use families::{gen_family, Family};
pub use io::{parse_instance, read_instance, to_canonical_json, write_instance, Instance};
pub use sat::{
    sat_to_stab, stab_to_circulation, stab_to_circulation_min_genus, CnfFormula, ReductionInstance,
    StabInstance,
};
