pub mod arith;
pub mod lattice;
pub mod ratfunc;
pub mod series;
pub mod cone;
pub mod fixed_locus;
pub mod localize;
pub mod oracle;
pub mod catalog;
pub mod optimize;
pub mod io;
pub mod verify;
