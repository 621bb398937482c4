pub mod integer;
pub mod rational;
