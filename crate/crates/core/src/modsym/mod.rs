//! Weight-two modular symbols for Gamma_0(N) via Manin symbols.

pub mod cache;
pub mod eigen;
pub mod hecke;
pub mod p1;
pub mod space;

pub use eigen::EigenSymbol;
pub use space::ManinSymbolSpace;
