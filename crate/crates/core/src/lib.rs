//! Moments of life-insurance present values over discrete life tables.
//!
//! Survival between integer ages follows one of three fractional-age laws
//! (uniform deaths, constant force, Balducci). Under constant force every
//! product has a closed form; the other two laws, and every closed form as a
//! cross-check, are evaluated by adaptive quadrature of the exact density.

mod accumulate;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod format;
pub mod fractional_age;
pub mod gompertz;
pub mod life_table;
pub mod oracle;
pub mod plot;
pub mod product;
pub mod quadrature;
pub mod special_fn;
pub mod tables;

pub use closed_form::{Method, MomentResult, ProductSpec, Term};
pub use error::{Error, Result};
pub use fractional_age::Assumption;
pub use gompertz::GompertzParams;
pub use life_table::LifeTable;
pub use oracle::Payoff;
pub use product::Product;
