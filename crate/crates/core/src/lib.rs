pub mod error;
pub mod field;
pub mod series;
pub mod univariate;

pub use error::Error;
pub mod linalg;
pub mod poly;
pub mod germ;
pub mod puiseux;
pub mod envelope;
pub mod tanspace;
pub mod catalog;
pub mod classify;
pub mod deform;
pub mod expr;
pub mod cli;
