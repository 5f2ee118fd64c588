//! Exact enumeration of positive integral points on frieze varieties attached to
//! generalized Cartan matrices, with explicit search bounds, reduction maps and
//! the related Mordell–Schinzel style equations.

pub mod bounds;
pub mod cartan;
pub mod cli;
pub mod closed_forms;
pub mod diophantine;
pub mod error;
pub mod frieze;
pub mod io;
pub mod reduction;
pub mod search;

pub use cartan::{dynkin_matrix, validate_gcm, DynkinType, Family, Gcm};
pub use error::{Error, Result};
pub use frieze::{FriezeGrid, FriezePoint, FriezeSystem, GlsPoint};
