//! Filtered Iwahori-Hecke algebras H(G, I_m) of split groups over F_q((t)).

pub mod error;
pub mod exactalg;
pub mod affweyl;
pub mod chevalley;
pub mod hecke;
pub mod mprad;
pub mod report;
pub mod transfer;
pub mod rootdata;
pub mod suites;
pub mod whittaker;

pub use error::{Error, Result};
