pub mod bar;
pub mod chain;
pub mod cochain;
pub mod connection;
pub mod defscalar;
pub mod error;
pub mod forms;
pub mod group;
pub mod homotopy;
pub mod jacobian;
pub mod koszul;
pub mod linalg;
pub mod model;
pub mod perturbation;
pub mod poly;
pub mod rational;
pub mod retract;
pub mod scalar;
pub mod sdr;
pub mod twisted;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Cyclotomic, Field, Rat, Q};
