//! Parameter selection and the boys/girls marriage dictionary.
//!
//! Boys are source blocks of large measure, girls are target words that avoid
//! the marker windows, and a dictionary is an injection from boys to girls.
//! The injection is either the rank/unrank composition (scalable) or a Hall
//! matching constrained to an explicit relation built from paired samples.

pub mod boys;
pub mod dictionary;
pub mod girls;
pub mod hall;
pub mod params;

pub use boys::BoySet;
pub use dictionary::{dictionary, verify_dictionary_bounds, BoundsReport, CodeBook, DictMode, Dictionary};
pub use girls::GirlSet;
pub use hall::{build_relation, hall_match, marriage_bound, Relation};
pub use params::{
    choose_parameters, estimate_conditions, wilson_interval, window_radius, CheckItem, Mode,
    Overrides, ParameterInputs, ParameterPack, Verdict,
};

use crate::markers::MarkerError;
use crate::measures::MeasureError;
use crate::shiftspace::ShiftError;
use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DictError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no feasible parameters; binding constraint {binding}: {detail}")]
    Infeasible { binding: String, detail: String },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("no admissible girl words of length {len}")]
    NoGirls { len: usize },
    #[error("capacity: {boys} boys exceed {girls} girls (ln |G|/|B| = {log_ratio:.4})")]
    Capacity {
        boys: BigUint,
        girls: BigUint,
        log_ratio: f64,
    },
    #[error("boy {boy} has degree {degree} < K = {k}")]
    BoyDegree { boy: String, degree: usize, k: usize },
    #[error("girl {girl} has degree {degree} > K = {k}")]
    GirlDegree { girl: String, degree: usize, k: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("dictionary file: {0}")]
    Parse(String),
    #[error(transparent)]
    Marker(#[from] MarkerError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
}
