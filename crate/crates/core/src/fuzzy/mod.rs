//! Two-input Mamdani controller: fuzzification, max-min inference over a
//! 7x7 rule base, centroid defuzzification and a precomputed lookup grid.

mod config;
mod controller;
mod label;
mod lookup;
mod membership;
mod rules;
mod variable;

pub use config::{FuzzyConfig, VariableConfig};
pub use controller::{MamdaniController, DEFAULT_RESOLUTION, MIN_RESOLUTION};
pub use label::LinguisticLabel;
pub use lookup::{LookupTable, DEFAULT_LOOKUP_SIZE};
pub use membership::{MembershipFunction, Side};
pub use rules::RuleTable;
pub use variable::{
    half_crossing_sigma, FuzzyVariable, ShapeKind, CROSSING_BOUNDS, DEFAULT_CENTERS, MIN_COVERAGE,
    MIXED_SHAPES, SMOOTH_SHAPES,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FuzzyError {
    #[error("unknown linguistic label {0:?}")]
    UnknownLabel(String),
    #[error("empty aggregate: no output membership to defuzzify")]
    EmptyAggregate,
    #[error("invalid fuzzy variable: {0}")]
    InvalidVariable(String),
    #[error("invalid rule table: {0}")]
    InvalidTable(String),
    #[error("invalid controller: {0}")]
    InvalidController(String),
    #[error("cannot parse fuzzy configuration: {0}")]
    Parse(String),
}
