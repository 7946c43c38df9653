//! Grammar, tolerant parsers and canonical serializers for the structured
//! text a reasoning stage emits.
//!
//! Conventions shared by every format:
//!
//! * numbers are `[+-]?digits(.digits)?`, `.` is the only decimal separator;
//! * a tuple is `(` number (`,` number)* `)`;
//! * whitespace (including newlines) between tokens is insignificant;
//! * serializers print numbers with exactly three decimals.
//!
//! The serializers here produce the only canonical text used in prompts,
//! traces and the remote-policy response contract.

mod decision;
mod lexer;
mod reports;
mod tuples;

pub use decision::{parse_decision, parse_decision_report, serialize_decision, DecisionMatch};
pub use reports::{
    parse_lane_report, parse_light_report, parse_object_report, parse_sign_report, serialize_lane_report,
    serialize_light_report, serialize_object_report, serialize_sign_report,
};
pub use tuples::{parse_boxes, parse_waypoints, serialize_boxes, serialize_waypoints};

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("tuple arity: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("non-numeric token '{0}'")]
    NonNumeric(String),
    #[error("extent must be positive, found {0}")]
    NonPositiveExtent(f64),
    #[error("expected {expected}, found {found}")]
    Count { expected: usize, found: usize },
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("no instruction template matches; nearest is {nearest}")]
    NoTemplate { nearest: String },
    #[error("{0}")]
    Invalid(String),
}

/// Parse failure located at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {}", self.kind, self.offset)
    }
}

impl ParseError {
    pub(crate) fn new(offset: usize, kind: ParseErrorKind) -> Self {
        Self { offset, kind }
    }
}

/// Canonical number rendering: three decimals, no negative zero.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Types with a canonical text form that parses back to the same value.
pub trait CanonicalText: Sized {
    fn to_text(&self) -> String;
    fn from_text(text: &str) -> Result<Self, ParseError>;
}

macro_rules! canonical {
    ($ty:ty, $ser:path, $de:path) => {
        impl CanonicalText for $ty {
            fn to_text(&self) -> String {
                $ser(self)
            }
            fn from_text(text: &str) -> Result<Self, ParseError> {
                $de(text)
            }
        }
    };
}

canonical!(crate::cot::ObjectReport, serialize_object_report, parse_object_report);
canonical!(crate::cot::LightReport, serialize_light_report, parse_light_report);
canonical!(crate::cot::SignReport, serialize_sign_report, parse_sign_report);
canonical!(crate::cot::LaneReport, serialize_lane_report, parse_lane_report);
canonical!(crate::cot::Decision, serialize_decision, parse_decision_report);
canonical!(crate::cot::WaypointPlan, serialize_waypoints, parse_waypoints);
