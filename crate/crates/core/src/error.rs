use std::fmt;

use rust_decimal::Decimal;

use crate::model::{CounterpartyClass, RatingBucket, Violation};
use crate::oprisk::{BusinessLine, OpRiskApproach};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown rating token {0:?}")]
    UnknownRating(String),

    #[error("invalid currency code {0:?}")]
    InvalidCurrency(String),

    #[error("currency mismatch: {left} vs {right}")]
    CurrencyMismatch { left: String, right: String },

    #[error("{}", ValidationList(.0))]
    ValidationFailure(Vec<Violation>),

    #[error("risk-weight table has no cell for ({class}, {bucket})")]
    MissingCell {
        class: CounterpartyClass,
        bucket: RatingBucket,
    },

    #[error("no credit-conversion factor configured for off-balance category {0:?}")]
    UnknownCategory(String),

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: Decimal,
        min: Decimal,
        max: Decimal,
    },

    #[error("exposure {id}: {source}")]
    Exposure { id: String, source: Box<Error> },

    #[error("exposure {id}: IRB input {field} is required")]
    MissingIrbInput { id: String, field: &'static str },

    #[error("risk-weight function {0:?} is not registered")]
    UnknownFunction(String),

    #[error("risk-weight function {name:?} returned a non-finite or negative weight ({value})")]
    NonFiniteWeight { name: String, value: f64 },

    #[error("risk-weight function {name:?} is not monotone: {detail}")]
    NonMonotoneFunction { name: String, detail: String },

    #[error("income history must hold three consecutive years: {0}")]
    IncompleteHistory(String),

    #[error("year {year}: business-line income sums to {lines} but total is {total}")]
    IncomeMismatch {
        year: i32,
        lines: Decimal,
        total: Decimal,
    },

    #[error("standardized approach needs income for every business line; missing: {}", line_keys(.0))]
    MissingLine(Vec<BusinessLine>),

    #[error("scope {scope:?}: moving from {from} to {to} requires a supervisory override")]
    DowngradeWithoutOverride {
        scope: String,
        from: OpRiskApproach,
        to: OpRiskApproach,
    },

    #[error("no advanced estimator registered under {0:?}")]
    UnregisteredAdvancedHook(String),

    #[error("no income history supplied for operational-risk scope {0:?}")]
    MissingScopeData(String),

    #[error("ratio undefined: denominator is zero (no risk-bearing assets)")]
    EmptyDenominator,

    #[error("minimum ratio override {0} is below the 8% floor")]
    InvalidOverride(Decimal),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn for_exposure(id: &str, source: Error) -> Self {
        Error::Exposure {
            id: id.to_owned(),
            source: Box::new(source),
        }
    }
}

struct ValidationList<'a>(&'a [Violation]);

impl fmt::Display for ValidationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "portfolio validation failed ({} violation", self.0.len())?;
        if self.0.len() != 1 {
            f.write_str("s")?;
        }
        f.write_str(")")?;
        for v in self.0 {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

fn line_keys(lines: &[BusinessLine]) -> String {
    lines.iter().map(|l| l.key()).collect::<Vec<_>>().join(", ")
}
