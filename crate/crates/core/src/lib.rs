//! Regulatory capital engine.
//!
//! * [`model`]: exposures, ratings, money and the capital base.
//! * [`standardized`]: rating-based credit risk weights and conversion factors.
//! * [`irb`]: internal-ratings parameters and pluggable weight functions.
//! * [`oprisk`]: Basic Indicator and Standardized operational-risk charges.
//! * [`aggregation`]: denominator, Cooke and McDonough ratios, Pillar 2.
//!
//! All functions are pure; the types are immutable once validated and can be
//! shared across threads.

pub mod aggregation;
pub mod error;
pub mod exact;
pub mod irb;
pub mod model;
pub mod oprisk;
pub mod standardized;

pub use error::{Error, Result};
pub use exact::{Exact, Ratio};
pub use model::{Currency, Money};
