//! Domain types shared by every calculation: counterparties, ratings,
//! exposures, money and the capital base.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rust_decimal::{Decimal, RoundingStrategy};

use crate::error::{Error, Result};

/// Number of minor units every reported amount is rounded to.
pub const MINOR_UNIT_SCALE: u32 = 2;

/// ISO-4217 style three-letter code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Currency([u8; 3]);

impl Currency {
    pub const EUR: Currency = Currency(*b"EUR");

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("currency codes are ASCII")
    }
}

impl FromStr for Currency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let b = s.trim().as_bytes();
        if b.len() == 3 && b.iter().all(u8::is_ascii_uppercase) {
            Ok(Currency([b[0], b[1], b[2]]))
        } else {
            Err(Error::InvalidCurrency(s.to_owned()))
        }
    }
}

impl fmt::Display for Currency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fixed-point amount in a single currency.
///
/// Arithmetic is exact; rounding to [`MINOR_UNIT_SCALE`] happens only through
/// [`Money::round_minor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Money {
    amount: Decimal,
    currency: Currency,
}

impl Money {
    pub fn new(amount: Decimal, currency: Currency) -> Self {
        Money { amount, currency }
    }

    pub fn zero(currency: Currency) -> Self {
        Money::new(Decimal::ZERO, currency)
    }

    pub fn amount(&self) -> Decimal {
        self.amount
    }

    pub fn currency(&self) -> Currency {
        self.currency
    }

    pub fn is_negative(&self) -> bool {
        self.amount.is_sign_negative() && !self.amount.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.amount.is_zero()
    }

    pub fn checked_add(self, other: Money) -> Result<Money> {
        self.same_currency(&other)?;
        Ok(Money::new(self.amount + other.amount, self.currency))
    }

    pub fn checked_sub(self, other: Money) -> Result<Money> {
        self.same_currency(&other)?;
        Ok(Money::new(self.amount - other.amount, self.currency))
    }

    /// Exact product with a dimensionless factor.
    pub fn scale(self, factor: Decimal) -> Money {
        Money::new(self.amount * factor, self.currency)
    }

    /// Half-to-even rounding to minor units.
    pub fn round_minor(self) -> Money {
        Money::new(
            self.amount
                .round_dp_with_strategy(MINOR_UNIT_SCALE, RoundingStrategy::MidpointNearestEven),
            self.currency,
        )
    }

    pub fn same_currency(&self, other: &Money) -> Result<()> {
        if self.currency == other.currency {
            Ok(())
        } else {
            Err(Error::CurrencyMismatch {
                left: self.currency.to_string(),
                right: other.currency.to_string(),
            })
        }
    }

    /// Sums amounts in order; every item must be in `currency`.
    pub fn sum<I: IntoIterator<Item = Money>>(currency: Currency, items: I) -> Result<Money> {
        items
            .into_iter()
            .try_fold(Money::zero(currency), Money::checked_add)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.round_minor();
        write!(f, "{:.2} {}", r.amount, r.currency)
    }
}

/// Counterparty category of the standardized weight table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CounterpartyClass {
    Sovereign,
    Bank,
    /// Short-term claim on a bank; requires the exposure's short-term flag.
    BankShortTerm,
    Corporate,
}

impl CounterpartyClass {
    pub const ALL: [CounterpartyClass; 4] = [
        CounterpartyClass::Sovereign,
        CounterpartyClass::Bank,
        CounterpartyClass::BankShortTerm,
        CounterpartyClass::Corporate,
    ];

    pub fn key(self) -> &'static str {
        match self {
            CounterpartyClass::Sovereign => "sovereign",
            CounterpartyClass::Bank => "bank",
            CounterpartyClass::BankShortTerm => "bank_short_term",
            CounterpartyClass::Corporate => "corporate",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for CounterpartyClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CounterpartyClass::ALL
            .into_iter()
            .find(|c| c.key() == s.trim())
            .ok_or_else(|| Error::Invalid(format!("unknown counterparty class {s:?}")))
    }
}

impl fmt::Display for CounterpartyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// External-rating bucket, strongest first. `Unrated` is not part of the
/// strength order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RatingBucket {
    AaaToAaMinus,
    APlusToAMinus,
    BbbPlusToBbbMinus,
    BbPlusToBbMinus,
    BPlusToBMinus,
    BelowBMinus,
    Unrated,
}

/// Literal marker for an explicitly unrated counterparty.
pub const UNRATED_TOKEN: &str = "unrated";

/// Marker for anything rated strictly below B-.
pub const BELOW_B_MINUS_TOKEN: &str = "<B-";

const RATING_TOKENS: [(&str, RatingBucket); 18] = [
    ("AAA", RatingBucket::AaaToAaMinus),
    ("AA+", RatingBucket::AaaToAaMinus),
    ("AA", RatingBucket::AaaToAaMinus),
    ("AA-", RatingBucket::AaaToAaMinus),
    ("A+", RatingBucket::APlusToAMinus),
    ("A", RatingBucket::APlusToAMinus),
    ("A-", RatingBucket::APlusToAMinus),
    ("BBB+", RatingBucket::BbbPlusToBbbMinus),
    ("BBB", RatingBucket::BbbPlusToBbbMinus),
    ("BBB-", RatingBucket::BbbPlusToBbbMinus),
    ("BB+", RatingBucket::BbPlusToBbMinus),
    ("BB", RatingBucket::BbPlusToBbMinus),
    ("BB-", RatingBucket::BbPlusToBbMinus),
    ("B+", RatingBucket::BPlusToBMinus),
    ("B", RatingBucket::BPlusToBMinus),
    ("B-", RatingBucket::BPlusToBMinus),
    (BELOW_B_MINUS_TOKEN, RatingBucket::BelowBMinus),
    (UNRATED_TOKEN, RatingBucket::Unrated),
];

impl RatingBucket {
    pub const ALL: [RatingBucket; 7] = [
        RatingBucket::AaaToAaMinus,
        RatingBucket::APlusToAMinus,
        RatingBucket::BbbPlusToBbbMinus,
        RatingBucket::BbPlusToBbMinus,
        RatingBucket::BPlusToBMinus,
        RatingBucket::BelowBMinus,
        RatingBucket::Unrated,
    ];

    /// The six rated buckets in strength order.
    pub const RATED: [RatingBucket; 6] = [
        RatingBucket::AaaToAaMinus,
        RatingBucket::APlusToAMinus,
        RatingBucket::BbbPlusToBbbMinus,
        RatingBucket::BbPlusToBbMinus,
        RatingBucket::BPlusToBMinus,
        RatingBucket::BelowBMinus,
    ];

    /// Every token accepted by [`parse_rating`], strongest first.
    pub fn tokens() -> impl Iterator<Item = &'static str> {
        RATING_TOKENS.iter().map(|(t, _)| *t)
    }

    /// Position in the strength order (0 = strongest); `None` for `Unrated`.
    pub fn strength_rank(self) -> Option<usize> {
        match self {
            RatingBucket::Unrated => None,
            b => Some(b as usize),
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            RatingBucket::AaaToAaMinus => "aaa_to_aa_minus",
            RatingBucket::APlusToAMinus => "a_plus_to_a_minus",
            RatingBucket::BbbPlusToBbbMinus => "bbb_plus_to_bbb_minus",
            RatingBucket::BbPlusToBbMinus => "bb_plus_to_bb_minus",
            RatingBucket::BPlusToBMinus => "b_plus_to_b_minus",
            RatingBucket::BelowBMinus => "below_b_minus",
            RatingBucket::Unrated => "unrated",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RatingBucket::AaaToAaMinus => "AAA to AA-",
            RatingBucket::APlusToAMinus => "A+ to A-",
            RatingBucket::BbbPlusToBbbMinus => "BBB+ to BBB-",
            RatingBucket::BbPlusToBbMinus => "BB+ to BB-",
            RatingBucket::BPlusToBMinus => "B+ to B-",
            RatingBucket::BelowBMinus => "below B-",
            RatingBucket::Unrated => "unrated",
        }
    }

    pub fn from_key(s: &str) -> Result<Self> {
        RatingBucket::ALL
            .into_iter()
            .find(|b| b.key() == s.trim())
            .ok_or_else(|| Error::Invalid(format!("unknown rating bucket {s:?}")))
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RatingBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Maps an external rating token to its bucket.
///
/// Accepts `AAA` through `B-` with the usual `+`/`-` modifiers, the literal
/// `<B-` for anything below B-, and `unrated`. Everything else (including
/// grades such as `CCC` or an empty string) is rejected.
pub fn parse_rating(text: &str) -> Result<RatingBucket> {
    let t = text.trim();
    RATING_TOKENS
        .iter()
        .find(|(tok, _)| *tok == t)
        .map(|(_, b)| *b)
        .ok_or_else(|| Error::UnknownRating(text.to_owned()))
}

/// Key into the credit-conversion table, e.g. `medium_term_confirmed_facility`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OffBalanceCategory(String);

impl OffBalanceCategory {
    pub fn new(key: &str) -> Result<Self> {
        let k = key.trim();
        let ok = !k.is_empty()
            && k.bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_');
        if ok {
            Ok(OffBalanceCategory(k.to_owned()))
        } else {
            Err(Error::Invalid(format!(
                "off-balance category {key:?} must be a non-empty lower_snake_case key"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for OffBalanceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Position {
    OnBalance,
    OffBalance(OffBalanceCategory),
}

impl Position {
    pub fn is_off_balance(&self) -> bool {
        matches!(self, Position::OffBalance(_))
    }
}

/// Optional internal-ratings inputs carried by an exposure. Which fields are
/// required depends on the IRB mode in use.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IrbInputs {
    pub pd: Option<Decimal>,
    pub lgd: Option<Decimal>,
    pub ead: Option<Money>,
    pub maturity_years: Option<Decimal>,
}

/// One on- or off-balance-sheet engagement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exposure {
    pub id: String,
    pub class: CounterpartyClass,
    pub rating: RatingBucket,
    pub nominal: Money,
    pub position: Position,
    pub short_term: bool,
    pub irb: IrbInputs,
}

impl Exposure {
    pub fn on_balance(
        id: impl Into<String>,
        class: CounterpartyClass,
        rating: RatingBucket,
        nominal: Money,
    ) -> Self {
        Exposure {
            id: id.into(),
            class,
            rating,
            nominal,
            position: Position::OnBalance,
            short_term: false,
            irb: IrbInputs::default(),
        }
    }

    pub fn off_balance(
        id: impl Into<String>,
        class: CounterpartyClass,
        rating: RatingBucket,
        nominal: Money,
        category: OffBalanceCategory,
    ) -> Self {
        Exposure {
            position: Position::OffBalance(category),
            ..Exposure::on_balance(id, class, rating, nominal)
        }
    }

    pub fn with_short_term(mut self, flag: bool) -> Self {
        self.short_term = flag;
        self
    }

    pub fn with_irb(mut self, irb: IrbInputs) -> Self {
        self.irb = irb;
        self
    }
}

/// A single reason a portfolio failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyId {
        index: usize,
    },
    DuplicateId {
        id: String,
    },
    NegativeAmount {
        id: String,
        field: &'static str,
    },
    MixedCurrency {
        id: String,
        found: Currency,
        expected: Currency,
    },
    ShortTermClassWithoutFlag {
        id: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyId { index } => write!(f, "exposure #{index} has an empty id"),
            Violation::DuplicateId { id } => write!(f, "duplicate id {id:?}"),
            Violation::NegativeAmount { id, field } => {
                write!(f, "exposure {id}: negative amount in {field}")
            }
            Violation::MixedCurrency {
                id,
                found,
                expected,
            } => write!(f, "exposure {id}: currency {found}, expected {expected}"),
            Violation::ShortTermClassWithoutFlag { id } => write!(
                f,
                "exposure {id}: class bank_short_term requires the short-term flag"
            ),
        }
    }
}

/// A portfolio that passed [`validate_portfolio`]. Immutable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Portfolio {
    exposures: Vec<Exposure>,
    currency: Currency,
}

impl Portfolio {
    pub fn exposures(&self) -> &[Exposure] {
        &self.exposures
    }

    pub fn currency(&self) -> Currency {
        self.currency
    }

    pub fn len(&self) -> usize {
        self.exposures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exposures.is_empty()
    }

    pub fn into_exposures(self) -> Vec<Exposure> {
        self.exposures
    }
}

/// Checks ids, signs, currencies and the short-term class rule. Every
/// violation is collected; the error is never just the first one found.
pub fn validate_portfolio(exposures: Vec<Exposure>, currency: Currency) -> Result<Portfolio> {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    let mut reported_dupes = HashSet::new();

    for (index, e) in exposures.iter().enumerate() {
        if e.id.trim().is_empty() {
            violations.push(Violation::EmptyId { index });
        } else if !seen.insert(e.id.as_str()) && reported_dupes.insert(e.id.as_str()) {
            violations.push(Violation::DuplicateId { id: e.id.clone() });
        }

        let mut amounts = vec![("nominal", e.nominal)];
        if let Some(ead) = e.irb.ead {
            amounts.push(("ead", ead));
        }
        for (field, m) in amounts {
            if m.is_negative() {
                violations.push(Violation::NegativeAmount {
                    id: e.id.clone(),
                    field,
                });
            }
            if m.currency() != currency {
                violations.push(Violation::MixedCurrency {
                    id: e.id.clone(),
                    found: m.currency(),
                    expected: currency,
                });
            }
        }

        if e.class == CounterpartyClass::BankShortTerm && !e.short_term {
            violations.push(Violation::ShortTermClassWithoutFlag { id: e.id.clone() });
        }
    }

    if violations.is_empty() {
        Ok(Portfolio {
            exposures,
            currency,
        })
    } else {
        Err(Error::ValidationFailure(violations))
    }
}

/// Own funds. The tier split is carried for disclosure only; calculations
/// use `total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapitalBase {
    total: Money,
    tier1: Option<Money>,
    tier2: Option<Money>,
}

impl CapitalBase {
    pub fn new(total: Money) -> Result<Self> {
        if total.is_negative() {
            return Err(Error::Invalid("own funds must be non-negative".into()));
        }
        Ok(CapitalBase {
            total,
            tier1: None,
            tier2: None,
        })
    }

    /// Both tiers must be non-negative and add up to `total` exactly.
    pub fn with_tiers(total: Money, tier1: Money, tier2: Money) -> Result<Self> {
        let base = CapitalBase::new(total)?;
        if tier1.is_negative() || tier2.is_negative() {
            return Err(Error::Invalid("capital tiers must be non-negative".into()));
        }
        let sum = tier1.checked_add(tier2)?;
        sum.same_currency(&total)?;
        if sum.amount() != total.amount() {
            return Err(Error::Invalid(format!(
                "tier 1 + tier 2 = {sum} does not equal total own funds {total}"
            )));
        }
        Ok(CapitalBase {
            tier1: Some(tier1),
            tier2: Some(tier2),
            ..base
        })
    }

    pub fn total(&self) -> Money {
        self.total
    }

    pub fn tier1(&self) -> Option<Money> {
        self.tier1
    }

    pub fn tier2(&self) -> Option<Money> {
        self.tier2
    }

    pub fn scale(&self, k: Decimal) -> CapitalBase {
        CapitalBase {
            total: self.total.scale(k),
            tier1: self.tier1.map(|m| m.scale(k)),
            tier2: self.tier2.map(|m| m.scale(k)),
        }
    }
}
