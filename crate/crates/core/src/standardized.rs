//! Standardized approach to credit risk.
//!
//! Each exposure's risk-weighted amount is `nominal × CCF × weight`, where the
//! weight comes from a (counterparty class, rating bucket) table and the CCF
//! is 1 for on-balance items. The default table is the Basel Committee's
//! January 2001 proposal:
//!
//! | class            | AAA..AA- | A+..A- | BBB+..BBB- | BB+..BB- | B+..B- | < B- | unrated  |
//! |------------------|----------|--------|------------|----------|--------|------|----------|
//! | sovereign        | 0%       | 20%    | 50%        | 100%     | 100%   | 150% | 100%     |
//! | bank             | 20%      | 50%    | 50–100%    | 100%     | 100%   | 150% | 50–100%  |
//! | bank, short term | 20%      | 20%    | 20%        | 50%      | 50%    | 150% | 20%      |
//! | corporate        | 20%      | 50%    | 100%       | 100%     | 150%   | 150% | 100%     |
//!
//! The two range cells of the bank row are resolved by [`BankOptionPolicy`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;

use crate::error::{Error, Result};
use crate::model::{
    CounterpartyClass, Exposure, Money, OffBalanceCategory, Portfolio, Position, RatingBucket,
};

/// Largest weight any table may carry.
pub const MAX_WEIGHT: Decimal = Decimal::from_parts(2, 0, 0, false, 0);

/// Category priced explicitly in the reference example (50%).
pub const MEDIUM_TERM_CONFIRMED_FACILITY: &str = "medium_term_confirmed_facility";

/// Default minimum capital ratio applied to RWA.
pub const MINIMUM_CAPITAL_RATIO: Decimal = Decimal::from_parts(8, 0, 0, false, 2);

/// Resolution of the bank row's "50 to 100%" cells. One policy applies to
/// both range cells; there is no mixed resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BankOptionPolicy {
    #[default]
    LowEnd,
    HighEnd,
}

impl BankOptionPolicy {
    pub fn key(self) -> &'static str {
        match self {
            BankOptionPolicy::LowEnd => "low_end",
            BankOptionPolicy::HighEnd => "high_end",
        }
    }
}

impl FromStr for BankOptionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "low_end" => Ok(BankOptionPolicy::LowEnd),
            "high_end" => Ok(BankOptionPolicy::HighEnd),
            other => Err(Error::Invalid(format!(
                "unknown bank option policy {other:?} (expected low_end or high_end)"
            ))),
        }
    }
}

impl fmt::Display for BankOptionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// A weight-table cell: either a single weight or a range resolved by policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightCell {
    Fixed(Decimal),
    Range { low: Decimal, high: Decimal },
}

impl WeightCell {
    pub fn resolve(self, policy: BankOptionPolicy) -> Decimal {
        match (self, policy) {
            (WeightCell::Fixed(w), _) => w,
            (WeightCell::Range { low, .. }, BankOptionPolicy::LowEnd) => low,
            (WeightCell::Range { high, .. }, BankOptionPolicy::HighEnd) => high,
        }
    }

    fn validate(self) -> Result<Self> {
        let check = |w: Decimal| {
            if w < Decimal::ZERO || w > MAX_WEIGHT {
                Err(Error::OutOfRange {
                    what: "risk weight",
                    value: w,
                    min: Decimal::ZERO,
                    max: MAX_WEIGHT,
                })
            } else {
                Ok(())
            }
        };
        match self {
            WeightCell::Fixed(w) => check(w)?,
            WeightCell::Range { low, high } => {
                check(low)?;
                check(high)?;
                if low > high {
                    return Err(Error::Invalid(format!(
                        "weight range {low}..{high} is inverted"
                    )));
                }
            }
        }
        Ok(self)
    }
}

impl fmt::Display for WeightCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // at least two decimals, never fewer than the value carries
        let show = |w: &Decimal| format!("{:.*}", w.scale().max(2) as usize, w);
        match self {
            WeightCell::Fixed(w) => f.write_str(&show(w)),
            WeightCell::Range { low, high } => write!(f, "{}..{}", show(low), show(high)),
        }
    }
}

impl FromStr for WeightCell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            Decimal::from_str(t.trim()).map_err(|_| Error::Invalid(format!("bad weight {t:?}")))
        };
        let cell = match s.split_once("..") {
            Some((lo, hi)) => WeightCell::Range {
                low: parse(lo)?,
                high: parse(hi)?,
            },
            None => WeightCell::Fixed(parse(s)?),
        };
        cell.validate()
    }
}

/// (class, bucket) → weight lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskWeightTable {
    cells: [[Option<WeightCell>; 7]; 4],
}

impl RiskWeightTable {
    pub fn empty() -> Self {
        RiskWeightTable {
            cells: [[None; 7]; 4],
        }
    }

    /// The Basel Committee's published standardized weights.
    pub fn basel_default() -> Self {
        use WeightCell::{Fixed, Range};
        let pct = |p: i64| Decimal::new(p, 2);
        let f = |p: i64| Fixed(pct(p));
        let bank_range = Range {
            low: pct(50),
            high: pct(100),
        };
        RiskWeightTable {
            cells: [
                // sovereign
                [f(0), f(20), f(50), f(100), f(100), f(150), f(100)].map(Some),
                // bank
                [f(20), f(50), bank_range, f(100), f(100), f(150), bank_range].map(Some),
                // bank, short-term claim
                [f(20), f(20), f(20), f(50), f(50), f(150), f(20)].map(Some),
                // corporate
                [f(20), f(50), f(100), f(100), f(150), f(150), f(100)].map(Some),
            ],
        }
    }

    pub fn set(
        &mut self,
        class: CounterpartyClass,
        bucket: RatingBucket,
        cell: WeightCell,
    ) -> Result<()> {
        self.cells[class.index()][bucket.index()] = Some(cell.validate()?);
        Ok(())
    }

    pub fn cell(&self, class: CounterpartyClass, bucket: RatingBucket) -> Option<WeightCell> {
        self.cells[class.index()][bucket.index()]
    }

    /// Every populated cell in class-major, bucket-minor order.
    pub fn cells(
        &self,
    ) -> impl Iterator<Item = (CounterpartyClass, RatingBucket, WeightCell)> + '_ {
        CounterpartyClass::ALL.into_iter().flat_map(move |c| {
            RatingBucket::ALL
                .into_iter()
                .filter_map(move |b| self.cell(c, b).map(|cell| (c, b, cell)))
        })
    }

    pub fn lookup(
        &self,
        class: CounterpartyClass,
        bucket: RatingBucket,
        policy: BankOptionPolicy,
    ) -> Result<Decimal> {
        self.cell(class, bucket)
            .map(|c| c.resolve(policy))
            .ok_or(Error::MissingCell { class, bucket })
    }

    /// True when the table holds a range cell anywhere.
    pub fn has_ranges(&self) -> bool {
        self.cells()
            .any(|(_, _, c)| matches!(c, WeightCell::Range { .. }))
    }
}

impl Default for RiskWeightTable {
    fn default() -> Self {
        RiskWeightTable::basel_default()
    }
}

pub fn lookup_weight(
    table: &RiskWeightTable,
    class: CounterpartyClass,
    rating: RatingBucket,
    policy: BankOptionPolicy,
) -> Result<Decimal> {
    table.lookup(class, rating, policy)
}

/// Off-balance category → credit-conversion factor in [0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CcfTable {
    factors: BTreeMap<OffBalanceCategory, Decimal>,
}

impl CcfTable {
    pub fn empty() -> Self {
        CcfTable {
            factors: BTreeMap::new(),
        }
    }

    /// 50% for medium-term confirmed facilities; the other listed
    /// off-balance categories convert at 100% until configured otherwise.
    pub fn basel_default() -> Self {
        let mut t = CcfTable::empty();
        let entries = [
            (MEDIUM_TERM_CONFIRMED_FACILITY, Decimal::new(50, 2)),
            ("surety_bond", Decimal::ONE),
            ("documentary_credit", Decimal::ONE),
            ("guarantee", Decimal::ONE),
        ];
        for (k, v) in entries {
            t.set(OffBalanceCategory::new(k).expect("static key"), v)
                .expect("static factor");
        }
        t
    }

    pub fn set(&mut self, category: OffBalanceCategory, factor: Decimal) -> Result<()> {
        if factor < Decimal::ZERO || factor > Decimal::ONE {
            return Err(Error::OutOfRange {
                what: "credit-conversion factor",
                value: factor,
                min: Decimal::ZERO,
                max: Decimal::ONE,
            });
        }
        self.factors.insert(category, factor);
        Ok(())
    }

    pub fn factor(&self, category: &OffBalanceCategory) -> Result<Decimal> {
        self.factors
            .get(category)
            .copied()
            .ok_or_else(|| Error::UnknownCategory(category.as_str().to_owned()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&OffBalanceCategory, Decimal)> {
        self.factors.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

impl Default for CcfTable {
    fn default() -> Self {
        CcfTable::basel_default()
    }
}

/// Credit-equivalent amount of an off-balance commitment (exact, unrounded).
pub fn convert_off_balance(
    nominal: Money,
    category: &OffBalanceCategory,
    ccf: &CcfTable,
) -> Result<Money> {
    Ok(nominal.scale(ccf.factor(category)?))
}

/// Per-exposure result, recording the factors that were applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RwaLine {
    pub exposure_id: String,
    pub nominal: Money,
    pub ccf: Decimal,
    pub weight: Decimal,
    pub risk_weighted: Money,
}

/// Lines in input order plus their exact sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreditRwa {
    pub lines: Vec<RwaLine>,
    pub total: Money,
}

/// Weight and CCF sources for the standardized approach.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StandardizedTables {
    pub weights: RiskWeightTable,
    pub ccf: CcfTable,
}

pub fn rwa_exposure(
    e: &Exposure,
    weights: &RiskWeightTable,
    ccf: &CcfTable,
    policy: BankOptionPolicy,
) -> Result<RwaLine> {
    let weight = weights.lookup(e.class, e.rating, policy)?;
    let factor = match &e.position {
        Position::OnBalance => Decimal::ONE,
        Position::OffBalance(cat) => ccf.factor(cat)?,
    };
    // one rounding, after the full product
    let risk_weighted = e.nominal.scale(factor * weight).round_minor();
    Ok(RwaLine {
        exposure_id: e.id.clone(),
        nominal: e.nominal,
        ccf: factor,
        weight,
        risk_weighted,
    })
}

pub fn rwa_portfolio(
    portfolio: &Portfolio,
    tables: &StandardizedTables,
    policy: BankOptionPolicy,
) -> Result<CreditRwa> {
    let lines = portfolio
        .exposures()
        .iter()
        .map(|e| {
            rwa_exposure(e, &tables.weights, &tables.ccf, policy)
                .map_err(|err| Error::for_exposure(&e.id, err))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = Money::sum(portfolio.currency(), lines.iter().map(|l| l.risk_weighted))?;
    Ok(CreditRwa { lines, total })
}

/// Capital held against `rwa` at `ratio`, rounded to minor units.
pub fn required_capital_credit(rwa: Money, ratio: Decimal) -> Money {
    rwa.scale(ratio).round_minor()
}
