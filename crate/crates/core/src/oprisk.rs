//! Operational-risk capital: Basic Indicator (α × average gross income),
//! Standardized (Σ β × average gross income per business line), and a hook
//! for advanced estimators.
//!
//! Averages and products are carried as exact rationals; each charge is
//! rounded half-to-even to minor units once, when it leaves this module.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rust_decimal::Decimal;

use crate::error::{Error, Result};
use crate::exact::Exact;
use crate::model::{Currency, Money, MINOR_UNIT_SCALE};

/// Basic Indicator multiplier.
pub const ALPHA: Decimal = Decimal::from_parts(15, 0, 0, false, 2);

/// Number of years in an income history.
pub const HISTORY_YEARS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BusinessLine {
    CorporateFinance,
    TradingAndSales,
    RetailBanking,
    CommercialBanking,
    PaymentAndSettlement,
    AgencyServices,
    AssetManagement,
    RetailBrokerage,
}

impl BusinessLine {
    pub const ALL: [BusinessLine; 8] = [
        BusinessLine::CorporateFinance,
        BusinessLine::TradingAndSales,
        BusinessLine::RetailBanking,
        BusinessLine::CommercialBanking,
        BusinessLine::PaymentAndSettlement,
        BusinessLine::AgencyServices,
        BusinessLine::AssetManagement,
        BusinessLine::RetailBrokerage,
    ];

    pub fn key(self) -> &'static str {
        match self {
            BusinessLine::CorporateFinance => "corporate_finance",
            BusinessLine::TradingAndSales => "trading_and_sales",
            BusinessLine::RetailBanking => "retail_banking",
            BusinessLine::CommercialBanking => "commercial_banking",
            BusinessLine::PaymentAndSettlement => "payment_and_settlement",
            BusinessLine::AgencyServices => "agency_services",
            BusinessLine::AssetManagement => "asset_management",
            BusinessLine::RetailBrokerage => "retail_brokerage",
        }
    }
}

impl FromStr for BusinessLine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BusinessLine::ALL
            .into_iter()
            .find(|l| l.key() == s.trim())
            .ok_or_else(|| Error::Invalid(format!("unknown business line {s:?}")))
    }
}

impl fmt::Display for BusinessLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// β per business line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaTable {
    betas: [Decimal; 8],
}

impl BetaTable {
    /// 18/18/12/15/18/15/12/12 percent, in [`BusinessLine::ALL`] order.
    pub fn basel_default() -> Self {
        BetaTable {
            betas: [18, 18, 12, 15, 18, 15, 12, 12].map(|p| Decimal::new(p, 2)),
        }
    }

    /// Same β on every line.
    pub fn uniform(beta: Decimal) -> Result<Self> {
        let mut t = BetaTable::basel_default();
        for line in BusinessLine::ALL {
            t.set(line, beta)?;
        }
        Ok(t)
    }

    pub fn set(&mut self, line: BusinessLine, beta: Decimal) -> Result<()> {
        if beta < Decimal::ZERO || beta > Decimal::ONE {
            return Err(Error::OutOfRange {
                what: "beta",
                value: beta,
                min: Decimal::ZERO,
                max: Decimal::ONE,
            });
        }
        self.betas[line as usize] = beta;
        Ok(())
    }

    pub fn get(&self, line: BusinessLine) -> Decimal {
        self.betas[line as usize]
    }

    pub fn entries(&self) -> impl Iterator<Item = (BusinessLine, Decimal)> + '_ {
        BusinessLine::ALL.into_iter().map(|l| (l, self.get(l)))
    }
}

impl Default for BetaTable {
    fn default() -> Self {
        BetaTable::basel_default()
    }
}

/// Items removed from reported income before it counts as gross income.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Exclusions {
    pub provisions: Decimal,
    pub realized_banking_book: Decimal,
    pub extraordinary: Decimal,
    pub insurance: Decimal,
}

impl Exclusions {
    pub fn total(&self) -> Decimal {
        self.provisions + self.realized_banking_book + self.extraordinary + self.insurance
    }
}

/// Reported income for one year and one key (a business line or the total).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IncomeEntry {
    pub reported: Decimal,
    pub exclusions: Exclusions,
}

impl IncomeEntry {
    pub fn new(reported: Decimal) -> Self {
        IncomeEntry {
            reported,
            exclusions: Exclusions::default(),
        }
    }

    pub fn gross_income(&self) -> Decimal {
        self.reported - self.exclusions.total()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct YearRecord {
    pub year: i32,
    pub total: Option<IncomeEntry>,
    pub lines: BTreeMap<BusinessLine, IncomeEntry>,
}

impl YearRecord {
    pub fn with_total(year: i32, total: Decimal) -> Self {
        YearRecord {
            year,
            total: Some(IncomeEntry::new(total)),
            lines: BTreeMap::new(),
        }
    }

    pub fn with_lines(year: i32, lines: impl IntoIterator<Item = (BusinessLine, Decimal)>) -> Self {
        YearRecord {
            year,
            total: None,
            lines: lines
                .into_iter()
                .map(|(l, v)| (l, IncomeEntry::new(v)))
                .collect(),
        }
    }

    /// Firm-wide gross income: the total row if present, else the line sum.
    pub fn gross_income(&self) -> Option<Decimal> {
        match self.total {
            Some(t) => Some(t.gross_income()),
            None if !self.lines.is_empty() => {
                Some(self.lines.values().map(IncomeEntry::gross_income).sum())
            }
            None => None,
        }
    }
}

/// Three consecutive years of gross income, oldest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncomeHistory {
    currency: Currency,
    years: Vec<YearRecord>,
}

impl IncomeHistory {
    pub fn new(currency: Currency, mut years: Vec<YearRecord>) -> Result<Self> {
        if years.len() != HISTORY_YEARS {
            return Err(Error::IncompleteHistory(format!(
                "got {} year(s)",
                years.len()
            )));
        }
        years.sort_by_key(|y| y.year);
        if years.windows(2).any(|w| w[1].year != w[0].year + 1) {
            let ys: Vec<_> = years.iter().map(|y| y.year.to_string()).collect();
            return Err(Error::IncompleteHistory(format!(
                "years {} are not consecutive",
                ys.join(", ")
            )));
        }
        for y in &years {
            let Some(_) = y.gross_income() else {
                return Err(Error::IncompleteHistory(format!(
                    "year {} has no income rows",
                    y.year
                )));
            };
            if let (Some(total), false) = (y.total, y.lines.is_empty()) {
                let lines: Decimal = y.lines.values().map(IncomeEntry::gross_income).sum();
                if lines != total.gross_income() {
                    return Err(Error::IncomeMismatch {
                        year: y.year,
                        lines,
                        total: total.gross_income(),
                    });
                }
            }
        }
        Ok(IncomeHistory { currency, years })
    }

    /// History with only firm-wide totals.
    pub fn from_totals(currency: Currency, first_year: i32, totals: [Decimal; 3]) -> Result<Self> {
        let years = totals
            .iter()
            .zip(first_year..)
            .map(|(t, y)| YearRecord::with_total(y, *t))
            .collect();
        IncomeHistory::new(currency, years)
    }

    pub fn currency(&self) -> Currency {
        self.currency
    }

    pub fn years(&self) -> &[YearRecord] {
        &self.years
    }

    /// Lines that lack an entry in at least one year.
    pub fn missing_lines(&self) -> Vec<BusinessLine> {
        BusinessLine::ALL
            .into_iter()
            .filter(|l| self.years.iter().any(|y| !y.lines.contains_key(l)))
            .collect()
    }
}

/// Treatment of years with negative gross income.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NegativeIncomePolicy {
    /// Drop negative years from numerator and denominator. All negative → 0.
    #[default]
    ExcludeNegativeYears,
    /// Average every year as reported.
    IncludeAll,
}

impl NegativeIncomePolicy {
    pub fn key(self) -> &'static str {
        match self {
            NegativeIncomePolicy::ExcludeNegativeYears => "exclude_negative_years",
            NegativeIncomePolicy::IncludeAll => "include_all",
        }
    }
}

impl FromStr for NegativeIncomePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exclude_negative_years" => Ok(NegativeIncomePolicy::ExcludeNegativeYears),
            "include_all" => Ok(NegativeIncomePolicy::IncludeAll),
            other => Err(Error::Invalid(format!(
                "unknown negative-income policy {other:?}"
            ))),
        }
    }
}

impl fmt::Display for NegativeIncomePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Exact average gross income, kept unrounded so downstream products round
/// only once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrossIncome {
    value: Exact,
    currency: Currency,
    years_counted: usize,
}

impl GrossIncome {
    pub fn exact(&self) -> &Exact {
        &self.value
    }

    pub fn currency(&self) -> Currency {
        self.currency
    }

    pub fn years_counted(&self) -> usize {
        self.years_counted
    }

    pub fn to_money(&self) -> Money {
        Money::new(self.value.round_dp(MINOR_UNIT_SCALE), self.currency)
    }
}

impl From<Money> for GrossIncome {
    fn from(m: Money) -> Self {
        GrossIncome {
            value: Exact::from(m.amount()),
            currency: m.currency(),
            years_counted: 1,
        }
    }
}

fn average(values: &[Decimal], policy: NegativeIncomePolicy) -> (Exact, usize) {
    let kept: Vec<Exact> = values
        .iter()
        .filter(|v| policy == NegativeIncomePolicy::IncludeAll || **v >= Decimal::ZERO)
        .map(Exact::from)
        .collect();
    let n = kept.len();
    let sum: Exact = kept.into_iter().sum();
    let avg = sum
        .checked_div(&Exact::from_integer(n as i64))
        .unwrap_or_else(Exact::zero);
    (avg, n)
}

/// Mean firm-wide gross income over the three years, after exclusions.
pub fn average_gross_income(
    h: &IncomeHistory,
    policy: NegativeIncomePolicy,
) -> Result<GrossIncome> {
    let totals = h
        .years()
        .iter()
        .map(|y| {
            y.gross_income()
                .ok_or_else(|| Error::IncompleteHistory(format!("year {} has no income", y.year)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (value, years_counted) = average(&totals, policy);
    Ok(GrossIncome {
        value,
        currency: h.currency(),
        years_counted,
    })
}

fn charge(value: Exact, currency: Currency) -> Money {
    Money::new(value.round_dp(MINOR_UNIT_SCALE), currency)
}

/// `gi × α`, zero when `gi ≤ 0`.
pub fn bia_capital(gi: &GrossIncome) -> Money {
    let k = (gi.exact() * &Exact::from(ALPHA)).max_zero();
    charge(k, gi.currency())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineCharge {
    pub line: BusinessLine,
    pub average_income: GrossIncome,
    pub beta: Decimal,
    pub charge: Money,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsaCharge {
    pub lines: Vec<LineCharge>,
    pub total: Money,
}

/// Σ over the eight lines of (average line income × β).
///
/// Under `ExcludeNegativeYears` each line averages its non-negative years, so
/// line charges are never negative. Under `IncludeAll` negative lines offset
/// positive ones and only the total is floored at zero. The total is rounded
/// from the exact sum, not summed from rounded line charges.
pub fn tsa_capital(
    h: &IncomeHistory,
    betas: &BetaTable,
    policy: NegativeIncomePolicy,
) -> Result<TsaCharge> {
    let missing = h.missing_lines();
    if !missing.is_empty() {
        return Err(Error::MissingLine(missing));
    }
    let mut exact_total = Exact::zero();
    let mut lines = Vec::with_capacity(BusinessLine::ALL.len());
    for line in BusinessLine::ALL {
        let values: Vec<Decimal> = h
            .years()
            .iter()
            .map(|y| y.lines[&line].gross_income())
            .collect();
        let (avg, n) = average(&values, policy);
        let beta = betas.get(line);
        let k = &avg * &Exact::from(beta);
        exact_total = &exact_total + &k;
        lines.push(LineCharge {
            line,
            average_income: GrossIncome {
                value: avg,
                currency: h.currency(),
                years_counted: n,
            },
            beta,
            charge: charge(k, h.currency()),
        });
    }
    Ok(TsaCharge {
        lines,
        total: charge(exact_total.max_zero(), h.currency()),
    })
}

/// Approach used for one scope of activity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OpRiskApproach {
    BasicIndicator,
    Standardized,
    /// Delegates to an estimator registered under this name.
    AdvancedHook(String),
}

impl OpRiskApproach {
    /// Complexity rank: higher is more elaborate.
    pub fn rank(&self) -> u8 {
        match self {
            OpRiskApproach::BasicIndicator => 0,
            OpRiskApproach::Standardized => 1,
            OpRiskApproach::AdvancedHook(_) => 2,
        }
    }
}

impl FromStr for OpRiskApproach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "basic_indicator" => Ok(OpRiskApproach::BasicIndicator),
            "standardized" => Ok(OpRiskApproach::Standardized),
            other => match other.strip_prefix("advanced:") {
                Some(name) if !name.trim().is_empty() => {
                    Ok(OpRiskApproach::AdvancedHook(name.trim().to_owned()))
                }
                _ => Err(Error::Invalid(format!(
                    "unknown operational-risk approach {other:?} \
                     (expected basic_indicator, standardized or advanced:<name>)"
                ))),
            },
        }
    }
}

impl fmt::Display for OpRiskApproach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpRiskApproach::BasicIndicator => f.write_str("basic_indicator"),
            OpRiskApproach::Standardized => f.write_str("standardized"),
            OpRiskApproach::AdvancedHook(n) => write!(f, "advanced:{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeAssignment {
    pub scope: String,
    pub approach: OpRiskApproach,
    /// Approach the scope was previously authorised for, if any.
    pub previous: Option<OpRiskApproach>,
}

/// Approach per scope of activity. Scopes are summed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproachAssignment {
    scopes: Vec<ScopeAssignment>,
    supervisory_override: bool,
}

/// Scope name used when a single approach covers the whole institution.
pub const DEFAULT_SCOPE: &str = "bank";

impl ApproachAssignment {
    pub fn new(scopes: Vec<ScopeAssignment>, supervisory_override: bool) -> Result<Self> {
        if scopes.is_empty() {
            return Err(Error::Invalid(
                "operational-risk assignment needs at least one scope".into(),
            ));
        }
        let mut names: Vec<&str> = scopes.iter().map(|s| s.scope.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("scope {:?} assigned twice", w[0])));
        }
        for s in &scopes {
            if let Some(prev) = &s.previous {
                if s.approach.rank() < prev.rank() && !supervisory_override {
                    return Err(Error::DowngradeWithoutOverride {
                        scope: s.scope.clone(),
                        from: prev.clone(),
                        to: s.approach.clone(),
                    });
                }
            }
        }
        Ok(ApproachAssignment {
            scopes,
            supervisory_override,
        })
    }

    /// One approach for the whole institution under [`DEFAULT_SCOPE`].
    pub fn single(approach: OpRiskApproach) -> Self {
        ApproachAssignment::new(
            vec![ScopeAssignment {
                scope: DEFAULT_SCOPE.to_owned(),
                approach,
                previous: None,
            }],
            false,
        )
        .expect("a single fresh scope is always valid")
    }

    pub fn scopes(&self) -> &[ScopeAssignment] {
        &self.scopes
    }

    pub fn supervisory_override(&self) -> bool {
        self.supervisory_override
    }
}

/// External estimator behind an advanced approach.
pub trait AdvancedEstimator: Send + Sync {
    fn capital_charge(&self, scope: &str, income: &IncomeHistory) -> Result<Money>;
}

impl<F> AdvancedEstimator for F
where
    F: Fn(&str, &IncomeHistory) -> Result<Money> + Send + Sync,
{
    fn capital_charge(&self, scope: &str, income: &IncomeHistory) -> Result<Money> {
        self(scope, income)
    }
}

#[derive(Clone, Default)]
pub struct EstimatorRegistry {
    estimators: BTreeMap<String, Arc<dyn AdvancedEstimator>>,
}

impl fmt::Debug for EstimatorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.estimators.keys()).finish()
    }
}

impl EstimatorRegistry {
    pub fn register(&mut self, name: &str, estimator: Arc<dyn AdvancedEstimator>) {
        self.estimators.insert(name.to_owned(), estimator);
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn AdvancedEstimator>> {
        self.estimators
            .get(name)
            .ok_or_else(|| Error::UnregisteredAdvancedHook(name.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScopeDetail {
    Basic { average_income: GrossIncome },
    Standardized(TsaCharge),
    Advanced,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeCharge {
    pub scope: String,
    pub approach: OpRiskApproach,
    pub charge: Money,
    pub detail: ScopeDetail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpRiskCharge {
    pub scopes: Vec<ScopeCharge>,
    pub total: Money,
}

/// Inputs for [`oprisk_capital`] besides the assignment.
#[derive(Debug, Clone, Default)]
pub struct OpRiskSettings {
    pub betas: BetaTable,
    pub negative_income: NegativeIncomePolicy,
    pub estimators: EstimatorRegistry,
}

/// Dispatches each scope to its approach and sums the scope charges.
pub fn oprisk_capital(
    assignment: &ApproachAssignment,
    data: &BTreeMap<String, IncomeHistory>,
    settings: &OpRiskSettings,
    currency: Currency,
) -> Result<OpRiskCharge> {
    let mut scopes = Vec::with_capacity(assignment.scopes().len());
    for s in assignment.scopes() {
        let history = data
            .get(&s.scope)
            .ok_or_else(|| Error::MissingScopeData(s.scope.clone()))?;
        let (charge, detail) = match &s.approach {
            OpRiskApproach::BasicIndicator => {
                let gi = average_gross_income(history, settings.negative_income)?;
                (bia_capital(&gi), ScopeDetail::Basic { average_income: gi })
            }
            OpRiskApproach::Standardized => {
                let tsa = tsa_capital(history, &settings.betas, settings.negative_income)?;
                (tsa.total, ScopeDetail::Standardized(tsa))
            }
            OpRiskApproach::AdvancedHook(name) => {
                let k = settings
                    .estimators
                    .get(name)?
                    .capital_charge(&s.scope, history)?;
                if k.is_negative() {
                    return Err(Error::Invalid(format!(
                        "advanced estimator {name:?} returned a negative charge"
                    )));
                }
                (k.round_minor(), ScopeDetail::Advanced)
            }
        };
        scopes.push(ScopeCharge {
            scope: s.scope.clone(),
            approach: s.approach.clone(),
            charge,
            detail,
        });
    }
    let total = Money::sum(currency, scopes.iter().map(|s| s.charge))?;
    Ok(OpRiskCharge { scopes, total })
}
