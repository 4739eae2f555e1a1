//! Engine configuration: a TOML file whose keys can each be overridden by a
//! command-line flag.
//!
//! Relative paths inside the file are resolved against the file's directory;
//! paths given as flags are used as-is.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use basel_core::aggregation::{SupervisoryAdjustment, MINIMUM_RATIO};
use basel_core::irb::{IrbMode, CONSTANT_FUNCTION};
use basel_core::model::CapitalBase;
use basel_core::oprisk::{
    ApproachAssignment, BetaTable, NegativeIncomePolicy, OpRiskApproach, ScopeAssignment,
    DEFAULT_SCOPE,
};
use basel_core::standardized::{BankOptionPolicy, CcfTable, RiskWeightTable};
use basel_core::{Currency, Money};
use rust_decimal::Decimal;
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::input::{parse_amount, parse_decimal, read};
use crate::tables;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "BASEL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Credit risk only, Cooke ratio.
    Basel1,
    /// Credit, market and operational risk, McDonough ratio.
    Basel2,
}

impl Regime {
    pub fn key(self) -> &'static str {
        match self {
            Regime::Basel1 => "basel1",
            Regime::Basel2 => "basel2",
        }
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "basel1" => Ok(Regime::Basel1),
            "basel2" => Ok(Regime::Basel2),
            _ => Err(format!("unknown regime {s:?} (basel1, basel2)")),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CreditApproach {
    Standardized,
    Irb(IrbMode),
}

impl CreditApproach {
    pub fn key(self) -> &'static str {
        match self {
            CreditApproach::Standardized => "standardized",
            CreditApproach::Irb(IrbMode::Foundation) => "irb_foundation",
            CreditApproach::Irb(IrbMode::Advanced) => "irb_advanced",
        }
    }
}

impl FromStr for CreditApproach {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standardized" => Ok(CreditApproach::Standardized),
            "irb_foundation" => Ok(CreditApproach::Irb(IrbMode::Foundation)),
            "irb_advanced" => Ok(CreditApproach::Irb(IrbMode::Advanced)),
            _ => Err(format!(
                "unknown credit approach {s:?} (standardized, irb_foundation, irb_advanced)"
            )),
        }
    }
}

impl fmt::Display for CreditApproach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// A number in the config file: a string, integer or float literal. Strings
/// are preferred for money since they keep every digit.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Number {
    fn text(&self) -> String {
        match self {
            Number::Text(s) => s.trim().to_owned(),
            Number::Int(i) => i.to_string(),
            Number::Float(f) => f.to_string(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    regime: Option<String>,
    currency: Option<String>,
    #[serde(default)]
    inputs: InputsSection,
    #[serde(default)]
    credit: CreditSection,
    #[serde(default)]
    irb: IrbSection,
    #[serde(default)]
    oprisk: OpriskSection,
    #[serde(default)]
    market: MarketSection,
    #[serde(default)]
    capital: CapitalSection,
    #[serde(default)]
    pillar2: Pillar2Section,
    #[serde(default)]
    disclosure: DisclosureSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputsSection {
    portfolio: Option<String>,
    income: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreditSection {
    approach: Option<String>,
    bank_option: Option<String>,
    risk_weights: Option<String>,
    ccf: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrbSection {
    function: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpriskSection {
    approach: Option<String>,
    previous: Option<String>,
    negative_income: Option<String>,
    betas: Option<String>,
    supervisory_override: Option<bool>,
    #[serde(default)]
    scopes: Vec<ScopeSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScopeSection {
    name: String,
    approach: String,
    previous: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketSection {
    capital_charge: Option<Number>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CapitalSection {
    own_funds: Option<Number>,
    tier1: Option<Number>,
    tier2: Option<Number>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Pillar2Section {
    minimum_ratio: Option<Number>,
    add_on: Option<Number>,
    justification: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DisclosureSection {
    period: Option<String>,
    scope_of_application: Option<String>,
}

/// Flag values; each one replaces the matching config-file key.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Config file (TOML).
    #[arg(long, env = CONFIG_ENV, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Exposure file (CSV).
    #[arg(long, value_name = "FILE")]
    pub portfolio: Option<PathBuf>,
    /// Income-statement file (CSV).
    #[arg(long, value_name = "FILE")]
    pub income: Option<PathBuf>,
    /// basel1 or basel2.
    #[arg(long)]
    pub regime: Option<String>,
    /// Reporting currency (ISO code).
    #[arg(long)]
    pub currency: Option<String>,
    /// standardized, irb_foundation or irb_advanced.
    #[arg(long)]
    pub credit_approach: Option<String>,
    /// low_end or high_end.
    #[arg(long)]
    pub bank_option: Option<String>,
    /// Risk-weight table override (CSV).
    #[arg(long, value_name = "FILE")]
    pub risk_weights: Option<PathBuf>,
    /// Credit-conversion-factor table override (CSV).
    #[arg(long, value_name = "FILE")]
    pub ccf: Option<PathBuf>,
    /// Registered IRB weight function.
    #[arg(long)]
    pub irb_function: Option<String>,
    /// basic_indicator, standardized or advanced:<estimator>, for the whole bank.
    #[arg(long)]
    pub oprisk_approach: Option<String>,
    /// exclude_negative_years or include_all.
    #[arg(long)]
    pub negative_income: Option<String>,
    /// β table override (CSV).
    #[arg(long, value_name = "FILE")]
    pub betas: Option<PathBuf>,
    /// Allow a scope to move to a simpler operational-risk approach.
    #[arg(long)]
    pub supervisory_override: bool,
    /// Market-risk capital charge.
    #[arg(long, value_name = "AMOUNT")]
    pub market_charge: Option<String>,
    /// Total own funds.
    #[arg(long, value_name = "AMOUNT")]
    pub own_funds: Option<String>,
    #[arg(long, value_name = "AMOUNT")]
    pub tier1: Option<String>,
    #[arg(long, value_name = "AMOUNT")]
    pub tier2: Option<String>,
    /// Pillar 2 minimum ratio (at least 0.08).
    #[arg(long, value_name = "FRACTION")]
    pub min_ratio: Option<String>,
    /// Pillar 2 capital add-on.
    #[arg(long, value_name = "AMOUNT")]
    pub add_on: Option<String>,
    /// Half-year disclosure period, e.g. 2006-H2.
    #[arg(long)]
    pub period: Option<String>,
}

/// Where a table came from and the digest of its loadable form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableInfo {
    pub source: String,
    pub version: String,
}

#[derive(Debug, Clone)]
pub struct Tables {
    pub weights: RiskWeightTable,
    pub ccf: CcfTable,
    pub betas: BetaTable,
    pub weights_info: TableInfo,
    pub ccf_info: TableInfo,
    pub betas_info: TableInfo,
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub regime: Regime,
    pub currency: Currency,
    pub credit: CreditApproach,
    pub bank_option: BankOptionPolicy,
    pub irb_function: String,
    /// `None` when no operational-risk approach is configured.
    pub oprisk: Option<ApproachAssignment>,
    pub negative_income: NegativeIncomePolicy,
    pub tables: Tables,
    pub market_charge: Money,
    pub capital: Option<CapitalBase>,
    pub pillar2: SupervisoryAdjustment,
    pub period: Option<String>,
    pub scope_of_application: String,
    pub portfolio: Option<PathBuf>,
    pub income: Option<PathBuf>,
}

pub const DEFAULT_SCOPE_OF_APPLICATION: &str = "single entity, unconsolidated";

fn config_err(key: &str, reason: impl fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {reason}"))
}

fn parse_key<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| config_err(key, e))
}

/// A path from the file (resolved against `base`) or a flag (as given),
/// with the text used in reports.
struct PathSetting {
    path: PathBuf,
    label: String,
}

fn pick_path(flag: &Option<PathBuf>, file: &Option<String>, base: &Path) -> Option<PathSetting> {
    match (flag, file) {
        (Some(p), _) => Some(PathSetting {
            path: p.clone(),
            label: p.display().to_string(),
        }),
        (None, Some(s)) => Some(PathSetting {
            path: base.join(s),
            label: s.clone(),
        }),
        (None, None) => None,
    }
}

fn pick<'a>(flag: &'a Option<String>, file: &'a Option<String>) -> Option<&'a str> {
    flag.as_deref().or(file.as_deref())
}

fn pick_number(flag: &Option<String>, file: &Option<Number>) -> Option<String> {
    flag.clone().or_else(|| file.as_ref().map(Number::text))
}

fn money(key: &str, text: Option<String>, currency: Currency) -> Result<Option<Money>> {
    text.map(|t| {
        parse_amount(&t)
            .map(|d| Money::new(d, currency))
            .map_err(|e| config_err(key, e))
    })
    .transpose()
}

fn load_table<T>(
    setting: Option<PathSetting>,
    default: T,
    parse: fn(&str, &str) -> Result<T>,
    dump: fn(&T) -> String,
) -> Result<(T, TableInfo)> {
    let (table, source) = match setting {
        Some(s) => {
            let text = read(&s.path)?;
            (parse(&s.path.display().to_string(), &text)?, s.label)
        }
        None => (default, "built-in".to_owned()),
    };
    let version = tables::version(&dump(&table));
    Ok((table, TableInfo { source, version }))
}

fn approach(key: &str, s: &str) -> Result<OpRiskApproach> {
    parse_key(key, s)
}

impl EngineConfig {
    /// Reads the config file named by `overrides.config` (if any) and applies
    /// the flag overrides on top.
    pub fn load(overrides: &Overrides) -> Result<EngineConfig> {
        let (file, base) = match &overrides.config {
            Some(path) => {
                let text = read(path)?;
                let file: FileConfig = toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (file, base)
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        EngineConfig::resolve(file, &base, overrides)
    }

    /// Builds a config from TOML text, with relative paths against `base`.
    pub fn from_toml(text: &str, base: &Path, overrides: &Overrides) -> Result<EngineConfig> {
        let file: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        EngineConfig::resolve(file, base, overrides)
    }

    fn resolve(file: FileConfig, base: &Path, o: &Overrides) -> Result<EngineConfig> {
        let regime = match pick(&o.regime, &file.regime) {
            Some(s) => parse_key("regime", s)?,
            None => Regime::Basel2,
        };
        let currency: Currency = match pick(&o.currency, &file.currency) {
            Some(s) => parse_key("currency", s)?,
            None => Currency::EUR,
        };
        let credit = match pick(&o.credit_approach, &file.credit.approach) {
            Some(s) => parse_key("credit.approach", s)?,
            None => CreditApproach::Standardized,
        };
        let bank_option = match pick(&o.bank_option, &file.credit.bank_option) {
            Some(s) => parse_key("credit.bank_option", s)?,
            None => BankOptionPolicy::default(),
        };
        let irb_function = pick(&o.irb_function, &file.irb.function)
            .unwrap_or(CONSTANT_FUNCTION)
            .to_owned();
        let negative_income = match pick(&o.negative_income, &file.oprisk.negative_income) {
            Some(s) => parse_key("oprisk.negative_income", s)?,
            None => NegativeIncomePolicy::default(),
        };

        let supervisory_override =
            o.supervisory_override || file.oprisk.supervisory_override.unwrap_or(false);
        let oprisk = match (
            &o.oprisk_approach,
            &file.oprisk.approach,
            &file.oprisk.scopes[..],
        ) {
            (Some(a), _, _) => Some(vec![ScopeAssignment {
                scope: DEFAULT_SCOPE.to_owned(),
                approach: approach("oprisk.approach", a)?,
                previous: None,
            }]),
            (None, Some(_), [_, ..]) => {
                return Err(config_err(
                    "oprisk",
                    "give either `approach` or `[[oprisk.scopes]]`, not both",
                ))
            }
            (None, Some(a), []) => Some(vec![ScopeAssignment {
                scope: DEFAULT_SCOPE.to_owned(),
                approach: approach("oprisk.approach", a)?,
                previous: file
                    .oprisk
                    .previous
                    .as_deref()
                    .map(|p| approach("oprisk.previous", p))
                    .transpose()?,
            }]),
            (None, None, []) => None,
            (None, None, scopes) => Some(
                scopes
                    .iter()
                    .map(|s| {
                        Ok(ScopeAssignment {
                            scope: s.name.clone(),
                            approach: approach("oprisk.scopes.approach", &s.approach)?,
                            previous: s
                                .previous
                                .as_deref()
                                .map(|p| approach("oprisk.scopes.previous", p))
                                .transpose()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
        .map(|scopes| {
            ApproachAssignment::new(scopes, supervisory_override)
                .map_err(CliError::engine("operational_risk"))
        })
        .transpose()?;

        let (weights, weights_info) = load_table(
            pick_path(&o.risk_weights, &file.credit.risk_weights, base),
            RiskWeightTable::basel_default(),
            tables::parse_risk_weights,
            tables::dump_risk_weights,
        )?;
        let (ccf, ccf_info) = load_table(
            pick_path(&o.ccf, &file.credit.ccf, base),
            CcfTable::basel_default(),
            tables::parse_ccf,
            tables::dump_ccf,
        )?;
        let (betas, betas_info) = load_table(
            pick_path(&o.betas, &file.oprisk.betas, base),
            BetaTable::basel_default(),
            tables::parse_betas,
            tables::dump_betas,
        )?;

        let market_charge = money(
            "market.capital_charge",
            pick_number(&o.market_charge, &file.market.capital_charge),
            currency,
        )?
        .unwrap_or_else(|| Money::zero(currency));

        let own_funds = money(
            "capital.own_funds",
            pick_number(&o.own_funds, &file.capital.own_funds),
            currency,
        )?;
        let tier1 = money(
            "capital.tier1",
            pick_number(&o.tier1, &file.capital.tier1),
            currency,
        )?;
        let tier2 = money(
            "capital.tier2",
            pick_number(&o.tier2, &file.capital.tier2),
            currency,
        )?;
        let capital = match (own_funds, tier1, tier2) {
            (None, None, None) => None,
            (None, _, _) => {
                return Err(config_err("capital", "tiers given without own_funds"));
            }
            (Some(total), None, None) => Some(CapitalBase::new(total)),
            (Some(total), Some(t1), Some(t2)) => Some(CapitalBase::with_tiers(total, t1, t2)),
            (Some(_), _, _) => {
                return Err(config_err(
                    "capital",
                    "give both tier1 and tier2, or neither",
                ));
            }
        }
        .transpose()
        .map_err(CliError::engine("core_model"))?;

        let min_ratio = pick_number(&o.min_ratio, &file.pillar2.minimum_ratio)
            .map(|t| parse_decimal(&t).map_err(|e| config_err("pillar2.minimum_ratio", e)))
            .transpose()?
            .unwrap_or(MINIMUM_RATIO);
        let add_on = money(
            "pillar2.add_on",
            pick_number(&o.add_on, &file.pillar2.add_on),
            currency,
        )?
        .map_or(Decimal::ZERO, |m| m.amount());
        let pillar2 = SupervisoryAdjustment::new(
            min_ratio,
            add_on,
            file.pillar2.justification.unwrap_or_default(),
        )
        .map_err(CliError::engine("capital_aggregation"))?;

        Ok(EngineConfig {
            regime,
            currency,
            credit,
            bank_option,
            irb_function,
            oprisk,
            negative_income,
            tables: Tables {
                weights,
                ccf,
                betas,
                weights_info,
                ccf_info,
                betas_info,
            },
            market_charge,
            capital,
            pillar2,
            period: pick(&o.period, &file.disclosure.period).map(str::to_owned),
            scope_of_application: file
                .disclosure
                .scope_of_application
                .unwrap_or_else(|| DEFAULT_SCOPE_OF_APPLICATION.to_owned()),
            portfolio: pick_path(&o.portfolio, &file.inputs.portfolio, base).map(|p| p.path),
            income: pick_path(&o.income, &file.inputs.income, base).map(|p| p.path),
        })
    }

    /// Checks the settings that the given regime forbids or requires.
    pub fn check(&self, regime: Regime) -> Result<()> {
        match regime {
            Regime::Basel1 => {
                let forbid = |what: &str| {
                    Err(CliError::Config(format!(
                        "regime basel1 is credit-only and does not accept {what}"
                    )))
                };
                if self.oprisk.is_some() {
                    return forbid("an operational-risk approach");
                }
                if !self.market_charge.is_zero() {
                    return forbid("a market-risk charge");
                }
                if !self.pillar2.is_neutral() {
                    return forbid("a Pillar 2 adjustment");
                }
                if self.credit != CreditApproach::Standardized {
                    return forbid("an internal-ratings credit approach");
                }
            }
            Regime::Basel2 => {
                if self.oprisk.is_none() {
                    return Err(CliError::Config(
                        "regime basel2 requires an operational-risk approach (oprisk.approach)"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn capital(&self) -> Result<CapitalBase> {
        self.capital
            .ok_or_else(|| CliError::Config("capital.own_funds is required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rust_decimal_macros::dec;

    fn cfg(text: &str) -> Result<EngineConfig> {
        EngineConfig::from_toml(text, Path::new("."), &Overrides::default())
    }

    #[test]
    fn defaults() {
        let c = cfg("").unwrap();
        assert_eq!(c.regime, Regime::Basel2);
        assert_eq!(c.currency, Currency::EUR);
        assert_eq!(c.credit, CreditApproach::Standardized);
        assert_eq!(c.bank_option, BankOptionPolicy::LowEnd);
        assert!(c.oprisk.is_none());
        assert!(c.pillar2.is_neutral());
        assert_eq!(c.tables.weights_info.source, "built-in");
        assert!(c.check(Regime::Basel2).is_err());
        assert!(c.check(Regime::Basel1).is_ok());
    }

    #[test]
    fn flags_override_file() {
        let o = Overrides {
            regime: Some("basel1".into()),
            own_funds: Some("5".into()),
            ..Overrides::default()
        };
        let c = EngineConfig::from_toml(
            "regime = \"basel2\"\n[capital]\nown_funds = \"80000.00\"\n",
            Path::new("."),
            &o,
        )
        .unwrap();
        assert_eq!(c.regime, Regime::Basel1);
        assert_eq!(c.capital().unwrap().total().amount(), dec!(5));
    }

    #[test]
    fn numbers_in_any_literal_form() {
        let c = cfg("[capital]\nown_funds = 80000\n[market]\ncapital_charge = 16.5\n").unwrap();
        assert_eq!(c.capital().unwrap().total().amount(), dec!(80000));
        assert_eq!(c.market_charge.amount(), dec!(16.5));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(cfg("[credit]\napproch = \"standardized\"\n").is_err());
        assert!(cfg("colour = 1\n").is_err());
    }

    #[test]
    fn basel1_rejects_basel2_blocks() {
        for extra in [
            "[oprisk]\napproach = \"basic_indicator\"\n",
            "[market]\ncapital_charge = \"1\"\n",
            "[pillar2]\nminimum_ratio = \"0.10\"\n",
            "[credit]\napproach = \"irb_foundation\"\n",
        ] {
            let c = cfg(&format!("regime = \"basel1\"\n{extra}")).unwrap();
            assert!(c.check(Regime::Basel1).is_err(), "{extra}");
        }
    }

    #[test]
    fn scopes_and_downgrade() {
        let text = "[[oprisk.scopes]]\nname = \"retail\"\napproach = \"basic_indicator\"\nprevious = \"standardized\"\n";
        let err = cfg(text).unwrap_err();
        assert!(matches!(
            err,
            CliError::Engine {
                source: basel_core::Error::DowngradeWithoutOverride { .. },
                ..
            }
        ));
        let c = cfg(&format!("[oprisk]\nsupervisory_override = true\n{text}")).unwrap();
        assert_eq!(c.oprisk.unwrap().scopes()[0].scope, "retail");
    }

    #[test]
    fn approach_and_scopes_are_exclusive() {
        let text = "[oprisk]\napproach = \"standardized\"\n[[oprisk.scopes]]\nname = \"a\"\napproach = \"standardized\"\n";
        assert!(cfg(text).is_err());
    }

    #[test]
    fn tiers_must_add_up() {
        assert!(cfg("[capital]\nown_funds = \"10\"\ntier1 = \"6\"\ntier2 = \"4\"\n").is_ok());
        assert!(cfg("[capital]\nown_funds = \"10\"\ntier1 = \"6\"\ntier2 = \"3\"\n").is_err());
        assert!(cfg("[capital]\nown_funds = \"10\"\ntier1 = \"6\"\n").is_err());
    }

    #[test]
    fn pillar2_below_floor_rejected() {
        assert!(cfg("[pillar2]\nminimum_ratio = \"0.07\"\n").is_err());
    }
}
