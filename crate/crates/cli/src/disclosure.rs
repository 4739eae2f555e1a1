//! Half-yearly public disclosure document.
//!
//! Sections: scope of application, capital level and structure, exposure and
//! capital per risk, methods per risk, and the configuration echo. Further
//! sections can be appended without disturbing the existing ones.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use basel_core::aggregation::MINIMUM_RATIO;
use basel_core::model::CounterpartyClass;
use basel_core::Money;

use crate::config::{CreditApproach, Regime};
use crate::error::{CliError, Result};
use crate::report::{config_echo, grouped, percent_of, ratio, Text};
use crate::run::ComputeOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    H1,
    H2,
}

/// A half-year, written `YYYY-H1` or `YYYY-H2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Period {
    pub year: u16,
    pub half: Half,
}

impl Period {
    pub fn start(&self) -> String {
        match self.half {
            Half::H1 => format!("{}-01-01", self.year),
            Half::H2 => format!("{}-07-01", self.year),
        }
    }

    pub fn end(&self) -> String {
        match self.half {
            Half::H1 => format!("{}-06-30", self.year),
            Half::H2 => format!("{}-12-31", self.year),
        }
    }
}

impl FromStr for Period {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Period> {
        let bad = || {
            CliError::Config(format!(
                "period {s:?} is not of the form YYYY-H1 or YYYY-H2"
            ))
        };
        let (year, half) = s.trim().split_once("-H").ok_or_else(bad)?;
        if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let half = match half {
            "1" => Half::H1,
            "2" => Half::H2,
            _ => return Err(bad()),
        };
        Ok(Period {
            year: year.parse().map_err(|_| bad())?,
            half,
        })
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = match self.half {
            Half::H1 => 1,
            Half::H2 => 2,
        };
        write!(f, "{}-H{h}", self.year)
    }
}

/// Resolves the period from an explicit argument or the configuration.
pub fn period(explicit: Option<&str>, o: &ComputeOutcome) -> Result<Period> {
    explicit
        .or(o.config.period.as_deref())
        .ok_or(CliError::MissingPeriod)?
        .parse()
}

struct ClassTotals {
    exposure: Money,
    rwa: Money,
}

fn by_class(o: &ComputeOutcome) -> Result<BTreeMap<CounterpartyClass, ClassTotals>> {
    let currency = o.config.currency;
    let mut out: BTreeMap<CounterpartyClass, ClassTotals> = BTreeMap::new();
    for (e, l) in o.portfolio.exposures().iter().zip(&o.credit.rwa.lines) {
        let entry = out.entry(e.class).or_insert(ClassTotals {
            exposure: Money::zero(currency),
            rwa: Money::zero(currency),
        });
        let add = |a: Money, b: Money| a.checked_add(b).map_err(CliError::engine("core_model"));
        entry.exposure = add(entry.exposure, e.nominal)?;
        entry.rwa = add(entry.rwa, l.risk_weighted)?;
    }
    Ok(out)
}

pub fn run_disclose(o: &ComputeOutcome, explicit_period: Option<&str>) -> Result<String> {
    let period = period(explicit_period, o)?;
    let cfg = &o.config;
    let r = &o.report;
    let mut t = Text::new();
    t.line("PUBLIC DISCLOSURE");
    t.line("=================");
    t.field(
        "Reporting period",
        format!("{period} ({} to {})", period.start(), period.end()),
    );
    t.field("Frequency", "semiannual");
    t.field("Regime", o.regime);
    t.field("Currency", cfg.currency);

    t.heading("1. SCOPE OF APPLICATION");
    t.field("Consolidation scope", &cfg.scope_of_application);

    t.heading("2. CAPITAL LEVEL AND STRUCTURE");
    t.field("Total own funds", grouped(r.capital.total()));
    match (r.capital.tier1(), r.capital.tier2()) {
        (Some(t1), Some(t2)) => {
            t.field("Tier 1", grouped(t1));
            t.field("Tier 2", grouped(t2));
        }
        _ => t.field("Tier split", "not reported"),
    }

    t.heading("3. CREDIT RISK");
    match o.credit.approach {
        CreditApproach::Standardized => t.field(
            "Method",
            format!(
                "standardized, external ratings (bank option {})",
                cfg.bank_option
            ),
        ),
        CreditApproach::Irb(_) => t.field(
            "Method",
            format!(
                "{} (weight function {})",
                o.credit.approach, cfg.irb_function
            ),
        ),
    }
    let rows: Vec<Vec<String>> = by_class(o)?
        .into_iter()
        .map(|(class, totals)| {
            vec![
                class.key().to_owned(),
                grouped(totals.exposure),
                grouped(totals.rwa),
                grouped(totals.rwa.scale(MINIMUM_RATIO)),
            ]
        })
        .collect();
    t.table(1, &["class", "exposure", "rwa", "capital at 8%"], &rows);
    t.field("Credit RWA", grouped(r.blocks.credit));
    t.field(
        "Credit capital at 8%",
        grouped(r.blocks.credit.scale(MINIMUM_RATIO)),
    );

    if o.regime == Regime::Basel2 {
        t.heading("4. MARKET RISK");
        t.field("Method", "capital charge supplied as input");
        t.field("Capital charge", grouped(r.inputs.market_capital_charge()));
        t.field("RWA equivalent", grouped(r.blocks.market));

        if let Some(k) = &o.oprisk {
            t.heading("5. OPERATIONAL RISK");
            for s in &k.scopes {
                t.field(&format!("Method ({})", s.scope), &s.approach);
                t.field(&format!("Capital charge ({})", s.scope), grouped(s.charge));
            }
            t.field("Negative income policy", cfg.negative_income);
            t.field("Capital charge", grouped(k.total));
            t.field("RWA equivalent", grouped(r.blocks.operational));
        }
    }

    t.heading("CAPITAL ADEQUACY");
    t.field("Denominator", grouped(r.denominator));
    t.field("Cooke ratio", ratio(r.cooke_ratio.as_ref()));
    if o.regime == Regime::Basel2 {
        t.field("McDonough ratio", ratio(r.mcdonough_ratio.as_ref()));
        t.field("Minimum ratio", percent_of(r.adjustment.minimum_ratio()));
    }
    t.field("Minimum required", grouped(r.min_required));
    t.field("Surplus", grouped(r.surplus));
    t.field("Compliant", if o.compliant() { "yes" } else { "no" });

    t.heading("CONFIGURATION");
    for (k, v) in config_echo(cfg, o.regime, &o.input_digests) {
        t.field(&k, v);
    }
    Ok(t.finish())
}
