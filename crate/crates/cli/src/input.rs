//! Portfolio and income-statement files.
//!
//! Both are comma-separated with a mandatory header row. Column order is
//! free, unknown columns are rejected, blank lines and lines starting with `#`
//! are skipped, and amounts use `.` as the decimal separator with at most two
//! decimals. Line numbers in errors count the header as line 1.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use basel_core::model::{
    parse_rating, validate_portfolio, CounterpartyClass, Exposure, IrbInputs, OffBalanceCategory,
    Portfolio, MINOR_UNIT_SCALE,
};
use basel_core::oprisk::{BusinessLine, IncomeEntry, IncomeHistory, YearRecord, DEFAULT_SCOPE};
use basel_core::{Currency, Money};
use rust_decimal::Decimal;

use crate::error::{CliError, Result};

pub const PORTFOLIO_REQUIRED: [&str; 5] = ["id", "class", "rating", "nominal", "position"];
pub const PORTFOLIO_OPTIONAL: [&str; 6] = [
    "off_balance_category",
    "short_term_flag",
    "pd",
    "lgd",
    "ead",
    "maturity",
];

pub const INCOME_REQUIRED: [&str; 3] = ["year", "line", "amount"];
pub const INCOME_OPTIONAL: [&str; 5] = [
    "scope",
    "provisions",
    "realized_banking_book",
    "extraordinary",
    "insurance",
];

/// Row key for the firm-wide total in income files.
pub const TOTAL_LINE: &str = "total";

/// A parsed CSV with column positions resolved against a schema.
pub(crate) struct Sheet {
    source: String,
    columns: BTreeMap<String, usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

pub(crate) struct Row<'a> {
    sheet: &'a Sheet,
    line: u64,
    record: &'a csv::StringRecord,
}

impl Sheet {
    pub(crate) fn parse(
        source: &str,
        text: &str,
        required: &[&str],
        optional: &[&str],
    ) -> Result<Sheet> {
        // drop blank and comment lines, remembering where the kept ones were
        let mut physical = Vec::new();
        let mut kept = String::with_capacity(text.len());
        for (i, l) in text.lines().enumerate() {
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                physical.push(i as u64 + 1);
                kept.push_str(l);
                kept.push('\n');
            }
        }
        let at = |line: u64| {
            usize::try_from(line)
                .ok()
                .and_then(|n| physical.get(n.checked_sub(1)?))
                .copied()
                .unwrap_or(line)
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(kept.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| csv_error(source, e, &at))?
            .clone();
        let header_line = at(headers.position().map_or(1, |p| p.line()));
        let header_err = |reason: String| CliError::Parse {
            source_name: source.to_owned(),
            line: header_line,
            column: "header".into(),
            reason,
        };
        if headers.is_empty() || headers.iter().all(str::is_empty) {
            return Err(header_err("header row is missing".into()));
        }
        let mut columns = BTreeMap::new();
        for (i, name) in headers.iter().enumerate() {
            if !required.contains(&name) && !optional.contains(&name) {
                return Err(CliError::Parse {
                    source_name: source.to_owned(),
                    line: header_line,
                    column: name.to_owned(),
                    reason: "unknown column".into(),
                });
            }
            if columns.insert(name.to_owned(), i).is_some() {
                return Err(header_err(format!("column {name:?} appears twice")));
            }
        }
        if let Some(missing) = required.iter().find(|c| !columns.contains_key(**c)) {
            return Err(header_err(format!(
                "required column {missing:?} is missing"
            )));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| csv_error(source, e, &at))?;
            let line = at(record.position().map_or(0, |p| p.line()));
            rows.push((line, record));
        }
        Ok(Sheet {
            source: source.to_owned(),
            columns,
            rows,
        })
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = Row<'_>> {
        self.rows.iter().map(|(line, record)| Row {
            sheet: self,
            line: *line,
            record,
        })
    }
}

impl Row<'_> {
    /// The cell, or `None` when the column is absent or the cell is blank.
    pub(crate) fn get(&self, column: &str) -> Option<&str> {
        let i = *self.sheet.columns.get(column)?;
        self.record.get(i).filter(|s| !s.is_empty())
    }

    pub(crate) fn require(&self, column: &str) -> Result<&str> {
        self.get(column)
            .ok_or_else(|| self.error(column, "value is required"))
    }

    pub(crate) fn error(&self, column: &str, reason: impl Into<String>) -> CliError {
        CliError::Parse {
            source_name: self.sheet.source.clone(),
            line: self.line,
            column: column.to_owned(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse<T>(
        &self,
        column: &str,
        f: impl FnOnce(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<T>> {
        self.get(column)
            .map(|s| f(s).map_err(|reason| self.error(column, reason)))
            .transpose()
    }
}

fn csv_error(source: &str, e: csv::Error, at: &dyn Fn(u64) -> u64) -> CliError {
    let line = at(e.position().map_or(0, |p| p.line()));
    let reason = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} fields, found {len}"),
        csv::ErrorKind::Utf8 { .. } => "input is not valid UTF-8".into(),
        _ => e.to_string(),
    };
    CliError::Parse {
        source_name: source.to_owned(),
        line,
        column: "record".into(),
        reason,
    }
}

/// Plain decimal: optional sign, digits, optional `.` and fraction digits.
pub fn parse_decimal(s: &str) -> std::result::Result<Decimal, String> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if int.is_empty() || !digits(int) || !digits(frac) || (body.contains('.') && frac.is_empty()) {
        return Err(format!("{s:?} is not a decimal number"));
    }
    Decimal::from_str(s).map_err(|e| format!("{s:?}: {e}"))
}

/// Amount in minor units: at most two decimals.
pub fn parse_amount(s: &str) -> std::result::Result<Decimal, String> {
    let d = parse_decimal(s)?;
    if d.scale() > MINOR_UNIT_SCALE {
        return Err(format!(
            "{s:?} has more than {MINOR_UNIT_SCALE} decimal places"
        ));
    }
    Ok(d)
}

/// Fraction written either as a decimal (`0.03`) or a percentage (`3%`).
pub fn parse_fraction(s: &str) -> std::result::Result<Decimal, String> {
    match s.strip_suffix('%') {
        Some(p) => Ok(parse_decimal(p.trim_end())? / Decimal::ONE_HUNDRED),
        None => parse_decimal(s),
    }
}

fn parse_flag(s: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("{s:?} is not a boolean (true/false)")),
    }
}

fn exposure_from_row(row: &Row<'_>, currency: Currency) -> Result<Exposure> {
    let id = row.require("id")?.to_owned();
    let class: CounterpartyClass = row
        .parse("class", |s| {
            s.parse().map_err(|e: basel_core::Error| e.to_string())
        })?
        .ok_or_else(|| row.error("class", "value is required"))?;
    let rating = row.get("rating").ok_or_else(|| {
        row.error(
            "rating",
            "value is required; write `unrated` for unrated counterparties",
        )
    })?;
    let rating = parse_rating(rating).map_err(|e| row.error("rating", e.to_string()))?;
    let nominal = row
        .parse("nominal", parse_amount)?
        .ok_or_else(|| row.error("nominal", "value is required"))?;
    let nominal = Money::new(nominal, currency);
    let category = row.get("off_balance_category");
    let mut exposure = match row.require("position")? {
        "on_balance" => {
            if category.is_some() {
                return Err(row.error(
                    "off_balance_category",
                    "only off_balance positions carry a category",
                ));
            }
            Exposure::on_balance(id, class, rating, nominal)
        }
        "off_balance" => {
            let category = category.ok_or_else(|| {
                row.error("off_balance_category", "required for off_balance positions")
            })?;
            let category = OffBalanceCategory::new(category)
                .map_err(|e| row.error("off_balance_category", e.to_string()))?;
            Exposure::off_balance(id, class, rating, nominal, category)
        }
        other => {
            return Err(row.error(
                "position",
                format!("{other:?} is neither on_balance nor off_balance"),
            ))
        }
    };
    exposure.short_term = row.parse("short_term_flag", parse_flag)?.unwrap_or(false);
    exposure.irb = IrbInputs {
        pd: row.parse("pd", parse_fraction)?,
        lgd: row.parse("lgd", parse_fraction)?,
        ead: row
            .parse("ead", parse_amount)?
            .map(|d| Money::new(d, currency)),
        maturity_years: row.parse("maturity", parse_decimal)?,
    };
    Ok(exposure)
}

pub fn parse_portfolio(source: &str, text: &str, currency: Currency) -> Result<Portfolio> {
    let sheet = Sheet::parse(source, text, &PORTFOLIO_REQUIRED, &PORTFOLIO_OPTIONAL)?;
    let exposures = sheet
        .rows()
        .map(|row| exposure_from_row(&row, currency))
        .collect::<Result<Vec<_>>>()?;
    validate_portfolio(exposures, currency).map_err(CliError::engine("core_model"))
}

pub fn load_portfolio(path: &Path, currency: Currency) -> Result<Portfolio> {
    let text = read(path)?;
    parse_portfolio(&path.display().to_string(), &text, currency)
}

/// Income histories keyed by scope. Rows without a scope belong to
/// [`DEFAULT_SCOPE`].
pub fn parse_income(
    source: &str,
    text: &str,
    currency: Currency,
) -> Result<BTreeMap<String, IncomeHistory>> {
    let sheet = Sheet::parse(source, text, &INCOME_REQUIRED, &INCOME_OPTIONAL)?;
    let mut scopes: BTreeMap<String, BTreeMap<i32, YearRecord>> = BTreeMap::new();
    for row in sheet.rows() {
        let scope = row.get("scope").unwrap_or(DEFAULT_SCOPE).to_owned();
        let year: i32 = row
            .parse("year", |s| {
                s.parse().map_err(|_| format!("{s:?} is not a year"))
            })?
            .ok_or_else(|| row.error("year", "value is required"))?;
        let key = row.require("line")?;
        let amount = |column: &str| Ok(row.parse(column, parse_amount)?.unwrap_or_default());
        let entry = IncomeEntry {
            reported: row
                .parse("amount", parse_amount)?
                .ok_or_else(|| row.error("amount", "value is required"))?,
            exclusions: basel_core::oprisk::Exclusions {
                provisions: amount("provisions")?,
                realized_banking_book: amount("realized_banking_book")?,
                extraordinary: amount("extraordinary")?,
                insurance: amount("insurance")?,
            },
        };
        let record = scopes
            .entry(scope.clone())
            .or_default()
            .entry(year)
            .or_insert_with(|| YearRecord {
                year,
                ..YearRecord::default()
            });
        let duplicate = || row.error("line", format!("{key:?} repeated for {scope} {year}"));
        if key == TOTAL_LINE {
            if record.total.replace(entry).is_some() {
                return Err(duplicate());
            }
        } else {
            let line = BusinessLine::from_str(key).map_err(|e| row.error("line", e.to_string()))?;
            if record.lines.insert(line, entry).is_some() {
                return Err(duplicate());
            }
        }
    }
    scopes
        .into_iter()
        .map(|(scope, years)| {
            let history =
                IncomeHistory::new(currency, years.into_values().collect()).map_err(|e| {
                    CliError::Engine {
                        module: "operational_risk",
                        source: basel_core::Error::Invalid(format!("scope {scope:?}: {e}")),
                    }
                })?;
            Ok((scope, history))
        })
        .collect()
}

pub fn load_income(path: &Path, currency: Currency) -> Result<BTreeMap<String, IncomeHistory>> {
    let text = read(path)?;
    parse_income(&path.display().to_string(), &text, currency)
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(CliError::io(path))
}
