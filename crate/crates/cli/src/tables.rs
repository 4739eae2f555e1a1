//! Loadable schema for the risk-weight, CCF and β tables.
//!
//! `dump_*` writes a table in the same format `parse_*` reads, so
//! `parse(dump(t)) == t`. A table's version is a short SHA-256 of its dump.

use std::fmt::Write as _;
use std::str::FromStr;

use basel_core::model::{CounterpartyClass, OffBalanceCategory, RatingBucket};
use basel_core::oprisk::{BetaTable, BusinessLine};
use basel_core::standardized::{CcfTable, RiskWeightTable, WeightCell};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::input::{parse_decimal, Sheet};

pub const RISK_WEIGHTS_FILE: &str = "risk_weights.csv";
pub const CCF_FILE: &str = "ccf.csv";
pub const BETAS_FILE: &str = "betas.csv";

pub fn dump_risk_weights(t: &RiskWeightTable) -> String {
    let mut out = String::from(
        "# weight is a fraction; low..high marks a range cell resolved by bank_option\n\
         class,bucket,weight\n",
    );
    for (class, bucket, cell) in t.cells() {
        writeln!(out, "{},{},{}", class.key(), bucket.key(), cell).unwrap();
    }
    out
}

pub fn parse_risk_weights(source: &str, text: &str) -> Result<RiskWeightTable> {
    let sheet = Sheet::parse(source, text, &["class", "bucket", "weight"], &[])?;
    let mut t = RiskWeightTable::empty();
    for row in sheet.rows() {
        let class = CounterpartyClass::from_str(row.require("class")?)
            .map_err(|e| row.error("class", e.to_string()))?;
        let bucket = RatingBucket::from_key(row.require("bucket")?)
            .map_err(|e| row.error("bucket", e.to_string()))?;
        let cell = WeightCell::from_str(row.require("weight")?)
            .map_err(|e| row.error("weight", e.to_string()))?;
        if t.cell(class, bucket).is_some() {
            return Err(row.error("bucket", format!("cell {class}/{bucket} given twice")));
        }
        t.set(class, bucket, cell)
            .map_err(|e| row.error("weight", e.to_string()))?;
    }
    Ok(t)
}

pub fn dump_ccf(t: &CcfTable) -> String {
    let mut out = String::from("# factor is a fraction in [0, 1]\ncategory,factor\n");
    for (category, factor) in t.entries() {
        writeln!(out, "{category},{factor}").unwrap();
    }
    out
}

pub fn parse_ccf(source: &str, text: &str) -> Result<CcfTable> {
    let sheet = Sheet::parse(source, text, &["category", "factor"], &[])?;
    let mut t = CcfTable::empty();
    for row in sheet.rows() {
        let category = OffBalanceCategory::new(row.require("category")?)
            .map_err(|e| row.error("category", e.to_string()))?;
        let factor = parse_decimal(row.require("factor")?).map_err(|e| row.error("factor", e))?;
        if t.factor(&category).is_ok() {
            return Err(row.error("category", format!("{category} given twice")));
        }
        t.set(category, factor)
            .map_err(|e| row.error("factor", e.to_string()))?;
    }
    Ok(t)
}

pub fn dump_betas(t: &BetaTable) -> String {
    let mut out = String::from(
        "# beta is a fraction applied to the line's average gross income\nline,beta\n",
    );
    for (line, beta) in t.entries() {
        writeln!(out, "{line},{beta}").unwrap();
    }
    out
}

/// Every business line must appear exactly once.
pub fn parse_betas(source: &str, text: &str) -> Result<BetaTable> {
    let sheet = Sheet::parse(source, text, &["line", "beta"], &[])?;
    let mut t = BetaTable::basel_default();
    let mut seen = Vec::new();
    for row in sheet.rows() {
        let line = BusinessLine::from_str(row.require("line")?)
            .map_err(|e| row.error("line", e.to_string()))?;
        if seen.contains(&line) {
            return Err(row.error("line", format!("{line} given twice")));
        }
        seen.push(line);
        let beta = parse_decimal(row.require("beta")?).map_err(|e| row.error("beta", e))?;
        t.set(line, beta)
            .map_err(|e| row.error("beta", e.to_string()))?;
    }
    let missing: Vec<_> = BusinessLine::ALL
        .into_iter()
        .filter(|l| !seen.contains(l))
        .map(BusinessLine::key)
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Parse {
            source_name: source.to_owned(),
            line: 1,
            column: "line".into(),
            reason: format!("missing business lines: {}", missing.join(", ")),
        });
    }
    Ok(t)
}

/// First 12 hex digits of the SHA-256 of `dump`.
pub fn version(dump: &str) -> String {
    let digest = Sha256::digest(dump.as_bytes());
    digest[..6].iter().map(|b| format!("{b:02x}")).collect()
}
