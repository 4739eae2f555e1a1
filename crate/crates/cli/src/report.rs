//! Text and key=value renderings of compute and compare results.
//!
//! Amounts print with minor units, percentages with two decimals; both are
//! rounded here and nowhere earlier.

use std::fmt::Write as _;

use basel_core::aggregation::{CapitalReport, REFERENCE_ALLOCATION};
use basel_core::model::{Exposure, MINOR_UNIT_SCALE};
use basel_core::oprisk::{NegativeIncomePolicy, OpRiskCharge, ScopeDetail};
use basel_core::standardized::CreditRwa;
use basel_core::{Money, Ratio};
use rust_decimal::{Decimal, RoundingStrategy};

use crate::config::{CreditApproach, EngineConfig, Regime};
use crate::run::{CompareOutcome, ComputeOutcome};

const LABEL_WIDTH: usize = 30;

/// `1234567.80`
pub fn plain(m: Money) -> String {
    format!("{:.2}", m.round_minor().amount())
}

/// `1,234,567.80`
pub fn grouped(m: Money) -> String {
    let text = plain(m);
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", text.as_str()),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    let mut out = String::new();
    for (i, c) in int.chars().enumerate() {
        if i > 0 && (int.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    format!("{sign}{out}.{frac}")
}

/// A fraction as a percentage with two decimals: `0.08` → `8.00%`.
pub fn percent_of(f: Decimal) -> String {
    let p = (f * Decimal::ONE_HUNDRED)
        .round_dp_with_strategy(MINOR_UNIT_SCALE, RoundingStrategy::MidpointNearestEven);
    format!("{p:.2}%")
}

pub fn ratio(r: Option<&Ratio>) -> String {
    match r {
        Some(r) => r.to_string(),
        None => "undefined".into(),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub(crate) struct Text(String);

impl Text {
    pub(crate) fn new() -> Self {
        Text(String::new())
    }

    pub(crate) fn heading(&mut self, title: &str) {
        if !self.0.is_empty() {
            self.0.push('\n');
        }
        writeln!(self.0, "{title}\n{}", "-".repeat(title.len())).unwrap();
    }

    pub(crate) fn field(&mut self, label: &str, value: impl std::fmt::Display) {
        writeln!(self.0, "{label:<LABEL_WIDTH$}{value}").unwrap();
    }

    pub(crate) fn line(&mut self, s: impl std::fmt::Display) {
        writeln!(self.0, "{s}").unwrap();
    }

    /// The first `left` columns left-aligned, the rest right-aligned.
    pub(crate) fn table(&mut self, left: usize, header: &[&str], rows: &[Vec<String>]) {
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let fmt_row = |cells: &mut dyn Iterator<Item = &str>| {
            let mut s = String::from("  ");
            for (i, (c, w)) in cells.zip(&widths).enumerate() {
                let sep = if i == 0 { "" } else { "  " };
                if i < left {
                    write!(s, "{sep}{c:<w$}").unwrap();
                } else {
                    write!(s, "{sep}{c:>w$}").unwrap();
                }
            }
            s.trim_end().to_owned()
        };
        self.line(fmt_row(&mut header.iter().copied()));
        for r in rows {
            self.line(fmt_row(&mut r.iter().map(String::as_str)));
        }
    }

    pub(crate) fn finish(self) -> String {
        self.0
    }
}

/// Key=value lines, in insertion order.
pub(crate) struct Kv(String);

impl Kv {
    pub(crate) fn new() -> Self {
        Kv(String::new())
    }

    pub(crate) fn put(&mut self, key: impl std::fmt::Display, value: impl std::fmt::Display) {
        writeln!(self.0, "{key}={value}").unwrap();
    }

    pub(crate) fn finish(self) -> String {
        self.0
    }
}

/// Every setting that influences a figure in the report.
pub fn config_echo(
    cfg: &EngineConfig,
    regime: Regime,
    digests: &[(&str, String)],
) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| out.push((k.to_owned(), v));
    put("regime", regime.key().into());
    put("currency", cfg.currency.to_string());
    put("credit.approach", cfg.credit.key().into());
    match cfg.credit {
        CreditApproach::Standardized => put("credit.bank_option", cfg.bank_option.key().into()),
        CreditApproach::Irb(_) => put("irb.function", cfg.irb_function.clone()),
    }
    let t = &cfg.tables;
    put(
        "tables.risk_weights",
        format!("{} ({})", t.weights_info.source, t.weights_info.version),
    );
    put(
        "tables.ccf",
        format!("{} ({})", t.ccf_info.source, t.ccf_info.version),
    );
    if regime == Regime::Basel2 {
        put(
            "tables.betas",
            format!("{} ({})", t.betas_info.source, t.betas_info.version),
        );
        if let Some(a) = &cfg.oprisk {
            for s in a.scopes() {
                let prev = s
                    .previous
                    .as_ref()
                    .map_or(String::new(), |p| format!(" (previously {p})"));
                put(
                    &format!("oprisk.scope.{}", s.scope),
                    format!("{}{prev}", s.approach),
                );
            }
            put(
                "oprisk.supervisory_override",
                yes_no(a.supervisory_override()).into(),
            );
        }
        put("oprisk.negative_income", cfg.negative_income.key().into());
        put("market.capital_charge", plain(cfg.market_charge));
        put(
            "pillar2.minimum_ratio",
            percent_of(cfg.pillar2.minimum_ratio()),
        );
        put(
            "pillar2.add_on",
            plain(Money::new(cfg.pillar2.add_on(), cfg.currency)),
        );
        if !cfg.pillar2.justification().is_empty() {
            put("pillar2.justification", cfg.pillar2.justification().into());
        }
    }
    for (name, digest) in digests {
        put(&format!("input.{name}"), digest.clone());
    }
    out
}

fn exposure_rows(credit: &CreditRwa, exposures: &[Exposure]) -> Vec<Vec<String>> {
    credit
        .lines
        .iter()
        .zip(exposures)
        .map(|(l, e)| {
            vec![
                l.exposure_id.clone(),
                e.class.key().to_owned(),
                e.rating.key().to_owned(),
                match &e.position {
                    basel_core::model::Position::OnBalance => "on".to_owned(),
                    basel_core::model::Position::OffBalance(c) => c.to_string(),
                },
                grouped(l.nominal),
                percent_of(l.ccf),
                percent_of(l.weight),
                grouped(l.risk_weighted),
            ]
        })
        .collect()
}

fn credit_section(t: &mut Text, o: &ComputeOutcome) {
    let cfg = &o.config;
    t.heading("CREDIT RISK");
    match o.credit.approach {
        CreditApproach::Standardized => t.field(
            "Approach",
            format!("standardized (bank option {})", cfg.bank_option),
        ),
        CreditApproach::Irb(_) => t.field(
            "Approach",
            format!(
                "{} (weight function {})",
                o.credit.approach, cfg.irb_function
            ),
        ),
    }
    t.field("Exposures", o.portfolio.len());
    let amount = match o.credit.approach {
        CreditApproach::Standardized => "nominal",
        CreditApproach::Irb(_) => "ead",
    };
    t.table(
        4,
        &[
            "id", "class", "bucket", "position", amount, "ccf", "weight", "rwa",
        ],
        &exposure_rows(&o.credit.rwa, o.portfolio.exposures()),
    );
    t.field("Credit RWA", grouped(o.credit.rwa.total));
}

fn oprisk_rows(k: &OpRiskCharge) -> Vec<Vec<String>> {
    k.scopes
        .iter()
        .map(|s| vec![s.scope.clone(), s.approach.to_string(), grouped(s.charge)])
        .collect()
}

fn oprisk_section(t: &mut Text, k: &OpRiskCharge) {
    t.heading("OPERATIONAL RISK");
    t.table(2, &["scope", "approach", "charge"], &oprisk_rows(k));
    for s in &k.scopes {
        match &s.detail {
            ScopeDetail::Basic { average_income } => t.line(format!(
                "  {}: average gross income {} over {} year(s), alpha 15.00%",
                s.scope,
                grouped(average_income.to_money()),
                average_income.years_counted()
            )),
            ScopeDetail::Standardized(tsa) => {
                t.line(format!("  {}: business lines", s.scope));
                let rows: Vec<Vec<String>> = tsa
                    .lines
                    .iter()
                    .map(|l| {
                        vec![
                            l.line.key().to_owned(),
                            grouped(l.average_income.to_money()),
                            l.average_income.years_counted().to_string(),
                            percent_of(l.beta),
                            grouped(l.charge),
                        ]
                    })
                    .collect();
                t.table(
                    1,
                    &["line", "average income", "years", "beta", "charge"],
                    &rows,
                );
            }
            ScopeDetail::Advanced => t.line(format!(
                "  {}: charge supplied by the registered estimator",
                s.scope
            )),
        }
    }
    t.field("Operational charge", grouped(k.total));
}

fn adequacy_section(t: &mut Text, r: &CapitalReport, regime: Regime) {
    t.heading("CAPITAL ADEQUACY");
    let blocks = &r.blocks;
    let share = |f: fn(&basel_core::aggregation::RiskBlocks<Ratio>) -> &Ratio| {
        r.shares
            .as_ref()
            .map_or("undefined".to_owned(), |s| f(s).to_string())
    };
    let mut rows = vec![vec![
        "credit".to_owned(),
        grouped(blocks.credit.scale(basel_core::aggregation::MINIMUM_RATIO)),
        grouped(blocks.credit),
        share(|s| &s.credit),
        percent_of(REFERENCE_ALLOCATION.credit),
    ]];
    if regime == Regime::Basel2 {
        rows.push(vec![
            "market".to_owned(),
            grouped(r.inputs.market_capital_charge()),
            grouped(blocks.market),
            share(|s| &s.market),
            percent_of(REFERENCE_ALLOCATION.market),
        ]);
        rows.push(vec![
            "operational".to_owned(),
            grouped(r.inputs.oprisk_capital_charge()),
            grouped(blocks.operational),
            share(|s| &s.operational),
            percent_of(REFERENCE_ALLOCATION.operational),
        ]);
    }
    t.table(1, &["block", "capital", "rwa", "share", "reference"], &rows);
    t.field("Denominator", grouped(r.denominator));
    t.field("Own funds", grouped(r.capital.total()));
    if let (Some(t1), Some(t2)) = (r.capital.tier1(), r.capital.tier2()) {
        t.field("  Tier 1", grouped(t1));
        t.field("  Tier 2", grouped(t2));
    }
    t.field("Cooke ratio", ratio(r.cooke_ratio.as_ref()));
    if regime == Regime::Basel2 {
        t.field("McDonough ratio", ratio(r.mcdonough_ratio.as_ref()));
        t.field("Minimum ratio", percent_of(r.adjustment.minimum_ratio()));
        t.field(
            "Pillar 2 add-on",
            grouped(Money::new(
                r.adjustment.add_on(),
                r.capital.total().currency(),
            )),
        );
    }
    t.field("Requirement at 8%", grouped(r.floor_requirement));
    t.field("Minimum required", grouped(r.min_required));
    t.field("Surplus", grouped(r.surplus));
}

fn status(compliant: bool) -> &'static str {
    if compliant {
        "COMPLIANT"
    } else {
        "NON-COMPLIANT"
    }
}

fn notes(o: &ComputeOutcome) -> Vec<String> {
    let cfg = &o.config;
    let mut notes = Vec::new();
    if o.credit.approach == CreditApproach::Standardized && cfg.tables.weights.has_ranges() {
        notes.push(format!(
            "range cells of the weight table resolved at the {} (bank_option={})",
            match cfg.bank_option {
                basel_core::standardized::BankOptionPolicy::LowEnd => "low end",
                basel_core::standardized::BankOptionPolicy::HighEnd => "high end",
            },
            cfg.bank_option
        ));
    }
    if !o.credit.off_balance_at_nominal.is_empty() {
        notes.push(format!(
            "foundation EAD taken at nominal for off-balance exposures: {}",
            o.credit.off_balance_at_nominal.join(", ")
        ));
    }
    if let Some(k) = &o.oprisk {
        let dropped = k.scopes.iter().any(|s| match &s.detail {
            ScopeDetail::Basic { average_income } => average_income.years_counted() < 3,
            ScopeDetail::Standardized(tsa) => tsa
                .lines
                .iter()
                .any(|l| l.average_income.years_counted() < 3),
            ScopeDetail::Advanced => false,
        });
        if dropped && cfg.negative_income == NegativeIncomePolicy::ExcludeNegativeYears {
            notes.push("years with negative gross income left out of the averages".into());
        }
        if k.scopes
            .iter()
            .any(|s| matches!(s.detail, ScopeDetail::Standardized(_)))
        {
            notes.push(
                "standardized operational approach: every line is measured by average gross income, including lines whose customary indicator is assets or volume"
                    .into(),
            );
        }
        notes.push("block shares are compared with the 75/5/20 reference, not enforced".into());
    }
    notes
}

fn echo_section(t: &mut Text, echo: &[(String, String)]) {
    t.heading("CONFIGURATION");
    for (k, v) in echo {
        t.field(k, v);
    }
}

pub fn render_compute_text(o: &ComputeOutcome) -> String {
    let mut t = Text::new();
    t.line("CAPITAL ADEQUACY REPORT");
    t.line("=======================");
    t.field(
        "Regime",
        match o.regime {
            Regime::Basel1 => "basel1 (Cooke ratio)",
            Regime::Basel2 => "basel2 (McDonough ratio)",
        },
    );
    t.field("Currency", o.config.currency);
    t.field("Status", status(o.compliant()));
    credit_section(&mut t, o);
    if o.regime == Regime::Basel2 {
        if let Some(k) = &o.oprisk {
            oprisk_section(&mut t, k);
        }
        t.heading("MARKET RISK");
        t.field(
            "Capital charge (input)",
            grouped(o.report.inputs.market_capital_charge()),
        );
    }
    adequacy_section(&mut t, &o.report, o.regime);
    let notes = notes(o);
    if !notes.is_empty() {
        t.heading("NOTES");
        for n in notes {
            t.line(format!("- {n}"));
        }
    }
    echo_section(&mut t, &config_echo(&o.config, o.regime, &o.input_digests));
    t.finish()
}

fn put_report(kv: &mut Kv, prefix: &str, r: &CapitalReport, regime: Regime) {
    kv.put(format!("{prefix}credit.rwa"), plain(r.blocks.credit));
    if regime == Regime::Basel2 {
        kv.put(
            format!("{prefix}market.charge"),
            plain(r.inputs.market_capital_charge()),
        );
        kv.put(format!("{prefix}market.rwa"), plain(r.blocks.market));
        kv.put(
            format!("{prefix}oprisk.charge"),
            plain(r.inputs.oprisk_capital_charge()),
        );
        kv.put(format!("{prefix}oprisk.rwa"), plain(r.blocks.operational));
    }
    kv.put(format!("{prefix}denominator"), plain(r.denominator));
    kv.put(
        format!("{prefix}capital.own_funds"),
        plain(r.capital.total()),
    );
    if let (Some(t1), Some(t2)) = (r.capital.tier1(), r.capital.tier2()) {
        kv.put(format!("{prefix}capital.tier1"), plain(t1));
        kv.put(format!("{prefix}capital.tier2"), plain(t2));
    }
    kv.put(
        format!("{prefix}ratio.cooke"),
        ratio(r.cooke_ratio.as_ref()),
    );
    if regime == Regime::Basel2 {
        kv.put(
            format!("{prefix}ratio.mcdonough"),
            ratio(r.mcdonough_ratio.as_ref()),
        );
        if let Some(s) = &r.shares {
            kv.put(format!("{prefix}share.credit"), &s.credit);
            kv.put(format!("{prefix}share.market"), &s.market);
            kv.put(format!("{prefix}share.operational"), &s.operational);
        }
    }
    kv.put(
        format!("{prefix}requirement.floor"),
        plain(r.floor_requirement),
    );
    kv.put(
        format!("{prefix}requirement.minimum"),
        plain(r.min_required),
    );
    kv.put(format!("{prefix}surplus"), plain(r.surplus));
}

pub fn render_compute_kv(o: &ComputeOutcome) -> String {
    let mut kv = Kv::new();
    kv.put("report", "compute");
    kv.put("regime", o.regime);
    kv.put("currency", o.config.currency);
    kv.put("compliant", o.compliant());
    for l in &o.credit.rwa.lines {
        let p = format!("credit.exposure.{}", l.exposure_id);
        kv.put(format!("{p}.amount"), plain(l.nominal));
        kv.put(format!("{p}.ccf"), l.ccf);
        kv.put(format!("{p}.weight"), l.weight);
        kv.put(format!("{p}.rwa"), plain(l.risk_weighted));
    }
    if let Some(k) = &o.oprisk {
        for s in &k.scopes {
            kv.put(format!("oprisk.scope.{}.approach", s.scope), &s.approach);
            kv.put(format!("oprisk.scope.{}.charge", s.scope), plain(s.charge));
        }
    }
    put_report(&mut kv, "", &o.report, o.regime);
    for (k, v) in config_echo(&o.config, o.regime, &o.input_digests) {
        kv.put(format!("config.{k}"), v);
    }
    kv.finish()
}

pub fn render_compare_text(c: &CompareOutcome) -> String {
    let (b1, b2) = (&c.basel1, &c.basel2.report);
    let mut t = Text::new();
    t.line("REGIME COMPARISON");
    t.line("=================");
    t.field("Currency", c.basel2.config.currency);
    t.field("Status", status(c.compliant()));
    t.heading("SIDE BY SIDE");
    let row = |label: &str, a: String, b: String| vec![label.to_owned(), a, b];
    let rows = vec![
        row(
            "credit rwa",
            grouped(b1.blocks.credit),
            grouped(b2.blocks.credit),
        ),
        row("market rwa", "-".into(), grouped(b2.blocks.market)),
        row(
            "operational rwa",
            "-".into(),
            grouped(b2.blocks.operational),
        ),
        row(
            "denominator",
            grouped(b1.denominator),
            grouped(b2.denominator),
        ),
        row(
            "own funds",
            grouped(b1.capital.total()),
            grouped(b2.capital.total()),
        ),
        row(
            "ratio",
            ratio(b1.cooke_ratio.as_ref()),
            ratio(b2.mcdonough_ratio.as_ref()),
        ),
        row(
            "requirement at 8%",
            grouped(b1.floor_requirement),
            grouped(b2.floor_requirement),
        ),
        row(
            "minimum required",
            grouped(b1.min_required),
            grouped(b2.min_required),
        ),
        row("surplus", grouped(b1.surplus), grouped(b2.surplus)),
        row(
            "compliant",
            yes_no(b1.cooke_compliant).into(),
            yes_no(b2.mcdonough_compliant).into(),
        ),
    ];
    t.table(1, &["", "basel1 (Cooke)", "basel2 (McDonough)"], &rows);
    t.field("Delta at 8%", grouped(c.floor_delta));
    t.field("Delta in minimum required", grouped(c.required_delta));
    t.heading("BASEL II NOVELTIES");
    for n in &c.novelties {
        t.line(format!(
            "[{}] {}: {}",
            if n.applied { "x" } else { " " },
            n.label,
            n.detail
        ));
    }
    echo_section(
        &mut t,
        &config_echo(&c.basel2.config, Regime::Basel2, &c.basel2.input_digests),
    );
    t.finish()
}

pub fn render_compare_kv(c: &CompareOutcome) -> String {
    let mut kv = Kv::new();
    kv.put("report", "compare");
    kv.put("currency", c.basel2.config.currency);
    kv.put("compliant", c.compliant());
    put_report(&mut kv, "basel1.", &c.basel1, Regime::Basel1);
    kv.put("basel1.compliant", c.basel1.cooke_compliant);
    put_report(&mut kv, "basel2.", &c.basel2.report, Regime::Basel2);
    kv.put("basel2.compliant", c.basel2.report.mcdonough_compliant);
    kv.put("delta.floor", plain(c.floor_delta));
    kv.put("delta.minimum", plain(c.required_delta));
    for (i, n) in c.novelties.iter().enumerate() {
        kv.put(format!("novelty.{}.label", i + 1), n.label);
        kv.put(format!("novelty.{}.applied", i + 1), n.applied);
        kv.put(format!("novelty.{}.detail", i + 1), &n.detail);
    }
    for (k, v) in config_echo(&c.basel2.config, Regime::Basel2, &c.basel2.input_digests) {
        kv.put(format!("config.{k}"), v);
    }
    kv.finish()
}
