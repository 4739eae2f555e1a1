mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use basel_cli::disclosure::run_disclose;
use basel_cli::input::load_portfolio;
use basel_cli::report::{render_compute_kv, render_compute_text};
use basel_cli::{run_compare, run_compute, CliError, Engine, Inputs, Overrides, Regime};
use basel_core::model::{
    validate_portfolio, CounterpartyClass, Exposure, OffBalanceCategory, RatingBucket,
};
use basel_core::oprisk::{IncomeHistory, OpRiskApproach};
use basel_core::{Currency, Money, Ratio};
use common::config;
use proptest::prelude::*;
use rust_decimal::Decimal;
use rust_decimal_macros::dec;

fn eur(d: Decimal) -> Money {
    Money::new(d, Currency::EUR)
}

fn worked(overrides: Overrides) -> (basel_cli::EngineConfig, Inputs) {
    let cfg = config("worked/config.toml", overrides);
    let inputs = Inputs::load(&cfg).unwrap();
    (cfg, inputs)
}

fn own_funds(s: &str) -> Overrides {
    Overrides {
        own_funds: Some(s.into()),
        ..Overrides::default()
    }
}

#[test]
fn worked_example_is_exactly_at_the_floor() {
    let (cfg, inputs) = worked(Overrides::default());
    let o = run_compute(&cfg, &inputs).unwrap();
    assert_eq!(o.credit.rwa.total, eur(dec!(1000000)));
    assert!(o
        .report
        .mcdonough_ratio
        .as_ref()
        .unwrap()
        .equals(dec!(0.08)));
    assert_eq!(
        o.report.mcdonough_ratio.as_ref().unwrap().to_string(),
        "8.00%"
    );
    assert!(o.compliant());
    assert_eq!(basel_cli::exit_code(o.compliant()), 0);
}

#[test]
fn one_minor_unit_short_is_non_compliant() {
    let (cfg, inputs) = worked(own_funds("79999.99"));
    let o = run_compute(&cfg, &inputs).unwrap();
    assert!(!o.compliant());
    assert_eq!(o.report.surplus, eur(dec!(-0.01)));
    assert_eq!(basel_cli::exit_code(o.compliant()), 1);
}

#[test]
fn basel1_reports_cooke_without_oprisk() {
    let cfg = config(
        "worked/config.toml",
        Overrides {
            regime: Some("basel1".into()),
            ..Overrides::default()
        },
    );
    // the worked config names an oprisk approach, which basel1 refuses
    assert!(matches!(
        run_compute(&cfg, &Inputs::load(&cfg).unwrap()),
        Err(CliError::Config(_))
    ));
    let cfg = basel_cli::EngineConfig {
        oprisk: None,
        ..cfg
    };
    let o = run_compute(&cfg, &Inputs::load(&cfg).unwrap()).unwrap();
    assert_eq!(o.regime, Regime::Basel1);
    assert_eq!(o.report.cooke_ratio.as_ref().unwrap().to_string(), "8.00%");
    assert!(o.oprisk.is_none());
    let text = render_compute_text(&o);
    assert!(!text.contains("OPERATIONAL RISK"));
    assert!(!text.contains("McDonough"));
    assert!(!render_compute_kv(&o).contains("oprisk"));
}

#[test]
fn basel2_needs_income() {
    let mut cfg = config("worked/config.toml", Overrides::default());
    cfg.income = None;
    let err = run_compute(&cfg, &Inputs::load(&cfg).unwrap()).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
}

#[test]
fn portfolio_file_examples() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let two = write(
        "two.csv",
        "id,class,rating,nominal,position\nA,corporate,A,1,on_balance\nB,sovereign,AAA,2,on_balance\n",
    );
    assert_eq!(load_portfolio(&two, Currency::EUR).unwrap().len(), 2);

    let ccc = write(
        "ccc.csv",
        "id,class,rating,nominal,position\nA,corporate,A,1,on_balance\nB,corporate,CCC,1,on_balance\n",
    );
    match load_portfolio(&ccc, Currency::EUR).unwrap_err() {
        CliError::Parse { line, column, .. } => assert_eq!((line, column.as_str()), (3, "rating")),
        other => panic!("{other}"),
    }

    let empty = write("empty.csv", "id,class,rating,nominal,position\n");
    assert!(load_portfolio(&empty, Currency::EUR).unwrap().is_empty());

    assert!(matches!(
        load_portfolio(&dir.path().join("missing.csv"), Currency::EUR),
        Err(CliError::Io { .. })
    ));
}

#[test]
fn module_provenance_in_errors() {
    let cfg = config(
        "worked/config.toml",
        Overrides {
            oprisk_approach: Some("advanced:nobody".into()),
            ..Overrides::default()
        },
    );
    let err = run_compute(&cfg, &Inputs::load(&cfg).unwrap()).unwrap_err();
    assert!(err.to_string().starts_with("[operational_risk]"), "{err}");
}

#[test]
fn compare_with_zero_charges_has_zero_delta() {
    let (cfg, inputs) = worked(Overrides::default());
    let c = run_compare(&cfg, &inputs).unwrap();
    assert_eq!(c.floor_delta, eur(dec!(0)));
    assert_eq!(c.basel1.cooke_ratio, c.basel2.report.mcdonough_ratio);
    assert_eq!(c.novelties.len(), 5);
}

#[test]
fn compare_oprisk_charge_of_16_adds_16() {
    let (cfg, inputs) = worked(Overrides {
        oprisk_approach: Some("advanced:fixed".into()),
        ..Overrides::default()
    });
    let mut engine = Engine::default();
    engine.estimators.register(
        "fixed",
        Arc::new(|_: &str, h: &IncomeHistory| Ok(Money::new(dec!(16), h.currency()))),
    );
    let c = engine.compare(&cfg, &inputs).unwrap();
    assert_eq!(c.floor_delta, eur(dec!(16)));
    assert!(c.novelties[0].applied);
    assert!(c.novelties[1].applied);
}

#[test]
fn disclosure_fields_and_determinism() {
    let (cfg, inputs) = worked(Overrides::default());
    let o = run_compute(&cfg, &inputs).unwrap();
    let doc = run_disclose(&o, Some("2006-H2")).unwrap();
    for needle in [
        "2006-H2 (2006-07-01 to 2006-12-31)",
        "SCOPE OF APPLICATION",
        "CAPITAL LEVEL AND STRUCTURE",
        "CREDIT RISK",
        "MARKET RISK",
        "OPERATIONAL RISK",
        "Method",
        "CONFIGURATION",
    ] {
        assert!(doc.contains(needle), "{needle}");
    }
    let again = run_compute(&cfg, &Inputs::load(&cfg).unwrap()).unwrap();
    assert_eq!(run_disclose(&again, Some("2006-H2")).unwrap(), doc);
}

#[test]
fn basel1_disclosure_has_no_oprisk_section() {
    let mut cfg = config(
        "worked/config.toml",
        Overrides {
            regime: Some("basel1".into()),
            ..Overrides::default()
        },
    );
    cfg.oprisk = None;
    let o = run_compute(&cfg, &Inputs::load(&cfg).unwrap()).unwrap();
    let doc = run_disclose(&o, None).unwrap();
    assert!(!doc.contains("OPERATIONAL RISK"));
    assert!(doc.contains("CREDIT RISK"));
}

#[test]
fn disclosure_needs_a_period() {
    let mut cfg = config("worked/config.toml", Overrides::default());
    cfg.period = None;
    let o = run_compute(&cfg, &Inputs::load(&cfg).unwrap()).unwrap();
    assert!(matches!(
        run_disclose(&o, None),
        Err(CliError::MissingPeriod)
    ));
}

#[test]
fn table_overrides_flow_into_the_echo() {
    let dir = tempfile::tempdir().unwrap();
    let ccf = dir.path().join("ccf.csv");
    std::fs::write(
        &ccf,
        "category,factor\nmedium_term_confirmed_facility,0.20\n",
    )
    .unwrap();
    let (cfg, inputs) = worked(Overrides {
        ccf: Some(ccf),
        ..Overrides::default()
    });
    let o = run_compute(&cfg, &inputs).unwrap();
    assert_eq!(o.credit.rwa.total, eur(dec!(400000)));
    let kv = render_compute_kv(&o);
    assert!(kv.contains(&format!(
        "config.tables.ccf={} (",
        cfg.tables.ccf_info.source
    )));
    assert_ne!(
        cfg.tables.ccf_info.version,
        basel_cli::tables::version(&basel_cli::tables::dump_ccf(
            &basel_core::standardized::CcfTable::basel_default()
        ))
    );
}

fn class_and_rating() -> impl Strategy<Value = (CounterpartyClass, RatingBucket)> {
    (0..4usize, 0..7usize).prop_map(|(c, r)| (CounterpartyClass::ALL[c], RatingBucket::ALL[r]))
}

fn small_portfolio() -> impl Strategy<Value = basel_core::model::Portfolio> {
    prop::collection::vec((class_and_rating(), 0i64..100_000_000, any::<bool>()), 0..8).prop_map(
        |rows| {
            let exposures = rows
                .into_iter()
                .enumerate()
                .map(|(i, ((class, rating), cents, off))| {
                    let nominal = eur(Decimal::new(cents, 2));
                    let e = if off {
                        Exposure::off_balance(
                            format!("E{i}"),
                            class,
                            rating,
                            nominal,
                            OffBalanceCategory::new("guarantee").unwrap(),
                        )
                    } else {
                        Exposure::on_balance(format!("E{i}"), class, rating, nominal)
                    };
                    e.with_short_term(class == CounterpartyClass::BankShortTerm)
                })
                .collect();
            validate_portfolio(exposures, Currency::EUR).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn basel2_minimum_never_below_basel1(
        portfolio in small_portfolio(),
        market in 0i64..10_000_000,
        oprisk in 0i64..10_000_000,
    ) {
        let base = config("worked/config.toml", Overrides {
            market_charge: Some(Decimal::new(market, 2).to_string()),
            oprisk_approach: Some("advanced:fixed".into()),
            ..Overrides::default()
        });
        let mut engine = Engine::default();
        let k = Decimal::new(oprisk, 2);
        engine.estimators.register(
            "fixed",
            Arc::new(move |_: &str, h: &IncomeHistory| Ok(Money::new(k, h.currency()))),
        );
        let mut income = BTreeMap::new();
        income.insert(
            "bank".to_owned(),
            IncomeHistory::from_totals(Currency::EUR, 2003, [Decimal::ZERO; 3]).unwrap(),
        );
        let inputs = Inputs { portfolio, income: Some(income), digests: vec![] };
        let c = engine.compare(&base, &inputs).unwrap();
        prop_assert!(c.basel2.report.floor_requirement.amount() >= c.basel1.floor_requirement.amount());
        prop_assert!(c.basel2.report.min_required.amount() >= c.basel1.min_required.amount());
        prop_assert!(!c.floor_delta.is_negative());
        prop_assert_eq!(c.basel2.credit.rwa.total, c.basel1.blocks.credit);
        if market == 0 && oprisk == 0 {
            prop_assert_eq!(c.floor_delta, eur(Decimal::ZERO));
            prop_assert_eq!(
                c.basel1.cooke_ratio.as_ref().map(Ratio::to_string),
                c.basel2.report.mcdonough_ratio.as_ref().map(Ratio::to_string)
            );
        }
    }
}

#[test]
fn single_scope_flag_replaces_file_scopes() {
    let cfg = config(
        "worked/config.toml",
        Overrides {
            oprisk_approach: Some("standardized".into()),
            ..Overrides::default()
        },
    );
    let scopes = cfg.oprisk.unwrap();
    assert_eq!(scopes.scopes().len(), 1);
    assert_eq!(scopes.scopes()[0].approach, OpRiskApproach::Standardized);
}
