//! Invariants of the calculation modules, checked over random inputs.

use std::collections::BTreeMap;

use basel_core::aggregation::{
    compliance, cooke_ratio, denominator, mcdonough_ratio, PillarOneInputs, SupervisoryAdjustment,
    MINIMUM_RATIO,
};
use basel_core::irb::{
    advanced_params, foundation_params, rwa_irb, ConstantWeight, IrbParams, RiskWeightFunction,
    FOUNDATION_LGD, FOUNDATION_MATURITY_YEARS,
};
use basel_core::model::{
    parse_rating, validate_portfolio, CapitalBase, CounterpartyClass, Exposure, OffBalanceCategory,
    RatingBucket, UNRATED_TOKEN,
};
use basel_core::oprisk::{
    average_gross_income, bia_capital, tsa_capital, BetaTable, BusinessLine, IncomeHistory,
    NegativeIncomePolicy, YearRecord, ALPHA,
};
use basel_core::standardized::{
    rwa_exposure, rwa_portfolio, BankOptionPolicy, RiskWeightTable, StandardizedTables,
};
use basel_core::{Currency, Exact, Money};
use proptest::prelude::*;
use rust_decimal::Decimal;

fn eur(d: Decimal) -> Money {
    Money::new(d, Currency::EUR)
}

fn cents(max: i64) -> impl Strategy<Value = Decimal> {
    (0..=max).prop_map(|c| Decimal::new(c, 2))
}

fn class() -> impl Strategy<Value = CounterpartyClass> {
    prop::sample::select(CounterpartyClass::ALL.to_vec())
}

fn bucket() -> impl Strategy<Value = RatingBucket> {
    prop::sample::select(RatingBucket::ALL.to_vec())
}

fn policy() -> impl Strategy<Value = BankOptionPolicy> {
    prop_oneof![
        Just(BankOptionPolicy::LowEnd),
        Just(BankOptionPolicy::HighEnd)
    ]
}

fn category() -> impl Strategy<Value = Option<OffBalanceCategory>> {
    prop::option::of(
        prop::sample::select(vec![
            "medium_term_confirmed_facility",
            "guarantee",
            "documentary_credit",
        ])
        .prop_map(|k| OffBalanceCategory::new(k).unwrap()),
    )
}

/// Whole-unit nominals keep every line product exact at two decimals, so
/// homogeneity can be checked without per-line rounding noise.
fn exposure(id: usize) -> impl Strategy<Value = Exposure> {
    (class(), bucket(), 0i64..5_000_000, category()).prop_map(move |(c, b, n, cat)| {
        let nominal = eur(Decimal::from(n));
        let e = match cat {
            Some(cat) => Exposure::off_balance(format!("E{id}"), c, b, nominal, cat),
            None => Exposure::on_balance(format!("E{id}"), c, b, nominal),
        };
        e.with_short_term(c == CounterpartyClass::BankShortTerm)
    })
}

fn exposures(max: usize) -> impl Strategy<Value = Vec<Exposure>> {
    (0..=max).prop_flat_map(|n| (0..n).map(exposure).collect::<Vec<_>>())
}

fn history(by_line: bool) -> impl Strategy<Value = IncomeHistory> {
    history_from(by_line, -50_000)
}

fn history_from(by_line: bool, min_cents: i64) -> impl Strategy<Value = IncomeHistory> {
    let amount = (min_cents..200_000).prop_map(|c| Decimal::new(c, 2));
    prop::collection::vec(prop::collection::vec(amount, 8), 3).prop_map(move |years| {
        let records = years
            .into_iter()
            .zip(2004..)
            .map(|(vals, y)| {
                if by_line {
                    YearRecord::with_lines(y, BusinessLine::ALL.into_iter().zip(vals))
                } else {
                    YearRecord::with_total(y, vals[0])
                }
            })
            .collect();
        IncomeHistory::new(Currency::EUR, records).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rating_tokens_map_in_order(i in 0usize..17, j in 0usize..17) {
        let tokens: Vec<_> = RatingBucket::tokens().filter(|t| *t != UNRATED_TOKEN).collect();
        let (a, b) = (i.min(j), i.max(j));
        let ra = parse_rating(tokens[a]).unwrap().strength_rank().unwrap();
        let rb = parse_rating(tokens[b]).unwrap().strength_rank().unwrap();
        prop_assert!(ra <= rb);
    }

    #[test]
    fn arbitrary_strings_outside_grammar_rejected(s in "[A-Za-z+<\\- ]{0,6}") {
        let known = RatingBucket::tokens().any(|t| t == s.trim());
        prop_assert_eq!(parse_rating(&s).is_ok(), known);
    }

    #[test]
    fn validation_is_idempotent(es in exposures(6)) {
        let p = validate_portfolio(es, Currency::EUR).unwrap();
        let again = validate_portfolio(p.exposures().to_vec(), Currency::EUR).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn rwa_is_additive(a in exposures(5), b in exposures(5), pol in policy()) {
        let t = StandardizedTables::default();
        let rename = |es: Vec<Exposure>, tag: &str| -> Vec<Exposure> {
            es.into_iter().map(|mut e| { e.id = format!("{tag}{}", e.id); e }).collect()
        };
        let (a, b) = (rename(a, "a"), rename(b, "b"));
        let joint: Vec<_> = a.iter().chain(&b).cloned().collect();
        let ra = rwa_portfolio(&validate_portfolio(a, Currency::EUR).unwrap(), &t, pol).unwrap();
        let rb = rwa_portfolio(&validate_portfolio(b, Currency::EUR).unwrap(), &t, pol).unwrap();
        let rj = rwa_portfolio(&validate_portfolio(joint, Currency::EUR).unwrap(), &t, pol).unwrap();
        prop_assert_eq!(rj.total, ra.total.checked_add(rb.total).unwrap());
    }

    #[test]
    fn rwa_is_homogeneous(es in exposures(6), k in 1i64..1000, pol in policy()) {
        let t = StandardizedTables::default();
        let k = Decimal::from(k);
        let scaled: Vec<_> = es.iter().cloned().map(|mut e| { e.nominal = e.nominal.scale(k); e }).collect();
        let base = rwa_portfolio(&validate_portfolio(es, Currency::EUR).unwrap(), &t, pol).unwrap();
        let big = rwa_portfolio(&validate_portfolio(scaled, Currency::EUR).unwrap(), &t, pol).unwrap();
        prop_assert_eq!(big.total, base.total.scale(k));
    }

    #[test]
    fn off_balance_never_exceeds_on_balance(c in class(), b in bucket(), n in cents(10_000_000), cat in category(), pol in policy()) {
        let t = StandardizedTables::default();
        let cat = cat.unwrap_or_else(|| OffBalanceCategory::new("guarantee").unwrap());
        let on = Exposure::on_balance("on", c, b, eur(n));
        let off = Exposure::off_balance("off", c, b, eur(n), cat);
        let r_on = rwa_exposure(&on, &t.weights, &t.ccf, pol).unwrap();
        let r_off = rwa_exposure(&off, &t.weights, &t.ccf, pol).unwrap();
        prop_assert!(r_off.risk_weighted.amount() <= r_on.risk_weighted.amount());
    }

    #[test]
    fn irb_linear_in_ead(pd in 0i64..=10_000, lgd in 0i64..=100, ead in 0i64..10_000_000, k in 1i64..1000) {
        // weights are multiples of 0.25, so whole-unit EAD × weight is exact
        let f = |p: &IrbParams| {
            let notch = (p.pd() * Decimal::TEN).floor() + (p.lgd() * Decimal::from(4)).floor();
            0.5 + 0.25 * notch.to_string().parse::<f64>().unwrap()
        };
        let p = advanced_params(Decimal::new(pd, 4), Decimal::new(lgd, 2), eur(Decimal::from(ead)), Decimal::from(2)).unwrap();
        let scaled = p.with_ead(p.ead().scale(Decimal::from(k))).unwrap();
        let base = rwa_irb(&p, &f, "notched").unwrap();
        let big = rwa_irb(&scaled, &f, "notched").unwrap();
        prop_assert_eq!(big, base.scale(Decimal::from(k)));
    }

    #[test]
    fn foundation_injects_supervisory_values(pd in 0i64..=10_000, n in cents(1_000_000_000)) {
        let pd = Decimal::new(pd, 4);
        let p = foundation_params(pd, eur(n)).unwrap();
        prop_assert_eq!(p.pd(), pd);
        prop_assert_eq!(p.lgd(), FOUNDATION_LGD);
        prop_assert_eq!(p.maturity_years(), FOUNDATION_MATURITY_YEARS);
        prop_assert_eq!(p.ead(), eur(n));
    }

    #[test]
    fn advanced_with_defaults_reproduces_foundation(pd in 0i64..=10_000, n in cents(1_000_000_000)) {
        let pd = Decimal::new(pd, 4);
        let f = |p: &IrbParams| if p.pd() < Decimal::new(1, 2) { 0.5 } else { 1.0 };
        let fnd = foundation_params(pd, eur(n)).unwrap();
        let adv = advanced_params(pd, Decimal::new(5, 1), eur(n), Decimal::from(3)).unwrap();
        prop_assert_eq!(fnd, adv);
        prop_assert_eq!(rwa_irb(&fnd, &f, "step").unwrap(), rwa_irb(&adv, &f, "step").unwrap());
    }

    #[test]
    fn bia_linear_and_clamped(gi in -1_000_000i64..1_000_000, k in 1i64..100) {
        let gi = eur(Decimal::from(gi));
        let k_dec = Decimal::from(k);
        let base = bia_capital(&gi.into());
        let scaled = bia_capital(&gi.scale(k_dec).into());
        if gi.is_negative() || gi.is_zero() {
            prop_assert!(base.is_zero());
        } else {
            prop_assert_eq!(base, gi.scale(ALPHA).round_minor());
            // whole-unit income × 0.15 is exact, so scaling commutes with rounding
            prop_assert_eq!(scaled, base.scale(k_dec));
        }
    }

    #[test]
    fn uniform_alpha_beta_equals_bia(h in history_from(true, 0)) {
        let betas = BetaTable::uniform(ALPHA).unwrap();
        for pol in [NegativeIncomePolicy::ExcludeNegativeYears, NegativeIncomePolicy::IncludeAll] {
            let tsa = tsa_capital(&h, &betas, pol).unwrap();
            let bia = bia_capital(&average_gross_income(&h, pol).unwrap());
            prop_assert_eq!(tsa.total, bia);
        }
    }

    #[test]
    fn tsa_charges_non_negative_when_excluding(h in history(true)) {
        let r = tsa_capital(&h, &BetaTable::default(), NegativeIncomePolicy::ExcludeNegativeYears).unwrap();
        prop_assert!(r.lines.iter().all(|l| !l.charge.is_negative()));
        prop_assert!(!r.total.is_negative());
    }

    #[test]
    fn bia_never_negative(h in history(false), include in any::<bool>()) {
        let pol = if include { NegativeIncomePolicy::IncludeAll } else { NegativeIncomePolicy::ExcludeNegativeYears };
        prop_assert!(!bia_capital(&average_gross_income(&h, pol).unwrap()).is_negative());
    }

    #[test]
    fn ratios_scale_invariant(c in cents(10_000_000), m in cents(1_000_000), o in cents(1_000_000), own in cents(5_000_000), k in 1i64..10_000) {
        let p = PillarOneInputs::new(eur(c), eur(m), eur(o)).unwrap();
        let cap = CapitalBase::new(eur(own)).unwrap();
        let k = Decimal::new(k, 2);
        let (ps, caps) = (p.scale(k), cap.scale(k));
        prop_assert_eq!(mcdonough_ratio(&cap, &p).ok(), mcdonough_ratio(&caps, &ps).ok());
        prop_assert_eq!(cooke_ratio(&cap, p.credit_rwa()).ok(), cooke_ratio(&caps, ps.credit_rwa()).ok());
    }

    #[test]
    fn floor_identity(c in cents(10_000_000), m in cents(1_000_000), o in cents(1_000_000), delta in -3i64..=3) {
        let p = PillarOneInputs::new(eur(c), eur(m), eur(o)).unwrap();
        prop_assume!(!denominator(&p).is_zero());
        let at_floor = denominator(&p).amount() * MINIMUM_RATIO;
        let own = at_floor + Decimal::new(delta, 3);
        prop_assume!(own >= Decimal::ZERO);
        let cap = CapitalBase::new(eur(own)).unwrap();
        let r = compliance(&cap, &p, &SupervisoryAdjustment::default()).unwrap();
        let on_floor = own == at_floor;
        prop_assert_eq!(r.mcdonough_ratio.as_ref().unwrap().equals(MINIMUM_RATIO), on_floor);
        prop_assert_eq!(r.surplus.is_zero(), on_floor);
        prop_assert_eq!(r.mcdonough_compliant, delta >= 0);
    }

    #[test]
    fn shares_sum_to_one(c in cents(10_000_000), m in cents(1_000_000), o in cents(1_000_000)) {
        let p = PillarOneInputs::new(eur(c), eur(m), eur(o)).unwrap();
        let cap = CapitalBase::new(eur(Decimal::ONE)).unwrap();
        let r = compliance(&cap, &p, &SupervisoryAdjustment::default()).unwrap();
        match r.shares {
            Some(s) => {
                let sum = s.credit.exact() + s.market.exact();
                prop_assert_eq!(&sum + s.operational.exact(), Exact::one());
            }
            None => prop_assert!(denominator(&p).is_zero()),
        }
    }

    #[test]
    fn requirement_grows_with_override(c in cents(10_000_000), o in cents(1_000_000), bump in 0i64..=920) {
        let p = PillarOneInputs::new(eur(c), eur(Decimal::ZERO), eur(o)).unwrap();
        let cap = CapitalBase::new(eur(Decimal::ONE)).unwrap();
        let base = compliance(&cap, &p, &SupervisoryAdjustment::default()).unwrap();
        let adj = SupervisoryAdjustment::new(MINIMUM_RATIO + Decimal::new(bump, 3), Decimal::ZERO, "").unwrap();
        let raised = compliance(&cap, &p, &adj).unwrap();
        prop_assert!(raised.min_required.amount() >= base.min_required.amount());
    }
}

#[test]
fn rating_monotone_within_each_class() {
    let t = RiskWeightTable::basel_default();
    for pol in [BankOptionPolicy::LowEnd, BankOptionPolicy::HighEnd] {
        for c in CounterpartyClass::ALL {
            let ws: Vec<_> = RatingBucket::RATED
                .iter()
                .map(|b| t.lookup(c, *b, pol).unwrap())
                .collect();
            assert!(
                ws.windows(2).all(|w| w[0] <= w[1]),
                "{c} under {pol}: {ws:?}"
            );
        }
    }
}

#[test]
fn constant_function_is_weakly_monotone() {
    let f = ConstantWeight(1.0);
    let p = foundation_params(Decimal::new(1, 2), eur(Decimal::from(500))).unwrap();
    assert_eq!(f.weight(&p), 1.0);
    assert_eq!(
        rwa_irb(&p, &f, "constant").unwrap(),
        eur(Decimal::from(500))
    );
}

#[test]
fn tsa_lines_follow_business_line_order() {
    let years = (2003..2006)
        .map(|y| YearRecord::with_lines(y, BusinessLine::ALL.map(|l| (l, Decimal::from(100)))))
        .collect();
    let h = IncomeHistory::new(Currency::EUR, years).unwrap();
    let r = tsa_capital(&h, &BetaTable::default(), NegativeIncomePolicy::IncludeAll).unwrap();
    let order: Vec<_> = r.lines.iter().map(|l| l.line).collect();
    assert_eq!(order, BusinessLine::ALL.to_vec());
    let by_line: BTreeMap<_, _> = r.lines.iter().map(|l| (l.line, l.charge)).collect();
    assert_eq!(
        by_line[&BusinessLine::CommercialBanking],
        eur(Decimal::from(15))
    );
}
