//! Internal-ratings-based parameterization.
//!
//! The weight for an exposure is `f(PD, LGD, EAD, M)` for a risk-weight
//! function `f` chosen by name. No closed form ships as the supervisory
//! curve; the registry holds a constant function and whatever the caller
//! registers. Every registration is screened by [`check_monotonicity`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rust_decimal::prelude::{FromPrimitive, ToPrimitive};
use rust_decimal::Decimal;

use crate::error::{Error, Result};
use crate::model::{Currency, Exposure, Money, Portfolio};
use crate::standardized::{CreditRwa, RwaLine};

/// Supervisory loss-given-default in the foundation approach (50% recovery).
pub const FOUNDATION_LGD: Decimal = Decimal::from_parts(50, 0, 0, false, 2);

/// Supervisory effective maturity in the foundation approach, in years.
pub const FOUNDATION_MATURITY_YEARS: Decimal = Decimal::from_parts(3, 0, 0, false, 0);

/// Name of the built-in constant function (weight 1.0).
pub const CONSTANT_FUNCTION: &str = "constant";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IrbParams {
    pd: Decimal,
    lgd: Decimal,
    ead: Money,
    maturity_years: Decimal,
}

fn unit_interval(what: &'static str, v: Decimal) -> Result<Decimal> {
    if v < Decimal::ZERO || v > Decimal::ONE {
        Err(Error::OutOfRange {
            what,
            value: v,
            min: Decimal::ZERO,
            max: Decimal::ONE,
        })
    } else {
        Ok(v)
    }
}

impl IrbParams {
    pub fn new(pd: Decimal, lgd: Decimal, ead: Money, maturity_years: Decimal) -> Result<Self> {
        let pd = unit_interval("pd", pd)?;
        let lgd = unit_interval("lgd", lgd)?;
        if ead.is_negative() {
            return Err(Error::Invalid("ead must be non-negative".into()));
        }
        if maturity_years <= Decimal::ZERO {
            return Err(Error::Invalid(format!(
                "maturity must be positive, got {maturity_years}"
            )));
        }
        Ok(IrbParams {
            pd,
            lgd,
            ead,
            maturity_years,
        })
    }

    /// Builds the tuple from a recovery rate: `lgd = 1 - recovery`.
    pub fn from_recovery(
        pd: Decimal,
        recovery: Decimal,
        ead: Money,
        maturity_years: Decimal,
    ) -> Result<Self> {
        let recovery = unit_interval("recovery rate", recovery)?;
        IrbParams::new(pd, Decimal::ONE - recovery, ead, maturity_years)
    }

    pub fn pd(&self) -> Decimal {
        self.pd
    }

    pub fn lgd(&self) -> Decimal {
        self.lgd
    }

    pub fn ead(&self) -> Money {
        self.ead
    }

    pub fn maturity_years(&self) -> Decimal {
        self.maturity_years
    }

    pub fn with_ead(self, ead: Money) -> Result<Self> {
        IrbParams::new(self.pd, self.lgd, ead, self.maturity_years)
    }
}

/// Where LGD, EAD and maturity come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IrbMode {
    /// Bank supplies PD; LGD, EAD and M are supervisory.
    Foundation,
    /// Bank supplies all four components.
    Advanced,
}

impl IrbMode {
    pub fn key(self) -> &'static str {
        match self {
            IrbMode::Foundation => "foundation",
            IrbMode::Advanced => "advanced",
        }
    }
}

impl fmt::Display for IrbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

pub fn foundation_params(pd: Decimal, nominal: Money) -> Result<IrbParams> {
    IrbParams::new(pd, FOUNDATION_LGD, nominal, FOUNDATION_MATURITY_YEARS)
}

pub fn advanced_params(
    pd: Decimal,
    lgd: Decimal,
    ead: Money,
    maturity_years: Decimal,
) -> Result<IrbParams> {
    IrbParams::new(pd, lgd, ead, maturity_years)
}

/// Builds the parameter tuple for `e` under `mode`.
pub fn exposure_params(e: &Exposure, mode: IrbMode) -> Result<IrbParams> {
    let need = |field: &'static str| Error::MissingIrbInput {
        id: e.id.clone(),
        field,
    };
    let pd = e.irb.pd.ok_or_else(|| need("pd"))?;
    match mode {
        IrbMode::Foundation => foundation_params(pd, e.nominal),
        IrbMode::Advanced => advanced_params(
            pd,
            e.irb.lgd.ok_or_else(|| need("lgd"))?,
            e.irb.ead.ok_or_else(|| need("ead"))?,
            e.irb.maturity_years.ok_or_else(|| need("maturity"))?,
        ),
    }
}

/// A pure map from IRB parameters to a weight (fraction, ≥ 0).
///
/// Implementations must be monotone non-decreasing in PD and in LGD.
pub trait RiskWeightFunction: Send + Sync {
    fn weight(&self, params: &IrbParams) -> f64;
}

impl<F> RiskWeightFunction for F
where
    F: Fn(&IrbParams) -> f64 + Send + Sync,
{
    fn weight(&self, params: &IrbParams) -> f64 {
        self(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantWeight(pub f64);

impl RiskWeightFunction for ConstantWeight {
    fn weight(&self, _: &IrbParams) -> f64 {
        self.0
    }
}

/// Sampling grid for [`check_monotonicity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    /// Points per axis, including both ends of [0, 1].
    pub points: usize,
    pub ead: Decimal,
    pub maturity_years: Decimal,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            points: 20,
            ead: Decimal::ONE_HUNDRED,
            maturity_years: FOUNDATION_MATURITY_YEARS,
        }
    }
}

impl Grid {
    fn axis(&self) -> Vec<Decimal> {
        let n = self.points.max(2) - 1;
        (0..=n)
            .map(|i| Decimal::from(i) / Decimal::from(n))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Pd,
    Lgd,
}

/// Two grid points where the weight decreased along `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityWitness {
    pub axis: Axis,
    /// (pd, lgd) and weight at the smaller coordinate.
    pub lower: (Decimal, Decimal, f64),
    /// (pd, lgd) and weight at the larger coordinate.
    pub higher: (Decimal, Decimal, f64),
}

impl fmt::Display for MonotonicityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p0, l0, w0) = self.lower;
        let (p1, l1, w1) = self.higher;
        write!(
            f,
            "weight falls along {:?}: f(pd={p0}, lgd={l0}) = {w0} > f(pd={p1}, lgd={l1}) = {w1}",
            self.axis
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub points_checked: usize,
    pub witness: Option<MonotonicityWitness>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Evaluates `f` on a square PD × LGD grid and reports the first pair of
/// neighbours where the weight decreases. NaN weights count as violations.
pub fn check_monotonicity(f: &dyn RiskWeightFunction, grid: &Grid) -> MonotonicityReport {
    let axis = grid.axis();
    let ead = Money::new(grid.ead, Currency::EUR);
    let eval = |pd: Decimal, lgd: Decimal| {
        let p = IrbParams::new(pd, lgd, ead, grid.maturity_years).expect("grid lies in [0,1]");
        f.weight(&p)
    };
    let n = axis.len();
    let values: Vec<Vec<f64>> = axis
        .iter()
        .map(|&pd| axis.iter().map(|&lgd| eval(pd, lgd)).collect())
        .collect();
    // NaN compares as None and counts as a decrease
    let decreases =
        |a: f64, b: f64| !matches!(a.partial_cmp(&b), Some(Ordering::Less | Ordering::Equal));

    for i in 0..n {
        for j in 0..n {
            if i + 1 < n && decreases(values[i][j], values[i + 1][j]) {
                return MonotonicityReport {
                    points_checked: n * n,
                    witness: Some(MonotonicityWitness {
                        axis: Axis::Pd,
                        lower: (axis[i], axis[j], values[i][j]),
                        higher: (axis[i + 1], axis[j], values[i + 1][j]),
                    }),
                };
            }
            if j + 1 < n && decreases(values[i][j], values[i][j + 1]) {
                return MonotonicityReport {
                    points_checked: n * n,
                    witness: Some(MonotonicityWitness {
                        axis: Axis::Lgd,
                        lower: (axis[i], axis[j], values[i][j]),
                        higher: (axis[i], axis[j + 1], values[i][j + 1]),
                    }),
                };
            }
        }
    }
    MonotonicityReport {
        points_checked: n * n,
        witness: None,
    }
}

/// Named risk-weight functions.
#[derive(Clone)]
pub struct FunctionRegistry {
    functions: BTreeMap<String, Arc<dyn RiskWeightFunction>>,
}

impl fmt::Debug for FunctionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.functions.keys()).finish()
    }
}

impl Default for FunctionRegistry {
    fn default() -> Self {
        let mut r = FunctionRegistry {
            functions: BTreeMap::new(),
        };
        r.register(CONSTANT_FUNCTION, Arc::new(ConstantWeight(1.0)))
            .expect("constant weight is monotone");
        r
    }
}

impl FunctionRegistry {
    /// Registers `f` under `name` after a 20 × 20 monotonicity screen.
    pub fn register(&mut self, name: &str, f: Arc<dyn RiskWeightFunction>) -> Result<()> {
        let report = check_monotonicity(f.as_ref(), &Grid::default());
        if let Some(w) = report.witness {
            return Err(Error::NonMonotoneFunction {
                name: name.to_owned(),
                detail: w.to_string(),
            });
        }
        self.functions.insert(name.to_owned(), f);
        Ok(())
    }

    /// Resolves `name`. Besides registered names, `constant:<w>` yields a
    /// constant function with weight `w`.
    pub fn get(&self, name: &str) -> Result<Arc<dyn RiskWeightFunction>> {
        if let Some(f) = self.functions.get(name) {
            return Ok(f.clone());
        }
        if let Some(w) = name.strip_prefix("constant:") {
            let w = f64::from_str(w.trim())
                .ok()
                .filter(|w| w.is_finite() && *w >= 0.0)
                .ok_or_else(|| Error::UnknownFunction(name.to_owned()))?;
            return Ok(Arc::new(ConstantWeight(w)));
        }
        Err(Error::UnknownFunction(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.functions.keys().map(String::as_str)
    }
}

fn weight_of(f: &dyn RiskWeightFunction, name: &str, params: &IrbParams) -> Result<Decimal> {
    let w = f.weight(params);
    debug_assert!(
        w.to_bits() == f.weight(params).to_bits(),
        "risk-weight function {name:?} is not pure"
    );
    if !w.is_finite() || w < 0.0 {
        return Err(Error::NonFiniteWeight {
            name: name.to_owned(),
            value: w,
        });
    }
    Decimal::from_f64(w).ok_or(Error::NonFiniteWeight {
        name: name.to_owned(),
        value: w,
    })
}

/// Risk-weighted amount `ead × f(params)`, rounded to minor units.
pub fn rwa_irb(params: &IrbParams, f: &dyn RiskWeightFunction, name: &str) -> Result<Money> {
    if params.ead().is_zero() {
        return Ok(Money::zero(params.ead().currency()));
    }
    let w = weight_of(f, name, params)?;
    Ok(params.ead().scale(w).round_minor())
}

/// IRB counterpart of the standardized portfolio result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrbPortfolioRwa {
    pub mode: IrbMode,
    pub function: String,
    pub rwa: CreditRwa,
    /// Off-balance exposures whose EAD was taken at raw nominal.
    pub off_balance_at_nominal: Vec<String>,
}

pub fn rwa_irb_portfolio(
    portfolio: &Portfolio,
    mode: IrbMode,
    registry: &FunctionRegistry,
    function: &str,
) -> Result<IrbPortfolioRwa> {
    let f = registry.get(function)?;
    let mut lines = Vec::with_capacity(portfolio.len());
    let mut off_balance = Vec::new();
    for e in portfolio.exposures() {
        let wrap = |err| Error::for_exposure(&e.id, err);
        let params = exposure_params(e, mode).map_err(wrap)?;
        let weight = if params.ead().is_zero() {
            Decimal::ZERO
        } else {
            weight_of(f.as_ref(), function, &params).map_err(wrap)?
        };
        let risk_weighted = rwa_irb(&params, f.as_ref(), function).map_err(wrap)?;
        if e.position.is_off_balance() && mode == IrbMode::Foundation {
            off_balance.push(e.id.clone());
        }
        lines.push(RwaLine {
            exposure_id: e.id.clone(),
            nominal: params.ead(),
            ccf: Decimal::ONE,
            weight,
            risk_weighted,
        });
    }
    let total = Money::sum(portfolio.currency(), lines.iter().map(|l| l.risk_weighted))?;
    Ok(IrbPortfolioRwa {
        mode,
        function: function.to_owned(),
        rwa: CreditRwa { lines, total },
        off_balance_at_nominal: off_balance,
    })
}

/// Weight as f64 for callers that want to plot or compare.
pub fn weight_f64(w: Decimal) -> f64 {
    w.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rust_decimal_macros::dec;

    fn eur(d: Decimal) -> Money {
        Money::new(d, Currency::EUR)
    }

    #[test]
    fn foundation_examples() {
        let p = foundation_params(dec!(0.01), eur(dec!(1000))).unwrap();
        assert_eq!(
            (p.pd(), p.lgd(), p.ead(), p.maturity_years()),
            (dec!(0.01), dec!(0.50), eur(dec!(1000)), dec!(3.0))
        );
        let z = foundation_params(dec!(0), eur(dec!(0))).unwrap();
        assert_eq!(
            (z.lgd(), z.ead(), z.maturity_years()),
            (dec!(0.5), eur(dec!(0)), dec!(3))
        );
        assert!(matches!(
            foundation_params(dec!(1.5), eur(dec!(1))),
            Err(Error::OutOfRange { what: "pd", .. })
        ));
    }

    #[test]
    fn lgd_from_recovery() {
        let p = IrbParams::from_recovery(dec!(0.02), dec!(0.50), eur(dec!(10)), dec!(3)).unwrap();
        assert_eq!(p.lgd(), FOUNDATION_LGD);
        let p = IrbParams::from_recovery(dec!(0.02), dec!(0.35), eur(dec!(10)), dec!(2.5)).unwrap();
        assert_eq!(p.lgd(), dec!(0.65));
    }

    #[test]
    fn invalid_params() {
        assert!(IrbParams::new(dec!(0.1), dec!(1.1), eur(dec!(1)), dec!(1)).is_err());
        assert!(IrbParams::new(dec!(0.1), dec!(0.5), eur(dec!(-1)), dec!(1)).is_err());
        assert!(IrbParams::new(dec!(0.1), dec!(0.5), eur(dec!(1)), dec!(0)).is_err());
    }

    #[test]
    fn rwa_examples() {
        let f = ConstantWeight(1.0);
        let zero = foundation_params(dec!(0.3), eur(dec!(0))).unwrap();
        assert_eq!(rwa_irb(&zero, &f, "c").unwrap(), eur(dec!(0)));
        let p = foundation_params(dec!(0.3), eur(dec!(500))).unwrap();
        assert_eq!(rwa_irb(&p, &f, "c").unwrap(), eur(dec!(500)));

        let step = |p: &IrbParams| if p.pd() < dec!(0.01) { 0.5 } else { 1.0 };
        let p = foundation_params(dec!(0.02), eur(dec!(100))).unwrap();
        assert_eq!(rwa_irb(&p, &step, "step").unwrap(), eur(dec!(100)));
        let p = foundation_params(dec!(0.005), eur(dec!(100))).unwrap();
        assert_eq!(rwa_irb(&p, &step, "step").unwrap(), eur(dec!(50)));
    }

    #[test]
    fn misbehaving_function_rejected() {
        let nan = |_: &IrbParams| f64::NAN;
        let p = foundation_params(dec!(0.1), eur(dec!(1))).unwrap();
        assert!(matches!(
            rwa_irb(&p, &nan, "nan"),
            Err(Error::NonFiniteWeight { .. })
        ));
        let neg = |_: &IrbParams| -1.0;
        assert!(matches!(
            rwa_irb(&p, &neg, "neg"),
            Err(Error::NonFiniteWeight { .. })
        ));
    }

    #[test]
    fn monotonicity_reports() {
        let constant = check_monotonicity(&ConstantWeight(0.7), &Grid::default());
        assert!(constant.passed());
        assert_eq!(constant.points_checked, 400);

        let decreasing = |p: &IrbParams| 1.0 - weight_f64(p.pd());
        let r = check_monotonicity(&decreasing, &Grid::default());
        let w = r.witness.expect("violation expected");
        assert_eq!(w.axis, Axis::Pd);
        assert!(w.lower.2 > w.higher.2);
        assert!(w.lower.0 < w.higher.0);

        let lgd_down = |p: &IrbParams| weight_f64(p.pd()) - weight_f64(p.lgd());
        let r = check_monotonicity(&lgd_down, &Grid::default());
        assert_eq!(r.witness.unwrap().axis, Axis::Lgd);
    }

    #[test]
    fn registry_screens_functions() {
        let mut reg = FunctionRegistry::default();
        assert!(reg.get(CONSTANT_FUNCTION).is_ok());
        assert!(matches!(reg.get("vasicek"), Err(Error::UnknownFunction(_))));
        let bad = Arc::new(|p: &IrbParams| 1.0 - weight_f64(p.pd()));
        assert!(matches!(
            reg.register("bad", bad),
            Err(Error::NonMonotoneFunction { .. })
        ));
        let good = Arc::new(|p: &IrbParams| weight_f64(p.pd() * p.lgd()) * 12.5);
        reg.register("el", good).unwrap();
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["constant", "el"]);
        let half = reg.get("constant:0.5").unwrap();
        let p = foundation_params(dec!(0.1), eur(dec!(10))).unwrap();
        assert_eq!(half.weight(&p), 0.5);
        assert!(reg.get("constant:-1").is_err());
    }

    #[test]
    fn every_default_function_passes_grid() {
        let reg = FunctionRegistry::default();
        for name in reg.names() {
            let f = reg.get(name).unwrap();
            assert!(check_monotonicity(f.as_ref(), &Grid::default()).passed());
        }
    }
}
