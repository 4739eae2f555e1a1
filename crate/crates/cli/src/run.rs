//! The compute / compare / disclose pipelines.

use std::collections::BTreeMap;

use basel_core::aggregation::{compliance, CapitalReport, PillarOneInputs, SupervisoryAdjustment};
use basel_core::irb::{rwa_irb_portfolio, FunctionRegistry};
use basel_core::model::Portfolio;
use basel_core::oprisk::{
    oprisk_capital, EstimatorRegistry, IncomeHistory, OpRiskApproach, OpRiskCharge, OpRiskSettings,
};
use basel_core::standardized::{rwa_portfolio, CreditRwa, StandardizedTables};
use basel_core::Money;

use crate::config::{CreditApproach, EngineConfig, Regime};
use crate::error::{CliError, Result};
use crate::input::{parse_income, parse_portfolio, read};
use crate::tables;

/// Loaded input files plus a digest of each for the config echo.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub portfolio: Portfolio,
    pub income: Option<BTreeMap<String, IncomeHistory>>,
    pub digests: Vec<(&'static str, String)>,
}

impl Inputs {
    pub fn load(cfg: &EngineConfig) -> Result<Inputs> {
        let path = cfg
            .portfolio
            .as_ref()
            .ok_or_else(|| CliError::Config("inputs.portfolio is required".into()))?;
        let text = read(path)?;
        let portfolio = parse_portfolio(&path.display().to_string(), &text, cfg.currency)?;
        let mut digests = vec![("portfolio", tables::version(&text))];
        let income = match &cfg.income {
            Some(path) => {
                let text = read(path)?;
                digests.push(("income", tables::version(&text)));
                Some(parse_income(
                    &path.display().to_string(),
                    &text,
                    cfg.currency,
                )?)
            }
            None => None,
        };
        Ok(Inputs {
            portfolio,
            income,
            digests,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CreditResult {
    pub approach: CreditApproach,
    pub rwa: CreditRwa,
    /// Off-balance exposures whose foundation EAD was taken at nominal.
    pub off_balance_at_nominal: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ComputeOutcome {
    pub regime: Regime,
    pub config: EngineConfig,
    pub portfolio: Portfolio,
    pub input_digests: Vec<(&'static str, String)>,
    pub credit: CreditResult,
    /// Present under basel2 only.
    pub oprisk: Option<OpRiskCharge>,
    pub report: CapitalReport,
}

impl ComputeOutcome {
    /// The compliance flag of the regime in force.
    pub fn compliant(&self) -> bool {
        match self.regime {
            Regime::Basel1 => self.report.cooke_compliant,
            Regime::Basel2 => self.report.mcdonough_compliant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Novelty {
    pub label: &'static str,
    pub applied: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub basel1: CapitalReport,
    pub basel2: ComputeOutcome,
    /// Basel II minus Basel I capital requirement at the 8% floor.
    pub floor_delta: Money,
    /// Basel II requirement including Pillar 2 minus the Basel I requirement.
    pub required_delta: Money,
    pub novelties: Vec<Novelty>,
}

impl CompareOutcome {
    pub fn compliant(&self) -> bool {
        self.basel1.cooke_compliant && self.basel2.report.mcdonough_compliant
    }
}

/// Registries for the pluggable IRB weight functions and advanced
/// operational-risk estimators.
#[derive(Debug, Clone, Default)]
pub struct Engine {
    pub functions: FunctionRegistry,
    pub estimators: EstimatorRegistry,
}

impl Engine {
    pub fn credit(&self, cfg: &EngineConfig, portfolio: &Portfolio) -> Result<CreditResult> {
        match cfg.credit {
            CreditApproach::Standardized => {
                let tables = StandardizedTables {
                    weights: cfg.tables.weights.clone(),
                    ccf: cfg.tables.ccf.clone(),
                };
                let rwa = rwa_portfolio(portfolio, &tables, cfg.bank_option)
                    .map_err(CliError::engine("credit_standardized"))?;
                Ok(CreditResult {
                    approach: cfg.credit,
                    rwa,
                    off_balance_at_nominal: Vec::new(),
                })
            }
            CreditApproach::Irb(mode) => {
                let r = rwa_irb_portfolio(portfolio, mode, &self.functions, &cfg.irb_function)
                    .map_err(CliError::engine("credit_irb"))?;
                Ok(CreditResult {
                    approach: cfg.credit,
                    rwa: r.rwa,
                    off_balance_at_nominal: r.off_balance_at_nominal,
                })
            }
        }
    }

    pub fn oprisk(&self, cfg: &EngineConfig, inputs: &Inputs) -> Result<OpRiskCharge> {
        let assignment = cfg.oprisk.as_ref().ok_or_else(|| {
            CliError::Config("an operational-risk approach (oprisk.approach) is required".into())
        })?;
        let income = inputs.income.as_ref().ok_or_else(|| {
            CliError::Config("operational risk needs an income file (inputs.income)".into())
        })?;
        let settings = OpRiskSettings {
            betas: cfg.tables.betas.clone(),
            negative_income: cfg.negative_income,
            estimators: self.estimators.clone(),
        };
        oprisk_capital(assignment, income, &settings, cfg.currency)
            .map_err(CliError::engine("operational_risk"))
    }

    pub fn compute(&self, cfg: &EngineConfig, inputs: &Inputs) -> Result<ComputeOutcome> {
        self.compute_as(cfg, inputs, cfg.regime)
    }

    fn compute_as(
        &self,
        cfg: &EngineConfig,
        inputs: &Inputs,
        regime: Regime,
    ) -> Result<ComputeOutcome> {
        cfg.check(regime)?;
        let capital = cfg.capital()?;
        let credit = self.credit(cfg, &inputs.portfolio)?;
        let aggregation = CliError::engine("capital_aggregation");
        let (oprisk, pillar_one, adjustment) = match regime {
            Regime::Basel1 => (
                None,
                PillarOneInputs::credit_only(credit.rwa.total),
                SupervisoryAdjustment::default(),
            ),
            Regime::Basel2 => {
                let k = self.oprisk(cfg, inputs)?;
                let p = PillarOneInputs::new(credit.rwa.total, cfg.market_charge, k.total);
                (Some(k), p, cfg.pillar2.clone())
            }
        };
        let pillar_one = pillar_one.map_err(CliError::engine("capital_aggregation"))?;
        let report = compliance(&capital, &pillar_one, &adjustment).map_err(aggregation)?;
        Ok(ComputeOutcome {
            regime,
            config: cfg.clone(),
            portfolio: inputs.portfolio.clone(),
            input_digests: inputs.digests.clone(),
            credit,
            oprisk,
            report,
        })
    }

    /// Basel I and Basel II side by side on one credit RWA.
    pub fn compare(&self, cfg: &EngineConfig, inputs: &Inputs) -> Result<CompareOutcome> {
        let basel2 = self.compute_as(cfg, inputs, Regime::Basel2)?;
        let capital = cfg.capital()?;
        let basel1 = compliance(
            &capital,
            &PillarOneInputs::credit_only(basel2.credit.rwa.total)
                .map_err(CliError::engine("capital_aggregation"))?,
            &SupervisoryAdjustment::default(),
        )
        .map_err(CliError::engine("capital_aggregation"))?;
        let delta = |a: Money, b: Money| {
            a.checked_sub(b)
                .map_err(CliError::engine("capital_aggregation"))
        };
        let floor_delta = delta(basel2.report.floor_requirement, basel1.floor_requirement)?;
        let required_delta = delta(basel2.report.min_required, basel1.min_required)?;
        let novelties = novelties(&basel2);
        Ok(CompareOutcome {
            basel1,
            basel2,
            floor_delta,
            required_delta,
            novelties,
        })
    }
}

pub fn run_compute(cfg: &EngineConfig, inputs: &Inputs) -> Result<ComputeOutcome> {
    Engine::default().compute(cfg, inputs)
}

pub fn run_compare(cfg: &EngineConfig, inputs: &Inputs) -> Result<CompareOutcome> {
    Engine::default().compare(cfg, inputs)
}

fn novelties(b2: &ComputeOutcome) -> Vec<Novelty> {
    let cfg = &b2.config;
    let oprisk = b2.oprisk.as_ref();
    let approaches: Vec<String> = oprisk
        .map(|k| {
            k.scopes
                .iter()
                .map(|s| format!("{}={}", s.scope, s.approach))
                .collect()
        })
        .unwrap_or_default();
    let beyond_baseline = cfg.credit != CreditApproach::Standardized
        || oprisk.is_some_and(|k| {
            k.scopes
                .iter()
                .any(|s| s.approach != OpRiskApproach::BasicIndicator)
        });
    vec![
        Novelty {
            label: "operational risk capital charge",
            applied: oprisk.is_some(),
            detail: match oprisk {
                Some(k) => format!("charge {}", crate::report::plain(k.total)),
                None => "not configured".into(),
            },
        },
        Novelty {
            label: "choice of measurement approach per risk",
            applied: beyond_baseline,
            detail: format!(
                "credit {}; operational {}",
                cfg.credit,
                approaches.join(", ")
            ),
        },
        Novelty {
            label: "credit risk mitigation recognised",
            applied: false,
            detail: "not modelled; both regimes share one credit RWA".into(),
        },
        Novelty {
            label: "individual supervisory requirement (Pillar 2)",
            applied: !cfg.pillar2.is_neutral(),
            detail: format!(
                "minimum ratio {}, add-on {}",
                crate::report::percent_of(cfg.pillar2.minimum_ratio()),
                crate::report::plain(Money::new(cfg.pillar2.add_on(), cfg.currency))
            ),
        },
        Novelty {
            label: "public disclosure (Pillar 3)",
            applied: cfg.period.is_some(),
            detail: match &cfg.period {
                Some(p) => format!("period {p}"),
                None => "no disclosure period configured".into(),
            },
        },
    ]
}
