//! Solvency ratios and Pillar 2 compliance.
//!
//! Market and operational capital charges enter the denominator multiplied by
//! 12.5, the exact inverse of the 8% floor, so a bank holding exactly 8% of
//! the denominator sits exactly on the floor.

use rust_decimal::Decimal;

use crate::error::{Error, Result};
use crate::exact::Ratio;
use crate::model::{CapitalBase, Currency, Money};

/// Minimum solvency ratio.
pub const MINIMUM_RATIO: Decimal = Decimal::from_parts(8, 0, 0, false, 2);

/// `1 / MINIMUM_RATIO` = 25/2, exact in decimal.
pub const CHARGE_TO_RWA: Decimal = Decimal::from_parts(125, 0, 0, false, 1);

/// Reference capital allocation (credit, operational, market).
pub const REFERENCE_ALLOCATION: RiskBlocks<Decimal> = RiskBlocks {
    credit: Decimal::from_parts(75, 0, 0, false, 2),
    market: Decimal::from_parts(5, 0, 0, false, 2),
    operational: Decimal::from_parts(20, 0, 0, false, 2),
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RiskBlocks<T> {
    pub credit: T,
    pub market: T,
    pub operational: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PillarOneInputs {
    credit_rwa: Money,
    market_capital_charge: Money,
    oprisk_capital_charge: Money,
}

impl PillarOneInputs {
    pub fn new(
        credit_rwa: Money,
        market_capital_charge: Money,
        oprisk_capital_charge: Money,
    ) -> Result<Self> {
        for (what, m) in [
            ("credit RWA", credit_rwa),
            ("market capital charge", market_capital_charge),
            ("operational capital charge", oprisk_capital_charge),
        ] {
            credit_rwa.same_currency(&m)?;
            if m.is_negative() {
                return Err(Error::Invalid(format!(
                    "{what} must be non-negative, got {m}"
                )));
            }
        }
        Ok(PillarOneInputs {
            credit_rwa,
            market_capital_charge,
            oprisk_capital_charge,
        })
    }

    pub fn credit_only(credit_rwa: Money) -> Result<Self> {
        let zero = Money::zero(credit_rwa.currency());
        PillarOneInputs::new(credit_rwa, zero, zero)
    }

    pub fn credit_rwa(&self) -> Money {
        self.credit_rwa
    }

    pub fn market_capital_charge(&self) -> Money {
        self.market_capital_charge
    }

    pub fn oprisk_capital_charge(&self) -> Money {
        self.oprisk_capital_charge
    }

    pub fn currency(&self) -> Currency {
        self.credit_rwa.currency()
    }

    /// Each block as it enters the denominator.
    pub fn blocks(&self) -> RiskBlocks<Money> {
        RiskBlocks {
            credit: self.credit_rwa,
            market: self.market_capital_charge.scale(CHARGE_TO_RWA),
            operational: self.oprisk_capital_charge.scale(CHARGE_TO_RWA),
        }
    }

    pub fn scale(&self, k: Decimal) -> PillarOneInputs {
        PillarOneInputs {
            credit_rwa: self.credit_rwa.scale(k),
            market_capital_charge: self.market_capital_charge.scale(k),
            oprisk_capital_charge: self.oprisk_capital_charge.scale(k),
        }
    }
}

/// `credit RWA + 12.5 × market charge + 12.5 × operational charge`, exact.
pub fn denominator(p: &PillarOneInputs) -> Money {
    let b = p.blocks();
    Money::new(
        b.credit.amount() + b.market.amount() + b.operational.amount(),
        p.currency(),
    )
}

/// Own funds over the full Basel II denominator.
pub fn mcdonough_ratio(capital: &CapitalBase, p: &PillarOneInputs) -> Result<Ratio> {
    capital.total().same_currency(&p.credit_rwa)?;
    Ratio::of(capital.total().amount(), denominator(p).amount()).ok_or(Error::EmptyDenominator)
}

/// Own funds over credit RWA only (Basel I).
pub fn cooke_ratio(capital: &CapitalBase, credit_rwa: Money) -> Result<Ratio> {
    capital.total().same_currency(&credit_rwa)?;
    Ratio::of(capital.total().amount(), credit_rwa.amount()).ok_or(Error::EmptyDenominator)
}

/// Individual supervisory requirement on top of Pillar 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupervisoryAdjustment {
    minimum_ratio: Decimal,
    add_on: Decimal,
    justification: String,
}

impl Default for SupervisoryAdjustment {
    fn default() -> Self {
        SupervisoryAdjustment {
            minimum_ratio: MINIMUM_RATIO,
            add_on: Decimal::ZERO,
            justification: String::new(),
        }
    }
}

impl SupervisoryAdjustment {
    /// The override may only raise the 8% floor; the add-on is an amount in
    /// the reporting currency.
    pub fn new(
        minimum_ratio: Decimal,
        add_on: Decimal,
        justification: impl Into<String>,
    ) -> Result<Self> {
        if minimum_ratio < MINIMUM_RATIO {
            return Err(Error::InvalidOverride(minimum_ratio));
        }
        if minimum_ratio > Decimal::ONE {
            return Err(Error::OutOfRange {
                what: "minimum ratio",
                value: minimum_ratio,
                min: MINIMUM_RATIO,
                max: Decimal::ONE,
            });
        }
        if add_on < Decimal::ZERO {
            return Err(Error::Invalid(format!(
                "capital add-on must be non-negative, got {add_on}"
            )));
        }
        Ok(SupervisoryAdjustment {
            minimum_ratio,
            add_on,
            justification: justification.into(),
        })
    }

    pub fn minimum_ratio(&self) -> Decimal {
        self.minimum_ratio
    }

    pub fn add_on(&self) -> Decimal {
        self.add_on
    }

    pub fn justification(&self) -> &str {
        &self.justification
    }

    pub fn is_neutral(&self) -> bool {
        self.minimum_ratio == MINIMUM_RATIO && self.add_on.is_zero()
    }
}

/// Full Pillar 1 result plus the Pillar 2 overlay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapitalReport {
    pub capital: CapitalBase,
    pub inputs: PillarOneInputs,
    pub blocks: RiskBlocks<Money>,
    pub denominator: Money,
    /// `None` when credit RWA is zero.
    pub cooke_ratio: Option<Ratio>,
    /// `None` when the denominator is zero.
    pub mcdonough_ratio: Option<Ratio>,
    pub adjustment: SupervisoryAdjustment,
    /// Pillar 1 minimum at the 8% floor, before any adjustment.
    pub floor_requirement: Money,
    pub min_required: Money,
    pub surplus: Money,
    /// Share of each block in the denominator; `None` when it is zero.
    pub shares: Option<RiskBlocks<Ratio>>,
    pub cooke_compliant: bool,
    pub mcdonough_compliant: bool,
}

impl CapitalReport {
    pub fn is_shortfall(&self) -> bool {
        self.surplus.is_negative()
    }
}

/// Assembles ratios, requirement and surplus.
///
/// `min_required = max(8%, override) × denominator + add-on`, and the bank
/// complies when own funds cover it. Shares are reported against the
/// reference allocation but never enforced.
pub fn compliance(
    capital: &CapitalBase,
    p: &PillarOneInputs,
    adj: &SupervisoryAdjustment,
) -> Result<CapitalReport> {
    if adj.minimum_ratio() < MINIMUM_RATIO {
        return Err(Error::InvalidOverride(adj.minimum_ratio()));
    }
    let own = capital.total();
    own.same_currency(&p.credit_rwa)?;
    let denom = denominator(p);
    let blocks = p.blocks();
    let ratio = adj.minimum_ratio().max(MINIMUM_RATIO);
    let floor_requirement = denom.scale(MINIMUM_RATIO);
    let min_required = Money::new(denom.amount() * ratio + adj.add_on(), own.currency());
    let surplus = own.checked_sub(min_required)?;

    let shares = (!denom.is_zero()).then(|| {
        let share = |m: Money| Ratio::of(m.amount(), denom.amount()).expect("non-zero");
        RiskBlocks {
            credit: share(blocks.credit),
            market: share(blocks.market),
            operational: share(blocks.operational),
        }
    });

    Ok(CapitalReport {
        capital: *capital,
        inputs: *p,
        blocks,
        denominator: denom,
        cooke_ratio: cooke_ratio(capital, p.credit_rwa).ok(),
        mcdonough_ratio: mcdonough_ratio(capital, p).ok(),
        adjustment: adj.clone(),
        floor_requirement,
        min_required,
        surplus,
        shares,
        cooke_compliant: own.amount() >= p.credit_rwa.amount() * MINIMUM_RATIO,
        mcdonough_compliant: !surplus.is_negative(),
    })
}
