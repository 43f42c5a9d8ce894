//! The insurance products, each with its constant-force closed form and the
//! payoff used to evaluate it by quadrature.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_form::{self, effective_table, Method, MomentResult, ProductSpec, Term};
use crate::error::{Error, Result};
use crate::fractional_age::Assumption;
use crate::gompertz::GompertzParams;
use crate::life_table::LifeTable;
use crate::oracle::{self, Payoff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Product {
    /// `ν^{T}`
    TermInsurance,
    /// `T`
    Lifetime,
    /// `T ν^{T}`
    IncreasingContinuous,
    /// `([T] + 1) ν^{T}`
    IncreasingAnnual,
    /// `(n + l - [T]) ν^{T}`
    DecreasingAnnual,
    /// `ν^{([jT] + 1)/j}`
    MthlyInsurance,
    /// `([jT] + 1) ν^{T}`
    MthlyIncreasing,
}

impl Product {
    pub const ALL: [Product; 7] = [
        Product::TermInsurance,
        Product::Lifetime,
        Product::IncreasingContinuous,
        Product::IncreasingAnnual,
        Product::DecreasingAnnual,
        Product::MthlyInsurance,
        Product::MthlyIncreasing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Product::TermInsurance => "term-insurance",
            Product::Lifetime => "lifetime",
            Product::IncreasingContinuous => "increasing-continuous",
            Product::IncreasingAnnual => "increasing-annual",
            Product::DecreasingAnnual => "decreasing-annual",
            Product::MthlyInsurance => "mthly-insurance",
            Product::MthlyIncreasing => "mthly-increasing",
        }
    }

    /// Whether the product is defined on `1/j` sub-periods.
    pub fn uses_periods(self) -> bool {
        matches!(self, Product::MthlyInsurance | Product::MthlyIncreasing)
    }

    pub fn closed_form(self, table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
        match self {
            Product::TermInsurance => closed_form::term_insurance_moment(table, spec),
            Product::Lifetime => closed_form::lifetime_moment(table, spec),
            Product::IncreasingContinuous => closed_form::increasing_continuous_moment(table, spec),
            Product::IncreasingAnnual => closed_form::increasing_annual_moment(table, spec),
            Product::DecreasingAnnual => closed_form::decreasing_annual_moment(table, spec),
            Product::MthlyInsurance => closed_form::mthly_insurance_moment(table, spec),
            Product::MthlyIncreasing => closed_form::mthly_increasing_moment(table, spec),
        }
    }

    fn validate(self, spec: &ProductSpec) -> Result<()> {
        let min_moment = if self == Product::Lifetime { 0 } else { 1 };
        spec.validate(min_moment, self.uses_periods())?;
        if self == Product::DecreasingAnnual && spec.term == Term::WholeLife {
            return Err(Error::InvalidSpec("a decreasing benefit needs a finite term".into()));
        }
        Ok(())
    }

    /// `g(t)` such that the m-th moment equals `E[g(T_x)]` over the window.
    pub fn payoff(self, spec: &ProductSpec) -> Result<Payoff> {
        self.validate(spec)?;
        let (i, m, j) = (spec.interest, spec.moment, spec.periods_per_year);
        Ok(match self {
            Product::TermInsurance => Payoff::discount_power(i, m),
            Product::Lifetime => Payoff::lifetime_power(m),
            Product::IncreasingContinuous => Payoff::increasing_continuous(i, m),
            Product::IncreasingAnnual => Payoff::increasing_annual(i, m),
            Product::DecreasingAnnual => {
                let n = match spec.term {
                    Term::Years(n) => n,
                    Term::WholeLife => unreachable!("rejected by validate"),
                };
                Payoff::decreasing_annual(i, m, n + spec.defer_years)
            }
            Product::MthlyInsurance => Payoff::mthly_insurance(i, m, j),
            Product::MthlyIncreasing => Payoff::mthly_increasing(i, m, j),
        })
    }

    /// Cover window `[start, end)` in years; `end` is infinite for whole life.
    pub fn window(self, spec: &ProductSpec) -> (f64, f64) {
        (spec.window_start(), spec.window_end().unwrap_or(f64::INFINITY))
    }

    /// Quadrature value under any interpolation law.
    pub fn oracle(self, table: &LifeTable, spec: &ProductSpec, assumption: Assumption, tol: f64) -> Result<MomentResult> {
        let payoff = self.payoff(spec)?;
        let table = effective_table(table, spec);
        let (lo, hi) = self.window(spec);
        if let Term::Years(_) = spec.term {
            // same coverage rule as the closed forms
            closed_form::year_slices(&table, spec)?;
        }
        let est = oracle::expectation_detailed(&table, assumption, spec.age, &payoff, lo, hi, tol)?;
        Ok(MomentResult {
            value: est.value,
            method: Method::Oracle,
            assumption,
            horizon: est.horizon,
            limit_branches_taken: 0,
        })
    }

    /// Closed form under constant force, quadrature otherwise.
    pub fn evaluate(self, table: &LifeTable, spec: &ProductSpec, assumption: Assumption) -> Result<MomentResult> {
        match assumption {
            Assumption::ConstantForce => self.closed_form(table, spec),
            _ => self.oracle(table, spec, assumption, oracle::DEFAULT_TOL),
        }
    }

    /// Expectation under the continuous Gompertz law, no interpolation.
    pub fn gompertz(self, params: &GompertzParams, spec: &ProductSpec) -> Result<f64> {
        let payoff = self.payoff(spec)?;
        let (lo, hi) = self.window(spec);
        params.exact_expectation(spec.age, &payoff, lo, hi, oracle::DEFAULT_TOL)
    }
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Product {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Product::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Product::ALL.iter().map(|p| p.name()).collect();
                format!("unknown product `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> LifeTable {
        LifeTable::from_csv(include_str!("../data/table1.csv").as_bytes()).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for p in Product::ALL {
            assert_eq!(p.name().parse::<Product>().unwrap(), p);
        }
        assert!("annuity".parse::<Product>().is_err());
    }

    #[test]
    fn closed_form_matches_oracle_on_reference_window() {
        let t = table1();
        for p in Product::ALL {
            for m in 1..=2 {
                let mut spec = ProductSpec::new(50, 0.03, m).deferred(2).years(7);
                if p.uses_periods() {
                    spec = spec.periods(12);
                }
                let c = p.closed_form(&t, &spec).unwrap().value;
                let o = p.oracle(&t, &spec, Assumption::ConstantForce, 1e-12).unwrap().value;
                assert!((c - o).abs() <= 1e-10 * c, "{p} m={m}: {c} vs {o}");
            }
        }
    }

    #[test]
    fn deferred_periods_window() {
        let t = table1();
        for p in [Product::MthlyInsurance, Product::MthlyIncreasing] {
            let spec = ProductSpec::new(50, 0.03, 2).deferred(1).deferred_periods(5).years(6).periods(12);
            let c = p.closed_form(&t, &spec).unwrap().value;
            let o = p.oracle(&t, &spec, Assumption::ConstantForce, 1e-12).unwrap().value;
            assert!((c - o).abs() <= 1e-10 * c, "{p}: {c} vs {o}");
        }
    }
}
