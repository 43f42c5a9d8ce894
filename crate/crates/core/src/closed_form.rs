//! Closed-form moments of insurance present values when the force of
//! mortality is constant within each year of age.
//!
//! Every product reduces to a sum over years `k` of a one-year integral of
//! the form `_k p_x · ln(1/p) · ∫ g(t) p^{t-k} dt`. The integrals are
//! evaluated in forms that stay accurate when `p -> 1`, `p -> 0` or
//! `ν^m p -> 1`; the last two switch to their exact limits below the
//! thresholds [`NEAR_UNIT_LOG`] and [`NEAR_ZERO_P`].

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::accumulate::CompensatedSum;
use crate::error::{Error, Result};
use crate::fractional_age::Assumption;
use crate::life_table::{LifeTable, YearRates};
use crate::special_fn::shifted_power_exp_integral;

/// Largest supported moment order.
pub const MAX_MOMENT: u32 = 20;

/// `|ln(ν^m p)|` below which a summand takes its `ν^m p -> 1` limit.
pub const NEAR_UNIT_LOG: f64 = 1e-9;

/// `p` below which a summand takes its `p -> 0` limit.
pub const NEAR_ZERO_P: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    Years(u32),
    WholeLife,
}

/// Contract parameters shared by all products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    /// Issue age `x`.
    pub age: u32,
    /// Whole years of deferment `l`.
    pub defer_years: u32,
    /// Extra deferment in periods of length `1/j` (`n₁`).
    pub defer_periods: u32,
    pub term: Term,
    /// Moment order `m`.
    pub moment: u32,
    /// Annual effective interest rate `i`.
    pub interest: f64,
    /// Periods per year `j`.
    pub periods_per_year: u32,
    /// For whole-life cover on a table that never reaches zero survivors,
    /// treat death as certain in the year after the last tabulated age.
    pub force_terminal: bool,
}

impl ProductSpec {
    pub fn new(age: u32, interest: f64, moment: u32) -> Self {
        ProductSpec {
            age,
            defer_years: 0,
            defer_periods: 0,
            term: Term::WholeLife,
            moment,
            interest,
            periods_per_year: 1,
            force_terminal: false,
        }
    }

    pub fn deferred(mut self, years: u32) -> Self {
        self.defer_years = years;
        self
    }

    pub fn deferred_periods(mut self, periods: u32) -> Self {
        self.defer_periods = periods;
        self
    }

    pub fn years(mut self, n: u32) -> Self {
        self.term = Term::Years(n);
        self
    }

    pub fn whole_life(mut self) -> Self {
        self.term = Term::WholeLife;
        self
    }

    pub fn periods(mut self, j: u32) -> Self {
        self.periods_per_year = j;
        self
    }

    pub fn with_moment(mut self, m: u32) -> Self {
        self.moment = m;
        self
    }

    pub fn with_force_terminal(mut self, on: bool) -> Self {
        self.force_terminal = on;
        self
    }

    /// `ν = 1/(1+i)`
    pub fn discount(&self) -> f64 {
        1.0 / (1.0 + self.interest)
    }

    /// Force of interest `δ = ln(1+i) = -ln ν`.
    pub fn force_of_interest(&self) -> f64 {
        self.interest.ln_1p()
    }

    /// Start of cover in years, `l + n₁/j`.
    pub fn window_start(&self) -> f64 {
        self.defer_years as f64 + self.defer_periods as f64 / self.periods_per_year as f64
    }

    /// End of cover in years, `None` for whole life.
    pub fn window_end(&self) -> Option<f64> {
        match self.term {
            Term::Years(n) => Some(self.window_start() + n as f64),
            Term::WholeLife => None,
        }
    }

    pub(crate) fn validate(&self, min_moment: u32, uses_periods: bool) -> Result<()> {
        if !self.interest.is_finite() || self.interest <= -1.0 {
            return Err(Error::InvalidSpec(format!("interest rate {} must exceed -1", self.interest)));
        }
        if self.moment < min_moment || self.moment > MAX_MOMENT {
            return Err(Error::InvalidSpec(format!(
                "moment order {} outside {min_moment}..={MAX_MOMENT}",
                self.moment
            )));
        }
        if self.periods_per_year == 0 {
            return Err(Error::InvalidSpec("periods per year must be >= 1".into()));
        }
        if self.defer_periods >= self.periods_per_year {
            return Err(Error::InvalidSpec(format!(
                "deferment periods {} must be below periods per year {}",
                self.defer_periods, self.periods_per_year
            )));
        }
        if !uses_periods && self.defer_periods != 0 {
            return Err(Error::InvalidSpec(
                "deferment periods apply only to 1/j-thly products".into(),
            ));
        }
        if self.term == Term::Years(0) {
            return Err(Error::InvalidSpec("term must be at least one year".into()));
        }
        Ok(())
    }
}

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub value: f64,
    pub method: Method,
    pub assumption: Assumption,
    /// Exclusive upper age of the years actually summed.
    pub horizon: u32,
    /// Number of summands evaluated through a degenerate-limit form.
    pub limit_branches_taken: u32,
}

/// One year of cover: periods `first..end` (of `j`) within year `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YearSlice {
    pub k: u32,
    pub first_period: u32,
    pub end_period: u32,
}

impl YearSlice {
    pub fn is_full(&self, j: u32) -> bool {
        self.first_period == 0 && self.end_period == j
    }
}

/// Table after applying `force_terminal` where requested.
pub(crate) fn effective_table<'a>(table: &'a LifeTable, spec: &ProductSpec) -> Cow<'a, LifeTable> {
    if spec.term == Term::WholeLife && spec.force_terminal && table.terminal_age().is_none() {
        Cow::Owned(table.closed())
    } else {
        Cow::Borrowed(table)
    }
}

/// Years (and partial years) covered by the contract, in ascending order,
/// stopping at the first year with no survivors.
pub fn year_slices(table: &LifeTable, spec: &ProductSpec) -> Result<Vec<YearSlice>> {
    let x = spec.age;
    if table.lx(x)? <= 0.0 {
        return Err(Error::ZeroExposure { age: x });
    }
    let j = spec.periods_per_year;
    let l = spec.defer_years;
    let n1 = spec.defer_periods;
    let terminal = table.terminal_age();

    let last_k = match spec.term {
        Term::Years(n) => {
            let last_k = l + n - 1 + u32::from(n1 > 0);
            let needed = x + last_k + 1;
            let covered = needed <= table.last_age() || terminal.is_some_and(|w| w <= needed);
            if !covered {
                return Err(Error::OutOfRange {
                    age: needed,
                    first: table.base_age(),
                    last: table.last_age(),
                });
            }
            last_k
        }
        Term::WholeLife => match terminal {
            Some(w) => {
                if w <= x + l {
                    return Ok(Vec::new());
                }
                w - x - 1
            }
            None => {
                return Err(Error::InsufficientTable {
                    last_age: table.last_age(),
                })
            }
        },
    };

    let mut slices = Vec::new();
    for k in l..=last_k {
        if table.lx(x + k).map(|v| v <= 0.0).unwrap_or(true) {
            break;
        }
        let first_period = if k == l { n1 } else { 0 };
        let end_period = match spec.term {
            Term::Years(n) if n1 > 0 && k == l + n => n1,
            _ => j,
        };
        slices.push(YearSlice {
            k,
            first_period,
            end_period,
        });
    }
    Ok(slices)
}

/// Data for one summand.
#[derive(Debug, Clone, Copy)]
struct Year {
    k: u32,
    kpx: f64,
    rates: YearRates,
    slice: YearSlice,
}

#[derive(Debug, Clone, Copy)]
struct Summand {
    value: f64,
    limit: bool,
}

impl Summand {
    fn regular(value: f64) -> Self {
        Summand { value, limit: false }
    }

    fn limit(value: f64) -> Self {
        Summand { value, limit: true }
    }
}

fn sum_years<F>(table: &LifeTable, spec: &ProductSpec, mut summand: F) -> Result<MomentResult>
where
    F: FnMut(&Year) -> Result<Summand>,
{
    let table = effective_table(table, spec);
    let slices = year_slices(&table, spec)?;
    let x = spec.age;
    let l0 = table.lx(x)?;
    let mut acc = CompensatedSum::new();
    let mut branches = 0;
    let mut horizon = x + spec.defer_years;
    for slice in slices {
        let start = table.lx(x + slice.k)?;
        let end = table.lx(x + slice.k + 1)?;
        let year = Year {
            k: slice.k,
            kpx: start / l0,
            rates: YearRates::from_counts(start, end),
            slice,
        };
        let s = summand(&year)?;
        acc.add(s.value);
        branches += u32::from(s.limit);
        horizon = x + slice.k + 1;
    }
    Ok(MomentResult {
        value: acc.value(),
        method: Method::ClosedForm,
        assumption: Assumption::ConstantForce,
        horizon,
        limit_branches_taken: branches,
    })
}

/// `c = -ln(ν^m p) = ln(1/p) + m δ`
fn log_ratio(rates: &YearRates, m: u32, delta: f64) -> f64 {
    rates.force() + m as f64 * delta
}

/// `∫_k^{k+1} ν^{mt} f(t) dt / ν^{mk}` expressed as
/// `_k p_x · ln(1/p) · (1 - ν^m p) / ln(1/(ν^m p))`, with its limits.
fn discounted_year_mass(year: &Year, m: u32, delta: f64) -> Summand {
    let r = &year.rates;
    if r.p < NEAR_ZERO_P {
        return Summand::limit(year.kpx);
    }
    let c = log_ratio(r, m, delta);
    if c.abs() < NEAR_UNIT_LOG {
        return Summand::limit(year.kpx * r.force());
    }
    Summand::regular(year.kpx * r.force() * (-(-c).exp_m1() / c))
}

fn discount_factor(m: u32, k: f64, delta: f64) -> f64 {
    (-(m as f64) * k * delta).exp()
}

fn check_constant_force(table: &LifeTable, spec: &ProductSpec, min_moment: u32, uses_periods: bool) -> Result<()> {
    spec.validate(min_moment, uses_periods)?;
    table.lx(spec.age)?;
    Ok(())
}

/// m-th moment of `ν^{T_x}` on `{l <= T_x < l+n}` (or `T_x >= l`).
pub fn term_insurance_moment(table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
    check_constant_force(table, spec, 1, false)?;
    let m = spec.moment;
    let delta = spec.force_of_interest();
    sum_years(table, spec, |y| {
        let mass = discounted_year_mass(y, m, delta);
        Ok(Summand {
            value: discount_factor(m, y.k as f64, delta) * mass.value,
            limit: mass.limit,
        })
    })
}

/// m-th moment of `T_x` on the cover window; `m = 0` gives the probability
/// of death within the window.
pub fn lifetime_moment(table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
    check_constant_force(table, spec, 0, false)?;
    let m = spec.moment;
    if m == 0 {
        return probability_of_window(table, spec);
    }
    sum_years(table, spec, |y| {
        let r = &y.rates;
        let k = y.k as f64;
        if r.p < NEAR_ZERO_P {
            return Ok(Summand::limit(k.powi(m as i32) * y.kpx));
        }
        if r.p == 1.0 {
            return Ok(Summand::limit(0.0));
        }
        let kernel = shifted_power_exp_integral(m, k, r.force())?;
        Ok(Summand::regular(y.kpx * r.force() * kernel))
    })
}

/// `(l_{x+l} - l_{x+l+n}) / l_x`
fn probability_of_window(table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
    let table = effective_table(table, spec);
    let slices = year_slices(&table, spec)?;
    let x = spec.age;
    let l0 = table.lx(x)?;
    let start = x + spec.defer_years;
    let end = match spec.term {
        Term::Years(n) => start + n,
        Term::WholeLife => table.terminal_age().unwrap_or(start),
    };
    let l_end = if end <= table.last_age() { table.lx(end)? } else { 0.0 };
    let horizon = slices.last().map_or(start, |s| x + s.k + 1);
    Ok(MomentResult {
        value: (table.lx(start)? - l_end) / l0,
        method: Method::ClosedForm,
        assumption: Assumption::ConstantForce,
        horizon,
        limit_branches_taken: 0,
    })
}

/// m-th moment of `T_x ν^{T_x}` on the cover window.
pub fn increasing_continuous_moment(table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
    check_constant_force(table, spec, 1, false)?;
    let m = spec.moment;
    let delta = spec.force_of_interest();
    sum_years(table, spec, |y| {
        let r = &y.rates;
        let k = y.k as f64;
        let discount = discount_factor(m, k, delta);
        if r.p < NEAR_ZERO_P {
            return Ok(Summand::limit(discount * k.powi(m as i32) * y.kpx));
        }
        if r.p == 1.0 {
            return Ok(Summand::limit(0.0));
        }
        let c = log_ratio(r, m, delta);
        if c.abs() < NEAR_UNIT_LOG {
            let mf = m as f64;
            let ratio = ((k + 1.0).powi(m as i32 + 1) - k.powi(m as i32 + 1)) / (mf + 1.0);
            return Ok(Summand::limit(y.kpx * r.force() * discount * ratio));
        }
        let kernel = shifted_power_exp_integral(m, k, c)?;
        Ok(Summand::regular(y.kpx * r.force() * discount * kernel))
    })
}

/// m-th moment of `[T_x + 1] ν^{T_x}` on the cover window.
pub fn increasing_annual_moment(table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
    check_constant_force(table, spec, 1, false)?;
    let m = spec.moment;
    let delta = spec.force_of_interest();
    sum_years(table, spec, |y| {
        let k = y.k as f64;
        let mass = discounted_year_mass(y, m, delta);
        Ok(Summand {
            value: (k + 1.0).powi(m as i32) * discount_factor(m, k, delta) * mass.value,
            limit: mass.limit,
        })
    })
}

/// m-th moment of `ν^{T_x} (n + l - [T_x])` on `{l <= T_x < l+n}`.
pub fn decreasing_annual_moment(table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
    check_constant_force(table, spec, 1, false)?;
    let top = match spec.term {
        Term::Years(n) => (n + spec.defer_years) as f64,
        Term::WholeLife => {
            return Err(Error::InvalidSpec(
                "a decreasing benefit needs a finite term".into(),
            ))
        }
    };
    let m = spec.moment;
    let delta = spec.force_of_interest();
    sum_years(table, spec, |y| {
        let k = y.k as f64;
        let mass = discounted_year_mass(y, m, delta);
        Ok(Summand {
            value: (top - k).powi(m as i32) * discount_factor(m, k, delta) * mass.value,
            limit: mass.limit,
        })
    })
}

/// `_k p_x · p^{d/j} · (1 - p^{1/j})`: probability that death falls in
/// period `d` (of `j`) of year `k`.
pub fn short_interval_prob(table: &LifeTable, x: u32, k: u32, d: u32, j: u32) -> Result<f64> {
    if j == 0 || d >= j {
        return Err(Error::InvalidSpec(format!("period {d} must lie in 0..{j}")));
    }
    let kpx = table.k_year_p(x, k)?;
    if kpx == 0.0 {
        table.lx(x + k + 1)?;
        return Ok(0.0);
    }
    let rates = table.year(x + k)?;
    Ok(kpx * frac_pow(rates.ln_p, d, j) * -(rates.ln_p / j as f64).exp_m1())
}

/// `p^{d/j}` from `ln p`, exact 1 at `d = 0` (including `p = 0`).
fn frac_pow(ln_p: f64, d: u32, j: u32) -> f64 {
    if d == 0 {
        1.0
    } else {
        (d as f64 / j as f64 * ln_p).exp()
    }
}

/// m-th moment of `ν^{([T_x j] + 1)/j}` on `{l*n₁ <= T_x < n + l*n₁}`:
/// payment at the end of the `1/j`-period of death.
pub fn mthly_insurance_moment(table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
    check_constant_force(table, spec, 1, true)?;
    let m = spec.moment as f64;
    let j = spec.periods_per_year;
    let jf = j as f64;
    let delta = spec.force_of_interest();
    sum_years(table, spec, |y| {
        let ln_p = y.rates.ln_p;
        let step = -(ln_p / jf).exp_m1();
        let mut inner = CompensatedSum::new();
        for d in y.slice.first_period..y.slice.end_period {
            let discount = (-(d as f64 + 1.0) * m * delta / jf).exp();
            inner.add(discount * frac_pow(ln_p, d, j));
        }
        let value = discount_factor(spec.moment, y.k as f64, delta) * y.kpx * step * inner.value();
        Ok(Summand::regular(value))
    })
}

/// m-th moment of `[j T_x + 1] ν^{T_x}` on `{l*n₁ <= T_x < n + l*n₁}`: a
/// benefit stepping up `j` times per year, paid at the moment of death.
pub fn mthly_increasing_moment(table: &LifeTable, spec: &ProductSpec) -> Result<MomentResult> {
    check_constant_force(table, spec, 1, true)?;
    let m = spec.moment;
    let mf = m as f64;
    let j = spec.periods_per_year;
    let jf = j as f64;
    let delta = spec.force_of_interest();
    sum_years(table, spec, |y| {
        let r = &y.rates;
        let k = y.k as f64;
        // ln(1/p) (1 - (ν^m p)^{1/j}) / ln(1/(ν^m p))
        let (factor, limit) = if r.p < NEAR_ZERO_P {
            (1.0, true)
        } else {
            let c = log_ratio(r, m, delta);
            if c.abs() < NEAR_UNIT_LOG {
                (r.force() / jf, true)
            } else {
                (r.force() * -(-c / jf).exp_m1() / c, false)
            }
        };
        let mut inner = CompensatedSum::new();
        for d in y.slice.first_period..y.slice.end_period {
            let df = d as f64;
            let weight = (df + jf * k + 1.0).powi(m as i32);
            let discount = (-df * mf * delta / jf).exp();
            inner.add(weight * discount * frac_pow(r.ln_p, d, j));
        }
        let value = y.kpx * discount_factor(m, k, delta) * factor * inner.value();
        Ok(Summand { value, limit })
    })
}

/// Term-by-term transcriptions of the explicit `m = 1, 2` formulas.
///
/// These are algebraically equal to the general forms but lose roughly
/// `ε / ln(1/p)^m` relative accuracy to cancellation as `p -> 1`; the
/// general forms above are the ones used for evaluation.
pub mod explicit {
    use super::*;

    fn check(table: &LifeTable, spec: &ProductSpec) -> Result<()> {
        spec.validate(1, false)?;
        if !(1..=2).contains(&spec.moment) {
            return Err(Error::InvalidSpec("explicit forms exist for m = 1, 2 only".into()));
        }
        table.lx(spec.age)?;
        Ok(())
    }

    /// `Σ _k p_x q_{x+k}` over the window.
    pub fn window_probability_sum(table: &LifeTable, spec: &ProductSpec) -> Result<f64> {
        let spec = spec.with_moment(1);
        spec.validate(1, false)?;
        let r = sum_years(table, &spec, |y| Ok(Summand::regular(y.kpx * y.rates.q)))?;
        Ok(r.value)
    }

    /// `E T_x^m 1{window}` for `m = 1, 2`.
    pub fn lifetime_moment(table: &LifeTable, spec: &ProductSpec) -> Result<f64> {
        check(table, spec)?;
        let m = spec.moment;
        let r = sum_years(table, spec, |y| {
            let (p, q, lp) = (y.rates.p, y.rates.q, y.rates.ln_p);
            let k = y.k as f64;
            let value = if m == 1 {
                let l_inv = -lp;
                y.kpx * (q + (k * q - p) * l_inv) / l_inv
            } else {
                let num = 2.0 * q - 2.0 * (q * k - p) * lp + (k * k - (1.0 + k) * (1.0 + k) * p) * lp * lp;
                y.kpx * num / (lp * lp)
            };
            Ok(Summand::regular(value))
        })?;
        Ok(r.value)
    }

    /// `E (T_x ν^{T_x})^m 1{window}` for `m = 1, 2`.
    pub fn increasing_continuous_moment(table: &LifeTable, spec: &ProductSpec) -> Result<f64> {
        check(table, spec)?;
        let m = spec.moment;
        let nu = spec.discount();
        let r = sum_years(table, spec, |y| {
            let (p, lp) = (y.rates.p, y.rates.ln_p);
            let k = y.k as f64;
            let value = if m == 1 {
                let lr = (nu * p).ln();
                y.kpx * -lp * nu.powf(k) * (1.0 - nu * p + (-k + (k + 1.0) * nu * p) * lr) / (lr * lr)
            } else {
                let nu2 = nu * nu;
                let lr = (nu2 * p).ln();
                let cube = lr * lr * lr;
                let first = (-2.0 + 2.0 * p * nu2) / cube;
                let second = lr
                    * ((2.0 * k - 2.0 * p * (1.0 + k) * nu2)
                        + (-k * k + p * (1.0 + k) * (1.0 + k) * nu2) * lr)
                    / cube;
                y.kpx * -lp * nu2.powf(k) * (first + second)
            };
            Ok(Summand::regular(value))
        })?;
        Ok(r.value)
    }

    /// `_k p_x Γ_{m,k} / (p^k (ln 1/p)^m)` summed with `Γ(a, x)` taken
    /// directly from [`crate::special_fn::upper_gamma_int`].
    pub fn lifetime_moment_via_gamma(table: &LifeTable, spec: &ProductSpec) -> Result<f64> {
        spec.validate(1, false)?;
        let m = spec.moment;
        let r = sum_years(table, spec, |y| {
            let force = y.rates.force();
            let k = y.k as f64;
            let g = crate::special_fn::upper_gamma_int(m + 1, k * force)?
                - crate::special_fn::upper_gamma_int(m + 1, (k + 1.0) * force)?;
            Ok(Summand::regular(
                y.kpx * g / (y.rates.p.powf(k) * force.powi(m as i32)),
            ))
        })?;
        Ok(r.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> LifeTable {
        LifeTable::from_csv(include_str!("../data/table1.csv").as_bytes()).unwrap()
    }

    fn window(m: u32) -> ProductSpec {
        ProductSpec::new(50, 0.03, m).deferred(2).years(7)
    }

    #[test]
    fn term_insurance_reference_values() {
        let t = table1();
        let a1 = term_insurance_moment(&t, &window(1)).unwrap();
        assert!((a1.value - 0.0444333).abs() < 5e-8);
        assert_eq!(a1.horizon, 59);
        assert_eq!(a1.limit_branches_taken, 0);
        let a2 = term_insurance_moment(&t, &window(2)).unwrap();
        assert!((a2.value - 0.0377111).abs() < 5e-8);
    }

    #[test]
    fn zero_interest_collapses_to_death_probability() {
        let t = table1();
        for m in 1..=3 {
            let spec = window(m);
            let spec = ProductSpec { interest: 0.0, ..spec };
            let v = term_insurance_moment(&t, &spec).unwrap().value;
            let expected = (93048.0 - 88107.0) / 94058.0;
            assert!((v - expected).abs() < 1e-15, "m = {m}");
        }
    }

    #[test]
    fn lifetime_probability_closure() {
        let t = table1();
        let v = lifetime_moment(&t, &window(0)).unwrap().value;
        assert_eq!(v, (93048.0 - 88107.0) / 94058.0);
    }

    #[test]
    fn single_year_decreasing_equals_term_insurance() {
        let t = table1();
        let spec = ProductSpec::new(52, 0.03, 2).years(1);
        let d = decreasing_annual_moment(&t, &spec).unwrap().value;
        let a = term_insurance_moment(&t, &spec).unwrap().value;
        assert!((d - a).abs() <= 2.0 * f64::EPSILON * a);
    }

    #[test]
    fn annual_increasing_single_year_without_interest_is_q() {
        let t = table1();
        let spec = ProductSpec::new(50, 0.0, 1).years(1);
        let v = increasing_annual_moment(&t, &spec).unwrap().value;
        assert!((v - t.one_year_q(50).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn unit_periods_pay_at_year_end() {
        let t = table1();
        let spec = window(2).periods(1);
        let v = mthly_insurance_moment(&t, &spec).unwrap().value;
        let nu: f64 = 1.0 / 1.03;
        let expected: f64 = (2..9)
            .map(|k| nu.powi(2 * (k + 1)) * t.k_year_p(50, k as u32).unwrap() * t.one_year_q(50 + k as u32).unwrap())
            .sum();
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn unit_periods_increasing_matches_annual_increasing() {
        let t = table1();
        for m in 1..=3 {
            let spec = window(m).periods(1);
            let a = mthly_increasing_moment(&t, &spec).unwrap().value;
            let b = increasing_annual_moment(&t, &spec).unwrap().value;
            assert!((a - b).abs() <= 1e-14 * b, "m = {m}");
        }
    }

    #[test]
    fn short_interval_values() {
        let toy = LifeTable::new(0, vec![1.0, 0.8]).unwrap();
        let v = short_interval_prob(&toy, 0, 0, 6, 12).unwrap();
        assert!((v - 0.8f64.sqrt() * (1.0 - 0.8f64.powf(1.0 / 12.0))).abs() < 1e-16);
        assert!((v - 0.0164785).abs() < 5e-8);
        let first = short_interval_prob(&toy, 0, 0, 0, 12).unwrap();
        assert!((first - (1.0 - 0.8f64.powf(1.0 / 12.0))).abs() < 1e-16);
        assert!(short_interval_prob(&toy, 0, 0, 12, 12).is_err());
    }

    #[test]
    fn whole_life_requires_terminal_age() {
        let t = table1();
        let spec = ProductSpec::new(50, 0.03, 1);
        assert_eq!(
            term_insurance_moment(&t, &spec),
            Err(Error::InsufficientTable { last_age: 59 })
        );
        let forced = term_insurance_moment(&t, &spec.with_force_terminal(true)).unwrap();
        assert_eq!(forced.horizon, 60);
        // the closing year has p = 0
        assert_eq!(forced.limit_branches_taken, 1);
    }

    #[test]
    fn spec_validation() {
        let t = table1();
        let bad = [
            window(0),
            window(21),
            ProductSpec { interest: -1.0, ..window(1) },
            window(1).deferred_periods(1),
            window(1).years(0),
        ];
        for spec in bad {
            assert!(matches!(term_insurance_moment(&t, &spec), Err(Error::InvalidSpec(_))), "{spec:?}");
        }
        assert!(matches!(
            mthly_insurance_moment(&t, &window(1).periods(4).deferred_periods(4)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            term_insurance_moment(&t, &window(1).years(8)),
            Err(Error::OutOfRange { age: 60, .. })
        ));
        assert!(matches!(
            decreasing_annual_moment(&t.closed(), &ProductSpec::new(50, 0.03, 1)),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn explicit_forms_agree_on_reference_window() {
        let t = table1();
        for m in 1..=2 {
            let general = lifetime_moment(&t, &window(m)).unwrap().value;
            let explicit = explicit::lifetime_moment(&t, &window(m)).unwrap();
            assert!((general - explicit).abs() <= 1e-12 * general, "m = {m}");
            let general = increasing_continuous_moment(&t, &window(m)).unwrap().value;
            let explicit = explicit::increasing_continuous_moment(&t, &window(m)).unwrap();
            assert!((general - explicit).abs() <= 1e-12 * general, "m = {m}");
        }
    }
}
