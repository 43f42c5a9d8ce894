//! Reference values by adaptive quadrature of `g(t) f_x(t)` year by year.
//!
//! Works for every interpolation law and is independent of the closed
//! forms, which it is used to check. Integration panels never cross an
//! integer age, nor a `1/j` boundary for payoffs that jump there.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::accumulate::CompensatedSum;
use crate::error::{Error, Result};
use crate::fractional_age::{Assumption, YearLaw};
use crate::life_table::LifeTable;
use crate::quadrature::{integrate, Tolerance};

/// Default absolute tolerance per year.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Panel budget for each integration interval.
pub const MAX_PANELS: usize = 2000;

/// Relative accuracy requested alongside the absolute tolerance.
const REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Monotonicity {
    NonIncreasing,
    NonDecreasing,
    Mixed,
}

/// A payoff `g(t)` as a function of the future lifetime.
#[derive(Clone)]
pub struct Payoff {
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub monotonicity: Monotonicity,
    /// `g` may jump at multiples of `1/pieces_per_year` but is smooth in between.
    pub pieces_per_year: u32,
}

impl fmt::Debug for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Payoff")
            .field("monotonicity", &self.monotonicity)
            .field("pieces_per_year", &self.pieces_per_year)
            .finish_non_exhaustive()
    }
}

fn monotone_discount(i: f64) -> Monotonicity {
    if i >= 0.0 {
        Monotonicity::NonIncreasing
    } else {
        Monotonicity::NonDecreasing
    }
}

impl Payoff {
    pub fn new<F>(g: F, monotonicity: Monotonicity) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Payoff {
            g: Arc::new(g),
            monotonicity,
            pieces_per_year: 1,
        }
    }

    pub fn with_pieces(mut self, pieces_per_year: u32) -> Self {
        self.pieces_per_year = pieces_per_year.max(1);
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    pub fn constant(c: f64) -> Self {
        Payoff::new(move |_| c, Monotonicity::NonIncreasing)
    }

    /// `ν^{mt}`
    pub fn discount_power(i: f64, m: u32) -> Self {
        let rate = m as f64 * i.ln_1p();
        Payoff::new(move |t| (-rate * t).exp(), monotone_discount(i))
    }

    /// `t^m`
    pub fn lifetime_power(m: u32) -> Self {
        let mono = if m == 0 {
            Monotonicity::NonIncreasing
        } else {
            Monotonicity::NonDecreasing
        };
        Payoff::new(move |t| t.powi(m as i32), mono)
    }

    /// `(t ν^t)^m`
    pub fn increasing_continuous(i: f64, m: u32) -> Self {
        let rate = m as f64 * i.ln_1p();
        let mono = if i <= 0.0 {
            Monotonicity::NonDecreasing
        } else {
            Monotonicity::Mixed
        };
        Payoff::new(move |t| t.powi(m as i32) * (-rate * t).exp(), mono)
    }

    /// `([t] + 1)^m ν^{mt}`
    pub fn increasing_annual(i: f64, m: u32) -> Self {
        let rate = m as f64 * i.ln_1p();
        let mono = if i <= 0.0 {
            Monotonicity::NonDecreasing
        } else {
            Monotonicity::Mixed
        };
        Payoff::new(move |t| (t.floor() + 1.0).powi(m as i32) * (-rate * t).exp(), mono)
    }

    /// `(top - [t])^m ν^{mt}`
    pub fn decreasing_annual(i: f64, m: u32, top: u32) -> Self {
        let rate = m as f64 * i.ln_1p();
        let top = top as f64;
        let mono = if i >= 0.0 {
            Monotonicity::NonIncreasing
        } else {
            Monotonicity::Mixed
        };
        Payoff::new(move |t| (top - t.floor()).powi(m as i32) * (-rate * t).exp(), mono)
    }

    /// `ν^{m([jt] + 1)/j}`
    pub fn mthly_insurance(i: f64, m: u32, j: u32) -> Self {
        let rate = m as f64 * i.ln_1p();
        let jf = j as f64;
        Payoff::new(
            move |t| (-rate * ((jf * t).floor() + 1.0) / jf).exp(),
            monotone_discount(i),
        )
        .with_pieces(j)
    }

    /// `([jt] + 1)^m ν^{mt}`
    pub fn mthly_increasing(i: f64, m: u32, j: u32) -> Self {
        let rate = m as f64 * i.ln_1p();
        let jf = j as f64;
        let mono = if i <= 0.0 {
            Monotonicity::NonDecreasing
        } else {
            Monotonicity::Mixed
        };
        Payoff::new(
            move |t| ((jf * t).floor() + 1.0).powi(m as i32) * (-rate * t).exp(),
            mono,
        )
        .with_pieces(j)
    }
}

/// Result of [`expectation_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    /// Sum of the per-interval error estimates.
    pub error: f64,
    /// Exclusive upper age of the years integrated.
    pub horizon: u32,
}

/// Splits `[lo, hi]` (inside one year starting at `k`) at multiples of `1/j`.
pub(crate) fn piece_bounds(k: f64, lo: f64, hi: f64, j: u32) -> Vec<(f64, f64)> {
    let jf = j as f64;
    let mut cuts = vec![lo];
    for d in 1..j {
        let b = k + d as f64 / jf;
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    cuts.push(hi);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `E[g(T_x) 1{l_start <= T_x < l_end}]` under `assumption`.
///
/// `l_end = f64::INFINITY` integrates up to the table's terminal age.
pub fn expectation(
    table: &LifeTable,
    assumption: Assumption,
    x: u32,
    payoff: &Payoff,
    l_start: f64,
    l_end: f64,
    tol: f64,
) -> Result<f64> {
    expectation_detailed(table, assumption, x, payoff, l_start, l_end, tol).map(|e| e.value)
}

pub fn expectation_detailed(
    table: &LifeTable,
    assumption: Assumption,
    x: u32,
    payoff: &Payoff,
    l_start: f64,
    l_end: f64,
    tol: f64,
) -> Result<OracleEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidSpec(format!("tolerance {tol} must be positive")));
    }
    if !(l_start >= 0.0 && l_start.is_finite() && l_end >= l_start) {
        return Err(Error::InvalidSpec(format!("invalid window [{l_start}, {l_end})")));
    }
    if table.lx(x)? <= 0.0 {
        return Err(Error::ZeroExposure { age: x });
    }
    let terminal = table.terminal_age();
    if l_end.is_infinite() && terminal.is_none() {
        return Err(Error::InsufficientTable {
            last_age: table.last_age(),
        });
    }
    let tolerance = Tolerance { abs: tol, rel: REL_TOL };

    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    let first_year = l_start.floor() as u32;
    let mut horizon = x + first_year;
    let mut k = first_year;
    while (k as f64) < l_end {
        let age = x + k;
        let start = match table.lx(age) {
            Ok(v) => v,
            Err(_) if terminal.is_some_and(|w| w <= age) => break,
            Err(e) => return Err(e),
        };
        if start <= 0.0 {
            break;
        }
        let law = YearLaw::new(table, assumption, x, k)?;
        let kf = k as f64;
        let lo = l_start.max(kf);
        let hi = l_end.min(kf + 1.0);
        horizon = age + 1;

        if law.is_point_mass() {
            // every death of the year happens at its start
            if lo == kf {
                value.add(payoff.eval(kf) * law.kpx);
            }
        } else if lo < hi {
            for (a, b) in piece_bounds(kf, lo, hi, payoff.pieces_per_year) {
                let est = integrate(
                    |t| payoff.eval(t) * law.density(t - kf).unwrap_or(f64::NAN),
                    a,
                    b,
                    tolerance,
                    MAX_PANELS,
                )?;
                value.add(est.value);
                error += est.error;
            }
        }
        k += 1;
    }
    Ok(OracleEstimate {
        value: value.value(),
        error,
        horizon,
    })
}

/// The three expectations and whether they are ordered as expected for a
/// monotone payoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingReport {
    pub udd: f64,
    pub constant_force: f64,
    pub balducci: f64,
    pub monotonicity: Monotonicity,
    pub holds: bool,
}

/// For non-increasing `g`: `UDD <= C <= B`; for non-decreasing `g` the
/// reverse. Comparisons allow a slack of `10 * tol` per year.
pub fn ordering_check(
    table: &LifeTable,
    x: u32,
    payoff: &Payoff,
    l: u32,
    n: u32,
    tol: f64,
) -> Result<OrderingReport> {
    if payoff.monotonicity == Monotonicity::Mixed {
        return Err(Error::MixedMonotonicity);
    }
    let (lo, hi) = (l as f64, (l + n) as f64);
    let eval = |a| expectation(table, a, x, payoff, lo, hi, tol);
    let udd = eval(Assumption::Udd)?;
    let c = eval(Assumption::ConstantForce)?;
    let b = eval(Assumption::Balducci)?;
    let slack = 10.0 * tol * n.max(1) as f64;
    let holds = match payoff.monotonicity {
        Monotonicity::NonIncreasing => udd <= c + slack && c <= b + slack,
        Monotonicity::NonDecreasing => udd + slack >= c && c + slack >= b,
        Monotonicity::Mixed => unreachable!(),
    };
    Ok(OrderingReport {
        udd,
        constant_force: c,
        balducci: b,
        monotonicity: payoff.monotonicity,
        holds,
    })
}

/// `∫_{x_lo}^{x_lo+200} t^{a-1} e^{-t} dt`, a quadrature reference for the
/// incomplete gamma function.
pub fn gamma_integrand_check(a: u32, x_lo: f64) -> Result<f64> {
    if a == 0 {
        return Err(Error::InvalidSpec("gamma order must be >= 1".into()));
    }
    let power = (a - 1) as i32;
    let est = integrate(
        |t: f64| t.powi(power) * (-t).exp(),
        x_lo,
        x_lo + 200.0,
        Tolerance::relative(1e-15),
        MAX_PANELS,
    )?;
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> LifeTable {
        LifeTable::from_csv(include_str!("../data/table1.csv").as_bytes()).unwrap()
    }

    #[test]
    fn unit_payoff_gives_window_probability() {
        let t = table1();
        for a in Assumption::ALL {
            let v = expectation(&t, a, 50, &Payoff::constant(1.0), 2.0, 9.0, DEFAULT_TOL).unwrap();
            assert!((v - (93048.0 - 88107.0) / 94058.0).abs() < 1e-13, "{a}");
        }
    }

    #[test]
    fn reference_values_by_assumption() {
        let t = table1();
        let g = Payoff::discount_power(0.03, 1);
        let u = expectation(&t, Assumption::Udd, 50, &g, 2.0, 9.0, DEFAULT_TOL).unwrap();
        let b = expectation(&t, Assumption::Balducci, 50, &g, 2.0, 9.0, DEFAULT_TOL).unwrap();
        assert!((u - 0.0444324).abs() < 5e-8);
        assert!((b - 0.0444342).abs() < 5e-8);
    }

    #[test]
    fn ordering_of_discount_and_lifetime() {
        let t = table1();
        let r = ordering_check(&t, 50, &Payoff::discount_power(0.03, 1), 2, 7, DEFAULT_TOL).unwrap();
        assert!(r.holds && r.udd < r.constant_force && r.constant_force < r.balducci);
        let r = ordering_check(&t, 50, &Payoff::lifetime_power(1), 2, 7, DEFAULT_TOL).unwrap();
        assert!(r.holds && r.udd > r.constant_force && r.constant_force > r.balducci);
        let r = ordering_check(&t, 50, &Payoff::constant(2.0), 2, 7, DEFAULT_TOL).unwrap();
        assert!(r.holds);
        assert!((r.udd - r.balducci).abs() < 1e-13);
        assert_eq!(
            ordering_check(&t, 50, &Payoff::increasing_continuous(0.03, 1), 2, 7, DEFAULT_TOL),
            Err(Error::MixedMonotonicity)
        );
    }

    #[test]
    fn gamma_integrand_values() {
        assert!((gamma_integrand_check(1, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_integrand_check(2, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_integrand_check(3, 1.0).unwrap() - 1.8393972).abs() < 5e-8);
    }

    #[test]
    fn point_mass_years() {
        let t = LifeTable::new(0, vec![1.0, 0.5, 0.0]).unwrap();
        let g = Payoff::lifetime_power(1);
        let c = expectation(&t, Assumption::ConstantForce, 0, &g, 0.0, f64::INFINITY, DEFAULT_TOL).unwrap();
        // year 0 under constant force: ∫ t ln2 2^{-t} dt; year 1: mass 1/2 at t = 1
        let ln2 = std::f64::consts::LN_2;
        let year0 = (1.0 - 0.5 * (1.0 + ln2)) / ln2;
        assert!((c - (year0 + 0.5)).abs() < 1e-13);
        let u = expectation(&t, Assumption::Udd, 0, &g, 0.0, f64::INFINITY, DEFAULT_TOL).unwrap();
        assert!((u - (0.25 + 0.75)).abs() < 1e-13);
    }

    #[test]
    fn whole_life_needs_terminal_age() {
        let t = table1();
        assert_eq!(
            expectation(&t, Assumption::Udd, 50, &Payoff::constant(1.0), 0.0, f64::INFINITY, DEFAULT_TOL),
            Err(Error::InsufficientTable { last_age: 59 })
        );
    }

    #[test]
    fn piece_splitting() {
        let p = piece_bounds(3.0, 3.0, 4.0, 4);
        assert_eq!(p, vec![(3.0, 3.25), (3.25, 3.5), (3.5, 3.75), (3.75, 4.0)]);
        let p = piece_bounds(3.0, 3.3, 3.6, 4);
        assert_eq!(p, vec![(3.3, 3.5), (3.5, 3.6)]);
    }
}
