//! Gompertz law: `μ(u) = β e^{αu}`, `s(u) = exp(-(β/α)(e^{αu} - 1))`.

use serde::{Deserialize, Serialize};

use crate::accumulate::CompensatedSum;
use crate::error::{Error, Result};
use crate::life_table::LifeTable;
use crate::oracle::{piece_bounds, Payoff, MAX_PANELS};
use crate::quadrature::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GompertzParams {
    alpha: f64,
    beta: f64,
}

impl GompertzParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "Gompertz parameters must be positive (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(GompertzParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `s(u)`
    pub fn survival(&self, u: f64) -> f64 {
        (-(self.beta / self.alpha) * (self.alpha * u).exp_m1()).exp()
    }

    /// `_k p_x = exp(-(β/α) e^{αx} (e^{αk} - 1))`
    pub fn k_year_p(&self, x: f64, k: f64) -> f64 {
        (-(self.beta / self.alpha) * (self.alpha * x).exp() * (self.alpha * k).exp_m1()).exp()
    }

    /// `μ(u)`
    pub fn force(&self, u: f64) -> f64 {
        self.beta * (self.alpha * u).exp()
    }

    /// `f_0(u) = μ(u) s(u)`
    pub fn density(&self, u: f64) -> f64 {
        self.force(u) * self.survival(u)
    }

    /// Table with `l_x = radix * s(x)` for `x = 0..=max_age`. Survival
    /// underflows to exactly zero at extreme ages, which then marks the
    /// terminal age.
    pub fn discretize(&self, max_age: u32, radix: f64) -> Result<LifeTable> {
        if max_age < 1 {
            return Err(Error::InvalidSpec("max_age must be >= 1".into()));
        }
        if !(radix > 0.0 && radix.is_finite()) {
            return Err(Error::InvalidSpec(format!("radix {radix} must be positive")));
        }
        let survivors = (0..=max_age).map(|x| radix * self.survival(x as f64)).collect();
        LifeTable::new(0, survivors)
    }

    /// First whole duration `u` past `from` with `_u p_x < cutoff`.
    fn truncation_point(&self, x: f64, from: f64, cutoff: f64) -> f64 {
        let mut u = from.ceil();
        while self.k_year_p(x, u) >= cutoff {
            u += 1.0;
        }
        u
    }

    /// `E[g(T_x) 1{l_start <= T_x < l_end}]` under the continuous law.
    ///
    /// An infinite `l_end` is cut where `_u p_x < 1e-16 * tol`; the neglected
    /// mass is bounded by `g` times the survival at the cut.
    pub fn exact_expectation(&self, x: u32, payoff: &Payoff, l_start: f64, l_end: f64, tol: f64) -> Result<f64> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidSpec(format!("tolerance {tol} must be positive")));
        }
        if !(l_start >= 0.0 && l_start.is_finite() && l_end >= l_start) {
            return Err(Error::InvalidSpec(format!("invalid window [{l_start}, {l_end})")));
        }
        let xf = x as f64;
        let end = if l_end.is_finite() {
            l_end
        } else {
            self.truncation_point(xf, l_start, 1e-16 * tol)
        };
        let tolerance = Tolerance { abs: tol, rel: 1e-13 };
        let mut acc = CompensatedSum::new();
        let mut k = l_start.floor();
        while k < end {
            let lo = l_start.max(k);
            let hi = end.min(k + 1.0);
            for (a, b) in piece_bounds(k, lo, hi, payoff.pieces_per_year) {
                let est = integrate(
                    |t| payoff.eval(t) * self.force(xf + t) * self.k_year_p(xf, t),
                    a,
                    b,
                    tolerance,
                    MAX_PANELS,
                )?;
                acc.add(est.value);
            }
            k += 1.0;
        }
        Ok(acc.value())
    }
}
