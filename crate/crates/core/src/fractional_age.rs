//! Survival and density at fractional ages under the three classical
//! interpolation laws between integer ages.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::life_table::{LifeTable, YearRates};

/// Fractional-age interpolation law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Assumption {
    /// Uniform distribution of deaths: `s` linear within each year.
    Udd,
    /// Constant force of mortality: `s` geometric within each year.
    ConstantForce,
    /// Balducci: `1/s` linear within each year.
    Balducci,
}

impl Assumption {
    pub const ALL: [Assumption; 3] = [Assumption::Udd, Assumption::ConstantForce, Assumption::Balducci];

    pub fn label(self) -> &'static str {
        match self {
            Assumption::Udd => "UDD",
            Assumption::ConstantForce => "C",
            Assumption::Balducci => "B",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Assumption {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "udd" | "u" => Ok(Assumption::Udd),
            "c" | "constant" | "constantforce" | "constant-force" => Ok(Assumption::ConstantForce),
            "b" | "balducci" => Ok(Assumption::Balducci),
            other => Err(format!("unknown assumption `{other}` (expected UDD, C or B)")),
        }
    }
}

/// The law of `T_x` restricted to one year `[k, k+1)` of future lifetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YearLaw {
    pub assumption: Assumption,
    /// `k` (years since age x)
    pub k: u32,
    /// `x + k`
    pub age: u32,
    /// `_k p_x`
    pub kpx: f64,
    /// `_{k+1} p_x`
    pub k1px: f64,
    pub rates: YearRates,
}

impl YearLaw {
    /// Law of year `k` for a life aged `x`. Requires `l_x > 0` and ages
    /// `x+k`, `x+k+1` tabulated.
    pub fn new(table: &LifeTable, assumption: Assumption, x: u32, k: u32) -> Result<YearLaw> {
        let l0 = table.lx(x)?;
        if l0 <= 0.0 {
            return Err(Error::ZeroExposure { age: x });
        }
        let start = table.lx(x + k)?;
        let end = table.lx(x + k + 1)?;
        if start <= 0.0 {
            return Err(Error::ZeroExposure { age: x + k });
        }
        Ok(YearLaw {
            assumption,
            k,
            age: x + k,
            kpx: start / l0,
            k1px: end / l0,
            rates: YearRates::from_counts(start, end),
        })
    }

    /// Whether every death in the year happens at its very start, which is
    /// the limit of the constant-force and Balducci laws as `q -> 1`.
    pub fn is_point_mass(&self) -> bool {
        self.rates.p == 0.0 && self.assumption != Assumption::Udd
    }

    /// `_{k+s} p_x` for `s` in `[0, 1]`.
    pub fn survival(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(self.kpx);
        }
        Ok(match self.assumption {
            Assumption::Udd => (1.0 - s) * self.kpx + s * self.k1px,
            Assumption::ConstantForce => self.kpx * (s * self.rates.ln_p).exp(),
            Assumption::Balducci => {
                if self.rates.p == 0.0 {
                    return Err(Error::BalducciDegenerate { age: self.age });
                }
                self.k1px / (1.0 - (1.0 - s) * self.rates.q)
            }
        })
    }

    /// `f_x(k+s)` for `s` in `[0, 1)`; at `s = 0` this is the right limit.
    pub fn density(&self, s: f64) -> Result<f64> {
        let r = &self.rates;
        match self.assumption {
            Assumption::Udd => Ok(self.kpx - self.k1px),
            Assumption::ConstantForce => {
                if r.p == 0.0 {
                    return Err(Error::DegenerateYear { age: self.age });
                }
                Ok(self.kpx * (s * r.ln_p).exp() * r.force())
            }
            Assumption::Balducci => {
                if r.p == 0.0 {
                    return Err(Error::BalducciDegenerate { age: self.age });
                }
                let denom = 1.0 - (1.0 - s) * r.q;
                Ok(self.k1px * r.q / (denom * denom))
            }
        }
    }
}

fn split_age(u: f64) -> Result<(u32, f64)> {
    if !u.is_finite() || u < 0.0 {
        return Err(Error::InvalidSpec(format!("fractional duration {u} must be finite and >= 0")));
    }
    let k = u.floor();
    Ok((k as u32, u - k))
}

/// `_u p_x` under the given interpolation law.
pub fn survival_fraction(table: &LifeTable, assumption: Assumption, x: u32, u: f64) -> Result<f64> {
    let (k, s) = split_age(u)?;
    if s == 0.0 {
        return table.k_year_p(x, k);
    }
    let l_start = table.lx(x + k)?;
    table.lx(x + k + 1)?;
    if l_start == 0.0 {
        if table.lx(x)? <= 0.0 {
            return Err(Error::ZeroExposure { age: x });
        }
        return match assumption {
            Assumption::Balducci => Err(Error::BalducciDegenerate { age: x + k }),
            _ => Ok(0.0),
        };
    }
    let law = YearLaw::new(table, assumption, x, k)?;
    law.survival(s)
}

/// Conditional density `f_x(t)` of the future lifetime under the given law.
/// At integer `t` the value for the year beginning at `t` is returned.
pub fn density(table: &LifeTable, assumption: Assumption, x: u32, t: f64) -> Result<f64> {
    let (k, s) = split_age(t)?;
    let law = YearLaw::new(table, assumption, x, k)?;
    law.density(s)
}
