//! Discrete life tables: expected survivor counts `l_x` at consecutive
//! integer ages and the one-year and k-year probabilities derived from them.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Expected survivors at consecutive integer ages.
///
/// Counts are stored as reals so that integer-valued published tables and
/// tables sampled from a continuous law share one representation. Only
/// ratios of counts enter any computation; the radix is kept for display.
#[derive(Debug, Clone, PartialEq)]
pub struct LifeTable {
    base_age: u32,
    survivors: Vec<f64>,
}

/// One-year and k-year probabilities for a life aged `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityBundle {
    /// `p_x`
    pub p: f64,
    /// `q_x = 1 - p_x`
    pub q: f64,
    /// `_k p_x`
    pub kpx: f64,
}

/// Per-year quantities used by the interpolation laws and the closed forms.
///
/// `q` is computed from the death count `l_a - l_{a+1}` rather than as
/// `1 - p`, and `ln_p` goes through `ln_1p(-q)` when `p` is close to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YearRates {
    pub p: f64,
    pub q: f64,
    /// `ln p`; `-inf` when `p = 0`.
    pub ln_p: f64,
}

impl YearRates {
    pub(crate) fn from_counts(start: f64, end: f64) -> Self {
        let p = end / start;
        let q = (start - end) / start;
        let ln_p = if q < 0.5 { (-q).ln_1p() } else { p.ln() };
        YearRates { p, q, ln_p }
    }

    /// `ln(1/p)`, the constant force over the year.
    pub fn force(&self) -> f64 {
        -self.ln_p
    }
}

impl LifeTable {
    /// Builds a table from survivor counts starting at `base_age`.
    pub fn new(base_age: u32, survivors: Vec<f64>) -> Result<Self> {
        if survivors.is_empty() {
            return Err(Error::EmptyTable);
        }
        for (offset, &l) in survivors.iter().enumerate() {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::MalformedCsv {
                    line: offset + 2,
                    reason: format!("survivor count {l} is not a non-negative real"),
                });
            }
        }
        if survivors[0] <= 0.0 {
            return Err(Error::ZeroExposure { age: base_age });
        }
        if let Some(offset) = survivors.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::NonMonotone {
                age: base_age + offset as u32,
            });
        }
        Ok(LifeTable {
            base_age,
            survivors,
        })
    }

    /// Parses CSV text with header `age,lx`.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .has_headers(true)
            .from_reader(source);

        let headers = reader.headers().map_err(|e| Error::MalformedCsv {
            line: 1,
            reason: e.to_string(),
        })?;
        if headers.len() != 2 || &headers[0] != "age" || &headers[1] != "lx" {
            return Err(Error::MalformedCsv {
                line: 1,
                reason: format!("expected header `age,lx`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }

        let mut base_age = None;
        let mut survivors = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let line = row + 2;
            let record = record.map_err(|e| Error::MalformedCsv {
                line,
                reason: e.to_string(),
            })?;
            if record.len() != 2 {
                return Err(Error::MalformedCsv {
                    line,
                    reason: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let age: u32 = record[0].parse().map_err(|_| Error::MalformedCsv {
                line,
                reason: format!("age `{}` is not a non-negative integer", &record[0]),
            })?;
            let lx: f64 = record[1].parse().map_err(|_| Error::MalformedCsv {
                line,
                reason: format!("lx `{}` is not a number", &record[1]),
            })?;
            if !lx.is_finite() || lx < 0.0 {
                return Err(Error::MalformedCsv {
                    line,
                    reason: format!("lx `{}` must be a non-negative real", &record[1]),
                });
            }
            match base_age {
                None => base_age = Some(age),
                Some(first) => {
                    let expected = first + survivors.len() as u32;
                    if age != expected {
                        return Err(Error::NonConsecutiveAges {
                            expected,
                            found: age,
                        });
                    }
                }
            }
            survivors.push(lx);
        }

        match base_age {
            None => Err(Error::EmptyTable),
            Some(first) => LifeTable::new(first, survivors),
        }
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| Error::MalformedCsv {
            line: 0,
            reason: format!("{}: {e}", path.as_ref().display()),
        })?;
        LifeTable::from_csv(std::io::BufReader::new(file))
    }

    /// Writes the table as `age,lx` CSV. Values use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "age,lx")?;
        for (offset, l) in self.survivors.iter().enumerate() {
            writeln!(out, "{},{}", self.base_age + offset as u32, l)?;
        }
        Ok(())
    }

    pub fn base_age(&self) -> u32 {
        self.base_age
    }

    /// Last tabulated age.
    pub fn last_age(&self) -> u32 {
        self.base_age + self.survivors.len() as u32 - 1
    }

    pub fn radix(&self) -> f64 {
        self.survivors[0]
    }

    pub fn survivors(&self) -> &[f64] {
        &self.survivors
    }

    fn out_of_range(&self, age: u32) -> Error {
        Error::OutOfRange {
            age,
            first: self.base_age,
            last: self.last_age(),
        }
    }

    /// `l_age`.
    pub fn lx(&self, age: u32) -> Result<f64> {
        age.checked_sub(self.base_age)
            .and_then(|offset| self.survivors.get(offset as usize))
            .copied()
            .ok_or_else(|| self.out_of_range(age))
    }

    fn exposed_lx(&self, age: u32) -> Result<f64> {
        let l = self.lx(age)?;
        if l > 0.0 {
            Ok(l)
        } else {
            Err(Error::ZeroExposure { age })
        }
    }

    /// `p_age = l_{age+1} / l_age`.
    pub fn one_year_p(&self, age: u32) -> Result<f64> {
        let start = self.exposed_lx(age)?;
        let end = self.lx(age + 1)?;
        Ok(end / start)
    }

    /// `q_age = 1 - p_age`.
    pub fn one_year_q(&self, age: u32) -> Result<f64> {
        Ok(1.0 - self.one_year_p(age)?)
    }

    /// `_k p_age = l_{age+k} / l_age`.
    pub fn k_year_p(&self, age: u32, k: u32) -> Result<f64> {
        let start = self.exposed_lx(age)?;
        let end = self.lx(age + k)?;
        Ok(end / start)
    }

    pub fn probabilities(&self, age: u32, k: u32) -> Result<ProbabilityBundle> {
        let p = self.one_year_p(age)?;
        Ok(ProbabilityBundle {
            p,
            q: 1.0 - p,
            kpx: self.k_year_p(age, k)?,
        })
    }

    /// Rates for the year starting at `age`.
    pub fn year(&self, age: u32) -> Result<YearRates> {
        let start = self.exposed_lx(age)?;
        let end = self.lx(age + 1)?;
        Ok(YearRates::from_counts(start, end))
    }

    /// First age with no survivors, if the table reaches zero.
    pub fn terminal_age(&self) -> Option<u32> {
        self.survivors
            .iter()
            .position(|&l| l == 0.0)
            .map(|offset| self.base_age + offset as u32)
    }

    /// Returns a table in which death is certain during the year following
    /// the last tabulated age (an explicit terminal age is appended).
    pub fn closed(&self) -> LifeTable {
        if self.terminal_age().is_some() {
            return self.clone();
        }
        let mut survivors = self.survivors.clone();
        survivors.push(0.0);
        LifeTable {
            base_age: self.base_age,
            survivors,
        }
    }
}
