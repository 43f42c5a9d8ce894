//! The reference premium tables: a fixed set of rows (product, moment) by
//! columns (interpolation law, or the continuous Gompertz law).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_form::ProductSpec;
use crate::error::{Error, Result};
use crate::fractional_age::Assumption;
use crate::gompertz::GompertzParams;
use crate::life_table::LifeTable;
use crate::product::Product;

/// Oldest age kept when a Gompertz law is turned into a table.
pub const GOMPERTZ_MAX_AGE: u32 = 140;

/// The bundled ten-year extract (ages 50 to 59, both sexes).
pub const REFERENCE_TABLE_CSV: &str = include_str!("../data/table1.csv");

pub fn reference_table() -> LifeTable {
    LifeTable::from_csv(REFERENCE_TABLE_CSV.as_bytes()).expect("bundled table is valid")
}

pub fn reference_gompertz() -> GompertzParams {
    GompertzParams::new(0.09, 0.0007).expect("positive parameters")
}

/// A value column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Law {
    Interpolated(Assumption),
    /// Continuous Gompertz law, no interpolation.
    Gompertz,
}

impl Law {
    pub fn label(self) -> &'static str {
        match self {
            Law::Interpolated(a) => a.label(),
            Law::Gompertz => "G",
        }
    }

    pub fn interpolated() -> [Law; 3] {
        Assumption::ALL.map(Law::Interpolated)
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Law {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("g") || s.trim().eq_ignore_ascii_case("gompertz") {
            return Ok(Law::Gompertz);
        }
        s.parse::<Assumption>()
            .map(Law::Interpolated)
            .map_err(|_| format!("unknown assumption `{}` (expected UDD, C, B or G)", s.trim()))
    }
}

/// Mortality input: a table, optionally generated from a Gompertz law.
#[derive(Debug, Clone)]
pub struct Source {
    pub table: LifeTable,
    pub gompertz: Option<GompertzParams>,
}

impl Source {
    pub fn from_table(table: LifeTable) -> Self {
        Source { table, gompertz: None }
    }

    pub fn from_gompertz(params: GompertzParams) -> Result<Self> {
        Ok(Source {
            table: params.discretize(GOMPERTZ_MAX_AGE, 1.0)?,
            gompertz: Some(params),
        })
    }

    pub fn evaluate(&self, law: Law, product: Product, spec: &ProductSpec) -> Result<f64> {
        match law {
            Law::Interpolated(a) => product.evaluate(&self.table, spec, a).map(|r| r.value),
            Law::Gompertz => match &self.gompertz {
                Some(g) => product.gompertz(g, spec),
                None => Err(Error::InvalidSpec(
                    "the G column needs a Gompertz law, not a tabulated one".into(),
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Table2,
    Table3,
    Table5,
    Table6,
}

impl Which {
    pub const ALL: [Which; 4] = [Which::Table2, Which::Table3, Which::Table5, Which::Table6];

    pub fn name(self) -> &'static str {
        match self {
            Which::Table2 => "table2",
            Which::Table3 => "table3",
            Which::Table5 => "table5",
            Which::Table6 => "table6",
        }
    }

    /// Whether the table is built from the Gompertz law.
    pub fn is_gompertz(self) -> bool {
        matches!(self, Which::Table5 | Which::Table6)
    }

    pub fn default_source(self) -> Source {
        if self.is_gompertz() {
            Source::from_gompertz(reference_gompertz()).expect("reference law discretizes")
        } else {
            Source::from_table(reference_table())
        }
    }

    pub fn default_laws(self) -> Vec<Law> {
        let mut laws = Law::interpolated().to_vec();
        if self.is_gompertz() {
            laws.push(Law::Gompertz);
        }
        laws
    }

    /// Contract shared by all rows (moment set per row).
    pub fn base_spec(self) -> ProductSpec {
        match self {
            Which::Table2 => ProductSpec::new(50, 0.03, 1).deferred(2).years(7),
            Which::Table3 => ProductSpec::new(50, 0.03, 1).deferred(2).years(7).periods(12),
            Which::Table5 => ProductSpec::new(0, 0.03, 1).deferred(1).whole_life(),
            Which::Table6 => ProductSpec::new(0, 0.03, 1).deferred(1).whole_life().periods(12),
        }
    }

    pub fn rows(self) -> Vec<RowSpec> {
        let pairs: &[(&str, Product)] = match self {
            Which::Table2 | Which::Table5 => &[
                ("A", Product::TermInsurance),
                ("e", Product::Lifetime),
                ("IbarA", Product::IncreasingContinuous),
                ("IA", Product::IncreasingAnnual),
            ],
            Which::Table3 | Which::Table6 => &[
                ("A(j)", Product::MthlyInsurance),
                ("I(j)A", Product::MthlyIncreasing),
            ],
        };
        pairs
            .iter()
            .flat_map(|&(name, product)| {
                [1, 2].map(|m| RowSpec {
                    label: if m == 1 { name.to_string() } else { format!("{name}^2") },
                    product,
                    moment: m,
                })
            })
            .collect()
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Which {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Which::ALL
            .into_iter()
            .find(|w| w.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown table `{s}` (expected table2, table3, table5 or table6)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSpec {
    pub label: String,
    pub product: Product,
    pub moment: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub product: Product,
    pub moment: u32,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiumTable {
    pub columns: Vec<Law>,
    pub rows: Vec<TableRow>,
}

pub fn build(which: Which, source: &Source, laws: &[Law]) -> Result<PremiumTable> {
    let base = which.base_spec();
    let rows = which
        .rows()
        .into_iter()
        .map(|r| {
            let spec = base.with_moment(r.moment);
            let values = laws
                .iter()
                .map(|&law| source.evaluate(law, r.product, &spec))
                .collect::<Result<Vec<_>>>()?;
            Ok(TableRow {
                label: r.label,
                product: r.product,
                moment: r.moment,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PremiumTable {
        columns: laws.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        assert_eq!(Which::Table2.rows().len(), 8);
        assert_eq!(Which::Table6.rows().len(), 4);
        assert_eq!(Which::Table5.default_laws().len(), 4);
        assert_eq!(Which::Table3.rows()[3].label, "I(j)A^2");
        assert_eq!("TABLE5".parse::<Which>().unwrap(), Which::Table5);
        assert_eq!("g".parse::<Law>().unwrap(), Law::Gompertz);
        assert_eq!("UDD".parse::<Law>().unwrap(), Law::Interpolated(Assumption::Udd));
    }

    #[test]
    fn gompertz_column_needs_gompertz_source() {
        let s = Source::from_table(reference_table());
        let spec = Which::Table2.base_spec();
        assert!(matches!(
            s.evaluate(Law::Gompertz, Product::TermInsurance, &spec),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn table2_constant_force_column() {
        let t = build(Which::Table2, &Which::Table2.default_source(), &[Law::Interpolated(Assumption::ConstantForce)]).unwrap();
        assert!((t.rows[0].values[0] - 0.0444333).abs() < 5e-8);
    }
}
