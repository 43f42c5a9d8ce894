//! Point series for plotting survival curves, densities and premiums.

use std::fmt;
use std::str::FromStr;

use crate::closed_form::ProductSpec;
use crate::error::{Error, Result};
use crate::format::{Cell, Grid};
use crate::fractional_age::{density, survival_fraction, Assumption};
use crate::gompertz::GompertzParams;
use crate::life_table::LifeTable;
use crate::product::Product;
use crate::tables::{Law, Source};

/// Knots `s(0), s(1), ...` of the toy survival curve.
pub const DEFAULT_KNOTS: [f64; 5] = [1.0, 0.8, 0.7, 0.5, 0.2];
pub const DEFAULT_STEP: f64 = 0.01;
/// Age range shown when interpolating a Gompertz table.
pub const GOMPERTZ_WINDOW: (u32, u32) = (78, 80);
pub const PREMIUM_AGES: (u32, u32) = (18, 70);
pub const GOMPERTZ_PLOT_MAX_AGE: u32 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Interp,
    Density,
    GompertzS,
    GompertzPmf,
    PremiumByAge,
}

impl PlotKind {
    pub const ALL: [PlotKind; 5] = [
        PlotKind::Interp,
        PlotKind::Density,
        PlotKind::GompertzS,
        PlotKind::GompertzPmf,
        PlotKind::PremiumByAge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Interp => "interp",
            PlotKind::Density => "density",
            PlotKind::GompertzS => "gompertz_s",
            PlotKind::GompertzPmf => "gompertz_pmf",
            PlotKind::PremiumByAge => "premium_by_age",
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        PlotKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| {
                format!("unknown plot `{s}` (expected interp, density, gompertz_s, gompertz_pmf or premium_by_age)")
            })
    }
}

/// Table with `l_k = knots[k]`, starting at age 0.
pub fn knot_table(knots: &[f64]) -> Result<LifeTable> {
    LifeTable::new(0, knots.to_vec())
}

fn grid_points(from: u32, to: u32, step: f64, include_end: bool) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidSpec(format!("grid step {step} must be positive")));
    }
    if to <= from {
        return Err(Error::InvalidSpec(format!("empty age range {from}..{to}")));
    }
    let n = ((to - from) as f64 / step).round() as usize;
    let last = if include_end { n } else { n.saturating_sub(1) };
    Ok((0..=last).map(|i| from as f64 + i as f64 * step).collect())
}

fn header(gompertz: Option<&GompertzParams>) -> Vec<&'static str> {
    let mut h = vec!["age", "UDD", "C", "B"];
    if gompertz.is_some() {
        h.push("G");
    }
    h
}

/// `s(age)` on `[from, to]` under each interpolation law, with `s` taken
/// relative to the table's first age. A Gompertz law adds its exact curve.
pub fn interpolation(
    table: &LifeTable,
    from: u32,
    to: u32,
    step: f64,
    gompertz: Option<&GompertzParams>,
) -> Result<Grid> {
    let base = table.base_age();
    let mut grid = Grid::new(header(gompertz));
    for age in grid_points(from, to, step, true)? {
        let u = age - base as f64;
        let mut row = vec![Cell::Number(age)];
        for a in Assumption::ALL {
            row.push(Cell::Number(survival_fraction(table, a, base, u)?));
        }
        if let Some(g) = gompertz {
            row.push(Cell::Number(g.survival(age)));
        }
        grid.push(row);
    }
    Ok(grid)
}

/// Density of the lifetime from the table's first age, on `[from, to)`.
pub fn densities(
    table: &LifeTable,
    from: u32,
    to: u32,
    step: f64,
    gompertz: Option<&GompertzParams>,
) -> Result<Grid> {
    let base = table.base_age();
    let mut grid = Grid::new(header(gompertz));
    for age in grid_points(from, to, step, false)? {
        let u = age - base as f64;
        let mut row = vec![Cell::Number(age)];
        for a in Assumption::ALL {
            row.push(Cell::Number(density(table, a, base, u)?));
        }
        if let Some(g) = gompertz {
            row.push(Cell::Number(g.density(age)));
        }
        grid.push(row);
    }
    Ok(grid)
}

/// `s(x)` at integer ages.
pub fn gompertz_survival(params: &GompertzParams, max_age: u32) -> Grid {
    let mut grid = Grid::new(["age", "s"]);
    for x in 0..=max_age {
        grid.push(vec![Cell::Number(x as f64), Cell::Number(params.survival(x as f64))]);
    }
    grid
}

/// `P(K_0 = k) = s(k) - s(k+1)` for the curtate lifetime.
pub fn gompertz_pmf(params: &GompertzParams, max_age: u32) -> Grid {
    let mut grid = Grid::new(["age", "pmf"]);
    for k in 0..=max_age {
        let kf = k as f64;
        let p = params.survival(kf) - params.survival(kf + 1.0);
        grid.push(vec![Cell::Number(kf), Cell::Number(p)]);
    }
    grid
}

/// Premium of `spec` (issue age replaced) for every age in `ages` the
/// table covers.
pub fn premium_by_age(
    source: &Source,
    laws: &[Law],
    product: Product,
    spec: &ProductSpec,
    ages: (u32, u32),
) -> Result<Grid> {
    let mut h = vec!["age".to_string()];
    h.extend(laws.iter().map(|l| l.label().to_string()));
    let mut grid = Grid::new(h);
    for x in ages.0..=ages.1 {
        let spec = ProductSpec { age: x, ..*spec };
        let mut row = vec![Cell::Number(x as f64)];
        let mut covered = true;
        for &law in laws {
            match source.evaluate(law, product, &spec) {
                Ok(v) => row.push(Cell::Number(v)),
                Err(Error::OutOfRange { .. }) => {
                    covered = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if covered {
            grid.push(row);
        }
    }
    if grid.rows.is_empty() {
        return Err(Error::InvalidSpec(format!(
            "the table covers none of the issue ages {}..={}",
            ages.0, ages.1
        )));
    }
    Ok(grid)
}

/// Two-year deferred seven-year term cover at 3%.
pub fn default_premium_spec() -> ProductSpec {
    ProductSpec::new(PREMIUM_AGES.0, 0.03, 1).deferred(2).years(7)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn number(c: &Cell) -> f64 {
        match c {
            Cell::Number(v) => *v,
            Cell::Text(_) => panic!("text cell"),
        }
    }

    #[test]
    fn toy_interpolation() {
        let t = knot_table(&DEFAULT_KNOTS).unwrap();
        let g = interpolation(&t, 0, 4, DEFAULT_STEP, None).unwrap();
        assert_eq!(g.rows.len(), 401);
        let mid = &g.rows[50];
        assert!((number(&mid[0]) - 0.5).abs() < 1e-12);
        assert!((number(&mid[2]) - 0.8f64.sqrt()).abs() < 1e-15);
        assert!((number(&mid[1]) - 0.9).abs() < 1e-15);
        assert_eq!(number(&g.rows[400][3]), 0.2);
    }

    #[test]
    fn toy_densities() {
        let t = knot_table(&DEFAULT_KNOTS).unwrap();
        let g = densities(&t, 0, 4, DEFAULT_STEP, None).unwrap();
        assert_eq!(g.rows.len(), 400);
        for row in &g.rows[1..100] {
            assert!((number(&row[1]) - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn gompertz_window_has_exact_column() {
        let p = GompertzParams::new(0.09, 0.0007).unwrap();
        let t = p.discretize(140, 1.0).unwrap();
        let g = interpolation(&t, 78, 80, 0.5, Some(&p)).unwrap();
        assert_eq!(g.header, ["age", "UDD", "C", "B", "G"]);
        // knots agree with the exact law
        assert!((number(&g.rows[0][2]) - p.survival(78.0)).abs() < 1e-15);
    }

    #[test]
    fn pmf_sums_to_one() {
        let p = GompertzParams::new(0.09, 0.0007).unwrap();
        let total: f64 = gompertz_pmf(&p, 140).rows.iter().map(|r| number(&r[1])).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn premiums_for_covered_ages() {
        let s = Source::from_table(crate::tables::reference_table());
        let g = premium_by_age(&s, &Law::interpolated(), Product::TermInsurance, &default_premium_spec(), PREMIUM_AGES).unwrap();
        assert_eq!(g.rows.len(), 1);
        assert_eq!(number(&g.rows[0][0]), 50.0);
        assert!((number(&g.rows[0][2]) - 0.0444333).abs() < 5e-8);
    }
}
