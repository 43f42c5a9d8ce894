//! Command-line front end.
//!
//! Every flag may also be given in a JSON file passed with `--config`
//! (keys are the long flag names); flags on the command line win.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::closed_form::{ProductSpec, Term};
use crate::error::Error;
use crate::format::{check_precision, Cell, Format, Grid, DEFAULT_PRECISION};
use crate::gompertz::GompertzParams;
use crate::life_table::LifeTable;
use crate::plot::{self, PlotKind};
use crate::product::Product;
use crate::tables::{self, Law, Source, Which};

#[derive(Debug, Parser)]
#[command(name = "lifemoments", version, about = "Moments of life-insurance present values")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moment of one product under one or more assumptions.
    Moment(Options),
    /// One of the reference premium tables.
    Table(Options),
    /// Point series for plots.
    Plotdata(Options),
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// Life table CSV with header `age,lx`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Use the Gompertz law (defaults alpha = 0.09, beta = 0.0007).
    #[arg(long)]
    #[serde(default)]
    pub gompertz: bool,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Product, e.g. term-insurance, lifetime, increasing-continuous.
    #[arg(long)]
    pub product: Option<String>,
    /// Issue age.
    #[arg(long)]
    pub x: Option<u32>,
    /// Deferment in whole years.
    #[arg(long)]
    pub defer: Option<u32>,
    /// Additional deferment in 1/j periods.
    #[arg(long)]
    pub defer_periods: Option<u32>,
    /// Term in years, or `whole`.
    #[arg(long)]
    pub term: Option<String>,
    /// Annual interest rate.
    #[arg(long)]
    pub i: Option<f64>,
    /// Moment order.
    #[arg(long)]
    pub m: Option<u32>,
    /// Periods per year.
    #[arg(long)]
    pub j: Option<u32>,
    /// Comma-separated subset of UDD, C, B, G.
    #[arg(long, value_delimiter = ',')]
    pub assumption: Option<Vec<String>>,
    /// csv, markdown or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Decimal places, 1 to 15.
    #[arg(long)]
    pub precision: Option<usize>,
    /// Whole life on a table that never reaches zero: death is certain
    /// in the year after the last tabulated age.
    #[arg(long)]
    #[serde(default)]
    pub force_terminal: bool,
    /// table2, table3, table5, table6 (table) or interp, density,
    /// gompertz_s, gompertz_pmf, premium_by_age (plotdata).
    #[arg(long)]
    pub which: Option<String>,
    /// Survival knots s(0), s(1), ... for interp and density.
    #[arg(long, value_delimiter = ',')]
    pub knots: Option<Vec<f64>>,
    /// Grid step for interp and density.
    #[arg(long)]
    pub step: Option<f64>,
    /// First age plotted.
    #[arg(long)]
    pub from: Option<u32>,
    /// Last age plotted.
    #[arg(long)]
    pub to: Option<u32>,
    /// JSON file with default values for any of the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! prefer {
    ($flags:ident, $file:ident; $($field:ident),*) => {
        Options {
            $($field: $flags.$field.or($file.$field),)*
            gompertz: $flags.gompertz || $file.gompertz,
            force_terminal: $flags.force_terminal || $file.force_terminal,
            config: None,
        }
    };
}

impl Options {
    /// Values from `--config`, overridden by anything set on the command line.
    pub fn resolve(self) -> Result<Options, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let file: Options = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        let flags = self;
        Ok(prefer!(flags, file; table, alpha, beta, product, x, defer, defer_periods, term, i, m, j,
            assumption, format, precision, which, knots, step, from, to))
    }

    fn format(&self) -> Result<Format, CliError> {
        self.format.as_deref().map_or(Ok(Format::Csv), |s| s.parse().map_err(CliError::Usage))
    }

    fn precision(&self) -> Result<usize, CliError> {
        let p = self.precision.unwrap_or(DEFAULT_PRECISION);
        check_precision(p).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }

    fn gompertz_params(&self) -> Result<Option<GompertzParams>, CliError> {
        if !(self.gompertz || self.alpha.is_some() || self.beta.is_some()) {
            return Ok(None);
        }
        let reference = tables::reference_gompertz();
        GompertzParams::new(
            self.alpha.unwrap_or(reference.alpha()),
            self.beta.unwrap_or(reference.beta()),
        )
        .map(Some)
        .map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Explicit mortality input, if any.
    fn source(&self) -> Result<Option<Source>, CliError> {
        let gompertz = self.gompertz_params()?;
        match (&self.table, gompertz) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either --table or Gompertz parameters, not both".into())),
            (Some(path), None) => Ok(Some(Source::from_table(load_table(path)?))),
            (None, Some(g)) => Ok(Some(Source::from_gompertz(g)?)),
            (None, None) => Ok(None),
        }
    }

    fn laws(&self, source: &Source) -> Result<Vec<Law>, CliError> {
        let laws = match &self.assumption {
            None => {
                let mut laws = Law::interpolated().to_vec();
                if source.gompertz.is_some() {
                    laws.push(Law::Gompertz);
                }
                laws
            }
            Some(list) => list
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<Law>().map_err(CliError::Usage))
                .collect::<Result<Vec<_>, _>>()?,
        };
        if laws.is_empty() {
            return Err(CliError::Usage("--assumption lists no assumptions".into()));
        }
        if source.gompertz.is_none() && laws.contains(&Law::Gompertz) {
            return Err(CliError::Usage(
                "assumption G needs a Gompertz law (--gompertz, --alpha, --beta), not a CSV table".into(),
            ));
        }
        Ok(laws)
    }

    fn product(&self) -> Result<Option<Product>, CliError> {
        self.product
            .as_deref()
            .map(|s| s.parse::<Product>().map_err(CliError::Usage))
            .transpose()
    }

    fn term(&self) -> Result<Option<Term>, CliError> {
        let Some(t) = self.term.as_deref() else {
            return Ok(None);
        };
        match t.trim().to_ascii_lowercase().as_str() {
            "whole" | "whole-life" | "wholelife" => Ok(Some(Term::WholeLife)),
            s => s
                .parse::<u32>()
                .map(|n| Some(Term::Years(n)))
                .map_err(|_| CliError::Usage(format!("--term must be a whole number of years or `whole`, got `{t}`"))),
        }
    }

    /// Contract from the flags, falling back to `base` field by field.
    fn spec(&self, base: ProductSpec) -> Result<ProductSpec, CliError> {
        if self.defer_periods.is_some_and(|n| n > 0) && self.j.is_none() && base.periods_per_year == 1 {
            return Err(CliError::Usage("--defer-periods requires --j".into()));
        }
        Ok(ProductSpec {
            age: self.x.unwrap_or(base.age),
            defer_years: self.defer.unwrap_or(base.defer_years),
            defer_periods: self.defer_periods.unwrap_or(base.defer_periods),
            term: self.term()?.unwrap_or(base.term),
            moment: self.m.unwrap_or(base.moment),
            interest: self.i.unwrap_or(base.interest),
            periods_per_year: self.j.unwrap_or(base.periods_per_year),
            force_terminal: self.force_terminal || base.force_terminal,
        })
    }
}

fn load_table(path: &Path) -> Result<LifeTable, CliError> {
    LifeTable::from_csv_path(path).map_err(CliError::Compute)
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2.
    Usage(String),
    /// Failure while computing; exit code 1.
    Compute(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Compute(e) => write!(f, "error: {e}"),
            CliError::Io(e) => write!(f, "error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let (grid, opts) = match cli.command {
        Command::Moment(o) => {
            let o = o.resolve()?;
            (cmd_moment(&o)?, o)
        }
        Command::Table(o) => {
            let o = o.resolve()?;
            (cmd_table(&o)?, o)
        }
        Command::Plotdata(o) => {
            let o = o.resolve()?;
            (cmd_plotdata(&o)?, o)
        }
    };
    let text = grid.render(opts.format()?, opts.precision()?)?;
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn cmd_moment(opts: &Options) -> Result<Grid, CliError> {
    opts.format()?;
    opts.precision()?;
    let product = opts
        .product()?
        .ok_or_else(|| CliError::Usage("--product is required".into()))?;
    let source = opts
        .source()?
        .ok_or_else(|| CliError::Usage("give a life table with --table or a Gompertz law with --gompertz".into()))?;
    let laws = opts.laws(&source)?;
    let x = opts.x.ok_or_else(|| CliError::Usage("--x is required".into()))?;
    let i = opts.i.ok_or_else(|| CliError::Usage("--i is required".into()))?;
    let spec = opts.spec(ProductSpec::new(x, i, 1))?;
    let mut grid = Grid::new(laws.iter().map(|l| l.label()));
    let row = laws
        .iter()
        .map(|&law| source.evaluate(law, product, &spec).map(Cell::Number))
        .collect::<Result<Vec<_>, _>>()?;
    grid.push(row);
    Ok(grid)
}

pub fn cmd_table(opts: &Options) -> Result<Grid, CliError> {
    opts.format()?;
    opts.precision()?;
    let which: Which = opts
        .which
        .as_deref()
        .ok_or_else(|| CliError::Usage("--which is required".into()))?
        .parse()
        .map_err(CliError::Usage)?;
    let source = match opts.source()? {
        Some(s) => s,
        None => which.default_source(),
    };
    let laws = opts.laws(&source)?;
    let table = tables::build(which, &source, &laws)?;
    let mut header = vec!["expectation".to_string()];
    header.extend(laws.iter().map(|l| l.label().to_string()));
    let mut grid = Grid::new(header);
    for row in table.rows {
        let mut cells = vec![Cell::Text(row.label)];
        cells.extend(row.values.into_iter().map(Cell::Number));
        grid.push(cells);
    }
    Ok(grid)
}

pub fn cmd_plotdata(opts: &Options) -> Result<Grid, CliError> {
    opts.format()?;
    opts.precision()?;
    let kind: PlotKind = opts
        .which
        .as_deref()
        .ok_or_else(|| CliError::Usage("--which is required".into()))?
        .parse()
        .map_err(CliError::Usage)?;
    let step = opts.step.unwrap_or(plot::DEFAULT_STEP);
    match kind {
        PlotKind::Interp | PlotKind::Density => {
            let (table, gompertz, span) = match opts.source()? {
                Some(Source { table, gompertz: Some(g) }) => (table, Some(g), plot::GOMPERTZ_WINDOW),
                Some(Source { table, gompertz: None }) => {
                    let span = (table.base_age(), table.last_age());
                    (table, None, span)
                }
                None => {
                    let knots = opts.knots.clone().unwrap_or_else(|| plot::DEFAULT_KNOTS.to_vec());
                    let table = plot::knot_table(&knots)?;
                    let span = (0, table.last_age());
                    (table, None, span)
                }
            };
            let from = opts.from.unwrap_or(span.0);
            let to = opts.to.unwrap_or(span.1);
            let grid = if kind == PlotKind::Interp {
                plot::interpolation(&table, from, to, step, gompertz.as_ref())?
            } else {
                plot::densities(&table, from, to, step, gompertz.as_ref())?
            };
            Ok(grid)
        }
        PlotKind::GompertzS | PlotKind::GompertzPmf => {
            let g = opts.gompertz_params()?.unwrap_or_else(tables::reference_gompertz);
            let max_age = opts.to.unwrap_or(plot::GOMPERTZ_PLOT_MAX_AGE);
            Ok(if kind == PlotKind::GompertzS {
                plot::gompertz_survival(&g, max_age)
            } else {
                plot::gompertz_pmf(&g, max_age)
            })
        }
        PlotKind::PremiumByAge => {
            let source = opts
                .source()?
                .ok_or_else(|| CliError::Usage("premium_by_age needs --table or a Gompertz law".into()))?;
            let laws = opts.laws(&source)?;
            let product = opts.product()?.unwrap_or(Product::TermInsurance);
            let spec = opts.spec(plot::default_premium_spec())?;
            let ages = (
                opts.from.unwrap_or(plot::PREMIUM_AGES.0),
                opts.to.unwrap_or(plot::PREMIUM_AGES.1),
            );
            Ok(plot::premium_by_age(&source, &laws, product, &spec, ages)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("lifemoments").chain(args.iter().copied())).unwrap()
    }

    fn output(args: &[&str]) -> Result<String, CliError> {
        let mut out = Vec::new();
        run(parse(args), &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn table_command_default_source() {
        let s = output(&["table", "--which", "table2", "--assumption", "C"]).unwrap();
        assert!(s.starts_with("expectation,C\nA,0.0444333\n"), "{s}");
    }

    #[test]
    fn gompertz_column_rejected_for_csv() {
        let err = output(&["table", "--which", "table2", "--assumption", "C,G"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn term_parsing() {
        let o = Options {
            term: Some("whole".into()),
            ..Default::default()
        };
        assert_eq!(o.term().unwrap(), Some(Term::WholeLife));
        let o = Options {
            term: Some("7".into()),
            ..Default::default()
        };
        assert_eq!(o.term().unwrap(), Some(Term::Years(7)));
        let o = Options {
            term: Some("seven".into()),
            ..Default::default()
        };
        assert!(matches!(o.term(), Err(CliError::Usage(_))));
    }

    #[test]
    fn precision_is_checked() {
        let err = output(&["table", "--which", "table2", "--precision", "0"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn default_knot_plot() {
        let s = output(&["plotdata", "--which", "interp", "--step", "0.5"]).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "age,UDD,C,B");
        assert_eq!(lines[2], "0.5000000,0.9000000,0.8944272,0.8888889");
    }
}
