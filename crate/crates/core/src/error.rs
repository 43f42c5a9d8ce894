use thiserror::Error;

/// Errors raised while loading tables or evaluating moments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },

    #[error("survivor count increases between ages {age} and {}", age + 1)]
    NonMonotone { age: u32 },

    #[error("ages must be consecutive: expected {expected}, found {found}")]
    NonConsecutiveAges { expected: u32, found: u32 },

    #[error("life table has no rows")]
    EmptyTable,

    #[error("age {age} is outside the tabulated range {first}..={last}")]
    OutOfRange { age: u32, first: u32, last: u32 },

    #[error("no survivors at age {age}")]
    ZeroExposure { age: u32 },

    #[error("Balducci interpolation undefined in the year starting at age {age} (q = 1)")]
    BalducciDegenerate { age: u32 },

    #[error("constant-force density has no finite value in the year starting at age {age} (p = 0)")]
    DegenerateYear { age: u32 },

    #[error("whole-life horizon needs a table that reaches zero survivors (last age {last_age} has l > 0)")]
    InsufficientTable { last_age: u32 },

    #[error("incomplete gamma order {order} exceeds the supported maximum {max}")]
    Overflow { order: u32, max: u32 },

    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {estimate:e})")]
    NonConvergent { lo: f64, hi: f64, estimate: f64 },

    #[error("ordering check needs a payoff declared non-increasing or non-decreasing")]
    MixedMonotonicity,

    #[error("invalid product: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
