use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("deconvolution by y = {y} is singular (1 - 2y = 0)")]
    Singularity { y: f64 },

    #[error("relative entropy is infinite: q has mass {q_mass} where p has none")]
    Divergence { q_mass: f64 },

    #[error("p = {p} is infeasible: require {lower} <= p <= {upper}")]
    Infeasible { p: f64, lower: f64, upper: f64 },

    #[error("cells sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("stationarity residual {residual:e} exceeds {limit:e}")]
    Inconsistent { residual: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            what,
            value,
            domain: "[0, 1]",
        })
    }
}
