use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dyadic exponent {exponent} exceeds the {budget}-bit budget")]
    ExponentBudget { exponent: u64, budget: u32 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("{value} is outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("target {value} is outside the attainable range (0, {max}]")]
    Range { value: f64, max: f64 },

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("level query rejected: {0}")]
    Guard(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("construction error: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
