use crate::lattice::Point;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("site {0} is not in the region")]
    SiteNotInRegion(Point),

    #[error("{what} has {size} states/sites, above the cap of {cap}")]
    SizeCap {
        what: &'static str,
        size: u64,
        cap: u64,
    },

    #[error("illegal update at {site}: constraint is 0")]
    IllegalMove { site: Point },

    #[error("event budget of {0} events exhausted before the stopping condition")]
    BudgetExhausted(u64),

    #[error("time {t} is beyond the recorded horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("iterative solver did not converge: {0}")]
    NotConverged(String),

    #[error("target is unreachable")]
    Unreachable,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
