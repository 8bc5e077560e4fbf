//! Nonblocking analysis for Clos and multilog switching networks.
//!
//! Simulators for the 3-stage Clos network and for stacked inverse-Banyan
//! (multilog) networks under the window algorithm, an online weighted edge
//! coloring algorithm used for multirate Clos admission, exact calculators
//! for the closed-form sufficient conditions, and a checker for the
//! LP-duality certificates behind them.

pub mod banyan;
pub mod bounds;
pub mod clos;
pub mod dary;
pub mod dwec;
pub mod error;
pub mod harness;
pub mod lpcert;
pub mod multilog;
pub mod scalar;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational used by default throughout.
pub type Rational = num_rational::BigRational;

/// Fixed-width exact rationals for small per-state checks.
pub type SmallRational = num_rational::Rational64;

pub type BoundResult = bounds::BoundResult<Rational>;
pub type ColoringState = dwec::ColoringState<Rational>;
pub type DwecScheme = dwec::DwecScheme<Rational>;
pub type DualSolution = lpcert::DualSolution<Rational>;
pub type PrimalSolution = lpcert::PrimalSolution<Rational>;

/// Which resource two routes on one plane must not share.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Routes conflict when they share a link.
    LinkBlocking,
    /// Routes conflict when they share a switching element.
    CrosstalkFree,
}

impl Mode {
    /// 0 for link blocking, 1 for crosstalk-free; the definedness
    /// threshold of the blocking LP is i + j >= n - theta.
    pub fn theta(self) -> i64 {
        match self {
            Mode::LinkBlocking => 0,
            Mode::CrosstalkFree => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::LinkBlocking => "link",
            Mode::CrosstalkFree => "crosstalk",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "link" | "link-blocking" | "0" => Ok(Mode::LinkBlocking),
            "crosstalk" | "crosstalk-free" | "cf" | "1" => Ok(Mode::CrosstalkFree),
            _ => Err(Error::Argument(format!("unknown mode {s:?}"))),
        }
    }
}
