//! Exact and numerical tools for trigonometric polynomials whose frequencies
//! are shifted squares or cubes.
//!
//! The crate covers additive energy and L4 norms, the short-interval divisor
//! counts that bound representation functions of square and cube windows,
//! per-prime certificates for an lcm lower bound, the exponent optimizations
//! built on that bound, and checks for the Sidon windows of squares and
//! cubes. All combinatorial quantities are exact integers; only norms of
//! polynomials with complex coefficients are floating point.

pub mod arith;
pub mod error;
pub mod exponent;
pub mod lcm_bound;
pub mod parallel;
pub mod sidon;
pub mod spectral;
pub mod window;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use arith::{
    divisors_in_range, factorize, gcd_pair, lcm_factored, DivisorRange, Factorization,
};
pub use error::{Error, Result};
pub use exponent::{
    continuous_objective, cube_exponent, k_threshold_report, square_exponent, ExponentResult,
    KThreshold,
};
pub use lcm_bound::{
    binomial_colsum_check, counterexample_s1, verify_ineq_32, verify_lemma32, LcmBoundCertificate,
    LcmBoundInstance,
};
pub use sidon::{cubes_window, is_sidon, squares_window, verify_window_range, SidonVerdict};
pub use spectral::{
    additive_energy, autocorrelation, l2_norm_sq, l4_norm_4, l4_quadrature_oracle,
    representation_counts, rudin_certificate, Autocorrelation, FrequencySet, RudinCertificate,
    TrigPolynomial,
};
pub use window::{
    cube_window_scan, ruzsa_scan, square_representations, square_window_scan, tau_interval,
    WindowScanReport,
};

/// Which family of powers a window, objective or Sidon construction refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Power {
    Square,
    Cube,
}

impl Power {
    pub fn as_str(self) -> &'static str {
        match self {
            Power::Square => "square",
            Power::Cube => "cube",
        }
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Power {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" | "squares" => Ok(Power::Square),
            "cube" | "cubes" => Ok(Power::Cube),
            other => Err(Error::domain("power", other, "square or cube")),
        }
    }
}
