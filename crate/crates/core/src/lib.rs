//! Computational laboratory for the sumset of the primes with a lacunary set
//! of sums of powers of two, and for the Romanoff representation function.
//!
//! * [`primes`]: segmented sieving, exact counts, Miller–Rabin, `li(x)`.
//! * [`lacunary`]: the exponent data, the balancing `λ` and the truncated set.
//! * [`window`]: representation counts `R`, `Q`, `S` over short windows.
//! * [`singular`]: `𝔖₂(Δ)`, `C₂`, difference averages and pair counts.
//! * [`romanoff`]: `f_Rom`, multiplicity hunts, admissible shifts, gaps.
//! * [`report`]: manifest-driven runs and summary tables.

pub mod error;
pub mod lacunary;
pub mod par;
pub mod primes;
pub mod report;
pub mod romanoff;
pub mod sampling;
pub mod singular;
pub mod stats;
pub mod window;

pub use error::{Error, Result};
pub use lacunary::{LacunaryParams, LacunarySet};
pub use romanoff::RomanoffConvention;
pub use window::{ScanConfig, WindowRecord};
