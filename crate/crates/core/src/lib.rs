//! Minimum sum-power resource allocation for two-slot OFDM transmission
//! with subcarrier-pair based opportunistic decode-and-forward relaying.
//!
//! Given per-subcarrier channel gains and a sum-rate target, the solver
//! finds the subcarrier pairing (a permutation of the second slot), a
//! per-pair choice between relay-aided and direct transmission, and the
//! source/relay powers minimizing total transmit power. The search is a
//! dual decomposition: closed-form water-filling powers per pair, a
//! Hungarian assignment over per-pair metrics, and bisection on the rate
//! price.
//!
//! Two benchmark protocols (fixed diagonal pairing, direct-only
//! transmission), a seeded Rayleigh channel generator, a brute-force oracle
//! for tiny instances, and a Monte Carlo sweep engine round out the crate.
//!
//! ```
//! use relay_ra::{solve, ChannelInstance, Mode};
//!
//! // One subcarrier whose relay path beats the direct link.
//! let inst = ChannelInstance::new(vec![4.0], vec![1.0], vec![2.0], 0.839036, 1e-4)?;
//! let alloc = solve(&inst)?;
//! assert_eq!(alloc.decisions[0].mode, Mode::RelayAided);
//! assert!((alloc.sum_power - 1.375).abs() < 0.01);
//! # Ok::<(), relay_ra::Error>(())
//! ```

pub mod assignment;
pub mod baselines;
pub mod channel;
pub mod error;
pub mod formulas;
pub mod oracle;
pub mod solver;
pub mod sweep;
pub mod types;

pub use error::{Error, Result};
pub use types::{Allocation, ChannelInstance, Mode, PairDecision, PairGainTable};

pub use baselines::{relay_pair_count, solve_direct_only, solve_fixed_pairing};
pub use channel::{generate_instance, generate_realization, ScenarioConfig};
pub use oracle::oracle_solve;
pub use solver::{evaluate_sum_rate, solve, solve_relaxation, DualEvaluation};
pub use sweep::{run_sweep, SweepResult};
