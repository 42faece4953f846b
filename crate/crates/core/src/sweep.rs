//! Monte Carlo sweep engine: average protocol powers and relay-pair
//! fractions over seeded channel realizations, per (K, d) grid point.

use rayon::prelude::*;

use crate::baselines::{relay_pair_count, solve_direct_only, solve_fixed_pairing};
use crate::channel::{generate_realization, ScenarioConfig};
use crate::error::{Error, Result};
use crate::solver::solve;

/// Aggregated statistics of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub k: usize,
    pub d: f64,
    /// Realizations that entered the averages.
    pub num_runs: usize,
    /// Average minimum power, optimized pairing (watts).
    pub avg_p_osp: f64,
    /// Average minimum power, fixed (diagonal) pairing.
    pub avg_p_fsp: f64,
    /// Average minimum power, direct-only transmission.
    pub avg_p_direct: f64,
    /// Average fraction of pairs relayed under optimized pairing.
    pub avg_relay_fraction_osp: f64,
    /// Average fraction of pairs relayed under fixed pairing.
    pub avg_relay_fraction_fsp: f64,
    /// Dual searches that returned a fallback (rate overshoot) result.
    pub fallback_count: usize,
    /// Realizations skipped as infeasible (counted, never fatal).
    pub infeasible_count: usize,
}

impl SweepResult {
    /// Fixed CSV schema; floats print in shortest round-trip form, so the
    /// output is byte-deterministic.
    pub fn csv_header() -> &'static str {
        "K,d,runs,avg_p_osp,avg_p_fsp,avg_p_direct,avg_nsp_frac,avg_nfsp_frac,fallback_count"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.k,
            self.d,
            self.num_runs,
            self.avg_p_osp,
            self.avg_p_fsp,
            self.avg_p_direct,
            self.avg_relay_fraction_osp,
            self.avg_relay_fraction_fsp,
            self.fallback_count
        )
    }
}

struct Realization {
    p_osp: f64,
    p_fsp: f64,
    p_direct: f64,
    frac_osp: f64,
    frac_fsp: f64,
    fallbacks: usize,
}

fn realize(cfg: &ScenarioConfig, index: u64) -> Result<Realization> {
    let inst = generate_realization(cfg, index)?;
    let osp = solve(&inst)?;
    let fsp = solve_fixed_pairing(&inst)?;
    let direct = solve_direct_only(&inst)?;
    Ok(Realization {
        p_osp: osp.sum_power,
        p_fsp: fsp.sum_power,
        p_direct: direct.sum_power,
        frac_osp: relay_pair_count(&osp) as f64 / inst.k as f64,
        frac_fsp: relay_pair_count(&fsp) as f64 / inst.k as f64,
        fallbacks: usize::from(!osp.exact) + usize::from(!fsp.exact),
    })
}

/// Runs `runs` realizations of every grid point and averages them.
///
/// Realizations execute in parallel but are merged in index order, so the
/// result depends only on the configs and `runs`, not on scheduling.
/// Infeasible realizations are counted and excluded from the averages;
/// anything else aborts the sweep.
pub fn run_sweep(grid: &[ScenarioConfig], runs: usize) -> Result<Vec<SweepResult>> {
    if runs == 0 {
        return Err(Error::InvalidInput("runs must be positive".into()));
    }
    for cfg in grid {
        cfg.validate()?;
    }

    grid.iter()
        .map(|cfg| {
            let outcomes: Vec<Result<Realization>> = (0..runs as u64)
                .into_par_iter()
                .map(|i| realize(cfg, i))
                .collect();

            let mut counted = 0usize;
            let mut infeasible = 0usize;
            let mut fallbacks = 0usize;
            let mut sums = [0.0f64; 5];
            for outcome in outcomes {
                match outcome {
                    Ok(r) => {
                        counted += 1;
                        fallbacks += r.fallbacks;
                        sums[0] += r.p_osp;
                        sums[1] += r.p_fsp;
                        sums[2] += r.p_direct;
                        sums[3] += r.frac_osp;
                        sums[4] += r.frac_fsp;
                    }
                    Err(Error::Infeasible(_)) => infeasible += 1,
                    Err(e) => return Err(e),
                }
            }
            let denom = counted.max(1) as f64;
            Ok(SweepResult {
                k: cfg.k,
                d: cfg.d,
                num_runs: counted,
                avg_p_osp: sums[0] / denom,
                avg_p_fsp: sums[1] / denom,
                avg_p_direct: sums[2] / denom,
                avg_relay_fraction_osp: sums[3] / denom,
                avg_relay_fraction_fsp: sums[4] / denom,
                fallback_count: fallbacks,
                infeasible_count: infeasible,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{solve_direct_only, solve_fixed_pairing};
    use crate::channel::generate_realization;
    use crate::solver::solve;

    #[test]
    fn single_run_equals_the_realization() {
        let cfg = ScenarioConfig::new(8, 0.4, 5);
        let res = run_sweep(std::slice::from_ref(&cfg), 1).unwrap();
        assert_eq!(res.len(), 1);
        let r = &res[0];

        let inst = generate_realization(&cfg, 0).unwrap();
        assert_eq!(r.num_runs, 1);
        assert_eq!(r.avg_p_osp, solve(&inst).unwrap().sum_power);
        assert_eq!(r.avg_p_fsp, solve_fixed_pairing(&inst).unwrap().sum_power);
        assert_eq!(r.avg_p_direct, solve_direct_only(&inst).unwrap().sum_power);
        assert_eq!(r.infeasible_count, 0);
    }

    #[test]
    fn averages_keep_protocol_ordering() {
        let cfg = ScenarioConfig::new(8, 0.5, 6);
        let r = &run_sweep(std::slice::from_ref(&cfg), 20).unwrap()[0];
        assert!(r.avg_p_osp <= r.avg_p_fsp * (1.0 + 1e-6));
        assert!(r.avg_p_fsp <= r.avg_p_direct * (1.0 + 1e-6));
        assert!(r.avg_relay_fraction_osp >= 0.0 && r.avg_relay_fraction_osp <= 1.0);
        assert!(r.avg_relay_fraction_fsp >= 0.0 && r.avg_relay_fraction_fsp <= 1.0);
    }

    #[test]
    fn sweep_is_deterministic() {
        let mut small = ScenarioConfig::new(4, 0.6, 11);
        small.num_taps = 4;
        let grid = [ScenarioConfig::new(8, 0.3, 11), small];
        let a = run_sweep(&grid, 5).unwrap();
        let b = run_sweep(&grid, 5).unwrap();
        assert_eq!(a, b);
        let rows_a: Vec<String> = a.iter().map(SweepResult::csv_row).collect();
        let rows_b: Vec<String> = b.iter().map(SweepResult::csv_row).collect();
        assert_eq!(rows_a, rows_b);
    }

    #[test]
    fn csv_row_matches_header_arity() {
        let mut cfg = ScenarioConfig::new(4, 0.25, 3);
        cfg.num_taps = 4;
        let r = &run_sweep(std::slice::from_ref(&cfg), 2).unwrap()[0];
        let row = r.csv_row();
        assert_eq!(
            row.split(',').count(),
            SweepResult::csv_header().split(',').count()
        );
        assert!(row.starts_with("4,0.25,2,"));
    }

    #[test]
    fn zero_runs_rejected() {
        let cfg = ScenarioConfig::new(4, 0.5, 1);
        assert!(run_sweep(std::slice::from_ref(&cfg), 0).is_err());
    }
}
