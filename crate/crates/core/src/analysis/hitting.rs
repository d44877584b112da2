use std::fmt;

use super::AnalysisError;
use crate::rates::{Model, State};
use crate::sim::{batch, Clock, StopReason, StopRule};

/// Monte Carlo estimate of the first axis-hitting time from one start.
/// Means and standard errors are over the runs that hit.
#[derive(Debug, Clone, PartialEq)]
pub struct HitStats {
    pub start: State,
    pub runs: usize,
    pub hits: usize,
    /// Runs that reached the jump cap first.
    pub censored: usize,
    /// Runs that failed (absorbing state, overflow).
    pub failed: usize,
    pub hit_fraction: f64,
    pub mean_jumps: f64,
    pub se_jumps: f64,
    pub mean_time: f64,
    pub se_time: f64,
}

impl fmt::Display for HitStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "start={} runs={} hits={} censored={} failed={} hit_fraction={} mean_tau_jumps={} se_tau_jumps={} mean_tau_time={} se_tau_time={}",
            self.start,
            self.runs,
            self.hits,
            self.censored,
            self.failed,
            self.hit_fraction,
            self.mean_jumps,
            self.se_jumps,
            self.mean_time,
            self.se_time
        )
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// One batch per start, stopping at the first axis visit or after `cap` jumps.
pub fn hitting_stats(
    model: &Model,
    starts: &[State],
    seeds: &[u64],
    cap: u64,
) -> Result<Vec<HitStats>, AnalysisError> {
    let rule = StopRule::jumps(cap).on_boundary();
    starts
        .iter()
        .map(|&start| {
            let results = batch(model, start, &rule, seeds, Clock::Continuous)?;
            let mut jumps = Vec::new();
            let mut times = Vec::new();
            let (mut censored, mut failed) = (0, 0);
            for r in &results {
                match r {
                    Ok(s) if s.stopped_by == StopReason::Boundary => {
                        let (n, t) = s.tau.unwrap_or((s.jumps, s.final_time));
                        jumps.push(n as f64);
                        times.push(t);
                    }
                    Ok(_) => censored += 1,
                    Err(_) => failed += 1,
                }
            }
            let (mean_jumps, se_jumps) = mean_se(&jumps);
            let (mean_time, se_time) = mean_se(&times);
            Ok(HitStats {
                start,
                runs: results.len(),
                hits: jumps.len(),
                censored,
                failed,
                hit_fraction: jumps.len() as f64 / results.len().max(1) as f64,
                mean_jumps,
                se_jumps,
                mean_time,
                se_time,
            })
        })
        .collect()
}
