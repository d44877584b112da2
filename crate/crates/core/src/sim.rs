//! Exact event-driven simulation of the continuous-time chain and of its
//! embedded jump chain.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::rates::{enumerate_transitions, Model, RateError, State};
use crate::stream::Stream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("stop rule has neither a jump cap nor a time cap")]
    Unbounded,
    #[error("seed {0} appears more than once in the batch")]
    DuplicateSeed(u64),
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

/// When to stop a run. At least one of the two caps must be set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StopRule {
    pub max_jumps: Option<u64>,
    pub max_time: Option<f64>,
    /// Stop once `x₁ = 0` or `x₂ = 0`.
    pub stop_on_boundary: bool,
    /// Stop once `x₁ = 0` or `x₂ < y₀`.
    pub stop_below_y0: Option<u64>,
}

impl StopRule {
    pub fn jumps(max_jumps: u64) -> Self {
        StopRule {
            max_jumps: Some(max_jumps),
            ..Default::default()
        }
    }

    pub fn time(max_time: f64) -> Self {
        StopRule {
            max_time: Some(max_time),
            ..Default::default()
        }
    }

    pub fn on_boundary(mut self) -> Self {
        self.stop_on_boundary = true;
        self
    }

    pub fn below_y0(mut self, y0: u64) -> Self {
        self.stop_below_y0 = Some(y0);
        self
    }

    pub fn check(&self) -> Result<(), SimError> {
        let time_ok = self.max_time.is_some_and(|t| t.is_finite());
        if self.max_jumps.is_none() && !time_ok {
            return Err(SimError::Unbounded);
        }
        Ok(())
    }

    fn structural_stop(&self, s: State) -> Option<StopReason> {
        if self.stop_on_boundary && s.on_boundary() {
            return Some(StopReason::Boundary);
        }
        if let Some(y0) = self.stop_below_y0 {
            if s.x1 == 0 || s.x2 < y0 {
                return Some(StopReason::BelowY0);
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    MaxJumps,
    MaxTime,
    Boundary,
    BelowY0,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::MaxJumps => "max_jumps",
            StopReason::MaxTime => "max_time",
            StopReason::Boundary => "boundary",
            StopReason::BelowY0 => "below_y0",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which events a trajectory keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recording {
    /// Every jump.
    Full,
    /// Every `stride`-th jump, every jump landing on a state with
    /// `min(x₁, x₂) ≤ band`, and the final jump. All moves of a coordinate
    /// confined to `{0, …, band}` are therefore kept.
    Thinned { stride: u64, band: u64 },
    /// Only the endpoint summary.
    Off,
}

impl Default for Recording {
    fn default() -> Self {
        Recording::Thinned {
            stride: 1000,
            band: 3,
        }
    }
}

impl Recording {
    fn keeps(&self, n: u64, s: State) -> bool {
        match *self {
            Recording::Full => true,
            Recording::Thinned { stride, band } => {
                n.is_multiple_of(stride.max(1)) || s.x1.min(s.x2) <= band
            }
            Recording::Off => false,
        }
    }
}

/// Continuous time, or unit-spaced time for the embedded jump chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    Continuous,
    JumpChain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    /// Jump index, starting at 1.
    pub n: u64,
    pub time: f64,
    pub state: State,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial: State,
    pub events: Vec<Event>,
    pub jumps: u64,
    pub final_state: State,
    pub final_time: f64,
    pub stopped_by: StopReason,
    pub seed: u64,
    pub clock: Clock,
    pub recording: Recording,
    /// Jump index and time of the first visit to an axis.
    pub first_boundary: Option<(u64, f64)>,
}

impl Trajectory {
    /// `(n, state)` pairs including the initial state at `n = 0`.
    pub fn states(&self) -> impl Iterator<Item = (u64, State)> + '_ {
        std::iter::once((0, self.initial)).chain(self.events.iter().map(|e| (e.n, e.state)))
    }

    pub fn summary(&self) -> TrajectorySummary {
        TrajectorySummary {
            seed: self.seed,
            stopped_by: self.stopped_by,
            jumps: self.jumps,
            final_state: self.final_state,
            final_time: self.final_time,
            tau: self.first_boundary,
        }
    }

    /// CSV with header `n,time,x1,x2`, one row per retained event (the
    /// initial state is row `n = 0`).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,time,x1,x2")?;
        writeln!(w, "0,0,{},{}", self.initial.x1, self.initial.x2)?;
        for e in &self.events {
            writeln!(w, "{},{},{},{}", e.n, e.time, e.state.x1, e.state.x2)?;
        }
        Ok(())
    }
}

/// Endpoint record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub seed: u64,
    pub stopped_by: StopReason,
    pub jumps: u64,
    pub final_state: State,
    pub final_time: f64,
    /// First axis visit `(jumps, time)`, if any.
    pub tau: Option<(u64, f64)>,
}

impl fmt::Display for TrajectorySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed={} stopped_by={} jumps={} final={} time={}",
            self.seed, self.stopped_by, self.jumps, self.final_state, self.final_time
        )?;
        match self.tau {
            Some((n, t)) => write!(f, " tau_jumps={n} tau_time={t}"),
            None => write!(f, " tau=none"),
        }
    }
}

/// One event: exponential holding time at the total rate and a move chosen
/// proportionally to its rate. Consumes two draws (move, then holding time).
pub fn step(model: &Model, s: State, rng: &mut Stream) -> Result<(f64, State), SimError> {
    let list = enumerate_transitions(model, s)?;
    let u = rng.uniform();
    let hold = rng.exponential(list.total());
    Ok((hold, list.select(u).target))
}

/// Runs the continuous-time chain until a stop clause fires.
pub fn simulate(
    model: &Model,
    initial: State,
    stop: &StopRule,
    seed: u64,
    recording: Recording,
) -> Result<Trajectory, SimError> {
    run(model, initial, stop, seed, recording, Clock::Continuous)
}

/// Runs the embedded jump chain: same draws as [`simulate`], jump `n` at time `n`.
pub fn simulate_jump_chain(
    model: &Model,
    initial: State,
    stop: &StopRule,
    seed: u64,
    recording: Recording,
) -> Result<Trajectory, SimError> {
    run(model, initial, stop, seed, recording, Clock::JumpChain)
}

pub fn run(
    model: &Model,
    initial: State,
    stop: &StopRule,
    seed: u64,
    recording: Recording,
    clock: Clock,
) -> Result<Trajectory, SimError> {
    stop.check()?;
    let mut rng = Stream::new(seed);
    let mut events = Vec::new();
    let mut s = initial;
    let mut t = 0.0;
    let mut n = 0u64;
    let mut first_boundary = initial.on_boundary().then_some((0, 0.0));
    let mut last_kept = 0u64;

    let stopped_by = loop {
        if let Some(reason) = stop.structural_stop(s) {
            break reason;
        }
        if stop.max_jumps.is_some_and(|m| n >= m) {
            break StopReason::MaxJumps;
        }
        let (hold, next) = step(model, s, &mut rng)?;
        let next_t = match clock {
            Clock::Continuous => t + hold,
            Clock::JumpChain => (n + 1) as f64,
        };
        if stop.max_time.is_some_and(|m| next_t > m) {
            break StopReason::MaxTime;
        }
        s = next;
        t = next_t;
        n += 1;
        if first_boundary.is_none() && s.on_boundary() {
            first_boundary = Some((n, t));
        }
        if recording.keeps(n, s) {
            events.push(Event {
                n,
                time: t,
                state: s,
            });
            last_kept = n;
        }
    };

    if matches!(recording, Recording::Thinned { .. }) && n > 0 && last_kept != n {
        events.push(Event {
            n,
            time: t,
            state: s,
        });
    }

    Ok(Trajectory {
        initial,
        events,
        jumps: n,
        final_state: s,
        final_time: t,
        stopped_by,
        seed,
        clock,
        recording,
        first_boundary,
    })
}

/// Applies `f` to every seed in parallel; results come back in seed-list order.
pub fn par_map_seeds<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    seeds.par_iter().map(|&seed| f(seed)).collect()
}

/// Runs `f` on a dedicated pool of `workers` threads (`0` = rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, SimError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Independent runs, one per seed, summarized in seed-list order.
/// Per-run failures are returned in place and do not abort the batch.
pub fn batch(
    model: &Model,
    initial: State,
    stop: &StopRule,
    seeds: &[u64],
    clock: Clock,
) -> Result<Vec<Result<TrajectorySummary, SimError>>, SimError> {
    stop.check()?;
    let mut seen = HashSet::with_capacity(seeds.len());
    if let Some(dup) = seeds.iter().find(|s| !seen.insert(**s)) {
        return Err(SimError::DuplicateSeed(*dup));
    }
    Ok(par_map_seeds(seeds, |seed| {
        run(model, initial, stop, seed, Recording::Off, clock).map(|t| t.summary())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{AuxUrnModel, TypeIIModel, TypeIModel};

    #[test]
    fn boundary_start_is_empty() {
        let m: Model = TypeIModel::lotka_volterra().into();
        let t = simulate(
            &m,
            State::xy(0, 5),
            &StopRule::jumps(10).on_boundary(),
            1,
            Recording::Full,
        )
        .unwrap();
        assert_eq!(t.jumps, 0);
        assert!(t.events.is_empty());
        assert_eq!(t.stopped_by, StopReason::Boundary);
        assert_eq!(t.first_boundary, Some((0, 0.0)));
    }

    #[test]
    fn unbounded_rule_rejected() {
        let m: Model = TypeIModel::lotka_volterra().into();
        let rule = StopRule::default().on_boundary();
        assert_eq!(
            simulate(&m, State::xy(3, 3), &rule, 1, Recording::Full),
            Err(SimError::Unbounded)
        );
    }

    #[test]
    fn times_increase_and_moves_are_local() {
        let m: Model = TypeIIModel::symmetric(1.0, 2.0, 1.0).into();
        let t = simulate(
            &m,
            State::xy(5, 5),
            &StopRule::jumps(5000),
            3,
            Recording::Full,
        )
        .unwrap();
        assert_eq!(t.events.len(), 5000);
        let mut prev = (0.0, t.initial);
        for e in &t.events {
            assert!(e.time > prev.0);
            let dx = e.state.x1 as i64 - prev.1.x1 as i64;
            let dy = e.state.x2 as i64 - prev.1.x2 as i64;
            assert_eq!(dx.abs() + dy.abs(), 1);
            prev = (e.time, e.state);
        }
    }

    #[test]
    fn jump_chain_matches_states() {
        let m: Model = TypeIIModel::symmetric(1.0, 1.0, 1.0).into();
        let rule = StopRule::jumps(2000);
        let a = simulate(&m, State::xy(3, 3), &rule, 11, Recording::Full).unwrap();
        let b = simulate_jump_chain(&m, State::xy(3, 3), &rule, 11, Recording::Full).unwrap();
        let sa: Vec<_> = a.events.iter().map(|e| e.state).collect();
        let sb: Vec<_> = b.events.iter().map(|e| e.state).collect();
        assert_eq!(sa, sb);
        assert!(b.events.iter().all(|e| e.time == e.n as f64));
    }

    #[test]
    fn urn_total_grows_by_one() {
        let m: Model = AuxUrnModel::new(5.0, 1.0).into();
        let t = simulate_jump_chain(
            &m,
            State::xy(1, 1),
            &StopRule::jumps(1000),
            5,
            Recording::Full,
        )
        .unwrap();
        for e in &t.events {
            assert_eq!(e.state.x1 + e.state.x2, 2 + e.n);
        }
    }

    #[test]
    fn time_cap_stops_before_jump() {
        let m: Model = TypeIIModel::symmetric(1.0, 1.0, 1.0).into();
        let t = simulate(
            &m,
            State::xy(2, 2),
            &StopRule::time(0.5),
            9,
            Recording::Full,
        )
        .unwrap();
        assert_eq!(t.stopped_by, StopReason::MaxTime);
        assert!(t.final_time <= 0.5);
    }

    #[test]
    fn below_y0_clause() {
        let m: Model = TypeIIModel::symmetric(1.0, 0.0, 1.0).into();
        let t = simulate_jump_chain(
            &m,
            State::xy(20, 20),
            &StopRule::jumps(1_000_000).below_y0(10),
            2,
            Recording::Off,
        )
        .unwrap();
        assert_eq!(t.stopped_by, StopReason::BelowY0);
        assert!(t.final_state.x1 == 0 || t.final_state.x2 < 10);
    }

    #[test]
    fn thinned_keeps_band_and_final() {
        let m: Model = TypeIIModel::symmetric(1.0, 1.0, 0.05).into();
        let full = simulate(
            &m,
            State::xy(100, 100),
            &StopRule::jumps(20_000),
            4,
            Recording::Full,
        )
        .unwrap();
        let thin = simulate(
            &m,
            State::xy(100, 100),
            &StopRule::jumps(20_000),
            4,
            Recording::Thinned {
                stride: 500,
                band: 2,
            },
        )
        .unwrap();
        assert!(thin.events.len() < full.events.len());
        let expected: Vec<_> = full
            .events
            .iter()
            .filter(|e| e.n % 500 == 0 || e.state.x1.min(e.state.x2) <= 2 || e.n == full.jumps)
            .copied()
            .collect();
        assert_eq!(thin.events, expected);
        assert_eq!(thin.final_state, full.final_state);
    }

    #[test]
    fn batch_order_and_duplicates() {
        let m: Model = TypeIModel::lotka_volterra().into();
        let rule = StopRule::jumps(10_000).on_boundary();
        let seeds = [9u64, 3, 7];
        let out = batch(&m, State::xy(20, 20), &rule, &seeds, Clock::Continuous).unwrap();
        let got: Vec<u64> = out.iter().map(|r| r.as_ref().unwrap().seed).collect();
        assert_eq!(got, seeds);
        for (res, &seed) in out.iter().zip(&seeds) {
            let single = simulate(&m, State::xy(20, 20), &rule, seed, Recording::Off).unwrap();
            assert_eq!(res.as_ref().unwrap(), &single.summary());
        }
        assert!(batch(&m, State::xy(20, 20), &rule, &[], Clock::Continuous)
            .unwrap()
            .is_empty());
        assert_eq!(
            batch(&m, State::xy(1, 1), &rule, &[1, 1], Clock::Continuous),
            Err(SimError::DuplicateSeed(1))
        );
    }

    #[test]
    fn batch_collects_errors() {
        let mut m = TypeIIModel::new([0.0, 0.0], [0.0, 0.0], [1.0, 1.0]);
        m.strict = false;
        let m: Model = m.into();
        // without immigration the chain freezes on an axis
        let out = batch(
            &m,
            State::xy(2, 2),
            &StopRule::jumps(100),
            &[1, 2],
            Clock::Continuous,
        )
        .unwrap();
        assert!(out
            .iter()
            .all(|r| matches!(r, Err(SimError::Rate(RateError::Absorbing(_))))));
    }

    #[test]
    fn csv_layout() {
        let m: Model = TypeIIModel::symmetric(1.0, 1.0, 1.0).into();
        let t = simulate_jump_chain(&m, State::xy(1, 1), &StopRule::jumps(3), 1, Recording::Full)
            .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "n,time,x1,x2");
        assert_eq!(lines[1], "0,0,1,1");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("3,3,"));
    }
}
