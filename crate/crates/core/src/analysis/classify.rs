use std::collections::BTreeMap;
use std::fmt;

use super::AnalysisError;
use crate::rates::Model;
use crate::sim::Trajectory;

/// Minimum number of post-burn-in events `classify` accepts.
pub const MIN_POST_BURN_IN: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub confined: bool,
    /// 1 or 2: the coordinate with the larger final value.
    pub major_axis: u8,
    pub kappa_expected: u64,
    /// Max of the minor coordinate after burn-in.
    pub kappa_observed: u64,
    /// Number of entries into each minor level after burn-in (the state at
    /// the burn-in cut counts as one entry).
    pub level_visit_counts: BTreeMap<u64, u64>,
    /// Completed excursions `0 → kappa_observed → 0` after burn-in.
    pub oscillations: u64,
    /// Final major coordinate over the jump count.
    pub escape_slope: f64,
}

impl ClassificationResult {
    pub fn visits(&self, level: u64) -> u64 {
        self.level_visit_counts.get(&level).copied().unwrap_or(0)
    }
}

impl fmt::Display for ClassificationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let visits: Vec<String> = self
            .level_visit_counts
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        write!(
            f,
            "confined={} major_axis={} kappa_expected={} kappa_observed={} oscillations={} escape_slope={} visits={}",
            self.confined,
            self.major_axis,
            self.kappa_expected,
            self.kappa_observed,
            self.oscillations,
            self.escape_slope,
            visits.join(",")
        )
    }
}

/// Strip width predicted for the minor coordinate: 1 when the major
/// coordinate's own birth slope is positive, 2 when it vanishes.
pub fn kappa_expected(model: &Model, major_axis: u8) -> Result<u64, AnalysisError> {
    let alpha = match model {
        Model::TypeI(m) => [m.alpha1, m.alpha2],
        Model::TypeII(m) => [m.alpha1, m.alpha2],
        other => {
            return Err(AnalysisError::Unsupported(format!(
                "boundary classification is defined for type I and type II models, not {}",
                other.name()
            )))
        }
    };
    let a = alpha[usize::from(major_axis == 2)];
    Ok(if a > 0.0 { 1 } else { 2 })
}

/// Classifies the late behaviour of a trajectory. Works on full or thinned
/// recordings; a thinned recording keeps every move near the axes, so the
/// minor-level counts are exact as long as the minor coordinate stays in the
/// recording band.
pub fn classify(
    model: &Model,
    traj: &Trajectory,
    burn_in_fraction: f64,
) -> Result<ClassificationResult, AnalysisError> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(AnalysisError::Unsupported(format!(
            "burn-in fraction {burn_in_fraction} outside [0, 1)"
        )));
    }
    let cut = (traj.jumps as f64 * burn_in_fraction).floor() as u64;
    let post = traj.jumps - cut;
    if post < MIN_POST_BURN_IN {
        return Err(AnalysisError::TooShort {
            needed: MIN_POST_BURN_IN,
            got: post,
        });
    }
    let fin = traj.final_state;
    let major_axis: u8 = if fin.x2 > fin.x1 { 2 } else { 1 };
    let minor = |s: crate::rates::State| if major_axis == 1 { s.x2 } else { s.x1 };

    // state in force at the cut, then every later event
    let mut levels = Vec::new();
    let mut at_cut = traj.initial;
    for (n, s) in traj.states() {
        if n <= cut {
            at_cut = s;
        } else {
            levels.push(minor(s));
        }
    }
    let mut counts = BTreeMap::new();
    let mut current = minor(at_cut);
    *counts.entry(current).or_insert(0) += 1;
    let mut kappa_observed = current;
    for &lv in &levels {
        kappa_observed = kappa_observed.max(lv);
        if lv != current {
            *counts.entry(lv).or_insert(0) += 1;
            current = lv;
        }
    }

    let mut oscillations = 0;
    if kappa_observed > 0 {
        let mut from_zero = minor(at_cut) == 0;
        let mut reached_top = false;
        for &lv in std::iter::once(&minor(at_cut)).chain(levels.iter()) {
            if lv == kappa_observed && from_zero {
                reached_top = true;
            } else if lv == 0 {
                if reached_top {
                    oscillations += 1;
                    reached_top = false;
                }
                from_zero = true;
            }
        }
    }

    let kappa_expected = kappa_expected(model, major_axis)?;
    let major = if major_axis == 1 { fin.x1 } else { fin.x2 };
    Ok(ClassificationResult {
        confined: kappa_observed <= kappa_expected,
        major_axis,
        kappa_expected,
        kappa_observed,
        level_visit_counts: counts,
        oscillations,
        escape_slope: major as f64 / traj.jumps as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{State, TypeIIModel};
    use crate::sim::{Clock, Event, Recording, StopReason};

    fn path(minor: &[u64]) -> Trajectory {
        let events: Vec<Event> = minor
            .iter()
            .enumerate()
            .map(|(i, &y)| Event {
                n: i as u64 + 1,
                time: (i + 1) as f64,
                state: State::xy(1000 + i as u64, y),
            })
            .collect();
        let last = events.last().unwrap();
        Trajectory {
            initial: State::xy(1000, minor[0]),
            jumps: last.n,
            final_state: last.state,
            final_time: last.time,
            events,
            stopped_by: StopReason::MaxJumps,
            seed: 0,
            clock: Clock::JumpChain,
            recording: Recording::Full,
            first_boundary: None,
        }
    }

    fn lin() -> Model {
        Model::TypeII(TypeIIModel::symmetric(1.0, 2.0, 1.0))
    }

    #[test]
    fn counts_excursions() {
        let mut minor = vec![0u64; 2000];
        for i in (1000..2000).step_by(10) {
            minor[i] = 1;
        }
        let r = classify(&lin(), &path(&minor), 0.5).unwrap();
        assert_eq!(r.major_axis, 1);
        assert_eq!(r.kappa_observed, 1);
        assert!(r.confined);
        assert_eq!(r.oscillations, 100);
        assert_eq!(r.visits(1), 100);
        assert_eq!(r.visits(0), 101);
    }

    #[test]
    fn pre_burn_in_ignored() {
        let mut minor = vec![0u64; 2000];
        minor[10] = 5;
        let r = classify(&lin(), &path(&minor), 0.5).unwrap();
        assert_eq!(r.kappa_observed, 0);
        assert_eq!(r.oscillations, 0);
        assert_eq!(r.level_visit_counts.len(), 1);
    }

    #[test]
    fn expected_width() {
        assert_eq!(kappa_expected(&lin(), 1).unwrap(), 1);
        let corral = Model::TypeII(TypeIIModel::ok_corral([1.0, 1.0], [1.0, 1.0]));
        assert_eq!(kappa_expected(&corral, 2).unwrap(), 2);
        let mut minor = vec![0u64; 2000];
        minor[1500] = 2;
        minor[1600] = 3;
        let r = classify(&corral, &path(&minor), 0.5).unwrap();
        assert!(!r.confined);
        assert_eq!(r.kappa_observed, 3);
    }

    #[test]
    fn too_short() {
        let r = classify(&lin(), &path(&[0; 1500]), 0.5);
        assert_eq!(
            r,
            Err(AnalysisError::TooShort {
                needed: 1000,
                got: 750
            })
        );
    }
}
