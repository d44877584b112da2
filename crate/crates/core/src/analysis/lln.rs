use std::fmt;

use super::{AnalysisError, LinearDiagnostics};
use crate::sim::{Recording, Trajectory};

/// Pre-boundary segments shorter than this give an inconclusive report.
pub const MIN_LLN_SEGMENT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LlnReport {
    /// Number of pre-τ states `n = 0, …, τ−1` (all states if the axes were never hit).
    pub segment_len: u64,
    pub hit_boundary: bool,
    /// Least-squares slope of `S_n` on `n` over the second half of the segment.
    pub slope: f64,
    pub rho_tilde: f64,
    /// `|slope − ρ̃| / |ρ̃|`; `None` when `ρ̃ = 0`.
    pub relative_gap: Option<f64>,
    pub conclusive: bool,
    /// `min T_n / n` over the second half of the segment.
    pub t_liminf_proxy: f64,
}

impl fmt::Display for LlnReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "segment_len={} hit_boundary={} slope={} rho_tilde={} relative_gap={} conclusive={} t_liminf_proxy={}",
            self.segment_len,
            self.hit_boundary,
            self.slope,
            self.rho_tilde,
            self.relative_gap.map_or("undefined".to_string(), |g| g.to_string()),
            self.conclusive,
            self.t_liminf_proxy
        )
    }
}

fn require_full(traj: &Trajectory) -> Result<(), AnalysisError> {
    if traj.recording != Recording::Full {
        return Err(AnalysisError::Unsupported(
            "law-of-large-numbers checks need a fully recorded trajectory".into(),
        ));
    }
    Ok(())
}

pub fn lln_check(traj: &Trajectory, diag: &LinearDiagnostics) -> Result<LlnReport, AnalysisError> {
    require_full(traj)?;
    let (segment_len, hit_boundary) = match traj.first_boundary {
        Some((tau, _)) => (tau, true),
        None => (traj.jumps + 1, false),
    };
    let lo = segment_len / 2;
    let (mut sn, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut t_min = f64::INFINITY;
    for (n, s) in traj.states().filter(|&(n, _)| n >= lo && n < segment_len) {
        let x = n as f64;
        let y = diag.s_value(s);
        sn += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        if n > 0 {
            t_min = t_min.min(diag.t_value(s) / x);
        }
    }
    let denom = sn * sxx - sx * sx;
    let slope = if sn >= 2.0 && denom > 0.0 {
        (sn * sxy - sx * sy) / denom
    } else {
        f64::NAN
    };
    let rho_tilde = diag.rho_tilde;
    let relative_gap = (rho_tilde != 0.0).then(|| (slope - rho_tilde).abs() / rho_tilde.abs());
    Ok(LlnReport {
        segment_len,
        hit_boundary,
        slope,
        rho_tilde,
        relative_gap,
        conclusive: segment_len >= MIN_LLN_SEGMENT && slope.is_finite(),
        t_liminf_proxy: t_min,
    })
}

/// `log S_{n∧τ} / log n` for the process killed at the first axis visit.
pub fn lamperti_exponent(
    traj: &Trajectory,
    diag: &LinearDiagnostics,
    n: u64,
) -> Result<f64, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::Unsupported("exponent needs n ≥ 2".into()));
    }
    let m = traj.first_boundary.map_or(n, |(tau, _)| tau.min(n));
    let state = if m == traj.jumps {
        Some(traj.final_state)
    } else {
        traj.states().find(|&(k, _)| k == m).map(|(_, s)| s)
    };
    let state = state.ok_or(AnalysisError::TooShort {
        needed: m,
        got: traj.jumps,
    })?;
    Ok(diag.s_value(state).ln() / (n as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::linear_diagnostics;
    use crate::rates::{Model, State, TypeIIModel};
    use crate::sim::{simulate_jump_chain, StopRule};

    #[test]
    fn short_run_inconclusive() {
        let m = TypeIIModel::new([1.0, 1.0], [3.0, 2.0], [1.0, 1.0]);
        let d = linear_diagnostics(&m);
        let t = simulate_jump_chain(
            &Model::TypeII(m),
            State::xy(50, 50),
            &StopRule::jumps(500).on_boundary(),
            1,
            Recording::Full,
        )
        .unwrap();
        let r = lln_check(&t, &d).unwrap();
        assert!(!r.conclusive);
        assert!(lamperti_exponent(&t, &d, 500).unwrap().is_finite());
    }

    #[test]
    fn thinned_rejected() {
        let m = TypeIIModel::symmetric(1.0, 2.0, 1.0);
        let t = simulate_jump_chain(
            &Model::TypeII(m),
            State::xy(5, 5),
            &StopRule::jumps(10),
            1,
            Recording::default(),
        )
        .unwrap();
        assert!(lln_check(&t, &linear_diagnostics(&m)).is_err());
    }
}
