//! Reuter's series. With `r_k = max (a+b)` and `s_k = min (c+d)` over the
//! interior states of the line `x₁+x₂ = k`,
//! `A = Σ_{k≥2} (s₂⋯s_k)/(r₂⋯r_k)`; the tilded versions take the extrema
//! over the whole line, boundary states included, and
//! `Ã = Σ_{k≥1} (r̃₁⋯r̃_{k−1})/(s̃₁⋯s̃_k)`.
//!
//! Terms are accumulated in log space, so long products neither overflow nor
//! underflow before the sum sees them.

use std::fmt;

use super::AnalysisError;
use crate::rates::{Model, State};

const MARGIN: f64 = 0.05;
const TAIL_TOL: f64 = 1e-6;
const MIN_TERMS: usize = 10;

/// Per-level rate extrema; index `k` holds level `k` (index 0 unused, and
/// index 1 unused for the interior sequences).
#[derive(Debug, Clone, PartialEq)]
pub struct RateSequences {
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub r_tilde: Vec<f64>,
    pub s_tilde: Vec<f64>,
}

impl RateSequences {
    /// Scans every state with `1 ≤ x₁+x₂ ≤ k_max`.
    pub fn from_model(model: &Model, k_max: usize) -> Result<Self, AnalysisError> {
        let mut seq = RateSequences {
            r: vec![f64::NAN; k_max + 1],
            s: vec![f64::NAN; k_max + 1],
            r_tilde: vec![f64::NAN; k_max + 1],
            s_tilde: vec![f64::NAN; k_max + 1],
        };
        for k in 1..=k_max as u64 {
            let (mut r, mut s) = (f64::NEG_INFINITY, f64::INFINITY);
            let (mut rt, mut st) = (f64::NEG_INFINITY, f64::INFINITY);
            for x1 in 0..=k {
                let state = State::xy(x1, k - x1);
                let v = model.six_rates(state)?;
                let (birth, death) = (v[0] + v[1], v[2] + v[3]);
                rt = rt.max(birth);
                st = st.min(death);
                if state.is_interior() {
                    r = r.max(birth);
                    s = s.min(death);
                }
            }
            let k = k as usize;
            seq.r_tilde[k] = rt;
            seq.s_tilde[k] = st;
            if k >= 2 {
                seq.r[k] = r;
                seq.s[k] = s;
            }
        }
        Ok(seq)
    }

    /// Closed form for the symmetric linear model:
    /// `r_k = r̃_k = 2λ + αk`, `s_k = βk`, `s̃_k = 0`.
    pub fn symmetric_linear(alpha: f64, beta: f64, lambda: f64, k_max: usize) -> Self {
        let r: Vec<f64> = (0..=k_max)
            .map(|k| 2.0 * lambda + alpha * k as f64)
            .collect();
        let s = (0..=k_max).map(|k| beta * k as f64).collect();
        RateSequences {
            r_tilde: r.clone(),
            r,
            s,
            s_tilde: vec![0.0; k_max + 1],
        }
    }

    pub fn k_max(&self) -> usize {
        self.r.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Diverges,
    Converges,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Diverges => "diverges",
            Verdict::Converges => "converges",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    /// Partial sums in term order.
    pub partial_sums: Vec<f64>,
    pub last_term: f64,
    /// Ratio of the last two terms.
    pub term_ratio_tail: f64,
    /// Geometric tail bound `last·q/(1−q)`; infinite when `q ≥ 1`.
    pub tail_estimate: f64,
    pub verdict: Verdict,
}

impl SeriesSummary {
    fn from_log_terms(log_terms: &[f64]) -> Self {
        let mut partial_sums = Vec::with_capacity(log_terms.len());
        let mut acc = 0.0;
        for lt in log_terms {
            acc += lt.exp();
            partial_sums.push(acc);
        }
        let n = log_terms.len();
        let last_term = log_terms[n - 1].exp();
        let q = (log_terms[n - 1] - log_terms[n - 2]).exp();
        let q = if q.is_nan() { 0.0 } else { q };
        let tail_estimate = if q < 1.0 {
            last_term * q / (1.0 - q)
        } else {
            f64::INFINITY
        };
        let verdict = if q > 1.0 + MARGIN {
            Verdict::Diverges
        } else if q < 1.0 - MARGIN && tail_estimate < TAIL_TOL {
            Verdict::Converges
        } else {
            Verdict::Inconclusive
        };
        SeriesSummary {
            partial_sums,
            last_term,
            term_ratio_tail: q,
            tail_estimate,
            verdict,
        }
    }

    pub fn sum(&self) -> f64 {
        *self.partial_sums.last().unwrap()
    }
}

impl fmt::Display for SeriesSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "terms={} partial_sum={:e} last_term={:e} term_ratio_tail={} tail_estimate={:e} verdict={}",
            self.partial_sums.len(),
            self.sum(),
            self.last_term,
            self.term_ratio_tail,
            self.tail_estimate,
            self.verdict
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TildeSeries {
    Defined(SeriesSummary),
    /// `s̃_k = 0` at level `k`.
    Undefined {
        k: usize,
    },
}

impl fmt::Display for TildeSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TildeSeries::Defined(s) => s.fmt(f),
            TildeSeries::Undefined { k } => write!(f, "undefined (s_tilde_{k} = 0)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub a: SeriesSummary,
    pub a_tilde: TildeSeries,
}

impl fmt::Display for SeriesReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A: {}", self.a)?;
        write!(f, "A_tilde: {}", self.a_tilde)
    }
}

// false for NaN
fn positive(v: f64) -> bool {
    v > 0.0
}

fn nonnegative(v: f64) -> bool {
    v >= 0.0
}

/// Both series truncated at level `k_max`.
pub fn reuter_series(seq: &RateSequences, k_max: usize) -> Result<SeriesReport, AnalysisError> {
    if k_max < MIN_TERMS {
        return Err(AnalysisError::Series(format!(
            "K = {k_max} below {MIN_TERMS}"
        )));
    }
    if seq.k_max() < k_max {
        return Err(AnalysisError::Series(format!(
            "sequences stop at level {}, need {k_max}",
            seq.k_max()
        )));
    }
    if let Some(k) = (2..=k_max).find(|&k| !positive(seq.r[k]) || !nonnegative(seq.s[k])) {
        return Err(AnalysisError::Series(format!(
            "r_{k} = {} and s_{k} = {} (need r_k > 0, s_k ≥ 0)",
            seq.r[k], seq.s[k]
        )));
    }
    let mut log_terms = Vec::with_capacity(k_max);
    let mut acc = 0.0;
    for k in 2..=k_max {
        acc += seq.s[k].ln() - seq.r[k].ln();
        log_terms.push(acc);
    }
    let a = SeriesSummary::from_log_terms(&log_terms);

    let a_tilde = match (1..=k_max).find(|&k| seq.s_tilde[k] == 0.0) {
        Some(k) => TildeSeries::Undefined { k },
        None => {
            if let Some(k) =
                (1..=k_max).find(|&k| !positive(seq.s_tilde[k]) || !nonnegative(seq.r_tilde[k]))
            {
                return Err(AnalysisError::Series(format!(
                    "r_tilde_{k} = {} and s_tilde_{k} = {}",
                    seq.r_tilde[k], seq.s_tilde[k]
                )));
            }
            let mut log_terms = Vec::with_capacity(k_max);
            let mut acc = 0.0;
            for k in 1..=k_max {
                if k > 1 {
                    acc += seq.r_tilde[k - 1].ln();
                }
                acc -= seq.s_tilde[k].ln();
                log_terms.push(acc);
            }
            TildeSeries::Defined(SeriesSummary::from_log_terms(&log_terms))
        }
    };
    Ok(SeriesReport { a, a_tilde })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{ReuterModel, TypeIIModel};

    #[test]
    fn closed_form_matches_scan() {
        let m = Model::TypeII(TypeIIModel::symmetric(1.5, 2.0, 3.0));
        let scan = RateSequences::from_model(&m, 40).unwrap();
        let closed = RateSequences::symmetric_linear(2.0, 3.0, 1.5, 40);
        for k in 2..=40 {
            assert!((scan.r[k] - closed.r[k]).abs() < 1e-12);
            assert!((scan.s[k] - closed.s[k]).abs() < 1e-12);
            assert_eq!(scan.s_tilde[k], 0.0);
        }
    }

    #[test]
    fn verdicts() {
        let div = reuter_series(&RateSequences::symmetric_linear(1.0, 2.0, 1.0, 200), 200).unwrap();
        assert_eq!(div.a.verdict, Verdict::Diverges);
        assert_eq!(div.a_tilde, TildeSeries::Undefined { k: 1 });
        let conv =
            reuter_series(&RateSequences::symmetric_linear(2.0, 1.0, 1.0, 200), 200).unwrap();
        assert_eq!(conv.a.verdict, Verdict::Converges);
        let flat =
            reuter_series(&RateSequences::symmetric_linear(1.0, 1.0, 1.0, 200), 200).unwrap();
        assert_eq!(flat.a.verdict, Verdict::Inconclusive);
        for s in [&div.a, &conv.a, &flat.a] {
            assert!(s.partial_sums.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn immigration_death_tilde_converges() {
        let m = Model::Reuter(ReuterModel::immigration_death(1.0, 1.0, 1.0, 1.0, 1.0));
        let seq = RateSequences::from_model(&m, 60).unwrap();
        let rep = reuter_series(&seq, 60).unwrap();
        match rep.a_tilde {
            TildeSeries::Defined(s) => {
                assert_eq!(s.verdict, Verdict::Converges);
                // Σ 2^{k-1}/k! = (e² − 1)/2
                assert!((s.sum() - (1f64.exp().powi(2) - 1.0) / 2.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_short_or_bad_input() {
        let seq = RateSequences::symmetric_linear(1.0, 2.0, 1.0, 5);
        assert!(reuter_series(&seq, 5).is_err());
        assert!(reuter_series(&seq, 20).is_err());
    }
}
