//! The auxiliary urn: from `(x, y)` step to `(x+1, y)` with probability
//! `(αx+βy)/((α+β)(x+y))`, else to `(x, y+1)`.
//!
//! Urn paths use one uniform per step (right iff `u < p`), drawn from the
//! same per-seed stream as the simulator.

use std::fmt;

use super::AnalysisError;
use crate::rates::{AuxUrnModel, State};
use crate::stream::Stream;

/// Largest horizon accepted by [`urn_moment_recursion`].
pub const MAX_RECURSION: u64 = 10_000_000;

/// `a_n(j) = 1 + (α−β)j / (s + (α+β)n)` with `s = (α+β)S₀`.
pub fn urn_factor(u: &AuxUrnModel, s0_total: u64, n: u64, j: f64) -> f64 {
    let ab = u.alpha + u.beta;
    1.0 + (u.alpha - u.beta) * j / (ab * s0_total as f64 + ab * n as f64)
}

fn check_start(initial: State) -> Result<u64, AnalysisError> {
    if initial == State::ORIGIN {
        return Err(AnalysisError::UrnOrigin);
    }
    Ok(initial.x1 + initial.x2)
}

fn diff(s: State) -> f64 {
    s.x1 as f64 - s.x2 as f64
}

fn urn_move(u: &AuxUrnModel, s: State, rng: &mut Stream) -> State {
    if rng.uniform() < u.right_probability(s) {
        State::xy(s.x1 + 1, s.x2)
    } else {
        State::xy(s.x1, s.x2 + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrnDiagnostics {
    pub rho: f64,
    /// `(X_n, Y_n)` for `n = 0, …, n_steps`.
    pub states: Vec<State>,
    /// `Z_n = U_n · Π_{k<n} a_k(1)⁻¹`.
    pub z_path: Vec<f64>,
    /// `max(n,1)^{−ρ}·(X_n − Y_n)`.
    pub scaled_diff: Vec<f64>,
    /// Largest one-step defect `|E[Z_{n+1} | state] − Z_n|` along the path,
    /// relative to `max(|Z_n|, 1/Π_{k≤n} a_k(1))` (the size of one step).
    pub max_martingale_defect: f64,
}

impl UrnDiagnostics {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,x,y,U_n,Z_n,scaled_diff")?;
        for (n, s) in self.states.iter().enumerate() {
            writeln!(
                w,
                "{n},{},{},{},{},{}",
                s.x1,
                s.x2,
                diff(*s),
                self.z_path[n],
                self.scaled_diff[n]
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for UrnDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.states.len() - 1;
        write!(
            f,
            "rho={} steps={} final={} Z_final={} scaled_diff_final={} max_martingale_defect={:e}",
            self.rho,
            n,
            self.states[n],
            self.z_path[n],
            self.scaled_diff[n],
            self.max_martingale_defect
        )
    }
}

/// Exact one-step defect of the `Z` martingale at `state` (step `n`), with
/// `prefix = Π_{k<n} a_k(1)`.
pub fn urn_martingale_defect(
    u: &AuxUrnModel,
    s0_total: u64,
    state: State,
    n: u64,
    prefix: f64,
) -> Result<f64, AnalysisError> {
    let a = urn_factor(u, s0_total, n, 1.0);
    if a == 0.0 {
        return Err(AnalysisError::UrnNormalizerVanishes(n));
    }
    let p = u.right_probability(state);
    let z = diff(state) / prefix;
    let next_prefix = prefix * a;
    let expected = (p * (diff(state) + 1.0) + (1.0 - p) * (diff(state) - 1.0)) / next_prefix;
    Ok((expected - z).abs() / z.abs().max(1.0 / next_prefix))
}

pub fn urn_simulate(
    u: &AuxUrnModel,
    initial: State,
    n_steps: u64,
    seed: u64,
) -> Result<UrnDiagnostics, AnalysisError> {
    let s0 = check_start(initial)?;
    let rho = u.rho();
    let mut rng = Stream::new(seed);
    let cap = n_steps as usize + 1;
    let mut states = Vec::with_capacity(cap);
    let mut z_path = Vec::with_capacity(cap);
    let mut scaled_diff = Vec::with_capacity(cap);
    let mut prefix = 1.0;
    let mut worst: f64 = 0.0;
    let mut s = initial;
    for n in 0..=n_steps {
        states.push(s);
        z_path.push(diff(s) / prefix);
        scaled_diff.push((n.max(1) as f64).powf(-rho) * diff(s));
        if n == n_steps {
            break;
        }
        worst = worst.max(urn_martingale_defect(u, s0, s, n, prefix)?);
        prefix *= urn_factor(u, s0, n, 1.0);
        s = urn_move(u, s, &mut rng);
    }
    Ok(UrnDiagnostics {
        rho,
        states,
        z_path,
        scaled_diff,
        max_martingale_defect: worst,
    })
}

/// States at the given (sorted) step counts, without storing the path. Uses
/// the same draws as [`urn_simulate`].
pub fn urn_endpoints(
    u: &AuxUrnModel,
    initial: State,
    checkpoints: &[u64],
    seed: u64,
) -> Result<Vec<State>, AnalysisError> {
    check_start(initial)?;
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(AnalysisError::Unsupported(
            "checkpoints must be sorted".into(),
        ));
    }
    let mut rng = Stream::new(seed);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut s = initial;
    let mut n = 0;
    for &c in checkpoints {
        while n < c {
            s = urn_move(u, s, &mut rng);
            n += 1;
        }
        out.push(s);
    }
    Ok(out)
}

/// Urn counts as Friedman colours: `W = αX+βY`, `B = βX+αY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedmanCheck {
    pub w: f64,
    pub b: f64,
    /// Max difference between the urn move probabilities and the Friedman
    /// draw probabilities `W/(W+B)`, `B/(W+B)`.
    pub max_prob_error: f64,
    /// Each urn move lands on the Friedman successor `(W+α, B+β)` resp. `(W+β, B+α)`.
    pub targets_match: bool,
}

pub fn friedman_correspondence(u: &AuxUrnModel, s: State) -> Result<FriedmanCheck, AnalysisError> {
    check_start(s)?;
    let colours = |s: State| {
        let (x, y) = (s.x1 as f64, s.x2 as f64);
        (u.alpha * x + u.beta * y, u.beta * x + u.alpha * y)
    };
    let (w, b) = colours(s);
    let p = u.right_probability(s);
    let white = w / (w + b);
    let max_prob_error = (p - white).abs().max(((1.0 - p) - b / (w + b)).abs());
    let right = colours(State::xy(s.x1 + 1, s.x2));
    let up = colours(State::xy(s.x1, s.x2 + 1));
    let targets_match = right == (w + u.alpha, b + u.beta) && up == (w + u.beta, b + u.alpha);
    Ok(FriedmanCheck {
        w,
        b,
        max_prob_error,
        targets_match,
    })
}

/// Exact first and second moments of `U_n = X_n − Y_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnMoments {
    pub rho: f64,
    pub mean_u: Vec<f64>,
    pub mean_u2: Vec<f64>,
    /// Running max of `max(n,1)^{−2ρ}·E[U_n²]`.
    pub running_max: Vec<f64>,
}

impl UrnMoments {
    pub fn scaled_second(&self, n: u64) -> f64 {
        (n.max(1) as f64).powf(-2.0 * self.rho) * self.mean_u2[n as usize]
    }

    /// Relative growth of the running max from `from` to `to`.
    pub fn plateau_change(&self, from: u64, to: u64) -> f64 {
        let a = self.running_max[from as usize];
        (self.running_max[to as usize] - a) / a
    }
}

pub fn urn_moment_recursion(
    u: &AuxUrnModel,
    initial: State,
    n_max: u64,
) -> Result<UrnMoments, AnalysisError> {
    let s0 = check_start(initial)?;
    if n_max > MAX_RECURSION {
        return Err(AnalysisError::Unsupported(format!(
            "recursion horizon {n_max} exceeds {MAX_RECURSION}"
        )));
    }
    let len = n_max as usize + 1;
    let mut out = UrnMoments {
        rho: u.rho(),
        mean_u: Vec::with_capacity(len),
        mean_u2: Vec::with_capacity(len),
        running_max: Vec::with_capacity(len),
    };
    let u0 = diff(initial);
    let (mut m1, mut m2) = (u0, u0 * u0);
    let mut best = f64::NEG_INFINITY;
    for n in 0..=n_max {
        out.mean_u.push(m1);
        out.mean_u2.push(m2);
        best = best.max((n.max(1) as f64).powf(-2.0 * out.rho) * m2);
        out.running_max.push(best);
        m1 *= urn_factor(u, s0, n, 1.0);
        m2 = m2 * urn_factor(u, s0, n, 2.0) + 1.0;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_urn_is_its_own_martingale() {
        let u = AuxUrnModel::new(2.0, 2.0);
        let d = urn_simulate(&u, State::xy(3, 1), 500, 9).unwrap();
        assert_eq!(d.rho, 0.0);
        for (z, s) in d.z_path.iter().zip(&d.states) {
            assert_eq!(*z, diff(*s));
        }
        let m = urn_moment_recursion(&u, State::xy(3, 1), 1000).unwrap();
        for n in 0..=1000 {
            assert_eq!(m.mean_u2[n], 4.0 + n as f64);
            assert_eq!(m.mean_u[n], 2.0);
        }
    }

    #[test]
    fn martingale_defect_small() {
        let u = AuxUrnModel::new(5.0, 1.0);
        let d = urn_simulate(&u, State::xy(1, 1), 1000, 4).unwrap();
        assert!(
            d.max_martingale_defect < 1e-12,
            "{}",
            d.max_martingale_defect
        );
    }

    #[test]
    fn endpoints_follow_path() {
        let u = AuxUrnModel::new(5.0, 1.0);
        let d = urn_simulate(&u, State::xy(2, 1), 300, 17).unwrap();
        let e = urn_endpoints(&u, State::xy(2, 1), &[0, 10, 300], 17).unwrap();
        assert_eq!(e, vec![d.states[0], d.states[10], d.states[300]]);
    }

    #[test]
    fn origin_and_degenerate_normalizer() {
        let u = AuxUrnModel::new(5.0, 1.0);
        assert_eq!(
            urn_simulate(&u, State::ORIGIN, 5, 1),
            Err(AnalysisError::UrnOrigin)
        );
        let v = AuxUrnModel::new(0.0, 1.0);
        assert_eq!(
            urn_simulate(&v, State::xy(1, 0), 5, 1),
            Err(AnalysisError::UrnNormalizerVanishes(0))
        );
    }

    #[test]
    fn friedman_law() {
        let u = AuxUrnModel::new(5.0, 1.0);
        for s in [State::xy(1, 1), State::xy(7, 2), State::xy(0, 4)] {
            let c = friedman_correspondence(&u, s).unwrap();
            assert!(c.targets_match);
            assert!(c.max_prob_error < 1e-15);
        }
    }
}
