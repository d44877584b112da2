//! Generator evaluation and finite-window drift certificates.
//!
//! `G f(s) = Σ q(s, s') (f(s') − f(s))` over the outgoing transitions of `s`.
//! [`certify`] scans a strip along the first axis for the last point where
//! `G f > 0`; [`leading_order`] supplies the hand-derived dominant term that
//! rules out sign changes past the scanned window.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::rates::{Model, RateError, State};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("test function is not finite at {0}")]
    Domain(State),
    #[error("unsupported pairing: {0}")]
    Unsupported(String),
    #[error("parameter window violated: {0}")]
    Window(String),
}

/// A real function on the quadrant. Non-finite values mark points outside
/// its domain.
pub trait TestFunction: Sync {
    fn eval(&self, s: State) -> f64;

    fn id(&self) -> String {
        "custom".to_string()
    }

    /// First `x` at which strip scans start.
    fn scan_start(&self) -> u64 {
        1
    }
}

impl<F: Fn(State) -> f64 + Sync> TestFunction for F {
    fn eval(&self, s: State) -> f64 {
        self(s)
    }
}

/// `f(x,y) = x^{−ν} − x^{−μ}` on `y = 0`, `x^{−ν}` on `y = 1`, `1` above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLyapunov {
    pub nu: f64,
    pub mu: f64,
}

impl PowerLyapunov {
    pub fn new(nu: f64, mu: f64) -> Self {
        PowerLyapunov { nu, mu }
    }

    /// Checks `0 < ν < μ < cap`.
    pub fn check_window(&self, cap: f64) -> Result<(), GeneratorError> {
        if 0.0 < self.nu && self.nu < self.mu && self.mu < cap {
            Ok(())
        } else {
            Err(GeneratorError::Window(format!(
                "need 0 < nu < mu < {cap}, got nu={} mu={}",
                self.nu, self.mu
            )))
        }
    }
}

impl TestFunction for PowerLyapunov {
    fn eval(&self, s: State) -> f64 {
        let x = s.x1 as f64;
        match s.x2 {
            0 => x.powf(-self.nu) - x.powf(-self.mu),
            1 => x.powf(-self.nu),
            _ => 1.0,
        }
    }

    fn id(&self) -> String {
        format!("power(nu={},mu={})", self.nu, self.mu)
    }
}

/// Four-level logarithmic function for the case `α₁ = 0`:
///
/// * `y = 0`: `1/L − 1/L³ − (λ₁/λ₂)/(xL²) + 1/(xL³)`
/// * `y = 1`: `1/L − 1/L³`
/// * `y = 2`: `1/L`
/// * `y ≥ 3`: `1`
///
/// with `L = ln x`. Undefined (NaN) for `x < 2` on the logarithmic levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLyapunov {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl LogLyapunov {
    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        LogLyapunov { lambda1, lambda2 }
    }
}

impl TestFunction for LogLyapunov {
    fn eval(&self, s: State) -> f64 {
        if s.x2 >= 3 {
            return 1.0;
        }
        if s.x1 < 2 {
            return f64::NAN;
        }
        let x = s.x1 as f64;
        let l = x.ln();
        let (l2, l3) = (l * l, l * l * l);
        match s.x2 {
            0 => 1.0 / l - 1.0 / l3 - (self.lambda1 / self.lambda2) / (x * l2) + 1.0 / (x * l3),
            1 => 1.0 / l - 1.0 / l3,
            _ => 1.0 / l,
        }
    }

    fn id(&self) -> String {
        format!("log(lambda1={},lambda2={})", self.lambda1, self.lambda2)
    }

    fn scan_start(&self) -> u64 {
        2
    }
}

/// `G f(s)`; fails if `f` is not finite at `s` or at a reachable neighbour.
pub fn apply_generator<F: TestFunction + ?Sized>(
    model: &Model,
    f: &F,
    s: State,
) -> Result<f64, GeneratorError> {
    let list = model.transitions(s)?;
    let here = f.eval(s);
    if !here.is_finite() {
        return Err(GeneratorError::Domain(s));
    }
    let mut acc = 0.0;
    for t in list.iter() {
        let there = f.eval(t.target);
        if !there.is_finite() {
            return Err(GeneratorError::Domain(t.target));
        }
        acc += t.rate * (there - here);
    }
    Ok(acc)
}

/// Result of a strip scan for `G f ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub function_id: String,
    pub x_lo: u64,
    pub x_hi: u64,
    pub levels: Vec<u64>,
    /// Smallest `N` with `G f ≤ 0` at every scanned `x > N` (0 if nowhere positive).
    pub minimal_n: u64,
    /// `minimal_n` of the rescan up to `2·x_hi`.
    pub doubled_minimal_n: u64,
    /// Points above `minimal_n` with `G f > 0` found by the doubled rescan.
    pub violations: Vec<(State, f64)>,
    pub stability_flag: bool,
    /// Scan points skipped because `f` is undefined there or at a neighbour.
    pub excluded: u64,
}

impl CertificateReport {
    pub fn certified(&self) -> bool {
        self.violations.is_empty() && self.minimal_n < self.x_hi && self.stability_flag
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let levels: Vec<String> = self.levels.iter().map(u64::to_string).collect();
        writeln!(f, "function = {}", self.function_id)?;
        writeln!(f, "levels = {}", levels.join(","))?;
        writeln!(f, "x_lo = {}", self.x_lo)?;
        writeln!(f, "x_hi = {}", self.x_hi)?;
        writeln!(f, "minimal_N = {}", self.minimal_n)?;
        writeln!(f, "doubled_minimal_N = {}", self.doubled_minimal_n)?;
        writeln!(f, "stability_flag = {}", self.stability_flag)?;
        writeln!(f, "excluded_points = {}", self.excluded)?;
        writeln!(f, "violations = {}", self.violations.len())?;
        for (s, v) in &self.violations {
            writeln!(f, "violation = {s} {v:e}")?;
        }
        write!(f, "certified = {}", self.certified())
    }
}

const SCAN_CHUNK: u64 = 1 << 15;

#[derive(Default, Clone, Copy)]
struct ScanPart {
    last_positive: Option<u64>,
    excluded: u64,
}

fn scan_range<F: TestFunction + ?Sized>(
    model: &Model,
    f: &F,
    levels: &[u64],
    lo: u64,
    hi: u64,
) -> Result<ScanPart, GeneratorError> {
    let chunks: Vec<(u64, u64)> = (lo..=hi)
        .step_by(SCAN_CHUNK as usize)
        .map(|a| (a, (a + SCAN_CHUNK - 1).min(hi)))
        .collect();
    let parts: Vec<Result<ScanPart, GeneratorError>> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut part = ScanPart::default();
            for x in a..=b {
                for &y in levels {
                    match apply_generator(model, f, State::xy(x, y)) {
                        Ok(g) if g > 0.0 => part.last_positive = Some(x),
                        Ok(_) => {}
                        Err(GeneratorError::Domain(_)) => part.excluded += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(part)
        })
        .collect();
    let mut merged = ScanPart::default();
    for p in parts {
        let p = p?;
        merged.excluded += p.excluded;
        if p.last_positive.is_some() {
            merged.last_positive = merged.last_positive.max(p.last_positive);
        }
    }
    Ok(merged)
}

/// Scans `x ∈ [scan_start, x_hi]` on each level, then rescans up to `2·x_hi`
/// to test stability of the threshold.
pub fn certify<F: TestFunction + ?Sized>(
    model: &Model,
    f: &F,
    levels: &[u64],
    x_hi: u64,
) -> Result<CertificateReport, GeneratorError> {
    let x_lo = f.scan_start();
    let first = scan_range(model, f, levels, x_lo, x_hi)?;
    let extra = scan_range(model, f, levels, x_hi + 1, 2 * x_hi)?;
    let minimal_n = first.last_positive.unwrap_or(0);
    let doubled_minimal_n = first.last_positive.max(extra.last_positive).unwrap_or(0);

    let mut violations = Vec::new();
    if doubled_minimal_n > minimal_n {
        // list the offending points of the doubled window above minimal_n
        for x in (minimal_n + 1)..=doubled_minimal_n {
            for &y in levels {
                if let Ok(g) = apply_generator(model, f, State::xy(x, y)) {
                    if g > 0.0 && violations.len() < 64 {
                        violations.push((State::xy(x, y), g));
                    }
                }
            }
        }
    }
    Ok(CertificateReport {
        function_id: f.id(),
        x_lo,
        x_hi,
        levels: levels.to_vec(),
        minimal_n,
        doubled_minimal_n,
        stability_flag: minimal_n == doubled_minimal_n,
        violations,
        excluded: first.excluded + extra.excluded,
    })
}

/// Which test function a leading-order query refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LyapunovFunction {
    Power(PowerLyapunov),
    Log(LogLyapunov),
}

impl LyapunovFunction {
    pub fn as_test_function(&self) -> &dyn TestFunction {
        match self {
            LyapunovFunction::Power(p) => p,
            LyapunovFunction::Log(l) => l,
        }
    }
}

/// Dominant term `coefficient · x^{power} · (ln x)^{log_power}` of `G f(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingTerm {
    pub level: u64,
    pub coefficient: f64,
    pub power: f64,
    pub log_power: f64,
}

impl LeadingTerm {
    pub fn is_negative(&self) -> bool {
        self.coefficient < 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficient * x.powf(self.power) * x.ln().powf(self.log_power)
    }
}

impl fmt::Display for LeadingTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "y={}: {} * x^{} * ln(x)^{}",
            self.level, self.coefficient, self.power, self.log_power
        )
    }
}

/// Hand-derived dominant term of `G f(x, y)` as `x → ∞` for the shipped
/// (model, function) pairs.
pub fn leading_order(
    model: &Model,
    f: &LyapunovFunction,
    level: u64,
) -> Result<LeadingTerm, GeneratorError> {
    let term = |coefficient, power, log_power| LeadingTerm {
        level,
        coefficient,
        power,
        log_power,
    };
    match (model, f) {
        (Model::TypeI(m), LyapunovFunction::Power(p)) => {
            p.check_window(m.g1.index.min(m.g2.index))?;
            match level {
                0 => Ok(term(-m.alpha1 * p.nu, -p.nu, 0.0)),
                // −g₂(x)·x^{−μ}
                1 => Ok(term(-m.g2.scale, m.g2.index - p.mu, m.g2.log_exponent)),
                _ => Err(GeneratorError::Unsupported(format!(
                    "level {level} for power function"
                ))),
            }
        }
        (Model::TypeII(m), LyapunovFunction::Power(p)) => {
            if m.alpha1 <= 0.0 {
                return Err(GeneratorError::Unsupported(
                    "power function needs alpha1 > 0; use the log function".into(),
                ));
            }
            p.check_window(1.0)?;
            match level {
                0 => Ok(term(-m.alpha1 * p.nu, -p.nu, 0.0)),
                1 => Ok(term(-m.beta2, 1.0 - p.mu, 0.0)),
                _ => Err(GeneratorError::Unsupported(format!(
                    "level {level} for power function"
                ))),
            }
        }
        (Model::TypeII(m), LyapunovFunction::Log(_)) => {
            if m.alpha1 != 0.0 {
                return Err(GeneratorError::Unsupported(
                    "log function applies only when alpha1 = 0".into(),
                ));
            }
            match level {
                0 => Ok(term(-m.lambda2, -1.0, -3.0)),
                1 => Ok(term(-m.beta2 * m.lambda1 / m.lambda2, 0.0, -2.0)),
                2 => Ok(term(-m.beta2, 1.0, -3.0)),
                _ => Err(GeneratorError::Unsupported(format!(
                    "level {level} for log function"
                ))),
            }
        }
        _ => Err(GeneratorError::Unsupported(format!(
            "{} model with {:?}",
            model.name(),
            f
        ))),
    }
}

/// Outcome of a pointwise drift check `G f ≤ −ε` over a region.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingBound {
    pub verified: bool,
    pub states_checked: u64,
    /// Largest `G f` seen in the region.
    pub worst: Option<(State, f64)>,
    pub violation: Option<(State, f64)>,
    /// `f(start)/ε` when verified and `start` lies in the region, `0` when it
    /// does not.
    pub bound: Option<f64>,
}

/// Checks `G f ≤ −ε` at every region state of `[0, x_max] × [0, y_max]` and
/// returns the mean exit-time bound `f(start)/ε`.
pub fn expected_hitting_bound<F, R>(
    model: &Model,
    f: &F,
    region: R,
    window: (u64, u64),
    epsilon: f64,
    start: State,
) -> Result<HittingBound, GeneratorError>
where
    F: TestFunction + ?Sized,
    R: Fn(State) -> bool,
{
    let mut out = HittingBound {
        verified: true,
        states_checked: 0,
        worst: None,
        violation: None,
        bound: None,
    };
    'scan: for x in 0..=window.0 {
        for y in 0..=window.1 {
            let s = State::xy(x, y);
            if !region(s) {
                continue;
            }
            let g = apply_generator(model, f, s)?;
            out.states_checked += 1;
            if out.worst.is_none_or(|(_, w)| g > w) {
                out.worst = Some((s, g));
            }
            if g > -epsilon {
                out.verified = false;
                out.violation = Some((s, g));
                break 'scan;
            }
        }
    }
    if out.verified {
        out.bound = Some(if region(start) {
            f.eval(start) / epsilon
        } else {
            0.0
        });
    }
    Ok(out)
}
