use std::fmt;

use super::AnalysisError;
use crate::rates::{enumerate_transitions, Model, State, TypeIIModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `α₁α₂ < β₁β₂`
    Subcritical,
    /// `α₁α₂ = β₁β₂`
    Critical,
    /// `α₁α₂ > β₁β₂`
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        })
    }
}

/// Constants of the linear process, computed in coordinates relabeled so
/// that `α₁ ≥ α₂`. `params` holds the relabeled parameters; every
/// state-valued helper accepts user coordinates and relabels internally.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDiagnostics {
    pub params: TypeIIModel,
    pub swapped: bool,
    /// Positive root of `β₂r² + (α₁−α₂)r − β₁ = 0`.
    pub r: f64,
    /// `√((α₁−α₂)² + 4β₁β₂)`.
    pub discriminant: f64,
    pub d: f64,
    /// `α₁α₂ − β₁β₂`.
    pub rho_tilde: f64,
    /// Coefficients of `R = λ₁+λ₂ + k·S + l·T`; undefined in the critical case.
    pub k: Option<f64>,
    pub l: Option<f64>,
    pub q1: f64,
    pub q3: f64,
    /// `β₁ + α₁r + α₂r² + β₂r³`.
    pub cubic_coeff: f64,
    /// Smallest `y ≥ 0` with `cubic_coeff·y + q3 > 0`.
    pub y0: u64,
    pub regime: Regime,
}

impl LinearDiagnostics {
    pub fn to_working(&self, s: State) -> State {
        if self.swapped {
            s.swapped()
        } else {
            s
        }
    }

    /// `S(x, y)` in working coordinates.
    pub fn s_value(&self, s: State) -> f64 {
        let p = &self.params;
        let w = self.to_working(s);
        let (x, y) = (w.x1 as f64, w.x2 as f64);
        let base = p.alpha1 * p.alpha2 + p.beta1 * p.beta2;
        (base + 2.0 * p.alpha2 * p.beta2) * x + (base + 2.0 * p.alpha1 * p.beta1) * y
    }

    /// `T(x, y)` in working coordinates.
    pub fn t_value(&self, s: State) -> f64 {
        let p = &self.params;
        let w = self.to_working(s);
        let (x, y) = (w.x1 as f64, w.x2 as f64);
        p.beta2 * x + (self.r * p.beta2 + p.alpha1 - p.alpha2) * y
    }

    /// `U(x, y) = x − r·y − d` in working coordinates.
    pub fn u_value(&self, s: State) -> f64 {
        let w = self.to_working(s);
        w.x1 as f64 - self.r * w.x2 as f64 - self.d
    }

    /// `R(x, y)`, the total rate at interior states.
    pub fn r_value(&self, s: State) -> f64 {
        self.params.total_rate_interior(self.to_working(s))
    }

    fn working_model(&self) -> Model {
        Model::TypeII(self.params)
    }
}

impl fmt::Display for LinearDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or("undefined".to_string(), |v| v.to_string());
        writeln!(f, "swapped = {}", self.swapped)?;
        writeln!(f, "r = {}", self.r)?;
        writeln!(f, "D = {}", self.discriminant)?;
        writeln!(f, "d = {}", self.d)?;
        writeln!(f, "rho_tilde = {}", self.rho_tilde)?;
        writeln!(f, "regime = {}", self.regime)?;
        writeln!(f, "k = {}", opt(self.k))?;
        writeln!(f, "l = {}", opt(self.l))?;
        writeln!(f, "Q1 = {}", self.q1)?;
        writeln!(f, "Q3 = {}", self.q3)?;
        writeln!(f, "cubic_coeff = {}", self.cubic_coeff)?;
        write!(f, "y0 = {}", self.y0)
    }
}

pub fn linear_diagnostics(m: &TypeIIModel) -> LinearDiagnostics {
    let swapped = m.alpha1 < m.alpha2;
    let p = if swapped { m.relabeled() } else { *m };
    let (a1, a2, b1, b2, l1, l2) = (p.alpha1, p.alpha2, p.beta1, p.beta2, p.lambda1, p.lambda2);

    let discriminant = ((a1 - a2).powi(2) + 4.0 * b1 * b2).sqrt();
    // 2β₁ / (D + (α₁−α₂)) equals (D − (α₁−α₂)) / (2β₂) without the cancellation
    let r = 2.0 * b1 / (discriminant + (a1 - a2));
    let d = -(2.0 * (l1 - l2 * r) + a1 + b2 * r * r) / (2.0 * (a1 + b2 * r));
    let rho_tilde = a1 * a2 - b1 * b2;
    let scale = a1 * a2 + b1 * b2;
    let regime = if rho_tilde.abs() <= 1e-12 * scale {
        Regime::Critical
    } else if rho_tilde > 0.0 {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    };
    let (k, l) = match regime {
        Regime::Critical => (None, None),
        _ => (
            Some((a1 + r * b2) / rho_tilde),
            Some(
                -((a1 * a2 + 2.0 * a2 * b2 + b1 * b2) * r + a1 * a2 + 2.0 * a1 * b1 + b1 * b2)
                    / rho_tilde,
            ),
        ),
    };
    let q1 = d * (a1 + b2 * r) + l1 - r * l2;
    let q3 = l1 + l2 * r * r - 2.0 * d * (l1 - l2 * r) - 2.0 * d * d * (a1 + b2 * r);
    let cubic_coeff = b1 + a1 * r + a2 * r * r + b2 * r * r * r;
    let y0 = if q3 > 0.0 {
        0
    } else {
        (-q3 / cubic_coeff).floor() as u64 + 1
    };
    LinearDiagnostics {
        params: p,
        swapped,
        r,
        discriminant,
        d,
        rho_tilde,
        k,
        l,
        q1,
        q3,
        cubic_coeff,
        y0,
        regime,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functionals {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
}

/// `(R, S, T, U)` at a user-coordinate state.
pub fn functionals(diag: &LinearDiagnostics, s: State) -> Functionals {
    Functionals {
        r: diag.r_value(s),
        s: diag.s_value(s),
        t: diag.t_value(s),
        u: diag.u_value(s),
    }
}

/// One-step mean increment by enumeration against its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftCheck {
    pub enumerated: f64,
    pub formula: f64,
    /// `Σ p·|term|` of the enumerated sum; the scale of its rounding error.
    pub magnitude: f64,
}

impl DriftCheck {
    /// Error relative to the larger of the result and the summed magnitude,
    /// so cancellation near `ρ̃ = 0` is not mistaken for a mismatch.
    pub fn relative_error(&self) -> f64 {
        let scale = self
            .formula
            .abs()
            .max(self.enumerated.abs())
            .max(self.magnitude);
        if scale == 0.0 {
            0.0
        } else {
            (self.enumerated - self.formula).abs() / scale
        }
    }
}

/// Jump-chain drift of `S` at an interior state versus
/// `ρ̃ + (2λ₁β₂(α₂+β₁) + 2λ₂β₁(α₁+β₂))/R`.
pub fn s_drift(diag: &LinearDiagnostics, s: State) -> Result<DriftCheck, AnalysisError> {
    if !s.is_interior() {
        return Err(AnalysisError::NonInterior(s));
    }
    let w = diag.to_working(s);
    let list = enumerate_transitions(&diag.working_model(), w)?;
    let here = diag.s_value(s);
    // targets are in working coordinates; map back before evaluating
    let terms: Vec<f64> = list
        .iter()
        .map(|t| t.rate * (diag.s_value(diag.to_working(t.target)) - here) / list.total())
        .collect();
    let enumerated = terms.iter().sum();
    let magnitude = terms.iter().map(|v| v.abs()).sum();
    let p = &diag.params;
    let formula = diag.rho_tilde
        + (2.0 * p.lambda1 * p.beta2 * (p.alpha2 + p.beta1)
            + 2.0 * p.lambda2 * p.beta1 * (p.alpha1 + p.beta2))
            / diag.r_value(s);
    Ok(DriftCheck {
        enumerated,
        formula,
        magnitude,
    })
}

/// One-step conditional second moment of `U` at an interior state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnStep {
    /// `E[U²_{n+1} | state]` by enumeration.
    pub lhs: f64,
    /// `U²(1 + 2(α₁+rβ₂)/R)`
    pub rhs_main: f64,
    /// `(2UQ₁ + Q₂)/R`
    pub rhs_remainder: f64,
    /// `(cubic_coeff·y + Q₃)/R`
    pub reduced_remainder: f64,
    pub remainder_positive: bool,
}

impl UnStep {
    pub fn identity_error(&self) -> f64 {
        let rhs = self.rhs_main + self.rhs_remainder;
        (self.lhs - rhs).abs() / self.lhs.abs().max(rhs.abs()).max(1e-300)
    }

    pub fn reduction_error(&self) -> f64 {
        (self.rhs_remainder - self.reduced_remainder).abs()
            / self
                .rhs_remainder
                .abs()
                .max(self.reduced_remainder.abs())
                .max(1e-300)
    }
}

pub fn un_squared_one_step(diag: &LinearDiagnostics, s: State) -> Result<UnStep, AnalysisError> {
    if !s.is_interior() {
        return Err(AnalysisError::NonInterior(s));
    }
    let w = diag.to_working(s);
    let list = enumerate_transitions(&diag.working_model(), w)?;
    let lhs = list
        .iter()
        .map(|t| t.rate * diag.u_value(diag.to_working(t.target)).powi(2))
        .sum::<f64>()
        / list.total();

    let p = &diag.params;
    let r = diag.r;
    let (x, y) = (w.x1 as f64, w.x2 as f64);
    let total = diag.r_value(s);
    let u = diag.u_value(s);
    let rhs_main = u * u * (1.0 + 2.0 * (p.alpha1 + r * p.beta2) / total);
    // Q₂ carries the immigration constant λ₁ + r²λ₂
    let q2 = (r * r * p.beta2 + p.alpha1) * x
        + (p.beta1 + r * r * p.alpha2) * y
        + p.lambda1
        + r * r * p.lambda2;
    let rhs_remainder = (2.0 * u * diag.q1 + q2) / total;
    let reduced = diag.cubic_coeff * y + diag.q3;
    Ok(UnStep {
        lhs,
        rhs_main,
        rhs_remainder,
        reduced_remainder: reduced / total,
        remainder_positive: reduced > 0.0,
    })
}

/// For fully symmetric parameters: `E[(x'−y')²]` by enumeration versus
/// `U²(1 + 2(α+β)/(2λ + (α+β)(x+y))) + 1` with `U = x − y`.
pub fn symmetric_step(m: &TypeIIModel, s: State) -> Result<DriftCheck, AnalysisError> {
    if m.alpha1 != m.alpha2 || m.beta1 != m.beta2 || m.lambda1 != m.lambda2 {
        return Err(AnalysisError::NotSymmetric);
    }
    if !s.is_interior() {
        return Err(AnalysisError::NonInterior(s));
    }
    let list = enumerate_transitions(&Model::TypeII(*m), s)?;
    let diff = |s: State| s.x1 as f64 - s.x2 as f64;
    let enumerated = list
        .iter()
        .map(|t| t.rate * diff(t.target).powi(2))
        .sum::<f64>()
        / list.total();
    let (a, b, l) = (m.alpha1, m.beta1, m.lambda1);
    let u = diff(s);
    let formula = u * u * (1.0 + 2.0 * (a + b) / (2.0 * l + (a + b) * (s.x1 + s.x2) as f64)) + 1.0;
    Ok(DriftCheck {
        enumerated,
        formula,
        magnitude: enumerated,
    })
}
