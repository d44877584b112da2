//! Process families and their transition structure.
//!
//! Four families live here: the non-linear competition process ([`TypeIModel`]),
//! the linear competition process ([`TypeIIModel`]), the general six-move
//! competition process with user rate callbacks ([`ReuterModel`]) and the
//! auxiliary two-colour urn ([`AuxUrnModel`]). All of them are wrapped by
//! [`Model`], which enumerates the outgoing transitions of any state in a
//! fixed order: right, up, left, down, then the two diagonal moves.

use std::fmt;
use std::sync::Arc;

use arrayvec::ArrayVec;
use thiserror::Error;

/// Largest admissible coordinate value (2⁶³ − 1).
pub const MAX_COORD: u64 = i64::MAX as u64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("absorbing state {0}: total transition rate is zero")]
    Absorbing(State),
    #[error("coordinate overflow leaving state {0}")]
    CoordinateOverflow(State),
    #[error("rate at state {state} is not finite or negative ({value})")]
    BadRate { state: State, value: f64 },
    #[error("urn state (0,0) has no transition law")]
    EmptyUrn,
    #[error("{0} has no six-rate representation")]
    NoReuterForm(&'static str),
}

/// A point of the nonnegative integer quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct State {
    pub x1: u64,
    pub x2: u64,
}

impl State {
    pub const ORIGIN: State = State { x1: 0, x2: 0 };

    /// Builds a state, rejecting coordinates above 2⁶³ − 1.
    pub fn new(x1: u64, x2: u64) -> Option<State> {
        (x1 <= MAX_COORD && x2 <= MAX_COORD).then_some(State { x1, x2 })
    }

    pub const fn xy(x1: u64, x2: u64) -> State {
        State { x1, x2 }
    }

    pub fn on_boundary(&self) -> bool {
        self.x1 == 0 || self.x2 == 0
    }

    pub fn is_interior(&self) -> bool {
        !self.on_boundary()
    }

    pub fn swapped(&self) -> State {
        State {
            x1: self.x2,
            x2: self.x1,
        }
    }

    pub fn coord(&self, i: usize) -> u64 {
        match i {
            0 => self.x1,
            _ => self.x2,
        }
    }

    /// Applies a move, failing on underflow at an axis or overflow past 2⁶³ − 1.
    pub fn apply(&self, mv: Move) -> Result<State, RateError> {
        let (dx, dy) = mv.delta();
        let shift = |v: u64, d: i64| -> Option<u64> {
            match d {
                0 => Some(v),
                1 if v < MAX_COORD => Some(v + 1),
                -1 if v > 0 => Some(v - 1),
                _ => None,
            }
        };
        match (shift(self.x1, dx), shift(self.x2, dy)) {
            (Some(x1), Some(x2)) => Ok(State { x1, x2 }),
            _ => Err(RateError::CoordinateOverflow(*self)),
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x1, self.x2)
    }
}

/// The six nearest-neighbour moves, in enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Right,
    Up,
    Left,
    Down,
    /// (x₁−1, x₂+1)
    LeftUp,
    /// (x₁+1, x₂−1)
    RightDown,
}

impl Move {
    pub const ALL: [Move; 6] = [
        Move::Right,
        Move::Up,
        Move::Left,
        Move::Down,
        Move::LeftUp,
        Move::RightDown,
    ];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Move::Right => (1, 0),
            Move::Up => (0, 1),
            Move::Left => (-1, 0),
            Move::Down => (0, -1),
            Move::LeftUp => (-1, 1),
            Move::RightDown => (1, -1),
        }
    }
}

/// `g(z) = scale · z^index · ln(1+z)^log_exponent`, with `g(0) = 0`.
///
/// The log factor is slowly varying, so the regular-variation index of `g`
/// is `index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionFunction {
    pub scale: f64,
    pub index: f64,
    pub log_exponent: f64,
}

impl InteractionFunction {
    pub fn new(scale: f64, index: f64, log_exponent: f64) -> Self {
        InteractionFunction {
            scale,
            index,
            log_exponent,
        }
    }

    /// The identity `g(z) = z` (Lotka–Volterra interaction).
    pub fn identity() -> Self {
        Self::power(1.0, 1.0)
    }

    pub fn power(scale: f64, index: f64) -> Self {
        Self::new(scale, index, 0.0)
    }

    pub fn eval(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        let mut v = self.scale * z.powf(self.index);
        if self.log_exponent != 0.0 {
            v *= z.ln_1p().powf(self.log_exponent);
        }
        v
    }

    fn violations(&self, name: &str, out: &mut Vec<Violation>) {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            out.push(Violation::new(
                format!("{name}.scale"),
                "scale must be positive",
            ));
        }
        if !(self.index.is_finite() && self.index > 0.0) {
            out.push(Violation::new(
                format!("{name}.index"),
                "index must be positive",
            ));
        }
        if !self.log_exponent.is_finite() {
            out.push(Violation::new(
                format!("{name}.log_exponent"),
                "log exponent must be finite",
            ));
        }
    }
}

/// Competition process with non-linear interaction.
///
/// Right `λ₁+α₁x₁`, up `λ₂+α₂x₂`, left `x₁g₁(x₂)`, down `x₂g₂(x₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeIModel {
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub g1: InteractionFunction,
    pub g2: InteractionFunction,
}

impl TypeIModel {
    /// `λᵢ = αᵢ = 1`, `gᵢ(z) = z`.
    pub fn lotka_volterra() -> Self {
        TypeIModel {
            lambda1: 1.0,
            lambda2: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            g1: InteractionFunction::identity(),
            g2: InteractionFunction::identity(),
        }
    }
}

/// Competition process with linear interaction.
///
/// Right `λ₁+α₁x₁`, up `λ₂+α₂x₂`, left `β₁x₂`, down `β₂x₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeIIModel {
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Require `λᵢ > 0` in addition to the basic constraints.
    pub strict: bool,
}

impl TypeIIModel {
    pub fn new(lambda: [f64; 2], alpha: [f64; 2], beta: [f64; 2]) -> Self {
        TypeIIModel {
            lambda1: lambda[0],
            lambda2: lambda[1],
            alpha1: alpha[0],
            alpha2: alpha[1],
            beta1: beta[0],
            beta2: beta[1],
            strict: true,
        }
    }

    pub fn symmetric(lambda: f64, alpha: f64, beta: f64) -> Self {
        Self::new([lambda; 2], [alpha; 2], [beta; 2])
    }

    /// OK Corral with resurrection: `α = 0`, `β = (γ₁, γ₂)`, `λ = (λ₁, λ₂)`.
    pub fn ok_corral(lambda: [f64; 2], beta: [f64; 2]) -> Self {
        Self::new(lambda, [0.0, 0.0], beta)
    }

    /// Same process with the coordinates exchanged.
    pub fn relabeled(&self) -> Self {
        TypeIIModel {
            lambda1: self.lambda2,
            lambda2: self.lambda1,
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            beta1: self.beta2,
            beta2: self.beta1,
            strict: self.strict,
        }
    }

    /// `R(x,y) = (α₁+β₂)x + (α₂+β₁)y + λ₁ + λ₂`.
    pub fn total_rate_interior(&self, s: State) -> f64 {
        let (x, y) = (s.x1 as f64, s.x2 as f64);
        (self.alpha1 + self.beta2) * x
            + (self.alpha2 + self.beta1) * y
            + self.lambda1
            + self.lambda2
    }
}

/// A state-dependent nonnegative rate.
pub type RateFn = Arc<dyn Fn(State) -> f64 + Send + Sync>;

/// General competition process with six rate callbacks.
///
/// Moves: `a` right, `b` up, `c` left, `d` down, `e` to `(x₁−1, x₂+1)`,
/// `f` to `(x₁+1, x₂−1)`. `c` and `e` are ignored when `x₁ = 0`, `d` and `f`
/// when `x₂ = 0`.
#[derive(Clone)]
pub struct ReuterModel {
    pub name: String,
    pub a: RateFn,
    pub b: RateFn,
    pub c: RateFn,
    pub d: RateFn,
    pub e: RateFn,
    pub f: RateFn,
}

impl fmt::Debug for ReuterModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReuterModel")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

impl ReuterModel {
    pub fn new(
        name: impl Into<String>,
        a: impl Fn(State) -> f64 + Send + Sync + 'static,
        b: impl Fn(State) -> f64 + Send + Sync + 'static,
        c: impl Fn(State) -> f64 + Send + Sync + 'static,
        d: impl Fn(State) -> f64 + Send + Sync + 'static,
        e: impl Fn(State) -> f64 + Send + Sync + 'static,
        f: impl Fn(State) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ReuterModel {
            name: name.into(),
            a: Arc::new(a),
            b: Arc::new(b),
            c: Arc::new(c),
            d: Arc::new(d),
            e: Arc::new(e),
            f: Arc::new(f),
        }
    }

    /// Constant immigration `a`, `b`; linear deaths `γx₁`, `δx₂`; transfer
    /// `εx₁x₂` towards the second coordinate; no reverse transfer.
    pub fn immigration_death(a: f64, b: f64, gamma: f64, delta: f64, epsilon: f64) -> Self {
        ReuterModel::new(
            format!("immigration_death(a={a},b={b},gamma={gamma},delta={delta},epsilon={epsilon})"),
            move |_| a,
            move |_| b,
            move |s| gamma * s.x1 as f64,
            move |s| delta * s.x2 as f64,
            move |s| epsilon * s.x1 as f64 * s.x2 as f64,
            |_| 0.0,
        )
    }
}

/// Auxiliary urn process: from `(x, y)` step right with probability
/// `(αx+βy)/((α+β)(x+y))`, otherwise up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxUrnModel {
    pub alpha: f64,
    pub beta: f64,
}

impl AuxUrnModel {
    pub fn new(alpha: f64, beta: f64) -> Self {
        AuxUrnModel { alpha, beta }
    }

    /// `ρ = (α−β)/(α+β)`.
    pub fn rho(&self) -> f64 {
        (self.alpha - self.beta) / (self.alpha + self.beta)
    }

    /// Probability of the right move at `s`.
    pub fn right_probability(&self, s: State) -> f64 {
        let (x, y) = (s.x1 as f64, s.x2 as f64);
        (self.alpha * x + self.beta * y) / ((self.alpha + self.beta) * (x + y))
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    TypeI(TypeIModel),
    TypeII(TypeIIModel),
    Reuter(ReuterModel),
    AuxUrn(AuxUrnModel),
}

impl From<TypeIModel> for Model {
    fn from(m: TypeIModel) -> Self {
        Model::TypeI(m)
    }
}

impl From<TypeIIModel> for Model {
    fn from(m: TypeIIModel) -> Self {
        Model::TypeII(m)
    }
}

impl From<ReuterModel> for Model {
    fn from(m: ReuterModel) -> Self {
        Model::Reuter(m)
    }
}

impl From<AuxUrnModel> for Model {
    fn from(m: AuxUrnModel) -> Self {
        Model::AuxUrn(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub mv: Move,
    pub target: State,
    pub rate: f64,
}

/// Positive-rate outgoing transitions of one state, in [`Move::ALL`] order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransitionList {
    entries: ArrayVec<Transition, 6>,
    total: f64,
}

impl TransitionList {
    pub fn entries(&self) -> &[Transition] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.entries.iter()
    }

    /// Rate of a given move, zero if absent.
    pub fn rate_of(&self, mv: Move) -> f64 {
        self.entries
            .iter()
            .find(|t| t.mv == mv)
            .map_or(0.0, |t| t.rate)
    }

    /// Inverse-CDF selection on the fixed order with `u ∈ [0, 1)`.
    pub fn select(&self, u: f64) -> &Transition {
        let threshold = u * self.total;
        let mut acc = 0.0;
        for t in &self.entries {
            acc += t.rate;
            if threshold < acc {
                return t;
            }
        }
        // rounding can leave threshold == acc on the last entry
        self.entries.last().expect("non-empty transition list")
    }

    fn push(&mut self, source: State, mv: Move, rate: f64) -> Result<(), RateError> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(RateError::BadRate {
                state: source,
                value: rate,
            });
        }
        if rate > 0.0 {
            let target = source.apply(mv)?;
            self.entries.push(Transition { mv, target, rate });
            self.total += rate;
        }
        Ok(())
    }
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::TypeI(_) => "type I",
            Model::TypeII(_) => "type II",
            Model::Reuter(_) => "reuter",
            Model::AuxUrn(_) => "urn",
        }
    }

    /// Outgoing transitions, possibly empty. Use [`enumerate_transitions`] for
    /// the variant that rejects absorbing states.
    pub fn transitions(&self, s: State) -> Result<TransitionList, RateError> {
        let mut list = TransitionList::default();
        let (x, y) = (s.x1 as f64, s.x2 as f64);
        match self {
            Model::TypeI(m) => {
                list.push(s, Move::Right, m.lambda1 + m.alpha1 * x)?;
                list.push(s, Move::Up, m.lambda2 + m.alpha2 * y)?;
                if s.x1 > 0 {
                    list.push(s, Move::Left, x * m.g1.eval(y))?;
                }
                if s.x2 > 0 {
                    list.push(s, Move::Down, y * m.g2.eval(x))?;
                }
            }
            Model::TypeII(m) => {
                list.push(s, Move::Right, m.lambda1 + m.alpha1 * x)?;
                list.push(s, Move::Up, m.lambda2 + m.alpha2 * y)?;
                if s.x1 > 0 {
                    list.push(s, Move::Left, m.beta1 * y)?;
                }
                if s.x2 > 0 {
                    list.push(s, Move::Down, m.beta2 * x)?;
                }
            }
            Model::Reuter(m) => {
                let rates = reuter_rates(m, s);
                for (mv, rate) in Move::ALL.into_iter().zip(rates) {
                    list.push(s, mv, rate)?;
                }
            }
            Model::AuxUrn(m) => {
                if s == State::ORIGIN {
                    return Err(RateError::EmptyUrn);
                }
                let p = m.right_probability(s);
                list.push(s, Move::Right, p)?;
                list.push(s, Move::Up, 1.0 - p)?;
            }
        }
        Ok(list)
    }

    /// The six rates `a..f` at `s` with inactive moves set to zero.
    pub fn six_rates(&self, s: State) -> Result<[f64; 6], RateError> {
        match self {
            Model::Reuter(m) => Ok(reuter_rates(m, s)),
            Model::TypeI(_) | Model::TypeII(_) => {
                let list = self.transitions(s)?;
                let mut out = [0.0; 6];
                for (slot, mv) in out.iter_mut().zip(Move::ALL) {
                    *slot = list.rate_of(mv);
                }
                Ok(out)
            }
            Model::AuxUrn(_) => Err(RateError::NoReuterForm("urn process")),
        }
    }
}

fn reuter_rates(m: &ReuterModel, s: State) -> [f64; 6] {
    let left_ok = s.x1 > 0;
    let down_ok = s.x2 > 0;
    [
        (m.a)(s),
        (m.b)(s),
        if left_ok { (m.c)(s) } else { 0.0 },
        if down_ok { (m.d)(s) } else { 0.0 },
        if left_ok { (m.e)(s) } else { 0.0 },
        if down_ok { (m.f)(s) } else { 0.0 },
    ]
}

/// Exact positive-rate transition list; zero total rate is an error.
pub fn enumerate_transitions(model: &Model, s: State) -> Result<TransitionList, RateError> {
    let list = model.transitions(s)?;
    if list.is_empty() {
        return Err(RateError::Absorbing(s));
    }
    Ok(list)
}

/// Rate-weighted mean displacement `Σ rate · Δx`.
pub fn mean_drift(model: &Model, s: State) -> Result<[f64; 2], RateError> {
    let list = model.transitions(s)?;
    let mut drift = [0.0; 2];
    for t in list.iter() {
        let (dx, dy) = t.mv.delta();
        drift[0] += t.rate * dx as f64;
        drift[1] += t.rate * dy as f64;
    }
    Ok(drift)
}

/// A failed model hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub parameter: String,
    pub hypothesis: String,
}

impl Violation {
    fn new(parameter: impl Into<String>, hypothesis: impl Into<String>) -> Self {
        Violation {
            parameter: parameter.into(),
            hypothesis: hypothesis.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.parameter, self.hypothesis)
    }
}

/// Window on which callback rates of a [`ReuterModel`] are spot-checked.
const REUTER_CHECK_WINDOW: u64 = 32;

/// Returns every violated hypothesis; empty means the model is valid.
pub fn validate(model: &Model) -> Vec<Violation> {
    let mut out = Vec::new();
    let positive = |v: f64, name: &str, msg: &str, out: &mut Vec<Violation>| {
        if !(v.is_finite() && v > 0.0) {
            out.push(Violation::new(name, msg));
        }
    };
    let nonneg = |v: f64, name: &str, msg: &str, out: &mut Vec<Violation>| {
        if !(v.is_finite() && v >= 0.0) {
            out.push(Violation::new(name, msg));
        }
    };
    match model {
        Model::TypeI(m) => {
            positive(m.lambda1, "lambda1", "λ₁>0 required", &mut out);
            positive(m.lambda2, "lambda2", "λ₂>0 required", &mut out);
            positive(m.alpha1, "alpha1", "α₁>0 required", &mut out);
            positive(m.alpha2, "alpha2", "α₂>0 required", &mut out);
            m.g1.violations("g1", &mut out);
            m.g2.violations("g2", &mut out);
        }
        Model::TypeII(m) => {
            if m.strict {
                positive(m.lambda1, "lambda1", "λ₁>0 required", &mut out);
                positive(m.lambda2, "lambda2", "λ₂>0 required", &mut out);
            } else {
                nonneg(m.lambda1, "lambda1", "λ₁≥0 required", &mut out);
                nonneg(m.lambda2, "lambda2", "λ₂≥0 required", &mut out);
            }
            nonneg(m.alpha1, "alpha1", "α₁≥0 required", &mut out);
            nonneg(m.alpha2, "alpha2", "α₂≥0 required", &mut out);
            positive(m.beta1, "beta1", "β₁>0 required", &mut out);
            positive(m.beta2, "beta2", "β₂>0 required", &mut out);
        }
        Model::Reuter(m) => {
            'scan: for x1 in 0..=REUTER_CHECK_WINDOW {
                for x2 in 0..=REUTER_CHECK_WINDOW {
                    let s = State::xy(x1, x2);
                    for (name, v) in ["a", "b", "c", "d", "e", "f"]
                        .iter()
                        .zip(reuter_rates(m, s))
                    {
                        if !(v.is_finite() && v >= 0.0) {
                            out.push(Violation::new(
                                *name,
                                format!("rate must be finite and nonnegative (at {s})"),
                            ));
                            break 'scan;
                        }
                    }
                }
            }
        }
        Model::AuxUrn(m) => {
            nonneg(m.alpha, "alpha", "α≥0 required", &mut out);
            nonneg(m.beta, "beta", "β≥0 required", &mut out);
            let total = m.alpha + m.beta;
            if total.is_nan() || total <= 0.0 {
                out.push(Violation::new("alpha+beta", "α+β>0 required"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn type_ii_hand_enumeration() {
        let m: Model = TypeIIModel::new([1.0, 1.0], [0.0, 0.0], [1.0, 1.0]).into();
        let list = enumerate_transitions(&m, State::xy(3, 2)).unwrap();
        let got: Vec<_> = list.iter().map(|t| (t.target, t.rate)).collect();
        assert_eq!(
            got,
            vec![
                (State::xy(4, 2), 1.0),
                (State::xy(3, 3), 1.0),
                (State::xy(2, 2), 2.0),
                (State::xy(3, 1), 3.0),
            ]
        );
        assert_eq!(list.total(), 7.0);
    }

    #[test]
    fn type_i_death_omitted_on_axis() {
        let m: Model = TypeIModel::lotka_volterra().into();
        let list = enumerate_transitions(&m, State::xy(5, 0)).unwrap();
        let got: Vec<_> = list.iter().map(|t| (t.target, t.rate)).collect();
        assert_eq!(got, vec![(State::xy(6, 0), 6.0), (State::xy(5, 1), 1.0)]);
    }

    #[test]
    fn urn_probabilities() {
        let m: Model = AuxUrnModel::new(5.0, 1.0).into();
        let list = enumerate_transitions(&m, State::xy(2, 1)).unwrap();
        assert!(close(list.rate_of(Move::Right), 11.0 / 18.0));
        assert!(close(list.rate_of(Move::Up), 7.0 / 18.0));
        assert!(close(list.total(), 1.0));
        assert_eq!(m.transitions(State::ORIGIN), Err(RateError::EmptyUrn));
    }

    #[test]
    fn absorbing_origin() {
        let mut m = TypeIIModel::new([0.0, 0.0], [0.0, 0.0], [1.0, 1.0]);
        m.strict = false;
        let m: Model = m.into();
        assert!(validate(&m).is_empty());
        assert_eq!(
            enumerate_transitions(&m, State::ORIGIN),
            Err(RateError::Absorbing(State::ORIGIN))
        );
        assert_eq!(mean_drift(&m, State::ORIGIN).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn drift_examples() {
        let lv: Model = TypeIModel::lotka_volterra().into();
        assert_eq!(mean_drift(&lv, State::xy(10, 10)).unwrap(), [-89.0, -89.0]);
        let m: Model = TypeIIModel::new([1.0, 1.0], [2.0, 2.0], [1.0, 1.0]).into();
        assert_eq!(mean_drift(&m, State::xy(4, 4)).unwrap(), [5.0, 5.0]);
    }

    #[test]
    fn validation_messages() {
        let m: Model = TypeIIModel::new([0.0, 1.0], [1.0, 1.0], [1.0, 1.0]).into();
        let v = validate(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].hypothesis, "λ₁>0 required");

        let mut lv = TypeIModel::lotka_volterra();
        lv.g1.index = 0.0;
        let v = validate(&lv.into());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].hypothesis, "index must be positive");

        let okc: Model = TypeIIModel::ok_corral([1.0, 1.0], [1.0, 1.0]).into();
        assert!(validate(&okc).is_empty());

        let mut lax = TypeIIModel::new([0.0, 1.0], [1.0, 1.0], [1.0, 1.0]);
        lax.strict = false;
        assert!(validate(&lax.into()).is_empty());

        let bad_urn: Model = AuxUrnModel::new(0.0, 0.0).into();
        assert_eq!(validate(&bad_urn).len(), 1);
    }

    #[test]
    fn reuter_inactive_moves() {
        let m: Model = ReuterModel::immigration_death(1.0, 2.0, 3.0, 4.0, 5.0).into();
        let list = enumerate_transitions(&m, State::xy(0, 2)).unwrap();
        // left and left-up are inactive at x₁ = 0
        assert_eq!(list.rate_of(Move::Left), 0.0);
        assert_eq!(list.rate_of(Move::LeftUp), 0.0);
        assert_eq!(list.rate_of(Move::Down), 8.0);
        let list = enumerate_transitions(&m, State::xy(2, 3)).unwrap();
        assert_eq!(list.rate_of(Move::LeftUp), 30.0);
        assert_eq!(list.entries()[4].target, State::xy(1, 4));
        assert!(validate(&m).is_empty());
    }

    #[test]
    fn overflow_is_an_error() {
        let m: Model = TypeIIModel::symmetric(1.0, 1.0, 1.0).into();
        let s = State::xy(MAX_COORD, 1);
        assert!(matches!(
            m.transitions(s),
            Err(RateError::CoordinateOverflow(_))
        ));
        assert!(State::new(MAX_COORD + 1, 0).is_none());
    }

    #[test]
    fn interaction_function_shape() {
        let g = InteractionFunction::new(2.0, 1.5, 1.0);
        assert_eq!(g.eval(0.0), 0.0);
        assert!(g.eval(1e-3) > 0.0);
        let mut prev = 0.0;
        for z in 1..200 {
            let v = g.eval(z as f64);
            assert!(v > prev);
            prev = v;
        }
        // regular variation: g(2z)/g(z) → 2^index
        let z = 1e12;
        let ratio = g.eval(2.0 * z) / g.eval(z);
        assert!((ratio / 2f64.powf(1.5) - 1.0).abs() < 0.03);
        let neg = InteractionFunction::new(1.0, 1.0, -2.0);
        assert_eq!(neg.eval(0.0), 0.0);
    }

    #[test]
    fn select_follows_order() {
        let m: Model = TypeIIModel::symmetric(1.0, 1.0, 1.0).into();
        let list = enumerate_transitions(&m, State::xy(1, 1)).unwrap();
        assert_eq!(list.total(), 6.0);
        assert_eq!(list.select(0.0).mv, Move::Right);
        assert_eq!(list.select(2.0 / 6.0).mv, Move::Up);
        assert_eq!(list.select(4.0 / 6.0 - 1e-12).mv, Move::Up);
        assert_eq!(list.select(4.5 / 6.0).mv, Move::Left);
        assert_eq!(list.select(0.999_999).mv, Move::Down);
    }
}
