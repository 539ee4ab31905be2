//! Single n-level thermal cycles.
//!
//! Levels are stored in cycle order: transition `j` connects level `j` to
//! level `j + 1` and is thermalized by one bath. The virtual qubit is always
//! the transition between the first and the last level, with the first level
//! as its lower state. Energies need not be sorted.

use std::fmt;

use crate::design::{DesignParams, Mode};
use crate::error::{Error, Result};
use crate::numeric::normalize_log;
use crate::vqubit::{Bias, VirtualQubit};

const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSpec {
    energies: Vec<f64>,
    couplings: Vec<f64>,
}

impl CycleSpec {
    /// Levels in cycle order plus one bath inverse temperature per transition.
    ///
    /// Nothing is checked here; see [`validate`].
    pub fn new(energies: Vec<f64>, couplings: Vec<f64>) -> Self {
        Self {
            energies,
            couplings,
        }
    }

    /// Build from the first energy and successive gaps.
    pub fn from_gaps(first: f64, gaps: &[f64], couplings: Vec<f64>) -> Self {
        let mut energies = Vec::with_capacity(gaps.len() + 1);
        energies.push(first);
        for g in gaps {
            let last = *energies.last().unwrap();
            energies.push(last + g);
        }
        Self::new(energies, couplings)
    }

    pub fn n(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.energies.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `E_n - E_1`, which telescopes to the sum of the gaps.
    pub fn virtual_gap(&self) -> f64 {
        match (self.energies.first(), self.energies.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// `sum_j beta_j * dE_j`, i.e. `ln(p_1 / p_n)` in the steady state.
    pub fn log_virtual_ratio(&self) -> f64 {
        self.gaps()
            .iter()
            .zip(&self.couplings)
            .map(|(g, b)| b * g)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewLevels(usize),
    CouplingCount { expected: usize, got: usize },
    NonFinite { field: &'static str, index: usize },
    NegativeBeta { transition: usize, beta: f64 },
    GapBound { transition: usize, gap: f64, e_max: f64 },
    BathBound { transition: usize, beta: f64, beta_h: f64, beta_c: f64 },
    GapSum { expected: f64, actual: f64 },
    LevelCount { expected: usize, got: usize },
    NonPositiveVirtualGap(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewLevels(n) => write!(f, "a cycle needs at least 3 levels, got {n}"),
            Violation::CouplingCount { expected, got } => {
                write!(f, "expected {expected} couplings, got {got}")
            }
            Violation::NonFinite { field, index } => write!(f, "{field}[{index}] is not finite"),
            Violation::NegativeBeta { transition, beta } => {
                write!(f, "transition {transition}: negative bath inverse temperature {beta}")
            }
            Violation::GapBound { transition, gap, e_max } => {
                write!(f, "transition {transition}: |gap| = {} exceeds E_max = {e_max}", gap.abs())
            }
            Violation::BathBound { transition, beta, beta_h, beta_c } => write!(
                f,
                "transition {transition}: beta = {beta} outside [{beta_h}, {beta_c}]"
            ),
            Violation::GapSum { expected, actual } => {
                write!(f, "gaps sum to {actual}, virtual qubit gap is {expected}")
            }
            Violation::LevelCount { expected, got } => {
                write!(f, "design asks for {expected} levels, cycle has {got}")
            }
            Violation::NonPositiveVirtualGap(e) => {
                write!(f, "virtual qubit gap E_n - E_1 = {e} must be positive")
            }
        }
    }
}

fn structural_violations(spec: &CycleSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = spec.n();
    if n < 3 {
        out.push(Violation::TooFewLevels(n));
    }
    if spec.couplings.len() + 1 != n {
        out.push(Violation::CouplingCount {
            expected: n.saturating_sub(1),
            got: spec.couplings.len(),
        });
    }
    for (index, e) in spec.energies.iter().enumerate() {
        if !e.is_finite() {
            out.push(Violation::NonFinite { field: "energies", index });
        }
    }
    for (index, b) in spec.couplings.iter().enumerate() {
        if !b.is_finite() {
            out.push(Violation::NonFinite { field: "couplings", index });
        } else if *b < 0.0 {
            out.push(Violation::NegativeBeta { transition: index, beta: *b });
        }
    }
    out
}

/// All violated constraints of `spec`, optionally against design resources.
///
/// An empty list means the cycle is valid.
pub fn validate(spec: &CycleSpec, params: Option<&DesignParams>) -> Vec<Violation> {
    let mut out = structural_violations(spec);
    let e_v = spec.virtual_gap();
    if spec.n() >= 2 && e_v.is_finite() && e_v <= 0.0 {
        out.push(Violation::NonPositiveVirtualGap(e_v));
    }
    let Some(p) = params else {
        return out;
    };
    if p.n != spec.n() {
        out.push(Violation::LevelCount { expected: p.n, got: spec.n() });
    }
    for (transition, gap) in spec.gaps().into_iter().enumerate() {
        if gap.abs() > p.e_max * (1.0 + REL_TOL) {
            out.push(Violation::GapBound { transition, gap, e_max: p.e_max });
        }
    }
    for (transition, &beta) in spec.couplings.iter().enumerate() {
        let slack = REL_TOL * p.beta_c.abs().max(1.0);
        if beta < p.beta_h - slack || beta > p.beta_c + slack {
            out.push(Violation::BathBound {
                transition,
                beta,
                beta_h: p.beta_h,
                beta_c: p.beta_c,
            });
        }
    }
    let sum: f64 = spec.gaps().iter().sum();
    if (sum - p.e_v).abs() > REL_TOL * p.e_v.abs().max(p.e_max).max(1.0) * spec.n() as f64 {
        out.push(Violation::GapSum { expected: p.e_v, actual: sum });
    }
    out
}

fn ensure_structure(spec: &CycleSpec) -> Result<()> {
    let v = structural_violations(spec);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidCycle(v))
    }
}

/// Steady-state populations of a cycle, in cycle order.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub populations: Vec<f64>,
    log_weights: Vec<f64>,
}

impl SteadyState {
    pub(crate) fn from_log_weights(log_weights: Vec<f64>) -> Self {
        Self {
            populations: normalize_log(&log_weights),
            log_weights,
        }
    }

    /// `ln(p_a / p_b)`, exact even when the populations underflow.
    pub fn log_ratio(&self, a: usize, b: usize) -> f64 {
        self.log_weights[a] - self.log_weights[b]
    }
}

/// Steady state fixed by the Gibbs ratio on every transition,
/// `p_{j+1} / p_j = exp(-beta_j dE_j)`, and normalization.
pub fn steady_state(spec: &CycleSpec) -> Result<SteadyState> {
    ensure_structure(spec)?;
    let mut log_w = Vec::with_capacity(spec.n());
    log_w.push(0.0);
    for (gap, beta) in spec.gaps().iter().zip(&spec.couplings) {
        let last = *log_w.last().unwrap();
        log_w.push(last - beta * gap);
    }
    Ok(SteadyState::from_log_weights(log_w))
}

/// Inverse virtual temperature `sum_j beta_j dE_j / E_v`.
///
/// Returns the common bath temperature exactly when all couplings agree.
pub fn virtual_beta(spec: &CycleSpec) -> Result<f64> {
    ensure_structure(spec)?;
    let e_v = spec.virtual_gap();
    if e_v <= 0.0 {
        return Err(Error::VirtualGap(e_v));
    }
    let first = spec.couplings[0];
    if spec.couplings.iter().all(|&b| b == first) {
        return Ok(first);
    }
    Ok(spec.log_virtual_ratio() / e_v)
}

/// The virtual qubit on the transition between the first and last level.
pub fn virtual_qubit_of(spec: &CycleSpec) -> Result<VirtualQubit> {
    let beta_v = virtual_beta(spec)?;
    let e_v = spec.virtual_gap();
    let state = steady_state(spec)?;
    let n = spec.n();
    let norm = (state.populations[0] + state.populations[n - 1]).min(1.0);
    VirtualQubit::new(e_v, norm, Bias::from_log_ratio(beta_v * e_v)?)
}

/// Per-cycle energy bookkeeping of a two-bath machine.
///
/// Heats are counted as energy flowing into the machine during one traversal
/// of the cycle. For a fridge `heat_hot + heat_cold + work_or_cool = 0`; for an
/// engine `heat_hot + heat_cold - work_or_cool = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub mode: Mode,
    pub eta: f64,
    pub heat_hot: f64,
    pub heat_cold: f64,
    pub work_or_cool: f64,
    pub beta_v: f64,
}

impl EfficiencyReport {
    /// Efficiency from the heat accounting, `E_v / Q_h`.
    pub fn eta_from_heat(&self) -> f64 {
        self.work_or_cool / self.heat_hot
    }
}

/// Efficiency of a cycle whose transitions are each coupled to one of two baths.
///
/// The machine is a fridge when `beta_v > beta_c` and an engine when
/// `beta_v < beta_h`; in between it does no useful work.
pub fn efficiency(spec: &CycleSpec) -> Result<EfficiencyReport> {
    let beta_v = virtual_beta(spec)?;
    let e_v = spec.virtual_gap();
    let gaps = spec.gaps();
    let active: Vec<(f64, f64)> = gaps
        .iter()
        .zip(&spec.couplings)
        .filter(|(g, _)| **g != 0.0)
        .map(|(g, b)| (*g, *b))
        .collect();
    let beta_c = active.iter().map(|a| a.1).fold(f64::NEG_INFINITY, f64::max);
    let beta_h = active.iter().map(|a| a.1).fold(f64::INFINITY, f64::min);
    if !(beta_c > beta_h) {
        return Err(Error::Degenerate("a single bath cannot drive a machine".into()));
    }
    if active.iter().any(|&(_, b)| b != beta_c && b != beta_h) {
        return Err(Error::Degenerate(
            "efficiency needs every transition on the hot or the cold bath".into(),
        ));
    }
    let sum_on = |beta: f64| -> f64 { active.iter().filter(|a| a.1 == beta).map(|a| a.0).sum() };
    let (hot, cold) = (sum_on(beta_h), sum_on(beta_c));
    let spread = beta_c - beta_h;
    let tol = REL_TOL * beta_c.abs().max(1.0);
    if beta_v > beta_c + tol {
        Ok(EfficiencyReport {
            mode: Mode::Fridge,
            eta: spread / (beta_v - beta_c),
            heat_hot: -hot,
            heat_cold: -cold,
            work_or_cool: e_v,
            beta_v,
        })
    } else if beta_v < beta_h - tol {
        Ok(EfficiencyReport {
            mode: Mode::Engine,
            eta: spread / (beta_c - beta_v),
            heat_hot: hot,
            heat_cold: cold,
            work_or_cool: e_v,
            beta_v,
        })
    } else {
        Err(Error::Degenerate(format!(
            "virtual temperature {beta_v} lies within the bath range [{beta_h}, {beta_c}]"
        )))
    }
}
