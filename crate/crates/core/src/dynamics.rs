//! Pauli master equation for a cycle driving an external qubit.
//!
//! Joint states are indexed `2 j + s` for machine level `j` and system level
//! `s`. Each machine transition relaxes towards its bath's Gibbs ratio on the
//! timescale `tau_beta`, the system relaxes towards its environment on
//! `tau_s`, and the resonant exchange `|1>|1_s> <-> |n>|0_s>` runs at rate
//! `1 / tau_swap`. An infinite timescale switches that process off.

use std::collections::VecDeque;

use log::debug;
use nalgebra::{DMatrix, DVector};

use crate::cycle::{validate, CycleSpec};
use crate::design::{optimal_cycle, DesignParams, Mode};
use crate::error::{Error, Result};
use crate::numeric::close;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsConfig {
    pub tau_beta: f64,
    pub tau_s: f64,
    pub tau_swap: f64,
    pub beta_env: f64,
    pub e_s: f64,
}

impl DynamicsConfig {
    /// Unit thermal and swap timescales.
    pub fn new(e_s: f64, beta_env: f64, tau_s: f64) -> Self {
        Self {
            tau_beta: 1.0,
            tau_s,
            tau_swap: 1.0,
            beta_env,
            e_s,
        }
    }

    /// Defaults for a design: `E_s = E_v` and the system sits in the cold bath.
    pub fn for_design(params: &DesignParams, tau_s: f64) -> Self {
        Self::new(params.e_v, params.beta_c, tau_s)
    }

    pub fn check(&self) -> Result<()> {
        for (name, tau) in [("tau_beta", self.tau_beta), ("tau_s", self.tau_s), ("tau_swap", self.tau_swap)] {
            if tau.is_nan() || tau <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {tau}")));
            }
        }
        if !self.beta_env.is_finite() {
            return Err(Error::NonFinite("beta_env"));
        }
        if !(self.e_s.is_finite() && self.e_s > 0.0) {
            return Err(Error::NonPositiveGap(self.e_s));
        }
        Ok(())
    }

    pub fn max_tau(&self) -> f64 {
        self.tau_beta.max(self.tau_s).max(self.tau_swap)
    }
}

/// Generator `Q` of a continuous-time Markov chain, `dp/dt = Q p`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    q: DMatrix<f64>,
}

impl RateMatrix {
    pub fn new(dim: usize) -> Self {
        Self {
            q: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// Adds a jump `from -> to` with the given rate.
    pub fn add_rate(&mut self, from: usize, to: usize, rate: f64) {
        if rate == 0.0 || from == to {
            return;
        }
        self.q[(to, from)] += rate;
        self.q[(from, from)] -= rate;
    }

    /// Thermal link `lower <-> upper` with energy difference `gap = E_upper - E_lower`.
    /// Up and down rates sum to `1 / tau` and obey detailed balance at `beta`.
    pub fn add_thermal(&mut self, lower: usize, upper: usize, gap: f64, beta: f64, tau: f64) {
        let x = beta * gap;
        self.add_rate(lower, upper, 1.0 / (tau * (1.0 + x.exp())));
        self.add_rate(upper, lower, 1.0 / (tau * (1.0 + (-x).exp())));
    }

    /// Rate of the jump `from -> to`.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.q[(to, from)]
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Largest magnitude of a column sum.
    pub fn conservation_error(&self) -> f64 {
        self.q.column_iter().map(|c| c.sum().abs()).fold(0.0, f64::max)
    }

    fn connected(&self) -> bool {
        let dim = self.dim();
        let mut seen = vec![false; dim];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(at) = queue.pop_front() {
            for other in 0..dim {
                if !seen[other] && (self.q[(other, at)] > 0.0 || self.q[(at, other)] > 0.0) {
                    seen[other] = true;
                    queue.push_back(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Unique stationary distribution, from a dense solve with the last
    /// balance row replaced by normalization.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let dim = self.dim();
        if dim == 0 {
            return Err(Error::Solver("empty generator".into()));
        }
        if !self.connected() {
            return Err(Error::Reducible);
        }
        let mut a = self.q.clone();
        a.row_mut(dim - 1).fill(1.0);
        let mut b = DVector::zeros(dim);
        b[dim - 1] = 1.0;
        let p = a.lu().solve(&b).ok_or(Error::Reducible)?;
        let residual = (&self.q * &p).amax();
        if !(residual <= 1e-10) {
            return Err(Error::Solver(format!("balance residual {residual:e}")));
        }
        let worst = p.min();
        if worst < -1e-12 {
            return Err(Error::Solver(format!("negative population {worst:e}")));
        }
        let mut p: Vec<f64> = p.iter().map(|&x| x.max(0.0)).collect();
        if worst < 0.0 {
            debug!("clamped populations by up to {:e}", -worst);
            let total: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= total);
        }
        Ok(p)
    }

    /// `exp(Q t) p`, by scaling and squaring a Taylor expansion.
    pub fn propagate(&self, p: &[f64], t: f64) -> Vec<f64> {
        let dim = self.dim();
        let norm = self
            .q
            .column_iter()
            .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
            * t;
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let a = &self.q * (t / 2f64.powi(squarings));
        let mut exp = DMatrix::identity(dim, dim);
        let mut term = DMatrix::identity(dim, dim);
        for k in 1..=30 {
            term = &term * &a / k as f64;
            exp += &term;
            if term.amax() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            exp = &exp * &exp;
        }
        (exp * DVector::from_column_slice(p)).iter().copied().collect()
    }
}

/// Populations of the machine/system pair, indexed `2 j + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub populations: Vec<f64>,
}

impl JointState {
    pub fn levels(&self) -> usize {
        self.populations.len() / 2
    }

    pub fn machine_marginal(&self) -> Vec<f64> {
        self.populations.chunks(2).map(|c| c[0] + c[1]).collect()
    }

    /// `[p_0, p_1]` of the system qubit.
    pub fn system_marginal(&self) -> [f64; 2] {
        self.populations
            .chunks(2)
            .fold([0.0, 0.0], |acc, c| [acc[0] + c[0], acc[1] + c[1]])
    }

    /// Inverse temperature of the loaded virtual qubit (first and last level).
    pub fn machine_beta(&self, e_v: f64) -> Result<f64> {
        let m = self.machine_marginal();
        let (lo, hi) = (m[0], m[m.len() - 1]);
        if lo <= 0.0 || hi <= 0.0 {
            return Err(Error::ZeroMarginal);
        }
        Ok((lo / hi).ln() / e_v)
    }
}

/// Generator of the joint machine/system process.
pub fn build_rates(spec: &CycleSpec, config: &DynamicsConfig) -> Result<RateMatrix> {
    let violations = validate(spec, None);
    if !violations.is_empty() {
        return Err(Error::InvalidCycle(violations));
    }
    config.check()?;
    let e_v = spec.virtual_gap();
    if !close(config.e_s, e_v, 1e-12) {
        return Err(Error::GapMismatch {
            system: config.e_s,
            virtual_gap: e_v,
        });
    }
    let n = spec.n();
    let mut rates = RateMatrix::new(2 * n);
    for (j, (gap, &beta)) in spec.gaps().iter().zip(spec.couplings()).enumerate() {
        for s in 0..2 {
            rates.add_thermal(2 * j + s, 2 * (j + 1) + s, *gap, beta, config.tau_beta);
        }
    }
    let z_env = (config.beta_env * config.e_s / 2.0).tanh();
    for j in 0..n {
        rates.add_rate(2 * j, 2 * j + 1, (1.0 - z_env) / (2.0 * config.tau_s));
        rates.add_rate(2 * j + 1, 2 * j, (1.0 + z_env) / (2.0 * config.tau_s));
    }
    let (a, b) = (1, 2 * (n - 1));
    rates.add_rate(a, b, 1.0 / config.tau_swap);
    rates.add_rate(b, a, 1.0 / config.tau_swap);
    Ok(rates)
}

/// Joint steady state of a machine/system generator.
pub fn steady(rates: &RateMatrix) -> Result<JointState> {
    if rates.dim() % 2 != 0 {
        return Err(Error::Solver(format!("odd joint dimension {}", rates.dim())));
    }
    Ok(JointState {
        populations: rates.stationary()?,
    })
}

/// `beta_s = ln(p_0 / p_1) / E_s` from the system marginal.
pub fn system_beta(state: &JointState, e_s: f64) -> Result<f64> {
    let [p0, p1] = state.system_marginal();
    if p0 <= 0.0 || p1 <= 0.0 {
        return Err(Error::ZeroMarginal);
    }
    Ok((p0 / p1).ln() / e_s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsRow {
    pub n: usize,
    pub tau_s: f64,
    pub beta_s: f64,
    /// Inverse temperature of the loaded virtual qubit.
    pub beta_vq: f64,
}

fn solve_point(params: &DesignParams, n: usize, config: &DynamicsConfig) -> Result<DynamicsRow> {
    let spec = optimal_cycle(&params.with_n(n))?;
    let state = steady(&build_rates(&spec, config)?)?;
    Ok(DynamicsRow {
        n,
        tau_s: config.tau_s,
        beta_s: system_beta(&state, config.e_s)?,
        beta_vq: state.machine_beta(spec.virtual_gap())?,
    })
}

/// `beta_s` of the optimal n-cycle for every `n` and configuration,
/// ordered by configuration, then by `n`.
pub fn scan_cycle_length(params: &DesignParams, ns: &[usize], configs: &[DynamicsConfig]) -> Result<Vec<DynamicsRow>> {
    let mut rows = Vec::with_capacity(ns.len() * configs.len());
    for config in configs {
        for &n in ns {
            let row = solve_point(params, n, config).map_err(|e| match e {
                Error::Solver(m) => Error::Solver(format!("n = {n}, tau_s = {}: {m}", config.tau_s)),
                other => other,
            })?;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Cycle length in `3..=n_max` that pushes the system furthest from the
/// environment: largest `beta_s` for fridges, smallest for engines.
/// Ties go to the shorter cycle.
pub fn optimal_length(config: &DynamicsConfig, params: &DesignParams, n_max: usize) -> Result<usize> {
    if n_max < 4 {
        return Err(Error::InvalidParams(format!("n_max must be at least 4, got {n_max}")));
    }
    let sign = match params.mode {
        Mode::Fridge => 1.0,
        Mode::Engine => -1.0,
    };
    let mut best = (3, f64::NEG_INFINITY);
    for n in 3..=n_max {
        let value = sign * solve_point(params, n, config)?.beta_s;
        if value > best.1 {
            best = (n, value);
        }
    }
    Ok(best.0)
}
