//! Virtual-qubit amplification and coupling transforms.
//!
//! Amplifying an n-level cycle adds `n - 2` levels, each one `E_v` above a
//! middle level of the base, and copies the base couplings onto the new
//! transitions. The machine then holds `n - 1` disjoint virtual qubits at the
//! same temperature whose norms add up to one.

use std::collections::VecDeque;

use crate::cycle::{validate, CycleSpec, SteadyState};
use crate::design::{DesignParams, Mode};
use crate::error::{Error, Result};
use crate::vqubit::{Bias, VirtualQubit};

/// A bath coupling between two levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub lower: usize,
    pub upper: usize,
    pub beta: f64,
}

/// An amplified machine of `n' = 2(n - 1)` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCycleSpec {
    base: CycleSpec,
    energies: Vec<f64>,
    links: Vec<Link>,
}

impl MultiCycleSpec {
    pub fn base(&self) -> &CycleSpec {
        &self.base
    }

    pub fn n_prime(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Level pairs `(lower, upper)` of the parallel virtual qubits.
    pub fn parallel_vqs(&self) -> Vec<(usize, usize)> {
        let n = self.base.n();
        (0..n - 1).map(|j| (j, j + n - 1)).collect()
    }

    pub fn steady_state(&self) -> Result<SteadyState> {
        graph_steady(self.n_prime(), &self.energies, &self.links)
    }

    /// The parallel virtual qubits, in order.
    pub fn virtual_qubits(&self) -> Result<Vec<VirtualQubit>> {
        let state = self.steady_state()?;
        self.parallel_vqs()
            .into_iter()
            .map(|(lo, hi)| {
                let gap = self.energies[hi] - self.energies[lo];
                let norm = (state.populations[lo] + state.populations[hi]).min(1.0);
                VirtualQubit::new(gap, norm, Bias::from_log_ratio(state.log_ratio(lo, hi))?)
            })
            .collect()
    }

    /// All parallel virtual qubits merged into one; its norm is one.
    pub fn effective_qubit(&self) -> Result<VirtualQubit> {
        let state = self.steady_state()?;
        let (mut lower, mut upper) = (0.0, 0.0);
        for (lo, hi) in self.parallel_vqs() {
            lower += state.populations[lo];
            upper += state.populations[hi];
        }
        let (lo, hi) = self.parallel_vqs()[0];
        let bias = Bias::from_log_ratio(state.log_ratio(lo, hi))?;
        VirtualQubit::new(self.base.virtual_gap(), (lower + upper).min(1.0), bias)
    }
}

/// Adds `n - 2` levels to a valid cycle so that its virtual qubit covers every level.
pub fn amplify(base: &CycleSpec) -> Result<MultiCycleSpec> {
    let violations = validate(base, None);
    if !violations.is_empty() {
        return Err(Error::InvalidCycle(violations));
    }
    let n = base.n();
    let e = base.energies();
    let e_v = base.virtual_gap();
    let beta = base.couplings();

    let mut energies = e.to_vec();
    energies.extend((1..n - 1).map(|j| e[j] + e_v));
    let links = (0..2 * n - 3)
        .map(|i| Link {
            lower: i,
            upper: i + 1,
            beta: beta[i % (n - 1)],
        })
        .collect();
    Ok(MultiCycleSpec {
        base: base.clone(),
        energies,
        links,
    })
}

/// Detailed-balance steady state on a connected coupling graph.
///
/// Log-populations are propagated breadth-first from level 0; a link that
/// closes a loop must agree with the value already assigned.
pub(crate) fn graph_steady(levels: usize, energies: &[f64], links: &[Link]) -> Result<SteadyState> {
    let mut adjacent = vec![Vec::new(); levels];
    for (i, l) in links.iter().enumerate() {
        if l.lower >= levels || l.upper >= levels || l.lower == l.upper {
            return Err(Error::Graph(format!("link {i} joins invalid levels {} and {}", l.lower, l.upper)));
        }
        adjacent[l.lower].push(i);
        adjacent[l.upper].push(i);
    }
    let mut log_w: Vec<Option<f64>> = vec![None; levels];
    log_w[0] = Some(0.0);
    let mut queue = VecDeque::from([0]);
    while let Some(at) = queue.pop_front() {
        let here = log_w[at].unwrap();
        for &i in &adjacent[at] {
            let l = links[i];
            let other = if l.lower == at { l.upper } else { l.lower };
            let value = here - l.beta * (energies[other] - energies[at]);
            match log_w[other] {
                None => {
                    log_w[other] = Some(value);
                    queue.push_back(other);
                }
                Some(v) if (v - value).abs() > 1e-9 * v.abs().max(1.0) => {
                    return Err(Error::Graph(format!("detailed balance fails around link {i}")));
                }
                Some(_) => {}
            }
        }
    }
    let log_w: Option<Vec<f64>> = log_w.into_iter().collect();
    log_w
        .map(SteadyState::from_log_weights)
        .ok_or(Error::Reducible)
}

/// Closed-form virtual temperature of the multi-cycle machine built from an
/// optimal base with `n' = 2(n - 1)` levels.
///
/// Exact for even bases; for other even `n'` it is the same affine law.
pub fn multi_beta(n_prime: usize, params: &DesignParams) -> Result<f64> {
    if n_prime % 2 != 0 || n_prime < 4 {
        return Err(Error::InvalidParams(format!("n' must be even and at least 4, got {n_prime}")));
    }
    let spread = params.beta_c - params.beta_h;
    let climb = (n_prime as f64 / 4.0 - 0.5) * params.e_max / params.e_v;
    Ok(match params.mode {
        Mode::Fridge => params.beta_c + spread * climb,
        Mode::Engine => params.beta_h - spread * climb,
    })
}

/// Couplings of a virtual qubit to a real qubit of gap `gap_out`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingTransform {
    /// Resonant swap: same gap, same temperature.
    Preserve,
    /// `beta' E' = beta E + beta_bath (E' - E)`.
    Shift { beta_bath: f64, gap_out: f64 },
    /// `beta' E' = -beta E + beta_bath (E + E')`.
    Flip { beta_bath: f64, gap_out: f64 },
}

/// Real qubit (norm one) produced from a virtual qubit by a transform.
pub fn transform_coupling(vq: &VirtualQubit, t: CouplingTransform) -> Result<VirtualQubit> {
    let lr = vq.bias.log_ratio();
    let (gap, lr_out) = match t {
        CouplingTransform::Preserve => (vq.gap, lr),
        CouplingTransform::Shift { beta_bath, gap_out } => {
            check_transform(beta_bath, gap_out)?;
            (gap_out, lr + beta_bath * (gap_out - vq.gap))
        }
        CouplingTransform::Flip { beta_bath, gap_out } => {
            check_transform(beta_bath, gap_out)?;
            (gap_out, -lr + beta_bath * (vq.gap + gap_out))
        }
    };
    VirtualQubit::new(gap, 1.0, Bias::from_log_ratio(lr_out)?)
}

fn check_transform(beta_bath: f64, gap_out: f64) -> Result<()> {
    if !beta_bath.is_finite() {
        return Err(Error::NonFinite("beta_bath"));
    }
    if !(gap_out > 0.0 && gap_out.is_finite()) {
        return Err(Error::NonPositiveGap(gap_out));
    }
    Ok(())
}
