//! Chains of concatenated qutrit machines.
//!
//! Qutrit `i` has energies `(0, a, E_max)` with its `Γ_13` transition on a
//! bath, alternating between the cold and hot bath along the chain (hot and
//! cold for an engine). Its two sub-transitions play the roles of output,
//! towards qutrit `i - 1`, and input, fed by qutrit `i + 1` through a
//! degenerate swap-like link. The last qutrit's input sits on the bath that
//! its `Γ_13` does not use. The first qutrit's output is the virtual qubit.
//!
//! Writing `x` for `ln(p_lower / p_upper)` of a transition and
//! `L_i = beta_i E_max`, each qutrit satisfies `x_out + x_in = L_i`, so the
//! chain is solved by backward induction from the last qutrit.

use std::fmt;
use std::str::FromStr;

use crate::design::Mode;
use crate::error::{Error, Result};
use crate::numeric::normalize_log;

/// Which transition of the first qutrit carries the virtual qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Placement {
    /// `Γ_12`, energies `(0, E_v, E_max)`.
    Lower,
    /// `Γ_23`, energies `(0, E_max - E_v, E_max)`.
    Upper,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::Lower => "lower",
            Placement::Upper => "upper",
        })
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Placement::Lower),
            "upper" => Ok(Placement::Upper),
            other => Err(Error::InvalidParams(format!("unknown placement `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcatSpec {
    pub k: usize,
    pub e_v: f64,
    pub e_max: f64,
    pub beta_c: f64,
    pub beta_h: f64,
    pub mode: Mode,
    pub placement: Placement,
}

impl ConcatSpec {
    pub fn new(k: usize, e_v: f64, e_max: f64, beta_c: f64, beta_h: f64, mode: Mode, placement: Placement) -> Result<Self> {
        let s = Self {
            k,
            e_v,
            e_max,
            beta_c,
            beta_h,
            mode,
            placement,
        };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        for (name, v) in [("E_v", self.e_v), ("E_max", self.e_max), ("beta_c", self.beta_c), ("beta_h", self.beta_h)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if !(self.e_v > 0.0 && self.e_v <= self.e_max) {
            return Err(Error::InvalidParams(format!("need 0 < E_v <= E_max, got {} and {}", self.e_v, self.e_max)));
        }
        if !(self.beta_h > 0.0 && self.beta_h < self.beta_c) {
            return Err(Error::InvalidParams(format!(
                "need 0 < beta_h < beta_c, got beta_h = {}, beta_c = {}",
                self.beta_h, self.beta_c
            )));
        }
        Ok(())
    }

    pub fn with_k(&self, k: usize) -> Self {
        Self { k, ..*self }
    }

    /// Middle energy of every qutrit.
    pub fn middle(&self) -> f64 {
        match self.placement {
            Placement::Lower => self.e_v,
            Placement::Upper => self.e_max - self.e_v,
        }
    }

    /// Bath on `Γ_13` of qutrit `i` (1-based).
    pub fn bath(&self, i: usize) -> f64 {
        let (first, second) = match self.mode {
            Mode::Fridge => (self.beta_c, self.beta_h),
            Mode::Engine => (self.beta_h, self.beta_c),
        };
        if i % 2 == 1 {
            first
        } else {
            second
        }
    }

    /// Whether qutrit `i`'s output is its `Γ_12` transition.
    pub fn output_is_lower(&self, i: usize) -> bool {
        (i % 2 == 1) == (self.placement == Placement::Lower)
    }

    fn input_gap(&self, i: usize) -> f64 {
        let a = self.middle();
        if self.output_is_lower(i) {
            self.e_max - a
        } else {
            a
        }
    }
}

/// Product state of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritChainState {
    /// Populations of `|1>, |2>, |3>` for each qutrit, first to last.
    pub triples: Vec<[f64; 3]>,
    /// `ln(p_lower / p_upper)` across each qutrit's output transition.
    pub output_log_ratios: Vec<f64>,
}

impl QutritChainState {
    pub fn virtual_log_ratio(&self) -> f64 {
        self.output_log_ratios[0]
    }
}

/// Closed-form inverse virtual temperature of a k-qutrit chain.
pub fn concat_beta(spec: &ConcatSpec) -> Result<f64> {
    spec.check()?;
    let k = spec.k as f64;
    let r = spec.e_max / spec.e_v;
    let climb = if spec.k % 2 == 0 { k / 2.0 * r } else { (k + 1.0) / 2.0 * r - 1.0 };
    let spread = spec.beta_c - spec.beta_h;
    Ok(match spec.mode {
        Mode::Fridge => spec.beta_c + spread * climb,
        Mode::Engine => spec.beta_h - spread * climb,
    })
}

/// Steady state of the chain by backward induction from the last qutrit.
pub fn concat_steady(spec: &ConcatSpec) -> Result<QutritChainState> {
    spec.check()?;
    let k = spec.k;
    let mut x_in = spec.bath(k + 1) * spec.input_gap(k);
    let mut triples = vec![[0.0; 3]; k];
    let mut outputs = vec![0.0; k];
    for i in (1..=k).rev() {
        let l = spec.bath(i) * spec.e_max;
        let x_out = l - x_in;
        let x12 = if spec.output_is_lower(i) { x_out } else { x_in };
        let p = normalize_log(&[0.0, -x12, -l]);
        triples[i - 1] = [p[0], p[1], p[2]];
        outputs[i - 1] = x_out;
        x_in = x_out;
    }
    Ok(QutritChainState {
        triples,
        output_log_ratios: outputs,
    })
}

/// Norm of the first qutrit's virtual qubit, in closed form.
pub fn concat_norm(spec: &ConcatSpec) -> Result<f64> {
    let x = concat_beta(spec)? * spec.e_v;
    let l = spec.bath(1) * spec.e_max;
    // N = 1 / (1 + c / (1 + e^{-x})) with the third level's weight c
    let rest = match spec.placement {
        Placement::Upper => l.exp() / (x.exp() + 1.0),
        Placement::Lower => (-l).exp() / (1.0 + (-x).exp()),
    };
    Ok(1.0 / (1.0 + rest))
}

/// Hilbert-space dimension of a chain and its virtual temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDimension {
    /// `3^k`, absent when it overflows `u64`.
    pub n: Option<u64>,
    pub log3_n: f64,
    pub beta_v: f64,
}

/// `n = 3^k` and `beta_v = beta_c + (beta_c - beta_h) (log_3 n / 2) E_max / E_v` for even `k`.
pub fn concat_log_dimension(spec: &ConcatSpec) -> Result<LogDimension> {
    spec.check()?;
    if spec.k % 2 != 0 {
        return Err(Error::InvalidParams(format!("k must be even, got {}", spec.k)));
    }
    let log3_n = spec.k as f64;
    let climb = (spec.beta_c - spec.beta_h) * log3_n / 2.0 * spec.e_max / spec.e_v;
    Ok(LogDimension {
        n: u32::try_from(spec.k).ok().and_then(|k| 3u64.checked_pow(k)),
        log3_n,
        beta_v: match spec.mode {
            Mode::Fridge => spec.beta_c + climb,
            Mode::Engine => spec.beta_h - climb,
        },
    })
}
