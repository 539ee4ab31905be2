//! Optimal single-cycle machines under an energy-gap bound.
//!
//! With two baths `beta_h < beta_c` and every bath-coupled gap bounded by
//! `E_max`, the optimal n-level fridge climbs from the virtual qubit's ground
//! level in steps of `+E_max` on the cold bath, takes one step of `+E_v` (n
//! even) or `-(E_max - E_v)` (n odd), then descends in steps of `-E_max` on
//! the hot bath. The optimal engine has the same energies with the baths
//! exchanged.

use std::fmt;
use std::str::FromStr;

use crate::amplify::multi_beta;
use crate::cycle::CycleSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Fridge,
    Engine,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fridge => "fridge",
            Mode::Engine => "engine",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fridge" => Ok(Mode::Fridge),
            "engine" => Ok(Mode::Engine),
            other => Err(Error::InvalidParams(format!("unknown mode `{other}`"))),
        }
    }
}

/// Resources available to a machine design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    pub n: usize,
    pub e_v: f64,
    pub e_max: f64,
    pub beta_c: f64,
    pub beta_h: f64,
    pub mode: Mode,
}

impl DesignParams {
    pub fn new(n: usize, e_v: f64, e_max: f64, beta_c: f64, beta_h: f64, mode: Mode) -> Result<Self> {
        let p = Self {
            n,
            e_v,
            e_max,
            beta_c,
            beta_h,
            mode,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        for (name, v) in [
            ("E_v", self.e_v),
            ("E_max", self.e_max),
            ("beta_c", self.beta_c),
            ("beta_h", self.beta_h),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.e_v <= 0.0 {
            return bad(format!("E_v must be positive, got {}", self.e_v));
        }
        if self.e_v > self.e_max {
            return bad(format!("E_v = {} exceeds E_max = {}", self.e_v, self.e_max));
        }
        if !(self.beta_h > 0.0 && self.beta_h < self.beta_c) {
            return bad(format!(
                "need 0 < beta_h < beta_c, got beta_h = {}, beta_c = {}",
                self.beta_h, self.beta_c
            ));
        }
        Ok(())
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..*self }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..*self }
    }

    /// Bath coupled to a gap of the given sign in the optimal cycle.
    pub(crate) fn bath_for(&self, gap: f64) -> f64 {
        match (self.mode, gap > 0.0) {
            (Mode::Fridge, true) | (Mode::Engine, false) => self.beta_c,
            (Mode::Fridge, false) | (Mode::Engine, true) => self.beta_h,
        }
    }
}

/// Gaps of the optimal n-level cycle, in cycle order.
pub fn optimal_gaps(n: usize, e_v: f64, e_max: f64) -> Vec<f64> {
    let mut gaps = Vec::with_capacity(n - 1);
    if n % 2 == 0 {
        gaps.extend(std::iter::repeat(e_max).take(n / 2 - 1));
        gaps.push(e_v);
        gaps.extend(std::iter::repeat(-e_max).take(n / 2 - 1));
    } else {
        gaps.extend(std::iter::repeat(e_max).take((n - 1) / 2));
        gaps.push(-(e_max - e_v));
        gaps.extend(std::iter::repeat(-e_max).take((n - 3) / 2));
    }
    gaps
}

/// The optimal n-level cycle for the given resources.
pub fn optimal_cycle(params: &DesignParams) -> Result<CycleSpec> {
    params.check()?;
    let gaps = optimal_gaps(params.n, params.e_v, params.e_max);
    let couplings = gaps.iter().map(|&g| params.bath_for(g)).collect();
    Ok(CycleSpec::from_gaps(0.0, &gaps, couplings))
}

/// Closed-form inverse virtual temperature of the optimal cycle.
pub fn closed_beta_v(params: &DesignParams) -> f64 {
    let n = params.n as f64;
    let spread = params.beta_c - params.beta_h;
    let climb = if params.n % 2 == 0 {
        (n / 2.0 - 1.0) * params.e_max
    } else {
        (n / 2.0 - 0.5) * params.e_max - params.e_v
    };
    match params.mode {
        Mode::Fridge => params.beta_c + spread * climb / params.e_v,
        Mode::Engine => params.beta_h - spread * climb / params.e_v,
    }
}

/// `sum_{k < m} exp(-k beta E)` in closed form.
fn geometric(beta_e: f64, m: usize) -> f64 {
    (-(m as f64) * beta_e).exp_m1() / (-beta_e).exp_m1()
}

/// Closed-form norm of the optimal cycle's virtual qubit.
pub fn closed_norm(params: &DesignParams) -> f64 {
    let n = params.n;
    let x = closed_beta_v(params) * params.e_v;
    let (bc, bh) = (params.beta_c * params.e_max, params.beta_h * params.e_max);
    let (cold_terms, hot_terms) = match (params.mode, n % 2 == 0) {
        (_, true) => (n / 2, n / 2),
        (Mode::Fridge, false) => ((n + 1) / 2, (n - 1) / 2),
        (Mode::Engine, false) => ((n - 1) / 2, (n + 1) / 2),
    };
    let ratio = match params.mode {
        Mode::Fridge => (-x).exp(),
        Mode::Engine => x.exp(),
    };
    (1.0 + ratio) / (geometric(bc, cold_terms) + ratio * geometric(bh, hot_terms))
}

/// `(beta_v(n + 2) - beta_v(n)) E_v`, which equals `±(beta_c - beta_h) E_max`.
pub fn marginal_gain(params: &DesignParams) -> f64 {
    (closed_beta_v(&params.with_n(params.n + 2)) - closed_beta_v(params)) * params.e_v
}

/// Decomposition `dE = m E_max + delta` with `0 <= delta < E_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBreakdown {
    pub m: i64,
    pub delta: f64,
}

impl GapBreakdown {
    pub fn of(delta_e: f64, e_max: f64) -> Self {
        let m = (delta_e / e_max).floor();
        let delta = (delta_e - m * e_max).max(0.0);
        if delta >= e_max {
            return Self { m: m as i64 + 1, delta: 0.0 };
        }
        Self { m: m as i64, delta }
    }
}

/// Transitions from the first level to level `j` that maximize the heat
/// `Q_+` drawn through positive gaps for a fixed `dE_{1,j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatSplit {
    pub plus_max: usize,
    pub plus_delta: usize,
    pub minus_complement: usize,
    pub minus_max: usize,
    pub q_plus: f64,
    pub q_minus: f64,
}

/// Maximal positive heat between level 1 and level `j` (1-based) with
/// `dE_{1,j} = delta_e` and every gap bounded by `e_max`.
pub fn max_positive_heat(j: usize, delta_e: f64, e_max: f64) -> Result<HeatSplit> {
    if j < 2 {
        return Err(Error::InvalidParams("level index j must be at least 2".into()));
    }
    let steps = (j - 1) as f64;
    if delta_e.abs() > steps * e_max * (1.0 + 1e-12) {
        return Err(Error::InvalidParams(format!(
            "dE = {delta_e} unreachable in {} steps of at most {e_max}",
            j - 1
        )));
    }
    let GapBreakdown { m, delta } = GapBreakdown::of(delta_e, e_max);
    let ji = j as i64;
    let build = |m: i64, delta: f64| -> Option<HeatSplit> {
        let counts = if (ji + m) % 2 == 0 {
            [(ji + m) / 2 - 1, 1, 0, (ji - m) / 2 - 1]
        } else {
            [(ji + m - 1) / 2, 0, 1, (ji - m - 3) / 2]
        };
        if counts.iter().any(|&c| c < 0) {
            return None;
        }
        let [pm, pd, mc, mm] = counts.map(|c| c as usize);
        let q_plus = pm as f64 * e_max + pd as f64 * delta;
        let q_minus = -(mc as f64) * (e_max - delta) - mm as f64 * e_max;
        Some(HeatSplit {
            plus_max: pm,
            plus_delta: pd,
            minus_complement: mc,
            minus_max: mm,
            q_plus,
            q_minus,
        })
    };
    build(m, delta)
        .or_else(|| if delta == 0.0 { build(m - 1, e_max) } else { None })
        .ok_or_else(|| Error::InvalidParams(format!("no transition split for j = {j}, dE = {delta_e}")))
}

/// Discretization used by [`brute_force_best`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub step: f64,
    pub temperatures: Vec<f64>,
}

impl SearchGrid {
    pub fn new(step: f64, mut temperatures: Vec<f64>) -> Self {
        temperatures.sort_by(f64::total_cmp);
        temperatures.dedup();
        Self { step, temperatures }
    }

    /// Only the two extreme baths.
    pub fn extremes(step: f64, params: &DesignParams) -> Self {
        Self::new(step, vec![params.beta_h, params.beta_c])
    }

    /// Extremes plus `k` evenly spaced intermediate temperatures.
    pub fn with_intermediates(step: f64, params: &DesignParams, k: usize) -> Self {
        let t = (0..k + 2)
            .map(|i| params.beta_h + (params.beta_c - params.beta_h) * i as f64 / (k + 1) as f64)
            .collect();
        Self::new(step, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Bias of the virtual qubit.
    MaxBias,
    /// `N_v Z_v = p_1 - p_n`.
    MaxNormBias,
    /// `N_v (Z_v - Z_s)`, the swap's change of the system bias.
    MaxSwapGain(f64),
}

/// Objective value of a machine; engines count bias towards inversion as gain.
pub fn score(norm: f64, bias: f64, objective: Objective, mode: Mode) -> f64 {
    let sign = match mode {
        Mode::Fridge => 1.0,
        Mode::Engine => -1.0,
    };
    match objective {
        Objective::MaxBias => sign * bias,
        Objective::MaxNormBias => sign * norm * bias,
        Objective::MaxSwapGain(z_s) => sign * norm * (bias - z_s),
    }
}

const MAX_CONFIGURATIONS: f64 = 1e8;
const TIE_TOL: f64 = 1e-12;

fn grid_units(value: f64, step: f64, what: &str) -> Result<i64> {
    let units = value / step;
    let rounded = units.round();
    if !(units - rounded).abs().le(&(1e-9 * rounded.abs().max(1.0))) {
        return Err(Error::Grid(format!("step {step} does not divide {what} = {value}")));
    }
    Ok(rounded as i64)
}

/// Exhaustive search over all cycles on the grid.
///
/// Every gap sequence (multiples of `grid.step`, each within `±E_max`,
/// summing to `E_v`) is combined with every bath assignment from the grid's
/// temperatures. Among maximizers within a relative `1e-12`, the
/// lexicographically smallest gap sequence (then bath sequence) wins.
pub fn brute_force_best(params: &DesignParams, grid: &SearchGrid, objective: Objective) -> Result<CycleSpec> {
    params.check()?;
    if !(grid.step > 0.0 && grid.step.is_finite()) {
        return Err(Error::Grid(format!("step must be positive, got {}", grid.step)));
    }
    if grid.temperatures.is_empty() {
        return Err(Error::Grid("no temperatures".into()));
    }
    let k_max = grid_units(params.e_max, grid.step, "E_max")?;
    let k_v = grid_units(params.e_v, grid.step, "E_v")?;
    let links = params.n - 1;
    let configs = ((2 * k_max + 1) as f64).powi(links as i32 - 1) * (grid.temperatures.len() as f64).powi(links as i32);
    if configs > MAX_CONFIGURATIONS {
        return Err(Error::Grid(format!("about {configs:.3e} configurations exceed the search budget")));
    }

    let mut sequences = Vec::new();
    let mut current = Vec::with_capacity(links);
    enumerate_gaps(&mut current, links, k_v, k_max, &mut sequences);

    let temps = &grid.temperatures;
    let n_temps = temps.len();
    let assignments = n_temps.pow(links as u32);
    let mut baths = vec![0.0; links];
    let mut log_w = vec![0.0; params.n];
    let mut eval = |units: &[i64], code: usize, baths: &mut [f64]| -> f64 {
        let mut c = code;
        for b in baths.iter_mut().rev() {
            *b = temps[c % n_temps];
            c /= n_temps;
        }
        for (i, (&u, &b)) in units.iter().zip(baths.iter()).enumerate() {
            log_w[i + 1] = log_w[i] - b * u as f64 * grid.step;
        }
        let (norm, bias) = norm_and_bias(&log_w);
        score(norm, bias, objective, params.mode)
    };

    let mut best = f64::NEG_INFINITY;
    for seq in &sequences {
        for code in 0..assignments {
            best = best.max(eval(seq, code, &mut baths));
        }
    }
    let threshold = best - TIE_TOL * best.abs().max(1.0);
    // sequences are generated in lexicographic order, bath codes likewise
    for seq in &sequences {
        for code in 0..assignments {
            if eval(seq, code, &mut baths) >= threshold {
                let gaps: Vec<f64> = seq.iter().map(|&u| u as f64 * grid.step).collect();
                return Ok(CycleSpec::from_gaps(0.0, &gaps, baths.clone()));
            }
        }
    }
    Err(Error::Grid("no cycle on the grid reaches E_v".into()))
}

fn enumerate_gaps(current: &mut Vec<i64>, links: usize, target: i64, k_max: i64, out: &mut Vec<Vec<i64>>) {
    let partial: i64 = current.iter().sum();
    let left = (links - current.len()) as i64;
    if left == 0 {
        if partial == target {
            out.push(current.clone());
        }
        return;
    }
    for u in -k_max..=k_max {
        let rest = target - partial - u;
        if rest.abs() > (left - 1) * k_max {
            continue;
        }
        current.push(u);
        enumerate_gaps(current, links, target, k_max, out);
        current.pop();
    }
}

/// `(N_v, Z_v)` of the first/last pair from unnormalized log-populations.
pub(crate) fn norm_and_bias(log_w: &[f64]) -> (f64, f64) {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = log_w.iter().map(|l| (l - max).exp()).sum();
    let first = (log_w[0] - max).exp();
    let last = (log_w[log_w.len() - 1] - max).exp();
    let norm = (first + last) / total;
    let bias = ((log_w[0] - log_w[log_w.len() - 1]) / 2.0).tanh();
    (norm, bias)
}

/// Temperature reachable by a norm-one multi-cycle machine of dimension `n'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdLawRow {
    pub n_prime: usize,
    pub temperature: f64,
}

impl ThirdLawRow {
    pub fn scaled(&self) -> f64 {
        self.temperature * self.n_prime as f64
    }
}

/// `T_s = 1 / beta_v(n')` along multi-cycle machines.
pub fn third_law_scaling(params: &DesignParams, n_list: &[usize]) -> Result<Vec<ThirdLawRow>> {
    n_list
        .iter()
        .map(|&n_prime| {
            Ok(ThirdLawRow {
                n_prime,
                temperature: 1.0 / multi_beta(n_prime, params)?,
            })
        })
        .collect()
}

/// Limit of `T_s n'` as `n' -> ∞`: `4 E_v / ((beta_c - beta_h) E_max)`, negated for engines.
pub fn third_law_limit(params: &DesignParams) -> f64 {
    let t = 4.0 * params.e_v / ((params.beta_c - params.beta_h) * params.e_max);
    match params.mode {
        Mode::Fridge => t,
        Mode::Engine => -t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{efficiency, validate, virtual_beta, virtual_qubit_of};
    use proptest::prelude::*;

    fn fridge(n: usize) -> DesignParams {
        DesignParams::new(n, 1.0, 2.0, 0.2, 0.05, Mode::Fridge).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(DesignParams::new(2, 1.0, 2.0, 0.2, 0.05, Mode::Fridge).is_err());
        assert!(DesignParams::new(4, 3.0, 2.0, 0.2, 0.05, Mode::Fridge).is_err());
        assert!(DesignParams::new(4, 1.0, 2.0, 0.05, 0.2, Mode::Fridge).is_err());
        assert!(DesignParams::new(4, 0.0, 2.0, 0.2, 0.05, Mode::Fridge).is_err());
        assert!(DesignParams::new(4, 1.0, f64::NAN, 0.2, 0.05, Mode::Fridge).is_err());
        assert_eq!("engine".parse::<Mode>().unwrap(), Mode::Engine);
        assert!("pump".parse::<Mode>().is_err());
    }

    #[test]
    fn optimal_cycle_shapes() {
        let c = optimal_cycle(&fridge(4)).unwrap();
        assert_eq!(c.gaps(), vec![2.0, 1.0, -2.0]);
        assert_eq!(c.couplings(), &[0.2, 0.2, 0.05]);
        let c = optimal_cycle(&fridge(3)).unwrap();
        assert_eq!(c.gaps(), vec![2.0, -1.0]);
        assert_eq!(c.couplings(), &[0.2, 0.05]);
        let c = optimal_cycle(&fridge(5)).unwrap();
        assert_eq!(c.gaps(), vec![2.0, 2.0, -1.0, -2.0]);
        assert_eq!(c.couplings(), &[0.2, 0.2, 0.05, 0.05]);
        let c = optimal_cycle(&fridge(4).with_mode(Mode::Engine)).unwrap();
        assert_eq!(c.couplings(), &[0.05, 0.05, 0.2]);
    }

    #[test]
    fn optimal_cycles_validate() {
        for n in 3..30 {
            for mode in [Mode::Fridge, Mode::Engine] {
                let p = fridge(n).with_mode(mode);
                let c = optimal_cycle(&p).unwrap();
                assert!(validate(&c, Some(&p)).is_empty(), "n = {n}");
                assert!((c.virtual_gap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_beta_examples() {
        assert!((closed_beta_v(&fridge(4)) - 0.5).abs() < 1e-15);
        assert!((closed_beta_v(&fridge(3)) - 0.35).abs() < 1e-15);
        assert!((closed_beta_v(&fridge(5)) - 0.65).abs() < 1e-15);
        assert!((closed_beta_v(&fridge(4).with_mode(Mode::Engine)) + 0.25).abs() < 1e-15);
        assert!((closed_beta_v(&fridge(3).with_mode(Mode::Engine)) + 0.10).abs() < 1e-15);
    }

    #[test]
    fn closed_norm_examples() {
        let e = (-0.5f64).exp();
        let exact = (1.0 + e) / (1.0 + (-0.4f64).exp() + e * (1.0 + (-0.1f64).exp()));
        assert!((closed_norm(&fridge(4)) - exact).abs() < 1e-15);
        assert!((closed_norm(&fridge(4)) - 0.568_551).abs() < 2e-6);
        assert!((closed_norm(&fridge(3)) - 0.717_761).abs() < 5e-7);
        let limit = 1.0 - (-0.4f64).exp();
        assert!((limit - 0.329_680).abs() < 5e-7);
        assert!((closed_norm(&fridge(400)) - limit).abs() < 1e-12);
        assert!((closed_norm(&fridge(401)) - limit).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_steady_state() {
        for n in 3..=40 {
            for mode in [Mode::Fridge, Mode::Engine] {
                let p = fridge(n).with_mode(mode);
                let c = optimal_cycle(&p).unwrap();
                let b = virtual_beta(&c).unwrap();
                let vq = virtual_qubit_of(&c).unwrap();
                assert!((b - closed_beta_v(&p)).abs() <= 1e-10 * b.abs(), "beta n={n} {mode}");
                assert!((vq.norm - closed_norm(&p)).abs() <= 1e-10 * vq.norm, "norm n={n} {mode}");
            }
        }
    }

    #[test]
    fn marginal_gain_examples() {
        assert!((marginal_gain(&fridge(4)) - 0.3).abs() < 1e-12);
        assert!((marginal_gain(&fridge(4).with_mode(Mode::Engine)) + 0.3).abs() < 1e-12);
        let p = DesignParams::new(4, 0.5, 2.0, 0.2, 0.05, Mode::Fridge).unwrap();
        assert!((marginal_gain(&p) - 0.3).abs() < 1e-12);
        assert!((marginal_gain(&fridge(5)) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn fridge_engine_duality() {
        for n in 3..20 {
            let f = fridge(n);
            let swapped = DesignParams { beta_c: f.beta_h, beta_h: f.beta_c, ..f };
            let e = f.with_mode(Mode::Engine);
            // engine = fridge expression with the baths exchanged
            assert!((closed_beta_v(&e) - closed_beta_v(&swapped)).abs() < 1e-14);
        }
    }

    #[test]
    fn efficiency_falls_as_one_over_n() {
        for n in (4..=40).step_by(2) {
            let r = efficiency(&optimal_cycle(&fridge(n)).unwrap()).unwrap();
            assert!((r.eta * (n as f64 / 2.0 - 1.0) - 0.5).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn gap_breakdown() {
        assert_eq!(GapBreakdown::of(5.0, 2.0), GapBreakdown { m: 2, delta: 1.0 });
        assert_eq!(GapBreakdown::of(4.0, 2.0), GapBreakdown { m: 2, delta: 0.0 });
        assert_eq!(GapBreakdown::of(-1.0, 2.0), GapBreakdown { m: -1, delta: 1.0 });
    }

    /// Brute-force maximum of Q_+ over gap sequences on a grid.
    fn brute_q_plus(j: usize, units: i64, k_max: i64, step: f64) -> Option<f64> {
        let mut seqs = Vec::new();
        enumerate_gaps(&mut Vec::new(), j - 1, units, k_max, &mut seqs);
        seqs.iter()
            .map(|s| s.iter().filter(|&&u| u > 0).sum::<i64>() as f64 * step)
            .fold(None, |acc: Option<f64>, q| Some(acc.map_or(q, |a| a.max(q))))
    }

    #[test]
    fn heat_split_matches_enumeration() {
        let (step, k_max) = (0.5, 4);
        for j in 2..=6 {
            for units in -(k_max * (j as i64 - 1))..=k_max * (j as i64 - 1) {
                let de = units as f64 * step;
                let split = max_positive_heat(j, de, 2.0).unwrap();
                let total = split.plus_max + split.plus_delta + split.minus_complement + split.minus_max;
                assert_eq!(total, j - 1, "j={j} dE={de}");
                assert!((split.q_plus + split.q_minus - de).abs() < 1e-12);
                let brute = brute_q_plus(j, units, k_max, step).unwrap();
                assert!((split.q_plus - brute).abs() < 1e-12, "j={j} dE={de}: {} vs {brute}", split.q_plus);
            }
        }
        assert!(max_positive_heat(3, 5.0, 2.0).is_err());
    }

    #[test]
    fn brute_force_max_bias_n4() {
        let p = fridge(4);
        let best = brute_force_best(&p, &SearchGrid::extremes(0.5, &p), Objective::MaxBias).unwrap();
        assert!((virtual_beta(&best).unwrap() - closed_beta_v(&p)).abs() < 1e-12);
    }

    #[test]
    fn brute_force_swap_gain_n3_is_qutrit() {
        let p = fridge(3);
        let best = brute_force_best(&p, &SearchGrid::extremes(0.5, &p), Objective::MaxSwapGain(0.0)).unwrap();
        assert_eq!(best, optimal_cycle(&p).unwrap());
    }

    #[test]
    fn brute_force_norm_bias_n4_is_optimal() {
        let p = fridge(4);
        let best = brute_force_best(&p, &SearchGrid::extremes(0.5, &p), Objective::MaxNormBias).unwrap();
        assert_eq!(best, optimal_cycle(&p).unwrap());
    }

    #[test]
    fn intermediate_temperatures_never_win() {
        for n in 3..=4 {
            let p = fridge(n);
            let grid = SearchGrid::with_intermediates(0.5, &p, 2);
            assert_eq!(grid.temperatures.len(), 4);
            let best = brute_force_best(&p, &grid, Objective::MaxNormBias).unwrap();
            assert_eq!(best, optimal_cycle(&p).unwrap());
        }
    }

    #[test]
    fn brute_force_engine() {
        let p = fridge(4).with_mode(Mode::Engine);
        let best = brute_force_best(&p, &SearchGrid::extremes(0.5, &p), Objective::MaxNormBias).unwrap();
        assert_eq!(best, optimal_cycle(&p).unwrap());
    }

    #[test]
    fn brute_force_rejects_bad_grid() {
        let p = fridge(3);
        assert!(matches!(
            brute_force_best(&p, &SearchGrid::extremes(0.3, &p), Objective::MaxBias),
            Err(Error::Grid(_))
        ));
        assert!(brute_force_best(&p, &SearchGrid::extremes(0.0, &p), Objective::MaxBias).is_err());
        let big = fridge(12);
        assert!(brute_force_best(&big, &SearchGrid::extremes(0.5, &big), Objective::MaxBias).is_err());
    }

    #[test]
    fn optimal_beats_every_swap_gain_it_can_cool() {
        // the gain bound holds whenever the optimal machine's bias exceeds Z_s
        for n in 3..=5 {
            let p = fridge(n);
            let opt = virtual_qubit_of(&optimal_cycle(&p).unwrap()).unwrap();
            for z_s in [-0.5, -0.2, 0.0, 0.1] {
                assert!(opt.bias.value() > z_s);
                let best = brute_force_best(&p, &SearchGrid::extremes(0.5, &p), Objective::MaxSwapGain(z_s)).unwrap();
                let vq = virtual_qubit_of(&best).unwrap();
                let gain = |n: f64, z: f64| n * (z - z_s);
                assert!(gain(vq.norm, vq.bias.value()) <= gain(opt.norm, opt.bias.value()) + 1e-12);
            }
        }
    }

    #[test]
    fn third_law_rows() {
        let p = fridge(4);
        let rows = third_law_scaling(&p, &[6, 100]).unwrap();
        assert!((rows[0].temperature - 2.0).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.temperature > 0.0));
        assert!((third_law_limit(&p) - 40.0 / 3.0).abs() < 1e-12);
        assert!(third_law_scaling(&p, &[7]).is_err());
    }

    proptest! {
        #[test]
        fn beta_increases_with_resources(
            n in 3usize..60,
            e_v in 0.1f64..1.0,
            extra in 0.01f64..3.0,
            beta_h in 0.01f64..1.0,
            spread in 0.01f64..1.0,
            bump in 0.01f64..0.5,
        ) {
            let p = DesignParams::new(n, e_v, e_v + extra, beta_h + spread, beta_h, Mode::Fridge).unwrap();
            prop_assert!(closed_beta_v(&p.with_n(n + 1)) > closed_beta_v(&p));
            let wider = DesignParams { e_max: p.e_max + bump, ..p };
            prop_assert!(closed_beta_v(&wider) > closed_beta_v(&p));
            let hotter = DesignParams { beta_h: p.beta_h * (1.0 - bump), ..p };
            prop_assert!(closed_beta_v(&hotter) > closed_beta_v(&p));
        }

        #[test]
        fn marginal_gain_identity(
            n in 3usize..60,
            e_v in 0.1f64..1.0,
            extra in 0.0f64..3.0,
            beta_h in 0.01f64..1.0,
            spread in 0.01f64..1.0,
        ) {
            let p = DesignParams::new(n, e_v, e_v + extra, beta_h + spread, beta_h, Mode::Fridge).unwrap();
            let expect = spread * p.e_max;
            prop_assert!((marginal_gain(&p) - expect).abs() <= 1e-10 * expect.max(1.0));
        }

        #[test]
        fn closed_forms_track_numerics(
            n in 3usize..40,
            e_v in 0.1f64..1.0,
            extra in 0.0f64..3.0,
            beta_h in 0.01f64..1.0,
            spread in 0.01f64..1.0,
            engine in any::<bool>(),
        ) {
            let mode = if engine { Mode::Engine } else { Mode::Fridge };
            let p = DesignParams::new(n, e_v, e_v + extra, beta_h + spread, beta_h, mode).unwrap();
            let c = optimal_cycle(&p).unwrap();
            let vq = virtual_qubit_of(&c).unwrap();
            prop_assert!((vq.norm - closed_norm(&p)).abs() <= 1e-10 * vq.norm);
            let b = virtual_beta(&c).unwrap();
            prop_assert!((b - closed_beta_v(&p)).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }
}
