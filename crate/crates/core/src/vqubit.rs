//! Virtual-qubit algebra: bias and temperature conversions and the resonant
//! swap between a virtual qubit and a real system qubit.
//!
//! A two-level block is described by its norm `N` (summed population) and
//! its normalized bias `Z = (p_lower - p_upper) / N`. At inverse temperature
//! `beta` and gap `E` the bias is `tanh(beta * E / 2)`.

use crate::error::{Error, Result};
use crate::numeric::close;

const GAP_TOL: f64 = 1e-12;

/// Normalized population difference of a two-level block, in `[-1, 1]`.
///
/// `+1` is the pure ground state, `-1` complete inversion. Stored as the half
/// log-odds `artanh(Z) = ln(p_lower / p_upper) / 2`, so biases arbitrarily
/// close to `±1` keep their temperature information.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bias {
    half_log_odds: f64,
}

impl Bias {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite("bias"));
        }
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::BiasOutOfRange(value));
        }
        Ok(Self {
            half_log_odds: value.atanh(),
        })
    }

    /// Bias with `ln(p_lower / p_upper) = log_ratio`; infinities give `±1`.
    pub fn from_log_ratio(log_ratio: f64) -> Result<Self> {
        if log_ratio.is_nan() {
            return Err(Error::NonFinite("log ratio"));
        }
        Ok(Self {
            half_log_odds: log_ratio / 2.0,
        })
    }

    /// Bias of a pair with populations `(lower, upper)`.
    pub fn from_populations(lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0 && upper >= 0.0 && lower + upper > 0.0) {
            return Err(Error::NormOutOfRange(lower + upper));
        }
        Self::from_log_ratio(lower.ln() - upper.ln())
    }

    pub fn value(self) -> f64 {
        self.half_log_odds.tanh()
    }

    /// `ln(p_lower / p_upper)`.
    pub fn log_ratio(self) -> f64 {
        2.0 * self.half_log_odds
    }
}

/// A designated transition of a machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualQubit {
    pub gap: f64,
    pub norm: f64,
    pub bias: Bias,
}

impl VirtualQubit {
    pub fn new(gap: f64, norm: f64, bias: Bias) -> Result<Self> {
        check_gap(gap)?;
        if !norm.is_finite() {
            return Err(Error::NonFinite("norm"));
        }
        if !(0.0..=1.0).contains(&norm) {
            return Err(Error::NormOutOfRange(norm));
        }
        Ok(Self { gap, norm, bias })
    }

    /// Virtual qubit at inverse temperature `beta`.
    pub fn thermal(gap: f64, norm: f64, beta: f64) -> Result<Self> {
        Self::new(gap, norm, bias_from_beta(beta, gap)?)
    }

    pub fn beta(&self) -> Result<f64> {
        beta_from_bias(self.bias, self.gap)
    }

    /// Populations `(lower, upper)` of the block.
    pub fn populations(&self) -> (f64, f64) {
        let z = self.bias.value();
        (self.norm * (1.0 + z) / 2.0, self.norm * (1.0 - z) / 2.0)
    }
}

/// A real qubit; its norm is identically one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemQubit {
    pub gap: f64,
    pub bias: Bias,
}

impl SystemQubit {
    pub fn new(gap: f64, bias: Bias) -> Result<Self> {
        check_gap(gap)?;
        Ok(Self { gap, bias })
    }

    pub fn thermal(gap: f64, beta: f64) -> Result<Self> {
        Self::new(gap, bias_from_beta(beta, gap)?)
    }

    /// Populations `(p0, p1)` of ground and excited level.
    pub fn populations(&self) -> (f64, f64) {
        let z = self.bias.value();
        ((1.0 + z) / 2.0, (1.0 - z) / 2.0)
    }
}

fn check_gap(gap: f64) -> Result<()> {
    if !gap.is_finite() {
        return Err(Error::NonFinite("gap"));
    }
    if gap <= 0.0 {
        return Err(Error::NonPositiveGap(gap));
    }
    Ok(())
}

/// `tanh(beta * gap / 2)`. Infinite `beta` saturates to `±1`.
pub fn bias_from_beta(beta: f64, gap: f64) -> Result<Bias> {
    check_gap(gap)?;
    if beta.is_nan() {
        return Err(Error::NonFinite("beta"));
    }
    Bias::from_log_ratio(beta * gap)
}

/// Inverse of [`bias_from_beta`]: `(2 / gap) * artanh(bias)`.
pub fn beta_from_bias(bias: Bias, gap: f64) -> Result<f64> {
    check_gap(gap)?;
    let log_ratio = bias.log_ratio();
    if !log_ratio.is_finite() {
        return Err(Error::InfiniteTemperature(bias.value()));
    }
    Ok(log_ratio / gap)
}

fn check_resonance(system: &SystemQubit, vq: &VirtualQubit) -> Result<()> {
    if !close(system.gap, vq.gap, GAP_TOL) {
        return Err(Error::GapMismatch {
            system: system.gap,
            virtual_gap: vq.gap,
        });
    }
    Ok(())
}

/// Resonant swap of a system qubit with a virtual qubit.
///
/// The system bias becomes `N_v Z_v + (1 - N_v) Z_s`. The virtual block keeps
/// its norm and takes the old system bias; the rest of the machine is untouched.
pub fn swap(system: SystemQubit, vq: VirtualQubit) -> Result<(SystemQubit, VirtualQubit)> {
    check_resonance(&system, &vq)?;
    let (zs, zv, nv) = (system.bias.value(), vq.bias.value(), vq.norm);
    let shift = nv * (zv - zs);
    let bias = if shift == 0.0 {
        system.bias
    } else {
        Bias::new((zs + shift).clamp(-1.0, 1.0))?
    };
    Ok((
        SystemQubit {
            gap: system.gap,
            bias,
        },
        VirtualQubit {
            gap: vq.gap,
            norm: vq.norm,
            bias: system.bias,
        },
    ))
}

/// Change of the system bias under [`swap`]: `N_v (Z_v - Z_s)`.
pub fn delta_bias(system: SystemQubit, vq: VirtualQubit) -> Result<f64> {
    check_resonance(&system, &vq)?;
    Ok(vq.norm * (vq.bias.value() - system.bias.value()))
}
