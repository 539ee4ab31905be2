//! TOML machine documents.
//!
//! ```toml
//! kind = "cycle"
//! energies = [0.0, 2.0, 1.0]
//! couplings = ["cold", "hot"]
//!
//! [baths]
//! cold = 0.2
//! hot = 0.05
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vqmachine::{ConcatSpec, CycleSpec, DesignParams, DynamicsConfig, Mode, Placement};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Cycle,
    Multi,
    Concat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "E_v")]
    pub e_v: f64,
    #[serde(rename = "E_max")]
    pub e_max: f64,
    pub beta_c: f64,
    pub beta_h: f64,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placement: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub tau_beta: Option<f64>,
    pub tau_s: Option<f64>,
    pub tau_swap: Option<f64>,
    pub beta_env: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineDocument {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub baths: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl MachineDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| invalid(e.to_string().trim_end().to_string()))
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("document serializes")
    }

    /// The explicit cycle given by `energies` and `couplings`.
    pub fn cycle(&self) -> Result<CycleSpec, CliError> {
        let energies = self.energies.clone().ok_or_else(|| invalid("missing field `energies`"))?;
        let names = self.couplings.as_ref().ok_or_else(|| invalid("missing field `couplings`"))?;
        let mut betas = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let beta = self
                .baths
                .get(name)
                .ok_or_else(|| invalid(format!("couplings[{i}]: undefined bath `{name}`")))?;
            betas.push(*beta);
        }
        Ok(CycleSpec::new(energies, betas))
    }

    fn design(&self) -> Result<&DesignSection, CliError> {
        self.design.as_ref().ok_or_else(|| invalid("missing section [design]"))
    }

    /// Design parameters, when a `[design]` section is present.
    pub fn params(&self, n: usize) -> Result<Option<DesignParams>, CliError> {
        let Some(d) = &self.design else { return Ok(None) };
        let mode: Mode = d.mode.parse().map_err(|e| invalid(format!("design.mode: {e}")))?;
        let n = d.n.unwrap_or(n);
        DesignParams::new(n, d.e_v, d.e_max, d.beta_c, d.beta_h, mode)
            .map(Some)
            .map_err(|e| invalid(format!("design: {e}")))
    }

    pub fn concat(&self) -> Result<ConcatSpec, CliError> {
        let d = self.design()?;
        let mode: Mode = d.mode.parse().map_err(|e| invalid(format!("design.mode: {e}")))?;
        let k = d.k.ok_or_else(|| invalid("design.k is required for kind = \"concat\""))?;
        let placement = match &d.placement {
            Some(p) => p.parse().map_err(|e| invalid(format!("design.placement: {e}")))?,
            None => default_placement(mode),
        };
        ConcatSpec::new(k, d.e_v, d.e_max, d.beta_c, d.beta_h, mode, placement).map_err(|e| invalid(format!("design: {e}")))
    }

    /// Dynamics settings with defaults filled in from the system gap and cold bath.
    pub fn dynamics(&self, e_s: f64, beta_c: f64) -> Option<DynamicsConfig> {
        let d = self.dynamics.as_ref()?;
        let mut c = DynamicsConfig::new(e_s, d.beta_env.unwrap_or(beta_c), d.tau_s.unwrap_or(1.0));
        if let Some(t) = d.tau_beta {
            c.tau_beta = t;
        }
        if let Some(t) = d.tau_swap {
            c.tau_swap = t;
        }
        Some(c)
    }
}

/// Placement with the larger norm for long chains.
pub fn default_placement(mode: Mode) -> Placement {
    match mode {
        Mode::Fridge => Placement::Upper,
        Mode::Engine => Placement::Lower,
    }
}

/// Document describing an optimal cycle, with named baths.
pub fn from_design(params: &DesignParams, spec: &CycleSpec) -> MachineDocument {
    let name = |beta: f64| if beta == params.beta_c { "cold" } else { "hot" }.to_string();
    MachineDocument {
        kind: Kind::Cycle,
        energies: Some(spec.energies().to_vec()),
        couplings: Some(spec.couplings().iter().map(|&b| name(b)).collect()),
        baths: BTreeMap::from([("cold".to_string(), params.beta_c), ("hot".to_string(), params.beta_h)]),
        design: Some(DesignSection {
            n: Some(params.n),
            e_v: params.e_v,
            e_max: params.e_max,
            beta_c: params.beta_c,
            beta_h: params.beta_h,
            mode: params.mode.to_string(),
            k: None,
            placement: None,
        }),
        dynamics: None,
    }
}
