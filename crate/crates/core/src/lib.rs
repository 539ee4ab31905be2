//! Multilevel autonomous quantum thermal machines described through virtual qubits.
//!
//! Units follow `k_B = ħ = 1`: inverse temperatures and energies are plain
//! `f64`s and only their products enter the physics. All machine states are
//! diagonal in the energy basis.
//!
//! * [`vqubit`]: bias/temperature conversions and the swap primitive.
//! * [`cycle`]: single n-level thermal cycles, their steady states and efficiency.
//! * [`design`]: optimal cycles under an energy-gap bound, closed forms and an
//!   exhaustive search used to check optimality.
//! * [`amplify`]: multi-cycle norm amplification and real-qubit coupling transforms.
//! * [`concat`]: chains of concatenated qutrit machines.
//! * [`dynamics`]: Pauli master equation for a machine driving an external qubit.

pub mod amplify;
pub mod concat;
pub mod cycle;
pub mod design;
pub mod dynamics;
mod error;
pub(crate) mod numeric;
pub mod vqubit;

pub use amplify::{amplify, multi_beta, transform_coupling, CouplingTransform, MultiCycleSpec};
pub use concat::{
    concat_beta, concat_log_dimension, concat_norm, concat_steady, ConcatSpec, LogDimension,
    Placement, QutritChainState,
};
pub use cycle::{
    efficiency, steady_state, validate, virtual_qubit_of, CycleSpec, EfficiencyReport,
    SteadyState, Violation,
};
pub use design::{
    brute_force_best, closed_beta_v, closed_norm, marginal_gain, optimal_cycle,
    third_law_scaling, DesignParams, Mode, Objective, SearchGrid,
};
pub use dynamics::{
    build_rates, optimal_length, scan_cycle_length, steady, system_beta, DynamicsConfig,
    DynamicsRow, JointState, RateMatrix,
};
pub use error::{Error, Result};
pub use vqubit::{beta_from_bias, bias_from_beta, delta_bias, swap, Bias, SystemQubit, VirtualQubit};
