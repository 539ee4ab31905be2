use std::ops::RangeInclusive;

use vqmachine::{
    amplify, build_rates, concat_beta, concat_norm, concat_steady, efficiency, optimal_cycle, optimal_length,
    scan_cycle_length, steady, steady_state, system_beta, validate, virtual_qubit_of, ConcatSpec, CycleSpec,
    DesignParams, DynamicsConfig, Error, Placement, VirtualQubit,
};

use crate::document::{from_design, Kind, MachineDocument};
use crate::error::CliError;
use crate::table::{Cell, ResultTable};

fn bias_of(beta_v: f64, e_v: f64) -> f64 {
    (beta_v * e_v / 2.0).tanh()
}

fn vq_cells(vq: &VirtualQubit) -> Result<Vec<Cell>, CliError> {
    Ok(vec![vq.beta()?.into(), vq.bias.value().into(), vq.norm.into()])
}

pub fn design(params: &DesignParams) -> Result<ResultTable, CliError> {
    let spec = optimal_cycle(params)?;
    let vq = virtual_qubit_of(&spec)?;
    let eta = match efficiency(&spec) {
        Ok(r) => r.eta,
        Err(Error::Degenerate(_)) => f64::NAN,
        Err(e) => return Err(e.into()),
    };
    let links = params.n - 1;
    let mut columns = vec!["n".to_string(), "beta_v".into(), "z_v".into(), "n_v".into(), "eta".into()];
    columns.extend((1..=links).map(|i| format!("gap_{i}")));
    columns.extend((1..=links).map(|i| format!("beta_{i}")));
    let mut table = ResultTable::new(columns);
    let mut row = vec![params.n.into()];
    row.extend(vq_cells(&vq)?);
    row.push(eta.into());
    row.extend(spec.gaps().into_iter().map(Cell::from));
    row.extend(spec.couplings().iter().map(|&b| Cell::from(b)));
    table.push(row);
    Ok(table)
}

pub fn design_document(params: &DesignParams) -> Result<String, CliError> {
    let spec = optimal_cycle(params)?;
    Ok(from_design(params, &spec).render())
}

pub fn scan_single(params: &DesignParams, range: RangeInclusive<usize>) -> Result<ResultTable, CliError> {
    if *range.start() < 3 {
        return Err(CliError::Usage("single-cycle scans need n >= 3".into()));
    }
    let mut table = ResultTable::new(["n", "beta_v", "z_v", "n_v"]);
    for n in range {
        let vq = virtual_qubit_of(&optimal_cycle(&params.with_n(n))?)?;
        let mut row = vec![n.into()];
        row.extend(vq_cells(&vq)?);
        table.push(row);
    }
    Ok(table)
}

pub fn scan_multi(params: &DesignParams, range: RangeInclusive<usize>) -> Result<ResultTable, CliError> {
    let mut table = ResultTable::new(["n_prime", "beta_v", "z_v", "n_v"]);
    for n_prime in range.filter(|n| n % 2 == 0 && *n >= 4) {
        let base = optimal_cycle(&params.with_n(n_prime / 2 + 1))?;
        let vq = amplify(&base)?.effective_qubit()?;
        let mut row = vec![n_prime.into()];
        row.extend(vq_cells(&vq)?);
        table.push(row);
    }
    if table.rows.is_empty() {
        return Err(CliError::Usage("range holds no even n' >= 4".into()));
    }
    Ok(table)
}

pub fn scan_concat(params: &DesignParams, range: RangeInclusive<usize>, placement: Placement) -> Result<ResultTable, CliError> {
    if *range.start() < 1 {
        return Err(CliError::Usage("concatenated scans need k >= 1".into()));
    }
    let mut table = ResultTable::new(["k", "beta_v", "z_v", "n_v"]);
    for k in range {
        let spec = ConcatSpec::new(k, params.e_v, params.e_max, params.beta_c, params.beta_h, params.mode, placement)?;
        let beta = concat_beta(&spec)?;
        table.push(vec![
            k.into(),
            beta.into(),
            bias_of(beta, spec.e_v).into(),
            concat_norm(&spec)?.into(),
        ]);
    }
    Ok(table)
}

pub fn dynamics_scan(params: &DesignParams, range: RangeInclusive<usize>, configs: &[DynamicsConfig]) -> Result<ResultTable, CliError> {
    if *range.start() < 3 {
        return Err(CliError::Usage("cycle lengths start at 3".into()));
    }
    let ns: Vec<usize> = range.collect();
    let rows = scan_cycle_length(params, &ns, configs)?;
    let mut table = ResultTable::new(["n", "tau_s", "beta_s", "beta_vq"]);
    for r in rows {
        table.push(vec![r.n.into(), r.tau_s.into(), r.beta_s.into(), r.beta_vq.into()]);
    }
    Ok(table)
}

pub fn dynamics_optimal(params: &DesignParams, n_max: usize, configs: &[DynamicsConfig]) -> Result<ResultTable, CliError> {
    if n_max < 4 {
        return Err(CliError::Usage("--optimal needs a range ending at 4 or more".into()));
    }
    let mut table = ResultTable::new(["tau_s", "n_star"]);
    for c in configs {
        let n = optimal_length(c, params, n_max)
            .map_err(|e| CliError::from(e).with_context(format!("tau_s = {}", c.tau_s)))?;
        table.push(vec![c.tau_s.into(), n.into()]);
    }
    Ok(table)
}

impl CliError {
    fn with_context(self, ctx: String) -> Self {
        match self {
            CliError::Solver(m) => CliError::Solver(format!("{ctx}: {m}")),
            other => other,
        }
    }
}

fn document_cycle(doc: &MachineDocument) -> Result<(CycleSpec, Option<DesignParams>), CliError> {
    if doc.energies.is_none() && doc.couplings.is_none() {
        let params = doc
            .params(0)?
            .ok_or_else(|| CliError::Validation("document needs `energies` and `couplings` or a [design] section".into()))?;
        return Ok((optimal_cycle(&params)?, Some(params)));
    }
    let spec = doc.cycle()?;
    let params = doc.params(spec.n())?;
    let violations = validate(&spec, params.as_ref());
    if !violations.is_empty() {
        return Err(Error::InvalidCycle(violations).into());
    }
    Ok((spec, params))
}

fn population_columns(prefix: &[&str], count: usize) -> Vec<String> {
    let mut columns: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    columns.extend((1..=count).map(|i| format!("p_{i}")));
    columns
}

pub fn eval(doc: &MachineDocument) -> Result<ResultTable, CliError> {
    match doc.kind {
        Kind::Cycle => {
            let (spec, params) = document_cycle(doc)?;
            let vq = virtual_qubit_of(&spec)?;
            let pops = steady_state(&spec)?.populations;
            let beta_c = params.map_or_else(|| spec.couplings().iter().copied().fold(f64::NEG_INFINITY, f64::max), |p| p.beta_c);
            let dynamics = doc.dynamics(spec.virtual_gap(), beta_c);
            let mut prefix = vec!["beta_v", "z_v", "n_v"];
            if dynamics.is_some() {
                prefix.extend(["beta_s", "beta_vq"]);
            }
            let mut table = ResultTable::new(population_columns(&prefix, pops.len()));
            let mut row = vq_cells(&vq)?;
            if let Some(config) = dynamics {
                let state = steady(&build_rates(&spec, &config)?)?;
                row.push(system_beta(&state, config.e_s)?.into());
                row.push(state.machine_beta(spec.virtual_gap())?.into());
            }
            row.extend(pops.into_iter().map(Cell::from));
            table.push(row);
            Ok(table)
        }
        Kind::Multi => {
            let (base, _) = document_cycle(doc)?;
            let machine = amplify(&base)?;
            let vq = machine.effective_qubit()?;
            let pops = machine.steady_state()?.populations;
            let mut table = ResultTable::new(population_columns(&["beta_v", "z_v", "n_v"], pops.len()));
            let mut row = vq_cells(&vq)?;
            row.extend(pops.into_iter().map(Cell::from));
            table.push(row);
            Ok(table)
        }
        Kind::Concat => {
            let spec = doc.concat()?;
            let beta = concat_beta(&spec)?;
            let first = concat_steady(&spec)?.triples[0];
            let mut table = ResultTable::new(population_columns(&["beta_v", "z_v", "n_v"], 3));
            let mut row = vec![beta.into(), bias_of(beta, spec.e_v).into(), concat_norm(&spec)?.into()];
            row.extend(first.into_iter().map(Cell::from));
            table.push(row);
            Ok(table)
        }
    }
}
