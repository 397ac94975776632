//! Parameter sweeps: one axis, optional overlays, rows computed in parallel
//! and returned in a fixed order (outer overlay, inner axis).

use rayon::prelude::*;
use serde::Serialize;

use harvest_core::oracle::OracleOptions;
use harvest_core::state::{negativity, TwoDetectorState};
use harvest_core::Complex64;

use crate::error::{CliError, CliResult};
use crate::scenario::{Params, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl Axis {
    pub fn linear(name: &str, start: f64, stop: f64, count: usize) -> Self {
        Self { name: name.to_string(), start, stop, count, log: false }
    }

    /// `name:start:stop:count[:log]`.
    pub fn parse(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(CliError::config(format!("axis `{s}` is not name:start:stop:count[:log]")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::config(format!("axis `{s}`: `{t}` is not a number")));
        let count = parts[3].trim().parse::<usize>().map_err(|_| CliError::config(format!("axis `{s}`: bad count `{}`", parts[3])))?;
        let log = match parts.get(4).map(|t| t.trim()) {
            None | Some("lin") | Some("linear") => false,
            Some("log") => true,
            Some(other) => return Err(CliError::config(format!("axis `{s}`: unknown spacing `{other}`"))),
        };
        let axis = Self { name: parts[0].trim().to_string(), start: num(parts[1])?, stop: num(parts[2])?, count, log };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.count < 2 {
            return Err(CliError::config(format!("axis `{}` needs at least 2 points", self.name)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::config(format!("axis `{}` range must be finite", self.name)));
        }
        if self.log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(CliError::config(format!("log axis `{}` needs a positive range", self.name)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    self.stop
                } else if self.log {
                    (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + f * (self.stop - self.start)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overlay {
    pub name: String,
    pub values: Vec<f64>,
}

impl Overlay {
    /// `name=v1,v2,...`.
    pub fn parse(s: &str) -> CliResult<Self> {
        let (name, list) = s.split_once('=').ok_or_else(|| CliError::config(format!("overlay `{s}` is not name=v1,v2,...")))?;
        let values = list
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::config(format!("overlay `{s}`: `{t}` is not a number"))))
            .collect::<CliResult<Vec<f64>>>()?;
        let o = Self { name: name.trim().to_string(), values };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.values.is_empty() {
            return Err(CliError::config(format!("overlay `{}` has no values", self.name)));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config(format!("overlay `{}` values must be finite", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    #[serde(serialize_with = "scenario_id")]
    pub scenario: Scenario,
    pub fixed: Params,
    pub axis: Option<Axis>,
    pub overlays: Vec<Overlay>,
    pub rel_tol: f64,
    pub audit: bool,
}

fn scenario_id<S: serde::Serializer>(s: &Scenario, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(s.id())
}

impl SweepSpec {
    pub fn single(scenario: Scenario, fixed: Params) -> Self {
        Self { scenario, fixed, axis: None, overlays: Vec::new(), rel_tol: 1e-8, audit: false }
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(CliError::config(format!("tolerance must lie in (0, 1e-3], got {}", self.rel_tol)));
        }
        let mut names: Vec<&String> = self.fixed.keys().collect();
        if let Some(a) = &self.axis {
            a.validate()?;
            names.push(&a.name);
        }
        for o in &self.overlays {
            o.validate()?;
            names.push(&o.name);
        }
        self.scenario.check_names(names.iter().copied())?;
        let mut sorted = names.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::config(format!("parameter `{}` is set more than once", w[0])));
        }
        Ok(())
    }

    /// Parameter maps in row order.
    pub fn points(&self) -> Vec<Params> {
        let mut combos: Vec<Params> = vec![self.fixed.clone()];
        for o in &self.overlays {
            combos = combos
                .into_iter()
                .flat_map(|base| {
                    o.values.iter().map(move |v| {
                        let mut p = base.clone();
                        p.insert(o.name.clone(), *v);
                        p
                    })
                })
                .collect();
        }
        match &self.axis {
            None => combos,
            Some(axis) => combos
                .into_iter()
                .flat_map(|base| {
                    axis.values().into_iter().map(move |v| {
                        let mut p = base.clone();
                        p.insert(axis.name.clone(), v);
                        p
                    })
                })
                .collect(),
        }
    }
}

/// Kernel-versus-oracle comparison for one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditDelta {
    pub oracle_l_aa: f64,
    pub oracle_m_abs: f64,
    /// `(kernel - oracle) / |oracle|`.
    pub delta_l: f64,
    pub delta_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub params: Params,
    pub l_aa: f64,
    pub l_bb: f64,
    pub m_abs: f64,
    pub negativity: f64,
    pub l_error: f64,
    pub m_error: f64,
    pub audit: Option<AuditDelta>,
    pub flag: Option<String>,
}

impl SweepRow {
    fn flagged(params: Params, msg: String) -> Self {
        Self {
            params,
            l_aa: f64::NAN,
            l_bb: f64::NAN,
            m_abs: f64::NAN,
            negativity: f64::NAN,
            l_error: f64::NAN,
            m_error: f64::NAN,
            audit: None,
            flag: Some(msg),
        }
    }
}

/// Negativity from the reported magnitudes, so that a row is reproducible from
/// its own `L_AA`, `L_BB` and `|M|` columns.
pub fn row_negativity(l_aa: f64, l_bb: f64, m_abs: f64) -> f64 {
    negativity(&TwoDetectorState { l_aa, l_bb, m: Complex64::new(m_abs, 0.0), ..Default::default() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.flag.is_some()).count()
    }
}

/// Runs every row of `spec`; failures are kept as flagged rows.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<SweepTable> {
    spec.validate()?;
    let points = spec.points();
    let rows: Vec<SweepRow> = points.into_par_iter().map(|p| compute_row(spec, p)).collect();
    Ok(SweepTable { spec: spec.clone(), rows })
}

/// [`run_sweep`] on a pool of at most `threads` workers.
pub fn run_sweep_with_threads(spec: &SweepSpec, threads: Option<usize>) -> CliResult<SweepTable> {
    match threads {
        None => run_sweep(spec),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_sweep(spec))
        }
    }
}

fn compute_row(spec: &SweepSpec, given: Params) -> SweepRow {
    let params = match spec.scenario.resolve(&given) {
        Ok(p) => p,
        Err(e) => return SweepRow::flagged(given, e.to_string()),
    };
    let point = match spec.scenario.point(&params) {
        Ok(p) => p,
        Err(e) => return SweepRow::flagged(params, e.to_string()),
    };
    let integrals = match point.kernels().and_then(|k| k.integrate(spec.rel_tol, false)) {
        Ok(r) => r,
        Err(e) => return SweepRow::flagged(params, e.to_string()),
    };
    let state = integrals.state();
    let m_abs = state.m.norm();
    let mut row = SweepRow {
        params,
        l_aa: state.l_aa,
        l_bb: state.l_bb,
        m_abs,
        negativity: row_negativity(state.l_aa, state.l_bb, m_abs),
        l_error: integrals.l.abs_error_estimate,
        m_error: integrals.m.abs_error_estimate,
        audit: None,
        flag: None,
    };
    if spec.audit {
        let opts = OracleOptions { rel_tol: spec.rel_tol.max(1e-10), ..OracleOptions::default() };
        match point.oracle(opts) {
            Ok((l, m)) => {
                let rel = |a: f64, b: f64| if a == b { 0.0 } else if b == 0.0 { f64::INFINITY } else { (a - b) / b.abs() };
                row.audit = Some(AuditDelta {
                    oracle_l_aa: l.re,
                    oracle_m_abs: m.norm(),
                    delta_l: rel(state.l_aa, l.re),
                    delta_m: rel(m_abs, m.norm()),
                });
            }
            Err(e) => row.flag = Some(format!("audit: {e}")),
        }
    }
    row
}
