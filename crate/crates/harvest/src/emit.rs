//! CSV and JSON output of sweep tables.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), enough for
//! every `f64` to round-trip exactly.

use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Map, Value};

use harvest_core::model::coupling_from_mass;

use crate::error::{CliError, CliResult};
use crate::sweep::{row_negativity, AuditDelta, SweepRow, SweepTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::config(format!("unknown format `{other}` (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    Path(PathBuf),
}

/// Emission settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmitOptions {
    /// Detector mass in Planck units; scales every probability by `lambda^2`.
    pub mass_planck: Option<f64>,
}

impl EmitOptions {
    pub fn lambda_sq(&self) -> f64 {
        self.mass_planck.map(|m| coupling_from_mass(m).powi(2)).unwrap_or(1.0)
    }
}

pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column names for a table.
pub fn columns(table: &SweepTable) -> Vec<String> {
    let mut cols = vec!["scenario".to_string()];
    cols.extend(table.spec.scenario.parameters().iter().map(|s| s.to_string()));
    cols.extend(["L_AA", "L_BB", "M_abs", "negativity", "L_error", "M_error"].map(String::from));
    if table.spec.audit {
        cols.extend(["oracle_L_AA", "oracle_M_abs", "audit_delta_L", "audit_delta_M"].map(String::from));
    }
    cols.push("flag".to_string());
    cols
}

/// The row with all probabilities multiplied by `lambda_sq`.
pub fn scaled(row: &SweepRow, lambda_sq: f64) -> SweepRow {
    if lambda_sq == 1.0 {
        return row.clone();
    }
    let mut r = row.clone();
    r.l_aa *= lambda_sq;
    r.l_bb *= lambda_sq;
    r.m_abs *= lambda_sq;
    r.l_error *= lambda_sq;
    r.m_error *= lambda_sq;
    r.negativity = if r.flag.is_some() && r.l_aa.is_nan() { f64::NAN } else { row_negativity(r.l_aa, r.l_bb, r.m_abs) };
    r.audit = r.audit.map(|a| AuditDelta { oracle_l_aa: a.oracle_l_aa * lambda_sq, oracle_m_abs: a.oracle_m_abs * lambda_sq, ..a });
    r
}

fn numeric_fields(table: &SweepTable, row: &SweepRow) -> Vec<f64> {
    let mut v: Vec<f64> = table.spec.scenario.parameters().iter().map(|p| row.params.get(*p).copied().unwrap_or(f64::NAN)).collect();
    v.extend([row.l_aa, row.l_bb, row.m_abs, row.negativity, row.l_error, row.m_error]);
    if table.spec.audit {
        match row.audit {
            Some(a) => v.extend([a.oracle_l_aa, a.oracle_m_abs, a.delta_l, a.delta_m]),
            None => v.extend([f64::NAN; 4]),
        }
    }
    v
}

pub fn write_csv<W: Write>(table: &SweepTable, opts: EmitOptions, out: W) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(columns(table))?;
    let lsq = opts.lambda_sq();
    for row in &table.rows {
        let row = scaled(row, lsq);
        let mut rec = vec![table.spec.scenario.id().to_string()];
        rec.extend(numeric_fields(table, &row).into_iter().map(fmt17));
        rec.push(row.flag.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(table: &SweepTable, opts: EmitOptions) -> CliResult<Value> {
    let cols = columns(table);
    let lsq = opts.lambda_sq();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let row = scaled(row, lsq);
            let mut obj = Map::new();
            obj.insert(cols[0].clone(), Value::String(table.spec.scenario.id().to_string()));
            for (name, v) in cols[1..].iter().zip(numeric_fields(table, &row)) {
                obj.insert(name.clone(), serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null));
            }
            obj.insert("flag".into(), row.flag.clone().map(Value::String).unwrap_or(Value::Null));
            Value::Object(obj)
        })
        .collect();
    Ok(json!({
        "metadata": {
            "tool": "harvest",
            "version": env!("CARGO_PKG_VERSION"),
            "spec": serde_json::to_value(&table.spec)?,
            "rel_tol": table.spec.rel_tol,
            "mass_planck": opts.mass_planck,
            "lambda_sq": lsq,
            "columns": cols,
            "flagged_rows": table.flagged(),
        },
        "rows": rows,
    }))
}

pub fn write_json<W: Write>(table: &SweepTable, opts: EmitOptions, mut out: W) -> CliResult<()> {
    let v = to_json(table, opts)?;
    serde_json::to_writer_pretty(&mut out, &v)?;
    writeln!(out)?;
    Ok(())
}

/// Writes `table` in `format` to `dest`. An empty table is an error.
pub fn emit(table: &SweepTable, format: Format, dest: &Destination, opts: EmitOptions) -> CliResult<()> {
    if table.rows.is_empty() {
        return Err(CliError::config("refusing to emit an empty table"));
    }
    let write = |w: Box<dyn Write>| match format {
        Format::Csv => write_csv(table, opts, w),
        Format::Json => write_json(table, opts, w),
    };
    match dest {
        Destination::Stdout => write(Box::new(std::io::stdout().lock())),
        Destination::Path(p) => {
            let f = std::fs::File::create(p)?;
            write(Box::new(std::io::BufWriter::new(f)))
        }
    }
}
