//! Run configuration: a flat `key = value` file merged with command-line flags.
//!
//! Recognised keys are `scenario`, `set` (`name=value`), `axis`, `overlay`
//! (repeatable), `tol`, `audit`, `format`, `out` and `mass-planck`. Any other
//! key is read as a parameter name, so `sigma = 0.3` is shorthand for
//! `set = sigma=0.3`. Blank lines and `#` comments are ignored.

use std::path::{Path, PathBuf};

use crate::emit::{Destination, EmitOptions, Format};
use crate::error::{CliError, CliResult};
use crate::scenario::{Params, Scenario};
use crate::sweep::{Axis, Overlay, SweepSpec};

/// Unvalidated settings from one source. Later sources override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub set: Vec<(String, f64)>,
    pub axis: Option<String>,
    pub overlays: Vec<String>,
    pub tol: Option<f64>,
    pub audit: Option<bool>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub mass_planck: Option<f64>,
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub spec: SweepSpec,
    pub format: Format,
    pub dest: Destination,
    pub emit: EmitOptions,
}

fn number(key: &str, v: &str) -> CliResult<f64> {
    v.trim().parse::<f64>().map_err(|_| CliError::config(format!("`{key}`: `{v}` is not a number")))
}

fn boolean(key: &str, v: &str) -> CliResult<bool> {
    match v.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(CliError::config(format!("`{key}`: `{other}` is not a boolean"))),
    }
}

/// Parses `name=value`.
pub fn parse_assignment(s: &str) -> CliResult<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| CliError::config(format!("`{s}` is not name=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(CliError::config(format!("`{s}` has an empty name")));
    }
    Ok((k.to_string(), number(k, v)?))
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut c = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let at = |e: CliError| match e {
                CliError::Config(m) => CliError::config(format!("line {}: {m}", i + 1)),
                other => other,
            };
            match key {
                "scenario" => c.scenario = Some(value.to_string()),
                "set" => c.set.push(parse_assignment(value).map_err(at)?),
                "axis" => c.axis = Some(value.to_string()),
                "overlay" => c.overlays.push(value.to_string()),
                "tol" => c.tol = Some(number(key, value).map_err(at)?),
                "audit" => c.audit = Some(boolean(key, value).map_err(at)?),
                "format" => c.format = Some(value.to_string()),
                "out" => c.out = Some(PathBuf::from(value)),
                "mass-planck" => c.mass_planck = Some(number(key, value).map_err(at)?),
                param => c.set.push((param.to_string(), number(param, value).map_err(at)?)),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// `self` overridden by `over`. Assignments merge by name; a non-empty
    /// overlay list replaces the base list.
    pub fn merged(mut self, over: RunConfig) -> Self {
        if over.scenario.is_some() {
            self.scenario = over.scenario;
        }
        for (k, v) in over.set {
            self.set.retain(|(n, _)| *n != k);
            self.set.push((k, v));
        }
        if over.axis.is_some() {
            self.axis = over.axis;
        }
        if !over.overlays.is_empty() {
            self.overlays = over.overlays;
        }
        self.tol = over.tol.or(self.tol);
        self.audit = over.audit.or(self.audit);
        self.format = over.format.or(self.format);
        self.out = over.out.or(self.out);
        self.mass_planck = over.mass_planck.or(self.mass_planck);
        self
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        let id = self.scenario.as_deref().ok_or_else(|| CliError::config("no scenario given"))?;
        let scenario = Scenario::parse(id)?;
        let mut fixed = Params::new();
        for (k, v) in &self.set {
            fixed.insert(k.clone(), *v);
        }
        let axis = self.axis.as_deref().map(Axis::parse).transpose()?;
        let overlays = self.overlays.iter().map(|s| Overlay::parse(s)).collect::<CliResult<Vec<_>>>()?;
        // A name on the axis or an overlay wins over a fixed value from a file.
        for name in axis.iter().map(|a| &a.name).chain(overlays.iter().map(|o| &o.name)) {
            fixed.remove(name);
        }
        let spec = SweepSpec {
            scenario,
            fixed,
            axis,
            overlays,
            rel_tol: self.tol.unwrap_or(1e-8),
            audit: self.audit.unwrap_or(false),
        };
        spec.validate()?;
        let format = match self.format.as_deref() {
            Some(f) => f.parse()?,
            None => Format::Csv,
        };
        if let Some(m) = self.mass_planck {
            if !(m.is_finite() && m > 0.0) {
                return Err(CliError::config(format!("mass-planck must be positive, got {m}")));
            }
        }
        let dest = self.out.clone().map(Destination::Path).unwrap_or(Destination::Stdout);
        Ok(Resolved { spec, format, dest, emit: EmitOptions { mass_planck: self.mass_planck } })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_keys_and_bare_parameters() {
        let c = RunConfig::parse(
            "# comment\nscenario = gravity-gaussian\nsigma = 0.3\nset = sep=6\naxis = omega:0:10:11\noverlay = t=1,2\naudit = yes\n",
        )
        .unwrap();
        assert_eq!(c.scenario.as_deref(), Some("gravity-gaussian"));
        assert_eq!(c.set, vec![("sigma".into(), 0.3), ("sep".into(), 6.0)]);
        assert_eq!(c.audit, Some(true));
        let r = c.resolve().unwrap();
        assert_eq!(r.spec.points().len(), 22);
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig::parse("scenario = scalar\nsigma = 0.3\ntol = 1e-6\n").unwrap();
        let flags = RunConfig { set: vec![("sigma".into(), 0.5)], tol: Some(1e-9), ..Default::default() };
        let r = file.merged(flags).resolve().unwrap();
        assert_eq!(r.spec.fixed["sigma"], 0.5);
        assert_eq!(r.spec.rel_tol, 1e-9);
    }

    #[test]
    fn errors_name_the_line() {
        let e = RunConfig::parse("scenario = scalar\nsigma = abc\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(RunConfig::parse("justtext\n").is_err());
    }

    #[test]
    fn rejects_unknown_parameter_and_bad_tolerance() {
        let c = RunConfig::parse("scenario = scalar\ntheta = 1\n").unwrap();
        assert!(c.resolve().is_err());
        let c = RunConfig::parse("scenario = scalar\ntol = 0.1\n").unwrap();
        assert!(c.resolve().is_err());
        let c = RunConfig::parse("scenario = nope\n").unwrap();
        assert!(c.resolve().is_err());
    }
}
