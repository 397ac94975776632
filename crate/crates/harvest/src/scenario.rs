//! Scenario identifiers and their construction from flat parameter maps.

use std::collections::BTreeMap;

use harvest_core::kernels::{kernels_for, SpectralKernelSet};
use harvest_core::model::{
    bohr_radius_for_gap, CouplingModel, DetectorConfig, EulerAngles, HydrogenState, PairGeometry, SmearingSpec, SwitchingProfile,
};
use harvest_core::oracle::{l_momentum_oracle, m_momentum_oracle, OracleOptions, Which};
use harvest_core::specfun::{AngularQuantum, RadialConvention};
use harvest_core::Complex64;

use crate::error::{CliError, CliResult};

/// Named parameter values, e.g. `sigma`, `omega`, `sep`.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Scalar,
    QScalar,
    QScalarL2,
    GravityGaussian,
    GravityL2,
    GravityL1,
    Hydrogen320,
    Hydrogen200,
    Hydrogen300,
}

const GAUSSIAN_PARAMS: &[&str] = &["sigma", "omega", "sep", "t"];
const ORIENTED_PARAMS: &[&str] = &["sigma", "omega", "sep", "theta", "psi", "phi", "t"];
const HYDROGEN_PARAMS: &[&str] = &["a0", "omega", "sep", "theta", "psi", "phi", "t"];

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Scalar,
        Scenario::QScalar,
        Scenario::QScalarL2,
        Scenario::GravityGaussian,
        Scenario::GravityL2,
        Scenario::GravityL1,
        Scenario::Hydrogen320,
        Scenario::Hydrogen200,
        Scenario::Hydrogen300,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Scenario::Scalar => "scalar",
            Scenario::QScalar => "qscalar",
            Scenario::QScalarL2 => "qscalar-l2",
            Scenario::GravityGaussian => "gravity-gaussian",
            Scenario::GravityL2 => "gravity-l2",
            Scenario::GravityL1 => "gravity-l1",
            Scenario::Hydrogen320 => "hydrogen-320",
            Scenario::Hydrogen200 => "hydrogen-200",
            Scenario::Hydrogen300 => "hydrogen-300",
        }
    }

    pub fn parse(id: &str) -> CliResult<Self> {
        Self::ALL.into_iter().find(|s| s.id() == id).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|s| s.id()).collect();
            CliError::config(format!("unknown scenario `{id}` (known: {})", known.join(", ")))
        })
    }

    pub fn model(&self) -> CouplingModel {
        match self {
            Scenario::Scalar => CouplingModel::ScalarLinear,
            Scenario::QScalar | Scenario::QScalarL2 => CouplingModel::ScalarQuadrupole,
            _ => CouplingModel::GravityQuadrupole,
        }
    }

    /// Parameter columns, in output order.
    pub fn parameters(&self) -> &'static [&'static str] {
        match self {
            Scenario::Scalar | Scenario::QScalar | Scenario::GravityGaussian => GAUSSIAN_PARAMS,
            Scenario::QScalarL2 | Scenario::GravityL2 | Scenario::GravityL1 => ORIENTED_PARAMS,
            Scenario::Hydrogen320 | Scenario::Hydrogen200 | Scenario::Hydrogen300 => HYDROGEN_PARAMS,
        }
    }

    fn is_hydrogen(&self) -> bool {
        matches!(self, Scenario::Hydrogen320 | Scenario::Hydrogen200 | Scenario::Hydrogen300)
    }

    fn default_value(name: &str) -> Option<f64> {
        Some(match name {
            "sigma" => 0.2,
            "omega" => 4.7,
            "sep" => 8.0,
            "theta" | "psi" | "phi" => 0.0,
            "t" => 1.0,
            _ => return None,
        })
    }

    /// Checks every name in `params` belongs to this scenario.
    pub fn check_names<'a>(&self, names: impl IntoIterator<Item = &'a String>) -> CliResult<()> {
        for n in names {
            if !self.parameters().contains(&n.as_str()) {
                return Err(CliError::config(format!(
                    "scenario `{}` has no parameter `{n}` (parameters: {})",
                    self.id(),
                    self.parameters().join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Fills defaults. For hydrogen an absent `a0` becomes `alpha / (2 omega)`.
    pub fn resolve(&self, given: &Params) -> CliResult<Params> {
        self.check_names(given.keys())?;
        let mut out = Params::new();
        for &name in self.parameters() {
            let v = match given.get(name) {
                Some(v) => *v,
                None if name == "a0" => {
                    let omega = given.get("omega").copied().unwrap_or(4.7);
                    bohr_radius_for_gap(omega)
                }
                None => Self::default_value(name).expect("every listed parameter has a default"),
            };
            if !v.is_finite() {
                return Err(CliError::config(format!("parameter `{name}` must be finite")));
            }
            out.insert(name.to_string(), v);
        }
        Ok(out)
    }

    /// Detector and geometry for a resolved parameter map.
    pub fn point(&self, p: &Params) -> CliResult<Point> {
        let get = |n: &str| p.get(n).copied().ok_or_else(|| CliError::config(format!("missing parameter `{n}`")));
        let switching = SwitchingProfile::new(get("t")?)?;
        let smearing = match self {
            Scenario::Scalar | Scenario::QScalar | Scenario::GravityGaussian => SmearingSpec::GaussianIsotropic { sigma: get("sigma")? },
            Scenario::QScalarL2 | Scenario::GravityL2 => {
                SmearingSpec::GaussianHarmonic { sigma: get("sigma")?, q: AngularQuantum { l: 2, m: 0 } }
            }
            Scenario::GravityL1 => SmearingSpec::GaussianHarmonic { sigma: get("sigma")?, q: AngularQuantum { l: 1, m: 0 } },
            Scenario::Hydrogen320 | Scenario::Hydrogen200 | Scenario::Hydrogen300 => {
                let excited = match self {
                    Scenario::Hydrogen320 => HydrogenState::new(3, 2, 0)?,
                    Scenario::Hydrogen200 => HydrogenState::new(2, 0, 0)?,
                    _ => HydrogenState::new(3, 0, 0)?,
                };
                SmearingSpec::HydrogenTransition {
                    ground: HydrogenState::new(1, 0, 0)?,
                    excited,
                    a0: get("a0")?,
                    convention: RadialConvention::Standard,
                }
            }
        };
        let detector = DetectorConfig::new(1.0, get("omega")?, smearing, switching)?;
        let euler = if self.parameters().contains(&"theta") {
            EulerAngles::new(get("psi")?, get("theta")?, get("phi")?)
        } else {
            EulerAngles::default()
        };
        let geometry = PairGeometry::new(get("sep")?, euler)?;
        debug_assert!(self.is_hydrogen() == self.parameters().contains(&"a0"));
        Ok(Point { model: self.model(), detector, geometry })
    }
}

/// One fully specified detector pair, per unit coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub model: CouplingModel,
    pub detector: DetectorConfig,
    pub geometry: PairGeometry,
}

impl Point {
    pub fn kernels(&self) -> harvest_core::Result<SpectralKernelSet> {
        kernels_for(self.model, &self.detector, &self.detector, &self.geometry)
    }

    /// `(L_AA, M)` from the brute-force momentum integrals.
    pub fn oracle(&self, opts: OracleOptions) -> harvest_core::Result<(Complex64, Complex64)> {
        let d = &self.detector;
        let l = l_momentum_oracle(self.model, d, d, &self.geometry, Which::AA, opts)?;
        let m = m_momentum_oracle(self.model, d, d, &self.geometry, opts)?;
        Ok((l, m))
    }
}
