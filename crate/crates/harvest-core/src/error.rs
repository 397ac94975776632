use alloc::string::String;

use crate::quadrature::QuadratureResult;

pub type Result<T> = core::result::Result<T, HarvestError>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarvestError {
    #[error("unsupported order l = {l}, supported up to {cap}")]
    UnsupportedOrder { l: u32, cap: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),

    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("quadrature did not converge within {} panels (partial value {}, error {:e})", partial.panels_used, partial.value, partial.abs_error_estimate)]
    Convergence { partial: QuadratureResult },

    #[error("numeric failure: {0}")]
    Numeric(String),
}
