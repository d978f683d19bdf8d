use super::AnalysisError;
use crate::linalg::build_operators;
use crate::steady::DensityMatrix;

/// Mode whose zero-delay intensity correlation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Emitter,
    Cavity,
}

/// Populations at or below this are treated as empty.
const MIN_POPULATION: f64 = 1e-12;

/// `⟨O†O†OO⟩ / ⟨O†O⟩²` with `O = σ` or `O = a`.
pub fn g2_zero(rho: &DensityMatrix, channel: Channel) -> Result<f64, AnalysisError> {
    let ops = build_operators(rho.space());
    let o = match channel {
        Channel::Emitter => ops.sigma,
        Channel::Cavity => ops.a_c,
    };
    let od = o.dagger();
    let n = od.matmul(&o);
    let pop = rho.expect(&n).re;
    if pop.is_nan() || pop <= MIN_POPULATION {
        return Err(AnalysisError::ZeroPopulation(pop));
    }
    let pair = od.matmul(&od).matmul(&o).matmul(&o);
    Ok(rho.expect(&pair).re / (pop * pop))
}
