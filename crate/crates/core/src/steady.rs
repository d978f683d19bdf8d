//! Steady state of the master equation, 𝓛ρ = 0 with tr ρ = 1.
//!
//! One row of the vectorized generator is replaced by the trace functional
//! and the resulting bordered system is solved directly by LU. A second
//! kernel direction makes that system singular, which is how a non-unique
//! steady state is detected.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{eigvals_hermitian, solve_linear, ComplexMatrix, HilbertSpace, LinalgError, ONE, ZERO};
use crate::model::Liouvillian;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SteadyStateError {
    #[error("steady state is not unique (bordered system singular at column {column})")]
    DegenerateSteadyState { column: usize },
    #[error("steady-state residual {residual:e} exceeds {bound:e}")]
    NoConvergence { residual: f64, bound: f64 },
    #[error("steady state is not a density matrix: {0}")]
    Unphysical(String),
    #[error("row {row} is not a population row of a Liouville space of dimension {dim}")]
    BadTraceRow { row: usize, dim: usize },
}

/// Unit-trace Hermitian positive semidefinite state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    space: HilbertSpace,
}

impl DensityMatrix {
    /// Checks trace, Hermiticity (1e-10) and positivity (≥ −1e-8).
    pub fn new(matrix: ComplexMatrix, space: HilbertSpace) -> Result<Self, SteadyStateError> {
        if matrix.rows() != space.dim() || !matrix.is_square() {
            return Err(SteadyStateError::Unphysical(format!(
                "matrix is {}x{}, space dimension {}",
                matrix.rows(),
                matrix.cols(),
                space.dim()
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(SteadyStateError::Unphysical(format!("trace {tr}")));
        }
        let defect = matrix.hermiticity_defect();
        if defect > 1e-10 {
            return Err(SteadyStateError::Unphysical(format!("Hermiticity defect {defect:e}")));
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < -1e-8 {
            return Err(SteadyStateError::Unphysical(format!(
                "eigenvalue {min_eig:e} below −1e-8; photon cutoff too small?"
            )));
        }
        Ok(Self { matrix, space })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    /// `tr(ρ O)`.
    pub fn expect(&self, op: &ComplexMatrix) -> C64 {
        self.matrix.matmul(op).trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    // Symmetrize away the sub-1e-10 defect so the Jacobi check accepts it.
    let herm = (m + &m.dagger()).scale_real(0.5);
    eigvals_hermitian(&herm).map(|ev| ev[0]).unwrap_or(f64::NAN)
}

/// Population row `i·d + i` whose entries have the smallest absolute sum.
///
/// Population rows sum to zero (trace preservation), so any one of them is
/// redundant and can carry the normalization instead.
pub fn default_trace_row(liouvillian: &Liouvillian) -> usize {
    let gen = liouvillian.generator();
    let d = liouvillian.space().dim();
    (0..d)
        .map(|i| i * d + i)
        .map(|r| (r, gen.row(r).iter().map(|z| z.norm()).sum::<f64>()))
        .fold((0, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best })
        .0
}

pub fn solve_steady(liouvillian: &Liouvillian) -> Result<DensityMatrix, SteadyStateError> {
    solve_steady_with_trace_row(liouvillian, default_trace_row(liouvillian))
}

/// Same as [`solve_steady`] with an explicit choice of replaced population
/// row.
pub fn solve_steady_with_trace_row(
    liouvillian: &Liouvillian,
    row: usize,
) -> Result<DensityMatrix, SteadyStateError> {
    let space = liouvillian.space();
    let d = space.dim();
    let gen = liouvillian.generator();
    let n = gen.rows();
    if row >= n || !row.is_multiple_of(d + 1) {
        return Err(SteadyStateError::BadTraceRow { row, dim: n });
    }
    let mut bordered = gen.clone();
    for c in 0..n {
        bordered[(row, c)] = ZERO;
    }
    for i in 0..d {
        bordered[(row, i * d + i)] = ONE;
    }
    let mut rhs = vec![ZERO; n];
    rhs[row] = ONE;
    let x = solve_linear(&bordered, &rhs).map_err(|e| match e {
        LinalgError::SingularMatrix { column, .. } => SteadyStateError::DegenerateSteadyState { column },
        other => SteadyStateError::Unphysical(other.to_string()),
    })?;

    let residual = gen.matvec(&x).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let bound = 1e-10 * gen.max_abs().max(f64::MIN_POSITIVE);
    if residual > bound {
        return Err(SteadyStateError::NoConvergence { residual, bound });
    }
    let rho = ComplexMatrix::unvectorize(d, &x).expect("square");
    DensityMatrix::new(rho, space)
}
