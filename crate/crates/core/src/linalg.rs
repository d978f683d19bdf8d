//! Small dense complex linear algebra.
//!
//! Everything here is sized for truncated emitter ⊗ cavity spaces: a Hilbert
//! dimension of at most a few tens and Liouville dimensions of a few hundred.
//! Storage is row-major throughout.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use thiserror::Error;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular (no pivot above {threshold:e} in column {column})")]
    SingularMatrix { column: usize, threshold: f64 },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows * cols != data.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(n_rows, n_cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity, max |m_ij − conj(m_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square(), "hermiticity_defect on non-square matrix");
        let n = self.rows;
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v^T · self`, i.e. a row vector times the matrix.
    pub fn vecmat(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.rows, v.len(), "vecmat dimension mismatch");
        let mut out = vec![ZERO; self.cols];
        for (r, &vr) in v.iter().enumerate() {
            if vr == ZERO {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o += vr * m;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Row-major vectorization: entry (i, j) lands at index `i * cols + j`.
    pub fn vectorize(&self) -> Vec<C64> {
        self.data.clone()
    }

    pub fn unvectorize(n: usize, v: &[C64]) -> Result<Self, LinalgError> {
        Self::from_vec(n, n, v.to_vec())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add dimension mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub dimension mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`; the index of `a` varies slowest.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorization with partial (row) pivoting.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl LuDecomposition {
    /// Pivots below `1e-14 · max|entry|` are treated as zero.
    pub fn factor(m: &ComplexMatrix) -> Result<Self, LinalgError> {
        Self::factor_with_tolerance(m, 1e-14)
    }

    pub fn factor_with_tolerance(m: &ComplexMatrix, rel_tol: f64) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                m.rows, m.cols
            )));
        }
        let n = m.rows;
        let threshold = rel_tol * m.max_abs();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|r| (r, lu[(r, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best.is_nan() || best <= threshold {
                return Err(LinalgError::SingularMatrix {
                    column: k,
                    threshold,
                });
            }
            if p != k {
                for c in 0..n {
                    lu.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for r in k + 1..n {
                let factor = lu[(r, k)] / pivot;
                lu[(r, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for c in k + 1..n {
                    let u = lu[(k, c)];
                    lu[(r, c)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(rhs.len(), n, "LU solve dimension mismatch");
        let mut x: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for r in 0..n {
            let row = self.lu.row(r);
            let mut acc = x[r];
            for c in 0..r {
                acc -= row[c] * x[c];
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let row = self.lu.row(r);
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= row[c] * x[c];
            }
            x[r] = acc / row[r];
        }
        x
    }
}

/// Solves `m · x = rhs`.
pub fn solve_linear(m: &ComplexMatrix, rhs: &[C64]) -> Result<Vec<C64>, LinalgError> {
    if rhs.len() != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "rhs has length {}, matrix has {} rows",
            rhs.len(),
            m.rows
        )));
    }
    Ok(LuDecomposition::factor(m)?.solve(rhs))
}

/// Eigenvalues of a Hermitian matrix in ascending order, by cyclic Jacobi.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch("eigvals of non-square matrix".into()));
    }
    let defect = m.hermiticity_defect();
    if defect > 1e-12 * m.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }
    let n = m.rows;
    let mut a = m.clone();
    // Exact real diagonal to start from.
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// One complex Jacobi rotation zeroing the (p, q) entry; `a ← J† a J`.
fn jacobi_rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.rows;
    let phase = apq / mag; // e^{iα}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
    let (s, c) = theta.sin_cos();
    let e_minus = phase.conj();
    // Columns: (aJ)_kp = c a_kp − s e^{−iα} a_kq, (aJ)_kq = s a_kp + c e^{−iα} a_kq.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * e_minus * s;
        a[(k, q)] = akp * s + akq * e_minus * c;
    }
    // Rows: (J†m)_pk = c m_pk − s e^{iα} m_qk, (J†m)_qk = s m_pk + c e^{iα} m_qk.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "expm of non-square matrix");
    let n = m.rows;
    let norm = m.norm_inf();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = m.scale_real(0.5f64.powi(squarings as i32));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = term.matmul(&scaled).scale_real(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() <= 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// Truncated emitter ⊗ cavity Hilbert space.
///
/// Basis ordering is fixed: the emitter index varies slowest (the `|g⟩` block
/// then the `|e⟩` block) and photon number ascends within each block, so
/// `|e, n⟩` sits at index `(n_max + 1) + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_max: usize,
}

impl HilbertSpace {
    pub fn new(n_max: usize) -> Result<Self, LinalgError> {
        if n_max < 1 {
            return Err(LinalgError::DimensionMismatch(
                "photon cutoff n_max must be at least 1".into(),
            ));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn cavity_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn index(&self, excited: bool, photons: usize) -> usize {
        assert!(photons <= self.n_max, "photon number above cutoff");
        usize::from(excited) * self.cavity_dim() + photons
    }

    pub fn basis_vector(&self, excited: bool, photons: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[self.index(excited, photons)] = ONE;
        v
    }

    /// Projector `|s⟩⟨s|` onto one product basis state.
    pub fn projector(&self, excited: bool, photons: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        let i = self.index(excited, photons);
        m[(i, i)] = ONE;
        m
    }
}

/// Bosonic annihilator on `n` Fock levels: `a|k⟩ = √k |k−1⟩`.
pub fn annihilator(levels: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(levels, levels);
    for k in 1..levels {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// Two-level lowering operator `|g⟩⟨e|` with `|g⟩` first.
pub fn two_level_lowering() -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(2, 2);
    s[(0, 1)] = ONE;
    s
}

/// Cavity annihilator and emitter lowering operator on the product space.
#[derive(Debug, Clone)]
pub struct SystemOperators {
    pub a_c: ComplexMatrix,
    pub sigma: ComplexMatrix,
}

pub fn build_operators(space: HilbertSpace) -> SystemOperators {
    let a_c = kron(&ComplexMatrix::identity(2), &annihilator(space.cavity_dim()));
    let sigma = kron(&two_level_lowering(), &ComplexMatrix::identity(space.cavity_dim()));
    SystemOperators { a_c, sigma }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_diag_with_identity() {
        let d = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let k = kron(&d, &ComplexMatrix::identity(2));
        assert_eq!(k, ComplexMatrix::from_real_diag(&[1.0, 1.0, 2.0, 2.0]));
    }

    #[test]
    fn kron_lowering_follows_basis_order() {
        // Six states: |g,0⟩ |g,1⟩ |g,2⟩ |e,0⟩ |e,1⟩ |e,2⟩.
        let lower = kron(&two_level_lowering(), &ComplexMatrix::identity(3));
        let raise = lower.dagger();
        let mut e = vec![ZERO; 6];
        e[4] = ONE; // |e,1⟩
        let out = lower.matvec(&e);
        for (i, z) in out.iter().enumerate() {
            assert_eq!(*z, if i == 1 { ONE } else { ZERO });
        }
        // |g,1⟩ (second basis vector) raises to |e,1⟩ (fifth).
        let mut g1 = vec![ZERO; 6];
        g1[1] = ONE;
        let out = raise.matvec(&g1);
        for (i, z) in out.iter().enumerate() {
            assert_eq!(*z, if i == 4 { ONE } else { ZERO });
        }
    }

    #[test]
    fn operators_for_single_photon_cutoff() {
        let space = HilbertSpace::new(1).unwrap();
        let ops = build_operators(space);
        let n_c = ops.a_c.dagger().matmul(&ops.a_c);
        let n_a = ops.sigma.dagger().matmul(&ops.sigma);
        assert_eq!(eigvals_hermitian(&n_c).unwrap(), vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(eigvals_hermitian(&n_a).unwrap(), vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn ladder_matrix_element() {
        let a = annihilator(3);
        assert_eq!(a[(1, 2)], c(2f64.sqrt()));
    }

    #[test]
    fn operator_algebra() {
        let space = HilbertSpace::new(4).unwrap();
        let ops = build_operators(space);
        let s2 = ops.sigma.matmul(&ops.sigma);
        assert!(s2.as_slice().iter().all(|z| *z == ZERO));
        for excited in [false, true] {
            for n in 1..=space.n_max() {
                let out = ops.a_c.matvec(&space.basis_vector(excited, n));
                let want = space.basis_vector(excited, n - 1);
                for (o, w) in out.iter().zip(&want) {
                    assert!((o - w * (n as f64).sqrt()).norm() < 1e-15);
                }
            }
        }
        // [a, a†] = 1 below the cutoff.
        let comm = ops.a_c.commutator(&ops.a_c.dagger());
        for excited in [false, true] {
            for n in 0..space.n_max() {
                let i = space.index(excited, n);
                assert!((comm[(i, i)] - ONE).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dagger_is_an_involution() {
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5)],
            vec![C64::new(0.25, -1.0), C64::new(4.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(m.dagger().dagger(), m);
    }

    #[test]
    fn identity_and_diagonal_solves() {
        let b = vec![c(1.0), C64::new(2.0, -1.0), c(3.0)];
        assert_eq!(solve_linear(&ComplexMatrix::identity(3), &b).unwrap(), b);
        let d = ComplexMatrix::from_real_diag(&[2.0, 4.0]);
        let x = solve_linear(&d, &[c(2.0), c(4.0)]).unwrap();
        assert_eq!(x, vec![c(1.0), c(1.0)]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            solve_linear(&m, &[c(1.0), c(1.0)]),
            Err(LinalgError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn two_by_two_coupling_eigenvalues() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 41.0], vec![41.0, 0.0]]).unwrap();
        let ev = eigvals_hermitian(&m).unwrap();
        assert!((ev[0] + 41.0).abs() < 1e-12 && (ev[1] - 41.0).abs() < 1e-12);
        let d = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        assert_eq!(eigvals_hermitian(&d).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(eigvals_hermitian(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn expm_of_diagonal() {
        let m = ComplexMatrix::from_diag(&[C64::new(-1.0, 3.0), C64::new(2.0, 0.0)]);
        let e = expm(&m);
        assert!((e[(0, 0)] - C64::new(-1.0, 3.0).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - c(2f64.exp())).norm() < 1e-13);
        assert_eq!(e[(0, 1)], ZERO);
    }

    #[test]
    fn space_rejects_zero_cutoff() {
        assert!(HilbertSpace::new(0).is_err());
        assert_eq!(HilbertSpace::new(3).unwrap().dim(), 8);
    }
}
