//! Dense complex operator algebra with tensor-product structure.
//!
//! Everything downstream works with two value types: [`Operator`], a dense
//! complex square matrix carrying an ordered list of subsystem dimensions,
//! and [`DensityState`], an operator validated to be Hermitian, unit-trace
//! and positive semidefinite. Spectral decomposition, partial trace and the
//! von Neumann entropy live here as well.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything can be freely sent across threads.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Hermiticity tolerance (Frobenius norm of A - A†).
pub const TOL_HERM: f64 = 1e-10;
/// Unitarity tolerance (Frobenius norm of U†U - 1).
pub const TOL_UNITARY: f64 = 1e-10;
/// Unit-trace tolerance for states.
pub const TOL_TRACE: f64 = 1e-10;
/// Positivity tolerance: eigenvalues in [-TOL_PSD, 0) are clipped to zero.
pub const TOL_PSD: f64 = 1e-9;
/// Default eigenvalue gap below which eigenspaces are merged.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Outcome probabilities below this floor leave conditional quantities undefined.
pub const P_FLOOR: f64 = 1e-12;

/// Dense complex square matrix over a tensor product of subsystems.
///
/// `dims` lists the subsystem dimensions in tensor order; the matrix side is
/// their product. The dimension structure is fixed at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    mat: DMatrix<C64>,
}

impl Operator {
    /// Wraps a matrix, checking that it is square with side `prod(dims)`.
    pub fn new(dims: Vec<usize>, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let side: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || side != mat.nrows() {
            return Err(Error::DimsMismatch {
                side: mat.nrows(),
                dims,
            });
        }
        Ok(Self { dims, mat })
    }

    pub fn from_rows(dims: Vec<usize>, rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: rows[i].len(),
                });
            }
        }
        let mat = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(dims, mat)
    }

    pub fn from_fn(dims: Vec<usize>, f: impl FnMut(usize, usize) -> C64) -> Self {
        let side: usize = dims.iter().product();
        let mat = DMatrix::from_fn(side, side, f);
        Self { dims, mat }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let side: usize = dims.iter().product();
        Self {
            dims,
            mat: DMatrix::identity(side, side),
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let side: usize = dims.iter().product();
        Self {
            dims,
            mat: DMatrix::zeros(side, side),
        }
    }

    /// Diagonal operator with the given real entries.
    pub fn from_diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let side: usize = dims.iter().product();
        if diag.len() != side {
            return Err(Error::DimsMismatch {
                side: diag.len(),
                dims,
            });
        }
        let mat = DMatrix::from_fn(side, side, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::ZERO
            }
        });
        Ok(Self { dims, mat })
    }

    /// Rank-one operator |ket⟩⟨bra|.
    pub fn ket_bra(dims: Vec<usize>, ket: &[C64], bra: &[C64]) -> Result<Self> {
        let side: usize = dims.iter().product();
        if ket.len() != side || bra.len() != side {
            return Err(Error::DimsMismatch {
                side: ket.len(),
                dims,
            });
        }
        let k = DVector::from_column_slice(ket);
        let b = DVector::from_column_slice(bra);
        let mat = &k * b.adjoint();
        Ok(Self { dims, mat })
    }

    /// Projector |i⟩⟨i| onto a computational basis vector.
    pub fn basis_projector(dims: Vec<usize>, index: usize) -> Self {
        let side: usize = dims.iter().product();
        let mat = DMatrix::from_fn(side, side, |i, j| {
            if i == index && j == index {
                C64::ONE
            } else {
                C64::ZERO
            }
        });
        Self { dims, mat }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension (matrix side).
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    /// Reinterprets the tensor structure without touching the entries.
    ///
    /// Valid whenever the products agree and consecutive factors are merged
    /// or split in place (Kronecker order is preserved by flat indexing).
    pub fn regrouped(&self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.mat.clone())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: &self.mat * s,
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Frobenius norm of A - A†.
    pub fn hermiticity_violation(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation() <= tol
    }

    /// Frobenius norm of U†U - 1.
    pub fn unitarity_violation(&self) -> f64 {
        let n = self.dim();
        (self.mat.adjoint() * &self.mat - DMatrix::<C64>::identity(n, n)).norm()
    }

    /// Replaces the operator by its Hermitian part (A + A†)/2.
    ///
    /// Used to scrub roundoff asymmetry off analytically Hermitian results.
    pub fn hermitized(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    /// Kronecker product; the result's dims are `self.dims ++ other.dims`.
    pub fn tensor(&self, other: &Operator) -> Operator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Operator {
            dims,
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Traces out every subsystem not listed in `keep`.
    ///
    /// `keep` is interpreted as a set; the result's subsystems follow the
    /// original order. The full trace is preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Operator> {
        let n = self.dims.len();
        for &k in keep {
            if k >= n {
                return Err(Error::BadSubsystemIndex { index: k, count: n });
            }
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.is_empty() {
            return Err(Error::BadSubsystemIndex { index: 0, count: n });
        }
        let traced: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&i| self.dims[i]).collect();
        let kn: usize = kept_dims.iter().product();
        let tn: usize = traced.iter().map(|&i| self.dims[i]).product();

        // Stride of each subsystem in the flat index.
        let strides = strides_of(&self.dims);
        // Flat offsets contributed by every kept / traced multi-index.
        let kept_offsets = enumerate_offsets(&self.dims, &strides, &kept);
        let traced_offsets = enumerate_offsets(&self.dims, &strides, &traced);
        debug_assert_eq!(kept_offsets.len(), kn);
        debug_assert_eq!(traced_offsets.len(), tn);

        let mut out = DMatrix::<C64>::zeros(kn, kn);
        for (r, &ro) in kept_offsets.iter().enumerate() {
            for (c, &co) in kept_offsets.iter().enumerate() {
                let mut acc = C64::ZERO;
                for &t in &traced_offsets {
                    acc += self.mat[(ro + t, co + t)];
                }
                out[(r, c)] = acc;
            }
        }
        Operator::new(kept_dims, out)
    }

    /// Lifts an operator acting on the subsystems `targets` of a larger
    /// space, acting as the identity elsewhere.
    ///
    /// `self.dims` must equal the target subsystem dimensions in order.
    pub fn embed(&self, full_dims: &[usize], targets: &[usize]) -> Result<Operator> {
        let n = full_dims.len();
        for &t in targets {
            if t >= n {
                return Err(Error::BadSubsystemIndex { index: t, count: n });
            }
        }
        let target_dims: Vec<usize> = targets.iter().map(|&t| full_dims[t]).collect();
        if target_dims != self.dims {
            return Err(Error::DimensionMismatch(format!(
                "embed: operator dims {:?} do not match target dims {:?}",
                self.dims, target_dims
            )));
        }
        let spectators: Vec<usize> = (0..n).filter(|i| !targets.contains(i)).collect();
        let strides = strides_of(full_dims);
        let target_offsets = enumerate_offsets(full_dims, &strides, targets);
        let spectator_offsets = enumerate_offsets(full_dims, &strides, &spectators);

        let side: usize = full_dims.iter().product();
        let mut out = DMatrix::<C64>::zeros(side, side);
        for (r, &ro) in target_offsets.iter().enumerate() {
            for (c, &co) in target_offsets.iter().enumerate() {
                let v = self.mat[(r, c)];
                if v != C64::ZERO {
                    for &s in &spectator_offsets {
                        out[(ro + s, co + s)] = v;
                    }
                }
            }
        }
        Operator::new(full_dims.to_vec(), out)
    }

    /// Commutator AB - BA.
    pub fn commutator(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim(), other.dim(), "commutator: dimension mismatch");
        Operator {
            dims: self.dims.clone(),
            mat: &self.mat * &other.mat - &other.mat * &self.mat,
        }
    }

    /// Hilbert-Schmidt inner product tr[A†B].
    pub fn hs_inner(&self, other: &Operator) -> C64 {
        assert_eq!(self.dim(), other.dim(), "hs_inner: dimension mismatch");
        (self.mat.adjoint() * &other.mat).diagonal().sum()
    }

    /// Hermitian square root of a positive semidefinite operator.
    ///
    /// Eigenvalues in [-TOL_PSD, 0) are clipped to zero.
    pub fn sqrt_psd(&self) -> Result<Operator> {
        let sd = spectral_decompose(self, DEGENERACY_TOL)?;
        let mut out = Operator::zeros(self.dims.clone());
        for (ev, proj) in sd.eigenvalues.iter().zip(&sd.projectors) {
            if *ev < -TOL_PSD {
                return Err(Error::InvalidState(format!(
                    "sqrt of an operator with eigenvalue {ev:.3e}"
                )));
            }
            let root = ev.max(0.0).sqrt();
            out = &out + &proj.scale_re(root);
        }
        Ok(out)
    }
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

/// Flat offsets of every multi-index over the chosen subsystems, enumerated
/// in row-major order of those subsystems.
fn enumerate_offsets(dims: &[usize], strides: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let total: usize = subsystems.iter().map(|&i| dims[i]).product();
    let mut offsets = Vec::with_capacity(total);
    let mut idx = vec![0usize; subsystems.len()];
    loop {
        let off: usize = subsystems
            .iter()
            .zip(&idx)
            .map(|(&s, &i)| i * strides[s])
            .sum();
        offsets.push(off);
        // Increment the multi-index, last subsystem fastest.
        let mut pos = subsystems.len();
        loop {
            if pos == 0 {
                return offsets;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < dims[subsystems[pos]] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator add: dims mismatch");
        Operator {
            dims: self.dims.clone(),
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator sub: dims mismatch");
        Operator {
            dims: self.dims.clone(),
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator mul: dimension mismatch");
        Operator {
            dims: self.dims.clone(),
            mat: &self.mat * &rhs.mat,
        }
    }
}

/// Positive unit-trace operator: the carrier for every state in the library.
///
/// Construction validates Hermiticity, unit trace and positivity. Eigenvalues
/// in [-TOL_PSD, 0) are treated as roundoff: they are clipped to zero and the
/// state is renormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    op: Operator,
}

impl DensityState {
    pub fn new(op: Operator) -> Result<Self> {
        let herm = op.hermiticity_violation();
        if herm > TOL_HERM {
            return Err(Error::InvalidState(format!(
                "not Hermitian (violation {herm:.3e})"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidState(format!(
                "trace {tr} is not 1 within {TOL_TRACE:.0e}"
            )));
        }
        let eig = op.hermitized().mat.symmetric_eigen();
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -TOL_PSD {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:.3e} below -{TOL_PSD:.0e}"
            )));
        }
        // Negatives at eigensolve-noise scale are kept in place so the
        // constructor is idempotent; anything larger (but still inside the
        // tolerance) is clipped to zero and the state renormalized.
        const REBUILD_TRIGGER: f64 = 1e-13;
        if min >= -REBUILD_TRIGGER {
            return Ok(Self { op });
        }
        // Clip the slightly negative eigenvalues and renormalize.
        let n = op.dim();
        let mut mat = DMatrix::<C64>::zeros(n, n);
        let mut total = 0.0;
        for (k, ev) in eig.eigenvalues.iter().enumerate() {
            let p = ev.max(0.0);
            total += p;
            if p > 0.0 {
                let v = eig.eigenvectors.column(k);
                mat += (v * v.adjoint()) * C64::new(p, 0.0);
            }
        }
        mat /= C64::new(total, 0.0);
        Ok(Self {
            op: Operator::new(op.dims().to_vec(), mat)?,
        })
    }

    pub fn from_matrix(dims: Vec<usize>, mat: DMatrix<C64>) -> Result<Self> {
        Self::new(Operator::new(dims, mat)?)
    }

    /// Pure state |ψ⟩⟨ψ| from (not necessarily normalized) amplitudes.
    pub fn pure(dims: Vec<usize>, amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let normalized: Vec<C64> = amplitudes.iter().map(|c| c / norm).collect();
        Self::new(Operator::ket_bra(dims, &normalized, &normalized)?)
    }

    /// Computational basis state |i⟩⟨i|.
    pub fn basis_state(dims: Vec<usize>, index: usize) -> Result<Self> {
        Self::new(Operator::basis_projector(dims, index))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let side: usize = dims.iter().product();
        let op = Operator::identity(dims).scale_re(1.0 / side as f64);
        Self { op }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.op.matrix()
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn tensor(&self, other: &DensityState) -> DensityState {
        DensityState {
            op: self.op.tensor(&other.op),
        }
    }

    /// Real expectation value tr(Oρ) of a Hermitian observable.
    pub fn expectation(&self, obs: &Operator) -> f64 {
        (obs.matrix() * self.matrix()).diagonal().sum().re
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityState> {
        DensityState::new(self.op.partial_trace(keep)?)
    }

    /// Eigenvalues of the state, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .op
            .hermitized()
            .matrix()
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Von Neumann entropy of this state, in nats.
    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }
}

/// Eigenvalues (strictly ascending after degeneracy merging) together with
/// the orthogonal projectors onto the corresponding eigenspaces.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<Operator>,
}

impl SpectralDecomposition {
    /// Rebuilds Σ_j ε_j P_j.
    pub fn reconstruct(&self) -> Operator {
        let mut out = Operator::zeros(self.projectors[0].dims().to_vec());
        for (ev, p) in self.eigenvalues.iter().zip(&self.projectors) {
            out = &out + &p.scale_re(*ev);
        }
        out
    }

    /// Rank of the j-th eigenspace.
    pub fn multiplicity(&self, j: usize) -> usize {
        self.projectors[j].trace().re.round() as usize
    }

    /// Applies a real function to the spectrum: Σ_j f(ε_j) P_j.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Operator {
        let mut out = Operator::zeros(self.projectors[0].dims().to_vec());
        for (ev, p) in self.eigenvalues.iter().zip(&self.projectors) {
            out = &out + &p.scale_re(f(*ev));
        }
        out
    }
}

/// Spectral decomposition of a Hermitian operator.
///
/// Eigenvalues within `degeneracy_tol` of their neighbour are merged into a
/// single eigenspace, so projectors may have rank above one. Eigenvector
/// phases never surface: only the projectors are exposed.
pub fn spectral_decompose(h: &Operator, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
    let violation = h.hermiticity_violation();
    if violation > TOL_HERM {
        return Err(Error::NonHermitianInput { violation });
    }
    let eig = h.hermitized().matrix().clone().symmetric_eigen();
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        // Chain-merge eigenvalues separated by at most the tolerance.
        while j + 1 < n
            && eig.eigenvalues[order[j + 1]] - eig.eigenvalues[order[j]] <= degeneracy_tol
        {
            j += 1;
        }
        let mut proj = DMatrix::<C64>::zeros(n, n);
        let mut mean = 0.0;
        for &k in &order[i..=j] {
            let v = eig.eigenvectors.column(k);
            proj += v * v.adjoint();
            mean += eig.eigenvalues[k];
        }
        mean /= (j - i + 1) as f64;
        eigenvalues.push(mean);
        projectors.push(Operator::new(h.dims().to_vec(), proj)?.hermitized());
        i = j + 1;
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
    })
}

/// Von Neumann entropy S(ρ) = -tr[ρ ln ρ] in nats.
///
/// Eigenvalues are clipped to [0, 1] and 0 ln 0 evaluates to 0.
pub fn von_neumann_entropy(rho: &DensityState) -> f64 {
    let mut s = 0.0;
    for ev in rho.eigenvalues() {
        let p = ev.clamp(0.0, 1.0);
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    s.max(0.0)
}

/// Shannon entropy of a probability vector, in nats, with 0 ln 0 = 0.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    let mut s = 0.0;
    for &p in probs {
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    s.max(0.0)
}

/// Structural checks an operator can be validated against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationKind {
    Hermitian,
    Unitary,
    Projector,
    State,
    PovmElement,
}

/// Outcome of [`validate`]: pass/fail plus the largest violation found.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub kind: ValidationKind,
    pub passed: bool,
    pub max_violation: f64,
}

/// Checks an operator against one structural property, reporting the maximum
/// violation magnitude instead of erroring.
pub fn validate(op: &Operator, kind: ValidationKind) -> ValidationReport {
    let herm = op.hermiticity_violation();
    let (passed, max_violation) = match kind {
        ValidationKind::Hermitian => (herm <= TOL_HERM, herm),
        ValidationKind::Unitary => {
            let v = op.unitarity_violation();
            (v <= TOL_UNITARY, v)
        }
        ValidationKind::Projector => {
            let idem = (op * op).matrix().clone() - op.matrix();
            let v = herm.max(idem.norm());
            (v <= TOL_HERM, v)
        }
        ValidationKind::State => {
            let tr = op.trace();
            let tr_v = ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt();
            let neg = if herm <= TOL_HERM {
                let min = op
                    .hermitized()
                    .matrix()
                    .clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                (-min).max(0.0)
            } else {
                f64::INFINITY
            };
            let v = herm.max(tr_v).max(neg.min(f64::MAX));
            (
                herm <= TOL_HERM && tr_v <= TOL_TRACE && neg <= TOL_PSD,
                v,
            )
        }
        ValidationKind::PovmElement => {
            if herm > TOL_HERM {
                (false, herm)
            } else {
                let eig = op.hermitized().matrix().clone().symmetric_eigen();
                let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = eig
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let v = herm.max((-min).max(0.0)).max((max - 1.0).max(0.0));
                (min >= -TOL_PSD && max <= 1.0 + TOL_PSD, v)
            }
        }
    };
    ValidationReport {
        kind,
        passed,
        max_violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    pub(crate) fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_hermitian(rng: &mut ChaCha12Rng, dim: usize) -> Operator {
        let a = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        Operator::new(vec![dim], (&a + a.adjoint()) * c(0.5, 0.0)).unwrap()
    }

    pub(crate) fn random_state(rng: &mut ChaCha12Rng, dim: usize) -> DensityState {
        let g = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let w = &g * g.adjoint();
        let tr = w.diagonal().sum().re;
        DensityState::from_matrix(vec![dim], w / c(tr, 0.0)).unwrap()
    }

    fn sigma_x() -> Operator {
        Operator::from_rows(
            vec![2],
            &[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
        )
        .unwrap()
    }

    fn sigma_z() -> Operator {
        Operator::from_diagonal(vec![2], &[1.0, -1.0]).unwrap()
    }

    #[test]
    fn spectral_diagonal_input() {
        let h = Operator::from_diagonal(vec![2], &[-0.5, 0.5]).unwrap();
        let sd = spectral_decompose(&h, DEGENERACY_TOL).unwrap();
        assert_eq!(sd.eigenvalues.len(), 2);
        assert!((sd.eigenvalues[0] + 0.5).abs() < 1e-14);
        assert!((sd.eigenvalues[1] - 0.5).abs() < 1e-14);
        let p0 = Operator::basis_projector(vec![2], 0);
        let p1 = Operator::basis_projector(vec![2], 1);
        assert!((&sd.projectors[0] - &p0).frobenius_norm() < 1e-12);
        assert!((&sd.projectors[1] - &p1).frobenius_norm() < 1e-12);
    }

    #[test]
    fn spectral_full_degeneracy() {
        let h = Operator::identity(vec![2]);
        let sd = spectral_decompose(&h, DEGENERACY_TOL).unwrap();
        assert_eq!(sd.eigenvalues.len(), 1);
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((&sd.projectors[0] - &Operator::identity(vec![2])).frobenius_norm() < 1e-12);
    }

    #[test]
    fn spectral_sigma_x_half() {
        // Closed-form 2x2 eigensolve: eigenvectors (|g⟩ ∓ |e⟩)/√2.
        let h = sigma_x().scale_re(0.5);
        let sd = spectral_decompose(&h, DEGENERACY_TOL).unwrap();
        assert!((sd.eigenvalues[0] + 0.5).abs() < 1e-12);
        assert!((sd.eigenvalues[1] - 0.5).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = [c(s, 0.0), c(-s, 0.0)];
        let plus = [c(s, 0.0), c(s, 0.0)];
        let p_minus = Operator::ket_bra(vec![2], &minus, &minus).unwrap();
        let p_plus = Operator::ket_bra(vec![2], &plus, &plus).unwrap();
        assert!((&sd.projectors[0] - &p_minus).frobenius_norm() < 1e-10);
        assert!((&sd.projectors[1] - &p_plus).frobenius_norm() < 1e-10);
    }

    #[test]
    fn spectral_rejects_non_hermitian() {
        let a = Operator::from_rows(
            vec![2],
            &[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]],
        )
        .unwrap();
        assert!(matches!(
            spectral_decompose(&a, DEGENERACY_TOL),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn spectral_reconstruction_random() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..40 {
            let dim = rng.random_range(2..=8);
            let h = random_hermitian(&mut rng, dim);
            let sd = spectral_decompose(&h, DEGENERACY_TOL).unwrap();
            assert!((&sd.reconstruct() - &h).frobenius_norm() < 1e-10);
            // Projector structure: idempotent, mutually orthogonal, complete.
            let mut sum = Operator::zeros(vec![dim]);
            for (i, p) in sd.projectors.iter().enumerate() {
                assert!(((p * p).matrix() - p.matrix()).norm() < 1e-10);
                for q in &sd.projectors[i + 1..] {
                    assert!((p * q).frobenius_norm() < 1e-10);
                }
                sum = &sum + p;
            }
            assert!((&sum - &Operator::identity(vec![dim])).frobenius_norm() < 1e-10);
            for w in sd.eigenvalues.windows(2) {
                assert!(w[1] > w[0]);
            }
        }
    }

    #[test]
    fn tensor_identities() {
        let i2 = Operator::identity(vec![2]);
        let i3 = Operator::identity(vec![3]);
        let t = i2.tensor(&i3);
        assert_eq!(t.dims(), &[2, 3]);
        assert!((&t - &Operator::identity(vec![2, 3]).regrouped(vec![2, 3]).unwrap())
            .frobenius_norm()
            .abs()
            < 1e-15);

        let g = Operator::basis_projector(vec![2], 0);
        let e = Operator::basis_projector(vec![2], 1);
        let ge = g.tensor(&e);
        // Rank-1 projector on basis index (0,1) of the 4-dim space.
        assert!((&ge - &Operator::basis_projector(vec![2, 2], 1)).frobenius_norm() < 1e-15);

        let zz = sigma_z().tensor(&sigma_z());
        let expect = Operator::from_diagonal(vec![2, 2], &[1.0, -1.0, -1.0, 1.0]).unwrap();
        assert!((&zz - &expect).frobenius_norm() < 1e-15);
    }

    #[test]
    fn partial_trace_product_state() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let rho = random_state(&mut rng, 2);
        let xi = random_state(&mut rng, 3);
        let joint = rho.operator().tensor(xi.operator());
        let back = joint.partial_trace(&[0]).unwrap();
        assert!((&back - rho.operator()).frobenius_norm() < 1e-12);
        let other = joint.partial_trace(&[1]).unwrap();
        assert!((&other - xi.operator()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_maximally_entangled() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let rho = Operator::ket_bra(vec![2, 2], &bell, &bell).unwrap();
        for keep in [&[0usize][..], &[1usize][..]] {
            let red = rho.partial_trace(keep).unwrap();
            let half = Operator::identity(vec![2]).scale_re(0.5);
            assert!((&red - &half).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_is_linear() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_hermitian(&mut rng, 6).regrouped(vec![2, 3]).unwrap();
            let b = random_hermitian(&mut rng, 6).regrouped(vec![2, 3]).unwrap();
            let alpha = rng.random::<f64>();
            let beta = rng.random::<f64>() - 0.5;
            let lhs = (&a.scale_re(alpha) + &b.scale_re(beta))
                .partial_trace(&[1])
                .unwrap();
            let rhs = &a.partial_trace(&[1]).unwrap().scale_re(alpha)
                + &b.partial_trace(&[1]).unwrap().scale_re(beta);
            assert!((&lhs - &rhs).frobenius_norm() < 1e-12);
            let pt = a.partial_trace(&[0]).unwrap();
            assert!((pt.trace() - a.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_bad_index() {
        let a = Operator::identity(vec![2, 2]);
        assert!(matches!(
            a.partial_trace(&[2]),
            Err(Error::BadSubsystemIndex { .. })
        ));
        assert!(matches!(
            a.partial_trace(&[]),
            Err(Error::BadSubsystemIndex { .. })
        ));
    }

    #[test]
    fn entropy_values() {
        let pure = DensityState::basis_state(vec![2], 0).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);

        let mixed = DensityState::maximally_mixed(vec![2]);
        assert!((von_neumann_entropy(&mixed) - 2f64.ln()).abs() < 1e-12);

        let q = 0.3;
        let rho = DensityState::new(Operator::from_diagonal(vec![2], &[q, 1.0 - q]).unwrap())
            .unwrap();
        let expected = -q * q.ln() - (1.0 - q) * (1.0 - q).ln();
        assert!((von_neumann_entropy(&rho) - expected).abs() < 1e-12);
        assert!((von_neumann_entropy(&rho) - 0.610864).abs() < 1e-6);
    }

    #[test]
    fn entropy_additivity_random() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..20 {
            let da = rng.random_range(2..=4);
            let db = rng.random_range(2..=4);
            let a = random_state(&mut rng, da);
            let b = random_state(&mut rng, db);
            let joint = a.tensor(&b);
            assert!(
                (von_neumann_entropy(&joint)
                    - von_neumann_entropy(&a)
                    - von_neumann_entropy(&b))
                .abs()
                    < 1e-10
            );
        }
    }

    #[test]
    fn entropy_orthogonal_mixture() {
        // States with orthogonal supports: S(Σ p_x ϱ_x) = H(p) + Σ p_x S(ϱ_x).
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..10 {
            let block = 3usize;
            let a = random_state(&mut rng, block);
            let b = random_state(&mut rng, block);
            let p = 0.2 + 0.6 * rng.random::<f64>();
            let dim = 2 * block;
            let mut mat = DMatrix::<C64>::zeros(dim, dim);
            for i in 0..block {
                for j in 0..block {
                    mat[(i, j)] = a.matrix()[(i, j)] * c(p, 0.0);
                    mat[(block + i, block + j)] = b.matrix()[(i, j)] * c(1.0 - p, 0.0);
                }
            }
            let mix = DensityState::from_matrix(vec![dim], mat).unwrap();
            let expected = shannon_entropy(&[p, 1.0 - p])
                + p * von_neumann_entropy(&a)
                + (1.0 - p) * von_neumann_entropy(&b);
            assert!((von_neumann_entropy(&mix) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn validate_kinds() {
        let id = Operator::identity(vec![2]);
        for kind in [
            ValidationKind::Hermitian,
            ValidationKind::Unitary,
            ValidationKind::Projector,
            ValidationKind::PovmElement,
        ] {
            assert!(validate(&id, kind).passed, "{kind:?}");
        }
        assert!(!validate(&id, ValidationKind::State).passed);

        let z = sigma_z();
        assert!(validate(&z, ValidationKind::Hermitian).passed);
        assert!(validate(&z, ValidationKind::Unitary).passed);
        assert!(!validate(&z, ValidationKind::Projector).passed);
        assert!(!validate(&z, ValidationKind::State).passed);

        // 0.5 σ_x + 0.5 I has eigenvalues 0 and 1: a valid effect.
        let m = &sigma_x().scale_re(0.5) + &Operator::identity(vec![2]).scale_re(0.5);
        assert!(validate(&m, ValidationKind::PovmElement).passed);
        let too_big = Operator::identity(vec![2]).scale_re(1.5);
        assert!(!validate(&too_big, ValidationKind::PovmElement).passed);
    }

    #[test]
    fn density_state_clips_small_negatives() {
        let eps = 5e-10;
        let op = Operator::from_diagonal(vec![2], &[1.0 + eps, -eps]).unwrap();
        let rho = DensityState::new(op).unwrap();
        let ev = rho.eigenvalues();
        assert!(ev[0] >= 0.0);
        assert!((rho.operator().trace().re - 1.0).abs() < 1e-12);

        let bad = Operator::from_diagonal(vec![2], &[1.1, -0.1]).unwrap();
        assert!(DensityState::new(bad).is_err());
    }

    #[test]
    fn embed_matches_tensor_on_adjacent_factors() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let a = random_hermitian(&mut rng, 2);
        let full = [2usize, 3, 2];
        let lifted = a.embed(&full, &[2]).unwrap();
        let direct = Operator::identity(vec![2, 3]).tensor(&a);
        assert!((&lifted - &direct).frobenius_norm() < 1e-14);

        // Non-adjacent: acts on factors (0, 2) of [2, 3, 2].
        let u = random_hermitian(&mut rng, 4).regrouped(vec![2, 2]).unwrap();
        let lifted = u.embed(&full, &[0, 2]).unwrap();
        // Spot-check entries against index arithmetic.
        for (r0, r1, r2) in [(0, 1, 1), (1, 2, 0), (1, 0, 1)] {
            for (c0, c1, c2) in [(0, 1, 0), (1, 2, 1), (0, 0, 1)] {
                let row = r0 * 6 + r1 * 2 + r2;
                let col = c0 * 6 + c1 * 2 + c2;
                let expect = if r1 == c1 {
                    u.matrix()[(r0 * 2 + r2, c0 * 2 + c2)]
                } else {
                    C64::ZERO
                };
                assert!((lifted.matrix()[(row, col)] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let rho = random_state(&mut rng, 4);
        let root = rho.operator().sqrt_psd().unwrap();
        assert!(((&root * &root).matrix() - rho.matrix()).norm() < 1e-10);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            /// Partial trace of a diagonal operator is the plain marginal
            /// sum, checked against integer index arithmetic.
            #[test]
            fn diagonal_partial_trace_is_marginal(
                d0 in 2usize..4,
                d1 in 2usize..4,
                seed in any::<u64>(),
            ) {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let diag: Vec<f64> = (0..d0 * d1).map(|_| rng.random::<f64>()).collect();
                let op = Operator::from_diagonal(vec![d0, d1], &diag).unwrap();
                let kept = op.partial_trace(&[0]).unwrap();
                for i in 0..d0 {
                    let want: f64 = (0..d1).map(|j| diag[i * d1 + j]).sum();
                    prop_assert!((kept.matrix()[(i, i)].re - want).abs() < 1e-12);
                }
            }

            /// Tensor structure: dims concatenate and traces multiply.
            #[test]
            fn tensor_dims_and_trace(
                da in 2usize..5,
                db in 2usize..5,
                seed in any::<u64>(),
            ) {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let a = random_hermitian(&mut rng, da);
                let b = random_hermitian(&mut rng, db);
                let t = a.tensor(&b);
                prop_assert_eq!(t.dims(), &[da, db][..]);
                let want = a.trace() * b.trace();
                prop_assert!((t.trace() - want).norm() < 1e-10);
            }

            /// Entropy of a qubit diagonal state is the binary entropy and
            /// never exceeds ln 2.
            #[test]
            fn qubit_entropy_is_binary_entropy(p in 1e-6f64..1.0) {
                let p = p.min(1.0 - 1e-6);
                let rho = DensityState::new(
                    Operator::from_diagonal(vec![2], &[p, 1.0 - p]).unwrap(),
                )
                .unwrap();
                let expect = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
                prop_assert!((von_neumann_entropy(&rho) - expect).abs() < 1e-10);
                prop_assert!(von_neumann_entropy(&rho) <= 2f64.ln() + 1e-12);
            }
        }
    }
}
