//! Dense complex linear algebra used by the rest of the crate.
//!
//! Operators are square, stored row-major. Composite indices follow the
//! `i * dim(b) + k` convention, so `|i>|k>` on `C^n ⊗ C^m` sits at index
//! `i * m + k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest operator dimension any constructor will produce.
pub const DIM_CAP: usize = 4096;

/// Threshold under which eigenvalues count as zero in [`sign_unitarize`].
pub const ZERO_TOL: f64 = 1e-10;

/// Allowed deviation from unit norm for [`StateVector`].
pub const STATE_NORM_TOL: f64 = 1e-12;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator { dim, data: vec![C64::default(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { r(1.0) } else { C64::default() })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Operator { dim, data }
    }

    /// Builds an operator from row-major entries, rejecting non-square or
    /// non-finite input.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("operator dimension must be positive".into()));
        }
        if dim > DIM_CAP {
            return Err(Error::DimensionLimit { dim, cap: DIM_CAP });
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator entries must be finite".into()));
        }
        Ok(Operator { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| r(rows[i][j]))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { r(values[i]) } else { C64::default() })
    }

    /// `|v><w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        assert_eq!(v.len(), w.len(), "outer product of mismatched vectors");
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    /// `|v><v|`
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    /// `|k><k|` on `C^dim`.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == k && j == k { r(1.0) } else { C64::default() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Operator { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(r(s))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance `max |a_ij - b_ij|`.
    pub fn dist(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint() * self).dist(&Operator::identity(self.dim))
    }

    pub fn powi(&self, k: usize) -> Self {
        let mut out = Operator::identity(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "operator/vector dimension mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Expectation `<v|self|v>`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        inner(v, &self.apply(v))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for Operator {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator product dimension mismatch");
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::default() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator sum dimension mismatch");
        Operator { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator difference dimension mismatch");
        Operator { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

pub mod pauli {
    use super::{c, r, Operator};

    pub fn x() -> Operator {
        Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> Operator {
        Operator::from_fn(2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => r(0.0),
        })
    }

    pub fn z() -> Operator {
        Operator::diag(&[1.0, -1.0])
    }
}

/// Unit-norm pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state vector must be nonempty".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("state amplitudes must be finite".into()));
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::Normalization { what: "state norm", deviation: (n - 1.0).abs() });
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Normalization { what: "state norm", deviation: 1.0 });
        }
        Self::new(amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![C64::default(); dim];
        amplitudes[k] = r(1.0);
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }
}

pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    assert_eq!(v.len(), w.len(), "inner product of mismatched vectors");
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean distance `||v - w||`.
pub fn distance(v: &[C64], w: &[C64]) -> f64 {
    assert_eq!(v.len(), w.len(), "distance between mismatched vectors");
    v.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale_vec(v: &[C64], s: C64) -> Vec<C64> {
    v.iter().map(|z| z * s).collect()
}

pub fn kron_vec(v: &[C64], w: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(v.len() * w.len());
    for a in v {
        for b in w {
            out.push(a * b);
        }
    }
    out
}

/// Tensor product `a ⊗ b`.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let (n, m) = (a.dim, b.dim);
    let dim = n.checked_mul(m).ok_or(Error::DimensionLimit { dim: usize::MAX, cap: DIM_CAP })?;
    if dim > DIM_CAP {
        return Err(Error::DimensionLimit { dim, cap: DIM_CAP });
    }
    Ok(Operator::from_fn(dim, |row, col| {
        let (i, k) = (row / m, row % m);
        let (j, l) = (col / m, col % m);
        a[(i, j)] * b[(k, l)]
    }))
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[Operator]) -> Result<Operator> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("direct sum of an empty sequence".into()));
    }
    let dim: usize = blocks.iter().map(Operator::dim).sum();
    if dim > DIM_CAP {
        return Err(Error::DimensionLimit { dim, cap: DIM_CAP });
    }
    let mut out = Operator::zeros(dim);
    let mut offset = 0;
    for b in blocks {
        for i in 0..b.dim {
            for j in 0..b.dim {
                out[(offset + i, offset + j)] = b[(i, j)];
            }
        }
        offset += b.dim;
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Operator,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V f(Λ) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Operator {
        let n = self.values.len();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        Operator::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * weights[k]).sum()
        })
    }
}

pub fn hermitian_eig(h: &Operator, tol: f64) -> Result<HermitianEig> {
    let deviation = h.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::Hermiticity { deviation, tol });
    }
    let n = h.dim();
    // Exactly Hermitian copy, so round-off asymmetry cannot bias the solver.
    let sym = Operator::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(sym.to_nalgebra());

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let raw = Operator::from_nalgebra(&eig.eigenvectors);
    let mut vectors = Operator::zeros(n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let v = raw.column(k);
        let phase = v
            .iter()
            .find(|z| z.norm() > 1e-12)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(r(1.0));
        for (i, z) in v.iter().enumerate() {
            vectors[(i, col)] = z * phase;
        }
    }
    Ok(HermitianEig { values, vectors })
}

/// Hermitian unitary with the eigenvectors of `h` and eigenvalues replaced by
/// their signs; eigenvalues within `zero_tol` of zero become `+1`.
pub fn sign_unitarize(h: &Operator, zero_tol: f64) -> Result<Operator> {
    let eig = hermitian_eig(h, zero_tol)?;
    Ok(eig.map_spectrum(|l| if l < -zero_tol { -1.0 } else { 1.0 }))
}

/// Reduced density operator on the `keep` factors of a state on `⊗ C^dims[i]`.
/// Kept factors appear in ascending order.
pub fn partial_trace(state: &StateVector, dims: &[usize], keep: &[usize]) -> Result<Operator> {
    partial_trace_raw(state.amplitudes(), dims, keep)
}

pub(crate) fn partial_trace_raw(amps: &[C64], dims: &[usize], keep: &[usize]) -> Result<Operator> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument("factor dimensions must be positive".into()));
    }
    let total: usize = dims.iter().product();
    if total != amps.len() {
        return Err(Error::InvalidArgument(format!(
            "factor dimensions multiply to {total}, state has dimension {}",
            amps.len()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidArgument("kept factor index out of range".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let kdim: usize = kept.iter().map(|&k| dims[k]).product();
    let tdim: usize = traced.iter().map(|&k| dims[k]).product();
    if kdim > DIM_CAP {
        return Err(Error::DimensionLimit { dim: kdim, cap: DIM_CAP });
    }

    let strides = strides(dims);
    let offsets = |axes: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &ax in axes.iter().rev() {
                    off += (idx % dims[ax]) * strides[ax];
                    idx /= dims[ax];
                }
                off
            })
            .collect()
    };
    let koff = offsets(&kept, kdim);
    let toff = offsets(&traced, tdim);

    // Matrix M[k][t] = amplitude at (kept k, traced t); rho = M M^dagger.
    let m: Vec<C64> = koff.iter().flat_map(|&ko| toff.iter().map(move |&to| amps[ko + to])).collect();
    let mut rho = Operator::zeros(kdim);
    for i in 0..kdim {
        let ri = &m[i * tdim..(i + 1) * tdim];
        for j in i..kdim {
            let rj = &m[j * tdim..(j + 1) * tdim];
            let z: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
            rho[(i, j)] = z;
            rho[(j, i)] = z.conj();
        }
    }
    Ok(rho)
}

/// `<target|rho|target>` clamped to `[0, 1]`.
pub fn pure_fidelity(rho: &Operator, target: &StateVector) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::InvalidArgument(format!(
            "density dimension {} does not match target dimension {}",
            rho.dim(),
            target.dim()
        )));
    }
    let tr = rho.trace();
    let deviation = (tr - r(1.0)).norm();
    if deviation > 1e-8 {
        return Err(Error::Normalization { what: "density trace", deviation });
    }
    Ok(rho.expectation(target.amplitudes()).re.clamp(0.0, 1.0))
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Applies `op` to tensor factor `axis` of a vector on `⊗ C^dims[i]`, in place.
pub fn apply_on_axis(v: &mut [C64], dims: &[usize], axis: usize, op: &Operator) {
    apply_controlled(v, dims, axis, None, |_| op);
}

/// Applies `ops(k)` to factor `target` on the slice where factor `control`
/// holds basis value `k`. With no control the same operator is used throughout.
pub fn apply_controlled<'a>(
    v: &mut [C64],
    dims: &[usize],
    target: usize,
    control: Option<usize>,
    ops: impl Fn(usize) -> &'a Operator,
) {
    let total: usize = dims.iter().product();
    assert_eq!(total, v.len(), "tensor dimensions do not match vector");
    let strides = strides(dims);
    let n = dims[target];
    let stride = strides[target];
    let mut fiber = vec![C64::default(); n];
    for base in 0..total {
        if !(base / stride).is_multiple_of(n) {
            continue;
        }
        let k = control.map_or(0, |ax| (base / strides[ax]) % dims[ax]);
        let op = ops(k);
        assert_eq!(op.dim(), n, "operator does not match tensor factor");
        for (i, f) in fiber.iter_mut().enumerate() {
            *f = v[base + i * stride];
        }
        for i in 0..n {
            v[base + i * stride] = op.row(i).iter().zip(&fiber).map(|(a, b)| a * b).sum();
        }
    }
}
