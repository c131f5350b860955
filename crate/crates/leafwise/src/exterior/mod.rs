//! Pointwise multilinear algebra of alternating forms.
//!
//! A [`FormValue`] is the value of a degree-`k` form at one point of an
//! `m`-dimensional space: `C(m,k)` real coefficients indexed by strictly
//! increasing `k`-tuples in colex order. Values are immutable and all
//! operations are pure, so they can be evaluated from many threads.

pub mod multi_index;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use multi_index::{binomial, MultiIndex};
use multi_index::{mask_from_indices, masks_colex, rank_of_mask, shuffle_sign, MAX_DIM};

/// The value of an alternating `k`-form at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    dim: usize,
    degree: usize,
    /// Empty if and only if this value is a degree-overflow zero.
    coeffs: Vec<f64>,
}

impl FormValue {
    /// A form value from explicit coefficients in colex order.
    pub fn new(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::contract(format!(
                "dimension {dim} exceeds supported maximum {MAX_DIM}"
            )));
        }
        if degree > dim {
            return Err(Error::contract(format!(
                "degree {degree} exceeds dimension {dim}; use FormValue::overflow_zero"
            )));
        }
        let want = binomial(dim, degree);
        if coeffs.len() != want {
            return Err(Error::contract(format!(
                "coefficient vector has length {}, expected C({dim},{degree}) = {want}",
                coeffs.len()
            )));
        }
        Ok(FormValue { dim, degree, coeffs })
    }

    /// The zero form of a representable degree.
    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        Self::new(dim, degree, vec![0.0; binomial(dim, degree)])
    }

    /// The result of a wedge whose total degree exceeds the dimension:
    /// identically zero, carrying its nominal degree, flagged as overflow.
    pub fn overflow_zero(dim: usize, degree: usize) -> Self {
        debug_assert!(degree > dim);
        FormValue { dim, degree, coeffs: Vec::new() }
    }

    /// A degree-0 form (a scalar).
    pub fn scalar(dim: usize, value: f64) -> Self {
        FormValue { dim, degree: 0, coeffs: vec![value] }
    }

    /// The basis form `dx_{i0} ∧ dx_{i1} ∧ …` for distinct indices,
    /// with the sign of the permutation that sorts them.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= dim) {
            return Err(Error::contract(format!(
                "basis index out of range for dimension {dim}: {indices:?}"
            )));
        }
        let mut sign = 1.0;
        let mut sorted = indices.to_vec();
        // Insertion sort, counting swaps.
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::contract(format!("repeated basis index in {indices:?}")));
        }
        let mut v = Self::zero(dim, indices.len())?;
        let rank = rank_of_mask(mask_from_indices(&sorted));
        v.coeffs[rank] = sign;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero_by_overflow(&self) -> bool {
        self.degree > self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient on a strictly increasing index tuple.
    pub fn coeff(&self, indices: &[usize]) -> Result<f64> {
        let mi = MultiIndex::new(indices.to_vec())?;
        if mi.degree() != self.degree {
            return Err(Error::contract(format!(
                "index tuple {indices:?} has wrong degree for a {}-form",
                self.degree
            )));
        }
        if self.is_zero_by_overflow() {
            return Ok(0.0);
        }
        Ok(self.coeffs[mi.rank()])
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, factor: f64) -> FormValue {
        FormValue {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &FormValue) -> Result<FormValue> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::contract(format!(
                "cannot add a degree-{} form in dim {} to a degree-{} form in dim {}",
                self.degree, self.dim, other.degree, other.dim
            )));
        }
        Ok(FormValue {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &FormValue) -> Result<FormValue> {
        self.add(&other.scale(-1.0))
    }

    /// Wedge product. Degree overflow is not an error: it returns the
    /// flagged zero value of the nominal degree.
    pub fn wedge(&self, other: &FormValue) -> Result<FormValue> {
        if self.dim != other.dim {
            return Err(Error::contract(format!(
                "wedge of forms in different dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Ok(FormValue::overflow_zero(self.dim, degree));
        }
        if self.is_zero_by_overflow() || other.is_zero_by_overflow() {
            // Unreachable given the degree check above, but keep it total.
            return Ok(FormValue::overflow_zero(self.dim, degree));
        }
        let coeffs = wedge_coeffs(self.dim, self.degree, other.degree, &self.coeffs, &other.coeffs);
        FormValue::new(self.dim, degree, coeffs)
    }

    /// Full alternating evaluation on `degree` vectors of dimension `dim`:
    /// the sum over index tuples of coefficient × minor determinant.
    pub fn evaluate(&self, vectors: &[Vec<f64>]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::contract(format!(
                "a degree-{} form takes {} vectors, got {}",
                self.degree,
                self.degree,
                vectors.len()
            )));
        }
        for v in vectors {
            if v.len() != self.dim {
                return Err(Error::contract(format!(
                    "vector of length {} fed to a form in dimension {}",
                    v.len(),
                    self.dim
                )));
            }
        }
        if self.is_zero_by_overflow() {
            return Ok(0.0);
        }
        if self.degree == 0 {
            return Ok(self.coeffs[0]);
        }
        let k = self.degree;
        let mut total = 0.0;
        let mut minor = vec![0.0; k * k];
        for (rank, mask) in masks_colex(self.dim, k).iter().enumerate() {
            let c = self.coeffs[rank];
            if c == 0.0 {
                continue;
            }
            let rows = multi_index::indices_from_mask(*mask);
            for (col, v) in vectors.iter().enumerate() {
                for (r, &row) in rows.iter().enumerate() {
                    minor[r * k + col] = v[row];
                }
            }
            total += c * det_in_place(&mut minor, k);
        }
        Ok(total)
    }

    /// Pullback along a linear map `L: R^p → R^m` (this form lives in
    /// dimension `m`): `(L*a)(v₁..v_k) = a(Lv₁,..,Lv_k)`.
    pub fn pull_back_linear(&self, map: &LinearMap) -> Result<FormValue> {
        if map.rows() != self.dim {
            return Err(Error::contract(format!(
                "pullback of a form in dimension {} along a map into dimension {}",
                self.dim,
                map.rows()
            )));
        }
        let p = map.cols();
        if self.degree > p {
            return Ok(FormValue::overflow_zero(p, self.degree));
        }
        if self.is_zero_by_overflow() {
            return Ok(FormValue::overflow_zero(p, self.degree));
        }
        let coeffs = pullback_coeffs(self.dim, p, self.degree, map.entries(), &self.coeffs);
        FormValue::new(p, self.degree, coeffs)
    }
}

/// A linear map `R^cols → R^rows` stored row-major.
#[derive(Debug, Clone)]
pub struct LinearMap {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl LinearMap {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::contract(format!(
                "{rows}×{cols} map needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(LinearMap { rows, cols, entries })
    }

    /// Columns are the given vectors; the map sends `e_j` to `columns[j]`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        if cols == 0 {
            return Err(Error::contract("a linear map needs at least one column"));
        }
        let rows = columns[0].len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::contract("columns of unequal length"));
        }
        let mut entries = vec![0.0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                entries[i * cols + j] = v;
            }
        }
        Ok(LinearMap { rows, cols, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        LinearMap { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::contract(format!(
                "applying a {}×{} map to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entries[i * self.cols + j] * v[j]).sum())
            .collect())
    }
}

/// Wedge kernel over any scalar: signed shuffle sums of coefficient
/// products. `a` has degree `ka`, `b` degree `kb`, both in dimension `dim`.
pub(crate) fn wedge_coeffs<S: Scalar>(
    dim: usize,
    ka: usize,
    kb: usize,
    a: &[S],
    b: &[S],
) -> Vec<S> {
    let out_len = binomial(dim, ka + kb);
    let mut out = vec![S::zero(); out_len];
    let masks_a = masks_colex(dim, ka);
    let masks_b = masks_colex(dim, kb);
    for (ra, &ma) in masks_a.iter().enumerate() {
        for (rb, &mb) in masks_b.iter().enumerate() {
            if ma & mb != 0 {
                continue;
            }
            let sign = shuffle_sign(ma, mb);
            let r = rank_of_mask(ma | mb);
            let term = a[ra].clone() * b[rb].clone() * S::constant(sign);
            out[r] = out[r].clone() + term;
        }
    }
    out
}

/// Pullback kernel over any scalar: `(L*a)_J = Σ_I a_I det(L[I,J])` where
/// `jac` is the `m×p` Jacobian row-major and `J` runs over `k`-tuples of
/// columns.
pub(crate) fn pullback_coeffs<S: Scalar>(
    m: usize,
    p: usize,
    k: usize,
    jac: &[S],
    coeffs: &[S],
) -> Vec<S> {
    debug_assert_eq!(jac.len(), m * p);
    let masks_rows = masks_colex(m, k);
    let masks_cols = masks_colex(p, k);
    let mut out = vec![S::zero(); binomial(p, k)];
    if k == 0 {
        out[0] = coeffs[0].clone();
        return out;
    }
    let mut minor = vec![S::zero(); k * k];
    for (rj, &mj) in masks_cols.iter().enumerate() {
        let cols = multi_index::indices_from_mask(mj);
        let mut acc = S::zero();
        for (ri, &mi) in masks_rows.iter().enumerate() {
            let rows = multi_index::indices_from_mask(mi);
            for (a, &row) in rows.iter().enumerate() {
                for (b, &col) in cols.iter().enumerate() {
                    minor[a * k + b] = jac[row * p + col].clone();
                }
            }
            acc = acc + coeffs[ri].clone() * det_generic(&minor, k);
        }
        out[rj] = acc;
    }
    out
}

/// LU determinant with partial pivoting, destroying the buffer.
fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[pivot * n + col].abs() {
                pivot = r;
            }
        }
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
        }
    }
    det
}

/// Laplace-expansion determinant for small generic matrices (k ≤ 5 here).
fn det_generic<S: Scalar>(a: &[S], n: usize) -> S {
    match n {
        0 => S::one(),
        1 => a[0].clone(),
        2 => a[0].clone() * a[3].clone() - a[1].clone() * a[2].clone(),
        _ => {
            let mut acc = S::zero();
            let mut sub = vec![S::zero(); (n - 1) * (n - 1)];
            for col in 0..n {
                for r in 1..n {
                    let mut cc = 0;
                    for c in 0..n {
                        if c == col {
                            continue;
                        }
                        sub[(r - 1) * (n - 1) + cc] = a[r * n + c].clone();
                        cc += 1;
                    }
                }
                let term = a[col].clone() * det_generic(&sub, n - 1);
                acc = if col % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}
