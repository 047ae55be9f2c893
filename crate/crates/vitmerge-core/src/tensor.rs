//! Dense row-major tensors and the forward kernels used by the backbone
//! and the agent networks.
//!
//! Kernels are pure: identical inputs produce bitwise-identical outputs.
//! Reductions (sums, means, norms, statistics) accumulate in 64-bit;
//! `matmul` accumulates in the element type with a fixed loop order so the
//! hot path stays vectorizable.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{self, Real};

/// Dense tensor with a row-major data layout. Element type defaults to
/// `f32`; the `f64` instantiation exists for gradient checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<E: Real = f32> {
    shape: Vec<usize>,
    data: Vec<E>,
}

impl<E: Real> Tensor<E> {
    pub fn new(shape: Vec<usize>, data: Vec<E>) -> Result<Self> {
        let numel: usize = shape.iter().product();
        if numel != data.len() {
            return Err(Error::ShapeMismatch {
                context: "Tensor::new",
                left: shape,
                right: vec![data.len()],
            });
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let numel = shape.iter().product();
        Self { shape, data: vec![E::ZERO; numel] }
    }

    pub fn filled(shape: Vec<usize>, value: E) -> Self {
        let numel = shape.iter().product();
        Self { shape, data: vec![value; numel] }
    }

    pub fn scalar(value: E) -> Self {
        Self { shape: vec![1, 1], data: vec![value] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [E] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<E> {
        self.data
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    /// Rows of a 2-D tensor.
    pub fn rows(&self) -> usize {
        debug_assert_eq!(self.shape.len(), 2);
        self.shape[0]
    }

    /// Columns of a 2-D tensor.
    pub fn cols(&self) -> usize {
        debug_assert_eq!(self.shape.len(), 2);
        self.shape[1]
    }

    pub fn is_2d(&self) -> bool {
        self.shape.len() == 2
    }

    #[inline]
    pub fn at2(&self, i: usize, j: usize) -> E {
        self.data[i * self.shape[1] + j]
    }

    pub fn row(&self, i: usize) -> &[E] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn cast<F: Real>(&self) -> Tensor<F> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| F::from_f64(v.to_f64())).collect(),
        }
    }

    pub fn reshaped(mut self, shape: Vec<usize>) -> Result<Self> {
        let numel: usize = shape.iter().product();
        if numel != self.data.len() {
            return Err(Error::ShapeMismatch {
                context: "reshape",
                left: self.shape,
                right: shape,
            });
        }
        self.shape = shape;
        Ok(self)
    }

    pub fn scaled(&self, factor: E) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| v * factor).collect(),
        }
    }
}

fn check_2d<E: Real>(t: &Tensor<E>, context: &'static str) -> Result<()> {
    if !t.is_2d() {
        return Err(Error::ShapeMismatch {
            context,
            left: t.shape().to_vec(),
            right: vec![],
        });
    }
    Ok(())
}

/// `c[i][j] = Σ_t a[i][t]·b[t][j]`. Fixed i-t-j loop order; the inner loop
/// accumulates rows of `c` so it vectorizes over `j`.
pub fn matmul<E: Real>(a: &Tensor<E>, b: &Tensor<E>) -> Result<Tensor<E>> {
    check_2d(a, "matmul lhs")?;
    check_2d(b, "matmul rhs")?;
    let (m, k) = (a.rows(), a.cols());
    let (k2, n) = (b.rows(), b.cols());
    if k != k2 {
        return Err(Error::ShapeMismatch {
            context: "matmul",
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    let mut out = vec![E::ZERO; m * n];
    for i in 0..m {
        let arow = &a.data[i * k..(i + 1) * k];
        let crow = &mut out[i * n..(i + 1) * n];
        for (t, &av) in arow.iter().enumerate() {
            let brow = &b.data[t * n..(t + 1) * n];
            for (c, &bv) in crow.iter_mut().zip(brow) {
                *c = *c + av * bv;
            }
        }
    }
    Tensor::new(vec![m, n], out)
}

pub fn transpose<E: Real>(a: &Tensor<E>) -> Result<Tensor<E>> {
    check_2d(a, "transpose")?;
    let (m, n) = (a.rows(), a.cols());
    let mut out = vec![E::ZERO; m * n];
    for i in 0..m {
        for j in 0..n {
            out[j * m + i] = a.data[i * n + j];
        }
    }
    Tensor::new(vec![n, m], out)
}

pub fn add<E: Real>(a: &Tensor<E>, b: &Tensor<E>) -> Result<Tensor<E>> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            context: "add",
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    let data = a.data.iter().zip(&b.data).map(|(&x, &y)| x + y).collect();
    Ok(Tensor { shape: a.shape.clone(), data })
}

pub fn mul<E: Real>(a: &Tensor<E>, b: &Tensor<E>) -> Result<Tensor<E>> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            context: "mul",
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    let data = a.data.iter().zip(&b.data).map(|(&x, &y)| x * y).collect();
    Ok(Tensor { shape: a.shape.clone(), data })
}

/// Elementwise `a·x + b` with scalar constants.
pub fn affine<E: Real>(x: &Tensor<E>, a: E, b: E) -> Tensor<E> {
    Tensor {
        shape: x.shape.clone(),
        data: x.data.iter().map(|&v| a * v + b).collect(),
    }
}

/// Broadcast-add a `[1×n]` row to every row of a `[m×n]` matrix.
pub fn add_row<E: Real>(x: &Tensor<E>, row: &Tensor<E>) -> Result<Tensor<E>> {
    check_2d(x, "add_row lhs")?;
    check_2d(row, "add_row rhs")?;
    if row.rows() != 1 || row.cols() != x.cols() {
        return Err(Error::ShapeMismatch {
            context: "add_row",
            left: x.shape().to_vec(),
            right: row.shape().to_vec(),
        });
    }
    let n = x.cols();
    let mut data = x.data.clone();
    for r in data.chunks_mut(n) {
        for (v, &b) in r.iter_mut().zip(&row.data) {
            *v = *v + b;
        }
    }
    Ok(Tensor { shape: x.shape.clone(), data })
}

/// Per-row statistics used by layernorm: (mean, inverse std) with 64-bit
/// accumulation and population variance.
pub(crate) fn row_moments<E: Real>(row: &[E], eps: f64) -> (f64, f64) {
    let n = row.len() as f64;
    let mut sum = 0.0;
    for v in row {
        sum += v.to_f64();
    }
    let mean = sum / n;
    let mut var = 0.0;
    for v in row {
        let d = v.to_f64() - mean;
        var += d * d;
    }
    var /= n;
    (mean, 1.0 / (var + eps).sqrt())
}

/// Row-wise layer normalization followed by the affine `gamma`/`beta`.
pub fn layernorm<E: Real>(
    x: &Tensor<E>,
    gamma: &Tensor<E>,
    beta: &Tensor<E>,
    eps: f64,
) -> Result<Tensor<E>> {
    check_2d(x, "layernorm")?;
    let d = x.cols();
    if gamma.numel() != d || beta.numel() != d {
        return Err(Error::ShapeMismatch {
            context: "layernorm params",
            left: vec![d],
            right: vec![gamma.numel(), beta.numel()],
        });
    }
    if eps <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "layernorm eps must be positive, got {eps}"
        )));
    }
    let mut data = Vec::with_capacity(x.numel());
    for row in x.data.chunks(d) {
        let (mean, inv_std) = row_moments(row, eps);
        for j in 0..d {
            let xhat = E::from_f64((row[j].to_f64() - mean) * inv_std);
            data.push(gamma.data[j] * xhat + beta.data[j]);
        }
    }
    Ok(Tensor { shape: x.shape.clone(), data })
}

/// Row-wise softmax with max subtraction. Rows sum to one for any finite
/// input.
pub fn softmax_rows<E: Real>(x: &Tensor<E>) -> Result<Tensor<E>> {
    check_2d(x, "softmax_rows")?;
    let n = x.cols();
    if n == 0 {
        return Err(Error::EmptyInput("softmax_rows with zero columns"));
    }
    let mut data = Vec::with_capacity(x.numel());
    for row in x.data.chunks(n) {
        let mut maxv = row[0];
        for &v in &row[1..] {
            maxv = maxv.max(v);
        }
        let base = data.len();
        let mut sum = 0.0f64;
        for &v in row {
            let e = (v - maxv).exp();
            sum += e.to_f64();
            data.push(e);
        }
        let inv = E::from_f64(1.0 / sum);
        for v in &mut data[base..] {
            *v = *v * inv;
        }
    }
    Ok(Tensor { shape: x.shape.clone(), data })
}

/// Elementwise tanh-approximation GELU (constants in [`crate::num`]).
pub fn gelu<E: Real>(x: &Tensor<E>) -> Tensor<E> {
    Tensor {
        shape: x.shape.clone(),
        data: x.data.iter().map(|&v| num::gelu(v)).collect(),
    }
}

pub fn sigmoid<E: Real>(x: &Tensor<E>) -> Tensor<E> {
    Tensor {
        shape: x.shape.clone(),
        data: x.data.iter().map(|&v| num::sigmoid(v)).collect(),
    }
}

pub fn ln<E: Real>(x: &Tensor<E>) -> Tensor<E> {
    Tensor {
        shape: x.shape.clone(),
        data: x.data.iter().map(|&v| v.ln()).collect(),
    }
}

pub fn exp<E: Real>(x: &Tensor<E>) -> Tensor<E> {
    Tensor {
        shape: x.shape.clone(),
        data: x.data.iter().map(|&v| v.exp()).collect(),
    }
}

pub fn square<E: Real>(x: &Tensor<E>) -> Tensor<E> {
    Tensor {
        shape: x.shape.clone(),
        data: x.data.iter().map(|&v| v * v).collect(),
    }
}

pub fn clip<E: Real>(x: &Tensor<E>, lo: E, hi: E) -> Tensor<E> {
    Tensor {
        shape: x.shape.clone(),
        data: x.data.iter().map(|&v| v.max(lo).min(hi)).collect(),
    }
}

/// Sum of all elements, accumulated in 64-bit, returned as a `[1×1]` tensor.
pub fn sum_all<E: Real>(x: &Tensor<E>) -> Tensor<E> {
    let mut s = 0.0f64;
    for v in &x.data {
        s += v.to_f64();
    }
    Tensor::scalar(E::from_f64(s))
}

pub fn mean_all<E: Real>(x: &Tensor<E>) -> Tensor<E> {
    let mut s = 0.0f64;
    for v in &x.data {
        s += v.to_f64();
    }
    Tensor::scalar(E::from_f64(s / x.numel() as f64))
}

/// Column means of a 2-D tensor: `[N×d] → [1×d]`, 64-bit accumulation.
pub fn mean_axis0<E: Real>(x: &Tensor<E>) -> Result<Tensor<E>> {
    check_2d(x, "mean_axis0")?;
    let (m, n) = (x.rows(), x.cols());
    if m == 0 {
        return Err(Error::EmptyInput("mean_axis0 with zero rows"));
    }
    let mut acc = vec![0.0f64; n];
    for row in x.data.chunks(n) {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v.to_f64();
        }
    }
    let inv = 1.0 / m as f64;
    let data = acc.iter().map(|&a| E::from_f64(a * inv)).collect();
    Tensor::new(vec![1, n], data)
}

/// Rows `start..end` of a 2-D tensor.
pub fn slice_rows<E: Real>(x: &Tensor<E>, start: usize, end: usize) -> Result<Tensor<E>> {
    check_2d(x, "slice_rows")?;
    if start > end || end > x.rows() {
        return Err(Error::InvalidArgument(alloc::format!(
            "slice_rows {start}..{end} out of bounds for {} rows",
            x.rows()
        )));
    }
    let n = x.cols();
    let data = x.data[start * n..end * n].to_vec();
    Tensor::new(vec![end - start, n], data)
}

pub fn concat_rows<E: Real>(a: &Tensor<E>, b: &Tensor<E>) -> Result<Tensor<E>> {
    check_2d(a, "concat_rows lhs")?;
    check_2d(b, "concat_rows rhs")?;
    if a.cols() != b.cols() {
        return Err(Error::ShapeMismatch {
            context: "concat_rows",
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    let mut data = a.data.clone();
    data.extend_from_slice(&b.data);
    Tensor::new(vec![a.rows() + b.rows(), a.cols()], data)
}

/// Dot product of two equal-length slices with 64-bit accumulation.
pub fn dot_f64<E: Real>(a: &[E], b: &[E]) -> f64 {
    let mut s = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        s += x.to_f64() * y.to_f64();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    fn naive_matmul(a: &Tensor, b: &Tensor) -> Tensor {
        // independent triple-loop oracle in j-major order with f64 sums
        let (m, k, n) = (a.rows(), a.cols(), b.cols());
        let mut out = vec![0.0f32; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut s = 0.0f64;
                for t in 0..k {
                    s += a.at2(i, t) as f64 * b.at2(t, j) as f64;
                }
                out[i * n + j] = s as f32;
            }
        }
        Tensor::new(vec![m, n], out).unwrap()
    }

    fn rand_tensor(rng: &mut RngStream, m: usize, n: usize) -> Tensor {
        rng.fill_normal(vec![m, n], 0.0, 1.0).unwrap()
    }

    fn max_rel_err(a: &Tensor, b: &Tensor) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(&x, &y)| {
                let (x, y) = (x as f64, y as f64);
                (x - y).abs() / x.abs().max(y.abs()).max(1e-12)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn matmul_identity() {
        let eye = Tensor::new(vec![3, 3], vec![1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        let mut rng = RngStream::seed_from(3);
        let b = rand_tensor(&mut rng, 3, 4);
        assert_eq!(matmul(&eye, &b).unwrap(), b);
    }

    #[test]
    fn matmul_zeros() {
        let z = Tensor::zeros(vec![2, 3]);
        let mut rng = RngStream::seed_from(4);
        let b = rand_tensor(&mut rng, 3, 4);
        let c = matmul(&z, &b).unwrap();
        assert_eq!(c, Tensor::zeros(vec![2, 4]));
    }

    #[test]
    fn matmul_matches_triple_loop_oracle() {
        let mut rng = RngStream::seed_from(5);
        let a = rand_tensor(&mut rng, 3, 3);
        let b = rand_tensor(&mut rng, 3, 3);
        let c = matmul(&a, &b).unwrap();
        assert!(max_rel_err(&c, &naive_matmul(&a, &b)) < 1e-6);
    }

    #[test]
    fn matmul_shape_mismatch_errors() {
        let a = Tensor::zeros(vec![2, 3]);
        let b = Tensor::zeros(vec![4, 2]);
        assert!(matches!(matmul(&a, &b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn layernorm_constant_row_is_zero() {
        let x = Tensor::filled(vec![1, 8], 3.25f32);
        let g = Tensor::filled(vec![1, 8], 1.0);
        let b = Tensor::zeros(vec![1, 8]);
        let y = layernorm(&x, &g, &b, 1e-6).unwrap();
        for &v in y.data() {
            assert!(v.abs() < 1e-4);
        }
    }

    #[test]
    fn layernorm_zero_gamma_broadcasts_beta() {
        let mut rng = RngStream::seed_from(6);
        let x = rand_tensor(&mut rng, 2, 5);
        let g = Tensor::zeros(vec![1, 5]);
        let b = Tensor::new(vec![1, 5], vec![1., 2., 3., 4., 5.]).unwrap();
        let y = layernorm(&x, &g, &b, 1e-6).unwrap();
        for row in 0..2 {
            assert_eq!(y.row(row), b.data());
        }
    }

    #[test]
    fn layernorm_normalizes_moments() {
        let mut rng = RngStream::seed_from(7);
        let x = rand_tensor(&mut rng, 1, 64);
        let g = Tensor::filled(vec![1, 64], 1.0);
        let b = Tensor::zeros(vec![1, 64]);
        let y = layernorm(&x, &g, &b, 1e-6).unwrap();
        let mean: f64 = y.data().iter().map(|&v| v as f64).sum::<f64>() / 64.0;
        let var: f64 = y.data().iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / 64.0;
        assert!(mean.abs() < 1e-5);
        assert!((var - 1.0).abs() < 1e-4);
    }

    #[test]
    fn softmax_single_column_is_one() {
        let x = Tensor::new(vec![3, 1], vec![-4.0, 0.0, 9.0]).unwrap();
        let y = softmax_rows(&x).unwrap();
        assert_eq!(y.data(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn softmax_shift_invariant() {
        let x = Tensor::new(vec![1, 4], vec![0.1, -0.7, 2.0, 0.4]).unwrap();
        let shifted = affine(&x, 1.0, 123.5);
        let a = softmax_rows(&x).unwrap();
        let b = softmax_rows(&shifted).unwrap();
        for (&u, &v) in a.data().iter().zip(b.data()) {
            assert!((u - v).abs() < 1e-6);
        }
    }

    #[test]
    fn softmax_closed_form() {
        let x = Tensor::new(vec![1, 2], vec![0.0, core::f32::consts::LN_2]).unwrap();
        let y = softmax_rows(&x).unwrap();
        assert!((y.data()[0] - 1.0 / 3.0).abs() < 1e-6);
        assert!((y.data()[1] - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn kernels_are_pure() {
        let mut rng = RngStream::seed_from(8);
        let a = rand_tensor(&mut rng, 4, 4);
        let b = rand_tensor(&mut rng, 4, 4);
        assert_eq!(matmul(&a, &b).unwrap(), matmul(&a, &b).unwrap());
        assert_eq!(softmax_rows(&a).unwrap(), softmax_rows(&a).unwrap());
    }

    proptest! {
        #[test]
        fn softmax_rows_sum_to_one(rows in 1usize..5, cols in 1usize..9, seed in 0u64..1000) {
            let mut rng = RngStream::seed_from(seed);
            let x = rng.fill_normal(vec![rows, cols], 0.0, 5.0).unwrap();
            let y = softmax_rows(&x).unwrap();
            for r in 0..rows {
                let s: f64 = y.row(r).iter().map(|&v| v as f64).sum();
                prop_assert!((s - 1.0).abs() < 1e-6);
            }
        }

        #[test]
        fn matmul_associates_with_oracle(seed in 0u64..300) {
            let mut rng = RngStream::seed_from(seed);
            let m = 1 + (seed as usize % 8);
            let a = rand_tensor(&mut rng, m, 5);
            let b = rand_tensor(&mut rng, 5, 6);
            let c = rand_tensor(&mut rng, 6, 3);
            let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
            let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
            prop_assert!(max_rel_err(&left, &right) < 1e-5);
        }
    }
}
