use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, box_len)²` with `n` points per axis.
///
/// Layout is row-major with rows along `y`: sample `(ix, iy)` lives at
/// `iy * n + ix` and sits at `(ix h, iy h)`. Spectral arrays use the same
/// layout with integer wavenumbers `j ∈ [-n/2, n/2)`.
///
/// FFT normalization: forward transforms are unnormalized, inverse transforms
/// divide by `n²`.
#[derive(Clone)]
pub struct Grid2D {
    n: usize,
    box_len: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D").field("n", &self.n).field("box_len", &self.box_len).finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.box_len == other.box_len
    }
}

impl Grid2D {
    pub fn new(n: usize, box_len: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        if !(box_len > 0.0 && box_len.is_finite()) {
            return Err(Error::InvalidBox(box_len));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid2D { n, box_len, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }

    /// Grid on the standard `2π` box.
    pub fn periodic(n: usize) -> Result<Self> {
        Grid2D::new(n, 2.0 * PI)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.box_len / self.n as f64
    }

    pub fn area(&self) -> f64 {
        self.box_len * self.box_len
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing() * self.spacing()
    }

    /// `2π / box_len`.
    #[inline]
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.box_len
    }

    /// Signed integer wavenumber of array index `i`.
    #[inline]
    pub fn wave_index(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Array index of integer wavenumber `j` (taken modulo `n`).
    #[inline]
    pub fn index_of(&self, j: i64) -> usize {
        j.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn is_nyquist(&self, j: i64) -> bool {
        j == -(self.n as i64) / 2
    }

    /// Integer wavenumbers `(jx, jy)` of flat spectral index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        (self.wave_index(idx % self.n), self.wave_index(idx / self.n))
    }

    /// Physical wavenumber `(kx, ky)` of flat spectral index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (f64, f64) {
        let (jx, jy) = self.mode(idx);
        (self.k0() * jx as f64, self.k0() * jy as f64)
    }

    /// Wavevector used by first derivatives: zero on the Nyquist line of
    /// each axis so that odd derivatives map real fields to real fields and
    /// stay skew-adjoint.
    #[inline]
    pub fn derivative_wavevector(&self, idx: usize) -> (f64, f64) {
        let (jx, jy) = self.mode(idx);
        let kx = if self.is_nyquist(jx) { 0.0 } else { self.k0() * jx as f64 };
        let ky = if self.is_nyquist(jy) { 0.0 } else { self.k0() * jy as f64 };
        (kx, ky)
    }

    #[inline]
    pub fn k_abs(&self, idx: usize) -> f64 {
        let (kx, ky) = self.wavevector(idx);
        kx.hypot(ky)
    }

    /// Largest `|k|` on the lattice.
    pub fn k_abs_max(&self) -> f64 {
        self.k0() * (self.n as f64 / 2.0) * std::f64::consts::SQRT_2
    }

    /// Physical coordinates of sample `idx`.
    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        plan.process(data);
        transpose(data, n);
        plan.process(data);
        transpose(data, n);
    }

    /// Unnormalized forward transform of a real field.
    pub fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(real.len(), self.len());
        let mut buf: Vec<Complex64> = real.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, false);
        buf
    }

    /// Forward transforms of two real fields with one complex FFT.
    pub fn forward_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.transform(&mut z, false);
        let n = self.n;
        let mut fa = vec![Complex64::default(); z.len()];
        let mut fb = vec![Complex64::default(); z.len()];
        for iy in 0..n {
            let my = (n - iy) % n;
            for ix in 0..n {
                let mx = (n - ix) % n;
                let zk = z[iy * n + ix];
                let zm = z[my * n + mx].conj();
                fa[iy * n + ix] = (zk + zm) * 0.5;
                fb[iy * n + ix] = (zk - zm) * Complex64::new(0.0, -0.5);
            }
        }
        (fa, fb)
    }

    /// Inverse transform, keeping the real part; divides by `n²`.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut buf = spec.to_vec();
        self.transform(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Inverse transforms of two Hermitian spectra with one complex FFT.
    pub fn inverse_pair(&self, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::new(0.0, 1.0);
        let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| x + i * y).collect();
        self.transform(&mut z, true);
        let scale = 1.0 / self.len() as f64;
        (z.iter().map(|c| c.re * scale).collect(), z.iter().map(|c| c.im * scale).collect())
    }

    /// Inverse transforms of any number of Hermitian spectra, pairing them.
    pub fn inverse_many(&self, specs: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(specs.len());
        let mut chunks = specs.chunks_exact(2);
        for pair in &mut chunks {
            let (a, b) = self.inverse_pair(pair[0], pair[1]);
            out.push(a);
            out.push(b);
        }
        if let [last] = chunks.remainder() {
            out.push(self.inverse(last));
        }
        out
    }

    /// Forward transforms of any number of real fields, pairing them.
    pub fn forward_many(&self, reals: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(reals.len());
        let mut chunks = reals.chunks_exact(2);
        for pair in &mut chunks {
            let (a, b) = self.forward_pair(pair[0], pair[1]);
            out.push(a);
            out.push(b);
        }
        if let [last] = chunks.remainder() {
            out.push(self.forward(last));
        }
        out
    }

    pub(crate) fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "n = {}, L = {} vs n = {}, L = {}",
                self.n, self.box_len, other.n, other.box_len
            )));
        }
        Ok(())
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
