//! Real fields sampled on a [`Grid2D`] and their spectral counterparts.
//!
//! A field is `C` real rasters: scalars (`C = 1`), planar vectors (`C = 2`)
//! and Q-tensors in five-component storage (`C = 5`). Norms of tensor fields
//! use the Frobenius norm of the reconstructed 3x3 matrix.

use num_complex::Complex64;

use super::grid::Grid2D;
use crate::error::Result;
use crate::tensor::QTensor;

#[derive(Clone, Debug)]
pub struct Field<const C: usize> {
    grid: Grid2D,
    comps: [Vec<f64>; C],
}

pub type ScalarField = Field<1>;
pub type VectorField = Field<2>;
pub type QTensorField = Field<5>;

#[derive(Clone, Debug)]
pub struct SpectralField<const C: usize> {
    grid: Grid2D,
    comps: [Vec<Complex64>; C],
}

/// Squared pointwise magnitude of a set of component values: Euclidean for
/// scalars and vectors, `tr(Q²)` for five-component tensors.
#[inline]
pub(crate) fn magnitude_sq<const C: usize>(v: &[f64; C]) -> f64 {
    if C == 5 {
        let q33 = -v[0] - v[3];
        v[0] * v[0] + v[3] * v[3] + q33 * q33 + 2.0 * (v[1] * v[1] + v[2] * v[2] + v[4] * v[4])
    } else {
        v.iter().map(|x| x * x).sum()
    }
}

/// Spectral analogue of [`magnitude_sq`] for one Fourier mode.
#[inline]
pub(crate) fn mode_energy<const C: usize>(v: &[Complex64; C]) -> f64 {
    if C == 5 {
        v[0].norm_sqr()
            + v[3].norm_sqr()
            + (v[0] + v[3]).norm_sqr()
            + 2.0 * (v[1].norm_sqr() + v[2].norm_sqr() + v[4].norm_sqr())
    } else {
        v.iter().map(|x| x.norm_sqr()).sum()
    }
}

impl<const C: usize> Field<C> {
    pub fn zeros(grid: &Grid2D) -> Self {
        Field { grid: grid.clone(), comps: std::array::from_fn(|_| vec![0.0; grid.len()]) }
    }

    pub fn from_components(grid: &Grid2D, comps: [Vec<f64>; C]) -> Self {
        for c in &comps {
            assert_eq!(c.len(), grid.len(), "component length does not match the grid");
        }
        Field { grid: grid.clone(), comps }
    }

    /// Samples `f(x, y)` at every grid node.
    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> [f64; C]) -> Self {
        let mut out = Field::zeros(grid);
        for idx in 0..grid.len() {
            let (x, y) = grid.coords(idx);
            let v = f(x, y);
            for c in 0..C {
                out.comps[c][idx] = v[c];
            }
        }
        out
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<f64>; C] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<f64>; C] {
        self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; C] {
        std::array::from_fn(|c| self.comps[c][idx])
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().flatten().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Field { grid: self.grid.clone(), comps: std::array::from_fn(|c| self.comps[c].iter().map(|&v| f(v)).collect()) }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid.clone(),
            comps: std::array::from_fn(|c| {
                self.comps[c].iter().zip(&other.comps[c]).map(|(&a, &b)| f(a, b)).collect()
            }),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise magnitude (Frobenius for tensors).
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| magnitude_sq(&self.at(i)).sqrt()).collect()
    }

    /// `∫ ⟨f, g⟩ dx` as a lattice sum times the cell area.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for idx in 0..self.grid.len() {
            let a = self.at(idx);
            let b = other.at(idx);
            s += if C == 5 {
                QTensor::from_components(std::array::from_fn(|c| a[c]))
                    .dot(&QTensor::from_components(std::array::from_fn(|c| b[c])))
            } else {
                a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>()
            };
        }
        s * self.grid.cell_area()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        (0..self.grid.len()).map(|i| magnitude_sq(&self.at(i))).sum::<f64>() * self.grid.cell_area()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `L^p` norm of the pointwise magnitude; `p = ∞` gives the maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let mags = self.magnitude();
        if p.is_infinite() {
            return mags.iter().fold(0.0, |m, &v| m.max(v));
        }
        (mags.iter().map(|v| v.powf(p)).sum::<f64>() * self.grid.cell_area()).powf(1.0 / p)
    }

    pub fn linf_norm(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }

    /// Lattice mean of each component.
    pub fn mean(&self) -> [f64; C] {
        std::array::from_fn(|c| self.comps[c].iter().sum::<f64>() / self.grid.len() as f64)
    }

    pub fn to_spectral(&self) -> SpectralField<C> {
        let refs: Vec<&[f64]> = self.comps.iter().map(|v| v.as_slice()).collect();
        let mut specs = self.grid.forward_many(&refs).into_iter();
        SpectralField { grid: self.grid.clone(), comps: std::array::from_fn(|_| specs.next().unwrap()) }
    }
}

impl Field<5> {
    #[inline]
    pub fn tensor_at(&self, idx: usize) -> QTensor {
        QTensor::from_components(self.at(idx))
    }

    pub fn from_tensor_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> QTensor) -> Self {
        Field::from_fn(grid, |x, y| f(x, y).components())
    }

    /// Pointwise `tr(Q²)`.
    pub fn tr_q2(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| magnitude_sq(&self.at(i))).collect()
    }
}

impl<const C: usize> SpectralField<C> {
    pub fn zeros(grid: &Grid2D) -> Self {
        SpectralField {
            grid: grid.clone(),
            comps: std::array::from_fn(|_| vec![Complex64::default(); grid.len()]),
        }
    }

    pub fn from_components(grid: &Grid2D, comps: [Vec<Complex64>; C]) -> Self {
        SpectralField { grid: grid.clone(), comps }
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; C] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; C] {
        self.comps
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> [Complex64; C] {
        std::array::from_fn(|c| self.comps[c][idx])
    }

    pub fn to_physical(&self) -> Field<C> {
        let refs: Vec<&[Complex64]> = self.comps.iter().map(|v| v.as_slice()).collect();
        let mut vals = self.grid.inverse_many(&refs).into_iter();
        Field { grid: self.grid.clone(), comps: std::array::from_fn(|_| vals.next().unwrap()) }
    }

    /// Multiplies every mode by `m(idx)`.
    pub fn apply_multiplier(&mut self, m: impl Fn(usize) -> Complex64) {
        for idx in 0..self.grid.len() {
            let f = m(idx);
            for c in 0..C {
                self.comps[c][idx] *= f;
            }
        }
    }

    /// Multiplies every mode by the real factor `m(idx)`.
    pub fn apply_real_multiplier(&mut self, m: impl Fn(usize) -> f64) {
        for idx in 0..self.grid.len() {
            let f = m(idx);
            for c in 0..C {
                self.comps[c][idx] *= f;
            }
        }
    }

    /// `Σ_k w(k) |f̂(k)|²` scaled so that `w ≡ 1` gives `‖f‖²_{L²}`.
    pub fn weighted_energy(&self, w: impl Fn(usize) -> f64) -> f64 {
        let n4 = (self.grid.len() * self.grid.len()) as f64;
        let mut s = 0.0;
        for idx in 0..self.grid.len() {
            let e = mode_energy(&self.mode(idx));
            if e != 0.0 {
                s += w(idx) * e;
            }
        }
        s * self.grid.area() / n4
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.weighted_energy(|_| 1.0)
    }

    pub fn add_assign(&mut self, other: &Self) {
        for c in 0..C {
            for (a, b) in self.comps[c].iter_mut().zip(&other.comps[c]) {
                *a += b;
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.apply_real_multiplier(|_| s);
        out
    }

    /// Largest `|f̂(k)|` over modes where `select(idx)` holds.
    pub fn max_mode_where(&self, select: impl Fn(usize) -> bool) -> f64 {
        let mut m: f64 = 0.0;
        for idx in 0..self.grid.len() {
            if select(idx) {
                m = m.max(mode_energy(&self.mode(idx)).sqrt());
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn frobenius_norm_of_tensor_field() {
        let g = Grid2D::periodic(16).unwrap();
        let q = QTensorField::from_tensor_fn(&g, |_, _| QTensor::diag(1.0, 1.0));
        // tr(Q²) = 6 everywhere
        assert!((q.l2_norm_sq() - 6.0 * 4.0 * PI * PI).abs() < 1e-10);
        assert!((q.to_spectral().l2_norm_sq() - q.l2_norm_sq()).abs() < 1e-9);
        assert!((q.linf_norm() - 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn parseval_for_vectors() {
        let g = Grid2D::new(32, 5.0).unwrap();
        let v = VectorField::from_fn(&g, |x, y| [(x * 1.3).sin() + y.cos(), (x + 2.0 * y).cos() * 0.5]);
        let phys = v.l2_norm_sq();
        let spec = v.to_spectral().l2_norm_sq();
        assert!((phys - spec).abs() < 1e-12 * phys);
        let back = v.to_spectral().to_physical();
        assert!(back.sub(&v).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = ScalarField::zeros(&Grid2D::periodic(16).unwrap());
        let b = ScalarField::zeros(&Grid2D::periodic(32).unwrap());
        assert!(a.add(&b).is_err());
    }
}
