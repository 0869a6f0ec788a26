//! Fourier-multiplier operators: derivatives, the Leray projector, the
//! band-pass mollifier and the 2/3-rule dealiasing filter.

use num_complex::Complex64;

use super::field::{Field, ScalarField, SpectralField, VectorField};
use super::grid::Grid2D;
use crate::error::{Error, Result};

/// Multiplier of `∂x^mx ∂y^my` at spectral index `idx`. Odd orders vanish on
/// the Nyquist line of their axis.
pub fn derivative_multiplier(grid: &Grid2D, idx: usize, order: (u32, u32)) -> Complex64 {
    let (jx, jy) = grid.mode(idx);
    let axis = |j: i64, m: u32| -> Complex64 {
        if m == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if m % 2 == 1 && grid.is_nyquist(j) {
            return Complex64::default();
        }
        Complex64::new(0.0, grid.k0() * j as f64).powu(m)
    };
    axis(jx, order.0) * axis(jy, order.1)
}

pub fn derivative_spectral<const C: usize>(f: &SpectralField<C>, order: (u32, u32)) -> SpectralField<C> {
    let mut out = f.clone();
    let grid = f.grid().clone();
    out.apply_multiplier(|idx| derivative_multiplier(&grid, idx, order));
    out
}

/// `∂x^mx ∂y^my f`, exact for band-limited fields.
pub fn spectral_derivative<const C: usize>(f: &Field<C>, order: (u32, u32)) -> Field<C> {
    derivative_spectral(&f.to_spectral(), order).to_physical()
}

pub fn laplacian_spectral<const C: usize>(f: &SpectralField<C>) -> SpectralField<C> {
    let mut out = f.clone();
    let grid = f.grid().clone();
    out.apply_real_multiplier(|idx| {
        let (kx, ky) = grid.wavevector(idx);
        -(kx * kx + ky * ky)
    });
    out
}

pub fn laplacian<const C: usize>(f: &Field<C>) -> Field<C> {
    laplacian_spectral(&f.to_spectral()).to_physical()
}

/// In-place Leray projection `v̂ ↦ v̂ - k (k·v̂)/|k|²`, with the derivative
/// wavevector so that the discrete divergence of the output vanishes.
pub fn leray_in_place(v: &mut SpectralField<2>) {
    let grid = v.grid().clone();
    for idx in 0..grid.len() {
        let (kx, ky) = grid.derivative_wavevector(idx);
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            continue;
        }
        let [a, b] = v.mode(idx);
        let proj = (a * kx + b * ky) / k2;
        v.component_mut(0)[idx] = a - proj * kx;
        v.component_mut(1)[idx] = b - proj * ky;
    }
}

pub fn leray_project(v: &VectorField) -> VectorField {
    let mut s = v.to_spectral();
    leray_in_place(&mut s);
    s.to_physical()
}

pub fn divergence_spectral(v: &SpectralField<2>) -> SpectralField<1> {
    let grid = v.grid();
    let i = Complex64::new(0.0, 1.0);
    let data = (0..grid.len())
        .map(|idx| {
            let (kx, ky) = grid.derivative_wavevector(idx);
            let [a, b] = v.mode(idx);
            i * (a * kx + b * ky)
        })
        .collect();
    SpectralField::from_components(grid, [data])
}

pub fn divergence(v: &VectorField) -> ScalarField {
    divergence_spectral(&v.to_spectral()).to_physical()
}

/// `‖k·v̂‖ / ‖|k| v̂‖` over all modes; zero for the zero field.
pub fn relative_divergence_spectral(v: &SpectralField<2>) -> f64 {
    let grid = v.grid();
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..grid.len() {
        let (kx, ky) = grid.derivative_wavevector(idx);
        let [a, b] = v.mode(idx);
        num += (a * kx + b * ky).norm_sqr();
        den += (kx * kx + ky * ky) * (a.norm_sqr() + b.norm_sqr());
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

pub fn relative_divergence(v: &VectorField) -> f64 {
    relative_divergence_spectral(&v.to_spectral())
}

/// Band-pass mollifier keeping `1/n_cut ≤ |k| ≤ n_cut`.
///
/// On the torus the only mode below `1/n_cut` (for `n_cut ≥ box_len/2π`) is
/// the mean; `keep_mean` retains it instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JnFilter {
    pub n_cut: f64,
    pub keep_mean: bool,
}

impl JnFilter {
    pub fn new(n_cut: f64) -> Result<Self> {
        if !(n_cut >= 1.0 && n_cut.is_finite()) {
            return Err(Error::InvalidParameter { name: "n_cut", reason: format!("{n_cut} must be >= 1") });
        }
        Ok(JnFilter { n_cut, keep_mean: false })
    }

    pub fn keeping_mean(mut self) -> Self {
        self.keep_mean = true;
        self
    }

    #[inline]
    pub fn retains(&self, grid: &Grid2D, idx: usize) -> bool {
        let k = grid.k_abs(idx);
        if k == 0.0 && self.keep_mean {
            return true;
        }
        k >= 1.0 / self.n_cut && k <= self.n_cut
    }

    pub fn apply_spectral<const C: usize>(&self, f: &mut SpectralField<C>) {
        let grid = f.grid().clone();
        f.apply_real_multiplier(|idx| if self.retains(&grid, idx) { 1.0 } else { 0.0 });
    }

    pub fn apply<const C: usize>(&self, f: &Field<C>) -> Field<C> {
        let mut s = f.to_spectral();
        self.apply_spectral(&mut s);
        s.to_physical()
    }
}

pub fn jn_filter<const C: usize>(f: &Field<C>, n_cut: f64) -> Result<Field<C>> {
    Ok(JnFilter::new(n_cut)?.apply(f))
}

/// Whether a mode survives the 2/3 rule: `max(|jx|, |jy|) ≤ n/3`.
#[inline]
pub fn in_dealias_band(grid: &Grid2D, idx: usize) -> bool {
    let (jx, jy) = grid.mode(idx);
    let jmax = jx.abs().max(jy.abs());
    3 * jmax <= grid.n() as i64
}

pub fn dealias_in_place<const C: usize>(f: &mut SpectralField<C>) {
    let grid = f.grid().clone();
    f.apply_real_multiplier(|idx| if in_dealias_band(&grid, idx) { 1.0 } else { 0.0 });
}

pub fn dealias<const C: usize>(f: &Field<C>) -> Field<C> {
    let mut s = f.to_spectral();
    dealias_in_place(&mut s);
    s.to_physical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::QTensorField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g64() -> Grid2D {
        Grid2D::periodic(64).unwrap()
    }

    fn random_band_scalar(grid: &Grid2D, kmax: i64, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = SpectralField::<1>::zeros(grid);
        for idx in 0..grid.len() {
            let (jx, jy) = grid.mode(idx);
            if jx.abs().max(jy.abs()) <= kmax {
                s.component_mut(0)[idx] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        s.to_physical()
    }

    #[test]
    fn derivative_examples() {
        let g = g64();
        let f = ScalarField::from_fn(&g, |x, _| [x.sin()]);
        let df = spectral_derivative(&f, (1, 0));
        let expect = ScalarField::from_fn(&g, |x, _| [x.cos()]);
        assert!(df.sub(&expect).unwrap().max_abs() < 1e-12);

        let c = ScalarField::from_fn(&g, |_, _| [3.5]);
        for order in [(1, 0), (0, 1), (2, 1), (0, 3)] {
            assert!(spectral_derivative(&c, order).max_abs() < 1e-12);
        }

        let s = ScalarField::from_fn(&g, |x, y| [x.sin() * y.sin()]);
        let lap = laplacian(&s);
        assert!(lap.sub(&s.scale(-2.0)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn leray_examples() {
        let g = g64();
        let shear = VectorField::from_fn(&g, |_, y| [y.sin(), 0.0]);
        assert!(leray_project(&shear).sub(&shear).unwrap().max_abs() < 1e-14);
        let grad = VectorField::from_fn(&g, |x, _| [x.cos(), 0.0]);
        assert!(leray_project(&grad).max_abs() < 1e-14);
        let single = VectorField::from_fn(&g, |x, _| [x.sin(), 0.0]);
        assert!(leray_project(&single).max_abs() < 1e-14);
    }

    #[test]
    fn leray_is_idempotent_and_solenoidal() {
        let g = g64();
        let v = VectorField::from_components(
            &g,
            [random_band_scalar(&g, 31, 1).into_components()[0].clone(), random_band_scalar(&g, 31, 2).into_components()[0].clone()],
        );
        let p = leray_project(&v);
        let pp = leray_project(&p);
        assert!(pp.sub(&p).unwrap().max_abs() <= 1e-13 * p.max_abs());
        assert!(relative_divergence(&p) <= 1e-12);
        assert!(relative_divergence(&v) > 0.1);
    }

    #[test]
    fn jn_filter_examples() {
        let g = g64();
        let c = ScalarField::from_fn(&g, |_, _| [1.0]);
        assert!(jn_filter(&c, 4.0).unwrap().max_abs() < 1e-15);
        let kept = JnFilter::new(4.0).unwrap().keeping_mean().apply(&c);
        assert!(kept.sub(&c).unwrap().max_abs() < 1e-15);
        let s = ScalarField::from_fn(&g, |x, _| [x.sin()]);
        assert!(jn_filter(&s, 4.0).unwrap().sub(&s).unwrap().max_abs() < 1e-14);
        let r = random_band_scalar(&g, 31, 3);
        let once = jn_filter(&r, 7.5).unwrap();
        let twice = jn_filter(&once, 7.5).unwrap();
        // Idempotent on the spectral side: the mask is applied to identical spectra.
        let mut a = r.to_spectral();
        let filt = JnFilter::new(7.5).unwrap();
        filt.apply_spectral(&mut a);
        let mut b = a.clone();
        filt.apply_spectral(&mut b);
        assert_eq!(a.component(0), b.component(0));
        assert!(twice.sub(&once).unwrap().max_abs() < 1e-14);
        assert!(jn_filter(&r, 0.5).is_err());
    }

    #[test]
    fn jn_commutes_with_leray_and_derivatives() {
        let g = g64();
        let v = VectorField::from_components(
            &g,
            [random_band_scalar(&g, 31, 4).into_components()[0].clone(), random_band_scalar(&g, 31, 5).into_components()[0].clone()],
        );
        let filt = JnFilter::new(10.0).unwrap();
        let a = filt.apply(&leray_project(&v));
        let b = leray_project(&filt.apply(&v));
        assert!(a.sub(&b).unwrap().max_abs() <= 1e-13 * v.max_abs());
        let d1 = filt.apply(&spectral_derivative(&v, (1, 1)));
        let d2 = spectral_derivative(&filt.apply(&v), (1, 1));
        assert!(d1.sub(&d2).unwrap().max_abs() <= 1e-12 * d1.max_abs());
    }

    #[test]
    fn dealias_examples() {
        let g = g64();
        let f = random_band_scalar(&g, 21, 6);
        assert!(dealias(&f).sub(&f).unwrap().max_abs() < 1e-14);
        // Highest mode only: (-1)^(ix + iy).
        let top = ScalarField::from_fn(&g, |x, y| {
            let h = g.spacing();
            let (ix, iy) = ((x / h).round() as i64, (y / h).round() as i64);
            [if (ix + iy) % 2 == 0 { 1.0 } else { -1.0 }]
        });
        assert!(dealias(&top).max_abs() < 1e-14);
    }

    #[test]
    fn discrete_integration_by_parts() {
        let g = g64();
        for seed in 0..5 {
            let f = dealias(&random_band_scalar(&g, 31, 10 + seed));
            let h = dealias(&random_band_scalar(&g, 31, 20 + seed));
            for order in [(1, 0), (0, 1)] {
                let lhs = spectral_derivative(&f, order).inner(&h);
                let rhs = -f.inner(&spectral_derivative(&h, order));
                let scale = spectral_derivative(&f, order).l2_norm() * h.l2_norm();
                assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn tensor_fields_differentiate_componentwise() {
        let g = Grid2D::periodic(32).unwrap();
        let q = QTensorField::from_fn(&g, |x, y| [x.sin(), y.cos(), 0.0, (x + y).sin(), 0.5]);
        let d = spectral_derivative(&q, (0, 1));
        let e = QTensorField::from_fn(&g, |x, y| [0.0, -y.sin(), 0.0, (x + y).cos(), 0.0]);
        assert!(d.sub(&e).unwrap().max_abs() < 1e-12);
    }
}
