//! Initial data.

use std::path::PathBuf;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rhs::State;
use crate::spectral::field::{Field, QTensorField, SpectralField, VectorField};
use crate::spectral::grid::Grid2D;
use crate::spectral::ops::{dealias_in_place, leray_in_place};
use crate::tensor::{ModelParams, QTensor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IcSpec {
    /// Gaussian modes with `0 < |k| ≤ k_max` and amplitude `(1+|k|²)^{-slope/2}`,
    /// scaled to `½‖Q‖² = energy_q` and `½‖u‖² = energy_u`.
    RandomBand { k_max: f64, slope: f64, energy_q: f64, energy_u: f64, seed: u64 },
    /// `s (n⊗n - Id/3)` with in-plane director angle
    /// `θ = theta0 + amplitude Σ` of random unit-wavenumber trigonometric modes up to `modes`.
    UniaxialTexture { s: f64, theta0: f64, amplitude: f64, modes: u32, seed: u64 },
    /// `u = amplitude (sin x cos y, -cos x sin y)`, `Q = 0`.
    TaylorGreenU { amplitude: f64 },
    FromFile { path: PathBuf },
}

impl Default for IcSpec {
    fn default() -> Self {
        IcSpec::RandomBand { k_max: 6.0, slope: 2.0, energy_q: 0.5, energy_u: 0.5, seed: 0 }
    }
}

impl IcSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            IcSpec::RandomBand { .. } => "random_band",
            IcSpec::UniaxialTexture { .. } => "uniaxial_texture",
            IcSpec::TaylorGreenU { .. } => "taylor_green_u",
            IcSpec::FromFile { .. } => "from_file",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            IcSpec::RandomBand { seed, .. } | IcSpec::UniaxialTexture { seed, .. } => *seed,
            _ => 0,
        }
    }
}

/// Scalar order of the uniaxial minimiser of the bulk energy, or `None` when
/// the isotropic state is the only critical point.
pub fn equilibrium_order(p: &ModelParams) -> Option<f64> {
    let disc = p.b * p.b - 24.0 * p.a * p.c;
    (disc >= 0.0).then(|| (p.b + disc.sqrt()) / (4.0 * p.c))
}

fn random_spectrum<const C: usize>(grid: &Grid2D, k_max: f64, slope: f64, rng: &mut ChaCha8Rng) -> SpectralField<C> {
    let n = grid.n();
    let mut s = SpectralField::<C>::zeros(grid);
    for idx in 0..grid.len() {
        let (jx, jy) = grid.mode(idx);
        // One representative of each ±k pair; Nyquist lines stay empty.
        if !(jy > 0 || (jy == 0 && jx > 0)) || grid.is_nyquist(jx) || grid.is_nyquist(jy) {
            continue;
        }
        let k = grid.k_abs(idx);
        if k > k_max {
            continue;
        }
        let amp = (1.0 + k * k).powf(-slope / 2.0);
        let conj = grid.index_of(-jx) + n * grid.index_of(-jy);
        for c in 0..C {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let z = Complex64::new(re, im) * amp;
            s.component_mut(c)[idx] = z;
            s.component_mut(c)[conj] = z.conj();
        }
    }
    s
}

fn with_energy<const C: usize>(f: Field<C>, energy: f64) -> Field<C> {
    let e = 0.5 * f.l2_norm_sq();
    if e == 0.0 {
        f
    } else {
        f.scale((energy / e).sqrt())
    }
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter { name, reason: format!("{v} must be finite and non-negative") });
    }
    Ok(())
}

/// Builds the initial state; deterministic given the seed, `u` Leray-projected.
pub fn make_initial(spec: &IcSpec, grid: &Grid2D) -> Result<State> {
    match spec {
        IcSpec::RandomBand { k_max, slope, energy_q, energy_u, seed } => {
            check_nonneg("k_max", *k_max)?;
            check_nonneg("energy_q", *energy_q)?;
            check_nonneg("energy_u", *energy_u)?;
            if !slope.is_finite() {
                return Err(Error::InvalidParameter { name: "slope", reason: "must be finite".into() });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut qh = random_spectrum::<5>(grid, *k_max, *slope, &mut rng);
            let mut uh = random_spectrum::<2>(grid, *k_max, *slope, &mut rng);
            dealias_in_place(&mut qh);
            dealias_in_place(&mut uh);
            leray_in_place(&mut uh);
            let q = with_energy(qh.to_physical(), *energy_q);
            let u = with_energy(uh.to_physical(), *energy_u);
            State::new(q, u, 0.0)
        }
        IcSpec::UniaxialTexture { s, theta0, amplitude, modes, seed } => {
            if !(s.is_finite() && theta0.is_finite() && amplitude.is_finite()) {
                return Err(Error::InvalidParameter { name: "ic", reason: "texture parameters must be finite".into() });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let k0 = grid.k0();
            let mut terms = Vec::new();
            for mx in 0..=*modes as i32 {
                for my in -(*modes as i32)..=*modes as i32 {
                    if (mx == 0 && my <= 0) || mx * mx + my * my > (*modes * *modes) as i32 {
                        continue;
                    }
                    let a: f64 = StandardNormal.sample(&mut rng);
                    let ph: f64 = StandardNormal.sample(&mut rng);
                    terms.push((k0 * mx as f64, k0 * my as f64, a, ph));
                }
            }
            let norm = if terms.is_empty() { 1.0 } else { (terms.len() as f64).sqrt() };
            let q = QTensorField::from_tensor_fn(grid, |x, y| {
                let wiggle: f64 = terms.iter().map(|(kx, ky, a, ph)| a * (kx * x + ky * y + ph).cos()).sum();
                let (sn, cs) = (theta0 + amplitude * wiggle / norm).sin_cos();
                QTensor::new(s * (cs * cs - 1.0 / 3.0), s * cs * sn, 0.0, s * (sn * sn - 1.0 / 3.0), 0.0)
            });
            State::new(q, VectorField::zeros(grid), 0.0)
        }
        IcSpec::TaylorGreenU { amplitude } => {
            let k = grid.k0();
            let u = VectorField::from_fn(grid, |x, y| {
                [amplitude * (k * x).sin() * (k * y).cos(), -amplitude * (k * x).cos() * (k * y).sin()]
            });
            State::new(QTensorField::zeros(grid), u, 0.0)
        }
        IcSpec::FromFile { path } => {
            let snap = super::snapshot::read_snapshot(path)?;
            if snap.state.grid() != grid {
                return Err(Error::GridMismatch(format!(
                    "snapshot has n = {}, box = {}; config has n = {}, box = {}",
                    snap.state.grid().n(),
                    snap.state.grid().box_len(),
                    grid.n(),
                    grid.box_len()
                )));
            }
            Ok(snap.state)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::{relative_divergence, spectral_derivative};
    use crate::tensor::uniaxial;

    #[test]
    fn taylor_green_is_solenoidal() {
        let g = Grid2D::periodic(32).unwrap();
        let s = make_initial(&IcSpec::TaylorGreenU { amplitude: 1.0 }, &g).unwrap();
        assert!(relative_divergence(&s.u) < 1e-14);
        assert!((s.u.at(g.n() / 4)[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let g = Grid2D::periodic(32).unwrap();
        let spec = IcSpec::default();
        let a = make_initial(&spec, &g).unwrap();
        let b = make_initial(&spec, &g).unwrap();
        assert_eq!(a.q.components(), b.q.components());
        assert_eq!(a.u.components(), b.u.components());
        let c = make_initial(&IcSpec::RandomBand { k_max: 6.0, slope: 2.0, energy_q: 0.5, energy_u: 0.5, seed: 1 }, &g).unwrap();
        assert_ne!(a.q.components(), c.q.components());
    }

    #[test]
    fn random_band_has_unit_energy_and_band() {
        let g = Grid2D::periodic(64).unwrap();
        let s = make_initial(&IcSpec::default(), &g).unwrap();
        assert!((0.5 * s.u.l2_norm_sq() - 0.5).abs() < 1e-12);
        assert!((0.5 * s.q.l2_norm_sq() - 0.5).abs() < 1e-12);
        assert!(relative_divergence(&s.u) < 1e-13);
        let qh = s.q.to_spectral();
        assert!(qh.max_mode_where(|idx| g.k_abs(idx) > 6.0 + 1e-9) < 1e-12);
    }

    #[test]
    fn constant_texture_has_no_gradient() {
        let g = Grid2D::periodic(16).unwrap();
        let spec = IcSpec::UniaxialTexture { s: 0.6, theta0: 0.3, amplitude: 0.0, modes: 2, seed: 3 };
        let s = make_initial(&spec, &g).unwrap();
        assert!(spectral_derivative(&s.q, (1, 0)).max_abs() < 1e-14);
        assert!(spectral_derivative(&s.q, (0, 1)).max_abs() < 1e-14);
        let expect = uniaxial(0.6, [0.3f64.cos(), 0.3f64.sin(), 0.0]).unwrap();
        assert!(s.q.tensor_at(5).add(&expect.scale(-1.0)).norm_sq() < 1e-30);
    }

    #[test]
    fn equilibrium_order_is_critical() {
        let p = ModelParams::default();
        let s = equilibrium_order(&p).unwrap();
        let q = uniaxial(s, [1.0, 0.0, 0.0]).unwrap();
        assert!(crate::tensor::bulk_force(&q, &p).norm_sq() < 1e-28);
    }
}
