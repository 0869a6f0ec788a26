//! Littlewood–Paley decomposition on the lattice.
//!
//! Radii are in physical wavenumber units. `S_q` multiplies by `χ(2^{-q}|k|)`
//! and `Δ_q` by `φ(2^{-q}|k|)` with `φ(r) = χ(r/2) - χ(r)`.

use super::field::{Field, SpectralField};
use super::grid::Grid2D;

/// Shape of the cutoff `χ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LpProfile {
    /// `χ = 1` on `|ξ| < 1`: indicator annuli `2^q ≤ |ξ| < 2^{q+1}`.
    #[default]
    Sharp,
    /// C∞ bump, `χ ≡ 1` on `|ξ| ≤ 1/2` and supported in `|ξ| ≤ 1`.
    Smooth,
}

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

impl LpProfile {
    pub fn chi(self, r: f64) -> f64 {
        match self {
            LpProfile::Sharp => {
                if r < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            LpProfile::Smooth => {
                let t = 2.0 * r - 1.0;
                if t <= 0.0 {
                    1.0
                } else if t >= 1.0 {
                    0.0
                } else {
                    let (a, b) = (psi(1.0 - t), psi(t));
                    a / (a + b)
                }
            }
        }
    }

    pub fn phi(self, r: f64) -> f64 {
        self.chi(r / 2.0) - self.chi(r)
    }

    /// Last block index needed for the sum to telescope to one on the whole
    /// lattice of `grid`.
    pub fn q_max(self, grid: &Grid2D) -> usize {
        let kmax = grid.k_abs_max();
        let mut q = 0usize;
        loop {
            let covered = match self {
                LpProfile::Sharp => 2f64.powi(q as i32 + 1) > kmax,
                LpProfile::Smooth => 2f64.powi(q as i32) >= kmax,
            };
            if covered {
                return q;
            }
            q += 1;
        }
    }
}

/// Dyadic filters bound to one grid.
#[derive(Clone, Debug)]
pub struct LittlewoodPaley {
    grid: Grid2D,
    profile: LpProfile,
    q_max: usize,
}

impl LittlewoodPaley {
    pub fn new(grid: &Grid2D, profile: LpProfile) -> Self {
        LittlewoodPaley { grid: grid.clone(), profile, q_max: profile.q_max(grid) }
    }

    pub fn profile(&self) -> LpProfile {
        self.profile
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// `χ(2^{-q}|k|)`, the multiplier of `S_q`.
    #[inline]
    pub fn low_pass_weight(&self, q: i32, idx: usize) -> f64 {
        self.profile.chi(self.grid.k_abs(idx) * 2f64.powi(-q))
    }

    /// `φ(2^{-q}|k|)`, the multiplier of `Δ_q`.
    #[inline]
    pub fn block_weight(&self, q: i32, idx: usize) -> f64 {
        self.profile.phi(self.grid.k_abs(idx) * 2f64.powi(-q))
    }

    pub fn low_pass<const C: usize>(&self, f: &Field<C>, q: i32) -> Field<C> {
        let mut s = f.to_spectral();
        s.apply_real_multiplier(|idx| self.low_pass_weight(q, idx));
        s.to_physical()
    }

    pub fn block<const C: usize>(&self, f: &Field<C>, q: i32) -> Field<C> {
        let mut s = f.to_spectral();
        self.block_in_place(&mut s, q);
        s.to_physical()
    }

    pub fn block_in_place<const C: usize>(&self, s: &mut SpectralField<C>, q: i32) {
        s.apply_real_multiplier(|idx| self.block_weight(q, idx));
    }

    /// `max_k |χ(k) + Σ_{q ≤ q_max} φ(2^{-q}k) - 1|` over the lattice.
    pub fn partition_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|idx| {
                let total: f64 = self.low_pass_weight(0, idx)
                    + (0..=self.q_max as i32).map(|q| self.block_weight(q, idx)).sum::<f64>();
                (total - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `‖S₀f‖²` and `‖Δ_q f‖²` for `q = 0..=q_max`, from the spectrum.
    pub fn block_energies<const C: usize>(&self, s: &SpectralField<C>) -> (f64, Vec<f64>) {
        let low = s.weighted_energy(|idx| self.low_pass_weight(0, idx).powi(2));
        let blocks = (0..=self.q_max as i32)
            .map(|q| s.weighted_energy(|idx| self.block_weight(q, idx).powi(2)))
            .collect();
        (low, blocks)
    }

    pub fn decompose<const C: usize>(&self, f: &Field<C>) -> LPDecomposition<C> {
        let spec = f.to_spectral();
        let n = self.grid.len();
        let chi: Vec<f64> = (0..n).map(|idx| self.low_pass_weight(0, idx)).collect();
        let phi: Vec<Vec<f64>> =
            (0..=self.q_max as i32).map(|q| (0..n).map(|idx| self.block_weight(q, idx)).collect()).collect();
        let filtered = |w: &[f64]| {
            let mut s = spec.clone();
            s.apply_real_multiplier(|idx| w[idx]);
            s.to_physical()
        };
        let low = filtered(&chi);
        let blocks = phi.iter().map(|w| filtered(w)).collect();
        LPDecomposition { profile: self.profile, low, blocks, chi, phi }
    }
}

/// `S₀f` and the blocks `Δ_q f`, with the multipliers that produced them.
#[derive(Clone, Debug)]
pub struct LPDecomposition<const C: usize> {
    pub profile: LpProfile,
    pub low: Field<C>,
    pub blocks: Vec<Field<C>>,
    /// `χ(|k|)` on the lattice.
    pub chi: Vec<f64>,
    /// `φ(2^{-q}|k|)` on the lattice, one row per block.
    pub phi: Vec<Vec<f64>>,
}

impl<const C: usize> LPDecomposition<C> {
    pub fn q_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn reconstruct(&self) -> Field<C> {
        let mut acc = self.low.clone();
        for b in &self.blocks {
            acc = acc.add(b).expect("blocks share the grid");
        }
        acc
    }

    pub fn block_energies(&self) -> (f64, Vec<f64>) {
        (self.low.l2_norm_sq(), self.blocks.iter().map(|b| b.l2_norm_sq()).collect())
    }
}

pub fn lp_decompose<const C: usize>(f: &Field<C>, profile: LpProfile) -> LPDecomposition<C> {
    LittlewoodPaley::new(f.grid(), profile).decompose(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HsMethod {
    /// `(Σ_k (1+|k|²)^s |f̂(k)|²)^{1/2}`.
    Direct,
    /// `(‖S₀f‖² + Σ_q 2^{2qs}‖Δ_q f‖²)^{1/2}` with sharp blocks.
    Dyadic,
}

pub fn hs_norm<const C: usize>(f: &Field<C>, s: f64, method: HsMethod) -> f64 {
    hs_norm_spectral(&f.to_spectral(), s, method, LpProfile::Sharp)
}

pub fn hs_norm_spectral<const C: usize>(f: &SpectralField<C>, s: f64, method: HsMethod, profile: LpProfile) -> f64 {
    assert!(s >= 0.0, "Sobolev index must be non-negative");
    match method {
        HsMethod::Direct => {
            let grid = f.grid().clone();
            f.weighted_energy(|idx| (1.0 + grid.k_abs(idx).powi(2)).powf(s)).sqrt()
        }
        HsMethod::Dyadic => {
            let (low, blocks) = LittlewoodPaley::new(f.grid(), profile).block_energies(f);
            dyadic_sum(low, &blocks, s).sqrt()
        }
    }
}

/// `low + Σ_q 2^{2qs} blocks[q]`.
pub fn dyadic_sum(low: f64, blocks: &[f64], s: f64) -> f64 {
    low + blocks.iter().enumerate().map(|(q, e)| 2f64.powf(2.0 * q as f64 * s) * e).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::ScalarField;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_scalar(grid: &Grid2D, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = SpectralField::<1>::zeros(grid);
        for idx in 0..grid.len() {
            let amp = 1.0 / (1.0 + grid.k_abs(idx));
            s.component_mut(0)[idx] = Complex64::new(rng.random_range(-amp..amp), rng.random_range(-amp..amp));
        }
        s.to_physical()
    }

    #[test]
    fn partition_of_unity_both_profiles() {
        for n in [16, 64] {
            let g = Grid2D::periodic(n).unwrap();
            for profile in [LpProfile::Sharp, LpProfile::Smooth] {
                assert!(LittlewoodPaley::new(&g, profile).partition_defect() <= 1e-12);
            }
        }
        let g = Grid2D::new(64, 3.0).unwrap();
        assert!(LittlewoodPaley::new(&g, LpProfile::Smooth).partition_defect() <= 1e-12);
    }

    #[test]
    fn smooth_profile_supports() {
        let p = LpProfile::Smooth;
        assert_eq!(p.chi(0.5), 1.0);
        assert_eq!(p.chi(1.0), 0.0);
        assert_eq!(p.phi(0.49), 0.0);
        assert_eq!(p.phi(2.0), 0.0);
        assert!(p.phi(1.0) > 0.99);
        for i in 0..=200 {
            let r = i as f64 * 0.0125;
            assert!((0.0..=1.0).contains(&p.chi(r)));
            assert!(p.phi(r) >= 0.0);
        }
    }

    #[test]
    fn single_mode_lands_in_one_block() {
        let g = Grid2D::periodic(64).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| [x.sin()]);
        let d = lp_decompose(&f, LpProfile::Sharp);
        let (low, blocks) = d.block_energies();
        assert!(low < 1e-24);
        assert!((blocks[0] - f.l2_norm_sq()).abs() < 1e-12);
        assert!(blocks[1..].iter().all(|&e| e < 1e-24));
        assert_eq!(d.q_max(), 5);
    }

    #[test]
    fn constant_is_all_low() {
        let g = Grid2D::periodic(32).unwrap();
        let f = ScalarField::from_fn(&g, |_, _| [2.5]);
        for profile in [LpProfile::Sharp, LpProfile::Smooth] {
            let d = lp_decompose(&f, profile);
            assert!(d.low.sub(&f).unwrap().max_abs() < 1e-14);
            assert!(d.blocks.iter().all(|b| b.max_abs() < 1e-14));
        }
    }

    #[test]
    fn reconstruction_and_parseval() {
        let g = Grid2D::periodic(64).unwrap();
        let f = random_scalar(&g, 9);
        for profile in [LpProfile::Sharp, LpProfile::Smooth] {
            let d = lp_decompose(&f, profile);
            let err = d.reconstruct().sub(&f).unwrap().l2_norm();
            assert!(err <= 1e-12 * f.l2_norm());
        }
        let (low, blocks) = lp_decompose(&f, LpProfile::Sharp).block_energies();
        let total = low + blocks.iter().sum::<f64>();
        assert!((total - f.l2_norm_sq()).abs() <= 1e-12 * f.l2_norm_sq());
    }

    #[test]
    fn hs_norm_examples() {
        let g = Grid2D::periodic(64).unwrap();
        let z = ScalarField::zeros(&g);
        assert_eq!(hs_norm(&z, 1.0, HsMethod::Direct), 0.0);
        assert_eq!(hs_norm(&z, 1.0, HsMethod::Dyadic), 0.0);
        let f = ScalarField::from_fn(&g, |x, _| [x.sin()]);
        let expect = (4.0 * PI * PI / 2.0).sqrt();
        assert!((hs_norm(&f, 0.0, HsMethod::Direct) - expect).abs() < 1e-12);
        assert!((hs_norm(&f, 0.0, HsMethod::Dyadic) - expect).abs() < 1e-12);
        // |k| = 1: (1 + 1)^{s/2} direct versus 2^{0} dyadic.
        assert!((hs_norm(&f, 2.0, HsMethod::Direct) - 2.0 * expect).abs() < 1e-12);
    }
}
