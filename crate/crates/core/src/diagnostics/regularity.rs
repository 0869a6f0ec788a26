//! High-norm monitoring and the Littlewood–Paley inequality surveys.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rhs::State;
use crate::spectral::field::{Field, ScalarField, SpectralField, VectorField};
use crate::spectral::grid::Grid2D;
use crate::spectral::lp::{dyadic_sum, LittlewoodPaley, LpProfile};
use crate::spectral::ops::spectral_derivative;
use crate::tensor::ModelParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct RegularityRecord {
    pub t: f64,
    /// `L‖∇Q‖²_{H^s} + ‖u‖²_{H^s}` in the dyadic form.
    pub phi: f64,
    /// Low block: `L‖S₀∇Q‖² + ‖S₀u‖²`.
    pub phi1: f64,
    pub phi2: f64,
    /// `‖Q‖²_{H²} + ‖u‖²_{H¹}`
    pub f: f64,
    /// `1 + ‖Q‖²_{L∞} + ‖∇Q‖²_{L²}`
    pub g: f64,
    /// Logarithmic interpolation ratio; zero when undefined.
    pub bg_ratio: f64,
    pub s: f64,
}

impl RegularityRecord {
    pub fn is_finite(&self) -> bool {
        [self.t, self.phi, self.phi1, self.phi2, self.f, self.g, self.bg_ratio].iter().all(|v| v.is_finite())
    }
}

fn k2(grid: &Grid2D, idx: usize) -> f64 {
    let (kx, ky) = grid.wavevector(idx);
    kx * kx + ky * ky
}

fn sobolev_sq<const C: usize>(f: &SpectralField<C>, s: f64) -> f64 {
    let grid = f.grid().clone();
    f.weighted_energy(|idx| (1.0 + k2(&grid, idx)).powf(s))
}

/// Pointwise `|∇f|` maximum for a field with `C` components.
fn grad_linf<const C: usize>(f: &Field<C>) -> f64 {
    let dx = spectral_derivative(f, (1, 0));
    let dy = spectral_derivative(f, (0, 1));
    let mx = dx.magnitude();
    let my = dy.magnitude();
    mx.iter().zip(&my).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
}

/// `(‖∇Q‖_{L∞} + ‖u‖_{L∞}) / (A √ln(e + B/A))` with `A = ‖Q‖_{H²} + ‖u‖_{H¹}`
/// and `B = ‖∇Q‖²_{H^s} + ‖u‖²_{H^s}`.
pub fn log_interpolation_ratio(s: &State, s_index: f64) -> Result<f64> {
    if !(s_index > 1.0) {
        return Err(Error::InvalidParameter { name: "s_index", reason: format!("{s_index} must exceed 1") });
    }
    let (qh, uh) = (s.q.to_spectral(), s.u.to_spectral());
    let grid = s.grid().clone();
    let a = sobolev_sq(&qh, 2.0).sqrt() + sobolev_sq(&uh, 1.0).sqrt();
    if a == 0.0 {
        return Err(Error::Undefined("logarithmic ratio of the zero state"));
    }
    let b = qh.weighted_energy(|idx| k2(&grid, idx) * (1.0 + k2(&grid, idx)).powf(s_index)) + sobolev_sq(&uh, s_index);
    let lhs = grad_linf(&s.q) + s.u.linf_norm();
    Ok(lhs / (a * (std::f64::consts::E + b / a).ln().sqrt()))
}

/// `φ`, its low/high split, `f`, `g` and the logarithmic ratio, using sharp
/// dyadic blocks.
pub fn regularity_record(s: &State, s_index: f64, params: &ModelParams) -> Result<RegularityRecord> {
    if !(s_index > 1.0) {
        return Err(Error::InvalidParameter { name: "s_index", reason: format!("{s_index} must exceed 1") });
    }
    let grid = s.grid().clone();
    let (qh, uh) = (s.q.to_spectral(), s.u.to_spectral());
    let lp = LittlewoodPaley::new(&grid, LpProfile::Sharp);
    let l = params.l_elastic;

    let low_w = |idx: usize| lp.low_pass_weight(0, idx).powi(2);
    let phi1 = l * qh.weighted_energy(|idx| low_w(idx) * k2(&grid, idx)) + uh.weighted_energy(low_w);
    let blocks: Vec<f64> = (0..=lp.q_max() as i32)
        .map(|q| {
            let w = |idx: usize| lp.block_weight(q, idx).powi(2);
            l * qh.weighted_energy(|idx| w(idx) * k2(&grid, idx)) + uh.weighted_energy(w)
        })
        .collect();
    let phi2 = dyadic_sum(0.0, &blocks, s_index);

    let f = sobolev_sq(&qh, 2.0) + sobolev_sq(&uh, 1.0);
    let grad_q_sq = qh.weighted_energy(|idx| k2(&grid, idx));
    let g = 1.0 + s.q.linf_norm().powi(2) + grad_q_sq;
    let bg_ratio = match log_interpolation_ratio(s, s_index) {
        Ok(r) => r,
        Err(Error::Undefined(_)) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(RegularityRecord { t: s.t, phi: phi1 + phi2, phi1, phi2, f, g, bg_ratio, s: s_index })
}

fn gradient(f: &ScalarField) -> VectorField {
    let dx = spectral_derivative(f, (1, 0));
    let dy = spectral_derivative(f, (0, 1));
    VectorField::from_components(f.grid(), [dx.component(0).to_vec(), dy.component(0).to_vec()])
}

/// `‖[S_{q-1}a, Δ_q]b‖ / (2^{-q}‖∇S_{q-1}a‖_{L∞}‖b‖)` with smooth blocks;
/// zero when the denominator vanishes.
pub fn commutator_estimate_check(a: &ScalarField, b: &ScalarField, q: i32) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    let lp = LittlewoodPaley::new(a.grid(), LpProfile::Smooth);
    let sa = lp.low_pass(a, q - 1);
    let lhs = {
        let left = sa.zip_with(&lp.block(b, q), |x, y| x * y)?;
        let right = lp.block(&sa.zip_with(b, |x, y| x * y)?, q);
        left.sub(&right)?.l2_norm()
    };
    let denom = 2f64.powi(-q) * gradient(&sa).linf_norm() * b.l2_norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / denom)
}

/// Commutator ratios for each `q` in `qs`.
pub fn commutator_survey(a: &ScalarField, b: &ScalarField, qs: impl IntoIterator<Item = i32>) -> Result<Vec<(i32, f64)>> {
    qs.into_iter().map(|q| commutator_estimate_check(a, b, q).map(|r| (q, r))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BernsteinRow {
    pub q: i32,
    /// `‖Δ_q f‖ / (2^{-q}‖∇Δ_q f‖)`
    pub lower: f64,
    /// `2^{-q}‖∇Δ_q f‖ / ‖Δ_q f‖`
    pub upper: f64,
    /// `2^{-q}‖∇S_q f‖ / ‖f‖`
    pub low_pass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernsteinSurvey {
    /// Lebesgue exponent; `f64::INFINITY` for the maximum norm.
    pub p: f64,
    pub rows: Vec<BernsteinRow>,
}

impl BernsteinSurvey {
    /// Largest of the three measured constants over all rows.
    pub fn max_constant(&self) -> f64 {
        self.rows.iter().map(|r| r.lower.max(r.upper).max(r.low_pass)).fold(0.0, f64::max)
    }
}

/// Bernstein ratios of `f` for blocks `qs` in `L^p`, skipping empty blocks.
pub fn bernstein_survey(f: &ScalarField, p: f64, profile: LpProfile, qs: impl IntoIterator<Item = i32>) -> BernsteinSurvey {
    let lp = LittlewoodPaley::new(f.grid(), profile);
    let fp = f.lp_norm(p);
    let rows = qs
        .into_iter()
        .filter_map(|q| {
            let block = lp.block(f, q);
            let bn = block.lp_norm(p);
            if bn <= 1e-12 * fp {
                return None;
            }
            let scale = 2f64.powi(-q);
            let gb = scale * gradient(&block).lp_norm(p);
            let gs = scale * gradient(&lp.low_pass(f, q)).lp_norm(p);
            Some(BernsteinRow { q, lower: bn / gb, upper: gb / bn, low_pass: gs / fp })
        })
        .collect();
    BernsteinSurvey { p, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::QTensorField;
    use crate::tensor::QTensor;

    #[test]
    fn zero_state_record() {
        let g = Grid2D::periodic(32).unwrap();
        let r = regularity_record(&State::zeros(&g), 1.5, &ModelParams::default()).unwrap();
        assert_eq!(r, RegularityRecord { g: 1.0, s: 1.5, ..Default::default() });
        assert!(matches!(log_interpolation_ratio(&State::zeros(&g), 1.5), Err(Error::Undefined(_))));
    }

    #[test]
    fn single_mode_ratio_is_finite_and_split_adds_up() {
        let g = Grid2D::periodic(32).unwrap();
        let e = QTensor::new(0.2, 0.1, 0.0, -0.1, 0.3);
        let q = QTensorField::from_tensor_fn(&g, |x, y| e.scale((x + 2.0 * y).sin()));
        let u = VectorField::from_fn(&g, |_, y| [(3.0 * y).cos(), 0.0]);
        let s = State::new(q, u, 0.0).unwrap();
        let r = log_interpolation_ratio(&s, 1.5).unwrap();
        assert!(r.is_finite() && r > 0.0);
        let rec = regularity_record(&s, 1.5, &ModelParams::default()).unwrap();
        assert!((rec.phi1 + rec.phi2 - rec.phi).abs() <= 1e-12 * rec.phi);
    }

    #[test]
    fn commutator_trivial_cases() {
        let g = Grid2D::periodic(64).unwrap();
        let a = ScalarField::from_fn(&g, |_, _| [1.7]);
        let b = ScalarField::from_fn(&g, |x, y| [(5.0 * x).sin() + (9.0 * y).cos()]);
        assert_eq!(commutator_estimate_check(&a, &b, 3).unwrap(), 0.0);
        // b far below block 4 (annulus 8..32); a only shifts frequencies by one.
        let a = ScalarField::from_fn(&g, |x, _| [x.cos()]);
        let b = ScalarField::from_fn(&g, |x, _| [(2.0 * x).sin()]);
        assert!(commutator_estimate_check(&a, &b, 4).unwrap() <= 1e-12);
    }

    #[test]
    fn bernstein_single_mode() {
        let g = Grid2D::periodic(64).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| [(5.0 * x).sin()]);
        let s = bernstein_survey(&f, 2.0, LpProfile::Sharp, 0..=5);
        assert_eq!(s.rows.len(), 1);
        let r = s.rows[0];
        assert_eq!(r.q, 2);
        assert!((r.upper - 5.0 / 4.0).abs() < 1e-12);
    }
}
