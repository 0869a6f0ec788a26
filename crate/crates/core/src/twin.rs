//! Twin runs at two resolutions and the δ-energy Gronwall check.
//!
//! The finer run stands in for the strong solution; the comparison is a
//! resolution-refinement proxy for weak–strong uniqueness, not a proof of it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{run, SchemeConfig, Sink};
use crate::rhs::State;
use crate::spectral::field::{Field, QTensorField, SpectralField, VectorField};
use crate::spectral::grid::Grid2D;
use crate::spectral::ops::spectral_derivative;
use crate::tensor::ModelParams;

/// Per-axis map from a source wavenumber to `(target index, weight)` pairs.
fn axis_targets(j: i64, n_from: usize, n_to: usize) -> Vec<(usize, f64)> {
    let to = n_to as i64;
    let idx = |j: i64| j.rem_euclid(to) as usize;
    if n_to >= n_from {
        // The source Nyquist mode is split evenly between ±n_from/2.
        if j == -(n_from as i64) / 2 && n_to > n_from {
            vec![(idx(j), 0.5), (idx(-j), 0.5)]
        } else {
            vec![(idx(j), 1.0)]
        }
    } else if j.abs() <= to / 2 {
        // Both ±n_to/2 fold onto the target Nyquist mode.
        vec![(idx(j), 1.0)]
    } else {
        Vec::new()
    }
}

fn transfer_spectrum<const C: usize>(s: &SpectralField<C>, to: &Grid2D) -> SpectralField<C> {
    let from = s.grid();
    let (nf, nt) = (from.n(), to.n());
    let scale = (nt * nt) as f64 / (nf * nf) as f64;
    let mut out = SpectralField::<C>::zeros(to);
    for idx in 0..from.len() {
        let (jx, jy) = from.mode(idx);
        let tx = axis_targets(jx, nf, nt);
        if tx.is_empty() {
            continue;
        }
        let ty = axis_targets(jy, nf, nt);
        let src = s.mode(idx);
        for &(ix, wx) in &tx {
            for &(iy, wy) in &ty {
                let t = iy * nt + ix;
                let w = wx * wy * scale;
                for c in 0..C {
                    out.component_mut(c)[t] += src[c] * Complex64::new(w, 0.0);
                }
            }
        }
    }
    out
}

/// Zero-padding prolongation or spectral truncation onto `to`.
pub fn spectral_transfer<const C: usize>(f: &Field<C>, to: &Grid2D) -> Result<Field<C>> {
    let from = f.grid();
    if from.box_len() != to.box_len() {
        return Err(Error::GridMismatch(format!("box {} vs {}", from.box_len(), to.box_len())));
    }
    if from == to {
        return Ok(f.clone());
    }
    Ok(transfer_spectrum(&f.to_spectral(), to).to_physical())
}

pub fn transfer_state(s: &State, to: &Grid2D) -> Result<State> {
    Ok(State { q: spectral_transfer(&s.q, to)?, u: spectral_transfer(&s.u, to)?, t: s.t })
}

#[derive(Clone, Debug)]
pub struct DeltaState {
    pub dq: QTensorField,
    pub du: VectorField,
    pub t: f64,
}

/// Differences on the finer of the two grids.
pub fn delta_state(s1: &State, s2: &State) -> Result<DeltaState> {
    let fine = if s1.grid().n() >= s2.grid().n() { s1.grid() } else { s2.grid() }.clone();
    let a = transfer_state(s1, &fine)?;
    let b = transfer_state(s2, &fine)?;
    Ok(DeltaState { dq: a.q.sub(&b.q)?, du: a.u.sub(&b.u)?, t: s1.t })
}

/// `½(L‖∇δQ‖² + ‖δQ‖² + ‖δu‖²)`
pub fn delta_energy(d: &DeltaState, l_elastic: f64) -> f64 {
    let grid = d.dq.grid().clone();
    let qh = d.dq.to_spectral();
    let grad = qh.weighted_energy(|idx| {
        let (kx, ky) = grid.wavevector(idx);
        kx * kx + ky * ky
    });
    0.5 * (l_elastic * grad + qh.l2_norm_sq() + d.du.to_spectral().l2_norm_sq())
}

fn tensor_grad_linf(q: &QTensorField) -> f64 {
    let dx = spectral_derivative(q, (1, 0)).magnitude();
    let dy = spectral_derivative(q, (0, 1)).magnitude();
    dx.iter().zip(&dy).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
}

/// Coefficient multiplying the δ-energy in the Gronwall inequality, assembled
/// with unit weights from the strong solution `(q2, u2)` and the comparison
/// tensor `q1`.
pub fn k_strong(q1: &QTensorField, q2: &QTensorField, u2: &VectorField, p: &ModelParams) -> Result<f64> {
    q1.grid().check_same(q2.grid())?;
    q2.grid().check_same(u2.grid())?;
    let gu = {
        let dx = spectral_derivative(u2, (1, 0)).magnitude();
        let dy = spectral_derivative(u2, (0, 1)).magnitude();
        dx.iter().zip(&dy).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
    };
    let gq = tensor_grad_linf(q2);
    let q_inf = q2.linf_norm();
    let lap = spectral_derivative(q2, (2, 0)).add(&spectral_derivative(q2, (0, 2)))?.linf_norm();
    let u_inf = u2.linf_norm();
    let (gq2, q2i) = (gq * gq, q_inf * q_inf);

    let j1 = gu + gq2;
    let j2 = 1.0 + gu * gu + gq2 + q2i + lap * lap;
    let j3 = 1.0 + u_inf * u_inf + gq2;
    let (q1_l4, q2_l4) = (q1.lp_norm(4.0), q2.lp_norm(4.0));
    let j4 = q1_l4.powi(2)
        + q1.lp_norm(8.0).powi(4)
        + q2i * (q1_l4.powi(2) + q2_l4.powi(2))
        + p.gamma * (p.b.abs() + p.c * q_inf) * (q1.l2_norm() + q2.l2_norm());
    Ok(j1 + j2 + j3 + j4)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GronwallRow {
    pub t: f64,
    pub delta_e: f64,
    pub k_strong: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GronwallSeries {
    pub n1: usize,
    pub n2: usize,
    pub rows: Vec<GronwallRow>,
    /// Set when either run failed; `rows` then holds the partial series.
    pub failure: Option<String>,
}

/// Captures the state at every diagnostic time.
struct Capture(Vec<State>);

impl Sink for Capture {
    fn record(&mut self, _step: usize, state: &State, _rec: &crate::diagnostics::EnergyRecord) -> Result<()> {
        self.0.push(state.clone());
        Ok(())
    }
}

/// Runs at resolutions `n1 ≤ n2` from common initial data, concurrently, and
/// compares them on the `n2` grid at every diagnostic time.
pub fn twin_run(init: &State, p: &ModelParams, cfg: &SchemeConfig, n1: usize, n2: usize) -> Result<GronwallSeries> {
    if n1 > n2 {
        return Err(Error::InvalidParameter { name: "n1", reason: format!("n1 = {n1} exceeds n2 = {n2}") });
    }
    let box_len = init.grid().box_len();
    let g1 = Grid2D::new(n1, box_len)?;
    let g2 = Grid2D::new(n2, box_len)?;
    // Data are first brought onto the coarse grid so both runs start from
    // the same band-limited field.
    let common = transfer_state(init, &g1)?;
    let init2 = transfer_state(&common, &g2)?;

    let (r1, r2) = std::thread::scope(|scope| {
        let h1 = scope.spawn(|| {
            let mut cap = Capture(Vec::new());
            let r = run(&common, p, cfg, &mut cap);
            (cap.0, r.err())
        });
        let h2 = scope.spawn(|| {
            let mut cap = Capture(Vec::new());
            let r = run(&init2, p, cfg, &mut cap);
            (cap.0, r.err())
        });
        (h1.join().expect("coarse run panicked"), h2.join().expect("fine run panicked"))
    });
    let ((s1, e1), (s2, e2)) = (r1, r2);
    let failure = match (e1, e2) {
        (None, None) => None,
        (Some(e), _) => Some(format!("n = {n1} run: {e}")),
        (None, Some(e)) => Some(format!("n = {n2} run: {e}")),
    };

    let mut rows = Vec::with_capacity(s1.len());
    for (a, b) in s1.iter().zip(&s2) {
        let a = transfer_state(a, &g2)?;
        let d = delta_state(&a, b)?;
        let k = k_strong(&a.q, &b.q, &b.u, p)?;
        rows.push(GronwallRow { t: b.t, delta_e: delta_energy(&d, p.l_elastic), k_strong: k });
    }
    Ok(GronwallSeries { n1, n2, rows, failure })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GronwallReport {
    /// Fewer than three positive rows: the difference vanishes identically.
    pub trivial: bool,
    /// Smallest `C` with `d/dt ln δe ≤ C k_strong` on every interval.
    pub c_fit: f64,
    pub intervals: usize,
}

impl GronwallReport {
    pub fn summary(&self) -> String {
        if self.trivial {
            "identically zero: uniqueness trivially verified".to_string()
        } else {
            format!("C_fit = {} over {} intervals", self.c_fit, self.intervals)
        }
    }
}

/// Fits the minimal Gronwall rate from discrete log-slopes.
pub fn gronwall_check(series: &GronwallSeries) -> GronwallReport {
    let positive = series.rows.iter().filter(|r| r.delta_e > 0.0).count();
    if positive < 3 {
        return GronwallReport { trivial: true, c_fit: 0.0, intervals: 0 };
    }
    let mut c_fit: f64 = 0.0;
    let mut intervals = 0;
    for w in series.rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if !(a.delta_e > 0.0 && b.delta_e > 0.0) || b.t <= a.t {
            continue;
        }
        let slope = (b.delta_e.ln() - a.delta_e.ln()) / (b.t - a.t);
        let k = 0.5 * (a.k_strong + b.k_strong);
        c_fit = c_fit.max(slope / k);
        intervals += 1;
    }
    GronwallReport { trivial: false, c_fit, intervals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::Scheme;
    use crate::io::initial::{make_initial, IcSpec};

    #[test]
    fn prolong_then_restrict_is_identity() {
        let g1 = Grid2D::periodic(16).unwrap();
        let g2 = Grid2D::periodic(64).unwrap();
        let f = QTensorField::from_fn(&g1, |x, y| {
            [x.sin(), (8.0 * x).cos(), (3.0 * y).sin() * x.cos(), (8.0 * y).cos(), 0.2]
        });
        let up = spectral_transfer(&f, &g2).unwrap();
        let back = spectral_transfer(&up, &g1).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn prolongation_preserves_norm_of_band_limited_field() {
        let g1 = Grid2D::periodic(32).unwrap();
        let g2 = Grid2D::periodic(128).unwrap();
        let s = make_initial(&IcSpec::default(), &g1).unwrap();
        let up = transfer_state(&s, &g2).unwrap();
        assert!((up.q.l2_norm_sq() - s.q.l2_norm_sq()).abs() < 1e-12);
        assert!((up.u.l2_norm_sq() - s.u.l2_norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_boxes_are_rejected() {
        let f = VectorField::zeros(&Grid2D::new(16, 1.0).unwrap());
        assert!(spectral_transfer(&f, &Grid2D::new(32, 2.0).unwrap()).is_err());
    }

    #[test]
    fn delta_energy_is_symmetric_and_definite() {
        let g1 = Grid2D::periodic(32).unwrap();
        let g2 = Grid2D::periodic(64).unwrap();
        let a = make_initial(&IcSpec::default(), &g1).unwrap();
        let b = make_initial(&IcSpec::RandomBand { k_max: 5.0, slope: 1.0, energy_q: 0.3, energy_u: 0.2, seed: 9 }, &g2).unwrap();
        let l = 0.1;
        let ab = delta_energy(&delta_state(&a, &b).unwrap(), l);
        let ba = delta_energy(&delta_state(&b, &a).unwrap(), l);
        assert!(ab > 0.0 && (ab - ba).abs() <= 1e-12 * ab);
        assert_eq!(delta_energy(&delta_state(&a, &a).unwrap(), l), 0.0);
    }

    #[test]
    fn exponential_toy_series() {
        let alpha = 0.7;
        let rows = (0..20)
            .map(|i| {
                let t = i as f64 * 0.05;
                GronwallRow { t, delta_e: (alpha * t).exp(), k_strong: 1.0 }
            })
            .collect();
        let rep = gronwall_check(&GronwallSeries { n1: 1, n2: 1, rows, failure: None });
        assert!(!rep.trivial);
        assert!((rep.c_fit - alpha).abs() < 1e-12);
        let zero = GronwallSeries { n1: 1, n2: 1, rows: vec![GronwallRow { t: 0.0, delta_e: 0.0, k_strong: 1.0 }; 4], failure: None };
        assert!(gronwall_check(&zero).trivial);
    }

    #[test]
    fn identical_twins_agree_exactly() {
        let g = Grid2D::periodic(16).unwrap();
        let init = make_initial(&IcSpec::default(), &g).unwrap();
        let cfg = SchemeConfig { dt: 1e-3, scheme: Scheme::IfRk2, t_end: 0.02, diag_every: 5, ..Default::default() };
        let s = twin_run(&init, &ModelParams::default(), &cfg, 16, 16).unwrap();
        assert_eq!(s.rows.len(), 5);
        assert!(s.rows.iter().all(|r| r.delta_e == 0.0 && r.k_strong.is_finite()));
        let z = twin_run(&State::zeros(&g), &ModelParams::default(), &cfg, 16, 32).unwrap();
        assert!(z.rows.iter().all(|r| r.delta_e == 0.0));
    }
}
