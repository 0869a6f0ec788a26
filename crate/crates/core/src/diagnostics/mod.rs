//! Scalar functionals of a state and the inequality checks built on them.

pub mod cancellation;
pub mod regularity;

use serde::Serialize;

use crate::rhs::{molecular_field_spectral, SpecState, State};
use crate::spectral::field::{QTensorField, SpectralField};
use crate::tensor::{trace_invariants, ModelParams, QTensor};

pub use cancellation::{cancellation_suite, cancellation_suite_unchecked, CancellationReport, GroupValue};
pub use regularity::{
    bernstein_survey, commutator_estimate_check, commutator_survey, log_interpolation_ratio, regularity_record,
    BernsteinSurvey, RegularityRecord,
};

/// Energy functionals at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EnergyRecord {
    pub t: f64,
    /// `½∫|u|²`
    pub e_kin: f64,
    /// Landau-de Gennes free energy including the elastic term.
    pub f_free: f64,
    pub e_total: f64,
    /// `ν∫|∇u|²`
    pub diss_visc: f64,
    /// `Γ∫tr(H²)`
    pub diss_rot: f64,
    /// `E(t) - E(t₀) + ∫_{t₀}^t D`, trapezoidal in time; zero outside a run.
    pub balance_residual: f64,
    pub l2_q: f64,
    pub l4_q: f64,
    pub l6_q: f64,
}

impl EnergyRecord {
    pub fn dissipation(&self) -> f64 {
        self.diss_visc + self.diss_rot
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.e_kin,
            self.f_free,
            self.e_total,
            self.diss_visc,
            self.diss_rot,
            self.balance_residual,
            self.l2_q,
            self.l4_q,
            self.l6_q,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

fn k2(grid: &crate::spectral::grid::Grid2D, idx: usize) -> f64 {
    let (kx, ky) = grid.wavevector(idx);
    kx * kx + ky * ky
}

/// `(L/2)∫|∇Q|²` from the spectrum.
pub(crate) fn elastic_energy(q: &SpectralField<5>, p: &ModelParams) -> f64 {
    let grid = q.grid().clone();
    0.5 * p.l_elastic * q.weighted_energy(|idx| k2(&grid, idx))
}

/// Pointwise bulk free-energy density `(a/2)trQ² - (b/3)trQ³ + (c/4)(trQ²)²`.
#[inline]
pub fn bulk_density(q: &QTensor, p: &ModelParams) -> f64 {
    let (t2, t3) = trace_invariants(q);
    0.5 * p.a * t2 - p.b / 3.0 * t3 + 0.25 * p.c * t2 * t2
}

/// `∫` of the bulk density as a lattice sum.
pub(crate) fn bulk_energy(q: &QTensorField, p: &ModelParams) -> f64 {
    (0..q.grid().len()).map(|idx| bulk_density(&q.tensor_at(idx), p)).sum::<f64>() * q.grid().cell_area()
}

/// `E = ½‖u‖² + ℱ(Q)` only, the cheap part of a record.
pub(crate) fn total_energy_spectral(s: &SpecState, p: &ModelParams) -> f64 {
    let q = s.q.to_physical();
    0.5 * s.u.l2_norm_sq() + elastic_energy(&s.q, p) + bulk_energy(&q, p)
}

pub(crate) fn energies_spectral(s: &SpecState, p: &ModelParams) -> EnergyRecord {
    let grid = s.q.grid().clone();
    let q = s.q.to_physical();
    let e_kin = 0.5 * s.u.l2_norm_sq();
    let f_free = elastic_energy(&s.q, p) + bulk_energy(&q, p);
    let diss_visc = p.nu * s.u.weighted_energy(|idx| k2(&grid, idx));
    let diss_rot = p.gamma * molecular_field_spectral(&s.q, p).l2_norm_sq();
    EnergyRecord {
        t: s.t,
        e_kin,
        f_free,
        e_total: e_kin + f_free,
        diss_visc,
        diss_rot,
        balance_residual: 0.0,
        l2_q: q.lp_norm(2.0),
        l4_q: q.lp_norm(4.0),
        l6_q: q.lp_norm(6.0),
    }
}

/// Kinetic and free energy, dissipation rates and `L^p` norms of `Q`.
pub fn energies(s: &State, p: &ModelParams) -> EnergyRecord {
    energies_spectral(&s.to_spectral(), p)
}

/// `E(t_last) - E(t_first) + ∫D dt` over a run of consecutive records, with
/// the trapezoidal rule in time. Zero for fewer than two records.
pub fn dissipation_residual(records: &[EnergyRecord]) -> f64 {
    match (records.first(), records.last()) {
        (Some(a), Some(b)) if records.len() >= 2 => b.e_total - a.e_total + dissipation_integral(records),
        _ => 0.0,
    }
}

/// Trapezoidal `∫(diss_visc + diss_rot) dt` over the records.
pub fn dissipation_integral(records: &[EnergyRecord]) -> f64 {
    records.windows(2).map(|w| 0.5 * (w[1].t - w[0].t) * (w[0].dissipation() + w[1].dissipation())).sum()
}

/// Running balance residual, filled into `balance_residual`.
#[derive(Clone, Debug, Default)]
pub struct BalanceTracker {
    start: Option<EnergyRecord>,
    last: Option<EnergyRecord>,
    integral: f64,
}

impl BalanceTracker {
    pub fn push(&mut self, mut rec: EnergyRecord) -> EnergyRecord {
        if let Some(prev) = self.last {
            self.integral += 0.5 * (rec.t - prev.t) * (prev.dissipation() + rec.dissipation());
        }
        let e0 = self.start.get_or_insert(rec).e_total;
        rec.balance_residual = rec.e_total - e0 + self.integral;
        self.last = Some(rec);
        rec
    }
}

/// Growth-rate bound for `∫tr^p(Q²)` obtained from the pointwise estimate
/// `tr(Q³) ≤ (3ε/8)tr²(Q²) + tr(Q²)/ε` with `ε = 4c/(3|b|)`:
/// `C = Γ p max(0, 3b²/(2c) - 2a)`.
pub fn lp_growth_constant(params: &ModelParams, p_exp: u32) -> f64 {
    let p = p_exp as f64;
    params.gamma * p * (1.5 * params.b * params.b / params.c - 2.0 * params.a).max(0.0)
}

/// `m_p = ∫tr^p(Q²)`.
pub fn trace_moment(q: &QTensorField, p_exp: u32) -> f64 {
    q.tr_q2().iter().map(|t| t.powi(p_exp as i32)).sum::<f64>() * q.grid().cell_area()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpGrowthReport {
    pub p_exp: u32,
    /// Largest discrete slope of `ln m_p` between consecutive samples.
    pub max_slope: f64,
    pub bound: f64,
    pub moments: Vec<(f64, f64)>,
}

impl LpGrowthReport {
    pub fn within_bound(&self) -> bool {
        self.max_slope <= self.bound
    }
}

/// Maximal logarithmic growth of `∫tr^p(Q²)` along `(t, m_p)` samples.
pub fn lp_growth_from_moments(moments: &[(f64, f64)], p_exp: u32, params: &ModelParams) -> LpGrowthReport {
    let mut max_slope = f64::NEG_INFINITY;
    for w in moments.windows(2) {
        let ((t0, m0), (t1, m1)) = (w[0], w[1]);
        let slope = if m0 == m1 {
            0.0
        } else if m0 > 0.0 && m1 > 0.0 {
            (m1.ln() - m0.ln()) / (t1 - t0)
        } else {
            // Growth out of an exactly vanishing moment has no finite rate.
            f64::INFINITY
        };
        max_slope = max_slope.max(slope);
    }
    LpGrowthReport { p_exp, max_slope, bound: lp_growth_constant(params, p_exp), moments: moments.to_vec() }
}

/// [`lp_growth_from_moments`] over a trajectory of `(t, Q)` samples.
pub fn lp_growth_monitor(traj: &[(f64, QTensorField)], p_exp: u32, params: &ModelParams) -> LpGrowthReport {
    assert!(traj.len() >= 2, "need at least two samples");
    let moments: Vec<(f64, f64)> = traj.iter().map(|(t, q)| (*t, trace_moment(q, p_exp))).collect();
    lp_growth_from_moments(&moments, p_exp, params)
}

/// `max_Q [tr(Q³) - (3ε/8)tr²(Q²) - tr(Q²)/ε]`; non-positive on S₀.
pub fn cubic_inequality_check(samples: &[QTensor], eps: f64) -> f64 {
    assert!(eps > 0.0, "eps must be positive");
    samples
        .iter()
        .map(|q| {
            let (t2, t3) = trace_invariants(q);
            t3 - 0.375 * eps * t2 * t2 - t2 / eps
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
