//! Integrating-factor time stepping and the run loop.
//!
//! The linear terms `ΓLΔQ` and `νΔu` are diagonal in Fourier space and are
//! integrated exactly through `E = e^{-ΓL|k|²dt}` and `e^{-ν|k|²dt}`; only the
//! nonlinear tendencies are explicit.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{energies_spectral, total_energy_spectral, BalanceTracker, EnergyRecord};
use crate::error::{Error, Result};
use crate::rhs::{projected_nonlinear, SpecState, State};
use crate::spectral::field::SpectralField;
use crate::spectral::grid::Grid2D;
use crate::spectral::ops::{dealias_in_place, leray_in_place, relative_divergence_spectral, JnFilter};
use crate::tensor::ModelParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `v⁺ = E(v + dt N(v))`
    IfEuler,
    /// Heun's method on the integrating-factor variables.
    #[default]
    IfRk2,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::IfEuler => "if_euler",
            Scheme::IfRk2 => "if_rk2",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "if_euler" => Ok(Scheme::IfEuler),
            "if_rk2" => Ok(Scheme::IfRk2),
            other => Err(format!("unknown scheme `{other}` (expected if_euler or if_rk2)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    /// Band-pass cutoff of the mollified Galerkin mode.
    pub galerkin_n_cut: Option<f64>,
    pub diag_every: usize,
    pub save_every: usize,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig { dt: 1e-3, scheme: Scheme::IfRk2, t_end: 1.0, galerkin_n_cut: None, diag_every: 1, save_every: 1000 }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| Err(Error::InvalidParameter { name, reason: reason.to_string() });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", "must be positive");
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end", "must be non-negative");
        }
        if self.diag_every == 0 {
            return bad("diag_every", "must be at least 1");
        }
        if self.save_every == 0 {
            return bad("save_every", "must be at least 1");
        }
        if let Some(n) = self.galerkin_n_cut {
            JnFilter::new(n)?;
        }
        Ok(())
    }

    /// Number of steps from `t0` to `t_end`, rounded to whole steps.
    pub fn steps_from(&self, t0: f64) -> usize {
        ((self.t_end - t0) / self.dt).round().max(0.0) as usize
    }

    /// Number of steps from `t = 0`.
    pub fn n_steps(&self) -> usize {
        self.steps_from(0.0)
    }

    pub fn filter(&self) -> Option<JnFilter> {
        self.galerkin_n_cut.map(|n| JnFilter { n_cut: n, keep_mean: false })
    }
}

/// Stepper with precomputed integrating factors.
pub(crate) struct Stepper {
    params: ModelParams,
    cfg: SchemeConfig,
    filter: Option<JnFilter>,
    decay_q: Vec<f64>,
    decay_u: Vec<f64>,
}

/// Invariant drift removed by the last step.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct StepDrift {
    pub divergence: f64,
}

fn axpy<const C: usize>(y: &mut SpectralField<C>, a: f64, x: &SpectralField<C>) {
    for c in 0..C {
        for (yi, xi) in y.component_mut(c).iter_mut().zip(x.component(c)) {
            *yi += xi * a;
        }
    }
}

fn scale_by<const C: usize>(f: &mut SpectralField<C>, w: &[f64]) {
    f.apply_real_multiplier(|idx| w[idx]);
}

impl Stepper {
    pub fn new(grid: &Grid2D, params: &ModelParams, cfg: &SchemeConfig) -> Result<Self> {
        params.validate()?;
        params.require_xi_zero()?;
        cfg.validate()?;
        let dt = cfg.dt;
        let k2: Vec<f64> = (0..grid.len())
            .map(|idx| {
                let (kx, ky) = grid.wavevector(idx);
                kx * kx + ky * ky
            })
            .collect();
        let decay_q = k2.iter().map(|k| (-params.gamma * params.l_elastic * k * dt).exp()).collect();
        let decay_u = k2.iter().map(|k| (-params.nu * k * dt).exp()).collect();
        Ok(Stepper { params: *params, cfg: *cfg, filter: cfg.filter(), decay_q, decay_u })
    }

    /// Projects initial data onto the discrete phase space: dealiased,
    /// solenoidal and, in Galerkin mode, band-limited.
    pub fn prepare(&self, s: &mut SpecState) {
        dealias_in_place(&mut s.q);
        dealias_in_place(&mut s.u);
        if let Some(f) = &self.filter {
            f.apply_spectral(&mut s.q);
            f.apply_spectral(&mut s.u);
        }
        leray_in_place(&mut s.u);
    }

    fn tendencies(&self, s: &SpecState) -> (SpectralField<5>, SpectralField<2>) {
        projected_nonlinear(s, &self.params, self.filter.as_ref())
    }

    pub fn step(&self, s: &SpecState, step_index: usize, t0: f64) -> (SpecState, StepDrift) {
        let dt = self.cfg.dt;
        let (nq, nu) = self.tendencies(s);
        let mut next = s.clone();
        match self.cfg.scheme {
            Scheme::IfEuler => {
                axpy(&mut next.q, dt, &nq);
                axpy(&mut next.u, dt, &nu);
                scale_by(&mut next.q, &self.decay_q);
                scale_by(&mut next.u, &self.decay_u);
            }
            Scheme::IfRk2 => {
                let mut mid = s.clone();
                axpy(&mut mid.q, dt, &nq);
                axpy(&mut mid.u, dt, &nu);
                scale_by(&mut mid.q, &self.decay_q);
                scale_by(&mut mid.u, &self.decay_u);
                let (nq2, nu2) = self.tendencies(&mid);
                axpy(&mut next.q, 0.5 * dt, &nq);
                axpy(&mut next.u, 0.5 * dt, &nu);
                scale_by(&mut next.q, &self.decay_q);
                scale_by(&mut next.u, &self.decay_u);
                axpy(&mut next.q, 0.5 * dt, &nq2);
                axpy(&mut next.u, 0.5 * dt, &nu2);
            }
        }
        let drift = StepDrift { divergence: relative_divergence_spectral(&next.u) };
        leray_in_place(&mut next.u);
        dealias_in_place(&mut next.q);
        dealias_in_place(&mut next.u);
        next.t = t0 + (step_index + 1) as f64 * dt;
        (next, drift)
    }
}

fn spectrum_is_finite<const C: usize>(f: &SpectralField<C>) -> bool {
    f.components().iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Advances `s` by one step of `cfg.dt`.
pub fn step(s: &State, params: &ModelParams, cfg: &SchemeConfig) -> Result<State> {
    let stepper = Stepper::new(s.grid(), params, cfg)?;
    let mut spec = s.to_spectral();
    if let Some(f) = &stepper.filter {
        f.apply_spectral(&mut spec.q);
        f.apply_spectral(&mut spec.u);
    }
    let (next, _) = stepper.step(&spec, 0, s.t);
    if !(spectrum_is_finite(&next.q) && spectrum_is_finite(&next.u)) {
        return Err(Error::NumericalFailure { step: 0, t: next.t, what: "non-finite state".into(), last_good: None });
    }
    Ok(next.to_physical())
}

/// Receives diagnostics and snapshots from [`run`].
pub trait Sink {
    /// Called at `t₀` and every `diag_every` steps.
    fn record(&mut self, _step: usize, _state: &State, _rec: &EnergyRecord) -> Result<()> {
        Ok(())
    }

    /// Called every `save_every` steps and at the final step; returns the
    /// location written, if any.
    fn save(&mut self, _step: usize, _state: &State) -> Result<Option<PathBuf>> {
        Ok(None)
    }
}

/// Discards everything.
pub struct NullSink;

impl Sink for NullSink {}

/// Keeps every energy record in memory.
#[derive(Default)]
pub struct RecordingSink {
    pub records: Vec<EnergyRecord>,
}

impl Sink for RecordingSink {
    fn record(&mut self, _step: usize, _state: &State, rec: &EnergyRecord) -> Result<()> {
        self.records.push(*rec);
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub final_state: State,
    pub steps: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub max_balance_residual: f64,
    /// Largest relative divergence removed by re-projection in one step.
    pub max_divergence_drift: f64,
    /// Largest advective CFL number `dt max|u| / h` seen at diagnostic times.
    pub max_cfl: f64,
    pub first_record: EnergyRecord,
    pub last_record: EnergyRecord,
}

/// Relative growth of `E` in one step beyond which the run is aborted.
pub const ENERGY_GROWTH_LIMIT: f64 = 0.01;

/// Integrates `init` from its time `t₀` to `cfg.t_end`, reporting to `sink`.
pub fn run(init: &State, params: &ModelParams, cfg: &SchemeConfig, sink: &mut dyn Sink) -> Result<RunReport> {
    let grid = init.grid().clone();
    init.q.grid().check_same(init.u.grid())?;
    let stepper = Stepper::new(&grid, params, cfg)?;
    let mut cur = init.to_spectral();
    stepper.prepare(&mut cur);
    let t0 = init.t;
    if init.t > cfg.t_end + 0.5 * cfg.dt {
        return Err(Error::InvalidParameter { name: "t_end", reason: format!("{} is before the initial time {}", cfg.t_end, init.t) });
    }
    let n_steps = cfg.steps_from(t0);
    let h = grid.spacing();

    let mut tracker = BalanceTracker::default();
    let mut last_saved: Option<PathBuf> = None;
    let mut e_prev = total_energy_spectral(&cur, params);
    let (mut e_min, mut e_max) = (e_prev, e_prev);
    let mut max_res: f64 = 0.0;
    let mut max_div: f64 = 0.0;
    let mut max_cfl: f64 = 0.0;

    let mut emit = |m: usize, s: &SpecState, sink: &mut dyn Sink, max_res: &mut f64, max_cfl: &mut f64| -> Result<EnergyRecord> {
        let rec = tracker.push(energies_spectral(s, params));
        *max_res = max_res.max(rec.balance_residual.abs());
        let phys = s.to_physical();
        *max_cfl = max_cfl.max(cfg.dt * phys.u.linf_norm() / h);
        sink.record(m, &phys, &rec)?;
        Ok(rec)
    };

    let first_record = emit(0, &cur, sink, &mut max_res, &mut max_cfl)?;
    let mut last_record = first_record;
    if n_steps == 0 {
        sink.save(0, &cur.to_physical())?;
    }

    for m in 0..n_steps {
        let (next, drift) = stepper.step(&cur, m, t0);
        max_div = max_div.max(drift.divergence);
        let fail = |what: String, last_good: &Option<PathBuf>| Error::NumericalFailure {
            step: m + 1,
            t: next.t,
            what,
            last_good: last_good.clone(),
        };
        if !(spectrum_is_finite(&next.q) && spectrum_is_finite(&next.u)) {
            return Err(fail("non-finite values in the state".into(), &last_saved));
        }
        let e = total_energy_spectral(&next, params);
        if !e.is_finite() {
            return Err(fail("non-finite energy".into(), &last_saved));
        }
        if e - e_prev > ENERGY_GROWTH_LIMIT * e_prev.abs() {
            return Err(fail(format!("energy grew from {e_prev} to {e} in one step"), &last_saved));
        }
        e_prev = e;
        e_min = e_min.min(e);
        e_max = e_max.max(e);
        cur = next;
        let done = m + 1;
        if done % cfg.diag_every == 0 || done == n_steps {
            last_record = emit(done, &cur, sink, &mut max_res, &mut max_cfl)?;
        }
        if done % cfg.save_every == 0 || done == n_steps {
            if let Some(p) = sink.save(done, &cur.to_physical())? {
                last_saved = Some(p);
            }
        }
    }

    Ok(RunReport {
        final_state: cur.to_physical(),
        steps: n_steps,
        e_min,
        e_max,
        max_balance_residual: max_res,
        max_divergence_drift: max_div,
        max_cfl,
        first_record,
        last_record,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::{QTensorField, VectorField};
    use crate::tensor::QTensor;

    #[test]
    fn zero_state_is_fixed() {
        let g = Grid2D::periodic(32).unwrap();
        let p = ModelParams::default();
        for scheme in [Scheme::IfEuler, Scheme::IfRk2] {
            let cfg = SchemeConfig { dt: 0.1, scheme, ..Default::default() };
            let s = step(&State::zeros(&g), &p, &cfg).unwrap();
            assert_eq!(s.q.max_abs() + s.u.max_abs(), 0.0);
        }
    }

    #[test]
    fn heat_flow_is_exact() {
        let g = Grid2D::periodic(32).unwrap();
        let p = ModelParams { a: 0.0, b: 0.0, c: 1.0, ..ModelParams::default() };
        // At amplitude 1e-7 the cubic term is far below roundoff.
        let e = QTensor::new(0.3, 0.1, -0.2, 0.4, 0.05).scale(1e-7);
        let q = QTensorField::from_tensor_fn(&g, |x, _| e.scale(x.sin()));
        let s = State::new(q.clone(), VectorField::zeros(&g), 0.0).unwrap();
        let dt = 0.05;
        for scheme in [Scheme::IfEuler, Scheme::IfRk2] {
            let cfg = SchemeConfig { dt, scheme, ..Default::default() };
            let out = step(&s, &p, &cfg).unwrap();
            let expect = q.scale((-p.gamma * p.l_elastic * dt).exp());
            let err = out.q.sub(&expect).unwrap().max_abs();
            assert!(err < 1e-21, "{err}");
            assert!((out.t - dt).abs() < 1e-15);
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::IfEuler, Scheme::IfRk2] {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("rk4".parse::<Scheme>().is_err());
    }

    #[test]
    fn t_end_zero_gives_initial_record_only() {
        let g = Grid2D::periodic(16).unwrap();
        let cfg = SchemeConfig { t_end: 0.0, ..Default::default() };
        let mut sink = RecordingSink::default();
        let rep = run(&State::zeros(&g), &ModelParams::default(), &cfg, &mut sink).unwrap();
        assert_eq!(sink.records.len(), 1);
        assert_eq!(rep.steps, 0);
    }
}
