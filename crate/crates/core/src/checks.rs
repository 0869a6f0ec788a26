//! Property suites behind `qnsim check`: integral identities, the cubic trace
//! inequality, and the Littlewood–Paley machinery.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagnostics::{
    bernstein_survey, cancellation_suite, cancellation_suite_unchecked, commutator_survey, cubic_inequality_check,
};
use crate::error::Result;
use crate::spectral::field::{Field, QTensorField, ScalarField, SpectralField, VectorField};
use crate::spectral::grid::Grid2D;
use crate::spectral::lp::{hs_norm, HsMethod, LittlewoodPaley, LpProfile};
use crate::spectral::ops::{dealias_in_place, leray_project};
use crate::tensor::{s0_project, trace_invariants, Matrix3, ModelParams, QTensor};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// `true` when `value` must stay at or below `limit`, `false` for a lower bound.
    pub upper: bool,
    pub passed: bool,
}

impl CheckResult {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        CheckResult { name: name.into(), value, limit, upper: true, passed: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        CheckResult { name: name.into(), value, limit, upper: false, passed: value >= limit }
    }

    pub fn line(&self) -> String {
        let op = if self.upper { "<=" } else { ">=" };
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {:e} {op} {:e}", self.name, self.value, self.limit)
    }
}

/// Random dealiased field with modes `max(|jx|, |jy|) ≤ k_max`, scaled to unit maximum.
pub fn band_limited_field<const C: usize>(grid: &Grid2D, k_max: i64, rng: &mut ChaCha8Rng) -> Field<C> {
    let n = grid.n();
    let mut s = SpectralField::<C>::zeros(grid);
    for idx in 0..grid.len() {
        let (jx, jy) = grid.mode(idx);
        if !(jy > 0 || (jy == 0 && jx > 0)) || jx.abs().max(jy.abs()) > k_max {
            continue;
        }
        let conj = grid.index_of(-jx) + n * grid.index_of(-jy);
        for c in 0..C {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            s.component_mut(c)[idx] = z;
            s.component_mut(c)[conj] = z.conj();
        }
    }
    dealias_in_place(&mut s);
    let f = s.to_physical();
    let m = f.max_abs();
    if m == 0.0 {
        f
    } else {
        f.scale(1.0 / m)
    }
}

/// Integral identities over `samples` random triples at `N = 64` with band 10,
/// plus the divergent-velocity negative control.
pub fn cancellation_checks(samples: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let grid = Grid2D::periodic(64)?;
    let p = ModelParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 6];
    let mut names = [""; 6];
    for _ in 0..samples {
        let qp: QTensorField = band_limited_field(&grid, 10, &mut rng);
        let q: QTensorField = band_limited_field(&grid, 10, &mut rng);
        let u = leray_project(&band_limited_field::<2>(&grid, 10, &mut rng));
        let rep = cancellation_suite(&qp, &q, &u, &p)?;
        for (i, g) in rep.groups.iter().enumerate() {
            worst[i] = worst[i].max(g.normalized);
            names[i] = g.name;
        }
    }
    let mut out: Vec<CheckResult> =
        names.iter().zip(worst).map(|(n, w)| CheckResult::at_most(format!("cancellation {n}"), w, 1e-10)).collect();

    let e = QTensor::new(0.4, 0.1, 0.0, -0.2, 0.3);
    let q = QTensorField::from_tensor_fn(&grid, |x, _| e.scale(0.5 + x.cos()));
    let u = VectorField::from_fn(&grid, |x, _| [x.sin(), 0.0]);
    let rep = cancellation_suite_unchecked(&q, &q, &u, &p)?;
    let control = rep.get("I").map_or(0.0, |g| g.normalized);
    out.push(CheckResult::at_least("cancellation I, divergent control", control, 1e-3));
    Ok(out)
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3 {
    let mut q = [0.0f64; 4];
    loop {
        for v in &mut q {
            *v = rng.random_range(-1.0..1.0);
        }
        let n = q.iter().map(|v| v * v).sum::<f64>();
        if n > 1e-3 && n <= 1.0 {
            let s = n.sqrt();
            q.iter_mut().for_each(|v| *v /= s);
            break;
        }
    }
    let [w, x, y, z] = q;
    Matrix3([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])
}

/// Rotated `diag(x, y, -x-y)` samples with their eigenvalue pairs.
pub fn random_s0_samples(count: usize, seed: u64) -> Vec<(QTensor, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let scale = 10f64.powf(rng.random_range(-2.0..2.0));
            let x = scale * rng.random_range(-1.0..1.0);
            let y = scale * rng.random_range(-1.0..1.0);
            let r = random_rotation(&mut rng);
            let m = r.matmul(&Matrix3::diag(x, y, -x - y)).matmul(&r.transpose());
            (s0_project(&m), x, y)
        })
        .collect()
}

/// Eigenvalue identities for `tr(Q²)`, `tr(Q³)` and the cubic inequality.
pub fn cubic_checks(samples: usize, seed: u64) -> Vec<CheckResult> {
    let data = random_s0_samples(samples, seed);
    let (mut e2, mut e3) = (0.0f64, 0.0f64);
    for (q, x, y) in &data {
        let (t2, t3) = trace_invariants(q);
        let want2 = 2.0 * (x * x + y * y + x * y);
        let want3 = -3.0 * x * y * (x + y);
        // tr(Q³) can cancel; measure it against the natural scale |Q|³.
        let scale3 = want2.powf(1.5);
        e2 = e2.max((t2 - want2).abs() / want2);
        if scale3 > 0.0 {
            e3 = e3.max((t3 - want3).abs() / scale3);
        }
    }
    let qs: Vec<QTensor> = data.iter().map(|d| d.0).collect();
    let mut out = vec![
        CheckResult::at_most("tr(Q^2) eigenvalue identity", e2, 1e-12),
        CheckResult::at_most("tr(Q^3) eigenvalue identity", e3, 1e-12),
    ];
    for eps in [0.1, 1.0, 10.0] {
        out.push(CheckResult::at_most(format!("cubic inequality, eps = {eps}"), cubic_inequality_check(&qs, eps), 0.0));
    }
    out
}

fn random_scalar(grid: &Grid2D, rng: &mut ChaCha8Rng) -> ScalarField {
    let n = grid.n();
    let mut s = SpectralField::<1>::zeros(grid);
    for idx in 0..grid.len() {
        let (jx, jy) = grid.mode(idx);
        if !(jy > 0 || (jy == 0 && jx >= 0)) || grid.is_nyquist(jx) || grid.is_nyquist(jy) {
            continue;
        }
        let amp = (1.0 + grid.k_abs(idx)).powf(-rng.random_range(0.5..2.0));
        let z = Complex64::new(rng.random_range(-amp..amp), rng.random_range(-amp..amp));
        let conj = grid.index_of(-jx) + n * grid.index_of(-jy);
        s.component_mut(0)[idx] = z;
        s.component_mut(0)[conj] = z.conj();
    }
    if let Some(z) = s.component_mut(0).first_mut() {
        z.im = 0.0;
    }
    s.to_physical()
}

/// Band with equal energy per octave up to `|k| ≤ 40`.
pub fn octave_flat_field(grid: &Grid2D, rng: &mut ChaCha8Rng) -> ScalarField {
    let mut s = SpectralField::<1>::zeros(grid);
    let n = grid.n();
    for idx in 0..grid.len() {
        let (jx, jy) = grid.mode(idx);
        let k = grid.k_abs(idx);
        if !(jy > 0 || (jy == 0 && jx > 0)) || k > 40.0 {
            continue;
        }
        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let z = Complex64::from_polar(1.0 / k, th);
        let conj = grid.index_of(-jx) + n * grid.index_of(-jy);
        s.component_mut(0)[idx] = z;
        s.component_mut(0)[conj] = z.conj();
    }
    s.to_physical()
}

/// Random trigonometric polynomial with `|k| ≤ 2`.
pub fn low_mode_field(grid: &Grid2D, rng: &mut ChaCha8Rng) -> ScalarField {
    let mut terms = Vec::new();
    for jx in 0..=2i32 {
        for jy in -2..=2i32 {
            if (jx == 0 && jy <= 0) || jx * jx + jy * jy > 4 {
                continue;
            }
            terms.push((jx as f64, jy as f64, rng.random_range(-1.0..1.0), rng.random_range(0.0..std::f64::consts::TAU)));
        }
    }
    let k0 = grid.k0();
    ScalarField::from_fn(grid, |x, y| [terms.iter().map(|(a, b, c, ph)| c * (k0 * (a * x + b * y) + ph).cos()).sum()])
}

fn flatness(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut any = false;
    for v in values {
        if !v.is_finite() || v <= 0.0 {
            return f64::INFINITY;
        }
        any = true;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if any {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Partition of unity, reconstruction, Parseval, dyadic versus direct `H^s`,
/// and the Bernstein and commutator surveys.
pub fn lp_checks(fields: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g64 = Grid2D::periodic(64)?;
    for profile in [LpProfile::Sharp, LpProfile::Smooth] {
        let lp = LittlewoodPaley::new(&g64, profile);
        out.push(CheckResult::at_most(format!("partition of unity ({profile:?})"), lp.partition_defect(), 1e-12));
    }

    let (mut recon, mut parseval) = (0.0f64, 0.0f64);
    let mut ratio = [(f64::INFINITY, 0.0f64); 3];
    for _ in 0..fields {
        let f = random_scalar(&g64, &mut rng);
        let norm_sq = f.l2_norm_sq();
        for profile in [LpProfile::Sharp, LpProfile::Smooth] {
            let d = LittlewoodPaley::new(&g64, profile).decompose(&f);
            recon = recon.max(d.reconstruct().sub(&f)?.l2_norm() / norm_sq.sqrt());
        }
        let (low, blocks) = LittlewoodPaley::new(&g64, LpProfile::Sharp).block_energies(&f.to_spectral());
        parseval = parseval.max((low + blocks.iter().sum::<f64>() - norm_sq).abs() / norm_sq);
        for (i, s) in [0.0, 1.0, 2.0].into_iter().enumerate() {
            let r = hs_norm(&f, s, HsMethod::Dyadic) / hs_norm(&f, s, HsMethod::Direct);
            ratio[i] = (ratio[i].0.min(r), ratio[i].1.max(r));
        }
    }
    out.push(CheckResult::at_most("reconstruction", recon, 1e-12));
    out.push(CheckResult::at_most("sharp-block Parseval", parseval, 1e-12));
    // For 2^q ≤ |k| < 2^{q+1}: 2^{2qs}/(1+|k|²)^s lies in [5^{-s}, 1].
    for (i, s) in [0.0f64, 1.0, 2.0].into_iter().enumerate() {
        let (lo, hi) = ratio[i];
        out.push(CheckResult::at_least(format!("H^{s} dyadic/direct min"), lo, 5f64.powf(-s / 2.0) - 1e-12));
        out.push(CheckResult::at_most(format!("H^{s} dyadic/direct max"), hi, 1.0 + 1e-12));
    }

    let g128 = Grid2D::periodic(128)?;
    let b = octave_flat_field(&g128, &mut rng);
    let a = low_mode_field(&g128, &mut rng);
    for p in [2.0, f64::INFINITY] {
        let s = bernstein_survey(&b, p, LpProfile::Smooth, 2..=5);
        let finite = s.rows.len() == 4;
        let cols = [
            flatness(s.rows.iter().map(|r| r.lower)),
            flatness(s.rows.iter().map(|r| r.upper)),
            flatness(s.rows.iter().map(|r| r.low_pass)),
        ];
        let flat = if finite { cols.into_iter().fold(0.0, f64::max) } else { f64::INFINITY };
        out.push(CheckResult::at_most(format!("Bernstein flatness (p = {p})"), flat, 10.0));
    }
    let comm = commutator_survey(&a, &b, 2..=5)?;
    out.push(CheckResult::at_most("commutator flatness", flatness(comm.iter().map(|(_, r)| *r)), 10.0));
    Ok(out)
}

/// Everything `qnsim check` runs.
pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = cancellation_checks(50, seed)?;
    out.extend(cubic_checks(100_000, seed));
    out.extend(lp_checks(100, seed)?);
    Ok(out)
}
