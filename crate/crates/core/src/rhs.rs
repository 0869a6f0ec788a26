//! Right-hand sides of the ξ = 0 system
//!
//! ```text
//! ∂t Q = -(u·∇)Q + ΩQ - QΩ + Γ H,           H = bulk(Q) + L ΔQ
//! ∂t u = 𝒫[-(u·∇)u + ∂β τ_αβ + ∂β σ_αβ] + ν Δu
//! ```
//!
//! with `τ = -L(∂αQ:∂βQ - |∇Q|²δ/3)` and `σ = QH - HQ`. The flow is planar,
//! so `Ω` only has its 1-2 block and `β` runs over the two in-plane axes.
//!
//! Products are formed on the grid from dealiased inputs and dealiased on the
//! way back. `H` uses the dealiased bulk force so that the same `H` enters the
//! Q-equation, the stress `σ` and the dissipation; this makes the semi-discrete
//! energy law hold with lattice-exact triple products.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::field::{Field, QTensorField, ScalarField, SpectralField, VectorField};
use crate::spectral::grid::Grid2D;
use crate::spectral::ops::{
    dealias_in_place, derivative_multiplier, leray_in_place, relative_divergence_spectral, JnFilter,
};
use crate::tensor::{bulk_force, commutator, Matrix3, ModelParams, QTensor};

/// Tolerance on the relative divergence of a velocity accepted as solenoidal.
pub const SOLENOIDAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct State {
    pub q: QTensorField,
    pub u: VectorField,
    pub t: f64,
}

#[derive(Clone, Debug)]
pub struct RhsPair {
    pub dq: QTensorField,
    pub du: VectorField,
}

/// A 3x3 matrix at every grid node.
#[derive(Clone, Debug)]
pub struct MatrixField {
    grid: Grid2D,
    values: Vec<Matrix3>,
}

impl MatrixField {
    pub fn from_values(grid: &Grid2D, values: Vec<Matrix3>) -> Self {
        assert_eq!(values.len(), grid.len());
        MatrixField { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Matrix3] {
        &self.values
    }

    pub fn at(&self, idx: usize) -> &Matrix3 {
        &self.values[idx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.max_abs()))
    }
}

impl State {
    pub fn zeros(grid: &Grid2D) -> Self {
        State { q: QTensorField::zeros(grid), u: VectorField::zeros(grid), t: 0.0 }
    }

    /// Checks that `q` and `u` share a grid and that `u` is solenoidal.
    pub fn new(q: QTensorField, u: VectorField, t: f64) -> Result<Self> {
        q.grid().check_same(u.grid())?;
        let div = relative_divergence_spectral(&u.to_spectral());
        if div > SOLENOIDAL_TOL {
            return Err(Error::NotSolenoidal(div));
        }
        Ok(State { q, u, t })
    }

    pub fn grid(&self) -> &Grid2D {
        self.q.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.u.is_finite() && self.t.is_finite()
    }

    pub(crate) fn to_spectral(&self) -> SpecState {
        SpecState { q: self.q.to_spectral(), u: self.u.to_spectral(), t: self.t }
    }
}

/// Spectral image of a [`State`], the working representation of the integrator.
#[derive(Clone, Debug)]
pub(crate) struct SpecState {
    pub q: SpectralField<5>,
    pub u: SpectralField<2>,
    pub t: f64,
}

impl SpecState {
    pub fn to_physical(&self) -> State {
        State { q: self.q.to_physical(), u: self.u.to_physical(), t: self.t }
    }
}

fn deriv<const C: usize>(f: &SpectralField<C>, order: (u32, u32)) -> SpectralField<C> {
    let mut out = f.clone();
    let grid = f.grid().clone();
    out.apply_multiplier(|idx| derivative_multiplier(&grid, idx, order));
    out
}

fn lap<const C: usize>(f: &SpectralField<C>) -> SpectralField<C> {
    let mut out = f.clone();
    let grid = f.grid().clone();
    out.apply_real_multiplier(|idx| {
        let (kx, ky) = grid.wavevector(idx);
        -(kx * kx + ky * ky)
    });
    out
}

fn to_phys<const C: usize>(f: &SpectralField<C>) -> Vec<Vec<f64>> {
    f.to_physical().into_components().into_iter().collect()
}

#[inline]
fn q_at(c: &[Vec<f64>], idx: usize) -> QTensor {
    QTensor::new(c[0][idx], c[1][idx], c[2][idx], c[3][idx], c[4][idx])
}

#[inline]
fn sym_to_q(m: &Matrix3) -> QTensor {
    QTensor::new(m.0[0][0], m.0[0][1], m.0[0][2], m.0[1][1], m.0[1][2])
}

/// Embedded vorticity with `Ω₁₂ = w`.
#[inline]
pub(crate) fn omega_matrix(w: f64) -> Matrix3 {
    Matrix3([[0.0, w, 0.0], [-w, 0.0, 0.0], [0.0, 0.0, 0.0]])
}

/// `H = dealias(bulk(Q)) + L ΔQ` from a spectral `Q`.
pub(crate) fn molecular_field_spectral(q: &SpectralField<5>, p: &ModelParams) -> SpectralField<5> {
    let grid = q.grid();
    let qp = to_phys(q);
    let mut bulk: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; grid.len()]);
    for idx in 0..grid.len() {
        let b = bulk_force(&q_at(&qp, idx), p).components();
        for c in 0..5 {
            bulk[c][idx] = b[c];
        }
    }
    let mut h = Field::<5>::from_components(grid, bulk).to_spectral();
    dealias_in_place(&mut h);
    h.add_assign(&lap(q).scaled(p.l_elastic));
    h
}

/// Nonlinear tendencies, dealiased: the Q part excludes `ΓLΔQ`, the
/// momentum part excludes `νΔu` and is not yet projected.
pub(crate) struct Nonlinear {
    pub q: SpectralField<5>,
    pub u: SpectralField<2>,
}

pub(crate) fn nonlinear_terms(q_hat: &SpectralField<5>, u_hat: &SpectralField<2>, p: &ModelParams) -> Nonlinear {
    let grid = q_hat.grid().clone();
    let n = grid.len();
    let l = p.l_elastic;

    let h_hat = molecular_field_spectral(q_hat, p);
    let bulk_hat = {
        let mut b = h_hat.clone();
        b.add_assign(&lap(q_hat).scaled(-l));
        b
    };

    let q = to_phys(q_hat);
    let qx = to_phys(&deriv(q_hat, (1, 0)));
    let qy = to_phys(&deriv(q_hat, (0, 1)));
    let h = to_phys(&h_hat);
    let u = to_phys(u_hat);
    let ux = to_phys(&deriv(u_hat, (1, 0)));
    let uy = to_phys(&deriv(u_hat, (0, 1)));

    let mut transport: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    let mut mom: [Vec<f64>; 2] = std::array::from_fn(|_| vec![0.0; n]);
    // Stress components s11, s12, s21, s22 of τ + σ.
    let mut stress: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);

    for idx in 0..n {
        let (u1, u2) = (u[0][idx], u[1][idx]);
        let qv = q_at(&q, idx);
        let dx = q_at(&qx, idx);
        let dy = q_at(&qy, idx);
        let hv = q_at(&h, idx);
        // ∂_j u_i
        let g = [[ux[0][idx], uy[0][idx]], [ux[1][idx], uy[1][idx]]];
        let w = 0.5 * (g[0][1] - g[1][0]);

        let qm = qv.to_matrix();
        let rot = sym_to_q(&commutator(&omega_matrix(w), &qm));
        let dxc = dx.components();
        let dyc = dy.components();
        let rc = rot.components();
        for c in 0..5 {
            transport[c][idx] = -(u1 * dxc[c] + u2 * dyc[c]) + rc[c];
        }

        for a in 0..2 {
            mom[a][idx] = -(u1 * g[a][0] + u2 * g[a][1]);
        }

        let (gxx, gxy, gyy) = (dx.dot(&dx), dx.dot(&dy), dy.dot(&dy));
        let iso = (gxx + gyy) / 3.0;
        let sigma12 = commutator(&qm, &hv.to_matrix()).0[0][1];
        stress[0][idx] = -l * (gxx - iso);
        stress[1][idx] = -l * gxy + sigma12;
        stress[2][idx] = -l * gxy - sigma12;
        stress[3][idx] = -l * (gyy - iso);
    }

    let mut q_out = Field::<5>::from_components(&grid, transport).to_spectral();
    q_out.add_assign(&bulk_hat.scaled(p.gamma));
    dealias_in_place(&mut q_out);

    let mut u_out = Field::<2>::from_components(&grid, mom).to_spectral();
    let s_hat = Field::<4>::from_components(&grid, stress).to_spectral();
    for idx in 0..n {
        let (kx, ky) = grid.derivative_wavevector(idx);
        let i = Complex64::new(0.0, 1.0);
        let s = s_hat.mode(idx);
        u_out.component_mut(0)[idx] += i * (s[0] * kx + s[1] * ky);
        u_out.component_mut(1)[idx] += i * (s[2] * kx + s[3] * ky);
    }
    dealias_in_place(&mut u_out);

    Nonlinear { q: q_out, u: u_out }
}

/// Nonlinear tendencies ready for time stepping: filtered when in Galerkin
/// mode and Leray-projected.
pub(crate) fn projected_nonlinear(
    s: &SpecState,
    p: &ModelParams,
    filter: Option<&JnFilter>,
) -> (SpectralField<5>, SpectralField<2>) {
    let Nonlinear { mut q, mut u } = nonlinear_terms(&s.q, &s.u, p);
    if let Some(f) = filter {
        f.apply_spectral(&mut q);
        f.apply_spectral(&mut u);
    }
    leray_in_place(&mut u);
    (q, u)
}

/// Embedded 3x3 vorticity `Ω = ½(∇u - ∇uᵀ)`.
pub fn vorticity(u: &VectorField) -> MatrixField {
    let s = u.to_spectral();
    let d12 = deriv(&s, (0, 1)).to_physical();
    let d21 = deriv(&s, (1, 0)).to_physical();
    let values = (0..u.grid().len())
        .map(|idx| omega_matrix(0.5 * (d12.component(0)[idx] - d21.component(1)[idx])))
        .collect();
    MatrixField::from_values(u.grid(), values)
}

/// Velocity gradient `g[i][j] = ∂_j u_i` embedded in 3x3.
pub fn velocity_gradient(u: &VectorField) -> MatrixField {
    let s = u.to_spectral();
    let dx = deriv(&s, (1, 0)).to_physical();
    let dy = deriv(&s, (0, 1)).to_physical();
    let values = (0..u.grid().len())
        .map(|idx| {
            let mut m = Matrix3::ZERO;
            m.0[0][0] = dx.component(0)[idx];
            m.0[0][1] = dy.component(0)[idx];
            m.0[1][0] = dx.component(1)[idx];
            m.0[1][1] = dy.component(1)[idx];
            m
        })
        .collect();
    MatrixField::from_values(u.grid(), values)
}

/// `H = bulk(Q) + LΔQ` with the bulk force dealiased.
pub fn molecular_field(q: &QTensorField, p: &ModelParams) -> QTensorField {
    molecular_field_spectral(&q.to_spectral(), p).to_physical()
}

/// `(ξD+Ω)(Q+Id/3) + (Q+Id/3)(ξD-Ω) - 2ξ(Q+Id/3)tr(Q∇u)` at every node.
pub fn stretch_term(grad_u: &MatrixField, q: &QTensorField, xi: f64) -> Result<MatrixField> {
    grad_u.grid().check_same(q.grid())?;
    let values =
        (0..q.grid().len()).map(|idx| crate::tensor::stretch_pointwise(grad_u.at(idx), &q.tensor_at(idx), xi)).collect();
    Ok(MatrixField::from_values(q.grid(), values))
}

/// `(τ, σ)`: at `ξ = 0`, `τ = -L(∂αQ:∂βQ - |∇Q|²δαβ/3)` on the in-plane
/// block and `σ = QH - HQ`. For `ξ ≠ 0` the co-rotational part of `τ` is added.
pub fn stress_tensors(q: &QTensorField, h: &QTensorField, p: &ModelParams) -> Result<(MatrixField, MatrixField)> {
    q.grid().check_same(h.grid())?;
    let s = q.to_spectral();
    let dx = deriv(&s, (1, 0)).to_physical();
    let dy = deriv(&s, (0, 1)).to_physical();
    let l = p.l_elastic;
    let mut tau = Vec::with_capacity(q.grid().len());
    let mut sigma = Vec::with_capacity(q.grid().len());
    for idx in 0..q.grid().len() {
        let (ax, ay) = (dx.tensor_at(idx), dy.tensor_at(idx));
        let (gxx, gxy, gyy) = (ax.dot(&ax), ax.dot(&ay), ay.dot(&ay));
        let iso = (gxx + gyy) / 3.0;
        let mut t = Matrix3::ZERO;
        t.0[0][0] = -l * (gxx - iso);
        t.0[0][1] = -l * gxy;
        t.0[1][0] = -l * gxy;
        t.0[1][1] = -l * (gyy - iso);
        t.0[2][2] = l * iso;
        let (qv, hv) = (q.tensor_at(idx), h.tensor_at(idx));
        if p.xi != 0.0 {
            t = t.add(&crate::tensor::tau_xi_pointwise(&qv, &hv, p.xi));
        }
        tau.push(t);
        sigma.push(commutator(&qv.to_matrix(), &hv.to_matrix()));
    }
    Ok((MatrixField::from_values(q.grid(), tau), MatrixField::from_values(q.grid(), sigma)))
}

/// Time derivatives of `(Q, u)`. With `n_cut`, the nonlinear terms are passed
/// through the band-pass mollifier before projection.
pub fn rhs_fields(s: &State, p: &ModelParams, n_cut: Option<f64>) -> Result<RhsPair> {
    p.require_xi_zero()?;
    s.q.grid().check_same(s.u.grid())?;
    let filter = n_cut.map(JnFilter::new).transpose()?;
    let spec = s.to_spectral();
    let (mut dq, mut du) = projected_nonlinear(&spec, p, filter.as_ref());
    dq.add_assign(&lap(&spec.q).scaled(p.gamma * p.l_elastic));
    du.add_assign(&lap(&spec.u).scaled(p.nu));
    Ok(RhsPair { dq: dq.to_physical(), du: du.to_physical() })
}

/// Pressure with `∇p = (I - 𝒫)N`, `N` the unprojected momentum forcing
/// without the viscous term, normalized to zero mean.
pub fn recover_pressure(s: &State, p: &ModelParams) -> Result<ScalarField> {
    p.require_xi_zero()?;
    let spec = s.to_spectral();
    let n_hat = nonlinear_terms(&spec.q, &spec.u, p).u;
    Ok(pressure_from_forcing(&n_hat).to_physical())
}

pub(crate) fn pressure_from_forcing(n_hat: &SpectralField<2>) -> SpectralField<1> {
    let grid = n_hat.grid();
    let i = Complex64::new(0.0, 1.0);
    let data = (0..grid.len())
        .map(|idx| {
            let (kx, ky) = grid.derivative_wavevector(idx);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                return Complex64::default();
            }
            let [a, b] = n_hat.mode(idx);
            -i * (a * kx + b * ky) / k2
        })
        .collect();
    SpectralField::from_components(grid, [data])
}

/// Unprojected momentum forcing `N = -(u·∇)u + ∇·(τ + σ)`, dealiased.
pub fn momentum_forcing(s: &State, p: &ModelParams) -> Result<VectorField> {
    p.require_xi_zero()?;
    let spec = s.to_spectral();
    Ok(nonlinear_terms(&spec.q, &spec.u, p).u.to_physical())
}
