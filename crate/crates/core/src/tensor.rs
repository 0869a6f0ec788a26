//! Pointwise algebra of symmetric traceless 3x3 tensors and the
//! Landau-de Gennes bulk quantities.
//!
//! A [`QTensor`] stores the five independent entries `q11, q12, q13, q22, q23`;
//! `q33 = -q11 - q22`. Symmetry and tracelessness therefore hold by
//! construction rather than to a tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// General 3x3 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub const ZERO: Matrix3 = Matrix3([[0.0; 3]; 3]);
    pub const IDENTITY: Matrix3 = Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn diag(d0: f64, d1: f64, d2: f64) -> Self {
        Matrix3([[d0, 0.0, 0.0], [0.0, d1, 0.0], [0.0, 0.0, d2]])
    }

    /// Outer product `a ⊗ b`.
    pub fn outer(a: [f64; 3], b: [f64; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i] * b[j];
            }
        }
        Matrix3(m)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Matrix3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Matrix3) -> Self {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().flatten().zip(other.0.iter().flatten()) {
            *o += b;
        }
        out
    }

    pub fn sub(&self, other: &Matrix3) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn matmul(&self, other: &Matrix3) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Matrix3(m)
    }

    /// Frobenius contraction `A : B = Σ_ij A_ij B_ij`.
    pub fn contract(&self, other: &Matrix3) -> f64 {
        self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Symmetric part `(M + Mᵀ)/2`.
    pub fn sym(&self) -> Self {
        self.add(&self.transpose()).scale(0.5)
    }

    /// Antisymmetric part `(M - Mᵀ)/2`.
    pub fn skew(&self) -> Self {
        self.sub(&self.transpose()).scale(0.5)
    }
}

/// `AB - BA`.
pub fn commutator(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    a.matmul(b).sub(&b.matmul(a))
}

/// Symmetric traceless 3x3 tensor (an element of S₀).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QTensor {
    pub q11: f64,
    pub q12: f64,
    pub q13: f64,
    pub q22: f64,
    pub q23: f64,
}

impl QTensor {
    pub const ZERO: QTensor = QTensor { q11: 0.0, q12: 0.0, q13: 0.0, q22: 0.0, q23: 0.0 };

    pub fn new(q11: f64, q12: f64, q13: f64, q22: f64, q23: f64) -> Self {
        QTensor { q11, q12, q13, q22, q23 }
    }

    /// `diag(x, y, -x-y)`.
    pub fn diag(x: f64, y: f64) -> Self {
        QTensor { q11: x, q22: y, ..QTensor::ZERO }
    }

    pub fn from_components(c: [f64; 5]) -> Self {
        QTensor { q11: c[0], q12: c[1], q13: c[2], q22: c[3], q23: c[4] }
    }

    pub fn components(&self) -> [f64; 5] {
        [self.q11, self.q12, self.q13, self.q22, self.q23]
    }

    #[inline]
    pub fn q33(&self) -> f64 {
        -self.q11 - self.q22
    }

    pub fn to_matrix(&self) -> Matrix3 {
        let QTensor { q11, q12, q13, q22, q23 } = *self;
        Matrix3([[q11, q12, q13], [q12, q22, q23], [q13, q23, -q11 - q22]])
    }

    pub fn scale(&self, s: f64) -> Self {
        QTensor::from_components(self.components().map(|c| c * s))
    }

    pub fn add(&self, other: &QTensor) -> Self {
        let (a, b) = (self.components(), other.components());
        QTensor::from_components(std::array::from_fn(|i| a[i] + b[i]))
    }

    /// Frobenius inner product `tr(AB)`.
    pub fn dot(&self, other: &QTensor) -> f64 {
        let (a, b) = (self, other);
        a.q11 * b.q11
            + a.q22 * b.q22
            + a.q33() * b.q33()
            + 2.0 * (a.q12 * b.q12 + a.q13 * b.q13 + a.q23 * b.q23)
    }

    /// `|Q|² = tr(Q²)`.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }
}

/// Projection onto S₀: `(M + Mᵀ)/2 - tr(M)/3 · Id`.
pub fn s0_project(m: &Matrix3) -> QTensor {
    let s = m.sym();
    let t = s.trace() / 3.0;
    QTensor::new(s.0[0][0] - t, s.0[0][1], s.0[0][2], s.0[1][1] - t, s.0[1][2])
}

/// `(tr(Q²), tr(Q³))`.
pub fn trace_invariants(q: &QTensor) -> (f64, f64) {
    let QTensor { q11, q12, q13, q22, q23 } = *q;
    let q33 = q.q33();
    let tr2 = q.norm_sq();
    // tr(Q³) = 3 det(Q) for traceless Q.
    let det = q11 * (q22 * q33 - q23 * q23) - q12 * (q12 * q33 - q23 * q13)
        + q13 * (q12 * q23 - q22 * q13);
    (tr2, 3.0 * det)
}

/// Landau-de Gennes bulk force `-aQ + b(Q² - tr(Q²)/3 Id) - cQ tr(Q²)`.
///
/// The result lies in S₀ because `Q²` is symmetric and the trace of `Q²` is
/// removed explicitly.
pub fn bulk_force(q: &QTensor, p: &ModelParams) -> QTensor {
    let qq = square(q);
    let tr2 = qq.trace;
    let lin = -p.a - p.c * tr2;
    QTensor::new(
        lin * q.q11 + p.b * (qq.m11 - tr2 / 3.0),
        lin * q.q12 + p.b * qq.m12,
        lin * q.q13 + p.b * qq.m13,
        lin * q.q22 + p.b * (qq.m22 - tr2 / 3.0),
        lin * q.q23 + p.b * qq.m23,
    )
}

struct Square {
    m11: f64,
    m12: f64,
    m13: f64,
    m22: f64,
    m23: f64,
    trace: f64,
}

#[inline]
fn square(q: &QTensor) -> Square {
    let QTensor { q11, q12, q13, q22, q23 } = *q;
    let q33 = -q11 - q22;
    let m11 = q11 * q11 + q12 * q12 + q13 * q13;
    let m22 = q12 * q12 + q22 * q22 + q23 * q23;
    let m33 = q13 * q13 + q23 * q23 + q33 * q33;
    Square {
        m11,
        m12: q11 * q12 + q12 * q22 + q13 * q23,
        m13: q11 * q13 + q12 * q23 + q13 * q33,
        m22,
        m23: q12 * q13 + q22 * q23 + q23 * q33,
        trace: m11 + m22 + m33,
    }
}

/// Uniaxial state `s (n⊗n - Id/3)`; `n` must be a unit vector to 1e-12.
pub fn uniaxial(s: f64, n: [f64; 3]) -> Result<QTensor> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if !((norm - 1.0).abs() <= 1e-12) {
        return Err(Error::NonUnitDirector(norm));
    }
    let m = Matrix3::outer(n, n).sub(&Matrix3::IDENTITY.scale(1.0 / 3.0));
    Ok(QTensor::new(
        s * m.0[0][0],
        s * m.0[0][1],
        s * m.0[0][2],
        s * m.0[1][1],
        s * m.0[1][2],
    ))
}

/// Coefficients of the system. `xi` is carried so that the general
/// co-rotational formulas can be evaluated; the integrator only accepts `xi = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub l_elastic: f64,
    pub gamma: f64,
    pub nu: f64,
    pub xi: f64,
}

impl ModelParams {
    pub fn new(a: f64, b: f64, c: f64, l_elastic: f64, gamma: f64, nu: f64, xi: f64) -> Result<Self> {
        let p = ModelParams { a, b, c, l_elastic, gamma, nu, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("l_elastic", self.l_elastic),
            ("gamma", self.gamma),
            ("nu", self.nu),
            ("xi", self.xi),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("{v} is not finite") });
            }
        }
        if self.c <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("c = {} violates the restriction c > 0 (free energy bounded from below)", self.c),
            });
        }
        for (name, v) in [("l_elastic", self.l_elastic), ("gamma", self.gamma), ("nu", self.nu)] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter { name, reason: format!("{name} = {v} must be > 0") });
            }
        }
        Ok(())
    }

    pub fn require_xi_zero(&self) -> Result<()> {
        if self.xi != 0.0 {
            return Err(Error::NonzeroXi(self.xi));
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { a: -0.2, b: 1.0, c: 1.0, l_elastic: 0.1, gamma: 1.0, nu: 0.1, xi: 0.0 }
    }
}

/// Stretching/rotation term for a general `xi`:
/// `(ξD+Ω)(Q+Id/3) + (Q+Id/3)(ξD-Ω) - 2ξ(Q+Id/3) tr(Q∇u)`.
///
/// `grad_u[i][j] = ∂_j u_i`. At `xi = 0` this is `ΩQ - QΩ`.
pub fn stretch_pointwise(grad_u: &Matrix3, q: &QTensor, xi: f64) -> Matrix3 {
    let d = grad_u.sym();
    let omega = grad_u.skew();
    let qm = q.to_matrix();
    let qs = qm.add(&Matrix3::IDENTITY.scale(1.0 / 3.0));
    let left = d.scale(xi).add(&omega).matmul(&qs);
    let right = qs.matmul(&d.scale(xi).sub(&omega));
    let tr_q_grad = qm.matmul(grad_u).trace();
    left.add(&right).sub(&qs.scale(2.0 * xi * tr_q_grad))
}

/// The `xi`-dependent, non-elastic part of the symmetric stress:
/// `-ξ(Q+Id/3)H - ξH(Q+Id/3) + 2ξ(Q+Id/3) tr(QH)`.
pub fn tau_xi_pointwise(q: &QTensor, h: &QTensor, xi: f64) -> Matrix3 {
    let qs = q.to_matrix().add(&Matrix3::IDENTITY.scale(1.0 / 3.0));
    let hm = h.to_matrix();
    let qh = q.dot(h);
    qs.matmul(&hm)
        .add(&hm.matmul(&qs))
        .scale(-xi)
        .add(&qs.scale(2.0 * xi * qh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_q(rng: &mut ChaCha8Rng, scale: f64) -> QTensor {
        QTensor::from_components(std::array::from_fn(|_| scale * rng.random_range(-1.0..1.0)))
    }

    fn rand_m(rng: &mut ChaCha8Rng) -> Matrix3 {
        Matrix3(std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))))
    }

    #[test]
    fn projection_examples() {
        assert_eq!(s0_project(&Matrix3::IDENTITY), QTensor::ZERO);
        let mut e12 = Matrix3::ZERO;
        e12.0[0][1] = 1.0;
        assert_eq!(s0_project(&e12), QTensor::new(0.0, 0.5, 0.0, 0.0, 0.0));
        let d = Matrix3::diag(2.0, -1.0, -1.0);
        assert_eq!(s0_project(&d).to_matrix(), d);
    }

    #[test]
    fn projection_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let p = s0_project(&rand_m(&mut rng));
            let pp = s0_project(&p.to_matrix());
            for (a, b) in p.components().iter().zip(pp.components()) {
                assert!((a - b).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn reconstructed_matrix_is_symmetric_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let m = rand_q(&mut rng, 3.0).to_matrix();
            assert_eq!(m, m.transpose());
            assert_eq!(m.trace(), 0.0);
        }
    }

    #[test]
    fn trace_invariant_examples() {
        assert_eq!(trace_invariants(&QTensor::diag(1.0, 1.0)), (6.0, -6.0));
        assert_eq!(trace_invariants(&QTensor::diag(2.0, -1.0)), (6.0, 6.0));
        assert_eq!(trace_invariants(&QTensor::ZERO), (0.0, 0.0));
    }

    #[test]
    fn trace_invariants_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let q = rand_q(&mut rng, 2.0);
            let m = q.to_matrix();
            let m2 = m.matmul(&m);
            let (t2, t3) = trace_invariants(&q);
            assert!((t2 - m2.trace()).abs() <= 1e-12 * (1.0 + t2));
            assert!((t3 - m2.matmul(&m).trace()).abs() <= 1e-12 * (1.0 + t2.powf(1.5)));
        }
    }

    #[test]
    fn commutator_examples() {
        let a = Matrix3::diag(1.0, -1.0, 0.0);
        let mut b = Matrix3::ZERO;
        b.0[0][1] = 1.0;
        b.0[1][0] = 1.0;
        assert_eq!(
            commutator(&a, &b),
            Matrix3([[0.0, 2.0, 0.0], [-2.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        );
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = rand_m(&mut rng);
        assert_eq!(commutator(&r, &r), Matrix3::ZERO);
        assert!(commutator(&Matrix3::IDENTITY, &r).max_abs() == 0.0);
    }

    #[test]
    fn bulk_force_uniaxial_matches_direct_arithmetic() {
        let p = ModelParams::new(0.7, 1.3, 2.1, 1.0, 1.0, 1.0, 0.0).unwrap();
        let q = QTensor::diag(2.0 / 3.0, -1.0 / 3.0);
        // Oracle: assemble the three terms with general 3x3 arithmetic.
        let m = q.to_matrix();
        let m2 = m.matmul(&m);
        let tr2 = m2.trace();
        let oracle = m
            .scale(-p.a)
            .add(&m2.sub(&Matrix3::IDENTITY.scale(tr2 / 3.0)).scale(p.b))
            .sub(&m.scale(p.c * tr2));
        let got = bulk_force(&q, &p).to_matrix();
        assert!(got.sub(&oracle).max_abs() < 1e-15);
        let closed = m.scale(-p.a + p.b / 3.0 - 2.0 * p.c / 3.0);
        assert!(got.sub(&closed).max_abs() < 1e-15);
        assert_eq!(bulk_force(&QTensor::ZERO, &p), QTensor::ZERO);
    }

    #[test]
    fn bulk_force_matches_matrix_oracle_randomly() {
        let p = ModelParams::new(-0.3, 0.8, 1.7, 1.0, 1.0, 1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let q = rand_q(&mut rng, 1.5);
            let m = q.to_matrix();
            let m2 = m.matmul(&m);
            let tr2 = m2.trace();
            let oracle = m
                .scale(-p.a)
                .add(&m2.sub(&Matrix3::IDENTITY.scale(tr2 / 3.0)).scale(p.b))
                .sub(&m.scale(p.c * tr2));
            assert!(bulk_force(&q, &p).to_matrix().sub(&oracle).max_abs() < 1e-13);
        }
    }

    #[test]
    fn uniaxial_examples() {
        let q = uniaxial(1.0, [1.0, 0.0, 0.0]).unwrap();
        let expect = QTensor::diag(2.0 / 3.0, -1.0 / 3.0);
        for (a, b) in q.components().iter().zip(expect.components()) {
            assert!((a - b).abs() < 1e-15);
        }
        let (t2, t3) = trace_invariants(&q);
        assert!((t2 - 2.0 / 3.0).abs() < 1e-15);
        assert!((t3 - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(uniaxial(0.0, [0.0, 0.6, 0.8]).unwrap().norm_sq(), 0.0);
        assert!(matches!(uniaxial(1.0, [1.0, 1.0, 0.0]), Err(Error::NonUnitDirector(_))));
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0).is_ok());
        assert!(matches!(
            ModelParams::new(0.0, 0.0, -1.0, 1.0, 1.0, 1.0, 0.0),
            Err(Error::InvalidParameter { name: "c", .. })
        ));
        assert!(ModelParams::new(0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 0.0, 1.0, 1.0, -1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        let p = ModelParams::new(0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!(matches!(p.require_xi_zero(), Err(Error::NonzeroXi(_))));
    }

    #[test]
    fn stretch_reduces_to_commutator_at_zero_xi() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let g = rand_m(&mut rng);
            let q = rand_q(&mut rng, 1.0);
            let s = stretch_pointwise(&g, &q, 0.0);
            let c = commutator(&g.skew(), &q.to_matrix());
            assert!(s.sub(&c).max_abs() <= 1e-14 * (1.0 + c.max_abs()));
        }
    }

    #[test]
    fn stretch_with_unit_xi_and_zero_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = rand_m(&mut rng).sym();
        let s = stretch_pointwise(&d, &QTensor::ZERO, 1.0);
        assert!(s.sub(&d.scale(2.0 / 3.0)).max_abs() < 1e-15);
    }

    #[test]
    fn tau_xi_vanishes_at_zero_xi() {
        let q = QTensor::new(0.1, 0.2, 0.3, -0.4, 0.5);
        let h = QTensor::new(1.0, -0.2, 0.0, 0.3, 0.1);
        assert_eq!(tau_xi_pointwise(&q, &h, 0.0).max_abs(), 0.0);
        assert!(tau_xi_pointwise(&q, &h, 0.7).max_abs() > 0.0);
    }
}
