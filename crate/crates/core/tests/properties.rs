use nematic::checks::band_limited_field;
use nematic::io::config::{parse_config, ConfigMode};
use nematic::io::{make_initial, IcSpec, Snapshot};
use nematic::spectral::{dealias, leray_project, relative_divergence, Grid2D, VectorField};
use nematic::tensor::{bulk_force, s0_project, trace_invariants, Matrix3, ModelParams, QTensor};
use nematic::twin::spectral_transfer;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q_tensor() -> impl Strategy<Value = QTensor> {
    prop::array::uniform5(-3.0f64..3.0).prop_map(QTensor::from_components)
}

proptest! {
    #[test]
    fn cubic_inequality_holds(q in q_tensor(), eps in 0.01f64..100.0) {
        let (t2, t3) = trace_invariants(&q);
        let slack = 0.375 * eps * t2 * t2 + t2 / eps - t3;
        prop_assert!(slack >= -1e-12 * (1.0 + t2 * t2));
    }

    #[test]
    fn trace_cube_is_bounded(q in q_tensor()) {
        let (t2, t3) = trace_invariants(&q);
        prop_assert!(t3.abs() <= t2.powf(1.5) / 6f64.sqrt() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn s0_projection_is_idempotent(q in q_tensor()) {
        let back = s0_project(&q.to_matrix());
        prop_assert!(back.add(&q.scale(-1.0)).norm_sq() <= 1e-28 * (1.0 + q.norm_sq()));
    }

    #[test]
    fn bulk_force_is_orthogonal_to_commutators(q in q_tensor(), w in -2.0f64..2.0) {
        // [Ω, Q] : bulk(Q) = 0 because bulk(Q) is a polynomial in Q.
        let mut omega = Matrix3::ZERO;
        omega.0[0][1] = w;
        omega.0[1][0] = -w;
        let qm = q.to_matrix();
        let rot = omega.matmul(&qm).sub(&qm.matmul(&omega));
        let b = bulk_force(&q, &ModelParams::default()).to_matrix();
        let scale = rot.contract(&rot).sqrt() * b.contract(&b).sqrt();
        prop_assert!(rot.contract(&b).abs() <= 1e-13 * (1.0 + scale));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leray_and_dealias_are_idempotent(seed in any::<u64>(), band in 1i64..15) {
        let g = Grid2D::periodic(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: VectorField = band_limited_field(&g, band, &mut rng);
        let p = leray_project(&v);
        prop_assert!(relative_divergence(&p) <= 1e-13);
        prop_assert!(leray_project(&p).sub(&p).unwrap().max_abs() <= 1e-14);
        let d = dealias(&v);
        prop_assert!(dealias(&d).sub(&d).unwrap().max_abs() <= 1e-14);
    }

    #[test]
    fn prolong_restrict_round_trip(seed in any::<u64>(), n1 in prop::sample::select(vec![16usize, 32]), up in 1u32..3) {
        let g1 = Grid2D::periodic(n1).unwrap();
        let g2 = Grid2D::periodic(n1 << up).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: VectorField = band_limited_field(&g1, n1 as i64 / 2, &mut rng);
        let fine = spectral_transfer(&f, &g2).unwrap();
        prop_assert!(spectral_transfer(&fine, &g1).unwrap().sub(&f).unwrap().max_abs() <= 1e-13);
        prop_assert!((fine.l2_norm_sq() - f.l2_norm_sq()).abs() <= 1e-12 * f.l2_norm_sq().max(1.0));
    }

    #[test]
    fn snapshot_bytes_round_trip(seed in any::<u64>(), t in -1e6f64..1e6, step in any::<u32>()) {
        let g = Grid2D::periodic(16).unwrap();
        let mut s = make_initial(&IcSpec::RandomBand { k_max: 5.0, slope: 1.0, energy_q: 0.3, energy_u: 0.7, seed }, &g).unwrap();
        s.t = t;
        let snap = Snapshot::new(s, ModelParams::default(), seed, "if_euler", step as usize);
        let bytes = snap.to_bytes().unwrap();
        let back = Snapshot::from_bytes(&bytes).unwrap();
        prop_assert_eq!(&back.header, &snap.header);
        prop_assert_eq!(back.to_bytes().unwrap(), bytes);
    }

    #[test]
    fn config_values_round_trip(dt in 1e-6f64..1.0, l in 1e-3f64..10.0, n in prop::sample::select(vec![16usize, 32, 64, 128])) {
        let text = format!("grid_n = {n}\ndt = {dt}\nl_elastic = {l}\n");
        let cfg = parse_config(&text, ConfigMode::Run).unwrap();
        prop_assert_eq!(cfg.scheme.dt, dt);
        prop_assert_eq!(cfg.params.l_elastic, l);
        prop_assert_eq!(cfg.grid_n, n);
    }
}
