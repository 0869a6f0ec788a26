//! Dyadic blocks of a field with equal energy per octave, the two H^s norms,
//! and the Bernstein and commutator surveys.

use nematic::checks::{low_mode_field, octave_flat_field};
use nematic::diagnostics::{bernstein_survey, commutator_survey};
use nematic::spectral::{hs_norm, lp_decompose, Grid2D, HsMethod, LpProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::periodic(128)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = octave_flat_field(&grid, &mut rng);
    let a = low_mode_field(&grid, &mut rng);

    let d = lp_decompose(&b, LpProfile::Sharp);
    let (low, blocks) = d.block_energies();
    println!("low block energy {low:.3e}");
    for (q, e) in blocks.iter().enumerate() {
        println!("block {q}: [{:>3}, {:>3})  energy {e:.4e}", 1 << q, 2 << q);
    }
    let err = d.reconstruct().sub(&b)?.l2_norm() / b.l2_norm();
    println!("relative reconstruction error {err:.2e}");

    for s in [0.0, 1.0, 2.0] {
        let (direct, dyadic) = (hs_norm(&b, s, HsMethod::Direct), hs_norm(&b, s, HsMethod::Dyadic));
        println!("H^{s}: direct {direct:.6e}, dyadic {dyadic:.6e}, ratio {:.4}", dyadic / direct);
    }

    for p in [2.0, f64::INFINITY] {
        let survey = bernstein_survey(&b, p, LpProfile::Smooth, 2..=5);
        for r in &survey.rows {
            println!("Bernstein p = {p}, q = {}: lower {:.3}, upper {:.3}, low-pass {:.3}", r.q, r.lower, r.upper, r.low_pass);
        }
    }
    for (q, r) in commutator_survey(&a, &b, 2..=5)? {
        println!("commutator q = {q}: {r:.4}");
    }
    Ok(())
}
