//! The integral identities behind the energy law on random band-limited
//! fields, and their failure for a divergent velocity.

use nematic::checks::band_limited_field;
use nematic::diagnostics::{cancellation_suite, cancellation_suite_unchecked};
use nematic::spectral::{leray_project, Grid2D, QTensorField, VectorField};
use nematic::tensor::ModelParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::periodic(64)?;
    let params = ModelParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let qp: QTensorField = band_limited_field(&grid, 10, &mut rng);
    let q: QTensorField = band_limited_field(&grid, 10, &mut rng);
    let raw: VectorField = band_limited_field(&grid, 10, &mut rng);

    println!("{:<8} {:>14} {:>14} {:>12}", "group", "sum", "scale", "normalized");
    for g in cancellation_suite(&qp, &q, &leray_project(&raw), &params)?.groups {
        println!("{:<8} {:>14.3e} {:>14.3e} {:>12.3e}", g.name, g.value, g.scale, g.normalized);
    }
    println!("\nwithout the projection:");
    for g in cancellation_suite_unchecked(&qp, &q, &raw, &params)?.groups {
        println!("{:<8} {:>14.3e} {:>14.3e} {:>12.3e}", g.name, g.value, g.scale, g.normalized);
    }
    Ok(())
}
