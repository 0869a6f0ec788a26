//! Pressure recovery: for Taylor–Green flow without order the pressure is
//! `(cos 2x + cos 2y)/4`.

use nematic::io::{make_initial, IcSpec};
use nematic::rhs::recover_pressure;
use nematic::spectral::{Grid2D, ScalarField};
use nematic::tensor::ModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::periodic(32)?;
    let s = make_initial(&IcSpec::TaylorGreenU { amplitude: 1.0 }, &grid)?;
    let p = recover_pressure(&s, &ModelParams::default())?;
    let exact = ScalarField::from_fn(&grid, |x, y| [0.25 * ((2.0 * x).cos() + (2.0 * y).cos())]);
    println!("max |p - exact| = {:.3e}", p.sub(&exact)?.max_abs());

    let s = make_initial(&IcSpec::default(), &grid)?;
    let p = recover_pressure(&s, &ModelParams::default())?;
    println!("random data: max |p| = {:.4e}, mean = {:.1e}", p.max_abs(), p.mean()[0]);
    Ok(())
}
