//! Mollified Galerkin mode: the band-limited system keeps its spectrum in
//! `1/n ≤ |k| ≤ n`.

use nematic::integrator::{run, SchemeConfig, Sink};
use nematic::diagnostics::EnergyRecord;
use nematic::io::{make_initial, IcSpec};
use nematic::rhs::State;
use nematic::spectral::{Grid2D, JnFilter};
use nematic::tensor::ModelParams;

struct Leak {
    filter: JnFilter,
}

impl Sink for Leak {
    fn record(&mut self, step: usize, state: &State, rec: &EnergyRecord) -> nematic::Result<()> {
        if step % 200 == 0 {
            let grid = state.grid().clone();
            let uh = state.u.to_spectral();
            let out = uh.weighted_energy(|idx| if self.filter.retains(&grid, idx) { 0.0 } else { 1.0 });
            println!("t = {:.2}: E = {:.6}, out-of-band u energy {out:.3e}", rec.t, rec.e_total);
        }
        Ok(())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::periodic(64)?;
    let n_cut = 8.0;
    let init = make_initial(&IcSpec::RandomBand { k_max: 12.0, slope: 1.0, energy_q: 0.5, energy_u: 0.5, seed: 2 }, &grid)?;
    let cfg = SchemeConfig { dt: 1e-3, t_end: 1.0, galerkin_n_cut: Some(n_cut), ..Default::default() };
    run(&init, &ModelParams::default(), &cfg, &mut Leak { filter: JnFilter::new(n_cut)? })?;
    Ok(())
}
