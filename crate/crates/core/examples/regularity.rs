//! High-norm monitor along a run: φ, its low/high split and the logarithmic
//! interpolation ratio.

use nematic::diagnostics::{regularity_record, EnergyRecord};
use nematic::integrator::{run, SchemeConfig, Sink};
use nematic::io::{make_initial, IcSpec};
use nematic::rhs::State;
use nematic::spectral::Grid2D;
use nematic::tensor::ModelParams;

struct Monitor(ModelParams);

impl Sink for Monitor {
    fn record(&mut self, _step: usize, state: &State, _rec: &EnergyRecord) -> nematic::Result<()> {
        let r = regularity_record(state, 1.5, &self.0)?;
        println!("{:>5.2} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>10.5}", r.t, r.phi, r.phi2, r.f, r.g, r.bg_ratio);
        Ok(())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::default();
    let init = make_initial(&IcSpec::default(), &Grid2D::periodic(64)?)?;
    let cfg = SchemeConfig { dt: 1e-3, t_end: 2.0, diag_every: 100, ..Default::default() };
    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>10}", "t", "phi", "phi2", "f", "g", "ratio");
    run(&init, &params, &cfg, &mut Monitor(params))?;
    Ok(())
}
