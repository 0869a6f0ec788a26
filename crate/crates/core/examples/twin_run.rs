//! Resolution twins: δ-energy between coarse and fine runs and the fitted
//! Gronwall rate.

use nematic::integrator::SchemeConfig;
use nematic::io::{make_initial, IcSpec};
use nematic::spectral::Grid2D;
use nematic::tensor::ModelParams;
use nematic::twin::{gronwall_check, twin_run};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::default();
    let init = make_initial(&IcSpec::default(), &Grid2D::periodic(128)?)?;
    for (n1, dt, every) in [(32, 1e-3, 50), (64, 1e-3, 50), (64, 5e-4, 100)] {
        let cfg = SchemeConfig { dt, t_end: 1.0, diag_every: every, ..Default::default() };
        let series = twin_run(&init, &params, &cfg, n1, 128)?;
        let last = series.rows.last().unwrap();
        let rep = gronwall_check(&series);
        println!("{n1:>3} vs 128, dt = {dt:e}: final delta_e {:.3e}, k_strong {:.3}, {}", last.delta_e, last.k_strong, rep.summary());
    }
    Ok(())
}
