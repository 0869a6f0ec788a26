//! Energy balance of a smooth random run and its convergence under dt halving.

use nematic::integrator::{run, RecordingSink, Scheme, SchemeConfig};
use nematic::io::{make_initial, IcSpec};
use nematic::spectral::Grid2D;
use nematic::tensor::ModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::periodic(64)?;
    let params = ModelParams::default();
    let init = make_initial(&IcSpec::default(), &grid)?;
    let mut prev: Option<f64> = None;
    for dt in [2e-3, 1e-3, 5e-4] {
        let cfg = SchemeConfig { dt, scheme: Scheme::IfRk2, t_end: 1.0, ..Default::default() };
        let mut sink = RecordingSink::default();
        let rep = run(&init, &params, &cfg, &mut sink)?;
        let rise = sink
            .records
            .windows(2)
            .map(|w| w[1].e_total - w[0].e_total)
            .fold(f64::NEG_INFINITY, f64::max);
        print!(
            "dt = {dt:e}: E {:.6} -> {:.6}, max step rise {rise:.3e}, max |residual| {:.3e}",
            sink.records[0].e_total, rep.last_record.e_total, rep.max_balance_residual
        );
        if let Some(p) = prev {
            print!(", ratio {:.3}", p / rep.max_balance_residual);
        }
        println!();
        prev = Some(rep.max_balance_residual);
    }
    Ok(())
}
