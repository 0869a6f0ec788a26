//! Snapshot round trip and restart from a saved state.

use nematic::integrator::{run, NullSink, SchemeConfig};
use nematic::io::{make_initial, read_snapshot, write_snapshot, IcSpec, Snapshot};
use nematic::spectral::Grid2D;
use nematic::tensor::ModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::default();
    let grid = Grid2D::periodic(32)?;
    let init = make_initial(&IcSpec::default(), &grid)?;
    let cfg = SchemeConfig { dt: 1e-3, t_end: 0.1, ..Default::default() };
    let rep = run(&init, &params, &cfg, &mut NullSink)?;

    let dir = std::env::temp_dir().join("qnsim-snapshot-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("state.qnsf");
    write_snapshot(&path, &Snapshot::new(rep.final_state.clone(), params, 0, "if_rk2", rep.steps))?;
    let back = read_snapshot(&path)?;
    let exact = back.state.q.components() == rep.final_state.q.components()
        && back.state.u.components() == rep.final_state.u.components();
    println!("{} ({} bytes), t = {}, bitwise equal: {exact}", path.display(), std::fs::metadata(&path)?.len(), back.header.t);

    let restart = make_initial(&IcSpec::FromFile { path: path.clone() }, &grid)?;
    let more = run(&restart, &params, &SchemeConfig { t_end: 0.2, ..cfg }, &mut NullSink)?;
    println!("restarted to t = {:.3}, E = {:.6}", more.final_state.t, more.last_record.e_total);
    Ok(())
}
