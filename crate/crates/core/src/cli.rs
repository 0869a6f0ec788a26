//! The `qnsim` command line.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::checks;
use crate::diagnostics::{regularity_record, EnergyRecord, RegularityRecord};
use crate::error::{Error, Result};
use crate::integrator::{run, Sink};
use crate::io::config::{parse_config, ConfigError, ConfigMode, RunConfig};
use crate::io::csv::{write_csv, CsvWriter};
use crate::io::{make_initial, read_snapshot, write_snapshot, Snapshot};
use crate::rhs::{molecular_field, recover_pressure, stress_tensors, stretch_term, velocity_gradient, State};
use crate::spectral::grid::Grid2D;
use crate::spectral::lp::{hs_norm_spectral, HsMethod, LittlewoodPaley, LpProfile};
use crate::tensor::ModelParams;
use crate::twin::{gronwall_check, twin_run};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "qnsim", version, about = "Q-tensor / Navier–Stokes simulator on the periodic square")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate per config; writes energy.csv, regularity.csv and snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the invariant and property suites; exit 4 on any violation.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Twin runs at two resolutions; writes gronwall.csv.
    Twin {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Littlewood–Paley analysis of a snapshot.
    Lp {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 1.5)]
        s_index: f64,
        #[arg(long, value_enum, default_value_t = Profile::Sharp)]
        profile: Profile,
    },
    /// Recover the pressure of a snapshot; writes an n×n CSV raster.
    Pressure {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value = "pressure.csv")]
        out: PathBuf,
    },
    /// Evaluate the pointwise formulas on the initial data; xi ≠ 0 allowed.
    CheckFormulas {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Profile {
    Sharp,
    Smooth,
}

impl From<Profile> for LpProfile {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Sharp => LpProfile::Sharp,
            Profile::Smooth => LpProfile::Smooth,
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NumericalFailure { .. } | Error::Undefined(_) => EXIT_NUMERICAL,
        Error::Io(_) | Error::Snapshot(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::NumericalFailure { last_good: Some(p), .. } = &e {
                eprintln!("last good snapshot: {}", p.display());
            }
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run { config, output_dir } => cmd_run(&config, output_dir),
        Command::Check { seed } => cmd_check(seed),
        Command::Twin { config, n1, n2, output_dir } => cmd_twin(&config, n1, n2, output_dir),
        Command::Lp { snapshot, s_index, profile } => cmd_lp(&snapshot, s_index, profile.into()),
        Command::Pressure { snapshot, out } => cmd_pressure(&snapshot, &out),
        Command::CheckFormulas { config } => cmd_check_formulas(&config),
    }
}

pub fn load_config(path: &Path, mode: ConfigMode) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    Ok(parse_config(&text, mode)?)
}

fn initial_state(cfg: &RunConfig) -> Result<(Grid2D, State)> {
    let grid = Grid2D::new(cfg.grid_n, cfg.box_len)?;
    let s = make_initial(&cfg.ic, &grid)?;
    Ok((grid, s))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes the CSV time series and snapshots of a run.
pub struct FileSink {
    dir: PathBuf,
    energy: CsvWriter<BufWriter<fs::File>>,
    regularity: CsvWriter<BufWriter<fs::File>>,
    params: ModelParams,
    seed: u64,
    scheme: String,
    s_index: f64,
}

impl FileSink {
    pub fn create(dir: &Path, cfg: &RunConfig) -> Result<Self> {
        prepare_dir(dir)?;
        Ok(FileSink {
            dir: dir.to_path_buf(),
            energy: CsvWriter::create::<EnergyRecord>(dir.join("energy.csv"))?,
            regularity: CsvWriter::create::<RegularityRecord>(dir.join("regularity.csv"))?,
            params: cfg.params,
            seed: cfg.seed(),
            scheme: cfg.scheme.scheme.as_str().to_string(),
            s_index: cfg.s_index,
        })
    }

    pub fn finish(mut self) -> Result<()> {
        self.energy.flush()?;
        self.regularity.flush()?;
        Ok(())
    }
}

impl Sink for FileSink {
    fn record(&mut self, _step: usize, state: &State, rec: &EnergyRecord) -> Result<()> {
        self.energy.write(rec)?;
        self.regularity.write(&regularity_record(state, self.s_index, &self.params)?)?;
        Ok(())
    }

    fn save(&mut self, step: usize, state: &State) -> Result<Option<PathBuf>> {
        let path = self.dir.join(format!("snap_{step:08}.qnsf"));
        write_snapshot(&path, &Snapshot::new(state.clone(), self.params, self.seed, &self.scheme, step))?;
        Ok(Some(path))
    }
}

fn cmd_run(config: &Path, output_dir: Option<PathBuf>) -> Result<i32> {
    let cfg = load_config(config, ConfigMode::Run)?;
    let dir = output_dir.unwrap_or_else(|| cfg.output_dir.clone());
    let (_, init) = initial_state(&cfg)?;
    let mut sink = FileSink::create(&dir, &cfg)?;
    let rep = run(&init, &cfg.params, &cfg.scheme, &mut sink);
    sink.finish()?;
    let rep = rep?;
    println!("steps: {}", rep.steps);
    println!("E: initial {} final {} (min {}, max {})", rep.first_record.e_total, rep.last_record.e_total, rep.e_min, rep.e_max);
    println!("max |balance residual|: {:e}", rep.max_balance_residual);
    println!("max divergence removed per step: {:e}", rep.max_divergence_drift);
    println!("max advective CFL: {:e}", rep.max_cfl);
    println!("output: {}", dir.display());
    Ok(EXIT_OK)
}

fn cmd_check(seed: u64) -> Result<i32> {
    let results = checks::run_all(seed)?;
    let mut failed = 0;
    for r in &results {
        println!("{}", r.line());
        failed += usize::from(!r.passed);
    }
    println!("{} checks, {failed} failed", results.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_twin(config: &Path, n1: usize, n2: usize, output_dir: Option<PathBuf>) -> Result<i32> {
    let cfg = load_config(config, ConfigMode::Run)?;
    let dir = output_dir.unwrap_or_else(|| cfg.output_dir.clone());
    prepare_dir(&dir)?;
    let (_, init) = initial_state(&cfg)?;
    let series = twin_run(&init, &cfg.params, &cfg.scheme, n1, n2)?;
    write_csv(dir.join("gronwall.csv"), &series.rows)?;
    if let Some(f) = &series.failure {
        eprintln!("error: {f}; partial series written");
        return Ok(EXIT_NUMERICAL);
    }
    let rep = gronwall_check(&series);
    if let Some(last) = series.rows.last() {
        println!("final delta_e: {:e}", last.delta_e);
    }
    println!("{}", rep.summary());
    Ok(EXIT_OK)
}

fn cmd_lp(path: &Path, s_index: f64, profile: LpProfile) -> Result<i32> {
    if !(s_index >= 0.0 && s_index.is_finite()) {
        return Err(Error::Config(ConfigError::InvalidValue {
            key: "s_index".into(),
            value: s_index.to_string(),
            reason: "must be finite and non-negative".into(),
        }));
    }
    let snap = read_snapshot(path)?;
    let s = &snap.state;
    let lp = LittlewoodPaley::new(s.grid(), profile);
    let (qh, uh) = (s.q.to_spectral(), s.u.to_spectral());
    let (ql, qb) = lp.block_energies(&qh);
    let (ul, ub) = lp.block_energies(&uh);
    println!("block,radius_lo,radius_hi,q_energy,u_energy");
    println!("low,0,1,{ql:e},{ul:e}");
    for (q, (eq, eu)) in qb.iter().zip(&ub).enumerate() {
        println!("{q},{},{},{eq:e},{eu:e}", 1u64 << q, 1u64 << (q + 1));
    }
    for (name, direct, dyadic) in [
        ("Q", hs_norm_spectral(&qh, s_index, HsMethod::Direct, profile), hs_norm_spectral(&qh, s_index, HsMethod::Dyadic, profile)),
        ("u", hs_norm_spectral(&uh, s_index, HsMethod::Direct, profile), hs_norm_spectral(&uh, s_index, HsMethod::Dyadic, profile)),
    ] {
        println!("H^{s_index} norm of {name}: direct {direct:e}, dyadic {dyadic:e}");
    }
    Ok(EXIT_OK)
}

fn cmd_pressure(path: &Path, out: &Path) -> Result<i32> {
    let snap = read_snapshot(path)?;
    let p = recover_pressure(&snap.state, &snap.header.params)?;
    let n = p.grid().n();
    let vals = p.component(0);
    let mut text = String::with_capacity(vals.len() * 24);
    for row in vals.chunks(n) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    fs::write(out, text)?;
    let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    println!("pressure range [{lo:e}, {hi:e}], mean {:e}", p.mean()[0]);
    println!("written: {}", out.display());
    Ok(EXIT_OK)
}

fn cmd_check_formulas(config: &Path) -> Result<i32> {
    let cfg = load_config(config, ConfigMode::CheckFormulas)?;
    let (_, s) = initial_state(&cfg)?;
    let p = cfg.params;
    let h = molecular_field(&s.q, &p);
    let grad = velocity_gradient(&s.u);
    let stretch = stretch_term(&grad, &s.q, p.xi)?;
    let (tau, sigma) = stress_tensors(&s.q, &h, &p)?;

    let scale = |m: f64| m.max(1.0);
    let mut sym_defect: f64 = 0.0;
    let mut trace_defect: f64 = 0.0;
    for m in stretch.values() {
        sym_defect = sym_defect.max(m.sub(&m.transpose()).max_abs());
        trace_defect = trace_defect.max(m.trace().abs());
    }
    let mut anti_defect: f64 = 0.0;
    for m in sigma.values() {
        anti_defect = anti_defect.max(m.add(&m.transpose()).max_abs());
    }
    let results = [
        checks::CheckResult::at_most("stretch term symmetric", sym_defect / scale(stretch.max_abs()), 1e-12),
        checks::CheckResult::at_most("stretch term traceless", trace_defect / scale(stretch.max_abs()), 1e-12),
        checks::CheckResult::at_most("sigma antisymmetric", anti_defect / scale(sigma.max_abs()), 1e-12),
    ];
    println!("xi = {}", p.xi);
    println!("max |H| {:e}, max |S| {:e}, max |tau| {:e}, max |sigma| {:e}", h.linf_norm(), stretch.max_abs(), tau.max_abs(), sigma.max_abs());
    let mut ok = true;
    for r in &results {
        println!("{}", r.line());
        ok &= r.passed;
    }
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}
