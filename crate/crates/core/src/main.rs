use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nelson_tunnel::artifacts::{
    fit_report, histogram_text, read_times, write_atomic, write_config, write_error, write_run, write_sweep,
    write_sweep_entry, FIT_FILE, HISTOGRAM_FILE,
};
use nelson_tunnel::plotdata::{write_plot_data, FigureId, ALL_FIGURES};
use nelson_tunnel::runner::{analyze_times, run_sweep, simulate, FitOptions, PathBudget, SweepKind};
use nelson_tunnel::{Error, FitMethod, Profile, Result, SimulationConfig, Weighting};

/// Tunneling-time distributions from Nelson's stochastic mechanics.
#[derive(Parser, Debug)]
#[command(name = "nelson-tunnel", version)]
struct Cli {
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Built-in parameter set used when no --config is given.
    #[arg(long, global = true, value_enum, default_value = "desk")]
    profile: Profile,

    /// Output directory for this command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Root for default output directories.
    #[arg(long, global = true, env = "NELSON_TUNNEL_OUT", default_value = "nelson-runs")]
    out_root: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Overrides {
    /// Config file (flat key = value); replaces the profile.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of sample paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Barrier width d [1/k0].
    #[arg(long)]
    width: Option<f64>,
    /// Barrier height as a multiple of E0.
    #[arg(long)]
    height_ratio: Option<f64>,
    /// Packet width Delta x [1/k0].
    #[arg(long)]
    delta_x: Option<f64>,
    /// Bootstrap resamples for least-squares standard errors.
    #[arg(long)]
    bootstrap: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write its artifacts.
    Run {
        #[command(flatten)]
        cfg: Overrides,
    },
    /// Run a parameter sweep.
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
        /// Comma-separated values; defaults depend on the kind.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Raise N so that this many transmissions are expected.
        #[arg(long)]
        min_transmitted: Option<usize>,
        /// Upper limit on N when --min-transmitted is set.
        #[arg(long, default_value_t = 1_000_000)]
        max_paths: usize,
        #[command(flatten)]
        cfg: Overrides,
    },
    /// Refit a saved list of tunneling times.
    Fit {
        /// Run directory or tau file.
        input: PathBuf,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        method: FitMethod,
        #[arg(long, value_enum, default_value = "unweighted")]
        weighting: Weighting,
        #[arg(long, default_value_t = 0)]
        bootstrap: usize,
    },
    /// Write figure data files from run or sweep artifacts.
    Plotdata {
        /// fig2 ... fig11, or "all".
        figure: String,
        /// Run directory (fig2, fig7) or sweep directory.
        artifact: PathBuf,
    },
}

fn load_config(cli: &Cli, o: &Overrides) -> Result<SimulationConfig> {
    let mut c = match &o.config {
        Some(path) => SimulationConfig::load(path)?,
        None => SimulationConfig::profile(cli.profile),
    };
    if let Some(s) = cli.seed {
        c.master_seed = s;
    }
    if let Some(n) = o.paths {
        c.n_paths = n;
    }
    if let Some(d) = o.width {
        c.d = d;
    }
    if let Some(r) = o.height_ratio {
        c = c.with_height_ratio(r);
    }
    if let Some(dx) = o.delta_x {
        c.delta_x = dx;
    }
    if let Some(b) = o.bootstrap {
        c.n_bootstrap = b;
    }
    c.validate()?;
    Ok(c)
}

fn out_dir(cli: &Cli, config: Option<&SimulationConfig>, default_name: impl FnOnce() -> String) -> PathBuf {
    if let Some(o) = &cli.out {
        return o.clone();
    }
    if let Some(d) = config.and_then(|c| c.output_dir.as_ref()) {
        return PathBuf::from(d);
    }
    cli.out_root.join(default_name())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.4}"))
}

fn cmd_run(cli: &Cli, o: &Overrides) -> Result<()> {
    let config = load_config(cli, o)?;
    let dir = out_dir(cli, Some(&config), || format!("run_d={}_seed={}", config.d, config.master_seed));
    write_config(&dir, &config)?;
    let outcome = match simulate(&config) {
        Ok(x) => x,
        Err(e) => {
            write_error(&dir, &e)?;
            return Err(e);
        }
    };
    write_run(&dir, &outcome)?;
    let s = &outcome.summary;
    println!("output      {}", dir.display());
    println!("paths       {} transmitted, {} reflected, {} undecided", s.transmitted, s.reflected, s.undecided);
    println!("fraction    {:.6} (wavefunction {:.6})", s.transmitted_fraction, s.pde_transmitted_probability);
    println!("kappa d     {:.4}, tau_wkb {:.4}", s.kappa_d, s.tau_wkb);
    println!("<tau>       {}, Delta tau {}", opt(s.times.mean), opt(s.times.sd));
    if let Some(f) = &s.times.least_squares {
        println!("fit (lsq)   alpha {:.4}, beta {:.4}", f.alpha, f.beta);
    }
    if let Some(f) = &s.times.mle {
        println!("fit (mle)   alpha {:.4}, beta {:.4}", f.alpha, f.beta);
    }
    println!("t_f         {} ({} steps), wall clock {:.1} s", s.diagnostics.t_final, s.diagnostics.steps, outcome.wall_clock.as_secs_f64());
    Ok(())
}

fn cmd_sweep(
    cli: &Cli,
    kind: SweepKind,
    values: &[f64],
    budget: PathBudget,
    o: &Overrides,
) -> Result<()> {
    let base = load_config(cli, o)?;
    let values = if values.is_empty() { kind.default_values() } else { values.to_vec() };
    let root = out_dir(cli, Some(&base), || format!("sweep_{}_seed={}", kind.label(), base.master_seed));
    std::fs::create_dir_all(&root)?;
    let table = run_sweep(kind, &base, &values, budget, |entry| {
        let dir = write_sweep_entry(&root, kind, entry)?;
        let r = &entry.row;
        println!(
            "{} = {:<6} N = {:<7} transmitted = {:<6} <tau> = {:<8} Delta tau = {:<8} {}",
            kind.label(),
            r.value,
            r.n_paths,
            r.n_transmitted,
            opt(r.mean_tau),
            opt(r.sd_tau),
            r.error.as_deref().map_or_else(|| dir.display().to_string(), |e| format!("error: {e}"))
        );
        Ok(())
    })?;
    write_sweep(&root, &table)?;
    println!("table       {}", root.display());
    Ok(())
}

fn cmd_fit(cli: &Cli, input: &Path, opts: FitOptions) -> Result<()> {
    let times = read_times(input)?;
    let stats = analyze_times(&times, &opts);
    let base = if input.is_dir() { input.to_path_buf() } else { input.parent().unwrap_or(Path::new(".")).to_path_buf() };
    let dir = cli.out.clone().unwrap_or_else(|| base.join("refit"));
    let report = fit_report(&stats);
    write_atomic(&dir.join(FIT_FILE), report.as_bytes())?;
    if !times.is_empty() {
        write_atomic(&dir.join(HISTOGRAM_FILE), histogram_text(&times, stats.bins, None)?.as_bytes())?;
    }
    print!("{report}");
    Ok(())
}

fn cmd_plotdata(cli: &Cli, figure: &str, artifact: &Path) -> Result<()> {
    let figs: Vec<FigureId> = if figure.eq_ignore_ascii_case("all") {
        ALL_FIGURES.to_vec()
    } else {
        vec![figure.parse()?]
    };
    let dir = cli.out.clone().unwrap_or_else(|| artifact.join("plots"));
    for fig in figs {
        match write_plot_data(artifact, fig, &dir) {
            Ok(p) => println!("{fig}  {}", p.display()),
            // "all" writes whatever the artifact supports.
            Err(e) if figure.eq_ignore_ascii_case("all") => log::info!("{fig}: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { cfg } => cmd_run(cli, cfg),
        Command::Sweep {
            kind,
            values,
            min_transmitted,
            max_paths,
            cfg,
        } => cmd_sweep(
            cli,
            *kind,
            values,
            PathBudget {
                min_transmitted: *min_transmitted,
                max_paths: *max_paths,
            },
            cfg,
        ),
        Command::Fit {
            input,
            bins,
            method,
            weighting,
            bootstrap,
        } => cmd_fit(
            cli,
            input,
            FitOptions {
                bins: *bins,
                method: *method,
                weighting: *weighting,
                n_bootstrap: *bootstrap,
                seed: cli.seed.unwrap_or(1),
            },
        ),
        Command::Plotdata { figure, artifact } => cmd_plotdata(cli, figure, artifact),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::AboveBarrier { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
