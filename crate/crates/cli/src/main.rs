//! `stochbayes`: reproducible command-line runs of the stochastic Bayesian
//! inference simulator.
//!
//! Every output begins with `#` header lines naming the tool version,
//! subcommand, seed, stream length and configuration files, so a result file
//! records how to regenerate itself. Outputs depend only on the flags, never
//! on thread count or wall-clock time.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stochbayes::bbn::{self, Evidence, HeartBbn};
use stochbayes::bench::{pair_correlations, sbg_bench};
use stochbayes::fusion::{self, HeatmapFormat, Scenario};
use stochbayes::mtj::{mc_probability, pv_curve, DeviceConfig};
use stochbayes::netlist::{evaluate, parse, resource_report};
use stochbayes::rng::derive_seed_indexed;
use stochbayes::{Error, Probability};

const DEFAULT_SEED: u64 = 1;
const THREADS_ENV: &str = "STOCHBAYES_THREADS";

#[derive(Parser)]
#[command(name = "stochbayes", version, about = "Spintronic stochastic-computing Bayesian inference simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed; every random stream is derived from it.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Device configuration (TOML); built-in calibration when absent.
    #[arg(long)]
    device: Option<PathBuf>,
    /// Output file (directory for `fusion`); stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic and Monte-Carlo switching probability across the bias window.
    PvCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 24)]
        points: usize,
        /// Monte-Carlo reset/write pulses per voltage.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Representation and product errors of generated streams.
    SbgBench {
        #[command(flatten)]
        common: Common,
        /// Stream lengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256])]
        length: Vec<usize>,
        #[arg(long, default_value_t = 24)]
        points: usize,
        #[arg(long, default_value_t = 50)]
        seeds: usize,
        /// Also report Pearson correlation of this many stream pairs at p = 0.5.
        #[arg(long, default_value_t = 0)]
        pairs: usize,
    },
    /// Evaluate a netlist file and report counters and resources.
    NetlistRun {
        #[command(flatten)]
        common: Common,
        netlist: PathBuf,
        #[arg(long, default_value_t = 256)]
        length: usize,
    },
    /// Grid localization: exact and stochastic posteriors and their KL divergence.
    Fusion {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Grid sizes, comma separated; the scenario's size when absent.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256])]
        length: Vec<usize>,
        /// Seeds averaged per (grid, length); seed k is `--seed + k`.
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the circuit of the first grid size in netlist text format.
        #[arg(long)]
        emit_netlist: Option<PathBuf>,
    },
    /// Heart-disease network queries: control signals, exact and stochastic posteriors.
    Bbn {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Evidence such as `E=Y,D=Healthy,BP=High`; repeatable. The five
        /// reference queries when absent.
        #[arg(long)]
        evidence: Vec<String>,
        #[arg(long, default_value_t = 1024)]
        length: usize,
        /// Seeds averaged per query; seed k is `--seed + k`.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pgm,
}

impl Format {
    fn heatmap(self) -> HeatmapFormat {
        match self {
            Format::Csv => HeatmapFormat::Csv,
            Format::Pgm => HeatmapFormat::Pgm,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Pgm => "pgm",
        }
    }
}

/// Failure with its process exit code: 1 usage or configuration, 2
/// validation, 3 degenerate computation.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Validation(_) => 2,
            Error::Degenerate(_) => 3,
            Error::InvalidInput(_) | Error::Config { .. } | Error::Io { .. } => 1,
        };
        let mut message = e.to_string();
        if let Error::Parse(d) | Error::Validation(d) = &e {
            for diag in d.iter().skip(1) {
                write!(message, "\n  {diag}").unwrap();
            }
        }
        Failure { code, message }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

/// Lines written at the top of every output, without the comment marker.
struct Header(Vec<String>);

impl Header {
    fn new(subcommand: &str, seed: u64, length: &str) -> Self {
        Header(vec![
            format!("stochbayes {}", env!("CARGO_PKG_VERSION")),
            format!("subcommand: {subcommand}"),
            format!("seed: {seed}"),
            format!("length: {length}"),
        ])
    }

    fn config(mut self, name: &str, path: Option<&Path>) -> Self {
        let shown = path.map_or_else(|| "built-in default".to_string(), |p| p.display().to_string());
        self.0.push(format!("{name}: {shown}"));
        self
    }

    fn line(&mut self, text: impl Into<String>) {
        self.0.push(text.into());
    }

    fn commented(&self) -> String {
        self.0.iter().map(|l| format!("# {l}\n")).collect()
    }

    fn plain(&self) -> String {
        self.0.join("\n")
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| usage(format!("writing stdout: {e}")))?;
        }
    }
    Ok(())
}

fn load_device(path: Option<&Path>) -> Result<DeviceConfig, Failure> {
    Ok(match path {
        Some(p) => DeviceConfig::load(p)?,
        None => DeviceConfig::default(),
    })
}

fn cmd_pv_curve(common: &Common, points: usize, trials: usize) -> CmdResult {
    let device = load_device(common.device.as_deref())?;
    let params = device.params;
    let curve = pv_curve(&params, points)?;
    let header = Header::new("pv-curve", common.seed, "n/a").config("device", common.device.as_deref());
    let mut s = header.commented();
    s.push_str("voltage,analytic_p,mc_p,mc_trials\n");
    for (i, (v, p)) in curve.iter().enumerate() {
        let mc = mc_probability(*v, trials, &params, derive_seed_indexed(common.seed, i as u64))?;
        writeln!(s, "{v:.6},{:.6},{:.6},{trials}", p.value(), mc.value()).unwrap();
    }
    write_output(common.out.as_deref(), s.as_bytes())
}

fn cmd_sbg_bench(common: &Common, lengths: &[usize], points: usize, seeds: usize, pairs: usize) -> CmdResult {
    let device = load_device(common.device.as_deref())?;
    let rows = sbg_bench(&device.params, lengths, points, seeds, common.seed)?;
    let mut header =
        Header::new("sbg-bench", common.seed, &join(lengths)).config("device", common.device.as_deref());
    header.line(format!("points: {points}, seeds: {seeds}"));
    let mut s = header.commented();
    s.push_str("test,length,points,seeds,mae,mae_of_seed_mean,expected_mae,ratio_to_expected\n");
    for r in &rows {
        writeln!(
            s,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.4}",
            r.kind.name(),
            r.length,
            r.points,
            r.seeds,
            r.mae,
            r.mae_of_seed_mean,
            r.expected_mae,
            r.mae / r.expected_mae
        )
        .unwrap();
    }
    if pairs > 0 {
        s.push_str("\nlength,pairs,max_abs_correlation,fraction_within_3_over_sqrt_n\n");
        for &n in lengths {
            let c = pair_correlations(&device.params, Probability::new(0.5)?, pairs, n, common.seed)?;
            let bound = 3.0 / (n as f64).sqrt();
            let max = c.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            let within = c.iter().filter(|r| r.abs() <= bound).count() as f64 / pairs as f64;
            writeln!(s, "{n},{pairs},{max:.6},{within:.4}").unwrap();
        }
    }
    write_output(common.out.as_deref(), s.as_bytes())
}

fn cmd_netlist_run(common: &Common, path: &Path, length: usize) -> CmdResult {
    let device = load_device(common.device.as_deref())?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let netlist = parse(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })?;
    let result = evaluate(&netlist, length, common.seed, &device.params)?;
    let report = resource_report(&netlist, length, &device.cost);

    let mut header = Header::new("netlist-run", common.seed, &length.to_string())
        .config("device", common.device.as_deref())
        .config("netlist", Some(path));
    header.line(format!("resources: {report}"));
    for w in &netlist.warnings {
        eprintln!("{}: {w}", path.display());
        header.line(w.to_string());
    }
    if !result.clamped_sources.is_empty() {
        let msg = format!(
            "clamped to device window: {}",
            result.clamped_sources.join(",")
        );
        eprintln!("{}: warning: {msg}", path.display());
        header.line(msg);
    }
    let mut s = header.commented();
    s.push_str(&result.to_csv());
    write_output(common.out.as_deref(), s.as_bytes())
}

#[allow(clippy::too_many_arguments)]
fn cmd_fusion(
    common: &Common,
    scenario_path: Option<&Path>,
    grids: &[usize],
    lengths: &[usize],
    seeds: usize,
    format: Format,
    emit_netlist: Option<&Path>,
) -> CmdResult {
    if seeds == 0 {
        return Err(usage("--seeds must be at least 1"));
    }
    let device = load_device(common.device.as_deref())?;
    let scenario = match scenario_path {
        Some(p) => Scenario::load(p)?,
        None => fusion::default_scenario(),
    };
    let grids = if grids.is_empty() { vec![scenario.grid.size] } else { grids.to_vec() };
    let header = |sub_length: &str| {
        let mut h = Header::new("fusion", common.seed, sub_length)
            .config("device", common.device.as_deref())
            .config("scenario", scenario_path);
        h.line(format!("grids: {}, seeds: {seeds}", join(&grids)));
        h
    };
    if let Some(dir) = &common.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
    }

    let mut report = header(&join(lengths)).commented();
    report.push_str("grid,length,seeds,kl_mean,kl_min,kl_max,exact_argmax_x,exact_argmax_y,stochastic_argmax_x,stochastic_argmax_y\n");
    for (gi, &g) in grids.iter().enumerate() {
        let sc = scenario.with_grid_size(g)?;
        let exact = fusion::exact_posterior(&sc.sensors, &sc.grid)?;
        let netlist = fusion::build_fusion_netlist(&sc.sensors, &sc.grid)?;
        if gi == 0 {
            if let Some(p) = emit_netlist {
                let mut text = header("n/a").commented();
                text.push_str(&netlist.to_string());
                write_output(Some(p), text.as_bytes())?;
            }
        }
        if let Some(dir) = &common.out {
            let mut h = header("n/a");
            h.line(format!("exact posterior, grid {g}"));
            let file = dir.join(format!("exact_g{g}.{}", format.extension()));
            write_heatmap(&file, &exact, format, &h)?;
        }
        let (ex, ey) = exact.argmax();
        for &n in lengths {
            let mut kls = Vec::with_capacity(seeds);
            let mut first = None;
            for k in 0..seeds as u64 {
                let q = fusion::stochastic_posterior(&netlist, n, common.seed.wrapping_add(k), &device.params)?;
                kls.push(fusion::kl_divergence(&exact, &q, fusion::kl_smoothing(n, g))?);
                first.get_or_insert(q);
            }
            let q = first.expect("seeds >= 1");
            if let Some(dir) = &common.out {
                let mut h = header(&n.to_string());
                h.line(format!("stochastic posterior, grid {g}, seed {}", common.seed));
                let file = dir.join(format!("stochastic_g{g}_n{n}.{}", format.extension()));
                write_heatmap(&file, &q, format, &h)?;
            }
            let mean = kls.iter().sum::<f64>() / kls.len() as f64;
            let min = kls.iter().copied().fold(f64::INFINITY, f64::min);
            let max = kls.iter().copied().fold(0.0, f64::max);
            let (sx, sy) = q.argmax();
            writeln!(report, "{g},{n},{seeds},{mean:.6},{min:.6},{max:.6},{ex},{ey},{sx},{sy}").unwrap();
        }
    }
    let out = common.out.as_ref().map(|d| d.join("kl.csv"));
    write_output(out.as_deref(), report.as_bytes())
}

fn write_heatmap(path: &Path, grid: &fusion::PosteriorGrid, format: Format, header: &Header) -> CmdResult {
    let bytes = match format.heatmap() {
        HeatmapFormat::Csv => {
            let mut s = header.commented();
            s.push_str(&fusion::heatmap_csv(grid));
            s.into_bytes()
        }
        HeatmapFormat::Pgm => fusion::heatmap_pgm(grid, Some(&header.plain())),
    };
    write_output(Some(path), &bytes)
}

fn cmd_bbn(common: &Common, model_path: Option<&Path>, evidence: &[String], length: usize, seeds: usize) -> CmdResult {
    let device = load_device(common.device.as_deref())?;
    let model = match model_path {
        Some(p) => HeartBbn::load(p)?,
        None => HeartBbn::default(),
    };
    let queries: Vec<(String, Evidence)> = if evidence.is_empty() {
        bbn::reference_queries()
            .into_iter()
            .map(|(n, e)| (n.to_string(), e))
            .collect()
    } else {
        evidence
            .iter()
            .map(|text| Evidence::parse(text).map(|ev| (ev.to_string(), ev)))
            .collect::<Result<_, Error>>()?
    };
    let rows = bbn::run_queries(&model, &queries, length, common.seed, seeds, &device.params)?;
    for r in rows.iter().filter(|r| r.is_degenerate()) {
        eprintln!("warning: query {} is degenerate under the model", r.query);
    }
    let mut header = Header::new("bbn", common.seed, &length.to_string())
        .config("device", common.device.as_deref())
        .config("model", model_path);
    header.line(format!("seeds: {seeds}"));
    let mut s = header.commented();
    s.push_str(&bbn::report_csv(&rows));
    write_output(common.out.as_deref(), s.as_bytes())
}

fn configure_threads() -> CmdResult {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CmdResult {
    configure_threads()?;
    match &cli.command {
        Command::PvCurve { common, points, trials } => cmd_pv_curve(common, *points, *trials),
        Command::SbgBench {
            common,
            length,
            points,
            seeds,
            pairs,
        } => cmd_sbg_bench(common, length, *points, *seeds, *pairs),
        Command::NetlistRun { common, netlist, length } => cmd_netlist_run(common, netlist, *length),
        Command::Fusion {
            common,
            scenario,
            grid,
            length,
            seeds,
            format,
            emit_netlist,
        } => cmd_fusion(
            common,
            scenario.as_deref(),
            grid,
            length,
            *seeds,
            *format,
            emit_netlist.as_deref(),
        ),
        Command::Bbn {
            common,
            model,
            evidence,
            length,
            seeds,
        } => cmd_bbn(common, model.as_deref(), evidence, *length, *seeds),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("stochbayes: error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
