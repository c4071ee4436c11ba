//! `skylane` command-line front end: eigenscore tables, single-route campaigns and swarm-size sweeps.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skylane::channel::linear_to_db;
use skylane::io::format_complex;
use skylane::montecarlo::MeanDomain;
use skylane::{Error, Metric, ScenarioConfig, Simulator};

use output::{csv_line, OutputDir};

#[derive(Parser)]
#[command(name = "skylane", version, about = "Aerial corridor association simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-(route, sector) eigenvalue spectra and eigenscores.
    Eigenscore(EigenscoreArgs),
    /// Monte-Carlo campaign on one route for one or more metrics.
    Run(RunArgs),
    /// Aerial SINR statistics versus swarm size.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML, or JSON including a previous manifest). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct EigenscoreArgs {
    #[command(flatten)]
    common: Common,
    /// Number of leading normalized eigenvalues to export (default: all).
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long, default_value_t = 90.0)]
    route_deg: f64,
    #[arg(long, value_delimiter = ',', default_value = "rsrp,m1,m2")]
    metric: Vec<String>,
    /// Overrides the configured number of drops.
    #[arg(long)]
    drops: Option<usize>,
    /// Average SINR in the linear domain instead of dB.
    #[arg(long)]
    linear_mean: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    campaign: CampaignArgs,
    /// Overrides the configured swarm size.
    #[arg(long)]
    n_ccuav: Option<usize>,
    /// Also write every UE's serving sector and SINR per drop.
    #[arg(long)]
    per_drop: bool,
    /// Dump the channel vectors of the first drop (tab separated).
    #[arg(long)]
    dump_channels: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    campaign: CampaignArgs,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 7)]
    n_max: usize,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => Failure::Io(io.to_string()),
            e if e.is_numerical() => Failure::Numerical(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eigenscore(args) => with_pool(args.common.threads, || cmd_eigenscore(&args)),
        Command::Run(args) => with_pool(args.common.threads, || cmd_run(&args)),
        Command::Sweep(args) => with_pool(args.common.threads, || cmd_sweep(&args)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("skylane: error[config]: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("skylane: error[numerical]: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("skylane: error[io]: {msg}");
            ExitCode::from(1)
        }
    }
}

fn with_pool(threads: Option<usize>, f: impl FnOnce() -> CliResult + Send) -> CliResult {
    match threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool =
                rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Failure::Usage(e.to_string()))?;
            pool.install(f)
        }
        None => f(),
    }
}

fn load_config(common: &Common) -> CliResult<ScenarioConfig> {
    let mut config = match &common.config {
        Some(path) => {
            if !path.is_file() {
                return Err(Failure::Usage(format!("config file not found: {}", path.display())));
            }
            ScenarioConfig::from_path(path)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn parse_metrics(names: &[String]) -> CliResult<Vec<Metric>> {
    let mut metrics = names.iter().map(|n| n.parse::<Metric>()).collect::<Result<Vec<_>, _>>()?;
    metrics.dedup();
    if metrics.is_empty() {
        return Err(Failure::Usage("no metric given".into()));
    }
    Ok(metrics)
}

fn mean_domain(campaign: &CampaignArgs) -> MeanDomain {
    if campaign.linear_mean {
        MeanDomain::Linear
    } else {
        MeanDomain::Db
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

fn cmd_eigenscore(args: &EigenscoreArgs) -> CliResult {
    let config = load_config(&args.common)?;
    let sim = Simulator::new(config)?;
    let table = &sim.eigenscores;
    let width = table.entries.iter().map(|e| e.spectrum.len()).max().unwrap_or(0);
    let k = args.top_k.map_or(width, |k| k.min(width));

    let mut header = vec!["route_rotation_deg".to_string(), "sector_name".into(), "es".into()];
    header.extend((1..=k).map(|i| format!("lambda_{i}")));
    let mut csv = String::new();
    csv_line(&mut csv, &header);
    for e in &table.entries {
        let mut row = vec![format!("{}", e.rotation_deg), e.sector_name.clone(), e.eigenscore.to_string()];
        row.extend((0..k).map(|i| e.spectrum.get(i).map_or_else(String::new, |&v| format!("{v:.9e}"))));
        csv_line(&mut csv, &row);
    }

    let mut out = OutputDir::create(&args.common.out)?;
    out.write("eigenscore", "csv", csv.as_bytes())?;
    out.finish("eigenscore", &sim.config)?;
    Ok(())
}

fn cmd_run(args: &RunArgs) -> CliResult {
    let mut config = load_config(&args.common)?;
    if let Some(n) = args.n_ccuav {
        config.n_ccuav = n;
    }
    if let Some(d) = args.campaign.drops {
        config.n_drops = d;
    }
    config.validate()?;
    let metrics = parse_metrics(&args.campaign.metric)?;
    let domain = mean_domain(&args.campaign);
    let sim = Simulator::new(config)?;
    let route = sim.route_index(args.campaign.route_deg)?;

    // Everything is computed before the first file is written.
    let mut runs = Vec::new();
    for &metric in &metrics {
        let drops = sim.run_drops(route, metric)?;
        let stats = sim.aggregate(route, metric, &drops, domain);
        runs.push((metric, drops, stats));
    }
    let dump = if args.dump_channels { Some(channel_dump(&sim, route)?) } else { None };

    let mut out = OutputDir::create(&args.common.out)?;
    for (metric, drops, stats) in &runs {
        out.write_json(&format!("summary_{metric}"), stats)?;

        let mut rates = String::new();
        csv_line(&mut rates, &["ccuav".into(), "sector_name".into(), "rate".into()]);
        for (d, row) in stats.selection_rates.iter().enumerate() {
            for (b, rate) in row.iter().enumerate() {
                csv_line(&mut rates, &[d.to_string(), stats.sector_names[b].clone(), fmt(*rate)]);
            }
        }
        out.write(&format!("selection_rates_{metric}"), "csv", rates.as_bytes())?;

        let mut samples = String::new();
        csv_line(&mut samples, &["drop".into(), "ccuav".into(), "sector_name".into(), "sinr_db".into()]);
        for drop in drops {
            for (d, ue) in drop.ccuavs.iter().enumerate() {
                csv_line(
                    &mut samples,
                    &[
                        drop.drop_index.to_string(),
                        d.to_string(),
                        stats.sector_names[ue.serving].clone(),
                        fmt(ue.sinr_db),
                    ],
                );
            }
        }
        out.write(&format!("sinr_samples_{metric}"), "csv", samples.as_bytes())?;

        if args.per_drop {
            let mut per_drop = String::new();
            csv_line(
                &mut per_drop,
                &["drop".into(), "kind".into(), "ue".into(), "sector_name".into(), "sinr_db".into()],
            );
            for drop in drops {
                let ues = drop.ccuavs.iter().map(|u| ("ccuav", u)).chain(drop.gues.iter().map(|u| ("gue", u)));
                for (i, (kind, ue)) in ues.enumerate() {
                    let index = if kind == "ccuav" { i } else { i - drop.ccuavs.len() };
                    csv_line(
                        &mut per_drop,
                        &[
                            drop.drop_index.to_string(),
                            kind.into(),
                            index.to_string(),
                            stats.sector_names[ue.serving].clone(),
                            fmt(ue.sinr_db),
                        ],
                    );
                }
            }
            out.write(&format!("per_drop_{metric}"), "csv", per_drop.as_bytes())?;
        }
    }
    if let Some(dump) = dump {
        out.write("channels", "tsv", dump.as_bytes())?;
    }
    out.finish("run", &sim.config)?;

    for (metric, _, stats) in &runs {
        println!(
            "{metric}\tmean_db={:.3}\tp5_db={:.3}\tgue_mean_db={:.3}",
            stats.aerial_mean_db, stats.aerial_p5_db, stats.gue_mean_db
        );
    }
    Ok(())
}

fn channel_dump(sim: &Simulator, route: usize) -> CliResult<String> {
    let links = sim.drop_links(route, 0)?;
    let m = sim.config.antennas();
    let mut text = String::new();
    let mut header: Vec<String> = [
        "kind",
        "ue",
        "sector_name",
        "los",
        "x_m",
        "y_m",
        "z_m",
        "path_loss_db",
        "shadow_db",
        "beta_db",
        "rician_k_db",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..m).map(|i| format!("h_{i}")));
    text.push_str(&header.join("\t"));
    text.push('\n');
    for link in links {
        let ls = &link.channel.large_scale;
        let mut row = vec![
            format!("{:?}", link.kind).to_lowercase(),
            link.ue_index.to_string(),
            sim.sectors[link.sector].name.clone(),
            ls.los.to_string(),
            fmt(link.position.x),
            fmt(link.position.y),
            fmt(link.position.z),
            fmt(ls.path_loss_db()),
            fmt(ls.shadow_db()),
            fmt(linear_to_db(ls.beta)),
            fmt(ls.rician_k_db()),
        ];
        row.extend(link.channel.coeffs.iter().map(|z| format_complex(*z)));
        text.push_str(&row.join("\t"));
        text.push('\n');
    }
    Ok(text)
}

fn cmd_sweep(args: &SweepArgs) -> CliResult {
    let mut config = load_config(&args.common)?;
    if let Some(d) = args.campaign.drops {
        config.n_drops = d;
    }
    if args.n_min == 0 || args.n_min > args.n_max {
        return Err(Failure::Usage(format!("need 1 <= n-min <= n-max, got {}..{}", args.n_min, args.n_max)));
    }
    config.n_ccuav = args.n_max;
    config.validate()?;
    let metrics = parse_metrics(&args.campaign.metric)?;
    let sim = Simulator::new(config)?;
    let route = sim.route_index(args.campaign.route_deg)?;
    let stats = sim.sweep_ccuavs(route, &metrics, args.n_min..=args.n_max, mean_domain(&args.campaign))?;

    let mut csv = String::new();
    csv_line(&mut csv, &["metric".into(), "n_ccuav".into(), "aerial_mean_db".into(), "aerial_p5_db".into()]);
    for s in &stats {
        csv_line(&mut csv, &[s.metric.to_string(), s.n_ccuav.to_string(), fmt(s.aerial_mean_db), fmt(s.aerial_p5_db)]);
    }
    let mut out = OutputDir::create(&args.common.out)?;
    out.write("sweep", "csv", csv.as_bytes())?;
    out.write_json("sweep_summaries", &stats)?;
    out.finish("sweep", &sim.config)?;
    print!("{csv}");
    Ok(())
}
