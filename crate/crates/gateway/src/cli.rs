//! `orbitplan` command line.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 no feasible plan.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitplan::canonical::to_canonical_string;
use orbitplan::orbitcore::{parse_tle_set, Tle};
use orbitplan::pipeline::{environment, PlannerConfig};
use orbitplan::scheduler::{ExecutionPlan, PassSummary};
use orbitplan::timeline::OrbitalWindow;
use orbitplan::workload::{load_preset, preset_summary, Workload, PRESET_NAMES};

use crate::cache::PlanCache;
use crate::error::GatewayError;
use crate::http::{self, BIND_ENV, DEFAULT_BIND};
use crate::service::{
    plan_once, PlanRequest, Planner, StartTime, WorkloadSpec, DEFAULT_HORIZON_HOURS,
};
use crate::tle_client::{TleClient, TleSource};

#[derive(Debug, Parser)]
#[command(
    name = "orbitplan",
    version,
    about = "Deterministic execution planning for satellite workloads"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a workload and print the execution plan
    Plan(PlanArgs),
    /// Print the orbital window timeline
    Windows(EnvArgs),
    /// Print ground-station passes
    Passes(EnvArgs),
    /// List workload presets
    Presets {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run the HTTP service
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
struct EnvArgs {
    /// NORAD catalog number; optional with --tle-file
    #[arg(long)]
    norad: Option<u32>,
    /// 2- or 3-line element set file
    #[arg(long)]
    tle_file: Option<PathBuf>,
    /// hours, 1 to 168
    #[arg(long, default_value_t = DEFAULT_HORIZON_HOURS)]
    horizon: u32,
    /// RFC 3339 time or `now`
    #[arg(long, default_value = "now")]
    start: String,
    /// JSON planner configuration overrides
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// never touch the network
    #[arg(long)]
    offline: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("workload_source").required(true))]
struct PlanArgs {
    /// preset name
    #[arg(long, group = "workload_source")]
    workload: Option<String>,
    /// JSON workload document
    #[arg(long, group = "workload_source")]
    workload_file: Option<PathBuf>,
    #[command(flatten)]
    env: EnvArgs,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// defaults to $ORBITPLAN_BIND or 127.0.0.1:8080
    #[arg(long)]
    bind: Option<String>,
    /// directory of `*.tle` fixture files
    #[arg(long, conflicts_with = "tle_file")]
    tle_dir: Option<PathBuf>,
    #[arg(long)]
    tle_file: Option<PathBuf>,
    #[arg(long)]
    offline: bool,
}

fn read_file(path: &PathBuf) -> Result<String, GatewayError> {
    std::fs::read_to_string(path)
        .map_err(|e| GatewayError::Input(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&PathBuf>) -> Result<PlannerConfig, GatewayError> {
    match path {
        None => Ok(PlannerConfig::default()),
        Some(p) => serde_json::from_str(&read_file(p)?)
            .map_err(|e| GatewayError::Input(format!("{}: {e}", p.display()))),
    }
}

fn load_tle(args: &EnvArgs) -> Result<Tle, GatewayError> {
    match (&args.tle_file, args.norad) {
        (Some(path), Some(norad)) => Ok(TleSource::File(path.clone()).load_local(norad)?),
        (Some(path), None) => {
            parse_tle_set(&read_file(path)?).map_err(|e| GatewayError::Plan(e.into()))
        }
        (None, _) if args.offline => {
            Err(GatewayError::Input("--offline requires --tle-file".into()))
        }
        (None, None) => Err(GatewayError::Input(
            "either --norad or --tle-file is required".into(),
        )),
        (None, Some(norad)) => {
            let rt = tokio::runtime::Builder::new_current_thread()
                .enable_all()
                .build()
                .map_err(|e| GatewayError::Input(e.to_string()))?;
            Ok(rt.block_on(TleClient::from_env().fetch(norad))?)
        }
    }
}

fn workload_spec(args: &PlanArgs) -> Result<WorkloadSpec, GatewayError> {
    match (&args.workload, &args.workload_file) {
        (Some(name), _) => Ok(WorkloadSpec::Preset(name.clone())),
        (None, Some(path)) => {
            let w: Workload = serde_json::from_str(&read_file(path)?)
                .map_err(|e| GatewayError::Input(format!("{}: {e}", path.display())))?;
            Ok(WorkloadSpec::Inline(w))
        }
        (None, None) => Err(GatewayError::Input(
            "--workload or --workload-file is required".into(),
        )),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), GatewayError> {
    writeln!(out, "{text}").map_err(|e| GatewayError::Input(e.to_string()))
}

fn time(t: chrono::DateTime<chrono::Utc>) -> String {
    t.format("%Y-%m-%d %H:%M:%S").to_string()
}

fn plan_table(p: &ExecutionPlan) -> String {
    let mut s = String::new();
    let name = p.satellite.name.as_deref().unwrap_or("-");
    s += &format!("satellite     {} ({name})\n", p.satellite.catalog_number);
    s += &format!(
        "horizon       {} .. {}\n",
        time(p.horizon.start),
        time(p.horizon.end)
    );
    let m = &p.metrics;
    s += &format!("steps         {}\n", m.step_count);
    s += &format!(
        "downlink      {:.2} MB payload, {:.2} MB on channel\n",
        m.payload_downlink, m.channel_downlink
    );
    s += &format!(
        "uplink        {:.2} MB payload, {:.2} MB on channel\n",
        m.payload_uplink, m.channel_uplink
    );
    s += &format!("makespan      {:.1} s\n", m.makespan);
    s += &format!("confidence    {:.4}\n", p.confidence);
    s += &format!("hash          {}\n\n", p.determinism_hash);
    s += &format!(
        "{:<38} {:<8} {:<22} {:<19} {:<19}\n",
        "STEP", "WHERE", "WINDOW", "START", "END"
    );
    for x in &p.schedule {
        let window = match x.window_id {
            Some(id) => {
                let w = &p.timeline[id];
                match &w.station {
                    Some(st) => format!("{id} pass {st}"),
                    None => format!("{id} {:?}", w.illumination).to_lowercase(),
                }
            }
            None => "ground".to_string(),
        };
        let place = format!("{:?}", x.location).to_lowercase();
        s += &format!(
            "{:<38} {:<8} {:<22} {:<19} {:<19}\n",
            x.step_id,
            place,
            window,
            time(x.t_start),
            time(x.t_end)
        );
    }
    s
}

fn windows_table(ws: &[OrbitalWindow]) -> String {
    let mut s = format!(
        "{:>4} {:<13} {:<19} {:>8} {:>6} {:>5} {:>6} {}\n",
        "ID", "KIND", "START", "SECONDS", "POWER", "CPU", "RATE", "STATION"
    );
    for w in ws {
        let kind = serde_json::to_value(w.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        s += &format!(
            "{:>4} {:<13} {:<19} {:>8.0} {:>6.1} {:>5.2} {:>6.1} {}\n",
            w.id,
            kind,
            time(w.t_start),
            w.duration(),
            w.power,
            w.compute,
            w.comms_rate,
            w.station.as_deref().unwrap_or("-")
        );
    }
    s
}

fn passes_by_station(passes: &[PassSummary]) -> BTreeMap<String, Vec<PassSummary>> {
    let mut by: BTreeMap<String, Vec<PassSummary>> = BTreeMap::new();
    for p in passes {
        by.entry(p.station_id.clone()).or_default().push(p.clone());
    }
    by
}

fn passes_table(by: &BTreeMap<String, Vec<PassSummary>>) -> String {
    let mut s = format!(
        "{:<14} {:<19} {:<19} {:>6} {:>7} {:>9}\n",
        "STATION", "AOS", "LOS", "PEAK", "RATE", "MB"
    );
    for (station, list) in by {
        for p in list {
            s += &format!(
                "{:<14} {:<19} {:<19} {:>6.1} {:>7.1} {:>9.1}\n",
                station,
                time(p.aos),
                time(p.los),
                p.peak_elevation,
                p.mean_data_rate,
                p.capacity
            );
        }
    }
    s
}

fn presets_out(format: Format) -> String {
    match format {
        Format::Json => {
            let list: Vec<_> = PRESET_NAMES
                .iter()
                .map(|n| serde_json::json!({"name": n, "summary": preset_summary(n)}))
                .collect();
            serde_json::to_string_pretty(&list).expect("json")
        }
        Format::Table => PRESET_NAMES
            .iter()
            .map(|n| {
                let steps = load_preset(n).map(|w| w.steps.len()).unwrap_or(0);
                format!(
                    "{n:<16} {steps:>2} steps  {}",
                    preset_summary(n).unwrap_or("")
                )
            })
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn serve(args: ServeArgs) -> Result<(), GatewayError> {
    let source = match (args.tle_dir, args.tle_file) {
        (Some(dir), _) => TleSource::Directory(dir),
        (None, Some(file)) => TleSource::File(file),
        (None, None) if args.offline => {
            return Err(GatewayError::Input(
                "--offline requires --tle-dir or --tle-file".into(),
            ))
        }
        (None, None) => TleSource::Remote(TleClient::from_env()),
    };
    let bind = args
        .bind
        .or_else(|| std::env::var(BIND_ENV).ok())
        .unwrap_or_else(|| DEFAULT_BIND.to_string());
    let planner = Arc::new(Planner::new(source, PlanCache::from_env()));
    let rt = tokio::runtime::Runtime::new().map_err(|e| GatewayError::Input(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(&bind)
            .await
            .map_err(|e| GatewayError::Input(format!("cannot bind {bind}: {e}")))?;
        eprintln!(
            "listening on {}",
            listener
                .local_addr()
                .map_or(bind.clone(), |a| a.to_string())
        );
        http::serve(listener, planner)
            .await
            .map_err(|e| GatewayError::Input(e.to_string()))
    })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), GatewayError> {
    match cli.command {
        Command::Plan(args) => {
            let workload = workload_spec(&args)?;
            let tle = load_tle(&args.env)?;
            let req = PlanRequest {
                norad: tle.catalog_number,
                workload,
                horizon_hours: args.env.horizon,
                start: StartTime::parse(&args.env.start)?,
                config: load_config(args.env.config.as_ref())?,
            };
            let plan = plan_once(&tle, &req)?;
            match args.env.format {
                Format::Json => write_out(out, &plan.canonical_json()),
                Format::Table => write_out(out, &plan_table(&plan)),
            }
        }
        Command::Windows(args) => {
            let tle = load_tle(&args)?;
            let cfg = load_config(args.config.as_ref())?;
            let env = environment(
                &tle,
                StartTime::parse(&args.start)?.resolve(),
                args.horizon,
                &cfg,
            )?;
            match args.format {
                Format::Json => write_out(out, &to_canonical_string(&env.timeline)),
                Format::Table => write_out(out, &windows_table(&env.timeline)),
            }
        }
        Command::Passes(args) => {
            let tle = load_tle(&args)?;
            let cfg = load_config(args.config.as_ref())?;
            let env = environment(
                &tle,
                StartTime::parse(&args.start)?.resolve(),
                args.horizon,
                &cfg,
            )?;
            let summaries: Vec<PassSummary> = env.passes.iter().map(PassSummary::from).collect();
            let by = passes_by_station(&summaries);
            match args.format {
                Format::Json => write_out(out, &to_canonical_string(&by)),
                Format::Table => write_out(out, &passes_table(&by)),
            }
        }
        Command::Presets { format } => write_out(out, &presets_out(format)),
        Command::Serve(args) => serve(args),
    }
}

/// Parses `argv` and runs the command. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}
