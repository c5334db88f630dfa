//! Command-line front end for the webometrics library.
//!
//! Each subcommand runs one pipeline stage over files; `run` chains them
//! all from a config file. Exit code 2 means bad input, 1 means a
//! processing failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use webometrics::collector::CollectionOutcome;
use webometrics::ingest::{flag_regional_anomalies, sample_stability, MetricVariable};
use webometrics::io::config::load_config;
use webometrics::io::csvio::{self, CsvError};
use webometrics::io::{gexf, pajek};
use webometrics::layout::{fruchterman_reingold, place_nodes, LayoutParams, SizeRange};
use webometrics::model::{InstitutionKind, MentionNetwork, SummaryMode};
use webometrics::network::{
    build_network, interaction_ranking, node_metrics, top_combinations, PairwiseHit,
};
use webometrics::pipeline::{self, FailureKind, PipelineError};

const OUTPUT_DIR_ENV: &str = "WEBOMETRICS_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "webometrics",
    version,
    about = "Webometric indicator pipeline over recorded engine responses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve roster domains and write the full query plan.
    Plan {
        #[arg(long)]
        roster: PathBuf,
        /// Recorded responses: a directory with general.csv and optional
        /// academic.csv, or a single general-index file.
        #[arg(long)]
        fixtures: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Replay the recorded responses over the plan and log every query.
    Collect {
        #[arg(long)]
        roster: PathBuf,
        #[arg(long)]
        fixtures: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Validate metric samples and write quality reports.
    Ingest {
        #[arg(long)]
        roster: PathBuf,
        /// Labeled sample, as label=path. Repeat for consecutive samples;
        /// stability is checked between neighbours in the given order.
        #[arg(long = "sample", value_parser = parse_sample, required = true)]
        samples: Vec<(String, PathBuf)>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Descriptives, rank correlations, and rotated components per group.
    Stats {
        #[arg(long)]
        roster: PathBuf,
        #[arg(long = "sample", value_parser = parse_sample, required = true)]
        samples: Vec<(String, PathBuf)>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Build the mention network and write its metric tables.
    Net {
        #[arg(long)]
        roster: PathBuf,
        #[arg(long)]
        fixtures: PathBuf,
        /// Use these pairwise counts instead of replaying the plan.
        #[arg(long)]
        pairwise: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Force-directed coordinates for a Pajek NET file.
    Layout {
        /// Network in Pajek NET format.
        #[arg(long)]
        net: PathBuf,
        /// Output CSV of node_id,x,y.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
    },
    /// Write NET, GEXF, and placement files for the network.
    Export {
        #[arg(long)]
        roster: PathBuf,
        #[arg(long)]
        fixtures: PathBuf,
        #[arg(long)]
        pairwise: Option<PathBuf>,
        #[command(flatten)]
        layout: LayoutArgs,
        /// Smallest node diameter.
        #[arg(long, default_value_t = 4.0)]
        size_min: f64,
        /// Largest node diameter.
        #[arg(long, default_value_t = 40.0)]
        size_max: f64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run every stage from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LayoutArgs {
    /// Frame width.
    #[arg(long, default_value_t = 1000.0)]
    width: f64,
    /// Frame height.
    #[arg(long, default_value_t = 1000.0)]
    height: f64,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    /// Scale on the optimal distance k.
    #[arg(long, default_value_t = 1.0)]
    c_constant: f64,
    /// Starting temperature; width/10 when omitted.
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl LayoutArgs {
    fn params(&self) -> LayoutParams {
        LayoutParams {
            width: self.width,
            height: self.height,
            iterations: self.iterations,
            c_constant: self.c_constant,
            initial_temperature: self.temperature,
            seed: self.seed,
        }
    }
}

fn parse_sample(s: &str) -> Result<(String, PathBuf), String> {
    let (label, path) = s
        .split_once('=')
        .ok_or_else(|| format!("expected label=path, got {s:?}"))?;
    if label.is_empty() || path.is_empty() {
        return Err(format!("expected label=path, got {s:?}"));
    }
    Ok((label.to_string(), PathBuf::from(path)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err.kind {
                FailureKind::Input => ExitCode::from(2),
                FailureKind::Compute => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Plan {
            roster,
            fixtures,
            out_dir,
        } => cmd_plan(&roster, &fixtures, &resolve_out_dir(out_dir)),
        Command::Collect {
            roster,
            fixtures,
            out_dir,
        } => cmd_collect(&roster, &fixtures, &resolve_out_dir(out_dir)),
        Command::Ingest {
            roster,
            samples,
            out_dir,
        } => cmd_ingest(&roster, &samples, &resolve_out_dir(out_dir)),
        Command::Stats {
            roster,
            samples,
            out_dir,
        } => cmd_stats(&roster, &samples, &resolve_out_dir(out_dir)),
        Command::Net {
            roster,
            fixtures,
            pairwise,
            top_k,
            out_dir,
        } => cmd_net(
            &roster,
            &fixtures,
            pairwise.as_deref(),
            top_k,
            &resolve_out_dir(out_dir),
        ),
        Command::Layout { net, out, layout } => cmd_layout(&net, &out, &layout.params()),
        Command::Export {
            roster,
            fixtures,
            pairwise,
            layout,
            size_min,
            size_max,
            out_dir,
        } => cmd_export(
            &roster,
            &fixtures,
            pairwise.as_deref(),
            &layout.params(),
            SizeRange {
                min: size_min,
                max: size_max,
            },
            &resolve_out_dir(out_dir),
        ),
        Command::Run { config, output_dir } => cmd_run(&config, output_dir),
    }
}

/// Flag first, then the environment, then `out`.
fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn ensure_dir(dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(|e| {
        PipelineError::input("output", format!("cannot create {}: {e}", dir.display()))
    })
}

fn save(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), PipelineError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| {
        PipelineError::compute("output", format!("cannot write {}: {e}", path.display()))
    })?;
    println!("wrote {}", path.display());
    Ok(())
}

fn save_csv(
    dir: &Path,
    name: &str,
    build: impl FnOnce(&mut Vec<u8>) -> Result<(), CsvError>,
) -> Result<(), PipelineError> {
    let mut buf = Vec::new();
    build(&mut buf).map_err(|e| PipelineError::compute("output", format!("{name}: {e}")))?;
    save(dir, name, &buf)
}

fn cmd_plan(roster_path: &Path, fixtures: &Path, out_dir: &Path) -> Result<(), PipelineError> {
    let roster = pipeline::load_roster(roster_path)?;
    let driver = pipeline::load_fixtures(fixtures)?;
    let (_, resolved) = pipeline::resolve_roster(&roster, &driver)?;
    ensure_dir(out_dir)?;
    let included: Vec<(String, String)> = resolved
        .nodes
        .iter()
        .map(|n| (n.id.clone(), n.domain.clone()))
        .collect();
    save_csv(out_dir, "resolution.csv", |buf| {
        csvio::write_resolution(buf, &included, &resolved.exclusions)
    })?;
    println!(
        "resolution: {} retained, {} excluded",
        resolved.nodes.len(),
        resolved.exclusions.len()
    );
    let plan = pipeline::full_plan(&roster, &resolved)?;
    save_csv(out_dir, "plan.csv", |buf| csvio::write_plan(buf, &plan))?;
    println!("plan: {} queries", plan.len());
    Ok(())
}

fn cmd_collect(roster_path: &Path, fixtures: &Path, out_dir: &Path) -> Result<(), PipelineError> {
    let roster = pipeline::load_roster(roster_path)?;
    let driver = pipeline::load_fixtures(fixtures)?;
    let (_, resolved) = pipeline::resolve_roster(&roster, &driver)?;
    let plan = pipeline::full_plan(&roster, &resolved)?;
    println!("plan: {} queries", plan.len());
    let entries = pipeline::run_plan(&plan, &driver, "collect")?;
    ensure_dir(out_dir)?;
    save_csv(out_dir, "collected.csv", |buf| {
        csvio::write_collection(buf, &entries)
    })?;
    let mut recorded = 0;
    let mut defaulted = 0;
    let mut failed = 0;
    for entry in &entries {
        match &entry.outcome {
            CollectionOutcome::Hit { recorded: true, .. } => recorded += 1,
            CollectionOutcome::Hit {
                recorded: false, ..
            } => defaulted += 1,
            CollectionOutcome::Failed { .. } => failed += 1,
        }
    }
    println!(
        "collection: {} entries ({recorded} recorded, {defaulted} defaulted, {failed} failed)",
        entries.len()
    );
    Ok(())
}

fn cmd_ingest(
    roster_path: &Path,
    samples: &[(String, PathBuf)],
    out_dir: &Path,
) -> Result<(), PipelineError> {
    let roster = pipeline::load_roster(roster_path)?;
    let mut loaded = Vec::new();
    for (label, path) in samples {
        let sample = pipeline::load_sample(label, path, &roster)?;
        println!("sample {label}: {} records", sample.len());
        loaded.push(sample);
    }
    ensure_dir(out_dir)?;
    for sample in &loaded {
        let anomalies = flag_regional_anomalies(sample);
        save_csv(out_dir, &format!("anomalies_{}.csv", sample.label), |buf| {
            csvio::write_anomalies(buf, &anomalies)
        })?;
        println!("anomalies {}: {} flagged", sample.label, anomalies.len());
    }
    for pair in loaded.windows(2) {
        let mut rows = Vec::new();
        for variable in MetricVariable::ALL {
            let result = sample_stability(&pair[0], &pair[1], variable).map_err(|e| e.to_string());
            rows.push((variable.name().to_string(), result));
        }
        let name = format!("stability_{}_{}.csv", pair[0].label, pair[1].label);
        save_csv(out_dir, &name, |buf| csvio::write_stability(buf, &rows))?;
        println!(
            "stability {}->{}: {} variables",
            pair[0].label,
            pair[1].label,
            rows.len()
        );
    }
    Ok(())
}

fn cmd_stats(
    roster_path: &Path,
    samples: &[(String, PathBuf)],
    out_dir: &Path,
) -> Result<(), PipelineError> {
    let roster = pipeline::load_roster(roster_path)?;
    for (label, path) in samples {
        let sample = pipeline::load_sample(label, path, &roster)?;
        for kind in [InstitutionKind::University, InstitutionKind::Company] {
            let files = pipeline::write_sample_stats(out_dir, label, &sample, &roster, kind)?;
            for file in files {
                println!("wrote {}", file.display());
            }
        }
        println!("stats {label}: both groups");
    }
    Ok(())
}

struct BuiltNetwork {
    net: MentionNetwork,
    pairwise: Vec<PairwiseHit>,
}

/// Resolves the roster against the recordings, then builds the mention
/// network either from a pairwise file or by replaying the full plan.
/// Node sizes carry the replayed size-query counts.
fn build_from_sources(
    roster_path: &Path,
    fixtures: &Path,
    pairwise_path: Option<&Path>,
) -> Result<BuiltNetwork, PipelineError> {
    let roster = pipeline::load_roster(roster_path)?;
    let driver = pipeline::load_fixtures(fixtures)?;
    let (tpc_by_domain, resolved) = pipeline::resolve_roster(&roster, &driver)?;
    let (pairwise, from_file) = match pairwise_path {
        Some(path) => {
            let rows = csvio::read_pairwise_path(path)
                .map_err(|e| PipelineError::input("network", format!("{}: {e}", path.display())))?;
            (rows, true)
        }
        None => {
            let plan = pipeline::full_plan(&roster, &resolved)?;
            let entries = pipeline::run_plan(&plan, &driver, "collect")?;
            (pipeline::pairwise_from_entries(&entries), false)
        }
    };
    let view = pipeline::network_roster_view(&roster, &resolved);
    let net = build_network(&pairwise, &view).map_err(|e| PipelineError {
        stage: "network",
        kind: if from_file {
            FailureKind::Input
        } else {
            FailureKind::Compute
        },
        message: e.to_string(),
    })?;
    let tpc_map: BTreeMap<String, u64> = resolved
        .nodes
        .iter()
        .map(|n| {
            (
                n.id.clone(),
                tpc_by_domain.get(&n.domain).copied().unwrap_or(0),
            )
        })
        .collect();
    let net = net.attach_tpc(&tpc_map);
    println!("network: {} nodes, {} arcs", net.n_nodes(), net.n_arcs());
    Ok(BuiltNetwork { net, pairwise })
}

fn cmd_net(
    roster_path: &Path,
    fixtures: &Path,
    pairwise_path: Option<&Path>,
    top_k: usize,
    out_dir: &Path,
) -> Result<(), PipelineError> {
    let built = build_from_sources(roster_path, fixtures, pairwise_path)?;
    ensure_dir(out_dir)?;
    save_csv(out_dir, "pairwise.csv", |buf| {
        csvio::write_pairwise(buf, &built.pairwise)
    })?;
    println!("pairwise: {} active pairs", built.pairwise.len());
    for mode in [SummaryMode::Directed, SummaryMode::UndirectedView] {
        let metrics = node_metrics(&built.net, mode);
        save_csv(out_dir, &format!("node_metrics_{mode}.csv"), |buf| {
            csvio::write_node_metrics(buf, &metrics)
        })?;
    }
    save(
        out_dir,
        "network_summary.txt",
        pipeline::summary_text(&built.net).as_bytes(),
    )?;
    save(
        out_dir,
        "classification.txt",
        pipeline::classification_text(&built.net)?.as_bytes(),
    )?;
    let top = top_combinations(&built.net, top_k);
    save_csv(out_dir, "top_combinations.csv", |buf| {
        csvio::write_top_combinations(buf, &top)
    })?;
    let ranking = interaction_ranking(&built.net)
        .map_err(|e| PipelineError::compute("metrics", e.to_string()))?;
    save_csv(out_dir, "interaction_ranking.csv", |buf| {
        csvio::write_interaction(buf, &ranking)
    })?;
    Ok(())
}

fn cmd_layout(net_path: &Path, out: &Path, params: &LayoutParams) -> Result<(), PipelineError> {
    let text = fs::read_to_string(net_path)
        .map_err(|e| PipelineError::input("layout", format!("{}: {e}", net_path.display())))?;
    let net = pajek::read_pajek(&text)
        .map_err(|e| PipelineError::input("layout", format!("{}: {e}", net_path.display())))?;
    let positions = fruchterman_reingold(&net, params)
        .map_err(|e| PipelineError::input("layout", e.to_string()))?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let rows = positions.len();
    let write = || -> Result<Vec<u8>, csv::Error> {
        wtr.write_record(["node_id", "x", "y"])?;
        for p in &positions {
            wtr.write_record([p.node_id.as_str(), &p.x.to_string(), &p.y.to_string()])?;
        }
        Ok(wtr.into_inner().expect("vec sink cannot fail"))
    };
    let bytes = write().map_err(|e| PipelineError::compute("layout", e.to_string()))?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    fs::write(out, bytes).map_err(|e| {
        PipelineError::compute("layout", format!("cannot write {}: {e}", out.display()))
    })?;
    println!("wrote {} ({rows} positions)", out.display());
    Ok(())
}

fn cmd_export(
    roster_path: &Path,
    fixtures: &Path,
    pairwise_path: Option<&Path>,
    params: &LayoutParams,
    sizes: SizeRange,
    out_dir: &Path,
) -> Result<(), PipelineError> {
    let built = build_from_sources(roster_path, fixtures, pairwise_path)?;
    let placements = place_nodes(&built.net, params, sizes)
        .map_err(|e| PipelineError::input("layout", e.to_string()))?;
    ensure_dir(out_dir)?;
    save_csv(out_dir, "placements.csv", |buf| {
        csvio::write_placements(buf, &placements)
    })?;
    let net_text = pajek::write_pajek(&built.net)
        .map_err(|e| PipelineError::compute("export", e.to_string()))?;
    save(out_dir, "network.net", net_text.as_bytes())?;
    let gexf_text = gexf::write_gexf(&built.net, Some(&placements))
        .map_err(|e| PipelineError::compute("export", e.to_string()))?;
    save(out_dir, "network.gexf", gexf_text.as_bytes())?;
    Ok(())
}

fn cmd_run(config_path: &Path, output_dir: Option<PathBuf>) -> Result<(), PipelineError> {
    let mut config = load_config(config_path)
        .map_err(|e| PipelineError::input("config", format!("{}: {e}", config_path.display())))?;
    if let Some(dir) = output_dir.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from)) {
        config.output_dir = dir;
    }
    let report = pipeline::run_pipeline(&config)?;
    for line in &report.lines {
        println!("{line}");
    }
    Ok(())
}
