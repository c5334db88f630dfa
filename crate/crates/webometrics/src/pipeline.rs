//! End-to-end orchestration: from roster, recorded responses, and metric
//! samples to statistics tables, network reports, and graph exports.
//!
//! Every artifact is a pure function of the inputs, so re-running a
//! pipeline over the same files reproduces every output byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::collector::{
    execute_plan, CollectionEntry, CollectionOutcome, CollectorConfig, FixtureDriver, SystemClock,
};
use crate::ingest::{
    flag_regional_anomalies, resolve_network_roster, sample_stability, MetricVariable,
    ResolvedRoster, SampleSet,
};
use crate::io::config::PipelineConfig;
use crate::io::csvio::{self, CsvError};
use crate::io::{gexf, pajek};
use crate::layout::place_nodes;
use crate::model::Region;
use crate::model::{Institution, InstitutionKind, MentionNetwork, RosterViolation, SummaryMode};
use crate::network::{
    build_network, classify_and_summarize, interaction_ranking, network_summary, node_metrics,
    top_combinations, PairwiseHit,
};
use crate::queryplan::{enumerate_pairwise_plan, MetricKind, PairScope, QuerySpec};
use crate::stats::{correlation_matrix, describe, log_transform, pca::pca, Descriptives};

/// Distinguishes bad inputs (exit code 2) from processing failures (1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Input,
    Compute,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("stage {stage}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub kind: FailureKind,
    pub message: String,
}

impl PipelineError {
    pub fn input(stage: &'static str, message: impl Into<String>) -> PipelineError {
        PipelineError {
            stage,
            kind: FailureKind::Input,
            message: message.into(),
        }
    }

    pub fn compute(stage: &'static str, message: impl Into<String>) -> PipelineError {
        PipelineError {
            stage,
            kind: FailureKind::Compute,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    /// Human-readable stage summary, one line each.
    pub lines: Vec<String>,
    /// Every file written, in write order.
    pub files: Vec<PathBuf>,
}

/// Loads and validates the roster. Shared domains are tolerated here; the
/// resolution stage settles them.
pub fn load_roster(path: &Path) -> Result<Vec<Institution>, PipelineError> {
    let stage = "load-roster";
    let roster = csvio::read_roster_path(path)
        .map_err(|e| PipelineError::input(stage, format!("{}: {e}", path.display())))?;
    if roster.is_empty() {
        return Err(PipelineError::input(
            stage,
            format!("{}: no institutions", path.display()),
        ));
    }
    let violations: Vec<String> = crate::model::validate_roster(&roster)
        .into_iter()
        .filter(|v| !matches!(v, RosterViolation::SharedDomain { .. }))
        .map(|v| v.to_string())
        .collect();
    if !violations.is_empty() {
        return Err(PipelineError::input(
            stage,
            format!("{}: {}", path.display(), violations.join("; ")),
        ));
    }
    Ok(roster)
}

/// Loads one metrics sample and checks it against the roster.
pub fn load_sample(
    label: &str,
    path: &Path,
    roster: &[Institution],
) -> Result<SampleSet, PipelineError> {
    let stage = "load-samples";
    let records = csvio::read_metrics_path(path)
        .map_err(|e| PipelineError::input(stage, format!("{}: {e}", path.display())))?;
    let sample = SampleSet::new(label, records)
        .map_err(|e| PipelineError::input(stage, format!("{}: {e}", path.display())))?;
    sample
        .validate_against(roster)
        .map_err(|e| PipelineError::input(stage, format!("{}: {e}", path.display())))?;
    Ok(sample)
}

/// Loads recorded engine responses into a replay driver.
///
/// A directory holds one file per engine: `general.csv` (required) and
/// `academic.csv` (optional). A plain file holds general-index recordings
/// only.
pub fn load_fixtures(path: &Path) -> Result<FixtureDriver, PipelineError> {
    let stage = "load-fixtures";
    let ctx = |e: CsvError, p: &Path| PipelineError::input(stage, format!("{}: {e}", p.display()));
    let (general, academic) = if path.is_dir() {
        let general_path = path.join("general.csv");
        let academic_path = path.join("academic.csv");
        let general =
            csvio::read_fixture_records_path(&general_path).map_err(|e| ctx(e, &general_path))?;
        let academic = if academic_path.exists() {
            csvio::read_fixture_records_path(&academic_path).map_err(|e| ctx(e, &academic_path))?
        } else {
            Vec::new()
        };
        (general, academic)
    } else {
        let general = csvio::read_fixture_records_path(path).map_err(|e| ctx(e, path))?;
        (general, Vec::new())
    };
    FixtureDriver::new(general, academic)
        .map_err(|e| PipelineError::input(stage, format!("{}: {e}", path.display())))
}

/// Runs a plan against a replay driver with default politeness settings.
pub fn run_plan(
    plan: &[QuerySpec],
    driver: &FixtureDriver,
    stage: &'static str,
) -> Result<Vec<CollectionEntry>, PipelineError> {
    execute_plan(
        plan,
        driver,
        &CollectorConfig::default(),
        &SystemClock,
        &mut ChaCha8Rng::seed_from_u64(0),
    )
    .map_err(|e| PipelineError::input(stage, e.to_string()))
}

/// Every distinct roster domain, first-claim order.
pub fn distinct_domains(roster: &[Institution]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for inst in roster {
        for domain in &inst.domains {
            if seen.insert(domain.as_str()) {
                out.push(domain.clone());
            }
        }
    }
    out
}

/// Replays the size queries and settles multi-domain institutions and
/// shared domains, dropping losing claimants.
pub fn resolve_roster(
    roster: &[Institution],
    driver: &FixtureDriver,
) -> Result<(BTreeMap<String, u64>, ResolvedRoster), PipelineError> {
    let stage = "resolve-domains";
    let plan: Vec<QuerySpec> = distinct_domains(roster)
        .into_iter()
        .map(QuerySpec::tpc)
        .collect();
    let entries = run_plan(&plan, driver, stage)?;
    let mut tpc_by_domain = BTreeMap::new();
    for entry in &entries {
        let value = entry.value().ok_or_else(|| {
            PipelineError::compute(stage, format!("no value for {}", entry.query))
        })?;
        tpc_by_domain.insert(entry.spec.target_domain.clone(), value);
    }
    let resolved = resolve_network_roster(roster, &tpc_by_domain)
        .map_err(|e| PipelineError::input(stage, e.to_string()))?;
    Ok((tpc_by_domain, resolved))
}

/// The complete query plan: size queries for every distinct domain, the
/// mention and activity queries for every resolved institution, and the
/// full ordered-pair mention plan.
pub fn full_plan(
    roster: &[Institution],
    resolved: &ResolvedRoster,
) -> Result<Vec<QuerySpec>, PipelineError> {
    let stage = "plan";
    let mut plan: Vec<QuerySpec> = distinct_domains(roster)
        .into_iter()
        .map(QuerySpec::tpc)
        .collect();
    for make in [QuerySpec::apc, QuerySpec::gum, QuerySpec::lum] {
        plan.extend(resolved.nodes.iter().map(|n| make(n.domain.clone())));
    }
    let pairwise = enumerate_pairwise_plan(&resolved.nodes, PairScope::All, Region::All)
        .map_err(|e| PipelineError::compute(stage, e.to_string()))?;
    plan.extend(pairwise);
    Ok(plan)
}

/// Positive pairwise counts from a collection run.
pub fn pairwise_from_entries(entries: &[CollectionEntry]) -> Vec<PairwiseHit> {
    entries
        .iter()
        .filter(|e| e.spec.metric == MetricKind::PairwiseMention)
        .filter_map(|e| {
            let hits = e.value().filter(|&v| v > 0)?;
            Some(PairwiseHit {
                host_domain: e.spec.host_domain.clone()?,
                target_domain: e.spec.target_domain.clone(),
                hits,
            })
        })
        .collect()
}

/// The retained institutions, each narrowed to its resolved domain, so the
/// network builder sees an unambiguous domain map.
pub fn network_roster_view(roster: &[Institution], resolved: &ResolvedRoster) -> Vec<Institution> {
    let by_id: BTreeMap<&str, &Institution> = roster.iter().map(|i| (i.id.as_str(), i)).collect();
    resolved
        .nodes
        .iter()
        .filter_map(|node| {
            let inst = by_id.get(node.id.as_str())?;
            Some(Institution {
                domains: vec![node.domain.clone()],
                ..(*inst).clone()
            })
        })
        .collect()
}

struct OutputDir {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl OutputDir {
    fn create(dir: &Path) -> Result<OutputDir, PipelineError> {
        std::fs::create_dir_all(dir).map_err(|e| {
            PipelineError::input("output", format!("cannot create {}: {e}", dir.display()))
        })?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn save(&mut self, stage: &'static str, name: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| {
            PipelineError::compute(stage, format!("cannot write {}: {e}", path.display()))
        })?;
        self.files.push(path);
        Ok(())
    }

    fn save_csv(
        &mut self,
        stage: &'static str,
        name: &str,
        build: impl FnOnce(&mut Vec<u8>) -> Result<(), CsvError>,
    ) -> Result<(), PipelineError> {
        let mut buf = Vec::new();
        build(&mut buf).map_err(|e| PipelineError::compute(stage, format!("{name}: {e}")))?;
        self.save(stage, name, &buf)
    }
}

fn group_ids<'a>(
    roster: &'a [Institution],
    sample: &SampleSet,
    kind: InstitutionKind,
) -> Vec<&'a str> {
    roster
        .iter()
        .filter(|i| i.kind == kind)
        .map(|i| i.id.as_str())
        .filter(|id| sample.get(id).is_some())
        .collect()
}

fn transform_column(
    variable: MetricVariable,
    values: &[Option<f64>],
) -> Result<Vec<Option<f64>>, String> {
    if variable.log_exempt() {
        return Ok(values.to_vec());
    }
    let dense: Vec<f64> = values.iter().flatten().copied().collect();
    let mut logged = log_transform(&dense)
        .map_err(|e| format!("{}: {e}", variable.name()))?
        .into_iter();
    Ok(values
        .iter()
        .map(|v| v.map(|_| logged.next().expect("one output per input")))
        .collect())
}

/// Writes descriptives, rank correlations, and rotated principal
/// components for one sample and one institution kind.
pub fn write_sample_stats(
    out_dir: &Path,
    label: &str,
    sample: &SampleSet,
    roster: &[Institution],
    kind: InstitutionKind,
) -> Result<Vec<PathBuf>, PipelineError> {
    let stage = "stats";
    let mut out = OutputDir::create(out_dir)?;
    let ids = group_ids(roster, sample, kind);
    let variables = MetricVariable::for_kind(kind);
    let suffix = format!("{label}_{}", kind.as_str().to_lowercase());

    let mut described: Vec<(String, Descriptives)> = Vec::new();
    for &variable in variables {
        let values: Vec<f64> = ids
            .iter()
            .filter_map(|id| variable.extract(sample.get(id).expect("ids are present")))
            .collect();
        let d = describe(&values).map_err(|e| {
            PipelineError::compute(stage, format!("{suffix}/{}: {e}", variable.name()))
        })?;
        described.push((variable.name().to_string(), d));
    }
    out.save_csv(stage, &format!("descriptives_{suffix}.csv"), |buf| {
        csvio::write_descriptives(buf, &described)
    })?;

    let mut columns: Vec<(String, Vec<Option<f64>>)> = Vec::new();
    for &variable in variables {
        let raw: Vec<Option<f64>> = ids
            .iter()
            .map(|id| variable.extract(sample.get(id).expect("ids are present")))
            .collect();
        let transformed = transform_column(variable, &raw)
            .map_err(|e| PipelineError::compute(stage, format!("{suffix}/{e}")))?;
        columns.push((variable.name().to_string(), transformed));
    }
    let matrix = correlation_matrix(&columns)
        .map_err(|e| PipelineError::compute(stage, format!("{suffix}: {e}")))?;
    out.save_csv(stage, &format!("correlation_{suffix}.csv"), |buf| {
        csvio::write_correlation(buf, &matrix)
    })?;

    let complete_ids: Vec<String> = ids
        .iter()
        .enumerate()
        .filter(|&(row, _)| columns.iter().all(|(_, col)| col[row].is_some()))
        .map(|(_, id)| id.to_string())
        .collect();
    let dense: Vec<(String, Vec<f64>)> = columns
        .iter()
        .map(|(name, col)| {
            let values = (0..ids.len())
                .filter(|&row| columns.iter().all(|(_, c)| c[row].is_some()))
                .map(|row| col[row].expect("complete row"))
                .collect();
            (name.clone(), values)
        })
        .collect();
    let probe =
        pca(&dense, 1).map_err(|e| PipelineError::compute(stage, format!("{suffix}: {e}")))?;
    let retain = probe
        .eigenvalues
        .iter()
        .filter(|&&ev| ev > 1.0)
        .count()
        .max(1);
    let result =
        pca(&dense, retain).map_err(|e| PipelineError::compute(stage, format!("{suffix}: {e}")))?;
    out.save_csv(stage, &format!("pca_eigenvalues_{suffix}.csv"), |buf| {
        csvio::write_eigenvalues(buf, &result.eigenvalues, &result.explained_share)
    })?;
    out.save_csv(stage, &format!("pca_loadings_{suffix}.csv"), |buf| {
        csvio::write_loadings(buf, &result.variables, &result.rotated_loadings)
    })?;
    out.save_csv(stage, &format!("pca_scores_{suffix}.csv"), |buf| {
        csvio::write_scores(buf, &complete_ids, &result.scores)
    })?;
    Ok(out.files)
}

/// The network summary in both modes as plain text.
pub fn summary_text(net: &MentionNetwork) -> String {
    let mut text = String::new();
    for mode in [SummaryMode::Directed, SummaryMode::UndirectedView] {
        let s = network_summary(net, mode);
        text.push_str(&format!("{}\n", s.mode));
        text.push_str(&format!("  nodes: {}\n", s.n_nodes));
        text.push_str(&format!("  arcs: {}\n", s.n_arcs));
        text.push_str(&format!("  isolated: {}\n", s.n_isolated));
        text.push_str(&format!("  avg degree: {:.4}\n", s.avg_degree));
        text.push_str(&format!("  density: {:.6}\n", s.density));
        text.push_str(&format!("  diameter: {}\n", s.diameter));
        text.push_str(&format!("  avg path length: {:.4}\n", s.avg_path_length));
        text.push_str(&format!("  avg clustering: {:.4}\n", s.avg_clustering));
        text.push_str(&format!("  largest component: {}\n", s.largest_component));
    }
    text
}

/// The arc classification report as plain text.
pub fn classification_text(net: &MentionNetwork) -> Result<String, PipelineError> {
    let report = classify_and_summarize(net)
        .map_err(|e| PipelineError::compute("metrics", e.to_string()))?;
    let mut text = format!("active pairs: {}\n", report.active_total);
    for summary in &report.summaries {
        text.push_str(&format!(
            "{}: pairs={} share={:.1}% total_hits={} mean_hits={:.1}\n",
            summary.edge_type,
            summary.active_pairs,
            report.share_percent(summary.edge_type),
            summary.total_hits,
            summary.mean_hits,
        ));
    }
    let (to_com, to_uni) = report.transfer_shares_percent();
    text.push_str(&format!(
        "transfer university->company: {} ({:.1}%)\n",
        report.transfer_uni_to_com, to_com
    ));
    text.push_str(&format!(
        "transfer company->university: {} ({:.1}%)\n",
        report.transfer_com_to_uni, to_uni
    ));
    Ok(text)
}

/// Runs every stage and writes all artifacts under the configured output
/// directory. Returns the stage summary and the list of files written.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    let mut lines = Vec::new();
    let mut out = OutputDir::create(&config.output_dir)?;

    let roster = load_roster(&config.roster)?;
    let universities = roster
        .iter()
        .filter(|i| i.kind == InstitutionKind::University)
        .count();
    lines.push(format!(
        "roster: {} institutions ({} universities, {} companies)",
        roster.len(),
        universities,
        roster.len() - universities
    ));

    let mut samples = Vec::new();
    for (label, path) in &config.samples {
        let sample = load_sample(label, path, &roster)?;
        lines.push(format!("sample {label}: {} records", sample.len()));
        samples.push(sample);
    }

    let driver = load_fixtures(&config.fixtures)?;
    lines.push(format!("fixtures: {} recordings", driver.len()));

    let (_tpc_by_domain, resolved) = resolve_roster(&roster, &driver)?;
    let included: Vec<(String, String)> = resolved
        .nodes
        .iter()
        .map(|n| (n.id.clone(), n.domain.clone()))
        .collect();
    out.save_csv("resolve-domains", "resolution.csv", |buf| {
        csvio::write_resolution(buf, &included, &resolved.exclusions)
    })?;
    lines.push(format!(
        "resolution: {} retained, {} excluded",
        resolved.nodes.len(),
        resolved.exclusions.len()
    ));

    let plan = full_plan(&roster, &resolved)?;
    out.save_csv("plan", "plan.csv", |buf| csvio::write_plan(buf, &plan))?;
    lines.push(format!("plan: {} queries", plan.len()));

    let entries = run_plan(&plan, &driver, "collect")?;
    out.save_csv("collect", "collected.csv", |buf| {
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
    lines.push(format!(
        "collection: {} entries ({recorded} recorded, {defaulted} defaulted, {failed} failed)",
        entries.len()
    ));

    for sample in &samples {
        let anomalies = flag_regional_anomalies(sample);
        out.save_csv(
            "quality",
            &format!("anomalies_{}.csv", sample.label),
            |buf| csvio::write_anomalies(buf, &anomalies),
        )?;
        lines.push(format!(
            "anomalies {}: {} flagged",
            sample.label,
            anomalies.len()
        ));
    }
    for pair in samples.windows(2) {
        let mut rows = Vec::new();
        for variable in MetricVariable::ALL {
            let result = sample_stability(&pair[0], &pair[1], variable).map_err(|e| e.to_string());
            rows.push((variable.name().to_string(), result));
        }
        let name = format!("stability_{}_{}.csv", pair[0].label, pair[1].label);
        out.save_csv("quality", &name, |buf| csvio::write_stability(buf, &rows))?;
        lines.push(format!(
            "stability {}->{}: {} variables",
            pair[0].label,
            pair[1].label,
            rows.len()
        ));
    }

    for sample in &samples {
        for kind in [InstitutionKind::University, InstitutionKind::Company] {
            let files =
                write_sample_stats(&config.output_dir, &sample.label, sample, &roster, kind)?;
            out.files.extend(files);
        }
        lines.push(format!("stats {}: both groups", sample.label));
    }

    let (pairwise, from_file) = match &config.pairwise {
        Some(path) => {
            let rows = csvio::read_pairwise_path(path)
                .map_err(|e| PipelineError::input("network", format!("{}: {e}", path.display())))?;
            (rows, true)
        }
        None => (pairwise_from_entries(&entries), false),
    };
    out.save_csv("network", "pairwise.csv", |buf| {
        csvio::write_pairwise(buf, &pairwise)
    })?;
    lines.push(format!("pairwise: {} active pairs", pairwise.len()));

    let view = network_roster_view(&roster, &resolved);
    let net = build_network(&pairwise, &view).map_err(|e| PipelineError {
        stage: "network",
        kind: if from_file {
            FailureKind::Input
        } else {
            FailureKind::Compute
        },
        message: e.to_string(),
    })?;
    let first_sample = &samples[0];
    let tpc_map: BTreeMap<String, u64> = resolved
        .nodes
        .iter()
        .map(|n| {
            let tpc = first_sample.get(&n.id).map(|r| r.tpc).unwrap_or(0);
            (n.id.clone(), tpc)
        })
        .collect();
    let net = net.attach_tpc(&tpc_map);
    lines.push(format!(
        "network: {} nodes, {} arcs",
        net.n_nodes(),
        net.n_arcs()
    ));

    for mode in [SummaryMode::Directed, SummaryMode::UndirectedView] {
        let metrics = node_metrics(&net, mode);
        out.save_csv("metrics", &format!("node_metrics_{mode}.csv"), |buf| {
            csvio::write_node_metrics(buf, &metrics)
        })?;
    }
    out.save(
        "metrics",
        "network_summary.txt",
        summary_text(&net).as_bytes(),
    )?;
    out.save(
        "metrics",
        "classification.txt",
        classification_text(&net)?.as_bytes(),
    )?;
    let top = top_combinations(&net, config.top_k);
    out.save_csv("metrics", "top_combinations.csv", |buf| {
        csvio::write_top_combinations(buf, &top)
    })?;
    let ranking =
        interaction_ranking(&net).map_err(|e| PipelineError::compute("metrics", e.to_string()))?;
    out.save_csv("metrics", "interaction_ranking.csv", |buf| {
        csvio::write_interaction(buf, &ranking)
    })?;
    lines.push(format!(
        "metrics: top {} links, {} ranked universities",
        top.len(),
        ranking.len()
    ));

    let placements = place_nodes(&net, &config.layout, config.sizes)
        .map_err(|e| PipelineError::compute("layout", e.to_string()))?;
    out.save_csv("layout", "placements.csv", |buf| {
        csvio::write_placements(buf, &placements)
    })?;
    lines.push(format!("layout: {} placements", placements.len()));

    let net_text =
        pajek::write_pajek(&net).map_err(|e| PipelineError::compute("export", e.to_string()))?;
    out.save("export", "network.net", net_text.as_bytes())?;
    let gexf_text = gexf::write_gexf(&net, Some(&placements))
        .map_err(|e| PipelineError::compute("export", e.to_string()))?;
    out.save("export", "network.gexf", gexf_text.as_bytes())?;
    lines.push(format!("outputs: {} files", out.files.len() + 1));

    let report_text = lines.join("\n") + "\n";
    out.save("report", "pipeline_report.txt", report_text.as_bytes())?;
    Ok(PipelineReport {
        lines,
        files: out.files,
    })
}
