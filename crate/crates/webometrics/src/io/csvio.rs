//! CSV interchange for the tabular artifacts the pipeline reads and writes.
//!
//! Readers match columns by header name, ignore columns they do not know,
//! and report the offending line for every field-level problem. Writers
//! always emit a header row and use `\n` terminators.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use serde::Deserialize;
use thiserror::Error;

use crate::collector::{CollectionEntry, CollectionOutcome, FixtureRecord};
use crate::ingest::{DomainExclusion, RegionalAnomaly, StabilityCheck};
use crate::layout::{Color, NodePlacement};
use crate::model::{
    Institution, InstitutionKind, MentionEdge, NodeMetrics, Region, Sector, WebMetricsRecord,
};
use crate::network::{InteractionRank, PairwiseHit};
use crate::queryplan::QuerySpec;
use crate::stats::{CorrelationMatrix, Descriptives};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Field { line: u64, message: String },
}

fn field_err(line: u64, message: impl Into<String>) -> CsvError {
    CsvError::Field {
        line,
        message: message.into(),
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r)
}

macro_rules! path_variant {
    ($path_fn:ident, $reader_fn:ident, $item:ty) => {
        pub fn $path_fn(path: &Path) -> Result<Vec<$item>, CsvError> {
            $reader_fn(File::open(path)?)
        }
    };
}

#[derive(Deserialize)]
struct RosterRow {
    id: String,
    name: String,
    kind: String,
    sector: String,
    domains: String,
    source_rank: u32,
}

/// Roster columns: id,name,kind,sector,domains,source_rank. Domains are
/// semicolon-separated; sector is empty for universities.
pub fn read_roster<R: Read>(r: R) -> Result<Vec<Institution>, CsvError> {
    let mut rdr = reader(r);
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: RosterRow = record.deserialize(Some(&headers))?;
        let kind: InstitutionKind = row.kind.parse().map_err(|e: String| field_err(line, e))?;
        let sector = if row.sector.is_empty() {
            None
        } else {
            Some(
                Sector::from_label(&row.sector)
                    .ok_or_else(|| field_err(line, format!("unknown sector {:?}", row.sector)))?,
            )
        };
        let domains: Vec<String> = row
            .domains
            .split(';')
            .map(str::trim)
            .filter(|d| !d.is_empty())
            .map(str::to_string)
            .collect();
        out.push(Institution {
            id: row.id,
            name: row.name,
            kind,
            sector,
            domains,
            source_rank: row.source_rank,
        });
    }
    Ok(out)
}
path_variant!(read_roster_path, read_roster, Institution);

#[derive(Deserialize)]
struct MetricsRow {
    institution_id: String,
    sample_date: NaiveDate,
    tpc: u64,
    apc: u64,
    gum: u64,
    lum: u64,
    domain_authority: u8,
    external_links: u64,
    root_domains: u64,
    citations: Option<u64>,
    sales: Option<f64>,
}

/// Metrics columns: institution_id,sample_date,tpc,apc,gum,lum,
/// domain_authority,external_links,root_domains,citations,sales.
/// Citations and sales may be empty.
pub fn read_metrics<R: Read>(r: R) -> Result<Vec<WebMetricsRecord>, CsvError> {
    let mut rdr = reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: MetricsRow = row?;
        out.push(WebMetricsRecord {
            institution_id: row.institution_id,
            sample_date: row.sample_date,
            tpc: row.tpc,
            apc: row.apc,
            gum: row.gum,
            lum: row.lum,
            domain_authority: row.domain_authority,
            external_links: row.external_links,
            root_domains: row.root_domains,
            citations: row.citations,
            sales: row.sales,
        });
    }
    Ok(out)
}
path_variant!(read_metrics_path, read_metrics, WebMetricsRecord);

#[derive(Deserialize)]
struct FixtureRow {
    query_string: String,
    region: String,
    value: u64,
    retrieved_at: DateTime<Utc>,
}

/// Recorded-response columns: query_string,region,value,retrieved_at.
/// Extra columns (such as a collection status) are ignored.
pub fn read_fixture_records<R: Read>(r: R) -> Result<Vec<FixtureRecord>, CsvError> {
    let mut rdr = reader(r);
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: FixtureRow = record.deserialize(Some(&headers))?;
        let region: Region = row.region.parse().map_err(|e: String| field_err(line, e))?;
        out.push(FixtureRecord {
            query_string: row.query_string,
            region,
            value: row.value,
            retrieved_at: row.retrieved_at,
        });
    }
    Ok(out)
}
path_variant!(
    read_fixture_records_path,
    read_fixture_records,
    FixtureRecord
);

#[derive(Deserialize)]
struct PairwiseRow {
    host_domain: String,
    target_domain: String,
    hits: u64,
}

/// Pairwise-mention columns: host_domain,target_domain,hits.
pub fn read_pairwise<R: Read>(r: R) -> Result<Vec<PairwiseHit>, CsvError> {
    let mut rdr = reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: PairwiseRow = row?;
        out.push(PairwiseHit {
            host_domain: row.host_domain,
            target_domain: row.target_domain,
            hits: row.hits,
        });
    }
    Ok(out)
}
path_variant!(read_pairwise_path, read_pairwise, PairwiseHit);

pub fn write_pairwise<W: Write>(w: W, rows: &[PairwiseHit]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["host_domain", "target_domain", "hits"])?;
    for row in rows {
        wtr.write_record([
            row.host_domain.as_str(),
            row.target_domain.as_str(),
            &row.hits.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct PlanRow {
    metric: String,
    target: String,
    host: String,
    region: String,
    engine: String,
}

/// Plan columns: metric,target,host,region,engine,query_string. The host
/// is empty for non-pairwise rows; the stored query string is redundant
/// (derivable from the other columns) and ignored on read.
pub fn read_plan<R: Read>(r: R) -> Result<Vec<QuerySpec>, CsvError> {
    let mut rdr = reader(r);
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: PlanRow = record.deserialize(Some(&headers))?;
        let map_parse = |e: String| field_err(line, e);
        out.push(QuerySpec {
            metric: row.metric.parse().map_err(map_parse)?,
            target_domain: row.target,
            host_domain: (!row.host.is_empty()).then_some(row.host),
            region: row.region.parse().map_err(map_parse)?,
            engine: row.engine.parse().map_err(map_parse)?,
        });
    }
    Ok(out)
}
path_variant!(read_plan_path, read_plan, QuerySpec);

pub fn write_plan<W: Write>(w: W, plan: &[QuerySpec]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "metric",
        "target",
        "host",
        "region",
        "engine",
        "query_string",
    ])?;
    for spec in plan {
        let query = crate::queryplan::build_query(spec)
            .map_err(|e| field_err(0, format!("unbuildable spec: {e}")))?;
        wtr.write_record([
            spec.metric.as_str(),
            spec.target_domain.as_str(),
            spec.host_domain.as_deref().unwrap_or(""),
            spec.region.as_str(),
            spec.engine.as_str(),
            &query,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Collection output: the fixture columns plus a status column with
/// `recorded`, `defaulted`, or `failed`. Failed rows keep value 0 and the
/// epoch timestamp so the file stays rectangular.
pub fn write_collection<W: Write>(w: W, entries: &[CollectionEntry]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["query_string", "region", "value", "retrieved_at", "status"])?;
    for entry in entries {
        let (value, retrieved_at, status) = match &entry.outcome {
            CollectionOutcome::Hit {
                hit,
                recorded: true,
            } => (hit.value, hit.retrieved_at, "recorded"),
            CollectionOutcome::Hit {
                hit,
                recorded: false,
            } => (hit.value, hit.retrieved_at, "defaulted"),
            CollectionOutcome::Failed { .. } => (0, crate::collector::epoch_sentinel(), "failed"),
        };
        wtr.write_record([
            entry.query.as_str(),
            entry.spec.region.as_str(),
            &value.to_string(),
            &retrieved_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            status,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct PlacementRow {
    node_id: String,
    x: f64,
    y: f64,
    size: f64,
    color: String,
}

/// Placement columns: node_id,x,y,size,color.
pub fn read_placements<R: Read>(r: R) -> Result<Vec<NodePlacement>, CsvError> {
    let mut rdr = reader(r);
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: PlacementRow = record.deserialize(Some(&headers))?;
        let color: Color = row.color.parse().map_err(|e: String| field_err(line, e))?;
        out.push(NodePlacement {
            node_id: row.node_id,
            x: row.x,
            y: row.y,
            size: row.size,
            color,
        });
    }
    Ok(out)
}
path_variant!(read_placements_path, read_placements, NodePlacement);

pub fn write_placements<W: Write>(w: W, placements: &[NodePlacement]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["node_id", "x", "y", "size", "color"])?;
    for p in placements {
        wtr.write_record([
            p.node_id.as_str(),
            &p.x.to_string(),
            &p.y.to_string(),
            &p.size.to_string(),
            p.color.key(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_node_metrics<W: Write>(w: W, metrics: &[NodeMetrics]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "node_id",
        "degree",
        "in_degree",
        "out_degree",
        "closeness",
        "harmonic_closeness",
        "betweenness",
        "eigenvector",
        "clustering",
    ])?;
    for m in metrics {
        wtr.write_record([
            m.node_id.as_str(),
            &m.degree.to_string(),
            &m.in_degree.to_string(),
            &m.out_degree.to_string(),
            &m.closeness.to_string(),
            &m.harmonic_closeness.to_string(),
            &m.betweenness.to_string(),
            &m.eigenvector.to_string(),
            &m.clustering.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// One row per variable of one group.
pub fn write_descriptives<W: Write>(w: W, rows: &[(String, Descriptives)]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "variable", "n", "mean", "median", "std_dev", "skewness", "kurtosis",
    ])?;
    for (variable, d) in rows {
        wtr.write_record([
            variable.as_str(),
            &d.n.to_string(),
            &d.mean.to_string(),
            &d.median.to_string(),
            &d.std_dev.to_string(),
            &d.skewness.map(|v| v.to_string()).unwrap_or_default(),
            &d.kurtosis.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Long form, upper triangle only: one row per unordered variable pair.
pub fn write_correlation<W: Write>(w: W, matrix: &CorrelationMatrix) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "variable_a",
        "variable_b",
        "n",
        "rho",
        "p_value",
        "significant_05",
        "significant_01",
    ])?;
    for i in 0..matrix.variables.len() {
        for j in (i + 1)..matrix.variables.len() {
            wtr.write_record([
                matrix.variables[i].as_str(),
                matrix.variables[j].as_str(),
                &matrix.n_pairs[i][j].to_string(),
                &matrix.rho[i][j].to_string(),
                &matrix.p_values[i][j].to_string(),
                &matrix.significant_05[i][j].to_string(),
                &matrix.significant_01[i][j].to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_eigenvalues<W: Write>(
    w: W,
    eigenvalues: &[f64],
    explained_share: &[f64],
) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["component", "eigenvalue", "explained_share"])?;
    for (i, &ev) in eigenvalues.iter().enumerate() {
        let share = explained_share
            .get(i)
            .map(|v| v.to_string())
            .unwrap_or_default();
        wtr.write_record([&(i + 1).to_string(), &ev.to_string(), &share])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Rotated loadings, one row per variable and one column per component.
pub fn write_loadings<W: Write>(
    w: W,
    variables: &[String],
    loadings: &nalgebra::DMatrix<f64>,
) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["variable".to_string()];
    header.extend((1..=loadings.ncols()).map(|c| format!("pc{c}")));
    wtr.write_record(&header)?;
    for (i, variable) in variables.iter().enumerate() {
        let mut row = vec![variable.clone()];
        row.extend((0..loadings.ncols()).map(|c| loadings[(i, c)].to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Component scores, one row per observation id.
pub fn write_scores<W: Write>(
    w: W,
    ids: &[String],
    scores: &nalgebra::DMatrix<f64>,
) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["institution_id".to_string()];
    header.extend((1..=scores.ncols()).map(|c| format!("pc{c}")));
    wtr.write_record(&header)?;
    for (i, id) in ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend((0..scores.ncols()).map(|c| scores[(i, c)].to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_top_combinations<W: Write>(w: W, edges: &[MentionEdge]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["host_id", "target_id", "hits", "edge_type"])?;
    for e in edges {
        wtr.write_record([
            e.host_id.as_str(),
            e.target_id.as_str(),
            &e.hits.to_string(),
            e.edge_type.map(|t| t.as_str()).unwrap_or(""),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_interaction<W: Write>(w: W, ranking: &[InteractionRank]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["university_id", "interaction_degree", "interaction_hits"])?;
    for r in ranking {
        wtr.write_record([
            r.university_id.as_str(),
            &r.interaction_degree.to_string(),
            &r.interaction_hits.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_anomalies<W: Write>(w: W, anomalies: &[RegionalAnomaly]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["institution_id", "gum", "lum"])?;
    for a in anomalies {
        wtr.write_record([
            a.institution_id.as_str(),
            &a.gum.to_string(),
            &a.lum.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Stability rows; failed checks carry an empty n/rho/p and a note.
pub fn write_stability<W: Write>(
    w: W,
    rows: &[(String, Result<StabilityCheck, String>)],
) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["variable", "n", "rho", "p_value", "note"])?;
    for (variable, result) in rows {
        match result {
            Ok(check) => wtr.write_record([
                variable.as_str(),
                &check.n.to_string(),
                &check.rho.to_string(),
                &check.p_value.to_string(),
                "",
            ])?,
            Err(note) => wtr.write_record([variable.as_str(), "", "", "", note.as_str()])?,
        }
    }
    wtr.flush()?;
    Ok(())
}

/// One row per roster institution with its resolved domain; excluded rows
/// name the institution the domain was awarded to.
pub fn write_resolution<W: Write>(
    w: W,
    included: &[(String, String)],
    exclusions: &[DomainExclusion],
) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["institution_id", "domain", "status", "awarded_to"])?;
    for (id, domain) in included {
        wtr.write_record([id.as_str(), domain.as_str(), "included", ""])?;
    }
    for e in exclusions {
        wtr.write_record([
            e.institution_id.as_str(),
            e.domain.as_str(),
            "excluded",
            e.awarded_to.as_str(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EdgeType;
    use chrono::TimeZone;

    #[test]
    fn roster_rows_parse_with_sector_and_domain_lists() {
        let text = "id,name,kind,sector,domains,source_rank\n\
            sdu.edu.tr,Suleyman Demirel University,University,,sdu.edu.tr,1\n\
            arcelik,Arcelik,Company,\"Metal Products, Machinery and Equipment, Professional instruments\",arcelik.com.tr; arcelikas.com,3\n";
        let roster = read_roster(text.as_bytes()).unwrap();
        assert_eq!(roster.len(), 2);
        assert_eq!(roster[0].kind, InstitutionKind::University);
        assert_eq!(roster[0].sector, None);
        assert_eq!(roster[1].sector, Some(Sector::MetalProductsMachinery));
        assert_eq!(roster[1].domains, vec!["arcelik.com.tr", "arcelikas.com"]);
    }

    #[test]
    fn roster_errors_carry_line_numbers() {
        let text = "id,name,kind,sector,domains,source_rank\n\
            a,A,University,,a.edu.tr,1\n\
            b,B,Charity,,b.com,2\n";
        match read_roster(text.as_bytes()).unwrap_err() {
            CsvError::Field { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("Charity"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn metrics_rows_parse_optionals() {
        let text = "institution_id,sample_date,tpc,apc,gum,lum,domain_authority,external_links,root_domains,citations,sales\n\
            sdu.edu.tr,2014-11-15,100,10,50,25,61,300,100,1500,\n\
            arcelik,2014-11-15,200,2,80,40,55,600,200,,12.5\n";
        let records = read_metrics(text.as_bytes()).unwrap();
        assert_eq!(records[0].citations, Some(1500));
        assert_eq!(records[0].sales, None);
        assert_eq!(records[1].citations, None);
        assert_eq!(records[1].sales, Some(12.5));
        assert_eq!(
            records[0].sample_date,
            NaiveDate::from_ymd_opt(2014, 11, 15).unwrap()
        );
    }

    #[test]
    fn fixture_rows_parse_and_ignore_extra_columns() {
        let text = "query_string,region,value,retrieved_at,status\n\
            site:abc.com,All,41,2014-12-15T10:00:00Z,recorded\n\
            \"\"\"abc.com\"\" -site:abc.com\",Turkey,7,2014-12-15T10:01:00Z,recorded\n";
        let records = read_fixture_records(text.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].value, 41);
        assert_eq!(records[1].region, Region::Turkey);
        assert_eq!(records[1].query_string, "\"abc.com\" -site:abc.com");
        assert_eq!(
            records[0].retrieved_at,
            Utc.with_ymd_and_hms(2014, 12, 15, 10, 0, 0).unwrap()
        );
    }

    #[test]
    fn plan_round_trips_through_csv() {
        let plan = vec![
            QuerySpec::tpc("abc.com"),
            QuerySpec::apc("sdu.edu.tr"),
            QuerySpec::gum("abc.com"),
            QuerySpec::lum("abc.com"),
            QuerySpec::pairwise("istanbul.edu.tr", "sdu.edu.tr"),
        ];
        let mut buf = Vec::new();
        write_plan(&mut buf, &plan).unwrap();
        let read = read_plan(buf.as_slice()).unwrap();
        assert_eq!(read, plan);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"\"\"istanbul.edu.tr\"\" site:sdu.edu.tr\""));
    }

    #[test]
    fn collection_entries_serialize_with_status() {
        let spec = QuerySpec::tpc("abc.com");
        let hit = |value, recorded| CollectionEntry {
            spec: spec.clone(),
            query: "site:abc.com".into(),
            outcome: CollectionOutcome::Hit {
                hit: crate::model::HitCount {
                    query: "site:abc.com".into(),
                    region: Region::All,
                    value,
                    retrieved_at: Utc.with_ymd_and_hms(2014, 12, 15, 10, 0, 0).unwrap(),
                },
                recorded,
            },
        };
        let failed = CollectionEntry {
            spec: spec.clone(),
            query: "site:abc.com".into(),
            outcome: CollectionOutcome::Failed {
                error: "engine hiccup".into(),
                attempts: 3,
            },
        };
        let mut buf = Vec::new();
        write_collection(&mut buf, &[hit(41, true), hit(0, false), failed]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("41,2014-12-15T10:00:00Z,recorded"));
        assert!(text.contains(",defaulted"));
        assert!(text.contains("0,1970-01-01T00:00:00Z,failed"));
        let as_fixture = read_fixture_records(buf.as_slice()).unwrap();
        assert_eq!(as_fixture.len(), 3);
    }

    #[test]
    fn placements_round_trip() {
        let placements = vec![
            NodePlacement {
                node_id: "uni".into(),
                x: 12.25,
                y: 900.5,
                size: 40.0,
                color: Color::Blue,
            },
            NodePlacement {
                node_id: "co".into(),
                x: 0.1,
                y: 0.2,
                size: 4.0,
                color: Color::LightBrown,
            },
        ];
        let mut buf = Vec::new();
        write_placements(&mut buf, &placements).unwrap();
        assert_eq!(read_placements(buf.as_slice()).unwrap(), placements);
    }

    #[test]
    fn pairwise_round_trips() {
        let rows = vec![PairwiseHit {
            host_domain: "sdu.edu.tr".into(),
            target_domain: "istanbul.edu.tr".into(),
            hits: 723_000,
        }];
        let mut buf = Vec::new();
        write_pairwise(&mut buf, &rows).unwrap();
        assert_eq!(read_pairwise(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn report_writers_produce_expected_headers() {
        let mut buf = Vec::new();
        write_top_combinations(
            &mut buf,
            &[MentionEdge {
                host_id: "a".into(),
                target_id: "b".into(),
                hits: 9,
                edge_type: Some(EdgeType::Transfer),
            }],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "host_id,target_id,hits,edge_type\na,b,9,TRANSFER\n");

        let mut buf = Vec::new();
        write_stability(
            &mut buf,
            &[
                (
                    "tpc".into(),
                    Ok(StabilityCheck {
                        variable: crate::ingest::MetricVariable::Tpc,
                        n: 100,
                        rho: 0.97,
                        p_value: 0.0,
                    }),
                ),
                ("sales".into(), Err("constant column".into())),
            ],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("tpc,100,0.97,0,"));
        assert!(text.contains("sales,,,,constant column"));
    }
}
