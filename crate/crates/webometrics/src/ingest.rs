//! Sample organization and data-quality rules: multi-domain resolution,
//! shared-domain assignment, regional anomaly flags, and cross-sample
//! stability checks.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Institution, InstitutionKind, RecordError, WebMetricsRecord};
use crate::queryplan::ResolvedNode;
use crate::stats::{spearman, StatsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("duplicate record for institution {0:?}")]
    DuplicateRecord(String),
    #[error("record references unknown institution {0:?}")]
    UnknownInstitution(String),
    #[error("invalid record for {id:?}: {source}")]
    RecordInvalid {
        id: String,
        #[source]
        source: RecordError,
    },
    #[error("institution {0:?} lists no domains")]
    NoDomains(String),
    #[error("no hit count for domain {domain:?} of institution {institution_id:?}")]
    MissingTpc {
        institution_id: String,
        domain: String,
    },
    #[error("no claimants for domain {0:?}")]
    NoClaimants(String),
    #[error("domain {domain:?}: institutions {first:?} and {second:?} share the best rank")]
    RankTie {
        domain: String,
        first: String,
        second: String,
    },
    #[error("{variable}: only {got} institutions present in both samples, need 3")]
    TooFewCommon { variable: String, got: usize },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// One labeled snapshot of web metrics, keyed by institution id.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub label: String,
    records: BTreeMap<String, WebMetricsRecord>,
}

impl SampleSet {
    pub fn new(
        label: impl Into<String>,
        records: impl IntoIterator<Item = WebMetricsRecord>,
    ) -> Result<Self, IngestError> {
        let mut map = BTreeMap::new();
        for record in records {
            let id = record.institution_id.clone();
            if map.insert(id.clone(), record).is_some() {
                return Err(IngestError::DuplicateRecord(id));
            }
        }
        Ok(SampleSet {
            label: label.into(),
            records: map,
        })
    }

    pub fn get(&self, institution_id: &str) -> Option<&WebMetricsRecord> {
        self.records.get(institution_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in institution-id order.
    pub fn records(&self) -> impl Iterator<Item = &WebMetricsRecord> {
        self.records.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    /// Checks every record against the roster: the institution must exist
    /// and the record must satisfy the kind-specific field rules.
    pub fn validate_against(&self, roster: &[Institution]) -> Result<(), IngestError> {
        let kinds: BTreeMap<&str, InstitutionKind> = roster
            .iter()
            .map(|inst| (inst.id.as_str(), inst.kind))
            .collect();
        for record in self.records.values() {
            let kind = kinds
                .get(record.institution_id.as_str())
                .copied()
                .ok_or_else(|| IngestError::UnknownInstitution(record.institution_id.clone()))?;
            record
                .validate(kind)
                .map_err(|source| IngestError::RecordInvalid {
                    id: record.institution_id.clone(),
                    source,
                })?;
        }
        Ok(())
    }
}

/// Picks the institution's primary domain: the one with the highest
/// recorded hit count, earlier-listed domains winning ties.
pub fn resolve_multi_domain(
    institution: &Institution,
    tpc_by_domain: &BTreeMap<String, u64>,
) -> Result<String, IngestError> {
    if institution.domains.is_empty() {
        return Err(IngestError::NoDomains(institution.id.clone()));
    }
    let mut best: Option<(&str, u64)> = None;
    for domain in &institution.domains {
        let tpc = *tpc_by_domain
            .get(domain)
            .ok_or_else(|| IngestError::MissingTpc {
                institution_id: institution.id.clone(),
                domain: domain.clone(),
            })?;
        if best.is_none_or(|(_, top)| tpc > top) {
            best = Some((domain, tpc));
        }
    }
    Ok(best.expect("domains is non-empty").0.to_string())
}

/// Awards a domain claimed by several institutions to the one with the best
/// (lowest) source rank. A tie for the best rank is unresolvable.
pub fn assign_shared_domain<'a>(
    domain: &str,
    claimants: &[&'a Institution],
) -> Result<&'a Institution, IngestError> {
    let mut iter = claimants.iter();
    let mut winner = *iter
        .next()
        .ok_or_else(|| IngestError::NoClaimants(domain.to_string()))?;
    for &candidate in iter {
        if candidate.source_rank < winner.source_rank {
            winner = candidate;
        } else if candidate.source_rank == winner.source_rank {
            return Err(IngestError::RankTie {
                domain: domain.to_string(),
                first: winner.id.clone(),
                second: candidate.id.clone(),
            });
        }
    }
    Ok(winner)
}

/// An institution excluded from the network because another claimant was
/// awarded its resolved domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainExclusion {
    pub institution_id: String,
    pub domain: String,
    pub awarded_to: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedRoster {
    /// One node per retained institution, in roster order.
    pub nodes: Vec<ResolvedNode>,
    pub exclusions: Vec<DomainExclusion>,
}

/// Resolves every institution to a single domain, then settles contested
/// domains by source rank. Losing claimants are dropped from the network
/// roster and reported as exclusions.
pub fn resolve_network_roster(
    roster: &[Institution],
    tpc_by_domain: &BTreeMap<String, u64>,
) -> Result<ResolvedRoster, IngestError> {
    let mut resolved: Vec<(usize, String)> = Vec::with_capacity(roster.len());
    let mut by_domain: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, inst) in roster.iter().enumerate() {
        let domain = resolve_multi_domain(inst, tpc_by_domain)?;
        by_domain.entry(domain.clone()).or_default().push(i);
        resolved.push((i, domain));
    }

    let mut excluded: BTreeMap<usize, DomainExclusion> = BTreeMap::new();
    for (domain, indices) in &by_domain {
        if indices.len() < 2 {
            continue;
        }
        let claimants: Vec<&Institution> = indices.iter().map(|&i| &roster[i]).collect();
        let winner = assign_shared_domain(domain, &claimants)?;
        for &i in indices {
            if roster[i].id != winner.id {
                excluded.insert(
                    i,
                    DomainExclusion {
                        institution_id: roster[i].id.clone(),
                        domain: domain.clone(),
                        awarded_to: winner.id.clone(),
                    },
                );
            }
        }
    }

    let mut nodes = Vec::with_capacity(roster.len() - excluded.len());
    for (i, domain) in resolved {
        if excluded.contains_key(&i) {
            continue;
        }
        nodes.push(ResolvedNode {
            id: roster[i].id.clone(),
            domain,
            kind: roster[i].kind,
        });
    }
    Ok(ResolvedRoster {
        nodes,
        exclusions: excluded.into_values().collect(),
    })
}

/// A record whose country-restricted mention count exceeds its worldwide
/// one, which a consistent engine should never produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionalAnomaly {
    pub institution_id: String,
    pub gum: u64,
    pub lum: u64,
}

/// Flags records with lum strictly greater than gum, in institution order.
pub fn flag_regional_anomalies(sample: &SampleSet) -> Vec<RegionalAnomaly> {
    sample
        .records()
        .filter(|r| r.lum > r.gum)
        .map(|r| RegionalAnomaly {
            institution_id: r.institution_id.clone(),
            gum: r.gum,
            lum: r.lum,
        })
        .collect()
}

/// A column of the metrics table, used to select values for statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MetricVariable {
    Tpc,
    Apc,
    Gum,
    Lum,
    DomainAuthority,
    ExternalLinks,
    RootDomains,
    Citations,
    Sales,
}

impl MetricVariable {
    pub const ALL: [MetricVariable; 9] = [
        MetricVariable::Tpc,
        MetricVariable::Apc,
        MetricVariable::Gum,
        MetricVariable::Lum,
        MetricVariable::DomainAuthority,
        MetricVariable::ExternalLinks,
        MetricVariable::RootDomains,
        MetricVariable::Citations,
        MetricVariable::Sales,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricVariable::Tpc => "tpc",
            MetricVariable::Apc => "apc",
            MetricVariable::Gum => "gum",
            MetricVariable::Lum => "lum",
            MetricVariable::DomainAuthority => "domain_authority",
            MetricVariable::ExternalLinks => "external_links",
            MetricVariable::RootDomains => "root_domains",
            MetricVariable::Citations => "citations",
            MetricVariable::Sales => "sales",
        }
    }

    /// Variables that apply to a given institution kind.
    pub fn for_kind(kind: InstitutionKind) -> &'static [MetricVariable] {
        match kind {
            InstitutionKind::University => &[
                MetricVariable::Tpc,
                MetricVariable::Apc,
                MetricVariable::Gum,
                MetricVariable::Lum,
                MetricVariable::DomainAuthority,
                MetricVariable::ExternalLinks,
                MetricVariable::RootDomains,
                MetricVariable::Citations,
            ],
            InstitutionKind::Company => &[
                MetricVariable::Tpc,
                MetricVariable::Apc,
                MetricVariable::Gum,
                MetricVariable::Lum,
                MetricVariable::DomainAuthority,
                MetricVariable::ExternalLinks,
                MetricVariable::RootDomains,
                MetricVariable::Sales,
            ],
        }
    }

    /// Scores on a bounded 0-100 scale stay raw; counts and sales are
    /// log-transformed before correlation and component analysis.
    pub fn log_exempt(self) -> bool {
        matches!(self, MetricVariable::DomainAuthority)
    }

    pub fn extract(self, record: &WebMetricsRecord) -> Option<f64> {
        match self {
            MetricVariable::Tpc => Some(record.tpc as f64),
            MetricVariable::Apc => Some(record.apc as f64),
            MetricVariable::Gum => Some(record.gum as f64),
            MetricVariable::Lum => Some(record.lum as f64),
            MetricVariable::DomainAuthority => Some(record.domain_authority as f64),
            MetricVariable::ExternalLinks => Some(record.external_links as f64),
            MetricVariable::RootDomains => Some(record.root_domains as f64),
            MetricVariable::Citations => record.citations.map(|c| c as f64),
            MetricVariable::Sales => record.sales,
        }
    }
}

impl std::fmt::Display for MetricVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MetricVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricVariable::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown metric variable {s:?}"))
    }
}

/// Rank agreement of one variable between two samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCheck {
    pub variable: MetricVariable,
    /// Institutions present in both samples with the variable populated.
    pub n: usize,
    pub rho: f64,
    pub p_value: f64,
}

/// Spearman correlation of a variable across the institutions common to two
/// samples. High rho means the later crawl preserved the earlier ranking.
pub fn sample_stability(
    a: &SampleSet,
    b: &SampleSet,
    variable: MetricVariable,
) -> Result<StabilityCheck, IngestError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (id, record_a) in &a.records {
        let Some(record_b) = b.records.get(id) else {
            continue;
        };
        let (Some(x), Some(y)) = (variable.extract(record_a), variable.extract(record_b)) else {
            continue;
        };
        xs.push(x);
        ys.push(y);
    }
    if xs.len() < 3 {
        return Err(IngestError::TooFewCommon {
            variable: variable.name().to_string(),
            got: xs.len(),
        });
    }
    let (rho, p_value) = spearman(&xs, &ys)?;
    Ok(StabilityCheck {
        variable,
        n: xs.len(),
        rho,
        p_value,
    })
}
