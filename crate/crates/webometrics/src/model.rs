//! Core domain types shared by every stage of the pipeline: institutions,
//! metric records, hit counts, and the mention network.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate node {0:?}")]
    DuplicateNode(String),
    #[error("self loop on {0:?}")]
    SelfLoop(String),
    #[error("duplicate arc {0:?} -> {1:?}")]
    DuplicateArc(String, String),
    #[error("arc endpoint {0:?} is not a node")]
    UnknownEndpoint(String),
    #[error("arc {0:?} -> {1:?} has zero weight")]
    ZeroWeight(String, String),
}

/// Whether an institution is a university or a company.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InstitutionKind {
    University,
    Company,
}

impl InstitutionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstitutionKind::University => "University",
            InstitutionKind::Company => "Company",
        }
    }
}

impl fmt::Display for InstitutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstitutionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "University" => Ok(InstitutionKind::University),
            "Company" => Ok(InstitutionKind::Company),
            other => Err(format!("unknown institution kind {other:?}")),
        }
    }
}

/// Industrial sector of a company node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sector {
    FoodBeveragesTobacco,
    MiningQuarrying,
    ChemicalsPetroleumRubberPlastics,
    MetalProductsMachinery,
    MotorVehicles,
    NonMetallicMinerals,
    Electricity,
    PaperPrinting,
    PrimaryMetals,
    TextilesApparel,
}

impl Sector {
    pub const ALL: [Sector; 10] = [
        Sector::FoodBeveragesTobacco,
        Sector::MiningQuarrying,
        Sector::ChemicalsPetroleumRubberPlastics,
        Sector::MetalProductsMachinery,
        Sector::MotorVehicles,
        Sector::NonMetallicMinerals,
        Sector::Electricity,
        Sector::PaperPrinting,
        Sector::PrimaryMetals,
        Sector::TextilesApparel,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Sector::FoodBeveragesTobacco => "Food, Beverages and Tobacco",
            Sector::MiningQuarrying => "Mining and Quarrying",
            Sector::ChemicalsPetroleumRubberPlastics => {
                "Chemicals, Petroleum products, Rubber and plastics"
            }
            Sector::MetalProductsMachinery => {
                "Metal Products, Machinery and Equipment, Professional instruments"
            }
            Sector::MotorVehicles => "Motor vehicles",
            Sector::NonMetallicMinerals => "Non-Metallic Mineral Products",
            Sector::Electricity => "Electricity sector",
            Sector::PaperPrinting => "Paper, Paper products, and printing",
            Sector::PrimaryMetals => "Primary Metals",
            Sector::TextilesApparel => "Textiles, Wearing Apparel, Leather and Footwear",
        }
    }

    pub fn from_label(label: &str) -> Option<Sector> {
        Sector::ALL
            .iter()
            .copied()
            .find(|s| s.label() == label.trim())
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Search engine region restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Region {
    All,
    Turkey,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::All => "All",
            Region::Turkey => "Turkey",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "All" => Ok(Region::All),
            "Turkey" => Ok(Region::Turkey),
            other => Err(format!("unknown region {other:?}")),
        }
    }
}

/// A university or company with its canonical web domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Institution {
    pub id: String,
    pub name: String,
    pub kind: InstitutionKind,
    pub sector: Option<Sector>,
    /// Candidate hosts in roster order; metric resolution later picks one.
    pub domains: Vec<String>,
    /// Position in the source ranking the institution was sampled from.
    pub source_rank: u32,
}

/// One institution's web-impact measurements at a sample date.
#[derive(Debug, Clone, PartialEq)]
pub struct WebMetricsRecord {
    pub institution_id: String,
    pub sample_date: NaiveDate,
    pub tpc: u64,
    pub apc: u64,
    pub gum: u64,
    pub lum: u64,
    pub domain_authority: u8,
    pub external_links: u64,
    pub root_domains: u64,
    pub citations: Option<u64>,
    pub sales: Option<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecordError {
    #[error("domain authority {0} exceeds 100")]
    DomainAuthority(u8),
    #[error("root domains {root} exceed external links {links}")]
    RootDomains { root: u64, links: u64 },
    #[error("citations present on a company record")]
    CitationsOnCompany,
    #[error("sales present on a university record")]
    SalesOnUniversity,
    #[error("sales must be a finite non-negative amount")]
    BadSales,
}

impl WebMetricsRecord {
    /// Checks the field-range invariants against the owning institution's kind.
    pub fn validate(&self, kind: InstitutionKind) -> Result<(), RecordError> {
        if self.domain_authority > 100 {
            return Err(RecordError::DomainAuthority(self.domain_authority));
        }
        if self.root_domains > 0
            && self.external_links > 0
            && self.root_domains > self.external_links
        {
            return Err(RecordError::RootDomains {
                root: self.root_domains,
                links: self.external_links,
            });
        }
        if kind == InstitutionKind::Company && self.citations.is_some() {
            return Err(RecordError::CitationsOnCompany);
        }
        if kind == InstitutionKind::University && self.sales.is_some() {
            return Err(RecordError::SalesOnUniversity);
        }
        if let Some(sales) = self.sales {
            if !sales.is_finite() || sales < 0.0 {
                return Err(RecordError::BadSales);
            }
        }
        Ok(())
    }
}

/// One query's hit-count estimate as scraped from a results page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitCount {
    pub query: String,
    pub region: Region,
    pub value: u64,
    pub retrieved_at: DateTime<Utc>,
}

/// Mention-arc classification by the endpoint kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeType {
    Uni,
    Com,
    Transfer,
}

impl EdgeType {
    /// The classification is a pure function of the two endpoint kinds.
    pub fn for_kinds(host: InstitutionKind, target: InstitutionKind) -> EdgeType {
        match (host, target) {
            (InstitutionKind::University, InstitutionKind::University) => EdgeType::Uni,
            (InstitutionKind::Company, InstitutionKind::Company) => EdgeType::Com,
            _ => EdgeType::Transfer,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeType::Uni => "UNI",
            EdgeType::Com => "COM",
            EdgeType::Transfer => "TRANSFER",
        }
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A directed URL-mention arc. `host_id` is the site the mention lives on,
/// `target_id` the institution whose URL is mentioned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionEdge {
    pub host_id: String,
    pub target_id: String,
    pub hits: u64,
    /// Absent when the endpoint kinds are unknown (e.g. a bare NET file).
    pub edge_type: Option<EdgeType>,
}

/// A network node: an institution id plus optional display attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkNode {
    pub id: String,
    pub kind: Option<InstitutionKind>,
    pub sector: Option<Sector>,
    pub tpc: Option<u64>,
}

impl NetworkNode {
    pub fn bare(id: impl Into<String>) -> NetworkNode {
        NetworkNode {
            id: id.into(),
            kind: None,
            sector: None,
            tpc: None,
        }
    }
}

/// Directed weighted graph of pairwise URL mentions.
///
/// Construction enforces: no self loops, at most one arc per ordered pair,
/// every endpoint is a node, and arc weights of at least 1. Edge types are
/// recomputed from the endpoint kinds whenever both are known.
#[derive(Debug, Clone, PartialEq)]
pub struct MentionNetwork {
    nodes: Vec<NetworkNode>,
    arcs: Vec<MentionEdge>,
    index: BTreeMap<String, usize>,
}

impl MentionNetwork {
    pub fn new(nodes: Vec<NetworkNode>, arcs: Vec<MentionEdge>) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateNode(node.id.clone()));
            }
        }
        let mut seen_pairs = BTreeSet::new();
        let mut arcs = arcs;
        for arc in &mut arcs {
            if arc.host_id == arc.target_id {
                return Err(ModelError::SelfLoop(arc.host_id.clone()));
            }
            if arc.hits == 0 {
                return Err(ModelError::ZeroWeight(
                    arc.host_id.clone(),
                    arc.target_id.clone(),
                ));
            }
            let host = *index
                .get(&arc.host_id)
                .ok_or_else(|| ModelError::UnknownEndpoint(arc.host_id.clone()))?;
            let target = *index
                .get(&arc.target_id)
                .ok_or_else(|| ModelError::UnknownEndpoint(arc.target_id.clone()))?;
            if !seen_pairs.insert((host, target)) {
                return Err(ModelError::DuplicateArc(
                    arc.host_id.clone(),
                    arc.target_id.clone(),
                ));
            }
            if let (Some(h), Some(t)) = (nodes[host].kind, nodes[target].kind) {
                arc.edge_type = Some(EdgeType::for_kinds(h, t));
            }
        }
        Ok(MentionNetwork { nodes, arcs, index })
    }

    pub fn nodes(&self) -> &[NetworkNode] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[MentionEdge] {
        &self.arcs
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// The same network with all node attributes and edge types dropped,
    /// i.e. exactly what a bare NET file can represent.
    pub fn strip_attributes(&self) -> MentionNetwork {
        let nodes = self
            .nodes
            .iter()
            .map(|n| NetworkNode::bare(&n.id))
            .collect();
        let arcs = self
            .arcs
            .iter()
            .map(|a| MentionEdge {
                host_id: a.host_id.clone(),
                target_id: a.target_id.clone(),
                hits: a.hits,
                edge_type: None,
            })
            .collect();
        MentionNetwork::new(nodes, arcs).expect("stripping preserves validity")
    }

    /// Re-attaches kind and sector from a roster by node id. Nodes without a
    /// roster entry keep their current attributes.
    pub fn attach_roster(&self, roster: &[Institution]) -> MentionNetwork {
        let by_id: BTreeMap<&str, &Institution> =
            roster.iter().map(|i| (i.id.as_str(), i)).collect();
        let nodes = self
            .nodes
            .iter()
            .map(|n| match by_id.get(n.id.as_str()) {
                Some(inst) => NetworkNode {
                    id: n.id.clone(),
                    kind: Some(inst.kind),
                    sector: inst.sector,
                    tpc: n.tpc,
                },
                None => n.clone(),
            })
            .collect();
        MentionNetwork::new(nodes, self.arcs.clone()).expect("attaching preserves validity")
    }

    /// Attaches total page counts by node id; ids without an entry keep theirs.
    pub fn attach_tpc(&self, tpc: &BTreeMap<String, u64>) -> MentionNetwork {
        let nodes = self
            .nodes
            .iter()
            .map(|n| NetworkNode {
                tpc: tpc.get(&n.id).copied().or(n.tpc),
                ..n.clone()
            })
            .collect();
        MentionNetwork::new(nodes, self.arcs.clone()).expect("attaching preserves validity")
    }
}

/// Graph view used by the metric and summary computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryMode {
    Directed,
    UndirectedView,
}

impl SummaryMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SummaryMode::Directed => "directed",
            SummaryMode::UndirectedView => "undirected",
        }
    }
}

impl fmt::Display for SummaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-node centrality metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMetrics {
    pub node_id: String,
    pub degree: usize,
    pub in_degree: usize,
    pub out_degree: usize,
    pub closeness: f64,
    pub harmonic_closeness: f64,
    pub betweenness: f64,
    pub eigenvector: f64,
    pub clustering: f64,
}

/// Whole-graph statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSummary {
    pub mode: SummaryMode,
    pub n_nodes: usize,
    pub n_arcs: usize,
    pub n_isolated: usize,
    pub avg_degree: f64,
    pub diameter: usize,
    pub density: f64,
    pub avg_path_length: f64,
    pub avg_clustering: f64,
    /// Size of the largest (weakly) connected component, over which the
    /// distance statistics are computed.
    pub largest_component: usize,
}

/// A single roster problem found by [`validate_roster`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RosterViolation {
    DuplicateId { id: String },
    SharedDomain { domain: String, ids: Vec<String> },
    NonCanonicalHost { id: String, domain: String },
    EmptyDomains { id: String },
    SectorMismatch { id: String },
    BadRank { id: String },
}

impl fmt::Display for RosterViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RosterViolation::DuplicateId { id } => write!(f, "duplicate id {id:?}"),
            RosterViolation::SharedDomain { domain, ids } => {
                write!(f, "shared domain {domain:?} claimed by {}", ids.join(", "))
            }
            RosterViolation::NonCanonicalHost { id, domain } => {
                write!(f, "non-canonical host {domain:?} on {id}")
            }
            RosterViolation::EmptyDomains { id } => write!(f, "no domains listed for {id}"),
            RosterViolation::SectorMismatch { id } => {
                write!(f, "sector presence does not match kind for {id}")
            }
            RosterViolation::BadRank { id } => write!(f, "source rank of {id} must be at least 1"),
        }
    }
}

/// Report-style roster validation; an empty result means the roster is valid.
///
/// Shared domains are reported but may be resolved downstream by rank (see
/// the ingest module); every other violation requires a roster fix.
pub fn validate_roster(institutions: &[Institution]) -> Vec<RosterViolation> {
    let mut out = Vec::new();
    for inst in institutions {
        if inst.domains.is_empty() {
            out.push(RosterViolation::EmptyDomains {
                id: inst.id.clone(),
            });
        }
        for domain in &inst.domains {
            match crate::queryplan::canonicalize(domain) {
                Ok(canon) if canon == *domain => {}
                _ => out.push(RosterViolation::NonCanonicalHost {
                    id: inst.id.clone(),
                    domain: domain.clone(),
                }),
            }
        }
        let sector_ok = match inst.kind {
            InstitutionKind::University => inst.sector.is_none(),
            InstitutionKind::Company => inst.sector.is_some(),
        };
        if !sector_ok {
            out.push(RosterViolation::SectorMismatch {
                id: inst.id.clone(),
            });
        }
        if inst.source_rank == 0 {
            out.push(RosterViolation::BadRank {
                id: inst.id.clone(),
            });
        }
    }
    let mut id_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for inst in institutions {
        *id_counts.entry(inst.id.as_str()).or_default() += 1;
    }
    for (id, count) in id_counts {
        if count > 1 {
            out.push(RosterViolation::DuplicateId { id: id.to_string() });
        }
    }
    let mut claims: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for inst in institutions {
        for domain in &inst.domains {
            claims
                .entry(domain.as_str())
                .or_default()
                .push(inst.id.clone());
        }
    }
    for (domain, ids) in claims {
        if ids.len() > 1 {
            out.push(RosterViolation::SharedDomain {
                domain: domain.to_string(),
                ids,
            });
        }
    }
    out
}
