//! Mention-network construction, centrality metrics, whole-graph summaries,
//! and the edge-taxonomy and interaction reports.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::model::{
    EdgeType, Institution, InstitutionKind, MentionEdge, MentionNetwork, ModelError, NetworkNode,
    NetworkSummary, NodeMetrics, SummaryMode,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("unresolved domain {0:?}")]
    UnresolvedDomain(String),
    #[error("domain {0:?} is claimed by {1} and {2}; resolve the roster first")]
    AmbiguousDomain(String, String, String),
    #[error("pair {0:?} -> {1:?} appears more than once")]
    DuplicatePair(String, String),
    #[error("{0:?} -> {1:?} resolves to a single institution")]
    SelfMention(String, String),
    #[error("node {0} has no kind attribute")]
    MissingKind(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One row of a pairwise-mention input: hits found for `target_domain` on
/// pages of `host_domain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseHit {
    pub host_domain: String,
    pub target_domain: String,
    pub hits: u64,
}

/// Builds the directed network from pairwise hit counts.
///
/// Every roster institution becomes a node (isolated ones included); rows
/// with zero hits contribute no arc. Domains must resolve injectively, so
/// shared domains have to be assigned to an owner beforehand.
pub fn build_network(
    pairwise: &[PairwiseHit],
    roster: &[Institution],
) -> Result<MentionNetwork, NetworkError> {
    let mut domain_owner: BTreeMap<&str, &Institution> = BTreeMap::new();
    for inst in roster {
        for domain in &inst.domains {
            if let Some(prev) = domain_owner.insert(domain.as_str(), inst) {
                if prev.id != inst.id {
                    return Err(NetworkError::AmbiguousDomain(
                        domain.clone(),
                        prev.id.clone(),
                        inst.id.clone(),
                    ));
                }
            }
        }
    }
    let nodes: Vec<NetworkNode> = roster
        .iter()
        .map(|inst| NetworkNode {
            id: inst.id.clone(),
            kind: Some(inst.kind),
            sector: inst.sector,
            tpc: None,
        })
        .collect();

    let mut arcs = Vec::new();
    let mut seen = BTreeSet::new();
    for row in pairwise {
        let host = domain_owner
            .get(row.host_domain.as_str())
            .ok_or_else(|| NetworkError::UnresolvedDomain(row.host_domain.clone()))?;
        let target = domain_owner
            .get(row.target_domain.as_str())
            .ok_or_else(|| NetworkError::UnresolvedDomain(row.target_domain.clone()))?;
        if host.id == target.id {
            return Err(NetworkError::SelfMention(
                row.host_domain.clone(),
                row.target_domain.clone(),
            ));
        }
        if !seen.insert((host.id.clone(), target.id.clone())) {
            return Err(NetworkError::DuplicatePair(
                host.id.clone(),
                target.id.clone(),
            ));
        }
        if row.hits == 0 {
            continue;
        }
        arcs.push(MentionEdge {
            host_id: host.id.clone(),
            target_id: target.id.clone(),
            hits: row.hits,
            edge_type: None,
        });
    }
    arcs.sort_by(|a, b| (&a.host_id, &a.target_id).cmp(&(&b.host_id, &b.target_id)));
    Ok(MentionNetwork::new(nodes, arcs)?)
}

struct Adjacency {
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    und: Vec<Vec<usize>>,
}

fn adjacency(net: &MentionNetwork) -> Adjacency {
    let n = net.n_nodes();
    let mut out = vec![Vec::new(); n];
    let mut inc = vec![Vec::new(); n];
    let mut und_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for arc in net.arcs() {
        let h = net.node_index(&arc.host_id).expect("validated endpoint");
        let t = net.node_index(&arc.target_id).expect("validated endpoint");
        out[h].push(t);
        inc[t].push(h);
        und_sets[h].insert(t);
        und_sets[t].insert(h);
    }
    for list in out.iter_mut().chain(inc.iter_mut()) {
        list.sort_unstable();
    }
    let und = und_sets
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();
    Adjacency { out, inc, und }
}

fn bfs_distances(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(src);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Betweenness by single-source shortest-path accumulation over unweighted
/// edges. Returns raw (unnormalized) pair counts.
fn brandes(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let mut centrality = vec![0.0; n];
    for s in 0..n {
        let mut stack = Vec::new();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0_f64; n];
        let mut dist = vec![-1_i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0_f64; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    centrality
}

/// Eigenvector centrality of the undirected view by power iteration on
/// A + I, normalized so the maximum value is exactly 1.
fn eigenvector_centrality(und: &[Vec<usize>]) -> Vec<f64> {
    let n = und.len();
    if n == 0 {
        return Vec::new();
    }
    let mut x = vec![1.0_f64; n];
    let norm = (n as f64).sqrt();
    for v in &mut x {
        *v /= norm;
    }
    for _ in 0..50_000 {
        let mut y = vec![0.0_f64; n];
        for v in 0..n {
            y[v] = x[v];
            for &w in &und[v] {
                y[v] += x[w];
            }
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut y {
            *v /= norm;
        }
        let delta = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        x = y;
        if delta < 1e-13 {
            break;
        }
    }
    let max = x.iter().cloned().fold(0.0_f64, f64::max);
    if max > 0.0 {
        for v in &mut x {
            *v /= max;
        }
    }
    x
}

fn clustering_coefficients(und: &[Vec<usize>]) -> Vec<f64> {
    let n = und.len();
    let sets: Vec<BTreeSet<usize>> = und.iter().map(|l| l.iter().copied().collect()).collect();
    let mut out = vec![0.0; n];
    for v in 0..n {
        let d = und[v].len();
        if d < 2 {
            continue;
        }
        let mut triangles = 0usize;
        for (i, &a) in und[v].iter().enumerate() {
            for &b in &und[v][i + 1..] {
                if sets[a].contains(&b) {
                    triangles += 1;
                }
            }
        }
        out[v] = triangles as f64 / (d * (d - 1) / 2) as f64;
    }
    out
}

/// Computes degree, closeness (plus the harmonic variant), betweenness,
/// eigenvector, and clustering for every node.
///
/// Distance-based metrics follow the chosen view; eigenvector and
/// clustering are always computed on the undirected view. Closeness of a
/// node is reachable/sum-of-distances with unreachable nodes excluded, and
/// 0 when nothing is reachable.
pub fn node_metrics(net: &MentionNetwork, mode: SummaryMode) -> Vec<NodeMetrics> {
    let n = net.n_nodes();
    let adj = adjacency(net);
    let dist_adj: &[Vec<usize>] = match mode {
        SummaryMode::Directed => &adj.out,
        SummaryMode::UndirectedView => &adj.und,
    };
    let mut betweenness = brandes(dist_adj);
    if mode == SummaryMode::UndirectedView {
        for b in &mut betweenness {
            *b /= 2.0;
        }
    }
    let eigenvector = eigenvector_centrality(&adj.und);
    let clustering = clustering_coefficients(&adj.und);

    let mut out = Vec::with_capacity(n);
    for v in 0..n {
        let dist = bfs_distances(dist_adj, v);
        let mut reachable = 0usize;
        let mut total = 0usize;
        let mut harmonic = 0.0;
        for (w, d) in dist.iter().enumerate() {
            if w == v {
                continue;
            }
            if let Some(d) = d {
                reachable += 1;
                total += d;
                harmonic += 1.0 / *d as f64;
            }
        }
        let closeness = if total > 0 {
            reachable as f64 / total as f64
        } else {
            0.0
        };
        let harmonic_closeness = if n > 1 {
            harmonic / (n - 1) as f64
        } else {
            0.0
        };
        let (degree, in_degree, out_degree) = match mode {
            SummaryMode::Directed => (
                adj.out[v].len() + adj.inc[v].len(),
                adj.inc[v].len(),
                adj.out[v].len(),
            ),
            SummaryMode::UndirectedView => (adj.und[v].len(), adj.inc[v].len(), adj.out[v].len()),
        };
        out.push(NodeMetrics {
            node_id: net.nodes()[v].id.clone(),
            degree,
            in_degree,
            out_degree,
            closeness,
            harmonic_closeness,
            betweenness: betweenness[v],
            eigenvector: eigenvector[v],
            clustering: clustering[v],
        });
    }
    out
}

fn components(und: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = und.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(start);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &w in &und[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Whole-graph statistics for the chosen view.
///
/// Average degree is arcs/N when directed and 2 edges/N on the undirected
/// view, so density = avg_degree/(N-1) holds in both modes. Diameter and
/// average path length cover the largest (weakly) connected component,
/// counting only finite distances. An empty graph yields zeros.
pub fn network_summary(net: &MentionNetwork, mode: SummaryMode) -> NetworkSummary {
    let n = net.n_nodes();
    let adj = adjacency(net);
    if n == 0 {
        return NetworkSummary {
            mode,
            n_nodes: 0,
            n_arcs: 0,
            n_isolated: 0,
            avg_degree: 0.0,
            diameter: 0,
            density: 0.0,
            avg_path_length: 0.0,
            avg_clustering: 0.0,
            largest_component: 0,
        };
    }
    let und_edges: usize = adj.und.iter().map(|l| l.len()).sum::<usize>() / 2;
    let avg_degree = match mode {
        SummaryMode::Directed => net.n_arcs() as f64 / n as f64,
        SummaryMode::UndirectedView => 2.0 * und_edges as f64 / n as f64,
    };
    let density = if n > 1 {
        avg_degree / (n - 1) as f64
    } else {
        0.0
    };
    let n_isolated = adj.und.iter().filter(|l| l.is_empty()).count();

    let comps = components(&adj.und);
    let largest = comps
        .iter()
        .max_by_key(|c| c.len())
        .cloned()
        .unwrap_or_default();
    let dist_adj: &[Vec<usize>] = match mode {
        SummaryMode::Directed => &adj.out,
        SummaryMode::UndirectedView => &adj.und,
    };
    let member: BTreeSet<usize> = largest.iter().copied().collect();
    let mut diameter = 0usize;
    let mut total = 0u64;
    let mut pairs = 0u64;
    for &v in &largest {
        let dist = bfs_distances(dist_adj, v);
        for &w in &largest {
            if w == v {
                continue;
            }
            if let Some(d) = dist[w] {
                if member.contains(&w) {
                    diameter = diameter.max(d);
                    total += d as u64;
                    pairs += 1;
                }
            }
        }
    }
    let avg_path_length = if pairs > 0 {
        total as f64 / pairs as f64
    } else {
        0.0
    };
    let clustering = clustering_coefficients(&adj.und);
    let avg_clustering = clustering.iter().sum::<f64>() / n as f64;

    NetworkSummary {
        mode,
        n_nodes: n,
        n_arcs: net.n_arcs(),
        n_isolated,
        avg_degree,
        diameter,
        density,
        avg_path_length,
        avg_clustering,
        largest_component: largest.len(),
    }
}

/// Per-type intensity of the active pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySummary {
    pub edge_type: EdgeType,
    pub active_pairs: usize,
    pub total_hits: u64,
    pub mean_hits: f64,
}

/// Edge-taxonomy report: per-type counts plus the direction split of the
/// university-company arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    /// Summaries in UNI, COM, TRANSFER order.
    pub summaries: Vec<IntensitySummary>,
    pub active_total: usize,
    pub transfer_uni_to_com: usize,
    pub transfer_com_to_uni: usize,
}

impl ClassificationReport {
    /// Share of active pairs of the given type, in percent.
    pub fn share_percent(&self, edge_type: EdgeType) -> f64 {
        if self.active_total == 0 {
            return 0.0;
        }
        let summary = self
            .summaries
            .iter()
            .find(|s| s.edge_type == edge_type)
            .expect("all types present");
        100.0 * summary.active_pairs as f64 / self.active_total as f64
    }

    /// (university-to-company, company-to-university) shares in percent.
    pub fn transfer_shares_percent(&self) -> (f64, f64) {
        let total = self.transfer_uni_to_com + self.transfer_com_to_uni;
        if total == 0 {
            return (0.0, 0.0);
        }
        (
            100.0 * self.transfer_uni_to_com as f64 / total as f64,
            100.0 * self.transfer_com_to_uni as f64 / total as f64,
        )
    }
}

/// Classifies every arc by endpoint kinds and reports per-type intensity.
/// Requires kind attributes on all arc endpoints.
pub fn classify_and_summarize(net: &MentionNetwork) -> Result<ClassificationReport, NetworkError> {
    let mut counts: BTreeMap<EdgeType, (usize, u64)> = BTreeMap::new();
    let mut uni_to_com = 0usize;
    let mut com_to_uni = 0usize;
    for arc in net.arcs() {
        let host = &net.nodes()[net.node_index(&arc.host_id).expect("endpoint")];
        let target = &net.nodes()[net.node_index(&arc.target_id).expect("endpoint")];
        let host_kind = host
            .kind
            .ok_or_else(|| NetworkError::MissingKind(host.id.clone()))?;
        let target_kind = target
            .kind
            .ok_or_else(|| NetworkError::MissingKind(target.id.clone()))?;
        let edge_type = EdgeType::for_kinds(host_kind, target_kind);
        let entry = counts.entry(edge_type).or_insert((0, 0));
        entry.0 += 1;
        entry.1 += arc.hits;
        if edge_type == EdgeType::Transfer {
            if host_kind == InstitutionKind::University {
                uni_to_com += 1;
            } else {
                com_to_uni += 1;
            }
        }
    }
    let summaries = [EdgeType::Uni, EdgeType::Com, EdgeType::Transfer]
        .into_iter()
        .map(|et| {
            let (active, total) = counts.get(&et).copied().unwrap_or((0, 0));
            IntensitySummary {
                edge_type: et,
                active_pairs: active,
                total_hits: total,
                mean_hits: if active > 0 {
                    total as f64 / active as f64
                } else {
                    0.0
                },
            }
        })
        .collect::<Vec<_>>();
    Ok(ClassificationReport {
        active_total: summaries.iter().map(|s| s.active_pairs).sum(),
        summaries,
        transfer_uni_to_com: uni_to_com,
        transfer_com_to_uni: com_to_uni,
    })
}

/// Arcs ordered by hits descending, ties by (host, target), first k.
pub fn top_combinations(net: &MentionNetwork, k: usize) -> Vec<MentionEdge> {
    let mut arcs: Vec<MentionEdge> = net.arcs().to_vec();
    arcs.sort_by(|a, b| {
        b.hits
            .cmp(&a.hits)
            .then_with(|| (&a.host_id, &a.target_id).cmp(&(&b.host_id, &b.target_id)))
    });
    arcs.truncate(k);
    arcs
}

/// A university's interaction with the company side of the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionRank {
    pub university_id: String,
    /// Distinct companies with at least one mention in either direction.
    pub interaction_degree: usize,
    /// Total mention hits exchanged with companies, both directions.
    pub interaction_hits: u64,
}

/// Ranks universities by (interaction degree, interaction hits), both
/// descending. A company counts once even if both directions are active.
pub fn interaction_ranking(net: &MentionNetwork) -> Result<Vec<InteractionRank>, NetworkError> {
    for node in net.nodes() {
        if node.kind.is_none() {
            return Err(NetworkError::MissingKind(node.id.clone()));
        }
    }
    let mut partners: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut hits: BTreeMap<&str, u64> = BTreeMap::new();
    for node in net.nodes() {
        if node.kind == Some(InstitutionKind::University) {
            partners.entry(node.id.as_str()).or_default();
            hits.entry(node.id.as_str()).or_default();
        }
    }
    for arc in net.arcs() {
        let host = &net.nodes()[net.node_index(&arc.host_id).expect("endpoint")];
        let target = &net.nodes()[net.node_index(&arc.target_id).expect("endpoint")];
        let (uni, com) = match (host.kind.unwrap(), target.kind.unwrap()) {
            (InstitutionKind::University, InstitutionKind::Company) => (host, target),
            (InstitutionKind::Company, InstitutionKind::University) => (target, host),
            _ => continue,
        };
        partners
            .get_mut(uni.id.as_str())
            .expect("seeded")
            .insert(com.id.as_str());
        *hits.get_mut(uni.id.as_str()).expect("seeded") += arc.hits;
    }
    let mut out: Vec<InteractionRank> = partners
        .iter()
        .map(|(uni, set)| InteractionRank {
            university_id: uni.to_string(),
            interaction_degree: set.len(),
            interaction_hits: hits[uni],
        })
        .collect();
    out.sort_by(|a, b| {
        b.interaction_degree
            .cmp(&a.interaction_degree)
            .then_with(|| b.interaction_hits.cmp(&a.interaction_hits))
            .then_with(|| a.university_id.cmp(&b.university_id))
    });
    Ok(out)
}
