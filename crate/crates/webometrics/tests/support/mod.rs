//! Independent oracles for the acceptance suite.
//!
//! Everything here deliberately takes a different route than the library:
//! Floyd-Warshall plus explicit path counting instead of Brandes, a
//! hand-rolled Jacobi eigensolver instead of nalgebra, quadrature of the
//! Student t density instead of a distribution crate, and exhaustive
//! enumeration wherever the input is small enough.

#![allow(dead_code)]
// Index-style loops and full-precision constants are deliberate here: the
// oracles mirror textbook formulations rather than idiomatic iterator code.
#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::Rng;
use webometrics::model::{MentionEdge, MentionNetwork, NetworkNode};

// ----------------------------------------------------------------- graphs --

pub fn random_network(rng: &mut impl Rng, n: usize, p: f64) -> MentionNetwork {
    let nodes: Vec<NetworkNode> = (0..n).map(|i| NetworkNode::bare(format!("n{i}"))).collect();
    let mut arcs = Vec::new();
    for h in 0..n {
        for t in 0..n {
            if h != t && rng.random_bool(p) {
                arcs.push(MentionEdge {
                    host_id: format!("n{h}"),
                    target_id: format!("n{t}"),
                    hits: rng.random_range(1..10),
                    edge_type: None,
                });
            }
        }
    }
    MentionNetwork::new(nodes, arcs).expect("generated network is valid")
}

/// A random digraph whose undirected view is connected (chain plus extras).
pub fn random_connected_network(rng: &mut impl Rng, n: usize, p: f64) -> MentionNetwork {
    let nodes: Vec<NetworkNode> = (0..n).map(|i| NetworkNode::bare(format!("n{i}"))).collect();
    let mut pairs = BTreeSet::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        if rng.random_bool(0.5) {
            pairs.insert((i, j));
        } else {
            pairs.insert((j, i));
        }
    }
    for h in 0..n {
        for t in 0..n {
            if h != t && rng.random_bool(p) {
                pairs.insert((h, t));
            }
        }
    }
    let arcs = pairs
        .into_iter()
        .map(|(h, t)| MentionEdge {
            host_id: format!("n{h}"),
            target_id: format!("n{t}"),
            hits: rng.random_range(1..10),
            edge_type: None,
        })
        .collect();
    MentionNetwork::new(nodes, arcs).expect("generated network is valid")
}

/// Boolean adjacency matrices in node order: (directed, undirected view).
pub fn adjacency_matrices(net: &MentionNetwork) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
    let n = net.n_nodes();
    let mut dir = vec![vec![false; n]; n];
    let mut und = vec![vec![false; n]; n];
    for arc in net.arcs() {
        let h = net.node_index(&arc.host_id).unwrap();
        let t = net.node_index(&arc.target_id).unwrap();
        dir[h][t] = true;
        und[h][t] = true;
        und[t][h] = true;
    }
    (dir, und)
}

/// All-pairs hop distances by Floyd-Warshall.
pub fn floyd_warshall(adj: &[Vec<bool>]) -> Vec<Vec<Option<usize>>> {
    let n = adj.len();
    let mut dist = vec![vec![None; n]; n];
    for (v, row) in adj.iter().enumerate() {
        dist[v][v] = Some(0);
        for (w, &edge) in row.iter().enumerate() {
            if edge && v != w {
                dist[v][w] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (dist[i][k], dist[k][j]) {
                    if dist[i][j].is_none_or(|d| a + b < d) {
                        dist[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    dist
}

/// Number of shortest paths from `s` to every vertex, by layer-ordered
/// dynamic programming over the Floyd-Warshall distances.
pub fn shortest_path_counts(adj: &[Vec<bool>], dist: &[Vec<Option<usize>>], s: usize) -> Vec<u64> {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).filter(|&v| dist[s][v].is_some()).collect();
    order.sort_by_key(|&v| dist[s][v].unwrap());
    let mut sigma = vec![0u64; n];
    sigma[s] = 1;
    for &v in &order {
        if v == s {
            continue;
        }
        let dv = dist[s][v].unwrap();
        for u in 0..n {
            if adj[u][v] && dist[s][u] == Some(dv - 1) {
                sigma[v] += sigma[u];
            }
        }
    }
    sigma
}

/// Raw betweenness from the pair-dependency identity
/// sigma_st(v) = sigma_sv * sigma_vt whenever d(s,v) + d(v,t) = d(s,t).
pub fn betweenness_oracle(adj: &[Vec<bool>]) -> Vec<f64> {
    let n = adj.len();
    let dist = floyd_warshall(adj);
    let sigma: Vec<Vec<u64>> = (0..n)
        .map(|s| shortest_path_counts(adj, &dist, s))
        .collect();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t].is_none() {
                continue;
            }
            let d_st = dist[s][t].unwrap();
            for (v, bcv) in bc.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                if let (Some(a), Some(b)) = (dist[s][v], dist[v][t]) {
                    if a + b == d_st {
                        *bcv += (sigma[s][v] * sigma[v][t]) as f64 / sigma[s][t] as f64;
                    }
                }
            }
        }
    }
    bc
}

/// Exhaustively enumerates simple paths to recheck distances and path
/// counts; only sane for very small graphs.
pub fn enumerate_shortest_paths(adj: &[Vec<bool>], s: usize, t: usize) -> (Option<usize>, u64) {
    let n = adj.len();
    let mut best: Option<usize> = None;
    let mut count = 0u64;
    let mut visited = vec![false; n];
    fn dfs(
        adj: &[Vec<bool>],
        v: usize,
        t: usize,
        len: usize,
        visited: &mut [bool],
        best: &mut Option<usize>,
        count: &mut u64,
    ) {
        if v == t {
            match *best {
                Some(b) if len > b => {}
                Some(b) if len == b => *count += 1,
                _ => {
                    *best = Some(len);
                    *count = 1;
                }
            }
            return;
        }
        for w in 0..adj.len() {
            if adj[v][w] && !visited[w] {
                visited[w] = true;
                dfs(adj, w, t, len + 1, visited, best, count);
                visited[w] = false;
            }
        }
    }
    visited[s] = true;
    dfs(adj, s, t, 0, &mut visited, &mut best, &mut count);
    (best, count)
}

/// Undirected connected components as index sets.
pub fn components_oracle(und: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let dist = floyd_warshall(und);
    let n = und.len();
    let mut assigned = vec![false; n];
    let mut comps = Vec::new();
    for v in 0..n {
        if assigned[v] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&w| dist[v][w].is_some()).collect();
        for &w in &comp {
            assigned[w] = true;
        }
        comps.push(comp);
    }
    comps
}

pub fn triangle_clustering(und: &[Vec<bool>]) -> Vec<f64> {
    let n = und.len();
    let mut out = vec![0.0; n];
    for v in 0..n {
        let neighbors: Vec<usize> = (0..n).filter(|&w| und[v][w]).collect();
        let k = neighbors.len();
        if k < 2 {
            continue;
        }
        let mut triangles = 0usize;
        for (i, &a) in neighbors.iter().enumerate() {
            for &b in &neighbors[i + 1..] {
                if und[a][b] {
                    triangles += 1;
                }
            }
        }
        out[v] = 2.0 * triangles as f64 / (k * (k - 1)) as f64;
    }
    out
}

// ------------------------------------------------------------ eigensolver --

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues in descending order with matching eigenvector columns.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += m[p][q] * m[p][q];
                }
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row][col]).collect())
        .collect();
    (values, vectors)
}

/// Perron vector of the undirected view of A + I, max-normalized, via the
/// Jacobi solver. Only meaningful for connected graphs.
pub fn eigenvector_oracle(und: &[Vec<bool>]) -> Vec<f64> {
    let n = und.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = 1.0;
        for j in 0..n {
            if und[i][j] {
                m[i][j] = 1.0;
            }
        }
    }
    let (_, vectors) = jacobi_eigen(&m);
    let principal = &vectors[0];
    let max = principal.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    principal.iter().map(|x| x.abs() / max).collect()
}

// ------------------------------------------------------------- statistics --

/// Lanczos approximation of ln Gamma, g = 7.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn t_density(df: f64, t: f64) -> f64 {
    let ln_norm =
        ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_norm - (df + 1.0) / 2.0 * (1.0 + t * t / df).ln()).exp()
}

/// Two-tailed p for a t statistic by Simpson quadrature of the density.
pub fn t_two_tailed_p(df: f64, t: f64) -> f64 {
    let upper = t.abs();
    if upper == 0.0 {
        return 1.0;
    }
    let steps = 40_000;
    let h = upper / steps as f64;
    let mut integral = t_density(df, 0.0) + t_density(df, upper);
    for i in 1..steps {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        integral += weight * t_density(df, i as f64 * h);
    }
    integral *= h / 3.0;
    (1.0 - 2.0 * integral).max(0.0)
}

pub fn p_for_rho(rho: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let t = rho.abs() * (df / (1.0 - rho * rho)).sqrt();
    t_two_tailed_p(df, t)
}

/// The |rho| where the two-tailed p crosses alpha, found by bisection.
pub fn critical_rho(n: usize, alpha: f64) -> f64 {
    let mut lo = 0.0001;
    let mut hi = 0.9999;
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if p_for_rho(mid, n) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Mid-rank assignment (ties share the average of their positions).
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson by the direct covariance formula.
pub fn pearson_direct(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    cov / (vx * vy).sqrt()
}

pub fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    pearson_direct(&midranks(x), &midranks(y))
}

/// A permutation of 1..=n with sum of squared rank displacements exactly
/// `target` (which must be even and feasible). Built from disjoint swaps.
pub fn permutation_with_squared_displacement(n: usize, target: u64) -> Vec<f64> {
    assert!(
        target.is_multiple_of(2),
        "squared displacement is always even"
    );
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut free = vec![true; n];
    let mut remaining = target / 2;
    while remaining > 0 {
        let mut g = (remaining as f64).sqrt().floor() as usize;
        let mut placed = false;
        while g >= 1 && !placed {
            for i in 0..n.saturating_sub(g) {
                if free[i] && free[i + g] {
                    perm.swap(i, i + g);
                    free[i] = false;
                    free[i + g] = false;
                    remaining -= (g * g) as u64;
                    placed = true;
                    break;
                }
            }
            if !placed {
                g -= 1;
            }
        }
        assert!(
            placed,
            "ran out of disjoint swaps before hitting the target"
        );
    }
    let check: u64 = perm
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = v as i64 - (i as i64 + 1);
            (d * d) as u64
        })
        .sum();
    assert_eq!(check, target);
    perm.into_iter().map(|v| v as f64).collect()
}

// ----------------------------------------------------------------- varimax --

/// Variance-of-squared-loadings criterion, per column, on the given matrix.
pub fn varimax_criterion_oracle(m: &DMatrix<f64>) -> f64 {
    let p = m.nrows() as f64;
    let mut total = 0.0;
    for j in 0..m.ncols() {
        let col = m.column(j);
        let mean_sq = col.iter().map(|x| x * x).sum::<f64>() / p;
        let mean_quad = col.iter().map(|x| x.powi(4)).sum::<f64>() / p;
        total += mean_quad - mean_sq * mean_sq;
    }
    total
}

/// Rows scaled to unit communality (Kaiser normalization).
pub fn kaiser_normalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for i in 0..m.nrows() {
        let norm = m.row(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for j in 0..m.ncols() {
                out[(i, j)] /= norm;
            }
        }
    }
    out
}

/// Best two-column varimax criterion over a fine grid of planar rotations.
pub fn best_planar_criterion(normalized: &DMatrix<f64>) -> f64 {
    assert_eq!(normalized.ncols(), 2);
    let steps = 20_000;
    let mut best = f64::NEG_INFINITY;
    for i in 0..steps {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
        let (s, c) = theta.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        best = best.max(varimax_criterion_oracle(&(normalized * rot)));
    }
    best
}

pub fn communalities_oracle(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x * x).sum::<f64>())
        .collect()
}

/// Correlation matrix of the columns, computed directly from raw data with
/// sample standard deviations.
pub fn correlation_oracle(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = columns.len();
    let n = columns[0].len() as f64;
    let standardized: Vec<Vec<f64>> = columns
        .iter()
        .map(|col| {
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            col.iter().map(|x| (x - mean) / sd).collect()
        })
        .collect();
    let mut corr = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in 0..k {
            corr[a][b] = standardized[a]
                .iter()
                .zip(&standardized[b])
                .map(|(x, y)| x * y)
                .sum::<f64>()
                / (n - 1.0);
        }
    }
    corr
}

// -------------------------------------------------------------------- gexf --

/// Structural conformance of a GEXF document: well-formed XML, required
/// attributes present, attvalues referencing declared attributes, and edge
/// endpoints referencing declared nodes.
pub fn check_gexf_structure(xml: &str, expect_nodes: usize, expect_edges: usize) {
    use quick_xml::events::Event;
    use quick_xml::Reader;

    let mut reader = Reader::from_str(xml);
    let mut node_ids = BTreeSet::new();
    let mut edge_ids = BTreeSet::new();
    let mut declared_attrs = BTreeSet::new();
    let mut edge_endpoints: Vec<(String, String)> = Vec::new();
    let mut attvalue_refs = Vec::new();
    let mut saw_gexf = false;
    let mut saw_graph = false;

    let attr = |e: &quick_xml::events::BytesStart, name: &str| -> Option<String> {
        e.try_get_attribute(name)
            .unwrap()
            .map(|a| String::from_utf8(a.value.into_owned()).unwrap())
    };

    loop {
        match reader.read_event().expect("well-formed XML") {
            Event::Start(e) | Event::Empty(e) => match e.local_name().as_ref() {
                b"gexf" => {
                    saw_gexf = true;
                    assert_eq!(attr(&e, "version").as_deref(), Some("1.2"));
                    assert_eq!(
                        attr(&e, "xmlns").as_deref(),
                        Some("http://www.gexf.net/1.2draft")
                    );
                }
                b"graph" => {
                    saw_graph = true;
                    assert_eq!(attr(&e, "defaultedgetype").as_deref(), Some("directed"));
                }
                b"attribute" => {
                    declared_attrs.insert(attr(&e, "id").expect("attribute id"));
                    assert!(attr(&e, "title").is_some());
                    assert!(attr(&e, "type").is_some());
                }
                b"attvalue" => {
                    attvalue_refs.push(attr(&e, "for").expect("attvalue for"));
                    assert!(attr(&e, "value").is_some());
                }
                b"node" => {
                    let id = attr(&e, "id").expect("node id");
                    assert!(attr(&e, "label").is_some(), "node {id} lacks a label");
                    assert!(node_ids.insert(id.clone()), "duplicate node id {id}");
                }
                b"edge" => {
                    let id = attr(&e, "id").expect("edge id");
                    assert!(edge_ids.insert(id.clone()), "duplicate edge id {id}");
                    let source = attr(&e, "source").expect("edge source");
                    let target = attr(&e, "target").expect("edge target");
                    assert!(attr(&e, "weight").is_some());
                    edge_endpoints.push((source, target));
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    assert!(saw_gexf && saw_graph, "missing gexf or graph element");
    assert_eq!(node_ids.len(), expect_nodes);
    assert_eq!(edge_endpoints.len(), expect_edges);
    for r in attvalue_refs {
        assert!(
            declared_attrs.contains(&r),
            "attvalue references undeclared attribute {r}"
        );
    }
    for (s, t) in edge_endpoints {
        assert!(node_ids.contains(&s), "edge source {s} is not a node");
        assert!(node_ids.contains(&t), "edge target {t} is not a node");
    }
}
