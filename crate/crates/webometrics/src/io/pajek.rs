//! Pajek NET reading and writing.
//!
//! The writer emits the plain dialect: a `*Vertices` block with quoted
//! labels, then a `*Arcs` block of `source target weight` triples with
//! 1-based vertex numbers. The reader additionally accepts `%` comments,
//! unquoted labels, omitted vertex lines, trailing vertex coordinates, and
//! `*Edges` blocks (each undirected edge becomes a pair of opposite arcs).

use thiserror::Error;

use crate::model::{MentionEdge, MentionNetwork, ModelError, NetworkNode};

#[derive(Debug, Error)]
pub enum PajekError {
    #[error("label {0:?} contains a quote or line break")]
    BadLabel(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Structure(#[from] ModelError),
}

fn parse_err(line: usize, message: impl Into<String>) -> PajekError {
    PajekError::Parse {
        line,
        message: message.into(),
    }
}

/// Renders the network structure; node attributes are not representable in
/// NET and are dropped.
pub fn write_pajek(net: &MentionNetwork) -> Result<String, PajekError> {
    let mut out = String::new();
    out.push_str(&format!("*Vertices {}\n", net.n_nodes()));
    for (i, node) in net.nodes().iter().enumerate() {
        if node.id.contains(['"', '\n', '\r']) {
            return Err(PajekError::BadLabel(node.id.clone()));
        }
        out.push_str(&format!("{} \"{}\"\n", i + 1, node.id));
    }
    out.push_str("*Arcs\n");
    for arc in net.arcs() {
        let src = net
            .node_index(&arc.host_id)
            .expect("arc endpoints are nodes");
        let dst = net
            .node_index(&arc.target_id)
            .expect("arc endpoints are nodes");
        out.push_str(&format!("{} {} {}\n", src + 1, dst + 1, arc.hits));
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Vertices,
    Arcs,
    Edges,
}

/// Parses NET text into a network of bare nodes. Vertex numbers without a
/// vertex line are labeled with their own number.
pub fn read_pajek(text: &str) -> Result<MentionNetwork, PajekError> {
    let mut section = Section::Preamble;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut arcs: Vec<MentionEdge> = Vec::new();
    let mut pending_edges: Vec<(usize, usize, u64)> = Vec::new();
    let mut seen_vertices = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = strip_keyword(line, "*vertices") {
            if seen_vertices {
                return Err(parse_err(line_no, "repeated *Vertices section"));
            }
            seen_vertices = true;
            let count: usize = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad vertex count {:?}", rest.trim())))?;
            labels = vec![None; count];
            section = Section::Vertices;
            continue;
        }
        if strip_keyword(line, "*arcs").is_some_and(|rest| rest.trim().is_empty()) {
            require_vertices(seen_vertices, line_no)?;
            section = Section::Arcs;
            continue;
        }
        if strip_keyword(line, "*edges").is_some_and(|rest| rest.trim().is_empty()) {
            require_vertices(seen_vertices, line_no)?;
            section = Section::Edges;
            continue;
        }
        if line.starts_with('*') {
            return Err(parse_err(line_no, format!("unsupported section {line:?}")));
        }
        match section {
            Section::Preamble => {
                return Err(parse_err(line_no, "content before *Vertices"));
            }
            Section::Vertices => {
                let (number, label) = parse_vertex_line(line, line_no)?;
                if number == 0 || number > labels.len() {
                    return Err(parse_err(
                        line_no,
                        format!("vertex number {number} outside 1..={}", labels.len()),
                    ));
                }
                let slot = &mut labels[number - 1];
                if slot.is_some() {
                    return Err(parse_err(line_no, format!("repeated vertex {number}")));
                }
                *slot = Some(label);
            }
            Section::Arcs | Section::Edges => {
                let (src, dst, weight) = parse_link_line(line, line_no, labels.len())?;
                if section == Section::Arcs {
                    arcs.push(bare_arc(&labels, src, dst, weight));
                } else {
                    pending_edges.push((src, dst, weight));
                }
            }
        }
    }
    if !seen_vertices {
        return Err(parse_err(
            text.lines().count() + 1,
            "missing *Vertices section",
        ));
    }

    for (src, dst, weight) in pending_edges {
        arcs.push(bare_arc(&labels, src, dst, weight));
        arcs.push(bare_arc(&labels, dst, src, weight));
    }
    let nodes: Vec<NetworkNode> = labels
        .iter()
        .enumerate()
        .map(|(i, label)| NetworkNode::bare(label.clone().unwrap_or_else(|| (i + 1).to_string())))
        .collect();
    Ok(MentionNetwork::new(nodes, arcs)?)
}

fn require_vertices(seen: bool, line_no: usize) -> Result<(), PajekError> {
    if seen {
        Ok(())
    } else {
        Err(parse_err(line_no, "section before *Vertices"))
    }
}

fn bare_arc(labels: &[Option<String>], src: usize, dst: usize, weight: u64) -> MentionEdge {
    let id = |n: usize| labels[n - 1].clone().unwrap_or_else(|| n.to_string());
    MentionEdge {
        host_id: id(src),
        target_id: id(dst),
        hits: weight,
        edge_type: None,
    }
}

fn strip_keyword<'a>(line: &'a str, keyword: &str) -> Option<&'a str> {
    let head = line.get(..keyword.len())?;
    if head.eq_ignore_ascii_case(keyword) {
        Some(&line[keyword.len()..])
    } else {
        None
    }
}

fn parse_vertex_line(line: &str, line_no: usize) -> Result<(usize, String), PajekError> {
    let mut rest = line;
    let number_token = take_token(&mut rest);
    let number: usize = number_token
        .parse()
        .map_err(|_| parse_err(line_no, format!("bad vertex number {number_token:?}")))?;
    let rest = rest.trim_start();
    let label = if let Some(quoted) = rest.strip_prefix('"') {
        match quoted.find('"') {
            Some(end) => quoted[..end].to_string(),
            None => return Err(parse_err(line_no, "unterminated label quote")),
        }
    } else {
        let mut rest = rest;
        let token = take_token(&mut rest);
        if token.is_empty() {
            return Err(parse_err(line_no, "vertex line without label"));
        }
        token.to_string()
    };
    Ok((number, label))
}

fn parse_link_line(
    line: &str,
    line_no: usize,
    n: usize,
) -> Result<(usize, usize, u64), PajekError> {
    let mut rest = line;
    let src = parse_endpoint(take_token(&mut rest), line_no, n)?;
    let dst = parse_endpoint(take_token(&mut rest), line_no, n)?;
    let weight_token = take_token(&mut rest);
    let weight: u64 = if weight_token.is_empty() {
        1
    } else {
        weight_token
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad weight {weight_token:?}")))?
    };
    if weight == 0 {
        return Err(parse_err(line_no, "weight must be positive"));
    }
    Ok((src, dst, weight))
}

fn parse_endpoint(token: &str, line_no: usize, n: usize) -> Result<usize, PajekError> {
    let number: usize = token
        .parse()
        .map_err(|_| parse_err(line_no, format!("bad vertex reference {token:?}")))?;
    if number == 0 || number > n {
        return Err(parse_err(
            line_no,
            format!("vertex reference {number} outside 1..={n}"),
        ));
    }
    Ok(number)
}

fn take_token<'a>(rest: &mut &'a str) -> &'a str {
    let trimmed = rest.trim_start();
    let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
    let (token, remainder) = trimmed.split_at(end);
    *rest = remainder;
    token
}
