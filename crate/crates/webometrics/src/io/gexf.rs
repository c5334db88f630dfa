//! GEXF 1.2draft export with optional viz extension data.
//!
//! Output is fully determined by the inputs: no timestamps or generator
//! versions are embedded, so identical networks serialize byte-identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::layout::NodePlacement;
use crate::model::MentionNetwork;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GexfError {
    #[error("placement references unknown node {0:?}")]
    UnknownNode(String),
    #[error("duplicate placement for node {0:?}")]
    DuplicatePlacement(String),
    #[error("node {0:?} has no placement")]
    MissingPlacement(String),
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Serializes the network, with node attributes where present. When
/// placements are given they must cover every node exactly once; position,
/// size, and color then go into the viz namespace.
pub fn write_gexf(
    net: &MentionNetwork,
    placements: Option<&[NodePlacement]>,
) -> Result<String, GexfError> {
    let placed: Option<BTreeMap<&str, &NodePlacement>> = match placements {
        None => None,
        Some(list) => {
            let mut map = BTreeMap::new();
            for p in list {
                if net.node_index(&p.node_id).is_none() {
                    return Err(GexfError::UnknownNode(p.node_id.clone()));
                }
                if map.insert(p.node_id.as_str(), p).is_some() {
                    return Err(GexfError::DuplicatePlacement(p.node_id.clone()));
                }
            }
            for node in net.nodes() {
                if !map.contains_key(node.id.as_str()) {
                    return Err(GexfError::MissingPlacement(node.id.clone()));
                }
            }
            Some(map)
        }
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(concat!(
        "<gexf xmlns=\"http://www.gexf.net/1.2draft\"",
        " xmlns:viz=\"http://www.gexf.net/1.2draft/viz\"",
        " version=\"1.2\">\n"
    ));
    out.push_str("  <meta>\n");
    out.push_str("    <creator>webometrics</creator>\n");
    out.push_str("    <description>institutional web mention network</description>\n");
    out.push_str("  </meta>\n");
    out.push_str("  <graph defaultedgetype=\"directed\">\n");
    out.push_str("    <attributes class=\"node\">\n");
    out.push_str("      <attribute id=\"0\" title=\"kind\" type=\"string\"/>\n");
    out.push_str("      <attribute id=\"1\" title=\"sector\" type=\"string\"/>\n");
    out.push_str("      <attribute id=\"2\" title=\"tpc\" type=\"long\"/>\n");
    out.push_str("    </attributes>\n");
    out.push_str("    <nodes>\n");
    for node in net.nodes() {
        let id = escape(&node.id);
        let mut attvalues = String::new();
        if let Some(kind) = node.kind {
            let _ = writeln!(
                attvalues,
                "          <attvalue for=\"0\" value=\"{}\"/>",
                kind.as_str()
            );
        }
        if let Some(sector) = node.sector {
            let _ = writeln!(
                attvalues,
                "          <attvalue for=\"1\" value=\"{}\"/>",
                escape(sector.label())
            );
        }
        if let Some(tpc) = node.tpc {
            let _ = writeln!(attvalues, "          <attvalue for=\"2\" value=\"{tpc}\"/>");
        }
        let viz = placed.as_ref().map(|map| map[node.id.as_str()]);
        if attvalues.is_empty() && viz.is_none() {
            let _ = writeln!(out, "      <node id=\"{id}\" label=\"{id}\"/>");
            continue;
        }
        let _ = writeln!(out, "      <node id=\"{id}\" label=\"{id}\">");
        if !attvalues.is_empty() {
            out.push_str("        <attvalues>\n");
            out.push_str(&attvalues);
            out.push_str("        </attvalues>\n");
        }
        if let Some(p) = viz {
            let (r, g, b) = p.color.rgb();
            let _ = writeln!(out, "        <viz:position x=\"{}\" y=\"{}\"/>", p.x, p.y);
            let _ = writeln!(out, "        <viz:size value=\"{}\"/>", p.size);
            let _ = writeln!(out, "        <viz:color r=\"{r}\" g=\"{g}\" b=\"{b}\"/>");
        }
        out.push_str("      </node>\n");
    }
    out.push_str("    </nodes>\n");
    out.push_str("    <edges>\n");
    for (i, arc) in net.arcs().iter().enumerate() {
        let _ = writeln!(
            out,
            "      <edge id=\"{i}\" source=\"{}\" target=\"{}\" weight=\"{}\"/>",
            escape(&arc.host_id),
            escape(&arc.target_id),
            arc.hits
        );
    }
    out.push_str("    </edges>\n");
    out.push_str("  </graph>\n");
    out.push_str("</gexf>\n");
    Ok(out)
}
