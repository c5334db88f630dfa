//! Deterministic Fruchterman-Reingold force-directed placement and the node
//! size/color encoding used for visualization export.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{InstitutionKind, MentionNetwork, Sector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("invalid layout parameter: {0}")]
    InvalidParams(String),
    #[error("node {0} has no page count for size encoding")]
    MissingTpc(String),
    #[error("node {0} has no kind for color encoding")]
    MissingKind(String),
    #[error("company node {0} has no sector for color encoding")]
    MissingSector(String),
    #[error("initial positions cover {0} nodes, network has {1}")]
    InitialMismatch(usize, usize),
}

/// Frame, schedule, and seed of a layout run.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutParams {
    pub width: f64,
    pub height: f64,
    pub iterations: usize,
    /// Scales the optimal distance k = c * sqrt(area / N).
    pub c_constant: f64,
    /// Starting temperature; width/10 when absent.
    pub initial_temperature: Option<f64>,
    pub seed: u64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            width: 1000.0,
            height: 1000.0,
            iterations: 500,
            c_constant: 1.0,
            initial_temperature: None,
            seed: 42,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<(), LayoutError> {
        let positive = [
            ("width", self.width),
            ("height", self.height),
            ("c_constant", self.c_constant),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(LayoutError::InvalidParams(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if let Some(t) = self.initial_temperature {
            if !t.is_finite() || t <= 0.0 {
                return Err(LayoutError::InvalidParams(format!(
                    "initial_temperature must be positive, got {t}"
                )));
            }
        }
        if self.iterations == 0 {
            return Err(LayoutError::InvalidParams(
                "iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn optimal_distance(&self, n_nodes: usize) -> f64 {
        self.c_constant * (self.width * self.height / n_nodes as f64).sqrt()
    }

    fn t0(&self) -> f64 {
        self.initial_temperature.unwrap_or(self.width / 10.0)
    }
}

/// A node's final coordinates within the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Position {
    pub node_id: String,
    pub x: f64,
    pub y: f64,
}

/// Temperature and observed maximum displacement of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStat {
    pub temperature: f64,
    pub max_displacement: f64,
}

/// Runs the force-directed layout from seeded random initial positions.
pub fn fruchterman_reingold(
    net: &MentionNetwork,
    params: &LayoutParams,
) -> Result<Vec<Position>, LayoutError> {
    fruchterman_reingold_traced(net, params).map(|(positions, _)| positions)
}

/// Like [`fruchterman_reingold`] but also reports per-iteration statistics.
pub fn fruchterman_reingold_traced(
    net: &MentionNetwork,
    params: &LayoutParams,
) -> Result<(Vec<Position>, Vec<IterationStat>), LayoutError> {
    params.validate()?;
    let n = net.n_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let initial: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.random_range(0.0..params.width),
                rng.random_range(0.0..params.height),
            )
        })
        .collect();
    fruchterman_reingold_from(net, params, &initial)
}

/// Runs the layout from caller-supplied initial positions.
pub fn fruchterman_reingold_from(
    net: &MentionNetwork,
    params: &LayoutParams,
    initial: &[(f64, f64)],
) -> Result<(Vec<Position>, Vec<IterationStat>), LayoutError> {
    params.validate()?;
    let n = net.n_nodes();
    if initial.len() != n {
        return Err(LayoutError::InitialMismatch(initial.len(), n));
    }
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if n == 1 {
        // No forces act on a lone node; it is placed at the frame center.
        return Ok((
            vec![Position {
                node_id: net.nodes()[0].id.clone(),
                x: params.width / 2.0,
                y: params.height / 2.0,
            }],
            Vec::new(),
        ));
    }

    let mut edges = BTreeSet::new();
    for arc in net.arcs() {
        let a = net.node_index(&arc.host_id).expect("endpoint");
        let b = net.node_index(&arc.target_id).expect("endpoint");
        edges.insert((a.min(b), a.max(b)));
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();

    let k = params.optimal_distance(n);
    let t0 = params.t0();
    let mut pos = initial.to_vec();
    let mut stats = Vec::with_capacity(params.iterations);
    const EPS: f64 = 1e-9;

    for iter in 0..params.iterations {
        let t = t0 * (params.iterations - iter) as f64 / params.iterations as f64;
        let mut disp = vec![(0.0_f64, 0.0_f64); n];
        for v in 0..n {
            for u in (v + 1)..n {
                let dx = pos[v].0 - pos[u].0;
                let dy = pos[v].1 - pos[u].1;
                let d = (dx * dx + dy * dy).sqrt().max(EPS);
                let f = k * k / d / d;
                disp[v].0 += dx * f;
                disp[v].1 += dy * f;
                disp[u].0 -= dx * f;
                disp[u].1 -= dy * f;
            }
        }
        for &(a, b) in &edges {
            let dx = pos[a].0 - pos[b].0;
            let dy = pos[a].1 - pos[b].1;
            let d = (dx * dx + dy * dy).sqrt().max(EPS);
            let f = d / k;
            disp[a].0 -= dx * f;
            disp[a].1 -= dy * f;
            disp[b].0 += dx * f;
            disp[b].1 += dy * f;
        }
        let mut max_step = 0.0_f64;
        for v in 0..n {
            let (dx, dy) = disp[v];
            let len = (dx * dx + dy * dy).sqrt();
            if len > 0.0 {
                let step = len.min(t);
                pos[v].0 += dx / len * step;
                pos[v].1 += dy / len * step;
                max_step = max_step.max(step);
            }
            pos[v].0 = pos[v].0.clamp(0.0, params.width);
            pos[v].1 = pos[v].1.clamp(0.0, params.height);
        }
        stats.push(IterationStat {
            temperature: t,
            max_displacement: max_step,
        });
    }

    let positions = net
        .nodes()
        .iter()
        .zip(&pos)
        .map(|(node, &(x, y))| Position {
            node_id: node.id.clone(),
            x,
            y,
        })
        .collect();
    Ok((positions, stats))
}

/// Legend colors: blue universities plus one color per industrial sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Blue,
    LightBrown,
    DarkBrown,
    Green,
    Cyan,
    Red,
    Purple,
    Pink,
    Grey,
    Yellow,
    Orange,
}

impl Color {
    pub fn key(&self) -> &'static str {
        match self {
            Color::Blue => "Blue",
            Color::LightBrown => "LightBrown",
            Color::DarkBrown => "DarkBrown",
            Color::Green => "Green",
            Color::Cyan => "Cyan",
            Color::Red => "Red",
            Color::Purple => "Purple",
            Color::Pink => "Pink",
            Color::Grey => "Grey",
            Color::Yellow => "Yellow",
            Color::Orange => "Orange",
        }
    }

    pub fn rgb(&self) -> (u8, u8, u8) {
        match self {
            Color::Blue => (0, 0, 255),
            Color::LightBrown => (205, 133, 63),
            Color::DarkBrown => (101, 67, 33),
            Color::Green => (0, 128, 0),
            Color::Cyan => (0, 255, 255),
            Color::Red => (255, 0, 0),
            Color::Purple => (128, 0, 128),
            Color::Pink => (255, 105, 180),
            Color::Grey => (128, 128, 128),
            Color::Yellow => (255, 255, 0),
            Color::Orange => (255, 165, 0),
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Color {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [
            Color::Blue,
            Color::LightBrown,
            Color::DarkBrown,
            Color::Green,
            Color::Cyan,
            Color::Red,
            Color::Purple,
            Color::Pink,
            Color::Grey,
            Color::Yellow,
            Color::Orange,
        ];
        all.into_iter()
            .find(|c| c.key() == s.trim())
            .ok_or_else(|| format!("unknown color {s:?}"))
    }
}

/// The legend color of a sector.
pub fn sector_color(sector: Sector) -> Color {
    match sector {
        Sector::FoodBeveragesTobacco => Color::LightBrown,
        Sector::MiningQuarrying => Color::DarkBrown,
        Sector::ChemicalsPetroleumRubberPlastics => Color::Green,
        Sector::MetalProductsMachinery => Color::Cyan,
        Sector::MotorVehicles => Color::Red,
        Sector::NonMetallicMinerals => Color::Purple,
        Sector::Electricity => Color::Pink,
        Sector::PaperPrinting => Color::Grey,
        Sector::PrimaryMetals => Color::Yellow,
        Sector::TextilesApparel => Color::Orange,
    }
}

/// Node diameter range of the size encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeRange {
    pub min: f64,
    pub max: f64,
}

impl Default for SizeRange {
    fn default() -> Self {
        SizeRange {
            min: 4.0,
            max: 40.0,
        }
    }
}

/// Size and color of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEncoding {
    pub node_id: String,
    pub size: f64,
    pub color: Color,
}

/// Encodes node sizes from page counts (log scale, since counts span
/// several orders of magnitude) and colors from the kind/sector legend.
pub fn encode_nodes(
    net: &MentionNetwork,
    sizes: SizeRange,
) -> Result<Vec<NodeEncoding>, LayoutError> {
    if !(sizes.min > 0.0 && sizes.max >= sizes.min) {
        return Err(LayoutError::InvalidParams(format!(
            "size range {}..{} is not positive and ordered",
            sizes.min, sizes.max
        )));
    }
    let mut max_tpc = 0u64;
    for node in net.nodes() {
        match node.tpc {
            Some(tpc) => max_tpc = max_tpc.max(tpc),
            None => return Err(LayoutError::MissingTpc(node.id.clone())),
        }
    }
    let denom = (1.0 + max_tpc as f64).log10();
    net.nodes()
        .iter()
        .map(|node| {
            let color = match node.kind {
                Some(InstitutionKind::University) => Color::Blue,
                Some(InstitutionKind::Company) => match node.sector {
                    Some(sector) => sector_color(sector),
                    None => return Err(LayoutError::MissingSector(node.id.clone())),
                },
                None => return Err(LayoutError::MissingKind(node.id.clone())),
            };
            let tpc = node.tpc.expect("checked above") as f64;
            let scaled = if denom > 0.0 {
                (1.0 + tpc).log10() / denom
            } else {
                0.0
            };
            Ok(NodeEncoding {
                node_id: node.id.clone(),
                size: sizes.min + (sizes.max - sizes.min) * scaled,
                color,
            })
        })
        .collect()
}

/// A fully placed node: coordinates plus visual encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePlacement {
    pub node_id: String,
    pub x: f64,
    pub y: f64,
    pub size: f64,
    pub color: Color,
}

/// Combines the layout and the encoding into placements ready for export.
pub fn place_nodes(
    net: &MentionNetwork,
    params: &LayoutParams,
    sizes: SizeRange,
) -> Result<Vec<NodePlacement>, LayoutError> {
    let positions = fruchterman_reingold(net, params)?;
    let encodings = encode_nodes(net, sizes)?;
    Ok(positions
        .into_iter()
        .zip(encodings)
        .map(|(p, e)| {
            debug_assert_eq!(p.node_id, e.node_id);
            NodePlacement {
                node_id: p.node_id,
                x: p.x,
                y: p.y,
                size: e.size,
                color: e.color,
            }
        })
        .collect())
}
