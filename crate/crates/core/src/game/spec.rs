use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Variant;
use crate::error::{Error, Result};
use crate::graph::{Color, Graph, Position, TargetGraph};

/// A game: variant, board, target(s) and precoloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    variant: Variant,
    board: Arc<Graph>,
    red_target: TargetGraph,
    green_target: TargetGraph,
    precolor_red: Vec<usize>,
    precolor_green: Vec<usize>,
}

impl GameSpec {
    /// Checks structure only: edge indices in range and the two precolored
    /// sets disjoint. Whether the precoloring already contains a target is
    /// checked by [`GameSpec::initial_state`].
    pub fn new(
        variant: Variant,
        board: Arc<Graph>,
        red_target: TargetGraph,
        green_target: TargetGraph,
        mut precolor_red: Vec<usize>,
        mut precolor_green: Vec<usize>,
    ) -> Result<Self> {
        if variant != Variant::AsymmetricAvoid && red_target != green_target {
            return Err(Error::InvalidSpec(format!("{variant} uses a single target graph")));
        }
        precolor_red.sort_unstable();
        precolor_green.sort_unstable();
        for set in [&precolor_red, &precolor_green] {
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidSpec("precolored edge listed twice".into()));
            }
            if let Some(&e) = set.iter().find(|&&e| e >= board.edge_count()) {
                return Err(Error::InvalidSpec(format!("precolored edge {e} is not on the board")));
            }
        }
        if precolor_red.iter().any(|e| precolor_green.binary_search(e).is_ok()) {
            return Err(Error::InvalidSpec("red and green precolorings intersect".into()));
        }
        Ok(GameSpec { variant, board, red_target, green_target, precolor_red, precolor_green })
    }

    /// `variant` on `K_n` against `K_k`, nothing precolored.
    pub fn complete(variant: Variant, n: usize, k: usize) -> Result<Self> {
        let target = TargetGraph::clique(k)?;
        GameSpec::new(variant, Arc::new(Graph::complete(n)), target.clone(), target, Vec::new(), Vec::new())
    }

    /// Sim: avoid monochromatic triangles on `K6`.
    pub fn sim() -> Self {
        GameSpec::complete(Variant::Avoid, 6, 3).expect("valid")
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn board(&self) -> &Arc<Graph> {
        &self.board
    }

    pub fn target(&self, color: Color) -> &Graph {
        match color {
            Color::Red => &self.red_target,
            Color::Green => &self.green_target,
        }
    }

    pub fn precolor(&self, color: Color) -> &[usize] {
        match color {
            Color::Red => &self.precolor_red,
            Color::Green => &self.precolor_green,
        }
    }

    /// The same game under a different variant.
    pub fn with_variant(&self, variant: Variant) -> Result<Self> {
        GameSpec::new(
            variant,
            self.board.clone(),
            self.red_target.clone(),
            self.green_target.clone(),
            self.precolor_red.clone(),
            self.precolor_green.clone(),
        )
    }

    pub fn initial_position(&self) -> Position {
        Position::with_colors(self.board.clone(), &self.precolor_red, &self.precolor_green)
            .expect("validated at construction")
    }

    pub fn to_document(&self) -> SpecDocument {
        let pairs = |g: &Graph, set: &[usize]| set.iter().map(|&e| edge_pair(g, e)).collect::<Vec<_>>();
        let target_doc = |t: &Graph| TargetDocument {
            vertex_count: t.vertex_count(),
            edges: t.edges().iter().map(|&(a, b)| [a as usize, b as usize]).collect(),
        };
        SpecDocument {
            variant: self.variant,
            vertex_count: self.board.vertex_count(),
            edges: if self.board.is_complete() {
                None
            } else {
                Some(self.board.edges().iter().map(|&(a, b)| [a as usize, b as usize]).collect())
            },
            target: target_doc(&self.red_target),
            target_green: (self.variant == Variant::AsymmetricAvoid).then(|| target_doc(&self.green_target)),
            precolor_red: pairs(&self.board, &self.precolor_red),
            precolor_green: pairs(&self.board, &self.precolor_green),
            vertex_names: None,
            gadgets: None,
        }
    }

    pub fn from_document(doc: &SpecDocument) -> Result<Self> {
        let board = match &doc.edges {
            None => Graph::complete(doc.vertex_count),
            Some(list) => Graph::new(doc.vertex_count, list.iter().map(|&[a, b]| (a, b)))?,
        };
        let red_target = doc.target.to_target()?;
        let green_target = match &doc.target_green {
            Some(t) => t.to_target()?,
            None => red_target.clone(),
        };
        let lookup = |pairs: &[[usize; 2]]| -> Result<Vec<usize>> {
            pairs
                .iter()
                .map(|&[a, b]| {
                    board
                        .edge_index(a, b)
                        .ok_or_else(|| Error::InvalidSpec(format!("precolored pair {a}-{b} is not a board edge")))
                })
                .collect()
        };
        let red = lookup(&doc.precolor_red)?;
        let green = lookup(&doc.precolor_green)?;
        GameSpec::new(doc.variant, Arc::new(board), red_target, green_target, red, green)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDocument = serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        GameSpec::from_document(&doc)
    }

    /// SHA-256 of the compact JSON form of the game, as lowercase hex.
    pub fn fingerprint(&self) -> String {
        let compact = serde_json::to_vec(&self.to_document()).expect("serializable");
        Sha256::digest(&compact).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn edge_pair(g: &Graph, e: usize) -> [usize; 2] {
    let (a, b) = g.edge(e);
    [a, b]
}

/// JSON form of a [`GameSpec`]. Field order is fixed: variant, vertex_count,
/// edges (null for a complete board), target, target_green (asymmetric games
/// only), precolor_red, precolor_green, then the optional naming data emitted
/// by the reduction transducers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub variant: Variant,
    pub vertex_count: usize,
    #[serde(default)]
    pub edges: Option<Vec<[usize; 2]>>,
    pub target: TargetDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_green: Option<TargetDocument>,
    #[serde(default)]
    pub precolor_red: Vec<[usize; 2]>,
    #[serde(default)]
    pub precolor_green: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gadgets: Option<BTreeMap<String, Vec<[usize; 2]>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetDocument {
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TargetDocument {
    fn to_target(&self) -> Result<TargetGraph> {
        TargetGraph::new(Graph::new(self.vertex_count, self.edges.iter().map(|&[a, b]| (a, b)))?)
    }
}
