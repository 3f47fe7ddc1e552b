//! Dimer models on the torus, face tracing, and the dual quiver with relations.
//!
//! Rotations list the edges at a node in counterclockwise order. The arrow
//! dual to an edge has the white node on its right, so arrows circulate
//! clockwise around white nodes and counterclockwise around black nodes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sheaf::{evaluate_word, Morphism, SheafError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimerError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("dimer has no edges")]
    Empty,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` refers to unknown node `{node}`")]
    UnknownNode { edge: String, node: String },
    #[error("edge `{edge}` does not join a black node to a white node")]
    NotBipartite { edge: String },
    #[error("rotation at `{node}` must list each incident edge exactly once")]
    BadRotation { node: String },
    #[error("node `{0}` has fewer than two edges")]
    Degenerate(String),
    #[error("embedding has Euler characteristic {0}, a torus needs 0")]
    NotTorus(i64),
    #[error("word `{0}` is not a composable path")]
    NotComposable(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimerNode {
    pub id: String,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimerEdge {
    pub id: String,
    pub black: String,
    pub white: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawDimer {
    nodes: Vec<DimerNode>,
    edges: Vec<DimerEdge>,
    rotation: BTreeMap<String, Vec<String>>,
}

/// A face as the cyclic list of edges on its boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub edges: Vec<String>,
}

/// A bipartite graph with a rotation system of genus one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimerModel {
    pub nodes: Vec<DimerNode>,
    pub edges: Vec<DimerEdge>,
    pub rotation: BTreeMap<String, Vec<String>>,
    #[serde(skip)]
    faces: Vec<Face>,
    /// For each edge, the faces to the left of the darts white-to-black and black-to-white.
    #[serde(skip)]
    sides: Vec<(usize, usize)>,
}

impl<'de> Deserialize<'de> for DimerModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawDimer::deserialize(d)?;
        DimerModel::new(raw.nodes, raw.edges, raw.rotation).map_err(serde::de::Error::custom)
    }
}

impl DimerModel {
    pub fn new(
        nodes: Vec<DimerNode>,
        edges: Vec<DimerEdge>,
        rotation: BTreeMap<String, Vec<String>>,
    ) -> Result<Self, DimerError> {
        if edges.is_empty() {
            return Err(DimerError::Empty);
        }
        let mut color = HashMap::new();
        for n in &nodes {
            if color.insert(n.id.clone(), n.color).is_some() {
                return Err(DimerError::DuplicateId(n.id.clone()));
            }
        }
        let mut edge_index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(DimerError::DuplicateId(e.id.clone()));
            }
            for node in [&e.black, &e.white] {
                if !color.contains_key(node) {
                    return Err(DimerError::UnknownNode { edge: e.id.clone(), node: node.clone() });
                }
            }
            if color[&e.black] != Color::Black || color[&e.white] != Color::White {
                return Err(DimerError::NotBipartite { edge: e.id.clone() });
            }
        }
        for n in &nodes {
            let incident: BTreeSet<&String> =
                edges.iter().filter(|e| e.black == n.id || e.white == n.id).map(|e| &e.id).collect();
            let listed = rotation.get(&n.id).ok_or_else(|| DimerError::BadRotation { node: n.id.clone() })?;
            let listed_set: BTreeSet<&String> = listed.iter().collect();
            if listed_set.len() != listed.len() || listed_set != incident {
                return Err(DimerError::BadRotation { node: n.id.clone() });
            }
            if listed.len() < 2 {
                return Err(DimerError::Degenerate(n.id.clone()));
            }
        }
        if rotation.keys().any(|k| !color.contains_key(k)) {
            let extra = rotation.keys().find(|k| !color.contains_key(*k)).cloned().unwrap_or_default();
            return Err(DimerError::BadRotation { node: extra });
        }
        let mut model = DimerModel { nodes, edges, rotation, faces: Vec::new(), sides: Vec::new() };
        model.trace_faces(&edge_index);
        let chi = model.nodes.len() as i64 - model.edges.len() as i64 + model.faces.len() as i64;
        if chi != 0 {
            return Err(DimerError::NotTorus(chi));
        }
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self, DimerError> {
        let raw: RawDimer = serde_json::from_str(text).map_err(|e| DimerError::Json(e.to_string()))?;
        DimerModel::new(raw.nodes, raw.edges, raw.rotation)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dimer serializes")
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn color(&self, node: &str) -> Option<Color> {
        self.nodes.iter().find(|n| n.id == node).map(|n| n.color)
    }

    /// Walk every dart keeping the face on the left. Faces are numbered in order
    /// of discovery, visiting edges in input order and the white-to-black dart
    /// of each edge first.
    fn trace_faces(&mut self, edge_index: &HashMap<String, usize>) {
        // dart (edge, to_black): true means white -> black
        let mut face_of: HashMap<(usize, bool), usize> = HashMap::new();
        let mut faces = Vec::new();
        for start_edge in 0..self.edges.len() {
            for start_dir in [true, false] {
                if face_of.contains_key(&(start_edge, start_dir)) {
                    continue;
                }
                let id = faces.len();
                let mut boundary = Vec::new();
                let (mut e, mut to_black) = (start_edge, start_dir);
                while face_of.insert((e, to_black), id).is_none() {
                    boundary.push(self.edges[e].id.clone());
                    let head = if to_black { &self.edges[e].black } else { &self.edges[e].white };
                    let rot = &self.rotation[head];
                    let pos = rot.iter().position(|x| *x == self.edges[e].id).expect("edge in rotation");
                    // clockwise neighbour keeps the face on the left
                    let next = &rot[(pos + rot.len() - 1) % rot.len()];
                    e = edge_index[next];
                    to_black = !to_black;
                }
                faces.push(Face { edges: boundary });
            }
        }
        self.sides = (0..self.edges.len()).map(|e| (face_of[&(e, true)], face_of[&(e, false)])).collect();
        self.faces = faces;
    }

    /// Arrows around a node in the order a path travels them: clockwise around
    /// white nodes, counterclockwise around black ones.
    pub fn node_cycle(&self, node: &str) -> Option<Vec<String>> {
        let color = self.color(node)?;
        let mut rot = self.rotation.get(node)?.clone();
        if color == Color::White {
            rot.reverse();
        }
        Some(rot)
    }
}

/// Arrows are written in composition order: the rightmost arrow is traversed first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathWord(pub Vec<String>);

impl PathWord {
    pub fn parse(text: &str) -> Self {
        PathWord(text.split_whitespace().map(str::to_string).collect())
    }

    /// The word for a path given in travel order.
    pub fn from_travel<S: AsRef<str>>(arrows: &[S]) -> Self {
        PathWord(arrows.iter().rev().map(|a| a.as_ref().to_string()).collect())
    }
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverRelation {
    pub arrow: String,
    pub plus: PathWord,
    pub minus: PathWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<usize>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<QuiverRelation>,
}

impl Quiver {
    pub fn arrow(&self, id: &str) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.id == id)
    }

    /// Endpoints `(source, target)` of a word, if it is a composable path.
    pub fn path_endpoints(&self, w: &PathWord) -> Result<(usize, usize), DimerError> {
        let mut endpoints: Option<(usize, usize)> = None;
        for id in w.0.iter().rev() {
            let a = self.arrow(id).ok_or_else(|| DimerError::UnknownArrow(id.clone()))?;
            endpoints = match endpoints {
                None => Some((a.source, a.target)),
                Some((s, t)) if t == a.source => Some((s, a.target)),
                Some(_) => return Err(DimerError::NotComposable(w.to_string())),
            };
        }
        endpoints.ok_or_else(|| DimerError::NotComposable(w.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("quiver serializes")
    }
}

/// Dual quiver: one vertex per face, one arrow per edge, and for every arrow
/// the relation between the paths back around its white and black nodes.
pub fn dimer_to_quiver(d: &DimerModel) -> Quiver {
    let arrows: Vec<Arrow> = d
        .edges
        .iter()
        .zip(&d.sides)
        .map(|(e, &(left_of_wb, left_of_bw))| Arrow { id: e.id.clone(), source: left_of_wb, target: left_of_bw })
        .collect();
    let rest_of_cycle = |node: &str, arrow: &str| -> PathWord {
        let cycle = d.node_cycle(node).expect("node exists");
        let pos = cycle.iter().position(|a| a == arrow).expect("arrow at node");
        let travel: Vec<&String> = (1..cycle.len()).map(|k| &cycle[(pos + k) % cycle.len()]).collect();
        PathWord::from_travel(&travel)
    };
    let relations = d
        .edges
        .iter()
        .map(|e| QuiverRelation {
            arrow: e.id.clone(),
            plus: rest_of_cycle(&e.white, &e.id),
            minus: rest_of_cycle(&e.black, &e.id),
        })
        .collect();
    Quiver { vertices: (0..d.faces.len()).collect(), arrows, relations }
}

/// The quiver of `End(O + O(1))`: `x, y : 0 -> 1`, `t1, t2 : 1 -> 0` with the
/// four commutation relations.
pub fn conifold_quiver() -> Quiver {
    let arrow = |id: &str, source, target| Arrow { id: id.to_string(), source, target };
    let rel = |arrow: &str, plus: &str, minus: &str| QuiverRelation {
        arrow: arrow.to_string(),
        plus: PathWord::parse(plus),
        minus: PathWord::parse(minus),
    };
    Quiver {
        vertices: vec![0, 1],
        arrows: vec![arrow("x", 0, 1), arrow("y", 0, 1), arrow("t1", 1, 0), arrow("t2", 1, 0)],
        relations: vec![
            rel("t2", "x t1 y", "y t1 x"),
            rel("t1", "x t2 y", "y t2 x"),
            rel("y", "t1 x t2", "t2 x t1"),
            rel("x", "t1 y t2", "t2 y t1"),
        ],
    }
}

/// A vertex bijection and arrow renaming carrying one quiver onto another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuiverIsomorphism {
    pub vertices: Vec<usize>,
    pub arrows: BTreeMap<String, String>,
    /// How many candidate labelings were examined.
    pub tried: usize,
}

fn relation_set(q: &Quiver, rename: &dyn Fn(&str) -> String) -> BTreeSet<BTreeSet<Vec<String>>> {
    q.relations
        .iter()
        .map(|r| {
            [&r.plus, &r.minus]
                .iter()
                .map(|w| w.0.iter().map(|a| rename(a)).collect::<Vec<_>>())
                .collect::<BTreeSet<_>>()
        })
        .collect()
}

/// All permutations of `0..n` in lexicographic order, starting with the identity.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Search all vertex bijections and endpoint-preserving arrow renamings for one
/// under which vertices, arrows and the relation ideal generators agree.
/// Relations are compared as unordered pairs of words.
pub fn quiver_isomorphism(a: &Quiver, b: &Quiver) -> Option<QuiverIsomorphism> {
    if a.vertices.len() != b.vertices.len() || a.arrows.len() != b.arrows.len() {
        return None;
    }
    let target_relations = relation_set(b, &|s| s.to_string());
    let mut tried = 0;
    for vmap in permutations(a.vertices.len()) {
        // group arrows by mapped endpoints
        let mut groups: BTreeMap<(usize, usize), (Vec<&Arrow>, Vec<&Arrow>)> = BTreeMap::new();
        for arr in &a.arrows {
            groups.entry((vmap[arr.source], vmap[arr.target])).or_default().0.push(arr);
        }
        for arr in &b.arrows {
            groups.entry((arr.source, arr.target)).or_default().1.push(arr);
        }
        if groups.values().any(|(x, y)| x.len() != y.len()) {
            continue;
        }
        let group_list: Vec<_> = groups.values().collect();
        let perms: Vec<Vec<Vec<usize>>> = group_list.iter().map(|(x, _)| permutations(x.len())).collect();
        let mut choice = vec![0usize; group_list.len()];
        loop {
            tried += 1;
            let mut rename = BTreeMap::new();
            for (g, (xs, ys)) in group_list.iter().enumerate() {
                for (i, &j) in perms[g][choice[g]].iter().enumerate() {
                    rename.insert(xs[i].id.clone(), ys[j].id.clone());
                }
            }
            let f = |s: &str| rename.get(s).cloned().unwrap_or_else(|| s.to_string());
            if relation_set(a, &f) == target_relations {
                return Some(QuiverIsomorphism { vertices: vmap.clone(), arrows: rename, tried });
            }
            let mut g = 0;
            while g < choice.len() {
                choice[g] += 1;
                if choice[g] < perms[g].len() {
                    break;
                }
                choice[g] = 0;
                g += 1;
            }
            if g == choice.len() {
                break;
            }
        }
    }
    None
}

/// Evaluate a word in the conifold quiver as a morphism between `O` and `O(1)`.
pub fn evaluate_path_word(w: &PathWord) -> Result<Morphism, DimerError> {
    let quiver = conifold_quiver();
    quiver.path_endpoints(w)?;
    Ok(evaluate_word(&w.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn conifold_faces_and_quiver() {
        let d = fixtures::conifold_dimer();
        assert_eq!(d.faces().len(), 2);
        let mut seen: HashMap<&String, usize> = HashMap::new();
        for f in d.faces() {
            for e in &f.edges {
                *seen.entry(e).or_default() += 1;
            }
        }
        assert!(seen.values().all(|&n| n == 2));
        let q = dimer_to_quiver(&d);
        assert_eq!(q.arrow("x").map(|a| (a.source, a.target)), Some((0, 1)));
        assert_eq!(q.arrow("t1").map(|a| (a.source, a.target)), Some((1, 0)));
        let iso = quiver_isomorphism(&q, &conifold_quiver()).expect("isomorphic");
        assert!(iso.tried <= 8);
        for r in &q.relations {
            let (s, t) = q.path_endpoints(&r.plus).unwrap();
            let a = q.arrow(&r.arrow).unwrap();
            assert_eq!((s, t), (a.target, a.source));
            assert_eq!(q.path_endpoints(&r.minus).unwrap(), (s, t));
            assert_eq!(evaluate_path_word(&r.plus).unwrap(), evaluate_path_word(&r.minus).unwrap());
        }
    }

    #[test]
    fn hexagonal_tiling() {
        let d = fixtures::hexagonal_dimer();
        let q = dimer_to_quiver(&d);
        assert_eq!(q.vertices.len(), 1);
        assert_eq!(q.arrows.len(), 3);
        assert!(q.arrows.iter().all(|a| a.source == 0 && a.target == 0));
    }

    #[test]
    fn two_edge_square_is_not_a_torus() {
        let text = r#"{"nodes":[{"id":"B","color":"black"},{"id":"W","color":"white"}],
            "edges":[{"id":"a","black":"B","white":"W"},{"id":"b","black":"B","white":"W"}],
            "rotation":{"B":["a","b"],"W":["a","b"]}}"#;
        assert!(matches!(DimerModel::from_json(text), Err(DimerError::NotTorus(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        let empty = r#"{"nodes":[],"edges":[],"rotation":{}}"#;
        assert_eq!(DimerModel::from_json(empty), Err(DimerError::Empty));
        let mono = r#"{"nodes":[{"id":"B","color":"black"},{"id":"C","color":"black"}],
            "edges":[{"id":"a","black":"B","white":"C"}],"rotation":{"B":["a"],"C":["a"]}}"#;
        assert!(matches!(DimerModel::from_json(mono), Err(DimerError::NotBipartite { .. })));
        assert!(matches!(DimerModel::from_json("{"), Err(DimerError::Json(_))));
    }

    #[test]
    fn lexicographic_permutations() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn word_evaluation() {
        assert!(evaluate_path_word(&PathWord::parse("x y")).is_err());
        assert_eq!(
            evaluate_path_word(&PathWord::parse("x t1 y")).unwrap(),
            evaluate_path_word(&PathWord::parse("y t1 x")).unwrap()
        );
    }
}
