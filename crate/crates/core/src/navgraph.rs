//! Campus walk graph, shortest routes and turn-by-turn instructions.
//!
//! Coordinates are floor-local metres with +x east and +y north. Bearings are
//! measured clockwise from north, so a positive change of bearing is a right
//! turn.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::path::Path;
use thiserror::Error;

/// Bearing change at or beyond which a junction becomes a turn.
pub const TURN_THRESHOLD_DEG: f64 = 45.0;

const LENGTH_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NodeKind {
    Entrance,
    Junction,
    Desk,
    Stairs,
    Lift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EdgeKind {
    Corridor,
    Door,
    Stairs,
    Lift,
}

impl EdgeKind {
    pub fn changes_floor(self) -> bool {
        matches!(self, EdgeKind::Stairs | EdgeKind::Lift)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub building: String,
    pub floor: i32,
    pub x: f64,
    pub y: f64,
    pub label: String,
}

/// Undirected edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub length: f64,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepAction {
    Start,
    Continue,
    TurnLeft,
    TurnRight,
    TakeStairsUp,
    TakeStairsDown,
    TakeLift,
    Arrive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteStep {
    pub at_node: String,
    pub action: StepAction,
    /// Metres to the next step; 0 for `ARRIVE`.
    pub distance_m: f64,
    pub utterance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub nodes: Vec<String>,
    pub length_m: f64,
}

#[derive(Debug, Error)]
pub enum NavError {
    #[error("cannot read graph file: {0}")]
    Io(#[from] std::io::Error),
    #[error("graph file does not parse: {0}")]
    ParseError(String),
    #[error("duplicate node id {0}")]
    DuplicateNode(String),
    #[error("node {0} has a non-finite coordinate")]
    NonFiniteCoordinate(String),
    #[error("edge {a}-{b} references missing node {missing}")]
    DanglingEdge {
        a: String,
        b: String,
        missing: String,
    },
    #[error("edge {a}-{b}: {kind:?} edge joins floors {floor_a} and {floor_b}")]
    BadEdgeFloors {
        a: String,
        b: String,
        kind: EdgeKind,
        floor_a: i32,
        floor_b: i32,
    },
    #[error("edge {a}-{b} has non-positive length {length}")]
    NonPositiveLength { a: String, b: String, length: f64 },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("no route from {from} to {to}")]
    Unreachable { from: String, to: String },
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

/// Validated, immutable walk graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CampusGraph {
    nodes: BTreeMap<String, Node>,
    edges: Vec<Edge>,
    /// Neighbour id → index of the shortest edge to it.
    adjacency: BTreeMap<String, BTreeMap<String, usize>>,
}

impl CampusGraph {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, NavError> {
        let mut by_id = BTreeMap::new();
        for n in nodes {
            if !(n.x.is_finite() && n.y.is_finite()) {
                return Err(NavError::NonFiniteCoordinate(n.id));
            }
            if by_id.contains_key(&n.id) {
                return Err(NavError::DuplicateNode(n.id));
            }
            by_id.insert(n.id.clone(), n);
        }

        let mut adjacency: BTreeMap<String, BTreeMap<String, usize>> =
            by_id.keys().map(|k| (k.clone(), BTreeMap::new())).collect();
        for (i, e) in edges.iter().enumerate() {
            let endpoint = |id: &String| {
                by_id.get(id).ok_or_else(|| NavError::DanglingEdge {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    missing: id.clone(),
                })
            };
            let (na, nb) = (endpoint(&e.a)?, endpoint(&e.b)?);
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(NavError::NonPositiveLength {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    length: e.length,
                });
            }
            if e.kind.changes_floor() == (na.floor == nb.floor) {
                return Err(NavError::BadEdgeFloors {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    kind: e.kind,
                    floor_a: na.floor,
                    floor_b: nb.floor,
                });
            }
            for (from, to) in [(&e.a, &e.b), (&e.b, &e.a)] {
                let slot = adjacency.get_mut(from).unwrap();
                match slot.get(to) {
                    Some(&j) if edges[j].length <= e.length => {}
                    _ => {
                        slot.insert(to.clone(), i);
                    }
                }
            }
        }
        Ok(CampusGraph {
            nodes: by_id,
            edges,
            adjacency,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, NavError> {
        let file: GraphFile =
            serde_json::from_str(s).map_err(|e| NavError::ParseError(e.to_string()))?;
        CampusGraph::new(file.nodes, file.edges)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GraphFile {
            nodes: self.nodes.values().cloned().collect(),
            edges: self.edges.clone(),
        })
        .expect("graph serializes")
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Shortest edge joining `a` and `b`, if adjacent.
    pub fn edge_between(&self, a: &str, b: &str) -> Option<&Edge> {
        self.adjacency
            .get(a)
            .and_then(|n| n.get(b))
            .map(|&i| &self.edges[i])
    }

    /// Neighbours of `id` with the shortest edge to each, in id order.
    pub fn neighbours<'a>(&'a self, id: &str) -> impl Iterator<Item = (&'a str, &'a Edge)> + 'a {
        self.adjacency
            .get(id)
            .into_iter()
            .flat_map(move |n| n.iter().map(move |(to, &i)| (to.as_str(), &self.edges[i])))
    }

    fn require(&self, id: &str) -> Result<&Node, NavError> {
        self.nodes
            .get(id)
            .ok_or_else(|| NavError::UnknownNode(id.to_owned()))
    }

    /// Checks that `path` is non-empty and walks along edges of the graph;
    /// returns its length.
    pub fn path_length(&self, path: &[String]) -> Result<f64, NavError> {
        let first = path
            .first()
            .ok_or_else(|| NavError::InvalidPath("empty path".into()))?;
        self.require(first)?;
        let mut total = 0.0;
        for w in path.windows(2) {
            self.require(&w[1])?;
            let e = self.edge_between(&w[0], &w[1]).ok_or_else(|| {
                NavError::InvalidPath(format!("{} and {} are not adjacent", w[0], w[1]))
            })?;
            total += e.length;
        }
        Ok(total)
    }
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<CampusGraph, NavError> {
    CampusGraph::from_json_str(&std::fs::read_to_string(path)?)
}

/// Dijkstra label: total length, then the node-id sequence as tie-breaker.
#[derive(Debug, Clone)]
struct Label {
    dist: f64,
    path: Vec<String>,
}

impl Label {
    fn cmp_key(&self, other: &Label) -> Ordering {
        if (self.dist - other.dist).abs() <= LENGTH_EPSILON * self.dist.max(other.dist).max(1.0) {
            self.path.cmp(&other.path)
        } else {
            self.dist.total_cmp(&other.dist)
        }
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == Ordering::Equal
    }
}
impl Eq for Label {}
impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Label {
    // Reversed for a min-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cmp_key(self)
    }
}

/// Minimum-length route; among equal lengths the lexicographically smallest
/// node-id sequence wins.
pub fn shortest_route(g: &CampusGraph, from: &str, to: &str) -> Result<Route, NavError> {
    g.require(from)?;
    g.require(to)?;

    let mut best: BTreeMap<&str, Label> = BTreeMap::new();
    let mut settled: BTreeMap<&str, bool> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    let start = Label {
        dist: 0.0,
        path: vec![from.to_owned()],
    };
    best.insert(from, start.clone());
    heap.push(start);

    while let Some(label) = heap.pop() {
        let here = label.path.last().unwrap().clone();
        let here = g.nodes.get_key_value(&here).unwrap().0.as_str();
        if settled.get(here).copied().unwrap_or(false) {
            continue;
        }
        if best.get(here).is_some_and(|b| b.cmp_key(&label) == Ordering::Less) {
            continue;
        }
        settled.insert(here, true);
        if here == to {
            return Ok(Route {
                nodes: label.path,
                length_m: label.dist,
            });
        }
        for (next, edge) in g.neighbours(here) {
            if settled.get(next).copied().unwrap_or(false) {
                continue;
            }
            let mut path = label.path.clone();
            path.push(next.to_owned());
            let candidate = Label {
                dist: label.dist + edge.length,
                path,
            };
            if best
                .get(next)
                .map_or(true, |b| candidate.cmp_key(b) == Ordering::Less)
            {
                best.insert(next, candidate.clone());
                heap.push(candidate);
            }
        }
    }
    Err(NavError::Unreachable {
        from: from.to_owned(),
        to: to.to_owned(),
    })
}

/// Bearing of the vector from `a` to `b`, degrees clockwise from north.
fn bearing(a: &Node, b: &Node) -> Option<f64> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    if dx == 0.0 && dy == 0.0 {
        return None;
    }
    Some(dx.atan2(dy).to_degrees())
}

/// Signed change of heading in (−180, 180].
pub fn bearing_change(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

fn metres(d: f64) -> String {
    let m = d.round() as i64;
    if m == 1 {
        "1 meter".to_owned()
    } else {
        format!("{m} meters")
    }
}

fn utterance(action: StepAction, here: &Node, next: Option<&Node>, distance: f64) -> String {
    let floor = next.map_or(here.floor, |n| n.floor);
    match action {
        StepAction::Start => format!("Start at {}. Walk {}.", here.label, metres(distance)),
        StepAction::Continue => format!("Continue straight for {}.", metres(distance)),
        StepAction::TurnLeft => format!(
            "At {}, turn left and walk {}.",
            here.label,
            metres(distance)
        ),
        StepAction::TurnRight => format!(
            "At {}, turn right and walk {}.",
            here.label,
            metres(distance)
        ),
        StepAction::TakeStairsUp => {
            format!("At {}, take the stairs up to floor {floor}.", here.label)
        }
        StepAction::TakeStairsDown => {
            format!("At {}, take the stairs down to floor {floor}.", here.label)
        }
        StepAction::TakeLift => format!("At {}, take the lift to floor {floor}.", here.label),
        StepAction::Arrive => format!("You have arrived at {}.", here.label),
    }
}

fn floor_change_action(edge: &Edge, from: &Node, to: &Node) -> StepAction {
    match edge.kind {
        EdgeKind::Lift => StepAction::TakeLift,
        _ if to.floor > from.floor => StepAction::TakeStairsUp,
        _ => StepAction::TakeStairsDown,
    }
}

/// Spoken-style steps for a path.
///
/// The first step is `START` and the last `ARRIVE`; a one-node path yields only
/// `ARRIVE`. A leading stairs or lift edge gets its own step after `START`.
/// After a floor change the first move is always `CONTINUE`.
pub fn make_instructions(g: &CampusGraph, path: &[String]) -> Result<Vec<RouteStep>, NavError> {
    g.path_length(path)?;
    let node = |i: usize| g.node(&path[i]).unwrap();
    let edge = |i: usize| g.edge_between(&path[i], &path[i + 1]).unwrap();
    let last = path.len() - 1;
    let mut steps = Vec::with_capacity(path.len() + 1);
    let mut push = |at: usize, action: StepAction, distance_m: f64| {
        let next = (at < last).then(|| node(at + 1));
        steps.push(RouteStep {
            at_node: path[at].clone(),
            action,
            distance_m,
            utterance: utterance(action, node(at), next, distance_m),
        });
    };

    for i in 0..last {
        let out = edge(i);
        if i == 0 {
            if out.kind.changes_floor() {
                push(0, StepAction::Start, 0.0);
                push(0, floor_change_action(out, node(0), node(1)), out.length);
            } else {
                push(0, StepAction::Start, out.length);
            }
            continue;
        }
        let incoming = edge(i - 1);
        let action = if out.kind.changes_floor() {
            floor_change_action(out, node(i), node(i + 1))
        } else if incoming.kind.changes_floor() {
            StepAction::Continue
        } else {
            match (bearing(node(i - 1), node(i)), bearing(node(i), node(i + 1))) {
                (Some(b_in), Some(b_out)) => {
                    // Rounded so that a geometric 45° is not lost to atan2 noise.
                    let delta = (bearing_change(b_in, b_out) * 1e9).round() / 1e9;
                    if delta >= TURN_THRESHOLD_DEG {
                        StepAction::TurnRight
                    } else if delta <= -TURN_THRESHOLD_DEG {
                        StepAction::TurnLeft
                    } else {
                        StepAction::Continue
                    }
                }
                _ => StepAction::Continue,
            }
        };
        push(i, action, out.length);
    }
    push(last, StepAction::Arrive, 0.0);
    Ok(steps)
}

/// Repositions a walker who scanned `scanned` while following `route`: the
/// remaining suffix if the node is on the route, otherwise a fresh shortest
/// route to the same destination.
pub fn re_localize(
    g: &CampusGraph,
    route: &[String],
    scanned: &str,
) -> Result<Vec<String>, NavError> {
    g.require(scanned)?;
    g.path_length(route)?;
    if let Some(i) = route.iter().position(|n| n == scanned) {
        return Ok(route[i..].to_vec());
    }
    Ok(shortest_route(g, scanned, route.last().unwrap())?.nodes)
}
