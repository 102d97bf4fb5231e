//! Seeded generators for property tests and the acceptance suite.
//!
//! Everything here is driven by a caller-supplied RNG so a failing case can be
//! replayed from its seed.

use crate::navgraph::{CampusGraph, Edge, EdgeKind, Node, NodeKind};
use crate::staffdir::{StaffLocationPayload, MAX_PAYLOAD_LEN};
use crate::tablespec::{ColumnSpec, CompareOp, ConstraintSpec, Datatype, SizeSpec, TableSpec};
use rand::seq::SliceRandom;
use rand::Rng;

// No O, o, l or I, so an identifier never looks like an OCR-damaged number.
const LEAD: &[u8] = b"abcdefghjkmnpqrstuvwxyzABCDEFGHJKLMNPQRSTUVWXYZ";
const TAIL: &[u8] = b"abcdefghijkmnopqrstuvwxyzABCDEFGHJKLMNOPQRSTUVWXYZ0123456789_";

fn pick(rng: &mut impl Rng, set: &[u8]) -> char {
    char::from(set[rng.gen_range(0..set.len())])
}

pub fn identifier(rng: &mut impl Rng, max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len.max(1));
    let mut s = String::with_capacity(len);
    s.push(pick(rng, LEAD));
    for _ in 1..len {
        s.push(pick(rng, TAIL));
    }
    s
}

fn enum_value(rng: &mut impl Rng) -> String {
    let mut v = identifier(rng, 8);
    if rng.gen_bool(0.1) {
        v.insert(1, '\'');
    }
    v
}

fn size_for(rng: &mut impl Rng, datatype: Datatype) -> Option<SizeSpec> {
    match datatype {
        Datatype::Varchar2 => Some(SizeSpec::Length {
            length: rng.gen_range(1..=4000),
        }),
        Datatype::Number => match rng.gen_range(0..4) {
            0 => None,
            1 => Some(SizeSpec::Precision {
                precision: rng.gen_range(1..=38),
                scale: None,
            }),
            _ => {
                let precision = rng.gen_range(1..=38);
                Some(SizeSpec::Precision {
                    precision,
                    scale: Some(rng.gen_range(0..=precision)),
                })
            }
        },
    }
}

/// A random table specification that passes validation.
pub fn table_spec(rng: &mut impl Rng) -> TableSpec {
    let table_name = identifier(rng, 12);
    let ncols = rng.gen_range(1..=12);
    let pk_at = rng.gen_bool(0.7).then(|| rng.gen_range(0..ncols));
    let mut columns: Vec<ColumnSpec> = Vec::with_capacity(ncols);
    while columns.len() < ncols {
        let name = identifier(rng, 10);
        if columns.iter().any(|c| c.name.eq_ignore_ascii_case(&name)) {
            continue;
        }
        let datatype = if rng.gen_bool(0.5) {
            Datatype::Number
        } else {
            Datatype::Varchar2
        };
        let constraint = if pk_at == Some(columns.len()) {
            ConstraintSpec::PrimaryKey
        } else {
            match rng.gen_range(0..6) {
                0 => ConstraintSpec::Unique,
                1 => ConstraintSpec::CheckComparison {
                    op: *CompareOp::ALL.choose(rng).unwrap(),
                    literal: f64::from(rng.gen_range(-100_000..100_000)) / 100.0,
                },
                2 => ConstraintSpec::CheckEnum {
                    values: (0..rng.gen_range(1..=4)).map(|_| enum_value(rng)).collect(),
                },
                _ => ConstraintSpec::None,
            }
        };
        let size = size_for(rng, datatype);
        columns.push(ColumnSpec {
            name,
            datatype,
            size,
            constraint,
        });
    }
    TableSpec {
        table_name,
        columns,
    }
}

fn graphic_field(rng: &mut impl Rng, set: &[u8], max: usize) -> String {
    let len = rng.gen_range(1..=max);
    (0..len).map(|_| pick(rng, set)).collect()
}

/// A random payload whose encoding fits within the payload length limit.
pub fn staff_payload(rng: &mut impl Rng) -> StaffLocationPayload {
    const GRAPHIC: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_.:/#!~";
    loop {
        let building = graphic_field(rng, GRAPHIC, 8);
        let node_id = graphic_field(rng, GRAPHIC, 10);
        let staff_id = rng
            .gen_bool(0.8)
            .then(|| graphic_field(rng, GRAPHIC, 12));
        let p = StaffLocationPayload {
            building,
            floor: rng.gen_range(-3..=40),
            node_id,
            staff_id,
        };
        if crate::staffdir::encode_payload(&p).is_ok_and(|s| s.len() <= MAX_PAYLOAD_LEN) {
            return p;
        }
    }
}

/// A random single-floor graph with `n` nodes named `A`, `B`, ... and edge
/// lengths drawn from a small integer set so that ties are common.
pub fn small_graph(rng: &mut impl Rng, n: usize) -> CampusGraph {
    let nodes: Vec<Node> = (0..n)
        .map(|i| Node {
            id: char::from(b'A' + i as u8).to_string(),
            kind: NodeKind::Junction,
            building: "T".into(),
            floor: 0,
            x: rng.gen_range(-50.0..50.0),
            y: rng.gen_range(-50.0..50.0),
            label: format!("point {i}"),
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.45) {
                edges.push(Edge {
                    a: nodes[i].id.clone(),
                    b: nodes[j].id.clone(),
                    length: f64::from(rng.gen_range(1..=6)),
                    kind: EdgeKind::Corridor,
                });
            }
        }
    }
    CampusGraph::new(nodes, edges).expect("generated graph is valid")
}
