//! Line-oriented network text format.
//!
//! ```text
//! # comment
//! vertex <id> <input|inner|output>
//! edge <id> <src> <dst> <form-bits>
//! outmap <vertex> <bits>
//! ```
//!
//! Character `i` of a bit string is the coefficient of the `i`-th incoming
//! bit, incoming edges being ordered by declaration.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::f2field::BitVec;

use super::network::{Network, NetworkBuilder, VertexKind};
use super::NetError;

fn parse_bits(s: &str) -> Option<BitVec> {
    if s.is_empty() || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return None;
    }
    Some(BitVec::from_bools(
        &s.bytes().map(|b| b == b'1').collect::<Vec<_>>(),
    ))
}

pub fn parse_network(text: &str) -> Result<Network, NetError> {
    let mut b = NetworkBuilder::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut edge_ids: HashMap<String, ()> = HashMap::new();
    let mut edge_lines = Vec::new();
    let mut outmap_lines: HashMap<usize, usize> = HashMap::new();
    let err = |line: usize, message: String| NetError::Parse { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tok: Vec<&str> = content.split_whitespace().collect();
        match tok[0] {
            "vertex" => {
                let [_, id, kind] = tok[..] else {
                    return Err(err(
                        line,
                        "expected `vertex <id> <input|inner|output>`".into(),
                    ));
                };
                let kind = match kind {
                    "input" => VertexKind::Input,
                    "inner" => VertexKind::Inner,
                    "output" => VertexKind::Output,
                    other => return Err(err(line, format!("unknown vertex kind `{other}`"))),
                };
                if ids.contains_key(id) {
                    return Err(err(line, format!("duplicate vertex `{id}`")));
                }
                ids.insert(id.to_string(), b.vertex(id, kind));
            }
            "edge" => {
                let [_, id, src, dst, bits] = tok[..] else {
                    return Err(err(
                        line,
                        "expected `edge <id> <src> <dst> <form-bits>`".into(),
                    ));
                };
                let lookup = |v: &str| {
                    ids.get(v)
                        .copied()
                        .ok_or_else(|| err(line, format!("unknown vertex `{v}`")))
                };
                let (s, d) = (lookup(src)?, lookup(dst)?);
                let form = parse_bits(bits)
                    .ok_or_else(|| err(line, format!("invalid bit string `{bits}`")))?;
                if edge_ids.insert(id.to_string(), ()).is_some() {
                    return Err(err(line, format!("duplicate edge `{id}`")));
                }
                b.edge(id, s, d, form);
                edge_lines.push(line);
            }
            "outmap" => {
                let [_, v, bits] = tok[..] else {
                    return Err(err(line, "expected `outmap <vertex> <bits>`".into()));
                };
                let v = ids
                    .get(v)
                    .copied()
                    .ok_or_else(|| err(line, format!("unknown vertex `{v}`")))?;
                let map = parse_bits(bits)
                    .ok_or_else(|| err(line, format!("invalid bit string `{bits}`")))?;
                outmap_lines.insert(v, line);
                b.outmap(v, map);
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    let last_line = text.lines().count().max(1);
    b.build().map_err(|e| match e {
        NetError::FormLength { edge, .. } => err(edge_lines[edge], e.to_string()),
        NetError::OutmapLength { vertex, .. } => err(outmap_lines[&vertex], e.to_string()),
        other => err(last_line, other.to_string()),
    })
}

pub fn write_network(net: &Network) -> String {
    let mut s = String::new();
    for v in net.vertices() {
        let _ = writeln!(s, "vertex {} {}", v.name, v.kind.as_str());
    }
    for e in net.edges() {
        let _ = writeln!(
            s,
            "edge {} {} {} {}",
            e.name,
            net.vertices()[e.src].name,
            net.vertices()[e.dst].name,
            e.form
        );
    }
    for &o in net.outputs() {
        let _ = writeln!(
            s,
            "outmap {} {}",
            net.vertices()[o].name,
            net.outmap(o).expect("validated")
        );
    }
    s
}
