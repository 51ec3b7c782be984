//! The `homcirc-v1` JSON instance format.
//!
//! ```json
//! {
//!   "version": "homcirc-v1",
//!   "nodes": [0, 1],
//!   "arcs": [{"id": 0, "tail": 0, "head": 1, "cost": "3/2"}],
//!   "rotation": {"0": [{"arc": 0, "end": "tail"}], "1": [{"arc": 0, "end": "head"}]},
//!   "signature": {"0": 1},
//!   "y": {"0": 0}
//! }
//! ```
//!
//! Canonical form: keys sorted, arcs sorted by id, costs as normalised
//! `"p/q"` strings (`"p"` for integers), two-space indentation, trailing
//! newline.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::embedding::{ArcId, ArcSpec, EmbeddedDigraph, End, NodeId};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

pub const SCHEMA_VERSION: &str = "homcirc-v1";

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: EmbeddedDigraph,
    /// Initial circulation, indexed like the arcs.
    pub y: Option<Vec<i64>>,
}

impl Instance {
    pub fn new(graph: EmbeddedDigraph, y: Option<Vec<i64>>) -> Self {
        Instance { graph, y }
    }

    /// `y`, or the zero circulation when the file has none.
    pub fn y_or_zero(&self) -> Vec<i64> {
        self.y
            .clone()
            .unwrap_or_else(|| vec![0; self.graph.arc_count()])
    }
}

fn err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::parse(field, message)
}

fn object<'a>(v: &'a Value, field: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = v
        .as_object()
        .ok_or_else(|| err(field, "expected an object"))?;
    if !allowed.is_empty() {
        if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(err(field, format!("unknown field \"{k}\"")));
        }
    }
    Ok(obj)
}

fn require<'a>(obj: &'a Map<String, Value>, field: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| err(field, format!("missing field \"{key}\"")))
}

fn uint(v: &Value, field: &str) -> Result<u32> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| err(field, "expected a non-negative integer id"))
}

fn key_id(k: &str, field: &str) -> Result<u32> {
    k.parse::<u32>().map_err(|_| {
        err(
            field,
            format!("key \"{k}\" is not a non-negative integer id"),
        )
    })
}

fn int(v: &Value, field: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| err(field, "expected an integer"))
}

/// Parses an instance from JSON text.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        err(
            "",
            format!(
                "invalid JSON at line {} column {}: {e}",
                e.line(),
                e.column()
            ),
        )
    })?;
    let top = object(
        &root,
        "",
        &["version", "nodes", "arcs", "rotation", "signature", "y"],
    )?;
    match top.get("version") {
        None => return Err(err("version", "missing field \"version\"")),
        Some(Value::String(s)) if s == SCHEMA_VERSION => {}
        Some(other) => {
            return Err(Error::SchemaVersionMismatch {
                found: other
                    .as_str()
                    .map(str::to_owned)
                    .unwrap_or_else(|| other.to_string()),
            })
        }
    }

    let nodes_v = require(top, "", "nodes")?
        .as_array()
        .ok_or_else(|| err("nodes", "expected an array"))?;
    let nodes = nodes_v
        .iter()
        .enumerate()
        .map(|(i, v)| uint(v, &format!("nodes[{i}]")))
        .collect::<Result<Vec<NodeId>>>()?;

    let arcs_v = require(top, "", "arcs")?
        .as_array()
        .ok_or_else(|| err("arcs", "expected an array"))?;
    let mut arcs = Vec::with_capacity(arcs_v.len());
    for (i, a) in arcs_v.iter().enumerate() {
        let field = format!("arcs[{i}]");
        let obj = object(a, &field, &["id", "tail", "head", "cost"])?;
        let cost_v = require(obj, &field, "cost")?;
        let cost_field = format!("{field}.cost");
        let cost = match cost_v {
            Value::String(s) => parse_rational(s).map_err(|e| err(&cost_field, e.to_string()))?,
            Value::Number(n) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| err(&cost_field, "numeric costs must be integers"))?;
                parse_rational(&i.to_string())?
            }
            _ => return Err(err(&cost_field, "expected \"p/q\" or an integer")),
        };
        arcs.push(ArcSpec {
            id: uint(require(obj, &field, "id")?, &format!("{field}.id"))?,
            tail: uint(require(obj, &field, "tail")?, &format!("{field}.tail"))?,
            head: uint(require(obj, &field, "head")?, &format!("{field}.head"))?,
            cost,
        });
    }

    let rot_v = object(require(top, "", "rotation")?, "rotation", &[])?;
    let mut rotation: BTreeMap<NodeId, Vec<(ArcId, End)>> = BTreeMap::new();
    for (k, list) in rot_v {
        let field = format!("rotation.{k}");
        let node = key_id(k, &field)?;
        let items = list
            .as_array()
            .ok_or_else(|| err(&field, "expected an array of darts"))?;
        let mut darts = Vec::with_capacity(items.len());
        for (i, d) in items.iter().enumerate() {
            let df = format!("{field}[{i}]");
            let obj = object(d, &df, &["arc", "end"])?;
            let arc = uint(require(obj, &df, "arc")?, &format!("{df}.arc"))?;
            let end = match require(obj, &df, "end")?.as_str() {
                Some("tail") => End::Tail,
                Some("head") => End::Head,
                _ => return Err(err(format!("{df}.end"), "expected \"tail\" or \"head\"")),
            };
            darts.push((arc, end));
        }
        rotation.insert(node, darts);
    }

    let sig_v = object(require(top, "", "signature")?, "signature", &[])?;
    let mut signature = BTreeMap::new();
    for (k, v) in sig_v {
        let field = format!("signature.{k}");
        let arc = key_id(k, &field)?;
        let s = int(v, &field)?;
        if s != 1 && s != -1 {
            return Err(err(field, format!("signature must be 1 or -1, found {s}")));
        }
        signature.insert(arc, s as i8);
    }

    let graph = EmbeddedDigraph::new(nodes, arcs, rotation, signature).map_err(|e| match e {
        Error::InvalidEmbedding(m) => {
            let field = if m.contains("rotation") || m.contains("dart") {
                "rotation"
            } else if m.contains("signature") {
                "signature"
            } else {
                "arcs"
            };
            err(field, m)
        }
        other => other,
    })?;

    let y = match top.get("y") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_circulation_value(v, &graph, "y")?),
    };
    Ok(Instance { graph, y })
}

fn parse_circulation_value(v: &Value, graph: &EmbeddedDigraph, field: &str) -> Result<Vec<i64>> {
    let obj = object(v, field, &[])?;
    let mut x = vec![0i64; graph.arc_count()];
    for (k, val) in obj {
        let f = format!("{field}.{k}");
        let id = key_id(k, &f)?;
        let a = graph
            .arc_index(id)
            .ok_or_else(|| err(&f, format!("unknown arc {id}")))?;
        x[a] = int(val, &f)?;
    }
    Ok(x)
}

/// Parses a circulation file `{arc_id: int}`; missing arcs are zero.
pub fn parse_circulation(text: &str, graph: &EmbeddedDigraph) -> Result<Vec<i64>> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        err(
            "",
            format!(
                "invalid JSON at line {} column {}: {e}",
                e.line(),
                e.column()
            ),
        )
    })?;
    parse_circulation_value(&v, graph, "circulation")
}

/// `{arc_id: value}` for every arc.
pub fn circulation_to_json(graph: &EmbeddedDigraph, x: &[i64]) -> Value {
    let map: Map<String, Value> = graph
        .arcs()
        .iter()
        .zip(x)
        .map(|(a, &v)| (a.id.to_string(), json!(v)))
        .collect();
    Value::Object(map)
}

pub fn instance_to_value(instance: &Instance) -> Value {
    let g = &instance.graph;
    let arcs: Vec<Value> = g
        .arcs()
        .iter()
        .map(|a| {
            json!({
                "id": a.id,
                "tail": g.node_id(a.tail),
                "head": g.node_id(a.head),
                "cost": format_rational(&a.cost),
            })
        })
        .collect();
    let rotation: Map<String, Value> = (0..g.node_count())
        .map(|v| {
            let darts: Vec<Value> = g
                .rotation(v)
                .iter()
                .map(|d| json!({"arc": g.arc(d.arc).id, "end": d.end.as_str()}))
                .collect();
            (g.node_id(v).to_string(), Value::Array(darts))
        })
        .collect();
    let signature: Map<String, Value> = g
        .arcs()
        .iter()
        .enumerate()
        .map(|(i, a)| (a.id.to_string(), json!(g.signature(i))))
        .collect();
    let mut top = Map::new();
    top.insert("version".into(), json!(SCHEMA_VERSION));
    top.insert("nodes".into(), json!(g.node_ids()));
    top.insert("arcs".into(), Value::Array(arcs));
    top.insert("rotation".into(), Value::Object(rotation));
    top.insert("signature".into(), Value::Object(signature));
    if let Some(y) = &instance.y {
        top.insert("y".into(), circulation_to_json(g, y));
    }
    Value::Object(top)
}

pub fn to_canonical_json(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_to_value(instance))
        .expect("JSON values always serialise");
    s.push('\n');
    s
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    std::fs::write(path, to_canonical_json(instance))?;
    Ok(())
}
