//! Enumeration of `Ω`: for every reachable `(q, p)`, a cheapest closed
//! directed walk all of whose prefixes keep `‖q‖_∞ ≤ B`.
//!
//! One Dijkstra run per start node over the layered graph with states
//! `(v, q, p)`; `q` moves by `M χ(a)` and `p` by `h(a)` along arc `a`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rayon::prelude::*;

use crate::embedding::EmbeddedDigraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaEntry {
    pub q: Vec<i64>,
    pub p: u8,
    /// Arc indices of the walk, in order.
    pub walk: Vec<usize>,
    pub start: usize,
    /// Cost in scaled integer units.
    pub cost: u128,
}

/// Layered state space `(v, q, p)` packed into one integer.
#[derive(Debug, Clone, Copy)]
struct Packing {
    dims: usize,
    bound: i64,
    radix: u64,
}

impl Packing {
    fn new(nodes: usize, dims: usize, bound: i64) -> Result<Self> {
        let radix = (2 * bound + 1) as u64;
        let mut total: u64 = 2 * nodes as u64;
        for _ in 0..dims {
            total = total
                .checked_mul(radix)
                .ok_or_else(|| Error::BadParams("layered state space too large to index".into()))?;
        }
        Ok(Packing { dims, bound, radix })
    }

    fn pack(&self, v: usize, q: &[i64], p: u8) -> u64 {
        let mut key = v as u64;
        for &x in q {
            key = key * self.radix + (x + self.bound) as u64;
        }
        key * 2 + p as u64
    }

    fn unpack(&self, mut key: u64, q: &mut [i64]) -> (usize, u8) {
        let p = (key % 2) as u8;
        key /= 2;
        for i in (0..self.dims).rev() {
            q[i] = (key % self.radix) as i64 - self.bound;
            key /= self.radix;
        }
        (key as usize, p)
    }
}

pub struct OmegaInput<'a> {
    pub graph: &'a EmbeddedDigraph,
    pub costs: &'a [u128],
    /// Rows of `M`, one per homology equation.
    pub rows: &'a [Vec<i64>],
    pub parity: &'a [u8],
    pub bound: i64,
}

#[derive(Debug, Clone, Default)]
pub struct OmegaStats {
    pub states_settled: u64,
}

/// `Ω` keyed by `(q, p)`.
pub type OmegaMap = BTreeMap<(Vec<i64>, u8), OmegaEntry>;

/// Per `(q, p)`, the cheapest B-walk; ties go to the lowest start node.
pub fn enumerate_omega(input: &OmegaInput<'_>) -> Result<(OmegaMap, OmegaStats)> {
    let n = input.graph.node_count();
    let dims = input.rows.len();
    let packing = Packing::new(n, dims, input.bound)?;
    let deltas: Vec<Vec<i64>> = (0..input.graph.arc_count())
        .map(|a| input.rows.iter().map(|r| r[a]).collect())
        .collect();
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, arc) in input.graph.arcs().iter().enumerate() {
        out_arcs[arc.tail].push(a);
    }

    let per_start: Vec<(Vec<OmegaEntry>, u64)> = (0..n)
        .into_par_iter()
        .map(|s| run_from(input, &packing, &deltas, &out_arcs, s))
        .collect();

    let mut omega: BTreeMap<(Vec<i64>, u8), OmegaEntry> = BTreeMap::new();
    let mut stats = OmegaStats::default();
    omega.insert(
        (vec![0; dims], 0),
        OmegaEntry {
            q: vec![0; dims],
            p: 0,
            walk: Vec::new(),
            start: 0,
            cost: 0,
        },
    );
    for (entries, settled) in per_start {
        stats.states_settled += settled;
        for e in entries {
            let key = (e.q.clone(), e.p);
            match omega.get(&key) {
                Some(old) if old.cost <= e.cost => {}
                _ => {
                    omega.insert(key, e);
                }
            }
        }
    }
    Ok((omega, stats))
}

fn run_from(
    input: &OmegaInput<'_>,
    packing: &Packing,
    deltas: &[Vec<i64>],
    out_arcs: &[Vec<usize>],
    s: usize,
) -> (Vec<OmegaEntry>, u64) {
    let dims = packing.dims;
    let zero = vec![0i64; dims];
    let source = packing.pack(s, &zero, 0);
    let mut dist: HashMap<u64, u128> = HashMap::new();
    let mut pred: HashMap<u64, (u64, usize)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut closing: BTreeMap<(Vec<i64>, u8), (u128, u64, usize)> = BTreeMap::new();
    dist.insert(source, 0);
    heap.push(Reverse((0u128, source)));
    let mut q = vec![0i64; dims];
    let mut next_q = vec![0i64; dims];
    let mut settled = 0u64;
    while let Some(Reverse((d, key))) = heap.pop() {
        if dist.get(&key).is_some_and(|&best| best < d) {
            continue;
        }
        settled += 1;
        let (v, p) = packing.unpack(key, &mut q);
        for &a in &out_arcs[v] {
            let mut inside = true;
            for i in 0..dims {
                next_q[i] = q[i] + deltas[a][i];
                if next_q[i].abs() > packing.bound {
                    inside = false;
                    break;
                }
            }
            if !inside {
                continue;
            }
            let next_p = p ^ input.parity[a];
            let head = input.graph.arc(a).head;
            let nd = d + input.costs[a];
            if head == s {
                // A closed walk ending here; the source state itself is only
                // ever reached by the empty walk.
                let ck = (next_q.clone(), next_p);
                let better = closing.get(&ck).is_none_or(|&(c, _, _)| nd < c);
                if better {
                    closing.insert(ck, (nd, key, a));
                }
                if next_q == zero && next_p == 0 {
                    continue;
                }
            }
            let nk = packing.pack(head, &next_q, next_p);
            if dist.get(&nk).is_none_or(|&old| nd < old) {
                dist.insert(nk, nd);
                pred.insert(nk, (key, a));
                heap.push(Reverse((nd, nk)));
            }
        }
    }

    let entries = closing
        .into_iter()
        .filter(|((q, p), _)| !(q.iter().all(|&x| x == 0) && *p == 0))
        .map(|((q, p), (cost, last_state, last_arc))| {
            let mut walk = vec![last_arc];
            let mut at = last_state;
            while at != source {
                let (prev, a) = pred[&at];
                walk.push(a);
                at = prev;
            }
            walk.reverse();
            OmegaEntry {
                q,
                p,
                walk,
                start: s,
                cost,
            }
        })
        .collect();
    (entries, settled)
}
