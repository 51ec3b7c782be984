//! Cellularly embedded digraphs given by an embedding scheme over darts,
//! together with facial walks, Euler genus and characteristic flows.
//!
//! Every arc contributes two darts: its `Tail` end (at the tail node) and its
//! `Head` end (at the head node). A loop therefore has two distinct darts at
//! the same node, which keeps rotations well defined for loops and parallel
//! arcs.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tree::{EdgeRef, SpanningTree};

pub type NodeId = u32;
pub type ArcId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn as_str(self) -> &'static str {
        match self {
            End::Tail => "tail",
            End::Head => "head",
        }
    }
}

/// An arc end. `arc` is the arc *index* inside its graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub arc: usize,
    pub end: End,
}

impl Dart {
    pub fn tail(arc: usize) -> Self {
        Dart {
            arc,
            end: End::Tail,
        }
    }

    pub fn head(arc: usize) -> Self {
        Dart {
            arc,
            end: End::Head,
        }
    }

    pub fn index(self) -> usize {
        2 * self.arc + (self.end == End::Head) as usize
    }

    pub fn from_index(index: usize) -> Self {
        Dart {
            arc: index / 2,
            end: if index.is_multiple_of(2) {
                End::Tail
            } else {
                End::Head
            },
        }
    }

    pub fn opposite(self) -> Self {
        Dart {
            arc: self.arc,
            end: match self.end {
                End::Tail => End::Head,
                End::Head => End::Tail,
            },
        }
    }

    /// Leaving through the tail dart traverses the arc forwards.
    pub fn is_forward(self) -> bool {
        self.end == End::Tail
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub id: ArcId,
    pub tail: usize,
    pub head: usize,
    pub cost: Rational,
}

/// Arc description by external ids, used when building from files.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSpec {
    pub id: ArcId,
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: Rational,
}

/// A digraph with rotation system over darts, edge signature and arc costs.
///
/// Nodes and arcs are stored sorted by id; indices are positions in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedDigraph {
    node_ids: Vec<NodeId>,
    arcs: Vec<Arc>,
    rotation: Vec<Vec<Dart>>,
    signature: Vec<i8>,
    dart_pos: Vec<(usize, usize)>,
}

impl EmbeddedDigraph {
    /// Builds from external ids. Rotation and signature are keyed by id.
    pub fn new(
        nodes: Vec<NodeId>,
        arcs: Vec<ArcSpec>,
        rotation: BTreeMap<NodeId, Vec<(ArcId, End)>>,
        signature: BTreeMap<ArcId, i8>,
    ) -> Result<Self> {
        let mut node_ids = nodes;
        node_ids.sort_unstable();
        if let Some(w) = node_ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidEmbedding(format!(
                "duplicate node id {}",
                w[0]
            )));
        }
        let mut arcs = arcs;
        arcs.sort_by_key(|a| a.id);
        if let Some(w) = arcs.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidEmbedding(format!(
                "duplicate arc id {}",
                w[0].id
            )));
        }
        let node_index = |id: NodeId, what: &str| {
            node_ids
                .binary_search(&id)
                .map_err(|_| Error::InvalidEmbedding(format!("{what} refers to unknown node {id}")))
        };
        let mut indexed = Vec::with_capacity(arcs.len());
        for a in &arcs {
            indexed.push(Arc {
                id: a.id,
                tail: node_index(a.tail, &format!("arc {}", a.id))?,
                head: node_index(a.head, &format!("arc {}", a.id))?,
                cost: a.cost.clone(),
            });
        }
        let arc_index = |id: ArcId| {
            indexed
                .binary_search_by_key(&id, |a| a.id)
                .map_err(|_| Error::InvalidEmbedding(format!("unknown arc {id}")))
        };
        let mut rot = vec![Vec::new(); node_ids.len()];
        for (node, darts) in &rotation {
            let v = node_index(*node, "rotation")?;
            for &(arc, end) in darts {
                rot[v].push(Dart {
                    arc: arc_index(arc)?,
                    end,
                });
            }
        }
        let mut sig = vec![0i8; indexed.len()];
        for (arc, s) in &signature {
            sig[arc_index(*arc)?] = *s;
        }
        Self::from_parts(node_ids, indexed, rot, sig)
    }

    /// Builds with ids equal to indices: nodes `0..n`, arcs `0..arcs.len()`.
    pub fn from_indices(
        nodes: usize,
        arcs: Vec<(usize, usize, Rational)>,
        rotation: Vec<Vec<Dart>>,
        signature: Vec<i8>,
    ) -> Result<Self> {
        let arcs = arcs
            .into_iter()
            .enumerate()
            .map(|(i, (tail, head, cost))| Arc {
                id: i as ArcId,
                tail,
                head,
                cost,
            })
            .collect();
        Self::from_parts((0..nodes as NodeId).collect(), arcs, rotation, signature)
    }

    fn from_parts(
        node_ids: Vec<NodeId>,
        arcs: Vec<Arc>,
        rotation: Vec<Vec<Dart>>,
        signature: Vec<i8>,
    ) -> Result<Self> {
        let n = node_ids.len();
        if n == 0 {
            return Err(Error::InvalidEmbedding("graph has no nodes".into()));
        }
        if rotation.len() != n {
            return Err(Error::InvalidEmbedding(
                "rotation must list every node".into(),
            ));
        }
        if signature.len() != arcs.len() {
            return Err(Error::InvalidEmbedding(
                "signature must cover every arc".into(),
            ));
        }
        let describe = |d: Dart| format!("(arc {}, {})", arcs[d.arc].id, d.end.as_str());
        for (i, a) in arcs.iter().enumerate() {
            if a.tail >= n || a.head >= n {
                return Err(Error::InvalidEmbedding(format!(
                    "arc {} has an unknown endpoint",
                    a.id
                )));
            }
            if a.cost.is_negative() {
                return Err(Error::InvalidEmbedding(format!(
                    "arc {} has negative cost",
                    a.id
                )));
            }
            if signature[i] != 1 && signature[i] != -1 {
                return Err(Error::InvalidEmbedding(format!(
                    "signature of arc {} must be 1 or -1",
                    a.id
                )));
            }
        }
        let mut dart_pos = vec![(usize::MAX, usize::MAX); 2 * arcs.len()];
        for (v, darts) in rotation.iter().enumerate() {
            for (pos, &d) in darts.iter().enumerate() {
                if d.arc >= arcs.len() {
                    return Err(Error::InvalidEmbedding(format!(
                        "rotation at node {} names an unknown arc",
                        node_ids[v]
                    )));
                }
                let at = match d.end {
                    End::Tail => arcs[d.arc].tail,
                    End::Head => arcs[d.arc].head,
                };
                if at != v {
                    return Err(Error::InvalidEmbedding(format!(
                        "dart {} is listed at node {} but belongs to node {}",
                        describe(d),
                        node_ids[v],
                        node_ids[at]
                    )));
                }
                if dart_pos[d.index()].0 != usize::MAX {
                    return Err(Error::InvalidEmbedding(format!(
                        "dart {} listed twice",
                        describe(d)
                    )));
                }
                dart_pos[d.index()] = (v, pos);
            }
        }
        if let Some(i) = dart_pos.iter().position(|p| p.0 == usize::MAX) {
            return Err(Error::InvalidEmbedding(format!(
                "rotation omits dart {}",
                describe(Dart::from_index(i))
            )));
        }
        let graph = EmbeddedDigraph {
            node_ids,
            arcs,
            rotation,
            signature,
            dart_pos,
        };
        if !graph.spanning_tree(None).spans() {
            return Err(Error::InvalidEmbedding(
                "underlying graph is not connected".into(),
            ));
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    pub fn node_id(&self, v: usize) -> NodeId {
        self.node_ids[v]
    }

    pub fn node_index(&self, id: NodeId) -> Option<usize> {
        self.node_ids.binary_search(&id).ok()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> &Arc {
        &self.arcs[a]
    }

    pub fn arc_index(&self, id: ArcId) -> Option<usize> {
        self.arcs.binary_search_by_key(&id, |a| a.id).ok()
    }

    pub fn rotation(&self, v: usize) -> &[Dart] {
        &self.rotation[v]
    }

    pub fn signature(&self, a: usize) -> i8 {
        self.signature[a]
    }

    pub fn signatures(&self) -> &[i8] {
        &self.signature
    }

    pub fn costs(&self) -> Vec<Rational> {
        self.arcs.iter().map(|a| a.cost.clone()).collect()
    }

    pub fn dart_node(&self, d: Dart) -> usize {
        match d.end {
            End::Tail => self.arcs[d.arc].tail,
            End::Head => self.arcs[d.arc].head,
        }
    }

    /// Next dart in the cyclic rotation at the dart's node.
    pub fn succ(&self, d: Dart) -> Dart {
        let (v, pos) = self.dart_pos[d.index()];
        let rot = &self.rotation[v];
        rot[(pos + 1) % rot.len()]
    }

    pub fn pred(&self, d: Dart) -> Dart {
        let (v, pos) = self.dart_pos[d.index()];
        let rot = &self.rotation[v];
        rot[(pos + rot.len() - 1) % rot.len()]
    }

    pub(crate) fn edge_refs(&self) -> Vec<EdgeRef> {
        self.arcs
            .iter()
            .enumerate()
            .map(|(i, a)| EdgeRef {
                id: i,
                u: a.tail,
                v: a.head,
            })
            .collect()
    }

    pub(crate) fn spanning_tree(&self, rng: Option<&mut rand_chacha::ChaCha8Rng>) -> SpanningTree {
        SpanningTree::bfs(self.node_count(), &self.edge_refs(), |_| true, 0, rng)
    }

    /// Replaces the costs, keeping the embedding.
    pub fn with_costs(&self, costs: &[Rational]) -> Result<Self> {
        if costs.len() != self.arc_count() {
            return Err(Error::DimensionMismatch {
                expected: self.arc_count(),
                got: costs.len(),
            });
        }
        if costs.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidInput("negative arc cost".into()));
        }
        let mut g = self.clone();
        for (a, c) in g.arcs.iter_mut().zip(costs) {
            a.cost = c.clone();
        }
        Ok(g)
    }

    /// Reverses the direction of every arc with `flip[a]`; the embedding (and
    /// therefore every face) is unchanged, only dart labels swap.
    pub fn with_reversed_arcs(&self, flip: &[bool]) -> Self {
        let mut g = self.clone();
        for (a, arc) in g.arcs.iter_mut().enumerate() {
            if flip[a] {
                std::mem::swap(&mut arc.tail, &mut arc.head);
            }
        }
        for darts in &mut g.rotation {
            for d in darts.iter_mut() {
                if flip[d.arc] {
                    *d = d.opposite();
                }
            }
        }
        g.reindex();
        g
    }

    /// Flips the local orientation at `v`: reverses its rotation and negates
    /// the signature of every non-loop edge at `v`.
    pub fn switched_at(&self, v: usize) -> Self {
        let mut g = self.clone();
        g.rotation[v].reverse();
        for (a, arc) in g.arcs.iter().enumerate() {
            if (arc.tail == v) != (arc.head == v) {
                g.signature[a] = -g.signature[a];
            }
        }
        g.reindex();
        g
    }

    /// Cyclically shifts the rotation sequence at `v` by `k` positions.
    pub fn with_shifted_rotation(&self, v: usize, k: usize) -> Self {
        let mut g = self.clone();
        let len = g.rotation[v].len();
        if len > 0 {
            g.rotation[v].rotate_left(k % len);
        }
        g.reindex();
        g
    }

    /// Same embedding with new external ids (not necessarily sorted).
    pub fn relabeled(&self, node_ids: &[NodeId], arc_ids: &[ArcId]) -> Result<Self> {
        let arcs = self
            .arcs
            .iter()
            .enumerate()
            .map(|(i, a)| ArcSpec {
                id: arc_ids[i],
                tail: node_ids[a.tail],
                head: node_ids[a.head],
                cost: a.cost.clone(),
            })
            .collect();
        let rotation = self
            .rotation
            .iter()
            .enumerate()
            .map(|(v, darts)| {
                (
                    node_ids[v],
                    darts.iter().map(|d| (arc_ids[d.arc], d.end)).collect(),
                )
            })
            .collect();
        let signature = (0..self.arc_count())
            .map(|a| (arc_ids[a], self.signature[a]))
            .collect();
        Self::new(node_ids.to_vec(), arcs, rotation, signature)
    }

    fn reindex(&mut self) {
        for (v, darts) in self.rotation.iter().enumerate() {
            for (pos, d) in darts.iter().enumerate() {
                self.dart_pos[d.index()] = (v, pos);
            }
        }
    }
}

/// One traversal of a walk: leave through `dart`, cross its edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub dart: Dart,
    /// Product of signatures over this and all earlier steps.
    pub sign_after: i8,
}

impl Step {
    pub fn forward(&self) -> bool {
        self.dart.is_forward()
    }
}

/// A walk in the underlying undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl Walk {
    /// Builds a walk leaving through each dart in turn; consecutive darts must
    /// be incident.
    pub fn from_darts(graph: &EmbeddedDigraph, start: usize, darts: &[Dart]) -> Result<Self> {
        let mut at = start;
        let mut sign = 1i8;
        let mut steps = Vec::with_capacity(darts.len());
        for &d in darts {
            if graph.dart_node(d) != at {
                return Err(Error::InvalidInput(format!(
                    "walk step through arc {} does not start at node {}",
                    graph.arc(d.arc).id,
                    graph.node_id(at)
                )));
            }
            sign *= graph.signature(d.arc);
            steps.push(Step {
                dart: d,
                sign_after: sign,
            });
            at = graph.dart_node(d.opposite());
        }
        Ok(Walk { start, steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self, graph: &EmbeddedDigraph) -> usize {
        self.steps
            .last()
            .map(|s| graph.dart_node(s.dart.opposite()))
            .unwrap_or(self.start)
    }

    pub fn is_closed(&self, graph: &EmbeddedDigraph) -> bool {
        self.end(graph) == self.start
    }

    /// Signature product over all traversed edges.
    pub fn sign(&self) -> i8 {
        self.steps.last().map(|s| s.sign_after).unwrap_or(1)
    }

    pub fn is_two_sided(&self) -> bool {
        self.sign() == 1
    }

    /// Node sequence `v1, v2, ..., v_{k+1}`.
    pub fn nodes(&self, graph: &EmbeddedDigraph) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(self.start);
        out.extend(
            self.steps
                .iter()
                .map(|s| graph.dart_node(s.dart.opposite())),
        );
        out
    }
}

/// Net number of forward minus backward traversals of each arc.
pub fn characteristic_flow(graph: &EmbeddedDigraph, walk: &Walk) -> Vec<i64> {
    let mut flow = vec![0i64; graph.arc_count()];
    for s in &walk.steps {
        flow[s.dart.arc] += if s.forward() { 1 } else { -1 };
    }
    flow
}

/// Where an edge is used by a facial walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence {
    pub face: usize,
    pub pos: usize,
    /// The walk crosses the arc from tail to head.
    pub forward: bool,
}

/// The facial walks of an embedding, one canonical representative per face.
#[derive(Debug, Clone)]
pub struct FacialWalkSet {
    pub walks: Vec<Walk>,
    /// Per arc, its two occurrences sorted by `(face, pos)`.
    pub occurrences: Vec<[Occurrence; 2]>,
}

impl FacialWalkSet {
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    /// The slot `(walk, position)` at which `dart` is the departure dart.
    pub fn slot(&self, dart: Dart) -> (usize, usize) {
        let occ = self.occurrences[dart.arc]
            .iter()
            .find(|o| o.forward == dart.is_forward())
            .or_else(|| self.occurrences[dart.arc].first())
            .expect("two occurrences per arc");
        (occ.face, occ.pos)
    }
}

type CanonKey = Vec<(usize, usize, bool)>;

/// Traces all facial walks.
///
/// The tracing state is `(dart, parity)`: leave through `dart`, having crossed
/// an even (`0`) or odd (`1`) number of negative edges so far. On arrival the
/// next dart is the rotation successor of the arrival dart if the parity is
/// even and the predecessor if odd. Each face yields two orbits of this map
/// (the walk and its reverse); one canonical representative is kept, the
/// lexicographically least `(node, arc, direction)` sequence over all cyclic
/// shifts of both orbits.
pub fn trace_facial_walks(graph: &EmbeddedDigraph) -> FacialWalkSet {
    let darts = 2 * graph.arc_count();
    let state = |d: Dart, p: u8| d.index() * 2 + p as usize;
    let neg = |a: usize| (graph.signature(a) < 0) as u8;

    let mut orbit_of = vec![usize::MAX; 2 * darts];
    let mut orbits: Vec<Vec<(Dart, u8)>> = Vec::new();
    for s in 0..2 * darts {
        if orbit_of[s] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let (mut d, mut p) = (Dart::from_index(s / 2), (s % 2) as u8);
        let mut orbit = Vec::new();
        while orbit_of[state(d, p)] == usize::MAX {
            orbit_of[state(d, p)] = id;
            orbit.push((d, p));
            let arrival = d.opposite();
            p ^= neg(d.arc);
            d = if p == 0 {
                graph.succ(arrival)
            } else {
                graph.pred(arrival)
            };
        }
        orbits.push(orbit);
    }

    // Pair each orbit with its reverse.
    let mut parent: Vec<usize> = (0..orbits.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, orbit) in orbits.iter().enumerate() {
        let (d, p) = orbit[0];
        let partner = orbit_of[state(d.opposite(), 1 ^ p ^ neg(d.arc))];
        let (a, b) = (find(&mut parent, i), find(&mut parent, partner));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..orbits.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }

    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let mut faces: Vec<(CanonKey, Vec<Dart>)> = coherent_orbits(graph, &orbits, &groups)
        .into_iter()
        .map(|o| least_shift(graph, &orbits[o]))
        .collect();
    faces.sort();

    let mut walks = Vec::with_capacity(faces.len());
    let mut occ: Vec<Vec<Occurrence>> = vec![Vec::with_capacity(2); graph.arc_count()];
    for (f, (_, seq)) in faces.into_iter().enumerate() {
        let start = graph.dart_node(seq[0]);
        let walk = Walk::from_darts(graph, start, &seq).expect("traced walks are incident");
        for (pos, s) in walk.steps.iter().enumerate() {
            occ[s.dart.arc].push(Occurrence {
                face: f,
                pos,
                forward: s.forward(),
            });
        }
        walks.push(walk);
    }
    let occurrences = occ
        .into_iter()
        .map(|mut v| {
            v.sort();
            assert_eq!(
                v.len(),
                2,
                "every edge is used exactly twice by the facial walks"
            );
            [v[0], v[1]]
        })
        .collect();
    FacialWalkSet { walks, occurrences }
}

fn least_shift(graph: &EmbeddedDigraph, orbit: &[(Dart, u8)]) -> (CanonKey, Vec<Dart>) {
    let seq: Vec<Dart> = orbit.iter().map(|&(d, _)| d).collect();
    let mut best: Option<(CanonKey, Vec<Dart>)> = None;
    for shift in 0..seq.len() {
        let mut rotated = seq.clone();
        rotated.rotate_left(shift);
        let key: CanonKey = rotated
            .iter()
            .map(|&d| (graph.dart_node(d), d.arc, !d.is_forward()))
            .collect();
        if best
            .as_ref()
            .is_none_or(|(k, _)| key.cmp(k) == Ordering::Less)
        {
            best = Some((key, rotated));
        }
    }
    best.expect("orbits are non-empty")
}

/// Chooses a traversal direction per face so that, after switching along a
/// spanning tree of the face adjacency, tree edges are used in opposite
/// directions by their two faces. On orientable surfaces every edge then is.
/// The face holding the least canonical walk keeps its least orientation.
fn coherent_orbits(
    graph: &EmbeddedDigraph,
    orbits: &[Vec<(Dart, u8)>],
    groups: &[Vec<usize>],
) -> Vec<usize> {
    let mut members: Vec<Vec<usize>> = groups.to_vec();
    for m in members.iter_mut() {
        m.sort_by_key(|&o| least_shift(graph, &orbits[o]).0);
    }
    let mut uses: Vec<Vec<(usize, bool)>> = vec![Vec::with_capacity(2); graph.arc_count()];
    for (g, m) in members.iter().enumerate() {
        for &(d, _) in &orbits[m[0]] {
            uses[d.arc].push((g, d.is_forward()));
        }
    }
    let edges: Vec<EdgeRef> = uses
        .iter()
        .enumerate()
        .map(|(id, u)| EdgeRef {
            id,
            u: u[0].0,
            v: u[1].0,
        })
        .collect();
    let sign: Vec<i8> = uses
        .iter()
        .map(|u| if u[0].1 != u[1].1 { 1 } else { -1 })
        .collect();
    let root = (0..members.len())
        .min_by_key(|&g| least_shift(graph, &orbits[members[g][0]]).0)
        .unwrap_or(0);
    let tree = SpanningTree::bfs(members.len(), &edges, |_| true, root, None);
    let potential = tree.potentials(|e| sign[e]);
    members
        .iter()
        .zip(potential)
        .map(|(m, p)| if p < 0 && m.len() > 1 { m[1] } else { m[0] })
        .collect()
}

/// Euler genus `2 - |V| + |E| - |F|` and orientability.
///
/// Orientability: switch along a BFS spanning tree so every tree edge becomes
/// positive; the embedding is orientable iff every non-tree edge is then
/// positive too.
pub fn euler_genus(graph: &EmbeddedDigraph, faces: &FacialWalkSet) -> Result<(usize, bool)> {
    let g = 2 - graph.node_count() as i64 + graph.arc_count() as i64 - faces.len() as i64;
    let orientable = is_orientable(graph);
    if g < 0 {
        return Err(Error::InternalInconsistency(format!(
            "negative Euler genus {g}"
        )));
    }
    if orientable && g % 2 != 0 {
        return Err(Error::InternalInconsistency(format!(
            "orientable embedding with odd Euler genus {g}"
        )));
    }
    Ok((g as usize, orientable))
}

pub fn is_orientable(graph: &EmbeddedDigraph) -> bool {
    let tree = graph.spanning_tree(None);
    tree.first_one_sided(&graph.edge_refs(), |a| graph.signature(a))
        .is_none()
}

/// Checks flow conservation; on failure names the first unbalanced node.
pub fn check_circulation(graph: &EmbeddedDigraph, x: &[i64]) -> Result<()> {
    if x.len() != graph.arc_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.arc_count(),
            got: x.len(),
        });
    }
    let mut balance = vec![0i64; graph.node_count()];
    for (a, arc) in graph.arcs().iter().enumerate() {
        balance[arc.tail] -= x[a];
        balance[arc.head] += x[a];
    }
    match balance.iter().position(|&b| b != 0) {
        Some(v) => Err(Error::NotACirculation {
            node: graph.node_id(v),
        }),
        None => Ok(()),
    }
}

pub fn is_circulation(graph: &EmbeddedDigraph, x: &[i64]) -> bool {
    check_circulation(graph, x).is_ok()
}

/// A simple directed cycle given by its arcs in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedCycle {
    pub arcs: Vec<usize>,
}

impl DirectedCycle {
    pub fn flow(&self, arc_count: usize) -> Vec<i64> {
        let mut f = vec![0; arc_count];
        for &a in &self.arcs {
            f[a] += 1;
        }
        f
    }
}

/// Decomposes a non-negative integer circulation into simple directed cycles
/// with multiplicities.
pub fn decompose_into_cycles(
    graph: &EmbeddedDigraph,
    x: &[i64],
) -> Result<Vec<(DirectedCycle, u64)>> {
    check_circulation(graph, x)?;
    if x.iter().any(|&v| v < 0) {
        return Err(Error::InvalidInput(
            "cycle decomposition needs x >= 0".into(),
        ));
    }
    let mut rest = x.to_vec();
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); graph.node_count()];
    for (a, arc) in graph.arcs().iter().enumerate() {
        out_arcs[arc.tail].push(a);
    }
    let mut cycles = Vec::new();
    while let Some(first) = rest.iter().position(|&v| v > 0) {
        // Follow positive arcs until a node repeats.
        let mut seen = vec![usize::MAX; graph.node_count()];
        let mut path: Vec<usize> = Vec::new();
        let mut v = graph.arc(first).tail;
        loop {
            if seen[v] != usize::MAX {
                break;
            }
            seen[v] = path.len();
            let a = *out_arcs[v]
                .iter()
                .find(|&&a| rest[a] > 0)
                .expect("conservation guarantees a positive out-arc");
            path.push(a);
            v = graph.arc(a).head;
        }
        let cycle: Vec<usize> = path[seen[v]..].to_vec();
        let mult = cycle.iter().map(|&a| rest[a]).min().unwrap_or(0);
        for &a in &cycle {
            rest[a] -= mult;
        }
        cycles.push((DirectedCycle { arcs: cycle }, mult as u64));
    }
    Ok(cycles)
}
