//! Hardness-reduction generators: 3-SAT to a stable set problem with edge
//! costs in `{0, 1/2, 1}`, and that stable set problem to a homologous
//! circulation instance on the dual of an all-negative embedding.

use std::collections::{BTreeMap, VecDeque};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{trace_facial_walks, Dart, EmbeddedDigraph};
use crate::error::{Error, Result};
use crate::rational::{from_int, Rational};
use crate::Surface;

/// A 3-CNF formula. Literals follow DIMACS: `v` or `-v` for variable
/// `v ∈ 1..=variables`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub variables: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    pub fn new(variables: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        if variables == 0 || clauses.is_empty() {
            return Err(Error::BadParams(
                "formula needs variables and clauses".into(),
            ));
        }
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > variables {
                    return Err(Error::BadParams(format!("literal {l} out of range")));
                }
            }
        }
        Ok(CnfFormula { variables, clauses })
    }

    /// Parses DIMACS CNF; every clause must have exactly three literals.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut variables = None;
        let mut lits: Vec<i32> = Vec::new();
        let mut clauses = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::parse(
                        format!("line {}", n + 1),
                        "expected \"p cnf <vars> <clauses>\"",
                    ));
                }
                variables =
                    Some(parts[1].parse::<usize>().map_err(|_| {
                        Error::parse(format!("line {}", n + 1), "bad variable count")
                    })?);
                continue;
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| {
                    Error::parse(format!("line {}", n + 1), format!("bad literal {tok}"))
                })?;
                if l == 0 {
                    let clause: [i32; 3] = lits.as_slice().try_into().map_err(|_| {
                        Error::parse(
                            format!("line {}", n + 1),
                            format!("clause has {} literals, expected 3", lits.len()),
                        )
                    })?;
                    clauses.push(clause);
                    lits.clear();
                } else {
                    lits.push(l);
                }
            }
        }
        if !lits.is_empty() {
            return Err(Error::parse(
                "clauses",
                "last clause is not terminated by 0",
            ));
        }
        let variables =
            variables.ok_or_else(|| Error::parse("header", "missing \"p cnf\" line"))?;
        Self::new(variables, clauses)
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = assignment[l.unsigned_abs() as usize - 1];
                if l > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }

    /// Exhaustive satisfiability check.
    pub fn brute_force_satisfiable(&self) -> bool {
        (0u64..1 << self.variables).any(|mask| {
            let a: Vec<bool> = (0..self.variables).map(|i| mask >> i & 1 == 1).collect();
            self.is_satisfied_by(&a)
        })
    }
}

/// Undirected graph with edge costs in `{0, 1/2, 1}` and a threshold `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabInstance {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub costs: Vec<Rational>,
    pub threshold: i64,
    pub labels: Vec<String>,
}

impl StabInstance {
    pub fn new(
        nodes: usize,
        edges: Vec<(usize, usize)>,
        costs: Vec<Rational>,
        threshold: i64,
    ) -> Result<Self> {
        let allowed = [from_int(0), Rational::new(1.into(), 2.into()), from_int(1)];
        if edges.len() != costs.len() {
            return Err(Error::BadParams("one cost per edge required".into()));
        }
        if costs.iter().any(|c| !allowed.contains(c)) {
            return Err(Error::BadParams("edge costs must be 0, 1/2 or 1".into()));
        }
        if edges
            .iter()
            .any(|&(u, v)| u >= nodes || v >= nodes || u == v)
        {
            return Err(Error::BadParams(
                "edges must join two distinct existing nodes".into(),
            ));
        }
        Ok(StabInstance {
            nodes,
            edges,
            costs,
            threshold,
            labels: (0..nodes).map(|v| v.to_string()).collect(),
        })
    }

    /// `Σ_e c(e) |S ∩ e|`.
    pub fn weight(&self, set: &[bool]) -> Rational {
        self.edges
            .iter()
            .zip(&self.costs)
            .fold(Rational::zero(), |acc, (&(u, v), c)| {
                acc + c * from_int(set[u] as i64 + set[v] as i64)
            })
    }

    pub fn is_stable(&self, set: &[bool]) -> bool {
        self.edges.iter().all(|&(u, v)| !(set[u] && set[v]))
    }

    /// Maximum weight over all stable sets, by exhaustive search.
    pub fn max_stable_weight(&self) -> Rational {
        let mut best = Rational::zero();
        let mut set = vec![false; self.nodes];
        self.branch(0, &mut set, &mut best);
        best
    }

    fn branch(&self, v: usize, set: &mut Vec<bool>, best: &mut Rational) {
        if v == self.nodes {
            let w = self.weight(set);
            if w > *best {
                *best = w;
            }
            return;
        }
        self.branch(v + 1, set, best);
        let free = self
            .edges
            .iter()
            .all(|&(a, b)| !((a == v && b < v && set[b]) || (b == v && a < v && set[a])));
        if free {
            set[v] = true;
            self.branch(v + 1, set, best);
            set[v] = false;
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Component index per node.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; self.nodes];
        let mut next = 0;
        for s in 0..self.nodes {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_bipartite(&self) -> bool {
        let adj = self.adjacency();
        let mut colour = vec![None; self.nodes];
        for s in 0..self.nodes {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let cu = colour[u].expect("queued nodes are coloured");
                for &w in &adj[u] {
                    match colour[w] {
                        None => {
                            colour[w] = Some(!cu);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cu => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }
}

/// Variable gadgets (edge `u`–`ū`, cost 1), clause triangles (cost 1/2) and
/// zero-cost connectors from each clause literal to the node of its
/// negation; threshold `|U| + |C|`. Disconnected results get an extra hub
/// node joined to every component by zero-cost edges, which changes no
/// stable set weight.
pub fn sat_to_stab(formula: &CnfFormula) -> StabInstance {
    let nvars = formula.variables;
    let half = Rational::new(1.into(), 2.into());
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    for u in 1..=nvars {
        labels.push(format!("x{u}"));
        labels.push(format!("!x{u}"));
        edges.push((2 * (u - 1), 2 * (u - 1) + 1));
        costs.push(from_int(1));
    }
    let literal_node = |l: i32| 2 * (l.unsigned_abs() as usize - 1) + (l < 0) as usize;
    for (j, clause) in formula.clauses.iter().enumerate() {
        let base = 2 * nvars + 3 * j;
        for (i, &l) in clause.iter().enumerate() {
            labels.push(format!("c{}:{}", j + 1, l));
            let _ = i;
        }
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            edges.push((base + a, base + b));
            costs.push(half.clone());
        }
        for (i, &l) in clause.iter().enumerate() {
            edges.push((base + i, literal_node(-l)));
            costs.push(from_int(0));
        }
    }
    let mut stab = StabInstance {
        nodes: labels.len(),
        edges,
        costs,
        threshold: (nvars + formula.clauses.len()) as i64,
        labels,
    };
    let comp = stab.components();
    let count = comp.iter().max().map(|m| m + 1).unwrap_or(0);
    if count > 1 {
        let hub = stab.nodes;
        stab.nodes += 1;
        stab.labels.push("hub".into());
        for c in 0..count {
            let v = comp
                .iter()
                .position(|&x| x == c)
                .expect("component has a node");
            stab.edges.push((v, hub));
            stab.costs.push(from_int(0));
        }
    }
    stab
}

/// The homologous-circulation instance built from a stable set instance.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    /// `G` with every signature `-1`; arc `i` is edge `i`.
    pub primal: EmbeddedDigraph,
    /// The dual digraph `D`: nodes are faces of `primal`, arc `i` crosses edge `i`.
    pub digraph: EmbeddedDigraph,
    /// The all-ones circulation.
    pub y: Vec<i64>,
    /// `Σ_e c(e) - k`.
    pub budget: Rational,
    /// Facial walk of `D` around each node of `G`; each is a directed closed
    /// walk, traced either along or against its arcs.
    pub node_faces: Vec<usize>,
    pub genus: usize,
}

impl ReductionInstance {
    /// `𝟙 - Σ_{v ∈ S} χ(v*)` for a vertex set `S` of `G`.
    pub fn circulation_for(&self, set: &[bool]) -> Vec<i64> {
        let faces = trace_facial_walks(&self.digraph);
        let mut x = self.y.clone();
        for (v, &in_set) in set.iter().enumerate() {
            if in_set {
                for s in &faces.walks[self.node_faces[v]].steps {
                    x[s.dart.arc] -= 1;
                }
            }
        }
        x
    }
}

fn check_reducible(instance: &StabInstance) -> Result<()> {
    if instance.is_bipartite() {
        return Err(Error::BipartiteInput);
    }
    if instance.components().iter().any(|&c| c != 0) {
        return Err(Error::BadParams("graph must be connected".into()));
    }
    Ok(())
}

/// Incident darts per node in edge order, shuffled when `seed` is given.
fn seeded_rotation(instance: &StabInstance, seed: Option<u64>) -> Vec<Vec<Dart>> {
    let mut rotation: Vec<Vec<Dart>> = vec![Vec::new(); instance.nodes];
    for (a, &(u, v)) in instance.edges.iter().enumerate() {
        rotation[u].push(Dart::tail(a));
        rotation[v].push(Dart::head(a));
    }
    if let Some(s) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        for darts in &mut rotation {
            darts.shuffle(&mut rng);
        }
    }
    rotation
}

fn negative_embedding(
    instance: &StabInstance,
    rotation: Vec<Vec<Dart>>,
) -> Result<EmbeddedDigraph> {
    let arcs = instance
        .edges
        .iter()
        .zip(&instance.costs)
        .map(|(&(u, v), c)| (u, v, c.clone()))
        .collect();
    EmbeddedDigraph::from_indices(
        instance.nodes,
        arcs,
        rotation,
        vec![-1; instance.edges.len()],
    )
}

/// Embeds `G` with all signatures `-1` (rotation order: incident edges by
/// index, shuffled when `seed` is given), takes the dual and directs each
/// dual arc the way both facial walks of the dual traverse it.
pub fn stab_to_circulation(
    instance: &StabInstance,
    seed: Option<u64>,
) -> Result<ReductionInstance> {
    check_reducible(instance)?;
    reduce_with_rotation(instance, seeded_rotation(instance, seed))
}

/// Like [`stab_to_circulation`], but first improves the rotation by `steps`
/// rounds of hill climbing on the face count (swapping two darts at a node),
/// which lowers the genus of the resulting instance.
pub fn stab_to_circulation_min_genus(
    instance: &StabInstance,
    seed: u64,
    steps: usize,
) -> Result<ReductionInstance> {
    check_reducible(instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rotation = seeded_rotation(instance, Some(seed));
    let faces = |rot: &Vec<Vec<Dart>>| -> Result<usize> {
        Ok(trace_facial_walks(&negative_embedding(instance, rot.clone())?).len())
    };
    let mut best = faces(&rotation)?;
    let movable: Vec<usize> = (0..instance.nodes)
        .filter(|&v| rotation[v].len() >= 3)
        .collect();
    if !movable.is_empty() {
        for _ in 0..steps {
            let v = movable[rng.gen_range(0..movable.len())];
            let d = rotation[v].len();
            let (i, j) = (rng.gen_range(0..d), rng.gen_range(0..d));
            if i == j {
                continue;
            }
            rotation[v].swap(i, j);
            let f = faces(&rotation)?;
            if f >= best {
                best = f;
            } else {
                rotation[v].swap(i, j);
            }
        }
    }
    reduce_with_rotation(instance, rotation)
}

fn reduce_with_rotation(
    instance: &StabInstance,
    rotation: Vec<Vec<Dart>>,
) -> Result<ReductionInstance> {
    let m = instance.edges.len();
    let primal = negative_embedding(instance, rotation)?;
    let surface = Surface::analyse(&primal)?;
    if surface.orientable {
        return Err(Error::InternalInconsistency(
            "all-negative embedding of a non-bipartite graph is orientable".into(),
        ));
    }
    let dual = surface.dual.to_instance(&primal)?;

    // Facial walks of the dual go around the primal nodes; orient each so
    // that both walks through an arc agree on its direction.
    let around = trace_facial_walks(&dual);
    let mut uses: Vec<Vec<(usize, bool)>> = vec![Vec::new(); m];
    for (f, w) in around.walks.iter().enumerate() {
        for s in &w.steps {
            uses[s.dart.arc].push((f, s.forward()));
        }
    }
    let faces = around.len();
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); faces];
    for u in &uses {
        let [(f, df), (g, dg)] = [u[0], u[1]];
        // Relative orientation: walks f and g must be flipped together iff
        // they currently agree.
        adj[f].push((g, df == dg));
        adj[g].push((f, df == dg));
    }
    let mut flip_walk: Vec<Option<bool>> = vec![None; faces];
    for s in 0..faces {
        if flip_walk[s].is_some() {
            continue;
        }
        flip_walk[s] = Some(false);
        let mut queue = VecDeque::from([s]);
        while let Some(f) = queue.pop_front() {
            let ff = flip_walk[f].expect("queued walks are decided");
            for &(g, same) in &adj[f] {
                let want = if same { ff } else { !ff };
                match flip_walk[g] {
                    None => {
                        flip_walk[g] = Some(want);
                        queue.push_back(g);
                    }
                    Some(x) if x != want => {
                        return Err(Error::InternalInconsistency(
                            "dual facial walks cannot be directed consistently".into(),
                        ))
                    }
                    _ => {}
                }
            }
        }
    }
    let flip_arc: Vec<bool> = uses
        .iter()
        .map(|u| {
            let (f, forward) = u[0];
            let along = forward != flip_walk[f].expect("every walk decided");
            !along
        })
        .collect();
    let digraph = dual.with_reversed_arcs(&flip_arc);
    let y = vec![1i64; m];
    if !crate::embedding::is_circulation(&digraph, &y) {
        return Err(Error::InternalInconsistency(
            "all-ones vector is not a circulation".into(),
        ));
    }

    // Match each primal node to the dual facial walk crossing its edges.
    let around = trace_facial_walks(&digraph);
    let mut by_arcs: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (f, w) in around.walks.iter().enumerate() {
        let mut arcs: Vec<usize> = w.steps.iter().map(|s| s.dart.arc).collect();
        arcs.sort_unstable();
        by_arcs.insert(arcs, f);
    }
    let mut node_faces = Vec::with_capacity(instance.nodes);
    for v in 0..instance.nodes {
        let mut arcs: Vec<usize> = (0..m)
            .filter(|&a| instance.edges[a].0 == v || instance.edges[a].1 == v)
            .collect();
        arcs.sort_unstable();
        let f = by_arcs.get(&arcs).copied().ok_or_else(|| {
            Error::InternalInconsistency(format!("no dual facial walk around node {v}"))
        })?;
        node_faces.push(f);
    }
    for w in &around.walks {
        let forward = w.steps.iter().filter(|s| s.forward()).count();
        if forward != 0 && forward != w.steps.len() {
            return Err(Error::InternalInconsistency(
                "dual facial walk is not directed".into(),
            ));
        }
    }

    let total: Rational = instance.costs.iter().fold(Rational::zero(), |a, c| a + c);
    Ok(ReductionInstance {
        primal,
        digraph,
        y,
        budget: total - from_int(instance.threshold),
        node_faces,
        genus: surface.genus,
    })
}
