//! BFS spanning trees over small multigraphs (primal or dual), with tree paths.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub(crate) struct EdgeRef {
    pub id: usize,
    pub u: usize,
    pub v: usize,
}

/// One step of a path: traverse edge `edge` from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Hop {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct SpanningTree {
    pub parent: Vec<Option<Hop>>,
    pub depth: Vec<usize>,
    pub reached: Vec<bool>,
    pub in_tree: Vec<bool>,
    /// BFS discovery order.
    pub order: Vec<usize>,
}

impl SpanningTree {
    /// BFS from `root` using only edges for which `allowed(id)` holds. Loops are
    /// never tree edges. With `rng`, neighbour order is shuffled.
    pub fn bfs(
        nodes: usize,
        edges: &[EdgeRef],
        allowed: impl Fn(usize) -> bool,
        root: usize,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Self {
        let max_id = edges.iter().map(|e| e.id + 1).max().unwrap_or(0);
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
        for e in edges {
            if e.u == e.v || !allowed(e.id) {
                continue;
            }
            adj[e.u].push((e.id, e.v));
            adj[e.v].push((e.id, e.u));
        }
        if let Some(rng) = rng {
            for list in &mut adj {
                list.shuffle(rng);
            }
        }
        let mut parent = vec![None; nodes];
        let mut depth = vec![0; nodes];
        let mut reached = vec![false; nodes];
        let mut in_tree = vec![false; max_id];
        let mut order = Vec::with_capacity(nodes);
        if nodes > 0 {
            reached[root] = true;
            order.push(root);
            let mut head = 0;
            while head < order.len() {
                let u = order[head];
                head += 1;
                for &(id, w) in &adj[u] {
                    if !reached[w] {
                        reached[w] = true;
                        parent[w] = Some(Hop {
                            edge: id,
                            from: u,
                            to: w,
                        });
                        depth[w] = depth[u] + 1;
                        in_tree[id] = true;
                        order.push(w);
                    }
                }
            }
        }
        SpanningTree {
            parent,
            depth,
            reached,
            in_tree,
            order,
        }
    }

    pub fn spans(&self) -> bool {
        self.reached.iter().all(|&r| r)
    }

    pub fn contains_edge(&self, id: usize) -> bool {
        self.in_tree.get(id).copied().unwrap_or(false)
    }

    /// Tree path from `from` to `to` as a hop sequence.
    pub fn path(&self, from: usize, to: usize) -> Vec<Hop> {
        let mut up = Vec::new(); // hops from `from` upward
        let mut down = Vec::new(); // hops from `to` upward, reversed later
        let (mut a, mut b) = (from, to);
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let p = self.parent[a].expect("non-root has a parent");
                up.push(Hop {
                    edge: p.edge,
                    from: a,
                    to: p.from,
                });
                a = p.from;
            } else {
                let p = self.parent[b].expect("non-root has a parent");
                down.push(p);
                b = p.from;
            }
        }
        up.extend(down.into_iter().rev());
        up
    }
}

impl SpanningTree {
    /// Switching potential: `+1` at the root, multiplied by the edge sign along
    /// each tree edge. Unreached nodes get `+1`.
    pub fn potentials(&self, sign: impl Fn(usize) -> i8) -> Vec<i8> {
        let mut phi = vec![1i8; self.parent.len()];
        for &v in &self.order {
            if let Some(p) = self.parent[v] {
                phi[v] = phi[p.from] * sign(p.edge);
            }
        }
        phi
    }

    /// First edge (in slice order) whose switched sign is `-1`, i.e. whose
    /// fundamental cycle is one-sided.
    pub fn first_one_sided(
        &self,
        edges: &[EdgeRef],
        sign: impl Fn(usize) -> i8,
    ) -> Option<EdgeRef> {
        let phi = self.potentials(&sign);
        edges
            .iter()
            .copied()
            .find(|e| !self.contains_edge(e.id) && sign(e.id) * phi[e.u] * phi[e.v] < 0)
    }
}
