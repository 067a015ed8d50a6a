//! Primal network simplex for uncapacitated min-cost flow in exact integer
//! arithmetic.
//!
//! Start from the artificial-root basis, price with block search, and keep a
//! strongly feasible spanning tree so degenerate pivots cannot cycle. Tree
//! potentials satisfy `cost + pi[src] - pi[tgt] = 0` on basic arcs.

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct FlowSolution {
    /// Flow on each input arc.
    pub flows: Vec<i64>,
    /// Node potentials of the final basis: `cost + pi[src] - pi[tgt] >= 0` on every arc.
    pub potentials: Vec<i64>,
    /// Basic arcs among the input arcs.
    pub basic: Vec<bool>,
    pub pivots: usize,
}

struct Tree {
    src: Vec<usize>,
    tgt: Vec<usize>,
    cost: Vec<i64>,
    flow: Vec<i64>,
    in_tree: Vec<bool>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    /// +1 when `pred` points from the node to its parent, -1 otherwise.
    up: Vec<bool>,
    depth: Vec<usize>,
    pi: Vec<i64>,
    children: Vec<Vec<usize>>,
}

impl Tree {
    fn reduced_cost(&self, a: usize) -> i64 {
        self.cost[a] + self.pi[self.src[a]] - self.pi[self.tgt[a]]
    }

    fn join(&self, mut u: usize, mut v: usize) -> usize {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u];
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v];
        }
        while u != v {
            u = self.parent[u];
            v = self.parent[v];
        }
        u
    }

    /// Recomputes depth and potentials below `root`, whose own values are current.
    fn refresh_subtree(&mut self, root: usize) {
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for k in 0..self.children[u].len() {
                let c = self.children[u][k];
                let a = self.pred[c];
                self.depth[c] = self.depth[u] + 1;
                self.pi[c] = if self.up[c] {
                    self.pi[u] - self.cost[a]
                } else {
                    self.pi[u] + self.cost[a]
                };
                stack.push(c);
            }
        }
    }

    fn detach_child(&mut self, parent: usize, child: usize) {
        let list = &mut self.children[parent];
        let pos = list
            .iter()
            .position(|&c| c == child)
            .expect("child is linked");
        list.swap_remove(pos);
    }
}

/// Solves `min sum cost·flow` subject to node balance `out - in = supply` and
/// `flow >= 0` on the given directed arcs. Supplies must sum to zero.
pub fn min_cost_flow(
    n_nodes: usize,
    supply: &[i64],
    arcs: &[(usize, usize)],
    cost: &[i64],
) -> Result<FlowSolution> {
    if supply.len() != n_nodes || cost.len() != arcs.len() {
        return Err(Error::Solver("inconsistent network sizes".into()));
    }
    if supply.iter().sum::<i64>() != 0 {
        return Err(Error::Solver("supplies do not balance".into()));
    }
    if cost.iter().any(|&c| c < 0) {
        return Err(Error::Solver("negative arc cost".into()));
    }
    let m = arcs.len();
    let root = n_nodes;
    let max_cost = cost.iter().copied().max().unwrap_or(0);
    let art = (max_cost + 1)
        .checked_mul(n_nodes as i64 + 1)
        .ok_or_else(|| Error::Solver("cost range overflows".into()))?;

    let total = m + n_nodes;
    let mut t = Tree {
        src: Vec::with_capacity(total),
        tgt: Vec::with_capacity(total),
        cost: Vec::with_capacity(total),
        flow: vec![0; total],
        in_tree: vec![false; total],
        parent: vec![root; n_nodes + 1],
        pred: vec![NONE; n_nodes + 1],
        up: vec![false; n_nodes + 1],
        depth: vec![1; n_nodes + 1],
        pi: vec![0; n_nodes + 1],
        children: vec![Vec::new(); n_nodes + 1],
    };
    for (&(s, d), &c) in arcs.iter().zip(cost) {
        if s >= n_nodes || d >= n_nodes {
            return Err(Error::Solver("arc endpoint out of range".into()));
        }
        t.src.push(s);
        t.tgt.push(d);
        t.cost.push(c);
    }
    for u in 0..n_nodes {
        let a = m + u;
        if supply[u] >= 0 {
            t.src.push(u);
            t.tgt.push(root);
            t.flow[a] = supply[u];
            t.up[u] = true;
            t.pi[u] = -art;
        } else {
            t.src.push(root);
            t.tgt.push(u);
            t.flow[a] = -supply[u];
            t.up[u] = false;
            t.pi[u] = art;
        }
        t.cost.push(art);
        t.in_tree[a] = true;
        t.pred[u] = a;
        t.children[root].push(u);
    }
    t.parent[root] = NONE;
    t.depth[root] = 0;

    let block = ((total as f64).sqrt() as usize).max(10);
    let mut next_arc = 0usize;
    let mut pivots = 0usize;
    let max_pivots = 64usize.saturating_mul(total).max(1 << 20);

    loop {
        // block search pricing
        let mut entering = NONE;
        let mut best = 0i64;
        let mut scanned = 0usize;
        let mut in_block = 0usize;
        let mut a = next_arc;
        while scanned < total {
            if !t.in_tree[a] {
                let rc = t.reduced_cost(a);
                if rc < best {
                    best = rc;
                    entering = a;
                }
            }
            scanned += 1;
            in_block += 1;
            a += 1;
            if a == total {
                a = 0;
            }
            if in_block == block {
                if entering != NONE {
                    break;
                }
                in_block = 0;
            }
        }
        if entering == NONE {
            break;
        }
        next_arc = a;

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Solver("pivot limit exceeded".into()));
        }

        let s = t.src[entering];
        let d = t.tgt[entering];
        let join = t.join(s, d);

        // Flow travels s -> d on the entering arc, then d -> join -> s through the tree.
        // Blocking arcs are the tree arcs traversed against their orientation.
        let mut delta = i64::MAX;
        let mut leave_node = NONE;
        let mut on_source_side = false;
        let mut u = s;
        while u != join {
            // traversed parent -> u
            if t.up[u] {
                let f = t.flow[t.pred[u]];
                if f < delta {
                    delta = f;
                    leave_node = u;
                    on_source_side = true;
                }
            }
            u = t.parent[u];
        }
        let mut u = d;
        while u != join {
            // traversed u -> parent
            if !t.up[u] {
                let f = t.flow[t.pred[u]];
                if f <= delta {
                    delta = f;
                    leave_node = u;
                    on_source_side = false;
                }
            }
            u = t.parent[u];
        }
        if leave_node == NONE {
            return Err(Error::Solver("unbounded negative cycle".into()));
        }

        if delta > 0 {
            t.flow[entering] += delta;
            let mut u = s;
            while u != join {
                let a = t.pred[u];
                if t.up[u] {
                    t.flow[a] -= delta;
                } else {
                    t.flow[a] += delta;
                }
                u = t.parent[u];
            }
            let mut u = d;
            while u != join {
                let a = t.pred[u];
                if t.up[u] {
                    t.flow[a] += delta;
                } else {
                    t.flow[a] -= delta;
                }
                u = t.parent[u];
            }
        }

        // Re-hang the subtree cut off by the leaving arc from the entering arc.
        let leaving = t.pred[leave_node];
        t.in_tree[leaving] = false;
        t.in_tree[entering] = true;
        let (in_node, out_node) = if on_source_side { (s, d) } else { (d, s) };

        let old_parent = t.parent[leave_node];
        t.detach_child(old_parent, leave_node);

        // reverse the path in_node .. leave_node
        let mut path = vec![in_node];
        while *path.last().expect("path is nonempty") != leave_node {
            let last = *path.last().expect("path is nonempty");
            path.push(t.parent[last]);
        }
        for k in (1..path.len()).rev() {
            let child = path[k - 1];
            let upper = path[k];
            t.detach_child(upper, child);
            t.parent[upper] = child;
            t.pred[upper] = t.pred[child];
            t.up[upper] = !t.up[child];
            t.children[child].push(upper);
        }
        t.parent[in_node] = out_node;
        t.pred[in_node] = entering;
        t.up[in_node] = t.src[entering] == in_node;
        t.children[out_node].push(in_node);

        t.depth[in_node] = t.depth[out_node] + 1;
        t.pi[in_node] = if t.up[in_node] {
            t.pi[out_node] - t.cost[entering]
        } else {
            t.pi[out_node] + t.cost[entering]
        };
        t.refresh_subtree(in_node);
    }

    if (m..total).any(|a| t.flow[a] != 0) {
        return Err(Error::Solver("problem is infeasible".into()));
    }
    t.refresh_subtree(root);
    Ok(FlowSolution {
        flows: t.flow[..m].to_vec(),
        potentials: t.pi[..n_nodes].to_vec(),
        basic: t.in_tree[..m].to_vec(),
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_assignment() {
        // sources 0,1 supply 1; sinks 2,3 demand 1
        let arcs = [(0, 2), (0, 3), (1, 2), (1, 3)];
        let cost = [1, 10, 10, 1];
        let sol = min_cost_flow(4, &[1, 1, -1, -1], &arcs, &cost).unwrap();
        assert_eq!(sol.flows, vec![1, 0, 0, 1]);
        for (k, &(s, d)) in arcs.iter().enumerate() {
            let rc = cost[k] + sol.potentials[s] - sol.potentials[d];
            assert!(rc >= 0);
            if sol.flows[k] > 0 {
                assert_eq!(rc, 0);
            }
        }
    }

    #[test]
    fn transshipment_chain() {
        let arcs = [(0, 1), (1, 2), (0, 2)];
        let cost = [1, 1, 5];
        let sol = min_cost_flow(3, &[4, 0, -4], &arcs, &cost).unwrap();
        assert_eq!(sol.flows, vec![4, 4, 0]);
    }

    #[test]
    fn infeasible_is_reported() {
        let sol = min_cost_flow(2, &[1, -1], &[(1, 0)], &[1]);
        assert!(matches!(sol, Err(Error::Solver(_))));
    }

    #[test]
    fn unbalanced_supply_is_rejected() {
        assert!(min_cost_flow(2, &[1, 0], &[(0, 1)], &[1]).is_err());
    }
}
