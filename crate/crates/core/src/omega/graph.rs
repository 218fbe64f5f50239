use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

/// Strongly connected components in reverse topological order, plus
/// whether each one contains a cycle.
pub(crate) fn components(adj: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<usize>, Vec<bool>) {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(adj.len(), adj.iter().map(Vec::len).sum());
    for _ in 0..adj.len() {
        g.add_node(());
    }
    for (u, vs) in adj.iter().enumerate() {
        for &v in vs {
            g.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
        }
    }
    let comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| c.into_iter().map(|n| n.index()).collect())
        .collect();
    let mut comp_of = vec![0; adj.len()];
    for (ci, c) in comps.iter().enumerate() {
        for &n in c {
            comp_of[n] = ci;
        }
    }
    let cyclic = comps
        .iter()
        .map(|c| c.len() > 1 || adj[c[0]].contains(&c[0]))
        .collect();
    (comps, comp_of, cyclic)
}

/// Nodes from which some cycle through an accepting node is reachable.
pub(crate) fn reaches_accepting_cycle(adj: &[Vec<usize>], accepting: &dyn Fn(usize) -> bool) -> Vec<bool> {
    let (comps, comp_of, cyclic) = components(adj);
    let mut good = vec![false; adj.len()];
    // sinks first: successors outside a component are already decided
    for (ci, c) in comps.iter().enumerate() {
        let mut g = cyclic[ci] && c.iter().any(|&n| accepting(n));
        if !g {
            g = c
                .iter()
                .any(|&n| adj[n].iter().any(|&m| comp_of[m] != ci && good[m]));
        }
        if g {
            for &n in c {
                good[n] = true;
            }
        }
    }
    good
}

pub(crate) fn reachable(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepting_state_outside_cycle_is_useless() {
        // 0 -> 1 -> 2 -> 2, only 1 accepting
        let adj = vec![vec![1], vec![2], vec![2]];
        let good = reaches_accepting_cycle(&adj, &|n| n == 1);
        assert_eq!(good, vec![false, false, false]);
        let good = reaches_accepting_cycle(&adj, &|n| n == 2);
        assert_eq!(good, vec![true, true, true]);
    }
}
