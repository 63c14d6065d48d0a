//! Strongly connected components and reachability on plain adjacency lists.
//!
//! Vertices here are 0-based indices into the adjacency list; callers using
//! 1-based vertex labels shift at the boundary.

use alloc::vec;
use alloc::vec::Vec;

/// Tarjan SCC, iterative so deep graphs cannot overflow the stack.
///
/// Components are returned with members sorted ascending and ordered by their
/// smallest member.
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut next_index = 0usize;

    // Explicit DFS frames: (vertex, next out-edge position).
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }

    comps.sort_unstable_by_key(|c| c[0]);
    comps
}

/// Connected components of the undirected view of `adj`.
pub fn undirected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut sym = vec![Vec::new(); n];
    for (v, outs) in adj.iter().enumerate() {
        for &w in outs {
            sym[v].push(w);
            sym[w].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            for &w in &sym[v] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                    queue.push(w);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tarjan_on_two_cycles_and_bridge() {
        // 0 <-> 1, 2 <-> 3, bridge 1 -> 2
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        let comps = tarjan_scc(&adj);
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn tarjan_isolated_vertices() {
        let adj: Vec<Vec<usize>> = vec![vec![], vec![], vec![]];
        assert_eq!(tarjan_scc(&adj), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn tarjan_handles_long_chain_iteratively() {
        // A path of 100_000 vertices would overflow a recursive DFS.
        let n = 100_000;
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|v| if v + 1 < n { vec![v + 1] } else { vec![] })
            .collect();
        let comps = tarjan_scc(&adj);
        assert_eq!(comps.len(), n);
    }

    #[test]
    fn undirected_components_ignore_direction() {
        let adj = vec![vec![1], vec![], vec![]];
        let comps = undirected_components(&adj);
        assert_eq!(comps, vec![vec![0, 1], vec![2]]);
    }
}
