//! Minimum s-t cuts on undirected capacitated graphs (Edmonds-Karp).

use std::collections::VecDeque;

/// Undirected edges `(a, b, capacity)` over nodes `0..n`. Returns the cut
/// value and the indices of the edges crossing the minimum cut.
pub(crate) fn min_cut(n: usize, edges: &[(usize, usize, f64)], s: usize, t: usize) -> (f64, Vec<usize>) {
    // arc 2i runs a -> b, arc 2i+1 runs b -> a; both carry the full capacity
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut head = Vec::with_capacity(edges.len() * 2);
    let mut residual = Vec::with_capacity(edges.len() * 2);
    for &(a, b, c) in edges {
        adj[a].push(head.len());
        head.push(b);
        residual.push(c);
        adj[b].push(head.len());
        head.push(a);
        residual.push(c);
    }
    let mut flow = 0.0;
    loop {
        let mut pred = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &arc in &adj[u] {
                let v = head[arc];
                if !seen[v] && residual[arc] > 0.0 {
                    seen[v] = true;
                    pred[v] = arc;
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            let cut: Vec<usize> = edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b, _))| seen[a] != seen[b])
                .map(|(i, _)| i)
                .collect();
            return (flow, cut);
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = t;
        while v != s {
            let arc = pred[v];
            bottleneck = bottleneck.min(residual[arc]);
            v = head[arc ^ 1];
        }
        if bottleneck.is_infinite() {
            return (f64::INFINITY, Vec::new());
        }
        let mut v = t;
        while v != s {
            let arc = pred[v];
            residual[arc] -= bottleneck;
            residual[arc ^ 1] += bottleneck;
            v = head[arc ^ 1];
        }
        flow += bottleneck;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cuts() {
        // 0 - 1 - 3 and 0 - 2 - 3 with a bottleneck on each branch
        let edges = [(0, 1, 3.0), (1, 3, 1.0), (0, 2, 2.0), (2, 3, 5.0)];
        let (v, cut) = min_cut(4, &edges, 0, 3);
        assert_eq!(v, 3.0);
        assert_eq!(cut, vec![1, 2]);
        let (v, cut) = min_cut(3, &[(0, 1, 1.0)], 0, 2);
        assert_eq!(v, 0.0);
        assert!(cut.is_empty());
    }
}
