//! All-pairs graph distances.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::graph::Graph;

/// Hop counts `delta`, shortest-path weight sums `d_w`, and the
/// combinatorial diameter `delta_inf` of a connected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTables {
    pub combinatorial: DMatrix<u32>,
    pub weighted: DMatrix<f64>,
    pub diameter: u32,
}

impl DistanceTables {
    pub fn new(graph: &Graph) -> Self {
        let combinatorial = combinatorial_distances(graph);
        let diameter = combinatorial.iter().copied().max().unwrap_or(0);
        Self { combinatorial, weighted: weighted_shortest_paths(graph), diameter }
    }

    pub fn n(&self) -> usize {
        self.combinatorial.nrows()
    }

    #[inline]
    pub fn hops(&self, i: usize, j: usize) -> u32 {
        self.combinatorial[(i, j)]
    }
}

/// BFS hop counts over the support of the weights.
pub fn combinatorial_distances(graph: &Graph) -> DMatrix<u32> {
    let n = graph.n();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| graph.neighbors(i).collect()).collect();
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut dist = vec![u32::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == u32::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State { cost: 0.0, node: source });
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let c = cost + w;
            if c < dist[next] {
                dist[next] = c;
                heap.push(State { cost: c, node: next });
            }
        }
    }
    dist
}

/// Dijkstra from every source with edge cost `w(i, j)`.
///
/// Each unordered pair is taken from the search rooted at its smaller index,
/// so the table is exactly symmetric.
pub fn weighted_shortest_paths(graph: &Graph) -> DMatrix<f64> {
    let n = graph.n();
    let adj: Vec<Vec<(usize, f64)>> =
        (0..n).map(|i| graph.neighbors(i).map(|j| (j, graph.weight(i, j))).collect()).collect();
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| dijkstra(&adj, s)).collect();
    DMatrix::from_fn(n, n, |i, j| if i <= j { rows[i][j] } else { rows[j][i] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(weights: &[f64]) -> Graph {
        let n = weights.len();
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, weights[i])).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn hop_counts() {
        let path = Graph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let t = DistanceTables::new(&path);
        assert_eq!(t.hops(0, 3), 3);
        assert_eq!(t.diameter, 3);
        assert_eq!(combinatorial_distances(&cycle(&[1.0; 10]))[(0, 5)], 5);
        // hand BFS on the 4-cycle: 0 -> {1,3} -> 2
        assert_eq!(combinatorial_distances(&cycle(&[1.0, 0.1, 0.1, 0.1]))[(0, 2)], 2);
    }

    #[test]
    fn shortest_paths_take_cheap_side() {
        let d = weighted_shortest_paths(&cycle(&[1.0, 0.1, 0.1, 0.1]));
        assert!((d[(0, 3)] - 0.1).abs() < 1e-15);
        assert!((d[(0, 1)] - 0.3).abs() < 1e-15);
        assert_eq!(d, d.transpose());
    }

    #[test]
    fn unit_weights_match_hops() {
        let g = cycle(&[1.0; 7]);
        let t = DistanceTables::new(&g);
        assert_eq!(t.weighted, t.combinatorial.map(|h| h as f64));
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(2, &[(0, 1, 7.0)]).unwrap();
        assert_eq!(weighted_shortest_paths(&g)[(0, 1)], 7.0);
    }

    #[test]
    fn weighted_bounds_and_triangle_inequality() {
        let g = Graph::from_edges(5, &[(0, 1, 0.5), (1, 2, 2.0), (2, 3, 1.5), (3, 4, 0.7), (4, 0, 3.0), (1, 3, 0.9)])
            .unwrap();
        let t = DistanceTables::new(&g);
        let n = g.n();
        for i in 0..n {
            for j in 0..n {
                let h = t.hops(i, j) as f64;
                assert!(t.weighted[(i, j)] <= 3.0 * h + 1e-12);
                assert!(t.weighted[(i, j)] >= 0.5 * h - 1e-12);
                for k in 0..n {
                    assert!(t.weighted[(i, j)] <= t.weighted[(i, k)] + t.weighted[(k, j)] + 1e-12);
                    assert!(t.hops(i, j) <= t.hops(i, k) + t.hops(k, j));
                }
            }
        }
        assert_eq!(t.combinatorial, t.combinatorial.transpose());
    }
}
