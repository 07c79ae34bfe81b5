use crate::error::{Error, Result};

/// Undirected network over agents `0..n`.
///
/// A self-loop puts an agent in its own neighbor set. Agents without
/// neighbors are representable; voter-model operations reject them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) references an agent outside 0..{n}"
                )));
            }
            neighbors[a].push(b);
            if a != b {
                neighbors[b].push(a);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors })
    }

    /// Every agent neighbors every agent, itself included, so an unpaid
    /// agent copies a uniformly random member of the whole population.
    pub fn complete_with_self_loops(n: usize) -> Self {
        Self {
            neighbors: (0..n).map(|_| (0..n).collect()).collect(),
        }
    }

    pub fn complete(n: usize) -> Self {
        Self {
            neighbors: (0..n)
                .map(|i| (0..n).filter(|&j| j != i).collect())
                .collect(),
        }
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle edges are in range")
    }

    /// Agent 0 is the center, agents `1..=leaves` hang off it.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star edges are in range")
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    /// Checks that every agent has at least one neighbor.
    pub fn check_no_isolated(&self) -> Result<()> {
        match (0..self.len()).find(|&i| self.neighbors[i].is_empty()) {
            Some(i) => Err(Error::IsolatedAgent(i)),
            None => Ok(()),
        }
    }

    /// Whether every agent's neighbor set is the full population.
    pub fn is_complete_with_self_loops(&self) -> bool {
        let n = self.len();
        self.neighbors
            .iter()
            .all(|list| list.len() == n && list.iter().copied().eq(0..n))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, list) in self.neighbors.iter().enumerate() {
            out.extend(list.iter().filter(|&&j| j >= i).map(|&j| (i, j)));
        }
        out
    }
}
