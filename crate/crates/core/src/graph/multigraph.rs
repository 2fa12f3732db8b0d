use crate::error::{Error, Result};

/// Compressed adjacency rows over nodes `1..=n`; row 0 is always empty.
/// Rows are sorted so parallel entries sit next to each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Csr {
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

impl Csr {
    /// Builds rows from directed arcs `(from, to)`: `to` is listed in row `from`.
    pub(crate) fn from_arcs(n: usize, arcs: &[(u32, u32)]) -> Csr {
        let mut offsets = vec![0usize; n + 2];
        for &(from, _) in arcs {
            offsets[from as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut fill = offsets.clone();
        let mut entries = vec![0u32; arcs.len()];
        for &(from, to) in arcs {
            entries[fill[from as usize]] = to;
            fill[from as usize] += 1;
        }
        for x in 0..=n {
            entries[offsets[x]..offsets[x + 1]].sort_unstable();
        }
        Csr { offsets, entries }
    }

    pub(crate) fn n(&self) -> usize {
        self.offsets.len() - 2
    }

    pub(crate) fn row(&self, x: usize) -> &[u32] {
        &self.entries[self.offsets[x]..self.offsets[x + 1]]
    }

    pub(crate) fn len(&self) -> usize {
        self.entries.len()
    }
}

/// Undirected multigraph on `1..=n`. Parallel edges are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    adj: Csr,
}

impl Multigraph {
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Multigraph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize - 1 {
            return Err(Error::Config(format!("{n} nodes exceed the u32 range")));
        }
        let mut arcs = Vec::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x == 0 || x > n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
            arcs.push((a as u32, b as u32));
            if a != b {
                arcs.push((b as u32, a as u32));
            }
        }
        Ok(Multigraph { adj: Csr::from_arcs(n, &arcs) })
    }

    pub fn n(&self) -> usize {
        self.adj.n()
    }

    /// Neighbours of `x` with multiplicity, sorted.
    pub fn neighbors(&self, x: usize) -> &[u32] {
        self.adj.row(x)
    }

    pub fn distinct_neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.adj.row(x);
        row.iter()
            .enumerate()
            .filter(move |&(i, y)| i == 0 || row[i - 1] != *y)
            .map(|(_, &y)| y as usize)
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj.row(x).len()
    }

    /// Sum of degrees (a self-loop contributes one).
    pub fn total_degree(&self) -> usize {
        self.adj.len()
    }

    pub(crate) fn csr(&self) -> &Csr {
        &self.adj
    }

    /// Path `1 - 2 - ... - n`.
    pub fn path(n: usize) -> Multigraph {
        Multigraph::from_edges(n, (1..n).map(|i| (i, i + 1))).expect("path nodes in range")
    }

    pub fn complete(n: usize) -> Multigraph {
        Multigraph::from_edges(n, (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))))
            .expect("clique nodes in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_edges_are_kept_and_deduped_on_request() {
        let g = Multigraph::from_edges(3, [(1, 2), (2, 1), (2, 3)]).unwrap();
        assert_eq!(g.neighbors(2), &[1, 1, 3]);
        assert_eq!(g.distinct_neighbors(2).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.total_degree(), 6);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Multigraph::from_edges(3, [(1, 4)]).is_err());
        assert!(Multigraph::from_edges(3, [(0, 1)]).is_err());
    }

    #[test]
    fn isolated_nodes() {
        let g = Multigraph::from_edges(5, [(1, 2)]).unwrap();
        assert_eq!(g.n(), 5);
        assert!(g.neighbors(5).is_empty());
    }
}
