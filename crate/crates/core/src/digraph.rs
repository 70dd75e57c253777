//! Digraphs of sign patterns: strong connectivity, equivalence under
//! relabeling and global edge reversal, and the irreducible 3-vertex classes.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::signpat::{Sign, SignPattern};
use crate::{Error, Result};

/// Directed graph on vertices `0..n` (printed 1-based); loops allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(i, j) in edges {
            g.adj[i * n + j] = true;
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .cartesian_product(0..self.n)
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    /// Number of edges, loops included.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count()
    }

    pub fn reverse(&self) -> Self {
        let n = self.n;
        let mut g = Self::empty(n);
        for (i, j) in self.edges() {
            g.adj[j * n + i] = true;
        }
        g
    }

    /// Relabel vertex `perm[i]` as `i`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                g.adj[i * n + j] = self.adj[perm[i] * n + perm[j]];
            }
        }
        g
    }

    /// Adjacency bits in row-major order, first cell most significant.
    pub fn encode(&self) -> u64 {
        assert!(self.n <= 8, "encoding holds at most 64 cells");
        self.adj.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&w| self.has_edge(v, w))
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self
            .edges()
            .iter()
            .map(|(i, j)| format!("{}->{}", i + 1, j + 1))
            .join(",");
        f.write_str(&s)
    }
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}:{}", self.n, self))
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `n:i->j,k->l,...` with 1-based vertices; the `n:` prefix is required
/// because isolated vertices are invisible in an edge list.
impl FromStr for Digraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, list) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("digraph {s:?} lacks the `n:` prefix")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex count in {s:?}")))?;
        let mut edges = Vec::new();
        for e in list.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (a, b) = e
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("bad edge {e:?}")))?;
            let parse = |x: &str| -> Result<usize> {
                match x.trim().parse::<usize>() {
                    Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                    _ => Err(Error::Parse(format!("bad vertex {x:?} in edge {e:?}"))),
                }
            };
            edges.push((parse(a)?, parse(b)?));
        }
        Ok(Self::from_edges(n, &edges))
    }
}

/// Edge `(i, j)` exactly when cell `(i, j)` is nonzero.
pub fn digraph_of(s: &SignPattern) -> Digraph {
    let n = s.n();
    let mut g = Digraph::empty(n);
    for i in 0..n {
        for j in 0..n {
            g.adj[i * n + j] = s.get(i, j) != Sign::Zero;
        }
    }
    g
}

/// Kosaraju: every vertex reachable from vertex 0 in the graph and in its reverse.
pub fn strongly_connected(g: &Digraph) -> bool {
    if g.n == 0 {
        return true;
    }
    let reach_all = |h: &Digraph| {
        let mut seen = vec![false; h.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in h.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach_all(g) && reach_all(&g.reverse())
}

/// Least encoding over all relabelings and both edge orientations.
pub fn digraph_canonical(g: &Digraph) -> Digraph {
    let rev = g.reverse();
    (0..g.n)
        .permutations(g.n)
        .flat_map(|p| [g.relabel(&p), rev.relabel(&p)])
        .min_by_key(Digraph::encode)
        .expect("at least one permutation")
}

pub fn digraph_equivalent(a: &Digraph, b: &Digraph) -> bool {
    a.n == b.n && digraph_canonical(a) == digraph_canonical(b)
}

/// Canonical representatives of the strongly connected digraphs on three
/// vertices, sorted by edge count (loops count) and then by encoding.
pub fn enumerate_irreducible_3digraphs() -> Vec<Digraph> {
    let mut reps: Vec<Digraph> = (0u32..1 << 9)
        .map(|bits| Digraph {
            n: 3,
            adj: (0..9).map(|k| bits >> (8 - k) & 1 == 1).collect(),
        })
        .filter(strongly_connected)
        .map(|g| digraph_canonical(&g))
        .collect();
    reps.sort_by_key(|g| (g.edge_count(), g.encode()));
    reps.dedup();
    reps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> Digraph {
        s.parse().unwrap()
    }

    #[test]
    fn cycle_and_reverse() {
        let c = g("3:1->2,2->3,3->1");
        assert!(strongly_connected(&c));
        assert!(digraph_equivalent(&c, &c.reverse()));
        assert_eq!(digraph_canonical(&digraph_canonical(&c)), digraph_canonical(&c));
    }

    #[test]
    fn path_not_strong() {
        assert!(!strongly_connected(&g("3:1->2,2->3")));
        assert!(strongly_connected(&g("2:1->2,2->1")));
        assert!(!strongly_connected(&g("2:1->1,2->2")));
    }

    #[test]
    fn text_round_trip() {
        let d = g("3:1->1,1->2,3->1");
        assert_eq!(d.to_string(), "1->1,1->2,3->1");
        assert_eq!(g(&format!("3:{d}")), d);
        assert!("1->2".parse::<Digraph>().is_err());
        assert!("2:1->3".parse::<Digraph>().is_err());
    }

    #[test]
    fn census_sizes() {
        let reps = enumerate_irreducible_3digraphs();
        assert_eq!(reps.len(), 26);
        let counts = (3..=9)
            .map(|e| reps.iter().filter(|g| g.edge_count() == e).count())
            .collect::<Vec<_>>();
        assert_eq!(counts, vec![1, 3, 6, 8, 5, 2, 1]);
    }
}
