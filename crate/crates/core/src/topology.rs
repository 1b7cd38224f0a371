//! Network topologies shared by the cluster simulator and the timing model.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    /// Direct point-to-point cables between every pair of boards.
    Ptop,
    Torus2d,
    Torus3d,
    Hypercube,
    /// Hypercube with extra links between antipodal nodes.
    Hypercubepp,
    /// Full-bisection switched star.
    Switched,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 6] = [
        TopologyKind::Ptop,
        TopologyKind::Torus2d,
        TopologyKind::Torus3d,
        TopologyKind::Hypercube,
        TopologyKind::Hypercubepp,
        TopologyKind::Switched,
    ];

    /// Name as printed in the network timing table.
    pub fn table_name(self) -> &'static str {
        match self {
            TopologyKind::Ptop => "PtoP",
            TopologyKind::Torus2d => "2D Torus",
            TopologyKind::Torus3d => "3D Torus",
            TopologyKind::Hypercube => "Hypercube",
            TopologyKind::Hypercubepp => "Hypercube++",
            TopologyKind::Switched => "Switched",
        }
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            TopologyKind::Ptop => "ptop",
            TopologyKind::Torus2d => "torus2d",
            TopologyKind::Torus3d => "torus3d",
            TopologyKind::Hypercube => "hypercube",
            TopologyKind::Hypercubepp => "hypercubepp",
            TopologyKind::Switched => "switched",
        }
    }

    /// Single-hop topologies where round-robin rounds are perfect matchings
    /// over dedicated paths.
    pub fn is_single_hop(self) -> bool {
        matches!(self, TopologyKind::Ptop | TopologyKind::Switched)
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "ptop" | "p2p" => Ok(TopologyKind::Ptop),
            "torus2d" | "2dtorus" => Ok(TopologyKind::Torus2d),
            "torus3d" | "3dtorus" => Ok(TopologyKind::Torus3d),
            "hypercube" => Ok(TopologyKind::Hypercube),
            "hypercubepp" | "hypercube++" => Ok(TopologyKind::Hypercubepp),
            "switched" => Ok(TopologyKind::Switched),
            _ => Err(Error::UnsupportedTopology(s.to_string())),
        }
    }
}

/// Undirected graph of boards. Switched networks are modelled as a complete
/// graph since every transfer is a single hop through the switch.
#[derive(Clone, Debug)]
pub struct Network {
    kind: TopologyKind,
    adjacency: Vec<Vec<usize>>,
}

fn torus_shape(nodes: usize, dims: usize) -> Vec<usize> {
    let bits = nodes.trailing_zeros() as usize;
    (0..dims)
        .map(|d| 1usize << (bits / dims + usize::from(d < bits % dims)))
        .collect()
}

impl Network {
    pub fn new(kind: TopologyKind, nodes: usize) -> Result<Self> {
        if nodes == 0 || !nodes.is_power_of_two() {
            return Err(Error::Cluster(format!(
                "node count {nodes} must be a power of two"
            )));
        }
        let mut adjacency = vec![Vec::new(); nodes];
        let mut link = |a: usize, b: usize| {
            if a != b && !adjacency[a].contains(&b) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        };
        match kind {
            TopologyKind::Ptop | TopologyKind::Switched => {
                for a in 0..nodes {
                    for b in a + 1..nodes {
                        link(a, b);
                    }
                }
            }
            TopologyKind::Hypercube | TopologyKind::Hypercubepp => {
                let d = nodes.trailing_zeros();
                for a in 0..nodes {
                    for bit in 0..d {
                        link(a, a ^ (1 << bit));
                    }
                    if kind == TopologyKind::Hypercubepp {
                        link(a, a ^ (nodes - 1));
                    }
                }
            }
            TopologyKind::Torus2d | TopologyKind::Torus3d => {
                let ndim = if kind == TopologyKind::Torus2d { 2 } else { 3 };
                let shape = torus_shape(nodes, ndim);
                let strides: Vec<usize> = shape
                    .iter()
                    .scan(1, |acc, &s| {
                        let st = *acc;
                        *acc *= s;
                        Some(st)
                    })
                    .collect();
                for a in 0..nodes {
                    for d in 0..ndim {
                        let coord = (a / strides[d]) % shape[d];
                        for next in [(coord + 1) % shape[d], (coord + shape[d] - 1) % shape[d]] {
                            link(a, a - coord * strides[d] + next * strides[d]);
                        }
                    }
                }
            }
        }
        for n in &mut adjacency {
            n.sort_unstable();
        }
        Ok(Network { kind, adjacency })
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, n: usize) -> &[usize] {
        &self.adjacency[n]
    }

    /// Shortest path from `src` to `dst` as a node list, ties broken toward
    /// the lowest-numbered neighbour.
    pub fn route(&self, src: usize, dst: usize) -> Vec<usize> {
        let n = self.nodes();
        let mut prev = vec![usize::MAX; n];
        let mut queue = VecDeque::from([src]);
        prev[src] = src;
        while let Some(u) = queue.pop_front() {
            if u == dst {
                break;
            }
            for &v in &self.adjacency[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![dst];
        let mut cur = dst;
        while cur != src {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    pub fn hops(&self, src: usize, dst: usize) -> usize {
        self.route(src, dst).len() - 1
    }

    /// Mean shortest-path length over ordered pairs of distinct nodes.
    pub fn average_hops(&self) -> f64 {
        let n = self.nodes();
        if n < 2 {
            return 0.0;
        }
        let total: usize = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .map(|(a, b)| self.hops(a, b))
            .sum();
        total as f64 / (n * (n - 1)) as f64
    }
}
