//! Round-robin all-to-all schedules and static slot packing for multihop
//! networks.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::Network;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub src: usize,
    pub dst: usize,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    /// 1-based round number; round `i` sends `n -> (n + i) mod N`.
    pub index: usize,
    pub transfers: Vec<Transfer>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct A2ASchedule {
    pub nodes: usize,
    pub rounds: Vec<Round>,
}

/// `N - 1` rounds; in round `i`, node `n` sends to `(n + i) mod N`.
pub fn make_schedule(nodes: usize) -> A2ASchedule {
    make_schedule_with_payload(nodes, 0)
}

pub fn make_schedule_with_payload(nodes: usize, bytes: u64) -> A2ASchedule {
    let rounds = (1..nodes.max(1))
        .map(|i| Round {
            index: i,
            transfers: (0..nodes)
                .map(|n| Transfer {
                    src: n,
                    dst: (n + i) % nodes,
                    bytes,
                })
                .collect(),
        })
        .collect();
    A2ASchedule { nodes, rounds }
}

impl A2ASchedule {
    /// Each round is a perfect matching (every node sends once and receives
    /// once) and every ordered pair of distinct nodes appears exactly once.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes;
        let mut seen = vec![false; n * n];
        for round in &self.rounds {
            let mut sends = vec![0u32; n];
            let mut recvs = vec![0u32; n];
            for t in &round.transfers {
                if t.src >= n || t.dst >= n || t.src == t.dst {
                    return Err(Error::Cluster(format!(
                        "round {}: invalid transfer {}->{}",
                        round.index, t.src, t.dst
                    )));
                }
                sends[t.src] += 1;
                recvs[t.dst] += 1;
                let slot = &mut seen[t.src * n + t.dst];
                if *slot {
                    return Err(Error::Cluster(format!(
                        "pair {}->{} scheduled twice",
                        t.src, t.dst
                    )));
                }
                *slot = true;
            }
            if sends.iter().chain(&recvs).any(|&c| c > 1) {
                return Err(Error::Cluster(format!(
                    "round {} is not a matching",
                    round.index
                )));
            }
        }
        for s in 0..n {
            for d in 0..n {
                if s != d && !seen[s * n + d] {
                    return Err(Error::Cluster(format!("pair {s}->{d} never scheduled")));
                }
            }
        }
        Ok(())
    }

    /// One line per round: `round i: src->dst[bytes], ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            let body = r
                .transfers
                .iter()
                .map(|t| format!("{}->{}[{}]", t.src, t.dst, t.bytes))
                .collect::<Vec<_>>()
                .join(", ");
            writeln!(out, "round {}: {}", r.index, body).unwrap();
        }
        out
    }

    /// Parses the text written by [`A2ASchedule::dump`].
    pub fn parse_dump(nodes: usize, text: &str) -> Result<Self> {
        let bad = |line: &str| Error::Format(format!("bad schedule line '{line}'"));
        let mut rounds = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let rest = line.strip_prefix("round ").ok_or_else(|| bad(line))?;
            let (idx, body) = rest.split_once(':').ok_or_else(|| bad(line))?;
            let index = idx.trim().parse().map_err(|_| bad(line))?;
            let mut transfers = Vec::new();
            for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (pair, bytes) = item.split_once('[').ok_or_else(|| bad(line))?;
                let (src, dst) = pair.split_once("->").ok_or_else(|| bad(line))?;
                transfers.push(Transfer {
                    src: src.trim().parse().map_err(|_| bad(line))?,
                    dst: dst.trim().parse().map_err(|_| bad(line))?,
                    bytes: bytes.trim_end_matches(']').parse().map_err(|_| bad(line))?,
                });
            }
            rounds.push(Round { index, transfers });
        }
        Ok(A2ASchedule { nodes, rounds })
    }
}

/// Result of packing every schedule fragment onto per-link slot timelines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackedSchedule {
    /// Slots until the last fragment arrives.
    pub makespan_slots: usize,
    /// Lower bound: the busiest directed link's fragment count.
    pub busiest_link_slots: usize,
    pub fragments: usize,
    pub mean_hops: f64,
    /// Largest number of fragments waiting at any node between hops.
    pub max_buffer_occupancy: usize,
}

/// Greedy first-fit packing of the all-to-all onto a (possibly multihop)
/// network.
///
/// Every ordered pair exchanges `fragments_per_pair` unit fragments. In
/// schedule order, each fragment follows its shortest route and takes, hop
/// by hop, the earliest free slot on each directed link no earlier than its
/// arrival at that hop. A fragment that has to wait sits in the node's
/// buffer; the maximum buffer occupancy over time is reported.
pub fn pack_schedule(
    schedule: &A2ASchedule,
    network: &Network,
    fragments_per_pair: usize,
) -> Result<PackedSchedule> {
    if network.nodes() != schedule.nodes {
        return Err(Error::Cluster(format!(
            "schedule covers {} nodes but the network has {}",
            schedule.nodes,
            network.nodes()
        )));
    }
    let mut busy: HashMap<(usize, usize), Vec<bool>> = HashMap::new();
    // (node, slot) -> fragments waiting there during that slot
    let mut waiting: HashMap<(usize, usize), usize> = HashMap::new();
    let mut makespan = 0;
    let mut fragments = 0;
    let mut hop_total = 0;
    for round in &schedule.rounds {
        for t in &round.transfers {
            let path = network.route(t.src, t.dst);
            for _ in 0..fragments_per_pair {
                let mut ready = 0usize;
                for (h, w) in path.windows(2).enumerate() {
                    let timeline = busy.entry((w[0], w[1])).or_default();
                    let mut slot = ready;
                    while timeline.get(slot).copied().unwrap_or(false) {
                        slot += 1;
                    }
                    if timeline.len() <= slot {
                        timeline.resize(slot + 1, false);
                    }
                    timeline[slot] = true;
                    if h > 0 {
                        for s in ready..slot {
                            *waiting.entry((w[0], s)).or_default() += 1;
                        }
                    }
                    ready = slot + 1;
                }
                makespan = makespan.max(ready);
                fragments += 1;
                hop_total += path.len() - 1;
            }
        }
    }
    let busiest = busy
        .values()
        .map(|t| t.iter().filter(|&&b| b).count())
        .max()
        .unwrap_or(0);
    Ok(PackedSchedule {
        makespan_slots: makespan,
        busiest_link_slots: busiest,
        fragments,
        mean_hops: if fragments == 0 {
            0.0
        } else {
            hop_total as f64 / fragments as f64
        },
        max_buffer_occupancy: waiting.values().copied().max().unwrap_or(0),
    })
}
