//! Analytic timing model: FFT pass time on 8-lane pipelines, all-to-all time
//! over a network, flop counts, and compute/communication balance.

pub mod report;
pub mod tables;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::TopologyKind;
pub use tables::GridSize;
use tables::{NETWORK_OVERRIDES, NETWORK_TABLE};

pub const LANES_PER_UNIT: u64 = 8;
pub const BITS_PER_SAMPLE: u64 = 64;
pub const DEFAULT_BANDWIDTH_BPS: f64 = 78e9;
pub const NOMINAL_BANDWIDTH_BPS: f64 = 100e9;
pub const DEFAULT_FMAX_HZ: f64 = 300e6;

/// Per-pass hardware latencies in clock cycles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyCycles {
    pub mem_fetch: u64,
    pub transpose: u64,
    pub fft: u64,
}

impl Default for LatencyCycles {
    /// Upper end of the memory fetch range.
    fn default() -> Self {
        LatencyCycles {
            mem_fetch: 200,
            transpose: 134,
            fft: 11,
        }
    }
}

impl LatencyCycles {
    pub fn per_pass(&self) -> u64 {
        self.mem_fetch + self.transpose + self.fft
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub kind: TopologyKind,
    pub nodes: usize,
    pub links: usize,
    pub hopcount: f64,
}

impl Topology {
    pub fn new(kind: TopologyKind, nodes: usize, links: usize, hopcount: f64) -> Result<Self> {
        if nodes == 0 || links == 0 || !(hopcount > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "topology needs positive nodes, links and hopcount (got {nodes}, {links}, {hopcount})"
            )));
        }
        Ok(Topology {
            kind,
            nodes,
            links,
            hopcount,
        })
    }

    /// Hopcount and link count as listed in the network table.
    pub fn from_table(kind: TopologyKind, nodes: usize) -> Result<Self> {
        let row = NETWORK_TABLE
            .iter()
            .find(|r| r.kind == kind && r.nodes == nodes);
        match row {
            Some(r) => Topology::new(kind, nodes, r.links, r.hopcount),
            None if kind.is_single_hop() => Topology::new(kind, nodes, 4, 1.0),
            None => Err(unsupported(kind, nodes)),
        }
    }
}

fn unsupported(kind: TopologyKind, nodes: usize) -> Error {
    Error::UnsupportedTopology(format!("{} with {nodes} nodes", kind.table_name()))
}

/// Average hopcount as tabulated. Single-hop networks are 1 at any size.
pub fn hopcount(kind: TopologyKind, nodes: usize) -> Result<f64> {
    if kind.is_single_hop() {
        return Ok(1.0);
    }
    NETWORK_TABLE
        .iter()
        .find(|r| r.kind == kind && r.nodes == nodes)
        .map(|r| r.hopcount)
        .ok_or_else(|| unsupported(kind, nodes))
}

/// Bits moved by one 3D FFT.
pub fn data_volume_bits(size: GridSize) -> f64 {
    (size.points() * BITS_PER_SAMPLE) as f64
}

pub fn fft_pass_cycles(size: GridSize, units: usize) -> f64 {
    size.points() as f64 / (LANES_PER_UNIT as f64 * units as f64)
}

/// Seconds for one full pass of 1D transforms along one axis.
pub fn fft_pass_time(size: GridSize, units: usize, fmax_hz: f64) -> f64 {
    fft_pass_cycles(size, units) / fmax_hz
}

/// `D (N-1)/N * H / (B N L)` seconds.
pub fn a2a_time(d_bits: f64, topo: &Topology, bandwidth_bps: f64) -> f64 {
    let n = topo.nodes as f64;
    if topo.nodes <= 1 {
        return 0.0;
    }
    d_bits * (n - 1.0) / n * topo.hopcount / (bandwidth_bps * n * topo.links as f64)
}

/// `15 n³ lg n` for an `n³` complex transform.
pub fn fft_flops(n: usize) -> f64 {
    let n3 = (n as f64).powi(3);
    15.0 * n3 * (n as f64).log2()
}

pub fn gflops(n: usize, seconds: f64) -> f64 {
    fft_flops(n) / seconds / 1e9
}

/// Ideal runtime of `passes` back-to-back passes, optionally with the fixed
/// per-pass unit latencies added.
pub fn pipeline_ideal_time(
    size: GridSize,
    units: usize,
    fmax_hz: f64,
    passes: u32,
    latency: Option<LatencyCycles>,
) -> f64 {
    let mut cycles = passes as f64 * fft_pass_cycles(size, units);
    if let Some(l) = latency {
        cycles += (passes as u64 * l.per_pass()) as f64;
    }
    cycles / fmax_hz
}

/// All-to-all time for a tabulated cell, honouring per-cell overrides.
/// Returns the time and the override that applied, if any.
pub fn table_a2a_time(
    kind: TopologyKind,
    nodes: usize,
    size: GridSize,
    bandwidth_bps: f64,
) -> Result<(f64, Option<&'static tables::CellOverride>)> {
    let mut topo = Topology::from_table(kind, nodes)?;
    let over = NETWORK_OVERRIDES
        .iter()
        .find(|o| o.kind == kind && o.nodes == nodes && o.size == size);
    if let Some(o) = over {
        topo.links = o.effective_links;
    }
    Ok((a2a_time(data_volume_bits(size), &topo, bandwidth_bps), over))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancePoint {
    pub size: String,
    pub units: usize,
    pub nodes: usize,
    pub topology: TopologyKind,
    pub fft_us: f64,
    pub a2a_us: f64,
    /// `|fft - a2a| / max(fft, a2a)`.
    pub mismatch: f64,
}

/// Pairs of pipeline count and network configuration whose FFT pass time and
/// all-to-all time agree within `threshold`. Pipelines must divide evenly
/// over nodes.
pub fn balance_search(
    sizes: &[GridSize],
    units: &[usize],
    networks: &[(usize, TopologyKind)],
    fmax_hz: f64,
    bandwidth_bps: f64,
    threshold: f64,
) -> Result<Vec<BalancePoint>> {
    let mut out = Vec::new();
    for &size in sizes {
        for &u in units {
            let fft = fft_pass_time(size, u, fmax_hz) * 1e6;
            for &(nodes, kind) in networks {
                if nodes > u || u % nodes != 0 {
                    continue;
                }
                let (a2a, _) = table_a2a_time(kind, nodes, size, bandwidth_bps)?;
                let a2a = a2a * 1e6;
                let mismatch = (fft - a2a).abs() / fft.max(a2a);
                if mismatch <= threshold {
                    out.push(BalancePoint {
                        size: size.to_string(),
                        units: u,
                        nodes,
                        topology: kind,
                        fft_us: fft,
                        a2a_us: a2a,
                        mismatch,
                    });
                }
            }
        }
    }
    Ok(out)
}

pub const DEFAULT_BALANCE_THRESHOLD: f64 = 0.25;

/// Every tabulated `(nodes, kind)` network.
pub fn table_networks() -> Vec<(usize, TopologyKind)> {
    NETWORK_TABLE.iter().map(|r| (r.nodes, r.kind)).collect()
}

/// Estimated long-range timestep for a given atom count.
///
/// Each pipeline spreads and interpolates one atom per cycle; the two 3D
/// FFTs take six passes; the four corner turns (two per 3D FFT) go over
/// the network. Charge spreading and force interpolation are not overlapped
/// with the transforms.
pub fn lr_timestep(
    atoms: usize,
    size: GridSize,
    nodes: usize,
    pipes_per_node: usize,
    fmax_hz: f64,
    topo: &Topology,
    bandwidth_bps: f64,
) -> f64 {
    let pipes = (nodes * pipes_per_node) as f64;
    let atom_cycles = 2.0 * (atoms as f64 / pipes).ceil();
    let fft = pipeline_ideal_time(size, nodes * pipes_per_node, fmax_hz, 6, None);
    let a2a = 2.0 * a2a_time(data_volume_bits(size), topo, bandwidth_bps);
    atom_cycles / fmax_hz + fft + a2a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn us(s: f64) -> f64 {
        s * 1e6
    }

    #[test]
    fn pass_time_examples() {
        assert_eq!(fft_pass_cycles(GridSize::cube(32), 1), 4096.0);
        assert!((us(fft_pass_time(GridSize::cube(32), 1, 300e6)) - 13.653).abs() < 1e-3);
        assert!((us(fft_pass_time(GridSize::cube(8), 1, 300e6)) - 64.0 / 300.0).abs() < 1e-12);
    }

    #[test]
    fn work_scales_perfectly() {
        let s = GridSize::cube(64);
        let base = fft_pass_time(s, 1, 300e6);
        for u in [2, 4, 8, 16, 128] {
            assert!((fft_pass_time(s, u, 300e6) * u as f64 - base).abs() < 1e-18);
        }
    }

    #[test]
    fn a2a_examples() {
        let d = data_volume_bits(GridSize::cube(128));
        let ptop = Topology::from_table(TopologyKind::Ptop, 4).unwrap();
        assert!((us(a2a_time(d, &ptop, 78e9)) - 107.5).abs() < 0.05);
        let sw = Topology::from_table(TopologyKind::Switched, 64).unwrap();
        assert!((us(a2a_time(d, &sw, 78e9)) - 6.6).abs() < 0.05);
        let one = Topology::new(TopologyKind::Switched, 1, 4, 1.0).unwrap();
        assert_eq!(a2a_time(d, &one, 78e9), 0.0);
    }

    #[test]
    fn a2a_decreases_with_nodes() {
        let d = data_volume_bits(GridSize::cube(64));
        let mut last = f64::INFINITY;
        for n in [2, 4, 8, 16, 32, 64] {
            let t = a2a_time(d, &Topology::new(TopologyKind::Switched, n, 4, 1.0).unwrap(), 78e9);
            let expect = d * (n as f64 - 1.0) / (n as f64 * n as f64 * 78e9 * 4.0);
            assert!((t - expect).abs() <= 1e-15 * expect);
            assert!(t < last);
            last = t;
        }
    }

    #[test]
    fn flops_examples() {
        assert_eq!(fft_flops(32), 2_457_600.0);
        assert_eq!(fft_flops(2), 120.0);
        assert!((gflops(32, 3.87e-6) - 635.0).abs() < 0.5);
    }

    #[test]
    fn hopcounts() {
        assert_eq!(hopcount(TopologyKind::Hypercube, 16).unwrap(), 2.0);
        assert_eq!(hopcount(TopologyKind::Torus2d, 64).unwrap(), 4.0);
        assert_eq!(hopcount(TopologyKind::Switched, 1024).unwrap(), 1.0);
        assert!(hopcount(TopologyKind::Torus3d, 128).is_err());
    }

    #[test]
    fn ideal_times() {
        let t = pipeline_ideal_time(GridSize::cube(64), 16, 275e6, 3, None);
        assert!((us(t) - 22.34).abs() < 0.01);
        let t = pipeline_ideal_time(GridSize::cube(32), 1, 290e6, 3, None);
        assert!((us(t) - 42.37).abs() < 0.01);
        let with = pipeline_ideal_time(GridSize::cube(32), 16, 266e6, 3, Some(LatencyCycles::default()));
        let without = pipeline_ideal_time(GridSize::cube(32), 16, 266e6, 3, None);
        assert!(((with - without) * 266e6 - 3.0 * 345.0).abs() < 1e-6);
    }

    #[test]
    fn zero_threshold_is_empty() {
        let pts = balance_search(
            &tables::TABLE_SIZES,
            &tables::TABLE_UNITS,
            &table_networks(),
            300e6,
            78e9,
            0.0,
        )
        .unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn override_applies_to_one_cell() {
        let (t, o) = table_a2a_time(TopologyKind::Torus3d, 8, GridSize::cube(128), 78e9).unwrap();
        assert!(o.is_some());
        assert!((us(t) - 47.1).abs() < 0.05);
        let (t, o) = table_a2a_time(TopologyKind::Torus3d, 8, GridSize::cube(96), 78e9).unwrap();
        assert!(o.is_none());
        assert!((us(t) - 39.7).abs() < 0.05);
    }
}
