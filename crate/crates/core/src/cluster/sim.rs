//! Slab-decomposed 3D FFT and long-range pipeline over simulated nodes.
//!
//! Pipelines own contiguous Z-slabs for the X and Y passes and Y-slabs for
//! the Z pass. The all-to-all corner turn between them runs as explicit
//! messages following the round-robin schedule, with a barrier after every
//! round. Every 1D transform sees exactly the pencil the single-node path
//! sees, so distributed and single-node spectra agree bit for bit.

use std::ops::Range;
use std::sync::{mpsc, Barrier};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::AtomSet;
use crate::cluster::schedule::{make_schedule_with_payload, A2ASchedule};
use crate::error::{Error, Result};
use crate::fft::{
    plans_for, relayout, relayout_bits, scale_inverse, transform_pencils, Direction, FftPlan,
    XYZ, YZX, ZXY,
};
use crate::perm::Axis;
use crate::spme::{
    grid_energy, interpolate_slab, multiply_greens, spread_slab, support_rows, Cell, ForceSet,
    GreensVolume, LrResult,
};
use crate::topology::TopologyKind;
use crate::volume::{Dims, Volume3D};

/// Each sample is accounted as a single-precision complex word on the wire.
pub const BITS_PER_SAMPLE: u64 = 64;

pub const DEFAULT_LINK_BANDWIDTH_BPS: f64 = 78e9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub nodes: usize,
    pub pipes_per_node: usize,
    pub topology: TopologyKind,
    pub links_per_node: usize,
    pub link_bandwidth_bps: f64,
}

impl ClusterConfig {
    pub fn new(nodes: usize, pipes_per_node: usize, topology: TopologyKind) -> Self {
        ClusterConfig {
            nodes,
            pipes_per_node,
            topology,
            links_per_node: 4,
            link_bandwidth_bps: DEFAULT_LINK_BANDWIDTH_BPS,
        }
    }

    /// `nodes` boards with one pipeline each on a switched network.
    pub fn switched(nodes: usize) -> Self {
        ClusterConfig::new(nodes, 1, TopologyKind::Switched)
    }

    pub fn pipelines(&self) -> usize {
        self.nodes * self.pipes_per_node
    }

    pub fn node_of(&self, pipe: usize) -> usize {
        pipe / self.pipes_per_node
    }

    pub fn validate(&self, dims: Dims) -> Result<()> {
        if self.nodes == 0 || !self.nodes.is_power_of_two() {
            return Err(Error::Cluster(format!(
                "node count {} must be a power of two",
                self.nodes
            )));
        }
        if self.pipes_per_node == 0 {
            return Err(Error::Cluster("pipes_per_node must be >= 1".into()));
        }
        if self.links_per_node == 0 || !(self.link_bandwidth_bps > 0.0) {
            return Err(Error::Cluster("links and bandwidth must be positive".into()));
        }
        let p = self.pipelines();
        for (axis, extent) in [("z", dims.nz), ("y", dims.ny)] {
            if extent % p != 0 {
                return Err(Error::Cluster(format!(
                    "{p} pipelines do not divide the {axis} extent {extent}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    /// Nodes run one after another inside each round.
    Sequential,
    /// One worker thread per node; rounds are separated by a barrier.
    Threaded,
}

/// Equal contiguous ranges of one axis, one per pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlabAssignment {
    pub axis: Axis,
    pub extent: usize,
    pub pipelines: usize,
}

impl SlabAssignment {
    pub fn new(axis: Axis, extent: usize, pipelines: usize) -> Result<Self> {
        if pipelines == 0 || extent % pipelines != 0 {
            return Err(Error::Cluster(format!(
                "{pipelines} pipelines do not divide extent {extent}"
            )));
        }
        Ok(SlabAssignment {
            axis,
            extent,
            pipelines,
        })
    }

    pub fn thickness(&self) -> usize {
        self.extent / self.pipelines
    }

    pub fn range(&self, pipe: usize) -> Range<usize> {
        let t = self.thickness();
        pipe * t..(pipe + 1) * t
    }

    pub fn owner(&self, index: usize) -> usize {
        index / self.thickness()
    }
}

/// Distributed volume: one block per pipeline.
///
/// Z-slabs are stored X fastest, then Y, then local Z. Y-slabs are stored Z
/// fastest, then X, then local Y, so Z pencils are contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct Slabs {
    pub axis: Axis,
    pub dims: Dims,
    pub parts: Vec<Vec<Complex64>>,
}

impl Slabs {
    pub fn scatter_z(v: &Volume3D, pipelines: usize) -> Result<Self> {
        let dims = v.dims();
        SlabAssignment::new(Axis::Z, dims.nz, pipelines)?;
        let size = dims.len() / pipelines;
        Ok(Slabs {
            axis: Axis::Z,
            dims,
            parts: v.data().chunks(size).map(|c| c.to_vec()).collect(),
        })
    }

    pub fn pipelines(&self) -> usize {
        self.parts.len()
    }

    fn check(&self) -> Result<()> {
        let p = self.pipelines();
        if p == 0 || !matches!(self.axis, Axis::Y | Axis::Z) {
            return Err(Error::Cluster("slabs must be split along Y or Z".into()));
        }
        let extent = if self.axis == Axis::Z { self.dims.nz } else { self.dims.ny };
        SlabAssignment::new(self.axis, extent, p)?;
        let want = self.dims.len() / p;
        if let Some((i, part)) = self.parts.iter().enumerate().find(|(_, s)| s.len() != want) {
            return Err(Error::Cluster(format!(
                "slab {i} holds {} samples, expected {want}",
                part.len()
            )));
        }
        Ok(())
    }

    /// Reassembles the global volume in natural XYZ layout.
    pub fn gather(&self) -> Result<Volume3D> {
        self.check()?;
        let flat: Vec<Complex64> = self.parts.concat();
        let data = match self.axis {
            Axis::Z => flat,
            _ => relayout(self.dims, ZXY, XYZ)?.apply(&flat)?,
        };
        Volume3D::from_vec(self.dims, data)
    }

    /// Address bits of one local block in its storage order.
    fn local_bits(&self) -> [u32; 3] {
        let p = self.pipelines() as u32;
        let [bx, by, bz] = self.dims.bits();
        match self.axis {
            Axis::Z => [bx, by, bz - p.trailing_zeros()],
            _ => [bx, by - p.trailing_zeros(), bz],
        }
    }
}

/// One message of a corner turn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    /// 0 for on-node pipe-to-pipe moves, otherwise the schedule round.
    pub round: usize,
    pub src_node: usize,
    pub dst_node: usize,
    pub bits: u64,
    pub local: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TurnStats {
    pub messages: Vec<MessageRecord>,
    pub off_node_bits: u64,
    pub local_bits: u64,
}

impl TurnStats {
    pub fn off_node_messages(&self) -> impl Iterator<Item = &MessageRecord> {
        self.messages.iter().filter(|m| !m.local)
    }
}

struct Fragment {
    src_pipe: usize,
    dst_pipe: usize,
    data: Vec<Complex64>,
}

/// Moves `payloads[src][dst]` to `received[dst][src]` following `schedule`.
fn exchange(
    payloads: Vec<Vec<Vec<Complex64>>>,
    config: &ClusterConfig,
    schedule: &A2ASchedule,
    mode: ExecMode,
) -> (Vec<Vec<Vec<Complex64>>>, TurnStats) {
    let pipes = config.pipelines();
    let ppn = config.pipes_per_node;
    let nodes = config.nodes;

    // outgoing fragments grouped by source node, then destination node
    let mut outbox: Vec<Vec<Vec<Fragment>>> = (0..nodes)
        .map(|_| (0..nodes).map(|_| Vec::new()).collect())
        .collect();
    for (src_pipe, row) in payloads.into_iter().enumerate() {
        for (dst_pipe, data) in row.into_iter().enumerate() {
            outbox[src_pipe / ppn][dst_pipe / ppn].push(Fragment {
                src_pipe,
                dst_pipe,
                data,
            });
        }
    }

    let mut stats = TurnStats::default();
    let bundle_bits = |frags: &[Fragment]| {
        frags.iter().map(|f| f.data.len() as u64).sum::<u64>() * BITS_PER_SAMPLE
    };
    for (n, row) in outbox.iter().enumerate() {
        let bits = bundle_bits(&row[n]);
        stats.messages.push(MessageRecord {
            round: 0,
            src_node: n,
            dst_node: n,
            bits,
            local: true,
        });
        stats.local_bits += bits;
    }
    for round in &schedule.rounds {
        for t in &round.transfers {
            let bits = bundle_bits(&outbox[t.src][t.dst]);
            stats.messages.push(MessageRecord {
                round: round.index,
                src_node: t.src,
                dst_node: t.dst,
                bits,
                local: false,
            });
            stats.off_node_bits += bits;
        }
    }

    let inboxes: Vec<Vec<Fragment>> = match mode {
        ExecMode::Sequential => run_sequential(outbox, schedule),
        ExecMode::Threaded => run_threaded(outbox, schedule),
    };

    let mut received: Vec<Vec<Vec<Complex64>>> =
        (0..pipes).map(|_| vec![Vec::new(); pipes]).collect();
    for frag in inboxes.into_iter().flatten() {
        received[frag.dst_pipe][frag.src_pipe] = frag.data;
    }
    (received, stats)
}

fn run_sequential(mut outbox: Vec<Vec<Vec<Fragment>>>, schedule: &A2ASchedule) -> Vec<Vec<Fragment>> {
    let nodes = outbox.len();
    let mut inbox: Vec<Vec<Fragment>> = (0..nodes).map(|_| Vec::new()).collect();
    for (n, row) in outbox.iter_mut().enumerate() {
        inbox[n].append(&mut row[n]);
    }
    for round in &schedule.rounds {
        let mut in_flight = Vec::new();
        for t in &round.transfers {
            in_flight.push((t.dst, std::mem::take(&mut outbox[t.src][t.dst])));
        }
        // barrier
        for (dst, frags) in in_flight {
            inbox[dst].extend(frags);
        }
    }
    inbox
}

fn run_threaded(outbox: Vec<Vec<Vec<Fragment>>>, schedule: &A2ASchedule) -> Vec<Vec<Fragment>> {
    let nodes = outbox.len();
    let barrier = Barrier::new(nodes);
    let (senders, receivers): (Vec<_>, Vec<_>) =
        (0..nodes).map(|_| mpsc::channel::<Vec<Fragment>>()).unzip();
    std::thread::scope(|scope| {
        let handles: Vec<_> = outbox
            .into_iter()
            .zip(receivers)
            .enumerate()
            .map(|(me, (mut mine, rx))| {
                let senders = senders.clone();
                let barrier = &barrier;
                scope.spawn(move || {
                    let mut inbox = std::mem::take(&mut mine[me]);
                    for round in &schedule.rounds {
                        if let Some(t) = round.transfers.iter().find(|t| t.src == me) {
                            senders[t.dst]
                                .send(std::mem::take(&mut mine[t.dst]))
                                .expect("receiver alive");
                        }
                        let expected = round.transfers.iter().filter(|t| t.dst == me).count();
                        for _ in 0..expected {
                            inbox.extend(rx.recv().expect("sender alive"));
                        }
                        barrier.wait();
                    }
                    inbox
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("node worker panicked"))
            .collect()
    })
}

fn schedule_for(config: &ClusterConfig, dims: Dims) -> A2ASchedule {
    let n = config.nodes as u64;
    let bytes = dims.len() as u64 * BITS_PER_SAMPLE / 8 / (n * n);
    make_schedule_with_payload(config.nodes, bytes)
}

/// All-to-all exchange between Z-slabs and Y-slabs (either direction).
pub fn corner_turn(
    slabs: &Slabs,
    config: &ClusterConfig,
    schedule: &A2ASchedule,
    mode: ExecMode,
) -> Result<(Slabs, TurnStats)> {
    slabs.check()?;
    let dims = slabs.dims;
    let p = slabs.pipelines();
    if p != config.pipelines() {
        return Err(Error::Cluster(format!(
            "{p} slabs for a cluster of {} pipelines",
            config.pipelines()
        )));
    }
    if schedule.nodes != config.nodes {
        return Err(Error::Cluster("schedule does not match node count".into()));
    }
    let (nx, ny, nz) = (dims.nx, dims.ny, dims.nz);
    let lz = nz / p;
    let ly = ny / p;

    match slabs.axis {
        Axis::Z => {
            // z-slab p sends rows y in Y-slab q, z fastest
            let payloads = slabs
                .parts
                .par_iter()
                .map(|part| {
                    (0..p)
                        .map(|q| {
                            let mut msg = Vec::with_capacity(nx * ly * lz);
                            for yl in 0..ly {
                                let y = q * ly + yl;
                                for x in 0..nx {
                                    for zl in 0..lz {
                                        msg.push(part[x + nx * (y + ny * zl)]);
                                    }
                                }
                            }
                            msg
                        })
                        .collect()
                })
                .collect();
            let (received, stats) = exchange(payloads, config, schedule, mode);
            let parts = received
                .into_par_iter()
                .map(|from| {
                    let mut out = vec![Complex64::new(0.0, 0.0); nz * nx * ly];
                    for (src, msg) in from.iter().enumerate() {
                        let mut it = msg.iter();
                        for yl in 0..ly {
                            for x in 0..nx {
                                for zl in 0..lz {
                                    out[src * lz + zl + nz * (x + nx * yl)] = *it.next().unwrap();
                                }
                            }
                        }
                    }
                    out
                })
                .collect();
            Ok((
                Slabs {
                    axis: Axis::Y,
                    dims,
                    parts,
                },
                stats,
            ))
        }
        _ => {
            // y-slab q sends planes z in Z-slab p, x fastest
            let payloads = slabs
                .parts
                .par_iter()
                .map(|part| {
                    (0..p)
                        .map(|dst| {
                            let mut msg = Vec::with_capacity(nx * ly * lz);
                            for zl in 0..lz {
                                let z = dst * lz + zl;
                                for yl in 0..ly {
                                    for x in 0..nx {
                                        msg.push(part[z + nz * (x + nx * yl)]);
                                    }
                                }
                            }
                            msg
                        })
                        .collect()
                })
                .collect();
            let (received, stats) = exchange(payloads, config, schedule, mode);
            let parts = received
                .into_par_iter()
                .map(|from| {
                    let mut out = vec![Complex64::new(0.0, 0.0); nx * ny * lz];
                    for (src, msg) in from.iter().enumerate() {
                        let mut it = msg.iter();
                        for zl in 0..lz {
                            for yl in 0..ly {
                                let y = src * ly + yl;
                                for x in 0..nx {
                                    out[x + nx * (y + ny * zl)] = *it.next().unwrap();
                                }
                            }
                        }
                    }
                    out
                })
                .collect();
            Ok((
                Slabs {
                    axis: Axis::Z,
                    dims,
                    parts,
                },
                stats,
            ))
        }
    }
}

/// Counters from one distributed run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistStats {
    pub pipelines: usize,
    pub schedule: A2ASchedule,
    pub turns: Vec<TurnStats>,
    /// Atom deposits beyond one per atom, from supports that straddle slabs.
    pub replicated_atoms: usize,
}

/// X then Y transforms on every Z-slab.
fn xy_passes(slabs: &mut Slabs, px: &FftPlan, py: &FftPlan) -> Result<()> {
    let bits = slabs.local_bits();
    let to_y = relayout_bits(bits, XYZ, YZX)?.dest_table();
    let back = relayout_bits(bits, YZX, XYZ)?.dest_table();
    for part in &mut slabs.parts {
        transform_pencils(part, px);
        let mut tmp = crate::perm::apply_table(&to_y, part)?;
        transform_pencils(&mut tmp, py);
        *part = crate::perm::apply_table(&back, &tmp)?;
    }
    Ok(())
}

/// Inverse Y then X transforms on every Z-slab.
fn inverse_yx_passes(slabs: &mut Slabs, py: &FftPlan, px: &FftPlan) -> Result<()> {
    let bits = slabs.local_bits();
    let to_y = relayout_bits(bits, XYZ, YZX)?.dest_table();
    let back = relayout_bits(bits, YZX, XYZ)?.dest_table();
    for part in &mut slabs.parts {
        let mut tmp = crate::perm::apply_table(&to_y, part)?;
        transform_pencils(&mut tmp, py);
        *part = crate::perm::apply_table(&back, &tmp)?;
        transform_pencils(part, px);
    }
    Ok(())
}

/// Forward 3D FFT across `config.pipelines()` simulated pipelines.
pub fn distributed_fft3d(
    v: &Volume3D,
    config: &ClusterConfig,
    mode: ExecMode,
) -> Result<(Volume3D, DistStats)> {
    let dims = v.dims();
    config.validate(dims)?;
    let [px, py, pz] = plans_for(dims, Direction::Forward)?;
    let schedule = schedule_for(config, dims);

    let mut slabs = Slabs::scatter_z(v, config.pipelines())?;
    xy_passes(&mut slabs, &px, &py)?;
    let (mut yslabs, turn) = corner_turn(&slabs, config, &schedule, mode)?;
    for part in &mut yslabs.parts {
        transform_pencils(part, &pz);
    }
    let out = yslabs.gather()?;
    Ok((
        out,
        DistStats {
            pipelines: config.pipelines(),
            schedule,
            turns: vec![turn],
            replicated_atoms: 0,
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributedLr {
    pub result: LrResult,
    pub stats: DistStats,
}

/// Full long-range pipeline on the simulated cluster: per-pipeline charge
/// spreading into Z-slabs, X/Y transforms, corner turn, Z transform,
/// influence multiply, inverse Z, second corner turn, inverse Y/X, and
/// per-pipeline force interpolation.
///
/// An atom whose spline support crosses slab boundaries is processed by
/// every pipeline it touches; each deposits (and interpolates) only the rows
/// it owns, and the partial forces are summed.
pub fn distributed_lr_pipeline(
    atoms: &AtomSet,
    greens: &GreensVolume,
    cell: &Cell,
    config: &ClusterConfig,
    mode: ExecMode,
) -> Result<DistributedLr> {
    let dims = greens.dims();
    config.validate(dims)?;
    let p = config.pipelines();
    let zslab = SlabAssignment::new(Axis::Z, dims.nz, p)?;
    let yslab = SlabAssignment::new(Axis::Y, dims.ny, p)?;
    let schedule = schedule_for(config, dims);
    let [px, py, pz] = plans_for(dims, Direction::Forward)?;
    let [ipx, ipy, ipz] = plans_for(dims, Direction::Inverse)?;

    // atoms handled by each pipeline
    let assigned: Vec<Vec<usize>> = (0..p)
        .map(|pipe| {
            let r = zslab.range(pipe);
            (0..atoms.len())
                .filter(|&a| {
                    support_rows(atoms.positions()[a], dims)
                        .iter()
                        .any(|z| r.contains(z))
                })
                .collect()
        })
        .collect();
    let replicated_atoms = assigned.iter().map(Vec::len).sum::<usize>() - atoms.len();
    // an AtomSet is never empty, so pipelines without atoms hold None
    let local_atoms: Vec<Option<AtomSet>> = assigned
        .iter()
        .map(|idx| (!idx.is_empty()).then(|| atoms.reordered(idx)))
        .collect();

    let plane = dims.nx * dims.ny;
    let charge: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|pipe| {
            let r = zslab.range(pipe);
            let mut grid = vec![0.0; plane * r.len()];
            if let Some(a) = &local_atoms[pipe] {
                spread_slab(a, dims, r, &mut grid);
            }
            grid
        })
        .collect();

    let mut slabs = Slabs {
        axis: Axis::Z,
        dims,
        parts: charge
            .iter()
            .map(|g| g.iter().map(|&q| Complex64::new(q, 0.0)).collect())
            .collect(),
    };
    xy_passes(&mut slabs, &px, &py)?;
    let (mut yslabs, turn1) = corner_turn(&slabs, config, &schedule, mode)?;
    let ly = yslab.thickness();
    yslabs
        .parts
        .par_iter_mut()
        .enumerate()
        .for_each(|(pipe, part)| {
            transform_pencils(part, &pz);
            // influence function for this Y-slab in the slab's Z-X-Y order
            let g: Vec<f64> = (0..ly)
                .flat_map(|yl| {
                    let y = pipe * ly + yl;
                    (0..dims.nx).flat_map(move |x| (0..dims.nz).map(move |z| (x, y, z)))
                })
                .map(|(x, y, z)| greens.values()[dims.index(x, y, z)])
                .collect();
            multiply_greens(part, &g);
            transform_pencils(part, &ipz);
        });
    let (mut zslabs, turn2) = corner_turn(&yslabs, config, &schedule, mode)?;
    inverse_yx_passes(&mut zslabs, &ipy, &ipx)?;

    let total = dims.len() as f64;
    let mut energy = 0.0;
    let mut forces = ForceSet::zeros(atoms.len());
    for pipe in 0..p {
        let part = &mut zslabs.parts[pipe];
        scale_inverse(part, dims);
        let potential: Vec<f64> = part.iter().map(|c| c.re * total).collect();
        energy += grid_energy(&charge[pipe], &potential);
        if let Some(a) = &local_atoms[pipe] {
            let partial = interpolate_slab(&potential, dims, zslab.range(pipe), a, cell);
            for (&atom, f) in assigned[pipe].iter().zip(partial.as_slice()) {
                for k in 0..3 {
                    forces.0[atom][k] += f[k];
                }
            }
        }
    }

    Ok(DistributedLr {
        result: LrResult { forces, energy },
        stats: DistStats {
            pipelines: p,
            schedule,
            turns: vec![turn1, turn2],
            replicated_atoms,
        },
    })
}
