//! Reference timing tables the model is checked against.

use crate::topology::TopologyKind;
use TopologyKind::*;

/// FFT grid extents; not restricted to powers of two (96³ appears in the
/// tables).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSize {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl GridSize {
    pub const fn new(nx: usize, ny: usize, nz: usize) -> Self {
        GridSize { nx, ny, nz }
    }

    pub const fn cube(n: usize) -> Self {
        GridSize::new(n, n, n)
    }

    pub fn points(&self) -> u64 {
        (self.nx * self.ny * self.nz) as u64
    }

    pub fn is_cube(&self) -> bool {
        self.nx == self.ny && self.ny == self.nz
    }
}

impl std::fmt::Display for GridSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// Column order of both compute and network tables.
pub const TABLE_SIZES: [GridSize; 5] = [
    GridSize::cube(32),
    GridSize::cube(64),
    GridSize::new(64, 64, 128),
    GridSize::cube(96),
    GridSize::cube(128),
];

pub const TABLE_UNITS: [usize; 8] = [1, 2, 4, 8, 16, 32, 64, 128];

/// Microseconds per FFT pass at 300 MHz, indexed `[size][units]`.
pub const FFT_TABLE_US: [[f64; 8]; 5] = [
    [13.7, 6.8, 3.4, 1.7, 0.9, 0.4, 0.2, 0.1],
    [109.2, 54.6, 27.3, 13.7, 6.8, 3.4, 1.7, 0.9],
    [218.5, 109.2, 54.6, 27.3, 13.7, 6.8, 3.4, 1.7],
    [368.6, 184.3, 92.2, 46.1, 23.0, 11.5, 5.8, 2.9],
    [873.8, 436.9, 218.5, 109.2, 54.6, 27.3, 13.7, 6.8],
];

pub const TABLE_FMAX_HZ: f64 = 300e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkRow {
    pub nodes: usize,
    pub kind: TopologyKind,
    pub hopcount: f64,
    pub links: usize,
    /// Printed all-to-all times in microseconds, one per [`TABLE_SIZES`].
    pub printed_us: [f64; 5],
}

const fn row(nodes: usize, kind: TopologyKind, hopcount: f64, links: usize, printed_us: [f64; 5]) -> NetworkRow {
    NetworkRow {
        nodes,
        kind,
        hopcount,
        links,
        printed_us,
    }
}

pub const NETWORK_TABLE: [NetworkRow; 19] = [
    row(2, Ptop, 1.0, 4, [1.7, 13.4, 26.9, 45.4, 107.5]),
    row(4, Ptop, 1.0, 3, [1.7, 13.4, 26.9, 45.4, 107.5]),
    row(8, Torus2d, 1.5, 4, [1.1, 8.8, 17.6, 29.8, 70.6]),
    row(8, Hypercube, 1.5, 3, [1.5, 11.8, 23.5, 39.7, 94.1]),
    row(8, Hypercubepp, 1.25, 4, [0.9, 7.4, 14.7, 24.8, 58.8]),
    row(8, Torus3d, 1.5, 3, [1.5, 11.8, 23.5, 39.7, 47.1]),
    row(8, Switched, 1.0, 4, [0.7, 5.9, 11.8, 19.8, 47.1]),
    row(16, Torus2d, 2.0, 4, [0.8, 6.3, 12.6, 21.3, 50.4]),
    row(16, Torus3d, 2.0, 6, [0.5, 4.2, 8.4, 14.2, 33.6]),
    row(16, Hypercube, 2.0, 4, [0.8, 6.3, 12.6, 21.3, 50.4]),
    row(16, Switched, 1.0, 4, [0.4, 3.2, 6.3, 10.6, 25.2]),
    row(32, Torus2d, 3.0, 4, [0.6, 4.9, 9.8, 16.5, 39.1]),
    row(32, Torus3d, 2.5, 6, [0.3, 2.7, 5.4, 9.2, 21.7]),
    row(32, Hypercube, 2.5, 5, [0.4, 3.3, 6.5, 11.0, 26.0]),
    row(32, Switched, 1.0, 4, [0.2, 1.6, 3.3, 5.5, 13.0]),
    row(64, Torus2d, 4.0, 4, [0.4, 3.3, 6.6, 11.2, 26.5]),
    row(64, Torus3d, 3.0, 6, [0.2, 1.7, 3.3, 5.6, 13.2]),
    row(64, Hypercube, 3.0, 6, [0.2, 1.7, 3.3, 5.6, 13.2]),
    row(64, Switched, 1.0, 4, [0.1, 0.8, 1.7, 2.8, 6.6]),
];

/// A printed network cell that the formula does not reproduce with the
/// row's own link count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellOverride {
    pub nodes: usize,
    pub kind: TopologyKind,
    pub size: GridSize,
    pub effective_links: usize,
    pub note: &'static str,
}

/// The 8-node 3D torus at 128³ is printed as 47.1 μs; with its listed three
/// links the formula gives 94.1 μs. Six links (a 2x2x2 torus with doubled
/// cables) reproduce the printed value. The other cells of the row match
/// three links.
pub const NETWORK_OVERRIDES: [CellOverride; 1] = [CellOverride {
    nodes: 8,
    kind: Torus3d,
    size: GridSize::cube(128),
    effective_links: 6,
    note: "printed value inconsistent with listed links; reproduced with effective L=6",
}];

/// Stand-alone BRAM FFT measurements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BramRow {
    pub size: GridSize,
    pub pipes: usize,
    pub fmax_hz: f64,
    pub measured_us: f64,
    pub ideal_us: f64,
    /// Reference GFlops for the 16-pipe builds.
    pub gflops: Option<f64>,
}

pub const BRAM_TABLE: [BramRow; 4] = [
    BramRow {
        size: GridSize::cube(32),
        pipes: 1,
        fmax_hz: 290e6,
        measured_us: 59.0,
        ideal_us: 42.0,
        gflops: None,
    },
    BramRow {
        size: GridSize::cube(32),
        pipes: 8,
        fmax_hz: 243e6,
        measured_us: 8.5,
        ideal_us: 6.3,
        gflops: None,
    },
    BramRow {
        size: GridSize::cube(32),
        pipes: 16,
        fmax_hz: 266e6,
        measured_us: 3.87,
        ideal_us: 3.27,
        gflops: Some(647.0),
    },
    BramRow {
        size: GridSize::cube(64),
        pipes: 16,
        fmax_hz: 275e6,
        measured_us: 24.5,
        ideal_us: 22.3,
        gflops: Some(963.0),
    },
];

/// Marked compute/network pairings at 128³: units and the network rows
/// `(nodes, kind)` judged to balance them.
pub const BALANCE_MARKERS: [(u8, usize, &[(usize, TopologyKind)]); 5] = [
    (1, 8, &[(2, Ptop), (4, Ptop)]),
    (2, 16, &[(8, Hypercubepp)]),
    (3, 32, &[(16, Torus3d), (16, Switched)]),
    (4, 64, &[(32, Switched), (64, Torus3d)]),
    (5, 128, &[(64, Switched)]),
];
