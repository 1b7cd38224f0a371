//! Long-range smooth particle mesh Ewald, end to end.
//!
//! The crate covers three layers:
//!
//! - numerics: B-spline charge spreading ([`spme`]), 3D FFTs built from 1D
//!   transforms and bit-dimension permutations ([`fft`], [`perm`]), and a
//!   direct reciprocal-space Ewald reference ([`ewald`]);
//! - a simulated cluster ([`cluster`]) that runs the same pipeline over
//!   Z-slabs with explicit all-to-all corner turns and checks it against the
//!   single-node result;
//! - an analytic timing model ([`perf`]) for FFT passes, all-to-all exchange
//!   over several network topologies, and compute/communication balance.

pub mod atoms;
pub mod cluster;
pub mod error;
pub mod ewald;
pub mod fft;
pub mod perf;
pub mod perm;
pub mod report;
pub mod spline;
pub mod spme;
pub mod topology;
pub mod verify;
pub mod volume;

pub use atoms::AtomSet;
pub use cluster::{distributed_fft3d, distributed_lr_pipeline, make_schedule, ClusterConfig, ExecMode};
pub use error::{Error, Result};
pub use fft::{fft_1d, fft_3d, Direction, FftPlan};
pub use perm::{apply_permutation, parse_perm_file, BitLabel, PermutationSpec};
pub use spme::{lr_pipeline, make_greens, Cell, ForceSet, GreensVolume, LrResult};
pub use volume::{Dims, Volume3D};
pub use topology::{Network, TopologyKind};
