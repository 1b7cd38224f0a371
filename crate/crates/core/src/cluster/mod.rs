//! Simulated multi-node execution: all-to-all schedules and the
//! slab-decomposed FFT and long-range pipeline.

pub mod schedule;
pub mod sim;

pub use schedule::{make_schedule, pack_schedule, A2ASchedule, PackedSchedule, Round, Transfer};
pub use sim::{
    corner_turn, distributed_fft3d, distributed_lr_pipeline, ClusterConfig, DistStats,
    DistributedLr, ExecMode, MessageRecord, SlabAssignment, Slabs, TurnStats, BITS_PER_SAMPLE,
};
