// The slab-decomposed FFT and long-range pipeline on simulated clusters.

use lrpme::cluster::{distributed_fft3d, distributed_lr_pipeline, ClusterConfig, ExecMode};
use lrpme::spme::default_beta;
use lrpme::verify::random_volume;
use lrpme::{fft_3d, lr_pipeline, make_greens, AtomSet, Cell, Dims, Direction, TopologyKind};

pub fn run_example() -> lrpme::Result<()> {
    let dims = Dims::cube(16)?;
    let v = random_volume(dims, 3);
    let single = fft_3d(&v, Direction::Forward)?;
    for nodes in [1, 2, 4, 8] {
        let (out, stats) = distributed_fft3d(&v, &ClusterConfig::switched(nodes), ExecMode::Threaded)?;
        let turn = &stats.turns[0];
        println!(
            "{nodes} nodes: bitwise equal {}, {} rounds, {} off-node messages, {} off-node bits",
            out == single,
            stats.schedule.rounds.len(),
            turn.off_node_messages().count(),
            turn.off_node_bits
        );
    }

    let cell = Cell::unit();
    let greens = make_greens(dims, default_beta(dims, &cell), &cell)?;
    let atoms = AtomSet::random_neutral(200, 9)?;
    let reference = lr_pipeline(&atoms, &greens, &cell)?;
    let cfg = ClusterConfig::new(2, 2, TopologyKind::Ptop);
    let d = distributed_lr_pipeline(&atoms, &greens, &cell, &cfg, ExecMode::Sequential)?;
    println!(
        "2 boards x 2 pipelines: force diff {:.2e}, {} atoms replicated across slab edges",
        d.result.forces.max_abs_diff(&reference.forces),
        d.stats.replicated_atoms
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> lrpme::Result<()> {
    run_example()
}
