use lrpme::cluster::{
    corner_turn, distributed_fft3d, distributed_lr_pipeline, make_schedule, ClusterConfig,
    ExecMode, Slabs, BITS_PER_SAMPLE,
};
use lrpme::spme::default_beta;
use lrpme::verify::random_volume;
use lrpme::{fft_3d, make_greens, AtomSet, Cell, Dims, Direction, TopologyKind};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = ClusterConfig> {
    (0u32..4, 0u32..2).prop_map(|(n, p)| ClusterConfig::new(1 << n, 1 << p, TopologyKind::Switched))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schedules_are_valid(n in 1usize..=64) {
        let s = make_schedule(n);
        prop_assert_eq!(s.rounds.len(), n.saturating_sub(1));
        prop_assert!(s.validate().is_ok());
    }

    #[test]
    fn turn_traffic_is_uniform(cfg in config(), seed in any::<u64>()) {
        let d = Dims::new(8, 16, 16).unwrap();
        let v = random_volume(d, seed);
        let p = cfg.pipelines();
        let slabs = Slabs::scatter_z(&v, p).unwrap();
        let sched = make_schedule(cfg.nodes);
        let (_, stats) = corner_turn(&slabs, &cfg, &sched, ExecMode::Sequential).unwrap();
        let n = cfg.nodes as u64;
        let d_bits = d.len() as u64 * BITS_PER_SAMPLE;
        prop_assert_eq!(stats.off_node_bits * n, d_bits * (n - 1));
        let off: Vec<u64> = stats.off_node_messages().map(|m| m.bits).collect();
        prop_assert_eq!(off.len() as u64, n * (n - 1));
        prop_assert!(off.iter().all(|&b| b == d_bits / (n * n)));
    }

    #[test]
    fn distributed_fft_is_exact(cfg in config(), seed in any::<u64>(), threaded in any::<bool>()) {
        let d = Dims::cube(16).unwrap();
        let v = random_volume(d, seed);
        let mode = if threaded { ExecMode::Threaded } else { ExecMode::Sequential };
        let (out, _) = distributed_fft3d(&v, &cfg, mode).unwrap();
        prop_assert_eq!(out, fft_3d(&v, Direction::Forward).unwrap());
    }

    #[test]
    fn execution_mode_does_not_change_results(cfg in config(), seed in any::<u64>()) {
        let d = Dims::cube(16).unwrap();
        let cell = Cell::unit();
        let g = make_greens(d, default_beta(d, &cell), &cell).unwrap();
        let atoms = AtomSet::random_neutral(20, seed).unwrap();
        let a = distributed_lr_pipeline(&atoms, &g, &cell, &cfg, ExecMode::Sequential).unwrap();
        let b = distributed_lr_pipeline(&atoms, &g, &cell, &cfg, ExecMode::Threaded).unwrap();
        prop_assert_eq!(a.result, b.result);
        prop_assert_eq!(a.stats, b.stats);
    }
}
