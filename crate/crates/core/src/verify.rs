//! Runtime verification runs shared by the command-line tool and examples.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::AtomSet;
use crate::cluster::{distributed_fft3d, distributed_lr_pipeline, ClusterConfig, ExecMode};
use crate::error::Result;
use crate::ewald::{direct_recip_oracle, kmax_for};
use crate::fft::{fft_3d, reference::naive_dft_3d, Direction};
use crate::report::RunReport;
use crate::spme::{default_beta, lr_pipeline, make_greens, Cell, LrResult};
use crate::volume::{Dims, Volume3D};

pub const FFT_TOLERANCE: f64 = 1e-10;
pub const FORCE_TOLERANCE: f64 = 1e-3;
/// Largest volume checked against the direct DFT.
pub const NAIVE_LIMIT: usize = 32 * 32 * 32;

pub fn random_volume(dims: Dims, seed: u64) -> Volume3D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..dims.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Volume3D::from_vec(dims, data).expect("length matches dims")
}

/// Relative max-abs error of `got` against `want`.
pub fn rel_error(got: &Volume3D, want: &Volume3D) -> f64 {
    got.max_abs_diff(want) / want.max_abs().max(f64::MIN_POSITIVE)
}

/// Checks a random volume's forward transform against the direct DFT (up to
/// [`NAIVE_LIMIT`] points), the forward/inverse round trip, and bitwise
/// agreement of the distributed transform with the single-node one.
pub fn fft_verify(dims: Dims, config: &ClusterConfig, mode: ExecMode, seed: u64) -> Result<RunReport> {
    config.validate(dims)?;
    let mut report = RunReport::new("fft-verify")
        .with_config("dims", dims)
        .with_config("nodes", config.nodes)
        .with_config("pipes_per_node", config.pipes_per_node)
        .with_config("topology", config.topology)
        .with_config("seed", seed);
    let v = random_volume(dims, seed);
    let fwd = report.time("fft_3d", || fft_3d(&v, Direction::Forward))?;

    if dims.len() <= NAIVE_LIMIT {
        let naive = report.time("naive_dft", || naive_dft_3d(&v, Direction::Forward));
        report.check("naive_dft", rel_error(&fwd, &naive), FFT_TOLERANCE);
    }
    let back = report.time("inverse_fft_3d", || fft_3d(&fwd, Direction::Inverse))?;
    report.check("round_trip", rel_error(&back, &v), FFT_TOLERANCE);

    let (dist, stats) = report.time("distributed_fft3d", || distributed_fft3d(&v, config, mode))?;
    report.check_bool("distributed_bitwise", dist == fwd);
    let turn = &stats.turns[0];
    report.record("messages_off_node", turn.off_node_messages().count() as f64);
    report.record("off_node_bits", turn.off_node_bits as f64);
    report.record("local_bits", turn.local_bits as f64);
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct PmeRunOptions {
    pub dims: Dims,
    pub beta: Option<f64>,
    pub cell: Cell,
    pub config: ClusterConfig,
    pub mode: ExecMode,
    pub check: bool,
}

/// Long-range forces and energy for `atoms`. Runs on the simulated cluster
/// when it has more than one pipeline. With `check`, compares against the
/// direct reciprocal sum.
pub fn pme_run(atoms: &AtomSet, opts: &PmeRunOptions) -> Result<(LrResult, RunReport)> {
    let dims = opts.dims;
    opts.config.validate(dims)?;
    let beta = opts.beta.unwrap_or_else(|| default_beta(dims, &opts.cell));
    let mut report = RunReport::new("pme-run")
        .with_config("dims", dims)
        .with_config("beta", beta)
        .with_config("atoms", atoms.len())
        .with_config("nodes", opts.config.nodes)
        .with_config("pipes_per_node", opts.config.pipes_per_node)
        .with_config("topology", opts.config.topology);
    let greens = report.time("greens", || make_greens(dims, beta, &opts.cell))?;
    let result = if opts.config.pipelines() == 1 {
        report.time("lr_pipeline", || lr_pipeline(atoms, &greens, &opts.cell))?
    } else {
        let d = report.time("distributed_lr_pipeline", || {
            distributed_lr_pipeline(atoms, &greens, &opts.cell, &opts.config, opts.mode)
        })?;
        report.record("replicated_atoms", d.stats.replicated_atoms as f64);
        report.record(
            "off_node_bits",
            d.stats.turns.iter().map(|t| t.off_node_bits as f64).sum(),
        );
        d.result
    };
    report.record("energy", result.energy);
    report.record("max_force", result.forces.max_abs());

    if opts.check {
        let kmax = kmax_for(beta, &opts.cell, 1e-16);
        let oracle = report.time("direct_recip_oracle", || {
            direct_recip_oracle(atoms, beta, kmax, &opts.cell)
        });
        let e_err = (result.energy - oracle.energy).abs() / oracle.energy.abs();
        let f_err = result.forces.max_rel_error(&oracle.forces);
        report.record("oracle_energy", oracle.energy);
        report.check("energy_vs_oracle", e_err, FORCE_TOLERANCE);
        report.check("forces_vs_oracle", f_err, FORCE_TOLERANCE);
    }
    Ok((result, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_verify_passes_small() {
        let d = Dims::cube(8).unwrap();
        let r = fft_verify(d, &ClusterConfig::switched(1), ExecMode::Sequential, 1).unwrap();
        assert!(r.passed(), "{}", r.check_lines());
        assert_eq!(r.summary["messages_off_node"], 0.0);
    }

    #[test]
    fn pme_run_nodes_agree() {
        let atoms = AtomSet::random_neutral(16, 3).unwrap();
        let mut opts = PmeRunOptions {
            dims: Dims::cube(16).unwrap(),
            beta: None,
            cell: Cell::unit(),
            config: ClusterConfig::switched(1),
            mode: ExecMode::Sequential,
            check: false,
        };
        let (one, _) = pme_run(&atoms, &opts).unwrap();
        opts.config = ClusterConfig::switched(4);
        let (four, _) = pme_run(&atoms, &opts).unwrap();
        assert!(one.forces.max_abs_diff(&four.forces) < 1e-9);
    }
}
