// Long-range forces for a random neutral system, compared with the direct
// reciprocal-space sum at two grid resolutions.

use lrpme::ewald::{direct_recip_oracle, kmax_for};
use lrpme::spme::default_beta;
use lrpme::{lr_pipeline, make_greens, AtomSet, Cell, Dims};

pub fn run_example() -> lrpme::Result<()> {
    let atoms = AtomSet::random_neutral(64, 2024)?;
    let cell = Cell::unit();
    // one splitting parameter for both grids so the oracle is shared
    let beta = default_beta(Dims::cube(32)?, &cell);
    let oracle = direct_recip_oracle(&atoms, beta, kmax_for(beta, &cell, 1e-16), &cell);
    println!("beta {beta:.4}, reference energy {:.8}", oracle.energy);
    for n in [16, 32] {
        let dims = Dims::cube(n)?;
        let r = lr_pipeline(&atoms, &make_greens(dims, beta, &cell)?, &cell)?;
        println!(
            "{dims}: energy {:.8} (rel err {:.2e}), forces rel err {:.2e}",
            r.energy,
            (r.energy - oracle.energy).abs() / oracle.energy.abs(),
            r.forces.max_rel_error(&oracle.forces)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lrpme::Result<()> {
    run_example()
}
