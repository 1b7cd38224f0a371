// Reordering an atom stream so atoms with overlapping spline support are
// never in the spreading pipeline together.

use lrpme::spme::reorder_atoms;
use lrpme::{AtomSet, Dims};

pub fn run_example() -> lrpme::Result<()> {
    let dims = Dims::cube(32)?;
    let atoms = AtomSet::random_neutral(4096, 5)?;
    for window in [1, 4, 8, 16] {
        let r = reorder_atoms(&atoms, dims, window)?;
        println!("pipeline depth {window:>2}: {} stalls for {} atoms", r.stalls, r.order.len());
    }

    // a clustered system stalls much more
    let packed: Vec<[f64; 3]> = atoms.positions().iter().map(|p| p.map(|c| c * 0.2)).collect();
    let clustered = AtomSet::new(packed, atoms.charges().to_vec())?;
    let r = reorder_atoms(&clustered, dims, 8)?;
    println!("clustered, depth 8: {} stalls", r.stalls);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lrpme::Result<()> {
    run_example()
}
