// Pipeline counts and networks whose FFT time matches their all-to-all
// time at 128³.

use lrpme::perf::report::balance_rows;
use lrpme::perf::{DEFAULT_BALANCE_THRESHOLD, DEFAULT_BANDWIDTH_BPS, DEFAULT_FMAX_HZ};

pub fn run_example() -> lrpme::Result<()> {
    let rows = balance_rows(DEFAULT_FMAX_HZ, DEFAULT_BANDWIDTH_BPS, DEFAULT_BALANCE_THRESHOLD)?;
    for r in &rows {
        println!(
            "{:>3} pipelines on {:>2} nodes, {:<11} fft {:>6.1} us  a2a {:>6.1} us  {:>4.1}% {}",
            r.units,
            r.nodes,
            r.topology,
            r.fft_us,
            r.a2a_us,
            r.mismatch * 100.0,
            r.marker
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lrpme::Result<()> {
    run_example()
}
