// FFT pass and all-to-all timing tables from the analytic model, with the
// printed values they reproduce.

use lrpme::perf::report::{a2a_rows, fft_rows, gflops_rows, write_csv};
use lrpme::perf::{DEFAULT_BANDWIDTH_BPS, DEFAULT_FMAX_HZ};

pub fn run_example() -> lrpme::Result<()> {
    let fft = fft_rows(DEFAULT_FMAX_HZ);
    let worst = fft.iter().map(|r| (r.model_us - r.printed_us).abs()).fold(0.0, f64::max);
    println!("FFT pass table: {} cells, worst deviation {worst:.3} us", fft.len());

    let a2a = a2a_rows(DEFAULT_BANDWIDTH_BPS)?;
    let worst = a2a.iter().map(|r| (r.model_us - r.printed_us).abs()).fold(0.0, f64::max);
    println!("all-to-all table: {} cells, worst deviation {worst:.3} us", a2a.len());
    for r in a2a.iter().filter(|r| !r.flag.is_empty()) {
        println!("flagged: {} nodes {} {}: {}", r.nodes, r.topology, r.size, r.flag);
    }

    write_csv(std::io::stdout(), &gflops_rows())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> lrpme::Result<()> {
    run_example()
}
