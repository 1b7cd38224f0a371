// 3D FFT built from 1D pencils and bit permutations, checked against the
// direct DFT, plus a round trip through the PMEV volume format.

use lrpme::fft::reference::naive_dft_3d;
use lrpme::verify::{random_volume, rel_error};
use lrpme::volume::Dtype;
use lrpme::{fft_3d, Dims, Direction, Volume3D};

pub fn run_example() -> lrpme::Result<()> {
    for n in [8, 16] {
        let dims = Dims::cube(n)?;
        let v = random_volume(dims, 42);
        let fwd = fft_3d(&v, Direction::Forward)?;
        let naive = naive_dft_3d(&v, Direction::Forward);
        let back = fft_3d(&fwd, Direction::Inverse)?;
        println!(
            "{dims}: vs direct DFT {:.2e}, round trip {:.2e}",
            rel_error(&fwd, &naive),
            rel_error(&back, &v)
        );
    }

    let dims = Dims::new(8, 16, 32)?;
    let v = random_volume(dims, 7);
    let mut bytes = Vec::new();
    v.write_pmev(&mut bytes, Dtype::F64)?;
    let read = Volume3D::read_pmev(bytes.as_slice())?;
    assert_eq!(read, v);
    println!("{dims}: PMEV round trip of {} bytes is exact", bytes.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> lrpme::Result<()> {
    run_example()
}
