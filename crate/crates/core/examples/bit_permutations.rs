// Bit-dimension permutations: parse a control file, apply it, and build the
// standard reorderings used by the FFT.

use lrpme::perm::{bit_reversal, corner_turn_zy, lane_input_order, parse_perm_file};
use lrpme::Dims;

const CONTROL: &str = "\
# swap the lowest and highest bit of an 8-point sequence
in:  X0 X1 X2
out: X2 X1 X0
";

pub fn run_example() -> lrpme::Result<()> {
    let spec = parse_perm_file(CONTROL)?;
    let data: Vec<u32> = (0..8).collect();
    let out = spec.apply(&data)?;
    println!("swap X0/X2 on 0..8: {out:?}");
    assert_eq!(out, [0, 4, 2, 6, 1, 5, 3, 7]);
    assert_eq!(spec.inverse().apply(&out)?, data);

    let rev = bit_reversal(16)?;
    println!("bit reversal, 16 points: {:?}", rev.apply(&(0..16).collect::<Vec<u32>>())?);

    let lanes = lane_input_order(32, 8)?;
    println!("lane input order for 32 points on 8 lanes:\n{}", lanes.to_control_text());

    let turn = corner_turn_zy(Dims::cube(8)?)?;
    println!("Z-to-Y corner turn on 8x8x8:\n{}", turn.to_control_text());
    Ok(())
}

#[allow(dead_code)]
fn main() -> lrpme::Result<()> {
    run_example()
}
