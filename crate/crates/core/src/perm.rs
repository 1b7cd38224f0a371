//! Bit-dimension permutations over generalized sample addresses.
//!
//! A sample address is a string of labelled bits such as
//! `X0 X1 X2 Y0 Y1 Y2 Z0 Z1 Z2`. Label strings are always written
//! **lowest-order bit first**: the first label names address bit 0.
//!
//! A [`PermutationSpec`] pairs the address string of an input sequence with
//! the address string of the output sequence. The sample whose label bits
//! sit at address `a` of the input lands at the output address carrying the
//! same label values, so a permutation is an address remap and never creates
//! or drops a value.
//!
//! The control-file form is two lines:
//!
//! ```text
//! # 3-bit reversal
//! in:  X0 X1 X2
//! out: X2 X1 X0
//! ```

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::volume::Dims;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// One named bit of a sample address, e.g. `Y3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitLabel {
    pub axis: Axis,
    pub index: u32,
}

impl BitLabel {
    pub const fn new(axis: Axis, index: u32) -> Self {
        BitLabel { axis, index }
    }
}

impl fmt::Display for BitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.axis.letter(), self.index)
    }
}

impl FromStr for BitLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut chars = s.chars();
        let axis = match chars.next() {
            Some('X') => Axis::X,
            Some('Y') => Axis::Y,
            Some('Z') => Axis::Z,
            _ => return Err(format!("malformed label '{s}'")),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed label '{s}'"));
        }
        let index = digits
            .parse::<u32>()
            .map_err(|_| format!("malformed label '{s}'"))?;
        Ok(BitLabel { axis, index })
    }
}

/// Labels of an XYZ volume in natural order: `X0.. Y0.. Z0..`.
pub fn natural_labels(dims: Dims) -> Vec<BitLabel> {
    let bits = dims.bits();
    Axis::ALL
        .iter()
        .flat_map(|&axis| (0..bits[axis.slot()]).map(move |i| BitLabel::new(axis, i)))
        .collect()
}

fn axis_labels(axis: Axis, bits: u32) -> impl Iterator<Item = BitLabel> {
    (0..bits).map(move |i| BitLabel::new(axis, i))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationSpec {
    input_order: Vec<BitLabel>,
    output_order: Vec<BitLabel>,
}

impl PermutationSpec {
    pub fn new(input_order: Vec<BitLabel>, output_order: Vec<BitLabel>) -> Result<Self> {
        check_unique(&input_order, "in")?;
        check_unique(&output_order, "out")?;
        let a: HashSet<_> = input_order.iter().collect();
        let b: HashSet<_> = output_order.iter().collect();
        if a != b {
            return Err(Error::InvalidPermutation(
                "input and output label sets differ".into(),
            ));
        }
        if input_order.len() >= usize::BITS as usize {
            return Err(Error::InvalidPermutation("too many address bits".into()));
        }
        Ok(PermutationSpec {
            input_order,
            output_order,
        })
    }

    pub fn identity(labels: Vec<BitLabel>) -> Result<Self> {
        PermutationSpec::new(labels.clone(), labels)
    }

    pub fn input_order(&self) -> &[BitLabel] {
        &self.input_order
    }

    pub fn output_order(&self) -> &[BitLabel] {
        &self.output_order
    }

    /// Number of address bits.
    pub fn width(&self) -> usize {
        self.input_order.len()
    }

    pub fn sequence_len(&self) -> usize {
        1usize << self.width()
    }

    pub fn inverse(&self) -> PermutationSpec {
        PermutationSpec {
            input_order: self.output_order.clone(),
            output_order: self.input_order.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.input_order == self.output_order
    }

    /// Checks that the label set is exactly the natural address of `dims`.
    pub fn bind(&self, dims: Dims) -> Result<()> {
        let want: HashSet<_> = natural_labels(dims).into_iter().collect();
        let have: HashSet<_> = self.input_order.iter().copied().collect();
        if want != have {
            return Err(Error::InvalidPermutation(format!(
                "labels do not match the address bits of a {dims} volume"
            )));
        }
        Ok(())
    }

    /// `table[src] = dst` for every source address.
    pub fn dest_table(&self) -> Vec<usize> {
        let width = self.width();
        // out bit p takes in bit src_bit[p]
        let src_bit: Vec<usize> = self
            .output_order
            .iter()
            .map(|l| self.input_order.iter().position(|m| m == l).unwrap())
            .collect();
        (0..1usize << width)
            .map(|a| {
                src_bit
                    .iter()
                    .enumerate()
                    .fold(0usize, |b, (p, &s)| b | (((a >> s) & 1) << p))
            })
            .collect()
    }

    /// Destination address of a single source address.
    pub fn dest_of(&self, src: usize) -> usize {
        self.output_order
            .iter()
            .enumerate()
            .fold(0usize, |b, (p, l)| {
                let s = self.input_order.iter().position(|m| m == l).unwrap();
                b | (((src >> s) & 1) << p)
            })
    }

    pub fn apply<T: Copy>(&self, input: &[T]) -> Result<Vec<T>> {
        let table = self.dest_table();
        apply_table(&table, input)
    }

    /// Control-file text for this spec.
    pub fn to_control_text(&self) -> String {
        let join = |v: &[BitLabel]| {
            v.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "in: {}\nout: {}\n",
            join(&self.input_order),
            join(&self.output_order)
        )
    }
}

/// Scatters `input` through a destination table produced by
/// [`PermutationSpec::dest_table`].
pub fn apply_table<T: Copy>(table: &[usize], input: &[T]) -> Result<Vec<T>> {
    if input.len() != table.len() {
        return Err(Error::LengthMismatch {
            expected: table.len(),
            actual: input.len(),
        });
    }
    let Some(&first) = input.first() else {
        return Ok(Vec::new());
    };
    let mut out = vec![first; input.len()];
    for (src, &dst) in table.iter().enumerate() {
        out[dst] = input[src];
    }
    Ok(out)
}

/// Free-function form used by the rest of the crate.
pub fn apply_permutation<T: Copy>(input: &[T], spec: &PermutationSpec) -> Result<Vec<T>> {
    spec.apply(input)
}

fn check_unique(labels: &[BitLabel], which: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidPermutation(format!(
                "duplicate label {l} in '{which}' list"
            )));
        }
    }
    Ok(())
}

/// Parses the `in:` / `out:` control-file format.
pub fn parse_perm_file(text: &str) -> Result<PermutationSpec> {
    let mut input: Option<(usize, Vec<(BitLabel, usize)>)> = None;
    let mut output: Option<(usize, Vec<(BitLabel, usize)>)> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let lead = line.len() - trimmed.len();
        let (slot, rest, rest_offset) = if let Some(rest) = trimmed.strip_prefix("in:") {
            (&mut input, rest, lead + 3)
        } else if let Some(rest) = trimmed.strip_prefix("out:") {
            (&mut output, rest, lead + 4)
        } else {
            return Err(Error::PermParse {
                line: line_no,
                column: lead + 1,
                message: "expected 'in:' or 'out:'".into(),
            });
        };
        if let Some((prev, _)) = slot {
            return Err(Error::PermParse {
                line: line_no,
                column: lead + 1,
                message: format!("repeated directive (first seen on line {prev})"),
            });
        }
        let mut labels = Vec::new();
        let mut seen = HashSet::new();
        for (offset, token) in tokens(rest) {
            let column = rest_offset + offset + 1;
            let label: BitLabel = token.parse().map_err(|message| Error::PermParse {
                line: line_no,
                column,
                message,
            })?;
            if !seen.insert(label) {
                return Err(Error::PermParse {
                    line: line_no,
                    column,
                    message: format!("duplicate label {label}"),
                });
            }
            labels.push((label, column));
        }
        *slot = Some((line_no, labels));
    }

    let end_line = text.lines().count().max(1);
    let (in_line, input) = input.ok_or_else(|| Error::PermParse {
        line: end_line,
        column: 1,
        message: "missing 'in:' line".into(),
    })?;
    let (out_line, output) = output.ok_or_else(|| Error::PermParse {
        line: end_line,
        column: 1,
        message: "missing 'out:' line".into(),
    })?;

    let in_set: HashSet<_> = input.iter().map(|(l, _)| *l).collect();
    let out_set: HashSet<_> = output.iter().map(|(l, _)| *l).collect();
    if let Some((l, col)) = output.iter().find(|(l, _)| !in_set.contains(l)) {
        return Err(Error::PermParse {
            line: out_line,
            column: *col,
            message: format!("label {l} does not appear in 'in:'"),
        });
    }
    if let Some((l, col)) = input.iter().find(|(l, _)| !out_set.contains(l)) {
        return Err(Error::PermParse {
            line: in_line,
            column: *col,
            message: format!("label {l} does not appear in 'out:'"),
        });
    }

    PermutationSpec::new(
        input.into_iter().map(|(l, _)| l).collect(),
        output.into_iter().map(|(l, _)| l).collect(),
    )
}

fn tokens(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - s.as_ptr() as usize, t))
}

fn log2_exact(n: usize, what: &str) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "{what} = {n} is not a power of two"
        )));
    }
    Ok(n.trailing_zeros())
}

/// Full bit reversal of an `n`-point X sequence.
pub fn bit_reversal(n: usize) -> Result<PermutationSpec> {
    let bits = log2_exact(n, "n")?;
    let input: Vec<_> = axis_labels(Axis::X, bits).collect();
    let output: Vec<_> = input.iter().rev().copied().collect();
    PermutationSpec::new(input, output)
}

/// Input ordering of the lane-parallel FFT: vectors arrive in natural order
/// while the lanes of each vector are bit-reversed.
///
/// The low `log2(lanes)` address bits select the lane; they carry the top
/// sample-index bits in reverse. The remaining address bits step through
/// vectors in natural order. For `n = 32, lanes = 8` the output address
/// string is `X4 X3 X2 X0 X1`.
pub fn lane_input_order(n: usize, lanes: usize) -> Result<PermutationSpec> {
    let bits = log2_exact(n, "n")?;
    let lane_bits = log2_exact(lanes, "lanes")?;
    if lane_bits > bits {
        return Err(Error::InvalidParameter(format!(
            "lanes = {lanes} exceeds transform size {n}"
        )));
    }
    let input: Vec<_> = axis_labels(Axis::X, bits).collect();
    let vector_bits = bits - lane_bits;
    let output = (vector_bits..bits)
        .rev()
        .chain(0..vector_bits)
        .map(|i| BitLabel::new(Axis::X, i))
        .collect();
    PermutationSpec::new(input, output)
}

/// Reorders a natural XYZ volume so that `fastest` becomes the contiguous
/// axis, keeping the cyclic order of the other two.
pub fn rotate_to(dims: Dims, fastest: Axis) -> Result<PermutationSpec> {
    let bits = dims.bits();
    let order = match fastest {
        Axis::X => [Axis::X, Axis::Y, Axis::Z],
        Axis::Y => [Axis::Y, Axis::Z, Axis::X],
        Axis::Z => [Axis::Z, Axis::X, Axis::Y],
    };
    let output = order
        .iter()
        .flat_map(|&a| axis_labels(a, bits[a.slot()]))
        .collect();
    PermutationSpec::new(natural_labels(dims), output)
}

/// Corner turn from Z-slabs to Y-slabs.
///
/// Input is the natural XYZ address. In the output, Z is contiguous, then X,
/// then Y, so the top address bits are the high Y bits: splitting the output
/// into equal contiguous pieces hands each pipeline a Y-slab of Z pencils.
pub fn corner_turn_zy(dims: Dims) -> Result<PermutationSpec> {
    rotate_to(dims, Axis::Z)
}

/// The 32³ corner-turn address listing used by the four-pipeline hardware
/// all-to-all: Y bits bit-reversed at the bottom, Z3 Z4 as pipeline bits on
/// input; Y3 Y4 as pipeline bits on output.
pub fn hardware_corner_turn_32() -> PermutationSpec {
    parse_perm_file(
        "in:  Y4 Y3 Y2 Y1 Y0 X0 X1 X2 X3 X4 Z0 Z1 Z2 Z3 Z4\n\
         out: Z4 Z3 Z2 Y1 Y0 X0 X1 X2 X3 X4 Z0 Z1 Y2 Y3 Y4\n",
    )
    .expect("static listing parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> BitLabel {
        BitLabel::new(Axis::X, i)
    }

    #[test]
    fn parse_three_bit_reversal() {
        let s = parse_perm_file("in: X0 X1 X2\nout: X2 X1 X0").unwrap();
        assert_eq!(s.input_order(), &[x(0), x(1), x(2)]);
        assert_eq!(s.output_order(), &[x(2), x(1), x(0)]);
        assert_eq!(s, bit_reversal(8).unwrap());
    }

    #[test]
    fn parse_corner_turn_listing() {
        let s = hardware_corner_turn_32();
        assert_eq!(s.width(), 15);
        assert_eq!(
            s.output_order()[0..5]
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>(),
            ["Z4", "Z3", "Z2", "Y1", "Y0"]
        );
        s.bind(Dims::cube(32).unwrap()).unwrap();
    }

    #[test]
    fn parse_comments_and_blank_lines() {
        let s = parse_perm_file("# header\n\nin: X0 X1 # trailing\n  out: X1 X0\n").unwrap();
        assert_eq!(s.width(), 2);
    }

    #[test]
    fn parse_duplicate_label_reports_position() {
        let err = parse_perm_file("in: X0 X0\nout: X0 X0").unwrap_err();
        match err {
            Error::PermParse { line, column, message } => {
                assert_eq!((line, column), (1, 8));
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_label_sets_differ() {
        let err = parse_perm_file("in: X0 X1\nout: X0 Y1").unwrap_err();
        assert!(matches!(err, Error::PermParse { line: 2, column: 9, .. }), "{err:?}");
    }

    #[test]
    fn parse_malformed_token() {
        let err = parse_perm_file("in: X0 W1\nout: X0 W1").unwrap_err();
        assert!(matches!(err, Error::PermParse { line: 1, column: 8, .. }), "{err:?}");
        assert!(parse_perm_file("in: X\nout: X").is_err());
        assert!(parse_perm_file("in: X1a\nout: X1a").is_err());
    }

    #[test]
    fn parse_missing_line() {
        let err = parse_perm_file("in: X0 X1\n").unwrap_err();
        match err {
            Error::PermParse { message, .. } => assert!(message.contains("out:")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_perm_file("out: X0\n").is_err());
        assert!(parse_perm_file("in: X0\nin: X0\nout: X0").is_err());
        assert!(parse_perm_file("foo: X0\n").is_err());
    }

    #[test]
    fn three_bit_reversal_order() {
        let s = bit_reversal(8).unwrap();
        let out = s.apply(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        assert_eq!(out, vec![0, 4, 2, 6, 1, 5, 3, 7]);
    }

    #[test]
    fn identity_is_noop() {
        let s = PermutationSpec::identity((0..4).map(x).collect()).unwrap();
        let v: Vec<u32> = (0..16).collect();
        assert_eq!(s.apply(&v).unwrap(), v);
    }

    #[test]
    fn swap_bit0_bit3_matches_enumeration() {
        let s = PermutationSpec::new(
            vec![x(0), x(1), x(2), x(3)],
            vec![x(3), x(1), x(2), x(0)],
        )
        .unwrap();
        // brute force: new index has bits 0 and 3 exchanged
        let mut expected = [0usize; 16];
        for a in 0..16usize {
            let b0 = a & 1;
            let b3 = (a >> 3) & 1;
            let b = (a & 0b0110) | (b0 << 3) | b3;
            expected[b] = a;
        }
        let v: Vec<usize> = (0..16).collect();
        assert_eq!(s.apply(&v).unwrap(), expected.to_vec());
    }

    #[test]
    fn length_mismatch() {
        let s = bit_reversal(8).unwrap();
        assert!(matches!(
            s.apply(&[1, 2, 3]),
            Err(Error::LengthMismatch { expected: 8, actual: 3 })
        ));
    }

    #[test]
    fn lane_order_32_matches_listing() {
        let s = lane_input_order(32, 8).unwrap();
        let text: Vec<String> = s.output_order().iter().map(|l| l.to_string()).collect();
        assert_eq!(text, ["X4", "X3", "X2", "X0", "X1"]);
        // lane 1 of vector 0 carries sample 16, lane 0 of vector 1 carries sample 1
        let v: Vec<usize> = (0..32).collect();
        let out = s.apply(&v).unwrap();
        assert_eq!(&out[..8], &[0, 16, 8, 24, 4, 20, 12, 28]);
        assert_eq!(&out[8..16], &[1, 17, 9, 25, 5, 21, 13, 29]);
    }

    #[test]
    fn lane_order_8_is_full_reversal() {
        assert_eq!(
            lane_input_order(8, 8).unwrap().output_order(),
            bit_reversal(8).unwrap().output_order()
        );
    }

    #[test]
    fn lane_order_64_enumerated() {
        let s = lane_input_order(64, 8).unwrap();
        let out = s.apply(&(0..64).collect::<Vec<usize>>()).unwrap();
        for vector in 0..8usize {
            for lane in 0..8usize {
                let rev = ((lane & 1) << 2) | (lane & 2) | ((lane >> 2) & 1);
                assert_eq!(out[vector * 8 + lane], rev * 8 + vector);
            }
        }
    }

    #[test]
    fn lane_order_rejects_bad_sizes() {
        assert!(lane_input_order(24, 8).is_err());
        assert!(lane_input_order(32, 6).is_err());
        assert!(lane_input_order(4, 8).is_err());
    }

    #[test]
    fn control_text_round_trip() {
        let s = hardware_corner_turn_32();
        assert_eq!(parse_perm_file(&s.to_control_text()).unwrap(), s);
    }

    #[test]
    fn bind_checks_widths() {
        let d = Dims::new(8, 8, 16).unwrap();
        assert!(corner_turn_zy(d).unwrap().bind(d).is_ok());
        assert!(bit_reversal(8).unwrap().bind(d).is_err());
    }
}
