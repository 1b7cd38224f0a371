use lrpme::perm::{
    apply_permutation, bit_reversal, hardware_corner_turn_32, lane_input_order, Axis, BitLabel,
    PermutationSpec,
};
use proptest::prelude::*;

/// A random valid spec over `X0..Xa Y0..Yb Z0..Zc` with shuffled input and
/// output orders.
fn spec_strategy() -> impl Strategy<Value = PermutationSpec> {
    (0u32..4, 0u32..4, 0u32..4)
        .prop_filter("at least one bit", |(a, b, c)| a + b + c > 0)
        .prop_flat_map(|(a, b, c)| {
            let labels: Vec<BitLabel> = (0..a)
                .map(|i| BitLabel::new(Axis::X, i))
                .chain((0..b).map(|i| BitLabel::new(Axis::Y, i)))
                .chain((0..c).map(|i| BitLabel::new(Axis::Z, i)))
                .collect();
            (
                Just(labels.clone()).prop_shuffle(),
                Just(labels).prop_shuffle(),
            )
        })
        .prop_map(|(input, output)| PermutationSpec::new(input, output).unwrap())
}

fn spec_and_data() -> impl Strategy<Value = (PermutationSpec, Vec<i32>)> {
    spec_strategy().prop_flat_map(|s| {
        let len = s.sequence_len();
        (Just(s), prop::collection::vec(-1000i32..1000, len))
    })
}

proptest! {
    #[test]
    fn round_trip_through_inverse((spec, v) in spec_and_data()) {
        let fwd = apply_permutation(&v, &spec).unwrap();
        prop_assert_eq!(apply_permutation(&fwd, &spec.inverse()).unwrap(), v);
    }

    #[test]
    fn preserves_multiset((spec, v) in spec_and_data()) {
        let mut out = apply_permutation(&v, &spec).unwrap();
        let mut orig = v.clone();
        out.sort_unstable();
        orig.sort_unstable();
        prop_assert_eq!(out, orig);
    }

    #[test]
    fn bit_reversal_is_involution(bits in 1u32..11) {
        let n = 1usize << bits;
        let spec = bit_reversal(n).unwrap();
        let v: Vec<usize> = (0..n).collect();
        let twice = spec.apply(&spec.apply(&v).unwrap()).unwrap();
        prop_assert_eq!(twice, v);
    }

    #[test]
    fn control_text_reparses(spec in spec_strategy()) {
        let text = spec.to_control_text();
        prop_assert_eq!(lrpme::parse_perm_file(&text).unwrap(), spec);
    }
}

fn rev5(v: usize) -> usize {
    (0..5).fold(0, |acc, b| acc | (((v >> b) & 1) << (4 - b)))
}

#[test]
fn hardware_corner_turn_moves_every_pencil() {
    let spec = hardware_corner_turn_32();
    // Input address: Y bit-reversed in bits 0..5, X in 5..10, Z in 10..15.
    let in_addr = |x: usize, y: usize, z: usize| rev5(y) | x << 5 | z << 10;
    // Output address, bit by bit from the listing.
    let out_addr = |x: usize, y: usize, z: usize| {
        let zb = |i: usize| (z >> i) & 1;
        let yb = |i: usize| (y >> i) & 1;
        zb(4) | zb(3) << 1 | zb(2) << 2 | yb(1) << 3 | yb(0) << 4 | x << 5
            | zb(0) << 10 | zb(1) << 11 | yb(2) << 12 | yb(3) << 13 | yb(4) << 14
    };
    let mut data = vec![(0usize, 0usize, 0usize); 1 << 15];
    for x in 0..32 {
        for y in 0..32 {
            for z in 0..32 {
                data[in_addr(x, y, z)] = (x, y, z);
            }
        }
    }
    let out = spec.apply(&data).unwrap();
    let mut pencils = 0;
    for x in 0..32 {
        for y in 0..32 {
            for z in 0..32 {
                assert_eq!(out[out_addr(x, y, z)], (x, y, z));
            }
            pencils += 1;
        }
    }
    assert_eq!(pencils, 1024);
}

#[test]
fn lane_order_listing_for_32_points() {
    let spec = lane_input_order(32, 8).unwrap();
    let names: Vec<String> = spec.output_order().iter().map(|l| l.to_string()).collect();
    assert_eq!(names, ["X4", "X3", "X2", "X0", "X1"]);
}
