use lrpme::spme::{default_beta, reorder_atoms, spread_charges};
use lrpme::{lr_pipeline, make_greens, AtomSet, Cell, Dims, GreensVolume};
use proptest::prelude::*;

fn position() -> impl Strategy<Value = [f64; 3]> {
    [0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0]
}

fn greens16(cell: &Cell) -> (Dims, GreensVolume) {
    let d = Dims::cube(16).unwrap();
    (d, make_greens(d, default_beta(d, cell), cell).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spreading_conserves_charge(
        atoms in prop::collection::vec((position(), 0.1f64..1.0), 1..40),
    ) {
        let (pos, q): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
        let set = AtomSet::new(pos, q).unwrap();
        let total: f64 = spread_charges(&set, Dims::new(8, 16, 32).unwrap()).iter().sum();
        prop_assert!((total - set.total_charge()).abs() <= 1e-10 * set.total_charge().abs());
    }

    #[test]
    fn forces_are_energy_gradient(seed in any::<u64>(), atom in 0usize..6) {
        let cell = Cell::unit();
        let (_, g) = greens16(&cell);
        let set = AtomSet::random_neutral(6, seed).unwrap();
        let f = lr_pipeline(&set, &g, &cell).unwrap().forces.0[atom];
        let h = 1e-5;
        let mut fd = [0.0; 3];
        for (axis, slot) in fd.iter_mut().enumerate() {
            let e = |d: f64| lr_pipeline(&set.displaced(atom, axis, d), &g, &cell).unwrap().energy;
            *slot = -(e(h) - e(-h)) / (2.0 * h);
        }
        let diff = (0..3).map(|a| (f[a] - fd[a]).powi(2)).sum::<f64>().sqrt();
        let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-5 * norm, "force {f:?} vs fd {fd:?}");
    }

    /// Two charges of equal magnitude placed symmetrically about a grid
    /// point or cell centre see equal and opposite forces. (With unequal
    /// magnitudes the position-dependent self-force of each atom no longer
    /// cancels.)
    #[test]
    fn two_symmetric_charges_obey_newton(
        p in position(),
        shift in [0usize..32, 0usize..32, 0usize..32],
        q in 0.1f64..1.0,
        same_sign in any::<bool>(),
    ) {
        let cell = Cell::unit();
        let (d, g) = greens16(&cell);
        let n = d.nx as f64;
        let mirror = [0, 1, 2].map(|a| shift[a] as f64 / n - p[a]);
        let set = AtomSet::new(vec![p, mirror], vec![q, if same_sign { q } else { -q }]).unwrap();
        let f = lr_pipeline(&set, &g, &cell).unwrap().forces;
        let net = f.net();
        let tol = 1e-9 * f.max_abs().max(f64::MIN_POSITIVE);
        prop_assert!(net.iter().all(|v| v.abs() <= tol), "net {net:?}");
    }

    #[test]
    fn reorder_is_a_permutation(seed in any::<u64>(), count in 1usize..200, window in 1usize..12) {
        let set = AtomSet::random_neutral(count, seed).unwrap();
        let r = reorder_atoms(&set, Dims::cube(16).unwrap(), window).unwrap();
        let mut seen = r.order.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..count).collect::<Vec<_>>());
    }
}

#[test]
fn error_shrinks_when_grid_is_refined() {
    use lrpme::ewald::{direct_recip_oracle, kmax_for};
    let cell = Cell::unit();
    let beta = default_beta(Dims::cube(32).unwrap(), &cell);
    let set = AtomSet::random_neutral(32, 17).unwrap();
    let oracle = direct_recip_oracle(&set, beta, kmax_for(beta, &cell, 1e-16), &cell);
    let err = |n: usize| {
        let d = Dims::cube(n).unwrap();
        let r = lr_pipeline(&set, &make_greens(d, beta, &cell).unwrap(), &cell).unwrap();
        r.forces.max_rel_error(&oracle.forces)
    };
    let (coarse, fine) = (err(16), err(32));
    assert!(fine < coarse, "16: {coarse}, 32: {fine}");
}
