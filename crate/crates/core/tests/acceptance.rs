// Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use lrpme::cluster::{distributed_fft3d, make_schedule, ClusterConfig, ExecMode};
use lrpme::ewald::{direct_recip_oracle, kmax_for};
use lrpme::fft::reference::naive_dft_3d;
use lrpme::perf::report::{a2a_rows, balance_rows, fft_rows, gflops_rows};
use lrpme::perf::tables::BALANCE_MARKERS;
use lrpme::perf::{DEFAULT_BALANCE_THRESHOLD, DEFAULT_BANDWIDTH_BPS, DEFAULT_FMAX_HZ};
use lrpme::spme::default_beta;
use lrpme::verify::{random_volume, rel_error};
use lrpme::{fft_3d, lr_pipeline, make_greens, AtomSet, Cell, Dims, Direction};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn fft_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst_naive: f64 = 0.0;
    let mut worst_trip: f64 = 0.0;
    for (n, seeds) in [(8, 3), (16, 1)] {
        let dims = Dims::cube(n).unwrap();
        for seed in 0..seeds {
            let v = random_volume(dims, seed);
            let f = fft_3d(&v, Direction::Forward).unwrap();
            worst_naive = worst_naive.max(rel_error(&f, &naive_dft_3d(&v, Direction::Forward)));
            let back = fft_3d(&f, Direction::Inverse).unwrap();
            worst_trip = worst_trip.max(rel_error(&back, &v));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_naive <= 1e-10 && worst_trip <= 1e-10 && secs < 10.0,
        format!(
            "FFT vs direct DFT on 8^3, 16^3: max rel err {worst_naive:.2e}, round trip {worst_trip:.2e} (tol 1e-10), {secs:.2} s (< 10 s)"
        ),
    )
}

fn distributed_equivalence() -> Outcome {
    let start = Instant::now();
    let mut all = true;
    let mut cases = 0;
    for n in [16, 32] {
        let dims = Dims::cube(n).unwrap();
        let v = random_volume(dims, n as u64);
        let single = fft_3d(&v, Direction::Forward).unwrap();
        for nodes in [1, 2, 4, 8] {
            for mode in [ExecMode::Sequential, ExecMode::Threaded] {
                let (out, _) = distributed_fft3d(&v, &ClusterConfig::switched(nodes), mode).unwrap();
                all &= out == single;
                cases += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        all && secs < 30.0,
        format!("distributed == single-node bitwise for N in {{1,2,4,8}} x {{16^3, 32^3}}: {cases} cases, all equal = {all}, {secs:.2} s (< 30 s)"),
    )
}

fn pme_vs_oracle() -> Outcome {
    let start = Instant::now();
    let cell = Cell::unit();
    let atoms = AtomSet::random_neutral(64, 2024).unwrap();
    let fine = Dims::cube(32).unwrap();
    let beta = default_beta(fine, &cell);
    let oracle = direct_recip_oracle(&atoms, beta, kmax_for(beta, &cell, 1e-16), &cell);
    let errors = |n: usize| {
        let d = Dims::cube(n).unwrap();
        let r = lr_pipeline(&atoms, &make_greens(d, beta, &cell).unwrap(), &cell).unwrap();
        (
            (r.energy - oracle.energy).abs() / oracle.energy.abs(),
            r.forces.max_rel_error(&oracle.forces),
        )
    };
    let (e32, f32_) = errors(32);
    let (_, f16) = errors(16);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        e32 <= 1e-3 && f32_ <= 1e-3 && f32_ < f16 && secs < 60.0,
        format!(
            "64 atoms, 32^3, beta {beta:.3}: energy rel err {e32:.2e}, force rel err {f32_:.2e} (tol 1e-3); 16^3 force err {f16:.2e} > 32^3; {secs:.2} s (< 60 s)"
        ),
    )
}

fn force_gradient() -> Outcome {
    let cell = Cell::unit();
    let d = Dims::cube(32).unwrap();
    let g = make_greens(d, default_beta(d, &cell), &cell).unwrap();
    let atoms = AtomSet::random_neutral(10, 77).unwrap();
    let forces = lr_pipeline(&atoms, &g, &cell).unwrap().forces;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..atoms.len() {
        let mut diff2 = 0.0;
        for axis in 0..3 {
            let e = |s: f64| lr_pipeline(&atoms.displaced(i, axis, s), &g, &cell).unwrap().energy;
            let fd = -(e(h) - e(-h)) / (2.0 * h);
            diff2 += (forces.0[i][axis] - fd).powi(2);
        }
        let norm = forces.0[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(diff2.sqrt() / norm);
    }
    outcome(
        worst <= 1e-5,
        format!("forces vs central differences of energy, 10 atoms, step 1e-5: max rel err {worst:.2e} (tol 1e-5)"),
    )
}

fn fft_table() -> Outcome {
    let rows = fft_rows(DEFAULT_FMAX_HZ);
    let worst = rows.iter().map(|r| (r.model_us - r.printed_us).abs()).fold(0.0, f64::max);
    outcome(
        rows.len() == 40 && worst <= 0.05,
        format!("FFT pass table: {} cells at 300 MHz, max |model - printed| {worst:.4} us (tol 0.05)", rows.len()),
    )
}

fn a2a_table() -> Outcome {
    let rows = a2a_rows(DEFAULT_BANDWIDTH_BPS).unwrap();
    let worst = rows.iter().map(|r| (r.model_us - r.printed_us).abs()).fold(0.0, f64::max);
    let flagged: Vec<_> = rows.iter().filter(|r| !r.flag.is_empty()).collect();
    let flag_ok = flagged.len() == 1
        && flagged[0].nodes == 8
        && flagged[0].topology == "3D Torus"
        && (flagged[0].formula_us - 94.1).abs() <= 0.05
        && (flagged[0].model_us - 47.1).abs() <= 0.05;
    outcome(
        rows.len() == 95 && worst <= 0.05 && flag_ok,
        format!(
            "all-to-all table at 78 Gbps: {} cells, max |model - printed| {worst:.4} us (tol 0.05); flagged 8-node 3D torus 128^3: formula {:.2} us, override L=6 {:.2} us",
            rows.len(),
            flagged.first().map_or(f64::NAN, |r| r.formula_us),
            flagged.first().map_or(f64::NAN, |r| r.model_us)
        ),
    )
}

fn gflops() -> Outcome {
    let rows = gflops_rows();
    let worst = rows.iter().map(|r| r.rel_delta.abs()).fold(0.0, f64::max);
    let detail = rows
        .iter()
        .map(|r| format!("{} {:.0} vs {:.0}", r.size, r.model_gflops, r.printed_gflops))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(
        rows.len() == 2 && worst < 0.05,
        format!("GFlops from measured times: {detail}; max rel diff {:.1}% (tol 5%)", worst * 100.0),
    )
}

fn balance() -> Outcome {
    let rows = balance_rows(DEFAULT_FMAX_HZ, DEFAULT_BANDWIDTH_BPS, DEFAULT_BALANCE_THRESHOLD).unwrap();
    let mut missing = Vec::new();
    for (marker, units, nets) in BALANCE_MARKERS {
        for &(nodes, kind) in nets {
            let found = rows.iter().any(|r| {
                r.units == units
                    && r.nodes == nodes
                    && r.topology == kind.table_name()
                    && r.marker == format!("({marker})")
            });
            if !found {
                missing.push(format!("({marker}) {units} units / {nodes} {}", kind.table_name()));
            }
        }
    }
    outcome(
        missing.is_empty(),
        format!(
            "balance search at 25%: {} balanced points, markers (1)-(5) recovered{}",
            rows.len(),
            if missing.is_empty() { String::new() } else { format!("; missing {missing:?}") }
        ),
    )
}

fn schedules() -> Outcome {
    let bad: Vec<usize> = (1..=64).filter(|&n| make_schedule(n).validate().is_err()).collect();
    outcome(
        bad.is_empty(),
        format!("round-robin schedules N = 1..=64: perfect matchings with exactly-once pair coverage; failures {bad:?}"),
    )
}

fn not_reproducible() -> Outcome {
    outcome(
        true,
        "stated: measured 206 us/timestep at 65536 atoms, measured FFT and LR runtimes, and fMax values depend on FPGA hardware and are not reproduced; their ideal analytic counterparts are criteria 5-8 and numerics are checked by oracle in 1-4".into(),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("fft correctness", fft_oracle),
        ("distributed equivalence", distributed_equivalence),
        ("pme vs oracle", pme_vs_oracle),
        ("force-gradient consistency", force_gradient),
        ("fft pass table", fft_table),
        ("all-to-all table", a2a_table),
        ("gflops", gflops),
        ("balance markers", balance),
        ("schedule properties", schedules),
        ("hardware-only results", not_reproducible),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} [{name}]: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
