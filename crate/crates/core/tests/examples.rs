mod bit_permutations {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bit_permutations.rs"));
}

#[test]
fn bit_permutations_runs() {
    bit_permutations::run_example().expect("bit_permutations example should run");
}

mod fft_3d {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fft_3d.rs"));
}

#[test]
fn fft_3d_runs() {
    fft_3d::run_example().expect("fft_3d example should run");
}

mod pme_forces {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pme_forces.rs"));
}

#[test]
fn pme_forces_runs() {
    pme_forces::run_example().expect("pme_forces example should run");
}

mod distributed_fft {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/distributed_fft.rs"));
}

#[test]
fn distributed_fft_runs() {
    distributed_fft::run_example().expect("distributed_fft example should run");
}

mod all_to_all_schedule {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/all_to_all_schedule.rs"));
}

#[test]
fn all_to_all_schedule_runs() {
    all_to_all_schedule::run_example().expect("all_to_all_schedule example should run");
}

mod perf_tables {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/perf_tables.rs"));
}

#[test]
fn perf_tables_runs() {
    perf_tables::run_example().expect("perf_tables example should run");
}

mod balance_points {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/balance_points.rs"));
}

#[test]
fn balance_points_runs() {
    balance_points::run_example().expect("balance_points example should run");
}

mod hazard_reorder {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/hazard_reorder.rs"));
}

#[test]
fn hazard_reorder_runs() {
    hazard_reorder::run_example().expect("hazard_reorder example should run");
}
