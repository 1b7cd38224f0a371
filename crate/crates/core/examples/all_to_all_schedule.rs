// Round-robin all-to-all schedules and their packing onto multihop
// networks.

use lrpme::cluster::{make_schedule, pack_schedule};
use lrpme::{Network, TopologyKind};

pub fn run_example() -> lrpme::Result<()> {
    let s = make_schedule(4);
    print!("{}", s.dump());
    s.validate()?;

    for kind in TopologyKind::ALL {
        let net = Network::new(kind, 16)?;
        let packed = pack_schedule(&make_schedule(16), &net, 1)?;
        println!(
            "{:<12} 16 nodes: mean hops {:.3}, makespan {:>3} slots (busiest link {:>3}), max buffer {}",
            kind.table_name(),
            packed.mean_hops,
            packed.makespan_slots,
            packed.busiest_link_slots,
            packed.max_buffer_occupancy
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lrpme::Result<()> {
    run_example()
}
