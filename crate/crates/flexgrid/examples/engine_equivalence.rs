//! Drive the layered engine and the slot-by-slot baseline in lockstep on
//! random traffic over a 14-node mesh. Every decision must match; the
//! ratio of their availability-check counters shows the work the layered
//! model saves (one mask read per candidate instead of `b` column reads).
//!
//! ```bash
//! cargo run --example engine_equivalence
//! ```

use flexgrid::lattice::RequestPattern;
use flexgrid::rsa::EngineChoice;
use flexgrid::sim::{SimConfig, Simulation, TopologySource};

const NSFNET_LIKE: &str = "\
n1 n2\nn1 n3\nn1 n8\nn2 n3\nn2 n4\nn3 n6\nn4 n5\nn4 n11\nn5 n6\nn5 n7
n6 n10\nn6 n13\nn7 n8\nn8 n9\nn9 n10\nn9 n12\nn9 n14\nn11 n12\nn11 n13
n12 n14\nn13 n14
";

fn main() {
    for pattern in [RequestPattern::uniform(4), RequestPattern::pow2(3)] {
        let mut config = SimConfig::new(TopologySource::Inline(NSFNET_LIKE.into()));
        config.slot_count = 64;
        config.pattern = pattern;
        config.engine = EngineChoice::Both;
        config.num_requests = 20_000;
        config.mean_holding = 100.0;
        config.seed = 42;

        let mut sim = Simulation::new(config).unwrap();
        // Any disagreement between the engines aborts the run with an
        // EngineMismatch error, so reaching the metrics means lockstep held.
        let metrics = sim.run().unwrap();
        let ratio = metrics.oracle_checks as f64 / metrics.layered_checks as f64;

        println!(
            "pattern {pattern}: {} requests, zero mismatches",
            metrics.offered
        );
        println!(
            "  blocking probability  {:.4}",
            metrics.blocking_probability
        );
        println!("  layered checks        {}", metrics.layered_checks);
        println!("  slot-by-slot checks   {}", metrics.oracle_checks);
        println!("  check ratio           {ratio:.3}");
        println!();
    }
}
