//! Set up two connections on a 4-node mesh with first-fit routing and
//! spectrum assignment, printing the layered state after each step, then
//! tear them down again.
//!
//! ```bash
//! cargo run --example rsa_walkthrough
//! ```

use std::sync::Arc;

use flexgrid::lattice::{Lattice, RequestPattern};
use flexgrid::rsa::{ConnectionRequest, LayeredEngine};
use flexgrid::topology::Topology;

const MESH: &str = "\
W N
N S
N E
W E
";

fn print_state(engine: &LayeredEngine) {
    for line in engine.state().dump().lines() {
        println!("    {line}");
    }
    println!();
}

fn main() {
    let topology = Arc::new(Topology::parse(MESH).unwrap());
    let lattice = Arc::new(Lattice::build(RequestPattern::uniform(4), 4).unwrap());
    let mut engine = LayeredEngine::new(lattice, Arc::clone(&topology));

    println!("fresh network (links {:?}):", topology.links());
    print_state(&engine);

    let requests = [
        ConnectionRequest {
            id: 1,
            src: 0,
            dst: 2,
            width: 1,
        }, // W -> S, one slot
        ConnectionRequest {
            id: 2,
            src: 2,
            dst: 3,
            width: 2,
        }, // S -> E, two slots
    ];
    for req in &requests {
        let label = format!(
            "{} -> {} (b={})",
            topology.node_name(req.src),
            topology.node_name(req.dst),
            req.width
        );
        match engine.route(req).unwrap() {
            Some(record) => {
                let nodes = topology
                    .path_nodes(req.src, &record.path)
                    .into_iter()
                    .map(|n| topology.node_name(n).to_string())
                    .collect::<Vec<_>>()
                    .join("-");
                println!(
                    "request {label}: admitted on {} via {nodes}",
                    record.interval
                );
                engine.setup(&record).unwrap();
                print_state(&engine);
            }
            None => println!("request {label}: blocked"),
        }
    }

    println!(
        "availability checks spent routing both connections: {}",
        engine.checks()
    );
    println!();

    engine.teardown(1).unwrap();
    engine.teardown(2).unwrap();
    println!("after tearing both connections down:");
    print_state(&engine);
}
