//! Build the slot-interval lattices of a single link and inspect them:
//! per-level node counts, closed-form totals, meets/joins, and a DOT
//! rendering of the Hasse diagram.
//!
//! ```bash
//! cargo run --example hasse_lattice
//! ```

use flexgrid::lattice::{JoinResult, Lattice, RequestPattern, SlotInterval};

fn describe(pattern: RequestPattern, slots: usize) {
    let lattice = Lattice::build(pattern, slots).unwrap();
    println!("pattern {pattern} over {slots} slots:");
    println!(
        "  nodes = {} (closed form {})",
        lattice.len(),
        Lattice::expected_node_count(pattern, slots).unwrap()
    );
    for &width in lattice.levels() {
        let row = lattice
            .level_nodes(width)
            .unwrap()
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        println!("  level {width}: {row}");
    }
    println!();
}

fn main() {
    describe(RequestPattern::uniform(4), 4);
    describe(RequestPattern::pow2(2), 4);

    let a = SlotInterval::new(0, 2);
    let b = SlotInterval::new(1, 3);
    println!("meet of {a} and {b}: {}", a.meet(&b).unwrap());
    match a.join(&b, RequestPattern::uniform(4)) {
        JoinResult::Joined(j) => println!("join of {a} and {b} under uniform:4: {j}"),
        JoinResult::OutOfLattice => unreachable!("width 4 is admissible"),
    }
    let c = SlotInterval::new(3, 3);
    println!(
        "join of {} and {c} under uniform:2: {:?}",
        SlotInterval::single(0),
        SlotInterval::single(0).join(&c, RequestPattern::uniform(2))
    );
    println!();

    // Realistic single-fiber scale from the literature.
    let big = Lattice::build(RequestPattern::uniform(32), 400).unwrap();
    println!("uniform:32 over 400 slots has {} nodes", big.len());
    println!();

    println!(
        "{}",
        Lattice::build(RequestPattern::uniform(4), 4)
            .unwrap()
            .to_dot()
    );
}
