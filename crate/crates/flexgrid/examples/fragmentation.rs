//! Watch spectrum fragmentation appear in the lattice: assigning a slot
//! deletes its up-set from the diagram, and a single interior assignment
//! splits the remainder into disconnected islands of usable intervals.
//!
//! ```bash
//! cargo run --example fragmentation
//! ```

use flexgrid::lattice::{Lattice, RequestPattern, SlotInterval};

fn show_components(lattice: &Lattice, occupied: &[usize]) {
    let slots = occupied
        .iter()
        .map(|&m| SlotInterval::single(m).to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let components = lattice.components_after(occupied);
    println!(
        "occupied {{{slots}}} leaves {} component(s):",
        components.len()
    );
    for component in components {
        let members = component
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        println!("  {{ {members} }}");
    }
    println!();
}

fn main() {
    let lattice = Lattice::build(RequestPattern::uniform(4), 4).unwrap();

    println!("up-set of s_1 (everything a 1-slot assignment at slot 1 kills):");
    for node in lattice.up_set(SlotInterval::single(1)).unwrap() {
        println!("  {node}");
    }
    println!();

    show_components(&lattice, &[]);
    show_components(&lattice, &[1]);
    show_components(&lattice, &[0, 1, 2, 3]);

    // A wider link: every second slot occupied fragments the spectrum
    // into width-1 islands even though half the capacity is free.
    let lattice = Lattice::build(RequestPattern::uniform(4), 12).unwrap();
    let comb: Vec<usize> = (0..12).step_by(2).collect();
    show_components(&lattice, &comb);
}
