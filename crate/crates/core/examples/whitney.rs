//! Counts planar rotation systems of small 3-connected graphs by brute force.

use unimap::generators;
use unimap::planar::whitney_check;

fn main() {
    let graphs = [
        ("K4", generators::complete(4)),
        ("prism", generators::prism()),
        ("cube", generators::cube()),
        ("wheel(6)", generators::wheel(6)),
        ("cycle(5)", generators::cycle(5)),
    ];
    for (name, g) in graphs {
        match whitney_check(&g) {
            Ok(unique) => println!("{name}: unique up to reflection = {unique}"),
            Err(e) => println!("{name}: {e}"),
        }
    }
}
