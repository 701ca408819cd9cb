//! Staged end-cut removal on the ladder and on the free product of two
//! triangles.

use unimap::enddecomp::{ComponentClass, DecomposeConfig, Decomposer};

fn main() -> unimap::Result<()> {
    for name in ["ladder", "freeprod-triangle"] {
        let config = DecomposeConfig {
            r_max: 2,
            ..DecomposeConfig::default()
        };
        let dec = Decomposer::new(name, config)?;
        println!("{name}: view of {} vertices", dec.view.num_vertices());
        let report = dec.run(1)?;
        for s in &report.stages {
            println!(
                "  R={} log2 M={} h_esc={} rounds={} removed={}",
                s.schedule.r, s.schedule.log2_m, s.h_esc, s.rounds, s.removed
            );
        }
        println!(
            "  finite={} one-escape={} multi-escape={} forest={}",
            report.count(ComponentClass::Finite),
            report.count(ComponentClass::OneEscape),
            report.count(ComponentClass::MultiEscape),
            report.forest
        );
    }
    Ok(())
}
