//! Block and key error rates against the common-randomness disagreement rate.

use rkem::sim::{eps_sweep, parse_sweep, write_curve_csv, ExperimentConfig};
use rkem::ParamSet;

fn main() {
    let rates = parse_sweep("0:0.12:7").unwrap();
    for (name, ps) in [("rm16", ParamSet::rm16()), ("rm32", ParamSet::rm32())] {
        let rows = eps_sweep(&ExperimentConfig::new(ps, 500, 1), &rates).unwrap();
        println!("# {name}");
        write_curve_csv(&rows, std::io::stdout()).unwrap();
    }
}
