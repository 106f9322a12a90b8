//! Key sizes and search-space exponents for both parameter sets.

use rkem::accounting::{render_table, SecurityReport};
use rkem::ParamSet;

fn main() {
    let reports = [
        SecurityReport::new("rm16", &ParamSet::rm16()),
        SecurityReport::new("rm32", &ParamSet::rm32()),
    ];
    print!("{}", render_table(&reports));
    for r in &reports {
        println!("{}: public key is {:.3} of the McEliece key", r.label, r.size_ratio());
    }
}
