//! Parses a flat run configuration, reports range errors and re-serializes it.

use gp_excited::config::parse_config;

fn main() {
    let text = "# excited state at q = 2.1\nq = 2.1\nnx = 255\nseed_x0 = -1.2, 0\nq_schedule = 2.3, 2.2, 2.1\n";
    match parse_config(text) {
        Ok(cfg) => print!("{}", cfg.serialize()),
        Err(e) => eprintln!("{e}"),
    }
    for bad in ["q = 1.5", "b1 = 0.5", "tolerance = 3", "nx = lots"] {
        println!("{bad:>14} -> {}", parse_config(bad).unwrap_err());
    }
}
