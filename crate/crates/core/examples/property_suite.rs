//! Runs the full property suite on the default configuration.

use gp_excited::config::RunConfig;
use gp_excited::verify::run_checks;

fn main() -> gp_excited::Result<()> {
    let checks = run_checks(&RunConfig::default(), None)?;
    for c in &checks {
        println!("{:<30} {:<4} {}", c.name, if c.ok { "pass" } else { "FAIL" }, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.ok).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(())
}
