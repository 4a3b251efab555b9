//! Runs the built-in validation suite.
//!
//! cargo run --release --example validate

fn main() -> twri::Result<()> {
    let checks = twri::app::validation_suite()?;
    for c in &checks {
        println!("{} {}: {:.3e} (threshold {:.1e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    if checks.iter().any(|c| !c.passed) {
        std::process::exit(1);
    }
    Ok(())
}
