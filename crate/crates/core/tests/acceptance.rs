//! Runs every acceptance criterion at full size and prints one line each.
//! Set `ACCEPTANCE_LEVEL=quick` for the reduced sizes.

use orientcount::validation::{run_validation, Level};

fn main() {
    let level = match std::env::var("ACCEPTANCE_LEVEL").as_deref() {
        Ok("quick") => Level::Quick,
        _ => Level::Full,
    };
    println!("acceptance suite ({level:?})");
    let report = run_validation(level, |r| println!("{}", r.line()));
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!("{} passed, {failed} failed", report.criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
