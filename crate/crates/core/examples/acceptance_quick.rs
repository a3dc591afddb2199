//! Run the quick acceptance suite (A1–A5) in-process.

use wrz::verify::{run_suite, Suite};

fn main() {
    let results = run_suite(Suite::Quick, |r| println!("{}", r.line()));
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} passed", results.len() - failed, results.len());
}
