//! Run every property suite on a small budget.
//!
//! cargo run --release --example selftest

use projpair::selftest;
use projpair::Tolerances;

fn main() {
    let r = selftest::run(7, 20, &Tolerances::default());
    for s in &r.suites {
        println!("{:<24} {}/{}", s.name, s.passed, s.trials);
    }
    println!("all passed: {}", r.all_passed);
}
