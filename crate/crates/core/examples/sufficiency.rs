// Exact check that the measure vector carries everything about a coupled
// two-class system: given it, the classes are independent and each is
// resampled on its own.
//
// Run with `cargo run --example sufficiency`.

use std::error::Error;

use exchkit::multiclass::{verify_sufficiency, MulticlassError, SystemSpecDocument};

const SPEC: &str = include_str!("../data/spec.json");
const SKEWED: &str = include_str!("../data/skewed_spec.json");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = SystemSpecDocument::from_json(SPEC)?.into_spec()?;
    let report = verify_sufficiency(&spec)?;
    println!("{report:#?}");
    assert!(report.holds());
    // The classes are dependent, yet independent given the measure vector.
    assert!(!report.unconditionally_factorizes);

    let skewed = SystemSpecDocument::from_json(SKEWED)?.into_spec()?;
    assert_eq!(verify_sufficiency(&skewed), Err(MulticlassError::NotMultiExchangeable));
    println!("a law that is not invariant under swaps is rejected");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
