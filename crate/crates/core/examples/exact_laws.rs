// Exact laws of draws from an urn with and without replacement, and how far
// apart they are.
//
// Run with `cargo run --example exact_laws`.

use std::error::Error;

use exchkit::combinatorics::{
    check_equality_condition, law_with_replacement, law_without_replacement, tv_gap_bounds, Urn,
};
use exchkit::rational;
use exchkit::tv_distance;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let urn = Urn::parse("a,a,b")?;
    let without = law_without_replacement(&urn, 2)?;
    let with = law_with_replacement(&urn, 2)?;
    println!("urn {urn}, k = 2");
    println!("  without replacement: {without:?}");
    println!("  with replacement:    {with:?}");
    println!("  total variation:     {}", rational::to_string(&tv_distance(&without, &with)?));

    let bounds = tv_gap_bounds(urn.len(), 2)?;
    println!(
        "  bounds: {} <= {}",
        rational::to_string(&bounds.exact_gap_bound),
        rational::to_string(&bounds.coarse_bound)
    );

    // The first bound is attained exactly when no two points coincide.
    for text in ["a,b,c", "a,a,b"] {
        let eq = check_equality_condition(&Urn::parse(text)?, 2)?;
        println!(
            "urn {text}: distance {} of bound {}, attained = {}",
            rational::to_string(&eq.actual_tv),
            rational::to_string(&eq.bounds.exact_gap_bound),
            eq.is_equality
        );
        assert_eq!(eq.is_equality, eq.points_distinct);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
