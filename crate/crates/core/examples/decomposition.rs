// Splitting i.i.d. draws by how many distinct urn indices they used, and
// rebuilding draws without replacement from the empirical measure alone.
//
// Run with `cargo run --example decomposition`.

use std::error::Error;

use exchkit::combinatorics::{
    decompose_product_power, law_with_replacement, law_without_replacement, law_without_replacement_from_empirical, Urn,
};
use exchkit::rational;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let urn = Urn::parse("a,a,b,c")?;
    let k = 3;
    let dec = decompose_product_power(&urn, k)?;
    println!("urn {urn}, k = {k}");
    for term in &dec.terms {
        println!(
            "  {} distinct indices: weight {}, {} index patterns, law {:?}",
            term.image_size,
            rational::to_string(&term.coefficient),
            term.patterns.len(),
            term.measure
        );
    }
    assert_eq!(dec.reconstruct()?, law_with_replacement(&urn, k)?);
    println!("  weighted terms sum back to the i.i.d. law");

    // Only the empirical measure and N are needed.
    let rebuilt = law_without_replacement_from_empirical(&urn.empirical(), urn.len(), k)?;
    assert_eq!(rebuilt, law_without_replacement(&urn, k)?);
    let shuffled = Urn::parse("c,a,b,a")?;
    assert_eq!(law_without_replacement(&shuffled, k)?, rebuilt);
    println!("  draws without replacement depend on the urn only through its empirical measure");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
