// Seeded samplers checked against the exact laws with a chi-square test.
//
// Run with `cargo run --example samplers`.

use std::error::Error;

use exchkit::combinatorics::{law_with_replacement, law_without_replacement, Urn};
use exchkit::sampling::{sample_iid, sample_without_replacement, RngStream};
use exchkit::stats::{chi_square_gof, tally};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let urn = Urn::parse("a,a,b")?;
    let reps = 20_000;
    let mut rng = RngStream::new(2024, 0);

    let draws = (0..reps).map(|_| sample_without_replacement(&urn, 2, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let fit = chi_square_gof(&tally(draws), &law_without_replacement(&urn, 2)?);
    println!(
        "without replacement: chi2 = {:.3}, df = {}, p = {:.4}",
        fit.statistic, fit.degrees_of_freedom, fit.p_value
    );

    let empirical = urn.empirical();
    let draws = (0..reps).map(|_| sample_iid(&empirical, 2, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let fit = chi_square_gof(&tally(draws), &law_with_replacement(&urn, 2)?);
    println!(
        "with replacement:    chi2 = {:.3}, df = {}, p = {:.4}",
        fit.statistic, fit.degrees_of_freedom, fit.p_value
    );

    // Streams are a pure function of (seed, stream id).
    let a: Vec<_> = (0..5).map(|_| sample_without_replacement(&urn, 3, &mut RngStream::new(7, 3))).collect();
    let b: Vec<_> = (0..5).map(|_| sample_without_replacement(&urn, 3, &mut RngStream::new(7, 3))).collect();
    assert_eq!(a, b);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
