// A family of coupled systems whose infinite class is directed by `δ_a` with
// weight `1/2 + 1/(2r)`: moments of the system and of its measure vector
// converge together.
//
// Run with `cargo run --example convergence`; pass `--emit-family` to print
// the family as JSON instead.

use std::error::Error;

use exchkit::convergence::{convergence_report, ConvergenceOptions, FamilyDocument, SystemFamily};
use exchkit::multiclass::{ClassSpec, LatentComponent, SystemSpec};
use exchkit::rational::{self, ratio, Rational};
use exchkit::{tuple, DiscreteMeasure};

fn member(w: Rational) -> Result<SystemSpec, Box<dyn Error>> {
    let classes = vec![ClassSpec::finite("A", 2, &["a", "b"]), ClassSpec::infinite("B", 3, &["a", "b"])];
    let dirac = |s: &str| DiscreteMeasure::dirac(tuple(s));
    Ok(SystemSpec::exact(
        classes,
        vec![
            LatentComponent { weight: w.clone(), finite_law: Some(dirac("aa")?), directing: vec![dirac("a")?] },
            LatentComponent {
                weight: rational::one() - w,
                finite_law: Some(DiscreteMeasure::uniform([tuple("ab"), tuple("ba")])?),
                directing: vec![dirac("b")?],
            },
        ],
    )?)
}

pub fn family() -> Result<SystemFamily, Box<dyn Error>> {
    let members = [1, 2, 4, 8, 16, 32, 64]
        .into_iter()
        .map(|r| Ok((ratio(r, 1), member(ratio(1, 2) + ratio(1, 2 * r))?)))
        .collect::<Result<Vec<_>, Box<dyn Error>>>()?;
    Ok(SystemFamily::new(members, member(ratio(1, 2))?)?)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let fam = family()?;
    let options = ConvergenceOptions { k: 2, degree: 3, tolerance: ratio(1, 100) };
    let report = convergence_report(&fam, &options)?;
    println!("{:>6} {:>10} {:>10} {:>10}", "r", "fdd gap", "vec gap", "bound");
    for row in &report.rows {
        println!(
            "{:>6} {:>10} {:>10} {:>10}",
            rational::to_string(&row.r),
            rational::to_string(&row.fdd_gap),
            rational::to_string(&row.vector_gap),
            rational::to_string(&row.fdd_bound)
        );
    }
    println!("transfer constant {}", rational::to_string(&report.transfer_constant));
    println!("vector => system: {}", report.vector_to_system);
    println!("system => vector: {}", report.system_to_vector);
    assert!(report.supports_equivalence());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    if std::env::args().any(|a| a == "--emit-family") {
        println!("{}", FamilyDocument::from_family(&family()?)?.to_json());
        return Ok(());
    }
    run_example()
}
