// Reports from the experiment runner: the same configuration renders to the
// same bytes, in JSON or CSV.
//
// Run with `cargo run --example reproducible_report`.

use std::error::Error;

use exchkit::cli::{run, CommandName, ExperimentConfig};
use exchkit::report::Format;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = ExperimentConfig {
        command: Some(CommandName::ResampleTest),
        spec: Some(concat!(env!("CARGO_MANIFEST_DIR"), "/data/spec.json").into()),
        seed: Some(42),
        reps: Some(4_000),
        ..Default::default()
    }
    .resolve()?;
    let first = run(&config)?.render(Format::Json);
    let second = run(&config)?.render(Format::Json);
    assert_eq!(first, second);
    println!("two runs, {} identical bytes", first.len());

    let tv = ExperimentConfig { command: Some(CommandName::TvBound), n: Some(10), k: Some(3), ..Default::default() }
        .resolve()?;
    let report = run(&tv)?;
    print!("{}", report.render(Format::Csv));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
