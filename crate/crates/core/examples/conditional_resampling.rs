// Measure vectors of a two-class system and resampling given them: the
// resampled system has the law of the original.
//
// Run with `cargo run --example conditional_resampling`.

use std::error::Error;

use exchkit::multiclass::{conditional_resample, measure_vector, statistical_shadow, SystemSpecDocument, TestFunction};
use exchkit::sampling::RngStream;

const SPEC: &str = include_str!("../data/spec.json");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = SystemSpecDocument::from_json(SPEC)?.into_spec()?;
    let mut rng = RngStream::new(11, 0);
    for _ in 0..3 {
        let x = spec.sample(&mut rng)?;
        let y = conditional_resample(&x, &mut rng)?;
        let (mx, my) = (measure_vector(&x)?, measure_vector(&y)?);
        println!("{:?} -> {:?}  measure vector {:?}", x.flatten(), y.flatten(), mx.0);
        assert_eq!(mx, my);
    }

    // Hide the latent structure and compare moments by simulation.
    let black_box = spec.as_black_box()?;
    let battery = TestFunction::shadow_battery(&black_box, 2);
    let report = statistical_shadow(&black_box, &battery, 20_000, 5, 4.0)?;
    let worst = report
        .rows
        .iter()
        .map(|r| r.difference.mean.abs() / r.difference.stderr.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    println!("{} moments compared, largest |difference| / stderr = {worst:.2}", report.rows.len());
    assert!(report.all_pass());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
