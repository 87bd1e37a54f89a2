//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any
//! failure.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use exchkit::combinatorics::{
    decompose_product_power, law_with_replacement, law_without_replacement, tv_gap_bounds, Urn,
};
use exchkit::convergence::{convergence_report, ConvergenceOptions, Verdict};
use exchkit::multiclass::{
    estimate_directing_measure, joint_law_exact, statistical_shadow, verify_sufficiency, SystemSpecDocument,
    TestFunction,
};
use exchkit::rational::{self, Rational};
use exchkit::sampling::{sample_directing_measure, sample_iid, sample_without_replacement, MixtureModel, RngStream};
use exchkit::stats::{chi_square_gof, tally};
use exchkit::{tensor_power, tv_distance, Atom};

mod convergence_example {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/convergence.rs"));
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Size-`n` multisets over `alphabet`, as sorted words.
fn multisets(alphabet: &[&'static str], n: usize) -> Vec<Vec<&'static str>> {
    fn go(
        alphabet: &[&'static str],
        n: usize,
        from: usize,
        cur: &mut Vec<&'static str>,
        out: &mut Vec<Vec<&'static str>>,
    ) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in from..alphabet.len() {
            cur.push(alphabet[i]);
            go(alphabet, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(alphabet, n, 0, &mut Vec::new(), &mut out);
    out
}

fn ordered(alphabet: &[&'static str], n: usize) -> Vec<Vec<&'static str>> {
    all_index_tuples(alphabet.len(), n).into_iter().map(|t| t.iter().map(|&i| alphabet[i]).collect()).collect()
}

fn urn(points: &[&str]) -> Urn {
    Urn::parse(&points.join(",")).unwrap()
}

fn pow(n: usize, k: usize) -> Rational {
    q((n as i64).pow(k as u32), 1)
}

fn falling(n: usize, k: usize) -> Rational {
    q((0..k).map(|t| (n - t) as i64).product(), 1)
}

fn decomposition_identity() -> Outcome {
    let mut cases = 0;
    for n in 1..=6 {
        for points in multisets(&["a", "b", "c"], n) {
            let u = urn(&points);
            for k in 1..=n {
                let dec = decompose_product_power(&u, k).map_err(|e| e.to_string())?;
                let rebuilt = dec.reconstruct().map_err(|e| e.to_string())?;
                ensure(rebuilt == tensor_power(&u.empirical(), k).unwrap(), || {
                    format!("{points:?} k={k}: reconstruction")
                })?;
                ensure(to_pmf(&rebuilt) == draws(&points, k, true), || format!("{points:?} k={k}: index oracle"))?;
                ensure(dec.coefficient_sum() == rational::one(), || format!("{points:?} k={k}: coefficients"))?;
                let groups = collision_groups(&points, k);
                for term in &dec.terms {
                    let (share, pmf) = &groups[&term.image_size];
                    ensure(&term.coefficient == share && &to_pmf(&term.measure) == pmf, || {
                        format!("{points:?} k={k} j={}: term", term.image_size)
                    })?;
                }
                cases += 1;
            }
        }
    }
    // The point order of an urn does not matter.
    let mut reorderings = 0;
    for n in 1..=4 {
        for points in ordered(&["a", "b", "c"], n) {
            let mut sorted = points.clone();
            sorted.sort();
            for k in 1..=n {
                let a = decompose_product_power(&urn(&points), k).map_err(|e| e.to_string())?;
                let b = decompose_product_power(&urn(&sorted), k).map_err(|e| e.to_string())?;
                ensure(a == b, || format!("{points:?} k={k}: order dependence"))?;
                reorderings += 1;
            }
        }
    }
    Ok(format!("{cases} (urn, k) cases over multisets on {{a,b,c}} with N <= 6, {reorderings} reordered"))
}

fn gap_bounds() -> Outcome {
    let (mut cases, mut equalities) = (0, 0);
    for n in 2..=5 {
        for points in multisets(&["a", "b", "c", "d", "e"], n) {
            let u = urn(&points);
            let distinct = points.windows(2).all(|w| w[0] != w[1]);
            for k in 2..=n {
                let tv = tv_distance(&law_without_replacement(&u, k).unwrap(), &law_with_replacement(&u, k).unwrap())
                    .unwrap();
                let oracle_tv = l1(&draws(&points, k, false), &draws(&points, k, true));
                let exact = q(2, 1) * (pow(n, k) - falling(n, k)) / pow(n, k);
                let coarse = q((k * (k - 1)) as i64, n as i64);
                let b = tv_gap_bounds(n, k).map_err(|e| e.to_string())?;
                ensure(tv == oracle_tv, || format!("{points:?} k={k}: tv {tv} vs oracle {oracle_tv}"))?;
                ensure(b.exact_gap_bound == exact && b.coarse_bound == coarse, || format!("N={n} k={k}: bounds"))?;
                ensure(tv <= exact && exact <= coarse, || format!("{points:?} k={k}: ordering"))?;
                ensure((tv == exact) == distinct, || format!("{points:?} k={k}: equality iff distinct"))?;
                equalities += usize::from(tv == exact);
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases over multisets on 5 letters, {equalities} attain the exact bound"))
}

fn exact_sufficiency() -> Outcome {
    let grid = sufficiency_grid();
    let coupled = grid.iter().filter(|s| s.coupled).count();
    ensure(coupled > 0, || "grid has no coupled system".into())?;
    for sys in &grid {
        let spec = sys.spec();
        let joint = to_pmf(&joint_law_exact(&spec).map_err(|e| e.to_string())?);
        ensure(joint == system_law(&sys.components), || format!("{}: joint law", sys.name))?;
        ensure(resampled_law(&sys.components) == joint, || format!("{}: oracle resampling", sys.name))?;
        let report = verify_sufficiency(&spec).map_err(|e| format!("{}: {e}", sys.name))?;
        ensure(report.kernel_reproduces_law && report.composed_law_matches, || format!("{}: kernel", sys.name))?;
        ensure(report.conditionally_factorizes, || format!("{}: factorization", sys.name))?;
    }
    Ok(format!("{} systems, {coupled} latently coupled", grid.len()))
}

fn statistical_shadow_agrees() -> Outcome {
    let text = std::fs::read_to_string(data("spec.json")).map_err(|e| e.to_string())?;
    let spec = SystemSpecDocument::from_json(&text)
        .and_then(SystemSpecDocument::into_spec)
        .and_then(|s| s.as_black_box())
        .map_err(|e| e.to_string())?;
    let battery = TestFunction::shadow_battery(&spec, 2);
    let report = statistical_shadow(&spec, &battery, 100_000, 20240601, 4.0).map_err(|e| e.to_string())?;
    let worst = report
        .rows
        .iter()
        .map(|r| r.difference.mean.abs() / r.difference.stderr.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let failing: Vec<&str> = report.rows.iter().filter(|r| !r.pass).map(|r| r.label.as_str()).collect();
    ensure(failing.is_empty(), || format!("outside 4 SE: {failing:?}"))?;
    Ok(format!("{} moments, 10^5 reps, largest |diff|/SE = {worst:.2}", report.rows.len()))
}

fn convergence_harness() -> Outcome {
    let family = convergence_example::family().map_err(|e| e.to_string())?;
    let rs: Vec<i64> = family.members().iter().map(|(r, _)| r.to_integer().try_into().unwrap()).collect();
    ensure(rs == [1, 2, 4, 8, 16, 32, 64], || format!("grid {rs:?}"))?;
    let options = ConvergenceOptions { k: 2, degree: 3, tolerance: q(1, 100) };
    let report = convergence_report(&family, &options).map_err(|e| e.to_string())?;
    // Class 1 is the infinite class; Λ({a}) has mean equal to the weight of δ_a.
    let row = report.vector_row("L1(a)").ok_or("no L1(a) moment")?;
    for (gap, r) in row.gaps.iter().zip(&rs) {
        let closed = (q(1, 2) + q(1, 2 * r)) - q(1, 2);
        ensure(*gap == closed && closed == q(1, 2 * r), || format!("r={r}: gap {gap}"))?;
    }
    ensure(report.fdd_gaps_strictly_decrease(), || "fdd gaps do not decrease".into())?;
    ensure(report.vector_to_system == Verdict::SupportsEquivalence, || "vector => system".into())?;
    ensure(report.system_to_vector == Verdict::SupportsEquivalence, || "system => vector".into())?;
    let first = rational::to_string(&report.rows[0].fdd_gap);
    let last = rational::to_string(&report.rows.last().unwrap().fdd_gap);
    Ok(format!("L1(a) gap = 1/(2r), fdd gap {first} -> {last}, both verdicts SUPPORTS_EQUIVALENCE"))
}

fn sampler_correctness() -> Outcome {
    let u = urn(&["a", "a", "b"]);
    let reps = 100_000;
    let mut rng = RngStream::new(20240601, 0);
    let without = tally((0..reps).map(|_| sample_without_replacement(&u, 2, &mut rng).unwrap()));
    let mut rng = RngStream::new(20240601, 1);
    let with = tally((0..reps).map(|_| sample_iid(&u.empirical(), 2, &mut rng).unwrap()));
    let wo = chi_square_gof(&without, &law_without_replacement(&u, 2).unwrap());
    let wi = chi_square_gof(&with, &law_with_replacement(&u, 2).unwrap());
    // The exact laws themselves agree with index enumeration.
    ensure(to_pmf(&law_without_replacement(&u, 2).unwrap()) == draws(&["a", "a", "b"], 2, false), || "oracle".into())?;
    ensure(wo.passes(1e-3), || format!("without replacement p = {:.4}", wo.p_value))?;
    ensure(wi.passes(1e-3), || format!("i.i.d. p = {:.4}", wi.p_value))?;
    Ok(format!("p-values {:.4} (without), {:.4} (i.i.d.)", wo.p_value, wi.p_value))
}

fn truncation_contract() -> Outcome {
    let check = |prefix: &[&str], k: usize| -> Result<(), String> {
        let m = prefix.len();
        let atoms: Vec<Atom> = prefix.iter().map(|s| Atom::new(s)).collect();
        let est = estimate_directing_measure(&atoms, k).map_err(|e| e.to_string())?;
        let bound = q((k * (k - 1)) as i64, m as i64);
        ensure(est.truncation_bound == bound, || format!("{prefix:?} k={k}: reported {}", est.truncation_bound))?;
        let without = law_without_replacement(&urn(prefix), k).unwrap();
        let tv = tv_distance(&without, &tensor_power(&est.measure, k).unwrap()).unwrap();
        ensure(tv <= bound, || format!("{prefix:?} k={k}: tv {tv} > {bound}"))?;
        Ok(())
    };
    let mut cases = 0;
    for m in 1..=6 {
        for prefix in ordered(&["a", "b", "c"], m) {
            for k in 1..=m {
                check(&prefix, k)?;
                cases += 1;
            }
        }
    }
    let prior = MixtureModel::new(vec![
        exchkit::sampling::MixtureComponent {
            weight: q(1, 2),
            law: exchkit::DiscreteMeasure::new([(vec![Atom::new("a")], q(1, 3)), (vec![Atom::new("b")], q(2, 3))])
                .unwrap(),
        },
        exchkit::sampling::MixtureComponent {
            weight: q(1, 2),
            law: exchkit::DiscreteMeasure::new([
                (vec![Atom::new("a")], q(1, 4)),
                (vec![Atom::new("b")], q(1, 4)),
                (vec![Atom::new("c")], q(1, 2)),
            ])
            .unwrap(),
        },
    ])
    .map_err(|e| e.to_string())?;
    let mut simulated = 0;
    for rep in 0..200 {
        let mut rng = RngStream::new(7, rep);
        let m = 7 + (rep as usize % 3);
        let (_, directing) = sample_directing_measure(&prior, &mut rng);
        let prefix: Vec<String> =
            sample_iid(directing, m, &mut rng).unwrap().iter().map(|a| a.as_str().to_owned()).collect();
        let prefix: Vec<&str> = prefix.iter().map(String::as_str).collect();
        for k in 1..=4 {
            check(&prefix, k)?;
            simulated += 1;
        }
    }
    Ok(format!("{cases} enumerated and {simulated} simulated (prefix, k) cases"))
}

fn exchkit(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_exchkit"))
        .args(args)
        .env_remove("EXCHKIT_SEED")
        .env("EXCHKIT_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("{args:?} exited with {:?}", out.status.code()))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let spec = data("spec.json");
    let family = data("family.json");
    let config = data("resample.json");
    let (spec, family, config) = (spec.to_str().unwrap(), family.to_str().unwrap(), config.to_str().unwrap());
    let runs: Vec<Vec<&str>> = vec![
        vec!["exact-law", "--urn", "a,a,b,c", "--k", "3"],
        vec!["exact-law", "--urn", "a,a,b,c", "--k", "3", "--with-replacement", "--format", "csv"],
        vec!["tv-bound", "--N", "10", "--k", "3", "--urn", "a,b,c,d,e,f,g,h,i,a"],
        vec!["verify-decomposition", "--urn", "a,a,b,c", "--k", "3"],
        vec!["--config", config],
        vec!["--config", config, "--format", "csv"],
        vec!["resample-test", "--spec", spec, "--seed", "11", "--reps", "5000", "--k", "3"],
        vec!["sufficiency", "--spec", spec],
        vec!["convergence", "--family", family, "--tol", "1e-2"],
    ];
    for args in &runs {
        let a = exchkit(args, "1")?;
        let b = exchkit(args, "4")?;
        ensure(!a.is_empty() && a == b, || format!("{args:?}: reports differ"))?;
    }
    Ok(format!("{} configurations, two runs each with 1 and 4 threads", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("decomposition identity", decomposition_identity),
        ("gap bounds and equality condition", gap_bounds),
        ("exact sufficiency of the measure vector", exact_sufficiency),
        ("statistical shadow of resampling", statistical_shadow_agrees),
        ("convergence harness", convergence_harness),
        ("sampler correctness", sampler_correctness),
        ("truncation-error contract", truncation_contract),
        ("byte-identical reports", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}: {name} ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}: {name} ({detail}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
