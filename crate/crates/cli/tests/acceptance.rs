//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use cotype::lattice::{tally_cotypes, HermiteBasis, DEFAULT_MATRIX_CAP};
use cotype::sim::{
    exhaustive_cokernel_types, rank_bands, rank_label, rank_table, sample_cokernel_type, Model, SampleConfig,
    INFINITE_LABEL,
};
use cotype::sim::containment_probability_exact;
use cotype::verify::{verify_autorder, verify_descent, verify_oracle, verify_qident, verify_zidentity, Fault};
use cotype::zeta::{corank_density, squarefree_density};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn oracle_duality() -> Outcome {
    let mut checks = 0;
    for d in 2..=4 {
        for p in [2u64, 3] {
            let r = verify_oracle(d, p, 4, Fault(false)).map_err(|e| e.to_string())?;
            if !r.passed() {
                return Err(r.counterexample.unwrap_or_default());
            }
            checks += r.checks;
        }
    }
    Ok(format!("{checks} exact comparisons"))
}

fn descent_three_way() -> Outcome {
    let r = verify_descent(7, Fault(false)).map_err(|e| e.to_string())?;
    check(r.passed(), format!("{} comparisons, d <= 7", r.checks), r.counterexample.unwrap_or_default())
}

fn q_identities() -> Outcome {
    let r = verify_qident(8, 4, 6, Fault(false)).map_err(|e| e.to_string())?;
    check(r.passed(), format!("{} polynomial identities", r.checks), r.counterexample.unwrap_or_default())
}

fn stanley_wang() -> Outcome {
    let r = verify_zidentity(6, &[2, 3, 5], Fault(false)).map_err(|e| e.to_string())?;
    check(r.passed(), format!("{} exact rational equalities", r.checks), r.counterexample.unwrap_or_default())
}

fn density_constants() -> Outcome {
    let e = |e: cotype::Error| e.to_string();
    let m1 = corank_density(30, 1, 1_000_000).map_err(e)?;
    let m2 = corank_density(30, 2, 1_000_000).map_err(e)?;
    let m3 = corank_density(30, 3, 1_000_000).map_err(e)?;
    let sf = squarefree_density(100_000).map_err(e)?;
    let detail = format!(
        "m=1: {:.6}, m=2: {:.6}, m=3: {:.7}, squarefree: {:.6} (+/- {:.1e})",
        m1.value, m2.value, m3.value, sf.value, sf.tail_bound
    );
    let ok = (0.84..=0.86).contains(&m1.value)
        && (m2.value - 0.994).abs() <= 0.001
        && (m3.value - 0.99995).abs() <= 0.00002
        && (sf.value - 0.4366).abs() + sf.tail_bound <= 0.001;
    check(ok, detail.clone(), detail)
}

fn tauberian() -> Outcome {
    let theta2 = 15.0 / std::f64::consts::PI.powi(2);
    let mut devs = Vec::new();
    for x in [100u64, 1_000, 10_000] {
        let t = tally_cotypes(2, x, DEFAULT_MATRIX_CAP).map_err(|e| e.to_string())?;
        let ratio = t.corank_at_most(1) as f64 * 2.0 / (x as f64 * x as f64);
        devs.push((ratio - theta2).abs() / theta2);
    }
    let rises = devs.windows(2).filter(|w| w[1] > w[0]).count();
    let detail = format!("relative deviations {devs:.5?} from theta_2 = {theta2:.6}");
    check(devs[2] < 0.02 && rises <= 1, detail.clone(), detail)
}

fn automorphisms() -> Outcome {
    let r = verify_autorder(&[2, 3], 64, Fault(false)).map_err(|e| e.to_string())?;
    check(r.passed(), format!("{} comparisons over all types of order <= 64", r.checks), r.counterexample.unwrap_or_default())
}

/// Exhaustive 2x2, entries in {-1,0,1}: p-rank of the cokernel from the
/// determinant and the rank mod 2.
fn direct_rank_counts() -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    let v = [-1i64, 0, 1];
    for a in v {
        for b in v {
            for c in v {
                for e in v {
                    let det = a * e - b * c;
                    let label = if det == 0 {
                        INFINITE_LABEL.to_string()
                    } else if det % 2 != 0 {
                        rank_label(0)
                    } else if [a, b, c, e].iter().any(|x| x % 2 != 0) {
                        rank_label(1)
                    } else {
                        rank_label(2)
                    };
                    *out.entry(label).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

fn monte_carlo() -> Outcome {
    let cfg = SampleConfig {
        d: 2,
        model: Model::Matrix { k: 10_000 },
        trials: 100_000,
        master_seed: 7,
        p: 2,
        exponent_cap: None,
    };
    let samples = sample_cokernel_type(&cfg).map_err(|e| e.to_string())?;
    let bands = rank_bands(&rank_table(&samples), 2, 2, 4.0).map_err(|e| e.to_string())?;
    let exhaustive = rank_table(&exhaustive_cokernel_types(2, 1, 2).map_err(|e| e.to_string())?);
    let exact_ok = exhaustive.counts == direct_rank_counts();
    let zs: Vec<String> = bands.iter().map(|b| format!("m={} z={:.2}", b.m, b.z)).collect();
    let detail = format!("{}; exhaustive k=1 matches direct count: {exact_ok}", zs.join(", "));
    check(bands.iter().all(|b| b.pass) && exact_ok, detail.clone(), detail)
}

fn containment() -> Outcome {
    let one = containment_probability_exact(&HermiteBasis::scalar(1, 2), 11).map_err(|e| e.to_string())?;
    let half = num_rational::BigRational::new(BigInt::from(1), BigInt::from(2));
    if one != half {
        return Err(format!("d=1, L=(2), X=11 gave {one}"));
    }
    let x = 10_000u64;
    let mut worst = Vec::new();
    for big_d in [2i64, 3, 4] {
        let mut lattices = vec![
            HermiteBasis::from_i64(2, &[1, 0, 0, big_d]).unwrap(),
            HermiteBasis::from_i64(2, &[big_d, 1, 0, 1]).unwrap(),
        ];
        if big_d == 4 {
            lattices.push(HermiteBasis::scalar(2, 2));
        }
        let bound = 10.0 * (x as f64).ln() / (x as f64 * big_d as f64);
        for l in lattices {
            let v = containment_probability_exact(&l, x).map_err(|e| e.to_string())?.to_f64().unwrap();
            let dev = (v - 1.0 / (big_d * big_d) as f64).abs();
            if dev >= bound {
                return Err(format!("D={big_d}: |{v} - 1/D^2| = {dev:.3e} >= {bound:.3e}"));
            }
            worst.push(format!("D={big_d}: {dev:.1e} < {bound:.1e}"));
        }
    }
    Ok(format!("d=1 gives 1/2; {}", worst.join(", ")))
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cotype")).args(args).output().expect("binary runs")
}

fn reproducibility() -> Outcome {
    let dir = std::env::temp_dir().join(format!("cotype-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let manifest = dir.join("run.json");
    let manifest_s = manifest.to_str().unwrap();
    let args = ["simulate", "matrix", "-d", "2", "-k", "1000", "-p", "2", "-n", "20000", "--seed", "11"];
    let a = cli(&args);
    let mut with_manifest: Vec<&str> = args.to_vec();
    with_manifest.extend(["--manifest", manifest_s]);
    let b = cli(&with_manifest);
    if !a.status.success() || a.stdout != b.stdout {
        return Err("two seeded runs differ".into());
    }
    let replay = cli(&["replay", manifest_s]);
    if !replay.status.success() || replay.stdout != a.stdout {
        return Err(format!("replay failed: {}", String::from_utf8_lossy(&replay.stderr)));
    }
    let sub = ["simulate", "sublattice", "-d", "2", "-X", "500", "-n", "5000", "--seed", "3"];
    if cli(&sub).stdout != cli(&sub).stdout {
        return Err("seeded sublattice runs differ".into());
    }
    let mut failing = Vec::new();
    for suite in [
        vec!["verify", "qident", "--n", "3", "--e", "1", "--d", "3"],
        vec!["verify", "descent", "--d", "4"],
        vec!["verify", "oracle", "--d", "2", "--p", "2", "--emax", "2"],
        vec!["verify", "autorder", "--max-order", "8"],
        vec!["verify", "zidentity", "--d", "2"],
    ] {
        let mut args = suite.clone();
        args.push("--inject-fault");
        let out = cli(&args);
        let stderr = String::from_utf8_lossy(&out.stderr);
        if out.status.code() != Some(3) || !stderr.contains("counterexample") {
            failing.push(suite[1]);
        }
        if cli(&suite).status.code() != Some(0) {
            failing.push(suite[1]);
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(
        failing.is_empty(),
        "byte-identical seeded output, replay checksum matches, faults exit 3 with counterexample".into(),
        format!("suites with wrong exit behaviour: {failing:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle duality", oracle_duality),
        ("descent three-way agreement", descent_three_way),
        ("q-identities", q_identities),
        ("Stanley-Wang identity", stanley_wang),
        ("density constants", density_constants),
        ("Tauberian trend", tauberian),
        ("automorphism orders", automorphisms),
        ("Monte Carlo concordance", monte_carlo),
        ("containment probability", containment),
        ("reproducibility and exit codes", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({secs:.1}s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.1}s) {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
