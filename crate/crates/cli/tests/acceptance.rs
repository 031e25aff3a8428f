//! One PASS/FAIL line per headline criterion. Exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use spinroof_cli::diagram::SCHEMA;
use spinroof_core::metrology::{classical_limit, min_qfi, quantum_limit, tetrad, xyz_triple, AxisSet};
use spinroof_core::relations::{compute_c, loglog_slope, qubit_equalities};
use spinroof_core::rng::{gaussian_matrix, random_triad, stream, unit_vector};
use spinroof_core::roofs::{
    average_variance, maximal_decomposition, minimal_decomposition, numeric_convex_roof,
    parallel_axis_gaps, RoofBudget,
};
use spinroof_core::states::{
    density_to_bloch, diagonal_spin1, dicke_state, embed_symmetric, product_state, sample_pure,
    sample_state, tetrahedron_state,
};
use spinroof_core::{
    qfi, qfi_bloch_unitary, spin_operators, variance, BlochVector, DensityMatrix, Direction,
    HermitianOperator, Measure, Spin, SpinOperators, C64,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{}; {:.2} s", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail = format!("{} (limit {} s)", o.detail, limit.as_secs());
        }
    }
    o
}

fn qubit(seed: u64, i: u64) -> DensityMatrix {
    sample_state(2, Measure::GinibreMixed { rank: 2 }, &mut stream(seed, i)).unwrap()
}

fn random_direction<R: Rng>(rng: &mut R) -> Direction {
    Direction::normalize(unit_vector(rng)).unwrap()
}

/// Every state against every triad.
fn qubit_equality_suite() -> Outcome {
    let triads: Vec<_> = (0..100).map(|k| random_triad(&mut stream(101, k))).collect();
    let worst = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let rho = qubit(100, i);
            triads
                .iter()
                .flat_map(|t| qubit_equalities(&rho, t).unwrap())
                .map(|r| r.residual.abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst < 1e-10, format!("10^4 states x 10^2 triads, max |residual| {worst:.1e}"))
}

fn roof_attainment() -> Outcome {
    let half = spin_operators(Spin::half());
    let [mut min_dev, mut max_dev, mut gap_dev] = [0.0f64; 3];
    for i in 0..1000u64 {
        let rho = qubit(200, i);
        let n = random_direction(&mut stream(201, i));
        let target = density_to_bloch(&rho).unwrap();
        let ln = half.along(&n);
        let min = minimal_decomposition(&target, &n).unwrap().to_decomposition();
        let max = maximal_decomposition(&target, &n).unwrap().to_decomposition();
        min_dev = min_dev.max((average_variance(&min, &ln).unwrap() - qfi(&rho, &ln).unwrap() / 4.0).abs());
        max_dev = max_dev.max((average_variance(&max, &ln).unwrap() - variance(&rho, &ln).unwrap()).abs());
        for d in [&min, &max] {
            gap_dev = gap_dev.max(parallel_axis_gaps(&target, d, &n).unwrap().residual());
        }
    }
    outcome(
        min_dev < 1e-10 && max_dev < 1e-10 && gap_dev < 1e-10,
        format!("10^3 pairs, min {min_dev:.1e}, max {max_dev:.1e}, parallel-axis {gap_dev:.1e}"),
    )
}

fn spectral_agreement() -> Outcome {
    let half = spin_operators(Spin::half());
    let mut bloch_dev = 0.0f64;
    for i in 0..1000u64 {
        let rho = qubit(300, i);
        let n = random_direction(&mut stream(301, i));
        let r = density_to_bloch(&rho).unwrap();
        bloch_dev = bloch_dev.max((qfi_bloch_unitary(&r, &n) - qfi(&rho, &half.along(&n)).unwrap()).abs());
    }
    let mut pure_dev = 0.0f64;
    for i in 0..1000u64 {
        let mut rng = stream(302, i);
        let dim = 2 + (i % 5) as usize;
        let psi = sample_pure(dim, &mut rng);
        let g = gaussian_matrix(&mut rng, dim, dim);
        let a = HermitianOperator::new((&g + g.adjoint()) * C64::from(0.5)).unwrap();
        let f = qfi(&psi.to_density(), &a).unwrap();
        pure_dev = pure_dev.max((f - 4.0 * psi.variance(&a).unwrap()).abs());
    }
    outcome(
        bloch_dev < 1e-10 && pure_dev < 1e-9,
        format!("Bloch form vs spectral {bloch_dev:.1e}, pure dims 2-6 {pure_dev:.1e}"),
    )
}

fn numeric_roof() -> Outcome {
    let lz = spin_operators(Spin::new(2).unwrap()).z;
    // the default 500 steps leave badly conditioned states short of the
    // gradient tolerance even when the value is already exact
    let budget = RoofBudget {
        steps: 2000,
        ..RoofBudget::default()
    };
    let results: Vec<(f64, bool)> = (0..50u64)
        .map(|i| {
            let rank = 2 + (i % 2) as usize;
            let rho = sample_state(3, Measure::GinibreMixed { rank }, &mut stream(400, i)).unwrap();
            let search = numeric_convex_roof(&rho, &lz, &RoofBudget { seed: i, ..budget }).unwrap();
            ((search.value - qfi(&rho, &lz).unwrap() / 4.0).abs(), search.converged)
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let converged = results.iter().filter(|r| r.1).count();
    outcome(
        worst < 1e-4 && converged == results.len(),
        format!(
            "50 rank-2/3 qutrits, {} restarts x {} steps, worst gap {worst:.1e}, {converged}/50 converged",
            budget.restarts, budget.steps
        ),
    )
}

fn c_of_s() -> Outcome {
    let half = compute_c(Spin::half(), 64, 0).unwrap();
    // s = 2, 5/2, ..., 10
    let table: Vec<_> = (4..=20)
        .into_par_iter()
        .map(|t| compute_c(Spin::new(t).unwrap(), 64, 0).unwrap())
        .collect();
    let points: Vec<(f64, f64)> = table.iter().map(|r| (r.s.s(), r.c)).collect();
    let slope = loglog_slope(&points).unwrap();
    let converged = half.converged && table.iter().all(|r| r.converged);
    outcome(
        (half.c - 0.25).abs() <= 1e-6 && (0.55..=0.8).contains(&slope) && converged,
        format!(
            "c(1/2) = {:.10}, c(2) = {:.6}, c(10) = {:.6}, slope over [2, 10] = {slope:.4}",
            half.c,
            table[0].c,
            table[table.len() - 1].c
        ),
    )
}

fn metrology_saturation() -> Outcome {
    let plane = AxisSet::xy();
    let sphere = AxisSet::FullSphere;
    let up = BlochVector::from_xyz(0.0, 0.0, 1.0).unwrap();
    let mut cases: Vec<(String, DensityMatrix, AxisSet, f64)> = Vec::new();
    for n in [2usize, 4, 6] {
        let nf = n as f64;
        cases.push((format!("twin-Fock N={n}"), dicke_state(n, n / 2).unwrap(), plane, nf * (nf + 2.0) / 2.0));
    }
    for n in 1..=6usize {
        cases.push((format!("all-up N={n}"), product_state(&vec![up; n]).unwrap(), plane, n as f64));
    }
    cases.push(("xyz N=3".into(), product_state(&xyz_triple()).unwrap(), sphere, 2.0));
    cases.push(("tetrad N=4".into(), product_state(&tetrad()).unwrap(), sphere, 8.0 / 3.0));
    cases.push(("tetrahedron N=4".into(), embed_symmetric(&tetrahedron_state()).unwrap(), sphere, 8.0));

    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for (name, rho, axes, expected) in &cases {
        let n = rho.dim().trailing_zeros() as usize;
        let (value, _) = min_qfi(rho, &SpinOperators::collective(n).unwrap(), axes).unwrap();
        let dev = (value - expected).abs();
        worst = worst.max(dev);
        if dev >= 1e-8 {
            failed.push(format!("{name}: {value}"));
        }
    }
    // the expected values are the closed-form limits themselves
    let limits_agree = quantum_limit(&plane, 4) == 12.0
        && classical_limit(&plane, 5) == 5.0
        && quantum_limit(&sphere, 4) == 8.0
        && classical_limit(&sphere, 3) == 2.0;
    outcome(
        failed.is_empty() && limits_agree,
        format!("{} states, worst deviation {worst:.1e}{}", cases.len(), if failed.is_empty() {
            String::new()
        } else {
            format!(", off: {}", failed.join("; "))
        }),
    )
}

fn witness_soundness() -> Outcome {
    let results: Vec<(f64, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(700, i);
            let n = 1 + (i % 5) as usize;
            let product = |rng: &mut _| {
                let blochs: Vec<_> =
                    (0..n).map(|_| BlochVector::new(unit_vector(rng)).unwrap()).collect();
                product_state(&blochs).unwrap()
            };
            // even samples are pure products, odd ones mixtures of up to four
            let rho = if i % 2 == 0 {
                product(&mut rng)
            } else {
                let parts: Vec<_> = (0..2 + (i / 2 % 3)).map(|_| product(&mut rng)).collect();
                let mut w: Vec<f64> = parts.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                DensityMatrix::mixture(w.into_iter().zip(parts.iter())).unwrap()
            };
            let l = SpinOperators::collective(n).unwrap();
            let (p, _) = min_qfi(&rho, &l, &AxisSet::xy()).unwrap();
            let (s, _) = min_qfi(&rho, &l, &AxisSet::FullSphere).unwrap();
            let nf = n as f64;
            (p - nf, s - 2.0 * nf / 3.0)
        })
        .collect();
    let plane = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let sphere = results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let flags = results.iter().filter(|r| r.0 > 1e-9 || r.1 > 1e-9).count();
    outcome(
        flags == 0,
        format!("10^3 separable states N<=5, max excess plane {plane:.1e}, sphere {sphere:.1e}, {flags} false flags"),
    )
}

fn diagonal_spin_one() -> Outcome {
    let l = spin_operators(Spin::new(2).unwrap());
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let a = i as f64 / 9.0;
            let b = (1.0 - a) * j as f64 / 9.0;
            let rho = diagonal_spin1(a, b).unwrap();
            let devs = [
                variance(&rho, &l.z).unwrap() - (1.0 - b - (2.0 * a + b - 1.0).powi(2)),
                qfi(&rho, &l.z).unwrap(),
                variance(&rho, &l.x).unwrap() - (1.0 + b) / 2.0,
                variance(&rho, &l.y).unwrap() - (1.0 + b) / 2.0,
            ];
            worst = devs.iter().map(|d| d.abs()).fold(worst, f64::max);
        }
    }
    outcome(worst < 1e-12, format!("10x10 simplex grid, worst deviation {worst:.1e}"))
}

struct Row {
    purity: f64,
    c: [f64; 3],
}

fn sample_diagram(two_s: u32, mode: &str, samples: u64, seed: u64) -> Result<Vec<Row>, String> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args = [
        "spinroof", "sample-diagram", "--spin", &two_s.to_string(), "--mode", mode, "--samples",
        &samples.to_string(), "--seed", &seed.to_string(),
    ];
    let code = spinroof_cli::run(args, &mut out, &mut err);
    if code != 0 {
        return Err(String::from_utf8_lossy(&err).into_owned());
    }
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    let (first, body) = text.split_once('\n').ok_or("empty output")?;
    if first != format!("# schema: {SCHEMA}") {
        return Err(format!("unexpected schema line {first:?}"));
    }
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            let num = |k: usize| rec[k].parse::<f64>().map_err(|e| e.to_string());
            if &rec[5] != mode {
                return Err(format!("row mode {:?}", &rec[5]));
            }
            Ok(Row { purity: num(1)?, c: [num(2)?, num(3)?, num(4)?] })
        })
        .collect()
}

fn diagram_invariants() -> Outcome {
    let mut problems = Vec::new();
    let mut check = |label: String, ok: bool| {
        if !ok {
            problems.push(label);
        }
    };
    let sum = |r: &Row| r.c.iter().sum::<f64>();
    let mut rows_checked = 0usize;

    for mode in ["vvv", "vvq", "qqq"] {
        let rows = match sample_diagram(1, mode, 10_000, 1) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("s=1/2 {mode}: {e}")),
        };
        rows_checked += rows.len();
        let bad = rows
            .iter()
            .filter(|r| {
                let expected = match mode {
                    "vvv" => 1.0 - r.purity / 2.0,
                    "vvq" => 0.5,
                    _ => r.purity - 0.5,
                };
                (sum(r) - expected).abs() > 1e-10
            })
            .count();
        check(format!("s=1/2 {mode}: {bad} rows off the plane"), bad == 0);
    }

    let mut spin_one_min = f64::INFINITY;
    for two_s in [2u32, 3] {
        let s = two_s as f64 / 2.0;
        let c = compute_c(Spin::new(two_s).unwrap(), 64, 0).unwrap().c;
        for mode in ["vvv", "vvq", "qqq"] {
            let samples = if two_s == 2 && mode == "vvv" { 100_000 } else { 10_000 };
            let rows = match sample_diagram(two_s, mode, samples, 2) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("2s={two_s} {mode}: {e}")),
            };
            rows_checked += rows.len();
            let ceiling = s * (s + 1.0);
            let bad = rows
                .iter()
                .filter(|r| {
                    let total = sum(r);
                    let in_box = r.c.iter().all(|&x| x >= -1e-12 && x <= s * s + 1e-9);
                    let ok = match mode {
                        "qqq" => total <= ceiling + 1e-9,
                        _ => total >= s - 1e-9 && r.c[0] + r.c[1] >= c - 1e-9 && total <= ceiling + 1e-9,
                    };
                    !(ok && in_box)
                })
                .count();
            check(format!("2s={two_s} {mode}: {bad} rows violate bounds"), bad == 0);
            if two_s == 2 && mode == "vvv" {
                spin_one_min = rows.iter().map(sum).fold(f64::INFINITY, f64::min);
            }
        }
    }
    check(
        format!("spin-1 vvv minimum {spin_one_min:.4} not within 0.05 of 1"),
        (spin_one_min - 1.0).abs() <= 0.05,
    );
    outcome(
        problems.is_empty(),
        format!(
            "{rows_checked} rows, spin-1 vvv minimum sum {spin_one_min:.4}{}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

/// Name, time limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("qubit equality suite", Some(10), qubit_equality_suite),
        ("roof attainment and parallel-axis identities", None, roof_attainment),
        ("spectral QFI agreement", None, spectral_agreement),
        ("numeric convex roof vs closed form", Some(60), numeric_roof),
        ("c(s) value and scaling", Some(300), c_of_s),
        ("metrology saturation", None, metrology_saturation),
        ("witness soundness", None, witness_soundness),
        ("spin-1 diagonal example", None, diagonal_spin_one),
        ("diagram invariants", None, diagram_invariants),
    ];
    let mut failures = 0;
    for (name, limit, f) in criteria {
        let o = timed(limit.map(Duration::from_secs), f);
        if !o.pass {
            failures += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
