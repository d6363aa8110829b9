//! The twelve acceptance criteria. Runs without the test harness so each
//! PASS/FAIL line reaches the output; exits nonzero if any criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use normsphere::checks::{self, LemmaKind};
use normsphere::fixtures::{self, Fixture};
use normsphere::isometry::{
    build_extension_p2, reconstruct_two_corner, sampled_from_linear, sphere_map_from_linear,
    verify_extension, Representation, SphereMap,
};
use normsphere::lemmas::{lemma_jj_limits, lemma_xy_recovery};
use normsphere::oracles::{
    intrinsic_distance_oracle, polyline_arclength_oracle, richardson_derivative_oracle, Side, ARCLENGTH_N,
    INTRINSIC_N,
};
use normsphere::report::LemmaRow;
use normsphere::{jumps, DerivativePair, Error, JumpData, LinearMap2x2, NaturalCurve, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn curve(f: &Fixture) -> NaturalCurve {
    f.curve().unwrap()
}

/// Random matrices with entries in [−2, 2], condition number at most 10.
fn generators(seed: u64, count: usize) -> Vec<LinearMap2x2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = LinearMap2x2::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        if m.det().abs() > 0.1 && m.condition_number() <= 10.0 {
            out.push(m);
        }
    }
    out
}

fn summarize(rows: &[LemmaRow]) -> (bool, usize, f64) {
    let failures = rows.iter().filter(|r| !r.pass).count();
    let worst = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    (failures == 0, failures, worst)
}

fn euclidean_ground_truth() -> Outcome {
    let start = Instant::now();
    let nc = curve(&fixtures::euclid());
    let half = (nc.half_length() - PI).abs();
    let mut worst: f64 = 0.0;
    for k in 0..128 {
        let s = k as f64 * nc.total_length() / 128.0;
        let j = jumps(&nc, s).unwrap();
        worst = worst.max(j.jr.abs()).max(j.jt.abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        half <= 1e-9 && worst <= 1e-8 && secs < 1.0,
        format!("|L - pi| = {half:.1e}, max |jump| = {worst:.1e} over 128 s, {secs:.2} s"),
    )
}

fn polyhedral_ground_truth() -> Outcome {
    let f = fixtures::l1();
    let nc = curve(&f);
    let half = (nc.half_length() - 4.0).abs();
    let oracle = polyline_arclength_oracle(nc.norm(), nc.space(), 0.0, PI, ARCLENGTH_N).unwrap();
    let oracle_err = (oracle - 4.0).abs();
    let corners = nc.nonsmooth_scan(1024, 1e-3).unwrap();
    let vertices = nc.norm().corners();
    let mut worst: f64 = 0.0;
    let mut matched = vec![false; vertices.len()];
    for &s in &corners {
        let p = nc.natural_point(s);
        let (i, d) = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (i, (p - *v).euclid()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        matched[i] = true;
        worst = worst.max(d);
    }
    outcome(
        half <= 1e-9
            && oracle_err <= 1e-9
            && corners.len() == 4
            && worst <= 1e-7
            && matched.iter().all(|&m| m),
        format!(
            "|L - 4| = {half:.1e}, oracle |L - 4| = {oracle_err:.1e}, {} corners, max vertex offset {worst:.1e}",
            corners.len()
        ),
    )
}

fn lens_corner_jumps() -> Outcome {
    let nc = curve(&fixtures::lens(0.0));
    let j = jumps(&nc, 0.0).unwrap();
    let direct = (j.jr - (1.0 - SQRT_2)).abs().max(j.jt.abs());
    let r = |s: f64| nc.natural_point(s);
    let d = DerivativePair::new(
        richardson_derivative_oracle(r, 0.0, Side::Left),
        richardson_derivative_oracle(r, 0.0, Side::Right),
    );
    let o = JumpData::from_derivatives(nc.natural_point(0.0), &d, 0.0).unwrap();
    let oracle = (o.jr - j.jr).abs().max((o.jt - j.jt).abs());
    let limits = lemma_jj_limits(&nc.rebased_at(0.0).unwrap()).unwrap().jumps();
    let metric = (limits.jr - j.jr).abs().max((limits.jt - j.jt).abs());
    outcome(
        direct <= 1e-6 && oracle <= 1e-3 && metric <= 1e-3,
        format!(
            "jumps(0) = ({:.9}, {:.1e}), off by {direct:.1e}; Richardson oracle {oracle:.1e}; metric limits {metric:.1e}",
            j.jr, j.jt
        ),
    )
}

fn lemma_suite(kind: LemmaKind, fixtures: &[Fixture], filter: impl Fn(&LemmaRow) -> bool) -> Outcome {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for f in fixtures {
        match checks::run_lemma(kind, f.name, &curve(f)) {
            Ok(r) => rows.extend(r.into_iter().filter(|r| filter(r))),
            Err(e) => errors.push(format!("{}: {e}", f.name)),
        }
    }
    let (pass, failures, worst) = summarize(&rows);
    outcome(
        pass && errors.is_empty(),
        format!(
            "{} rows over {} fixtures, {failures} failing, worst abs err {worst:.1e}{}",
            rows.len(),
            fixtures.len(),
            if errors.is_empty() {
                String::new()
            } else {
                format!(", errors: {}", errors.join("; "))
            }
        ),
    )
}

fn polar_bounds() -> Outcome {
    lemma_suite(LemmaKind::P, &fixtures::all(), |r| {
        r.parameters.starts_with("bound=chord")
    })
}

fn chord_arc_ratio() -> Outcome {
    lemma_suite(LemmaKind::D, &fixtures::all(), |r| {
        r.parameters.ends_with("eps=1e-6")
    })
}

fn strictly_convex() -> Vec<Fixture> {
    fixtures::all()
        .into_iter()
        .filter(|f| f.norm().unwrap().is_strictly_convex())
        .collect()
}

fn one_sided_slopes() -> Outcome {
    lemma_suite(LemmaKind::A, &strictly_convex(), |_| true)
}

fn derivative_recovery() -> Outcome {
    let lens = lemma_suite(LemmaKind::Xy, &fixtures::lenses(), |_| true);
    let e = curve(&fixtures::euclid());
    let singular = matches!(
        lemma_xy_recovery(&e, 0.3, e.half_length() - 0.3),
        Err(Error::SingularSystem { .. })
    );
    outcome(
        lens.pass && singular,
        format!(
            "{}; Euclidean input raises SingularSystem: {singular}",
            lens.detail
        ),
    )
}

fn intrinsic_metric() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for f in fixtures::all() {
        let nc = curve(&f);
        let l = nc.half_length();
        for k in 0..32 {
            let s1 = l * ((k as f64 * 0.618_033_988_749_895 + 0.05) % 1.0);
            let s2 = l * ((k as f64 * 0.414_213_562_373_095 + 0.77) % 1.0);
            let d = intrinsic_distance_oracle(&nc, nc.natural_point(s1), nc.natural_point(s2), INTRINSIC_N)
                .unwrap();
            worst = worst.max((d - (s1 - s2).abs()).abs());
            count += 1;
        }
    }
    outcome(
        worst <= 1e-5,
        format!("{count} pairs, max |d - |s1 - s2|| = {worst:.1e}"),
    )
}

fn p2_round_trip() -> Outcome {
    let nc = Arc::new(curve(&fixtures::double_lens()));
    let corners = nc.norm().corners();
    let (u, v) = (corners[0], corners[1]);
    let mut exact_worst: f64 = 0.0;
    let mut sampled_worst: f64 = 0.0;
    let mut errors = Vec::new();
    for a in generators(9, 20) {
        let (f, _) = sphere_map_from_linear(a, &nc).unwrap();
        match build_extension_p2(&f, u, v) {
            Ok(ext) => exact_worst = exact_worst.max(ext.matrix.max_entry_diff(&a)),
            Err(e) => errors.push(format!("exact {a}: {e}")),
        }
        let g = sampled_from_linear(a, nc.clone(), 4096).unwrap();
        match build_extension_p2(&g, u, v) {
            Ok(ext) => sampled_worst = sampled_worst.max(ext.matrix.max_entry_diff(&a)),
            Err(e) => errors.push(format!("sampled {a}: {e}")),
        }
    }
    outcome(
        errors.is_empty() && exact_worst <= 1e-8 && sampled_worst <= 1e-5,
        format!(
            "20 generators, max entry error exact {exact_worst:.1e}, sampled {sampled_worst:.1e}{}",
            if errors.is_empty() {
                String::new()
            } else {
                format!(", errors: {}", errors.join("; "))
            }
        ),
    )
}

fn two_corner_round_trip() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_half: f64 = 0.0;
    let mut worst_jump: f64 = 0.0;
    let mut errors = Vec::new();
    let mut runs = 0;
    for (i, f) in fixtures::lenses().iter().enumerate() {
        let nc = curve(f);
        for a in generators(100 + i as u64, 20) {
            runs += 1;
            let (map, _) = sphere_map_from_linear(a, &nc).unwrap();
            match reconstruct_two_corner(&map) {
                Ok(rep) => {
                    worst = worst.max(rep.matrix.max_entry_diff(&a));
                    if !rep.stages.iter().all(|s| s.passed()) {
                        errors.push(format!("{} {a}: stage failed", f.name));
                    }
                    worst_half = worst_half.max(rep.stage("half-length").unwrap().deviation);
                    worst_jump = worst_jump.max(rep.stage("corner jumps").unwrap().deviation);
                }
                Err(e) => errors.push(format!("{} {a}: {e}", f.name)),
            }
        }
    }
    outcome(
        errors.is_empty() && worst <= 1e-6,
        format!(
            "{runs} runs, max entry error {worst:.1e}, half-length gap {worst_half:.1e}, jump gap {worst_jump:.1e}{}",
            if errors.is_empty() { String::new() } else { format!(", errors: {}", errors.join("; ")) }
        ),
    )
}

fn negative_controls() -> Outcome {
    let nc = Arc::new(curve(&fixtures::lens(0.2)));
    let a = LinearMap2x2::new(2.0, 1.0, 0.0, 1.0);
    let f = sampled_from_linear(a, nc.clone(), 4096).unwrap();
    let Representation::Sampled(table) = f.representation() else {
        unreachable!()
    };
    let target = table.target_curve().clone();
    let clean = verify_extension(&f, &a, 512).unwrap();

    let mut rows = table.rows().to_vec();
    let kick = Vector2::new(0.6, 0.8);
    rows[1234].1 += 1e-3 * kick / f.target().gauge(kick);
    let rejected = SphereMap::from_rows(nc.clone(), target.clone(), rows.clone()).is_err();
    let bumped = SphereMap::from_rows_unchecked(nc.clone(), target.clone(), rows).unwrap();
    let perturbed = verify_extension(&bumped, &a, 512).unwrap();

    // Slide one row along the target sphere: still on the sphere, but no
    // longer antipodal to its partner row.
    let mut rows = table.rows().to_vec();
    let sigma = target.param_of(rows[77].1);
    rows[77].1 = target.natural_point(sigma + 1e-6);
    let slid = SphereMap::from_rows_unchecked(nc, target, rows).unwrap();
    let anti = verify_extension(&slid, &a, 512).unwrap();

    outcome(
        !clean.antipodality_violated
            && clean.max_deviation < 1e-5
            && rejected
            && perturbed.max_deviation >= 5e-4
            && anti.antipodality_violated,
        format!(
            "clean deviation {:.1e}; bumped row rejected: {rejected}, deviation {:.1e}; antipodal defect {:.1e} flagged: {}",
            clean.max_deviation, perturbed.max_deviation, anti.antipodal_defect, anti.antipodality_violated
        ),
    )
}

fn smoothness_probes() -> Outcome {
    lemma_suite(LemmaKind::Ns, &fixtures::all(), |_| true)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("Euclidean ground truth", euclidean_ground_truth),
        ("polyhedral ground truth", polyhedral_ground_truth),
        ("lens corner jumps", lens_corner_jumps),
        ("polar chord bounds", polar_bounds),
        ("chord/arc ratio", chord_arc_ratio),
        ("one-sided slopes", one_sided_slopes),
        ("derivative recovery", derivative_recovery),
        ("intrinsic metric", intrinsic_metric),
        ("two special points extension", p2_round_trip),
        ("two-corner reconstruction", two_corner_round_trip),
        ("negative controls", negative_controls),
        ("smoothness probes", smoothness_probes),
    ];
    let mut failed = Vec::new();
    let start_all = Instant::now();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} {name}: {} [{:.1} s]",
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
        if !result.pass {
            failed.push(i + 1);
        }
    }
    let total = start_all.elapsed().as_secs_f64();
    if failed.is_empty() {
        println!("acceptance: all 12 criteria passed in {total:.1} s");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?} ({total:.1} s)");
        ExitCode::FAILURE
    }
}
