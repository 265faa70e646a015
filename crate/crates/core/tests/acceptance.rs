//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use fracorbit::census::{count_upto, enumerate_window, first_elements, phi_summatory};
use fracorbit::cover::{
    build_cover, minimal_k, verify_orbit, CoverPlan, RatioParam, DEFAULT_INTERVAL_BUDGET,
};
use fracorbit::survivor::{
    leaves_per_depth, preset_dubickas_gap, preset_es, preset_mahler_z, preset_pollington, replay,
    search, Certificate, ChildMode, DepthStats, Strategy, TargetSpec, DEFAULT_NODE_BUDGET,
};
use fracorbit::waring::{check_norm, g_formula, scan};
use fracorbit::{rat, CirclePoint, Interval, Rational};
use num_bigint::BigUint;

struct Criterion {
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

fn params(p: u64, q: u64) -> RatioParam {
    RatioParam::new(p, q).expect("p > q^2")
}

fn plan(p: u64, q: u64, eps: Rational) -> CoverPlan {
    CoverPlan::new(params(p, q), eps).expect("valid plan")
}

fn u128_pow(x: u128, k: u32) -> u128 {
    (0..k).fold(1, |acc, _| acc * x)
}

/// `F(k) = 2 (1 + q + ... + q^(k-1)) q^k / (p^k - q^k)` as an integer pair.
fn f_direct(p: u128, q: u128, k: u32) -> (u128, u128) {
    let s: u128 = (0..k).map(|i| u128_pow(q, i)).sum();
    (2 * s * u128_pow(q, k), u128_pow(p, k) - u128_pow(q, k))
}

fn criterion_1(c: &mut Criterion) {
    let k = minimal_k(&params(5, 2), &rat(1, 2)).expect("k");
    c.check(format!("minimal_k(5/2, 1/2) = {k}, expected 7"), k == 7);
    let (n6, d6) = f_direct(5, 2, 6);
    let (n7, d7) = f_direct(5, 2, 7);
    c.check(format!("F(6) = {n6}/{d6} >= 1/2"), 2 * n6 >= d6);
    c.check(format!("F(7) = {n7}/{d7} < 1/2"), 2 * n7 < d7);
}

fn criterion_2(c: &mut Criterion) {
    for (p, q, eps) in [(3u64, 1u64, rat(3, 10)), (5, 2, rat(1, 2))] {
        let plan = plan(p, q, eps.clone());
        let expected: BigUint = (0..plan.k).map(|u| BigUint::from(2 * p.pow(u))).sum();
        match build_cover(&plan, DEFAULT_INTERVAL_BUDGET) {
            Ok(cover) => {
                let set = cover.explicit_set.as_ref().expect("materialized");
                let measure = set.measure();
                c.check(
                    format!("({p},{q},{eps}) measure {measure} < {eps}"),
                    measure < eps,
                );
                c.check(
                    format!(
                        "({p},{q},{eps}) raw count {} = {expected}",
                        cover.interval_count
                    ),
                    cover.interval_count == expected,
                );
            }
            Err(e) => c.check(format!("({p},{q},{eps}) build failed: {e}"), false),
        }
    }
}

fn criterion_3(c: &mut Criterion) {
    let plan = plan(3, 1, rat(3, 10));
    let cover = build_cover(&plan, DEFAULT_INTERVAL_BUDGET).expect("cover");
    let set = cover.explicit_set.as_ref().expect("materialized");
    let mismatches = (0..1000i64)
        .filter(|&i| {
            let x = CirclePoint::new(rat(i, 1009)).expect("in [0,1)");
            set.contains(&x) != fracorbit::cover::member_implicit(&plan, &x)
        })
        .count();
    c.check(
        format!("{mismatches} mismatches over 1000 probes"),
        mismatches == 0,
    );
}

const CODES: [&str; 8] = ["000", "001", "010", "011", "100", "101", "110", "111"];

fn es_certificates() -> Vec<Certificate> {
    let spec = preset_es(&params(5, 2), 7, 1)
        .expect("preset")
        .with_depth(20);
    CODES
        .iter()
        .map(|code| {
            let strategy = Strategy::from_bits(code).expect("code");
            let mut certs = search(&spec, &strategy, 1, DEFAULT_NODE_BUDGET).expect("survivors");
            certs.remove(0)
        })
        .collect()
}

fn disjoint(a: &Interval, b: &Interval) -> bool {
    a.hi < b.lo || b.hi < a.lo
}

fn criterion_4(c: &mut Criterion) {
    let plan = plan(5, 2, rat(1, 2));
    c.check(
        format!("k = {}, s = {}", plan.k, plan.s),
        plan.k == 7 && plan.s == rat(78125, 128),
    );
    let certs = es_certificates();
    c.check(format!("{} certificates", certs.len()), certs.len() == 8);
    let mut overlapping = 0;
    for i in 0..certs.len() {
        for j in i + 1..certs.len() {
            if !disjoint(&certs[i].lambda_interval, &certs[j].lambda_interval) {
                overlapping += 1;
            }
        }
    }
    c.check(format!("{overlapping} overlapping pairs"), overlapping == 0);
    let violations: Vec<String> = CODES
        .iter()
        .zip(&certs)
        .filter_map(
            |(code, cert)| match verify_orbit(&cert.representative, &plan, 140) {
                Ok(v) if v.holds() => None,
                Ok(v) => Some(format!("{code}: {v:?}")),
                Err(e) => Some(format!("{code}: {e}")),
            },
        )
        .collect();
    c.check(
        format!("orbit violations for n <= 140: {violations:?}"),
        violations.is_empty(),
    );
}

fn es_25_4() -> TargetSpec {
    preset_es(&params(5, 2), 2, 1)
        .expect("preset")
        .with_depth(10)
}

fn criterion_5_stats() -> Vec<DepthStats> {
    leaves_per_depth(&es_25_4(), DEFAULT_NODE_BUDGET).expect("within budget")
}

fn non_increasing(rows: &[DepthStats]) -> bool {
    rows.windows(2).all(|w| w[1].measure <= w[0].measure)
}

fn criterion_5(c: &mut Criterion) {
    let spec = es_25_4();
    c.check(
        "s = 25/4, full-component-only",
        spec.ratio == rat(25, 4) && spec.mode == ChildMode::FullComponentOnly,
    );
    let rows = criterion_5_stats();
    let short: Vec<usize> = rows
        .iter()
        .filter(|r| r.leaves < 1 << r.depth)
        .map(|r| r.depth)
        .collect();
    let counts: Vec<usize> = rows.iter().map(|r| r.leaves).collect();
    c.check(
        format!("leaves per depth {counts:?} >= 2^d (short at {short:?})"),
        rows.len() == 11 && short.is_empty(),
    );
    c.check("measure non-increasing", non_increasing(&rows));
}

const Q1_FIRST: [(i64, i64); 13] = [
    (2, 1),
    (5, 2),
    (3, 1),
    (10, 3),
    (7, 2),
    (11, 3),
    (4, 1),
    (17, 4),
    (13, 3),
    (9, 2),
    (14, 3),
    (19, 4),
    (5, 1),
];

fn criterion_6(c: &mut Criterion) {
    let got: Vec<Rational> = first_elements(13).iter().map(|e| e.value()).collect();
    let want: Vec<Rational> = Q1_FIRST.iter().map(|&(p, q)| rat(p, q)).collect();
    c.check("first 13 elements", got == want);
    let bad: Vec<u64> = (2..=50u64)
        .filter(|&n| {
            enumerate_window(n).expect("window").len() as u64 != phi_summatory(n).expect("phi")
        })
        .collect();
    c.check(
        format!("window count = phi sum for 2..=50 (bad: {bad:?})"),
        bad.is_empty(),
    );
    let over: Vec<u64> = (1..=50u64)
        .filter(|&n| count_upto(n).expect("count").count > n.pow(3))
        .collect();
    c.check(
        format!("count_upto(n) <= n^3 for n <= 50 (bad: {over:?})"),
        over.is_empty(),
    );
    let w1 = enumerate_window(1).expect("window").len() as u64;
    let phi1 = phi_summatory(1).expect("phi");
    c.check(
        format!("n = 1 discrepancy reported: window {w1} vs phi sum {phi1}"),
        w1 == 0 && phi1 == 1,
    );
}

fn criterion_7(c: &mut Criterion) {
    let small = scan(1, 10).expect("scan");
    c.check(
        format!("star failures in 1..=10: {:?}", small.star_failures),
        small.star_failures == [1, 2, 3],
    );
    let big = scan(4, 20000).expect("scan");
    c.check(
        format!("star failures in 4..=20000: {}", big.star_failures.len()),
        big.star_failures.is_empty(),
    );
    c.check(
        "check_norm(7) = false, check_norm(8) = true",
        !check_norm(7).expect("norm") && check_norm(8).expect("norm"),
    );
    let gs: Vec<BigUint> = [2, 4, 7]
        .iter()
        .map(|&n| g_formula(n).expect("g"))
        .collect();
    c.check(
        format!("g(2), g(4), g(7) = {gs:?}"),
        gs == [4u32, 19, 143].map(BigUint::from),
    );
}

fn lambda_set(certs: &[Certificate]) -> Vec<Interval> {
    certs.iter().map(|c| c.lambda_interval.clone()).collect()
}

fn criterion_8(c: &mut Criterion) {
    // hand propagation: lambda (3/2) in [2, 5/2] or {3}
    let expected = vec![
        Interval::new(rat(4, 3), rat(5, 3)).expect("interval"),
        Interval::new(rat(2, 1), rat(2, 1)).expect("interval"),
    ];
    match search(
        &preset_mahler_z().with_depth(1),
        &Strategy::Leftmost,
        100,
        DEFAULT_NODE_BUDGET,
    ) {
        Ok(certs) => {
            let got = lambda_set(&certs);
            let shown: Vec<String> = got
                .iter()
                .map(|iv| format!("[{}, {}]", iv.lo, iv.hi))
                .collect();
            c.check(
                format!("Mahler-Z depth-1 survivors {shown:?} = [4/3, 5/3] and {{2}}"),
                got == expected,
            );
        }
        Err(e) => c.check(format!("Mahler-Z depth 1: {e}"), false),
    }

    let mahler =
        leaves_per_depth(&preset_mahler_z().with_depth(30), DEFAULT_NODE_BUDGET).expect("census");
    c.check(
        "Mahler-Z measures non-increasing through depth 30",
        mahler.len() == 31 && non_increasing(&mahler),
    );

    let presets: Vec<(&str, TargetSpec)> = vec![
        ("es 25/4", es_25_4()),
        (
            "es 78125/128",
            preset_es(&params(5, 2), 7, 1)
                .expect("preset")
                .with_depth(6),
        ),
        ("mahler-z", preset_mahler_z().with_depth(5)),
        ("pollington", preset_pollington().with_depth(8)),
        ("dubickas-gap", preset_dubickas_gap().with_depth(4)),
    ];
    for (name, spec) in presets {
        let mut emitted = 0;
        let mut failed = 0;
        for strategy in [Strategy::Leftmost, Strategy::Rightmost] {
            let certs = search(&spec, &strategy, 64, DEFAULT_NODE_BUDGET).expect("survivors");
            emitted += certs.len();
            failed += certs.iter().filter(|cert| !replay(cert)).count();
        }
        c.check(
            format!("{name}: {failed} of {emitted} certificates fail replay"),
            failed == 0,
        );
    }
}

fn determinism_output() -> String {
    let certs = es_certificates();
    let stats = criterion_5_stats();
    format!(
        "{}\n{}",
        serde_json::to_string(&certs).expect("json"),
        serde_json::to_string(&stats).expect("json")
    )
}

fn criterion_9(c: &mut Criterion) {
    let one = in_pool(1, determinism_output);
    let eight = in_pool(8, determinism_output);
    c.check(
        format!(
            "1 worker vs 8 workers: {} vs {} bytes",
            one.len(),
            eight.len()
        ),
        one == eight,
    );
}

type Run = fn(&mut Criterion);

fn main() {
    let criteria: [(u32, &str, Duration, Run); 9] = [
        (1, "minimal k", Duration::from_secs(1), criterion_1),
        (
            2,
            "cover measure and interval count",
            Duration::from_secs(10),
            criterion_2,
        ),
        (
            3,
            "explicit and implicit membership agree",
            Duration::from_secs(5),
            criterion_3,
        ),
        (
            4,
            "disjoint certificates verified through n = 140",
            Duration::from_secs(120),
            criterion_4,
        ),
        (
            5,
            "E_s branching at s = 25/4",
            Duration::from_secs(30),
            criterion_5,
        ),
        (6, "Q1 census", Duration::from_secs(30), criterion_6),
        (
            7,
            "Waring threshold scan",
            Duration::from_secs(120),
            criterion_7,
        ),
        (
            8,
            "conjecture harness sanity",
            Duration::from_secs(60),
            criterion_8,
        ),
        (
            9,
            "determinism across worker counts",
            Duration::from_secs(240),
            criterion_9,
        ),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let mut c = Criterion::new();
        let start = Instant::now();
        run(&mut c);
        let elapsed = start.elapsed();
        c.check(
            format!(
                "runtime {:.2}s <= {}s",
                elapsed.as_secs_f64(),
                limit.as_secs()
            ),
            elapsed <= limit,
        );
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {id} [{verdict}] {name} ({:.2}s)",
            elapsed.as_secs_f64()
        );
        for (label, ok) in &c.checks {
            println!("    {} {label}", if *ok { "ok  " } else { "FAIL" });
        }
        if !c.passed() {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
