//! Acceptance criteria. Runs as a plain binary so each criterion prints
//! exactly one PASS/FAIL line; the process exits non-zero on any failure.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use gdc::code::project;
use gdc::codegen::{check_condition2, check_condition3, covering_extension, support_matching};
use gdc::combinatorics::{binomial, ceil_div, unrank, Combinations};
use gdc::design::{
    construct_m0, delta0_closed_form, delta0_exhaustive, for_each_incidence_up_to_column_order,
    gdc_bound, indicator_matrix, validate_params,
};
use gdc::fixtures::reference_matrix;
use gdc::matrix::{hall_matching, xi_profile, HallOutcome};
use gdc::{
    BinaryMatrix, CodeDesign, DistanceMethod, Error, FieldElement, FieldSpec, GdcCode,
    SynthesisConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    if elapsed <= limit {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
    }
}

/// Every valid `(alpha, beta, k, t)` with `t <= 6`, `k <= 9`, `beta <= 6`.
fn grid() -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for t in 1..=6 {
        for k in 1..=9 {
            for beta in 1..=6 {
                for alpha in 1..k.min(beta) {
                    if validate_params(alpha, beta, k, t).is_ok() {
                        out.push((alpha, beta, k, t));
                    }
                }
            }
        }
    }
    out
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let design = CodeDesign::build(2, 3, 3, 2).map_err(|e| e.to_string())?;
    let field = FieldSpec::canonical(4).map_err(|e| e.to_string())?;
    ensure!(
        FieldSpec::for_params(6, 3).map_err(|e| e.to_string())? == field,
        "default field for (6, 3) is not GF(16)"
    );
    let code = GdcCode::build_with_field(design, field, &SynthesisConfig::default())
        .map_err(|e| e.to_string())?;
    let bound = gdc_bound(2, 3, 3, 2).map_err(|e| e.to_string())?;
    let by_rank = code
        .min_distance(DistanceMethod::RankSubsets)
        .map_err(|e| e.to_string())?;
    let by_enum = code
        .min_distance(DistanceMethod::EnumerateCodewords)
        .map_err(|e| e.to_string())?;
    ensure!(
        by_rank == 3 && by_enum == 3 && bound == 3,
        "rank {by_rank}, enumeration {by_enum}, bound {bound}"
    );
    within(
        start.elapsed(),
        Duration::from_secs(1),
        format!(
            "d = 3 by rank and by 4095-codeword enumeration, bound 3 ({:.2?})",
            start.elapsed()
        ),
    )
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let field = FieldSpec::for_params(18, 6).map_err(|e| e.to_string())?;
    ensure!(
        field.degree() == 13,
        "field degree {} != 13",
        field.degree()
    );
    ensure!(
        binomial(17, 5) == 6188 && 6188 < 1 << 13,
        "field size condition"
    );
    let code =
        GdcCode::build(4, 6, 6, 3, &SynthesisConfig::default()).map_err(|e| e.to_string())?;
    let d = code
        .min_distance(DistanceMethod::RankSubsets)
        .map_err(|e| e.to_string())?;
    let bound = gdc_bound(4, 6, 6, 3).map_err(|e| e.to_string())?;
    ensure!(d == 11 && bound == 11, "rank oracle d = {d}, bound {bound}");
    ensure!(
        binomial(18, 8) == 43758 && binomial(18, 7) == 31824,
        "subset counts"
    );
    within(
        start.elapsed(),
        Duration::from_secs(300),
        format!(
            "(4,6,6,3) over GF(2^13): d = 11 = bound ({:.2?})",
            start.elapsed()
        ),
    )
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let points = grid();
    let mut checked = std::collections::BTreeSet::new();
    for &(alpha, beta, k, t) in &points {
        let p = validate_params(alpha, beta, k, t).map_err(|e| e.to_string())?;
        let m0 = construct_m0(alpha, k, t).map_err(|e| format!("({alpha},{beta},{k},{t}): {e}"))?;
        ensure!(
            m0.col_weights().iter().all(|&w| w == alpha),
            "({alpha},{beta},{k},{t}): column weights {:?}",
            m0.col_weights()
        );
        let prof = m0.profile();
        let gamma = ceil_div((k - p.r) as u64, binomial(t as u64, p.s as u64) as u64) as usize;
        ensure!(
            prof.w_min == p.s && prof.gamma == gamma,
            "({alpha},{beta},{k},{t}): w_min {} (want {}), gamma {} (want {gamma})",
            prof.w_min,
            p.s,
            prof.gamma
        );
        checked.insert((alpha, k, t));
    }
    ensure!(points.len() >= 100, "only {} grid points", points.len());
    within(
        start.elapsed(),
        Duration::from_secs(10),
        format!(
            "{} parameter points ({} distinct M0) ({:.2?})",
            points.len(),
            checked.len(),
            start.elapsed()
        ),
    )
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let mut designs = 0;
    for (alpha, beta, k, t) in grid() {
        let n = t * beta;
        if n > 14 {
            continue;
        }
        let tag = format!("({alpha},{beta},{k},{t})");
        let m0 = construct_m0(alpha, k, t).map_err(|e| e.to_string())?;
        let m = indicator_matrix(&m0, beta);
        let closed = delta0_closed_form(&m0, beta);
        let exhaustive = delta0_exhaustive(&m).map_err(|e| format!("{tag}: {e}"))? as i64;
        ensure!(
            closed == exhaustive,
            "{tag}: closed form {closed}, exhaustive {exhaustive}"
        );
        ensure!(
            (0..=(n - k) as i64).contains(&closed),
            "{tag}: delta0 {closed} outside 0..={}",
            n - k
        );

        let prof = m0.profile();
        let i0 = t - prof.w_min;
        let xi0 = xi_profile(&m0).map_err(|e| e.to_string())?;
        let xi = xi_profile(&m).map_err(|e| e.to_string())?;
        // xi of M0 reaches k - gamma at i0 and k after it
        ensure!(i0 >= 1, "{tag}: i0 = 0");
        ensure!(
            xi0[i0 - 1] == k - prof.gamma && k - prof.gamma < k,
            "{tag}: xi_M0(i0) = {}, k - gamma = {}",
            xi0[i0 - 1],
            k - prof.gamma
        );
        ensure!(
            xi0[i0..].iter().all(|&v| v == k),
            "{tag}: xi_M0 beyond i0 is {:?}",
            &xi0[i0..]
        );
        // xi of M is xi of M0 read bucket by bucket
        for ell in 1..=n {
            let i = ell.div_ceil(beta);
            ensure!(
                xi[ell - 1] == xi0[i - 1],
                "{tag}: xi_M({ell}) = {} but xi_M0({i}) = {}",
                xi[ell - 1],
                xi0[i - 1]
            );
        }
        // ell - xi_M(ell) peaks at ell = i0 * beta
        let top = (i0 * beta) as i64 - xi[i0 * beta - 1] as i64;
        for ell in 1..=i0 * beta {
            ensure!(
                ell as i64 - xi[ell - 1] as i64 <= top,
                "{tag}: ell - xi_M(ell) exceeds its peak at {ell}"
            );
        }
        // and that peak is delta0
        ensure!(
            closed == top,
            "{tag}: delta0 {closed} != i0*beta - xi_M0(i0) = {top}"
        );
        designs += 1;
    }
    ensure!(designs > 0, "no grid design with n <= 14");
    within(
        start.elapsed(),
        Duration::from_secs(30),
        format!(
            "{designs} designs with n <= 14, delta0 and xi identities exact ({:.2?})",
            start.elapsed()
        ),
    )
}

fn criterion5() -> Outcome {
    let start = Instant::now();
    let mut matrices = 0u64;
    let mut comparisons = 0u64;
    for alpha in 1..=11usize {
        for t in 1..=12 / alpha {
            for k in alpha + 1..=t * alpha {
                let bounds: Vec<(usize, usize)> = [alpha + 1, alpha + 2]
                    .iter()
                    .map(|&beta| (beta, gdc_bound(alpha, beta, k, t).expect("valid")))
                    .collect();
                let mut violation = None;
                matrices += for_each_incidence_up_to_column_order(k, t, alpha, |m: &BinaryMatrix| {
                    let p = m.profile();
                    for &(beta, bound) in &bounds {
                        comparisons += 1;
                        if p.w_min * beta + 1 > bound + p.gamma && violation.is_none() {
                            violation = Some(format!(
                                "alpha {alpha} beta {beta} k {k} t {t}: w_min {} gamma {} bound {bound}",
                                p.w_min, p.gamma
                            ));
                        }
                    }
                })
                .map_err(|e| e.to_string())?;
                if let Some(v) = violation {
                    return Err(v);
                }
            }
        }
    }
    within(
        start.elapsed(),
        Duration::from_secs(60),
        format!(
            "{matrices} incidence matrices, {comparisons} comparisons, 0 violations ({:.2?})",
            start.elapsed()
        ),
    )
}

fn conditions_agree(m: &BinaryMatrix, delta: usize) -> Result<bool, Error> {
    Ok(check_condition2(m, delta)?.passed() == check_condition3(m, delta)?.passed())
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let mut cases = 0u64;
    for k in 1..=3usize {
        for n in k..=6usize {
            for bits in 0u64..1 << (k * n) {
                let rows: Vec<Vec<u8>> = (0..k)
                    .map(|i| (0..n).map(|j| (bits >> (i * n + j) & 1) as u8).collect())
                    .collect();
                let m = BinaryMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
                for delta in 0..=2usize.min(n - k) {
                    cases += 1;
                    ensure!(
                        conditions_agree(&m, delta).map_err(|e| e.to_string())?,
                        "disagreement at k {k} n {n} delta {delta}: {rows:?}"
                    );
                }
            }
        }
    }
    let exhaustive = cases;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut random = 0;
    while random < 2000 {
        let k = rng.gen_range(4..=8usize);
        let n = rng.gen_range(k..=14usize);
        let density = rng.gen_range(0.2..0.9);
        let rows: Vec<Vec<u8>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_bool(density) as u8).collect())
            .collect();
        let m = BinaryMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let delta = rng.gen_range(0..=n - k);
        ensure!(
            conditions_agree(&m, delta).map_err(|e| e.to_string())?,
            "random disagreement at k {k} n {n} delta {delta}: {rows:?}"
        );
        random += 1;
    }
    within(
        start.elapsed(),
        Duration::from_secs(30),
        format!(
            "{exhaustive} exhaustive + {random} random cases, 0 disagreements ({:.2?})",
            start.elapsed()
        ),
    )
}

/// Codes from the grid small enough to verify by subset enumeration.
fn verified_grid_codes() -> Result<(Vec<GdcCode>, usize), String> {
    let mut codes = Vec::new();
    let mut skipped = 0;
    for (alpha, beta, k, t) in grid() {
        let design = CodeDesign::build(alpha, beta, k, t).map_err(|e| e.to_string())?;
        let n = design.n();
        let d = design.achievable_distance();
        let subsets = binomial(n as u64, (n - d + 1) as u64) + binomial(n as u64, (n - d) as u64);
        if subsets > gdc::codegen::SUBSET_LIMIT {
            skipped += 1;
            continue;
        }
        let field = FieldSpec::for_params(n, k).map_err(|e| e.to_string())?;
        let cfg = SynthesisConfig {
            seed: (alpha * 1000 + beta * 100 + k * 10 + t) as u64,
            ..SynthesisConfig::default()
        };
        let code = GdcCode::build_with_field(design, field, &cfg)
            .map_err(|e| format!("({alpha},{beta},{k},{t}): {e}"))?;
        codes.push(code);
    }
    Ok((codes, skipped))
}

fn random_message(code: &GdcCode, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    let f = code.field();
    (0..code.k())
        .map(|_| f.element(rng.gen_range(0..f.order())).expect("in range"))
        .collect()
}

fn check_codec(code: &GdcCode, rng: &mut ChaCha8Rng) -> Result<u64, String> {
    let d = code.design();
    let (alpha, beta, n, k) = (d.alpha(), d.beta(), d.n(), d.k());
    let tag = format!("({alpha},{beta},{k},{})", d.t());
    let mut checks = 0u64;
    let err = |e: Error| format!("{tag}: {e}");

    // P2: every bucket, every alpha-subset, 100 messages
    for _ in 0..100 {
        let x = random_message(code, rng);
        let cw = code.encode(&x).map_err(err)?;
        for b in 0..d.t() {
            let want = project(d.support(b), &x).map_err(err)?;
            let span: Vec<usize> = d.bucket(b).collect();
            for sub in Combinations::new(beta, alpha) {
                let pos: Vec<usize> = sub.iter().map(|&i| span[i]).collect();
                let got = code.group_decode(b, &cw.restrict(&pos)).map_err(err)?;
                ensure!(
                    got == want,
                    "{tag}: group decode of bucket {b} from {pos:?}"
                );
                checks += 1;
            }
        }
    }

    // P1: every pattern of at most beta - alpha erasures inside one bucket
    let x = random_message(code, rng);
    let cw = code.encode(&x).map_err(err)?;
    for b in 0..d.t() {
        let span: Vec<usize> = d.bucket(b).collect();
        for size in 1..=beta - alpha {
            for sub in Combinations::new(beta, size) {
                let erased: Vec<usize> = sub.iter().map(|&i| span[i]).collect();
                let survivors: Vec<usize> = span
                    .iter()
                    .copied()
                    .filter(|p| !erased.contains(p))
                    .collect();
                let helpers = cw.restrict(&survivors[..alpha]);
                for &p in &erased {
                    let v = code.repair_symbol(p, &helpers).map_err(err)?;
                    ensure!(v == cw.symbols()[p], "{tag}: local repair of {p}");
                    checks += 1;
                }
            }
        }
        // one more erasure leaves too few helpers in the bucket
        let too_few = cw.restrict(&span[..alpha - 1]);
        ensure!(
            matches!(
                code.repair_symbol(span[beta - 1], &too_few),
                Err(Error::InsufficientSymbols { .. })
            ),
            "{tag}: repair with alpha - 1 helpers did not fail"
        );
    }

    // global: every pattern of at most d - 1 erasures
    let dist = code.distance();
    let widest = binomial(n as u64, dist as u64 - 1);
    let decode = |erased: &[usize], x: &[FieldElement], cw: &gdc::Codeword| {
        let have: BTreeMap<usize, FieldElement> = (0..n)
            .filter(|p| !erased.contains(p))
            .map(|p| (p, cw.symbols()[p]))
            .collect();
        let got = code.decode_global(&have).map_err(err)?;
        ensure!(got == x, "{tag}: global decode with erasures {erased:?}");
        Ok::<(), String>(())
    };
    if widest <= 100_000 {
        for e in 0..dist {
            for erased in Combinations::new(n, e) {
                decode(&erased, &x, &cw)?;
                checks += 1;
            }
        }
    } else {
        for _ in 0..10_000 {
            let x = random_message(code, rng);
            let cw = code.encode(&x).map_err(err)?;
            let e = rng.gen_range(0..dist);
            let erased = unrank(n, e, rng.gen_range(0..binomial(n as u64, e as u64)))
                .expect("rank below the binomial");
            decode(&erased, &x, &cw)?;
            checks += 1;
        }
    }
    Ok(checks)
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let (codes, skipped) = verified_grid_codes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checks = 0;
    for code in &codes {
        checks += check_codec(code, &mut rng)?;
    }
    Ok(format!(
        "{} verified grid codes ({skipped} beyond the verification budget), {checks} checks, 0 failures ({:.2?})",
        codes.len(),
        start.elapsed()
    ))
}

fn criterion8() -> Outcome {
    let a = reference_matrix();
    let p = a.profile();
    let minimal: Vec<usize> = p.minimal_rows.iter().map(|r| r + 1).collect();
    ensure!(
        p.w_min == 3 && p.gamma == 2 && minimal == vec![1, 2, 5, 6],
        "w_min {}, gamma {}, minimal rows {minimal:?}",
        p.w_min,
        p.gamma
    );
    let params = validate_params(3, 5, 7, 8).map_err(|e| e.to_string())?;
    let design = CodeDesign::from_incidence(params, a).map_err(|e| e.to_string())?;
    let (parts, j0) = covering_extension(&design, 0, &[0, 2, 4]).map_err(|e| e.to_string())?;
    let parts: Vec<Vec<usize>> = parts
        .iter()
        .map(|(_, s)| s.iter().map(|i| i + 1).collect())
        .collect();
    ensure!(
        parts == vec![vec![1, 4, 6], vec![2, 5, 7], vec![3]],
        "partition {parts:?}"
    );
    let j0_1: Vec<usize> = j0.iter().map(|j| j + 1).collect();
    ensure!(j0_1 == vec![1, 3, 5, 6, 7, 8, 11], "J0 {j0_1:?}");
    ensure!(
        matches!(
            support_matching(design.indicator(), &j0),
            HallOutcome::Matching(_)
        ),
        "no perfect matching on J0"
    );
    let adj: Vec<Vec<usize>> = j0
        .iter()
        .map(|&j| design.indicator().col_support(j))
        .collect();
    let HallOutcome::Matching(m) = hall_matching(&adj, 7) else {
        return Err("column-side matching failed".into());
    };
    let pairs: Vec<(usize, usize)> = m.iter().enumerate().map(|(c, &r)| (c + 1, r + 1)).collect();
    ensure!(
        pairs == vec![(1, 1), (2, 4), (3, 6), (4, 2), (5, 5), (6, 7), (7, 3)],
        "matching {pairs:?}"
    );
    Ok(format!(
        "w_min 3, gamma 2, minimal rows {{1,2,5,6}}, I = {{1,4,6}},{{2,5,7}},{{3}}, J0 matching {pairs:?}"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 bound tightness (2,3,3,2)", criterion1),
        ("2 bound tightness (4,6,6,3)", criterion2),
        ("3 construction grid", criterion3),
        ("4 delta0 identities", criterion4),
        ("5 distance upper bound, exhaustive", criterion5),
        ("6 covering conditions agree", criterion6),
        ("7 codec properties", criterion7),
        ("8 reference fixtures", criterion8),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
