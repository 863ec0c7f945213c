//! Acceptance criteria. Runs without the libtest harness so the PASS/FAIL
//! lines always reach stdout.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use triple_lab::derivations::{
    check_complex_linearity, check_iap_finite, exp_flow_check, is_derivation, leibniz_defect,
    local_derivation_residual, local_points, rank_one_local_witness,
};
use triple_lab::factors::canonical_tripotents;
use triple_lab::repro::{
    example_map, example_system, repro_all, repro_theorem_surrogate, ReproOptions, SuiteConfig,
};
use triple_lab::sampling::{gaussian_vec, rng};
use triple_lab::structure::{check_peirce_arithmetic, cube_root, peirce, svd_odd_cube_root};
use triple_lab::triple::{check_jordan_identity, euclidean_norm};
use triple_lab::{
    build_factor, derivation_space, direct_sum, DerivationKind, FactorSpec, LinearMap,
    ProductKind, TripleSystem,
};

const SEED: u64 = 0xA11CE;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn spec(s: &str) -> FactorSpec {
    s.parse().expect("valid spec")
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    euclidean_norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

fn unit(t: LinearMap) -> LinearMap {
    let n = t.frobenius_norm();
    t.scale(1.0 / n)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let s = example_system();
    let t = example_map();
    let x = [1.0, 0.0, 0.0, 0.0];
    let y = [0.0, 1.0, 0.0, 0.0];
    // {x,y,x} = ⟨x|y⟩x = (−i, 0), which T sends to zero.
    let xyx = s.product_coords(&x, &y, &x);
    ensure(dist(&xyx, &[0.0, -1.0, 0.0, 0.0]) <= 1e-12, format!("{{x,y,x}} = {xyx:?}"))?;
    let lhs = t.apply(&xyx);
    ensure(euclidean_norm(&lhs) <= 1e-12, format!("T{{x,y,x}} = {lhs:?}"))?;
    let a = s.product_coords(&t.apply(&x), &y, &x);
    let b = s.product_coords(&x, &t.apply(&y), &x);
    let sum: Vec<f64> = a.iter().zip(&b).map(|(u, v)| 2.0 * u + v).collect();
    ensure(dist(&sum, &[0.0, 0.0, 0.0, 1.0]) <= 1e-12, format!("Leibniz sum {sum:?} != (0,i)"))?;
    let sym = is_derivation(&s, &t, ProductKind::Symmetrized, 1e-10).map_err(|e| e.to_string())?;
    ensure(sym.passed(), format!("symmetrized residual {}", sym.residuals["max_residual"]))?;
    let der = derivation_space(&s, DerivationKind::Triple).map_err(|e| e.to_string())?;
    let pts = local_points(&s, 256, SEED);
    let local = local_derivation_residual(&der, &t, &pts, 1e-8).map_err(|e| e.to_string())?;
    let lr = local.residuals["max_residual"];
    ensure(local.passed() && pts.len() == 4 + 256, format!("local residual {lr:e}"))?;
    let w = euclidean_norm(&leibniz_defect(&s, &t, ProductKind::Triple, &x, &y, &x));
    ensure(w >= 0.9, format!("triple residual at witness {w}"))?;
    let tri = is_derivation(&s, &t, ProductKind::Triple, 1e-10).map_err(|e| e.to_string())?;
    ensure(!tri.passed(), "T passed the triple Leibniz test")?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "T{{x,y,x}} = 0, Leibniz sum = (0,i), local residual {lr:.1e}, witness residual {w:.3}, {:?}",
        start.elapsed()
    ))
}

fn skew_characterization() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=5 {
        for sp in [FactorSpec::IR { m: n, n: 1 }, FactorSpec::SpinR { r: n, s: 0 }] {
            let s = build_factor(sp).map_err(|e| e.to_string())?;
            let der = derivation_space(&s, DerivationKind::Triple).map_err(|e| e.to_string())?;
            ensure(
                der.dim() == n * (n - 1) / 2,
                format!("{sp}: dimension {} != {}", der.dim(), n * (n - 1) / 2),
            )?;
            for d in &der.basis {
                worst = worst.max(d.symmetric_part_norm());
            }
        }
    }
    ensure(worst <= 1e-9, format!("symmetric part {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("dimensions n(n-1)/2 for n = 2..5, max symmetric part {worst:.1e}, {:?}", start.elapsed()))
}

fn complex_linearity() -> Outcome {
    let mut worst = 0.0f64;
    for name in ["I_C(2,1)", "I_C(2,2)", "SPIN_C(3)"] {
        let s = build_factor(spec(name)).map_err(|e| e.to_string())?;
        let j = s.complex_structure().ok_or(format!("{name} has no J"))?.clone();
        let der = derivation_space(&s, DerivationKind::Triple).map_err(|e| e.to_string())?;
        for d in &der.basis {
            worst = worst.max(d.compose(&j).sub(&j.compose(d)).frobenius_norm());
        }
        let rep = check_complex_linearity(&s, &der).map_err(|e| e.to_string())?;
        ensure(rep.passed(), format!("{name}: library check failed"))?;
    }
    ensure(worst <= 1e-8, format!("commutator {worst:e}"))?;
    let s = example_system();
    let j = s.complex_structure().expect("J").clone();
    let sym = derivation_space(&s, DerivationKind::Symmetrized).map_err(|e| e.to_string())?;
    let best = sym.max_commutator(&j);
    ensure(best >= 0.5, format!("largest symmetrized commutator {best}"))?;
    let t = example_map();
    let te = t.compose(&j).sub(&j.compose(&t)).frobenius_norm();
    Ok(format!(
        "triple basis commutators <= {worst:.1e}; symmetrized max {best:.3} (example map {te:.3})"
    ))
}

fn tripotent_identities() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    let mut total = 0usize;
    for &sp in &SuiteConfig::standard().factors {
        let s = build_factor(sp).map_err(|e| e.to_string())?;
        let der = derivation_space(&s, DerivationKind::Triple).map_err(|e| e.to_string())?;
        let pool = if s.rank_hint() == Some(1) {
            derivation_space(&s, DerivationKind::Symmetrized).map_err(|e| e.to_string())?
        } else {
            der.clone()
        };
        let pts = local_points(&s, 256, SEED);
        let mut g = rng(SEED ^ total as u64);
        let trips = canonical_tripotents(&s);
        for _ in 0..64 {
            let t = unit(pool.sample(&mut g));
            let local = local_derivation_residual(&der, &t, &pts, 1e-8).map_err(|e| e.to_string())?;
            ensure(local.passed(), format!("{sp}: sampled map failed the local test"))?;
            for (_, e) in &trips {
                let el = s.element(e.clone()).map_err(|e| e.to_string())?;
                let ps = peirce(&el).map_err(|e| e.to_string())?;
                let te = t.apply(e);
                let p0 = euclidean_norm(&ps.projection(0).apply(&te));
                let p2 = ps.projection(2).apply(&te);
                let q = s.q_coords(e).apply(&te);
                let p2q = euclidean_norm(&p2.iter().zip(&q).map(|(a, b)| a + b).collect::<Vec<_>>());
                worst = (worst.0.max(p0), worst.1.max(p2q));
            }
            total += 1;
        }
    }
    ensure(worst.0 <= 1e-8 && worst.1 <= 1e-8, format!("P0 {:e}, P2+Q {:e}", worst.0, worst.1))?;
    Ok(format!(
        "{total} local maps over the suite: max |P0 T(e)| {:.1e}, max |P2 T(e) + Q T(e)| {:.1e}",
        worst.0, worst.1
    ))
}

fn rank_one_witness() -> Outcome {
    let mut worst = 0.0f64;
    for name in ["SPIN_R(4,0)", "I_R(4,1)", "I_C(2,1)"] {
        let s = build_factor(spec(name)).map_err(|e| e.to_string())?;
        let sym = derivation_space(&s, DerivationKind::Symmetrized).map_err(|e| e.to_string())?;
        let mut g = rng(SEED);
        for _ in 0..64 {
            let t = sym.sample(&mut g);
            let x = gaussian_vec(&mut g, s.dim());
            let d = rank_one_local_witness(&s, &t, &x).map_err(|e| e.to_string())?;
            worst = worst.max(dist(&d.apply(&x), &t.apply(&x)) / euclidean_norm(&x));
        }
    }
    ensure(worst <= 1e-8, format!("relative mismatch {worst:e}"))?;
    Ok(format!("192 pairs, max |d(x) - T(x)| / |x| = {worst:.1e}"))
}

fn sum_of(names: &[&str]) -> Result<(Vec<FactorSpec>, TripleSystem), String> {
    let specs: Vec<FactorSpec> = names.iter().map(|n| spec(n)).collect();
    let parts = specs
        .iter()
        .map(|s| build_factor(*s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok((specs, direct_sum(&parts).map_err(|e| e.to_string())?))
}

fn theorem_surrogate() -> Outcome {
    let allowed: &[&[&str]] = &[
        &["I_R(2,2)", "SPIN_R(3,1)"],
        &["II_R(4)", "III_R(2)"],
        &["I_R(3,1)", "SPIN_R(3,0)"],
        &["I_C(2,2)", "III_R(2)"],
        &["SPIN_R(2,2)", "I_R(2,3)"],
    ];
    let forbidden: &[&[&str]] = &[
        &["I_R(2,2)", "I_C(2,1)"],
        &["I_H(2,1)", "SPIN_R(3,0)"],
        &["I_C(3,1)", "III_R(2)"],
    ];
    let mut leak = 0.0f64;
    let mut lines = Vec::new();
    for (names, expect_gap) in allowed.iter().map(|n| (n, false)).chain(forbidden.iter().map(|n| (n, true))) {
        let (specs, s) = sum_of(names)?;
        let tri = derivation_space(&s, DerivationKind::Triple).map_err(|e| e.to_string())?;
        let sym = derivation_space(&s, DerivationKind::Symmetrized).map_err(|e| e.to_string())?;
        let gap = sym.dim() as i64 - tri.dim() as i64;
        if expect_gap {
            ensure(gap >= 1, format!("{names:?}: gap {gap}"))?;
        } else {
            ensure(gap == 0, format!("{names:?}: gap {gap}"))?;
        }
        for d in &sym.basis {
            leak = leak.max(triple_lab::structure::off_block_leakage(&s, d));
        }
        let rep = repro_theorem_surrogate(&specs, SEED).map_err(|e| e.to_string())?;
        ensure(rep.passed(), format!("{names:?}: surrogate report failed"))?;
        lines.push(format!("{}:{gap}", names.join("+")));
    }
    ensure(leak <= 1e-8, format!("off-block leakage {leak:e}"))?;
    Ok(format!("gaps {}; leakage {leak:.1e}", lines.join(", ")))
}

fn flows() -> Outcome {
    let times = [-1.0, -0.5, 0.5, 1.0];
    let mut worst = 0.0f64;
    for &sp in &SuiteConfig::standard().factors {
        let s = build_factor(sp).map_err(|e| e.to_string())?;
        let der = derivation_space(&s, DerivationKind::Triple).map_err(|e| e.to_string())?;
        let mut g = rng(SEED);
        for _ in 0..16 {
            let t = unit(der.sample(&mut g));
            let rep = exp_flow_check(&s, &t, ProductKind::Triple, &times).map_err(|e| e.to_string())?;
            for v in rep.residuals.values() {
                worst = worst.max(*v);
            }
        }
    }
    ensure(worst <= 1e-7, format!("flow residual {worst:e}"))?;
    let rep = exp_flow_check(&example_system(), &example_map(), ProductKind::Triple, &[1.0])
        .map_err(|e| e.to_string())?;
    let ex = rep.residuals["t=1"];
    ensure(ex >= 0.1, format!("example flow residual {ex}"))?;
    Ok(format!("max flow residual {worst:.1e}; example map at t = 1: {ex:.3}"))
}

fn structure_suite() -> Outcome {
    let (mut jordan, mut pa, mut cube, mut oracle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &sp in &SuiteConfig::standard().factors {
        let s = build_factor(sp).map_err(|e| e.to_string())?;
        let j = check_jordan_identity(&s, 1e-10, SEED);
        jordan = jordan.max(j.residuals["max_residual"]);
        ensure(j.passed(), format!("{sp}: Jordan identity"))?;
        for (_, e) in canonical_tripotents(&s) {
            let el = s.element(e).map_err(|e| e.to_string())?;
            let r = check_peirce_arithmetic(&el).map_err(|e| e.to_string())?;
            ensure(r.passed(), format!("{sp}: Peirce arithmetic"))?;
            pa = pa.max(r.residuals["max_residual"]);
        }
        let mut g = rng(SEED);
        for _ in 0..4 {
            let a = gaussian_vec(&mut g, s.dim());
            let b = cube_root(&s.element(a.clone()).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?
                .into_coords();
            cube = cube.max(dist(&s.cube_coords(&b), &a) / euclidean_norm(&a));
            if let Some(o) = svd_odd_cube_root(&s, &a) {
                oracle = oracle.max(dist(&o, &b) / euclidean_norm(&b));
            }
        }
        let iap = check_iap_finite(&s).map_err(|e| e.to_string())?;
        ensure(iap.passed(), format!("{sp}: inner span differs from Der(triple)"))?;
    }
    ensure(cube <= 1e-8 && oracle <= 1e-8, format!("cube root {cube:e}, oracle {oracle:e}"))?;
    ensure(pa <= 1e-9, format!("Peirce {pa:e}"))?;
    Ok(format!(
        "Jordan {jordan:.1e}, Peirce {pa:.1e}, cube root {cube:.1e}, SVD oracle {oracle:.1e}, inner span = Der"
    ))
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let config = SuiteConfig::standard();
    let a = repro_all(SEED, &config, ReproOptions::default()).map_err(|e| e.to_string())?;
    let b = repro_all(SEED, &config, ReproOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(a.to_json() == b.to_json(), "reports differ between runs")?;
    ensure(a.all_passed(), format!("{} statements failed", a.failed))?;
    within(elapsed / 2, Duration::from_secs(120))?;
    Ok(format!(
        "two runs byte-identical ({} statements, {} passed, {} advisory), {:?} per run",
        a.statements.len(),
        a.passed,
        a.advisory,
        elapsed / 2
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("counterexample", counterexample),
        ("skew characterization", skew_characterization),
        ("complex linearity", complex_linearity),
        ("tripotent identities", tripotent_identities),
        ("rank-one witness", rank_one_witness),
        ("direct sums", theorem_surrogate),
        ("flows", flows),
        ("structure suite", structure_suite),
        ("determinism and budget", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS criterion {} ({name}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {msg}", i + 1);
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
