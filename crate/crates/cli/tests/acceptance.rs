//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surfbraid::geometry::{
    build_retraction, meridian, min_separation, section_maps, triangulate, verify_sections, Turns,
};
use surfbraid::intlinalg::{smith, IntMatrix};
use surfbraid::kernel_action::{abelianize, normalize, ExponentVector, KernelShape};
use surfbraid::presentations::{abelianization, build_mixed, build_punctured, RelatorFamily};
use surfbraid::section_solver::{obstruction, section_space, Ansatz};
use surfbraid::words::{Generator, Letter, Word};

const SOLVE_LIMIT: Duration = Duration::from_secs(10);
const GEOMETRY_LIMIT: Duration = Duration::from_secs(30);
const FLAT_TORUS_TOL: f64 = 1e-12;
const GEOMETRY_RESOLUTION: u32 = 8;
const HOMOMORPHISM_PAIRS: usize = 1000;
const SNF_SAMPLES: usize = 1000;
const SNF_MAX_DIM: usize = 6;
const SNF_MAX_ENTRY: i64 = 9;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    failures: Vec<String>,
    summary: String,
}

fn bi(v: i64) -> BigInt {
    BigInt::from(v)
}

fn criterion_1() -> Outcome {
    let mut cases: Vec<(u32, u32, i64)> = Vec::new();
    for g in 1..=3u32 {
        for m in 2..=6u32 {
            cases.push((g, m, (m + 2 * g) as i64 - 2));
        }
    }
    cases.push((4, 2, 8));
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for (g, m, expect) in &cases {
        let t = Instant::now();
        let rep = obstruction(*g, *m).expect("solver runs");
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        if rep.modulus != Some(bi(*expect)) {
            failures.push(format!(
                "(g={g}, m={m}): modulus {:?}, expected {expect}",
                rep.modulus.map(|d| d.to_string())
            ));
        }
        if dt > SOLVE_LIMIT {
            failures.push(format!("(g={g}, m={m}): took {dt:?}"));
        }
    }
    Outcome {
        summary: format!(
            "{} cases, slowest solve {:.3}s",
            cases.len(),
            slowest.as_secs_f64()
        ),
        failures,
    }
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    for g in 1..=3u32 {
        let rep = obstruction(g, 1).expect("solver runs");
        if rep.modulus != Some(bi(1)) {
            failures.push(format!(
                "g={g}: modulus {:?}",
                rep.modulus.map(|d| d.to_string())
            ));
        }
        for k in 1..=50 {
            let out = Command::new(env!("CARGO_BIN_EXE_surfbraid"))
                .args([
                    "obstruct",
                    "--g",
                    &g.to_string(),
                    "--m",
                    "1",
                    "--n",
                    &k.to_string(),
                ])
                .output()
                .expect("binary runs");
            if out.status.code() != Some(0) || out.stdout != b"admissible\n" {
                failures.push(format!(
                    "g={g}, n={k}: {:?}",
                    String::from_utf8_lossy(&out.stdout)
                ));
            }
        }
    }
    Outcome {
        summary: "g in 1..=3, n in 1..=50".into(),
        failures,
    }
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=3u32 {
        for m in 1..=4u32 {
            for g in 1..=3u32 {
                let f = abelianization(&build_punctured(n, m, g).expect("valid parameters"));
                let rank = (2 * g + m - 1) as usize;
                if f.free_rank != rank || f.torsion != vec![bi(2)] {
                    let t: Vec<String> = f.torsion.iter().map(|x| x.to_string()).collect();
                    failures.push(format!(
                        "(n={n}, m={m}, g={g}): free rank {} torsion [{}], expected {rank} and [2]",
                        f.free_rank,
                        t.join(",")
                    ));
                }
            }
        }
    }
    Outcome {
        summary: "36 cases".into(),
        failures,
    }
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=8u32 {
        for m in 1..=3u32 {
            for g in 1..=2u32 {
                let p = build_mixed(n, m, g).expect("valid parameters");
                let sr: Vec<&Word> = p.family(RelatorFamily::SRBar).collect();
                if sr.len() != 1 {
                    failures.push(format!(
                        "(n={n}, m={m}, g={g}): {} surface relators",
                        sr.len()
                    ));
                    continue;
                }
                // relator = lhs * rhs^-1, lhs over tau/c/d only
                let letters = sr[0].letters();
                let split = letters
                    .iter()
                    .position(|l| !l.generator.family.is_coset())
                    .unwrap_or(letters.len());
                let tail = &letters[split..];
                if tail.iter().any(|l| l.generator.family.is_coset()) {
                    failures.push(format!("(n={n}, m={m}, g={g}): right side mixes letters"));
                    continue;
                }
                let rhs = Word::from_letters(tail.iter().copied()).inverse();
                let got = abelianize(&rhs, g, n, m).expect("kernel word");
                let expect = if m >= 2 {
                    ExponentVector::of_letter(Letter::new(Generator::z(1), false), g, n, m)
                        .unwrap()
                        .scale(-(n as i64))
                } else {
                    ExponentVector::zero(g, m)
                };
                if got != expect {
                    failures.push(format!(
                        "(n={n}, m={m}, g={g}): got {got}, expected {expect}"
                    ));
                }
            }
        }
    }
    Outcome {
        summary: "48 cases".into(),
        failures,
    }
}

/// Linear functionals that must vanish on every abelianized section.
fn forced_functionals(g: u32, m: u32) -> Vec<(String, Vec<(usize, i64)>)> {
    let ans = Ansatz::new(g, m);
    let sh = KernelShape::new(g, m);
    let mut out = Vec::new();
    for i in 1..m {
        let t = Generator::tau(i);
        for s in 1..=g {
            out.push((format!("k[{i},{s}]"), vec![(ans.index(t, sh.a(s)), 1)]));
            out.push((format!("l[{i},{s}]"), vec![(ans.index(t, sh.b(s)), 1)]));
        }
    }
    for i in 1..m.saturating_sub(1) {
        let t = Generator::tau(i);
        for j in (1..m).filter(|&j| j != i && j != i + 1) {
            out.push((format!("m[{i},{j}]"), vec![(ans.index(t, sh.z(j)), 1)]));
        }
    }
    for r in 1..=g {
        let (c, d) = (Generator::c(r), Generator::d(r));
        for s in 1..=g {
            out.push((format!("lbar[{r},{s}]"), vec![(ans.index(c, sh.b(s)), 1)]));
            out.push((format!("ktilde[{r},{s}]"), vec![(ans.index(d, sh.a(s)), 1)]));
        }
        out.push((
            format!("kbar[{r},{r}] - ltilde[{r},{r}]"),
            vec![(ans.index(c, sh.a(r)), 1), (ans.index(d, sh.b(r)), -1)],
        ));
    }
    out
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for (g, m) in [(2u32, 4u32), (2, 5), (3, 4)] {
        let n = bi((m + 2 * g) as i64 - 2);
        let space = match section_space(g, m, &n) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("(g={g}, m={m}): {e}"));
                continue;
            }
        };
        let functionals = forced_functionals(g, m);
        let mut vectors = vec![("particular".to_string(), &space.particular)];
        vectors.extend(
            space
                .lattice_basis
                .iter()
                .enumerate()
                .map(|(i, v)| (format!("basis {i}"), v)),
        );
        for (name, f) in &functionals {
            for (which, v) in &vectors {
                let value: BigInt = f.iter().map(|&(idx, c)| &v[idx] * c).sum();
                checked += 1;
                if value != BigInt::from(0) {
                    failures.push(format!("(g={g}, m={m}) {name} = {value} on {which}"));
                }
            }
        }
    }
    Outcome {
        summary: format!("{checked} functional evaluations"),
        failures,
    }
}

fn random_word(rng: &mut ChaCha8Rng, gens: &[Generator], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_letters(
        (0..len).map(|_| Letter::new(gens[rng.gen_range(0..gens.len())], rng.gen_bool(0.5))),
    )
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n = 3;
    for g in 1..=2u32 {
        for m in 2..=4u32 {
            let p = build_mixed(n, m, g).expect("valid parameters");
            let gens = p.alphabet.generators().to_vec();
            let mut bad = 0;
            for _ in 0..HOMOMORPHISM_PAIRS {
                let u = random_word(&mut rng, &gens, 12);
                let v = random_word(&mut rng, &gens, 12);
                let lhs = normalize(&u.concat(&v), g, n, m).expect("normalizes");
                let rhs = normalize(&u, g, n, m)
                    .and_then(|a| a.compose(&normalize(&v, g, n, m)?))
                    .expect("normalizes");
                if lhs != rhs {
                    bad += 1;
                }
            }
            if bad > 0 {
                failures.push(format!("(g={g}, m={m}): {bad} pairs disagree"));
            }
        }
    }
    Outcome {
        summary: format!("{} pairs per (g, m)", HOMOMORPHISM_PAIRS),
        failures,
    }
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut flat_err: f64 = 0.0;
    for g in 1..=2u32 {
        for n in 1..=8u32 {
            let t = Instant::now();
            let s = triangulate(g, GEOMETRY_RESOLUTION).expect("surface");
            let c = meridian(&s).expect("cycle");
            let r = build_retraction(&s, &c).expect("retraction");
            let maps = section_maps(&r, n).expect("maps");
            let rep = verify_sections(&s, &c, &r, &maps);
            let dt = t.elapsed();
            slowest = slowest.max(dt);
            if !rep.passed() {
                failures.push(format!("(g={g}, n={n}): {:?}", rep.failures));
            }
            if !rep.retraction_exact || !rep.branch_condition {
                failures.push(format!("(g={g}, n={n}): retraction or branch condition"));
            }
            let expect = Turns::new(1, n as i64 + 1);
            if min_separation(&maps) != expect || rep.min_separation_turns != expect.to_string() {
                failures.push(format!(
                    "(g={g}, n={n}): separation {}",
                    rep.min_separation_turns
                ));
            }
            let rad = 2.0 * std::f64::consts::PI / (n as f64 + 1.0);
            if (rep.min_separation - rad).abs() > FLAT_TORUS_TOL {
                failures.push(format!(
                    "(g={g}, n={n}): separation {} rad",
                    rep.min_separation
                ));
            }
            if g == 1 {
                for (i, p) in s.chart_points.iter().enumerate() {
                    flat_err = flat_err.max((r.lift[i].to_f64() - p.pos[0]).abs());
                }
            }
            if dt > GEOMETRY_LIMIT {
                failures.push(format!("(g={g}, n={n}): took {dt:?}"));
            }
        }
    }
    if flat_err > FLAT_TORUS_TOL {
        failures.push(format!("flat torus deviation {flat_err:e}"));
    }
    Outcome {
        summary: format!(
            "16 cases, flat torus deviation {flat_err:.1e}, slowest {:.3}s",
            slowest.as_secs_f64()
        ),
        failures,
    }
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..SNF_SAMPLES {
        let (r, c) = (
            rng.gen_range(1..=SNF_MAX_DIM),
            rng.gen_range(1..=SNF_MAX_DIM),
        );
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| rng.gen_range(-SNF_MAX_ENTRY..=SNF_MAX_ENTRY))
                    .collect()
            })
            .collect();
        let a = IntMatrix::from_rows(c, &rows);
        let dec = smith(&a);
        let mut ok = dec.u.mul(&a).mul(&dec.v) == dec.d;
        ok &= dec.u.determinant().magnitude() == &1u32.into();
        ok &= dec.v.determinant().magnitude() == &1u32.into();
        for i in 0..r {
            for j in 0..c {
                let v = &dec.d[(i, j)];
                ok &= if i == j { v >= &bi(0) } else { v == &bi(0) };
            }
        }
        let diag: Vec<BigInt> = (0..r.min(c)).map(|i| dec.d[(i, i)].clone()).collect();
        for w in diag.windows(2) {
            ok &= if w[0] == bi(0) {
                w[1] == bi(0)
            } else {
                (&w[1] % &w[0]) == bi(0)
            };
        }
        if !ok {
            failures.push(format!("sample {k}: {rows:?}"));
        }
    }
    Outcome {
        summary: format!("{SNF_SAMPLES} matrices up to {SNF_MAX_DIM}x{SNF_MAX_DIM}"),
        failures,
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("obstruction moduli", criterion_1),
        ("one fixed point is unobstructed", criterion_2),
        ("abelianization of the punctured braid group", criterion_3),
        ("surface relation kernel correction", criterion_4),
        ("forced equalities on the solution space", criterion_5),
        ("normalization is a homomorphism", criterion_6),
        ("geometric sections", criterion_7),
        ("Smith normal form contract", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = f();
        let status = if out.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("criterion {}: {status} - {name} ({})", i + 1, out.summary);
        for msg in &out.failures {
            println!("    {msg}");
        }
        if !out.failures.is_empty() {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
