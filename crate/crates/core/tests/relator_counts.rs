use std::collections::BTreeMap;
use std::path::PathBuf;

use surfbraid::presentations::{
    build_closed, build_kernel_abelianization, build_mixed, build_mixed_quotient, build_punctured,
    Presentation, RelatorFamily,
};

use RelatorFamily::*;

fn choose2(k: u32) -> usize {
    (k as usize * k.saturating_sub(1) as usize) / 2
}

/// Counts of the braid and handle families on `k` strands, from the index
/// ranges alone.
fn braid_handle_counts(k: u32, g: u32) -> [usize; 5] {
    let g = g as usize;
    let sig = k.saturating_sub(1);
    let far = if sig >= 2 { choose2(sig - 1) } else { 0 };
    let braid = sig.saturating_sub(1) as usize;
    let has_first = k >= 2;
    [
        far + braid,
        2 * g * sig.saturating_sub(1) as usize,
        if has_first { 2 * g } else { 0 },
        if has_first { 4 * choose2(g as u32) } else { 0 },
        if has_first { g } else { 0 },
    ]
}

fn closed_oracle(m: u32, g: u32) -> BTreeMap<RelatorFamily, usize> {
    let [br, r1, r2, r3, r4] = braid_handle_counts(m, g);
    BTreeMap::from([(BR, br), (R1, r1), (R2, r2), (R3, r3), (R4, r4), (SR, 1)])
}

fn punctured_oracle(n: u32, m: u32, g: u32) -> BTreeMap<RelatorFamily, usize> {
    let [br, r1, r2, r3, r4] = braid_handle_counts(n, g);
    let z = (m - 1) as usize;
    let has_first = n >= 2;
    BTreeMap::from([
        (BR, br),
        (R1, r1),
        (R2, r2),
        (R3, r3),
        (R4, r4),
        (R5, z * n.saturating_sub(2) as usize),
        (R6, if has_first { 2 * g as usize * z } else { 0 }),
        (R7, if has_first { choose2(m - 1) } else { 0 }),
        (R8, if has_first { z } else { 0 }),
    ])
}

fn counts(p: &Presentation) -> BTreeMap<RelatorFamily, usize> {
    let mut out = BTreeMap::new();
    for r in &p.relators {
        *out.entry(r.family).or_insert(0) += 1;
    }
    out
}

fn nonzero(m: BTreeMap<RelatorFamily, usize>) -> BTreeMap<RelatorFamily, usize> {
    m.into_iter().filter(|&(_, c)| c > 0).collect()
}

fn grid() -> impl Iterator<Item = (u32, u32, u32)> {
    (1..=4).flat_map(|n| (1..=5).flat_map(move |m| (1..=3).map(move |g| (n, m, g))))
}

#[test]
fn closed_counts_match_oracle() {
    for m in 1..=5 {
        for g in 1..=3 {
            let p = build_closed(m, g).unwrap();
            assert_eq!(counts(&p), nonzero(closed_oracle(m, g)), "m={m} g={g}");
        }
    }
    assert_eq!(build_closed(3, 2).unwrap().relators.len(), 16);
}

#[test]
fn punctured_counts_match_oracle() {
    for (n, m, g) in grid() {
        let p = build_punctured(n, m, g).unwrap();
        assert_eq!(
            counts(&p),
            nonzero(punctured_oracle(n, m, g)),
            "n={n} m={m} g={g}"
        );
    }
}

#[test]
fn mixed_class_one_and_two_counts_match_oracle() {
    for (n, m, g) in grid() {
        let c = counts(&build_mixed(n, m, g).unwrap());
        for (fam, k) in nonzero(punctured_oracle(n, m, g)) {
            assert_eq!(c.get(&fam), Some(&k), "n={n} m={m} g={g} {fam}");
        }
        for (fam, k) in nonzero(closed_oracle(m, g)) {
            let bar = fam.barred().unwrap();
            assert_eq!(c.get(&bar), Some(&k), "n={n} m={m} g={g} {bar}");
        }
    }
}

#[test]
fn kernel_abelianization_counts() {
    for (n, m, g) in grid() {
        let p = build_kernel_abelianization(n, m, g).unwrap();
        let gens = 1 + 2 * g + m;
        assert_eq!(p.alphabet.len(), gens as usize);
        assert_eq!(p.count(Quot1Commute), choose2(gens));
        assert_eq!(p.count(Quot1SigmaSquare), 1);
        assert_eq!(p.count(Quot1ZFold), 1);
    }
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/relator_counts.json")
}

fn current_counts() -> serde_json::Value {
    let mut rows = Vec::new();
    for (n, m, g) in grid() {
        let mut entry = serde_json::Map::new();
        entry.insert(
            "params".into(),
            serde_json::json!({ "n": n, "m": m, "g": g }),
        );
        let builders: [(&str, Presentation); 5] = [
            ("closed", build_closed(m, g).unwrap()),
            ("punctured", build_punctured(n, m, g).unwrap()),
            ("mixed", build_mixed(n, m, g).unwrap()),
            ("kernel_ab", build_kernel_abelianization(n, m, g).unwrap()),
            ("mixed_quotient", build_mixed_quotient(n, m, g).unwrap()),
        ];
        for (name, p) in builders {
            let c: serde_json::Map<String, serde_json::Value> = counts(&p)
                .into_iter()
                .map(|(f, k)| (f.label().to_string(), k.into()))
                .collect();
            entry.insert(name.into(), c.into());
        }
        rows.push(serde_json::Value::Object(entry));
    }
    serde_json::Value::Array(rows)
}

/// Set `SURFBRAID_BLESS=1` to rewrite the golden file.
#[test]
fn counts_match_golden_file() {
    let now = current_counts();
    let path = golden_path();
    if std::env::var_os("SURFBRAID_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(&now).unwrap() + "\n").unwrap();
    }
    let golden: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(golden.as_array().unwrap().len(), 60);
    assert_eq!(now, golden);
}
