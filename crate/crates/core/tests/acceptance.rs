//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output; exits non-zero on any FAIL.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xlingua::experiment::{sweep_threshold, threshold_for_recall, LengthFactorUse};
use xlingua::{
    assign, cosine, dedupe, find_most_similar, generate_synthetic, log_likelihood, run_experiment,
    similarity, Benchmark, ContingencyTable, DescriptorCode, DescriptorVector, EvaluationReport,
    ExperimentMode, ExperimentOptions, LengthModel, LengthStats, NormalizedDocument, ProfileSet,
    RawDocument, SearchDoc, SimilarityOptions, SyntheticSpec, Thesaurus, TrainingConfig,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn code(c: u32) -> DescriptorCode {
    DescriptorCode::new(c).unwrap()
}

// ---------------------------------------------------------------- oracles

/// 2 Σ O ln(O / E) with E = row · col / N, coded from the definition.
fn g2_oracle(k: [u64; 4]) -> f64 {
    let o = k.map(|x| x as f64);
    let n: f64 = o.iter().sum();
    let row = [o[0] + o[1], o[2] + o[3]];
    let col = [o[0] + o[2], o[1] + o[3]];
    let mut g = 0.0;
    for (i, &obs) in o.iter().enumerate() {
        let e = row[i / 2] * col[i % 2] / n;
        if obs > 0.0 {
            g += obs * (obs.ln() - e.ln());
        }
    }
    2.0 * g
}

fn dense_cosine(a: &BTreeMap<u32, f64>, b: &BTreeMap<u32, f64>, dims: u32) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for d in 1..=dims {
        let x = a.get(&d).copied().unwrap_or(0.0);
        let y = b.get(&d).copied().unwrap_or(0.0);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

fn char_shingles(text: &str) -> HashSet<String> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < 5 {
        return [text.to_string()].into();
    }
    chars.windows(5).map(|w| w.iter().collect()).collect()
}

fn oracle_jaccard(a: &str, b: &str) -> f64 {
    let (sa, sb) = (char_shingles(a), char_shingles(b));
    let inter = sa.intersection(&sb).count();
    inter as f64 / (sa.len() + sb.len() - inter) as f64
}

// ---------------------------------------------------------------- criteria

fn c1_g2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut asym = 0.0f64;
    for _ in 0..50 {
        let k: [u64; 4] = std::array::from_fn(|_| rng.random_range(0..=10_000));
        let t = ContingencyTable::new(k[0], k[1], k[2], k[3]);
        worst = worst.max((log_likelihood(&t) - g2_oracle(k)).abs());
        let swapped = ContingencyTable::new(k[2], k[3], k[0], k[1]);
        asym = asym.max((log_likelihood(&t) - log_likelihood(&swapped)).abs());
    }
    let mut indep = 0.0f64;
    for _ in 0..50 {
        let (a, b, c, d) = (
            rng.random_range(1..=100u64),
            rng.random_range(1..=100u64),
            rng.random_range(1..=100u64),
            rng.random_range(1..=100u64),
        );
        let t = ContingencyTable::new(a * c, a * d, b * c, b * d);
        indep = indep.max(log_likelihood(&t).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-9 && asym <= 1e-9 && indep <= 1e-9 && elapsed < Duration::from_secs(1),
        format!(
            "max |G2 - oracle| {worst:.2e}, swap asymmetry {asym:.2e}, independence {indep:.2e}, {elapsed:.2?}"
        ),
    )
}

fn c2_cosine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let dims = 200u32;
    let random_vec = |rng: &mut ChaCha8Rng, range: std::ops::RangeInclusive<u32>| {
        let n = rng.random_range(1..=30);
        let mut m = BTreeMap::new();
        for _ in 0..n {
            m.insert(
                rng.random_range(range.clone()),
                rng.random_range(0.001..=1.0),
            );
        }
        m
    };
    let to_vec = |id: &str, m: &BTreeMap<u32, f64>| {
        DescriptorVector::new(id, "xx", m.iter().map(|(&c, &w)| (code(c), w)).collect()).unwrap()
    };
    let (mut worst, mut asym) = (0.0f64, 0.0f64);
    let mut in_bounds = true;
    for _ in 0..100 {
        let (a, b) = (
            random_vec(&mut rng, 1..=dims),
            random_vec(&mut rng, 1..=dims),
        );
        let (va, vb) = (to_vec("a", &a), to_vec("b", &b));
        let c = cosine(&va, &vb);
        worst = worst.max((c - dense_cosine(&a, &b, dims)).abs());
        asym = asym.max((c - cosine(&vb, &va)).abs());
        in_bounds &= (0.0..=1.0).contains(&c);
    }
    let mut disjoint_zero = true;
    for _ in 0..20 {
        let a = to_vec("a", &random_vec(&mut rng, 1..=100));
        let b = to_vec("b", &random_vec(&mut rng, 101..=200));
        disjoint_zero &= cosine(&a, &b) == 0.0;
    }
    check(
        worst <= 1e-12 && asym == 0.0 && in_bounds && disjoint_zero,
        format!(
            "max |cos - naive| {worst:.2e}, asymmetry {asym:.2e}, bounds {in_bounds}, disjoint = 0 {disjoint_zero}"
        ),
    )
}

fn c3_length_factor(bench: &Benchmark) -> Outcome {
    let s = LengthStats::new(1.135, 0.07).unwrap();
    let at_mu = s.factor(s.mu);
    let mut dev = 0.0f64;
    for (k, expected) in [(1.0, (-0.5f64).exp()), (2.0, (-2.0f64).exp())] {
        for sign in [-1.0, 1.0] {
            dev = dev.max((s.factor(s.mu + sign * k * s.sigma) - expected).abs());
        }
    }
    let report = run_experiment(ExperimentMode::T1ESLF, bench, &ExperimentOptions::default())
        .map_err(|e| e.to_string())?;
    let p1 = report.rows[0].precision_at_1;
    check(
        at_mu == 1.0 && dev <= 1e-12 && p1 < 0.10,
        format!("LF(mu) = {at_mu}, max identity deviation {dev:.2e}, LF-only P@1 {p1:.2}"),
    )
}

fn p1(report: &EvaluationReport, lf: LengthFactorUse) -> f64 {
    report.row(lf).map_or(f64::NAN, |r| r.precision_at_1)
}

fn c4_end_to_end(t1es: &EvaluationReport, elapsed: Duration) -> Outcome {
    let (off, on) = (
        p1(t1es, LengthFactorUse::Off),
        p1(t1es, LengthFactorUse::On),
    );
    check(
        off >= 0.90 && on >= 0.93 && on >= off && elapsed < Duration::from_secs(60),
        format!("T1ES P@1 {off:.2} without LF, {on:.2} with LF, {elapsed:.2?}"),
    )
}

fn c5_bias(bench: &Benchmark) -> Outcome {
    let opts = ExperimentOptions::default();
    let bil = run_experiment(ExperimentMode::BIL, bench, &opts).map_err(|e| e.to_string())?;
    let bilw = run_experiment(ExperimentMode::BILW, bench, &opts).map_err(|e| e.to_string())?;
    let space = bench.primary().len() * 2;
    let gain_off = p1(&bilw, LengthFactorUse::Off) - p1(&bil, LengthFactorUse::Off);
    let gain_on = p1(&bilw, LengthFactorUse::On) - p1(&bil, LengthFactorUse::On);

    // A same-language exact duplicate against cross-language candidates of
    // known cosine just above the biased score.
    let q = SearchDoc::new(
        DescriptorVector::new("q", "es", vec![(code(1), 1.0)]).unwrap(),
        1000,
    );
    let dup = SearchDoc::new(
        DescriptorVector::new("dup", "es", vec![(code(1), 1.0)]).unwrap(),
        1000,
    );
    let sim_opts = SimilarityOptions {
        use_length_factor: false,
        top_k: 10,
        ..SimilarityOptions::default()
    };
    let mut outranked = true;
    for (i, c) in [0.8301f64, 0.84, 0.9, 0.97, 0.999].into_iter().enumerate() {
        let s = (1.0 - c * c).sqrt();
        let cand = SearchDoc::new(
            DescriptorVector::new(format!("x{i}"), "en", vec![(code(1), c), (code(2), s)]).unwrap(),
            1000,
        );
        let ranked = find_most_similar(&q, &[dup.clone(), cand], &sim_opts, &LengthModel::new())
            .map_err(|e| e.to_string())?;
        outranked &= ranked[0].candidate_id == format!("x{i}")
            && ranked[0].final_score > 0.83
            && (ranked[1].final_score - 0.83).abs() < 1e-12;
    }
    check(
        gain_off >= 0.05 && outranked,
        format!(
            "{space}-doc space, P@1 without LF: BIL {:.2} -> BILW {:.2} ({:+.0}pp); with LF: {:.2} -> {:.2} ({:+.0}pp); duplicate outranked {outranked}",
            p1(&bil, LengthFactorUse::Off),
            p1(&bilw, LengthFactorUse::Off),
            gain_off * 100.0,
            p1(&bil, LengthFactorUse::On),
            p1(&bilw, LengthFactorUse::On),
            gain_on * 100.0,
        ),
    )
}

fn c6_sweep(t1es: &EvaluationReport) -> Outcome {
    let row = t1es.row(LengthFactorUse::On).ok_or("no LF row")?;
    let rows = sweep_threshold(&row.outcomes).map_err(|e| e.to_string())?;
    let monotone = rows.windows(2).all(|w| w[1].recall <= w[0].recall);
    match threshold_for_recall(&rows, 0.88) {
        Some(r) => check(
            monotone && r.noise <= 0.05,
            format!(
                "monotone {monotone}; threshold {:.2} gives recall {:.2}, noise {:.2}",
                r.threshold, r.recall, r.noise
            ),
        ),
        None => Err(format!(
            "monotone {monotone}; no threshold reaches 88% recall"
        )),
    }
}

fn c7_dedupe() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let words: Vec<String> = (0..400)
        .map(|_| {
            let n = rng.random_range(3..9);
            (0..n)
                .map(|_| rng.random_range(b'a'..=b'z') as char)
                .collect()
        })
        .collect();
    let mut texts: Vec<String> = (0..35)
        .map(|_| {
            (0..200)
                .map(|_| words[rng.random_range(0..words.len())].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    // Copies of earlier documents with a varying share of words replaced,
    // from near-exact to loosely related.
    for (i, rate) in [
        0.0, 0.002, 0.005, 0.005, 0.01, 0.01, 0.02, 0.03, 0.05, 0.08, 0.1, 0.15, 0.2, 0.3, 0.5,
    ]
    .into_iter()
    .enumerate()
    {
        let base: Vec<&str> = texts[i].split(' ').collect();
        let copy: Vec<&str> = base
            .iter()
            .map(|w| {
                if rng.random_bool(rate) {
                    words[rng.random_range(0..words.len())].as_str()
                } else {
                    w
                }
            })
            .collect();
        texts.push(copy.join(" "));
    }
    let docs: Vec<RawDocument> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| RawDocument::new(format!("d{i:02}"), "en", t.as_str()))
        .collect();
    let result = dedupe(&docs, 0.95).map_err(|e| e.to_string())?;
    let removed: HashSet<&str> = result
        .removed
        .iter()
        .map(|r| r.removed_id.as_str())
        .collect();

    let mut planted = 0;
    let mut caught = 0;
    let mut worst_removed = 1.0f64;
    let mut reported_ok = true;
    for i in 0..docs.len() {
        for j in i + 1..docs.len() {
            let jac = oracle_jaccard(&docs[i].text, &docs[j].text);
            if jac >= 0.95 {
                planted += 1;
                if removed.contains(docs[i].id.as_str()) || removed.contains(docs[j].id.as_str()) {
                    caught += 1;
                }
            }
        }
    }
    for r in &result.removed {
        let text = |id: &str| &docs.iter().find(|d| d.id == id).unwrap().text;
        let jac = oracle_jaccard(text(&r.kept_id), text(&r.removed_id));
        worst_removed = worst_removed.min(jac);
        reported_ok &= (jac - r.jaccard).abs() < 1e-12;
    }
    check(
        planted > 0 && caught == planted && worst_removed >= 0.80 && reported_ok,
        format!(
            "{caught}/{planted} pairs at >= 0.95 removed, {} documents removed, lowest removed overlap {worst_removed:.3}, reported jaccard matches oracle {reported_ok}",
            removed.len()
        ),
    )
}

fn c8_determinism(spec: &SyntheticSpec, first: &Benchmark) -> Outcome {
    let config = TrainingConfig::default();
    let corpus = generate_synthetic(spec).map_err(|e| e.to_string())?;
    let second = Benchmark::from_synthetic(&corpus, &config).map_err(|e| e.to_string())?;
    let same_profiles = first.src_profiles.to_text() == second.src_profiles.to_text()
        && first.tgt_profiles.to_text() == second.tgt_profiles.to_text();
    let opts = ExperimentOptions::default();
    let mut same_reports = true;
    for mode in [
        ExperimentMode::T1ES,
        ExperimentMode::BILW,
        ExperimentMode::TH1B,
    ] {
        let a = run_experiment(mode, first, &opts).map_err(|e| e.to_string())?;
        let b = run_experiment(mode, &second, &opts).map_err(|e| e.to_string())?;
        same_reports &= a.to_tsv() == b.to_tsv();
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |n: &str| dir.path().join(n);
    let roundtrip = || -> xlingua::Result<bool> {
        corpus.thesaurus.save(path("t1"))?;
        Thesaurus::load(path("t1"))?.save(path("t2"))?;
        first.src_profiles.save(path("p1"))?;
        ProfileSet::load(path("p1"))?.save(path("p2"))?;
        first.length_model.save(path("l1"))?;
        LengthModel::load(path("l1"))?.save(path("l2"))?;
        let bytes = |n: &str| std::fs::read(path(n)).unwrap();
        Ok(bytes("t1") == bytes("t2") && bytes("p1") == bytes("p2") && bytes("l1") == bytes("l2"))
    };
    let stable_files = roundtrip().map_err(|e| e.to_string())?;
    check(
        same_profiles && same_reports && stable_files,
        format!(
            "identical profile sets {same_profiles}, identical reports {same_reports}, save/load/save stable {stable_files}"
        ),
    )
}

fn c9_invariants(bench: &Benchmark) -> Outcome {
    let start = Instant::now();
    let profiles = &bench.src_profiles;
    let vocab: Vec<String> = {
        let mut v: Vec<String> = profiles
            .profiles()
            .flat_map(|p| p.associates().iter().map(|(l, _)| l.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let lang = profiles.lang().to_string();
    let doc_from = |counts: &[(usize, u32)], scale: u32| {
        let mut lemma_freq = BTreeMap::new();
        for &(i, c) in counts {
            *lemma_freq
                .entry(vocab[i % vocab.len()].clone())
                .or_insert(0) += c * scale;
        }
        NormalizedDocument {
            id: "p".into(),
            lang: lang.clone(),
            lemma_freq,
            char_length: 100,
            token_count: 0,
            manual_descriptors: Default::default(),
        }
    };
    let counts = prop::collection::vec((0..usize::MAX, 1..20u32), 1..60);
    let mut runner = TestRunner::new(Config {
        cases: 256,
        ..Config::default()
    });
    let err = |e: xlingua::Error| TestCaseError::fail(e.to_string());

    let scale = runner
        .run(&(counts.clone(), 2..50u32), |(c, k)| {
            let a = assign(&doc_from(&c, 1), profiles, 100).map_err(err)?;
            let b = assign(&doc_from(&c, k), profiles, 100).map_err(err)?;
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.entries().iter().zip(b.entries()) {
                prop_assert_eq!(x.0, y.0);
                prop_assert!((x.1 - y.1).abs() <= 1e-12);
            }
            Ok(())
        })
        .map_err(|e| format!("scale invariance: {e}"));

    let prefix = runner
        .run(&counts, |c| {
            let doc = doc_from(&c, 1);
            let full = assign(&doc, profiles, 100).map_err(err)?;
            let top8 = assign(&doc, profiles, 8).map_err(err)?;
            prop_assert_eq!(top8.entries(), &full.entries()[..full.len().min(8)]);
            Ok(())
        })
        .map_err(|e| format!("truncation prefix: {e}"));

    let entries = prop::collection::btree_map(1..40u32, 0.001..=1.0f64, 1..15);
    let penalty = runner
        .run(
            &(
                entries.clone(),
                entries,
                (1..5000usize, 1..5000usize),
                0.01..=1.0f64,
                any::<bool>(),
                (0.5..2.0f64, 0.01..0.5f64),
            ),
            |(a, b, (la, lb), bias, same, (mu, sigma))| {
                let vec = |id: &str, l: &str, m: &BTreeMap<u32, f64>| {
                    DescriptorVector::new(id, l, m.iter().map(|(&c, &w)| (code(c), w)).collect())
                        .unwrap()
                };
                let cand_lang = if same { "es" } else { "en" };
                let q = SearchDoc::new(vec("q", "es", &a), la);
                let c = SearchDoc::new(vec("c", cand_lang, &b), lb);
                let mut model = LengthModel::new();
                model.insert("es", "en", LengthStats::new(mu, sigma).unwrap());
                model.insert("es", "es", LengthStats::new(1.0, sigma).unwrap());
                let opts = SimilarityOptions {
                    same_language_bias: bias,
                    ..SimilarityOptions::default()
                };
                let s = similarity(&q, &c, &opts, &model).map_err(err)?;
                prop_assert!(s.final_score <= s.raw_cosine);
                prop_assert!(s.final_score >= 0.0);
                Ok(())
            },
        )
        .map_err(|e| format!("penalty monotonicity: {e}"));

    let elapsed = start.elapsed();
    let failures: Vec<String> = [scale, prefix, penalty]
        .into_iter()
        .filter_map(Result::err)
        .collect();
    check(
        failures.is_empty() && elapsed < Duration::from_secs(120),
        if failures.is_empty() {
            format!("scale invariance, k=8 prefix of k=100, final <= raw over 3x256 cases, {elapsed:.2?}")
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 statistical oracles", c1_g2()),
        ("2 cosine oracle", c2_cosine()),
    ];

    let spec = SyntheticSpec::default();
    let start = Instant::now();
    let bench = generate_synthetic(&spec)
        .and_then(|c| Benchmark::from_synthetic(&c, &TrainingConfig::default()));
    let bench = match bench {
        Ok(b) => b,
        Err(e) => {
            println!("FAIL benchmark construction: {e}");
            std::process::exit(1);
        }
    };
    let t1es = run_experiment(ExperimentMode::T1ES, &bench, &ExperimentOptions::default());
    let elapsed = start.elapsed();
    let t1es = match t1es {
        Ok(r) => r,
        Err(e) => {
            println!("FAIL T1ES run: {e}");
            std::process::exit(1);
        }
    };

    results.push(("3 length factor", c3_length_factor(&bench)));
    results.push(("4 end-to-end benchmark", c4_end_to_end(&t1es, elapsed)));
    results.push(("5 bilingual bias", c5_bias(&bench)));
    results.push(("6 threshold sweep", c6_sweep(&t1es)));
    results.push(("7 dedupe", c7_dedupe()));
    results.push((
        "8 determinism and round-trips",
        c8_determinism(&spec, &bench),
    ));
    results.push(("9 invariant suite", c9_invariants(&bench)));

    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
