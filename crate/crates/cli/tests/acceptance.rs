//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use widthlab_core::bounds::{ball_count, qc_constant, verify_with_report};
use widthlab_core::corpus::random_word;
use widthlab_core::{
    compare, invariants_ext, invariants_free, oracle, random_corpus, Alphabet, CoreGraph,
    CorpusConfig, ExtensionSpec, InvariantReport, OracleConfig, Word,
};

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

fn words(gens: &[&str]) -> Vec<Word> {
    gens.iter().map(|g| g.parse().unwrap()).collect()
}

fn rotation() -> ExtensionSpec {
    ExtensionSpec::new(vec![2, 3, 4, 1], 4).unwrap()
}

fn build(spec: &ExtensionSpec, gens: &[Word]) -> CoreGraph {
    CoreGraph::build(spec.alphabet(), gens).unwrap()
}

fn triple(r: &InvariantReport) -> (usize, usize, usize) {
    (r.weak_width, r.width, r.height)
}

fn problems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn run_compute(file: &str, threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_widthlab"))
        .args(["compute", "--input"])
        .arg(problems_dir().join(file))
        .env("WIDTHLAB_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{file}: exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn two_generator_factor() -> Outcome {
    let start = Instant::now();
    let spec = rotation();
    let h = build(&spec, &words(&["x1", "x2"]));
    let r = invariants_ext(&h, &spec).unwrap();
    let elapsed = start.elapsed();
    let reps: Vec<String> = r
        .certificates
        .weak_width
        .iter()
        .map(|c| c.shortest.to_string())
        .collect();
    let cli = run_compute("extension_two_generators.json", "1")
        .ok()
        .and_then(|b| serde_json::from_slice::<Value>(&b).ok())
        .map(|v| {
            (
                v["report"]["weakWidth"].clone(),
                v["report"]["width"].clone(),
                v["report"]["height"].clone(),
            )
        });
    let pass = triple(&r) == (3, 2, 2)
        && r.per_twist_weak_width == [1, 1, 0, 1]
        && reps == ["1", "t", "t^3"]
        && cli == Some((3.into(), 2.into(), 2.into()))
        && r.verify(&h, &spec).unwrap().is_empty()
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "<x1,x2>: (weak width, width, height) = {:?}, per twist {:?}, representatives {{{}}}, {:?}",
            triple(&r),
            r.per_twist_weak_width,
            reps.join(", "),
            elapsed
        ),
    )
}

fn three_generator_factor() -> Outcome {
    let start = Instant::now();
    let spec = rotation();
    let h = build(&spec, &words(&["x1", "x2", "x3"]));
    let r = invariants_ext(&h, &spec).unwrap();
    let elapsed = start.elapsed();
    let width_twists: Vec<usize> = r
        .certificates
        .width
        .members
        .iter()
        .map(|m| m.twist)
        .collect();
    let width_at_base = r
        .certificates
        .width
        .members
        .iter()
        .all(|m| m.vertex == CoreGraph::BASE);
    let height_twists: Vec<usize> = r
        .certificates
        .height
        .members
        .iter()
        .map(|m| m.twist)
        .collect();
    let witness = r.certificates.height.witness.clone().unwrap_or_default();
    let (cyclic_core, _) = witness.cyclic_reduce();
    let pass = triple(&r) == (4, 4, 3)
        && width_twists == [0, 1, 2, 3]
        && width_at_base
        && height_twists == [0, 1, 2]
        && cyclic_core == words(&["x3"])[0]
        && r.verify(&h, &spec).unwrap().is_empty()
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "<x1,x2,x3>: {:?}, width conjugates by t^k for k in {:?}, height conjugates {:?} sharing {}, {:?}",
            triple(&r),
            width_twists,
            height_twists,
            witness,
            elapsed
        ),
    )
}

struct CorpusRun {
    instances: usize,
    ball_bound_violations: usize,
    short_representative_violations: usize,
    max_ratio: (usize, u128),
    elapsed: Duration,
}

fn corpus_run() -> CorpusRun {
    let start = Instant::now();
    let corpus = random_corpus(&CorpusConfig::default());
    let mut run = CorpusRun {
        instances: corpus.len(),
        ball_bound_violations: 0,
        short_representative_violations: 0,
        max_ratio: (0, 1),
        elapsed: Duration::ZERO,
    };
    for e in &corpus {
        let h = CoreGraph::build(Alphabet::new(e.rank).unwrap(), &e.generators).unwrap();
        let report = invariants_free(&h);
        let k = qc_constant(&h);
        let n = ball_count(e.rank, 2 * k);
        if report.weak_width as u128 > n {
            run.ball_bound_violations += 1;
        }
        if report
            .certificates
            .weak_width
            .iter()
            .any(|c| c.shortest.fpart.len() > 2 * k)
        {
            run.short_representative_violations += 1;
        }
        // Cross-check against the library's own bound report.
        let v = verify_with_report(&h, &report);
        if v.context.ball_bound != n
            || v.passed()
                != (report.weak_width as u128 <= n
                    && !report
                        .certificates
                        .weak_width
                        .iter()
                        .any(|c| c.shortest.fpart.len() > 2 * k))
        {
            run.ball_bound_violations += 1;
        }
        if (report.weak_width as u128) * run.max_ratio.1 > (run.max_ratio.0 as u128) * n {
            run.max_ratio = (report.weak_width, n);
        }
    }
    run.elapsed = start.elapsed();
    run
}

fn weak_width_bound(run: &CorpusRun) -> Outcome {
    outcome(
        run.instances >= 100 && run.ball_bound_violations == 0 && run.elapsed < Duration::from_secs(60),
        format!(
            "{} subgroups of F2..F4, weak width <= N every time ({} violations, tightest {}/{}), {:?}",
            run.instances, run.ball_bound_violations, run.max_ratio.0, run.max_ratio.1, run.elapsed
        ),
    )
}

fn short_representatives(run: &CorpusRun) -> Outcome {
    outcome(
        run.instances >= 100 && run.short_representative_violations == 0 && run.elapsed < Duration::from_secs(60),
        format!(
            "{} subgroups, every infinite-intersection double coset has a representative of length <= 2K ({} violations)",
            run.instances, run.short_representative_violations
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut cases: Vec<(String, ExtensionSpec, Vec<Word>, usize)> = vec![
        (
            "<x1,x2> in the extension".into(),
            rotation(),
            words(&["x1", "x2"]),
            3,
        ),
        (
            "<x1,x2,x3> in the extension".into(),
            rotation(),
            words(&["x1", "x2", "x3"]),
            3,
        ),
        (
            "<x1^2> in F1".into(),
            ExtensionSpec::free(1).unwrap(),
            words(&["x1 x1"]),
            4,
        ),
        (
            "<x1 x2 X1> in F2".into(),
            ExtensionSpec::free(2).unwrap(),
            words(&["x1 x2 X1"]),
            5,
        ),
        (
            "<x1,x2> in F4".into(),
            ExtensionSpec::free(4).unwrap(),
            words(&["x1", "x2"]),
            4,
        ),
        (
            "<x1,x2,x3> in F4".into(),
            ExtensionSpec::free(4).unwrap(),
            words(&["x1", "x2", "x3"]),
            4,
        ),
    ];
    for (i, e) in random_corpus(&CorpusConfig::default())
        .into_iter()
        .take(20)
        .enumerate()
    {
        let radius = if e.rank == 4 { 4 } else { 5 };
        cases.push((
            format!("corpus #{i}"),
            ExtensionSpec::free(e.rank).unwrap(),
            e.generators,
            radius,
        ));
    }
    let mut failures = Vec::new();
    let mut complete = 0;
    for (name, spec, gens, radius) in &cases {
        let h = build(spec, gens);
        let exact = invariants_ext(&h, spec).unwrap();
        let brute = oracle(spec, gens, &OracleConfig::with_radius(*radius)).unwrap();
        let c = compare(&exact, &brute);
        if brute.width_complete && brute.height_complete {
            complete += 1;
        }
        if !c.agreement || brute.truncated {
            failures.push(name.clone());
        }
    }
    outcome(
        cases.len() >= 25 && failures.is_empty(),
        format!(
            "{} instances: double-coset buckets agree everywhere, width/height equal on the {} with a complete oracle and within its lower bound elsewhere{}",
            cases.len(),
            complete,
            if failures.is_empty() { String::new() } else { format!("; disagreements: {failures:?}") }
        ),
    )
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures: Vec<String> = Vec::new();
    let mut reports = 0;

    let fold_sets = random_corpus(&CorpusConfig {
        count: 200,
        seed: 11,
        ..CorpusConfig::default()
    });
    for e in &fold_sets {
        let a = Alphabet::new(e.rank).unwrap();
        let h = CoreGraph::build(a, &e.generators).unwrap();
        let mut reversed = e.generators.clone();
        reversed.reverse();
        let doubled: Vec<Word> = e.generators.iter().chain(&e.generators).cloned().collect();
        if CoreGraph::build(a, &reversed).unwrap() != h
            || CoreGraph::build(a, &doubled).unwrap() != h
            || CoreGraph::build(a, &h.basis()).unwrap() != h
        {
            failures.push(format!("folding depends on order: {:?}", e.generators));
        }
        if h.rank() != h.edge_count() + 1 - h.vertex_count() || h.rank() > e.generators.len() {
            failures.push(format!("rank formula: {:?}", e.generators));
        }
    }
    for rank in 1..=4 {
        let rose = CoreGraph::build(
            Alphabet::new(rank).unwrap(),
            &(1..=rank)
                .map(|i| format!("x{i}").parse().unwrap())
                .collect::<Vec<Word>>(),
        )
        .unwrap();
        if rose.vertex_count() != 1 || rose.rank() != rank {
            failures.push(format!("rose of rank {rank}"));
        }
    }
    for n in 1..=6 {
        let cycle = CoreGraph::build(
            Alphabet::new(1).unwrap(),
            &[vec!["x1"; n].join(" ").parse().unwrap()],
        )
        .unwrap();
        if cycle.vertex_count() != n || cycle.rank() != 1 {
            failures.push(format!("cycle of length {n}"));
        }
    }

    let base = random_corpus(&CorpusConfig {
        count: 50,
        seed: 13,
        ..CorpusConfig::default()
    });
    for e in &base {
        let a = Alphabet::new(e.rank).unwrap();
        let g = random_word(&mut rng, a, 1 + (e.generators.len() * 2) % 5);
        let conj: Vec<Word> = e.generators.iter().map(|s| g.conjugate(s)).collect();
        let r1 = invariants_free(&CoreGraph::build(a, &e.generators).unwrap());
        let r2 = invariants_free(&CoreGraph::build(a, &conj).unwrap());
        reports += 2;
        if triple(&r1) != triple(&r2) {
            failures.push(format!("conjugation by {g} changes {:?}", e.generators));
        }
        for r in [&r1, &r2] {
            if r.height > r.width {
                failures.push(format!("height exceeds width for {:?}", e.generators));
            }
        }
    }
    let spec = rotation();
    for _ in 0..10 {
        let a = spec.alphabet();
        let gens: Vec<Word> = (0..2).map(|_| random_word(&mut rng, a, 3)).collect();
        let g = random_word(&mut rng, a, 3);
        let conj: Vec<Word> = gens.iter().map(|s| g.conjugate(s)).collect();
        let r1 = invariants_ext(&build(&spec, &gens), &spec).unwrap();
        let r2 = invariants_ext(&build(&spec, &conj), &spec).unwrap();
        reports += 2;
        if triple(&r1) != triple(&r2) || r1.height > r1.width {
            failures.push(format!("extension conjugation by {g} changes {gens:?}"));
        }
    }

    for e in random_corpus(&CorpusConfig {
        count: 25,
        seed: 17,
        ..CorpusConfig::default()
    }) {
        let a = Alphabet::new(e.rank).unwrap();
        let h = CoreGraph::build(a, &e.generators).unwrap();
        let free = invariants_free(&h);
        let degenerate = invariants_ext(&h, &ExtensionSpec::free(e.rank).unwrap()).unwrap();
        reports += 2;
        if free != degenerate || free.height > free.width {
            failures.push(format!("order-one extension differs on {:?}", e.generators));
        }
    }

    outcome(
        failures.is_empty(),
        format!(
            "folding on 200 sets, rank on roses/cycles/random, 50 + 10 conjugations, 25 order-one extensions, height <= width on {reports} reports{}",
            if failures.is_empty() { String::new() } else { format!("; failures: {failures:?}") }
        ),
    )
}

fn determinism() -> Outcome {
    let mut outputs = Vec::new();
    let mut errors = Vec::new();
    for file in [
        "extension_two_generators.json",
        "extension_three_generators.json",
        "square.json",
    ] {
        let mut runs = Vec::new();
        for threads in ["1", "4"] {
            for _ in 0..3 {
                match run_compute(file, threads) {
                    Ok(out) => runs.push(out),
                    Err(e) => errors.push(e),
                }
            }
        }
        outputs.push((file, runs));
    }
    let identical = outputs
        .iter()
        .all(|(_, runs)| runs.len() == 6 && runs.windows(2).all(|w| w[0] == w[1]));
    outcome(
        errors.is_empty() && identical,
        format!(
            "compute on {} inputs, 3 runs each with WIDTHLAB_THREADS=1 and 4: byte-identical = {identical}{}",
            outputs.len(),
            if errors.is_empty() { String::new() } else { format!("; errors: {errors:?}") }
        ),
    )
}

fn main() {
    let corpus = corpus_run();
    let results = [
        ("extension example, two generators", two_generator_factor()),
        (
            "extension example, three generators",
            three_generator_factor(),
        ),
        (
            "weak width <= ball bound on corpus",
            weak_width_bound(&corpus),
        ),
        (
            "short double-coset representatives on corpus",
            short_representatives(&corpus),
        ),
        ("oracle equivalence", oracle_equivalence()),
        ("property suites", property_suites()),
        ("determinism", determinism()),
    ];
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
