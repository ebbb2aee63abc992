//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! ```text
//! cargo test -p persuasion-corpus --test acceptance
//! ```

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{
    check_pipeline_invariants, fixture, fuzz_input, gradient_relative_error, oracle_metrics, random_pairs,
    random_pipeline_case, random_problem, random_table, Gen,
};
use persuasion_corpus::baseline::Hyperparams;
use persuasion_corpus::cli::train_and_evaluate;
use persuasion_corpus::metrics::{confusion, metrics, render_report, ClassMetrics, ConfusionMatrix};
use persuasion_corpus::pipeline::{build_corpus, detect_label, Label, Patterns, PipelineConfig};
use persuasion_corpus::tlk::{parse_tlk, write_tlk, CodepageConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("{what} took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn tlk_round_trip() -> Outcome {
    let start = Instant::now();
    let cp = CodepageConfig::default();
    let mut g = Gen::new(1);
    let generated = 1000;
    for i in 0..generated {
        let t = random_table(&mut g);
        let bytes = write_tlk(&t, &cp).map_err(|e| format!("table {i}: write failed: {e}"))?;
        let back = parse_tlk(&bytes, &cp).map_err(|e| format!("table {i}: parse failed: {e}"))?;
        ensure(back == t, || format!("table {i}: parse(write(T)) != T"))?;
    }
    let names = ["empty.tlk", "one_entry.tlk", "mixed.tlk", "german.tlk"];
    for name in names {
        let bytes = fs::read(fixture(&format!("tlk/{name}"))).map_err(|e| e.to_string())?;
        let t = parse_tlk(&bytes, &cp).map_err(|e| format!("{name}: {e}"))?;
        let again = write_tlk(&t, &cp).map_err(|e| format!("{name}: {e}"))?;
        ensure(again == bytes, || format!("{name}: write(parse(F)) != F"))?;
    }
    let took = within(start, Duration::from_secs(10), "round trip")?;
    Ok(format!("{generated} generated tables, {} byte fixtures, {took:.2?}", names.len()))
}

fn fuzz_safety() -> Outcome {
    let cp = CodepageConfig::default();
    let valid: Vec<Vec<u8>> = ["one_entry.tlk", "mixed.tlk", "german.tlk"]
        .iter()
        .map(|n| fs::read(fixture(&format!("tlk/{n}"))).unwrap())
        .collect();
    let mut g = Gen::new(2);
    let (mut ok, mut err) = (0, 0);
    for i in 0..10_000 {
        let input = fuzz_input(&mut g, &valid);
        match catch_unwind(AssertUnwindSafe(|| parse_tlk(&input, &cp))) {
            Ok(Ok(_)) => ok += 1,
            Ok(Err(_)) => err += 1,
            Err(_) => return Err(format!("input {i} ({} bytes) panicked", input.len())),
        }
    }
    Ok(format!("10000 inputs: {ok} parsed, {err} typed errors, 0 panics"))
}

fn labeling_fidelity() -> Outcome {
    let tags = Patterns::from_config(&PipelineConfig::default()).map_err(|e| e.to_string())?.tags;
    let cases = [
        ("[Persuade] Come on, what harm is there in telling me?", Label::Persuade, vec!["Persuade"]),
        ("[Persuade/Lie] I was never in the Czerka offices.", Label::Persuade, vec!["Persuade"]),
        (
            "After I overheard the deal they made with Lorso in the Czerka offices, I confronted them. When they tried to run, I chased them down and killed them.",
            Label::NonPersuade,
            vec![],
        ),
    ];
    for (text, label, expected_tags) in &cases {
        let (got, got_tags) = detect_label(text, &tags);
        ensure(got == *label && got_tags == *expected_tags, || {
            format!("{text:?} -> {got} {got_tags:?}, expected {label} {expected_tags:?}")
        })?;
    }
    Ok(format!("{} reference lines labelled as expected", cases.len()))
}

fn pipeline_invariants() -> Outcome {
    let mut g = Gen::new(3);
    let mut records = 0;
    for i in 0..100 {
        let case = random_pipeline_case(&mut g);
        let (r, m) = build_corpus(&case.games, &case.config).map_err(|e| format!("config {i}: {e}"))?;
        check_pipeline_invariants(&case, &r, &m).map_err(|e| format!("config {i}: {e}"))?;
        records += r.len();
    }
    Ok(format!("100 randomized 5-language configs, {records} sentence records"))
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))? {
        let path = e.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        out.push((name, fs::read(&path).map_err(|e| e.to_string())?));
    }
    out.sort();
    Ok(out)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for entry in fs::read_dir(fixture("separable")).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.is_file() {
            fs::copy(&path, tmp.path().join(path.file_name().unwrap())).map_err(|e| e.to_string())?;
        }
    }
    let config = tmp.path().join("run.toml");
    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let out = tmp.path().join(run);
        let o = Command::new(env!("CARGO_BIN_EXE_persuasion-corpus"))
            .args(["build", "-c"])
            .arg(&config)
            .arg("-o")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), || format!("build failed: {}", String::from_utf8_lossy(&o.stderr)))?;
        outputs.push((o.stdout, read_dir_sorted(&out)?));
    }
    ensure(outputs[0] == outputs[1], || "two builds differ".into())?;
    let files = outputs[0].1.len();
    ensure(outputs[0].1 == read_dir_sorted(&fixture("separable/corpus"))?, || {
        "build differs from the committed corpus".into()
    })?;
    Ok(format!("2 builds, {files} files byte-identical to each other and to the committed corpus"))
}

fn metrics_oracle() -> Outcome {
    let mut g = Gen::new(4);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    for i in 0..1000 {
        let pairs = random_pairs(&mut g);
        let (p, gold): (Vec<Label>, Vec<Label>) = pairs.iter().copied().unzip();
        let r = metrics(&confusion(&p, &gold).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let o = oracle_metrics(&pairs);
        let all = [
            (r.accuracy, o.accuracy),
            (r.macro_f1, o.macro_f1),
            (r.weighted_f1, o.weighted_f1),
            (r.persuade.precision, o.precision[0]),
            (r.persuade.recall, o.recall[0]),
            (r.persuade.f1, o.f1[0]),
            (r.no_persuade.precision, o.precision[1]),
            (r.no_persuade.recall, o.recall[1]),
            (r.no_persuade.f1, o.f1[1]),
        ];
        ensure(all.iter().all(|(a, b)| close(*a, *b)), || format!("instance {i}: {all:?}"))?;
    }
    let r = metrics(&ConfusionMatrix { tp: 8, fp: 2, fn_: 4, tn: 86 }).map_err(|e| e.to_string())?;
    let hand = [
        ("precision", r.persuade.precision, 0.8000),
        ("recall", r.persuade.recall, 0.6667),
        ("F1", r.persuade.f1, 0.7273),
        ("accuracy", r.accuracy, 0.9400),
    ];
    for (name, got, want) in hand {
        ensure((got - want).abs() < 1e-4, || format!("hand case {name}: {got} vs {want}"))?;
    }
    Ok("1000 random instances within 1e-12; hand case 0.8000/0.6667/0.7273/0.9400 within 1e-4".into())
}

fn gradient_check() -> Outcome {
    let mut g = Gen::new(5);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let (w, b, ex, l2) = random_problem(&mut g);
        let err = gradient_relative_error(&w, b, &ex, l2);
        ensure(err < 1e-6, || format!("problem {i}: relative error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("50 problems, worst relative error {worst:.1e}"))
}

fn baseline_end_to_end() -> Outcome {
    let start = Instant::now();
    let (_, report) = train_and_evaluate(&fixture("separable/corpus"), "en", Hyperparams::default())
        .map_err(|e| format!("{e:#}"))?;
    let took = within(start, Duration::from_secs(30), "train + evaluate")?;
    ensure(report.accuracy == 1.0 && report.macro_f1 == 1.0, || {
        format!("accuracy {} macro F1 {}", report.accuracy, report.macro_f1)
    })?;
    Ok(format!(
        "test accuracy 1.00, macro F1 1.00 on {} test sentences, {took:.2?}",
        report.confusion.total()
    ))
}

fn reference_score_status() -> Outcome {
    let class = |precision, recall, f1| ClassMetrics {
        precision,
        recall,
        f1,
        support: 0,
    };
    let mut r = metrics(&ConfusionMatrix { tp: 1, fp: 0, fn_: 0, tn: 1 }).map_err(|e| e.to_string())?;
    r.language = "English".into();
    r.accuracy = 0.87;
    r.macro_f1 = 0.79;
    r.weighted_f1 = 0.87;
    r.persuade = class(0.68, 0.66, 0.67);
    r.no_persuade = class(0.92, 0.92, 0.92);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/english_reference.txt");
    let golden = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    ensure(render_report(&r) == golden, || "rendered English column differs from golden file".into())?;
    Ok("reference corpus sizes and transformer scores need the original game files and checkpoints: \
        documented as optional targets, not reproduced; English column layout matches golden file"
        .into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("tlk round-trip", tlk_round_trip),
        ("fuzz safety", fuzz_safety),
        ("labeling fidelity", labeling_fidelity),
        ("pipeline invariants", pipeline_invariants),
        ("build determinism", determinism),
        ("metrics oracle", metrics_oracle),
        ("baseline gradient check", gradient_check),
        ("baseline end-to-end", baseline_end_to_end),
        ("reference-score status", reference_score_status),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
