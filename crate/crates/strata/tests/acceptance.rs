//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero
//! if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use strata::diagram::{rewrite, well_defined};
use strata::metatheory::{composite_literal, run_all, PROPERTIES};
use strata::movecheck::{run_check, CHECKS};
use strata::proofdoc::{check_document, parse_document, report_text, serialize_document};
use strata::random::Fuzz;

const SEED: u64 = 0x5eed;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn metatheory_suite() -> Verdict {
    let start = Instant::now();
    let reports = run_all(SEED, 500);
    let elapsed = start.elapsed();
    let mut bad = vec![];
    for r in &reports {
        if r.cases < 500 {
            bad.push(format!("{}: only {} cases", r.name, r.cases));
        }
        if let Some((i, msg)) = r.failures.first() {
            bad.push(format!("{} case {i}: {msg}", r.name));
        }
    }
    if reports.len() != PROPERTIES.len() || reports.len() != 17 {
        bad.push(format!("{} properties ran", reports.len()));
    }
    if elapsed > Duration::from_secs(60) {
        bad.push(format!("took {elapsed:?}"));
    }
    if bad.is_empty() {
        Ok(format!("17 properties x 500 cases in {elapsed:.2?}"))
    } else {
        Err(bad.join("; "))
    }
}

fn embedding_normal_form() -> Verdict {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 10_000 {
        let mut fz = Fuzz::new(SEED.wrapping_add(seed));
        seed += 1;
        let top = 1 + fz.below(3);
        let sig = fz.signature(top);
        let dim = 1 + fz.below(top);
        let a = fz.diagram(&sig, dim);
        let (d, f) = fz.sub_diagram(&sig, &a);
        let (s, e) = fz.sub_diagram(&sig, &d);
        let fast = e.then(&f).map_err(|x| x.to_string())?;
        let literal = composite_literal(&sig, &f, &a, &e, &d, &s).map_err(|x| format!("seed {seed}: {x}"))?;
        if fast != literal {
            return Err(format!("seed {seed}: {fast} != {literal}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} pairs"))
}

fn rewrite_size_law() -> Verdict {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 1_000 {
        let mut fz = Fuzz::new(SEED.wrapping_add(1 << 40).wrapping_add(seed));
        seed += 1;
        let top = 1 + fz.below(3);
        let sig = fz.signature(top);
        let dim = 1 + fz.below(top);
        let d = fz.diagram(&sig, dim);
        let (s, e) = fz.sub_diagram(&sig, &d);
        let t = fz.parallel(&sig, &s);
        let out = rewrite(&sig, &d, &e, &s, &t).map_err(|x| format!("seed {seed}: {x}"))?;
        well_defined(&sig, &out).map_err(|x| format!("seed {seed}: {x}"))?;
        if out.height() + s.height() != d.height() + t.height() {
            return Err(format!("seed {seed}: |{out}| != |{d}| - |{s}| + |{t}|"));
        }
        checked += 1;
    }
    Ok(format!("{checked} rewrites"))
}

fn move_checks(names: &[&str], cases: usize) -> Verdict {
    let mut summary = vec![];
    for (k, c) in CHECKS.iter().enumerate().filter(|(_, c)| names.contains(&c.name)) {
        let r = run_check(c, SEED ^ ((k as u64 + 64) << 32), cases);
        if r.cases < cases {
            return Err(format!("{}: built {} of {cases} instances", r.name, r.cases));
        }
        if let Some((s, msg)) = r.failures.first() {
            return Err(format!("{} seed {s}: {msg}", r.name));
        }
        summary.push(format!("{} {}", r.name, r.cases));
    }
    if summary.len() != names.len() {
        return Err("unknown check name".into());
    }
    Ok(summary.join(", "))
}

fn corpus() -> Result<Vec<(String, String, String)>, String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut out = vec![];
    for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|e| e == "hdprf") {
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let golden = std::fs::read_to_string(path.with_extension("golden")).map_err(|e| format!("{name}: {e}"))?;
            out.push((name, text, golden));
        }
    }
    out.sort();
    Ok(out)
}

fn corpus_replay() -> Verdict {
    let docs = corpus()?;
    let expected = ["adjunction_snake", "pull_through", "sigma_star_interchange"];
    if docs.iter().map(|d| d.0.as_str()).collect::<Vec<_>>() != expected {
        return Err("corpus is incomplete".into());
    }
    for (name, text, golden) in &docs {
        let doc = parse_document(text).map_err(|e| format!("{name}: {e}"))?;
        let report = check_document(&doc);
        if !report.ok() {
            return Err(format!("{name}: {report}"));
        }
        if report_text(&report) != *golden {
            return Err(format!("{name}: heights differ from golden"));
        }
    }
    let snake = &docs[0].1;
    if !snake.contains("invert_intro") {
        return Err("adjunction script does not use invert_intro".into());
    }
    Ok(format!("{} documents", docs.len()))
}

fn serialization() -> Verdict {
    for (name, text, _) in corpus()? {
        let doc = parse_document(&text).map_err(|e| format!("{name}: {e}"))?;
        if serialize_document(&doc) != text {
            return Err(format!("{name}: not byte-exact"));
        }
        let again = parse_document(&serialize_document(&doc)).map_err(|e| e.to_string())?;
        if again.diagrams != doc.diagrams {
            return Err(format!("{name}: diagrams changed"));
        }
        if name == "sigma_star_interchange" {
            let z = doc.diagrams.get("zigzag").ok_or("no zigzag diagram")?;
            let hs: Vec<Vec<usize>> = z.entries().iter().map(|e| e.embedding.heights().to_vec()).collect();
            if hs != vec![vec![1], vec![0], vec![1]] {
                return Err(format!("zigzag embeddings {hs:?}"));
            }
        }
    }
    Ok("byte-exact, [1],[0],[1] preserved".into())
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("metatheory fuzz suite", metatheory_suite),
        ("embedding composition normal form", embedding_normal_form),
        ("rewrite size law", rewrite_size_law),
        ("move round trips", || {
            move_checks(
                &["I round trip", "II front round trip", "II rear round trip", "II' front round trip", "II' rear round trip"],
                500,
            )
        }),
        ("composite schemes against expansions", || {
            move_checks(&["composite I against expansion", "composite II against expansion"], 200)
        }),
        ("higher move boundaries", || {
            move_checks(&["III boundaries", "IV boundaries", "V boundaries", "VI boundaries"], 50)
        }),
        ("corpus replay", corpus_replay),
        ("serialization", serialization),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {name} ({detail}; {:.2?})", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
