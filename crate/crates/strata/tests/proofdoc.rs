mod common;

use std::path::PathBuf;

use common::star;
use strata::proofdoc::*;
use strata::Diagram;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus() -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "hdprf") {
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&path).unwrap();
            let golden = std::fs::read_to_string(path.with_extension("golden")).unwrap();
            out.push((name, text, golden));
        }
    }
    out.sort();
    out
}

const MINIMAL: &str = r#"{"version": 1, "signature": {"top_dim": 0, "generators": [{"name": "p", "dim": 0}]}}"#;

fn star_doc(steps: &str, start: &str, goal: &str) -> String {
    format!(
        r#"{{
  "version": 1,
  "signature": {{"top_dim": 3, "generators": [
    {{"name": "star", "dim": 0}},
    {{"name": "f", "dim": 1, "source": {{"g": "star"}}, "target": {{"g": "star"}}}},
    {{"name": "m", "dim": 2,
      "source": {{"source": {{"g": "star"}}, "entries": [{{"g": "f", "e": []}}, {{"g": "f", "e": []}}]}},
      "target": {{"source": {{"g": "star"}}, "entries": [{{"g": "f", "e": []}}]}}}},
    {{"name": "s", "dim": 2,
      "source": {{"source": {{"g": "star"}}, "entries": [{{"g": "f", "e": []}}]}},
      "target": {{"source": {{"g": "star"}}, "entries": [{{"g": "f", "e": []}}]}}}}
  ]}},
  "diagrams": {{
    "a": {start},
    "b": {goal}
  }},
  "proof": {{"start": "a", "goal": "b", "steps": [{steps}]}}
}}"#
    )
}

const TWO_S: &str = r#"{"source": {"source": {"g": "star"}, "entries": [{"g": "f", "e": []}, {"g": "f", "e": []}]},
      "entries": [{"g": "s", "e": [0]}, {"g": "s", "e": [1]}]}"#;
const TWO_S_SWAPPED: &str = r#"{"source": {"source": {"g": "star"}, "entries": [{"g": "f", "e": []}, {"g": "f", "e": []}]},
      "entries": [{"g": "s", "e": [1]}, {"g": "s", "e": [0]}]}"#;

#[test]
fn corpus_replays_to_golden_reports() {
    let docs = corpus();
    assert_eq!(docs.len(), 3);
    for (name, text, golden) in docs {
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let report = check_document(&doc);
        assert!(report.ok(), "{name}: {report}");
        assert_eq!(report_text(&report), golden, "{name}");
    }
}

#[test]
fn corpus_is_stored_canonically() {
    for (name, text, _) in corpus() {
        let doc = parse_document(&text).unwrap();
        assert_eq!(serialize_document(&doc), text, "{name}");
    }
}

#[test]
fn embedding_lists_round_trip() {
    let (_, text, _) = corpus().into_iter().find(|(n, _, _)| n == "sigma_star_interchange").unwrap();
    let doc = parse_document(&text).unwrap();
    let zigzag = &doc.diagrams["zigzag"];
    let heights: Vec<Vec<usize>> = zigzag.entries().iter().map(|e| e.embedding.heights().to_vec()).collect();
    assert_eq!(heights, vec![vec![1], vec![0], vec![1]]);
    let again = parse_document(&serialize_document(&doc)).unwrap();
    assert_eq!(&again.diagrams["zigzag"], zigzag);
}

#[test]
fn minimal_document() {
    let doc = parse_document(MINIMAL).unwrap();
    assert!(doc.diagrams.is_empty());
    assert!(doc.proof.is_none());
    let text = serialize_document(&doc);
    assert!(text.contains("\"diagrams\": {}"), "{text}");
    assert_eq!(serialize_document(&parse_document(&text).unwrap()), text);
}

#[test]
fn generators_are_ordered_by_dimension_then_name() {
    let doc = parse_document(&star_doc("", TWO_S, TWO_S)).unwrap();
    let text = serialize_document(&doc);
    let order: Vec<usize> = ["\"star\"", "\"f\"", "\"m\"", "\"s\""]
        .iter()
        .map(|n| text.find(&format!("\"name\": {n}")).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = parse_document("{\n  \"version\": 1,\n  oops\n}").unwrap_err();
    match err {
        DocError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 3)),
        other => panic!("{other}"),
    }
}

#[test]
fn dangling_references_are_named() {
    let text = star_doc("", r#"{"g": "ghost"}"#, TWO_S);
    match parse_document(&text).unwrap_err() {
        DocError::UnknownReference(name) => assert_eq!(name, "ghost"),
        other => panic!("{other}"),
    }
}

#[test]
fn ill_defined_diagrams_are_rejected() {
    let bad = r#"{"source": {"source": {"g": "star"}, "entries": [{"g": "f", "e": []}, {"g": "f", "e": []}]},
      "entries": [{"g": "m", "e": [2]}]}"#;
    let err = parse_document(&star_doc("", bad, TWO_S)).unwrap_err();
    assert!(matches!(err, DocError::IllDefinedDiagram { .. }), "{err}");
}

#[test]
fn wrong_version_is_rejected() {
    let text = MINIMAL.replace("\"version\": 1", "\"version\": 9");
    assert!(matches!(parse_document(&text), Err(DocError::Version(9))));
}

#[test]
fn zero_step_proof_succeeds() {
    let report = check_document(&parse_document(&star_doc("", TWO_S, TWO_S)).unwrap());
    assert!(report.ok());
    assert!(report.steps.is_empty());
}

#[test]
fn interchange_and_inverse_return_to_start() {
    let steps = r#"{"move": "homotopy", "kind": {"family": "I", "inverse": true}, "location": {"height": 0}},
                   {"move": "homotopy", "kind": {"family": "I"}, "location": {"height": 0}}"#;
    let report = check_document(&parse_document(&star_doc(steps, TWO_S, TWO_S)).unwrap());
    assert!(report.ok(), "{report}");
    assert_eq!(report.steps.iter().map(|s| s.height).collect::<Vec<_>>(), vec![2, 2]);
}

#[test]
fn interchange_swaps_the_two_cells() {
    let steps = r#"{"move": "homotopy", "kind": {"family": "I", "inverse": true}, "location": {"height": 0}}"#;
    let report = check_document(&parse_document(&star_doc(steps, TWO_S, TWO_S_SWAPPED)).unwrap());
    assert!(report.ok(), "{report}");
    // The other chirality does not apply here.
    let steps = r#"{"move": "homotopy", "kind": {"family": "I"}, "location": {"height": 0}}"#;
    let report = check_document(&parse_document(&star_doc(steps, TWO_S, TWO_S_SWAPPED)).unwrap());
    assert_eq!(report.failure.unwrap().index, 1);
}

#[test]
fn out_of_range_step_fails_at_its_index() {
    let steps = r#"{"move": "homotopy", "kind": {"family": "I", "inverse": true}, "location": {"height": 0}},
                   {"move": "homotopy", "kind": {"family": "I"}, "location": {"height": 7}}"#;
    let report = check_document(&parse_document(&star_doc(steps, TWO_S, TWO_S)).unwrap());
    assert!(!report.ok());
    assert_eq!(report.failure.as_ref().unwrap().index, 2);
    assert_eq!(report.steps.len(), 1);
    assert!(report_text(&report).ends_with("FAILED\n"));
}

#[test]
fn attaching_at_the_target_grows_the_height() {
    let mut st = star(3);
    let d = st.two(2, &[(&st.s, 0)]);
    let step = Step::Attach { g: st.m.clone(), side: strata::Side::Target, e: vec![0].into() };
    let next = checked_step(&mut st.sig, &d, &step).unwrap();
    assert_eq!(next.height(), d.height() + 1);
    assert_eq!(next.target(&st.sig).unwrap(), st.word(1));
}

#[test]
fn rewriting_backwards_needs_an_inverse() {
    let mut st = star(3);
    let d: Diagram = st.two(1, &[(&st.s, 0)]);
    let cell = st.sig.add_generator("z", 3, Some(d.clone()), Some(st.two(1, &[]))).unwrap();
    let empty = st.two(1, &[]);
    let back = Step::Attach { g: cell.clone(), side: strata::Side::Source, e: vec![0, 0].into() };
    assert!(apply_step(&mut st.sig, &empty, &back).is_err());
    st.sig.mark_invertible(&cell).unwrap();
    assert_eq!(apply_step(&mut st.sig, &empty, &back).unwrap(), d);
}

#[test]
fn invert_intro_needs_an_invertible_cell() {
    let mut st = star(3);
    let d = st.two(1, &[(&st.s, 0), (&st.s, 0)]);
    let step = Step::InvertIntro {
        cell: st.s.clone(),
        witness: strata::Witness::Unit,
        direction: strata::homotopy::Direction::Forward,
        e: vec![0, 0].into(),
    };
    let err = apply_step(&mut st.sig, &d, &step).unwrap_err();
    assert!(err.0.contains("not marked invertible"), "{}", err.0);
}

#[test]
fn replay_is_deterministic() {
    for (name, text, _) in corpus() {
        let a = check_document(&parse_document(&text).unwrap());
        let b = check_document(&parse_document(&text).unwrap());
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn intermediate_states_stay_globular() {
    for (name, text, _) in corpus() {
        let doc = parse_document(&text).unwrap();
        let proof = doc.proof.clone().unwrap();
        let mut sig = doc.signature.clone();
        let start = doc.diagrams[&proof.start].clone();
        let mut state = start.clone();
        for step in &proof.steps {
            state = checked_step(&mut sig, &state, step).unwrap();
            strata::diagram::well_defined(&sig, &state).unwrap();
            assert_eq!(state.source(), start.source(), "{name}");
        }
    }
}
