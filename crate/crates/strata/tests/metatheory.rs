use strata::metatheory::{composite_literal, run_all, PROPERTIES};
use strata::random::Fuzz;

#[test]
fn every_law_holds_on_random_instances() {
    let reports = run_all(7, 120);
    let mut bad = Vec::new();
    for r in &reports {
        println!("{:<55} {:>4} cases {:>3} failures {:?}", r.name, r.cases, r.failures.len(), r.elapsed);
        if let Some((i, msg)) = r.failures.first() {
            bad.push(format!("{} case {i}: {msg}", r.name));
        }
    }
    assert_eq!(reports.len(), PROPERTIES.len());
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn literal_composite_matches_heightwise_sum() {
    for seed in 0..300 {
        let mut fz = Fuzz::new(seed);
        let top = 1 + fz.below(3);
        let sig = fz.signature(top);
        let dim = 1 + fz.below(top);
        let a = fz.diagram(&sig, dim);
        let (d, f) = fz.sub_diagram(&sig, &a);
        let (s, e) = fz.sub_diagram(&sig, &d);
        let literal = composite_literal(&sig, &f, &a, &e, &d, &s).unwrap();
        assert_eq!(literal, e.then(&f).unwrap(), "seed {seed}");
    }
}
