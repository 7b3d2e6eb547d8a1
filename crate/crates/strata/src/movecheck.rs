//! Randomised checks of the homotopy moves: round trips of the atomic
//! families, agreement of composite moves with their expansions, and
//! well-formedness of the higher move boundaries.

use std::time::{Duration, Instant};

use crate::diagram::{globular, well_defined, well_defined_embedding, Diagram};
use crate::homotopy::{
    apply_block_interchange, apply_higher_move, apply_interchange, apply_pullthrough, expand_interchange,
    expand_pullthrough, higher_move_boundary, interchange_redexes, path_diagram, pull_stack_direct, pullthrough_variant, replay, Chirality,
    Direction, Family, HigherParams, InterchangeBlock, MoveInstance, MoveKind, MoveLocation, PullBlock, Sheet, Variant,
};
use crate::random::Fuzz;
use crate::scenarios::{self, CAPACITY};
use crate::signature::Signature;

pub type Outcome = Result<(), String>;

/// A check that may decline an instance (`None`) when the generator
/// could not build one.
pub struct MoveCheck {
    pub name: &'static str,
    pub check: fn(&mut Fuzz) -> Option<Outcome>,
}

pub const CHECKS: &[MoveCheck] = &[
    MoveCheck { name: "I round trip", check: interchange_round_trip },
    MoveCheck { name: "II front round trip", check: |fz| pull_round_trip(fz, Variant::Front) },
    MoveCheck { name: "II rear round trip", check: |fz| pull_round_trip(fz, Variant::Rear) },
    MoveCheck { name: "II' front round trip", check: |fz| pull_round_trip(fz, Variant::PrimedFront) },
    MoveCheck { name: "II' rear round trip", check: |fz| pull_round_trip(fz, Variant::PrimedRear) },
    MoveCheck { name: "composite I against expansion", check: block_interchange },
    MoveCheck { name: "composite II against expansion", check: block_pull },
    MoveCheck { name: "III boundaries", check: |fz| higher(fz, Family::III) },
    MoveCheck { name: "IV boundaries", check: |fz| higher(fz, Family::IV) },
    MoveCheck { name: "V boundaries", check: |fz| higher(fz, Family::V) },
    MoveCheck { name: "VI boundaries", check: |fz| higher(fz, Family::VI) },
];

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    /// Instances actually built and checked.
    pub cases: usize,
    pub attempts: usize,
    pub failures: Vec<(u64, String)>,
    pub elapsed: Duration,
}

/// Runs `c` until `cases` instances were checked or `20 * cases` seeds
/// were tried.
pub fn run_check(c: &MoveCheck, seed: u64, cases: usize) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport { name: c.name, cases: 0, attempts: 0, failures: Vec::new(), elapsed: Duration::ZERO };
    while report.cases < cases && report.attempts < 20 * cases.max(1) {
        let s = seed.wrapping_add(report.attempts as u64);
        report.attempts += 1;
        let mut fz = Fuzz::new(s);
        if let Some(outcome) = (c.check)(&mut fz) {
            report.cases += 1;
            if let Err(msg) = outcome {
                report.failures.push((s, msg));
            }
        }
    }
    report.elapsed = start.elapsed();
    report
}

pub fn run_checks(seed: u64, cases: usize) -> Vec<CheckReport> {
    CHECKS.iter().enumerate().map(|(k, c)| run_check(c, seed ^ ((k as u64 + 64) << 32), cases)).collect()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn pick_chirality(fz: &mut Fuzz) -> Chirality {
    if fz.coin(0.5) {
        Chirality::LeftDown
    } else {
        Chirality::RightDown
    }
}

/// The move cell's boundaries sit in `d` and rewrite it to `out`.
fn cell_accounts_for(sig: &Signature, d: &Diagram, out: &Diagram, mi: &MoveInstance) -> Outcome {
    let (cs, ct) = sig.boundaries(&mi.cell).map_err(err)?;
    ensure(well_defined_embedding(sig, &mi.embedding, cs, d).map_err(err)?, || "move cell source not embedded".into())?;
    let rewritten = crate::diagram::rewrite(sig, d, &mi.embedding, cs, ct).map_err(err)?;
    ensure(rewritten == *out, || "move cell does not rewrite to the result".into())
}

fn same_boundaries(sig: &Signature, a: &Diagram, b: &Diagram) -> Outcome {
    ensure(globular(sig, a, b).map_err(err)?, || "move changed the boundary".into())
}

fn interchange_round_trip(fz: &mut Fuzz) -> Option<Outcome> {
    let top = 2 + fz.below(2);
    let mut sig = fz.signature_in(top, CAPACITY);
    let (d, i, c) = if fz.coin(0.5) {
        let d = fz.diagram(&sig, top);
        let redexes = interchange_redexes(&sig, &d).ok()?;
        if redexes.is_empty() {
            return None;
        }
        let (i, c) = redexes[fz.below(redexes.len())];
        (d, i, c)
    } else {
        let c = pick_chirality(fz);
        let st = scenarios::stacks(fz, &sig, c, 2)?;
        (st.x, st.height + st.lower.height() - 1, c)
    };
    Some((|| {
        let (out, mi) = apply_interchange(&mut sig, &d, i, c).map_err(err)?;
        well_defined(&sig, &out).map_err(err)?;
        same_boundaries(&sig, &d, &out)?;
        cell_accounts_for(&sig, &d, &out, &mi)?;
        let (back, mi2) = apply_interchange(&mut sig, &out, i, c.flip()).map_err(err)?;
        ensure(back == d, || format!("inverse interchange at {i} does not restore the diagram"))?;
        ensure(sig.inverse(&mi.cell) == Some(&mi2.cell), || "inverse cells are not linked".into())
    })())
}

fn pull_round_trip(fz: &mut Fuzz, v: Variant) -> Option<Outcome> {
    let mut sig = fz.signature_in(2, CAPACITY);
    let chirality = Chirality::from_inverse(v.is_primed());
    let case = scenarios::pull_case(fz, &mut sig, v.sheet(), chirality, 1, 1, false)?;
    let d = case.d;
    Some((|| {
        let found = pullthrough_variant(&sig, &d, 0, Direction::Forward).map_err(err)?;
        ensure(found == v, || format!("built {v} but recognised {found}"))?;
        let (out, mi) = apply_pullthrough(&mut sig, &d, 0, v, Direction::Forward).map_err(err)?;
        well_defined(&sig, &out).map_err(err)?;
        same_boundaries(&sig, &d, &out)?;
        cell_accounts_for(&sig, &d, &out, &mi)?;
        let (back, mi2) = apply_pullthrough(&mut sig, &out, 0, v, Direction::Backward).map_err(err)?;
        ensure(back == d, || "backward pull does not restore the diagram".into())?;
        ensure(sig.inverse(&mi.cell) == Some(&mi2.cell), || "inverse cells are not linked".into())
    })())
}

fn block_interchange(fz: &mut Fuzz) -> Option<Outcome> {
    let mut sig = fz.signature_in(2, CAPACITY);
    let c = pick_chirality(fz);
    let st = scenarios::stacks(fz, &sig, c, 3)?;
    let (lower, upper) = (st.lower.height(), st.upper.height());
    if lower + upper < 3 {
        return None;
    }
    let b = InterchangeBlock { height: st.height, lower, upper };
    let x = st.x;
    Some((|| {
        let (direct, mi) = apply_block_interchange(&mut sig, &x, b).map_err(err)?;
        well_defined(&sig, &direct).map_err(err)?;
        cell_accounts_for(&sig, &x, &direct, &mi)?;
        let exp = expand_interchange(&mut sig, &x, b).map_err(err)?;
        ensure(exp.moves.len() == lower * upper, || format!("{} atomic moves for a {lower}x{upper} block", exp.moves.len()))?;
        ensure(exp.result == direct, || "expansion result differs from the direct move".into())?;
        ensure(replay(&sig, &x, &exp.moves).map_err(err)? == direct, || "replayed expansion differs".into())?;
        let path = path_diagram(&x, &exp.moves);
        well_defined(&sig, &path).map_err(err)?;
        ensure(path.target(&sig).map_err(err)? == direct, || "path diagram ends elsewhere".into())
    })())
}

fn block_pull(fz: &mut Fuzz) -> Option<Outcome> {
    let mut sig = fz.signature_in(2, CAPACITY);
    let c = pick_chirality(fz);
    let sheet = if fz.coin(0.5) { Sheet::Front } else { Sheet::Rear };
    let stack_cap = 2 + fz.below(2);
    let cells = 1 + fz.below(2);
    let case = scenarios::pull_case(fz, &mut sig, sheet, c, stack_cap, cells, false)?;
    if case.block.crossings * cells < 2 {
        return None;
    }
    let d = case.d;
    let block = case.block;
    Some((|| {
        let (direct, mi) = pull_stack_direct(&mut sig, &d, block, Direction::Forward).map_err(err)?;
        well_defined(&sig, &direct).map_err(err)?;
        same_boundaries(&sig, &d, &direct)?;
        cell_accounts_for(&sig, &d, &direct, &mi)?;
        let exp = expand_pullthrough(&mut sig, &d, block, Direction::Forward).map_err(err)?;
        ensure(exp.result == direct, || "expansion result differs from the direct move".into())?;
        ensure(replay(&sig, &d, &exp.moves).map_err(err)? == direct, || "replayed expansion differs".into())?;

        // Going back, the crossings are those of the last cell's target.
        let last = case.cells.last().expect("at least one cell");
        let moved = sig.boundaries(&case.cells[0]).map_err(err)?.0.height();
        let wires = block.crossings / moved;
        let back_block = PullBlock { height: 0, cells, crossings: sig.boundaries(last).map_err(err)?.1.height() * wires };
        let (back, _) = pull_stack_direct(&mut sig, &direct, back_block, Direction::Backward).map_err(err)?;
        ensure(back == d, || "backward composite pull does not restore the diagram".into())?;
        let exp_back = expand_pullthrough(&mut sig, &direct, back_block, Direction::Backward).map_err(err)?;
        ensure(exp_back.result == d, || "backward expansion does not restore the diagram".into())?;
        ensure(replay(&sig, &direct, &exp_back.moves).map_err(err)? == d, || "backward replay differs".into())
    })())
}

fn higher(fz: &mut Fuzz, family: Family) -> Option<Outcome> {
    let mut sig = fz.signature_in(2, CAPACITY);
    let c = pick_chirality(fz);
    let sheet = if fz.coin(0.5) { Sheet::Front } else { Sheet::Rear };
    let (base, mu) = match family {
        Family::III => {
            let (d, mu) = scenarios::natural_case(fz, &mut sig, sheet, c)?;
            (d, Some(mu))
        }
        Family::IV => (scenarios::braid(fz, &mut sig, c)?, None),
        Family::V => (scenarios::two_sheet_case(fz, &mut sig, c, 2)?, None),
        Family::VI => (scenarios::pull_case(fz, &mut sig, sheet, c, 1, 1, true)?.d, None),
        Family::I | Family::II => return None,
    };
    let kind = MoveKind::new(family).primed(c == Chirality::RightDown);
    Some((|| {
        well_defined(&sig, &base).map_err(err)?;
        let params = HigherParams { base: base.clone(), anchor: 0, mu: mu.clone() };
        let (s, t) = higher_move_boundary(&mut sig, kind, &params).map_err(err)?;
        well_defined(&sig, &s).map_err(err)?;
        well_defined(&sig, &t).map_err(err)?;
        ensure(globular(&sig, &s, &t).map_err(err)?, || format!("{} boundaries are not globular", kind.label()))?;
        ensure(s != t, || "source and target coincide".into())?;

        // Inside a 4-diagram the move applies and undoes itself.
        let d4 = Diagram::new(base.clone(), s.entries().to_vec());
        let loc = MoveLocation { height: 0, coords: vec![0] };
        let (out, mi) = apply_higher_move(&mut sig, &d4, &loc, kind, Direction::Forward, mu.as_ref()).map_err(err)?;
        ensure(out.entries() == t.entries(), || "applied move does not produce the target path".into())?;
        cell_accounts_for(&sig, &d4, &out, &mi)?;
        let (back, _) = apply_higher_move(&mut sig, &out, &loc, kind, Direction::Backward, mu.as_ref()).map_err(err)?;
        ensure(back == d4, || "backward move does not restore the diagram".into())
    })())
}
