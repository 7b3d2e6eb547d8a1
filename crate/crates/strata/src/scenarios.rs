//! Random move instances built by construction: side-by-side stacks of
//! 2-cells, crossing blocks between them, and cells pulled through.

use crate::compose::compose;
use crate::diagram::{enumerate_embeddings, Diagram, Embedding, Entry};
use crate::homotopy::{apply_interchange, Chirality, MoveError, PullBlock, Sheet};
use crate::random::Fuzz;
use crate::signature::{GeneratorId, Signature};

/// Signature capacity needed by the higher moves over 3-diagrams.
pub const CAPACITY: usize = 6;

/// A 2-diagram whose entries `height..height+|lower|` form `lower` and the
/// next `|upper|` form `upper`, acting on disjoint parts of the slice.
#[derive(Debug, Clone)]
pub struct Stacks {
    pub x: Diagram,
    pub height: usize,
    pub lower: Diagram,
    pub upper: Diagram,
    pub chirality: Chirality,
}

/// `left ∘ mid ∘ right`: a 2-diagram whiskered by 1-diagrams on either side.
fn layer(sig: &Signature, left: Option<&Diagram>, mid: &Diagram, right: Option<&Diagram>) -> Option<Diagram> {
    let mut out = mid.clone();
    if let Some(r) = right {
        out = compose(sig, &out, r).ok()?;
    }
    if let Some(l) = left {
        out = compose(sig, l, &out).ok()?;
    }
    Some(out)
}

/// Concatenation of 1-diagrams, `None` when there are none.
fn concat(sig: &Signature, pieces: &[Diagram]) -> Option<Option<Diagram>> {
    let mut it = pieces.iter();
    let Some(first) = it.next() else { return Some(None) };
    let mut out = first.clone();
    for p in it {
        out = compose(sig, &out, p).ok()?;
    }
    Some(Some(out))
}

/// Splits `w` into `parts` consecutive pieces.
fn split(fz: &mut Fuzz, sig: &Signature, w: &Diagram, parts: usize) -> Vec<Diagram> {
    let n = w.height();
    let mut cuts: Vec<usize> = (0..parts - 1).map(|_| fz.below(n + 1)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut from = 0;
    for &c in cuts.iter().chain(std::iter::once(&n)) {
        let piece = Diagram::new(
            w.slice(sig, from).expect("in range"),
            w.entries()[from..c].to_vec(),
        );
        out.push(piece);
        from = c;
    }
    out
}

/// A 2-diagram with `1..=cap` entries over `w`.
fn stack_over(fz: &mut Fuzz, sig: &Signature, w: &Diagram, cap: usize) -> Option<Diagram> {
    for _ in 0..6 {
        let d = fz.extend_between(sig, w.clone(), 1, cap);
        if d.height() > 0 {
            return Some(d);
        }
    }
    None
}

/// A random 2-diagram made of a prefix, then stacks `a` and `b` side by
/// side (`a` left), composed in the order `chirality` asks for.
pub fn stacks(fz: &mut Fuzz, sig: &Signature, chirality: Chirality, cap: usize) -> Option<Stacks> {
    for _ in 0..10 {
        let w0 = fz.diagram(sig, 1);
        let p = fz.extend(sig, w0, 1);
        let w = p.target(sig).ok()?;
        let parts = split(fz, sig, &w, 2);
        let (Some(a), Some(b)) =
            (stack_over(fz, sig, &parts[0], cap), stack_over(fz, sig, &parts[1], cap))
        else {
            continue;
        };
        let (ta, tb) = (a.target(sig).ok()?, b.target(sig).ok()?);
        let (w1, w2) = (&parts[0], &parts[1]);
        let (first, second, lower, upper) = match chirality {
            // Upper stack to the right of the lower one.
            Chirality::RightDown => {
                (layer(sig, None, &a, Some(w2))?, layer(sig, Some(&ta), &b, None)?, a, b)
            }
            Chirality::LeftDown => {
                (layer(sig, Some(w1), &b, None)?, layer(sig, None, &a, Some(&tb))?, b, a)
            }
        };
        let x = compose(sig, &compose(sig, &p, &first).ok()?, &second).ok()?;
        return Some(Stacks { x, height: p.height(), lower, upper, chirality });
    }
    None
}

/// Applies atomic interchanges at `positions`, returning the crossing
/// entries and the final slice.
pub fn crossings(
    sig: &mut Signature,
    x: &Diagram,
    positions: &[usize],
    dir: Chirality,
) -> Result<(Vec<Entry>, Diagram), MoveError> {
    let mut cur = x.clone();
    let mut out = Vec::with_capacity(positions.len());
    for &i in positions {
        let (next, mi) = apply_interchange(sig, &cur, i, dir)?;
        out.push(Entry::new(mi.cell, mi.embedding));
        cur = next;
    }
    Ok((out, cur))
}

/// Swap positions that move an upper stack of `upper` entries down past
/// a lower stack of `lower` entries at `h`, in the order a pull on
/// `sheet` expects.
pub fn block_order(sheet: Sheet, h: usize, lower: usize, upper: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(lower * upper);
    match sheet {
        Sheet::Rear => {
            for t in 0..upper {
                for j in (0..lower).rev() {
                    out.push(h + t + j);
                }
            }
        }
        Sheet::Front => {
            for j in (0..lower).rev() {
                for t in 0..upper {
                    out.push(h + j + t);
                }
            }
        }
    }
    out
}

/// A name not yet used in `sig`.
fn fresh(sig: &Signature, prefix: &str) -> String {
    (sig.len()..).map(|i| format!("{prefix}{i}")).find(|n| !sig.contains(n)).expect("unbounded")
}

/// A diagram parallel to `s` with at least `min` entries, or `s` itself.
fn parallel_sized(fz: &mut Fuzz, sig: &Signature, s: &Diagram, min: usize, exact: Option<usize>) -> Diagram {
    for _ in 0..6 {
        let t = fz.parallel(sig, s);
        if t.height() >= min && exact.is_none_or(|n| t.height() == n) {
            return t;
        }
    }
    s.clone()
}

/// Adds a cell `s ⇒ t` for a random `t` parallel to `s`.
pub fn cell_on(fz: &mut Fuzz, sig: &mut Signature, s: &Diagram, min: usize, exact: Option<usize>) -> GeneratorId {
    let t = parallel_sized(fz, sig, s, min, exact);
    let dim = s.dim() + 1;
    sig.add_generator(fresh(sig, "c"), dim, Some(s.clone()), Some(t)).expect("parallel boundaries")
}

/// Where `s` sits in `y` with top height `at`.
fn locate(sig: &Signature, s: &Diagram, y: &Diagram, at: usize) -> Option<Embedding> {
    enumerate_embeddings(sig, s, y).ok()?.into_iter().find(|e| e.heights()[0] == at)
}

/// A 3-diagram: a crossing block between two stacks followed by a chain
/// of cells acting on the stack that moved on `sheet`.
#[derive(Debug, Clone)]
pub struct PullCase {
    pub d: Diagram,
    pub block: PullBlock,
    pub sheet: Sheet,
    pub chirality: Chirality,
    pub cells: Vec<GeneratorId>,
}

pub fn pull_case(
    fz: &mut Fuzz,
    sig: &mut Signature,
    sheet: Sheet,
    chirality: Chirality,
    stack_cap: usize,
    cells: usize,
    unary: bool,
) -> Option<PullCase> {
    let st = stacks(fz, sig, chirality, stack_cap)?;
    let (l, u) = (st.lower.height(), st.upper.height());
    let positions = block_order(sheet, st.height, l, u);
    let (mut entries, y) = crossings(sig, &st.x, &positions, chirality).ok()?;
    let (moving, at) = match sheet {
        Sheet::Rear => (&st.lower, st.height + u),
        Sheet::Front => (&st.upper, st.height),
    };
    let e = locate(sig, moving, &y, at)?;
    let mut src = moving.clone();
    let mut chain = Vec::with_capacity(cells);
    for _ in 0..cells {
        let exact = unary.then_some(1);
        let g = cell_on(fz, sig, &src, 1, exact);
        src = sig.boundaries(&g).ok()?.1.clone();
        entries.push(Entry::new(g.clone(), e.clone()));
        chain.push(g);
    }
    let d = Diagram::new(st.x.clone(), entries);
    let block = PullBlock { height: 0, cells, crossings: l * u };
    Some(PullCase { d, block, sheet, chirality, cells: chain })
}

/// Three single cells side by side, interchanged in the braid pattern.
pub fn braid(fz: &mut Fuzz, sig: &mut Signature, chirality: Chirality) -> Option<Diagram> {
    for _ in 0..10 {
        let w = fz.diagram(sig, 1);
        let parts = split(fz, sig, &w, 3);
        let mut cells = Vec::with_capacity(3);
        for p in &parts {
            cells.push(stack_over(fz, sig, p, 1));
        }
        let [Some(a), Some(b), Some(c)] = [cells[0].clone(), cells[1].clone(), cells[2].clone()] else { continue };
        let ts: Vec<Diagram> = [&a, &b, &c].iter().map(|d| d.target(sig).expect("well-defined")).collect();
        let order: [usize; 3] = match chirality {
            Chirality::RightDown => [0, 1, 2],
            Chirality::LeftDown => [2, 1, 0],
        };
        let mut done = [false; 3];
        let mut x: Option<Diagram> = None;
        for k in order {
            // Cell k sits between the pieces before and after it, each
            // already rewritten if its cell came earlier.
            let piece = |j: usize| if done[j] { ts[j].clone() } else { parts[j].clone() };
            let left: Vec<Diagram> = (0..k).map(piece).collect();
            let right: Vec<Diagram> = (k + 1..3).map(piece).collect();
            let (left, right) = (concat(sig, &left)?, concat(sig, &right)?);
            let l = layer(sig, left.as_ref(), [&a, &b, &c][k], right.as_ref())?;
            x = Some(match x {
                None => l,
                Some(prev) => compose(sig, &prev, &l).ok()?,
            });
            done[k] = true;
        }
        let x = x?;
        let (es, _) = crossings(sig, &x, &[1, 0, 1], chirality).ok()?;
        return Some(Diagram::new(x, es));
    }
    None
}

/// Base for a type V move: a crossing block, then a cell on the front
/// stack and one on the rear stack.
pub fn two_sheet_case(fz: &mut Fuzz, sig: &mut Signature, chirality: Chirality, cap: usize) -> Option<Diagram> {
    let st = stacks(fz, sig, chirality, cap)?;
    let (l, u) = (st.lower.height(), st.upper.height());
    let positions = block_order(Sheet::Rear, st.height, l, u);
    let (mut entries, y) = crossings(sig, &st.x, &positions, chirality).ok()?;
    let eb = locate(sig, &st.upper, &y, st.height)?;
    let beta = cell_on(fz, sig, &st.upper, 1, None);
    let (bs, bt) = sig.boundaries(&beta).ok()?;
    let y2 = crate::diagram::rewrite(sig, &y, &eb, bs, bt).ok()?;
    let bt_len = bt.height();
    entries.push(Entry::new(beta, eb));
    let ea = locate(sig, &st.lower, &y2, st.height + bt_len)?;
    let alpha = cell_on(fz, sig, &st.lower, 1, None);
    entries.push(Entry::new(alpha, ea));
    Some(Diagram::new(st.x, entries))
}

/// Base for type III: a pull case with a 4-cell `mu` from its cell chain
/// to a single parallel cell.
pub fn natural_case(
    fz: &mut Fuzz,
    sig: &mut Signature,
    sheet: Sheet,
    chirality: Chirality,
) -> Option<(Diagram, GeneratorId)> {
    let chain = 1 + fz.below(2);
    let case = pull_case(fz, sig, sheet, chirality, 2, chain, false)?;
    let first = sig.boundaries(&case.cells[0]).ok()?.0.clone();
    let last = sig.boundaries(case.cells.last()?).ok()?.1.clone();
    let beta = sig.add_generator(fresh(sig, "c"), 3, Some(first.clone()), Some(last)).ok()?;
    let e = Embedding::identity(2);
    let ms = Diagram::new(first.clone(), case.cells.iter().map(|g| Entry::new(g.clone(), e.clone())).collect());
    let mt = Diagram::new(first, vec![Entry::new(beta, e)]);
    let mu = sig.add_generator(fresh(sig, "mu"), 4, Some(ms), Some(mt)).ok()?;
    Some((case.d, mu))
}
