//! Type-II moves: pulling a stack of cells through a crossing block.

use serde::{Deserialize, Serialize};

use super::interchange::{growth, planned_crossings, plans_match, BlockOrder, InterchangeBlock};
use super::{
    crossing_of, register_move_cell, require_dim, sizes, synthesize, Chirality, Composite, Direction, Expansion,
    Family, MoveError, MoveInstance, MoveKind, MoveLocation, Plan, Sheet, Variant,
};
use crate::diagram::{rewrite, well_defined_embedding, Diagram, Embedding, Entry};
use crate::signature::Signature;

/// `cells` stacked cells next to a block of `crossings` crossing entries.
/// Forward, the block comes first, starting at `height`; backward, the
/// cells do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PullBlock {
    pub height: usize,
    pub cells: usize,
    pub crossings: usize,
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    h: usize,
    dir: Chirality,
    sheet: Sheet,
}

impl Shape {
    fn order(&self) -> BlockOrder {
        match self.sheet {
            Sheet::Rear => BlockOrder::ByUpper,
            Sheet::Front => BlockOrder::ByLower,
        }
    }

    /// The block swapping a stack of `stack` entries with `wires` entries.
    fn block(&self, stack: usize, wires: usize) -> InterchangeBlock {
        match self.sheet {
            Sheet::Rear => InterchangeBlock { height: self.h, lower: stack, upper: wires },
            Sheet::Front => InterchangeBlock { height: self.h, lower: wires, upper: stack },
        }
    }

    /// Range of the wires in the slice before the block, where the stack
    /// has `stack` entries.
    fn wire_range(&self, stack: usize, wires: usize) -> (usize, usize) {
        let start = match self.sheet {
            Sheet::Rear => self.h + stack,
            Sheet::Front => self.h,
        };
        (start, start + wires)
    }
}

fn not_redex(at: usize) -> impl Fn(MoveError) -> MoveError {
    move |e| match e {
        MoveError::Internal(_) | MoveError::Signature(_) => e,
        _ => MoveError::NotARedex(at),
    }
}

/// Identifies the crossing block `entries`, applied to slice `x`, as a
/// stack of `stack` entries crossing `wires` others. `stack_pos` is where
/// the stack sits on the cells' side of the block.
#[allow(clippy::too_many_arguments)]
fn recognize(
    sig: &Signature,
    x: &Diagram,
    entries: &[Entry],
    stack: usize,
    wires: usize,
    stack_pos: usize,
    cells_after: bool,
    at: usize,
) -> Result<Shape, MoveError> {
    let mut dir = None;
    for e in entries {
        let c = crossing_of(sig, &e.generator).ok_or(MoveError::NotARedex(at))?;
        if dir.replace(c).is_some_and(|d| d != c) {
            return Err(MoveError::NotARedex(at));
        }
    }
    let dir = dir.ok_or(MoveError::NotARedex(at))?;
    let positions: Vec<usize> = entries.iter().map(Entry::height).collect();
    for sheet in [Sheet::Rear, Sheet::Front] {
        let (lead, order) = match sheet {
            Sheet::Rear => (stack - 1, BlockOrder::ByUpper),
            Sheet::Front => (wires - 1, BlockOrder::ByLower),
        };
        let Some(h) = positions[0].checked_sub(lead) else { continue };
        let shape = Shape { h, dir, sheet };
        let expected_pos = match (sheet, cells_after) {
            (Sheet::Rear, true) | (Sheet::Front, false) => h + wires,
            _ => h,
        };
        if stack_pos != expected_pos {
            continue;
        }
        let b = shape.block(stack, wires);
        if super::interchange::block_positions(order, b.height, b.lower, b.upper) != positions {
            continue;
        }
        let (plans, _) = planned_crossings(sig, x, b, order, dir).map_err(not_redex(at))?;
        if plans_match(&plans, entries) {
            return Ok(shape);
        }
    }
    Err(MoveError::NotARedex(at))
}

fn shift_embedding(e: &Embedding, d0: isize, d1: isize) -> Result<Embedding, MoveError> {
    let mut h = e.heights().to_vec();
    for (idx, d) in [(0, d0), (1, d1)] {
        let v = h[idx] as isize + d;
        if v < 0 {
            return Err(MoveError::Internal("negative height after shift".into()));
        }
        h[idx] = v as usize;
    }
    Ok(Embedding::new(h))
}

fn register_plans(sig: &mut Signature, plans: Vec<Plan>, dir: Chirality) -> Result<Vec<Entry>, MoveError> {
    let kind = MoveKind::new(Family::I).inverse(dir.is_inverse());
    let mut out = Vec::with_capacity(plans.len());
    for p in plans {
        let cell = register_move_cell(sig, kind, "", p.source, p.target)?;
        out.push(Entry::new(cell, p.embedding));
    }
    Ok(out)
}

/// Applies `cells` to `x` in turn, checking each embedding.
fn run_cells(sig: &Signature, x: &Diagram, cells: &[Entry], at: usize) -> Result<Diagram, MoveError> {
    let mut cur = x.clone();
    for c in cells {
        let (s, t) = sig.boundaries(&c.generator)?;
        if !well_defined_embedding(sig, &c.embedding, s, &cur)? {
            return Err(MoveError::NotARedex(at));
        }
        cur = rewrite(sig, &cur, &c.embedding, s, t).map_err(|_| MoveError::NotARedex(at))?;
    }
    Ok(cur)
}

fn check_chain(sig: &Signature, cells: &[Entry], at: usize) -> Result<(), MoveError> {
    let mut prev_t = None;
    let mut pos = None;
    for c in cells {
        if sig.dim_of(&c.generator) != Some(c.embedding.dim() + 1) {
            return Err(MoveError::NotARedex(at));
        }
        let (s, t) = sizes(sig, &c.generator)?;
        if s == 0 || t == 0 {
            return Err(MoveError::NotARedex(at));
        }
        if prev_t.is_some_and(|p| p != s) || pos.replace(c.height()).is_some_and(|p| p != c.height()) {
            return Err(MoveError::NotARedex(at));
        }
        prev_t = Some(t);
    }
    Ok(())
}

struct Pulled {
    result: Diagram,
    n_src: usize,
    n_tgt: usize,
    wires: usize,
    shape: Shape,
}

/// Pulls `cells` cells through `crossings` crossing entries starting at
/// `lo`, as a single step.
fn pull(
    sig: &mut Signature,
    d: &Diagram,
    lo: usize,
    cells: usize,
    crossings: usize,
    direction: Direction,
) -> Result<Pulled, MoveError> {
    require_dim(d, 3)?;
    if cells == 0 || crossings == 0 || lo + cells + crossings > d.height() {
        return Err(MoveError::NotARedex(lo));
    }
    let es = d.entries();
    let backward = direction.is_backward();
    let (block_at, cells_at) = if backward { (lo + cells, lo) } else { (lo, lo + crossings) };
    let block = &es[block_at..block_at + crossings];
    let chain = &es[cells_at..cells_at + cells];
    check_chain(sig, chain, lo)?;
    let near = if backward { &chain[cells - 1] } else { &chain[0] };
    let (ns, nt) = sizes(sig, &near.generator)?;
    let stack = if backward { nt } else { ns };
    if !crossings.is_multiple_of(stack) {
        return Err(MoveError::NotARedex(lo));
    }
    let wires = crossings / stack;
    let x = d.slice(sig, block_at)?;
    let shape = recognize(sig, &x, block, stack, wires, near.height(), !backward, lo)?;
    let (ws, we) = shape.wire_range(stack, wires);
    let delta = growth(sig, &x.entries()[ws..we])?;
    let (mut d0, mut d1) = match (shape.sheet, shape.dir) {
        (Sheet::Rear, Chirality::LeftDown) => (-(wires as isize), -delta),
        (Sheet::Rear, Chirality::RightDown) => (-(wires as isize), 0),
        (Sheet::Front, Chirality::RightDown) => (wires as isize, delta),
        (Sheet::Front, Chirality::LeftDown) => (wires as isize, 0),
    };
    if backward {
        d0 = -d0;
        d1 = -d1;
    }
    let moved: Vec<Entry> = chain
        .iter()
        .map(|c| Ok(Entry::new(c.generator.clone(), shift_embedding(&c.embedding, d0, d1)?)))
        .collect::<Result<_, MoveError>>()?;
    let end = d.slice(sig, lo + cells + crossings)?;
    let start = d.slice(sig, lo)?;
    let mut entries = es[..lo].to_vec();
    let n_tgt;
    if backward {
        let (fs, _) = sizes(sig, &chain[0].generator)?;
        let b = shape.block(fs, wires);
        let (plans, y) = planned_crossings(sig, &start, b, shape.order(), shape.dir).map_err(not_redex(lo))?;
        if run_cells(sig, &y, &moved, lo)? != end {
            return Err(MoveError::NotARedex(lo));
        }
        n_tgt = plans.len() + cells;
        entries.extend(register_plans(sig, plans, shape.dir)?);
        entries.extend(moved);
    } else {
        let y = run_cells(sig, &start, &moved, lo)?;
        let (_, lt) = sizes(sig, &chain[cells - 1].generator)?;
        let b = shape.block(lt, wires);
        let (plans, z) = planned_crossings(sig, &y, b, shape.order(), shape.dir).map_err(not_redex(lo))?;
        if z != end {
            return Err(MoveError::NotARedex(lo));
        }
        n_tgt = cells + plans.len();
        entries.extend(moved);
        entries.extend(register_plans(sig, plans, shape.dir)?);
    }
    entries.extend_from_slice(&es[lo + cells + crossings..]);
    let result = Diagram::new(d.source().expect("dim >= 3").clone(), entries);
    Ok(Pulled { result, n_src: cells + crossings, n_tgt, wires, shape })
}

fn sheet_key(sheet: Sheet) -> &'static str {
    match sheet {
        Sheet::Front => "front",
        Sheet::Rear => "rear",
    }
}

fn finish(
    sig: &mut Signature,
    d: &Diagram,
    lo: usize,
    p: Pulled,
    direction: Direction,
    composite: Composite,
    coords: Vec<usize>,
) -> Result<(Diagram, MoveInstance), MoveError> {
    let kind = MoveKind::new(Family::II)
        .primed(p.shape.dir.is_inverse())
        .inverse(direction.is_backward())
        .composite(composite);
    let loc = MoveLocation { height: lo, coords };
    let mi = synthesize(sig, d, &p.result, lo, p.n_src, p.n_tgt, kind, sheet_key(p.shape.sheet), loc)?;
    Ok((p.result, mi))
}

/// Candidate numbers of crossing entries for an atomic pull at `i`.
fn atomic_spans(sig: &Signature, d: &Diagram, i: usize, direction: Direction) -> Result<Vec<usize>, MoveError> {
    let g = |j: usize| d.generator_at(j).ok_or(MoveError::NotARedex(i));
    if direction.is_backward() {
        return Ok(vec![sizes(sig, g(i)?)?.1]);
    }
    let mut out = Vec::new();
    let mut n = 1;
    while i + n < d.height() && crossing_of(sig, g(i + n - 1)?).is_some() {
        if sizes(sig, g(i + n)?)?.0 == n {
            out.push(n);
        }
        n += 1;
    }
    Ok(out)
}

/// Pulls the single cell at or after `i` through one wire.
fn pull_atomic(sig: &mut Signature, d: &Diagram, i: usize, direction: Direction) -> Result<Pulled, MoveError> {
    require_dim(d, 3)?;
    let mut last = MoveError::NotARedex(i);
    for span in atomic_spans(sig, d, i, direction)? {
        match pull(sig, d, i, 1, span, direction) {
            Ok(p) if p.wires == 1 => return Ok(p),
            Ok(_) => {}
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Atomic pull-through of one cell past one crossing wire. Forward, `i` is
/// the first crossing entry and the cell follows the crossings; backward,
/// `i` is the cell.
pub fn apply_pullthrough(
    sig: &mut Signature,
    d: &Diagram,
    i: usize,
    variant: Variant,
    direction: Direction,
) -> Result<(Diagram, MoveInstance), MoveError> {
    let found = pullthrough_variant(sig, d, i, direction)?;
    if found != variant {
        return Err(MoveError::VariantMismatch { requested: variant.to_string(), found: found.to_string() });
    }
    let p = pull_atomic(sig, d, i, direction)?;
    finish(sig, d, i, p, direction, Composite::Atomic, Vec::new())
}

/// The variant an atomic pull at `i` would have, if any. Leaves `sig`
/// untouched.
pub fn pullthrough_variant(sig: &Signature, d: &Diagram, i: usize, direction: Direction) -> Result<Variant, MoveError> {
    let mut probe = sig.clone();
    let p = pull_atomic(&mut probe, d, i, direction)?;
    Ok(Variant::new(p.shape.sheet, p.shape.dir.is_inverse()))
}

/// The composite pull applied directly as a single cell.
pub fn pull_stack_direct(
    sig: &mut Signature,
    d: &Diagram,
    block: PullBlock,
    direction: Direction,
) -> Result<(Diagram, MoveInstance), MoveError> {
    let p = pull(sig, d, block.height, block.cells, block.crossings, direction).map_err(as_block)?;
    let atomic = block.cells == 1 && p.wires == 1;
    let (composite, coords) =
        if atomic { (Composite::Atomic, Vec::new()) } else { (Composite::Tilde, vec![block.cells, block.crossings]) };
    finish(sig, d, block.height, p, direction, composite, coords)
}

fn as_block(e: MoveError) -> MoveError {
    match e {
        MoveError::NotARedex(_) => MoveError::NotABlock("cells and crossings do not form a pull-through".into()),
        other => other,
    }
}

/// Decomposes a composite pull into atomic ones: each cell in turn is
/// pulled past one crossing wire at a time.
pub fn expand_pullthrough(
    sig: &mut Signature,
    d: &Diagram,
    block: PullBlock,
    direction: Direction,
) -> Result<Expansion, MoveError> {
    require_dim(d, 3)?;
    let PullBlock { height, cells, crossings } = block;
    if cells == 0 || crossings == 0 || height + cells + crossings > d.height() {
        return Err(MoveError::NotABlock("block exceeds diagram".into()));
    }
    let size_at = |sig: &Signature, d: &Diagram, i: usize| -> Result<(usize, usize), MoveError> {
        let g = d.generator_at(i).ok_or(MoveError::NotABlock("missing cell".into()))?;
        sizes(sig, g)
    };
    let near = if direction.is_backward() { height + cells - 1 } else { height + crossings };
    let (ns, nt) = size_at(sig, d, near)?;
    let stack = if direction.is_backward() { nt } else { ns };
    if stack == 0 || crossings % stack != 0 {
        return Err(MoveError::NotABlock("crossings do not divide into wires".into()));
    }
    let wires = crossings / stack;
    let mut cur = d.clone();
    let mut moves = Vec::with_capacity(cells * wires);
    let mut step = |sig: &mut Signature, cur: &mut Diagram, at: usize| -> Result<(), MoveError> {
        let p = pull_atomic(sig, cur, at, direction).map_err(as_block)?;
        let (next, mi) = finish(sig, cur, at, p, direction, Composite::Atomic, Vec::new())?;
        moves.push(mi);
        *cur = next;
        Ok(())
    };
    match direction {
        Direction::Forward => {
            let mut q = height + crossings;
            for n in 0..cells {
                let (s, t) = size_at(sig, &cur, q)?;
                for _ in 0..wires {
                    q -= s;
                    step(sig, &mut cur, q)?;
                }
                q = height + n + 1 + t * wires;
            }
        }
        Direction::Backward => {
            for n in (0..cells).rev() {
                let mut q = height + n;
                let (s, _) = size_at(sig, &cur, q)?;
                for _ in 0..wires {
                    step(sig, &mut cur, q)?;
                    q += s;
                }
            }
        }
    }
    Ok(Expansion { moves, result: cur })
}
