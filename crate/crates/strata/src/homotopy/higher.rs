//! Types III to VI: cells between two composite paths of lower moves.
//!
//! Each move is given by a base diagram `Y` and an anchor height in it. The
//! two paths are built with the kernel's own moves and must end at the same
//! diagram; the move's boundaries are the path diagrams `<Y; path>`.

use super::interchange::{rearrange_to, BlockOrder};
use super::pullthrough::{expand_pullthrough, PullBlock};
use super::{
    apply_interchange, crossing_of, interchange_redexes, require_dim, sizes, synthesize, Chirality, Direction,
    Family, MoveError, MoveInstance, MoveKind, MoveLocation, Variant,
};
use crate::diagram::{
    enumerate_embeddings, globular, rewrite, splice, well_defined, well_defined_embedding, Diagram, Embedding,
    Entry,
};
use crate::signature::{GeneratorId, Signature, Witness};

/// Where a higher move sits: the base diagram, the anchor height in it, and
/// for type III the cell `mu` the square is natural in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HigherParams {
    pub base: Diagram,
    pub anchor: usize,
    pub mu: Option<GeneratorId>,
}

struct Path {
    entries: Vec<Entry>,
    end: Diagram,
    chirality: Chirality,
}

impl Path {
    fn new(base: &Diagram, chirality: Chirality) -> Self {
        Path { entries: Vec::new(), end: base.clone(), chirality }
    }

    fn push_moves(&mut self, moves: Vec<MoveInstance>, result: Diagram) {
        self.entries.extend(moves.into_iter().map(|m| Entry::new(m.cell, m.embedding)));
        self.end = result;
    }

    fn push_cell(&mut self, sig: &Signature, cell: &GeneratorId, e: Embedding) -> Result<(), MoveError> {
        let (s, t) = sig.boundaries(cell)?;
        if !well_defined_embedding(sig, &e, s, &self.end)? {
            return Err(MoveError::Internal(format!("{cell} does not fit the path")));
        }
        self.end = rewrite(sig, &self.end, &e, s, t)?;
        self.entries.push(Entry::new(cell.clone(), e));
        Ok(())
    }

    fn pull(&mut self, sig: &mut Signature, block: PullBlock, dir: Direction) -> Result<(), MoveError> {
        let ex = expand_pullthrough(sig, &self.end, block, dir)?;
        self.push_moves(ex.moves, ex.result);
        Ok(())
    }

    fn rearrange(&mut self, sig: &mut Signature, span: (usize, usize), order: BlockOrder) -> Result<(), MoveError> {
        let ex = rearrange_to(sig, &self.end, span, order)?;
        self.push_moves(ex.moves, ex.result);
        Ok(())
    }

    fn swap(&mut self, sig: &mut Signature, i: usize) -> Result<(), MoveError> {
        let dirs: Vec<Chirality> =
            interchange_redexes(sig, &self.end)?.into_iter().filter(|(j, _)| *j == i).map(|(_, c)| c).collect();
        let dir = *dirs.first().ok_or_else(|| MoveError::MalformedParams(format!("no interchange at {i}")))?;
        let (next, mi) = apply_interchange(sig, &self.end, i, dir)?;
        self.push_moves(vec![mi], next);
        Ok(())
    }
}

fn malformed(msg: impl Into<String>) -> MoveError {
    MoveError::MalformedParams(msg.into())
}

fn entry_at(y: &Diagram, i: usize) -> Result<&Entry, MoveError> {
    y.entries().get(i).ok_or_else(|| malformed(format!("no entry at height {i}")))
}

fn crossing_at(sig: &Signature, y: &Diagram, i: usize) -> Result<Chirality, MoveError> {
    crossing_of(sig, &entry_at(y, i)?.generator).ok_or_else(|| malformed(format!("entry {i} is not a crossing")))
}

/// Chirality of the crossings in `y[from..to)`, which must agree.
fn block_dir(sig: &Signature, y: &Diagram, from: usize, to: usize) -> Result<Chirality, MoveError> {
    let c = crossing_at(sig, y, from)?;
    for i in from + 1..to {
        if crossing_at(sig, y, i)? != c {
            return Err(malformed("crossings of mixed chirality"));
        }
    }
    Ok(c)
}

/// Cells after a crossing run starting at `q`, pulled through it as `mu`'s
/// source.
fn type_iii(sig: &mut Signature, p: &HigherParams) -> Result<(Path, Path), MoveError> {
    let y = &p.base;
    let q = p.anchor;
    let mu = p.mu.as_ref().ok_or_else(|| malformed("type III needs a cell mu"))?;
    if sig.dim_of(mu) != Some(y.dim() + 1) {
        return Err(malformed(format!("{mu} must have dimension {}", y.dim() + 1)));
    }
    let (ms, mt) = sig.boundaries(mu)?;
    let (ms, mt) = (ms.clone(), mt.clone());
    if ms.height() == 0 || mt.height() == 0 {
        return Err(malformed("mu must have non-empty source and target"));
    }
    let mut found = None;
    for e in enumerate_embeddings(sig, &ms, y)? {
        let h = e.heights()[0];
        let earlier = found.as_ref().is_none_or(|f: &Embedding| h < f.heights()[0]);
        if earlier && h > q && (q..h).all(|i| crossing_of(sig, &y.entries()[i].generator).is_some()) {
            found = Some(e);
        }
    }
    let e = found.ok_or_else(|| malformed("mu's source does not follow a crossing block at the anchor"))?;
    let crossings = e.heights()[0] - q;
    let dir = block_dir(sig, y, q, q + crossings)?;

    let mut p1 = Path::new(y, dir);
    p1.pull(sig, PullBlock { height: q, cells: ms.height(), crossings }, Direction::Forward)?;
    let first = &p1.end.entries()[q];
    let rest = first
        .embedding
        .checked_sub(&ms.entries()[0].embedding)
        .ok_or_else(|| MoveError::Internal("pulled source lost its position".into()))?;
    p1.push_cell(sig, mu, Embedding::cons(q, &rest))?;

    let mut p2 = Path::new(y, dir);
    p2.push_cell(sig, mu, e)?;
    p2.pull(sig, PullBlock { height: q, cells: mt.height(), crossings }, Direction::Forward)?;
    Ok((p1, p2))
}

/// Three crossings `y[q..q+3)` in the braid pattern `h+1, h, h+1`.
fn type_iv(sig: &mut Signature, p: &HigherParams) -> Result<(Path, Path), MoveError> {
    let y = &p.base;
    let q = p.anchor;
    let dir = block_dir(sig, y, q, q + 3)?;
    let hs: Vec<usize> = (q..q + 3).map(|i| y.entries()[i].height()).collect();
    if hs[0] != hs[2] || hs[1] + 1 != hs[0] {
        return Err(malformed("crossings do not form a braid triangle"));
    }
    let mut p1 = Path::new(y, dir);
    let (r1, m1) = super::apply_pullthrough(sig, y, q, Variant::new(super::Sheet::Rear, dir.is_inverse()), Direction::Forward)?;
    p1.push_moves(vec![m1], r1);
    let mut p2 = Path::new(y, dir);
    let (r2, m2) =
        super::apply_pullthrough(sig, y, q, Variant::new(super::Sheet::Front, dir.is_inverse()), Direction::Backward)?;
    p2.push_moves(vec![m2], r2);
    Ok((p1, p2))
}

/// A crossing block at `q` followed by a cell on the front sheet and one on
/// the rear sheet.
fn type_v(sig: &mut Signature, p: &HigherParams) -> Result<(Path, Path), MoveError> {
    let y = &p.base;
    let q = p.anchor;
    require_dim(y, 3)?;
    let mut m = 0;
    while q + m < y.height() && crossing_of(sig, &y.entries()[q + m].generator).is_some() {
        m += 1;
    }
    if m == 0 || q + m + 2 > y.height() {
        return Err(malformed("expected crossings followed by two cells"));
    }
    let dir = block_dir(sig, y, q, q + m)?;
    let (bs, bt) = sizes(sig, &y.entries()[q + m].generator)?;
    let (as_, at) = sizes(sig, &y.entries()[q + m + 1].generator)?;
    if bs == 0 || as_ == 0 || m % bs != 0 || m / bs != as_ {
        return Err(malformed("cells do not match the crossing block"));
    }

    let mut p1 = Path::new(y, dir);
    p1.rearrange(sig, (q, m), BlockOrder::ByLower)?;
    p1.pull(sig, PullBlock { height: q, cells: 1, crossings: m }, Direction::Forward)?;
    p1.rearrange(sig, (q + 1, as_ * bt), BlockOrder::ByUpper)?;
    p1.pull(sig, PullBlock { height: q + 1, cells: 1, crossings: as_ * bt }, Direction::Forward)?;
    p1.swap(sig, q)?;

    let mut p2 = Path::new(y, dir);
    p2.swap(sig, q + m)?;
    p2.pull(sig, PullBlock { height: q, cells: 1, crossings: m }, Direction::Forward)?;
    p2.rearrange(sig, (q + 1, at * bs), BlockOrder::ByLower)?;
    p2.pull(sig, PullBlock { height: q + 1, cells: 1, crossings: at * bs }, Direction::Forward)?;
    p2.rearrange(sig, (q + 2, at * bt), BlockOrder::ByUpper)?;
    Ok((p1, p2))
}

/// A single crossing `c = y[q]` followed by a cell pulled through it,
/// against the same pull done across an inserted `c' c'^-1` pair.
fn type_vi(sig: &mut Signature, p: &HigherParams) -> Result<(Path, Path), MoveError> {
    let y = &p.base;
    let q = p.anchor;
    let dir = crossing_at(sig, y, q)?;
    let alpha = entry_at(y, q + 1)?;
    if sizes(sig, &alpha.generator)? != (1, 1) {
        return Err(malformed("type VI needs a cell with one input and one output"));
    }
    let c = entry_at(y, q)?.clone();
    let crossing = PullBlock { height: q, cells: 1, crossings: 1 };

    let mut p1 = Path::new(y, dir);
    p1.pull(sig, crossing, Direction::Forward)?;
    let unit = sig.witness(&c.generator, Witness::Unit)?;
    let unit_inv = sig.mark_invertible(&unit)?.inverse;
    p1.push_cell(sig, &unit_inv, Embedding::cons(q, &c.embedding))?;

    let pulled = p1.entries.first().map(|e| e.generator.clone()).ok_or(MoveError::Internal("empty pull".into()))?;
    let after = {
        let (s, t) = sig.boundaries(&pulled)?;
        splice(y, &p1.entries[0].embedding, s, t)?
    };
    let c2 = entry_at(&after, q + 1)?.clone();
    let mut p2 = Path::new(y, dir);
    sig.mark_invertible(&c2.generator)?;
    let counit = sig.witness(&c2.generator, Witness::Counit)?;
    p2.push_cell(sig, &counit, Embedding::cons(q + 2, &c2.embedding))?;
    p2.pull(sig, PullBlock { height: q + 1, cells: 1, crossings: 1 }, Direction::Backward)?;
    Ok((p1, p2))
}

fn paths(sig: &mut Signature, kind: MoveKind, p: &HigherParams) -> Result<(Path, Path), MoveError> {
    require_dim(&p.base, 3)?;
    let needed = p.base.dim() + 2;
    if needed > sig.top_dim() {
        return Err(MoveError::AboveTopDimension { needed, top: sig.top_dim() });
    }
    let (p1, p2) = match kind.family {
        Family::III => type_iii(sig, p)?,
        Family::IV => type_iv(sig, p)?,
        Family::V => type_v(sig, p)?,
        Family::VI => type_vi(sig, p)?,
        Family::I | Family::II => return Err(malformed(format!("{kind} is not a higher move"))),
    };
    if p1.chirality.is_inverse() != kind.primed {
        let found = MoveKind { primed: !kind.primed, ..kind };
        return Err(MoveError::VariantMismatch { requested: kind.label(), found: found.label() });
    }
    if p1.end != p2.end {
        return Err(MoveError::PathsNotGlobular(format!("{kind} paths end at different diagrams")));
    }
    Ok((p1, p2))
}

/// Source and target of the move, as path diagrams over the base; for an
/// inverse kind they are exchanged.
pub fn higher_move_boundary(
    sig: &mut Signature,
    kind: MoveKind,
    params: &HigherParams,
) -> Result<(Diagram, Diagram), MoveError> {
    let (p1, p2) = paths(sig, kind, params)?;
    let s = Diagram::new(params.base.clone(), p1.entries);
    let t = Diagram::new(params.base.clone(), p2.entries);
    for d in [&s, &t] {
        well_defined(sig, d).map_err(|f| MoveError::PathsNotGlobular(f.to_string()))?;
    }
    if !globular(sig, &s, &t)? {
        return Err(MoveError::PathsNotGlobular(format!("{kind} boundaries disagree")));
    }
    Ok(if kind.inverse { (t, s) } else { (s, t) })
}

/// Applies a type III to VI move to `d` at `loc`: `loc.height` picks the
/// slice serving as base and `loc.coords[0]` the anchor in it.
pub fn apply_higher_move(
    sig: &mut Signature,
    d: &Diagram,
    loc: &MoveLocation,
    kind: MoveKind,
    direction: Direction,
    mu: Option<&GeneratorId>,
) -> Result<(Diagram, MoveInstance), MoveError> {
    require_dim(d, 4)?;
    let anchor = *loc.coords.first().ok_or_else(|| malformed("missing anchor coordinate"))?;
    let h = loc.height;
    if h > d.height() {
        return Err(MoveError::NoMatchAtLocation(h));
    }
    let base = d.slice(sig, h)?;
    let kind = kind.inverse(kind.inverse ^ direction.is_backward());
    let params = HigherParams { base, anchor, mu: mu.cloned() };
    let (s, t) = higher_move_boundary(sig, kind, &params)?;
    for (i, want) in s.entries().iter().enumerate() {
        if d.entries().get(h + i) != Some(want) {
            return Err(MoveError::NoMatchAtLocation(h + i));
        }
    }
    let mut heights = vec![0; d.dim()];
    heights[0] = h;
    let out = splice(d, &Embedding::new(heights), &s, &t)?;
    let mi = synthesize(sig, d, &out, h, s.height(), t.height(), kind, "", loc.clone())?;
    Ok((out, mi))
}
