//! Type-I interchangers, their block composites and crossing rearrangement.

use serde::{Deserialize, Serialize};

use super::{
    crossing_of, plan, require_dim, sizes, synthesize, Chirality, Plan, Composite, Expansion, Family, MoveError, MoveInstance,
    MoveKind, MoveLocation,
};
use crate::diagram::{Diagram, Entry};
use crate::signature::Signature;

fn chiralities(sig: &Signature, a: &Entry, b: &Entry) -> Result<Vec<Chirality>, MoveError> {
    let (u, v) = (a.height(), b.height());
    let (_, at) = sizes(sig, &a.generator)?;
    let (bs, _) = sizes(sig, &b.generator)?;
    let mut out = Vec::new();
    if v + bs <= u {
        out.push(Chirality::LeftDown);
    }
    if v >= u + at {
        out.push(Chirality::RightDown);
    }
    Ok(out)
}

/// Every adjacent pair `(i, i+1)` that can be interchanged, with the
/// chirality of each possible swap.
pub fn interchange_redexes(sig: &Signature, d: &Diagram) -> Result<Vec<(usize, Chirality)>, MoveError> {
    require_dim(d, 2)?;
    let mut out = Vec::new();
    for i in 0..d.height().saturating_sub(1) {
        for c in chiralities(sig, &d.entries()[i], &d.entries()[i + 1])? {
            out.push((i, c));
        }
    }
    Ok(out)
}

/// Swaps entries `i` and `i+1` without synthesizing a cell.
pub(crate) fn swap_raw(sig: &Signature, d: &Diagram, i: usize, dir: Chirality) -> Result<Diagram, MoveError> {
    require_dim(d, 2)?;
    if i + 1 >= d.height() {
        return Err(MoveError::NotARedex(i));
    }
    let (a, b) = (&d.entries()[i], &d.entries()[i + 1]);
    if !chiralities(sig, a, b)?.contains(&dir) {
        return Err(MoveError::NotARedex(i));
    }
    let (u, v) = (a.height(), b.height());
    let (as_, at) = sizes(sig, &a.generator)?;
    let (bs, bt) = sizes(sig, &b.generator)?;
    let (nb, na) = match dir {
        Chirality::RightDown => (v - at + as_, u),
        Chirality::LeftDown => (v, u - bs + bt),
    };
    let mut entries = d.entries().to_vec();
    entries[i] = Entry::new(b.generator.clone(), b.embedding.with_height(0, nb));
    entries[i + 1] = Entry::new(a.generator.clone(), a.embedding.with_height(0, na));
    Ok(Diagram::new(d.source().expect("dim >= 2").clone(), entries))
}

pub fn apply_interchange(
    sig: &mut Signature,
    d: &Diagram,
    i: usize,
    dir: Chirality,
) -> Result<(Diagram, MoveInstance), MoveError> {
    let out = swap_raw(sig, d, i, dir)?;
    let kind = MoveKind::new(Family::I).inverse(dir.is_inverse());
    let mi = synthesize(sig, d, &out, i, 2, 2, kind, "", MoveLocation::at(i))?;
    Ok((out, mi))
}

/// A lower stack of `lower` consecutive entries at `height`, followed by an
/// upper stack of `upper` entries lying wholly to one side of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InterchangeBlock {
    pub height: usize,
    pub lower: usize,
    pub upper: usize,
}

pub(crate) fn block_chirality(sig: &Signature, d: &Diagram, b: InterchangeBlock) -> Result<Chirality, MoveError> {
    require_dim(d, 2)?;
    if b.lower == 0 || b.upper == 0 {
        return Err(MoveError::NotABlock("stacks must be non-empty".into()));
    }
    if b.height + b.lower + b.upper > d.height() {
        return Err(MoveError::NotABlock("block exceeds diagram".into()));
    }
    let lower = super::region_from(sig, d, b.height, b.lower, None)?.expect("non-empty");
    let upper = super::footprint(sig, d, b.height + b.lower, b.upper)?.expect("non-empty");
    if upper.1 <= lower.cur.0 {
        Ok(Chirality::LeftDown)
    } else if upper.0 >= lower.cur.1 {
        Ok(Chirality::RightDown)
    } else {
        Err(MoveError::NotABlock("upper stack overlaps the lower stack".into()))
    }
}

pub(crate) fn growth(sig: &Signature, entries: &[Entry]) -> Result<isize, MoveError> {
    let mut total = 0isize;
    for e in entries {
        let (s, t) = sizes(sig, &e.generator)?;
        total += t as isize - s as isize;
    }
    Ok(total)
}

pub(crate) fn shifted(e: &Entry, delta: isize) -> Result<Entry, MoveError> {
    let h = e.height() as isize + delta;
    if h < 0 {
        return Err(MoveError::Internal("negative height after shift".into()));
    }
    Ok(Entry::new(e.generator.clone(), e.embedding.with_height(0, h as usize)))
}

/// The block swapped in one step.
pub(crate) fn block_swap_raw(sig: &Signature, d: &Diagram, b: InterchangeBlock) -> Result<(Diagram, Chirality), MoveError> {
    let dir = block_chirality(sig, d, b)?;
    let es = d.entries();
    let lower = &es[b.height..b.height + b.lower];
    let upper = &es[b.height + b.lower..b.height + b.lower + b.upper];
    let (du, dl) = match dir {
        Chirality::LeftDown => (0, growth(sig, upper)?),
        Chirality::RightDown => (-growth(sig, lower)?, 0),
    };
    let mut entries = es[..b.height].to_vec();
    for e in upper {
        entries.push(shifted(e, du)?);
    }
    for e in lower {
        entries.push(shifted(e, dl)?);
    }
    entries.extend_from_slice(&es[b.height + b.lower + b.upper..]);
    Ok((Diagram::new(d.source().expect("dim >= 2").clone(), entries), dir))
}

/// The composite interchanger applied directly as a single cell.
pub fn apply_block_interchange(
    sig: &mut Signature,
    d: &Diagram,
    b: InterchangeBlock,
) -> Result<(Diagram, MoveInstance), MoveError> {
    let (out, dir) = block_swap_raw(sig, d, b)?;
    let composite = if b.lower == 1 && b.upper == 1 { Composite::Atomic } else { Composite::Tilde };
    let kind = MoveKind::new(Family::I).inverse(dir.is_inverse()).composite(composite);
    let n = b.lower + b.upper;
    let loc = MoveLocation { height: b.height, coords: vec![b.lower, b.upper] };
    let mi = synthesize(sig, d, &out, b.height, n, n, kind, "", loc)?;
    Ok((out, mi))
}

/// Order in which the atomic swaps of a block are performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum BlockOrder {
    /// The lowest upper cell moves down through the whole lower stack, then
    /// the next one, and so on.
    ByUpper,
    /// The whole upper stack moves past the top lower cell, then past the
    /// next one down, and so on.
    ByLower,
}

pub(crate) fn block_positions(order: BlockOrder, height: usize, lower: usize, upper: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(lower * upper);
    match order {
        BlockOrder::ByUpper => {
            for t in 0..upper {
                for j in (0..lower).rev() {
                    out.push(height + t + j);
                }
            }
        }
        BlockOrder::ByLower => {
            for j in (0..lower).rev() {
                for t in 0..upper {
                    out.push(height + j + t);
                }
            }
        }
    }
    out
}

/// The crossing entries a block decomposes into over the slice `x`,
/// without registering any cell, and the slice after the block.
pub(crate) fn planned_crossings(
    sig: &Signature,
    x: &Diagram,
    b: InterchangeBlock,
    order: BlockOrder,
    dir: Chirality,
) -> Result<(Vec<Plan>, Diagram), MoveError> {
    let kind = MoveKind::new(Family::I).inverse(dir.is_inverse());
    let mut cur = x.clone();
    let mut plans = Vec::with_capacity(b.lower * b.upper);
    for i in block_positions(order, b.height, b.lower, b.upper) {
        let next = swap_raw(sig, &cur, i, dir)?;
        plans.push(plan(sig, &cur, &next, i, 2, 2, kind, "")?);
        cur = next;
    }
    Ok((plans, cur))
}

pub(crate) fn plans_match(plans: &[Plan], entries: &[Entry]) -> bool {
    plans.len() == entries.len()
        && plans.iter().zip(entries).all(|(p, e)| p.name == e.generator && p.embedding == e.embedding)
}

pub fn expand_interchange(sig: &mut Signature, d: &Diagram, b: InterchangeBlock) -> Result<Expansion, MoveError> {
    let dir = block_chirality(sig, d, b)?;
    let mut cur = d.clone();
    let mut moves = Vec::with_capacity(b.lower * b.upper);
    for i in block_positions(BlockOrder::ByUpper, b.height, b.lower, b.upper) {
        let (next, mi) = apply_interchange(sig, &cur, i, dir)?;
        moves.push(mi);
        cur = next;
    }
    Ok(Expansion { moves, result: cur })
}

/// Reorders a span of crossings into canonical block order. Each emitted
/// move carries one crossing down past a run of crossings on one side of it.
pub fn rearrange_crossings(
    sig: &mut Signature,
    d: &Diagram,
    span: (usize, usize),
) -> Result<Expansion, MoveError> {
    rearrange_to(sig, d, span, BlockOrder::ByUpper)
}

pub(crate) fn rearrange_to(
    sig: &mut Signature,
    d: &Diagram,
    span: (usize, usize),
    order: BlockOrder,
) -> Result<Expansion, MoveError> {
    require_dim(d, 3)?;
    let (start, len) = span;
    if start + len > d.height() {
        return Err(MoveError::NotACrossingPattern("span exceeds diagram".into()));
    }
    if len <= 1 {
        if len == 1 && crossing_of(sig, &d.entries()[start].generator).is_none() {
            return Err(MoveError::NotACrossingPattern(format!("entry {start} is not a crossing")));
        }
        return Ok(Expansion { moves: Vec::new(), result: d.clone() });
    }
    let mut pos = Vec::with_capacity(len);
    for (j, e) in d.entries()[start..start + len].iter().enumerate() {
        if crossing_of(sig, &e.generator).is_none() {
            return Err(MoveError::NotACrossingPattern(format!("entry {} is not a crossing", start + j)));
        }
        pos.push(e.height());
    }
    let lo = *pos.iter().min().expect("non-empty");
    let hi = pos.iter().max().expect("non-empty") + 2;
    // Strand labels by initial position; follow them through the swaps.
    let mut strands: Vec<usize> = (0..hi - lo).collect();
    let mut pairs = Vec::with_capacity(len);
    for &p in &pos {
        let k = p - lo;
        pairs.push((strands[k + 1], strands[k]));
        strands.swap(k, k + 1);
    }
    let n = hi - lo;
    let split = strands[n - 1] + 1;
    let expected: Vec<usize> = (split..n).chain(0..split).collect();
    if strands != expected || pairs.len() != split * (n - split) {
        return Err(MoveError::NotACrossingPattern("crossings do not exchange two stacks".into()));
    }
    if pairs.iter().any(|&(up, down)| up < split || down >= split) {
        return Err(MoveError::NotACrossingPattern("a crossing swaps two strands of one stack".into()));
    }
    let mut canonical = Vec::with_capacity(len);
    match order {
        BlockOrder::ByUpper => {
            for t in 0..n - split {
                for j in (0..split).rev() {
                    canonical.push((split + t, j));
                }
            }
        }
        BlockOrder::ByLower => {
            for j in (0..split).rev() {
                for t in 0..n - split {
                    canonical.push((split + t, j));
                }
            }
        }
    }
    let mut cur = d.clone();
    let mut moves = Vec::new();
    for (t, want) in canonical.iter().enumerate() {
        let q = t + pairs[t..].iter().position(|p| p == want).expect("permutation of pairs");
        // Carry pairs[q] down to slot t, one same-side run at a time.
        let mut top = q;
        while top > t {
            let moving = cur.entries()[start + top].height();
            let side = |p: usize| if p + 2 <= moving { 0 } else { 1 };
            let run_side = side(cur.entries()[start + top - 1].height());
            let mut bottom = top - 1;
            while bottom > t && side(cur.entries()[start + bottom - 1].height()) == run_side {
                bottom -= 1;
            }
            let block = InterchangeBlock { height: start + bottom, lower: top - bottom, upper: 1 };
            let (next, mi) = apply_block_interchange(sig, &cur, block)?;
            moves.push(mi);
            cur = next;
            let p = pairs.remove(top);
            pairs.insert(bottom, p);
            top = bottom;
        }
    }
    Ok(Expansion { moves, result: cur })
}
