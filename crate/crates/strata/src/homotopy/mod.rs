//! Homotopy generator moves.
//!
//! Every applied move synthesizes a (k+1)-cell in the signature. The cell's
//! source is the smallest box of the ambient k-diagram containing the
//! interacting entries, and the cell is named from a digest of its kind and
//! source so that equal redexes always yield the same generator.

mod higher;
mod interchange;
mod pullthrough;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagram::{splice, Diagram, DiagramError, Embedding};
use crate::signature::{GeneratorId, Signature, SignatureError};

pub use higher::{apply_higher_move, higher_move_boundary, HigherParams};
pub use interchange::{
    apply_block_interchange, apply_interchange, expand_interchange, interchange_redexes, rearrange_crossings,
    InterchangeBlock,
};
pub use pullthrough::{apply_pullthrough, expand_pullthrough, pull_stack_direct, pullthrough_variant, PullBlock};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("no redex at height {0}")]
    NotARedex(usize),
    #[error("pattern matches the {found} variant, not the {requested} one")]
    VariantMismatch { requested: String, found: String },
    #[error("entries do not form a block: {0}")]
    NotABlock(String),
    #[error("span is not a crossing pattern: {0}")]
    NotACrossingPattern(String),
    #[error("malformed parameters: {0}")]
    MalformedParams(String),
    #[error("assembled paths are not globular: {0}")]
    PathsNotGlobular(String),
    #[error("no match at location; first difference at height {0}")]
    NoMatchAtLocation(usize),
    #[error("move requires a {needed}-cell but the signature stops at dimension {top}")]
    AboveTopDimension { needed: usize, top: usize },
    #[error("diagram of dimension {found} is too small; need at least {needed}")]
    DimensionTooLow { needed: usize, found: usize },
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Composite {
    #[default]
    Atomic,
    Tilde,
    Hat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveKind {
    pub family: Family,
    #[serde(default)]
    pub primed: bool,
    #[serde(default)]
    pub inverse: bool,
    #[serde(default)]
    pub composite: Composite,
}

impl MoveKind {
    pub fn new(family: Family) -> Self {
        MoveKind { family, primed: false, inverse: false, composite: Composite::Atomic }
    }

    pub fn primed(mut self, p: bool) -> Self {
        self.primed = p;
        self
    }

    pub fn inverse(mut self, i: bool) -> Self {
        self.inverse = i;
        self
    }

    pub fn composite(mut self, c: Composite) -> Self {
        self.composite = c;
        self
    }

    pub fn inverted(self) -> Self {
        MoveKind { inverse: !self.inverse, ..self }
    }

    pub fn is_valid(&self) -> bool {
        let composite_ok = match self.composite {
            Composite::Atomic => true,
            Composite::Hat => self.family == Family::I,
            Composite::Tilde => matches!(self.family, Family::I | Family::II),
        };
        composite_ok && !(self.primed && self.family == Family::I)
    }

    /// Short ASCII label such as `II'~` or `IV-`.
    pub fn label(&self) -> String {
        let mut s = format!("{:?}", self.family);
        if self.primed {
            s.push('\'');
        }
        match self.composite {
            Composite::Atomic => {}
            Composite::Tilde => s.push('~'),
            Composite::Hat => s.push('^'),
        }
        if self.inverse {
            s.push('-');
        }
        s
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Which way a type-I swap goes: the upper cell always moves down, and sits
/// either left or right of the lower one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirality {
    LeftDown,
    RightDown,
}

impl Chirality {
    pub fn flip(self) -> Self {
        match self {
            Chirality::LeftDown => Chirality::RightDown,
            Chirality::RightDown => Chirality::LeftDown,
        }
    }

    /// Crossings made by `RightDown` swaps are the inverse crossings.
    pub fn is_inverse(self) -> bool {
        self == Chirality::RightDown
    }

    pub fn from_inverse(inverse: bool) -> Self {
        if inverse {
            Chirality::RightDown
        } else {
            Chirality::LeftDown
        }
    }
}

/// The stack of a crossing block a pulled cell sits on: `Front` moves down
/// through the crossing, `Rear` moves up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Front,
    Rear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Front,
    Rear,
    PrimedFront,
    PrimedRear,
}

impl Variant {
    pub fn new(sheet: Sheet, primed: bool) -> Self {
        match (sheet, primed) {
            (Sheet::Front, false) => Variant::Front,
            (Sheet::Rear, false) => Variant::Rear,
            (Sheet::Front, true) => Variant::PrimedFront,
            (Sheet::Rear, true) => Variant::PrimedRear,
        }
    }

    pub fn sheet(self) -> Sheet {
        match self {
            Variant::Front | Variant::PrimedFront => Sheet::Front,
            Variant::Rear | Variant::PrimedRear => Sheet::Rear,
        }
    }

    pub fn is_primed(self) -> bool {
        matches!(self, Variant::PrimedFront | Variant::PrimedRear)
    }

    pub fn all() -> [Variant; 4] {
        [Variant::Front, Variant::Rear, Variant::PrimedFront, Variant::PrimedRear]
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Front => "front",
            Variant::Rear => "rear",
            Variant::PrimedFront => "primed-front",
            Variant::PrimedRear => "primed-rear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl Direction {
    pub fn is_backward(self) -> bool {
        self == Direction::Backward
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct MoveLocation {
    pub height: usize,
    #[serde(default)]
    pub coords: Vec<usize>,
}

impl MoveLocation {
    pub fn at(height: usize) -> Self {
        MoveLocation { height, coords: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveInstance {
    pub kind: MoveKind,
    pub cell: GeneratorId,
    pub location: MoveLocation,
    /// Where the cell's source sits in the ambient diagram.
    pub embedding: Embedding,
}

/// Tracks the footprint of a run of entries: `base` in the first slice,
/// `cur` in the slice after the entries processed so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Region {
    base: (usize, usize),
    cur: (usize, usize),
}

impl Region {
    fn absorb(this: &mut Option<Region>, u: usize, ss: usize, ts: usize) {
        match this {
            None => *this = Some(Region { base: (u, u + ss), cur: (u, u + ts) }),
            Some(r) => {
                if u < r.cur.0 {
                    let d = r.cur.0 - u;
                    r.base.0 -= d;
                    r.cur.0 = u;
                }
                if u + ss > r.cur.1 {
                    let d = u + ss - r.cur.1;
                    r.base.1 += d;
                    r.cur.1 += d;
                }
                r.cur.1 = r.cur.1 + ts - ss;
            }
        }
    }
}

fn sizes(sig: &Signature, g: &GeneratorId) -> Result<(usize, usize), MoveError> {
    let (s, t) = sig.boundaries(g)?;
    Ok((s.height(), t.height()))
}

fn region_from(sig: &Signature, d: &Diagram, lo: usize, n: usize, start: Option<Region>) -> Result<Option<Region>, MoveError> {
    let mut r = start;
    for entry in &d.entries()[lo..lo + n] {
        let (ss, ts) = sizes(sig, &entry.generator)?;
        Region::absorb(&mut r, entry.height(), ss, ts);
    }
    Ok(r)
}

/// Footprint in `slice(d, lo)` of entries `lo..lo+n`.
fn footprint(sig: &Signature, d: &Diagram, lo: usize, n: usize) -> Result<Option<(usize, usize)>, MoveError> {
    Ok(region_from(sig, d, lo, n, None)?.map(|r| r.base))
}

fn extract_box(sig: &Signature, d: &Diagram, lo: usize, n: usize, base: (usize, usize)) -> Result<Diagram, MoveError> {
    let outside = || MoveError::Internal("move box exceeds the diagram".into());
    let x = d.slice(sig, lo)?;
    let inner_entries = x.entries().get(base.0..base.1).ok_or_else(outside)?.to_vec();
    let inner = Diagram::new(x.slice(sig, base.0)?, inner_entries);
    let entries = d
        .entries()
        .get(lo..lo + n)
        .ok_or_else(outside)?
        .iter()
        .map(|e| {
            let h = e.height().checked_sub(base.0).ok_or_else(outside)?;
            Ok(crate::diagram::Entry::new(e.generator.clone(), e.embedding.with_height(0, h)))
        })
        .collect::<Result<_, MoveError>>()?;
    Ok(Diagram::new(inner, entries))
}

fn digest_name(kind: &MoveKind, key: &str, source: &Diagram) -> String {
    let digest = Sha256::digest(format!("{}|{}|{}", kind.label(), key, source).as_bytes());
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    format!("{}#{}", kind.label(), hex)
}

/// Registers a move cell and its inverse, returning the cell.
pub(crate) fn register_move_cell(
    sig: &mut Signature,
    kind: MoveKind,
    key: &str,
    source: Diagram,
    target: Diagram,
) -> Result<GeneratorId, MoveError> {
    let dim = source.dim() + 1;
    if dim > sig.top_dim() {
        return Err(MoveError::AboveTopDimension { needed: dim, top: sig.top_dim() });
    }
    let name = digest_name(&kind, key, &source);
    let inv_name = digest_name(&kind.inverted(), key, &target);
    let cell = sig.ensure_generator(name, dim, source.clone(), target.clone())?;
    sig.set_tag(&cell, kind)?;
    if !sig.contains(&inv_name) || sig.inverse(&cell).is_none() {
        let inv = sig.ensure_generator(inv_name, dim, target, source)?;
        sig.set_tag(&inv, kind.inverted())?;
        sig.link_inverse(&cell, &inv)?;
    }
    Ok(cell)
}

/// A move cell computed but not yet registered.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub name: GeneratorId,
    pub source: Diagram,
    pub target: Diagram,
    pub embedding: Embedding,
}

/// Computes the cell turning entries `lo..lo+n_src` of `d` into entries
/// `lo..lo+n_tgt` of `d2`; everything else must agree.
#[allow(clippy::too_many_arguments)]
pub(crate) fn plan(
    sig: &Signature,
    d: &Diagram,
    d2: &Diagram,
    lo: usize,
    n_src: usize,
    n_tgt: usize,
    kind: MoveKind,
    key: &str,
) -> Result<Plan, MoveError> {
    let a = footprint(sig, d, lo, n_src)?;
    let b = footprint(sig, d2, lo, n_tgt)?;
    let base = match (a, b) {
        (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(MoveError::Internal("empty move".into())),
    };
    // Re-running from the union can only confirm it, never widen it.
    let start = Some(Region { base, cur: base });
    for (dd, n) in [(d, n_src), (d2, n_tgt)] {
        if region_from(sig, dd, lo, n, start)?.map(|r| r.base) != Some(base) {
            return Err(MoveError::Internal("footprint union is not stable".into()));
        }
    }
    let source = extract_box(sig, d, lo, n_src, base)?;
    let target = extract_box(sig, d2, lo, n_tgt, base)?;
    let mut heights = vec![0; d.dim()];
    heights[0] = lo;
    heights[1] = base.0;
    let embedding = Embedding::new(heights);
    if splice(d, &embedding, &source, &target)? != *d2 {
        return Err(MoveError::Internal("extracted cell does not reproduce the move".into()));
    }
    let name = GeneratorId::new(digest_name(&kind, key, &source));
    Ok(Plan { name, source, target, embedding })
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn synthesize(
    sig: &mut Signature,
    d: &Diagram,
    d2: &Diagram,
    lo: usize,
    n_src: usize,
    n_tgt: usize,
    kind: MoveKind,
    key: &str,
    location: MoveLocation,
) -> Result<MoveInstance, MoveError> {
    let p = plan(sig, d, d2, lo, n_src, n_tgt, kind, key)?;
    let cell = register_move_cell(sig, kind, key, p.source, p.target)?;
    Ok(MoveInstance { kind, cell, location, embedding: p.embedding })
}

pub(crate) fn require_dim(d: &Diagram, needed: usize) -> Result<(), MoveError> {
    if d.dim() < needed {
        return Err(MoveError::DimensionTooLow { needed, found: d.dim() });
    }
    Ok(())
}

/// The crossing data of an entry whose generator is an atomic type-I cell:
/// the swapped position in its slice and the swap's chirality.
pub(crate) fn crossing_of(sig: &Signature, g: &GeneratorId) -> Option<Chirality> {
    let kind = sig.tag(g)?;
    (kind.family == Family::I && kind.composite == Composite::Atomic).then(|| Chirality::from_inverse(kind.inverse))
}

/// Replays a list of moves as rewrites of `d`.
pub fn replay(sig: &Signature, d: &Diagram, moves: &[MoveInstance]) -> Result<Diagram, MoveError> {
    let mut cur = d.clone();
    for m in moves {
        let (s, t) = sig.boundaries(&m.cell)?;
        cur = splice(&cur, &m.embedding, s, t)?;
    }
    Ok(cur)
}

/// Result of expanding a composite move into atomic ones.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub moves: Vec<MoveInstance>,
    pub result: Diagram,
}

/// Path diagram `⟨base; moves⟩` whose entries are the move cells.
pub fn path_diagram(base: &Diagram, moves: &[MoveInstance]) -> Diagram {
    Diagram::new(
        base.clone(),
        moves.iter().map(|m| crate::diagram::Entry::new(m.cell.clone(), m.embedding.clone())).collect(),
    )
}
