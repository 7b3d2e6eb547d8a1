//! Diagrams, embeddings, slices and rewrites.
//!
//! A 0-diagram is a single generator. An n-diagram is a source (n-1)-diagram
//! together with an ordered list of entries, each placing an n-cell at one
//! height. Embeddings are flat height vectors: index 0 is the top height and
//! the remaining indices describe the nested embedding of the source.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::signature::{GeneratorId, Signature, SignatureError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("height {height} out of range for diagram of height {len}")]
    HeightOutOfRange { height: usize, len: usize },
    #[error("entry at height {0} does not fit its slice")]
    IllDefinedAt(usize),
    #[error("embedding is not well-defined")]
    EmbeddingIllDefined,
    #[error("diagrams do not form a globular pair")]
    NotGlobular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("0-diagrams have no boundary")]
    NoBoundary,
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// Height data of an embedding between two k-diagrams.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Embedding(Vec<usize>);

impl Embedding {
    pub fn new(heights: Vec<usize>) -> Self {
        Embedding(heights)
    }

    /// The all-zero embedding of a k-diagram into itself.
    pub fn identity(dim: usize) -> Self {
        Embedding(vec![0; dim])
    }

    pub fn heights(&self) -> &[usize] {
        &self.0
    }

    pub fn into_heights(self) -> Vec<usize> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Top height; `None` for embeddings of 0-diagrams.
    pub fn h(&self) -> Option<usize> {
        self.0.first().copied()
    }

    /// The nested embedding of the sources.
    pub fn rest(&self) -> Embedding {
        Embedding(self.0.get(1..).unwrap_or_default().to_vec())
    }

    pub fn cons(h: usize, rest: &Embedding) -> Embedding {
        let mut v = Vec::with_capacity(rest.0.len() + 1);
        v.push(h);
        v.extend_from_slice(&rest.0);
        Embedding(v)
    }

    /// `f ∘ self`, which is elementwise addition of heights.
    pub fn then(&self, f: &Embedding) -> Result<Embedding, DiagramError> {
        if self.dim() != f.dim() {
            return Err(DiagramError::DimensionMismatch {
                expected: self.dim(),
                found: f.dim(),
            });
        }
        Ok(Embedding(self.0.iter().zip(&f.0).map(|(a, b)| a + b).collect()))
    }

    pub fn checked_sub(&self, other: &Embedding) -> Option<Embedding> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Embedding)
    }

    pub fn with_height(&self, index: usize, value: usize) -> Embedding {
        let mut v = self.0.clone();
        v[index] = value;
        Embedding(v)
    }
}

impl From<Vec<usize>> for Embedding {
    fn from(v: Vec<usize>) -> Self {
        Embedding(v)
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, h) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, "]")
    }
}

/// Composite `f ∘ e`: embeds what `e` embeds, through `f`.
pub fn compose_embeddings(f: &Embedding, e: &Embedding) -> Result<Embedding, DiagramError> {
    e.then(f)
}

pub fn identity_embedding(d: &Diagram) -> Embedding {
    Embedding::identity(d.dim())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Entry {
    pub generator: GeneratorId,
    pub embedding: Embedding,
}

impl Entry {
    pub fn new(generator: GeneratorId, embedding: impl Into<Embedding>) -> Self {
        Entry { generator, embedding: embedding.into() }
    }

    /// Top height of the entry's embedding (0 for entries of 1-diagrams).
    pub fn height(&self) -> usize {
        self.embedding.h().unwrap_or(0)
    }
}

#[derive(Clone)]
pub struct Diagram(Arc<Node>);

struct Node {
    dim: usize,
    shape: Shape,
    slices: OnceLock<(u64, Arc<[Diagram]>)>,
}

enum Shape {
    Point(GeneratorId),
    Cells { source: Diagram, entries: Vec<Entry> },
}

impl Diagram {
    pub fn point(g: GeneratorId) -> Diagram {
        Diagram(Arc::new(Node { dim: 0, shape: Shape::Point(g), slices: OnceLock::new() }))
    }

    pub fn new(source: Diagram, entries: Vec<Entry>) -> Diagram {
        Diagram(Arc::new(Node {
            dim: source.dim() + 1,
            shape: Shape::Cells { source, entries },
            slices: OnceLock::new(),
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn source(&self) -> Option<&Diagram> {
        match &self.0.shape {
            Shape::Point(_) => None,
            Shape::Cells { source, .. } => Some(source),
        }
    }

    pub fn point_generator(&self) -> Option<&GeneratorId> {
        match &self.0.shape {
            Shape::Point(g) => Some(g),
            Shape::Cells { .. } => None,
        }
    }

    pub fn entries(&self) -> &[Entry] {
        match &self.0.shape {
            Shape::Point(_) => &[],
            Shape::Cells { entries, .. } => entries,
        }
    }

    /// Number of cells; a 0-diagram has height 1.
    pub fn height(&self) -> usize {
        match &self.0.shape {
            Shape::Point(_) => 1,
            Shape::Cells { entries, .. } => entries.len(),
        }
    }

    pub fn generator_at(&self, i: usize) -> Option<&GeneratorId> {
        match &self.0.shape {
            Shape::Point(g) if i == 0 => Some(g),
            Shape::Point(_) => None,
            Shape::Cells { entries, .. } => entries.get(i).map(|e| &e.generator),
        }
    }

    fn require_source(&self) -> Result<&Diagram, DiagramError> {
        self.source().ok_or(DiagramError::NoBoundary)
    }

    /// All slices `0..=height`, memoized per signature.
    pub fn slices(&self, sig: &Signature) -> Result<Arc<[Diagram]>, DiagramError> {
        if let Some((uid, cached)) = self.0.slices.get() {
            if *uid == sig.uid() {
                return Ok(cached.clone());
            }
        }
        let source = self.require_source()?;
        let mut out = Vec::with_capacity(self.height() + 1);
        let mut cur = source.clone();
        out.push(cur.clone());
        for (i, entry) in self.entries().iter().enumerate() {
            let (gs, gt) = sig.boundaries(&entry.generator)?;
            cur = splice(&cur, &entry.embedding, gs, gt).map_err(|_| DiagramError::IllDefinedAt(i))?;
            out.push(cur.clone());
        }
        let out: Arc<[Diagram]> = out.into();
        let _ = self.0.slices.set((sig.uid(), out.clone()));
        Ok(out)
    }

    pub fn slice(&self, sig: &Signature, i: usize) -> Result<Diagram, DiagramError> {
        let len = self.height();
        if self.dim() == 0 {
            return Err(DiagramError::NoBoundary);
        }
        if i > len {
            return Err(DiagramError::HeightOutOfRange { height: i, len });
        }
        Ok(self.slices(sig)?[i].clone())
    }

    pub fn target(&self, sig: &Signature) -> Result<Diagram, DiagramError> {
        self.slice(sig, self.height())
    }
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.dim != other.0.dim {
            return false;
        }
        match (&self.0.shape, &other.0.shape) {
            (Shape::Point(a), Shape::Point(b)) => a == b,
            (Shape::Cells { source: sa, entries: ea }, Shape::Cells { source: sb, entries: eb }) => {
                ea == eb && sa == sb
            }
            _ => false,
        }
    }
}

impl Eq for Diagram {}

impl Hash for Diagram {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.dim.hash(state);
        match &self.0.shape {
            Shape::Point(g) => g.hash(state),
            Shape::Cells { source, entries } => {
                source.hash(state);
                entries.hash(state);
            }
        }
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.shape {
            Shape::Point(g) => write!(f, "<{g}>"),
            Shape::Cells { source, entries } => {
                write!(f, "<{source};[")?;
                for (i, e) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "({},{})", e.generator, e.embedding)?;
                }
                write!(f, "]>")
            }
        }
    }
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Structural rewrite without signature checks; only the top-level bounds
/// are verified.
pub fn splice(d: &Diagram, e: &Embedding, s: &Diagram, t: &Diagram) -> Result<Diagram, DiagramError> {
    let n = d.dim();
    if s.dim() != n || t.dim() != n {
        return Err(DiagramError::DimensionMismatch { expected: n, found: s.dim().max(t.dim()) });
    }
    if e.dim() != n {
        return Err(DiagramError::DimensionMismatch { expected: n, found: e.dim() });
    }
    if n == 0 {
        return Ok(t.clone());
    }
    let h = e.heights()[0];
    let (ds, ss) = (d.height(), s.height());
    if h + ss > ds {
        return Err(DiagramError::EmbeddingIllDefined);
    }
    let inner = e.rest();
    let mut entries = Vec::with_capacity(ds - ss + t.height());
    entries.extend_from_slice(&d.entries()[..h]);
    for te in t.entries() {
        entries.push(Entry { generator: te.generator.clone(), embedding: te.embedding.then(&inner)? });
    }
    entries.extend_from_slice(&d.entries()[h + ss..]);
    Ok(Diagram::new(d.require_source()?.clone(), entries))
}

/// `D⟨e : S → T⟩`, checking globularity of `(S, T)` and well-definedness of `e`.
pub fn rewrite(sig: &Signature, d: &Diagram, e: &Embedding, s: &Diagram, t: &Diagram) -> Result<Diagram, DiagramError> {
    if !globular(sig, s, t)? {
        return Err(DiagramError::NotGlobular);
    }
    if !well_defined_embedding(sig, e, s, d)? {
        return Err(DiagramError::EmbeddingIllDefined);
    }
    splice(d, e, s, t)
}

/// Lifts `e : S ↪ D` to `T ↪ D⟨e : S → T⟩`. The height data is unchanged.
pub fn lift(sig: &Signature, e: &Embedding, s: &Diagram, t: &Diagram) -> Result<Embedding, DiagramError> {
    if !globular(sig, s, t)? {
        return Err(DiagramError::NotGlobular);
    }
    Ok(e.clone())
}

pub fn equivalent(a: &Diagram, b: &Diagram) -> bool {
    a == b
}

pub fn globular(sig: &Signature, s: &Diagram, t: &Diagram) -> Result<bool, DiagramError> {
    if s.dim() != t.dim() {
        return Err(DiagramError::DimensionMismatch { expected: s.dim(), found: t.dim() });
    }
    if s.dim() == 0 {
        return Ok(true);
    }
    if s.source() != t.source() {
        return Ok(false);
    }
    Ok(s.target(sig)? == t.target(sig)?)
}

/// Where a well-definedness check first broke: `height` is the entry index
/// at the level `depth` steps below the checked diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub height: usize,
    pub depth: usize,
    pub reason: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "height {} depth {}: {}", self.height, self.depth, self.reason)
    }
}

pub fn well_defined(sig: &Signature, d: &Diagram) -> Result<(), Failure> {
    check_diagram(sig, d, 0)
}

fn check_diagram(sig: &Signature, d: &Diagram, depth: usize) -> Result<(), Failure> {
    let fail = |height: usize, reason: String| Failure { height, depth, reason };
    let n = d.dim();
    if n == 0 {
        let g = d.point_generator().expect("point");
        return match sig.dim_of(g) {
            Some(0) => Ok(()),
            Some(k) => Err(fail(0, format!("{g} has dimension {k}, expected 0"))),
            None => Err(fail(0, format!("unknown generator {g}"))),
        };
    }
    let source = d.source().expect("source");
    check_diagram(sig, source, depth + 1)?;
    let mut cur = source.clone();
    for (i, entry) in d.entries().iter().enumerate() {
        let g = &entry.generator;
        match sig.dim_of(g) {
            None => return Err(fail(i, format!("unknown generator {g}"))),
            Some(k) if k != n => return Err(fail(i, format!("{g} has dimension {k}, expected {n}"))),
            _ => {}
        }
        let (gs, gt) = sig.boundaries(g).map_err(|e| fail(i, e.to_string()))?;
        if entry.embedding.dim() != n - 1 {
            return Err(fail(i, format!("embedding {} has wrong length", entry.embedding)));
        }
        match check_embedding(sig, &entry.embedding, gs, &cur) {
            Ok(()) => {}
            Err(Some(mut inner)) => {
                if inner.depth == 0 {
                    inner.height = i;
                }
                inner.depth += depth;
                return Err(inner);
            }
            Err(None) => return Err(fail(i, format!("embedding {} of {g} does not fit", entry.embedding))),
        }
        cur = splice(&cur, &entry.embedding, gs, gt).map_err(|e| fail(i, e.to_string()))?;
    }
    Ok(())
}

/// `Err(None)` for a plain mismatch; `Err(Some(_))` carries a located
/// failure from a deeper level.
fn check_embedding(sig: &Signature, e: &Embedding, s: &Diagram, d: &Diagram) -> Result<(), Option<Failure>> {
    match well_defined_embedding_at(sig, e, s, d, 1) {
        Ok(true) => Ok(()),
        Ok(false) => Err(None),
        Err(f) => Err(Some(f)),
    }
}

pub fn well_defined_embedding(sig: &Signature, e: &Embedding, s: &Diagram, d: &Diagram) -> Result<bool, DiagramError> {
    if s.dim() != d.dim() || e.dim() != s.dim() {
        return Err(DiagramError::DimensionMismatch { expected: d.dim(), found: s.dim() });
    }
    Ok(well_defined_embedding_at(sig, e, s, d, 0).unwrap_or(false))
}

fn well_defined_embedding_at(sig: &Signature, e: &Embedding, s: &Diagram, d: &Diagram, depth: usize) -> Result<bool, Failure> {
    let n = d.dim();
    if s.dim() != n || e.dim() != n {
        return Ok(false);
    }
    if n == 0 {
        return Ok(s.point_generator() == d.point_generator());
    }
    let h = e.heights()[0];
    if h + s.height() > d.height() {
        return Ok(false);
    }
    let inner = e.rest();
    let slice = d.slice(sig, h).map_err(|err| Failure { height: h, depth, reason: err.to_string() })?;
    if !well_defined_embedding_at(sig, &inner, s.source().expect("source"), &slice, depth + 1)? {
        return Ok(false);
    }
    for (i, se) in s.entries().iter().enumerate() {
        let de = &d.entries()[i + h];
        if se.generator != de.generator {
            return Ok(false);
        }
        match se.embedding.then(&inner) {
            Ok(sum) if sum == de.embedding => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Every embedding of `s` into `d`, in lexicographic order of heights.
pub fn enumerate_embeddings(sig: &Signature, s: &Diagram, d: &Diagram) -> Result<Vec<Embedding>, DiagramError> {
    if s.dim() != d.dim() {
        return Err(DiagramError::DimensionMismatch { expected: d.dim(), found: s.dim() });
    }
    let n = d.dim();
    if n == 0 {
        return Ok(if s.point_generator() == d.point_generator() { vec![Embedding::default()] } else { vec![] });
    }
    let mut out = Vec::new();
    if s.height() > d.height() {
        return Ok(out);
    }
    let slices = d.slices(sig)?;
    let ssource = s.source().expect("source");
    for h in 0..=d.height() - s.height() {
        // The first entry pins down the nested embedding when S is non-empty.
        if let Some(first) = s.entries().first() {
            let de = &d.entries()[h];
            if de.generator != first.generator {
                continue;
            }
            let Some(inner) = de.embedding.checked_sub(&first.embedding) else { continue };
            let e = Embedding::cons(h, &inner);
            if well_defined_embedding(sig, &e, s, d)? {
                out.push(e);
            }
        } else {
            for inner in enumerate_embeddings(sig, ssource, &slices[h])? {
                out.push(Embedding::cons(h, &inner));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

/// One boundary of a positive-dimensional diagram.
pub fn boundary(sig: &Signature, d: &Diagram, side: Side) -> Result<Diagram, DiagramError> {
    match side {
        Side::Source => d.require_source().cloned(),
        Side::Target => d.target(sig),
    }
}
