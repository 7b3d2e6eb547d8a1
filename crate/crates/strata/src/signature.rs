//! Generating cells indexed by dimension, with invertibility data.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{globular, well_defined, Diagram, Embedding, Entry};
use crate::homotopy::MoveKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("generator name {0} already in use")]
    DuplicateName(GeneratorId),
    #[error("boundaries of {name} are not globular: {reason}")]
    BoundaryIllTyped { name: GeneratorId, reason: String },
    #[error("boundaries of {name} are ill-defined: {reason}")]
    BoundaryIllDefined { name: GeneratorId, reason: String },
    #[error("unknown generator {0}")]
    UnknownGenerator(GeneratorId),
    #[error("dimension {dim} exceeds signature top dimension {top}")]
    DimensionOutOfRange { dim: usize, top: usize },
    #[error("{0} is a 0-cell and cannot be inverted")]
    NotInvertible(GeneratorId),
    #[error("{0} is a 0-cell and has no boundary")]
    NoBoundary(GeneratorId),
    #[error("{0} is not marked invertible")]
    NoInverse(GeneratorId),
    #[error("witness for {0} would exceed the top dimension")]
    WitnessAboveTop(GeneratorId),
    #[error("{a} and {b} do not have swapped boundaries")]
    InverseMismatch { a: GeneratorId, b: GeneratorId },
}

/// Name token identifying a generator within one signature.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneratorId(Arc<str>);

impl GeneratorId {
    pub fn new(name: impl AsRef<str>) -> Self {
        GeneratorId(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Borrow<str> for GeneratorId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for GeneratorId {
    fn from(s: &str) -> Self {
        GeneratorId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertibilityData {
    pub inverse: GeneratorId,
    pub unit_witness: Option<GeneratorId>,
    pub counit_witness: Option<GeneratorId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    /// `f′ : [f]∘[f⁻¹] ⇒ id(f.s)`
    Unit,
    /// `f″ : id(f.t) ⇒ [f⁻¹]∘[f]`
    Counit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: GeneratorId,
    pub dim: usize,
    pub source: Option<Diagram>,
    pub target: Option<Diagram>,
    pub invertibility: Option<InvertibilityData>,
}

#[derive(Debug, Clone)]
struct Record {
    dim: usize,
    source: Option<Diagram>,
    target: Option<Diagram>,
}

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

fn fresh_uid() -> u64 {
    NEXT_UID.fetch_add(1, Ordering::Relaxed)
}

/// An append-only n-signature.
#[derive(Debug)]
pub struct Signature {
    uid: u64,
    top_dim: usize,
    records: HashMap<GeneratorId, Record>,
    levels: Vec<Vec<GeneratorId>>,
    invertibility: HashMap<GeneratorId, InvertibilityData>,
    tags: HashMap<GeneratorId, MoveKind>,
}

impl Clone for Signature {
    fn clone(&self) -> Self {
        Signature {
            uid: fresh_uid(),
            top_dim: self.top_dim,
            records: self.records.clone(),
            levels: self.levels.clone(),
            invertibility: self.invertibility.clone(),
            tags: self.tags.clone(),
        }
    }
}

impl Signature {
    pub fn new(top_dim: usize) -> Self {
        Signature {
            uid: fresh_uid(),
            top_dim,
            records: HashMap::new(),
            levels: vec![Vec::new(); top_dim + 1],
            invertibility: HashMap::new(),
            tags: HashMap::new(),
        }
    }

    /// Identity of this signature value, used to key slice caches.
    pub fn uid(&self) -> u64 {
        self.uid
    }

    pub fn top_dim(&self) -> usize {
        self.top_dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains(&self, g: &str) -> bool {
        self.records.contains_key(g)
    }

    pub fn dim_of(&self, g: &GeneratorId) -> Option<usize> {
        self.records.get(g).map(|r| r.dim)
    }

    pub fn id(&self, name: &str) -> Result<GeneratorId, SignatureError> {
        self.records
            .get_key_value(name)
            .map(|(k, _)| k.clone())
            .ok_or_else(|| SignatureError::UnknownGenerator(GeneratorId::new(name)))
    }

    /// Generators of dimension `k` in insertion order.
    pub fn level(&self, k: usize) -> &[GeneratorId] {
        self.levels.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All generators, by dimension and then insertion order.
    pub fn generators(&self) -> impl Iterator<Item = &GeneratorId> {
        self.levels.iter().flatten()
    }

    pub fn boundaries(&self, g: &GeneratorId) -> Result<(&Diagram, &Diagram), SignatureError> {
        let r = self.records.get(g).ok_or_else(|| SignatureError::UnknownGenerator(g.clone()))?;
        match (&r.source, &r.target) {
            (Some(s), Some(t)) => Ok((s, t)),
            _ => Err(SignatureError::NoBoundary(g.clone())),
        }
    }

    pub fn tag(&self, g: &GeneratorId) -> Option<&MoveKind> {
        self.tags.get(g)
    }

    pub fn set_tag(&mut self, g: &GeneratorId, kind: MoveKind) -> Result<(), SignatureError> {
        if !self.records.contains_key(g) {
            return Err(SignatureError::UnknownGenerator(g.clone()));
        }
        self.tags.insert(g.clone(), kind);
        Ok(())
    }

    pub fn invertibility(&self, g: &GeneratorId) -> Option<&InvertibilityData> {
        self.invertibility.get(g)
    }

    pub fn inverse(&self, g: &GeneratorId) -> Option<&GeneratorId> {
        self.invertibility.get(g).map(|d| &d.inverse)
    }

    pub fn add_generator(
        &mut self,
        name: impl AsRef<str>,
        dim: usize,
        source: Option<Diagram>,
        target: Option<Diagram>,
    ) -> Result<GeneratorId, SignatureError> {
        let id = GeneratorId::new(name);
        if self.records.contains_key(&id) {
            return Err(SignatureError::DuplicateName(id));
        }
        if dim > self.top_dim {
            return Err(SignatureError::DimensionOutOfRange { dim, top: self.top_dim });
        }
        let ill = |reason: String| SignatureError::BoundaryIllDefined { name: id.clone(), reason };
        match (dim, &source, &target) {
            (0, None, None) => {}
            (0, _, _) => return Err(ill("0-cells carry no boundary".into())),
            (_, Some(s), Some(t)) => {
                for b in [s, t] {
                    if b.dim() + 1 != dim {
                        return Err(ill(format!("boundary has dimension {}, expected {}", b.dim(), dim - 1)));
                    }
                    well_defined(self, b).map_err(|f| ill(f.to_string()))?;
                }
                if dim > 1 {
                    match globular(self, s, t) {
                        Ok(true) => {}
                        Ok(false) => {
                            return Err(SignatureError::BoundaryIllTyped {
                                name: id,
                                reason: "source and target have different boundaries".into(),
                            })
                        }
                        Err(e) => return Err(ill(e.to_string())),
                    }
                }
            }
            _ => return Err(ill("boundaries must be given for positive dimension".into())),
        }
        self.records.insert(id.clone(), Record { dim, source, target });
        self.levels[dim].push(id.clone());
        Ok(id)
    }

    /// Returns the generator with this name if it already has exactly these
    /// boundaries, otherwise adds it.
    pub fn ensure_generator(
        &mut self,
        name: impl AsRef<str>,
        dim: usize,
        source: Diagram,
        target: Diagram,
    ) -> Result<GeneratorId, SignatureError> {
        let name = name.as_ref();
        if let Some((id, r)) = self.records.get_key_value(name) {
            if r.dim == dim && r.source.as_ref() == Some(&source) && r.target.as_ref() == Some(&target) {
                return Ok(id.clone());
            }
            return Err(SignatureError::DuplicateName(id.clone()));
        }
        self.add_generator(name, dim, Some(source), Some(target))
    }

    pub fn generator_info(&self, g: &GeneratorId) -> Result<Generator, SignatureError> {
        let r = self.records.get(g).ok_or_else(|| SignatureError::UnknownGenerator(g.clone()))?;
        Ok(Generator {
            id: g.clone(),
            dim: r.dim,
            source: r.source.clone(),
            target: r.target.clone(),
            invertibility: self.invertibility.get(g).cloned(),
        })
    }

    /// `[g]`: the height-1 diagram containing only `g`.
    pub fn atom_diagram(&self, g: &GeneratorId) -> Result<Diagram, SignatureError> {
        let r = self.records.get(g).ok_or_else(|| SignatureError::UnknownGenerator(g.clone()))?;
        Ok(match &r.source {
            None => Diagram::point(g.clone()),
            Some(s) => Diagram::new(s.clone(), vec![Entry::new(g.clone(), Embedding::identity(r.dim - 1))]),
        })
    }

    /// Records `a` and `b` as mutually inverse.
    pub fn link_inverse(&mut self, a: &GeneratorId, b: &GeneratorId) -> Result<(), SignatureError> {
        let (sa, ta) = self.boundaries(a)?;
        let (sb, tb) = self.boundaries(b)?;
        if sa != tb || ta != sb {
            return Err(SignatureError::InverseMismatch { a: a.clone(), b: b.clone() });
        }
        for (x, y) in [(a, b), (b, a)] {
            match self.invertibility.get(x) {
                Some(d) if &d.inverse == y => {}
                Some(_) => return Err(SignatureError::InverseMismatch { a: x.clone(), b: y.clone() }),
                None => {
                    self.invertibility.insert(
                        x.clone(),
                        InvertibilityData { inverse: y.clone(), unit_witness: None, counit_witness: None },
                    );
                }
            }
        }
        Ok(())
    }

    pub fn mark_invertible(&mut self, g: &GeneratorId) -> Result<InvertibilityData, SignatureError> {
        if let Some(d) = self.invertibility.get(g) {
            return Ok(d.clone());
        }
        let dim = self.dim_of(g).ok_or_else(|| SignatureError::UnknownGenerator(g.clone()))?;
        if dim == 0 {
            return Err(SignatureError::NotInvertible(g.clone()));
        }
        let (s, t) = self.boundaries(g)?;
        let (s, t) = (s.clone(), t.clone());
        let inv = self.ensure_generator(format!("{g}^-1"), dim, t, s)?;
        self.link_inverse(g, &inv)?;
        Ok(self.invertibility[g].clone())
    }

    /// The witness cell of the given kind for `g`, created on first request.
    pub fn witness(&mut self, g: &GeneratorId, which: Witness) -> Result<GeneratorId, SignatureError> {
        let data = self.invertibility.get(g).cloned().ok_or_else(|| SignatureError::NoInverse(g.clone()))?;
        let existing = match which {
            Witness::Unit => &data.unit_witness,
            Witness::Counit => &data.counit_witness,
        };
        if let Some(w) = existing {
            return Ok(w.clone());
        }
        let dim = self.dim_of(g).expect("registered");
        if dim >= self.top_dim {
            return Err(SignatureError::WitnessAboveTop(g.clone()));
        }
        let (s, t) = self.boundaries(g)?;
        let zero = Embedding::identity(dim - 1);
        let (base, first, second, suffix) = match which {
            Witness::Unit => (s.clone(), g, &data.inverse, "'"),
            Witness::Counit => (t.clone(), &data.inverse, g, "''"),
        };
        let pair = Diagram::new(
            base.clone(),
            vec![Entry::new(first.clone(), zero.clone()), Entry::new(second.clone(), zero)],
        );
        let empty = Diagram::new(base, vec![]);
        let (ws, wt) = match which {
            Witness::Unit => (pair, empty),
            Witness::Counit => (empty, pair),
        };
        let w = self.ensure_generator(format!("{g}{suffix}"), dim + 1, ws, wt)?;
        self.mark_invertible(&w)?;
        let slot = self.invertibility.get_mut(g).expect("present");
        match which {
            Witness::Unit => slot.unit_witness = Some(w.clone()),
            Witness::Counit => slot.counit_witness = Some(w.clone()),
        }
        Ok(w)
    }

    /// Records an existing generator as a witness of `g`, checking its boundaries.
    pub fn link_witness(&mut self, g: &GeneratorId, which: Witness, w: &GeneratorId) -> Result<(), SignatureError> {
        let data = self.invertibility.get(g).cloned().ok_or_else(|| SignatureError::NoInverse(g.clone()))?;
        let dim = self.dim_of(g).ok_or_else(|| SignatureError::UnknownGenerator(g.clone()))?;
        let (s, t) = self.boundaries(g)?;
        let zero = Embedding::identity(dim - 1);
        let (base, first, second) = match which {
            Witness::Unit => (s.clone(), g.clone(), data.inverse.clone()),
            Witness::Counit => (t.clone(), data.inverse.clone(), g.clone()),
        };
        let pair = Diagram::new(base.clone(), vec![Entry::new(first, zero.clone()), Entry::new(second, zero)]);
        let empty = Diagram::new(base, vec![]);
        let (ws, wt) = self.boundaries(w)?;
        let ok = match which {
            Witness::Unit => *ws == pair && *wt == empty,
            Witness::Counit => *ws == empty && *wt == pair,
        };
        if !ok {
            return Err(SignatureError::BoundaryIllTyped {
                name: w.clone(),
                reason: format!("not a {which:?} witness for {g}"),
            });
        }
        let slot = self.invertibility.get_mut(g).expect("present");
        match which {
            Witness::Unit => slot.unit_witness = Some(w.clone()),
            Witness::Counit => slot.counit_witness = Some(w.clone()),
        }
        Ok(())
    }
}
