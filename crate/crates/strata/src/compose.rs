//! Composition of diagrams along a shared boundary, inclusions and identities.

use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, Embedding, Side};
use crate::signature::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("boundaries do not match for composition")]
    BoundaryMismatch,
    #[error("cannot compose with a 0-diagram")]
    DimensionTooLow,
    #[error("boundary depth {depth} exceeds dimension {dim}")]
    DepthOutOfRange { depth: usize, dim: usize },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// `D.s^k` or `D.t^k`.
pub fn boundary_iter(sig: &Signature, d: &Diagram, side: Side, k: usize) -> Result<Diagram, ComposeError> {
    if k > d.dim() {
        return Err(ComposeError::DepthOutOfRange { depth: k, dim: d.dim() });
    }
    let mut cur = d.clone();
    for _ in 0..k {
        cur = match side {
            Side::Source => cur.source().expect("positive dimension").clone(),
            Side::Target => cur.target(sig)?,
        };
    }
    Ok(cur)
}

/// Whether `compose(s, d)` is defined.
pub fn composable(sig: &Signature, s: &Diagram, d: &Diagram) -> Result<bool, ComposeError> {
    let (m, n) = (s.dim(), d.dim());
    if m == 0 || n == 0 {
        return Err(ComposeError::DimensionTooLow);
    }
    Ok(if m <= n {
        s.target(sig)? == boundary_iter(sig, d, Side::Source, n - m + 1)?
    } else {
        boundary_iter(sig, s, Side::Target, m - n + 1)? == *d.source().expect("positive dimension")
    })
}

/// `S ∘ D`, the composite placing `S` first.
pub fn compose(sig: &Signature, s: &Diagram, d: &Diagram) -> Result<Diagram, ComposeError> {
    if !composable(sig, s, d)? {
        return Err(ComposeError::BoundaryMismatch);
    }
    Ok(compose_unchecked(s, d))
}

fn compose_unchecked(s: &Diagram, d: &Diagram) -> Diagram {
    let (m, n) = (s.dim(), d.dim());
    if m == n {
        let mut entries = s.entries().to_vec();
        entries.extend_from_slice(d.entries());
        Diagram::new(s.source().expect("positive dimension").clone(), entries)
    } else if m < n {
        let source = compose_unchecked(s, d.source().expect("positive dimension"));
        let level = n - 1 - m;
        let shift = s.height();
        let entries = d
            .entries()
            .iter()
            .map(|e| {
                let mut e = e.clone();
                let h = e.embedding.heights()[level];
                e.embedding = e.embedding.with_height(level, h + shift);
                e
            })
            .collect();
        Diagram::new(source, entries)
    } else {
        let source = compose_unchecked(s.source().expect("positive dimension"), d);
        Diagram::new(source, s.entries().to_vec())
    }
}

/// `inc(S, D) : D ↪ S ∘ D` for `dim S ≤ dim D`.
pub fn inclusion(sig: &Signature, s: &Diagram, d: &Diagram) -> Result<Embedding, ComposeError> {
    let (m, n) = (s.dim(), d.dim());
    if m > n {
        return Err(ComposeError::BoundaryMismatch);
    }
    if !composable(sig, s, d)? {
        return Err(ComposeError::BoundaryMismatch);
    }
    let mut v = vec![0; n];
    v[n - m] = s.height();
    Ok(Embedding::new(v))
}

/// `S ↪ S ∘ D` for `dim S ≥ dim D`: `S` occupies the initial segment.
pub fn inclusion_rev(sig: &Signature, s: &Diagram, d: &Diagram) -> Result<Embedding, ComposeError> {
    if s.dim() < d.dim() {
        return Err(ComposeError::BoundaryMismatch);
    }
    if !composable(sig, s, d)? {
        return Err(ComposeError::BoundaryMismatch);
    }
    Ok(Embedding::identity(s.dim()))
}

pub fn identity_diagram(d: &Diagram) -> Diagram {
    Diagram::new(d.clone(), Vec::new())
}
