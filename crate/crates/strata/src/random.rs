//! Seeded generators of signatures, diagrams and embeddings for fuzzing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compose::boundary_iter;
use crate::diagram::{
    enumerate_embeddings, globular, rewrite, well_defined, well_defined_embedding, Diagram, Embedding, Entry, Side,
};
use crate::signature::{GeneratorId, Signature};

/// Bounds for generated data.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_dim: usize,
    pub max_height: usize,
    pub max_per_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_dim: 3, max_height: 4, max_per_dim: 3 }
    }
}

pub struct Fuzz {
    rng: ChaCha8Rng,
    pub limits: Limits,
}

impl Fuzz {
    pub fn new(seed: u64) -> Self {
        Fuzz { rng: ChaCha8Rng::seed_from_u64(seed), limits: Limits::default() }
    }

    pub fn with_limits(seed: u64, limits: Limits) -> Self {
        Fuzz { rng: ChaCha8Rng::seed_from_u64(seed), limits }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.rng.gen_range(0..n)
        }
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// A signature of dimension `top` with one to `max_per_dim` generators
    /// per level. Level 1 always has an endomorphism so long diagrams exist.
    pub fn signature(&mut self, top: usize) -> Signature {
        self.signature_in(top, top)
    }

    /// Generators up to dimension `top`, in a signature with room up to
    /// `capacity` for cells added later.
    pub fn signature_in(&mut self, top: usize, capacity: usize) -> Signature {
        let mut sig = Signature::new(capacity.max(top));
        let per = self.limits.max_per_dim.max(1);
        let n0 = 1 + self.below(per.min(2));
        for i in 0..n0 {
            sig.add_generator(format!("x{i}"), 0, None, None).expect("fresh 0-cell");
        }
        for k in 1..=top {
            let n = 1 + self.below(per);
            let mut made = 0;
            let mut attempts = 0;
            while made < n && attempts < 20 {
                attempts += 1;
                let (s, t) = if k == 1 {
                    let pts = sig.level(0).to_vec();
                    let (a, b) = if made == 0 {
                        (pts[0].clone(), pts[0].clone())
                    } else {
                        (pts[self.below(pts.len())].clone(), pts[self.below(pts.len())].clone())
                    };
                    (Diagram::point(a), Diagram::point(b))
                } else {
                    // The first cell consumes a single lower cell so that
                    // every level has something that applies often.
                    let lower = sig.level(k - 1).to_vec();
                    let s = if made == 0 && !lower.is_empty() {
                        let g = &lower[self.below(lower.len())];
                        sig.atom_diagram(g).expect("known generator")
                    } else {
                        self.diagram_capped(&sig, k - 1, 2)
                    };
                    let t = self.parallel(&sig, &s);
                    (s, t)
                };
                let name = format!("{}{}", ["x", "f", "a", "p"][k.min(3)], made);
                if sig.add_generator(name, k, Some(s), Some(t)).is_ok() {
                    made += 1;
                }
            }
        }
        sig
    }

    /// A well-defined `dim`-diagram.
    pub fn diagram(&mut self, sig: &Signature, dim: usize) -> Diagram {
        let h = self.limits.max_height;
        self.diagram_capped(sig, dim, h)
    }

    fn diagram_capped(&mut self, sig: &Signature, dim: usize, cap: usize) -> Diagram {
        let pts = sig.level(0);
        let base = Diagram::point(pts.choose(&mut self.rng).expect("signature has 0-cells").clone());
        self.diagram_over_capped(sig, &base, dim, cap)
    }

    /// A well-defined `dim`-diagram whose iterated source of depth
    /// `dim - base.dim()` is `base`.
    pub fn diagram_over(&mut self, sig: &Signature, base: &Diagram, dim: usize) -> Diagram {
        let h = self.limits.max_height;
        self.diagram_over_capped(sig, base, dim, h)
    }

    fn diagram_over_capped(&mut self, sig: &Signature, base: &Diagram, dim: usize, cap: usize) -> Diagram {
        // Empty levels make for dull instances: retry a few times before
        // accepting one, except in a small share of cases.
        let allow_empty = self.coin(0.1);
        let mut best = None;
        for _ in 0..8 {
            let mut cur = base.clone();
            let mut full = true;
            while cur.dim() < dim {
                cur = self.extend_between(sig, cur, 1, cap);
                full &= cur.height() > 0;
            }
            if full || allow_empty {
                return cur;
            }
            best = Some(cur);
        }
        best.unwrap_or_else(|| base.clone())
    }

    /// Grows a diagram with the given source by up to `cap` random cells.
    pub fn extend(&mut self, sig: &Signature, source: Diagram, cap: usize) -> Diagram {
        self.extend_between(sig, source, 0, cap)
    }

    pub fn extend_between(&mut self, sig: &Signature, source: Diagram, lo: usize, cap: usize) -> Diagram {
        let k = source.dim() + 1;
        let lo = lo.min(cap);
        let want = lo + self.below(cap - lo + 1);
        let mut slice = source.clone();
        let mut entries = Vec::new();
        let gens = sig.level(k);
        for _ in 0..want {
            let mut options: Vec<(GeneratorId, Embedding)> = Vec::new();
            for g in gens {
                let (gs, _) = sig.boundaries(g).expect("positive dimension");
                if let Ok(es) = enumerate_embeddings(sig, gs, &slice) {
                    options.extend(es.into_iter().map(|e| (g.clone(), e)));
                }
            }
            let Some((g, e)) = options.choose(&mut self.rng).cloned() else { break };
            let (gs, gt) = sig.boundaries(&g).expect("positive dimension");
            match rewrite(sig, &slice, &e, gs, gt) {
                Ok(next) if next.height() <= self.limits.max_height.max(1) || slice.dim() == 0 => {
                    slice = next;
                    entries.push(Entry::new(g, e));
                }
                _ => break,
            }
        }
        Diagram::new(source, entries)
    }

    /// A diagram globular with `s`, different from it when one is found.
    pub fn parallel(&mut self, sig: &Signature, s: &Diagram) -> Diagram {
        if s.dim() == 0 {
            return s.clone();
        }
        let target = s.target(sig).ok();
        let src = s.source().expect("positive dimension").clone();
        let mut candidates = Vec::new();
        for _ in 0..12 {
            let cap = self.limits.max_height.min(3);
            let t = self.extend(sig, src.clone(), cap);
            if t.target(sig).ok() == target && t != *s {
                candidates.push(t);
            }
        }
        if let Some(t) = self.rewritten(sig, s) {
            candidates.push(t);
        }
        candidates.choose(&mut self.rng).cloned().unwrap_or_else(|| s.clone())
    }

    /// `s` rewritten once by a generator one dimension up, if any applies.
    fn rewritten(&mut self, sig: &Signature, s: &Diagram) -> Option<Diagram> {
        let mut options = Vec::new();
        for g in sig.level(s.dim() + 1) {
            let (gs, gt) = sig.boundaries(g).ok()?;
            for e in enumerate_embeddings(sig, gs, s).unwrap_or_default() {
                options.push((gs.clone(), gt.clone(), e));
            }
        }
        let (gs, gt, e) = options.choose(&mut self.rng)?.clone();
        let out = rewrite(sig, s, &e, &gs, &gt).ok()?;
        (globular(sig, s, &out).ok()? && out.height() <= self.limits.max_height).then_some(out)
    }

    /// A random sub-diagram `S` of `d` with a well-defined `e: S ↪ d`.
    pub fn sub_diagram(&mut self, sig: &Signature, d: &Diagram) -> (Diagram, Embedding) {
        for _ in 0..6 {
            if let Some(found) = self.try_sub(sig, d) {
                if well_defined(sig, &found.0).is_ok() && well_defined_embedding(sig, &found.1, &found.0, d).unwrap_or(false) {
                    return found;
                }
            }
        }
        self.full_width_sub(sig, d)
    }

    fn full_width_sub(&mut self, sig: &Signature, d: &Diagram) -> (Diagram, Embedding) {
        if d.dim() == 0 {
            return (d.clone(), Embedding::identity(0));
        }
        let (a, b) = self.range(d.height());
        let slice = d.slice(sig, a).expect("in range");
        let s = Diagram::new(slice, d.entries()[a..b].to_vec());
        (s, Embedding::cons(a, &Embedding::identity(d.dim() - 1)))
    }

    /// A subrange `a..b` of `0..n`, usually non-empty.
    fn range(&mut self, n: usize) -> (usize, usize) {
        if n == 0 || self.coin(0.15) {
            let a = self.below(n + 1);
            return (a, a);
        }
        let a = self.below(n);
        (a, a + 1 + self.below(n - a))
    }

    fn try_sub(&mut self, sig: &Signature, d: &Diagram) -> Option<(Diagram, Embedding)> {
        if d.dim() == 0 {
            return Some((d.clone(), Embedding::identity(0)));
        }
        let (a, b) = self.range(d.height());
        let slice = d.slice(sig, a).ok()?;
        let (base, e0) = self.sub_diagram(sig, &slice);
        let mut entries = Vec::with_capacity(b - a);
        for entry in &d.entries()[a..b] {
            entries.push(Entry::new(entry.generator.clone(), entry.embedding.checked_sub(&e0)?));
        }
        Some((Diagram::new(base, entries), Embedding::cons(a, &e0)))
    }

    /// A pair `(S, D)` for which `compose(S, D)` is defined, with
    /// `dim S = m` and `dim D = n`, both positive.
    pub fn composable(&mut self, sig: &Signature, m: usize, n: usize) -> (Diagram, Diagram) {
        let s = self.diagram(sig, m);
        let base = if n >= m {
            s.target(sig).expect("well-defined")
        } else {
            boundary_iter(sig, &s, Side::Target, m - n + 1).expect("depth in range")
        };
        let d = self.diagram_over(sig, &base, n);
        (s, d)
    }
}
