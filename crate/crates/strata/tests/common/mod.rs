#![allow(dead_code)]

use strata::{Diagram, Entry, GeneratorId, Signature};

/// One 0-cell `*`, an endo 1-cell `f`, and 2-cells `m: ff => f`,
/// `s, t: f => f`.
pub struct Star {
    pub sig: Signature,
    pub star: GeneratorId,
    pub f: GeneratorId,
    pub m: GeneratorId,
    pub s: GeneratorId,
    pub t: GeneratorId,
}

pub fn e(v: &[usize]) -> Vec<usize> {
    v.to_vec()
}

pub fn entry(g: &GeneratorId, v: &[usize]) -> Entry {
    Entry::new(g.clone(), v.to_vec())
}

pub fn word(star: &GeneratorId, f: &GeneratorId, n: usize) -> Diagram {
    Diagram::new(Diagram::point(star.clone()), (0..n).map(|_| Entry::new(f.clone(), vec![])).collect())
}

pub fn star(top: usize) -> Star {
    let mut sig = Signature::new(top);
    let star = sig.add_generator("*", 0, None, None).unwrap();
    let p = Diagram::point(star.clone());
    let f = sig.add_generator("f", 1, Some(p.clone()), Some(p)).unwrap();
    let w1 = word(&star, &f, 1);
    let w2 = word(&star, &f, 2);
    let m = sig.add_generator("m", 2, Some(w2), Some(w1.clone())).unwrap();
    let s = sig.add_generator("s", 2, Some(w1.clone()), Some(w1.clone())).unwrap();
    let t = sig.add_generator("t", 2, Some(w1.clone()), Some(w1)).unwrap();
    Star { sig, star, f, m, s, t }
}

impl Star {
    pub fn word(&self, n: usize) -> Diagram {
        word(&self.star, &self.f, n)
    }

    /// A 2-diagram over `n` wires.
    pub fn two(&self, n: usize, entries: &[(&GeneratorId, usize)]) -> Diagram {
        Diagram::new(self.word(n), entries.iter().map(|(g, h)| entry(g, &[*h])).collect())
    }
}
