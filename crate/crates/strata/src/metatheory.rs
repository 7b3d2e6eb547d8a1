//! Executable forms of the structural laws of diagrams, checked on random
//! instances drawn from [`Fuzz`].

use std::time::{Duration, Instant};

use crate::compose::{boundary_iter, compose, inclusion, inclusion_rev, identity_diagram};
use crate::diagram::{
    compose_embeddings, identity_embedding, lift, rewrite, well_defined, well_defined_embedding, Diagram, Embedding,
    Side,
};
use crate::random::{Fuzz, Limits};
use crate::signature::Signature;

pub type Outcome = Result<(), String>;

pub struct Property {
    pub name: &'static str,
    pub check: fn(&mut Fuzz) -> Outcome,
}

pub const PROPERTIES: &[Property] = &[
    Property { name: "identity rewrites", check: identity_rewrites },
    Property { name: "well-defined rewrites, lifts and composite embeddings", check: well_defined_rewrites },
    Property { name: "globularity on slices", check: globularity_on_slices },
    Property { name: "explicit rewrites", check: explicit_rewrites },
    Property { name: "composite lifts", check: composite_lifts },
    Property { name: "composite rewrites", check: composite_rewrites },
    Property { name: "associative composite embeddings", check: associative_embeddings },
    Property { name: "well-defined composition", check: well_defined_composition },
    Property { name: "well-defined inclusions", check: well_defined_inclusions },
    Property { name: "well-behaved whiskering", check: whiskering },
    Property { name: "interaction of lifts and inclusions", check: lifts_and_inclusions },
    Property { name: "associative diagram composition", check: associative_composition },
    Property { name: "composition of inclusions", check: composition_of_inclusions },
    Property { name: "distributive diagram composition", check: distributive_composition },
    Property { name: "triple inclusion property", check: triple_inclusion },
    Property { name: "identity-embedding cancellation", check: identity_cancellation },
    Property { name: "unit laws for identity diagrams", check: unit_laws },
];

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<(usize, String)>,
    pub elapsed: Duration,
}

/// Runs every property on `cases` instances. Case `i` of each property is
/// seeded from `seed` and `i` alone, so failures replay individually.
pub fn run_all(seed: u64, cases: usize) -> Vec<PropertyReport> {
    run_all_with(seed, cases, Limits::default())
}

pub fn run_all_with(seed: u64, cases: usize, limits: Limits) -> Vec<PropertyReport> {
    PROPERTIES.iter().enumerate().map(|(k, p)| run_one(p, seed ^ ((k as u64) << 32), cases, limits)).collect()
}

pub fn run_one(p: &Property, seed: u64, cases: usize, limits: Limits) -> PropertyReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..cases {
        let mut fz = Fuzz::with_limits(seed.wrapping_add(i as u64), limits);
        if let Err(msg) = (p.check)(&mut fz) {
            failures.push((i, msg));
        }
    }
    PropertyReport { name: p.name, cases, failures, elapsed: start.elapsed() }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

/// A dimension in `lo..=max_dim`, or `lo` if the limit is lower.
fn top_dim(fz: &mut Fuzz, lo: usize) -> usize {
    lo + fz.below(fz.limits.max_dim.max(lo) + 1 - lo)
}

/// A signature of dimension 1 to `max_dim` and a diagram of dimension at least `min_dim`.
fn setup(fz: &mut Fuzz, min_dim: usize) -> (Signature, Diagram) {
    let top = top_dim(fz, min_dim.max(1));
    let sig = fz.signature(top);
    let dim = min_dim + fz.below(top + 1 - min_dim);
    let d = fz.diagram(&sig, dim);
    (sig, d)
}

/// Composite embedding unfolded literally: `(f∘e).h = e.h + f.h` and
/// `(f∘e).e = lift(f.e, D[e.h]) ∘ e.e`, where `e: S ↪ D` and `f: D ↪ A`.
/// Each lift is checked to land in the expected slice of `A`.
pub fn composite_literal(
    sig: &Signature,
    f: &Embedding,
    a: &Diagram,
    e: &Embedding,
    d: &Diagram,
    s: &Diagram,
) -> Result<Embedding, String> {
    if d.dim() == 0 {
        return Ok(Embedding::identity(0));
    }
    let (eh, fh) = (e.h().ok_or("empty embedding")?, f.h().ok_or("empty embedding")?);
    let d_slice = d.slice(sig, eh).map_err(err)?;
    let a_slice = a.slice(sig, fh).map_err(err)?;
    let d_src = d.source().expect("positive dimension");
    let lifted = lift(sig, &f.rest(), d_src, &d_slice).map_err(err)?;
    let landed = rewrite(sig, &a_slice, &f.rest(), d_src, &d_slice).map_err(err)?;
    let expected = a.slice(sig, fh + eh).map_err(err)?;
    if landed != expected {
        return Err(format!("lift lands in {landed}, expected slice {} of A = {expected}", fh + eh));
    }
    let inner = composite_literal(sig, &lifted, &expected, &e.rest(), &d_slice, s.source().expect("positive dimension"))?;
    Ok(Embedding::cons(eh + fh, &inner))
}

fn identity_rewrites(fz: &mut Fuzz) -> Outcome {
    let (sig, d) = setup(fz, 1);
    let (s, e) = fz.sub_diagram(&sig, &d);
    let r = rewrite(&sig, &d, &e, &s, &s).map_err(err)?;
    ensure(r == d, || format!("rewrite({d}, {e}, S, S) = {r}"))
}

fn well_defined_rewrites(fz: &mut Fuzz) -> Outcome {
    let (sig, d) = setup(fz, 1);
    let (s, e) = fz.sub_diagram(&sig, &d);
    let t = fz.parallel(&sig, &s);
    let r = rewrite(&sig, &d, &e, &s, &t).map_err(err)?;
    well_defined(&sig, &r).map_err(|f| format!("rewrite of {d} at {e} ill-defined: {f}"))?;
    let l = lift(&sig, &e, &s, &t).map_err(err)?;
    ensure(well_defined_embedding(&sig, &l, &t, &r).map_err(err)?, || format!("lift {l} of {t} into {r} ill-defined"))?;
    let (s2, e2) = fz.sub_diagram(&sig, &s);
    let c = compose_embeddings(&e, &e2).map_err(err)?;
    ensure(well_defined_embedding(&sig, &c, &s2, &d).map_err(err)?, || format!("composite {c} ill-defined"))
}

fn globularity_on_slices(fz: &mut Fuzz) -> Outcome {
    let (sig, d) = setup(fz, 2);
    let src = d.source().expect("positive dimension");
    let ss = src.source().expect("dimension at least 2");
    let st = src.target(&sig).map_err(err)?;
    for i in 0..d.height() {
        let sl = d.slice(&sig, i).map_err(err)?;
        ensure(sl.source() == Some(ss), || format!("slice {i} of {d} has another source"))?;
        ensure(sl.target(&sig).map_err(err)? == st, || format!("slice {i} of {d} has another target"))?;
    }
    Ok(())
}

fn explicit_rewrites(fz: &mut Fuzz) -> Outcome {
    let (sig, a) = setup(fz, 1);
    let (s, e) = fz.sub_diagram(&sig, &a);
    let t = fz.parallel(&sig, &s);
    let r = rewrite(&sig, &a, &e, &s, &t).map_err(err)?;
    let eh = e.h().expect("positive dimension");
    let (ns, nt, na) = (s.height(), t.height(), a.height());
    for j in 0..=r.height() {
        let got = r.slice(&sig, j).map_err(err)?;
        let want = if j <= eh {
            a.slice(&sig, j).map_err(err)?
        } else if j <= eh + nt {
            let base = a.slice(&sig, eh).map_err(err)?;
            let tj = t.slice(&sig, j - eh).map_err(err)?;
            rewrite(&sig, &base, &e.rest(), s.source().expect("positive dimension"), &tj).map_err(err)?
        } else {
            a.slice(&sig, j + ns - nt).map_err(err)?
        };
        ensure(got == want, || format!("slice {j} of rewrite: {got} vs {want} (|A|={na})"))?;
    }
    Ok(())
}

/// `B ⊇ C` via `f`, `A` parallel to `C`, `A ⊇ S` via `e`, `T` parallel to `S`.
struct Nested {
    sig: Signature,
    a: Diagram,
    b: Diagram,
    c: Diagram,
    s: Diagram,
    t: Diagram,
    e: Embedding,
    f: Embedding,
}

fn nested(fz: &mut Fuzz) -> Nested {
    let (sig, b) = setup(fz, 1);
    let (c, f) = fz.sub_diagram(&sig, &b);
    let a = fz.parallel(&sig, &c);
    let (s, e) = fz.sub_diagram(&sig, &a);
    let t = fz.parallel(&sig, &s);
    Nested { sig, a, b, c, s, t, e, f }
}

fn composite_lifts(fz: &mut Fuzz) -> Outcome {
    let Nested { sig, a, c, s, t, e, f, .. } = nested(fz);
    let lf = lift(&sig, &f, &c, &a).map_err(err)?;
    let lhs = lift(&sig, &compose_embeddings(&lf, &e).map_err(err)?, &s, &t).map_err(err)?;
    let ra = rewrite(&sig, &a, &e, &s, &t).map_err(err)?;
    let rhs = compose_embeddings(&lift(&sig, &f, &c, &ra).map_err(err)?, &lift(&sig, &e, &s, &t).map_err(err)?)
        .map_err(err)?;
    ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))
}

fn composite_rewrites(fz: &mut Fuzz) -> Outcome {
    let Nested { sig, a, b, c, s, t, e, f } = nested(fz);
    let ra = rewrite(&sig, &a, &e, &s, &t).map_err(err)?;
    let lhs = rewrite(&sig, &b, &f, &c, &ra).map_err(err)?;
    let rb = rewrite(&sig, &b, &f, &c, &a).map_err(err)?;
    let lf = lift(&sig, &f, &c, &a).map_err(err)?;
    let rhs = rewrite(&sig, &rb, &compose_embeddings(&lf, &e).map_err(err)?, &s, &t).map_err(err)?;
    ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))
}

fn associative_embeddings(fz: &mut Fuzz) -> Outcome {
    let (sig, n) = setup(fz, 1);
    let (m, g) = fz.sub_diagram(&sig, &n);
    let (d, f) = fz.sub_diagram(&sig, &m);
    let (_s, e) = fz.sub_diagram(&sig, &d);
    let lhs = compose_embeddings(&g, &compose_embeddings(&f, &e).map_err(err)?).map_err(err)?;
    let rhs = compose_embeddings(&compose_embeddings(&g, &f).map_err(err)?, &e).map_err(err)?;
    ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))
}

/// Signature plus dimensions `m`, `n` of a composable pair.
fn pair(fz: &mut Fuzz) -> (Signature, Diagram, Diagram) {
    let top = top_dim(fz, 1);
    let sig = fz.signature(top);
    let m = 1 + fz.below(top);
    let n = 1 + fz.below(top);
    let (s, d) = fz.composable(&sig, m, n);
    (sig, s, d)
}

fn well_defined_composition(fz: &mut Fuzz) -> Outcome {
    let (sig, s, d) = pair(fz);
    let c = compose(&sig, &s, &d).map_err(err)?;
    well_defined(&sig, &c).map_err(|f| format!("{s} ∘ {d} = {c} ill-defined: {f}"))
}

fn well_defined_inclusions(fz: &mut Fuzz) -> Outcome {
    let (sig, s, d) = pair(fz);
    let c = compose(&sig, &s, &d).map_err(err)?;
    if s.dim() <= d.dim() {
        let e = inclusion(&sig, &s, &d).map_err(err)?;
        ensure(well_defined_embedding(&sig, &e, &d, &c).map_err(err)?, || format!("inc {e} of {d} into {c}"))?;
    }
    if s.dim() >= d.dim() {
        let e = inclusion_rev(&sig, &s, &d).map_err(err)?;
        ensure(well_defined_embedding(&sig, &e, &s, &c).map_err(err)?, || format!("inc_rev {e} of {s} into {c}"))?;
    }
    Ok(())
}

fn whiskering(fz: &mut Fuzz) -> Outcome {
    let (sig, s, d) = pair(fz);
    let c = compose(&sig, &s, &d).map_err(err)?;
    let (m, n) = (s.dim(), d.dim());
    if n > m {
        for i in 0..d.height() {
            let want = compose(&sig, &s, &d.slice(&sig, i).map_err(err)?).map_err(err)?;
            ensure(c.slice(&sig, i).map_err(err)? == want, || format!("slice {i} of {c}"))?;
        }
    } else if m > n {
        for i in 0..s.height() {
            let want = compose(&sig, &s.slice(&sig, i).map_err(err)?, &d).map_err(err)?;
            ensure(c.slice(&sig, i).map_err(err)? == want, || format!("slice {i} of {c}"))?;
        }
    }
    Ok(())
}

fn lifts_and_inclusions(fz: &mut Fuzz) -> Outcome {
    let (sig, s, d) = pair(fz);
    let (m, n) = (s.dim(), d.dim());
    if n > m {
        let inc = inclusion(&sig, &s, &d).map_err(err)?;
        for i in 0..d.height() {
            let di = d.slice(&sig, i).map_err(err)?;
            let lhs = inclusion(&sig, &s, &di).map_err(err)?;
            let rhs = lift(&sig, &inc.rest(), d.source().expect("positive dimension"), &di).map_err(err)?;
            ensure(lhs == rhs, || format!("slice {i}: {lhs} vs {rhs}"))?;
        }
    } else if m > n {
        let inc = inclusion_rev(&sig, &s, &d).map_err(err)?;
        for i in 0..s.height() {
            let si = s.slice(&sig, i).map_err(err)?;
            let lhs = inclusion_rev(&sig, &si, &d).map_err(err)?;
            let rhs = lift(&sig, &inc.rest(), s.source().expect("positive dimension"), &si).map_err(err)?;
            ensure(lhs == rhs, || format!("slice {i}: {lhs} vs {rhs}"))?;
        }
    }
    Ok(())
}

/// `(S, D, M)` with `dim S = dim D = n < dim M`, all composable in sequence.
fn triple_same(fz: &mut Fuzz) -> Option<(Signature, Diagram, Diagram, Diagram)> {
    let top = top_dim(fz, 2);
    let sig = fz.signature(top);
    let n = 1 + fz.below(top - 1);
    let l = n + 1 + fz.below(top - n);
    let s = fz.diagram(&sig, n);
    let d = fz.diagram_over(&sig, &s.target(&sig).ok()?, n);
    let m = fz.diagram_over(&sig, &d.target(&sig).ok()?, l);
    Some((sig, s, d, m))
}

fn associative_composition(fz: &mut Fuzz) -> Outcome {
    let Some((sig, s, d, m)) = triple_same(fz) else { return Ok(()) };
    let lhs = compose(&sig, &s, &compose(&sig, &d, &m).map_err(err)?).map_err(err)?;
    let rhs = compose(&sig, &compose(&sig, &s, &d).map_err(err)?, &m).map_err(err)?;
    ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))
}

fn composition_of_inclusions(fz: &mut Fuzz) -> Outcome {
    let Some((sig, s, d, m)) = triple_same(fz) else { return Ok(()) };
    let dm = compose(&sig, &d, &m).map_err(err)?;
    let lhs = compose_embeddings(&inclusion(&sig, &s, &dm).map_err(err)?, &inclusion(&sig, &d, &m).map_err(err)?)
        .map_err(err)?;
    let rhs = inclusion(&sig, &compose(&sig, &s, &d).map_err(err)?, &m).map_err(err)?;
    ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))
}

/// `(S, D, M)` with `dim S = m < dim D, dim M` and `D ∘ M`, `S ∘ D`, `S ∘ M` defined.
fn whisker_triple(fz: &mut Fuzz, ordered: bool) -> Option<(Signature, Diagram, Diagram, Diagram)> {
    let top = top_dim(fz, 2);
    let sig = fz.signature(top);
    let m = 1 + fz.below(top - 1);
    let n = m + 1 + fz.below(top - m);
    let l = m + 1 + fz.below(top - m);
    let (n, l) = if ordered && n > l { (l, n) } else { (n, l) };
    let s = fz.diagram(&sig, m);
    let d = fz.diagram_over(&sig, &s.target(&sig).ok()?, n);
    let base = if l >= n { d.target(&sig).ok()? } else { boundary_iter(&sig, &d, Side::Target, n - l + 1).ok()? };
    let mm = fz.diagram_over(&sig, &base, l);
    Some((sig, s, d, mm))
}

fn distributive_composition(fz: &mut Fuzz) -> Outcome {
    let Some((sig, s, d, m)) = whisker_triple(fz, false) else { return Ok(()) };
    let lhs = compose(&sig, &s, &compose(&sig, &d, &m).map_err(err)?).map_err(err)?;
    let sd = compose(&sig, &s, &d).map_err(err)?;
    let sm = compose(&sig, &s, &m).map_err(err)?;
    let rhs = compose(&sig, &sd, &sm).map_err(err)?;
    ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))
}

fn triple_inclusion(fz: &mut Fuzz) -> Outcome {
    let Some((sig, s, d, m)) = whisker_triple(fz, true) else { return Ok(()) };
    let dm = compose(&sig, &d, &m).map_err(err)?;
    let lhs = compose_embeddings(&inclusion(&sig, &s, &dm).map_err(err)?, &inclusion(&sig, &d, &m).map_err(err)?)
        .map_err(err)?;
    let sd = compose(&sig, &s, &d).map_err(err)?;
    let sm = compose(&sig, &s, &m).map_err(err)?;
    let rhs = compose_embeddings(&inclusion(&sig, &sd, &sm).map_err(err)?, &inclusion(&sig, &s, &m).map_err(err)?)
        .map_err(err)?;
    ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))
}

fn identity_cancellation(fz: &mut Fuzz) -> Outcome {
    let (sig, d) = setup(fz, 0);
    let id = identity_embedding(&d);
    ensure(well_defined_embedding(&sig, &id, &d, &d).map_err(err)?, || format!("identity on {d} ill-defined"))?;
    let (s, e) = fz.sub_diagram(&sig, &d);
    let ids = identity_embedding(&s);
    ensure(compose_embeddings(&id, &e).map_err(err)? == e, || format!("id ∘ {e}"))?;
    ensure(compose_embeddings(&e, &ids).map_err(err)? == e, || format!("{e} ∘ id"))
}

fn unit_laws(fz: &mut Fuzz) -> Outcome {
    let (sig, d) = setup(fz, 1);
    let n = d.dim();
    for k in 1..=n {
        let below = boundary_iter(&sig, &d, Side::Source, k).map_err(err)?;
        let lhs = compose(&sig, &identity_diagram(&below), &d).map_err(err)?;
        ensure(lhs == d, || format!("id(s^{k}) ∘ {d} = {lhs}"))?;
        let above = boundary_iter(&sig, &d, Side::Target, k).map_err(err)?;
        let rhs = compose(&sig, &d, &identity_diagram(&above)).map_err(err)?;
        ensure(rhs == d, || format!("{d} ∘ id(t^{k}) = {rhs}"))?;
    }
    // Boosting: whiskering an identity gives the identity on the whiskered diagram.
    let m = 1 + fz.below(n);
    let (s, d) = fz.composable(&sig, m, n);
    let c = compose(&sig, &s, &d).map_err(err)?;
    let lhs = compose(&sig, &s, &identity_diagram(&d)).map_err(err)?;
    ensure(lhs == identity_diagram(&c), || format!("{s} ∘ id({d}) = {lhs}"))?;
    if n > 1 {
        let k = 1 + fz.below(n - 1);
        let (s, d) = fz.composable(&sig, n, k);
        let c = compose(&sig, &s, &d).map_err(err)?;
        let lhs = compose(&sig, &identity_diagram(&s), &d).map_err(err)?;
        ensure(lhs == identity_diagram(&c), || format!("id({s}) ∘ {d} = {lhs}"))?;
    }
    Ok(())
}
