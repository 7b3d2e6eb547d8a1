mod common;

use common::{entry, star};
use strata::compose::boundary_iter;
use strata::diagram::{
    compose_embeddings, equivalent, globular, identity_embedding, lift, rewrite, well_defined, well_defined_embedding,
};
use strata::{compose, identity_diagram, inclusion, inclusion_rev, Diagram, Embedding, Side, Signature, SignatureError};

fn emb(v: &[usize]) -> Embedding {
    Embedding::new(v.to_vec())
}

#[test]
fn generators_register_with_checked_boundaries() {
    let st = star(3);
    let info = st.sig.generator_info(&st.m).unwrap();
    assert_eq!(info.dim, 2);
    let (s, t) = st.sig.boundaries(&st.m).unwrap();
    assert_eq!((s.height(), t.height()), (2, 1));
    assert_eq!(s.source(), t.source());
    assert_eq!(s.target(&st.sig).unwrap(), t.target(&st.sig).unwrap());

    let star_info = st.sig.generator_info(&st.star).unwrap();
    assert_eq!(star_info.dim, 0);
    assert!(st.sig.boundaries(&st.star).is_err());
    let unknown = strata::GeneratorId::new("nope");
    assert!(matches!(st.sig.generator_info(&unknown), Err(SignatureError::UnknownGenerator(_))));
}

#[test]
fn mismatched_boundaries_are_rejected() {
    let mut sig = Signature::new(2);
    let a = sig.add_generator("a", 0, None, None).unwrap();
    let b = sig.add_generator("b", 0, None, None).unwrap();
    let pa = Diagram::point(a.clone());
    let pb = Diagram::point(b.clone());
    let f = sig.add_generator("f", 1, Some(pa.clone()), Some(pb.clone())).unwrap();
    let g = sig.add_generator("g", 1, Some(pb.clone()), Some(pa.clone())).unwrap();
    let wf = Diagram::new(pa, vec![entry(&f, &[])]);
    let wg = Diagram::new(pb, vec![entry(&g, &[])]);
    let err = sig.add_generator("bad", 2, Some(wf), Some(wg)).unwrap_err();
    assert!(matches!(err, SignatureError::BoundaryIllTyped { .. }), "{err}");
    assert!(matches!(sig.add_generator("f", 0, None, None), Err(SignatureError::DuplicateName(_))));
}

#[test]
fn atoms_use_zero_embeddings() {
    let st = star(3);
    assert_eq!(st.sig.atom_diagram(&st.star).unwrap(), Diagram::point(st.star.clone()));
    let f = st.sig.atom_diagram(&st.f).unwrap();
    assert_eq!(f, st.word(1));
    assert_eq!(f.entries()[0].embedding.heights(), &[] as &[usize]);
    assert_eq!(st.sig.atom_diagram(&st.m).unwrap(), st.two(2, &[(&st.m, 0)]));
}

#[test]
fn inversion_is_lazy_and_idempotent() {
    let mut st = star(3);
    let first = st.sig.mark_invertible(&st.s).unwrap();
    let (s, t) = st.sig.boundaries(&st.s).unwrap();
    let (is, it) = st.sig.boundaries(&first.inverse).unwrap();
    assert!(equivalent(s, it) && equivalent(t, is));
    assert!(first.unit_witness.is_none());
    assert_eq!(st.sig.mark_invertible(&st.s).unwrap(), first);

    let w = st.sig.witness(&st.s, strata::Witness::Unit).unwrap();
    let (ws, wt) = st.sig.boundaries(&w).unwrap();
    let pair = Diagram::new(st.word(1), vec![entry(&st.s, &[0]), entry(&first.inverse, &[0])]);
    assert_eq!(ws, &pair);
    assert_eq!(wt, &identity_diagram(&st.word(1)));

    // At the top dimension there is no room for witnesses.
    let mut top = star(2);
    top.sig.mark_invertible(&top.s).unwrap();
    assert!(top.sig.witness(&top.s, strata::Witness::Unit).is_err());
}

#[test]
fn slices_follow_each_entry() {
    let st = star(3);
    let d = st.two(3, &[(&st.m, 0), (&st.m, 0)]);
    assert_eq!(d.slice(&st.sig, 0).unwrap(), st.word(3));
    assert_eq!(d.slice(&st.sig, 1).unwrap(), st.word(2));
    assert_eq!(d.slice(&st.sig, 2).unwrap(), st.word(1));
    assert_eq!(d.target(&st.sig).unwrap(), st.word(1));
    assert!(d.slice(&st.sig, 3).is_err());
    let d = st.two(3, &[(&st.s, 1)]);
    assert_eq!(d.slice(&st.sig, 1).unwrap(), st.word(3));
    assert_eq!(identity_diagram(&st.word(2)).target(&st.sig).unwrap(), st.word(2));
    assert_eq!(st.sig.atom_diagram(&st.m).unwrap().target(&st.sig).unwrap(), st.word(1));
}

#[test]
fn rewriting_splices_lists() {
    let st = star(3);
    let d = st.word(3);
    let out = rewrite(&st.sig, &d, &emb(&[1]), &st.word(1), &st.word(2)).unwrap();
    assert_eq!(out, st.word(4));

    let d = st.two(3, &[(&st.s, 0), (&st.s, 1), (&st.s, 2), (&st.m, 0)]);
    let s = st.two(3, &[(&st.s, 1), (&st.s, 2)]);
    let t = st.two(3, &[(&st.s, 1)]);
    let e = emb(&[1, 0]);
    assert!(well_defined_embedding(&st.sig, &e, &s, &d).unwrap());
    // Both sides are 2-diagrams over [f,f,f] ending in [f,f,f].
    assert!(globular(&st.sig, &s, &t).unwrap());
    let out = rewrite(&st.sig, &d, &e, &s, &t).unwrap();
    assert_eq!(out.height(), 3);
    assert_eq!(out, st.two(3, &[(&st.s, 0), (&st.s, 1), (&st.m, 0)]));
    assert!(rewrite(&st.sig, &d, &e, &s, &s).unwrap() == d);
}

#[test]
fn lifts_keep_height_data() {
    let st = star(3);
    let s = st.two(2, &[(&st.s, 0)]);
    let t = st.two(2, &[(&st.s, 0), (&st.s, 1)]);
    let e = emb(&[1, 0]);
    assert_eq!(lift(&st.sig, &e, &s, &t).unwrap(), e);
    let id = identity_embedding(&s);
    assert_eq!(lift(&st.sig, &id, &s, &t).unwrap(), identity_embedding(&t));
}

#[test]
fn embedding_composition_adds() {
    assert_eq!(compose_embeddings(&emb(&[1]), &emb(&[2])).unwrap(), emb(&[3]));
    assert_eq!(compose_embeddings(&emb(&[1, 0]), &emb(&[2, 3])).unwrap(), emb(&[3, 3]));
    assert!(compose_embeddings(&emb(&[1]), &emb(&[2, 3])).is_err());
    let e = emb(&[4, 1]);
    assert_eq!(compose_embeddings(&emb(&[0, 0]), &e).unwrap(), e);
    assert_eq!(compose_embeddings(&e, &emb(&[0, 0])).unwrap(), e);
    let st = star(3);
    assert_eq!(identity_embedding(&Diagram::point(st.star.clone())), emb(&[]));
    assert_eq!(identity_embedding(&st.two(2, &[(&st.m, 0)])), emb(&[0, 0]));
}

#[test]
fn well_definedness_reports_the_failing_height() {
    let st = star(3);
    let bad = st.two(2, &[(&st.m, 2)]);
    let failure = well_defined(&st.sig, &bad).unwrap_err();
    assert_eq!(failure.height, 0);
    assert!(well_defined(&st.sig, &st.two(3, &[(&st.m, 0), (&st.m, 0)])).is_ok());
    assert!(well_defined(&st.sig, &st.sig.atom_diagram(&st.m).unwrap()).is_ok());
}

#[test]
fn embeddings_check_generators_and_offsets() {
    let st = star(3);
    let s = st.two(1, &[(&st.s, 0)]);
    let d = st.two(2, &[(&st.s, 1)]);
    assert!(well_defined_embedding(&st.sig, &emb(&[0, 1]), &s, &d).unwrap());
    assert!(!well_defined_embedding(&st.sig, &emb(&[1, 1]), &s, &d).unwrap());
    assert!(well_defined_embedding(&st.sig, &identity_embedding(&d), &d, &d).unwrap());
}

#[test]
fn equivalence_and_globularity() {
    let st = star(3);
    let d = st.two(2, &[(&st.s, 1)]);
    assert!(equivalent(&d, &d));
    assert!(!equivalent(&d, &st.two(2, &[(&st.s, 0)])));
    let m = st.sig.atom_diagram(&st.m).unwrap();
    let other = st.two(2, &[(&st.s, 0), (&st.m, 0)]);
    assert!(globular(&st.sig, &m, &other).unwrap());
    assert!(globular(&st.sig, &st.word(1), &st.word(2)).unwrap());
    assert!(!globular(&st.sig, &m, &st.two(2, &[(&st.s, 0)])).unwrap());
}

#[test]
fn composition_cases() {
    let st = star(3);
    let a = st.two(3, &[(&st.m, 0)]);
    let b = st.two(2, &[(&st.m, 0)]);
    assert_eq!(compose(&st.sig, &a, &b).unwrap(), st.two(3, &[(&st.m, 0), (&st.m, 0)]));
    // Whiskering by a 1-diagram on the left shifts the embedding.
    assert_eq!(compose(&st.sig, &st.word(1), &b).unwrap(), st.two(3, &[(&st.m, 1)]));
    assert_eq!(compose(&st.sig, &b, &st.word(1)).unwrap(), st.two(3, &[(&st.m, 0)]));
    assert!(compose(&st.sig, &b, &b).is_err());
    assert_eq!(compose(&st.sig, &identity_diagram(&st.word(3)), &a).unwrap(), a);
}

#[test]
fn inclusions() {
    let st = star(3);
    let a = st.two(3, &[(&st.m, 0)]);
    let b = st.two(2, &[(&st.m, 0)]);
    assert_eq!(inclusion(&st.sig, &a, &b).unwrap(), emb(&[1, 0]));
    assert_eq!(inclusion(&st.sig, &st.word(1), &b).unwrap(), emb(&[0, 1]));
    assert_eq!(inclusion_rev(&st.sig, &b, &st.word(1)).unwrap(), emb(&[0, 0]));
    let id = identity_diagram(&st.word(2));
    assert_eq!(inclusion(&st.sig, &id, &b).unwrap(), emb(&[0, 0]));
}

#[test]
fn identity_diagrams() {
    let st = star(3);
    let w = st.word(2);
    let id = identity_diagram(&w);
    assert_eq!(id.height(), 0);
    assert_eq!(id.target(&st.sig).unwrap(), w);
    // A lower-dimensional operand is boosted to an identity.
    let left = compose(&st.sig, &st.word(1), &identity_diagram(&st.word(2))).unwrap();
    assert_eq!(left, identity_diagram(&st.word(3)));
    let right = compose(&st.sig, &identity_diagram(&st.word(1)), &st.word(2)).unwrap();
    assert_eq!(right, identity_diagram(&st.word(3)));
}

#[test]
fn iterated_boundaries() {
    let st = star(3);
    let m = st.sig.atom_diagram(&st.m).unwrap();
    assert_eq!(boundary_iter(&st.sig, &m, Side::Target, 0).unwrap(), m);
    assert_eq!(boundary_iter(&st.sig, &m, Side::Target, 1).unwrap(), st.word(1));
    assert_eq!(boundary_iter(&st.sig, &m, Side::Target, 2).unwrap(), Diagram::point(st.star.clone()));
    assert!(boundary_iter(&st.sig, &m, Side::Source, 3).is_err());
}
