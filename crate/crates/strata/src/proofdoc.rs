//! Proof documents: a signature, named diagrams and a script of steps,
//! stored as JSON in a canonical layout and checked by replay.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::diagram::{equivalent, globular, rewrite, well_defined, well_defined_embedding, Diagram, Embedding, Entry, Side};
use crate::homotopy::{
    apply_block_interchange, apply_higher_move, apply_interchange, apply_pullthrough, pull_stack_direct,
    rearrange_crossings, Chirality, Composite, Direction, Family, InterchangeBlock, MoveKind, MoveLocation,
    PullBlock, Variant,
};
use crate::signature::{GeneratorId, Signature, Witness};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown reference `{0}`")]
    UnknownReference(String),
    #[error("diagram `{name}` is ill-defined: {reason}")]
    IllDefinedDiagram { name: String, reason: String },
    #[error("generator `{name}` rejected: {reason}")]
    BadGenerator { name: String, reason: String },
    #[error("unsupported format version {0}")]
    Version(u32),
}

/// A diagram in the file format: `{"g": id}` or `{"source": .., "entries": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiagramExpr {
    Point { g: String },
    Cells { source: Box<DiagramExpr>, entries: Vec<EntryExpr> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryExpr {
    pub g: String,
    pub e: Vec<usize>,
}

impl DiagramExpr {
    pub fn from_diagram(d: &Diagram) -> Self {
        match d.point_generator() {
            Some(g) => DiagramExpr::Point { g: g.to_string() },
            None => DiagramExpr::Cells {
                source: Box::new(DiagramExpr::from_diagram(d.source().expect("positive dimension"))),
                entries: d
                    .entries()
                    .iter()
                    .map(|e| EntryExpr { g: e.generator.to_string(), e: e.embedding.heights().to_vec() })
                    .collect(),
            },
        }
    }

    /// Resolves generator names against `sig`.
    pub fn to_diagram(&self, sig: &Signature) -> Result<Diagram, DocError> {
        let id = |name: &str| sig.id(name).map_err(|_| DocError::UnknownReference(name.to_string()));
        Ok(match self {
            DiagramExpr::Point { g } => Diagram::point(id(g)?),
            DiagramExpr::Cells { source, entries } => {
                let source = source.to_diagram(sig)?;
                let entries = entries
                    .iter()
                    .map(|e| Ok(Entry::new(id(&e.g)?, Embedding::new(e.e.clone()))))
                    .collect::<Result<_, DocError>>()?;
                Diagram::new(source, entries)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct GeneratorRecord {
    name: String,
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<DiagramExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<DiagramExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inverse: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counit: Option<String>,
    #[serde(default, rename = "move", skip_serializing_if = "Option::is_none")]
    tag: Option<MoveKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SignatureRecord {
    top_dim: usize,
    generators: Vec<GeneratorRecord>,
}

/// Parameters of a homotopy step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSpec {
    pub kind: MoveKind,
    pub location: MoveLocation,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<GeneratorId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Step {
    /// Adds a generator: one of the state's own dimension extends it at
    /// `side`; one a dimension higher rewrites it (backwards for `source`).
    Attach { g: GeneratorId, side: Side, e: Embedding },
    Homotopy(MoveSpec),
    /// Applies the unit or counit witness of an invertible cell, or its
    /// inverse when `direction` is backward.
    InvertIntro {
        cell: GeneratorId,
        witness: Witness,
        #[serde(default)]
        direction: Direction,
        e: Embedding,
    },
}

impl Step {
    pub fn label(&self) -> String {
        match self {
            Step::Attach { g, side, .. } => format!("attach {g} at {}", side_name(*side)),
            Step::Homotopy(m) => {
                let k = if m.direction.is_backward() { m.kind.inverted() } else { m.kind };
                match m.variant.map(|v| v.sheet()) {
                    Some(crate::homotopy::Sheet::Front) => format!("{k} front"),
                    Some(crate::homotopy::Sheet::Rear) => format!("{k} rear"),
                    None => k.label(),
                }
            }
            Step::InvertIntro { cell, witness, direction, .. } => {
                let w = match witness {
                    Witness::Unit => "unit",
                    Witness::Counit => "counit",
                };
                let inv = if direction.is_backward() { "^-1" } else { "" };
                format!("{w}{inv} of {cell}")
            }
        }
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Source => "source",
        Side::Target => "target",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    pub start: String,
    pub goal: String,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone)]
pub struct ProofDocument {
    pub version: u32,
    pub signature: Signature,
    pub diagrams: BTreeMap<String, Diagram>,
    pub proof: Option<Proof>,
}

#[derive(Serialize, Deserialize)]
struct DocumentRecord {
    version: u32,
    signature: SignatureRecord,
    #[serde(default)]
    diagrams: BTreeMap<String, DiagramExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    proof: Option<Proof>,
}

fn syntax(e: serde_json::Error) -> DocError {
    DocError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
}

fn build_signature(rec: &SignatureRecord) -> Result<Signature, DocError> {
    let mut sig = Signature::new(rec.top_dim);
    let bad = |name: &str, reason: String| DocError::BadGenerator { name: name.to_string(), reason };
    let mut gens: Vec<&GeneratorRecord> = rec.generators.iter().collect();
    gens.sort_by(|a, b| (a.dim, &a.name).cmp(&(b.dim, &b.name)));
    for g in &gens {
        let s = g.source.as_ref().map(|x| x.to_diagram(&sig)).transpose()?;
        let t = g.target.as_ref().map(|x| x.to_diagram(&sig)).transpose()?;
        sig.add_generator(&g.name, g.dim, s, t).map_err(|e| bad(&g.name, e.to_string()))?;
    }
    let id = |sig: &Signature, n: &str| sig.id(n).map_err(|_| DocError::UnknownReference(n.to_string()));
    for g in &gens {
        let me = id(&sig, &g.name)?;
        if let Some(inv) = &g.inverse {
            let other = id(&sig, inv)?;
            sig.link_inverse(&me, &other).map_err(|e| bad(&g.name, e.to_string()))?;
        }
        if let Some(kind) = g.tag {
            sig.set_tag(&me, kind).map_err(|e| bad(&g.name, e.to_string()))?;
        }
    }
    for g in &gens {
        let me = id(&sig, &g.name)?;
        for (w, which) in [(&g.unit, Witness::Unit), (&g.counit, Witness::Counit)] {
            if let Some(w) = w {
                let w = id(&sig, w)?;
                sig.link_witness(&me, which, &w).map_err(|e| bad(&g.name, e.to_string()))?;
            }
        }
    }
    Ok(sig)
}

fn signature_record(sig: &Signature) -> SignatureRecord {
    let mut generators = Vec::with_capacity(sig.len());
    for k in 0..=sig.top_dim() {
        let mut names: Vec<&GeneratorId> = sig.level(k).iter().collect();
        names.sort();
        for g in names {
            let (source, target) = match sig.boundaries(g) {
                Ok((s, t)) => (Some(DiagramExpr::from_diagram(s)), Some(DiagramExpr::from_diagram(t))),
                Err(_) => (None, None),
            };
            let inv = sig.invertibility(g);
            generators.push(GeneratorRecord {
                name: g.to_string(),
                dim: k,
                source,
                target,
                inverse: inv.map(|i| i.inverse.to_string()),
                unit: inv.and_then(|i| i.unit_witness.as_ref().map(|w| w.to_string())),
                counit: inv.and_then(|i| i.counit_witness.as_ref().map(|w| w.to_string())),
                tag: sig.tag(g).copied(),
            });
        }
    }
    SignatureRecord { top_dim: sig.top_dim(), generators }
}

pub fn parse_document(text: &str) -> Result<ProofDocument, DocError> {
    let rec: DocumentRecord = serde_json::from_str(text).map_err(syntax)?;
    if rec.version != FORMAT_VERSION {
        return Err(DocError::Version(rec.version));
    }
    let signature = build_signature(&rec.signature)?;
    let mut diagrams = BTreeMap::new();
    for (name, expr) in &rec.diagrams {
        let d = expr.to_diagram(&signature)?;
        well_defined(&signature, &d)
            .map_err(|f| DocError::IllDefinedDiagram { name: name.clone(), reason: f.to_string() })?;
        diagrams.insert(name.clone(), d);
    }
    if let Some(p) = &rec.proof {
        for n in [&p.start, &p.goal] {
            if !diagrams.contains_key(n) {
                return Err(DocError::UnknownReference(n.clone()));
            }
        }
    }
    Ok(ProofDocument { version: rec.version, signature, diagrams, proof: rec.proof })
}

pub fn serialize_document(doc: &ProofDocument) -> String {
    let rec = DocumentRecord {
        version: doc.version,
        signature: signature_record(&doc.signature),
        diagrams: doc.diagrams.iter().map(|(k, v)| (k.clone(), DiagramExpr::from_diagram(v))).collect(),
        proof: doc.proof.clone(),
    };
    let value = serde_json::to_value(&rec).expect("document records always serialize");
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    out
}

/// Two-space indented JSON with sorted keys; arrays of scalars stay on one line.
fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
    match v {
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, depth + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push('}');
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&x.to_string());
            }
            out.push(']');
        }
        Value::Array(xs) => {
            out.push_str("[\n");
            for (i, x) in xs.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                if i + 1 < xs.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step inapplicable: {0}")]
pub struct StepInapplicable(pub String);

fn inapplicable(e: impl fmt::Display) -> StepInapplicable {
    StepInapplicable(e.to_string())
}

fn rewrite_step(
    sig: &Signature,
    state: &Diagram,
    g: &GeneratorId,
    e: &Embedding,
    backward: bool,
) -> Result<Diagram, StepInapplicable> {
    let (s, t) = sig.boundaries(g).map_err(inapplicable)?;
    let (s, t) = if backward { (t, s) } else { (s, t) };
    if !well_defined_embedding(sig, e, s, state).map_err(inapplicable)? {
        return Err(StepInapplicable(format!("{g} does not fit at {e}")));
    }
    rewrite(sig, state, e, s, t).map_err(inapplicable)
}

/// Applies one step to `state`, synthesizing move cells into `sig`.
pub fn apply_step(sig: &mut Signature, state: &Diagram, step: &Step) -> Result<Diagram, StepInapplicable> {
    match step {
        Step::Attach { g, side, e } => {
            let k = sig.dim_of(g).ok_or_else(|| StepInapplicable(format!("unknown generator {g}")))?;
            let n = state.dim();
            if k == n + 1 {
                let backward = *side == Side::Source;
                if backward && sig.inverse(g).is_none() {
                    return Err(StepInapplicable(format!("{g} is not invertible")));
                }
                return rewrite_step(sig, state, g, e, backward);
            }
            if k != n || n == 0 {
                return Err(StepInapplicable(format!("cannot attach a {k}-cell to a {n}-diagram")));
            }
            let (gs, gt) = sig.boundaries(g).map_err(inapplicable)?;
            let src = state.source().expect("positive dimension");
            match side {
                Side::Target => {
                    let tgt = state.target(sig).map_err(inapplicable)?;
                    if !well_defined_embedding(sig, e, gs, &tgt).map_err(inapplicable)? {
                        return Err(StepInapplicable(format!("{g} does not fit the target at {e}")));
                    }
                    let mut entries = state.entries().to_vec();
                    entries.push(Entry::new(g.clone(), e.clone()));
                    Ok(Diagram::new(src.clone(), entries))
                }
                Side::Source => {
                    if !well_defined_embedding(sig, e, gt, src).map_err(inapplicable)? {
                        return Err(StepInapplicable(format!("{g} does not fit the source at {e}")));
                    }
                    let new_src = rewrite(sig, src, e, gt, gs).map_err(inapplicable)?;
                    let mut entries = vec![Entry::new(g.clone(), e.clone())];
                    entries.extend_from_slice(state.entries());
                    Ok(Diagram::new(new_src, entries))
                }
            }
        }
        Step::Homotopy(m) => apply_move(sig, state, m),
        Step::InvertIntro { cell, witness, direction, e } => {
            if sig.inverse(cell).is_none() {
                return Err(StepInapplicable(format!("{cell} is not marked invertible")));
            }
            let w = sig.witness(cell, *witness).map_err(inapplicable)?;
            sig.mark_invertible(&w).map_err(inapplicable)?;
            rewrite_step(sig, state, &w, e, direction.is_backward())
        }
    }
}

fn apply_move(sig: &mut Signature, state: &Diagram, m: &MoveSpec) -> Result<Diagram, StepInapplicable> {
    let kind = m.kind;
    if !kind.is_valid() {
        return Err(StepInapplicable(format!("{kind} is not a valid move kind")));
    }
    let inverse = kind.inverse ^ m.direction.is_backward();
    let dir = if inverse { Direction::Backward } else { Direction::Forward };
    let h = m.location.height;
    let coord = |i: usize| {
        m.location.coords.get(i).copied().ok_or_else(|| StepInapplicable(format!("missing coordinate {i}")))
    };
    let result = match (kind.family, kind.composite) {
        (Family::I, Composite::Atomic) => {
            apply_interchange(sig, state, h, Chirality::from_inverse(inverse)).map(|r| r.0)
        }
        (Family::I, Composite::Tilde) => {
            let b = InterchangeBlock { height: h, lower: coord(0)?, upper: coord(1)? };
            let (out, mi) = apply_block_interchange(sig, state, b).map_err(inapplicable)?;
            if mi.kind.inverse != inverse {
                return Err(StepInapplicable(format!("block swaps with the other chirality ({})", mi.kind)));
            }
            Ok(out)
        }
        (Family::I, Composite::Hat) => rearrange_crossings(sig, state, (h, coord(0)?)).map(|x| x.result),
        (Family::II, Composite::Atomic) => {
            let v = m.variant.unwrap_or(Variant::new(crate::homotopy::Sheet::Front, kind.primed));
            if v.is_primed() != kind.primed {
                return Err(StepInapplicable(format!("variant {v} does not match {kind}")));
            }
            apply_pullthrough(sig, state, h, v, dir).map(|r| r.0)
        }
        (Family::II, _) => {
            let b = PullBlock { height: h, cells: coord(0)?, crossings: coord(1)? };
            let (out, mi) = pull_stack_direct(sig, state, b, dir).map_err(inapplicable)?;
            if mi.kind.primed != kind.primed {
                return Err(StepInapplicable(format!("block pulls through the other chirality ({})", mi.kind)));
            }
            Ok(out)
        }
        _ => apply_higher_move(sig, state, &m.location, kind, m.direction, m.mu.as_ref()).map(|r| r.0),
    };
    result.map_err(inapplicable)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    /// 1-based position in the script.
    pub index: usize,
    pub label: String,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepFailure {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub start: String,
    pub goal: String,
    pub start_height: usize,
    pub steps: Vec<StepRecord>,
    pub failure: Option<StepFailure>,
    pub goal_reached: bool,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failure.is_none() && self.goal_reached
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start {} height {}", self.start, self.start_height)?;
        for s in &self.steps {
            writeln!(f, "step {} {}: height {}", s.index, s.label, s.height)?;
        }
        if let Some(fail) = &self.failure {
            writeln!(f, "failed at step {}: {}", fail.index, fail.reason)?;
        }
        writeln!(f, "goal {} {}", self.goal, if self.goal_reached { "reached" } else { "not reached" })?;
        write!(f, "{}", if self.ok() { "ok" } else { "FAILED" })
    }
}

/// Replays the proof on a copy of the document's signature.
pub fn check_document(doc: &ProofDocument) -> Report {
    let mut sig = doc.signature.clone();
    check_with(&mut sig, doc)
}

/// Replays the proof, leaving synthesized cells in `sig`.
pub fn check_with(sig: &mut Signature, doc: &ProofDocument) -> Report {
    let Some(proof) = &doc.proof else {
        return Report {
            start: String::new(),
            goal: String::new(),
            start_height: 0,
            steps: Vec::new(),
            failure: Some(StepFailure { index: 0, reason: "document has no proof".into() }),
            goal_reached: false,
        };
    };
    let start = &doc.diagrams[&proof.start];
    let mut report = Report {
        start: proof.start.clone(),
        goal: proof.goal.clone(),
        start_height: start.height(),
        steps: Vec::with_capacity(proof.steps.len()),
        failure: None,
        goal_reached: false,
    };
    let mut state = start.clone();
    for (i, step) in proof.steps.iter().enumerate() {
        match checked_step(sig, &state, step) {
            Ok(next) => {
                report.steps.push(StepRecord { index: i + 1, label: step.label(), height: next.height() });
                state = next;
            }
            Err(e) => {
                report.failure = Some(StepFailure { index: i + 1, reason: e.0 });
                return report;
            }
        }
    }
    report.goal_reached = equivalent(&state, &doc.diagrams[&proof.goal]);
    report
}

/// [`apply_step`] plus the replay invariants: the new state is well-defined
/// and rewriting steps keep the boundary.
pub fn checked_step(sig: &mut Signature, state: &Diagram, step: &Step) -> Result<Diagram, StepInapplicable> {
    let next = apply_step(sig, state, step)?;
    well_defined(sig, &next).map_err(|f| StepInapplicable(format!("result ill-defined at {f}")))?;
    let extends = matches!(step, Step::Attach { g, .. } if sig.dim_of(g) == Some(state.dim()));
    if !extends && state.dim() > 0 && !globular(sig, state, &next).map_err(inapplicable)? {
        return Err(StepInapplicable("step changed the boundary".into()));
    }
    Ok(next)
}

/// Text rendering used for golden files and the CLI.
pub fn report_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = write!(s, "{r}");
    s.push('\n');
    s
}
