//! The line-oriented algebra file format.
//!
//! ```text
//! # comments run to the end of the line
//! algebra Z3
//! size 3
//! op zero/0
//! 0
//! op mul/2
//! 0 1 2
//! 1 2 0
//! 2 0 1
//! op inv/1
//! 0 2 1
//! subset trivial = 0
//! end
//! hom collapse : Z3 -> builtin:Z1 = 0 0 0
//! ```
//!
//! Tables are row-major with the first argument most significant and may be
//! wrapped over several lines. `op zero/0` may be omitted; the zero constant
//! is always element 0. Witness files add `variety`, `goal` and `replay`
//! lines inside the block.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::algebra::{AlgRef, FiniteAlgebra, Homomorphism, Signature, Subuniverse, ZERO};
use crate::error::{Error, Result};
use crate::library::{library, variety, LibraryEntry};
use crate::search::{GoalKind, ReplayStep, Witness};
use crate::Budget;

/// A named subset as written in a file; `closed` is false when the members
/// do not form a subuniverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetRecord {
    pub name: String,
    pub members: Vec<usize>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraRecord {
    pub algebra: AlgRef,
    pub subsets: Vec<SubsetRecord>,
    pub variety: Option<String>,
    pub goal: Option<GoalKind>,
    pub replay: Vec<ReplayStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomRecord {
    pub name: String,
    pub source: String,
    pub target: String,
    pub hom: Homomorphism,
}

/// Parsed and validated contents of one file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlgebraFile {
    pub algebras: Vec<AlgebraRecord>,
    pub homs: Vec<HomRecord>,
}

impl AlgebraRecord {
    pub fn new(algebra: AlgRef) -> Self {
        AlgebraRecord {
            algebra,
            subsets: Vec::new(),
            variety: None,
            goal: None,
            replay: Vec::new(),
        }
    }

    /// A closed subset by name, `all` or `zero`.
    pub fn subset(&self, name: &str) -> Option<&SubsetRecord> {
        self.subsets.iter().find(|s| s.name == name)
    }

    /// The witness described by this record, if it carries one.
    pub fn witness(&self) -> Option<Witness> {
        Some(Witness {
            kind: self.goal?,
            variety: self.variety.clone()?,
            size: self.algebra.size(),
            tables: self.algebra.tables().to_vec(),
            replay: self.replay.clone(),
        })
    }
}

impl AlgebraFile {
    pub fn algebra(&self, name: &str) -> Option<&AlgebraRecord> {
        self.algebras.iter().find(|a| a.algebra.name() == name)
    }

    pub fn hom(&self, name: &str) -> Option<&HomRecord> {
        self.homs.iter().find(|h| h.name == name)
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
struct Word<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn words(line: &str, number: usize) -> Vec<Word<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Word {
                    text: &body[s..i],
                    line: number,
                    column: body[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn number(w: &Word<'_>, what: &str) -> Result<usize> {
    w.text
        .parse()
        .map_err(|_| err(w.line, w.column, format!("expected {what}, found `{}`", w.text)))
}

fn element(w: &Word<'_>, size: usize) -> Result<usize> {
    let e = number(w, "an element")?;
    if e >= size {
        return Err(err(w.line, w.column, format!("element {e} is out of range for size {size}")));
    }
    Ok(e)
}

struct OpDraft<'a> {
    at: Word<'a>,
    name: String,
    arity: usize,
    table: Vec<usize>,
    expected: usize,
}

struct Draft<'a> {
    at: Word<'a>,
    name: String,
    size: Option<usize>,
    ops: Vec<OpDraft<'a>>,
    subsets: Vec<(Word<'a>, String, Vec<usize>)>,
    variety: Option<(Word<'a>, String)>,
    goal: Option<GoalKind>,
    replay: Vec<ReplayStep>,
}

struct HomDraft<'a> {
    at: Word<'a>,
    name: String,
    source: String,
    target: String,
    map: Vec<(Word<'a>, usize)>,
}

/// Parses and validates a file. Every failure names its line and column.
pub fn parse_algebra_file(text: &str) -> Result<AlgebraFile> {
    let mut out = AlgebraFile::default();
    let mut homs: Vec<HomDraft<'_>> = Vec::new();
    let mut current: Option<Draft<'_>> = None;
    let mut last_line = 0;
    for (index, raw) in text.lines().enumerate() {
        let n = index + 1;
        last_line = n;
        let ws = words(raw, n);
        let Some(head) = ws.first() else { continue };

        // Table entries of an unfinished operation.
        if let Some(d) = current.as_mut() {
            if let Some(op) = d.ops.last_mut().filter(|o| o.table.len() < o.expected) {
                if head.text.parse::<usize>().is_ok() {
                    let size = d.size.expect("size precedes operations");
                    for w in &ws {
                        if op.table.len() == op.expected {
                            return Err(err(w.line, w.column, format!(
                                "operation `{}/{}` expects {} entries; extra entry `{}`",
                                op.name, op.arity, op.expected, w.text
                            )));
                        }
                        op.table.push(element(w, size)?);
                    }
                    continue;
                }
                return Err(err(head.line, head.column, format!(
                    "operation `{}/{}` expects {} entries, found {}",
                    op.name, op.arity, op.expected, op.table.len()
                )));
            }
        }

        match (head.text, current.as_mut()) {
            ("algebra", None) => {
                let name = ws.get(1).ok_or_else(|| err(n, head.column, "`algebra` needs a name"))?;
                if ws.len() > 2 {
                    return Err(err(n, ws[2].column, "unexpected text after the algebra name"));
                }
                if out.algebra(name.text).is_some() {
                    return Err(err(n, name.column, format!("duplicate algebra `{}`", name.text)));
                }
                current = Some(Draft {
                    at: head.clone(),
                    name: name.text.to_string(),
                    size: None,
                    ops: Vec::new(),
                    subsets: Vec::new(),
                    variety: None,
                    goal: None,
                    replay: Vec::new(),
                });
            }
            ("algebra", Some(_)) => return Err(err(n, head.column, "`algebra` inside an unfinished block; missing `end`")),
            ("hom", _) => homs.push(parse_hom(&ws)?),
            ("end", Some(_)) => {
                if ws.len() > 1 {
                    return Err(err(n, ws[1].column, "unexpected text after `end`"));
                }
                let d = current.take().expect("matched Some");
                out.algebras.push(finish(d, head)?);
            }
            ("end", None) => return Err(err(n, head.column, "`end` outside an algebra block")),
            (_, None) => {
                return Err(err(n, head.column, format!("expected `algebra` or `hom`, found `{}`", head.text)))
            }
            ("size", Some(d)) => {
                if d.size.is_some() {
                    return Err(err(n, head.column, "duplicate `size`"));
                }
                let w = ws.get(1).ok_or_else(|| err(n, head.column, "`size` needs a number"))?;
                let s = number(w, "a size")?;
                if s == 0 {
                    return Err(err(n, w.column, "size must be at least 1"));
                }
                d.size = Some(s);
            }
            ("op", Some(d)) => {
                let size = d.size.ok_or_else(|| err(n, head.column, "`size` must come before `op`"))?;
                let w = ws.get(1).ok_or_else(|| err(n, head.column, "`op` needs `name/arity`"))?;
                let (name, arity) = w
                    .text
                    .split_once('/')
                    .ok_or_else(|| err(n, w.column, format!("expected `name/arity`, found `{}`", w.text)))?;
                let arity: usize = arity
                    .parse()
                    .map_err(|_| err(n, w.column, format!("bad arity in `{}`", w.text)))?;
                if d.ops.iter().any(|o| o.name == name) {
                    return Err(err(n, w.column, format!("duplicate operation `{name}`")));
                }
                let expected = (size as u64)
                    .checked_pow(arity as u32)
                    .filter(|&e| e <= 1 << 24)
                    .ok_or_else(|| err(n, w.column, format!("table for `{}` is too large", w.text)))?;
                let mut op = OpDraft {
                    at: w.clone(),
                    name: name.to_string(),
                    arity,
                    table: Vec::new(),
                    expected: expected as usize,
                };
                for v in &ws[2..] {
                    if op.table.len() == op.expected {
                        return Err(err(n, v.column, format!("extra entry `{}` for `{}`", v.text, w.text)));
                    }
                    op.table.push(element(v, size)?);
                }
                d.ops.push(op);
            }
            ("subset", Some(d)) => {
                let size = d.size.ok_or_else(|| err(n, head.column, "`size` must come before `subset`"))?;
                let name = ws.get(1).ok_or_else(|| err(n, head.column, "`subset` needs a name"))?;
                if ws.get(2).map(|w| w.text) != Some("=") {
                    return Err(err(n, ws.get(2).map_or(name.column + name.text.len(), |w| w.column), "expected `=` after the subset name"));
                }
                if d.subsets.iter().any(|(_, s, _)| s == name.text) || matches!(name.text, "all" | "zero") {
                    return Err(err(n, name.column, format!("duplicate or reserved subset name `{}`", name.text)));
                }
                let members = ws[3..].iter().map(|w| element(w, size)).collect::<Result<Vec<_>>>()?;
                d.subsets.push((name.clone(), name.text.to_string(), members));
            }
            ("variety", Some(d)) => {
                let w = ws.get(1).ok_or_else(|| err(n, head.column, "`variety` needs a name"))?;
                if variety(w.text).is_none() {
                    return Err(err(n, w.column, format!("unknown variety `{}`", w.text)));
                }
                d.variety = Some((w.clone(), w.text.to_string()));
            }
            ("goal", Some(d)) => {
                let w = ws.get(1).ok_or_else(|| err(n, head.column, "`goal` needs a kind"))?;
                d.goal = Some(w.text.parse().map_err(|_| err(n, w.column, format!("unknown goal `{}`", w.text)))?);
            }
            ("replay", Some(d)) => {
                let start = raw.find("replay").expect("line starts with the keyword") + "replay".len();
                let step = serde_json::from_str(raw[start..].trim())
                    .map_err(|e| err(n, start + 2, format!("bad replay step: {e}")))?;
                d.replay.push(step);
            }
            (other, Some(_)) => return Err(err(n, head.column, format!("unknown keyword `{other}`"))),
        }
    }
    if let Some(d) = current {
        if let Some(op) = d.ops.last().filter(|o| o.table.len() < o.expected) {
            return Err(err(last_line.max(1), 1, format!(
                "operation `{}/{}` expects {} entries, found {}",
                op.name, op.arity, op.expected, op.table.len()
            )));
        }
        return Err(err(d.at.line, d.at.column, format!("algebra `{}` is missing `end`", d.name)));
    }
    for h in homs {
        let rec = resolve_hom(&out, h)?;
        if out.hom(&rec.name).is_some() {
            return Err(Error::Usage(format!("duplicate homomorphism `{}`", rec.name)));
        }
        out.homs.push(rec);
    }
    Ok(out)
}

fn parse_hom<'a>(ws: &[Word<'a>]) -> Result<HomDraft<'a>> {
    let head = &ws[0];
    let shape = ws.len() >= 7
        && ws[2].text == ":"
        && ws[4].text == "->"
        && ws[6].text == "=";
    if !shape {
        return Err(err(head.line, head.column, "expected `hom <name> : <src> -> <dst> = m0 m1 ...`"));
    }
    let map = ws[7..]
        .iter()
        .map(|w| Ok((w.clone(), number(w, "an element")?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomDraft {
        at: head.clone(),
        name: ws[1].text.to_string(),
        source: ws[3].text.to_string(),
        target: ws[5].text.to_string(),
        map,
    })
}

fn finish(d: Draft<'_>, end: &Word<'_>) -> Result<AlgebraRecord> {
    let size = d.size.ok_or_else(|| err(d.at.line, d.at.column, format!("algebra `{}` has no `size`", d.name)))?;
    if d.ops.is_empty() {
        return Err(err(end.line, end.column, format!("algebra `{}` has no operations", d.name)));
    }
    let mut ops: Vec<(String, usize)> = Vec::new();
    let mut tables = Vec::new();
    if !d.ops.iter().any(|o| o.name == ZERO) {
        ops.push((ZERO.to_string(), 0));
        tables.push(vec![0]);
    }
    for o in &d.ops {
        if o.name == ZERO {
            if o.arity != 0 {
                return Err(err(o.at.line, o.at.column, "`zero` must be nullary"));
            }
            if o.table != [0] {
                return Err(err(o.at.line, o.at.column, "the zero constant must be element 0"));
            }
        }
        ops.push((o.name.clone(), o.arity));
        tables.push(o.table.clone());
    }
    let sig = Signature::new(ops).map_err(|e| err(d.at.line, d.at.column, e.to_string()))?;
    let sig = match &d.variety {
        Some((w, v)) => {
            let spec = variety(v).expect("checked when read");
            if spec.signature.as_ref() != &sig {
                return Err(err(w.line, w.column, format!("operations do not match the signature of `{v}`")));
            }
            spec.signature.clone()
        }
        None => registered_signature(sig),
    };
    let alg = FiniteAlgebra::new(d.name.clone(), sig, size, tables)
        .map_err(|e| err(d.at.line, d.at.column, e.to_string()))?;
    let alg: AlgRef = Arc::new(alg);
    if let Some((w, v)) = &d.variety {
        let spec = variety(v).expect("checked when read");
        if let Some((eq, val)) = spec
            .first_failure(&alg, &Budget::default())
            .map_err(|e| err(w.line, w.column, e.to_string()))?
        {
            return Err(err(w.line, w.column, format!("algebra is not in `{v}`: `{eq}` fails at {val:?}")));
        }
    }
    let subsets = d
        .subsets
        .into_iter()
        .map(|(_, name, mut members)| {
            members.sort_unstable();
            members.dedup();
            let closed = Subuniverse::from_members(&alg, &members).is_ok();
            SubsetRecord { name, members, closed }
        })
        .collect();
    Ok(AlgebraRecord {
        algebra: alg,
        subsets,
        variety: d.variety.map(|(_, v)| v),
        goal: d.goal,
        replay: d.replay,
    })
}

/// Reuses the shared signature of a known variety when the operations match,
/// so parsed algebras compare equal to library ones.
fn registered_signature(sig: Signature) -> Arc<Signature> {
    crate::library::all_varieties()
        .into_iter()
        .map(|v| v.signature)
        .find(|s| s.as_ref() == &sig)
        .unwrap_or_else(|| Arc::new(sig))
}

/// An algebra named in a file or the library (`builtin:<name>`).
fn lookup(file: &AlgebraFile, name: &str) -> Option<AlgRef> {
    match name.strip_prefix("builtin:") {
        Some(b) => library().get(b).map(|e| e.algebra.clone()),
        None => file.algebra(name).map(|a| a.algebra.clone()),
    }
}

fn resolve_hom(file: &AlgebraFile, h: HomDraft<'_>) -> Result<HomRecord> {
    let find = |n: &str| {
        lookup(file, n).ok_or_else(|| err(h.at.line, h.at.column, format!("unknown algebra `{n}`")))
    };
    let (src, dst) = (find(&h.source)?, find(&h.target)?);
    if h.map.len() != src.size() {
        return Err(err(h.at.line, h.at.column, format!(
            "hom `{}` lists {} images, `{}` has {} elements",
            h.name, h.map.len(), h.source, src.size()
        )));
    }
    if let Some((w, e)) = h.map.iter().find(|(_, e)| *e >= dst.size()) {
        return Err(err(w.line, w.column, format!("element {e} is out of range for `{}`", h.target)));
    }
    let map = h.map.iter().map(|(_, e)| *e).collect();
    let hom = Homomorphism::new(src, dst, map).map_err(|e| err(h.at.line, h.at.column, format!("hom `{}`: {e}", h.name)))?;
    Ok(HomRecord {
        name: h.name,
        source: h.source,
        target: h.target,
        hom,
    })
}

fn join(v: impl IntoIterator<Item = usize>) -> String {
    let parts: Vec<String> = v.into_iter().map(|x| x.to_string()).collect();
    parts.join(" ")
}

/// Canonical text of one algebra block.
pub fn serialize_algebra(rec: &AlgebraRecord) -> String {
    let a = &rec.algebra;
    let n = a.size();
    let sig = a.signature();
    let mut s = String::new();
    let _ = writeln!(s, "algebra {}", a.name());
    let _ = writeln!(s, "size {n}");
    if let Some(v) = &rec.variety {
        let _ = writeln!(s, "variety {v}");
    }
    if let Some(g) = rec.goal {
        let _ = writeln!(s, "goal {g}");
    }
    for op in 0..sig.len() {
        let _ = writeln!(s, "op {}/{}", sig.name(op), sig.arity(op));
        let table = a.table(op);
        let width = if sig.arity(op) == 0 { 1 } else { n };
        for row in table.chunks(width) {
            let _ = writeln!(s, "{}", join(row.iter().copied()));
        }
    }
    for sub in &rec.subsets {
        let _ = writeln!(s, "subset {} = {}", sub.name, join(sub.members.iter().copied()));
    }
    for step in &rec.replay {
        let _ = writeln!(s, "replay {}", serde_json::to_string(step).expect("replay steps serialize"));
    }
    s.push_str("end\n");
    s
}

/// Canonical text of a whole file: algebras, then homomorphisms.
pub fn serialize_file(f: &AlgebraFile) -> String {
    let mut blocks: Vec<String> = f.algebras.iter().map(serialize_algebra).collect();
    if !f.homs.is_empty() {
        let mut s = String::new();
        for h in &f.homs {
            let _ = writeln!(s, "hom {} : {} -> {} = {}", h.name, h.source, h.target, join(h.hom.map().iter().copied()));
        }
        blocks.push(s);
    }
    blocks.join("\n")
}

/// A library algebra as a file: its named subsets and the library
/// homomorphisms out of it, with other targets referenced as builtins.
pub fn library_file(entry: &LibraryEntry) -> AlgebraFile {
    let lib = library();
    let mut rec = AlgebraRecord::new(entry.algebra.clone());
    rec.subsets = entry
        .subsets
        .iter()
        .map(|(name, s)| SubsetRecord {
            name: name.clone(),
            members: s.members().to_vec(),
            closed: true,
        })
        .collect();
    let name_of = |a: &AlgRef| -> String {
        if Arc::ptr_eq(a, &entry.algebra) {
            return entry.name.clone();
        }
        let e = lib
            .entries
            .iter()
            .find(|e| Arc::ptr_eq(&e.algebra, a))
            .expect("library homs connect library algebras");
        format!("builtin:{}", e.name)
    };
    let homs = lib
        .homs
        .iter()
        .filter(|(_, h)| Arc::ptr_eq(h.source(), &entry.algebra))
        .map(|(name, h)| HomRecord {
            name: name.clone(),
            source: name_of(h.source()),
            target: name_of(h.target()),
            hom: h.clone(),
        })
        .collect();
    AlgebraFile {
        algebras: vec![rec],
        homs,
    }
}

/// A witness as a file block.
pub fn witness_record(w: &Witness) -> Result<AlgebraRecord> {
    let alg = w.algebra()?;
    Ok(AlgebraRecord {
        algebra: alg,
        subsets: Vec::new(),
        variety: Some(w.variety.clone()),
        goal: Some(w.kind),
        replay: w.replay.clone(),
    })
}
