//! Depth-first generation of operation tables with incremental equation
//! checking.
//!
//! Cells are filled in a fixed order: by largest argument, then operation in
//! signature order, then argument tuple lexicographically. Every ground instance of every equation is
//! attached to the first unfilled cell it needs; when that cell is filled the
//! instance is re-evaluated and either checked, moved to its next unfilled
//! cell, or, when the unfilled cell is the outermost application of one side
//! and the other side is known, used to force that cell's value.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{CompiledTerm, FiniteAlgebra, Signature};
use crate::error::{Error, Result};
use crate::library::VarietySpec;

const UNSET: u32 = u32::MAX;

/// Limits and switches for model enumeration.
#[derive(Debug, Clone)]
pub struct EnumOptions {
    /// Largest number of search nodes (tentative cell assignments).
    pub max_nodes: u64,
    /// Worker threads; results do not depend on this.
    pub jobs: usize,
    /// Skip labellings that differ only by a permutation of elements not yet
    /// mentioned in the partial tables.
    pub symmetry_breaking: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            max_nodes: 50_000_000,
            jobs: 1,
            symmetry_breaking: true,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Instance {
    eq: u32,
    valuation: u32,
}

struct Problem {
    n: usize,
    signature: Arc<Signature>,
    offsets: Vec<usize>,
    cells: Vec<(usize, Vec<usize>)>,
    equations: Vec<(CompiledTerm, CompiledTerm, usize)>,
    instances: Vec<Instance>,
    zero_cell: usize,
}

impl Problem {
    fn new(v: &VarietySpec, n: usize) -> Result<Problem> {
        if n == 0 || n > 64 {
            return Err(Error::Usage(format!("model size must be in 1..=64, got {n}")));
        }
        let sig = v.signature.clone();
        let mut offsets = Vec::with_capacity(sig.len());
        let mut cells = Vec::new();
        for op in 0..sig.len() {
            offsets.push(cells.len());
            let arity = sig.arity(op);
            let mut args = vec![0usize; arity];
            loop {
                cells.push((op, args.clone()));
                if !crate::algebra::advance(&mut args, n) {
                    break;
                }
            }
        }
        let mut equations = Vec::new();
        let mut instances = Vec::new();
        for (i, e) in v.equations.iter().enumerate() {
            let l = e.lhs.compile(&sig)?;
            let r = e.rhs.compile(&sig)?;
            let vars = l.var_count().max(r.var_count());
            let count = (n as u64).pow(vars as u32);
            if count > u32::MAX as u64 / 2 {
                return Err(Error::BudgetExceeded {
                    what: "equation instances",
                    needed: count as u128,
                    limit: (u32::MAX / 2) as u128,
                });
            }
            for val in 0..count as u32 {
                instances.push(Instance { eq: i as u32, valuation: val });
            }
            equations.push((l, r, vars));
        }
        let zero_cell = offsets[sig.zero_index()];
        Ok(Problem {
            n,
            signature: sig,
            offsets,
            cells,
            equations,
            instances,
            zero_cell,
        })
    }

    /// Cells grouped by their largest argument, then by operation and
    /// argument tuple, so each block only mentions elements up to its bound.
    fn fill_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.cells.len()).filter(|&c| c != self.zero_cell).collect();
        order.sort_by_key(|&c| {
            let (op, args) = &self.cells[c];
            (args.iter().copied().max().unwrap_or(0), *op, c)
        });
        order
    }

    fn cell_of(&self, op: usize, args: &[usize]) -> usize {
        let mut code = 0;
        for &a in args {
            code = code * self.n + a;
        }
        self.offsets[op] + code
    }

    fn decode_valuation(&self, inst: Instance, vars: usize, out: &mut Vec<usize>) {
        out.clear();
        out.resize(vars, 0);
        let mut code = inst.valuation as usize;
        for slot in out.iter_mut().rev() {
            *slot = code % self.n;
            code /= self.n;
        }
    }
}

enum Eval {
    Holds,
    Fails,
    Blocked { cell: usize, force: Option<u32> },
}

#[derive(Clone)]
enum Undo {
    Watch(usize),
    Force(usize),
}

struct Engine<'p> {
    p: &'p Problem,
    table: Vec<u32>,
    forced: Vec<u32>,
    watchers: Vec<Vec<u32>>,
    trail: Vec<Undo>,
    mentioned: u64,
    symmetry: bool,
    nodes: u64,
    cap: u64,
    stack: Vec<usize>,
    valuation: Vec<usize>,
}

/// Result of walking one subtree.
struct Walk<T> {
    nodes: u64,
    complete: bool,
    /// Values returned by the visitor with the node count at emission.
    found: Vec<(u64, T)>,
    /// Models seen, with the node count at emission.
    emitted: Vec<u64>,
}

impl<'p> Engine<'p> {
    fn new(p: &'p Problem, symmetry: bool, cap: u64) -> Option<Engine<'p>> {
        let mut e = Engine {
            p,
            table: vec![UNSET; p.cells.len()],
            forced: vec![UNSET; p.cells.len()],
            watchers: vec![Vec::new(); p.cells.len()],
            trail: Vec::new(),
            mentioned: 1,
            symmetry,
            nodes: 0,
            cap,
            stack: Vec::new(),
            valuation: Vec::new(),
        };
        e.table[p.zero_cell] = 0;
        for i in 0..p.instances.len() {
            if !e.settle(i as u32) {
                return None;
            }
        }
        Some(e)
    }

    fn evaluate(&mut self, idx: u32) -> Eval {
        let inst = self.p.instances[idx as usize];
        let (l, r, vars) = &self.p.equations[inst.eq as usize];
        self.p.decode_valuation(inst, *vars, &mut self.valuation);
        let blocked = std::cell::Cell::new(usize::MAX);
        let table = &self.table;
        let p = self.p;
        let lookup = |op: usize, args: &[usize]| {
            let c = p.cell_of(op, args);
            let v = table[c];
            if v == UNSET {
                blocked.set(c);
                None
            } else {
                Some(v as usize)
            }
        };
        let valuation = &self.valuation;
        let lv = l.eval_tracking(valuation, &mut self.stack, lookup);
        let lcell = blocked.get();
        let rv = r.eval_tracking(valuation, &mut self.stack, lookup);
        let rcell = blocked.get();
        match (lv, rv) {
            (Ok(a), Ok(b)) => {
                if a == b {
                    Eval::Holds
                } else {
                    Eval::Fails
                }
            }
            (Err(root), Ok(b)) => Eval::Blocked {
                cell: lcell,
                force: root.then_some(b as u32),
            },
            (Ok(a), Err(root)) => Eval::Blocked {
                cell: rcell,
                force: root.then_some(a as u32),
            },
            (Err(_), Err(_)) => Eval::Blocked {
                cell: lcell.min(rcell),
                force: None,
            },
        }
    }

    /// Re-evaluates an instance after a cell was filled; false on conflict.
    fn settle(&mut self, idx: u32) -> bool {
        match self.evaluate(idx) {
            Eval::Holds => true,
            Eval::Fails => false,
            Eval::Blocked { cell, force } => {
                self.watchers[cell].push(idx);
                self.trail.push(Undo::Watch(cell));
                if let Some(v) = force {
                    let cur = self.forced[cell];
                    if cur == UNSET {
                        self.forced[cell] = v;
                        self.trail.push(Undo::Force(cell));
                    } else if cur != v {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail entry") {
                Undo::Watch(c) => {
                    self.watchers[c].pop();
                }
                Undo::Force(c) => self.forced[c] = UNSET,
            }
        }
    }

    /// Fills `cell` with `v` and settles its watchers; false on conflict.
    fn assign(&mut self, cell: usize, v: u32) -> bool {
        self.table[cell] = v;
        let count = self.watchers[cell].len();
        for i in 0..count {
            let idx = self.watchers[cell][i];
            if !self.settle(idx) {
                return false;
            }
        }
        true
    }

    fn candidates(&self, cell: usize, out: &mut Vec<u32>) {
        out.clear();
        let f = self.forced[cell];
        if f != UNSET {
            out.push(f);
            return;
        }
        let n = self.p.n as u32;
        if !self.symmetry {
            out.extend(0..n);
            return;
        }
        let mut mask = self.mentioned;
        for &a in &self.p.cells[cell].1 {
            mask |= 1 << a;
        }
        let mut fresh = false;
        for v in 0..n {
            if mask & (1 << v) != 0 {
                out.push(v);
            } else if !fresh {
                fresh = true;
                out.push(v);
            }
        }
    }

    fn walk<T>(&mut self, pos: usize, order: &[usize], visit: &mut dyn FnMut(&[u32]) -> Option<T>, acc: &mut Walk<T>, stop_at_first: bool) -> bool {
        if pos == order.len() {
            acc.emitted.push(self.nodes);
            if let Some(t) = visit(&self.table) {
                acc.found.push((self.nodes, t));
                if stop_at_first {
                    return false;
                }
            }
            return true;
        }
        let cell = order[pos];
        let mut cands = Vec::new();
        self.candidates(cell, &mut cands);
        let saved_mention = self.mentioned;
        for v in cands {
            if self.nodes >= self.cap {
                acc.complete = false;
                return false;
            }
            self.nodes += 1;
            let mark = self.trail.len();
            if self.symmetry {
                let mut mask = saved_mention | (1 << v);
                for &a in &self.p.cells[cell].1 {
                    mask |= 1 << a;
                }
                self.mentioned = mask;
            }
            let ok = self.assign(cell, v);
            let keep_going = !ok || self.walk(pos + 1, order, visit, acc, stop_at_first);
            self.undo_to(mark);
            self.table[cell] = UNSET;
            self.mentioned = saved_mention;
            if !keep_going {
                return false;
            }
        }
        true
    }
}

fn build_model(p: &Problem, table: &[u32], name: String) -> FiniteAlgebra {
    let sig = &p.signature;
    let tables: Vec<Vec<usize>> = (0..sig.len())
        .map(|op| {
            let start = p.offsets[op];
            let len = p.n.pow(sig.arity(op) as u32);
            table[start..start + len].iter().map(|&v| v as usize).collect()
        })
        .collect();
    FiniteAlgebra::new(name, sig.clone(), p.n, tables).expect("search emits complete tables")
}

/// Outcome of a walk over all models of one size.
#[derive(Debug, Clone)]
pub struct Visit<T> {
    pub nodes: u64,
    pub complete: bool,
    pub models: u64,
    /// Visitor hits in enumeration order, with their model indices.
    pub found: Vec<(u64, T)>,
}

const SPLIT_DEPTH: usize = 3;

/// Walks every model of `v` on `n` elements in a fixed order (cell values
/// lexicographically), calling `visit` on each. With `first_only` the walk
/// ends at the first hit. Results are identical for any number of workers.
///
/// With symmetry breaking on, a variety whose equations split into
/// independent blocks of operations is walked block by block instead; the
/// models then cover every isomorphism type but in a different order.
pub fn visit_models<T, F>(
    v: &VarietySpec,
    n: usize,
    opts: &EnumOptions,
    first_only: bool,
    visit: F,
) -> Result<Visit<T>>
where
    T: Send,
    F: Fn(&FiniteAlgebra) -> Option<T> + Sync,
{
    if opts.symmetry_breaking {
        if let Some(blocks) = super::split::blocks(v) {
            if let Some(done) = super::split::visit_split(v, &blocks, n, opts, first_only, &visit)? {
                return Ok(done);
            }
        }
    }
    visit_models_plain(v, n, opts, first_only, visit)
}

/// The cell-by-cell walk behind [`visit_models`].
pub(super) fn visit_models_plain<T, F>(
    v: &VarietySpec,
    n: usize,
    opts: &EnumOptions,
    first_only: bool,
    visit: F,
) -> Result<Visit<T>>
where
    T: Send,
    F: Fn(&FiniteAlgebra) -> Option<T> + Sync,
{
    let p = Problem::new(v, n)?;
    let order = p.fill_order();
    let depth = SPLIT_DEPTH.min(order.len());

    let Some(mut root) = Engine::new(&p, opts.symmetry_breaking, opts.max_nodes) else {
        return Ok(Visit { nodes: 0, complete: true, models: 0, found: Vec::new() });
    };
    let mut prefixes: Vec<Vec<u32>> = Vec::new();
    let mut prefix_acc: Walk<()> = Walk { nodes: 0, complete: true, found: Vec::new(), emitted: Vec::new() };
    {
        let mut collect = |t: &[u32]| {
            prefixes.push(order[..depth].iter().map(|&c| t[c]).collect());
            None::<()>
        };
        root.walk(0, &order[..depth], &mut collect, &mut prefix_acc, false);
    }
    let mut nodes = root.nodes;
    if !prefix_acc.complete {
        return Ok(Visit { nodes, complete: false, models: 0, found: Vec::new() });
    }

    let jobs = opts.jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let wave = jobs * 4;
    let run_subtree = |prefix: &Vec<u32>, cap: u64| -> Walk<T> {
        let mut e = Engine::new(&p, opts.symmetry_breaking, cap).expect("root engine succeeded");
        let mut acc = Walk { nodes: 0, complete: true, found: Vec::new(), emitted: Vec::new() };
        let mut mention = e.mentioned;
        for (i, &val) in prefix.iter().enumerate() {
            let cell = order[i];
            if opts.symmetry_breaking {
                mention |= 1 << val;
                for &a in &p.cells[cell].1 {
                    mention |= 1 << a;
                }
                e.mentioned = mention;
            }
            if !e.assign(cell, val) {
                unreachable!("prefixes come from a successful walk");
            }
        }
        let mut visit_table = |t: &[u32]| visit(&build_model(&p, t, format!("{}-{n}", v.name)));
        e.walk(depth, &order, &mut visit_table, &mut acc, first_only);
        acc.nodes = e.nodes;
        acc
    };

    let mut models = 0u64;
    let mut found = Vec::new();
    let mut index = 0usize;
    while index < prefixes.len() {
        let end = (index + wave).min(prefixes.len());
        let cap = opts.max_nodes.saturating_sub(nodes);
        let results: Vec<Walk<T>> = pool.install(|| {
            prefixes[index..end]
                .par_iter()
                .map(|pre| run_subtree(pre, cap))
                .collect()
        });
        for walk in results {
            let allowed = opts.max_nodes.saturating_sub(nodes);
            let mut emitted = walk.emitted.iter().copied().filter(|&at| at <= allowed);
            let mut hits = walk.found.into_iter().filter(|(at, _)| *at <= allowed).peekable();
            let mut local = 0u64;
            let mut seen = 0u64;
            while let Some(at) = emitted.next() {
                if let Some((hit_at, _)) = hits.peek() {
                    if *hit_at == at {
                        let (_, t) = hits.next().expect("peeked");
                        found.push((models + local, t));
                        if first_only {
                            return Ok(Visit { nodes: nodes + at, complete: true, models: models + local + 1, found });
                        }
                    }
                }
                local += 1;
                seen += 1;
            }
            if walk.nodes > allowed || !walk.complete {
                return Ok(Visit { nodes: opts.max_nodes, complete: false, models: models + seen, found });
            }
            nodes += walk.nodes;
            models += seen;
        }
        index = end;
    }
    Ok(Visit { nodes, complete: true, models, found })
}

/// Models of `v` on `n` elements, in enumeration order.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub models: Vec<FiniteAlgebra>,
    pub nodes: u64,
    pub complete: bool,
}

pub fn enumerate_models(v: &VarietySpec, n: usize, opts: &EnumOptions) -> Result<Enumeration> {
    let visit = visit_models(v, n, opts, false, |alg| Some(alg.clone()))?;
    let models = visit
        .found
        .into_iter()
        .map(|(i, m)| m.renamed(format!("{}-{n}-{i}", v.name)))
        .collect();
    Ok(Enumeration {
        models,
        nodes: visit.nodes,
        complete: visit.complete,
    })
}
