//! The localization sum: every decorated graph of `M̄_{0,m}(P^n, d)`
//! contributes `P(Γ) · Euler_inv(Γ) / (|Aut(g, c)| · ∏ d_e)` at a random
//! integer specialization of the torus weights.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{factorial, ArithError, FactorProduct, Rat, RatSum};
use crate::classes::{eval_atom, psi_factor_with_sums, Atom, ClassError, ClassExpression, EulerParts};
use crate::decorated::{mark_assignments, weight_assignments, Compositions, DecoratedGraph, LambdaAssignment};
use crate::graphs::{colored_aut_count, colorings_up_to_aut, trees_up_to_iso, Coloring, Tree};

/// Fresh samples drawn after a division by zero before giving up.
pub const MAX_SAMPLE_RETRIES: u32 = 8;

const SECOND_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error("invalid computation: {0}")]
    Invalid(String),
    #[error("every one of {0} sampled weight vectors hit a zero denominator")]
    SingularRetriesExhausted(u32),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("class {index}: seeds disagree ({first} vs {second})")]
    Inconsistent { index: usize, first: Rat, second: Rat },
    #[error("worker pool: {0}")]
    Pool(String),
}

/// One localization run over `M̄_{0,m}(P^n, d)`.
#[derive(Clone, Debug)]
pub struct ComputationSpec {
    pub n: u32,
    pub d: u32,
    pub m: usize,
    pub classes: Vec<ClassExpression>,
    pub seed: u64,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
}

impl ComputationSpec {
    pub fn new(n: u32, d: u32, m: usize, classes: Vec<ClassExpression>) -> Self {
        ComputationSpec {
            n,
            d,
            m,
            classes,
            seed: 0,
            workers: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub values: Vec<Rat>,
    /// Decorated graphs summed over, counting every weighting and marking.
    pub graphs_processed: u64,
    pub sample_retries: u32,
    pub wall_time: Duration,
    pub lambda: LambdaAssignment,
}

/// Pairwise distinct integers drawn uniformly from `[1, 2^32)`.
pub fn sample_lambda<R: Rng>(n: u32, rng: &mut R) -> LambdaAssignment {
    let mut vals: Vec<i64> = Vec::with_capacity(n as usize + 1);
    while vals.len() <= n as usize {
        let v = rng.gen_range(1..(1i64 << 32));
        if !vals.contains(&v) {
            vals.push(v);
        }
    }
    LambdaAssignment::new(vals).expect("distinct nonzero samples")
}

#[derive(Clone, Debug)]
enum Node {
    Const(Rat),
    Slot(usize),
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Power(Box<Node>, u32),
}

impl Node {
    fn eval(&self, slots: &[Rat]) -> Rat {
        match self {
            Node::Const(r) => r.clone(),
            Node::Slot(i) => slots[*i].clone(),
            Node::Sum(ts) => {
                let mut acc = Rat::zero();
                for t in ts {
                    acc += t.eval(slots);
                }
                acc
            }
            Node::Product(fs) => {
                let mut acc = Rat::one();
                for f in fs {
                    let v = f.eval(slots);
                    if v.is_zero() {
                        return v;
                    }
                    acc *= v;
                }
                acc
            }
            Node::Power(b, e) => b.eval(slots).pow(*e as i64).expect("nonnegative exponent"),
        }
    }
}

/// Expressions with jets expanded and atoms deduplicated into slots, so
/// each atom is evaluated once per decorated graph.
#[derive(Clone, Debug)]
struct Program {
    atoms: Vec<Atom>,
    roots: Vec<Node>,
    /// True when no atom besides `O1()` looks at the marks, so a marking
    /// only matters through its per-vertex counts.
    symmetric: bool,
}

impl Program {
    fn compile(classes: &[ClassExpression], m: usize) -> Result<Self, ClassError> {
        let mut atoms = Vec::new();
        let mut index: HashMap<Atom, usize> = HashMap::new();
        let mut roots = Vec::with_capacity(classes.len());
        for c in classes {
            let expanded = c.expand_jets(m)?;
            roots.push(Self::lower(&expanded, &mut atoms, &mut index));
        }
        let symmetric = atoms.iter().all(|a| !a.uses_marks() || *a == Atom::O1);
        Ok(Program {
            atoms,
            roots,
            symmetric,
        })
    }

    fn lower(e: &ClassExpression, atoms: &mut Vec<Atom>, index: &mut HashMap<Atom, usize>) -> Node {
        match e {
            ClassExpression::Scalar(r) => Node::Const(r.clone()),
            ClassExpression::Atom(a) => Node::Slot(*index.entry(a.clone()).or_insert_with(|| {
                atoms.push(a.clone());
                atoms.len() - 1
            })),
            ClassExpression::Sum(ts) => Node::Sum(ts.iter().map(|t| Self::lower(t, atoms, index)).collect()),
            ClassExpression::Product(fs) => {
                Node::Product(fs.iter().map(|f| Self::lower(f, atoms, index)).collect())
            }
            ClassExpression::Power(b, e) => Node::Power(Box::new(Self::lower(b, atoms, index)), *e),
        }
    }
}

struct Task<'a> {
    tree: &'a Tree,
    coloring: Coloring,
}

struct Partial {
    values: Vec<RatSum>,
    graphs: u64,
}

impl Partial {
    fn new(k: usize) -> Self {
        Partial {
            values: vec![RatSum::new(); k],
            graphs: 0,
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in self.values.iter_mut().zip(other.values) {
            a.merge(b);
        }
        self.graphs += other.graphs;
        self
    }
}

/// `m! / ∏ c_v!`.
fn multinomial(m: usize, counts: &[usize]) -> Rat {
    let mut den = factorial(0);
    for &c in counts {
        den *= factorial(c as u32);
    }
    Rat::new(BigInt::from(factorial(m as u32)), BigInt::from(den)).expect("nonzero factorials")
}

fn run_task(
    prog: &Program,
    task: &Task<'_>,
    d: u32,
    m: usize,
    s: &LambdaAssignment,
    acc: &mut Partial,
) -> Result<(), ArithError> {
    let tree = task.tree;
    let nv = tree.vertex_count();
    let aut = colored_aut_count(tree, &task.coloring);
    let vertex_lambda: Vec<i64> = task.coloring.0.iter().map(|&c| s.get(c as usize)).collect();
    let nroots = prog.roots.len();
    let markings = (nv as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    let mut slots = vec![Rat::zero(); prog.atoms.len()];

    for weights in weight_assignments(tree, d) {
        let g0 = DecoratedGraph::new(tree, &task.coloring, &weights, &[]).expect("valid decoration");
        let parts = EulerParts::new(&g0, s)?;
        for (slot, a) in slots.iter_mut().zip(&prog.atoms) {
            if !a.uses_marks() {
                *slot = eval_atom(a, &g0, s)?;
            }
        }
        let mut weight_product = FactorProduct::new();
        weight_product.mul_int(aut as i64);
        for &w in &weights {
            weight_product.mul_int(w as i64);
        }
        let scale = parts.base().checked_div(&weight_product.finish())?;
        let mut inner = vec![RatSum::new(); nroots];

        if m == 0 {
            let vf = parts.vertex_factor(&[])?;
            for (x, root) in inner.iter_mut().zip(&prog.roots) {
                x.add(&vf * root.eval(&slots));
            }
        } else if prog.symmetric {
            // Σ over markings grouped by how many marks sit on each vertex.
            for shifted in Compositions::new(nv, (m + nv) as u32) {
                let counts: Vec<usize> = shifted.iter().map(|&c| c as usize - 1).collect();
                let mut o1 = FactorProduct::new();
                for (v, &c) in counts.iter().enumerate() {
                    o1.mul_int_pow(vertex_lambda[v], c as u32);
                }
                let o1 = o1.finish();
                for (slot, a) in slots.iter_mut().zip(&prog.atoms) {
                    if *a == Atom::O1 {
                        *slot = o1.clone();
                    }
                }
                let weight = multinomial(m, &counts) * parts.vertex_factor(&counts)?;
                for (x, root) in inner.iter_mut().zip(&prog.roots) {
                    let v = root.eval(&slots);
                    if !v.is_zero() {
                        x.add(&weight * v);
                    }
                }
            }
        } else {
            let mut cache: HashMap<Vec<usize>, Rat> = HashMap::new();
            let mut counts = vec![0usize; nv];
            for marks in mark_assignments(tree, m) {
                let g = DecoratedGraph::new(tree, &task.coloring, &weights, &marks).expect("valid marking");
                counts.iter_mut().for_each(|c| *c = 0);
                for &v in &marks {
                    counts[v] += 1;
                }
                for (slot, a) in slots.iter_mut().zip(&prog.atoms) {
                    match a {
                        Atom::Psi(exps) => *slot = psi_factor_with_sums(&g, parts.flag_sums(), exps)?,
                        a if a.uses_marks() => *slot = eval_atom(a, &g, s)?,
                        _ => {}
                    }
                }
                let vf = match cache.get(&counts) {
                    Some(v) => v.clone(),
                    None => {
                        let v = parts.vertex_factor(&counts)?;
                        cache.insert(counts.clone(), v.clone());
                        v
                    }
                };
                for (x, root) in inner.iter_mut().zip(&prog.roots) {
                    let v = root.eval(&slots);
                    if !v.is_zero() {
                        x.add(&vf * v);
                    }
                }
            }
        }
        for (out, x) in acc.values.iter_mut().zip(inner) {
            out.add(&scale * x.total());
        }
        acc.graphs = acc.graphs.saturating_add(markings);
    }
    Ok(())
}

fn check_spec(spec: &ComputationSpec) -> Result<(), EngineError> {
    if spec.n == 0 {
        return Err(EngineError::Invalid("n must be at least 1".into()));
    }
    if spec.n > 200 {
        return Err(EngineError::Invalid("n must be at most 200".into()));
    }
    if spec.d == 0 {
        return Err(EngineError::Invalid("d must be at least 1".into()));
    }
    if spec.classes.is_empty() {
        return Err(EngineError::Invalid("no classes to integrate".into()));
    }
    for c in &spec.classes {
        c.check_dimension(spec.n, spec.d, spec.m)?;
    }
    Ok(())
}

fn sum_once(
    prog: &Program,
    tasks: &[Task<'_>],
    spec: &ComputationSpec,
    s: &LambdaAssignment,
) -> Result<Partial, ArithError> {
    let k = prog.roots.len();
    tasks
        .par_iter()
        .try_fold(
            || Partial::new(k),
            |mut acc, task| {
                run_task(prog, task, spec.d, spec.m, s, &mut acc)?;
                Ok(acc)
            },
        )
        .try_reduce(|| Partial::new(k), |a, b| Ok(a.merge(b)))
}

/// Computes `∫ P` over `M̄_{0,m}(P^n, d)` for every class in the spec.
/// A sample that hits a zero denominator is discarded and redrawn.
pub fn atiyah_bott(spec: &ComputationSpec) -> Result<RunResult, EngineError> {
    let start = Instant::now();
    check_spec(spec)?;
    let prog = Program::compile(&spec.classes, spec.m)?;

    let trees: Vec<Tree> = (2..=spec.d as usize + 1).flat_map(trees_up_to_iso).collect();
    let ncolors = spec.n as usize + 1;
    let tasks: Vec<Task<'_>> = trees
        .iter()
        .flat_map(|t| colorings_up_to_aut(t, ncolors).map(move |coloring| Task { tree: t, coloring }))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| EngineError::Pool(e.to_string()))?;

    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut retries = 0;
    loop {
        let lambda = sample_lambda(spec.n, &mut rng);
        match pool.install(|| sum_once(&prog, &tasks, spec, &lambda)) {
            Ok(total) => {
                return Ok(RunResult {
                    values: total.values.into_iter().map(RatSum::total).collect(),
                    graphs_processed: total.graphs,
                    sample_retries: retries,
                    wall_time: start.elapsed(),
                    lambda,
                })
            }
            Err(ArithError::SingularSample) => {
                retries += 1;
                if retries > MAX_SAMPLE_RETRIES {
                    return Err(EngineError::SingularRetriesExhausted(retries));
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Runs with the spec's seed and with an independent one and requires the
/// two answers to agree exactly.
pub fn verify(spec: &ComputationSpec) -> Result<RunResult, EngineError> {
    let first = atiyah_bott(spec)?;
    let mut other = spec.clone();
    other.seed = spec.seed.wrapping_add(SECOND_SEED_OFFSET);
    let second = atiyah_bott(&other)?;
    for (index, (a, b)) in first.values.iter().zip(&second.values).enumerate() {
        if a != b {
            return Err(EngineError::Inconsistent {
                index,
                first: a.clone(),
                second: b.clone(),
            });
        }
    }
    Ok(RunResult {
        wall_time: first.wall_time + second.wall_time,
        sample_retries: first.sample_retries + second.sample_retries,
        ..first
    })
}

fn cube_inv(k: usize) -> Rat {
    Rat::from_frac(1, (k * k * k) as i64).expect("k >= 1")
}

/// Instanton numbers from genus-0 invariants `N_1, N_2, …` via
/// `N_d = Σ_{k | d} n_{d/k} k^{-3}`.
pub fn instanton_numbers(gw: &[Rat]) -> Vec<Rat> {
    let mut n: Vec<Rat> = Vec::with_capacity(gw.len());
    for d in 1..=gw.len() {
        let mut v = gw[d - 1].clone();
        for k in (2..=d).filter(|k| d % k == 0) {
            v -= &n[d / k - 1] * cube_inv(k);
        }
        n.push(v);
    }
    n
}

/// Inverse of [`instanton_numbers`].
pub fn gw_from_instantons(ns: &[Rat]) -> Vec<Rat> {
    (1..=ns.len())
        .map(|d| {
            (1..=d)
                .filter(|k| d % k == 0)
                .map(|k| &ns[d / k - 1] * cube_inv(k))
                .sum()
        })
        .collect()
}
