//! Restrictions of the built-in classes to a torus-fixed point.
//!
//! Every function takes the decorated graph and the sampled torus weights
//! and returns an exact rational. Division by zero only happens for
//! unlucky samples and is reported as [`ArithError::SingularSample`].

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{expand_jet, Atom, ClassExpression};
use crate::arith::{factorial, multinomial_ext, ArithError, FactorProduct, Rat};
use crate::decorated::{DecoratedGraph, LambdaAssignment};

fn edge_lambdas(g: &DecoratedGraph<'_>, s: &LambdaAssignment, e: usize) -> (i64, i64) {
    let (a, b) = g.edge_colors(e);
    (s.get(a), s.get(b))
}

fn vertex_lambda(g: &DecoratedGraph<'_>, s: &LambdaAssignment, v: usize) -> i64 {
    s.get(g.color(v))
}

/// Multiplies `∏_{α ∈ range} (α·λ1 + (b·d_e - α)·λ2) / d_e` into `acc`.
fn edge_chain(
    acc: &mut FactorProduct,
    l1: i64,
    l2: i64,
    top: i64,
    de: i64,
    range: impl Iterator<Item = i64>,
) -> Result<(), ArithError> {
    for alpha in range {
        acc.mul_int(alpha * l1 + (top - alpha) * l2);
        acc.div_int(de)?;
    }
    Ok(())
}

fn single_hypersurface(
    acc: &mut FactorProduct,
    b: u32,
    g: &DecoratedGraph<'_>,
    s: &LambdaAssignment,
) -> Result<(), ArithError> {
    let b = b as i64;
    for (e, &w) in g.weights().iter().enumerate() {
        let (l1, l2) = edge_lambdas(g, s, e);
        let de = w as i64;
        edge_chain(acc, l1, l2, b * de, de, 0..=b * de)?;
    }
    let tree = g.tree();
    for v in 0..tree.vertex_count() {
        acc.div_int_pow(b * vertex_lambda(g, s, v), tree.degree(v) as u32 - 1)?;
    }
    Ok(())
}

/// Top Chern class of `δ_* ev^* (⊕_i O(b_i))`.
pub fn eval_hypersurface(
    b: &[u32],
    g: &DecoratedGraph<'_>,
    s: &LambdaAssignment,
) -> Result<Rat, ArithError> {
    let mut acc = FactorProduct::new();
    for &bi in b {
        single_hypersurface(&mut acc, bi, g, s)?;
    }
    Ok(acc.finish())
}

/// Top Chern class of the contact bundle on `P^3`.
pub fn eval_contact(g: &DecoratedGraph<'_>, s: &LambdaAssignment) -> Result<Rat, ArithError> {
    let mut acc = FactorProduct::new();
    for (e, &w) in g.weights().iter().enumerate() {
        let (l1, l2) = edge_lambdas(g, s, e);
        let de = w as i64;
        edge_chain(&mut acc, l1, l2, 2 * de, de, 1..2 * de)?;
    }
    let tree = g.tree();
    for v in 0..tree.vertex_count() {
        acc.mul_int_pow(2 * vertex_lambda(g, s, v), tree.degree(v) as u32 - 1);
    }
    Ok(acc.finish())
}

/// Top Chern class of `R¹δ_* ev^* O(k)` for `k < 0`.
pub fn eval_r1(k: i64, g: &DecoratedGraph<'_>, s: &LambdaAssignment) -> Result<Rat, ArithError> {
    debug_assert!(k < 0);
    let mut acc = FactorProduct::new();
    for (e, &w) in g.weights().iter().enumerate() {
        let (l1, l2) = edge_lambdas(g, s, e);
        let de = w as i64;
        edge_chain(&mut acc, l1, l2, k * de, de, k * de + 1..0)?;
    }
    let tree = g.tree();
    for v in 0..tree.vertex_count() {
        acc.mul_int_pow(k * vertex_lambda(g, s, v), tree.degree(v) as u32 - 1);
    }
    Ok(acc.finish())
}

/// `δ_*(ev^* h^r)`: `Σ_e d_e Σ_{t=0}^{r-1} λ1^t λ2^{r-1-t}`.
pub fn eval_incidency(r: u32, g: &DecoratedGraph<'_>, s: &LambdaAssignment) -> Rat {
    let rho = r - 1;
    let mut total = BigInt::zero();
    for (e, &w) in g.weights().iter().enumerate() {
        let (l1, l2) = edge_lambdas(g, s, e);
        let (l1, l2) = (BigInt::from(l1), BigInt::from(l2));
        let mut p1 = BigInt::one();
        let mut p2: Vec<BigInt> = Vec::with_capacity(rho as usize + 1);
        let mut acc = BigInt::one();
        for _ in 0..=rho {
            p2.push(acc.clone());
            acc *= &l2;
        }
        let mut edge = BigInt::zero();
        for t in 0..=rho as usize {
            edge += &p1 * &p2[rho as usize - t];
            p1 *= &l1;
        }
        total += edge * w;
    }
    Rat::from_bigint(total)
}

/// `ev_j^* O(1)` for the 1-based mark `j`.
pub fn eval_o1(j: usize, g: &DecoratedGraph<'_>, s: &LambdaAssignment) -> Rat {
    Rat::from_int(vertex_lambda(g, s, g.marks()[j - 1]))
}

/// `∏_j ev_j^* O(1)` over every mark.
pub fn eval_o1_all(g: &DecoratedGraph<'_>, s: &LambdaAssignment) -> Rat {
    let mut acc = FactorProduct::new();
    for &v in g.marks() {
        acc.mul_int(vertex_lambda(g, s, v));
    }
    acc.finish()
}

/// The mark-independent part of the inverse Euler class of the normal
/// bundle, together with the per-vertex flag sums `Σ_F ω_F^{-1}`.
///
/// The full value at a marking is `base · ∏_v S_v^{n(v) - 3}`.
#[derive(Clone, Debug)]
pub struct EulerParts {
    base: Rat,
    sums: Vec<Rat>,
    valence: Vec<i64>,
}

impl EulerParts {
    /// Marks of `g` are ignored; the coloring uses colors `0..s.len()`.
    pub fn new(g: &DecoratedGraph<'_>, s: &LambdaAssignment) -> Result<Self, ArithError> {
        let tree = g.tree();
        let ncolors = s.len();
        let mut acc = FactorProduct::new();
        let mut negative = false;
        for (e, &w) in g.weights().iter().enumerate() {
            let (c1, c2) = g.edge_colors(e);
            let (l1, l2) = (s.get(c1), s.get(c2));
            let de = w as i64;
            negative ^= w % 2 == 1;
            let f = BigInt::from(factorial(w));
            acc.div_big(&(&f * &f))?;
            acc.mul_int_pow(de, 2 * w);
            acc.div_int_pow(l1 - l2, 2 * w)?;
            for k in (0..ncolors).filter(|&k| k != c1 && k != c2) {
                let lk = s.get(k);
                for a in 0..=de {
                    acc.mul_int(de);
                    acc.div_int(a * l1 + (de - a) * l2 - de * lk)?;
                }
            }
        }
        let mut sums = Vec::with_capacity(tree.vertex_count());
        let mut valence = Vec::with_capacity(tree.vertex_count());
        for v in 0..tree.vertex_count() {
            let cv = g.color(v);
            let lv = s.get(cv);
            let val = tree.degree(v) as u32;
            for j in (0..ncolors).filter(|&j| j != cv) {
                acc.mul_int_pow(lv - s.get(j), val - 1);
            }
            // ∏_F ω_F^{-1} and Σ_F ω_F^{-1}
            let mut sum_num = BigInt::zero();
            let mut sum_den = BigInt::one();
            for f in g.flags(v) {
                let w = tree.other_end(f.edge, v);
                let de = g.weights()[f.edge] as i64;
                let diff = lv - vertex_lambda(g, s, w);
                acc.mul_int(de);
                acc.div_int(diff)?;
                sum_num = sum_num * diff + &sum_den * de;
                sum_den *= diff;
            }
            sums.push(Rat::new(sum_num, sum_den)?);
            valence.push(val as i64);
        }
        let mut base = acc.finish();
        if negative {
            base = -base;
        }
        Ok(EulerParts {
            base,
            sums,
            valence,
        })
    }

    pub fn base(&self) -> &Rat {
        &self.base
    }

    /// `S_v = Σ_{F ∋ v} ω_F^{-1}`.
    pub fn flag_sums(&self) -> &[Rat] {
        &self.sums
    }

    /// `∏_v S_v^{val(v) + counts[v] - 3}`.
    pub fn vertex_factor(&self, counts: &[usize]) -> Result<Rat, ArithError> {
        let mut acc = FactorProduct::new();
        for (v, s) in self.sums.iter().enumerate() {
            let exp = self.valence[v] + counts.get(v).copied().unwrap_or(0) as i64 - 3;
            if exp != 0 {
                acc.mul_rat_pow(s, exp)?;
            }
        }
        Ok(acc.finish())
    }

    /// The full inverse Euler class at a marking with the given number of
    /// marks on each vertex.
    pub fn value(&self, counts: &[usize]) -> Result<Rat, ArithError> {
        Ok(&self.base * self.vertex_factor(counts)?)
    }
}

fn mark_counts(g: &DecoratedGraph<'_>) -> Vec<usize> {
    let mut counts = vec![0; g.tree().vertex_count()];
    for &v in g.marks() {
        counts[v] += 1;
    }
    counts
}

/// Inverse equivariant Euler class of the normal bundle at `Γ`.
pub fn euler_inv(g: &DecoratedGraph<'_>, s: &LambdaAssignment) -> Result<Rat, ArithError> {
    EulerParts::new(g, s)?.value(&mark_counts(g))
}

/// `ψ_1^{a_1} ⋯ ψ_m^{a_m}` at `Γ`, given the flag sums `S_v`.
pub fn psi_factor_with_sums(
    g: &DecoratedGraph<'_>,
    sums: &[Rat],
    a: &[u32],
) -> Result<Rat, ArithError> {
    let tree = g.tree();
    let mut acc = FactorProduct::new();
    let mut exps = Vec::new();
    for (v, sv) in sums.iter().enumerate().take(tree.vertex_count()) {
        exps.clear();
        exps.extend(g.marks_at(v).map(|j| a[j]));
        let total: u32 = exps.iter().sum();
        if total == 0 {
            continue;
        }
        let coeff = multinomial_ext(g.nv(v) as i64, &exps)?;
        if coeff.is_zero() {
            return Ok(Rat::zero());
        }
        acc.mul_rat(&coeff);
        acc.mul_rat_pow(sv, -(total as i64))?;
    }
    Ok(acc.finish())
}

/// `ψ_1^{a_1} ⋯ ψ_m^{a_m}` at `Γ`.
pub fn psi_factor(g: &DecoratedGraph<'_>, s: &LambdaAssignment, a: &[u32]) -> Result<Rat, ArithError> {
    let parts = EulerParts::new(g, s)?;
    psi_factor_with_sums(g, parts.flag_sums(), a)
}

/// Value of a single atom at `Γ`. `Jet` is evaluated through its
/// expansion and needs at least one mark.
pub fn eval_atom(a: &Atom, g: &DecoratedGraph<'_>, s: &LambdaAssignment) -> Result<Rat, ArithError> {
    match a {
        Atom::Hypersurface(b) => eval_hypersurface(b, g, s),
        Atom::Contact => eval_contact(g, s),
        Atom::R1(k) => eval_r1(*k, g, s),
        Atom::Incidency(r) => Ok(eval_incidency(*r, g, s)),
        Atom::O1 => Ok(eval_o1_all(g, s)),
        Atom::O1i(j) => Ok(eval_o1(*j, g, s)),
        Atom::Psi(a) => psi_factor(g, s, a),
        Atom::Jet { p, z } => {
            let expansion = expand_jet(*p, *z, g.marks().len())
                .map_err(|e| ArithError::Parse(e.to_string()))?;
            evaluate(&expansion, g, s)
        }
    }
}

/// Value of a whole expression at `Γ`, by direct recursion. The engine uses
/// a compiled form of the same computation.
pub fn evaluate(
    expr: &ClassExpression,
    g: &DecoratedGraph<'_>,
    s: &LambdaAssignment,
) -> Result<Rat, ArithError> {
    Ok(match expr {
        ClassExpression::Scalar(r) => r.clone(),
        ClassExpression::Atom(a) => eval_atom(a, g, s)?,
        ClassExpression::Sum(ts) => {
            let mut acc = Rat::zero();
            for t in ts {
                acc += evaluate(t, g, s)?;
            }
            acc
        }
        ClassExpression::Product(fs) => {
            let mut acc = Rat::one();
            for f in fs {
                acc *= evaluate(f, g, s)?;
            }
            acc
        }
        ClassExpression::Power(b, e) => evaluate(b, g, s)?.pow(*e as i64)?,
    })
}
