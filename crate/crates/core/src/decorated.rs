//! Decorated graphs `(g, c, w, q)` labelling the torus-fixed components, and
//! the exhaustive weight and marking loops.

use thiserror::Error;

use crate::arith::{ArithError, Rat};
use crate::graphs::{Coloring, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecoratedError {
    #[error("expected {expected} edge weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("edge weights must be positive")]
    NonPositiveWeight,
    #[error("coloring is not proper or has the wrong length")]
    BadColoring,
    #[error("mark {mark} points at vertex {vertex}, but the tree has {vertices} vertices")]
    BadMark {
        mark: usize,
        vertex: usize,
        vertices: usize,
    },
    #[error("torus weights must be pairwise distinct and nonzero")]
    BadLambda,
    #[error("color {color} has no torus weight (only {available} given)")]
    MissingLambda { color: usize, available: usize },
}

/// Sampled torus weights `λ_0..λ_n`. Samples are integers, which is all
/// the engine draws; [`LambdaAssignment::as_rats`] exposes them as
/// rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaAssignment {
    weights: Vec<i64>,
}

impl LambdaAssignment {
    pub fn new(weights: Vec<i64>) -> Result<Self, DecoratedError> {
        for (i, &a) in weights.iter().enumerate() {
            if a == 0 || weights[..i].contains(&a) {
                return Err(DecoratedError::BadLambda);
            }
        }
        Ok(LambdaAssignment { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `λ_i` as a machine integer.
    pub fn get(&self, i: usize) -> i64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn as_rats(&self) -> Vec<Rat> {
        self.weights.iter().map(|&w| Rat::from_int(w)).collect()
    }
}

/// A vertex-edge incidence `(v, e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Flag {
    pub vertex: usize,
    pub edge: usize,
}

/// A borrowed view of one decorated graph. Weights are aligned with
/// `tree.edges()`; `marks[j]` is the vertex carrying mark `j + 1`.
#[derive(Clone, Copy, Debug)]
pub struct DecoratedGraph<'a> {
    tree: &'a Tree,
    coloring: &'a Coloring,
    weights: &'a [u32],
    marks: &'a [usize],
}

impl<'a> DecoratedGraph<'a> {
    pub fn new(
        tree: &'a Tree,
        coloring: &'a Coloring,
        weights: &'a [u32],
        marks: &'a [usize],
    ) -> Result<Self, DecoratedError> {
        if weights.len() != tree.edge_count() {
            return Err(DecoratedError::WeightCount {
                expected: tree.edge_count(),
                got: weights.len(),
            });
        }
        if weights.contains(&0) {
            return Err(DecoratedError::NonPositiveWeight);
        }
        if !coloring.is_proper(tree) {
            return Err(DecoratedError::BadColoring);
        }
        if let Some((j, &v)) = marks.iter().enumerate().find(|(_, &v)| v >= tree.vertex_count()) {
            return Err(DecoratedError::BadMark {
                mark: j + 1,
                vertex: v,
                vertices: tree.vertex_count(),
            });
        }
        Ok(DecoratedGraph {
            tree,
            coloring,
            weights,
            marks,
        })
    }

    pub fn tree(&self) -> &'a Tree {
        self.tree
    }

    pub fn coloring(&self) -> &'a Coloring {
        self.coloring
    }

    pub fn weights(&self) -> &'a [u32] {
        self.weights
    }

    pub fn marks(&self) -> &'a [usize] {
        self.marks
    }

    /// Σ w(e).
    pub fn degree(&self) -> u32 {
        self.weights.iter().sum()
    }

    pub fn color(&self, v: usize) -> usize {
        self.coloring.0[v] as usize
    }

    /// Colors of the endpoints of edge `e`, in the tree's stored order.
    pub fn edge_colors(&self, e: usize) -> (usize, usize) {
        let (a, b) = self.tree.edges()[e];
        (self.color(a), self.color(b))
    }

    pub fn flags(&self, v: usize) -> impl Iterator<Item = Flag> + 'a {
        self.tree
            .incident_edges(v)
            .iter()
            .map(move |&edge| Flag { vertex: v, edge })
    }

    pub fn marks_at(&self, v: usize) -> impl Iterator<Item = usize> + 'a {
        self.marks
            .iter()
            .enumerate()
            .filter(move |(_, &w)| w == v)
            .map(|(j, _)| j)
    }

    /// `n(v) = val(v) + |q⁻¹(v)|`.
    pub fn nv(&self, v: usize) -> usize {
        self.tree.degree(v) + self.marks.iter().filter(|&&w| w == v).count()
    }

    pub fn check_lambda(&self, s: &LambdaAssignment) -> Result<(), DecoratedError> {
        match self.coloring.0.iter().map(|&c| c as usize).max() {
            Some(c) if c >= s.len() => Err(DecoratedError::MissingLambda {
                color: c,
                available: s.len(),
            }),
            _ => Ok(()),
        }
    }
}

/// `n(v)` as a free function.
pub fn nv(g: &DecoratedGraph<'_>, v: usize) -> usize {
    g.nv(v)
}

/// `ω_F = (λ_v - λ_w) / d_e`, where `w` is the far end of the flag's edge.
pub fn omega(g: &DecoratedGraph<'_>, f: Flag, s: &LambdaAssignment) -> Result<Rat, ArithError> {
    let w = g.tree.other_end(f.edge, f.vertex);
    let num = s.get(g.color(f.vertex)) - s.get(g.color(w));
    Rat::from_frac(num, g.weights[f.edge] as i64)
}

/// Every composition of `d` into `edge_count(t)` positive parts, in
/// lexicographic order.
pub fn weight_assignments(t: &Tree, d: u32) -> Compositions {
    Compositions::new(t.edge_count(), d)
}

#[derive(Clone, Debug)]
pub struct Compositions {
    slack: Vec<u32>,
    done: bool,
}

impl Compositions {
    pub fn new(parts: usize, total: u32) -> Self {
        if parts == 0 || (total as usize) < parts {
            return Compositions {
                slack: Vec::new(),
                done: !(parts == 0 && total == 0),
            };
        }
        let mut slack = vec![0; parts];
        slack[parts - 1] = total - parts as u32;
        Compositions { slack, done: false }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.slack.iter().map(|&x| x + 1).collect();
        match self.slack.iter().rposition(|&x| x > 0) {
            Some(k) if k > 0 => {
                let last = self.slack.len() - 1;
                let rest = self.slack[k] - 1;
                self.slack[k - 1] += 1;
                self.slack[k] = 0;
                self.slack[last] = rest;
            }
            _ => self.done = true,
        }
        Some(out)
    }
}

/// Every map `{1..m} -> V`, each exactly once.
pub fn mark_assignments(t: &Tree, m: usize) -> Markings {
    Markings {
        vertices: t.vertex_count(),
        current: vec![0; m],
        done: t.vertex_count() == 0 && m > 0,
    }
}

#[derive(Clone, Debug)]
pub struct Markings {
    vertices: usize,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for Markings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = true;
        for slot in self.current.iter_mut().rev() {
            *slot += 1;
            if *slot < self.vertices {
                self.done = false;
                break;
            }
            *slot = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{colored_aut_count, colorings_up_to_aut, prufer_decode, trees_up_to_iso, PruferSeq};
    use std::collections::HashSet;

    fn path(n: usize) -> Tree {
        Tree::new(n, (1..n).map(|i| (i - 1, i)).collect()).unwrap()
    }

    #[test]
    fn weight_examples() {
        let w: Vec<_> = weight_assignments(&path(2), 3).collect();
        assert_eq!(w, vec![vec![3]]);
        let w: Vec<_> = weight_assignments(&path(3), 3).collect();
        assert_eq!(w, vec![vec![1, 2], vec![2, 1]]);
        let star = Tree::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let w: Vec<_> = weight_assignments(&star, 5).collect();
        assert_eq!(w.len(), 6);
        assert_eq!(weight_assignments(&star, 2).count(), 0);
    }

    #[test]
    fn compositions_match_brute_force() {
        for parts in 1..=4usize {
            for total in 0..=8u32 {
                let got: Vec<Vec<u32>> = Compositions::new(parts, total).collect();
                let set: HashSet<Vec<u32>> = got.iter().cloned().collect();
                assert_eq!(set.len(), got.len());
                let brute: HashSet<Vec<u32>> = (0..(total as usize + 1).pow(parts as u32))
                    .map(|mut code| {
                        (0..parts)
                            .map(|_| {
                                let x = (code % (total as usize + 1)) as u32;
                                code /= total as usize + 1;
                                x
                            })
                            .collect::<Vec<u32>>()
                    })
                    .filter(|v| v.iter().all(|&x| x > 0) && v.iter().sum::<u32>() == total)
                    .collect();
                assert_eq!(set, brute, "parts={parts} total={total}");
            }
        }
    }

    #[test]
    fn marking_examples() {
        assert_eq!(mark_assignments(&path(2), 2).count(), 4);
        let none: Vec<_> = mark_assignments(&path(4), 0).collect();
        assert_eq!(none, vec![Vec::<usize>::new()]);
        assert_eq!(mark_assignments(&path(3), 1).count(), 3);
        let all: HashSet<Vec<usize>> = mark_assignments(&path(3), 3).collect();
        assert_eq!(all.len(), 27);
    }

    #[test]
    fn omega_examples() {
        let t = path(2);
        let c = Coloring(vec![0, 1]);
        let s = LambdaAssignment::new(vec![3, 5]).unwrap();
        let w1 = [1u32];
        let g = DecoratedGraph::new(&t, &c, &w1, &[]).unwrap();
        let f = Flag { vertex: 0, edge: 0 };
        assert_eq!(omega(&g, f, &s).unwrap(), Rat::from_int(-2));
        assert_eq!(omega(&g, Flag { vertex: 1, edge: 0 }, &s).unwrap(), Rat::from_int(2));
        let w2 = [2u32];
        let g2 = DecoratedGraph::new(&t, &c, &w2, &[]).unwrap();
        assert_eq!(omega(&g2, f, &s).unwrap(), Rat::from_int(-1));
    }

    #[test]
    fn nv_examples() {
        let t = path(3);
        let c = Coloring(vec![0, 1, 0]);
        let w = [1u32, 1];
        let g = DecoratedGraph::new(&t, &c, &w, &[]).unwrap();
        assert_eq!(nv(&g, 0), 1);
        assert_eq!(nv(&g, 1), 2);
        let e = path(2);
        let c2 = Coloring(vec![0, 1]);
        let w1 = [1u32];
        let marks = [0usize, 0];
        let g = DecoratedGraph::new(&e, &c2, &w1, &marks).unwrap();
        assert_eq!(nv(&g, 0), 3);
        assert_eq!(g.marks_at(0).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn rejects_invalid_graphs() {
        let t = path(2);
        let c = Coloring(vec![0, 0]);
        assert_eq!(
            DecoratedGraph::new(&t, &c, &[1], &[]).unwrap_err(),
            DecoratedError::BadColoring
        );
        let c = Coloring(vec![0, 1]);
        assert!(matches!(
            DecoratedGraph::new(&t, &c, &[1], &[2]),
            Err(DecoratedError::BadMark { .. })
        ));
        assert!(matches!(
            DecoratedGraph::new(&t, &c, &[0], &[]),
            Err(DecoratedError::NonPositiveWeight)
        ));
        assert!(LambdaAssignment::new(vec![1, 1]).is_err());
        assert!(LambdaAssignment::new(vec![0, 1]).is_err());
    }

    /// Brute-force classification of decorated graphs: enumerate all
    /// labelled data on each Prüfer-decoded tree and deduplicate by the
    /// lexicographically least image under all vertex relabellings.
    /// Returns (class count, Σ 1/|Aut(Γ)| over classes).
    fn brute_decorated(n: usize, d: u32, m: usize) -> (usize, Rat) {
        use crate::graphs::brute::permutations;
        let mut classes: HashSet<Vec<u64>> = HashSet::new();
        let mut weighted = Rat::zero();
        for k in 2..=(d as usize + 1) {
            let seqs: Vec<Vec<usize>> = (0..k.pow((k - 2) as u32))
                .map(|mut code| {
                    (0..k - 2)
                        .map(|_| {
                            let x = code % k + 1;
                            code /= k;
                            x
                        })
                        .collect()
                })
                .collect();
            let perms = permutations(k);
            for seq in seqs {
                let t = prufer_decode(&PruferSeq(seq), k).unwrap();
                for cols in crate::graphs::brute::proper_colorings(&t, (n + 1) as u8) {
                    for w in weight_assignments(&t, d) {
                        for q in mark_assignments(&t, m) {
                            // canonical form: min over relabellings of the
                            // sorted (edge, weight) list, colors and marks
                            let image = |p: &Vec<usize>| {
                                let mut es: Vec<(usize, usize, u32)> = t
                                    .edges()
                                    .iter()
                                    .zip(&w)
                                    .map(|(&(a, b), &wt)| (p[a].min(p[b]), p[a].max(p[b]), wt))
                                    .collect();
                                es.sort();
                                let mut colors = vec![0u8; k];
                                for v in 0..k {
                                    colors[p[v]] = cols[v];
                                }
                                let mut key: Vec<u64> = Vec::new();
                                key.push(k as u64);
                                for (a, b, wt) in es {
                                    key.extend([a as u64, b as u64, wt as u64]);
                                }
                                key.extend(colors.iter().map(|&c| c as u64));
                                key.extend(q.iter().map(|&v| p[v] as u64));
                                key
                            };
                            let images: Vec<Vec<u64>> = perms.iter().map(image).collect();
                            let canon = images.iter().min().unwrap().clone();
                            if classes.insert(canon) {
                                let own = image(&(0..k).collect());
                                let aut = images.iter().filter(|im| **im == own).count();
                                weighted += Rat::from_frac(1, aut as i64).unwrap();
                            }
                        }
                    }
                }
            }
        }
        (classes.len(), weighted)
    }

    fn loop_weight(n: usize, d: u32, m: usize) -> (usize, Rat) {
        let mut iterations = 0;
        let mut weighted = Rat::zero();
        for k in 2..=(d as usize + 1) {
            for t in trees_up_to_iso(k) {
                for c in colorings_up_to_aut(&t, n + 1) {
                    let aut = colored_aut_count(&t, &c) as i64;
                    let nw = weight_assignments(&t, d).count();
                    let nq = mark_assignments(&t, m).count();
                    iterations += nw * nq;
                    weighted += Rat::from_frac((nw * nq) as i64, aut).unwrap();
                }
            }
        }
        (iterations, weighted)
    }

    #[test]
    fn decorated_class_counts() {
        assert_eq!(brute_decorated(2, 1, 0).0, 3);
        assert_eq!(brute_decorated(1, 1, 2).0, 4);
        // 3 double edges, 3 paths x_i - x_j - x_k with distinct colors and
        // 6 paths x_i - x_j - x_i.
        assert_eq!(brute_decorated(2, 2, 0).0, 12);
    }

    #[test]
    fn loop_weighting_matches_classification() {
        for n in 1..=2 {
            for d in 1..=2 {
                for m in 0..=2 {
                    let (_, brute) = brute_decorated(n, d, m);
                    let (_, looped) = loop_weight(n, d, m);
                    assert_eq!(brute, looped, "n={n} d={d} m={m}");
                }
            }
        }
        assert_eq!(loop_weight(2, 1, 0).0, 3);
        assert_eq!(loop_weight(1, 1, 2).0, 4);
    }
}
