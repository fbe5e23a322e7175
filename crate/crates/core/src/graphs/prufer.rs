use std::collections::BinaryHeap;
use std::cmp::Reverse;

use super::{GraphError, Tree};

/// A Prüfer sequence with 1-based entries, length `k - 2` for a tree on `k`
/// vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PruferSeq(pub Vec<usize>);

/// Standard Prüfer decoding. Entries are 1-based; the returned tree uses
/// vertex `i - 1` for label `i`.
pub fn prufer_decode(seq: &PruferSeq, k: usize) -> Result<Tree, GraphError> {
    if k < 2 {
        return Err(GraphError::Prufer(format!("need at least 2 vertices, got {k}")));
    }
    if seq.0.len() != k - 2 {
        return Err(GraphError::Prufer(format!(
            "length {} does not match {} vertices",
            seq.0.len(),
            k
        )));
    }
    if let Some(&bad) = seq.0.iter().find(|&&x| x == 0 || x > k) {
        return Err(GraphError::Prufer(format!("entry {bad} outside 1..={k}")));
    }
    let mut degree = vec![1usize; k];
    for &x in &seq.0 {
        degree[x - 1] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..k).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(k - 1);
    for &x in &seq.0 {
        let Reverse(leaf) = leaves.pop().expect("a leaf always exists");
        let v = x - 1;
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(Reverse(v));
        }
    }
    let Reverse(a) = leaves.pop().expect("two vertices remain");
    let Reverse(b) = leaves.pop().expect("two vertices remain");
    edges.push((a, b));
    Tree::new(k, edges)
}

/// Inverse of [`prufer_decode`] for labeled trees.
pub fn prufer_encode(t: &Tree) -> PruferSeq {
    let k = t.vertex_count();
    if k <= 2 {
        return PruferSeq(Vec::new());
    }
    let mut degree: Vec<usize> = (0..k).map(|v| t.degree(v)).collect();
    let mut removed = vec![false; k];
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..k).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut out = Vec::with_capacity(k - 2);
    while out.len() < k - 2 {
        let Reverse(leaf) = leaves.pop().expect("a leaf always exists");
        removed[leaf] = true;
        let nb = t
            .neighbors(leaf)
            .find(|&w| !removed[w])
            .expect("leaf has a live neighbour");
        out.push(nb + 1);
        degree[nb] -= 1;
        if degree[nb] == 1 {
            leaves.push(Reverse(nb));
        }
    }
    PruferSeq(out)
}
