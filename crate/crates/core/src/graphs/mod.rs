//! Trees up to isomorphism, proper colorings up to tree automorphism, and
//! automorphism counts of colored trees.

mod coloring;
mod free;
mod prufer;

pub use coloring::{colored_aut_count, colorings_up_to_aut, Coloring, Colorings};
pub use free::{trees_up_to_iso, FreeTrees};
pub use prufer::{prufer_decode, prufer_encode, PruferSeq};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a tree on {vertices} vertices needs {expected} edges, got {got}")]
    EdgeCount {
        vertices: usize,
        expected: usize,
        got: usize,
    },
    #[error("edge ({0}, {1}) is invalid")]
    BadEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("malformed Prüfer sequence: {0}")]
    Prufer(String),
    #[error("invalid coloring: {0}")]
    Coloring(String),
}

/// A tree on vertices `0..vertex_count`, together with its AHU canonical
/// code and a canonical rooted layout used for orbit enumeration.
#[derive(Clone, Debug)]
pub struct Tree {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    canonical_code: Vec<u8>,
    incident: Vec<Vec<usize>>,
    layout: Layout,
}

/// The tree rooted at a center, children ordered by subtree code.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub root: usize,
    pub preorder: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Previous sibling carrying an isomorphic subtree.
    pub prev_twin: Vec<Option<usize>>,
    /// For bicentral trees, the second center (a child of `root`).
    pub other_center: Option<usize>,
    /// True when the two halves across the central edge are isomorphic.
    pub halves_swap: bool,
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl Eq for Tree {}

impl Tree {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let expected = vertex_count.saturating_sub(1);
        if vertex_count == 0 || edges.len() != expected {
            return Err(GraphError::EdgeCount {
                vertices: vertex_count,
                expected,
                got: edges.len(),
            });
        }
        let mut incident = vec![Vec::new(); vertex_count];
        let mut seen = std::collections::HashSet::new();
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= vertex_count || b >= vertex_count || a == b {
                return Err(GraphError::BadEdge(a, b));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(GraphError::BadEdge(a, b));
            }
            incident[a].push(i);
            incident[b].push(i);
        }
        let mut tree = Tree {
            vertex_count,
            edges,
            canonical_code: Vec::new(),
            incident,
            layout: Layout {
                root: 0,
                preorder: Vec::new(),
                parent: Vec::new(),
                children: Vec::new(),
                prev_twin: Vec::new(),
                other_center: None,
                halves_swap: false,
            },
        };
        // n-1 distinct edges + connected => tree.
        let mut stack = vec![0];
        let mut visited = vec![false; vertex_count];
        visited[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in tree.neighbors(v) {
                if !visited[w] {
                    visited[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != vertex_count {
            return Err(GraphError::Disconnected);
        }
        tree.build_layout();
        Ok(tree)
    }

    /// Builds a tree from a parent array; `parents[0]` is ignored (root).
    pub fn from_parents(parents: &[usize]) -> Result<Self, GraphError> {
        let edges = parents
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &p)| (p, i))
            .collect();
        Tree::new(parents.len(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn canonical_code(&self) -> &[u8] {
        &self.canonical_code
    }

    pub fn is_isomorphic(&self, other: &Tree) -> bool {
        self.canonical_code == other.canonical_code
    }

    /// Indices of the edges incident to `v`.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn other_end(&self, edge: usize, v: usize) -> usize {
        let (a, b) = self.edges[edge];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().map(move |&e| self.other_end(e, v))
    }

    /// |Aut(t)|.
    pub fn automorphism_count(&self) -> u64 {
        colored_aut_count(self, &Coloring::uniform(self.vertex_count))
    }

    /// Returns the same tree with vertices renumbered by `perm` (old -> new).
    pub fn relabel(&self, perm: &[usize]) -> Tree {
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        Tree::new(self.vertex_count, edges).expect("relabeling preserves tree structure")
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    fn centers(&self) -> Vec<usize> {
        let n = self.vertex_count;
        if n <= 2 {
            return (0..n).collect();
        }
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut leaves: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= leaves.len();
            let mut next = Vec::new();
            for &leaf in &leaves {
                deg[leaf] = 0;
                for w in self.neighbors(leaf) {
                    if deg[w] > 0 {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            next.push(w);
                        }
                    }
                }
            }
            leaves = next;
        }
        let mut c = leaves;
        c.sort_unstable();
        c
    }

    /// AHU codes of every subtree when rooted at `root`, skipping the branch
    /// through `skip` if given. Also returns parent links and preorder.
    fn rooted_codes(
        &self,
        root: usize,
        skip: Option<usize>,
    ) -> (Vec<Vec<u8>>, Vec<Option<usize>>, Vec<usize>) {
        let n = self.vertex_count;
        let mut parent = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        let mut visited = vec![false; n];
        visited[root] = true;
        if let Some(s) = skip {
            visited[s] = true;
        }
        while let Some(v) = stack.pop() {
            order.push(v);
            for w in self.neighbors(v) {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    stack.push(w);
                }
            }
        }
        let mut codes: Vec<Vec<u8>> = vec![Vec::new(); n];
        for &v in order.iter().rev() {
            let mut kids: Vec<&Vec<u8>> = self
                .neighbors(v)
                .filter(|&w| parent[w] == Some(v))
                .map(|w| &codes[w])
                .collect();
            kids.sort();
            let mut code = Vec::with_capacity(2 + kids.iter().map(|k| k.len()).sum::<usize>());
            code.push(b'(');
            for k in kids {
                code.extend_from_slice(k);
            }
            code.push(b')');
            codes[v] = code;
        }
        (codes, parent, order)
    }

    fn build_layout(&mut self) {
        let centers = self.centers();
        let (root, other) = if centers.len() == 1 {
            (centers[0], None)
        } else {
            let a = self.rooted_codes(centers[0], None).0.swap_remove(centers[0]);
            let b = self.rooted_codes(centers[1], None).0.swap_remove(centers[1]);
            if a <= b {
                (centers[0], Some(centers[1]))
            } else {
                (centers[1], Some(centers[0]))
            }
        };
        let (codes, parent, _) = self.rooted_codes(root, None);
        let n = self.vertex_count;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let mut kids: Vec<usize> = self.neighbors(v).filter(|&w| parent[w] == Some(v)).collect();
            kids.sort_by(|&x, &y| codes[x].cmp(&codes[y]).then(x.cmp(&y)));
            children[v] = kids;
        }
        let mut prev_twin = vec![None; n];
        for kids in &children {
            for pair in kids.windows(2) {
                if codes[pair[0]] == codes[pair[1]] {
                    prev_twin[pair[1]] = Some(pair[0]);
                }
            }
        }
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for &w in children[v].iter().rev() {
                stack.push(w);
            }
        }
        let halves_swap = match other {
            Some(b) => {
                let (half, _, _) = self.rooted_codes(root, Some(b));
                half[root] == codes[b]
            }
            None => false,
        };
        self.canonical_code = codes[root].clone();
        self.layout = Layout {
            root,
            preorder,
            parent,
            children,
            prev_twin,
            other_center: other,
            halves_swap,
        };
    }
}
