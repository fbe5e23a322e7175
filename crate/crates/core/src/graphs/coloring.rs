use super::{GraphError, Tree};

const OPEN: u8 = 0;
const CLOSE: u8 = 1;

/// A vertex coloring by torus-fixed points `x_0..x_n`, stored as indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring(pub Vec<u8>);

impl Coloring {
    pub fn uniform(vertex_count: usize) -> Self {
        Coloring(vec![0; vertex_count])
    }

    pub fn colors(&self) -> &[u8] {
        &self.0
    }

    pub fn is_proper(&self, t: &Tree) -> bool {
        self.0.len() == t.vertex_count() && t.edges().iter().all(|&(a, b)| self.0[a] != self.0[b])
    }

    pub fn check(&self, t: &Tree, ncolors: usize) -> Result<(), GraphError> {
        if self.0.len() != t.vertex_count() {
            return Err(GraphError::Coloring(format!(
                "expected {} colors, got {}",
                t.vertex_count(),
                self.0.len()
            )));
        }
        if let Some(&c) = self.0.iter().find(|&&c| c as usize >= ncolors) {
            return Err(GraphError::Coloring(format!("color {c} out of range")));
        }
        if !self.is_proper(t) {
            return Err(GraphError::Coloring("adjacent vertices share a color".into()));
        }
        Ok(())
    }
}

/// Colored AHU codes of every subtree in the tree's canonical layout, plus
/// the code of the root half when the tree is bicentral.
fn colored_codes(t: &Tree, colors: &[u8]) -> (Vec<Vec<u8>>, Option<Vec<u8>>) {
    let layout = t.layout();
    let n = t.vertex_count();
    let mut codes: Vec<Vec<u8>> = vec![Vec::new(); n];
    let encode = |v: usize, kids: &mut Vec<&Vec<u8>>| {
        kids.sort();
        let mut code = Vec::with_capacity(3 + kids.iter().map(|k| k.len()).sum::<usize>());
        code.push(OPEN);
        code.push(colors[v] + 2);
        for k in kids.iter() {
            code.extend_from_slice(k);
        }
        code.push(CLOSE);
        code
    };
    for &v in layout.preorder.iter().rev() {
        let mut kids: Vec<&Vec<u8>> = layout.children[v].iter().map(|&w| &codes[w]).collect();
        codes[v] = encode(v, &mut kids);
    }
    let half = layout.other_center.map(|b| {
        let root = layout.root;
        let mut kids: Vec<&Vec<u8>> = layout.children[root]
            .iter()
            .filter(|&&w| w != b)
            .map(|&w| &codes[w])
            .collect();
        encode(root, &mut kids)
    });
    (codes, half)
}

fn factorial_u64(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Number of automorphisms of `t` that preserve the coloring `c`.
pub fn colored_aut_count(t: &Tree, c: &Coloring) -> u64 {
    let layout = t.layout();
    let (codes, half) = colored_codes(t, &c.0);
    let mut aut = 1u64;
    for kids in &layout.children {
        let mut kid_codes: Vec<&Vec<u8>> = kids.iter().map(|&w| &codes[w]).collect();
        kid_codes.sort();
        let mut run = 1;
        for i in 1..=kid_codes.len() {
            if i < kid_codes.len() && kid_codes[i] == kid_codes[i - 1] {
                run += 1;
            } else {
                aut *= factorial_u64(run);
                run = 1;
            }
        }
    }
    if let (Some(b), Some(half)) = (layout.other_center, half) {
        if half == codes[b] {
            aut *= 2;
        }
    }
    aut
}

/// True when `colors` is the distinguished representative of its orbit:
/// isomorphic sibling subtrees appear in non-decreasing colored-code order,
/// and for symmetric bicentral trees the root half does not exceed the
/// other half.
fn is_orbit_representative(t: &Tree, colors: &[u8]) -> bool {
    let layout = t.layout();
    let (codes, half) = colored_codes(t, colors);
    for (v, twin) in layout.prev_twin.iter().enumerate() {
        if let Some(u) = *twin {
            if codes[u] > codes[v] {
                return false;
            }
        }
    }
    if layout.halves_swap {
        let b = layout.other_center.expect("swap implies bicentral");
        if half.expect("bicentral") > codes[b] {
            return false;
        }
    }
    true
}

/// Streams one proper coloring per orbit of `Aut(t)` using `ncolors`
/// colors.
pub fn colorings_up_to_aut(t: &Tree, ncolors: usize) -> Colorings<'_> {
    assert!(ncolors <= 250, "at most 250 colors supported");
    Colorings {
        tree: t,
        ncolors: ncolors as u8,
        colors: vec![0; t.vertex_count()],
        started: false,
        done: ncolors == 0,
    }
}

/// Backtracking enumeration over the canonical preorder. Candidates are
/// pruned by properness and by the cheap first-byte consequences of the
/// representative rule; survivors are checked in full.
#[derive(Clone, Debug)]
pub struct Colorings<'a> {
    tree: &'a Tree,
    ncolors: u8,
    colors: Vec<u8>,
    started: bool,
    done: bool,
}

impl Colorings<'_> {
    fn lower_bound(&self, v: usize) -> u8 {
        let layout = self.tree.layout();
        let mut lo = 0;
        if let Some(u) = layout.prev_twin[v] {
            lo = self.colors[u];
        }
        if layout.halves_swap && layout.other_center == Some(v) {
            lo = lo.max(self.colors[layout.root] + 1);
        }
        lo
    }

    fn search(&mut self, mut pos: usize, mut start: u8) -> bool {
        let order = &self.tree.layout().preorder;
        let parent = &self.tree.layout().parent;
        let last = order.len() - 1;
        loop {
            let v = order[pos];
            let forbidden = parent[v].map(|p| self.colors[p]);
            let mut c = start.max(self.lower_bound(v));
            if Some(c) == forbidden {
                c += 1;
            }
            if c < self.ncolors {
                self.colors[v] = c;
                if pos == last {
                    return true;
                }
                pos += 1;
                start = 0;
            } else {
                if pos == 0 {
                    return false;
                }
                pos -= 1;
                start = self.colors[order[pos]] + 1;
            }
        }
    }
}

impl Iterator for Colorings<'_> {
    type Item = Coloring;

    fn next(&mut self) -> Option<Coloring> {
        if self.done {
            return None;
        }
        loop {
            let found = if self.started {
                let last = self.colors.len() - 1;
                let v = self.tree.layout().preorder[last];
                self.search(last, self.colors[v] + 1)
            } else {
                self.started = true;
                self.search(0, 0)
            };
            if !found {
                self.done = true;
                return None;
            }
            if is_orbit_representative(self.tree, &self.colors) {
                return Some(Coloring(self.colors.clone()));
            }
        }
    }
}
