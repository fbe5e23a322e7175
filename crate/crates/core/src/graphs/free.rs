use super::Tree;

/// Streams one representative per isomorphism class of trees on `k`
/// vertices.
///
/// Rooted trees are generated as canonical level sequences (successor rule
/// of Beyer and Hedetniemi, constant amortized time); a rooted tree is
/// emitted only when its root is the canonical center of the underlying
/// free tree, so every free tree appears exactly once.
pub fn trees_up_to_iso(k: usize) -> FreeTrees {
    FreeTrees {
        levels: if k == 0 { None } else { Some((0..k).collect()) },
    }
}

#[derive(Clone, Debug)]
pub struct FreeTrees {
    levels: Option<Vec<usize>>,
}

impl FreeTrees {
    fn advance(levels: &mut [usize]) -> bool {
        let Some(p) = levels.iter().rposition(|&l| l > 1) else {
            return false;
        };
        let q = levels[..p]
            .iter()
            .rposition(|&l| l == levels[p] - 1)
            .expect("level sequences are contiguous");
        let shift = p - q;
        for i in p..levels.len() {
            levels[i] = levels[i - shift];
        }
        true
    }

    fn parents(levels: &[usize]) -> Vec<usize> {
        let mut last_at = vec![0usize; levels.len()];
        let mut parents = vec![0usize; levels.len()];
        for (i, &l) in levels.iter().enumerate() {
            if l > 0 {
                parents[i] = last_at[l - 1];
            }
            last_at[l] = i;
        }
        parents
    }
}

impl Iterator for FreeTrees {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        loop {
            let levels = self.levels.as_mut()?;
            let parents = Self::parents(levels);
            if !Self::advance(levels) {
                self.levels = None;
            }
            let tree = Tree::from_parents(&parents).expect("level sequence encodes a tree");
            // Keep the rooting only when the root is the canonical center.
            if tree.layout().root == 0 {
                return Some(tree);
            }
        }
    }
}
