//! Planar rooted tree combinatorics.
//!
//! Two families: plain planar trees with arity-labeled vertices (the carrier
//! of the free operad), and planted leveled trees whose vertices alternate
//! between odd levels (operad-label slots) and even levels (cell slots),
//! indexing the filtration layers of operadic pushouts along free maps.

use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("infinite family: arity 0 or 1 requested without a vertex bound")]
    Unbounded,
}

/// A planar rooted tree: a leaf, or a vertex with an ordered list of
/// children.  Vertex arity = number of children.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlanarTree {
    Leaf,
    Vertex(Vec<PlanarTree>),
}

impl PlanarTree {
    pub fn leaf_count(&self) -> usize {
        match self {
            PlanarTree::Leaf => 1,
            PlanarTree::Vertex(cs) => cs.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            PlanarTree::Leaf => 0,
            PlanarTree::Vertex(cs) => 1 + cs.iter().map(|c| c.vertex_count()).sum::<usize>(),
        }
    }

    /// Vertex arities in depth-first (root first) order.
    pub fn arities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn rec(t: &PlanarTree, out: &mut Vec<usize>) {
            if let PlanarTree::Vertex(cs) = t {
                out.push(cs.len());
                for c in cs {
                    rec(c, out);
                }
            }
        }
        rec(self, &mut out);
        out
    }

    /// Nested-array notation, e.g. [2,[2,"L","L"],"L"] for a left comb.
    pub fn to_value(&self) -> Value {
        match self {
            PlanarTree::Leaf => json!("L"),
            PlanarTree::Vertex(cs) => {
                let mut arr = vec![json!(cs.len())];
                arr.extend(cs.iter().map(|c| c.to_value()));
                Value::Array(arr)
            }
        }
    }

    /// Graft `other` into the i-th leaf (0-based, left to right).
    pub fn graft(&self, i: usize, other: &PlanarTree) -> PlanarTree {
        fn rec(t: &PlanarTree, i: &mut usize, other: &PlanarTree) -> PlanarTree {
            match t {
                PlanarTree::Leaf => {
                    let here = *i == 0;
                    *i = i.wrapping_sub(1);
                    if here {
                        other.clone()
                    } else {
                        PlanarTree::Leaf
                    }
                }
                PlanarTree::Vertex(cs) => {
                    PlanarTree::Vertex(cs.iter().map(|c| rec(c, i, other)).collect())
                }
            }
        }
        let mut idx = i;
        rec(self, &mut idx, other)
    }
}

/// All planar trees with the given leaf count whose vertex arities lie in
/// `allowed_arities`, in canonical order.  A bound on the vertex count is
/// mandatory when arity 0 or 1 is allowed (the family is infinite otherwise).
pub fn enumerate_planar_trees(
    n_leaves: usize,
    allowed_arities: &[usize],
    max_vertices: Option<usize>,
) -> Result<Vec<PlanarTree>, TreeError> {
    if max_vertices.is_none() && allowed_arities.iter().any(|&a| a <= 1) {
        return Err(TreeError::Unbounded);
    }
    let bound = max_vertices.unwrap_or(if n_leaves == 0 { 0 } else { n_leaves });
    let mut memo: BTreeMap<(usize, usize), Vec<PlanarTree>> = BTreeMap::new();
    fn gen(
        n: usize,
        v_budget: usize,
        arities: &[usize],
        memo: &mut BTreeMap<(usize, usize), Vec<PlanarTree>>,
    ) -> Vec<PlanarTree> {
        if let Some(hit) = memo.get(&(n, v_budget)) {
            return hit.clone();
        }
        let mut out = Vec::new();
        if n == 1 {
            out.push(PlanarTree::Leaf);
        }
        for &k in arities {
            if v_budget == 0 {
                continue;
            }
            // distribute n leaves over k ordered subtrees
            let mut stack: Vec<(Vec<PlanarTree>, usize, usize)> = vec![(vec![], n, v_budget - 1)];
            for _ in 0..k {
                let mut next = Vec::new();
                for (prefix, leaves_left, v_left) in stack {
                    for part in 0..=leaves_left {
                        for sub in gen(part, v_left, arities, memo) {
                            let used = sub.vertex_count();
                            let mut p = prefix.clone();
                            p.push(sub);
                            next.push((p, leaves_left - part, v_left - used));
                        }
                    }
                }
                stack = next;
            }
            for (children, leaves_left, _) in stack {
                if leaves_left == 0 {
                    out.push(PlanarTree::Vertex(children));
                }
            }
        }
        out.sort();
        out.dedup();
        memo.insert((n, v_budget), out.clone());
        out
    }
    let mut all = gen(n_leaves, bound, allowed_arities, &mut memo);
    all.retain(|t| t.leaf_count() == n_leaves);
    all.sort();
    Ok(all)
}

/// A subtree rooted at an even level: a leaf, or a cell vertex whose
/// children sit at the next odd level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvenSubtree {
    Leaf,
    Cell(Vec<OddSubtree>),
}

/// A subtree rooted at an odd level: an operad-label slot whose children sit
/// at the next even level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OddSubtree {
    pub children: Vec<EvenSubtree>,
}

/// A planted leveled tree: the root vertex sits at level 1 (odd).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LeveledTree {
    pub root: OddSubtree,
}

impl EvenSubtree {
    fn leaf_count(&self) -> usize {
        match self {
            EvenSubtree::Leaf => 1,
            EvenSubtree::Cell(cs) => cs.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    fn cell_count(&self) -> usize {
        match self {
            EvenSubtree::Leaf => 0,
            EvenSubtree::Cell(cs) => 1 + cs.iter().map(|c| c.cell_count()).sum::<usize>(),
        }
    }

    fn to_value(&self) -> Value {
        match self {
            EvenSubtree::Leaf => json!("L"),
            EvenSubtree::Cell(cs) => {
                let mut arr = vec![json!("c"), json!(cs.len())];
                arr.extend(cs.iter().map(|c| c.to_value()));
                Value::Array(arr)
            }
        }
    }
}

impl OddSubtree {
    fn leaf_count(&self) -> usize {
        self.children.iter().map(|c| c.leaf_count()).sum()
    }

    fn cell_count(&self) -> usize {
        self.children.iter().map(|c| c.cell_count()).sum()
    }

    fn to_value(&self) -> Value {
        let mut arr = vec![json!("o"), json!(self.children.len())];
        arr.extend(self.children.iter().map(|c| c.to_value()));
        Value::Array(arr)
    }
}

impl LeveledTree {
    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    /// Number of even-level (cell) vertices.
    pub fn cell_count(&self) -> usize {
        self.root.cell_count()
    }

    /// Arities of cell vertices, depth-first.
    pub fn cell_arities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn even(t: &EvenSubtree, out: &mut Vec<usize>) {
            if let EvenSubtree::Cell(cs) = t {
                out.push(cs.len());
                for c in cs {
                    odd(c, out);
                }
            }
        }
        fn odd(t: &OddSubtree, out: &mut Vec<usize>) {
            for c in &t.children {
                even(c, out);
            }
        }
        odd(&self.root, &mut out);
        out
    }

    /// Arities of odd-level vertices (root included), depth-first.
    pub fn odd_arities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn even(t: &EvenSubtree, out: &mut Vec<usize>) {
            if let EvenSubtree::Cell(cs) = t {
                for c in cs {
                    odd(c, out);
                }
            }
        }
        fn odd(t: &OddSubtree, out: &mut Vec<usize>) {
            out.push(t.children.len());
            for c in &t.children {
                even(c, out);
            }
        }
        odd(&self.root, &mut out);
        out
    }

    pub fn to_value(&self) -> Value {
        self.root.to_value()
    }
}

/// All planted leveled trees with `n_leaves` leaves and exactly `t` cell
/// vertices, cell arities from `even_support`, odd arities from
/// `odd_support`; deterministic canonical order.
pub fn enumerate_leveled_trees(
    n_leaves: usize,
    t: usize,
    even_support: &[usize],
    odd_support: &[usize],
) -> Vec<LeveledTree> {
    struct Enumerator<'a> {
        even_support: &'a [usize],
        odd_support: &'a [usize],
        odd_memo: BTreeMap<(usize, usize), Vec<OddSubtree>>,
        even_memo: BTreeMap<(usize, usize), Vec<EvenSubtree>>,
    }
    impl Enumerator<'_> {
        // odd subtrees with n leaves and t cells
        fn odds(&mut self, n: usize, t: usize) -> Vec<OddSubtree> {
            if let Some(hit) = self.odd_memo.get(&(n, t)) {
                return hit.clone();
            }
            let mut out = Vec::new();
            for k in self.odd_support.to_vec() {
                for children in self.even_forests(k, n, t) {
                    out.push(OddSubtree { children });
                }
            }
            out.sort();
            self.odd_memo.insert((n, t), out.clone());
            out
        }
        // ordered k-tuples of even subtrees with total n leaves, t cells
        fn even_forests(&mut self, k: usize, n: usize, t: usize) -> Vec<Vec<EvenSubtree>> {
            if k == 0 {
                return if n == 0 && t == 0 { vec![vec![]] } else { vec![] };
            }
            let mut out = Vec::new();
            for n0 in 0..=n {
                for t0 in 0..=t {
                    for head in self.evens(n0, t0) {
                        for tail in self.even_forests(k - 1, n - n0, t - t0) {
                            let mut v = vec![head.clone()];
                            v.extend(tail);
                            out.push(v);
                        }
                    }
                }
            }
            out
        }
        // ordered k-tuples of odd subtrees with total n leaves, t cells
        fn odd_forests(&mut self, k: usize, n: usize, t: usize) -> Vec<Vec<OddSubtree>> {
            if k == 0 {
                return if n == 0 && t == 0 { vec![vec![]] } else { vec![] };
            }
            let mut out = Vec::new();
            for n0 in 0..=n {
                for t0 in 0..=t {
                    for head in self.odds(n0, t0) {
                        for tail in self.odd_forests(k - 1, n - n0, t - t0) {
                            let mut v = vec![head.clone()];
                            v.extend(tail);
                            out.push(v);
                        }
                    }
                }
            }
            out
        }
        // even subtrees with n leaves and t cells
        fn evens(&mut self, n: usize, t: usize) -> Vec<EvenSubtree> {
            if let Some(hit) = self.even_memo.get(&(n, t)) {
                return hit.clone();
            }
            let mut out = Vec::new();
            if n == 1 && t == 0 {
                out.push(EvenSubtree::Leaf);
            }
            if t >= 1 {
                for k in self.even_support.to_vec() {
                    for children in self.odd_forests(k, n, t - 1) {
                        out.push(EvenSubtree::Cell(children));
                    }
                }
            }
            out.sort();
            out.dedup();
            self.even_memo.insert((n, t), out.clone());
            out
        }
    }
    let mut e = Enumerator {
        even_support,
        odd_support,
        odd_memo: BTreeMap::new(),
        even_memo: BTreeMap::new(),
    };
    let mut all: Vec<LeveledTree> = e
        .odds(n_leaves, t)
        .into_iter()
        .map(|root| LeveledTree { root })
        .collect();
    all.sort();
    all.dedup();
    all
}

/// Graded dimension type: degree → dimension.
pub type GradedDims = BTreeMap<i64, usize>;

fn graded_convolve(a: &GradedDims, b: &GradedDims) -> GradedDims {
    let mut out = GradedDims::new();
    for (&da, &na) in a {
        for (&db, &nb) in b {
            *out.entry(da + db).or_insert(0) += na * nb;
        }
    }
    out
}

fn graded_unit() -> GradedDims {
    BTreeMap::from([(0, 1)])
}

/// Graded dimension of a planar tree all of whose vertices are decorated by
/// generators with the given per-arity graded dimensions.
pub fn tree_degree_and_dims(tree: &PlanarTree, generator_dims: &BTreeMap<usize, GradedDims>) -> GradedDims {
    let mut acc = graded_unit();
    for a in tree.arities() {
        let g = generator_dims.get(&a).cloned().unwrap_or_default();
        acc = graded_convolve(&acc, &g);
    }
    acc
}

/// Graded dimension of a leveled tree whose cell vertices are decorated from
/// `cell_dims` and odd vertices from `operad_dims` (both per arity).
pub fn leveled_tree_dims(
    tree: &LeveledTree,
    cell_dims: &BTreeMap<usize, GradedDims>,
    operad_dims: &BTreeMap<usize, GradedDims>,
) -> GradedDims {
    let mut acc = graded_unit();
    for a in tree.cell_arities() {
        acc = graded_convolve(&acc, &cell_dims.get(&a).cloned().unwrap_or_default());
    }
    for a in tree.odd_arities() {
        acc = graded_convolve(&acc, &operad_dims.get(&a).cloned().unwrap_or_default());
    }
    acc
}

pub fn catalan(n: usize) -> usize {
    // C_n = (2n)! / (n! (n+1)!)
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_counts_binary_trees() {
        for n in 1..=10usize {
            let trees = enumerate_planar_trees(n, &[2], None).unwrap();
            assert_eq!(trees.len(), catalan(n - 1), "n = {n}");
        }
    }

    #[test]
    fn mixed_arity_enumeration() {
        let trees = enumerate_planar_trees(3, &[2, 3], None).unwrap();
        assert_eq!(trees.len(), 3);
        let trees4 = enumerate_planar_trees(4, &[2, 3, 4], None).unwrap();
        // 5 binary + 5 mixed + 1 quaternary
        assert_eq!(trees4.len(), 11);
    }

    #[test]
    fn unbounded_family_errors() {
        assert!(enumerate_planar_trees(2, &[1, 2], None).is_err());
        let with_units = enumerate_planar_trees(1, &[1], Some(3)).unwrap();
        // leaf, one unary vertex, chain of two, chain of three
        assert_eq!(with_units.len(), 4);
    }

    #[test]
    fn leaf_count_conservation() {
        for t in enumerate_planar_trees(5, &[2, 3], None).unwrap() {
            let s: usize = t.arities().iter().map(|a| a - 1).sum();
            assert_eq!(s, 4);
        }
    }

    #[test]
    fn enumeration_duplicate_free() {
        let trees = enumerate_planar_trees(6, &[2, 3], None).unwrap();
        let set: std::collections::BTreeSet<_> = trees.iter().cloned().collect();
        assert_eq!(set.len(), trees.len());
    }

    #[test]
    fn graft_preserves_leaves() {
        let comb = &enumerate_planar_trees(3, &[2], None).unwrap()[0];
        let single = PlanarTree::Vertex(vec![PlanarTree::Leaf, PlanarTree::Leaf]);
        let g = comb.graft(1, &single);
        assert_eq!(g.leaf_count(), 4);
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn serialization_shape() {
        let comb = PlanarTree::Vertex(vec![
            PlanarTree::Vertex(vec![PlanarTree::Leaf, PlanarTree::Leaf]),
            PlanarTree::Leaf,
        ]);
        assert_eq!(comb.to_value(), json!([2, [2, "L", "L"], "L"]));
    }

    #[test]
    fn leveled_trees_reproduce_binary_counts() {
        // odd labels only in arity 1 (unit), binary cells: even subtrees are
        // plain binary trees, so for n leaves the count over all t is C_{n−1}
        for n in 1..=6usize {
            let total: usize = (0..n)
                .map(|t| enumerate_leveled_trees(n, t, &[2], &[1]).len())
                .sum();
            assert_eq!(total, catalan(n - 1), "n = {n}");
        }
    }

    #[test]
    fn leveled_tree_single_cell_layer() {
        // t=1, one k-ary cell, unit odd labels only: exactly one tree
        for k in 1..=4usize {
            let trees = enumerate_leveled_trees(k, 1, &[k], &[1]);
            assert_eq!(trees.len(), 1, "k = {k}");
            assert_eq!(trees[0].cell_arities(), vec![k]);
        }
    }

    #[test]
    fn leveled_tree_t_zero_is_bare_corolla() {
        // no cells: the tree is a single odd root with leaf children
        let trees = enumerate_leveled_trees(3, 0, &[2], &[1, 2, 3]);
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].odd_arities(), vec![3]);
    }

    #[test]
    fn leveled_tree_overfull_layer_is_empty() {
        // 2 binary cells need at least 3 leaves
        assert!(enumerate_leveled_trees(2, 2, &[2], &[1, 2]).is_empty());
        // generally empty for t > n−1 with cells of arity ≥ 2
        for n in 1..=4usize {
            for t in n..=(n + 2) {
                assert!(enumerate_leveled_trees(n, t, &[2, 3], &[1, 2, 3]).is_empty());
            }
        }
    }

    #[test]
    fn a_infinity_dimension_table_from_trees() {
        // generators m_k, arity k, degree k−2, k ≥ 2
        let gens: BTreeMap<usize, GradedDims> = (2..=4)
            .map(|k| (k, BTreeMap::from([((k as i64) - 2, 1)])))
            .collect();
        let mut by_degree = GradedDims::new();
        for t in enumerate_planar_trees(4, &[2, 3, 4], None).unwrap() {
            for (d, m) in tree_degree_and_dims(&t, &gens) {
                *by_degree.entry(d).or_insert(0) += m;
            }
        }
        assert_eq!(by_degree, BTreeMap::from([(0, 5), (1, 5), (2, 1)]));
    }

    #[test]
    fn graded_dims_multiply_along_trees() {
        let gens: BTreeMap<usize, GradedDims> = BTreeMap::from([
            (2, BTreeMap::from([(0, 1)])),
            (3, BTreeMap::from([(1, 1)])),
        ]);
        let tree = PlanarTree::Vertex(vec![
            PlanarTree::Vertex(vec![PlanarTree::Leaf, PlanarTree::Leaf, PlanarTree::Leaf]),
            PlanarTree::Leaf,
        ]);
        assert_eq!(
            tree_degree_and_dims(&tree, &gens),
            BTreeMap::from([(1, 1)])
        );
    }
}
