//! Arity-indexed sequences over a base category and the composition product,
//! truncated at an arity bound.
//!
//! The two base categories (bounded chain complexes and truncated simplicial
//! vector spaces) are dispatched through the [`Obj`]/[`Mor`] pair, so the
//! operadic layers above can stay base-agnostic.

use crate::chaincat::{self, ChainComplex, ChainMap};
use crate::exactla::{FieldSpec, Matrix};
use crate::simpcat::{self, SimplicialMap, SimplicialVS};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeqError {
    #[error("objects live over different base categories")]
    BaseMismatch,
    #[error("arity {0} exceeds the bound {1}")]
    ArityOverflow(usize, usize),
    #[error("exact-reduced composition product needs v(0) = 0")]
    NotReduced,
    #[error(transparent)]
    Chain(#[from] chaincat::ChainError),
    #[error(transparent)]
    Simp(#[from] simpcat::SimpError),
    #[error("{0}")]
    Other(String),
}

/// An object of one of the two base categories.
#[derive(Debug, Clone, PartialEq)]
pub enum Obj {
    Ch(ChainComplex),
    Sv(SimplicialVS),
}

/// A morphism of one of the two base categories.
#[derive(Debug, Clone, PartialEq)]
pub enum Mor {
    Ch(ChainMap),
    Sv(SimplicialMap),
}

impl Obj {
    pub fn field(&self) -> FieldSpec {
        match self {
            Obj::Ch(c) => c.field,
            Obj::Sv(x) => x.field,
        }
    }

    pub fn total_dim(&self) -> usize {
        match self {
            Obj::Ch(c) => c.total_dim(),
            Obj::Sv(x) => x.total_dim(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// The tensor unit of the same base category (same field/truncation).
    pub fn unit_like(&self) -> Obj {
        match self {
            Obj::Ch(c) => Obj::Ch(ChainComplex::unit(c.field)),
            Obj::Sv(x) => Obj::Sv(SimplicialVS::unit(x.field, x.s_max)),
        }
    }

    /// The zero object of the same base category.
    pub fn zero_like(&self) -> Obj {
        match self {
            Obj::Ch(c) => Obj::Ch(ChainComplex::zero(c.field)),
            Obj::Sv(x) => Obj::Sv(SimplicialVS::zero(x.field, x.s_max)),
        }
    }

    pub fn tensor(&self, other: &Obj) -> Result<Obj, SeqError> {
        match (self, other) {
            (Obj::Ch(a), Obj::Ch(b)) => Ok(Obj::Ch(chaincat::tensor(a, b)?)),
            (Obj::Sv(a), Obj::Sv(b)) => Ok(Obj::Sv(simpcat::sv_tensor(a, b)?)),
            _ => Err(SeqError::BaseMismatch),
        }
    }

    pub fn direct_sum(&self, other: &Obj) -> Result<Obj, SeqError> {
        match (self, other) {
            (Obj::Ch(a), Obj::Ch(b)) => Ok(Obj::Ch(a.direct_sum(b))),
            (Obj::Sv(a), Obj::Sv(b)) => Ok(Obj::Sv(a.direct_sum(b))),
            _ => Err(SeqError::BaseMismatch),
        }
    }

    /// Total homology dimension (of N for the simplicial base).
    pub fn homology_total_dim(&self) -> usize {
        match self {
            Obj::Ch(c) => chaincat::homology(c).total_dim(),
            Obj::Sv(x) => chaincat::homology(&simpcat::normalize(x)).total_dim(),
        }
    }

    pub fn as_chain(&self) -> Option<&ChainComplex> {
        match self {
            Obj::Ch(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_simplicial(&self) -> Option<&SimplicialVS> {
        match self {
            Obj::Sv(x) => Some(x),
            _ => None,
        }
    }
}

impl Mor {
    pub fn source(&self) -> Obj {
        match self {
            Mor::Ch(f) => Obj::Ch(f.source.clone()),
            Mor::Sv(f) => Obj::Sv(f.source.clone()),
        }
    }

    pub fn target(&self) -> Obj {
        match self {
            Mor::Ch(f) => Obj::Ch(f.target.clone()),
            Mor::Sv(f) => Obj::Sv(f.target.clone()),
        }
    }

    pub fn identity(x: &Obj) -> Mor {
        match x {
            Obj::Ch(c) => Mor::Ch(ChainMap::identity(c)),
            Obj::Sv(s) => Mor::Sv(SimplicialMap::identity(s)),
        }
    }

    pub fn zero(source: &Obj, target: &Obj) -> Result<Mor, SeqError> {
        match (source, target) {
            (Obj::Ch(a), Obj::Ch(b)) => Ok(Mor::Ch(ChainMap::zero(a, b))),
            (Obj::Sv(a), Obj::Sv(b)) => Ok(Mor::Sv(SimplicialMap::zero(a, b))),
            _ => Err(SeqError::BaseMismatch),
        }
    }

    /// other ∘ self.
    pub fn then(&self, other: &Mor) -> Result<Mor, SeqError> {
        match (self, other) {
            (Mor::Ch(f), Mor::Ch(g)) => Ok(Mor::Ch(f.then(g))),
            (Mor::Sv(f), Mor::Sv(g)) => Ok(Mor::Sv(f.then(g))),
            _ => Err(SeqError::BaseMismatch),
        }
    }

    pub fn add(&self, other: &Mor) -> Result<Mor, SeqError> {
        match (self, other) {
            (Mor::Ch(f), Mor::Ch(g)) => Ok(Mor::Ch(f.add(g))),
            (Mor::Sv(f), Mor::Sv(g)) => Ok(Mor::Sv(f.add(g))),
            _ => Err(SeqError::BaseMismatch),
        }
    }

    pub fn tensor(&self, other: &Mor) -> Result<Mor, SeqError> {
        match (self, other) {
            (Mor::Ch(f), Mor::Ch(g)) => Ok(Mor::Ch(chaincat::tensor_map(f, g)?)),
            (Mor::Sv(f), Mor::Sv(g)) => Ok(Mor::Sv(simpcat::sv_tensor_map(f, g)?)),
            _ => Err(SeqError::BaseMismatch),
        }
    }

    pub fn is_cofibration(&self) -> bool {
        match self {
            Mor::Ch(f) => f.is_cofibration(),
            Mor::Sv(f) => f.is_cofibration(),
        }
    }

    pub fn is_fibration(&self) -> bool {
        match self {
            Mor::Ch(f) => f.is_fibration(),
            Mor::Sv(f) => f.is_fibration(),
        }
    }

    pub fn is_weak_equivalence(&self) -> bool {
        match self {
            Mor::Ch(f) => f.is_weak_equivalence(),
            Mor::Sv(f) => f.is_weak_equivalence(),
        }
    }

    pub fn is_iso(&self) -> bool {
        match self {
            Mor::Ch(f) => f.is_iso(),
            Mor::Sv(f) => f.is_iso(),
        }
    }

    pub fn as_chain(&self) -> Option<&ChainMap> {
        match self {
            Mor::Ch(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_simplicial(&self) -> Option<&SimplicialMap> {
        match self {
            Mor::Sv(f) => Some(f),
            _ => None,
        }
    }
}

/// The symmetry isomorphism a⊗b → b⊗a of the base category (with the Koszul
/// sign for chain complexes, a plain swap for simplicial spaces).
pub fn symmetry(a: &Obj, b: &Obj) -> Result<Mor, SeqError> {
    match (a, b) {
        (Obj::Ch(a), Obj::Ch(b)) => Ok(Mor::Ch(chaincat::symmetry(a, b)?)),
        (Obj::Sv(a), Obj::Sv(b)) => Ok(Mor::Sv(simpcat::sv_symmetry(a, b)?)),
        _ => Err(SeqError::BaseMismatch),
    }
}

pub struct ObjPushout {
    pub object: Obj,
    pub from_left: Mor,
    pub from_right: Mor,
    inner: PushoutInner,
}

enum PushoutInner {
    Ch(chaincat::PushoutResult),
    Sv(simpcat::SvPushoutResult),
}

pub fn pushout(f: &Mor, g: &Mor) -> Result<ObjPushout, SeqError> {
    match (f, g) {
        (Mor::Ch(f), Mor::Ch(g)) => {
            let po = chaincat::pushout(f, g)?;
            Ok(ObjPushout {
                object: Obj::Ch(po.object.clone()),
                from_left: Mor::Ch(po.from_left.clone()),
                from_right: Mor::Ch(po.from_right.clone()),
                inner: PushoutInner::Ch(po),
            })
        }
        (Mor::Sv(f), Mor::Sv(g)) => {
            let po = simpcat::sv_pushout(f, g)?;
            Ok(ObjPushout {
                object: Obj::Sv(po.object.clone()),
                from_left: Mor::Sv(po.from_left.clone()),
                from_right: Mor::Sv(po.from_right.clone()),
                inner: PushoutInner::Sv(po),
            })
        }
        _ => Err(SeqError::BaseMismatch),
    }
}

impl ObjPushout {
    pub fn mediator(&self, f: &Mor, g: &Mor, u: &Mor, v: &Mor) -> Result<Mor, SeqError> {
        match (&self.inner, f, g, u, v) {
            (PushoutInner::Ch(po), Mor::Ch(f), Mor::Ch(g), Mor::Ch(u), Mor::Ch(v)) => {
                Ok(Mor::Ch(po.mediator(f, g, u, v)?))
            }
            (PushoutInner::Sv(po), Mor::Sv(f), Mor::Sv(g), Mor::Sv(u), Mor::Sv(v)) => {
                Ok(Mor::Sv(po.mediator(f, g, u, v)?))
            }
            _ => Err(SeqError::BaseMismatch),
        }
    }
}

/// A tensor expression: a binary-nesting tree of base objects, with the
/// evaluated object cached at every node.  Used to build the canonical
/// reorder/renest isomorphisms between iterated tensor products.
#[derive(Debug, Clone)]
pub struct TensExpr {
    pub obj: Obj,
    kids: Option<(Box<TensExpr>, Box<TensExpr>)>,
}

impl TensExpr {
    pub fn atom(obj: Obj) -> TensExpr {
        TensExpr { obj, kids: None }
    }

    pub fn pair(l: TensExpr, r: TensExpr) -> Result<TensExpr, SeqError> {
        let obj = l.obj.tensor(&r.obj)?;
        Ok(TensExpr {
            obj,
            kids: Some((Box::new(l), Box::new(r))),
        })
    }

    /// Left-iterated tensor of a factor list; the empty list is the unit.
    pub fn multi(factors: &[Obj], template: &Obj) -> Result<TensExpr, SeqError> {
        let mut iter = factors.iter();
        let mut acc = match iter.next() {
            None => return Ok(TensExpr::atom(template.unit_like())),
            Some(f) => TensExpr::atom(f.clone()),
        };
        for f in iter {
            acc = TensExpr::pair(acc, TensExpr::atom(f.clone()))?;
        }
        Ok(acc)
    }

    pub fn atoms(&self) -> Vec<&Obj> {
        match &self.kids {
            None => vec![&self.obj],
            Some((l, r)) => {
                let mut v = l.atoms();
                v.extend(r.atoms());
                v
            }
        }
    }

    /// Basis of the evaluated chain complex in degree d, as flat tuples
    /// (per-atom degrees, per-atom basis indices), in storage order.
    pub fn chain_tuples(&self, d: i64) -> Vec<(Vec<i64>, Vec<usize>)> {
        match &self.kids {
            None => {
                let c = self.obj.as_chain().expect("chain expression");
                (0..c.dim(d)).map(|i| (vec![d], vec![i])).collect()
            }
            Some((l, r)) => {
                let lc = l.obj.as_chain().expect("chain expression");
                let rc = r.obj.as_chain().expect("chain expression");
                let mut out = Vec::new();
                for i in lc.lo()..=lc.hi() {
                    let j = d - i;
                    if lc.dim(i) * rc.dim(j) == 0 {
                        continue;
                    }
                    for (ldeg, lidx) in l.chain_tuples(i) {
                        for (rdeg, ridx) in r.chain_tuples(j) {
                            let mut degs = ldeg.clone();
                            degs.extend(&rdeg);
                            let mut idxs = lidx.clone();
                            idxs.extend(&ridx);
                            out.push((degs, idxs));
                        }
                    }
                }
                out
            }
        }
    }
}

/// The canonical isomorphism between two tensor expressions over the same
/// atoms: `perm[t]` is the source atom feeding the t-th target atom.  With
/// the identity permutation this is a pure renesting (associator composite);
/// in general it permutes factors with the Koszul sign over the chain base.
pub fn reorder(src: &TensExpr, tgt: &TensExpr, perm: &[usize]) -> Result<Mor, SeqError> {
    let src_atoms = src.atoms();
    let tgt_atoms = tgt.atoms();
    if perm.len() != tgt_atoms.len() || src_atoms.len() != tgt_atoms.len() {
        return Err(SeqError::Other("permutation length mismatch".into()));
    }
    for (t, &s) in perm.iter().enumerate() {
        if src_atoms[s] != tgt_atoms[t] {
            return Err(SeqError::Other(format!(
                "atom mismatch: target slot {t} vs source slot {s}"
            )));
        }
    }
    match (&src.obj, &tgt.obj) {
        (Obj::Ch(sc), Obj::Ch(tc)) => {
            let fld = sc.field;
            let mut comps = BTreeMap::new();
            for d in sc.degrees() {
                let stuples = src.chain_tuples(d);
                let ttuples = tgt.chain_tuples(d);
                let pos: std::collections::HashMap<(Vec<i64>, Vec<usize>), usize> = ttuples
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(r, t)| (t, r))
                    .collect();
                let mut m = Matrix::zero(tc.dim(d), sc.dim(d), fld);
                for (col, (degs, idxs)) in stuples.iter().enumerate() {
                    let tdegs: Vec<i64> = perm.iter().map(|&s| degs[s]).collect();
                    let tidxs: Vec<usize> = perm.iter().map(|&s| idxs[s]).collect();
                    let row = *pos
                        .get(&(tdegs, tidxs))
                        .ok_or_else(|| SeqError::Other("reorder basis mismatch".into()))?;
                    // Koszul sign: product over transposed pairs of odd degrees
                    let mut sign = fld.one();
                    for t1 in 0..perm.len() {
                        for t2 in (t1 + 1)..perm.len() {
                            if perm[t1] > perm[t2]
                                && degs[perm[t1]].rem_euclid(2) == 1
                                && degs[perm[t2]].rem_euclid(2) == 1
                            {
                                sign = fld.neg(&sign);
                            }
                        }
                    }
                    m.set(row, col, sign);
                }
                comps.insert(d, m);
            }
            Ok(Mor::Ch(ChainMap::new(sc.clone(), tc.clone(), comps)?))
        }
        (Obj::Sv(sx), Obj::Sv(tx)) => {
            let fld = sx.field;
            let dims_at = |n: usize| -> Vec<usize> {
                src_atoms
                    .iter()
                    .map(|a| a.as_simplicial().expect("simplicial expression").dim(n))
                    .collect()
            };
            let comps: Vec<Matrix> = (0..=sx.s_max)
                .map(|n| {
                    let dims = dims_at(n);
                    let total: usize = dims.iter().product();
                    if total != sx.dim(n) {
                        // a zero factor collapses everything
                        return Matrix::zero(tx.dim(n), sx.dim(n), fld);
                    }
                    let mut m = Matrix::zero(tx.dim(n), sx.dim(n), fld);
                    for col in 0..total {
                        // decode mixed-radix source tuple (kron is associative
                        // levelwise, so nesting does not affect flat order)
                        let mut rest = col;
                        let mut tuple = vec![0usize; dims.len()];
                        for k in (0..dims.len()).rev() {
                            tuple[k] = rest % dims[k];
                            rest /= dims[k];
                        }
                        let mut row = 0usize;
                        for &s in perm {
                            row = row * dims[s] + tuple[s];
                        }
                        m.set(row, col, fld.one());
                    }
                    m
                })
                .collect();
            Ok(Mor::Sv(SimplicialMap::new(sx.clone(), tx.clone(), comps)?))
        }
        _ => Err(SeqError::BaseMismatch),
    }
}

/// Direct sum of a list of objects with the inclusion and projection of each
/// summand.
pub fn direct_sum_many(objs: &[Obj], template: &Obj) -> Result<(Obj, Vec<Mor>, Vec<Mor>), SeqError> {
    let mut total = template.zero_like();
    for o in objs {
        total = total.direct_sum(o)?;
    }
    let fld = template.field();
    let mut incls = Vec::new();
    let mut projs = Vec::new();
    match &total {
        Obj::Ch(tc) => {
            for (k, o) in objs.iter().enumerate() {
                let c = o.as_chain().ok_or(SeqError::BaseMismatch)?;
                let mut inc_comps = BTreeMap::new();
                let mut proj_comps = BTreeMap::new();
                for d in tc.degrees() {
                    let off: usize = objs[..k]
                        .iter()
                        .map(|p| p.as_chain().unwrap().dim(d))
                        .sum();
                    let mut inc = Matrix::zero(tc.dim(d), c.dim(d), fld);
                    for i in 0..c.dim(d) {
                        inc.set(off + i, i, fld.one());
                    }
                    proj_comps.insert(d, inc.transpose());
                    inc_comps.insert(d, inc);
                }
                incls.push(Mor::Ch(ChainMap::new(c.clone(), tc.clone(), inc_comps)?));
                projs.push(Mor::Ch(ChainMap::new(tc.clone(), c.clone(), proj_comps)?));
            }
        }
        Obj::Sv(tx) => {
            for (k, o) in objs.iter().enumerate() {
                let x = o.as_simplicial().ok_or(SeqError::BaseMismatch)?;
                let mut inc_comps = Vec::new();
                let mut proj_comps = Vec::new();
                for n in 0..=tx.s_max {
                    let off: usize = objs[..k]
                        .iter()
                        .map(|p| p.as_simplicial().unwrap().dim(n))
                        .sum();
                    let mut inc = Matrix::zero(tx.dim(n), x.dim(n), fld);
                    for i in 0..x.dim(n) {
                        inc.set(off + i, i, fld.one());
                    }
                    proj_comps.push(inc.transpose());
                    inc_comps.push(inc);
                }
                incls.push(Mor::Sv(SimplicialMap::new(x.clone(), tx.clone(), inc_comps)?));
                projs.push(Mor::Sv(SimplicialMap::new(tx.clone(), x.clone(), proj_comps)?));
            }
        }
    }
    Ok((total, incls, projs))
}

/// A punctured-cube diagram over either base (subset bitmasks; edges add one
/// element; the full subset is the missing corner).
pub struct ObjCube {
    pub n: usize,
    pub objects: BTreeMap<u32, Obj>,
    pub maps: BTreeMap<(u32, usize), Mor>,
}

pub struct ObjCubeColimit {
    pub object: Obj,
    pub cocone: BTreeMap<u32, Mor>,
    inner: CubeInner,
}

enum CubeInner {
    Ch(chaincat::CubeColimit, chaincat::PuncturedCube),
    Sv(simpcat::SvCubeColimit, simpcat::SvPuncturedCube),
}

pub fn cube_colimit(diag: ObjCube) -> Result<ObjCubeColimit, SeqError> {
    let chain_base = matches!(diag.objects[&0], Obj::Ch(_));
    if chain_base {
        let cd = chaincat::PuncturedCube {
            n: diag.n,
            objects: diag
                .objects
                .iter()
                .map(|(&s, o)| (s, o.as_chain().unwrap().clone()))
                .collect(),
            maps: diag
                .maps
                .iter()
                .map(|(&k, m)| (k, m.as_chain().unwrap().clone()))
                .collect(),
        };
        let col = chaincat::colimit_over_punctured_cube(&cd)?;
        Ok(ObjCubeColimit {
            object: Obj::Ch(col.object.clone()),
            cocone: col
                .cocone
                .iter()
                .map(|(&s, m)| (s, Mor::Ch(m.clone())))
                .collect(),
            inner: CubeInner::Ch(col, cd),
        })
    } else {
        let sd = simpcat::SvPuncturedCube {
            n: diag.n,
            objects: diag
                .objects
                .iter()
                .map(|(&s, o)| (s, o.as_simplicial().unwrap().clone()))
                .collect(),
            maps: diag
                .maps
                .iter()
                .map(|(&k, m)| (k, m.as_simplicial().unwrap().clone()))
                .collect(),
        };
        let col = simpcat::sv_colimit_over_punctured_cube(&sd)?;
        Ok(ObjCubeColimit {
            object: Obj::Sv(col.object.clone()),
            cocone: col
                .cocone
                .iter()
                .map(|(&s, m)| (s, Mor::Sv(m.clone())))
                .collect(),
            inner: CubeInner::Sv(col, sd),
        })
    }
}

impl ObjCubeColimit {
    pub fn induced(&self, family: &BTreeMap<u32, Mor>) -> Result<Mor, SeqError> {
        match &self.inner {
            CubeInner::Ch(col, diag) => {
                let fam = family
                    .iter()
                    .map(|(&s, m)| (s, m.as_chain().unwrap().clone()))
                    .collect();
                Ok(Mor::Ch(col.induced(diag, &fam)?))
            }
            CubeInner::Sv(col, diag) => {
                let fam = family
                    .iter()
                    .map(|(&s, m)| (s, m.as_simplicial().unwrap().clone()))
                    .collect();
                Ok(Mor::Sv(col.induced(diag, &fam)?))
            }
        }
    }
}

/// A sequence V = {V(n)}, arities 0..=arity_bound, all over one base.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub arity_bound: usize,
    pub components: Vec<Obj>,
}

impl Sequence {
    pub fn new(components: Vec<Obj>) -> Result<Sequence, SeqError> {
        if components.is_empty() {
            return Err(SeqError::Other("a sequence needs an arity 0 component".into()));
        }
        let f = components[0].field();
        let same_base = components
            .windows(2)
            .all(|w| matches!((&w[0], &w[1]), (Obj::Ch(_), Obj::Ch(_)) | (Obj::Sv(_), Obj::Sv(_))));
        if !same_base || components.iter().any(|c| c.field() != f) {
            return Err(SeqError::BaseMismatch);
        }
        Ok(Sequence {
            arity_bound: components.len() - 1,
            components,
        })
    }

    pub fn component(&self, n: usize) -> Result<&Obj, SeqError> {
        self.components
            .get(n)
            .ok_or(SeqError::ArityOverflow(n, self.arity_bound))
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.total_dim()).collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.components[0].is_zero()
    }
}

/// The unit sequence 𝟙_∘ : the tensor unit in arity 1, zero elsewhere.
pub fn unit_sequence(template: &Obj, arity_bound: usize) -> Result<Sequence, SeqError> {
    if arity_bound < 1 {
        return Err(SeqError::ArityOverflow(1, arity_bound));
    }
    let mut comps = vec![template.zero_like(); arity_bound + 1];
    comps[1] = template.unit_like();
    Sequence::new(comps)
}

/// Truncation policy for the outer coproduct of the composition product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposePolicy {
    /// Requires v(0) = 0; all inner arities ≥ 1, so the coproduct is finite.
    ExactReduced,
    /// Allows v(0) ≠ 0 but truncates the outer coproduct at m ≤ m_max.
    Bounded(usize),
}

fn compositions(n: usize, m: usize, min_part: usize) -> Vec<Vec<usize>> {
    // ordered m-tuples with entries ≥ min_part summing to n, lexicographic
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        left: usize,
        m: usize,
        min_part: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if m == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for p in min_part..=left {
            cur.push(p);
            rec(left - p, m - 1, min_part, cur, out);
            cur.pop();
        }
    }
    rec(n, m, min_part, &mut cur, &mut out);
    out
}

/// The composition product (u∘v)(n) = ⊕_{m; p₁+…+p_m=n} u(m)⊗v(p₁)⊗…⊗v(p_m),
/// with summands ordered by m ascending then lexicographically on (p₁..p_m).
pub fn compose_product(
    u: &Sequence,
    v: &Sequence,
    policy: ComposePolicy,
) -> Result<Sequence, SeqError> {
    let min_part = match policy {
        ComposePolicy::ExactReduced => {
            if !v.is_reduced() {
                return Err(SeqError::NotReduced);
            }
            1
        }
        ComposePolicy::Bounded(_) => 0,
    };
    let n_max = u.arity_bound.min(v.arity_bound);
    let mut comps = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = u.components[0].zero_like();
        let m_top = match policy {
            // parts ≥ 1 force m ≤ n
            ComposePolicy::ExactReduced => n,
            ComposePolicy::Bounded(m_max) => m_max,
        };
        for m in 0..=m_top.min(u.arity_bound) {
            for parts in compositions(n, m, min_part) {
                let mut summand = u.components[m].clone();
                for &p in &parts {
                    summand = summand.tensor(&v.components[p])?;
                }
                acc = acc.direct_sum(&summand)?;
            }
        }
        comps.push(acc);
    }
    Sequence::new(comps)
}

/// A levelwise morphism of sequences.
#[derive(Debug, Clone)]
pub struct SequenceMap {
    pub components: Vec<Mor>,
}

impl SequenceMap {
    pub fn new(components: Vec<Mor>) -> SequenceMap {
        SequenceMap { components }
    }

    pub fn source(&self) -> Result<Sequence, SeqError> {
        Sequence::new(self.components.iter().map(|f| f.source()).collect())
    }

    pub fn target(&self) -> Result<Sequence, SeqError> {
        Sequence::new(self.components.iter().map(|f| f.target()).collect())
    }
}

/// (cofibration, fibration, weak equivalence), each levelwise.
pub fn seq_model_predicates(f: &SequenceMap) -> (bool, bool, bool) {
    (
        f.components.iter().all(|c| c.is_cofibration()),
        f.components.iter().all(|c| c.is_fibration()),
        f.components.iter().all(|c| c.is_weak_equivalence()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Matrix;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn ass_like(n_max: usize) -> Sequence {
        // one-dimensional in each arity ≥ 1, zero in arity 0
        let mut comps = vec![Obj::Ch(ChainComplex::zero(q()))];
        for _ in 1..=n_max {
            comps.push(Obj::Ch(ChainComplex::unit(q())));
        }
        Sequence::new(comps).unwrap()
    }

    #[test]
    fn unit_law_left() {
        let v = ass_like(5);
        let unit = unit_sequence(&v.components[1], 5).unwrap();
        let uv = compose_product(&unit, &v, ComposePolicy::ExactReduced).unwrap();
        assert_eq!(uv.dims(), v.dims());
    }

    #[test]
    fn unit_law_right() {
        let v = ass_like(5);
        let unit = unit_sequence(&v.components[1], 5).unwrap();
        let vu = compose_product(&v, &unit, ComposePolicy::ExactReduced).unwrap();
        assert_eq!(vu.dims(), v.dims());
    }

    #[test]
    fn ass_compose_ass_counts_compositions() {
        let a = ass_like(8);
        let aa = compose_product(&a, &a, ComposePolicy::ExactReduced).unwrap();
        for n in 1..=8usize {
            assert_eq!(aa.components[n].total_dim(), 1 << (n - 1), "arity {n}");
        }
        assert_eq!(aa.components[3].total_dim(), 4);
    }

    #[test]
    fn single_summand_case() {
        // u with u(2) = ℚ², v with v(1) = ℚ: (u∘v)(2) = ℚ²
        let z = Obj::Ch(ChainComplex::zero(q()));
        let u = Sequence::new(vec![
            z.clone(),
            z.clone(),
            Obj::Ch(ChainComplex::concentrated(q(), 0, 2)),
        ])
        .unwrap();
        let v = Sequence::new(vec![z.clone(), Obj::Ch(ChainComplex::unit(q())), z.clone()]).unwrap();
        let uv = compose_product(&u, &v, ComposePolicy::ExactReduced).unwrap();
        assert_eq!(uv.dims(), vec![0, 0, 2]);
    }

    #[test]
    fn reducedness_enforced() {
        let mut comps = ass_like(3).components;
        comps[0] = Obj::Ch(ChainComplex::unit(q()));
        let u = Sequence::new(comps).unwrap();
        let v = ass_like(3);
        assert!(matches!(
            compose_product(&v, &u, ComposePolicy::ExactReduced),
            Err(SeqError::NotReduced)
        ));
        // the bounded policy accepts it: (u∘u)(0) at m ≤ 2 has summands for
        // m = 0,1,2 with all-zero parts: 1 + 1 + 1 = 3
        let uu = compose_product(&u, &u, ComposePolicy::Bounded(2)).unwrap();
        assert_eq!(uu.components[0].total_dim(), 3);
    }

    #[test]
    fn associativity_of_dims() {
        let u = ass_like(6);
        let v = {
            // v(1) = ℚ², v(2) = ℚ, zero elsewhere
            let z = Obj::Ch(ChainComplex::zero(q()));
            let mut comps = vec![z.clone(); 7];
            comps[1] = Obj::Ch(ChainComplex::concentrated(q(), 0, 2));
            comps[2] = Obj::Ch(ChainComplex::unit(q()));
            Sequence::new(comps).unwrap()
        };
        let w = ass_like(6);
        let lhs = compose_product(
            &compose_product(&u, &v, ComposePolicy::ExactReduced).unwrap(),
            &w,
            ComposePolicy::ExactReduced,
        )
        .unwrap();
        let rhs = compose_product(
            &u,
            &compose_product(&v, &w, ComposePolicy::ExactReduced).unwrap(),
            ComposePolicy::ExactReduced,
        )
        .unwrap();
        assert_eq!(lhs.dims(), rhs.dims());
    }

    #[test]
    fn model_predicates_levelwise() {
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = ChainMap::from_components(&s, &d, [(0, Matrix::identity(1, q()))]).unwrap();
        let u = Obj::Ch(ChainComplex::unit(q()));
        let f = SequenceMap::new(vec![
            Mor::identity(&Obj::Ch(ChainComplex::zero(q()))),
            Mor::identity(&u),
            Mor::Ch(inc),
        ]);
        let (cofib, _fib, we) = seq_model_predicates(&f);
        assert!(cofib);
        assert!(!we);
        let idmap = SequenceMap::new(vec![Mor::identity(&u); 3]);
        assert_eq!(seq_model_predicates(&idmap), (true, true, true));
    }

    #[test]
    fn simplicial_base_dispatch() {
        let x = Obj::Sv(SimplicialVS::unit(q(), 2));
        let t = x.tensor(&x).unwrap();
        assert_eq!(t.homology_total_dim(), 1);
        let sym = symmetry(&x, &x).unwrap();
        assert!(sym.is_iso());
        assert!(x.tensor(&Obj::Ch(ChainComplex::unit(q()))).is_err());
    }

    #[test]
    fn reorder_swap_matches_symmetry() {
        let a = Obj::Ch(ChainComplex::sphere(q(), 1, 0));
        let b = Obj::Ch(
            ChainComplex::sphere(q(), 1, 0).direct_sum(&ChainComplex::sphere(q(), 2, 0)),
        );
        let src = TensExpr::pair(TensExpr::atom(a.clone()), TensExpr::atom(b.clone())).unwrap();
        let tgt = TensExpr::pair(TensExpr::atom(b.clone()), TensExpr::atom(a.clone())).unwrap();
        let swap = reorder(&src, &tgt, &[1, 0]).unwrap();
        assert_eq!(swap, symmetry(&a, &b).unwrap());
    }

    #[test]
    fn renest_is_isomorphism() {
        let objs: Vec<Obj> = vec![
            Obj::Ch(ChainComplex::sphere(q(), 1, 0)),
            Obj::Ch(ChainComplex::disk(q(), 2, 0)),
            Obj::Ch(ChainComplex::sphere(q(), 0, 0)),
        ];
        let u = objs[0].unit_like();
        let left = TensExpr::multi(&objs, &u).unwrap();
        let right = TensExpr::pair(
            TensExpr::atom(objs[0].clone()),
            TensExpr::pair(TensExpr::atom(objs[1].clone()), TensExpr::atom(objs[2].clone()))
                .unwrap(),
        )
        .unwrap();
        let iso = reorder(&left, &right, &[0, 1, 2]).unwrap();
        assert!(iso.is_iso());
        // round trip with the inverse renesting is the identity
        let back = reorder(&right, &left, &[0, 1, 2]).unwrap();
        let round = iso.then(&back).unwrap();
        assert_eq!(round, Mor::identity(&left.obj));
    }

    #[test]
    fn reorder_koszul_sign_on_odd_factors() {
        // swapping two degree-1 atoms must introduce a −1
        let s1 = Obj::Ch(ChainComplex::sphere(q(), 1, 0));
        let src = TensExpr::pair(TensExpr::atom(s1.clone()), TensExpr::atom(s1.clone())).unwrap();
        let swap = reorder(&src, &src, &[1, 0]).unwrap();
        let m = swap.as_chain().unwrap().component(2);
        assert_eq!(m, Matrix::from_i64_rows(q(), &[&[-1]]));
    }

    #[test]
    fn direct_sum_many_inclusions_and_projections() {
        let objs: Vec<Obj> = vec![
            Obj::Ch(ChainComplex::sphere(q(), 0, 0)),
            Obj::Ch(ChainComplex::disk(q(), 1, 0)),
            Obj::Ch(ChainComplex::sphere(q(), 1, 0)),
        ];
        let (total, incls, projs) = direct_sum_many(&objs, &objs[0]).unwrap();
        assert_eq!(total.total_dim(), 4);
        for k in 0..3 {
            let round = incls[k].then(&projs[k]).unwrap();
            assert_eq!(round, Mor::identity(&objs[k]));
        }
        // projection of a different summand is zero
        let z = incls[0].then(&projs[2]).unwrap();
        assert_eq!(z, Mor::zero(&objs[0], &objs[2]).unwrap());
    }

    #[test]
    fn cube_colimit_n1_is_identity_target() {
        // punctured 1-cube = single object; colimit is that object
        let x = Obj::Ch(ChainComplex::sphere(q(), 1, 0));
        let diag = ObjCube {
            n: 1,
            objects: BTreeMap::from([(0, x.clone())]),
            maps: BTreeMap::new(),
        };
        let col = cube_colimit(diag).unwrap();
        assert!(col.cocone[&0].is_iso());
        let fam = BTreeMap::from([(0, Mor::identity(&x))]);
        let out = col.induced(&fam).unwrap();
        assert!(out.is_iso());
    }

    #[test]
    fn cube_colimit_n2_is_pushout() {
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = Mor::Ch(
            ChainMap::from_components(&s, &d, [(0, Matrix::identity(1, q()))]).unwrap(),
        );
        let diag = ObjCube {
            n: 2,
            objects: BTreeMap::from([
                (0b00, Obj::Ch(s.clone())),
                (0b01, Obj::Ch(d.clone())),
                (0b10, Obj::Ch(d.clone())),
            ]),
            maps: BTreeMap::from([((0b00, 0), inc.clone()), ((0b00, 1), inc.clone())]),
        };
        let col = cube_colimit(diag).unwrap();
        let po = pushout(&inc, &inc).unwrap();
        assert_eq!(col.object.total_dim(), po.object.total_dim());
        assert_eq!(col.object.homology_total_dim(), po.object.homology_total_dim());
    }

    #[test]
    fn obj_pushout_dispatch_with_mediator() {
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = Mor::Ch(
            ChainMap::from_components(&s, &d, [(0, Matrix::identity(1, q()))]).unwrap(),
        );
        let po = pushout(&inc, &inc).unwrap();
        let med = po
            .mediator(
                &inc,
                &inc,
                &Mor::identity(&po.from_left.source()),
                &Mor::identity(&po.from_left.source()),
            )
            .unwrap();
        let round = po.from_left.then(&med).unwrap();
        assert!(round.is_iso());
    }
}
