//! Bounded chain complexes of finite-dimensional vector spaces: the first
//! base category, with its tensor product (Koszul signs), finite colimits,
//! homology, and the projective model-structure predicates (cofibration =
//! degreewise injection, fibration = degreewise surjection, weak equivalence
//! = quasi-isomorphism).

use crate::exactla::{quotient_basis, FieldSpec, Matrix, Quotient};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("field mismatch")]
    FieldMismatch,
    #[error("d² ≠ 0 at degree {0}")]
    DifferentialSquare(i64),
    #[error("map does not commute with differentials at degree {0}")]
    NotChainMap(i64),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("cocone does not commute")]
    NonCommutingCocone,
    #[error("diagram is not functorial")]
    NonFunctorial,
    #[error("window truncation exceeded: {0}")]
    Truncation(String),
}

/// A chain complex supported on the integer degree window `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainComplex {
    pub field: FieldSpec,
    lo: i64,
    hi: i64,
    dims: Vec<usize>,
    /// diffs[k] is d : C_{lo+k} → C_{lo+k−1}.
    diffs: Vec<Matrix>,
}

impl ChainComplex {
    pub fn new(
        field: FieldSpec,
        lo: i64,
        dims: Vec<usize>,
        diffs: Vec<Matrix>,
    ) -> Result<ChainComplex, ChainError> {
        assert_eq!(dims.len(), diffs.len());
        let c = ChainComplex {
            field,
            lo,
            hi: lo + dims.len() as i64 - 1,
            dims,
            diffs,
        };
        for d in c.lo..=c.hi {
            let m = c.diff(d);
            if m.rows != c.dim(d - 1) || m.cols != c.dim(d) {
                return Err(ChainError::Shape(format!(
                    "differential at degree {d} has shape {}x{}",
                    m.rows, m.cols
                )));
            }
            if !c.diff(d - 1).matmul(&m).is_zero() {
                return Err(ChainError::DifferentialSquare(d));
            }
        }
        Ok(c)
    }

    /// The zero complex.
    pub fn zero(field: FieldSpec) -> ChainComplex {
        ChainComplex {
            field,
            lo: 0,
            hi: -1,
            dims: vec![],
            diffs: vec![],
        }
    }

    /// The tensor unit: the field in degree 0.
    pub fn unit(field: FieldSpec) -> ChainComplex {
        ChainComplex::concentrated(field, 0, 1)
    }

    /// `dim`-dimensional space concentrated in one degree, zero differential.
    pub fn concentrated(field: FieldSpec, degree: i64, dim: usize) -> ChainComplex {
        ChainComplex {
            field,
            lo: degree,
            hi: degree,
            dims: vec![dim],
            diffs: vec![Matrix::zero(0, dim, field)],
        }
    }

    /// S^d: one dimension in degree d.  S^{−1} is taken to be the zero
    /// complex so that S^{d−1} ↪ D^d makes sense at the bottom of a window.
    pub fn sphere(field: FieldSpec, d: i64, floor: i64) -> ChainComplex {
        if d < floor {
            ChainComplex::zero(field)
        } else {
            ChainComplex::concentrated(field, d, 1)
        }
    }

    /// D^d: the contractible complex 𝟙 in degrees d and d−1 with identity
    /// differential, clipped to `floor` (D^{floor} is 𝟙 in degree floor).
    pub fn disk(field: FieldSpec, d: i64, floor: i64) -> ChainComplex {
        if d == floor {
            return ChainComplex::concentrated(field, d, 1);
        }
        ChainComplex {
            field,
            lo: d - 1,
            hi: d,
            dims: vec![1, 1],
            diffs: vec![Matrix::zero(0, 1, field), Matrix::identity(1, field)],
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn dim(&self, d: i64) -> usize {
        if d < self.lo || d > self.hi {
            0
        } else {
            self.dims[(d - self.lo) as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn diff(&self, d: i64) -> Matrix {
        if d < self.lo || d > self.hi {
            return Matrix::zero(self.dim(d - 1), self.dim(d), self.field);
        }
        self.diffs[(d - self.lo) as usize].clone()
    }

    /// Drop zero-dimensional fringe degrees (the complex stays isomorphic).
    pub fn trim(&self) -> ChainComplex {
        let mut lo = self.lo;
        let mut hi = self.hi;
        while lo <= hi && self.dim(lo) == 0 {
            lo += 1;
        }
        while hi >= lo && self.dim(hi) == 0 {
            hi -= 1;
        }
        if lo > hi {
            return ChainComplex::zero(self.field);
        }
        ChainComplex {
            field: self.field,
            lo,
            hi,
            dims: (lo..=hi).map(|d| self.dim(d)).collect(),
            diffs: (lo..=hi).map(|d| self.diff(d)).collect(),
        }
    }

    /// Error out if any nonzero content lies outside `[lo, hi]`: windows are
    /// hard truncations, never silent clipping.
    pub fn check_window(&self, lo: i64, hi: i64) -> Result<(), ChainError> {
        for d in self.degrees() {
            if self.dim(d) > 0 && (d < lo || d > hi) {
                return Err(ChainError::Truncation(format!(
                    "degree {d} content outside window [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees()
            .map(|d| {
                let s = self.dim(d) as i64;
                if d.rem_euclid(2) == 0 {
                    s
                } else {
                    -s
                }
            })
            .sum()
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        assert_eq!(self.field, other.field);
        if self.hi < self.lo {
            return other.clone();
        }
        if other.hi < other.lo {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi.max(other.hi);
        let dims: Vec<usize> = (lo..=hi).map(|d| self.dim(d) + other.dim(d)).collect();
        let diffs: Vec<Matrix> = (lo..=hi)
            .map(|d| Matrix::block_diag(&[&self.diff(d), &other.diff(d)], self.field))
            .collect();
        ChainComplex {
            field: self.field,
            lo,
            hi,
            dims,
            diffs,
        }
    }
}

/// Offsets of the (i, j) blocks of (a⊗b)_d, ascending in the a-degree i.
fn tensor_blocks(a: &ChainComplex, b: &ChainComplex, d: i64) -> Vec<(i64, i64, usize)> {
    let mut out = Vec::new();
    let mut off = 0;
    for i in a.lo()..=a.hi() {
        let j = d - i;
        let sz = a.dim(i) * b.dim(j);
        if sz > 0 {
            out.push((i, j, off));
        }
        off += sz;
    }
    out
}

pub fn tensor(a: &ChainComplex, b: &ChainComplex) -> Result<ChainComplex, ChainError> {
    if a.field != b.field {
        return Err(ChainError::FieldMismatch);
    }
    let f = a.field;
    if a.hi < a.lo || b.hi < b.lo {
        return Ok(ChainComplex::zero(f));
    }
    let (lo, hi) = (a.lo + b.lo, a.hi + b.hi);
    let dims: Vec<usize> = (lo..=hi)
        .map(|d| tensor_blocks(a, b, d).iter().map(|&(i, j, _)| a.dim(i) * b.dim(j)).sum())
        .collect();
    let mut diffs = Vec::new();
    for d in lo..=hi {
        let src = tensor_blocks(a, b, d);
        let tgt = tensor_blocks(a, b, d - 1);
        let rows: usize = dims.get((d - 1 - lo) as usize).copied().unwrap_or(0);
        let mut m = Matrix::zero(rows, dims[(d - lo) as usize], f);
        for &(i, j, soff) in &src {
            // d(x⊗y) = dx⊗y + (−1)^|x| x⊗dy
            for &(ti, tj, toff) in &tgt {
                let block = if ti == i - 1 && tj == j {
                    a.diff(i).kronecker(&Matrix::identity(b.dim(j), f))
                } else if ti == i && tj == j - 1 {
                    let sign = if i.rem_euclid(2) == 0 {
                        f.one()
                    } else {
                        f.neg(&f.one())
                    };
                    Matrix::identity(a.dim(i), f).kronecker(&b.diff(j)).scale(&sign)
                } else {
                    continue;
                };
                for r in 0..block.rows {
                    for c in 0..block.cols {
                        m.set(toff + r, soff + c, block.get(r, c).clone());
                    }
                }
            }
        }
        diffs.push(m);
    }
    ChainComplex::new(f, lo, dims, diffs)
}

/// A degreewise linear map commuting with the differentials.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    comps: BTreeMap<i64, Matrix>,
}

impl PartialEq for ChainMap {
    fn eq(&self, other: &ChainMap) -> bool {
        self.source == other.source
            && self.target == other.target
            && self
                .source
                .degrees()
                .all(|d| self.component(d) == other.component(d))
    }
}

impl ChainMap {
    pub fn new(
        source: ChainComplex,
        target: ChainComplex,
        comps: BTreeMap<i64, Matrix>,
    ) -> Result<ChainMap, ChainError> {
        let f = ChainMap {
            source,
            target,
            comps,
        };
        if f.source.field != f.target.field {
            return Err(ChainError::FieldMismatch);
        }
        let lo = f.source.lo.min(f.target.lo);
        let hi = f.source.hi.max(f.target.hi);
        for d in lo..=hi {
            let m = f.component(d);
            if m.rows != f.target.dim(d) || m.cols != f.source.dim(d) {
                return Err(ChainError::Shape(format!(
                    "component at degree {d} has shape {}x{}",
                    m.rows, m.cols
                )));
            }
            let lhs = f.target.diff(d).matmul(&f.component(d));
            let rhs = f.component(d - 1).matmul(&f.source.diff(d));
            if lhs != rhs {
                return Err(ChainError::NotChainMap(d));
            }
        }
        Ok(f)
    }

    pub fn from_components(
        source: &ChainComplex,
        target: &ChainComplex,
        comps: impl IntoIterator<Item = (i64, Matrix)>,
    ) -> Result<ChainMap, ChainError> {
        ChainMap::new(
            source.clone(),
            target.clone(),
            comps.into_iter().collect(),
        )
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        let comps = c
            .degrees()
            .map(|d| (d, Matrix::identity(c.dim(d), c.field)))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            comps,
        }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> ChainMap {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            comps: BTreeMap::new(),
        }
    }

    pub fn component(&self, d: i64) -> Matrix {
        self.comps
            .get(&d)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.target.dim(d), self.source.dim(d), self.source.field))
    }

    /// other ∘ self.
    pub fn then(&self, other: &ChainMap) -> ChainMap {
        assert_eq!(
            self.target.dims, other.source.dims,
            "composition through mismatched middle object"
        );
        let lo = self.source.lo.min(other.target.lo);
        let hi = self.source.hi.max(other.target.hi);
        let comps = (lo..=hi)
            .map(|d| (d, other.component(d).matmul(&self.component(d))))
            .collect();
        ChainMap {
            source: self.source.clone(),
            target: other.target.clone(),
            comps,
        }
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        let lo = self.source.lo.min(self.target.lo);
        let hi = self.source.hi.max(self.target.hi);
        let comps = (lo..=hi)
            .map(|d| (d, self.component(d).add(&other.component(d))))
            .collect();
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps,
        }
    }

    pub fn is_cofibration(&self) -> bool {
        self.source
            .degrees()
            .all(|d| self.component(d).rank() == self.source.dim(d))
    }

    pub fn is_fibration(&self) -> bool {
        self.target
            .degrees()
            .all(|d| self.component(d).rank() == self.target.dim(d))
    }

    pub fn is_weak_equivalence(&self) -> bool {
        let hs = homology(&self.source);
        let ht = homology(&self.target);
        let lo = self.source.lo.min(self.target.lo);
        let hi = self.source.hi.max(self.target.hi);
        for d in lo..=hi {
            let m = induced_homology_map(self, &hs, &ht, d);
            if m.rows != m.cols || m.rank() != m.rows {
                return false;
            }
        }
        true
    }

    pub fn is_iso(&self) -> bool {
        self.is_cofibration() && self.is_fibration()
    }
}

/// Chosen bases for homology: per degree, a basis of cycles and the quotient
/// by boundaries in cycle coordinates.
#[derive(Debug, Clone)]
pub struct Homology {
    pub field: FieldSpec,
    data: BTreeMap<i64, (Matrix, Quotient)>,
}

impl Homology {
    pub fn dim(&self, d: i64) -> usize {
        self.data.get(&d).map_or(0, |(_, q)| q.dim())
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.data
            .iter()
            .filter(|(_, (_, q))| q.dim() > 0)
            .map(|(&d, (_, q))| (d, q.dim()))
            .collect()
    }

    pub fn total_dim(&self) -> usize {
        self.data.values().map(|(_, q)| q.dim()).sum()
    }

    /// Representative cycles of the chosen basis, as columns in the ambient.
    pub fn representatives(&self, d: i64) -> Option<Matrix> {
        self.data
            .get(&d)
            .map(|(k, q)| k.matmul(&q.section))
    }

    /// Express a matrix of cycle columns in homology coordinates.
    pub fn classify(&self, d: i64, cycles: &Matrix) -> Matrix {
        match self.data.get(&d) {
            None => Matrix::zero(0, cycles.cols, self.field),
            Some((k, q)) => {
                // coordinates in the cycle basis, then project mod boundaries
                let sol = k
                    .solve(cycles)
                    .expect("shape checked")
                    .expect("columns must be cycles");
                q.projection.matmul(&sol.particular)
            }
        }
    }
}

pub fn homology(c: &ChainComplex) -> Homology {
    let mut data = BTreeMap::new();
    for d in c.degrees() {
        let cycles = c.diff(d).nullspace();
        if cycles.cols == 0 {
            continue;
        }
        // boundaries im d_{d+1}, expressed in cycle coordinates
        let b = c.diff(d + 1);
        let b_in_k = if b.cols == 0 {
            Matrix::zero(cycles.cols, 0, c.field)
        } else {
            cycles
                .solve(&b)
                .expect("shape checked")
                .expect("boundaries are cycles")
                .particular
        };
        data.insert(d, (cycles, quotient_basis(&b_in_k, b_in_k.rows)));
    }
    Homology {
        field: c.field,
        data,
    }
}

pub fn homology_dims(c: &ChainComplex) -> BTreeMap<i64, usize> {
    homology(c).dims()
}

/// The matrix of H_d(f) with respect to the chosen homology bases.
pub fn induced_homology_map(f: &ChainMap, hs: &Homology, ht: &Homology, d: i64) -> Matrix {
    let src_dim = hs.dim(d);
    let tgt_dim = ht.dim(d);
    if src_dim == 0 || tgt_dim == 0 {
        return Matrix::zero(tgt_dim, src_dim, f.source.field);
    }
    let reps = hs.representatives(d).unwrap();
    let imgs = f.component(d).matmul(&reps);
    ht.classify(d, &imgs)
}

pub fn induced_homology(f: &ChainMap) -> BTreeMap<i64, Matrix> {
    let hs = homology(&f.source);
    let ht = homology(&f.target);
    let lo = f.source.lo().min(f.target.lo());
    let hi = f.source.hi().max(f.target.hi());
    (lo..=hi)
        .map(|d| (d, induced_homology_map(f, &hs, &ht, d)))
        .collect()
}

/// A pushout square Y ←f− X −g→ Z together with its cocone legs and the data
/// needed to solve for mediating maps.
#[derive(Debug, Clone)]
pub struct PushoutResult {
    pub object: ChainComplex,
    pub from_left: ChainMap,
    pub from_right: ChainMap,
    sections: BTreeMap<i64, Matrix>,
}

/// Pushout of Y ←f− X −g→ Z, computed degreewise as (Y ⊕ Z)/im(x ↦ (f x, −g x)).
pub fn pushout(f: &ChainMap, g: &ChainMap) -> Result<PushoutResult, ChainError> {
    if f.source != g.source {
        return Err(ChainError::Shape("pushout legs must share their source".into()));
    }
    let fld = f.source.field;
    let y = &f.target;
    let z = &g.target;
    let lo = y.lo().min(z.lo()).min(f.source.lo());
    let hi = y.hi().max(z.hi()).max(f.source.hi());
    let mut quos = BTreeMap::new();
    for d in lo..=hi {
        let rel = f.component(d).vstack(&g.component(d).neg());
        quos.insert(d, quotient_basis(&rel, y.dim(d) + z.dim(d)));
    }
    let dims: Vec<usize> = (lo..=hi).map(|d| quos[&d].dim()).collect();
    let sum_diff = |d: i64| Matrix::block_diag(&[&y.diff(d), &z.diff(d)], fld);
    let diffs: Vec<Matrix> = (lo..=hi)
        .map(|d| {
            if d == lo {
                Matrix::zero(0, quos[&d].dim(), fld)
            } else {
                quos[&(d - 1)]
                    .projection
                    .matmul(&sum_diff(d))
                    .matmul(&quos[&d].section)
            }
        })
        .collect();
    let object = ChainComplex::new(fld, lo, dims, diffs)?.trim();
    let left_comps: BTreeMap<i64, Matrix> = (lo..=hi)
        .map(|d| {
            let iy = Matrix::identity(y.dim(d), fld).vstack(&Matrix::zero(z.dim(d), y.dim(d), fld));
            (d, quos[&d].projection.matmul(&iy))
        })
        .collect();
    let right_comps: BTreeMap<i64, Matrix> = (lo..=hi)
        .map(|d| {
            let iz = Matrix::zero(y.dim(d), z.dim(d), fld).vstack(&Matrix::identity(z.dim(d), fld));
            (d, quos[&d].projection.matmul(&iz))
        })
        .collect();
    let from_left = ChainMap::new(y.clone(), object.clone(), left_comps)?;
    let from_right = ChainMap::new(z.clone(), object.clone(), right_comps)?;
    let sections = quos.into_iter().map(|(d, q)| (d, q.section)).collect();
    Ok(PushoutResult {
        object,
        from_left,
        from_right,
        sections,
    })
}

impl PushoutResult {
    /// The unique map out of the pushout restricting to `u` on the left leg
    /// and `v` on the right leg.  Errors when the cocone does not commute
    /// with the span (in which case no mediator exists).
    pub fn mediator(
        &self,
        f: &ChainMap,
        g: &ChainMap,
        u: &ChainMap,
        v: &ChainMap,
    ) -> Result<ChainMap, ChainError> {
        if f.then(u) != g.then(v) {
            return Err(ChainError::NonCommutingCocone);
        }
        let fld = self.object.field;
        let w = &u.target;
        let lo = self.object.lo().min(w.lo());
        let hi = self.object.hi().max(w.hi());
        let mut comps = BTreeMap::new();
        for d in lo..=hi {
            let uv = u.component(d).hstack(&v.component(d));
            let sec = self
                .sections
                .get(&d)
                .cloned()
                .unwrap_or_else(|| Matrix::zero(uv.cols, self.object.dim(d), fld));
            comps.insert(d, uv.matmul(&sec));
        }
        ChainMap::new(self.object.clone(), w.clone(), comps)
    }
}

/// A diagram over the punctured n-cube: the poset of proper subsets of
/// {0,…,n−1}.  Objects are indexed by subset bitmask; for each i ∉ S a map
/// X_S → X_{S∪{i}} is given.
pub struct PuncturedCube {
    pub n: usize,
    pub objects: BTreeMap<u32, ChainComplex>,
    pub maps: BTreeMap<(u32, usize), ChainMap>,
}

pub struct CubeColimit {
    pub object: ChainComplex,
    pub cocone: BTreeMap<u32, ChainMap>,
    sections: BTreeMap<i64, Matrix>,
}

impl CubeColimit {
    /// The map out of the colimit induced by a cocone `family` (one map per
    /// proper subset) commuting with the diagram edges.
    pub fn induced(
        &self,
        diag: &PuncturedCube,
        family: &BTreeMap<u32, ChainMap>,
    ) -> Result<ChainMap, ChainError> {
        let full = (1u32 << diag.n) - 1;
        for (&(s, i), phi) in &diag.maps {
            let t = s | (1 << i);
            if t == full {
                continue;
            }
            if phi.then(&family[&t]) != family[&s] {
                return Err(ChainError::NonCommutingCocone);
            }
        }
        let target = family[&0].target.clone();
        let fld = target.field;
        let (lo, hi) = (self.object.lo(), self.object.hi());
        let comps: BTreeMap<i64, Matrix> = (lo..=hi)
            .map(|d| {
                let mut stacked = Matrix::zero(target.dim(d), 0, fld);
                for s in 0..full {
                    stacked = stacked.hstack(&family[&s].component(d));
                }
                (d, stacked.matmul(&self.sections[&d]))
            })
            .collect();
        ChainMap::new(self.object.clone(), target, comps)
    }
}

/// Colimit over the punctured cube, realized as the quotient of the direct
/// sum of all vertices by the span of (x − φ(x)) over all diagram edges.
pub fn colimit_over_punctured_cube(diag: &PuncturedCube) -> Result<CubeColimit, ChainError> {
    let full = (1u32 << diag.n) - 1;
    let verts: Vec<u32> = (0..full).collect();
    let fld = diag.objects[&0].field;
    // functoriality: the two ways around every square agree
    for &s in &verts {
        for i in 0..diag.n {
            for j in (i + 1)..diag.n {
                if s & (1 << i) != 0 || s & (1 << j) != 0 {
                    continue;
                }
                let si = s | (1 << i);
                let sj = s | (1 << j);
                if si | (1 << j) == full {
                    continue;
                }
                let a = diag.maps[&(s, i)].then(&diag.maps[&(si, j)]);
                let b = diag.maps[&(s, j)].then(&diag.maps[&(sj, i)]);
                if a != b {
                    return Err(ChainError::NonFunctorial);
                }
            }
        }
    }
    let lo = verts.iter().map(|s| diag.objects[s].lo()).min().unwrap();
    let hi = verts.iter().map(|s| diag.objects[s].hi()).max().unwrap();
    let offsets: BTreeMap<(u32, i64), usize> = {
        let mut m = BTreeMap::new();
        for d in lo..=hi {
            let mut off = 0;
            for &s in &verts {
                m.insert((s, d), off);
                off += diag.objects[&s].dim(d);
            }
        }
        m
    };
    let total = |d: i64| -> usize { verts.iter().map(|s| diag.objects[s].dim(d)).sum() };
    let mut quos = BTreeMap::new();
    for d in lo..=hi {
        let amb = total(d);
        let mut rel_cols: Vec<Matrix> = Vec::new();
        for (&(s, i), phi) in &diag.maps {
            let t = s | (1 << i as u32);
            let src = &diag.objects[&s];
            for c in 0..src.dim(d) {
                let mut col = Matrix::zero(amb, 1, fld);
                col.set(offsets[&(s, d)] + c, 0, fld.one());
                let img = phi.component(d).column(c);
                for r in 0..img.rows {
                    let cur = col.get(offsets[&(t, d)] + r, 0).clone();
                    col.set(offsets[&(t, d)] + r, 0, fld.sub(&cur, img.get(r, 0)));
                }
                rel_cols.push(col);
            }
        }
        let mut rel = Matrix::zero(amb, 0, fld);
        for c in &rel_cols {
            rel = rel.hstack(c);
        }
        quos.insert(d, quotient_basis(&rel, amb));
    }
    let sum_diff = |d: i64| -> Matrix {
        let blocks: Vec<&ChainComplex> = verts.iter().map(|s| &diag.objects[s]).collect();
        let mats: Vec<Matrix> = blocks.iter().map(|c| c.diff(d)).collect();
        Matrix::block_diag(&mats.iter().collect::<Vec<_>>(), fld)
    };
    let dims: Vec<usize> = (lo..=hi).map(|d| quos[&d].dim()).collect();
    let diffs: Vec<Matrix> = (lo..=hi)
        .map(|d| {
            if d == lo {
                Matrix::zero(0, quos[&d].dim(), fld)
            } else {
                quos[&(d - 1)]
                    .projection
                    .matmul(&sum_diff(d))
                    .matmul(&quos[&d].section)
            }
        })
        .collect();
    let object = ChainComplex::new(fld, lo, dims, diffs)?;
    let mut cocone = BTreeMap::new();
    for &s in &verts {
        let src = &diag.objects[&s];
        let comps: BTreeMap<i64, Matrix> = (lo..=hi)
            .map(|d| {
                let mut inc = Matrix::zero(total(d), src.dim(d), fld);
                for c in 0..src.dim(d) {
                    inc.set(offsets[&(s, d)] + c, c, fld.one());
                }
                (d, quos[&d].projection.matmul(&inc))
            })
            .collect();
        cocone.insert(s, ChainMap::new(src.clone(), object.clone(), comps)?);
    }
    let sections = (lo..=hi).map(|d| (d, quos[&d].section.clone())).collect();
    Ok(CubeColimit {
        object,
        cocone,
        sections,
    })
}

pub fn tensor_map(f: &ChainMap, g: &ChainMap) -> Result<ChainMap, ChainError> {
    let src = tensor(&f.source, &g.source)?;
    let tgt = tensor(&f.target, &g.target)?;
    let fld = src.field;
    let mut comps = BTreeMap::new();
    for d in src.lo()..=src.hi() {
        let sblocks = tensor_blocks(&f.source, &g.source, d);
        let tblocks = tensor_blocks(&f.target, &g.target, d);
        let mut m = Matrix::zero(tgt.dim(d), src.dim(d), fld);
        for &(i, j, soff) in &sblocks {
            for &(ti, tj, toff) in &tblocks {
                if ti != i || tj != j {
                    continue;
                }
                let block = f.component(i).kronecker(&g.component(j));
                for r in 0..block.rows {
                    for c in 0..block.cols {
                        m.set(toff + r, soff + c, block.get(r, c).clone());
                    }
                }
            }
        }
        comps.insert(d, m);
    }
    ChainMap::new(src, tgt, comps)
}

/// The symmetry isomorphism a⊗b → b⊗a with Koszul sign (−1)^{ij}.
pub fn symmetry(a: &ChainComplex, b: &ChainComplex) -> Result<ChainMap, ChainError> {
    let src = tensor(a, b)?;
    let tgt = tensor(b, a)?;
    let fld = src.field;
    let mut comps = BTreeMap::new();
    for d in src.lo()..=src.hi() {
        let sblocks = tensor_blocks(a, b, d);
        let tblocks = tensor_blocks(b, a, d);
        let mut m = Matrix::zero(tgt.dim(d), src.dim(d), fld);
        for &(i, j, soff) in &sblocks {
            let &(_, _, toff) = tblocks
                .iter()
                .find(|&&(ti, tj, _)| ti == j && tj == i)
                .expect("matching block exists");
            let sign = if (i * j).rem_euclid(2) == 0 {
                fld.one()
            } else {
                fld.neg(&fld.one())
            };
            // basis x_r ⊗ y_c ↦ ± y_c ⊗ x_r
            for r in 0..a.dim(i) {
                for c in 0..b.dim(j) {
                    let s_idx = soff + r * b.dim(j) + c;
                    let t_idx = toff + c * a.dim(i) + r;
                    m.set(t_idx, s_idx, sign.clone());
                }
            }
        }
        comps.insert(d, m);
    }
    ChainMap::new(src, tgt, comps)
}

/// The push-out product f⊙g : (V⊗X) ∪_{U⊗X} (U⊗Y) → V⊗Y.
pub fn pushout_product(f: &ChainMap, g: &ChainMap) -> Result<ChainMap, ChainError> {
    let u_y = tensor_map(f, &ChainMap::identity(&g.target))?; // U⊗Y → V⊗Y
    let v_x = tensor_map(&ChainMap::identity(&f.target), g)?; // V⊗X → V⊗Y
    let ux_uy = tensor_map(&ChainMap::identity(&f.source), g)?; // U⊗X → U⊗Y
    let ux_vx = tensor_map(f, &ChainMap::identity(&g.source))?; // U⊗X → V⊗X
    let po = pushout(&ux_uy, &ux_vx)?;
    po.mediator(&ux_uy, &ux_vx, &u_y, &v_x)
}

/// Generating cofibrations {S^{d−1} ↪ D^d} ∪ {0 → D^d} for d in the window.
pub fn generating_cofibrations(field: FieldSpec, lo: i64, hi: i64) -> Vec<ChainMap> {
    let mut out = Vec::new();
    for d in lo..=hi {
        let sphere = ChainComplex::sphere(field, d - 1, lo);
        let disk = ChainComplex::disk(field, d, lo);
        let comp = if sphere.total_dim() == 0 {
            BTreeMap::new()
        } else {
            BTreeMap::from([(d - 1, Matrix::identity(1, field))])
        };
        out.push(ChainMap::new(sphere, disk.clone(), comp).expect("generator is a chain map"));
        out.push(ChainMap::zero(&ChainComplex::zero(field), &disk));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn unit_tensor_is_identity_on_dims() {
        let x = ChainComplex::disk(q(), 2, 0);
        let t = tensor(&ChainComplex::unit(q()), &x).unwrap();
        for d in 0..4 {
            assert_eq!(t.dim(d), x.dim(d));
        }
        assert_eq!(t.diff(2), x.diff(2));
    }

    #[test]
    fn disk_tensor_disk_dims() {
        let d1 = ChainComplex::disk(q(), 1, 0);
        let t = tensor(&d1, &d1).unwrap();
        assert_eq!((t.dim(0), t.dim(1), t.dim(2)), (1, 2, 1));
        // d² = 0 was checked by the constructor; homology is trivial
        assert_eq!(homology(&t).total_dim(), 0);
    }

    #[test]
    fn sphere_tensor_disk_valid() {
        let s = ChainComplex::sphere(q(), 1, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let t = tensor(&s, &d).unwrap();
        // D^1 is contractible, so the tensor is acyclic (Künneth)
        assert_eq!(homology(&t).total_dim(), 0);
        assert_eq!((t.dim(1), t.dim(2)), (1, 1));
    }

    #[test]
    fn koszul_sign_makes_d_square_zero() {
        // tensor of two complexes with nontrivial differentials in odd degree
        let d1 = ChainComplex::disk(q(), 1, 0);
        let d2 = ChainComplex::disk(q(), 2, 0);
        let t = tensor(&d1, &d2).unwrap();
        assert_eq!(homology(&t).total_dim(), 0);
        let t2 = tensor(&d2, &d1).unwrap();
        assert_eq!(t.dim(2), t2.dim(2));
    }

    #[test]
    fn homology_of_disk_vanishes() {
        for d in 1..4 {
            let disk = ChainComplex::disk(q(), d, 0);
            assert_eq!(homology(&disk).total_dim(), 0, "D^{d}");
        }
        // at the window floor, D^0 degenerates to S^0
        assert_eq!(homology(&ChainComplex::disk(q(), 0, 0)).total_dim(), 1);
    }

    #[test]
    fn homology_of_sphere() {
        let s = ChainComplex::sphere(q(), 3, 0);
        assert_eq!(homology_dims(&s), BTreeMap::from([(3, 1)]));
    }

    #[test]
    fn pushout_along_identities() {
        let x = ChainComplex::disk(q(), 1, 0);
        let id = ChainMap::identity(&x);
        let po = pushout(&id, &id).unwrap();
        assert_eq!(po.object.total_dim(), x.total_dim());
        assert!(po.from_left.is_iso());
    }

    #[test]
    fn pushout_of_coproduct() {
        let zero = ChainComplex::zero(q());
        let y = ChainComplex::sphere(q(), 0, 0);
        let z = ChainComplex::sphere(q(), 2, 0);
        let po = pushout(&ChainMap::zero(&zero, &y), &ChainMap::zero(&zero, &z)).unwrap();
        assert_eq!(po.object.total_dim(), 2);
        assert_eq!(po.object.dim(0), 1);
        assert_eq!(po.object.dim(2), 1);
    }

    #[test]
    fn pushout_dim_rank_identity() {
        // glue two disks along their common boundary: a 1-cycle appears
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = ChainMap::from_components(
            &s,
            &d,
            [(0, Matrix::identity(1, q()))],
        )
        .unwrap();
        let po = pushout(&inc, &inc).unwrap();
        assert_eq!(
            po.object.total_dim(),
            d.total_dim() * 2 - s.total_dim()
        );
        assert_eq!(homology_dims(&po.object), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn mediator_solves_and_is_unique() {
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = ChainMap::from_components(&s, &d, [(0, Matrix::identity(1, q()))]).unwrap();
        let po = pushout(&inc, &inc).unwrap();
        // cocone: both legs the identity into the disk
        let med = po.mediator(&inc, &inc, &ChainMap::identity(&d), &ChainMap::identity(&d)).unwrap();
        assert_eq!(po.from_left.then(&med), ChainMap::identity(&d));
        // non-commuting cocone is refused
        let bad = ChainMap::zero(&d, &d);
        assert!(po.mediator(&inc, &inc, &ChainMap::identity(&d), &bad).is_err());
    }

    #[test]
    fn punctured_square_is_pushout() {
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = ChainMap::from_components(&s, &d, [(0, Matrix::identity(1, q()))]).unwrap();
        let diag = PuncturedCube {
            n: 2,
            objects: BTreeMap::from([(0b00, s.clone()), (0b01, d.clone()), (0b10, d.clone())]),
            maps: BTreeMap::from([((0b00, 0), inc.clone()), ((0b00, 1), inc.clone())]),
        };
        let col = colimit_over_punctured_cube(&diag).unwrap();
        let po = pushout(&inc, &inc).unwrap();
        for deg in 0..3 {
            assert_eq!(col.object.dim(deg), po.object.dim(deg));
        }
    }

    #[test]
    fn punctured_cube_n1_is_the_object() {
        let d = ChainComplex::disk(q(), 2, 0);
        let diag = PuncturedCube {
            n: 1,
            objects: BTreeMap::from([(0, d.clone())]),
            maps: BTreeMap::new(),
        };
        let col = colimit_over_punctured_cube(&diag).unwrap();
        assert_eq!(col.object.dims, d.dims);
        assert!(col.cocone[&0].is_iso());
    }

    #[test]
    fn pushout_product_boundary_case() {
        // f⊙(0→X) = f⊗X
        let f = generating_cofibrations(q(), 0, 2).remove(2); // S^0 ↪ D^1
        let x = ChainComplex::sphere(q(), 1, 0);
        let g = ChainMap::zero(&ChainComplex::zero(q()), &x);
        let pp = pushout_product(&f, &g).unwrap();
        let fx = tensor_map(&f, &ChainMap::identity(&x)).unwrap();
        for d in 0..4 {
            assert_eq!(pp.source.dim(d), fx.source.dim(d));
            assert_eq!(pp.component(d), fx.component(d));
        }
    }

    #[test]
    fn pushout_product_of_sphere_inclusions() {
        let gens = generating_cofibrations(q(), 0, 2);
        let f = &gens[2]; // S^0 ↪ D^1
        let pp = pushout_product(f, f).unwrap();
        assert_eq!((pp.source.dim(0), pp.source.dim(1)), (1, 2));
        assert_eq!(
            (pp.target.dim(0), pp.target.dim(1), pp.target.dim(2)),
            (1, 2, 1)
        );
        assert!(pp.is_cofibration());
    }

    #[test]
    fn generating_cofibrations_window() {
        let gens = generating_cofibrations(q(), 0, 1);
        assert_eq!(gens.len(), 4);
        assert!(gens.iter().all(ChainMap::is_cofibration));
        // the d = 0 sphere-disk generator degenerates to 0 → 𝟙[0]
        assert_eq!(gens[0].source.total_dim(), 0);
        assert_eq!(gens[0].target.total_dim(), 1);
    }

    #[test]
    fn model_predicates_on_generators() {
        let gens = generating_cofibrations(q(), 0, 3);
        let sd = &gens[4]; // S^1 ↪ D^2
        assert!(sd.is_cofibration());
        assert!(!sd.is_weak_equivalence());
        let triv = &gens[5]; // 0 → D^2
        assert!(triv.is_cofibration());
        assert!(triv.is_weak_equivalence());
        let id = ChainMap::identity(&ChainComplex::disk(q(), 2, 0));
        assert!(id.is_cofibration() && id.is_fibration() && id.is_weak_equivalence());
    }

    #[test]
    fn euler_characteristic_additive_on_pushouts() {
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = ChainMap::from_components(&s, &d, [(0, Matrix::identity(1, q()))]).unwrap();
        let po = pushout(&inc, &inc).unwrap();
        assert_eq!(
            po.object.euler_characteristic(),
            d.euler_characteristic() * 2 - s.euler_characteristic()
        );
    }

    #[test]
    fn symmetry_is_an_involution_up_to_sign_bookkeeping() {
        let a = ChainComplex::disk(q(), 1, 0);
        let b = ChainComplex::disk(q(), 2, 0);
        let s1 = symmetry(&a, &b).unwrap();
        let s2 = symmetry(&b, &a).unwrap();
        let round = s1.then(&s2);
        assert_eq!(round, ChainMap::identity(&round.source));
    }

    #[test]
    fn homology_functorial_on_composites() {
        // H(g∘f) = H(g)∘H(f) on chosen bases
        let s = ChainComplex::sphere(q(), 1, 0);
        let two = Matrix::from_i64_rows(q(), &[&[2]]);
        let f = ChainMap::from_components(&s, &s, [(1, two.clone())]).unwrap();
        let g = ChainMap::from_components(&s, &s, [(1, Matrix::from_i64_rows(q(), &[&[3]]))])
            .unwrap();
        let hf = induced_homology(&f);
        let hg = induced_homology(&g);
        let hgf = induced_homology(&f.then(&g));
        assert_eq!(hgf[&1], hg[&1].matmul(&hf[&1]));
        assert_eq!(hgf[&1], Matrix::from_i64_rows(q(), &[&[6]]));
    }

    #[test]
    fn window_check_errors() {
        let c = ChainComplex::disk(q(), 3, 0);
        assert!(c.check_window(0, 2).is_err());
        assert!(c.check_window(0, 3).is_ok());
    }
}
