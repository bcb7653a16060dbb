//! Truncated simplicial vector spaces: the second base category, with the
//! Dold–Kan functors N (normalization) and Γ, the Eilenberg–Zilber shuffle
//! map, and the Alexander–Whitney map.
//!
//! Convention: N(X)_n = ∩_{i=1..n} ker d_i with differential induced by d_0.
//! The shuffle and Alexander–Whitney maps are computed on the ambient
//! complexes and transported through the canonical splitting
//! X_n = N(X)_n ⊕ (degenerate part), which is valid over a field.

use crate::chaincat::{tensor as ch_tensor, ChainComplex, ChainError, ChainMap};
use crate::exactla::{quotient_basis, FieldSpec, Matrix};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimpError {
    #[error("field mismatch")]
    FieldMismatch,
    #[error("simplicial identity violated at level {level}: {which}")]
    Identity { level: usize, which: String },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("map does not commute with {0} at level {1}")]
    NotSimplicial(String, usize),
    #[error("truncation exceeded: {0}")]
    Truncation(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("cocone does not commute")]
    NonCommutingCocone,
}

/// A simplicial vector space truncated at level `s_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialVS {
    pub field: FieldSpec,
    pub s_max: usize,
    levels: Vec<usize>,
    /// faces[n][i] = d_i : X_n → X_{n−1}; faces[0] is empty.
    faces: Vec<Vec<Matrix>>,
    /// degens[n][i] = s_i : X_n → X_{n+1}; defined for n < s_max.
    degens: Vec<Vec<Matrix>>,
}

impl SimplicialVS {
    pub fn new(
        field: FieldSpec,
        s_max: usize,
        levels: Vec<usize>,
        faces: Vec<Vec<Matrix>>,
        degens: Vec<Vec<Matrix>>,
    ) -> Result<SimplicialVS, SimpError> {
        let x = SimplicialVS {
            field,
            s_max,
            levels,
            faces,
            degens,
        };
        x.validate()?;
        Ok(x)
    }

    fn validate(&self) -> Result<(), SimpError> {
        if self.levels.len() != self.s_max + 1 {
            return Err(SimpError::Shape("levels length must be s_max+1".into()));
        }
        for n in 0..=self.s_max {
            let nf = if n == 0 { 0 } else { n + 1 };
            if self.faces[n].len() != nf {
                return Err(SimpError::Shape(format!("level {n} needs {nf} faces")));
            }
            let nd = if n < self.s_max { n + 1 } else { 0 };
            if self.degens[n].len() != nd {
                return Err(SimpError::Shape(format!("level {n} needs {nd} degeneracies")));
            }
            for (i, m) in self.faces[n].iter().enumerate() {
                if m.rows != self.dim(n.wrapping_sub(1)) || m.cols != self.dim(n) {
                    return Err(SimpError::Shape(format!("face d_{i} at level {n}")));
                }
            }
            for (i, m) in self.degens[n].iter().enumerate() {
                if m.rows != self.dim(n + 1) || m.cols != self.dim(n) {
                    return Err(SimpError::Shape(format!("degeneracy s_{i} at level {n}")));
                }
            }
        }
        // simplicial identities, wherever both sides are defined
        for n in 2..=self.s_max {
            for j in 0..=n {
                for i in 0..j {
                    // d_i d_j = d_{j-1} d_i
                    let lhs = self.face(n - 1, i).matmul(&self.face(n, j));
                    let rhs = self.face(n - 1, j - 1).matmul(&self.face(n, i));
                    if lhs != rhs {
                        return Err(SimpError::Identity {
                            level: n,
                            which: format!("d_{i} d_{j}"),
                        });
                    }
                }
            }
        }
        for n in 0..self.s_max.saturating_sub(1) {
            for i in 0..=n {
                for j in i..=n {
                    // s_i s_j = s_{j+1} s_i
                    let lhs = self.degen(n + 1, i).matmul(&self.degen(n, j));
                    let rhs = self.degen(n + 1, j + 1).matmul(&self.degen(n, i));
                    if lhs != rhs {
                        return Err(SimpError::Identity {
                            level: n,
                            which: format!("s_{i} s_{j}"),
                        });
                    }
                }
            }
        }
        for n in 0..self.s_max {
            for j in 0..=n {
                for i in 0..=(n + 1) {
                    // d_i s_j
                    let lhs = self.face(n + 1, i).matmul(&self.degen(n, j));
                    let rhs = if i == j || i == j + 1 {
                        Matrix::identity(self.dim(n), self.field)
                    } else if i < j {
                        self.degen(n - 1, j - 1).matmul(&self.face(n, i))
                    } else {
                        self.degen(n - 1, j).matmul(&self.face(n, i - 1))
                    };
                    if lhs != rhs {
                        return Err(SimpError::Identity {
                            level: n,
                            which: format!("d_{i} s_{j}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self, n: usize) -> usize {
        self.levels.get(n).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.levels.iter().sum()
    }

    pub fn face(&self, n: usize, i: usize) -> Matrix {
        self.faces[n][i].clone()
    }

    pub fn degen(&self, n: usize, i: usize) -> Matrix {
        self.degens[n][i].clone()
    }

    pub fn zero(field: FieldSpec, s_max: usize) -> SimplicialVS {
        let levels = vec![0; s_max + 1];
        let faces = (0..=s_max)
            .map(|n| vec![Matrix::zero(0, 0, field); if n == 0 { 0 } else { n + 1 }])
            .collect();
        let degens = (0..=s_max)
            .map(|n| vec![Matrix::zero(0, 0, field); if n < s_max { n + 1 } else { 0 }])
            .collect();
        SimplicialVS {
            field,
            s_max,
            levels: levels.clone(),
            faces,
            degens,
        }
    }

    /// The constant simplicial object on a `dim`-dimensional space: the
    /// tensor unit when dim = 1.
    pub fn constant(field: FieldSpec, s_max: usize, dim: usize) -> SimplicialVS {
        let id = Matrix::identity(dim, field);
        let faces = (0..=s_max)
            .map(|n| vec![id.clone(); if n == 0 { 0 } else { n + 1 }])
            .collect();
        let degens = (0..=s_max)
            .map(|n| vec![id.clone(); if n < s_max { n + 1 } else { 0 }])
            .collect();
        SimplicialVS {
            field,
            s_max,
            levels: vec![dim; s_max + 1],
            faces,
            degens,
        }
    }

    pub fn unit(field: FieldSpec, s_max: usize) -> SimplicialVS {
        SimplicialVS::constant(field, s_max, 1)
    }

    pub fn direct_sum(&self, other: &SimplicialVS) -> SimplicialVS {
        assert_eq!(self.field, other.field);
        assert_eq!(self.s_max, other.s_max);
        let levels = (0..=self.s_max)
            .map(|n| self.dim(n) + other.dim(n))
            .collect();
        let faces = (0..=self.s_max)
            .map(|n| {
                (0..self.faces[n].len())
                    .map(|i| {
                        Matrix::block_diag(&[&self.faces[n][i], &other.faces[n][i]], self.field)
                    })
                    .collect()
            })
            .collect();
        let degens = (0..=self.s_max)
            .map(|n| {
                (0..self.degens[n].len())
                    .map(|i| {
                        Matrix::block_diag(&[&self.degens[n][i], &other.degens[n][i]], self.field)
                    })
                    .collect()
            })
            .collect();
        SimplicialVS {
            field: self.field,
            s_max: self.s_max,
            levels,
            faces,
            degens,
        }
    }

    /// The matrix of X(θ) : X_n → X_m for a monotone θ : [m] → [n], given by
    /// its value list of length m+1.
    pub fn operator(&self, theta: &[usize], n: usize) -> Matrix {
        let m = theta.len() - 1;
        // identity
        if m == n && theta.iter().enumerate().all(|(i, &v)| v == i) {
            return Matrix::identity(self.dim(n), self.field);
        }
        // epi peel: θ = θ' ∘ σ_j gives X(θ) = s_j · X(θ')
        if let Some(j) = (0..m).find(|&j| theta[j] == theta[j + 1]) {
            let mut shorter = theta.to_vec();
            shorter.remove(j + 1);
            return self.degen(m - 1, j).matmul(&self.operator(&shorter, n));
        }
        // mono peel: θ = δ_j ∘ θ'' gives X(θ) = X(θ'') · d_j
        let j = (0..=n)
            .find(|v| !theta.contains(v))
            .expect("non-identity injective map misses a value");
        let shifted: Vec<usize> = theta
            .iter()
            .map(|&v| if v < j { v } else { v - 1 })
            .collect();
        self.operator(&shifted, n - 1).matmul(&self.face(n, j))
    }

    /// Basis (as ambient columns) of the degenerate subspace at level n.
    pub fn degenerate_basis(&self, n: usize) -> Matrix {
        let mut span = Matrix::zero(self.dim(n), 0, self.field);
        if n == 0 {
            return span;
        }
        for i in 0..n {
            span = span.hstack(&self.degen(n - 1, i));
        }
        span.column_space_basis()
    }
}

/// Levelwise tensor product: (X⊗Y)_n = X_n ⊗ Y_n with diagonal structure maps.
pub fn sv_tensor(a: &SimplicialVS, b: &SimplicialVS) -> Result<SimplicialVS, SimpError> {
    if a.field != b.field {
        return Err(SimpError::FieldMismatch);
    }
    if a.s_max != b.s_max {
        return Err(SimpError::Truncation("tensor needs equal s_max".into()));
    }
    let levels = (0..=a.s_max).map(|n| a.dim(n) * b.dim(n)).collect();
    let faces = (0..=a.s_max)
        .map(|n| {
            (0..a.faces[n].len())
                .map(|i| a.faces[n][i].kronecker(&b.faces[n][i]))
                .collect()
        })
        .collect();
    let degens = (0..=a.s_max)
        .map(|n| {
            (0..a.degens[n].len())
                .map(|i| a.degens[n][i].kronecker(&b.degens[n][i]))
                .collect()
        })
        .collect();
    Ok(SimplicialVS {
        field: a.field,
        s_max: a.s_max,
        levels,
        faces,
        degens,
    })
}

/// A levelwise linear map commuting with faces and degeneracies.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialMap {
    pub source: SimplicialVS,
    pub target: SimplicialVS,
    comps: Vec<Matrix>,
}

impl SimplicialMap {
    pub fn new(
        source: SimplicialVS,
        target: SimplicialVS,
        comps: Vec<Matrix>,
    ) -> Result<SimplicialMap, SimpError> {
        let f = SimplicialMap {
            source,
            target,
            comps,
        };
        if f.source.s_max != f.target.s_max {
            return Err(SimpError::Truncation("map needs equal s_max".into()));
        }
        for n in 0..=f.source.s_max {
            let m = f.component(n);
            if m.rows != f.target.dim(n) || m.cols != f.source.dim(n) {
                return Err(SimpError::Shape(format!("component at level {n}")));
            }
        }
        for n in 1..=f.source.s_max {
            for i in 0..=n {
                let lhs = f.target.face(n, i).matmul(&f.component(n));
                let rhs = f.component(n - 1).matmul(&f.source.face(n, i));
                if lhs != rhs {
                    return Err(SimpError::NotSimplicial(format!("d_{i}"), n));
                }
            }
        }
        for n in 0..f.source.s_max {
            for i in 0..=n {
                let lhs = f.target.degen(n, i).matmul(&f.component(n));
                let rhs = f.component(n + 1).matmul(&f.source.degen(n, i));
                if lhs != rhs {
                    return Err(SimpError::NotSimplicial(format!("s_{i}"), n));
                }
            }
        }
        Ok(f)
    }

    pub fn component(&self, n: usize) -> Matrix {
        self.comps
            .get(n)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.target.dim(n), self.source.dim(n), self.source.field))
    }

    pub fn identity(x: &SimplicialVS) -> SimplicialMap {
        SimplicialMap {
            source: x.clone(),
            target: x.clone(),
            comps: (0..=x.s_max)
                .map(|n| Matrix::identity(x.dim(n), x.field))
                .collect(),
        }
    }

    pub fn zero(source: &SimplicialVS, target: &SimplicialVS) -> SimplicialMap {
        SimplicialMap {
            source: source.clone(),
            target: target.clone(),
            comps: (0..=source.s_max)
                .map(|n| Matrix::zero(target.dim(n), source.dim(n), source.field))
                .collect(),
        }
    }

    /// other ∘ self.
    pub fn then(&self, other: &SimplicialMap) -> SimplicialMap {
        SimplicialMap {
            source: self.source.clone(),
            target: other.target.clone(),
            comps: (0..=self.source.s_max)
                .map(|n| other.component(n).matmul(&self.component(n)))
                .collect(),
        }
    }

    pub fn add(&self, other: &SimplicialMap) -> SimplicialMap {
        SimplicialMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps: (0..=self.source.s_max)
                .map(|n| self.component(n).add(&other.component(n)))
                .collect(),
        }
    }

    pub fn is_cofibration(&self) -> bool {
        (0..=self.source.s_max).all(|n| self.component(n).rank() == self.source.dim(n))
    }

    pub fn is_fibration(&self) -> bool {
        (0..=self.source.s_max).all(|n| self.component(n).rank() == self.target.dim(n))
    }

    pub fn is_weak_equivalence(&self) -> bool {
        normalize_map(self).is_weak_equivalence()
    }

    pub fn is_iso(&self) -> bool {
        self.is_cofibration() && self.is_fibration()
    }
}

pub fn sv_tensor_map(f: &SimplicialMap, g: &SimplicialMap) -> Result<SimplicialMap, SimpError> {
    let src = sv_tensor(&f.source, &g.source)?;
    let tgt = sv_tensor(&f.target, &g.target)?;
    let comps = (0..=src.s_max)
        .map(|n| f.component(n).kronecker(&g.component(n)))
        .collect();
    SimplicialMap::new(src, tgt, comps)
}

/// The symmetry isomorphism X⊗Y → Y⊗X (plain factor swap levelwise).
pub fn sv_symmetry(a: &SimplicialVS, b: &SimplicialVS) -> Result<SimplicialMap, SimpError> {
    let src = sv_tensor(a, b)?;
    let tgt = sv_tensor(b, a)?;
    let f = a.field;
    let comps = (0..=a.s_max)
        .map(|n| {
            let (da, db) = (a.dim(n), b.dim(n));
            Matrix::from_fn(db * da, da * db, f, |r, c| {
                let (rb, ra) = (r / da, r % da);
                let (ca, cb) = (c / db, c % db);
                if ra == ca && rb == cb {
                    f.one()
                } else {
                    f.zero()
                }
            })
        })
        .collect();
    SimplicialMap::new(src, tgt, comps)
}

pub struct SvPushoutResult {
    pub object: SimplicialVS,
    pub from_left: SimplicialMap,
    pub from_right: SimplicialMap,
    sections: Vec<Matrix>,
}

/// Pushout of Y ←f− X −g→ Z, levelwise (Y_n ⊕ Z_n)/im(x ↦ (f x, −g x)).
pub fn sv_pushout(f: &SimplicialMap, g: &SimplicialMap) -> Result<SvPushoutResult, SimpError> {
    if f.source != g.source {
        return Err(SimpError::Shape("pushout legs must share their source".into()));
    }
    let fld = f.source.field;
    let s_max = f.source.s_max;
    let y = &f.target;
    let z = &g.target;
    let quos: Vec<_> = (0..=s_max)
        .map(|n| {
            let rel = f.component(n).vstack(&g.component(n).neg());
            quotient_basis(&rel, y.dim(n) + z.dim(n))
        })
        .collect();
    let levels: Vec<usize> = quos.iter().map(|q| q.dim()).collect();
    let induced = |n_src: usize, n_tgt: usize, my: &Matrix, mz: &Matrix| -> Matrix {
        let block = Matrix::block_diag(&[my, mz], fld);
        quos[n_tgt].projection.matmul(&block).matmul(&quos[n_src].section)
    };
    let faces: Vec<Vec<Matrix>> = (0..=s_max)
        .map(|n| {
            if n == 0 {
                vec![]
            } else {
                (0..=n)
                    .map(|i| induced(n, n - 1, &y.face(n, i), &z.face(n, i)))
                    .collect()
            }
        })
        .collect();
    let degens: Vec<Vec<Matrix>> = (0..=s_max)
        .map(|n| {
            if n < s_max {
                (0..=n)
                    .map(|i| induced(n, n + 1, &y.degen(n, i), &z.degen(n, i)))
                    .collect()
            } else {
                vec![]
            }
        })
        .collect();
    let object = SimplicialVS::new(fld, s_max, levels, faces, degens)?;
    let left = (0..=s_max)
        .map(|n| {
            let inc = Matrix::identity(y.dim(n), fld).vstack(&Matrix::zero(z.dim(n), y.dim(n), fld));
            quos[n].projection.matmul(&inc)
        })
        .collect();
    let right = (0..=s_max)
        .map(|n| {
            let inc = Matrix::zero(y.dim(n), z.dim(n), fld).vstack(&Matrix::identity(z.dim(n), fld));
            quos[n].projection.matmul(&inc)
        })
        .collect();
    let from_left = SimplicialMap::new(y.clone(), object.clone(), left)?;
    let from_right = SimplicialMap::new(z.clone(), object.clone(), right)?;
    Ok(SvPushoutResult {
        object,
        from_left,
        from_right,
        sections: quos.into_iter().map(|q| q.section).collect(),
    })
}

impl SvPushoutResult {
    pub fn mediator(
        &self,
        f: &SimplicialMap,
        g: &SimplicialMap,
        u: &SimplicialMap,
        v: &SimplicialMap,
    ) -> Result<SimplicialMap, SimpError> {
        if f.then(u) != g.then(v) {
            return Err(SimpError::NonCommutingCocone);
        }
        let comps = (0..=self.object.s_max)
            .map(|n| {
                u.component(n)
                    .hstack(&v.component(n))
                    .matmul(&self.sections[n])
            })
            .collect();
        SimplicialMap::new(self.object.clone(), u.target.clone(), comps)
    }
}

pub struct SvPuncturedCube {
    pub n: usize,
    pub objects: BTreeMap<u32, SimplicialVS>,
    pub maps: BTreeMap<(u32, usize), SimplicialMap>,
}

pub struct SvCubeColimit {
    pub object: SimplicialVS,
    pub cocone: BTreeMap<u32, SimplicialMap>,
    sections: Vec<Matrix>,
}

/// Colimit over the punctured cube (all proper subsets), realized levelwise
/// as the quotient of the direct sum of all vertices by the edge relations.
pub fn sv_colimit_over_punctured_cube(diag: &SvPuncturedCube) -> Result<SvCubeColimit, SimpError> {
    let full = (1u32 << diag.n) - 1;
    let verts: Vec<u32> = (0..full).collect();
    let fld = diag.objects[&0].field;
    let s_max = diag.objects[&0].s_max;
    for &s in &verts {
        for i in 0..diag.n {
            for j in (i + 1)..diag.n {
                if s & (1 << i) != 0 || s & (1 << j) != 0 || s | (1 << i) | (1 << j) == full {
                    continue;
                }
                let a = diag.maps[&(s, i)].then(&diag.maps[&(s | (1 << i), j)]);
                let b = diag.maps[&(s, j)].then(&diag.maps[&(s | (1 << j), i)]);
                if a != b {
                    return Err(SimpError::Shape("diagram is not functorial".into()));
                }
            }
        }
    }
    let total = |n: usize| -> usize { verts.iter().map(|s| diag.objects[s].dim(n)).sum() };
    let offset = |s: u32, n: usize| -> usize {
        verts
            .iter()
            .take_while(|&&v| v < s)
            .map(|v| diag.objects[v].dim(n))
            .sum()
    };
    let quos: Vec<_> = (0..=s_max)
        .map(|n| {
            let amb = total(n);
            let mut rel = Matrix::zero(amb, 0, fld);
            for (&(s, i), phi) in &diag.maps {
                let t = s | (1 << i);
                let src_dim = diag.objects[&s].dim(n);
                for c in 0..src_dim {
                    let mut col = Matrix::zero(amb, 1, fld);
                    col.set(offset(s, n) + c, 0, fld.one());
                    let img = phi.component(n).column(c);
                    for r in 0..img.rows {
                        let cur = col.get(offset(t, n) + r, 0).clone();
                        col.set(offset(t, n) + r, 0, fld.sub(&cur, img.get(r, 0)));
                    }
                    rel = rel.hstack(&col);
                }
            }
            quotient_basis(&rel, amb)
        })
        .collect();
    let sum_map = |pick: &dyn Fn(&SimplicialVS) -> Matrix| -> Matrix {
        let mats: Vec<Matrix> = verts.iter().map(|s| pick(&diag.objects[s])).collect();
        Matrix::block_diag(&mats.iter().collect::<Vec<_>>(), fld)
    };
    let levels: Vec<usize> = quos.iter().map(|q| q.dim()).collect();
    let faces: Vec<Vec<Matrix>> = (0..=s_max)
        .map(|n| {
            if n == 0 {
                vec![]
            } else {
                (0..=n)
                    .map(|i| {
                        quos[n - 1]
                            .projection
                            .matmul(&sum_map(&|x| x.face(n, i)))
                            .matmul(&quos[n].section)
                    })
                    .collect()
            }
        })
        .collect();
    let degens: Vec<Vec<Matrix>> = (0..=s_max)
        .map(|n| {
            if n >= s_max {
                vec![]
            } else {
                (0..=n)
                    .map(|i| {
                        quos[n + 1]
                            .projection
                            .matmul(&sum_map(&|x| x.degen(n, i)))
                            .matmul(&quos[n].section)
                    })
                    .collect()
            }
        })
        .collect();
    let object = SimplicialVS::new(fld, s_max, levels, faces, degens)?;
    let mut cocone = BTreeMap::new();
    for &s in &verts {
        let src = diag.objects[&s].clone();
        let comps: Vec<Matrix> = (0..=s_max)
            .map(|n| {
                let mut inc = Matrix::zero(total(n), src.dim(n), fld);
                for c in 0..src.dim(n) {
                    inc.set(offset(s, n) + c, c, fld.one());
                }
                quos[n].projection.matmul(&inc)
            })
            .collect();
        cocone.insert(s, SimplicialMap::new(src, object.clone(), comps)?);
    }
    Ok(SvCubeColimit {
        object,
        cocone,
        sections: quos.into_iter().map(|q| q.section).collect(),
    })
}

impl SvCubeColimit {
    pub fn induced(
        &self,
        diag: &SvPuncturedCube,
        family: &BTreeMap<u32, SimplicialMap>,
    ) -> Result<SimplicialMap, SimpError> {
        let full = (1u32 << diag.n) - 1;
        for (&(s, i), phi) in &diag.maps {
            let t = s | (1 << i);
            if t == full {
                continue;
            }
            if phi.then(&family[&t]) != family[&s] {
                return Err(SimpError::NonCommutingCocone);
            }
        }
        let target = family[&0].target.clone();
        let comps: Vec<Matrix> = (0..=self.object.s_max)
            .map(|n| {
                let mut stacked = Matrix::zero(target.dim(n), 0, target.field);
                for s in 0..full {
                    stacked = stacked.hstack(&family[&s].component(n));
                }
                stacked.matmul(&self.sections[n])
            })
            .collect();
        SimplicialMap::new(self.object.clone(), target, comps)
    }
}

/// Basis columns of N(X)_n = ∩_{i=1..n} ker d_i inside X_n.
pub fn normalized_basis(x: &SimplicialVS, n: usize) -> Matrix {
    if n == 0 {
        return Matrix::identity(x.dim(0), x.field);
    }
    let mut stacked = x.face(n, 1);
    for i in 2..=n {
        stacked = stacked.vstack(&x.face(n, i));
    }
    stacked.nullspace()
}

/// The functor N: N(X)_n = ∩_{i=1..n} ker d_i, differential induced by d_0.
pub fn normalize(x: &SimplicialVS) -> ChainComplex {
    let bases: Vec<Matrix> = (0..=x.s_max).map(|n| normalized_basis(x, n)).collect();
    let dims: Vec<usize> = bases.iter().map(|b| b.cols).collect();
    let diffs: Vec<Matrix> = (0..=x.s_max)
        .map(|n| {
            if n == 0 {
                Matrix::zero(0, dims[0], x.field)
            } else {
                let img = x.face(n, 0).matmul(&bases[n]);
                bases[n - 1]
                    .solve(&img)
                    .expect("shape checked")
                    .expect("d_0 preserves the normalized subcomplex")
                    .particular
            }
        })
        .collect();
    ChainComplex::new(x.field, 0, dims, diffs).expect("d_0² vanishes on N")
}

pub fn normalize_map(f: &SimplicialMap) -> ChainMap {
    let ns = normalize(&f.source);
    let nt = normalize(&f.target);
    let comps: BTreeMap<i64, Matrix> = (0..=f.source.s_max)
        .map(|n| {
            let ks = normalized_basis(&f.source, n);
            let kt = normalized_basis(&f.target, n);
            let img = f.component(n).matmul(&ks);
            let m = if kt.cols == 0 {
                Matrix::zero(0, ks.cols, f.source.field)
            } else {
                kt.solve(&img)
                    .expect("shape checked")
                    .expect("maps preserve the normalized subcomplex")
                    .particular
            };
            (n as i64, m)
        })
        .collect();
    ChainMap::new(ns, nt, comps).expect("N is functorial")
}

/// Projection X_n → N(X)_n along the degenerate subspace (in N-coordinates).
pub fn normalized_projection(x: &SimplicialVS, n: usize) -> Matrix {
    let k = normalized_basis(x, n);
    let d = x.degenerate_basis(n);
    let full = k.hstack(&d);
    // over a field, X_n = N ⊕ degenerate, so `full` is square invertible
    let sol = full
        .solve(&Matrix::identity(x.dim(n), x.field))
        .expect("shape checked")
        .expect("Dold–Kan splitting");
    sol.particular.select_rows(&(0..k.cols).collect::<Vec<_>>())
}

/// Monotone surjections [n] ↠ [k] for all k, as value lists, in a fixed
/// deterministic order (by k ascending, then lexicographic).
pub fn surjections(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, remaining: usize, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let last = *prefix.last().unwrap();
        for step in 0..=1usize {
            prefix.push(last + step);
            extend(prefix, remaining - 1, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    extend(&mut vec![0], n, &mut all);
    all.sort_by_key(|s| (*s.last().unwrap(), s.clone()));
    all
}

/// Epi-mono factorization of a monotone map: returns (epi values, mono image).
fn epi_mono(c: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut image: Vec<usize> = c.to_vec();
    image.dedup();
    let epi = c
        .iter()
        .map(|v| image.iter().position(|w| w == v).unwrap())
        .collect();
    (epi, image)
}

/// The functor Γ: Γ(c)_n = ⊕_{σ:[n]↠[k]} c_k.
pub fn gamma(c: &ChainComplex, s_max: usize) -> Result<SimplicialVS, SimpError> {
    if c.lo() < 0 || c.hi() > s_max as i64 {
        return Err(SimpError::Truncation(format!(
            "Γ needs the window inside [0, {s_max}]"
        )));
    }
    let f = c.field;
    let summands: Vec<Vec<Vec<usize>>> = (0..=s_max).map(surjections).collect();
    let dim_of = |sigma: &Vec<usize>| c.dim(*sigma.last().unwrap() as i64);
    let levels: Vec<usize> = summands
        .iter()
        .map(|sigmas| sigmas.iter().map(&dim_of).sum())
        .collect();
    let offsets: Vec<BTreeMap<Vec<usize>, usize>> = summands
        .iter()
        .map(|sigmas| {
            let mut m = BTreeMap::new();
            let mut off = 0;
            for s in sigmas {
                m.insert(s.clone(), off);
                off += dim_of(s);
            }
            m
        })
        .collect();
    // the structure map for precomposition with θ : [m] → [n]
    let structure = |theta: &[usize], n: usize, m: usize| -> Matrix {
        let mut mat = Matrix::zero(levels[m], levels[n], f);
        for sigma in &summands[n] {
            let k = *sigma.last().unwrap();
            let composite: Vec<usize> = theta.iter().map(|&i| sigma[i]).collect();
            let (tau, image) = epi_mono(&composite);
            let j = *image.last().unwrap();
            let block = if image.len() == k + 1 {
                Matrix::identity(c.dim(k as i64), f)
            } else if image.len() == k && image[0] == 1 && j == k {
                // the mono part misses exactly 0: the chain differential
                c.diff(k as i64)
            } else {
                continue;
            };
            let soff = offsets[n][sigma];
            let toff = offsets[m][&tau];
            for r in 0..block.rows {
                for col in 0..block.cols {
                    mat.set(toff + r, soff + col, block.get(r, col).clone());
                }
            }
        }
        mat
    };
    let faces: Vec<Vec<Matrix>> = (0..=s_max)
        .map(|n| {
            if n == 0 {
                vec![]
            } else {
                (0..=n)
                    .map(|i| {
                        let delta: Vec<usize> =
                            (0..=n).filter(|&v| v != i).collect();
                        structure(&delta, n, n - 1)
                    })
                    .collect()
            }
        })
        .collect();
    let degens: Vec<Vec<Matrix>> = (0..=s_max)
        .map(|n| {
            if n >= s_max {
                vec![]
            } else {
                (0..=n)
                    .map(|i| {
                        let mut sig: Vec<usize> = (0..=n).collect();
                        sig.insert(i, i);
                        structure(&sig, n, n + 1)
                    })
                    .collect()
            }
        })
        .collect();
    SimplicialVS::new(f, s_max, levels, faces, degens)
}

/// Γ on maps: blockwise application per surjection summand.
pub fn gamma_map(f: &ChainMap, s_max: usize) -> Result<SimplicialMap, SimpError> {
    let src = gamma(&f.source, s_max)?;
    let tgt = gamma(&f.target, s_max)?;
    let fld = f.source.field;
    let comps = (0..=s_max)
        .map(|n| {
            let sigmas = surjections(n);
            let blocks: Vec<Matrix> = sigmas
                .iter()
                .map(|s| f.component(*s.last().unwrap() as i64))
                .collect();
            Matrix::block_diag(&blocks.iter().collect::<Vec<_>>(), fld)
        })
        .collect();
    SimplicialMap::new(src, tgt, comps)
}

/// Dold–Kan unit c → N(Γ(c)) (an isomorphism).
pub fn dk_unit(c: &ChainComplex, s_max: usize) -> Result<ChainMap, SimpError> {
    let g = gamma(c, s_max)?;
    let ng = normalize(&g);
    let fld = c.field;
    let mut comps = BTreeMap::new();
    for k in 0..=s_max {
        let sigmas = surjections(k);
        let id_off: usize = {
            let mut off = 0;
            for s in &sigmas {
                if s.len() == k + 1 && s.iter().enumerate().all(|(i, &v)| v == i) {
                    break;
                }
                off += c.dim(*s.last().unwrap() as i64);
            }
            off
        };
        let dk = c.dim(k as i64);
        let mut inc = Matrix::zero(g.dim(k), dk, fld);
        for r in 0..dk {
            inc.set(id_off + r, r, fld.one());
        }
        let kb = normalized_basis(&g, k);
        let m = if kb.cols == 0 {
            Matrix::zero(0, dk, fld)
        } else {
            kb.solve(&inc)
                .expect("shape checked")
                .expect("identity summand is normalized")
                .particular
        };
        comps.insert(k as i64, m);
    }
    Ok(ChainMap::new(c.clone(), ng, comps)?)
}

/// Dold–Kan counit Γ(N(X)) → X (an isomorphism): on the summand indexed by
/// σ : [n] ↠ [k] it is the degeneracy operator X(σ) restricted to N(X)_k.
pub fn dk_counit(x: &SimplicialVS) -> Result<SimplicialMap, SimpError> {
    let n_x = normalize(x);
    let g = gamma(&n_x, x.s_max)?;
    let fld = x.field;
    let comps = (0..=x.s_max)
        .map(|n| {
            let sigmas = surjections(n);
            let mut m = Matrix::zero(x.dim(n), g.dim(n), fld);
            let mut off = 0;
            for sigma in &sigmas {
                let k = *sigma.last().unwrap();
                let kb = normalized_basis(x, k);
                let block = x.operator(sigma, k).matmul(&kb);
                for r in 0..block.rows {
                    for c in 0..block.cols {
                        m.set(r, off + c, block.get(r, c).clone());
                    }
                }
                off += kb.cols;
            }
            m
        })
        .collect();
    SimplicialMap::new(g, x.clone(), comps)
}

/// Colax comultiplication of Γ: the mate Γ(c⊗c′) → Γ(c)⊗Γ(c′), computed as
/// ε ∘ Γ(∇ ∘ (η⊗η)) with ∇ the shuffle map and η, ε the Dold–Kan unit and
/// counit.  A weak equivalence (an isomorphism only in trivial cases).
pub fn gamma_comult(
    c: &ChainComplex,
    c2: &ChainComplex,
    s_max: usize,
) -> Result<SimplicialMap, SimpError> {
    let gc = gamma(c, s_max)?;
    let gc2 = gamma(c2, s_max)?;
    let eta = dk_unit(c, s_max)?;
    let eta2 = dk_unit(c2, s_max)?;
    let ez = shuffle_map(&gc, &gc2)?;
    let inner = crate::chaincat::tensor_map(&eta, &eta2)?.then(&ez);
    let target = sv_tensor(&gc, &gc2)?;
    let eps = dk_counit(&target)?;
    // Γ(inner) : Γ(c⊗c′) → Γ(N(Γc ⊗ Γc′)); ε finishes the composite.
    Ok(gamma_map(&inner, s_max)?.then(&eps))
}

fn inversions(perm: &[usize]) -> usize {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    inv
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Composite degeneracy s_{i_r}∘…∘s_{i_1} (ascending indices applied first)
/// as a matrix X_p → X_{p+r}.
fn degeneracy_composite(x: &SimplicialVS, p: usize, indices: &[usize]) -> Matrix {
    let mut m = Matrix::identity(x.dim(p), x.field);
    let mut level = p;
    for &i in indices {
        m = x.degen(level, i).matmul(&m);
        level += 1;
    }
    m
}

/// Eilenberg–Zilber shuffle map ∇ : N(a) ⊗ N(b) → N(a⊗b).
pub fn shuffle_map(a: &SimplicialVS, b: &SimplicialVS) -> Result<ChainMap, SimpError> {
    let ab = sv_tensor(a, b)?;
    let nab = normalize(&ab);
    let na = normalize(a);
    let nb = normalize(b);
    let src = ch_tensor(&na, &nb)?;
    let fld = a.field;
    let s_max = a.s_max;
    let mut comps: BTreeMap<i64, Matrix> = BTreeMap::new();
    for n in 0..=s_max {
        let mut m = Matrix::zero(nab.dim(n as i64), src.dim(n as i64), fld);
        let proj = normalized_projection(&ab, n);
        let mut col_off = 0;
        for p in 0..=n {
            let q = n - p;
            let ka = normalized_basis(a, p);
            let kb = normalized_basis(b, q);
            if ka.cols * kb.cols == 0 {
                continue;
            }
            // sum over (p,q)-shuffles: ν (applied to a) is the q-subset
            let mut total = Matrix::zero(ab.dim(n), ka.cols * kb.cols, fld);
            for nu in subsets_of_size(n, q) {
                let mu: Vec<usize> = (0..n).filter(|i| !nu.contains(i)).collect();
                let mut perm = mu.clone();
                perm.extend(&nu);
                let sign = if inversions(&perm) % 2 == 0 {
                    fld.one()
                } else {
                    fld.neg(&fld.one())
                };
                let sa = degeneracy_composite(a, p, &nu).matmul(&ka);
                let sb = degeneracy_composite(b, q, &mu).matmul(&kb);
                total = total.add(&sa.kronecker(&sb).scale(&sign));
            }
            let block = proj.matmul(&total);
            for r in 0..block.rows {
                for c in 0..block.cols {
                    m.set(r, col_off + c, block.get(r, c).clone());
                }
            }
            col_off += ka.cols * kb.cols;
        }
        comps.insert(n as i64, m);
    }
    Ok(ChainMap::new(src, nab, comps)?)
}

/// Alexander–Whitney map AW : N(a⊗b) → N(a) ⊗ N(b).
pub fn aw_map(a: &SimplicialVS, b: &SimplicialVS) -> Result<ChainMap, SimpError> {
    let ab = sv_tensor(a, b)?;
    let nab = normalize(&ab);
    let na = normalize(a);
    let nb = normalize(b);
    let tgt = ch_tensor(&na, &nb)?;
    let fld = a.field;
    let s_max = a.s_max;
    let mut comps: BTreeMap<i64, Matrix> = BTreeMap::new();
    for n in 0..=s_max {
        let kab = normalized_basis(&ab, n);
        let mut m = Matrix::zero(tgt.dim(n as i64), kab.cols, fld);
        let mut row_off = 0;
        for p in 0..=n {
            let q = n - p;
            let pa = normalized_projection(a, p);
            let pb = normalized_projection(b, q);
            if pa.rows * pb.rows == 0 {
                continue;
            }
            // x ⊗ y ↦ d_{p+1}…d_n x ⊗ d_0^p y   (front face on a, back on b)
            let mut da = Matrix::identity(a.dim(n), fld);
            for lev in ((p + 1)..=n).rev() {
                da = a.face(lev, lev).matmul(&da);
            }
            let mut db = Matrix::identity(b.dim(n), fld);
            for lev in ((q + 1)..=n).rev() {
                db = b.face(lev, 0).matmul(&db);
            }
            let block = pa
                .matmul(&da)
                .kronecker(&pb.matmul(&db))
                .matmul(&kab);
            for r in 0..block.rows {
                for c in 0..block.cols {
                    m.set(row_off + r, c, block.get(r, c).clone());
                }
            }
            row_off += pa.rows * pb.rows;
        }
        comps.insert(n as i64, m);
    }
    Ok(ChainMap::new(nab, tgt, comps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaincat::homology_dims;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn constant_normalizes_to_degree_zero() {
        let x = SimplicialVS::unit(q(), 3);
        let n = normalize(&x);
        assert_eq!(n.dim(0), 1);
        assert_eq!(n.total_dim(), 1);
    }

    #[test]
    fn gamma_of_unit_is_constant() {
        let g = gamma(&ChainComplex::unit(q()), 3).unwrap();
        assert_eq!(g, SimplicialVS::constant(q(), 3, 1));
    }

    #[test]
    fn gamma_sphere_level_dims_are_binomial() {
        let s1 = ChainComplex::sphere(q(), 1, 0);
        let g = gamma(&s1, 3).unwrap();
        // level n has dim C(n,1) = n
        assert_eq!((g.dim(0), g.dim(1), g.dim(2), g.dim(3)), (0, 1, 2, 3));
        let n = normalize(&g);
        assert_eq!(n.dim(1), 1);
        assert_eq!(n.total_dim(), 1);
    }

    #[test]
    fn gamma_preserves_direct_sums() {
        let c1 = ChainComplex::sphere(q(), 1, 0);
        let c2 = ChainComplex::disk(q(), 2, 0);
        let g1 = gamma(&c1, 3).unwrap();
        let g2 = gamma(&c2, 3).unwrap();
        let g12 = gamma(&c1.direct_sum(&c2), 3).unwrap();
        for n in 0..=3 {
            assert_eq!(g12.dim(n), g1.dim(n) + g2.dim(n));
        }
    }

    #[test]
    fn gamma_window_violation_errors() {
        let c = ChainComplex::disk(q(), 5, 0);
        assert!(gamma(&c, 3).is_err());
    }

    #[test]
    fn dold_kan_roundtrip_dims_and_homology() {
        for c in [
            ChainComplex::sphere(q(), 2, 0),
            ChainComplex::disk(q(), 3, 0),
            ChainComplex::sphere(q(), 0, 0).direct_sum(&ChainComplex::disk(q(), 2, 0)),
        ] {
            let ng = normalize(&gamma(&c, 4).unwrap());
            for d in 0..=4i64 {
                assert_eq!(ng.dim(d), c.dim(d), "degree {d}");
            }
            assert_eq!(homology_dims(&ng), homology_dims(&c));
        }
    }

    #[test]
    fn dk_unit_is_iso() {
        let c = ChainComplex::disk(q(), 2, 0).direct_sum(&ChainComplex::sphere(q(), 1, 0));
        let eta = dk_unit(&c, 4).unwrap();
        assert!(eta.is_iso());
    }

    #[test]
    fn dk_counit_is_iso() {
        let x = gamma(&ChainComplex::disk(q(), 2, 0), 3).unwrap();
        let eps = dk_counit(&x).unwrap();
        assert!(eps.is_iso());
        // triangle: ε ∘ Γ(η) = id on Γ(c)
        let c = ChainComplex::disk(q(), 2, 0);
        let eta = dk_unit(&c, 3).unwrap();
        let geta = gamma_map(&eta, 3).unwrap();
        let round = geta.then(&eps);
        assert_eq!(round, SimplicialMap::identity(&x));
    }

    #[test]
    fn shuffle_of_units_is_identity() {
        let u = SimplicialVS::unit(q(), 3);
        let ez = shuffle_map(&u, &u).unwrap();
        assert_eq!(ez.component(0), Matrix::identity(1, q()));
        assert!(ez.is_weak_equivalence());
    }

    #[test]
    fn aw_after_ez_is_identity() {
        let a = gamma(&ChainComplex::sphere(q(), 1, 0), 3).unwrap();
        let b = gamma(&ChainComplex::disk(q(), 2, 0), 3).unwrap();
        let ez = shuffle_map(&a, &b).unwrap();
        let aw = aw_map(&a, &b).unwrap();
        let round = ez.then(&aw);
        assert_eq!(round, ChainMap::identity(&round.source));
    }

    #[test]
    fn ez_is_quasi_iso() {
        let a = gamma(&ChainComplex::sphere(q(), 1, 0), 4).unwrap();
        let b = gamma(&ChainComplex::sphere(q(), 2, 0), 4).unwrap();
        let ez = shuffle_map(&a, &b).unwrap();
        assert!(ez.is_weak_equivalence());
    }

    #[test]
    fn sv_model_predicates() {
        let u = SimplicialVS::unit(q(), 3);
        assert!(SimplicialMap::identity(&u).is_iso());
        // Γ of S^0 ↪ D^1 is a cofibration that is not a weak equivalence
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = ChainMap::from_components(&s, &d, [(0, Matrix::identity(1, q()))]).unwrap();
        let ginc = gamma_map(&inc, 3).unwrap();
        assert!(ginc.is_cofibration());
        assert!(!ginc.is_weak_equivalence());
        // 0 → Γ(D^1) is a trivial cofibration
        let z = SimplicialVS::zero(q(), 3);
        let gd = gamma(&d, 3).unwrap();
        let triv = SimplicialMap::zero(&z, &gd);
        assert!(triv.is_cofibration());
        assert!(triv.is_weak_equivalence());
    }

    #[test]
    fn sv_pushout_of_gamma_images() {
        let s = ChainComplex::sphere(q(), 0, 0);
        let d = ChainComplex::disk(q(), 1, 0);
        let inc = ChainMap::from_components(&s, &d, [(0, Matrix::identity(1, q()))]).unwrap();
        let ginc = gamma_map(&inc, 3).unwrap();
        let po = sv_pushout(&ginc, &ginc).unwrap();
        // Γ is a left adjoint, so this agrees with Γ of the chain pushout
        let chain_po = crate::chaincat::pushout(&inc, &inc).unwrap();
        let expected = gamma(&chain_po.object, 3).unwrap();
        for n in 0..=3 {
            assert_eq!(po.object.dim(n), expected.dim(n));
        }
        let med = po
            .mediator(&ginc, &ginc, &SimplicialMap::identity(&ginc.target), &SimplicialMap::identity(&ginc.target))
            .unwrap();
        assert_eq!(po.from_left.then(&med), SimplicialMap::identity(&ginc.target));
    }

    #[test]
    fn gamma_comult_is_weak_equivalence() {
        let c = ChainComplex::sphere(q(), 1, 0);
        let c2 = ChainComplex::sphere(q(), 1, 0).direct_sum(&ChainComplex::disk(q(), 1, 0));
        let comult = gamma_comult(&c, &c2, 4).unwrap();
        assert!(comult.is_weak_equivalence());
        // on units it is the identity
        let u = ChainComplex::unit(q());
        let cu = gamma_comult(&u, &u, 3).unwrap();
        assert!(cu.is_iso());
    }

    #[test]
    fn naturality_of_shuffle() {
        // naturality in the first variable for a map Γ(S^1) → Γ(S^1)
        let s1 = ChainComplex::sphere(q(), 1, 0);
        let a = gamma(&s1, 3).unwrap();
        let double =
            ChainMap::from_components(&s1, &s1, [(1, Matrix::from_i64_rows(q(), &[&[2]]))])
                .unwrap();
        let f = gamma_map(&double, 3).unwrap();
        let b = gamma(&ChainComplex::sphere(q(), 0, 0), 3).unwrap();
        let ez1 = shuffle_map(&a, &b).unwrap();
        let ez2 = shuffle_map(&a, &b).unwrap();
        let nf = normalize_map(&f);
        let lhs = crate::chaincat::tensor_map(&nf, &ChainMap::identity(&normalize(&b)))
            .unwrap()
            .then(&ez2);
        let fid = sv_tensor_map(&f, &SimplicialMap::identity(&b)).unwrap();
        let rhs = ez1.then(&normalize_map(&fid));
        for d in 0..=3i64 {
            assert_eq!(lhs.component(d), rhs.component(d), "degree {d}");
        }
    }
}
