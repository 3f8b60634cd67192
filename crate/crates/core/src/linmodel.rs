//! Simplicial vector spaces over Q as linear models of Lie n-groupoids.
//!
//! A model stores dimensions per level plus face and degeneracy matrices
//! satisfying the simplicial identities exactly. In this linear setting
//! "surjective submersion" means surjective linear map and "diffeomorphism"
//! means linear isomorphism, so Kan conditions, hypercovers and coskeleta all
//! become exact rank conditions.
//!
//! Limits over finite shapes (boundaries, horns, skeleta) are computed with
//! one unknown block per maximal nondegenerate simplex and the remaining face
//! relations as constraints; every derived evaluation is re-verified against
//! the complete set of face/degeneracy relations.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactla::{
    express_in_basis, rat_from_string, rat_to_string, ChainComplexQ, LinAlgError, Orientation,
    Rat, RatMatrix,
};
use crate::par;
use crate::ssets::{self, SimplicialShape};

#[derive(Debug, Clone)]
pub enum ModelError {
    /// A structure matrix has the wrong shape.
    Shape(String),
    /// One of the five simplicial identities fails as a matrix equation.
    Identity(String),
    /// A levelwise map fails to commute with faces or degeneracies.
    NotSimplicial(String),
    InsufficientLevels { have: usize, need: usize },
    LevelMismatch(String),
    /// A map required to be levelwise surjective is not.
    NotSurjective { level: usize },
    /// A precondition on the inputs fails (wrong groupoid level, not a
    /// hypercover, ...).
    Precondition(String),
    LinAlg(LinAlgError),
    Parse(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Shape(s) => write!(f, "bad matrix shape: {s}"),
            ModelError::Identity(s) => write!(f, "simplicial identity fails: {s}"),
            ModelError::NotSimplicial(s) => write!(f, "map is not simplicial: {s}"),
            ModelError::InsufficientLevels { have, need } => {
                write!(f, "model stores {have} levels but {need} are needed")
            }
            ModelError::LevelMismatch(s) => write!(f, "level mismatch: {s}"),
            ModelError::NotSurjective { level } => {
                write!(f, "map is not surjective at level {level}")
            }
            ModelError::Precondition(s) => write!(f, "precondition fails: {s}"),
            ModelError::LinAlg(e) => write!(f, "linear algebra: {e}"),
            ModelError::Parse(s) => write!(f, "cannot parse model: {s}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<LinAlgError> for ModelError {
    fn from(e: LinAlgError) -> Self {
        ModelError::LinAlg(e)
    }
}

/// Simplicial Q-vector space truncated at `max_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinSimpSpace {
    dims: Vec<usize>,
    /// face[m][i]: X_m → X_{m−1}, for 1 ≤ m ≤ L, 0 ≤ i ≤ m
    face: Vec<Vec<RatMatrix>>,
    /// degen[m][i]: X_m → X_{m+1}, for 0 ≤ m < L, 0 ≤ i ≤ m
    degen: Vec<Vec<RatMatrix>>,
}

impl LinSimpSpace {
    pub fn new(
        dims: Vec<usize>,
        face: Vec<Vec<RatMatrix>>,
        degen: Vec<Vec<RatMatrix>>,
    ) -> Result<Self, ModelError> {
        assert!(!dims.is_empty());
        let l = dims.len() - 1;
        if face.len() != l + 1 || degen.len() != l + 1 {
            return Err(ModelError::Shape("face/degen level count".into()));
        }
        for m in 1..=l {
            if face[m].len() != m + 1 {
                return Err(ModelError::Shape(format!("face[{m}] needs {} maps", m + 1)));
            }
            for (i, mat) in face[m].iter().enumerate() {
                if (mat.rows(), mat.cols()) != (dims[m - 1], dims[m]) {
                    return Err(ModelError::Shape(format!("face[{m}][{i}]")));
                }
            }
        }
        for m in 0..l {
            if degen[m].len() != m + 1 {
                return Err(ModelError::Shape(format!("degen[{m}] needs {} maps", m + 1)));
            }
            for (i, mat) in degen[m].iter().enumerate() {
                if (mat.rows(), mat.cols()) != (dims[m + 1], dims[m]) {
                    return Err(ModelError::Shape(format!("degen[{m}][{i}]")));
                }
            }
        }
        let x = LinSimpSpace { dims, face, degen };
        x.validate()?;
        Ok(x)
    }

    pub fn max_level(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, m: usize) -> usize {
        self.dims[m]
    }

    pub fn face_mat(&self, m: usize, i: usize) -> &RatMatrix {
        &self.face[m][i]
    }

    pub fn degen_mat(&self, m: usize, i: usize) -> &RatMatrix {
        &self.degen[m][i]
    }

    /// Check the five simplicial identities as exact matrix equations.
    pub fn validate(&self) -> Result<(), ModelError> {
        let l = self.max_level();
        let fail = |s: String| Err(ModelError::Identity(s));
        // (1) d_i d_j = d_{j−1} d_i for i < j (level m → m−2)
        for m in 2..=l {
            for j in 1..=m {
                for i in 0..j {
                    let a = self.face[m - 1][i].mul(&self.face[m][j]);
                    let b = self.face[m - 1][j - 1].mul(&self.face[m][i]);
                    if a != b {
                        return fail(format!("d_{i} d_{j} at level {m}"));
                    }
                }
            }
        }
        // (2) s_i s_j = s_{j+1} s_i for i ≤ j (level m−1 → m+1)
        for m in 1..l {
            for j in 0..m {
                for i in 0..=j {
                    let a = self.degen[m][i].mul(&self.degen[m - 1][j]);
                    let b = self.degen[m][j + 1].mul(&self.degen[m - 1][i]);
                    if a != b {
                        return fail(format!("s_{i} s_{j} from level {}", m - 1));
                    }
                }
            }
        }
        // (3)–(5): d_i at level n against s_j from level n−1
        for n in 1..=l {
            for j in 0..n {
                for i in 0..=n {
                    let lhs = self.face[n][i].mul(&self.degen[n - 1][j]);
                    if i < j {
                        let rhs = self.degen[n - 2][j - 1].mul(&self.face[n - 1][i]);
                        if lhs != rhs {
                            return fail(format!("d_{i} s_{j} (i<j) from level {}", n - 1));
                        }
                    } else if i == j || i == j + 1 {
                        if lhs != RatMatrix::identity(self.dims[n - 1]) {
                            return fail(format!("d_{i} s_{j} ≠ id from level {}", n - 1));
                        }
                    } else {
                        let rhs = self.degen[n - 2][j].mul(&self.face[n - 1][i - 1]);
                        if lhs != rhs {
                            return fail(format!("d_{i} s_{j} (i>j+1) from level {}", n - 1));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Structure matrix X(f): X_m → X_k of an arbitrary monotone map
    /// f: [k] → [m], by factoring into faces and degeneracies.
    pub fn structure_matrix(&self, m: usize, f: &[usize]) -> RatMatrix {
        debug_assert!(f.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(f.iter().all(|&v| v <= m));
        for a in (0..=m).rev() {
            if !f.contains(&a) {
                let shifted: Vec<usize> =
                    f.iter().map(|&v| if v > a { v - 1 } else { v }).collect();
                return self.structure_matrix(m - 1, &shifted).mul(&self.face[m][a]);
            }
        }
        for c in 0..f.len() - 1 {
            if f[c] == f[c + 1] {
                let mut shorter = f.to_vec();
                shorter.remove(c + 1);
                return self.degen[f.len() - 2][c].mul(&self.structure_matrix(m, &shorter));
            }
        }
        RatMatrix::identity(self.dims[m])
    }

    /// Add `delta` to one face-matrix entry (mutation harness support).
    pub fn perturb_face_entry(&mut self, m: usize, i: usize, r: usize, c: usize, delta: Rat) {
        let v = self.face[m][i].at(r, c).clone() + delta;
        self.face[m][i].set(r, c, v);
    }

    /// Add `delta` to one degeneracy-matrix entry.
    pub fn perturb_degen_entry(&mut self, m: usize, i: usize, r: usize, c: usize, delta: Rat) {
        let v = self.degen[m][i].at(r, c).clone() + delta;
        self.degen[m][i].set(r, c, v);
    }

    /// Truncated copy with fewer levels.
    pub fn truncate(&self, l: usize) -> LinSimpSpace {
        assert!(l <= self.max_level());
        let mut degen = self.degen[..=l].to_vec();
        degen[l] = Vec::new();
        LinSimpSpace {
            dims: self.dims[..=l].to_vec(),
            face: self.face[..=l].to_vec(),
            degen,
        }
    }
}

/// Levelwise linear map between simplicial vector spaces, commuting exactly
/// with all faces and degeneracies.
#[derive(Debug, Clone)]
pub struct SimpLinMap {
    pub source: LinSimpSpace,
    pub target: LinSimpSpace,
    pub levels: Vec<RatMatrix>,
}

impl SimpLinMap {
    pub fn new(
        source: LinSimpSpace,
        target: LinSimpSpace,
        levels: Vec<RatMatrix>,
    ) -> Result<Self, ModelError> {
        let l = source.max_level().min(target.max_level());
        if levels.len() != l + 1 {
            return Err(ModelError::Shape("map needs one matrix per level".into()));
        }
        let m = SimpLinMap {
            source,
            target,
            levels,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(x: &LinSimpSpace) -> SimpLinMap {
        SimpLinMap {
            source: x.clone(),
            target: x.clone(),
            levels: (0..=x.max_level()).map(|m| RatMatrix::identity(x.dim(m))).collect(),
        }
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, m: usize) -> &RatMatrix {
        &self.levels[m]
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let l = self.max_level();
        for m in 0..=l {
            let mat = &self.levels[m];
            if (mat.rows(), mat.cols()) != (self.target.dim(m), self.source.dim(m)) {
                return Err(ModelError::Shape(format!("level {m} matrix")));
            }
        }
        for m in 1..=l {
            for i in 0..=m {
                let a = self.target.face_mat(m, i).mul(&self.levels[m]);
                let b = self.levels[m - 1].mul(self.source.face_mat(m, i));
                if a != b {
                    return Err(ModelError::NotSimplicial(format!("d_{i} at level {m}")));
                }
            }
        }
        for m in 0..l {
            for i in 0..=m {
                let a = self.target.degen_mat(m, i).mul(&self.levels[m]);
                let b = self.levels[m + 1].mul(self.source.degen_mat(m, i));
                if a != b {
                    return Err(ModelError::NotSimplicial(format!("s_{i} at level {m}")));
                }
            }
        }
        Ok(())
    }

    /// Composite g∘self (apply self first, then g).
    pub fn then(&self, g: &SimpLinMap) -> Result<SimpLinMap, ModelError> {
        let l = self.max_level().min(g.max_level());
        let levels: Vec<RatMatrix> =
            (0..=l).map(|m| g.levels[m].mul(&self.levels[m])).collect();
        SimpLinMap::new(self.source.truncate(l), g.target.truncate(l), levels)
    }

    pub fn is_levelwise_surjective(&self) -> bool {
        self.levels.iter().all(is_surjective)
    }
}

pub fn is_surjective(m: &RatMatrix) -> bool {
    m.rank() == m.rows()
}

pub fn is_bijective(m: &RatMatrix) -> bool {
    m.rows() == m.cols() && m.rank() == m.rows()
}

/// The limit Hom(S, X) for a finite shape S: a basis of the solution space
/// plus an exact evaluation matrix at every simplex of the shape.
#[derive(Debug, Clone)]
pub struct HomSpace {
    pub shape: SimplicialShape,
    pub dim: usize,
    maximal: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    total_vars: usize,
    basis: RatMatrix,
    evals: Vec<Vec<RatMatrix>>,
}

impl HomSpace {
    pub fn eval(&self, level: usize, idx: usize) -> &RatMatrix {
        &self.evals[level][idx]
    }

    pub fn eval_by_name(&self, level: usize, name: &str) -> Option<&RatMatrix> {
        let idx = self.shape.index_of(level, name)?;
        Some(&self.evals[level][idx])
    }

    pub fn maximal(&self) -> &[(usize, usize)] {
        &self.maximal
    }

    /// Coordinates of hom elements given by their values on the maximal
    /// simplices, in `self.maximal()` order. `cols` is the number of
    /// elements (columns of each value matrix).
    pub fn coords_from_values(
        &self,
        values: &[RatMatrix],
        cols: usize,
    ) -> Result<RatMatrix, ModelError> {
        assert_eq!(values.len(), self.maximal.len());
        let mut stacked = RatMatrix::zeros(self.total_vars, cols);
        for (k, v) in values.iter().enumerate() {
            assert_eq!(v.cols(), cols);
            let off = self.offsets[k];
            for r in 0..v.rows() {
                for c in 0..v.cols() {
                    stacked.set(off + r, c, v.at(r, c).clone());
                }
            }
        }
        Ok(express_in_basis(&self.basis, &stacked)?)
    }

    /// Re-check every face and degeneracy relation of the shape against the
    /// computed evaluations.
    pub fn verify(&self, x: &LinSimpSpace) -> Result<(), ModelError> {
        let shape = &self.shape;
        for m in 1..=shape.max_level {
            for idx in 0..shape.level_size(m) {
                for i in 0..=m {
                    let lhs = &self.evals[m - 1][shape.face(m, i, idx)];
                    let rhs = x.face_mat(m, i).mul(&self.evals[m][idx]);
                    if *lhs != rhs {
                        return Err(ModelError::Identity(format!(
                            "hom evaluation breaks d_{i} at level {m}"
                        )));
                    }
                }
            }
        }
        for m in 0..shape.max_level {
            for idx in 0..shape.level_size(m) {
                for i in 0..=m {
                    let lhs = &self.evals[m + 1][shape.degen(m, i, idx)];
                    let rhs = x.degen_mat(m, i).mul(&self.evals[m][idx]);
                    if *lhs != rhs {
                        return Err(ModelError::Identity(format!(
                            "hom evaluation breaks s_{i} at level {m}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Selector matrix picking the block [off, off+rows) out of a total-width
/// coordinate vector.
fn selector(rows: usize, total: usize, off: usize) -> RatMatrix {
    RatMatrix::from_fn(rows, total, |r, c| {
        if c == off + r {
            Rat::one()
        } else {
            Rat::zero()
        }
    })
}

/// Compute the limit Hom(S, X) over a finite shape.
pub fn hom_from_shape(shape: &SimplicialShape, x: &LinSimpSpace) -> Result<HomSpace, ModelError> {
    if shape.max_level > x.max_level() {
        return Err(ModelError::InsufficientLevels {
            have: x.max_level(),
            need: shape.max_level,
        });
    }
    let l = shape.max_level;
    let nondeg = shape.nondegenerate();
    // Maximal = nondegenerate and not a face of a nondegenerate simplex.
    let mut covered: Vec<Vec<bool>> = (0..=l).map(|m| vec![false; shape.level_size(m)]).collect();
    for &(m, idx) in &nondeg {
        if m == 0 {
            continue;
        }
        for i in 0..=m {
            covered[m - 1][shape.face(m, i, idx)] = true;
        }
    }
    let maximal: Vec<(usize, usize)> = nondeg
        .iter()
        .copied()
        .filter(|&(m, idx)| !covered[m][idx])
        .collect();
    let mut offsets = Vec::with_capacity(maximal.len());
    let mut total = 0usize;
    for &(m, _) in &maximal {
        offsets.push(total);
        total += x.dim(m);
    }
    let var_index: BTreeMap<(usize, usize), usize> =
        maximal.iter().enumerate().map(|(k, &s)| (s, k)).collect();

    // Definitional parent edge for each covered nondegenerate simplex.
    let mut parent: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for m in 1..=l {
        for idx in 0..shape.level_size(m) {
            if !shape.is_nondegenerate(m, idx) {
                continue;
            }
            for i in 0..=m {
                let f = shape.face(m, i, idx);
                if shape.is_nondegenerate(m - 1, f)
                    && covered[m - 1][f]
                    && !parent.contains_key(&(m - 1, f))
                {
                    parent.insert((m - 1, f), (idx, i));
                }
            }
        }
    }

    // Expression matrices: value of each simplex in terms of the unknowns.
    struct ExprCtx<'a> {
        shape: &'a SimplicialShape,
        x: &'a LinSimpSpace,
        var_index: &'a BTreeMap<(usize, usize), usize>,
        offsets: &'a [usize],
        total: usize,
        parent: &'a BTreeMap<(usize, usize), (usize, usize)>,
    }

    fn compute_expr(
        ctx: &ExprCtx<'_>,
        expr: &mut Vec<Vec<Option<RatMatrix>>>,
        m: usize,
        idx: usize,
    ) -> RatMatrix {
        if let Some(e) = &expr[m][idx] {
            return e.clone();
        }
        let e = if let Some(&k) = ctx.var_index.get(&(m, idx)) {
            selector(ctx.x.dim(m), ctx.total, ctx.offsets[k])
        } else if !ctx.shape.is_nondegenerate(m, idx) {
            let (cl, cidx, chain) = ctx.shape.core_of(m, idx);
            let mut e = compute_expr(ctx, expr, cl, cidx);
            let mut lv = cl;
            for &c in &chain {
                e = ctx.x.degen_mat(lv, c).mul(&e);
                lv += 1;
            }
            e
        } else {
            let &(pidx, i) = ctx
                .parent
                .get(&(m, idx))
                .expect("covered nondegenerate simplex has a parent");
            let pe = compute_expr(ctx, expr, m + 1, pidx);
            ctx.x.face_mat(m + 1, i).mul(&pe)
        };
        expr[m][idx] = Some(e.clone());
        e
    }

    let ctx = ExprCtx {
        shape,
        x,
        var_index: &var_index,
        offsets: &offsets,
        total,
        parent: &parent,
    };
    let mut expr: Vec<Vec<Option<RatMatrix>>> =
        (0..=l).map(|m| vec![None; shape.level_size(m)]).collect();
    for m in 0..=l {
        for idx in 0..shape.level_size(m) {
            compute_expr(&ctx, &mut expr, m, idx);
        }
    }
    let expr: Vec<Vec<RatMatrix>> = expr
        .into_iter()
        .map(|lv| lv.into_iter().map(|e| e.unwrap()).collect())
        .collect();

    // Constraints: all face relations not used as definitional edges.
    let mut rows: Vec<RatMatrix> = Vec::new();
    for m in 1..=l {
        for idx in 0..shape.level_size(m) {
            if !shape.is_nondegenerate(m, idx) {
                continue;
            }
            for i in 0..=m {
                let f = shape.face(m, i, idx);
                if parent.get(&(m - 1, f)) == Some(&(idx, i)) {
                    continue;
                }
                let diff = expr[m - 1][f].sub(&x.face_mat(m, i).mul(&expr[m][idx]));
                if !diff.is_zero() {
                    rows.push(diff);
                }
            }
        }
    }
    let constraint = RatMatrix::vstack_all(total, &rows);
    let basis = constraint.kernel_basis();
    let dim = basis.cols();
    let evals: Vec<Vec<RatMatrix>> = expr
        .iter()
        .map(|lv| lv.iter().map(|e| e.mul(&basis)).collect())
        .collect();
    let hs = HomSpace {
        shape: shape.clone(),
        dim,
        maximal,
        offsets,
        total_vars: total,
        basis,
        evals,
    };
    hs.verify(x)?;
    Ok(hs)
}

/// Restriction map Hom(S, X) → Hom(S′, X) along an inclusion of shapes
/// (simplices matched by canonical names).
pub fn restriction_matrix(big: &HomSpace, small: &HomSpace) -> Result<RatMatrix, ModelError> {
    let mut values = Vec::with_capacity(small.maximal.len());
    for &(m, idx) in &small.maximal {
        let name = small.shape.name(m, idx);
        let bidx = big.shape.index_of(m, name).ok_or_else(|| {
            ModelError::LevelMismatch(format!("simplex {name} missing from larger shape"))
        })?;
        values.push(big.evals[m][bidx].clone());
    }
    small.coords_from_values(&values, big.dim)
}

/// The horn projection p^m_j : X_m → Hom(Λ^m_j, X) in the hom-space basis.
pub fn horn_map(
    x: &LinSimpSpace,
    m: usize,
    j: usize,
) -> Result<(RatMatrix, HomSpace), ModelError> {
    if m > x.max_level() {
        return Err(ModelError::InsufficientLevels {
            have: x.max_level(),
            need: m,
        });
    }
    let shape = ssets::horn(m, j).map_err(|e| ModelError::Precondition(e.to_string()))?;
    let hs = hom_from_shape(&shape, x)?;
    let values: Vec<RatMatrix> = hs
        .maximal
        .iter()
        .map(|&(k, idx)| {
            let f = ssets::decode_monotone(hs.shape.name(k, idx)).expect("digit names");
            x.structure_matrix(m, &f)
        })
        .collect();
    let p = hs.coords_from_values(&values, x.dim(m))?;
    Ok((p, hs))
}

/// One (m, j) entry of a Kan report.
#[derive(Debug, Clone, Serialize)]
pub struct KanEntry {
    pub m: usize,
    pub j: usize,
    pub surjective: bool,
    pub bijective: bool,
    pub need_bijective: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KanMatrixReport {
    pub n: usize,
    pub pass: bool,
    pub entries: Vec<KanEntry>,
}

impl KanMatrixReport {
    pub fn first_failure(&self) -> Option<&KanEntry> {
        self.entries
            .iter()
            .find(|e| !e.surjective || (e.need_bijective && !e.bijective))
    }
}

/// Lie n-groupoid check: horn maps surjective for every 1 ≤ m ≤ L and
/// bijective for m ≥ n+1. Needs levels through n+2.
pub fn check_lie_n_groupoid(x: &LinSimpSpace, n: usize) -> Result<KanMatrixReport, ModelError> {
    let l = x.max_level();
    if l < n + 2 {
        return Err(ModelError::InsufficientLevels { have: l, need: n + 2 });
    }
    let pairs: Vec<(usize, usize)> =
        (1..=l).flat_map(|m| (0..=m).map(move |j| (m, j))).collect();
    let entries_res: Vec<Result<KanEntry, ModelError>> = par::map_slice(&pairs, |&(m, j)| {
        let (p, hs) = horn_map(x, m, j)?;
        let rank = p.rank();
        Ok(KanEntry {
            m,
            j,
            surjective: rank == hs.dim,
            bijective: rank == hs.dim && hs.dim == x.dim(m),
            need_bijective: m >= n + 1,
        })
    });
    let mut entries = Vec::with_capacity(entries_res.len());
    for e in entries_res {
        entries.push(e?);
    }
    let pass = entries.iter().all(|e| e.surjective && (!e.need_bijective || e.bijective));
    Ok(KanMatrixReport { n, pass, entries })
}

/// Relative hom space Hom(S, X) ×_{Hom(S, Y)} Y_lv for a sub-shape S of
/// Δ^lv. This is the codomain of the matching maps q_m, of the relative horn
/// maps, and the levelwise building block of relative coskeleta.
#[derive(Debug, Clone)]
pub struct RelHomSpace {
    pub level: usize,
    pub dim: usize,
    pub hom_x: HomSpace,
    basis: RatMatrix,
}

impl RelHomSpace {
    fn x_block(&self) -> RatMatrix {
        RatMatrix::from_fn(self.hom_x.dim, self.dim, |r, c| self.basis.at(r, c).clone())
    }

    /// The Y_lv component of the basis elements.
    pub fn eval_y(&self) -> RatMatrix {
        let off = self.hom_x.dim;
        RatMatrix::from_fn(self.basis.rows() - off, self.dim, |r, c| {
            self.basis.at(off + r, c).clone()
        })
    }

    /// Evaluation of the X-part at a shape simplex.
    pub fn eval_x(&self, level: usize, idx: usize) -> RatMatrix {
        self.hom_x.eval(level, idx).mul(&self.x_block())
    }

    pub fn eval_x_by_name(&self, level: usize, name: &str) -> Option<RatMatrix> {
        let idx = self.hom_x.shape.index_of(level, name)?;
        Some(self.eval_x(level, idx))
    }

    /// Coordinates of elements given by X-values on the maximal simplices
    /// plus a Y_lv value.
    pub fn coords(&self, values: &[RatMatrix], y: &RatMatrix) -> Result<RatMatrix, ModelError> {
        let cx = self.hom_x.coords_from_values(values, y.cols())?;
        Ok(express_in_basis(&self.basis, &cx.vstack(y))?)
    }
}

/// Build Hom(S, X) ×_{Hom(S, Y)} Y_lv for a sub-shape S of Δ^lv along a
/// simplicial map f : X → Y.
pub fn relative_hom(
    shape: &SimplicialShape,
    f: &SimpLinMap,
    lv: usize,
) -> Result<RelHomSpace, ModelError> {
    let x = &f.source;
    let y = &f.target;
    if lv > f.max_level() {
        return Err(ModelError::InsufficientLevels {
            have: f.max_level(),
            need: lv,
        });
    }
    let hom_x = hom_from_shape(shape, x)?;
    let ydim = y.dim(lv);
    // (a, y) with f∘a = y|_S, matched on the maximal simplices.
    let mut rows: Vec<RatMatrix> = Vec::new();
    for &(m, idx) in hom_x.maximal.clone().iter() {
        let mono = ssets::decode_monotone(hom_x.shape.name(m, idx))
            .map_err(|e| ModelError::Parse(e.to_string()))?;
        let lhs = f.levels[m].mul(hom_x.eval(m, idx));
        let rhs = y.structure_matrix(lv, &mono);
        rows.push(lhs.hstack(&rhs.neg()));
    }
    let constraint = RatMatrix::vstack_all(hom_x.dim + ydim, &rows);
    let basis = constraint.kernel_basis();
    Ok(RelHomSpace {
        level: lv,
        dim: basis.cols(),
        hom_x,
        basis,
    })
}

/// The canonical comparison map X_lv → Hom(S, X) ×_{Hom(S, Y)} Y_lv sending
/// x to (x|_S, f x).
pub fn comparison_map(
    rel: &RelHomSpace,
    f: &SimpLinMap,
    lv: usize,
) -> Result<RatMatrix, ModelError> {
    let x = &f.source;
    let values: Vec<RatMatrix> = rel
        .hom_x
        .maximal
        .iter()
        .map(|&(k, idx)| {
            let mono = ssets::decode_monotone(rel.hom_x.shape.name(k, idx)).expect("digit names");
            x.structure_matrix(lv, &mono)
        })
        .collect();
    rel.coords(&values, &f.levels[lv])
}

/// Matching map q_m = ((d_0, …, d_m), f_m) : X_m → Hom(∂Δ^m, X)
/// ×_{Hom(∂Δ^m, Y)} Y_m.
pub fn matching_map(f: &SimpLinMap, m: usize) -> Result<(RatMatrix, RelHomSpace), ModelError> {
    let shape = ssets::boundary(m);
    let rel = relative_hom(&shape, f, m)?;
    let q = comparison_map(&rel, f, m)?;
    Ok((q, rel))
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchEntry {
    pub m: usize,
    pub surjective: bool,
    pub bijective: bool,
    /// "surjective" below n, "bijective" from n on.
    pub requirement: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypercoverReport {
    pub n: usize,
    pub pass: bool,
    pub entries: Vec<MatchEntry>,
}

impl HypercoverReport {
    pub fn first_failure(&self) -> Option<&MatchEntry> {
        self.entries.iter().find(|e| !e.ok)
    }
}

/// Hypercover check: q_m surjective for m ≤ n−1, bijective at m = n, and —
/// as a consistency check — bijective for every n < m ≤ max level.
pub fn check_hypercover(f: &SimpLinMap, n: usize) -> Result<HypercoverReport, ModelError> {
    let l = f.max_level();
    if l < n + 2 {
        return Err(ModelError::InsufficientLevels { have: l, need: n + 2 });
    }
    let ms: Vec<usize> = (0..=l).collect();
    let entries_res: Vec<Result<MatchEntry, ModelError>> = par::map_slice(&ms, |&m| {
        let (q, rel) = matching_map(f, m)?;
        let rank = q.rank();
        let surjective = rank == rel.dim;
        let bijective = surjective && rel.dim == f.source.dim(m);
        let (requirement, ok) = if m >= n {
            ("bijective".to_string(), bijective)
        } else {
            ("surjective".to_string(), surjective)
        };
        Ok(MatchEntry {
            m,
            surjective,
            bijective,
            requirement,
            ok,
        })
    });
    let mut entries = Vec::with_capacity(entries_res.len());
    for e in entries_res {
        entries.push(e?);
    }
    let pass = entries.iter().all(|e| e.ok);
    Ok(HypercoverReport { n, pass, entries })
}

/// Kan fibration check via relative horn maps
/// X_m → Hom(Λ^m_j, X) ×_{Hom(Λ^m_j, Y)} Y_m: surjective for all m ≥ 1;
/// with `n = Some(n)` additionally bijective for m ≥ n (the Lie n-groupoid
/// fibration variant).
pub fn check_kan_fibration(
    f: &SimpLinMap,
    n: Option<usize>,
) -> Result<KanMatrixReport, ModelError> {
    let l = f.max_level();
    let pairs: Vec<(usize, usize)> =
        (1..=l).flat_map(|m| (0..=m).map(move |j| (m, j))).collect();
    let entries_res: Vec<Result<KanEntry, ModelError>> = par::map_slice(&pairs, |&(m, j)| {
        let shape = ssets::horn(m, j).map_err(|e| ModelError::Precondition(e.to_string()))?;
        let rel = relative_hom(&shape, f, m)?;
        let p = comparison_map(&rel, f, m)?;
        let rank = p.rank();
        Ok(KanEntry {
            m,
            j,
            surjective: rank == rel.dim,
            bijective: rank == rel.dim && rel.dim == f.source.dim(m),
            need_bijective: n.is_some_and(|n| m >= n),
        })
    });
    let mut entries = Vec::with_capacity(entries_res.len());
    for e in entries_res {
        entries.push(e?);
    }
    let pass = entries.iter().all(|e| e.surjective && (!e.need_bijective || e.bijective));
    Ok(KanMatrixReport {
        n: n.unwrap_or(0),
        pass,
        entries,
    })
}

/// Monotone surjections [n] ↠ [k] for all k, ordered by (k, lexicographic
/// jump positions). These index the Dold–Kan summands.
fn monotone_surjections(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for k in 0..=n {
        let mut positions = Vec::new();
        gen_jump_sets(n, k, 1, &mut positions, &mut out);
    }
    out
}

fn gen_jump_sets(
    n: usize,
    k: usize,
    start: usize,
    acc: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if acc.len() == k {
        let mut vals = vec![0usize; n + 1];
        let mut v = 0usize;
        for t in 1..=n {
            if acc.contains(&t) {
                v += 1;
            }
            vals[t] = v;
        }
        out.push(vals);
        return;
    }
    for p in start..=n {
        acc.push(p);
        gen_jump_sets(n, k, p + 1, acc, out);
        acc.pop();
    }
}

fn epi_mono_factor(vals: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut image: Vec<usize> = vals.to_vec();
    image.dedup();
    let epi: Vec<usize> =
        vals.iter().map(|v| image.iter().position(|w| w == v).unwrap()).collect();
    (epi, image)
}

/// Dold–Kan construction: X_n = ⊕_{η: [n]↠[k]} C_k with the standard
/// structure maps. The normalized Moore complex of the output equals C
/// exactly (see [`moore_normalize`]).
pub fn dold_kan(c: &ChainComplexQ, up_to: usize) -> Result<LinSimpSpace, ModelError> {
    if c.lo != 0 || c.orientation != Orientation::Chain {
        return Err(ModelError::Precondition(
            "Dold-Kan input must be a chain complex concentrated in degrees ≥ 0".into(),
        ));
    }
    let cdim = |k: usize| -> usize { c.dims.get(k).copied().unwrap_or(0) };
    // Twisted differential (−1)^k ∂_k; the twist makes the Moore complex with
    // the (−1)^l d_l sign convention reproduce C on the nose.
    let twisted = |k: usize| -> RatMatrix {
        debug_assert!(k >= 1 && k < c.dims.len());
        let d = &c.maps[k - 1];
        if k % 2 == 0 {
            d.clone()
        } else {
            d.neg()
        }
    };
    let summands: Vec<Vec<Vec<usize>>> = (0..=up_to).map(monotone_surjections).collect();
    let layouts: Vec<(Vec<usize>, usize)> = (0..=up_to)
        .map(|n| {
            let mut offsets = Vec::new();
            let mut t = 0usize;
            for eta in &summands[n] {
                offsets.push(t);
                t += cdim(*eta.iter().max().unwrap());
            }
            (offsets, t)
        })
        .collect();
    let dims: Vec<usize> = layouts.iter().map(|(_, t)| *t).collect();

    // Structure matrix Γ(α) : X_n → X_m for monotone α : [m] → [n].
    let gamma = |alpha: &[usize], n: usize, m: usize| -> RatMatrix {
        let mut out = RatMatrix::zeros(dims[m], dims[n]);
        for (si, eta) in summands[n].iter().enumerate() {
            let k = *eta.iter().max().unwrap();
            if cdim(k) == 0 {
                continue;
            }
            let composite: Vec<usize> = alpha.iter().map(|&t| eta[t]).collect();
            let (epi, image) = epi_mono_factor(&composite);
            let q = image.len() - 1;
            let block: Option<RatMatrix> = if q == k {
                Some(RatMatrix::identity(cdim(k)))
            } else if q + 1 == k && image == (0..k).collect::<Vec<_>>() {
                Some(twisted(k))
            } else {
                None
            };
            if let Some(b) = block {
                if b.rows() == 0 {
                    continue;
                }
                let ti = summands[m].iter().position(|e| *e == epi).expect("target summand");
                let r0 = layouts[m].0[ti];
                let c0 = layouts[n].0[si];
                for r in 0..b.rows() {
                    for cc in 0..b.cols() {
                        if !b.at(r, cc).is_zero() {
                            out.set(r0 + r, c0 + cc, b.at(r, cc).clone());
                        }
                    }
                }
            }
        }
        out
    };

    let mut face: Vec<Vec<RatMatrix>> = vec![Vec::new()];
    for n in 1..=up_to {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let alpha: Vec<usize> = (0..n).map(|t| if t < i { t } else { t + 1 }).collect();
            per_i.push(gamma(&alpha, n, n - 1));
        }
        face.push(per_i);
    }
    let mut degen: Vec<Vec<RatMatrix>> = Vec::new();
    for n in 0..up_to {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let alpha: Vec<usize> = (0..=n + 1).map(|t| if t <= i { t } else { t - 1 }).collect();
            per_i.push(gamma(&alpha, n, n + 1));
        }
        degen.push(per_i);
    }
    degen.push(Vec::new());
    LinSimpSpace::new(dims, face, degen)
}

/// The simplicial map Γ(φ) induced by a chain map φ : C → C′ between
/// Dold–Kan inputs: levelwise block-diagonal over the shared summand
/// indexing, with block φ_k on each [n]↠[k] summand. Returns the two models
/// and the map.
pub fn dold_kan_map(
    c_src: &ChainComplexQ,
    c_tgt: &ChainComplexQ,
    per_degree: &[RatMatrix],
    up_to: usize,
) -> Result<(LinSimpSpace, LinSimpSpace, SimpLinMap), ModelError> {
    let sdim = |k: usize| c_src.dims.get(k).copied().unwrap_or(0);
    let tdim = |k: usize| c_tgt.dims.get(k).copied().unwrap_or(0);
    // chain-map precondition: φ_{k−1} ∂ = ∂′ φ_k
    for k in 1..c_src.dims.len().min(c_tgt.dims.len()) {
        let lhs = per_degree[k - 1].mul(&c_src.maps[k - 1]);
        let rhs = c_tgt.maps[k - 1].mul(&per_degree[k]);
        if lhs != rhs {
            return Err(ModelError::Precondition(format!(
                "per-degree maps are not a chain map at degree {k}"
            )));
        }
    }
    let x = dold_kan(c_src, up_to)?;
    let y = dold_kan(c_tgt, up_to)?;
    let mut levels = Vec::with_capacity(up_to + 1);
    for n in 0..=up_to {
        let etas = monotone_surjections(n);
        let mut src_off = Vec::new();
        let mut tgt_off = Vec::new();
        let mut st = 0usize;
        let mut tt = 0usize;
        for eta in &etas {
            let k = *eta.iter().max().unwrap();
            src_off.push(st);
            tgt_off.push(tt);
            st += sdim(k);
            tt += tdim(k);
        }
        let mut mat = RatMatrix::zeros(y.dim(n), x.dim(n));
        for (si, eta) in etas.iter().enumerate() {
            let k = *eta.iter().max().unwrap();
            if sdim(k) == 0 || tdim(k) == 0 {
                continue;
            }
            let block = per_degree
                .get(k)
                .cloned()
                .unwrap_or_else(|| RatMatrix::zeros(tdim(k), sdim(k)));
            for r in 0..block.rows() {
                for c in 0..block.cols() {
                    let v = block.at(r, c);
                    if !v.is_zero() {
                        mat.set(tgt_off[si] + r, src_off[si] + c, v.clone());
                    }
                }
            }
        }
        levels.push(mat);
    }
    let f = SimpLinMap::new(x.clone(), y.clone(), levels)?;
    Ok((x, y, f))
}

/// Normalized Moore complex N_l = ∩_{i<l} ker d_i with differential
/// (−1)^l d_l, together with the inclusion matrices N_l ↪ X_l.
pub fn moore_normalize(x: &LinSimpSpace) -> Result<(ChainComplexQ, Vec<RatMatrix>), ModelError> {
    let l = x.max_level();
    let mut inclusions: Vec<RatMatrix> = Vec::with_capacity(l + 1);
    inclusions.push(RatMatrix::identity(x.dim(0)));
    for m in 1..=l {
        let stacked = RatMatrix::vstack_all(
            x.dim(m),
            &(0..m).map(|i| x.face_mat(m, i).clone()).collect::<Vec<_>>(),
        );
        inclusions.push(stacked.kernel_basis());
    }
    let dims: Vec<usize> = inclusions.iter().map(|b| b.cols()).collect();
    let mut maps = Vec::with_capacity(l);
    for m in 1..=l {
        let top_face = x.face_mat(m, m).mul(&inclusions[m]);
        let signed = if m % 2 == 0 { top_face } else { top_face.neg() };
        maps.push(express_in_basis(&inclusions[m - 1], &signed)?);
    }
    let complex = ChainComplexQ::new(0, dims, maps, Orientation::Chain)?;
    Ok((complex, inclusions))
}

/// Levelwise fiber product U = V ×_X Z of maps f: V → X and g: Z → X, with
/// its two projections.
pub fn fiber_product(
    f: &SimpLinMap,
    g: &SimpLinMap,
) -> Result<(LinSimpSpace, SimpLinMap, SimpLinMap), ModelError> {
    if f.target != g.target {
        return Err(ModelError::LevelMismatch("fiber product needs a shared target".into()));
    }
    let l = f.max_level().min(g.max_level());
    let v = &f.source;
    let z = &g.source;
    let mut bases = Vec::with_capacity(l + 1);
    for m in 0..=l {
        bases.push(f.levels[m].hstack(&g.levels[m].neg()).kernel_basis());
    }
    let dims: Vec<usize> = bases.iter().map(|b| b.cols()).collect();
    let split = |m: usize| -> (RatMatrix, RatMatrix) {
        let b = &bases[m];
        let vd = v.dim(m);
        let zd = z.dim(m);
        let top = RatMatrix::from_fn(vd, b.cols(), |r, c| b.at(r, c).clone());
        let bot = RatMatrix::from_fn(zd, b.cols(), |r, c| b.at(vd + r, c).clone());
        (top, bot)
    };
    let mut face: Vec<Vec<RatMatrix>> = vec![Vec::new()];
    for m in 1..=l {
        let mut per_i = Vec::new();
        for i in 0..=m {
            let (top, bot) = split(m);
            let mapped = v.face_mat(m, i).mul(&top).vstack(&z.face_mat(m, i).mul(&bot));
            per_i.push(express_in_basis(&bases[m - 1], &mapped)?);
        }
        face.push(per_i);
    }
    let mut degen: Vec<Vec<RatMatrix>> = Vec::new();
    for m in 0..l {
        let mut per_i = Vec::new();
        for i in 0..=m {
            let (top, bot) = split(m);
            let mapped = v.degen_mat(m, i).mul(&top).vstack(&z.degen_mat(m, i).mul(&bot));
            per_i.push(express_in_basis(&bases[m + 1], &mapped)?);
        }
        degen.push(per_i);
    }
    degen.push(Vec::new());
    let u = LinSimpSpace::new(dims, face, degen)?;
    let mut pv = Vec::with_capacity(l + 1);
    let mut pz = Vec::with_capacity(l + 1);
    for m in 0..=l {
        let (top, bot) = split(m);
        pv.push(top);
        pz.push(bot);
    }
    let proj_v = SimpLinMap::new(u.clone(), v.truncate(l), pv)?;
    let proj_z = SimpLinMap::new(u.clone(), z.truncate(l), pz)?;
    Ok((u, proj_v, proj_z))
}

/// One stage of the relative coskeleton tower:
/// (cosk_m(X/Y))_n = Hom(sk_m Δ^n, X) ×_{Hom(sk_m Δ^n, Y)} Y_n.
/// `m = −1` encodes cosk_{−1}(X/Y) ≅ Y.
#[derive(Debug, Clone)]
pub struct RelCoskeleton {
    pub m: i64,
    pub space: LinSimpSpace,
    pub rels: Vec<RelHomSpace>,
}

fn cosk_shape(m: i64, n: usize, store_extra_level: bool) -> SimplicialShape {
    if m < 0 {
        ssets::empty_shape(0)
    } else {
        // Nondegenerate cells live at levels ≤ min(m, n); one extra level of
        // degenerate cells is stored when a degeneracy structure map out of
        // this stage needs their evaluations.
        let top = n.min(m as usize) + usize::from(store_extra_level);
        ssets::skeleton_of_simplex(n, m as usize, top)
    }
}

/// Build cosk_m(X/Y) for f : X → Y with levels 0..=up_to.
pub fn relative_coskeleton(
    f: &SimpLinMap,
    m: i64,
    up_to: usize,
) -> Result<RelCoskeleton, ModelError> {
    if up_to > f.max_level() {
        return Err(ModelError::InsufficientLevels {
            have: f.max_level(),
            need: up_to,
        });
    }
    let y = &f.target;
    let rels_res: Vec<Result<RelHomSpace, ModelError>> = par::map_range(up_to + 1, |n| {
        relative_hom(&cosk_shape(m, n, n < up_to), f, n)
    });
    let mut rels = Vec::with_capacity(up_to + 1);
    for r in rels_res {
        rels.push(r?);
    }
    let dims: Vec<usize> = rels.iter().map(|r| r.dim).collect();
    // Structure maps by precomposition with α on the X side and the matching
    // structure matrix on the Y side.
    let structure = |n_src: usize,
                     n_tgt: usize,
                     alpha: &[usize],
                     ymat: &RatMatrix|
     -> Result<RatMatrix, ModelError> {
        let src = &rels[n_src];
        let tgt = &rels[n_tgt];
        let mut values = Vec::with_capacity(tgt.hom_x.maximal().len());
        for &(k, idx) in tgt.hom_x.maximal() {
            let sigma = ssets::decode_monotone(tgt.hom_x.shape.name(k, idx))
                .map_err(|e| ModelError::Parse(e.to_string()))?;
            let composite: Vec<usize> = sigma.iter().map(|&t| alpha[t]).collect();
            let name: String = composite
                .iter()
                .map(|v| char::from_digit(*v as u32, 10).unwrap())
                .collect();
            let v = src
                .eval_x_by_name(k, &name)
                .ok_or_else(|| ModelError::LevelMismatch(format!("missing simplex {name}")))?;
            values.push(v);
        }
        let ypart = ymat.mul(&src.eval_y());
        tgt.coords(&values, &ypart)
    };
    let mut face: Vec<Vec<RatMatrix>> = vec![Vec::new()];
    for n in 1..=up_to {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let alpha: Vec<usize> = (0..n).map(|t| if t < i { t } else { t + 1 }).collect();
            per_i.push(structure(n, n - 1, &alpha, y.face_mat(n, i))?);
        }
        face.push(per_i);
    }
    let mut degen: Vec<Vec<RatMatrix>> = Vec::new();
    for n in 0..up_to {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let alpha: Vec<usize> = (0..=n + 1).map(|t| if t <= i { t } else { t - 1 }).collect();
            per_i.push(structure(n, n + 1, &alpha, y.degen_mat(n, i))?);
        }
        degen.push(per_i);
    }
    degen.push(Vec::new());
    let space = LinSimpSpace::new(dims, face, degen)?;
    Ok(RelCoskeleton { m, space, rels })
}

/// Tower map cosk_m(X/Y) → cosk_{m−1}(X/Y): forget the values on
/// m-simplices, keep the Y component.
pub fn coskeleton_tower_map(
    upper: &RelCoskeleton,
    lower: &RelCoskeleton,
) -> Result<SimpLinMap, ModelError> {
    assert_eq!(upper.m - 1, lower.m);
    let up_to = upper.space.max_level().min(lower.space.max_level());
    let mut levels = Vec::with_capacity(up_to + 1);
    for n in 0..=up_to {
        let src = &upper.rels[n];
        let tgt = &lower.rels[n];
        let mut values = Vec::with_capacity(tgt.hom_x.maximal().len());
        for &(k, idx) in tgt.hom_x.maximal() {
            let name = tgt.hom_x.shape.name(k, idx);
            let v = src
                .eval_x_by_name(k, name)
                .ok_or_else(|| ModelError::LevelMismatch(format!("missing simplex {name}")))?;
            values.push(v);
        }
        levels.push(tgt.coords(&values, &src.eval_y())?);
    }
    SimpLinMap::new(
        upper.space.truncate(up_to),
        lower.space.truncate(up_to),
        levels,
    )
}

/// Canonical comparison X → cosk_m(X/Y): x ↦ (x|_{sk_m}, f x). Levelwise an
/// isomorphism as soon as m exceeds the groupoid level of the hypercover.
pub fn coskeleton_from_source(
    f: &SimpLinMap,
    cosk: &RelCoskeleton,
) -> Result<SimpLinMap, ModelError> {
    let up_to = cosk.space.max_level();
    let mut levels = Vec::with_capacity(up_to + 1);
    for n in 0..=up_to {
        levels.push(comparison_map(&cosk.rels[n], f, n)?);
    }
    SimpLinMap::new(f.source.truncate(up_to), cosk.space.clone(), levels)
}

/// Bisimplicial space Z_{i,j} = N_i(X_j / Y_j): the Cech fiber powers of X_j
/// over Y_j, realized as explicit subspaces of X_j^{i+1}.
#[derive(Debug, Clone)]
pub struct BisimpLinSpace {
    pub max_row: usize,
    pub max_col: usize,
    pub dims: Vec<Vec<usize>>,
    /// bases[i][j] : ((i+1)·dim X_j) × dims[i][j]
    pub bases: Vec<Vec<RatMatrix>>,
    /// vface[i][j][p] : Z_{i,j} → Z_{i−1,j} (drop coordinate p), i ≥ 1
    pub vface: Vec<Vec<Vec<RatMatrix>>>,
    /// vdegen[i][j][p] : Z_{i,j} → Z_{i+1,j} (repeat coordinate p), i < I
    pub vdegen: Vec<Vec<Vec<RatMatrix>>>,
    /// hface[i][j][q] : Z_{i,j} → Z_{i,j−1} (levelwise face of X), j ≥ 1
    pub hface: Vec<Vec<Vec<RatMatrix>>>,
    /// hdegen[i][j][q] : Z_{i,j} → Z_{i,j+1}, j < J
    pub hdegen: Vec<Vec<Vec<RatMatrix>>>,
    /// augmentation Z_{0,j} = X_j → Y_j
    pub aug: Vec<RatMatrix>,
}

/// Build the Cech nerve of a levelwise-surjective simplicial map, with Cech
/// direction 0..=max_row and model levels 0..=max_col.
pub fn cech_nerve(
    f: &SimpLinMap,
    max_row: usize,
    max_col: usize,
) -> Result<BisimpLinSpace, ModelError> {
    if max_col > f.max_level() {
        return Err(ModelError::InsufficientLevels {
            have: f.max_level(),
            need: max_col,
        });
    }
    for j in 0..=max_col {
        if !is_surjective(&f.levels[j]) {
            return Err(ModelError::NotSurjective { level: j });
        }
    }
    let x = &f.source;
    let mut bases: Vec<Vec<RatMatrix>> = Vec::with_capacity(max_row + 1);
    for i in 0..=max_row {
        let mut row = Vec::with_capacity(max_col + 1);
        for j in 0..=max_col {
            let xd = x.dim(j);
            if i == 0 {
                row.push(RatMatrix::identity(xd));
                continue;
            }
            let yd = f.target.dim(j);
            // rows t = 0..i: f(x_t) − f(x_{t+1}) = 0
            let mut cons = RatMatrix::zeros(i * yd, (i + 1) * xd);
            for t in 0..i {
                for r in 0..yd {
                    for c in 0..xd {
                        let v = f.levels[j].at(r, c);
                        if !v.is_zero() {
                            cons.set(t * yd + r, t * xd + c, v.clone());
                            cons.set(t * yd + r, (t + 1) * xd + c, -v.clone());
                        }
                    }
                }
            }
            row.push(cons.kernel_basis());
        }
        bases.push(row);
    }
    let dims: Vec<Vec<usize>> =
        bases.iter().map(|row| row.iter().map(|b| b.cols()).collect()).collect();
    let drop_coord = |i: usize, j: usize, p: usize| -> RatMatrix {
        let xd = x.dim(j);
        RatMatrix::from_fn(i * xd, (i + 1) * xd, |r, c| {
            let (rb, ri) = (r / xd.max(1), r % xd.max(1));
            let src_block = if rb < p { rb } else { rb + 1 };
            if xd > 0 && c == src_block * xd + ri {
                Rat::one()
            } else {
                Rat::zero()
            }
        })
    };
    let repeat_coord = |i: usize, j: usize, p: usize| -> RatMatrix {
        let xd = x.dim(j);
        RatMatrix::from_fn((i + 2) * xd, (i + 1) * xd, |r, c| {
            let (rb, ri) = (r / xd.max(1), r % xd.max(1));
            let src_block = if rb <= p {
                rb
            } else if rb == p + 1 {
                p
            } else {
                rb - 1
            };
            if xd > 0 && c == src_block * xd + ri {
                Rat::one()
            } else {
                Rat::zero()
            }
        })
    };
    let blockwise = |i: usize, mat: &RatMatrix| -> RatMatrix {
        RatMatrix::from_fn((i + 1) * mat.rows(), (i + 1) * mat.cols(), |r, c| {
            let rb = r / mat.rows().max(1);
            let ri = r % mat.rows().max(1);
            let cb = c / mat.cols().max(1);
            let ci = c % mat.cols().max(1);
            if rb == cb && mat.rows() > 0 && mat.cols() > 0 {
                mat.at(ri, ci).clone()
            } else {
                Rat::zero()
            }
        })
    };
    let mut vface = vec![vec![Vec::new(); max_col + 1]; max_row + 1];
    let mut vdegen = vec![vec![Vec::new(); max_col + 1]; max_row + 1];
    let mut hface = vec![vec![Vec::new(); max_col + 1]; max_row + 1];
    let mut hdegen = vec![vec![Vec::new(); max_col + 1]; max_row + 1];
    for i in 0..=max_row {
        for j in 0..=max_col {
            if i >= 1 {
                for p in 0..=i {
                    let amb = drop_coord(i, j, p).mul(&bases[i][j]);
                    vface[i][j].push(express_in_basis(&bases[i - 1][j], &amb)?);
                }
            }
            if i < max_row {
                for p in 0..=i {
                    let amb = repeat_coord(i, j, p).mul(&bases[i][j]);
                    vdegen[i][j].push(express_in_basis(&bases[i + 1][j], &amb)?);
                }
            }
            if j >= 1 {
                for q in 0..=j {
                    let amb = blockwise(i, x.face_mat(j, q)).mul(&bases[i][j]);
                    hface[i][j].push(express_in_basis(&bases[i][j - 1], &amb)?);
                }
            }
            if j < max_col {
                for q in 0..=j {
                    let amb = blockwise(i, x.degen_mat(j, q)).mul(&bases[i][j]);
                    hdegen[i][j].push(express_in_basis(&bases[i][j + 1], &amb)?);
                }
            }
        }
    }
    let aug: Vec<RatMatrix> = (0..=max_col).map(|j| f.levels[j].clone()).collect();
    let b = BisimpLinSpace {
        max_row,
        max_col,
        dims,
        bases,
        vface,
        vdegen,
        hface,
        hdegen,
        aug,
    };
    b.validate()?;
    Ok(b)
}

impl BisimpLinSpace {
    /// Verify both directions' simplicial identities and the commutation of
    /// vertical with horizontal structure maps.
    pub fn validate(&self) -> Result<(), ModelError> {
        for j in 0..=self.max_col {
            let dims: Vec<usize> = (0..=self.max_row).map(|i| self.dims[i][j]).collect();
            let face: Vec<Vec<RatMatrix>> =
                (0..=self.max_row).map(|i| self.vface[i][j].clone()).collect();
            let mut degen: Vec<Vec<RatMatrix>> =
                (0..self.max_row).map(|i| self.vdegen[i][j].clone()).collect();
            degen.push(Vec::new());
            LinSimpSpace::new(dims, face, degen)
                .map_err(|e| ModelError::Identity(format!("vertical column {j}: {e}")))?;
        }
        for i in 0..=self.max_row {
            let dims: Vec<usize> = (0..=self.max_col).map(|j| self.dims[i][j]).collect();
            let face: Vec<Vec<RatMatrix>> =
                (0..=self.max_col).map(|j| self.hface[i][j].clone()).collect();
            let mut degen: Vec<Vec<RatMatrix>> =
                (0..self.max_col).map(|j| self.hdegen[i][j].clone()).collect();
            degen.push(Vec::new());
            LinSimpSpace::new(dims, face, degen)
                .map_err(|e| ModelError::Identity(format!("horizontal row {i}: {e}")))?;
        }
        for i in 1..=self.max_row {
            for j in 1..=self.max_col {
                for p in 0..=i {
                    for q in 0..=j {
                        let a = self.vface[i][j - 1][p].mul(&self.hface[i][j][q]);
                        let b = self.hface[i - 1][j][q].mul(&self.vface[i][j][p]);
                        if a != b {
                            return Err(ModelError::Identity(format!(
                                "vface/hface commute at ({i},{j},{p},{q})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The diagonal simplicial space Ẑ_l = Z_{l,l} with d̂_i = d^v_i ∘ d^h_i
    /// and ŝ_i = s^v_i ∘ s^h_i.
    pub fn diagonal(&self) -> Result<LinSimpSpace, ModelError> {
        let l = self.max_row.min(self.max_col);
        let dims: Vec<usize> = (0..=l).map(|t| self.dims[t][t]).collect();
        let mut face: Vec<Vec<RatMatrix>> = vec![Vec::new()];
        for t in 1..=l {
            let mut per_i = Vec::new();
            for i in 0..=t {
                per_i.push(self.vface[t][t - 1][i].mul(&self.hface[t][t][i]));
            }
            face.push(per_i);
        }
        let mut degen: Vec<Vec<RatMatrix>> = Vec::new();
        for t in 0..l {
            let mut per_i = Vec::new();
            for i in 0..=t {
                per_i.push(self.vdegen[t][t + 1][i].mul(&self.hdegen[t][t][i]));
            }
            degen.push(per_i);
        }
        degen.push(Vec::new());
        LinSimpSpace::new(dims, face, degen)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelWire {
    levels: Vec<usize>,
    face: BTreeMap<String, Vec<Vec<String>>>,
    degen: BTreeMap<String, Vec<Vec<String>>>,
}

fn matrix_to_wire(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| rat_to_string(m.at(r, c))).collect())
        .collect()
}

pub(crate) fn matrix_from_wire(
    rows: usize,
    cols: usize,
    wire: &[Vec<String>],
) -> Result<RatMatrix, ModelError> {
    if wire.len() != rows || wire.iter().any(|r| r.len() != cols) {
        return Err(ModelError::Parse(format!(
            "matrix should be {rows}x{cols}, got {}x{}",
            wire.len(),
            wire.first().map_or(0, |r| r.len())
        )));
    }
    let mut m = RatMatrix::zeros(rows, cols);
    for (r, row) in wire.iter().enumerate() {
        for (c, s) in row.iter().enumerate() {
            m.set(r, c, rat_from_string(s).map_err(|e| ModelError::Parse(e.to_string()))?);
        }
    }
    Ok(m)
}

/// Model file JSON: {"levels": [...], "face": {"m,i": [[rat]]}, "degen": …}.
pub fn model_to_json(x: &LinSimpSpace) -> String {
    let mut face = BTreeMap::new();
    for m in 1..=x.max_level() {
        for i in 0..=m {
            face.insert(format!("{m},{i}"), matrix_to_wire(x.face_mat(m, i)));
        }
    }
    let mut degen = BTreeMap::new();
    for m in 0..x.max_level() {
        for i in 0..=m {
            degen.insert(format!("{m},{i}"), matrix_to_wire(x.degen_mat(m, i)));
        }
    }
    serde_json::to_string_pretty(&ModelWire {
        levels: x.dims.clone(),
        face,
        degen,
    })
    .expect("model serialization")
}

pub fn model_from_json(text: &str) -> Result<LinSimpSpace, ModelError> {
    let wire: ModelWire =
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    let dims = wire.levels;
    if dims.is_empty() {
        return Err(ModelError::Parse("model needs at least level 0".into()));
    }
    let l = dims.len() - 1;
    let mut face: Vec<Vec<RatMatrix>> = vec![Vec::new()];
    for m in 1..=l {
        let mut per_i = Vec::new();
        for i in 0..=m {
            let key = format!("{m},{i}");
            let w = wire
                .face
                .get(&key)
                .ok_or_else(|| ModelError::Parse(format!("missing face {key}")))?;
            per_i.push(matrix_from_wire(dims[m - 1], dims[m], w)?);
        }
        face.push(per_i);
    }
    let mut degen: Vec<Vec<RatMatrix>> = Vec::new();
    for m in 0..l {
        let mut per_i = Vec::new();
        for i in 0..=m {
            let key = format!("{m},{i}");
            let w = wire
                .degen
                .get(&key)
                .ok_or_else(|| ModelError::Parse(format!("missing degeneracy {key}")))?;
            per_i.push(matrix_from_wire(dims[m + 1], dims[m], w)?);
        }
        degen.push(per_i);
    }
    degen.push(Vec::new());
    LinSimpSpace::new(dims, face, degen)
}

/// Map file JSON; model references are paths resolved by the caller.
#[derive(Serialize, Deserialize)]
pub struct MapWire {
    pub source: String,
    pub target: String,
    pub level_mats: BTreeMap<String, Vec<Vec<String>>>,
}

pub fn map_to_json(f: &SimpLinMap, source: &str, target: &str) -> String {
    let mut level_mats = BTreeMap::new();
    for (m, mat) in f.levels.iter().enumerate() {
        level_mats.insert(m.to_string(), matrix_to_wire(mat));
    }
    serde_json::to_string_pretty(&MapWire {
        source: source.to_string(),
        target: target.to_string(),
        level_mats,
    })
    .expect("map serialization")
}

pub fn map_from_wire(
    wire: &MapWire,
    source: LinSimpSpace,
    target: LinSimpSpace,
) -> Result<SimpLinMap, ModelError> {
    let l = source.max_level().min(target.max_level());
    let mut levels = Vec::with_capacity(l + 1);
    for m in 0..=l {
        let w = wire
            .level_mats
            .get(&m.to_string())
            .ok_or_else(|| ModelError::Parse(format!("missing level {m} matrix")))?;
        levels.push(matrix_from_wire(target.dim(m), source.dim(m), w)?);
    }
    SimpLinMap::new(source, target, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;

    fn two_term(d: RatMatrix) -> ChainComplexQ {
        ChainComplexQ::new(
            0,
            vec![d.rows(), d.cols()],
            vec![d],
            Orientation::Chain,
        )
        .unwrap()
    }

    #[test]
    fn dold_kan_dims_count_surjections() {
        // C = (Q, Q; ∂ = 0) gives dims 1, 2, 3, 4, …
        let c = two_term(RatMatrix::zeros(1, 1));
        let x = dold_kan(&c, 4).unwrap();
        assert_eq!(x.dims(), &[1, 2, 3, 4, 5]);
        // C concentrated in degree 0 gives the constant space.
        let c0 = ChainComplexQ::new(0, vec![2], vec![], Orientation::Chain).unwrap();
        let x0 = dold_kan(&c0, 3).unwrap();
        assert_eq!(x0.dims(), &[2, 2, 2, 2]);
        for m in 1..=3 {
            for i in 0..=m {
                assert_eq!(*x0.face_mat(m, i), RatMatrix::identity(2));
            }
        }
    }

    #[test]
    fn moore_round_trip_exact() {
        for d in [
            RatMatrix::zeros(1, 1),
            RatMatrix::identity(1),
            RatMatrix::from_i64(&[&[2, 1], &[0, 0]]),
            RatMatrix::from_i64(&[&[1, 0, 3]]),
        ] {
            let c = two_term(d);
            let x = dold_kan(&c, 4).unwrap();
            let (n, _) = moore_normalize(&x).unwrap();
            assert_eq!(&n.dims[..2], &c.dims[..]);
            assert!(n.dims[2..].iter().all(|&d| d == 0));
            assert_eq!(n.maps[0], c.maps[0]);
        }
    }

    #[test]
    fn moore_round_trip_three_term() {
        // 0 → Q →incl Q² →proj Q → 0 with ∂∘∂ = 0
        let d1 = RatMatrix::from_i64(&[&[1, 0]]);
        let d2 = RatMatrix::from_i64(&[&[0], &[1]]);
        let c = ChainComplexQ::new(0, vec![1, 2, 1], vec![d1, d2], Orientation::Chain).unwrap();
        let x = dold_kan(&c, 4).unwrap();
        let (n, _) = moore_normalize(&x).unwrap();
        assert_eq!(&n.dims[..3], &c.dims[..]);
        assert_eq!(n.maps[0], c.maps[0]);
        assert_eq!(n.maps[1], c.maps[1]);
    }

    #[test]
    fn hom_over_simplex_is_yoneda() {
        let c = two_term(RatMatrix::zeros(1, 1));
        let x = dold_kan(&c, 3).unwrap();
        for m in 0..=2usize {
            let shape = ssets::standard_simplex(m, m);
            let hs = hom_from_shape(&shape, &x).unwrap();
            assert_eq!(hs.dim, x.dim(m), "Hom(Δ^{m}, X) ≅ X_{m}");
        }
    }

    #[test]
    fn hom_over_boundary_of_edge() {
        let c = two_term(RatMatrix::zeros(2, 1));
        let x = dold_kan(&c, 2).unwrap();
        let hs = hom_from_shape(&ssets::boundary(1), &x).unwrap();
        assert_eq!(hs.dim, 2 * x.dim(0));
    }

    #[test]
    fn hom_over_inner_horn_is_fiber_product() {
        // X = DK(Q →0 Q): Hom(Λ²₁, X) = X₁ ×_{X₀} X₁ has dim 2+2−1 = 3.
        let c = two_term(RatMatrix::zeros(1, 1));
        let x = dold_kan(&c, 2).unwrap();
        let shape = ssets::horn(2, 1).unwrap();
        let hs = hom_from_shape(&shape, &x).unwrap();
        assert_eq!(hs.dim, 3);
    }

    #[test]
    fn constant_space_horn_maps_are_isos() {
        let c0 = ChainComplexQ::new(0, vec![3], vec![], Orientation::Chain).unwrap();
        let v = dold_kan(&c0, 3).unwrap();
        for (m, j) in [(1usize, 0usize), (1, 1), (2, 0), (2, 1), (2, 2)] {
            let (p, hs) = horn_map(&v, m, j).unwrap();
            assert!(is_bijective(&p), "p^{m}_{j} on constant space");
            assert_eq!(hs.dim, 3);
        }
    }

    #[test]
    fn dk_models_are_lie_n_groupoids() {
        // degree ≤ 1 complex: a Lie 1-groupoid, and level-2 horn maps are
        // bijective.
        let c = two_term(RatMatrix::from_i64(&[&[1], &[0]]));
        let x = dold_kan(&c, 3).unwrap();
        let report = check_lie_n_groupoid(&x, 1).unwrap();
        assert!(report.pass, "{:?}", report.first_failure());
        // a complex with C₂ ≠ 0 fails the n = 1 strictness check
        let d2 = RatMatrix::zeros(1, 1);
        let c2 = ChainComplexQ::new(
            0,
            vec![1, 1, 1],
            vec![RatMatrix::zeros(1, 1), d2],
            Orientation::Chain,
        )
        .unwrap();
        let x2 = dold_kan(&c2, 4).unwrap();
        let report2 = check_lie_n_groupoid(&x2, 1).unwrap();
        assert!(!report2.pass);
        let f = report2.first_failure().unwrap();
        assert!(f.m >= 2);
    }

    #[test]
    fn identity_map_is_hypercover_any_n() {
        let c = two_term(RatMatrix::zeros(1, 1));
        let x = dold_kan(&c, 3).unwrap();
        let id = SimpLinMap::identity(&x);
        for n in 0..=1 {
            let r = check_hypercover(&id, n).unwrap();
            assert!(r.pass, "identity hypercover n={n}: {:?}", r.first_failure());
        }
        assert!(check_kan_fibration(&id, Some(1)).unwrap().pass);
    }

    #[test]
    fn q0_is_f0() {
        let c = two_term(RatMatrix::zeros(1, 1));
        let x = dold_kan(&c, 2).unwrap();
        let f = SimpLinMap::identity(&x);
        let (q, rel) = matching_map(&f, 0).unwrap();
        assert_eq!(rel.dim, x.dim(0));
        assert!(is_bijective(&q));
    }

    #[test]
    fn non_surjective_f0_fails_hypercover() {
        // zero map Q → Q at level 0 on constant spaces
        let c0 = ChainComplexQ::new(0, vec![1], vec![], Orientation::Chain).unwrap();
        let x = dold_kan(&c0, 3).unwrap();
        let f = SimpLinMap::new(
            x.clone(),
            x.clone(),
            (0..=3).map(|m| RatMatrix::zeros(x.dim(m), x.dim(m))).collect(),
        )
        .unwrap();
        let r = check_hypercover(&f, 1).unwrap();
        assert!(!r.pass);
        assert_eq!(r.first_failure().unwrap().m, 0);
    }

    #[test]
    fn mutated_model_fails_validation() {
        let c = two_term(RatMatrix::zeros(1, 1));
        let mut x = dold_kan(&c, 3).unwrap();
        x.perturb_face_entry(1, 0, 0, 0, rat(1));
        assert!(x.validate().is_err());
    }

    #[test]
    fn fiber_product_with_identity_is_source() {
        let c = two_term(RatMatrix::from_i64(&[&[1], &[1]]));
        let x = dold_kan(&c, 3).unwrap();
        let f = SimpLinMap::identity(&x);
        let g = SimpLinMap::identity(&x);
        let (u, pv, pz) = fiber_product(&f, &g).unwrap();
        for m in 0..=3 {
            assert_eq!(u.dim(m), x.dim(m));
            assert!(is_bijective(pv.level(m)));
            assert!(is_bijective(pz.level(m)));
        }
    }

    #[test]
    fn model_json_round_trip() {
        let c = two_term(RatMatrix::from_i64(&[&[2], &[3]]));
        let x = dold_kan(&c, 2).unwrap();
        let text = model_to_json(&x);
        let back = model_from_json(&text).unwrap();
        assert_eq!(x, back);
        assert_eq!(text, model_to_json(&back));
    }
}
