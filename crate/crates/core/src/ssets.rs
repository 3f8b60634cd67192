//! Finite simplicial sets.
//!
//! Shapes are stored truncated at a chosen top level, with explicit
//! degenerate simplices so face/degeneracy lookups stay uniform. Simplices
//! carry canonical names: sub-shapes of a standard simplex use the digit
//! string of the monotone map, nerves use chains of arrow names, so equality
//! is syntactic. The module provides the standard shapes (simplices, horns,
//! boundaries, skeleta), nerves of finite groupoids, simplicial-identity
//! validation, and set-level Kan condition checks with witnesses.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeError {
    /// A simplicial identity fails; carries a human-readable location.
    IdentityViolation(String),
    /// Degeneracy bookkeeping is inconsistent with the face tables.
    DegeneracyFlag(String),
    HornIndexOutOfRange { m: usize, j: usize },
    /// Groupoid axioms fail.
    InvalidGroupoid(String),
    /// A shape refers to more levels than stored.
    InsufficientLevels { have: usize, need: usize },
    Parse(String),
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeError::IdentityViolation(s) => write!(f, "simplicial identity fails: {s}"),
            ShapeError::DegeneracyFlag(s) => write!(f, "degeneracy bookkeeping broken: {s}"),
            ShapeError::HornIndexOutOfRange { m, j } => {
                write!(f, "horn index j={j} out of range for m={m}")
            }
            ShapeError::InvalidGroupoid(s) => write!(f, "invalid groupoid: {s}"),
            ShapeError::InsufficientLevels { have, need } => {
                write!(f, "shape stores {have} levels but {need} are needed")
            }
            ShapeError::Parse(s) => write!(f, "cannot parse shape: {s}"),
        }
    }
}

impl std::error::Error for ShapeError {}

/// Finite simplicial set truncated at `max_level`.
///
/// `faces[m][i][x]` is the index of d_i of simplex `x` at level m (present
/// for 1 ≤ m ≤ max_level, 0 ≤ i ≤ m); `degens[m][i][x]` the index of s_i x
/// at level m (present for m < max_level).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialShape {
    pub max_level: usize,
    names: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<usize>>>,
    degens: Vec<Vec<Vec<usize>>>,
    nondeg: Vec<Vec<bool>>,
}

impl SimplicialShape {
    pub fn level_size(&self, m: usize) -> usize {
        self.names.get(m).map_or(0, |v| v.len())
    }

    pub fn name(&self, m: usize, idx: usize) -> &str {
        &self.names[m][idx]
    }

    pub fn index_of(&self, m: usize, name: &str) -> Option<usize> {
        self.names.get(m)?.iter().position(|n| n == name)
    }

    pub fn face(&self, m: usize, i: usize, idx: usize) -> usize {
        self.faces[m][i][idx]
    }

    pub fn degen(&self, m: usize, i: usize, idx: usize) -> usize {
        self.degens[m][i][idx]
    }

    pub fn is_nondegenerate(&self, m: usize, idx: usize) -> bool {
        self.nondeg[m][idx]
    }

    /// Nondegenerate simplices as (level, index), level ascending then index.
    pub fn nondegenerate(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for m in 0..=self.max_level {
            for idx in 0..self.level_size(m) {
                if self.nondeg[m][idx] {
                    out.push((m, idx));
                }
            }
        }
        out
    }

    pub fn count_nondegenerate(&self, m: usize) -> usize {
        (0..self.level_size(m)).filter(|&i| self.nondeg[m][i]).collect::<Vec<_>>().len()
    }

    /// Canonical core of a simplex: repeatedly strip the lowest applicable
    /// degeneracy. Returns (level, index, degeneracy chain) where the chain
    /// lists the s_i applied to the core from the inside out, i.e.
    /// x = s_{c_k} … s_{c_1} core with the chain stored [c_1, …, c_k].
    pub fn core_of(&self, m: usize, idx: usize) -> (usize, usize, Vec<usize>) {
        let mut level = m;
        let mut cur = idx;
        let mut chain = Vec::new();
        while level >= 1 && !self.nondeg[level][cur] {
            let strip = (0..level).find(|&i| {
                let below = self.faces[level][i][cur];
                self.degens[level - 1][i][below] == cur
            });
            match strip {
                Some(i) => {
                    chain.push(i);
                    cur = self.faces[level][i][cur];
                    level -= 1;
                }
                None => break,
            }
        }
        chain.reverse();
        (level, cur, chain)
    }

    /// Verify the five simplicial identities for every composable pair plus
    /// the degeneracy flags.
    pub fn validate(&self) -> Result<(), ShapeError> {
        let l = self.max_level;
        let fail = |s: String| Err(ShapeError::IdentityViolation(s));
        // (1) d_i d_j = d_{j-1} d_i, i < j
        for m in 2..=l {
            for x in 0..self.level_size(m) {
                for j in 1..=m {
                    for i in 0..j {
                        let a = self.faces[m - 1][i][self.faces[m][j][x]];
                        let b = self.faces[m - 1][j - 1][self.faces[m][i][x]];
                        if a != b {
                            return fail(format!("d_{i} d_{j} at level {m} simplex {x}"));
                        }
                    }
                }
            }
        }
        // (2) s_i s_j = s_{j+1} s_i, i <= j (maps level m-1 to m+1)
        for m in 1..l {
            for x in 0..self.level_size(m - 1) {
                for j in 0..m {
                    for i in 0..=j {
                        let a = self.degens[m][i][self.degens[m - 1][j][x]];
                        let b = self.degens[m][j + 1][self.degens[m - 1][i][x]];
                        if a != b {
                            return fail(format!("s_{i} s_{j} at level {} simplex {x}", m - 1));
                        }
                    }
                }
            }
        }
        for m in 1..=l.saturating_sub(1) {
            // maps level m-1 → m → m-1 via s then d at level m... identities
            // (3)-(5) relate d_i: level m+1 → m with s_j: level m → m+1.
            let n = m + 1;
            if n > l {
                continue;
            }
            for x in 0..self.level_size(n - 1) {
                for j in 0..n {
                    let sx = self.degens[n - 1][j][x];
                    for i in 0..=n {
                        let lhs = self.faces[n][i][sx];
                        if i < j {
                            // (3) d_i s_j = s_{j-1} d_i
                            let rhs = self.degens[n - 2][j - 1][self.faces[n - 1][i][x]];
                            if lhs != rhs {
                                return fail(format!("d_{i} s_{j} (i<j) at level {}", n - 1));
                            }
                        } else if i == j || i == j + 1 {
                            // (5) d_j s_j = id = d_{j+1} s_j
                            if lhs != x {
                                return fail(format!("d_{i} s_{j} ≠ id at level {}", n - 1));
                            }
                        } else {
                            // (4) d_i s_j = s_j d_{i-1}, i > j+1
                            let rhs = self.degens[n - 2][j][self.faces[n - 1][i - 1][x]];
                            if lhs != rhs {
                                return fail(format!("d_{i} s_{j} (i>j+1) at level {}", n - 1));
                            }
                        }
                    }
                }
            }
        }
        // Degeneracy flags: x is degenerate iff s_i(d_i x) = x for some i.
        for m in 1..=l {
            for x in 0..self.level_size(m) {
                let mut witnessed = false;
                for i in 0..m {
                    if self.degens[m - 1][i][self.faces[m][i][x]] == x {
                        witnessed = true;
                        break;
                    }
                }
                if witnessed == self.nondeg[m][x] {
                    return Err(ShapeError::DegeneracyFlag(format!(
                        "level {m} simplex {x} flag disagrees with structure"
                    )));
                }
                if !self.nondeg[m][x] {
                    let (cl, cx, _) = self.core_of(m, x);
                    if !self.nondeg[cl][cx] {
                        return Err(ShapeError::DegeneracyFlag(format!(
                            "level {m} simplex {x} has no nondegenerate core"
                        )));
                    }
                }
            }
        }
        for x in 0..self.level_size(0) {
            if !self.nondeg[0][x] {
                return Err(ShapeError::DegeneracyFlag(format!(
                    "level 0 simplex {x} flagged degenerate"
                )));
            }
        }
        Ok(())
    }

    /// Redirect one face pointer (mutation harness support).
    pub fn mutate_face(&mut self, m: usize, i: usize, idx: usize, new_target: usize) {
        self.faces[m][i][idx] = new_target;
    }

    /// Apply the structure map of an arbitrary monotone map `f : [k] → [m]`
    /// to a level-`m` simplex, by factoring into faces and degeneracies.
    pub fn apply_monotone(&self, m: usize, idx: usize, f: &[usize]) -> usize {
        debug_assert!(f.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(f.iter().all(|&v| v <= m));
        // Missing value → factor through a face.
        for a in (0..=m).rev() {
            if !f.contains(&a) {
                let below = self.faces[m][a][idx];
                let shifted: Vec<usize> =
                    f.iter().map(|&v| if v > a { v - 1 } else { v }).collect();
                return self.apply_monotone(m - 1, below, &shifted);
            }
        }
        // Surjective: collapse the first repeat through a degeneracy.
        for c in 0..f.len() - 1 {
            if f[c] == f[c + 1] {
                let mut shorter = f.to_vec();
                shorter.remove(c + 1);
                let y = self.apply_monotone(m, idx, &shorter);
                return self.degens[f.len() - 2][c][y];
            }
        }
        idx
    }
}

/// Decode a canonical digit-string name back into a monotone map. Only valid
/// for sub-shapes of a standard simplex.
pub fn decode_monotone(name: &str) -> Result<Vec<usize>, ShapeError> {
    name.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .ok_or_else(|| ShapeError::Parse(format!("non-digit simplex name {name:?}")))
        })
        .collect()
}

fn monotone_name(f: &[usize]) -> String {
    f.iter().map(|v| char::from_digit(*v as u32, 10).unwrap()).collect()
}

/// All monotone maps [k] → [m] in lexicographic order.
fn monotone_maps(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k + 1];
    loop {
        out.push(cur.clone());
        // lexicographic successor among monotone tuples
        let mut pos = k + 1;
        for i in (0..=k).rev() {
            if cur[i] < m {
                pos = i;
                break;
            }
        }
        if pos == k + 1 {
            break;
        }
        cur[pos] += 1;
        let v = cur[pos];
        for item in cur.iter_mut().skip(pos + 1) {
            *item = v;
        }
    }
    out
}

fn is_nondeg_map(f: &[usize]) -> bool {
    f.windows(2).all(|w| w[0] < w[1])
}

fn core_dim(f: &[usize]) -> usize {
    let mut d = 0;
    for w in f.windows(2) {
        if w[0] < w[1] {
            d += 1;
        }
    }
    d
}

/// Build the sub-shape of Δ^m (truncated at `up_to`) containing the monotone
/// maps selected by `keep`. The predicate must be closed under faces and
/// degeneracies.
fn delta_subshape(m: usize, up_to: usize, keep: impl Fn(&[usize]) -> bool) -> SimplicialShape {
    assert!(m <= 9, "digit names require m <= 9 (desk-scale shapes)");
    let mut names: Vec<Vec<String>> = Vec::new();
    let mut sims: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut index: Vec<BTreeMap<Vec<usize>, usize>> = Vec::new();
    for k in 0..=up_to {
        let maps: Vec<Vec<usize>> = monotone_maps(k, m).into_iter().filter(|f| keep(f)).collect();
        let mut idx = BTreeMap::new();
        for (i, f) in maps.iter().enumerate() {
            idx.insert(f.clone(), i);
        }
        names.push(maps.iter().map(|f| monotone_name(f)).collect());
        index.push(idx);
        sims.push(maps);
    }
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for k in 1..=up_to {
        let mut per_i = Vec::new();
        for i in 0..=k {
            let mut col = Vec::with_capacity(sims[k].len());
            for f in &sims[k] {
                let mut g = f.clone();
                g.remove(i);
                col.push(index[k - 1][&g]);
            }
            per_i.push(col);
        }
        faces.push(per_i);
    }
    let mut degens: Vec<Vec<Vec<usize>>> = Vec::new();
    for k in 0..up_to {
        let mut per_i = Vec::new();
        for i in 0..=k {
            let mut col = Vec::with_capacity(sims[k].len());
            for f in &sims[k] {
                let mut g = f.clone();
                g.insert(i, f[i]);
                col.push(index[k + 1][&g]);
            }
            per_i.push(col);
        }
        degens.push(per_i);
    }
    degens.push(Vec::new());
    let nondeg = sims.iter().map(|lv| lv.iter().map(|f| is_nondeg_map(f)).collect()).collect();
    SimplicialShape {
        max_level: up_to,
        names,
        faces,
        degens,
        nondeg,
    }
}

/// The standard simplex Δ^m truncated at level `up_to`: level k holds all
/// monotone maps [k] → [m].
pub fn standard_simplex(m: usize, up_to: usize) -> SimplicialShape {
    delta_subshape(m, up_to, |_| true)
}

/// The empty simplicial set (no simplices at any level).
pub fn empty_shape(up_to: usize) -> SimplicialShape {
    delta_subshape(0, up_to, |_| false)
}

/// The horn Λ^m_j: simplices of Δ^m whose image does not contain
/// {0, …, ĵ, …, m}. Stored to level m−1 (no nondegenerate simplices higher).
pub fn horn(m: usize, j: usize) -> Result<SimplicialShape, ShapeError> {
    if m < 1 || j > m {
        return Err(ShapeError::HornIndexOutOfRange { m, j });
    }
    let keep = move |f: &[usize]| (0..=m).any(|v| v != j && !f.contains(&v));
    Ok(delta_subshape(m, m.saturating_sub(1), keep))
}

/// The boundary ∂Δ^m = sk_{m−1} Δ^m: non-surjective monotone maps. ∂Δ^0 is
/// the empty shape.
pub fn boundary(m: usize) -> SimplicialShape {
    let keep = move |f: &[usize]| (0..=m).any(|v| !f.contains(&v));
    delta_subshape(m, m.saturating_sub(1), keep)
}

/// The m-skeleton of Δ^n truncated at `up_to`: simplices whose
/// nondegenerate core has dimension ≤ m.
pub fn skeleton_of_simplex(n: usize, m: usize, up_to: usize) -> SimplicialShape {
    delta_subshape(n, up_to, move |f| core_dim(f) <= m)
}

/// Generic skeleton: keep simplices whose core level is ≤ m.
pub fn skeleton(s: &SimplicialShape, m: usize) -> SimplicialShape {
    let l = s.max_level;
    let mut keep: Vec<Vec<bool>> = Vec::new();
    let mut remap: Vec<Vec<usize>> = Vec::new();
    let mut names: Vec<Vec<String>> = Vec::new();
    let mut nondeg: Vec<Vec<bool>> = Vec::new();
    for lv in 0..=l {
        let mut k = Vec::new();
        let mut r = Vec::new();
        let mut nm = Vec::new();
        let mut nd = Vec::new();
        let mut next = 0usize;
        for idx in 0..s.level_size(lv) {
            let (cl, _, _) = s.core_of(lv, idx);
            let inside = cl <= m;
            k.push(inside);
            if inside {
                r.push(next);
                nm.push(s.names[lv][idx].clone());
                nd.push(s.nondeg[lv][idx]);
                next += 1;
            } else {
                r.push(usize::MAX);
            }
        }
        keep.push(k);
        remap.push(r);
        names.push(nm);
        nondeg.push(nd);
    }
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for lv in 1..=l {
        let mut per_i = Vec::new();
        for i in 0..=lv {
            let mut col = Vec::new();
            for idx in 0..s.level_size(lv) {
                if keep[lv][idx] {
                    col.push(remap[lv - 1][s.faces[lv][i][idx]]);
                }
            }
            per_i.push(col);
        }
        faces.push(per_i);
    }
    let mut degens: Vec<Vec<Vec<usize>>> = Vec::new();
    for lv in 0..l {
        let mut per_i = Vec::new();
        for i in 0..=lv {
            let mut col = Vec::new();
            for idx in 0..s.level_size(lv) {
                if keep[lv][idx] {
                    col.push(remap[lv + 1][s.degens[lv][i][idx]]);
                }
            }
            per_i.push(col);
        }
        degens.push(per_i);
    }
    degens.push(Vec::new());
    SimplicialShape {
        max_level: l,
        names,
        faces,
        degens,
        nondeg,
    }
}

/// Finite groupoid given by explicit tables. `compose[g][h]` is g∘h (g after
/// h), defined exactly when source(g) = target(h).
#[derive(Debug, Clone)]
pub struct FiniteGroupoid {
    pub objects: Vec<String>,
    pub arrow_names: Vec<String>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub compose: Vec<Vec<Option<usize>>>,
    pub identities: Vec<usize>,
    pub inverses: Vec<usize>,
}

impl FiniteGroupoid {
    pub fn validate(&self) -> Result<(), ShapeError> {
        let n = self.arrow_names.len();
        let err = |s: String| Err(ShapeError::InvalidGroupoid(s));
        if self.source.len() != n || self.target.len() != n || self.inverses.len() != n {
            return err("table sizes disagree".into());
        }
        if self.identities.len() != self.objects.len() {
            return err("identity table size".into());
        }
        for (x, &e) in self.identities.iter().enumerate() {
            if self.source[e] != x || self.target[e] != x {
                return err(format!("identity of object {x} has wrong endpoints"));
            }
        }
        for g in 0..n {
            for h in 0..n {
                let defined = self.source[g] == self.target[h];
                match self.compose[g][h] {
                    Some(gh) => {
                        if !defined {
                            return err(format!("compose({g},{h}) defined but not composable"));
                        }
                        if self.source[gh] != self.source[h] || self.target[gh] != self.target[g] {
                            return err(format!("compose({g},{h}) endpoints"));
                        }
                    }
                    None => {
                        if defined {
                            return err(format!("compose({g},{h}) missing"));
                        }
                    }
                }
            }
        }
        // identity laws
        for g in 0..n {
            if self.compose[g][self.identities[self.source[g]]] != Some(g)
                || self.compose[self.identities[self.target[g]]][g] != Some(g)
            {
                return err(format!("identity law fails at arrow {g}"));
            }
            let gi = self.inverses[g];
            if self.compose[g][gi] != Some(self.identities[self.target[g]])
                || self.compose[gi][g] != Some(self.identities[self.source[g]])
            {
                return err(format!("inverse law fails at arrow {g}"));
            }
        }
        // associativity
        for g in 0..n {
            for h in 0..n {
                if self.source[g] != self.target[h] {
                    continue;
                }
                for k in 0..n {
                    if self.source[h] != self.target[k] {
                        continue;
                    }
                    let a = self.compose[self.compose[g][h].unwrap()][k];
                    let b = self.compose[g][self.compose[h][k].unwrap()];
                    if a != b {
                        return err(format!("associativity fails at ({g},{h},{k})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Pair groupoid on a finite set: one arrow (x, y) from y to x.
    pub fn pair(objects: &[&str]) -> FiniteGroupoid {
        let n = objects.len();
        let mut arrow_names = Vec::new();
        let mut source = Vec::new();
        let mut target = Vec::new();
        // arrow (t, s): index t*n + s, goes s → t
        for t in 0..n {
            for s in 0..n {
                arrow_names.push(format!("{}<{}", objects[t], objects[s]));
                source.push(s);
                target.push(t);
            }
        }
        let arrows = n * n;
        let mut compose = vec![vec![None; arrows]; arrows];
        for g in 0..arrows {
            for h in 0..arrows {
                if source[g] == target[h] {
                    compose[g][h] = Some(target[g] * n + source[h]);
                }
            }
        }
        let identities: Vec<usize> = (0..n).map(|x| x * n + x).collect();
        let inverses: Vec<usize> = (0..arrows).map(|g| source[g] * n + target[g]).collect();
        FiniteGroupoid {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            arrow_names,
            source,
            target,
            compose,
            identities,
            inverses,
        }
    }

    /// One-object groupoid from a group's multiplication table.
    /// `mul[g][h]` = g·h, `id` the unit, `inv[g]` the inverse.
    pub fn one_object(names: &[&str], mul: &[Vec<usize>], id: usize, inv: &[usize]) -> Self {
        let n = names.len();
        FiniteGroupoid {
            objects: vec!["*".into()],
            arrow_names: names.iter().map(|s| s.to_string()).collect(),
            source: vec![0; n],
            target: vec![0; n],
            compose: (0..n).map(|g| (0..n).map(|h| Some(mul[g][h])).collect()).collect(),
            identities: vec![id],
            inverses: inv.to_vec(),
        }
    }

    /// Unit groupoid on a finite set: only identity arrows.
    pub fn unit(objects: &[&str]) -> Self {
        let n = objects.len();
        FiniteGroupoid {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            arrow_names: objects.iter().map(|s| format!("id_{s}")).collect(),
            source: (0..n).collect(),
            target: (0..n).collect(),
            compose: (0..n)
                .map(|g| (0..n).map(|h| (g == h).then_some(g)).collect())
                .collect(),
            identities: (0..n).collect(),
            inverses: (0..n).collect(),
        }
    }
}

/// Nerve of a finite groupoid truncated at `up_to`. Level k holds chains
/// (g_1, …, g_k) with g_i an arrow from vertex i to vertex i−1 (so d_0
/// drops g_1 = "the source end", matching d_0(g) = s(g) on 1-simplices),
/// inner faces compose adjacent arrows, and degeneracies insert identities.
pub fn nerve_groupoid(g: &FiniteGroupoid, up_to: usize) -> Result<SimplicialShape, ShapeError> {
    g.validate()?;
    // chains[k] lists the k-chains as arrow index tuples
    let mut chains: Vec<Vec<Vec<usize>>> = Vec::new();
    chains.push(vec![]); // placeholder, level 0 handled via objects
    let arrows = g.arrow_names.len();
    let mut level1: Vec<Vec<usize>> = (0..arrows).map(|a| vec![a]).collect();
    level1.sort();
    if up_to >= 1 {
        chains[0] = Vec::new(); // unused
    }
    let mut per_level: Vec<Vec<Vec<usize>>> = Vec::with_capacity(up_to + 1);
    per_level.push((0..g.objects.len()).map(|x| vec![x]).collect()); // level 0: object index singleton
    if up_to >= 1 {
        per_level.push(level1);
    }
    for k in 2..=up_to {
        let mut next = Vec::new();
        for chain in &per_level[k - 1] {
            let last = *chain.last().unwrap();
            for a in 0..arrows {
                // g_k goes vertex k → vertex k−1: target(g_k) = source(g_{k−1})
                if g.target[a] == g.source[last] {
                    let mut c = chain.clone();
                    c.push(a);
                    next.push(c);
                }
            }
        }
        next.sort();
        per_level.push(next);
    }
    let name_of = |k: usize, chain: &[usize]| -> String {
        if k == 0 {
            g.objects[chain[0]].clone()
        } else {
            chain.iter().map(|&a| g.arrow_names[a].clone()).collect::<Vec<_>>().join("|")
        }
    };
    let mut index: Vec<BTreeMap<Vec<usize>, usize>> = Vec::new();
    for lv in &per_level {
        let mut m = BTreeMap::new();
        for (i, c) in lv.iter().enumerate() {
            m.insert(c.clone(), i);
        }
        index.push(m);
    }
    // vertex x_i of a chain (needed for face/degeneracy edges): x_0 = target
    // of g_1, x_i = source of g_i.
    let vertex = |chain: &[usize], i: usize| -> usize {
        if i == 0 {
            g.target[chain[0]]
        } else {
            g.source[chain[i - 1]]
        }
    };
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for k in 1..=up_to {
        let mut per_i = Vec::new();
        for i in 0..=k {
            let mut col = Vec::new();
            for chain in &per_level[k] {
                let reduced: Vec<usize> = if k == 1 {
                    // face of an arrow is an object: d_0 = source, d_1 = target
                    if i == 0 {
                        vec![g.source[chain[0]]]
                    } else {
                        vec![g.target[chain[0]]]
                    }
                } else if i == 0 {
                    chain[1..].to_vec()
                } else if i == k {
                    chain[..k - 1].to_vec()
                } else {
                    let mut c = chain[..i - 1].to_vec();
                    c.push(g.compose[chain[i - 1]][chain[i]].expect("composable chain"));
                    c.extend_from_slice(&chain[i + 1..]);
                    c
                };
                col.push(index[k - 1][&reduced]);
            }
            per_i.push(col);
        }
        faces.push(per_i);
    }
    let mut degens: Vec<Vec<Vec<usize>>> = Vec::new();
    for k in 0..up_to {
        let mut per_i = Vec::new();
        for i in 0..=k {
            let mut col = Vec::new();
            for chain in &per_level[k] {
                let extended: Vec<usize> = if k == 0 {
                    vec![g.identities[chain[0]]]
                } else {
                    let mut c = chain[..i].to_vec();
                    c.push(g.identities[vertex(chain, i)]);
                    c.extend_from_slice(&chain[i..]);
                    c
                };
                col.push(index[k + 1][&extended]);
            }
            per_i.push(col);
        }
        degens.push(per_i);
    }
    degens.push(Vec::new());
    let nondeg: Vec<Vec<bool>> = per_level
        .iter()
        .enumerate()
        .map(|(k, lv)| {
            lv.iter()
                .map(|chain| k == 0 || chain.iter().all(|&a| !g.identities.contains(&a)))
                .collect()
        })
        .collect();
    // A chain is degenerate iff some arrow in it is an identity — that is
    // exactly the image of a degeneracy. (Identities elsewhere still make it
    // degenerate only via the matching position; check with the structural
    // predicate instead to be safe.)
    let names = per_level.iter().enumerate().map(|(k, lv)| lv.iter().map(|c| name_of(k, c)).collect()).collect();
    let mut shape = SimplicialShape {
        max_level: up_to,
        names,
        faces,
        degens,
        nondeg,
    };
    // Recompute nondegeneracy structurally: x degenerate iff s_i(d_i x) = x.
    for m in 1..=up_to {
        for x in 0..shape.level_size(m) {
            let mut degenerate = false;
            for i in 0..m {
                if shape.degens[m - 1][i][shape.faces[m][i][x]] == x {
                    degenerate = true;
                    break;
                }
            }
            shape.nondeg[m][x] = !degenerate;
        }
    }
    shape.validate()?;
    Ok(shape)
}

/// A simplicial map between shapes: image index per (level, simplex).
pub type ShapeMap = Vec<Vec<usize>>;

fn verify_shape_map(t: &SimplicialShape, s: &SimplicialShape, map: &ShapeMap) -> bool {
    let l = t.max_level.min(s.max_level);
    for m in 1..=l {
        for x in 0..t.level_size(m) {
            for i in 0..=m {
                if s.faces[m][i][map[m][x]] != map[m - 1][t.faces[m][i][x]] {
                    return false;
                }
            }
        }
    }
    for m in 0..l {
        for x in 0..t.level_size(m) {
            for i in 0..=m {
                if s.degens[m][i][map[m][x]] != map[m + 1][t.degens[m][i][x]] {
                    return false;
                }
            }
        }
    }
    true
}

/// Enumerate all simplicial maps T → S on levels 0..=T.max_level by
/// backtracking over images of nondegenerate simplices. Requires
/// S.max_level ≥ T.max_level.
pub fn hom_set(t: &SimplicialShape, s: &SimplicialShape) -> Vec<ShapeMap> {
    let lt = t.max_level;
    assert!(s.max_level >= lt, "target shape stores too few levels");
    let nondeg = t.nondegenerate();
    let mut out = Vec::new();
    let mut partial: Vec<Vec<Option<usize>>> =
        (0..=lt).map(|m| vec![None; t.level_size(m)]).collect();

    fn fill_degenerate(
        t: &SimplicialShape,
        s: &SimplicialShape,
        partial: &mut [Vec<Option<usize>>],
        m: usize,
    ) {
        for x in 0..t.level_size(m) {
            if t.nondeg[m][x] || partial[m][x].is_some() {
                continue;
            }
            let (cl, cx, chain) = t.core_of(m, x);
            if let Some(mut img) = partial[cl][cx] {
                let mut lv = cl;
                for &c in &chain {
                    img = s.degens[lv][c][img];
                    lv += 1;
                }
                partial[m][x] = Some(img);
            }
        }
    }

    fn dfs(
        t: &SimplicialShape,
        s: &SimplicialShape,
        nondeg: &[(usize, usize)],
        pos: usize,
        partial: &mut Vec<Vec<Option<usize>>>,
        out: &mut Vec<ShapeMap>,
    ) {
        if pos == nondeg.len() {
            let map: ShapeMap = partial
                .iter()
                .map(|lv| lv.iter().map(|v| v.expect("total assignment")).collect())
                .collect();
            debug_assert!(verify_shape_map(t, s, &map));
            out.push(map);
            return;
        }
        let (m, x) = nondeg[pos];
        'cand: for img in 0..s.level_size(m) {
            if m >= 1 {
                for i in 0..=m {
                    let fx = t.faces[m][i][x];
                    let expected = partial[m - 1][fx].expect("faces assigned before");
                    if s.faces[m][i][img] != expected {
                        continue 'cand;
                    }
                }
            }
            partial[m][x] = Some(img);
            let saved: Vec<Vec<Option<usize>>> = partial.clone();
            for lv in m..=t.max_level {
                fill_degenerate(t, s, partial, lv);
            }
            dfs(t, s, nondeg, pos + 1, partial, out);
            *partial = saved;
            partial[m][x] = None;
        }
    }

    dfs(t, s, &nondeg, 0, &mut partial, &mut out);
    out
}

/// Outcome of a set-level Kan check.
#[derive(Debug, Clone)]
pub struct KanReport {
    pub m: usize,
    pub j: usize,
    pub strict: bool,
    pub pass: bool,
    /// On failure: an unfillable horn (as simplex-name assignments), or a
    /// pair of distinct fillers restricting to the same horn when strictness
    /// fails.
    pub witness: Option<String>,
}

/// Set-level Kan condition: the restriction map S_m → Hom(Λ^m_j, S) is
/// surjective (bijective when `strict`).
pub fn check_kan_set(
    s: &SimplicialShape,
    m: usize,
    j: usize,
    strict: bool,
) -> Result<KanReport, ShapeError> {
    if s.max_level < m {
        return Err(ShapeError::InsufficientLevels {
            have: s.max_level,
            need: m,
        });
    }
    let h = horn(m, j)?;
    let horn_maps = hom_set(&h, s);
    // Restriction of each filler to the horn.
    let restrict = |x: usize| -> ShapeMap {
        (0..=h.max_level)
            .map(|k| {
                (0..h.level_size(k))
                    .map(|idx| {
                        let f = decode_monotone(h.name(k, idx)).expect("digit names");
                        s.apply_monotone(m, x, &f)
                    })
                    .collect()
            })
            .collect()
    };
    let mut hits: BTreeMap<ShapeMap, Vec<usize>> = BTreeMap::new();
    for x in 0..s.level_size(m) {
        hits.entry(restrict(x)).or_default().push(x);
    }
    for hm in &horn_maps {
        match hits.get(hm) {
            None => {
                let mut desc: Vec<String> = Vec::new();
                for k in 0..=h.max_level {
                    for i in 0..h.level_size(k) {
                        if h.nondeg[k][i] {
                            desc.push(format!("{} -> {}", h.name(k, i), s.name(k, hm[k][i])));
                        }
                    }
                }
                return Ok(KanReport {
                    m,
                    j,
                    strict,
                    pass: false,
                    witness: Some(format!("unfillable horn: {}", desc.join(", "))),
                });
            }
            Some(fillers) if strict && fillers.len() > 1 => {
                return Ok(KanReport {
                    m,
                    j,
                    strict,
                    pass: false,
                    witness: Some(format!(
                        "horn filled by both {} and {}",
                        s.name(m, fillers[0]),
                        s.name(m, fillers[1])
                    )),
                });
            }
            _ => {}
        }
    }
    Ok(KanReport {
        m,
        j,
        strict,
        pass: true,
        witness: None,
    })
}

/// Wire format for shape JSON: levels as arrays of names, faces and
/// degeneracies as maps "m,i" → array of target names.
#[derive(Serialize, Deserialize)]
struct ShapeWire {
    levels: Vec<Vec<String>>,
    faces: BTreeMap<String, Vec<String>>,
    degens: BTreeMap<String, Vec<String>>,
}

pub fn shape_to_json(s: &SimplicialShape) -> String {
    let mut faces = BTreeMap::new();
    for m in 1..=s.max_level {
        for i in 0..=m {
            faces.insert(
                format!("{m},{i}"),
                s.faces[m][i].iter().map(|&t| s.names[m - 1][t].clone()).collect(),
            );
        }
    }
    let mut degens = BTreeMap::new();
    for m in 0..s.max_level {
        for i in 0..=m {
            degens.insert(
                format!("{m},{i}"),
                s.degens[m][i].iter().map(|&t| s.names[m + 1][t].clone()).collect(),
            );
        }
    }
    serde_json::to_string_pretty(&ShapeWire {
        levels: s.names.clone(),
        faces,
        degens,
    })
    .expect("shape serialization")
}

pub fn shape_from_json(text: &str) -> Result<SimplicialShape, ShapeError> {
    let wire: ShapeWire =
        serde_json::from_str(text).map_err(|e| ShapeError::Parse(e.to_string()))?;
    let max_level = wire.levels.len().saturating_sub(1);
    let names = wire.levels;
    let lookup = |m: usize, name: &str| -> Result<usize, ShapeError> {
        names[m]
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ShapeError::Parse(format!("unknown simplex {name:?} at level {m}")))
    };
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for m in 1..=max_level {
        let mut per_i = Vec::new();
        for i in 0..=m {
            let key = format!("{m},{i}");
            let list = wire
                .faces
                .get(&key)
                .ok_or_else(|| ShapeError::Parse(format!("missing face table {key}")))?;
            if list.len() != names[m].len() {
                return Err(ShapeError::Parse(format!("face table {key} has wrong length")));
            }
            let mut col = Vec::new();
            for n in list {
                col.push(lookup(m - 1, n)?);
            }
            per_i.push(col);
        }
        faces.push(per_i);
    }
    let mut degens: Vec<Vec<Vec<usize>>> = Vec::new();
    for m in 0..max_level {
        let mut per_i = Vec::new();
        for i in 0..=m {
            let key = format!("{m},{i}");
            let list = wire
                .degens
                .get(&key)
                .ok_or_else(|| ShapeError::Parse(format!("missing degeneracy table {key}")))?;
            if list.len() != names[m].len() {
                return Err(ShapeError::Parse(format!("degeneracy table {key} wrong length")));
            }
            let mut col = Vec::new();
            for n in list {
                col.push(lookup(m + 1, n)?);
            }
            per_i.push(col);
        }
        degens.push(per_i);
    }
    degens.push(Vec::new());
    let mut shape = SimplicialShape {
        max_level,
        nondeg: names.iter().map(|lv| vec![true; lv.len()]).collect(),
        names,
        faces,
        degens,
    };
    for m in 1..=max_level {
        for x in 0..shape.level_size(m) {
            let mut degenerate = false;
            for i in 0..m {
                if shape.degens[m - 1][i][shape.faces[m][i][x]] == x {
                    degenerate = true;
                    break;
                }
            }
            shape.nondeg[m][x] = !degenerate;
        }
    }
    shape.validate()?;
    Ok(shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_simplex_counts() {
        // Δ^1 at level 1: monotone maps [1]→[1]: 00, 01, 11.
        let d1 = standard_simplex(1, 1);
        assert_eq!(d1.level_size(1), 3);
        assert_eq!(
            (0..3).map(|i| d1.name(1, i).to_string()).collect::<Vec<_>>(),
            vec!["00", "01", "11"]
        );
        // Δ^2 at level 1: 6 monotone maps [1]→[2].
        assert_eq!(standard_simplex(2, 2).level_size(1), 6);
        // Δ^0: exactly one simplex per level.
        let d0 = standard_simplex(0, 4);
        for k in 0..=4 {
            assert_eq!(d0.level_size(k), 1);
        }
    }

    #[test]
    fn nondegenerate_counts_are_binomial() {
        fn binom(n: usize, k: usize) -> usize {
            if k > n {
                return 0;
            }
            let mut r = 1usize;
            for i in 0..k {
                r = r * (n - i) / (i + 1);
            }
            r
        }
        for m in 0..=4usize {
            let s = standard_simplex(m, m);
            for k in 0..=m {
                assert_eq!(s.count_nondegenerate(k), binom(m + 1, k + 1), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn shapes_validate() {
        for m in 0..=4 {
            standard_simplex(m, m.min(3) + 1).validate().unwrap();
            boundary(m).validate().unwrap();
        }
        for m in 1..=3 {
            for j in 0..=m {
                horn(m, j).unwrap().validate().unwrap();
            }
        }
    }

    #[test]
    fn horn_2_1_counts() {
        let h = horn(2, 1).unwrap();
        assert_eq!(h.count_nondegenerate(0), 3);
        assert_eq!(h.count_nondegenerate(1), 2);
        let edges: Vec<&str> = (0..h.level_size(1))
            .filter(|&i| h.is_nondegenerate(1, i))
            .map(|i| h.name(1, i))
            .collect();
        assert_eq!(edges, vec!["01", "12"]);
    }

    #[test]
    fn horn_1_0_single_vertex() {
        // Λ^1_0 keeps the unique vertex whose image misses vertex 1.
        let h = horn(1, 0).unwrap();
        assert_eq!(h.count_nondegenerate(0), 1);
        assert_eq!(h.name(0, 0), "0");
        assert!(horn(2, 3).is_err());
    }

    #[test]
    fn horn_simplices_live_in_simplex() {
        let d = standard_simplex(3, 2);
        let h = horn(3, 1).unwrap();
        for k in 0..=h.max_level {
            for i in 0..h.level_size(k) {
                assert!(d.index_of(k, h.name(k, i)).is_some());
            }
        }
    }

    #[test]
    fn boundary_counts() {
        let b1 = boundary(1);
        assert_eq!(b1.level_size(0), 2);
        assert_eq!(b1.max_level, 0);
        let b2 = boundary(2);
        assert_eq!(b2.count_nondegenerate(0), 3);
        assert_eq!(b2.count_nondegenerate(1), 3);
        // ∂Δ^0 is empty.
        assert_eq!(boundary(0).level_size(0), 0);
    }

    #[test]
    fn skeleton_of_simplex_matches() {
        // sk_m Δ^n = Δ^n for m ≥ n.
        let full = standard_simplex(2, 3);
        let sk = skeleton_of_simplex(2, 2, 3);
        assert_eq!(full, sk);
        // Generic skeleton agrees with the direct construction.
        let a = skeleton(&standard_simplex(3, 3), 1);
        let b = skeleton_of_simplex(3, 1, 3);
        assert_eq!(a, b);
        a.validate().unwrap();
    }

    #[test]
    fn mutation_is_detected() {
        let mut s = standard_simplex(2, 2);
        // redirect d_0 of the top simplex
        let top = s.index_of(2, "012").unwrap();
        let wrong = s.index_of(1, "00").unwrap();
        s.mutate_face(2, 0, top, wrong);
        assert!(s.validate().is_err());
    }

    #[test]
    fn pair_groupoid_nerve() {
        let g = FiniteGroupoid::pair(&["a", "b"]);
        g.validate().unwrap();
        let n = nerve_groupoid(&g, 3).unwrap();
        assert_eq!(n.level_size(0), 2);
        assert_eq!(n.level_size(1), 4);
        // Kan!(m, j) for m ≥ 2 (unique composition), Kan(1, j) non-strict.
        for m in 2..=3 {
            for j in 0..=m {
                let r = check_kan_set(&n, m, j, true).unwrap();
                assert!(r.pass, "Kan!({m},{j}) on pair groupoid: {:?}", r.witness);
            }
        }
        for j in 0..=1 {
            assert!(check_kan_set(&n, 1, j, false).unwrap().pass);
        }
    }

    #[test]
    fn one_object_group_nerve() {
        // Z/2: one simplex would be false — the nerve has 2^k chains, but the
        // trivial group has exactly one simplex per level.
        let triv = FiniteGroupoid::one_object(&["e"], &[vec![0]], 0, &[0]);
        let n = nerve_groupoid(&triv, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(n.level_size(k), 1);
        }
        assert!(check_kan_set(&n, 1, 0, false).unwrap().pass);
        let z2 = FiniteGroupoid::one_object(
            &["e", "g"],
            &[vec![0, 1], vec![1, 0]],
            0,
            &[0, 1],
        );
        let n2 = nerve_groupoid(&z2, 3).unwrap();
        assert_eq!(n2.level_size(1), 2);
        assert!(check_kan_set(&n2, 2, 1, true).unwrap().pass);
        assert!(check_kan_set(&n2, 1, 0, false).unwrap().pass);
    }

    #[test]
    fn unit_groupoid_structure_maps_are_bijections() {
        let g = FiniteGroupoid::unit(&["x", "y", "z"]);
        let n = nerve_groupoid(&g, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(n.level_size(k), 3);
        }
        for m in 1..=3 {
            for i in 0..=m {
                let mut seen: Vec<usize> = (0..n.level_size(m)).map(|x| n.face(m, i, x)).collect();
                seen.sort();
                assert_eq!(seen, (0..n.level_size(m - 1)).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn delta1_outer_horn_unfillable_with_witness() {
        // Δ¹ is the nerve of the poset 0 < 1: inner horns fill (it is the
        // nerve of a category), outer horns do not (no inverses). The
        // enumeration oracle confirms both.
        let d1 = standard_simplex(1, 2);
        assert!(check_kan_set(&d1, 2, 1, false).unwrap().pass);
        let r = check_kan_set(&d1, 2, 0, false).unwrap();
        assert!(!r.pass);
        assert!(r.witness.unwrap().contains("unfillable"));
        let r2 = check_kan_set(&d1, 2, 2, false).unwrap();
        assert!(!r2.pass);
    }

    #[test]
    fn nerve_passes_kan_through_level_3() {
        let g = FiniteGroupoid::pair(&["a", "b", "c"]);
        let n = nerve_groupoid(&g, 4).unwrap();
        for m in 1..=3usize {
            for j in 0..=m {
                let strict = m >= 2;
                let r = check_kan_set(&n, m, j, strict).unwrap();
                assert!(r.pass, "Kan({m},{j})");
            }
        }
    }

    #[test]
    fn shape_json_round_trip() {
        let s = nerve_groupoid(&FiniteGroupoid::pair(&["a", "b"]), 2).unwrap();
        let text = shape_to_json(&s);
        let back = shape_from_json(&text).unwrap();
        assert_eq!(s.max_level, back.max_level);
        for m in 0..=2 {
            assert_eq!(s.level_size(m), back.level_size(m));
        }
        assert_eq!(text, shape_to_json(&back));
    }
}
