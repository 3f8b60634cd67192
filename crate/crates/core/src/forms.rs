//! Polynomial differential forms and the simplicial de Rham double complex.
//!
//! Forms carry polynomial coefficients graded by weight = form degree +
//! coefficient degree. All structure maps of a linear model are linear, so
//! the de Rham differential, the simplicial differential and every pullback
//! preserve weight; each weight block of the (truncated, normalized) total
//! complex is a finite-dimensional exact computation. Coordinate conversion
//! is strict — an operator producing terms outside the expected weight block
//! fails loudly — so weight preservation is verified rather than assumed.
//!
//! The same machinery drives the triple complex of a Cech nerve and the
//! Eilenberg-Zilber comparison with its diagonal.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exactla::{
    express_in_basis, ChainComplexQ, CohomologyReport, HomologyDegree, Orientation, Rat,
    RatMatrix,
};
use crate::linmodel::{BisimpLinSpace, LinSimpSpace, ModelError, SimpLinMap};
use crate::par;

/// Polynomial differential form on Q^ambient: a sum of terms
/// (monomial exponents, strictly increasing index tuple, coefficient).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyForm {
    pub ambient: usize,
    pub degree: usize,
    terms: BTreeMap<(Vec<u32>, Vec<usize>), Rat>,
}

impl PolyForm {
    pub fn zero(ambient: usize, degree: usize) -> Self {
        PolyForm {
            ambient,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<u32>, Vec<usize>), &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, mono: Vec<u32>, idx: Vec<usize>, coef: Rat) {
        debug_assert_eq!(mono.len(), self.ambient);
        debug_assert_eq!(idx.len(), self.degree);
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(idx.iter().all(|&i| i < self.ambient));
        if coef.is_zero() {
            return;
        }
        let key = (mono, idx);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        assert_eq!(self.ambient, other.ambient);
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for ((m, i), c) in &other.terms {
            out.add_term(m.clone(), i.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyForm {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> PolyForm {
        if s.is_zero() {
            return PolyForm::zero(self.ambient, self.degree);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= s;
        }
        out
    }

    /// Maximal term weight (= form degree when the form is zero).
    pub fn max_weight(&self) -> usize {
        self.terms
            .keys()
            .map(|(m, _)| self.degree + m.iter().map(|&e| e as usize).sum::<usize>())
            .max()
            .unwrap_or(self.degree)
    }

    /// The weight-w homogeneous part.
    pub fn weight_part(&self, w: usize) -> PolyForm {
        let mut out = PolyForm::zero(self.ambient, self.degree);
        for ((m, i), c) in &self.terms {
            let wt = self.degree + m.iter().map(|&e| e as usize).sum::<usize>();
            if wt == w {
                out.add_term(m.clone(), i.clone(), c.clone());
            }
        }
        out
    }

    /// Constant 2-form from an antisymmetric Gram matrix: ω(u, v) = uᵀGv.
    pub fn constant_two_form(gram: &RatMatrix) -> PolyForm {
        let d = gram.rows();
        assert_eq!(gram.cols(), d);
        assert_eq!(gram.transpose().neg(), *gram, "Gram must be antisymmetric");
        let mut f = PolyForm::zero(d, 2);
        for i in 0..d {
            for j in (i + 1)..d {
                f.add_term(vec![0; d], vec![i, j], gram.at(i, j).clone());
            }
        }
        f
    }

    /// Antisymmetric Gram matrix of the constant part of a 2-form.
    pub fn gram_of_constant_part(&self) -> RatMatrix {
        assert_eq!(self.degree, 2);
        let d = self.ambient;
        let mut g = RatMatrix::zeros(d, d);
        for ((m, idx), c) in &self.terms {
            if m.iter().any(|&e| e != 0) {
                continue;
            }
            g.set(idx[0], idx[1], c.clone());
            g.set(idx[1], idx[0], -c.clone());
        }
        g
    }
}

/// Form file JSON wire: {"level": p, "degree": q, "terms": [{"mono": […],
/// "idx": […], "coef": "p/q"}]}.
#[derive(serde::Serialize, serde::Deserialize)]
pub struct FormWire {
    pub level: usize,
    pub degree: usize,
    pub terms: Vec<TermWire>,
}

#[derive(serde::Serialize, serde::Deserialize)]
pub struct TermWire {
    pub mono: Vec<u32>,
    pub idx: Vec<usize>,
    pub coef: String,
}

pub fn form_to_wire(level: usize, f: &PolyForm) -> FormWire {
    FormWire {
        level,
        degree: f.degree,
        terms: f
            .terms
            .iter()
            .map(|((m, i), c)| TermWire {
                mono: m.clone(),
                idx: i.clone(),
                coef: crate::exactla::rat_to_string(c),
            })
            .collect(),
    }
}

pub fn form_from_wire(wire: &FormWire, ambient: usize) -> Result<PolyForm, ModelError> {
    let mut f = PolyForm::zero(ambient, wire.degree);
    for t in &wire.terms {
        if t.mono.len() != ambient {
            return Err(ModelError::Parse(format!(
                "monomial has {} exponents, ambient dimension is {ambient}",
                t.mono.len()
            )));
        }
        if t.idx.len() != wire.degree
            || !t.idx.windows(2).all(|w| w[0] < w[1])
            || t.idx.iter().any(|&i| i >= ambient)
        {
            return Err(ModelError::Parse("bad index tuple".into()));
        }
        let coef = crate::exactla::rat_from_string(&t.coef)
            .map_err(|e| ModelError::Parse(e.to_string()))?;
        f.add_term(t.mono.clone(), t.idx.clone(), coef);
    }
    Ok(f)
}

/// Multiply a polynomial (exponent-vector map) by the `reps`-th power of a
/// linear form Σ a_c y_c.
fn poly_times_linear_power(
    poly: BTreeMap<Vec<u32>, Rat>,
    coeffs: &[Rat],
    reps: u32,
) -> BTreeMap<Vec<u32>, Rat> {
    let mut acc = poly;
    for _ in 0..reps {
        let mut next: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (mono, c) in &acc {
            for (var, a) in coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let mut m2 = mono.clone();
                m2[var] += 1;
                let e = next.entry(m2).or_insert_with(Rat::zero);
                *e += c * a;
            }
        }
        next.retain(|_, v| !v.is_zero());
        acc = next;
    }
    acc
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, k, v + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

fn minor(a: &RatMatrix, rows: &[usize], cols: &[usize]) -> Rat {
    match rows.len() {
        0 => Rat::from_integer(1.into()),
        1 => a.at(rows[0], cols[0]).clone(),
        _ => {
            let mut acc = Rat::zero();
            for (t, &c) in cols.iter().enumerate() {
                let v = a.at(rows[0], c);
                if v.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&cc| cc != c).collect();
                let m = minor(a, &rows[1..], &sub_cols);
                if m.is_zero() {
                    continue;
                }
                let signed = if t % 2 == 0 { v * &m } else { -(v * &m) };
                acc += signed;
            }
            acc
        }
    }
}

/// Pullback along a linear map A : Q^s → Q^a of a form on Q^a; the result
/// lives on Q^s. Substitutes variables linearly and transforms index tuples
/// by minors; weight is preserved.
pub fn pullback(a: &RatMatrix, form: &PolyForm) -> PolyForm {
    assert_eq!(
        a.rows(),
        form.ambient,
        "pullback matrix must land in the form's ambient space"
    );
    let s = a.cols();
    let q = form.degree;
    let mut out = PolyForm::zero(s, q);
    let rows_a: Vec<Vec<Rat>> =
        (0..a.rows()).map(|r| (0..s).map(|c| a.at(r, c).clone()).collect()).collect();
    let target_tuples = combinations(s, q);
    for ((mono, idx), coef) in &form.terms {
        let mut poly: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        poly.insert(vec![0u32; s], coef.clone());
        for (var, &e) in mono.iter().enumerate() {
            if e > 0 && !poly.is_empty() {
                poly = poly_times_linear_power(poly, &rows_a[var], e);
            }
        }
        if poly.is_empty() {
            continue;
        }
        for j in &target_tuples {
            let det = minor(a, idx, j);
            if det.is_zero() {
                continue;
            }
            for (m2, c2) in &poly {
                out.add_term(m2.clone(), j.clone(), c2 * &det);
            }
        }
    }
    out
}

/// The de Rham differential; weight preserved, d∘d = 0.
pub fn de_rham_d(form: &PolyForm) -> PolyForm {
    let d = form.ambient;
    let mut out = PolyForm::zero(d, form.degree + 1);
    for ((mono, idx), coef) in &form.terms {
        for k in 0..d {
            if mono[k] == 0 || idx.contains(&k) {
                continue;
            }
            let mut m2 = mono.clone();
            m2[k] -= 1;
            let pos = idx.iter().filter(|&&i| i < k).count();
            let mut i2 = idx.clone();
            i2.insert(pos, k);
            let scaled = coef * Rat::from_integer(mono[k].into());
            let signed = if pos % 2 == 0 { scaled } else { -scaled };
            out.add_term(m2, i2, signed);
        }
    }
    out
}

/// Simplicial differential δ = Σ_{i=0}^{p} (−1)^i d_i^* landing on level p.
pub fn simplicial_delta(x: &LinSimpSpace, p: usize, form: &PolyForm) -> PolyForm {
    assert!(p >= 1 && p <= x.max_level(), "level out of range");
    assert_eq!(form.ambient, x.dim(p - 1));
    let mut out = PolyForm::zero(x.dim(p), form.degree);
    for i in 0..=p {
        let t = pullback(x.face_mat(p, i), form);
        out = if i % 2 == 0 { out.add(&t) } else { out.sub(&t) };
    }
    out
}

/// True when every degeneracy pullback kills the form.
pub fn is_normalized(x: &LinSimpSpace, p: usize, form: &PolyForm) -> bool {
    assert_eq!(form.ambient, x.dim(p));
    (0..p).all(|i| pullback(x.degen_mat(p - 1, i), form).is_zero())
}

/// Ordered basis of the forms of exact weight w and degree q on Q^d:
/// monomials of degree w − q in graded-lex order crossed with lexicographic
/// index tuples.
#[derive(Debug, Clone)]
pub struct FormSpace {
    pub ambient: usize,
    pub degree: usize,
    pub weight: usize,
    monos: Vec<Vec<u32>>,
    idxs: Vec<Vec<usize>>,
    mono_pos: BTreeMap<Vec<u32>, usize>,
    idx_pos: BTreeMap<Vec<usize>, usize>,
}

fn gen_monos(d: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == d {
            cur[pos] = left;
            out.push(cur.clone());
            cur[pos] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e;
            rec(d, pos + 1, left - e, cur, out);
            cur[pos] = 0;
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if deg == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; d];
    rec(d, 0, deg, &mut cur, &mut out);
    out
}

impl FormSpace {
    pub fn new(ambient: usize, degree: usize, weight: usize) -> Self {
        assert!(weight >= degree, "weight can not be below the form degree");
        let monos = gen_monos(ambient, (weight - degree) as u32);
        let idxs = combinations(ambient, degree);
        let mono_pos = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let idx_pos = idxs.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        FormSpace {
            ambient,
            degree,
            weight,
            monos,
            idxs,
            mono_pos,
            idx_pos,
        }
    }

    pub fn dim(&self) -> usize {
        self.monos.len() * self.idxs.len()
    }

    pub fn basis_form(&self, t: usize) -> PolyForm {
        let (mi, ii) = (t / self.idxs.len(), t % self.idxs.len());
        let mut f = PolyForm::zero(self.ambient, self.degree);
        f.add_term(
            self.monos[mi].clone(),
            self.idxs[ii].clone(),
            Rat::from_integer(1.into()),
        );
        f
    }

    /// Strict coordinates: errors when the form has a term outside this
    /// space (wrong weight), which is how weight preservation is verified at
    /// every operator application.
    pub fn to_coords(&self, form: &PolyForm) -> Result<Vec<Rat>, ModelError> {
        if form.ambient != self.ambient || form.degree != self.degree {
            return Err(ModelError::Shape(format!(
                "form on Q^{} of degree {}, space expects Q^{} degree {}",
                form.ambient, form.degree, self.ambient, self.degree
            )));
        }
        let mut coords = vec![Rat::zero(); self.dim()];
        for ((m, i), c) in &form.terms {
            let mi = self.mono_pos.get(m).ok_or_else(|| {
                ModelError::Shape(format!(
                    "term of weight {} outside weight-{} block",
                    self.degree + m.iter().map(|&e| e as usize).sum::<usize>(),
                    self.weight
                ))
            })?;
            let ii = self.idx_pos[i];
            coords[mi * self.idxs.len() + ii] = c.clone();
        }
        Ok(coords)
    }

    pub fn from_coords(&self, coords: &[Rat]) -> PolyForm {
        assert_eq!(coords.len(), self.dim());
        let mut f = PolyForm::zero(self.ambient, self.degree);
        for (t, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                let (mi, ii) = (t / self.idxs.len(), t % self.idxs.len());
                f.add_term(self.monos[mi].clone(), self.idxs[ii].clone(), c.clone());
            }
        }
        f
    }

    /// Matrix of a linear operator on forms, columns indexed by this space's
    /// basis, rows by the target space.
    pub fn operator_matrix(
        &self,
        target: &FormSpace,
        op: impl Fn(&PolyForm) -> PolyForm + Sync,
    ) -> Result<RatMatrix, ModelError> {
        let cols: Vec<Result<Vec<Rat>, ModelError>> =
            par::map_range(self.dim(), |t| target.to_coords(&op(&self.basis_form(t))));
        let mut m = RatMatrix::zeros(target.dim(), self.dim());
        for (t, col) in cols.into_iter().enumerate() {
            for (r, v) in col?.into_iter().enumerate() {
                if !v.is_zero() {
                    m.set(r, t, v);
                }
            }
        }
        Ok(m)
    }
}

/// Basis of the normalized forms (killed by every degeneracy pullback) of
/// exact weight w and degree q on level p. Returns the ambient form space
/// and the kernel basis matrix.
pub fn normalized_basis(
    x: &LinSimpSpace,
    p: usize,
    q: usize,
    w: usize,
) -> Result<(FormSpace, RatMatrix), ModelError> {
    let space = FormSpace::new(x.dim(p), q, w);
    if p == 0 {
        let n = space.dim();
        return Ok((space, RatMatrix::identity(n)));
    }
    let mut rows = Vec::with_capacity(p);
    for i in 0..p {
        let below = FormSpace::new(x.dim(p - 1), q, w);
        let s = x.degen_mat(p - 1, i).clone();
        rows.push(space.operator_matrix(&below, |f| pullback(&s, f))?);
    }
    let stacked = RatMatrix::vstack_all(space.dim(), &rows);
    let basis = stacked.kernel_basis();
    Ok((space, basis))
}

/// One (p, q) component of a weight block: ambient space plus the basis used
/// for coordinates (normalized kernel basis, or identity in full mode).
#[derive(Debug, Clone)]
pub struct NormComponent {
    pub p: usize,
    pub q: usize,
    pub space: FormSpace,
    pub basis: RatMatrix,
}

impl NormComponent {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// The weight-w block of a truncated total complex: a cochain complex over
/// degrees 0..=top with components ⊕_{p+q=n, q≥k} at each degree.
#[derive(Debug, Clone)]
pub struct WeightBlock {
    pub w: usize,
    /// comps[n] lists the (p, q) components of total degree n, p ascending.
    pub comps: Vec<Vec<NormComponent>>,
    pub offsets: Vec<Vec<usize>>,
    pub complex: ChainComplexQ,
}

/// Truncated, weight-bounded total complex of the de Rham double complex of
/// a model, in normalized or full form spaces.
#[derive(Debug, Clone)]
pub struct TotalComplexData {
    pub k: usize,
    pub w_max: usize,
    pub top_degree: usize,
    pub normalized: bool,
    pub blocks: Vec<WeightBlock>,
}

fn block_components(
    x: &LinSimpSpace,
    k: usize,
    w: usize,
    top: usize,
    normalized: bool,
) -> Result<(Vec<Vec<NormComponent>>, Vec<Vec<usize>>), ModelError> {
    let mut comps: Vec<Vec<NormComponent>> = Vec::with_capacity(top + 1);
    let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let mut level_comps = Vec::new();
        let mut level_offsets = Vec::new();
        let mut off = 0usize;
        for p in 0..=n.min(x.max_level()) {
            let q = n - p;
            if q < k || q > w {
                continue;
            }
            let (space, basis) = if normalized {
                normalized_basis(x, p, q, w)?
            } else {
                let s = FormSpace::new(x.dim(p), q, w);
                let dim = s.dim();
                (s, RatMatrix::identity(dim))
            };
            level_offsets.push(off);
            off += basis.cols();
            level_comps.push(NormComponent { p, q, space, basis });
        }
        comps.push(level_comps);
        offsets.push(level_offsets);
    }
    Ok((comps, offsets))
}

fn paste_block(into: &mut RatMatrix, block: &RatMatrix, row_off: usize, col_off: usize) {
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            let v = block.at(r, c);
            if !v.is_zero() {
                into.set(row_off + r, col_off + c, v.clone());
            }
        }
    }
}

/// Build the total complex for degrees 0..=top_degree. The model must store
/// at least top_degree − k levels.
pub fn total_complex(
    x: &LinSimpSpace,
    k: usize,
    w_max: usize,
    top_degree: usize,
    normalized: bool,
) -> Result<TotalComplexData, ModelError> {
    if top_degree > k && top_degree - k > x.max_level() {
        return Err(ModelError::InsufficientLevels {
            have: x.max_level(),
            need: top_degree - k,
        });
    }
    let ws: Vec<usize> = (k..=w_max.max(k)).collect();
    let blocks_res: Vec<Result<WeightBlock, ModelError>> = par::map_slice(&ws, |&w| {
        let (comps, offsets) = block_components(x, k, w, top_degree, normalized)?;
        let dims: Vec<usize> = comps.iter().map(|cs| cs.iter().map(|c| c.dim()).sum()).collect();
        let mut maps = Vec::with_capacity(top_degree);
        for n in 0..top_degree {
            let mut d_n = RatMatrix::zeros(dims[n + 1], dims[n]);
            for (ci, comp) in comps[n].iter().enumerate() {
                let src_off = offsets[n][ci];
                // δ : (p, q) → (p+1, q)
                if let Some(tj) =
                    comps[n + 1].iter().position(|t| t.p == comp.p + 1 && t.q == comp.q)
                {
                    let tgt = &comps[n + 1][tj];
                    let full = comp
                        .space
                        .operator_matrix(&tgt.space, |f| simplicial_delta(x, comp.p + 1, f))?;
                    let reduced = express_in_basis(&tgt.basis, &full.mul(&comp.basis))?;
                    paste_block(&mut d_n, &reduced, offsets[n + 1][tj], src_off);
                }
                // (−1)^p d : (p, q) → (p, q+1)
                if let Some(tj) =
                    comps[n + 1].iter().position(|t| t.p == comp.p && t.q == comp.q + 1)
                {
                    let tgt = &comps[n + 1][tj];
                    let full = comp.space.operator_matrix(&tgt.space, de_rham_d)?;
                    let signed = if comp.p % 2 == 0 { full } else { full.neg() };
                    let reduced = express_in_basis(&tgt.basis, &signed.mul(&comp.basis))?;
                    paste_block(&mut d_n, &reduced, offsets[n + 1][tj], src_off);
                }
            }
            maps.push(d_n);
        }
        let complex = ChainComplexQ::new(0, dims, maps, Orientation::Cochain)?;
        Ok(WeightBlock {
            w,
            comps,
            offsets,
            complex,
        })
    });
    let mut blocks = Vec::with_capacity(blocks_res.len());
    for b in blocks_res {
        blocks.push(b?);
    }
    Ok(TotalComplexData {
        k,
        w_max: w_max.max(k),
        top_degree,
        normalized,
        blocks,
    })
}

impl TotalComplexData {
    /// Per-weight homology data in every degree.
    pub fn homology(&self) -> Vec<Vec<HomologyDegree>> {
        par::map_slice(&self.blocks, |b| b.complex.homology())
    }

    /// Total cohomology dimension in one degree (sum over weight blocks).
    pub fn cohomology_dim(h: &[Vec<HomologyDegree>], n: usize) -> usize {
        h.iter().map(|hb| hb.get(n).map_or(0, |d| d.dim)).sum()
    }

    pub fn report(&self, h: &[Vec<HomologyDegree>], up_to: usize) -> CohomologyReport {
        let dims = (0..=up_to.min(self.top_degree))
            .map(|n| (n as i64, Self::cohomology_dim(h, n)))
            .collect();
        CohomologyReport {
            dims,
            representatives: None,
        }
    }

    /// Coordinates, per weight block, of a degree-n element given as one
    /// PolyForm per level p (of degree n − p). Errors if some component is
    /// not in the stored (normalized) span.
    pub fn coords_of_collection(
        &self,
        forms: &[(usize, PolyForm)],
        n: usize,
    ) -> Result<Vec<Vec<Rat>>, ModelError> {
        let mut out = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let mut v = vec![Rat::zero(); b.complex.dims[n]];
            for (p, f) in forms {
                if let Some(ci) = b.comps[n].iter().position(|c| c.p == *p) {
                    let comp = &b.comps[n][ci];
                    let full = comp.space.to_coords(&f.weight_part(b.w))?;
                    let coords =
                        express_in_basis(&comp.basis, &RatMatrix::column_vector(&full))?;
                    for r in 0..coords.rows() {
                        v[b.offsets[n][ci] + r] = coords.at(r, 0).clone();
                    }
                }
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// The map of total complexes induced by a simplicial map f : X → Y, i.e.
/// the pullback f* : Tot(Y) → Tot(X). Both totals must share
/// (k, w_max, top_degree, normalized).
pub fn induced_total_map(
    f: &SimpLinMap,
    tot_y: &TotalComplexData,
    tot_x: &TotalComplexData,
) -> Result<Vec<Vec<RatMatrix>>, ModelError> {
    assert_eq!(tot_y.k, tot_x.k);
    assert_eq!(tot_y.w_max, tot_x.w_max);
    assert_eq!(tot_y.top_degree, tot_x.top_degree);
    let mut out = Vec::with_capacity(tot_y.blocks.len());
    for (by, bx) in tot_y.blocks.iter().zip(tot_x.blocks.iter()) {
        let mut per_degree = Vec::with_capacity(tot_y.top_degree + 1);
        for n in 0..=tot_y.top_degree {
            let mut m = RatMatrix::zeros(bx.complex.dims[n], by.complex.dims[n]);
            for (cyi, cy) in by.comps[n].iter().enumerate() {
                let Some(cxi) = bx.comps[n].iter().position(|c| c.p == cy.p && c.q == cy.q)
                else {
                    continue;
                };
                let cx = &bx.comps[n][cxi];
                let fp = f.levels[cy.p].clone();
                let full = cy.space.operator_matrix(&cx.space, |form| pullback(&fp, form))?;
                let reduced = express_in_basis(&cx.basis, &full.mul(&cy.basis))?;
                paste_block(&mut m, &reduced, bx.offsets[n][cxi], by.offsets[n][cyi]);
            }
            per_degree.push(m);
        }
        out.push(per_degree);
    }
    Ok(out)
}

/// Check that per-degree matrices form a cochain map.
pub fn is_cochain_map(src: &ChainComplexQ, tgt: &ChainComplexQ, levels: &[RatMatrix]) -> bool {
    for n in 0..src.maps.len().min(tgt.maps.len()) {
        if tgt.maps[n].mul(&levels[n]) != levels[n + 1].mul(&src.maps[n]) {
            return false;
        }
    }
    true
}

/// One degree of an induced-cohomology comparison.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InducedDegree {
    pub degree: usize,
    pub dim_source: usize,
    pub dim_target: usize,
    pub induced_rank: usize,
    pub iso: bool,
}

/// Compare cohomology along per-weight-block cochain maps, degree by degree
/// (dimensions summed over blocks; isomorphism required blockwise).
pub fn induced_cohomology_comparison(
    src: &TotalComplexData,
    tgt: &TotalComplexData,
    maps: &[Vec<RatMatrix>],
    up_to: usize,
) -> Result<Vec<InducedDegree>, ModelError> {
    let hs = src.homology();
    let ht = tgt.homology();
    compare_on_homology(
        &hs,
        &ht,
        maps,
        up_to,
        &src.blocks.iter().map(|b| b.complex.clone()).collect::<Vec<_>>(),
        &tgt.blocks.iter().map(|b| b.complex.clone()).collect::<Vec<_>>(),
    )
}

fn compare_on_homology(
    hs: &[Vec<HomologyDegree>],
    ht: &[Vec<HomologyDegree>],
    maps: &[Vec<RatMatrix>],
    up_to: usize,
    src_complexes: &[ChainComplexQ],
    tgt_complexes: &[ChainComplexQ],
) -> Result<Vec<InducedDegree>, ModelError> {
    let mut degrees: Vec<InducedDegree> = (0..=up_to)
        .map(|n| InducedDegree {
            degree: n,
            dim_source: 0,
            dim_target: 0,
            induced_rank: 0,
            iso: true,
        })
        .collect();
    for (b, (hb_s, hb_t)) in hs.iter().zip(ht.iter()).enumerate() {
        if !is_cochain_map(&src_complexes[b], &tgt_complexes[b], &maps[b]) {
            return Err(ModelError::Identity(format!(
                "induced map is not a cochain map in weight block {b}"
            )));
        }
        let induced = crate::exactla::induced_on_homology(hb_s, hb_t, &maps[b])?;
        for (n, d) in degrees.iter_mut().enumerate() {
            d.dim_source += hb_s[n].dim;
            d.dim_target += hb_t[n].dim;
            d.induced_rank += induced[n].rank();
            d.iso &= induced[n].rows() == induced[n].cols()
                && induced[n].rank() == induced[n].rows();
        }
    }
    Ok(degrees)
}

/// Truncated total cohomology in one degree, consulting only the levels the
/// degree needs. Exact; weight blocks up to w_max.
pub fn truncated_total_cohomology(
    x: &LinSimpSpace,
    k: usize,
    n: usize,
    w_max: usize,
) -> Result<CohomologyReport, ModelError> {
    let top = (n + 1).min(if n + 1 > k { k + x.max_level() } else { n + 1 });
    let tot = total_complex(x, k, w_max, top, true)?;
    let h = tot.homology();
    Ok(tot.report(&h, n))
}

/// Triple complex K^{r,p,q} of doubly-normalized forms on a Cech nerve with
/// D = δ₁ + (−1)^r δ₂ + (−1)^{r+p} d, weight-blocked.
#[derive(Debug, Clone)]
pub struct TripleComponent {
    pub r: usize,
    pub p: usize,
    pub q: usize,
    pub space: FormSpace,
    pub basis: RatMatrix,
}

impl TripleComponent {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

#[derive(Debug, Clone)]
pub struct TripleWeightBlock {
    pub w: usize,
    pub comps: Vec<Vec<TripleComponent>>,
    pub offsets: Vec<Vec<usize>>,
    pub complex: ChainComplexQ,
}

#[derive(Debug, Clone)]
pub struct TripleComplexData {
    pub k: usize,
    pub w_max: usize,
    pub top_degree: usize,
    pub blocks: Vec<TripleWeightBlock>,
}

/// Doubly-normalized basis on Z_{r,p}: killed by all vertical and horizontal
/// degeneracy pullbacks.
fn doubly_normalized(
    z: &BisimpLinSpace,
    r: usize,
    p: usize,
    q: usize,
    w: usize,
) -> Result<(FormSpace, RatMatrix), ModelError> {
    let space = FormSpace::new(z.dims[r][p], q, w);
    let mut rows = Vec::new();
    for t in 0..r {
        let below = FormSpace::new(z.dims[r - 1][p], q, w);
        let s = z.vdegen[r - 1][p][t].clone();
        rows.push(space.operator_matrix(&below, |f| pullback(&s, f))?);
    }
    for t in 0..p {
        let left = FormSpace::new(z.dims[r][p - 1], q, w);
        let s = z.hdegen[r][p - 1][t].clone();
        rows.push(space.operator_matrix(&left, |f| pullback(&s, f))?);
    }
    let stacked = RatMatrix::vstack_all(space.dim(), &rows);
    let basis = stacked.kernel_basis();
    Ok((space, basis))
}

/// Vertical (Cech) simplicial differential δ₁ : Ω(Z_{r,p}) → Ω(Z_{r+1,p}).
fn delta_vertical(z: &BisimpLinSpace, r: usize, p: usize, f: &PolyForm) -> PolyForm {
    let mut out = PolyForm::zero(z.dims[r + 1][p], f.degree);
    for t in 0..=(r + 1) {
        let term = pullback(&z.vface[r + 1][p][t], f);
        out = if t % 2 == 0 { out.add(&term) } else { out.sub(&term) };
    }
    out
}

/// Horizontal (model) simplicial differential δ₂ : Ω(Z_{r,p}) → Ω(Z_{r,p+1}).
fn delta_horizontal(z: &BisimpLinSpace, r: usize, p: usize, f: &PolyForm) -> PolyForm {
    let mut out = PolyForm::zero(z.dims[r][p + 1], f.degree);
    for t in 0..=(p + 1) {
        let term = pullback(&z.hface[r][p + 1][t], f);
        out = if t % 2 == 0 { out.add(&term) } else { out.sub(&term) };
    }
    out
}

/// Build the triple complex of a Cech nerve for total degrees 0..=top.
pub fn triple_complex(
    z: &BisimpLinSpace,
    k: usize,
    w_max: usize,
    top_degree: usize,
) -> Result<TripleComplexData, ModelError> {
    let ws: Vec<usize> = (k..=w_max.max(k)).collect();
    let blocks_res: Vec<Result<TripleWeightBlock, ModelError>> = par::map_slice(&ws, |&w| {
        let mut comps: Vec<Vec<TripleComponent>> = Vec::with_capacity(top_degree + 1);
        let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(top_degree + 1);
        for n in 0..=top_degree {
            let mut cs = Vec::new();
            let mut os = Vec::new();
            let mut off = 0usize;
            for r in 0..=n.min(z.max_row) {
                for p in 0..=(n - r).min(z.max_col) {
                    let q = n - r - p;
                    if q < k || q > w {
                        continue;
                    }
                    let (space, basis) = doubly_normalized(z, r, p, q, w)?;
                    os.push(off);
                    off += basis.cols();
                    cs.push(TripleComponent {
                        r,
                        p,
                        q,
                        space,
                        basis,
                    });
                }
            }
            comps.push(cs);
            offsets.push(os);
        }
        let dims: Vec<usize> = comps.iter().map(|cs| cs.iter().map(|c| c.dim()).sum()).collect();
        let mut maps = Vec::with_capacity(top_degree);
        for n in 0..top_degree {
            let mut d_n = RatMatrix::zeros(dims[n + 1], dims[n]);
            for (ci, comp) in comps[n].iter().enumerate() {
                let src_off = offsets[n][ci];
                let (r, p, q) = (comp.r, comp.p, comp.q);
                let mut targets: Vec<(usize, usize, usize, RatMatrix)> = Vec::new();
                if r + 1 <= z.max_row {
                    let tgt_space = FormSpace::new(z.dims[r + 1][p], q, w);
                    let full =
                        comp.space.operator_matrix(&tgt_space, |f| delta_vertical(z, r, p, f))?;
                    targets.push((r + 1, p, q, full));
                }
                if p + 1 <= z.max_col {
                    let tgt_space = FormSpace::new(z.dims[r][p + 1], q, w);
                    let full = comp
                        .space
                        .operator_matrix(&tgt_space, |f| delta_horizontal(z, r, p, f))?;
                    let signed = if r % 2 == 0 { full } else { full.neg() };
                    targets.push((r, p + 1, q, signed));
                }
                if q + 1 <= w {
                    let tgt_space = FormSpace::new(z.dims[r][p], q + 1, w);
                    let full = comp.space.operator_matrix(&tgt_space, de_rham_d)?;
                    let signed = if (r + p) % 2 == 0 { full } else { full.neg() };
                    targets.push((r, p, q + 1, signed));
                }
                for (tr, tp, tq, full) in targets {
                    if let Some(tj) = comps[n + 1]
                        .iter()
                        .position(|t| t.r == tr && t.p == tp && t.q == tq)
                    {
                        let tgt = &comps[n + 1][tj];
                        let reduced = express_in_basis(&tgt.basis, &full.mul(&comp.basis))?;
                        paste_block(&mut d_n, &reduced, offsets[n + 1][tj], src_off);
                    }
                }
            }
            maps.push(d_n);
        }
        let complex = ChainComplexQ::new(0, dims, maps, Orientation::Cochain)?;
        Ok(TripleWeightBlock {
            w,
            comps,
            offsets,
            complex,
        })
    });
    let mut blocks = Vec::with_capacity(blocks_res.len());
    for b in blocks_res {
        blocks.push(b?);
    }
    Ok(TripleComplexData {
        k,
        w_max: w_max.max(k),
        top_degree,
        blocks,
    })
}

impl TripleComplexData {
    pub fn homology(&self) -> Vec<Vec<HomologyDegree>> {
        par::map_slice(&self.blocks, |b| b.complex.homology())
    }
}

/// Augmentation map from the total complex of the base (forms on Y) into the
/// triple complex of a Cech nerve over Y: component (p, q) ↦ (0, p, q) via
/// pullback along the augmentation Z_{0,p} = X_p → Y_p.
pub fn augmentation_total_map(
    z: &BisimpLinSpace,
    tot_y: &TotalComplexData,
    triple: &TripleComplexData,
) -> Result<Vec<Vec<RatMatrix>>, ModelError> {
    assert_eq!(tot_y.k, triple.k);
    assert_eq!(tot_y.w_max, triple.w_max);
    assert_eq!(tot_y.top_degree, triple.top_degree);
    let mut out = Vec::with_capacity(tot_y.blocks.len());
    for (by, bk) in tot_y.blocks.iter().zip(triple.blocks.iter()) {
        let mut per_degree = Vec::with_capacity(tot_y.top_degree + 1);
        for n in 0..=tot_y.top_degree {
            let mut m = RatMatrix::zeros(bk.complex.dims[n], by.complex.dims[n]);
            for (cyi, cy) in by.comps[n].iter().enumerate() {
                let Some(cki) = bk.comps[n]
                    .iter()
                    .position(|c| c.r == 0 && c.p == cy.p && c.q == cy.q)
                else {
                    continue;
                };
                let ck = &bk.comps[n][cki];
                let aug = z.aug[cy.p].clone();
                let full = cy.space.operator_matrix(&ck.space, |f| pullback(&aug, f))?;
                let reduced = express_in_basis(&ck.basis, &full.mul(&cy.basis))?;
                paste_block(&mut m, &reduced, bk.offsets[n][cki], by.offsets[n][cyi]);
            }
            per_degree.push(m);
        }
        out.push(per_degree);
    }
    Ok(out)
}

/// Exactness of the augmented rows of the triple complex: for every
/// (p, q, w) present, the row 0 → Ω̂^q(Y_p) → K^{0,p,q} → K^{1,p,q} → …
/// must be exact at every position the stored nerve can certify.
pub fn augmented_rows_exact(
    z: &BisimpLinSpace,
    tot_y: &TotalComplexData,
    triple: &TripleComplexData,
) -> Result<bool, ModelError> {
    for (by, bk) in tot_y.blocks.iter().zip(triple.blocks.iter()) {
        let w = bk.w;
        let mut pairs = Vec::new();
        for cs in &bk.comps {
            for c in cs {
                if !pairs.contains(&(c.p, c.q)) {
                    pairs.push((c.p, c.q));
                }
            }
        }
        for (p, q) in pairs {
            let mut spaces = Vec::new();
            for r in 0..=z.max_row {
                spaces.push(doubly_normalized(z, r, p, q, w)?);
            }
            let y_comp = by.comps.iter().flatten().find(|c| c.p == p && c.q == q);
            let aug_mat = match y_comp {
                Some(cy) => {
                    let aug = z.aug[p].clone();
                    let full = cy.space.operator_matrix(&spaces[0].0, |f| pullback(&aug, f))?;
                    express_in_basis(&spaces[0].1, &full.mul(&cy.basis))?
                }
                None => RatMatrix::zeros(spaces[0].1.cols(), 0),
            };
            let mut row_maps = Vec::new();
            for r in 0..z.max_row {
                let full = spaces[r]
                    .0
                    .operator_matrix(&spaces[r + 1].0, |f| delta_vertical(z, r, p, f))?;
                row_maps.push(express_in_basis(&spaces[r + 1].1, &full.mul(&spaces[r].1))?);
            }
            if aug_mat.rank() != aug_mat.cols() {
                return Ok(false);
            }
            let mut prev_rank = aug_mat.rank();
            for r in 0..z.max_row {
                let ker = spaces[r].1.cols() - row_maps[r].rank();
                if ker != prev_rank {
                    return Ok(false);
                }
                prev_rank = row_maps[r].rank();
            }
        }
    }
    Ok(true)
}

/// The Eilenberg-Zilber base map Ẑ_{i+j} → Z_{i,j}: vertical front faces
/// (d_{i+1} applied j times) followed by horizontal back faces (d̄_0 applied
/// i times).
pub fn ez_base_matrix(z: &BisimpLinSpace, i: usize, j: usize) -> RatMatrix {
    let l = i + j;
    let mut m = RatMatrix::identity(z.dims[l][l]);
    for r in ((i + 1)..=l).rev() {
        m = z.vface[r][l][i + 1].clone().mul(&m);
    }
    for s in ((j + 1)..=l).rev() {
        m = z.hface[i][s][0].clone().mul(&m);
    }
    m
}

/// Single-form Eilenberg-Zilber component: a form at bidegree (i, j) pulled
/// back to the diagonal level i + j.
pub fn ez_diagonal(z: &BisimpLinSpace, i: usize, j: usize, form: &PolyForm) -> PolyForm {
    pullback(&ez_base_matrix(z, i, j), form)
}

/// The Eilenberg-Zilber map of total complexes: triple total → diagonal
/// double total, per weight block per degree. The diagonal total must be
/// built from `z.diagonal()` with matching (k, w_max, top, normalized).
pub fn ez_total_map(
    z: &BisimpLinSpace,
    triple: &TripleComplexData,
    diag_tot: &TotalComplexData,
) -> Result<Vec<Vec<RatMatrix>>, ModelError> {
    assert_eq!(triple.k, diag_tot.k);
    assert_eq!(triple.w_max, diag_tot.w_max);
    assert_eq!(triple.top_degree, diag_tot.top_degree);
    let mut out = Vec::with_capacity(triple.blocks.len());
    for (bk, bd) in triple.blocks.iter().zip(diag_tot.blocks.iter()) {
        let mut per_degree = Vec::with_capacity(triple.top_degree + 1);
        for n in 0..=triple.top_degree {
            let mut m = RatMatrix::zeros(bd.complex.dims[n], bk.complex.dims[n]);
            for (cki, ck) in bk.comps[n].iter().enumerate() {
                let Some(cdi) =
                    bd.comps[n].iter().position(|c| c.p == ck.r + ck.p && c.q == ck.q)
                else {
                    continue;
                };
                let cd = &bd.comps[n][cdi];
                let base = ez_base_matrix(z, ck.r, ck.p);
                let full = ck.space.operator_matrix(&cd.space, |f| pullback(&base, f))?;
                let reduced = express_in_basis(&cd.basis, &full.mul(&ck.basis))?;
                paste_block(&mut m, &reduced, bd.offsets[n][cdi], bk.offsets[n][cki]);
            }
            per_degree.push(m);
        }
        out.push(per_degree);
    }
    Ok(out)
}

/// Triple-complex lemma, executed: given the Cech nerve of a hypercover over
/// Y and the total complex of Y, verify that the augmented rows are exact
/// and that the augmentation induces an isomorphism on total cohomology in
/// degrees ≤ `up_to`.
pub fn verify_triple_lemma(
    z: &BisimpLinSpace,
    tot_y: &TotalComplexData,
    up_to: usize,
) -> Result<Vec<InducedDegree>, ModelError> {
    let triple = triple_complex(z, tot_y.k, tot_y.w_max, tot_y.top_degree)?;
    if !augmented_rows_exact(z, tot_y, &triple)? {
        return Err(ModelError::Precondition(
            "augmented rows of the triple complex are not exact".into(),
        ));
    }
    let maps = augmentation_total_map(z, tot_y, &triple)?;
    let hs = tot_y.homology();
    let ht = triple.homology();
    compare_on_homology(
        &hs,
        &ht,
        &maps,
        up_to,
        &tot_y.blocks.iter().map(|b| b.complex.clone()).collect::<Vec<_>>(),
        &triple.blocks.iter().map(|b| b.complex.clone()).collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rat, ratio};
    use crate::linmodel::dold_kan;

    fn constant_model(d: usize, levels: usize) -> LinSimpSpace {
        let c = ChainComplexQ::new(0, vec![d], vec![], Orientation::Chain).unwrap();
        dold_kan(&c, levels).unwrap()
    }

    #[test]
    fn de_rham_product_rule() {
        // d(x₀ dx₁) = dx₀ ∧ dx₁
        let mut f = PolyForm::zero(2, 1);
        f.add_term(vec![1, 0], vec![1], rat(1));
        let df = de_rham_d(&f);
        let mut expected = PolyForm::zero(2, 2);
        expected.add_term(vec![0, 0], vec![0, 1], rat(1));
        assert_eq!(df, expected);
        let c = PolyForm::constant_two_form(&RatMatrix::from_i64(&[&[0, 3], &[-3, 0]]));
        assert!(de_rham_d(&c).is_zero());
    }

    #[test]
    fn d_squared_is_zero_on_many_forms() {
        for seed in 0..50i64 {
            let mut f = PolyForm::zero(3, 1);
            f.add_term(vec![2, 0, 0], vec![0], rat(seed % 5 - 2));
            f.add_term(vec![0, 1, 1], vec![1], rat((seed * 3) % 7 - 3));
            f.add_term(vec![1, 1, 0], vec![2], ratio(seed % 4 + 1, 3));
            assert!(de_rham_d(&de_rham_d(&f)).is_zero());
        }
    }

    #[test]
    fn pullback_examples() {
        let omega = PolyForm::constant_two_form(&RatMatrix::from_i64(&[&[0, 1], &[-1, 0]]));
        assert_eq!(pullback(&RatMatrix::identity(2), &omega), omega);
        // Gram transforms by congruence
        let a = RatMatrix::from_i64(&[&[1, 2], &[0, 1]]);
        let pulled = pullback(&a, &omega);
        let expected = a.transpose().mul(&omega.gram_of_constant_part()).mul(&a);
        assert_eq!(pulled.gram_of_constant_part(), expected);
        // zero matrix kills forms without constant function part
        let mut f = PolyForm::zero(2, 1);
        f.add_term(vec![1, 0], vec![0], rat(1));
        assert!(pullback(&RatMatrix::zeros(2, 2), &f).is_zero());
        assert_eq!(pulled.max_weight(), omega.max_weight());
    }

    #[test]
    fn delta_on_level_one_is_face_difference() {
        let c = ChainComplexQ::new(
            0,
            vec![1, 1],
            vec![RatMatrix::zeros(1, 1)],
            Orientation::Chain,
        )
        .unwrap();
        let x = dold_kan(&c, 2).unwrap();
        let mut f = PolyForm::zero(1, 0);
        f.add_term(vec![1], vec![], rat(1));
        let lhs = simplicial_delta(&x, 1, &f);
        let rhs = pullback(x.face_mat(1, 0), &f).sub(&pullback(x.face_mat(1, 1), &f));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn constant_model_delta_alternates() {
        let x = constant_model(2, 3);
        let omega = PolyForm::constant_two_form(&RatMatrix::from_i64(&[&[0, 1], &[-1, 0]]));
        // into odd level: zero; into even level: the identity
        assert!(simplicial_delta(&x, 1, &omega).is_zero());
        assert_eq!(simplicial_delta(&x, 2, &omega), omega);
        assert!(simplicial_delta(&x, 3, &simplicial_delta(&x, 2, &omega)).is_zero());
    }

    #[test]
    fn delta_squared_zero_and_mixed_component_cancels() {
        let dmat = RatMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        let c = ChainComplexQ::new(0, vec![2, 2], vec![dmat], Orientation::Chain).unwrap();
        let x = dold_kan(&c, 3).unwrap();
        let mut f = PolyForm::zero(x.dim(0), 1);
        f.add_term(vec![1, 0], vec![0], rat(2));
        f.add_term(vec![0, 0], vec![1], rat(1));
        assert!(simplicial_delta(&x, 2, &simplicial_delta(&x, 1, &f)).is_zero());
        // mixed component of D²: δ(dω) − d(δω) = 0 since pullbacks commute
        // with d
        let mixed =
            simplicial_delta(&x, 1, &de_rham_d(&f)).sub(&de_rham_d(&simplicial_delta(&x, 1, &f)));
        assert!(mixed.is_zero());
    }

    #[test]
    fn normalized_level_zero_unconstrained() {
        let x = constant_model(2, 2);
        let (space, basis) = normalized_basis(&x, 0, 1, 2).unwrap();
        assert_eq!(basis.cols(), space.dim());
    }

    #[test]
    fn constant_model_normalized_vanish_positive_levels() {
        let x = constant_model(2, 3);
        for p in 1..=2usize {
            for (q, w) in [(1usize, 1usize), (1, 2), (2, 2)] {
                let (_, basis) = normalized_basis(&x, p, q, w).unwrap();
                assert_eq!(basis.cols(), 0, "p={p} q={q} w={w}");
            }
        }
    }

    #[test]
    fn point_model_cohomology() {
        let x = constant_model(0, 3);
        let h = truncated_total_cohomology(&x, 0, 0, 2).unwrap();
        assert_eq!(h.dim(0), 1);
        let h2 = truncated_total_cohomology(&x, 2, 1, 3).unwrap();
        assert_eq!(h2.dim(0), 0);
        assert_eq!(h2.dim(1), 0);
    }

    #[test]
    fn constant_model_total_cohomology_is_truncated_de_rham() {
        let x = constant_model(2, 4);
        let tot = total_complex(&x, 0, 2, 3, true).unwrap();
        let h = tot.homology();
        assert_eq!(TotalComplexData::cohomology_dim(&h, 0), 1);
        for n in 1..=2 {
            assert_eq!(TotalComplexData::cohomology_dim(&h, n), 0, "degree {n}");
        }
        let tot2 = total_complex(&x, 2, 2, 3, true).unwrap();
        let h2 = tot2.homology();
        assert_eq!(TotalComplexData::cohomology_dim(&h2, 2), 1);
        assert_eq!(TotalComplexData::cohomology_dim(&h2, 3), 0);
    }

    #[test]
    fn cohomology_stable_under_extra_levels() {
        let dmat = RatMatrix::from_i64(&[&[1], &[0]]);
        let c = ChainComplexQ::new(0, vec![2, 1], vec![dmat], Orientation::Chain).unwrap();
        let x4 = dold_kan(&c, 4).unwrap();
        let x5 = dold_kan(&c, 5).unwrap();
        let a = truncated_total_cohomology(&x4, 2, 3, 2).unwrap();
        let b = truncated_total_cohomology(&x5, 2, 3, 2).unwrap();
        assert_eq!(a.dims, b.dims);
    }

    #[test]
    fn normalized_and_full_cohomology_agree() {
        let dmat = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let c = ChainComplexQ::new(0, vec![2, 2], vec![dmat], Orientation::Chain).unwrap();
        let x = dold_kan(&c, 4).unwrap();
        // build one degree past the comparison range: cohomology in degree n
        // needs the complex through n+1
        let norm = total_complex(&x, 2, 2, 4, true).unwrap();
        let full = total_complex(&x, 2, 2, 4, false).unwrap();
        let hn = norm.homology();
        let hf = full.homology();
        for n in 0..=3 {
            assert_eq!(
                TotalComplexData::cohomology_dim(&hn, n),
                TotalComplexData::cohomology_dim(&hf, n),
                "degree {n}"
            );
        }
    }
}
