//! Shifted symplectic structures on linear Lie n-groupoid models.
//!
//! An m-shifted k-form is a collection of normalized components α_i of form
//! degree k+m−i on level i. Closedness is the exact component system of the
//! total differential; non-degeneracy is perfection of the shuffle pairing
//! descended to tangent homology. The transfer of a shifted symplectic form
//! along a zig-zag of hypercovers is an exact linear solve inside the
//! normalized, truncated, weight-bounded total complexes, verified by the
//! symplectic and Morita checks afterwards.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exactla::{solve_many, Rat, RatMatrix};
use crate::forms::{
    de_rham_d, form_from_wire, form_to_wire, is_normalized, normalized_basis, pullback,
    simplicial_delta, FormSpace, FormWire, PolyForm,
};
use crate::linmodel::{check_hypercover, fiber_product, LinSimpSpace, ModelError, SimpLinMap};
use crate::tangent::{tangent_complex, TangentComplexData};

/// Level-indexed collection α_0 … α_m forming an m-shifted k-form; the
/// component α_i lives on X_i and has form degree k+m−i. `shift = −1` is the
/// empty collection (the zero (−1)-shifted form, which appears as the gauge
/// of a 0-shifted transfer).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedForm {
    pub shift: i64,
    pub k: usize,
    pub components: Vec<PolyForm>,
}

impl ShiftedForm {
    pub fn new(shift: i64, k: usize, components: Vec<PolyForm>) -> Self {
        assert_eq!(components.len() as i64, (shift + 1).max(0));
        ShiftedForm {
            shift,
            k,
            components,
        }
    }

    /// The zero m-shifted k-form on a model.
    pub fn zero(x: &LinSimpSpace, shift: i64, k: usize) -> Self {
        let components = (0..=shift.max(-1))
            .filter(|i| *i >= 0)
            .map(|i| PolyForm::zero(x.dim(i as usize), k + (shift - i) as usize))
            .collect();
        ShiftedForm {
            shift,
            k,
            components,
        }
    }

    pub fn component(&self, i: usize) -> Option<&PolyForm> {
        self.components.get(i)
    }

    /// Structural check against a model: component count, ambient
    /// dimensions, form degrees.
    pub fn validate_shape(&self, x: &LinSimpSpace) -> Result<(), ModelError> {
        if self.components.len() as i64 != (self.shift + 1).max(0) {
            return Err(ModelError::Shape("component count".into()));
        }
        if self.shift >= 0 && x.max_level() < self.shift as usize {
            return Err(ModelError::InsufficientLevels {
                have: x.max_level(),
                need: self.shift as usize,
            });
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.ambient != x.dim(i) {
                return Err(ModelError::Shape(format!("component {i} ambient dimension")));
            }
            let expected = self.k + (self.shift as usize - i);
            if c.degree != expected {
                return Err(ModelError::Shape(format!(
                    "component {i} has degree {}, expected {expected}",
                    c.degree
                )));
            }
        }
        Ok(())
    }

    /// Maximal weight over all components (at least k).
    pub fn max_weight(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.max_weight())
            .max()
            .unwrap_or(self.k)
            .max(self.k)
    }

    pub fn add(&self, other: &ShiftedForm) -> ShiftedForm {
        assert_eq!(self.shift, other.shift);
        assert_eq!(self.k, other.k);
        ShiftedForm {
            shift: self.shift,
            k: self.k,
            components: self
                .components
                .iter()
                .zip(other.components.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> ShiftedForm {
        ShiftedForm {
            shift: self.shift,
            k: self.k,
            components: self.components.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }
}

/// The total differential D applied to an m-shifted k-form, as the
/// (m+1)-shifted k-form with components (Dφ)_i = δφ_{i−1} + (−1)^i dφ_i.
pub fn total_differential(x: &LinSimpSpace, phi: &ShiftedForm) -> ShiftedForm {
    let m = phi.shift;
    let out_shift = m + 1;
    let mut components = Vec::new();
    for i in 0..=out_shift.max(-1) {
        if i < 0 || out_shift < 0 {
            continue;
        }
        let iu = i as usize;
        let degree = phi.k + (out_shift - i) as usize;
        let mut c = PolyForm::zero(x.dim(iu), degree);
        if i <= m {
            let d_part = de_rham_d(&phi.components[iu]);
            c = if iu % 2 == 0 { c.add(&d_part) } else { c.sub(&d_part) };
        }
        if i >= 1 && i - 1 <= m {
            c = c.add(&simplicial_delta(x, iu, &phi.components[iu - 1]));
        }
        components.push(c);
    }
    ShiftedForm {
        shift: out_shift,
        k: phi.k,
        components,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PresymplecticReport {
    pub pass: bool,
    pub normalized: bool,
    pub closed: bool,
    /// δα_m = 0, the top closedness component.
    pub multiplicative: bool,
    pub issues: Vec<String>,
}

/// Closed-and-normalized check for an m-shifted 2-form. Closedness is the
/// component system dα_0 = 0, δα_{i−1} + (−1)^i dα_i = 0, δα_m = 0; the
/// last equation needs model level m+1.
pub fn check_presymplectic(
    x: &LinSimpSpace,
    alpha: &ShiftedForm,
) -> Result<PresymplecticReport, ModelError> {
    if alpha.k != 2 {
        return Err(ModelError::Precondition(format!(
            "presymplectic check needs a 2-form, got k = {}",
            alpha.k
        )));
    }
    alpha.validate_shape(x)?;
    let m = alpha.shift;
    if m >= 0 && x.max_level() < (m + 1) as usize {
        return Err(ModelError::InsufficientLevels {
            have: x.max_level(),
            need: (m + 1) as usize,
        });
    }
    let mut issues = Vec::new();
    let mut normalized = true;
    for (i, c) in alpha.components.iter().enumerate() {
        if !is_normalized(x, i, c) {
            normalized = false;
            issues.push(format!("component {i} is not normalized"));
        }
    }
    let mut closed = true;
    let mut multiplicative = true;
    if m >= 0 {
        let mu = m as usize;
        for i in 0..=(mu + 1) {
            let degree = 3 + mu - i;
            let mut c = PolyForm::zero(x.dim(i), degree);
            if i <= mu {
                let d_part = de_rham_d(&alpha.components[i]);
                c = if i % 2 == 0 { c.add(&d_part) } else { c.sub(&d_part) };
            }
            if i >= 1 {
                c = c.add(&simplicial_delta(x, i, &alpha.components[i - 1]));
            }
            if !c.is_zero() {
                closed = false;
                if i == mu + 1 {
                    multiplicative = false;
                    issues.push(format!("δα_{mu} ≠ 0 (top component not multiplicative)"));
                } else {
                    issues.push(format!("closedness fails in the level-{i} component"));
                }
            }
        }
    }
    Ok(PresymplecticReport {
        pass: normalized && closed,
        normalized,
        closed,
        multiplicative,
        issues,
    })
}

/// All (a, b)-shuffles as (full value vector, sign).
pub fn shuffles(a: usize, b: usize) -> Vec<(Vec<usize>, i64)> {
    let n = a + b;
    fn rec(n: usize, a: usize, start: usize, choose: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, i64)>) {
        if choose.len() == a {
            let mut sigma = choose.clone();
            sigma.extend((0..n).filter(|v| !choose.contains(v)));
            let mut inv = 0usize;
            for i in 0..n {
                for j in (i + 1)..n {
                    if sigma[i] > sigma[j] {
                        inv += 1;
                    }
                }
            }
            out.push((sigma, if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in start..n {
            choose.push(v);
            rec(n, a, v + 1, choose, out);
            choose.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, a, 0, &mut Vec::new(), &mut out);
    out
}

/// Composite of degeneracies s_{idx[t]} applied in sequence starting at
/// `from_level`: X_from → X_{from + idx.len()}.
fn degeneracy_chain(x: &LinSimpSpace, from_level: usize, idx: &[usize]) -> RatMatrix {
    let mut m = RatMatrix::identity(x.dim(from_level));
    let mut lv = from_level;
    for &i in idx {
        m = x.degen_mat(lv, i).mul(&m);
        lv += 1;
    }
    m
}

/// The IM pairing data of an m-shifted presymplectic form: per degree l the
/// Gram matrix of the shuffle pairing 𝒯_l × 𝒯_{m−l} → Q at the base point,
/// and its descent to homology representatives.
#[derive(Debug, Clone)]
pub struct IMForMatrix {
    pub shift: usize,
    /// blocks[l] : dim 𝒯_l × dim 𝒯_{m−l}, for 0 ≤ l ≤ m.
    pub blocks: Vec<RatMatrix>,
    /// descended[l] : dim H_l × dim H_{m−l}.
    pub descended: Vec<RatMatrix>,
    /// homology dimensions of the tangent complex, degrees 0..=n.
    pub h_dims: Vec<usize>,
}

/// Evaluate the shuffle pairing of the top component α_m on the tangent
/// complex at the base point: only the constant, degree-2 part of α_m
/// contributes.
pub fn im_pairing(
    x: &LinSimpSpace,
    alpha: &ShiftedForm,
    t: &TangentComplexData,
) -> Result<IMForMatrix, ModelError> {
    if alpha.shift < 0 {
        return Err(ModelError::Precondition("pairing needs shift ≥ 0".into()));
    }
    let m = alpha.shift as usize;
    alpha.validate_shape(x)?;
    let gram_top = alpha.components[m].gram_of_constant_part();
    let homology = t.homology();
    let h_dims: Vec<usize> = homology.iter().map(|h| h.dim).collect();
    let mut blocks = Vec::with_capacity(m + 1);
    let mut descended = Vec::with_capacity(m + 1);
    for l in 0..=m {
        let dim_l = t.dim(l);
        let dim_part = t.dim(m - l);
        let mut block = RatMatrix::zeros(dim_l, dim_part);
        if dim_l > 0 && dim_part > 0 {
            let incl_v = &t.inclusions[l];
            let incl_w = &t.inclusions[m - l];
            for (sigma, sign) in shuffles(l, m - l) {
                // first block (length l) pushes w up, second pushes v up
                let v_chain = degeneracy_chain(x, l, &sigma[l..]);
                let w_chain = degeneracy_chain(x, m - l, &sigma[..l]);
                let lifted_v = v_chain.mul(incl_v);
                let lifted_w = w_chain.mul(incl_w);
                let term = lifted_v.transpose().mul(&gram_top).mul(&lifted_w);
                block = if sign > 0 { block.add(&term) } else { block.sub(&term) };
            }
        }
        let zero_l = RatMatrix::zeros(dim_l, 0);
        let zero_p = RatMatrix::zeros(dim_part, 0);
        let reps_l = homology.get(l).map(|h| &h.representatives).unwrap_or(&zero_l);
        let reps_p = homology.get(m - l).map(|h| &h.representatives).unwrap_or(&zero_p);
        descended.push(reps_l.transpose().mul(&block).mul(reps_p));
        blocks.push(block);
    }
    Ok(IMForMatrix {
        shift: m,
        blocks,
        descended,
        h_dims,
    })
}

/// Infinitesimal multiplicativity: λ(∂u, w) + (−1)^{l+1} λ(u, ∂w) = 0 as
/// exact matrix identities for all adjacent degrees. On pass, the pairing
/// descends to homology.
pub fn check_im_multiplicative(lambda: &IMForMatrix, t: &TangentComplexData) -> bool {
    let m = lambda.shift;
    for l in 0..m {
        let d_next = t.differential(l + 1); // 𝒯_{l+1} → 𝒯_l
        let d_part = t.differential(m - l); // 𝒯_{m−l} → 𝒯_{m−l−1}
        let lhs = d_next.transpose().mul(&lambda.blocks[l]);
        let rhs = lambda.blocks[l + 1].mul(&d_part);
        let total = if (l + 1) % 2 == 0 { lhs.add(&rhs) } else { lhs.sub(&rhs) };
        if !total.is_zero() {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingBlockReport {
    pub l: i64,
    pub dim_h: usize,
    pub dim_partner: usize,
    pub rank: usize,
    pub perfect: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymplecticReport {
    pub pass: bool,
    pub presymplectic: PresymplecticReport,
    pub im_multiplicative: bool,
    pub blocks: Vec<PairingBlockReport>,
}

impl SymplecticReport {
    pub fn first_degenerate(&self) -> Option<&PairingBlockReport> {
        self.blocks.iter().find(|b| !b.perfect)
    }
}

/// Full shifted-symplectic check: presymplectic, infinitesimally
/// multiplicative, and the descended pairing H_l × H_{m−l} perfect for every
/// l (equal dimensions and invertible Gram). Runs the Lie n-groupoid check
/// through the tangent complex.
pub fn check_shifted_symplectic(
    x: &LinSimpSpace,
    alpha: &ShiftedForm,
    n: usize,
) -> Result<SymplecticReport, ModelError> {
    let t = tangent_complex(x, n)?;
    check_shifted_symplectic_with(x, alpha, n, &t)
}

/// Same check reusing a precomputed tangent complex.
pub fn check_shifted_symplectic_with(
    x: &LinSimpSpace,
    alpha: &ShiftedForm,
    n: usize,
    t: &TangentComplexData,
) -> Result<SymplecticReport, ModelError> {
    let presymplectic = check_presymplectic(x, alpha)?;
    let m = alpha.shift;
    if m < 0 {
        return Err(ModelError::Precondition("symplectic form needs shift ≥ 0".into()));
    }
    let lambda = im_pairing(x, alpha, t)?;
    let im_multiplicative = check_im_multiplicative(&lambda, t);
    let h = &lambda.h_dims;
    let hdim = |l: i64| -> usize {
        if l < 0 {
            0
        } else {
            h.get(l as usize).copied().unwrap_or(0)
        }
    };
    let mut blocks = Vec::new();
    let top = (n as i64).max(m);
    for l in 0..=top {
        let partner = m - l;
        let dim_h = hdim(l);
        let dim_partner = hdim(partner);
        if dim_h == 0 && dim_partner == 0 {
            continue;
        }
        let rank = if (0..=m).contains(&l) {
            lambda.descended[l as usize].rank()
        } else {
            0
        };
        let perfect = dim_h == dim_partner && rank == dim_h;
        blocks.push(PairingBlockReport {
            l,
            dim_h,
            dim_partner,
            rank,
            perfect,
        });
    }
    let pass = presymplectic.pass && im_multiplicative && blocks.iter().all(|b| b.perfect);
    Ok(SymplecticReport {
        pass,
        presymplectic,
        im_multiplicative,
        blocks,
    })
}

/// Componentwise pullback of a shifted form along a simplicial map.
pub fn pullback_shifted(f: &SimpLinMap, alpha: &ShiftedForm) -> ShiftedForm {
    ShiftedForm {
        shift: alpha.shift,
        k: alpha.k,
        components: alpha
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| pullback(&f.levels[i], c))
            .collect(),
    }
}

/// Gauge transformation α ↦ α + Dφ by an (m−1)-shifted 2-form.
pub fn gauge_transform(
    x: &LinSimpSpace,
    alpha: &ShiftedForm,
    phi: &ShiftedForm,
) -> Result<ShiftedForm, ModelError> {
    if phi.shift != alpha.shift - 1 || phi.k != alpha.k {
        return Err(ModelError::Shape(format!(
            "gauge form must be a {}-shifted {}-form",
            alpha.shift - 1,
            alpha.k
        )));
    }
    phi.validate_shape(x)?;
    Ok(alpha.add(&total_differential(x, phi)))
}

#[derive(Debug, Clone, Serialize)]
pub struct MoritaReport {
    pub pass: bool,
    pub left_hypercover: bool,
    pub right_hypercover: bool,
    pub alpha_symplectic: bool,
    pub beta_symplectic: bool,
    pub gauge_equation: bool,
}

/// Symplectic Morita equivalence data: (left, α) ⇐f (middle, gauge) g⇒
/// (right, β) with f*α − g*β = D(gauge).
#[derive(Debug, Clone)]
pub struct MoritaEquivalence {
    pub alpha: ShiftedForm,
    pub beta: ShiftedForm,
    pub gauge: ShiftedForm,
    pub to_left: SimpLinMap,
    pub to_right: SimpLinMap,
}

/// Verify a symplectic Morita equivalence: both legs are hypercovers, both
/// forms are shifted symplectic, and f*α − g*β = Dφ holds exactly.
pub fn check_symplectic_morita(
    e: &MoritaEquivalence,
    n: usize,
) -> Result<MoritaReport, ModelError> {
    let x = &e.to_left.target;
    let y = &e.to_right.target;
    let z = &e.to_left.source;
    if e.to_right.source != *z {
        return Err(ModelError::LevelMismatch("legs must share the middle model".into()));
    }
    let left_hypercover = check_hypercover(&e.to_left, n)?.pass;
    let right_hypercover = check_hypercover(&e.to_right, n)?.pass;
    let alpha_symplectic = check_shifted_symplectic(x, &e.alpha, n)?.pass;
    let beta_symplectic = check_shifted_symplectic(y, &e.beta, n)?.pass;
    let lhs = pullback_shifted(&e.to_left, &e.alpha)
        .add(&pullback_shifted(&e.to_right, &e.beta).neg());
    let rhs = total_differential(z, &e.gauge);
    let gauge_equation = lhs == rhs;
    Ok(MoritaReport {
        pass: left_hypercover
            && right_hypercover
            && alpha_symplectic
            && beta_symplectic
            && gauge_equation,
        left_hypercover,
        right_hypercover,
        alpha_symplectic,
        beta_symplectic,
        gauge_equation,
    })
}

#[derive(Debug)]
pub enum TransferError {
    /// Inputs violate the hypercover / symplectic preconditions.
    Precondition(String),
    /// The bounded solve is infeasible; carries the certificate row
    /// combination and the weight block. Raising the bound may help.
    InfeasibleWithinWeight { weight: usize, certificate: Vec<Rat> },
    Model(ModelError),
}

impl std::fmt::Display for TransferError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TransferError::Precondition(s) => write!(f, "transfer precondition fails: {s}"),
            TransferError::InfeasibleWithinWeight { weight, .. } => write!(
                f,
                "transfer system infeasible within weight bound {weight}; consider raising --weight"
            ),
            TransferError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for TransferError {}

impl From<ModelError> for TransferError {
    fn from(e: ModelError) -> Self {
        TransferError::Model(e)
    }
}

#[derive(Debug, Clone)]
pub struct TransferOutput {
    pub beta: ShiftedForm,
    /// φ with h*β = g*α + Dφ; the Morita verification uses −φ.
    pub phi: ShiftedForm,
    pub beta_report: SymplecticReport,
    pub morita_report: MoritaReport,
}

/// Transfer an m-shifted symplectic form along a zig-zag of hypercovers
/// g : Z → X, h : Z → Y. Solves {Dβ = 0, h*β − Dφ = g*α} per weight block in
/// the normalized complexes and verifies the outcome by the symplectic and
/// Morita checks.
pub fn transfer_symplectic(
    g: &SimpLinMap,
    h: &SimpLinMap,
    alpha: &ShiftedForm,
    n: usize,
    weight_bound: Option<usize>,
) -> Result<TransferOutput, TransferError> {
    if g.source != h.source {
        return Err(TransferError::Precondition(
            "zig-zag legs must share the source model".into(),
        ));
    }
    let x = &g.target;
    let y = &h.target;
    let z = &g.source;
    if alpha.shift < 0 || alpha.k != 2 {
        return Err(TransferError::Precondition("transfer needs an m-shifted 2-form".into()));
    }
    let m = alpha.shift as usize;
    let need = (n + 2).max(m + 1);
    if g.max_level() < need || h.max_level() < need {
        return Err(TransferError::Model(ModelError::InsufficientLevels {
            have: g.max_level().min(h.max_level()),
            need,
        }));
    }
    let gc = check_hypercover(g, n)?;
    if !gc.pass {
        return Err(TransferError::Precondition(format!(
            "g is not a hypercover: {:?}",
            gc.first_failure()
        )));
    }
    let hc = check_hypercover(h, n)?;
    if !hc.pass {
        return Err(TransferError::Precondition(format!(
            "h is not a hypercover: {:?}",
            hc.first_failure()
        )));
    }
    let alpha_report = check_shifted_symplectic(x, alpha, n)?;
    if !alpha_report.pass {
        return Err(TransferError::Precondition("α is not shifted symplectic".into()));
    }
    let w_max = weight_bound.unwrap_or_else(|| alpha.max_weight()).max(2);
    let pulled = pullback_shifted(g, alpha);

    let mut beta_components: Vec<PolyForm> =
        (0..=m).map(|i| PolyForm::zero(y.dim(i), 2 + m - i)).collect();
    let mut phi_components: Vec<PolyForm> =
        (0..m).map(|j| PolyForm::zero(z.dim(j), 1 + m - j)).collect();

    for w in 2..=w_max {
        // unknowns: β components in normalized bases on Y, then φ on Z
        let mut beta_spaces: Vec<(FormSpace, RatMatrix)> = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let q = 2 + m - i;
            if q > w {
                let space = FormSpace::new(y.dim(i), q, q);
                let zero = RatMatrix::zeros(space.dim(), 0);
                beta_spaces.push((space, zero));
            } else {
                beta_spaces.push(normalized_basis(y, i, q, w)?);
            }
        }
        let mut phi_spaces: Vec<(FormSpace, RatMatrix)> = Vec::with_capacity(m);
        for j in 0..m {
            let q = 1 + m - j;
            if q > w {
                let space = FormSpace::new(z.dim(j), q, q);
                let zero = RatMatrix::zeros(space.dim(), 0);
                phi_spaces.push((space, zero));
            } else {
                phi_spaces.push(normalized_basis(z, j, q, w)?);
            }
        }
        let beta_dims: Vec<usize> = beta_spaces.iter().map(|(_, b)| b.cols()).collect();
        let phi_dims: Vec<usize> = phi_spaces.iter().map(|(_, b)| b.cols()).collect();
        let total_unknowns: usize =
            beta_dims.iter().sum::<usize>() + phi_dims.iter().sum::<usize>();
        let beta_offset = |i: usize| -> usize { beta_dims[..i].iter().sum() };
        let phi_offset = |j: usize| -> usize {
            beta_dims.iter().sum::<usize>() + phi_dims[..j].iter().sum::<usize>()
        };

        let mut rows: Vec<RatMatrix> = Vec::new();
        let mut rhs: Vec<Vec<Rat>> = Vec::new();
        // (a) Dβ = 0 on Y levels 0..=m+1
        for lv in 0..=(m + 1) {
            let q_out = 3 + m - lv;
            if q_out > w {
                continue;
            }
            let target = FormSpace::new(y.dim(lv), q_out, w);
            if target.dim() == 0 {
                continue;
            }
            let mut row = RatMatrix::zeros(target.dim(), total_unknowns);
            if lv <= m && beta_dims[lv] > 0 {
                let (src, basis) = &beta_spaces[lv];
                let op = src.operator_matrix(&target, de_rham_d)?;
                let signed = if lv % 2 == 0 { op } else { op.neg() };
                paste(&mut row, &signed.mul(basis), 0, beta_offset(lv));
            }
            if lv >= 1 && beta_dims[lv - 1] > 0 {
                let (src, basis) = &beta_spaces[lv - 1];
                let op = src.operator_matrix(&target, |f| simplicial_delta(y, lv, f))?;
                paste(&mut row, &op.mul(basis), 0, beta_offset(lv - 1));
            }
            if row.is_zero() {
                continue;
            }
            rows.push(row);
            rhs.push(vec![Rat::zero(); target.dim()]);
        }
        // (b) h*β − Dφ = g*α on Z levels 0..=m
        for lv in 0..=m {
            let q = 2 + m - lv;
            if q > w {
                continue;
            }
            let target = FormSpace::new(z.dim(lv), q, w);
            if target.dim() == 0 {
                continue;
            }
            let mut row = RatMatrix::zeros(target.dim(), total_unknowns);
            if beta_dims[lv] > 0 {
                let (src, basis) = &beta_spaces[lv];
                let hmat = h.levels[lv].clone();
                let op = src.operator_matrix(&target, |f| pullback(&hmat, f))?;
                paste(&mut row, &op.mul(basis), 0, beta_offset(lv));
            }
            if lv < m && phi_dims[lv] > 0 {
                let (src, basis) = &phi_spaces[lv];
                let op = src.operator_matrix(&target, de_rham_d)?;
                // −(−1)^lv dφ_lv
                let signed = if lv % 2 == 0 { op.neg() } else { op };
                paste(&mut row, &signed.mul(basis), 0, phi_offset(lv));
            }
            if lv >= 1 && phi_dims[lv - 1] > 0 {
                let (src, basis) = &phi_spaces[lv - 1];
                let op = src.operator_matrix(&target, |f| simplicial_delta(z, lv, f))?;
                paste(&mut row, &op.neg().mul(basis), 0, phi_offset(lv - 1));
            }
            rows.push(row);
            rhs.push(target.to_coords(&pulled.components[lv].weight_part(w))?);
        }
        let system = RatMatrix::vstack_all(total_unknowns, &rows);
        let rhs_flat: Vec<Rat> = rhs.into_iter().flatten().collect();
        let solution = match solve_many(&system, &RatMatrix::column_vector(&rhs_flat)) {
            Ok((sol, _)) => sol,
            Err(crate::exactla::LinAlgError::Infeasible { certificate }) => {
                return Err(TransferError::InfeasibleWithinWeight {
                    weight: w,
                    certificate,
                });
            }
            Err(e) => return Err(TransferError::Model(e.into())),
        };
        for i in 0..=m {
            let (space, basis) = &beta_spaces[i];
            if basis.cols() == 0 {
                continue;
            }
            let coords: Vec<Rat> =
                (0..basis.cols()).map(|r| solution.at(beta_offset(i) + r, 0).clone()).collect();
            let full = basis.mul(&RatMatrix::column_vector(&coords));
            beta_components[i] = beta_components[i].add(&space.from_coords(&full.column(0)));
        }
        for j in 0..m {
            let (space, basis) = &phi_spaces[j];
            if basis.cols() == 0 {
                continue;
            }
            let coords: Vec<Rat> =
                (0..basis.cols()).map(|r| solution.at(phi_offset(j) + r, 0).clone()).collect();
            let full = basis.mul(&RatMatrix::column_vector(&coords));
            phi_components[j] = phi_components[j].add(&space.from_coords(&full.column(0)));
        }
    }

    let beta = ShiftedForm::new(m as i64, 2, beta_components);
    let phi = ShiftedForm::new(m as i64 - 1, 2, phi_components);
    let beta_report = check_shifted_symplectic(y, &beta, n)?;
    let morita = MoritaEquivalence {
        alpha: alpha.clone(),
        beta: beta.clone(),
        gauge: phi.neg(),
        to_left: g.clone(),
        to_right: h.clone(),
    };
    let morita_report = check_symplectic_morita(&morita, n)?;
    Ok(TransferOutput {
        beta,
        phi,
        beta_report,
        morita_report,
    })
}

fn paste(into: &mut RatMatrix, block: &RatMatrix, row_off: usize, col_off: usize) {
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            let v = block.at(r, c);
            if !v.is_zero() {
                into.set(row_off + r, col_off + c, v.clone());
            }
        }
    }
}

/// Compose two symplectic Morita equivalences sharing the middle model:
/// the fiber product carries the composite hypercovers and the summed
/// pulled-back gauge.
pub fn compose_morita(
    e1: &MoritaEquivalence,
    e2: &MoritaEquivalence,
) -> Result<MoritaEquivalence, ModelError> {
    // e1: (W, α) ⇐f V g⇒ (X, β); e2: (X, β) ⇐f′ Z g′⇒ (Y, γ)
    if e1.to_right.target != e2.to_left.target {
        return Err(ModelError::LevelMismatch("middle models differ".into()));
    }
    if e1.beta != e2.alpha {
        return Err(ModelError::Precondition("middle forms differ".into()));
    }
    let (_, to_v, to_z) = fiber_product(&e1.to_right, &e2.to_left)?;
    let to_left = to_v.then(&e1.to_left)?;
    let to_right = to_z.then(&e2.to_right)?;
    let gauge = pullback_shifted(&to_v, &e1.gauge).add(&pullback_shifted(&to_z, &e2.gauge));
    Ok(MoritaEquivalence {
        alpha: e1.alpha.clone(),
        beta: e2.beta.clone(),
        gauge,
        to_left,
        to_right,
    })
}

/// Shifted-form file JSON: {"shift": m, "k": 2, "components": [form wire]}.
#[derive(Serialize, Deserialize)]
pub struct ShiftedFormWire {
    pub shift: i64,
    pub k: usize,
    pub components: Vec<FormWire>,
}

pub fn shifted_form_to_json(alpha: &ShiftedForm) -> String {
    let wire = ShiftedFormWire {
        shift: alpha.shift,
        k: alpha.k,
        components: alpha
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| form_to_wire(i, c))
            .collect(),
    };
    serde_json::to_string_pretty(&wire).expect("shifted form serialization")
}

pub fn shifted_form_from_json(text: &str, x: &LinSimpSpace) -> Result<ShiftedForm, ModelError> {
    let wire: ShiftedFormWire =
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    shifted_form_from_wire(&wire, x)
}

pub fn shifted_form_from_wire(
    wire: &ShiftedFormWire,
    x: &LinSimpSpace,
) -> Result<ShiftedForm, ModelError> {
    if wire.components.len() as i64 != (wire.shift + 1).max(0) {
        return Err(ModelError::Parse("component count must equal shift + 1".into()));
    }
    let mut components = Vec::with_capacity(wire.components.len());
    for (i, fw) in wire.components.iter().enumerate() {
        if fw.level != i {
            return Err(ModelError::Parse(format!(
                "component {i} labelled with level {}",
                fw.level
            )));
        }
        let expected = wire.k + (wire.shift as usize - i);
        if fw.degree != expected {
            return Err(ModelError::Parse(format!("component {i} must have degree {expected}")));
        }
        components.push(form_from_wire(fw, x.dim(i))?);
    }
    let f = ShiftedForm::new(wire.shift, wire.k, components);
    f.validate_shape(x)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rat, ChainComplexQ, Orientation};
    use crate::instances;
    use crate::linmodel::dold_kan;

    fn std_gram(d: usize) -> RatMatrix {
        RatMatrix::from_fn(2 * d, 2 * d, |r, c| {
            if c == r + d {
                rat(1)
            } else if r == c + d {
                rat(-1)
            } else {
                rat(0)
            }
        })
    }

    fn constant_symplectic(d: usize, levels: usize) -> (LinSimpSpace, ShiftedForm) {
        let c = ChainComplexQ::new(0, vec![2 * d], vec![], Orientation::Chain).unwrap();
        let x = dold_kan(&c, levels).unwrap();
        let omega = PolyForm::constant_two_form(&std_gram(d));
        (x, ShiftedForm::new(0, 2, vec![omega]))
    }

    #[test]
    fn zero_form_is_presymplectic() {
        let (x, _) = constant_symplectic(1, 2);
        let zero = ShiftedForm::zero(&x, 0, 2);
        assert!(check_presymplectic(&x, &zero).unwrap().pass);
    }

    #[test]
    fn standard_symplectic_passes_and_zero_fails() {
        for d in 1..=2usize {
            let (x, alpha) = constant_symplectic(d, 2);
            let report = check_shifted_symplectic(&x, &alpha, 0).unwrap();
            assert!(report.pass, "standard ω on Q^{}", 2 * d);
            let zero = ShiftedForm::zero(&x, 0, 2);
            let zr = check_shifted_symplectic(&x, &zero, 0).unwrap();
            assert!(!zr.pass);
            let b = zr.first_degenerate().unwrap();
            assert_eq!(b.rank, 0);
            assert_eq!(b.dim_h, 2 * d);
        }
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(1, 1).len(), 2);
        assert_eq!(shuffles(2, 1).len(), 3);
        assert_eq!(shuffles(0, 0).len(), 1);
    }

    #[test]
    fn zero_shifted_pairing_is_gram() {
        let (x, alpha) = constant_symplectic(1, 2);
        let t = tangent_complex(&x, 0).unwrap();
        let lambda = im_pairing(&x, &alpha, &t).unwrap();
        assert_eq!(lambda.blocks[0], std_gram(1));
        assert!(check_im_multiplicative(&lambda, &t));
    }

    #[test]
    fn one_shifted_pairing_single_shuffle() {
        // DK(A →0 V) with A = V = Q: the literal shuffle formula gives
        // λ(v, a) = +ω(Ts₀ v, a).
        let (x, alpha) = instances::one_shifted_instance(1, &RatMatrix::zeros(1, 1));
        let t = tangent_complex(&x, 1).unwrap();
        let lambda = im_pairing(&x, &alpha, &t).unwrap();
        let g = alpha.components[1].gram_of_constant_part();
        let expected = x
            .degen_mat(0, 0)
            .mul(&t.inclusions[0])
            .transpose()
            .mul(&g)
            .mul(&t.inclusions[1]);
        assert_eq!(lambda.blocks[0], expected);
        // graded antisymmetry in shift 1: block₁ = −block₀ᵀ
        assert_eq!(lambda.blocks[1], lambda.blocks[0].transpose().neg());
        assert!(check_im_multiplicative(&lambda, &t));
    }

    #[test]
    fn gauge_transform_keeps_symplectic_and_pairing() {
        let (x, alpha) = instances::one_shifted_instance(2, &RatMatrix::zeros(2, 2));
        let t = tangent_complex(&x, 1).unwrap();
        let before = im_pairing(&x, &alpha, &t).unwrap();
        let mut g0 = RatMatrix::zeros(2, 2);
        g0.set(0, 1, rat(3));
        g0.set(1, 0, rat(-3));
        let phi = ShiftedForm::new(0, 2, vec![PolyForm::constant_two_form(&g0)]);
        let gauged = gauge_transform(&x, &alpha, &phi).unwrap();
        let after = im_pairing(&x, &gauged, &t).unwrap();
        for l in 0..=1usize {
            assert_eq!(before.blocks[l], after.blocks[l], "block {l}");
        }
        assert!(check_shifted_symplectic(&x, &gauged, 1).unwrap().pass);
    }

    #[test]
    fn identity_zigzag_transfer() {
        let (x, alpha) = constant_symplectic(1, 2);
        let id = SimpLinMap::identity(&x);
        let out = transfer_symplectic(&id, &id, &alpha, 0, None).unwrap();
        assert!(out.beta_report.pass);
        assert!(out.morita_report.pass);
    }

    #[test]
    fn trivial_morita_equivalence_passes() {
        let (x, alpha) = constant_symplectic(1, 2);
        let e = MoritaEquivalence {
            alpha: alpha.clone(),
            beta: alpha.clone(),
            gauge: ShiftedForm::new(-1, 2, vec![]),
            to_left: SimpLinMap::identity(&x),
            to_right: SimpLinMap::identity(&x),
        };
        assert!(check_symplectic_morita(&e, 0).unwrap().pass);
    }

    #[test]
    fn perturbed_beta_fails_morita() {
        let (x, alpha) = constant_symplectic(1, 2);
        let mut pert = alpha.components[0].clone();
        pert.add_term(vec![1, 0], vec![0, 1], rat(1));
        let beta = ShiftedForm::new(0, 2, vec![pert]);
        let e = MoritaEquivalence {
            alpha: alpha.clone(),
            beta,
            gauge: ShiftedForm::new(-1, 2, vec![]),
            to_left: SimpLinMap::identity(&x),
            to_right: SimpLinMap::identity(&x),
        };
        let r = check_symplectic_morita(&e, 0).unwrap();
        assert!(!r.pass);
        assert!(!r.gauge_equation);
    }

    #[test]
    fn shifted_form_json_round_trip() {
        let (x, alpha) = constant_symplectic(2, 2);
        let text = shifted_form_to_json(&alpha);
        let back = shifted_form_from_json(&text, &x).unwrap();
        assert_eq!(alpha, back);
        assert_eq!(text, shifted_form_to_json(&back));
    }
}

#[cfg(test)]
mod canonical_equivalences {
    use super::*;
    use crate::instances;

    // (Y, f*α) ⇐id (Y, 0) f⇒ (X, α) is a symplectic Morita equivalence.
    #[test]
    fn strict_morphism_equivalence() {
        let mut rng = instances::rng(21);
        let zz = instances::random_zigzag(&mut rng, 1, 1, 2);
        let f = &zz.h; // a hypercover Z → Y; use Z as the pulled-back side
        let alpha_on_y = {
            // transfer α to Y first so we have a symplectic form on the
            // target of a hypercover
            let out = transfer_symplectic(&zz.g, &zz.h, &zz.alpha, 1, None).unwrap();
            out.beta
        };
        // strict equivalence along f = h: (Z, h*β) ⇐id (Z, 0) h⇒ (Y, β)
        let pulled = pullback_shifted(f, &alpha_on_y);
        let e = MoritaEquivalence {
            alpha: pulled,
            beta: alpha_on_y,
            gauge: ShiftedForm::zero(&f.source, 0, 2),
            to_left: SimpLinMap::identity(&f.source),
            to_right: f.clone(),
        };
        let r = check_symplectic_morita(&e, 1).unwrap();
        assert!(r.pass, "{r:?}");
    }

    // (X, α + Dφ) ⇐id (X, −φ gauge) id⇒ (X, α).
    #[test]
    fn gauge_equivalence() {
        let mut rng = instances::rng(22);
        let (x, alpha) = instances::one_shifted_instance(1, &RatMatrix::zeros(1, 1));
        let phi = instances::random_shifted_form(&mut rng, &x, 0, 2, 3);
        let gauged = gauge_transform(&x, &alpha, &phi).unwrap();
        let e = MoritaEquivalence {
            alpha: gauged,
            beta: alpha,
            gauge: phi.neg(),
            to_left: SimpLinMap::identity(&x),
            to_right: SimpLinMap::identity(&x),
        };
        let r = check_symplectic_morita(&e, 1).unwrap();
        assert!(r.pass, "{r:?}");
    }

    // transfer along a strict-morphism zig-zag (g = f, h = id): the solver
    // output satisfies id*β = f*α + Dφ, consistent with β ~ f-pushforward.
    #[test]
    fn strict_zigzag_transfer() {
        let mut rng = instances::rng(25);
        let zz = instances::random_zigzag(&mut rng, 1, 1, 2);
        let id_z = SimpLinMap::identity(&zz.g.source);
        let out = transfer_symplectic(&zz.g, &id_z, &zz.alpha, 1, None).unwrap();
        assert!(out.beta_report.pass);
        assert!(out.morita_report.pass);
        // h = id: β − Dφ = g*α exactly
        let lhs = out.beta.add(&total_differential(&zz.g.source, &out.phi).neg());
        assert_eq!(lhs, pullback_shifted(&zz.g, &zz.alpha));
    }
}
