//! Cohomological descent, executed as exact verifications.
//!
//! Sections of linear surjections induce extra codegeneracies and homotopy
//! operators on the Cech-nerve rows; nerve descent and hypercover descent
//! are verified by computing both truncated total cohomologies outright and
//! comparing along the pullback. The coskeleton tower, the diagonal retract
//! (s, g, φ) and the Eilenberg-Zilber comparison are built explicitly and
//! exercised as independent cross-checks of the same isomorphisms.

use serde::Serialize;

use crate::exactla::{right_inverse, RatMatrix};
use crate::forms::{
    ez_total_map, induced_cohomology_comparison, induced_total_map, normalized_basis, pullback,
    total_complex, triple_complex, verify_triple_lemma, FormSpace, InducedDegree,
    TotalComplexData,
};
use crate::instances::constant_model;
use crate::linmodel::{
    cech_nerve, check_hypercover, coskeleton_tower_map, is_bijective,
    relative_coskeleton, BisimpLinSpace, LinSimpSpace, ModelError, RelCoskeleton, SimpLinMap,
};

/// Extra codegeneracy data on the Cech nerve of a linear surjection
/// f : X ↠ Y with section σ: the maps σ_{−1} : N_n → N_{n+1} at the space
/// level, with all axioms verified exactly.
#[derive(Debug, Clone)]
pub struct HomotopyOperatorData {
    pub nerve: BisimpLinSpace,
    /// The nerve column as a simplicial space: level i = N_i(X/Y).
    pub spaces: LinSimpSpace,
    /// σ itself (Y → N_0 = X) followed by σ_{−1} : N_n → N_{n+1} in the
    /// nerve bases, for n = 0..max_row−1.
    pub sigma: RatMatrix,
    pub sigma_minus: Vec<RatMatrix>,
}

fn nerve_column(z: &BisimpLinSpace) -> Result<LinSimpSpace, ModelError> {
    let dims: Vec<usize> = (0..=z.max_row).map(|i| z.dims[i][0]).collect();
    let face: Vec<Vec<RatMatrix>> = (0..=z.max_row).map(|i| z.vface[i][0].clone()).collect();
    let mut degen: Vec<Vec<RatMatrix>> =
        (0..z.max_row).map(|i| z.vdegen[i][0].clone()).collect();
    degen.push(Vec::new());
    LinSimpSpace::new(dims, face, degen)
}

/// Wrap a plain surjective matrix as a map of constant models at level 0
/// and take its Cech nerve.
fn nerve_of_surjection(f: &RatMatrix, rows: usize) -> Result<BisimpLinSpace, ModelError> {
    let src = constant_model(f.cols(), 0);
    let tgt = constant_model(f.rows(), 0);
    let map = SimpLinMap::new(src, tgt, vec![f.clone()])?;
    cech_nerve(&map, rows, 0)
}

/// Build the extra codegeneracy σ_{−1}(x_0, …, x_n) = (σ(f x_0), x_0, …, x_n)
/// on the Cech nerve of f and verify the three extra-degeneracy axioms as
/// exact matrix identities.
pub fn extra_codegeneracy(
    f: &RatMatrix,
    sigma: Option<&RatMatrix>,
    rows: usize,
) -> Result<HomotopyOperatorData, ModelError> {
    let computed;
    let sigma = match sigma {
        Some(s) => s.clone(),
        None => {
            computed = right_inverse(f)
                .ok_or(ModelError::NotSurjective { level: 0 })?;
            computed
        }
    };
    // f ∘ σ = id is the section precondition
    if f.mul(&sigma) != RatMatrix::identity(f.rows()) {
        return Err(ModelError::Precondition("σ is not a section of f".into()));
    }
    let z = nerve_of_surjection(f, rows)?;
    let spaces = nerve_column(&z)?;
    let a = f.cols();
    let sf = sigma.mul(f);
    let mut sigma_minus = Vec::with_capacity(rows);
    for n in 0..rows {
        // ambient: X^{n+1} → X^{n+2}, first coordinate σ(f(x_0))
        let amb = RatMatrix::from_fn((n + 2) * a, (n + 1) * a, |r, c| {
            let (rb, ri) = (r / a, r % a);
            if rb == 0 {
                if c / a == 0 {
                    sf.at(ri, c % a).clone()
                } else {
                    crate::exactla::rat(0)
                }
            } else if c == (rb - 1) * a + ri {
                crate::exactla::rat(1)
            } else {
                crate::exactla::rat(0)
            }
        });
        let expressed = crate::exactla::express_in_basis(
            &z.bases[n + 1][0],
            &amb.mul(&z.bases[n][0]),
        )?;
        sigma_minus.push(expressed);
    }
    let data = HomotopyOperatorData {
        nerve: z,
        spaces,
        sigma,
        sigma_minus,
    };
    data.verify_axioms(f)?;
    Ok(data)
}

impl HomotopyOperatorData {
    /// The three extra-degeneracy axioms, plus d_0 ∘ σ_{−1,base} = σ∘f-free
    /// augmentation edge: d_0 σ_{−1} = id, d_i σ_{−1} = σ_{−1} d_{i−1} for
    /// i ≥ 1, s_i σ_{−1} = σ_{−1} s_{i−1} for i ≥ 1.
    pub fn verify_axioms(&self, f: &RatMatrix) -> Result<(), ModelError> {
        let x = &self.spaces;
        let fail = |s: String| Err(ModelError::Identity(s));
        for n in 0..self.sigma_minus.len() {
            let sm = &self.sigma_minus[n];
            // axiom 1
            if x.face_mat(n + 1, 0).mul(sm) != RatMatrix::identity(x.dim(n)) {
                return fail(format!("d_0 σ_{{−1}} ≠ id at level {n}"));
            }
            // axiom 2
            for i in 1..=(n + 1) {
                let lhs = x.face_mat(n + 1, i).mul(sm);
                let rhs = if i >= 1 && n >= 1 && i - 1 <= n {
                    self.sigma_minus[n - 1].mul(x.face_mat(n, i - 1))
                } else if i == n + 1 && n == 0 {
                    // d_1 σ_{−1} = σ ∘ f at the bottom level
                    self.sigma.mul(f)
                } else {
                    continue;
                };
                if lhs != rhs {
                    return fail(format!("d_{i} σ_{{−1}} axiom fails at level {n}"));
                }
            }
            // axiom 3
            if n + 1 < self.sigma_minus.len() {
                for i in 1..=(n + 1) {
                    let lhs = x.degen_mat(n + 1, i).mul(sm);
                    let rhs = self.sigma_minus[n + 1].mul(x.degen_mat(n, i - 1));
                    if lhs != rhs {
                        return fail(format!("s_{i} σ_{{−1}} axiom fails at level {n}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Verify the homotopy identity s_{−1}δ + δs_{−1} = id on every
    /// normalized row (fixed form degree q, weight w), for all positions the
    /// stored nerve can address. The augmentation edge uses f* and σ*.
    pub fn verify_homotopy_identity(
        &self,
        f: &RatMatrix,
        k: usize,
        w_max: usize,
    ) -> Result<bool, ModelError> {
        let x = &self.spaces;
        let rows = self.sigma_minus.len();
        for w in k..=w_max.max(k) {
            for q in k..=w {
                // row spaces: Y at position −1, normalized forms on N_i
                let y_space = FormSpace::new(f.rows(), q, w);
                let mut norm = Vec::new();
                for i in 0..=x.max_level() {
                    norm.push(normalized_basis(x, i, q, w)?);
                }
                // pullback operators
                let fmat = f.clone();
                let aug_full =
                    y_space.operator_matrix(&norm[0].0, |form| pullback(&fmat, form))?;
                let aug = crate::exactla::express_in_basis(&norm[0].1, &aug_full)?;
                let smat = self.sigma.clone();
                let sig_full =
                    norm[0].0.operator_matrix(&y_space, |form| pullback(&smat, form))?;
                let sig = sig_full.mul(&norm[0].1);
                // σ* f* = id on Ω(Y)
                if sig.mul(&aug) != RatMatrix::identity(y_space.dim()) {
                    return Ok(false);
                }
                let mut delta = Vec::new();
                for i in 0..rows {
                    let mut op = RatMatrix::zeros(norm[i + 1].0.dim(), norm[i].0.dim());
                    for t in 0..=(i + 1) {
                        let dmat = x.face_mat(i + 1, t).clone();
                        let term =
                            norm[i].0.operator_matrix(&norm[i + 1].0, |g| pullback(&dmat, g))?;
                        op = if t % 2 == 0 { op.add(&term) } else { op.sub(&term) };
                    }
                    delta.push(crate::exactla::express_in_basis(
                        &norm[i + 1].1,
                        &op.mul(&norm[i].1),
                    )?);
                }
                let mut homotopy = Vec::new();
                for i in 0..rows {
                    let sm = self.sigma_minus[i].clone();
                    let full =
                        norm[i + 1].0.operator_matrix(&norm[i].0, |g| pullback(&sm, g))?;
                    homotopy.push(crate::exactla::express_in_basis(
                        &norm[i].1,
                        &full.mul(&norm[i + 1].1),
                    )?);
                }
                // position 0: s δ + (f* σ*) = id
                if rows >= 1 {
                    let lhs = homotopy[0].mul(&delta[0]).add(&aug.mul(&sig));
                    if lhs != RatMatrix::identity(norm[0].1.cols()) {
                        return Ok(false);
                    }
                }
                for i in 1..rows {
                    let lhs =
                        homotopy[i].mul(&delta[i]).add(&delta[i - 1].mul(&homotopy[i - 1]));
                    if lhs != RatMatrix::identity(norm[i].1.cols()) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Per-degree report entry for descent checks, serialized as
/// {dim_source, dim_target, induced_rank, iso}.
pub type DescentDegree = InducedDegree;

#[derive(Debug, Clone, Serialize)]
pub struct DescentReport {
    pub pass: bool,
    pub degrees: Vec<DescentDegree>,
    /// Exact homotopy identity held on every row (nerve descent only).
    pub homotopy_identity: Option<bool>,
}

/// Truncated polynomial de Rham cohomology dims of Q^dim in degrees
/// 0..=top, computed directly (independent of the simplicial machinery).
pub fn truncated_de_rham(dim: usize, k: usize, w_max: usize, top: usize) -> Vec<usize> {
    let mut out = vec![0usize; top + 1];
    for w in k..=w_max.max(k) {
        // cochain complex F^k Ω_w: degrees k..=w
        let spaces: Vec<FormSpace> =
            (k..=w).map(|q| FormSpace::new(dim, q, w)).collect();
        let mut maps = Vec::new();
        for t in 0..spaces.len().saturating_sub(1) {
            maps.push(
                spaces[t]
                    .operator_matrix(&spaces[t + 1], crate::forms::de_rham_d)
                    .expect("weight preserved"),
            );
        }
        for (t, q) in (k..=w).enumerate() {
            if q > top {
                continue;
            }
            let cycles = if t < maps.len() {
                spaces[t].dim() - maps[t].rank()
            } else {
                spaces[t].dim()
            };
            let boundaries = if t >= 1 { maps[t - 1].rank() } else { 0 };
            out[q] += cycles - boundaries;
        }
    }
    out
}

/// Nerve descent for a linear surjection f : Q^a ↠ Q^b: f* must induce an
/// isomorphism between the k-truncated de Rham cohomology of the base and
/// the k-truncated total cohomology of the Cech nerve, in degrees ≤ up_to.
/// The homotopy identity is verified exactly on every row.
pub fn verify_nerve_descent(
    f: &RatMatrix,
    sigma: Option<&RatMatrix>,
    k: usize,
    w_max: usize,
    up_to: usize,
) -> Result<DescentReport, ModelError> {
    let top = up_to + 1;
    let rows_needed = if top > k { top - k } else { 0 };
    let op = extra_codegeneracy(f, sigma, rows_needed.max(1))?;
    let homotopy = op.verify_homotopy_identity(f, k, w_max)?;
    // base side: constant model on Y (its total cohomology is the truncated
    // de Rham cohomology of Y; cross-checked against the direct computation)
    let y_const = constant_model(f.rows(), rows_needed.max(1));
    let tot_y = total_complex(&y_const, k, w_max, top, true)?;
    let tot_nerve = total_complex(&op.spaces, k, w_max, top, true)?;
    // augmentation as a simplicial map nerve → constant(Y): (x_0…x_i) ↦ f x_0
    let a = f.cols();
    let mut levels = Vec::new();
    for i in 0..=op.spaces.max_level() {
        let first = RatMatrix::from_fn(a, (i + 1) * a, |r, c| {
            if c == r {
                crate::exactla::rat(1)
            } else {
                crate::exactla::rat(0)
            }
        });
        levels.push(f.mul(&first).mul(&op.nerve.bases[i][0]));
    }
    let aug_map = SimpLinMap::new(
        op.spaces.clone(),
        y_const.truncate(op.spaces.max_level()),
        levels,
    )?;
    let maps = induced_total_map(&aug_map, &tot_y, &tot_nerve)?;
    let degrees = induced_cohomology_comparison(&tot_y, &tot_nerve, &maps, up_to)?;
    // cross-check: the constant-model cohomology equals the direct de Rham
    // computation
    let direct = truncated_de_rham(f.rows(), k, w_max, up_to);
    let hy = tot_y.homology();
    for n in 0..=up_to {
        if TotalComplexData::cohomology_dim(&hy, n) != direct[n] {
            return Err(ModelError::Identity(format!(
                "constant-model total cohomology differs from de Rham in degree {n}"
            )));
        }
    }
    let pass = homotopy && degrees.iter().all(|d| d.iso);
    Ok(DescentReport {
        pass,
        degrees,
        homotopy_identity: Some(homotopy),
    })
}

/// The coskeleton retract data for one tower step of a hypercover: the
/// diagonal Ŵ of the Cech nerve of f̃ : cosk_m(X/Y) → cosk_{m−1}(X/Y),
/// with s the diagonal inclusion, g the (coskeletally extended) projection
/// to the last component, and φ = f̃∘g the augmentation.
pub struct CoskRetract {
    pub upper: RelCoskeleton,
    pub lower: RelCoskeleton,
    pub tower: SimpLinMap,
    pub nerve: BisimpLinSpace,
    pub diagonal: LinSimpSpace,
    pub s: SimpLinMap,
    pub g: SimpLinMap,
    pub phi: SimpLinMap,
    /// Rank check per level above m: whether g_l is a linear isomorphism.
    /// Not required by the retract argument (g∘s = id suffices) and not
    /// generally true — recorded, not asserted.
    pub g_iso_above_m: Vec<(usize, bool)>,
}

/// Build the retract for the tower step at m and verify g∘s = id, f̃∘g = φ
/// and φ∘s = f̃ as exact identities.
pub fn coskeleton_retract(f: &SimpLinMap, m: i64, up_to: usize) -> Result<CoskRetract, ModelError> {
    if m < 0 {
        return Err(ModelError::Precondition("tower step needs m ≥ 0".into()));
    }
    let upper = relative_coskeleton(f, m, up_to)?;
    let lower = relative_coskeleton(f, m - 1, up_to)?;
    let tower = coskeleton_tower_map(&upper, &lower)?;
    let nerve = cech_nerve(&tower, up_to, up_to)?;
    let diagonal = nerve.diagonal()?;
    let u = &upper.space;
    // s : U_l → Ŵ_l, the diagonal (s₀ᵛ)^l
    let mut s_levels = Vec::with_capacity(up_to + 1);
    for l in 0..=up_to {
        let mut mat = RatMatrix::identity(u.dim(l));
        for t in 0..l {
            mat = nerve.vdegen[t][l][0].mul(&mat);
        }
        s_levels.push(mat);
    }
    let s = SimpLinMap::new(u.clone(), diagonal.clone(), s_levels)?;
    // φ : Ŵ_l → V_l = f̃ ∘ (first coordinate)
    let first_coord = |l: usize| -> RatMatrix {
        let ud = u.dim(l);
        let sel = RatMatrix::from_fn(ud, (l + 1) * ud, |r, c| {
            if c == r {
                crate::exactla::rat(1)
            } else {
                crate::exactla::rat(0)
            }
        });
        sel.mul(&nerve.bases[l][l])
    };
    let mut phi_levels = Vec::with_capacity(up_to + 1);
    for l in 0..=up_to {
        phi_levels.push(tower.levels[l].mul(&first_coord(l)));
    }
    let phi = SimpLinMap::new(diagonal.clone(), lower.space.clone(), phi_levels)?;
    // g : Ŵ_l → U_l: last-component projection for l ≤ m, coskeletal
    // extension above
    let last_coord = |l: usize| -> RatMatrix {
        let ud = u.dim(l);
        let sel = RatMatrix::from_fn(ud, (l + 1) * ud, |r, c| {
            if c == l * ud + r {
                crate::exactla::rat(1)
            } else {
                crate::exactla::rat(0)
            }
        });
        sel.mul(&nerve.bases[l][l])
    };
    let mu = m as usize;
    let mut g_levels: Vec<RatMatrix> = Vec::with_capacity(up_to + 1);
    for l in 0..=up_to {
        if l <= mu {
            g_levels.push(last_coord(l));
        } else {
            // element of U_l from values on the maximal cells of sk_m Δ^l
            // (computed through g at lower levels) plus the Y component of φ
            let rel = &upper.rels[l];
            let mut values = Vec::new();
            for &(j, idx) in rel.hom_x.maximal() {
                let name = rel.hom_x.shape.name(j, idx).to_string();
                let sigma = crate::ssets::decode_monotone(&name)
                    .map_err(|e| ModelError::Parse(e.to_string()))?;
                // diagonal structure map Ŵ_l → Ŵ_j for σ : [j] → [l]
                let w_sigma = diagonal.structure_matrix(l, &sigma);
                // U_j ≅ X_j via evaluation at the top cell of Δ^j
                let top_name: String = (0..=j)
                    .map(|v| char::from_digit(v as u32, 10).unwrap())
                    .collect();
                let to_x = upper.rels[j]
                    .eval_x_by_name(j, &top_name)
                    .ok_or_else(|| ModelError::LevelMismatch("missing top cell".into()))?;
                values.push(to_x.mul(&g_levels[j]).mul(&w_sigma));
            }
            let y_part = lower.rels[l].eval_y().mul(&phi.levels[l]);
            g_levels.push(rel.coords(&values, &y_part)?);
        }
    }
    let g = SimpLinMap::new(diagonal.clone(), u.clone(), g_levels)?;
    // retract identities
    let mut g_iso_above_m = Vec::new();
    for l in 0..=up_to {
        if g.levels[l].mul(&s.levels[l]) != RatMatrix::identity(u.dim(l)) {
            return Err(ModelError::Identity(format!("g∘s ≠ id at level {l}")));
        }
        if tower.levels[l].mul(&g.levels[l]) != phi.levels[l] {
            return Err(ModelError::Identity(format!("f̃∘g ≠ φ at level {l}")));
        }
        if phi.levels[l].mul(&s.levels[l]) != tower.levels[l] {
            return Err(ModelError::Identity(format!("φ∘s ≠ f̃ at level {l}")));
        }
        if l > mu {
            g_iso_above_m.push((l, is_bijective(&g.levels[l])));
        }
    }
    Ok(CoskRetract {
        upper,
        lower,
        tower,
        nerve,
        diagonal,
        s,
        g,
        phi,
        g_iso_above_m,
    })
}

/// The retract lemma, executed: with g∘s = id and f̃∘g = φ verified and φ*
/// certified to be an isomorphism on truncated cohomology, f̃* must be one
/// too. All three pullbacks are computed and compared; the diagram chase is
/// realized as exact rank checks (s*∘g* = id, hence g* injective and s*
/// surjective on cohomology).
pub fn verify_retract_lemma(
    r: &CoskRetract,
    k: usize,
    w_max: usize,
    up_to: usize,
) -> Result<DescentReport, ModelError> {
    let top = up_to + 1;
    let tot_v = total_complex(&r.lower.space, k, w_max, top, true)?;
    let tot_u = total_complex(&r.upper.space, k, w_max, top, true)?;
    let tot_w = total_complex(&r.diagonal, k, w_max, top, true)?;
    // φ* must be a quasi-isomorphism (precondition, certified here)
    let phi_maps = induced_total_map(&r.phi, &tot_v, &tot_w)?;
    let phi_cmp = induced_cohomology_comparison(&tot_v, &tot_w, &phi_maps, up_to)?;
    if !phi_cmp.iter().all(|d| d.iso) {
        return Err(ModelError::Precondition(
            "φ* is not an isomorphism on truncated cohomology".into(),
        ));
    }
    // s*∘g* = id on cohomology follows from g∘s = id; verify exactly
    let g_maps = induced_total_map(&r.g, &tot_u, &tot_w)?;
    let s_maps = induced_total_map(&r.s, &tot_w, &tot_u)?;
    for b in 0..g_maps.len() {
        for n in 0..=up_to {
            let compose = s_maps[b][n].mul(&g_maps[b][n]);
            if compose != RatMatrix::identity(tot_u.blocks[b].complex.dims[n]) {
                return Err(ModelError::Identity(
                    "s*∘g* ≠ id on the total complexes".into(),
                ));
            }
        }
    }
    // conclusion: f̃* is an isomorphism in degrees ≤ up_to
    let f_maps = induced_total_map(&r.tower, &tot_v, &tot_u)?;
    let degrees = induced_cohomology_comparison(&tot_v, &tot_u, &f_maps, up_to)?;
    let pass = degrees.iter().all(|d| d.iso);
    Ok(DescentReport {
        pass,
        degrees,
        homotopy_identity: None,
    })
}

/// Direct hypercover descent: f* is an isomorphism on k-truncated total
/// cohomology in all degrees ≤ up_to, verified by computing both sides.
/// Independent of the tower/EZ machinery, so the routes cross-validate.
pub fn verify_hypercover_descent(
    f: &SimpLinMap,
    n: usize,
    k: usize,
    w_max: usize,
    up_to: usize,
) -> Result<DescentReport, ModelError> {
    let hc = check_hypercover(f, n)?;
    if !hc.pass {
        return Err(ModelError::Precondition(format!(
            "not a hypercover: {:?}",
            hc.first_failure()
        )));
    }
    let top = up_to + 1;
    let tot_y = total_complex(&f.target, k, w_max, top, true)?;
    let tot_x = total_complex(&f.source, k, w_max, top, true)?;
    let maps = induced_total_map(f, &tot_y, &tot_x)?;
    let degrees = induced_cohomology_comparison(&tot_y, &tot_x, &maps, up_to)?;
    let pass = degrees.iter().all(|d| d.iso);
    Ok(DescentReport {
        pass,
        degrees,
        homotopy_identity: None,
    })
}

/// Cross-validation of the Eilenberg-Zilber route: the EZ map from the
/// triple complex of the Cech nerve of f to its diagonal induces an
/// isomorphism on total cohomology in degrees ≤ up_to.
pub fn verify_ez_route(
    f: &SimpLinMap,
    k: usize,
    w_max: usize,
    up_to: usize,
) -> Result<DescentReport, ModelError> {
    let top = up_to + 1;
    let cech_rows = if top > k { top - k } else { 1 };
    let z = cech_nerve(f, cech_rows.max(1), f.max_level().min(top))?;
    let triple = triple_complex(&z, k, w_max, top)?;
    let diag = z.diagonal()?;
    let tot_diag = total_complex(&diag, k, w_max, top, true)?;
    let maps = ez_total_map(&z, &triple, &tot_diag)?;
    let hs = triple.homology();
    let ht = tot_diag.homology();
    let mut degrees: Vec<DescentDegree> = (0..=up_to)
        .map(|n| DescentDegree {
            degree: n,
            dim_source: 0,
            dim_target: 0,
            induced_rank: 0,
            iso: true,
        })
        .collect();
    for (b, (hb_s, hb_t)) in hs.iter().zip(ht.iter()).enumerate() {
        if !crate::forms::is_cochain_map(
            &triple.blocks[b].complex,
            &tot_diag.blocks[b].complex,
            &maps[b],
        ) {
            return Err(ModelError::Identity(format!(
                "EZ map is not a cochain map in weight block {}",
                triple.blocks[b].w
            )));
        }
        let induced = crate::exactla::induced_on_homology(hb_s, hb_t, &maps[b])?;
        for (deg, d) in degrees.iter_mut().enumerate() {
            d.dim_source += hb_s[deg].dim;
            d.dim_target += hb_t[deg].dim;
            d.induced_rank += induced[deg].rank();
            d.iso &= induced[deg].rows() == induced[deg].cols()
                && induced[deg].rank() == induced[deg].rows();
        }
    }
    let pass = degrees.iter().all(|d| d.iso);
    Ok(DescentReport {
        pass,
        degrees,
        homotopy_identity: None,
    })
}

/// Full cross-validated descent certification: the direct route, the
/// triple-complex augmentation route, and the EZ route must all certify the
/// same isomorphism pattern; dimensions must agree where the routes meet.
pub fn verify_descent_all_routes(
    f: &SimpLinMap,
    n: usize,
    k: usize,
    w_max: usize,
    up_to: usize,
) -> Result<DescentReport, ModelError> {
    let direct = verify_hypercover_descent(f, n, k, w_max, up_to)?;
    let top = up_to + 1;
    let cech_rows = if top > k { (top - k).max(1) } else { 1 };
    let z = cech_nerve(f, cech_rows, f.max_level().min(top))?;
    let tot_y = total_complex(&f.target, k, w_max, top, true)?;
    let lemma = verify_triple_lemma(&z, &tot_y, up_to)?;
    let ez = verify_ez_route(f, k, w_max, up_to)?;
    let routes_agree = direct.pass
        && lemma.iter().all(|d| d.iso)
        && ez.pass
        && direct
            .degrees
            .iter()
            .zip(lemma.iter())
            .all(|(a, b)| a.dim_source == b.dim_source);
    Ok(DescentReport {
        pass: routes_agree,
        degrees: direct.degrees,
        homotopy_identity: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rat, ChainComplexQ, Orientation};
    use crate::instances;
    use crate::linmodel::dold_kan;

    #[test]
    fn identity_extra_codegeneracy() {
        let f = RatMatrix::identity(2);
        let op = extra_codegeneracy(&f, Some(&RatMatrix::identity(2)), 3).unwrap();
        assert!(op.verify_homotopy_identity(&f, 0, 2).unwrap());
    }

    #[test]
    fn projection_q2_to_q_homotopy() {
        // f = first coordinate, σ(y) = (y, 0)
        let f = RatMatrix::from_i64(&[&[1, 0]]);
        let sigma = RatMatrix::from_i64(&[&[1], &[0]]);
        let op = extra_codegeneracy(&f, Some(&sigma), 3).unwrap();
        assert!(op.verify_homotopy_identity(&f, 0, 2).unwrap());
        assert!(op.verify_homotopy_identity(&f, 2, 2).unwrap());
        // canonical section is computed when none is supplied
        let op2 = extra_codegeneracy(&f, None, 2).unwrap();
        assert!(op2.verify_homotopy_identity(&f, 0, 2).unwrap());
        // non-section rejected
        let bad = RatMatrix::from_i64(&[&[0], &[1]]);
        assert!(extra_codegeneracy(&f, Some(&bad), 2).is_err());
    }

    #[test]
    fn nerve_descent_identity_map() {
        let f = RatMatrix::identity(2);
        let r = verify_nerve_descent(&f, None, 0, 2, 2).unwrap();
        assert!(r.pass, "{:?}", r.degrees);
    }

    #[test]
    fn nerve_descent_q2_to_q() {
        let f = RatMatrix::from_i64(&[&[1, 0]]);
        let r = verify_nerve_descent(&f, None, 0, 2, 3).unwrap();
        assert!(r.pass, "{:?}", r.degrees);
        assert_eq!(r.homotopy_identity, Some(true));
    }

    #[test]
    fn nerve_descent_truncated_q3_to_q2() {
        let f = RatMatrix::from_i64(&[&[1, 0, 2], &[0, 1, -1]]);
        let r = verify_nerve_descent(&f, None, 2, 2, 3).unwrap();
        assert!(r.pass, "{:?}", r.degrees);
    }

    #[test]
    fn truncated_de_rham_values() {
        // Q^2, k = 0: constants only
        let h = truncated_de_rham(2, 0, 2, 2);
        assert_eq!(h, vec![1, 0, 0]);
        // k = 2, W = 2: closed constant 2-forms in degree 2
        let h2 = truncated_de_rham(2, 2, 2, 3);
        assert_eq!(h2[2], 1);
        assert_eq!(h2[3], 0);
    }

    fn acyclic_factor_hypercover(levels: usize) -> SimpLinMap {
        // projection DK(C ⊕ D) → DK(C) with D = (Q →id Q) in degrees (1, 0)
        let c = ChainComplexQ::new(
            0,
            vec![1, 1],
            vec![RatMatrix::zeros(1, 1)],
            Orientation::Chain,
        )
        .unwrap();
        let d = ChainComplexQ::new(
            0,
            vec![1, 1],
            vec![RatMatrix::identity(1)],
            Orientation::Chain,
        )
        .unwrap();
        let big = instances::direct_sum_complex(&c, &d);
        let proj: Vec<RatMatrix> = (0..2)
            .map(|l| {
                RatMatrix::from_fn(1, big.dims[l], |_, j| if j == 0 { rat(1) } else { rat(0) })
            })
            .collect();
        let (_, _, f) = crate::linmodel::dold_kan_map(&big, &c, &proj, levels).unwrap();
        f
    }

    #[test]
    fn acyclic_factor_is_hypercover_and_descends() {
        let f = acyclic_factor_hypercover(3);
        let hc = check_hypercover(&f, 1).unwrap();
        assert!(hc.pass, "{:?}", hc.first_failure());
        let r = verify_hypercover_descent(&f, 1, 2, 2, 3).unwrap();
        assert!(r.pass, "{:?}", r.degrees);
    }

    #[test]
    fn coskeleton_retract_identities_and_tower() {
        let f = acyclic_factor_hypercover(3);
        // tower step m = 0: identities verified inside the constructor
        let r0 = coskeleton_retract(&f, 0, 3).unwrap();
        // tower maps are hypercovers
        let hc = check_hypercover(&r0.tower, 1).unwrap();
        assert!(hc.pass, "{:?}", hc.first_failure());
        let r1 = coskeleton_retract(&f, 1, 3).unwrap();
        let hc1 = check_hypercover(&r1.tower, 1).unwrap();
        assert!(hc1.pass);
    }

    #[test]
    fn coskeleton_tower_composes_to_f() {
        let f = acyclic_factor_hypercover(3);
        let n = 1usize;
        // stages m = n+1 down to −1; composite of tower maps conjugated by
        // the end identifications equals f levelwise
        let top = crate::linmodel::relative_coskeleton(&f, (n + 1) as i64, 3).unwrap();
        let from_x = crate::linmodel::coskeleton_from_source(&f, &top).unwrap();
        for l in 0..=3usize {
            assert!(is_bijective(from_x.level(l)), "X ≅ cosk_{{n+1}} at level {l}");
        }
        let mut acc = from_x.levels.clone();
        let mut upper = top;
        for m in (0..=(n as i64 + 1)).rev() {
            let lower = crate::linmodel::relative_coskeleton(&f, m - 1, 3).unwrap();
            let step = coskeleton_tower_map(&upper, &lower).unwrap();
            for l in 0..=3usize {
                acc[l] = step.levels[l].mul(&acc[l]);
            }
            upper = lower;
        }
        // bottom stage is Y itself: rels are pure Y coordinates
        for l in 0..=3usize {
            let y_ident = upper.rels[l].eval_y();
            let total = y_ident.mul(&acc[l]);
            assert_eq!(total, f.levels[l].clone(), "tower composes to f at level {l}");
        }
    }

    #[test]
    fn retract_lemma_on_tower_step() {
        let f = acyclic_factor_hypercover(3);
        let r = coskeleton_retract(&f, 0, 3).unwrap();
        let report = verify_retract_lemma(&r, 2, 2, 2).unwrap();
        assert!(report.pass, "{:?}", report.degrees);
    }

    #[test]
    fn ez_route_matches_direct() {
        let f = acyclic_factor_hypercover(3);
        let ez = verify_ez_route(&f, 2, 2, 2).unwrap();
        assert!(ez.pass, "{:?}", ez.degrees);
    }

    #[test]
    fn triple_lemma_on_nerve() {
        let f = acyclic_factor_hypercover(3);
        let z = cech_nerve(&f, 1, 3).unwrap();
        let tot_y = total_complex(&f.target, 2, 2, 3, true).unwrap();
        let lemma = verify_triple_lemma(&z, &tot_y, 2).unwrap();
        assert!(lemma.iter().all(|d| d.iso), "{lemma:?}");
    }

    #[test]
    fn all_routes_agree() {
        let f = acyclic_factor_hypercover(3);
        let r = verify_descent_all_routes(&f, 1, 2, 2, 2).unwrap();
        assert!(r.pass, "{:?}", r.degrees);
    }

    #[test]
    fn random_hypercover_descends() {
        let mut rng = instances::rng(7);
        for _ in 0..3 {
            let inst = instances::random_hypercover(&mut rng, 1, 3);
            let hc = check_hypercover(&inst.f, 1).unwrap();
            assert!(hc.pass, "{:?}", hc.first_failure());
            let r = verify_hypercover_descent(&inst.f, 1, 2, 2, 2).unwrap();
            assert!(r.pass, "{:?}", r.degrees);
        }
    }

    #[test]
    fn non_quasi_iso_fails_descent_dims() {
        // inclusion of the constant model into DK(Q →0 Q) as a direct
        // cohomology comparison: dims differ in degree 2 already at the
        // level of homology counts, so isomorphism fails. Use the collapse
        // map instead: DK(Q→0Q) → constant Q.
        let c = ChainComplexQ::new(
            0,
            vec![1, 1],
            vec![RatMatrix::zeros(1, 1)],
            Orientation::Chain,
        )
        .unwrap();
        let x = dold_kan(&c, 3).unwrap();
        let y = instances::constant_model(1, 3);
        let mut levels = Vec::new();
        for lv in 0..=3usize {
            let mut m = RatMatrix::zeros(1, x.dim(lv));
            m.set(0, 0, rat(1));
            levels.push(m);
        }
        let f = SimpLinMap::new(x, y, levels).unwrap();
        // not a hypercover, so the precondition must reject it
        assert!(verify_hypercover_descent(&f, 1, 2, 2, 2).is_err());
    }
}
