//! Deterministic model builders and seeded random instance generators.
//!
//! These back the self-test battery, the test suite and the benches: the
//! linear pair groupoid, constant models, the standard symplectic vector
//! space, 1-shifted models DK(A → V) with multiplicative constant forms,
//! random chain complexes with prescribed homology, random hypercovers as
//! projections with acyclic kernel (conjugated for variety), and random
//! zig-zags carrying seeded symplectic forms.

use num_traits::{One, Zero};
use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exactla::{rat, ChainComplexQ, Orientation, Rat, RatMatrix};
use crate::forms::{normalized_basis, PolyForm};
use crate::linmodel::{dold_kan, dold_kan_map, LinSimpSpace, ModelError, SimpLinMap};
use crate::symplectic::{check_shifted_symplectic, ShiftedForm};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_int(r: &mut SeededRng, lo: i64, hi: i64) -> i64 {
    r.gen_range(lo..=hi)
}

pub fn random_matrix(r: &mut SeededRng, rows: usize, cols: usize, bound: i64) -> RatMatrix {
    let mut m = RatMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rat(rand_int(r, -bound, bound)));
        }
    }
    m
}

/// Random invertible matrix with small integer entries: (I + strictly
/// lower) · (I + strictly upper), determinant 1.
pub fn random_invertible(r: &mut SeededRng, n: usize) -> RatMatrix {
    let mut lower = RatMatrix::identity(n);
    let mut upper = RatMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, rat(rand_int(r, -2, 2)));
            upper.set(j, i, rat(rand_int(r, -2, 2)));
        }
    }
    lower.mul(&upper)
}

/// Constant simplicial space on Q^d (every structure map the identity).
pub fn constant_model(d: usize, levels: usize) -> LinSimpSpace {
    let c = ChainComplexQ::new(0, vec![d], vec![], Orientation::Chain).unwrap();
    dold_kan(&c, levels).unwrap()
}

/// Linear pair groupoid on V = Q^vdim: X_k = V^{k+1}, faces delete a
/// coordinate, degeneracies repeat one.
pub fn pair_groupoid_model(vdim: usize, levels: usize) -> LinSimpSpace {
    let dims: Vec<usize> = (0..=levels).map(|k| vdim * (k + 1)).collect();
    let block = |rows_blocks: usize, cols_blocks: usize, f: &dyn Fn(usize) -> usize| {
        RatMatrix::from_fn(rows_blocks * vdim, cols_blocks * vdim, |r, c| {
            let (rb, ri) = (r / vdim, r % vdim);
            if c == f(rb) * vdim + ri {
                Rat::one()
            } else {
                Rat::zero()
            }
        })
    };
    let mut face: Vec<Vec<RatMatrix>> = vec![Vec::new()];
    for k in 1..=levels {
        let mut per_i = Vec::new();
        for i in 0..=k {
            per_i.push(block(k, k + 1, &move |rb| if rb < i { rb } else { rb + 1 }));
        }
        face.push(per_i);
    }
    let mut degen: Vec<Vec<RatMatrix>> = Vec::new();
    for k in 0..levels {
        let mut per_i = Vec::new();
        for i in 0..=k {
            per_i.push(block(k + 2, k + 1, &move |rb| {
                if rb <= i {
                    rb
                } else if rb == i + 1 {
                    i
                } else {
                    rb - 1
                }
            }));
        }
        degen.push(per_i);
    }
    degen.push(Vec::new());
    LinSimpSpace::new(dims, face, degen).expect("pair groupoid model")
}

/// Standard symplectic Gram [[0, I], [−I, 0]] on Q^{2d}.
pub fn standard_symplectic_gram(d: usize) -> RatMatrix {
    RatMatrix::from_fn(2 * d, 2 * d, |r, c| {
        if c == r + d {
            Rat::one()
        } else if r == c + d {
            -Rat::one()
        } else {
            Rat::zero()
        }
    })
}

/// (Q^{2d}, standard ω) as a 0-shifted instance on the constant model.
pub fn standard_symplectic(d: usize, levels: usize) -> (LinSimpSpace, ShiftedForm) {
    let x = constant_model(2 * d, levels);
    let omega = PolyForm::constant_two_form(&standard_symplectic_gram(d));
    (x, ShiftedForm::new(0, 2, vec![omega]))
}

/// DK(A →ρ V) as a Lie 1-groupoid model.
pub fn one_shifted_model(rho: &RatMatrix, levels: usize) -> LinSimpSpace {
    let c = ChainComplexQ::new(
        0,
        vec![rho.rows(), rho.cols()],
        vec![rho.clone()],
        Orientation::Chain,
    )
    .unwrap();
    dold_kan(&c, levels).unwrap()
}

/// Basis of the constant normalized multiplicative 2-forms on X_1 of a
/// model, returned as Gram matrices: solutions of s₀*ω = 0 and δω = 0.
pub fn multiplicative_normalized_grams(x: &LinSimpSpace) -> Vec<RatMatrix> {
    let d1 = x.dim(1);
    // coordinates: entries above the diagonal
    let mut pairs = Vec::new();
    for i in 0..d1 {
        for j in (i + 1)..d1 {
            pairs.push((i, j));
        }
    }
    let gram_of = |coords: &[Rat]| -> RatMatrix {
        let mut g = RatMatrix::zeros(d1, d1);
        for (t, &(i, j)) in pairs.iter().enumerate() {
            if !coords[t].is_zero() {
                g.set(i, j, coords[t].clone());
                g.set(j, i, -coords[t].clone());
            }
        }
        g
    };
    // linear conditions on the coordinates
    let conditions = |g: &RatMatrix| -> Vec<Rat> {
        let mut out = Vec::new();
        // normalization: s₀ᵀ G s₀ = 0
        let s0 = x.degen_mat(0, 0);
        let n = s0.transpose().mul(g).mul(s0);
        for i in 0..n.rows() {
            for j in (i + 1)..n.cols() {
                out.push(n.at(i, j).clone());
            }
        }
        // multiplicativity: Σ (−1)^t d_tᵀ G d_t = 0 on X₂
        let mut acc = RatMatrix::zeros(x.dim(2), x.dim(2));
        for t in 0..=2usize {
            let dt = x.face_mat(2, t);
            let term = dt.transpose().mul(g).mul(dt);
            acc = if t % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        for i in 0..acc.rows() {
            for j in (i + 1)..acc.cols() {
                out.push(acc.at(i, j).clone());
            }
        }
        out
    };
    // assemble the constraint matrix by evaluating on coordinate vectors
    let probe = conditions(&gram_of(&vec![Rat::zero(); pairs.len()]));
    let mut constraint = RatMatrix::zeros(probe.len(), pairs.len());
    for t in 0..pairs.len() {
        let mut e = vec![Rat::zero(); pairs.len()];
        e[t] = Rat::one();
        let vals = conditions(&gram_of(&e));
        for (r, v) in vals.into_iter().enumerate() {
            if !v.is_zero() {
                constraint.set(r, t, v);
            }
        }
    }
    let kernel = constraint.kernel_basis();
    (0..kernel.cols()).map(|c| gram_of(&kernel.column(c))).collect()
}

/// A 1-shifted symplectic instance on DK(A →ρ V) with A = V = Q^d: the
/// constant multiplicative normalized ω₁ is found by searching the solution
/// space for a form whose descended pairing is perfect.
pub fn one_shifted_instance(d: usize, rho: &RatMatrix) -> (LinSimpSpace, ShiftedForm) {
    assert_eq!(rho.rows(), d);
    assert_eq!(rho.cols(), d);
    let x = one_shifted_model(rho, 3);
    let grams = multiplicative_normalized_grams(&x);
    let phi0 = PolyForm::zero(x.dim(0), 3);
    // deterministic search: zero first (sufficient when homology vanishes),
    // then single basis elements, then pairwise sums
    let mut candidates: Vec<RatMatrix> = vec![RatMatrix::zeros(x.dim(1), x.dim(1))];
    candidates.extend(grams.clone());
    for i in 0..grams.len() {
        for j in (i + 1)..grams.len() {
            candidates.push(grams[i].add(&grams[j]));
            candidates.push(grams[i].sub(&grams[j]));
        }
    }
    for g in &candidates {
        let alpha = ShiftedForm::new(
            1,
            2,
            vec![phi0.clone(), PolyForm::constant_two_form(g)],
        );
        if let Ok(report) = check_shifted_symplectic(&x, &alpha, 1) {
            if report.pass {
                return (x, alpha);
            }
        }
    }
    panic!("no nondegenerate multiplicative form found for this ρ");
}

/// 0-shifted symplectic instance on a genuine Lie 1-groupoid: DK(A ↪ A⊕H)
/// with H = Q^{2d} carrying the standard form; the A-block is killed by the
/// multiplicativity constraint G·ρ = 0.
pub fn zero_shifted_on_groupoid(a_dim: usize, d: usize) -> (LinSimpSpace, ShiftedForm) {
    let v = a_dim + 2 * d;
    let rho = RatMatrix::from_fn(v, a_dim, |r, c| {
        if r == c {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    let x = one_shifted_model(&rho, 3);
    let std = standard_symplectic_gram(d);
    let mut g = RatMatrix::zeros(v, v);
    for r in 0..2 * d {
        for c in 0..2 * d {
            g.set(a_dim + r, a_dim + c, std.at(r, c).clone());
        }
    }
    let omega = PolyForm::constant_two_form(&g);
    (x, ShiftedForm::new(0, 2, vec![omega]))
}

/// Random chain complex in degrees 0..=n with prescribed homology dims and
/// extra acyclic identity pairs, conjugated by random invertible matrices.
pub fn random_regular_complex(
    r: &mut SeededRng,
    n: usize,
    h_dims: &[usize],
    acyclic_pairs: &[usize],
) -> ChainComplexQ {
    assert_eq!(h_dims.len(), n + 1);
    // dims[l] = h_l + pairs at (l+1, l) contribute to l and l+1
    let pair_count = |l: usize| acyclic_pairs.get(l).copied().unwrap_or(0);
    let mut dims = vec![0usize; n + 1];
    for l in 0..=n {
        dims[l] += h_dims[l];
        dims[l] += pair_count(l); // lower end of an (l+1, l) pair
        if l >= 1 {
            dims[l] += pair_count(l - 1); // upper end
        }
    }
    // block differentials: degree l+1 → l hits the pair blocks with identity
    let mut maps = Vec::new();
    for l in 0..n {
        let mut m = RatMatrix::zeros(dims[l], dims[l + 1]);
        // layout per degree: [h_l | pairs_low(l) | pairs_high(l−1)]
        let low_off = h_dims[l];
        let src_high_off = h_dims[l + 1] + pair_count(l + 1);
        for t in 0..pair_count(l) {
            m.set(low_off + t, src_high_off + t, Rat::one());
        }
        maps.push(m);
    }
    let c = ChainComplexQ::new(0, dims, maps, Orientation::Chain).unwrap();
    conjugate_complex(r, &c).0
}

/// Conjugate a complex by random invertible basis changes; returns the new
/// complex and the per-degree iso C → C′.
pub fn conjugate_complex(
    r: &mut SeededRng,
    c: &ChainComplexQ,
) -> (ChainComplexQ, Vec<RatMatrix>) {
    let ps: Vec<RatMatrix> = c.dims.iter().map(|&d| random_invertible(r, d)).collect();
    let inv: Vec<RatMatrix> = ps.iter().map(|p| p.inverse().expect("invertible")).collect();
    let maps: Vec<RatMatrix> = (0..c.maps.len())
        .map(|l| ps[l].mul(&c.maps[l]).mul(&inv[l + 1]))
        .collect();
    let c2 = ChainComplexQ::new(c.lo, c.dims.clone(), maps, c.orientation).unwrap();
    (c2, ps)
}

/// Direct sum of two chain complexes over matching degree ranges.
pub fn direct_sum_complex(a: &ChainComplexQ, b: &ChainComplexQ) -> ChainComplexQ {
    assert_eq!(a.lo, b.lo);
    let len = a.dims.len().max(b.dims.len());
    let ad = |l: usize| a.dims.get(l).copied().unwrap_or(0);
    let bd = |l: usize| b.dims.get(l).copied().unwrap_or(0);
    let dims: Vec<usize> = (0..len).map(|l| ad(l) + bd(l)).collect();
    let maps: Vec<RatMatrix> = (0..len - 1)
        .map(|l| {
            let mut m = RatMatrix::zeros(dims[l], dims[l + 1]);
            if l + 1 < a.dims.len() {
                for r in 0..ad(l) {
                    for c in 0..ad(l + 1) {
                        m.set(r, c, a.maps[l].at(r, c).clone());
                    }
                }
            }
            if l + 1 < b.dims.len() {
                for r in 0..bd(l) {
                    for c in 0..bd(l + 1) {
                        m.set(ad(l) + r, ad(l + 1) + c, b.maps[l].at(r, c).clone());
                    }
                }
            }
            m
        })
        .collect();
    ChainComplexQ::new(a.lo, dims, maps, a.orientation).unwrap()
}

/// Acyclic complex: identity pairs (l+1, l) with multiplicities.
pub fn acyclic_complex(n: usize, pairs: &[usize]) -> ChainComplexQ {
    random_regular_complex(&mut rng(0), n, &vec![0; n + 1], pairs)
}

/// A hypercover instance: a projection with acyclic kernel between DK
/// models, all data conjugated by random basis changes.
pub struct HypercoverInstance {
    pub x: LinSimpSpace,
    pub y: LinSimpSpace,
    pub f: SimpLinMap,
    pub n: usize,
}

/// Random hypercover whose underlying complexes have per-degree dimension
/// at most `max_dim` (resampled until the cap holds).
pub fn random_hypercover_bounded(
    r: &mut SeededRng,
    n: usize,
    levels: usize,
    max_dim: usize,
) -> HypercoverInstance {
    loop {
        let inst = random_hypercover(r, n, levels);
        let (c0, _) = crate::linmodel::moore_normalize(&inst.x).expect("moore");
        if c0.dims.iter().all(|&d| d <= max_dim) {
            return inst;
        }
    }
}

/// Random hypercover between Lie n-groupoid DK models stored to `levels`.
pub fn random_hypercover(r: &mut SeededRng, n: usize, levels: usize) -> HypercoverInstance {
    let h_dims: Vec<usize> = (0..=n).map(|_| rand_int(r, 0, 2) as usize).collect();
    let base_pairs: Vec<usize> = (0..n.max(1)).map(|_| rand_int(r, 0, 1) as usize).collect();
    let extra_pairs: Vec<usize> = (0..n.max(1)).map(|_| rand_int(r, 0, 2) as usize).collect();
    let c = random_regular_complex(r, n, &h_dims, &base_pairs);
    let d_acyclic = acyclic_complex(n, &extra_pairs);
    let big = direct_sum_complex(&c, &d_acyclic);
    // conjugate source and target independently; the projection conjugates
    // along: φ = P_tgt ∘ proj ∘ P_src⁻¹
    let (src, p_src) = conjugate_complex(r, &big);
    let (tgt, p_tgt) = conjugate_complex(r, &c);
    let proj: Vec<RatMatrix> = (0..src.dims.len())
        .map(|l| {
            let cd = c.dims.get(l).copied().unwrap_or(0);
            let raw = RatMatrix::from_fn(cd, big.dims[l], |i, j| {
                if i == j {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            });
            p_tgt[l].mul(&raw).mul(&p_src[l].inverse().expect("invertible"))
        })
        .collect();
    let (x, y, f) = dold_kan_map(&src, &tgt, &proj, levels).expect("projection is simplicial");
    HypercoverInstance { x, y, f, n }
}

/// A zig-zag of hypercovers X ⇐g Z h⇒ Y with an m-shifted symplectic form
/// on X.
pub struct ZigZag {
    pub g: SimpLinMap,
    pub h: SimpLinMap,
    pub alpha: ShiftedForm,
    pub n: usize,
    pub m: i64,
    /// Underlying chain complex of the right-hand model Y (for extending
    /// the zig-zag in composition tests).
    pub y_complex: ChainComplexQ,
}

/// Seeded symplectic instance for the supported (m, n) combinations.
pub fn seed_symplectic(r: &mut SeededRng, m: i64, n: usize) -> (ChainComplexQ, ShiftedForm) {
    match (m, n) {
        (0, 0) => {
            let d = rand_int(r, 1, 2) as usize;
            let (x, alpha) = standard_symplectic(d, 2);
            let c = ChainComplexQ::new(0, vec![x.dim(0)], vec![], Orientation::Chain).unwrap();
            (c, alpha)
        }
        (0, 1) => {
            let a = rand_int(r, 0, 2) as usize;
            let d = rand_int(r, 1, 2) as usize;
            let (x, alpha) = zero_shifted_on_groupoid(a, d);
            let rho = RatMatrix::from_fn(x.dim(0), a, |i, j| {
                if i == j {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            });
            let c = ChainComplexQ::new(
                0,
                vec![x.dim(0), a],
                vec![rho],
                Orientation::Chain,
            )
            .unwrap();
            (c, alpha)
        }
        (1, 1) => {
            let d = rand_int(r, 1, 2) as usize;
            let rho = if rand_int(r, 0, 1) == 0 {
                RatMatrix::zeros(d, d)
            } else {
                RatMatrix::identity(d)
            };
            let (_, alpha) = one_shifted_instance(d, &rho);
            let c = ChainComplexQ::new(
                0,
                vec![d, d],
                vec![rho],
                Orientation::Chain,
            )
            .unwrap();
            (c, alpha)
        }
        _ => panic!("no seed construction for (m, n) = ({m}, {n})"),
    }
}

/// Random zig-zag with a symplectic form on the left model. Built from a
/// seed (C, α₀): X = DK(C), Z = DK(C ⊕ D₁ ⊕ D₂), Y = DK(C ⊕ D₁), legs the
/// projections; α is the seed optionally gauged by a random (m−1)-shifted
/// form.
pub fn random_zigzag(r: &mut SeededRng, m: i64, n: usize, gauge_weight: usize) -> ZigZag {
    let levels = n + 2;
    let (c, alpha_seed) = seed_symplectic(r, m, n);
    // hypercovers between Lie 0-groupoids are isomorphisms: no acyclic
    // factors available at n = 0
    let pairs1: Vec<usize> = (0..n.max(1))
        .map(|_| if n == 0 { 0 } else { rand_int(r, 0, 1) as usize })
        .collect();
    let pairs2: Vec<usize> = (0..n.max(1))
        .map(|_| if n == 0 { 0 } else { rand_int(r, 0, 1) as usize })
        .collect();
    let d1 = acyclic_complex(n, &pairs1);
    let d2 = acyclic_complex(n, &pairs2);
    let cy = direct_sum_complex(&c, &d1);
    let cz = direct_sum_complex(&cy, &d2);
    let proj_to = |small: &ChainComplexQ, big: &ChainComplexQ| -> Vec<RatMatrix> {
        (0..big.dims.len())
            .map(|l| {
                let sd = small.dims.get(l).copied().unwrap_or(0);
                RatMatrix::from_fn(sd, big.dims[l], |i, j| {
                    if i == j {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
            })
            .collect()
    };
    let (_, x, g) = dold_kan_map(&cz, &c, &proj_to(&c, &cz), levels).expect("projection");
    let (_, _, h) = dold_kan_map(&cz, &cy, &proj_to(&cy, &cz), levels).expect("projection");
    let mut alpha = alpha_seed;
    // optionally gauge by a random (m−1)-shifted 2-form on X
    if m >= 1 && gauge_weight >= 2 {
        let phi = random_shifted_form(r, &x, m - 1, 2, gauge_weight);
        alpha = crate::symplectic::gauge_transform(&x, &alpha, &phi).expect("gauge");
    }
    ZigZag {
        g,
        h,
        alpha,
        n,
        m,
        y_complex: cy,
    }
}

/// Random normalized shifted form (not necessarily closed): components drawn
/// from the normalized bases of weights k..=w.
pub fn random_shifted_form(
    r: &mut SeededRng,
    x: &LinSimpSpace,
    shift: i64,
    k: usize,
    w: usize,
) -> ShiftedForm {
    let mut components = Vec::new();
    for i in 0..=shift.max(-1) {
        if i < 0 {
            continue;
        }
        let iu = i as usize;
        let q = k + (shift - i) as usize;
        let mut form = PolyForm::zero(x.dim(iu), q);
        for weight in q..=w.max(q) {
            let (space, basis) = normalized_basis(x, iu, q, weight).expect("normalized basis");
            if basis.cols() == 0 {
                continue;
            }
            let coords: Vec<Rat> =
                (0..basis.cols()).map(|_| rat(rand_int(r, -2, 2))).collect();
            let full = basis.mul(&RatMatrix::column_vector(&coords));
            form = form.add(&space.from_coords(&full.column(0)));
        }
        components.push(form);
    }
    ShiftedForm::new(shift, k, components)
}

/// Single-level surjection fixtures for nerve descent: Q^a ↠ Q^b by
/// coordinate projection plus a random invertible twist.
pub fn random_surjection(r: &mut SeededRng, a: usize, b: usize) -> RatMatrix {
    assert!(a >= b);
    let raw = RatMatrix::from_fn(b, a, |i, j| {
        if i == j {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    random_invertible(r, b).mul(&raw).mul(&random_invertible(r, a))
}

/// Convenience: identity-shaped hypercover for tests.
pub fn identity_hypercover(x: &LinSimpSpace) -> SimpLinMap {
    SimpLinMap::identity(x)
}

/// Independent 1-shifted non-degeneracy criterion, evaluated directly:
/// ker ω ∩ A ∩ ker ρ = 0 (no vector of the top-degree tangent space is
/// killed by the full Gram, the anchor and the Moore projection at once).
pub fn one_shifted_radical_criterion(
    _x: &LinSimpSpace,
    alpha: &ShiftedForm,
    t: &crate::tangent::TangentComplexData,
) -> Result<bool, ModelError> {
    let g = alpha.components[1].gram_of_constant_part();
    let radical_cond = g.mul(&t.inclusions[1]);
    let rho = t.differential(1);
    let stacked = radical_cond.vstack(&rho);
    Ok(stacked.kernel_basis().cols() == 0)
}
