//! Tangent complexes of linear Lie n-groupoid models.
//!
//! The tangent complex is computed two independent ways and cross-checked:
//! as the kernels of the top horn projections (which in a simplicial vector
//! space are the Moore subspaces ∩_{i<l} ker d_i with differential
//! (−1)^l d_l), and as the quotients by degenerate subspaces with the
//! alternating-sum differential. Hypercovers must induce isomorphisms on the
//! homology of these complexes; that certification is exact.

use serde::Serialize;

use crate::exactla::{
    all_isomorphisms, express_in_basis, induced_on_homology, ChainComplexQ, CohomologyReport,
    HomologyDegree, Orientation, RatMatrix,
};
use crate::linmodel::{check_lie_n_groupoid, is_bijective, LinSimpSpace, ModelError, SimpLinMap};

/// Which construction produced a tangent complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TangentRoute {
    /// Kernels of the horn projections p^l_l (Moore subspaces).
    HornKernel,
    /// Quotients X_l / Σ im(s_i) with the alternating-sum differential.
    DegeneracyQuotient,
}

/// Tangent complex in degrees 0..=n with inclusion matrices into the model
/// levels (kernel route) and its provenance.
#[derive(Debug, Clone)]
pub struct TangentComplexData {
    pub complex: ChainComplexQ,
    /// inclusions[l] : 𝒯_l X ↪ X_l
    pub inclusions: Vec<RatMatrix>,
    pub provenance: TangentRoute,
}

impl TangentComplexData {
    pub fn dim(&self, l: usize) -> usize {
        self.complex.dims.get(l).copied().unwrap_or(0)
    }

    /// Differential 𝒯_l → 𝒯_{l−1}; zero outside the stored range.
    pub fn differential(&self, l: usize) -> RatMatrix {
        if l >= 1 && l < self.complex.dims.len() {
            self.complex.maps[l - 1].clone()
        } else if l >= 1 {
            RatMatrix::zeros(self.dim(l - 1), self.dim(l))
        } else {
            RatMatrix::zeros(0, self.dim(0))
        }
    }

    pub fn homology(&self) -> Vec<HomologyDegree> {
        self.complex.homology()
    }
}

/// The degeneracy-quotient route: X_l / Σ_{i<l} im(s_i) with
/// ∂ = Σ_{i≤l} (−1)^i d_i. Returns (complex, projections, lifts) where
/// projections[l] : X_l → Q_l and lifts[l] : Q_l → X_l split it.
pub fn tangent_complex_quotient(
    x: &LinSimpSpace,
    n: usize,
) -> Result<(ChainComplexQ, Vec<RatMatrix>, Vec<RatMatrix>), ModelError> {
    let top = n.min(x.max_level());
    let mut projections = Vec::with_capacity(top + 1);
    let mut lifts = Vec::with_capacity(top + 1);
    for l in 0..=top {
        let d = x.dim(l);
        let degenerate = if l == 0 {
            RatMatrix::zeros(d, 0)
        } else {
            let mut wide = RatMatrix::zeros(d, 0);
            for i in 0..l {
                wide = wide.hstack(x.degen_mat(l - 1, i));
            }
            wide.image_basis()
        };
        // Complement basis: standard vectors growing the rank, in order.
        let combined = degenerate.hstack(&RatMatrix::identity(d));
        let (_, pivots) = combined.rref();
        let comp_cols: Vec<usize> = pivots
            .iter()
            .copied()
            .filter(|&c| c >= degenerate.cols())
            .map(|c| c - degenerate.cols())
            .collect();
        let lift = RatMatrix::identity(d).select_columns(&comp_cols);
        // Projection = E-block of coordinates in the full basis [W | E].
        let full = degenerate.hstack(&lift);
        let coords = express_in_basis(&full, &RatMatrix::identity(d))?;
        let proj = RatMatrix::from_fn(lift.cols(), d, |r, c| {
            coords.at(degenerate.cols() + r, c).clone()
        });
        projections.push(proj);
        lifts.push(lift);
    }
    let dims: Vec<usize> = lifts.iter().map(|b| b.cols()).collect();
    let mut maps = Vec::with_capacity(top);
    for l in 1..=top {
        let mut delta = RatMatrix::zeros(x.dim(l - 1), x.dim(l));
        for i in 0..=l {
            let term = x.face_mat(l, i);
            delta = if i % 2 == 0 { delta.add(term) } else { delta.sub(term) };
        }
        // must kill the degenerate subspace of the source
        for i in 0..l {
            let through = projections[l - 1].mul(&delta.mul(x.degen_mat(l - 1, i)));
            if !through.is_zero() {
                return Err(ModelError::Identity(
                    "alternating-sum differential does not descend to the quotient".into(),
                ));
            }
        }
        maps.push(projections[l - 1].mul(&delta.mul(&lifts[l])));
    }
    let complex = ChainComplexQ::new(0, dims, maps, Orientation::Chain)?;
    Ok((complex, projections, lifts))
}

/// Compute the tangent complex of a Lie n-groupoid model. Runs the full
/// groupoid check, builds the horn-kernel route, cross-checks the quotient
/// route (comparison isomorphism plus equal homology dimensions), and checks
/// 𝒯_l X = 0 for n < l ≤ max level.
pub fn tangent_complex(x: &LinSimpSpace, n: usize) -> Result<TangentComplexData, ModelError> {
    let report = check_lie_n_groupoid(x, n)?;
    if !report.pass {
        return Err(ModelError::Precondition(format!(
            "not a Lie {n}-groupoid: first failure {:?}",
            report.first_failure()
        )));
    }
    tangent_complex_trusted(x, n)
}

/// Tangent complex without re-running the Lie n-groupoid check; the
/// cross-route comparison and the vanishing check above degree n still run.
pub fn tangent_complex_trusted(
    x: &LinSimpSpace,
    n: usize,
) -> Result<TangentComplexData, ModelError> {
    let (moore, inclusions) = crate::linmodel::moore_normalize(x)?;
    for l in (n + 1)..moore.dims.len() {
        if moore.dims[l] != 0 {
            return Err(ModelError::Precondition(format!(
                "tangent space nonzero in degree {l} > n = {n}"
            )));
        }
    }
    let top = n.min(x.max_level());
    let complex = ChainComplexQ::new(
        0,
        moore.dims[..=top].to_vec(),
        moore.maps[..top].to_vec(),
        Orientation::Chain,
    )?;
    let data = TangentComplexData {
        complex,
        inclusions: inclusions[..=top].to_vec(),
        provenance: TangentRoute::HornKernel,
    };
    cross_check_routes(x, n, &data)?;
    Ok(data)
}

/// Verify that the kernel and quotient routes agree: the composite
/// 𝒯_l ↪ X_l ↠ Q_l is a chain isomorphism and homology dimensions match.
fn cross_check_routes(
    x: &LinSimpSpace,
    n: usize,
    kernel_route: &TangentComplexData,
) -> Result<(), ModelError> {
    let (quot, projections, _) = tangent_complex_quotient(x, n)?;
    let top = n.min(x.max_level());
    let mut comparison = Vec::with_capacity(top + 1);
    for l in 0..=top {
        let c = projections[l].mul(&kernel_route.inclusions[l]);
        if !is_bijective(&c) {
            return Err(ModelError::Identity(format!(
                "kernel and quotient tangent routes disagree in degree {l}"
            )));
        }
        comparison.push(c);
    }
    for l in 1..=top {
        let lhs = comparison[l - 1].mul(&kernel_route.complex.maps[l - 1]);
        let rhs = quot.maps[l - 1].mul(&comparison[l]);
        if lhs != rhs {
            return Err(ModelError::Identity(format!(
                "route comparison is not a chain map in degree {l}"
            )));
        }
    }
    let hk = kernel_route.complex.homology();
    let hq = quot.homology();
    for l in 0..=top {
        if hk[l].dim != hq[l].dim {
            return Err(ModelError::Identity(format!(
                "tangent homology dimensions differ between routes in degree {l}"
            )));
        }
    }
    Ok(())
}

/// Exact homology of the tangent complex as a report.
pub fn tangent_homology(t: &TangentComplexData, with_reps: bool) -> CohomologyReport {
    CohomologyReport::from_homology(&t.homology(), with_reps)
}

/// Chain map between tangent complexes induced by a simplicial map: the
/// levelwise restriction to the Moore subspaces.
pub fn induced_tangent_map(
    f: &SimpLinMap,
    tx: &TangentComplexData,
    ty: &TangentComplexData,
) -> Result<Vec<RatMatrix>, ModelError> {
    let top = tx.complex.dims.len().min(ty.complex.dims.len()) - 1;
    let mut levels = Vec::with_capacity(top + 1);
    for l in 0..=top {
        let mapped = f.levels[l].mul(&tx.inclusions[l]);
        let coords = express_in_basis(&ty.inclusions[l], &mapped).map_err(|_| {
            ModelError::NotSimplicial(format!(
                "induced map does not preserve the tangent subspace in degree {l}"
            ))
        })?;
        levels.push(coords);
    }
    for l in 1..=top {
        let lhs = levels[l - 1].mul(&tx.complex.maps[l - 1]);
        let rhs = ty.complex.maps[l - 1].mul(&levels[l]);
        if lhs != rhs {
            return Err(ModelError::NotSimplicial(format!(
                "induced tangent map fails to commute with ∂ in degree {l}"
            )));
        }
    }
    Ok(levels)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiIsoDegree {
    pub degree: usize,
    pub dim_source: usize,
    pub dim_target: usize,
    pub induced_rank: usize,
    pub iso: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiIsoReport {
    pub pass: bool,
    pub degrees: Vec<QuasiIsoDegree>,
}

/// Check that a simplicial map induces isomorphisms on all tangent homology
/// groups.
pub fn check_quasi_iso(
    f: &SimpLinMap,
    tx: &TangentComplexData,
    ty: &TangentComplexData,
) -> Result<QuasiIsoReport, ModelError> {
    let levels = induced_tangent_map(f, tx, ty)?;
    let hx = tx.homology();
    let hy = ty.homology();
    let top = levels.len() - 1;
    let induced = induced_on_homology(&hx[..=top], &hy[..=top], &levels)?;
    let degrees: Vec<QuasiIsoDegree> = induced
        .iter()
        .enumerate()
        .map(|(l, m)| QuasiIsoDegree {
            degree: l,
            dim_source: hx[l].dim,
            dim_target: hy[l].dim,
            induced_rank: m.rank(),
            iso: m.rows() == m.cols() && m.rank() == m.rows(),
        })
        .collect();
    let pass = all_isomorphisms(&induced);
    Ok(QuasiIsoReport { pass, degrees })
}
