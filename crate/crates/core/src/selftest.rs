//! Built-in example battery: the canonical instances from the theory run
//! end to end. Used by the CLI `selftest` subcommand and as a smoke test.

use serde::Serialize;

use crate::descent::{verify_descent_all_routes, verify_nerve_descent};
use crate::exactla::{rat, RatMatrix};
use crate::instances;
use crate::linmodel::{check_hypercover, check_lie_n_groupoid, SimpLinMap};
use crate::ssets::{check_kan_set, nerve_groupoid, FiniteGroupoid};
use crate::symplectic::{
    check_shifted_symplectic, check_symplectic_morita, compose_morita, transfer_symplectic,
    MoritaEquivalence,
};
use crate::tangent::{check_quasi_iso, tangent_complex};

#[derive(Debug, Clone, Serialize)]
pub struct SelftestCase {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub passed: usize,
    pub failed: usize,
    pub cases: Vec<SelftestCase>,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

fn case(cases: &mut Vec<SelftestCase>, name: &str, r: Result<bool, String>) {
    let (pass, detail) = match r {
        Ok(true) => (true, String::new()),
        Ok(false) => (false, "check returned fail".to_string()),
        Err(e) => (false, e),
    };
    cases.push(SelftestCase {
        name: name.to_string(),
        pass,
        detail,
    });
}

/// Run the battery. With `corrupt` set, one embedded fixture is perturbed,
/// which must make the battery fail (used to exercise the failure path).
pub fn run(corrupt: bool) -> SelftestReport {
    let mut cases = Vec::new();

    // set-level pair groupoid nerve: strict Kan from level 2
    case(&mut cases, "pair groupoid nerve Kan!(2..3, j)", {
        (|| {
            let g = FiniteGroupoid::pair(&["a", "b"]);
            let n = nerve_groupoid(&g, 3).map_err(|e| e.to_string())?;
            for m in 2..=3 {
                for j in 0..=m {
                    if !check_kan_set(&n, m, j, true).map_err(|e| e.to_string())?.pass {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        })()
    });

    // linear pair groupoid: Lie 1-groupoid through level 4
    case(&mut cases, "linear pair groupoid is a Lie 1-groupoid", {
        (|| {
            let mut x = instances::pair_groupoid_model(1, 4);
            if corrupt {
                x.perturb_face_entry(1, 0, 0, 0, rat(1));
                x.validate().map_err(|e| e.to_string())?;
            }
            Ok(check_lie_n_groupoid(&x, 1).map_err(|e| e.to_string())?.pass)
        })()
    });

    // pair groupoid tangent homology vanishes
    case(&mut cases, "pair groupoid tangent complex is acyclic", {
        (|| {
            let x = instances::pair_groupoid_model(2, 3);
            let t = tangent_complex(&x, 1).map_err(|e| e.to_string())?;
            Ok(t.homology().iter().all(|h| h.dim == 0))
        })()
    });

    // standard symplectic vector space passes; zero form fails
    case(&mut cases, "standard symplectic (Q^2, ω) passes, ω = 0 fails", {
        (|| {
            let (x, alpha) = instances::standard_symplectic(1, 2);
            let good = check_shifted_symplectic(&x, &alpha, 0).map_err(|e| e.to_string())?;
            let zero = crate::symplectic::ShiftedForm::zero(&x, 0, 2);
            let bad = check_shifted_symplectic(&x, &zero, 0).map_err(|e| e.to_string())?;
            Ok(good.pass && !bad.pass)
        })()
    });

    // 1-shifted linear model
    case(&mut cases, "1-shifted model DK(A → V) is shifted symplectic", {
        (|| {
            let (x, alpha) = instances::one_shifted_instance(1, &RatMatrix::zeros(1, 1));
            Ok(check_shifted_symplectic(&x, &alpha, 1).map_err(|e| e.to_string())?.pass)
        })()
    });

    // acyclic-factor hypercover: matching maps + tangent quasi-iso
    case(&mut cases, "acyclic-factor hypercover and quasi-isomorphism", {
        (|| {
            let mut rng = instances::rng(11);
            let inst = instances::random_hypercover(&mut rng, 1, 3);
            let hc = check_hypercover(&inst.f, 1).map_err(|e| e.to_string())?;
            let tx = tangent_complex(&inst.x, 1).map_err(|e| e.to_string())?;
            let ty = tangent_complex(&inst.y, 1).map_err(|e| e.to_string())?;
            let q = check_quasi_iso(&inst.f, &tx, &ty).map_err(|e| e.to_string())?;
            Ok(hc.pass && q.pass)
        })()
    });

    // nerve descent with homotopy operator
    case(&mut cases, "nerve descent for Q^2 ↠ Q with homotopy identity", {
        (|| {
            let f = RatMatrix::from_i64(&[&[1, 0]]);
            let r = verify_nerve_descent(&f, None, 0, 2, 2).map_err(|e| e.to_string())?;
            Ok(r.pass && r.homotopy_identity == Some(true))
        })()
    });

    // hypercover descent, all routes
    case(&mut cases, "hypercover descent: direct, triple and EZ routes agree", {
        (|| {
            let mut rng = instances::rng(23);
            let inst = instances::random_hypercover(&mut rng, 1, 3);
            let r = verify_descent_all_routes(&inst.f, 1, 2, 2, 2).map_err(|e| e.to_string())?;
            Ok(r.pass)
        })()
    });

    // transfer along a strict-morphism zig-zag and a random zig-zag
    case(&mut cases, "transfer along zig-zags of hypercovers", {
        (|| {
            let mut rng = instances::rng(5);
            let zz = instances::random_zigzag(&mut rng, 1, 1, 2);
            let out = transfer_symplectic(&zz.g, &zz.h, &zz.alpha, zz.n, None)
                .map_err(|e| e.to_string())?;
            Ok(out.beta_report.pass && out.morita_report.pass)
        })()
    });

    // composition of equivalences
    case(&mut cases, "composition of symplectic Morita equivalences", {
        (|| {
            let (x, alpha) = instances::standard_symplectic(1, 2);
            let id = SimpLinMap::identity(&x);
            let t1 = transfer_symplectic(&id, &id, &alpha, 0, None).map_err(|e| e.to_string())?;
            let e1 = MoritaEquivalence {
                alpha: alpha.clone(),
                beta: t1.beta.clone(),
                gauge: t1.phi.neg(),
                to_left: id.clone(),
                to_right: id.clone(),
            };
            let t2 = transfer_symplectic(&id, &id, &t1.beta, 0, None).map_err(|e| e.to_string())?;
            let e2 = MoritaEquivalence {
                alpha: t1.beta.clone(),
                beta: t2.beta.clone(),
                gauge: t2.phi.neg(),
                to_left: id.clone(),
                to_right: id,
            };
            let composed = compose_morita(&e1, &e2).map_err(|e| e.to_string())?;
            Ok(check_symplectic_morita(&composed, 0).map_err(|e| e.to_string())?.pass)
        })()
    });

    let passed = cases.iter().filter(|c| c.pass).count();
    let failed = cases.len() - passed;
    SelftestReport {
        passed,
        failed,
        cases,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes() {
        let r = run(false);
        assert!(r.all_pass(), "{:#?}", r.cases);
    }

    #[test]
    fn corrupted_fixture_fails() {
        let r = run(true);
        assert!(!r.all_pass());
    }
}
