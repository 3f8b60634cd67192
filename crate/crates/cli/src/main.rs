//! Command line front end: load models, maps and forms from JSON, run any
//! verification, run the transfer, and emit deterministic reports.
//!
//! Exit codes: 0 = all checks pass, 1 = a mathematical check failed (the
//! report says which, with a witness), 2 = input or parameter error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use morita_core::descent::verify_hypercover_descent;
use morita_core::forms::truncated_total_cohomology;
use morita_core::linmodel::{
    check_hypercover, check_lie_n_groupoid, map_from_wire, model_from_json, LinSimpSpace,
    MapWire, SimpLinMap,
};
use morita_core::ssets::shape_from_json;
use morita_core::symplectic::{
    check_shifted_symplectic, check_symplectic_morita, shifted_form_from_json,
    shifted_form_to_json, transfer_symplectic, MoritaEquivalence, TransferError,
};
use morita_core::tangent::{tangent_complex, tangent_homology};

#[derive(Parser)]
#[command(
    name = "morita",
    about = "Exact verification of Kan conditions, hypercovers and shifted symplectic structures on simplicial vector spaces over Q",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file in addition to stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CohomologyArgs {
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Truncation: components of form degree < k are cut off.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Weight bound for polynomial coefficients.
    #[arg(long, default_value_t = 2)]
    weight: usize,
    /// Compute cohomology in all degrees ≤ this bound.
    #[arg(long, default_value_t = 2)]
    degrees: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the simplicial identities of a model, map or shape file.
    Validate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        shape: Option<PathBuf>,
    },
    /// Check the Lie n-groupoid Kan conditions of a model.
    CheckNgpd {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Check that a simplicial map is a hypercover of Lie n-groupoids.
    CheckHypercover {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Tangent complex homology of a Lie n-groupoid model.
    Tangent {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        /// Include representative bases in the report.
        #[arg(long)]
        reps: bool,
    },
    /// Truncated total cohomology of the de Rham double complex.
    Cohomology(CohomologyArgs),
    /// Check that a shifted form is m-shifted symplectic.
    CheckSymplectic {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Transfer a shifted symplectic form along a zig-zag of hypercovers
    /// g : Z → X, h : Z → Y; emits β and φ.
    Transfer {
        /// Map file for g : Z → X (X carries the form).
        #[arg(long)]
        g: PathBuf,
        /// Map file for h : Z → Y (the target model).
        #[arg(long)]
        h: PathBuf,
        /// Shifted form file for α on X.
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        n: usize,
        /// Expected shift m of the form (validated when given).
        #[arg(long)]
        m: Option<i64>,
        /// Weight bound for the solve (defaults to the weight of α).
        #[arg(long)]
        weight: Option<usize>,
    },
    /// Verify a symplectic Morita equivalence (X, α) ⇐f Z g⇒ (Y, β) with
    /// gauge φ on Z.
    VerifySme {
        /// Map file for f : Z → X.
        #[arg(long)]
        f: PathBuf,
        /// Map file for g : Z → Y.
        #[arg(long)]
        g: PathBuf,
        /// Shifted form α on X.
        #[arg(long)]
        alpha: PathBuf,
        /// Shifted form β on Y.
        #[arg(long)]
        beta: PathBuf,
        /// Gauge form φ on Z (shift m−1).
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Verify cohomological descent for a hypercover.
    Descent {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        weight: usize,
        #[arg(long, default_value_t = 2)]
        degrees: usize,
    },
    /// Run the built-in example battery.
    Selftest {
        /// Corrupt one embedded fixture to exercise the failure path.
        #[arg(long)]
        corrupt_fixture: bool,
    },
}

fn read_to_string(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<LinSimpSpace, String> {
    model_from_json(&read_to_string(path)?)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn load_map(path: &Path) -> Result<SimpLinMap, String> {
    let text = read_to_string(path)?;
    let wire: MapWire =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let source = load_model(&base.join(&wire.source))?;
    let target = load_model(&base.join(&wire.target))?;
    map_from_wire(&wire, source, target).map_err(|e| format!("{}: {e}", path.display()))
}

struct Outcome {
    pass: bool,
    report: serde_json::Value,
    text: String,
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Command::Validate { model, map, shape } => {
            let mut lines = Vec::new();
            let mut pass = true;
            let mut any = false;
            if let Some(p) = model {
                any = true;
                let m = load_model(p)?;
                pass &= m.validate().is_ok();
                lines.push(json!({"model": p.display().to_string(), "levels": m.dims(), "valid": m.validate().is_ok()}));
            }
            if let Some(p) = map {
                any = true;
                let f = load_map(p)?;
                pass &= f.validate().is_ok();
                lines.push(json!({"map": p.display().to_string(), "valid": f.validate().is_ok()}));
            }
            if let Some(p) = shape {
                any = true;
                let s = shape_from_json(&read_to_string(p)?)
                    .map_err(|e| format!("{}: {e}", p.display()))?;
                pass &= s.validate().is_ok();
                lines.push(json!({"shape": p.display().to_string(), "valid": s.validate().is_ok()}));
            }
            if !any {
                return Err("validate needs --model, --map or --shape".into());
            }
            Ok(Outcome {
                pass,
                report: json!({"inputs": lines}),
                text: if pass {
                    "all inputs satisfy the simplicial identities".to_string()
                } else {
                    "validation failed".to_string()
                },
            })
        }
        Command::CheckNgpd { model, n } => {
            let x = load_model(model)?;
            let r = check_lie_n_groupoid(&x, *n).map_err(|e| e.to_string())?;
            let text = if r.pass {
                format!("Lie {n}-groupoid check passed up to level {}", x.max_level())
            } else {
                let f = r.first_failure().unwrap();
                format!(
                    "Lie {n}-groupoid check failed at Kan({},{}): surjective={}, bijective needed={} got={}",
                    f.m, f.j, f.surjective, f.need_bijective, f.bijective
                )
            };
            Ok(Outcome {
                pass: r.pass,
                report: serde_json::to_value(&r).unwrap(),
                text,
            })
        }
        Command::CheckHypercover { map, n } => {
            let f = load_map(map)?;
            let r = check_hypercover(&f, *n).map_err(|e| e.to_string())?;
            let text = if r.pass {
                format!("hypercover check passed for n = {n}")
            } else {
                let e = r.first_failure().unwrap();
                format!(
                    "hypercover check failed at q_{}: required {}, surjective={}, bijective={}",
                    e.m, e.requirement, e.surjective, e.bijective
                )
            };
            Ok(Outcome {
                pass: r.pass,
                report: serde_json::to_value(&r).unwrap(),
                text,
            })
        }
        Command::Tangent { model, n, reps } => {
            let x = load_model(model)?;
            let t = tangent_complex(&x, *n).map_err(|e| e.to_string())?;
            let h = tangent_homology(&t, *reps);
            let dims: Vec<String> =
                h.dims.iter().map(|(d, v)| format!("H_{d} = Q^{v}")).collect();
            Ok(Outcome {
                pass: true,
                report: serde_json::to_value(&h).unwrap(),
                text: format!("tangent homology: {}", dims.join(", ")),
            })
        }
        Command::Cohomology(a) => {
            let x = load_model(&a.model)?;
            let mut dims = std::collections::BTreeMap::new();
            for deg in 0..=a.degrees {
                let r = truncated_total_cohomology(&x, a.k, deg, a.weight)
                    .map_err(|e| e.to_string())?;
                dims.insert(deg as i64, r.dim(deg as i64));
            }
            let text: Vec<String> =
                dims.iter().map(|(d, v)| format!("H^{d} = Q^{v}")).collect();
            Ok(Outcome {
                pass: true,
                report: json!({"k": a.k, "weight": a.weight, "dims": dims}),
                text: format!("truncated total cohomology: {}", text.join(", ")),
            })
        }
        Command::CheckSymplectic { model, form, n } => {
            let x = load_model(model)?;
            let alpha = shifted_form_from_json(&read_to_string(form)?, &x)
                .map_err(|e| e.to_string())?;
            let r = check_shifted_symplectic(&x, &alpha, *n).map_err(|e| e.to_string())?;
            let text = if r.pass {
                format!("{}-shifted symplectic check passed", alpha.shift)
            } else if let Some(b) = r.first_degenerate() {
                format!(
                    "degenerate pairing at l = {}: rank {} of {} (H_{} = Q^{}, H_{} = Q^{})",
                    b.l,
                    b.rank,
                    b.dim_h,
                    b.l,
                    b.dim_h,
                    alpha.shift - b.l,
                    b.dim_partner
                )
            } else {
                format!(
                    "presymplectic check failed: {}",
                    r.presymplectic.issues.join("; ")
                )
            };
            Ok(Outcome {
                pass: r.pass,
                report: serde_json::to_value(&r).unwrap(),
                text,
            })
        }
        Command::Transfer {
            g,
            h,
            form,
            n,
            m,
            weight,
        } => {
            let gmap = load_map(g)?;
            let hmap = load_map(h)?;
            if gmap.source != hmap.source {
                return Err("the two legs must share the source model Z".into());
            }
            let alpha = shifted_form_from_json(&read_to_string(form)?, &gmap.target)
                .map_err(|e| e.to_string())?;
            if let Some(m) = m {
                if alpha.shift != *m {
                    return Err(format!(
                        "form has shift {}, but --m {} was given",
                        alpha.shift, m
                    ));
                }
            }
            match transfer_symplectic(&gmap, &hmap, &alpha, *n, *weight) {
                Ok(out) => {
                    let pass = out.beta_report.pass && out.morita_report.pass;
                    let report = json!({
                        "beta": serde_json::from_str::<serde_json::Value>(&shifted_form_to_json(&out.beta)).unwrap(),
                        "phi": serde_json::from_str::<serde_json::Value>(&shifted_form_to_json(&out.phi)).unwrap(),
                        "verification": {
                            "beta_symplectic": serde_json::to_value(&out.beta_report).unwrap(),
                            "morita": serde_json::to_value(&out.morita_report).unwrap(),
                        },
                    });
                    Ok(Outcome {
                        pass,
                        report,
                        text: if pass {
                            "transfer solved and verified: h*β = g*α + Dφ with β shifted symplectic".to_string()
                        } else {
                            "transfer produced data but verification failed".to_string()
                        },
                    })
                }
                Err(TransferError::InfeasibleWithinWeight { weight, certificate }) => {
                    let cert: Vec<String> = certificate
                        .iter()
                        .map(morita_core::exactla::rat_to_string)
                        .collect();
                    Ok(Outcome {
                        pass: false,
                        report: json!({
                            "infeasible_within_weight": weight,
                            "certificate": cert,
                            "hint": "raise --weight",
                        }),
                        text: format!(
                            "transfer system infeasible within weight {weight}; consider raising --weight"
                        ),
                    })
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::VerifySme {
            f,
            g,
            alpha,
            beta,
            phi,
            n,
        } => {
            let fmap = load_map(f)?;
            let gmap = load_map(g)?;
            if fmap.source != gmap.source {
                return Err("the two legs must share the middle model Z".into());
            }
            let a = shifted_form_from_json(&read_to_string(alpha)?, &fmap.target)
                .map_err(|e| e.to_string())?;
            let b = shifted_form_from_json(&read_to_string(beta)?, &gmap.target)
                .map_err(|e| e.to_string())?;
            let p = shifted_form_from_json(&read_to_string(phi)?, &fmap.source)
                .map_err(|e| e.to_string())?;
            let e = MoritaEquivalence {
                alpha: a,
                beta: b,
                gauge: p,
                to_left: fmap,
                to_right: gmap,
            };
            let r = check_symplectic_morita(&e, *n).map_err(|e| e.to_string())?;
            let text = if r.pass {
                "symplectic Morita equivalence verified".to_string()
            } else {
                format!(
                    "verification failed: hypercovers ({}, {}), symplectic ({}, {}), gauge equation {}",
                    r.left_hypercover,
                    r.right_hypercover,
                    r.alpha_symplectic,
                    r.beta_symplectic,
                    r.gauge_equation
                )
            };
            Ok(Outcome {
                pass: r.pass,
                report: serde_json::to_value(&r).unwrap(),
                text,
            })
        }
        Command::Descent {
            map,
            n,
            k,
            weight,
            degrees,
        } => {
            let f = load_map(map)?;
            let r = verify_hypercover_descent(&f, *n, *k, *weight, *degrees)
                .map_err(|e| e.to_string())?;
            let text = if r.pass {
                format!("f* is an isomorphism on {k}-truncated total cohomology in degrees ≤ {degrees}")
            } else {
                "descent verification failed".to_string()
            };
            Ok(Outcome {
                pass: r.pass,
                report: serde_json::to_value(&r).unwrap(),
                text,
            })
        }
        Command::Selftest { corrupt_fixture } => {
            let r = morita_core::selftest::run(*corrupt_fixture);
            let mut lines = Vec::new();
            for c in &r.cases {
                lines.push(format!("  [{}] {}", if c.pass { "PASS" } else { "FAIL" }, c.name));
            }
            Ok(Outcome {
                pass: r.all_pass(),
                report: serde_json::to_value(&r).unwrap(),
                text: format!(
                    "selftest: {} passed, {} failed\n{}",
                    r.passed,
                    r.failed,
                    lines.join("\n")
                ),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let rendered = match cli.format {
                Format::Json => serde_json::to_string_pretty(&json!({
                    "pass": outcome.pass,
                    "report": outcome.report,
                }))
                .expect("report serialization"),
                Format::Text => outcome.text.clone(),
            };
            println!("{rendered}");
            if let Some(path) = &cli.output {
                // the output file always carries the full JSON report
                let full = serde_json::to_string_pretty(&json!({
                    "pass": outcome.pass,
                    "report": outcome.report,
                }))
                .expect("report serialization");
                if let Err(e) = std::fs::write(path, full + "\n") {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
