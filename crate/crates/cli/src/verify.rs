//! The `verify` report: every residual gate over seeded sample points.

use std::time::Instant;

use serde::Serialize;

use ypq_core::chart::{sample_cone_points, sample_points, ChartPoint, ConePoint, YpqParams};
use ypq_core::forms::{
    complex_volume_ratio, cky_parts, kahler_volume_defect, lift_eta_defect, parallel_residual, psi_structure_defect,
    relative_spread, sigma_kahler_defect, sky_residual, NamedFormCatalog,
};
use ypq_core::geometry::curvature::metric_compatibility_defect;
use ypq_core::geometry::{einstein_residual, Connection, FormField, MetricProvider};
use ypq_core::integrability::{catalog_pairs, killing_tensor_residual, InvariantSystem, PhaseState, SymmetricField};
use ypq_core::par::{self, Execution};
use ypq_core::Result;

use crate::config::{ParamsEcho, RunConfig};

/// Cone points are drawn with radius in this range.
pub const CONE_RADII: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: &'static str,
    /// The identity being checked, in words.
    pub identity: &'static str,
    pub points: usize,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub params: ParamsEcho,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// Shared inputs of one verification run.
struct Context {
    params: YpqParams,
    base: MetricProvider,
    cone: MetricProvider,
    catalog: Option<NamedFormCatalog>,
    system: Option<InvariantSystem>,
    points: Vec<ChartPoint>,
    cone_points: Vec<ConePoint>,
    states: Vec<PhaseState>,
    exec: Execution,
}

impl Context {
    fn catalog(&self) -> &NamedFormCatalog {
        self.catalog.as_ref().expect("form checks only run for c = 1")
    }

    fn over_base(&self, f: impl Fn(&[f64]) -> Result<f64> + Sync + Send) -> Result<(usize, f64)> {
        let v = par::max_of(self.exec, &self.points, |p| f(&p.as_array()))?;
        Ok((self.points.len(), v))
    }

    fn over_cone(&self, f: impl Fn(&ConePoint) -> Result<f64> + Sync + Send) -> Result<(usize, f64)> {
        let v = par::max_of(self.exec, &self.cone_points, f)?;
        Ok((self.cone_points.len(), v))
    }
}

type Measure = Box<dyn Fn(&Context) -> Result<(usize, f64)>>;

struct Check {
    name: &'static str,
    identity: &'static str,
    /// Multiplies the configured base tolerance.
    tol_scale: f64,
    /// Needs the primed-chart forms, which exist only for `c = 1`.
    needs_forms: bool,
    measure: Measure,
}

fn check(
    name: &'static str,
    identity: &'static str,
    tol_scale: f64,
    needs_forms: bool,
    measure: impl Fn(&Context) -> Result<(usize, f64)> + 'static,
) -> Check {
    Check { name, identity, tol_scale, needs_forms, measure: Box::new(measure) }
}

fn form_of<'a>(cat: &'a NamedFormCatalog, name: &str) -> &'a FormField {
    match name {
        "psi" => &cat.psi,
        "phi1" => &cat.phi1,
        "phi2" => &cat.phi2,
        "xi" => &cat.xi,
        "upsilon" => &cat.upsilon,
        "kahler_cone" => &cat.omega_cone,
        "re_volume_cone" => &cat.re_dv_cone,
        "im_volume_cone" => &cat.im_dv_cone,
        _ => unreachable!("unknown form {name}"),
    }
}

fn stackel(ctx: &Context, label: &str) -> Result<(usize, f64)> {
    let pairs = catalog_pairs(ctx.params)?;
    let k: &SymmetricField = pairs.iter().find(|k| k.label() == label).expect("catalog label");
    ctx.over_base(|x| killing_tensor_residual(&ctx.base, k, x))
}

/// All checks in report order.
fn catalog() -> Vec<Check> {
    let mut v = vec![
        check("einstein_base", "Ric = 4 g on Y(p,q)", 1.0, false, |c| c.over_base(|x| einstein_residual(&c.base, x))),
        check("einstein_cone", "Ric = 0 on the metric cone", 1.0, false, |c| {
            c.over_cone(|p| einstein_residual(&c.cone, &p.as_array()))
        }),
        check("metric_compatibility", "Levi-Civita connection preserves g", 1.0, false, |c| {
            c.over_base(|x| Ok(metric_compatibility_defect(&Connection::new(&c.base, x, 1)?)))
        }),
    ];
    let cky: [(&str, &str, &str); 5] = [
        ("cky_psi", "psi", "conformal Killing-Yano equation for Psi"),
        ("cky_phi1", "phi1", "conformal Killing-Yano equation for Phi_1 = d eta"),
        ("cky_phi2", "phi2", "conformal Killing-Yano equation for Phi_2 = d eta ^ d eta"),
        ("cky_xi", "xi", "conformal Killing-Yano equation for Xi"),
        ("cky_upsilon", "upsilon", "conformal Killing-Yano equation for Upsilon"),
    ];
    for (name, form, identity) in cky {
        v.push(check(name, identity, 1.0, true, move |c| {
            c.over_base(|x| Ok(cky_parts(&c.base, form_of(c.catalog(), form), x)?.residual))
        }));
    }
    let killing: [(&str, &str, &str); 3] = [
        ("coclosed_psi", "psi", "d*Psi = 0"),
        ("coclosed_xi", "xi", "d*Xi = 0"),
        ("coclosed_upsilon", "upsilon", "d*Upsilon = 0"),
    ];
    for (name, form, identity) in killing {
        v.push(check(name, identity, 0.1, true, move |c| {
            c.over_base(|x| Ok(cky_parts(&c.base, form_of(c.catalog(), form), x)?.codiff.max_abs()))
        }));
    }
    for (name, form, identity) in [("closed_phi1", "phi1", "d Phi_1 = 0"), ("closed_phi2", "phi2", "d Phi_2 = 0")] {
        v.push(check(name, identity, 0.1, true, move |c| {
            c.over_base(|x| Ok(cky_parts(&c.base, form_of(c.catalog(), form), x)?.d.max_abs()))
        }));
    }
    let sky: [(&str, &str, f64, &str); 3] = [
        ("sky_psi", "psi", -4.0, "special Killing equation for Psi with constant -4"),
        ("sky_xi", "xi", -3.0, "special Killing equation for Xi with constant -3"),
        ("sky_upsilon", "upsilon", -3.0, "special Killing equation for Upsilon with constant -3"),
    ];
    for (name, form, k, identity) in sky {
        v.push(check(name, identity, 1.0, true, move |c| {
            c.over_base(|x| sky_residual(&c.base, form_of(c.catalog(), form), k, x))
        }));
    }
    let parallel: [(&str, &str, &str); 3] = [
        ("parallel_kahler_cone", "kahler_cone", "Kahler form of the cone is parallel"),
        ("parallel_re_volume_cone", "re_volume_cone", "Re of the holomorphic volume form is parallel"),
        ("parallel_im_volume_cone", "im_volume_cone", "Im of the holomorphic volume form is parallel"),
    ];
    for (name, form, identity) in parallel {
        v.push(check(name, identity, 1.0, true, move |c| {
            c.over_cone(|p| parallel_residual(&c.cone, form_of(c.catalog(), form), &p.as_array()))
        }));
    }
    let lifts: [(&str, &str, &str); 3] = [
        ("parallel_lift_psi", "psi", "cone lift of Psi is parallel"),
        ("parallel_lift_xi", "xi", "cone lift of Xi is parallel"),
        ("parallel_lift_upsilon", "upsilon", "cone lift of Upsilon is parallel"),
    ];
    for (name, form, identity) in lifts {
        v.push(check(name, identity, 1.0, true, move |c| {
            let lifted = FormField::cone_lift(form_of(c.catalog(), form).clone())?;
            c.over_cone(|p| parallel_residual(&c.cone, &lifted, &p.as_array()))
        }));
    }
    v.extend([
        check("d_sigma", "d sigma = 2 Omega_EK", 1e-2, true, |c| {
            c.over_base(|x| sigma_kahler_defect(c.params, &ChartPoint::from_slice(x)))
        }),
        check("psi_structure", "Psi = eta ^ d eta", 1e-2, true, |c| {
            c.over_base(|x| psi_structure_defect(c.params, &ChartPoint::from_slice(x)))
        }),
        check("lift_eta", "cone lift of eta = Omega_cone", 1e-4, true, |c| {
            c.over_cone(|p| lift_eta_defect(c.params, p))
        }),
        check("kahler_volume", "Omega_cone^3 / 3! = cone volume form", 1e-2, true, |c| {
            c.over_cone(|p| kahler_volume_defect(c.params, p))
        }),
        check("complex_volume", "dV ^ conj(dV) is a constant multiple of the volume form", 0.1, true, |c| {
            let ratios = par::map(c.exec, &c.cone_points, |p| complex_volume_ratio(c.params, p))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            Ok((ratios.len(), relative_spread(&ratios)))
        }),
        check("stackel_psi_psi", "symmetrized derivative of K(Psi,Psi) vanishes", 1.0, true, |c| {
            stackel(c, "K_Psi_Psi")
        }),
        check("stackel_xi_xi", "symmetrized derivative of K(Xi,Xi) vanishes", 1.0, true, |c| {
            stackel(c, "K_Xi_Xi")
        }),
        check("stackel_upsilon_upsilon", "symmetrized derivative of K(Upsilon,Upsilon) vanishes", 1.0, true, |c| {
            stackel(c, "K_Upsilon_Upsilon")
        }),
        check("stackel_xi_upsilon", "symmetrized derivative of K(Xi,Upsilon) vanishes", 1.0, true, |c| {
            stackel(c, "K_Xi_Upsilon")
        }),
        check("poisson", "{H, Q} = 0 for every first integral Q", 0.1, true, |c| {
            let sys = c.system.as_ref().expect("system built for c = 1");
            let v = par::max_of(c.exec, &c.states, |s| {
                Ok(sys.poisson_with_hamiltonian(s)?.iter().map(|(_, b)| b.abs()).fold(0.0, f64::max))
            })?;
            Ok((c.states.len(), v))
        }),
    ]);
    v
}

/// Names of all checks in report order.
pub fn check_names() -> Vec<&'static str> {
    catalog().iter().map(|c| c.name).collect()
}

fn selected(name: &str, selection: &Option<Vec<String>>) -> bool {
    match selection {
        None => true,
        Some(sel) => sel.iter().any(|s| name == s || (name.starts_with(s.as_str()) && name[s.len()..].starts_with('_'))),
    }
}

/// Rejects selections that match no check.
pub fn validate_selection(selection: &Option<Vec<String>>) -> std::result::Result<(), String> {
    let names = check_names();
    if let Some(sel) = selection {
        for s in sel {
            if !names.iter().any(|n| selected(n, &Some(vec![s.clone()]))) {
                return Err(format!("--checks: '{s}' matches no check; known: {}", names.join(",")));
            }
        }
    }
    Ok(())
}

fn build_context(cfg: &RunConfig, exec: Execution) -> std::result::Result<Context, String> {
    let err = |e: ypq_core::Error| e.to_string();
    let mut base = MetricProvider::ypq(cfg.params).map_err(err)?;
    base.domain = base.domain.with_margin(cfg.margin);
    let mut cone = MetricProvider::cone(cfg.params).map_err(err)?;
    cone.domain = cone.domain.with_margin(cfg.margin);
    let forms = !cfg.params.is_homogeneous_limit();
    let catalog = if forms { Some(NamedFormCatalog::new(cfg.params).map_err(err)?) } else { None };
    let system = if forms { Some(InvariantSystem::new(base.clone()).map_err(err)?) } else { None };
    let states = match &system {
        Some(sys) => sys.sample_states(cfg.seed.wrapping_add(2), cfg.points).map_err(err)?,
        None => Vec::new(),
    };
    Ok(Context {
        params: cfg.params,
        points: sample_points(&base.domain, cfg.seed, cfg.points),
        cone_points: sample_cone_points(&cone.domain, cfg.seed.wrapping_add(1), cfg.points, CONE_RADII.0, CONE_RADII.1),
        base,
        cone,
        catalog,
        system,
        states,
        exec,
    })
}

/// Runs the selected checks. Errors only on configuration problems; a
/// failing or erroring check is recorded in the report.
pub fn run_verify(cfg: &RunConfig, exec: Execution) -> std::result::Result<VerifyReport, String> {
    validate_selection(&cfg.checks)?;
    let start = Instant::now();
    let ctx = build_context(cfg, exec)?;
    let mut records = Vec::new();
    for c in catalog() {
        if !selected(c.name, &cfg.checks) {
            continue;
        }
        let tolerance = cfg.tol * c.tol_scale;
        let mut rec = CheckRecord {
            name: c.name,
            identity: c.identity,
            points: 0,
            max_residual: None,
            tolerance,
            status: Status::Skipped,
            error: None,
        };
        if c.needs_forms && ctx.catalog.is_none() {
            rec.error = Some("forms are defined only for c = 1".into());
        } else {
            match (c.measure)(&ctx) {
                Ok((n, r)) => {
                    rec.points = n;
                    rec.max_residual = Some(r);
                    rec.status = if r < tolerance { Status::Pass } else { Status::Fail };
                }
                Err(e) => {
                    rec.status = Status::Fail;
                    rec.error = Some(e.to_string());
                }
            }
        }
        records.push(rec);
    }
    let passed = records.iter().all(|r| r.status != Status::Fail);
    Ok(VerifyReport {
        params: cfg.echo(),
        checks: records,
        passed,
        wall_time_s: cfg.timing.then(|| start.elapsed().as_secs_f64()),
    })
}
