//! Acceptance suite: every criterion runs, prints one PASS/FAIL line, and
//! the process exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use ypq_core::chart::{sample_cone_points, sample_points, validate_params, ChartPoint, YpqParams, ORACLE_MARGIN};
use ypq_core::forms::{
    cky_parts, cky_residual, complex_volume_ratio, kahler_volume_defect, lift_eta_defect, parallel_residual,
    psi_structure_defect, relative_spread, sigma_kahler_defect, sky_residual, NamedFormCatalog,
};
use ypq_core::geometry::{christoffel, einstein_residual, FormField, MetricProvider, MonomialForm};
use ypq_core::integrability::{
    catalog_pairs, drift_report, independence_rank, integrate_geodesic, killing_tensor_residual, IntegratorConfig,
    InvariantSystem, PhaseState, CLASSICAL,
};
use ypq_core::par::{self, Execution};
use ypq_core::tensor::{Tensor, Valence::Down, Valence::Up};

/// Outcome of one criterion: a verdict plus the measured numbers.
type Verdict = Result<String, String>;

type Criterion = (&'static str, fn() -> Verdict);

const POINTS: usize = 100;
const SEED: u64 = 2024;

fn params(a: f64) -> YpqParams {
    validate_params(a, 1.0).expect("valid parameters")
}

fn base(a: f64) -> MetricProvider {
    MetricProvider::ypq(params(a)).expect("base metric")
}

fn cone(a: f64) -> MetricProvider {
    MetricProvider::cone(params(a)).expect("cone metric")
}

fn exec() -> Execution {
    Execution::default()
}

/// Largest value of `f` over the items, panicking on evaluation errors.
fn worst<T: Sync>(items: &[T], f: impl Fn(&T) -> ypq_core::Result<f64> + Sync + Send) -> f64 {
    par::max_of(exec(), items, f).expect("evaluation inside the chart")
}

/// Collects `label: value < bound` findings and fails if any bound is missed.
#[derive(Default)]
struct Gates {
    passed: Vec<String>,
    failed: Vec<String>,
}

impl Gates {
    fn below(&mut self, label: &str, value: f64, bound: f64) {
        let line = format!("{label}={value:.2e}");
        if value < bound {
            self.passed.push(line);
        } else {
            self.failed.push(format!("{line} (needs < {bound:.0e})"));
        }
    }

    fn above(&mut self, label: &str, value: f64, bound: f64) {
        let line = format!("{label}={value:.2e}");
        if value > bound {
            self.passed.push(line);
        } else {
            self.failed.push(format!("{line} (needs > {bound:.0e})"));
        }
    }

    fn verdict(self) -> Verdict {
        if self.failed.is_empty() {
            Ok(self.passed.join(", "))
        } else {
            Err(self.failed.join(", "))
        }
    }
}

fn einstein_condition() -> Verdict {
    let mut gates = Gates::default();
    for a in [0.5, 0.75] {
        let p = base(a);
        let pts = sample_points(&p.domain, SEED, POINTS);
        gates.below(&format!("a={a}"), worst(&pts, |pt| einstein_residual(&p, &pt.as_array())), 1e-8);
    }
    gates.verdict()
}

fn ricci_flat_cone() -> Verdict {
    let c = cone(0.5);
    let pts = sample_cone_points(&c.domain, SEED, POINTS, 0.5, 2.0);
    let mut gates = Gates::default();
    gates.below("max|Ric_cone|", worst(&pts, |cp| einstein_residual(&c, &cp.as_array())), 1e-8);
    gates.verdict()
}

fn killing_form_gates() -> Verdict {
    let p = base(0.5);
    let cat = NamedFormCatalog::new(params(0.5)).unwrap();
    let pts = sample_points(&p.domain, SEED, POINTS);
    let mut gates = Gates::default();
    for (name, f) in cat.killing_forms() {
        let parts = par::map(exec(), &pts, |pt| cky_parts(&p, f, &pt.as_array()).unwrap());
        gates.below(&format!("cky {name}"), parts.iter().map(|c| c.residual).fold(0.0, f64::max), 1e-8);
        gates.below(&format!("|d*{name}|"), parts.iter().map(|c| c.codiff.max_abs()).fold(0.0, f64::max), 1e-9);
    }
    for (name, f) in [("Phi_1", &cat.phi1), ("Phi_2", &cat.phi2)] {
        let parts = par::map(exec(), &pts, |pt| cky_parts(&p, f, &pt.as_array()).unwrap());
        gates.below(&format!("cky {name}"), parts.iter().map(|c| c.residual).fold(0.0, f64::max), 1e-8);
        gates.below(&format!("|d{name}|"), parts.iter().map(|c| c.d.max_abs()).fold(0.0, f64::max), 1e-9);
    }
    let dy = FormField::Custom(MonomialForm::constant(5, &[2]));
    gates.above("control dy", worst(&pts, |pt| cky_residual(&p, &dy, &pt.as_array())), 1e-3);
    gates.verdict()
}

fn special_killing_constants() -> Verdict {
    let p = base(0.5);
    let cat = NamedFormCatalog::new(params(0.5)).unwrap();
    let pts = sample_points(&p.domain, SEED, POINTS);
    let mut gates = Gates::default();
    for (name, f) in cat.killing_forms() {
        let expected = -(f.degree() as f64 + 1.0);
        for c in [-5.0, -4.0, -3.0, -2.0] {
            let r = worst(&pts, |pt| sky_residual(&p, f, c, &pt.as_array()));
            let label = format!("{name} c={c}");
            if c == expected {
                gates.below(&label, r, 1e-8);
            } else {
                gates.above(&label, r, 1e-8);
            }
        }
    }
    gates.verdict()
}

fn cone_parallelism() -> Verdict {
    let c = cone(0.5);
    let cat = NamedFormCatalog::new(params(0.5)).unwrap();
    let pts = sample_cone_points(&c.domain, SEED, POINTS, 0.5, 2.0);
    let mut fields = vec![
        ("Omega_cone".to_string(), cat.omega_cone.clone()),
        ("Re dV_cone".to_string(), cat.re_dv_cone.clone()),
        ("Im dV_cone".to_string(), cat.im_dv_cone.clone()),
    ];
    for (name, f) in cat.killing_forms() {
        fields.push((format!("lift {name}"), FormField::cone_lift(f.clone()).unwrap()));
    }
    let mut gates = Gates::default();
    for (name, f) in &fields {
        gates.below(name, worst(&pts, |cp| parallel_residual(&c, f, &cp.as_array())), 1e-8);
    }
    gates.below("lift eta - Omega_cone", worst(&pts, |cp| lift_eta_defect(cat.params, cp)), 1e-12);
    gates.verdict()
}

fn structure_identities() -> Verdict {
    let p = base(0.5);
    let c = cone(0.5);
    let prm = params(0.5);
    let pts = sample_points(&p.domain, SEED, POINTS);
    let cpts = sample_cone_points(&c.domain, SEED, POINTS, 0.5, 2.0);
    let mut gates = Gates::default();
    gates.below("d sigma - 2 Omega_EK", worst(&pts, |pt| sigma_kahler_defect(prm, pt)), 1e-10);
    gates.below("Psi - eta^d eta", worst(&pts, |pt| psi_structure_defect(prm, pt)), 1e-10);
    gates.below("Omega^3/3! - vol", worst(&cpts, |cp| kahler_volume_defect(prm, cp)), 1e-10);
    let ratios: Vec<f64> = par::map(exec(), &cpts, |cp| complex_volume_ratio(prm, cp).unwrap());
    let spread = relative_spread(&ratios);
    if spread <= 1e-9 {
        gates.passed.push(format!("dV^conj(dV) spread={spread:.2e}"));
    } else {
        gates.failed.push(format!("dV^conj(dV) spread={spread:.2e} (needs <= 1e-9)"));
    }
    gates.verdict()
}

fn stackel_and_poisson() -> Verdict {
    let p = base(0.5);
    let pts = sample_points(&p.domain, SEED, POINTS);
    let mut gates = Gates::default();
    for k in catalog_pairs(params(0.5)).unwrap() {
        gates.below(&k.label(), worst(&pts, |pt| killing_tensor_residual(&p, &k, &pt.as_array())), 1e-8);
    }
    let sys = InvariantSystem::new(p.clone()).unwrap();
    let states = sys.sample_states(SEED, POINTS).unwrap();
    let bracket = worst(&states, |s| {
        Ok(sys.poisson_with_hamiltonian(s)?.iter().map(|(_, b)| b.abs()).fold(0.0, f64::max))
    });
    gates.below("{H,Q}", bracket, 1e-9);
    gates.verdict()
}

fn flipped(s: &PhaseState) -> PhaseState {
    let mut out = *s;
    out.momenta.iter_mut().for_each(|m| *m = -*m);
    out
}

fn geodesic_conservation() -> Verdict {
    let sys = InvariantSystem::new(base(0.5)).unwrap();
    let cfg = IntegratorConfig::default().with_rtol(1e-10);
    let t_end = 100.0;
    let states = sys.sample_states(SEED, 10).unwrap();
    let runs = par::map(exec(), &states, |s| -> Result<(f64, f64), String> {
        let fwd = integrate_geodesic(&sys.flow, s, t_end, &cfg).map_err(|e| e.to_string())?;
        if let Some(exit) = fwd.exit {
            return Err(format!("left the chart at t={}", exit.time));
        }
        let drift = drift_report(&sys, &fwd).map_err(|e| e.to_string())?.iter().map(|(_, d)| *d).fold(0.0, f64::max);
        let back = integrate_geodesic(&sys.flow, &flipped(fwd.last()), t_end, &cfg).map_err(|e| e.to_string())?;
        if let Some(exit) = back.exit {
            return Err(format!("reversed run left the chart at t={}", exit.time));
        }
        let (a, b) = (s.as_array(), flipped(back.last()).as_array());
        let reversal = (0..10).map(|i| (a[i] - b[i]).abs() / a[i].abs().max(1.0)).fold(0.0, f64::max);
        Ok((drift, reversal))
    });
    let mut gates = Gates::default();
    let (mut drift, mut reversal) = (0.0f64, 0.0f64);
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok((d, t)) => {
                drift = drift.max(d);
                reversal = reversal.max(t);
            }
            Err(e) => gates.failed.push(format!("trajectory {i}: {e}")),
        }
    }
    gates.below("max relative drift", drift, 1e-8);
    gates.below("time reversal", reversal, 1e-7);
    gates.verdict()
}

/// Most frequent value, ties to the lower one.
fn modal(values: &[usize]) -> Option<usize> {
    let mut best = None;
    let mut best_count = 0;
    for &v in values {
        let count = values.iter().filter(|&&w| w == v).count();
        if count > best_count || (count == best_count && best.is_some_and(|b| v < b)) {
            best = Some(v);
            best_count = count;
        }
    }
    best
}

fn superintegrability() -> Verdict {
    let sys = InvariantSystem::new(base(0.5)).unwrap();
    let labels = sys.labels();
    let full: Vec<&str> = labels.iter().map(String::as_str).collect();
    let states = sys.sample_states(SEED, POINTS).unwrap();
    let ranks = par::map(exec(), &states, |s| {
        let classical = independence_rank(&sys, s, &CLASSICAL).ok()?.rank;
        let all = independence_rank(&sys, s, &full).ok()?.rank;
        Some((classical, all))
    });
    let usable: Vec<(usize, usize)> = ranks.into_iter().flatten().collect();
    let classical: Vec<usize> = usable.iter().map(|r| r.0).collect();
    let all: Vec<usize> = usable.iter().map(|r| r.1).collect();
    let summary = format!(
        "{} usable states, classical modal rank {:?}, full modal rank {:?} over {} invariants",
        usable.len(),
        modal(&classical),
        modal(&all),
        full.len()
    );
    let classical_ok = !classical.is_empty() && classical.iter().all(|&r| r == 5);
    let full_ok = modal(&all).is_some_and(|r| r >= 6);
    if classical_ok && full_ok {
        Ok(summary)
    } else {
        Err(format!("{summary} (needs classical 5 everywhere and full modal rank >= 6)"))
    }
}

/// Christoffel symbols from central differences of the metric matrix.
fn fd_christoffel(p: &MetricProvider, x: &[f64], h: f64) -> Tensor {
    let n = p.dim();
    let gi = p.matrix(x).unwrap().try_inverse().unwrap();
    let dg: Vec<_> = (0..n)
        .map(|k| {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[k] += h;
            xm[k] -= h;
            (p.matrix(&xp).unwrap() - p.matrix(&xm).unwrap()) / (2.0 * h)
        })
        .collect();
    Tensor::from_fn(n, vec![Up, Down, Down], |i| {
        let (l, m, nu) = (i[0], i[1], i[2]);
        (0..n).map(|r| 0.5 * gi[(l, r)] * (dg[m][(r, nu)] + dg[nu][(r, m)] - dg[r][(m, nu)])).sum()
    })
}

fn oracle_agreement() -> Verdict {
    let p = base(0.5);
    let inner = p.domain.with_margin(ORACLE_MARGIN);
    let pts: Vec<ChartPoint> = sample_points(&inner, SEED, 50);
    let mut gates = Gates::default();
    let gamma = worst(&pts, |pt| {
        let x = pt.as_array();
        Ok(christoffel(&p, &x)?.max_abs_diff(&fd_christoffel(&p, &x, 1e-5)))
    });
    gates.below("Christoffel AD-FD", gamma, 1e-6);

    let mut sys = InvariantSystem::new(p.clone()).unwrap();
    sys.flow.domain = inner;
    let states = sys.sample_states(SEED, 50).unwrap();
    let h = 1e-6;
    let grad = worst(&states, |s| {
        let grads = sys.gradients(s)?;
        let z = s.as_array();
        let mut worst: f64 = 0.0;
        for k in 0..10 {
            let (mut zp, mut zm) = (z, z);
            zp[k] += h;
            zm[k] -= h;
            let qp = sys.conserved_set(&PhaseState::from_array(&zp))?.entries();
            let qm = sys.conserved_set(&PhaseState::from_array(&zm))?.entries();
            for (i, g) in grads.iter().enumerate() {
                let fd = (qp[i].1 - qm[i].1) / (2.0 * h);
                worst = worst.max((fd - g.gradient[k]).abs() / g.gradient[k].abs().max(1.0));
            }
        }
        Ok(worst)
    });
    gates.below("Hamiltonian gradients AD-FD", grad, 1e-7);
    gates.verdict()
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Einstein condition Ric = 4g", einstein_condition),
        ("Ricci-flat metric cone", ricci_flat_cone),
        ("Killing and closed conformal Killing forms", killing_form_gates),
        ("special Killing constants", special_killing_constants),
        ("parallel forms on the cone", cone_parallelism),
        ("structure identities", structure_identities),
        ("Stackel-Killing tensors and Poisson brackets", stackel_and_poisson),
        ("geodesic conservation and time reversal", geodesic_conservation),
        ("superintegrability rank", superintegrability),
        ("automatic versus finite-difference derivatives", oracle_agreement),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
