use std::fmt::{self, Write as _};
use std::io::Write;

use fpe_similarity::pde::{
    evolve_observed, expected_refinement_order, fpe_residual_at, probe_interval, refinement_study,
    transformed_operator, FieldOnGrid, ZGrid,
};
use fpe_similarity::sde::{histogram, propagate, PathEnsemble, StepOptions};
use fpe_similarity::solutions::{NormSource, SimilaritySolution};

use crate::config::{ClassTag, RunConfig};

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rows t, x, W, J, D1, D2 on a uniform grid across the domain at each time.
pub fn cmd_eval(run: &RunConfig) -> fpe_similarity::Result<String> {
    let sol = run.build()?;
    let (zlo, zhi) = sol.truncated_z_domain(1e-10)?;
    let mut out = String::from("t,x,W,J,D1,D2\n");
    for &t in &run.times {
        let s = t.powf(sol.alpha());
        let (lo, hi) = (zlo * s, zhi * s);
        let n = run.n_points - 1;
        for k in 0..=n {
            let x = if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 };
            let (d1, d2) = sol.coefficients(x, t)?;
            let row = [t, x, sol.density(x, t)?, sol.current(x, t)?, d1, d2];
            out.push_str(&row.map(num).join(","));
            out.push('\n');
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub measured: String,
    pub threshold: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub run: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "run {}", self.run)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {}  {:<26} {:<44} {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.threshold
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        write!(f, "  {} of {} checks passed", self.checks.len() - failed, self.checks.len())
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &'static str, result: fpe_similarity::Result<(bool, String, String)>) {
        let check = match result {
            Ok((pass, measured, threshold)) => Check { name, pass, measured, threshold },
            Err(e) => Check { name, pass: false, measured: format!("error: {e}"), threshold: String::new() },
        };
        self.0.push(check);
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Skip the Monte Carlo check even if `n_paths` > 0.
    pub skip_sampling: bool,
}

/// Runs every check; failures are collected, not short-circuited.
/// Per-step PDE diagnostics (s, mass, L1 to y) go to `diagnostics`.
pub fn cmd_verify(
    run: &RunConfig,
    opts: VerifyOptions,
    diagnostics: Option<&mut dyn Write>,
) -> Result<Report, fpe_similarity::Error> {
    let sol = run.build()?;
    let mut checks = Checks(Vec::new());
    checks.push("normalization", check_normalization(run, &sol));
    checks.push("closed-form constant", check_closed_form(&sol));
    let (first, ode) = identity_residuals(&sol);
    checks.push(
        "first-integral identity",
        first.map(|r| {
            (r <= run.tol_identity, format!("max residual/scale {r:.2e}"), format!("<= {:e}", run.tol_identity))
        }),
    );
    checks.push(
        "reduced-ODE identity",
        ode.map(|r| {
            (r <= run.tol_identity, format!("max residual/scale {r:.2e}"), format!("<= {:e}", run.tol_identity))
        }),
    );
    checks.push("FPE residual order", check_residual_ratio(run, &sol));
    let (attractor, drift) = pde_attractor(run, &sol, diagnostics);
    checks.push("PDE attractor", attractor);
    checks.push("PDE mass conservation", drift);
    checks.push("PDE refinement order", check_refinement(run, &sol));
    if run.n_paths > 0 && !opts.skip_sampling && run.times.len() > 1 {
        checks.push("Monte Carlo histogram", check_sampling(run, &sol));
    }
    Ok(Report { run: run.name.clone(), checks: checks.0 })
}

fn check_normalization(run: &RunConfig, sol: &SimilaritySolution) -> fpe_similarity::Result<(bool, String, String)> {
    let mut worst = 0.0f64;
    for &t in &run.times {
        worst = worst.max((sol.total_mass(t, 1e-12)? - 1.0).abs());
    }
    Ok((worst <= run.tol_mass, format!("max |mass - 1| {worst:.2e}"), format!("<= {:e}", run.tol_mass)))
}

fn check_closed_form(sol: &SimilaritySolution) -> fpe_similarity::Result<(bool, String, String)> {
    let tol = if sol.norm_source() == NormSource::Quadrature { 1e-8 } else { 1e-10 };
    match sol.normalization().relative_discrepancy() {
        Some(d) => Ok((d <= tol, format!("closed form vs quadrature {d:.2e}"), format!("<= {tol:e}"))),
        None => Ok((true, "no closed form (quadrature only)".into(), "n/a".into())),
    }
}

fn identity_residuals(sol: &SimilaritySolution) -> (fpe_similarity::Result<f64>, fpe_similarity::Result<f64>) {
    let (lo, hi) = match sol.truncated_z_domain(1e-12) {
        Ok(d) => d,
        Err(e) => return (Err(e.clone()), Err(e)),
    };
    let (mut first, mut ode) = (0.0f64, 0.0f64);
    for k in 0..1000 {
        let z = lo + (k as f64 + 0.5) / 1000.0 * (hi - lo);
        let (r, s) = sol.first_integral_residual(z);
        first = first.max(r.abs() / s.max(f64::MIN_POSITIVE));
        let (r, s) = sol.reduced_ode_residual(z);
        ode = ode.max(r.abs() / s.max(f64::MIN_POSITIVE));
    }
    (Ok(first), Ok(ode))
}

fn check_residual_ratio(run: &RunConfig, sol: &SimilaritySolution) -> fpe_similarity::Result<(bool, String, String)> {
    let t = run.times[run.times.len() / 2];
    let (za, zb) = probe_interval(sol)?;
    let s = t.powf(sol.alpha());
    let (h, dt) = (0.02 * (zb - za) * s, 0.02 * t);
    let ratios: Vec<f64> = [1.0 / 3.0, 2.0 / 3.0]
        .iter()
        .map(|frac| {
            let x = (za + frac * (zb - za)) * s;
            fpe_residual_at(sol, x, t, h, dt) / fpe_residual_at(sol, x, t, h / 2.0, dt / 2.0)
        })
        .collect();
    let worst = ratios.iter().map(|r| (r - 4.0).abs()).fold(0.0, f64::max);
    Ok((
        worst <= run.tol_ratio,
        format!("step-halving ratios {:.3}, {:.3} at t = {t}", ratios[0], ratios[1]),
        format!("4 +- {}", run.tol_ratio),
    ))
}

type CheckResult = fpe_similarity::Result<(bool, String, String)>;

fn pde_attractor(
    run: &RunConfig,
    sol: &SimilaritySolution,
    mut diagnostics: Option<&mut dyn Write>,
) -> (CheckResult, CheckResult) {
    let result = (|| -> fpe_similarity::Result<(f64, f64)> {
        let grid = ZGrid::for_solution(sol, run.n_cells)?;
        let op = transformed_operator(sol, &grid)?;
        let y = FieldOnGrid::cell_averaged_profile(sol, &grid, 0.0)?;
        let u0 = FieldOnGrid::uniform(&grid, 0.0);
        let mut prev = u0.mass(&grid);
        let mut drift = 0.0f64;
        if let Some(w) = diagnostics.as_deref_mut() {
            let _ = writeln!(w, "s,mass,l1_to_y");
        }
        let u = evolve_observed(&op, &u0, 10.0, 0.05, |f| {
            let m = f.mass(&grid);
            drift = drift.max((m - prev).abs() / prev);
            prev = m;
            if let Some(w) = diagnostics.as_deref_mut() {
                let _ = writeln!(w, "{},{},{}", num(f.time_s), num(m), num(f.l1_distance(&y, &grid)));
            }
        })?;
        Ok((u.l1_distance(&y, &grid), drift))
    })();
    match result {
        Ok((dist, drift)) => (
            Ok((
                dist <= run.tol_pde_l1,
                format!("L1 to y {dist:.2e} ({} cells, s-span 10)", run.n_cells),
                format!("<= {:e}", run.tol_pde_l1),
            )),
            Ok((drift <= 1e-12, format!("max mass drift per step {drift:.1e}"), "<= 1e-12".into())),
        ),
        Err(e) => (Err(e.clone()), Err(e)),
    }
}

fn check_refinement(run: &RunConfig, sol: &SimilaritySolution) -> CheckResult {
    let (errors, orders) = refinement_study(sol, run.n_cells / 4, 3)?;
    let expected = expected_refinement_order(sol);
    let order = *orders.last().unwrap();
    let _ = errors;
    Ok((
        (order - expected).abs() <= run.tol_order,
        format!("order {order:.3} ({} -> {} cells)", run.n_cells / 2, run.n_cells),
        format!("{expected:.2} +- {}", run.tol_order),
    ))
}

fn check_sampling(run: &RunConfig, sol: &SimilaritySolution) -> CheckResult {
    let (t0, t1) = (run.times[0], *run.times.last().unwrap());
    let (d, _) = sample_histogram(run, sol, t0, t1)?;
    Ok((
        d <= run.tol_mc_l1,
        format!("L1 {d:.4} ({} paths, t {t0} -> {t1}, {} bins)", run.n_paths, run.n_bins),
        format!("<= {}", run.tol_mc_l1),
    ))
}

fn sample_histogram(
    run: &RunConfig,
    sol: &SimilaritySolution,
    t0: f64,
    t1: f64,
) -> fpe_similarity::Result<(f64, String)> {
    // paths start from the true model so a corrupted drift shows up
    let reference = fpe_similarity::solutions::build_solution(run.alpha, run.model())?;
    let ens = PathEnsemble::sample(&reference, run.n_paths, t0, run.seed)?;
    let ens = propagate(&ens, sol, t1, run.dt, StepOptions::default())?;
    let (rows, out_emp, out_an) = histogram(&ens, &reference, run.n_bins)?;
    let width = rows[1].bin_center - rows[0].bin_center;
    let d =
        rows.iter().map(|r| (r.empirical_density - r.analytic_density).abs()).sum::<f64>() * width + out_emp + out_an;
    let mut csv = String::from("bin_center,empirical_density,analytic_density\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", num(r.bin_center), num(r.empirical_density), num(r.analytic_density));
    }
    Ok((d, csv))
}

/// Propagates `n_paths` from the first to the last time and returns the
/// histogram CSV with its L1 distance.
pub fn cmd_sample(run: &RunConfig) -> fpe_similarity::Result<(String, f64)> {
    if run.n_paths == 0 {
        return Err(fpe_similarity::Error::EmptyEnsemble);
    }
    let sol = run.build()?;
    let (t0, t1) = (run.times[0], *run.times.last().unwrap());
    let (d, csv) = sample_histogram(run, &sol, t0, t1)?;
    Ok((csv, d))
}

pub fn cmd_info(class: ClassTag) -> String {
    match class {
        ClassTag::I => "\
Class I: two moving boundaries
  y(z)  = A (z - z1)^a1 (z2 - z)^a2,        z1 <= z <= z2
  f(z)  = a1/(z - z1) - a2/(z2 - z)
  rho2  = (z - z1)(z2 - z)
  rho1  = (alpha - a1 - a2 - 2) z + (a1 + 1) z2 + (a2 + 1) z1
  A     = 1 / [ (z2 - z1)^(a1 + a2 + 1) B(a1 + 1, a2 + 1) ]
  constraints: a1, a2 > 0, z1 < z2
  subclasses: (i) z1, z2 of one sign, (ii) z1 = 0 or z2 = 0 (same as Class II
  with beta = 0), (iii) z1 < 0 < z2
  boundaries x_k(t) = z_k t^alpha move away from the origin for alpha > 0 and
  toward it for alpha < 0
"
        .into(),
        ClassTag::II => "\
Class II: one moving boundary, x = 0 fixed
  y(z)  = A z^a1 (z2 - z)^a2 e^(beta z),     0 <= z <= z2
  f(z)  = a1/z - a2/(z2 - z) + beta
  rho2  = z (z2 - z)
  rho1  = -beta z^2 + (alpha - a1 - a2 - 2 + beta z2) z + (a1 + 1) z2
  A     = 1 / [ z2^(a1 + a2 + 1) B(a1 + 1, a2 + 1) 1F1(a1 + 1; a1 + a2 + 2; beta z2) ]
          (Kummer confluent hypergeometric function 1F1)
  constraints: a1, a2 > 0, z2 > 0, beta real
  mirror image on z <= 0 via `mirrored = true`
"
        .into(),
        ClassTag::III => "\
Class III: one moving boundary, x = infinity fixed
  y(z)  = A (z - z1)^a1 z^a2 e^(-beta z),    z1 <= z < infinity
  f(z)  = a1/(z - z1) + a2/z - beta
  rho2  = (z - z1) z
  rho1  = -beta z^2 + (alpha + a1 + a2 + 2 + beta z1) z - (a2 + 1) z1
  A     = beta^((a1 + a2)/2 + 1) e^(beta z1 / 2)
          / [ Gamma(a1 + 1) z1^((a1 + a2)/2 + 1) W_{k,m}(beta z1) ],
          k = (a2 - a1)/2, m = -(a1 + a2 + 1)/2   (Whittaker W)
          for z1 = 0: A = beta^(a1 + a2 + 1) / Gamma(a1 + a2 + 1)
  constraints: a1, a2 > 0, z1 >= 0, beta > 0
  corrections to the published formulas:
    - f is y'/y = a1/(z - z1) + a2/z - beta; the printed a2/z2 term has no
      z2 to refer to and is inconsistent with the printed y and rho1
    - the Whittaker argument is beta z1 (printed as beta z2)
  A is computed by quadrature; the Whittaker form is a cross-check
  mirror image on z <= 0 via `mirrored = true`
"
        .into(),
    }
}
