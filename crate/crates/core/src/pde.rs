//! Finite-volume check of the similarity solutions on the fixed z-domain.
//!
//! Substituting W = t^{−α} u(x/t^α, ln t) into the Fokker–Planck equation
//! gives the conservation law
//!
//! ```text
//! ∂_s u = ∂_z F,   F = (αz − ρ₁)u + ∂_z(ρ₂u) = ρ₂(∂_z u − f u)
//! ```
//!
//! on the static interval [z_lo, z_hi], with F = 0 at both ends. The stationary
//! state is the profile y. Face fluxes use exponential fitting:
//!
//! ```text
//! F_{j} = ρ₂(z_j)/Δz · [B(P_j) u_R − B(−P_j) u_L],   B(P) = P / (e^P − 1)
//! ```
//!
//! with P_j = ∫ f over the span between the neighbouring cell centres, f taken
//! from its definition in terms of ρ₁ and ρ₂. The scheme keeps u ≥ 0 under
//! implicit Euler and conserves mass to rounding.

use crate::error::{Error, Result};
use crate::solutions::{SimilaritySolution, SolutionClass};
use crate::specfun::{integrate_with, QuadratureOptions};

/// Uniform cell-centred grid on a finite z-interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ZGrid {
    z_lo: f64,
    z_hi: f64,
    dz: f64,
    centers: Vec<f64>,
    faces: Vec<f64>,
}

impl ZGrid {
    pub fn uniform(z_lo: f64, z_hi: f64, n_cells: usize) -> Result<Self> {
        if !(z_lo.is_finite() && z_hi.is_finite() && z_hi > z_lo) || n_cells < 2 {
            return Err(Error::GridMismatch(format!(
                "need finite z_lo < z_hi and at least 2 cells, got [{z_lo}, {z_hi}] with {n_cells}"
            )));
        }
        let dz = (z_hi - z_lo) / n_cells as f64;
        let mut faces: Vec<f64> = (0..=n_cells).map(|j| z_lo + j as f64 * dz).collect();
        faces[n_cells] = z_hi;
        let centers = (0..n_cells).map(|i| z_lo + (i as f64 + 0.5) * dz).collect();
        Ok(Self { z_lo, z_hi, dz, centers, faces })
    }

    /// Grid over the solution's z-domain; a semi-infinite domain is cut
    /// where the tail mass drops below 1e-12.
    pub fn for_solution(sol: &SimilaritySolution, n_cells: usize) -> Result<Self> {
        let (lo, hi) = sol.truncated_z_domain(TAIL_MASS)?;
        Self::uniform(lo, hi, n_cells)
    }

    pub fn n_cells(&self) -> usize {
        self.centers.len()
    }
    pub fn dz(&self) -> f64 {
        self.dz
    }
    pub fn z_lo(&self) -> f64 {
        self.z_lo
    }
    pub fn z_hi(&self) -> f64 {
        self.z_hi
    }
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }
}

/// Tail mass left outside a truncated semi-infinite domain.
pub const TAIL_MASS: f64 = 1e-12;

/// Cell averages u_i at log-time s = ln t.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOnGrid {
    pub values: Vec<f64>,
    pub time_s: f64,
}

impl FieldOnGrid {
    pub fn mass(&self, grid: &ZGrid) -> f64 {
        self.values.iter().sum::<f64>() * grid.dz()
    }

    /// Σ |u_i − v_i| Δz.
    pub fn l1_distance(&self, other: &FieldOnGrid, grid: &ZGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).sum::<f64>() * grid.dz()
    }

    /// Rescaled to unit mass.
    pub fn normalized(mut self, grid: &ZGrid) -> Self {
        let m = self.mass(grid);
        self.values.iter_mut().for_each(|v| *v /= m);
        self
    }

    pub fn uniform(grid: &ZGrid, time_s: f64) -> Self {
        let h = 1.0 / (grid.z_hi() - grid.z_lo());
        Self { values: vec![h; grid.n_cells()], time_s }
    }

    /// Normalized triangle with its apex at fraction `peak` of the interval.
    pub fn triangle(grid: &ZGrid, peak: f64, time_s: f64) -> Self {
        let apex = grid.z_lo() + peak.clamp(0.0, 1.0) * (grid.z_hi() - grid.z_lo());
        let values = grid
            .centers()
            .iter()
            .map(|&z| {
                if z <= apex {
                    (z - grid.z_lo()) / (apex - grid.z_lo()).max(f64::MIN_POSITIVE)
                } else {
                    (grid.z_hi() - z) / (grid.z_hi() - apex).max(f64::MIN_POSITIVE)
                }
            })
            .collect();
        Self { values, time_s }.normalized(grid)
    }

    /// y sampled at the cell centres.
    pub fn sampled_profile(sol: &SimilaritySolution, grid: &ZGrid, time_s: f64) -> Self {
        Self { values: grid.centers().iter().map(|&z| sol.y(z)).collect(), time_s }
    }

    /// Exact cell averages of y.
    pub fn cell_averaged_profile(sol: &SimilaritySolution, grid: &ZGrid, time_s: f64) -> Result<Self> {
        let opts = QuadratureOptions { abs_tol: 1e-16, rel_tol: 1e-12, ..Default::default() };
        let faces = grid.faces();
        let values = faces
            .windows(2)
            .map(|w| Ok(integrate_with(|z| sol.y(z), w[0], w[1], &opts)?.value / grid.dz()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values, time_s })
    }
}

/// Tridiagonal generator of the semi-discrete system du/ds = L u.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: ZGrid,
    /// Coefficient of the right cell in each face flux (faces 0..=n).
    flux_right: Vec<f64>,
    /// Coefficient of the left cell in each face flux.
    flux_left: Vec<f64>,
}

fn bernoulli(p: f64) -> f64 {
    if p.abs() < 1e-8 {
        1.0 - 0.5 * p
    } else {
        p / p.exp_m1()
    }
}

pub fn transformed_operator(sol: &SimilaritySolution, grid: &ZGrid) -> Result<DiscreteOperator> {
    let (lo, hi) = sol.z_domain();
    let tol = 1e-12 * (grid.z_hi() - grid.z_lo());
    if lo.is_finite() && (grid.z_lo() - lo).abs() > tol {
        return Err(Error::GridMismatch(format!("grid starts at {} but the domain at {lo}", grid.z_lo())));
    }
    if hi.is_finite() && (grid.z_hi() - hi).abs() > tol {
        return Err(Error::GridMismatch(format!("grid ends at {} but the domain at {hi}", grid.z_hi())));
    }
    if grid.z_lo() < lo - tol || grid.z_hi() > hi + tol {
        return Err(Error::GridMismatch("grid extends outside the domain".into()));
    }
    let profile = sol.profile();
    let f = |z: f64| profile.f_from_coefficients(z);
    let n = grid.n_cells();
    let dz = grid.dz();
    let mut flux_right = vec![0.0; n + 1];
    let mut flux_left = vec![0.0; n + 1];
    let opts = QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-13, smooth_endpoints: false, ..Default::default() };
    for j in 1..n {
        let (zl, zr) = (grid.centers()[j - 1], grid.centers()[j]);
        let peclet = integrate_with(f, zl, zr, &opts)?.value;
        let diff = (profile.rho2)(grid.faces()[j]) / dz;
        flux_right[j] = diff * bernoulli(peclet);
        flux_left[j] = diff * bernoulli(-peclet);
    }
    // faces 0 and n stay at zero flux
    Ok(DiscreteOperator { grid: grid.clone(), flux_right, flux_left })
}

impl DiscreteOperator {
    pub fn grid(&self) -> &ZGrid {
        &self.grid
    }

    /// Face fluxes F_0..F_n for cell values u (F_0 = F_n = 0).
    pub fn face_fluxes(&self, u: &[f64]) -> Vec<f64> {
        let n = self.grid.n_cells();
        let mut out = vec![0.0; n + 1];
        for j in 1..n {
            out[j] = self.flux_right[j] * u[j] - self.flux_left[j] * u[j - 1];
        }
        out
    }

    /// du/ds = (F_{i+1/2} − F_{i−1/2}) / Δz.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let flux = self.face_fluxes(u);
        flux.windows(2).map(|w| (w[1] - w[0]) / self.grid.dz()).collect()
    }

    /// (sub, diag, super) bands of L.
    pub fn bands(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.grid.n_cells();
        let dz = self.grid.dz();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for i in 0..n {
            // F_{i+1/2} is face i+1, F_{i−1/2} is face i
            diag[i] = -(self.flux_left[i + 1] + self.flux_right[i]) / dz;
            if i + 1 < n {
                sup[i] = self.flux_right[i + 1] / dz;
            }
            if i > 0 {
                sub[i] = self.flux_left[i] / dz;
            }
        }
        (sub, diag, sup)
    }

    /// Σ_i L_{ij} for each column j; zero for a conservative operator.
    pub fn column_sums(&self) -> Vec<f64> {
        let (sub, diag, sup) = self.bands();
        let n = diag.len();
        (0..n)
            .map(|j| {
                let mut s = diag[j];
                if j > 0 {
                    s += sup[j - 1];
                }
                if j + 1 < n {
                    s += sub[j + 1];
                }
                s
            })
            .collect()
    }

    /// One implicit Euler step (I − ds·L) u_new = u.
    ///
    /// The unknowns are the interior face fluxes G at the new level,
    /// u_new_i = u_i + ds(G_{i+1} − G_i)/Δz, so the update telescopes and
    /// rounding in the mass scales with the change in u rather than with
    /// ds·‖L‖. Values below zero only by rounding are set to zero.
    pub fn implicit_euler_step(&self, u: &[f64], ds: f64) -> Result<Vec<f64>> {
        let n = self.grid.n_cells();
        if u.len() != n {
            return Err(Error::GridMismatch(format!("field has {} values for {n} cells", u.len())));
        }
        let k = ds / self.grid.dz();
        let m = n - 1;
        let (mut a, mut b, mut c, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for row in 0..m {
            let j = row + 1;
            let (r, l) = (self.flux_right[j], self.flux_left[j]);
            a[row] = -k * l;
            b[row] = 1.0 + k * (r + l);
            c[row] = -k * r;
            rhs[row] = r * u[j] - l * u[j - 1];
        }
        let g = solve_tridiagonal(&a, &b, &c, &rhs)?;
        let face = |j: usize| if j == 0 || j == n { 0.0 } else { g[j - 1] };
        let scale = u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut next = Vec::with_capacity(n);
        for (i, &ui) in u.iter().enumerate() {
            let v = ui + k * (face(i + 1) - face(i));
            let noise = 64.0 * f64::EPSILON * (ui.abs() + k * (face(i + 1).abs() + face(i).abs())).max(scale * 1e-3);
            if v < -noise || !v.is_finite() {
                return Err(Error::Positivity { cell: i, value: v });
            }
            next.push(v.max(0.0));
        }
        Ok(next)
    }
}

/// Thomas algorithm; `a[0]` and `c[n−1]` are ignored.
fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut pivot = b[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::LinearSolve("zero pivot in row 0".into()));
    }
    cp[0] = c[0] / pivot;
    dp[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = b[i] - a[i] * cp[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::LinearSolve(format!("zero pivot in row {i}")));
        }
        cp[i] = if i + 1 < n { c[i] / pivot } else { 0.0 };
        dp[i] = (rhs[i] - a[i] * dp[i - 1]) / pivot;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Implicit Euler in s from `u0.time_s` to `s_end`.
pub fn evolve(op: &DiscreteOperator, u0: &FieldOnGrid, s_end: f64, ds: f64) -> Result<FieldOnGrid> {
    evolve_observed(op, u0, s_end, ds, |_| {})
}

/// As [`evolve`], calling `observe` after every step.
pub fn evolve_observed<O: FnMut(&FieldOnGrid)>(
    op: &DiscreteOperator,
    u0: &FieldOnGrid,
    s_end: f64,
    ds: f64,
    mut observe: O,
) -> Result<FieldOnGrid> {
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(Error::domain("evolve", format!("ds must be positive, got {ds}")));
    }
    if u0.values.len() != op.grid.n_cells() {
        return Err(Error::GridMismatch(format!(
            "field has {} values for {} cells",
            u0.values.len(),
            op.grid.n_cells()
        )));
    }
    if let Some(i) = u0.values.iter().position(|v| !(*v >= 0.0)) {
        return Err(Error::Positivity { cell: i, value: u0.values[i] });
    }
    let span = s_end - u0.time_s;
    let steps = if span > 0.0 { (span / ds).ceil() as usize } else { 0 };
    let mut field = u0.clone();
    for k in 0..steps {
        let step = if k + 1 == steps { s_end - field.time_s } else { ds };
        let next = op.implicit_euler_step(&field.values, step)?;
        if let Some(i) = next.iter().position(|v| !(*v >= 0.0)) {
            return Err(Error::Positivity { cell: i, value: next[i] });
        }
        field = FieldOnGrid { values: next, time_s: if k + 1 == steps { s_end } else { field.time_s + step } };
        observe(&field);
    }
    Ok(field)
}

/// Central-difference residual of ∂_tW + ∂_x(D¹W) − ∂²_x(D²W) at (x, t).
pub fn fpe_residual_at(sol: &SimilaritySolution, x: f64, t: f64, h: f64, dt: f64) -> f64 {
    let w = |x: f64, t: f64| sol.density_unchecked(x, t);
    let drift_flux = |x: f64| sol.coefficients_unchecked(x, t).0 * w(x, t);
    let diffusion = |x: f64| sol.coefficients_unchecked(x, t).1 * w(x, t);
    let w_t = (w(x, t + dt) - w(x, t - dt)) / (2.0 * dt);
    let adv = (drift_flux(x + h) - drift_flux(x - h)) / (2.0 * h);
    let diff = (diffusion(x + h) - 2.0 * diffusion(x) + diffusion(x - h)) / (h * h);
    w_t + adv - diff
}

/// Central part [z_lo + w/4, z_hi − w/4] of the (truncated) z-domain, where
/// W is smooth enough for difference stencils.
pub fn probe_interval(sol: &SimilaritySolution) -> Result<(f64, f64)> {
    let (lo, hi) = sol.truncated_z_domain(1e-6)?;
    let w = hi - lo;
    Ok((lo + 0.25 * w, hi - 0.25 * w))
}

/// Max-norm of [`fpe_residual_at`] over the x-nodes x₀ + k·h inside the
/// probe interval at time t, with x₀ its left end.
pub fn residual_original_coordinates(sol: &SimilaritySolution, x_grid_step: f64, t: f64, dt: f64) -> Result<f64> {
    if !(t > 0.0 && dt > 0.0 && dt < t && x_grid_step > 0.0) {
        return Err(Error::domain("residual_original_coordinates", "need t > dt > 0 and a positive step"));
    }
    let (za, zb) = probe_interval(sol)?;
    let scale = t.powf(sol.alpha());
    let (xa, xb) = (za * scale, zb * scale);
    let n = ((xb - xa) / x_grid_step).floor() as usize;
    Ok((0..=n).map(|k| fpe_residual_at(sol, xa + k as f64 * x_grid_step, t, x_grid_step, dt).abs()).fold(0.0, f64::max))
}

/// L1 distance between the field reached from a uniform start after log-time
/// `s_span` and the exact cell averages of y.
pub fn stationary_error(sol: &SimilaritySolution, n_cells: usize, s_span: f64, ds: f64) -> Result<f64> {
    let grid = ZGrid::for_solution(sol, n_cells)?;
    let op = transformed_operator(sol, &grid)?;
    let exact = FieldOnGrid::cell_averaged_profile(sol, &grid, s_span)?;
    let u = evolve(&op, &FieldOnGrid::uniform(&grid, 0.0), s_span, ds)?;
    Ok(u.l1_distance(&exact, &grid))
}

/// Stationary errors at n, 2n, 4n, … cells (`levels` grids) and the
/// observed orders log₂(e_k / e_{k+1}).
pub fn refinement_study(
    sol: &SimilaritySolution,
    n_coarse: usize,
    levels: usize,
) -> Result<(Vec<(usize, f64)>, Vec<f64>)> {
    let errors = (0..levels)
        .map(|k| {
            let n = n_coarse << k;
            Ok((n, stationary_error(sol, n, 10.0, 0.05)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let orders = errors.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect();
    Ok((errors, orders))
}

/// Refinement order expected for the stationary error: cell averages of a
/// profile vanishing like |z − z_b|^a at a finite endpoint differ from the
/// centre values by O(Δz^{1+a}) there, so the order is min(2, 1 + a_min).
pub fn expected_refinement_order(sol: &SimilaritySolution) -> f64 {
    let a_min = match sol.class_params() {
        SolutionClass::ClassI { a1, a2, .. } | SolutionClass::ClassII { a1, a2, .. } => a1.min(a2),
        SolutionClass::ClassIII { z1, a1, a2, .. } => {
            if z1 > 0.0 {
                a1
            } else {
                a1 + a2
            }
        }
    };
    (1.0 + a_min).min(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::{build_solution, figure_preset, FIGURE_PRESETS};

    fn fig(name: &str) -> SimilaritySolution {
        let p = figure_preset(name).unwrap();
        build_solution(p.alpha, p.class).unwrap()
    }

    #[test]
    fn grid_layout() {
        let g = ZGrid::uniform(1.0, 4.0, 6).unwrap();
        assert_eq!(g.faces().first(), Some(&1.0));
        assert_eq!(g.faces().last(), Some(&4.0));
        assert!(g.faces().windows(2).all(|w| w[1] > w[0]));
        assert!((g.centers()[0] - 1.25).abs() < 1e-15);
        assert!(ZGrid::uniform(1.0, 1.0, 5).is_err());
        assert!(ZGrid::uniform(0.0, f64::INFINITY, 5).is_err());
    }

    #[test]
    fn bernoulli_function() {
        assert_eq!(bernoulli(0.0), 1.0);
        for p in [-30.0, -1.0, -1e-9, 1e-9, 0.5, 20.0] {
            // B(−P) − B(P) = P
            assert!((bernoulli(-p) - bernoulli(p) - p).abs() < 1e-12 * p.abs().max(1.0));
        }
        assert!(bernoulli(800.0) == 0.0);
    }

    #[test]
    fn sampled_profile_carries_no_flux() {
        for p in FIGURE_PRESETS {
            let sol = build_solution(p.alpha, p.class).unwrap();
            let grid = ZGrid::for_solution(&sol, 200).unwrap();
            let op = transformed_operator(&sol, &grid).unwrap();
            let y = FieldOnGrid::sampled_profile(&sol, &grid, 0.0);
            let peak = y.values.iter().cloned().fold(0.0, f64::max);
            let flux = op.face_fluxes(&y.values);
            let worst = flux.iter().map(|f| f.abs()).fold(0.0, f64::max);
            let scale = peak * grid.faces().iter().map(|&z| (sol.profile().rho2)(z)).fold(0.0, f64::max) / grid.dz();
            assert!(worst <= grid.dz().powi(2) * scale, "{}: {worst:e}", p.name);
            assert!(worst <= 1e-10 * scale, "{}: {worst:e}", p.name);
        }
    }

    #[test]
    fn conservative_columns() {
        let sol = fig("fig1");
        let grid = ZGrid::for_solution(&sol, 100).unwrap();
        let op = transformed_operator(&sol, &grid).unwrap();
        let (_, diag, _) = op.bands();
        let scale = diag.iter().map(|d| d.abs()).fold(0.0, f64::max);
        for s in op.column_sums() {
            assert!(s.abs() <= 1e-14 * scale, "{s:e}");
        }
    }

    #[test]
    fn uniform_field_keeps_mass() {
        let sol = build_solution(2.0, SolutionClass::ClassI { z1: -1.0, z2: 1.0, a1: 1.0, a2: 1.0 }).unwrap();
        let grid = ZGrid::for_solution(&sol, 100).unwrap();
        let op = transformed_operator(&sol, &grid).unwrap();
        let u = FieldOnGrid::uniform(&grid, 0.0);
        let du = op.apply(&u.values);
        assert!((du.iter().sum::<f64>() * grid.dz()).abs() < 1e-14);
        let next = op.implicit_euler_step(&u.values, 0.1).unwrap();
        assert!((next.iter().sum::<f64>() * grid.dz() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stationary_start_stays_put() {
        let sol = fig("fig1");
        let grid = ZGrid::for_solution(&sol, 400).unwrap();
        let op = transformed_operator(&sol, &grid).unwrap();
        let y = FieldOnGrid::cell_averaged_profile(&sol, &grid, 0.0).unwrap();
        let out = evolve(&op, &y, 3.0, 0.05).unwrap();
        assert!(out.l1_distance(&y, &grid) < 5e-4);
        assert!((out.mass(&grid) - 1.0).abs() < 1e-10);
        assert_eq!(out.time_s, 3.0);
    }

    #[test]
    fn rejects_mismatched_grid() {
        let sol = fig("fig1");
        let grid = ZGrid::uniform(0.5, 4.0, 50).unwrap();
        assert!(matches!(transformed_operator(&sol, &grid), Err(Error::GridMismatch(_))));
        let grid = ZGrid::for_solution(&sol, 50).unwrap();
        let op = transformed_operator(&sol, &grid).unwrap();
        let bad = FieldOnGrid { values: vec![1.0; 10], time_s: 0.0 };
        assert!(evolve(&op, &bad, 1.0, 0.1).is_err());
        let mut neg = FieldOnGrid::uniform(&grid, 0.0);
        neg.values[3] = -1.0;
        assert!(matches!(evolve(&op, &neg, 1.0, 0.1), Err(Error::Positivity { cell: 3, .. })));
        assert!(evolve(&op, &FieldOnGrid::uniform(&grid, 0.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn residual_vanishes_with_step() {
        let sol = build_solution(1.5, SolutionClass::ClassI { z1: -1.0, z2: 2.0, a1: 2.5, a2: 3.0 }).unwrap();
        let t = 0.9f64;
        let mid = 0.5 * t.powf(1.5);
        let r: Vec<f64> = [1e-2, 5e-3, 2.5e-3].iter().map(|&h| fpe_residual_at(&sol, mid, t, h, h).abs()).collect();
        assert!(r[2] < r[1] && r[1] < r[0]);
        assert!(r[2] < 1e-3);
    }

    #[test]
    fn refinement_order_matches_endpoint_regularity() {
        for (name, expected) in [("fig1", 1.5), ("fig3", 2.0), ("fig5", 2.0)] {
            let sol = fig(name);
            assert_eq!(expected_refinement_order(&sol), expected);
            let (_, orders) = refinement_study(&sol, 100, 3).unwrap();
            for o in orders {
                assert!((o - expected).abs() < 0.1, "{name}: {o}");
            }
        }
        // smooth endpoints reach second order
        let (_, orders) = refinement_study(&fig("fig3"), 100, 3).unwrap();
        assert!(orders.iter().all(|o| (1.8..=2.2).contains(o)));
    }

    #[test]
    fn three_starts_share_one_attractor() {
        let sol = fig("fig1");
        let grid = ZGrid::for_solution(&sol, 400).unwrap();
        let op = transformed_operator(&sol, &grid).unwrap();
        let y = FieldOnGrid::cell_averaged_profile(&sol, &grid, 10.0).unwrap();
        let ends: Vec<FieldOnGrid> = [
            FieldOnGrid::uniform(&grid, 0.0),
            FieldOnGrid::triangle(&grid, 0.1, 0.0),
            FieldOnGrid::triangle(&grid, 0.9, 0.0),
        ]
        .iter()
        .map(|u0| evolve(&op, u0, 10.0, 0.05).unwrap())
        .collect();
        for u in &ends {
            assert!(u.l1_distance(&y, &grid) < 1e-3);
            assert!(u.l1_distance(&ends[0], &grid) < 1e-3);
        }
    }

    #[test]
    fn mass_is_conserved_for_any_step() {
        for p in FIGURE_PRESETS {
            let sol = build_solution(p.alpha, p.class).unwrap();
            let grid = ZGrid::for_solution(&sol, 200).unwrap();
            let op = transformed_operator(&sol, &grid).unwrap();
            for ds in [1e-3, 0.1, 10.0, 1e3] {
                let mut prev = 1.0;
                evolve_observed(&op, &FieldOnGrid::triangle(&grid, 0.3, 0.0), 20.0 * ds, ds, |f| {
                    let m = f.mass(&grid);
                    assert!((m - prev).abs() <= 1e-12 * prev, "ds={ds}: {:e}", (m - prev).abs());
                    prev = m;
                })
                .unwrap();
            }
        }
    }
}
