//! Monte Carlo check: Euler–Maruyama paths of
//!
//! ```text
//! dX = D¹(X, t) dt + √(2 D²(X, t)) dB      (Itô)
//! ```
//!
//! reflected at the moving boundaries, compared against W(x, t) by binned L1
//! distance.
//!
//! Particles are grouped in fixed chunks of [`CHUNK`] paths, each driven by
//! its own ChaCha8 stream derived from the seed, so results do not depend on
//! how chunks are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scaling::check_time;
use crate::solutions::SimilaritySolution;
use crate::specfun::{integrate_with, QuadratureOptions};

/// Paths per RNG stream.
pub const CHUNK: usize = 4096;

/// Mass left outside the sampling and histogram range of a semi-infinite
/// domain.
const SAMPLING_TAIL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PathEnsemble {
    positions: Vec<f64>,
    t: f64,
    n_reflections: u64,
    seed: u64,
    streams: Vec<ChaCha8Rng>,
}

fn streams_for(seed: u64, n: usize) -> Vec<ChaCha8Rng> {
    (0..n.div_ceil(CHUNK))
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            rng
        })
        .collect()
}

impl PathEnsemble {
    /// `n` paths drawn from W(·, t0) by inverse CDF on a 10⁴-point table.
    pub fn sample(sol: &SimilaritySolution, n: usize, t0: f64, seed: u64) -> Result<Self> {
        check_time(t0, "PathEnsemble::sample")?;
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        let table = InverseCdfTable::new(sol, 10_000)?;
        let scale = t0.powf(sol.alpha());
        let mut streams = streams_for(seed, n);
        let mut positions = Vec::with_capacity(n);
        for (k, rng) in streams.iter_mut().enumerate() {
            let len = CHUNK.min(n - k * CHUNK);
            positions.extend((0..len).map(|_| table.quantile(rng.random::<f64>()) * scale));
        }
        Ok(Self { positions, t: t0, n_reflections: 0, seed, streams })
    }

    /// Ensemble at explicit positions.
    pub fn from_positions(positions: Vec<f64>, t: f64, seed: u64) -> Result<Self> {
        check_time(t, "PathEnsemble::from_positions")?;
        if positions.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let streams = streams_for(seed, positions.len());
        Ok(Self { positions, t, n_reflections: 0, seed, streams })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn n_reflections(&self) -> u64 {
        self.n_reflections
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn len(&self) -> usize {
        self.positions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Tabulated CDF of y on a uniform z-grid, inverted by linear interpolation.
#[derive(Debug, Clone)]
pub struct InverseCdfTable {
    z: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdfTable {
    pub fn new(sol: &SimilaritySolution, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::domain("InverseCdfTable::new", "need at least 2 points"));
        }
        let (lo, hi) = sol.truncated_z_domain(SAMPLING_TAIL)?;
        let h = (hi - lo) / (n_points - 1) as f64;
        let z: Vec<f64> = (0..n_points).map(|i| if i + 1 == n_points { hi } else { lo + i as f64 * h }).collect();
        let opts = QuadratureOptions { abs_tol: 1e-15, rel_tol: 1e-10, ..Default::default() };
        let mut cdf = Vec::with_capacity(n_points);
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in z.windows(2) {
            acc += integrate_with(|z| sol.y(z), w[0], w[1], &opts)?.value;
            cdf.push(acc);
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self { z, cdf })
    }

    /// z with CDF(z) = u, for u ∈ [0, 1].
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let w = if c1 > c0 { ((u - c0) / (c1 - c0)).clamp(0.0, 1.0) } else { 0.5 };
        self.z[i - 1] + w * (self.z[i] - self.z[i - 1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    /// Scales the noise term; 0 gives the deterministic flow ẋ = D¹.
    pub noise: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { noise: 1.0 }
    }
}

/// One Euler–Maruyama step of length dt with mirror reflection at the
/// boundary positions at t + dt.
pub fn step_ensemble(ens: &PathEnsemble, sol: &SimilaritySolution, dt: f64) -> Result<PathEnsemble> {
    step_ensemble_with(ens, sol, dt, StepOptions::default())
}

pub fn step_ensemble_with(
    ens: &PathEnsemble,
    sol: &SimilaritySolution,
    dt: f64,
    opts: StepOptions,
) -> Result<PathEnsemble> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain("step_ensemble", format!("dt must be positive, got {dt}")));
    }
    let t = ens.t;
    let t_next = t + dt;
    check_time(t_next, "step_ensemble")?;
    let alpha = sol.alpha();
    let frame = Frame {
        scale: t.powf(alpha),
        drift_scale: t.powf(alpha - 1.0) * dt,
        noise_scale: (2.0 * t.powf(2.0 * alpha - 1.0) * dt).sqrt() * opts.noise,
        bounds: sol.boundary_positions_unchecked(t_next),
    };
    let mut next = ens.clone();
    let chunks: Vec<(&mut [f64], &mut ChaCha8Rng)> =
        next.positions.chunks_mut(CHUNK).zip(next.streams.iter_mut()).collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(chunks.len());
    let reflections = if workers <= 1 {
        chunks.into_iter().map(|(xs, rng)| frame.advance(sol, xs, rng)).sum::<Result<u64>>()?
    } else {
        let mut groups: Vec<Vec<(&mut [f64], &mut ChaCha8Rng)>> = (0..workers).map(|_| Vec::new()).collect();
        for (k, c) in chunks.into_iter().enumerate() {
            groups[k % workers].push(c);
        }
        std::thread::scope(|s| {
            let handles: Vec<_> = groups
                .into_iter()
                .map(|g| s.spawn(|| g.into_iter().map(|(xs, rng)| frame.advance(sol, xs, rng)).sum::<Result<u64>>()))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).sum::<Result<u64>>()
        })?
    };
    next.t = t_next;
    next.n_reflections += reflections;
    Ok(next)
}

struct Frame {
    scale: f64,
    drift_scale: f64,
    noise_scale: f64,
    bounds: (f64, f64),
}

impl Frame {
    fn advance(&self, sol: &SimilaritySolution, xs: &mut [f64], rng: &mut ChaCha8Rng) -> Result<u64> {
        let p = sol.profile();
        let (lo, hi) = self.bounds;
        let mut reflections = 0;
        for x in xs.iter_mut() {
            // ρ₁ is polynomial and ρ₂ vanishes outside the domain, so a z
            // rounded just past an endpoint is harmless
            let z = *x / self.scale;
            let (r1, r2) = ((p.rho1)(z), (p.rho2)(z).max(0.0));
            let xi: f64 = rng.sample(StandardNormal);
            let mut y = *x + self.drift_scale * r1 + self.noise_scale * r2.sqrt() * xi;
            if y < lo {
                y = 2.0 * lo - y;
                reflections += 1;
                if y > hi {
                    return Err(Error::StepRejected(format!("path crossed both boundaries from x = {x}")));
                }
            } else if y > hi {
                y = 2.0 * hi - y;
                reflections += 1;
                if y < lo {
                    return Err(Error::StepRejected(format!("path crossed both boundaries from x = {x}")));
                }
            }
            *x = y;
        }
        Ok(reflections)
    }
}

/// Largest step for which each finite boundary moves less than 10% of the
/// domain width: |α z_b t^{α−1}| dt ≤ 0.1 (z_hi − z_lo) t^α.
pub fn boundary_step_cap(sol: &SimilaritySolution, t: f64) -> Result<f64> {
    let (lo, hi) = sol.truncated_z_domain(SAMPLING_TAIL)?;
    let (zlo, zhi) = sol.z_domain();
    let speed = [zlo, zhi].iter().filter(|z| z.is_finite()).map(|z| (sol.alpha() * z).abs()).fold(0.0, f64::max);
    if speed == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(0.1 * (hi - lo) * t / speed)
}

/// Steps from `ens.t` to `t_end` with dt ≤ min(dt_max, boundary cap); the
/// last step lands on `t_end` exactly.
pub fn propagate(
    ens: &PathEnsemble,
    sol: &SimilaritySolution,
    t_end: f64,
    dt_max: f64,
    opts: StepOptions,
) -> Result<PathEnsemble> {
    if !(dt_max > 0.0) || t_end < ens.t {
        return Err(Error::domain("propagate", "need dt_max > 0 and t_end ≥ t"));
    }
    let mut cur = ens.clone();
    while cur.t < t_end {
        let dt = dt_max.min(boundary_step_cap(sol, cur.t)?);
        let mut next = if cur.t + dt >= t_end * (1.0 - 1e-14) {
            step_ensemble_with(&cur, sol, t_end - cur.t, opts)?
        } else {
            step_ensemble_with(&cur, sol, dt, opts)?
        };
        if next.t >= t_end * (1.0 - 1e-14) {
            next.t = t_end;
        }
        cur = next;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramRow {
    pub bin_center: f64,
    pub empirical_density: f64,
    pub analytic_density: f64,
}

/// Bin-averaged empirical and analytic densities over the instantaneous
/// domain (semi-infinite domains cut where the tail mass is 1e-10), plus the
/// empirical and analytic mass falling outside the bins.
pub fn histogram(ens: &PathEnsemble, sol: &SimilaritySolution, n_bins: usize) -> Result<(Vec<HistogramRow>, f64, f64)> {
    if ens.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if n_bins < 10 {
        return Err(Error::domain("histogram", format!("need at least 10 bins, got {n_bins}")));
    }
    let t = ens.t;
    let (zlo, zhi) = sol.truncated_z_domain(SAMPLING_TAIL)?;
    let scale = t.powf(sol.alpha());
    let (lo, hi) = (zlo * scale, zhi * scale);
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    let mut outside = 0u64;
    for &x in &ens.positions {
        let k = ((x - lo) / width).floor();
        if k >= 0.0 && (k as usize) < n_bins {
            counts[k as usize] += 1;
        } else if x == hi {
            counts[n_bins - 1] += 1;
        } else {
            outside += 1;
        }
    }
    let n = ens.len() as f64;
    let opts = QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-10, ..Default::default() };
    let mut rows = Vec::with_capacity(n_bins);
    let mut analytic_total = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let a = lo + k as f64 * width;
        let b = if k + 1 == n_bins { hi } else { a + width };
        let mass = integrate_with(|x| sol.density_unchecked(x, t), a, b, &opts)?.value;
        analytic_total += mass;
        rows.push(HistogramRow {
            bin_center: 0.5 * (a + b),
            empirical_density: c as f64 / n / width,
            analytic_density: mass / width,
        });
    }
    Ok((rows, outside as f64 / n, (1.0 - analytic_total).max(0.0)))
}

/// L1 distance between bin-averaged empirical and analytic densities.
pub fn histogram_distance(ens: &PathEnsemble, sol: &SimilaritySolution, n_bins: usize) -> Result<f64> {
    let (rows, out_emp, out_an) = histogram(ens, sol, n_bins)?;
    let width = rows[1].bin_center - rows[0].bin_center;
    let inside: f64 = rows.iter().map(|r| (r.empirical_density - r.analytic_density).abs()).sum::<f64>() * width;
    Ok(inside + out_emp + out_an)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::{build_solution, figure_preset, SolutionClass, FIGURE_PRESETS};

    fn fig(name: &str) -> SimilaritySolution {
        let p = figure_preset(name).unwrap();
        build_solution(p.alpha, p.class).unwrap()
    }

    #[test]
    fn quantiles_invert_the_table() {
        let sol = build_solution(1.0, SolutionClass::ClassI { z1: -1.0, z2: 1.0, a1: 1.0, a2: 1.0 }).unwrap();
        let table = InverseCdfTable::new(&sol, 10_000).unwrap();
        assert_eq!(table.quantile(0.0), -1.0);
        assert_eq!(table.quantile(1.0), 1.0);
        // CDF of (3/4)(1 − z²) is (2 + 3z − z³)/4
        for u in [0.1, 0.25, 0.5, 0.9] {
            let z = table.quantile(u);
            assert!(((2.0 + 3.0 * z - z * z * z) / 4.0 - u).abs() < 1e-7, "{u}");
        }
    }

    #[test]
    fn sampled_histogram_matches_density() {
        for p in FIGURE_PRESETS {
            let sol = build_solution(p.alpha, p.class).unwrap();
            let n = 100_000;
            let ens = PathEnsemble::sample(&sol, n, p.times[0], 11).unwrap();
            let d = histogram_distance(&ens, &sol, 40).unwrap();
            // multinomial L1 error is about √(2/π) Σ √(p_k/N) ≤ √(2K/(πN))
            let bound = 3.0 * (2.0 * 40.0 / (std::f64::consts::PI * n as f64)).sqrt();
            assert!(d < bound, "{}: {d} vs {bound}", p.name);
            let (lo, hi) = sol.boundary_positions(p.times[0]).unwrap();
            assert!(ens.positions().iter().all(|&x| x >= lo && x <= hi));
        }
    }

    #[test]
    fn same_seed_same_paths() {
        let sol = fig("fig1");
        let a = PathEnsemble::sample(&sol, 10_000, 0.3, 5).unwrap();
        let b = PathEnsemble::sample(&sol, 10_000, 0.3, 5).unwrap();
        let a = propagate(&a, &sol, 0.35, 1e-3, StepOptions::default()).unwrap();
        let b = propagate(&b, &sol, 0.35, 1e-3, StepOptions::default()).unwrap();
        assert_eq!(a.positions(), b.positions());
        assert_eq!(a.n_reflections(), b.n_reflections());
        let c = PathEnsemble::sample(&sol, 10_000, 0.3, 6).unwrap();
        assert_ne!(a.positions()[..10], c.positions()[..10]);
    }

    #[test]
    fn chunks_are_independent_of_ensemble_size() {
        let sol = fig("fig1");
        let small = PathEnsemble::sample(&sol, CHUNK, 0.3, 9).unwrap();
        let large = PathEnsemble::sample(&sol, 3 * CHUNK, 0.3, 9).unwrap();
        assert_eq!(small.positions(), &large.positions()[..CHUNK]);
        let small = step_ensemble(&small, &sol, 1e-3).unwrap();
        let large = step_ensemble(&large, &sol, 1e-3).unwrap();
        assert_eq!(small.positions(), &large.positions()[..CHUNK]);
    }

    #[test]
    fn paths_stay_inside_and_count_is_fixed() {
        let sol = fig("fig2");
        let mut ens = PathEnsemble::sample(&sol, 20_000, 1.0, 3).unwrap();
        for _ in 0..50 {
            ens = step_ensemble(&ens, &sol, 4e-3).unwrap();
            let (lo, hi) = sol.boundary_positions(ens.t()).unwrap();
            assert_eq!(ens.len(), 20_000);
            assert!(ens.positions().iter().all(|&x| x >= lo && x <= hi));
        }
        assert!(ens.n_reflections() > 0);
    }

    #[test]
    fn lower_boundary_start_moves_inward() {
        for name in ["fig1", "fig2", "fig3"] {
            let p = figure_preset(name).unwrap();
            let sol = build_solution(p.alpha, p.class).unwrap();
            let SolutionClass::ClassI { z1, z2, a1, .. } = p.class else { unreachable!() };
            // drift at z₁ relative to the boundary's own motion
            let rel = (sol.profile().rho1)(z1) - p.alpha * z1;
            assert!((rel - (a1 + 1.0) * (z2 - z1)).abs() < 1e-12 * rel.abs());
            assert!(rel > 0.0);
            let t = p.times[0];
            let x0 = z1 * t.powf(p.alpha);
            let ens = PathEnsemble::from_positions(vec![x0; 64], t, 1).unwrap();
            let next = step_ensemble(&ens, &sol, 1e-4).unwrap();
            let (lo, _) = sol.boundary_positions(next.t()).unwrap();
            assert_eq!(next.n_reflections(), 0, "{name}");
            assert!(next.positions().iter().all(|&x| x > lo), "{name}");
        }
    }

    #[test]
    fn deterministic_flow_matches_exact_path() {
        // with ρ₁ − αz = −k(z − z*) the noiseless path in s = ln t is
        // z(s) = z* + (z₀ − z*) e^{−k(s − s₀)}
        let p = figure_preset("fig1").unwrap();
        let sol = build_solution(p.alpha, p.class).unwrap();
        let SolutionClass::ClassI { z1, z2, a1, a2 } = p.class else { unreachable!() };
        let k = a1 + a2 + 2.0;
        let zs = ((a1 + 1.0) * z2 + (a2 + 1.0) * z1) / k;
        let (t0, t1) = (0.3f64, 0.5f64);
        let z0 = [1.2, 2.0, 3.5];
        let exact: Vec<f64> =
            z0.iter().map(|&z| (zs + (z - zs) * (-k * (t1 / t0).ln()).exp()) * t1.powf(p.alpha)).collect();
        let err = |dt: f64| {
            let ens = PathEnsemble::from_positions(z0.iter().map(|z| z * t0.powf(p.alpha)).collect(), t0, 0).unwrap();
            let out = propagate(&ens, &sol, t1, dt, StepOptions { noise: 0.0 }).unwrap();
            out.positions().iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(1e-3), err(5e-4));
        assert!(e2 < 5e-3, "{e2}");
        let order = (e1 / e2).log2();
        assert!((order - 1.0).abs() < 0.1, "{order}");
    }

    #[test]
    fn rejects_bad_input() {
        let sol = fig("fig1");
        assert!(matches!(PathEnsemble::sample(&sol, 0, 0.3, 0), Err(Error::EmptyEnsemble)));
        assert!(PathEnsemble::from_positions(vec![], 0.3, 0).is_err());
        let ens = PathEnsemble::sample(&sol, 100, 0.3, 0).unwrap();
        assert!(step_ensemble(&ens, &sol, 0.0).is_err());
        assert!(histogram_distance(&ens, &sol, 5).is_err());
        // a drift that overshoots by more than the domain width cannot be
        // fixed by one reflection
        let wild = fig("fig1").with_drift(std::sync::Arc::new(|_| -1e3));
        let ens = PathEnsemble::from_positions(vec![2.5 * 0.09; 16], 0.3, 0).unwrap();
        assert!(matches!(step_ensemble(&ens, &wild, 1e-2), Err(Error::StepRejected(_))));
    }
}
