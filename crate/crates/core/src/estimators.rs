//! Monte Carlo estimators for the time constant and the quantities around
//! it: lower-tail probabilities, moment plateaus on the cone, the tau-passage
//! tail, convexity of the limit shape and the critical growth of `T`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::EdgeTimeDistribution;
use crate::error::{Error, Result};
use crate::lattice::{nearest_vertex, LazyField, PolarPoint, Thresholded};
use crate::oriented::{estimate_cone, ConeEstimate, DEFAULT_MARGIN};
use crate::passage::passage_to_targets;
use crate::rng::{Lane, StreamKey};
use crate::stats::{bootstrap_ci, clopper_pearson, linear_fit, mean_se, z_one_sided, LinearFit, MeanSe};

pub const DEFAULT_REPLICATES: usize = 200;
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const CONFIDENCE: f64 = 0.99;

pub fn default_theta_grid() -> Vec<f64> {
    vec![
        0.0,
        PI / 12.0,
        PI / 8.0,
        PI / 6.0,
        FRAC_PI_4,
        PI / 3.0,
        3.0 * PI / 8.0,
        5.0 * PI / 12.0,
        FRAC_PI_2,
    ]
}

/// The five-angle grid `{0, pi/8, pi/4, 3pi/8, pi/2}`.
pub fn coarse_theta_grid() -> Vec<f64> {
    vec![0.0, PI / 8.0, FRAC_PI_4, 3.0 * PI / 8.0, FRAC_PI_2]
}

pub fn target(r: f64, theta: f64) -> Result<(usize, usize)> {
    Ok(nearest_vertex(PolarPoint::new(r, theta)?))
}

fn check_schedule(r_schedule: &[f64]) -> Result<()> {
    if r_schedule.is_empty() {
        return Err(Error::InvalidArgument("empty radius schedule".into()));
    }
    if r_schedule.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument("radii must be positive".into()));
    }
    if r_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radius schedule must be strictly increasing".into()));
    }
    Ok(())
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates == 0 {
        Err(Error::InvalidArgument("need at least one replicate".into()))
    } else {
        Ok(())
    }
}

/// `T(0, v)` for every target in every replicate, `[replicate][target]`.
/// Replicate `i` uses stream `(master_seed, i)`; the order of the result never
/// depends on scheduling.
pub fn sample_passage_times(
    dist: &EdgeTimeDistribution,
    targets: &[(usize, usize)],
    replicates: usize,
    master_seed: u64,
) -> Vec<Vec<f64>> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|rep| passage_to_targets(&LazyField::new(dist, master_seed, rep), targets))
        .collect()
}

/// Same as [`sample_passage_times`] for the tau-passage time.
pub fn sample_tau_times(
    dist: &EdgeTimeDistribution,
    targets: &[(usize, usize)],
    replicates: usize,
    master_seed: u64,
) -> Vec<Vec<u32>> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let w = Thresholded(LazyField::new(dist, master_seed, rep));
            passage_to_targets(&w, targets).into_iter().map(|t| t as u32).collect()
        })
        .collect()
}

/// Passage times at one radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusCell {
    pub r: f64,
    pub target: (usize, usize),
    /// `T` per replicate.
    pub times: Vec<f64>,
    pub t: MeanSe,
    pub t_over_r: MeanSe,
}

impl RadiusCell {
    fn new(r: f64, target: (usize, usize), times: Vec<f64>) -> Self {
        let ratios: Vec<f64> = times.iter().map(|t| t / r).collect();
        RadiusCell {
            r,
            target,
            t: mean_se(&times),
            t_over_r: mean_se(&ratios),
            times,
        }
    }

    /// One-sided lower confidence bound of the mean of `T / r`.
    pub fn lower_bound(&self, level: f64) -> f64 {
        self.t_over_r.mean - z_one_sided(level) * self.t_over_r.stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub theta: f64,
    pub cells: Vec<RadiusCell>,
    pub mu_hat: f64,
    pub mu_stderr: f64,
    /// Fit of mean `T / r` against `1 / r`.
    pub trend: Option<LinearFit>,
    /// Means of `T / r` never rise by more than two combined standard errors.
    pub nonincreasing: bool,
}

impl MuEstimate {
    fn from_cells(theta: f64, cells: Vec<RadiusCell>) -> Self {
        let last = cells.last().expect("nonempty schedule");
        let xs: Vec<f64> = cells.iter().map(|c| 1.0 / c.r).collect();
        let ys: Vec<f64> = cells.iter().map(|c| c.t_over_r.mean).collect();
        let nonincreasing = cells.windows(2).all(|w| {
            let (a, b) = (&w[0].t_over_r, &w[1].t_over_r);
            b.mean <= a.mean + 2.0 * a.stderr.hypot(b.stderr)
        });
        MuEstimate {
            theta,
            mu_hat: last.t_over_r.mean,
            mu_stderr: last.t_over_r.stderr,
            trend: linear_fit(&xs, &ys),
            nonincreasing,
            cells,
        }
    }

    pub fn r_schedule(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.r).collect()
    }

    pub fn last(&self) -> &RadiusCell {
        self.cells.last().expect("nonempty schedule")
    }

    /// Lower confidence bound of `mu_hat`.
    pub fn lower_bound(&self, level: f64) -> f64 {
        self.last().lower_bound(level)
    }

    /// Slope of `log(mean T / r)` against `log r`; `None` when some mean is 0.
    pub fn decay_exponent(&self) -> Option<f64> {
        if self.cells.iter().any(|c| c.t_over_r.mean <= 0.0) {
            return None;
        }
        let xs: Vec<f64> = self.cells.iter().map(|c| c.r.ln()).collect();
        let ys: Vec<f64> = self.cells.iter().map(|c| c.t_over_r.mean.ln()).collect();
        linear_fit(&xs, &ys).map(|f| f.slope)
    }
}

pub fn estimate_mu(
    dist: &EdgeTimeDistribution,
    theta: f64,
    r_schedule: &[f64],
    replicates: usize,
    master_seed: u64,
) -> Result<MuEstimate> {
    Ok(estimate_mu_grid(dist, &[theta], r_schedule, replicates, master_seed)?.remove(0))
}

/// [`estimate_mu`] for several angles from one set of fields.
pub fn estimate_mu_grid(
    dist: &EdgeTimeDistribution,
    thetas: &[f64],
    r_schedule: &[f64],
    replicates: usize,
    master_seed: u64,
) -> Result<Vec<MuEstimate>> {
    check_schedule(r_schedule)?;
    check_replicates(replicates)?;
    let mut targets = Vec::with_capacity(thetas.len() * r_schedule.len());
    for &theta in thetas {
        for &r in r_schedule {
            targets.push(target(r, theta)?);
        }
    }
    let samples = sample_passage_times(dist, &targets, replicates, master_seed);
    let k = r_schedule.len();
    Ok(thetas
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let cells = r_schedule
                .iter()
                .enumerate()
                .map(|(j, &r)| {
                    let col = i * k + j;
                    let times = samples.iter().map(|row| row[col]).collect();
                    RadiusCell::new(r, targets[col], times)
                })
                .collect();
            MuEstimate::from_cells(theta, cells)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub theta: f64,
    pub delta: f64,
    pub r: f64,
    pub hits: usize,
    pub replicates: usize,
    pub frequency: f64,
    /// Exact binomial interval at [`CONFIDENCE`].
    pub ci: (f64, f64),
}

/// Frequency of `{T(0, (r, theta)) <= delta r}`.
pub fn tail_probability(
    dist: &EdgeTimeDistribution,
    theta: f64,
    delta: f64,
    r: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<TailEstimate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} must be positive")));
    }
    check_schedule(&[r])?;
    check_replicates(replicates)?;
    let v = target(r, theta)?;
    let samples = sample_passage_times(dist, &[v], replicates, master_seed);
    let hits = samples.iter().filter(|row| row[0] <= delta * r).count();
    Ok(TailEstimate {
        theta,
        delta,
        r,
        hits,
        replicates,
        frequency: hits as f64 / replicates as f64,
        ci: clopper_pearson(hits, replicates, CONFIDENCE),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCell {
    pub r: f64,
    pub moment: MeanSe,
    pub bootstrap_ci: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPlateau {
    pub theta: f64,
    pub m: u32,
    pub cells: Vec<MomentCell>,
    /// `max - min` of the per-radius moments.
    pub spread: f64,
    /// `sqrt(se_max^2 + se_min^2)` for the radii attaining the max and min.
    pub pooled_stderr: f64,
    /// `spread <= 3 * pooled_stderr`.
    pub bounded: bool,
    /// Last-radius moment minus the first lies inside their combined interval.
    pub last_minus_first_within_ci: bool,
}

/// Rejects `theta` outside the cone or a law that is not supercritical.
fn check_in_cone(dist: &EdgeTimeDistribution, theta: f64, p_c_hat: f64, cone: &ConeEstimate) -> Result<()> {
    let f0 = dist.atom_at_zero();
    if !(f0 > p_c_hat) {
        return Err(Error::InvalidArgument(format!(
            "F(0) = {f0} is not above the critical estimate {p_c_hat}"
        )));
    }
    if !(cone.theta_minus <= theta && theta <= cone.theta_plus) {
        return Err(Error::InvalidArgument(format!(
            "angle {theta} outside the cone [{}, {}]",
            cone.theta_minus, cone.theta_plus
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn moment_plateau(
    dist: &EdgeTimeDistribution,
    theta: f64,
    m: u32,
    r_schedule: &[f64],
    replicates: usize,
    master_seed: u64,
    p_c_hat: f64,
    cone: &ConeEstimate,
) -> Result<MomentPlateau> {
    check_in_cone(dist, theta, p_c_hat, cone)?;
    if m == 0 {
        return Err(Error::InvalidArgument("moment order must be >= 1".into()));
    }
    let est = estimate_mu(dist, theta, r_schedule, replicates, master_seed)?;
    let cells: Vec<MomentCell> = est
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let powers: Vec<f64> = c.times.iter().map(|t| t.powi(m as i32)).collect();
            let mut rng = StreamKey::new(master_seed, i as u64, Lane::Resample).sequential();
            let ci = bootstrap_ci(&powers, crate::stats::mean, BOOTSTRAP_RESAMPLES, CONFIDENCE, &mut rng);
            MomentCell {
                r: c.r,
                moment: mean_se(&powers),
                bootstrap_ci: ci,
            }
        })
        .collect();
    let by_mean = |a: &&MomentCell, b: &&MomentCell| a.moment.mean.total_cmp(&b.moment.mean);
    let hi = cells.iter().max_by(by_mean).unwrap();
    let lo = cells.iter().min_by(by_mean).unwrap();
    let spread = hi.moment.mean - lo.moment.mean;
    let pooled_stderr = hi.moment.stderr.hypot(lo.moment.stderr);
    let (first, last) = (&cells[0], cells.last().unwrap());
    let z = crate::stats::z_two_sided(CONFIDENCE);
    let last_minus_first_within_ci = (last.moment.mean - first.moment.mean).abs()
        <= z * first.moment.stderr.hypot(last.moment.stderr);
    Ok(MomentPlateau {
        theta,
        m,
        bounded: spread <= 3.0 * pooled_stderr,
        spread,
        pooled_stderr,
        last_minus_first_within_ci,
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaTail {
    pub theta: f64,
    pub r: f64,
    pub target: (usize, usize),
    pub replicates: usize,
    /// `(k, P[sigma >= k])` for `k = 0..=max sigma`.
    pub survival: Vec<(u32, f64)>,
    /// Fit of `log P[sigma >= k]` on `k` over `k >= 1` with frequency at least
    /// `floor`.
    pub fit: Option<LinearFit>,
    pub floor: f64,
}

pub const SIGMA_TAIL_FLOOR: f64 = 1e-3;

/// Empirical survival function of `sigma = T_tau(0, (r, theta))`.
pub fn sigma_tail(
    dist: &EdgeTimeDistribution,
    theta: f64,
    r: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<SigmaTail> {
    check_schedule(&[r])?;
    check_replicates(replicates)?;
    let v = target(r, theta)?;
    let sigmas: Vec<u32> = sample_tau_times(dist, &[v], replicates, master_seed)
        .into_iter()
        .map(|row| row[0])
        .collect();
    let max = sigmas.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; max as usize + 2];
    for &s in &sigmas {
        counts[s as usize] += 1;
    }
    let mut survival = Vec::with_capacity(max as usize + 1);
    let mut above = replicates;
    for k in 0..=max {
        survival.push((k, above as f64 / replicates as f64));
        above -= counts[k as usize];
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = survival
        .iter()
        .filter(|&&(k, f)| k >= 1 && f >= SIGMA_TAIL_FLOOR)
        .map(|&(k, f)| (k as f64, f.ln()))
        .unzip();
    Ok(SigmaTail {
        theta,
        r,
        target: v,
        replicates,
        survival,
        fit: linear_fit(&xs, &ys),
        floor: SIGMA_TAIL_FLOOR,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityTriple {
    pub thetas: [f64; 3],
    /// `mu(theta_2)`.
    pub middle: f64,
    /// `a mu(theta_1) + b mu(theta_3)` with `u_2 = a u_1 + b u_3`.
    pub chord: f64,
    pub slack: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub triples: Vec<ConvexityTriple>,
    pub passes: bool,
}

/// A point of `mu` on the unit quarter circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuPoint {
    pub theta: f64,
    pub mu: f64,
    pub stderr: f64,
}

impl From<&MuEstimate> for MuPoint {
    fn from(e: &MuEstimate) -> Self {
        MuPoint {
            theta: e.theta,
            mu: e.mu_hat,
            stderr: e.mu_stderr,
        }
    }
}

/// Convexity of `r mu(theta)` along consecutive angle triples: the unit vector
/// `u_2` is `a u_1 + b u_3` with nonnegative `a, b`, so convexity and
/// homogeneity give `mu_2 <= a mu_1 + b mu_3`.
pub fn convexity_check(points: &[MuPoint]) -> Result<ConvexityReport> {
    if points.len() < 5 {
        return Err(Error::InvalidArgument("convexity check needs at least 5 angles".into()));
    }
    if points.windows(2).any(|w| w[1].theta <= w[0].theta) {
        return Err(Error::InvalidArgument("angles must be strictly increasing".into()));
    }
    let triples: Vec<ConvexityTriple> = points
        .windows(3)
        .map(|w| {
            let (p1, p2, p3) = (w[0], w[1], w[2]);
            let s = (p3.theta - p1.theta).sin();
            let a = (p3.theta - p2.theta).sin() / s;
            let b = (p2.theta - p1.theta).sin() / s;
            let chord = a * p1.mu + b * p3.mu;
            let se = (p2.stderr.powi(2) + (a * p1.stderr).powi(2) + (b * p3.stderr).powi(2)).sqrt();
            let slack = 2.0 * se + 1e-12;
            ConvexityTriple {
                thetas: [p1.theta, p2.theta, p3.theta],
                middle: p2.mu,
                chord,
                slack,
                ok: p2.mu <= chord + slack,
            }
        })
        .collect();
    Ok(ConvexityReport {
        passes: triples.iter().all(|t| t.ok),
        triples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryPair {
    pub theta: f64,
    pub mirror: f64,
    pub difference: f64,
    pub half_width: f64,
    pub ok: bool,
}

/// `mu(theta)` against `mu(pi/2 - theta)` for every mirrored pair present.
pub fn symmetry_check(points: &[MuPoint], level: f64) -> Vec<SymmetryPair> {
    let z = crate::stats::z_two_sided(level);
    let mut out = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if p.theta >= FRAC_PI_4 - 1e-12 {
            continue;
        }
        let mirror = FRAC_PI_2 - p.theta;
        if let Some(q) = points[i + 1..].iter().find(|q| (q.theta - mirror).abs() < 1e-9) {
            let difference = p.mu - q.mu;
            let half_width = z * p.stderr.hypot(q.stderr) + 1e-12;
            out.push(SymmetryPair {
                theta: p.theta,
                mirror: q.theta,
                difference,
                half_width,
                ok: difference.abs() <= half_width,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub p: f64,
    pub estimate: MuEstimate,
    /// Mean `T` rises at every step of the schedule.
    pub strictly_increasing: bool,
    /// Mean `T / r` at the last radius over its value at the first.
    pub ratio_last_first: f64,
    /// Slope of `log mean T` against `log r`.
    pub loglog_slope: f64,
}

/// Growth of `T(0, (r, pi/4))` for Bernoulli 0/1 weights at `F(0) = p`.
pub fn critical_divergence(
    p: f64,
    r_schedule: &[f64],
    replicates: usize,
    master_seed: u64,
) -> Result<CriticalReport> {
    if r_schedule.len() < 2 {
        return Err(Error::InvalidArgument("need at least two radii".into()));
    }
    let dist = EdgeTimeDistribution::bernoulli(p)?;
    let estimate = estimate_mu(&dist, FRAC_PI_4, r_schedule, replicates, master_seed)?;
    let means: Vec<f64> = estimate.cells.iter().map(|c| c.t.mean).collect();
    let strictly_increasing = means.windows(2).all(|w| w[1] > w[0]);
    let first = &estimate.cells[0].t_over_r.mean;
    let ratio_last_first = estimate.last().t_over_r.mean / first;
    let xs: Vec<f64> = r_schedule.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let loglog_slope = linear_fit(&xs, &ys).map_or(f64::NAN, |f| f.slope);
    Ok(CriticalReport {
        p,
        estimate,
        strictly_increasing,
        ratio_last_first,
        loglog_slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Subcritical,
    Critical,
    Supercritical,
}

/// What the phase predicts for `mu(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Positive,
    Vanishing,
    /// Too close to a cone edge to call.
    Unasserted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaVerdict {
    pub theta: f64,
    pub expectation: Expectation,
    pub lower_bound: f64,
    pub decay_exponent: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseBudget {
    pub r_schedule: Vec<f64>,
    pub replicates: usize,
    pub master_seed: u64,
    /// `|F(0) - p_c|` below this is too close to call.
    pub tolerance: f64,
    /// Angles within this distance of a cone edge are not asserted.
    pub edge_margin: f64,
    pub cone_levels: usize,
    pub cone_replicates: usize,
    pub force: Option<Phase>,
}

impl PhaseBudget {
    pub fn new(master_seed: u64) -> Self {
        PhaseBudget {
            r_schedule: vec![64.0, 128.0, 256.0, 512.0],
            replicates: DEFAULT_REPLICATES,
            master_seed,
            tolerance: 0.01,
            edge_margin: 0.05,
            cone_levels: 10_000,
            cone_replicates: 50,
            force: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub distribution: String,
    pub f0: f64,
    pub p_c_hat: f64,
    pub phase: Phase,
    pub cone: Option<ConeEstimate>,
    pub mu: Vec<MuEstimate>,
    pub verdicts: Vec<ThetaVerdict>,
    pub consistent: bool,
}

/// A vanishing time constant: `mean T / r` falls at least like `r^{-1/4}`
/// across the schedule, or is identically zero.
pub const VANISHING_EXPONENT: f64 = -0.25;

pub fn classify_phase(
    dist: &EdgeTimeDistribution,
    p_c_hat: f64,
    thetas: &[f64],
    budget: &PhaseBudget,
) -> Result<PhaseReport> {
    let f0 = dist.atom_at_zero();
    let phase = match budget.force {
        Some(phase) => phase,
        None if (f0 - p_c_hat).abs() < budget.tolerance => {
            return Err(Error::Inconclusive(format!(
                "F(0) = {f0} is within {} of the critical estimate {p_c_hat}",
                budget.tolerance
            )))
        }
        None if f0 < p_c_hat => Phase::Subcritical,
        None => Phase::Supercritical,
    };
    let cone = match phase {
        Phase::Subcritical => None,
        Phase::Critical => Some(ConeEstimate {
            p: f0,
            alpha_hat: 0.0,
            alpha_stderr: 0.0,
            theta_minus: FRAC_PI_4,
            theta_plus: FRAC_PI_4,
        }),
        Phase::Supercritical => estimate_cone(
            f0,
            budget.cone_levels,
            budget.cone_replicates,
            DEFAULT_MARGIN,
            budget.master_seed,
        )?,
    };
    let mu = estimate_mu_grid(dist, thetas, &budget.r_schedule, budget.replicates, budget.master_seed)?;
    let verdicts: Vec<ThetaVerdict> = mu
        .iter()
        .map(|e| {
            let expectation = match &cone {
                None => Expectation::Positive,
                Some(_) if phase == Phase::Critical => {
                    let off = (e.theta - FRAC_PI_4).abs();
                    if off < 1e-12 {
                        Expectation::Vanishing
                    } else if off > budget.edge_margin {
                        Expectation::Positive
                    } else {
                        Expectation::Unasserted
                    }
                }
                Some(c) => {
                    let m = budget.edge_margin;
                    if c.theta_minus + m <= e.theta && e.theta <= c.theta_plus - m {
                        Expectation::Vanishing
                    } else if e.theta < c.theta_minus - m || e.theta > c.theta_plus + m {
                        Expectation::Positive
                    } else {
                        Expectation::Unasserted
                    }
                }
            };
            let lower_bound = e.lower_bound(CONFIDENCE);
            let decay_exponent = e.decay_exponent();
            let vanishing = e.cells.iter().all(|c| c.t_over_r.mean == 0.0)
                || decay_exponent.is_some_and(|s| s <= VANISHING_EXPONENT);
            let ok = match expectation {
                Expectation::Positive => lower_bound > 0.0,
                Expectation::Vanishing => vanishing,
                Expectation::Unasserted => true,
            };
            ThetaVerdict {
                theta: e.theta,
                expectation,
                lower_bound,
                decay_exponent,
                ok,
            }
        })
        .collect();
    Ok(PhaseReport {
        distribution: dist.id(),
        f0,
        p_c_hat,
        phase,
        consistent: verdicts.iter().all(|v| v.ok),
        cone,
        mu,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_cone(p: f64) -> ConeEstimate {
        ConeEstimate {
            p,
            alpha_hat: 1.0,
            alpha_stderr: 0.0,
            theta_minus: 0.0,
            theta_plus: FRAC_PI_2,
        }
    }

    #[test]
    fn point_mass_time_constant() {
        let c = 1.5;
        let d = EdgeTimeDistribution::point_mass(c).unwrap();
        let sched = [10.0, 40.0, 160.0];
        for theta in default_theta_grid() {
            let e = estimate_mu(&d, theta, &sched, 5, 1).unwrap();
            for cell in &e.cells {
                let (x, y) = cell.target;
                assert_eq!(cell.t.stderr, 0.0);
                assert_eq!(cell.t.mean, c * (x + y) as f64);
                let exact = c * (theta.cos() + theta.sin());
                assert!((cell.t_over_r.mean - exact).abs() <= 2.0 * c / cell.r);
            }
        }
        let e = estimate_mu(&d, 0.0, &[7.0, 64.0], 3, 1).unwrap();
        assert_eq!(e.mu_hat, c);
        let e = estimate_mu(&d, FRAC_PI_2, &[64.0], 3, 1).unwrap();
        assert_eq!(e.mu_hat, c);
    }

    #[test]
    fn all_zero_weights() {
        let d = EdgeTimeDistribution::bernoulli(1.0).unwrap();
        let e = estimate_mu(&d, 0.7, &[32.0, 64.0], 10, 2).unwrap();
        assert_eq!(e.mu_hat, 0.0);
        assert!(e.nonincreasing);
    }

    #[test]
    fn schedule_validation() {
        let d = EdgeTimeDistribution::point_mass(1.0).unwrap();
        assert!(estimate_mu(&d, 0.1, &[4.0, 4.0], 2, 1).is_err());
        assert!(estimate_mu(&d, 0.1, &[], 2, 1).is_err());
        assert!(estimate_mu(&d, 2.0, &[4.0], 2, 1).is_err());
        assert!(estimate_mu(&d, 0.1, &[4.0], 0, 1).is_err());
    }

    #[test]
    fn subcritical_mu_is_positive_on_the_diagonal() {
        let d = EdgeTimeDistribution::bernoulli(0.4).unwrap();
        let e = estimate_mu(&d, FRAC_PI_4, &[128.0, 512.0], 200, 3).unwrap();
        assert!(e.lower_bound(CONFIDENCE) > 0.0);
        assert!(e.nonincreasing);
    }

    #[test]
    fn tail_trivial_cases() {
        let one = EdgeTimeDistribution::point_mass(1.0).unwrap();
        let t = tail_probability(&one, 0.0, 0.5, 20.0, 50, 1).unwrap();
        assert_eq!((t.hits, t.frequency), (0, 0.0));
        assert!(t.ci.0 == 0.0 && t.ci.1 > 0.0);
        let zero = EdgeTimeDistribution::bernoulli(1.0).unwrap();
        let t = tail_probability(&zero, 0.3, 1e-6, 20.0, 50, 1).unwrap();
        assert_eq!(t.frequency, 1.0);
        assert!(tail_probability(&zero, 0.3, 0.0, 20.0, 50, 1).is_err());
    }

    #[test]
    fn moments_require_the_cone() {
        let zero = EdgeTimeDistribution::bernoulli(1.0).unwrap();
        let m = moment_plateau(&zero, 0.5, 2, &[16.0, 32.0], 20, 1, 0.6447, &full_cone(1.0)).unwrap();
        assert!(m.cells.iter().all(|c| c.moment.mean == 0.0));
        assert!(m.bounded);

        let d = EdgeTimeDistribution::bernoulli(0.8).unwrap();
        let cone = ConeEstimate {
            p: 0.8,
            alpha_hat: 0.58,
            alpha_stderr: 0.0,
            theta_minus: 0.26,
            theta_plus: FRAC_PI_2 - 0.26,
        };
        assert!(moment_plateau(&d, 0.1, 1, &[16.0], 5, 1, 0.6447, &cone).is_err());
        let sub = EdgeTimeDistribution::bernoulli(0.5).unwrap();
        assert!(moment_plateau(&sub, FRAC_PI_4, 1, &[16.0], 5, 1, 0.6447, &cone).is_err());
        assert!(moment_plateau(&d, FRAC_PI_4, 1, &[16.0, 32.0], 50, 1, 0.6447, &cone).is_ok());
    }

    #[test]
    fn sigma_trivial_cases() {
        let zero = EdgeTimeDistribution::bernoulli(1.0).unwrap();
        let s = sigma_tail(&zero, 0.4, 50.0, 20, 1).unwrap();
        assert_eq!(s.survival, vec![(0, 1.0)]);
        let exp = EdgeTimeDistribution::exponential(1.0).unwrap();
        let s = sigma_tail(&exp, 0.4, 50.0, 20, 1).unwrap();
        let k = (s.target.0 + s.target.1) as u32;
        assert_eq!(s.survival.last().unwrap(), &(k, 1.0));
    }

    #[test]
    fn convexity_examples() {
        let grid = default_theta_grid();
        let l1: Vec<MuPoint> = grid
            .iter()
            .map(|&t| MuPoint {
                theta: t,
                mu: t.cos() + t.sin(),
                stderr: 0.0,
            })
            .collect();
        assert!(convexity_check(&l1).unwrap().passes);
        let zeros: Vec<MuPoint> = grid.iter().map(|&t| MuPoint { theta: t, mu: 0.0, stderr: 0.0 }).collect();
        assert!(convexity_check(&zeros).unwrap().passes);
        let mut bump = l1.clone();
        bump[4].mu += 0.1;
        assert!(!convexity_check(&bump).unwrap().passes);
        assert!(convexity_check(&l1[..4]).is_err());
    }

    #[test]
    fn shift_law_per_replicate() {
        let base = EdgeTimeDistribution::atoms(vec![(0.0, 0.5), (1.0, 0.3), (2.0, 0.2)]).unwrap();
        let a = 0.75;
        let shifted = base.shift(a).unwrap();
        for theta in [0.0, 0.5, FRAC_PI_4, 1.2] {
            let e0 = estimate_mu(&base, theta, &[20.0, 50.0], 30, 9).unwrap();
            let e1 = estimate_mu(&shifted, theta, &[20.0, 50.0], 30, 9).unwrap();
            for (c0, c1) in e0.cells.iter().zip(&e1.cells) {
                let (x, y) = c0.target;
                for (t0, t1) in c0.times.iter().zip(&c1.times) {
                    assert!((t1 - t0 - a * (x + y) as f64).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn dominance_orders_every_replicate() {
        let f1 = EdgeTimeDistribution::bernoulli(0.5).unwrap();
        let f2 = EdgeTimeDistribution::bernoulli(0.7).unwrap();
        let e1 = estimate_mu(&f1, 0.6, &[30.0, 60.0], 50, 4).unwrap();
        let e2 = estimate_mu(&f2, 0.6, &[30.0, 60.0], 50, 4).unwrap();
        for (c1, c2) in e1.cells.iter().zip(&e2.cells) {
            assert!(c1.times.iter().zip(&c2.times).all(|(a, b)| b <= a));
        }
        assert!(e2.mu_hat <= e1.mu_hat);
    }

    #[test]
    fn transposition_symmetry() {
        let d = EdgeTimeDistribution::bernoulli(0.4).unwrap();
        let est = estimate_mu_grid(&d, &default_theta_grid(), &[128.0], 100, 6).unwrap();
        let pts: Vec<MuPoint> = est.iter().map(MuPoint::from).collect();
        let pairs = symmetry_check(&pts, CONFIDENCE);
        assert_eq!(pairs.len(), 4);
        assert!(pairs.iter().all(|p| p.ok));
    }

    #[test]
    fn phase_classification_edges() {
        let mut budget = PhaseBudget::new(1);
        budget.r_schedule = vec![16.0, 32.0];
        budget.replicates = 10;
        budget.cone_levels = 100;
        budget.cone_replicates = 4;
        let near = EdgeTimeDistribution::bernoulli(0.645).unwrap();
        assert!(matches!(
            classify_phase(&near, 0.6447, &coarse_theta_grid(), &budget),
            Err(Error::Inconclusive(_))
        ));
        let zero = EdgeTimeDistribution::bernoulli(1.0).unwrap();
        let rep = classify_phase(&zero, 0.6447, &coarse_theta_grid(), &budget).unwrap();
        assert_eq!(rep.phase, Phase::Supercritical);
        let cone = rep.cone.unwrap();
        assert_eq!((cone.theta_minus, cone.theta_plus), (0.0, FRAC_PI_2));
        assert!(rep.mu.iter().all(|m| m.mu_hat == 0.0));
        assert!(rep.consistent);
        budget.force = Some(Phase::Critical);
        let rep = classify_phase(&near, 0.6447, &coarse_theta_grid(), &budget).unwrap();
        assert_eq!(rep.phase, Phase::Critical);
    }

    #[test]
    fn subcritical_report_has_no_cone() {
        let mut budget = PhaseBudget::new(2);
        budget.r_schedule = vec![64.0, 128.0];
        budget.replicates = 60;
        let d = EdgeTimeDistribution::bernoulli(0.4).unwrap();
        let rep = classify_phase(&d, 0.6447, &coarse_theta_grid(), &budget).unwrap();
        assert_eq!(rep.phase, Phase::Subcritical);
        assert!(rep.cone.is_none());
        assert!(rep.consistent);
    }

    #[test]
    fn critical_means_grow() {
        let rep = critical_divergence(0.6447, &[32.0, 64.0, 128.0, 256.0], 100, 5).unwrap();
        assert!(rep.strictly_increasing);
        assert!(rep.ratio_last_first < 1.0);
    }
}
