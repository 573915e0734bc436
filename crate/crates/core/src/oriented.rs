//! Oriented bond percolation on the rotated lattice
//! `L = {(x, n) : x + n even}` with edges `(x, n) -> (x +- 1, n + 1)`.
//!
//! The vertex `(a, b)` of the first quadrant sits at `(a - b, a + b)` on `L`,
//! so an open NE path of `Z^2` is an open upward path of `L`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::EdgeTimeDistribution;
use crate::error::{Error, Result};
use crate::lattice::{generate_field, nearest_vertex, GridSpec, PolarPoint};
use crate::passage::{compute_tau, TauField};
use crate::rng::{oriented_counter, Lane, StreamKey};
use crate::stats::{mean_se, wilson, z_two_sided, MeanSe};

/// Sites kept to the left of the right edge when following a half-line
/// source; everything further left is treated as occupied.
pub const DEFAULT_MARGIN: usize = 200;

/// Multiplies an edge speed measured in `L` units to get the `alpha_p` that
/// enters the cone formula. Fixed by requiring `alpha = 1` (all edges open)
/// to give the full quadrant.
pub const CONVENTION_SCALE: f64 = FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    /// The single site `{0}`.
    Origin,
    /// The even sites of `(-inf, 0]`, followed within `margin` of the edge.
    HalfLine { margin: usize },
}

/// The occupied sites `xi_n` at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontState {
    level: u64,
    lo: i64,
    bits: Vec<bool>,
    source: Source,
}

impl FrontState {
    pub fn origin() -> Self {
        FrontState {
            level: 0,
            lo: 0,
            bits: vec![true],
            source: Source::Origin,
        }
    }

    pub fn half_line(margin: usize) -> Self {
        let lo = -(margin as i64);
        let bits = (lo..=0).map(|x| x % 2 == 0).collect();
        FrontState {
            level: 0,
            lo,
            bits,
            source: Source::HalfLine { margin },
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Left end of the explicitly stored window.
    pub fn window_start(&self) -> i64 {
        self.lo
    }

    pub fn is_dead(&self) -> bool {
        self.source == Source::Origin && self.bits.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        if x < self.lo {
            return matches!(self.source, Source::HalfLine { .. })
                && (x - self.level as i64).rem_euclid(2) == 0;
        }
        self.bits.get((x - self.lo) as usize).copied().unwrap_or(false)
    }

    /// Explicitly stored occupied sites, increasing.
    pub fn occupied(&self) -> impl Iterator<Item = i64> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| self.lo + i as i64)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn right_edge(&self) -> RightEdge {
        match self.bits.iter().rposition(|&b| b) {
            Some(i) => RightEdge::Finite(self.lo + i as i64),
            None => match self.source {
                Source::Origin => RightEdge::NegInfinity,
                // largest site of the right parity left of the window
                Source::HalfLine { .. } => {
                    let x = self.lo - 1;
                    let x = if (x - self.level as i64).rem_euclid(2) == 0 { x } else { x - 1 };
                    RightEdge::Finite(x)
                }
            },
        }
    }
}

/// Whether the edge leaving `(x, level)` is open at density `p`. Sharing the
/// key across `p` couples the configurations monotonically.
#[inline]
pub fn edge_open(key: &StreamKey, x: i64, level: u64, rightward: bool, p: f64) -> bool {
    key.uniform(oriented_counter(x, level, rightward)) < p
}

/// One level of the front.
pub fn evolve_front(state: &FrontState, p: f64, key: &StreamKey) -> FrontState {
    let n = state.level;
    if state.is_dead() {
        return FrontState {
            level: n + 1,
            ..state.clone()
        };
    }
    let start = state.lo - 1;
    let end = state.lo + state.bits.len() as i64;
    let mut bits = Vec::with_capacity(state.bits.len() + 2);
    for x in start..=end {
        let from_left = state.contains(x - 1) && edge_open(key, x - 1, n, true, p);
        let v = from_left || (state.contains(x + 1) && edge_open(key, x + 1, n, false, p));
        bits.push(v);
    }
    let mut next = FrontState {
        level: n + 1,
        lo: start,
        bits,
        source: state.source,
    };
    next.trim();
    next
}

impl FrontState {
    fn trim(&mut self) {
        let last = self.bits.iter().rposition(|&b| b);
        match self.source {
            Source::Origin => match last {
                None => self.bits.clear(),
                Some(last) => {
                    let first = self.bits.iter().position(|&b| b).unwrap();
                    self.bits.truncate(last + 1);
                    self.bits.drain(..first);
                    self.lo += first as i64;
                }
            },
            Source::HalfLine { margin } => {
                if let Some(last) = last {
                    self.bits.truncate(last + 1);
                }
                let RightEdge::Finite(r) = self.right_edge() else {
                    unreachable!("half-line fronts never die")
                };
                let cut = (r - margin as i64 - self.lo).max(0) as usize;
                if cut > 0 {
                    let cut = cut.min(self.bits.len());
                    self.bits.drain(..cut);
                    self.lo += cut as i64;
                }
            }
        }
    }
}

/// `r_n`, with an explicit value for an extinct front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RightEdge {
    NegInfinity,
    Finite(i64),
}

impl RightEdge {
    pub fn finite(self) -> Option<i64> {
        match self {
            RightEdge::Finite(r) => Some(r),
            RightEdge::NegInfinity => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RightEdgeTrace {
    pub p: f64,
    /// `r_1, ..., r_n`.
    pub r: Vec<RightEdge>,
    pub master_seed: u64,
    pub replicate: u64,
}

impl RightEdgeTrace {
    pub fn last(&self) -> RightEdge {
        *self.r.last().expect("trace has at least one level")
    }
}

pub fn right_edge_trace(
    p: f64,
    n: usize,
    margin: usize,
    master_seed: u64,
    replicate: u64,
) -> Result<RightEdgeTrace> {
    if n == 0 {
        return Err(Error::InvalidArgument("right edge trace needs n >= 1".into()));
    }
    check_probability(p)?;
    let key = StreamKey::new(master_seed, replicate, Lane::OrientedEdge);
    let mut state = FrontState::half_line(margin);
    let mut r = Vec::with_capacity(n);
    for _ in 0..n {
        state = evolve_front(&state, p, &key);
        r.push(state.right_edge());
    }
    Ok(RightEdgeTrace {
        p,
        r,
        master_seed,
        replicate,
    })
}

/// Final right edge only, without storing the trace.
pub fn final_right_edge(p: f64, n: usize, margin: usize, key: &StreamKey) -> i64 {
    let mut state = FrontState::half_line(margin);
    for _ in 0..n {
        state = evolve_front(&state, p, key);
    }
    state.right_edge().finite().expect("half-line fronts never die")
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")))
    }
}

/// `r_n / n` across replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub p: f64,
    pub n: usize,
    pub alpha: MeanSe,
    pub final_edges: Vec<i64>,
}

pub fn estimate_alpha(
    p: f64,
    n: usize,
    replicates: usize,
    margin: usize,
    master_seed: u64,
) -> Result<AlphaEstimate> {
    if n == 0 || replicates == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and at least one replicate".into()));
    }
    check_probability(p)?;
    let final_edges: Vec<i64> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let key = StreamKey::new(master_seed, rep, Lane::OrientedEdge);
            final_right_edge(p, n, margin, &key)
        })
        .collect();
    let ratios: Vec<f64> = final_edges.iter().map(|&r| r as f64 / n as f64).collect();
    Ok(AlphaEstimate {
        p,
        n,
        alpha: mean_se(&ratios),
        final_edges,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcConfig {
    pub n: usize,
    pub tolerance: f64,
    pub bracket: (f64, f64),
    pub replicates: usize,
    /// Largest `n` tried before giving up on a classification.
    pub max_n: usize,
    pub margin: usize,
    pub level: f64,
    pub master_seed: u64,
}

impl PcConfig {
    pub fn new(n: usize, tolerance: f64, master_seed: u64) -> Self {
        PcConfig {
            n,
            tolerance,
            bracket: (0.0, 1.0),
            replicates: 32,
            max_n: 8 * n,
            margin: DEFAULT_MARGIN,
            level: 0.99,
            master_seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Drift {
    Subcritical,
    Supercritical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcStep {
    pub p: f64,
    pub n: usize,
    pub positive: usize,
    pub replicates: usize,
    pub drift: Drift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcEstimate {
    pub p_hat: f64,
    pub bracket: (f64, f64),
    pub steps: Vec<PcStep>,
}

/// Sign of the drift of `r_n` at `p`: the share of replicates with `r_n > 0`
/// must separate from 1/2 at the configured level, otherwise `n` doubles.
pub fn classify_drift(p: f64, cfg: &PcConfig) -> Result<PcStep> {
    let z = z_two_sided(cfg.level);
    let mut n = cfg.n;
    loop {
        let positive = (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|rep| {
                let key = StreamKey::new(cfg.master_seed, rep, Lane::OrientedEdge);
                final_right_edge(p, n, cfg.margin, &key) > 0
            })
            .filter(|&b| b)
            .count();
        let (lo, hi) = wilson(positive, cfg.replicates, z);
        let drift = if lo > 0.5 {
            Some(Drift::Supercritical)
        } else if hi < 0.5 {
            Some(Drift::Subcritical)
        } else {
            None
        };
        if let Some(drift) = drift {
            return Ok(PcStep {
                p,
                n,
                positive,
                replicates: cfg.replicates,
                drift,
            });
        }
        if n * 2 > cfg.max_n {
            return Err(Error::Inconclusive(format!(
                "drift sign at p = {p} unresolved with n = {n} ({positive}/{} positive)",
                cfg.replicates
            )));
        }
        n *= 2;
    }
}

/// Bisection for the critical probability of oriented percolation.
pub fn estimate_pc(cfg: &PcConfig) -> Result<PcEstimate> {
    if !(cfg.tolerance >= 1e-3) {
        return Err(Error::InvalidArgument("tolerance must be >= 1e-3".into()));
    }
    let (mut lo, mut hi) = cfg.bracket;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidArgument(format!("bad bracket {:?}", cfg.bracket)));
    }
    if cfg.n == 0 || cfg.replicates == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and at least one replicate".into()));
    }
    let mut steps = Vec::new();
    // a supercritical lower end means the critical point is not inside
    if lo > 0.0 {
        let first = classify_drift(lo, cfg)?;
        let done = first.drift == Drift::Supercritical;
        steps.push(first);
        if done {
            return Ok(PcEstimate {
                p_hat: lo,
                bracket: (lo, lo),
                steps,
            });
        }
    }
    while hi - lo >= cfg.tolerance {
        let mid = 0.5 * (lo + hi);
        let step = classify_drift(mid, cfg)?;
        match step.drift {
            Drift::Supercritical => hi = mid,
            Drift::Subcritical => lo = mid,
        }
        steps.push(step);
    }
    Ok(PcEstimate {
        p_hat: 0.5 * (lo + hi),
        bracket: (lo, hi),
        steps,
    })
}

/// Cone angles `(theta_minus, theta_plus)` for an edge speed in `L` units.
pub fn cone_angles(alpha_hat: f64, convention_scale: f64) -> Result<(f64, f64)> {
    const ROUNDING: f64 = 1e-12;
    let a = convention_scale * alpha_hat / SQRT_2;
    let snap = |v: f64| if v.abs() < ROUNDING { 0.0 } else { v };
    let lower = snap(0.5 - a);
    let upper = snap(0.5 + a);
    if lower < 0.0 || upper < 0.0 || !alpha_hat.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "edge speed {alpha_hat} gives a negative cone ratio"
        )));
    }
    if alpha_hat < -ROUNDING {
        return Err(Error::InvalidArgument(format!(
            "edge speed {alpha_hat} < 0: no cone below criticality"
        )));
    }
    let minus = lower.atan2(upper).clamp(0.0, FRAC_PI_2);
    let plus = upper.atan2(lower).clamp(0.0, FRAC_PI_2);
    Ok((minus, plus))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeEstimate {
    pub p: f64,
    pub alpha_hat: f64,
    pub alpha_stderr: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
}

/// Cone from the measured edge speed; `None` when the speed is negative.
pub fn estimate_cone(
    p: f64,
    n: usize,
    replicates: usize,
    margin: usize,
    master_seed: u64,
) -> Result<Option<ConeEstimate>> {
    let est = estimate_alpha(p, n, replicates, margin, master_seed)?;
    let alpha = est.alpha.mean.min(1.0);
    if alpha < 0.0 {
        return Ok(None);
    }
    let (theta_minus, theta_plus) = cone_angles(alpha, CONVENTION_SCALE)?;
    Ok(Some(ConeEstimate {
        p,
        alpha_hat: alpha,
        alpha_stderr: est.alpha.stderr,
        theta_minus,
        theta_plus,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClusterSize {
    Finite(u64),
    Exceeded,
}

/// `|C_0|`, the number of sites reachable from the origin.
pub fn cluster_size(p: f64, cap: u64, master_seed: u64, replicate: u64) -> Result<ClusterSize> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("cluster size needs p < 1, got {p}")));
    }
    let key = StreamKey::new(master_seed, replicate, Lane::OrientedEdge);
    let mut state = FrontState::origin();
    let mut total = 1u64;
    loop {
        if total >= cap {
            return Ok(ClusterSize::Exceeded);
        }
        state = evolve_front(&state, p, &key);
        if state.is_dead() {
            return Ok(ClusterSize::Finite(total));
        }
        total += state.count() as u64;
    }
}

/// Smallest and largest angle among vertices at radius `r` that are joined
/// to the origin by a zero-time path.
pub fn zero_fan_extent(tf: &TauField, r: f64) -> Result<Option<(f64, f64)>> {
    let grid = tf.grid();
    let steps = (8.0 * r).ceil().max(1.0) as usize;
    let mut extent: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let theta = FRAC_PI_2 * i as f64 / steps as f64;
        let (x, y) = nearest_vertex(PolarPoint::new(r, theta)?);
        grid.check(x, y)?;
        if tf.time(x, y) == 0 {
            let angle = (y as f64).atan2(x as f64);
            extent = Some(match extent {
                None => (angle, angle),
                Some((a, b)) => (a.min(angle), b.max(angle)),
            });
        }
    }
    Ok(extent)
}

/// Frequency of an open NE path from the origin to some `u` with
/// `u_1 >= u1` and slope `u_2 / u_1 <= a`, searched for `u_1 <= 2 u1`.
pub fn slope_connectivity(
    p: f64,
    a: f64,
    u1: usize,
    theta_minus: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<f64> {
    check_probability(p)?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("slope bound {a} must be positive")));
    }
    // at p = 1 the cone is the whole quadrant and any slope is allowed
    if p < 1.0 && a >= theta_minus.tan() {
        return Err(Error::InvalidArgument(format!(
            "slope bound {a} is not below the cone edge tan({theta_minus})"
        )));
    }
    if u1 == 0 {
        return Ok(1.0);
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let width = 2 * u1;
    let height = ((a * width as f64).floor() as usize).max(1);
    let grid = GridSpec::new(width, height)?;
    let dist = EdgeTimeDistribution::bernoulli(p)?;
    let hits = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let tf = compute_tau(&generate_field(grid, &dist, master_seed, rep));
            (u1..=width).any(|x| {
                let ymax = ((a * x as f64).floor() as usize).min(height);
                (0..=ymax).any(|y| tf.time(x, y) == 0)
            })
        })
        .filter(|&b| b)
        .count();
    Ok(hits as f64 / replicates as f64)
}
