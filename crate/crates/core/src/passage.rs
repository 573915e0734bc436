//! Exact directed passage times by dynamic programming.
//!
//! Every NE path to `(x, y)` enters through the west or the south neighbour,
//! so one row-major sweep gives `T(0, v)` for the whole window.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{nearest_vertex, Dir, Edge, EdgeField, EdgeWeights, GridSpec, PolarPoint, Rerooted, Thresholded};

/// Back-pointer to the predecessor that achieves the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parent {
    Origin,
    FromWest,
    FromSouth,
}

/// `T(0, v)` for every vertex of a window, with back-pointers.
#[derive(Debug, Clone, PartialEq)]
pub struct PassageField {
    grid: GridSpec,
    times: Vec<f64>,
    parent: Vec<Parent>,
}

impl PassageField {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn time(&self, x: usize, y: usize) -> f64 {
        self.times[self.grid.vertex_index(x, y)]
    }

    pub fn parent(&self, x: usize, y: usize) -> Parent {
        self.parent[self.grid.vertex_index(x, y)]
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Full-table DP over `grid` for any weight source.
pub fn compute_passage_with(grid: GridSpec, w: &impl EdgeWeights) -> PassageField {
    let n = grid.vertex_count();
    let mut times = vec![0.0; n];
    let mut parent = vec![Parent::Origin; n];
    let stride = grid.width + 1;
    for y in 0..=grid.height {
        for x in 0..=grid.width {
            let i = y * stride + x;
            if x == 0 && y == 0 {
                continue;
            }
            let west = if x > 0 {
                times[i - 1] + w.east(x - 1, y)
            } else {
                f64::INFINITY
            };
            let south = if y > 0 {
                times[i - stride] + w.north(x, y - 1)
            } else {
                f64::INFINITY
            };
            // ties resolve to the south predecessor, so optimal paths take
            // their east steps first
            if south <= west {
                times[i] = south;
                parent[i] = Parent::FromSouth;
            } else {
                times[i] = west;
                parent[i] = Parent::FromWest;
            }
        }
    }
    PassageField {
        grid,
        times,
        parent,
    }
}

pub fn compute_passage(field: &EdgeField) -> PassageField {
    compute_passage_with(field.grid(), field)
}

/// Passage times from `origin` instead of `(0, 0)`, over the part of the
/// window that lies NE of it. Vertex `(x, y)` of the result is
/// `origin + (x, y)` of the input.
pub fn compute_passage_from(field: &EdgeField, origin: (usize, usize)) -> Result<PassageField> {
    let g = field.grid();
    if origin.0 >= g.width || origin.1 >= g.height {
        return Err(Error::InvalidArgument(format!(
            "re-rooting at {origin:?} leaves an empty window"
        )));
    }
    let sub = GridSpec::new(g.width - origin.0, g.height - origin.1)?;
    Ok(compute_passage_with(sub, &Rerooted { inner: field, origin }))
}

/// `T(0, v)` at each target using two live rows over the targets' bounding
/// box. Memory is `O(width)`; the values equal the full-table DP because NE
/// paths to `(x, y)` never leave `[0, x] x [0, y]`.
pub fn passage_to_targets(w: &impl EdgeWeights, targets: &[(usize, usize)]) -> Vec<f64> {
    let mut out = vec![0.0; targets.len()];
    if targets.is_empty() {
        return out;
    }
    let max_x = targets.iter().map(|t| t.0).max().unwrap();
    let max_y = targets.iter().map(|t| t.1).max().unwrap();
    let mut by_row: Vec<Vec<(usize, usize)>> = vec![Vec::new(); max_y + 1];
    for (i, &(x, y)) in targets.iter().enumerate() {
        by_row[y].push((i, x));
    }
    let mut prev = vec![0.0f64; max_x + 1];
    let mut cur = vec![0.0f64; max_x + 1];
    for x in 1..=max_x {
        cur[x] = cur[x - 1] + w.east(x - 1, 0);
    }
    for &(i, x) in &by_row[0] {
        out[i] = cur[x];
    }
    for y in 1..=max_y {
        std::mem::swap(&mut prev, &mut cur);
        cur[0] = prev[0] + w.north(0, y - 1);
        for x in 1..=max_x {
            let west = cur[x - 1] + w.east(x - 1, y);
            let south = prev[x] + w.north(x, y - 1);
            cur[x] = if south <= west { south } else { west };
        }
        for &(i, x) in &by_row[y] {
            out[i] = cur[x];
        }
    }
    out
}

/// Deterministic optimal path from the origin to `target`, origin first.
pub fn optimal_path(pf: &PassageField, target: (usize, usize)) -> Result<Vec<(usize, usize)>> {
    pf.grid.check(target.0, target.1)?;
    let mut path = Vec::with_capacity(target.0 + target.1 + 1);
    let (mut x, mut y) = target;
    path.push((x, y));
    loop {
        match pf.parent(x, y) {
            Parent::Origin => break,
            Parent::FromWest => x -= 1,
            Parent::FromSouth => y -= 1,
        }
        path.push((x, y));
    }
    path.reverse();
    Ok(path)
}

/// Sum of edge times along a vertex path of unit NE steps.
pub fn path_weight(w: &impl EdgeWeights, path: &[(usize, usize)]) -> f64 {
    path.windows(2)
        .map(|p| w.weight(step_edge(p[0], p[1])))
        .sum()
}

/// The NE edge joining two consecutive path vertices.
pub fn step_edge(from: (usize, usize), to: (usize, usize)) -> Edge {
    let dir = if to.0 == from.0 + 1 && to.1 == from.1 {
        Dir::East
    } else {
        assert!(to.0 == from.0 && to.1 == from.1 + 1, "not a NE step");
        Dir::North
    };
    Edge {
        x: from.0,
        y: from.1,
        dir,
    }
}

/// Minimum number of positive-time edges on a NE path, `T_tau(0, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauField {
    grid: GridSpec,
    times: Vec<u32>,
    parent: Vec<Parent>,
}

impl TauField {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn time(&self, x: usize, y: usize) -> u32 {
        self.times[self.grid.vertex_index(x, y)]
    }

    pub fn parent(&self, x: usize, y: usize) -> Parent {
        self.parent[self.grid.vertex_index(x, y)]
    }
}

pub fn compute_tau_with(grid: GridSpec, w: &impl EdgeWeights) -> TauField {
    let pf = compute_passage_with(grid, &Thresholded(w));
    TauField {
        grid,
        times: pf.times.iter().map(|&t| t as u32).collect(),
        parent: pf.parent,
    }
}

pub fn compute_tau(field: &EdgeField) -> TauField {
    compute_tau_with(field.grid(), field)
}

/// A vertex set over a grid window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedSet {
    grid: GridSpec,
    members: Vec<bool>,
    threshold: Option<u32>,
}

impl DirectedSet {
    pub fn from_fn(grid: GridSpec, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut members = vec![false; grid.vertex_count()];
        for y in 0..=grid.height {
            for x in 0..=grid.width {
                members[grid.vertex_index(x, y)] = f(x, y);
            }
        }
        DirectedSet {
            grid,
            members,
            threshold: None,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Threshold `t` of the ball that produced this set, if any.
    pub fn threshold(&self) -> Option<u32> {
        self.threshold
    }

    /// Membership; vertices outside the window are non-members.
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.grid.contains(x, y) && self.members[self.grid.vertex_index(x, y)]
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.grid.width + 1;
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// Every member is reached from the origin by a NE path that stays in the
    /// set.
    pub fn is_directly_connected(&self) -> bool {
        if !self.contains(0, 0) {
            return false;
        }
        let g = self.grid;
        let mut reach = vec![false; g.vertex_count()];
        for y in 0..=g.height {
            for x in 0..=g.width {
                let i = g.vertex_index(x, y);
                if !self.members[i] {
                    continue;
                }
                reach[i] = (x == 0 && y == 0)
                    || (x > 0 && reach[i - 1])
                    || (y > 0 && reach[i - g.width - 1]);
                if !reach[i] {
                    return false;
                }
            }
        }
        true
    }

    /// Run-length encoding of each row: alternating run lengths starting
    /// with a non-member run.
    pub fn run_lengths(&self) -> Vec<Vec<usize>> {
        let w = self.grid.width + 1;
        self.members
            .chunks(w)
            .map(|row| {
                let mut runs = Vec::new();
                let mut current = false;
                let mut len = 0;
                for &m in row {
                    if m == current {
                        len += 1;
                    } else {
                        runs.push(len);
                        current = m;
                        len = 1;
                    }
                }
                runs.push(len);
                runs
            })
            .collect()
    }
}

/// `B_tau(t) = {v : T_tau(0, v) <= t}`. Fails if the ball reaches the far
/// edges of the window, where it would no longer match the infinite lattice.
pub fn ball(tf: &TauField, t: u32) -> Result<DirectedSet> {
    let g = tf.grid;
    let set = ball_in_window(tf, t);
    let touches = (0..=g.height).any(|y| set.contains(g.width, y))
        || (0..=g.width).any(|x| set.contains(x, g.height));
    if touches {
        return Err(Error::BallTruncated { t });
    }
    Ok(set)
}

/// `B_tau(t)` intersected with the window. Exact even when the ball itself
/// is unbounded, since NE paths to a window vertex never leave the window.
pub fn ball_in_window(tf: &TauField, t: u32) -> DirectedSet {
    DirectedSet {
        grid: tf.grid,
        members: tf.times.iter().map(|&v| v <= t).collect(),
        threshold: Some(t),
    }
}

/// Directed boundary sets of a vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundaries {
    /// Members with a non-member north or east neighbour in the window.
    pub inner: Vec<(usize, usize)>,
    /// Non-members reached from `inner` by one north or east edge.
    pub outer: Vec<(usize, usize)>,
    /// The NE edges from `inner` to `outer`.
    pub edges: Vec<Edge>,
}

pub fn boundaries(s: &DirectedSet) -> Result<Boundaries> {
    if !s.contains(0, 0) {
        return Err(Error::InvalidArgument("set does not contain the origin".into()));
    }
    let mut inner = Vec::new();
    let mut outer = BTreeSet::new();
    let mut edges = Vec::new();
    for (x, y) in s.iter() {
        let mut on_boundary = false;
        for dir in [Dir::East, Dir::North] {
            let e = Edge { x, y, dir };
            let (hx, hy) = e.head();
            if s.grid.contains(hx, hy) && !s.contains(hx, hy) {
                on_boundary = true;
                outer.insert((hy, hx));
                edges.push(e);
            }
        }
        if on_boundary {
            inner.push((x, y));
        }
    }
    Ok(Boundaries {
        inner,
        outer: outer.into_iter().map(|(y, x)| (x, y)).collect(),
        edges,
    })
}

/// Resolution of the bisection step in [`shape_boundary_radius`].
pub const RHO_RESOLUTION: f64 = 1e-3;

/// Boundary radius of `C_t` along direction `theta`: the distance from the
/// origin of the last member vertex met along the ray. The ray is scanned at
/// unit steps of `r`, then the final member-to-non-member transition is
/// bisected to [`RHO_RESOLUTION`].
pub fn shape_boundary_radius(pf: &PassageField, t: f64, theta: f64) -> Result<f64> {
    let g = pf.grid;
    let member = |r: f64| -> Option<bool> {
        let (x, y) = nearest_vertex(PolarPoint { r, theta });
        g.contains(x, y).then(|| pf.time(x, y) <= t)
    };
    PolarPoint::new(0.0, theta)?;
    let mut last_member = 0.0;
    let mut last_in_window = true;
    let mut r = 0.0;
    while let Some(m) = member(r) {
        if m {
            last_member = r;
        }
        last_in_window = m;
        r += 1.0;
    }
    if last_in_window {
        return Err(Error::RayTruncated { t, theta });
    }
    let (mut lo, mut hi) = (last_member, last_member + 1.0);
    while hi - lo > RHO_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if member(mid) == Some(true) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (x, y) = nearest_vertex(PolarPoint { r: lo, theta });
    Ok((x as f64).hypot(y as f64))
}

/// Copy of `field` that keeps every edge leaving a member of `set` and takes
/// all other edges from `replacement`.
pub fn resample_outside(field: &EdgeField, set: &DirectedSet, replacement: &impl EdgeWeights) -> EdgeField {
    EdgeField::from_fn(field.grid(), |x, y, dir| {
        let e = Edge { x, y, dir };
        if set.contains(x, y) {
            field.weight(e)
        } else {
            replacement.weight(e)
        }
    })
}

/// Both sides of the coupling bound at each target `v`: `T_t(0, v)` and the
/// weight of the `g`-optimal path plus `h` for each of its edges with `t = h`
/// and `g = 0`.
pub fn coupling_bound(t: &EdgeField, g: &EdgeField, h: f64, targets: &[(usize, usize)]) -> Result<Vec<(f64, f64)>> {
    let (pt, pg) = (compute_passage(t), compute_passage(g));
    targets
        .iter()
        .map(|&v| {
            let path = optimal_path(&pg, v)?;
            let penalty = path
                .windows(2)
                .map(|p| step_edge(p[0], p[1]))
                .filter(|&e| t.weight(e) == h && g.weight(e) == 0.0)
                .count() as f64;
            Ok((pt.time(v.0, v.1), path_weight(g, &path) + h * penalty))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::EdgeTimeDistribution;
    use crate::lattice::{generate_field, LazyField};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    // Enumerates every monotone path as a bit string of east/north steps.
    fn brute_force(w: &impl EdgeWeights, x: usize, y: usize) -> f64 {
        let n = x + y;
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != x {
                continue;
            }
            let (mut cx, mut cy, mut total) = (0, 0, 0.0);
            for step in 0..n {
                if mask >> step & 1 == 1 {
                    total += w.east(cx, cy);
                    cx += 1;
                } else {
                    total += w.north(cx, cy);
                    cy += 1;
                }
            }
            best = best.min(total);
        }
        best
    }

    fn grid(w: usize, h: usize) -> GridSpec {
        GridSpec::new(w, h).unwrap()
    }

    #[test]
    fn constant_fields() {
        let g = grid(6, 4);
        let ones = compute_passage(&EdgeField::constant(g, 1.0));
        let zeros = compute_passage(&EdgeField::constant(g, 0.0));
        for y in 0..=4 {
            for x in 0..=6 {
                assert_eq!(ones.time(x, y), (x + y) as f64);
                assert_eq!(zeros.time(x, y), 0.0);
            }
        }
    }

    #[test]
    fn matches_path_enumeration_on_random_3x3() {
        let d = EdgeTimeDistribution::atoms(vec![(0.0, 0.3), (0.5, 0.2), (1.0, 0.3), (2.5, 0.2)]).unwrap();
        let g = grid(3, 3);
        for rep in 0..1000 {
            let f = generate_field(g, &d, 17, rep);
            let pf = compute_passage(&f);
            for y in 0..=3 {
                for x in 0..=3 {
                    assert_eq!(pf.time(x, y), brute_force(&f, x, y));
                }
            }
        }
    }

    #[test]
    fn streaming_matches_full_table() {
        let d = EdgeTimeDistribution::exponential(1.0).unwrap();
        let lazy = LazyField::new(&d, 5, 3);
        let g = grid(40, 30);
        let pf = compute_passage_with(g, &lazy);
        let targets = [(0, 0), (40, 30), (13, 7), (0, 30), (40, 0), (21, 29)];
        let streamed = passage_to_targets(&lazy, &targets);
        for (t, v) in targets.iter().zip(streamed) {
            assert_eq!(pf.time(t.0, t.1), v);
        }
    }

    #[test]
    fn optimal_path_examples() {
        let g = grid(3, 3);
        let pf = compute_passage(&EdgeField::constant(g, 1.0));
        assert_eq!(optimal_path(&pf, (0, 0)).unwrap(), vec![(0, 0)]);
        assert_eq!(
            optimal_path(&pf, (2, 1)).unwrap(),
            vec![(0, 0), (1, 0), (2, 0), (2, 1)]
        );
        assert!(matches!(optimal_path(&pf, (4, 0)), Err(Error::OutsideGrid { .. })));

        let d = EdgeTimeDistribution::exponential(0.7).unwrap();
        for rep in 0..50 {
            let f = generate_field(grid(4, 4), &d, 8, rep);
            let pf = compute_passage(&f);
            for target in [(4, 4), (2, 3), (4, 0)] {
                let path = optimal_path(&pf, target).unwrap();
                assert_eq!(path.len(), target.0 + target.1 + 1);
                assert_eq!(path_weight(&f, &path), pf.time(target.0, target.1));
            }
        }
    }

    #[test]
    fn tau_examples() {
        let g = grid(8, 8);
        let exp = generate_field(g, &EdgeTimeDistribution::exponential(1.0).unwrap(), 1, 0);
        let tf = compute_tau(&exp);
        for y in 0..=8 {
            for x in 0..=8 {
                assert_eq!(tf.time(x, y), (x + y) as u32);
            }
        }
        assert_eq!(compute_tau(&EdgeField::constant(g, 0.0)).time(8, 8), 0);

        let b = generate_field(g, &EdgeTimeDistribution::bernoulli(0.6).unwrap(), 1, 0);
        let (tf, pf) = (compute_tau(&b), compute_passage(&b));
        for y in 0..=8 {
            for x in 0..=8 {
                assert_eq!(tf.time(x, y) as f64, pf.time(x, y));
                assert!(tf.time(x, y) as usize <= x + y);
            }
        }
    }

    #[test]
    fn ball_examples() {
        let g = grid(10, 10);
        let zero = compute_tau(&EdgeField::constant(g, 0.0));
        assert_eq!(ball(&zero, 0), Err(Error::BallTruncated { t: 0 }));

        let ones = compute_tau(&EdgeField::constant(g, 1.0));
        let b = ball(&ones, 2).unwrap();
        assert_eq!(b.len(), 6);
        assert!(b.iter().all(|(x, y)| x + y <= 2));
        assert_eq!(b.threshold(), Some(2));

        let d = EdgeTimeDistribution::bernoulli(0.5).unwrap();
        for rep in 0..50 {
            let tf = compute_tau(&generate_field(grid(150, 150), &d, 4, rep));
            let mut prev: Option<DirectedSet> = None;
            for t in 0..6 {
                let b = ball(&tf, t).unwrap();
                if let Some(p) = &prev {
                    assert!(p.iter().all(|(x, y)| b.contains(x, y)));
                }
                prev = Some(b);
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let g = grid(10, 10);
        let k = 4;
        let tri = DirectedSet::from_fn(g, |x, y| x + y <= k);
        let b = boundaries(&tri).unwrap();
        assert!(b.inner.iter().all(|&(x, y)| x + y == k));
        assert_eq!(b.inner.len(), k + 1);
        assert!(b.outer.iter().all(|&(x, y)| x + y == k + 1));
        assert_eq!(b.outer.len(), k + 2);

        let single = DirectedSet::from_fn(g, |x, y| x == 0 && y == 0);
        let b = boundaries(&single).unwrap();
        assert_eq!(b.inner, vec![(0, 0)]);
        assert_eq!(b.outer, vec![(1, 0), (0, 1)]);
        assert_eq!(b.edges.len(), 2);

        let empty = DirectedSet::from_fn(g, |x, _| x == 3);
        assert!(boundaries(&empty).is_err());
    }

    #[test]
    fn boundary_values_on_sampled_balls() {
        let d = EdgeTimeDistribution::bernoulli(0.7).unwrap();
        for rep in 0..40 {
            let tf = compute_tau(&generate_field(grid(80, 80), &d, 12, rep));
            for t in [0, 3, 9] {
                let Ok(b) = ball(&tf, t) else { continue };
                assert!(b.is_directly_connected());
                let bd = boundaries(&b).unwrap();
                assert!(bd.inner.iter().all(|&(x, y)| tf.time(x, y) == t));
                assert!(bd.outer.iter().all(|&(x, y)| tf.time(x, y) == t + 1));
            }
        }
    }

    #[test]
    fn shape_radius_on_constant_field() {
        let g = grid(40, 40);
        let pf = compute_passage(&EdgeField::constant(g, 1.0));
        for k in [3usize, 10, 17] {
            let rho = shape_boundary_radius(&pf, k as f64, 0.0).unwrap();
            assert_eq!(rho, k as f64);
            let rho = shape_boundary_radius(&pf, k as f64, FRAC_PI_4).unwrap();
            assert!((rho - k as f64 / 2f64.sqrt()).abs() <= 1.0);
        }
        assert!(matches!(
            shape_boundary_radius(&pf, 100.0, 0.3),
            Err(Error::RayTruncated { .. })
        ));
    }

    #[test]
    fn shape_radius_inside_cone_is_unbounded() {
        // Inside the percolation cone the shape outruns any window.
        let d = EdgeTimeDistribution::bernoulli(0.8).unwrap();
        let mut truncated = 0;
        for rep in 0..10 {
            let pf = compute_passage(&generate_field(grid(256, 256), &d, 3, rep));
            for t in [50.0, 100.0, 200.0] {
                if shape_boundary_radius(&pf, t, FRAC_PI_4).is_err() {
                    truncated += 1;
                }
            }
        }
        assert_eq!(truncated, 30);
        // Off the cone rho(theta)/t settles.
        let sub = EdgeTimeDistribution::bernoulli(0.4).unwrap();
        let pf = compute_passage(&generate_field(grid(512, 512), &sub, 3, 0));
        let r50 = shape_boundary_radius(&pf, 50.0, 0.0).unwrap() / 50.0;
        let r100 = shape_boundary_radius(&pf, 100.0, 0.0).unwrap() / 100.0;
        assert!((r50 - r100).abs() < 0.5);
    }

    #[test]
    fn subadditivity_with_shared_field() {
        let d = EdgeTimeDistribution::atoms(vec![(0.0, 0.5), (1.0, 0.3), (3.0, 0.2)]).unwrap();
        for rep in 0..20 {
            let f = generate_field(grid(30, 30), &d, 21, rep);
            let pf = compute_passage(&f);
            for u in [(5, 3), (10, 10), (0, 7)] {
                let from_u = compute_passage_from(&f, u).unwrap();
                for v in [(4, 4), (12, 9), (20, 0)] {
                    let (tx, ty) = (u.0 + v.0, u.1 + v.1);
                    assert!(pf.time(tx, ty) <= pf.time(u.0, u.1) + from_u.time(v.0, v.1));
                }
            }
        }
    }

    #[test]
    fn run_lengths_encode_rows() {
        let s = DirectedSet::from_fn(grid(4, 1), |x, y| y == 0 && x <= 1);
        assert_eq!(s.run_lengths(), vec![vec![0, 2, 3], vec![5]]);
    }

    proptest! {
        #[test]
        fn dp_matches_enumeration_up_to_4x4(
            w in 1usize..=4, h in 1usize..=4,
            weights in proptest::collection::vec(0.0f64..3.0, 40),
        ) {
            let mut it = weights.into_iter().cycle();
            let f = EdgeField::from_fn(grid(w, h), |_, _, _| it.next().unwrap());
            let pf = compute_passage(&f);
            for y in 0..=h {
                for x in 0..=w {
                    prop_assert_eq!(pf.time(x, y), brute_force(&f, x, y));
                }
            }
        }

        #[test]
        fn lowering_an_edge_never_raises_passage(
            seed in 0u64..1000, pick in 0usize..60, factor in 0.0f64..1.0,
        ) {
            let d = EdgeTimeDistribution::exponential(1.0).unwrap();
            let f = generate_field(grid(5, 5), &d, seed, 0);
            let e = f.edges().nth(pick).unwrap();
            let mut lowered = f.clone();
            lowered.set(e, f.weight(e) * factor);
            let (a, b) = (compute_passage(&f), compute_passage(&lowered));
            for (x, y) in a.times().iter().zip(b.times()) {
                prop_assert!(y <= x);
            }
        }
    }
}
