//! Directed Eden growth: a square is attached across a uniformly chosen
//! north or east boundary edge of the current cluster. Cell `(i, j)` is the
//! unit square with lower-left corner `(i, j)`.
//!
//! The same law arises from first passage with independent exponential
//! clocks on NE edges: every exposed edge rings at rate 1, so a cell with two
//! exposed edges is twice as likely to be next.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::EdgeTimeDistribution;
use crate::error::{Error, Result};
use crate::lattice::{Dir, EdgeWeights, GridSpec, LazyField};
use crate::rng::{Lane, StreamKey};

pub type Cell = (usize, usize);

fn across(c: Cell, dir: Dir) -> Cell {
    match dir {
        Dir::East => (c.0 + 1, c.1),
        Dir::North => (c.0, c.1 + 1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthState {
    cells: HashSet<Cell>,
    order: Vec<Cell>,
    /// Exposed NE edges `(inside cell, direction)`.
    boundary: Vec<(Cell, Dir)>,
    slot: HashMap<(Cell, Dir), usize>,
}

impl Default for GrowthState {
    fn default() -> Self {
        Self::new()
    }
}

impl GrowthState {
    /// `A_1`, the origin cell.
    pub fn new() -> Self {
        let mut s = GrowthState {
            cells: HashSet::new(),
            order: Vec::new(),
            boundary: Vec::new(),
            slot: HashMap::new(),
        };
        s.occupy((0, 0));
        s
    }

    pub fn from_cells(cells: &[Cell]) -> Result<Self> {
        let mut s = GrowthState::new();
        for &c in cells {
            if c == (0, 0) {
                continue;
            }
            if !s.slot.contains_key(&((c.0.wrapping_sub(1), c.1), Dir::East))
                && !s.slot.contains_key(&((c.0, c.1.wrapping_sub(1)), Dir::North))
            {
                return Err(Error::InvalidArgument(format!("cell {c:?} is not attachable")));
            }
            s.occupy(c);
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.cells.contains(&c)
    }

    /// Cells in the order they were added.
    pub fn cells(&self) -> &[Cell] {
        &self.order
    }

    pub fn boundary(&self) -> &[(Cell, Dir)] {
        &self.boundary
    }

    /// Number of exposed NE edges leading into `c`.
    pub fn weight(&self, c: Cell) -> usize {
        let mut w = 0;
        if c.0 > 0 && self.slot.contains_key(&((c.0 - 1, c.1), Dir::East)) {
            w += 1;
        }
        if c.1 > 0 && self.slot.contains_key(&((c.0, c.1 - 1), Dir::North)) {
            w += 1;
        }
        w
    }

    fn push_edge(&mut self, e: (Cell, Dir)) {
        self.slot.insert(e, self.boundary.len());
        self.boundary.push(e);
    }

    fn remove_edge(&mut self, e: (Cell, Dir)) {
        if let Some(i) = self.slot.remove(&e) {
            self.boundary.swap_remove(i);
            if i < self.boundary.len() {
                self.slot.insert(self.boundary[i], i);
            }
        }
    }

    fn occupy(&mut self, c: Cell) {
        self.cells.insert(c);
        self.order.push(c);
        if c.0 > 0 {
            self.remove_edge(((c.0 - 1, c.1), Dir::East));
        }
        if c.1 > 0 {
            self.remove_edge(((c.0, c.1 - 1), Dir::North));
        }
        for dir in [Dir::East, Dir::North] {
            if !self.cells.contains(&across(c, dir)) {
                self.push_edge((c, dir));
            }
        }
    }

    /// Exposed NE edges recomputed from the cell set, sorted.
    pub fn recompute_boundary(&self) -> Vec<(Cell, Dir)> {
        let mut out: Vec<(Cell, Dir)> = self
            .order
            .iter()
            .flat_map(|&c| [(c, Dir::East), (c, Dir::North)])
            .filter(|&(c, d)| !self.cells.contains(&across(c, d)))
            .collect();
        out.sort_by_key(edge_key);
        out
    }

    /// Whether the incremental boundary equals the recomputed one.
    pub fn boundary_consistent(&self) -> bool {
        let mut b = self.boundary.clone();
        b.sort_by_key(edge_key);
        b == self.recompute_boundary()
    }

    /// Canonical sorted cell list.
    pub fn shape(&self) -> Vec<Cell> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }
}

fn edge_key(e: &(Cell, Dir)) -> (Cell, u8) {
    (e.0, matches!(e.1, Dir::North) as u8)
}

/// Adds one cell across a uniformly chosen exposed NE edge.
pub fn growth_step<R: Rng>(state: &mut GrowthState, rng: &mut R) -> Cell {
    let i = rng.gen_range(0..state.boundary.len());
    let (c, dir) = state.boundary[i];
    let next = across(c, dir);
    state.occupy(next);
    next
}

/// `A_n` from `A_1`.
pub fn grow<R: Rng>(n: usize, rng: &mut R) -> GrowthState {
    let mut s = GrowthState::new();
    while s.len() < n {
        growth_step(&mut s, rng);
    }
    s
}

/// Delay for occupation to spread along an NE step.
pub trait ArrivalClocks {
    fn grid(&self) -> GridSpec;
    fn delay(&self, from: Cell, to: Cell) -> f64;
}

/// Exponential(1) time per vertex; the delay of a step is the clock of the
/// vertex entered.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexClockField {
    grid: GridSpec,
    clock: Vec<f64>,
}

impl VertexClockField {
    pub fn generate(grid: GridSpec, master_seed: u64, replicate: u64) -> Self {
        let key = StreamKey::new(master_seed, replicate, Lane::VertexClock);
        let mut clock = Vec::with_capacity(grid.vertex_count());
        for y in 0..=grid.height {
            for x in 0..=grid.width {
                let u = key.uniform(((x as u64) << 32) | y as u64);
                // 1 - u lies in (0, 1], so the clock is finite and >= 0
                clock.push(-(1.0 - u).ln());
            }
        }
        VertexClockField { grid, clock }
    }

    pub fn from_values(grid: GridSpec, clock: Vec<f64>) -> Result<Self> {
        if clock.len() != grid.vertex_count() {
            return Err(Error::InvalidArgument("clock count does not match the grid".into()));
        }
        if clock.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::InvalidArgument("vertex clocks must be positive".into()));
        }
        Ok(VertexClockField { grid, clock })
    }

    pub fn clock(&self, x: usize, y: usize) -> f64 {
        self.clock[self.grid.vertex_index(x, y)]
    }
}

impl ArrivalClocks for VertexClockField {
    fn grid(&self) -> GridSpec {
        self.grid
    }
    fn delay(&self, _from: Cell, to: Cell) -> f64 {
        self.clock(to.0, to.1)
    }
}

/// Independent clocks on the NE edges themselves.
#[derive(Debug, Clone)]
pub struct EdgeClocks<W> {
    pub grid: GridSpec,
    pub weights: W,
}

impl<W: EdgeWeights> ArrivalClocks for EdgeClocks<W> {
    fn grid(&self) -> GridSpec {
        self.grid
    }
    fn delay(&self, from: Cell, to: Cell) -> f64 {
        if to.0 == from.0 + 1 {
            self.weights.east(from.0, from.1)
        } else {
            self.weights.north(from.0, from.1)
        }
    }
}

/// Exponential(1) edge clocks for one replicate.
pub fn exponential_edge_clocks(grid: GridSpec, dist: &EdgeTimeDistribution, master_seed: u64, replicate: u64) -> EdgeClocks<LazyField<'_>> {
    EdgeClocks {
        grid,
        weights: LazyField::new(dist, master_seed, replicate),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FppGrowth {
    /// Vertices in occupation order, origin first.
    pub cells: Vec<Cell>,
    /// Occupation times, `times[0] = 0`.
    pub times: Vec<f64>,
}

impl FppGrowth {
    /// `t_n`.
    pub fn t_n(&self) -> f64 {
        *self.times.last().expect("at least the origin")
    }

    pub fn shape(&self) -> Vec<Cell> {
        let mut v = self.cells.clone();
        v.sort_unstable();
        v
    }
}

#[derive(PartialEq)]
struct Pending(f64, Cell);

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// First `n` vertices reached from the origin along NE steps, in order of
/// passage time, with `t_1 = 0`.
pub fn fpp_growth(clocks: &impl ArrivalClocks, n: usize) -> Result<FppGrowth> {
    if n == 0 {
        return Err(Error::InvalidArgument("need n >= 1".into()));
    }
    let grid = clocks.grid();
    let mut done = HashSet::new();
    let mut heap = BinaryHeap::new();
    heap.push(Pending(0.0, (0, 0)));
    let mut out = FppGrowth {
        cells: Vec::with_capacity(n),
        times: Vec::with_capacity(n),
    };
    while out.cells.len() < n {
        let Some(Pending(t, v)) = heap.pop() else {
            unreachable!("the frontier of a finite set in the quadrant is never empty")
        };
        if !done.insert(v) {
            continue;
        }
        out.cells.push(v);
        out.times.push(t);
        if out.cells.len() == n {
            break;
        }
        if v.0 >= grid.width || v.1 >= grid.height {
            return Err(Error::WindowExceeded {
                target: n,
            });
        }
        for w in [(v.0 + 1, v.1), (v.0, v.1 + 1)] {
            if !done.contains(&w) {
                heap.push(Pending(t + clocks.delay(v, w), w));
            }
        }
    }
    Ok(out)
}

/// Law of the shape `A_n` as a map from sorted cell lists to probabilities,
/// by enumerating every sequence of edge choices.
pub fn enumerate_growth(n: usize) -> BTreeMap<Vec<Cell>, f64> {
    let mut out = BTreeMap::new();
    fn walk(s: &GrowthState, prob: f64, n: usize, out: &mut BTreeMap<Vec<Cell>, f64>) {
        if s.len() == n {
            *out.entry(s.shape()).or_insert(0.0) += prob;
            return;
        }
        let k = s.boundary().len() as f64;
        for &(c, dir) in s.boundary() {
            let mut next = s.clone();
            next.occupy(across(c, dir));
            walk(&next, prob / k, n, out);
        }
    }
    if n >= 1 {
        walk(&GrowthState::new(), 1.0, n, &mut out);
    }
    out
}

/// Which clocks drive the race in [`enumerate_race`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockKind {
    Edge,
    Vertex,
}

/// Law of the first `n` vertices of an exponential race: from a set `S`, each
/// frontier vertex is next with probability proportional to its rate, which
/// is the number of edges into it from `S` for edge clocks and 1 for vertex
/// clocks.
pub fn enumerate_race(n: usize, kind: ClockKind) -> BTreeMap<Vec<Cell>, f64> {
    fn walk(set: &mut Vec<Cell>, prob: f64, n: usize, kind: ClockKind, out: &mut BTreeMap<Vec<Cell>, f64>) {
        if set.len() == n {
            let mut s = set.clone();
            s.sort_unstable();
            *out.entry(s).or_insert(0.0) += prob;
            return;
        }
        let mut rates: BTreeMap<Cell, f64> = BTreeMap::new();
        for &v in set.iter() {
            for w in [(v.0 + 1, v.1), (v.0, v.1 + 1)] {
                if !set.contains(&w) {
                    let r = rates.entry(w).or_insert(0.0);
                    *r = match kind {
                        ClockKind::Edge => *r + 1.0,
                        ClockKind::Vertex => 1.0,
                    };
                }
            }
        }
        let total: f64 = rates.values().sum();
        for (w, r) in rates {
            set.push(w);
            walk(set, prob * r / total, n, kind, out);
            set.pop();
        }
    }
    let mut out = BTreeMap::new();
    if n >= 1 {
        walk(&mut vec![(0, 0)], 1.0, n, kind, &mut out);
    }
    out
}

/// Per-cell occupation frequency over replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyHistogram {
    pub n: usize,
    pub replicates: usize,
    pub counts: BTreeMap<Cell, usize>,
}

impl OccupancyHistogram {
    pub fn from_shapes<'a>(n: usize, shapes: impl IntoIterator<Item = &'a [Cell]>) -> Self {
        let mut counts = BTreeMap::new();
        let mut replicates = 0;
        for shape in shapes {
            replicates += 1;
            for &c in shape {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
        OccupancyHistogram { n, replicates, counts }
    }

    pub fn frequency(&self, c: Cell) -> f64 {
        self.counts.get(&c).copied().unwrap_or(0) as f64 / self.replicates as f64
    }

    /// `(x, y, frequency)` rows in cell order.
    pub fn rows(&self) -> Vec<(usize, usize, f64)> {
        self.counts.keys().map(|&c| (c.0, c.1, self.frequency(c))).collect()
    }

    /// Total variation between the occupancy laws normalised to mass 1.
    pub fn total_variation(&self, other: &OccupancyHistogram) -> f64 {
        let mass = |h: &OccupancyHistogram, c: &Cell| {
            h.counts.get(c).copied().unwrap_or(0) as f64 / (h.replicates * h.n) as f64
        };
        let keys: std::collections::BTreeSet<&Cell> = self.counts.keys().chain(other.counts.keys()).collect();
        0.5 * keys.into_iter().map(|c| (mass(self, c) - mass(other, c)).abs()).sum::<f64>()
    }
}

/// Growth-chain shapes `A_n` for replicates `0..replicates`.
pub fn simulate_growth(n: usize, replicates: usize, master_seed: u64) -> Vec<Vec<Cell>> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = StreamKey::new(master_seed, rep, Lane::Stream).sequential();
            grow(n, &mut rng).cells().to_vec()
        })
        .collect()
}

/// First `n` vertices of edge-clock first passage for each replicate.
pub fn simulate_fpp_growth(n: usize, replicates: usize, master_seed: u64) -> Result<Vec<Vec<Cell>>> {
    let grid = GridSpec::new(n, n)?;
    let exp = EdgeTimeDistribution::exponential(1.0)?;
    (0..replicates as u64)
        .into_par_iter()
        .map(|rep| Ok(fpp_growth(&exponential_edge_clocks(grid, &exp, master_seed, rep), n)?.cells))
        .collect()
}

/// Total variation between occupancy laws of `A_n / sqrt(n)` and
/// `A_{2n} / sqrt(2n)`, binned on squares of side `bin`.
pub fn scaling_distance(shapes_n: &[Vec<Cell>], shapes_2n: &[Vec<Cell>], n: usize, bin: f64) -> f64 {
    let histogram = |shapes: &[Vec<Cell>], m: usize| {
        let scale = 1.0 / (m as f64).sqrt();
        let mut h: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        let w = 1.0 / (shapes.len() * m) as f64;
        for s in shapes {
            for &(x, y) in s {
                let key = (
                    ((x as f64 + 0.5) * scale / bin).floor() as i64,
                    ((y as f64 + 0.5) * scale / bin).floor() as i64,
                );
                *h.entry(key).or_insert(0.0) += w;
            }
        }
        h
    };
    let a = histogram(shapes_n, n);
    let b = histogram(shapes_2n, 2 * n);
    let keys: std::collections::BTreeSet<&(i64, i64)> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn first_step_is_a_fair_coin() {
        let law = enumerate_growth(2);
        assert_eq!(law[&vec![(0, 0), (0, 1)]], 0.5);
        assert_eq!(law[&vec![(0, 0), (1, 0)]], 0.5);
        let n = 10_000;
        let east = simulate_growth(2, n, 3).iter().filter(|s| s[1] == (1, 0)).count();
        let sigma = (0.25 / n as f64).sqrt();
        assert!((east as f64 / n as f64 - 0.5).abs() < 4.0 * sigma);
    }

    #[test]
    fn double_exposed_cell_has_weight_two() {
        let s = GrowthState::from_cells(&[(0, 0), (1, 0), (0, 1)]).unwrap();
        assert_eq!(s.weight((1, 1)), 2);
        assert_eq!(s.boundary().len(), 4);
        let law = enumerate_growth(4);
        let square = vec![(0, 0), (0, 1), (1, 0), (1, 1)];
        // from a domino: the L shape (1/3) then the corner (2/4), or the
        // corner (1/3) then the remaining cell (1/4)
        let expected = 2.0 * 0.5 * (1.0 / 3.0 * 2.0 / 4.0 + 1.0 / 3.0 * 1.0 / 4.0);
        assert!((law[&square] - expected).abs() < 1e-12);
        assert!(GrowthState::from_cells(&[(0, 0), (2, 0)]).is_err());
    }

    #[test]
    fn incremental_boundary_matches_recomputation() {
        for rep in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(rep);
            let mut s = GrowthState::new();
            assert!(s.boundary_consistent());
            for _ in 0..40 {
                growth_step(&mut s, &mut rng);
                assert!(s.boundary_consistent());
            }
            assert_eq!(s.len(), 41);
        }
    }

    #[test]
    fn growth_chain_equals_edge_race_for_small_n() {
        for n in 1..=5 {
            let a = enumerate_growth(n);
            let b = enumerate_race(n, ClockKind::Edge);
            assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
            for (k, p) in &a {
                assert!((p - b[k]).abs() < 1e-12, "{k:?}");
            }
            let total: f64 = a.values().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vertex_race_differs_at_four_cells() {
        let edge = enumerate_race(4, ClockKind::Edge);
        let vertex = enumerate_race(4, ClockKind::Vertex);
        for n in 1..=3 {
            assert_eq!(enumerate_race(n, ClockKind::Edge), enumerate_race(n, ClockKind::Vertex));
        }
        let square = vec![(0, 0), (0, 1), (1, 0), (1, 1)];
        assert!(vertex[&square] < edge[&square] - 0.01);
    }

    #[test]
    fn fpp_conventions() {
        let grid = GridSpec::new(4, 4).unwrap();
        let f = VertexClockField::generate(grid, 1, 0);
        let one = fpp_growth(&f, 1).unwrap();
        assert_eq!((one.cells.clone(), one.t_n()), (vec![(0, 0)], 0.0));
        for rep in 0..50 {
            let f = VertexClockField::generate(grid, 1, rep);
            let two = fpp_growth(&f, 2).unwrap();
            let expect = if f.clock(1, 0) < f.clock(0, 1) { (1, 0) } else { (0, 1) };
            assert_eq!(two.cells[1], expect);
            assert_eq!(two.t_n(), f.clock(1, 0).min(f.clock(0, 1)));
            assert!(two.times.windows(2).all(|w| w[0] <= w[1]));
        }
        let tiny = VertexClockField::generate(GridSpec::new(1, 1).unwrap(), 1, 0);
        assert!(matches!(fpp_growth(&tiny, 4), Err(Error::WindowExceeded { .. })));
        assert!(VertexClockField::from_values(GridSpec::new(1, 1).unwrap(), vec![1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn edge_race_simulation_matches_exact_law() {
        let n = 4;
        let reps = 20_000;
        let law = enumerate_growth(n);
        let shapes = simulate_fpp_growth(n, reps, 12).unwrap();
        let mut counts: BTreeMap<Vec<Cell>, usize> = BTreeMap::new();
        for s in shapes {
            let mut s = s;
            s.sort_unstable();
            *counts.entry(s).or_insert(0) += 1;
        }
        for (shape, p) in &law {
            let f = counts.get(shape).copied().unwrap_or(0) as f64 / reps as f64;
            let sigma = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((f - p).abs() < 4.0 * sigma, "{shape:?} {f} {p}");
        }
    }

    #[test]
    fn occupancy_histograms_agree_at_ten_cells() {
        let a = simulate_growth(10, 5000, 1);
        let b = simulate_fpp_growth(10, 5000, 2).unwrap();
        let ha = OccupancyHistogram::from_shapes(10, a.iter().map(|s| s.as_slice()));
        let hb = OccupancyHistogram::from_shapes(10, b.iter().map(|s| s.as_slice()));
        assert!(ha.total_variation(&hb) < 0.05);
        assert_eq!(ha.frequency((0, 0)), 1.0);
        assert_eq!(ha.total_variation(&ha), 0.0);
    }

    #[test]
    fn normalised_shapes_settle() {
        let d = |n: usize| {
            let a = simulate_growth(n, 400, 5);
            let b = simulate_growth(2 * n, 400, 6);
            scaling_distance(&a, &b, n, 0.25)
        };
        let (small, large) = (d(16), d(256));
        assert!(large < small, "{small} {large}");
    }
}
