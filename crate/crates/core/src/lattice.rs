//! First-quadrant grid windows and realised edge fields.
//!
//! Vertices are `(x, y)` with `0 <= x <= width`, `0 <= y <= height`. The east
//! edge `(x, y) -> (x + 1, y)` and the north edge `(x, y) -> (x, y + 1)` leave
//! each vertex. Edge times come from counter-based uniforms keyed by the edge
//! coordinates, so a field is a pure function of its provenance and a larger
//! window agrees with a smaller one on their common edges.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::distributions::{EdgeTimeDistribution, GEpsilonSpec};
use crate::error::{Error, Result};
use crate::rng::{edge_counter, Lane, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid must be at least 1x1, got {width}x{height}"
            )));
        }
        if width >= (1 << 31) || height >= (1 << 31) {
            return Err(Error::InvalidArgument("grid too large".into()));
        }
        Ok(GridSpec { width, height })
    }

    pub fn vertex_count(&self) -> usize {
        (self.width + 1) * (self.height + 1)
    }

    pub fn edge_count(&self) -> usize {
        self.width * (self.height + 1) + self.height * (self.width + 1)
    }

    #[inline]
    pub fn vertex_index(&self, x: usize, y: usize) -> usize {
        y * (self.width + 1) + x
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x <= self.width && y <= self.height
    }

    pub fn check(&self, x: usize, y: usize) -> Result<()> {
        if self.contains(x, y) {
            Ok(())
        } else {
            Err(Error::OutsideGrid {
                x,
                y,
                width: self.width,
                height: self.height,
            })
        }
    }
}

/// Orientation of a NE edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    East,
    North,
}

/// A NE edge identified by its tail vertex and orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub x: usize,
    pub y: usize,
    pub dir: Dir,
}

impl Edge {
    pub fn head(&self) -> (usize, usize) {
        match self.dir {
            Dir::East => (self.x + 1, self.y),
            Dir::North => (self.x, self.y + 1),
        }
    }
}

/// Read access to NE edge times. Implemented by materialised fields and by
/// lazily evaluated ones.
pub trait EdgeWeights {
    fn east(&self, x: usize, y: usize) -> f64;
    fn north(&self, x: usize, y: usize) -> f64;

    fn weight(&self, e: Edge) -> f64 {
        match e.dir {
            Dir::East => self.east(e.x, e.y),
            Dir::North => self.north(e.x, e.y),
        }
    }
}

impl<W: EdgeWeights + ?Sized> EdgeWeights for &W {
    fn east(&self, x: usize, y: usize) -> f64 {
        (**self).east(x, y)
    }
    fn north(&self, x: usize, y: usize) -> f64 {
        (**self).north(x, y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub distribution: String,
    pub master_seed: u64,
    pub replicate: u64,
}

/// Edge times evaluated on demand from a distribution and a stream key.
#[derive(Debug, Clone)]
pub struct LazyField<'a> {
    dist: &'a EdgeTimeDistribution,
    key: StreamKey,
}

impl<'a> LazyField<'a> {
    pub fn new(dist: &'a EdgeTimeDistribution, master_seed: u64, replicate: u64) -> Self {
        LazyField {
            dist,
            key: StreamKey::new(master_seed, replicate, Lane::EdgeTime),
        }
    }

    #[inline]
    pub fn uniform(&self, x: usize, y: usize, dir: Dir) -> f64 {
        self.key.uniform(edge_counter(x, y, dir == Dir::North))
    }
}

impl EdgeWeights for LazyField<'_> {
    #[inline]
    fn east(&self, x: usize, y: usize) -> f64 {
        self.dist.sample(self.uniform(x, y, Dir::East))
    }
    #[inline]
    fn north(&self, x: usize, y: usize) -> f64 {
        self.dist.sample(self.uniform(x, y, Dir::North))
    }
}

/// `tau(e) = 1{t(e) > 0}` view of another field.
#[derive(Debug, Clone, Copy)]
pub struct Thresholded<W>(pub W);

impl<W: EdgeWeights> EdgeWeights for Thresholded<W> {
    #[inline]
    fn east(&self, x: usize, y: usize) -> f64 {
        f64::from(u8::from(self.0.east(x, y) > 0.0))
    }
    #[inline]
    fn north(&self, x: usize, y: usize) -> f64 {
        f64::from(u8::from(self.0.north(x, y) > 0.0))
    }
}

/// Coordinates re-rooted at `origin`: edge `(x, y)` reads `(x + ox, y + oy)`.
#[derive(Debug, Clone, Copy)]
pub struct Rerooted<W> {
    pub inner: W,
    pub origin: (usize, usize),
}

impl<W: EdgeWeights> EdgeWeights for Rerooted<W> {
    fn east(&self, x: usize, y: usize) -> f64 {
        self.inner.east(x + self.origin.0, y + self.origin.1)
    }
    fn north(&self, x: usize, y: usize) -> f64 {
        self.inner.north(x + self.origin.0, y + self.origin.1)
    }
}

/// Materialised edge times on a grid window.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeField {
    grid: GridSpec,
    east: Vec<f64>,
    north: Vec<f64>,
    provenance: Option<Provenance>,
}

impl EdgeField {
    /// Builds a field from a closure over `(x, y, dir)`.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, usize, Dir) -> f64) -> Self {
        let mut east = Vec::with_capacity(grid.width * (grid.height + 1));
        for y in 0..=grid.height {
            for x in 0..grid.width {
                east.push(f(x, y, Dir::East));
            }
        }
        let mut north = Vec::with_capacity((grid.width + 1) * grid.height);
        for y in 0..grid.height {
            for x in 0..=grid.width {
                north.push(f(x, y, Dir::North));
            }
        }
        EdgeField {
            grid,
            east,
            north,
            provenance: None,
        }
    }

    pub fn from_weights(grid: GridSpec, w: &impl EdgeWeights) -> Self {
        Self::from_fn(grid, |x, y, d| w.weight(Edge { x, y, dir: d }))
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self::from_fn(grid, |_, _, _| value)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn east_slice(&self) -> &[f64] {
        &self.east
    }

    pub fn north_slice(&self) -> &[f64] {
        &self.north
    }

    /// Every edge of the window: all east edges row by row, then all north edges.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let g = self.grid;
        let east = (0..=g.height).flat_map(move |y| (0..g.width).map(move |x| Edge { x, y, dir: Dir::East }));
        let north = (0..g.height).flat_map(move |y| (0..=g.width).map(move |x| Edge { x, y, dir: Dir::North }));
        east.chain(north)
    }

    pub fn set(&mut self, e: Edge, value: f64) {
        let g = self.grid;
        match e.dir {
            Dir::East => self.east[e.y * g.width + e.x] = value,
            Dir::North => self.north[e.y * (g.width + 1) + e.x] = value,
        }
    }

    /// Applies `f` to every edge time.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> EdgeField {
        EdgeField {
            grid: self.grid,
            east: self.east.iter().map(|&v| f(v)).collect(),
            north: self.north.iter().map(|&v| f(v)).collect(),
            provenance: None,
        }
    }

    /// Writes the debugging dump: little-endian u64 width, height, seed,
    /// replicate, id length, then the id bytes, then the east and north
    /// arrays row-major as f64.
    pub fn write_dump(&self, mut w: impl Write) -> Result<()> {
        let prov = self.provenance.clone().unwrap_or(Provenance {
            distribution: String::new(),
            master_seed: 0,
            replicate: 0,
        });
        for v in [
            self.grid.width as u64,
            self.grid.height as u64,
            prov.master_seed,
            prov.replicate,
            prov.distribution.len() as u64,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(prov.distribution.as_bytes())?;
        for v in self.east.iter().chain(&self.north) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump(mut r: impl Read) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut dyn Read| -> Result<u64> {
            r.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let width = next(&mut r)? as usize;
        let height = next(&mut r)? as usize;
        let master_seed = next(&mut r)?;
        let replicate = next(&mut r)?;
        let id_len = next(&mut r)? as usize;
        let mut id = vec![0u8; id_len];
        r.read_exact(&mut id)?;
        let grid = GridSpec::new(width, height)?;
        let mut read_f64s = |n: usize| -> Result<Vec<f64>> {
            let mut buf = vec![0u8; n * 8];
            r.read_exact(&mut buf)?;
            Ok(buf
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect())
        };
        let east = read_f64s(width * (height + 1))?;
        let north = read_f64s((width + 1) * height)?;
        Ok(EdgeField {
            grid,
            east,
            north,
            provenance: Some(Provenance {
                distribution: String::from_utf8(id).map_err(|e| Error::Io(e.to_string()))?,
                master_seed,
                replicate,
            }),
        })
    }
}

impl EdgeWeights for EdgeField {
    #[inline]
    fn east(&self, x: usize, y: usize) -> f64 {
        self.east[y * self.grid.width + x]
    }
    #[inline]
    fn north(&self, x: usize, y: usize) -> f64 {
        self.north[y * (self.grid.width + 1) + x]
    }
}

/// Realises every edge of `grid` independently from `dist`.
pub fn generate_field(
    grid: GridSpec,
    dist: &EdgeTimeDistribution,
    master_seed: u64,
    replicate: u64,
) -> EdgeField {
    let lazy = LazyField::new(dist, master_seed, replicate);
    let mut field = EdgeField::from_weights(grid, &lazy);
    field.provenance = Some(Provenance {
        distribution: dist.id(),
        master_seed,
        replicate,
    });
    field
}

/// A base field `t ~ F` and its coupled `g ~ G_eps` field, edge by edge.
pub fn generate_coupled_fields(
    grid: GridSpec,
    spec: &GEpsilonSpec,
    master_seed: u64,
    replicate: u64,
) -> (EdgeField, EdgeField) {
    let t_field = generate_field(grid, spec.base(), master_seed, replicate);
    let aux = StreamKey::new(master_seed, replicate, Lane::CouplingAux);
    let g_field = EdgeField::from_fn(grid, |x, y, d| {
        let t = t_field.weight(Edge { x, y, dir: d });
        spec.couple(t, aux.uniform(edge_counter(x, y, d == Dir::North)))
            .expect("sampled from base")
            .g
    });
    (t_field, g_field)
}

/// Polar point in the first quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius {r} must be >= 0")));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "angle {theta} outside [0, pi/2]"
            )));
        }
        Ok(PolarPoint { r, theta })
    }
}

// Nearest integer, ties to the smaller one.
fn round_half_down(v: f64) -> i64 {
    let f = v.floor();
    if v - f > 0.5 {
        f as i64 + 1
    } else {
        f as i64
    }
}

/// Lattice vertex nearest to `(r cos theta, r sin theta)`; ties go to the
/// lexicographically smaller vertex. Clamped to the first quadrant.
pub fn nearest_vertex(p: PolarPoint) -> (usize, usize) {
    let (s, c) = p.theta.sin_cos();
    let x = round_half_down(p.r * c).max(0);
    let y = round_half_down(p.r * s).max(0);
    (x as usize, y as usize)
}
