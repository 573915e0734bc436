//! Edge passage-time laws.
//!
//! All sampling goes through the inverse CDF so that two laws driven by the
//! same uniform are monotonically coupled: if `F1 <= F2` pointwise then
//! `sample(F2, u) <= sample(F1, u)` for every `u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalisation tolerance for discrete laws.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Atoms of a discrete law, sorted ascending by value.
#[derive(Debug, Clone, PartialEq)]
pub struct Atoms {
    values: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Atoms {
    pub fn new(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidDistribution("atom list is empty".into()));
        }
        for &(v, p) in &pairs {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom value {v} is not a finite nonnegative time"
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom probability {p} is not in [0, 1]"
                )));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            if p == 0.0 {
                continue;
            }
            if values.last() == Some(&v) {
                *probs.last_mut().unwrap() += p;
            } else {
                values.push(v);
                probs.push(p);
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "atom probabilities sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Atoms {
            values,
            probs,
            cumulative,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 {
            0.0
        } else if k == self.values.len() {
            1.0
        } else {
            self.cumulative[k - 1]
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.values[k.min(self.values.len() - 1)]
    }
}

/// The law `F` of a single edge passage time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistLiteral", into = "DistLiteral")]
pub enum EdgeTimeDistribution {
    /// Value 0 with probability `p0`, value 1 otherwise.
    BernoulliZeroOne { p0: f64 },
    DiscreteAtoms(Atoms),
    Exponential { rate: f64 },
    /// The law of `t(e) + a`.
    Shifted {
        inner: Box<EdgeTimeDistribution>,
        a: f64,
    },
}

impl EdgeTimeDistribution {
    pub fn bernoulli(p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::InvalidDistribution(format!(
                "bernoulli01 p0={p0} outside [0, 1]"
            )));
        }
        Ok(Self::BernoulliZeroOne { p0 })
    }

    pub fn atoms(pairs: Vec<(f64, f64)>) -> Result<Self> {
        Atoms::new(pairs).map(Self::DiscreteAtoms)
    }

    pub fn point_mass(c: f64) -> Result<Self> {
        Self::atoms(vec![(c, 1.0)])
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "exponential rate {rate} must be positive"
            )));
        }
        Ok(Self::Exponential { rate })
    }

    pub fn shifted(inner: EdgeTimeDistribution, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidDistribution("shift must be finite".into()));
        }
        let lowest = inner.support_min();
        if lowest + a < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "shift a={a} makes support point {lowest} negative"
            )));
        }
        Ok(Self::Shifted {
            inner: Box::new(inner),
            a,
        })
    }

    /// Parses a JSON literal such as `{"bernoulli01": {"p0": 0.8}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDistribution(e.to_string()))
    }

    /// Canonical JSON form, used as the distribution id in provenance records.
    pub fn id(&self) -> String {
        serde_json::to_string(self).expect("distribution serializes")
    }

    /// Inverse-CDF realisation: the smallest `x` with `F(x) > u`.
    #[inline]
    pub fn sample(&self, u: f64) -> f64 {
        match self {
            Self::BernoulliZeroOne { p0 } => {
                if u < *p0 {
                    0.0
                } else {
                    1.0
                }
            }
            Self::DiscreteAtoms(atoms) => atoms.quantile(u),
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::Shifted { inner, a } => inner.sample(u) + a,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::BernoulliZeroOne { p0 } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    *p0
                } else {
                    1.0
                }
            }
            Self::DiscreteAtoms(atoms) => atoms.cdf(x),
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::Shifted { inner, a } => inner.cdf(x - a),
        }
    }

    /// `F(0)`, the probability that an edge is open (zero passage time).
    pub fn atom_at_zero(&self) -> f64 {
        self.cdf(0.0)
    }

    /// Support points of a purely discrete law; `None` when there is a
    /// continuous part.
    pub fn support_atoms(&self) -> Option<Vec<f64>> {
        match self {
            Self::BernoulliZeroOne { p0 } => Some(match *p0 {
                p if p == 0.0 => vec![1.0],
                p if p == 1.0 => vec![0.0],
                _ => vec![0.0, 1.0],
            }),
            Self::DiscreteAtoms(atoms) => Some(atoms.values.clone()),
            Self::Exponential { .. } => None,
            Self::Shifted { inner, a } => inner
                .support_atoms()
                .map(|v| v.into_iter().map(|x| x + a).collect()),
        }
    }

    /// Atoms with probabilities, for discrete laws.
    pub fn atom_pairs(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::BernoulliZeroOne { p0 } => Some(
                [(0.0, *p0), (1.0, 1.0 - *p0)]
                    .into_iter()
                    .filter(|&(_, p)| p > 0.0)
                    .collect(),
            ),
            Self::DiscreteAtoms(atoms) => Some(atoms.pairs().collect()),
            Self::Exponential { .. } => None,
            Self::Shifted { inner, a } => inner
                .atom_pairs()
                .map(|v| v.into_iter().map(|(x, p)| (x + a, p)).collect()),
        }
    }

    fn support_min(&self) -> f64 {
        match self {
            Self::BernoulliZeroOne { p0 } => {
                if *p0 > 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Self::DiscreteAtoms(atoms) => atoms.values[0],
            Self::Exponential { .. } => 0.0,
            Self::Shifted { inner, a } => inner.support_min() + a,
        }
    }

    /// Law of `t(e) + a`.
    pub fn shift(&self, a: f64) -> Result<Self> {
        Self::shifted(self.clone(), a)
    }
}

/// True iff `F1(x) <= F2(x)` at every probe point and at every atom of either
/// law, i.e. `f1` is stochastically larger than `f2` on the probed set.
pub fn stochastically_dominates(
    f1: &EdgeTimeDistribution,
    f2: &EdgeTimeDistribution,
    grid: &[f64],
) -> bool {
    let mut probes: Vec<f64> = grid.to_vec();
    for f in [f1, f2] {
        if let Some(atoms) = f.support_atoms() {
            probes.extend(atoms);
        }
    }
    probes
        .iter()
        .all(|&x| f1.cdf(x) <= f2.cdf(x) + NORMALIZATION_TOL)
}

/// A sampled time together with its coupled `G_eps` companion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledPair {
    pub t: f64,
    pub g: f64,
}

/// Parameters of the `G_eps` construction: a base law that is flat on
/// `[0, h)` with a jump at `h`, and the amount `epsilon` of the jump moved
/// down to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GEpsilonSpec {
    base: EdgeTimeDistribution,
    h: f64,
    epsilon: f64,
    f0: f64,
    fh: f64,
}

impl GEpsilonSpec {
    pub fn new(base: EdgeTimeDistribution, h: f64, epsilon: f64) -> Result<Self> {
        let atoms = base.support_atoms().ok_or_else(|| {
            Error::InvalidArgument("G_eps base must be a discrete law with an atom at h".into())
        })?;
        if !(h > 0.0) || !atoms.contains(&h) {
            return Err(Error::InvalidArgument(format!(
                "h={h} must be a positive support point of the base law"
            )));
        }
        if atoms.iter().any(|&v| v > 0.0 && v < h) {
            return Err(Error::InvalidArgument(format!(
                "base law must be flat on [0, {h})"
            )));
        }
        let f0 = base.cdf(0.0);
        let fh = base.cdf(h);
        if !(epsilon > 0.0 && f0 + epsilon < fh) {
            return Err(Error::InvalidArgument(format!(
                "epsilon={epsilon} must satisfy 0 < epsilon < F(h) - F(0) = {}",
                fh - f0
            )));
        }
        Ok(GEpsilonSpec {
            base,
            h,
            epsilon,
            f0,
            fh,
        })
    }

    pub fn base(&self) -> &EdgeTimeDistribution {
        &self.base
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Probability that an edge with `t = h` is opened in the coupled copy.
    pub fn branch_probability(&self) -> f64 {
        self.epsilon / (self.fh - self.f0)
    }

    /// The marginal law `G_eps` of the coupled time.
    pub fn g_distribution(&self) -> EdgeTimeDistribution {
        let mut pairs = vec![(0.0, self.f0 + self.epsilon), (self.h, self.fh - self.f0 - self.epsilon)];
        pairs.extend(
            self.base
                .atom_pairs()
                .expect("discrete base")
                .into_iter()
                .filter(|&(v, _)| v > self.h),
        );
        EdgeTimeDistribution::atoms(pairs).expect("G_eps is a valid law")
    }

    /// Couples a base sample `t` with `g ~ G_eps` using the auxiliary uniform.
    pub fn couple(&self, t: f64, u_aux: f64) -> Result<CoupledPair> {
        if !self.base.support_atoms().unwrap().contains(&t) {
            return Err(Error::NotInSupport(t));
        }
        let g = if t == 0.0 {
            0.0
        } else if t > self.h {
            t
        } else if u_aux < self.branch_probability() {
            // t == h: flatness on (0, h) leaves no other case
            0.0
        } else {
            self.h
        };
        Ok(CoupledPair { t, g })
    }
}

/// Free-function form of [`GEpsilonSpec::couple`].
pub fn couple_g_epsilon(spec: &GEpsilonSpec, t: f64, u_aux: f64) -> Result<CoupledPair> {
    spec.couple(t, u_aux)
}

/// Flattens `F` on `[0, x_n)`: `G_n(x) = F(0)` there and `F(x)` from `x_n` on.
/// The mass of atoms in `(0, x_n)` moves to `x_n`. With `x_n = h_1` this is
/// also the `H` construction used for laws that are flat near zero.
pub fn build_g_n(f: &EdgeTimeDistribution, x_n: f64) -> Result<EdgeTimeDistribution> {
    let pairs = f
        .atom_pairs()
        .ok_or_else(|| Error::InvalidArgument("G_n requires a discrete law".into()))?;
    if !pairs.iter().any(|&(v, _)| v == x_n) {
        return Err(Error::InvalidArgument(format!(
            "x_n={x_n} is not a support point"
        )));
    }
    let f0 = f.cdf(0.0);
    if !(f.cdf(x_n) > f0) {
        return Err(Error::InvalidArgument(format!(
            "F(x_n) must exceed F(0)={f0}"
        )));
    }
    let moved: f64 = pairs
        .iter()
        .filter(|&&(v, _)| v > 0.0 && v < x_n)
        .map(|&(_, p)| p)
        .sum();
    let out = pairs
        .into_iter()
        .filter(|&(v, _)| v == 0.0 || v >= x_n)
        .map(|(v, p)| if v == x_n { (v, p + moved) } else { (v, p) })
        .collect();
    EdgeTimeDistribution::atoms(out)
}

/// JSON literal mirror of [`EdgeTimeDistribution`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
enum DistLiteral {
    #[serde(rename = "bernoulli01")]
    Bernoulli01 { p0: f64 },
    #[serde(rename = "atoms")]
    Atoms(Vec<(f64, f64)>),
    #[serde(rename = "exponential")]
    Exponential { rate: f64 },
    #[serde(rename = "shift")]
    Shift { a: f64, inner: Box<DistLiteral> },
}

impl TryFrom<DistLiteral> for EdgeTimeDistribution {
    type Error = Error;

    fn try_from(lit: DistLiteral) -> Result<Self> {
        match lit {
            DistLiteral::Bernoulli01 { p0 } => Self::bernoulli(p0),
            DistLiteral::Atoms(pairs) => Self::atoms(pairs),
            DistLiteral::Exponential { rate } => Self::exponential(rate),
            DistLiteral::Shift { a, inner } => Self::shifted(Self::try_from(*inner)?, a),
        }
    }
}

impl From<EdgeTimeDistribution> for DistLiteral {
    fn from(d: EdgeTimeDistribution) -> Self {
        match d {
            EdgeTimeDistribution::BernoulliZeroOne { p0 } => DistLiteral::Bernoulli01 { p0 },
            EdgeTimeDistribution::DiscreteAtoms(atoms) => DistLiteral::Atoms(atoms.pairs().collect()),
            EdgeTimeDistribution::Exponential { rate } => DistLiteral::Exponential { rate },
            EdgeTimeDistribution::Shifted { inner, a } => DistLiteral::Shift {
                a,
                inner: Box::new((*inner).into()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Lane, StreamKey};
    use proptest::prelude::*;

    fn bern(p: f64) -> EdgeTimeDistribution {
        EdgeTimeDistribution::bernoulli(p).unwrap()
    }

    // Independent inverse: bisection on the CDF.
    fn numeric_inverse(f: &EdgeTimeDistribution, u: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        while f.cdf(hi) < u {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn bernoulli_sampling_examples() {
        assert_eq!(bern(0.6).sample(0.3), 0.0);
        assert_eq!(bern(0.6).sample(0.9), 1.0);
    }

    #[test]
    fn exponential_median_is_ln2() {
        let f = EdgeTimeDistribution::exponential(1.0).unwrap();
        let x = f.sample(0.5);
        assert!((x - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((x - numeric_inverse(&f, 0.5)).abs() < 1e-12);
        for u in [0.01, 0.2, 0.77, 0.999] {
            assert!((f.sample(u) - numeric_inverse(&f, u)).abs() < 1e-9);
        }
    }

    #[test]
    fn atom_at_zero_per_variant() {
        assert_eq!(bern(0.37).atom_at_zero(), 0.37);
        let a = EdgeTimeDistribution::atoms(vec![(1.0, 0.5), (0.0, 0.25), (2.0, 0.25)]).unwrap();
        assert_eq!(a.atom_at_zero(), 0.25);
        assert_eq!(EdgeTimeDistribution::exponential(3.0).unwrap().atom_at_zero(), 0.0);
        assert_eq!(bern(0.5).shift(0.5).unwrap().atom_at_zero(), 0.0);
    }

    #[test]
    fn normalization_is_enforced() {
        assert!(EdgeTimeDistribution::atoms(vec![(0.0, 0.5), (1.0, 0.4)]).is_err());
        assert!(EdgeTimeDistribution::atoms(vec![(0.0, 0.5), (1.0, 0.5 + 1e-13)]).is_ok());
        assert!(EdgeTimeDistribution::atoms(vec![(-1.0, 1.0)]).is_err());
        assert!(EdgeTimeDistribution::shifted(bern(0.5), -0.1).is_err());
        assert!(EdgeTimeDistribution::exponential(0.0).is_err());
    }

    #[test]
    fn json_literals_parse() {
        let d = EdgeTimeDistribution::from_json(r#"{"bernoulli01": {"p0": 0.8}}"#).unwrap();
        assert_eq!(d, bern(0.8));
        let d = EdgeTimeDistribution::from_json(r#"{"atoms": [[0,0.6447],[1,0.3553]]}"#).unwrap();
        assert!((d.atom_at_zero() - 0.6447).abs() < 1e-15);
        let d = EdgeTimeDistribution::from_json(r#"{"exponential": {"rate": 1.0}}"#).unwrap();
        assert_eq!(d, EdgeTimeDistribution::exponential(1.0).unwrap());
        let d = EdgeTimeDistribution::from_json(
            r#"{"shift": {"a": 0.5, "inner": {"bernoulli01": {"p0": 0.8}}}}"#,
        )
        .unwrap();
        assert_eq!(d.sample(0.1), 0.5);
        // canonical id parses back to the same law
        assert_eq!(EdgeTimeDistribution::from_json(&d.id()).unwrap(), d);
        assert!(EdgeTimeDistribution::from_json(r#"{"bernoulli01": {"p0": 1.5}}"#).is_err());
        assert!(EdgeTimeDistribution::from_json(r#"{"gamma": {"k": 2}}"#).is_err());
    }

    #[test]
    fn dominance_examples() {
        let grid = [0.0, 0.5, 1.0, 2.0];
        assert!(stochastically_dominates(&bern(0.4), &bern(0.6), &grid));
        assert!(!stochastically_dominates(&bern(0.6), &bern(0.4), &grid));
        for f in [bern(0.3), EdgeTimeDistribution::exponential(2.0).unwrap()] {
            assert!(stochastically_dominates(&f, &f, &grid));
        }
    }

    fn critical_like() -> GEpsilonSpec {
        // F(0) = 0.6447, F(h) - F(0) = 0.2 at h = 1, remaining mass at 3
        let base =
            EdgeTimeDistribution::atoms(vec![(0.0, 0.6447), (1.0, 0.2), (3.0, 0.1553)]).unwrap();
        GEpsilonSpec::new(base, 1.0, 0.05).unwrap()
    }

    #[test]
    fn coupling_examples() {
        let spec = critical_like();
        for u in [0.0, 0.3, 0.99] {
            assert_eq!(spec.couple(0.0, u).unwrap(), CoupledPair { t: 0.0, g: 0.0 });
            assert_eq!(spec.couple(3.0, u).unwrap(), CoupledPair { t: 3.0, g: 3.0 });
        }
        assert_eq!(spec.couple(1.0, 0.2).unwrap().g, 0.0);
        assert_eq!(spec.couple(1.0, 0.3).unwrap().g, 1.0);
        assert_eq!(spec.couple(0.5, 0.1), Err(Error::NotInSupport(0.5)));
    }

    #[test]
    fn coupling_spec_validation() {
        let base = EdgeTimeDistribution::atoms(vec![(0.0, 0.6), (0.5, 0.1), (1.0, 0.3)]).unwrap();
        // atom inside (0, h)
        assert!(GEpsilonSpec::new(base.clone(), 1.0, 0.01).is_err());
        assert!(GEpsilonSpec::new(base.clone(), 0.5, 0.1).is_err());
        assert!(GEpsilonSpec::new(base, 0.5, 0.05).is_ok());
        assert!(GEpsilonSpec::new(EdgeTimeDistribution::exponential(1.0).unwrap(), 1.0, 0.1).is_err());
    }

    #[test]
    fn coupled_marginal_frequencies() {
        let spec = critical_like();
        let base = spec.base().clone();
        let t_key = StreamKey::new(11, 0, Lane::EdgeTime);
        let a_key = StreamKey::new(11, 0, Lane::CouplingAux);
        let n = 200_000u64;
        let mut counts = [0usize; 3];
        for i in 0..n {
            let t = base.sample(t_key.uniform(i));
            let pair = spec.couple(t, a_key.uniform(i)).unwrap();
            let slot = if pair.g == 0.0 {
                0
            } else if pair.g == spec.h() {
                1
            } else {
                2
            };
            counts[slot] += 1;
            assert!(pair.t <= pair.g + spec.h() * f64::from(u8::from(pair.t == spec.h() && pair.g == 0.0)));
        }
        let expected = [0.6447 + 0.05, 0.2 - 0.05, 0.1553];
        for (c, p) in counts.iter().zip(expected) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 4.0 * sigma, "{c} vs {p}");
        }
        let g = spec.g_distribution();
        assert!((g.cdf(0.0) - 0.6947).abs() < 1e-12);
        assert!((g.cdf(1.0) - 0.8447).abs() < 1e-12);
        assert!(stochastically_dominates(&base, &g, &[0.0, 1.0, 2.0, 3.0]));
    }

    #[test]
    fn g_n_examples() {
        let f = EdgeTimeDistribution::atoms(vec![(0.0, 0.64), (0.5, 0.16), (1.0, 0.2)]).unwrap();
        let g = build_g_n(&f, 0.5).unwrap();
        assert_eq!(g, f);
        assert!((g.cdf(0.0) - 0.64).abs() < 1e-15);
        assert!((g.cdf(0.5) - 0.8).abs() < 1e-12);

        let g = build_g_n(&f, 1.0).unwrap();
        assert!((g.cdf(0.0) - 0.64).abs() < 1e-15);
        assert!((g.cdf(0.99) - 0.64).abs() < 1e-15);
        assert_eq!(g.cdf(1.0), 1.0);
        // integrate the returned atoms
        let mass_at_one: f64 = g.atom_pairs().unwrap().iter().filter(|a| a.0 == 1.0).map(|a| a.1).sum();
        assert!((mass_at_one - 0.36).abs() < 1e-12);
        assert!(stochastically_dominates(&g, &f, &[0.25, 0.75]));

        assert!(build_g_n(&f, 0.7).is_err());
        assert!(build_g_n(&f, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn inverse_cdf_is_monotone_in_u(u1 in 0.0f64..1.0, u2 in 0.0f64..1.0, p in 0.0f64..1.0) {
            let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
            let laws = [
                bern(p),
                EdgeTimeDistribution::atoms(vec![(0.0, 0.3), (0.7, 0.3), (2.0, 0.4)]).unwrap(),
                EdgeTimeDistribution::exponential(1.5).unwrap(),
            ];
            for f in laws {
                prop_assert!(f.sample(lo) <= f.sample(hi));
            }
        }

        #[test]
        fn pointwise_order_gives_pathwise_order(p1 in 0.0f64..1.0, p2 in 0.0f64..1.0, u in 0.0f64..1.0) {
            let (f1, f2) = (bern(p1.min(p2)), bern(p1.max(p2)));
            prop_assert!(stochastically_dominates(&f1, &f2, &[0.0, 1.0]));
            prop_assert!(f2.sample(u) <= f1.sample(u));
        }

        #[test]
        fn shift_adds_a(u in 0.0f64..1.0, a in 0.0f64..5.0) {
            for f in [bern(0.7), EdgeTimeDistribution::exponential(2.0).unwrap()] {
                let s = f.shift(a).unwrap();
                prop_assert_eq!(s.sample(u), f.sample(u) + a);
            }
        }
    }
}
