//! Seeded Monte Carlo cross-checks of the exact results.
//!
//! Samplers are strategies behind [`Sampler`] and are created by name from
//! a [`SamplerRegistry`]. Every estimate is deterministic given the seed
//! and the thread split width: chunk `i` of the split draws from sub-stream
//! `i` of the seed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractal::FractalApprox;
use crate::geometry::{
    bary_area, cartesian_from_f64, check_band, clipped_area, gap_constraints, simplex,
    triangle_condition_constraints, CartPoint, HalfPlane, Tri,
};
use crate::probability::{
    classical_probability, delta_of_piece, p_band, p_equilateral, symmetric_probability, Mode,
};
use crate::rat::Rat;

/// Recorded in every estimate so streams can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str =
    "chacha8: rand_chacha::ChaCha8Rng::seed_from_u64(seed), set_stream(index); f64 = 53-bit mantissa of next_u64";

/// Deterministic random stream.
#[derive(Clone, Debug)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng::substream(seed, 0)
    }

    /// Independent stream `index` of `seed`.
    pub fn substream(seed: u64, index: u64) -> Rng {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Rng(inner)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.gen::<f64>()
    }
}

/// Left, middle and right lengths for break points `u` and `v`.
pub fn physical_lengths(u: f64, v: f64) -> [f64; 3] {
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    [lo, hi - lo, 1.0 - hi]
}

/// Breaks the unit stick at two independent uniform points.
pub fn sample_physical(rng: &mut Rng) -> [f64; 3] {
    let u = rng.uniform();
    let v = rng.uniform();
    physical_lengths(u, v)
}

/// A triangle with floating-point barycentric vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatTri {
    pub vertices: [[f64; 3]; 3],
}

impl FloatTri {
    pub fn from_exact(t: &Tri) -> FloatTri {
        FloatTri {
            vertices: [t.a.to_f64(), t.b.to_f64(), t.c.to_f64()],
        }
    }

    /// `(1 - sqrt r1) a + sqrt r1 (1 - r2) b + sqrt r1 r2 c`; uniform on the
    /// triangle when `r1`, `r2` are uniform.
    pub fn point(&self, r1: f64, r2: f64) -> [f64; 3] {
        let s = r1.sqrt();
        let (wa, wb, wc) = (1.0 - s, s * (1.0 - r2), s * r2);
        let [a, b, c] = self.vertices;
        [0, 1, 2].map(|i| wa * a[i] + wb * b[i] + wc * c[i])
    }

    /// Closed membership with every edge allowed to be missed by at most
    /// `tol` in the planar embedding.
    pub fn contains_within(&self, p: [f64; 3], tol: f64) -> bool {
        let q = cartesian_from_f64(p);
        let v = self.vertices.map(cartesian_from_f64);
        let cross = |o: CartPoint, a: CartPoint, b: CartPoint| {
            (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
        };
        let orient = cross(v[0], v[1], v[2]).signum();
        (0..3).all(|i| {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            let len = a.dist(b);
            orient * cross(a, b, q) / len >= -tol
        })
    }
}

pub fn sample_in_triangle(t: &Tri, rng: &mut Rng) -> Result<[f64; 3]> {
    if bary_area(t).is_zero() {
        return Err(Error::DegenerateTriangle);
    }
    let r1 = rng.uniform();
    let r2 = rng.uniform();
    Ok(FloatTri::from_exact(t).point(r1, r2))
}

/// Event whose frequency is estimated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    Triangle,
    Delta(Rat),
    Band(Rat, Rat),
}

impl Predicate {
    pub fn band(lo: Rat, hi: Rat) -> Result<Predicate> {
        check_band(&lo, &hi)?;
        Ok(Predicate::Band(lo, hi))
    }

    fn compile(&self) -> FloatPredicate {
        match self {
            Predicate::Triangle => FloatPredicate::Triangle,
            Predicate::Delta(d) => FloatPredicate::Band(f64::NEG_INFINITY, d.to_f64()),
            Predicate::Band(lo, hi) => FloatPredicate::Band(lo.to_f64(), hi.to_f64()),
        }
    }

    pub fn test(&self, l: [f64; 3]) -> bool {
        self.compile().test(l)
    }

    /// Exact area of `{predicate holds} ∩ t`.
    pub fn area_in(&self, t: &Tri) -> Rat {
        match self {
            Predicate::Triangle => clipped_area(t, &triangle_condition_constraints()),
            Predicate::Delta(d) => clipped_area(t, &gap_constraints(d)),
            // the level set {gap = lo} has measure zero
            Predicate::Band(lo, hi) => {
                clipped_area(t, &gap_constraints(hi)) - clipped_area(t, &gap_constraints(lo))
            }
        }
    }

    /// Constraints of the convex predicates; `None` for bands.
    pub fn constraints(&self) -> Option<Vec<HalfPlane>> {
        match self {
            Predicate::Triangle => Some(triangle_condition_constraints()),
            Predicate::Delta(d) => Some(gap_constraints(d)),
            Predicate::Band(..) => None,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Triangle => f.write_str("triangle"),
            Predicate::Delta(d) => write!(f, "delta={d}"),
            Predicate::Band(lo, hi) => write!(f, "band={lo},{hi}"),
        }
    }
}

impl FromStr for Predicate {
    type Err = Error;

    /// `triangle`, `delta=<p/q>` or `band=<p/q>,<p/q>`.
    fn from_str(s: &str) -> Result<Predicate> {
        if s == "triangle" {
            return Ok(Predicate::Triangle);
        }
        if let Some(d) = s.strip_prefix("delta=") {
            let d: Rat = d.parse()?;
            if d.is_negative() {
                return Err(Error::InvalidArgument(format!("delta must be >= 0, got {d}")));
            }
            return Ok(Predicate::Delta(d));
        }
        if let Some(rest) = s.strip_prefix("band=") {
            let (lo, hi) = rest
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("band needs two bounds: {s:?}")))?;
            return Predicate::band(lo.parse()?, hi.parse()?);
        }
        Err(Error::Parse(format!(
            "predicate must be triangle, delta=<p/q> or band=<p/q>,<p/q>; got {s:?}"
        )))
    }
}

#[derive(Clone, Copy)]
enum FloatPredicate {
    Triangle,
    Band(f64, f64),
}

impl FloatPredicate {
    fn test(self, l: [f64; 3]) -> bool {
        match self {
            FloatPredicate::Triangle => l.iter().all(|&x| x <= 0.5),
            FloatPredicate::Band(lo, hi) => {
                let gap = l.iter().cloned().fold(f64::MIN, f64::max)
                    - l.iter().cloned().fold(f64::MAX, f64::min);
                lo <= gap && gap <= hi
            }
        }
    }
}

/// Exact reference values an estimate is compared against.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Targets {
    /// Value of the printed closed form, where one applies.
    pub paper: Option<Rat>,
    /// Limit value derived from the audited construction, where one applies.
    pub measured: Option<Rat>,
    /// Exact probability of the event under the sampler's own measure.
    pub exact: Option<Rat>,
    /// `measured - exact`, the effect of truncating at a finite level.
    pub truncation_bias: Option<Rat>,
}

/// A sampling strategy over the simplex.
pub trait Sampler: Send + Sync {
    fn name(&self) -> &'static str;

    fn sample(&self, rng: &mut Rng) -> [f64; 3];

    fn targets(&self, predicate: &Predicate) -> Result<Targets>;
}

/// Two uniform break points on the unit stick.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhysicalSampler;

impl Sampler for PhysicalSampler {
    fn name(&self) -> &'static str {
        "physical"
    }

    fn sample(&self, rng: &mut Rng) -> [f64; 3] {
        sample_physical(rng)
    }

    fn targets(&self, predicate: &Predicate) -> Result<Targets> {
        let exact = predicate.area_in(&simplex());
        let closed = match predicate {
            Predicate::Triangle => Some(classical_probability()),
            _ => None,
        };
        Ok(Targets {
            paper: closed.clone(),
            measured: closed,
            exact: Some(exact),
            truncation_bias: None,
        })
    }
}

/// Uniform on the kept pieces of an approximation; the residual is excluded.
#[derive(Debug, Clone)]
pub struct FractalSampler {
    approx: FractalApprox,
    triangles: Vec<FloatTri>,
    cumulative: Vec<f64>,
    shares: Vec<Rat>,
}

impl FractalSampler {
    pub fn new(approx: &FractalApprox) -> Result<FractalSampler> {
        if approx.level() < 1 {
            return Err(Error::LevelTooLow {
                required: 1,
                actual: approx.level(),
            });
        }
        let kept = approx.kept_area();
        let shares = approx
            .pieces()
            .iter()
            .map(|p| p.area().checked_div(&kept))
            .collect::<Result<Vec<_>>>()?;
        let mut running = Rat::zero();
        let mut cumulative: Vec<f64> = shares
            .iter()
            .map(|s| {
                running = &running + s;
                running.to_f64()
            })
            .collect();
        *cumulative.last_mut().expect("level >= 1") = 1.0;
        Ok(FractalSampler {
            triangles: approx
                .pieces()
                .iter()
                .map(|p| FloatTri::from_exact(&p.triangle))
                .collect(),
            approx: approx.clone(),
            cumulative,
            shares,
        })
    }

    pub fn approx(&self) -> &FractalApprox {
        &self.approx
    }

    /// Exact selection probability of each piece.
    pub fn shares(&self) -> &[Rat] {
        &self.shares
    }

    pub fn triangle(&self, piece: u32) -> &FloatTri {
        &self.triangles[piece as usize - 1]
    }

    /// A point together with the one-based index of the piece it was drawn from.
    pub fn sample_tagged(&self, rng: &mut Rng) -> ([f64; 3], u32) {
        let u = rng.uniform();
        let k = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.triangles.len() - 1);
        let r1 = rng.uniform();
        let r2 = rng.uniform();
        (self.triangles[k].point(r1, r2), k as u32 + 1)
    }

    /// Draw counts per piece for `n` samples from stream 0 of `seed`.
    pub fn piece_counts(&self, n: u64, seed: u64) -> Vec<u64> {
        let mut rng = Rng::new(seed);
        let mut counts = vec![0u64; self.triangles.len()];
        for _ in 0..n {
            let (_, k) = self.sample_tagged(&mut rng);
            counts[k as usize - 1] += 1;
        }
        counts
    }

    fn ladder_index(&self, delta: &Rat) -> Option<u32> {
        self.approx
            .pieces()
            .iter()
            .find(|p| delta_of_piece(p) == *delta)
            .map(|p| p.level)
    }
}

impl Sampler for FractalSampler {
    fn name(&self) -> &'static str {
        "fractal"
    }

    fn sample(&self, rng: &mut Rng) -> [f64; 3] {
        self.sample_tagged(rng).0
    }

    fn targets(&self, predicate: &Predicate) -> Result<Targets> {
        let audit = self.approx.audit()?;
        let kept = self.approx.kept_area();
        let exact = self
            .approx
            .pieces()
            .iter()
            .map(|p| predicate.area_in(&p.triangle))
            .sum::<Rat>()
            .checked_div(&kept)?;
        let (paper, measured) = match predicate {
            Predicate::Triangle => (
                Some(symmetric_probability(Mode::Paper, None)?),
                Some(symmetric_probability(Mode::Measured, Some(&audit))?),
            ),
            Predicate::Delta(d) => match self.ladder_index(d) {
                Some(i) => (
                    Some(p_equilateral(i, Mode::Paper, None)?),
                    Some(p_equilateral(i, Mode::Measured, Some(&audit))?),
                ),
                None => (None, None),
            },
            Predicate::Band(lo, hi) => match (self.ladder_index(lo), self.ladder_index(hi)) {
                (Some(j), Some(i)) if j == i + 1 => (
                    Some(p_band(i, Mode::Paper, None)?),
                    Some(p_band(i, Mode::Measured, Some(&audit))?),
                ),
                _ => (None, None),
            },
        };
        let truncation_bias = measured.as_ref().map(|m| m - &exact);
        Ok(Targets {
            paper,
            measured,
            exact: Some(exact),
            truncation_bias,
        })
    }
}

pub type SamplerFactory = fn(Option<&FractalApprox>) -> Result<Box<dyn Sampler>>;

/// Name-keyed table of sampler constructors.
pub struct SamplerRegistry {
    entries: BTreeMap<&'static str, SamplerFactory>,
}

impl SamplerRegistry {
    pub fn empty() -> SamplerRegistry {
        SamplerRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> SamplerRegistry {
        let mut reg = SamplerRegistry::empty();
        reg.register("physical", |_| Ok(Box::new(PhysicalSampler)));
        reg.register("fractal", |approx| {
            let approx = approx.ok_or_else(|| {
                Error::InvalidArgument("fractal sampler needs an approximation".into())
            })?;
            Ok(Box::new(FractalSampler::new(approx)?))
        });
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: SamplerFactory) {
        self.entries.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn create(&self, name: &str, approx: Option<&FractalApprox>) -> Result<Box<dyn Sampler>> {
        let factory = self.entries.get(name).ok_or_else(|| Error::Unknown {
            kind: "sampler",
            name: name.to_string(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })?;
        factory(approx)
    }
}

impl Default for SamplerRegistry {
    fn default() -> Self {
        SamplerRegistry::builtin()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub sampler: String,
    pub predicate: String,
    pub threads: usize,
    pub rng: &'static str,
    pub targets: Targets,
}

impl Estimate {
    pub fn from_counts(hits: u64, n: u64) -> (f64, f64) {
        let p = hits as f64 / n as f64;
        (p, (p * (1.0 - p) / n as f64).sqrt())
    }

    /// `|p_hat - target| / stderr`; infinite when stderr is zero and they differ.
    pub fn z_score(&self, target: &Rat) -> f64 {
        let diff = (self.p_hat - target.to_f64()).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("estimate serializes")
    }
}

/// Chunk sizes for splitting `n` draws across `width` streams.
pub fn split_counts(n: u64, width: usize) -> Vec<u64> {
    let width = width.max(1) as u64;
    (0..width)
        .map(|i| n / width + u64::from(i < n % width))
        .collect()
}

fn count_hits(
    sampler: &dyn Sampler,
    predicate: FloatPredicate,
    n: u64,
    seed: u64,
    stream: u64,
) -> u64 {
    let mut rng = Rng::substream(seed, stream);
    (0..n)
        .filter(|_| predicate.test(sampler.sample(&mut rng)))
        .count() as u64
}

/// Frequency of `predicate` over `n` draws. Deterministic given `seed` and
/// `threads`; chunk `i` uses sub-stream `i`.
pub fn estimate_probability(
    sampler: &dyn Sampler,
    predicate: &Predicate,
    n: u64,
    seed: u64,
    threads: usize,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let threads = threads.max(1);
    let compiled = predicate.compile();
    let chunks = split_counts(n, threads);
    let hits: u64 = if threads == 1 {
        count_hits(sampler, compiled, n, seed, 0)
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .enumerate()
                .map(|(i, &m)| {
                    scope.spawn(move || count_hits(sampler, compiled, m, seed, i as u64))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampling thread panicked"))
                .sum()
        })
    };
    let (p_hat, stderr) = Estimate::from_counts(hits, n);
    Ok(Estimate {
        p_hat,
        stderr,
        n,
        seed,
        sampler: sampler.name().to_string(),
        predicate: predicate.to_string(),
        threads,
        rng: RNG_ALGORITHM,
        targets: sampler.targets(predicate)?,
    })
}

/// Cell of the simplex's medial subdivision: corner `i` (index 0..3) when
/// `l_i > 1/2`, otherwise the medial triangle (index 3).
pub fn medial_cell(l: [f64; 3]) -> usize {
    l.iter().position(|&x| x > 0.5).unwrap_or(3)
}

/// Counts of physical samples per medial cell, stream 0 of `seed`.
pub fn physical_cell_counts(n: u64, seed: u64) -> [u64; 4] {
    let mut rng = Rng::new(seed);
    let mut counts = [0u64; 4];
    for _ in 0..n {
        counts[medial_cell(sample_physical(&mut rng))] += 1;
    }
    counts
}

/// Merges trailing cells until every expected count reaches `min_expected`.
/// Returns pooled observed counts and pooled probabilities.
pub fn pool_tail(
    observed: &[u64],
    probs: &[f64],
    n: u64,
    min_expected: f64,
) -> (Vec<u64>, Vec<f64>) {
    let mut obs = Vec::new();
    let mut pr = Vec::new();
    let (mut acc_o, mut acc_p) = (0u64, 0.0f64);
    for (&o, &p) in observed.iter().zip(probs).rev() {
        acc_o += o;
        acc_p += p;
        if acc_p * n as f64 >= min_expected {
            obs.push(acc_o);
            pr.push(acc_p);
            acc_o = 0;
            acc_p = 0.0;
        }
    }
    if acc_p > 0.0 || acc_o > 0 {
        match (obs.last_mut(), pr.last_mut()) {
            (Some(o), Some(p)) => {
                *o += acc_o;
                *p += acc_p;
            }
            _ => {
                obs.push(acc_o);
                pr.push(acc_p);
            }
        }
    }
    obs.reverse();
    pr.reverse();
    (obs, pr)
}

/// Pearson statistic `sum (O - E)^2 / E` with `E = n p`.
pub fn chi_square_statistic(observed: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}
