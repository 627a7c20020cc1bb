//! Exact barycentric geometry on the 2-simplex `{l1 + l2 + l3 = 1, li >= 0}`.
//!
//! A point is a triple of stick lengths. Areas are relative to the whole
//! simplex, so probabilities under the uniform measure are plain areas.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// A point of the simplex: three stick lengths summing to one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct BaryPoint([Rat; 3]);

impl BaryPoint {
    pub fn new(l1: Rat, l2: Rat, l3: Rat) -> Result<BaryPoint> {
        let coords = [l1, l2, l3];
        let sum: Rat = coords.iter().sum();
        let in_range = coords.iter().all(|l| !l.is_negative() && *l <= Rat::one());
        if sum != Rat::one() || !in_range {
            return Err(Error::NotOnSimplex(format!(
                "({}, {}, {})",
                coords[0], coords[1], coords[2]
            )));
        }
        Ok(BaryPoint(coords))
    }

    /// Builds `(a, b, c) / den`; convenient for dyadic and other lattice points.
    pub fn from_ints(a: i64, b: i64, c: i64, den: i64) -> Result<BaryPoint> {
        BaryPoint::new(Rat::new(a, den)?, Rat::new(b, den)?, Rat::new(c, den)?)
    }

    /// Parses `"p/q,p/q,p/q"`.
    pub fn parse(s: &str) -> Result<BaryPoint> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected three coordinates: {s:?}")));
        }
        BaryPoint::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?)
    }

    /// Callers guarantee the simplex invariant (affine combinations of valid points).
    pub(crate) fn from_coords_unchecked(coords: [Rat; 3]) -> BaryPoint {
        debug_assert_eq!(coords.iter().sum::<Rat>(), Rat::one());
        BaryPoint(coords)
    }

    pub fn coords(&self) -> &[Rat; 3] {
        &self.0
    }

    pub fn l1(&self) -> &Rat {
        &self.0[0]
    }

    pub fn l2(&self) -> &Rat {
        &self.0[1]
    }

    pub fn l3(&self) -> &Rat {
        &self.0[2]
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64()]
    }

    pub fn max_coord(&self) -> &Rat {
        self.0.iter().max().expect("three coordinates")
    }

    pub fn min_coord(&self) -> &Rat {
        self.0.iter().min().expect("three coordinates")
    }
}

impl fmt::Debug for BaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl<'de> Deserialize<'de> for BaryPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[Rat; 3]>::deserialize(d)?;
        BaryPoint::new(a, b, c).map_err(serde::de::Error::custom)
    }
}

/// Triangle with ordered vertices. Degenerate triangles are allowed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Tri {
    pub a: BaryPoint,
    pub b: BaryPoint,
    pub c: BaryPoint,
}

impl Tri {
    pub fn new(a: BaryPoint, b: BaryPoint, c: BaryPoint) -> Tri {
        Tri { a, b, c }
    }

    pub fn vertices(&self) -> [&BaryPoint; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn vertex(&self, apex: Apex) -> &BaryPoint {
        self.vertices()[apex.index()]
    }
}

/// Vertex index of a triangle, `1..=3`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Apex(u8);

impl Apex {
    pub const FIRST: Apex = Apex(1);
    pub const SECOND: Apex = Apex(2);
    pub const THIRD: Apex = Apex(3);
    pub const ALL: [Apex; 3] = [Apex::FIRST, Apex::SECOND, Apex::THIRD];

    pub fn new(i: u8) -> Result<Apex> {
        if (1..=3).contains(&i) {
            Ok(Apex(i))
        } else {
            Err(Error::InvalidArgument(format!(
                "apex index {i} not in 1..=3"
            )))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based position.
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }

    /// The two other vertex indices, in increasing order.
    pub fn others(self) -> (Apex, Apex) {
        match self.0 {
            1 => (Apex(2), Apex(3)),
            2 => (Apex(1), Apex(3)),
            _ => (Apex(1), Apex(2)),
        }
    }
}

impl TryFrom<u8> for Apex {
    type Error = Error;
    fn try_from(i: u8) -> Result<Apex> {
        Apex::new(i)
    }
}

impl From<Apex> for u8 {
    fn from(a: Apex) -> u8 {
        a.0
    }
}

/// Which half of an isoceles corner survives a halving.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::First => "first",
            Side::Second => "second",
        })
    }
}

/// Result of an exact point-in-triangle test.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

impl Containment {
    /// Closed-set membership.
    pub fn is_contained(self) -> bool {
        self != Containment::Outside
    }
}

/// Planar point used only for rendering.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct CartPoint {
    pub x: f64,
    pub y: f64,
}

impl CartPoint {
    pub fn dist(self, other: CartPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

fn unit(i: usize) -> BaryPoint {
    let mut c = [Rat::zero(), Rat::zero(), Rat::zero()];
    c[i] = Rat::one();
    BaryPoint(c)
}

/// The whole sample space, vertices `(1,0,0)`, `(0,1,0)`, `(0,0,1)`.
pub fn simplex() -> Tri {
    Tri::new(unit(0), unit(1), unit(2))
}

/// The equilateral point `(1/3, 1/3, 1/3)`.
pub fn centroid() -> BaryPoint {
    let third = Rat::frac(1, 3);
    BaryPoint([third.clone(), third.clone(), third])
}

fn det3(a: &[Rat; 3], b: &[Rat; 3], c: &[Rat; 3]) -> Rat {
    let m0 = &b[1] * &c[2] - &b[2] * &c[1];
    let m1 = &b[0] * &c[2] - &b[2] * &c[0];
    let m2 = &b[0] * &c[1] - &b[1] * &c[0];
    &a[0] * m0 - &a[1] * m1 + &a[2] * m2
}

fn signed_area(a: &BaryPoint, b: &BaryPoint, c: &BaryPoint) -> Rat {
    det3(&a.0, &b.0, &c.0)
}

/// Area relative to the simplex: `|det|` of the barycentric rows.
pub fn bary_area(t: &Tri) -> Rat {
    signed_area(&t.a, &t.b, &t.c).abs()
}

pub fn midpoint(p: &BaryPoint, q: &BaryPoint) -> BaryPoint {
    BaryPoint([
        (&p.0[0] + &q.0[0]).half(),
        (&p.0[1] + &q.0[1]).half(),
        (&p.0[2] + &q.0[2]).half(),
    ])
}

/// Triangle of edge midpoints `(mid(a,b), mid(a,c), mid(b,c))`.
pub fn medial_triangle(t: &Tri) -> Tri {
    Tri::new(
        midpoint(&t.a, &t.b),
        midpoint(&t.a, &t.c),
        midpoint(&t.b, &t.c),
    )
}

/// Corner at `apex`: `(v_i, mid(v_i, v_j), mid(v_i, v_k))` with `j < k`.
pub fn corner(t: &Tri, apex: Apex) -> Tri {
    let (j, k) = apex.others();
    let v = t.vertex(apex);
    Tri::new(
        v.clone(),
        midpoint(v, t.vertex(j)),
        midpoint(v, t.vertex(k)),
    )
}

/// The three corner triangles, indexed by apex. With the medial triangle
/// they tile `t`.
pub fn corner_subtriangles(t: &Tri) -> [Tri; 3] {
    Apex::ALL.map(|apex| corner(t, apex))
}

/// Half of an isoceles corner `(apex, base1, base2)` cut along the axis
/// from the apex to the base midpoint.
pub fn half_corner(corner: &Tri, side: Side) -> Tri {
    let base_mid = midpoint(&corner.b, &corner.c);
    let kept = match side {
        Side::First => corner.b.clone(),
        Side::Second => corner.c.clone(),
    };
    Tri::new(corner.a.clone(), kept, base_mid)
}

/// The three lengths form a (possibly degenerate) triangle: every `li <= 1/2`.
pub fn triangle_condition(p: &BaryPoint) -> bool {
    let half = Rat::frac(1, 2);
    p.0.iter().all(|l| *l <= half)
}

/// `max |li - lj|`, which equals `max(l) - min(l)`.
pub fn max_pairwise_gap(p: &BaryPoint) -> Rat {
    p.max_coord() - p.min_coord()
}

pub fn is_delta_equilateral(p: &BaryPoint, delta: &Rat) -> bool {
    max_pairwise_gap(p) <= *delta
}

/// `delta <= gap <= delta_prime`, closed at both ends.
pub fn is_band_equilateral(p: &BaryPoint, delta: &Rat, delta_prime: &Rat) -> Result<bool> {
    check_band(delta, delta_prime)?;
    let gap = max_pairwise_gap(p);
    Ok(*delta <= gap && gap <= *delta_prime)
}

pub(crate) fn check_band(lo: &Rat, hi: &Rat) -> Result<()> {
    if lo.is_negative() || lo > hi {
        return Err(Error::InvalidBand {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    Ok(())
}

/// Exact point-in-triangle classification from the signs of the three
/// sub-determinants.
pub fn contains(t: &Tri, p: &BaryPoint) -> Result<Containment> {
    Ok(Locator::new(t)?.locate(p))
}

fn cross(u: &[Rat; 3], v: &[Rat; 3]) -> [Rat; 3] {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

/// Positive integer multiple of `v`: each numerator times the other two
/// denominators. Signs of linear forms are unchanged.
pub(crate) fn integer_multiple(v: &[Rat; 3]) -> [BigInt; 3] {
    let d = [v[0].denom(), v[1].denom(), v[2].denom()];
    [
        v[0].numer() * d[1] * d[2],
        v[1].numer() * d[0] * d[2],
        v[2].numer() * d[0] * d[1],
    ]
}

/// Containment test for one triangle with the edge functionals precomputed
/// in integers, so a query is three integer dot products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Locator {
    /// Oriented so that interior points give positive values.
    edges: [[BigInt; 3]; 3],
}

impl Locator {
    pub fn new(t: &Tri) -> Result<Locator> {
        let (a, b, c) = (&t.a.0, &t.b.0, &t.c.0);
        let orient = det3(a, b, c);
        if orient.is_zero() {
            return Err(Error::DegenerateTriangle);
        }
        let mut edges = [cross(b, c), cross(c, a), cross(a, b)].map(|e| integer_multiple(&e));
        if orient.is_negative() {
            for e in edges.iter_mut() {
                for x in e.iter_mut() {
                    *x = -&*x;
                }
            }
        }
        Ok(Locator { edges })
    }

    pub fn locate(&self, p: &BaryPoint) -> Containment {
        self.locate_integer(&integer_multiple(&p.0))
    }

    /// `q` is a positive multiple of a point, from [`integer_multiple`].
    pub(crate) fn locate_integer(&self, q: &[BigInt; 3]) -> Containment {
        let mut on_edge = false;
        for e in &self.edges {
            let d = &e[0] * &q[0] + &e[1] * &q[1] + &e[2] * &q[2];
            if d.is_negative() {
                return Containment::Outside;
            }
            on_edge |= d.is_zero();
        }
        if on_edge {
            Containment::Boundary
        } else {
            Containment::Inside
        }
    }
}

/// Side of the equilateral image of the simplex.
pub fn embedding_side() -> f64 {
    2.0 * 3f64.sqrt() / 3.0
}

/// Images of the three simplex vertices. The triangle has height 1, so
/// each barycentric coordinate is the distance to the opposite side.
pub fn embedding_vertices() -> [CartPoint; 3] {
    let s = embedding_side();
    [
        CartPoint { x: 0.0, y: 0.0 },
        CartPoint { x: s, y: 0.0 },
        CartPoint { x: s / 2.0, y: 1.0 },
    ]
}

pub fn to_cartesian(p: &BaryPoint) -> CartPoint {
    cartesian_from_f64(p.to_f64())
}

pub fn cartesian_from_f64(l: [f64; 3]) -> CartPoint {
    let v = embedding_vertices();
    CartPoint {
        x: l[0] * v[0].x + l[1] * v[1].x + l[2] * v[2].x,
        y: l[0] * v[0].y + l[1] * v[1].y + l[2] * v[2].y,
    }
}

/// Exact squared distance between the embedded images of `p` and `q`.
/// For a displacement `d` with zero sum, `|d|^2 = -s^2 (d1 d2 + d1 d3 + d2 d3)`
/// where `s^2 = 4/3`.
pub fn embedded_distance_sq(p: &BaryPoint, q: &BaryPoint) -> Rat {
    let d: Vec<Rat> = (0..3).map(|i| &p.0[i] - &q.0[i]).collect();
    let cross = &d[0] * &d[1] + &d[0] * &d[2] + &d[1] * &d[2];
    -(Rat::frac(4, 3) * cross)
}

/// Linear constraint `coeffs . l <= bound`.
#[derive(Clone, Debug)]
pub struct HalfPlane {
    pub coeffs: [Rat; 3],
    pub bound: Rat,
}

impl HalfPlane {
    fn excess(&self, p: &BaryPoint) -> Rat {
        let dot: Rat = (0..3).map(|i| &self.coeffs[i] * &p.0[i]).sum();
        dot - &self.bound
    }

    /// `li - lj <= bound`.
    pub fn difference(i: usize, j: usize, bound: Rat) -> HalfPlane {
        let mut coeffs = [Rat::zero(), Rat::zero(), Rat::zero()];
        coeffs[i] = Rat::one();
        coeffs[j] = -Rat::one();
        HalfPlane { coeffs, bound }
    }

    /// `li <= bound`.
    pub fn coordinate(i: usize, bound: Rat) -> HalfPlane {
        let mut coeffs = [Rat::zero(), Rat::zero(), Rat::zero()];
        coeffs[i] = Rat::one();
        HalfPlane { coeffs, bound }
    }
}

/// The six constraints whose intersection is `{max pairwise gap <= delta}`.
pub fn gap_constraints(delta: &Rat) -> Vec<HalfPlane> {
    let mut out = Vec::with_capacity(6);
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                out.push(HalfPlane::difference(i, j, delta.clone()));
            }
        }
    }
    out
}

/// The three constraints whose intersection is the triangle-forming region.
pub fn triangle_condition_constraints() -> Vec<HalfPlane> {
    (0..3)
        .map(|i| HalfPlane::coordinate(i, Rat::frac(1, 2)))
        .collect()
}

/// Exact area of `t` intersected with every half-plane, by successive
/// convex clipping.
pub fn clipped_area(t: &Tri, constraints: &[HalfPlane]) -> Rat {
    let mut poly: Vec<BaryPoint> = t.vertices().into_iter().cloned().collect();
    for hp in constraints {
        if poly.is_empty() {
            break;
        }
        let mut next = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let cur = &poly[i];
            let nxt = &poly[(i + 1) % poly.len()];
            let ec = hp.excess(cur);
            let en = hp.excess(nxt);
            let cur_in = !ec.is_positive();
            let nxt_in = !en.is_positive();
            if cur_in {
                next.push(cur.clone());
            }
            if cur_in != nxt_in && ec != en {
                let s = ec.checked_div(&(&ec - &en)).expect("distinct excesses");
                let coords = [0, 1, 2].map(|k| &cur.0[k] + &s * (&nxt.0[k] - &cur.0[k]));
                let p = BaryPoint::from_coords_unchecked(coords);
                if !(nxt_in && en.is_zero()) && !(cur_in && ec.is_zero()) {
                    next.push(p);
                }
            }
        }
        poly = next;
    }
    if poly.len() < 3 {
        return Rat::zero();
    }
    let origin = &poly[0];
    poly.windows(2)
        .skip(1)
        .map(|w| signed_area(origin, &w[0], &w[1]))
        .sum::<Rat>()
        .abs()
}
