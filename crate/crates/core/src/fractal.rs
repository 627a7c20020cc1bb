//! Level-n approximations of the symmetric sample space.
//!
//! Starting from the simplex, each level splits the current residual into
//! its medial triangle and three corners. One corner is chosen by the
//! policy, half of it is kept as a piece, the rest is deleted, and the
//! medial triangle becomes the next residual.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    bary_area, contains, corner, half_corner, integer_multiple, medial_triangle, simplex, Apex,
    BaryPoint, Containment, Locator, Tri,
};
use crate::policy::{self, Choice, Policy};
use crate::probability::series_total;
use crate::rat::Rat;

/// Construction depth at which denominators are still comfortable.
pub const DEFAULT_LEVEL_CAP: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub level: u32,
    pub triangle: Tri,
    /// The residual this piece was cut from.
    pub parent: Tri,
}

impl Piece {
    pub fn area(&self) -> Rat {
        bary_area(&self.triangle)
    }
}

#[derive(Clone, Debug)]
pub struct FractalApprox {
    level: u32,
    cap: u32,
    pieces: Vec<Piece>,
    residual: Tri,
    policy: Policy,
    locators: Vec<Locator>,
}

/// Where a point falls in an approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Piece(u32),
    Residual,
    Outside,
}

fn refine(parent: &Tri, level: u32, policy: &Policy) -> (Piece, Tri) {
    let kept_corner = corner(parent, policy.corner(level));
    let piece = Piece {
        level,
        triangle: half_corner(&kept_corner, policy.half(level)),
        parent: parent.clone(),
    };
    (piece, medial_triangle(parent))
}

impl FractalApprox {
    pub fn build(level: u32, policy: Policy) -> Result<FractalApprox> {
        FractalApprox::build_with_cap(level, policy, DEFAULT_LEVEL_CAP)
    }

    pub fn build_default(level: u32) -> Result<FractalApprox> {
        FractalApprox::build(level, policy::default_policy())
    }

    pub fn build_with_cap(level: u32, policy: Policy, cap: u32) -> Result<FractalApprox> {
        if level > cap {
            return Err(Error::LevelCap { level, cap });
        }
        let mut approx = FractalApprox {
            level: 0,
            cap,
            pieces: Vec::with_capacity(level as usize),
            residual: simplex(),
            policy,
            locators: Vec::with_capacity(level as usize),
        };
        for _ in 0..level {
            approx.refine_in_place();
        }
        Ok(approx)
    }

    fn refine_in_place(&mut self) {
        let next = self.level + 1;
        let (piece, residual) = refine(&self.residual, next, &self.policy);
        self.locators
            .push(Locator::new(&piece.triangle).expect("pieces are non-degenerate"));
        self.pieces.push(piece);
        self.residual = residual;
        self.level = next;
    }

    /// One more level; existing pieces are kept as they are.
    pub fn step(&self) -> Result<FractalApprox> {
        if self.level >= self.cap {
            return Err(Error::LevelCap {
                level: self.level + 1,
                cap: self.cap,
            });
        }
        let mut next = self.clone();
        next.refine_in_place();
        Ok(next)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Piece `k`, one-based.
    pub fn piece(&self, k: u32) -> Option<&Piece> {
        self.pieces.get((k as usize).checked_sub(1)?)
    }

    pub fn residual(&self) -> &Tri {
        &self.residual
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn choices(&self) -> Vec<Choice> {
        policy::choices(self.policy.as_ref(), self.level)
    }

    pub fn kept_area(&self) -> Rat {
        self.pieces.iter().map(Piece::area).sum()
    }

    /// Triangles discarded at `level`: the two other corners and the other half.
    pub fn deleted_at(&self, level: u32) -> Option<Vec<Tri>> {
        let piece = self.piece(level)?;
        let apex = self.policy.corner(level);
        let mut out: Vec<Tri> = Apex::ALL
            .into_iter()
            .filter(|&a| a != apex)
            .map(|a| corner(&piece.parent, a))
            .collect();
        let kept_corner = corner(&piece.parent, apex);
        out.push(half_corner(&kept_corner, self.policy.half(level).flip()));
        Some(out)
    }

    /// Lowest-index closed piece containing `p`, else the residual, else outside.
    pub fn classify_point(&self, p: &BaryPoint) -> Region {
        let q = integer_multiple(p.coords());
        for (piece, locator) in self.pieces.iter().zip(&self.locators) {
            if locator.locate_integer(&q).is_contained() {
                return Region::Piece(piece.level);
            }
        }
        if contains(&self.residual, p)
            .map(|c| c.is_contained())
            .unwrap_or(false)
        {
            return Region::Residual;
        }
        Region::Outside
    }

    /// True when `p` avoids the closed residual and every piece boundary,
    /// so its region is unambiguous.
    pub fn is_generic(&self, p: &BaryPoint) -> bool {
        let off_residual = contains(&self.residual, p)
            .map(|c| c == Containment::Outside)
            .unwrap_or(false);
        let q = integer_multiple(p.coords());
        off_residual
            && self
                .locators
                .iter()
                .all(|l| l.locate_integer(&q) != Containment::Boundary)
    }

    pub fn audit(&self) -> Result<AuditReport> {
        AuditReport::new(self)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ApproxDoc::from(self)).expect("approximation serializes")
    }

    /// One row per piece: level, area, then the nine vertex coordinates.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["level".to_string(), "area".to_string()];
        for v in ["a", "b", "c"] {
            for l in ["l1", "l2", "l3"] {
                header.push(format!("{v}_{l}"));
            }
        }
        w.write_record(&header).map_err(csv_err)?;
        for piece in &self.pieces {
            let mut row = vec![piece.level.to_string(), piece.area().to_string()];
            for v in piece.triangle.vertices() {
                row.extend(v.coords().iter().map(Rat::to_string));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        finish_csv(w)
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Serialize(e.to_string())
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

#[derive(Serialize)]
struct TriDoc<'a> {
    vertices: [&'a BaryPoint; 3],
    area: Rat,
}

#[derive(Serialize)]
struct PieceDoc<'a> {
    level: u32,
    vertices: [&'a BaryPoint; 3],
    area: Rat,
}

#[derive(Serialize)]
struct PolicyDoc {
    name: String,
    choices: Vec<Choice>,
}

#[derive(Serialize)]
struct ApproxDoc<'a> {
    level: u32,
    policy: PolicyDoc,
    pieces: Vec<PieceDoc<'a>>,
    residual: TriDoc<'a>,
}

impl<'a> From<&'a FractalApprox> for ApproxDoc<'a> {
    fn from(a: &'a FractalApprox) -> Self {
        ApproxDoc {
            level: a.level,
            policy: PolicyDoc {
                name: a.policy.spec(),
                choices: a.choices(),
            },
            pieces: a
                .pieces
                .iter()
                .map(|p| PieceDoc {
                    level: p.level,
                    vertices: p.triangle.vertices(),
                    area: p.area(),
                })
                .collect(),
            residual: TriDoc {
                vertices: a.residual.vertices(),
                area: bary_area(&a.residual),
            },
        }
    }
}

/// Limit totals of the kept-piece series for a given first area and ratio.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitTotals {
    pub first_piece_area: Rat,
    pub ratio: Rat,
    /// Area of the limit set.
    pub total_area: Rat,
    /// Area of its triangle-forming part (pieces 2, 3, ...).
    pub triangle_area: Rat,
    pub p_triangle: Rat,
}

impl LimitTotals {
    pub fn from_series(first: Rat, ratio: Rat) -> Result<LimitTotals> {
        let total_area = series_total(&first, &ratio)?;
        let triangle_area = series_total(&(&first * &ratio), &ratio)?;
        let p_triangle = triangle_area.checked_div(&total_area)?;
        Ok(LimitTotals {
            first_piece_area: first,
            ratio,
            total_area,
            triangle_area,
            p_triangle,
        })
    }

    /// The printed values: first piece 1/8, ratio 1/8.
    pub fn paper() -> LimitTotals {
        LimitTotals::from_series(Rat::frac(1, 8), Rat::frac(1, 8)).expect("ratio < 1")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub quantity: &'static str,
    pub paper: Rat,
    pub measured: Rat,
}

/// Exact area bookkeeping of an approximation, with the geometry-forced
/// limit totals next to the printed ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub level: u32,
    pub policy: String,
    pub piece_areas: Vec<Rat>,
    /// `area(T_k) / area(T_{k-1})` for `k = 2..=level`.
    pub ratios: Vec<Rat>,
    pub ratios_constant: bool,
    pub kept_total: Rat,
    pub deleted_total: Rat,
    pub residual_area: Rat,
    pub expected_residual_area: Rat,
    /// kept + deleted + residual, which must be exactly 1.
    pub conservation_sum: Rat,
    pub conserved: bool,
    pub measured: LimitTotals,
    pub paper: LimitTotals,
    pub divergences: Vec<Divergence>,
    pub diverges_from_paper: bool,
}

impl AuditReport {
    pub fn new(a: &FractalApprox) -> Result<AuditReport> {
        if a.level < 1 {
            return Err(Error::LevelTooLow {
                required: 1,
                actual: a.level,
            });
        }
        let piece_areas: Vec<Rat> = a.pieces.iter().map(Piece::area).collect();
        let ratios = piece_areas
            .windows(2)
            .map(|w| w[1].checked_div(&w[0]))
            .collect::<Result<Vec<_>>>()?;
        let ratios_constant = ratios.windows(2).all(|w| w[0] == w[1]);
        // With a single piece, the residual shrink factor is the only ratio on offer.
        let ratio = match ratios.first() {
            Some(r) => r.clone(),
            None => bary_area(&a.residual).checked_div(&bary_area(&a.pieces[0].parent))?,
        };
        let kept_total: Rat = piece_areas.iter().sum();
        let deleted_total: Rat = (1..=a.level)
            .flat_map(|k| a.deleted_at(k).unwrap_or_default())
            .map(|t| bary_area(&t))
            .sum();
        let residual_area = bary_area(&a.residual);
        let expected_residual_area = Rat::one().checked_div(&Rat::int(4).pow(a.level as i32)?)?;
        let conservation_sum = &kept_total + &deleted_total + &residual_area;
        let conserved = conservation_sum == Rat::one();

        let measured = LimitTotals::from_series(piece_areas[0].clone(), ratio)?;
        let paper = LimitTotals::paper();
        let divergences: Vec<Divergence> = [
            ("ratio", &paper.ratio, &measured.ratio),
            (
                "first_piece_area",
                &paper.first_piece_area,
                &measured.first_piece_area,
            ),
            ("total_area", &paper.total_area, &measured.total_area),
            (
                "triangle_area",
                &paper.triangle_area,
                &measured.triangle_area,
            ),
            ("p_triangle", &paper.p_triangle, &measured.p_triangle),
        ]
        .into_iter()
        .filter(|(_, p, m)| p != m)
        .map(|(quantity, p, m)| Divergence {
            quantity,
            paper: p.clone(),
            measured: m.clone(),
        })
        .collect();

        Ok(AuditReport {
            level: a.level,
            policy: a.policy.spec(),
            diverges_from_paper: !divergences.is_empty(),
            piece_areas,
            ratios,
            ratios_constant,
            kept_total,
            deleted_total,
            residual_area,
            expected_residual_area,
            conservation_sum,
            conserved,
            measured,
            paper,
            divergences,
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("audit serializes")
    }

    /// One row per piece: level, area, ratio to the previous piece.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["level", "area", "ratio_to_previous"])
            .map_err(csv_err)?;
        for (i, area) in self.piece_areas.iter().enumerate() {
            let ratio = if i == 0 {
                String::new()
            } else {
                self.ratios[i - 1].to_string()
            };
            w.write_record([(i + 1).to_string(), area.to_string(), ratio])
                .map_err(csv_err)?;
        }
        finish_csv(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::centroid;
    use crate::policy::resolve;

    fn pt(a: i64, b: i64, c: i64, den: i64) -> BaryPoint {
        BaryPoint::from_ints(a, b, c, den).unwrap()
    }

    #[test]
    fn level_zero_is_the_simplex() {
        let a = FractalApprox::build_default(0).unwrap();
        assert!(a.pieces().is_empty());
        assert_eq!(a.residual(), &simplex());
        assert!(a.audit().is_err());
    }

    #[test]
    fn first_levels() {
        let a = FractalApprox::build_default(2).unwrap();
        assert_eq!(
            a.pieces()[0].triangle,
            Tri::new(pt(0, 0, 1, 1), pt(1, 0, 1, 2), pt(1, 1, 2, 4))
        );
        assert_eq!(a.pieces()[0].area(), Rat::frac(1, 8));
        assert_eq!(a.pieces()[1].area(), Rat::frac(1, 32));
        assert_eq!(bary_area(a.residual()), Rat::frac(1, 16));
    }

    #[test]
    fn cap_is_enforced() {
        let p = policy::default_policy();
        assert!(matches!(
            FractalApprox::build_with_cap(5, p.clone(), 4),
            Err(Error::LevelCap { level: 5, cap: 4 })
        ));
        let a = FractalApprox::build_with_cap(4, p, 4).unwrap();
        assert!(a.step().is_err());
        assert!(FractalApprox::build_default(65).is_err());
    }

    #[test]
    fn step_extends_by_one() {
        let a = FractalApprox::build_default(3).unwrap();
        let b = a.step().unwrap();
        assert_eq!(b.level(), 4);
        assert_eq!(&b.pieces()[..3], a.pieces());
        assert_eq!(
            bary_area(b.residual()) * Rat::int(4),
            bary_area(a.residual())
        );
        let c = FractalApprox::build_default(4).unwrap();
        assert_eq!(b.pieces(), c.pieces());
        assert_eq!(b.residual(), c.residual());
    }

    #[test]
    fn classification() {
        let a = FractalApprox::build_default(3).unwrap();
        assert_eq!(a.classify_point(&pt(0, 0, 1, 1)), Region::Piece(1));
        assert_eq!(a.classify_point(&centroid()), Region::Residual);
        let b = FractalApprox::build_default(1).unwrap();
        assert_eq!(b.classify_point(&pt(0, 1, 0, 1)), Region::Outside);
        assert_eq!(
            FractalApprox::build_default(0)
                .unwrap()
                .classify_point(&centroid()),
            Region::Residual
        );
    }

    #[test]
    fn deleted_triangles() {
        let a = FractalApprox::build_default(1).unwrap();
        let deleted = a.deleted_at(1).unwrap();
        assert_eq!(deleted.len(), 3);
        let areas: Vec<Rat> = deleted.iter().map(bary_area).collect();
        assert_eq!(
            areas,
            vec![Rat::frac(1, 4), Rat::frac(1, 4), Rat::frac(1, 8)]
        );
        assert!(a.deleted_at(2).is_none());
    }

    #[test]
    fn audit_at_twelve() {
        let r = FractalApprox::build_default(12).unwrap().audit().unwrap();
        assert!(r.conserved);
        assert_eq!(r.residual_area, Rat::frac(1, 16_777_216));
        assert!(r.ratios.iter().all(|x| *x == Rat::frac(1, 4)));
        assert_eq!(r.measured.total_area, Rat::frac(1, 6));
        assert_eq!(r.measured.triangle_area, Rat::frac(1, 24));
        assert_eq!(r.measured.p_triangle, Rat::frac(1, 4));
        assert_eq!(r.paper.total_area, Rat::frac(1, 7));
        assert_eq!(r.paper.triangle_area, Rat::frac(1, 56));
        assert_eq!(r.paper.p_triangle, Rat::frac(1, 8));
        assert!(r.diverges_from_paper);
        let names: Vec<_> = r.divergences.iter().map(|d| d.quantity).collect();
        assert_eq!(
            names,
            vec!["ratio", "total_area", "triangle_area", "p_triangle"]
        );
    }

    #[test]
    fn single_level_audit_uses_residual_shrink() {
        let r = FractalApprox::build_default(1).unwrap().audit().unwrap();
        assert!(r.ratios.is_empty());
        assert_eq!(r.measured.ratio, Rat::frac(1, 4));
        assert!(r.conserved);
    }

    #[test]
    fn json_shape() {
        let a = FractalApprox::build(1, resolve("mirror").unwrap()).unwrap();
        let v = a.to_json_value();
        assert_eq!(v["level"], 1);
        assert_eq!(v["policy"]["name"], "mirror");
        assert_eq!(v["policy"]["choices"][0]["apex"], 3);
        assert_eq!(v["policy"]["choices"][0]["half"], "second");
        assert_eq!(v["pieces"][0]["area"], "1/8");
        assert_eq!(v["pieces"][0]["vertices"][0][2], "1");
        assert_eq!(v["residual"]["area"], "1/4");
    }

    #[test]
    fn csv_has_one_row_per_piece() {
        let a = FractalApprox::build_default(3).unwrap();
        let text = a.to_csv().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("level,area,a_l1"));
        assert!(lines[1].starts_with("1,1/8,0,0,1"));
        let audit_csv = a.audit().unwrap().to_csv().unwrap();
        assert_eq!(audit_csv.lines().nth(2), Some("2,1/32,1/4"));
    }
}
