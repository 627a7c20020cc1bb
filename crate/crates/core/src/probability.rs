//! Closed-form probabilities.
//!
//! Two modes are kept side by side. `Paper` evaluates the printed formulas
//! (first piece 1/8, ratio 1/8). `Measured` takes the first piece area and
//! the ratio from an audit of the actual construction, where the ratio is
//! forced to 1/4.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractal::{csv_err, finish_csv, AuditReport, FractalApprox, Piece};
use crate::geometry::{bary_area, max_pairwise_gap, medial_triangle, simplex};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    Measured,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Paper, Mode::Measured];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Measured => "measured",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "paper" => Ok(Mode::Paper),
            "measured" => Ok(Mode::Measured),
            _ => Err(Error::Unknown {
                kind: "mode",
                name: s.to_string(),
                known: "paper, measured".into(),
            }),
        }
    }
}

/// Relative area of the triangle-forming region of the ordered problem,
/// computed from the medial triangle.
pub fn classical_probability() -> Rat {
    let whole = simplex();
    bary_area(&medial_triangle(&whole))
        .checked_div(&bary_area(&whole))
        .expect("simplex has unit area")
}

/// `first / (1 - ratio)`.
pub fn series_total(first: &Rat, ratio: &Rat) -> Result<Rat> {
    if ratio.is_negative() || *ratio >= Rat::one() {
        return Err(Error::DivergentSeries(ratio.to_string()));
    }
    if first.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "series first term must be >= 0, got {first}"
        )));
    }
    first.checked_div(&(Rat::one() - ratio))
}

fn measured_params(audit: Option<&AuditReport>) -> Result<(Rat, Rat)> {
    let audit = audit.ok_or(Error::MissingAudit)?;
    Ok((
        audit.measured.first_piece_area.clone(),
        audit.measured.ratio.clone(),
    ))
}

fn check_index(i: u32) -> Result<()> {
    if i == 0 {
        return Err(Error::InvalidArgument("index i must be >= 1".into()));
    }
    Ok(())
}

/// Probability that a sample of the symmetric problem forms a triangle.
///
/// The first piece lies where some length is at least 1/2, and every later
/// piece lies inside the medial triangle, so the event is the tail from
/// piece 2.
pub fn symmetric_probability(mode: Mode, audit: Option<&AuditReport>) -> Result<Rat> {
    match mode {
        Mode::Paper => {
            let eighth = Rat::frac(1, 8);
            series_total(&Rat::frac(1, 64), &eighth)?.checked_div(&series_total(&eighth, &eighth)?)
        }
        Mode::Measured => {
            let (first, ratio) = measured_params(audit)?;
            let total = series_total(&first, &ratio)?;
            (&total - &first).checked_div(&total)
        }
    }
}

/// Supremum of the max pairwise gap over a piece. The gap is a maximum of
/// linear functions, hence convex, so the supremum is attained at a vertex.
pub fn delta_of_piece(piece: &Piece) -> Rat {
    piece
        .triangle
        .vertices()
        .into_iter()
        .map(max_pairwise_gap)
        .max()
        .expect("three vertices")
}

/// Probability of a `delta_i`-equilateral triangle: the tail share from piece `i`.
pub fn p_equilateral(i: u32, mode: Mode, audit: Option<&AuditReport>) -> Result<Rat> {
    check_index(i)?;
    match mode {
        Mode::Paper => Rat::one().checked_div(&Rat::int(8).pow(i as i32 - 1)?),
        Mode::Measured => {
            let (first, ratio) = measured_params(audit)?;
            let tail_first = &first * ratio.pow(i as i32 - 1)?;
            series_total(&tail_first, &ratio)?.checked_div(&series_total(&first, &ratio)?)
        }
    }
}

/// Probability of a `(delta_{i+1}, delta_i)`-equilateral triangle.
///
/// Paper mode evaluates `1/(7 * 8^i)` as printed. Measured mode takes the
/// limit share of piece `i`, the part of the tail from `i` that is not in
/// the tail from `i + 1`.
pub fn p_band(i: u32, mode: Mode, audit: Option<&AuditReport>) -> Result<Rat> {
    check_index(i)?;
    match mode {
        Mode::Paper => Rat::one().checked_div(&(Rat::int(7) * Rat::int(8).pow(i as i32)?)),
        Mode::Measured => {
            let (first, ratio) = measured_params(audit)?;
            let piece_area = &first * ratio.pow(i as i32 - 1)?;
            piece_area.checked_div(&series_total(&first, &ratio)?)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaRow {
    pub i: u32,
    pub delta: Rat,
    pub p_equilateral: Rat,
    pub p_band: Rat,
    /// `p_equilateral(i) - p_equilateral(i + 1)`.
    pub tail_difference: Rat,
    pub band_matches_tail_difference: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decimals {
    pub classical_probability: f64,
    pub total_area: f64,
    pub triangle_area: f64,
    pub p_triangle: f64,
    pub delta: Vec<f64>,
    pub p_equilateral: Vec<f64>,
    pub p_band: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityReport {
    pub mode: Mode,
    pub classical_probability: Rat,
    pub total_area: Rat,
    pub triangle_area: Rat,
    pub p_triangle: Rat,
    pub delta_table: Vec<DeltaRow>,
    /// Rows whose band probability disagrees with the tail difference.
    pub flagged_rows: Vec<u32>,
    pub decimal: Decimals,
}

/// Rounds to 12 significant digits.
pub fn decimal12(r: &Rat) -> f64 {
    format!("{:.11e}", r.to_f64()).parse().unwrap_or(f64::NAN)
}

/// Assembles every closed form for `mode`, with the delta table for rows
/// `1..=depth`. The approximation must have at least `depth` levels.
pub fn probability_report(
    mode: Mode,
    depth: u32,
    approx: &FractalApprox,
) -> Result<ProbabilityReport> {
    if depth < 1 || approx.level() < depth {
        return Err(Error::LevelTooLow {
            required: depth.max(1),
            actual: approx.level(),
        });
    }
    let audit = match mode {
        Mode::Measured => Some(approx.audit()?),
        Mode::Paper => None,
    };
    let audit = audit.as_ref();
    let (total_area, triangle_area) = match (mode, audit) {
        (Mode::Measured, Some(a)) => (
            a.measured.total_area.clone(),
            a.measured.triangle_area.clone(),
        ),
        _ => {
            let eighth = Rat::frac(1, 8);
            (
                series_total(&eighth, &eighth)?,
                series_total(&Rat::frac(1, 64), &eighth)?,
            )
        }
    };
    let p_triangle = symmetric_probability(mode, audit)?;

    let mut delta_table = Vec::with_capacity(depth as usize);
    for i in 1..=depth {
        let piece = approx.piece(i).expect("level >= depth");
        let p_eq = p_equilateral(i, mode, audit)?;
        let tail_difference = &p_eq - p_equilateral(i + 1, mode, audit)?;
        let band = p_band(i, mode, audit)?;
        delta_table.push(DeltaRow {
            i,
            delta: delta_of_piece(piece),
            band_matches_tail_difference: band == tail_difference,
            p_equilateral: p_eq,
            p_band: band,
            tail_difference,
        });
    }
    let flagged_rows = delta_table
        .iter()
        .filter(|r| !r.band_matches_tail_difference)
        .map(|r| r.i)
        .collect();
    let classical = classical_probability();
    let decimal = Decimals {
        classical_probability: decimal12(&classical),
        total_area: decimal12(&total_area),
        triangle_area: decimal12(&triangle_area),
        p_triangle: decimal12(&p_triangle),
        delta: delta_table.iter().map(|r| decimal12(&r.delta)).collect(),
        p_equilateral: delta_table
            .iter()
            .map(|r| decimal12(&r.p_equilateral))
            .collect(),
        p_band: delta_table.iter().map(|r| decimal12(&r.p_band)).collect(),
    };
    Ok(ProbabilityReport {
        mode,
        classical_probability: classical,
        total_area,
        triangle_area,
        p_triangle,
        delta_table,
        flagged_rows,
        decimal,
    })
}

impl ProbabilityReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Delta-table CSV for one or more reports, one row per (mode, i).
pub fn delta_table_csv(reports: &[ProbabilityReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "mode",
        "i",
        "delta",
        "p_equilateral",
        "p_band",
        "tail_difference",
        "band_matches_tail_difference",
    ])
    .map_err(csv_err)?;
    for report in reports {
        for row in &report.delta_table {
            w.write_record([
                report.mode.to_string(),
                row.i.to_string(),
                row.delta.to_string(),
                row.p_equilateral.to_string(),
                row.p_band.to_string(),
                row.tail_difference.to_string(),
                row.band_matches_tail_difference.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    finish_csv(w)
}
