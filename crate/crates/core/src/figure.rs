//! Step-function series of `χ(D) − 1 = dim H⁰ − dim H¹ − 1` against `deg₂ D`,
//! with CSV, JSON and SVG emitters.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::degree::DegreeValue;
use crate::divisor::{euler_at, DivisorError};

pub const CSV_HEADER: &str = "deg2,chi_minus_1,is_jump";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub deg2: String,
    pub chi_minus_1: i64,
    pub is_jump: bool,
}

/// A maximal piece `[start, end)` on which `χ − 1` is constant. The start is
/// included (right continuity) and the end is not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: String,
    pub end: String,
    pub value: i64,
    pub start_closed: bool,
    pub end_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepFunctionSeries {
    pub lo: String,
    pub hi: String,
    pub samples: Vec<Sample>,
    /// Integers of `[lo, hi]` where the value differs from its left limit.
    pub jump_points: Vec<String>,
    pub segments: Vec<Segment>,
    #[serde(skip)]
    exact: Exact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Exact {
    lo: BigRational,
    hi: BigRational,
    samples: Vec<BigRational>,
    segments: Vec<(BigRational, BigRational, i64)>,
}

fn value_at(x: &BigRational) -> Result<i64, DivisorError> {
    Ok(euler_at(&DegreeValue::rational(x.clone()))?.chi - 1)
}

/// Sample `χ − 1` on `[lo, hi]` at `samples_per_unit` points per unit plus
/// every integer, and locate the jumps.
pub fn figure_data(
    lo: &BigRational,
    hi: &BigRational,
    samples_per_unit: u32,
) -> Result<StepFunctionSeries, DivisorError> {
    if lo >= hi {
        return Err(DivisorError::BadScan("figure range must satisfy lo < hi"));
    }
    if samples_per_unit == 0 {
        return Err(DivisorError::BadScan("samples per unit must be positive"));
    }
    let half = BigRational::new(1.into(), 2.into());
    let step = BigRational::new(1.into(), samples_per_unit.into());

    let mut jumps = Vec::new();
    let mut n = lo.ceil().to_integer();
    while BigRational::from_integer(n.clone()) <= *hi {
        let x = BigRational::from_integer(n.clone());
        if value_at(&x)? != value_at(&(&x - &half))? {
            jumps.push(x);
        }
        n += BigInt::from(1);
    }

    let mut xs = Vec::new();
    let mut x = lo.clone();
    while &x <= hi {
        xs.push(x.clone());
        x += &step;
    }
    xs.extend(jumps.iter().cloned());
    xs.sort();
    xs.dedup();

    let samples = xs
        .iter()
        .map(|x| {
            Ok(Sample {
                deg2: x.to_string(),
                chi_minus_1: value_at(x)?,
                is_jump: jumps.binary_search(x).is_ok(),
            })
        })
        .collect::<Result<Vec<_>, DivisorError>>()?;

    let mut cuts = vec![lo.clone()];
    cuts.extend(jumps.iter().filter(|j| *j > lo).cloned());
    let mut segments = Vec::new();
    let mut exact_segments = Vec::new();
    for (i, start) in cuts.iter().enumerate() {
        let next = cuts.get(i + 1);
        let end = next.unwrap_or(hi).clone();
        let value = value_at(start)?;
        segments.push(Segment {
            start: start.to_string(),
            end: end.to_string(),
            value,
            start_closed: true,
            end_closed: next.is_none(),
        });
        exact_segments.push((start.clone(), end, value));
    }

    Ok(StepFunctionSeries {
        lo: lo.to_string(),
        hi: hi.to_string(),
        samples,
        jump_points: jumps.iter().map(ToString::to_string).collect(),
        segments,
        exact: Exact {
            lo: lo.clone(),
            hi: hi.clone(),
            samples: xs,
            segments: exact_segments,
        },
    })
}

impl StepFunctionSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{}", s.deg2, s.chi_minus_1, s.is_jump);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("series is plain data")
    }

    /// Value on the piece containing `x`, if `x` is in range.
    pub fn value_at(&self, x: &BigRational) -> Option<i64> {
        let last = self.exact.segments.len().checked_sub(1)?;
        self.exact
            .segments
            .iter()
            .enumerate()
            .find(|(i, (s, e, _))| s <= x && (x < e || (*i == last && x == e)))
            .map(|(_, (_, _, v))| *v)
    }

    /// Render the step graph: a closed dot at the left end of each piece and
    /// an open dot at its right end.
    pub fn to_svg(&self) -> String {
        let (width, height, margin) = (720.0, 420.0, 48.0);
        let f = |x: &BigRational| x.to_f64().unwrap_or(0.0);
        let (x0, x1) = (f(&self.exact.lo), f(&self.exact.hi));
        let (mut y0, mut y1) = self
            .exact
            .segments
            .iter()
            .fold((0i64, 0i64), |(lo, hi), (_, _, v)| (lo.min(*v), hi.max(*v)));
        y0 -= 1;
        y1 += 1;
        let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (width - 2.0 * margin);
        let sy =
            |y: f64| height - margin - (y - y0 as f64) / (y1 - y0) as f64 * (height - 2.0 * margin);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">dim H0 − dim H1 − 1 against deg2 D</text>"#,
            width / 2.0
        );
        // Axes through the origin when it is visible.
        let ax_y = sy(0.0_f64.clamp(y0 as f64, y1 as f64));
        let ax_x = sx(0.0_f64.clamp(x0, x1));
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{ax_y}" x2="{}" y2="{ax_y}" stroke="#888"/>"##,
            sx(x0),
            sx(x1)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{ax_x}" y1="{}" x2="{ax_x}" y2="{}" stroke="#888"/>"##,
            sy(y0 as f64),
            sy(y1 as f64)
        );
        let mut n = self.exact.lo.ceil().to_integer();
        while BigRational::from_integer(n.clone()) <= self.exact.hi {
            let x = sx(n.to_f64().unwrap_or(0.0));
            let _ = writeln!(
                svg,
                r##"<text x="{x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle" fill="#444">{n}</text>"##,
                ax_y + 16.0
            );
            n += 1;
        }
        for y in y0..=y1 {
            if y != 0 {
                let _ = writeln!(
                    svg,
                    r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end" fill="#444">{y}</text>"##,
                    ax_x - 6.0,
                    sy(y as f64) + 4.0
                );
            }
        }
        for (s, e, v) in &self.exact.segments {
            let (xa, xb, y) = (sx(f(s)), sx(f(e)), sy(*v as f64));
            let _ = writeln!(
                svg,
                r##"<line x1="{xa}" y1="{y}" x2="{xb}" y2="{y}" stroke="#1f5fbf" stroke-width="2.5"/>"##
            );
            let _ = writeln!(
                svg,
                r##"<circle cx="{xa}" cy="{y}" r="4" fill="#1f5fbf"/>"##
            );
            let closed_end = *e == self.exact.hi;
            let fill = if closed_end { "#1f5fbf" } else { "white" };
            let _ = writeln!(
                svg,
                r##"<circle cx="{xb}" cy="{y}" r="4" fill="{fill}" stroke="#1f5fbf" stroke-width="1.5"/>"##
            );
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn exact_jump_points(&self) -> Vec<BigRational> {
        self.exact
            .samples
            .iter()
            .zip(&self.samples)
            .filter(|(_, s)| s.is_jump)
            .map(|(x, _)| x.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::ratio;

    #[test]
    fn unit_interval_is_constant_one() {
        let s = figure_data(&ratio(0, 1), &ratio(1, 1), 8).unwrap();
        for sample in &s.samples {
            if sample.deg2 != "1" {
                assert_eq!(sample.chi_minus_1, 1, "at {}", sample.deg2);
            }
        }
        assert_eq!(s.value_at(&ratio(1, 2)), Some(1));
        assert_eq!(s.value_at(&ratio(1, 1)), Some(2));
    }

    #[test]
    fn negative_pieces() {
        let s = figure_data(&ratio(-2, 1), &ratio(0, 1), 4).unwrap();
        assert_eq!(s.value_at(&ratio(-3, 2)), Some(-2));
        assert_eq!(s.value_at(&ratio(-1, 2)), Some(-1));
        assert_eq!(s.value_at(&ratio(0, 1)), Some(1));
    }

    #[test]
    fn jump_of_two_at_zero() {
        let s = figure_data(&ratio(-1, 1), &ratio(1, 1), 4).unwrap();
        assert_eq!(s.value_at(&ratio(-1, 4)), Some(-1));
        assert_eq!(s.value_at(&ratio(0, 1)), Some(1));
        assert!(s.jump_points.contains(&"0".to_string()));
        assert!(s.samples.iter().all(|x| x.chi_minus_1 != 0));
    }

    #[test]
    fn jumps_at_every_integer() {
        let s = figure_data(&ratio(-4, 1), &ratio(4, 1), 2).unwrap();
        let want: Vec<String> = (-4..=4).map(|n: i64| n.to_string()).collect();
        assert_eq!(s.jump_points, want);
        assert_eq!(s.exact_jump_points().len(), 9);
    }

    #[test]
    fn csv_and_svg_shape() {
        let s = figure_data(&ratio(-1, 1), &ratio(1, 1), 2).unwrap();
        let csv = s.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("-1,-1,true"));
        assert_eq!(lines.count(), s.samples.len() - 1);
        let svg = s.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"fill="white" stroke"#));
    }

    #[test]
    fn empty_range_is_rejected() {
        assert!(figure_data(&ratio(2, 1), &ratio(2, 1), 4).is_err());
        assert!(figure_data(&ratio(0, 1), &ratio(1, 1), 0).is_err());
    }
}
