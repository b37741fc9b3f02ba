//! Membership rasters of 2-D sets.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use sdrep::feasibility::{membership_at, EngineConfig, VerdictKind};
use sdrep::lmi::SemidefRepresentation;

pub const COLOR_IN: &str = "#2b6cb0";
pub const COLOR_OUT: &str = "#ffffff";
pub const COLOR_UNKNOWN: &str = "#f6ad55";

const CELL_PX: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid rendering needs exactly 2 visible variables, the set has {0}")]
    UnsupportedDimension(usize),
    #[error("bad bounds `{0}`, expected x0:x1,y0:y1")]
    BadBounds(String),
    #[error("resolution must be at least 1")]
    BadResolution,
    #[error(transparent)]
    Engine(#[from] sdrep::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl FromStr for Bounds {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GridError::BadBounds(s.to_string());
        let range = |part: &str| -> Result<(f64, f64), GridError> {
            let (a, b) = part.split_once(':').ok_or_else(bad)?;
            let lo: f64 = a.trim().parse().map_err(|_| bad())?;
            let hi: f64 = b.trim().parse().map_err(|_| bad())?;
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(bad());
            }
            Ok((lo, hi))
        };
        let (xs, ys) = s.split_once(',').ok_or_else(bad)?;
        Ok(Bounds { x: range(xs)?, y: range(ys)? })
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { x: (-1.5, 1.5), y: (-1.5, 1.5) }
    }
}

/// The `i`-th of `res` equally spaced samples of `[lo, hi]`, endpoints included.
pub fn sample(range: (f64, f64), res: usize, i: usize) -> f64 {
    if res <= 1 {
        return range.0;
    }
    range.0 + (range.1 - range.0) * i as f64 / (res - 1) as f64
}

/// Verdicts on a `res × res` lattice; cell `iy·res + ix` sits at
/// `(sample(x, ix), sample(y, iy))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridReport {
    pub bounds: Bounds,
    pub resolution: usize,
    pub cells: Vec<VerdictKind>,
    pub seconds: f64,
}

impl GridReport {
    pub fn point(&self, index: usize) -> [f64; 2] {
        let (ix, iy) = (index % self.resolution, index / self.resolution);
        [sample(self.bounds.x, self.resolution, ix), sample(self.bounds.y, self.resolution, iy)]
    }

    pub fn count(&self, kind: VerdictKind) -> usize {
        self.cells.iter().filter(|k| **k == kind).count()
    }

    pub fn summary(&self) -> String {
        format!(
            "cells {} in {} out {} unknown {} seconds {:.2}",
            self.cells.len(),
            self.count(VerdictKind::In),
            self.count(VerdictKind::Out),
            self.count(VerdictKind::Unknown),
            self.seconds
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,verdict\n");
        for (i, k) in self.cells.iter().enumerate() {
            let [x, y] = self.point(i);
            let _ = writeln!(out, "{x},{y},{k}");
        }
        out
    }

    /// One rectangle per cell, highest `y` at the top.
    pub fn to_svg(&self) -> String {
        let n = self.resolution;
        let side = n * CELL_PX;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}" shape-rendering="crispEdges">"#
        );
        let _ = writeln!(
            out,
            r#"<defs><pattern id="hatch" width="4" height="4" patternUnits="userSpaceOnUse"><rect width="4" height="4" fill="{COLOR_OUT}"/><path d="M0,4 L4,0" stroke="{COLOR_UNKNOWN}" stroke-width="1.5"/></pattern></defs>"#
        );
        let _ = writeln!(out, r#"<rect width="{side}" height="{side}" fill="{COLOR_OUT}"/>"#);
        for (i, k) in self.cells.iter().enumerate() {
            let (ix, iy) = (i % n, i / n);
            let (class, fill) = match k {
                VerdictKind::In => ("in", COLOR_IN.to_string()),
                VerdictKind::Out => ("out", COLOR_OUT.to_string()),
                VerdictKind::Unknown => ("unknown", "url(#hatch)".to_string()),
            };
            let _ = writeln!(
                out,
                r#"<rect class="{class}" data-cell="{i}" x="{}" y="{}" width="{CELL_PX}" height="{CELL_PX}" fill="{fill}"/>"#,
                ix * CELL_PX,
                (n - 1 - iy) * CELL_PX
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Evaluates membership on the lattice in parallel.
pub fn rasterize(
    s: &SemidefRepresentation,
    bounds: Bounds,
    resolution: usize,
    cfg: &EngineConfig,
) -> Result<GridReport, GridError> {
    if s.visible().len() != 2 {
        return Err(GridError::UnsupportedDimension(s.visible().len()));
    }
    if resolution == 0 {
        return Err(GridError::BadResolution);
    }
    let start = Instant::now();
    let mut report = GridReport { bounds, resolution, cells: Vec::new(), seconds: 0.0 };
    let cells: Result<Vec<(usize, VerdictKind)>, sdrep::Error> = (0..resolution * resolution)
        .into_par_iter()
        .map(|i| membership_at(s, &report.point(i), cfg).map(|v| (i, v.kind)))
        .collect();
    let mut cells = cells?;
    cells.sort_by_key(|(i, _)| *i);
    report.cells = cells.into_iter().map(|(_, k)| k).collect();
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Reads back the verdict column of [`GridReport::to_csv`].
pub fn verdicts_from_csv(csv: &str) -> Vec<String> {
    csv.lines().skip(1).filter_map(|l| l.rsplit(',').next()).map(str::to_string).collect()
}

/// Reads back the per-cell classes of [`GridReport::to_svg`], ordered by cell index.
pub fn verdicts_from_svg(svg: &str) -> Vec<String> {
    let mut cells: Vec<(usize, String)> = svg
        .lines()
        .filter_map(|l| {
            let class = l.split("class=\"").nth(1)?.split('"').next()?;
            let idx = l.split("data-cell=\"").nth(1)?.split('"').next()?.parse().ok()?;
            Some((idx, class.to_string()))
        })
        .collect();
    cells.sort();
    cells
        .into_iter()
        .map(|(_, c)| match c.as_str() {
            "in" => "In".to_string(),
            "out" => "Out".to_string(),
            _ => "Unknown".to_string(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sdrep::lmi::{direct_sum, scalar_block, AffineFunctional};

    #[test]
    fn bounds_parse() {
        let b: Bounds = "-1.5:1.5,0:2".parse().unwrap();
        assert_eq!(b, Bounds { x: (-1.5, 1.5), y: (0.0, 2.0) });
        assert!("1:0,0:1".parse::<Bounds>().is_err());
        assert!("0:1".parse::<Bounds>().is_err());
    }

    #[test]
    fn samples_hit_endpoints() {
        assert_eq!(sample((-1.5, 1.5), 101, 0), -1.5);
        assert_eq!(sample((-1.5, 1.5), 101, 50), 0.0);
        assert_eq!(sample((-1.5, 1.5), 101, 100), 1.5);
        assert_eq!(sample((-1.25, 1.25), 101, 90), 1.0);
    }

    #[test]
    fn csv_and_svg_agree() {
        let vars = ["x1".to_string(), "x2".to_string()];
        let half = direct_sum(&[
            scalar_block(&AffineFunctional::parse("x1").unwrap()),
            scalar_block(&AffineFunctional::parse("1 - x2").unwrap()),
        ])
        .unwrap();
        let s = SemidefRepresentation::spectrahedron_over(half, &vars).unwrap();
        let r = rasterize(&s, Bounds::default(), 9, &EngineConfig::default()).unwrap();
        assert_eq!(r.cells.len(), 81);
        let a = verdicts_from_csv(&r.to_csv());
        let b = verdicts_from_svg(&r.to_svg());
        assert_eq!(a, b);
        assert_eq!(r.count(VerdictKind::In), 5 * 7);
    }

    #[test]
    fn three_variables_are_rejected() {
        let vars = ["a".to_string(), "b".to_string(), "c".to_string()];
        let s = SemidefRepresentation::empty(&vars);
        assert_eq!(
            rasterize(&s, Bounds::default(), 3, &EngineConfig::default()),
            Err(GridError::UnsupportedDimension(3))
        );
    }
}
