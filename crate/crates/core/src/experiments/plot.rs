//! SVG renderings of sweep results.

use std::path::Path;

use plotters::coord::combinators::IntoLogRange;
use plotters::prelude::*;

use crate::error::{Error, Result};

use super::sweep::SweepResult;

fn draw_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Format { path: path.to_path_buf(), message: format!("plot rendering failed: {e}") }
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite() && *v > 0.0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        (lo / 1.5, hi * 1.5)
    } else {
        (0.1, 10.0)
    }
}

type Series = (&'static str, RGBColor, Vec<(f64, f64)>);
type Pick = (&'static str, RGBColor, fn(&super::sweep::SweepRow) -> f64);

fn series(result: &SweepResult, pick: [Pick; 3]) -> Vec<Series> {
    pick.iter()
        .map(|(name, color, f)| {
            let pts = result
                .rows
                .iter()
                .map(|r| (r.axis_value, f(r)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            (*name, *color, pts)
        })
        .collect()
}

/// Writes a standalone SVG: mean plays against eps or m on log-log axes,
/// success rate against Q with a log x axis, or a bar chart of mean
/// per-item play counts when nothing was swept.
pub fn emit_plot(result: &SweepResult, path: &Path) -> Result<()> {
    match result.axis {
        "none" => itemwise(result, path),
        "q" => success_vs_budget(result, path),
        _ => plays_vs_axis(result, path),
    }
}

fn plays_vs_axis(result: &SweepResult, path: &Path) -> Result<()> {
    let lines = series(
        result,
        [
            ("mean plays", BLUE, |r| r.mean_plays),
            ("upper-bound predictor", RED, |r| r.theory_ub),
            ("lower-bound predictor", GREEN, |r| r.theory_lb),
        ],
    );
    let (x0, x1) = span(result.rows.iter().map(|r| r.axis_value));
    let (y0, y1) = span(lines.iter().flat_map(|(_, _, p)| p.iter().map(|&(_, y)| y)));
    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| draw_err(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("{}: sample complexity vs {}", result.algo, result.axis), ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(45)
        .y_label_area_size(70)
        .build_cartesian_2d((x0..x1).log_scale(), (y0..y1).log_scale())
        .map_err(|e| draw_err(path, e))?;
    chart
        .configure_mesh()
        .x_desc(result.axis)
        .y_desc("subset plays")
        .draw()
        .map_err(|e| draw_err(path, e))?;
    for (name, color, pts) in lines {
        let pts: Vec<(f64, f64)> = pts.into_iter().filter(|&(x, y)| x > 0.0 && y > 0.0).collect();
        chart
            .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))
            .map_err(|e| draw_err(path, e))?
            .label(name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        chart
            .draw_series(pts.into_iter().map(|p| Circle::new(p, 3, color.filled())))
            .map_err(|e| draw_err(path, e))?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| draw_err(path, e))?;
    root.present().map_err(|e| draw_err(path, e))
}

fn success_vs_budget(result: &SweepResult, path: &Path) -> Result<()> {
    let lines = series(
        result,
        [
            ("success rate", BLUE, |r| r.success_rate),
            ("success upper bound", RED, |r| r.theory_ub),
            ("success lower bound", GREEN, |r| r.theory_lb),
        ],
    );
    let (x0, x1) = span(result.rows.iter().map(|r| r.axis_value));
    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| draw_err(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("{}: success probability vs budget", result.algo), ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(45)
        .y_label_area_size(60)
        .build_cartesian_2d((x0..x1).log_scale(), 0.0..1.05)
        .map_err(|e| draw_err(path, e))?;
    chart
        .configure_mesh()
        .x_desc("Q")
        .y_desc("success probability")
        .draw()
        .map_err(|e| draw_err(path, e))?;
    for (name, color, pts) in lines {
        chart
            .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))
            .map_err(|e| draw_err(path, e))?
            .label(name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        chart
            .draw_series(pts.into_iter().map(|p| Circle::new(p, 3, color.filled())))
            .map_err(|e| draw_err(path, e))?;
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::LowerRight)
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| draw_err(path, e))?;
    root.present().map_err(|e| draw_err(path, e))
}

fn itemwise(result: &SweepResult, path: &Path) -> Result<()> {
    let counts = &result.rows[0].mean_survival;
    let n = counts.len();
    let top = counts.iter().copied().fold(0.0, f64::max).max(1.0) * 1.1;
    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| draw_err(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("{}: plays per item", result.algo), ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(45)
        .y_label_area_size(80)
        .build_cartesian_2d((0..n).into_segmented(), 0.0..top)
        .map_err(|e| draw_err(path, e))?;
    chart
        .configure_mesh()
        .disable_x_mesh()
        .x_desc("item")
        .y_desc("mean plays containing the item")
        .draw()
        .map_err(|e| draw_err(path, e))?;
    chart
        .draw_series(
            Histogram::vertical(&chart)
                .style(BLUE.filled())
                .margin(4)
                .data(counts.iter().enumerate().map(|(i, &c)| (i, c))),
        )
        .map_err(|e| draw_err(path, e))?;
    root.present().map_err(|e| draw_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::sweep::{Algorithm, SweepRow};

    fn row(x: f64) -> SweepRow {
        SweepRow {
            axis_value: x,
            mean_plays: 1000.0 / x,
            std_plays: 1.0,
            success_rate: 0.5,
            theory_ub: 10.0 / x,
            theory_lb: 5.0,
            mean_survival: vec![4.0, 2.0, 1.0],
        }
    }

    #[test]
    fn renders_every_kind() {
        let dir = tempfile::tempdir().unwrap();
        for axis in ["eps", "m", "q", "none"] {
            let res = SweepResult {
                axis,
                algo: Algorithm::PacWrapper,
                rows: vec![row(1.0), row(2.0), row(4.0)],
            };
            let path = dir.path().join(format!("{axis}.svg"));
            emit_plot(&res, &path).unwrap();
            let svg = std::fs::read_to_string(&path).unwrap();
            assert!(svg.starts_with("<svg"), "{axis}");
            assert!(svg.trim_end().ends_with("</svg>"));
        }
    }
}
