//! Mountain range output as text, SVG or JSON.
//!
//! Rotation runs horizontally and tb vertically, top row first. Each
//! populated point shows the number of classes (or their generators) and
//! arrows lead to its stabilizations: `/` for `S₋` and `\` for `S₊`.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use thiserror::Error;

use crate::atlas::{MountainPoint, MountainRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderFormat {
    Ascii,
    Svg,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    #[default]
    Counts,
    Ids,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RenderSpec {
    pub format: RenderFormat,
    pub tb_floor: i64,
    pub label_mode: LabelMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("nothing to render: no classes at or above tb {0}")]
    Empty(i64),
}

/// Pixels per unit of rot and of tb in SVG output.
pub const SVG_SCALE: i64 = 40;
const SVG_MARGIN: i64 = 40;
const SVG_RADIUS: i64 = 14;

fn label(p: &MountainPoint, mode: LabelMode) -> String {
    match mode {
        LabelMode::Counts => p.count().to_string(),
        LabelMode::Ids => p
            .classes
            .iter()
            .map(|c| c[0].to_string())
            .collect::<Vec<_>>()
            .join("|"),
    }
}

struct Bounds {
    rot_min: i64,
    rot_max: i64,
    tb_max: i64,
}

fn bounds(range: &MountainRange) -> Result<Bounds, RenderError> {
    if range.is_empty() {
        return Err(RenderError::Empty(range.floor));
    }
    let rots = range.points.iter().map(|p| p.rot);
    Ok(Bounds {
        rot_min: rots.clone().min().expect("nonempty"),
        rot_max: rots.max().expect("nonempty"),
        tb_max: range.points.iter().map(|p| p.tb).max().expect("nonempty"),
    })
}

pub fn render_mountain_range(
    range: &MountainRange,
    spec: RenderSpec,
) -> Result<String, RenderError> {
    match spec.format {
        RenderFormat::Ascii => render_ascii(range, spec.label_mode),
        RenderFormat::Svg => render_svg(range, spec.label_mode),
        RenderFormat::Json => {
            bounds(range)?;
            Ok(serde_json::to_string_pretty(range).expect("range serializes") + "\n")
        }
    }
}

fn put(line: &mut [char], x: usize, text: &str) {
    for (i, ch) in text.chars().enumerate() {
        if let Some(slot) = line.get_mut(x + i) {
            *slot = ch;
        }
    }
}

fn render_ascii(range: &MountainRange, mode: LabelMode) -> Result<String, RenderError> {
    let b = bounds(range)?;
    let widest = range
        .points
        .iter()
        .map(|p| label(p, mode).chars().count())
        .max()
        .unwrap_or(1);
    // Half the horizontal distance between neighbouring nodes in a row.
    let half = (widest + 1).max(2);
    let width = (b.rot_max - b.rot_min) as usize * half + widest + 1;
    let column = |rot: i64| (rot - b.rot_min) as usize * half;
    let tb_width = [b.tb_max, range.floor]
        .iter()
        .map(|t| t.to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for tb in (range.floor..=b.tb_max).rev() {
        let row: Vec<&MountainPoint> = range.points.iter().filter(|p| p.tb == tb).collect();
        let mut nodes = vec![' '; width];
        for p in &row {
            let text = label(p, mode);
            let x = column(p.rot) + widest.saturating_sub(text.chars().count()) / 2;
            put(&mut nodes, x, &text);
        }
        let line: String = nodes.into_iter().collect();
        let _ = writeln!(out, "{tb:>tb_width$} | {}", line.trim_end());
        if tb == range.floor {
            break;
        }
        let mut arrows = vec![' '; width];
        for p in &row {
            let mid = column(p.rot) + widest / 2;
            if range.point(p.rot - 1, tb - 1).is_some() {
                put(&mut arrows, mid.saturating_sub(half / 2), "/");
            }
            if range.point(p.rot + 1, tb - 1).is_some() {
                put(&mut arrows, mid + half / 2, "\\");
            }
        }
        let line: String = arrows.into_iter().collect();
        let _ = writeln!(out, "{:>tb_width$} | {}", "", line.trim_end());
    }
    let _ = writeln!(out, "rot {} .. {}", b.rot_min, b.rot_max);
    Ok(out)
}

fn render_svg(range: &MountainRange, mode: LabelMode) -> Result<String, RenderError> {
    let b = bounds(range)?;
    let x = |rot: i64| SVG_MARGIN + (rot - b.rot_min) * SVG_SCALE;
    let y = |tb: i64| SVG_MARGIN + (b.tb_max - tb) * SVG_SCALE;
    let width = x(b.rot_max) + SVG_MARGIN;
    let height = y(range.floor) + SVG_MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="1">"#);
    for p in &range.points {
        for d in [-1, 1] {
            if range.point(p.rot + d, p.tb - 1).is_some() {
                let _ = writeln!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    x(p.rot),
                    y(p.tb),
                    x(p.rot + d),
                    y(p.tb - 1)
                );
            }
        }
    }
    let _ = writeln!(out, "</g>");
    for p in &range.points {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{SVG_RADIUS}" fill="white" stroke="black"/>"#,
            x(p.rot),
            y(p.tb)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" dominant-baseline="central" data-rot="{}" data-tb="{}">{}</text>"#,
            x(p.rot),
            y(p.tb),
            p.rot,
            p.tb,
            label(p, mode)
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
