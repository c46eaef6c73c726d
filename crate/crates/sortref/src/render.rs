//! Signature-grouped matrix images: black cells are present properties,
//! white cells absent ones. Bands follow canonical signature order.

use std::fmt::Write;

use sortref_core::StructureView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    /// One pixel row per subject.
    #[default]
    Linear,
    /// `floor(log2 m) + 1` pixel rows for a band of multiplicity `m`.
    Log,
}

pub fn band_height(multiplicity: u64, scale: Scale) -> u64 {
    match scale {
        Scale::Linear => multiplicity,
        Scale::Log => u64::from(64 - multiplicity.leading_zeros()),
    }
}

/// Pixel rows of the image for the given signature sets, in the given order.
fn rows<'a>(view: &'a StructureView, sets: &'a [usize], scale: Scale) -> impl Iterator<Item = usize> + 'a {
    sets.iter().flat_map(move |&s| std::iter::repeat_n(s, band_height(view.set(s).multiplicity, scale) as usize))
}

/// Plain PGM (P2), one pixel per cell: 0 for present, 255 for absent.
pub fn render_pgm(view: &StructureView, sets: &[usize], scale: Scale) -> String {
    let width = view.property_count();
    let height: u64 = sets.iter().map(|&s| band_height(view.set(s).multiplicity, scale)).sum();
    let mut out = format!("P2\n{width} {height}\n255\n");
    for s in rows(view, sets, scale) {
        let line: Vec<&str> = (0..width).map(|c| if view.has(s, c) { "0" } else { "255" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

const CELL: u64 = 8;

/// SVG with one rectangle per present cell of each band.
pub fn render_svg(view: &StructureView, sets: &[usize], scale: Scale) -> String {
    let width = view.property_count() as u64;
    let height: u64 = sets.iter().map(|&s| band_height(view.set(s).multiplicity, scale)).sum();
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {width} {height}" shape-rendering="crispEdges">"#,
        width * CELL,
        height * CELL
    )
    .unwrap();
    writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    let mut y = 0;
    for &s in sets {
        let h = band_height(view.set(s).multiplicity, scale);
        for c in (0..view.property_count()).filter(|&c| view.has(s, c)) {
            writeln!(out, r#"<rect x="{c}" y="{y}" width="1" height="{h}" fill="black"/>"#).unwrap();
        }
        y += h;
    }
    out.push_str("</svg>\n");
    out
}
