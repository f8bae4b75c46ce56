//! Direct SVG emission for path plots. Only a small element subset is used:
//! `line`, `circle`, and `text` inside a `viewBox`-sized `svg` root. Field
//! Cartesian coordinates map to SVG with the along-row axis drawn vertically,
//! north (increasing along-row offset) up.

use crate::field::FieldGeometry;
use crate::phase::PhaseResult;

/// Minimal SVG document builder.
pub struct SvgDocument {
    view: (f64, f64, f64, f64),
    elements: Vec<String>,
}

impl SvgDocument {
    pub fn new(min_x: f64, min_y: f64, width: f64, height: f64) -> Self {
        Self {
            view: (min_x, min_y, width, height),
            elements: Vec::new(),
        }
    }

    pub fn line(&mut self, class: &str, stroke: &str, width: f64, p1: (f64, f64), p2: (f64, f64)) {
        self.elements.push(format!(
            r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{stroke}" stroke-width="{width}" />"#,
            p1.0, p1.1, p2.0, p2.1
        ));
    }

    pub fn circle(&mut self, class: &str, fill: &str, r: f64, center: (f64, f64)) {
        self.elements.push(format!(
            r#"<circle class="{class}" cx="{:.3}" cy="{:.3}" r="{r}" fill="{fill}" />"#,
            center.0, center.1
        ));
    }

    pub fn text(&mut self, pos: (f64, f64), size: f64, content: &str) {
        self.elements.push(format!(
            r#"<text x="{:.3}" y="{:.3}" font-size="{size}">{}</text>"#,
            pos.0,
            pos.1,
            escape(content)
        ));
    }

    pub fn finish(self) -> String {
        let (x, y, w, h) = self.view;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x:.3} {y:.3} {w:.3} {h:.3}\">\n"
        );
        for e in self.elements {
            out.push_str("  ");
            out.push_str(&e);
            out.push('\n');
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Field plot: agent path, optional vineyard-row guides, spot markers, and a
/// legend. Path segments along a row get class `row-seg` (or `route` when
/// `as_route` is set); cross-row segments get class `headland`.
pub struct FieldPlot<'a> {
    pub field: &'a FieldGeometry,
    pub result: &'a PhaseResult,
    /// Draw the vineyard rows as background guides.
    pub draw_rows: bool,
    /// Tag every path segment as `route` instead of row-seg/headland.
    pub as_route: bool,
    /// Marker positions in field Cartesian coordinates.
    pub markers: &'a [(f64, f64)],
    pub marker_class: &'a str,
    pub legend: &'a [&'a str],
}

impl FieldPlot<'_> {
    pub fn render(&self) -> String {
        let field = self.field;
        let cross_extent = (field.num_rows() - 1) as f64 * field.row_spacing();
        let along_extent = field.row_length();
        let margin = (0.05 * along_extent).max(4.0 * field.row_spacing());
        // Flip the along-row axis so north is up.
        let to_svg = |p: (f64, f64)| {
            (
                p.0 - field.origin().0,
                along_extent - (p.1 - field.origin().1),
            )
        };

        let mut doc = SvgDocument::new(
            -margin,
            -margin,
            cross_extent + 2.0 * margin,
            along_extent + 2.0 * margin,
        );

        if self.draw_rows {
            for row in 0..field.num_rows() {
                let x = row as f64 * field.row_spacing();
                doc.line(
                    "vineyard-row",
                    "#9db8d9",
                    0.6,
                    (x, along_extent),
                    (x, 0.0),
                );
            }
        }

        for w in self.result.path.windows(2) {
            let (a, b) = (to_svg(w[0]), to_svg(w[1]));
            if a == b {
                continue;
            }
            let (class, stroke) = if self.as_route {
                ("route", "#222222")
            } else if w[0].0 == w[1].0 {
                ("row-seg", "#222222")
            } else {
                ("headland", "#888888")
            };
            doc.line(class, stroke, 0.8, a, b);
        }

        for &m in self.markers {
            doc.circle(self.marker_class, "#cc2222", 1.6, to_svg(m));
        }

        for (i, entry) in self.legend.iter().enumerate() {
            doc.text(
                (-margin + 2.0, -margin + 6.0 + 7.0 * i as f64),
                5.0,
                entry,
            );
        }

        doc.finish()
    }
}

/// Checks that an SVG string uses only the declared element subset.
pub fn uses_declared_subset(svg: &str) -> bool {
    for part in svg.split('<').skip(1) {
        let name: String = part
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '/')
            .collect();
        let name = name.trim_start_matches('/');
        if !matches!(name, "svg" | "line" | "circle" | "text") {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::builtin_profiles;
    use crate::field::FieldPreset;
    use crate::phase::simulate_scan;

    #[test]
    fn scan_plot_counts_segments() {
        let field = FieldPreset::Rows52x227.geometry();
        let profiles = builtin_profiles();
        let result = simulate_scan(&field, &profiles["human"], &[]);
        let plot = FieldPlot {
            field: &field,
            result: &result,
            draw_rows: false,
            as_route: false,
            markers: &[],
            marker_class: "spot",
            legend: &[],
        };
        let svg = plot.render();
        assert_eq!(svg.matches("class=\"row-seg\"").count(), 52);
        assert_eq!(svg.matches("class=\"headland\"").count(), 51);
        assert_eq!(svg.matches("<circle").count(), 0);
        assert!(uses_declared_subset(&svg));
    }

    #[test]
    fn subset_checker_flags_foreign_elements() {
        assert!(uses_declared_subset("<svg viewBox=\"0 0 1 1\"></svg>"));
        assert!(!uses_declared_subset(
            "<svg><rect width=\"1\" height=\"1\"/></svg>"
        ));
        assert!(!uses_declared_subset("<svg><path d=\"M0 0\"/></svg>"));
    }

    #[test]
    fn legend_text_is_escaped() {
        let field = FieldPreset::Rows52x227.geometry();
        let profiles = builtin_profiles();
        let result = simulate_scan(&field, &profiles["human"], &[]);
        let plot = FieldPlot {
            field: &field,
            result: &result,
            draw_rows: false,
            as_route: false,
            markers: &[],
            marker_class: "spot",
            legend: &["a < b & c"],
        };
        let svg = plot.render();
        assert!(svg.contains("a &lt; b &amp; c"));
        assert!(uses_declared_subset(&svg));
    }
}
