//! SVG and CSV writers.

use std::fmt::Write as _;

use turnpath_core::region::Part;
use turnpath_core::{ConvergenceReport, DiscreteSequenceSet, Point, Rect, TurnRegion};

/// Minimal SVG 1.1 document in world coordinates with `+y` pointing up.
pub struct Svg {
    view: Rect,
    stroke: f64,
    body: String,
}

impl Svg {
    pub fn new(extent: Rect) -> Self {
        let pad = extent.diagonal() * 0.05;
        let view = extent.expand(pad);
        Svg {
            stroke: view.diagonal() * 0.003,
            view,
            body: String::new(),
        }
    }

    /// Both boundary arcs of a bounded region, drawn as circular arcs from
    /// `A` to `B`.
    pub fn region(&mut self, region: &TurnRegion) {
        let (a, b) = (region.a, region.b);
        let radius = a.dist(b) / (2.0 * region.phi.sin());
        let large = u8::from(region.phi > std::f64::consts::FRAC_PI_2);
        for (part, sweep) in [(Part::Right, 1), (Part::Left, 0)] {
            let class = match part {
                Part::Right => "arc right",
                Part::Left => "arc left",
            };
            let _ = writeln!(
                self.body,
                r##"<path class="{class}" d="M {} {} A {radius} {radius} 0 {large} {sweep} {} {}" stroke="#1f77b4" stroke-width="{}"/>"##,
                a.x, a.y, b.x, b.y, self.stroke
            );
        }
    }

    pub fn chord(&mut self, a: Point, b: Point) {
        let _ = writeln!(
            self.body,
            r##"<line class="chord" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#7f7f7f" stroke-dasharray="{} {}" stroke-width="{}"/>"##,
            a.x,
            a.y,
            b.x,
            b.y,
            self.stroke * 4.0,
            self.stroke * 3.0,
            self.stroke
        );
    }

    pub fn polyline(&mut self, vertices: &[Point]) {
        let pts: Vec<String> = vertices.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
        let _ = writeln!(
            self.body,
            r##"<polyline class="path" points="{}" stroke="#d62728" stroke-width="{}"/>"##,
            pts.join(" "),
            self.stroke * 1.5
        );
    }

    pub fn marker(&mut self, p: Point, label: &str) {
        let _ = writeln!(
            self.body,
            r##"<circle class="marker" id="{label}" cx="{}" cy="{}" r="{}" fill="#000000"/>"##,
            p.x,
            p.y,
            self.stroke * 3.0
        );
    }

    pub fn finish(self) -> String {
        let v = self.view;
        let (w, h) = (v.max.x - v.min.x, v.max.y - v.min.y);
        format!(
            concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n",
                "<!-- world coordinates; the y axis is flipped so +y points up and counterclockwise turns render as left turns -->\n",
                "<g transform=\"scale(1,-1)\" fill=\"none\">\n",
                "{}",
                "</g>\n",
                "</svg>\n"
            ),
            v.min.x,
            -v.max.y,
            w,
            h,
            (800.0 * h / w).round(),
            self.body
        )
    }
}

/// One row per sequence: `b1_x,b1_y,...,bn_x,bn_y`.
pub fn sequences_csv(set: &DiscreteSequenceSet) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=set.n)
        .flat_map(|i| [format!("b{i}_x"), format!("b{i}_y")])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for seq in set.iter() {
        let row: Vec<String> = seq.iter().flat_map(|p| [p.x.to_string(), p.y.to_string()]).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `tau,set_size,min_objective,hausdorff_to_reference`; empty fields flag
/// empty levels.
pub fn convergence_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from("tau,set_size,min_objective,hausdorff_to_reference\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.tau,
            r.set_size,
            opt(r.min_objective),
            opt(r.hausdorff_to_reference)
        );
    }
    out
}
