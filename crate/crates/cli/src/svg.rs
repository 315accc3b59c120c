//! Minimal SVG line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const PAD: f64 = 56.0;

fn fmt(x: f64) -> String {
    format!("{x:.3}")
}

fn tick(x: f64) -> String {
    format!("{x:.4e}")
}

/// One polyline of `(x, y)` points with axis labels and extreme values.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let finite: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let bounds = |f: fn(&(f64, f64)) -> f64| {
        let lo = finite.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = finite.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = bounds(|p| p.0);
    let (y0, y1) = bounds(|p| p.1);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
    let sy = |y: f64| HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        fmt(WIDTH / 2.0),
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{l},{t} L{l},{b} L{r},{b}" fill="none" stroke="black"/>"#,
        l = fmt(PAD),
        t = fmt(PAD),
        b = fmt(HEIGHT - PAD),
        r = fmt(WIDTH - PAD)
    );
    let label = |svg: &mut String, x: f64, y: f64, anchor: &str, text: &str| {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            fmt(x),
            fmt(y),
            escape(text)
        );
    };
    label(&mut svg, PAD, HEIGHT - PAD + 16.0, "start", &tick(x0));
    label(&mut svg, WIDTH - PAD, HEIGHT - PAD + 16.0, "end", &tick(x1));
    label(&mut svg, WIDTH / 2.0, HEIGHT - 12.0, "middle", x_label);
    label(&mut svg, PAD - 4.0, HEIGHT - PAD, "end", &tick(y0));
    label(&mut svg, PAD - 4.0, PAD + 4.0, "end", &tick(y1));
    label(&mut svg, 14.0, HEIGHT / 2.0, "start", y_label);

    let mut d = String::new();
    for (k, (x, y)) in finite.iter().enumerate() {
        let _ = write!(d, "{}{},{} ", if k == 0 { "M" } else { "L" }, fmt(sx(*x)), fmt(sy(*y)));
    }
    let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#, d.trim_end());
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed() {
        let svg = line_plot("h(t)", "t", "h", &[(0.0, 1.0), (1.0, 0.5), (2.0, f64::NAN)]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains("M56.000,56.000 L584.000,344.000"));
    }

    #[test]
    fn flat_series_does_not_divide_by_zero() {
        let svg = line_plot("c", "x", "y", &[(0.0, 2.0), (1.0, 2.0)]);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
