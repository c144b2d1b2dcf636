//! Static SVG bar charts.

/// Vertical bar chart of `(label, value)` pairs scaled to the largest value.
pub fn bar_chart_svg(title: &str, bars: &[(String, f64)]) -> String {
    let bar_w = 18.0;
    let gap = 6.0;
    let (left, top, plot_h, label_h) = (60.0, 40.0, 300.0, 120.0);
    let width = left + bars.len() as f64 * (bar_w + gap) + 20.0;
    let height = top + plot_h + label_h;
    let max = bars.iter().map(|b| b.1).fold(0.0f64, f64::max);
    let scale = if max > 0.0 { plot_h / max } else { 0.0 };
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         font-family=\"sans-serif\" font-size=\"11\">\n\
         <text x=\"{left}\" y=\"20\" font-size=\"14\">{}</text>\n\
         <line x1=\"{left}\" y1=\"{}\" x2=\"{:.0}\" y2=\"{}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
        escape(title),
        top + plot_h,
        width - 10.0,
        top + plot_h,
        left - 4.0,
        top + 4.0,
        format_value(max),
    );
    for (k, (label, value)) in bars.iter().enumerate() {
        let x = left + gap / 2.0 + k as f64 * (bar_w + gap);
        let h = value * scale;
        let y = top + plot_h - h;
        out.push_str(&format!(
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bar_w}\" height=\"{h:.1}\" fill=\"steelblue\">\
             <title>{}: {}</title></rect>\n",
            escape(label),
            format_value(*value)
        ));
        let lx = x + bar_w / 2.0;
        let ly = top + plot_h + 8.0;
        out.push_str(&format!(
            "<text x=\"{lx:.1}\" y=\"{ly:.1}\" transform=\"rotate(60 {lx:.1} {ly:.1})\">{}</text>\n",
            escape(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn format_value(v: f64) -> String {
    format!("{v:.5}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
