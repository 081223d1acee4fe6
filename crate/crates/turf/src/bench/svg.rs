//! Minimal SVG line chart: log-x sample size, linear-y mean ℓ1 error with
//! ±1 standard-error bars, one polyline per estimator.

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 48.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Renders the aggregated series `(label, [(n, mean, stderr)])` to an SVG
/// document string.
pub fn render_error_chart(title: &str, series: &[(String, Vec<(usize, f64, f64)>)]) -> String {
    let mut xs: Vec<f64> = Vec::new();
    let mut y_max: f64 = 0.0;
    for (_, pts) in series {
        for &(n, mean, se) in pts {
            xs.push((n as f64).log10());
            y_max = y_max.max(mean + se);
        }
    }
    let (x_lo, x_hi) = match (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    ) {
        (lo, hi) if lo.is_finite() && hi.is_finite() && hi > lo => (lo, hi),
        (lo, _) if lo.is_finite() => (lo - 0.5, lo + 0.5),
        _ => (2.5, 4.5),
    };
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    y_max *= 1.08;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |n: usize| MARGIN_L + ((n as f64).log10() - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |v: f64| MARGIN_T + (1.0 - v / y_max) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"26\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));

    // Axes.
    out.push_str(&format!(
        "<g stroke=\"#333\" stroke-width=\"1\"><line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/><line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\"/></g>\n",
        l = MARGIN_L,
        r = WIDTH - MARGIN_R,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B,
    ));

    // Y ticks.
    out.push_str("<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n");
    for i in 0..=5 {
        let v = y_max * i as f64 / 5.0;
        let y = py(v);
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{:.3}</text>\n",
            MARGIN_L - 8.0,
            y + 4.0,
            v
        ));
    }
    // X ticks at the data's sample sizes.
    let mut tick_ns: Vec<usize> = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|&(n, _, _)| n))
        .collect();
    tick_ns.sort_unstable();
    tick_ns.dedup();
    for n in &tick_ns {
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            px(*n),
            HEIGHT - MARGIN_B + 18.0,
            n
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">samples (log scale)</text>\n",
        WIDTH / 2.0,
        HEIGHT - 14.0
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">mean l1 error</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));
    out.push_str("</g>\n");

    // Series.
    for (si, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(n, mean, _)| format!("{:.2},{:.2}", px(n), py(mean)))
            .collect();
        out.push_str(&format!(
            "<g stroke=\"{color}\" fill=\"none\" stroke-width=\"1.8\"><polyline points=\"{}\"/></g>\n",
            path.join(" ")
        ));
        out.push_str(&format!("<g stroke=\"{color}\" fill=\"{color}\">\n"));
        for &(n, mean, se) in pts {
            let x = px(n);
            out.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{:.2}\" r=\"2.6\"/>\n",
                py(mean)
            ));
            if se > 0.0 {
                out.push_str(&format!(
                    "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\"/>\n",
                    py(mean - se),
                    py(mean + se)
                ));
            }
        }
        out.push_str("</g>\n");
        // Legend entry.
        let ly = MARGIN_T + 16.0 * si as f64 + 4.0;
        let lx = WIDTH - MARGIN_R - 150.0;
        out.push_str(&format!(
            "<g><line x1=\"{lx}\" y1=\"{ly}\" x2=\"{lx2}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/><text x=\"{tx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"12\">{text}</text></g>\n",
            lx2 = lx + 24.0,
            tx = lx + 30.0,
            ty = ly + 4.0,
            text = escape(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
