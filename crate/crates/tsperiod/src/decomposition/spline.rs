/// Natural cubic spline through strictly increasing knots `xs`, evaluated at
/// `0, 1, .., n-1`. Two knots give the straight line through them.
pub fn natural_cubic_on_grid(xs: &[f64], ys: &[f64], n: usize) -> Vec<f64> {
    let k = xs.len();
    debug_assert!(k >= 2 && xs.windows(2).all(|w| w[1] > w[0]));
    if k == 2 {
        let slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return (0..n).map(|t| ys[0] + slope * (t as f64 - xs[0])).collect();
    }
    let m = second_derivatives(xs, ys);
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for t in 0..n {
        let x = t as f64;
        while seg + 2 < k && x > xs[seg + 1] {
            seg += 1;
        }
        let h = xs[seg + 1] - xs[seg];
        let a = (xs[seg + 1] - x) / h;
        let b = (x - xs[seg]) / h;
        out.push(
            a * ys[seg]
                + b * ys[seg + 1]
                + ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * h * h / 6.0,
        );
    }
    out
}

/// Second derivatives at the knots with zero end curvature (Thomas algorithm).
fn second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let k = xs.len();
    let mut m = vec![0.0; k];
    let inner = k - 2;
    let mut diag = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    let mut upper = vec![0.0; inner];
    for i in 0..inner {
        let h0 = xs[i + 1] - xs[i];
        let h1 = xs[i + 2] - xs[i + 1];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
        if i > 0 {
            let w = h0 / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
    }
    for i in (0..inner).rev() {
        let next = if i + 1 < inner { m[i + 2] } else { 0.0 };
        m[i + 1] = (rhs[i] - upper[i] * next) / diag[i];
    }
    m
}
