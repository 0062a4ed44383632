//! Five-point Gauss-Legendre rule, used for data without a closed-form primitive.

const NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Integral of `g` over `[a, b]` with a single five-point panel.
pub fn gauss5<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    NODES.iter().zip(WEIGHTS.iter()).map(|(x, w)| w * g(mid + half * x)).sum::<f64>() * half
}

/// Composite rule with `panels` equal panels.
pub fn gauss5_composite<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            gauss5(&g, lo, lo + h)
        })
        .sum()
}
