//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex-valued
//! integrands on finite real intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
    /// Whether the requested tolerance was met within the subdivision limit.
    pub converged: bool,
    /// First abscissa at which the integrand was not finite.
    pub nonfinite_at: Option<f64>,
}

/// One G7/K15 panel: (Kronrod value, |K − G|).
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, bad: &mut Option<f64>) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut check = |x: f64, v: Complex64| {
        if !(v.re.is_finite() && v.im.is_finite()) && bad.is_none() {
            *bad = Some(x);
        }
        v
    };
    let fc = check(c, f(c));
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = check(c - dx, f(c - dx));
        let f2 = check(c + dx, f(c + dx));
        k += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Integrates `f` over `[a, b]` until the error estimate falls below
/// `max(abs_tol, rel_tol·|I|)` or `max_subdiv` panels are in use.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdiv: usize,
) -> QuadResult {
    let mut bad = None;
    if a == b {
        return QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evals: 0,
            converged: true,
            nonfinite_at: None,
        };
    }
    let (v, e) = gk15(&f, a, b, &mut bad);
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    while bad.is_none() {
        if err <= abs_tol.max(rel_tol * total.norm()) {
            break;
        }
        if heap.len() >= max_subdiv {
            break;
        }
        let p = heap.pop().expect("non-empty heap");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // interval can no longer be split in floating point
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&f, p.a, m, &mut bad);
        let (v2, e2) = gk15(&f, m, p.b, &mut bad);
        evals += 30;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
    }
    // resum to avoid drift from the running updates
    let (mut value, mut error) = (Complex64::new(0.0, 0.0), 0.0);
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    QuadResult {
        value,
        error,
        evals,
        converged: bad.is_none() && error <= abs_tol.max(rel_tol * value.norm()),
        nonfinite_at: bad,
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdiv: usize,
) -> QuadResult {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol, max_subdiv)
}
