//! Deterministic numerical kernels: adaptive Gauss-Kronrod quadrature with
//! mandatory breakpoints, bracketed root finding with a bisection fallback,
//! and bounded one-dimensional maximization.
//!
//! Subdivision order is worst-interval-first with a stable tie-break on the
//! left endpoint, so repeated runs on the same build produce bit-identical
//! results.

use crate::error::{Error, Result};

/// Tolerance contract for [`integrate_adaptive`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Absolute error floor, controlling when near-zero integrals stop.
    pub abs_tol: f64,
    /// Budget of interval bisections before giving up.
    pub max_subdivisions: usize,
    /// Interior points the initial partition must respect (sorted). Used to
    /// pin narrow spectral features that plain bisection could step over.
    pub mandatory_breakpoints: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_subdivisions: 10_000,
            mandatory_breakpoints: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::Domain(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::Domain(format!(
                "abs_tol must be >= 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
}

// 15-point Gauss-Kronrod nodes and weights (7-point Gauss embedded).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    left: f64,
    right: f64,
    value: f64,
    error: f64,
}

/// 15-point Gauss-Kronrod rule on [a, b] with the GSL-style rescaled error
/// estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half_len = 0.5 * (b - a);

    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];

    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { x })
        }
    };

    let f_center = eval(center)?;
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    for j in 0..7 {
        let abscissa = half_len * XGK[j];
        let f1 = eval(center - abscissa)?;
        let f2 = eval(center + abscissa)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let fsum = f1 + f2;
        if j % 2 != 0 {
            res_gauss += WG[j / 2] * fsum;
        }
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half_len;
    res_abs *= half_len.abs();
    res_asc *= half_len.abs();

    let mut err = ((res_kronrod - res_gauss) * half_len).abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    Ok(Panel {
        left: a,
        right: b,
        value,
        error: err,
    })
}

// Max-heap order: larger error first, ties broken toward the smaller left
// endpoint so the subdivision sequence is reproducible.
fn panel_priority(a: &Panel, b: &Panel) -> std::cmp::Ordering {
    a.error
        .total_cmp(&b.error)
        .then_with(|| b.left.total_cmp(&a.left))
}

/// Adaptive quadrature of `f` over [a, b].
///
/// The returned error estimate satisfies
/// `error <= max(abs_tol, rel_tol * |value|)` on success; exhausting the
/// subdivision budget yields [`Error::QuadratureNonConvergence`] carrying
/// the best estimate reached.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::Domain(format!(
            "integration bounds must satisfy a < b, got [{a}, {b}]"
        )));
    }
    for &bp in &spec.mandatory_breakpoints {
        if !(bp > a && bp < b) {
            return Err(Error::Domain(format!(
                "breakpoint {bp} is not strictly inside [{a}, {b}]"
            )));
        }
    }

    let mut edges = Vec::with_capacity(spec.mandatory_breakpoints.len() + 2);
    edges.push(a);
    edges.extend(spec.mandatory_breakpoints.iter().copied());
    edges.push(b);
    edges.sort_by(f64::total_cmp);

    let mut heap: Vec<Panel> = Vec::new();
    for pair in edges.windows(2) {
        if pair[0] < pair[1] {
            heap.push(gk15(&f, pair[0], pair[1])?);
        }
    }

    let tolerance = |value: f64| spec.abs_tol.max(spec.rel_tol * value.abs());

    let mut subdivisions = 0;
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= tolerance(total) {
            return Ok(Quadrature {
                value: total,
                error_estimate: total_err,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error_estimate: total_err,
                subdivisions,
            });
        }

        let worst_idx = heap
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| panel_priority(p, q))
            .map(|(i, _)| i)
            .expect("heap is non-empty");
        let worst = heap.swap_remove(worst_idx);
        let mid = 0.5 * (worst.left + worst.right);
        if mid <= worst.left || mid >= worst.right {
            // interval no longer splittable at f64 resolution; keep it
            heap.push(worst);
            return Err(Error::QuadratureNonConvergence {
                estimate: heap.iter().map(|p| p.value).sum(),
                error_estimate: heap.iter().map(|p| p.error).sum(),
                subdivisions,
            });
        }
        heap.push(gk15(&f, worst.left, mid)?);
        heap.push(gk15(&f, mid, worst.right)?);
        subdivisions += 1;
    }
}

/// Bracketed root-finding request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    /// (lo, hi) with a sign change of f between them.
    pub bracket: (f64, f64),
    /// Abscissa tolerance on the returned root.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl RootSpec {
    pub fn new(lo: f64, hi: f64, x_tol: f64) -> Self {
        Self {
            bracket: (lo, hi),
            x_tol,
            max_iter: 200,
        }
    }
}

/// Brent's method with guaranteed bisection fallback. The bracket condition
/// f(lo)·f(hi) <= 0 is verified at call time.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, spec: &RootSpec) -> Result<f64> {
    let (lo, hi) = spec.bracket;
    if !(lo < hi) {
        return Err(Error::Domain(format!(
            "bracket must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(spec.x_tol > 0.0) {
        return Err(Error::Domain(format!(
            "x_tol must be > 0, got {}",
            spec.x_tol
        )));
    }

    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(Error::NonFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(Error::NonFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket { lo, hi });
    }

    // keep |f(b)| <= |f(a)|: b is the current best iterate
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..spec.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation / secant step
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol {
            d
        } else if m > 0.0 {
            tol
        } else {
            -tol
        };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite { x: b });
        }
    }

    Err(Error::RootMaxIter {
        best: b,
        max_iter: spec.max_iter,
    })
}

/// Result of a bounded 1-D maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    /// Set when the coarse pre-scan saw more than one local maximum, i.e.
    /// the unimodality assumption looks violated.
    pub scan_warning: bool,
}

const PRE_SCAN_SAMPLES: usize = 33;

/// Golden-section maximization of `f` on [lo, hi].
///
/// The caller asserts unimodality; a 33-sample pre-scan picks the starting
/// bracket and flags gross violations. Boundary maximizers are returned
/// exactly.
pub fn maximize_1d<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    x_tol: f64,
) -> Result<Maximum> {
    if !(lo < hi) {
        return Err(Error::Domain(format!(
            "maximization interval must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(x_tol > 0.0) {
        return Err(Error::Domain(format!("x_tol must be > 0, got {x_tol}")));
    }

    let n = PRE_SCAN_SAMPLES;
    let mut xs = [0.0_f64; PRE_SCAN_SAMPLES];
    let mut ys = [0.0_f64; PRE_SCAN_SAMPLES];
    for i in 0..n {
        let x = if i == n - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        };
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFinite { x });
        }
        xs[i] = x;
        ys[i] = y;
    }

    let mut best = 0;
    for i in 1..n {
        if ys[i] > ys[best] {
            best = i;
        }
    }
    let mut local_maxima = 0;
    for i in 0..n {
        let up_left = i == 0 || ys[i] > ys[i - 1];
        let up_right = i == n - 1 || ys[i] > ys[i + 1];
        if up_left && up_right {
            local_maxima += 1;
        }
    }
    let scan_warning = local_maxima > 1;

    let a = if best == 0 { xs[0] } else { xs[best - 1] };
    let b = if best == n - 1 { xs[n - 1] } else { xs[best + 1] };

    // golden-section refinement of the bracket around the scan winner
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a) > x_tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let (mut x_star, mut v_star) = if f1 > f2 { (x1, f1) } else { (x2, f2) };

    // prefer exact endpoints when they are at least as good
    for &(xe, ye) in &[(xs[0], ys[0]), (xs[n - 1], ys[n - 1])] {
        if ye >= v_star {
            x_star = xe;
            v_star = ye;
        }
    }

    Ok(Maximum {
        x: x_star,
        value: v_star,
        scan_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial() {
        let q = integrate_adaptive(|x| x * x, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(q.error_estimate >= (q.value - 1.0 / 3.0).abs());
    }

    #[test]
    fn integrates_wide_lorentzian() {
        // unit half-width Lorentzian truncated at +-1e6 gamma: integral = pi
        // up to the 2e-6 truncation tail
        let q = integrate_adaptive(
            |x| 1.0 / (1.0 + x * x),
            -1e6,
            1e6,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let exact = std::f64::consts::PI - 2e-6; // atan tail ~ 1/x at the cut
        assert!(
            (q.value - exact).abs() / exact < 1e-6,
            "value {} vs {}",
            q.value,
            exact
        );
    }

    #[test]
    fn integrates_gaussian() {
        let q = integrate_adaptive(
            |x| (-x * x).exp(),
            -40.0,
            40.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((q.value - 1.7724538509055160273).abs() < 1e-12);
    }

    #[test]
    fn honors_breakpoints_on_narrow_feature() {
        // 1e-6-wide Lorentzian spike in a huge window; the breakpoint pins it
        let gamma = 1e-6;
        let spec = QuadratureSpec {
            mandatory_breakpoints: vec![0.0],
            ..QuadratureSpec::default()
        };
        let q = integrate_adaptive(
            |x| gamma * gamma / (gamma * gamma + x * x),
            -1e3,
            1e3,
            &spec,
        )
        .unwrap();
        let exact = gamma * std::f64::consts::PI;
        assert!((q.value - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn error_estimate_bounds_true_error_on_analytic_set() {
        let spec = QuadratureSpec::default();
        let cases: [(&dyn Fn(f64) -> f64, f64, f64, f64); 3] = [
            (&|x: f64| x * x, 0.0, 1.0, 1.0 / 3.0),
            (
                &|x: f64| (-x * x).exp(),
                -40.0,
                40.0,
                1.7724538509055160273,
            ),
            (
                &|x: f64| 1.0 / (1.0 + x * x),
                -1e4,
                1e4,
                std::f64::consts::PI - 2e-4,
            ),
        ];
        for (f, a, b, exact) in cases {
            let q = integrate_adaptive(f, a, b, &spec).unwrap();
            // allow the tiny analytic truncation slop on the Lorentzian case
            assert!(
                (q.value - exact).abs() <= q.error_estimate + 1e-9 * exact.abs(),
                "true error {} exceeds estimate {}",
                (q.value - exact).abs(),
                q.error_estimate
            );
        }
    }

    #[test]
    fn tightening_tolerance_never_hurts() {
        let exact = 1.7724538509055160273;
        let mut rel = 1e-3;
        let mut last_err = f64::INFINITY;
        while rel > 1e-12 {
            let spec = QuadratureSpec {
                rel_tol: rel,
                ..QuadratureSpec::default()
            };
            let q = integrate_adaptive(|x| (-x * x).exp(), -40.0, 40.0, &spec).unwrap();
            let err = (q.value - exact).abs();
            assert!(err <= last_err + 1e-15, "rel_tol {rel}: {err} > {last_err}");
            last_err = err;
            rel /= 2.0;
        }
    }

    #[test]
    fn reports_nonconvergence_with_best_estimate() {
        let spec = QuadratureSpec {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_subdivisions: 3,
            mandatory_breakpoints: vec![],
        };
        let err = integrate_adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, &spec).unwrap_err();
        match err {
            Error::QuadratureNonConvergence { estimate, .. } => {
                assert!(estimate.is_finite());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        let spec = QuadratureSpec::default();
        assert!(integrate_adaptive(|x| x, 1.0, 0.0, &spec).is_err());
        let bad = QuadratureSpec {
            mandatory_breakpoints: vec![2.0],
            ..QuadratureSpec::default()
        };
        assert!(integrate_adaptive(|x| x, 0.0, 1.0, &bad).is_err());
        assert!(matches!(
            integrate_adaptive(|x| (x - 0.5).ln(), 0.0, 1.0, &spec),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn deterministic_across_runs() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (x.sin() / (1.0 + x * x)).exp();
        let q1 = integrate_adaptive(f, -10.0, 10.0, &spec).unwrap();
        let q2 = integrate_adaptive(f, -10.0, 10.0, &spec).unwrap();
        assert_eq!(q1.value.to_bits(), q2.value.to_bits());
    }

    #[test]
    fn finds_linear_root() {
        let x = find_root(|x| x - 2.0, &RootSpec::new(0.0, 5.0, 1e-12)).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn finds_cosine_root() {
        let x = find_root(|x| x.cos(), &RootSpec::new(1.0, 2.0, 1e-12)).unwrap();
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn finds_cubic_root() {
        let x = find_root(|x| x * x * x - 8.0, &RootSpec::new(0.0, 4.0, 1e-12)).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_sign_preserving_bracket() {
        let err = find_root(|x| x * x + 1.0, &RootSpec::new(-1.0, 1.0, 1e-10)).unwrap_err();
        assert!(matches!(err, Error::InvalidBracket { .. }));
    }

    #[test]
    fn root_affine_invariance() {
        // root of f(x) = cos(x) vs the reparameterized g(y) = cos(3y - 5)
        let spec = RootSpec::new(1.0, 2.0, 1e-12);
        let x = find_root(|x| x.cos(), &spec).unwrap();
        let spec_y = RootSpec::new((1.0 + 5.0) / 3.0, (2.0 + 5.0) / 3.0, 1e-12 / 3.0);
        let y = find_root(|y: f64| (3.0 * y - 5.0).cos(), &spec_y).unwrap();
        assert!((3.0 * y - 5.0 - x).abs() < 1e-10);
    }

    #[test]
    fn maximizes_parabola() {
        let m = maximize_1d(|x| -(x - 1.0) * (x - 1.0), 0.0, 3.0, 1e-10).unwrap();
        assert!((m.x - 1.0).abs() < 1e-8);
        assert!(!m.scan_warning);
    }

    #[test]
    fn maximizes_sine() {
        let m = maximize_1d(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-10).unwrap();
        // flat-top accuracy floor for derivative-free search is sqrt(eps)
        assert!((m.x - std::f64::consts::FRAC_PI_2).abs() < 1e-7);
    }

    #[test]
    fn monotone_objective_returns_boundary() {
        let m = maximize_1d(|x| x, 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(m.x, 1.0);
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn scan_flags_multimodal_objective() {
        let m = maximize_1d(|x: f64| (6.0 * x).sin(), 0.0, 2.0, 1e-9).unwrap();
        assert!(m.scan_warning);
        assert!((m.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn maximize_affine_invariance() {
        let m1 = maximize_1d(|x: f64| -(x - 1.3).powi(2), 0.0, 3.0, 1e-11).unwrap();
        // same objective under x -> (u - 7)/2 on the matching interval
        let m2 = maximize_1d(|u: f64| -((u - 7.0) / 2.0 - 1.3).powi(2), 7.0, 13.0, 2e-11).unwrap();
        assert!(((m2.x - 7.0) / 2.0 - m1.x).abs() < 1e-9);
    }
}
