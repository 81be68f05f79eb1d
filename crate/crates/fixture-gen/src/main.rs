//! Generates the external genus-3 trigonal period fixture.
//!
//! The library accepts trigonal period matrices from a file only; this
//! tool is how that file is produced.  It integrates the holomorphic and
//! second-kind bases of a cyclic trigonal curve `y^3 = q(x)` along closed
//! loops (pairs of opposite root circuits, which return to the starting
//! sheet), recovers the integer intersection matrix of those loops from
//! the Riemann bilinear relations, symplectically normalises it, and
//! writes the resulting period data.  The identity suite is run before
//! anything is written, so a bad fixture cannot be produced silently.

use num_complex::Complex64;

use kptau::curve::{CurveModel, CyclicTrigonalCurve};
use kptau::identities::trigonal_suite;
use kptau::linalg::czero;
use kptau::periods::periods_from_cycles;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The fixture curve `y^3 = x^4 - 5 x^2 + 4 = (x^2 - 1)(x^2 - 4)`.
fn fixture_curve() -> CyclicTrigonalCurve {
    CyclicTrigonalCurve::new([c(0.0, 0.0), c(-5.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)])
}

fn quartic(t: &CyclicTrigonalCurve, x: Complex64) -> Complex64 {
    let q = t.quartic();
    let mut acc = Complex64::new(0.0, 0.0);
    for &qk in q.iter().rev() {
        acc = acc * x + qk;
    }
    acc
}

fn quartic_deriv(t: &CyclicTrigonalCurve, x: Complex64) -> Complex64 {
    let q = t.quartic();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (1..q.len()).rev() {
        acc = acc * x + q[k] * k as f64;
    }
    acc
}

/// Integrands `(u_1, u_2, u_3, r_1, r_2, r_3) / dx` at a point of the
/// curve, matching the basis conventions of the library.
fn integrands(t: &CyclicTrigonalCurve, x: Complex64, y: Complex64) -> [Complex64; 6] {
    let beta = t.beta();
    let y2 = y * y;
    [
        1.0 / (3.0 * y),
        x / (3.0 * y2),
        1.0 / (3.0 * y2),
        x * x / (3.0 * y2),
        2.0 * x / (3.0 * y),
        (5.0 * x * x + 3.0 * beta[0] * x + beta[1]) / (3.0 * y),
    ]
}

/// One RK4 continuation of the joint state `(y, int u, int r)` along the
/// straight segment from `x0` to `x1`, starting on the sheet `y0`.  The
/// step count scales with the segment length.
fn continue_segment(
    t: &CyclicTrigonalCurve,
    x0: Complex64,
    x1: Complex64,
    y0: Complex64,
    steps_per_unit: f64,
    acc: &mut [Complex64; 6],
) -> Complex64 {
    let len = (x1 - x0).norm();
    let steps = ((len * steps_per_unit).ceil() as usize).max(16);
    let dx = (x1 - x0) / steps as f64;
    let mut x = x0;
    let mut y = y0;
    for _ in 0..steps {
        // RK4 on the 7-component state: dy/dx = q'(x)/(3 y^2) and
        // dI_j/dx = integrand_j(x, y)
        let f = |x: Complex64, y: Complex64| quartic_deriv(t, x) / (3.0 * y * y);
        let k1y = f(x, y);
        let k1i = integrands(t, x, y);
        let y2 = y + dx * k1y / 2.0;
        let k2y = f(x + dx / 2.0, y2);
        let k2i = integrands(t, x + dx / 2.0, y2);
        let y3 = y + dx * k2y / 2.0;
        let k3y = f(x + dx / 2.0, y3);
        let k3i = integrands(t, x + dx / 2.0, y3);
        let y4 = y + dx * k3y;
        let k4y = f(x + dx, y4);
        let k4i = integrands(t, x + dx, y4);
        for j in 0..6 {
            acc[j] += dx * (k1i[j] + 2.0 * k2i[j] + 2.0 * k3i[j] + k4i[j]) / 6.0;
        }
        y += dx * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0;
        x += dx;
        // polish the sheet with two Newton steps on y^3 = q(x)
        let q = quartic(t, x);
        y -= (y * y * y - q) / (3.0 * y * y);
        y -= (y * y * y - q) / (3.0 * y * y);
    }
    y
}

/// Closed loop: circle around `root_a` counterclockwise, then around
/// `root_b` clockwise, connected to the base point by straight spokes and
/// lifted starting from sheet `sheet` (y multiplied by the cube root of
/// unity to that power).  The opposite circuits cancel the monodromy.
fn loop_periods(
    t: &CyclicTrigonalCurve,
    base_x: Complex64,
    base_y: Complex64,
    root_a: Complex64,
    root_b: Complex64,
    sheet: u32,
    steps_per_unit: f64,
) -> ([Complex64; 6], f64) {
    let omega = Complex64::new(-0.5, 3.0f64.sqrt() / 2.0);
    let y_start = base_y * omega.powu(sheet);
    let mut acc = [Complex64::new(0.0, 0.0); 6];
    let radius = 0.45;
    let arcs = 48usize;

    let mut y = y_start;
    let mut pos = base_x;
    let mut walk = |to: Complex64, y_in: Complex64, acc: &mut [Complex64; 6], pos: &mut Complex64| {
        let out = continue_segment(t, *pos, to, y_in, steps_per_unit, acc);
        *pos = to;
        out
    };
    for (root, ccw) in [(root_a, true), (root_b, false)] {
        // spoke in
        let entry = root + radius;
        y = walk(entry, y, &mut acc, &mut pos);
        // circle
        for k in 1..=arcs {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / arcs as f64
                * if ccw { 1.0 } else { -1.0 };
            let target = root + radius * Complex64::new(angle.cos(), angle.sin());
            y = walk(target, y, &mut acc, &mut pos);
        }
        // spoke out
        y = walk(base_x, y, &mut acc, &mut pos);
    }
    let closure = (y - y_start).norm() / y_start.norm();
    (acc, closure)
}

fn main() {
    let t = fixture_curve();
    let curve = CurveModel::CyclicTrigonal(t.clone());
    let roots = [c(-2.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
    let base_x = c(3.7, 1.3);
    let base_y = {
        // principal cube root at the base point
        let q = quartic(&t, base_x);
        q.powf(1.0 / 3.0)
    };

    // candidate loops: adjacent root pairs at two sheet lifts
    let pairs = [(0usize, 1usize), (1, 2), (2, 3)];
    let mut full = czero(6, 6);
    let mut col = 0;
    for &(a, b) in &pairs {
        for sheet in [0u32, 1] {
            let (coarse, close1) = loop_periods(&t, base_x, base_y, roots[a], roots[b], sheet, 300.0);
            let (fine, close2) = loop_periods(&t, base_x, base_y, roots[a], roots[b], sheet, 600.0);
            let drift = coarse
                .iter()
                .zip(&fine)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(close1 < 1e-9 && close2 < 1e-10, "loop failed to close on its sheet");
            assert!(drift < 1e-9, "loop integrals not converged (drift {drift:.3e})");
            for row in 0..6 {
                full[row][col] = fine[row];
            }
            col += 1;
        }
    }

    let pd = periods_from_cycles(&full).expect("cycle set must be unimodular");
    pd.validate(1e-8).expect("period invariants");
    println!("legendre residual: {:.3e}", pd.legendre_residual());

    let reports = trigonal_suite(&curve, Some(&pd), 6, 1e-6, 0).expect("suite runs");
    let mut ok = true;
    for r in &reports {
        println!(
            "{:40} residual {:.3e} scale {:.3e} {}",
            r.name,
            r.residual,
            r.scale,
            if r.pass { "pass" } else { "FAIL" }
        );
        ok &= r.pass;
    }
    assert!(ok, "identity suite failed; refusing to write the fixture");

    let out = std::env::args().nth(1).unwrap_or_else(|| "trigonal_g3_periods.json".to_string());
    pd.save(std::path::Path::new(&out)).expect("write fixture");
    println!("wrote {out}");
}
