//! The closed-form rank limit and its fixed points.
//!
//! With `φ_d(α) = exp(d(α - 1))`:
//!
//! * `R_d(α) = 2 - φ_d(1 - φ_d(α)) - (1 + d(1 - α)) φ_d(α)`
//! * `G_d(α) = α + φ_d(1 - φ_d(α)) - 1`
//! * `Ξ_d(α) = α + φ_d(α) - 1`
//! * `h_t(α) = α + 1 - φ_t(α)`
//!
//! `G_d` has one zero on `[0, 1]` for `d ≤ e` and three zeros
//! `α_⋆ < α_0 < α^⋆` for `d > e`; `α_0` is always the zero of `Ξ_d`. The
//! minimum of `R_d` is attained at `α_⋆` and `α^⋆`.

use std::f64::consts::E;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::TypeProfile;

/// Points in the sign-change scan of `[0, 1]`.
pub const SCAN_POINTS: usize = 10_000;

/// Within this distance of `e` the three zeros are reported as one.
pub const TRIPLE_ROOT_WINDOW: f64 = 1e-6;

pub fn phi(d: f64, alpha: f64) -> f64 {
    (d * (alpha - 1.0)).exp()
}

pub fn r(d: f64, alpha: f64) -> f64 {
    let p = phi(d, alpha);
    2.0 - phi(d, 1.0 - p) - (1.0 + d * (1.0 - alpha)) * p
}

pub fn g(d: f64, alpha: f64) -> f64 {
    alpha + phi(d, 1.0 - phi(d, alpha)) - 1.0
}

pub fn xi(d: f64, alpha: f64) -> f64 {
    alpha + phi(d, alpha) - 1.0
}

pub fn h(t: f64, alpha: f64) -> f64 {
    alpha + 1.0 - phi(t, alpha)
}

fn check_d(d: f64) -> Result<()> {
    if d.is_finite() && d >= 0.0 {
        Ok(())
    } else {
        Err(Error::usage(format!(
            "average degree must be finite and >= 0, got {d}"
        )))
    }
}

/// Bisects a sign change of `f` on `[lo, hi]` until the bracket cannot
/// shrink further in binary64.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // Both ends are adjacent doubles; return the one nearer to zero.
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Zero of the strictly increasing `Ξ_d`, refined by Newton steps from a
/// bisection start.
fn xi_root(d: f64) -> f64 {
    let mut a = bisect(|x| xi(d, x), 0.0, 1.0);
    for _ in 0..3 {
        let step = xi(d, a) / (1.0 + d * phi(d, a));
        if !step.is_finite() || step == 0.0 {
            break;
        }
        let next = a - step;
        if xi(d, next).abs() >= xi(d, a).abs() {
            break;
        }
        a = next;
    }
    a
}

/// The zeros of `G_d` and the minimum of `R_d` at one `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPoint {
    pub d: f64,
    pub alpha_star_lo: f64,
    pub alpha_zero: f64,
    pub alpha_star_hi: f64,
    #[serde(rename = "min_R")]
    pub min_r: f64,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
}

/// Sign-change brackets of `G_d` on a uniform grid over `[0, 1]`.
fn scan_brackets(d: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev_x = 0.0;
    let mut prev = g(d, 0.0);
    for k in 1..=SCAN_POINTS {
        let x = k as f64 / SCAN_POINTS as f64;
        let v = g(d, x);
        if prev == 0.0 {
            out.push((prev_x, prev_x));
        } else if (prev < 0.0) != (v < 0.0) && v != 0.0 {
            out.push((prev_x, x));
        }
        prev_x = x;
        prev = v;
    }
    if prev == 0.0 {
        out.push((1.0, 1.0));
    }
    out
}

/// Solves for `α_⋆ ≤ α_0 ≤ α^⋆`, `min R_d` and the leaf-removal constants.
pub fn solve_point(d: f64) -> Result<AnalyticPoint> {
    check_d(d)?;
    if d == 0.0 {
        return Ok(AnalyticPoint {
            d,
            alpha_star_lo: 0.0,
            alpha_zero: 0.0,
            alpha_star_hi: 0.0,
            min_r: 0.0,
            gamma_lo: 0.0,
            gamma_hi: 0.0,
        });
    }
    let alpha_zero = xi_root(d);
    let (lo, hi) = if d <= E || (d - E).abs() < TRIPLE_ROOT_WINDOW {
        (alpha_zero, alpha_zero)
    } else {
        let roots: Vec<f64> = scan_brackets(d)
            .into_iter()
            .map(|(a, b)| bisect(|x| g(d, x), a, b))
            .collect();
        match roots[..] {
            [lo, _, hi] => (lo, hi),
            _ => outer_roots_near(d, alpha_zero)?,
        }
    };
    let (gamma_lo, gamma_hi) = ks_fixed_point(d)?;
    Ok(AnalyticPoint {
        d,
        alpha_star_lo: lo,
        alpha_zero,
        alpha_star_hi: hi,
        min_r: r(d, hi),
        gamma_lo,
        gamma_hi,
    })
}

/// Fallback for `d` slightly above `e`, where the outer zeros may share a
/// grid cell with `α_0`: probe geometrically closer to `α_0` on each side
/// until `G_d` shows the sign it must have between the zeros.
fn outer_roots_near(d: f64, alpha_zero: f64) -> Result<(f64, f64)> {
    let mut step = 1.0 / SCAN_POINTS as f64;
    while step > 1e-15 {
        let left = alpha_zero - step;
        let right = alpha_zero + step;
        if g(d, left) > 0.0 && g(d, right) < 0.0 {
            let lo = bisect(|x| g(d, x), 0.0, left);
            let hi = bisect(|x| g(d, x), right, 1.0);
            return Ok((lo, hi));
        }
        step *= 0.5;
    }
    Err(Error::Internal(format!(
        "no bracket for the outer zeros of G at d = {d}"
    )))
}

/// `min_{α ∈ [0,1]} R_d(α)`.
pub fn min_r(d: f64) -> Result<f64> {
    Ok(solve_point(d)?.min_r)
}

/// `(γ_⋆, γ^⋆)`: `γ_⋆` is the smallest zero of `x = d exp(-d exp(-x))` and
/// `γ^⋆ = d exp(-γ_⋆)`. By convention `d = 0` gives `(0, 0)`.
pub fn ks_fixed_point(d: f64) -> Result<(f64, f64)> {
    check_d(d)?;
    if d == 0.0 {
        return Ok((0.0, 0.0));
    }
    let f = |x: f64| d * (-d * (-x).exp()).exp() - x;
    let lo = if (d - E).abs() < TRIPLE_ROOT_WINDOW {
        // Triple zero; it also solves x = d exp(-x), which is monotone.
        bisect(|x| d * (-x).exp() - x, 0.0, d)
    } else {
        // f(0) > 0 > f(d); take the first sign change.
        let mut prev = 0.0;
        let mut found = None;
        for k in 1..=SCAN_POINTS {
            let x = d * k as f64 / SCAN_POINTS as f64;
            if f(x) <= 0.0 {
                found = Some(bisect(f, prev, x));
                break;
            }
            prev = x;
        }
        found.ok_or_else(|| Error::Internal(format!("no leaf-removal fixed point at d = {d}")))?
    };
    Ok((lo, d * (-lo).exp()))
}

/// One Gauss–Kronrod (7, 15) panel: (Kronrod estimate, error estimate).
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const XK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WK: [f64; 8] = [
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
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = half * XK[k];
        let s = f(c - dx) + f(c + dx);
        kronrod += WK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod quadrature to an absolute tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth - 1) + recurse(f, m, b, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    recurse(&f, a, b, tol, 30)
}

/// Absolute target for the quadrature in [`integral_identity_residual`].
pub const QUADRATURE_TOL: f64 = 1e-8;

/// `|∫_0^d h_t(α^⋆(t)) dt - d R_d(α^⋆(d))|`.
pub fn integral_identity_residual(d: f64) -> Result<f64> {
    check_d(d)?;
    if d == 0.0 {
        return Ok(0.0);
    }
    let integrand = |t: f64| {
        let hi = solve_point(t).expect("t >= 0").alpha_star_hi;
        h(t, hi)
    };
    // α^⋆(t) leaves the branch of α_0 at t = e, so split there.
    let lhs = if d > E {
        integrate(integrand, 0.0, E, 0.5 * QUADRATURE_TOL)
            + integrate(integrand, E, d, 0.5 * QUADRATURE_TOL)
    } else {
        integrate(integrand, 0.0, d, QUADRATURE_TOL)
    };
    let hi = solve_point(d)?.alpha_star_hi;
    Ok((lhs - d * r(d, hi)).abs())
}

/// Coordinates `(x, y, z, u, v)` on the four-dimensional simplex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zeta {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub u: f64,
    pub v: f64,
}

impl Zeta {
    pub fn new(x: f64, y: f64, z: f64, u: f64, v: f64) -> Result<Self> {
        let all = [x, y, z, u, v];
        if all.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::usage("simplex coordinates must be nonnegative"));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::usage(format!(
                "simplex coordinates sum to {sum}, not 1"
            )));
        }
        Ok(Zeta { x, y, z, u, v })
    }

    pub fn from_profile(p: &TypeProfile) -> Self {
        Zeta {
            x: p.x(),
            y: p.y(),
            z: p.z(),
            u: p.u(),
            v: p.v(),
        }
    }
}

/// Values of the type functions `Y, U, V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeValues {
    pub y: f64,
    pub u: f64,
    pub v: f64,
}

/// `Y = 1 - g(x+y+u) - g(x+y+v) + g(x+y)`, `U = g(x+y+u) - g(x+y)`,
/// `V = g(x+y+v) - g(x+y)`.
pub fn type_functions(zeta: &Zeta, g: impl Fn(f64) -> f64) -> TypeValues {
    let base = zeta.x + zeta.y;
    let gu = g(base + zeta.u);
    let gv = g(base + zeta.v);
    let g0 = g(base);
    TypeValues {
        y: 1.0 - gu - gv + g0,
        u: gu - g0,
        v: gv - g0,
    }
}

/// One row of the curve table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    #[serde(flatten)]
    pub point: AnalyticPoint,
    pub integral_residual: f64,
}

/// The grid `d_min, d_min + step, ...` up to `d_max` (inclusive, within a
/// relative 1e-9 of the step).
pub fn d_grid(d_min: f64, d_max: f64, step: f64) -> Result<Vec<f64>> {
    check_d(d_min)?;
    check_d(d_max)?;
    if !(step.is_finite() && step > 0.0) || d_max < d_min {
        return Err(Error::usage("need d_min <= d_max and a positive step"));
    }
    let count = ((d_max - d_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| d_min + k as f64 * step).collect())
}

pub fn curve(d_min: f64, d_max: f64, step: f64) -> Result<Vec<CurveRow>> {
    d_grid(d_min, d_max, step)?
        .into_iter()
        .map(|d| {
            Ok(CurveRow {
                point: solve_point(d)?,
                integral_residual: integral_identity_residual(d)?,
            })
        })
        .collect()
}

/// Writes curve rows as CSV with the columns `d, alpha_star_lo, alpha_zero,
/// alpha_star_hi, min_R, gamma_lo, gamma_hi, integral_residual`.
pub fn write_curve_csv(rows: &[CurveRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "d",
        "alpha_star_lo",
        "alpha_zero",
        "alpha_star_hi",
        "min_R",
        "gamma_lo",
        "gamma_hi",
        "integral_residual",
    ])
    .map_err(csv_error)?;
    for row in rows {
        let p = &row.point;
        w.write_record(
            [
                p.d,
                p.alpha_star_lo,
                p.alpha_zero,
                p.alpha_star_hi,
                p.min_r,
                p.gamma_lo,
                p.gamma_hi,
                row.integral_residual,
            ]
            .iter()
            .map(|v| v.to_string()),
        )
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Internal(format!("csv: {e}"))
}
