//! Unimodality of sampled curves and log-unimodality of measures: mode
//! counting with hysteresis, the Pick-function inequalities, and the
//! log-concavity test for the λ_b family.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{pick_transform, psi_prime, ComplexPoint, HalfPlaneGrid, LineMeasure};
use crate::error::{Error, Result};
use crate::measures::{Family, MeasureSpec};
use crate::scalar::{lit, logspace, Real};
use crate::tolerances::Tolerances;
use crate::zhong::DensityCurve;

/// Number of horizontal levels swept by [`count_modes`].
pub const LEVELS: usize = 50;
/// Samples per pass when a closed-form density is scanned for its mode.
const SCAN_POINTS: usize = 4096;
/// A secondary peak whose prominence stays within this many hysteresis
/// bands is too close to the threshold for a negative verdict.
const NEAR_THRESHOLD: f64 = 10.0;
/// Pick checks accept values down to `-PICK_REL_TOL · scale`.
pub const PICK_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Unimodal,
    NotUnimodal,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport<T> {
    pub verdict: Verdict,
    pub num_local_maxima: usize,
    /// Peak locations, parabolically refined, in increasing order.
    pub modes: Vec<T>,
    pub max_level_crossings: usize,
    /// Local grid spacing at the highest peak.
    pub resolution: T,
    /// Absolute hysteresis band `ε_rel · max`.
    pub tolerance: T,
}

struct Peak<T> {
    index: usize,
    prominence: T,
    at_resolution: bool,
}

/// Vertex of the parabola through three points with distinct abscissae.
fn parabola_vertex<T: Real>(x: [T; 3], y: [T; 3]) -> T {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if !(curv < T::zero()) {
        return x[1];
    }
    // Newton form y0 + d1 (s - x0) + curv (s - x0)(s - x1), differentiated.
    let v = (x[0] + x[1]) * lit(0.5) - d1 / (curv * lit(2.0));
    v.max(x[0]).min(x[2])
}

/// Counts strict local maxima of `y` over increasing `x` after suppressing
/// oscillations below `eps_rel · max y`, and the largest number of
/// up-crossings of 50 horizontal levels. Values are read as zero outside the
/// sampled range.
pub fn count_modes<T: Real>(x: &[T], y: &[T], eps_rel: T) -> Result<ModeReport<T>> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::DomainError("abscissae and values differ in length".into()));
    }
    if n < 64 {
        return Err(Error::DomainError(format!("mode counting needs at least 64 samples, got {n}")));
    }
    if !(eps_rel > T::zero() && eps_rel < lit(0.1)) {
        return Err(Error::DomainError(format!("hysteresis must lie in (0, 0.1), got {eps_rel}")));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DomainError("abscissae must be strictly increasing".into()));
    }
    if y.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
        return Err(Error::DomainError("values must be finite and nonnegative".into()));
    }
    let top = y.iter().copied().fold(T::zero(), T::max);
    if top == T::zero() {
        return Err(Error::DegenerateInput("curve is identically zero".into()));
    }
    let band = eps_rel * top;

    // Hysteresis extrema: alternate valley/peak, padded with zeros.
    let mut valleys = vec![T::zero()];
    let mut peaks: Vec<usize> = Vec::new();
    let mut rising = true;
    let mut ext_i = 0usize;
    let mut ext_v = T::zero();
    for (i, &v) in y.iter().enumerate() {
        if rising {
            if v > ext_v {
                ext_i = i;
                ext_v = v;
            } else if ext_v - v > band && ext_v - *valleys.last().unwrap() > band {
                peaks.push(ext_i);
                rising = false;
                ext_i = i;
                ext_v = v;
            }
        } else if v < ext_v {
            ext_i = i;
            ext_v = v;
        } else if v - ext_v > band {
            valleys.push(ext_v);
            rising = true;
            ext_i = i;
            ext_v = v;
        }
    }
    if rising && ext_v - *valleys.last().unwrap() > band {
        peaks.push(ext_i);
        valleys.push(T::zero());
    } else if !rising {
        valleys.push(T::zero());
    }
    let peak_info: Vec<Peak<T>> = peaks
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let prominence = y[i] - valleys[k].max(valleys[k + 1]);
            // Samples within half the prominence of the top, contiguous with it.
            let half = y[i] - prominence * lit(0.5);
            let left = y[..i].iter().rev().take_while(|&&v| v >= half).count();
            let right = y[i + 1..].iter().take_while(|&&v| v >= half).count();
            Peak { index: i, prominence, at_resolution: left + right < 2 }
        })
        .collect();

    // Level sweep with a hysteresis band around every level.
    let mut max_cross = 0usize;
    for k in 1..=LEVELS {
        let level = top * T::from_usize(k).unwrap() / T::from_usize(LEVELS + 1).unwrap();
        let mut above = false;
        let mut count = 0usize;
        for &v in y {
            if !above && v > level + band * lit(0.5) {
                above = true;
                count += 1;
            } else if above && v < level - band * lit(0.5) {
                above = false;
            }
        }
        max_cross = max_cross.max(count);
    }

    let modes: Vec<T> = peak_info
        .iter()
        .map(|p| {
            let i = p.index;
            if i == 0 || i + 1 == n {
                x[i]
            } else {
                parabola_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]])
            }
        })
        .collect();
    let main = peak_info
        .iter()
        .max_by(|a, b| y[a.index].partial_cmp(&y[b.index]).unwrap())
        .map(|p| p.index)
        .unwrap_or(0);
    let resolution = if main == 0 {
        x[1] - x[0]
    } else if main + 1 == n {
        x[n - 1] - x[n - 2]
    } else {
        (x[main + 1] - x[main - 1]) * lit(0.5)
    };

    let verdict = if peak_info.len() <= 1 && max_cross <= 1 {
        Verdict::Unimodal
    } else {
        let mut sorted: Vec<&Peak<T>> = peak_info.iter().collect();
        sorted.sort_by(|a, b| b.prominence.partial_cmp(&a.prominence).unwrap());
        let marginal = sorted
            .iter()
            .skip(1)
            .all(|p| p.prominence <= band * lit(NEAR_THRESHOLD) || p.at_resolution);
        if marginal {
            Verdict::Inconclusive
        } else {
            Verdict::NotUnimodal
        }
    };
    Ok(ModeReport {
        verdict,
        num_local_maxima: peak_info.len(),
        modes,
        max_level_crossings: max_cross,
        resolution,
        tolerance: band,
    })
}

fn sample_x_density<T: Real>(nu: &MeasureSpec<T>, x: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let mut xs = Vec::with_capacity(x.len());
    let mut ys = Vec::with_capacity(x.len());
    for &v in x {
        let d = nu.density_at(v)? * v;
        // Integrable singularities (Beta with q < 1 at 1) are skipped.
        if d.is_finite() {
            xs.push(v);
            ys.push(d);
        }
    }
    Ok((xs, ys))
}

/// Mode analysis of `x ↦ x·density(x)` for a measure with a density.
/// Closed forms are scanned on a log grid of the effective support and the
/// scan is repeated on a fine grid around the main peak.
pub fn is_log_unimodal<T: Real>(nu: &MeasureSpec<T>, eps_rel: T, tol: &Tolerances<T>) -> Result<ModeReport<T>> {
    if !nu.has_density() {
        return Err(Error::AtomicHasNoDensity);
    }
    if let MeasureSpec::Grid(g) = nu {
        let y: Vec<T> = g.x().iter().zip(g.f()).map(|(&x, &f)| x * f).collect();
        return count_modes(g.x(), &y, eps_rel);
    }
    let (lo, hi) = nu.effective_support(tol.tol_tail);
    let grid = logspace(lo, hi, SCAN_POINTS);
    let (xs, ys) = sample_x_density(nu, &grid)?;
    let coarse = count_modes(&xs, &ys, eps_rel)?;
    if coarse.modes.is_empty() {
        return Ok(coarse);
    }
    let step = (hi / lo).ln() / T::from_usize(SCAN_POINTS - 1).unwrap();
    let main = coarse
        .modes
        .iter()
        .copied()
        .max_by(|a, b| {
            let da = nu.density_at(*a).unwrap_or(T::zero()) * *a;
            let db = nu.density_at(*b).unwrap_or(T::zero()) * *b;
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let span: T = step * lit(4.0);
    let flo = (main * (-span).exp()).max(lo);
    let fhi = (main * span.exp()).min(hi);
    if !(fhi > flo) {
        return Ok(coarse);
    }
    let (fx, fy) = sample_x_density(nu, &logspace(flo, fhi, SCAN_POINTS))?;
    if fx.len() < 64 {
        return Ok(coarse);
    }
    // Only the location and resolution come from the local pass: the local
    // window cannot see the tails.
    let fine = count_modes(&fx, &fy, eps_rel)?;
    let local_top = fy.iter().copied().fold(T::zero(), T::max);
    let idx = fy.iter().position(|&v| v == local_top).unwrap();
    let refined = if idx == 0 || idx + 1 == fx.len() {
        fx[idx]
    } else {
        parabola_vertex([fx[idx - 1], fx[idx], fx[idx + 1]], [fy[idx - 1], fy[idx], fy[idx + 1]])
    };
    let mut modes = coarse.modes.clone();
    for m in modes.iter_mut() {
        if *m == main {
            *m = refined;
        }
    }
    modes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ModeReport { modes, resolution: fine.resolution, ..coarse })
}

/// Mode analysis of `x ↦ x·q(x)` for a computed density curve.
pub fn is_log_unimodal_curve<T: Real>(curve: &DensityCurve<T>, eps_rel: T) -> Result<ModeReport<T>> {
    count_modes(curve.x(), &curve.xq(), eps_rel)
}

/// How much a grid check can say.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// A violation was found: the inequality fails at that point.
    Certificate,
    /// No violation on the grid; the inequality is not proved off-grid.
    Supporting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PickReport<T> {
    pub holds: bool,
    pub evidence: Evidence,
    pub mode: T,
    /// Points where the inequality fails by more than `tol_pick`.
    pub violations: Vec<(ComplexPoint<T>, T)>,
    /// Most adverse signed value (minimum for the ψ form, maximum for the
    /// Pick form).
    pub extreme_value: T,
    pub extreme_point: ComplexPoint<T>,
    /// Grid maximum of the modulus of the checked expression.
    pub scale: T,
    pub tol_pick: T,
    pub points: usize,
}

/// `value` is the signed quantity required to be `>= 0`.
fn finish_report<T: Real>(mode: T, samples: Vec<(ComplexPoint<T>, T, T)>, sign: T) -> PickReport<T> {
    let scale = samples.iter().map(|s| s.2).fold(T::zero(), T::max);
    let tol_pick = scale * lit(PICK_REL_TOL);
    let mut extreme = (Complex::new(T::zero(), T::zero()), T::infinity());
    let mut violations = Vec::new();
    for &(z, v, _) in &samples {
        let signed = v * sign;
        if signed < extreme.1 {
            extreme = (z, signed);
        }
        if signed < -tol_pick {
            violations.push((z, v));
        }
    }
    let holds = violations.is_empty();
    PickReport {
        holds,
        evidence: if holds { Evidence::Supporting } else { Evidence::Certificate },
        mode,
        violations,
        extreme_value: extreme.1 * sign,
        extreme_point: extreme.0,
        scale,
        tol_pick,
        points: samples.len(),
    }
}

/// Checks `Im[z(1 - cz) ψ_μ'(z)] >= 0` on the grid, the condition for
/// `x dμ(x)` to be unimodal with mode `c`.
pub fn pick_inequality_check<T: Real>(
    mu: &MeasureSpec<T>,
    c: T,
    grid: &HalfPlaneGrid<T>,
    tol: &Tolerances<T>,
) -> Result<PickReport<T>> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::DomainError(format!("mode must be positive, got {c}")));
    }
    let one = Complex::new(T::one(), T::zero());
    let samples = grid
        .points()
        .par_iter()
        .map(|&z| {
            let w = z * (one - z * c) * psi_prime(mu, z, tol)?;
            Ok((z, w.im, w.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_report(c, samples, T::one()))
}

/// Checks `Im[(z - c) P_τ'(z)] <= 0` on the grid, the condition for `τ` to
/// be unimodal with mode `c`.
pub fn general_pick_check<T: Real>(
    tau: &LineMeasure<T>,
    c: T,
    grid: &HalfPlaneGrid<T>,
    tol: &Tolerances<T>,
) -> Result<PickReport<T>> {
    if !c.is_finite() {
        return Err(Error::DomainError(format!("mode must be finite, got {c}")));
    }
    let samples = grid
        .points()
        .par_iter()
        .map(|&z| {
            let (_, dp) = pick_transform(tau, z, tol)?;
            let w = (z - c) * dp;
            Ok((z, w.im, w.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_report(c, samples, -T::one()))
}

/// `g''(x)` for `g(x) = ln λ_b(e^x) + x`:
/// `2eˣ(cos b - 2eˣ + e²ˣ cos b)/(1 - 2eˣ cos b + e²ˣ)²`, evaluated as the
/// overflow-free `(cos b · cosh x - 1)/(cosh x - cos b)²`.
pub fn lambda_g_second<T: Real>(b: T, x: T) -> T {
    let c = b.cos();
    let ch = x.cosh();
    (c * ch - T::one()) / ((ch - c) * (ch - c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaStrongReport<T> {
    pub b: T,
    pub strongly_log_unimodal: bool,
    /// Some `x` with `g''(x) > 0` when the answer is negative.
    pub witness: Option<T>,
}

/// λ_b is strongly log-unimodal exactly when `cos b <= 0`.
pub fn lambda_strong_check<T: Real>(b: T) -> Result<LambdaStrongReport<T>> {
    Family::Lambda { b }.validate()?;
    // cos b <= 0 exactly when b >= π/2; comparing angles avoids the rounding
    // of cos near π/2.
    let strong = b >= T::FRAC_PI_2();
    let witness = if strong {
        None
    } else {
        // g'' > 0 once cosh x > 1/cos b; scan in steps of 1/2.
        (0..=400)
            .map(|k| T::from_usize(k).unwrap() * lit(0.5))
            .find(|&x| lambda_g_second(b, x) > T::zero())
    };
    Ok(LambdaStrongReport { b, strongly_log_unimodal: strong, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::linspace;
    use crate::zhong::{GridSpec, ZhongContext};
    use std::f64::consts::PI;

    fn named(f: Family<f64>) -> MeasureSpec<f64> {
        MeasureSpec::named(f).unwrap()
    }

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn tent_is_unimodal() {
        let x = linspace(0.0, 2.0, 201);
        let y: Vec<f64> = x.iter().map(|&v: &f64| 1.0 - (v - 1.0).abs()).collect();
        let r = count_modes(&x, &y, 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::Unimodal);
        assert_eq!(r.num_local_maxima, 1);
        assert!((r.modes[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.max_level_crossings, 1);
    }

    #[test]
    fn two_bumps_are_not_unimodal() {
        let x = linspace(-6.0, 6.0, 600);
        let y: Vec<f64> = x.iter().map(|&v| (-(v - 3.0f64).powi(2)).exp() + (-(v + 3.0f64).powi(2)).exp()).collect();
        let r = count_modes(&x, &y, 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::NotUnimodal);
        assert_eq!(r.num_local_maxima, 2);
        assert!((r.modes[0] + 3.0).abs() < 1e-3 && (r.modes[1] - 3.0).abs() < 1e-3);
        assert_eq!(r.max_level_crossings, 2);
    }

    #[test]
    fn small_wiggles_are_suppressed_or_flagged() {
        let x = linspace(0.0, 10.0, 1000);
        let bump = |v: f64| (-(v - 5.0f64).powi(2)).exp();
        let tiny: Vec<f64> = x.iter().map(|&v| bump(v) + 1e-6 * (20.0 * v).sin().abs()).collect();
        assert_eq!(count_modes(&x, &tiny, 1e-4).unwrap().verdict, Verdict::Unimodal);
        // A secondary bump of relative height 5e-4: above the band, below 10 bands.
        let marginal: Vec<f64> = x.iter().map(|&v| bump(v) + 5e-4 * (-(v - 8.5f64).powi(2) * 20.0).exp()).collect();
        assert_eq!(count_modes(&x, &marginal, 1e-4).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn monotone_curves_have_a_boundary_mode() {
        let x = linspace(1.0, 2.0, 100);
        let r = count_modes(&x, &x, 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::Unimodal);
        assert_eq!(r.modes, vec![2.0]);
    }

    #[test]
    fn bad_inputs() {
        let x = linspace(0.0, 1.0, 100);
        assert!(matches!(count_modes(&x, &vec![0.0; 100], 1e-4), Err(Error::DegenerateInput(_))));
        assert!(count_modes(&x[..10], &x[..10], 1e-4).is_err());
        assert!(count_modes(&x, &x, 0.5).is_err());
    }

    #[test]
    fn parabola_vertex_on_uneven_grid() {
        let f = |v: f64| -(v - 0.37) * (v - 0.37);
        let xs = [0.1, 0.3, 0.9];
        let v = parabola_vertex(xs, [f(xs[0]), f(xs[1]), f(xs[2])]);
        assert!((v - 0.37).abs() < 1e-12);
    }

    #[test]
    fn classical_log_modes() {
        let t = tol();
        let cases = [
            Family::Gamma { p: 2.0, theta: 1.0 },
            Family::HalfNormal { t: 4.0 },
            Family::Beta { p: 2.0, q: 3.0 },
            Family::Beta { p: 2.0, q: 0.5 },
            Family::MarchenkoPastur,
            Family::MarchenkoPasturInverse,
            Family::Lambda { b: 1.0 },
            Family::BooleanStable { alpha: 0.4 },
            Family::LogNormal { m: 0.5, s: 0.7 },
            Family::UniformInterval { alpha: 1.0, beta: 2.0 },
        ];
        for f in cases {
            let r = is_log_unimodal(&named(f), 1e-4, &t).unwrap();
            assert_eq!(r.verdict, Verdict::Unimodal, "{f:?}");
            let expect = f.known_log_mode().unwrap();
            let m = r.modes.iter().copied().min_by(|a, b| (a - expect).abs().partial_cmp(&(b - expect).abs()).unwrap());
            assert!((m.unwrap() - expect).abs() <= r.resolution.max(1e-9) * 1.01 + 1e-9 * expect, "{f:?}: {:?}", r);
        }
    }

    #[test]
    fn inversion_duality() {
        let t = tol();
        let nu = named(Family::Gamma { p: 3.0, theta: 0.5 });
        let inv = nu.invert(t.tol_tail).unwrap();
        let a = is_log_unimodal(&nu, 1e-4, &t).unwrap();
        let b = is_log_unimodal(&inv, 1e-4, &t).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert!((b.modes[0] * a.modes[0] - 1.0).abs() < 2e-2, "{} {}", a.modes[0], b.modes[0]);
    }

    #[test]
    fn atoms_are_rejected() {
        let d = named(Family::Dirac { c: 1.0 });
        assert_eq!(is_log_unimodal(&d, 1e-4, &tol()), Err(Error::AtomicHasNoDensity));
    }

    #[test]
    fn free_brownian_motion_is_log_unimodal() {
        let c = ZhongContext::new(named(Family::Dirac { c: 1.0 }), 1.0, tol()).unwrap();
        let curve = c.density_curve(&GridSpec::default()).unwrap();
        let r = is_log_unimodal_curve(&curve, 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::Unimodal);
        assert!((r.modes[0] - 1.0).abs() <= r.resolution);
    }

    fn small_grid() -> HalfPlaneGrid<f64> {
        HalfPlaneGrid::new((-10.0, 10.0, 24), (1e-3, 10.0, 24), crate::analytic::ImSpacing::Log).unwrap()
    }

    #[test]
    fn pick_holds_for_point_mass_at_its_mode() {
        let r = pick_inequality_check(&named(Family::Dirac { c: 2.0 }), 2.0, &small_grid(), &tol()).unwrap();
        assert!(r.holds);
        assert_eq!(r.evidence, Evidence::Supporting);
        assert!(r.extreme_value > 0.0);
    }

    #[test]
    fn pick_holds_for_gamma_at_its_mode() {
        let grid = HalfPlaneGrid::checker_default();
        let r = pick_inequality_check(&named(Family::Gamma { p: 2.0, theta: 1.0 }), 2.0, &grid, &tol()).unwrap();
        assert!(r.holds, "{:?} at {}", r.extreme_value, r.extreme_point);
        let wrong = pick_inequality_check(&named(Family::Gamma { p: 2.0, theta: 1.0 }), 6.0, &grid, &tol()).unwrap();
        assert!(!wrong.holds);
        assert_eq!(wrong.evidence, Evidence::Certificate);
    }

    #[test]
    fn pick_fails_for_two_atoms() {
        let mu = MeasureSpec::atomic(&[(0.5, 1.0), (0.5, 4.0)], 1e-12).unwrap();
        let grid = HalfPlaneGrid::checker_default();
        for c in linspace(0.5, 5.0, 19) {
            let r = pick_inequality_check(&mu, c, &grid, &tol()).unwrap();
            assert!(!r.holds, "c = {c}");
        }
    }

    #[test]
    fn general_pick_examples() {
        let t = tol();
        let grid = small_grid();
        let atom = general_pick_check(&LineMeasure::Atoms(vec![(1.0, 0.7)]), 0.7, &grid, &t).unwrap();
        assert!(atom.holds);
        let x = linspace(-1.0, 1.0, 201);
        let f = vec![0.5; 201];
        let uni = general_pick_check(&LineMeasure::Grid { x, f }, 0.0, &grid, &t).unwrap();
        assert!(uni.holds, "{} at {}", uni.extreme_value, uni.extreme_point);
        let x = linspace(-6.0, 6.0, 801);
        let f: Vec<f64> = x.iter().map(|&v| (-(v - 3.0f64).powi(2) * 4.0).exp() + (-(v + 3.0f64).powi(2) * 4.0).exp()).collect();
        let two = general_pick_check(&LineMeasure::Grid { x, f }, 0.0, &grid, &t).unwrap();
        assert!(!two.holds);
    }

    #[test]
    fn lambda_strong_examples() {
        let r = lambda_strong_check(2.0).unwrap();
        assert!(r.strongly_log_unimodal && r.witness.is_none());
        for x in linspace(-20.0, 20.0, 401) {
            assert!(lambda_g_second(2.0, x) <= 0.0);
        }
        assert!(lambda_strong_check(PI / 2.0).unwrap().strongly_log_unimodal);
        let r = lambda_strong_check(1.0).unwrap();
        assert!(!r.strongly_log_unimodal);
        assert_eq!(r.witness, Some(1.5));
        assert!(lambda_g_second(1.0, 1.5) > 0.0);
        assert!(lambda_strong_check(0.0).is_err());
    }

    #[test]
    fn g_second_matches_printed_form() {
        for b in [0.4, 1.0, 2.0, 2.9] {
            for x in [-3.0, -0.5, 0.0, 0.8, 2.5] {
                let e = f64::exp(x);
                let c = f64::cos(b);
                let printed = 2.0 * e * (c - 2.0 * e + e * e * c) / (1.0 - 2.0 * e * c + e * e).powi(2);
                assert!((lambda_g_second(b, x) - printed).abs() < 1e-12 * (1.0 + printed.abs()));
            }
        }
    }

    #[test]
    fn strong_verdict_sweep() {
        for b in linspace(0.01, PI - 0.01, 100) {
            let r = lambda_strong_check(b).unwrap();
            assert_eq!(r.strongly_log_unimodal, b.cos() <= 0.0);
            if let Some(w) = r.witness {
                assert!(lambda_g_second(b, w) > 0.0);
            }
        }
    }
}
