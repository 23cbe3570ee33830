//! Solution-count criterion for log-unimodality of `σ_t ⊠ ν`, the bound
//! `D_{α,β}`, classical multiplicative convolution, and the atomic
//! counterexample family with its disconnected-support certificate.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{lambda_constant, Atom, AtomicMeasure, GridDensity, MeasureSpec};
use crate::quad::gauss_kronrod;
use crate::roots::{brent, golden_min, RootOptions};
use crate::scalar::{linspace, lit, logspace, Real};
use crate::tolerances::Tolerances;
use crate::zhong::ZhongContext;

/// Default number of `r` samples when counting solutions.
pub const COUNT_GRID: usize = 4096;
/// Default number of `R` values in a sweep.
pub const SWEEP_SIZE: usize = 64;
/// Cells given to the narrower factor in a log-grid convolution.
pub const CONVOLUTION_CELLS: usize = 1024;
/// Largest log grid a convolution may allocate.
const MAX_CONVOLUTION_CELLS: usize = 1 << 18;

/// `Θ_R(r) = (sin R/R) ∫ rξ/(1 + r²ξ² - 2rξ cos R) dν(ξ)`.
pub fn theta_r<T: Real>(nu: &MeasureSpec<T>, big_r: T, r: T, tol: &Tolerances<T>) -> Result<T> {
    ZhongContext::new(nu.clone(), T::one(), *tol)?.theta_equation_lhs(r, big_r)
}

/// Roots of `h(r) = 0` found on a log grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionCount<T> {
    /// Distinct roots, tangencies counted once.
    pub count: usize,
    /// `count` with every tangency counted twice.
    pub conservative_count: usize,
    /// A tangency (double root within tolerance) was met.
    pub boundary: bool,
    pub locations: Vec<T>,
    pub tangencies: Vec<T>,
}

/// Counts the solutions of `h(r) = 0` on `[lo, hi]` from `n` log-spaced
/// samples. Sign changes are polished by Brent's method in `ln r`; each
/// discrete local extremum is refined by golden-section search to expose
/// pairs of roots hidden between two samples and tangencies, where
/// `|h| <= f_tol` at the extremum.
pub fn count_solutions<T, H>(h: H, window: (T, T), n: usize, f_tol: T) -> Result<SolutionCount<T>>
where
    T: Real,
    H: Fn(T) -> Result<T> + Sync,
{
    let (lo, hi) = window;
    if !(lo > T::zero() && hi > lo && hi.is_finite()) {
        return Err(Error::DomainError(format!("bad r-window [{lo:e}, {hi:e}]")));
    }
    if n < 16 {
        return Err(Error::DomainError(format!("solution counting needs at least 16 samples, got {n}")));
    }
    let rs = logspace(lo, hi, n);
    let hs = rs.par_iter().map(|&r| h(r)).collect::<Result<Vec<T>>>()?;
    if hs[0] >= T::zero() || hs[n - 1] >= T::zero() {
        return Err(Error::WindowTooNarrow(format!(
            "level reached at a window end: h({lo:e}) = {:e}, h({hi:e}) = {:e}",
            hs[0],
            hs[n - 1]
        )));
    }
    let hl = |s: T| h(s.exp());
    let opts = RootOptions { f_tol, x_tol: T::zero(), max_iter: 200 };
    let polish = |a: T, b: T, ha: T, hb: T| brent(&hl, a.ln(), b.ln(), ha, hb, &opts, "count_solutions").map(T::exp);

    let mut consumed = vec![false; n - 1];
    let mut roots = Vec::new();
    let mut tangencies = Vec::new();
    for i in 1..n - 1 {
        let (a, b, c) = (hs[i - 1], hs[i], hs[i + 1]);
        let is_max = a < T::zero() && c < T::zero() && b >= a && b >= c;
        let is_min = a > T::zero() && c > T::zero() && b <= a && b <= c;
        if !(is_max || is_min) || consumed[i - 1] {
            continue;
        }
        let sign = if is_max { -T::one() } else { T::one() };
        let (m, v) = golden_min(|s: T| hl(s).map(|x| x * sign), rs[i - 1].ln(), rs[i + 1].ln(), 200)?;
        let (m, v) = (m.exp(), v * sign);
        if v.abs() <= f_tol {
            tangencies.push(m);
            consumed[i - 1] = true;
            consumed[i] = true;
        } else if v.signum() != a.signum() {
            roots.push(polish(rs[i - 1], m, a, v)?);
            roots.push(polish(m, rs[i + 1], v, c)?);
            consumed[i - 1] = true;
            consumed[i] = true;
        }
    }
    for i in 0..n - 1 {
        if consumed[i] {
            continue;
        }
        if hs[i] == T::zero() && i > 0 && !consumed[i - 1] {
            roots.push(rs[i]);
        } else if hs[i] * hs[i + 1] < T::zero() {
            roots.push(polish(rs[i], rs[i + 1], hs[i], hs[i + 1])?);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    tangencies.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut locations: Vec<T> = roots.iter().chain(&tangencies).copied().collect();
    locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(SolutionCount {
        count: roots.len() + tangencies.len(),
        conservative_count: roots.len() + 2 * tangencies.len(),
        boundary: !tangencies.is_empty(),
        locations,
        tangencies,
    })
}

/// Solutions of `Θ_R(r) = 1/t` in `r`.
pub fn count_theta_solutions<T: Real>(
    nu: &MeasureSpec<T>,
    big_r: T,
    t: T,
    window: Option<(T, T)>,
    n: usize,
    tol: &Tolerances<T>,
) -> Result<SolutionCount<T>> {
    let ctx = ZhongContext::new(nu.clone(), t, *tol)?;
    count_theta_with(&ctx, big_r, window, n)
}

fn count_theta_with<T: Real>(
    ctx: &ZhongContext<T>,
    big_r: T,
    window: Option<(T, T)>,
    n: usize,
) -> Result<SolutionCount<T>> {
    if !(big_r > T::zero() && big_r < T::PI()) {
        return Err(Error::DomainError(format!("R must lie in (0, pi), got {big_r}")));
    }
    let level = ctx.t().recip();
    count_solutions(
        |r| ctx.theta_equation_lhs(r, big_r).map(|v| v - level),
        window.unwrap_or_else(|| ctx.default_window()),
        n,
        ctx.tolerances().tol_root * level,
    )
}

/// `R` values clustered towards both ends of `(0.01, π - 0.01)`.
pub fn default_r_sweep<T: Real>(n: usize) -> Vec<T> {
    let lo: T = lit(0.01);
    let hi = T::PI() - lo;
    linspace(T::zero(), T::one(), n)
        .into_iter()
        .map(|s| lo + (hi - lo) * (T::one() - (T::PI() * s).cos()) * lit(0.5))
        .collect()
}

/// Outcome of a sweep over the parameter of an equation family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport<T> {
    pub t: T,
    /// Swept parameter (`R`, or `a` for the convolution form).
    pub parameters: Vec<T>,
    pub counts: Vec<usize>,
    pub conservative_counts: Vec<usize>,
    pub boundary: Vec<bool>,
    pub locations: Vec<Vec<T>>,
    pub max_count: usize,
    /// Every conservative count is at most 2.
    pub verdict: bool,
}

impl<T: Real> CriterionReport<T> {
    fn from_counts(t: T, parameters: Vec<T>, counts: Vec<SolutionCount<T>>) -> Self {
        let max_count = counts.iter().map(|c| c.conservative_count).max().unwrap_or(0);
        Self {
            t,
            parameters,
            counts: counts.iter().map(|c| c.count).collect(),
            conservative_counts: counts.iter().map(|c| c.conservative_count).collect(),
            boundary: counts.iter().map(|c| c.boundary).collect(),
            locations: counts.into_iter().map(|c| c.locations).collect(),
            max_count,
            verdict: max_count <= 2,
        }
    }
}

/// Counts `Θ_R(r) = 1/t` over a sweep of `R` (default [`default_r_sweep`]).
pub fn theta_sweep<T: Real>(
    nu: &MeasureSpec<T>,
    t: T,
    rs: Option<Vec<T>>,
    window: Option<(T, T)>,
    n: usize,
    tol: &Tolerances<T>,
) -> Result<CriterionReport<T>> {
    let ctx = ZhongContext::new(nu.clone(), t, *tol)?;
    let rs = rs.unwrap_or_else(|| default_r_sweep(SWEEP_SIZE));
    let counts = rs.iter().map(|&big_r| count_theta_with(&ctx, big_r, window, n)).collect::<Result<Vec<_>>>()?;
    Ok(CriterionReport::from_counts(t, rs, counts))
}

/// `D_{α,β} = 2β²(α+β)²π / √(4α⁶β² - (3α⁴ - β⁴)²)`.
pub fn d_bound<T: Real>(alpha: T, beta: T) -> Result<T> {
    if !(alpha > T::zero() && beta > alpha && beta.is_finite()) {
        return Err(Error::DomainError(format!("need 0 < alpha < beta, got alpha={alpha}, beta={beta}")));
    }
    let (a2, b2) = (alpha * alpha, beta * beta);
    let (a3, a4, b4) = (a2 * alpha, a2 * a2, b2 * b2);
    let two: T = lit(2.0);
    if b4 - lit::<T>(3.0) * a4 >= two * a3 * beta {
        return Err(Error::HypothesisViolated(format!(
            "beta^4 - 3 alpha^4 = {:e} is not below 2 alpha^3 beta = {:e}",
            b4 - lit::<T>(3.0) * a4,
            two * a3 * beta
        )));
    }
    let k = lit::<T>(3.0) * a4 - b4;
    let disc = lit::<T>(4.0) * a4 * a2 * b2 - k * k;
    if !(disc > T::zero()) {
        return Err(Error::HypothesisViolated(format!("4 alpha^6 beta^2 - (3 alpha^4 - beta^4)^2 = {disc:e} <= 0")));
    }
    Ok(two * b2 * (alpha + beta).powi(2) * T::PI() / disc.sqrt())
}

/// `(3α⁴ - β⁴)/(2α³β)`: the threshold on `cos R` between the concave case
/// and the uniform lower bound case.
pub fn case_threshold<T: Real>(alpha: T, beta: T) -> T {
    let a3 = alpha * alpha * alpha;
    (lit::<T>(3.0) * a3 * alpha - beta.powi(4)) / (lit::<T>(2.0) * a3 * beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapCheck<T> {
    /// `Θ_R(r) > 1/t` at every sample.
    pub holds: bool,
    /// Smallest sampled `Θ_R(r)`; `+∞` when no `R` qualifies.
    pub min_theta: T,
    pub level: T,
    /// Largest `R` with `cos R` above the threshold; zero when none.
    pub r_big_max: T,
    pub samples: usize,
}

/// Samples `Θ_R(r)` on `R ∈ (0, π)` with `cos R > (3α⁴-β⁴)/(2α³β)` and
/// `r ∈ [1/β, 1/α]`, checking that it stays above `1/t`. `ν` must live on
/// `[α, β]` (`α = β` is allowed).
pub fn case2_gap_check<T: Real>(
    nu: &MeasureSpec<T>,
    (alpha, beta): (T, T),
    t: T,
    samples: usize,
    tol: &Tolerances<T>,
) -> Result<GapCheck<T>> {
    if !(alpha > T::zero() && beta >= alpha && beta.is_finite()) {
        return Err(Error::DomainError(format!("need 0 < alpha <= beta, got [{alpha}, {beta}]")));
    }
    let (lo, hi) = nu.support_hull();
    let slack = T::epsilon() * lit(16.0);
    if lo < alpha * (T::one() - slack) || hi > beta * (T::one() + slack) {
        return Err(Error::DomainError(format!("support [{lo:e}, {hi:e}] is not inside [{alpha:e}, {beta:e}]")));
    }
    let kappa = case_threshold(alpha, beta);
    let level = t.recip();
    if kappa >= T::one() {
        return Ok(GapCheck { holds: true, min_theta: T::infinity(), level, r_big_max: T::zero(), samples: 0 });
    }
    let r_big_max = if kappa <= -T::one() { T::PI() } else { kappa.acos() };
    let ctx = ZhongContext::new(nu.clone(), t, *tol)?;
    let m = samples.max(2);
    // Open at both ends: R in (0, r_big_max).
    let big_rs: Vec<T> = (1..=m).map(|i| r_big_max * T::from_usize(i).unwrap() / T::from_usize(m + 1).unwrap()).collect();
    let rs = logspace(beta.recip(), alpha.recip(), m);
    let pairs: Vec<(T, T)> = big_rs.iter().flat_map(|&a| rs.iter().map(move |&r| (a, r))).collect();
    let values = pairs.par_iter().map(|&(a, r)| ctx.theta_equation_lhs(r, a)).collect::<Result<Vec<T>>>()?;
    let min_theta = values.iter().copied().fold(T::infinity(), T::min);
    Ok(GapCheck { holds: min_theta > level, min_theta, level, r_big_max, samples: values.len() })
}

/// Cell masses of the log-pushforward of a measure with a density on the
/// uniform grid `y0 + [i, i+1]·h`, `i < m`.
fn log_cell_masses<T: Real>(nu: &MeasureSpec<T>, y0: T, h: T, m: usize) -> Vec<T> {
    let g = |y: T| {
        let x = y.exp();
        match nu.density_at(x) {
            Ok(d) if d.is_finite() => d * x,
            _ => T::zero(),
        }
    };
    (0..m)
        .into_par_iter()
        .map(|i| {
            let a = y0 + h * T::from_usize(i).unwrap();
            let (v, _, _): (T, T, bool) = gauss_kronrod(&g, a, a + h);
            v.max(T::zero())
        })
        .collect()
}

/// Density of `XY` for independent `X ~ μ`, `Y ~ ν`.
///
/// Two atomic inputs give the atomic product law. An atomic factor with a
/// density factor gives the mixture of dilations, sampled on `cells` log
/// points. Two densities are convolved as log-pushforwards on a shared
/// uniform grid in `ln x` whose step gives the narrower factor `cells`
/// cells.
pub fn mult_convolve<T: Real>(
    mu: &MeasureSpec<T>,
    nu: &MeasureSpec<T>,
    cells: usize,
    tol: &Tolerances<T>,
) -> Result<MeasureSpec<T>> {
    if cells < 16 {
        return Err(Error::DomainError(format!("convolution needs at least 16 cells, got {cells}")));
    }
    match (mu.point_masses(), nu.point_masses()) {
        (Some(a), Some(b)) => {
            let mut atoms: Vec<Atom<T>> = a
                .iter()
                .flat_map(|p| b.iter().map(move |q| Atom { weight: p.weight * q.weight, location: p.location * q.location }))
                .collect();
            atoms.sort_by(|p, q| p.location.partial_cmp(&q.location).unwrap());
            let mut merged: Vec<Atom<T>> = Vec::new();
            for at in atoms {
                match merged.last_mut() {
                    Some(last) if last.location == at.location => last.weight = last.weight + at.weight,
                    _ => merged.push(at),
                }
            }
            Ok(MeasureSpec::Atomic(AtomicMeasure::normalized(merged)?))
        }
        (Some(atoms), None) => dilation_mixture(&atoms, nu, cells, tol),
        (None, Some(atoms)) => dilation_mixture(&atoms, mu, cells, tol),
        (None, None) => {
            let (a0, a1) = mu.log_range(tol.tol_tail);
            let (b0, b1) = nu.log_range(tol.tol_tail);
            let narrow = (a1 - a0).min(b1 - b0);
            if !(narrow > T::zero()) {
                return Err(Error::GridUnderflow("a factor has a degenerate log-support".into()));
            }
            let h = narrow / T::from_usize(cells).unwrap();
            let ma = ((a1 - a0) / h).ceil().to_usize().unwrap_or(usize::MAX).max(1);
            let mb = ((b1 - b0) / h).ceil().to_usize().unwrap_or(usize::MAX).max(1);
            if ma.saturating_add(mb) > MAX_CONVOLUTION_CELLS {
                return Err(Error::GridUnderflow(format!(
                    "log-supports of widths {:e} and {:e} need {} cells at step {:e}",
                    a1 - a0,
                    b1 - b0,
                    ma.saturating_add(mb),
                    h
                )));
            }
            let pa = log_cell_masses(mu, a0, h, ma);
            let pb = log_cell_masses(nu, b0, h, mb);
            let len = ma + mb - 1;
            let conv: Vec<T> = (0..len)
                .into_par_iter()
                .map(|k| {
                    let i0 = k.saturating_sub(mb - 1);
                    let i1 = k.min(ma - 1);
                    (i0..=i1).map(|i| pa[i] * pb[k - i]).fold(T::zero(), |s, v| s + v)
                })
                .collect();
            // Cell centres of the two grids add up to a0 + b0 + (k + 1) h.
            let x: Vec<T> = (0..len).map(|k| (a0 + b0 + h * T::from_usize(k + 1).unwrap()).exp()).collect();
            let f: Vec<T> = conv.iter().zip(&x).map(|(&p, &xx)| p / (h * xx)).collect();
            Ok(MeasureSpec::Grid(GridDensity::normalized(x, f)?))
        }
    }
}

fn dilation_mixture<T: Real>(
    atoms: &[Atom<T>],
    nu: &MeasureSpec<T>,
    cells: usize,
    tol: &Tolerances<T>,
) -> Result<MeasureSpec<T>> {
    let (lo, hi) = nu.effective_support(tol.tol_tail);
    let amin = atoms.iter().map(|a| a.location).fold(T::infinity(), T::min);
    let amax = atoms.iter().map(|a| a.location).fold(T::zero(), T::max);
    let x = logspace(lo * amin, hi * amax, cells);
    let f = x
        .iter()
        .map(|&v| {
            atoms.iter().try_fold(T::zero(), |s, a| {
                let d = nu.density_at(v / a.location)?;
                Ok(s + if d.is_finite() { a.weight * d / a.location } else { T::zero() })
            })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(MeasureSpec::Grid(GridDensity::normalized(x, f)?))
}

/// `(r/c_B) · d(λ_B ⊛ ν⁻¹)/dx (r)` with `B = aπt`, evaluated as
/// `r ∫ ξ/(1 - 2rξ cos B + r²ξ²) dν(ξ)`.
pub fn lemma41_condition2_lhs<T: Real>(nu: &MeasureSpec<T>, a: T, t: T, r: T, tol: &Tolerances<T>) -> Result<T> {
    let b = a * T::PI() * t;
    if !(b > T::zero() && b < T::PI()) {
        return Err(Error::DomainError(format!("a pi t must lie in (0, pi), got {b}")));
    }
    if !(r > T::zero()) {
        return Err(Error::DomainError(format!("r must be positive, got {r}")));
    }
    let cb = lambda_constant(b);
    let cos_b = b.cos();
    let one = T::one();
    let pole = r.recip();
    let integral: T = nu.integrate(
        |xi: T| cb * xi / (one - lit::<T>(2.0) * r * xi * cos_b + r * r * xi * xi),
        &[pole, pole * (one + b), pole / (one + b)],
        tol,
    )?;
    Ok(r / cb * integral)
}

/// Solutions of `lemma41_condition2_lhs(r) = aπ/sin(aπt)`.
pub fn count_condition2_solutions<T: Real>(
    nu: &MeasureSpec<T>,
    a: T,
    t: T,
    window: (T, T),
    n: usize,
    tol: &Tolerances<T>,
) -> Result<SolutionCount<T>> {
    let b = a * T::PI() * t;
    let level = a * T::PI() / b.sin();
    count_solutions(
        |r| lemma41_condition2_lhs(nu, a, t, r, tol).map(|v| v - level),
        window,
        n,
        tol.tol_root * level,
    )
}

/// Which counterexample to build.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CounterexampleRule<T> {
    /// `w_n = 945/(π⁶ n⁶)`, `a_n = n⁻⁴`.
    Example48,
    /// Raw weights and strictly decreasing locations.
    Explicit { weights: Vec<T>, locations: Vec<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleSpec<T> {
    pub rule: CounterexampleRule<T>,
    pub n: usize,
    /// `w_n` before renormalisation.
    pub raw_weights: Vec<T>,
    /// `a_n`, decreasing in `n`.
    pub locations: Vec<T>,
    /// `Σ_{n ≤ N} w_n`; the remainder was folded into the renormalisation.
    pub truncated_mass: T,
    /// `Σ_{n ≤ N} w_n / a_n` with raw weights.
    pub partial_sum_w_over_a: T,
    /// Value of the full series `Σ w_n / a_n` when known in closed form.
    pub full_series: Option<T>,
    /// `a_k a_{k+1}(a_k + a_{k+1})/(a_k - a_{k+1})²`, `k = 1..N-1`.
    pub ratios: Vec<T>,
    /// `b_k = (1/a_{k+1} + 1/a_k)/2`, `k = 1..N-1`.
    pub midpoints: Vec<T>,
    pub locations_decreasing: bool,
    pub ratios_decreasing: bool,
}

/// The truncated atomic measure `Σ_{n ≤ N} w_n δ_{a_n}` (renormalised) and
/// the quantities entering the disconnected-support argument.
pub fn build_counterexample<T: Real>(
    n: usize,
    rule: CounterexampleRule<T>,
) -> Result<(MeasureSpec<T>, CounterexampleSpec<T>)> {
    let (raw_weights, locations, full_series) = match &rule {
        CounterexampleRule::Example48 => {
            if n < 3 {
                return Err(Error::DomainError(format!("need N >= 3, got {n}")));
            }
            let c = lit::<T>(945.0) / T::PI().powi(6);
            let w: Vec<T> = (1..=n).map(|k| c / T::from_usize(k).unwrap().powi(6)).collect();
            let a: Vec<T> = (1..=n).map(|k| T::from_usize(k).unwrap().powi(4).recip()).collect();
            (w, a, Some(lit::<T>(315.0) / (lit::<T>(2.0) * T::PI().powi(4))))
        }
        CounterexampleRule::Explicit { weights, locations } => {
            if weights.len() != locations.len() {
                return Err(Error::DomainError("weights and locations differ in length".into()));
            }
            let m = n.min(weights.len());
            if m < 3 {
                return Err(Error::DomainError(format!("need at least 3 atoms, got {m}")));
            }
            if weights[..m].iter().chain(&locations[..m]).any(|v| !(*v > T::zero() && v.is_finite())) {
                return Err(Error::InvariantViolation("weights and locations must be positive".into()));
            }
            (weights[..m].to_vec(), locations[..m].to_vec(), None)
        }
    };
    let n = raw_weights.len();
    let locations_decreasing = locations.windows(2).all(|w| w[1] < w[0]);
    if !locations_decreasing {
        return Err(Error::HypothesisViolated("locations a_n must be strictly decreasing".into()));
    }
    let truncated_mass = raw_weights.iter().copied().fold(T::zero(), |s, v| s + v);
    let partial_sum_w_over_a = raw_weights.iter().zip(&locations).fold(T::zero(), |s, (&w, &a)| s + w / a);
    let ratios: Vec<T> = locations
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            a * b * (a + b) / ((a - b) * (a - b))
        })
        .collect();
    let midpoints: Vec<T> = locations.windows(2).map(|w| (w[1].recip() + w[0].recip()) * lit(0.5)).collect();
    let ratios_decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let mut atoms: Vec<Atom<T>> = raw_weights
        .iter()
        .zip(&locations)
        .map(|(&w, &a)| Atom { weight: w / truncated_mass, location: a })
        .collect();
    atoms.reverse();
    let measure = MeasureSpec::Atomic(AtomicMeasure::normalized(atoms)?);
    let spec = CounterexampleSpec {
        rule,
        n,
        raw_weights,
        locations,
        truncated_mass,
        partial_sum_w_over_a,
        full_series,
        ratios,
        midpoints,
        locations_decreasing,
        ratios_decreasing,
    };
    Ok((measure, spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapCertificate<T> {
    /// 1-based index, atoms ordered by decreasing location.
    pub k: usize,
    pub b_k: T,
    pub f_at_bk: T,
    pub level: T,
    /// `f(b_k) < 1/t`: `b_k` lies outside `V` between `1/a_k` and `1/a_{k+1}`.
    pub below: bool,
}

/// Evaluates `f(b_k)` for the atoms of `ν` ordered by decreasing location.
pub fn gap_certificate<T: Real>(nu: &MeasureSpec<T>, t: T, k: usize, tol: &Tolerances<T>) -> Result<GapCertificate<T>> {
    let atoms = nu.point_masses().ok_or_else(|| Error::DomainError("gap certificates need an atomic measure".into()))?;
    let m = atoms.len();
    if k == 0 || k + 1 > m {
        return Err(Error::IndexOutOfRange { index: k, max: m.saturating_sub(1) });
    }
    if !(t > T::zero()) {
        return Err(Error::DomainError(format!("t must be positive, got {t}")));
    }
    // decreasing order: a_k = atoms[m - k]
    let a_k = atoms[m - k].location;
    let a_next = atoms[m - k - 1].location;
    let b_k = (a_next.recip() + a_k.recip()) * lit(0.5);
    let f = nu.f_blowup(b_k, tol);
    let level = t.recip();
    Ok(GapCertificate { k, b_k, f_at_bk: f, level, below: f < level })
}

/// The first `k` with a certificate, if any.
pub fn first_gap_certificate<T: Real>(nu: &MeasureSpec<T>, t: T, tol: &Tolerances<T>) -> Result<Option<GapCertificate<T>>> {
    let m = nu.point_masses().map(|a| a.len()).unwrap_or(0);
    for k in 1..m {
        let c = gap_certificate(nu, t, k, tol)?;
        if c.below {
            return Ok(Some(c));
        }
    }
    Ok(None)
}
