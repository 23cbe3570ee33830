//! Density of `σ_t ⊠ ν` through the angle function `u_t`, the set `V`, and
//! the homeomorphism `Λ`:
//!
//! `x q_t(x) = u_t(Λ⁻¹(1/x)) / (π t)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{interp, trapezoid, Family, LogDensity, MeasureSpec};
use crate::quad::{self, QuadOptions};
use crate::roots::{brent, golden_min, RootOptions};
use crate::scalar::{lit, Real};
use crate::tolerances::Tolerances;

/// Smallest angle tried when bracketing `u_t` from below.
const THETA_MIN: f64 = 1e-14;
/// Breakpoints (in units of `θ`) around the peak of the Poisson kernel.
const PEAK_OFFSETS: [f64; 3] = [1.0, 10.0, 100.0];
/// Samples per component in the pass that trims negligible tails.
const COARSE_POINTS: usize = 128;
/// Tails where `u_t` stays below this fraction of its maximum are not refined.
const TRIM_LEVEL: f64 = 1e-12;

/// An immutable `(ν, t)` pair with the tolerances used by every solver.
#[derive(Debug, Clone)]
pub struct ZhongContext<T: Real> {
    nu: MeasureSpec<T>,
    t: T,
    tol: Tolerances<T>,
    /// Charged intervals of `ν`, clipped to its effective support.
    charged: Vec<(T, T)>,
    effective: (T, T),
}

/// Disjoint closed intervals in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportSet<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Real> SupportSet<T> {
    pub fn new(intervals: Vec<(T, T)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo > T::zero() && lo <= hi && hi.is_finite()) {
                return Err(Error::InvariantViolation(format!("bad support interval [{lo:e}, {hi:e}]")));
            }
        }
        for w in intervals.windows(2) {
            if !(w[0].1 < w[1].0) {
                return Err(Error::InvariantViolation("support intervals must be disjoint and ordered".into()));
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: T) -> bool {
        self.intervals.iter().any(|&(lo, hi)| x >= lo && x <= hi)
    }
}

/// One maximal interval of `V` in `r`-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VComponent<T> {
    pub lo: T,
    pub hi: T,
    /// The lower end is the search window edge rather than a boundary of `V`.
    pub clipped_lo: bool,
    pub clipped_hi: bool,
}

/// Sampling request for [`ZhongContext::density_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec<T> {
    pub points: usize,
    /// Search window in `r`; defaults to [`ZhongContext::default_window`].
    pub window: Option<(T, T)>,
}

impl<T> Default for GridSpec<T> {
    fn default() -> Self {
        Self { points: 2048, window: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveMetadata<T> {
    pub t: T,
    pub measure: MeasureSpec<T>,
    pub tolerances: Tolerances<T>,
    pub grid: GridSpec<T>,
    pub window: (T, T),
    pub v_components: Vec<VComponent<T>>,
    /// Gaps in `x` (as `(hi_i, lo_{i+1})`) closed because they fell below
    /// grid resolution.
    pub merged_gaps: Vec<(T, T)>,
    /// `Λ` was observed strictly increasing on every sampled component.
    pub lambda_monotone: bool,
    /// Samples where `u_t` lay below the smallest resolvable angle.
    pub underresolved: usize,
    pub empty_v_set: bool,
}

/// Samples of `q_t` with the support it was computed on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve<T> {
    x: Vec<T>,
    q: Vec<T>,
    support: SupportSet<T>,
    metadata: CurveMetadata<T>,
}

impl<T: Real> DensityCurve<T> {
    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn support(&self) -> &SupportSet<T> {
        &self.support
    }

    pub fn metadata(&self) -> &CurveMetadata<T> {
        &self.metadata
    }

    /// `x_j q_j`, the density of `ln X` evaluated at `ln x_j`.
    pub fn xq(&self) -> Vec<T> {
        self.x.iter().zip(&self.q).map(|(&x, &q)| x * q).collect()
    }

    /// `∫ q dx`, as the trapezoid rule for `∫ x q d(ln x)`; curves spread
    /// over many decades are far better resolved in `ln x`.
    pub fn integral(&self) -> T {
        let y: Vec<T> = self.x.iter().map(|x| x.ln()).collect();
        trapezoid(&y, &self.xq())
    }

    /// `∫ x q dx`, by the trapezoid rule in `ln x`.
    pub fn mean(&self) -> T {
        let y: Vec<T> = self.x.iter().map(|x| x.ln()).collect();
        let w: Vec<T> = self.x.iter().zip(&self.q).map(|(&x, &q)| x * x * q).collect();
        trapezoid(&y, &w)
    }

    /// Linear interpolation of `q`; zero off the sampled range.
    pub fn value_at(&self, x: T) -> T {
        interp(&self.x, &self.q, x).unwrap_or(T::zero())
    }

    /// The curve as a density of `ln X`.
    pub fn log_pushforward(&self) -> LogDensity<T> {
        LogDensity { y: self.x.iter().map(|x| x.ln()).collect(), g: self.xq() }
    }
}

struct USolution<T> {
    theta: T,
    underresolved: bool,
}

impl<T: Real> ZhongContext<T> {
    pub fn new(nu: MeasureSpec<T>, t: T, tol: Tolerances<T>) -> Result<Self> {
        if !(t > T::zero() && t.is_finite()) {
            return Err(Error::InvariantViolation(format!("t must be a positive finite time, got {t}")));
        }
        let positive = [tol.tol_mass, tol.tol_quad, tol.tol_tail, tol.tol_root, tol.tol_int, tol.hysteresis];
        if positive.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::InvariantViolation("tolerances must be positive".into()));
        }
        nu.validate(tol.tol_mass)?;
        let effective = nu.effective_support(tol.tol_tail);
        let atomic = nu.point_masses().is_some();
        let charged = nu
            .charged_intervals()
            .into_iter()
            .filter_map(|(lo, hi)| {
                if atomic {
                    return Some((lo, hi));
                }
                let (lo, hi) = (lo.max(effective.0), hi.min(effective.1));
                (lo <= hi && lo > T::zero()).then_some((lo, hi))
            })
            .collect();
        Ok(Self { nu, t, tol, charged, effective })
    }

    pub fn nu(&self) -> &MeasureSpec<T> {
        &self.nu
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn tolerances(&self) -> &Tolerances<T> {
        &self.tol
    }

    /// `[1e-4 / ess sup, 1e4 / ess inf]` of the tail-truncated support.
    pub fn default_window(&self) -> (T, T) {
        (lit::<T>(1e-4) / self.effective.1, lit::<T>(1e4) / self.effective.0)
    }

    /// `f(r) = ∫ rξ/(1 - rξ)² dν(ξ)`. For closed forms with unbounded
    /// support the measure is read as truncated to its effective support, the
    /// same truncation used for every other integral.
    pub fn blowup(&self, r: T) -> T {
        if let MeasureSpec::Named(fam) = &self.nu {
            let (lo, hi) = fam.support();
            let pole = r.recip();
            let beyond = (lo == T::zero() && pole < self.effective.0) || (hi.is_infinite() && pole > self.effective.1);
            if beyond && !matches!(fam, Family::Dirac { .. }) {
                let one = T::one();
                let v = self.nu.integrate(
                    |x: T| {
                        let d = one - r * x;
                        r * x / (d * d)
                    },
                    &[pole],
                    &self.tol,
                );
                return match v {
                    Ok(v) if v.is_finite() => v,
                    _ => T::infinity(),
                };
            }
        }
        self.nu.f_blowup(r, &self.tol)
    }

    /// `ξ ρ(ξ)`, the density of `ln ξ`, zero off the (effective) support.
    fn log_density(&self, x: T) -> T {
        if x < self.effective.0 || x > self.effective.1 {
            return T::zero();
        }
        match self.nu.density_at(x) {
            Ok(d) if d.is_finite() => d * x,
            _ => T::zero(),
        }
    }

    /// Symmetrised integral in the offset `v = ln(rξ)` for measures with a
    /// density: `∫_0^U w(v) k(v) dv` with `w(v) = g(ξ₀e^v) ± g(ξ₀e^{-v})`,
    /// `ξ₀ = 1/r`. Working in `v` keeps full relative precision where the
    /// kernel peaks (`v ≈ 0`), however small `θ` gets.
    fn offset_integral(&self, r: T, theta: T, odd: bool, g0: T, scale: T, kernel: impl Fn(T) -> T) -> Result<T> {
        let x0 = r.recip();
        let y0 = x0.ln();
        let (ylo, yhi) = (self.effective.0.ln(), self.effective.1.ln());
        let big_u = (y0 - ylo).max(yhi - y0);
        if !(big_u > T::zero()) {
            return Ok(T::zero());
        }
        let mut breaks: Vec<T> = Vec::new();
        for k in PEAK_OFFSETS {
            breaks.push(theta * lit(k));
        }
        breaks.push((y0 - ylo).abs());
        breaks.push((yhi - y0).abs());
        for (lo, hi) in &self.charged {
            breaks.push((lo.ln() - y0).abs());
            breaks.push((hi.ln() - y0).abs());
        }
        breaks.retain(|&b| b > T::zero() && b < big_u);
        let two: T = lit(2.0);
        let integrand = |v: T| {
            let plus = self.log_density(x0 * v.exp());
            let minus = self.log_density(x0 * (-v).exp());
            let w = if odd { plus - minus } else { plus + minus - two * g0 };
            if w == T::zero() {
                T::zero()
            } else {
                w * kernel(v)
            }
        };
        let mut opts = QuadOptions::new(self.tol.tol_quad, self.tol.max_quad_depth);
        opts.abs_tol = self.tol.tol_quad * scale.abs().max(T::min_positive_value());
        quad::integrate(integrand, T::zero(), big_u, &breaks, &opts)
    }

    /// `Φ_r(θ) = (sin θ/θ) ∫ rξ/(1 + r²ξ² - 2rξ cos θ) dν(ξ)`.
    pub fn theta_equation_lhs(&self, r: T, theta: T) -> Result<T> {
        if !(r > T::zero()) || !(theta > T::zero() && theta < T::PI()) {
            return Err(Error::DomainError(format!("need r > 0 and theta in (0, pi), got r={r}, theta={theta}")));
        }
        let one = T::one();
        let s2 = lit::<T>(4.0) * (theta * lit(0.5)).sin().powi(2);
        let sinc = theta.sin() / theta;
        if self.nu.point_masses().is_some() {
            let integral: T = self.nu.integrate(
                |x: T| {
                    let rx = r * x;
                    let d = one - rx;
                    rx / (d * d + rx * s2)
                },
                &[],
                &self.tol,
            )?;
            return Ok(sinc * integral);
        }
        // In v = ln(rξ) the kernel is 1/(4 sinh²(v/2) + 4 sin²(θ/2)), whose
        // integral over (0, U) is (atan((e^U - cos θ)/sin θ) - θ/2)/sin θ.
        let g0 = self.log_density(r.recip());
        let x0 = r.recip();
        let big_u = (x0.ln() - self.effective.0.ln()).max(self.effective.1.ln() - x0.ln()).max(T::zero());
        let (sn, cs) = theta.sin_cos();
        let head = if g0 == T::zero() {
            T::zero()
        } else {
            g0 * lit::<T>(2.0) * (((big_u.exp() - cs) / sn).atan() - theta * lit(0.5)) / sn
        };
        let rest = self.offset_integral(r, theta, false, g0, head, |v: T| {
            one / (lit::<T>(4.0) * (v * lit(0.5)).sinh().powi(2) + s2)
        })?;
        Ok(sinc * (head + rest))
    }

    fn solve_u(&self, r: T) -> Result<USolution<T>> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::DomainError(format!("u_t needs r > 0, got {r}")));
        }
        let target = self.t.recip();
        if !(self.blowup(r) > target) {
            return Ok(USolution { theta: T::zero(), underresolved: false });
        }
        let g = |th: T| self.theta_equation_lhs(r, th).map(|v| v - target);
        let theta_min: T = lit(THETA_MIN);
        let pi = T::PI();
        let mut hi = pi - theta_min;
        let mut g_hi = g(hi)?;
        if g_hi > T::zero() {
            return Err(Error::BracketFailure { op: "u_t", detail: format!("Phi(pi-) - 1/t = {g_hi:e} > 0 at r={r:e}") });
        }
        // Geometric descent towards 0 for the lower end.
        let mut lo = T::one();
        let mut g_lo = g(lo)?;
        while g_lo <= T::zero() && lo > theta_min {
            hi = lo;
            g_hi = g_lo;
            lo = (lo * lit(0.5)).max(theta_min);
            g_lo = g(lo)?;
        }
        if g_lo <= T::zero() {
            // Fallback scan over the whole range in case Φ is not monotone.
            let n = 1024;
            let mut prev = (theta_min, g_lo);
            let mut found = None;
            for i in 1..=n {
                let th = theta_min + (pi - lit::<T>(2.0) * theta_min) * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
                let v = g(th)?;
                if prev.1 > T::zero() && v <= T::zero() {
                    found = Some((prev, (th, v)));
                    break;
                }
                prev = (th, v);
            }
            match found {
                Some(((a, ga), (b, gb))) => {
                    lo = a;
                    g_lo = ga;
                    hi = b;
                    g_hi = gb;
                }
                None if self.nu.has_density() => {
                    // The root is below THETA_MIN: the density of ν at 1/r is
                    // too small to register at this resolution.
                    return Ok(USolution { theta: T::zero(), underresolved: true });
                }
                None => {
                    return Err(Error::BracketFailure {
                        op: "u_t",
                        detail: format!("no sign change of Phi - 1/t at r={r:e} although f(r) > 1/t"),
                    })
                }
            }
        }
        let opts = RootOptions { f_tol: self.tol.tol_root * target, x_tol: T::zero(), max_iter: 200 };
        let theta = brent(g, lo, hi, g_lo, g_hi, &opts, "u_t")?;
        Ok(USolution { theta, underresolved: false })
    }

    /// The angle `u_t(r) ∈ [0, π)`; zero outside `V`.
    pub fn u_t(&self, r: T) -> Result<T> {
        self.solve_u(r).map(|s| s.theta)
    }

    fn lambda_with_u(&self, r: T, u: T) -> Result<T> {
        let one = T::one();
        let s2 = lit::<T>(4.0) * (u * lit(0.5)).sin().powi(2);
        let integral: T = if self.nu.point_masses().is_some() {
            self.nu.integrate(
                |x: T| {
                    let rx = r * x;
                    let d = one - rx;
                    let den = d * d + rx * s2;
                    if den == T::zero() {
                        T::zero()
                    } else {
                        (rx * rx - one) / den
                    }
                },
                &[],
                &self.tol,
            )?
        } else {
            // (r²ξ² - 1)/|1 - rξe^{iu}|² = 2 sinh v/(4 sinh²(v/2) + 4 sin²(u/2)), odd in v.
            self.offset_integral(r, u, true, self.log_density(r.recip()), one, |v: T| {
                lit::<T>(2.0) * v.sinh() / (lit::<T>(4.0) * (v * lit(0.5)).sinh().powi(2) + s2)
            })?
        };
        let v = r * (self.t * lit(0.5) * integral).exp();
        if !v.is_finite() {
            return Err(Error::DomainError(format!("Lambda({r:e}) is not finite")));
        }
        Ok(v)
    }

    /// `Λ(r) = r exp((t/2) ∫ (r²ξ² - 1)/|1 - rξ e^{i u_t(r)}|² dν(ξ))`.
    pub fn lambda_map(&self, r: T) -> Result<T> {
        let u = self.u_t(r)?;
        self.lambda_with_u(r, u)
    }

    /// `Λ⁻¹(y)`: geometric bracket expansion from `r = y`, then Brent in `ln r`.
    pub fn lambda_inverse(&self, y: T) -> Result<T> {
        if !(y > T::zero()) || !y.is_finite() {
            return Err(Error::DomainError(format!("Lambda inverse needs y > 0, got {y}")));
        }
        let ly = y.ln();
        let h = |s: T| self.lambda_map(s.exp()).map(|v| v.ln() - ly);
        let two = lit::<T>(2.0).ln();
        let s0 = ly;
        let h0 = h(s0)?;
        if h0 == T::zero() {
            return Ok(y);
        }
        let dir = if h0 < T::zero() { T::one() } else { -T::one() };
        let (mut a, mut ha) = (s0, h0);
        let mut bracket = None;
        for _ in 0..self.tol.max_bracket_expansions {
            let b = a + dir * two;
            let hb = h(b)?;
            if hb.signum() != ha.signum() || hb == T::zero() {
                bracket = Some(if dir > T::zero() { (a, ha, b, hb) } else { (b, hb, a, ha) });
                break;
            }
            a = b;
            ha = hb;
        }
        let (lo, hlo, hi, hhi) = bracket.ok_or_else(|| Error::BracketFailure {
            op: "lambda_inverse",
            detail: format!("no bracket for y={y:e} after {} doublings", self.tol.max_bracket_expansions),
        })?;
        let opts = RootOptions { f_tol: self.tol.tol_root * lit(0.5), x_tol: T::zero(), max_iter: 300 };
        brent(h, lo, hi, hlo, hhi, &opts, "lambda_inverse").map(T::exp)
    }

    /// `q_t(x) = u_t(Λ⁻¹(1/x)) / (π t x)`.
    pub fn density(&self, x: T) -> Result<T> {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::DomainError(format!("density needs x > 0, got {x}")));
        }
        let r = self.lambda_inverse(x.recip())?;
        let u = self.u_t(r)?;
        if u == T::zero() {
            return Ok(T::zero());
        }
        Ok(u / (T::PI() * self.t * x))
    }

    fn in_v(&self, r: T) -> bool {
        self.blowup(r) > self.t.recip()
    }

    /// Boundary of `V` between `inside` (in `V`) and `outside` by bisection
    /// on the geometric midpoint.
    fn bisect_boundary(&self, mut inside: T, mut outside: T) -> T {
        for _ in 0..self.tol.max_boundary_iterations {
            let (lo, hi) = if inside < outside { (inside, outside) } else { (outside, inside) };
            if hi / lo - T::one() <= self.tol.tol_root {
                break;
            }
            let mid = (lo * hi).sqrt();
            if self.in_v(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    /// Parts of the open gap `(a, b)` lying in `V`. An end flagged `solid`
    /// borders a reciprocal charged interval, where `f` is infinite.
    fn gap_pieces(&self, a: T, b: T, solid_a: bool, solid_b: bool) -> Result<Vec<(T, T)>> {
        let target = self.t.recip();
        // f is convex on the gap, hence unimodal.
        let (m, fm) = golden_min(|r: T| Ok(self.blowup(r)), a, b, 200)?;
        if fm > target {
            return Ok(vec![(a, b)]);
        }
        let mut out = Vec::new();
        if solid_a || self.in_v(a) {
            out.push((a, self.bisect_boundary(a, m)));
        }
        if solid_b || self.in_v(b) {
            out.push((self.bisect_boundary(b, m), b));
        }
        Ok(out)
    }

    /// Maximal intervals of `V = {r : f(r) > 1/t}` inside `window`.
    pub fn v_set(&self, window: (T, T)) -> Result<Vec<VComponent<T>>> {
        let (wlo, whi) = window;
        if !(wlo > T::zero() && whi > wlo && whi.is_finite()) {
            return Err(Error::DomainError(format!("bad r-window [{wlo:e}, {whi:e}]")));
        }
        let mut solids: Vec<(T, T)> = self
            .charged
            .iter()
            .map(|&(lo, hi)| (hi.recip(), lo.recip()))
            .filter(|&(lo, hi)| hi >= wlo && lo <= whi)
            .map(|(lo, hi)| (lo.max(wlo), hi.min(whi)))
            .collect();
        solids.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        let mut pieces: Vec<(T, T)> = Vec::new();
        let mut cursor = (wlo, false);
        for &(slo, shi) in &solids {
            if slo > cursor.0 {
                pieces.extend(self.gap_pieces(cursor.0, slo, cursor.1, true)?);
            }
            pieces.push((slo, shi));
            cursor = (shi, true);
        }
        if cursor.0 < whi {
            pieces.extend(self.gap_pieces(cursor.0, whi, cursor.1, false)?);
        }
        pieces.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        let mut merged: Vec<(T, T)> = Vec::new();
        for (lo, hi) in pieces {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        if merged.is_empty() {
            return Err(Error::EmptyVSet);
        }
        let edge = |a: T, b: T| (a / b - T::one()).abs() <= self.tol.tol_root;
        Ok(merged
            .into_iter()
            .map(|(lo, hi)| VComponent {
                lo,
                hi,
                clipped_lo: edge(lo, wlo) && self.in_v(wlo),
                clipped_hi: edge(hi, whi) && self.in_v(whi),
            })
            .collect())
    }

    /// Samples `q_t` on every support component. The curve is parametrised
    /// by `r ∈ V`, each sample being `(1/Λ(r), u_t(r)Λ(r)/(π t))`, with
    /// points clustered towards the edges of `V`.
    pub fn density_curve(&self, spec: &GridSpec<T>) -> Result<DensityCurve<T>> {
        if spec.points < 64 {
            return Err(Error::DomainError(format!("density curves need at least 64 points, got {}", spec.points)));
        }
        let window = spec.window.unwrap_or_else(|| self.default_window());
        let mut meta = CurveMetadata {
            t: self.t,
            measure: self.nu.clone(),
            tolerances: self.tol,
            grid: *spec,
            window,
            v_components: Vec::new(),
            merged_gaps: Vec::new(),
            lambda_monotone: true,
            underresolved: 0,
            empty_v_set: false,
        };
        let comps = match self.v_set(window) {
            Ok(c) => c,
            Err(Error::EmptyVSet) => {
                meta.empty_v_set = true;
                let x = crate::scalar::logspace(window.1.recip(), window.0.recip(), spec.points);
                let q = vec![T::zero(); x.len()];
                return Ok(DensityCurve { x, q, support: SupportSet::empty(), metadata: meta });
            }
            Err(e) => return Err(e),
        };
        meta.v_components = comps.clone();

        // Coarse pass: locate where x q is above resolution so that the fine
        // samples are not spent on negligible tails.
        let coarse: Vec<Vec<(T, bool)>> = comps.iter().map(|c| cluster(c, COARSE_POINTS)).collect();
        let coarse_u: Vec<Vec<T>> = coarse
            .iter()
            .map(|pts| {
                pts.par_iter()
                    .map(|&(r, edge)| if edge { Ok(T::zero()) } else { self.solve_u(r).map(|s| s.theta) })
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<_>>()?;
        let u_max = coarse_u.iter().flatten().fold(T::zero(), |a, &b| a.max(b));
        let floor = u_max * lit(TRIM_LEVEL);
        let mut fine_comps = Vec::new();
        for ((c, pts), us) in comps.iter().zip(&coarse).zip(&coarse_u) {
            let first = us.iter().position(|&u| u > floor);
            let last = us.iter().rposition(|&u| u > floor);
            let (i0, i1) = match (first, last) {
                (Some(a), Some(b)) => (a.saturating_sub(1), (b + 1).min(us.len() - 1)),
                // Nothing resolvable: keep the component so its support is still sampled.
                _ => (0, us.len() - 1),
            };
            fine_comps.push(VComponent {
                lo: pts[i0].0,
                hi: pts[i1].0,
                clipped_lo: c.clipped_lo || i0 > 0,
                clipped_hi: c.clipped_hi || i1 < us.len() - 1,
            });
        }

        let total_log: T = fine_comps.iter().map(|c| (c.hi / c.lo).ln()).fold(T::zero(), |a, b| a + b);
        let mut samples: Vec<(T, bool)> = Vec::new();
        let mut ranges = Vec::new();
        for c in &fine_comps {
            let share = if total_log > T::zero() {
                ((c.hi / c.lo).ln() / total_log * T::from_usize(spec.points).unwrap()).to_usize().unwrap_or(0)
            } else {
                0
            };
            let n = share.max(64);
            let start = samples.len();
            samples.extend(cluster(c, n));
            ranges.push(start..samples.len());
        }

        let solved: Vec<Result<(T, T, bool)>> = samples
            .par_iter()
            .map(|&(r, edge)| {
                if edge {
                    let lam = self.lambda_with_u(r, T::zero())?;
                    return Ok((lam.recip(), T::zero(), false));
                }
                let s = self.solve_u(r)?;
                let lam = self.lambda_with_u(r, s.theta)?;
                let x = lam.recip();
                Ok((x, s.theta / (T::PI() * self.t * x), s.underresolved))
            })
            .collect();
        let solved = solved.into_iter().collect::<Result<Vec<_>>>()?;

        for range in &ranges {
            let part = &solved[range.clone()];
            if part.windows(2).any(|w| !(w[1].0 < w[0].0)) {
                meta.lambda_monotone = false;
            }
        }
        // Support: images of the untrimmed components.
        let mut support = Vec::new();
        for c in &comps {
            let a = self.lambda_with_u(c.hi, if c.clipped_hi { self.u_t(c.hi)? } else { T::zero() })?.recip();
            let b = self.lambda_with_u(c.lo, if c.clipped_lo { self.u_t(c.lo)? } else { T::zero() })?.recip();
            support.push((a.min(b), a.max(b)));
        }

        meta.underresolved = solved.iter().filter(|s| s.2).count();
        let mut pts: Vec<(T, T)> = solved.iter().map(|s| (s.0, s.1)).collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pts.dedup_by(|a, b| a.0 == b.0);

        support.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let resolution = self.tol.tol_root * lit(100.0);
        let mut merged: Vec<(T, T)> = Vec::new();
        for (lo, hi) in support {
            match merged.last_mut() {
                Some(last) if (lo / last.1).ln() <= resolution => {
                    if lo > last.1 {
                        meta.merged_gaps.push((last.1, lo));
                    }
                    last.1 = last.1.max(hi);
                }
                _ => merged.push((lo, hi)),
            }
        }
        let (x, q) = pts.into_iter().unzip();
        Ok(DensityCurve { x, q, support: SupportSet::new(merged)?, metadata: meta })
    }
}

/// `n` points in `[lo, hi]`, uniform in a Chebyshev-type variable of `ln r`
/// so that they cluster at genuine boundaries of `V`. The flag marks points
/// that are such boundaries, where `u_t = 0`.
fn cluster<T: Real>(c: &VComponent<T>, n: usize) -> Vec<(T, bool)> {
    let (a, b) = (c.lo.ln(), c.hi.ln());
    let half_pi = T::FRAC_PI_2();
    let last = T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| {
            let s = T::from_usize(i).unwrap() / last;
            let w = match (c.clipped_lo, c.clipped_hi) {
                (false, false) => (T::one() - (T::PI() * s).cos()) * lit(0.5),
                (true, false) => (half_pi * s).sin(),
                (false, true) => T::one() - (half_pi * s).cos(),
                (true, true) => s,
            };
            let r = if i == 0 {
                c.lo
            } else if i == n - 1 {
                c.hi
            } else {
                (a + (b - a) * w).exp()
            };
            let edge = (i == 0 && !c.clipped_lo) || (i == n - 1 && !c.clipped_hi);
            (r, edge)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(nu: MeasureSpec<f64>, t: f64) -> ZhongContext<f64> {
        ZhongContext::new(nu, t, Tolerances::default()).unwrap()
    }

    fn dirac(c: f64) -> MeasureSpec<f64> {
        MeasureSpec::named(Family::Dirac { c }).unwrap()
    }

    /// Plain bisection on `sin θ/(θ·4 sin²(θ/2)) = 1/t`.
    fn dirac_one_u_oracle(t: f64) -> f64 {
        let g = |th: f64| th.sin() / (th * 4.0 * (th / 2.0).sin().powi(2)) - 1.0 / t;
        let (mut a, mut b) = (1e-6, std::f64::consts::PI - 1e-9);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(m) > 0.0 {
                a = m
            } else {
                b = m
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn phi_for_point_mass() {
        let c = ctx(dirac(1.0), 1.0);
        for th in [0.1, 1.0, 2.5] {
            let v = c.theta_equation_lhs(1.0, th).unwrap();
            let expect = th.sin() / (4.0 * th * (th / 2.0).sin().powi(2));
            assert!((v - expect).abs() <= 1e-14 * expect);
        }
        let small = c.theta_equation_lhs(1.0, 1e-4).unwrap();
        assert!((small * 1e-8 - 1.0).abs() < 1e-6);
        assert!(c.theta_equation_lhs(1.0, std::f64::consts::PI - 1e-12).unwrap() < 1e-11);
        assert!(c.theta_equation_lhs(1.0, 0.0).is_err());
    }

    #[test]
    fn phi_is_decreasing_in_theta() {
        let nus = [
            dirac(1.0),
            MeasureSpec::named(Family::UniformInterval { alpha: 1.0, beta: 2.0 }).unwrap(),
            MeasureSpec::named(Family::Gamma { p: 2.0, theta: 1.0 }).unwrap(),
            MeasureSpec::atomic(&[(0.3, 0.5), (0.7, 3.0)], 1e-12).unwrap(),
        ];
        let mut pairs = 0;
        for nu in nus {
            let c = ctx(nu, 1.0);
            for r in [0.2, 0.6, 1.0, 2.5, 7.0] {
                let thetas = crate::scalar::linspace(0.05, 3.0, 6);
                let vals: Vec<f64> = thetas.iter().map(|&th| c.theta_equation_lhs(r, th).unwrap()).collect();
                for w in vals.windows(2) {
                    assert!(w[1] < w[0], "r={r}: {vals:?}");
                    pairs += 1;
                }
            }
        }
        assert!(pairs >= 100);
    }

    #[test]
    fn u_for_point_mass_at_one() {
        let c = ctx(dirac(1.0), 4.0);
        let u = c.u_t(1.0).unwrap();
        assert!((u - dirac_one_u_oracle(4.0)).abs() < 1e-9);
        assert!((u - 1.721).abs() < 1e-3, "{u}");
        let resid = c.theta_equation_lhs(1.0, u).unwrap() - 0.25;
        assert!(resid.abs() <= 1e-10 * 0.25);
    }

    #[test]
    fn u_vanishes_outside_v() {
        // f(0.5) = 2 < 10
        let c = ctx(dirac(1.0), 0.1);
        assert_eq!(c.u_t(0.5).unwrap(), 0.0);
        let atoms = MeasureSpec::atomic(&[(0.5, 1.0), (0.5, 4.0)], 1e-12).unwrap();
        let c = ctx(atoms, 0.01);
        assert!(c.u_t(0.25).unwrap() > 0.0);
        assert!(c.u_t(1.0).unwrap() > 0.0);
    }

    #[test]
    fn v_set_for_point_mass() {
        let c = ctx(dirac(1.0), 0.1);
        let v = c.v_set(c.default_window()).unwrap();
        assert_eq!(v.len(), 1);
        let s = 41f64.sqrt();
        assert!((v[0].lo - (21.0 - s) / 20.0).abs() < 1e-9);
        assert!((v[0].hi - (21.0 + s) / 20.0).abs() < 1e-9);
        assert!(!v[0].clipped_lo && !v[0].clipped_hi);
    }

    #[test]
    fn v_set_covers_reciprocal_atoms() {
        let atoms = MeasureSpec::atomic(&[(0.5, 1.0), (0.5, 100.0)], 1e-12).unwrap();
        let c = ctx(atoms, 0.5);
        let v = c.v_set(c.default_window()).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v[0].lo < 0.01 && v[0].hi > 0.01);
        assert!(v[1].lo < 1.0 && v[1].hi > 1.0);
        assert!(matches!(c.v_set((2.0, 3.0)), Err(Error::EmptyVSet)));
    }

    #[test]
    fn lambda_examples() {
        let c = ctx(dirac(1.0), 4.0);
        assert!((c.lambda_map(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((c.lambda_inverse(1.0).unwrap() - 1.0).abs() < 1e-9);
        // u = 0 branch: 0.72 lies just below the V boundary (21 - √41)/20.
        let c = ctx(dirac(1.0), 0.1);
        let r = 0.72;
        assert_eq!(c.u_t(r).unwrap(), 0.0);
        let closed = r * (0.05 * (r * r - 1.0) / ((1.0 - r) * (1.0 - r))).exp();
        assert!((c.lambda_map(r).unwrap() - closed).abs() < 1e-14);
        assert!((c.lambda_inverse(closed).unwrap() - r).abs() < 1e-9);
    }

    #[test]
    fn lambda_dilation() {
        let (t, cc) = (1.3, 2.5);
        let one = ctx(dirac(1.0), t);
        let dil = ctx(dirac(cc), t);
        for r in [0.1, 0.3, 0.5, 0.9] {
            let a = dil.lambda_map(r).unwrap();
            let b = one.lambda_map(cc * r).unwrap() / cc;
            assert!((a - b).abs() <= 1e-9 * b, "{r}: {a} vs {b}");
        }
    }

    #[test]
    fn lambda_round_trip_uniform() {
        let nu = MeasureSpec::named(Family::UniformInterval { alpha: 1.0, beta: 2.0 }).unwrap();
        let c = ctx(nu, 1.0);
        let mut prev = 0.0;
        for y in crate::scalar::logspace(0.1, 10.0, 200) {
            let r = c.lambda_inverse(y).unwrap();
            let back = c.lambda_map(r).unwrap();
            assert!((back - y).abs() / y <= 1e-8, "{y}: {back}");
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn density_examples() {
        let c = ctx(dirac(1.0), 4.0);
        let q = c.density(1.0).unwrap();
        assert!((q - dirac_one_u_oracle(4.0) / (4.0 * std::f64::consts::PI)).abs() < 1e-9);
        assert!((q - 0.1370).abs() < 1e-4);
        let c = ctx(dirac(1.0), 0.1);
        assert_eq!(c.density(100.0).unwrap(), 0.0);
    }

    #[test]
    fn density_dilation() {
        let t = 0.8;
        let one = ctx(dirac(1.0), t);
        for cc in [0.5, 3.0] {
            let dil = ctx(dirac(cc), t);
            for x in [0.4, 0.8, 1.0, 1.7] {
                let a = dil.density(x * cc).unwrap();
                let b = one.density(x).unwrap() / cc;
                assert!((a - b).abs() <= 1e-6, "c={cc}, x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn curve_for_point_mass() {
        for t in [0.25, 1.0, 4.0] {
            let c = ctx(dirac(1.0), t);
            let curve = c.density_curve(&GridSpec::default()).unwrap();
            assert_eq!(curve.support().len(), 1);
            assert!(curve.support().contains(1.0));
            assert!((curve.integral() - 1.0).abs() < 1e-4, "t={t}: {}", curve.integral());
            assert!((curve.mean() / (t / 2.0).exp() - 1.0).abs() < 1e-3, "t={t}: {}", curve.mean());
            assert!(curve.log_pushforward().evenness_defect() < 1e-3);
            assert!(curve.metadata().lambda_monotone);
        }
    }

    #[test]
    fn curve_against_pointwise_density() {
        let c = ctx(dirac(1.0), 1.0);
        let curve = c.density_curve(&GridSpec { points: 256, window: None }).unwrap();
        for j in (5..curve.x().len() - 5).step_by(37) {
            let q = c.density(curve.x()[j]).unwrap();
            assert!((q - curve.q()[j]).abs() <= 1e-7 * (1.0 + q));
        }
    }

    #[test]
    fn curve_dilation() {
        let t = 1.0;
        let base = ctx(dirac(1.0), t).density_curve(&GridSpec::default()).unwrap();
        for cc in [0.5, 2.0, 3.0] {
            let curve = ctx(dirac(cc), t).density_curve(&GridSpec::default()).unwrap();
            assert_eq!(curve.x().len(), base.x().len());
            for j in 0..base.x().len() {
                assert!((curve.x()[j] / (cc * base.x()[j]) - 1.0).abs() < 1e-9, "c={cc} j={j} {} {}", curve.x()[j], cc * base.x()[j]);
                assert!((curve.q()[j] - base.q()[j] / cc).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn curve_for_uniform() {
        let nu = MeasureSpec::named(Family::UniformInterval { alpha: 1.0, beta: 2.0 }).unwrap();
        let c = ctx(nu, 1.0);
        let curve = c.density_curve(&GridSpec::default()).unwrap();
        assert_eq!(curve.support().len(), 1);
        assert!((curve.integral() - 1.0).abs() < 1e-4);
        assert!((curve.mean() / (1.5 * 0.5f64.exp()) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn curve_inversion_equivariance() {
        let t = 0.7;
        for (nu, inv) in [
            (Family::LogNormal { m: 0.3, s: 0.8 }, Family::LogNormal { m: -0.3, s: 0.8 }),
            (Family::MarchenkoPastur, Family::MarchenkoPasturInverse),
        ] {
            let a = ctx(MeasureSpec::named(nu).unwrap(), t).density_curve(&GridSpec::default()).unwrap();
            let b = ctx(MeasureSpec::named(inv).unwrap(), t).density_curve(&GridSpec::default()).unwrap();
            let mut worst: f64 = 0.0;
            for &x in b.x() {
                let expect = a.value_at(1.0 / x) / (x * x);
                worst = worst.max((b.value_at(x) - expect).abs());
            }
            assert!(worst < 1e-3, "{nu:?}: {worst}");
        }
    }

    #[test]
    fn curve_for_heavy_tailed_symmetric_measure() {
        let c = ctx(MeasureSpec::named(Family::Lambda { b: 1.0 }).unwrap(), 1.0);
        let curve = c.density_curve(&GridSpec::default()).unwrap();
        assert!((curve.integral() - 1.0).abs() < 1e-4);
        assert!(curve.log_pushforward().evenness_defect() < 1e-3);
        assert_eq!(curve.metadata().underresolved, 0);
    }

    #[test]
    fn context_validation() {
        assert!(ZhongContext::new(dirac(1.0), 0.0, Tolerances::default()).is_err());
        let mut tol = Tolerances::default();
        tol.tol_root = 0.0;
        assert!(ZhongContext::new(dirac(1.0), 1.0, tol).is_err());
        let c = ctx(dirac(1.0), 1.0);
        assert!(c.density_curve(&GridSpec { points: 10, window: None }).is_err());
    }

    #[test]
    fn support_set_invariants() {
        assert!(SupportSet::new(vec![(1.0, 2.0), (1.5, 3.0)]).is_err());
        assert!(SupportSet::new(vec![(0.0, 2.0)]).is_err());
        let s = SupportSet::new(vec![(1.0, 2.0), (3.0, 4.0)]).unwrap();
        assert!(s.contains(3.5) && !s.contains(2.5));
    }
}
