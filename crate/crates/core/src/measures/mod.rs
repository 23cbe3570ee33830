//! Probability measures on the positive half-line.
//!
//! A [`MeasureSpec`] is either a finite list of atoms, a sampled density on
//! a positive grid, or one of the closed-form [`Family`] members. All kernel
//! integrals against a measure go through [`MeasureSpec::integrate`]; closed
//! forms are integrated in the variable `y = ln x`, where every family in
//! [`Family`] has exponentially decaying tails.

mod family;

pub use family::{lambda_constant, lambda_density, Family};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions, QuadValue};
use crate::scalar::{linspace, lit, logspace, Real};
use crate::tolerances::Tolerances;

/// One point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom<T> {
    pub weight: T,
    pub location: T,
}

/// Finite atomic measure with strictly increasing locations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicMeasure<T> {
    atoms: Vec<Atom<T>>,
}

impl<T: Real> AtomicMeasure<T> {
    /// Validates positivity, ordering and total mass (within `tol_mass`).
    pub fn new(atoms: Vec<Atom<T>>, tol_mass: T) -> Result<Self> {
        Self::check_shape(&atoms)?;
        let mass: T = atoms.iter().map(|a| a.weight).sum();
        if (mass - T::one()).abs() > tol_mass {
            return Err(Error::InvariantViolation(format!("mass: atom weights sum to {mass}, expected 1")));
        }
        Ok(Self { atoms })
    }

    /// Like [`AtomicMeasure::new`] but rescales the weights to sum to 1.
    pub fn normalized(mut atoms: Vec<Atom<T>>) -> Result<Self> {
        Self::check_shape(&atoms)?;
        let mass: T = atoms.iter().map(|a| a.weight).sum();
        for a in &mut atoms {
            a.weight = a.weight / mass;
        }
        Ok(Self { atoms })
    }

    fn check_shape(atoms: &[Atom<T>]) -> Result<()> {
        if atoms.is_empty() {
            return Err(Error::InvariantViolation("atoms: list is empty".into()));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !(a.weight > T::zero() && a.weight.is_finite()) {
                return Err(Error::InvariantViolation(format!("atoms[{i}].w: weight must be > 0")));
            }
            if !(a.location > T::zero() && a.location.is_finite()) {
                return Err(Error::InvariantViolation(format!("atoms[{i}].a: location must be > 0")));
            }
        }
        if atoms.windows(2).any(|w| w[1].location <= w[0].location) {
            return Err(Error::InvariantViolation("atoms: locations must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }
}

/// Density sampled on an increasing positive grid, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDensity<T> {
    x: Vec<T>,
    f: Vec<T>,
}

impl<T: Real> GridDensity<T> {
    /// Validates the grid and checks that the trapezoid mass is 1 within `tol_mass`.
    pub fn new(x: Vec<T>, f: Vec<T>, tol_mass: T) -> Result<Self> {
        Self::check_shape(&x, &f)?;
        let g = Self { x, f };
        let mass = g.mass();
        if (mass - T::one()).abs() > tol_mass {
            return Err(Error::InvariantViolation(format!("mass: trapezoid integral is {mass}, expected 1")));
        }
        Ok(g)
    }

    /// Like [`GridDensity::new`] but rescales the values to unit trapezoid mass.
    pub fn normalized(x: Vec<T>, f: Vec<T>) -> Result<Self> {
        Self::check_shape(&x, &f)?;
        let mut g = Self { x, f };
        let mass = g.mass();
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::InvariantViolation(format!("mass: trapezoid integral is {mass}")));
        }
        for v in &mut g.f {
            *v = *v / mass;
        }
        Ok(g)
    }

    fn check_shape(x: &[T], f: &[T]) -> Result<()> {
        if x.len() != f.len() {
            return Err(Error::InvariantViolation("grid: x and f lengths differ".into()));
        }
        if x.len() < 2 {
            return Err(Error::InvariantViolation("grid: need at least 2 points".into()));
        }
        if !x.iter().all(|&v| v > T::zero() && v.is_finite()) {
            return Err(Error::InvariantViolation("grid.x: abscissae must be positive".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvariantViolation("grid.x: abscissae must be strictly increasing".into()));
        }
        if !f.iter().all(|&v| v >= T::zero() && v.is_finite()) {
            return Err(Error::InvariantViolation("grid.f: values must be finite and >= 0".into()));
        }
        Ok(())
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn f(&self) -> &[T] {
        &self.f
    }

    /// Trapezoid integral over the grid.
    pub fn mass(&self) -> T {
        trapezoid(&self.x, &self.f)
    }

    /// Linear interpolation; zero outside the grid.
    pub fn value_at(&self, x: T) -> T {
        let n = self.x.len();
        if !(x >= self.x[0] && x <= self.x[n - 1]) {
            return T::zero();
        }
        let j = self.x.partition_point(|&v| v <= x);
        if j == 0 {
            return self.f[0];
        }
        if j >= n {
            return self.f[n - 1];
        }
        let (x0, x1) = (self.x[j - 1], self.x[j]);
        let w = (x - x0) / (x1 - x0);
        self.f[j - 1] + (self.f[j] - self.f[j - 1]) * w
    }

    /// Maximal intervals on which the interpolant is positive.
    pub fn positive_intervals(&self) -> Vec<(T, T)> {
        let n = self.x.len();
        let mut out = Vec::new();
        let mut i = 0;
        while i < n {
            if self.f[i] > T::zero() {
                let start = i;
                while i + 1 < n && self.f[i + 1] > T::zero() {
                    i += 1;
                }
                let lo = if start == 0 { self.x[0] } else { self.x[start - 1] };
                let hi = if i + 1 >= n { self.x[n - 1] } else { self.x[i + 1] };
                out.push((lo, hi));
            }
            i += 1;
        }
        out
    }
}

/// Trapezoid rule on an arbitrary increasing grid.
pub fn trapezoid<T: Real>(x: &[T], f: &[T]) -> T {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xw, fw)| (xw[1] - xw[0]) * (fw[0] + fw[1]) * lit(0.5))
        .sum()
}

/// A probability measure on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec<T> {
    Atomic(AtomicMeasure<T>),
    Grid(GridDensity<T>),
    Named(Family<T>),
}

/// Samples of the log-pushforward density `y ↦ f(e^y)·e^y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDensity<T> {
    pub y: Vec<T>,
    pub g: Vec<T>,
}

impl<T: Real> LogDensity<T> {
    /// `max |g(y) - g(-y)|` over grid points whose mirror is also sampled
    /// (linear interpolation at the mirror).
    pub fn evenness_defect(&self) -> T {
        let mut worst = T::zero();
        for (&y, &g) in self.y.iter().zip(&self.g) {
            if let Some(m) = interp(&self.y, &self.g, -y) {
                worst = worst.max((g - m).abs());
            }
        }
        worst
    }
}

pub(crate) fn interp<T: Real>(xs: &[T], ys: &[T], x: T) -> Option<T> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    let j = xs.partition_point(|&v| v <= x);
    if j == 0 {
        return Some(ys[0]);
    }
    if j >= n {
        return Some(ys[n - 1]);
    }
    let w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    Some(ys[j - 1] + (ys[j] - ys[j - 1]) * w)
}

/// Number of points of the canonical log grid used when a closed form is
/// converted to a sampled density.
pub const DEFAULT_GRID_POINTS: usize = 2048;

impl<T: Real> MeasureSpec<T> {
    /// Validated named family.
    pub fn named(family: Family<T>) -> Result<Self> {
        family.validate()?;
        Ok(MeasureSpec::Named(family))
    }

    /// Atomic measure from `(weight, location)` pairs; weights must sum to 1.
    pub fn atomic(pairs: &[(T, T)], tol_mass: T) -> Result<Self> {
        let atoms = pairs.iter().map(|&(weight, location)| Atom { weight, location }).collect();
        Ok(MeasureSpec::Atomic(AtomicMeasure::new(atoms, tol_mass)?))
    }

    /// Re-checks every construction invariant.
    pub fn validate(&self, tol_mass: T) -> Result<()> {
        match self {
            MeasureSpec::Atomic(a) => AtomicMeasure::new(a.atoms.clone(), tol_mass).map(|_| ()),
            MeasureSpec::Grid(g) => GridDensity::new(g.x.clone(), g.f.clone(), tol_mass).map(|_| ()),
            MeasureSpec::Named(f) => f.validate(),
        }
    }

    /// Point masses, if the measure is purely atomic (`Atomic` or `Dirac`).
    pub fn point_masses(&self) -> Option<Vec<Atom<T>>> {
        match self {
            MeasureSpec::Atomic(a) => Some(a.atoms.clone()),
            MeasureSpec::Named(Family::Dirac { c }) => Some(vec![Atom { weight: T::one(), location: *c }]),
            _ => None,
        }
    }

    pub fn has_density(&self) -> bool {
        self.point_masses().is_none()
    }

    /// Lebesgue density at `x`.
    pub fn density_at(&self, x: T) -> Result<T> {
        match self {
            MeasureSpec::Atomic(_) => Err(Error::AtomicHasNoDensity),
            MeasureSpec::Grid(g) => Ok(g.value_at(x)),
            MeasureSpec::Named(f) => f.density(x),
        }
    }

    /// Closed hull `[lo, hi]` of the support.
    pub fn support_hull(&self) -> (T, T) {
        match self {
            MeasureSpec::Atomic(a) => (a.atoms[0].location, a.atoms[a.atoms.len() - 1].location),
            MeasureSpec::Grid(g) => {
                let iv = g.positive_intervals();
                match (iv.first(), iv.last()) {
                    (Some(f), Some(l)) => (f.0, l.1),
                    _ => (g.x[0], g.x[g.x.len() - 1]),
                }
            }
            MeasureSpec::Named(f) => f.support(),
        }
    }

    /// Intervals (degenerate for atoms) on which the measure has positive
    /// density or mass; their reciprocals are where `f_blowup` is infinite.
    pub fn charged_intervals(&self) -> Vec<(T, T)> {
        match self {
            MeasureSpec::Grid(g) => g.positive_intervals(),
            _ => match self.point_masses() {
                Some(atoms) => atoms.iter().map(|a| (a.location, a.location)).collect(),
                None => vec![self.support_hull()],
            },
        }
    }

    /// Interval in `y = ln x` carrying all but `tail` mass in each tail.
    pub fn log_range(&self, tail: T) -> (T, T) {
        match self {
            MeasureSpec::Atomic(a) => (a.atoms[0].location.ln(), a.atoms[a.atoms.len() - 1].location.ln()),
            MeasureSpec::Grid(g) => (g.x[0].ln(), g.x[g.x.len() - 1].ln()),
            MeasureSpec::Named(f) => f.log_range(tail),
        }
    }

    /// Effective support `[lo, hi]` after tail truncation at `tail` mass.
    pub fn effective_support(&self, tail: T) -> (T, T) {
        let (a, b) = self.log_range(tail);
        (a.exp(), b.exp())
    }

    pub fn has_finite_mean(&self) -> bool {
        match self {
            MeasureSpec::Named(f) => f.has_finite_mean(),
            _ => true,
        }
    }

    /// `∫ kernel dν`, with `breaks` marking points (in `x`) where the kernel
    /// is sharply peaked or non-smooth.
    pub fn integrate<V, K>(&self, kernel: K, breaks: &[T], tol: &Tolerances<T>) -> Result<V>
    where
        V: QuadValue<T>,
        K: Fn(T) -> V,
    {
        let opts = QuadOptions::new(tol.tol_quad, tol.max_quad_depth);
        self.integrate_with(kernel, breaks, &opts, tol.tol_tail)
    }

    /// [`MeasureSpec::integrate`] with explicit quadrature options.
    pub fn integrate_with<V, K>(&self, kernel: K, breaks: &[T], opts: &QuadOptions<T>, tail: T) -> Result<V>
    where
        V: QuadValue<T>,
        K: Fn(T) -> V,
    {
        if let Some(atoms) = self.point_masses() {
            return Ok(atoms.iter().fold(V::zero_value(), |acc, a| acc + kernel(a.location) * a.weight));
        }
        match self {
            MeasureSpec::Grid(g) => {
                let mut total = V::zero_value();
                for (xw, fw) in g.x.windows(2).zip(g.f.windows(2)) {
                    if fw[0] == T::zero() && fw[1] == T::zero() {
                        continue;
                    }
                    let (x0, x1, f0, f1) = (xw[0], xw[1], fw[0], fw[1]);
                    let lin = |x: T| f0 + (f1 - f0) * ((x - x0) / (x1 - x0));
                    let cell_breaks: Vec<T> = breaks.iter().copied().filter(|&b| b > x0 && b < x1).collect();
                    let v: V = quad::integrate(|x| kernel(x) * lin(x), x0, x1, &cell_breaks, opts)?;
                    total = total + v;
                }
                Ok(total)
            }
            MeasureSpec::Named(f) => {
                let (ylo, yhi) = f.log_range(tail);
                let ybreaks: Vec<T> = breaks.iter().filter(|&&b| b > T::zero()).map(|b| b.ln()).collect();
                quad::integrate(
                    |y: T| {
                        let x = y.exp();
                        let w = f.density(x).unwrap_or(T::zero()) * x;
                        if w == T::zero() {
                            V::zero_value()
                        } else {
                            kernel(x) * w
                        }
                    },
                    ylo,
                    yhi,
                    &ybreaks,
                    opts,
                )
            }
            MeasureSpec::Atomic(_) => unreachable!("handled above"),
        }
    }

    /// First moment.
    pub fn mean(&self, tol: &Tolerances<T>) -> Result<T> {
        if !self.has_finite_mean() {
            return Ok(T::infinity());
        }
        self.integrate(|x| x, &[], tol)
    }

    /// Samples the density on `n` log-spaced points of the effective support
    /// and rescales to unit trapezoid mass. Non-finite endpoint values
    /// (integrable singularities) are replaced by 0.
    pub fn to_grid(&self, n: usize, tail: T) -> Result<GridDensity<T>> {
        if let MeasureSpec::Grid(g) = self {
            return Ok(g.clone());
        }
        if !self.has_density() {
            return Err(Error::AtomicHasNoDensity);
        }
        let (lo, hi) = self.effective_support(tail);
        let x = logspace(lo, hi, n.max(2));
        let f = x
            .iter()
            .map(|&v| self.density_at(v).map(|d| if d.is_finite() { d } else { T::zero() }))
            .collect::<Result<Vec<T>>>()?;
        GridDensity::normalized(x, f)
    }

    /// The image measure under `x ↦ 1/x`.
    pub fn invert(&self, tail: T) -> Result<Self> {
        match self {
            MeasureSpec::Atomic(a) => {
                let mut atoms: Vec<Atom<T>> =
                    a.atoms.iter().map(|at| Atom { weight: at.weight, location: at.location.recip() }).collect();
                atoms.reverse();
                Ok(MeasureSpec::Atomic(AtomicMeasure { atoms }))
            }
            MeasureSpec::Grid(g) => {
                let n = g.x.len();
                let x: Vec<T> = (0..n).map(|i| g.x[n - 1 - i].recip()).collect();
                let f: Vec<T> = (0..n)
                    .map(|i| {
                        let xi = g.x[n - 1 - i];
                        g.f[n - 1 - i] * xi * xi
                    })
                    .collect();
                Ok(MeasureSpec::Grid(GridDensity { x, f }))
            }
            MeasureSpec::Named(f) => match f.inverse() {
                Some(inv) => Ok(MeasureSpec::Named(inv)),
                None => MeasureSpec::Grid(self.to_grid(DEFAULT_GRID_POINTS, tail)?).invert(tail),
            },
        }
    }

    /// Log-pushforward density sampled at `n` points of `[y_lo, y_hi]`.
    pub fn pushforward_log(&self, y_lo: T, y_hi: T, n: usize) -> Result<LogDensity<T>> {
        if !self.has_density() {
            return Err(Error::AtomicHasNoDensity);
        }
        let y = linspace(y_lo, y_hi, n);
        let g = y
            .iter()
            .map(|&yy| {
                let x = yy.exp();
                self.density_at(x).map(|d| d * x)
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(LogDensity { y, g })
    }

    /// Distribution function sampled on a symmetric grid in `y = ln x`:
    /// returns `(y, F(e^y))` with `n` cells on `[-Y, Y]`.
    pub fn log_cdf(&self, n: usize, tail: T) -> Result<(Vec<T>, Vec<T>)> {
        let (ylo, yhi) = self.log_range(tail);
        let big = ylo.abs().max(yhi.abs()).max(T::one());
        let ys = linspace(-big, big, n + 1);
        let mut cdf = Vec::with_capacity(ys.len());
        match self.point_masses() {
            Some(atoms) => {
                for &y in &ys {
                    let x = y.exp();
                    cdf.push(atoms.iter().filter(|a| a.location <= x).map(|a| a.weight).sum());
                }
            }
            None => {
                let g = |y: T| {
                    let x = y.exp();
                    let d = self.density_at(x).unwrap_or(T::zero());
                    if d.is_finite() {
                        d * x
                    } else {
                        T::zero()
                    }
                };
                let mut acc = T::zero();
                cdf.push(acc);
                for w in ys.windows(2) {
                    let (v, _, _): (T, T, bool) = quad::gauss_kronrod(&g, w[0], w[1]);
                    acc = acc + v;
                    cdf.push(acc);
                }
            }
        }
        Ok((ys, cdf))
    }

    /// Whether `ν = ν⁻¹` up to `tol` in sup-distance of distribution functions.
    pub fn is_mult_symmetric(&self, tol: T, tail: T) -> Result<bool> {
        if let Some(atoms) = self.point_masses() {
            let inv = self.invert(tail)?.point_masses().unwrap_or_default();
            return Ok(atoms.len() == inv.len()
                && atoms.iter().zip(&inv).all(|(a, b)| {
                    (a.weight - b.weight).abs() <= tol && (a.location - b.location).abs() <= tol * a.location
                }));
        }
        Ok(self.symmetry_defect(tail)? <= tol)
    }

    /// `sup_y |F(y) - (1 - F(-y))|`, the CDF distance between `ν` and `ν⁻¹`.
    pub fn symmetry_defect(&self, tail: T) -> Result<T> {
        let (_, cdf) = self.log_cdf(4096, tail)?;
        let n = cdf.len();
        Ok((0..n).map(|i| (cdf[i] + cdf[n - 1 - i] - T::one()).abs()).fold(T::zero(), T::max))
    }

    /// `f(r) = ∫ rξ/(1 - rξ)² dν(ξ)`; `+∞` at reciprocals of atoms and of
    /// points where the density is positive.
    pub fn f_blowup(&self, r: T, tol: &Tolerances<T>) -> T {
        let one = T::one();
        if let Some(atoms) = self.point_masses() {
            let mut acc = T::zero();
            for a in &atoms {
                let d = one - r * a.location;
                if d.abs() <= T::epsilon() * lit(4.0) {
                    return T::infinity();
                }
                acc = acc + a.weight * r * a.location / (d * d);
            }
            return acc;
        }
        let pole = r.recip();
        for (lo, hi) in self.charged_intervals() {
            if pole > lo && pole < hi {
                return T::infinity();
            }
            if (pole == lo || pole == hi) && self.density_at(pole).map(|d| d > T::zero()).unwrap_or(false) {
                return T::infinity();
            }
        }
        let kernel = |x: T| {
            let d = one - r * x;
            r * x / (d * d)
        };
        match self.integrate(kernel, &[pole], tol) {
            Ok(v) if v.is_finite() => v,
            _ => T::infinity(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn named(f: Family<f64>) -> MeasureSpec<f64> {
        MeasureSpec::named(f).unwrap()
    }

    #[test]
    fn density_examples() {
        let lam = named(Family::Lambda { b: PI / 2.0 });
        // c_{π/2} = 2/π, denominator 2 at x = 1.
        assert!((lam.density_at(1.0).unwrap() - (2.0 / PI) / 2.0).abs() < 1e-15);
        let two_atoms = MeasureSpec::atomic(&[(0.5, 1.0), (0.5, 4.0)], 1e-12).unwrap();
        assert_eq!(two_atoms.density_at(1.0), Err(Error::AtomicHasNoDensity));
    }

    #[test]
    fn integrate_examples() {
        let t = tol();
        let dirac = named(Family::Dirac { c: 3.0 });
        assert_eq!(dirac.integrate(|x| x * x, &[], &t).unwrap(), 9.0);
        let gamma = named(Family::Gamma { p: 2.0, theta: 1.0 });
        assert!((gamma.integrate(|x| x, &[], &t).unwrap() - 2.0).abs() < 1e-9);
        let unif = named(Family::UniformInterval { alpha: 1.0, beta: 2.0 });
        assert!((unif.integrate(|x| 1.0 / x, &[], &t).unwrap() - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn every_family_has_unit_mass() {
        let t = tol();
        for f in [
            Family::Lambda { b: 1.0 },
            Family::Lambda { b: PI / 2.0 },
            Family::Lambda { b: 2.5 },
            Family::HalfNormal { t: 4.0 },
            Family::Gamma { p: 2.0, theta: 1.0 },
            Family::Gamma { p: 0.5, theta: 3.0 },
            Family::Beta { p: 2.0, q: 3.0 },
            Family::Beta { p: 0.7, q: 0.6 },
            Family::MarchenkoPastur,
            Family::MarchenkoPasturInverse,
            Family::BooleanStable { alpha: 0.5 },
            Family::BooleanStable { alpha: 0.3 },
            Family::UniformInterval { alpha: 1.0, beta: 1.1 },
            Family::LogNormal { m: 0.3, s: 1.2 },
        ] {
            let m: f64 = named(f).integrate(|_| 1.0, &[], &t).unwrap();
            assert!((m - 1.0).abs() < 1e-7, "{f:?}: mass {m}");
        }
    }

    #[test]
    fn inversion_examples() {
        let t = 1e-12;
        assert_eq!(named(Family::Dirac { c: 4.0 }).invert(t).unwrap(), named(Family::Dirac { c: 0.25 }));
        assert_eq!(named(Family::MarchenkoPastur).invert(t).unwrap(), named(Family::MarchenkoPasturInverse));
        let two = MeasureSpec::atomic(&[(0.5, 1.0), (0.5, 4.0)], 1e-12).unwrap();
        let inv = MeasureSpec::atomic(&[(0.5, 0.25), (0.5, 1.0)], 1e-12).unwrap();
        assert_eq!(two.invert(t).unwrap(), inv);
        assert_eq!(
            named(Family::LogNormal { m: 0.5, s: 2.0 }).invert(t).unwrap(),
            named(Family::LogNormal { m: -0.5, s: 2.0 })
        );
    }

    #[test]
    fn grid_inversion_is_an_involution() {
        let g = MeasureSpec::Grid(named(Family::Gamma { p: 2.0, theta: 1.0 }).to_grid(512, 1e-12).unwrap());
        let back = g.invert(1e-12).unwrap().invert(1e-12).unwrap();
        let (MeasureSpec::Grid(a), MeasureSpec::Grid(b)) = (&g, &back) else { panic!() };
        for (x, y) in a.x().iter().zip(b.x()) {
            assert!((x - y).abs() <= 4.0 * f64::EPSILON * x);
        }
        for (x, y) in a.f().iter().zip(b.f()) {
            assert!((x - y).abs() <= 1e-13 * (1.0 + x));
        }
        // inverse of a gridded gamma has unit mass under the reflected grid
        let MeasureSpec::Grid(inv) = g.invert(1e-12).unwrap() else { panic!() };
        assert!((inv.mass() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn pushforward_examples() {
        let ln = named(Family::LogNormal { m: 0.0, s: 1.0 });
        let p = ln.pushforward_log(-3.0, 3.0, 61).unwrap();
        for (y, g) in p.y.iter().zip(&p.g) {
            let phi = (-0.5 * y * y).exp() / (2.0 * PI).sqrt();
            assert!((g - phi).abs() < 1e-14);
        }
        let lam = named(Family::Lambda { b: PI / 2.0 }).pushforward_log(-5.0, 5.0, 101).unwrap();
        for (y, g) in lam.y.iter().zip(&lam.g) {
            let expect = (2.0 / PI) * y.exp() / (1.0 + (2.0 * y).exp());
            assert!((g - expect).abs() < 1e-14);
        }
        assert!(lam.evenness_defect() < 1e-14);
        // Gamma(1,1): y - e^y is maximal at y = 0
        let gam = named(Family::Gamma { p: 1.0, theta: 1.0 }).pushforward_log(-2.0, 2.0, 401).unwrap();
        let imax = (0..gam.g.len()).max_by(|&i, &j| gam.g[i].total_cmp(&gam.g[j])).unwrap();
        assert!(gam.y[imax].abs() < 1e-12);
        assert!(two_atom().pushforward_log(0.0, 1.0, 3).is_err());
    }

    fn two_atom() -> MeasureSpec<f64> {
        MeasureSpec::atomic(&[(0.5, 1.0), (0.5, 4.0)], 1e-12).unwrap()
    }

    #[test]
    fn symmetry_examples() {
        let t = 1e-12;
        assert!(named(Family::Lambda { b: 1.0 }).is_mult_symmetric(1e-6, t).unwrap());
        assert!(named(Family::Dirac { c: 1.0 }).is_mult_symmetric(1e-12, t).unwrap());
        assert!(!named(Family::Dirac { c: 2.0 }).is_mult_symmetric(1e-12, t).unwrap());
        assert!(named(Family::BooleanStable { alpha: 0.4 }).is_mult_symmetric(1e-6, t).unwrap());
        assert!(named(Family::LogNormal { m: 0.0, s: 0.7 }).is_mult_symmetric(1e-6, t).unwrap());
        let g = named(Family::Gamma { p: 2.0, theta: 1.0 });
        // Oracle: compare the two CDFs directly at x = 1, where F_ν(1) = 1 - 2/e
        // and F_{ν⁻¹}(1) = 2/e.
        let gap = (1.0 - 2.0 / std::f64::consts::E) - 2.0 / std::f64::consts::E;
        assert!(g.symmetry_defect(t).unwrap() >= gap.abs() - 1e-9);
        assert!(!g.is_mult_symmetric(1e-3, t).unwrap());
        let sym = MeasureSpec::atomic(&[(0.25, 0.5), (0.5, 1.0), (0.25, 2.0)], 1e-12).unwrap();
        assert!(sym.is_mult_symmetric(1e-12, t).unwrap());
        assert!(!two_atom().is_mult_symmetric(1e-12, t).unwrap());
    }

    #[test]
    fn f_blowup_examples() {
        let t = tol();
        let d = named(Family::Dirac { c: 1.0 });
        assert_eq!(d.f_blowup(0.5, &t), 2.0);
        assert!(d.f_blowup(1.0, &t).is_infinite());
        let u = named(Family::UniformInterval { alpha: 1.0, beta: 2.0 });
        assert!(u.f_blowup(0.75, &t).is_infinite());
        assert!(u.f_blowup(0.5, &t).is_infinite());
        // r = 0.25: ∫_1^2 (ξ/4)/(1-ξ/4)² dξ = 4[ln(1-s) + 1/(1-s)] over s ∈ [1/4, 1/2]
        let s = |v: f64| 4.0 * ((1.0 - v).ln() + 1.0 / (1.0 - v));
        let exact = s(0.5) - s(0.25);
        assert!((u.f_blowup(0.25, &t) - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn construction_invariants() {
        assert!(MeasureSpec::atomic(&[(0.5, 1.0), (0.4, 2.0)], 1e-6).is_err());
        assert!(MeasureSpec::atomic(&[(0.5, 2.0), (0.5, 1.0)], 1e-6).is_err());
        assert!(MeasureSpec::atomic(&[(1.0, -1.0)], 1e-6).is_err());
        assert!(GridDensity::new(vec![1.0, 2.0], vec![1.0, 1.0], 1e-6).is_ok());
        assert!(GridDensity::new(vec![1.0, 2.0], vec![1.0, -1.0], 1e-6).is_err());
        assert!(GridDensity::new(vec![2.0, 1.0], vec![1.0, 1.0], 1e-6).is_err());
        assert!(MeasureSpec::named(Family::Lambda { b: 4.0 }).is_err());
    }

    #[test]
    fn grid_integration_matches_trapezoid_mass() {
        let g = named(Family::LogNormal { m: 0.0, s: 0.5 }).to_grid(400, 1e-12).unwrap();
        let spec = MeasureSpec::Grid(g);
        let m: f64 = spec.integrate(|_| 1.0, &[], &tol()).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }
}
