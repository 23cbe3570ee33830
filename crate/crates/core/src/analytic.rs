//! Complex-analytic transforms: the ψ-transform of a measure on `(0, ∞)`,
//! its derivative, the Pick function of a measure on ℝ, and the
//! Σ-transform of the free positive multiplicative Brownian motion.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::MeasureSpec;
use crate::quad::{self, QuadOptions};
use crate::scalar::{linspace, lit, logspace, Real};
use crate::tolerances::Tolerances;

/// A point of the complex plane; checker grids keep `im > 0`.
pub type ComplexPoint<T> = Complex<T>;

/// Spacing rule along the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImSpacing {
    Linear,
    Log,
}

/// Rectangular sample of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlaneGrid<T> {
    pub re_lo: T,
    pub re_hi: T,
    pub re_count: usize,
    pub im_lo: T,
    pub im_hi: T,
    pub im_count: usize,
    pub spacing: ImSpacing,
}

impl<T: Real> HalfPlaneGrid<T> {
    pub fn new(
        (re_lo, re_hi, re_count): (T, T, usize),
        (im_lo, im_hi, im_count): (T, T, usize),
        spacing: ImSpacing,
    ) -> Result<Self> {
        if !(im_lo > T::zero()) || im_hi < im_lo || re_hi < re_lo {
            return Err(Error::DomainError("half-plane grid needs 0 < im_lo <= im_hi and re_lo <= re_hi".into()));
        }
        if re_count < 2 || im_count < 2 {
            return Err(Error::DomainError("half-plane grid counts must be >= 2".into()));
        }
        Ok(Self { re_lo, re_hi, re_count, im_lo, im_hi, im_count, spacing })
    }

    /// `[-10, 10] × [1e-3, 10]`, 64 × 64, log-spaced in the imaginary part.
    pub fn checker_default() -> Self {
        Self {
            re_lo: lit(-10.0),
            re_hi: lit(10.0),
            re_count: 64,
            im_lo: lit(1e-3),
            im_hi: lit(10.0),
            im_count: 64,
            spacing: ImSpacing::Log,
        }
    }

    /// Grid points, real part varying slowest.
    pub fn points(&self) -> Vec<ComplexPoint<T>> {
        let res = linspace(self.re_lo, self.re_hi, self.re_count);
        let ims = match self.spacing {
            ImSpacing::Linear => linspace(self.im_lo, self.im_hi, self.im_count),
            ImSpacing::Log => logspace(self.im_lo, self.im_hi, self.im_count),
        };
        res.iter().flat_map(|&re| ims.iter().map(move |&im| Complex::new(re, im))).collect()
    }
}

fn check_off_half_line<T: Real>(z: Complex<T>) -> Result<()> {
    if z.im == T::zero() && z.re >= T::zero() || !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::DomainError(format!("z = {}{:+}i lies on [0, inf)", z.re, z.im)));
    }
    Ok(())
}

/// Breakpoints (in `x`) around the near-pole `x = Re(1/z)` of `1/(1 - xz)`.
fn pole_breaks<T: Real>(z: Complex<T>) -> Vec<T> {
    let w = z.inv();
    let x0 = w.re;
    if !(x0 > T::zero()) {
        return Vec::new();
    }
    let d = w.im.abs();
    let mut out = vec![x0];
    for k in [1.0, 10.0, 100.0] {
        let s = d * lit(k);
        out.push(x0 + s);
        if x0 - s > T::zero() {
            out.push(x0 - s);
        }
    }
    out
}

fn opts<T: Real>(tol: &Tolerances<T>) -> QuadOptions<T> {
    QuadOptions::new(tol.tol_quad, tol.max_quad_depth)
}

/// `ψ_ν(z) = ∫ xz/(1 - xz) dν(x)` for `z ∉ [0, ∞)`.
pub fn psi<T: Real>(nu: &MeasureSpec<T>, z: ComplexPoint<T>, tol: &Tolerances<T>) -> Result<Complex<T>> {
    check_off_half_line(z)?;
    let one = Complex::new(T::one(), T::zero());
    nu.integrate_with(
        |x: T| {
            let xz = z * x;
            xz / (one - xz)
        },
        &pole_breaks(z),
        &opts(tol),
        tol.tol_tail,
    )
}

/// `ψ_ν'(z) = ∫ x/(1 - xz)² dν(x)` for `z ∉ [0, ∞)`.
pub fn psi_prime<T: Real>(nu: &MeasureSpec<T>, z: ComplexPoint<T>, tol: &Tolerances<T>) -> Result<Complex<T>> {
    check_off_half_line(z)?;
    let one = Complex::new(T::one(), T::zero());
    nu.integrate_with(
        |x: T| {
            // Two divisions: |d|⁴ overflows for heavy tails.
            let d = one - z * x;
            Complex::new(x, T::zero()) / d / d
        },
        &pole_breaks(z),
        &opts(tol),
        tol.tol_tail,
    )
}

/// A positive measure on the whole real line, given by atoms or a sampled
/// density (linear interpolation, zero outside the grid).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LineMeasure<T> {
    /// `(weight, location)` pairs.
    Atoms(Vec<(T, T)>),
    Grid { x: Vec<T>, f: Vec<T> },
}

impl<T: Real> LineMeasure<T> {
    fn integrate(&self, kernel: impl Fn(T) -> Complex<T>, breaks: &[T], opts: &QuadOptions<T>) -> Result<Complex<T>> {
        match self {
            LineMeasure::Atoms(atoms) => {
                Ok(atoms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(w, x)| acc + kernel(x) * w))
            }
            LineMeasure::Grid { x, f } => {
                let mut total = Complex::new(T::zero(), T::zero());
                for (xw, fw) in x.windows(2).zip(f.windows(2)) {
                    if fw[0] == T::zero() && fw[1] == T::zero() {
                        continue;
                    }
                    let (x0, x1, f0, f1) = (xw[0], xw[1], fw[0], fw[1]);
                    let cell: Vec<T> = breaks.iter().copied().filter(|&b| b > x0 && b < x1).collect();
                    total = total
                        + quad::integrate(
                            |s: T| kernel(s) * (f0 + (f1 - f0) * ((s - x0) / (x1 - x0))),
                            x0,
                            x1,
                            &cell,
                            opts,
                        )?;
                }
                Ok(total)
            }
        }
    }
}

/// `P_τ(z) = ∫ (1 + xz)/((x - z)(1 + x²)) τ(dx)` and
/// `P_τ'(z) = ∫ τ(dx)/(x - z)²` for `z` in the upper half-plane.
pub fn pick_transform<T: Real>(
    tau: &LineMeasure<T>,
    z: ComplexPoint<T>,
    tol: &Tolerances<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    if !(z.im > T::zero()) {
        return Err(Error::DomainError(format!("Pick transform needs Im z > 0, got {}", z.im)));
    }
    let one = Complex::new(T::one(), T::zero());
    let mut breaks = vec![z.re];
    for k in [1.0, 10.0, 100.0] {
        breaks.push(z.re - z.im * lit(k));
        breaks.push(z.re + z.im * lit(k));
    }
    let o = opts(tol);
    let p = tau.integrate(
        |x: T| (one + z * x) / ((Complex::new(x, T::zero()) - z) * (T::one() + x * x)),
        &breaks,
        &o,
    )?;
    let dp = tau.integrate(
        |x: T| {
            let d = Complex::new(x, T::zero()) - z;
            one / d / d
        },
        &breaks,
        &o,
    )?;
    Ok((p, dp))
}

/// `Σ_{σ_t}(z) = exp((t/2)(z + 1)/(z - 1))`.
pub fn sigma_bm_sigma<T: Real>(t: T, z: Complex<T>) -> Result<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    if z == one {
        return Err(Error::DomainError("Sigma transform of sigma_t is singular at z = 1".into()));
    }
    Ok(((z + one) / (z - one) * (t * lit(0.5))).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Family;

    type C = Complex<f64>;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn named(f: Family<f64>) -> MeasureSpec<f64> {
        MeasureSpec::named(f).unwrap()
    }

    #[test]
    fn psi_of_point_mass() {
        let d = named(Family::Dirac { c: 1.0 });
        let v = psi(&d, C::new(0.0, 1.0), &tol()).unwrap();
        assert!((v - C::new(-0.5, 0.5)).norm() < 1e-15);
        let small = psi(&d, C::new(-1e-9, 0.0), &tol()).unwrap();
        assert!(small.norm() < 1e-8);
        assert!(psi(&d, C::new(2.0, 0.0), &tol()).is_err());
        assert!(psi(&d, C::new(-2.0, 0.0), &tol()).is_ok());
    }

    #[test]
    fn psi_of_gamma_against_tight_quadrature() {
        // Oracle: direct real/imag quadrature of the kernel against the
        // gamma density on (0, 80) at a much tighter tolerance.
        let g = named(Family::Gamma { p: 2.0, theta: 1.0 });
        let z = C::new(0.0, 1.0);
        let v = psi(&g, z, &tol()).unwrap();
        let o = QuadOptions::new(1e-14, 60);
        let re: f64 = quad::integrate(|x: f64| (x * z / (1.0 - x * z)).re * x * (-x).exp(), 0.0, 80.0, &[], &o).unwrap();
        let im: f64 = quad::integrate(|x: f64| (x * z / (1.0 - x * z)).im * x * (-x).exp(), 0.0, 80.0, &[], &o).unwrap();
        assert!((v - C::new(re, im)).norm() < 1e-8 * v.norm(), "{v} vs {re}+{im}i");
    }

    #[test]
    fn psi_prime_closed_forms() {
        let c = 2.5;
        let d = named(Family::Dirac { c });
        let z = C::new(0.3, 0.7);
        let v = psi_prime(&d, z, &tol()).unwrap();
        let one = C::new(1.0, 0.0);
        assert!((v - c / ((one - z * c) * (one - z * c))).norm() < 1e-14);
        let two = MeasureSpec::atomic(&[(0.5, 1.0), (0.5, 4.0)], 1e-12).unwrap();
        let i = C::new(0.0, 1.0);
        let expect = 0.5 / ((one - i) * (one - i)) + 2.0 / ((one - i * 4.0) * (one - i * 4.0));
        assert!((psi_prime(&two, i, &tol()).unwrap() - expect).norm() < 1e-15);
    }

    #[test]
    fn psi_prime_matches_finite_differences() {
        let h = 1e-5;
        // The boolean stable law with small alpha reaches x ~ 1e120.
        let heavy = named(Family::BooleanStable { alpha: 0.1 });
        for nu in [named(Family::Gamma { p: 2.0, theta: 1.0 }), named(Family::Lambda { b: 1.0 }), heavy] {
            for z in [C::new(-1.0, 0.5), C::new(0.5, 0.2), C::new(3.0, 1.0), C::new(0.0, 2.0)] {
                let d = psi_prime(&nu, z, &tol()).unwrap();
                let fd = (psi(&nu, z + h, &tol()).unwrap() - psi(&nu, z - h, &tol()).unwrap()) / (2.0 * h);
                assert!((d - fd).norm() <= 1e-6 * d.norm(), "{z}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn psi_maps_upper_half_plane_to_itself() {
        let nu = named(Family::Gamma { p: 2.0, theta: 1.0 });
        let grid = HalfPlaneGrid::new((-5.0, 5.0, 12), (1e-2, 5.0, 12), ImSpacing::Log).unwrap();
        for z in grid.points() {
            let v = psi(&nu, z, &tol()).unwrap();
            assert!(v.im > 0.0, "{z}: {v}");
            let w = psi(&nu, z.conj(), &tol()).unwrap();
            assert!((w - v.conj()).norm() <= 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn pick_transform_of_point_masses() {
        let z = C::new(0.4, 1.3);
        let (p, dp) = pick_transform(&LineMeasure::Atoms(vec![(1.0, 0.0)]), z, &tol()).unwrap();
        assert!((p + z.inv()).norm() < 1e-15);
        assert!((dp - (z * z).inv()).norm() < 1e-15);
        let i = C::new(0.0, 1.0);
        let (p1, dp1) = pick_transform(&LineMeasure::Atoms(vec![(1.0, 1.0)]), i, &tol()).unwrap();
        // (1 + i)/((1 - i)·2) = i/2
        assert!((p1 - C::new(0.0, 0.5)).norm() < 1e-15);
        assert!((dp1 - ((1.0 - i) * (1.0 - i)).inv()).norm() < 1e-15);
        assert!(pick_transform(&LineMeasure::Atoms(vec![(1.0, 1.0)]), C::new(1.0, 0.0), &tol()).is_err());
    }

    #[test]
    fn pick_property_for_gridded_x_gamma() {
        // τ(dx) = x·γ(dx) on a grid
        let x: Vec<f64> = linspace(1e-6, 60.0, 3000);
        let f: Vec<f64> = x.iter().map(|&v| v * v * (-v).exp()).collect();
        let tau = LineMeasure::Grid { x, f };
        let grid = HalfPlaneGrid::new((-5.0, 10.0, 20), (1e-2, 10.0, 20), ImSpacing::Log).unwrap();
        for z in grid.points() {
            let (p, _) = pick_transform(&tau, z, &tol()).unwrap();
            assert!(p.im >= 0.0, "{z}: {p}");
        }
    }

    #[test]
    fn sigma_transform_values() {
        let v = sigma_bm_sigma(1.0, C::new(0.0, 0.0)).unwrap();
        assert!((v.re - (-0.5f64).exp()).abs() < 1e-15 && v.im == 0.0);
        assert!((v.re - 0.606531).abs() < 1e-6);
        let id = sigma_bm_sigma(0.0, C::new(0.3, -0.2)).unwrap();
        assert!((id - 1.0).norm() < 1e-15);
        assert!((sigma_bm_sigma(2.0, C::new(-1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!(sigma_bm_sigma(1.0, C::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn sigma_transform_semigroup() {
        for z in [C::new(0.2, 0.1), C::new(-3.0, 0.0), C::new(0.5, -0.4)] {
            let a = sigma_bm_sigma(0.7, z).unwrap() * sigma_bm_sigma(1.9, z).unwrap();
            let b = sigma_bm_sigma(2.6, z).unwrap();
            assert!((a - b).norm() <= 1e-14 * b.norm());
        }
    }

    #[test]
    fn grid_validation() {
        assert!(HalfPlaneGrid::new((-1.0, 1.0, 4), (0.0, 1.0, 4), ImSpacing::Log).is_err());
        assert!(HalfPlaneGrid::new((-1.0, 1.0, 1), (0.1, 1.0, 4), ImSpacing::Log).is_err());
        let g = HalfPlaneGrid::<f64>::checker_default();
        let pts = g.points();
        assert_eq!(pts.len(), 64 * 64);
        assert!(pts.iter().all(|z| z.im > 0.0));
    }
}
