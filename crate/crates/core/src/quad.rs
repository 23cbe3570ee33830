//! Globally adaptive Gauss–Kronrod (7/15) quadrature for real and complex
//! integrands, with caller-supplied breakpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue<T>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> {
    fn zero_value() -> Self;
    fn magnitude(self) -> T;
    fn finite(self) -> bool;
}

macro_rules! real_quad_value {
    ($t:ty) => {
        impl QuadValue<$t> for $t {
            fn zero_value() -> Self {
                0.0
            }
            fn magnitude(self) -> $t {
                self.abs()
            }
            fn finite(self) -> bool {
                self.is_finite()
            }
        }
    };
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero_value() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

real_quad_value!(f32);
real_quad_value!(f64);

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
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss 7-point weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Settings of [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Maximum bisection depth of any single segment.
    pub max_depth: usize,
    pub max_segments: usize,
}

impl<T: Real> QuadOptions<T> {
    pub fn new(rel_tol: T, max_depth: usize) -> Self {
        Self { rel_tol, abs_tol: T::min_positive_value(), max_depth, max_segments: 4000 }
    }
}

/// One 15-point Kronrod evaluation on `[a, b]`; returns the estimate and
/// `|K15 - G7|`.
pub fn gauss_kronrod<T, V, F>(f: &F, a: T, b: T) -> (V, T, bool)
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    let half = (b - a) * lit(0.5);
    let mid = a + half;
    let fc = f(mid);
    let mut finite = fc.finite();
    let mut kron = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        finite &= f1.finite() && f2.finite();
        let s = f1 + f2;
        kron = kron + s * lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * lit(WG[j / 2]);
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).magnitude(), finite)
}

struct Segment<T, V> {
    a: T,
    b: T,
    value: V,
    err: T,
    depth: usize,
}

struct HeapKey {
    err: f64,
    seq: usize,
}

impl PartialEq for HeapKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapKey {}
impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Integrates `f` over `[lo, hi]`, splitting first at every breakpoint
/// strictly inside the interval, then bisecting the segment with the
/// largest error estimate until the total estimate meets the tolerance.
pub fn integrate<T, V, F>(f: F, lo: T, hi: T, breaks: &[T], opts: &QuadOptions<T>) -> Result<V>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    if hi <= lo {
        return Ok(V::zero_value());
    }
    let mut cuts: Vec<T> = breaks.iter().copied().filter(|&c| c > lo && c < hi && c.is_finite()).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let non_integrable = |a: T, b: T, depth: usize| Error::NonIntegrable { lo: to_f64(a), hi: to_f64(b), depth };

    let mut segs: Vec<Segment<T, V>> = Vec::new();
    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let (value, err, finite) = gauss_kronrod(&f, w[0], w[1]);
        if !finite {
            return Err(non_integrable(w[0], w[1], 0));
        }
        let seq = segs.len();
        heap.push(HeapKey { err: to_f64(err), seq });
        segs.push(Segment { a: w[0], b: w[1], value, err, depth: 0 });
    }
    let mut live = vec![true; segs.len()];
    let mut total_err: T = segs.iter().map(|s| s.err).sum();
    let mut total: V = segs.iter().fold(V::zero_value(), |acc, s| acc + s.value);
    // Σ|segment values|: cancellation below roundoff of this is unreachable.
    let mut l1: T = segs.iter().map(|s| s.value.magnitude()).sum();
    let roundoff: T = T::epsilon() * lit(50.0);

    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude()).max(roundoff * l1);
        if total_err <= tol {
            return Ok(total);
        }
        let Some(key) = heap.pop() else {
            return Err(non_integrable(lo, hi, opts.max_depth));
        };
        let idx = key.seq;
        if !live[idx] {
            continue;
        }
        let (a, b, depth, old_val, old_err) = {
            let s = &segs[idx];
            (s.a, s.b, s.depth, s.value, s.err)
        };
        if depth >= opts.max_depth || segs.len() + 2 > opts.max_segments {
            // Unrefinable and still the worst offender.
            if old_err > tol * lit(0.5) || segs.len() + 2 > opts.max_segments {
                return Err(non_integrable(a, b, depth));
            }
            continue;
        }
        let mid = a + (b - a) * lit(0.5);
        let (v1, e1, ok1) = gauss_kronrod(&f, a, mid);
        let (v2, e2, ok2) = gauss_kronrod(&f, mid, b);
        if !(ok1 && ok2) {
            return Err(non_integrable(a, b, depth + 1));
        }
        live[idx] = false;
        total = total - old_val + v1 + v2;
        total_err = total_err - old_err + e1 + e2;
        l1 = l1 - old_val.magnitude() + v1.magnitude() + v2.magnitude();
        for (sa, sb, v, e) in [(a, mid, v1, e1), (mid, b, v2, e2)] {
            let seq = segs.len();
            heap.push(HeapKey { err: to_f64(e), seq });
            segs.push(Segment { a: sa, b: sb, value: v, err: e, depth: depth + 1 });
            live.push(true);
        }
        // Re-sum periodically to keep rounding drift out of the running totals.
        if segs.len() % 512 == 0 {
            total = segs.iter().zip(&live).filter(|(_, &l)| l).fold(V::zero_value(), |acc, (s, _)| acc + s.value);
            total_err = segs.iter().zip(&live).filter(|(_, &l)| l).map(|(s, _)| s.err).sum();
            l1 = segs.iter().zip(&live).filter(|(_, &l)| l).map(|(s, _)| s.value.magnitude()).sum();
        }
    }
}
