//! The coefficient interface shared by the two scalar-field backends.
//!
//! A coefficient is a complex-valued function on a ball in ℂⁿ.  The algebra
//! modules are generic over this trait so that every identity can be checked
//! twice: exactly, on truncated power series with rational coefficients, and
//! numerically, on sampled grid functions (the backend the integral operators
//! and the solver run on).

use num::complex::Complex64;
use num::BigRational;

use crate::error::Result;

/// A complex number with exact rational real and imaginary parts.
pub type CRat = num::complex::Complex<BigRational>;

/// Builds an exact complex rational from integer parts.
pub fn crat(re: i64, im: i64) -> CRat {
    CRat::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

/// Builds an exact complex rational from rational parts `re_n/re_d + (im_n/im_d) i`.
pub fn crat_frac(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> CRat {
    CRat::new(
        BigRational::new(re_n.into(), re_d.into()),
        BigRational::new(im_n.into(), im_d.into()),
    )
}

/// Converts an exact complex rational to floating point.
pub fn crat_to_f64(v: &CRat) -> Complex64 {
    use num::ToPrimitive;
    Complex64::new(v.re.to_f64().unwrap_or(f64::NAN), v.im.to_f64().unwrap_or(f64::NAN))
}

/// A scalar field on a ball, with enough structure for the form algebra:
/// exact ring operations, the ∂̄-derivatives, real partial derivatives for the
/// Hölder norms, and a canonical deterministic sample set for sup norms.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    /// Backend parameters shared by all values entering one computation
    /// (ambient dimension; grid shape and radius).
    type Ctx: Clone + PartialEq + std::fmt::Debug;

    fn ctx(&self) -> &Self::Ctx;

    /// Ambient complex dimension n.
    fn ambient(ctx: &Self::Ctx) -> usize;

    fn zero(ctx: &Self::Ctx) -> Self;

    fn one(ctx: &Self::Ctx) -> Self;

    /// The constant function with the given exact value.
    fn constant(ctx: &Self::Ctx, value: &CRat) -> Self;

    /// Exact zero test: no stored term up to the accuracy degree (series),
    /// or all samples identically zero (grid).
    fn is_zero(&self) -> bool;

    /// True only when the value is the zero function exactly, not merely
    /// zero up to a finite accuracy degree.  Only such values may be elided
    /// from sparse containers: a computed zero of finite accuracy still
    /// constrains the accuracy of anything it is added to.
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }

    fn add(&self, other: &Self) -> Self;

    fn sub(&self, other: &Self) -> Self;

    fn neg(&self) -> Self;

    fn mul(&self, other: &Self) -> Self;

    /// ∂/∂z̄_j, 1-based index `j` in `1..=n`.
    fn dbar(&self, j: usize) -> Self;

    /// Partial derivative along a real coordinate axis of ℂⁿ ≅ ℝ²ⁿ.
    /// Axis `2i` is Re z_{i+1}, axis `2i+1` is Im z_{i+1}.
    fn real_deriv(&self, axis: usize) -> Self;

    /// Largest derivative order the backend can estimate reliably
    /// (`None` = unbounded, as for exact series).
    fn derivative_order_cap() -> Option<usize> {
        None
    }

    /// Value at a point of the ball (grid backend interpolates).
    fn eval(&self, z: &[Complex64]) -> Result<Complex64>;

    /// Radius of the ball the coefficient lives on (series values are germs
    /// normalized to the unit ball).
    fn domain_radius(ctx: &Self::Ctx) -> f64;

    /// The canonical deterministic sample set used for sup norms and Hölder
    /// seminorms on this backend.
    fn sample_points(ctx: &Self::Ctx) -> Vec<Vec<Complex64>>;

    /// Values at `sample_points`, in the same order.
    fn sample_values(&self) -> Vec<Complex64>;

    /// Inverts a square `rows x rows` matrix (row-major `entries`) that is a
    /// unit of the coefficient ring: invertible constant term on the series
    /// backend, invertible sample matrices on the grid backend.
    fn invert_unit_matrix(ctx: &Self::Ctx, rows: usize, entries: &[Self]) -> Result<Vec<Self>>;
}

/// Operator 2-norm of a complex `rows x cols` matrix given row-major.
///
/// Vectors use the exact Euclidean norm; 2x2 matrices use the closed-form
/// largest singular value; larger shapes fall back to a fixed-iteration power
/// method on AᴴA (deterministic start, so diagnostics are reproducible).
pub fn operator_norm(rows: usize, cols: usize, a: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), rows * cols);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if rows == 1 || cols == 1 {
        return a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    }
    if rows == 2 && cols == 2 {
        let t = a.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let det = a[0] * a[3] - a[1] * a[2];
        let d = det.norm_sqr();
        let disc = (t * t - 4.0 * d).max(0.0).sqrt();
        return ((t + disc) / 2.0).max(0.0).sqrt();
    }
    // Power iteration on AᴴA.
    let mut v = vec![Complex64::new(1.0, 0.0); cols];
    let mut norm = 0.0;
    for _ in 0..100 {
        // w = A v
        let mut w = vec![Complex64::new(0.0, 0.0); rows];
        for i in 0..rows {
            for j in 0..cols {
                w[i] += a[i * cols + j] * v[j];
            }
        }
        // v' = Aᴴ w
        let mut v2 = vec![Complex64::new(0.0, 0.0); cols];
        for i in 0..rows {
            for j in 0..cols {
                v2[j] += a[i * cols + j].conj() * w[i];
            }
        }
        let len = v2.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if len == 0.0 {
            return 0.0;
        }
        for x in v2.iter_mut() {
            *x /= len;
        }
        let new_norm = len.sqrt();
        if (new_norm - norm).abs() <= 1e-14 * new_norm.max(1.0) {
            return new_norm;
        }
        norm = new_norm;
        v = v2;
    }
    norm
}

/// Gauss-Jordan inverse of a complex matrix; `None` when a pivot collapses.
pub fn invert_complex_matrix(n: usize, a: &[Complex64]) -> Option<Vec<Complex64>> {
    let mut m = a.to_vec();
    let mut inv: Vec<Complex64> = (0..n * n)
        .map(|i| {
            if i / n == i % n {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                m[r1 * n + col]
                    .norm_sqr()
                    .partial_cmp(&m[r2 * n + col].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        if m[pivot_row * n + col].norm_sqr() < 1e-28 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
                inv.swap(col * n + j, pivot_row * n + j);
            }
        }
        let p = m[col * n + col];
        for j in 0..n {
            m[col * n + j] /= p;
            inv[col * n + j] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                let mv = m[col * n + j];
                let iv = inv[col * n + j];
                m[r * n + j] -= f * mv;
                inv[r * n + j] -= f * iv;
            }
        }
    }
    Some(inv)
}
