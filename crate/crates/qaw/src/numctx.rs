//! Working precision, complex arithmetic, and the quadratic curve maps.
//!
//! Everything in this crate computes with MPFR floats at a precision derived
//! from a requested decimal digit count. Complex values are pairs of such
//! floats. The curve map connects a point x to the two roots z of
//! z^2 - 2xz - 1 = 0, so that 2x = z - 1/z; the roots satisfy z1*z2 = -1.

use crate::error::{QawError, Result};
use rug::ops::Pow;
use rug::Float;

/// Smallest supported decimal precision.
pub const MIN_DIGITS: u32 = 16;

/// Guard digits added on top of the requested precision. Internal sums and
/// products cancel at most a handful of digits at the scales exercised here;
/// twenty decimal guard digits keep the final rounding well below the
/// reported tolerances.
const GUARD_DIGITS: u32 = 20;

/// Decimal precision together with the derived bit precision and the
/// tolerances used by series truncation and quadrature.
#[derive(Clone, Debug)]
pub struct PrecisionContext {
    digits: u32,
    prec: u32,
    series_tol: Float,
    quad_tol: Float,
}

impl PrecisionContext {
    /// Builds a context for `digits` decimal digits. Fails below
    /// [`MIN_DIGITS`].
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(QawError::InvalidPrecision {
                digits,
                min: MIN_DIGITS,
            });
        }
        let prec = (f64::from(digits + GUARD_DIGITS) * std::f64::consts::LOG2_10).ceil() as u32;
        let ten = Float::with_val(prec, 10);
        let series_tol = ten.clone().pow(-(digits as i32));
        let quad_tol = ten.pow(Float::with_val(prec, -f64::from(digits) / 2.0));
        Ok(Self {
            digits,
            prec,
            series_tol,
            quad_tol,
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Working precision in bits.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Truncation tolerance for series and infinite products: 10^(-digits).
    pub fn series_tol(&self) -> &Float {
        &self.series_tol
    }

    /// Tolerance for line quadrature: 10^(-digits/2).
    pub fn quad_tol(&self) -> &Float {
        &self.quad_tol
    }

    /// A float at working precision.
    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec, v)
    }

    /// Parses a decimal string at working precision.
    pub fn float_from_str(&self, s: &str) -> Result<Float> {
        let parsed = Float::parse(s)
            .map_err(|e| QawError::InvalidArgument(format!("cannot parse '{s}' as a real: {e}")))?;
        Ok(Float::with_val(self.prec, parsed))
    }

    /// A complex value at working precision.
    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::from_f64(re, im, self.prec)
    }

    /// Checks that a base q lies strictly inside (0, 1).
    pub fn check_base(&self, q: &Float) -> Result<()> {
        if !q.is_finite() || *q <= 0u32 || *q >= 1u32 {
            return Err(QawError::InvalidBase { q: q.to_string() });
        }
        Ok(())
    }
}

/// Complex number as a pair of MPFR floats.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, 1),
            im: Float::new(prec),
        }
    }

    /// The imaginary unit.
    pub fn i(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::with_val(prec, 1),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self {
            re,
            im: Float::new(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    /// |z|, computed as a hypotenuse to avoid spurious overflow.
    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_sqr(&self) -> Float {
        let p = self.prec();
        let mut t = Float::with_val(p, &self.re * &self.re);
        t += Float::with_val(p, &self.im * &self.im);
        t
    }

    /// 1 - self. Convenient for q-Pochhammer factors.
    pub fn one_minus(&self) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, 1 - &self.re),
            im: Float::with_val(p, -&self.im),
        }
    }

    pub fn add_real(&self, r: &Float) -> Self {
        let p = self.prec().max(r.prec());
        Self {
            re: Float::with_val(p, &self.re + r),
            im: Float::with_val(p, &self.im),
        }
    }

    pub fn mul_f(&self, r: &Float) -> Self {
        let p = self.prec().max(r.prec());
        Self {
            re: Float::with_val(p, &self.re * r),
            im: Float::with_val(p, &self.im * r),
        }
    }

    pub fn div_f(&self, r: &Float) -> Self {
        let p = self.prec().max(r.prec());
        Self {
            re: Float::with_val(p, &self.re / r),
            im: Float::with_val(p, &self.im / r),
        }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let d = self.abs_sqr();
        Self {
            re: Float::with_val(p, &self.re / &d),
            im: -Float::with_val(p, &self.im / &d),
        }
    }

    /// Principal square root (nonnegative real part).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.im.is_zero() {
            if self.re >= 0u32 {
                return Self {
                    re: Float::with_val(p, self.re.sqrt_ref()),
                    im: Float::new(p),
                };
            }
            let neg = Float::with_val(p, -&self.re);
            return Self {
                re: Float::new(p),
                im: neg.sqrt(),
            };
        }
        let r = self.abs();
        if self.re >= 0u32 {
            let mut u = Float::with_val(p, &r + &self.re);
            u /= 2u32;
            let u = u.sqrt();
            let mut v = Float::with_val(p, &self.im / &u);
            v /= 2u32;
            Self { re: u, im: v }
        } else {
            let mut t = Float::with_val(p, &r - &self.re);
            t /= 2u32;
            let mut t = t.sqrt();
            if self.im.is_sign_negative() {
                t = -t;
            }
            let mut u = Float::with_val(p, &self.im / &t);
            u /= 2u32;
            Self { re: u, im: t }
        }
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        if n == 0 {
            return Self::one(p);
        }
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

macro_rules! forward_owned_binop {
    ($imp:ident, $method:ident) => {
        impl std::ops::$imp<Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$imp<&Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: &Complex) -> Complex {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$imp<Complex> for &Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                self.$method(&rhs)
            }
        }
    };
}

impl std::ops::Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        let p = self.prec().max(rhs.prec());
        Complex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl std::ops::Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        let p = self.prec().max(rhs.prec());
        Complex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl std::ops::Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let p = self.prec().max(rhs.prec());
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re -= Float::with_val(p, &self.im * &rhs.im);
        let mut im = Float::with_val(p, &self.re * &rhs.im);
        im += Float::with_val(p, &self.im * &rhs.re);
        Complex { re, im }
    }
}

impl std::ops::Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        let p = self.prec().max(rhs.prec());
        let d = rhs.abs_sqr();
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re += Float::with_val(p, &self.im * &rhs.im);
        re /= &d;
        let mut im = Float::with_val(p, &self.im * &rhs.re);
        im -= Float::with_val(p, &self.re * &rhs.im);
        im /= &d;
        Complex { re, im }
    }
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl std::ops::Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, -&self.re),
            im: Float::with_val(p, -&self.im),
        }
    }
}

impl std::ops::Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -&self
    }
}

/// |a - b|.
pub fn dist(a: &Complex, b: &Complex) -> Float {
    (a - b).abs()
}

/// |v - target| / |target|, falling back to the absolute error when the
/// target vanishes.
pub fn rel_error(v: &Complex, target: &Complex) -> Float {
    let d = dist(v, target);
    let scale = target.abs();
    if scale.is_zero() {
        d
    } else {
        d / scale
    }
}

/// Same for reals.
pub fn rel_error_f(v: &Float, target: &Float) -> Float {
    let p = v.prec().max(target.prec());
    let d = Float::with_val(p, v - target).abs();
    let scale = Float::with_val(p, target.abs_ref());
    if scale.is_zero() {
        d
    } else {
        d / scale
    }
}

/// The two roots of z^2 - 2xz - 1 = 0 attached to a point x.
///
/// `z_small` and `z_big` are ordered by modulus and satisfy
/// z_small * z_big = -1. `z_pos` is the branch x + sqrt(x^2 + 1), which is
/// positive when x is real. At x = ±i the roots collide and `degenerate`
/// is set.
#[derive(Clone, Debug)]
pub struct ZPoint {
    pub z_small: Complex,
    pub z_big: Complex,
    pub z_pos: Complex,
    pub degenerate: bool,
}

/// Solves 2x = z - 1/z for z, picking the larger-modulus root by the
/// numerically stable sign choice and recovering the other as -1/z.
pub fn zpoint_from_x(x: &Complex, ctx: &PrecisionContext) -> ZPoint {
    let p = ctx.prec();
    let one = Complex::one(p);
    let disc = &(x * x) + &one;
    let s = disc.sqrt();

    // Degenerate when x^2 + 1 vanishes at working tolerance.
    let mut scale = x.abs_sqr();
    scale += 1u32;
    let mut thr = Float::with_val(p, ctx.series_tol());
    thr *= &scale;
    let degenerate = disc.abs() < thr;

    // Re(x * conj(s)) decides which sign combination avoids cancellation.
    let mut dot = Float::with_val(p, &x.re * &s.re);
    dot += Float::with_val(p, &x.im * &s.im);

    let (z_big, z_pos) = if dot >= 0u32 {
        let big = x + &s;
        let pos = big.clone();
        (big, pos)
    } else {
        let big = x - &s;
        let pos = -big.recip();
        (big, pos)
    };
    let z_small = -z_big.recip();
    ZPoint {
        z_small,
        z_big,
        z_pos,
        degenerate,
    }
}

/// The inverse map x = (z - 1/z)/2.
pub fn x_from_z(z: &Complex) -> Complex {
    let half = Float::with_val(z.prec(), 0.5);
    (z - &z.recip()).mul_f(&half)
}

/// Formats a float as a normalized decimal-scientific string with `digits`
/// significant digits, e.g. "2.8878809508e-1". Deterministic for equal
/// inputs.
pub fn format_decimal(f: &Float, digits: usize) -> String {
    if f.is_nan() {
        return "nan".into();
    }
    if f.is_infinite() {
        return if f.is_sign_negative() { "-inf" } else { "inf" }.into();
    }
    if f.is_zero() {
        return "0".into();
    }
    let digits = digits.max(1);
    let (neg, ds, exp) = f.to_sign_string_exp(10, Some(digits));
    let exp = exp.unwrap_or(0) - 1;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&ds[..1]);
    if ds.len() > 1 {
        out.push('.');
        out.push_str(&ds[1..]);
    }
    out.push('e');
    out.push_str(&exp.to_string());
    out
}

/// Removes trailing zeros from the mantissa of a decimal-scientific string
/// and drops a zero exponent, so "1.0300e0" becomes "1.03" and "1.000e0"
/// becomes "1". Strings without an exponent pass through unchanged.
pub fn trim_decimal(s: &str) -> String {
    let Some((mant, exp)) = s.split_once('e') else {
        return s.into();
    };
    let mant = if mant.contains('.') {
        mant.trim_end_matches('0').trim_end_matches('.')
    } else {
        mant
    };
    if exp == "0" {
        mant.into()
    } else {
        format!("{mant}e{exp}")
    }
}

/// `format_decimal` with the cosmetic noise trimmed; the form used for
/// user-facing values.
pub fn format_decimal_trimmed(f: &Float, digits: usize) -> String {
    trim_decimal(&format_decimal(f, digits))
}

/// Formats a complex value as "re" or "re + im i" / "re - im i".
pub fn format_complex(c: &Complex, digits: usize) -> String {
    if c.im.is_zero() {
        return format_decimal(&c.re, digits);
    }
    let im_abs = Float::with_val(c.im.prec(), c.im.abs_ref());
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!(
        "{} {} {}i",
        format_decimal(&c.re, digits),
        sign,
        format_decimal(&im_abs, digits)
    )
}
