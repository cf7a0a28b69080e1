//! q-Pochhammer symbols, basic hypergeometric series, the very-well-poised
//! 8W7 sum, the q-Airy function, and the quartic theta function.
//!
//! Conventions: for 0 < q < 1,
//!   (a;q)_n   = prod_{k=0}^{n-1} (1 - a q^k),
//!   (a;q)_inf = prod_{k>=0} (1 - a q^k),
//! and the r-phi-s series carries the damping factor
//! [(-1)^k q^(k(k-1)/2)]^(1+s-r), so series with r <= s converge for every
//! argument while r = s+1 requires |z| < 1.

use crate::error::{QawError, Result};
use crate::numctx::{Complex, PrecisionContext};
use rug::Float;

/// Hard cap on series terms; reaching it is reported as a truncation
/// failure rather than silently returning a partial sum.
const MAX_TERMS: usize = 200_000;

/// Finite product (a;q)_n.
pub fn qpoch_finite(a: &Complex, q: &Float, n: u32, ctx: &PrecisionContext) -> Complex {
    let p = ctx.prec();
    let mut acc = Complex::one(p);
    let mut aq = Complex {
        re: Float::with_val(p, &a.re),
        im: Float::with_val(p, &a.im),
    };
    for _ in 0..n {
        acc = &acc * &aq.one_minus();
        aq = aq.mul_f(q);
    }
    acc
}

/// Finite product over several first arguments: (a1, ..., am; q)_n.
pub fn qpoch_finite_list(list: &[Complex], q: &Float, n: u32, ctx: &PrecisionContext) -> Complex {
    let mut acc = Complex::one(ctx.prec());
    for a in list {
        acc = &acc * &qpoch_finite(a, q, n, ctx);
    }
    acc
}

/// Real-argument finite product (a;q)_n.
pub fn qpoch_finite_f(a: &Float, q: &Float, n: u32, ctx: &PrecisionContext) -> Float {
    let p = ctx.prec();
    let mut acc = Float::with_val(p, 1);
    let mut aq = Float::with_val(p, a);
    for _ in 0..n {
        acc *= Float::with_val(p, 1 - &aq);
        aq *= q;
    }
    acc
}

fn infinite_cutoff(q: &Float, ctx: &PrecisionContext) -> Float {
    // Remaining log-tail after stopping at |a q^K| < cutoff is below
    // cutoff / (1 - q), so shave the tolerance by that factor and a margin.
    let p = ctx.prec();
    let mut c = Float::with_val(p, 1 - q);
    c *= ctx.series_tol();
    c /= 4u32;
    c
}

/// Infinite product (a;q)_inf, truncated when |a q^K| falls below the
/// series tolerance scaled by (1-q).
pub fn qpoch_infinite(a: &Complex, q: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    ctx.check_base(q)?;
    let p = ctx.prec();
    let cutoff = infinite_cutoff(q, ctx);
    let mut acc = Complex::one(p);
    let mut aq = Complex {
        re: Float::with_val(p, &a.re),
        im: Float::with_val(p, &a.im),
    };
    for k in 0..MAX_TERMS {
        if aq.abs() < cutoff {
            return Ok(acc);
        }
        let f = aq.one_minus();
        if f.is_zero() {
            return Ok(Complex::zero(p));
        }
        acc = &acc * &f;
        aq = aq.mul_f(q);
        if k + 1 == MAX_TERMS {
            break;
        }
    }
    Err(QawError::TruncationFailure(
        "infinite q-Pochhammer did not reach tolerance".into(),
    ))
}

/// Infinite product over several first arguments.
pub fn qpoch_infinite_list(
    list: &[Complex],
    q: &Float,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let mut acc = Complex::one(ctx.prec());
    for a in list {
        acc = &acc * &qpoch_infinite(a, q, ctx)?;
    }
    Ok(acc)
}

/// Real-argument infinite product (a;q)_inf.
pub fn qpoch_infinite_f(a: &Float, q: &Float, ctx: &PrecisionContext) -> Result<Float> {
    ctx.check_base(q)?;
    let p = ctx.prec();
    let cutoff = infinite_cutoff(q, ctx);
    let mut acc = Float::with_val(p, 1);
    let mut aq = Float::with_val(p, a);
    for k in 0..MAX_TERMS {
        let mag = Float::with_val(p, aq.abs_ref());
        if mag < cutoff {
            return Ok(acc);
        }
        let f = Float::with_val(p, 1 - &aq);
        if f.is_zero() {
            return Ok(Float::new(p));
        }
        acc *= f;
        aq *= q;
        if k + 1 == MAX_TERMS {
            break;
        }
    }
    Err(QawError::TruncationFailure(
        "infinite q-Pochhammer did not reach tolerance".into(),
    ))
}

/// A basic hypergeometric series r-phi-s: numerator and denominator
/// parameters, base, argument, and an optional explicit termination order
/// (used when a numerator parameter is a negative q-power).
#[derive(Clone, Debug)]
pub struct PhiSpec {
    pub num: Vec<Complex>,
    pub den: Vec<Complex>,
    pub q: Float,
    pub z: Complex,
    pub terminating: Option<u32>,
}

/// Evaluates an r-phi-s series.
///
/// Terminating series sum exactly `terminating + 1` terms. Nonterminating
/// series require r <= s+1, and |z| < 1 when r = s+1; summation stops once
/// three consecutive terms fall below the series tolerance relative to the
/// partial sum. A vanishing denominator factor ahead of natural termination
/// is reported as a pole.
pub fn phi_eval(spec: &PhiSpec, ctx: &PrecisionContext) -> Result<Complex> {
    ctx.check_base(&spec.q)?;
    let p = ctx.prec();
    let r = spec.num.len() as i64;
    let s = spec.den.len() as i64;
    let e = 1 + s - r;
    if spec.terminating.is_none() {
        if e < 0 {
            return Err(QawError::Divergence(format!(
                "nonterminating series with {r} numerator and {s} denominator parameters"
            )));
        }
        if e == 0 && spec.z.abs() >= 1u32 {
            return Err(QawError::Divergence(
                "balanced series requires |z| < 1".into(),
            ));
        }
    }

    let kmax = spec.terminating.map(|n| n as usize);
    let mut num_q: Vec<Complex> = spec.num.iter().map(|a| a.clone()).collect();
    let mut den_q: Vec<Complex> = spec.den.iter().map(|b| b.clone()).collect();
    let mut qk1 = Float::with_val(p, &spec.q); // q^(k+1)
    let mut qk = Float::with_val(p, 1); // q^k
    let mut term = Complex::one(p);
    let mut sum = Complex::zero(p);
    let mut small_streak = 0;

    for k in 0..MAX_TERMS {
        sum = &sum + &term;
        if let Some(n) = kmax {
            if k == n {
                return Ok(sum);
            }
        } else {
            let mut scale = sum.abs();
            if scale < 1u32 {
                scale = Float::with_val(p, 1);
            }
            scale *= ctx.series_tol();
            if term.abs() < scale {
                small_streak += 1;
                if small_streak >= 3 && k > 4 {
                    return Ok(sum);
                }
            } else {
                small_streak = 0;
            }
        }

        // term_{k+1} = term_k * prod(1 - a q^k) / [prod(1 - b q^k) (1 - q^{k+1})]
        //            * z * [(-1) q^k]^e
        let mut ratio = Complex::one(p);
        let mut terminated = false;
        for a in num_q.iter_mut() {
            let f = a.one_minus();
            if f.is_zero() {
                terminated = true;
            }
            ratio = &ratio * &f;
            *a = a.mul_f(&spec.q);
        }
        if terminated {
            return Ok(sum);
        }
        for b in den_q.iter_mut() {
            let f = b.one_minus();
            if f.is_zero() {
                return Err(QawError::Pole(format!(
                    "denominator parameter times q^{k} equals 1"
                )));
            }
            ratio = &ratio / &f;
            *b = b.mul_f(&spec.q);
        }
        let denom = Float::with_val(p, 1 - &qk1);
        if denom.is_zero() {
            return Err(QawError::Pole(format!("(q;q)_{} factor vanishes", k + 1)));
        }
        ratio = ratio.div_f(&denom);
        ratio = &ratio * &spec.z;
        if e != 0 {
            let mut damp = Complex::from_real(Float::with_val(p, &qk));
            damp.re = -damp.re;
            ratio = &ratio * &damp.powi(e);
        }
        term = &term * &ratio;
        qk1 *= &spec.q;
        qk *= &spec.q;
    }
    Err(QawError::TruncationFailure(
        "phi series did not reach tolerance".into(),
    ))
}

/// Very-well-poised 8W7(a; b1..b5; q, z) =
/// sum_k (1 - a q^{2k})/(1 - a) (a, b1..b5; q)_k / [(q, aq/b1..aq/b5; q)_k] z^k.
pub fn w87_eval(
    a: &Complex,
    bs: &[Complex; 5],
    q: &Float,
    z: &Complex,
    terminating: Option<u32>,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    ctx.check_base(q)?;
    let p = ctx.prec();
    let one_minus_a = a.one_minus();
    if one_minus_a.is_zero() {
        return Err(QawError::Pole("well-poised head requires a != 1".into()));
    }
    if terminating.is_none() && z.abs() >= 1u32 {
        return Err(QawError::Divergence(
            "nonterminating 8W7 requires |z| < 1".into(),
        ));
    }

    let mut aq2k = Complex {
        re: Float::with_val(p, &a.re),
        im: Float::with_val(p, &a.im),
    }; // a q^{2k}
    let q2 = Float::with_val(p, q * q);
    let mut a_q = aq2k.clone(); // a q^k
    let mut b_q: Vec<Complex> = bs.iter().map(|b| b.clone()).collect();
    let mut c_q: Vec<Complex> = bs
        .iter()
        .map(|b| {
            let aq = a.mul_f(q);
            &aq / b
        })
        .collect(); // (a q / b_i) q^k
    let mut qk1 = Float::with_val(p, q);
    let mut term = Complex::one(p);
    let mut sum = Complex::zero(p);
    let mut small_streak = 0;
    let kmax = terminating.map(|n| n as usize);

    for k in 0..MAX_TERMS {
        let head = &aq2k.one_minus() / &one_minus_a;
        let contrib = &head * &term;
        sum = &sum + &contrib;
        if let Some(n) = kmax {
            if k == n {
                return Ok(sum);
            }
        } else {
            let mut scale = sum.abs();
            if scale < 1u32 {
                scale = Float::with_val(p, 1);
            }
            scale *= ctx.series_tol();
            if contrib.abs() < scale {
                small_streak += 1;
                if small_streak >= 3 && k > 4 {
                    return Ok(sum);
                }
            } else {
                small_streak = 0;
            }
        }

        let mut ratio = a_q.one_minus();
        let mut terminated = ratio.is_zero();
        for b in b_q.iter_mut() {
            let f = b.one_minus();
            if f.is_zero() {
                terminated = true;
            }
            ratio = &ratio * &f;
            *b = b.mul_f(q);
        }
        if terminated {
            return Ok(sum);
        }
        for c in c_q.iter_mut() {
            let f = c.one_minus();
            if f.is_zero() {
                return Err(QawError::Pole(format!(
                    "8W7 denominator parameter times q^{k} equals 1"
                )));
            }
            ratio = &ratio / &f;
            *c = c.mul_f(q);
        }
        let denom = Float::with_val(p, 1 - &qk1);
        ratio = ratio.div_f(&denom);
        ratio = &ratio * z;
        term = &term * &ratio;
        a_q = a_q.mul_f(q);
        aq2k = aq2k.mul_f(&q2);
        qk1 *= q;
    }
    Err(QawError::TruncationFailure(
        "8W7 series did not reach tolerance".into(),
    ))
}

/// q-Airy function A_q(z) = sum_n q^{n^2} (-z)^n / (q;q)_n. Entire in z.
pub fn ramanujan_aq(z: &Complex, q: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    ctx.check_base(q)?;
    let p = ctx.prec();
    let mut term = Complex::one(p);
    let mut sum = Complex::zero(p);
    let neg_z = -z;
    let mut q2n1 = Float::with_val(p, q); // q^{2n+1}
    let q2 = Float::with_val(p, q * q);
    let mut qn1 = Float::with_val(p, q); // q^{n+1}
    let mut small_streak = 0;
    for _ in 0..MAX_TERMS {
        sum = &sum + &term;
        let mut scale = sum.abs();
        if scale < 1u32 {
            scale = Float::with_val(p, 1);
        }
        scale *= ctx.series_tol();
        if term.abs() < scale {
            small_streak += 1;
            if small_streak >= 3 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
        let denom = Float::with_val(p, 1 - &qn1);
        term = &term * &neg_z;
        term = term.mul_f(&q2n1).div_f(&denom);
        q2n1 *= &q2;
        qn1 *= q;
    }
    Err(QawError::TruncationFailure(
        "q-Airy series did not reach tolerance".into(),
    ))
}

/// Quartic theta function via the triple product,
/// theta4(w;q) = (q^2; q^2)_inf (q/w; q^2)_inf (q w; q^2)_inf.
pub fn theta4_product(w: &Complex, q: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    ctx.check_base(q)?;
    if w.is_zero() {
        return Err(QawError::InvalidArgument("theta4 requires w != 0".into()));
    }
    let p = ctx.prec();
    let q2 = Float::with_val(p, q * q);
    let w_inv = w.recip();
    let a1 = Complex::from_real(Float::with_val(p, &q2));
    let a2 = w_inv.mul_f(q);
    let a3 = w.mul_f(q);
    qpoch_infinite_list(&[a1, a2, a3], &q2, ctx)
}

/// Quartic theta function as the bilateral sum
/// sum_{n in Z} (-1)^n q^{n^2} w^n, truncated symmetrically.
pub fn theta4_sum(w: &Complex, q: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    ctx.check_base(q)?;
    if w.is_zero() {
        return Err(QawError::InvalidArgument("theta4 requires w != 0".into()));
    }
    let p = ctx.prec();
    let w_inv = w.recip();
    let mut sum = Complex::one(p);
    let mut wp = Complex::one(p); // w^n
    let mut wm = Complex::one(p); // w^{-n}
    let mut qn2 = Float::with_val(p, 1); // q^{n^2}
    let mut qodd = Float::with_val(p, q); // q^{2n+1}
    let q2 = Float::with_val(p, q * q);
    let mut sign = 1i32;
    for n in 1..MAX_TERMS {
        wp = &wp * w;
        wm = &wm * &w_inv;
        qn2 *= &qodd; // q^{n^2} from q^{(n-1)^2} * q^{2n-1}
        qodd *= &q2;
        sign = -sign;
        let mut shell = &wp + &wm;
        shell = shell.mul_f(&qn2);
        if sign < 0 {
            shell = -shell;
        }
        sum = &sum + &shell;
        let mut scale = sum.abs();
        if scale < 1u32 {
            scale = Float::with_val(p, 1);
        }
        scale *= ctx.series_tol();
        if shell.abs() < scale && n > 3 {
            return Ok(sum);
        }
    }
    Err(QawError::TruncationFailure(
        "theta4 sum did not reach tolerance".into(),
    ))
}
