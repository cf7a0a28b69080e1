//! The two polynomial families and their structural identities.
//!
//! `p_n` carries four parameters and is orthogonal on the real line for
//! finitely many degrees; `V_n` carries three parameters and belongs to an
//! indeterminate moment problem. Both are defined here through terminating
//! basic hypergeometric series, evaluated either directly or through their
//! three-term recurrences, together with parameter-connection coefficients,
//! generating-function residuals, and real zeros of `V_n`.

use rug::ops::Pow;
use rug::Float;

use crate::error::{QawError, Result};
use crate::numctx::{dist, zpoint_from_x, Complex, PrecisionContext};
use crate::qseries::{phi_eval, qpoch_finite, qpoch_finite_list, PhiSpec};

/// Parameters of the finite family: a base and four nonzero values.
#[derive(Clone, Debug)]
pub struct FiniteParams {
    pub q: Float,
    pub t: [Complex; 4],
}

/// Parameters of the infinite family: a base and three nonzero values.
#[derive(Clone, Debug)]
pub struct InfiniteParams {
    pub q: Float,
    pub t: [Complex; 3],
}

fn check_params(q: &Float, t: &[Complex], ctx: &PrecisionContext) -> Result<()> {
    ctx.check_base(q)?;
    for (j, tj) in t.iter().enumerate() {
        if tj.is_zero() || !tj.is_finite() {
            return Err(QawError::InvalidArgument(format!(
                "parameter t{} must be nonzero and finite",
                j + 1
            )));
        }
    }
    Ok(())
}

impl FiniteParams {
    pub fn new(q: Float, t: [Complex; 4], ctx: &PrecisionContext) -> Result<Self> {
        check_params(&q, &t, ctx)?;
        Ok(Self { q, t })
    }

    /// Builds parameters from decimal strings for real values.
    pub fn from_decimal_strs(q: &str, t: [&str; 4], ctx: &PrecisionContext) -> Result<Self> {
        let qf = ctx.float_from_str(q)?;
        let tv: Result<Vec<Complex>> = t
            .iter()
            .map(|s| Ok(Complex::from_real(ctx.float_from_str(s)?)))
            .collect();
        let tv = tv?;
        Self::new(qf, [tv[0].clone(), tv[1].clone(), tv[2].clone(), tv[3].clone()], ctx)
    }

    /// Product of the four parameters.
    pub fn sigma4(&self) -> Complex {
        &(&self.t[0] * &self.t[1]) * &(&self.t[2] * &self.t[3])
    }

    /// Largest N with |t1 t2 t3 t4| < q^{2N+3}, the count of fully
    /// orthogonal degrees beyond degree zero; `None` when even N = 0 fails.
    pub fn n_orth(&self) -> Option<u32> {
        let s = self.sigma4().abs();
        let p = self.q.prec();
        let mut n = 0u32;
        let holds = |m: u32| -> bool {
            let bound = Float::with_val(p, (&self.q).pow(2 * m + 3));
            s < bound
        };
        if !holds(0) {
            return None;
        }
        while n < 1_000_000 && holds(n + 1) {
            n += 1;
        }
        Some(n)
    }

    /// Same family with every parameter multiplied by `f`.
    pub fn rescaled(&self, f: &Float) -> Self {
        Self {
            q: self.q.clone(),
            t: [
                self.t[0].mul_f(f),
                self.t[1].mul_f(f),
                self.t[2].mul_f(f),
                self.t[3].mul_f(f),
            ],
        }
    }

    /// Same family with parameters permuted by index.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        Self {
            q: self.q.clone(),
            t: [
                self.t[perm[0]].clone(),
                self.t[perm[1]].clone(),
                self.t[perm[2]].clone(),
                self.t[perm[3]].clone(),
            ],
        }
    }
}

impl InfiniteParams {
    pub fn new(q: Float, t: [Complex; 3], ctx: &PrecisionContext) -> Result<Self> {
        check_params(&q, &t, ctx)?;
        Ok(Self { q, t })
    }

    pub fn from_decimal_strs(q: &str, t: [&str; 3], ctx: &PrecisionContext) -> Result<Self> {
        let qf = ctx.float_from_str(q)?;
        let tv: Result<Vec<Complex>> = t
            .iter()
            .map(|s| Ok(Complex::from_real(ctx.float_from_str(s)?)))
            .collect();
        let tv = tv?;
        Self::new(qf, [tv[0].clone(), tv[1].clone(), tv[2].clone()], ctx)
    }

    /// Adjoins a fourth parameter, giving the finite family these
    /// parameters degenerate from as t4 -> 0.
    pub fn with_fourth(&self, t4: &Complex, ctx: &PrecisionContext) -> Result<FiniteParams> {
        FiniteParams::new(
            self.q.clone(),
            [
                self.t[0].clone(),
                self.t[1].clone(),
                self.t[2].clone(),
                t4.clone(),
            ],
            ctx,
        )
    }

    pub fn rescaled(&self, f: &Float) -> Self {
        Self {
            q: self.q.clone(),
            t: [
                self.t[0].mul_f(f),
                self.t[1].mul_f(f),
                self.t[2].mul_f(f),
            ],
        }
    }

    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Self {
            q: self.q.clone(),
            t: [
                self.t[perm[0]].clone(),
                self.t[perm[1]].clone(),
                self.t[perm[2]].clone(),
            ],
        }
    }
}

/// q^e as a Float at the precision of `q`.
pub(crate) fn qpow(e: i64, q: &Float) -> Float {
    Float::with_val(q.prec(), q.pow(e as i32))
}

/// q^e / den.
pub(crate) fn q_over(e: i64, den: &Complex, q: &Float) -> Complex {
    den.recip().mul_f(&qpow(e, q))
}

/// -q^e / den.
pub(crate) fn neg_q_over(e: i64, den: &Complex, q: &Float) -> Complex {
    -q_over(e, den, q)
}

pub(crate) fn one_plus(w: &Complex) -> Complex {
    Complex::one(w.prec()) + w
}

// ---------------------------------------------------------------------------
// Series definitions
// ---------------------------------------------------------------------------

/// p_n(x) through its terminating 4phi3 representation.
pub fn pn_series(
    n: u32,
    x: &Complex,
    par: &FiniteParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let zp = zpoint_from_x(x, ctx);
    pn_series_at_z(n, &zp.z_pos, par, ctx)
}

fn pn_series_at_z(
    n: u32,
    z: &Complex,
    par: &FiniteParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let q = &par.q;
    let [t1, t2, t3, t4] = &par.t;
    let s4 = par.sigma4();
    let e12 = neg_q_over(2, &(t1 * t2), q);
    let e13 = neg_q_over(2, &(t1 * t3), q);
    let e14 = neg_q_over(2, &(t1 * t4), q);
    let pref = t1.div_f(q).powi(n as i64)
        * qpoch_finite_list(&[e12.clone(), e13.clone(), e14.clone()], q, n, ctx);
    let spec = PhiSpec {
        num: vec![
            Complex::from_real(qpow(-(n as i64), q)),
            q_over(n as i64 + 3, &s4, q),
            neg_q_over(1, &(t1 * z), q),
            (z / t1).mul_f(q),
        ],
        den: vec![e12, e13, e14],
        q: q.clone(),
        z: Complex::from_real(q.clone()),
        terminating: Some(n),
    };
    Ok(&pref * &phi_eval(&spec, ctx)?)
}

/// V_n(x) through its terminating 3phi2 representation.
pub fn vn_series(
    n: u32,
    x: &Complex,
    par: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let zp = zpoint_from_x(x, ctx);
    vn_series_at_z(n, &zp.z_pos, par, ctx)
}

fn vn_series_at_z(
    n: u32,
    z: &Complex,
    par: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let q = &par.q;
    let [t1, t2, t3] = &par.t;
    let e13 = neg_q_over(2, &(t1 * t3), q);
    let e23 = neg_q_over(2, &(t2 * t3), q);
    let den23 = qpoch_finite(&e23, q, n, ctx);
    if den23.is_zero() {
        return Err(QawError::CoefficientSingularity(
            "normalization (-q^2/t2t3; q)_n vanishes".into(),
        ));
    }
    let pref = t1.div_f(q).powi(n as i64) * qpoch_finite(&e13, q, n, ctx) / den23;
    Ok(&pref * &vn_phi_at_z(n, z, par, ctx)?)
}

/// The symmetric renormalization of V_n: the same 3phi2 divided by
/// (-q^2/t2t3; q)_n, invariant under all parameter permutations.
pub fn vn_tilde_series(
    n: u32,
    x: &Complex,
    par: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let zp = zpoint_from_x(x, ctx);
    let q = &par.q;
    let [_, t2, t3] = &par.t;
    let e23 = neg_q_over(2, &(t2 * t3), q);
    let den23 = qpoch_finite(&e23, q, n, ctx);
    if den23.is_zero() {
        return Err(QawError::CoefficientSingularity(
            "normalization (-q^2/t2t3; q)_n vanishes".into(),
        ));
    }
    Ok(&vn_phi_at_z(n, &zp.z_pos, par, ctx)? / &den23)
}

fn vn_phi_at_z(
    n: u32,
    z: &Complex,
    par: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let q = &par.q;
    let [t1, t2, t3] = &par.t;
    let spec = PhiSpec {
        num: vec![
            Complex::from_real(qpow(-(n as i64), q)),
            neg_q_over(1, &(t1 * z), q),
            (z / t1).mul_f(q),
        ],
        den: vec![
            neg_q_over(2, &(t1 * t3), q),
            neg_q_over(2, &(t1 * t2), q),
        ],
        q: q.clone(),
        z: neg_q_over(n as i64 + 2, &(t2 * t3), q),
        terminating: Some(n),
    };
    phi_eval(&spec, ctx)
}

/// V_n as the t4 -> 0 degeneration: p_n at (t1,t2,t3,t4) divided by
/// (-q^2/t1t4; q)_n (-q^2/t1t2; q)_n (-q^2/t2t3; q)_n, evaluated at a
/// concrete small t4.
pub fn vn_from_pn_limit(
    n: u32,
    x: &Complex,
    par: &InfiniteParams,
    t4: &Complex,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let fin = par.with_fourth(t4, ctx)?;
    let q = &par.q;
    let [t1, t2, t3] = &par.t;
    let norm = qpoch_finite_list(
        &[
            neg_q_over(2, &(t1 * t4), q),
            neg_q_over(2, &(t1 * t2), q),
            neg_q_over(2, &(t2 * t3), q),
        ],
        q,
        n,
        ctx,
    );
    if norm.is_zero() {
        return Err(QawError::CoefficientSingularity(
            "degeneration normalization vanishes".into(),
        ));
    }
    Ok(&pn_series(n, x, &fin, ctx)? / &norm)
}

// ---------------------------------------------------------------------------
// Three-term recurrences
// ---------------------------------------------------------------------------

/// Coefficients of 2x f_n = a_n f_{n+1} + b_n f_n + c_n f_{n-1}.
#[derive(Clone, Debug)]
pub struct RecurrenceCoeffs {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
}

/// Recurrence coefficients of the finite family at degree n.
pub fn finite_recurrence_coeffs(
    n: u32,
    par: &FiniteParams,
    ctx: &PrecisionContext,
) -> Result<RecurrenceCoeffs> {
    let q = &par.q;
    let p = ctx.prec();
    let [t1, t2, t3, t4] = &par.t;
    let s4 = par.sigma4();
    let nn = n as i64;
    let g = |e: i64| -> Complex { q_over(e, &s4, q).one_minus() };
    let d22 = g(2 * nn + 2);
    let d23 = g(2 * nn + 3);
    let d24 = g(2 * nn + 4);
    if d22.is_zero() || d23.is_zero() || d24.is_zero() {
        return Err(QawError::CoefficientSingularity(format!(
            "parameter product hits q^{{{}}}..q^{{{}}}",
            2 * n + 2,
            2 * n + 4
        )));
    }
    let a = &g(nn + 3) / &(&d23 * &d24);
    let pairs = [
        (t1, t2),
        (t1, t3),
        (t1, t4),
        (t2, t3),
        (t2, t4),
        (t3, t4),
    ];
    let mut cprod = Complex::one(p);
    for (u, v) in &pairs {
        cprod = &cprod * &one_plus(&q_over(nn + 1, &(*u * *v), q));
    }
    let one_minus_qn = Complex::from_real(qpow(nn, q)).one_minus();
    let c = -&(&(&one_minus_qn * &cprod) / &(&d22 * &d23));
    let mut prod2 = Complex::one(p);
    let mut prod1 = Complex::one(p);
    for v in [t2, t3, t4] {
        prod2 = &prod2 * &one_plus(&q_over(nn + 2, &(t1 * v), q));
        prod1 = &prod1 * &one_plus(&q_over(nn + 1, &(t1 * v), q));
    }
    if prod1.is_zero() {
        return Err(QawError::CoefficientSingularity(
            "middle coefficient denominator vanishes".into(),
        ));
    }
    let t1_over_q = t1.div_f(q);
    let q_over_t1 = t1.recip().mul_f(q);
    let b = &(&t1_over_q - &q_over_t1) - &(&(&t1_over_q * &a) * &prod2)
        - &(&(&q_over_t1 * &c) / &prod1);
    Ok(RecurrenceCoeffs { a, b, c })
}

/// Recurrence coefficients of the infinite family at degree n.
pub fn infinite_recurrence_coeffs(
    n: u32,
    par: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<RecurrenceCoeffs> {
    let q = &par.q;
    let p = ctx.prec();
    let [t1, t2, t3] = &par.t;
    let nn = n as i64;
    let t23 = t2 * t3;
    let a = -&(&(&t23.mul_f(&qpow(-2 * nn - 2, q))
        * &one_plus(&q_over(nn + 2, &(t1 * t2), q)))
        * &one_plus(&q_over(nn + 2, &t23, q)));
    let sum = &(t1 + t2) + t3;
    let t123 = t1 * &t23;
    let mut poly = Float::with_val(p, 1u32);
    poly += q;
    poly -= qpow(nn + 1, q);
    let b = &sum.mul_f(&qpow(-nn - 1, q)) + &t123.mul_f(&qpow(-2 * nn - 3, q)).mul_f(&poly);
    let one_minus_qn = Complex::from_real(qpow(nn, q)).one_minus();
    let c = -&(&(&(t1 * &t123).mul_f(&qpow(-2 * nn - 3, q)) * &one_minus_qn)
        * &one_plus(&q_over(nn + 1, &(t1 * t3), q)));
    Ok(RecurrenceCoeffs { a, b, c })
}

/// Precomputed recurrence coefficients for degrees 0..max_n-1, enough to
/// evaluate every member up to degree max_n by forward recurrence.
#[derive(Clone, Debug)]
pub struct RecurrenceTable {
    pub coeffs: Vec<RecurrenceCoeffs>,
}

pub fn finite_recurrence_table(
    max_n: u32,
    par: &FiniteParams,
    ctx: &PrecisionContext,
) -> Result<RecurrenceTable> {
    let mut coeffs = Vec::with_capacity(max_n as usize);
    for n in 0..max_n {
        let rc = finite_recurrence_coeffs(n, par, ctx)?;
        if rc.a.is_zero() {
            return Err(QawError::CoefficientSingularity(format!(
                "leading recurrence coefficient vanishes at degree {n}"
            )));
        }
        coeffs.push(rc);
    }
    Ok(RecurrenceTable { coeffs })
}

pub fn infinite_recurrence_table(
    max_n: u32,
    par: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<RecurrenceTable> {
    let mut coeffs = Vec::with_capacity(max_n as usize);
    for n in 0..max_n {
        let rc = infinite_recurrence_coeffs(n, par, ctx)?;
        if rc.a.is_zero() {
            return Err(QawError::CoefficientSingularity(format!(
                "leading recurrence coefficient vanishes at degree {n}"
            )));
        }
        coeffs.push(rc);
    }
    Ok(RecurrenceTable { coeffs })
}

impl RecurrenceTable {
    /// Values of degrees 0..=n at x by forward recurrence.
    pub fn eval_all(&self, n: u32, x: &Complex) -> Vec<Complex> {
        assert!(
            (n as usize) <= self.coeffs.len(),
            "table holds {} coefficient rows, degree {} requested",
            self.coeffs.len(),
            n
        );
        let p = x.prec();
        let two_x = x + x;
        let mut vals = Vec::with_capacity(n as usize + 1);
        vals.push(Complex::one(p));
        if n == 0 {
            return vals;
        }
        for m in 0..n as usize {
            let rc = &self.coeffs[m];
            let prev = if m == 0 {
                Complex::zero(p)
            } else {
                &rc.c * &vals[m - 1]
            };
            let next = &(&(&(&two_x - &rc.b) * &vals[m]) - &prev) / &rc.a;
            vals.push(next);
        }
        vals
    }

    pub fn eval(&self, n: u32, x: &Complex) -> Complex {
        self.eval_all(n, x).pop().expect("nonempty values")
    }

    /// Real view of the coefficients; fails when any imaginary part is not
    /// negligible at the working tolerance.
    pub fn to_real(&self, ctx: &PrecisionContext) -> Result<RealRecurrenceTable> {
        let mut a = Vec::with_capacity(self.coeffs.len());
        let mut b = Vec::with_capacity(self.coeffs.len());
        let mut c = Vec::with_capacity(self.coeffs.len());
        for rc in &self.coeffs {
            for (part, dst) in [(&rc.a, &mut a), (&rc.b, &mut b), (&rc.c, &mut c)] {
                let mut scale = Float::with_val(ctx.prec(), part.re.abs_ref());
                scale += 1u32;
                let bound = scale * ctx.series_tol();
                if Float::with_val(ctx.prec(), part.im.abs_ref()) > bound {
                    return Err(QawError::UnsupportedParameters(
                        "recurrence coefficients are not real".into(),
                    ));
                }
                dst.push(part.re.clone());
            }
        }
        Ok(RealRecurrenceTable { a, b, c })
    }
}

/// Real recurrence coefficients for real parameters; the fast path for
/// zero finding and quadrature.
#[derive(Clone, Debug)]
pub struct RealRecurrenceTable {
    pub a: Vec<Float>,
    pub b: Vec<Float>,
    pub c: Vec<Float>,
}

impl RealRecurrenceTable {
    pub fn max_degree(&self) -> u32 {
        self.a.len() as u32
    }

    pub fn eval_all(&self, n: u32, x: &Float) -> Vec<Float> {
        assert!((n as usize) <= self.a.len());
        let p = x.prec();
        let two_x = Float::with_val(p, x + x);
        let mut vals = Vec::with_capacity(n as usize + 1);
        vals.push(Float::with_val(p, 1u32));
        for m in 0..n as usize {
            let mut next = Float::with_val(p, &two_x - &self.b[m]);
            next *= &vals[m];
            if m > 0 {
                next -= Float::with_val(p, &self.c[m] * &vals[m - 1]);
            }
            next /= &self.a[m];
            vals.push(next);
        }
        vals
    }

    pub fn eval(&self, n: u32, x: &Float) -> Float {
        self.eval_all(n, x).pop().expect("nonempty values")
    }

    /// Value and x-derivative of degree n at x, by joint recurrence.
    pub fn eval_with_derivative(&self, n: u32, x: &Float) -> (Float, Float) {
        assert!((n as usize) <= self.a.len());
        let p = x.prec();
        let two_x = Float::with_val(p, x + x);
        let mut f_prev = Float::with_val(p, 0u32);
        let mut f = Float::with_val(p, 1u32);
        let mut d_prev = Float::with_val(p, 0u32);
        let mut d = Float::with_val(p, 0u32);
        for m in 0..n as usize {
            let w = Float::with_val(p, &two_x - &self.b[m]);
            let mut f_next = Float::with_val(p, &w * &f);
            let mut d_next = Float::with_val(p, &w * &d);
            d_next += Float::with_val(p, &f + &f);
            if m > 0 {
                f_next -= Float::with_val(p, &self.c[m] * &f_prev);
                d_next -= Float::with_val(p, &self.c[m] * &d_prev);
            }
            f_next /= &self.a[m];
            d_next /= &self.a[m];
            f_prev = f;
            f = f_next;
            d_prev = d;
            d = d_next;
        }
        (f, d)
    }
}

// ---------------------------------------------------------------------------
// Connection coefficients
// ---------------------------------------------------------------------------

fn require_shared(a: &Complex, b: &Complex, which: &str, ctx: &PrecisionContext) -> Result<()> {
    let mut scale = a.abs();
    scale += 1u32;
    let bound = scale * ctx.series_tol();
    if dist(a, b) > bound {
        return Err(QawError::InvalidArgument(format!(
            "connection requires the shared parameter {which} to coincide"
        )));
    }
    Ok(())
}

/// Coefficient of p_k(x; t) in the expansion of p_n(x; s), where the two
/// parameter lists share their fourth entry.
pub fn finite_connection_coeff(
    k: u32,
    n: u32,
    s: &FiniteParams,
    t: &FiniteParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    if k > n {
        return Err(QawError::InvalidArgument("need k <= n".into()));
    }
    require_shared(&s.t[3], &t.t[3], "t4", ctx)?;
    let q = &s.q;
    let [s1, s2, s3, t4] = &s.t;
    let [t1, t2, t3, _] = &t.t;
    let kk = k as i64;
    let nn = n as i64;
    let qs4 = s.sigma4();
    let qt4 = t.sigma4();
    let es = [
        neg_q_over(2, &(s1 * t4), q),
        neg_q_over(2, &(s2 * t4), q),
        neg_q_over(2, &(s3 * t4), q),
        Complex::from_real(q.clone()),
    ];
    let mut num = qpoch_finite_list(&es, q, n, ctx);
    num = &num * &qpoch_finite(&q_over(nn + 3, &qs4, q), q, k, ctx);
    num = num.mul_f(&qpow(kk * kk - nn * kk, q));
    let mut den = qpoch_finite_list(&es, q, k, ctx);
    den = &den * &qpoch_finite(&q_over(kk + 3, &qt4, q), q, k, ctx);
    den = &den * &qpoch_finite(&Complex::from_real(q.clone()), q, n - k, ctx);
    if den.is_zero() {
        return Err(QawError::CoefficientSingularity(
            "connection denominator vanishes".into(),
        ));
    }
    let pre = q_over(1, t4, q).powi(kk - nn);
    let spec = PhiSpec {
        num: vec![
            Complex::from_real(qpow(kk - nn, q)),
            q_over(nn + kk + 3, &qs4, q),
            neg_q_over(kk + 2, &(t1 * t4), q),
            neg_q_over(kk + 2, &(t2 * t4), q),
            neg_q_over(kk + 2, &(t3 * t4), q),
        ],
        den: vec![
            q_over(2 * kk + 4, &qt4, q),
            neg_q_over(kk + 2, &(s1 * t4), q),
            neg_q_over(kk + 2, &(s2 * t4), q),
            neg_q_over(kk + 2, &(s3 * t4), q),
        ],
        q: q.clone(),
        z: Complex::from_real(q.clone()),
        terminating: Some(n - k),
    };
    Ok(&(&(&num / &den) * &pre) * &phi_eval(&spec, ctx)?)
}

/// Coefficient of V_k(x; t) in the expansion of V_n(x; s), where the two
/// parameter lists share their third entry.
///
/// The series argument carries q^{n-k}; the off-by-one variant with
/// q^{n-k-1} fails the expansion identity and the s = t reduction.
pub fn infinite_connection_coeff(
    k: u32,
    n: u32,
    s: &InfiniteParams,
    t: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    if k > n {
        return Err(QawError::InvalidArgument("need k <= n".into()));
    }
    require_shared(&s.t[2], &t.t[2], "t3", ctx)?;
    let q = &s.q;
    let [s1, s2, t3] = &s.t;
    let [t1, t2, _] = &t.t;
    let kk = k as i64;
    let nn = n as i64;
    let s1s2 = s1 * s2;
    let qc = Complex::from_real(q.clone());
    let mut num = qpoch_finite_list(
        &[neg_q_over(2, &(s1 * t3), q), qc.clone()],
        q,
        n,
        ctx,
    );
    num = &num
        * &qpoch_finite_list(
            &[
                neg_q_over(2, &(t2 * t3), q),
                neg_q_over(2, &(t1 * t2), q),
            ],
            q,
            k,
            ctx,
        );
    let mut den = qpoch_finite(&neg_q_over(2, &s1s2, q), q, n, ctx);
    den = &den
        * &qpoch_finite_list(
            &[
                neg_q_over(2, &(s1 * t3), q),
                neg_q_over(2, &(s2 * t3), q),
                qc,
            ],
            q,
            k,
            ctx,
        );
    den = &den * &qpoch_finite(&Complex::from_real(q.clone()), q, n - k, ctx);
    if den.is_zero() {
        return Err(QawError::CoefficientSingularity(
            "connection denominator vanishes".into(),
        ));
    }
    let pre = s1.powi(nn).mul_f(&qpow(kk - nn, q)) * (t2 / &s1s2).powi(kk);
    let arg = (&(t1 * t2) / &s1s2).mul_f(&qpow(nn - kk, q));
    let spec = PhiSpec {
        num: vec![
            Complex::from_real(qpow(kk - nn, q)),
            neg_q_over(kk + 2, &(t1 * t3), q),
            neg_q_over(kk + 2, &(t2 * t3), q),
        ],
        den: vec![
            neg_q_over(kk + 2, &(s1 * t3), q),
            neg_q_over(kk + 2, &(s2 * t3), q),
        ],
        q: q.clone(),
        z: arg,
        terminating: Some(n - k),
    };
    Ok(&(&(&num / &den) * &pre) * &phi_eval(&spec, ctx)?)
}

/// Relative residual of p_n(x; s) against its expansion over p_k(x; t).
pub fn finite_connection_residual(
    n: u32,
    x: &Complex,
    s: &FiniteParams,
    t: &FiniteParams,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let lhs = pn_series(n, x, s, ctx)?;
    let mut sum = Complex::zero(ctx.prec());
    for k in 0..=n {
        let c = finite_connection_coeff(k, n, s, t, ctx)?;
        sum = &sum + &(&c * &pn_series(k, x, t, ctx)?);
    }
    Ok(crate::numctx::rel_error(&sum, &lhs))
}

/// Relative residual of V_n(x; s) against its expansion over V_k(x; t).
pub fn infinite_connection_residual(
    n: u32,
    x: &Complex,
    s: &InfiniteParams,
    t: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let lhs = vn_series(n, x, s, ctx)?;
    let mut sum = Complex::zero(ctx.prec());
    for k in 0..=n {
        let c = infinite_connection_coeff(k, n, s, t, ctx)?;
        sum = &sum + &(&c * &vn_series(k, x, t, ctx)?);
    }
    Ok(crate::numctx::rel_error(&sum, &lhs))
}

// ---------------------------------------------------------------------------
// Generating functions
// ---------------------------------------------------------------------------

/// Truncation residual of the finite-family generating function: both the
/// coefficient sum over p_n g^n / [(q, -q^2/t1t2, -q^2/t3t4; q)_n] and the
/// product of the two 2phi1 factors are expanded to total order `kmax` in g
/// and evaluated; agreement through that order is the check.
pub fn finite_genfun_residual(
    kmax: u32,
    g: &Complex,
    x: &Complex,
    par: &FiniteParams,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let p = ctx.prec();
    let q = &par.q;
    let [t1, t2, t3, t4] = &par.t;
    let zp = zpoint_from_x(x, ctx);
    let z = &zp.z_pos;
    let e12 = neg_q_over(2, &(t1 * t2), q);
    let e34 = neg_q_over(2, &(t3 * t4), q);

    let table = finite_recurrence_table(kmax, par, ctx)?;
    let vals = table.eval_all(kmax, x);
    let mut lhs = Complex::zero(p);
    let mut gn = Complex::one(p);
    let mut norm = Complex::one(p);
    let kq = Complex::from_real(q.clone());
    for n in 0..=kmax {
        if n > 0 {
            let m = n as i64 - 1;
            let step = qpoch_step(&kq, m, q)
                * qpoch_step(&e12, m, q)
                * qpoch_step(&e34, m, q);
            norm = &norm * &step;
            gn = &gn * g;
        }
        lhs = &lhs + &(&(&vals[n as usize] / &norm) * &gn);
    }

    // first factor: sum_m (qz/t1, qz/t2; q)_m / ((-q^2/t1t2, q; q)_m) (-g/z)^m
    let u = series_2phi1(
        &(z / t1).mul_f(q),
        &(z / t2).mul_f(q),
        &e12,
        &(-&z.recip()),
        kmax,
        q,
        ctx,
    );
    // second factor: argument +gz with parameters -q/(z t3), -q/(z t4)
    let v = series_2phi1(
        &neg_q_over(1, &(z * t3), q),
        &neg_q_over(1, &(z * t4), q),
        &e34,
        z,
        kmax,
        q,
        ctx,
    );
    let rhs = convolve_eval(&[u, v], g, kmax, ctx);
    Ok(dist(&lhs, &rhs))
}

/// Truncation residual of the infinite-family generating function. The
/// closed side is 2phi1(qz/t1, qz/t2; -q^2/t1t2 | q, -g/z) (-g/z; q)_inf /
/// (g t3/q; q)_inf, the coefficient side sums
/// (-q^2/t2t3; q)_n / (q; q)_n V_n (g t3/t1)^n; both are expanded to total
/// order `kmax` in g. The series factor must carry the (t1, t2) pair: with
/// (t1, t3) in its place the two sides disagree at order g.
pub fn infinite_genfun_residual(
    kmax: u32,
    g: &Complex,
    x: &Complex,
    par: &InfiniteParams,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let p = ctx.prec();
    let q = &par.q;
    let [t1, t2, t3] = &par.t;
    let zp = zpoint_from_x(x, ctx);
    let z = &zp.z_pos;
    let e12 = neg_q_over(2, &(t1 * t2), q);
    let e23 = neg_q_over(2, &(t2 * t3), q);

    let u = series_2phi1(
        &(z / t1).mul_f(q),
        &(z / t2).mul_f(q),
        &e12,
        &(-&z.recip()),
        kmax,
        q,
        ctx,
    );
    // (-g/z; q)_inf = sum_a q^{a(a-1)/2} (g/z)^a / (q; q)_a
    let mut ea = Vec::with_capacity(kmax as usize + 1);
    let zinv = z.recip();
    let mut coef = Complex::one(p);
    let mut qfac = Float::with_val(p, 1u32);
    for a in 0..=kmax as i64 {
        if a > 0 {
            qfac *= Float::with_val(p, 1u32) - qpow(a, q);
            coef = (&coef * &zinv).mul_f(&qpow(a - 1, q));
        }
        ea.push(coef.div_f(&qfac));
    }
    // 1/(g t3/q; q)_inf = sum_b (t3/q)^b g^b / (q; q)_b
    let mut eb = Vec::with_capacity(kmax as usize + 1);
    let t3q = t3.div_f(q);
    let mut coefb = Complex::one(p);
    let mut qfacb = Float::with_val(p, 1u32);
    for b in 0..=kmax as i64 {
        if b > 0 {
            qfacb *= Float::with_val(p, 1u32) - qpow(b, q);
            coefb = &coefb * &t3q;
        }
        eb.push(coefb.div_f(&qfacb));
    }
    let lhs = convolve_eval(&[u, ea, eb], g, kmax, ctx);

    let table = infinite_recurrence_table(kmax, par, ctx)?;
    let vals = table.eval_all(kmax, x);
    let ratio = (t3 / t1) * g;
    let mut rhs = Complex::zero(p);
    let mut rn = Complex::one(p);
    let mut coeff = Complex::one(p);
    let kq = Complex::from_real(q.clone());
    for n in 0..=kmax {
        if n > 0 {
            let m = n as i64 - 1;
            coeff = &coeff * &(&qpoch_step(&e23, m, q) / &qpoch_step(&kq, m, q));
            rn = &rn * &ratio;
        }
        rhs = &rhs + &(&(&coeff * &vals[n as usize]) * &rn);
    }
    Ok(dist(&lhs, &rhs))
}

/// The factor (1 - a q^m) stepping (a; q)_m to (a; q)_{m+1}.
fn qpoch_step(a: &Complex, m: i64, q: &Float) -> Complex {
    a.mul_f(&qpow(m, q)).one_minus()
}

/// Power-series coefficients in g of 2phi1(a, b; c; q, w g) through order
/// kmax, where the literal argument is w g.
fn series_2phi1(
    a: &Complex,
    b: &Complex,
    c: &Complex,
    w: &Complex,
    kmax: u32,
    q: &Float,
    ctx: &PrecisionContext,
) -> Vec<Complex> {
    let p = ctx.prec();
    let mut out = Vec::with_capacity(kmax as usize + 1);
    let mut term = Complex::one(p);
    out.push(term.clone());
    for m in 0..kmax as i64 {
        let numer = &qpoch_step(a, m, q) * &qpoch_step(b, m, q);
        let denom = &qpoch_step(c, m, q) * &qpoch_step(&Complex::from_real(q.clone()), m, q);
        term = &(&(&term * &numer) / &denom) * w;
        out.push(term.clone());
    }
    out
}

/// Evaluates the product of truncated power series at g, keeping total
/// order <= kmax.
fn convolve_eval(factors: &[Vec<Complex>], g: &Complex, kmax: u32, ctx: &PrecisionContext) -> Complex {
    let p = ctx.prec();
    let mut acc = vec![Complex::zero(p); kmax as usize + 1];
    acc[0] = Complex::one(p);
    for f in factors {
        let mut next = vec![Complex::zero(p); kmax as usize + 1];
        for (i, ai) in acc.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, fj) in f.iter().enumerate() {
                if i + j > kmax as usize {
                    break;
                }
                let sum = &next[i + j] + &(ai * fj);
                next[i + j] = sum;
            }
        }
        acc = next;
    }
    let mut sum = Complex::zero(p);
    let mut gn = Complex::one(p);
    for (i, ci) in acc.iter().enumerate() {
        if i > 0 {
            gn = &gn * g;
        }
        sum = &sum + &(ci * &gn);
    }
    sum
}

// ---------------------------------------------------------------------------
// Zeros of the infinite family
// ---------------------------------------------------------------------------

/// All real zeros of V_n in ascending order, for real positive parameters,
/// found by inductive interlacing and safeguarded Newton refinement.
pub fn vn_zeros(n: u32, par: &InfiniteParams, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    let p = ctx.prec();
    for tj in &par.t {
        let mut scale = tj.abs();
        scale += 1u32;
        let bound = scale * ctx.series_tol();
        if Float::with_val(p, tj.im.abs_ref()) > bound || tj.re <= 0 {
            return Err(QawError::UnsupportedParameters(
                "real zeros require positive real parameters".into(),
            ));
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let rt = infinite_recurrence_table(n, par, ctx)?.to_real(ctx)?;
    let mut zs = vec![Float::with_val(p, &rt.b[0] / 2)];
    for deg in 2..=n {
        zs = next_degree_zeros(&rt, deg, &zs, ctx)?;
    }
    Ok(zs)
}

fn sign_of(f: &Float) -> i32 {
    if f.is_zero() {
        0
    } else if f.is_sign_positive() {
        1
    } else {
        -1
    }
}

fn next_degree_zeros(
    rt: &RealRecurrenceTable,
    deg: u32,
    prev: &[Float],
    ctx: &PrecisionContext,
) -> Result<Vec<Float>> {
    // sign of the leading coefficient: 2^deg / prod a_m
    let mut lead_sign = 1i32;
    for m in 0..deg as usize {
        lead_sign *= sign_of(&rt.a[m]);
    }
    let lo_outer = expand_bracket(rt, deg, prev.first().expect("prev zeros"), -1, 1, ctx)?;
    let hi_outer = expand_bracket(rt, deg, prev.last().expect("prev zeros"), 1, lead_sign, ctx)?;
    let mut ends = Vec::with_capacity(prev.len() + 2);
    ends.push(lo_outer);
    ends.extend(prev.iter().cloned());
    ends.push(hi_outer);
    let mut out = Vec::with_capacity(prev.len() + 1);
    for w in ends.windows(2) {
        out.push(refine_zero(rt, deg, w[0].clone(), w[1].clone(), ctx)?);
    }
    Ok(out)
}

/// Moves outward from `from` in direction `dir` until the polynomial sign
/// matches the sign it must take at that infinity.
fn expand_bracket(
    rt: &RealRecurrenceTable,
    deg: u32,
    from: &Float,
    dir: i32,
    want: i32,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let p = ctx.prec();
    let mut step = Float::with_val(p, from.abs_ref());
    step += 1u32;
    for _ in 0..200 {
        let mut x = Float::with_val(p, from);
        if dir < 0 {
            x -= &step;
        } else {
            x += &step;
        }
        if sign_of(&rt.eval(deg, &x)) == want {
            return Ok(x);
        }
        step *= 2u32;
    }
    Err(QawError::BracketFailure(format!(
        "no sign change found expanding from degree {deg}"
    )))
}

fn refine_zero(
    rt: &RealRecurrenceTable,
    deg: u32,
    mut lo: Float,
    mut hi: Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let p = ctx.prec();
    let flo = rt.eval(deg, &lo);
    let slo = sign_of(&flo);
    let fhi = rt.eval(deg, &hi);
    if slo == 0 {
        return Ok(lo);
    }
    if sign_of(&fhi) == 0 {
        return Ok(hi);
    }
    if slo == sign_of(&fhi) {
        return Err(QawError::BracketFailure(format!(
            "no sign change across bracket at degree {deg}"
        )));
    }
    // coarse bisection to localize, then safeguarded Newton
    for _ in 0..60 {
        let mid = Float::with_val(p, &lo + &hi) / 2u32;
        let sm = sign_of(&rt.eval(deg, &mid));
        if sm == 0 {
            return Ok(mid);
        }
        if sm == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = Float::with_val(p, &lo + &hi) / 2u32;
    for _ in 0..120 {
        let (f, df) = rt.eval_with_derivative(deg, &x);
        let sf = sign_of(&f);
        if sf == 0 {
            return Ok(x);
        }
        if sf == slo {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let mut xn = if df.is_zero() {
            Float::with_val(p, &lo + &hi) / 2u32
        } else {
            Float::with_val(p, &x - Float::with_val(p, &f / &df))
        };
        if !(xn > lo && xn < hi) {
            xn = Float::with_val(p, &lo + &hi) / 2u32;
        }
        let mut tol = Float::with_val(p, x.abs_ref());
        tol += 1u32;
        tol *= ctx.series_tol();
        let delta = Float::with_val(p, &xn - &x).abs();
        x = xn;
        if delta <= tol {
            return Ok(x);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numctx::rel_error;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn parse(c: &PrecisionContext, s: &str) -> Complex {
        Complex::from_real(c.float_from_str(s).unwrap())
    }

    fn parse_c(c: &PrecisionContext, re: &str, im: &str) -> Complex {
        Complex::new(c.float_from_str(re).unwrap(), c.float_from_str(im).unwrap())
    }

    fn finite_par(c: &PrecisionContext) -> FiniteParams {
        FiniteParams::from_decimal_strs("0.5", ["0.3", "0.2", "0.1", "0.4"], c).unwrap()
    }

    fn infinite_par(c: &PrecisionContext) -> InfiniteParams {
        InfiniteParams::from_decimal_strs("0.5", ["1", "2", "3"], c).unwrap()
    }

    fn assert_rel_below(v: &Complex, target: &Complex, tol: &str, c: &PrecisionContext) {
        let e = rel_error(v, target);
        let bound = c.float_from_str(tol).unwrap();
        assert!(e < bound, "relative error {e} exceeds {tol}");
    }

    #[test]
    fn parameter_validation() {
        let c = ctx();
        assert!(FiniteParams::from_decimal_strs("1.0", ["1", "1", "1", "1"], &c).is_err());
        assert!(FiniteParams::from_decimal_strs("0.5", ["0", "1", "1", "1"], &c).is_err());
        assert!(InfiniteParams::from_decimal_strs("0.5", ["1", "2", "0"], &c).is_err());
        let par = finite_par(&c);
        assert_eq!(par.n_orth(), Some(2));
        let wide = FiniteParams::from_decimal_strs("0.5", ["1", "2", "3", "4"], &c).unwrap();
        assert_eq!(wide.n_orth(), None);
    }

    #[test]
    fn pn_matches_independent_series_oracle() {
        let c = ctx();
        let par = finite_par(&c);
        let x = parse(&c, "0.7");
        let p2 = pn_series(2, &x, &par, &c).unwrap();
        let r2 = parse(&c, "173.8521440972222222222222222222222222222222222222222222");
        assert_rel_below(&p2, &r2, "1e-45", &c);
        let p3 = pn_series(3, &x, &par, &c).unwrap();
        let r3 = parse(&c, "619.9107358963577835648148148148148148148148148148148148");
        assert_rel_below(&p3, &r3, "1e-45", &c);
        let xc = parse_c(&c, "0.3", "0.4");
        let p2c = pn_series(2, &xc, &par, &c).unwrap();
        let r2c = parse_c(
            &c,
            "551.3864496527777777777777777777777777777777777777777778",
            "-462.32125",
        );
        assert_rel_below(&p2c, &r2c, "1e-45", &c);
    }

    #[test]
    fn vn_matches_independent_series_oracle() {
        let c = ctx();
        let par = infinite_par(&c);
        let x = parse(&c, "0.7");
        let v2 = vn_series(2, &x, &par, &c).unwrap();
        let r2 = parse(&c, "4.255862558356676003734827264239028944911297852474323063");
        assert_rel_below(&v2, &r2, "1e-45", &c);
        let v3 = vn_series(3, &x, &par, &c).unwrap();
        let r3 = parse(&c, "8.603263288999031873501248880266466682476385326597576446");
        assert_rel_below(&v3, &r3, "1e-45", &c);
        let v5 = vn_series(5, &parse(&c, "1.25"), &par, &c).unwrap();
        let r5 = parse(&c, "33.42298092313884520215460067691562481474794691499372605");
        assert_rel_below(&v5, &r5, "1e-45", &c);
        let vt2 = vn_tilde_series(2, &x, &par, &c).unwrap();
        let rt2 = parse(&c, "0.9428372436974789915966386554621848739495798319327731092");
        assert_rel_below(&vt2, &rt2, "1e-45", &c);
    }

    #[test]
    fn vn_is_prefactor_times_tilde() {
        let c = ctx();
        let par = infinite_par(&c);
        let x = parse(&c, "0.45");
        let n = 4u32;
        let q = &par.q;
        let [t1, _, t3] = &par.t;
        let pref = t1.div_f(q).powi(n as i64)
            * qpoch_finite(&neg_q_over(2, &(t1 * t3), q), q, n, &c);
        let lhs = vn_series(n, &x, &par, &c).unwrap();
        let rhs = &pref * &vn_tilde_series(n, &x, &par, &c).unwrap();
        assert_rel_below(&lhs, &rhs, "1e-45", &c);
    }

    #[test]
    fn vn_tilde_is_symmetric_in_all_parameters() {
        let c = ctx();
        let par = InfiniteParams::from_decimal_strs("0.5", ["1.1", "2.3", "0.7"], &c).unwrap();
        let x = parse(&c, "0.35");
        let base = vn_tilde_series(3, &x, &par, &c).unwrap();
        for perm in [[1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]] {
            let other = vn_tilde_series(3, &x, &par.permuted(perm), &c).unwrap();
            assert_rel_below(&other, &base, "1e-44", &c);
        }
    }

    #[test]
    fn pn_is_symmetric_in_all_parameters() {
        let c = ctx();
        let par = finite_par(&c);
        let x = parse(&c, "0.35");
        let base = pn_series(3, &x, &par, &c).unwrap();
        for perm in [[2, 1, 0, 3], [3, 1, 2, 0], [0, 2, 1, 3], [1, 0, 3, 2]] {
            let other = pn_series(3, &x, &par.permuted(perm), &c).unwrap();
            assert_rel_below(&other, &base, "1e-44", &c);
        }
    }

    #[test]
    fn series_value_is_root_choice_invariant() {
        let c = ctx();
        let par = finite_par(&c);
        let x = parse_c(&c, "0.3", "0.4");
        let zp = zpoint_from_x(&x, &c);
        let a = pn_series_at_z(3, &zp.z_big, &par, &c).unwrap();
        let b = pn_series_at_z(3, &zp.z_small, &par, &c).unwrap();
        assert_rel_below(&a, &b, "1e-44", &c);
        let ipar = infinite_par(&c);
        let va = vn_series_at_z(3, &zp.z_big, &ipar, &c).unwrap();
        let vb = vn_series_at_z(3, &zp.z_small, &ipar, &c).unwrap();
        assert_rel_below(&va, &vb, "1e-44", &c);
    }

    #[test]
    fn recurrence_reproduces_series_finite() {
        let c = ctx();
        let par = finite_par(&c);
        let table = finite_recurrence_table(8, &par, &c).unwrap();
        for x in [parse(&c, "0.7"), parse_c(&c, "-0.2", "0.9")] {
            let vals = table.eval_all(8, &x);
            for n in 0..=8u32 {
                let direct = pn_series(n, &x, &par, &c).unwrap();
                assert_rel_below(&vals[n as usize], &direct, "1e-42", &c);
            }
        }
    }

    #[test]
    fn recurrence_reproduces_series_infinite() {
        let c = ctx();
        let par = infinite_par(&c);
        let table = infinite_recurrence_table(8, &par, &c).unwrap();
        for x in [parse(&c, "0.7"), parse_c(&c, "-0.2", "0.9")] {
            let vals = table.eval_all(8, &x);
            for n in 0..=8u32 {
                let direct = vn_series(n, &x, &par, &c).unwrap();
                assert_rel_below(&vals[n as usize], &direct, "1e-42", &c);
            }
        }
    }

    #[test]
    fn middle_coefficient_is_permutation_invariant() {
        let c = ctx();
        let par = finite_par(&c);
        for n in [1u32, 3] {
            let base = finite_recurrence_coeffs(n, &par, &c).unwrap();
            for perm in [[1, 0, 2, 3], [3, 1, 2, 0], [0, 3, 2, 1]] {
                let other = finite_recurrence_coeffs(n, &par.permuted(perm), &c).unwrap();
                assert_rel_below(&other.b, &base.b, "1e-43", &c);
            }
        }
    }

    #[test]
    fn vn_emerges_from_pn_as_fourth_parameter_shrinks() {
        let c = ctx();
        let par = infinite_par(&c);
        let x = parse(&c, "0.7");
        let target = vn_series(3, &x, &par, &c).unwrap();
        let coarse = vn_from_pn_limit(3, &x, &par, &parse(&c, "1e-12"), &c).unwrap();
        let fine = vn_from_pn_limit(3, &x, &par, &parse(&c, "1e-24"), &c).unwrap();
        let e_coarse = rel_error(&coarse, &target);
        let e_fine = rel_error(&fine, &target);
        assert!(e_coarse < c.float_from_str("1e-10").unwrap());
        assert!(e_fine < c.float_from_str("1e-22").unwrap());
        assert!(e_fine < e_coarse);
    }

    #[test]
    fn finite_connection_expands_across_parameters() {
        let c = ctx();
        let t = finite_par(&c);
        let s = FiniteParams::from_decimal_strs("0.5", ["0.25", "0.15", "0.35", "0.4"], &c).unwrap();
        for x in [parse(&c, "0.7"), parse_c(&c, "0.3", "0.4")] {
            for n in 1..=3u32 {
                let r = finite_connection_residual(n, &x, &s, &t, &c).unwrap();
                assert!(r < c.float_from_str("1e-44").unwrap(), "residual {r}");
            }
        }
        // same parameters reduce the coefficients to the identity
        for n in 1..=3u32 {
            for k in 0..n {
                let ckn = finite_connection_coeff(k, n, &t, &t, &c).unwrap();
                assert!(ckn.abs() < *c.series_tol());
            }
            let cnn = finite_connection_coeff(n, n, &t, &t, &c).unwrap();
            assert_rel_below(&cnn, &Complex::one(c.prec()), "1e-45", &c);
        }
        // mismatched shared parameter is rejected
        let bad = FiniteParams::from_decimal_strs("0.5", ["0.25", "0.15", "0.35", "0.41"], &c).unwrap();
        assert!(finite_connection_coeff(0, 1, &bad, &t, &c).is_err());
    }

    #[test]
    fn infinite_connection_expands_across_parameters() {
        let c = ctx();
        let t = infinite_par(&c);
        let s = InfiniteParams::from_decimal_strs("0.5", ["1.5", "2.5", "3"], &c).unwrap();
        for x in [parse(&c, "0.7"), parse_c(&c, "0.3", "0.4")] {
            for n in 1..=4u32 {
                let r = infinite_connection_residual(n, &x, &s, &t, &c).unwrap();
                assert!(r < c.float_from_str("1e-43").unwrap(), "residual {r}");
            }
        }
        for n in 1..=3u32 {
            for k in 0..n {
                let ekn = infinite_connection_coeff(k, n, &t, &t, &c).unwrap();
                assert!(ekn.abs() < *c.series_tol());
            }
            let enn = infinite_connection_coeff(n, n, &t, &t, &c).unwrap();
            assert_rel_below(&enn, &Complex::one(c.prec()), "1e-45", &c);
        }
    }

    #[test]
    fn finite_generating_function_truncations_agree() {
        let c = ctx();
        let par = finite_par(&c);
        let g = parse(&c, "0.05");
        for x in [parse(&c, "0"), parse(&c, "0.7")] {
            let r = finite_genfun_residual(12, &g, &x, &par, &c).unwrap();
            assert!(r < c.float_from_str("1e-40").unwrap(), "residual {r}");
        }
    }

    #[test]
    fn infinite_generating_function_truncations_agree() {
        let c = ctx();
        let par = infinite_par(&c);
        let g = parse(&c, "0.05");
        for x in [parse(&c, "0"), parse(&c, "0.7")] {
            let r = infinite_genfun_residual(12, &g, &x, &par, &c).unwrap();
            assert!(r < c.float_from_str("1e-38").unwrap(), "residual {r}");
        }
    }

    #[test]
    fn zeros_count_interlace_and_vanish() {
        let c = ctx();
        let par = InfiniteParams::from_decimal_strs("0.5", ["1", "1", "1"], &c).unwrap();
        let mut prev: Vec<Float> = Vec::new();
        let rt = infinite_recurrence_table(8, &par, &c)
            .unwrap()
            .to_real(&c)
            .unwrap();
        for n in 1..=8u32 {
            let zs = vn_zeros(n, &par, &c).unwrap();
            assert_eq!(zs.len(), n as usize);
            for w in zs.windows(2) {
                assert!(w[0] < w[1]);
            }
            // interlacing with the previous degree
            for (i, z) in prev.iter().enumerate() {
                assert!(zs[i] < *z && *z < zs[i + 1]);
            }
            for z in &zs {
                let (f, df) = rt.eval_with_derivative(n, z);
                let fa = f.abs();
                let mut scale = Float::with_val(c.prec(), z.abs_ref());
                scale += 1u32;
                let bound = Float::with_val(c.prec(), df.abs_ref()) * &scale
                    * c.float_from_str("1e-40").unwrap();
                assert!(fa < bound, "zero not sharp at degree {n}");
            }
            prev = zs;
        }
    }

    #[test]
    fn quadratic_zeros_match_closed_form() {
        let c = ctx();
        let par = InfiniteParams::from_decimal_strs("0.5", ["1", "1", "1"], &c).unwrap();
        let p = c.prec();
        let r0 = infinite_recurrence_coeffs(0, &par, &c).unwrap();
        let r1 = infinite_recurrence_coeffs(1, &par, &c).unwrap();
        let b0 = r0.b.re.clone();
        let b1 = r1.b.re.clone();
        let a0c1 = Float::with_val(p, &r0.a.re * &r1.c.re);
        // (2x - b0)(2x - b1) = a0 c1
        let s = Float::with_val(p, &b0 + &b1);
        let d = Float::with_val(p, &b0 - &b1);
        let disc = (Float::with_val(p, d.square_ref()) + Float::with_val(p, 4u32) * a0c1).sqrt();
        let lo = Float::with_val(p, &s - &disc) / 4u32;
        let hi = Float::with_val(p, &s + &disc) / 4u32;
        let zs = vn_zeros(2, &par, &c).unwrap();
        assert!(crate::numctx::rel_error_f(&zs[0], &lo) < *c.series_tol());
        assert!(crate::numctx::rel_error_f(&zs[1], &hi) < *c.series_tol());
    }
}
