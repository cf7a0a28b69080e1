//! The divided-difference operator D_q and averaging operator A_q on the
//! curve 2x = z - 1/z, their iterates, and residual checks for every
//! operator identity both families satisfy: the basis action, lowering and
//! raising relations, the q-Sturm-Liouville equations, Rodrigues formulas,
//! the product rule, and integration by parts in both its continuous and
//! lattice forms.
//!
//! Functions of x are handled through their z-form ("breve" form)
//! f(x) = F(z); D_q samples F at q^(1/2) z and q^(-1/2) z. A weight's
//! z-form is odd under z -> -1/z, so it is not by itself a function of x,
//! but every identity below divides one weight evaluation by another on
//! the same z-lattice, and those ratios are even. All evaluations of one
//! identity therefore share a single consistent root z(x).

use crate::error::{QawError, Result};
use crate::families::{
    finite_recurrence_table, infinite_recurrence_table, one_plus, q_over, qpow, RecurrenceTable,
};
use crate::measures::{ContinuousWeight, GramFamily};
use crate::numctx::{x_from_z, zpoint_from_x, Complex, PrecisionContext};
use crate::qseries::qpoch_finite;
use rug::ops::Pow;
use rug::Float;

/// Hard cap on lattice pairing shells in either direction.
const MAX_PAIRING_SHELLS: i64 = 500;

/// A function given by its z-form evaluator.
pub struct CurveFn<'a> {
    f: Box<dyn Fn(&Complex) -> Result<Complex> + 'a>,
}

impl<'a> CurveFn<'a> {
    pub fn new(f: impl Fn(&Complex) -> Result<Complex> + 'a) -> Self {
        Self { f: Box::new(f) }
    }

    pub fn eval_z(&self, z: &Complex) -> Result<Complex> {
        (self.f)(z)
    }

    /// A polynomial of x evaluated through the recurrence table.
    pub fn from_table(table: &'a RecurrenceTable, n: u32) -> Self {
        Self::new(move |z| Ok(table.eval(n, &x_from_z(z))))
    }

    /// A continuous weight's z-form.
    pub fn from_weight(w: &'a ContinuousWeight, ctx: &'a PrecisionContext) -> Self {
        Self::new(move |z| w.eval_at_z(z, ctx))
    }

    /// |F(z) - F(-1/z)| over the larger magnitude (floored at 1): zero for
    /// genuine functions of x, order one for odd z-forms such as weights.
    pub fn symmetry_residual(&self, z: &Complex) -> Result<Float> {
        let a = self.eval_z(z)?;
        let b = self.eval_z(&-&z.recip())?;
        Ok(residual_scaled(&a, &b, z.prec()))
    }
}

/// |lhs - rhs| / max(|lhs|, |rhs|, 1).
pub fn residual_scaled(lhs: &Complex, rhs: &Complex, p: u32) -> Float {
    let mut sc = lhs.abs();
    let rs = rhs.abs();
    if rs > sc {
        sc = rs;
    }
    if sc < 1u32 {
        sc = Float::with_val(p, 1);
    }
    let mut diff = (lhs - rhs).abs();
    diff /= &sc;
    diff
}

fn half_shifts(q: &Float, p: u32) -> (Float, Float) {
    let rq = Float::with_val(p, q.sqrt_ref());
    let rq_inv = Float::with_val(p, rq.recip_ref());
    (rq, rq_inv)
}

fn curve_denominator(z: &Complex, q: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    let (rq, rq_inv) = half_shifts(q, p);
    let mut zsum = z + &z.recip();
    zsum = zsum.div_f(&Float::with_val(p, 2));
    if zsum.is_zero() {
        return Err(QawError::SingularPoint(
            "divided difference undefined where z + 1/z = 0".into(),
        ));
    }
    let step = Float::with_val(p, &rq - &rq_inv);
    Ok(zsum.mul_f(&step))
}

/// (D_q f)(x) evaluated through the root z of 2x = z - 1/z.
pub fn aw_dq(f: &CurveFn, z: &Complex, q: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    let (rq, rq_inv) = half_shifts(q, p);
    let den = curve_denominator(z, q, ctx)?;
    let up = f.eval_z(&z.mul_f(&rq))?;
    let dn = f.eval_z(&z.mul_f(&rq_inv))?;
    Ok(&(&up - &dn) / &den)
}

/// (A_q f)(x) evaluated through the root z.
pub fn aw_avg(f: &CurveFn, z: &Complex, q: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    let (rq, rq_inv) = half_shifts(q, p);
    let up = f.eval_z(&z.mul_f(&rq))?;
    let dn = f.eval_z(&z.mul_f(&rq_inv))?;
    Ok((&up + &dn).div_f(&Float::with_val(p, 2)))
}

/// (D_q^m f)(x) by dynamic programming over the shift lattice q^(j/2) z,
/// j = -m..m: m+1 base evaluations instead of 2^m.
pub fn aw_dq_iter(
    f: &CurveFn,
    m: u32,
    z: &Complex,
    q: &Float,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let p = ctx.prec();
    let (rq, rq_inv) = half_shifts(q, p);
    let mm = m as i64;
    let mut vals: Vec<Complex> = Vec::with_capacity(m as usize + 1);
    for i in 0..=mm {
        let j = -mm + 2 * i;
        let shift = if j >= 0 {
            Float::with_val(p, (&rq).pow(j as u32))
        } else {
            Float::with_val(p, (&rq_inv).pow((-j) as u32))
        };
        vals.push(f.eval_z(&z.mul_f(&shift))?);
    }
    let step = Float::with_val(p, &rq - &rq_inv);
    for level in 1..=mm {
        let width = mm - level;
        let mut next = Vec::with_capacity(width as usize + 1);
        for i in 0..=width {
            let j = -width + 2 * i;
            let shift = if j >= 0 {
                Float::with_val(p, (&rq).pow(j as u32))
            } else {
                Float::with_val(p, (&rq_inv).pow((-j) as u32))
            };
            let zj = z.mul_f(&shift);
            let mut den = &zj + &zj.recip();
            den = den.div_f(&Float::with_val(p, 2)).mul_f(&step);
            if den.is_zero() {
                return Err(QawError::SingularPoint(
                    "iterated divided difference hits z + 1/z = 0".into(),
                ));
            }
            next.push(&(&vals[(i + 1) as usize] - &vals[i as usize]) / &den);
        }
        vals = next;
    }
    Ok(vals.into_iter().next().unwrap())
}

fn root_of(x: &Complex, ctx: &PrecisionContext) -> Complex {
    zpoint_from_x(x, ctx).z_big
}

// ---------------------------------------------------------------------------
// Identity sides

/// Sides of D_q (-a/z, az; q)_k =
/// -2a (1-q^k)/(1-q) (-a q^(1/2)/z, a q^(1/2) z; q)_(k-1).
pub fn dq_basis_sides(
    a: &Complex,
    k: u32,
    x: &Complex,
    q: &Float,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    let p = ctx.prec();
    let z = root_of(x, ctx);
    let f = CurveFn::new(|zz: &Complex| {
        let lo = qpoch_finite(&-&(a / zz), q, k, ctx);
        let hi = qpoch_finite(&(a * zz), q, k, ctx);
        Ok(&lo * &hi)
    });
    let lhs = aw_dq(&f, &z, q, ctx)?;
    let rhs = if k == 0 {
        Complex::zero(p)
    } else {
        let (rq, _) = half_shifts(q, p);
        let asq = a.mul_f(&rq);
        let lo = qpoch_finite(&-&(&asq / &z), q, k - 1, ctx);
        let hi = qpoch_finite(&(&asq * &z), q, k - 1, ctx);
        let mut c = Float::with_val(p, 1u32 - qpow(k as i64, q));
        c /= Float::with_val(p, 1u32 - q);
        c *= -2;
        (&(&lo * &hi) * a).mul_f(&c)
    };
    Ok((lhs, rhs))
}

/// Sides of the lowering relation: D_q applied to the degree-n polynomial
/// against the stated constant times the degree-(n-1) polynomial at
/// parameters q^(-1/2) t.
pub fn lowering_sides(
    family: &GramFamily,
    n: u32,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    let p = ctx.prec();
    let q = family.q();
    let z = root_of(x, ctx);
    let (rq, rq_inv) = half_shifts(q, p);
    let nn = n as i64;
    let one_minus_qn = Float::with_val(p, 1u32 - qpow(nn, q));
    let one_minus_q = Float::with_val(p, 1u32 - q);

    match family {
        GramFamily::FiniteFamily(par) => {
            let table = finite_recurrence_table(n, par, ctx)?;
            let f = CurveFn::from_table(&table, n);
            let lhs = aw_dq(&f, &z, q, ctx)?;
            let rhs = if n == 0 {
                Complex::zero(p)
            } else {
                let shifted = par.rescaled(&rq_inv);
                let table_dn = finite_recurrence_table(n - 1, &shifted, ctx)?;
                let val = table_dn.eval(n - 1, x);
                let mut c = (&q_over(nn + 3, &par.sigma4(), q).one_minus())
                    .mul_f(&one_minus_qn);
                c = c.div_f(&one_minus_q);
                let half_pow = Float::with_val(p, (&rq).pow(nn as i32 - 1));
                c = c.div_f(&half_pow);
                c = c.mul_f(&Float::with_val(p, 2));
                &c * &val
            };
            Ok((lhs, rhs))
        }
        GramFamily::InfiniteFamily(par) => {
            let table = infinite_recurrence_table(n, par, ctx)?;
            let f = CurveFn::from_table(&table, n);
            let lhs = aw_dq(&f, &z, q, ctx)?;
            let rhs = if n == 0 {
                Complex::zero(p)
            } else {
                let shifted = par.rescaled(&rq_inv);
                let table_dn = infinite_recurrence_table(n - 1, &shifted, ctx)?;
                let val = table_dn.eval(n - 1, x);
                let [t1, t2, t3] = &par.t;
                let mut den = &one_plus(&q_over(2, &(t1 * t2), q))
                    * &one_plus(&q_over(2, &(t2 * t3), q));
                den = &den * &(t2 * t3);
                den = den.mul_f(&one_minus_q);
                let mut num = val.mul_f(&one_minus_qn);
                let half_pow = Float::with_val(p, (&rq).pow(nn as u32 + 3));
                num = num.mul_f(&half_pow);
                num = num.mul_f(&Float::with_val(p, -2));
                &num / &den
            };
            Ok((lhs, rhs))
        }
    }
}

fn family_weight(family: &GramFamily) -> ContinuousWeight {
    match family {
        GramFamily::FiniteFamily(par) => ContinuousWeight::Normalized(par.clone()),
        GramFamily::InfiniteFamily(par) => ContinuousWeight::InfiniteFamily(par.clone()),
    }
}

fn rescaled_family(family: &GramFamily, f: &Float) -> GramFamily {
    match family {
        GramFamily::FiniteFamily(par) => GramFamily::FiniteFamily(par.rescaled(f)),
        GramFamily::InfiniteFamily(par) => GramFamily::InfiniteFamily(par.rescaled(f)),
    }
}

/// Sides of the raising relation
/// (1/w(x; q^(1/2) t)) D_q [w(x; t) p_n(x, t)] = const * p_(n+1)(x, q^(1/2) t),
/// with the stated constants for each family. Weights are the normalized
/// ones.
pub fn raising_sides(
    family: &GramFamily,
    n: u32,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    let p = ctx.prec();
    let q = family.q();
    let z = root_of(x, ctx);
    let (rq, rq_inv) = half_shifts(q, p);
    let nn = n as i64;
    let one_minus_q = Float::with_val(p, 1u32 - q);

    let w = family_weight(family);
    let up_family = rescaled_family(family, &rq);
    let w_up = family_weight(&up_family);

    let (table, table_up) = match family {
        GramFamily::FiniteFamily(par) => (
            finite_recurrence_table(n, par, ctx)?,
            finite_recurrence_table(n + 1, &par.rescaled(&rq), ctx)?,
        ),
        GramFamily::InfiniteFamily(par) => (
            infinite_recurrence_table(n, par, ctx)?,
            infinite_recurrence_table(n + 1, &par.rescaled(&rq), ctx)?,
        ),
    };
    let f = CurveFn::new(|zz: &Complex| {
        let wv = w.eval_at_z(zz, ctx)?;
        Ok(&wv * &table.eval(n, &x_from_z(zz)))
    });
    let denom = w_up.eval_at_z(&z, ctx)?;
    if denom.is_zero() {
        return Err(QawError::SingularPoint(
            "shifted weight vanishes at the sample point".into(),
        ));
    }
    let lhs = &aw_dq(&f, &z, q, ctx)? / &denom;

    let val = table_up.eval(n + 1, x);
    let rhs = match family {
        GramFamily::FiniteFamily(par) => {
            let s4 = par.sigma4();
            let mut prod = Complex::one(p);
            for j in 0..4 {
                for k in (j + 1)..4 {
                    prod = &prod * &one_plus(&q_over(1, &(&par.t[j] * &par.t[k]), q));
                }
            }
            let mut c = &q_over(2, &s4, q).one_minus() * &q_over(3, &s4, q).one_minus();
            c = &c / &prod.mul_f(&one_minus_q);
            let half_pow = Float::with_val(p, (&rq_inv).pow(nn as u32));
            c = c.mul_f(&half_pow).mul_f(&Float::with_val(p, 2));
            &c * &val
        }
        GramFamily::InfiniteFamily(par) => {
            let [t1, t2, t3] = &par.t;
            let mut den = (&(t1 * t1) * &(t2 * t3)).mul_f(&one_minus_q);
            den = &den * &one_plus(&q_over(1, &(t1 * t3), q));
            let mut num = val.mul_f(&qpow(3, q));
            let half_pow = Float::with_val(p, (&rq_inv).pow(nn as u32));
            num = num.mul_f(&half_pow).mul_f(&Float::with_val(p, 2));
            &num / &den
        }
    };
    Ok((lhs, rhs))
}

/// Sides of the q-Sturm-Liouville equation
/// (1/w(x; t)) D_q [w(x; q^(-1/2) t) D_q p_n(x; t)] = lambda_n p_n(x; t).
pub fn sturm_liouville_sides(
    family: &GramFamily,
    n: u32,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    let p = ctx.prec();
    let q = family.q();
    let z = root_of(x, ctx);
    let (_, rq_inv) = half_shifts(q, p);
    let nn = n as i64;
    let one_minus_qn = Float::with_val(p, 1u32 - qpow(nn, q));
    let mut one_minus_q_sq = Float::with_val(p, 1u32 - q);
    one_minus_q_sq.square_mut();

    let w = family_weight(family);
    let dn_family = rescaled_family(family, &rq_inv);
    let w_dn = family_weight(&dn_family);
    let table = match family {
        GramFamily::FiniteFamily(par) => finite_recurrence_table(n, par, ctx)?,
        GramFamily::InfiniteFamily(par) => infinite_recurrence_table(n, par, ctx)?,
    };
    let poly = CurveFn::from_table(&table, n);
    let inner = CurveFn::new(|zz: &Complex| {
        let wv = w_dn.eval_at_z(zz, ctx)?;
        Ok(&wv * &aw_dq(&poly, zz, q, ctx)?)
    });
    let w0 = w.eval_at_z(&z, ctx)?;
    if w0.is_zero() {
        return Err(QawError::SingularPoint(
            "weight vanishes at the sample point".into(),
        ));
    }
    let lhs = &aw_dq(&inner, &z, q, ctx)? / &w0;

    let val = table.eval(n, x);
    let rhs = match family {
        GramFamily::FiniteFamily(par) => {
            let s4 = par.sigma4();
            let mut prod = Complex::one(p);
            for j in 0..4 {
                for k in (j + 1)..4 {
                    prod = &prod * &one_plus(&q_over(2, &(&par.t[j] * &par.t[k]), q));
                }
            }
            let mut lam = &(&q_over(4, &s4, q).one_minus() * &q_over(5, &s4, q).one_minus())
                * &q_over(nn + 3, &s4, q).one_minus();
            lam = lam.mul_f(&one_minus_qn);
            lam = lam.mul_f(&qpow(1 - nn, q));
            lam = lam.mul_f(&Float::with_val(p, 4));
            lam = &lam / &prod.mul_f(&one_minus_q_sq);
            &lam * &val
        }
        GramFamily::InfiniteFamily(par) => {
            let [t1, t2, t3] = &par.t;
            let mut prod = &(&one_plus(&q_over(2, &(t1 * t2), q))
                * &one_plus(&q_over(2, &(t1 * t3), q)))
                * &one_plus(&q_over(2, &(t2 * t3), q));
            let t123 = &(t1 * t2) * t3;
            prod = &prod * &(&t123 * &t123);
            prod = prod.mul_f(&one_minus_q_sq);
            let mut lam = Complex::from_real(Float::with_val(p, -4 * &qpow(7, q)));
            lam = lam.mul_f(&one_minus_qn);
            lam = &lam / &prod;
            &lam * &val
        }
    };
    Ok((lhs, rhs))
}

/// Sides of the Rodrigues formula
/// (1/w(x; t)) D_q^n w(x; q^(-n/2) t) = const * p_n(x; t).
pub fn rodrigues_sides(
    family: &GramFamily,
    n: u32,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    let p = ctx.prec();
    let q = family.q();
    let z = root_of(x, ctx);
    let (rq, rq_inv) = half_shifts(q, p);
    let nn = n as i64;

    let w = family_weight(family);
    let scale = Float::with_val(p, (&rq_inv).pow(n));
    let dn_family = rescaled_family(family, &scale);
    let w_dn = family_weight(&dn_family);
    let wf = CurveFn::from_weight(&w_dn, ctx);
    let w0 = w.eval_at_z(&z, ctx)?;
    if w0.is_zero() {
        return Err(QawError::SingularPoint(
            "weight vanishes at the sample point".into(),
        ));
    }
    let lhs = &aw_dq_iter(&wf, n, &z, q, ctx)? / &w0;

    let mut two_over = Float::with_val(p, 1u32 - q);
    two_over.recip_mut();
    two_over *= 2u32;
    let two_over_n = Float::with_val(p, (&two_over).pow(n));

    let rhs = match family {
        GramFamily::FiniteFamily(par) => {
            let table = finite_recurrence_table(n, par, ctx)?;
            let val = table.eval(n, x);
            let s4 = par.sigma4();
            let mut prod = Complex::one(p);
            for j in 0..4 {
                for k in (j + 1)..4 {
                    let a = -&q_over(2, &(&par.t[j] * &par.t[k]), q);
                    prod = &prod * &qpoch_finite(&a, q, n, ctx);
                }
            }
            let poch = qpoch_finite(&q_over(4, &s4, q), q, 2 * n, ctx);
            // q^(-n(n-1)/4) = (1/sqrt q)^(n(n-1)/2)
            let half_pow = Float::with_val(p, (&rq_inv).pow((nn * (nn - 1) / 2) as u32));
            let c = (&poch / &prod).mul_f(&two_over_n).mul_f(&half_pow);
            &c * &val
        }
        GramFamily::InfiniteFamily(par) => {
            let table = infinite_recurrence_table(n, par, ctx)?;
            let val = table.eval(n, x);
            let [t1, t2, t3] = &par.t;
            let mut den = &(t1 * t1).powi(nn) * &(t2 * t3).powi(nn);
            den = &den * &qpoch_finite(&-&q_over(2, &(t1 * t3), q), q, n, ctx);
            // q^((3n^2+17n)/4) = (sqrt q)^((3n^2+17n)/2), the exponent even
            let half_pow = Float::with_val(p, (&rq).pow(((3 * nn * nn + 17 * nn) / 2) as u32));
            let c = val.mul_f(&two_over_n).mul_f(&half_pow);
            &c / &den
        }
    };
    Ok((lhs, rhs))
}

/// Sides of the product rule
/// D_q(fg) = (A_q f)(D_q g) + (A_q g)(D_q f) at x.
pub fn product_rule_sides(
    f: &CurveFn,
    g: &CurveFn,
    x: &Complex,
    q: &Float,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    let z = root_of(x, ctx);
    let prod = CurveFn::new(|zz: &Complex| Ok(&f.eval_z(zz)? * &g.eval_z(zz)?));
    let lhs = aw_dq(&prod, &z, q, ctx)?;
    let rhs = &(&aw_avg(f, &z, q, ctx)? * &aw_dq(g, &z, q, ctx)?)
        + &(&aw_avg(g, &z, q, ctx)? * &aw_dq(f, &z, q, ctx)?);
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Inner products and integration by parts

/// Bilateral lattice pairing <f, g>_alpha =
/// sum_n F(z_n) G(z_n) (q^(-1/2) - q^(1/2)) (z_n + 1/z_n)/2 over z_n =
/// q^(-n)/alpha. Convergence must come from f and g; shells are added
/// outward until three in a row are negligible. alpha is any positive
/// number here (shifted pairings leave the (q, 1) band).
pub fn lattice_pairing(
    f: &CurveFn,
    g: &CurveFn,
    q: &Float,
    alpha: &Float,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    ctx.check_base(q)?;
    if !(*alpha > 0u32) {
        return Err(QawError::UnsupportedParameters(
            "pairing parameter alpha must be positive".into(),
        ));
    }
    let p = ctx.prec();
    let (rq, rq_inv) = half_shifts(q, p);
    let step = Float::with_val(p, &rq_inv - &rq);
    let mut cut = Float::with_val(p, ctx.series_tol());
    cut /= 2u32;

    let mut total = Complex::zero(p);
    let mut scale = Float::new(p);
    let mut consecutive_small = 0;
    for shell in 0..=MAX_PAIRING_SHELLS {
        let mut shell_val = Complex::zero(p);
        let members: &[i64] = if shell == 0 { &[0] } else { &[shell, -shell] };
        for &n in members {
            let mut zf = qpow(-n, q);
            zf /= alpha;
            let zn = Complex::from_real(zf);
            let mut wn = (&zn + &zn.recip()).mul_f(&step);
            wn = wn.div_f(&Float::with_val(p, 2));
            let term = &(&f.eval_z(&zn)? * &g.eval_z(&zn)?) * &wn;
            shell_val = &shell_val + &term;
        }
        let av = shell_val.abs();
        if av > scale {
            scale = av.clone();
        }
        let thr = Float::with_val(p, &scale * &cut);
        consecutive_small = if av > thr { 0 } else { consecutive_small + 1 };
        total = &total + &shell_val;
        if consecutive_small >= 3 && shell >= 4 {
            return Ok(total);
        }
    }
    Err(QawError::TruncationFailure(
        "pairing summand did not decay within the shell budget".into(),
    ))
}

/// Where an integration-by-parts residual is evaluated: the line integral
/// of the interchange identity, or the lattice pairing with its
/// alpha -> alpha q^(1/2) shift on the right.
pub enum IbpMeasure {
    Line,
    Lattice { alpha: Float },
}

/// Residual of integration by parts: |<D_q f, g> + <f, D_q g>| over the
/// larger side (floored at 1), with the measure-specific pairing.
pub fn integration_by_parts_residual(
    f: &CurveFn,
    g: &CurveFn,
    q: &Float,
    measure: &IbpMeasure,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let p = ctx.prec();
    match measure {
        IbpMeasure::Line => {
            let df_g = crate::measures::integrate_line(
                q,
                |x| {
                    let z = Complex::from_real(crate::measures::zpos_real(x));
                    Ok(&aw_dq(f, &z, q, ctx)? * &g.eval_z(&z)?)
                },
                ctx,
            )?;
            let dg_f = crate::measures::integrate_line(
                q,
                |x| {
                    let z = Complex::from_real(crate::measures::zpos_real(x));
                    Ok(&aw_dq(g, &z, q, ctx)? * &f.eval_z(&z)?)
                },
                ctx,
            )?;
            Ok(residual_scaled(&df_g, &-&dg_f, p))
        }
        IbpMeasure::Lattice { alpha } => {
            let df = CurveFn::new(|zz: &Complex| aw_dq(f, zz, q, ctx));
            let dg = CurveFn::new(|zz: &Complex| aw_dq(g, zz, q, ctx));
            let lhs = lattice_pairing(&df, g, q, alpha, ctx)?;
            let (rq, _) = half_shifts(q, p);
            let shifted = Float::with_val(p, alpha * &rq);
            let rhs = lattice_pairing(f, &dg, q, &shifted, ctx)?;
            Ok(residual_scaled(&lhs, &-&rhs, p))
        }
    }
}

// ---------------------------------------------------------------------------
// Reports and thin residual wrappers

/// Summary of one identity checked over a set of sample points.
#[derive(Clone, Debug)]
pub struct OperatorIdentityReport {
    pub identity: String,
    pub samples: usize,
    pub max_abs: Float,
    pub scale: Float,
    pub max_rel: Float,
}

impl OperatorIdentityReport {
    pub fn from_sides(identity: &str, sides: &[(Complex, Complex)], p: u32) -> Self {
        let mut max_abs = Float::new(p);
        let mut scale = Float::new(p);
        let mut max_rel = Float::new(p);
        for (lhs, rhs) in sides {
            let d = (lhs - rhs).abs();
            if d > max_abs {
                max_abs = d;
            }
            for side in [lhs, rhs] {
                let a = side.abs();
                if a > scale {
                    scale = a;
                }
            }
            let r = residual_scaled(lhs, rhs, p);
            if r > max_rel {
                max_rel = r;
            }
        }
        Self {
            identity: identity.to_string(),
            samples: sides.len(),
            max_abs,
            scale,
            max_rel,
        }
    }
}

pub fn dq_basis_residual(
    a: &Complex,
    k: u32,
    x: &Complex,
    q: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let (l, r) = dq_basis_sides(a, k, x, q, ctx)?;
    Ok(residual_scaled(&l, &r, ctx.prec()))
}

pub fn lowering_residual(
    family: &GramFamily,
    n: u32,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let (l, r) = lowering_sides(family, n, x, ctx)?;
    Ok(residual_scaled(&l, &r, ctx.prec()))
}

pub fn raising_residual(
    family: &GramFamily,
    n: u32,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let (l, r) = raising_sides(family, n, x, ctx)?;
    Ok(residual_scaled(&l, &r, ctx.prec()))
}

pub fn sturm_liouville_residual(
    family: &GramFamily,
    n: u32,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let (l, r) = sturm_liouville_sides(family, n, x, ctx)?;
    Ok(residual_scaled(&l, &r, ctx.prec()))
}

pub fn rodrigues_residual(
    family: &GramFamily,
    n: u32,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let (l, r) = rodrigues_sides(family, n, x, ctx)?;
    Ok(residual_scaled(&l, &r, ctx.prec()))
}

pub fn product_rule_residual(
    f: &CurveFn,
    g: &CurveFn,
    x: &Complex,
    q: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let (l, r) = product_rule_sides(f, g, x, q, ctx)?;
    Ok(residual_scaled(&l, &r, ctx.prec()))
}
