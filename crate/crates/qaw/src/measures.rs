//! Orthogonality measures for both polynomial families: continuous weights
//! on the real line, the closed-form q-beta line integral, adaptive
//! quadrature along the curve 2x = z - 1/z, bilateral discrete measures on
//! geometric lattices, total masses, Gram matrices against the closed-form
//! norms, and the divided-difference equations that characterize the
//! weight.
//!
//! Quadrature works in the variable u with z = q^(-u), so a unit step in u
//! advances one geometric shell in z. Integrands built from the weights
//! decay per shell like powers of the parameter product, which drives both
//! the outward sweep and the tail control. Discrete sums run outward in
//! shells |n| = 0, 1, 2, ... and stop once three consecutive shells are
//! negligible against the largest one seen.

use crate::error::{QawError, Result};
use crate::families::{
    finite_recurrence_coeffs, infinite_recurrence_coeffs, finite_recurrence_table,
    infinite_recurrence_table, neg_q_over, one_plus, q_over, qpow, FiniteParams, InfiniteParams,
};
use crate::numctx::{rel_error_f, Complex, PrecisionContext};
use crate::qseries::{qpoch_finite, qpoch_finite_f, qpoch_infinite, qpoch_infinite_f,
    qpoch_infinite_list};
use rug::ops::Pow;
use rug::Float;

/// Points per quadrature panel. Unit panels of these integrands are smooth
/// on the u scale, so a soft rule plus adaptive bisection reaches any
/// working tolerance.
const GL_POINTS: usize = 21;

/// Hard cap on the outward panel sweep in either direction.
const MAX_PANELS: i64 = 600;

/// Hard cap on bisection depth during panel refinement.
const MAX_DEPTH: u32 = 48;

/// Hard cap on discrete shells in either direction.
const MAX_SHELLS: i64 = 500;

// ---------------------------------------------------------------------------
// Gauss-Legendre panels

/// Legendre P_n and P_n' at x by the three-term recurrence.
fn legendre_pair(x: &Float, n: usize, p: u32) -> (Float, Float) {
    let mut prev = Float::with_val(p, 1);
    let mut cur = Float::with_val(p, x);
    for k in 1..n {
        let k32 = k as u32;
        let mut next = Float::with_val(p, x * &cur);
        next *= 2 * k32 + 1;
        next -= Float::with_val(p, &prev * k32);
        next /= k32 + 1;
        prev = std::mem::replace(&mut cur, next);
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1); nodes are interior so the
    // denominator stays away from zero.
    let mut num = Float::with_val(p, x * &cur);
    num -= &prev;
    num *= n as u32;
    let mut den = Float::with_val(p, x * x);
    den -= 1;
    (cur, num / den)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// refined by Newton iteration from Chebyshev-angle starting guesses.
fn gauss_legendre(npts: usize, ctx: &PrecisionContext) -> (Vec<Float>, Vec<Float>) {
    let p = ctx.prec();
    let mut nodes = vec![Float::new(p); npts];
    let mut weights = vec![Float::new(p); npts];
    let step_floor = Float::with_val(p, 2u32).pow(-((p as i32) - 8));
    let half = (npts + 1) / 2;
    for i in 0..half {
        let angle = std::f64::consts::PI * (i as f64 + 0.75) / (npts as f64 + 0.5);
        let mut x = Float::with_val(p, angle.cos());
        for _ in 0..200 {
            let (v, d) = legendre_pair(&x, npts, p);
            let step = Float::with_val(p, &v / &d);
            x -= &step;
            if step.abs() < step_floor {
                break;
            }
        }
        let (_, d) = legendre_pair(&x, npts, p);
        let mut one_minus_x2 = Float::with_val(p, 1);
        one_minus_x2 -= Float::with_val(p, &x * &x);
        let mut den = Float::with_val(p, &d * &d);
        den *= &one_minus_x2;
        let w = Float::with_val(p, 2) / den;
        nodes[npts - 1 - i] = -x.clone();
        weights[npts - 1 - i] = w.clone();
        nodes[i] = x;
        weights[i] = w;
    }
    (nodes, weights)
}

/// Panel machinery bound to one base q: the Gauss-Legendre rule and the
/// curve substitution z = q^(-u), x = (z - 1/z)/2, dx = log(1/q)(z+1/z)/2 du.
struct CurveQuad {
    gl_x: Vec<Float>,
    gl_w: Vec<Float>,
    lg: Float,
    p: u32,
}

impl CurveQuad {
    fn new(q: &Float, ctx: &PrecisionContext) -> Self {
        let (gl_x, gl_w) = gauss_legendre(GL_POINTS, ctx);
        let p = ctx.prec();
        let lg = -Float::with_val(p, q.ln_ref());
        Self { gl_x, gl_w, lg, p }
    }

    /// Rule value of the Jacobian-weighted integrand over u in [a, b].
    fn panel<F>(&self, a: &Float, b: &Float, dim: usize, f: &mut F) -> Result<Vec<Float>>
    where
        F: FnMut(&Float, &Float) -> Result<Vec<Float>>,
    {
        let p = self.p;
        let mut halfw = Float::with_val(p, b - a);
        halfw /= 2u32;
        let mut mid = Float::with_val(p, a + b);
        mid /= 2u32;
        let mut acc = vec![Float::new(p); dim];
        for (xn, wn) in self.gl_x.iter().zip(&self.gl_w) {
            let mut u = Float::with_val(p, xn * &halfw);
            u += &mid;
            let z = Float::with_val(p, &u * &self.lg).exp();
            let zr = Float::with_val(p, z.recip_ref());
            let mut x = Float::with_val(p, &z - &zr);
            x /= 2u32;
            let vals = f(&x, &z)?;
            let mut jac = Float::with_val(p, &z + &zr);
            jac /= 2u32;
            jac *= &self.lg;
            jac *= wn;
            for (slot, v) in acc.iter_mut().zip(vals) {
                *slot += v * &jac;
            }
        }
        for slot in acc.iter_mut() {
            *slot *= &halfw;
        }
        Ok(acc)
    }
}

fn refine_panel<F>(
    cq: &CurveQuad,
    a: &Float,
    b: &Float,
    whole: Vec<Float>,
    tol: &[Float],
    depth: u32,
    dim: usize,
    f: &mut F,
) -> Result<Vec<Float>>
where
    F: FnMut(&Float, &Float) -> Result<Vec<Float>>,
{
    let p = cq.p;
    let mut mid = Float::with_val(p, a + b);
    mid /= 2u32;
    let left = cq.panel(a, &mid, dim, f)?;
    let right = cq.panel(&mid, b, dim, f)?;
    let halves: Vec<Float> = left
        .iter()
        .zip(&right)
        .map(|(l, r)| Float::with_val(p, l + r))
        .collect();
    let ok = halves
        .iter()
        .zip(&whole)
        .zip(tol)
        .all(|((h, w), t)| Float::with_val(p, h - w).abs() <= *t);
    if ok {
        return Ok(halves);
    }
    if depth >= MAX_DEPTH {
        return Err(QawError::TruncationFailure(
            "quadrature panel refinement exceeded the depth limit".into(),
        ));
    }
    let half_tol: Vec<Float> = tol.iter().map(|t| Float::with_val(p, t / 2u32)).collect();
    let l = refine_panel(cq, a, &mid, left, &half_tol, depth + 1, dim, f)?;
    let r = refine_panel(cq, &mid, b, right, &half_tol, depth + 1, dim, f)?;
    Ok(l
        .iter()
        .zip(&r)
        .map(|(x, y)| Float::with_val(p, x + y))
        .collect())
}

/// Integrates a vector integrand over the real line in x. The closure
/// receives (x, z) with z = q^(-u) > 0 on the positive branch and must not
/// include the Jacobian. Sweeps unit panels outward until three in a row
/// are negligible, then bisects panels until the componentwise error sits
/// well below quad_tol times the observed scale.
pub(crate) fn integrate_curve_vec<F>(
    q: &Float,
    dim: usize,
    f: &mut F,
    ctx: &PrecisionContext,
) -> Result<Vec<Float>>
where
    F: FnMut(&Float, &Float) -> Result<Vec<Float>>,
{
    ctx.check_base(q)?;
    let p = ctx.prec();
    let cq = CurveQuad::new(q, ctx);

    // Sweep cut: panels below scale * quad_tol * 1e-8 for three in a row
    // end the sweep, leaving the truncated tail far under quad_tol.
    let mut sweep_cut = Float::with_val(p, ctx.quad_tol());
    sweep_cut /= 100_000_000u32;

    let mut panels: Vec<(i64, Vec<Float>)> = Vec::new();
    let mut scale = vec![Float::new(p); dim];
    for dir in [1i64, -1] {
        let mut consecutive_small = 0;
        let mut k = if dir > 0 { 0 } else { -1 };
        loop {
            let a = Float::with_val(p, k);
            let b = Float::with_val(p, k + 1);
            let val = cq.panel(&a, &b, dim, f)?;
            let mut all_small = true;
            for (s, v) in scale.iter_mut().zip(&val) {
                let av = Float::with_val(p, v.abs_ref());
                if av > *s {
                    *s = av.clone();
                }
                let thr = Float::with_val(p, &*s * &sweep_cut);
                if av > thr {
                    all_small = false;
                }
            }
            panels.push((k, val));
            consecutive_small = if all_small { consecutive_small + 1 } else { 0 };
            if consecutive_small >= 3 && k.abs() >= 4 {
                break;
            }
            k += dir;
            if k.abs() > MAX_PANELS {
                return Err(QawError::TruncationFailure(
                    "integrand tail did not decay within the panel budget".into(),
                ));
            }
        }
    }

    // Refinement budget: total error per component at scale * quad_tol/1000,
    // split evenly across panels; negligible panels are accepted as-is.
    let npanels = panels.len() as u32;
    let share: Vec<Float> = scale
        .iter()
        .map(|s| {
            let mut t = Float::with_val(p, s * ctx.quad_tol());
            t /= 1000u32;
            t /= npanels;
            t
        })
        .collect();
    let mut total = vec![Float::new(p); dim];
    for (k, val) in panels {
        let negligible = val
            .iter()
            .zip(&share)
            .all(|(v, s)| Float::with_val(p, v.abs_ref()) <= *s);
        let contrib = if negligible {
            val
        } else {
            let a = Float::with_val(p, k);
            let b = Float::with_val(p, k + 1);
            refine_panel(&cq, &a, &b, val, &share, 0, dim, f)?
        };
        for (t, v) in total.iter_mut().zip(contrib) {
            *t += v;
        }
    }
    Ok(total)
}

/// Adaptive line integral of a scalar complex function of real x.
pub fn integrate_line<F>(q: &Float, mut f: F, ctx: &PrecisionContext) -> Result<Complex>
where
    F: FnMut(&Float) -> Result<Complex>,
{
    let mut g = |x: &Float, _z: &Float| -> Result<Vec<Float>> {
        let v = f(x)?;
        Ok(vec![v.re, v.im])
    };
    let out = integrate_curve_vec(q, 2, &mut g, ctx)?;
    let mut it = out.into_iter();
    Ok(Complex::new(it.next().unwrap(), it.next().unwrap()))
}

// ---------------------------------------------------------------------------
// Continuous weights

/// The root of 2x = z - 1/z on the positive real axis, in the
/// cancellation-free form for either sign of x.
pub(crate) fn zpos_real(x: &Float) -> Float {
    let p = x.prec();
    let mut s = Float::with_val(p, x * x);
    s += 1u32;
    let s = s.sqrt();
    if *x >= 0u32 {
        Float::with_val(p, x + &s)
    } else {
        let d = Float::with_val(p, &s - x);
        Float::with_val(p, d.recip_ref())
    }
}

/// Raw curve form 2z prod_j (-t_j z, t_j/z; q)_inf / (-z^2, -q/z^2; q)_inf.
/// Odd under z -> -1/z, so all evaluations fix the positive branch.
fn raw_weight_z_c(ts: &[Complex], q: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    let two = Float::with_val(p, 2);
    let mut num = z.mul_f(&two);
    let zr = z.recip();
    for t in ts {
        num = &num * &qpoch_infinite(&-&(t * z), q, ctx)?;
        num = &num * &qpoch_infinite(&(t * &zr), q, ctx)?;
    }
    let z2 = z * z;
    let mut den = qpoch_infinite(&-&z2, q, ctx)?;
    den = &den * &qpoch_infinite(&-&z2.recip().mul_f(q), q, ctx)?;
    if den.is_zero() {
        return Err(QawError::Pole("weight denominator vanishes".into()));
    }
    Ok(&num / &den)
}

/// Real fast path of the raw curve form for real parameters and z > 0.
fn raw_weight_z_f(ts: &[Float], q: &Float, z: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.prec();
    let zr = Float::with_val(p, z.recip_ref());
    let mut num = Float::with_val(p, 2 * z);
    for t in ts {
        let a = -Float::with_val(p, t * z);
        num *= qpoch_infinite_f(&a, q, ctx)?;
        let b = Float::with_val(p, t * &zr);
        num *= qpoch_infinite_f(&b, q, ctx)?;
    }
    let z2 = Float::with_val(p, z * z);
    let mut den = qpoch_infinite_f(&-z2.clone(), q, ctx)?;
    let qz2 = -Float::with_val(p, q / &z2);
    den *= qpoch_infinite_f(&qz2, q, ctx)?;
    // Denominator factors are 1 + z^2 q^k and 1 + q^{k+1}/z^2, all positive.
    Ok(num / den)
}

/// A weight on the real line: the raw four-parameter product form, its
/// normalized version with unit mass, or the three-parameter weight of the
/// infinite family.
#[derive(Clone, Debug)]
pub enum ContinuousWeight {
    Raw(FiniteParams),
    Normalized(FiniteParams),
    InfiniteFamily(InfiniteParams),
}

impl ContinuousWeight {
    pub fn q(&self) -> &Float {
        match self {
            ContinuousWeight::Raw(p) | ContinuousWeight::Normalized(p) => &p.q,
            ContinuousWeight::InfiniteFamily(p) => &p.q,
        }
    }

    fn ts(&self) -> &[Complex] {
        match self {
            ContinuousWeight::Raw(p) | ContinuousWeight::Normalized(p) => &p.t,
            ContinuousWeight::InfiniteFamily(p) => &p.t,
        }
    }

    /// Whether the line integral converges: |t1 t2 t3 t4| < q^3 for the
    /// four-parameter kinds, always for the three-parameter kind.
    pub fn normalizable(&self) -> bool {
        match self {
            ContinuousWeight::Raw(par) | ContinuousWeight::Normalized(par) => {
                par.sigma4().abs() < qpow(3, &par.q)
            }
            ContinuousWeight::InfiniteFamily(_) => true,
        }
    }

    /// Multiplicative constant relative to the raw curve form.
    pub fn norm_constant(&self, ctx: &PrecisionContext) -> Result<Complex> {
        let p = ctx.prec();
        match self {
            ContinuousWeight::Raw(_) => Ok(Complex::one(p)),
            ContinuousWeight::Normalized(par) => {
                let q = &par.q;
                let num = qpoch_infinite(&par.sigma4().mul_f(&qpow(-3, q)), q, ctx)?;
                let mut den = Complex::from_real(qpoch_infinite_f(q, q, ctx)?);
                let lg = -Float::with_val(p, q.ln_ref());
                den = den.mul_f(&lg);
                for j in 0..4 {
                    for k in (j + 1)..4 {
                        let a = -&(&par.t[j] * &par.t[k]).div_f(q);
                        den = &den * &qpoch_infinite(&a, q, ctx)?;
                    }
                }
                if den.is_zero() {
                    return Err(QawError::Pole("normalization constant diverges".into()));
                }
                Ok(&num / &den)
            }
            ContinuousWeight::InfiniteFamily(par) => {
                let q = &par.q;
                let mut den = Complex::from_real(qpoch_infinite_f(q, q, ctx)?);
                let lg = -Float::with_val(p, q.ln_ref());
                den = den.mul_f(&lg);
                for j in 0..3 {
                    for k in (j + 1)..3 {
                        let a = -&(&par.t[j] * &par.t[k]).div_f(q);
                        den = &den * &qpoch_infinite(&a, q, ctx)?;
                    }
                }
                if den.is_zero() {
                    return Err(QawError::Pole("normalization constant diverges".into()));
                }
                Ok(den.recip())
            }
        }
    }

    /// Curve-form value at a point z (callers pass the positive branch).
    pub fn eval_at_z(&self, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
        let raw = raw_weight_z_c(self.ts(), self.q(), z, ctx)?;
        Ok(&raw * &self.norm_constant(ctx)?)
    }

    /// Value at real x via the positive branch z_pos. Real for real
    /// parameters and for conjugate-pair parameters.
    pub fn eval(&self, x: &Float, ctx: &PrecisionContext) -> Result<Complex> {
        let z = Complex::from_real(zpos_real(x));
        self.eval_at_z(&z, ctx)
    }
}

/// Closed form of the line integral of the raw four-parameter weight:
/// log(1/q) (q; q)_inf prod_{j<k} (-t_j t_k/q; q)_inf / (t1 t2 t3 t4/q^3; q)_inf,
/// valid for |t1 t2 t3 t4| < q^3.
pub fn askey_integral_closed_form(par: &FiniteParams, ctx: &PrecisionContext) -> Result<Complex> {
    if !(par.sigma4().abs() < qpow(3, &par.q)) {
        return Err(QawError::UnsupportedParameters(
            "line integral requires |t1 t2 t3 t4| < q^3".into(),
        ));
    }
    let c = ContinuousWeight::Normalized(par.clone()).norm_constant(ctx)?;
    if c.is_zero() {
        return Err(QawError::Pole("normalization constant vanishes".into()));
    }
    Ok(c.recip())
}

/// Ground weight of the bilateral lattice measures:
/// (-2z/log q) / (q, -z^2, -q/z^2; q)_inf with unit total integral.
pub fn askey_weight(x: &Float, q: &Float, ctx: &PrecisionContext) -> Result<Float> {
    ctx.check_base(q)?;
    let p = ctx.prec();
    let z = zpos_real(x);
    let lg = -Float::with_val(p, q.ln_ref());
    let z2 = Float::with_val(p, &z * &z);
    let mut den = qpoch_infinite_f(q, q, ctx)?;
    den *= qpoch_infinite_f(&-z2.clone(), q, ctx)?;
    let qz2 = -Float::with_val(p, q / &z2);
    den *= qpoch_infinite_f(&qz2, q, ctx)?;
    den *= &lg;
    let num = Float::with_val(p, 2 * &z);
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// Discrete measures

/// Denominator (-a^2, -q/a^2, q; q)_inf shared by every lattice mass.
fn mass_norm(q: &Float, alpha: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.prec();
    let a2 = Float::with_val(p, alpha * alpha);
    let mut n = qpoch_infinite_f(&-a2.clone(), q, ctx)?;
    let qa2 = -Float::with_val(p, q / &a2);
    n *= qpoch_infinite_f(&qa2, q, ctx)?;
    n *= qpoch_infinite_f(q, q, ctx)?;
    Ok(n)
}

fn node_z(q: &Float, alpha: &Float, n: i64) -> Float {
    let p = q.prec();
    Float::with_val(p, qpow(-n, q) / alpha)
}

fn node_x(q: &Float, alpha: &Float, n: i64) -> Float {
    let p = q.prec();
    let mut x = Float::with_val(p, qpow(-n, q) / alpha);
    x -= Float::with_val(p, alpha * &qpow(n, q));
    x /= 2u32;
    x
}

fn node_mass(q: &Float, alpha: &Float, n: i64, norm: &Float) -> Float {
    let p = q.prec();
    let mut m = qpow(4 * n, alpha);
    m *= qpow(n * (2 * n - 1), q);
    let mut grow = Float::with_val(p, alpha * alpha);
    grow *= qpow(2 * n, q);
    grow += 1u32;
    m *= grow;
    m / norm
}

/// Lattice nodes x_n = (q^(-n)/alpha - alpha q^n)/2 and masses m_n for
/// n in [nmin, nmax]. Nodes are strictly increasing; the full bilateral
/// mass is 1.
pub fn discrete_nodes_masses(
    q: &Float,
    alpha: &Float,
    nmin: i64,
    nmax: i64,
    ctx: &PrecisionContext,
) -> Result<(Vec<Float>, Vec<Float>)> {
    ctx.check_base(q)?;
    if !(*alpha > *q && *alpha < 1u32) {
        return Err(QawError::UnsupportedParameters(format!(
            "lattice parameter alpha = {alpha} must lie in (q, 1)"
        )));
    }
    if nmin > nmax {
        return Err(QawError::InvalidArgument("empty lattice range".into()));
    }
    let norm = mass_norm(q, alpha, ctx)?;
    let mut nodes = Vec::with_capacity((nmax - nmin + 1) as usize);
    let mut masses = Vec::with_capacity(nodes.capacity());
    for n in nmin..=nmax {
        nodes.push(node_x(q, alpha, n));
        masses.push(node_mass(q, alpha, n, &norm));
    }
    Ok((nodes, masses))
}

/// Product attached to the lattice measure at each node: none, the
/// four-parameter form with its normalizing constant (unit total mass), or
/// the bare three-parameter product prod_j (-t_j z, t_j/z; q)_inf, which is
/// the vanishing-fourth-parameter limit of the four-parameter product and
/// carries total mass prod_{j<k} (-t_j t_k/q; q)_inf.
#[derive(Clone, Debug)]
pub enum Attachment {
    None,
    FiniteFamily(FiniteParams),
    InfiniteFamily(InfiniteParams),
}

/// A bilateral lattice measure with an optional attached product.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    pub q: Float,
    pub alpha: Float,
    pub attachment: Attachment,
}

impl DiscreteMeasure {
    pub fn new(
        q: Float,
        alpha: Float,
        attachment: Attachment,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        ctx.check_base(&q)?;
        if !(alpha > q && alpha < 1u32) {
            return Err(QawError::UnsupportedParameters(format!(
                "lattice parameter alpha = {alpha} must lie in (q, 1)"
            )));
        }
        let base_matches = match &attachment {
            Attachment::None => true,
            Attachment::FiniteFamily(p) => p.q == q,
            Attachment::InfiniteFamily(p) => p.q == q,
        };
        if !base_matches {
            return Err(QawError::InvalidArgument(
                "attachment base differs from the measure base".into(),
            ));
        }
        Ok(Self {
            q,
            alpha,
            attachment,
        })
    }
}

/// z-independent factor of the attachment.
fn attachment_constant(att: &Attachment, ctx: &PrecisionContext) -> Result<Complex> {
    match att {
        Attachment::None | Attachment::InfiniteFamily(_) => Ok(Complex::one(ctx.prec())),
        Attachment::FiniteFamily(par) => {
            let q = &par.q;
            let num = qpoch_infinite(&par.sigma4().mul_f(&qpow(-3, q)), q, ctx)?;
            let mut den = Complex::one(ctx.prec());
            for j in 0..4 {
                for k in (j + 1)..4 {
                    let a = -&(&par.t[j] * &par.t[k]).div_f(q);
                    den = &den * &qpoch_infinite(&a, q, ctx)?;
                }
            }
            if den.is_zero() {
                return Err(QawError::Pole("attachment constant diverges".into()));
            }
            Ok(&num / &den)
        }
    }
}

/// z-dependent factor of the attachment at a lattice point. Real
/// parameters and conjugate pairs give real values; the roundoff
/// imaginary part is discarded by the caller.
fn attachment_z(att: &Attachment, z: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    match att {
        Attachment::None => Ok(Complex::one(p)),
        Attachment::FiniteFamily(par) => {
            let q = &par.q;
            let zr = Float::with_val(p, z.recip_ref());
            let mut acc = Complex::one(p);
            for t in &par.t {
                acc = &acc * &qpoch_infinite(&-&t.mul_f(z), q, ctx)?;
                acc = &acc * &qpoch_infinite(&t.mul_f(&zr), q, ctx)?;
            }
            Ok(acc)
        }
        Attachment::InfiniteFamily(par) => {
            let q = &par.q;
            let zr = Float::with_val(p, z.recip_ref());
            let mut acc = Complex::one(p);
            for t in &par.t {
                acc = &acc * &qpoch_infinite(&-&t.mul_f(z), q, ctx)?;
                acc = &acc * &qpoch_infinite(&t.mul_f(&zr), q, ctx)?;
            }
            Ok(acc)
        }
    }
}

/// Bilateral lattice sum of a vector integrand times mass and attachment.
/// Shells |n| = k are added outward until three consecutive shells are
/// negligible in every component.
pub(crate) fn discrete_sum_vec<F>(
    meas: &DiscreteMeasure,
    dim: usize,
    f: &mut F,
    ctx: &PrecisionContext,
) -> Result<Vec<Float>>
where
    F: FnMut(&Float, &Float) -> Result<Vec<Float>>,
{
    let p = ctx.prec();
    let q = &meas.q;
    let alpha = &meas.alpha;
    let norm = mass_norm(q, alpha, ctx)?;
    let att_const = attachment_constant(&meas.attachment, ctx)?;
    let att_const = real_part_checked(&att_const, "attachment constant", ctx)?;
    let mut cut = Float::with_val(p, ctx.series_tol());
    cut /= 2u32;

    let mut total = vec![Float::new(p); dim];
    let mut scale = vec![Float::new(p); dim];
    let mut consecutive_small = 0;
    for shell in 0..=MAX_SHELLS {
        let mut shell_vals = vec![Float::new(p); dim];
        let members: &[i64] = if shell == 0 { &[0] } else { &[shell, -shell] };
        for &n in members {
            let z = node_z(q, alpha, n);
            let x = node_x(q, alpha, n);
            let mut w = node_mass(q, alpha, n, &norm);
            w *= attachment_z(&meas.attachment, &z, ctx)?.re;
            w *= &att_const;
            let vals = f(&x, &z)?;
            for (slot, v) in shell_vals.iter_mut().zip(vals) {
                *slot += v * &w;
            }
        }
        let mut all_small = true;
        for (s, v) in scale.iter_mut().zip(&shell_vals) {
            let av = Float::with_val(p, v.abs_ref());
            if av > *s {
                *s = av.clone();
            }
            let thr = Float::with_val(p, &*s * &cut);
            if av > thr {
                all_small = false;
            }
        }
        for (t, v) in total.iter_mut().zip(shell_vals) {
            *t += v;
        }
        consecutive_small = if all_small { consecutive_small + 1 } else { 0 };
        if consecutive_small >= 3 && shell >= 4 {
            return Ok(total);
        }
    }
    Err(QawError::TruncationFailure(
        "lattice summand did not decay within the shell budget".into(),
    ))
}

/// Bilateral lattice sum of a scalar function of x against the measure.
pub fn discrete_sum<F>(meas: &DiscreteMeasure, mut f: F, ctx: &PrecisionContext) -> Result<Complex>
where
    F: FnMut(&Float) -> Result<Complex>,
{
    let mut g = |x: &Float, _z: &Float| -> Result<Vec<Float>> {
        let v = f(x)?;
        Ok(vec![v.re, v.im])
    };
    let out = discrete_sum_vec(meas, 2, &mut g, ctx)?;
    let mut it = out.into_iter();
    Ok(Complex::new(it.next().unwrap(), it.next().unwrap()))
}

fn pair_product_mass(par: &InfiniteParams, e: i64, ctx: &PrecisionContext) -> Result<Complex> {
    let q = &par.q;
    let [t1, t2, t3] = &par.t;
    let s = qpow(e, q);
    let args = [
        -&(t1 * t2).mul_f(&s),
        -&(t1 * t3).mul_f(&s),
        -&(t2 * t3).mul_f(&s),
    ];
    qpoch_infinite_list(&args, q, ctx)
}

/// Closed form (-q t1 t2, -q t1 t3, -q t2 t3; q)_inf: the lattice total
/// mass when the attached product carries arguments q t_j.
pub fn totmass_closed_form(par: &InfiniteParams, ctx: &PrecisionContext) -> Result<Complex> {
    pair_product_mass(par, 1, ctx)
}

/// Total mass prod_{j<k} (-t_j t_k/q; q)_inf of the lattice measure with
/// the three-parameter attachment at parameters t_j (the previous closed
/// form under t -> t/q). This is the h_0 of the attached Gram matrix.
pub fn attached_mass_closed_form(par: &InfiniteParams, ctx: &PrecisionContext) -> Result<Complex> {
    pair_product_mass(par, -1, ctx)
}

// ---------------------------------------------------------------------------
// Gram matrices

/// Which family a Gram matrix or norm list refers to.
#[derive(Clone, Debug)]
pub enum GramFamily {
    FiniteFamily(FiniteParams),
    InfiniteFamily(InfiniteParams),
}

impl GramFamily {
    pub fn q(&self) -> &Float {
        match self {
            GramFamily::FiniteFamily(p) => &p.q,
            GramFamily::InfiniteFamily(p) => &p.q,
        }
    }
}

/// The measure a Gram matrix is taken against: the family's continuous
/// weight, or the attached lattice measure at a given alpha.
#[derive(Clone, Debug)]
pub enum GramMeasure {
    Continuous,
    Discrete { alpha: Float },
}

/// Inner products of the first degrees against the closed-form targets.
#[derive(Clone, Debug)]
pub struct GramReport {
    pub size: usize,
    pub matrix: Vec<Vec<Float>>,
    pub target_diag: Vec<Float>,
    /// Largest |target| entry; off-diagonal residuals are read against it.
    pub scale: Float,
    pub max_offdiag: Float,
    pub max_offdiag_rel: Float,
    pub max_diag_relerr: Float,
    /// Observed sign of each diagonal entry (the measures may be signed).
    pub diag_signs: Vec<i8>,
}

fn real_part_checked(v: &Complex, what: &str, ctx: &PrecisionContext) -> Result<Float> {
    let mag = v.abs();
    let thr = Float::with_val(ctx.prec(), &mag * ctx.quad_tol());
    let im = Float::with_val(ctx.prec(), v.im.abs_ref());
    if im > thr {
        return Err(QawError::UnsupportedParameters(format!(
            "{what} is not real for these parameters"
        )));
    }
    Ok(v.re.clone())
}

/// Closed-form norm of degree n for the four-parameter family (both of its
/// measures share it): (-1)^n (1 - q^(n+3)/s4) prod_{j<k} (-q^2/t_j t_k; q)_n
/// (q; q)_n / ((1 - q^(2n+3)/s4) (q^4/s4; q)_n).
pub fn finite_norm_closed(n: u32, par: &FiniteParams, ctx: &PrecisionContext) -> Result<Complex> {
    let q = &par.q;
    let p = ctx.prec();
    let s4 = par.sigma4();
    let nn = n as i64;
    let num1 = q_over(nn + 3, &s4, q).one_minus();
    let den1 = q_over(2 * nn + 3, &s4, q).one_minus();
    if den1.is_zero() {
        return Err(QawError::Pole("norm denominator vanishes".into()));
    }
    let mut pairs = Complex::one(p);
    for j in 0..4 {
        for k in (j + 1)..4 {
            let a = neg_q_over(2, &(&par.t[j] * &par.t[k]), q);
            pairs = &pairs * &qpoch_finite(&a, q, n, ctx);
        }
    }
    let qq = qpoch_finite_f(q, q, n, ctx);
    let den2 = qpoch_finite(&q_over(4, &s4, q), q, n, ctx);
    if den2.is_zero() {
        return Err(QawError::Pole("norm denominator vanishes".into()));
    }
    let mut val = &(&num1 * &pairs).mul_f(&qq) / &(&den1 * &den2);
    if n % 2 == 1 {
        val = -&val;
    }
    Ok(val)
}

/// Closed-form norm of degree n for the infinite family against its unit
/// mass continuous measure: (q, -q^2/t1t3; q)_n / ((-q^2/t1t2, -q^2/t2t3; q)_n)
/// (t1^2/q^3)^n. The attached lattice measure multiplies this by the total
/// mass product.
pub fn infinite_norm_closed(n: u32, par: &InfiniteParams, ctx: &PrecisionContext) -> Result<Complex> {
    let q = &par.q;
    let [t1, t2, t3] = &par.t;
    let a13 = qpoch_finite(&neg_q_over(2, &(t1 * t3), q), q, n, ctx);
    let a12 = qpoch_finite(&neg_q_over(2, &(t1 * t2), q), q, n, ctx);
    let a23 = qpoch_finite(&neg_q_over(2, &(t2 * t3), q), q, n, ctx);
    let den = &a12 * &a23;
    if den.is_zero() {
        return Err(QawError::Pole("norm denominator vanishes".into()));
    }
    let qq = qpoch_finite_f(q, q, n, ctx);
    let ratio = (t1 * t1).mul_f(&qpow(-3, q)).powi(n as i64);
    Ok(&(&a13.mul_f(&qq) * &ratio) / &den)
}

/// Gram matrix of degrees 0..=n_max against the chosen measure, with the
/// closed-form diagonal as target. The finite family requires n_max within
/// its orthogonality range; the infinite family requires real parameters.
pub fn gram(
    family: &GramFamily,
    measure: &GramMeasure,
    n_max: u32,
    ctx: &PrecisionContext,
) -> Result<GramReport> {
    let p = ctx.prec();
    let size = (n_max + 1) as usize;
    let dim = size * (size + 1) / 2;

    match family {
        GramFamily::FiniteFamily(par) => {
            let max = par.n_orth().ok_or_else(|| {
                QawError::UnsupportedParameters(
                    "weight is not integrable: |t1 t2 t3 t4| >= q^3".into(),
                )
            })?;
            if n_max > max {
                return Err(QawError::UnsupportedParameters(format!(
                    "orthogonality holds only through degree {max} for these parameters"
                )));
            }
        }
        GramFamily::InfiniteFamily(par) => {
            if par.t.iter().any(|t| !t.im.is_zero()) {
                return Err(QawError::UnsupportedParameters(
                    "infinite-family Gram requires real parameters".into(),
                ));
            }
        }
    }

    let q = family.q();
    let table = match family {
        GramFamily::FiniteFamily(par) => finite_recurrence_table(n_max, par, ctx)?,
        GramFamily::InfiniteFamily(par) => infinite_recurrence_table(n_max, par, ctx)?,
    }
    .to_real(ctx)?;

    let mut target_diag = Vec::with_capacity(size);
    for n in 0..=n_max {
        let t = match (family, measure) {
            (GramFamily::FiniteFamily(par), _) => finite_norm_closed(n, par, ctx)?,
            (GramFamily::InfiniteFamily(par), GramMeasure::Continuous) => {
                infinite_norm_closed(n, par, ctx)?
            }
            (GramFamily::InfiniteFamily(par), GramMeasure::Discrete { .. }) => {
                &infinite_norm_closed(n, par, ctx)? * &attached_mass_closed_form(par, ctx)?
            }
        };
        target_diag.push(real_part_checked(&t, "closed-form norm", ctx)?);
    }

    let fill_products = |x: &Float, out: &mut Vec<Float>, weight: &Float| {
        let v = table.eval_all(n_max, x);
        for i in 0..size {
            for j in i..size {
                let mut e = Float::with_val(p, &v[i] * &v[j]);
                e *= weight;
                out.push(e);
            }
        }
    };

    let raw: Vec<Float> = match measure {
        GramMeasure::Continuous => {
            let ts = family_ts(family);
            let ts_real: Option<Vec<Float>> = if ts.iter().all(|t| t.im.is_zero()) {
                Some(ts.iter().map(|t| t.re.clone()).collect())
            } else {
                None
            };
            let mut f = |x: &Float, z: &Float| -> Result<Vec<Float>> {
                let wv = match &ts_real {
                    Some(tr) => raw_weight_z_f(tr, q, z, ctx)?,
                    None => raw_weight_z_c(ts, q, &Complex::from_real(z.clone()), ctx)?.re,
                };
                let mut out = Vec::with_capacity(dim);
                fill_products(x, &mut out, &wv);
                Ok(out)
            };
            let vals = integrate_curve_vec(q, dim, &mut f, ctx)?;
            let w = match family {
                GramFamily::FiniteFamily(par) => ContinuousWeight::Normalized(par.clone()),
                GramFamily::InfiniteFamily(par) => ContinuousWeight::InfiniteFamily(par.clone()),
            };
            let c = real_part_checked(&w.norm_constant(ctx)?, "normalization constant", ctx)?;
            vals.into_iter().map(|v| v * &c).collect()
        }
        GramMeasure::Discrete { alpha } => {
            let att = match family {
                GramFamily::FiniteFamily(par) => Attachment::FiniteFamily(par.clone()),
                GramFamily::InfiniteFamily(par) => Attachment::InfiniteFamily(par.clone()),
            };
            let meas = DiscreteMeasure::new(q.clone(), alpha.clone(), att, ctx)?;
            let one = Float::with_val(p, 1);
            let mut f = |x: &Float, _z: &Float| -> Result<Vec<Float>> {
                let mut out = Vec::with_capacity(dim);
                fill_products(x, &mut out, &one);
                Ok(out)
            };
            discrete_sum_vec(&meas, dim, &mut f, ctx)?
        }
    };

    let mut matrix = vec![vec![Float::new(p); size]; size];
    let mut it = raw.into_iter();
    for i in 0..size {
        for j in i..size {
            let v = it.next().unwrap();
            if i != j {
                matrix[j][i] = v.clone();
            }
            matrix[i][j] = v;
        }
    }

    let mut scale = Float::new(p);
    for t in &target_diag {
        let a = Float::with_val(p, t.abs_ref());
        if a > scale {
            scale = a;
        }
    }
    let mut max_offdiag = Float::new(p);
    for i in 0..size {
        for j in (i + 1)..size {
            let a = Float::with_val(p, matrix[i][j].abs_ref());
            if a > max_offdiag {
                max_offdiag = a;
            }
        }
    }
    let max_offdiag_rel = if scale.is_zero() {
        max_offdiag.clone()
    } else {
        Float::with_val(p, &max_offdiag / &scale)
    };
    let mut max_diag_relerr = Float::new(p);
    let mut diag_signs = Vec::with_capacity(size);
    for n in 0..size {
        let err = rel_error_f(&matrix[n][n], &target_diag[n]);
        if err > max_diag_relerr {
            max_diag_relerr = err;
        }
        diag_signs.push(if matrix[n][n].is_zero() {
            0
        } else if matrix[n][n] > 0u32 {
            1
        } else {
            -1
        });
    }

    Ok(GramReport {
        size,
        matrix,
        target_diag,
        scale,
        max_offdiag,
        max_offdiag_rel,
        max_diag_relerr,
        diag_signs,
    })
}

fn family_ts(family: &GramFamily) -> &[Complex] {
    match family {
        GramFamily::FiniteFamily(p) => &p.t,
        GramFamily::InfiniteFamily(p) => &p.t,
    }
}

/// Norms implied by the three-term recurrence: h_0 is the total mass and
/// h_n = h_{n-1} c_n / a_{n-1}, which is the monic-recurrence product
/// (A_0/A_n) C_1 ... C_n times the mass rewritten for coefficients
/// normalized against 2x.
pub fn norms_from_recurrence(
    family: &GramFamily,
    total_mass: &Complex,
    n_max: u32,
    ctx: &PrecisionContext,
) -> Result<Vec<Complex>> {
    let mut coeffs = Vec::with_capacity(size_hint(n_max));
    for n in 0..=n_max {
        coeffs.push(match family {
            GramFamily::FiniteFamily(par) => finite_recurrence_coeffs(n, par, ctx)?,
            GramFamily::InfiniteFamily(par) => infinite_recurrence_coeffs(n, par, ctx)?,
        });
    }
    let mut out = Vec::with_capacity(size_hint(n_max));
    out.push(total_mass.clone());
    for n in 1..=(n_max as usize) {
        let a_prev = &coeffs[n - 1].a;
        if a_prev.is_zero() {
            return Err(QawError::CoefficientSingularity(format!(
                "leading coefficient vanishes at degree {}",
                n - 1
            )));
        }
        let next = &(out.last().unwrap() * &coeffs[n].c) / a_prev;
        out.push(next);
    }
    Ok(out)
}

fn size_hint(n_max: u32) -> usize {
    (n_max + 1) as usize
}

// ---------------------------------------------------------------------------
// Weight divided-difference equations

/// Residuals of the two divided-difference equations satisfied by the
/// normalized weight, with sigma_j the elementary symmetric functions of
/// the parameters (the infinite family contributes a vanishing fourth
/// parameter). Returned as relative residuals of the stated left and
/// right sides.
pub fn weight_dde_residual(
    family: &GramFamily,
    x: &Float,
    ctx: &PrecisionContext,
) -> Result<(Float, Float)> {
    dde_residual_impl(family, x, false, ctx)
}

/// Same residuals for the deliberately spoiled candidate weight
/// w(x) (1 + x^2); these must come out large, confirming the equations
/// distinguish the true weight.
pub fn weight_dde_negative_control(
    family: &GramFamily,
    x: &Float,
    ctx: &PrecisionContext,
) -> Result<(Float, Float)> {
    dde_residual_impl(family, x, true, ctx)
}

fn dde_residual_impl(
    family: &GramFamily,
    x: &Float,
    perturb: bool,
    ctx: &PrecisionContext,
) -> Result<(Float, Float)> {
    let p = ctx.prec();
    let q = family.q();
    let ts4: Vec<Complex> = match family {
        GramFamily::FiniteFamily(par) => par.t.to_vec(),
        GramFamily::InfiniteFamily(par) => {
            let mut v = par.t.to_vec();
            v.push(Complex::zero(p));
            v
        }
    };
    let rq = Float::with_val(p, q.sqrt_ref());
    let rq_inv = Float::with_val(p, rq.recip_ref());
    let (w_base, w_scaled) = match family {
        GramFamily::FiniteFamily(par) => (
            ContinuousWeight::Normalized(par.clone()),
            ContinuousWeight::Normalized(par.rescaled(&rq_inv)),
        ),
        GramFamily::InfiniteFamily(par) => (
            ContinuousWeight::InfiniteFamily(par.clone()),
            ContinuousWeight::InfiniteFamily(par.rescaled(&rq_inv)),
        ),
    };

    let eval = |w: &ContinuousWeight, zz: &Float| -> Result<Complex> {
        let mut v = w.eval_at_z(&Complex::from_real(zz.clone()), ctx)?;
        if perturb {
            let zr = Float::with_val(p, zz.recip_ref());
            let mut xx = Float::with_val(p, zz - &zr);
            xx /= 2u32;
            let mut fac = Float::with_val(p, &xx * &xx);
            fac += 1u32;
            v = v.mul_f(&fac);
        }
        Ok(v)
    };

    let z = zpos_real(x);
    let zp = Float::with_val(p, &z * &rq);
    let zm = Float::with_val(p, &z * &rq_inv);
    let wp = eval(&w_scaled, &zp)?;
    let wm = eval(&w_scaled, &zm)?;
    let w0 = eval(&w_base, &z)?;
    if w0.is_zero() {
        return Err(QawError::SingularPoint(
            "weight vanishes at the sample point".into(),
        ));
    }

    let mut dd = Float::with_val(p, &rq - &rq_inv);
    let mut zsum = Float::with_val(p, &z + &Float::with_val(p, z.recip_ref()));
    zsum /= 2u32;
    dd *= &zsum;
    let lhs_d = &(&wp - &wm).div_f(&dd) / &w0;
    let two = Float::with_val(p, 2);
    let lhs_a = &(&wp + &wm).div_f(&two) / &w0;

    // Elementary symmetric functions of the four parameters.
    let mut s1 = Complex::zero(p);
    let mut s2 = Complex::zero(p);
    let mut s3 = Complex::zero(p);
    let mut s4 = Complex::one(p);
    for j in 0..4 {
        s1 = &s1 + &ts4[j];
        s4 = &s4 * &ts4[j];
        for k in (j + 1)..4 {
            s2 = &s2 + &(&ts4[j] * &ts4[k]);
            for l in (k + 1)..4 {
                s3 = &s3 + &(&(&ts4[j] * &ts4[k]) * &ts4[l]);
            }
        }
    }
    let mut prod = Complex::one(p);
    for j in 0..4 {
        for k in (j + 1)..4 {
            prod = &prod * &one_plus(&(&ts4[j] * &ts4[k]).mul_f(&qpow(-2, q)));
        }
    }
    let f4 = s4.mul_f(&qpow(-4, q)).one_minus();
    let f5 = s4.mul_f(&qpow(-5, q)).one_minus();

    let mut lin = f4.mul_f(x).mul_f(&two);
    lin = &lin - &s1.mul_f(&qpow(-1, q));
    lin = &lin - &s3.mul_f(&qpow(-3, q));
    let mut qm1 = Float::with_val(p, q);
    qm1 -= 1u32;
    let mut coef_d = (&f4 * &f5).mul_f(q).mul_f(&two);
    coef_d = &coef_d / &prod.mul_f(&qm1);
    let rhs_d = &coef_d * &lin;

    let mut x2p1 = Float::with_val(p, x * x);
    x2p1 *= 2u32;
    x2p1 += 1u32;
    let mut quadr = one_plus(&s4.mul_f(&qpow(-4, q))).mul_f(&x2p1);
    let mid = &s3.mul_f(&qpow(-3, q)) - &s1.mul_f(&qpow(-1, q));
    quadr = &quadr + &mid.mul_f(x);
    quadr = &quadr + &s2.mul_f(&qpow(-2, q));
    let coef_a = &(&f4 * &f5).mul_f(&rq) / &prod;
    let rhs_a = &coef_a * &quadr;

    Ok((
        rel_residual(&lhs_d, &rhs_d, p),
        rel_residual(&lhs_a, &rhs_a, p),
    ))
}

fn rel_residual(lhs: &Complex, rhs: &Complex, p: u32) -> Float {
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
