//! Property tests for the structural invariants: identities that must hold
//! for every admissible parameter draw, not just the pinned suite values.

use proptest::prelude::*;
use qaw::asymptotics::ConvergenceReport;
use qaw::families::{
    finite_connection_coeff, finite_recurrence_coeffs, finite_recurrence_table, pn_series,
    vn_series, infinite_recurrence_table, FiniteParams, InfiniteParams,
};
use qaw::numctx::{rel_error, x_from_z, Complex, PrecisionContext};
use qaw::qseries::{qpoch_finite, qpoch_infinite, theta4_product, theta4_sum};
use rug::ops::Pow;
use rug::Float;

const DIGITS: u32 = 50;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(DIGITS).unwrap()
}

fn tol(c: &PrecisionContext, s: &str) -> Float {
    c.float_from_str(s).unwrap()
}

/// Formats an f64 exactly for from_decimal_strs.
fn dec(v: f64) -> String {
    format!("{v:.17}")
}

fn finite_params(c: &PrecisionContext, q: f64, t: [f64; 4]) -> FiniteParams {
    FiniteParams::from_decimal_strs(&dec(q), [&dec(t[0]), &dec(t[1]), &dec(t[2]), &dec(t[3])], c)
        .unwrap()
}

fn infinite_params(c: &PrecisionContext, q: f64, t: [f64; 3]) -> InfiniteParams {
    InfiniteParams::from_decimal_strs(&dec(q), [&dec(t[0]), &dec(t[1]), &dec(t[2])], c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// (a; q)_n (a q^n; q)_inf = (a; q)_inf for any complex a.
    #[test]
    fn qpoch_finite_times_shifted_infinite(
        re in -3.0..3.0f64,
        im in -3.0..3.0f64,
        q in 0.15..0.85f64,
        n in 0u32..=10,
    ) {
        let c = ctx();
        let p = c.prec();
        let qf = c.float_from_str(&dec(q)).unwrap();
        let a = c.complex(re, im);
        let finite = qpoch_finite(&a, &qf, n, &c);
        let whole = qpoch_infinite(&a, &qf, &c).unwrap();
        let shifted = a.mul_f(&Float::with_val(p, (&qf).pow(n)));
        let rest = qpoch_infinite(&shifted, &qf, &c).unwrap();
        let lhs = &finite * &rest;
        prop_assert!(rel_error(&lhs, &whole) < tol(&c, "1e-38"));
    }

    /// Series and recurrence evaluations agree for the four-parameter
    /// family at any positive parameters below one.
    #[test]
    fn finite_series_matches_recurrence(
        q in 0.2..0.8f64,
        t1 in 0.1..0.9f64,
        t2 in 0.1..0.9f64,
        t3 in 0.1..0.9f64,
        t4 in 0.1..0.9f64,
        xr in -2.0..2.0f64,
        xi in -1.0..1.0f64,
        n in 0u32..=8,
    ) {
        let c = ctx();
        let par = finite_params(&c, q, [t1, t2, t3, t4]);
        let x = c.complex(xr, xi);
        let table = finite_recurrence_table(n, &par, &c).unwrap();
        let err = rel_error(&pn_series(n, &x, &par, &c).unwrap(), &table.eval(n, &x));
        prop_assert!(err < tol(&c, "1e-38"), "err = {err}");
    }

    /// Same agreement for the three-parameter family, whose parameters may
    /// sit anywhere in (0.2, 4).
    #[test]
    fn infinite_series_matches_recurrence(
        q in 0.2..0.8f64,
        t1 in 0.2..4.0f64,
        t2 in 0.2..4.0f64,
        t3 in 0.2..4.0f64,
        xr in -2.0..2.0f64,
        xi in -1.0..1.0f64,
        n in 0u32..=8,
    ) {
        let c = ctx();
        let par = infinite_params(&c, q, [t1, t2, t3]);
        let x = c.complex(xr, xi);
        let table = infinite_recurrence_table(n, &par, &c).unwrap();
        let err = rel_error(&vn_series(n, &x, &par, &c).unwrap(), &table.eval(n, &x));
        prop_assert!(err < tol(&c, "1e-38"), "err = {err}");
    }

    /// The diagonal recurrence coefficient is a symmetric function of the
    /// parameter list.
    #[test]
    fn diagonal_coefficient_is_symmetric(
        q in 0.2..0.8f64,
        t1 in 0.1..0.9f64,
        t2 in 0.1..0.9f64,
        t3 in 0.1..0.9f64,
        t4 in 0.1..0.9f64,
        n in 0u32..=6,
        perm_seed in 0usize..24,
    ) {
        let c = ctx();
        let par = finite_params(&c, q, [t1, t2, t3, t4]);
        let perm = nth_permutation(perm_seed);
        let base = finite_recurrence_coeffs(n, &par, &c).unwrap();
        let other = finite_recurrence_coeffs(n, &par.permuted(perm), &c).unwrap();
        prop_assert!(rel_error(&other.b, &base.b) < tol(&c, "1e-38"));
    }

    /// Theta-series and triple-product evaluations coincide away from the
    /// lattice of zeros.
    #[test]
    fn theta4_sum_matches_product(
        w in prop::sample::select(vec![-3.0, -1.7, -0.6, 0.4, 0.9, 1.6, 2.8]),
        wi in -0.5..0.5f64,
        nome in 0.1..0.7f64,
    ) {
        let c = ctx();
        let nf = c.float_from_str(&dec(nome)).unwrap();
        let wc = c.complex(w, wi);
        let a = theta4_sum(&wc, &nf, &c).unwrap();
        let b = theta4_product(&wc, &nf, &c).unwrap();
        prop_assert!(rel_error(&a, &b) < tol(&c, "1e-40"));
    }

    /// Connection of a family to itself is the identity matrix.
    #[test]
    fn self_connection_is_identity(
        q in 0.2..0.8f64,
        t1 in 0.1..0.9f64,
        t2 in 0.1..0.9f64,
        t3 in 0.1..0.9f64,
        t4 in 0.1..0.9f64,
        n in 1u32..=3,
    ) {
        let c = ctx();
        let p = c.prec();
        let par = finite_params(&c, q, [t1, t2, t3, t4]);
        for k in 0..=n {
            let coeff = finite_connection_coeff(k, n, &par, &par, &c).unwrap();
            let expect = if k == n { Complex::one(p) } else { Complex::zero(p) };
            prop_assert!((&coeff - &expect).abs() < tol(&c, "1e-38"));
        }
    }

    /// The curve coordinate map halves z - 1/z; both roots of the inverse
    /// give back x.
    #[test]
    fn curve_map_is_even_under_root_swap(
        zr in prop::sample::select(vec![-2.0, -1.3, -0.8, 0.5, 0.9, 1.4, 2.5]),
        zi in -1.0..1.0f64,
    ) {
        let c = ctx();
        let z = c.complex(zr, zi);
        let swapped = -&z.recip();
        let a = x_from_z(&z);
        let b = x_from_z(&swapped);
        prop_assert!(rel_error(&a, &b) < tol(&c, "1e-40"));
    }

    /// A synthetic error sequence err(n) = q^(eta n) yields the planted
    /// exponent back from the least-squares fit.
    #[test]
    fn fitted_rate_recovers_planted_exponent(
        eta in 0.25..2.0f64,
        target_re in -2.0..2.0f64,
    ) {
        let c = ctx();
        let p = c.prec();
        let q = c.float_from_str("0.5").unwrap();
        let target = c.complex(target_re, 0.0);
        let n_seq: Vec<u32> = vec![4, 8, 12, 16, 20];
        let scale = Float::with_val(p, target_re.abs()).max(&Float::with_val(p, 1));
        let values: Vec<Complex> = n_seq
            .iter()
            .map(|&n| {
                let e = Float::with_val(p, eta * n as f64);
                let off = Float::with_val(p, (&q).pow(&e)) * &scale;
                &target + &Complex::from_real(off)
            })
            .collect();
        let rep = ConvergenceReport::new("synthetic", n_seq, values, target, &c).unwrap();
        prop_assert!(rep.tail_decreasing());
        let fitted = rep.fitted_q_exponent(&q);
        let dev = Float::with_val(p, &fitted - &Float::with_val(p, eta)).abs();
        prop_assert!(dev < tol(&c, "1e-6"), "fitted {fitted} vs planted {eta}");
    }
}

/// Lehmer decode of seed 0..24 into a permutation of {0, 1, 2, 3}.
fn nth_permutation(mut seed: usize) -> [usize; 4] {
    let mut items = vec![0usize, 1, 2, 3];
    let mut out = [0usize; 4];
    for (slot, fact) in [(0usize, 6usize), (1, 2), (2, 1)] {
        let idx = (seed / fact) % items.len();
        out[slot] = items.remove(idx);
        seed %= fact;
    }
    out[3] = items[0];
    out
}

#[test]
fn convergence_report_rejects_bad_sequences() {
    let c = ctx();
    let p = c.prec();
    let target = Complex::one(p);
    let vals = |k: usize| vec![Complex::one(p); k];
    // fewer than two entries
    assert!(ConvergenceReport::new("r", vec![5], vals(1), target.clone(), &c).is_err());
    // degrees not strictly increasing
    assert!(ConvergenceReport::new("r", vec![5, 5, 6], vals(3), target.clone(), &c).is_err());
    assert!(ConvergenceReport::new("r", vec![8, 5], vals(2), target.clone(), &c).is_err());
    // length mismatch
    assert!(ConvergenceReport::new("r", vec![5, 6, 7], vals(2), target, &c).is_err());
}
