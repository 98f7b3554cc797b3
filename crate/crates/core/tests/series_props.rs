//! Randomized laws of the exact series layer, 1000 cases each.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use nvaw_core::series::{expand_power, taylor_substitute, window_equal, Arg, CertifiedEquality, Series, TaylorForm, Var, Window};
use proptest::prelude::*;

const CASES: u32 = 1000;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn two_vars() -> [Var; 2] {
    [Var::X1, Var::X2]
}

fn big_window(n: usize) -> Window {
    Window::uniform(n, -64, 64)
}

/// Sparse Laurent polynomials with small rational coefficients.
fn poly(nvars: usize) -> impl Strategy<Value = Vec<(Vec<i32>, (i64, i64))>> {
    prop::collection::vec((prop::collection::vec(-4i32..=4, nvars), (-9i64..=9, 1i64..=4)), 0..6)
}

fn build(vars: &[Var], w: &Window, terms: &[(Vec<i32>, (i64, i64))]) -> Series {
    Series::from_terms(vars, w, terms.iter().map(|(e, (n, d))| (e.clone(), q(*n, *d))))
}

fn exact_eq(a: &Series, b: &Series) -> bool {
    window_equal(a, b, a.window()) == CertifiedEquality::ExactlyEqual
}

fn factorial(j: i64) -> BigRational {
    (1..=j).fold(BigRational::one(), |acc, k| acc * q(k, 1))
}

/// `C(n, i)` for any integer `n`, from `C(n, i) = (-1)^i C(i - n - 1, i)` and Pascal's rule.
fn binom(n: i64, i: i64) -> BigRational {
    if n < 0 {
        let s = if i % 2 == 0 { 1 } else { -1 };
        return q(s, 1) * binom(i - n - 1, i);
    }
    let mut row = vec![BigRational::one()];
    for _ in 0..n {
        let mut next = vec![BigRational::one(); row.len() + 1];
        for k in 1..row.len() {
            next[k] = &row[k - 1] + &row[k];
        }
        row = next;
    }
    row.get(i as usize).cloned().unwrap_or_else(BigRational::zero)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn ring_laws(a in poly(2), b in poly(2), c in poly(2)) {
        let (v, w) = (two_vars(), big_window(2));
        let (a, b, c) = (build(&v, &w, &a), build(&v, &w, &b), build(&v, &w, &c));
        let zero = Series::zero(&v, &w);
        let one = Series::one(&v, &w);
        prop_assert!(exact_eq(&a.add(&b).unwrap(), &b.add(&a).unwrap()));
        prop_assert!(exact_eq(&a.add(&b).unwrap().add(&c).unwrap(), &a.add(&b.add(&c).unwrap()).unwrap()));
        prop_assert!(exact_eq(&a.add(&zero).unwrap(), &a));
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
        prop_assert!(exact_eq(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
        prop_assert!(exact_eq(&a.mul(&b).unwrap().mul(&c).unwrap(), &a.mul(&b.mul(&c).unwrap()).unwrap()));
        prop_assert!(exact_eq(&a.mul(&b.add(&c).unwrap()).unwrap(), &a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()));
        prop_assert!(exact_eq(&a.mul(&one).unwrap(), &a));
        prop_assert!(a.mul(&zero).unwrap().is_zero());
    }

    #[test]
    fn leibniz_and_scaling(a in poly(2), b in poly(2), n in -5i64..=5, d in 1i64..=5) {
        let (v, w) = (two_vars(), big_window(2));
        let (a, b) = (build(&v, &w, &a), build(&v, &w, &b));
        for i in 0..2 {
            let lhs = a.mul(&b).unwrap().derivative(i);
            let rhs = a.derivative(i).mul(&b).unwrap().add(&a.mul(&b.derivative(i)).unwrap()).unwrap();
            prop_assert!(exact_eq(&lhs, &rhs));
        }
        let c = q(n, d);
        prop_assert!(exact_eq(&a.mul(&b).unwrap().scale(&c), &a.scale(&c).mul(&b).unwrap()));
    }

    #[test]
    fn literal_round_trip(a in poly(1)) {
        let w = big_window(1);
        let a = build(&[Var::X], &w, &a);
        let back = Series::parse_literal(&a.to_literal(), &[Var::X], &w).unwrap();
        prop_assert!(exact_eq(&a, &back));
    }

    /// The `x0^j` coefficient of `a(x2 + x0)` is `a^{(j)}(x2) / j!`.
    #[test]
    fn taylor_coefficients_are_derivatives(a in poly(1)) {
        let a = build(&[Var::X1], &big_window(1), &a);
        let w = Window::new(vec![(-24, 24), (0, 6)]).unwrap();
        let t = taylor_substitute(&a, TaylorForm::X2PlusX0, &w).unwrap();
        let mut deriv = a.clone();
        for j in 0..=6 {
            let expect: Vec<(Vec<i32>, BigRational)> =
                deriv.terms().iter().map(|(e, c)| (e.clone(), c / factorial(j))).collect();
            let got = t.coeff_in(1, j as i32);
            let expect = Series::from_terms(got.vars(), got.window(), expect);
            prop_assert_eq!(got.terms(), expect.terms());
            deriv = deriv.derivative(0);
        }
    }

    /// Substitution is a ring map inside the window.
    #[test]
    fn taylor_is_multiplicative(a in poly(1), b in poly(1)) {
        let (a, b) = (build(&[Var::X1], &big_window(1), &a), build(&[Var::X1], &big_window(1), &b));
        let w = Window::new(vec![(-24, 24), (0, 6)]).unwrap();
        let t = |s: &Series| taylor_substitute(s, TaylorForm::X2PlusX0, &w).unwrap();
        let lhs = t(&a.mul(&b).unwrap());
        let rhs = t(&a).mul(&t(&b)).unwrap();
        prop_assert!(window_equal(&lhs, &rhs, &w).is_equal());
    }

    /// On polynomials both expansion directions agree exactly.
    #[test]
    fn taylor_forms_agree_on_polynomials(a in prop::collection::vec((0i32..=5, -9i64..=9), 0..6)) {
        let a = Series::from_terms(&[Var::X1], &big_window(1), a.iter().map(|&(e, c)| (vec![e], q(c, 1))));
        let w = big_window(2);
        let s = taylor_substitute(&a, TaylorForm::X2PlusX0, &w).unwrap();
        let t = taylor_substitute(&a, TaylorForm::X0PlusX2, &w).unwrap();
        prop_assert!(s.is_exact() && t.is_exact());
        let swapped: Vec<_> = t.terms().iter().map(|(e, c)| (vec![e[1], e[0]], c.clone())).collect();
        let swapped = Series::from_terms(s.vars(), &w, swapped);
        prop_assert!(exact_eq(&s, &swapped));
    }

    /// Coefficients of `(x + y)^n` and `(x - y)^n` against the binomial formula.
    #[test]
    fn binomial_coefficients(n in -6i32..=6, minus in any::<bool>()) {
        let w = Window::new(vec![(-30, 30), (0, 8)]).unwrap();
        let v = [Var::X0, Var::X2];
        let arg = if minus { Arg::diff(Var::X0, Var::X2) } else { Arg::sum(Var::X0, Var::X2) };
        let s = expand_power(n, &arg, &v, &w).unwrap();
        prop_assert_eq!(s.is_exact(), n >= 0);
        for i in 0..=8i64 {
            let sign = if minus && i % 2 == 1 { -1 } else { 1 };
            let expect = q(sign, 1) * binom(n as i64, i);
            prop_assert_eq!(s.coeff(&[n - i as i32, i as i32]), expect);
        }
    }

    /// `(x+y)^n (x+y)^m = (x+y)^{n+m}` inside the window, and `(x+y)^n (x+y)^{-n} = 1`.
    #[test]
    fn binomial_exponent_law(n in -5i32..=5, m in -5i32..=5) {
        let w = Window::new(vec![(-30, 30), (0, 8)]).unwrap();
        let v = [Var::X0, Var::X2];
        let arg = Arg::sum(Var::X0, Var::X2);
        let p = |k: i32| expand_power(k, &arg, &v, &w).unwrap();
        let inner = Window::new(vec![(-20, 30), (0, 8)]).unwrap();
        prop_assert!(window_equal(&p(n).mul(&p(m)).unwrap(), &p(n + m), &inner).is_equal());
        prop_assert!(window_equal(&p(n).mul(&p(-n)).unwrap(), &Series::one(&v, &w), &inner).is_equal());
    }
}
