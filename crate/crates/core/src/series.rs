//! Exact Laurent objects in up to three formal variables.
//!
//! A [`Series`] is a finitely supported map from exponent tuples to exact
//! rationals, living inside an explicit truncation [`Window`]. The `exact`
//! flag records whether anything was ever clipped away: an exact series is
//! the true object, an inexact one is only correct inside its window.
//!
//! Substitutions such as `x1 -> x2 + x0` always expand in nonnegative powers
//! of the *second* summand; see [`Arg`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

/// Exact scalar. Always reduced with a positive denominator.
pub type Scalar = BigRational;

pub const MAX_VARS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("variable sets differ: {left:?} vs {right:?}")]
    VarMismatch { left: Vec<Var>, right: Vec<Var> },
    #[error("window intersection is empty")]
    EmptyWindow,
    #[error("invalid window: {0}")]
    BadWindow(String),
    #[error("expected a single-variable series, got {0} variables")]
    MultiVariable(usize),
    #[error("variable {0} is not part of the target variable set")]
    UnknownVar(Var),
    #[error("at column {column}: expected {expected}")]
    Parse { column: usize, expected: String },
}

/// A formal variable name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Var(pub &'static str);

impl Var {
    pub const X: Var = Var("x");
    pub const X0: Var = Var("x0");
    pub const X1: Var = Var("x1");
    pub const X2: Var = Var("x2");
    pub const Z: Var = Var("z");
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// Per-variable inclusive exponent ranges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Window {
    ranges: Vec<(i32, i32)>,
}

impl Window {
    pub fn new(ranges: Vec<(i32, i32)>) -> Result<Self, SeriesError> {
        if ranges.len() > MAX_VARS {
            return Err(SeriesError::BadWindow(format!(
                "{} variables exceeds the limit of {MAX_VARS}",
                ranges.len()
            )));
        }
        if let Some((lo, hi)) = ranges.iter().find(|(lo, hi)| lo > hi) {
            return Err(SeriesError::BadWindow(format!("{lo} > {hi}")));
        }
        Ok(Window { ranges })
    }

    /// The same range for every one of `nvars` variables.
    pub fn uniform(nvars: usize, lo: i32, hi: i32) -> Self {
        assert!(lo <= hi, "window lower bound exceeds upper bound");
        assert!(nvars <= MAX_VARS);
        Window { ranges: vec![(lo, hi); nvars] }
    }

    pub fn nvars(&self) -> usize {
        self.ranges.len()
    }

    pub fn range(&self, i: usize) -> (i32, i32) {
        self.ranges[i]
    }

    pub fn ranges(&self) -> &[(i32, i32)] {
        &self.ranges
    }

    pub fn contains(&self, exps: &[i32]) -> bool {
        exps.len() == self.ranges.len()
            && exps.iter().zip(&self.ranges).all(|(e, (lo, hi))| lo <= e && e <= hi)
    }

    pub fn intersect(&self, other: &Window) -> Result<Window, SeriesError> {
        if self.ranges.len() != other.ranges.len() {
            return Err(SeriesError::BadWindow("arity mismatch".into()));
        }
        let ranges: Vec<_> = self
            .ranges
            .iter()
            .zip(&other.ranges)
            .map(|(a, b)| (a.0.max(b.0), a.1.min(b.1)))
            .collect();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return Err(SeriesError::EmptyWindow);
        }
        Ok(Window { ranges })
    }

    /// Grows every range by `margin` on both sides.
    pub fn widen(&self, margin: i32) -> Window {
        Window { ranges: self.ranges.iter().map(|(lo, hi)| (lo - margin, hi + margin)).collect() }
    }

    /// Raises every lower bound by `shift` (clamped so ranges stay nonempty).
    pub fn raise_floor(&self, shift: i32) -> Window {
        Window { ranges: self.ranges.iter().map(|&(lo, hi)| ((lo + shift).min(hi), hi)).collect() }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranges.iter().map(|(lo, hi)| format!("{lo}..{hi}")).collect();
        write!(f, "[{}]", parts.join(" x "))
    }
}

/// A linear substitution argument such as `x`, `-x`, `x0 + x2` or `x2 - x1`.
///
/// With two summands the expansion is in nonnegative powers of the second
/// one, so `x2 - x1` and `-x1 + x2` are different operations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arg {
    terms: Vec<(i8, Var)>,
}

impl Arg {
    pub fn var(v: Var) -> Self {
        Arg { terms: vec![(1, v)] }
    }

    pub fn neg(v: Var) -> Self {
        Arg { terms: vec![(-1, v)] }
    }

    /// `a + b`, expanded in nonnegative powers of `b`.
    pub fn sum(a: Var, b: Var) -> Self {
        Arg { terms: vec![(1, a), (1, b)] }
    }

    /// `a - b`, expanded in nonnegative powers of `b`.
    pub fn diff(a: Var, b: Var) -> Self {
        Arg { terms: vec![(1, a), (-1, b)] }
    }

    /// General form `sa*a + sb*b` with signs `±1`.
    pub fn pair(sa: i8, a: Var, sb: i8, b: Var) -> Self {
        assert!(sa.abs() == 1 && sb.abs() == 1 && a != b);
        Arg { terms: vec![(sa, a), (sb, b)] }
    }

    pub fn terms(&self) -> &[(i8, Var)] {
        &self.terms
    }

    /// The argument with every sign flipped; the summand order is kept.
    pub fn negated(&self) -> Arg {
        Arg { terms: self.terms.iter().map(|&(s, v)| (-s, v)).collect() }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, v)) in self.terms.iter().enumerate() {
            match (i, *s) {
                (0, 1) => write!(f, "{v}")?,
                (0, _) => write!(f, "-{v}")?,
                (_, 1) => write!(f, "+{v}")?,
                _ => write!(f, "-{v}")?,
            }
        }
        Ok(())
    }
}

/// Outcome of comparing two series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifiedEquality {
    ExactlyEqual,
    EqualUpToWindow,
    /// First exponent tuple (lexicographic order) where the two differ.
    Unequal(Vec<i32>),
}

impl CertifiedEquality {
    pub fn is_equal(&self) -> bool {
        !matches!(self, CertifiedEquality::Unequal(_))
    }
}

#[derive(Clone, Debug)]
pub struct Series {
    vars: Vec<Var>,
    window: Window,
    terms: BTreeMap<Vec<i32>, Scalar>,
    exact: bool,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms
    }
}

impl Series {
    pub fn zero(vars: &[Var], window: &Window) -> Self {
        assert_eq!(vars.len(), window.nvars(), "window arity must match variables");
        Series { vars: vars.to_vec(), window: window.clone(), terms: BTreeMap::new(), exact: true }
    }

    pub fn constant(vars: &[Var], window: &Window, c: Scalar) -> Self {
        Self::monomial(vars, window, vec![0; vars.len()], c)
    }

    pub fn one(vars: &[Var], window: &Window) -> Self {
        Self::constant(vars, window, Scalar::one())
    }

    pub fn monomial(vars: &[Var], window: &Window, exps: Vec<i32>, c: Scalar) -> Self {
        let mut s = Self::zero(vars, window);
        s.add_term(exps, c);
        s
    }

    /// Builds a series from terms, clipping anything outside the window.
    pub fn from_terms<I>(vars: &[Var], window: &Window, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i32>, Scalar)>,
    {
        let mut s = Self::zero(vars, window);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Single-variable Laurent polynomial in `x` from `(exponent, coefficient)` pairs.
    pub fn laurent(window: (i32, i32), terms: &[(i32, i64)]) -> Self {
        let w = Window::new(vec![window]).expect("valid window");
        Self::from_terms(
            &[Var::X],
            &w,
            terms.iter().map(|&(e, c)| (vec![e], Scalar::from_integer(BigInt::from(c)))),
        )
    }

    /// Accumulates `c * x^exps`; clipped terms clear the exact flag.
    pub fn add_term(&mut self, exps: Vec<i32>, c: Scalar) {
        debug_assert_eq!(exps.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        if !self.window.contains(&exps) {
            self.exact = false;
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn mark_inexact(&mut self) {
        self.exact = false;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i32>, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[i32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    /// True when only the all-zero exponent is present.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Smallest exponent of variable `i` in the support.
    pub fn min_exponent(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|e| e[i]).min()
    }

    pub fn max_exponent(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// True when no exponent of any variable is negative.
    pub fn has_no_poles(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    fn check_vars(&self, other: &Series) -> Result<(), SeriesError> {
        if self.vars != other.vars {
            return Err(SeriesError::VarMismatch { left: self.vars.clone(), right: other.vars.clone() });
        }
        Ok(())
    }

    /// Re-homes the series in `window`, clipping as needed.
    pub fn with_window(&self, window: &Window) -> Series {
        let mut out = Series::zero(&self.vars, window);
        out.exact = self.exact;
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn add(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_vars(other)?;
        let window = self.window.intersect(&other.window)?;
        let mut out = self.with_window(&window);
        out.exact &= other.exact;
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series) -> Result<Series, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        let mut out = Series::zero(&self.vars, &self.window);
        out.exact = self.exact;
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        }
        out
    }

    pub fn mul(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_vars(other)?;
        let window = self.window.intersect(&other.window)?;
        let mut out = Series::zero(&self.vars, &window);
        out.exact = self.exact && other.exact;
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    /// Nonnegative integer power.
    pub fn pow(&self, k: u32) -> Result<Series, SeriesError> {
        let mut acc = Series::one(&self.vars, &self.window);
        acc.exact = self.exact || k == 0;
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Termwise derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Series {
        let mut out = Series::zero(&self.vars, &self.window);
        out.exact = self.exact;
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.add_term(ne, c * Scalar::from_integer(BigInt::from(e[i])));
            }
        }
        out
    }

    /// Coefficient of `var_i^e` as a series in the remaining variables.
    pub fn coeff_in(&self, i: usize, e: i32) -> Series {
        let vars: Vec<Var> = self.vars.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
        let ranges: Vec<(i32, i32)> =
            self.window.ranges.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| *r).collect();
        let window = Window { ranges };
        let mut out = Series::zero(&vars, &window);
        out.exact = self.exact;
        for (exps, c) in &self.terms {
            if exps[i] == e {
                let rest: Vec<i32> = exps.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect();
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Drops every term outside `window`; clears the exact flag if something was dropped.
    pub fn restrict(&self, window: &Window) -> Series {
        let mut out = self.clone();
        let before = out.terms.len();
        out.terms.retain(|e, _| window.contains(e));
        if out.terms.len() != before {
            out.exact = false;
        }
        out
    }

    /// Substitutes an [`Arg`] (in `target_vars`) for each source variable.
    ///
    /// `args[i]` replaces `self.vars()[i]`. Negative powers of a two-summand
    /// argument expand in nonnegative powers of its second summand and are
    /// truncated to `target_window`.
    pub fn substitute(&self, args: &[Arg], target_vars: &[Var], target_window: &Window) -> Result<Series, SeriesError> {
        assert_eq!(args.len(), self.vars.len(), "one argument per source variable");
        let mut cache: BTreeMap<(usize, i32), Series> = BTreeMap::new();
        let mut out = Series::zero(target_vars, target_window);
        out.exact = self.exact;
        for (exps, c) in &self.terms {
            let mut term = Series::constant(target_vars, target_window, c.clone());
            for (i, &n) in exps.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let piece = match cache.get(&(i, n)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = expand_power(n, &args[i], target_vars, target_window)?;
                        cache.insert((i, n), p.clone());
                        p
                    }
                };
                term = term.mul(&piece)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Formats using the literal syntax `c@(e1,e2)` joined by ` + `.
    pub fn to_literal(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let cs = format_scalar(c);
                if e.iter().all(|&x| x == 0) {
                    cs
                } else {
                    let es: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                    format!("{cs}@({})", es.join(","))
                }
            })
            .collect();
        parts.join(" + ")
    }

    /// Parses the literal syntax, e.g. `1/2@(-1) + 3@(2)`. A bare coefficient
    /// stands for the all-zero exponent tuple.
    pub fn parse_literal(text: &str, vars: &[Var], window: &Window) -> Result<Series, SeriesError> {
        let mut out = Series::zero(vars, window);
        let mut offset = 0usize;
        for piece in text.split('+') {
            let lead = piece.len() - piece.trim_start().len();
            let col = offset + lead + 1;
            let item = piece.trim();
            offset += piece.len() + 1;
            if item.is_empty() {
                return Err(SeriesError::Parse { column: col, expected: "a term".into() });
            }
            let (coef_txt, exps) = match item.split_once('@') {
                None => (item, vec![0; vars.len()]),
                Some((c, rest)) => {
                    let rest = rest.trim();
                    let inner = rest
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .ok_or(SeriesError::Parse { column: col, expected: "an exponent tuple `(e1,...)`".into() })?;
                    let exps: Result<Vec<i32>, _> = inner.split(',').map(|s| s.trim().parse::<i32>()).collect();
                    let exps = exps.map_err(|_| SeriesError::Parse { column: col, expected: "integer exponents".into() })?;
                    if exps.len() != vars.len() {
                        return Err(SeriesError::Parse {
                            column: col,
                            expected: format!("{} exponent(s)", vars.len()),
                        });
                    }
                    (c.trim(), exps)
                }
            };
            let c = parse_scalar(coef_txt).ok_or(SeriesError::Parse { column: col, expected: "a rational `p` or `p/q`".into() })?;
            out.add_term(exps, c);
        }
        Ok(out)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// Expands `arg^n` into `target_vars`, clipped to `window`.
pub fn expand_power(n: i32, arg: &Arg, target_vars: &[Var], window: &Window) -> Result<Series, SeriesError> {
    let pos = |v: Var| target_vars.iter().position(|&t| t == v).ok_or(SeriesError::UnknownVar(v));
    let nvars = target_vars.len();
    let mut out = Series::zero(target_vars, window);
    match arg.terms() {
        [(s, v)] => {
            let i = pos(*v)?;
            let mut e = vec![0; nvars];
            e[i] = n;
            let sign = if *s < 0 && n.rem_euclid(2) == 1 { -Scalar::one() } else { Scalar::one() };
            out.add_term(e, sign);
        }
        [(sa, a), (sb, b)] => {
            let (ia, ib) = (pos(*a)?, pos(*b)?);
            let (amin, _) = window.range(ia);
            let (_, bmax) = window.range(ib);
            let sa = Scalar::from_integer(BigInt::from(*sa));
            let sb = Scalar::from_integer(BigInt::from(*sb));
            // binom(n, i) * sa^(n-i) * sb^i, generalized binomial for n < 0
            let mut binom = Scalar::one();
            let mut i: i32 = 0;
            loop {
                if n >= 0 && i > n {
                    break;
                }
                if n < 0 && (i > bmax.max(0) || n - i < amin) {
                    out.exact = false;
                    break;
                }
                let mut e = vec![0; nvars];
                e[ia] += n - i;
                e[ib] += i;
                let c = &binom * pow_signed(&sa, n - i) * pow_signed(&sb, i);
                out.add_term(e, c);
                binom = binom * Scalar::from_integer(BigInt::from(n - i)) / Scalar::from_integer(BigInt::from(i + 1));
                i += 1;
            }
        }
        _ => unreachable!("Arg has one or two summands"),
    }
    Ok(out)
}

fn pow_signed(s: &Scalar, e: i32) -> Scalar {
    // s is ±1
    if s.is_negative() && e.rem_euclid(2) == 1 {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

/// Which Taylor substitution of a single-variable series in `x1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaylorForm {
    /// `x1 -> x2 + x0`, expanded in nonnegative powers of `x0`; result in `(x2, x0)`.
    X2PlusX0,
    /// `x1 -> x0 + x2`, expanded in nonnegative powers of `x2`; result in `(x0, x2)`.
    X0PlusX2,
}

/// Substitutes `x1 -> x2 + x0` or `x1 -> x0 + x2` into a one-variable series.
pub fn taylor_substitute(a: &Series, form: TaylorForm, window: &Window) -> Result<Series, SeriesError> {
    if a.vars().len() != 1 {
        return Err(SeriesError::MultiVariable(a.vars().len()));
    }
    let (vars, arg) = match form {
        TaylorForm::X2PlusX0 => ([Var::X2, Var::X0], Arg::sum(Var::X2, Var::X0)),
        TaylorForm::X0PlusX2 => ([Var::X0, Var::X2], Arg::sum(Var::X0, Var::X2)),
    };
    a.substitute(&[arg], &vars, window)
}

/// Compares two series. Exact inputs are compared on their full support;
/// otherwise only inside `window`.
pub fn window_equal(a: &Series, b: &Series, window: &Window) -> CertifiedEquality {
    if a.vars() != b.vars() {
        return CertifiedEquality::Unequal(Vec::new());
    }
    let exact = a.is_exact() && b.is_exact();
    let keys: std::collections::BTreeSet<&Vec<i32>> = a.terms().keys().chain(b.terms().keys()).collect();
    for k in keys {
        if !exact && !window.contains(k) {
            continue;
        }
        if a.terms().get(k) != b.terms().get(k) {
            return CertifiedEquality::Unequal(k.clone());
        }
    }
    if exact {
        CertifiedEquality::ExactlyEqual
    } else {
        CertifiedEquality::EqualUpToWindow
    }
}

pub fn format_scalar(c: &Scalar) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let text = text.trim();
    match text.split_once('/') {
        None => BigInt::from_str(text).ok().map(Scalar::from_integer),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Scalar::new(p, q))
            }
        }
    }
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w1(lo: i32, hi: i32) -> Window {
        Window::uniform(1, lo, hi)
    }

    #[test]
    fn polynomial_product() {
        let a = Series::laurent((-8, 8), &[(0, 1), (1, 1)]);
        let b = Series::laurent((-8, 8), &[(0, 1), (1, -1)]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p, Series::laurent((-8, 8), &[(0, 1), (2, -1)]));
        assert!(p.is_exact());
    }

    #[test]
    fn monomial_cancellation() {
        let a = Series::laurent((-8, 8), &[(-1, 1)]);
        let b = Series::laurent((-8, 8), &[(1, 1)]);
        assert_eq!(a.mul(&b).unwrap(), Series::laurent((-8, 8), &[(0, 1)]));
    }

    #[test]
    fn geometric_series_clips() {
        // oracle: sum_{n<=4} x^n (1 - x) = 1 - x^5, and x^5 lies outside the window
        let geo = Series::from_terms(&[Var::X], &w1(0, 4), (0..=4).map(|n| (vec![n], int(1))));
        let mut geo = geo;
        geo.mark_inexact();
        let p = geo.mul(&Series::laurent((0, 4), &[(0, 1), (1, -1)])).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.coeff(&[0]), int(1));
        assert!(!p.is_exact());
    }

    #[test]
    fn mismatched_vars_error() {
        let a = Series::one(&[Var::X], &w1(-2, 2));
        let b = Series::one(&[Var::Z], &w1(-2, 2));
        assert!(matches!(a.add(&b), Err(SeriesError::VarMismatch { .. })));
    }

    #[test]
    fn empty_window_error() {
        let a = Series::one(&[Var::X], &w1(-2, -1));
        let b = Series::one(&[Var::X], &w1(1, 2));
        assert_eq!(a.add(&b).unwrap_err(), SeriesError::EmptyWindow);
    }

    #[test]
    fn taylor_square() {
        let a = Series::from_terms(&[Var::X1], &w1(-8, 8), [(vec![2], int(1))]);
        let w = Window::uniform(2, -8, 8);
        let t = taylor_substitute(&a, TaylorForm::X2PlusX0, &w).unwrap();
        let expect = Series::from_terms(
            &[Var::X2, Var::X0],
            &w,
            [(vec![2, 0], int(1)), (vec![1, 1], int(2)), (vec![0, 2], int(1))],
        );
        assert_eq!(t, expect);
        assert!(t.is_exact());
    }

    #[test]
    fn taylor_inverse_truncates() {
        let a = Series::from_terms(&[Var::X1], &w1(-8, 8), [(vec![-1], int(1))]);
        let w = Window::new(vec![(-3, 0), (0, 2)]).unwrap();
        let t = taylor_substitute(&a, TaylorForm::X2PlusX0, &w).unwrap();
        let expect = Series::from_terms(
            &[Var::X2, Var::X0],
            &w,
            [(vec![-1, 0], int(1)), (vec![-2, 1], int(-1)), (vec![-3, 2], int(1))],
        );
        assert_eq!(t, expect);
        assert!(!t.is_exact());
        // oracle: multiplying back by (x2 + x0) gives 1 inside the window away from the clipped edge
        let wide = Window::new(vec![(-4, 1), (0, 3)]).unwrap();
        let lin = Series::from_terms(&[Var::X2, Var::X0], &wide, [(vec![1, 0], int(1)), (vec![0, 1], int(1))]);
        let back = t.with_window(&wide).mul(&lin).unwrap();
        assert_eq!(back.coeff(&[0, 0]), int(1));
        assert_eq!(back.coeff(&[-1, 1]), int(0));
        assert_eq!(back.coeff(&[-2, 2]), int(0));
    }

    #[test]
    fn taylor_of_constant() {
        let a = Series::from_terms(&[Var::X1], &w1(-8, 8), [(vec![0], int(1))]);
        let w = Window::uniform(2, -8, 8);
        for form in [TaylorForm::X2PlusX0, TaylorForm::X0PlusX2] {
            let t = taylor_substitute(&a, form, &w).unwrap();
            assert_eq!(t.terms().len(), 1);
            assert_eq!(t.coeff(&[0, 0]), int(1));
            assert!(t.is_exact());
        }
    }

    #[test]
    fn taylor_rejects_two_vars() {
        let w = Window::uniform(2, -2, 2);
        let a = Series::one(&[Var::X1, Var::X2], &w);
        assert_eq!(taylor_substitute(&a, TaylorForm::X0PlusX2, &w).unwrap_err(), SeriesError::MultiVariable(2));
    }

    #[test]
    fn window_equal_verdicts() {
        let w = w1(-8, 8);
        let a = Series::laurent((-8, 8), &[(-2, 3), (1, 1)]);
        assert_eq!(window_equal(&a, &a.clone(), &w), CertifiedEquality::ExactlyEqual);

        let mut geo = Series::from_terms(&[Var::X], &w1(0, 6), (0..=6).map(|n| (vec![n], int(1))));
        geo.mark_inexact();
        let reclipped = geo.with_window(&w1(0, 4));
        assert_eq!(window_equal(&geo, &reclipped, &w1(0, 4)), CertifiedEquality::EqualUpToWindow);

        let p = Series::laurent((-8, 8), &[(0, 1), (1, 1)]);
        let m = Series::laurent((-8, 8), &[(0, 1), (1, -1)]);
        assert_eq!(window_equal(&p, &m, &w), CertifiedEquality::Unequal(vec![1]));
    }

    #[test]
    fn literal_round_trip() {
        let w = w1(-8, 8);
        let s = Series::parse_literal("1/2@(-1) + 3@(2)", &[Var::X], &w).unwrap();
        assert_eq!(s.coeff(&[-1]), Scalar::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(s.to_literal(), "1/2@(-1) + 3@(2)");
        assert_eq!(Series::parse_literal("-4", &[Var::X], &w).unwrap().to_literal(), "-4");
        assert_eq!(Series::parse_literal(&s.to_literal(), &[Var::X], &w).unwrap(), s);
    }

    #[test]
    fn literal_errors_are_positioned() {
        let w = w1(-8, 8);
        let err = Series::parse_literal("1 + 2@(1", &[Var::X], &w).unwrap_err();
        assert_eq!(err, SeriesError::Parse { column: 5, expected: "an exponent tuple `(e1,...)`".into() });
        assert!(Series::parse_literal("1@(1,2)", &[Var::X], &w).is_err());
        assert!(Series::parse_literal("1/0", &[Var::X], &w).is_err());
    }

    #[test]
    fn negative_argument() {
        let w = w1(-8, 8);
        let s = Series::laurent((-8, 8), &[(1, 1), (2, 1), (-3, 1)]);
        let t = s.substitute(&[Arg::neg(Var::X)], &[Var::X], &w).unwrap();
        assert_eq!(t, Series::laurent((-8, 8), &[(1, -1), (2, 1), (-3, -1)]));
    }
}
