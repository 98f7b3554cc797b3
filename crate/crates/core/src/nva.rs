//! Nonlocal vertex algebras given by structure tables, their modules, the
//! translation operator `D`, and the axiom checkers.

use num_traits::One;
use thiserror::Error;

use crate::linalg::{basis_tuples, tuple_label, vector_equal, Ambient, LinalgError, SeriesMap, SeriesVector, Space, VecEquality};
use crate::report::{CheckConfig, CheckReport, Tally};
use crate::series::{Arg, Scalar, Series, Var, Window};

/// Window used for stored structure tables.
pub const MAP_WINDOW: (i32, i32) = (-64, 64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NvaError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Y({0},x)1 has a pole, so D is undefined")]
    Creation(String),
    #[error("{0}")]
    Shape(String),
}

impl From<crate::series::SeriesError> for NvaError {
    fn from(e: crate::series::SeriesError) -> Self {
        NvaError::Linalg(e.into())
    }
}

/// `(V, Y, 1)` with `Y` stored as a map `V ⊗ V -> V ⊗ Q((x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Nva {
    space: Space,
    vacuum: usize,
    y: SeriesMap,
}

impl Nva {
    pub fn new(space: Space, vacuum: &str, y: SeriesMap) -> Result<Nva, NvaError> {
        let vacuum = space.index_of(vacuum)?;
        if y.domain() != [space.clone(), space.clone()] || y.codomain() != [space.clone()] {
            return Err(NvaError::Shape(format!("vertex map of `{}` must go V⊗V -> V", space.name())));
        }
        Ok(Nva { space, vacuum, y })
    }

    /// Builds `Y` from a closure giving `Y(e_i, x) e_j` as `(target, series)` pairs.
    pub fn from_fn<F>(space: Space, vacuum: &str, mut f: F) -> Result<Nva, NvaError>
    where
        F: FnMut(usize, usize) -> Vec<(usize, Series)>,
    {
        let mut y = SeriesMap::zero(&[space.clone(), space.clone()], std::slice::from_ref(&space), MAP_WINDOW);
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                for (k, s) in f(i, j) {
                    let prev = y.entry(&[i, j], &[k]);
                    y.set_entry(vec![i, j], vec![k], prev.add(&s.with_window(&Window::new(vec![MAP_WINDOW])?))?);
                }
            }
        }
        Nva::new(space, vacuum, y)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn name(&self) -> &str {
        self.space.name()
    }

    pub fn vacuum(&self) -> usize {
        self.vacuum
    }

    pub fn y(&self) -> &SeriesMap {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `Y(u, x)` restricted to a single pair of basis vectors.
    pub fn y_entry(&self, u: usize, v: usize, target: usize) -> Series {
        self.y.entry(&[u, v], &[target])
    }

    /// The algebra regarded as a module over itself.
    pub fn adjoint(&self) -> NvaModule {
        NvaModule { algebra: self.clone(), space: self.space.clone(), yw: self.y.clone() }
    }
}

/// A module `(W, Y_W)` over a nonlocal vertex algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct NvaModule {
    algebra: Nva,
    space: Space,
    yw: SeriesMap,
}

impl NvaModule {
    pub fn new(algebra: Nva, space: Space, yw: SeriesMap) -> Result<NvaModule, NvaError> {
        if yw.domain() != [algebra.space().clone(), space.clone()] || yw.codomain() != [space.clone()] {
            return Err(NvaError::Shape(format!(
                "module map must go {}⊗{} -> {}",
                algebra.name(),
                space.name(),
                space.name()
            )));
        }
        Ok(NvaModule { algebra, space, yw })
    }

    pub fn algebra(&self) -> &Nva {
        &self.algebra
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn yw(&self) -> &SeriesMap {
        &self.yw
    }
}

fn x() -> Arg {
    Arg::var(Var::X)
}

/// `D(v)`: the coefficient of `x` in `Y(v, x)1`.
pub fn compute_d(a: &Nva) -> Result<SeriesMap, NvaError> {
    let v = a.space();
    let amb = a.y().ambient();
    let mut d = SeriesMap::zero(std::slice::from_ref(v), std::slice::from_ref(v), MAP_WINDOW);
    for i in 0..a.dim() {
        let y1 = SeriesVector::basis(&[v.clone(), v.clone()], &[i, a.vacuum()], &amb).apply(a.y(), &[0, 1], &x())?;
        if !y1.has_no_poles() {
            return Err(NvaError::Creation(v.label(i).into()));
        }
        for (row, s) in y1.entries() {
            let c = s.coeff(&[1]);
            d.set_entry(vec![i], row.clone(), Series::constant(&[Var::X], &Window::new(vec![MAP_WINDOW])?, c));
        }
    }
    Ok(d)
}

/// `e^{arg·D}` applied to leg `leg` of `v`, for a constant operator `D`.
/// Exact when `D` is nilpotent on the vector.
pub fn exp_d(d: &SeriesMap, v: &SeriesVector, leg: usize, arg: &Arg) -> Result<SeriesVector, LinalgError> {
    let amb = v.ambient().clone();
    let a = amb.power(arg, 1)?;
    let mut sum = v.clone();
    let mut term = v.clone();
    for n in 1..=256u32 {
        term = term.apply(d, &[leg], &x())?;
        if term.is_zero() {
            return Ok(sum);
        }
        term = term.mul_series(&a)?.scale(&(Scalar::one() / Scalar::from_integer(n.into())));
        if term.is_zero() {
            sum.mark_inexact();
            return Ok(sum);
        }
        sum = sum.add(&term)?;
    }
    sum.mark_inexact();
    Ok(sum)
}

/// `D ⊗ 1 + 1 ⊗ D`-style derivation acting on every leg of `v` at once.
pub fn d_all_legs(ds: &[&SeriesMap], v: &SeriesVector) -> Result<SeriesVector, LinalgError> {
    let mut out = SeriesVector::zero(v.spaces(), v.ambient());
    for (leg, d) in ds.iter().enumerate() {
        out = out.add(&v.apply(d, &[leg], &x())?)?;
    }
    Ok(out)
}

/// The two vacuum identities and the creation property.
pub fn check_vacuum(a: &Nva, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new("vacuum", &cfg.label());
    let amb = cfg.ambient(&[Var::X]);
    let win = cfg.window(1);
    let sp = [a.space().clone(), a.space().clone()];
    let mut vac = Tally::new("Y(1,x)v = v");
    let mut reg = Tally::new("Y(v,x)1 in V[[x]]");
    let mut lim = Tally::new("Y(v,x)1 at x=0 is v");
    for i in 0..a.dim() {
        let label = || tuple_label(&sp[..1], &[i]);
        let target = SeriesVector::basis(&sp[..1], &[i], &amb);
        match SeriesVector::basis(&sp, &[a.vacuum(), i], &amb).apply(a.y(), &[0, 1], &x()) {
            Ok(lhs) => vac.record(&vector_equal(&lhs, &target, &win), label),
            Err(e) => vac.fail(e.to_string()),
        }
        match SeriesVector::basis(&sp, &[i, a.vacuum()], &amb).apply(a.y(), &[0, 1], &x()) {
            Ok(c) => {
                for (row, s) in c.entries() {
                    if let Some((e, _)) = s.terms().iter().find(|(e, _)| e[0] < 0) {
                        reg.fail(format!("{}: component {row:?} has exponent {}", label(), e[0]));
                    }
                }
                if !c.is_exact() {
                    reg.inexact();
                }
                let c0 = c.coeff_in(Var::X, 0);
                let t0 = target.coeff_in(Var::X, 0);
                lim.record(&vector_equal(&c0, &t0, &Window::new(vec![]).expect("empty window")), label);
            }
            Err(e) => {
                reg.fail(e.to_string());
                lim.fail(e.to_string());
            }
        }
    }
    report.push(vac.finish());
    report.push(reg.finish());
    report.push(lim.finish());
    report
}

/// Searches the smallest `k <= kmax` with `factor^k · lhs = factor^k · rhs` on `window`.
pub fn k_search(
    lhs: &SeriesVector,
    rhs: &SeriesVector,
    factor: &Series,
    kmax: u32,
    window: &Window,
) -> Result<(u32, VecEquality), LinalgError> {
    let mut l = lhs.clone();
    let mut r = rhs.clone();
    let mut last = vector_equal(&l, &r, window);
    for k in 0..=kmax {
        if k > 0 {
            l = l.mul_series(factor)?;
            r = r.mul_series(factor)?;
            last = vector_equal(&l, &r, window);
        }
        if last.is_equal() {
            return Ok((k, last));
        }
    }
    Ok((kmax + 1, last))
}

fn record_k(t: &mut Tally, found: Result<(u32, VecEquality), LinalgError>, kmax: u32, label: String) {
    match found {
        Ok((k, eq)) if k <= kmax => {
            t.record(&eq, || label.clone());
            t.witness(label, k);
        }
        Ok((_, VecEquality::Unequal { index, exponent })) => {
            t.no_k(format!("{label}; still differs at component {index:?}, exponent {exponent:?}"), kmax)
        }
        Ok(_) => t.no_k(label, kmax),
        Err(e) => t.fail(format!("{label}: {e}")),
    }
}

/// Both sides of weak associativity for a module, in ambient `(x0, x2)`.
pub fn weak_assoc_sides(
    y: &SeriesMap,
    yw: &SeriesMap,
    u: usize,
    v: usize,
    w: usize,
    amb: &Ambient,
) -> Result<(SeriesVector, SeriesVector), LinalgError> {
    let sp = [yw.domain()[0].clone(), yw.domain()[0].clone(), yw.domain()[1].clone()];
    let b = SeriesVector::basis(&sp, &[u, v, w], amb);
    let lhs = b.apply(yw, &[1, 2], &Arg::var(Var::X2))?.apply(yw, &[0, 1], &Arg::sum(Var::X0, Var::X2))?;
    let rhs = b.apply(y, &[0, 1], &Arg::var(Var::X0))?.apply(yw, &[0, 1], &Arg::var(Var::X2))?;
    Ok((lhs, rhs))
}

fn weak_assoc_tally(y: &SeriesMap, yw: &SeriesMap, cfg: &CheckConfig, name: &str) -> Tally {
    let amb = cfg.ambient(&[Var::X0, Var::X2]);
    let win = cfg.window(2);
    let factor = amb.power(&Arg::sum(Var::X0, Var::X2), 1).expect("linear factor");
    let sp = [yw.domain()[0].clone(), yw.domain()[0].clone(), yw.domain()[1].clone()];
    let mut t = Tally::new(name);
    for idx in basis_tuples(&sp) {
        let label = tuple_label(&sp, &idx);
        let found = weak_assoc_sides(y, yw, idx[0], idx[1], idx[2], &amb)
            .and_then(|(l, r)| k_search(&l, &r, &factor, cfg.kmax, &win));
        record_k(&mut t, found, cfg.kmax, label);
    }
    t
}

/// Weak associativity, with the minimal `k` recorded per basis triple.
pub fn check_weak_associativity(a: &Nva, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new("weak associativity", &cfg.label());
    report.push(weak_assoc_tally(a.y(), a.y(), cfg, "weak associativity").finish());
    report
}

/// `[D, Y(v,x)] = Y(Dv,x) = d/dx Y(v,x)` and `Y(v,x)1 = e^{xD}v`.
pub fn check_d_bracket(a: &Nva, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new("D operator", &cfg.label());
    let d = match compute_d(a) {
        Ok(d) => d,
        Err(e) => {
            let mut t = Tally::new("D = coefficient of x in Y(v,x)1");
            t.fail(e.to_string());
            report.push(t.finish());
            return report;
        }
    };
    let amb = cfg.ambient(&[Var::X]);
    let win = cfg.window(1);
    let sp = [a.space().clone(), a.space().clone()];
    let mut bracket = Tally::new("[D,Y(v,x)] = Y(Dv,x)");
    let mut deriv = Tally::new("Y(Dv,x) = d/dx Y(v,x)");
    let mut create = Tally::new("Y(v,x)1 = e^{xD}v");
    let mut run = |bracket: &mut Tally, i: usize, j: usize| -> Result<(), LinalgError> {
        let label = || tuple_label(&sp, &[i, j]);
        let b = SeriesVector::basis(&sp, &[i, j], &amb);
        let yvw = b.apply(a.y(), &[0, 1], &x())?;
        let lhs = yvw.apply(&d, &[0], &x())?.sub(&b.apply(&d, &[1], &x())?.apply(a.y(), &[0, 1], &x())?)?;
        let ydv = b.apply(&d, &[0], &x())?.apply(a.y(), &[0, 1], &x())?;
        bracket.record(&vector_equal(&lhs, &ydv, &win), label);
        deriv.record(&vector_equal(&ydv, &yvw.derivative(Var::X), &win), label);
        if j == a.vacuum() {
            let e = exp_d(&d, &SeriesVector::basis(&sp[..1], &[i], &amb), 0, &x())?;
            create.record(&vector_equal(&yvw, &e, &win), label);
        }
        Ok(())
    };
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            if let Err(e) = run(&mut bracket, i, j) {
                bracket.fail(e.to_string());
            }
        }
    }
    report.push(bracket.finish());
    report.push(deriv.finish());
    report.push(create.finish());
    report
}

/// Vacuum, creation, weak associativity and the `D` identities.
pub fn check_nva(a: &Nva, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("nva {}", a.name()), &cfg.label());
    report.absorb(check_vacuum(a, cfg));
    report.absorb(check_weak_associativity(a, cfg));
    report.absorb(check_d_bracket(a, cfg));
    report
}

/// Which form of weak associativity [`check_module`] verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleForm {
    /// `(x0+x2)^l Y_W(u,x0+x2)Y_W(v,x2)w = (x0+x2)^l Y_W(Y(u,x0)v,x2)w`.
    Original,
    /// `((x1-x2)^k Y_W(u,x1)Y_W(v,x2)w)|_{x1=x2+x0} = x0^k Y_W(Y(u,x0)v,x2)w`.
    Substituted,
}

/// Substituted form for one triple: returns `(x1-x2)^k`-free sides in `(x0, x2)`
/// plus the regularity flag of the two-variable product.
fn substituted_sides(m: &NvaModule, idx: &[usize], cfg: &CheckConfig) -> Result<(SeriesVector, SeriesVector, bool), LinalgError> {
    let a = m.algebra();
    let sp = [a.space().clone(), a.space().clone(), m.space().clone()];
    let amb12 = cfg.ambient(&[Var::X1, Var::X2]);
    let b = SeriesVector::basis(&sp, idx, &amb12);
    let prod = b.apply(m.yw(), &[1, 2], &Arg::var(Var::X2))?.apply(m.yw(), &[0, 1], &Arg::var(Var::X1))?;
    // W((x1,x2)): support bounded below in each variable, away from the computation edge
    let (lo, _) = amb12.window.range(0);
    let regular = prod.entries().values().all(|s| s.terms().keys().all(|e| e[0] > lo && e[1] > lo));
    let amb02 = cfg.ambient(&[Var::X0, Var::X2]);
    let lhs = prod.substitute(&[Arg::sum(Var::X2, Var::X0), Arg::var(Var::X2)], &amb02)?;
    let rhs = SeriesVector::basis(&sp, idx, &amb02)
        .apply(a.y(), &[0, 1], &Arg::var(Var::X0))?
        .apply(m.yw(), &[0, 1], &Arg::var(Var::X2))?;
    Ok((lhs, rhs, regular))
}

/// Module axioms: `Y_W(1,x) = id` and weak associativity in the chosen form.
pub fn check_module(m: &NvaModule, cfg: &CheckConfig, form: ModuleForm) -> CheckReport {
    let a = m.algebra();
    let mut report = CheckReport::new(&format!("module {} over {}", m.space().name(), a.name()), &cfg.label());
    let amb = cfg.ambient(&[Var::X]);
    let sp = [a.space().clone(), m.space().clone()];
    let mut unit = Tally::new("Y_W(1,x) = id");
    for w in 0..m.space().dim() {
        let target = SeriesVector::basis(&sp[1..], &[w], &amb);
        match SeriesVector::basis(&sp, &[a.vacuum(), w], &amb).apply(m.yw(), &[0, 1], &x()) {
            Ok(l) => unit.record(&vector_equal(&l, &target, &cfg.window(1)), || tuple_label(&sp[1..], &[w])),
            Err(e) => unit.fail(e.to_string()),
        }
    }
    report.push(unit.finish());
    match form {
        ModuleForm::Original => {
            report.push(weak_assoc_tally(a.y(), m.yw(), cfg, "weak associativity (x0+x2 form)").finish());
        }
        ModuleForm::Substituted => {
            let sp3 = [a.space().clone(), a.space().clone(), m.space().clone()];
            let win = cfg.window(2);
            let amb02 = cfg.ambient(&[Var::X0, Var::X2]);
            let x0 = amb02.power(&Arg::var(Var::X0), 1).expect("x0");
            let mut reg = Tally::new("(x1-x2)^k Y_W(u,x1)Y_W(v,x2) in Hom(W,W((x1,x2)))");
            let mut ident = Tally::new("substitution x1=x2+x0 identity");
            let mut every = Tally::new("identity holds for every regular k");
            for idx in basis_tuples(&sp3) {
                let label = tuple_label(&sp3, &idx);
                match substituted_sides(m, &idx, cfg) {
                    Ok((lhs, rhs, regular)) => {
                        if !regular {
                            reg.fail(label.clone());
                            continue;
                        }
                        reg.witness(label.clone(), 0);
                        // (x1-x2)^k becomes x0^k after substitution on both sides
                        let found = k_search(&lhs, &rhs, &x0, cfg.kmax, &win);
                        let minimal = found.as_ref().ok().map(|(k, _)| *k);
                        record_k(&mut ident, found, cfg.kmax, label.clone());
                        if minimal.is_some_and(|k| k > 0) {
                            every.fail(format!("{label}: regular at k=0 but identity first holds at k={}", minimal.unwrap_or(0)));
                        } else {
                            every.record(&vector_equal(&lhs, &rhs, &win), || label.clone());
                        }
                    }
                    Err(e) => reg.fail(format!("{label}: {e}")),
                }
            }
            report.push(reg.finish());
            report.push(ident.finish());
            report.push(every.finish());
        }
    }
    report
}

/// Assembles `Y(a, x) b` for an associative algebra given by its product table.
pub fn from_assoc_table(space: Space, vacuum: &str, mult: &dyn Fn(usize, usize) -> Vec<(usize, i64)>) -> Result<Nva, NvaError> {
    let w = Window::new(vec![MAP_WINDOW])?;
    Nva::from_fn(space, vacuum, |i, j| {
        mult(i, j).into_iter().map(|(k, c)| (k, Series::constant(&[Var::X], &w, Scalar::from_integer(c.into())))).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::int;

    fn e1() -> Nva {
        let s = Space::with_labels("E1", &["one", "e"]).unwrap();
        from_assoc_table(s, "one", &|i, j| match (i, j) {
            (0, j) => vec![(j, 1)],
            (i, 0) => vec![(i, 1)],
            _ => vec![],
        })
        .unwrap()
    }

    fn e2() -> Nva {
        // Y(a,x)b = (e^{xD}a) b with s^2 = st = t^2 = 0 and D s = t
        let s = Space::with_labels("E2", &["one", "s", "t"]).unwrap();
        let w = Window::new(vec![MAP_WINDOW]).unwrap();
        Nva::from_fn(s, "one", |i, j| {
            let c = |e: i32| Series::monomial(&[Var::X], &w, vec![e], int(1));
            match (i, j) {
                (0, j) => vec![(j, c(0))],
                (1, 0) => vec![(1, c(0)), (2, c(1))],
                (2, 0) => vec![(2, c(0))],
                _ => vec![],
            }
        })
        .unwrap()
    }

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn e1_vacuum_exact() {
        let r = check_vacuum(&e1(), &cfg());
        assert!(r.exact(), "{r}");
    }

    #[test]
    fn e2_vacuum_and_d() {
        let a = e2();
        assert!(check_vacuum(&a, &cfg()).exact());
        let d = compute_d(&a).unwrap();
        assert_eq!(d.entry(&[1], &[2]).coeff(&[0]), int(1));
        assert!(d.entry(&[2], &[2]).is_zero() && d.column(&[0]).is_zero());
        let r = check_d_bracket(&a, &cfg());
        assert!(r.exact(), "{r}");
    }

    #[test]
    fn broken_vacuum_fails() {
        let s = Space::with_labels("B", &["one", "v"]).unwrap();
        let a = from_assoc_table(s, "one", &|i, j| match (i, j) {
            (0, 1) => vec![(1, 2)],
            (0, 0) => vec![(0, 1)],
            (1, 0) => vec![(1, 1)],
            _ => vec![],
        })
        .unwrap();
        let r = check_vacuum(&a, &cfg());
        assert!(matches!(r.verdict("Y(1,x)v = v"), Some(crate::report::Verdict::Fail { witness }) if witness.starts_with("(v)")));
    }

    #[test]
    fn weak_associativity_k_zero() {
        for a in [e1(), e2()] {
            let r = check_weak_associativity(&a, &cfg());
            assert!(r.exact(), "{r}");
            assert_eq!(r.results[0].max_k(), Some(0));
        }
    }

    #[test]
    fn nonassociative_table_has_no_k() {
        // (ab)c != a(bc): a*a = b, a*b = 0, b*a = c is still associative-free enough
        let s = Space::with_labels("N", &["one", "a", "b"]).unwrap();
        let n = from_assoc_table(s, "one", &|i, j| match (i, j) {
            (0, j) => vec![(j, 1)],
            (i, 0) => vec![(i, 1)],
            (1, 1) => vec![(2, 1)],
            (2, 1) => vec![(1, 1)],
            _ => vec![],
        })
        .unwrap();
        let r = check_weak_associativity(&n, &CheckConfig::new(-4, 4, 3));
        assert!(matches!(r.results[0].verdict, crate::report::Verdict::NoKFound { kmax: 3, .. }));
    }

    #[test]
    fn corrupted_d_fails_bracket() {
        // Y(s,x)1 = s + x s makes D(s) = s, which breaks D(Y(s,x)t) = ...
        let s = Space::with_labels("E2c", &["one", "s", "t"]).unwrap();
        let w = Window::new(vec![MAP_WINDOW]).unwrap();
        let a = Nva::from_fn(s, "one", |i, j| {
            let c = |e: i32| Series::monomial(&[Var::X], &w, vec![e], int(1));
            match (i, j) {
                (0, j) => vec![(j, c(0))],
                (1, 0) => vec![(1, c(0)), (1, c(1))],
                (2, 0) => vec![(2, c(0))],
                _ => vec![],
            }
        })
        .unwrap();
        assert!(!check_d_bracket(&a, &cfg()).passed());
    }

    #[test]
    fn adjoint_module_both_forms() {
        for a in [e1(), e2()] {
            let m = a.adjoint();
            let o = check_module(&m, &cfg(), ModuleForm::Original);
            let s = check_module(&m, &cfg(), ModuleForm::Substituted);
            assert!(o.exact(), "{o}");
            assert!(s.exact(), "{s}");
        }
    }

    #[test]
    fn broken_module_unit() {
        let a = e1();
        let mut yw = a.y().clone();
        yw.set_entry(vec![0, 1], vec![1], Series::laurent(MAP_WINDOW, &[(0, 3)]));
        let m = NvaModule::new(a.clone(), a.space().clone(), yw).unwrap();
        let r = check_module(&m, &cfg(), ModuleForm::Original);
        assert!(!r.verdict("Y_W(1,x) = id").unwrap().is_pass());
    }
}
