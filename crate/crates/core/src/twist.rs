//! Twisting operators `R(x): V ⊗ U -> U ⊗ V ⊗ Q((x))`, their axioms,
//! inversion, and the reversed operator `R^{-1}(-x)` for the pair `(V, U)`.

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{basis_tuples, compose, dense_inverse, tuple_label, vector_equal, LinalgError, SeriesMap, SeriesVector, Space};
use crate::nva::{Nva, MAP_WINDOW};
use crate::report::{CheckConfig, CheckReport, Tally};
use crate::series::{Arg, Scalar, Series, Var, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistError {
    #[error("twist `{name}` is not invertible: leading coefficient has rank {rank} of {size}")]
    NotInvertible { name: String, rank: usize, size: usize },
    #[error("twist `{0}` must map V⊗U to U⊗V")]
    Shape(String),
    #[error("twist `{name}` fails its axioms: {detail}")]
    Axioms { name: String, detail: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A twisting operator for the ordered pair `(U, V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistOp {
    name: String,
    u: Nva,
    v: Nva,
    table: SeriesMap,
    inverse: Option<SeriesMap>,
}

impl TwistOp {
    pub fn new(name: &str, u: Nva, v: Nva, table: SeriesMap) -> Result<TwistOp, TwistError> {
        let (us, vs) = (u.space().clone(), v.space().clone());
        if table.domain() != [vs.clone(), us.clone()] || table.codomain() != [us, vs] {
            return Err(TwistError::Shape(name.into()));
        }
        Ok(TwistOp { name: name.into(), u, v, table, inverse: None })
    }

    /// `R(x)(v ⊗ u) = u ⊗ v`.
    pub fn flip(u: &Nva, v: &Nva) -> TwistOp {
        let table = SeriesMap::flip(v.space(), u.space(), MAP_WINDOW);
        let inverse = SeriesMap::flip(u.space(), v.space(), MAP_WINDOW);
        TwistOp { name: "flip".into(), u: u.clone(), v: v.clone(), table, inverse: Some(inverse) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: &str) -> TwistOp {
        self.name = name.into();
        self
    }

    pub fn u(&self) -> &Nva {
        &self.u
    }

    pub fn v(&self) -> &Nva {
        &self.v
    }

    pub fn table(&self) -> &SeriesMap {
        &self.table
    }

    pub fn inverse(&self) -> Option<&SeriesMap> {
        self.inverse.as_ref()
    }

    /// Attaches a user-supplied inverse table without verification.
    pub fn with_inverse(mut self, inv: SeriesMap) -> Result<TwistOp, TwistError> {
        if inv.domain() != self.table.codomain() || inv.codomain() != self.table.domain() {
            return Err(TwistError::Shape(self.name.clone()));
        }
        self.inverse = Some(inv);
        Ok(self)
    }
}

fn spaces(r: &TwistOp) -> (Space, Space) {
    (r.u.space().clone(), r.v.space().clone())
}

/// Vacuum conditions, both hexagon identities, and (when an inverse is
/// attached) the two inverse compositions.
pub fn check_twisting_axioms(r: &TwistOp, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("twist {}", r.name), &cfg.label());
    let (us, vs) = spaces(r);
    let (one_u, one_v) = (r.u.vacuum(), r.v.vacuum());
    let x = Arg::var(Var::X);
    let amb = cfg.ambient(&[Var::X]);
    let win1 = cfg.window(1);

    let mut vac_v = Tally::new("R(x)(v⊗1) = 1⊗v");
    let mut vac_u = Tally::new("R(x)(1⊗u) = u⊗1");
    let vu = [vs.clone(), us.clone()];
    let uv = [us.clone(), vs.clone()];
    for v in 0..vs.dim() {
        let lhs = SeriesVector::basis(&vu, &[v, one_u], &amb).apply(&r.table, &[0, 1], &x);
        match lhs {
            Ok(l) => vac_v.record(&vector_equal(&l, &SeriesVector::basis(&uv, &[one_u, v], &amb), &win1), || tuple_label(&vu, &[v, one_u])),
            Err(e) => vac_v.fail(e.to_string()),
        }
    }
    for u in 0..us.dim() {
        let lhs = SeriesVector::basis(&vu, &[one_v, u], &amb).apply(&r.table, &[0, 1], &x);
        match lhs {
            Ok(l) => vac_u.record(&vector_equal(&l, &SeriesVector::basis(&uv, &[u, one_v], &amb), &win1), || tuple_label(&vu, &[one_v, u])),
            Err(e) => vac_u.fail(e.to_string()),
        }
    }
    report.push(vac_v.finish());
    report.push(vac_u.finish());

    let amb2 = cfg.ambient(&[Var::X1, Var::X2]);
    let win2 = cfg.window(2);
    let (x1, x2) = (Arg::var(Var::X1), Arg::var(Var::X2));
    let mut hex1 = Tally::new("R(x1)(1⊗Y(x2)) = (Y(x2)⊗1)R23(x1)R12(x1+x2)");
    let vuu = [vs.clone(), us.clone(), us.clone()];
    for idx in basis_tuples(&vuu) {
        let run = || -> Result<_, LinalgError> {
            let b = SeriesVector::basis(&vuu, &idx, &amb2);
            let lhs = b.apply(r.u.y(), &[1, 2], &x2)?.apply(&r.table, &[0, 1], &x1)?;
            let rhs = b
                .apply(&r.table, &[0, 1], &Arg::sum(Var::X1, Var::X2))?
                .apply(&r.table, &[1, 2], &x1)?
                .apply(r.u.y(), &[0, 1], &x2)?;
            Ok(vector_equal(&lhs, &rhs, &win2))
        };
        match run() {
            Ok(eq) => hex1.record(&eq, || tuple_label(&vuu, &idx)),
            Err(e) => hex1.fail(e.to_string()),
        }
    }
    report.push(hex1.finish());

    let mut hex2 = Tally::new("R(x1)(Y(x2)⊗1) = (1⊗Y(x2))R12(x1-x2)R23(x1)");
    let vvu = [vs.clone(), vs.clone(), us.clone()];
    for idx in basis_tuples(&vvu) {
        let run = || -> Result<_, LinalgError> {
            let b = SeriesVector::basis(&vvu, &idx, &amb2);
            let lhs = b.apply(r.v.y(), &[0, 1], &x2)?.apply(&r.table, &[0, 1], &x1)?;
            let rhs = b
                .apply(&r.table, &[1, 2], &x1)?
                .apply(&r.table, &[0, 1], &Arg::diff(Var::X1, Var::X2))?
                .apply(r.v.y(), &[1, 2], &x2)?;
            Ok(vector_equal(&lhs, &rhs, &win2))
        };
        match run() {
            Ok(eq) => hex2.record(&eq, || tuple_label(&vvu, &idx)),
            Err(e) => hex2.fail(e.to_string()),
        }
    }
    report.push(hex2.finish());

    if let Some(inv) = &r.inverse {
        report.push(inverse_tally("R(x)R^{-1}(x) = 1", &r.table, inv, cfg));
        report.push(inverse_tally("R^{-1}(x)R(x) = 1", inv, &r.table, cfg));
    }
    report
}

/// Compares `f ∘ g` with the identity column by column.
fn inverse_tally(name: &str, f: &SeriesMap, g: &SeriesMap, cfg: &CheckConfig) -> crate::report::IdentityResult {
    let mut t = Tally::new(name);
    let amb = cfg.ambient(&[Var::X]);
    let x = Arg::var(Var::X);
    for idx in basis_tuples(g.domain()) {
        let b = SeriesVector::basis(g.domain(), &idx, &amb);
        match b.apply(g, &[0, 1], &x).and_then(|v| v.apply(f, &[0, 1], &x)) {
            Ok(v) => t.record(&vector_equal(&v, &b, &cfg.window(1)), || tuple_label(g.domain(), &idx)),
            Err(e) => t.fail(e.to_string()),
        }
    }
    t.finish()
}

fn flat(idx: &[usize], spaces: &[Space]) -> usize {
    idx.iter().zip(spaces).fold(0, |acc, (&i, s)| acc * s.dim() + i)
}

/// Inverts a map `A ⊗ B -> C ⊗ D` over `Q((x))`, degree by degree from the
/// lowest-order coefficient. Exact when the truncated inverse composes to
/// the identity on full support.
pub fn invert_series_map(m: &SeriesMap, name: &str, degree: i32) -> Result<SeriesMap, TwistError> {
    let dom = m.domain().to_vec();
    let cod = m.codomain().to_vec();
    let n: usize = dom.iter().map(Space::dim).product();
    if n != cod.iter().map(Space::dim).product::<usize>() {
        return Err(TwistError::NotInvertible { name: name.into(), rank: 0, size: n });
    }
    let mut n0 = i32::MAX;
    let mut n1 = i32::MIN;
    for col in m.columns().values() {
        for s in col.values() {
            n0 = n0.min(s.min_exponent(0).unwrap_or(i32::MAX));
            n1 = n1.max(s.max_exponent(0).unwrap_or(i32::MIN));
        }
    }
    if n0 == i32::MAX {
        return Err(TwistError::NotInvertible { name: name.into(), rank: 0, size: n });
    }
    let zero = || vec![vec![Scalar::zero(); n]; n];
    // a[i][row][col]: coefficient of x^{n0+i}
    let mut a: Vec<Vec<Vec<Scalar>>> = (n0..=n1).map(|_| zero()).collect();
    for (c, col) in m.columns() {
        for (r, s) in col {
            for (e, v) in s.terms() {
                a[(e[0] - n0) as usize][flat(r, &cod)][flat(c, &dom)] = v.clone();
            }
        }
    }
    let (rank, b0) = dense_inverse(&a[0]);
    let Some(b0) = b0 else {
        return Err(TwistError::NotInvertible { name: name.into(), rank, size: n });
    };
    let mul = |p: &[Vec<Scalar>], q: &[Vec<Scalar>]| -> Vec<Vec<Scalar>> {
        let mut out = zero();
        for i in 0..n {
            for k in 0..n {
                if p[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !q[k][j].is_zero() {
                        out[i][j] += &p[i][k] * &q[k][j];
                    }
                }
            }
        }
        out
    };
    let is_zero = |p: &[Vec<Scalar>]| p.iter().all(|r| r.iter().all(Zero::is_zero));
    let len = (degree + n0).max(0) as usize + 1;
    let mut b: Vec<Vec<Vec<Scalar>>> = vec![b0];
    for k in 1..len {
        let mut acc = zero();
        for i in 1..=k.min(a.len() - 1) {
            if is_zero(&a[i]) || is_zero(&b[k - i]) {
                continue;
            }
            let p = mul(&a[i], &b[k - i]);
            for (ra, rp) in acc.iter_mut().zip(p) {
                for (x, y) in ra.iter_mut().zip(rp) {
                    *x += y;
                }
            }
        }
        let mut bk = mul(&b[0], &acc);
        for row in bk.iter_mut() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        b.push(bk);
    }
    let w = Window::new(vec![MAP_WINDOW]).map_err(LinalgError::from)?;
    let build = |exact: bool| {
        let mut inv = SeriesMap::zero(&cod, &dom, MAP_WINDOW);
        for ci in basis_tuples(&cod) {
            for ri in basis_tuples(&dom) {
                let (c, r) = (flat(&ci, &cod), flat(&ri, &dom));
                let mut s = Series::from_terms(
                    &[Var::X],
                    &w,
                    b.iter().enumerate().filter(|(_, bk)| !bk[r][c].is_zero()).map(|(k, bk)| (vec![k as i32 - n0], bk[r][c].clone())),
                );
                if !exact {
                    s.mark_inexact();
                }
                inv.set_entry(ci.clone(), ri, s);
            }
        }
        inv
    };
    let candidate = build(true);
    let id_cod = SeriesMap::identity(&cod, MAP_WINDOW);
    let id_dom = SeriesMap::identity(&dom, MAP_WINDOW);
    let exact = m.is_exact()
        && compose(m, &candidate).map(|p| p == id_cod).unwrap_or(false)
        && compose(&candidate, m).map(|p| p == id_dom).unwrap_or(false);
    Ok(if exact { candidate } else { build(false) })
}

/// Computes and attaches `R^{-1}(x)`, truncated at the configured window.
pub fn invert_twisting(r: &TwistOp, cfg: &CheckConfig) -> Result<TwistOp, TwistError> {
    let inv = invert_series_map(&r.table, &r.name, cfg.map_window().1)?;
    let mut out = r.clone();
    out.inverse = Some(inv);
    Ok(out)
}

/// `R^{-1}(-x)`, a twisting operator for the pair `(V, U)` with inverse `R(-x)`.
pub fn reversed_twisting(r: &TwistOp, cfg: &CheckConfig) -> Result<TwistOp, TwistError> {
    let r = match &r.inverse {
        Some(_) => r.clone(),
        None => invert_twisting(r, cfg)?,
    };
    let neg = Arg::neg(Var::X);
    let inv = r.inverse.as_ref().expect("inverse attached");
    Ok(TwistOp {
        name: format!("reversed {}", r.name),
        u: r.v.clone(),
        v: r.u.clone(),
        table: inv.reparametrize(&neg)?,
        inverse: Some(r.table.reparametrize(&neg)?),
    })
}

/// `true` when no table entry depends on `x`.
pub fn is_constant(r: &TwistOp) -> bool {
    r.table.is_constant()
}

/// The scalar `c` with `R(x) = c` on a pair of basis tuples, at `x^0`.
pub fn constant_entry(r: &TwistOp, col: &[usize], row: &[usize]) -> Scalar {
    r.table.entry(col, row).coeff(&[0])
}

/// Identity check `R(x)(1 ⊗ 1) = 1 ⊗ 1`.
pub fn vacuum_pair_fixed(r: &TwistOp) -> bool {
    let col = r.table.column(&[r.v.vacuum(), r.u.vacuum()]);
    let mut expect = SeriesVector::zero(col.spaces(), col.ambient());
    expect.add_entry(vec![r.u.vacuum(), r.v.vacuum()], Series::one(&[Var::X], &Window::new(vec![MAP_WINDOW]).expect("window")));
    vector_equal(&col, &expect, &Window::new(vec![MAP_WINDOW]).expect("window")).is_equal()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{diagonal_twist, e1, e1n, e2, r_sign, r_zero, z2};
    use crate::report::Verdict;
    use crate::series::int;

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn flip_passes_on_all_pairs() {
        for u in [e1(), e2(), z2(), e1n()] {
            for v in [e1(), e2(), z2()] {
                let r = check_twisting_axioms(&TwistOp::flip(&u, &v), &cfg());
                assert!(r.exact(), "{r}");
            }
        }
    }

    #[test]
    fn sign_twist_passes() {
        let r = check_twisting_axioms(&r_sign(), &cfg());
        assert!(r.exact(), "{r}");
    }

    #[test]
    fn broken_sign_fails_vacuum() {
        let z = z2();
        let bad = diagonal_twist("bad", &z, &z, |i, j| if i == 1 && j == 0 { -1 } else { 1 });
        let r = check_twisting_axioms(&bad, &cfg());
        assert!(matches!(r.verdict("R(x)(v⊗1) = 1⊗v"), Some(Verdict::Fail { .. })));
        assert!(r.verdict("R(x)(1⊗u) = u⊗1").unwrap().is_pass());
    }

    #[test]
    fn inverses_of_constant_twists() {
        let f = TwistOp::flip(&e1(), &e2());
        let fi = invert_twisting(&f, &cfg()).unwrap();
        assert_eq!(fi.inverse().unwrap(), &SeriesMap::flip(e1().space(), e2().space(), MAP_WINDOW));
        let s = invert_twisting(&r_sign(), &cfg()).unwrap();
        let inv = s.inverse().unwrap();
        assert!(inv.is_exact());
        assert_eq!(inv.entry(&[1, 1], &[1, 1]).coeff(&[0]), int(-1));
        assert_eq!(inv.entry(&[0, 1], &[1, 0]).coeff(&[0]), int(1));
        assert!(check_twisting_axioms(&s, &cfg()).exact());
    }

    #[test]
    fn zero_twist_is_not_invertible() {
        assert!(check_twisting_axioms(&r_zero(), &cfg()).exact());
        match invert_twisting(&r_zero(), &cfg()) {
            Err(TwistError::NotInvertible { rank, size, .. }) => assert_eq!((rank, size), (3, 4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reversed_twists_pass_and_reverse_back() {
        for r in [TwistOp::flip(&e2(), &e1()), r_sign()] {
            let rev = reversed_twisting(&r, &cfg()).unwrap();
            assert_eq!(rev.u().name(), r.v().name());
            let rep = check_twisting_axioms(&rev, &cfg());
            assert!(rep.exact(), "{rep}");
            let back = reversed_twisting(&rev, &cfg()).unwrap();
            assert_eq!(back.table(), r.table());
        }
    }

    #[test]
    fn series_inverse_truncates() {
        // (1 + x) on a one-dimensional pair inverts to the geometric series in -x
        let l = Space::with_labels("L", &["one"]).unwrap();
        let mut m = SeriesMap::zero(&[l.clone(), l.clone()], &[l.clone(), l.clone()], MAP_WINDOW);
        m.set_entry(vec![0, 0], vec![0, 0], Series::laurent(MAP_WINDOW, &[(0, 1), (1, 1)]));
        let inv = invert_series_map(&m, "m", 10).unwrap();
        assert!(!inv.is_exact());
        let s = inv.entry(&[0, 0], &[0, 0]);
        for k in 0..=10 {
            assert_eq!(s.coeff(&[k]), int(if k % 2 == 0 { 1 } else { -1 }));
        }
        assert!(s.coeff(&[11]) == int(0));
    }

    #[test]
    fn unit_pair_is_fixed() {
        assert!(vacuum_pair_fixed(&r_sign()));
        assert!(vacuum_pair_fixed(&TwistOp::flip(&e2(), &z2())));
    }
}
