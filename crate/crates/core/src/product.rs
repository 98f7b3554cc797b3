//! Ordinary and twisted tensor products, their structural identities, the
//! universal map, twist extraction, non-degeneracy, and product modules.

use std::collections::BTreeMap;

use num_traits::Zero;

use thiserror::Error;

use crate::linalg::{basis_tuples, compose, sparse_rank, tensor, tuple_label, vector_equal, LinExpr, LinalgError, SeriesMap, SeriesVector, Solution, Space, solve_linear};
use crate::nva::{compute_d, exp_d, check_module, k_search, ModuleForm, Nva, NvaError, NvaModule, MAP_WINDOW};
use crate::report::{CheckConfig, CheckReport, IdentityResult, Tally, Verdict};
use crate::series::{Arg, Scalar, Series, Var, Window};
use crate::twist::{check_twisting_axioms, invert_twisting, reversed_twisting, TwistError, TwistOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("twist `{name}` fails its axioms: {detail}")]
    TwistAxioms { name: String, detail: String },
    #[error("precondition `{hypothesis}` fails: {witness}")]
    PreconditionFail { hypothesis: String, witness: String },
    #[error("extraction failed ({kind}): {detail}")]
    ExtractionFail { kind: ExtractionFailure, detail: String },
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Nva(#[from] NvaError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<crate::series::SeriesError> for ProductError {
    fn from(e: crate::series::SeriesError) -> Self {
        ProductError::Linalg(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionFailure {
    Underdetermined,
    Inconsistent,
    AxiomsFail,
}

impl std::fmt::Display for ExtractionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// How a product algebra was built.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Ordinary,
    Twisted(TwistOp),
    Smash(TwistOp),
}

/// An algebra on `U ⊗ V` together with `u ↦ u⊗1`, `v ↦ 1⊗v`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductNva {
    nva: Nva,
    u: Nva,
    v: Nva,
    provenance: Provenance,
    embed_u: SeriesMap,
    embed_v: SeriesMap,
}

impl ProductNva {
    pub fn nva(&self) -> &Nva {
        &self.nva
    }

    pub fn u(&self) -> &Nva {
        &self.u
    }

    pub fn v(&self) -> &Nva {
        &self.v
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn embed_u(&self) -> &SeriesMap {
        &self.embed_u
    }

    pub fn embed_v(&self) -> &SeriesMap {
        &self.embed_v
    }

    /// The twist in effect: the stored one, or the flip for ordinary products.
    pub fn twist(&self) -> TwistOp {
        match &self.provenance {
            Provenance::Twisted(r) | Provenance::Smash(r) => r.clone(),
            Provenance::Ordinary => TwistOp::flip(&self.u, &self.v),
        }
    }

    pub fn space(&self) -> &Space {
        self.nva.space()
    }

    /// Wraps an algebra on `Space::product(U, V)` with the canonical embeddings.
    pub fn from_parts(nva: Nva, u: &Nva, v: &Nva, provenance: Provenance) -> ProductNva {
        let p = nva.space().clone();
        ProductNva {
            embed_u: embedding(u.space(), v.vacuum(), v.dim(), &p, true),
            embed_v: embedding(v.space(), u.vacuum(), v.dim(), &p, false),
            nva,
            u: u.clone(),
            v: v.clone(),
            provenance,
        }
    }

    /// Index of `u ⊗ v` in the product basis.
    pub fn pair(&self, u: usize, v: usize) -> usize {
        u * self.v.dim() + v
    }
}

fn map_ambient() -> crate::linalg::Ambient {
    crate::linalg::Ambient::new(&[Var::X], Window::new(vec![MAP_WINDOW]).expect("window"))
}

fn one_x() -> Series {
    Series::one(&[Var::X], &Window::new(vec![MAP_WINDOW]).expect("window"))
}

/// `a ↦ a ⊗ 1` (`left`) or `a ↦ 1 ⊗ a` into `product`.
pub fn embedding(src: &Space, other_vacuum: usize, other_dim: usize, product: &Space, left: bool) -> SeriesMap {
    let mut m = SeriesMap::zero(std::slice::from_ref(src), std::slice::from_ref(product), MAP_WINDOW);
    for i in 0..src.dim() {
        let target = if left { i * other_dim + other_vacuum } else { other_vacuum * other_dim + i };
        m.set_entry(vec![i], vec![target], one_x());
    }
    m
}

/// Product name and basis for `U ⊗ V`.
pub fn product_space(name: &str, u: &Nva, v: &Nva) -> Space {
    Space::product(name, u.space(), v.space())
}

fn assemble(name: &str, u: &Nva, v: &Nva, middle: &SeriesMap, provenance: Provenance) -> Result<ProductNva, ProductError> {
    let p = product_space(name, u, v);
    let (us, vs) = (u.space().clone(), v.space().clone());
    let four = [us.clone(), vs.clone(), us.clone(), vs.clone()];
    let amb = map_ambient();
    let minus_x = Arg::neg(Var::X);
    let x = Arg::var(Var::X);
    let mut y = SeriesMap::zero(&[p.clone(), p.clone()], std::slice::from_ref(&p), MAP_WINDOW);
    for idx in basis_tuples(&four) {
        let out = SeriesVector::basis(&four, &idx, &amb)
            .apply(middle, &[1, 2], &minus_x)?
            .apply(u.y(), &[0, 1], &x)?
            .apply(v.y(), &[1, 2], &x)?
            .fuse(0, &p);
        let col = vec![idx[0] * vs.dim() + idx[1], idx[2] * vs.dim() + idx[3]];
        for (row, s) in out.entries() {
            y.set_entry(col.clone(), row.clone(), s.clone());
        }
    }
    let nva = Nva::new(p, &format!("{}.{}", us.label(u.vacuum()), vs.label(v.vacuum())), y)?;
    Ok(ProductNva::from_parts(nva, u, v, provenance))
}

/// `Y(u⊗v,x)(u'⊗v') = Y(u,x)u' ⊗ Y(v,x)v'`.
pub fn build_ordinary_tensor(u: &Nva, v: &Nva) -> Result<ProductNva, ProductError> {
    let sigma = SeriesMap::flip(v.space(), u.space(), MAP_WINDOW);
    assemble(&format!("{}_{}", u.name(), v.name()), u, v, &sigma, Provenance::Ordinary)
}

/// `Y_R(x) = (Y(x) ⊗ Y(x)) R^{23}(-x)`, after checking the twist axioms.
pub fn build_twisted_tensor(u: &Nva, v: &Nva, r: &TwistOp, cfg: &CheckConfig) -> Result<ProductNva, ProductError> {
    if r.u().space() != u.space() || r.v().space() != v.space() {
        return Err(ProductError::TwistAxioms { name: r.name().into(), detail: "twist is for a different pair".into() });
    }
    let report = check_twisting_axioms(r, cfg);
    if let Some(f) = report.failures().next() {
        return Err(ProductError::TwistAxioms { name: r.name().into(), detail: format!("{}: {}", f.identity, f.verdict) });
    }
    twisted_unchecked(&format!("{}_{}_{}", u.name(), r.name(), v.name()), u, v, r, Provenance::Twisted(r.clone()))
}

/// The twisted product formula without the axiom precheck.
pub fn twisted_unchecked(name: &str, u: &Nva, v: &Nva, r: &TwistOp, provenance: Provenance) -> Result<ProductNva, ProductError> {
    assemble(name, u, v, r.table(), provenance)
}

/// Column-by-column comparison of two vertex maps on equal-sized spaces.
pub fn tables_identical(a: &SeriesMap, b: &SeriesMap, name: &str) -> IdentityResult {
    let mut t = Tally::new(name);
    let w = Window::new(vec![MAP_WINDOW]).expect("window");
    for idx in basis_tuples(a.domain()) {
        t.record(&vector_equal(&a.column(&idx), &b.column(&idx), &w), || tuple_label(a.domain(), &idx));
    }
    t.finish()
}

/// Lifts a vector on `U`/`V` legs into the product: `kinds[i]` is `true` for a `U` leg.
fn lift(p: &ProductNva, v: &SeriesVector, kinds: &[bool]) -> Result<SeriesVector, LinalgError> {
    let x = Arg::var(Var::X);
    let mut out = v.clone();
    for (leg, &is_u) in kinds.iter().enumerate() {
        out = out.apply(if is_u { &p.embed_u } else { &p.embed_v }, &[leg], &x)?;
    }
    Ok(out)
}

/// The four structural identities of a twisted product.
pub fn check_product_properties(p: &ProductNva, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("product properties {}", p.nva.name()), &cfg.label());
    let r = p.twist();
    let x = Arg::var(Var::X);
    let minus_x = Arg::neg(Var::X);
    let amb = cfg.ambient(&[Var::X]);
    let win = cfg.window(1);
    let (us, vs, ps) = (p.u.space().clone(), p.v.space().clone(), p.space().clone());

    let mut dsum = Tally::new("D = D⊗1 + 1⊗D");
    let mut reg = Tally::new("Y_R(u,x)v in (U⊗V)[[x]]");
    let mut skew = Tally::new("Y_R(v,x)u = e^{xD}Y_R(-x)R(-x)(v⊗u)");
    let mut unit = Tally::new("u⊗v = (u⊗1)_{-1}(1⊗v)");
    let ds = (compute_d(&p.nva), compute_d(&p.u), compute_d(&p.v));
    let (dp, du, dv) = match ds {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (a, b, c) => {
            let e = [a.err(), b.err(), c.err()].into_iter().flatten().next().map(|e| e.to_string()).unwrap_or_default();
            dsum.fail(e);
            report.push(dsum.finish());
            return report;
        }
    };
    for i in 0..us.dim() {
        for j in 0..vs.dim() {
            let pij = SeriesVector::basis(std::slice::from_ref(&ps), &[p.pair(i, j)], &amb);
            let lhs = pij.apply(&dp, &[0], &x);
            let uv = SeriesVector::basis(&[us.clone(), vs.clone()], &[i, j], &amb);
            let rhs = crate::nva::d_all_legs(&[&du, &dv], &uv).map(|v| v.fuse(0, &ps));
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => dsum.record(&vector_equal(&l, &r, &win), || tuple_label(&[us.clone(), vs.clone()], &[i, j])),
                (Err(e), _) | (_, Err(e)) => dsum.fail(e.to_string()),
            }
        }
    }
    let run = |i: usize, j: usize, reg: &mut Tally, skew: &mut Tally, unit: &mut Tally| -> Result<(), LinalgError> {
        let label = || tuple_label(&[us.clone(), vs.clone()], &[i, j]);
        // Y_R(u⊗1, x)(1⊗v)
        let uv = lift(p, &SeriesVector::basis(&[us.clone(), vs.clone()], &[i, j], &amb), &[true, false])?;
        let yuv = uv.apply(p.nva.y(), &[0, 1], &x)?;
        if let Some((row, s)) = yuv.entries().iter().find(|(_, s)| !s.has_no_poles()) {
            reg.fail(format!("{}: component {row:?} has {s}", label()));
        } else if !yuv.is_exact() {
            reg.inexact();
        }
        let c0 = yuv.coeff_in(Var::X, 0);
        let target = SeriesVector::basis(std::slice::from_ref(&ps), &[p.pair(i, j)], &amb).coeff_in(Var::X, 0);
        unit.record(&vector_equal(&c0, &target, &Window::new(vec![])?), label);
        // Y_R(1⊗v, x)(u⊗1) against e^{xD} Y_R(-x) R(-x)(v⊗u)
        let vu = SeriesVector::basis(&[vs.clone(), us.clone()], &[j, i], &amb);
        let lhs = lift(p, &vu, &[false, true])?.apply(p.nva.y(), &[0, 1], &x)?;
        let twisted = vu.apply(r.table(), &[0, 1], &minus_x)?;
        let rhs = exp_d(&dp, &lift(p, &twisted, &[true, false])?.apply(p.nva.y(), &[0, 1], &minus_x)?, 0, &x)?;
        skew.record(&vector_equal(&lhs, &rhs, &win), || tuple_label(&[vs.clone(), us.clone()], &[j, i]));
        Ok(())
    };
    for i in 0..us.dim() {
        for j in 0..vs.dim() {
            if let Err(e) = run(i, j, &mut reg, &mut skew, &mut unit) {
                skew.fail(e.to_string());
            }
        }
    }
    report.push(dsum.finish());
    report.push(reg.finish());
    report.push(skew.finish());
    report.push(unit.finish());
    report
}

/// The action `U ⊗ W -> W` obtained by restricting `yw` along `embed: U -> P`.
pub fn restrict_action(yw: &SeriesMap, embed: &SeriesMap) -> Result<SeriesMap, LinalgError> {
    let id_w = SeriesMap::identity(&yw.domain()[1..], MAP_WINDOW);
    compose(yw, &tensor(embed, &id_w)?)
}

/// `(x2-x1)^k Y(v,x1)Y(u,x2)w = (x2-x1)^k Y(x2)(1⊗Y(x1))R^{12}(x2-x1)(v⊗u⊗w)`
/// with the minimal `k` recorded per triple.
pub fn twisted_commutation(yu: &SeriesMap, yv: &SeriesMap, r: &SeriesMap, cfg: &CheckConfig, name: &str) -> Tally {
    let (us, vs, ws) = (yu.domain()[0].clone(), yv.domain()[0].clone(), yu.domain()[1].clone());
    let sp = [vs, us, ws];
    let amb = cfg.ambient(&[Var::X1, Var::X2]);
    let win = cfg.window(2);
    let (x1, x2) = (Arg::var(Var::X1), Arg::var(Var::X2));
    let arg = Arg::diff(Var::X2, Var::X1);
    let factor = amb.power(&arg, 1).expect("linear factor");
    let mut t = Tally::new(name);
    for idx in basis_tuples(&sp) {
        let label = tuple_label(&sp, &idx);
        let sides = || -> Result<(SeriesVector, SeriesVector), LinalgError> {
            let b = SeriesVector::basis(&sp, &idx, &amb);
            let lhs = b.apply(yu, &[1, 2], &x2)?.apply(yv, &[0, 1], &x1)?;
            let rhs = b.apply(r, &[0, 1], &arg)?.apply(yv, &[1, 2], &x1)?.apply(yu, &[0, 1], &x2)?;
            Ok((lhs, rhs))
        };
        match sides().and_then(|(l, r)| k_search(&l, &r, &factor, cfg.kmax, &win)) {
            Ok((k, eq)) if k <= cfg.kmax => {
                t.record(&eq, || label.clone());
                t.witness(label, k);
            }
            Ok((_, eq)) => {
                let detail = match eq {
                    crate::linalg::VecEquality::Unequal { index, exponent } => format!("{label}; differs at {index:?}, exponent {exponent:?}"),
                    _ => label,
                };
                t.no_k(detail, cfg.kmax)
            }
            Err(e) => t.fail(format!("{label}: {e}")),
        }
    }
    t
}

/// `Y(u,x1)Y(v,x2)w = Y(x2)(1⊗Y(x1))(R^{-1})^{12}(-x2+x1)(u⊗v⊗w)`.
pub fn inverse_commutation(yu: &SeriesMap, yv: &SeriesMap, rinv: &SeriesMap, cfg: &CheckConfig, name: &str) -> Tally {
    let (us, vs, ws) = (yu.domain()[0].clone(), yv.domain()[0].clone(), yu.domain()[1].clone());
    let sp = [us, vs, ws];
    let amb = cfg.ambient(&[Var::X1, Var::X2]);
    let win = cfg.window(2);
    let (x1, x2) = (Arg::var(Var::X1), Arg::var(Var::X2));
    let arg = Arg::pair(-1, Var::X2, 1, Var::X1);
    let mut t = Tally::new(name);
    for idx in basis_tuples(&sp) {
        let run = || -> Result<_, LinalgError> {
            let b = SeriesVector::basis(&sp, &idx, &amb);
            let lhs = b.apply(yv, &[1, 2], &x2)?.apply(yu, &[0, 1], &x1)?;
            let rhs = b.apply(rinv, &[0, 1], &arg)?.apply(yu, &[1, 2], &x1)?.apply(yv, &[0, 1], &x2)?;
            Ok(vector_equal(&lhs, &rhs, &win))
        };
        match run() {
            Ok(eq) => t.record(&eq, || tuple_label(&sp, &idx)),
            Err(e) => t.fail(e.to_string()),
        }
    }
    t
}

/// `Y_W(u,x1)Y_W(v,x2)w` has support bounded below in both variables.
pub fn two_variable_regularity(yu: &SeriesMap, yv: &SeriesMap, cfg: &CheckConfig, name: &str) -> Tally {
    let (us, vs, ws) = (yu.domain()[0].clone(), yv.domain()[0].clone(), yu.domain()[1].clone());
    let sp = [us, vs, ws];
    let amb = cfg.ambient(&[Var::X1, Var::X2]);
    let (lo1, lo2) = (amb.window.range(0).0, amb.window.range(1).0);
    let mut t = Tally::new(name);
    for idx in basis_tuples(&sp) {
        let b = SeriesVector::basis(&sp, &idx, &amb);
        match b.apply(yv, &[1, 2], &Arg::var(Var::X2)).and_then(|v| v.apply(yu, &[0, 1], &Arg::var(Var::X1))) {
            Ok(v) => {
                let bad = v.entries().values().flat_map(|s| s.terms().keys()).find(|e| e[0] <= lo1 || e[1] <= lo2);
                if let Some(e) = bad {
                    t.fail(format!("{}: support reaches exponent {e:?}", tuple_label(&sp, &idx)));
                }
            }
            Err(e) => t.fail(e.to_string()),
        }
    }
    t
}

/// The relations of a twisted product that need `R^{-1}`, plus the
/// `k`-witnessed commutation.
pub fn check_invertible_relations(p: &ProductNva, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("invertible relations {}", p.nva.name()), &cfg.label());
    let r = p.twist();
    let x = Arg::var(Var::X);
    let amb = cfg.ambient(&[Var::X]);
    let win = cfg.window(1);
    let (us, vs) = (p.u.space().clone(), p.v.space().clone());
    let yu = restrict_action(p.nva.y(), &p.embed_u);
    let yv = restrict_action(p.nva.y(), &p.embed_v);
    let (yu, yv) = match (yu, yv) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            let mut t = Tally::new("restricted actions");
            t.fail(e.to_string());
            report.push(t.finish());
            return report;
        }
    };
    report.push(twisted_commutation(&yu, &yv, r.table(), cfg, "(x2-x1)^k Y_R(v,x1)Y_R(u,x2) = (x2-x1)^k Y_R(x2)(1⊗Y_R(x1))R12(x2-x1)").finish());
    let inv = match r.inverse() {
        Some(i) => i.clone(),
        None => match invert_twisting(&r, cfg) {
            Ok(ri) => ri.inverse().expect("attached").clone(),
            Err(e) => {
                report.note(format!("R is not invertible: {e}"));
                return report;
            }
        },
    };
    let dp = match compute_d(&p.nva) {
        Ok(d) => d,
        Err(e) => {
            let mut t = Tally::new("D of the product");
            t.fail(e.to_string());
            report.push(t.finish());
            return report;
        }
    };
    let mut skew = Tally::new("Y_R(u,x)v = e^{xD}Y_R(-x)R^{-1}(x)(u⊗v)");
    for i in 0..us.dim() {
        for j in 0..vs.dim() {
            let run = || -> Result<_, LinalgError> {
                let uv = SeriesVector::basis(&[us.clone(), vs.clone()], &[i, j], &amb);
                let lhs = lift(p, &uv, &[true, false])?.apply(p.nva.y(), &[0, 1], &x)?;
                let vu = uv.apply(&inv, &[0, 1], &x)?;
                let rhs = exp_d(&dp, &lift(p, &vu, &[false, true])?.apply(p.nva.y(), &[0, 1], &Arg::neg(Var::X))?, 0, &x)?;
                Ok(vector_equal(&lhs, &rhs, &win))
            };
            match run() {
                Ok(eq) => skew.record(&eq, || tuple_label(&[us.clone(), vs.clone()], &[i, j])),
                Err(e) => skew.fail(e.to_string()),
            }
        }
    }
    report.push(skew.finish());
    report.push(inverse_commutation(&yu, &yv, &inv, cfg, "Y_R(u,x1)Y_R(v,x2) = Y_R(x2)(1⊗Y_R(x1))(R^{-1})12(-x2+x1)").finish());
    report
}

/// `f(Y_A(a,x)b) = Y_B(f a,x) f b` on all basis pairs, and `f(1) = 1`.
pub fn check_homomorphism(f: &SeriesMap, a: &Nva, b: &Nva, cfg: &CheckConfig, name: &str) -> Tally {
    let amb = cfg.ambient(&[Var::X]);
    let win = cfg.window(1);
    let x = Arg::var(Var::X);
    let sa = [a.space().clone()];
    let mut t = Tally::new(name);
    let one = SeriesVector::basis(&sa, &[a.vacuum()], &amb).apply(f, &[0], &x);
    match one {
        Ok(v) => t.record(&vector_equal(&v, &SeriesVector::basis(&[b.space().clone()], &[b.vacuum()], &amb), &win), || "vacuum".into()),
        Err(e) => t.fail(e.to_string()),
    }
    let pair = [a.space().clone(), a.space().clone()];
    for idx in basis_tuples(&pair) {
        let run = || -> Result<_, LinalgError> {
            let base = SeriesVector::basis(&pair, &idx, &amb);
            let lhs = base.apply(a.y(), &[0, 1], &x)?.apply(f, &[0], &x)?;
            let rhs = base.apply(f, &[0], &x)?.apply(f, &[1], &x)?.apply(b.y(), &[0, 1], &x)?;
            Ok(vector_equal(&lhs, &rhs, &win))
        };
        match run() {
            Ok(eq) => t.record(&eq, || tuple_label(&pair, &idx)),
            Err(e) => t.fail(e.to_string()),
        }
    }
    t
}

fn precondition(t: Tally, hypothesis: &str) -> Result<IdentityResult, ProductError> {
    let r = t.finish();
    match &r.verdict {
        Verdict::Fail { witness } | Verdict::NoKFound { witness, .. } => {
            Err(ProductError::PreconditionFail { hypothesis: hypothesis.into(), witness: witness.clone() })
        }
        _ => Ok(r),
    }
}

/// `Y(f u, x) g v` for basis `u ∈ A`, `v ∈ B`, as a vector in `K`.
fn y_of_images(k: &Nva, f: &SeriesMap, g: &SeriesMap, i: usize, j: usize, amb: &crate::linalg::Ambient, arg: &Arg) -> Result<SeriesVector, LinalgError> {
    let x = Arg::var(Var::X);
    SeriesVector::basis(&[f.domain()[0].clone(), g.domain()[0].clone()], &[i, j], amb)
        .apply(f, &[0], &x)?
        .apply(g, &[1], &x)?
        .apply(k.y(), &[0, 1], arg)
}

/// Result of [`universal_map`]: the map and the checks performed on it.
#[derive(Clone, Debug)]
pub struct UniversalMap {
    pub map: SeriesMap,
    pub report: CheckReport,
}

/// `ψ(u⊗v) = ψ1(u)_{-1}ψ2(v)` from a product into `k`, after verifying the hypotheses.
pub fn universal_map(p: &ProductNva, k: &Nva, psi1: &SeriesMap, psi2: &SeriesMap, cfg: &CheckConfig) -> Result<UniversalMap, ProductError> {
    let mut report = CheckReport::new(&format!("universal map {} -> {}", p.nva.name(), k.name()), &cfg.label());
    report.push(precondition(check_homomorphism(psi1, &p.u, k, cfg, "psi1 is a homomorphism"), "psi1 homomorphism")?);
    report.push(precondition(check_homomorphism(psi2, &p.v, k, cfg, "psi2 is a homomorphism"), "psi2 homomorphism")?);
    let amb = cfg.ambient(&[Var::X]);
    let win = cfg.window(1);
    let x = Arg::var(Var::X);
    let minus_x = Arg::neg(Var::X);
    let (us, vs) = (p.u.space().clone(), p.v.space().clone());
    let dk = compute_d(k)?;
    let r = p.twist();
    let mut reg = Tally::new("Y(psi1 u,x)psi2 v in K[[x]]");
    let mut skew = Tally::new("Y(psi2 v,x)psi1 u = e^{xD}Y(-x)(psi1⊗psi2)R(-x)(v⊗u)");
    let mut map = SeriesMap::zero(&[p.space().clone()], &[k.space().clone()], MAP_WINDOW);
    for i in 0..us.dim() {
        for j in 0..vs.dim() {
            let label = || tuple_label(&[us.clone(), vs.clone()], &[i, j]);
            let yuv = y_of_images(k, psi1, psi2, i, j, &amb, &x)?;
            if let Some((row, s)) = yuv.entries().iter().find(|(_, s)| !s.has_no_poles()) {
                reg.fail(format!("{}: component {} has {s}", label(), tuple_label(yuv.spaces(), row)));
            }
            for (row, s) in yuv.entries() {
                let c = s.coeff(&[0]);
                if !c.is_zero() {
                    map.set_entry(vec![p.pair(i, j)], row.clone(), Series::constant(&[Var::X], &Window::new(vec![MAP_WINDOW])?, c));
                }
            }
            let lhs = y_of_images(k, psi2, psi1, j, i, &amb, &x)?;
            let rhs = SeriesVector::basis(&[vs.clone(), us.clone()], &[j, i], &amb)
                .apply(r.table(), &[0, 1], &minus_x)?
                .apply(psi1, &[0], &x)?
                .apply(psi2, &[1], &x)?
                .apply(k.y(), &[0, 1], &minus_x)?;
            let rhs = exp_d(&dk, &rhs, 0, &x)?;
            skew.record(&vector_equal(&lhs, &rhs, &win), || tuple_label(&[vs.clone(), us.clone()], &[j, i]));
        }
    }
    report.push(precondition(reg, "regularity")?);
    report.push(precondition(skew, "skew symmetry")?);
    report.push(check_homomorphism(&map, &p.nva, k, cfg, "psi is a homomorphism").finish());
    let mut ext = Tally::new("psi extends psi1 and psi2");
    for (embed, f) in [(&p.embed_u, psi1), (&p.embed_v, psi2)] {
        let c = compose(&map, embed)?;
        ext.record(&if c == *f { crate::linalg::VecEquality::ExactlyEqual } else { first_difference(&c, f) }, || f.domain()[0].name().to_string());
    }
    report.push(ext.finish());
    Ok(UniversalMap { map, report })
}

fn first_difference(a: &SeriesMap, b: &SeriesMap) -> crate::linalg::VecEquality {
    let w = Window::new(vec![MAP_WINDOW]).expect("window");
    for idx in basis_tuples(a.domain()) {
        let eq = vector_equal(&a.column(&idx), &b.column(&idx), &w);
        if !eq.is_equal() {
            return eq;
        }
    }
    crate::linalg::VecEquality::ExactlyEqual
}

/// The isomorphism `V ⊗_{R^{-1}(-x)} U -> U ⊗_R V` and its inverse.
#[derive(Clone, Debug)]
pub struct FlipIso {
    pub reversed: ProductNva,
    /// `v⊗u ↦ (1⊗v)_{-1}(u⊗1)`.
    pub psi: SeriesMap,
    /// `u⊗v ↦ (1⊗u)_{-1}(v⊗1)`.
    pub phi: SeriesMap,
    pub report: CheckReport,
}

pub fn flip_iso(p: &ProductNva, cfg: &CheckConfig) -> Result<FlipIso, ProductError> {
    let r = p.twist();
    let r = match r.inverse() {
        Some(_) => r,
        None => invert_twisting(&r, cfg)?,
    };
    let inv = r.inverse().expect("inverse attached");
    for (m, which) in [(r.table(), "R"), (inv, "R^{-1}")] {
        if !m.has_no_poles() {
            return Err(ProductError::PreconditionFail {
                hypothesis: format!("{which}(x) has no negative powers of x"),
                witness: format!("pole of order {}", m.pole_order()),
            });
        }
    }
    let rev = reversed_twisting(&r, cfg)?;
    let q = build_twisted_tensor(&p.v, &p.u, &rev, cfg)?;
    let mut report = CheckReport::new(&format!("flip isomorphism {} -> {}", q.nva.name(), p.nva.name()), &cfg.label());
    let psi = universal_map(&q, &p.nva, &p.embed_v, &p.embed_u, cfg)?;
    let phi = universal_map(p, &q.nva, &q.embed_v, &q.embed_u, cfg)?;
    report.absorb(psi.report);
    report.absorb(phi.report);
    let mut t = Tally::new("psi∘phi = 1 and phi∘psi = 1");
    let id_p = SeriesMap::identity(&[p.space().clone()], MAP_WINDOW);
    let id_q = SeriesMap::identity(&[q.space().clone()], MAP_WINDOW);
    t.record(&first_difference(&compose(&psi.map, &phi.map)?, &id_p), || "psi∘phi".into());
    t.record(&first_difference(&compose(&phi.map, &psi.map)?, &id_q), || "phi∘psi".into());
    report.push(t.finish());
    Ok(FlipIso { reversed: q, psi: psi.map, phi: phi.map, report })
}

/// Which pairs feed the `Z_2` map.
#[derive(Clone, Debug)]
pub enum Z2Domain {
    Full,
    /// Pairs `ι_U(u) ⊗ ι_V(v)` through two embeddings into the algebra.
    Restricted(SeriesMap, SeriesMap),
}

/// Kernel data of `Z_2(a⊗b⊗f) = f·Y(a,x1)Y(b,x2)1` on a monomial window.
#[derive(Clone, Debug)]
pub struct Z2Result {
    pub columns: usize,
    pub rank: usize,
    pub kernel_rank: usize,
    pub report: CheckReport,
}

/// Highest power of `x1`, `x2` in the coefficient monomials of [`check_z2_injectivity`].
pub const Z2_DEGREE: i32 = 2;

pub fn check_z2_injectivity(k: &Nva, domain: &Z2Domain, cfg: &CheckConfig) -> Result<Z2Result, ProductError> {
    let amb = cfg.ambient(&[Var::X1, Var::X2]);
    let ks = [k.space().clone()];
    let x = Arg::var(Var::X);
    let images = |f: Option<&SeriesMap>| -> Result<Vec<SeriesVector>, LinalgError> {
        match f {
            None => Ok((0..k.dim()).map(|i| SeriesVector::basis(&ks, &[i], &amb)).collect()),
            Some(f) => (0..f.domain()[0].dim()).map(|i| SeriesVector::basis(&f.domain()[..1], &[i], &amb).apply(f, &[0], &x)).collect(),
        }
    };
    let (left, right, label) = match domain {
        Z2Domain::Full => (images(None)?, images(None)?, "full".to_string()),
        Z2Domain::Restricted(iu, iv) => (images(Some(iu))?, images(Some(iv))?, format!("{} ⊗ {}", iu.domain()[0].name(), iv.domain()[0].name())),
    };
    let mut keys: BTreeMap<(Vec<usize>, Vec<i32>), usize> = BTreeMap::new();
    let mut columns = Vec::new();
    let mut exact = true;
    for a in &left {
        for b in &right {
            // a ⊗ b ⊗ 1 on three legs, then Y(b,x2) and Y(a,x1)
            let mut t = SeriesVector::zero(&[ks[0].clone(), ks[0].clone(), ks[0].clone()], &amb);
            for (ia, sa) in a.entries() {
                for (ib, sb) in b.entries() {
                    t.add_entry(vec![ia[0], ib[0], k.vacuum()], sa.mul(sb)?);
                }
            }
            let img = t.apply(k.y(), &[1, 2], &Arg::var(Var::X2))?.apply(k.y(), &[0, 1], &Arg::var(Var::X1))?;
            exact &= img.is_exact();
            for d1 in 0..=Z2_DEGREE {
                for d2 in 0..=Z2_DEGREE {
                    let f = Series::monomial(&amb.vars, &amb.window, vec![d1, d2], Scalar::from_integer(1.into()));
                    let col = img.mul_series(&f)?;
                    let mut sparse = BTreeMap::new();
                    for (idx, s) in col.entries() {
                        for (e, c) in s.terms() {
                            let n = keys.len();
                            let key = *keys.entry((idx.clone(), e.clone())).or_insert(n);
                            sparse.insert(key, c.clone());
                        }
                    }
                    columns.push(sparse);
                }
            }
        }
    }
    let rank = sparse_rank(&columns);
    let kernel_rank = columns.len() - rank;
    let mut report = CheckReport::new(&format!("Z2 injectivity {} ({label})", k.name()), &cfg.label());
    report.note(format!("{} columns, rank {rank}, kernel rank {kernel_rank}, monomials x1^a x2^b with a,b <= {Z2_DEGREE}", columns.len()));
    let mut t = Tally::new("Z2 kernel = 0");
    if !exact {
        t.inexact();
    }
    if kernel_rank > 0 {
        t.fail(format!("kernel rank {kernel_rank} of {} columns", columns.len()));
    }
    report.push(t.finish());
    Ok(Z2Result { columns: columns.len(), rank, kernel_rank, report })
}

/// Lowest and highest `n` in the ansatz `R(x)(v⊗u) = Σ c_n x^n u'⊗v'`.
pub const EXTRACT_RANGE: (i32, i32) = (-2, 2);

/// Outcome of [`extract_twisting`].
#[derive(Clone, Debug)]
pub struct Extraction {
    pub twist: TwistOp,
    pub z2: Z2Result,
    pub report: CheckReport,
}

/// Recovers `R(x)` from an algebra `k` containing `U` and `V` through `iu`, `iv`.
pub fn extract_twisting(k: &Nva, u: &Nva, v: &Nva, iu: &SeriesMap, iv: &SeriesMap, cfg: &CheckConfig) -> Result<Extraction, ProductError> {
    let mut report = CheckReport::new(&format!("extract twisting {} ⊂ {}", u.name(), k.name()), &cfg.label());
    report.push(precondition(check_homomorphism(iu, u, k, cfg, "embedding of U is a homomorphism"), "U embedding homomorphism")?);
    report.push(precondition(check_homomorphism(iv, v, k, cfg, "embedding of V is a homomorphism"), "V embedding homomorphism")?);
    let amb1 = cfg.ambient(&[Var::X]);
    let mut reg = Tally::new("Y(u,x)v in K[[x]]");
    for i in 0..u.dim() {
        for j in 0..v.dim() {
            let y = y_of_images(k, iu, iv, i, j, &amb1, &Arg::var(Var::X))?;
            if !y.has_no_poles() {
                reg.fail(tuple_label(&[u.space().clone(), v.space().clone()], &[i, j]));
            }
        }
    }
    report.push(precondition(reg, "regularity")?);

    let amb = cfg.ambient(&[Var::X1, Var::X2]);
    let win = cfg.window(2);
    let ks = [k.space().clone()];
    let arg = Arg::diff(Var::X2, Var::X1);
    let (lo, hi) = EXTRACT_RANGE;
    let span = (hi - lo + 1) as usize;
    let unknown = |c: usize, d: usize, n: i32| (c * v.dim() + d) * span + (n - lo) as usize;
    let nunk = u.dim() * v.dim() * span;
    // Y(a,x1)Y(b,x2)1 for images a of `f`, b of `g`
    let double = |f: &SeriesMap, i: usize, g: &SeriesMap, j: usize, first: Var, second: Var| -> Result<SeriesVector, LinalgError> {
        let x = Arg::var(Var::X);
        let sp = [f.domain()[0].clone(), g.domain()[0].clone(), ks[0].clone()];
        SeriesVector::basis(&sp, &[i, j, k.vacuum()], &amb)
            .apply(f, &[0], &x)?
            .apply(g, &[1], &x)?
            .apply(k.y(), &[1, 2], &Arg::var(second))?
            .apply(k.y(), &[0, 1], &Arg::var(first))
    };
    let mut table = SeriesMap::zero(&[v.space().clone(), u.space().clone()], &[u.space().clone(), v.space().clone()], MAP_WINDOW);
    let mut ks_used = Vec::new();
    let mut failure: Option<(ExtractionFailure, String)> = None;
    for vb in 0..v.dim() {
        for ub in 0..u.dim() {
            let label = format!("{}⊗{}", v.space().label(vb), u.space().label(ub));
            let lhs0 = double(iv, vb, iu, ub, Var::X1, Var::X2)?;
            let mut basis_terms = Vec::new();
            for c in 0..u.dim() {
                for d in 0..v.dim() {
                    let yy = double(iu, c, iv, d, Var::X2, Var::X1)?;
                    for n in lo..=hi {
                        let f = crate::series::expand_power(n, &arg, &amb.vars, &amb.window)?;
                        let t = yy.mul_series(&f)?;
                        basis_terms.push((unknown(c, d, n), t));
                    }
                }
            }
            let factor = amb.power(&arg, 1)?;
            let mut outcome = None;
            let (mut lhs, mut terms) = (lhs0, basis_terms);
            for kk in 0..=cfg.kmax {
                if kk > 0 {
                    lhs = lhs.mul_series(&factor)?;
                    for (_, t) in terms.iter_mut() {
                        *t = t.mul_series(&factor)?;
                    }
                }
                let eq = (LinExpr::constant(lhs.clone()), LinExpr { constant: SeriesVector::zero(lhs.spaces(), &amb), terms: terms.clone() });
                match solve_linear(&[eq], nunk, &win) {
                    Solution::Inconsistent { witness } => outcome = Some(Err((ExtractionFailure::Inconsistent, witness))),
                    Solution::Underdetermined { rank, unknowns, free, .. } => {
                        outcome = Some(Err((ExtractionFailure::Underdetermined, format!("rank {rank} of {unknowns} unknowns, free {free:?}"))));
                        break;
                    }
                    Solution::Unique(x) => {
                        outcome = Some(Ok(x));
                        ks_used.push(kk);
                        break;
                    }
                }
            }
            match outcome.expect("at least one k") {
                Err((kind, detail)) => {
                    if failure.as_ref().is_none_or(|(k, _)| *k != ExtractionFailure::Inconsistent && kind == ExtractionFailure::Inconsistent) {
                        failure = Some((kind, format!("{label}: {detail}")));
                    }
                }
                Ok(x) => {
                    for c in 0..u.dim() {
                        for d in 0..v.dim() {
                            let terms: Vec<(i32, Scalar)> = (lo..=hi).map(|n| (n, x[unknown(c, d, n)].clone())).filter(|(_, s)| !s.is_zero()).collect();
                            if !terms.is_empty() {
                                let w = Window::new(vec![MAP_WINDOW])?;
                                let mut s = Series::zero(&[Var::X], &w);
                                for (n, c) in terms {
                                    s.add_term(vec![n], c);
                                }
                                table.set_entry(vec![vb, ub], vec![c, d], s);
                            }
                        }
                    }
                }
            }
        }
    }
    if let Some((kind, detail)) = failure {
        return Err(ProductError::ExtractionFail { kind, detail });
    }
    report.note(format!("vacuum systems solved with k = {}", ks_used.iter().max().copied().unwrap_or(0)));
    let twist = TwistOp::new(&format!("R_{}", k.name()), u.clone(), v.clone(), table)?;

    let yu = restrict_action(k.y(), iu)?;
    let yv = restrict_action(k.y(), iv)?;
    let all_w = twisted_commutation(&yu, &yv, twist.table(), cfg, "(x2-x1)^k Y(v,x1)Y(u,x2)w = (x2-x1)^k Y(x2)(1⊗Y(x1))R12(x2-x1)(v⊗u⊗w)").finish();
    if let Verdict::Fail { witness } | Verdict::NoKFound { witness, .. } = &all_w.verdict {
        return Err(ProductError::ExtractionFail { kind: ExtractionFailure::Inconsistent, detail: format!("validation over all w: {witness}") });
    }
    report.push(all_w);
    let axioms = check_twisting_axioms(&twist, cfg);
    if let Some(f) = axioms.failures().next() {
        return Err(ProductError::ExtractionFail { kind: ExtractionFailure::AxiomsFail, detail: format!("{}: {}", f.identity, f.verdict) });
    }
    report.absorb(axioms);

    let product = twisted_unchecked(&format!("{}_{}_{}", u.name(), twist.name(), v.name()), u, v, &twist, Provenance::Twisted(twist.clone()))?;
    let theta = universal_map(&product, k, iu, iv, cfg)?;
    report.absorb(theta.report);
    let mut iso = Tally::new("u⊗v -> u_{-1}v is bijective");
    let rows: Vec<BTreeMap<usize, Scalar>> = (0..product.space().dim())
        .map(|c| theta.map.column(&[c]).entries().iter().map(|(row, s)| (row[0], s.coeff(&[0]))).collect())
        .collect();
    let rank = sparse_rank(&rows);
    if rank != product.space().dim() || rank != k.dim() {
        iso.fail(format!("rank {rank}, dim U⊗V = {}, dim K = {}", product.space().dim(), k.dim()));
    }
    report.push(iso.finish());
    let z2 = check_z2_injectivity(k, &Z2Domain::Restricted(iu.clone(), iv.clone()), cfg)?;
    report.note(format!("restricted Z2 kernel rank {}", z2.kernel_rank));
    Ok(Extraction { twist, z2, report })
}

/// A module over a product together with its construction checks.
#[derive(Clone, Debug)]
pub struct ProductModule {
    pub module: NvaModule,
    pub report: CheckReport,
}

/// `Y^W_R(u⊗v,x)w = (Y^U_W(u,x1)Y^V_W(v,x)w)|_{x1=x}` after verifying the hypotheses.
pub fn build_product_module(p: &ProductNva, mu: &NvaModule, mv: &NvaModule, cfg: &CheckConfig) -> Result<ProductModule, ProductError> {
    if mu.space() != mv.space() || mu.algebra().space() != p.u.space() || mv.algebra().space() != p.v.space() {
        return Err(ProductError::PreconditionFail { hypothesis: "module shapes".into(), witness: format!("{} and {}", mu.space().name(), mv.space().name()) });
    }
    let mut report = CheckReport::new(&format!("product module {} over {}", mu.space().name(), p.nva.name()), &cfg.label());
    let r = p.twist();
    let r = match r.inverse() {
        Some(_) => r,
        None => invert_twisting(&r, cfg).map_err(|e| ProductError::PreconditionFail { hypothesis: "R invertible".into(), witness: e.to_string() })?,
    };
    report.push(precondition(two_variable_regularity(mu.yw(), mv.yw(), cfg, "Y_W(u,x1)Y_W(v,x2) in Hom(W,W((x1,x2)))"), "regularity")?);
    report.push(precondition(inverse_commutation(mu.yw(), mv.yw(), r.inverse().expect("attached"), cfg, "Y_W(u,x1)Y_W(v,x2) = Y_W(x2)(1⊗Y_W(x1))(R^{-1})12(-x2+x1)"), "inverse commutation")?);
    report.push(precondition(twisted_commutation(mu.yw(), mv.yw(), r.table(), cfg, "(x2-x1)^k Y_W(v,x1)Y_W(u,x2) = (x2-x1)^k Y_W(x2)(1⊗Y_W(x1))R12(x2-x1)"), "k-commutation")?);

    let ws = mu.space().clone();
    let sp = [p.u.space().clone(), p.v.space().clone(), ws.clone()];
    let amb = map_ambient();
    let x = Arg::var(Var::X);
    let mut yw = SeriesMap::zero(&[p.space().clone(), ws.clone()], std::slice::from_ref(&ws), MAP_WINDOW);
    for idx in basis_tuples(&sp) {
        let out = SeriesVector::basis(&sp, &idx, &amb).apply(mv.yw(), &[1, 2], &x)?.apply(mu.yw(), &[0, 1], &x)?;
        yw.set_column(vec![p.pair(idx[0], idx[1]), idx[2]], &out);
    }
    let module = NvaModule::new(p.nva.clone(), ws, yw)?;
    report.absorb(check_module(&module, cfg, ModuleForm::Original));
    let yu = restrict_action(module.yw(), &p.embed_u)?;
    let yv = restrict_action(module.yw(), &p.embed_v)?;
    report.push(tables_identical(&yu, mu.yw(), "restriction to U⊗1 is Y^U_W"));
    report.push(tables_identical(&yv, mv.yw(), "restriction to 1⊗V is Y^V_W"));
    Ok(ProductModule { module, report })
}

/// Regularity, twisted commutation and, when `R` is invertible, the inverse
/// commutation for a module over a twisted product.
pub fn check_module_relations(p: &ProductNva, m: &NvaModule, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("module relations {} over {}", m.space().name(), p.nva.name()), &cfg.label());
    let (yu, yv) = match (restrict_action(m.yw(), &p.embed_u), restrict_action(m.yw(), &p.embed_v)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            let mut t = Tally::new("restricted actions");
            t.fail(e.to_string());
            report.push(t.finish());
            return report;
        }
    };
    let r = p.twist();
    report.push(two_variable_regularity(&yu, &yv, cfg, "Y_W(u,x1)Y_W(v,x2) in Hom(W,W((x1,x2)))").finish());
    report.push(twisted_commutation(&yu, &yv, r.table(), cfg, "(x2-x1)^k Y_W(v,x1)Y_W(u,x2) = (x2-x1)^k Y_W(x2)(1⊗Y_W(x1))R12(x2-x1)").finish());
    let inv = match r.inverse() {
        Some(i) => Some(i.clone()),
        None => invert_twisting(&r, cfg).ok().and_then(|t| t.inverse().cloned()),
    };
    match inv {
        Some(inv) => report.push(inverse_commutation(&yu, &yv, &inv, cfg, "Y_W(u,x1)Y_W(v,x2) = Y_W(x2)(1⊗Y_W(x1))(R^{-1})12(-x2+x1)").finish()),
        None => report.note("R is not invertible; inverse commutation skipped"),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nva::check_nva;
    use crate::examples::{e1, e2, r_sign, z2};

    fn cfg() -> CheckConfig {
        CheckConfig::new(-4, 4, 4)
    }

    fn all_pass(r: &CheckReport) {
        assert!(r.passed(), "{}", r.render_text());
    }

    #[test]
    fn ordinary_tensor_is_an_nva() {
        let p = build_ordinary_tensor(&e1(), &e2()).unwrap();
        assert_eq!(p.space().name(), "E1_E2");
        assert_eq!(p.nva().vacuum(), 0);
        all_pass(&check_nva(p.nva(), &cfg()));
        all_pass(&check_product_properties(&p, &cfg()));
        all_pass(&check_invertible_relations(&p, &cfg()));
    }

    #[test]
    fn sign_twisted_product() {
        let z = z2();
        let p = build_twisted_tensor(&z, &z, &r_sign(), &cfg()).unwrap();
        assert_eq!(p.space().name(), "Z2_R_sign_Z2");
        all_pass(&check_nva(p.nva(), &cfg()));
        all_pass(&check_product_properties(&p, &cfg()));
        all_pass(&check_invertible_relations(&p, &cfg()));
        // (g⊗1)(1⊗g) = g⊗g, (1⊗g)(g⊗1) = -g⊗g
        let gg = p.pair(1, 1);
        assert_eq!(p.nva().y_entry(p.pair(0, 1), p.pair(1, 0), gg).coeff(&[0]), crate::series::int(-1));
        assert_eq!(p.nva().y_entry(p.pair(1, 0), p.pair(0, 1), gg).coeff(&[0]), crate::series::int(1));
    }

    #[test]
    fn universal_map_into_itself_is_identity() {
        let z = z2();
        let p = build_twisted_tensor(&z, &z, &r_sign(), &cfg()).unwrap();
        let um = universal_map(&p, p.nva(), p.embed_u(), p.embed_v(), &cfg()).unwrap();
        all_pass(&um.report);
        assert_eq!(um.map, SeriesMap::identity(&[p.space().clone()], MAP_WINDOW));
    }

    #[test]
    fn universal_map_rejects_poles() {
        let e = e1();
        let p = build_ordinary_tensor(&e, &e).unwrap();
        let mut bad = p.embed_v().clone();
        bad.set_entry(vec![1], vec![p.pair(0, 1)], Series::laurent(MAP_WINDOW, &[(-1, 1)]));
        let err = universal_map(&p, p.nva(), p.embed_u(), &bad, &cfg()).unwrap_err();
        assert!(matches!(err, ProductError::PreconditionFail { .. }), "{err}");
    }

    #[test]
    fn flip_iso_for_sign_twist() {
        let z = z2();
        let p = build_twisted_tensor(&z, &z, &r_sign(), &cfg()).unwrap();
        let iso = flip_iso(&p, &cfg()).unwrap();
        all_pass(&iso.report);
        // (1⊗g)_{-1}(g⊗1) = -g⊗g
        assert_eq!(iso.psi.entry(&[iso.reversed.pair(1, 1)], &[p.pair(1, 1)]).coeff(&[0]), crate::series::int(-1));
    }

    #[test]
    fn extraction_recovers_sign_and_flip() {
        let z = z2();
        let p = build_twisted_tensor(&z, &z, &r_sign(), &cfg()).unwrap();
        let ex = extract_twisting(p.nva(), &z, &z, p.embed_u(), p.embed_v(), &cfg()).unwrap();
        all_pass(&ex.report);
        assert_eq!(ex.twist.table(), r_sign().table());
        assert_eq!(ex.z2.kernel_rank, 0);
        let e = e1();
        let q = build_ordinary_tensor(&e, &e).unwrap();
        let ex = extract_twisting(q.nva(), &e, &e, q.embed_u(), q.embed_v(), &cfg()).unwrap();
        assert_eq!(ex.twist.table(), TwistOp::flip(&e, &e).table());
    }

    #[test]
    fn z2_kernels() {
        let q = crate::examples::q1();
        assert_eq!(check_z2_injectivity(&q, &Z2Domain::Full, &cfg()).unwrap().kernel_rank, 0);
        let e = e1();
        let full = check_z2_injectivity(&e, &Z2Domain::Full, &cfg()).unwrap();
        assert!(full.kernel_rank > 0);
        assert!(!full.report.passed());
    }

    #[test]
    fn adjoint_product_module() {
        let e = e1();
        let p = build_ordinary_tensor(&e, &e).unwrap();
        let pm = build_product_module(&p, &e.adjoint(), &e.adjoint(), &cfg()).unwrap();
        all_pass(&pm.report);
        all_pass(&check_module_relations(&p, &p.nva().adjoint(), &cfg()));
    }

    fn split_adjoint(p: &ProductNva) -> (NvaModule, NvaModule) {
        let w = p.space().clone();
        let mu = NvaModule::new(p.u().clone(), w.clone(), restrict_action(p.nva().y(), p.embed_u()).unwrap()).unwrap();
        let mv = NvaModule::new(p.v().clone(), w, restrict_action(p.nva().y(), p.embed_v()).unwrap()).unwrap();
        (mu, mv)
    }

    #[test]
    fn split_adjoint_reproduces_product() {
        let z = z2();
        for p in [build_ordinary_tensor(&e1(), &e2()).unwrap(), build_twisted_tensor(&z, &z, &r_sign(), &cfg()).unwrap()] {
            let (mu, mv) = split_adjoint(&p);
            let pm = build_product_module(&p, &mu, &mv, &cfg()).unwrap();
            all_pass(&pm.report);
            assert_eq!(pm.module.yw(), p.nva().y());
            all_pass(&check_module_relations(&p, &pm.module, &cfg()));
        }
    }

    fn e1_into_n4(target: usize) -> SeriesMap {
        let e = e1();
        let n = crate::examples::n4();
        let mut m = SeriesMap::zero(&[e.space().clone()], &[n.space().clone()], MAP_WINDOW);
        m.set_entry(vec![0], vec![0], one_x());
        m.set_entry(vec![1], vec![target], one_x());
        m
    }

    #[test]
    fn n4_extraction() {
        let e = e1();
        let n = crate::examples::n4();
        let ex = extract_twisting(&n, &e, &e, &e1_into_n4(1), &e1_into_n4(2), &cfg()).unwrap();
        assert_eq!(ex.twist.table(), crate::examples::r_zero().table());
        let err = extract_twisting(&n, &e, &e, &e1_into_n4(2), &e1_into_n4(1), &cfg()).unwrap_err();
        assert!(matches!(err, ProductError::ExtractionFail { kind: ExtractionFailure::Inconsistent, .. }), "{err}");
    }
}
