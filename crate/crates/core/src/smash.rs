//! Coalgebras, vertex bialgebras, module- and comodule-algebras, the smash
//! product, and its presentation as a twisted tensor product.

use thiserror::Error;

use crate::linalg::{basis_tuples, tuple_label, vector_equal, LinalgError, SeriesMap, SeriesVector, Space};
use crate::nva::{check_module, check_nva, ModuleForm, Nva, NvaError, NvaModule, MAP_WINDOW};
use crate::product::{build_ordinary_tensor, tables_identical, twisted_unchecked, ProductError, ProductNva, Provenance};
use crate::report::{CheckConfig, CheckReport, IdentityResult, Tally};
use crate::series::{Arg, Series, Var, Window};
use crate::twist::{check_twisting_axioms, TwistError, TwistOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmashError {
    #[error("precondition `{name}` fails: {detail}")]
    Precondition { name: String, detail: String },
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Nva(#[from] NvaError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The one-dimensional target of a counit.
pub fn ground() -> Space {
    Space::with_labels("k", &["1"]).expect("one label")
}

fn one_x() -> Series {
    Series::one(&[Var::X], &Window::new(vec![MAP_WINDOW]).expect("window"))
}

/// `(C, Δ, ε)` with x-independent structure maps.
#[derive(Clone, Debug, PartialEq)]
pub struct CoalgebraData {
    pub space: Space,
    pub coproduct: SeriesMap,
    pub counit: SeriesMap,
}

impl CoalgebraData {
    /// From `Δ(b) = Σ c · b1 ⊗ b2` and `ε(b)` on basis elements.
    pub fn new(space: &Space, delta: impl Fn(usize) -> Vec<(usize, usize, i64)>, eps: impl Fn(usize) -> i64) -> CoalgebraData {
        let w = Window::new(vec![MAP_WINDOW]).expect("window");
        let c = |n: i64| Series::constant(&[Var::X], &w, crate::series::int(n));
        let mut coproduct = SeriesMap::zero(std::slice::from_ref(space), &[space.clone(), space.clone()], MAP_WINDOW);
        let mut counit = SeriesMap::zero(std::slice::from_ref(space), &[ground()], MAP_WINDOW);
        for b in 0..space.dim() {
            for (i, j, k) in delta(b) {
                let prev = coproduct.entry(&[b], &[i, j]);
                coproduct.set_entry(vec![b], vec![i, j], prev.add(&c(k)).expect("same ambient"));
            }
            if eps(b) != 0 {
                counit.set_entry(vec![b], vec![0], c(eps(b)));
            }
        }
        CoalgebraData { space: space.clone(), coproduct, counit }
    }

    /// Group-like basis: `Δ(b) = b ⊗ b`, `ε(b) = 1`.
    pub fn group_like(space: &Space) -> CoalgebraData {
        CoalgebraData::new(space, |b| vec![(b, b, 1)], |_| 1)
    }
}

/// A vertex algebra `H` with a coalgebra structure on the same space.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexBialgebra {
    pub algebra: Nva,
    pub coalgebra: CoalgebraData,
}

/// `U` with an action `Y(h,x): U -> U ⊗ Q((x))` of a bialgebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleAlgebraData {
    pub bialgebra: VertexBialgebra,
    pub algebra: Nva,
    pub action: SeriesMap,
}

/// `V` with an x-independent coaction `ρ: V -> H ⊗ V`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComoduleAlgebraData {
    pub bialgebra: VertexBialgebra,
    pub algebra: Nva,
    pub coaction: SeriesMap,
}

fn chains(
    name: &str,
    sp: &[Space],
    vars: &[Var],
    cfg: &CheckConfig,
    lhs: &dyn Fn(SeriesVector) -> Result<SeriesVector, LinalgError>,
    rhs: &dyn Fn(SeriesVector) -> Result<SeriesVector, LinalgError>,
) -> IdentityResult {
    let amb = cfg.ambient(vars);
    let win = cfg.window(vars.len());
    let mut t = Tally::new(name);
    for idx in basis_tuples(sp) {
        let b = SeriesVector::basis(sp, &idx, &amb);
        match (lhs(b.clone()), rhs(b)) {
            (Ok(l), Ok(r)) => t.record(&vector_equal(&l, &r, &win), || tuple_label(sp, &idx)),
            (Err(e), _) | (_, Err(e)) => t.fail(format!("{}: {e}", tuple_label(sp, &idx))),
        }
    }
    t.finish()
}

/// Inserts basis element `i` of `space` as a new leg at `leg`.
fn insert_leg(v: &SeriesVector, leg: usize, space: &Space, i: usize) -> SeriesVector {
    let mut spaces = v.spaces().to_vec();
    spaces.insert(leg, space.clone());
    let mut out = SeriesVector::zero(&spaces, v.ambient());
    for (idx, s) in v.entries() {
        let mut n = idx.clone();
        n.insert(leg, i);
        out.add_entry(n, s.clone());
    }
    out
}

/// `f(e_i) = e_target` for a map on one leg.
fn maps_basis(name: &str, f: &SeriesMap, i: usize, target: &[usize], cfg: &CheckConfig) -> IdentityResult {
    let amb = cfg.ambient(&[Var::X]);
    let mut t = Tally::new(name);
    match SeriesVector::basis(f.domain(), &[i], &amb).apply(f, &[0], &Arg::var(Var::X)) {
        Ok(v) => t.record(&vector_equal(&v, &SeriesVector::basis(f.codomain(), target, &amb), &cfg.window(1)), || f.domain()[0].label(i).to_string()),
        Err(e) => t.fail(e.to_string()),
    }
    t.finish()
}

/// Coassociativity and both counit laws.
pub fn check_coalgebra(c: &CoalgebraData, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("coalgebra {}", c.space.name()), &cfg.label());
    let x = Arg::var(Var::X);
    let (d, e) = (&c.coproduct, &c.counit);
    let sp = [c.space.clone()];
    let k = ground();
    report.push(chains("(1⊗Δ)Δ = (Δ⊗1)Δ", &sp, &[Var::X], cfg, &|b| b.apply(d, &[0], &x)?.apply(d, &[1], &x), &|b| {
        b.apply(d, &[0], &x)?.apply(d, &[0], &x)
    }));
    report.push(chains("(ε⊗1)Δ(b) = 1⊗b", &sp, &[Var::X], cfg, &|b| b.apply(d, &[0], &x)?.apply(e, &[0], &x), &|b| Ok(insert_leg(&b, 0, &k, 0))));
    report.push(chains("(1⊗ε)Δ(b) = b⊗1", &sp, &[Var::X], cfg, &|b| b.apply(d, &[0], &x)?.apply(e, &[1], &x), &|b| Ok(insert_leg(&b, 1, &k, 0))));
    report
}

/// `ε` and `Δ` are homomorphisms of vertex algebras.
pub fn check_vertex_bialgebra(h: &VertexBialgebra, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("vertex bialgebra {}", h.algebra.name()), &cfg.label());
    report.absorb(check_coalgebra(&h.coalgebra, cfg));
    let x = Arg::var(Var::X);
    let a = &h.algebra;
    let (d, e) = (&h.coalgebra.coproduct, &h.coalgebra.counit);
    let hh = match build_ordinary_tensor(a, a) {
        Ok(p) => p,
        Err(err) => {
            report.note(err.to_string());
            return report;
        }
    };
    let pspace = hh.space().clone();
    let k = ground();
    let h2 = [a.space().clone(), a.space().clone()];
    let vac = a.vacuum();
    report.push(maps_basis("ε(1) = 1", e, vac, &[0], cfg));
    report.push(chains("ε(Y(h,x)h') = ε(h)ε(h')", &h2, &[Var::X], cfg, &|b| b.apply(a.y(), &[0, 1], &x)?.apply(e, &[0], &x), &|b| {
        b.apply(e, &[0], &x)?.apply(e, &[1], &x)?.apply(&collapse(&k), &[0, 1], &x)
    }));
    report.push(maps_basis("Δ(1) = 1⊗1", d, vac, &[vac, vac], cfg));
    report.push(chains("Δ(Y(h,x)h') = Y(Δh,x)Δh'", &h2, &[Var::X], cfg, &|b| Ok(b.apply(a.y(), &[0, 1], &x)?.apply(d, &[0], &x)?.fuse(0, &pspace)), &|b| {
        let two = b.apply(d, &[0], &x)?.apply(d, &[2], &x)?.fuse(2, &pspace).fuse(0, &pspace);
        two.apply(hh.nva().y(), &[0, 1], &x)
    }));
    report
}

/// Multiplication of scalars `k ⊗ k -> k`.
fn collapse(k: &Space) -> SeriesMap {
    let mut m = SeriesMap::zero(&[k.clone(), k.clone()], std::slice::from_ref(k), MAP_WINDOW);
    m.set_entry(vec![0, 0], vec![0], one_x());
    m
}

/// The action of `H` on `U` as a module.
pub fn action_module(m: &ModuleAlgebraData) -> Result<NvaModule, NvaError> {
    NvaModule::new(m.bialgebra.algebra.clone(), m.algebra.space().clone(), m.action.clone())
}

pub const MODULE_ALGEBRA: &str = "Y(h,x)Y(u,z)v = Y(Y(h1,x-z)u,z)Y(h2,x)v";
pub const LNEED: &str = "Y(h,z+x)Y(h',z)v = Y(Y(h,x)h',z)v";

/// Module axioms, range and vacuum conditions, the module-algebra identity
/// and the composition identity.
pub fn check_module_algebra(m: &ModuleAlgebraData, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("module-algebra {} over {}", m.algebra.name(), m.bialgebra.algebra.name()), &cfg.label());
    match action_module(m) {
        Ok(module) => report.absorb(check_module(&module, cfg, ModuleForm::Original)),
        Err(e) => {
            let mut t = Tally::new("action is a module");
            t.fail(e.to_string());
            report.push(t.finish());
            return report;
        }
    }
    let x = Arg::var(Var::X);
    let z = Arg::var(Var::Z);
    let (hs, us) = (m.bialgebra.algebra.space().clone(), m.algebra.space().clone());
    let act = &m.action;
    let yu = m.algebra.y();
    let (d, e) = (&m.bialgebra.coalgebra.coproduct, &m.bialgebra.coalgebra.counit);

    let mut range = Tally::new("Y(h,x)v in V⊗Q((x))");
    for (col, rows) in act.columns() {
        if let Some((row, _)) = rows.iter().find(|(_, s)| !s.is_exact()) {
            range.fail(format!("{} -> {}: truncated series", tuple_label(act.domain(), col), tuple_label(act.codomain(), row)));
        }
    }
    report.push(range.finish());

    let vac = m.algebra.vacuum();
    report.push(chains(
        "Y(h,x)1 = ε(h)1",
        std::slice::from_ref(&hs),
        &[Var::X],
        cfg,
        &|b| insert_leg(&b, 1, &us, vac).apply(act, &[0, 1], &x),
        &|b| {
            let eps = b.apply(e, &[0], &x)?;
            let mut out = SeriesVector::zero(std::slice::from_ref(&us), b.ambient());
            for s in eps.entries().values() {
                out.add_entry(vec![vac], s.clone());
            }
            Ok(out)
        },
    ));
    let hu = [hs.clone(), us.clone(), us.clone()];
    report.push(chains(MODULE_ALGEBRA, &hu, &[Var::X, Var::Z], cfg, &|b| b.apply(yu, &[1, 2], &z)?.apply(act, &[0, 1], &x), &|b| {
        b.apply(d, &[0], &x)?
            .permute(&[0, 2, 1, 3])
            .apply(act, &[2, 3], &x)?
            .apply(act, &[0, 1], &Arg::diff(Var::X, Var::Z))?
            .apply(yu, &[0, 1], &z)
    }));
    let hhu = [hs.clone(), hs.clone(), us.clone()];
    report.push(chains(LNEED, &hhu, &[Var::X, Var::Z], cfg, &|b| b.apply(act, &[1, 2], &z)?.apply(act, &[0, 1], &Arg::sum(Var::Z, Var::X)), &|b| {
        b.apply(m.bialgebra.algebra.y(), &[0, 1], &x)?.apply(act, &[0, 1], &z)
    }));
    report
}

/// Comodule laws, `ρ(1) = 1⊗1`, and multiplicativity of `ρ`.
pub fn check_comodule_algebra(c: &ComoduleAlgebraData, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(&format!("comodule-algebra {} over {}", c.algebra.name(), c.bialgebra.algebra.name()), &cfg.label());
    let x = Arg::var(Var::X);
    let rho = &c.coaction;
    let h = &c.bialgebra.algebra;
    let (d, e) = (&c.bialgebra.coalgebra.coproduct, &c.bialgebra.coalgebra.counit);
    let vs = c.algebra.space().clone();
    let k = ground();
    let v1 = [vs.clone()];
    report.push(chains("(1⊗ρ)ρ = (Δ⊗1)ρ", &v1, &[Var::X], cfg, &|b| b.apply(rho, &[0], &x)?.apply(rho, &[1], &x), &|b| {
        b.apply(rho, &[0], &x)?.apply(d, &[0], &x)
    }));
    report.push(chains("(ε⊗1)ρ(v) = 1⊗v", &v1, &[Var::X], cfg, &|b| b.apply(rho, &[0], &x)?.apply(e, &[0], &x), &|b| Ok(insert_leg(&b, 0, &k, 0))));
    let vac = c.algebra.vacuum();
    report.push(maps_basis("ρ(1) = 1⊗1", rho, vac, &[h.vacuum(), vac], cfg));
    let vv = [vs.clone(), vs.clone()];
    report.push(chains(
        "ρ(Y(v,x)v') = (Y(x)⊗Y(x))σ23(ρ(v)⊗ρ(v'))",
        &vv,
        &[Var::X],
        cfg,
        &|b| b.apply(c.algebra.y(), &[0, 1], &x)?.apply(rho, &[0], &x),
        &|b| {
            b.apply(rho, &[0], &x)?
                .apply(rho, &[2], &x)?
                .permute(&[0, 2, 1, 3])
                .apply(h.y(), &[0, 1], &x)?
                .apply(c.algebra.y(), &[1, 2], &x)
        },
    ));
    report
}

fn same_bialgebra(m: &ModuleAlgebraData, c: &ComoduleAlgebraData) -> Result<(), SmashError> {
    if m.bialgebra != c.bialgebra {
        return Err(SmashError::Precondition {
            name: "same bialgebra".into(),
            detail: format!("{} and {}", m.bialgebra.algebra.name(), c.bialgebra.algebra.name()),
        });
    }
    Ok(())
}

fn require(report: CheckReport, name: &str) -> Result<CheckReport, SmashError> {
    let failure = report.failures().next().map(|f| format!("{}: {}", f.identity, f.verdict));
    match failure {
        Some(detail) => Err(SmashError::Precondition { name: name.into(), detail }),
        None => Ok(report),
    }
}

/// `R(x)(v⊗u) = Y(b1(v),-x)u ⊗ v2`.
pub fn smash_twist_table(m: &ModuleAlgebraData, c: &ComoduleAlgebraData) -> Result<SeriesMap, LinalgError> {
    let (us, vs) = (m.algebra.space().clone(), c.algebra.space().clone());
    let x = Arg::var(Var::X);
    SeriesMap::tabulate(&[vs.clone(), us.clone()], &[us, vs], MAP_WINDOW, |b| {
        b.apply(&c.coaction, &[0], &x)?.permute(&[0, 2, 1]).apply(&m.action, &[0, 1], &Arg::neg(Var::X))
    })
}

/// A smash product with the reports of its preconditions and of the
/// vertex algebra axioms.
#[derive(Clone, Debug)]
pub struct Smash {
    pub product: ProductNva,
    pub report: CheckReport,
}

/// `Y#(u⊗v,x)(u'⊗v') = Y(u,x)Y(b1(v),x)u' ⊗ Y(v2,x)v'`.
pub fn build_smash(m: &ModuleAlgebraData, c: &ComoduleAlgebraData, cfg: &CheckConfig) -> Result<Smash, SmashError> {
    same_bialgebra(m, c)?;
    let mut report = CheckReport::new(&format!("smash {} # {}", m.algebra.name(), c.algebra.name()), &cfg.label());
    report.absorb(require(check_vertex_bialgebra(&m.bialgebra, cfg), "vertex bialgebra")?);
    report.absorb(require(check_module_algebra(m, cfg), "module-algebra")?);
    report.absorb(require(check_comodule_algebra(c, cfg), "comodule-algebra")?);
    let (u, v) = (&m.algebra, &c.algebra);
    let p = Space::product(&format!("{}#{}", u.name(), v.name()), u.space(), v.space());
    let four = [u.space().clone(), v.space().clone(), u.space().clone(), v.space().clone()];
    let x = Arg::var(Var::X);
    let y = SeriesMap::tabulate(&[p.clone(), p.clone()], std::slice::from_ref(&p), MAP_WINDOW, |b| {
        let legs = b.split(1, u.space(), v.space()).split(0, u.space(), v.space());
        debug_assert_eq!(legs.spaces(), &four);
        let out = legs
            .apply(&c.coaction, &[1], &x)?
            .permute(&[0, 2, 1, 3, 4])
            .apply(&m.action, &[2, 3], &x)?
            .permute(&[0, 2, 1, 3])
            .apply(u.y(), &[0, 1], &x)?
            .apply(v.y(), &[1, 2], &x)?;
        Ok(out.fuse(0, &p))
    })?;
    let vacuum = format!("{}.{}", u.space().label(u.vacuum()), v.space().label(v.vacuum()));
    let nva = Nva::new(p, &vacuum, y)?;
    let twist = TwistOp::new(&format!("R_{}", m.bialgebra.algebra.name()), u.clone(), v.clone(), smash_twist_table(m, c)?)?;
    let product = ProductNva::from_parts(nva, u, v, Provenance::Smash(twist));
    report.absorb(check_nva(product.nva(), cfg));
    Ok(Smash { product, report })
}

/// The canonical twist of a smash product, checked against the twist axioms
/// and against the smash product table.
pub fn smash_as_twist(m: &ModuleAlgebraData, c: &ComoduleAlgebraData, cfg: &CheckConfig) -> Result<(TwistOp, CheckReport), SmashError> {
    let smash = build_smash(m, c, cfg)?;
    let twist = smash.product.twist();
    let mut report = CheckReport::new(&format!("smash as twist {}", twist.name()), &cfg.label());
    report.absorb(check_twisting_axioms(&twist, cfg));
    let twisted = twisted_unchecked(smash.product.space().name(), &m.algebra, &c.algebra, &twist, Provenance::Twisted(twist.clone()))?;
    report.push(tables_identical(smash.product.nva().y(), twisted.nva().y(), "U#V = U⊗_R V"));
    Ok((twist, report))
}

/// `Y(h,x)u = ε(h)u`.
pub fn trivial_action(h: &VertexBialgebra, u: &Nva) -> ModuleAlgebraData {
    let mut act = SeriesMap::zero(&[h.algebra.space().clone(), u.space().clone()], &[u.space().clone()], MAP_WINDOW);
    for (col, rows) in h.coalgebra.counit.columns() {
        if let Some(s) = rows.get(&vec![0]) {
            for i in 0..u.dim() {
                act.set_entry(vec![col[0], i], vec![i], s.clone());
            }
        }
    }
    ModuleAlgebraData { bialgebra: h.clone(), algebra: u.clone(), action: act }
}

/// `ρ(v) = 1 ⊗ v`.
pub fn trivial_coaction(h: &VertexBialgebra, v: &Nva) -> ComoduleAlgebraData {
    let mut rho = SeriesMap::zero(&[v.space().clone()], &[h.algebra.space().clone(), v.space().clone()], MAP_WINDOW);
    for i in 0..v.dim() {
        rho.set_entry(vec![i], vec![h.algebra.vacuum(), i], one_x());
    }
    ComoduleAlgebraData { bialgebra: h.clone(), algebra: v.clone(), coaction: rho }
}

/// `H` as a comodule-algebra over itself with `ρ = Δ`.
pub fn regular_coaction(h: &VertexBialgebra) -> ComoduleAlgebraData {
    ComoduleAlgebraData { bialgebra: h.clone(), algebra: h.algebra.clone(), coaction: h.coalgebra.coproduct.clone() }
}

/// Group algebra of `Z/2` with group-like coproduct.
pub fn z2_bialgebra() -> VertexBialgebra {
    let h = crate::examples::z2();
    VertexBialgebra { coalgebra: CoalgebraData::group_like(h.space()), algebra: h }
}

/// `Y(g,x)u = (-1)^{|u|}u`, with the vacuum even and every other basis
/// element odd.
pub fn sign_action(h: &VertexBialgebra, u: &Nva) -> ModuleAlgebraData {
    let mut act = SeriesMap::zero(&[h.algebra.space().clone(), u.space().clone()], &[u.space().clone()], MAP_WINDOW);
    for i in 0..u.dim() {
        act.set_entry(vec![0, i], vec![i], one_x());
        let sign = if i == u.vacuum() { 1 } else { -1 };
        act.set_entry(vec![1, i], vec![i], Series::laurent(MAP_WINDOW, &[(0, sign)]));
    }
    ModuleAlgebraData { bialgebra: h.clone(), algebra: u.clone(), action: act }
}
