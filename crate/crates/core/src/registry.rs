//! Built-in examples addressable by name from the command line.

use crate::examples::{e1, e1n, e2, n4, q1, r_sign, r_zero, z2};
use crate::format::Workbench;
use crate::linalg::SeriesMap;
use crate::nva::{Nva, MAP_WINDOW};
use crate::quantum::{diagonal_smap, SMap};
use crate::series::Series;
use crate::smash::{regular_coaction, sign_action, trivial_action, trivial_coaction, z2_bialgebra};
use crate::twist::TwistOp;

pub const ALGEBRAS: &[(&str, &str)] = &[
    ("E1", "Q[e]/(e^2), associative"),
    ("E1n", "upper-triangular 2x2 matrices, noncommutative, dim 3"),
    ("E2", "Q{1,s,t} with derivation D s = t, Y(s,x)1 = s + x t"),
    ("Z2", "group algebra of Z/2"),
    ("Q", "the ground field"),
    ("N4", "Q{1,p,q,pq} with qp = 0; maps p, q embed E1"),
];

pub const TWISTS: &[(&str, &str)] = &[
    ("flip", "R(v⊗u) = u⊗v, on any pair"),
    ("R_sign", "(Z2, Z2): R(g⊗g) = -g⊗g"),
    ("R_zero", "(E1, E1): R(e⊗e) = 0, not invertible"),
];

pub const SMAPS: &[(&str, &str)] = &[("identity", "S(x) = 1, on any algebra"), ("sign", "S(a⊗b) = -a⊗b for non-vacuum a, b; passes on E1")];

pub const SMASH: &[(&str, &str)] = &[
    ("Z2-sign", "H = Z2 acting on Z2 by sign, Z2 coacting on itself by Δ"),
    ("Z2-trivial", "H = Z2 acting trivially on E1, coacting trivially on E1n"),
];

pub fn algebra(name: &str) -> Option<Nva> {
    Some(match name {
        "E1" => e1(),
        "E1n" => e1n(),
        "E2" => e2(),
        "Z2" => z2(),
        "Q" => q1(),
        "N4" => n4(),
        _ => return None,
    })
}

/// A registry twist; `flip` is built on `(u, v)`.
pub fn twist(name: &str, u: &Nva, v: &Nva) -> Option<TwistOp> {
    Some(match name {
        "flip" => TwistOp::flip(u, v),
        "R_sign" => r_sign(),
        "R_zero" => r_zero(),
        _ => return None,
    })
}

pub fn sign_smap(a: &Nva) -> SMap {
    let vac = a.vacuum();
    diagonal_smap("sign", a, |i, j| if i != vac && j != vac { -1 } else { 1 })
}

pub fn smap(name: &str, a: &Nva) -> Option<SMap> {
    match name {
        "identity" => Some(SMap::identity(a)),
        "sign" => Some(sign_smap(a)),
        _ => None,
    }
}

/// `E1 -> N4` sending `e` to `target`.
fn n4_map(target: usize) -> SeriesMap {
    let (e, k) = (e1(), n4());
    let mut m = SeriesMap::zero(&[e.space().clone()], &[k.space().clone()], MAP_WINDOW);
    m.set_entry(vec![0], vec![0], Series::laurent(MAP_WINDOW, &[(0, 1)]));
    m.set_entry(vec![1], vec![target], Series::laurent(MAP_WINDOW, &[(0, 1)]));
    m
}

/// A named registry entry as a workbench: the algebra with its adjoint
/// module, or a smash datum.
pub fn workbench(name: &str) -> Option<Workbench> {
    let mut wb = Workbench::default();
    if let Some(a) = algebra(name) {
        wb.modules.push(("adjoint".into(), a.adjoint()));
        if name == "N4" {
            wb.algebras.push(e1());
            wb.maps.push(("p".into(), n4_map(1)));
            wb.maps.push(("q".into(), n4_map(2)));
        }
        wb.algebras.push(a);
        return Some(wb);
    }
    let h = z2_bialgebra();
    let (m, c) = match name {
        "Z2-sign" => (sign_action(&h, &z2()), regular_coaction(&h)),
        "Z2-trivial" => (trivial_action(&h, &e1()), trivial_coaction(&h, &e1n())),
        _ => return None,
    };
    wb.algebras.push(h.algebra.clone());
    wb.algebras.push(m.algebra.clone());
    wb.algebras.push(c.algebra.clone());
    wb.algebras.dedup_by(|a, b| a.name() == b.name());
    wb.bialgebras.push(h);
    wb.actions.push(m);
    wb.coactions.push(c);
    Some(wb)
}
