//! Small algebras and twists used by the registry and the tests.

use crate::linalg::{SeriesMap, Space};
use crate::nva::{from_assoc_table, Nva, MAP_WINDOW};
use crate::series::{int, Series, Var, Window};
use crate::twist::TwistOp;

fn space(name: &str, labels: &[&str]) -> Space {
    Space::with_labels(name, labels).expect("distinct labels")
}

fn unit_mult(i: usize, j: usize) -> Option<Vec<(usize, i64)>> {
    match (i, j) {
        (0, j) => Some(vec![(j, 1)]),
        (i, 0) => Some(vec![(i, 1)]),
        _ => None,
    }
}

/// `Q[e]/(e^2)`.
pub fn e1() -> Nva {
    from_assoc_table(space("E1", &["one", "e"]), "one", &|i, j| unit_mult(i, j).unwrap_or_default()).expect("E1")
}

/// Upper-triangular 2×2 matrices: `a` idempotent, `an = n`, `na = 0`.
pub fn e1n() -> Nva {
    from_assoc_table(space("E1n", &["one", "a", "n"]), "one", &|i, j| {
        unit_mult(i, j).unwrap_or_else(|| match (i, j) {
            (1, 1) => vec![(1, 1)],
            (1, 2) => vec![(2, 1)],
            _ => vec![],
        })
    })
    .expect("E1n")
}

/// `Q{1, s, t}` with all products of `s, t` zero, derivation `D s = t`,
/// and `Y(a, x)b = (e^{xD}a) b`.
pub fn e2() -> Nva {
    let w = Window::new(vec![MAP_WINDOW]).expect("window");
    let c = |e: i32| Series::monomial(&[Var::X], &w, vec![e], int(1));
    Nva::from_fn(space("E2", &["one", "s", "t"]), "one", |i, j| match (i, j) {
        (0, j) => vec![(j, c(0))],
        (1, 0) => vec![(1, c(0)), (2, c(1))],
        (2, 0) => vec![(2, c(0))],
        _ => vec![],
    })
    .expect("E2")
}

/// The group algebra of `Z/2`, `g` odd for sign bookkeeping.
pub fn z2() -> Nva {
    from_assoc_table(space("Z2", &["one", "g"]), "one", &|i, j| unit_mult(i, j).unwrap_or_else(|| vec![(0, 1)])).expect("Z2")
}

/// The one-dimensional algebra `Q`.
pub fn q1() -> Nva {
    from_assoc_table(space("Q", &["one"]), "one", &|_, _| vec![(0, 1)]).expect("Q")
}

/// `Q{1, p, q, pq}` with `p^2 = q^2 = qp = 0`: contains two copies of `E1`
/// whose product in the order `q, p` vanishes.
pub fn n4() -> Nva {
    from_assoc_table(space("N4", &["one", "p", "q", "pq"]), "one", &|i, j| {
        unit_mult(i, j).unwrap_or_else(|| match (i, j) {
            (1, 2) => vec![(3, 1)],
            _ => vec![],
        })
    })
    .expect("N4")
}

/// Constant twist given by a closure on basis pairs `(v, u) -> c`,
/// `R(v ⊗ u) = c · u ⊗ v`.
pub fn diagonal_twist(name: &str, u: &Nva, v: &Nva, c: impl Fn(usize, usize) -> i64) -> TwistOp {
    let mut t = SeriesMap::zero(&[v.space().clone(), u.space().clone()], &[u.space().clone(), v.space().clone()], MAP_WINDOW);
    for i in 0..v.dim() {
        for j in 0..u.dim() {
            t.set_entry(vec![i, j], vec![j, i], Series::laurent(MAP_WINDOW, &[(0, c(i, j))]));
        }
    }
    TwistOp::new(name, u.clone(), v.clone(), t).expect("shape")
}

/// `R(g ⊗ g) = -g ⊗ g` on `(Z2, Z2)`, flip elsewhere.
pub fn r_sign() -> TwistOp {
    let z = z2();
    diagonal_twist("R_sign", &z, &z, |i, j| if i == 1 && j == 1 { -1 } else { 1 })
}

/// `R(e ⊗ e) = 0` on `(E1, E1)`, flip elsewhere; not invertible.
pub fn r_zero() -> TwistOp {
    let e = e1();
    diagonal_twist("R_zero", &e, &e, |i, j| if i == 1 && j == 1 { 0 } else { 1 })
}
