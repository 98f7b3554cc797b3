//! Named finite-dimensional spaces, series-valued vectors and maps on their
//! tensor powers, and an exact sparse linear solver over the rationals.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::series::{Arg, CertifiedEquality, Scalar, Series, SeriesError, Var, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("space `{0}` must have at least one basis vector")]
    EmptySpace(String),
    #[error("duplicate basis label `{label}` in space `{space}`")]
    DuplicateLabel { space: String, label: String },
    #[error("unknown basis label `{label}` in space `{space}`")]
    UnknownLabel { space: String, label: String },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("space mismatch: expected `{expected}`, found `{found}`")]
    SpaceMismatch { expected: String, found: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug)]
struct SpaceInner {
    name: String,
    basis: Vec<String>,
    index: HashMap<String, usize>,
}

/// A vector space with a named, ordered basis. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Space(Arc<SpaceInner>);

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.name == other.0.name && self.0.basis == other.0.basis)
    }
}

impl Eq for Space {}

impl Space {
    pub fn new<S: Into<String>>(name: S, basis: Vec<String>) -> Result<Space, LinalgError> {
        let name = name.into();
        if basis.is_empty() {
            return Err(LinalgError::EmptySpace(name));
        }
        let mut index = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.clone(), i).is_some() {
                return Err(LinalgError::DuplicateLabel { space: name, label: b.clone() });
            }
        }
        Ok(Space(Arc::new(SpaceInner { name, basis, index })))
    }

    /// Convenience constructor for static label lists.
    pub fn with_labels(name: &str, labels: &[&str]) -> Result<Space, LinalgError> {
        Space::new(name, labels.iter().map(|s| s.to_string()).collect())
    }

    /// The tensor product `a ⊗ b` with labels `x.y`, ordered `a`-major.
    pub fn product(name: &str, a: &Space, b: &Space) -> Space {
        let basis = a.basis().iter().flat_map(|x| b.basis().iter().map(move |y| format!("{x}.{y}"))).collect();
        Space::new(name, basis).expect("product labels are unique")
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn basis(&self) -> &[String] {
        &self.0.basis
    }

    pub fn dim(&self) -> usize {
        self.0.basis.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.basis[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, LinalgError> {
        self.0
            .index
            .get(label)
            .copied()
            .ok_or_else(|| LinalgError::UnknownLabel { space: self.name().into(), label: label.into() })
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// All basis index tuples of `spaces`, in lexicographic order.
pub fn basis_tuples(spaces: &[Space]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for s in spaces {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..s.dim()).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn tuple_label(spaces: &[Space], idx: &[usize]) -> String {
    let parts: Vec<&str> = spaces.iter().zip(idx).map(|(s, &i)| s.label(i)).collect();
    format!("({})", parts.join(","))
}

/// Variables and truncation window shared by every coefficient of a vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambient {
    pub vars: Vec<Var>,
    pub window: Window,
}

impl Ambient {
    pub fn new(vars: &[Var], window: Window) -> Ambient {
        assert_eq!(vars.len(), window.nvars());
        Ambient { vars: vars.to_vec(), window }
    }

    /// Same range `lo..=hi` for every variable.
    pub fn uniform(vars: &[Var], lo: i32, hi: i32) -> Ambient {
        Ambient::new(vars, Window::uniform(vars.len(), lo, hi))
    }

    pub fn one(&self) -> Series {
        Series::one(&self.vars, &self.window)
    }

    pub fn zero(&self) -> Series {
        Series::zero(&self.vars, &self.window)
    }

    pub fn var_index(&self, v: Var) -> usize {
        self.vars.iter().position(|&w| w == v).expect("variable in ambient")
    }

    /// `arg^k` for `k >= 0`, e.g. `(x1 - x2)^k`.
    pub fn power(&self, arg: &Arg, k: u32) -> Result<Series, SeriesError> {
        crate::series::expand_power(k as i32, arg, &self.vars, &self.window)
    }
}

/// Outcome of comparing two series-valued vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VecEquality {
    ExactlyEqual,
    EqualUpToWindow,
    Unequal { index: Vec<usize>, exponent: Vec<i32> },
}

impl VecEquality {
    pub fn is_equal(&self) -> bool {
        !matches!(self, VecEquality::Unequal { .. })
    }
}

/// An element of `(S1 ⊗ ... ⊗ Sn) ⊗ Q((vars))`, truncated.
#[derive(Clone, Debug)]
pub struct SeriesVector {
    spaces: Vec<Space>,
    ambient: Ambient,
    entries: BTreeMap<Vec<usize>, Series>,
    exact: bool,
}

impl SeriesVector {
    pub fn zero(spaces: &[Space], ambient: &Ambient) -> Self {
        SeriesVector { spaces: spaces.to_vec(), ambient: ambient.clone(), entries: BTreeMap::new(), exact: true }
    }

    /// A basis tensor `e_{i1} ⊗ ... ⊗ e_{in}` with coefficient 1.
    pub fn basis(spaces: &[Space], idx: &[usize], ambient: &Ambient) -> Self {
        let mut v = Self::zero(spaces, ambient);
        v.add_entry(idx.to_vec(), ambient.one());
        v
    }

    pub fn spaces(&self) -> &[Space] {
        &self.spaces
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn arity(&self) -> usize {
        self.spaces.len()
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, Series> {
        &self.entries
    }

    pub fn entry(&self, idx: &[usize]) -> Series {
        self.entries.get(idx).cloned().unwrap_or_else(|| self.ambient.zero())
    }

    pub fn is_exact(&self) -> bool {
        self.exact && self.entries.values().all(Series::is_exact)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mark_inexact(&mut self) {
        self.exact = false;
    }

    pub fn add_entry(&mut self, idx: Vec<usize>, s: Series) {
        debug_assert_eq!(idx.len(), self.spaces.len());
        if !s.is_exact() {
            self.exact = false;
        }
        if s.is_zero() {
            return;
        }
        let merged = match self.entries.remove(&idx) {
            Some(prev) => prev.add(&s).expect("entries share the ambient"),
            None => s,
        };
        if !merged.is_exact() {
            self.exact = false;
        }
        if !merged.is_zero() {
            self.entries.insert(idx, merged);
        }
    }

    pub fn add(&self, other: &SeriesVector) -> Result<SeriesVector, LinalgError> {
        self.check_spaces(&other.spaces)?;
        let mut out = self.clone();
        out.exact &= other.exact;
        for (k, s) in &other.entries {
            out.add_entry(k.clone(), s.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SeriesVector) -> Result<SeriesVector, LinalgError> {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> SeriesVector {
        let mut out = SeriesVector::zero(&self.spaces, &self.ambient);
        out.exact = self.exact;
        for (k, s) in &self.entries {
            out.add_entry(k.clone(), s.scale(c));
        }
        out
    }

    /// Multiplies every coefficient by a scalar series in the same ambient.
    pub fn mul_series(&self, f: &Series) -> Result<SeriesVector, LinalgError> {
        let mut out = SeriesVector::zero(&self.spaces, &self.ambient);
        out.exact = self.exact && f.is_exact();
        for (k, s) in &self.entries {
            out.add_entry(k.clone(), s.mul(f)?);
        }
        Ok(out)
    }

    fn check_spaces(&self, spaces: &[Space]) -> Result<(), LinalgError> {
        if self.spaces.len() != spaces.len() {
            return Err(LinalgError::Arity(format!("{} legs vs {} legs", self.spaces.len(), spaces.len())));
        }
        for (a, b) in self.spaces.iter().zip(spaces) {
            if a != b {
                return Err(LinalgError::SpaceMismatch { expected: a.name().into(), found: b.name().into() });
            }
        }
        Ok(())
    }

    /// Applies `map` to the tensor legs `legs` with its variable replaced by `arg`.
    ///
    /// Maps that preserve arity write their output back into the same legs
    /// (so `S^{13}` is fine); arity-changing maps need contiguous legs and
    /// put their output where the first leg was.
    pub fn apply(&self, map: &SeriesMap, legs: &[usize], arg: &Arg) -> Result<SeriesVector, LinalgError> {
        if legs.len() != map.domain.len() {
            return Err(LinalgError::Arity(format!("map takes {} legs, got {}", map.domain.len(), legs.len())));
        }
        if legs.windows(2).any(|w| w[0] >= w[1]) || legs.iter().any(|&l| l >= self.arity()) {
            return Err(LinalgError::Arity(format!("legs {legs:?} invalid for arity {}", self.arity())));
        }
        for (&l, s) in legs.iter().zip(&map.domain) {
            if &self.spaces[l] != s {
                return Err(LinalgError::SpaceMismatch { expected: s.name().into(), found: self.spaces[l].name().into() });
            }
        }
        let same_arity = map.domain.len() == map.codomain.len();
        let first = legs.first().copied().unwrap_or(0);
        if !same_arity && legs.iter().enumerate().any(|(i, &l)| l != first + i) {
            return Err(LinalgError::Arity("arity-changing maps need contiguous legs".into()));
        }
        let spaces: Vec<Space> = if same_arity {
            let mut s = self.spaces.clone();
            for (&l, c) in legs.iter().zip(&map.codomain) {
                s[l] = c.clone();
            }
            s
        } else {
            let mut s = self.spaces[..first].to_vec();
            s.extend(map.codomain.iter().cloned());
            s.extend(self.spaces[first + legs.len()..].iter().cloned());
            s
        };
        let mut out = SeriesVector::zero(&spaces, &self.ambient);
        out.exact = self.exact;
        let mut cache: HashMap<Vec<usize>, Vec<(Vec<usize>, Series)>> = HashMap::new();
        for (idx, coef) in &self.entries {
            let key: Vec<usize> = legs.iter().map(|&l| idx[l]).collect();
            if !cache.contains_key(&key) {
                let mut col = Vec::new();
                if let Some(c) = map.columns.get(&key) {
                    for (row, s) in c {
                        let sub = if s.is_constant() && s.is_exact() {
                            Series::constant(&self.ambient.vars, &self.ambient.window, s.coeff(&[0]))
                        } else {
                            s.substitute(std::slice::from_ref(arg), &self.ambient.vars, &self.ambient.window)?
                        };
                        col.push((row.clone(), sub));
                    }
                }
                cache.insert(key.clone(), col);
            }
            for (row, s) in &cache[&key] {
                let new_idx: Vec<usize> = if same_arity {
                    let mut n = idx.clone();
                    for (&l, &r) in legs.iter().zip(row) {
                        n[l] = r;
                    }
                    n
                } else {
                    let mut n = idx[..first].to_vec();
                    n.extend_from_slice(row);
                    n.extend_from_slice(&idx[first + legs.len()..]);
                    n
                };
                let prod = if s.is_constant() && s.is_exact() {
                    coef.scale(&s.coeff(&vec![0; s.vars().len()]))
                } else {
                    coef.mul(s)?
                };
                out.add_entry(new_idx, prod);
            }
        }
        Ok(out)
    }

    /// Reorders legs: new leg `i` is old leg `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> SeriesVector {
        assert_eq!(perm.len(), self.arity());
        let spaces: Vec<Space> = perm.iter().map(|&p| self.spaces[p].clone()).collect();
        let mut out = SeriesVector::zero(&spaces, &self.ambient);
        out.exact = self.exact;
        for (idx, s) in &self.entries {
            out.add_entry(perm.iter().map(|&p| idx[p]).collect(), s.clone());
        }
        out
    }

    /// Merges legs `leg` and `leg + 1` (spaces `a`, `b`) into `product`,
    /// which must be `Space::product`-ordered.
    pub fn fuse(&self, leg: usize, product: &Space) -> SeriesVector {
        let db = self.spaces[leg + 1].dim();
        let mut spaces = self.spaces[..leg].to_vec();
        spaces.push(product.clone());
        spaces.extend(self.spaces[leg + 2..].iter().cloned());
        let mut out = SeriesVector::zero(&spaces, &self.ambient);
        out.exact = self.exact;
        for (idx, s) in &self.entries {
            let mut n = idx[..leg].to_vec();
            n.push(idx[leg] * db + idx[leg + 1]);
            n.extend_from_slice(&idx[leg + 2..]);
            out.add_entry(n, s.clone());
        }
        out
    }

    /// Inverse of [`SeriesVector::fuse`].
    pub fn split(&self, leg: usize, a: &Space, b: &Space) -> SeriesVector {
        let mut spaces = self.spaces[..leg].to_vec();
        spaces.push(a.clone());
        spaces.push(b.clone());
        spaces.extend(self.spaces[leg + 1..].iter().cloned());
        let mut out = SeriesVector::zero(&spaces, &self.ambient);
        out.exact = self.exact;
        for (idx, s) in &self.entries {
            let mut n = idx[..leg].to_vec();
            n.push(idx[leg] / b.dim());
            n.push(idx[leg] % b.dim());
            n.extend_from_slice(&idx[leg + 1..]);
            out.add_entry(n, s.clone());
        }
        out
    }

    /// Coefficient of `var^e`, as a vector in the remaining variables.
    pub fn coeff_in(&self, var: Var, e: i32) -> SeriesVector {
        let i = self.ambient.var_index(var);
        let mut vars = self.ambient.vars.clone();
        vars.remove(i);
        let mut ranges = self.ambient.window.ranges().to_vec();
        ranges.remove(i);
        let ambient = Ambient::new(&vars, Window::new(ranges).expect("sub-window"));
        let mut out = SeriesVector::zero(&self.spaces, &ambient);
        out.exact = self.exact;
        for (idx, s) in &self.entries {
            out.add_entry(idx.clone(), s.coeff_in(i, e));
        }
        out
    }

    pub fn derivative(&self, var: Var) -> SeriesVector {
        let i = self.ambient.var_index(var);
        let mut out = SeriesVector::zero(&self.spaces, &self.ambient);
        out.exact = self.exact;
        for (idx, s) in &self.entries {
            out.add_entry(idx.clone(), s.derivative(i));
        }
        out
    }

    /// Re-expresses every coefficient by substituting one argument per ambient variable.
    pub fn substitute(&self, args: &[Arg], target: &Ambient) -> Result<SeriesVector, LinalgError> {
        let mut out = SeriesVector::zero(&self.spaces, target);
        out.exact = self.exact;
        for (idx, s) in &self.entries {
            out.add_entry(idx.clone(), s.substitute(args, &target.vars, &target.window)?);
        }
        Ok(out)
    }

    /// True when every coefficient has only nonnegative exponents.
    pub fn has_no_poles(&self) -> bool {
        self.entries.values().all(Series::has_no_poles)
    }

    pub fn label(&self, idx: &[usize]) -> String {
        tuple_label(&self.spaces, idx)
    }
}

/// Compares two vectors entry by entry. Exact vectors compare on full support,
/// otherwise only inside `window`.
pub fn vector_equal(a: &SeriesVector, b: &SeriesVector, window: &Window) -> VecEquality {
    let exact = a.is_exact() && b.is_exact();
    let mut keys: Vec<&Vec<usize>> = a.entries.keys().chain(b.entries.keys()).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        let mut sa = a.entry(k);
        let mut sb = b.entry(k);
        if !exact {
            sa.mark_inexact();
            sb.mark_inexact();
        }
        if let CertifiedEquality::Unequal(e) = crate::series::window_equal(&sa, &sb, window) {
            return VecEquality::Unequal { index: k.clone(), exponent: e };
        }
    }
    if exact {
        VecEquality::ExactlyEqual
    } else {
        VecEquality::EqualUpToWindow
    }
}

/// A linear map `dom_1 ⊗ ... ⊗ dom_m -> cod_1 ⊗ ... ⊗ cod_n ⊗ Q((x))`
/// stored column by column. Missing columns and entries are zero.
#[derive(Clone, Debug)]
pub struct SeriesMap {
    domain: Vec<Space>,
    codomain: Vec<Space>,
    window: Window,
    columns: BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, Series>>,
}

impl PartialEq for SeriesMap {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.codomain == other.codomain && self.columns == other.columns
    }
}

impl SeriesMap {
    pub fn zero(domain: &[Space], codomain: &[Space], window: (i32, i32)) -> Self {
        SeriesMap {
            domain: domain.to_vec(),
            codomain: codomain.to_vec(),
            window: Window::new(vec![window]).expect("valid window"),
            columns: BTreeMap::new(),
        }
    }

    pub fn identity(spaces: &[Space], window: (i32, i32)) -> Self {
        let mut m = Self::zero(spaces, spaces, window);
        for t in basis_tuples(spaces) {
            m.set_entry(t.clone(), t, Scalar::one().into_series(window));
        }
        m
    }

    /// The flip `a ⊗ b -> b ⊗ a`.
    pub fn flip(a: &Space, b: &Space, window: (i32, i32)) -> Self {
        let mut m = Self::zero(&[a.clone(), b.clone()], &[b.clone(), a.clone()], window);
        for i in 0..a.dim() {
            for j in 0..b.dim() {
                m.set_entry(vec![i, j], vec![j, i], Scalar::one().into_series(window));
            }
        }
        m
    }

    pub fn domain(&self) -> &[Space] {
        &self.domain
    }

    pub fn codomain(&self) -> &[Space] {
        &self.codomain
    }

    pub fn window(&self) -> (i32, i32) {
        self.window.range(0)
    }

    pub fn ambient(&self) -> Ambient {
        Ambient::new(&[Var::X], self.window.clone())
    }

    pub fn columns(&self) -> &BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, Series>> {
        &self.columns
    }

    pub fn entry(&self, col: &[usize], row: &[usize]) -> Series {
        self.columns
            .get(col)
            .and_then(|c| c.get(row))
            .cloned()
            .unwrap_or_else(|| Series::zero(&[Var::X], &self.window))
    }

    /// Overwrites one entry; the series must be in the variable `x`.
    pub fn set_entry(&mut self, col: Vec<usize>, row: Vec<usize>, s: Series) {
        assert_eq!(s.vars(), &[Var::X], "map entries are series in x");
        let s = s.with_window(&self.window);
        let c = self.columns.entry(col.clone()).or_default();
        if s.is_zero() {
            c.remove(&row);
            if c.is_empty() {
                self.columns.remove(&col);
            }
        } else {
            c.insert(row, s);
        }
    }

    /// Replaces a column by a vector in the single variable `x`.
    pub fn set_column(&mut self, col: Vec<usize>, v: &SeriesVector) {
        self.columns.remove(&col);
        for (row, s) in v.entries() {
            let mut s = s.with_window(&self.window);
            if !v.is_exact() {
                s.mark_inexact();
            }
            self.set_entry(col.clone(), row.clone(), s);
        }
    }

    /// The image of a basis tuple, as a vector over `x`.
    pub fn column(&self, col: &[usize]) -> SeriesVector {
        let ambient = self.ambient();
        let mut v = SeriesVector::zero(&self.codomain, &ambient);
        if let Some(c) = self.columns.get(col) {
            for (row, s) in c {
                v.add_entry(row.clone(), s.clone());
            }
        }
        v
    }

    pub fn is_exact(&self) -> bool {
        self.columns.values().flat_map(|c| c.values()).all(Series::is_exact)
    }

    /// True when no entry depends on `x`.
    pub fn is_constant(&self) -> bool {
        self.columns.values().flat_map(|c| c.values()).all(Series::is_constant)
    }

    /// True when no entry carries a negative power of `x`.
    pub fn has_no_poles(&self) -> bool {
        self.columns.values().flat_map(|c| c.values()).all(Series::has_no_poles)
    }

    /// Largest pole order over all entries (0 when there are none).
    pub fn pole_order(&self) -> u32 {
        self.columns
            .values()
            .flat_map(|c| c.values())
            .filter_map(|s| s.min_exponent(0))
            .map(|e| (-e).max(0) as u32)
            .max()
            .unwrap_or(0)
    }

    /// Applies the map to a vector living on exactly its domain, at variable `arg`.
    pub fn apply_to(&self, v: &SeriesVector, arg: &Arg) -> Result<SeriesVector, LinalgError> {
        let legs: Vec<usize> = (0..self.domain.len()).collect();
        v.apply(self, &legs, arg)
    }

    /// Tabulates an operator given as a function on basis vectors over `x`.
    pub fn tabulate<F>(domain: &[Space], codomain: &[Space], window: (i32, i32), mut f: F) -> Result<SeriesMap, LinalgError>
    where
        F: FnMut(&SeriesVector) -> Result<SeriesVector, LinalgError>,
    {
        let mut m = SeriesMap::zero(domain, codomain, window);
        let ambient = m.ambient();
        for t in basis_tuples(domain) {
            let out = f(&SeriesVector::basis(domain, &t, &ambient))?;
            if out.spaces() != codomain {
                return Err(LinalgError::Arity("tabulated operator lands in the wrong spaces".into()));
            }
            m.set_column(t, &out);
        }
        Ok(m)
    }

    /// Precomposes the variable with `arg` (a single `±x`).
    pub fn reparametrize(&self, arg: &Arg) -> Result<SeriesMap, LinalgError> {
        let mut m = SeriesMap::zero(&self.domain, &self.codomain, self.window());
        for (col, c) in &self.columns {
            for (row, s) in c {
                m.set_entry(col.clone(), row.clone(), s.substitute(std::slice::from_ref(arg), &[Var::X], &self.window)?);
            }
        }
        Ok(m)
    }

    /// Termwise `d/dx`.
    pub fn derivative(&self) -> SeriesMap {
        let mut m = SeriesMap::zero(&self.domain, &self.codomain, self.window());
        for (col, c) in &self.columns {
            for (row, s) in c {
                m.set_entry(col.clone(), row.clone(), s.derivative(0));
            }
        }
        m
    }

    pub fn add(&self, other: &SeriesMap) -> Result<SeriesMap, LinalgError> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(LinalgError::Arity("adding maps between different spaces".into()));
        }
        let w = self.window.intersect(&other.window).map_err(LinalgError::from)?;
        let mut m = SeriesMap::zero(&self.domain, &self.codomain, w.range(0));
        for t in basis_tuples(&self.domain) {
            let v = self.column(&t).add(&other.column(&t))?;
            m.set_column(t, &v);
        }
        Ok(m)
    }

    pub fn scale(&self, c: &Scalar) -> SeriesMap {
        let mut m = SeriesMap::zero(&self.domain, &self.codomain, self.window());
        for (col, cc) in &self.columns {
            for (row, s) in cc {
                m.set_entry(col.clone(), row.clone(), s.scale(c));
            }
        }
        m
    }

    /// Human-readable row list, one line per nonzero column.
    pub fn describe(&self) -> String {
        let mut lines = Vec::new();
        for (col, c) in &self.columns {
            let items: Vec<String> =
                c.iter().map(|(row, s)| format!("{}:{}", tuple_label(&self.codomain, row), s)).collect();
            lines.push(format!("{} -> {}", tuple_label(&self.domain, col), items.join(" ; ")));
        }
        lines.join("\n")
    }
}

trait IntoSeries {
    fn into_series(self, window: (i32, i32)) -> Series;
}

impl IntoSeries for Scalar {
    fn into_series(self, window: (i32, i32)) -> Series {
        Series::constant(&[Var::X], &Window::new(vec![window]).expect("valid window"), self)
    }
}

/// `f ∘ g`.
pub fn compose(f: &SeriesMap, g: &SeriesMap) -> Result<SeriesMap, LinalgError> {
    if f.domain() != g.codomain() {
        return Err(LinalgError::Arity("compose: codomain of the inner map differs from the domain of the outer".into()));
    }
    let w = f.window.intersect(&g.window)?;
    let x = Arg::var(Var::X);
    SeriesMap::tabulate(g.domain(), f.codomain(), w.range(0), |v| f.apply_to(&g.apply_to(v, &x)?, &x))
}

/// `f ⊗ g`, acting on the concatenated legs.
pub fn tensor(f: &SeriesMap, g: &SeriesMap) -> Result<SeriesMap, LinalgError> {
    let w = f.window.intersect(&g.window)?;
    let x = Arg::var(Var::X);
    let dom: Vec<Space> = f.domain().iter().chain(g.domain()).cloned().collect();
    let cod: Vec<Space> = f.codomain().iter().chain(g.codomain()).cloned().collect();
    let df = f.domain().len();
    let cf = f.codomain().len();
    let dg = g.domain().len();
    SeriesMap::tabulate(&dom, &cod, w.range(0), |v| {
        let first: Vec<usize> = (0..df).collect();
        let v = v.apply(f, &first, &x)?;
        let second: Vec<usize> = (cf..cf + dg).collect();
        v.apply(g, &second, &x)
    })
}

/// Embeds `m` to act on `legs` of `ambient`, identity elsewhere.
pub fn leg_embed(m: &SeriesMap, legs: &[usize], ambient: &[Space]) -> Result<SeriesMap, LinalgError> {
    if legs.len() != m.domain().len() {
        return Err(LinalgError::Arity(format!("{} legs for a map of arity {}", legs.len(), m.domain().len())));
    }
    let x = Arg::var(Var::X);
    let probe = SeriesVector::zero(ambient, &m.ambient()).apply(m, legs, &x)?;
    SeriesMap::tabulate(ambient, probe.spaces(), m.window(), |v| v.apply(m, legs, &x))
}

/// Rank of a dense square matrix and, when full rank, its inverse.
pub fn dense_inverse(m: &[Vec<Scalar>]) -> (usize, Option<Vec<Vec<Scalar>>>) {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..n).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, p);
        let inv = Scalar::one() / a[rank][col].clone();
        for v in a[rank].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..2 * n {
                    let t = &f * &a[rank][j];
                    a[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    if rank < n {
        return (rank, None);
    }
    (rank, Some(a.into_iter().map(|r| r[n..].to_vec()).collect()))
}

/// Rank of a set of sparse rational vectors, by exact incremental elimination.
pub fn sparse_rank(vectors: &[BTreeMap<usize, Scalar>]) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Scalar>> = BTreeMap::new();
    for v in vectors {
        let mut row: BTreeMap<usize, Scalar> = v.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k, c.clone())).collect();
        let mut cursor = 0usize;
        loop {
            let next = row.range(cursor..).map(|(&c, _)| c).find(|c| pivots.contains_key(c));
            let Some(c) = next else { break };
            let factor = row[&c].clone();
            for (j, pv) in &pivots[&c] {
                let x = row.entry(*j).or_insert_with(Scalar::zero);
                *x -= &factor * pv;
                if x.is_zero() {
                    row.remove(j);
                }
            }
            cursor = c + 1;
        }
        if let Some((&c, lead)) = row.iter().next() {
            let inv = Scalar::one() / lead.clone();
            for v in row.values_mut() {
                *v *= &inv;
            }
            pivots.insert(c, row);
        }
    }
    pivots.len()
}

/// An affine expression `constant + Σ unknown_j * terms_j` with vector coefficients.
#[derive(Clone, Debug)]
pub struct LinExpr {
    pub constant: SeriesVector,
    pub terms: Vec<(usize, SeriesVector)>,
}

impl LinExpr {
    pub fn constant(v: SeriesVector) -> Self {
        LinExpr { constant: v, terms: Vec::new() }
    }
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Unique(Vec<Scalar>),
    /// `particular` is one solution (free unknowns set to zero).
    Underdetermined { rank: usize, unknowns: usize, particular: Vec<Scalar>, free: Vec<usize> },
    Inconsistent { witness: String },
}

/// Solves `lhs_i = rhs_i` for `unknowns` rational unknowns.
///
/// Every (basis tuple, exponent tuple) inside `window` becomes one scalar
/// equation. Elimination is exact and sparse.
pub fn solve_linear(equations: &[(LinExpr, LinExpr)], unknowns: usize, window: &Window) -> Solution {
    type Row = BTreeMap<usize, Scalar>;
    let mut rows: BTreeMap<(Vec<usize>, Vec<i32>, usize), (Row, Scalar)> = BTreeMap::new();
    for (eq_no, (lhs, rhs)) in equations.iter().enumerate() {
        // unknown side minus constant side: Σ a_j u_j = rhs.c - lhs.c
        let mut put = |v: &SeriesVector, col: Option<usize>, sign: i32| {
            for (idx, s) in v.entries() {
                for (e, c) in s.terms() {
                    if !window.contains(e) {
                        continue;
                    }
                    let r = rows.entry((idx.clone(), e.clone(), eq_no)).or_insert_with(|| (Row::new(), Scalar::zero()));
                    let c = if sign > 0 { c.clone() } else { -c.clone() };
                    match col {
                        Some(j) => {
                            let x = r.0.entry(j).or_insert_with(Scalar::zero);
                            *x += c;
                        }
                        None => r.1 += c,
                    }
                }
            }
        };
        for (j, v) in &lhs.terms {
            put(v, Some(*j), 1);
        }
        for (j, v) in &rhs.terms {
            put(v, Some(*j), -1);
        }
        put(&lhs.constant, None, -1);
        put(&rhs.constant, None, 1);
    }

    let mut pivots: BTreeMap<usize, (Row, Scalar)> = BTreeMap::new();
    for (key, (mut row, mut rhs)) in rows {
        row.retain(|_, v| !v.is_zero());
        let mut cursor = 0usize;
        loop {
            let next = row.range(cursor..).map(|(&c, _)| c).find(|c| pivots.contains_key(c));
            let Some(c) = next else { break };
            let factor = row[&c].clone();
            let (prow, prhs) = &pivots[&c];
            for (j, v) in prow {
                let x = row.entry(*j).or_insert_with(Scalar::zero);
                *x -= &factor * v;
                if x.is_zero() {
                    row.remove(j);
                }
            }
            rhs -= &factor * prhs;
            cursor = c + 1;
        }
        match row.iter().next().map(|(&c, v)| (c, v.clone())) {
            None => {
                if !rhs.is_zero() {
                    let (idx, e, eq_no) = key;
                    return Solution::Inconsistent {
                        witness: format!("equation {eq_no}, basis {idx:?}, exponent {e:?}: 0 = {rhs}"),
                    };
                }
            }
            Some((c, lead)) => {
                let inv = Scalar::one() / lead;
                for v in row.values_mut() {
                    *v *= &inv;
                }
                rhs *= &inv;
                pivots.insert(c, (row, rhs));
            }
        }
    }

    let mut x = vec![Scalar::zero(); unknowns];
    for (&c, (row, rhs)) in pivots.iter().rev() {
        let mut val = rhs.clone();
        for (&j, v) in row.range(c + 1..) {
            val -= v * &x[j];
        }
        x[c] = val;
    }
    let rank = pivots.len();
    if rank == unknowns {
        Solution::Unique(x)
    } else {
        let free = (0..unknowns).filter(|j| !pivots.contains_key(j)).collect();
        Solution::Underdetermined { rank, unknowns, particular: x, free }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::int;

    fn amb() -> Ambient {
        Ambient::uniform(&[Var::X], -8, 8)
    }

    fn space(name: &str, n: usize) -> Space {
        Space::new(name, (0..n).map(|i| format!("{name}{i}")).collect()).unwrap()
    }

    #[test]
    fn space_rejects_duplicates() {
        assert!(matches!(Space::with_labels("V", &["a", "a"]), Err(LinalgError::DuplicateLabel { .. })));
        assert!(matches!(Space::new("V", vec![]), Err(LinalgError::EmptySpace(_))));
    }

    #[test]
    fn flip_embedded_as_sigma23() {
        let sp: Vec<Space> = ["A", "B", "C", "D"].iter().map(|n| space(n, 2)).collect();
        let flip = SeriesMap::flip(&sp[1], &sp[2], (-8, 8));
        let v = SeriesVector::basis(&sp, &[0, 1, 0, 1], &amb());
        let w = v.apply(&flip, &[1, 2], &Arg::var(Var::X)).unwrap();
        assert_eq!(w.spaces()[1].name(), "C");
        assert_eq!(w.spaces()[2].name(), "B");
        assert_eq!(w.entries().keys().next().unwrap(), &vec![0, 0, 1, 1]);
    }

    #[test]
    fn embedded_identity_is_identity() {
        let sp: Vec<Space> = ["A", "B", "C"].iter().map(|n| space(n, 2)).collect();
        let id = SeriesMap::identity(&sp[..2], (-8, 8));
        let e = leg_embed(&id, &[0, 1], &sp).unwrap();
        assert_eq!(e, SeriesMap::identity(&sp, (-8, 8)));
        let id1 = SeriesMap::identity(&sp[..1], (-8, 8));
        let e1 = leg_embed(&id1, &[0], &sp).unwrap();
        assert_eq!(e1, SeriesMap::identity(&sp, (-8, 8)));
    }

    #[test]
    fn double_flips_are_identities() {
        for n in 2..=4 {
            let sp: Vec<Space> = (0..n).map(|i| space(&format!("S{i}"), 2)).collect();
            for i in 0..n {
                for j in i + 1..n {
                    let same = SeriesMap::flip(&sp[i], &sp[j], (-8, 8));
                    if sp[i] != sp[j] {
                        continue;
                    }
                    let _ = same;
                }
            }
            // flip of two copies of the same space, embedded on every leg pair
            let s = space("W", 2);
            let sps = vec![s.clone(); n];
            let flip = SeriesMap::flip(&s, &s, (-8, 8));
            for i in 0..n {
                for j in i + 1..n {
                    let f = leg_embed(&flip, &[i, j], &sps).unwrap();
                    assert_eq!(compose(&f, &f).unwrap(), SeriesMap::identity(&sps, (-8, 8)));
                }
            }
        }
    }

    #[test]
    fn compose_with_identity() {
        let a = space("A", 2);
        let mut f = SeriesMap::zero(std::slice::from_ref(&a), std::slice::from_ref(&a), (-8, 8));
        f.set_entry(vec![0], vec![1], Series::laurent((-8, 8), &[(1, 2), (-1, 1)]));
        f.set_entry(vec![1], vec![1], Series::laurent((-8, 8), &[(0, 3)]));
        let id = SeriesMap::identity(std::slice::from_ref(&a), (-8, 8));
        assert_eq!(compose(&id, &f).unwrap(), f);
        assert_eq!(compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn tensor_of_scalars_multiplies_series() {
        let one = space("L", 1);
        let mut f = SeriesMap::zero(std::slice::from_ref(&one), std::slice::from_ref(&one), (-8, 8));
        f.set_entry(vec![0], vec![0], Series::laurent((-8, 8), &[(0, 1), (1, 1)]));
        let mut g = SeriesMap::zero(std::slice::from_ref(&one), std::slice::from_ref(&one), (-8, 8));
        g.set_entry(vec![0], vec![0], Series::laurent((-8, 8), &[(0, 1), (1, -1)]));
        let t = tensor(&f, &g).unwrap();
        assert_eq!(t.entry(&[0, 0], &[0, 0]), Series::laurent((-8, 8), &[(0, 1), (2, -1)]));
    }

    #[test]
    fn flip_is_involution() {
        let a = space("A", 2);
        let b = space("B", 3);
        let f = SeriesMap::flip(&a, &b, (-8, 8));
        let g = SeriesMap::flip(&b, &a, (-8, 8));
        assert_eq!(compose(&g, &f).unwrap(), SeriesMap::identity(&[a, b], (-8, 8)));
    }

    #[test]
    fn embedding_respects_composition() {
        let a = space("A", 2);
        let sp = vec![a.clone(), a.clone(), a.clone()];
        let mut f = SeriesMap::zero(&[a.clone(), a.clone()], &[a.clone(), a.clone()], (-8, 8));
        f.set_entry(vec![0, 1], vec![1, 0], Series::laurent((-8, 8), &[(1, 1)]));
        f.set_entry(vec![1, 1], vec![0, 0], Series::laurent((-8, 8), &[(0, 2)]));
        f.set_entry(vec![0, 0], vec![0, 0], Series::laurent((-8, 8), &[(0, 1)]));
        let mut g = SeriesMap::zero(&[a.clone(), a.clone()], &[a.clone(), a.clone()], (-8, 8));
        g.set_entry(vec![1, 0], vec![1, 1], Series::laurent((-8, 8), &[(2, -1)]));
        g.set_entry(vec![0, 1], vec![0, 1], Series::laurent((-8, 8), &[(0, 1)]));
        for legs in [[0usize, 1], [0, 2], [1, 2]] {
            let lhs = leg_embed(&compose(&f, &g).unwrap(), &legs, &sp).unwrap();
            let rhs = compose(&leg_embed(&f, &legs, &sp).unwrap(), &leg_embed(&g, &legs, &sp).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    fn scalar_vec(s: Series) -> SeriesVector {
        let l = space("L", 1);
        let mut v = SeriesVector::zero(&[l], &amb());
        v.add_entry(vec![0], s);
        v
    }

    #[test]
    fn dense_inverse_and_rank() {
        let m = vec![vec![int(1), int(2)], vec![int(3), int(4)]];
        let (r, inv) = dense_inverse(&m);
        assert_eq!(r, 2);
        let inv = inv.unwrap();
        assert_eq!(inv[0][0], int(-2));
        assert_eq!(inv[1][0], Scalar::new(3.into(), 2.into()));
        let (r, inv) = dense_inverse(&[vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert_eq!((r, inv), (1, None));
    }

    #[test]
    fn sparse_rank_counts_independent_vectors() {
        let v = |pairs: &[(usize, i64)]| pairs.iter().map(|&(k, c)| (k, int(c))).collect::<BTreeMap<_, _>>();
        assert_eq!(sparse_rank(&[v(&[(0, 1), (1, 1)]), v(&[(1, 1), (2, 1)]), v(&[(0, 1), (2, -1)])]), 2);
        assert_eq!(sparse_rank(&[v(&[]), v(&[(3, 2)])]), 1);
    }

    #[test]
    fn solve_unique() {
        // x * a = x
        let x = Series::laurent((-8, 8), &[(1, 1)]);
        let eq = (LinExpr { constant: scalar_vec(Series::laurent((-8, 8), &[])), terms: vec![(0, scalar_vec(x.clone()))] }, LinExpr::constant(scalar_vec(x)));
        assert_eq!(solve_linear(&[eq], 1, &Window::uniform(1, -8, 8)), Solution::Unique(vec![int(1)]));
    }

    #[test]
    fn solve_underdetermined_and_inconsistent() {
        let zero = || scalar_vec(Series::laurent((-8, 8), &[]));
        let eq = (LinExpr { constant: zero(), terms: vec![(0, zero())] }, LinExpr::constant(zero()));
        match solve_linear(&[eq], 1, &Window::uniform(1, -8, 8)) {
            Solution::Underdetermined { rank, unknowns, .. } => assert_eq!((rank, unknowns), (0, 1)),
            other => panic!("{other:?}"),
        }
        let eq = (LinExpr { constant: zero(), terms: vec![(0, zero())] }, LinExpr::constant(scalar_vec(Series::laurent((-8, 8), &[(0, 1)]))));
        assert!(matches!(solve_linear(&[eq], 1, &Window::uniform(1, -8, 8)), Solution::Inconsistent { .. }));
    }

    #[test]
    fn solve_small_system_back_substitutes() {
        // a + b = 3 (x^0), a - b = 1 (x^1)  => a = 2, b = 1
        let c = |e: i32, k: i64| scalar_vec(Series::laurent((-8, 8), &[(e, k)]));
        let lhs = LinExpr {
            constant: c(0, 0),
            terms: vec![(0, scalar_vec(Series::laurent((-8, 8), &[(0, 1), (1, 1)]))), (1, scalar_vec(Series::laurent((-8, 8), &[(0, 1), (1, -1)])))],
        };
        let rhs = LinExpr::constant(scalar_vec(Series::laurent((-8, 8), &[(0, 3), (1, 1)])));
        assert_eq!(solve_linear(&[(lhs, rhs)], 2, &Window::uniform(1, -8, 8)), Solution::Unique(vec![int(2), int(1)]));
    }
}
