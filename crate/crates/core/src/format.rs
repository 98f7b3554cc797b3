//! The line-oriented workbench file format.
//!
//! ```text
//! space E2 basis one s t
//! vacuum E2 one
//! y E2 s one -> (s):1 ; (t):1@(1)
//! twist R_sign Z2 Z2
//!   r g g -> (g,g):-1
//! ```
//!
//! A `#` at the start of a line or after whitespace starts a comment.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::linalg::{SeriesMap, Space};
use crate::nva::{Nva, NvaModule, MAP_WINDOW};
use crate::quantum::SMap;
use crate::series::{Series, SeriesError, Var, Window};
use crate::smash::{ground, CoalgebraData, ComoduleAlgebraData, ModuleAlgebraData, VertexBialgebra};
use crate::twist::TwistOp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}, column {column}: expected {expected}")]
    Parse { line: usize, column: usize, expected: String },
    #[error("line {line}: {detail}")]
    Build { line: usize, detail: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Twist,
    Smap,
    Coalg,
    Action,
    Coaction,
    Module,
    Map,
}

impl BlockKind {
    fn keyword(self) -> &'static str {
        match self {
            BlockKind::Twist => "twist",
            BlockKind::Smap => "smap",
            BlockKind::Coalg => "coalg",
            BlockKind::Action => "action",
            BlockKind::Coaction => "coaction",
            BlockKind::Module => "module",
            BlockKind::Map => "map",
        }
    }

    fn from_keyword(k: &str) -> Option<BlockKind> {
        Some(match k {
            "twist" => BlockKind::Twist,
            "smap" => BlockKind::Smap,
            "coalg" => BlockKind::Coalg,
            "action" => BlockKind::Action,
            "coaction" => BlockKind::Coaction,
            "module" => BlockKind::Module,
            "map" => BlockKind::Map,
            _ => return None,
        })
    }

    fn named(self) -> bool {
        matches!(self, BlockKind::Twist | BlockKind::Smap | BlockKind::Module | BlockKind::Map)
    }

    fn header(self) -> &'static str {
        match self {
            BlockKind::Twist => "`twist NAME V U`",
            BlockKind::Smap => "`smap NAME A`",
            BlockKind::Coalg => "`coalg H`",
            BlockKind::Action => "`action H U`",
            BlockKind::Coaction => "`coaction H V`",
            BlockKind::Module => "`module NAME A W`",
            BlockKind::Map => "`map NAME SRC DST`",
        }
    }

    fn nspaces(self) -> usize {
        match self {
            BlockKind::Smap | BlockKind::Coalg => 1,
            _ => 2,
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            BlockKind::Twist => &["r"],
            BlockKind::Smap => &["s"],
            BlockKind::Coalg => &["delta", "eps"],
            BlockKind::Action => &["a"],
            BlockKind::Coaction => &["c"],
            BlockKind::Module => &["w"],
            BlockKind::Map => &["f"],
        }
    }

    /// Domain and codomain space names of the entries keyed `key`.
    fn shape(self, key: &str, s: &[String]) -> (Vec<String>, Vec<String>) {
        let v = |xs: &[&String]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let k = ground().name().to_string();
        match (self, key) {
            (BlockKind::Twist, _) => (v(&[&s[0], &s[1]]), v(&[&s[1], &s[0]])),
            (BlockKind::Smap, _) => (v(&[&s[0], &s[0]]), v(&[&s[0], &s[0]])),
            (BlockKind::Coalg, "delta") => (v(&[&s[0]]), v(&[&s[0], &s[0]])),
            (BlockKind::Coalg, _) => (v(&[&s[0]]), vec![k]),
            (BlockKind::Action, _) => (v(&[&s[0], &s[1]]), v(&[&s[1]])),
            (BlockKind::Coaction, _) => (v(&[&s[1]]), v(&[&s[0], &s[1]])),
            (BlockKind::Module, _) => (v(&[&s[0], &s[1]]), v(&[&s[1]])),
            (BlockKind::Map, _) => (v(&[&s[0]]), v(&[&s[1]])),
        }
    }
}

/// One table line: `key d1 d2 -> (t1,t2):series ; ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub domain: Vec<String>,
    pub targets: Vec<(Vec<String>, Series)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Section {
    Space { name: String, basis: Vec<String> },
    Vacuum { space: String, label: String },
    Y { space: String, entry: Entry },
    Block { kind: BlockKind, name: Option<String>, spaces: Vec<String>, entries: Vec<Entry> },
}

/// Parsed file: sections in order, plus the line each section starts on.
#[derive(Clone, Debug, Default)]
pub struct WorkbenchFile {
    pub sections: Vec<Section>,
    pub lines: Vec<usize>,
}

impl PartialEq for WorkbenchFile {
    fn eq(&self, other: &Self) -> bool {
        self.sections == other.sections
    }
}

fn series_window() -> Window {
    Window::new(vec![MAP_WINDOW]).expect("window")
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || "(),;:".contains(c)) && s != "->"
}

fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_ws {
            return &line[..i];
        }
        prev_ws = c.is_whitespace();
    }
    line
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(s: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(st)) => {
                out.push((base + s[..st].chars().count(), &s[st..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((base + s[..st].chars().count(), &s[st..]));
    }
    out
}

struct Parser {
    spaces: HashMap<String, Vec<String>>,
    file: WorkbenchFile,
    open: Option<usize>,
}

impl Parser {
    fn err(line: usize, column: usize, expected: impl Into<String>) -> FormatError {
        FormatError::Parse { line, column, expected: expected.into() }
    }

    fn basis(&self, line: usize, col: usize, name: &str) -> Result<&Vec<String>, FormatError> {
        if name == ground().name() {
            return Ok(&GROUND_BASIS);
        }
        self.spaces.get(name).ok_or_else(|| Self::err(line, col, format!("a declared space, found `{name}`")))
    }

    fn label(&self, line: usize, col: usize, space: &str, lbl: &str) -> Result<String, FormatError> {
        let basis = self.basis(line, col, space)?;
        if basis.iter().any(|b| b == lbl) {
            Ok(lbl.to_string())
        } else {
            Err(Self::err(line, col, format!("a basis label of `{space}`, found `{lbl}`")))
        }
    }

    fn line(&mut self, n: usize, raw: &str) -> Result<(), FormatError> {
        let text = strip_comment(raw);
        let toks = tokens(text, 1);
        let Some(&(col, kw)) = toks.first() else { return Ok(()) };
        if let Some(i) = self.open {
            if let Section::Block { kind, .. } = &self.file.sections[i] {
                if kind.keys().contains(&kw) {
                    return self.block_entry(n, text, i);
                }
            }
        }
        self.open = None;
        match kw {
            "space" => self.space(n, &toks),
            "vacuum" => {
                let [_, (c1, sp), (c2, lbl)] = toks[..] else {
                    return Err(Self::err(n, col, "`vacuum SPACE LABEL`"));
                };
                self.basis(n, c1, sp)?;
                let label = self.label(n, c2, sp, lbl)?;
                if self.file.sections.iter().any(|s| matches!(s, Section::Vacuum { space, .. } if space == sp)) {
                    return Err(Self::err(n, c1, format!("a single vacuum for `{sp}`")));
                }
                self.push(n, Section::Vacuum { space: sp.into(), label })
            }
            "y" => {
                let (c1, sp) = *toks.get(1).ok_or_else(|| Self::err(n, col, "`y SPACE U V -> VECTOR`"))?;
                self.basis(n, c1, sp)?;
                let sp = sp.to_string();
                let entry = self.entry(n, text, &[sp.clone(), sp.clone()], std::slice::from_ref(&sp), 2)?;
                self.push(n, Section::Y { space: sp, entry })
            }
            other => match BlockKind::from_keyword(other) {
                Some(kind) => self.block_header(n, &toks, kind),
                None => Err(Self::err(n, col, "a declaration (space, vacuum, y, twist, smap, coalg, action, coaction, module, map)")),
            },
        }
    }

    fn push(&mut self, line: usize, s: Section) -> Result<(), FormatError> {
        self.file.sections.push(s);
        self.file.lines.push(line);
        Ok(())
    }

    fn space(&mut self, n: usize, toks: &[(usize, &str)]) -> Result<(), FormatError> {
        let col = toks[0].0;
        if toks.len() < 4 || toks[2].1 != "basis" {
            let at = toks.get(2).map_or(col, |t| t.0);
            return Err(Self::err(n, at, "`space NAME basis LABEL+`"));
        }
        let (c1, name) = toks[1];
        if !valid_name(name) || name == ground().name() {
            return Err(Self::err(n, c1, "a space name"));
        }
        if self.spaces.contains_key(name) {
            return Err(Self::err(n, c1, format!("a new space name, `{name}` is already declared")));
        }
        let mut basis: Vec<String> = Vec::new();
        for &(c, lbl) in &toks[3..] {
            if !valid_name(lbl) {
                return Err(Self::err(n, c, "a basis label"));
            }
            if basis.iter().any(|b| b == lbl) {
                return Err(Self::err(n, c, format!("a distinct basis label, `{lbl}` repeats")));
            }
            basis.push(lbl.into());
        }
        self.spaces.insert(name.into(), basis.clone());
        self.push(n, Section::Space { name: name.into(), basis })
    }

    fn block_header(&mut self, n: usize, toks: &[(usize, &str)], kind: BlockKind) -> Result<(), FormatError> {
        let want = kind.nspaces() + usize::from(kind.named()) + 1;
        if toks.len() != want {
            let at = toks.get(want).or(toks.last()).map_or(1, |t| t.0);
            return Err(Self::err(n, at, kind.header()));
        }
        let mut rest = &toks[1..];
        let name = if kind.named() {
            let (c, nm) = rest[0];
            if !valid_name(nm) {
                return Err(Self::err(n, c, "a name"));
            }
            rest = &rest[1..];
            Some(nm.to_string())
        } else {
            None
        };
        let mut spaces = Vec::new();
        for &(c, sp) in rest {
            self.basis(n, c, sp)?;
            spaces.push(sp.to_string());
        }
        self.push(n, Section::Block { kind, name, spaces, entries: Vec::new() })?;
        self.open = Some(self.file.sections.len() - 1);
        Ok(())
    }

    fn block_entry(&mut self, n: usize, text: &str, i: usize) -> Result<(), FormatError> {
        let Section::Block { kind, spaces, .. } = &self.file.sections[i] else { unreachable!() };
        let key = tokens(text, 1)[0].1;
        let (dom, cod) = kind.shape(key, spaces);
        let entry = self.entry(n, text, &dom, &cod, 1)?;
        if let Section::Block { entries, .. } = &mut self.file.sections[i] {
            entries.push(entry);
        }
        Ok(())
    }

    /// Parses `key [skip tokens] d1 .. dn -> VECTOR`.
    fn entry(&self, n: usize, text: &str, dom: &[String], cod: &[String], skip: usize) -> Result<Entry, FormatError> {
        let arrow = text.find("->").ok_or_else(|| Self::err(n, text.chars().count() + 1, "`->`"))?;
        let left = tokens(&text[..arrow], 1);
        let arrow_col = text[..arrow].chars().count() + 1;
        if left.len() != skip + dom.len() {
            return Err(Self::err(n, left.get(skip + dom.len()).map_or(arrow_col, |t| t.0), format!("{} label(s) before `->`", dom.len())));
        }
        let mut domain = Vec::new();
        for (&(c, lbl), sp) in left[skip..].iter().zip(dom) {
            domain.push(self.label(n, c, sp, lbl)?);
        }
        let targets = self.vector(n, &text[arrow + 2..], arrow_col + 2, cod)?;
        Ok(Entry { key: left[0].1.to_string(), domain, targets })
    }

    /// `(l1,l2):series ; ...`, empty or `0` for the zero vector.
    fn vector(&self, n: usize, text: &str, base: usize, cod: &[String]) -> Result<Vec<(Vec<String>, Series)>, FormatError> {
        let mut out = Vec::new();
        if text.trim().is_empty() || text.trim() == "0" {
            return Ok(out);
        }
        let mut offset = base;
        for item in text.split(';') {
            let lead = item.chars().take_while(|c| c.is_whitespace()).count();
            let col = offset + lead;
            offset += item.chars().count() + 1;
            let body = item.trim();
            let close = body.find(')');
            let Some((tuple, lit)) = body.strip_prefix('(').zip(close).map(|(_, c)| (&body[1..c], &body[c + 1..])) else {
                return Err(Self::err(n, col, "a target tuple `(LABEL,...)`"));
            };
            let lit_full = lit;
            let Some(lit) = lit.trim_start().strip_prefix(':') else {
                return Err(Self::err(n, col + close.unwrap_or(0) + 1, "`:`"));
            };
            let labels: Vec<&str> = tuple.split(',').map(str::trim).collect();
            if labels.len() != cod.len() {
                return Err(Self::err(n, col, format!("a {}-tuple of labels", cod.len())));
            }
            let mut tgt = Vec::new();
            for (l, sp) in labels.iter().zip(cod) {
                tgt.push(self.label(n, col, sp, l)?);
            }
            let lit_col = col + body[..close.unwrap_or(0) + 1].chars().count() + (lit_full.chars().count() - lit.chars().count());
            let s = Series::parse_literal(lit, &[Var::X], &series_window()).map_err(|e| match e {
                SeriesError::Parse { column, expected } => Self::err(n, lit_col + column - 1, expected),
                other => Self::err(n, lit_col, format!("a series literal ({other})")),
            })?;
            out.push((tgt, s));
        }
        Ok(out)
    }
}

static GROUND_BASIS: std::sync::LazyLock<Vec<String>> = std::sync::LazyLock::new(|| vec!["1".to_string()]);

pub fn parse_file(text: &str) -> Result<WorkbenchFile, FormatError> {
    let mut p = Parser { spaces: HashMap::new(), file: WorkbenchFile::default(), open: None };
    for (i, line) in text.lines().enumerate() {
        p.line(i + 1, line)?;
    }
    Ok(p.file)
}

fn emit_entry(out: &mut String, head: &str, e: &Entry) {
    let items: Vec<String> = e.targets.iter().map(|(t, s)| format!("({}):{}", t.join(","), s.to_literal())).collect();
    let rhs = if items.is_empty() { "0".to_string() } else { items.join(" ; ") };
    let _ = writeln!(out, "{head} {} -> {rhs}", e.domain.join(" "));
}

pub fn emit(file: &WorkbenchFile) -> String {
    let mut out = String::new();
    for s in &file.sections {
        match s {
            Section::Space { name, basis } => {
                let _ = writeln!(out, "space {name} basis {}", basis.join(" "));
            }
            Section::Vacuum { space, label } => {
                let _ = writeln!(out, "vacuum {space} {label}");
            }
            Section::Y { space, entry } => emit_entry(&mut out, &format!("y {space}"), entry),
            Section::Block { kind, name, spaces, entries } => {
                let mut head = vec![kind.keyword().to_string()];
                head.extend(name.clone());
                head.extend(spaces.iter().cloned());
                let _ = writeln!(out, "{}", head.join(" "));
                for e in entries {
                    emit_entry(&mut out, &format!("  {}", e.key), e);
                }
            }
        }
    }
    out
}

fn map_entries(key: &str, m: &SeriesMap) -> Vec<Entry> {
    m.columns()
        .iter()
        .filter_map(|(col, rows)| {
            let targets: Vec<(Vec<String>, Series)> = rows
                .iter()
                .filter(|(_, s)| !s.is_zero())
                .map(|(row, s)| (row.iter().zip(m.codomain()).map(|(&i, sp)| sp.label(i).to_string()).collect(), s.clone()))
                .collect();
            (!targets.is_empty()).then(|| Entry {
                key: key.into(),
                domain: col.iter().zip(m.domain()).map(|(&i, sp)| sp.label(i).to_string()).collect(),
                targets,
            })
        })
        .collect()
}

impl WorkbenchFile {
    fn has_space(&self, name: &str) -> bool {
        self.sections.iter().any(|s| matches!(s, Section::Space { name: n, .. } if n == name))
    }

    fn has_vacuum(&self, name: &str) -> bool {
        self.sections.iter().any(|s| matches!(s, Section::Vacuum { space, .. } if space == name))
    }

    fn push(&mut self, s: Section) {
        self.sections.push(s);
        self.lines.push(0);
    }

    pub fn add_space(&mut self, sp: &Space) {
        if sp.name() != ground().name() && !self.has_space(sp.name()) {
            self.push(Section::Space { name: sp.name().into(), basis: sp.basis().to_vec() });
        }
    }

    /// Declares the algebra once; later calls with the same space are ignored.
    pub fn add_nva(&mut self, a: &Nva) {
        self.add_space(a.space());
        if self.has_vacuum(a.name()) {
            return;
        }
        self.push(Section::Vacuum { space: a.name().into(), label: a.space().label(a.vacuum()).into() });
        for entry in map_entries("y", a.y()) {
            self.push(Section::Y { space: a.name().into(), entry });
        }
    }

    fn add_block(&mut self, kind: BlockKind, name: Option<&str>, spaces: &[&Space], entries: Vec<Entry>) {
        for sp in spaces {
            self.add_space(sp);
        }
        self.push(Section::Block { kind, name: name.map(String::from), spaces: spaces.iter().map(|s| s.name().to_string()).collect(), entries });
    }

    pub fn add_twist(&mut self, r: &TwistOp) {
        self.add_nva(r.u());
        self.add_nva(r.v());
        self.add_block(BlockKind::Twist, Some(r.name()), &[r.v().space(), r.u().space()], map_entries("r", r.table()));
    }

    pub fn add_smap(&mut self, s: &SMap) {
        self.add_nva(s.algebra());
        self.add_block(BlockKind::Smap, Some(s.name()), &[s.algebra().space()], map_entries("s", s.table()));
    }

    pub fn add_bialgebra(&mut self, h: &VertexBialgebra) {
        self.add_nva(&h.algebra);
        let c = &h.coalgebra;
        let declared = self.sections.iter().any(|s| matches!(s, Section::Block { kind: BlockKind::Coalg, spaces, .. } if spaces[0] == c.space.name()));
        if !declared {
            let mut entries = map_entries("delta", &c.coproduct);
            entries.extend(map_entries("eps", &c.counit));
            self.add_block(BlockKind::Coalg, None, &[&c.space], entries);
        }
    }

    pub fn add_action(&mut self, m: &ModuleAlgebraData) {
        self.add_bialgebra(&m.bialgebra);
        self.add_nva(&m.algebra);
        self.add_block(BlockKind::Action, None, &[m.bialgebra.algebra.space(), m.algebra.space()], map_entries("a", &m.action));
    }

    pub fn add_coaction(&mut self, c: &ComoduleAlgebraData) {
        self.add_bialgebra(&c.bialgebra);
        self.add_nva(&c.algebra);
        self.add_block(BlockKind::Coaction, None, &[c.bialgebra.algebra.space(), c.algebra.space()], map_entries("c", &c.coaction));
    }

    pub fn add_module(&mut self, name: &str, m: &NvaModule) {
        self.add_nva(m.algebra());
        self.add_block(BlockKind::Module, Some(name), &[m.algebra().space(), m.space()], map_entries("w", m.yw()));
    }

    pub fn add_map(&mut self, name: &str, m: &SeriesMap) {
        self.add_block(BlockKind::Map, Some(name), &[&m.domain()[0], &m.codomain()[0]], map_entries("f", m));
    }
}

/// The objects a file declares, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Workbench {
    pub algebras: Vec<Nva>,
    pub twists: Vec<TwistOp>,
    pub smaps: Vec<SMap>,
    pub bialgebras: Vec<VertexBialgebra>,
    pub actions: Vec<ModuleAlgebraData>,
    pub coactions: Vec<ComoduleAlgebraData>,
    pub modules: Vec<(String, NvaModule)>,
    pub maps: Vec<(String, SeriesMap)>,
}

impl Workbench {
    pub fn algebra(&self, name: &str) -> Option<&Nva> {
        self.algebras.iter().find(|a| a.name() == name)
    }

    pub fn twist(&self, name: &str) -> Option<&TwistOp> {
        self.twists.iter().find(|r| r.name() == name)
    }

    pub fn smap(&self, name: &str) -> Option<&SMap> {
        self.smaps.iter().find(|s| s.name() == name)
    }

    pub fn map(&self, name: &str) -> Option<&SeriesMap> {
        self.maps.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    fn bialgebra(&self, name: &str) -> Option<&VertexBialgebra> {
        self.bialgebras.iter().find(|h| h.algebra.name() == name)
    }

    pub fn from_file(file: &WorkbenchFile) -> Result<Workbench, FormatError> {
        let build = |line: usize, detail: String| FormatError::Build { line, detail };
        let mut spaces: BTreeMap<String, Space> = BTreeMap::new();
        spaces.insert(ground().name().into(), ground());
        let mut ys: BTreeMap<String, SeriesMap> = BTreeMap::new();
        let mut wb = Workbench::default();
        for (s, &line) in file.sections.iter().zip(&file.lines) {
            match s {
                Section::Space { name, basis } => {
                    let sp = Space::new(name.clone(), basis.clone()).map_err(|e| build(line, e.to_string()))?;
                    ys.insert(name.clone(), SeriesMap::zero(&[sp.clone(), sp.clone()], std::slice::from_ref(&sp), MAP_WINDOW));
                    spaces.insert(name.clone(), sp);
                }
                Section::Y { space, entry } => {
                    let sp = &spaces[space];
                    fill(ys.get_mut(space).expect("declared"), entry, &[sp.clone(), sp.clone()], std::slice::from_ref(sp));
                }
                _ => {}
            }
        }
        let y_line = |sp: &str| {
            file.sections.iter().zip(&file.lines).find(|(s, _)| matches!(s, Section::Y { space, .. } if space == sp)).map(|(_, &l)| l)
        };
        for (s, &line) in file.sections.iter().zip(&file.lines) {
            if let Section::Vacuum { space, label } = s {
                let nva = Nva::new(spaces[space].clone(), label, ys[space].clone()).map_err(|e| build(line, e.to_string()))?;
                wb.algebras.push(nva);
            }
        }
        for name in ys.keys() {
            if let (Some(l), None) = (y_line(name), wb.algebra(name)) {
                return Err(build(l, format!("`y` lines for `{name}` need a `vacuum {name} LABEL` declaration")));
            }
        }
        let need = |wb: &Workbench, line: usize, name: &str| -> Result<Nva, FormatError> {
            wb.algebra(name).cloned().ok_or_else(|| build(line, format!("`{name}` needs `vacuum` and `y` declarations")))
        };
        for pass in [true, false] {
            for (s, &line) in file.sections.iter().zip(&file.lines) {
                let Section::Block { kind, name, spaces: names, entries } = s else { continue };
                if (*kind == BlockKind::Coalg) != pass {
                    continue;
                }
                let sp: Vec<Space> = names.iter().map(|n| spaces[n].clone()).collect();
                let table = |key: &str| {
                    let (d, c) = kind.shape(key, names);
                    let d: Vec<Space> = d.iter().map(|n| spaces[n].clone()).collect();
                    let c: Vec<Space> = c.iter().map(|n| spaces[n].clone()).collect();
                    let mut m = SeriesMap::zero(&d, &c, MAP_WINDOW);
                    for e in entries.iter().filter(|e| e.key == key) {
                        fill(&mut m, e, &d, &c);
                    }
                    m
                };
                let name = name.clone().unwrap_or_default();
                match kind {
                    BlockKind::Twist => {
                        let (v, u) = (need(&wb, line, &names[0])?, need(&wb, line, &names[1])?);
                        let r = TwistOp::new(&name, u, v, table("r")).map_err(|e| build(line, e.to_string()))?;
                        wb.twists.push(r);
                    }
                    BlockKind::Smap => {
                        let s = SMap::new(&name, need(&wb, line, &names[0])?, table("s")).map_err(|e| build(line, e.to_string()))?;
                        wb.smaps.push(s);
                    }
                    BlockKind::Coalg => {
                        let coalgebra = CoalgebraData { space: sp[0].clone(), coproduct: table("delta"), counit: table("eps") };
                        wb.bialgebras.push(VertexBialgebra { algebra: need(&wb, line, &names[0])?, coalgebra });
                    }
                    BlockKind::Action | BlockKind::Coaction => {
                        let bialgebra =
                            wb.bialgebra(&names[0]).cloned().ok_or_else(|| build(line, format!("`{}` needs a `coalg` block", names[0])))?;
                        let algebra = need(&wb, line, &names[1])?;
                        if *kind == BlockKind::Action {
                            wb.actions.push(ModuleAlgebraData { bialgebra, algebra, action: table("a") });
                        } else {
                            wb.coactions.push(ComoduleAlgebraData { bialgebra, algebra, coaction: table("c") });
                        }
                    }
                    BlockKind::Module => {
                        let m = NvaModule::new(need(&wb, line, &names[0])?, sp[1].clone(), table("w")).map_err(|e| build(line, e.to_string()))?;
                        wb.modules.push((name, m));
                    }
                    BlockKind::Map => wb.maps.push((name, table("f"))),
                }
            }
        }
        Ok(wb)
    }
}

fn fill(m: &mut SeriesMap, e: &Entry, dom: &[Space], cod: &[Space]) {
    let idx = |sps: &[Space], lbls: &[String]| -> Vec<usize> { sps.iter().zip(lbls).map(|(s, l)| s.index_of(l).expect("validated")).collect() };
    let col = idx(dom, &e.domain);
    for (t, s) in &e.targets {
        let row = idx(cod, t);
        let prev = m.entry(&col, &row);
        m.set_entry(col.clone(), row, prev.add(s).expect("same ambient"));
    }
}

pub fn load(text: &str) -> Result<Workbench, FormatError> {
    Workbench::from_file(&parse_file(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{e1, e1n, e2, r_sign, z2};
    use crate::quantum::diagonal_smap;
    use crate::smash::{regular_coaction, sign_action, z2_bialgebra};

    fn pos(e: FormatError) -> (usize, usize) {
        match e {
            FormatError::Parse { line, column, .. } => (line, column),
            other => panic!("not a parse error: {other}"),
        }
    }

    #[test]
    fn e2_line_matches_registry() {
        let text = "space E2 basis one s t\nvacuum E2 one\ny E2 s one -> (s):1 ; (t):1@(1)\n";
        let wb = load(text).unwrap();
        let a = wb.algebra("E2").unwrap();
        assert_eq!(a.y().column(&[1, 0]).entries(), e2().y().column(&[1, 0]).entries());
    }

    #[test]
    fn no_y_lines_give_zero_map() {
        let wb = load("space V basis one v\nvacuum V one\n").unwrap();
        assert!(wb.algebras[0].y().columns().values().all(|c| c.values().all(Series::is_zero)));
    }

    #[test]
    fn duplicate_label_is_positioned() {
        assert_eq!(pos(parse_file("# c\nspace V basis one v v\n").unwrap_err()), (2, 21));
    }

    #[test]
    fn errors_carry_columns() {
        let head = "space V basis one v\nvacuum V one\n";
        assert_eq!(pos(parse_file(&format!("{head}y V v w -> (v):1\n")).unwrap_err()), (3, 7));
        assert_eq!(pos(parse_file(&format!("{head}y V v one -> (w):1\n")).unwrap_err()), (3, 14));
        assert_eq!(pos(parse_file(&format!("{head}y V v one -> (v):1@(x)\n")).unwrap_err()), (3, 18));
        assert_eq!(pos(parse_file(&format!("{head}y V v one (v):1\n")).unwrap_err()), (3, 16));
        assert_eq!(pos(parse_file(&format!("{head}y W v one -> (v):1\n")).unwrap_err()), (3, 3));
        assert_eq!(pos(parse_file(&format!("{head}frobnicate\n")).unwrap_err()), (3, 1));
        assert_eq!(pos(parse_file(&format!("{head}twist R V\n")).unwrap_err()), (3, 9));
    }

    #[test]
    fn comments_and_hash_names() {
        let wb = load("space Z2#Z2 basis one # trailing\n# whole line\nvacuum Z2#Z2 one\n").unwrap();
        assert_eq!(wb.algebras[0].name(), "Z2#Z2");
    }

    #[test]
    fn build_errors() {
        let e = load("space V basis one v\ny V v v -> (v):1\n").unwrap_err();
        assert!(matches!(e, FormatError::Build { line: 2, .. }), "{e}");
        let e = load("space V basis one\nspace W basis one\nvacuum V one\ntwist R W V\n").unwrap_err();
        assert!(matches!(e, FormatError::Build { line: 4, .. }), "{e}");
    }

    #[test]
    fn round_trip_everything() {
        let mut f = WorkbenchFile::default();
        f.add_nva(&e1());
        f.add_nva(&e1n());
        f.add_twist(&r_sign());
        f.add_smap(&diagonal_smap("sign", &z2(), |i, j| if i == 1 && j == 1 { -1 } else { 1 }));
        let h = z2_bialgebra();
        f.add_action(&sign_action(&h, &e1()));
        f.add_coaction(&regular_coaction(&h));
        f.add_module("adj", &e1n().adjoint());
        f.add_map("inc", &SeriesMap::identity(&[e1().space().clone()], MAP_WINDOW));
        let text = emit(&f);
        let parsed = parse_file(&text).unwrap();
        assert_eq!(parsed, f);
        assert_eq!(emit(&parsed), text);
        let wb = Workbench::from_file(&parsed).unwrap();
        assert_eq!(wb.algebra("E1n").unwrap(), &e1n());
        assert_eq!(wb.twist("R_sign").unwrap().table(), r_sign().table());
        assert_eq!(wb.bialgebras[0], h);
        assert_eq!(wb.actions[0].action, sign_action(&h, &e1()).action);
        assert_eq!(wb.coactions[0].coaction, h.coalgebra.coproduct);
        assert_eq!(wb.modules[0].1.yw(), e1n().adjoint().yw());
        assert_eq!(wb.maps[0].1, SeriesMap::identity(&[e1().space().clone()], MAP_WINDOW));
    }

    #[test]
    fn rational_and_laurent_literals() {
        let wb = load("space V basis one v\nvacuum V one\ny V v v -> (one):-3/4@(-2) + 5@(1) ; (v):0\n").unwrap();
        let s = wb.algebras[0].y_entry(1, 1, 0);
        assert_eq!(s.to_literal(), "-3/4@(-2) + 5@(1)");
        assert!(wb.algebras[0].y_entry(1, 1, 1).is_zero());
    }
}
