//! Suite dispatch and the product / extraction drivers behind the CLI.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::format::{Workbench, WorkbenchFile};
use crate::nva::{check_module, check_nva, ModuleForm, Nva};
use crate::product::{build_twisted_tensor, check_invertible_relations, check_product_properties, extract_twisting};
use crate::quantum::{check_qva_axioms, extract_s, QuantumError, SMap};
use crate::registry;
use crate::report::{CheckConfig, CheckReport};
use crate::smash::{build_smash, check_comodule_algebra, check_module_algebra, check_vertex_bialgebra, smash_as_twist, ComoduleAlgebraData, ModuleAlgebraData};
use crate::twist::{check_twisting_axioms, TwistOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    /// Bad names or missing sections; the CLI maps this to exit status 2.
    #[error("{0}")]
    Usage(String),
    /// A construction refused its inputs; exit status 1.
    #[error("{0}")]
    Failed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Nva,
    Twist,
    Qva,
    Smash,
    ProductProps,
    Module,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Nva, Suite::Twist, Suite::Qva, Suite::Smash, Suite::ProductProps, Suite::Module];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Nva => "nva",
            Suite::Twist => "twist",
            Suite::Qva => "qva",
            Suite::Smash => "smash",
            Suite::ProductProps => "product-props",
            Suite::Module => "module",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Suite, SuiteError> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            SuiteError::Usage(format!("unknown suite `{s}` (one of {})", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub algebra: Option<String>,
    pub twist: Option<String>,
    pub smap: Option<String>,
}

/// A file path or a registry name, resolved to a workbench.
pub fn resolve_input(input: &str) -> Result<Workbench, SuiteError> {
    if let Some(wb) = registry::workbench(input) {
        return Ok(wb);
    }
    let text = std::fs::read_to_string(input).map_err(|e| SuiteError::Usage(format!("`{input}` is neither a registry name nor a readable file: {e}")))?;
    crate::format::load(&text).map_err(|e| SuiteError::Usage(format!("{input}: {e}")))
}

/// The algebra named in `opts`, or the last one the workbench declares.
pub fn primary<'a>(wb: &'a Workbench, name: Option<&str>) -> Result<&'a Nva, SuiteError> {
    match name {
        Some(n) => wb.algebra(n).ok_or_else(|| SuiteError::Usage(format!("no algebra named `{n}`"))),
        None => wb.algebras.last().ok_or_else(|| SuiteError::Usage("input declares no algebra".into())),
    }
}

pub fn find_twist(wb: &Workbench, name: &str, a: &Nva) -> Result<TwistOp, SuiteError> {
    wb.twist(name).cloned().or_else(|| registry::twist(name, a, a)).ok_or_else(|| SuiteError::Usage(format!("unknown twist `{name}`")))
}

pub fn find_smap(wb: &Workbench, name: &str, a: &Nva) -> Result<SMap, SuiteError> {
    wb.smap(name).cloned().or_else(|| registry::smap(name, a)).ok_or_else(|| SuiteError::Usage(format!("unknown S-map `{name}`")))
}

fn required<'a>(v: &'a Option<String>, flag: &str, suite: Suite) -> Result<&'a str, SuiteError> {
    v.as_deref().ok_or_else(|| SuiteError::Usage(format!("suite `{suite}` needs {flag}")))
}

fn smash_data(wb: &Workbench) -> Result<(&ModuleAlgebraData, &ComoduleAlgebraData), SuiteError> {
    match (wb.actions.first(), wb.coactions.first()) {
        (Some(m), Some(c)) => Ok((m, c)),
        _ => Err(SuiteError::Usage("suite `smash` needs an `action` and a `coaction` block".into())),
    }
}

pub fn run_suite(wb: &Workbench, suite: Suite, opts: &SuiteOptions, cfg: &CheckConfig) -> Result<Vec<CheckReport>, SuiteError> {
    let mut out = Vec::new();
    match suite {
        Suite::Nva => out.push(check_nva(primary(wb, opts.algebra.as_deref())?, cfg)),
        Suite::Twist => {
            let a = primary(wb, opts.algebra.as_deref())?;
            let r = find_twist(wb, required(&opts.twist, "--twist", suite)?, a)?;
            out.push(check_twisting_axioms(&r, cfg));
        }
        Suite::Qva => {
            let a = primary(wb, opts.algebra.as_deref())?;
            let s = find_smap(wb, required(&opts.smap, "--smap", suite)?, a)?;
            out.push(check_qva_axioms(s.algebra(), &s, cfg));
        }
        Suite::Smash => {
            let (m, c) = smash_data(wb)?;
            let parts = [check_vertex_bialgebra(&m.bialgebra, cfg), check_module_algebra(m, cfg), check_comodule_algebra(c, cfg)];
            let ok = parts.iter().all(CheckReport::passed);
            out.extend(parts);
            if ok {
                match (build_smash(m, c, cfg), smash_as_twist(m, c, cfg)) {
                    (Ok(s), Ok((_, rep))) => {
                        out.push(check_nva(s.product.nva(), cfg));
                        out.push(rep);
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(SuiteError::Failed(e.to_string())),
                }
            }
        }
        Suite::ProductProps => {
            let a = primary(wb, opts.algebra.as_deref())?;
            let r = find_twist(wb, required(&opts.twist, "--twist", suite)?, a)?;
            let axioms = check_twisting_axioms(&r, cfg);
            if !axioms.passed() {
                out.push(axioms);
                return Ok(out);
            }
            let p = build_twisted_tensor(r.u(), r.v(), &r, cfg).map_err(|e| SuiteError::Failed(e.to_string()))?;
            out.push(check_nva(p.nva(), cfg));
            out.push(check_product_properties(&p, cfg));
            out.push(check_invertible_relations(&p, cfg));
        }
        Suite::Module => {
            if wb.modules.is_empty() {
                return Err(SuiteError::Usage("suite `module` needs a `module` block".into()));
            }
            for (name, m) in &wb.modules {
                let mut rep = check_module(m, cfg, ModuleForm::Original);
                rep.suite = format!("{} ({name})", rep.suite);
                out.push(rep);
            }
        }
    }
    Ok(out)
}

/// A constructed object serialized as a workbench file, with its reports.
#[derive(Clone, Debug)]
pub struct Output {
    pub file: WorkbenchFile,
    pub reports: Vec<CheckReport>,
}

/// `U ⊗_R V`, with `iU`, `iV` maps for later extraction.
pub fn run_product(u: &Nva, v: &Nva, r: &TwistOp, cfg: &CheckConfig) -> Result<Output, SuiteError> {
    let p = build_twisted_tensor(u, v, r, cfg).map_err(|e| SuiteError::Failed(e.to_string()))?;
    let mut file = WorkbenchFile::default();
    file.add_twist(r);
    file.add_nva(p.nva());
    file.add_map("iU", p.embed_u());
    file.add_map("iV", p.embed_v());
    Ok(Output { file, reports: vec![check_nva(p.nva(), cfg)] })
}

pub fn run_smash(m: &ModuleAlgebraData, c: &ComoduleAlgebraData, cfg: &CheckConfig) -> Result<Output, SuiteError> {
    let s = build_smash(m, c, cfg).map_err(|e| SuiteError::Failed(e.to_string()))?;
    let (_, as_twist) = smash_as_twist(m, c, cfg).map_err(|e| SuiteError::Failed(e.to_string()))?;
    let mut file = WorkbenchFile::default();
    file.add_action(m);
    file.add_coaction(c);
    file.add_twist(&s.product.twist());
    file.add_nva(s.product.nva());
    file.add_map("iU", s.product.embed_u());
    file.add_map("iV", s.product.embed_v());
    Ok(Output { file, reports: vec![s.report, as_twist] })
}

/// Recovers a twist from `K` and two named maps whose sources are declared algebras.
pub fn run_extract_twist(wb: &Workbench, k: &Nva, umap: &str, vmap: &str, cfg: &CheckConfig) -> Result<Output, SuiteError> {
    let lookup = |name: &str| -> Result<(Nva, &crate::linalg::SeriesMap), SuiteError> {
        let m = wb.map(name).ok_or_else(|| SuiteError::Usage(format!("no map named `{name}`")))?;
        if m.codomain()[0] != *k.space() {
            return Err(SuiteError::Usage(format!("map `{name}` does not land in `{}`", k.name())));
        }
        let src = m.domain()[0].name();
        let a = wb.algebra(src).cloned().or_else(|| registry::algebra(src)).ok_or_else(|| SuiteError::Usage(format!("no algebra `{src}` for map `{name}`")))?;
        Ok((a, m))
    };
    let (u, iu) = lookup(umap)?;
    let (v, iv) = lookup(vmap)?;
    let ex = extract_twisting(k, &u, &v, iu, iv, cfg).map_err(|e| SuiteError::Failed(e.to_string()))?;
    let mut file = WorkbenchFile::default();
    file.add_twist(&ex.twist);
    let mut z2 = ex.z2.report;
    z2.note(format!("Z2 kernel rank {} ({} columns, rank {})", ex.z2.kernel_rank, ex.z2.columns, ex.z2.rank));
    Ok(Output { file, reports: vec![ex.report, z2] })
}

/// Solves for `S(x)`; an underdetermined system is reported as a failure
/// carrying one particular solution.
pub fn run_extract_smap(a: &Nva, cfg: &CheckConfig) -> Result<Output, SuiteError> {
    let mut file = WorkbenchFile::default();
    match extract_s(a, cfg) {
        Ok(ex) => {
            file.add_smap(&ex.smap);
            Ok(Output { file, reports: vec![ex.report] })
        }
        Err(QuantumError::Underdetermined { rank, unknowns, particular }) => Err(SuiteError::Failed(format!(
            "S extraction underdetermined: rank {rank} of {unknowns} unknowns; one solution is\n{}",
            crate::format::emit(&{
                file.add_smap(&particular);
                file
            })
        ))),
        Err(e) => Err(SuiteError::Failed(e.to_string())),
    }
}

/// Registry instances and the suites each must pass.
pub fn self_test_instances() -> Vec<(&'static str, Suite, SuiteOptions)> {
    let o = |twist: Option<&str>, smap: Option<&str>| SuiteOptions { algebra: None, twist: twist.map(String::from), smap: smap.map(String::from) };
    let mut v = Vec::new();
    for (name, _) in registry::ALGEBRAS {
        v.push((*name, Suite::Nva, o(None, None)));
        v.push((*name, Suite::Module, o(None, None)));
        v.push((*name, Suite::Twist, o(Some("flip"), None)));
        v.push((*name, Suite::ProductProps, o(Some("flip"), None)));
    }
    for name in ["E1", "E2", "Z2", "Q"] {
        v.push((name, Suite::Qva, o(None, Some("identity"))));
    }
    v.push(("E1", Suite::Qva, o(None, Some("sign"))));
    v.push(("Z2", Suite::Twist, o(Some("R_sign"), None)));
    v.push(("Z2", Suite::ProductProps, o(Some("R_sign"), None)));
    v.push(("E1", Suite::Twist, o(Some("R_zero"), None)));
    for (name, _) in registry::SMASH {
        v.push((*name, Suite::Smash, o(None, None)));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(input: &str, suite: &str, twist: Option<&str>, smap: Option<&str>) -> Vec<CheckReport> {
        let wb = resolve_input(input).unwrap();
        let opts = SuiteOptions { algebra: None, twist: twist.map(String::from), smap: smap.map(String::from) };
        run_suite(&wb, suite.parse().unwrap(), &opts, &CheckConfig::default()).unwrap()
    }

    #[test]
    fn e2_nva_exact_with_k_zero() {
        let reps = run("E2", "nva", None, None);
        assert!(reps[0].exact(), "{}", reps[0]);
        assert!(reps[0].results.iter().all(|r| r.max_k().unwrap_or(0) == 0));
    }

    #[test]
    fn z2_sign_twist_exact() {
        assert!(run("Z2", "twist", Some("R_sign"), None)[0].exact());
    }

    #[test]
    fn e1n_identity_smap_fails() {
        let reps = run("E1n", "qva", None, Some("identity"));
        assert!(!reps[0].passed());
    }

    #[test]
    fn usage_errors() {
        assert!(matches!("frob".parse::<Suite>(), Err(SuiteError::Usage(_))));
        let wb = resolve_input("E1").unwrap();
        let cfg = CheckConfig::default();
        assert!(matches!(run_suite(&wb, Suite::Twist, &SuiteOptions::default(), &cfg), Err(SuiteError::Usage(_))));
        assert!(matches!(run_suite(&wb, Suite::Smash, &SuiteOptions::default(), &cfg), Err(SuiteError::Usage(_))));
        assert!(matches!(resolve_input("/no/such/file.nva"), Err(SuiteError::Usage(_))));
    }

    #[test]
    fn product_then_extract_round_trip() {
        let cfg = CheckConfig::default();
        let z = registry::algebra("Z2").unwrap();
        let out = run_product(&z, &z, &crate::examples::r_sign(), &cfg).unwrap();
        let wb = Workbench::from_file(&crate::format::parse_file(&crate::format::emit(&out.file)).unwrap()).unwrap();
        let k = primary(&wb, None).unwrap();
        assert!(check_nva(k, &cfg).passed());
        let ex = run_extract_twist(&wb, k, "iU", "iV", &cfg).unwrap();
        let back = Workbench::from_file(&ex.file.clone()).unwrap();
        assert_eq!(back.twists[0].table().columns(), crate::examples::r_sign().table().columns());
    }

    #[test]
    fn failing_twist_refuses_product() {
        let e = registry::algebra("E1").unwrap();
        let bad = registry::twist("R_sign", &e, &e).unwrap();
        assert!(matches!(run_product(&e, &e, &bad, &CheckConfig::default()), Err(SuiteError::Failed(_))));
    }

    #[test]
    fn registry_self_test() {
        let cfg = CheckConfig::default();
        for (input, suite, opts) in self_test_instances() {
            let wb = resolve_input(input).unwrap();
            for rep in run_suite(&wb, suite, &opts, &cfg).unwrap() {
                assert!(rep.passed(), "{input} {suite}: {rep}");
            }
        }
    }
}
