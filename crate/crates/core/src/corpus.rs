//! Embedded fixture formulas and how to run them.

use std::path::Path;

use crate::formulas::{parse_document, Binder, Document, ParseError, Signature};
use crate::kernel::FinType;
use crate::pipeline::{run_template_with, PipelineError, Role, Strategy, TemplateRun};
use crate::ust::{interpret, simplify_monotone, UstError};

/// Fixture groups selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    Pipeline,
    Ust,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Pipeline => "pipeline",
            Category::Ust => "ust",
        }
    }

    pub fn all() -> [Category; 2] {
        [Category::Pipeline, Category::Ust]
    }
}

/// What a pipeline run on the fixture is expected to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    NormalForm,
    Stuck,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub source: String,
    pub role: Role,
    /// Choice parameters free in the formula.
    pub params: Vec<Binder>,
    pub expect: Expectation,
}

impl Fixture {
    /// A fixture from source text. Known names keep their role and parameters.
    pub fn from_source(name: &str, source: String) -> Fixture {
        make(name, source)
    }

    pub fn document(&self) -> Result<Document, ParseError> {
        parse_document(&self.source, &Signature::analysis())
    }

    /// Input, every rewrite step and the final normal form, one per line.
    pub fn transcript(&self, strategy: &Strategy) -> Result<String, FixtureError> {
        let doc = self.document()?;
        let mut out = format!("input {}\n", doc.formula);
        match self.run(strategy) {
            Ok(run) => {
                for e in &run.trace.entries {
                    out.push_str(&format!("{} [{}]\n  {}\n", e.rule, e.evidence, e.after));
                }
                out.push_str(&format!("normal-form {}\n", run.normal_form));
            }
            Err(FixtureError::Pipeline(PipelineError::Stuck { last, reason, trace })) => {
                for e in &trace.entries {
                    out.push_str(&format!("{} [{}]\n  {}\n", e.rule, e.evidence, e.after));
                }
                out.push_str(&format!("stuck {}\n  {}\n", reason, last));
            }
            Err(e) => return Err(e),
        }
        Ok(out)
    }

    pub fn run(&self, strategy: &Strategy) -> Result<TemplateRun, FixtureError> {
        let doc = self.document()?;
        let params: Vec<Binder> = self.params.clone();
        let mut sig = doc.signature.clone();
        for p in &params {
            sig.declare(&p.name, p.ty.clone(), true);
        }
        Ok(run_template_with(&doc.formula, strategy, &sig, self.role, &params)?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("{0}")]
    Ust(#[from] UstError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

macro_rules! fixture {
    ($name:literal) => {
        (
            $name,
            include_str!(concat!("../fixtures/", $name, ".nsa")),
            include_str!(concat!("../fixtures/golden/", $name, ".trace")),
        )
    };
}

macro_rules! ust_fixture {
    ($name:literal) => {
        (
            $name,
            include_str!(concat!("../fixtures/ust/", $name, ".nsa")),
            include_str!(concat!("../fixtures/golden/ust/", $name, ".ust")),
        )
    };
}

const EMBEDDED_UST: [(&str, &str, &str); 7] = [
    ust_fixture!("standard_number"),
    ust_fixture!("standard_function"),
    ust_fixture!("standard_implication"),
    ust_fixture!("standard_conjunction"),
    ust_fixture!("bounded_standard_witness"),
    ust_fixture!("standard_inputs_standard_outputs"),
    ust_fixture!("normal_form_invariance"),
];

const EMBEDDED: [(&str, &str, &str); 8] = [
    fixture!("uniform_continuity_approx"),
    fixture!("riemann_integrability_approx"),
    fixture!("riemann_sums_given_modulus"),
    fixture!("binary_limit_standard_sequences"),
    fixture!("binary_limit_non_extensional"),
    fixture!("nearly_maximal_point_approx"),
    fixture!("nearly_maximal_point_given_modulus"),
    fixture!("derivative_of_integral_standard"),
];

fn settings(name: &str) -> (Role, Vec<Binder>, Expectation) {
    match name {
        "uniform_continuity_approx" => (Role::Hypothesis, Vec::new(), Expectation::NormalForm),
        "riemann_sums_given_modulus" => (
            Role::Claim,
            vec![Binder::mono("g", FinType::one())],
            Expectation::NormalForm,
        ),
        "binary_limit_non_extensional" => (Role::Claim, Vec::new(), Expectation::Stuck),
        _ => (Role::Claim, Vec::new(), Expectation::NormalForm),
    }
}

fn make(name: &str, source: String) -> Fixture {
    let (role, params, expect) = settings(name);
    Fixture {
        name: name.to_string(),
        source,
        role,
        params,
        expect,
    }
}

/// The fixtures compiled into the crate.
pub fn embedded() -> Vec<Fixture> {
    EMBEDDED.iter().map(|(n, s, _)| make(n, s.to_string())).collect()
}

pub fn get(name: &str) -> Option<Fixture> {
    embedded().into_iter().find(|f| f.name == name)
}

/// Every `*.nsa` file in `dir`, sorted by name. Known names keep their
/// role and parameters.
pub fn load_dir(dir: &Path) -> Result<Vec<Fixture>, FixtureError> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("nsa") {
            continue;
        }
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        out.push(make(&name, std::fs::read_to_string(&path)?));
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// Input, raw interpretation and its monotone simplification, one per line.
pub fn ust_transcript(source: &str) -> Result<String, FixtureError> {
    let doc = parse_document(source, &Signature::empty())?;
    let raw = interpret(&doc.formula, &doc.signature)?;
    let simple = simplify_monotone(&raw);
    Ok(format!(
        "input {}\nraw {}\nsimplified {}\n",
        doc.formula,
        raw.render(),
        simple.result.render()
    ))
}

/// A fixture paired with its expected transcript.
#[derive(Clone, Debug)]
pub struct GoldenCase {
    pub category: Category,
    pub name: String,
    pub source: String,
    pub expected: Option<String>,
}

impl GoldenCase {
    pub fn transcript(&self, strategy: &Strategy) -> Result<String, FixtureError> {
        match self.category {
            Category::Pipeline => make(&self.name, self.source.clone()).transcript(strategy),
            Category::Ust => ust_transcript(&self.source),
        }
    }

    /// `None` when the transcript matches, otherwise a description of the
    /// first differing line.
    pub fn check(&self, strategy: &Strategy) -> Result<Option<String>, FixtureError> {
        let got = self.transcript(strategy)?;
        Ok(match &self.expected {
            None => Some("no golden transcript".into()),
            Some(want) => first_difference(want, &got),
        })
    }

    pub fn selected(&self, only: Option<&str>) -> bool {
        only.map_or(true, |o| o == self.category.name() || o == self.name)
    }
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let case = |category, (name, source, golden): &(&str, &str, &str)| GoldenCase {
        category,
        name: name.to_string(),
        source: source.to_string(),
        expected: Some(golden.to_string()),
    };
    let mut out: Vec<GoldenCase> = EMBEDDED.iter().map(|e| case(Category::Pipeline, e)).collect();
    out.extend(EMBEDDED_UST.iter().map(|e| case(Category::Ust, e)));
    out
}

/// Fixtures under `dir` (pipeline) and `dir/ust`, with goldens under
/// `dir/golden` as `NAME.trace` and `dir/golden/ust` as `NAME.ust`.
pub fn golden_cases_in(dir: &Path) -> Result<Vec<GoldenCase>, FixtureError> {
    let mut out = Vec::new();
    for (category, sub, ext) in [(Category::Pipeline, "", "trace"), (Category::Ust, "ust", "ust")] {
        let fdir = dir.join(sub);
        if !fdir.is_dir() {
            continue;
        }
        for fx in load_dir(&fdir)? {
            let golden = dir.join("golden").join(sub).join(format!("{}.{}", fx.name, ext));
            out.push(GoldenCase {
                category,
                expected: std::fs::read_to_string(golden).ok(),
                name: fx.name,
                source: fx.source,
            });
        }
    }
    Ok(out)
}

/// Path of the golden transcript for `case` under a fixture directory.
pub fn golden_path(dir: &Path, case: &GoldenCase) -> std::path::PathBuf {
    match case.category {
        Category::Pipeline => dir.join("golden").join(format!("{}.trace", case.name)),
        Category::Ust => dir.join("golden/ust").join(format!("{}.ust", case.name)),
    }
}

pub fn first_difference(want: &str, got: &str) -> Option<String> {
    if want == got {
        return None;
    }
    let (w, g): (Vec<&str>, Vec<&str>) = (want.lines().collect(), got.lines().collect());
    let i = w.iter().zip(&g).position(|(a, b)| a != b).unwrap_or(w.len().min(g.len()));
    Some(format!(
        "line {}:\n- {}\n+ {}",
        i + 1,
        w.get(i).copied().unwrap_or("<end of golden>"),
        g.get(i).copied().unwrap_or("<end of output>")
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_goldens_reproduce() {
        for case in golden_cases() {
            assert_eq!(case.check(&Strategy::default()).unwrap(), None, "{}", case.name);
        }
    }

    #[test]
    fn directory_matches_embedded() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        let found = golden_cases_in(&dir).unwrap();
        assert_eq!(found.len(), golden_cases().len());
        assert!(found.iter().all(|c| c.expected.is_some()));
    }

    #[test]
    fn differences_name_the_line() {
        assert_eq!(first_difference("a\nb\n", "a\nb\n"), None);
        let d = first_difference("a\nb\n", "a\nc\n").unwrap();
        assert!(d.starts_with("line 2"), "{}", d);
        assert!(first_difference("a\n", "a\nb\n").unwrap().contains("<end of golden>"));
    }

    #[test]
    fn selection_by_category_or_name() {
        let cases = golden_cases();
        let ust = cases.iter().filter(|c| c.selected(Some("ust"))).count();
        assert_eq!(ust, 7);
        assert_eq!(cases.iter().filter(|c| c.selected(Some("standard_number"))).count(), 1);
        assert_eq!(cases.iter().filter(|c| c.selected(None)).count(), cases.len());
    }
}
