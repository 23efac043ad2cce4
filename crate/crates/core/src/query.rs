//! Search-query formulation: an exception name plus the most active API
//! class of the context code, e.g. `IOException URL`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{simple_name, SourceUnit};

const BUNDLED_KB: &str = include_str!("../data/exceptions.tsv");

/// Catch types too general to say anything about the failure.
const GENERIC: &[&str] = &["Exception", "Throwable", "java.lang.Exception", "java.lang.Throwable"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub exception_name: String,
    pub dominant_class: String,
    pub rendered: String,
}

impl SearchQuery {
    pub fn new(exception_name: impl Into<String>, dominant_class: impl Into<String>) -> Self {
        let exception_name = exception_name.into();
        let dominant_class = dominant_class.into();
        let rendered = format!("{exception_name} {dominant_class}");
        Self {
            exception_name,
            dominant_class,
            rendered,
        }
    }
}

impl std::fmt::Display for SearchQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.rendered)
    }
}

/// Checked exceptions per `(type, method)`; `<init>` names a constructor.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionKnowledgeBase {
    pub entries: BTreeMap<(String, String), Vec<String>>,
}

impl ExceptionKnowledgeBase {
    /// The knowledge base shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_KB).expect("bundled knowledge base is well formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parse TSV lines `type<TAB>method<TAB>Ex1,Ex2`. Blank lines and lines
    /// starting with `#` are ignored; a repeated key extends the entry.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kb = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| Error::KnowledgeBase {
                line: i + 1,
                reason: reason.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [ty, method, excs] = cols[..] else {
                return Err(err("expected three tab-separated columns"));
            };
            if ty.is_empty() || method.is_empty() {
                return Err(err("empty type or method"));
            }
            let list = kb.entries.entry((ty.to_string(), method.to_string())).or_default();
            for e in excs.split(',').map(str::trim) {
                if e.is_empty() {
                    return Err(err("empty exception name"));
                }
                if !list.iter().any(|x| x == e) {
                    list.push(e.to_string());
                }
            }
        }
        Ok(kb)
    }

    pub fn exceptions(&self, type_name: &str, method: &str) -> &[String] {
        self.entries
            .get(&(type_name.to_string(), method.to_string()))
            .map_or(&[], Vec::as_slice)
    }

    pub fn knows(&self, exception: &str) -> bool {
        self.entries.values().flatten().any(|e| e == exception)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Simple name of the type with the most method invocations plus field
/// accesses, summed over its objects. Ties go to the earliest used type.
pub fn dominant_api_class(unit: &SourceUnit) -> Result<String> {
    let mut totals: Vec<(&str, usize)> = Vec::new();
    for o in &unit.objects {
        let activity = o.methods_invoked.values().sum::<usize>() + o.field_access_count();
        let name = simple_name(&o.type_name);
        match totals.iter_mut().find(|(t, _)| *t == name) {
            Some(entry) => entry.1 += activity,
            None => totals.push((name, activity)),
        }
    }
    totals
        .iter()
        .fold(None::<(&str, usize)>, |best, &(t, n)| match best {
            Some((_, m)) if m >= n => best,
            _ => Some((t, n)),
        })
        .map(|(t, _)| t.to_string())
        .ok_or(Error::NoApiObjects)
}

fn is_plausible_exception(name: &str, kb: &ExceptionKnowledgeBase) -> bool {
    name.ends_with("Exception") || name.ends_with("Error") || kb.knows(name)
}

pub fn select_exception(
    unit: &SourceUnit,
    kb: &ExceptionKnowledgeBase,
    explicit: Option<&str>,
) -> Result<String> {
    if let Some(e) = explicit {
        let e = e.trim();
        if e.is_empty() || !is_plausible_exception(e, kb) {
            return Err(Error::InvalidInput(format!("not an exception type: {e:?}")));
        }
        return Ok(e.to_string());
    }

    let handlers = unit.handler_summary();
    let caught: Vec<&str> = handlers
        .catch_clauses
        .iter()
        .flat_map(|c| c.exception_types.iter().map(String::as_str))
        .filter(|t| !GENERIC.contains(t))
        .collect();
    if let Some(first) = caught.first() {
        if caught.len() > 1 {
            log::info!("context catches {caught:?}; using {first}");
        }
        return Ok(simple_name(first).to_string());
    }

    let mut pairs = BTreeSet::new();
    for o in &unit.objects {
        for m in o.invocations().keys() {
            pairs.insert((simple_name(&o.type_name).to_string(), m.clone()));
        }
    }
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for (ty, m) in &pairs {
        for e in kb.exceptions(ty, m) {
            *tally.entry(e).or_default() += 1;
        }
    }
    // BTreeMap iterates alphabetically, so the first maximum wins ties
    tally
        .iter()
        .fold(None::<(&str, usize)>, |best, (&e, &n)| match best {
            Some((_, m)) if m >= n => best,
            _ => Some((e, n)),
        })
        .map(|(e, _)| e.to_string())
        .ok_or(Error::UnknownException)
}

pub fn formulate_query(
    unit: &SourceUnit,
    kb: &ExceptionKnowledgeBase,
    explicit: Option<&str>,
) -> Result<SearchQuery> {
    let class = dominant_api_class(unit)?;
    let exception = select_exception(unit, kb, explicit)?;
    Ok(SearchQuery::new(exception, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    #[test]
    fn bundled_kb_loads() {
        let kb = ExceptionKnowledgeBase::bundled();
        assert!(kb.len() >= 40);
        assert_eq!(kb.exceptions("URL", "openConnection"), ["IOException"]);
        assert!(kb.exceptions("URL", "nothing").is_empty());
        assert!(kb.knows("SQLException"));
    }

    #[test]
    fn kb_errors_carry_line() {
        let err = ExceptionKnowledgeBase::parse("# c\nURL\topen\n").unwrap_err();
        assert!(matches!(err, Error::KnowledgeBase { line: 2, .. }));
        assert!(ExceptionKnowledgeBase::parse("A\tf\tX,,Y").is_err());
    }

    #[test]
    fn kb_is_case_sensitive() {
        let kb = ExceptionKnowledgeBase::parse("A\tf\tX").unwrap();
        assert!(kb.exceptions("a", "f").is_empty());
    }

    #[test]
    fn dominant_class_counts_fields_and_methods() {
        let u = parse("void m(A a, B b) { a.f(); a.g(); a.h(); b.f(); b.g(); u(b.x); u(b.y); }");
        assert_eq!(dominant_api_class(&u).unwrap(), "B");
        let single = parse("void m(Reader r) { r.read(); }");
        assert_eq!(dominant_api_class(&single).unwrap(), "Reader");
    }

    #[test]
    fn dominant_class_tie_goes_to_first() {
        let u = parse("void m(A a, B b) { b.f(); a.f(); }");
        assert_eq!(dominant_api_class(&u).unwrap(), "A");
    }

    #[test]
    fn no_objects() {
        assert!(matches!(dominant_api_class(&parse("int x = 1;")), Err(Error::NoApiObjects)));
        assert!(matches!(
            formulate_query(&parse("int x = 1;"), &ExceptionKnowledgeBase::bundled(), None),
            Err(Error::NoApiObjects)
        ));
    }

    #[test]
    fn tally_prefers_most_frequent() {
        let kb = ExceptionKnowledgeBase::parse("A\tf\tX\nA\tg\tX,Y\n").unwrap();
        let u = parse("void m(A a) { a.f(); a.g(); }");
        assert_eq!(select_exception(&u, &kb, None).unwrap(), "X");
    }

    #[test]
    fn tally_ties_alphabetical() {
        let kb = ExceptionKnowledgeBase::parse("A\tf\tZebraException\nA\tg\tAlphaException\n").unwrap();
        let u = parse("void m(A a) { a.f(); a.g(); }");
        assert_eq!(select_exception(&u, &kb, None).unwrap(), "AlphaException");
    }

    #[test]
    fn specific_catch_wins_over_tally() {
        let kb = ExceptionKnowledgeBase::bundled();
        let u = parse("try { URL u = new URL(s); u.openStream(); } catch (MalformedURLException e) { } catch (IOException e) { }");
        assert_eq!(select_exception(&u, &kb, None).unwrap(), "MalformedURLException");
    }

    #[test]
    fn explicit_wins() {
        let kb = ExceptionKnowledgeBase::bundled();
        let u = parse("void m(FileReader r) { r.read(); }");
        let q = formulate_query(&u, &kb, Some("FileNotFoundException")).unwrap();
        assert_eq!(q.rendered, "FileNotFoundException FileReader");
        assert!(select_exception(&u, &kb, Some("banana")).is_err());
    }

    #[test]
    fn unknown_without_kb_entries() {
        let u = parse("void m(A a) { a.f(); }");
        assert!(matches!(
            select_exception(&u, &ExceptionKnowledgeBase::default(), None),
            Err(Error::UnknownException)
        ));
    }
}
