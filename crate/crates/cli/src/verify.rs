use mzwigner::checks::{check_name, CheckOutcome, CheckRegistry};
use mzwigner::scenario::{ContextId, PropertyId, Scope};

/// Which checks `verify` runs.
#[derive(Debug, Default)]
pub struct Selection {
    pub all: bool,
    pub property: Option<PropertyId>,
    pub scope: Option<Scope>,
    pub commutators: bool,
    pub memory_equivalence: bool,
    pub names: Vec<String>,
}

pub fn parse_scope(s: &str) -> Result<Scope, String> {
    match s {
        "pre-wigner" | "pre" | "0" => Ok(Scope::PreWigner),
        other => other.parse::<ContextId>().map(Scope::Context).map_err(|_| {
            format!("unknown context `{other}` (expected 1, 2 or pre-wigner)")
        }),
    }
}

/// Resolves the selection to check names; `Err` carries an unknown name.
pub fn resolve(sel: &Selection, reg: &CheckRegistry) -> Result<Vec<String>, String> {
    if sel.all {
        return Ok(reg.names().map(str::to_string).collect());
    }
    let mut names = Vec::new();
    if let Some(p) = sel.property {
        match sel.scope {
            Some(scope) => names.push(check_name(p, scope)),
            None => {
                for scope in [
                    Scope::PreWigner,
                    Scope::Context(ContextId::One),
                    Scope::Context(ContextId::Two),
                ] {
                    names.push(check_name(p, scope));
                }
            }
        }
    }
    if sel.commutators {
        names.push("commutators".into());
    }
    if sel.memory_equivalence {
        names.push("memory-equivalence".into());
    }
    names.extend(sel.names.iter().cloned());
    if let Some(bad) = names.iter().find(|n| reg.get(n).is_none()) {
        return Err(bad.clone());
    }
    let mut seen = std::collections::HashSet::new();
    names.retain(|n| seen.insert(n.clone()));
    Ok(names)
}

pub fn run(names: &[String], reg: &CheckRegistry) -> Vec<CheckOutcome> {
    names
        .iter()
        .map(|n| reg.get(n).expect("resolved names exist").run())
        .collect()
}

pub fn render_lines(outcomes: &[CheckOutcome]) -> String {
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for o in outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{verdict}  {:width$}  expected {}; observed {}\n",
            o.name, o.expected, o.observed
        ));
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
    out
}
