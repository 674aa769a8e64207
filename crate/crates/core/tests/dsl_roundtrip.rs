mod common;

use mzwigner::dsl::{format, lower, parse};
use mzwigner::optics;
use mzwigner::qstate::EXACT_TOL;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parse_inverts_format(c in common::circuit()) {
        let text = format(&c);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(format(&back), text);
    }

    #[test]
    fn crlf_and_comments_do_not_matter(c in common::circuit()) {
        let text = format(&c);
        let noisy: String = text
            .lines()
            .map(|l| format!("  {l}   # note\r\n\r\n"))
            .collect();
        prop_assert_eq!(parse(&noisy).unwrap(), c);
    }

    #[test]
    fn lowering_is_unitary_and_valid(c in common::circuit()) {
        let l = lower(&c);
        for op in &l.operators {
            prop_assert!(op.is_unitary(EXACT_TOL));
        }
        prop_assert!(l.basis.gram_defect() < 1e-9);
        if !l.operators.is_empty() {
            prop_assert!(optics::compose(&l.operators).unwrap().is_unitary(EXACT_TOL));
        }
    }

    #[test]
    fn errors_point_inside_the_input(text in "[a-z0-9=/ .\n#-]{0,80}") {
        if let Err(e) = parse(&text) {
            let lines: Vec<&str> = text.split('\n').collect();
            prop_assert!(e.line >= 1 && e.line <= lines.len().max(1));
            let len = lines.get(e.line - 1).map_or(0, |l| l.chars().count());
            prop_assert!(e.column >= 1 && e.column <= len.max(1));
        }
    }
}

#[test]
fn rational_literals_survive_formatting() {
    let c = parse("source pol=D path=r shape=2\nbs T=1/3\nmeasure hv-path\n").unwrap();
    assert!(format(&c).contains("bs T=1/3\n"));
}
