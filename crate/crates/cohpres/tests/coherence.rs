mod common;

use cohpres::coherence::*;
use cohpres::core::search::SearchLimits;
use cohpres::core::*;
use common::*;
use proptest::prelude::*;

fn with_text(name: &str, edit: impl Fn(String) -> String) -> Presentation {
    let src = std::fs::read_to_string(corpus_path(name)).unwrap();
    parse_presentation(&edit(src)).unwrap()
}

/// Drops every weight block.
fn strip_weights(src: String) -> String {
    let mut out = String::new();
    let mut skipping = false;
    for line in src.lines() {
        if line.starts_with("weight ") {
            skipping = true;
        }
        if !skipping {
            out.push_str(line);
            out.push('\n');
        }
        if skipping && line.trim() == "}" {
            skipping = false;
        }
    }
    out
}

#[test]
fn ds2_passes_everything_strictly() {
    let r = check_all(&load("ds2.cp"), CheckOptions::default());
    assert_eq!(r.coherent, Status::Pass);
    assert!(r.assumptions.a3x.is_none());
    assert_eq!(r.critical_pairs.len(), 2);
    assert_eq!(r.cylinders.len(), 3);
    assert!(r.cylinders.iter().all(|c| c.residual_targets_equal == Some(cohpres::critical::TargetsEqual::Equal) && c.top_trace.is_some()));
    // The opposite fails A4 without the strong exemption.
    assert_eq!(r.faithful_embedding, Status::Inconclusive);
    let strong = check_all(&load("ds2.cp"), CheckOptions { strong: true, ..CheckOptions::default() });
    assert_eq!(strong.faithful_embedding, Status::Pass);
}

#[test]
fn zero_termination_weight_fails_a2() {
    let p = with_text("ds2.cp", |s| {
        s.replace("m -> (countL(b), ctx_transp(b,a))", "m -> (0, 0)")
            .replace("n -> (countR(a), ctx_transp(b,a))", "n -> (0, 0)")
            .replace("g -> (0, ctx_transp(b,a))", "g -> (0, 0)")
    });
    let a = Analysis::new(&p, SearchLimits::default());
    let v = check_a2(&a, p.weights.own.omega1.as_ref());
    assert!(v.is_fail());
    assert!(v.witnesses[0].starts_with("ω₁(b[m]) = (0,0) ≯ (0,0)"), "{}", v.witnesses[0]);
}

#[test]
fn exchange_residuals_lose_a_transposition() {
    let p = load("ds2.cp");
    let spec = p.weights.own.omega1.as_ref().unwrap();
    let before = eval_path(spec, &p, &path(&p, "ba[m]")).unwrap();
    let after = eval_path(spec, &p, &path(&p, "ab[m]")).unwrap();
    assert!(less(spec.order, &after, &before));
}

#[test]
fn missing_weights_are_inconclusive() {
    let p = with_text("ds2.cp", strip_weights);
    let r = check_all(&p, CheckOptions::default());
    assert!(r.assumptions.a1.is_pass());
    assert_eq!(r.assumptions.a2.verdict, Status::Inconclusive);
    assert_eq!(r.assumptions.a4.verdict, Status::Inconclusive);
    assert_eq!(r.coherent, Status::Inconclusive);
}

#[test]
fn ds2op_needs_the_exchange_variant() {
    let p = load("ds2op.cp");
    let a = Analysis::new(&p, SearchLimits::default());
    let a1 = check_a1(&a, 10_000);
    assert!(a1.is_pass());
    let strict = check_a3(&a, A3Mode::Strict, &a1);
    assert!(strict.is_fail());
    assert!(strict.witnesses[0].contains("χ(m,n)"), "{}", strict.witnesses[0]);
    assert!(check_a3(&a, A3Mode::UpToExchange, &a1).is_pass());

    let weak = check_all(&p, CheckOptions::default());
    assert_eq!(weak.coherent, Status::Fail);
    assert_eq!(weak.assumptions.a4.witnesses[0], "ω₂(ab·χ(g,g)) = (0,1) ≯ (0,2) = ω₂(aab·χ(g,g)) after [m]babab");
    let strong = check_all(&p, CheckOptions { strong: true, ..CheckOptions::default() });
    assert_eq!(strong.coherent, Status::Pass);
    assert_eq!(strong.faithful_embedding, Status::Pass);
}

#[test]
fn no_fallback_means_strict_failure() {
    let p = load("ds2op.cp");
    let r = check_all(&p, CheckOptions { strong: true, fallback_a3x: false, ..CheckOptions::default() });
    assert!(r.assumptions.a3x.is_none());
    assert_eq!(r.coherent, Status::Fail);
}

#[test]
fn huet_fails_termination() {
    let r = check_all(&load("huet.cp"), CheckOptions::default());
    assert_eq!(r.assumptions.a1.witnesses, vec!["termination cycle [x, y, x]".to_string()]);
    assert_eq!(r.coherent, Status::Fail);
}

#[test]
fn deltas_passes_vacuously() {
    let r = check_all(&load("deltas.cp"), CheckOptions::default());
    assert_eq!(r.coherent, Status::Pass);
    assert!(r.critical_pairs.is_empty() && r.cylinders.is_empty());
}

#[test]
fn report_shape() {
    let r = check_all(&load("ds2.cp"), CheckOptions::default());
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["mode", "assumptions", "criticalPairs", "cylinders", "coherent", "faithfulEmbedding"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["assumptions"]["a1"]["verdict"], "pass");
    assert_eq!(v["coherent"], "pass");
}

#[test]
fn reports_are_deterministic() {
    report_determinism(&["ds2.cp", "ds2op.cp", "huet.cp", "deltas.cp"]).unwrap();
}

fn tuple() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..5, 3)
}

fn add(x: &[u64], y: &[u64]) -> Vec<u64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

proptest! {
    #[test]
    fn orders_are_compatible_with_addition(x in tuple(), y in tuple(), z in tuple()) {
        for order in [Order::Lex, Order::Pointwise] {
            prop_assert!(!less(order, &x, &x));
            if less(order, &x, &y) {
                prop_assert!(!less(order, &y, &x));
                prop_assert!(less(order, &add(&x, &z), &add(&y, &z)));
                if less(order, &y, &z) {
                    prop_assert!(less(order, &x, &z));
                }
            }
        }
        if less(Order::Pointwise, &x, &y) {
            prop_assert!(less(Order::Lex, &x, &y));
        }
        prop_assert!(x == y || less(Order::Lex, &x, &y) || less(Order::Lex, &y, &x));
    }
}
