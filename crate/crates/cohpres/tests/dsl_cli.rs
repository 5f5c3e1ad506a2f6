mod common;

use std::process::{Command, Output};

use cohpres::constructions::{localize_equational, opposite};
use cohpres::core::*;
use common::*;
use proptest::prelude::*;

const ALL: [&str; 4] = ["ds2.cp", "ds2op.cp", "huet.cp", "deltas.cp"];

fn cohpres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohpres")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn printing_round_trips() {
    for name in ALL {
        let p = load(name);
        assert_eq!(parse_presentation(&print_presentation(&p)).unwrap(), p, "{name}");
        let q = localize_equational(&opposite(&p));
        assert_eq!(parse_presentation(&print_presentation(&q)).unwrap(), q, "{name}");
    }
}

#[test]
fn malformed_documents_are_rejected() {
    for (text, what) in [
        ("mode path\nobjects x\ngen f : x -> z\n", "unknown object"),
        ("mode path\nobjects x\ngen f : x -> x\ngen f : x -> x\n", "duplicate"),
        ("mode monoidal\nobjects a\ngen m : a a -> a\nrel r : [m] => a\n", "not a path"),
        ("mode path\nobjects x y\ngen f : x -> y\nrel r : [f] => id x\n", "not parallel"),
        ("mode sideways\n", "mode"),
    ] {
        assert!(parse_presentation(text).is_err(), "{what}");
    }
}

#[test]
fn check_exit_codes_and_witnesses() {
    let ds2 = corpus_path("ds2.cp");
    let o = cohpres(&["check", &ds2]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("coherent: PASS"));

    let op = corpus_path("ds2op.cp");
    let o = cohpres(&["check", &op]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("WITNESS: A4: ω₂(ab·χ(g,g)) = (0,1) ≯ (0,2) = ω₂(aab·χ(g,g)) after [m]babab"));
    let o = cohpres(&["check", &op, "--strong"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("A3′: PASS"));

    let o = cohpres(&["check", &corpus_path("huet.cp"), "--assumption", "a1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "A1: FAIL\nWITNESS: A1: termination cycle [x, y, x]\n");

    assert_eq!(cohpres(&["check", "/nonexistent.cp"]).status.code(), Some(2));
    assert_eq!(cohpres(&["check", &ds2, "--assumption", "a9"]).status.code(), Some(2));
    assert_eq!(cohpres(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn check_writes_a_json_report() {
    let dir = std::env::temp_dir().join(format!("cohpres-report-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("ds2.json");
    let o = cohpres(&["check", &corpus_path("ds2.cp"), "--report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["coherent"], "pass");
    assert_eq!(v["criticalPairs"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    for name in ALL {
        let path = corpus_path(name);
        assert_eq!(cohpres(&["check", &path]).stdout, cohpres(&["check", &path]).stdout, "{name}");
        assert_eq!(cohpres(&["critical", &path]).stdout, cohpres(&["critical", &path]).stdout, "{name}");
    }
}

#[test]
fn computation_commands() {
    let ds2 = corpus_path("ds2.cp");
    let o = cohpres(&["nf", &ds2, "babbaa"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("aaabbb"));

    let o = cohpres(&["residual", &ds2, "b[m]", "[g]a"]);
    assert_eq!(stdout(&o), "g/f = a[g] ; [m]b\nf/g = [g]\n");
    assert_eq!(cohpres(&["residual", &ds2, "b[m]", "[g]"]).status.code(), Some(1));
    assert_eq!(cohpres(&["residual", &ds2, "b[q]", "[g]a"]).status.code(), Some(2));

    let o = cohpres(&["critical", &ds2, "--pairs"]);
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = cohpres(&["enumerate", &ds2, "aaa", "aa", "--max-steps", "3"]);
    assert!(stdout(&o).starts_with("2 classes\n"));

    let o = cohpres(&["compare", &ds2, "--max-word", "4", "--max-steps", "5", "--oracle", "ds2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("hom(aaab, aab): normal forms 2, surjections 2"));
    let o = cohpres(&["compare", &corpus_path("huet.cp"), "--max-steps", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("WITNESS: hom(x, x): quotient has 1 classes"));

    let o = cohpres(&["fractions", &ds2, "--equal", "[g]", "[g]", "id ba", "id ba"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("equal"));
    let o = cohpres(&["fractions", &ds2, "--compose", "[g]", "id ab", "id ab", "[g]"]);
    assert_eq!(stdout(&o), "([g], [g])\n");
    let o = cohpres(&["fractions", &corpus_path("huet.cp"), "--equal", "[g] ; [g']", "id x", "id x", "id x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unequal at budget 8"));
}

#[test]
fn tietze_script_round_trip() {
    let dir = std::env::temp_dir().join(format!("cohpres-tietze-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let script = dir.join("s.tz");
    let out = dir.join("out.cp");
    std::fs::write(&script, "addgen h : aaa -> a := [m]a ; [m]\n").unwrap();
    let deltas = corpus_path("deltas.cp");
    let o = cohpres(&["tietze", &deltas, "--script", script.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let q = parse_presentation(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(q.gen_id("h").is_some());

    std::fs::write(&script, "rmrel alpha\n").unwrap();
    let o = cohpres(&["tietze", &deltas, "--script", script.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("WITNESS: "));
    std::fs::remove_dir_all(&dir).unwrap();
}

proptest! {
    #[test]
    fn words_and_paths_print_and_parse(w in prop::collection::vec(0u16..2, 1..7), picks in prop::collection::vec(any::<usize>(), 0..4)) {
        let p = load("ds2.cp");
        prop_assert_eq!(parse_word(&p, &p.show_word(&w)).unwrap(), w.clone());
        let mut q = Path::id(w);
        for k in picks {
            let steps = p.steps_from(&q.target(&p));
            if steps.is_empty() {
                break;
            }
            q.steps.push(steps[k % steps.len()].clone());
        }
        prop_assert_eq!(parse_path(&p, &p.show_path(&q)).unwrap(), q);
    }
}
