mod common;

use std::sync::OnceLock;

use cohpres::constructions::equational_paths;
use cohpres::core::*;
use cohpres::objects::all_words;
use cohpres::oracle::{exchange_equal, paths_up_to, tile_oracle_residual, tile_oracle_residuals};
use cohpres::residuation::*;
use common::*;
use proptest::prelude::*;
use proptest::sample::Index;

struct Fixture {
    p: Presentation,
    table: ResidualTable,
    /// Coinitial pairs `(g, f)` with `f` equational, both of length at most 3.
    pairs: Vec<(Path, Path)>,
}

fn ds2() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let p = load("ds2.cp");
        let table = derive_residual_table(&p);
        let mut pairs = Vec::new();
        for w in all_words(&p, 4) {
            let fs = equational_paths(&p, &w, 3, 10_000);
            for g in paths_up_to(&p, &w, 3, 10_000).unwrap() {
                for f in &fs {
                    pairs.push((g.clone(), f.clone()));
                }
            }
        }
        Fixture { p, table, pairs }
    })
}

#[test]
fn table_has_the_two_overlaps() {
    let Fixture { p, table, .. } = ds2();
    assert_eq!(table.entries.len(), 2);
    assert!(table.clashes.is_empty());
    let e = table.get(&parse_step(p, "[g]a").unwrap(), &parse_step(p, "b[m]").unwrap()).unwrap();
    assert_eq!(p.show_path(&e.g_after_f), "a[g] ; [m]b");
    assert_eq!(p.show_path(&e.f_after_g), "[g]");
    assert_eq!(p.rels[e.relation].name, "gamma");
}

#[test]
fn disjoint_steps_residuate_by_exchange() {
    let Fixture { p, table, .. } = ds2();
    let (g_f, f_g) = step_residual(p, table, &parse_step(p, "[g]aa").unwrap(), &parse_step(p, "ba[m]").unwrap()).unwrap();
    assert_eq!(p.show_path(&g_f), "ab[m]");
    assert_eq!(p.show_path(&f_g), "[g]a");
}

#[test]
fn non_equational_residuation_is_refused() {
    let Fixture { p, table, .. } = ds2();
    let f = path(p, "[m]a");
    let g = path(p, "a[m]");
    assert!(matches!(path_residual(p, table, &g, &f), Err(ResidualError::NotEquational { .. })));
    let g = path(p, "[g]a");
    let h = path(p, "[m]");
    assert!(matches!(path_residual(p, table, &h, &g), Err(ResidualError::NotCoinitial { .. })));
}

#[test]
fn witness_trace_closes_the_square() {
    let Fixture { p, table, .. } = ds2();
    let bga = path(p, "b[g]a");
    let f = path(p, "[n]aa ; b[m]");
    let w = residual_witness(p, table, &bga, &f).unwrap();
    w.trace.validate(p).unwrap();
    assert_eq!(w.trace.source, w.left);
    assert_eq!(w.trace.target(p).unwrap(), w.right);
}

#[test]
fn residuals_of_exchange_equal_paths_are_exchange_equal() {
    let p = load("ds2op.cp");
    let table = derive_residual_table(&p);
    let mut r = Residuator::new(&p, &table);
    let mut checked = 0;
    for w in all_words(&p, 3) {
        let gs = paths_up_to(&p, &w, 3, 10_000).unwrap();
        let fs = equational_paths(&p, &w, 1, 1_000);
        for g in &gs {
            for g2 in gs.iter().filter(|g2| exchange_equal(&p, g, g2)) {
                for f in &fs {
                    let (Ok(a), Ok(b)) = (r.path_residual(g, f), r.path_residual(g2, f)) else { continue };
                    assert!(exchange_equal(&p, &a, &b), "{} vs {} after {}", p.show_path(g), p.show_path(g2), p.show_path(f));
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn unit_and_pasting_laws_on_the_whole_fragment() {
    let n = residual_laws(&ds2().p, 4, 3).unwrap();
    assert!(n > 100, "{n}");
}

#[test]
fn tile_oracle_reproduces_single_step_residuals() {
    let Fixture { p, table, .. } = ds2();
    for e in &table.entries {
        let (g, f) = (Path::single(p, e.g.clone()), Path::single(p, e.f.clone()));
        assert_eq!(tile_oracle_residual(p, &g, &f, 3), Some(e.g_after_f.clone()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn redex_order_does_not_matter(i: Index, picks in prop::collection::vec(any::<usize>(), 64)) {
        let Fixture { p, table, pairs } = ds2();
        let (g, f) = i.get(pairs);
        let mut r = Residuator::new(p, table);
        let expected = r.residuals(g, f).unwrap();
        let mut k = 0;
        let got = r.residuals_with(g, f, |redexes| {
            k += 1;
            picks[k % picks.len()] % redexes.len()
        }).unwrap();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn residual_square_is_well_typed(i: Index) {
        let Fixture { p, table, pairs } = ds2();
        let (g, f) = i.get(pairs);
        let mut r = Residuator::new(p, table);
        let (g_f, f_g) = r.residuals(g, f).unwrap();
        p.check_path(&g_f).unwrap();
        p.check_path(&f_g).unwrap();
        prop_assert_eq!(&g_f.source, &f.target(p));
        prop_assert_eq!(&f_g.source, &g.target(p));
        prop_assert_eq!(g_f.target(p), f_g.target(p));
        prop_assert!(p.is_equational_path(&f_g));
    }

    #[test]
    fn agrees_with_the_tile_oracle(i: Index) {
        let Fixture { p, table, pairs } = ds2();
        let (g, f) = i.get(pairs);
        prop_assume!(g.len() + f.len() <= 4);
        let got = path_residual(p, table, g, f).unwrap();
        let all = tile_oracle_residuals(p, g, f, 6);
        prop_assert!(all.iter().any(|(fwd, _)| *fwd == got.steps), "{} / {} = {}", p.show_path(g), p.show_path(f), p.show_path(&got));
    }
}
