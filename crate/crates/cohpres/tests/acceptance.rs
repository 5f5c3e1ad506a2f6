mod common;

use std::time::{Duration, Instant};

use cohpres::coherence::{check_all, eval_path, less, show_tuple, CheckOptions, Status};
use cohpres::core::search::SearchLimits;
use cohpres::critical::{enumerate_critical_cylinders, enumerate_critical_pairs};
use cohpres::objects::transposition_number;
use cohpres::oracle::{compare_constructions, ds2_shape, tile_oracle_residual};
use cohpres::residuation::{derive_residual_table, Residuator};

use common::*;

const CRITICAL_BUDGET: Duration = Duration::from_secs(10);
const SUITE_BUDGET: Duration = Duration::from_secs(60);
const FRACTION_PAIRS: usize = 20;

type Outcome = Result<String, String>;
type Suite<'a> = (&'static str, Box<dyn Fn() -> Result<usize, String> + 'a>);
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn residual_table() -> Outcome {
    let p = load("ds2.cp");
    let t = derive_residual_table(&p);
    let expected = [
        ("b[m]", "[g]a", "a[g] ; [m]b", "[g]"),
        ("[n]a", "b[g]", "[g]b ; a[n]", "[g]"),
    ];
    let mut r = Residuator::new(&p, &t);
    for (g, f, g_f, f_g) in expected {
        let (got_gf, got_fg) = r.residuals(&path(&p, g), &path(&p, f)).map_err(|e| e.to_string())?;
        let (got_gf, got_fg) = (p.show_path(&got_gf), p.show_path(&got_fg));
        ensure(got_gf == g_f, format!("{g}/{f} = {got_gf}, expected {g_f}"))?;
        ensure(got_fg == f_g, format!("{f}/{g} = {got_fg}, expected {f_g}"))?;
    }
    let shown: Vec<String> = t.entries.iter().map(|e| t.show_entry(&p, e)).collect();
    let table = [
        "[g]a vs b[m] on baa (gamma): g/f = a[g] ; [m]b, f/g = [g]",
        "b[g] vs [n]a on bba (delta): g/f = [g]b ; a[n], f/g = [g]",
    ];
    ensure(shown == table, format!("table entries {shown:?}"))?;
    Ok("4 equalities byte-exact".into())
}

fn path_residuals() -> Outcome {
    let p = load("ds2.cp");
    let t = derive_residual_table(&p);
    let mut r = Residuator::new(&p, &t);
    let bga = path(&p, "b[g]a");
    let f = path(&p, "[n]aa ; b[m]");
    let (f_bga, bga_f) = r.residuals(&f, &bga).map_err(|e| e.to_string())?;
    ensure(p.show_path(&f_bga) == "[g]ba ; a[n]a ; a[g] ; [m]b", format!("f/bga = {}", p.show_path(&f_bga)))?;
    ensure(p.show_path(&bga_f) == "[g]", format!("bga/f = {}", p.show_path(&bga_f)))?;
    let f2 = path(&p, "bb[m] ; [n]a");
    let oracle = tile_oracle_residual(&p, &f2, &bga, 5).ok_or("the tile oracle has no unique residual")?;
    let got = r.path_residual(&f2, &bga).map_err(|e| e.to_string())?;
    ensure(got == oracle, format!("f'/bga = {}, oracle {}", p.show_path(&got), p.show_path(&oracle)))?;
    Ok(format!("f'/bga = {} matches the tile oracle", p.show_path(&got)))
}

fn critical_counts() -> Outcome {
    let mut notes = Vec::new();
    for (name, pairs, cylinders) in [("ds2.cp", Some(2), 3), ("ds2op.cp", None, 1)] {
        let start = Instant::now();
        let p = load(name);
        let t = derive_residual_table(&p);
        let np = enumerate_critical_pairs(&p, &t).len();
        let nc = enumerate_critical_cylinders(&p).len();
        let took = start.elapsed();
        if let Some(want) = pairs {
            ensure(np == want, format!("{name}: {np} critical pairs, expected {want}"))?;
        }
        ensure(nc == cylinders, format!("{name}: {nc} cylinders, expected {cylinders}"))?;
        ensure(took < CRITICAL_BUDGET, format!("{name}: took {took:?}"))?;
        notes.push(format!("{name} {np} pairs/{nc} cylinders"));
    }
    Ok(notes.join(", "))
}

fn verdicts() -> Outcome {
    let ds2 = check_all(&load("ds2.cp"), CheckOptions::default());
    let a = &ds2.assumptions;
    ensure(
        a.a1.is_pass() && a.a2.is_pass() && a.a3.is_pass() && a.a3x.is_none() && a.a4.is_pass() && ds2.coherent == Status::Pass,
        "ds2 is not coherent with strict A3",
    )?;

    let op = load("ds2op.cp");
    let strong = check_all(&op, CheckOptions { strong: true, ..CheckOptions::default() });
    ensure(strong.assumptions.a3.is_fail(), "ds2op: strict A3 does not fail")?;
    ensure(
        strong.assumptions.a3.witnesses.iter().any(|w| w.contains("χ(m,n)")),
        "ds2op: strict A3 witness does not name χ(m,n)",
    )?;
    ensure(strong.assumptions.a3x.as_ref().is_some_and(|v| v.is_pass()), "ds2op: A3′ does not pass")?;
    ensure(strong.coherent == Status::Pass, "ds2op: not coherent in strong mode")?;
    let weak = check_all(&op, CheckOptions::default());
    let wanted = "ω₂(ab·χ(g,g)) = (0,1) ≯ (0,2) = ω₂(aab·χ(g,g)) after [m]babab";
    ensure(weak.assumptions.a4.is_fail(), "ds2op: non-strong A4 does not fail")?;
    ensure(weak.assumptions.a4.witnesses.iter().any(|w| w == wanted), "ds2op: non-strong A4 lacks the (0,1) ≯ (0,2) witness")?;

    let huet = check_all(&load("huet.cp"), CheckOptions::default());
    ensure(huet.assumptions.a1.is_fail(), "huet: A1 does not fail")?;
    ensure(
        huet.assumptions.a1.witnesses.iter().any(|w| w.contains("[x, y, x]")),
        "huet: A1 witness lacks the cycle [x, y, x]",
    )?;

    let deltas = check_all(&load("deltas.cp"), CheckOptions::default());
    ensure(deltas.coherent == Status::Pass && deltas.critical_pairs.is_empty() && deltas.cylinders.is_empty(), "deltas: not a vacuous pass")?;
    Ok("ds2 strict pass, ds2op A3′+strong pass with weak witness, huet cycle, deltas vacuous".into())
}

fn weights() -> Outcome {
    let p = load("ds2.cp");
    let (a, b) = (p.object_id("a").unwrap(), p.object_id("b").unwrap());
    let t = transposition_number(&word(&p, "babbaa"), b, a);
    ensure(t == 7, format!("transposition_number(babbaa) = {t}"))?;
    let spec = p.weights.own.omega1.as_ref().ok_or("ds2 has no ω₁")?;
    let before = eval_path(spec, &p, &path(&p, "b[m]")).map_err(|e| e.to_string())?;
    let after = eval_path(spec, &p, &path(&p, "a[g] ; [m]b")).map_err(|e| e.to_string())?;
    ensure(before == [1, 0] && after == [0, 0], format!("ω₁ values {} and {}", show_tuple(&before), show_tuple(&after)))?;
    ensure(less(spec.order, &after, &before), "ω₁ does not decrease")?;
    Ok("7; (1,0) > (0,0)".into())
}

fn comparison() -> Outcome {
    let p = load("ds2.cp");
    let t = derive_residual_table(&p);
    let c = compare_constructions(&p, &t, 4, 5, true, SearchLimits::default()).map_err(|e| e.to_string())?;
    let mut rows = 0;
    for r in &c.rows {
        let (s, d) = (word(&p, &r.source), word(&p, &r.target));
        let (Some((pp, q)), Some((rr, ss))) = (ds2_shape(&p, &s), ds2_shape(&p, &d)) else { continue };
        let want = brute_surjections(pp, rr) * brute_surjections(q, ss);
        ensure(r.normal_form == Some(want as usize), format!("hom({}, {}) = {:?}, surjections {want}", r.source, r.target, r.normal_form))?;
        rows += 1;
    }
    for (src, tgt, want) in [("aaa", "aa", 2), ("aabb", "ab", 1), ("aaab", "aab", 2)] {
        let row = c.rows.iter().find(|r| r.source == src && r.target == tgt).ok_or(format!("no row hom({src}, {tgt})"))?;
        ensure(row.normal_form == Some(want), format!("hom({src}, {tgt}) = {:?}, expected {want}", row.normal_form))?;
    }
    let f = c.fractions.as_ref().ok_or("no fraction sample")?;
    ensure(f.agree >= FRACTION_PAIRS && f.disagreements.is_empty() && f.equal > 0 && f.equal < f.pairs, format!("fractions agree on {}/{}", f.agree, f.pairs))?;

    let h = load("huet.cp");
    let ht = derive_residual_table(&h);
    let hc = compare_constructions(&h, &ht, 1, 8, false, SearchLimits::default()).map_err(|e| e.to_string())?;
    let row = hc.rows.iter().find(|r| r.source == "x" && r.target == "x").ok_or("no huet row hom(x, x)")?;
    ensure(row.quotient == Some(1), format!("huet quotient hom(x, x) = {:?}", row.quotient))?;
    ensure(row.localization.is_some_and(|n| n >= 2), format!("huet localization hom(x, x) = {:?}", row.localization))?;
    Ok(format!(
        "{rows} ds2 rows match surjections, {}/{} fractions agree, huet quotient 1 vs localization {}",
        f.agree,
        f.pairs,
        row.localization.unwrap()
    ))
}

fn suites() -> Outcome {
    let ds2 = load("ds2.cp");
    let mut notes = Vec::new();
    let runs: [Suite; 5] = [
        ("residual laws", Box::new(|| residual_laws(&ds2, 4, 3))),
        ("N functoriality", Box::new(|| nf_functoriality(&ds2, 4, 3))),
        ("exchange fibers", Box::new(|| exchange_fibers(&ds2, 4, 4))),
        ("normalization", Box::new(|| normalize_laws(&ds2, 6))),
        ("determinism", Box::new(|| report_determinism(&["ds2.cp", "ds2op.cp", "huet.cp", "deltas.cp"]))),
    ];
    for (name, run) in runs {
        let start = Instant::now();
        let n = run().map_err(|e| format!("{name}: {e}"))?;
        let took = start.elapsed();
        ensure(took < SUITE_BUDGET, format!("{name}: took {took:?}"))?;
        notes.push(format!("{name} {n} cases {:.1}s", took.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("residual table", residual_table),
        ("path residuals", path_residuals),
        ("critical enumeration", critical_counts),
        ("coherence verdicts", verdicts),
        ("transpositions and weights", weights),
        ("three-way comparison", comparison),
        ("property suites", suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(note) => println!("PASS {} {name}: {note}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name}: {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
