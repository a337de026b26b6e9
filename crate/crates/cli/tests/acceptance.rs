//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use revbench_core::postulates::check_syntactic;
use revbench_core::preorder::PreorderIter;
use revbench_core::verify::cross_check_meta;
use revbench_core::{
    counteracts, counteracts_via_witnesses, enumerate_preorders, models_of, nonempty_model_sets,
    CounteractQuery, Instance, Language, ModelSet, Operator, PostulateId, Revision, TotalPreorder,
};
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn revbench(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_revbench"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

/// Runs `verify` with JSON output and returns the report array.
fn verify_json(
    atoms: &str,
    op: &str,
    postulates: &str,
    extra: &[&str],
) -> Result<(Vec<Value>, Value, i32), String> {
    let mut args = vec![
        "verify",
        "--atoms",
        atoms,
        "--operator",
        op,
        "--format",
        "json",
    ];
    if !postulates.is_empty() {
        args.extend(["--postulates", postulates]);
    }
    args.extend(extra);
    let (out, code) = revbench(&args);
    let v: Value =
        serde_json::from_str(&out).map_err(|e| format!("bad JSON from verify ({e}): {out}"))?;
    let reports = v["reports"].as_array().cloned().unwrap_or_default();
    Ok((reports, v["oracle"].clone(), code))
}

fn report<'a>(reports: &'a [Value], p: &str) -> Result<&'a Value, String> {
    reports
        .iter()
        .find(|r| r["postulate"] == p)
        .ok_or_else(|| format!("no report for {p}"))
}

fn violations(reports: &[Value], p: &str) -> Result<u64, String> {
    Ok(report(reports, p)?["violations"].as_u64().unwrap())
}

fn all_clean(reports: &[Value], names: &[&str]) -> Result<(), String> {
    for p in names {
        let n = violations(reports, p)?;
        ensure(n == 0, format!("{p}: {n} violations"))?;
    }
    Ok(())
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let (reports, _, code) = verify_json(
        "2",
        "restrained",
        "RAGM,C1,C2,P,D",
        &["--mode", "exhaustive"],
    )?;
    let elapsed = start.elapsed();
    all_clean(&reports, &["RAGM", "C1", "C2", "P", "D"])?;
    ensure(
        report(&reports, "RAGM")?["instances_checked"] == 75 * 15,
        "RAGM count",
    )?;
    for p in ["C1", "C2", "P", "D"] {
        ensure(
            report(&reports, p)?["instances_checked"] == 75 * 15 * 15,
            format!("{p} count"),
        )?;
    }
    ensure(code == 0, format!("exit status {code}"))?;
    ensure(
        elapsed < Duration::from_secs(10),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "1125 + 4 x 16875 instances, 0 violations, {:.2?}",
        elapsed
    ))
}

fn criterion_2() -> Check {
    let names = ["RAGM", "C1", "C2", "C4", "U", "D"];
    let (reports, _, code) = verify_json("2", "restrained", &names.join(","), &[])?;
    all_clean(&reports, &names)?;
    ensure(code == 0, format!("exit status {code}"))?;
    Ok("RAGM, C1, C2, C4, U, D: 0 violations".into())
}

fn parse_counterexample(lang: &Language, cx: &Value) -> Result<Instance, String> {
    let levels: Vec<String> = cx["state"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| {
            let items: Vec<&str> = l
                .as_array()
                .unwrap()
                .iter()
                .map(|s| s.as_str().unwrap())
                .collect();
            format!("{{{}}}", items.join(" "))
        })
        .collect();
    let state = TotalPreorder::parse(lang, &levels.join(" ")).map_err(|e| e.to_string())?;
    let inputs = cx["inputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| {
            let items: Vec<&str> = i
                .as_array()
                .unwrap()
                .iter()
                .map(|s| s.as_str().unwrap())
                .collect();
            lang.parse_model_set(&items.join(" "))
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    Ok(Instance { state, inputs })
}

fn criterion_3() -> Check {
    let (nat, _, _) = verify_json("2", "natural", "C1,C2,C3,C4,CB,CBR,P", &[])?;
    all_clean(&nat, &["C1", "C2", "C3", "C4", "CB", "CBR"])?;
    let p = report(&nat, "P")?;
    ensure(p["violations"].as_u64().unwrap() >= 1, "natural passes P")?;
    let (again, _, _) = verify_json("2", "natural", "P", &[])?;
    ensure(
        report(&again, "P")?["first_counterexample"] == p["first_counterexample"],
        "counterexample differs between runs",
    )?;
    let lang = Language::with_default_atoms(2).unwrap();
    let inst = parse_counterexample(&lang, &p["first_counterexample"])?;
    ensure(
        !check_syntactic(PostulateId::P, &Operator::Natural, &inst).unwrap(),
        "reported counterexample does not violate P",
    )?;

    let (lex, _, _) = verify_json("2", "lexicographic", "C1,C2,REC,R,U,UR,D", &[])?;
    all_clean(&lex, &["C1", "C2", "REC", "R", "U", "UR"])?;
    let d = violations(&lex, "D")?;
    ensure(d >= 1, "lexicographic passes D")?;
    Ok(format!(
        "natural fails P ({} violations), lexicographic fails D ({d} violations)",
        p["violations"]
    ))
}

fn criterion_4() -> Check {
    let (_, oracle, code) = verify_json(
        "2",
        "composite",
        "",
        &["--oracle", "restrained", "--mode", "exhaustive"],
    )?;
    ensure(code == 0, format!("exit status {code}"))?;
    ensure(oracle["instances_checked"] == 75 * 15, "exhaustive count")?;
    ensure(
        oracle["mismatches"] == 0,
        format!("mismatches: {}", oracle["mismatches"]),
    )?;
    let (_, oracle, code) = verify_json(
        "3",
        "composite",
        "",
        &[
            "--oracle",
            "restrained",
            "--mode",
            "sample",
            "--samples",
            "10000",
            "--seed",
            "7",
        ],
    )?;
    ensure(code == 0, format!("exit status {code}"))?;
    ensure(oracle["instances_checked"] == 10_000, "sample count")?;
    ensure(
        oracle["mismatches"] == 0,
        format!("mismatches: {}", oracle["mismatches"]),
    )?;
    Ok("1125 exhaustive pairs and 10000 sampled pairs identical".into())
}

fn criterion_5() -> Check {
    let lang = Language::with_default_atoms(2).unwrap();
    for op in [
        Operator::Natural,
        Operator::Lexicographic,
        Operator::Restrained,
    ] {
        let m = cross_check_meta(&op, &lang).map_err(|e| e.to_string())?;
        for p in [
            PostulateId::P,
            PostulateId::D,
            PostulateId::U,
            PostulateId::C1,
            PostulateId::C2,
        ] {
            let pair = m.pair(p).unwrap();
            ensure(
                pair.agree(),
                format!("{op}: {} and {} disagree", pair.syntactic, pair.semantic),
            )?;
        }
    }
    let (reports, _, _) = verify_json("2", "restrained", "CR1,CR2,PR,DR", &[])?;
    all_clean(&reports, &["CR1", "CR2", "PR", "DR"])?;
    Ok("P/PR, D/DR, U/UR, C1/CR1, C2/CR2 agree for 3 operators; restrained passes CR1, CR2, PR, DR".into())
}

fn criterion_6() -> Check {
    let lang = Language::with_default_atoms(2).unwrap();
    let states: Vec<TotalPreorder> = enumerate_preorders(&lang).collect();
    let sets: Vec<ModelSet> = nonempty_model_sets(2).collect();
    let query = |s: &TotalPreorder, a: &ModelSet, b: &ModelSet| {
        CounteractQuery::new(s.clone(), a.clone(), b.clone()).unwrap()
    };
    let mut triples = 0;
    for s in &states {
        for a in &sets {
            for b in &sets {
                let q = query(s, a, b);
                let pre = counteracts(&q);
                let wit = counteracts_via_witnesses(&q);
                let after_a = Operator::Restrained.revise(s, a).unwrap();
                let after_b = Operator::Restrained.revise(s, b).unwrap();
                let def = after_a.believes(&b.complement()).unwrap()
                    && after_b.believes(&a.complement()).unwrap();
                ensure(
                    pre == wit && pre == def,
                    format!("forms disagree at {s} {a} {b}"),
                )?;
                triples += 1;
            }
        }
    }
    let mut quads = 0;
    for s in &states {
        for a in &sets {
            for b in &sets {
                let ab = counteracts(&query(s, a, b));
                for g in &sets {
                    let gb = counteracts(&query(s, g, b));
                    let joined = counteracts(&query(s, &a.union(g), b));
                    ensure(
                        !(ab && gb) || joined,
                        format!("(i) fails at {s} {a} {b} {g}"),
                    )?;
                    ensure(
                        ab || gb || !joined,
                        format!("(ii) fails at {s} {a} {b} {g}"),
                    )?;
                    quads += 1;
                }
            }
        }
    }
    let l3 = Language::new(["p", "q", "r"]).unwrap();
    let s3 = TotalPreorder::parse(&l3, "{010 100} {111} {110 101 011 001 000}").unwrap();
    let m = |f| models_of(f, &l3).unwrap();
    ensure(
        !counteracts(&query(&s3, &m("r"), &m("q"))),
        "r and q counteract",
    )?;
    ensure(
        counteracts(&query(&s3, &m("p | r"), &m("q"))),
        "p | r and q do not counteract",
    )?;
    ensure(
        triples == 75 * 15 * 15 && quads == 75 * 15 * 15 * 15,
        "counts",
    )?;
    Ok(format!("{triples} triples agree; disjunction laws hold on {quads} quadruples; three-atom example ok"))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let (r, _, _) = verify_json(
        "2",
        "restrained",
        "O,S,Q,DISJ1,DISJ2",
        &["--max-seq-len", "3"],
    )?;
    all_clean(&r, &["O", "S", "Q", "DISJ1", "DISJ2"])?;
    ensure(
        report(&r, "O")?["instances_checked"] == 75 * (15 + 225 + 3375),
        "O count",
    )?;
    let (l, _, _) = verify_json("2", "lexicographic", "DISJ1,DISJ2", &[])?;
    all_clean(&l, &["DISJ1", "DISJ2"])?;
    for reports in [&r, &l] {
        for p in ["DISJ1", "DISJ2"] {
            ensure(
                report(reports, p)?["instances_checked"] == 253_125,
                format!("{p} count"),
            )?;
        }
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(60),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "O (length <= 3), S, Q, DISJ1, DISJ2: 0 violations, {:.2?}",
        elapsed
    ))
}

fn criterion_8() -> Check {
    let file = |n: &str| format!("scenarios/{n}.scn");
    let pinned = |n: &str| {
        std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{n}.txt")),
        )
        .unwrap()
    };
    let runs: [(&[&str], &str, usize); 6] = [
        (&["run", &file("red-bird")], "red-bird", 2),
        (
            &["compare", "--ops", "restrained,natural", &file("red-bird")],
            "compare-red-bird",
            5,
        ),
        (
            &[
                "compare",
                "--ops",
                "restrained,lexicographic",
                &file("red-bird-2"),
            ],
            "compare-red-bird-2",
            2,
        ),
        (&["run", &file("john-mary")], "john-mary", 2),
        (
            &[
                "compare",
                "--ops",
                "restrained,natural,lexicographic",
                &file("john-mary"),
            ],
            "compare-john-mary",
            6,
        ),
        (
            &[
                "compare",
                "--ops",
                "natural,restrained,lexicographic",
                &file("p-then-implication"),
            ],
            "compare-p-then-implication",
            4,
        ),
    ];
    let mut assertions = 0;
    for (args, golden, expected_passes) in runs {
        let (out, code) = revbench(args);
        ensure(code == 0, format!("{}: exit {code}", args.join(" ")))?;
        ensure(
            !out.contains(": FAIL"),
            format!("{}: failed assertion", args.join(" ")),
        )?;
        let passes = out.matches(": pass\n").count();
        ensure(
            passes == expected_passes,
            format!("{golden}: {passes} assertions passed"),
        )?;
        let (again, _) = revbench(args);
        ensure(
            out == again,
            format!("{golden}: output changed between runs"),
        )?;
        ensure(
            out == pinned(golden),
            format!("{golden}: output differs from pinned transcript"),
        )?;
        assertions += passes;
    }
    let (out, code) = revbench(&["run", &file("red-bird-3")]);
    ensure(
        code == 0 && out.contains("assert-believes \"~red\" when lexicographic: pass"),
        "red-bird-3",
    )?;
    Ok(format!(
        "{assertions} scenario assertions pass; transcripts byte-stable"
    ))
}

fn fubini(n: usize) -> u64 {
    // a(m) = sum_k C(m, k) a(m - k)
    let mut a = vec![1u64];
    for m in 1..=n {
        let mut c = 1u64;
        let mut sum = 0;
        for k in 1..=m {
            c = c * (m - k + 1) as u64 / k as u64;
            sum += c * a[m - k];
        }
        a.push(sum);
    }
    a[n]
}

fn surjective_rank_maps(size: usize) -> u64 {
    let total = (size as u64).pow(size as u32);
    (0..total)
        .filter(|&code| {
            let mut c = code;
            let ranks: Vec<u64> = (0..size)
                .map(|_| {
                    let r = c % size as u64;
                    c /= size as u64;
                    r
                })
                .collect();
            let top = *ranks.iter().max().unwrap();
            (0..=top).all(|k| ranks.contains(&k))
        })
        .count() as u64
}

fn criterion_9() -> Check {
    const PINNED: [u64; 3] = [3, 75, 545_835];
    ensure(surjective_rank_maps(2) == PINNED[0], "brute force, 1 atom")?;
    ensure(surjective_rank_maps(4) == PINNED[1], "brute force, 2 atoms")?;
    ensure([fubini(2), fubini(4), fubini(8)] == PINNED, "recurrence")?;
    for atoms in 1..=2 {
        let lang = Language::with_default_atoms(atoms).unwrap();
        let n = enumerate_preorders(&lang).count() as u64;
        ensure(
            n == PINNED[atoms - 1],
            format!("enumerated {n} at {atoms} atoms"),
        )?;
    }
    let n = PreorderIter::new(3).count_remaining();
    ensure(n == PINNED[2], format!("counted {n} at 3 atoms"))?;
    Ok("3, 75, 545835".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "restrained passes RAGM, C1, C2, P, D exhaustively at 2 atoms",
            criterion_1,
        ),
        (
            "restrained passes RAGM, C1, C2, C4, U, D exhaustively at 2 atoms",
            criterion_2,
        ),
        (
            "natural and lexicographic separation witnesses",
            criterion_3,
        ),
        ("composite equals restrained", criterion_4),
        ("syntactic and pointwise postulates agree", criterion_5),
        ("counteracts forms and disjunction laws", criterion_6),
        (
            "sequence postulates and disjunction postulates",
            criterion_7,
        ),
        ("scenario corpus", criterion_8),
        ("preorder counts", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
