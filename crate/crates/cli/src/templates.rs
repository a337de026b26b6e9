//! Parameterized scenario scripts.

use std::fmt::Write as _;

/// A class of `boys` boys and `girls` girls; exactly one pupil won a
/// competition. We first believe a boy won, then each boy in turn says that
/// either he or some girl won. Restrained revision ends up believing the
/// last boy won; lexicographic revision believes a girl did. Uniqueness of
/// the winner is part of every input.
///
/// Atoms are `b1..bN` then `g1..gM`; at most 16 in total.
pub fn classroom(boys: usize, girls: usize) -> String {
    assert!(
        boys >= 1 && girls >= 1,
        "need at least one boy and one girl"
    );
    let b: Vec<String> = (1..=boys).map(|i| format!("b{i}")).collect();
    let g: Vec<String> = (1..=girls).map(|i| format!("g{i}")).collect();
    let all: Vec<&String> = b.iter().chain(&g).collect();
    let some_boy = format!("({})", b.join(" | "));
    let some_girl = format!("({})", g.join(" | "));
    // At most one winner: no two pupils both won.
    let mut pairs = Vec::new();
    for (i, x) in all.iter().enumerate() {
        for y in &all[i + 1..] {
            pairs.push(format!("~({x} & {y})"));
        }
    }
    let unique = format!(
        "({}) & {}",
        all.iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join(" | "),
        pairs.join(" & ")
    );

    let mut s = String::new();
    writeln!(s, "# classroom: {boys} boys, {girls} girls").unwrap();
    writeln!(
        s,
        "atoms {}",
        all.iter().map(|x| x.as_str()).collect::<Vec<_>>().join(" ")
    )
    .unwrap();
    writeln!(s, "op restrained").unwrap();
    writeln!(s, "kb \"{some_boy} & {unique}\"").unwrap();
    for boy in &b {
        writeln!(s, "revise \"(~{some_boy} | {boy}) & {unique}\"").unwrap();
    }
    writeln!(s, "assert-believes \"{}\" when restrained", b[boys - 1]).unwrap();
    writeln!(s, "assert-believes \"{some_girl}\" when lexicographic").unwrap();
    s
}
