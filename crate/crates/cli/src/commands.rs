//! `verify` and `counteracts` subcommands, separated from argument parsing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use revbench_core::verify::{
    compare_with_oracle, verify, Budget, Mode, OracleReport, PostulateReport, VerifyError,
};
use revbench_core::{
    counteracts, counteracts_via_witnesses, models_of, CounteractQuery, Language, Operator,
    PostulateId, TotalPreorder,
};
use serde::Serialize;
use thiserror::Error;

/// Anything that should end with exit status 2.
#[derive(Debug, Error)]
pub enum UsageError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] revbench_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError::Invalid(msg.into()))
}

/// Text for stdout plus an exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct VerifyArgs {
    pub atoms: usize,
    pub operator: Operator,
    pub postulates: Vec<PostulateId>,
    pub mode: Mode,
    pub budget: Budget,
    pub oracle: Option<Operator>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub expect: Option<PathBuf>,
}

/// Parses `all` or a comma-separated list of postulate names.
pub fn parse_postulates(list: &str) -> Result<Vec<PostulateId>, UsageError> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(PostulateId::ALL.to_vec());
    }
    let mut out: Vec<PostulateId> = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let p: PostulateId = name.parse()?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Parses comma-separated operator names.
pub fn parse_operators(list: &str) -> Result<Vec<Operator>, UsageError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(UsageError::from))
        .collect()
}

/// Expected verdicts, one `NAME pass|fail` per line; `oracle pass|fail` for the oracle comparison.
fn parse_expectations(text: &str) -> Result<BTreeMap<String, bool>, UsageError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let (Some(name), Some(verdict), None) = (words.next(), words.next(), words.next()) else {
            return invalid(format!(
                "expectations line {}: expected `NAME pass|fail`",
                i + 1
            ));
        };
        let pass = match verdict {
            "pass" => true,
            "fail" => false,
            _ => {
                return invalid(format!(
                    "expectations line {}: verdict must be pass or fail",
                    i + 1
                ))
            }
        };
        let key = if name.eq_ignore_ascii_case("oracle") {
            "oracle".to_string()
        } else {
            name.parse::<PostulateId>()?.as_str().to_string()
        };
        out.insert(key, pass);
    }
    Ok(out)
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    reports: &'a [PostulateReport],
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<&'a OracleReport>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    budget_exceeded: bool,
}

pub fn verify_command(args: &VerifyArgs) -> Result<Output, UsageError> {
    if args.postulates.is_empty() && args.oracle.is_none() {
        return invalid("nothing to check: give --postulates and/or --oracle");
    }
    if args.budget.max_seq_len == 0 {
        return invalid("--max-seq-len must be at least 1");
    }
    if args.mode == Mode::Sample && args.budget.samples == 0 {
        return invalid("--samples must be at least 1");
    }
    let expectations = match &args.expect {
        Some(path) => Some(parse_expectations(&read(path)?)?),
        None => None,
    };
    let lang = Language::with_default_atoms(args.atoms)?;

    let (reports, exceeded) = if args.postulates.is_empty() {
        (Vec::new(), false)
    } else {
        match verify(&args.operator, &args.postulates, &lang, args.mode, &args.budget) {
            Ok(r) => (r, false),
            Err(VerifyError::BudgetExceeded { partial, .. }) => (partial, true),
            Err(VerifyError::TooLarge { postulate, atoms, max }) => {
                return invalid(format!(
                    "exhaustive {postulate} supports at most {max} atoms (got {atoms}); use --mode sample"
                ))
            }
            Err(VerifyError::Revision(e)) => return Err(e.into()),
        }
    };
    let oracle = match args.oracle {
        Some(o) => match compare_with_oracle(&args.operator, &o, &lang, args.mode, &args.budget) {
            Ok(r) => Some(r),
            Err(VerifyError::TooLarge { max, .. }) => {
                return invalid(format!(
                    "exhaustive oracle comparison supports at most {max} atoms"
                ))
            }
            Err(e) => return invalid(e.to_string()),
        },
        None => None,
    };

    let mut text = match args.format {
        Format::Json => {
            let payload = JsonOutput {
                reports: &reports,
                oracle: oracle.as_ref(),
                budget_exceeded: exceeded,
            };
            serde_json::to_string_pretty(&payload).expect("reports serialize") + "\n"
        }
        Format::Text => {
            let mut t = String::new();
            for r in &reports {
                writeln!(t, "{r}").unwrap();
            }
            if let Some(o) = &oracle {
                writeln!(t, "{o}").unwrap();
            }
            if exceeded {
                writeln!(t, "instance budget exceeded; reports are partial").unwrap();
            }
            t
        }
    };

    let mut code = 0;
    match &expectations {
        Some(exp) => {
            let mut actual: BTreeMap<String, bool> = reports
                .iter()
                .map(|r| (r.postulate.as_str().to_string(), r.passed()))
                .collect();
            if let Some(o) = &oracle {
                actual.insert("oracle".into(), o.mismatches == 0);
            }
            let mut mismatches = Vec::new();
            for (name, want) in exp {
                match actual.get(name) {
                    Some(got) if got == want => {}
                    Some(got) => mismatches.push(format!(
                        "{name}: expected {}, got {}",
                        verdict(*want),
                        verdict(*got)
                    )),
                    None => mismatches.push(format!(
                        "{name}: expected {} but not checked",
                        verdict(*want)
                    )),
                }
            }
            if mismatches.is_empty() && !exceeded {
                if args.format == Format::Text {
                    writeln!(text, "expectations: all {} matched", exp.len()).unwrap();
                }
            } else {
                code = 1;
                if args.format == Format::Text {
                    for m in mismatches {
                        writeln!(text, "expectation mismatch: {m}").unwrap();
                    }
                }
            }
        }
        None => {
            let all_pass = reports.iter().all(PostulateReport::passed)
                && oracle.as_ref().is_none_or(|o| o.mismatches == 0);
            if !all_pass || exceeded {
                code = 1;
            }
        }
    }

    if let Some(path) = &args.out {
        std::fs::write(path, &text).map_err(|source| UsageError::Io {
            path: path.clone(),
            source,
        })?;
        text = format!("wrote {}\n", path.display());
    }
    Ok(Output { text, code })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn read(path: &PathBuf) -> Result<String, UsageError> {
    std::fs::read_to_string(path).map_err(|source| UsageError::Io {
        path: path.clone(),
        source,
    })
}

/// `3` for the default atoms `p q r`, or names separated by commas or spaces.
pub fn parse_language(spec: &str) -> Result<Language, UsageError> {
    let spec = spec.trim();
    if let Ok(n) = spec.parse::<usize>() {
        return Ok(Language::with_default_atoms(n)?);
    }
    let names: Vec<&str> = spec
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    Ok(Language::new(names)?)
}

pub fn counteracts_command(
    atoms: &str,
    state: &str,
    alpha: &str,
    beta: &str,
) -> Result<Output, UsageError> {
    let lang = parse_language(atoms)?;
    let state = TotalPreorder::parse(&lang, state)?;
    let a = models_of(alpha, &lang)?;
    let b = models_of(beta, &lang)?;
    let q = CounteractQuery::new(state, a, b)?;
    let holds = counteracts(&q);
    let witnesses = counteracts_via_witnesses(&q);
    let mut text = String::new();
    writeln!(text, "state {}", q.state).unwrap();
    writeln!(text, "alpha \"{alpha}\" {}", q.alpha).unwrap();
    writeln!(text, "beta \"{beta}\" {}", q.beta).unwrap();
    writeln!(text, "min alpha {}", q.state.min_models(&q.alpha)?).unwrap();
    writeln!(text, "min beta {}", q.state.min_models(&q.beta)?).unwrap();
    writeln!(text, "counteracts: {holds}").unwrap();
    if witnesses != holds {
        writeln!(text, "witness form disagrees: {witnesses}").unwrap();
    }
    Ok(Output {
        text,
        code: if witnesses == holds { 0 } else { 1 },
    })
}
