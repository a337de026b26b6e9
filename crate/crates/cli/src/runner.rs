//! Executes scenarios and renders their transcripts.

use std::fmt::Write as _;

use revbench_core::{counteracts_wrt, Operator, Revision, TotalPreorder};
use thiserror::Error;

use crate::scenario::{Scenario, StepKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("line {line}: revision step {step} has an inconsistent input")]
    InconsistentInput { step: usize, line: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub line: usize,
    pub description: String,
    pub passed: bool,
}

/// The state after one revision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub line: usize,
    pub input: String,
    pub operator: Operator,
    pub state: TotalPreorder,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub transcript: String,
    pub outcomes: Vec<Outcome>,
    pub initial: TotalPreorder,
    pub trace: Vec<TraceEntry>,
}

impl RunResult {
    pub fn final_state(&self) -> &TotalPreorder {
        self.trace.last().map_or(&self.initial, |t| &t.state)
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }

    /// 0 when every assertion passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failures() > 0)
    }
}

/// Runs `scenario`. With `force`, every revision uses that operator and
/// `when` filters compare against it.
pub fn run_scenario(scenario: &Scenario, force: Option<Operator>) -> Result<RunResult, RunError> {
    let mut out = String::new();
    let mut outcomes = Vec::new();
    let mut trace = Vec::new();
    let initial = scenario.initial_state();
    let mut state = initial.clone();
    let mut current = force.or(scenario.op);

    writeln!(out, "atoms {}", scenario.lang.atoms().join(" ")).unwrap();
    if let Some(op) = current {
        writeln!(out, "operator {op}").unwrap();
    }
    writeln!(out, "initial {state}").unwrap();

    let mut record = |out: &mut String, line: usize, description: String, passed: bool| {
        writeln!(
            out,
            "line {line}: {description}: {}",
            if passed { "pass" } else { "FAIL" }
        )
        .unwrap();
        outcomes.push(Outcome {
            line,
            description,
            passed,
        });
    };
    let applies = |when: &Option<Operator>, current: Option<Operator>| {
        when.is_none_or(|w| Some(w) == current)
    };
    let suffix = |when: &Option<Operator>| when.map_or(String::new(), |w| format!(" when {w}"));

    for step in &scenario.steps {
        let line = step.line;
        match &step.kind {
            StepKind::Op(op) => {
                if force.is_none() {
                    current = Some(*op);
                    writeln!(out, "line {line}: operator {op}").unwrap();
                }
            }
            StepKind::Revise { op, input } => {
                let op = force
                    .or(*op)
                    .or(current)
                    .expect("parser requires an operator before revising");
                let index = trace.len() + 1;
                state = op
                    .revise(&state, &input.models)
                    .map_err(|_| RunError::InconsistentInput { step: index, line })?;
                writeln!(out, "line {line}: revise {input} with {op} -> {state}").unwrap();
                trace.push(TraceEntry {
                    line,
                    input: input.text.clone(),
                    operator: op,
                    state: state.clone(),
                });
            }
            StepKind::AssertBelieves { input, when }
            | StepKind::AssertNotBelieves { input, when } => {
                let positive = matches!(step.kind, StepKind::AssertBelieves { .. });
                let name = if positive {
                    "assert-believes"
                } else {
                    "assert-not-believes"
                };
                if !applies(when, current) {
                    writeln!(out, "line {line}: {name} {input}{}: skipped", suffix(when)).unwrap();
                    continue;
                }
                let believed = state.belief_set().is_subset(&input.models);
                record(
                    &mut out,
                    line,
                    format!("{name} {input}{}", suffix(when)),
                    believed == positive,
                );
            }
            StepKind::AssertState {
                state: expected,
                when,
            } => {
                if !applies(when, current) {
                    writeln!(
                        out,
                        "line {line}: assert-state {expected}{}: skipped",
                        suffix(when)
                    )
                    .unwrap();
                    continue;
                }
                let passed = &state == expected;
                let mut description = format!("assert-state {expected}{}", suffix(when));
                if !passed {
                    write!(description, " (actual {state})").unwrap();
                }
                record(&mut out, line, description, passed);
            }
            StepKind::Counteracts {
                alpha,
                beta,
                expect,
                when,
            } => {
                if !applies(when, current) {
                    writeln!(
                        out,
                        "line {line}: counteracts {alpha} {beta}{}: skipped",
                        suffix(when)
                    )
                    .unwrap();
                    continue;
                }
                let holds = counteracts_wrt(&state, &alpha.models, &beta.models)
                    .expect("inputs checked when parsed");
                match expect {
                    Some(e) => record(
                        &mut out,
                        line,
                        format!(
                            "counteracts {alpha} {beta} is {holds}, expected {e}{}",
                            suffix(when)
                        ),
                        holds == *e,
                    ),
                    None => {
                        writeln!(out, "line {line}: counteracts {alpha} {beta}: {holds}").unwrap()
                    }
                }
            }
            StepKind::Show => {
                writeln!(
                    out,
                    "line {line}: state {state} beliefs {}",
                    state.belief_set()
                )
                .unwrap();
            }
        }
    }

    writeln!(out, "final {state} beliefs {}", state.belief_set()).unwrap();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(
        out,
        "assertions: {} passed, {failed} failed",
        outcomes.len() - failed
    )
    .unwrap();
    Ok(RunResult {
        transcript: out,
        outcomes,
        initial,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub operators: Vec<Operator>,
    pub runs: Vec<RunResult>,
}

impl Comparison {
    pub fn exit_code(&self) -> i32 {
        self.runs
            .iter()
            .map(RunResult::exit_code)
            .max()
            .unwrap_or(0)
    }

    /// Belief sets per revision step, one column per operator, then each transcript.
    pub fn render(&self) -> String {
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["step".to_string(), "input".to_string()];
        header.extend(self.operators.iter().map(|o| o.to_string()));
        rows.push(header);
        let mut first = vec!["0".to_string(), "(initial)".to_string()];
        first.extend(self.runs.iter().map(|r| r.initial.belief_set().to_string()));
        rows.push(first);
        let steps = self.runs.first().map_or(0, |r| r.trace.len());
        for i in 0..steps {
            let mut row = vec![
                (i + 1).to_string(),
                format!("\"{}\"", self.runs[0].trace[i].input),
            ];
            row.extend(
                self.runs
                    .iter()
                    .map(|r| r.trace[i].state.belief_set().to_string()),
            );
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap())
            .collect();
        let mut out = String::new();
        for row in &rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
        }
        for (op, run) in self.operators.iter().zip(&self.runs) {
            writeln!(out, "\n== {op} ==").unwrap();
            out.push_str(&run.transcript);
        }
        out
    }
}

/// Runs `scenario` once per operator.
pub fn compare(operators: &[Operator], scenario: &Scenario) -> Result<Comparison, RunError> {
    let runs = operators
        .iter()
        .map(|&op| run_scenario(scenario, Some(op)))
        .collect::<Result<_, _>>()?;
    Ok(Comparison {
        operators: operators.to_vec(),
        runs,
    })
}
