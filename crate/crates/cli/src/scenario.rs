//! Line-oriented scenario scripts.
//!
//! ```text
//! # red bird
//! atoms r b
//! op restrained
//! kb "b"
//! revise "r"
//! revise "~b"
//! assert-believes "r" when restrained
//! assert-not-believes "r" when natural
//! ```
//!
//! `kb "f"` or `levels {..} {..}` sets the initial state (default: all
//! valuations equally plausible). `revise NAME "f"` uses operator `NAME` for
//! that step only; `op NAME` switches the operator for later steps.
//! Assertions may end in `when NAME` to apply only while `NAME` is the
//! current operator.

use std::fmt;

use revbench_core::{models_of, Language, ModelSet, Operator, TotalPreorder};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Initial {
    Uniform,
    Kb { text: String, models: ModelSet },
    Levels(TotalPreorder),
}

/// A formula as written plus its models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Input {
    pub text: String,
    pub models: ModelSet,
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    Op(Operator),
    Revise {
        op: Option<Operator>,
        input: Input,
    },
    AssertBelieves {
        input: Input,
        when: Option<Operator>,
    },
    AssertNotBelieves {
        input: Input,
        when: Option<Operator>,
    },
    AssertState {
        state: TotalPreorder,
        when: Option<Operator>,
    },
    Counteracts {
        alpha: Input,
        beta: Input,
        expect: Option<bool>,
        when: Option<Operator>,
    },
    Show,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub line: usize,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub lang: Language,
    /// Operator in force before the first `op` step, if set in the header.
    pub op: Option<Operator>,
    pub initial: Initial,
    pub steps: Vec<Step>,
}

impl Scenario {
    pub fn initial_state(&self) -> TotalPreorder {
        match &self.initial {
            Initial::Uniform => TotalPreorder::uniform(self.lang.num_atoms()),
            Initial::Kb { models, .. } => {
                TotalPreorder::faithful_from_kb(models).expect("kb checked when parsed")
            }
            Initial::Levels(s) => s.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::default().parse(text)
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Token {
    Word(String),
    Quoted(String),
}

fn tokenize(rest: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = rest.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some((_, '"')) => break,
                    Some((_, ch)) => s.push(ch),
                    None => {
                        return Err(ParseError {
                            line,
                            message: format!("unterminated string starting at column {}", i + 1),
                        })
                    }
                }
            }
            out.push(Token::Quoted(s));
        } else {
            let mut s = String::new();
            while let Some(&(_, ch)) = chars.peek() {
                if ch.is_whitespace() || ch == '"' {
                    break;
                }
                s.push(ch);
                chars.next();
            }
            out.push(Token::Word(s));
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Parser {
    lang: Option<Language>,
    op: Option<Operator>,
    initial: Option<Initial>,
    steps: Vec<Step>,
}

impl Parser {
    fn parse(mut self, text: &str) -> Result<Scenario, ParseError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (cmd, rest) = content
                .split_once(char::is_whitespace)
                .map_or((content, ""), |(c, r)| (c, r.trim()));
            self.directive(line, cmd, rest)?;
        }
        let lang = self.lang.ok_or(ParseError {
            line: 1,
            message: "missing `atoms` directive".into(),
        })?;
        if self.op.is_none() {
            let first_revise = self.steps.iter().find_map(|s| match &s.kind {
                StepKind::Op(_) => Some(None),
                StepKind::Revise { op: None, .. } => Some(Some(s.line)),
                _ => None,
            });
            if let Some(Some(line)) = first_revise {
                return Err(ParseError {
                    line,
                    message: "no operator chosen; add `op NAME` before the first revise".into(),
                });
            }
        }
        Ok(Scenario {
            lang,
            op: self.op,
            initial: self.initial.unwrap_or(Initial::Uniform),
            steps: self.steps,
        })
    }

    fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line,
            message: message.into(),
        })
    }

    fn lang(&self, line: usize) -> Result<&Language, ParseError> {
        match &self.lang {
            Some(l) => Ok(l),
            None => Self::err(line, "`atoms` must come first"),
        }
    }

    fn input(&self, line: usize, text: &str) -> Result<Input, ParseError> {
        let models = models_of(text, self.lang(line)?).map_err(|e| ParseError {
            line,
            message: format!("in \"{text}\": {e}"),
        })?;
        Ok(Input {
            text: text.to_string(),
            models,
        })
    }

    fn operator(line: usize, name: &str) -> Result<Operator, ParseError> {
        name.parse().map_err(|e: revbench_core::Error| ParseError {
            line,
            message: e.to_string(),
        })
    }

    /// Splits a trailing `when NAME`.
    fn when(line: usize, tokens: &[Token]) -> Result<(&[Token], Option<Operator>), ParseError> {
        match tokens {
            [head @ .., Token::Word(w), Token::Word(name)] if w == "when" => {
                Ok((head, Some(Self::operator(line, name)?)))
            }
            [.., Token::Word(w)] if w == "when" => Self::err(line, "`when` needs an operator name"),
            _ => Ok((tokens, None)),
        }
    }

    fn started(&self) -> bool {
        self.steps
            .iter()
            .any(|s| !matches!(s.kind, StepKind::Op(_)))
    }

    fn directive(&mut self, line: usize, cmd: &str, rest: &str) -> Result<(), ParseError> {
        match cmd {
            "atoms" => {
                if self.lang.is_some() {
                    return Self::err(line, "`atoms` given twice");
                }
                let names: Vec<&str> = rest.split_whitespace().collect();
                let lang = Language::new(names).map_err(|e| ParseError {
                    line,
                    message: e.to_string(),
                })?;
                self.lang = Some(lang);
            }
            "op" => {
                self.lang(line)?;
                let op = Self::operator(line, rest)?;
                if self.steps.is_empty() && self.op.is_none() {
                    self.op = Some(op);
                } else {
                    self.steps.push(Step {
                        line,
                        kind: StepKind::Op(op),
                    });
                }
            }
            "kb" | "levels" => {
                if self.initial.is_some() {
                    return Self::err(line, "initial state given twice");
                }
                if self.started() {
                    return Self::err(line, "initial state must precede the steps");
                }
                let initial = if cmd == "kb" {
                    let text = single_quoted(line, &tokenize(rest, line)?)?;
                    let input = self.input(line, &text)?;
                    if input.models.is_empty() {
                        return Self::err(line, "knowledge base is inconsistent");
                    }
                    Initial::Kb {
                        text,
                        models: input.models,
                    }
                } else {
                    let state =
                        TotalPreorder::parse(self.lang(line)?, rest).map_err(|e| ParseError {
                            line,
                            message: e.to_string(),
                        })?;
                    Initial::Levels(state)
                };
                self.initial = Some(initial);
            }
            "revise" => {
                let tokens = tokenize(rest, line)?;
                let (op, text) = match tokens.as_slice() {
                    [Token::Quoted(t)] => (None, t.clone()),
                    [Token::Word(name), Token::Quoted(t)] => {
                        (Some(Self::operator(line, name)?), t.clone())
                    }
                    _ => return Self::err(line, "expected `revise [OPERATOR] \"formula\"`"),
                };
                let input = self.input(line, &text)?;
                self.steps.push(Step {
                    line,
                    kind: StepKind::Revise { op, input },
                });
            }
            "assert-believes" | "assert-not-believes" => {
                let tokens = tokenize(rest, line)?;
                let (head, when) = Self::when(line, &tokens)?;
                let input = self.input(line, &single_quoted(line, head)?)?;
                let kind = if cmd == "assert-believes" {
                    StepKind::AssertBelieves { input, when }
                } else {
                    StepKind::AssertNotBelieves { input, when }
                };
                self.steps.push(Step { line, kind });
            }
            "assert-state" => {
                let (levels, when) = match rest.rsplit_once("when") {
                    Some((l, name)) if l.trim_end().ends_with('}') => {
                        (l, Some(Self::operator(line, name.trim())?))
                    }
                    _ => (rest, None),
                };
                let state =
                    TotalPreorder::parse(self.lang(line)?, levels).map_err(|e| ParseError {
                        line,
                        message: e.to_string(),
                    })?;
                self.steps.push(Step {
                    line,
                    kind: StepKind::AssertState { state, when },
                });
            }
            "counteracts" => {
                let tokens = tokenize(rest, line)?;
                let (head, when) = Self::when(line, &tokens)?;
                let (a, b, expect) = match head {
                    [Token::Quoted(a), Token::Quoted(b)] => (a, b, None),
                    [Token::Quoted(a), Token::Quoted(b), Token::Word(e), Token::Word(v)]
                        if e == "expect" =>
                    {
                        let v = match v.as_str() {
                            "true" => true,
                            "false" => false,
                            _ => return Self::err(line, "`expect` takes true or false"),
                        };
                        (a, b, Some(v))
                    }
                    _ => {
                        return Self::err(
                            line,
                            "expected `counteracts \"f\" \"g\" [expect true|false]`",
                        )
                    }
                };
                let alpha = self.input(line, a)?;
                let beta = self.input(line, b)?;
                if alpha.models.is_empty() || beta.models.is_empty() {
                    return Self::err(line, "counteracts needs satisfiable formulas");
                }
                self.steps.push(Step {
                    line,
                    kind: StepKind::Counteracts {
                        alpha,
                        beta,
                        expect,
                        when,
                    },
                });
            }
            "show" => {
                if !rest.is_empty() {
                    return Self::err(line, "`show` takes no arguments");
                }
                self.steps.push(Step {
                    line,
                    kind: StepKind::Show,
                });
            }
            other => return Self::err(line, format!("unknown directive `{other}`")),
        }
        Ok(())
    }
}

fn single_quoted(line: usize, tokens: &[Token]) -> Result<String, ParseError> {
    match tokens {
        [Token::Quoted(t)] => Ok(t.clone()),
        _ => Err(ParseError {
            line,
            message: "expected one quoted formula".into(),
        }),
    }
}
