//! A tiny structured language for growing faulty program versions.
//!
//! Programs read integers, compute through assignments and nested
//! conditionals, and emit one integer. Every line that occupies a coverage
//! column (IN, SET, IF, ELSE) is numbered in source order starting at 0;
//! END and OUT are structural and never appear in a trace. An ELSE line
//! counts as executed when its branch is entered, which is what gives
//! branch-sensitive coverage without instrumenting conditions twice.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub const ALL: [ArithOp; 4] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div];

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    fn parse(token: &str) -> Option<ArithOp> {
        Self::ALL.into_iter().find(|op| op.symbol() == token)
    }

    /// Wrapping arithmetic; division by zero is the one runtime crash.
    fn apply(self, left: i64, right: i64) -> Option<i64> {
        match self {
            ArithOp::Add => Some(left.wrapping_add(right)),
            ArithOp::Sub => Some(left.wrapping_sub(right)),
            ArithOp::Mul => Some(left.wrapping_mul(right)),
            ArithOp::Div => {
                if right == 0 {
                    None
                } else {
                    Some(left.wrapping_div(right))
                }
            }
        }
    }
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub const ALL: [RelOp; 6] = [RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge, RelOp::Eq, RelOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        }
    }

    fn parse(token: &str) -> Option<RelOp> {
        Self::ALL.into_iter().find(|op| op.symbol() == token)
    }

    /// The operator deciding the opposite outcomes on every input.
    pub fn negated(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Ge,
            RelOp::Ge => RelOp::Lt,
            RelOp::Le => RelOp::Gt,
            RelOp::Gt => RelOp::Le,
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
        }
    }

    fn holds(self, left: i64, right: i64) -> bool {
        match self {
            RelOp::Lt => left < right,
            RelOp::Le => left <= right,
            RelOp::Gt => left > right,
            RelOp::Ge => left >= right,
            RelOp::Eq => left == right,
            RelOp::Ne => left != right,
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Var(String),
    Const(i64),
}

impl Operand {
    fn parse(token: &str, line: usize) -> Result<Operand> {
        if let Ok(value) = token.parse::<i64>() {
            return Ok(Operand::Const(value));
        }
        Ok(Operand::Var(parse_ident(token, line)?))
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(name) => f.write_str(name),
            Operand::Const(value) => write!(f, "{value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElseArm {
    pub id: usize,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    In {
        id: usize,
        vars: Vec<String>,
    },
    Set {
        id: usize,
        target: String,
        left: Operand,
        op: ArithOp,
        right: Operand,
    },
    If {
        id: usize,
        left: Operand,
        op: RelOp,
        right: Operand,
        then_body: Vec<Stmt>,
        else_arm: Option<ElseArm>,
    },
    Out {
        value: Operand,
    },
}

impl Stmt {
    /// Coverage column of this line, if it has one.
    pub fn id(&self) -> Option<usize> {
        match self {
            Stmt::In { id, .. } | Stmt::Set { id, .. } | Stmt::If { id, .. } => Some(*id),
            Stmt::Out { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub(crate) body: Vec<Stmt>,
    pub(crate) num_statements: usize,
}

impl Program {
    pub fn parse(text: &str) -> Result<Program> {
        let lines: Vec<Line> = text
            .lines()
            .enumerate()
            .map(|(i, raw)| Line { no: i + 1, tokens: raw.split_whitespace().collect() })
            .filter(|l| !l.tokens.is_empty() && !l.tokens[0].starts_with('#'))
            .collect();
        let mut parser = Parser { lines, pos: 0, next_id: 0 };
        let body = parser.block(0)?;
        if let Some(line) = parser.peek() {
            return Err(Error::parse(
                line.no,
                format!("{} without a matching IF", line.tokens[0]),
            ));
        }
        if parser.next_id == 0 {
            return Err(Error::domain("program has no numbered statements"));
        }
        Ok(Program { body, num_statements: parser.next_id })
    }

    pub fn body(&self) -> &[Stmt] {
        &self.body
    }

    /// Number of coverage columns, equal to the count of IN/SET/IF/ELSE
    /// lines. Stable under mutation: deleting an ELSE arm leaves its
    /// columns in place, permanently uncovered.
    pub fn num_statements(&self) -> usize {
        self.num_statements
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, &self.body, 0)
    }
}

fn indent(f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
    for _ in 0..depth {
        f.write_str("  ")?;
    }
    Ok(())
}

fn write_block(f: &mut fmt::Formatter<'_>, body: &[Stmt], depth: usize) -> fmt::Result {
    for stmt in body {
        indent(f, depth)?;
        match stmt {
            Stmt::In { vars, .. } => writeln!(f, "IN {}", vars.join(" "))?,
            Stmt::Set { target, left, op, right, .. } => {
                writeln!(f, "SET {target} = {left} {op} {right}")?
            }
            Stmt::If { left, op, right, then_body, else_arm, .. } => {
                writeln!(f, "IF {left} {op} {right}")?;
                write_block(f, then_body, depth + 1)?;
                if let Some(arm) = else_arm {
                    indent(f, depth)?;
                    writeln!(f, "ELSE")?;
                    write_block(f, &arm.body, depth + 1)?;
                }
                indent(f, depth)?;
                writeln!(f, "END")?;
            }
            Stmt::Out { value } => writeln!(f, "OUT {value}")?,
        }
    }
    Ok(())
}

fn parse_ident(token: &str, line: usize) -> Result<String> {
    let mut chars = token.chars();
    let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let keyword = matches!(token, "IN" | "SET" | "IF" | "ELSE" | "END" | "OUT");
    if !head_ok || keyword || !token.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::parse(line, format!("invalid identifier {token:?}")));
    }
    Ok(token.to_string())
}

struct Line<'a> {
    no: usize,
    tokens: Vec<&'a str>,
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    next_id: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    fn take_id(&mut self) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    /// Parses statements until EOF (depth 0) or an unconsumed ELSE/END
    /// (inside an IF).
    fn block(&mut self, depth: usize) -> Result<Vec<Stmt>> {
        let mut body = Vec::new();
        while let Some(line) = self.peek() {
            let no = line.no;
            let tokens = line.tokens.clone();
            match tokens[0] {
                "ELSE" | "END" if depth > 0 => break,
                "ELSE" | "END" => {
                    return Err(Error::parse(
                        no,
                        format!("{} without a matching IF", tokens[0]),
                    ));
                }
                "IN" => {
                    self.pos += 1;
                    if tokens.len() < 2 {
                        return Err(Error::parse(no, "IN needs at least one variable"));
                    }
                    let vars = tokens[1..]
                        .iter()
                        .map(|t| parse_ident(t, no))
                        .collect::<Result<Vec<String>>>()?;
                    body.push(Stmt::In { id: self.take_id(), vars });
                }
                "SET" => {
                    self.pos += 1;
                    let [_, target, eq, left, op, right] = tokens[..] else {
                        return Err(Error::parse(no, "expected `SET <var> = <a> <op> <b>`"));
                    };
                    if eq != "=" {
                        return Err(Error::parse(no, "expected `=` after the SET target"));
                    }
                    let op = ArithOp::parse(op)
                        .ok_or_else(|| Error::parse(no, format!("unknown operator {op:?}")))?;
                    body.push(Stmt::Set {
                        id: self.take_id(),
                        target: parse_ident(target, no)?,
                        left: Operand::parse(left, no)?,
                        op,
                        right: Operand::parse(right, no)?,
                    });
                }
                "IF" => {
                    self.pos += 1;
                    let [_, left, op, right] = tokens[..] else {
                        return Err(Error::parse(no, "expected `IF <a> <relop> <b>`"));
                    };
                    let op = RelOp::parse(op)
                        .ok_or_else(|| Error::parse(no, format!("unknown comparison {op:?}")))?;
                    let id = self.take_id();
                    let left = Operand::parse(left, no)?;
                    let right = Operand::parse(right, no)?;
                    let then_body = self.block(depth + 1)?;
                    let else_arm = match self.peek() {
                        Some(line) if line.tokens[0] == "ELSE" => {
                            let else_no = line.no;
                            if line.tokens.len() != 1 {
                                return Err(Error::parse(else_no, "ELSE takes no arguments"));
                            }
                            self.pos += 1;
                            let id = self.take_id();
                            Some(ElseArm { id, body: self.block(depth + 1)? })
                        }
                        _ => None,
                    };
                    match self.peek() {
                        Some(line) if line.tokens[0] == "END" => self.pos += 1,
                        Some(line) => {
                            return Err(Error::parse(line.no, "expected END to close IF"))
                        }
                        None => return Err(Error::parse(no, "IF is never closed by END")),
                    }
                    body.push(Stmt::If { id, left, op, right, then_body, else_arm });
                }
                "OUT" => {
                    self.pos += 1;
                    let [_, value] = tokens[..] else {
                        return Err(Error::parse(no, "expected `OUT <operand>`"));
                    };
                    body.push(Stmt::Out { value: Operand::parse(value, no)? });
                }
                other => {
                    return Err(Error::parse(no, format!("unknown statement {other:?}")));
                }
            }
        }
        Ok(body)
    }
}

/// Result of running a program on one input vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    /// Value of the last OUT reached, or `None` after a crash.
    pub output: Option<i64>,
    /// Coverage column per numbered statement.
    pub covered: Vec<bool>,
}

struct Machine<'a> {
    env: HashMap<&'a str, i64>,
    inputs: &'a [i64],
    cursor: usize,
    covered: Vec<bool>,
    output: Option<i64>,
}

struct Crash;

impl<'a> Machine<'a> {
    fn eval(&self, operand: &'a Operand) -> i64 {
        match operand {
            Operand::Var(name) => self.env.get(name.as_str()).copied().unwrap_or(0),
            Operand::Const(value) => *value,
        }
    }

    fn block(&mut self, body: &'a [Stmt]) -> std::result::Result<(), Crash> {
        for stmt in body {
            match stmt {
                Stmt::In { id, vars } => {
                    self.covered[*id] = true;
                    for var in vars {
                        // Exhausted input reads 0; mutation never touches IN,
                        // so arity mismatches only come from the caller.
                        let value = self.inputs.get(self.cursor).copied().unwrap_or(0);
                        self.cursor += 1;
                        self.env.insert(var, value);
                    }
                }
                Stmt::Set { id, target, left, op, right } => {
                    self.covered[*id] = true;
                    let value = op.apply(self.eval(left), self.eval(right)).ok_or(Crash)?;
                    self.env.insert(target, value);
                }
                Stmt::If { id, left, op, right, then_body, else_arm } => {
                    self.covered[*id] = true;
                    if op.holds(self.eval(left), self.eval(right)) {
                        self.block(then_body)?;
                    } else if let Some(arm) = else_arm {
                        self.covered[arm.id] = true;
                        self.block(&arm.body)?;
                    }
                }
                Stmt::Out { value } => self.output = Some(self.eval(value)),
            }
        }
        Ok(())
    }
}

/// Runs `program` on one input vector. A crash (division by zero) yields
/// `output: None` but keeps everything covered up to and including the
/// crashing statement.
pub fn run(program: &Program, inputs: &[i64]) -> Execution {
    let mut machine = Machine {
        env: HashMap::new(),
        inputs,
        cursor: 0,
        covered: vec![false; program.num_statements],
        output: None,
    };
    match machine.block(&program.body) {
        Ok(()) => Execution { output: machine.output, covered: machine.covered },
        Err(Crash) => Execution { output: None, covered: machine.covered },
    }
}
