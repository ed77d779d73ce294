//! OpenQASM 2.0 reader and writer for the canonical gate set.
//!
//! The reader accepts a single quantum register, the canonical gates (plus
//! the `U`, `u3` and `CX` aliases), `barrier`, and optional `creg`/`measure`
//! statements. Measurements are dropped with a warning. Angle arguments may
//! be constant expressions over numbers and `pi`.
//!
//! The writer is deterministic: one statement per line in instruction order,
//! angles printed with 17 significant digits so they survive a round trip.

use std::fmt::Write as _;

use log::warn;
use thiserror::Error;

use crate::circuit::{validate_instruction, Circuit, CircuitError, GateKind, Instruction, Params, Qubits};

const NAME_TAG: &str = "// name: ";
const LAYOUT_TAG: &str = "// final_layout:";

#[derive(Debug, Error, PartialEq)]
pub enum QasmErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("qubit index {index} out of range for register of size {size}")]
    QubitOutOfRange { index: u64, size: u32 },
    #[error("multiple quantum registers are not supported")]
    MultipleRegisters,
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("gate used before any qreg declaration")]
    MissingRegister,
    #[error("{0}")]
    Invalid(#[from] CircuitError),
}

#[derive(Debug, Error, PartialEq)]
#[error("{line}:{col}: {kind}")]
pub struct QasmError {
    pub line: usize,
    pub col: usize,
    pub kind: QasmErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64, bool),
    Str(String),
    Sym(char),
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    name: Option<String>,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
            name: None,
        }
    }

    fn err(&self, msg: impl Into<String>) -> QasmError {
        QasmError {
            line: self.line,
            col: self.col,
            kind: QasmErrorKind::Syntax(msg.into()),
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.bump();
            } else if c == b'/' && self.peek2() == Some(b'/') {
                let start = self.pos;
                while self.peek().is_some_and(|c| c != b'\n') {
                    self.bump();
                }
                let comment = String::from_utf8_lossy(&self.src[start..self.pos]);
                if let Some(name) = comment.strip_prefix(NAME_TAG) {
                    self.name.get_or_insert_with(|| name.trim_end().to_string());
                }
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<Token, QasmError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok(Token { tok: Tok::Eof, line, col });
        };
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                self.bump();
            }
            Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        } else if c.is_ascii_digit() || (c == b'.' && self.peek2().is_some_and(|d| d.is_ascii_digit())) {
            let start = self.pos;
            let mut integral = true;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            if self.peek() == Some(b'.') {
                integral = false;
                self.bump();
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
            }
            if matches!(self.peek(), Some(b'e' | b'E')) {
                integral = false;
                self.bump();
                if matches!(self.peek(), Some(b'+' | b'-')) {
                    self.bump();
                }
                if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    return Err(self.err("malformed exponent"));
                }
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let v = text.parse::<f64>().map_err(|_| self.err(format!("bad number `{text}`")))?;
            Tok::Num(v, integral)
        } else if c == b'"' {
            self.bump();
            let start = self.pos;
            while self.peek().is_some_and(|c| c != b'"' && c != b'\n') {
                self.bump();
            }
            if self.peek() != Some(b'"') {
                return Err(self.err("unterminated string"));
            }
            let s = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            self.bump();
            Tok::Str(s)
        } else if c == b'-' && self.peek2() == Some(b'>') {
            self.bump();
            self.bump();
            Tok::Arrow
        } else if b";,()[]+-*/".contains(&c) {
            self.bump();
            Tok::Sym(c as char)
        } else {
            return Err(self.err(format!("unexpected character `{}`", c as char)));
        };
        Ok(Token { tok, line, col })
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    cur: Token,
    register: Option<(String, u32)>,
    instructions: Vec<Instruction>,
    dropped_measures: usize,
}

enum Arg {
    Register(String),
    Indexed(String, u64),
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, QasmError> {
        let mut lex = Lexer::new(text);
        let cur = lex.next()?;
        Ok(Parser {
            lex,
            cur,
            register: None,
            instructions: Vec::new(),
            dropped_measures: 0,
        })
    }

    fn err_at(&self, tok: &Token, kind: QasmErrorKind) -> QasmError {
        QasmError {
            line: tok.line,
            col: tok.col,
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> QasmError {
        self.err_at(&self.cur, QasmErrorKind::Syntax(msg.into()))
    }

    fn advance(&mut self) -> Result<Token, QasmError> {
        let next = self.lex.next()?;
        Ok(std::mem::replace(&mut self.cur, next))
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        if self.cur.tok == Tok::Sym(c) {
            self.advance()?;
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`, found {:?}", self.cur.tok)))
        }
    }

    fn expect_ident(&mut self) -> Result<String, QasmError> {
        match self.advance()? {
            Token { tok: Tok::Ident(s), .. } => Ok(s),
            t => Err(self.err_at(&t, QasmErrorKind::Syntax(format!("expected identifier, found {:?}", t.tok)))),
        }
    }

    fn expect_int(&mut self) -> Result<u64, QasmError> {
        match self.advance()? {
            Token { tok: Tok::Num(v, true), .. } if v >= 0.0 => Ok(v as u64),
            t => Err(self.err_at(&t, QasmErrorKind::Syntax(format!("expected integer, found {:?}", t.tok)))),
        }
    }

    fn run(mut self) -> Result<Circuit, QasmError> {
        if self.cur.tok == Tok::Ident("OPENQASM".into()) {
            self.advance()?;
            match self.advance()? {
                Token { tok: Tok::Num(v, _), .. } if (v - 2.0).abs() < 1e-12 => {}
                t => {
                    return Err(self.err_at(&t, QasmErrorKind::Syntax("only OpenQASM 2.0 is supported".into())));
                }
            }
            self.expect_sym(';')?;
        }
        while self.cur.tok != Tok::Eof {
            self.statement()?;
        }
        if self.dropped_measures > 0 {
            warn!("dropped {} measure statement(s)", self.dropped_measures);
        }
        let (_, width) = self.register.unwrap_or_default();
        Ok(Circuit {
            name: self.lex.name.take().unwrap_or_else(|| "circuit".to_string()),
            width,
            instructions: self.instructions,
        })
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let start = self.cur.clone();
        let word = match &start.tok {
            Tok::Ident(w) => w.clone(),
            other => return Err(self.syntax(format!("expected statement, found {other:?}"))),
        };
        match word.as_str() {
            "include" => {
                self.advance()?;
                match self.advance()? {
                    Token { tok: Tok::Str(_), .. } => {}
                    t => return Err(self.err_at(&t, QasmErrorKind::Syntax("expected include path".into()))),
                }
                self.expect_sym(';')
            }
            "qreg" => {
                self.advance()?;
                let name = self.expect_ident()?;
                self.expect_sym('[')?;
                let size = self.expect_int()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                if self.register.is_some() {
                    return Err(self.err_at(&start, QasmErrorKind::MultipleRegisters));
                }
                let size = u32::try_from(size).map_err(|_| self.err_at(&start, QasmErrorKind::Syntax("register too large".into())))?;
                self.register = Some((name, size));
                Ok(())
            }
            "creg" => {
                self.advance()?;
                self.expect_ident()?;
                self.expect_sym('[')?;
                self.expect_int()?;
                self.expect_sym(']')?;
                self.expect_sym(';')
            }
            "measure" => {
                self.advance()?;
                self.argument()?;
                if self.cur.tok != Tok::Arrow {
                    return Err(self.syntax("expected `->`"));
                }
                self.advance()?;
                self.expect_ident()?;
                if self.cur.tok == Tok::Sym('[') {
                    self.advance()?;
                    self.expect_int()?;
                    self.expect_sym(']')?;
                }
                self.expect_sym(';')?;
                self.dropped_measures += 1;
                Ok(())
            }
            "gate" | "opaque" | "if" | "reset" => {
                Err(self.syntax(format!("unsupported statement `{word}`")))
            }
            _ => self.gate(start, &word),
        }
    }

    fn argument(&mut self) -> Result<(Token, Arg), QasmError> {
        let tok = self.cur.clone();
        let name = self.expect_ident()?;
        if self.cur.tok == Tok::Sym('[') {
            self.advance()?;
            let idx = self.expect_int()?;
            self.expect_sym(']')?;
            Ok((tok, Arg::Indexed(name, idx)))
        } else {
            Ok((tok, Arg::Register(name)))
        }
    }

    fn resolve(&self, tok: &Token, arg: Arg) -> Result<Vec<u32>, QasmError> {
        let Some((reg, size)) = &self.register else {
            return Err(self.err_at(tok, QasmErrorKind::MissingRegister));
        };
        let (name, index) = match arg {
            Arg::Register(name) => (name, None),
            Arg::Indexed(name, i) => (name, Some(i)),
        };
        if &name != reg {
            return Err(self.err_at(tok, QasmErrorKind::UnknownRegister(name)));
        }
        match index {
            None => Ok((0..*size).collect()),
            Some(i) if i < *size as u64 => Ok(vec![i as u32]),
            Some(i) => Err(self.err_at(tok, QasmErrorKind::QubitOutOfRange { index: i, size: *size })),
        }
    }

    fn gate(&mut self, start: Token, word: &str) -> Result<(), QasmError> {
        let kind: GateKind = word
            .parse()
            .map_err(|_| self.err_at(&start, QasmErrorKind::UnknownGate(word.to_string())))?;
        self.advance()?;
        let mut params = Params::new();
        if self.cur.tok == Tok::Sym('(') {
            self.advance()?;
            if self.cur.tok != Tok::Sym(')') {
                params.push(self.expr()?);
                while self.cur.tok == Tok::Sym(',') {
                    self.advance()?;
                    params.push(self.expr()?);
                }
            }
            self.expect_sym(')')?;
        }
        let mut args = Vec::new();
        loop {
            let (tok, arg) = self.argument()?;
            args.push((tok.clone(), self.resolve(&tok, arg)?));
            if self.cur.tok == Tok::Sym(',') {
                self.advance()?;
            } else {
                break;
            }
        }
        self.expect_sym(';')?;

        let mut push = |qubits: Qubits| -> Result<(), QasmError> {
            let inst = Instruction {
                kind,
                params: params.clone(),
                qubits,
            };
            let width = self.register.as_ref().map(|r| r.1).unwrap_or(0);
            validate_instruction(self.instructions.len(), &inst, width)
                .map_err(|e| self.err_at(&start, e.into()))?;
            self.instructions.push(inst);
            Ok(())
        };

        if kind.is_barrier() {
            return push(args.into_iter().flat_map(|(_, q)| q).collect());
        }
        // Whole-register arguments broadcast only for single-qubit gates.
        if args.len() == 1 && args[0].1.len() > 1 && kind.arity() == Some(1) {
            for q in args[0].1.clone() {
                push(Qubits::from_slice(&[q]))?;
            }
            return Ok(());
        }
        if args.iter().any(|(_, q)| q.len() != 1) {
            return Err(self.err_at(&start, QasmErrorKind::Syntax(format!("register broadcast not supported for `{word}`"))));
        }
        push(args.into_iter().map(|(_, q)| q[0]).collect())
    }

    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            match self.cur.tok {
                Tok::Sym('+') => {
                    self.advance()?;
                    v += self.term()?;
                }
                Tok::Sym('-') => {
                    self.advance()?;
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.factor()?;
        loop {
            match self.cur.tok {
                Tok::Sym('*') => {
                    self.advance()?;
                    v *= self.factor()?;
                }
                Tok::Sym('/') => {
                    self.advance()?;
                    v /= self.factor()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn factor(&mut self) -> Result<f64, QasmError> {
        let t = self.advance()?;
        match t.tok {
            Tok::Sym('-') => Ok(-self.factor()?),
            Tok::Sym('+') => self.factor(),
            Tok::Num(v, _) => Ok(v),
            Tok::Ident(ref s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            ref other => Err(self.err_at(&t, QasmErrorKind::Syntax(format!("expected expression, found {other:?}")))),
        }
    }
}

pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    Parser::new(text)?.run()
}

pub fn serialize_qasm(circuit: &Circuit) -> String {
    let mut out = String::with_capacity(64 + circuit.instructions.len() * 24);
    write_header(&mut out, circuit);
    write_body(&mut out, &circuit.instructions);
    out
}

/// Like [`serialize_qasm`], with a trailing `// final_layout:` comment
/// listing the logical qubit held by each physical position.
pub fn serialize_qasm_with_layout(circuit: &Circuit, phys_to_logical: &[u32]) -> String {
    let mut out = serialize_qasm(circuit);
    out.push_str(LAYOUT_TAG);
    for l in phys_to_logical {
        let _ = write!(out, " {l}");
    }
    out.push('\n');
    out
}

/// Extracts the layout written by [`serialize_qasm_with_layout`], if any.
pub fn parse_final_layout(text: &str) -> Option<Vec<u32>> {
    let line = text.lines().rev().find(|l| l.starts_with(LAYOUT_TAG))?;
    line[LAYOUT_TAG.len()..]
        .split_whitespace()
        .map(|s| s.parse().ok())
        .collect()
}

pub(crate) fn write_header(out: &mut String, circuit: &Circuit) {
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if !circuit.name.is_empty() {
        out.push_str(NAME_TAG);
        out.push_str(&circuit.name.replace(['\n', '\r'], " "));
        out.push('\n');
    }
    let _ = writeln!(out, "qreg q[{}];", circuit.width);
}

pub(crate) fn write_body(out: &mut String, instructions: &[Instruction]) {
    for inst in instructions {
        out.push_str(inst.kind.name());
        if !inst.params.is_empty() {
            out.push('(');
            for (i, p) in inst.params.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{p:.16e}");
            }
            out.push(')');
        }
        for (i, q) in inst.qubits.iter().enumerate() {
            out.push_str(if i == 0 { " " } else { "," });
            let _ = write!(out, "q[{q}]");
        }
        out.push_str(";\n");
    }
}
