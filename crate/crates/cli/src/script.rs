//! Line-oriented script grammar.
//!
//! One statement per line. Blank lines and lines starting with `#` are
//! skipped.
//!
//! ```text
//! ring T = C[[x1,x2,x3]] / (x1) & (x2,x3)
//! glue B = T at (x1,x3) , (x2,x3)
//! gluemin S = B classes {(x1),(x2) | (x3)}
//! shape B
//! preshape T at (x1,x3),(x2,x3)
//! embed chains.poset in B
//! verify B
//! report
//! ```
//!
//! A family member `(0)` denotes the zero ideal. `print` renders the
//! canonical spelling; parsing its output reproduces the script exactly.

use std::fmt;

use specglue::VarPrime;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Ring { name: String, base: String, vars: Vec<String>, family: Vec<VarPrime> },
    Glue { name: String, source: String, q1: VarPrime, q2: VarPrime },
    GlueMin { name: String, source: String, classes: Vec<Vec<VarPrime>> },
    Shape { target: String },
    Preshape { source: String, q1: VarPrime, q2: VarPrime },
    Embed { poset_file: String, target: String },
    Verify { target: String },
    Report,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub statement: Statement,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub statements: Vec<Located>,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(line_text: &str, line: usize) -> Cursor {
        Cursor { chars: line_text.chars().collect(), pos: 0, line }
    }

    fn err(&self, message: impl Into<String>) -> ScriptError {
        ScriptError { line: self.line, col: self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn symbol(&mut self, sym: &str) -> Result<(), ScriptError> {
        self.skip_ws();
        let want: Vec<char> = sym.chars().collect();
        if self.chars[self.pos..].starts_with(&want) {
            self.pos += want.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{sym}`")))
        }
    }

    fn try_symbol(&mut self, sym: &str) -> bool {
        self.skip_ws();
        let want: Vec<char> = sym.chars().collect();
        if self.chars[self.pos..].starts_with(&want) {
            self.pos += want.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ScriptError> {
        self.skip_ws();
        let start = self.pos;
        if self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphabetic() || *c == '_')
        {
            self.pos += 1;
            while self
                .chars
                .get(self.pos)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
            {
                self.pos += 1;
            }
            Ok(self.chars[start..self.pos].iter().collect())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ScriptError> {
        self.skip_ws();
        let col = self.pos;
        let got = self.ident(&format!("keyword `{word}`"))?;
        if got == word {
            Ok(())
        } else {
            self.pos = col;
            Err(self.err(format!("expected keyword `{word}`, found `{got}`")))
        }
    }

    /// A filename: any run of non-whitespace characters.
    fn path(&mut self) -> Result<String, ScriptError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && !self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        if self.pos == start {
            Err(self.err("expected a file name"))
        } else {
            Ok(self.chars[start..self.pos].iter().collect())
        }
    }

    /// `(v1,v2,...)` as a variable-generated prime; `(0)` is the zero
    /// ideal.
    fn prime(&mut self) -> Result<VarPrime, ScriptError> {
        self.symbol("(")?;
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&'0') {
            self.pos += 1;
            self.symbol(")")?;
            return Ok(VarPrime::zero());
        }
        let mut vars = vec![self.ident("a variable")?];
        while self.try_symbol(",") {
            vars.push(self.ident("a variable")?);
        }
        self.symbol(")")?;
        Ok(VarPrime::new(vars))
    }

    fn finish(&mut self, statement: Statement) -> Result<Statement, ScriptError> {
        if self.at_end() {
            Ok(statement)
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }

    fn statement(&mut self) -> Result<Statement, ScriptError> {
        let head_col = self.pos;
        let head = self.ident("a statement")?;
        match head.as_str() {
            "ring" => {
                let name = self.ident("a ring name")?;
                self.symbol("=")?;
                let base = self.ident("a base name")?;
                self.symbol("[[")?;
                let mut vars = vec![self.ident("a variable")?];
                while self.try_symbol(",") {
                    vars.push(self.ident("a variable")?);
                }
                self.symbol("]]")?;
                self.symbol("/")?;
                let mut family = vec![self.prime()?];
                while self.try_symbol("&") {
                    family.push(self.prime()?);
                }
                self.finish(Statement::Ring { name, base, vars, family })
            }
            "glue" => {
                let name = self.ident("a ring name")?;
                self.symbol("=")?;
                let source = self.ident("a ring name")?;
                self.keyword("at")?;
                let q1 = self.prime()?;
                self.symbol(",")?;
                let q2 = self.prime()?;
                self.finish(Statement::Glue { name, source, q1, q2 })
            }
            "gluemin" => {
                let name = self.ident("a shape name")?;
                self.symbol("=")?;
                let source = self.ident("a ring name")?;
                self.keyword("classes")?;
                self.symbol("{")?;
                let mut classes = Vec::new();
                loop {
                    let mut class = vec![self.prime()?];
                    while self.try_symbol(",") {
                        class.push(self.prime()?);
                    }
                    classes.push(class);
                    if !self.try_symbol("|") {
                        break;
                    }
                }
                self.symbol("}")?;
                self.finish(Statement::GlueMin { name, source, classes })
            }
            "shape" => {
                let target = self.ident("a ring or shape name")?;
                self.finish(Statement::Shape { target })
            }
            "preshape" => {
                let source = self.ident("a ring name")?;
                self.keyword("at")?;
                let q1 = self.prime()?;
                self.symbol(",")?;
                let q2 = self.prime()?;
                self.finish(Statement::Preshape { source, q1, q2 })
            }
            "embed" => {
                let poset_file = self.path()?;
                self.keyword("in")?;
                let target = self.ident("a ring or shape name")?;
                self.finish(Statement::Embed { poset_file, target })
            }
            "verify" => {
                let target = self.ident("a ring name")?;
                self.finish(Statement::Verify { target })
            }
            "report" => self.finish(Statement::Report),
            _ => {
                self.pos = head_col;
                Err(self.err(format!("unknown statement `{head}`")))
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Script, ScriptError> {
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let statement = Cursor::new(raw, line).statement()?;
        statements.push(Located { statement, line });
    }
    Ok(Script { statements })
}

fn print_prime(p: &VarPrime) -> String {
    if p.is_empty() {
        "(0)".to_string()
    } else {
        format!("({})", p.iter().cloned().collect::<Vec<_>>().join(","))
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Ring { name, base, vars, family } => {
                let members: Vec<String> = family.iter().map(print_prime).collect();
                write!(f, "ring {name} = {base}[[{}]] / {}", vars.join(","), members.join(" & "))
            }
            Statement::Glue { name, source, q1, q2 } => {
                write!(f, "glue {name} = {source} at {} , {}", print_prime(q1), print_prime(q2))
            }
            Statement::GlueMin { name, source, classes } => {
                let rendered: Vec<String> = classes
                    .iter()
                    .map(|c| c.iter().map(print_prime).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "gluemin {name} = {source} classes {{{}}}", rendered.join(" | "))
            }
            Statement::Shape { target } => write!(f, "shape {target}"),
            Statement::Preshape { source, q1, q2 } => {
                write!(f, "preshape {source} at {},{}", print_prime(q1), print_prime(q2))
            }
            Statement::Embed { poset_file, target } => write!(f, "embed {poset_file} in {target}"),
            Statement::Verify { target } => write!(f, "verify {target}"),
            Statement::Report => write!(f, "report"),
        }
    }
}

/// Canonical rendering; `parse` of the result reproduces the script.
pub fn print(script: &Script) -> String {
    let mut out = String::new();
    for located in &script.statements {
        out.push_str(&located.statement.to_string());
        out.push('\n');
    }
    out
}
