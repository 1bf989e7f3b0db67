//! Source spans and diagnostics. Rendered as
//! `path:line:col: severity: rule-name: message`, one per line.

use std::fmt;

/// Byte range within one source file. `file` indexes into a [`SourceMap`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Span {
    pub file: u16,
    pub lo: u32,
    pub hi: u32,
}

impl Span {
    pub const DUMMY: Span = Span { file: u16::MAX, lo: 0, hi: 0 };

    pub fn new(file: u16, lo: u32, hi: u32) -> Span {
        Span { file, lo, hi }
    }

    pub fn to(self, other: Span) -> Span {
        Span { file: self.file, lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn is_dummy(self) -> bool {
        self.file == u16::MAX
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

/// One rejection or warning. `rule` names the judgment that failed
/// (for typing diagnostics, the rule of the formal system; for other
/// stages, the pass: "syntax", "desugar", "stratification", ...).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule: String,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(rule: &str, message: impl Into<String>, span: Span) -> Diagnostic {
        Diagnostic { severity: Severity::Error, rule: rule.to_string(), message: message.into(), span }
    }

    pub fn warning(rule: &str, message: impl Into<String>, span: Span) -> Diagnostic {
        Diagnostic { severity: Severity::Warning, rule: rule.to_string(), message: message.into(), span }
    }

    pub fn render(&self, map: &SourceMap) -> String {
        let (path, line, col) = map.locate(self.span);
        format!("{}:{}:{}: {}: {}: {}", path, line, col, self.severity, self.rule, self.message)
    }
}

/// Registry of loaded source files; resolves spans to line/column.
#[derive(Default, Debug)]
pub struct SourceMap {
    files: Vec<SourceFile>,
}

#[derive(Debug)]
struct SourceFile {
    path: String,
    line_starts: Vec<u32>,
}

impl SourceMap {
    pub fn new() -> SourceMap {
        SourceMap::default()
    }

    pub fn add_file(&mut self, path: &str, text: &str) -> u16 {
        let mut line_starts = vec![0u32];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i as u32 + 1);
            }
        }
        self.files.push(SourceFile { path: path.to_string(), line_starts });
        (self.files.len() - 1) as u16
    }

    /// (path, 1-based line, 1-based column) for a span's start.
    pub fn locate(&self, span: Span) -> (&str, u32, u32) {
        if span.is_dummy() || span.file as usize >= self.files.len() {
            return ("<builtin>", 0, 0);
        }
        let f = &self.files[span.file as usize];
        let line_idx = match f.line_starts.binary_search(&span.lo) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let col = span.lo - f.line_starts[line_idx] + 1;
        (&f.path, line_idx as u32 + 1, col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_lines_and_columns() {
        let mut map = SourceMap::new();
        let id = map.add_file("a.flg", "abc\ndef\n");
        assert_eq!(map.locate(Span::new(id, 0, 1)), ("a.flg", 1, 1));
        assert_eq!(map.locate(Span::new(id, 4, 5)), ("a.flg", 2, 1));
        assert_eq!(map.locate(Span::new(id, 6, 7)), ("a.flg", 2, 3));
    }

    #[test]
    fn render_format() {
        let mut map = SourceMap::new();
        let id = map.add_file("p.flg", "xy\n");
        let d = Diagnostic::error("e-Var", "unbound variable Y", Span::new(id, 1, 2));
        assert_eq!(d.render(&map), "p.flg:1:2: error: e-Var: unbound variable Y");
    }
}
