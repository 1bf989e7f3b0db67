//! Surface syntax: lexing, parsing, and desugaring into the normalized core
//! program. Also hosts the ground-term reader used for fact ingestion.

pub mod ast;
pub mod desugar;
pub mod grammar;
pub mod ground;
pub mod lex;

use flg_core::diag::{Diagnostic, SourceMap};
use flg_core::term::Program;

/// Parse and desugar a set of named sources into one program. The sources
/// form a single namespace; declarations may reference any file.
pub fn load_program(sources: &[(&str, &str)]) -> (SourceMap, Result<Program, Vec<Diagnostic>>) {
    let mut map = SourceMap::new();
    let mut decls = Vec::new();
    let mut errs = Vec::new();
    for (path, text) in sources {
        let id = map.add_file(path, text);
        match lex::tokenize(text, id) {
            Ok(toks) => match grammar::parse_decls(&toks) {
                Ok(ds) => decls.extend(ds),
                Err(d) => errs.push(d),
            },
            Err(d) => errs.push(d),
        }
    }
    if !errs.is_empty() {
        return (map, Err(errs));
    }
    (map, desugar::lower(decls))
}

/// Convenience wrapper for one anonymous source.
pub fn load_source(text: &str) -> Result<Program, Vec<Diagnostic>> {
    load_program(&[("<input>", text)]).1
}
