//! Solver transport: persistent external processes bracketed by push/pop,
//! read-only replay transcripts, a shared never-evicted memo cache, and
//! optional transcript recording.
//!
//! Concurrency: the memo map is shared; each live solver session is used by
//! one caller at a time (sessions sit in an idle pool between queries).
//! Per-query work never leaks across queries thanks to push/pop.

use crate::query::{parse_verdict, SmtQuery, SmtVerdict};
use crate::SmtError;
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

/// Option lines differ per solver family; everything else is common
/// SMT-LIB v2.6.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Dialect {
    #[default]
    Z3,
    Cvc5,
}

impl Dialect {
    fn set_timeout(self, ms: i32) -> String {
        match self {
            Dialect::Z3 => format!("(set-option :timeout {ms})"),
            Dialect::Cvc5 => format!("(set-option :tlimit-per {ms})"),
        }
    }

    fn clear_timeout(self) -> String {
        match self {
            Dialect::Z3 => "(set-option :timeout 4294967295)".into(),
            Dialect::Cvc5 => "(set-option :tlimit-per 0)".into(),
        }
    }
}

/// Where verdicts come from.
#[derive(Clone, Debug)]
pub enum Backend {
    /// External solver executable speaking SMT-LIB v2 on stdin/stdout.
    Process { path: PathBuf, args: Vec<String>, dialect: Dialect },
    /// Canned transcripts, one file per query hash. A missing transcript is
    /// a hard failure, never a silent pass.
    Replay { dir: PathBuf },
}

/// A solver's answer to one query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reply {
    pub verdict: SmtVerdict,
    /// Raw model s-expression text, present when the query asked for a
    /// model and the verdict was sat.
    pub model: Option<String>,
}

type MemoCell = Arc<OnceLock<Result<Reply, SmtError>>>;

/// Shared query broker: memoizes by canonical script hash, pools sessions,
/// counts real dispatches, and collects serialization warnings.
pub struct Solver {
    backend: Backend,
    record_dir: Option<PathBuf>,
    memo: Mutex<HashMap<String, MemoCell>>,
    dispatches: AtomicU64,
    idle: Mutex<Vec<Session>>,
    warnings: Mutex<Vec<String>>,
}

impl Solver {
    pub fn new(backend: Backend) -> Solver {
        Solver {
            backend,
            record_dir: None,
            memo: Mutex::new(HashMap::new()),
            dispatches: AtomicU64::new(0),
            idle: Mutex::new(Vec::new()),
            warnings: Mutex::new(Vec::new()),
        }
    }

    /// Also write a replay transcript for every dispatched query.
    pub fn recording_to(mut self, dir: PathBuf) -> Solver {
        self.record_dir = Some(dir);
        self
    }

    /// Number of queries that actually reached the backend (memo misses).
    pub fn dispatch_count(&self) -> u64 {
        self.dispatches.load(Ordering::SeqCst)
    }

    pub fn push_warnings(&self, mut ws: Vec<String>) {
        if !ws.is_empty() {
            self.warnings.lock().unwrap().append(&mut ws);
        }
    }

    /// Drains accumulated warnings, deduplicated, in first-seen order.
    pub fn take_warnings(&self) -> Vec<String> {
        let mut seen = std::collections::BTreeSet::new();
        self.warnings.lock().unwrap().drain(..).filter(|w| seen.insert(w.clone())).collect()
    }

    /// Answers a query, hitting the backend at most once per distinct
    /// canonical script for the lifetime of this broker.
    pub fn check(&self, query: &SmtQuery) -> Result<Reply, SmtError> {
        let cell: MemoCell = {
            let mut memo = self.memo.lock().unwrap();
            memo.entry(query.hash().to_string()).or_default().clone()
        };
        cell.get_or_init(|| {
            self.dispatches.fetch_add(1, Ordering::SeqCst);
            let reply = self.dispatch(query);
            if let (Ok(reply), Some(dir)) = (&reply, &self.record_dir) {
                // Recording failures must not corrupt results; surface them
                // as warnings instead.
                if let Err(e) = write_transcript(dir, query, reply) {
                    self.push_warnings(vec![format!("could not record transcript: {e}")]);
                }
            }
            reply
        })
        .clone()
    }

    fn dispatch(&self, query: &SmtQuery) -> Result<Reply, SmtError> {
        match &self.backend {
            Backend::Replay { dir } => read_transcript(dir, query),
            Backend::Process { path, args, dialect } => {
                let mut session = match self.idle.lock().unwrap().pop() {
                    Some(s) => s,
                    None => Session::spawn(path, args)?,
                };
                let out = session.run(query, *dialect);
                if out.is_ok() {
                    self.idle.lock().unwrap().push(session);
                }
                out
            }
        }
    }
}

/// One live solver process. The prelude (logic, model production) is sent
/// once; each query runs inside its own push/pop frame.
struct Session {
    _child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl Session {
    fn spawn(path: &Path, args: &[String]) -> Result<Session, SmtError> {
        let mut child = Command::new(path)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SmtError::Launch(format!("{}: {e}", path.display())))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut s = Session { _child: child, stdin, stdout };
        s.send("(set-option :produce-models true)")?;
        s.send("(set-logic ALL)")?;
        Ok(s)
    }

    fn send(&mut self, line: &str) -> Result<(), SmtError> {
        writeln!(self.stdin, "{line}")
            .and_then(|()| self.stdin.flush())
            .map_err(|e| SmtError::Launch(format!("solver stdin: {e}")))
    }

    /// Reads the next meaningful reply line, tolerating option chatter.
    fn read_line(&mut self) -> Result<String, SmtError> {
        loop {
            let mut line = String::new();
            let n = self
                .stdout
                .read_line(&mut line)
                .map_err(|e| SmtError::Protocol(format!("solver stdout: {e}")))?;
            if n == 0 {
                return Err(SmtError::Protocol("solver closed its output".into()));
            }
            let t = line.trim();
            if t.is_empty() || t == "success" || t == "unsupported" {
                continue;
            }
            if t.starts_with("(error") {
                return Err(SmtError::Protocol(format!("solver error: {t}")));
            }
            return Ok(t.to_string());
        }
    }

    /// Reads one complete s-expression (the get-model reply), tracking paren
    /// depth outside string literals and comments.
    fn read_sexp(&mut self) -> Result<String, SmtError> {
        let mut out = String::new();
        let mut depth: i32 = 0;
        let mut started = false;
        let mut in_str = false;
        let mut in_comment = false;
        loop {
            let mut byte = [0u8; 1];
            match self.stdout.read(&mut byte) {
                Ok(0) => return Err(SmtError::Protocol("solver closed its output".into())),
                Ok(_) => {}
                Err(e) => return Err(SmtError::Protocol(format!("solver stdout: {e}"))),
            }
            let c = byte[0] as char;
            out.push(c);
            if in_comment {
                if c == '\n' {
                    in_comment = false;
                }
                continue;
            }
            match c {
                '"' => in_str = !in_str,
                ';' if !in_str => in_comment = true,
                '(' if !in_str => {
                    depth += 1;
                    started = true;
                }
                ')' if !in_str => depth -= 1,
                _ => {}
            }
            if started && depth == 0 {
                return Ok(out);
            }
        }
    }

    /// The wire exchange: decls and asserts inside a push/pop frame, verdict
    /// first, model only after a sat verdict.
    fn run(&mut self, query: &SmtQuery, dialect: Dialect) -> Result<Reply, SmtError> {
        if let Some(ms) = query.timeout_ms {
            self.send(&dialect.set_timeout(ms))?;
        }
        self.send("(push 1)")?;
        let outcome = self.run_body(query);
        // Leave the session reusable even when the query failed mid-way.
        let cleanup = self.send("(pop 1)").and_then(|()| {
            if query.timeout_ms.is_some() {
                self.send(&dialect.clear_timeout())
            } else {
                Ok(())
            }
        });
        let reply = outcome?;
        cleanup?;
        Ok(reply)
    }

    fn run_body(&mut self, query: &SmtQuery) -> Result<Reply, SmtError> {
        for line in query.script().lines() {
            // Session prelude already set these; get-model is sent only
            // after a sat verdict.
            if line.starts_with("(set-logic")
                || line.starts_with("(set-option :produce-models")
                || line == "(get-model)"
            {
                continue;
            }
            self.send(line)?;
        }
        let verdict = parse_verdict(&self.read_line()?)?;
        let model = if query.wants_model && verdict == SmtVerdict::Sat {
            self.send("(get-model)")?;
            Some(self.read_sexp()?)
        } else {
            None
        };
        Ok(Reply { verdict, model })
    }
}

const TRANSCRIPT_MAGIC: &str = "%% flg-replay 1";

/// Writes `<hash>.txt` atomically (temp file + rename) so concurrent
/// recorders cannot interleave.
pub fn write_transcript(dir: &Path, query: &SmtQuery, reply: &Reply) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut body = String::new();
    body.push_str(TRANSCRIPT_MAGIC);
    body.push('\n');
    body.push_str(&format!("%% request-bytes: {}\n", query.script().len()));
    body.push_str(query.script());
    body.push_str("%% reply\n");
    match reply.verdict {
        SmtVerdict::Sat => body.push_str("sat\n"),
        SmtVerdict::Unsat => body.push_str("unsat\n"),
        SmtVerdict::Unknown => body.push_str("unknown\n"),
    }
    if let Some(m) = &reply.model {
        body.push_str(m);
        if !m.ends_with('\n') {
            body.push('\n');
        }
    }
    let tmp = dir.join(format!(".{}.tmp{}", query.hash(), std::process::id()));
    std::fs::write(&tmp, &body)?;
    std::fs::rename(&tmp, dir.join(format!("{}.txt", query.hash())))
}

/// Reads the transcript for a query and re-verifies the stored request
/// bytes against the freshly serialized script, so serializer drift cannot
/// slip past a stale transcript set.
fn read_transcript(dir: &Path, query: &SmtQuery) -> Result<Reply, SmtError> {
    let path = dir.join(format!("{}.txt", query.hash()));
    let data = std::fs::read_to_string(&path)
        .map_err(|_| SmtError::ReplayMiss(format!("{} ({})", query.hash(), path.display())))?;

    let rest = data
        .strip_prefix(TRANSCRIPT_MAGIC)
        .and_then(|r| r.strip_prefix('\n'))
        .ok_or_else(|| SmtError::Protocol(format!("{}: bad transcript header", path.display())))?;
    let (len_line, rest) = rest
        .split_once('\n')
        .ok_or_else(|| SmtError::Protocol(format!("{}: truncated transcript", path.display())))?;
    let n: usize = len_line
        .strip_prefix("%% request-bytes: ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| SmtError::Protocol(format!("{}: bad request length", path.display())))?;
    if rest.len() < n {
        return Err(SmtError::Protocol(format!("{}: truncated request", path.display())));
    }
    let (request, rest) = rest.split_at(n);
    if request != query.script() {
        return Err(SmtError::Protocol(format!(
            "{}: transcript request does not match the serialized query",
            path.display()
        )));
    }
    let rest = rest
        .strip_prefix("%% reply\n")
        .ok_or_else(|| SmtError::Protocol(format!("{}: missing reply marker", path.display())))?;
    let (verdict_line, model_text) = match rest.split_once('\n') {
        Some((v, m)) => (v, m),
        None => (rest, ""),
    };
    let verdict = parse_verdict(verdict_line)?;
    let model = if query.wants_model && verdict == SmtVerdict::Sat {
        if model_text.trim().is_empty() {
            return Err(SmtError::Protocol(format!(
                "{}: sat reply is missing its model",
                path.display()
            )));
        }
        Some(model_text.to_string())
    } else {
        None
    };
    Ok(Reply { verdict, model })
}
