use std::io::{BufRead, Write};
use std::path::Path;

use vgimp_core::acts::ActInstance;
use vgimp_core::scenario::{summary, Session};
use vgimp_core::term::parse_term;
use vgimp_core::trace::emit_json;

use crate::{format_store, write_file};

const HELP: &str = "enter an act such as inform(a, b, p), or one of
  :store        print the belief spaces
  :trace        print the trace as JSON
  :dot <file>   write the last recognized plan as DOT
  :quit         leave
";

/// Reads acts from `input` until end of input or `:quit`. Scenario turns
/// are not replayed; the session starts from the declared beliefs.
pub fn repl(session: &mut Session, input: impl BufRead, mut out: impl Write) -> std::io::Result<()> {
    let mut lines = input.lines();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        let Some(line) = lines.next().transpose()? else {
            writeln!(out)?;
            return Ok(());
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (cmd, arg) = line.split_once(char::is_whitespace).map_or((line, ""), |(c, a)| (c, a.trim()));
        match cmd {
            ":quit" | ":q" => return Ok(()),
            ":help" => write!(out, "{HELP}")?,
            ":store" => write!(out, "{}", format_store(session.store()))?,
            ":trace" => write!(out, "{}", emit_json(session.trace()))?,
            ":dot" if arg.is_empty() => writeln!(out, "usage: :dot <file>")?,
            ":dot" => match session.dot() {
                None => writeln!(out, "no recognized plan yet")?,
                Some(dot) => match write_file(Path::new(arg), &dot) {
                    Ok(()) => writeln!(out, "wrote {arg}")?,
                    Err(e) => writeln!(out, "error: {e}")?,
                },
            },
            c if c.starts_with(':') => writeln!(out, "unknown command {c}; try :help")?,
            _ => {
                let act = parse_term(line).map_err(|e| e.to_string()).and_then(|t| ActInstance::from_term(&t).map_err(|e| e.to_string()));
                match act {
                    Err(e) => writeln!(out, "error: {e}")?,
                    Ok(act) => match session.step(&act) {
                        Ok(inf) => writeln!(out, "{}", summary(inf))?,
                        Err(e) => writeln!(out, "error: {e}")?,
                    },
                }
            }
        }
    }
}
