//! Co-c.e. sets whose complement enumeration comes from outside: an
//! external program or a closure.

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::{dummy_ball, CoCeSet, SetSpec};
use crate::error::{Error, Result};
use crate::space::{decode_ball, Ball, Space};

/// Lines read from a program before its stream is treated as periodic.
pub const PROGRAM_LINE_CAP: usize = 1 << 24;

struct Stream {
    child: Option<Child>,
    reader: Option<BufReader<ChildStdout>>,
    cache: Vec<Ball>,
    done: bool,
}

/// Complement balls read line by line from an executable's standard output.
/// Each line is a ball `{"center": [..], "radius": "p/q"}` or a decimal
/// ball code; bad lines are skipped with a warning.
///
/// `f(t)` is line `t`. Once the stream ends after `N > 0` lines,
/// `f(t) = f(t mod N)`; an empty stream yields a ball far outside the
/// bounding ball.
pub struct ProgramSet {
    program: PathBuf,
    args: Vec<String>,
    bounding: Ball,
    space: Space,
    stream: Mutex<Stream>,
}

impl ProgramSet {
    pub fn spawn(space: &Space, program: &Path, args: &[String], bounding: Ball) -> Result<ProgramSet> {
        space.check_point(bounding.center())?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Program(format!("cannot start {}: {e}", program.display())))?;
        let reader = child.stdout.take().map(BufReader::new);
        Ok(ProgramSet {
            program: program.to_path_buf(),
            args: args.to_vec(),
            bounding,
            space: space.clone(),
            stream: Mutex::new(Stream { child: Some(child), reader, cache: Vec::new(), done: false }),
        })
    }

    fn parse_line(&self, line: &str) -> Result<Ball> {
        let t = line.trim();
        let ball = if t.bytes().all(|b| b.is_ascii_digit()) {
            let code: BigUint = t.parse().map_err(|_| Error::Format(format!("bad ball code {t:?}")))?;
            decode_ball(&*self.space, &code)
        } else {
            serde_json::from_str::<Ball>(t)?
        };
        self.space.check_point(ball.center())?;
        Ok(ball)
    }

    fn fill(&self, s: &mut Stream, want: usize) {
        while !s.done && s.cache.len() <= want && s.cache.len() < PROGRAM_LINE_CAP {
            let mut line = String::new();
            let read = match s.reader.as_mut() {
                Some(r) => r.read_line(&mut line),
                None => Ok(0),
            };
            match read {
                Ok(0) => s.done = true,
                Ok(_) if line.trim().is_empty() => {}
                Ok(_) => match self.parse_line(&line) {
                    Ok(b) => s.cache.push(b),
                    Err(e) => log::warn!("{}: skipping line {:?}: {e}", self.program.display(), line.trim()),
                },
                Err(e) => {
                    log::warn!("{}: read failed: {e}", self.program.display());
                    s.done = true;
                }
            }
        }
        if s.cache.len() >= PROGRAM_LINE_CAP {
            s.done = true;
        }
        if s.done {
            s.reader = None;
            if let Some(mut c) = s.child.take() {
                let _ = c.kill();
                let _ = c.wait();
            }
        }
    }

    /// Balls read so far.
    pub fn cached(&self) -> usize {
        self.stream.lock().expect("stream lock").cache.len()
    }
}

impl Drop for ProgramSet {
    fn drop(&mut self) {
        if let Ok(s) = self.stream.get_mut() {
            if let Some(mut c) = s.child.take() {
                let _ = c.kill();
                let _ = c.wait();
            }
        }
    }
}

impl CoCeSet for ProgramSet {
    fn name(&self) -> String {
        format!("custom:{}", self.program.display())
    }

    fn spec(&self) -> Option<SetSpec> {
        Some(SetSpec::Custom {
            complement_program: self.program.clone(),
            args: self.args.clone(),
            bounding_ball: self.bounding.clone(),
        })
    }

    fn bounding_ball(&self) -> &Ball {
        &self.bounding
    }

    fn complement_ball(&self, t: &BigUint) -> Ball {
        let mut s = self.stream.lock().expect("stream lock");
        let want = t.to_usize().filter(|&w| w < PROGRAM_LINE_CAP);
        self.fill(&mut s, want.unwrap_or(PROGRAM_LINE_CAP));
        let n = s.cache.len();
        if n == 0 {
            return dummy_ball(&self.bounding);
        }
        match want {
            Some(w) if w < n => s.cache[w].clone(),
            _ => {
                let r = (t % BigUint::from(n)).to_usize().expect("below n");
                s.cache[r].clone()
            }
        }
    }
}

/// A co-c.e. set given by a Rust closure.
pub struct FnSet<F> {
    name: String,
    bounding: Ball,
    f: F,
}

impl<F: Fn(&BigUint) -> Ball + Send + Sync> FnSet<F> {
    pub fn new(name: impl Into<String>, bounding: Ball, f: F) -> Self {
        FnSet { name: name.into(), bounding, f }
    }
}

impl<F: Fn(&BigUint) -> Ball + Send + Sync> CoCeSet for FnSet<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn spec(&self) -> Option<SetSpec> {
        None
    }

    fn bounding_ball(&self) -> &Ball {
        &self.bounding
    }

    fn complement_ball(&self, t: &BigUint) -> Ball {
        (self.f)(t)
    }
}
