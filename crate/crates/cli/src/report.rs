use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::Value;

/// JSON-lines sink: stdout or a file.
pub struct Report {
    out: Box<dyn Write>,
}

impl Report {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Report { out })
    }

    pub fn line(&mut self, v: &Value) -> io::Result<()> {
        writeln!(self.out, "{v}")
    }

    pub fn lines<'a>(&mut self, vs: impl IntoIterator<Item = &'a Value>) -> io::Result<()> {
        vs.into_iter().try_for_each(|v| self.line(v))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}
