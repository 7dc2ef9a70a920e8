//! CSV and JSON writers. Every float is printed with 17 significant digits
//! so files round-trip bit for bit; CSV lines end in a bare `\n`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no literal for these; CSV readers accept the same spelling
        format!("\"{x}\"")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Int(u64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn obj<K: Into<String>>(fields: impl IntoIterator<Item = (K, Json)>) -> Self {
        Json::Object(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn floats(xs: &[f64]) -> Self {
        Json::Array(xs.iter().copied().map(Json::Float).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
        match self {
            Json::Null => out.push_str("null"),
            Json::Int(i) => write!(out, "{i}").unwrap(),
            Json::Float(x) => out.push_str(&float(*x)),
            Json::Str(s) => quote(out, s),
            Json::Array(items) if items.iter().all(Json::is_scalar) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.write(out, depth);
                }
                out.push(']');
            }
            Json::Array(items) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    pad(out, depth + 1);
                    item.write(out, depth + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, depth);
                out.push(']');
            }
            Json::Object(fields) if fields.is_empty() => out.push_str("{}"),
            Json::Object(fields) => {
                out.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    pad(out, depth + 1);
                    quote(out, k);
                    out.push_str(": ");
                    v.write(out, depth + 1);
                    out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
                }
                pad(out, depth);
                out.push('}');
            }
        }
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Json::Array(_) | Json::Object(_))
    }
}

fn quote(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn write_json(path: &Path, value: &Json) -> io::Result<()> {
    std::fs::write(path, value.render())
}

/// Row-at-a-time CSV writer.
pub struct Csv {
    inner: BufWriter<File>,
}

pub enum Field {
    F(f64),
    U(u64),
}

impl Csv {
    pub fn create(path: &Path, header: &[&str]) -> io::Result<Self> {
        let mut inner = BufWriter::new(File::create(path)?);
        writeln!(inner, "{}", header.join(","))?;
        Ok(Self { inner })
    }

    pub fn row(&mut self, fields: &[Field]) -> io::Result<()> {
        let line: Vec<String> = fields
            .iter()
            .map(|f| match f {
                Field::F(x) => float(*x),
                Field::U(u) => u.to_string(),
            })
            .collect();
        writeln!(self.inner, "{}", line.join(","))
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}
