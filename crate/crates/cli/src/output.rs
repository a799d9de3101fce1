use bosegas::thermo::Quantity;
use bosegas::ExtReal;
use serde_json::{Map, Value};
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A float with 17 significant digits, as written to CSV.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "undefined".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x == 0.0 {
        format!("{:.16e}", 0.0)
    } else {
        format!("{x:.16e}")
    }
}

pub fn quantity(q: Quantity) -> String {
    match q {
        Quantity::Finite(x) => num(x),
        Quantity::Infinity => "inf".into(),
        Quantity::Undefined => "undefined".into(),
    }
}

pub fn ext(x: ExtReal) -> String {
    num(x.to_f64())
}

/// Resolved configuration, echoed as `# key: value` lines or a JSON object.
#[derive(Debug, Default)]
pub struct Echo {
    entries: Vec<(String, Value, String)>,
}

impl Echo {
    pub fn float(&mut self, key: &str, x: f64) -> &mut Self {
        let v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        self.entries.push((key.into(), v, num(x)));
        self
    }

    pub fn int(&mut self, key: &str, x: u64) -> &mut Self {
        self.entries.push((key.into(), Value::from(x), x.to_string()));
        self
    }

    pub fn text(&mut self, key: &str, s: &str) -> &mut Self {
        self.entries.push((key.into(), Value::from(s), s.to_string()));
        self
    }

    pub fn flag(&mut self, key: &str, b: bool) -> &mut Self {
        self.entries.push((key.into(), Value::from(b), b.to_string()));
        self
    }

    pub fn opt_int(&mut self, key: &str, x: Option<usize>) -> &mut Self {
        match x {
            Some(x) => self.int(key, x as u64),
            None => self.text(key, "none"),
        }
    }

    pub fn write_comments(&self, w: &mut dyn Write) -> io::Result<()> {
        for (k, _, s) in &self.entries {
            writeln!(w, "# {k}: {s}")?;
        }
        Ok(())
    }

    pub fn json(&self) -> Value {
        let mut m = Map::new();
        for (k, v, _) in &self.entries {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }
}

/// Writes `# ` comment lines, then a CSV table.
pub fn write_csv(
    w: &mut dyn Write,
    echo: &Echo,
    notes: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    echo.write_comments(w)?;
    for n in notes {
        writeln!(w, "# {n}")?;
    }
    let mut cw = csv::Writer::from_writer(w);
    cw.write_record(header)?;
    for r in rows {
        cw.write_record(r)?;
    }
    cw.flush()
}

/// Writes `{"config": .., <body>}` as pretty JSON.
pub fn write_json(w: &mut dyn Write, echo: &Echo, body: Value) -> io::Result<()> {
    let mut m = Map::new();
    m.insert("config".into(), echo.json());
    match body {
        Value::Object(b) => m.extend(b),
        other => {
            m.insert("result".into(), other);
        }
    }
    serde_json::to_writer_pretty(&mut *w, &Value::Object(m))?;
    writeln!(w)
}
