//! Tables rendered as CSV or JSON.

use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    /// A number that may be absent (failed entry).
    Opt(Option<f64>),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// 17 significant digits, `inf`/`-inf`/`nan` for non-finite values,
    /// empty for missing ones.
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_float(*x),
            Cell::Opt(Some(x)) => fmt_float(*x),
            Cell::Opt(None) => String::new(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Non-finite and missing numbers become `null`.
    fn json(&self) -> Value {
        match self {
            Cell::Num(x) | Cell::Opt(Some(x)) => json_float(*x),
            Cell::Opt(None) => Value::Null,
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn json_float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Rows under a fixed header, plus optional summary fields (JSON only;
/// CSV callers get them on the error stream).
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Value)>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new(), summary: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &'static str, v: Value) {
        self.summary.push((key, v));
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).map_err(CliError::io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(CliError::io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_json(&self, command: &str, echo: &[(String, String)]) -> String {
        let mut config = Map::new();
        config.insert("command".into(), Value::from(command));
        for (k, v) in echo {
            match config.get_mut(k) {
                Some(Value::Array(a)) => a.push(Value::from(v.as_str())),
                Some(prev) => *prev = Value::Array(vec![prev.take(), Value::from(v.as_str())]),
                None => {
                    config.insert(k.clone(), Value::from(v.as_str()));
                }
            }
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.header.iter().zip(r).map(|(h, c)| (h.to_string(), c.json())).collect()))
            .collect();
        let mut top = Map::new();
        top.insert("config_echo".into(), Value::Object(config));
        top.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.summary {
            top.insert(k.to_string(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON serialisation");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [2.0 / 3.0, 1e-300, -5.5, 0.0, 123456789.123] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(s.split('e').next().unwrap().trim_start_matches('-').replace('.', "").len(), 17);
        }
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(json_float(f64::NAN), Value::Null);
        assert_eq!(json_float(0.5).as_f64(), Some(0.5));
    }

    #[test]
    fn csv_quotes_labels_with_commas() {
        let mut t = Table::new(&["case", "value"]);
        t.push(vec![Cell::Text("beta(alpha=2,beta=1)".into()), Cell::Num(1.0)]);
        let s = t.to_csv().unwrap();
        assert_eq!(s, "case,value\n\"beta(alpha=2,beta=1)\",1.0000000000000000e0\n");
    }

    #[test]
    fn json_mirrors_rows() {
        let mut t = Table::new(&["p", "value", "finite"]);
        t.push(vec![Cell::Num(2.0), Cell::Num(f64::INFINITY), Cell::Bool(false)]);
        let v: Value = serde_json::from_str(&t.to_json("theta", &[("d".into(), "1".into())])).unwrap();
        assert_eq!(v["config_echo"]["command"], "theta");
        assert_eq!(v["rows"][0]["value"], Value::Null);
        assert_eq!(v["rows"][0]["finite"], false);
    }
}
