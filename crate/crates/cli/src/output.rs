//! Result tables with a provenance block, written as CSV or JSON.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

/// Formula route of an emitted number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    BosonClosedForm,
    OperatorQuadrature,
    Lattice,
    EdOracle,
}

impl Route {
    pub fn tag(self) -> &'static str {
        match self {
            Self::BosonClosedForm => "boson-closed-form",
            Self::OperatorQuadrature => "operator-quadrature",
            Self::Lattice => "lattice",
            Self::EdOracle => "ed-oracle",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Real(v) => real(*v),
            Self::Int(v) => v.to_string(),
            Self::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Real(v) if v.is_finite() => json!(v),
            Self::Real(_) => Value::Null,
            Self::Int(v) => json!(v),
            Self::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e15)`.
fn real(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// `;`-joined list, used for γ vectors inside one cell.
pub fn list_cell(v: &[f64]) -> Cell {
    Cell::Text(v.iter().map(|&x| real(x)).collect::<Vec<_>>().join(";"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    cells: Vec<Cell>,
    route: String,
    status: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Rows of one command: fixed columns, then `route` and `status`.
#[derive(Debug, Clone)]
pub struct Table {
    command: String,
    params: Vec<String>,
    values: Vec<(String, Route)>,
    rows: Vec<Row>,
    config: BTreeMap<String, String>,
    diagnostics: Vec<(String, String)>,
}

impl Table {
    /// `params` are inputs, `values` outputs with the route each comes from.
    pub fn new(command: &str, params: &[&str], values: &[(&str, Route)]) -> Self {
        Self {
            command: command.to_string(),
            params: params.iter().map(|s| s.to_string()).collect(),
            values: values.iter().map(|(s, r)| (s.to_string(), *r)).collect(),
            rows: Vec::new(),
            config: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn set_config(&mut self, config: BTreeMap<String, String>) {
        self.config = config;
    }

    pub fn diagnostic(&mut self, key: &str, value: impl Into<Cell>) {
        self.diagnostics.push((key.to_string(), value.into().render()));
    }

    fn routes(&self) -> String {
        let mut r: Vec<Route> = self.values.iter().map(|(_, r)| *r).collect();
        r.sort();
        r.dedup();
        r.iter().map(|r| r.tag()).collect::<Vec<_>>().join("+")
    }

    /// Append one row; on error the outputs are NaN and the status carries the message.
    pub fn push(&mut self, params: Vec<Cell>, values: opens_core::Result<Vec<Cell>>) {
        assert_eq!(params.len(), self.params.len(), "parameter cells of {}", self.command);
        let (vals, status) = match values {
            Ok(v) => {
                assert_eq!(v.len(), self.values.len(), "value cells of {}", self.command);
                (v, "ok".to_string())
            }
            Err(e) => (vec![Cell::Real(f64::NAN); self.values.len()], format!("error: {e}")),
        };
        let mut cells = params;
        cells.extend(vals);
        self.rows.push(Row { cells, route: self.routes(), status });
    }

    /// Append a row with an explicit status, for checks that pass or fail.
    pub fn push_checked(&mut self, params: Vec<Cell>, values: Vec<Cell>, pass: bool) {
        self.push(params, Ok(values));
        if !pass {
            self.rows.last_mut().expect("row just pushed").status = "fail".into();
        }
    }

    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.status != "ok")
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Output value `column` of every row, for tests and pipelines.
    pub fn column(&self, column: &str) -> Option<Vec<Cell>> {
        let i = self.header().iter().position(|c| c == column)?;
        Some(self.rows.iter().map(|r| if i < r.cells.len() { r.cells[i].clone() } else { Cell::Text(r.status.clone()) }).collect())
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = self.params.clone();
        h.extend(self.values.iter().map(|(s, _)| s.clone()));
        h.push("route".into());
        h.push("status".into());
        h
    }

    fn provenance(&self) -> Vec<String> {
        let mut out = vec![format!("opens {}", env!("CARGO_PKG_VERSION")), format!("command: {}", self.command)];
        out.extend(self.config.iter().map(|(k, v)| format!("config: {k} = {v}")));
        out.extend(self.values.iter().map(|(s, r)| format!("column: {s} [{r}]")));
        out.extend(self.diagnostics.iter().map(|(k, v)| format!("fit: {k} = {v}")));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        let mut out = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
        for line in self.provenance() {
            out.push_str("# ");
            out.push_str(&line);
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            let mut rec: Vec<String> = r.cells.iter().map(Cell::render).collect();
            rec.push(r.route.clone());
            rec.push(r.status.clone());
            w.write_record(rec).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut v: Vec<Value> = r.cells.iter().map(Cell::json).collect();
                v.push(json!(r.route));
                v.push(json!(r.status));
                Value::Array(v)
            })
            .collect();
        let doc = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "columns": self.header(),
            "column_routes": self.values.iter().map(|(s, r)| json!([s, r.tag()])).collect::<Vec<_>>(),
            "fit": self.diagnostics.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json encoding");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}
