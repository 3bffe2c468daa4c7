//! Deterministic text rendering: every float is printed with 12 significant
//! digits (`{:.11e}`), so identical computations produce identical bytes.

/// Canonical float rendering: 12 significant digits, scientific notation.
/// Negative zero is normalized so equal values render equally.
pub fn fmt_f(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// One rendered cell: either a bare token (number, flag, integer) or a
/// JSON-quoted string, depending on the output format.
#[derive(Debug, Clone)]
pub enum Cell {
    /// Rendered float (valid as both CSV token and JSON number).
    Num(String),
    /// Integer count.
    Int(usize),
    /// Plain word (CSV: bare; JSON: quoted).
    Word(&'static str),
    /// Owned word for dynamic labels.
    Text(String),
}

impl Cell {
    pub fn num(x: f64) -> Self {
        Cell::Num(fmt_f(x))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Word(w) => (*w).to_string(),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Word(w) => format!("\"{w}\""),
            Cell::Text(t) => format!("\"{t}\""),
        }
    }
}

/// A rectangular table with a fixed header, renderable as CSV (header line +
/// comma rows) or JSON (`{"rows": [...]}` with one object per row, plus
/// optional top-level extras).
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    extras: Vec<(&'static str, String)>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
            extras: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Attach a top-level key rendered only in the JSON form (`value` must
    /// already be valid JSON).
    pub fn extra_json(&mut self, key: &'static str, value: String) {
        self.extras.push((key, value));
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"rows\": [\n");
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = self
                .header
                .iter()
                .zip(row)
                .map(|(k, c)| format!("\"{k}\": {}", c.json()))
                .collect();
            out.push_str("  {");
            out.push_str(&fields.join(", "));
            out.push('}');
            if i + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push(']');
        for (k, v) in &self.extras {
            out.push_str(&format!(",\n\"{k}\": {v}"));
        }
        out.push_str("}\n");
        out
    }

    pub fn render(&self, format: crate::config::FormatKind) -> String {
        match format {
            crate::config::FormatKind::Csv => self.to_csv(),
            crate::config::FormatKind::Json => self.to_json(),
        }
    }
}
