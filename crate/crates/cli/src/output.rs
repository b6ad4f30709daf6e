//! Output documents: JSON with lossless numbers, or RFC-4180 CSV.

use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: &str = "1.0";

pub const DIMENSIONLESS: &str = "dimensionless";
pub const WIDTHS: &str = "dimensionless (Δp units)";

/// 17 significant digits, enough to round-trip any `f64`. Non-finite values
/// become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// One column of a tabular result.
pub struct Column {
    pub name: String,
    pub unit: &'static str,
    pub values: Vec<f64>,
}

pub struct Document {
    command: &'static str,
    inputs: Map<String, Value>,
    results: Map<String, Value>,
    warnings: Vec<String>,
    table: Vec<Column>,
}

impl Document {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: Map::new(),
            results: Map::new(),
            warnings: Vec::new(),
            table: Vec::new(),
        }
    }

    pub fn input(&mut self, name: &str, value: Value) {
        self.inputs.insert(name.to_string(), value);
    }

    pub fn scalar(&mut self, name: &str, value: f64, unit: &str) {
        if !value.is_finite() {
            self.warn(format!("{name} is not finite ({value}); reported as null"));
        }
        self.results.insert(name.to_string(), entry(num(value), unit));
    }

    pub fn count(&mut self, name: &str, value: u64, unit: &str) {
        self.results.insert(name.to_string(), entry(Value::from(value), unit));
    }

    pub fn label(&mut self, name: &str, value: &str) {
        self.results.insert(name.to_string(), entry(Value::from(value), "label"));
    }

    pub fn column(&mut self, name: &str, unit: &'static str, values: Vec<f64>) {
        if values.iter().any(|v| !v.is_finite()) {
            self.warn(format!("column {name} has non-finite entries; reported as null"));
        }
        self.table.push(Column {
            name: name.to_string(),
            unit,
            values,
        });
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn to_json(&self) -> String {
        let mut results = self.results.clone();
        for c in &self.table {
            let values = Value::Array(c.values.iter().map(|&v| num(v)).collect());
            results.insert(c.name.clone(), entry(values, c.unit));
        }
        let mut doc = Map::new();
        doc.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        doc.insert("command".into(), Value::from(self.command));
        doc.insert("inputs".into(), Value::Object(self.inputs.clone()));
        doc.insert("results".into(), Value::Object(results));
        doc.insert("warnings".into(), Value::from(self.warnings.clone()));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("document serializes");
        s.push('\n');
        s
    }

    /// The table if there is one, else `name,value,unit` rows for the scalars.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.table.is_empty() {
            w.write_record(["name", "value", "unit"])?;
            for (name, e) in &self.results {
                let value = match &e["value"] {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    v => v.to_string(),
                };
                let unit = e["unit"].as_str().unwrap_or_default();
                w.write_record([name.as_str(), value.as_str(), unit])?;
            }
        } else {
            w.write_record(self.table.iter().map(|c| c.name.as_str()))?;
            let rows = self.table[0].values.len();
            for i in 0..rows {
                w.write_record(self.table.iter().map(|c| fmt_num(c.values[i])))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Scalar results as `name = value unit` lines, used next to a CSV table.
    pub fn scalar_summary(&self) -> String {
        let mut s = String::new();
        for (name, e) in &self.results {
            let unit = e["unit"].as_str().unwrap_or_default();
            s.push_str(&format!("{name} = {} {unit}\n", e["value"]));
        }
        s
    }

    pub fn has_table(&self) -> bool {
        !self.table.is_empty()
    }
}

fn entry(value: Value, unit: &str) -> Value {
    let mut m = Map::new();
    m.insert("value".into(), value);
    m.insert("unit".into(), Value::from(unit));
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1.668575e-27, -2.5e300, 5e-324] {
            let v = num(x);
            let back: f64 = v.to_string().parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn non_finite_is_flagged() {
        let mut d = Document::new("exact");
        d.scalar("x", f64::INFINITY, DIMENSIONLESS);
        assert_eq!(d.warnings().len(), 1);
        assert!(d.to_json().contains("\"value\": null"));
    }
}
