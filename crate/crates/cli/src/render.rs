use serde_json::Value;

use crate::manifest::{document, RunManifest};
use crate::Format;

/// What a command produced: the bytes for stdout, the JSON document for
/// `--out`, and the exit status.
pub struct Outcome {
    pub stdout: String,
    pub document: Vec<u8>,
    pub exit: u8,
}

pub fn pretty(doc: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(doc).expect("json value serializes");
    bytes.push(b'\n');
    bytes
}

/// Plain-text table with left-aligned columns.
pub fn text_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn csv_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

/// Standard rendering of a tabular result in the requested format.
pub fn tabular(
    format: Format,
    manifest: RunManifest,
    payload: Value,
    title: &str,
    headers: &[&str],
    rows: &[Vec<String>],
    footer: &str,
    exit: u8,
) -> Outcome {
    let manifest = manifest.seal(&payload);
    let doc = pretty(&document(&manifest, payload));
    let stdout = match format {
        Format::Json => String::from_utf8(doc.clone()).expect("utf-8 json"),
        Format::Csv => manifest.comment_lines() + &csv_table(headers, rows),
        Format::Text => {
            format!("{title}\n\n{}{footer}{}", text_table(headers, rows), manifest.comment_lines())
        }
    };
    Outcome { stdout, document: doc, exit }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_text() {
        let t = text_table(&["n", "value"], &[vec!["1".into(), "0.5".into()], vec!["10".into(), "x".into()]]);
        assert_eq!(t, "n   value\n--  -----\n1   0.5\n10  x\n");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let c = csv_table(&["a", "b"], &[vec!["1,2".into(), "3".into()]]);
        assert_eq!(c, "a,b\n\"1,2\",3\n");
    }
}
