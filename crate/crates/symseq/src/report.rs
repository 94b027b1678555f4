//! Check reports: one record per check, rendered as text or as JSON
//! objects one per line.  Failing records always carry a witness naming
//! the support point and the elements involved, enough to reproduce the
//! failure with a single follow-up command.

use serde::Serialize;

use crate::perm::ColourSet;
use crate::seq::{SeqKey, SymSeq};

/// Outcome of one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// Where a failing check can be reproduced.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// support point, written like a cardinality-table row
    pub point: String,
    /// offending elements or counts at that point
    pub elements: Vec<String>,
}

/// One check record.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Report {
    pub fn pass(check: impl Into<String>, instance: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            instance: instance.into(),
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(check: impl Into<String>, instance: impl Into<String>, witness: Witness) -> Self {
        Report {
            check: check.into(),
            instance: instance.into(),
            status: Status::Fail,
            witness: Some(witness),
        }
    }

    pub fn inconclusive(check: impl Into<String>, instance: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            instance: instance.into(),
            status: Status::Inconclusive,
            witness: None,
        }
    }

    /// Status, check and instance on one line, then one indented line per
    /// witness entry.
    pub fn render_text(&self) -> String {
        let tag = match self.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Inconclusive => "inconclusive",
        };
        let mut out = format!("{} {} ({})", tag, self.check, self.instance);
        if let Some(w) = &self.witness {
            out.push_str(&format!("\n  at {}", w.point));
            for e in &w.elements {
                out.push_str(&format!("\n    {}", e));
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// All records, one text block or one JSON object per record, newline
/// terminated.
pub fn render_all(reports: &[Report], json: bool) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&if json { r.render_json() } else { r.render_text() });
        out.push('\n');
    }
    out
}

/// A support key written `[c1 c2 ...] -> x` with colour names.
pub fn key_label(inputs: &ColourSet, outputs: &ColourSet, key: &SeqKey) -> String {
    let word = key
        .0
        .word()
        .colours()
        .iter()
        .map(|&c| inputs.name(c))
        .collect::<Vec<_>>()
        .join(" ");
    format!("[{}] -> {}", word, outputs.name(key.1))
}

/// The key label in the alphabets of the given sequence.
pub fn key_label_in(seq: &SymSeq, key: &SeqKey) -> String {
    key_label(seq.inputs(), seq.outputs(), key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{SortedWord, Word};

    #[test]
    fn json_records_carry_exactly_the_report_fields() {
        let r = Report::fail(
            "demo",
            "an instance",
            Witness {
                point: "[a a] -> a".into(),
                elements: vec!["e0".into(), "e1".into()],
            },
        );
        let v: serde_json::Value = serde_json::from_str(&r.render_json()).unwrap();
        assert_eq!(v["check"], "demo");
        assert_eq!(v["status"], "fail");
        assert_eq!(v["witness"]["point"], "[a a] -> a");
        assert_eq!(v["witness"]["elements"][1], "e1");
        let p = Report::pass("demo", "x");
        let v: serde_json::Value = serde_json::from_str(&p.render_json()).unwrap();
        assert!(v.get("witness").is_none());
    }

    #[test]
    fn text_rendering_shows_witness_lines() {
        let r = Report::fail(
            "demo",
            "case",
            Witness {
                point: "[a] -> a".into(),
                elements: vec!["count 2 vs 3".into()],
            },
        );
        let text = r.render_text();
        assert!(text.starts_with("FAIL demo (case)"));
        assert!(text.contains("\n  at [a] -> a"));
        assert!(text.contains("\n    count 2 vs 3"));
    }

    #[test]
    fn key_labels_use_colour_names() {
        let inputs = ColourSet::new(vec!["a", "b"]).unwrap();
        let outputs = ColourSet::new(vec!["x"]).unwrap();
        let key = (SortedWord::new(Word::new(vec![0, 0, 1])).unwrap(), 0);
        assert_eq!(key_label(&inputs, &outputs, &key), "[a a b] -> x");
    }
}
