use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;

use super::{fbeta, ratio, EvalError};
use crate::retrieval::{Candidate, SpanKey};

/// Relevance labels for (entity, occurrence) pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Judgments {
    labels: HashMap<(String, SpanKey), bool>,
    relevant_per_entity: BTreeMap<String, usize>,
}

impl Judgments {
    pub fn insert(&mut self, entity_id: &str, key: SpanKey, relevant: bool) -> Result<(), EvalError> {
        let k = (entity_id.to_string(), key);
        if self.labels.contains_key(&k) {
            let (entity, key) = k;
            return Err(EvalError::DuplicateJudgment {
                entity,
                doc: key.doc_id,
                start: key.char_start,
                end: key.char_end,
            });
        }
        self.labels.insert(k, relevant);
        let count = self.relevant_per_entity.entry(entity_id.to_string()).or_default();
        if relevant {
            *count += 1;
        }
        Ok(())
    }

    /// Parse `entity_id\tdoc_id\tchar_start\tchar_end\trelevant(0|1)`.
    /// Blank lines and `#` comments are skipped.
    pub fn read<R: BufRead>(r: R) -> Result<Self, EvalError> {
        let mut out = Judgments::default();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| EvalError::Judgments { line: i + 1, reason };
            let f: Vec<&str> = line.split('\t').collect();
            let [entity, doc, start, end, rel] = f[..] else {
                return Err(err(format!("expected 5 tab-separated fields, found {}", f.len())));
            };
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad offset `{s}`")));
            let relevant = match rel {
                "1" => true,
                "0" => false,
                other => return Err(err(format!("relevance must be 0 or 1, got `{other}`"))),
            };
            let key = SpanKey { doc_id: doc.to_string(), char_start: num(start)?, char_end: num(end)? };
            out.insert(entity, key, relevant)?;
        }
        Ok(out)
    }

    pub fn get(&self, entity_id: &str, key: &SpanKey) -> Option<bool> {
        self.labels.get(&(entity_id.to_string(), key.clone())).copied()
    }

    pub fn relevant_count(&self, entity_id: &str) -> usize {
        self.relevant_per_entity.get(entity_id).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalRow {
    pub method: String,
    pub retrieved: usize,
    pub relevant_retrieved: usize,
    pub total_relevant: usize,
    pub precision: f64,
    pub recall: f64,
    pub fbeta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalReport {
    pub beta: f64,
    /// Sorted by descending F_β, then method name.
    pub rows: Vec<RetrievalRow>,
    /// Retrieved occurrences without a judgment (counted as not relevant).
    pub warnings: Vec<String>,
}

/// Score each method's top `top_k` results per entity against the
/// judgments. Recall is relative to all relevant occurrences judged for the
/// entities the method was run on.
pub fn evaluate_retrieval(
    results: &[(String, BTreeMap<String, Vec<Candidate>>)],
    judgments: &Judgments,
    top_k: usize,
    beta: f64,
) -> RetrievalReport {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (method, per_entity) in results {
        let mut retrieved = 0;
        let mut relevant_retrieved = 0;
        let mut total_relevant = 0;
        for (entity, list) in per_entity {
            total_relevant += judgments.relevant_count(entity);
            for c in list.iter().take(top_k) {
                retrieved += 1;
                match judgments.get(entity, &c.key()) {
                    Some(true) => relevant_retrieved += 1,
                    Some(false) => {}
                    None => warnings.push(format!(
                        "unjudged result: method={method} entity={entity} doc={} span={}..{}",
                        c.doc_id, c.char_start, c.char_end
                    )),
                }
            }
        }
        let precision = ratio(relevant_retrieved, retrieved);
        let recall = ratio(relevant_retrieved, total_relevant);
        rows.push(RetrievalRow {
            method: method.clone(),
            retrieved,
            relevant_retrieved,
            total_relevant,
            precision,
            recall,
            fbeta: fbeta(precision, recall, beta),
        });
    }
    rows.sort_by(|a, b| b.fbeta.total_cmp(&a.fbeta).then_with(|| a.method.cmp(&b.method)));
    RetrievalReport { beta, rows, warnings }
}

impl fmt::Display for RetrievalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.method.len()).max().unwrap_or(0).max(6);
        writeln!(f, "{:<width$}  {:>9}  {:>9}  {:>9}", "Method", "Precision", "Recall", format!("F_{}", self.beta))?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<width$}  {:>8.2}%  {:>8.2}%  {:>8.2}%",
                r.method,
                100.0 * r.precision,
                100.0 * r.recall,
                100.0 * r.fbeta
            )?;
        }
        if !self.warnings.is_empty() {
            writeln!(f)?;
            writeln!(f, "Warnings:")?;
            for w in &self.warnings {
                writeln!(f, "  {w}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::Method;

    fn cand(doc: &str, a: usize, b: usize) -> Candidate {
        Candidate {
            doc_id: doc.into(),
            char_start: a,
            char_end: b,
            matched_text: String::new(),
            score: 0.0,
            method: Method::Jaccard,
        }
    }

    const JUDGMENTS: &str = "\
E1\td1\t0\t5\t1
E1\td1\t10\t15\t1
E1\td2\t0\t5\t0
E2\td1\t20\t25\t1
E3\td3\t0\t4\t1
E3\td3\t9\t13\t0
";

    #[test]
    fn hand_counted_table() {
        let j = Judgments::read(JUDGMENTS.as_bytes()).unwrap();
        assert_eq!(j.len(), 6);
        let a: BTreeMap<String, Vec<Candidate>> = [
            ("E1".to_string(), vec![cand("d1", 0, 5), cand("d2", 0, 5)]),
            ("E2".to_string(), vec![cand("d1", 20, 25)]),
            ("E3".to_string(), vec![cand("d3", 0, 4), cand("d3", 9, 13), cand("d9", 0, 1)]),
        ]
        .into();
        let b: BTreeMap<String, Vec<Candidate>> =
            [("E1".to_string(), vec![cand("d1", 10, 15)]), ("E2".to_string(), vec![]), ("E3".to_string(), vec![])]
                .into();
        let report = evaluate_retrieval(&[("a".into(), a), ("b".into(), b)], &j, 10, 0.25);
        // a: 6 retrieved, 3 relevant of 4 total; b: 1 retrieved, 1 relevant
        let rb = &report.rows[0];
        assert_eq!((rb.method.as_str(), rb.retrieved, rb.relevant_retrieved, rb.total_relevant), ("b", 1, 1, 4));
        assert_eq!((rb.precision, rb.recall), (1.0, 0.25));
        let ra = &report.rows[1];
        assert_eq!((ra.retrieved, ra.relevant_retrieved, ra.total_relevant), (6, 3, 4));
        assert_eq!((ra.precision, ra.recall), (0.5, 0.75));
        let f = 1.0625 * 0.5 * 0.75 / (0.0625 * 0.5 + 0.75);
        assert!((ra.fbeta - f).abs() < 1e-12);
        assert_eq!(report.warnings.len(), 1);
        let text = report.to_string();
        let line_b = text.lines().find(|l| l.starts_with("b ")).unwrap();
        assert!(line_b.contains("100.00%") && line_b.contains("25.00%"));
        assert!(text.contains("Warnings:"));
    }

    #[test]
    fn top_k_and_empty() {
        let j = Judgments::read(JUDGMENTS.as_bytes()).unwrap();
        let a: BTreeMap<String, Vec<Candidate>> = [("E1".to_string(), vec![cand("d2", 0, 5), cand("d1", 0, 5)])].into();
        let r = evaluate_retrieval(&[("a".into(), a)], &j, 1, 0.25);
        assert_eq!((r.rows[0].precision, r.rows[0].recall), (0.0, 0.0));
        let none: BTreeMap<String, Vec<Candidate>> = [("E1".to_string(), vec![])].into();
        let r = evaluate_retrieval(&[("n".into(), none)], &j, 10, 0.25);
        assert_eq!((r.rows[0].precision, r.rows[0].recall, r.rows[0].fbeta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn malformed_judgments() {
        assert!(Judgments::read("E1\td1\t0\t5\t2\n".as_bytes()).is_err());
        assert!(Judgments::read("E1\td1\t0\t5\n".as_bytes()).is_err());
        let dup = Judgments::read("E1\td1\t0\t5\t1\nE1\td1\t0\t5\t0\n".as_bytes()).unwrap_err();
        assert_eq!(dup.name(), "DuplicateJudgment");
    }
}
