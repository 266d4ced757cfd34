use std::collections::BTreeMap;

use super::BootstrapError;
use crate::corpus::{project_bio, AnnotatedSentence, EntityMention, EntityType, Token};
use crate::ingest::{Document, DocumentCollection};

/// A hit mapped to its sentence, with sentence-relative offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub doc_id: String,
    pub sentence_index: usize,
    pub sentence_id: String,
    pub mention: EntityMention,
}

/// Map a document span to the sentence containing its start. The span is
/// clipped to that sentence and rebased to sentence offsets.
pub fn extract_occurrence(
    doc: &Document,
    char_start: usize,
    char_end: usize,
    entity_type: EntityType,
) -> Result<Extraction, BootstrapError> {
    let out_of_range = || BootstrapError::SpanOutOfRange { doc: doc.doc_id.clone(), start: char_start, end: char_end };
    if char_start >= char_end || char_end > doc.char_len() {
        return Err(out_of_range());
    }
    let index = doc.sentence_at(char_start).ok_or_else(out_of_range)?;
    let s = &doc.sentences[index];
    let start = char_start.max(s.char_start);
    let end = char_end.min(s.char_end);
    if start >= end {
        return Err(out_of_range());
    }
    Ok(Extraction {
        doc_id: doc.doc_id.clone(),
        sentence_index: index,
        sentence_id: doc.sentence_id(index),
        mention: EntityMention::new(entity_type, start - s.char_start, end - s.char_start),
    })
}

/// Widen a span to the tokens it touches; `None` if it touches none.
fn align(tokens: &[Token], start: usize, end: usize) -> Option<(usize, usize)> {
    let first = tokens.iter().find(|t| t.overlaps(start, end))?;
    let last = tokens.iter().rev().find(|t| t.overlaps(start, end))?;
    Some((first.char_start, last.char_end))
}

/// Keep the longest of overlapping mentions; ties go to the earlier start,
/// then PER before LOC. Returned in text order.
fn resolve_overlaps(mut mentions: Vec<EntityMention>) -> Vec<EntityMention> {
    mentions.sort_by_key(|m| (std::cmp::Reverse(m.len()), m.char_start, m.entity_type));
    let mut kept: Vec<EntityMention> = Vec::new();
    for m in mentions {
        if !kept.iter().any(|k| k.overlaps(&m)) {
            kept.push(m);
        }
    }
    kept.sort_by_key(|m| m.char_start);
    kept
}

/// One tagged sentence per distinct sentence hit, ordered by document id
/// then sentence position. Extractions naming unknown documents or
/// sentences are ignored.
pub fn merge_occurrences(collection: &DocumentCollection, extractions: &[Extraction]) -> Vec<AnnotatedSentence> {
    let mut grouped: BTreeMap<(&str, usize), Vec<&EntityMention>> = BTreeMap::new();
    for e in extractions {
        grouped.entry((e.doc_id.as_str(), e.sentence_index)).or_default().push(&e.mention);
    }
    let mut out = Vec::with_capacity(grouped.len());
    for ((doc_id, index), mentions) in grouped {
        let Some(doc) = collection.get(doc_id) else {
            continue;
        };
        if index >= doc.sentences.len() {
            continue;
        }
        let tokens = doc.sentence_tokens(index);
        let mut aligned: Vec<EntityMention> = mentions
            .into_iter()
            .filter_map(|m| {
                align(&tokens, m.char_start, m.char_end).map(|(s, e)| EntityMention::new(m.entity_type, s, e))
            })
            .collect();
        aligned.sort_by_key(|m| (m.char_start, m.char_end, m.entity_type));
        aligned.dedup();
        let kept = resolve_overlaps(aligned);
        let tags = project_bio(&tokens, &kept).expect("mentions are aligned and disjoint");
        out.push(AnnotatedSentence {
            sentence_id: doc.sentence_id(index),
            doc_id: doc.doc_id.clone(),
            language: doc.language.clone(),
            text: doc.sentence_text(index).to_string(),
            tokens,
            tags,
            gold_entities: None,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::SentenceSplitter;

    fn collection() -> DocumentCollection {
        let splitter = SentenceSplitter::default();
        DocumentCollection::new(vec![Document::new(
            "d1",
            "cs",
            "Blažek z Kralup dal Praze dům. Potom odešel.",
            &splitter,
        )])
        .unwrap()
    }

    fn ext(c: &DocumentCollection, s: usize, e: usize, ty: EntityType) -> Extraction {
        extract_occurrence(c.get("d1").unwrap(), s, e, ty).unwrap()
    }

    fn spans(s: &AnnotatedSentence) -> Vec<(EntityType, String)> {
        let chars: Vec<char> = s.text.chars().collect();
        s.mentions().into_iter().map(|m| (m.entity_type, chars[m.char_start..m.char_end].iter().collect())).collect()
    }

    #[test]
    fn extraction_rebases_and_clips() {
        let c = collection();
        let doc = c.get("d1").unwrap();
        let e = ext(&c, 31, 36, EntityType::Per);
        assert_eq!(e.sentence_id, "d1#0001");
        assert_eq!((e.mention.char_start, e.mention.char_end), (0, 5));
        // straddles the boundary: clipped to the first sentence
        let e = ext(&c, 26, 36, EntityType::Loc);
        assert_eq!(e.sentence_index, 0);
        assert_eq!(doc.slice(26, 30), "dům.");
        assert_eq!((e.mention.char_start, e.mention.char_end), (26, 30));
        let err = extract_occurrence(doc, 40, 99, EntityType::Loc).unwrap_err();
        assert_eq!(err.name(), "SpanOutOfRange");
    }

    #[test]
    fn disjoint_hits_share_a_sentence() {
        let c = collection();
        let out = merge_occurrences(&c, &[ext(&c, 20, 25, EntityType::Loc), ext(&c, 0, 6, EntityType::Per)]);
        assert_eq!(out.len(), 1);
        assert_eq!(
            spans(&out[0]),
            vec![(EntityType::Per, "Blažek".to_string()), (EntityType::Loc, "Praze".to_string()),]
        );
    }

    #[test]
    fn duplicates_collapse() {
        let c = collection();
        let e = ext(&c, 20, 25, EntityType::Loc);
        let out = merge_occurrences(&c, &[e.clone(), e]);
        assert_eq!(out[0].mentions().len(), 1);
    }

    #[test]
    fn longest_span_wins_over_nested_place() {
        let c = collection();
        let out = merge_occurrences(&c, &[ext(&c, 9, 15, EntityType::Loc), ext(&c, 0, 15, EntityType::Per)]);
        assert_eq!(spans(&out[0]), vec![(EntityType::Per, "Blažek z Kralup".to_string())]);
    }

    #[test]
    fn same_span_prefers_person_and_partial_tokens_expand() {
        let c = collection();
        let out = merge_occurrences(&c, &[ext(&c, 21, 24, EntityType::Loc), ext(&c, 20, 25, EntityType::Per)]);
        assert_eq!(spans(&out[0]), vec![(EntityType::Per, "Praze".to_string())]);
    }

    #[test]
    fn merge_is_idempotent() {
        let c = collection();
        let first = merge_occurrences(
            &c,
            &[ext(&c, 3, 12, EntityType::Loc), ext(&c, 9, 27, EntityType::Per), ext(&c, 31, 36, EntityType::Per)],
        );
        let again: Vec<Extraction> = first
            .iter()
            .flat_map(|s| {
                let index: usize = s.sentence_id.rsplit('#').next().unwrap().parse().unwrap();
                s.mentions().into_iter().map(move |m| Extraction {
                    doc_id: s.doc_id.clone(),
                    sentence_index: index,
                    sentence_id: s.sentence_id.clone(),
                    mention: m,
                })
            })
            .collect();
        assert_eq!(merge_occurrences(&c, &again), first);
    }
}
