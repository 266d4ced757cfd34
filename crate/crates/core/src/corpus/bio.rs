use super::{CorpusError, EntityMention, Label, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BioMode {
    /// Reject an I-X that does not continue an X run.
    #[default]
    Strict,
    /// Promote a stray I-X to B-X.
    Repair,
}

/// Decode a tag sequence into top-level mentions. Mention offsets come from
/// the first and last token of each run.
pub fn parse_bio(tags: &[Label], tokens: &[Token], mode: BioMode) -> Result<Vec<EntityMention>, CorpusError> {
    if tags.len() != tokens.len() {
        return Err(CorpusError::LengthMismatch { tags: tags.len(), tokens: tokens.len() });
    }
    let mut mentions: Vec<EntityMention> = Vec::new();
    let mut open: Option<EntityMention> = None;
    for (i, (&tag, tok)) in tags.iter().zip(tokens).enumerate() {
        match tag.entity_type() {
            None => mentions.extend(open.take()),
            Some(ty) if tag.is_inside() => match open.as_mut() {
                Some(m) if m.entity_type == ty => m.char_end = tok.char_end,
                _ => {
                    if mode == BioMode::Strict {
                        return Err(CorpusError::InvalidBio(i));
                    }
                    mentions.extend(open.take());
                    open = Some(EntityMention::new(ty, tok.char_start, tok.char_end));
                }
            },
            Some(ty) => {
                mentions.extend(open.take());
                open = Some(EntityMention::new(ty, tok.char_start, tok.char_end));
            }
        }
    }
    mentions.extend(open);
    Ok(mentions)
}

/// Tag tokens from top-level mentions. A mention covering part of a token
/// claims the whole token; nested mentions are ignored.
pub fn project_bio(tokens: &[Token], mentions: &[EntityMention]) -> Result<Vec<Label>, CorpusError> {
    let mut tags = vec![Label::O; tokens.len()];
    let mut owner: Vec<Option<usize>> = vec![None; tokens.len()];
    for (mi, m) in mentions.iter().enumerate() {
        let mut first = true;
        for (ti, tok) in tokens.iter().enumerate() {
            if !tok.overlaps(m.char_start, m.char_end) {
                continue;
            }
            if owner[ti].is_some() {
                return Err(CorpusError::OverlapConflict(ti));
            }
            owner[ti] = Some(mi);
            tags[ti] = if first { Label::begin(m.entity_type) } else { Label::inside(m.entity_type) };
            first = false;
        }
    }
    Ok(tags)
}

/// Rewrite every I-X whose predecessor is neither B-X nor I-X to B-X.
/// The result is always BIO-valid.
pub fn repair_bio(tags: &mut [Label]) {
    let mut prev = Label::O;
    for tag in tags.iter_mut() {
        if let Some(ty) = tag.entity_type() {
            if tag.is_inside() && prev.entity_type() != Some(ty) {
                *tag = Label::begin(ty);
            }
        }
        prev = *tag;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::EntityType::{self, Loc, Per};
    use Label::*;

    fn toks(n: usize) -> Vec<Token> {
        // one-letter tokens separated by single spaces
        (0..n).map(|i| Token::new(((b'a' + i as u8) as char).to_string(), 2 * i, 2 * i + 1)).collect()
    }

    fn span(tokens: &[Token], ty: EntityType, first: usize, last: usize) -> EntityMention {
        EntityMention::new(ty, tokens[first].char_start, tokens[last].char_end)
    }

    #[test]
    fn parse_simple() {
        let t = toks(4);
        let got = parse_bio(&[BPer, IPer, O, BLoc], &t, BioMode::Strict).unwrap();
        assert_eq!(got, vec![span(&t, Per, 0, 1), span(&t, Loc, 3, 3)]);
        assert!(parse_bio(&[O, O, O], &toks(3), BioMode::Strict).unwrap().is_empty());
    }

    #[test]
    fn parse_length_mismatch() {
        assert!(matches!(parse_bio(&[O], &toks(2), BioMode::Repair), Err(CorpusError::LengthMismatch { .. })));
    }

    #[test]
    fn stray_inside_tag() {
        let t = toks(2);
        assert_eq!(parse_bio(&[O, IPer], &t, BioMode::Repair).unwrap(), vec![span(&t, Per, 1, 1)]);
        assert_eq!(parse_bio(&[O, IPer], &t, BioMode::Strict), Err(CorpusError::InvalidBio(1)));
    }

    /// Every two-token tag pair, enumerated by hand:
    /// (tags, repair-mode runs as (type, first, last), strict-mode error position).
    #[test]
    fn all_two_token_pairs() {
        type Row = ([Label; 2], &'static [(EntityType, usize, usize)], Option<usize>);
        let table: [Row; 25] = [
            ([BPer, BPer], &[(Per, 0, 0), (Per, 1, 1)], None),
            ([BPer, IPer], &[(Per, 0, 1)], None),
            ([BPer, BLoc], &[(Per, 0, 0), (Loc, 1, 1)], None),
            ([BPer, ILoc], &[(Per, 0, 0), (Loc, 1, 1)], Some(1)),
            ([BPer, O], &[(Per, 0, 0)], None),
            ([IPer, BPer], &[(Per, 0, 0), (Per, 1, 1)], Some(0)),
            ([IPer, IPer], &[(Per, 0, 1)], Some(0)),
            ([IPer, BLoc], &[(Per, 0, 0), (Loc, 1, 1)], Some(0)),
            ([IPer, ILoc], &[(Per, 0, 0), (Loc, 1, 1)], Some(0)),
            ([IPer, O], &[(Per, 0, 0)], Some(0)),
            ([BLoc, BPer], &[(Loc, 0, 0), (Per, 1, 1)], None),
            ([BLoc, IPer], &[(Loc, 0, 0), (Per, 1, 1)], Some(1)),
            ([BLoc, BLoc], &[(Loc, 0, 0), (Loc, 1, 1)], None),
            ([BLoc, ILoc], &[(Loc, 0, 1)], None),
            ([BLoc, O], &[(Loc, 0, 0)], None),
            ([ILoc, BPer], &[(Loc, 0, 0), (Per, 1, 1)], Some(0)),
            ([ILoc, IPer], &[(Loc, 0, 0), (Per, 1, 1)], Some(0)),
            ([ILoc, BLoc], &[(Loc, 0, 0), (Loc, 1, 1)], Some(0)),
            ([ILoc, ILoc], &[(Loc, 0, 1)], Some(0)),
            ([ILoc, O], &[(Loc, 0, 0)], Some(0)),
            ([O, BPer], &[(Per, 1, 1)], None),
            ([O, IPer], &[(Per, 1, 1)], Some(1)),
            ([O, BLoc], &[(Loc, 1, 1)], None),
            ([O, ILoc], &[(Loc, 1, 1)], Some(1)),
            ([O, O], &[], None),
        ];
        let t = toks(2);
        for (tags, runs, strict_err) in table {
            let expected: Vec<_> = runs.iter().map(|&(ty, a, b)| span(&t, ty, a, b)).collect();
            assert_eq!(parse_bio(&tags, &t, BioMode::Repair).unwrap(), expected, "{tags:?}");
            match strict_err {
                Some(pos) => assert_eq!(parse_bio(&tags, &t, BioMode::Strict), Err(CorpusError::InvalidBio(pos))),
                None => assert_eq!(parse_bio(&tags, &t, BioMode::Strict).unwrap(), expected),
            }
            // repair_bio must agree with repair-mode parsing
            let mut repaired = tags;
            repair_bio(&mut repaired);
            assert_eq!(parse_bio(&repaired, &t, BioMode::Strict).unwrap(), expected);
        }
    }

    #[test]
    fn project_expands_partial_tokens() {
        let t = vec![Token::new("Kralup", 0, 6), Token::new("x", 7, 8), Token::new("y", 9, 10)];
        let m = EntityMention::new(Per, 0, 8);
        assert_eq!(project_bio(&t, &[m]).unwrap(), vec![BPer, IPer, O]);
        let mid = EntityMention::new(Loc, 2, 5);
        assert_eq!(project_bio(&t, &[mid]).unwrap(), vec![BLoc, O, O]);
    }

    #[test]
    fn project_detects_conflicts() {
        let t = toks(3);
        let a = span(&t, Per, 0, 1);
        let b = span(&t, Loc, 1, 2);
        assert_eq!(project_bio(&t, &[a, b]), Err(CorpusError::OverlapConflict(1)));
    }

    #[test]
    fn repair_rewrites_stray_inside() {
        let mut tags = [O, IPer, ILoc, ILoc];
        repair_bio(&mut tags);
        assert_eq!(tags, [O, BPer, BLoc, ILoc]);
    }
}
