//! Translation edit rate: word-level edits (insertions, deletions,
//! substitutions, block shifts) needed to turn the hypothesis into the
//! reference, divided by the reference length.
//!
//! Shifts are chosen greedily: every round considers moving each block of up
//! to [`MAX_SHIFT_SIZE`] tokens to every position within
//! [`MAX_SHIFT_DISTANCE`], applies the one that reduces the remaining edit
//! distance the most (ties: smallest source index, then shortest block, then
//! smallest destination), and stops when no shift reduces it. Each applied
//! shift costs one edit.

use crate::error::{Error, Result};

use super::tokenizer::tokenize;
use super::{Level, MetricScore, NativeMetric, Scale};

/// Longest block a single shift may move.
pub const MAX_SHIFT_SIZE: usize = 10;
/// Furthest a block may move, measured between its old and new start index.
pub const MAX_SHIFT_DISTANCE: usize = 50;

/// Map both token sequences onto integer ids so the inner loops compare
/// machine words instead of strings.
fn intern<'a>(a: &'a [String], b: &'a [String]) -> (Vec<u32>, Vec<u32>) {
    fn encode<'a>(
        tokens: &'a [String],
        table: &mut std::collections::HashMap<&'a str, u32>,
    ) -> Vec<u32> {
        tokens
            .iter()
            .map(|t| {
                let next = table.len() as u32;
                *table.entry(t.as_str()).or_insert(next)
            })
            .collect()
    }
    let mut table = std::collections::HashMap::new();
    let ea = encode(a, &mut table);
    let eb = encode(b, &mut table);
    (ea, eb)
}

/// Unit-cost Levenshtein distance.
fn edit_distance(a: &[u32], b: &[u32]) -> u64 {
    edit_distance_within(a, b, u64::MAX).expect("unbounded")
}

/// Levenshtein distance, or None as soon as it provably exceeds `limit`.
/// Every alignment path crosses each DP row, so a row minimum above the
/// limit is a sound cutoff.
fn edit_distance_within(a: &[u32], b: &[u32], limit: u64) -> Option<u64> {
    if a.len().abs_diff(b.len()) as u64 > limit {
        return None;
    }
    let mut previous: Vec<u64> = (0..=b.len() as u64).collect();
    let mut current = vec![0u64; b.len() + 1];
    for (i, token_a) in a.iter().enumerate() {
        current[0] = i as u64 + 1;
        let mut row_min = current[0];
        for (j, token_b) in b.iter().enumerate() {
            let substitution = previous[j] + u64::from(token_a != token_b);
            let cell = substitution.min(previous[j + 1] + 1).min(current[j] + 1);
            current[j + 1] = cell;
            row_min = row_min.min(cell);
        }
        if row_min > limit {
            return None;
        }
        std::mem::swap(&mut previous, &mut current);
    }
    let distance = previous[b.len()];
    (distance <= limit).then_some(distance)
}

fn apply_shift_into(tokens: &[u32], start: usize, len: usize, dest: usize, out: &mut Vec<u32>) {
    out.clear();
    // Sequence without the block, with the block reinserted at `dest`.
    let mut rest = tokens[..start].iter().chain(&tokens[start + len..]);
    for _ in 0..dest {
        out.push(*rest.next().expect("dest within bounds"));
    }
    out.extend_from_slice(&tokens[start..start + len]);
    out.extend(rest);
}

/// Edit count of the greedy shift procedure: number of shifts applied plus
/// the remaining edit distance.
fn ter_edits(hypothesis: &[String], reference: &[String]) -> u64 {
    let (mut current, reference) = intern(hypothesis, reference);
    let mut best = edit_distance(&current, &reference);
    let mut shifts = 0u64;
    let mut buffer = Vec::with_capacity(current.len());
    loop {
        if best == 0 {
            return shifts;
        }
        let mut improvement: Option<(u64, usize, usize, usize)> = None;
        for start in 0..current.len() {
            for len in 1..=MAX_SHIFT_SIZE.min(current.len() - start) {
                for dest in 0..=current.len() - len {
                    if dest == start || start.abs_diff(dest) > MAX_SHIFT_DISTANCE {
                        continue;
                    }
                    apply_shift_into(&current, start, len, dest, &mut buffer);
                    // Ties lose to the earlier find (iteration order is the
                    // tie order), so only strictly better distances matter.
                    let bound =
                        improvement.map_or(best - 1, |(d, _, _, _)| d.saturating_sub(1));
                    let Some(distance) = edit_distance_within(&buffer, &reference, bound)
                    else {
                        continue;
                    };
                    let key = (distance, start, len, dest);
                    if improvement.is_none_or(|cur| key < cur) {
                        improvement = Some(key);
                    }
                }
            }
        }
        match improvement {
            Some((distance, start, len, dest)) => {
                apply_shift_into(&current, start, len, dest, &mut buffer);
                std::mem::swap(&mut current, &mut buffer);
                best = distance;
                shifts += 1;
            }
            None => return shifts + best,
        }
    }
}

/// Edits and reference token count for one segment; the building block for
/// corpus-level pooling and bootstrap resampling.
pub fn ter_segment_counts(hypothesis: &str, reference: &str) -> Result<(u64, u64)> {
    let ref_tokens = tokenize(reference).tokens().to_vec();
    if ref_tokens.is_empty() {
        return Err(Error::EmptyReference(0));
    }
    let hyp_tokens = tokenize(hypothesis).tokens().to_vec();
    Ok((ter_edits(&hyp_tokens, &ref_tokens), ref_tokens.len() as u64))
}

/// TER of one segment, as a ratio >= 0 (may exceed 1).
pub fn ter(hypothesis: &str, reference: &str) -> Result<MetricScore> {
    let (edits, ref_len) = ter_segment_counts(hypothesis, reference)?;
    Ok(MetricScore {
        metric: NativeMetric::Ter.id(),
        value: edits as f64 / ref_len as f64,
        scale: Scale::Ratio,
        level: Level::Segment,
    })
}

/// Corpus TER: total edits over total reference tokens (micro-average).
pub fn corpus_ter<S: AsRef<str>>(hypotheses: &[S], references: &[S]) -> Result<MetricScore> {
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            left: hypotheses.len(),
            right: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    let mut edits = 0u64;
    let mut ref_tokens = 0u64;
    for (index, (hyp, reference)) in hypotheses.iter().zip(references.iter()).enumerate() {
        let (e, r) =
            ter_segment_counts(hyp.as_ref(), reference.as_ref()).map_err(|err| match err {
                Error::EmptyReference(_) => Error::EmptyReference(index),
                other => other,
            })?;
        edits += e;
        ref_tokens += r;
    }
    Ok(MetricScore {
        metric: NativeMetric::Ter.id(),
        value: edits as f64 / ref_tokens as f64,
        scale: Scale::Ratio,
        level: Level::Corpus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn identical_segments_are_zero() {
        assert_eq!(ter("a b c", "a b c").unwrap().value, 0.0);
    }

    #[test]
    fn single_insertion() {
        let score = ter("a b c", "a b c d").unwrap();
        assert!((score.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn one_shift_beats_two_plain_edits() {
        // "c a b" -> move "c" to the end -> "a b c": one shift, no edits.
        let score = ter("c a b", "a b c").unwrap();
        assert!((score.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn shift_of_longer_block() {
        // "d e a b c" -> move "d e" behind "c": 1 shift.
        let score = ter("d e a b c", "a b c d e").unwrap();
        assert!((score.value - 0.2).abs() < 1e-12);
    }

    #[test]
    fn empty_hypothesis_is_all_deletions() {
        let score = ter("", "a b c d").unwrap();
        assert!((score.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_reference_is_an_error() {
        assert!(matches!(ter("a", ""), Err(Error::EmptyReference(_))));
        assert!(matches!(
            corpus_ter(&["a", "b"], &["a", ""]),
            Err(Error::EmptyReference(1))
        ));
    }

    #[test]
    fn ter_can_exceed_one() {
        let score = ter("x y z w v u", "a").unwrap();
        assert!(score.value > 1.0);
    }

    #[test]
    fn corpus_ter_is_ratio_of_sums() {
        // Edits 1 and 2, reference lengths 4 and 6 -> 3/10.
        let hyps = ["a b c", "x y c d e f"];
        let refs = ["a b c d", "a b c d e f"];
        let score = corpus_ter(&hyps, &refs).unwrap();
        assert!((score.value - 0.3).abs() < 1e-12);
    }

    #[test]
    fn single_segment_corpus_equals_segment_ter() {
        let corpus = corpus_ter(&["q w e"], &["q e w r"]).unwrap();
        let single = ter("q w e", "q e w r").unwrap();
        assert_eq!(corpus.value, single.value);
    }

    #[test]
    fn shifts_never_increase_cost() {
        let cases = [
            ("b a", "a b"),
            ("c a b d", "a b c d"),
            ("e d c b a", "a b c d e"),
            ("a a b b", "b b a a"),
        ];
        for (hyp, reference) in cases {
            let (h, r) = intern(&toks(hyp), &toks(reference));
            let plain = edit_distance(&h, &r);
            let with_shifts = ter_edits(&toks(hyp), &toks(reference));
            assert!(with_shifts <= plain, "{hyp} vs {reference}");
        }
    }

    /// Same greedy contract with no interning, no DP bound, and no tie
    /// skipping; guards the pruned implementation on longer sequences.
    fn unpruned_ter_edits(hypothesis: &[String], reference: &[String]) -> u64 {
        fn plain_distance(a: &[String], b: &[String]) -> u64 {
            let mut prev: Vec<u64> = (0..=b.len() as u64).collect();
            for (i, ta) in a.iter().enumerate() {
                let mut row = vec![i as u64 + 1];
                for (j, tb) in b.iter().enumerate() {
                    let sub = prev[j] + u64::from(ta != tb);
                    row.push(sub.min(prev[j + 1] + 1).min(row[j] + 1));
                }
                prev = row;
            }
            prev[b.len()]
        }
        type Candidate = ((u64, usize, usize, usize), Vec<String>);
        let mut current = hypothesis.to_vec();
        let mut best = plain_distance(&current, reference);
        let mut shifts = 0;
        loop {
            let mut winner: Option<Candidate> = None;
            for start in 0..current.len() {
                for len in 1..=MAX_SHIFT_SIZE.min(current.len() - start) {
                    for dest in 0..=current.len() - len {
                        if dest == start || start.abs_diff(dest) > MAX_SHIFT_DISTANCE {
                            continue;
                        }
                        let mut cand = current.clone();
                        let block: Vec<String> = cand.drain(start..start + len).collect();
                        cand.splice(dest..dest, block);
                        let d = plain_distance(&cand, reference);
                        if d < best {
                            let key = (d, start, len, dest);
                            if winner.as_ref().is_none_or(|(k, _)| key < *k) {
                                winner = Some((key, cand));
                            }
                        }
                    }
                }
            }
            match winner {
                Some(((d, _, _, _), cand)) => {
                    current = cand;
                    best = d;
                    shifts += 1;
                }
                None => return shifts + best,
            }
        }
    }

    #[test]
    fn pruned_search_matches_unpruned_on_longer_sequences() {
        use crate::rng::{next_below, stream_rng};
        const ALPHABET: [&str; 4] = ["w", "x", "y", "z"];
        for case in 0..150u64 {
            let mut rng = stream_rng(0x7e12, case);
            let mut draw = |max: usize, min: usize| -> Vec<String> {
                let count = min + next_below(&mut rng, (max - min + 1) as u64) as usize;
                (0..count)
                    .map(|_| ALPHABET[next_below(&mut rng, 4) as usize].to_string())
                    .collect()
            };
            let hyp = draw(9, 0);
            let reference = draw(9, 1);
            assert_eq!(
                ter_edits(&hyp, &reference),
                unpruned_ter_edits(&hyp, &reference),
                "case {case}: {hyp:?} vs {reference:?}"
            );
        }
    }

    #[test]
    fn bounded_edit_distance_matches_unbounded() {
        let pairs = [
            ("a b c d e", "a x c y e"),
            ("p q r", "r q p"),
            ("m n", "m n o p q"),
            ("", "a b"),
        ];
        for (left, right) in pairs {
            let (a, b) = intern(&toks(left), &toks(right));
            let full = edit_distance(&a, &b);
            assert_eq!(edit_distance_within(&a, &b, full), Some(full));
            if full > 0 {
                assert_eq!(edit_distance_within(&a, &b, full - 1), None);
            }
        }
    }
}
