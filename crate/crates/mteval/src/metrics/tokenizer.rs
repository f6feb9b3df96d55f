//! mteval-v13a-compatible tokenization.
//!
//! The scheme, applied in order: unescape the four XML entities and drop
//! `<skipped>` tags; pad with spaces; put spaces around every ASCII symbol
//! except period, comma, and dash; split period/comma away from non-digit
//! neighbours; split a dash that follows a digit; then split on whitespace.
//! Case is preserved. Non-ASCII punctuation is left attached, matching the
//! reference scheme.

/// A segment's tokens together with the text they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSegment {
    tokens: Vec<String>,
    original: String,
}

impl TokenizedSegment {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn original(&self) -> &str {
        &self.original
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

// ASCII symbols always separated: everything in 0x20..=0x7E that is not a
// letter, digit, period, comma, dash, or apostrophe-quote... precisely the
// ranges space-&, (-+, /, :-@, [-`, {-~ of the reference implementation.
fn always_split(c: char) -> bool {
    matches!(c,
        ' '..='&' | '('..='+' | '/' | ':'..='@' | '['..='`' | '{'..='~')
}

fn is_ascii_digit(c: char) -> bool {
    c.is_ascii_digit()
}

/// Insert spaces around single characters for which `pair_rule` fires on the
/// (previous, current) character pair; mirrors one left-to-right
/// non-overlapping regex substitution pass over a two-character pattern.
fn split_pairs(text: &str, rule: impl Fn(char, char) -> PairAction) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 16);
    let mut i = 0;
    while i < chars.len() {
        if i + 1 < chars.len() {
            match rule(chars[i], chars[i + 1]) {
                PairAction::Split => {
                    out.push(chars[i]);
                    out.push(' ');
                    out.push(chars[i + 1]);
                    out.push(' ');
                    i += 2;
                    continue;
                }
                PairAction::SplitBefore => {
                    out.push(' ');
                    out.push(chars[i]);
                    out.push(' ');
                    out.push(chars[i + 1]);
                    i += 2;
                    continue;
                }
                PairAction::Keep => {}
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

enum PairAction {
    Keep,
    /// `ab` -> `a b ` (space between and after).
    Split,
    /// `ab` -> ` a b` (space before and between).
    SplitBefore,
}

/// Tokenize one segment. Empty input gives an empty token sequence;
/// deterministic for fixed input.
pub fn tokenize(segment: &str) -> TokenizedSegment {
    let mut text = segment.replace("<skipped>", "");
    text = text.replace("&quot;", "\"");
    text = text.replace("&amp;", "&");
    text = text.replace("&lt;", "<");
    text = text.replace("&gt;", ">");

    let mut padded = String::with_capacity(text.len() + 2);
    padded.push(' ');
    padded.push_str(&text);
    padded.push(' ');

    // Symbols other than . , - always become their own tokens.
    let mut staged = String::with_capacity(padded.len() * 2);
    for c in padded.chars() {
        if always_split(c) && c != ' ' {
            staged.push(' ');
            staged.push(c);
            staged.push(' ');
        } else {
            staged.push(c);
        }
    }

    // Period/comma split off when adjacent to a non-digit.
    let staged = split_pairs(&staged, |a, b| {
        if !is_ascii_digit(a) && (b == '.' || b == ',') {
            PairAction::Split
        } else {
            PairAction::Keep
        }
    });
    let staged = split_pairs(&staged, |a, b| {
        if (a == '.' || a == ',') && !is_ascii_digit(b) {
            PairAction::SplitBefore
        } else {
            PairAction::Keep
        }
    });
    // Dash split when it follows a digit.
    let staged = split_pairs(&staged, |a, b| {
        if is_ascii_digit(a) && b == '-' {
            PairAction::Split
        } else {
            PairAction::Keep
        }
    });

    TokenizedSegment {
        tokens: staged.split_whitespace().map(str::to_string).collect(),
        original: segment.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).tokens().to_vec()
    }

    #[test]
    fn punctuation_is_separated() {
        assert_eq!(toks("Hello, world!"), ["Hello", ",", "world", "!"]);
        assert_eq!(toks("end. Next"), ["end", ".", "Next"]);
        assert_eq!(toks("(a)"), ["(", "a", ")"]);
        assert_eq!(toks(".."), [".", "."]);
    }

    #[test]
    fn empty_and_whitespace() {
        assert!(toks("").is_empty());
        assert!(toks("   ").is_empty());
        assert_eq!(toks("a  b"), ["a", "b"]);
        assert_eq!(toks("  a\tb "), ["a", "b"]);
    }

    #[test]
    fn digits_keep_period_comma_and_split_dash() {
        assert_eq!(toks("3.5"), ["3.5"]);
        assert_eq!(toks("1,234.56"), ["1,234.56"]);
        assert_eq!(toks("5-6"), ["5", "-", "6"]);
        assert_eq!(toks("a-b"), ["a-b"]);
        assert_eq!(toks("it costs 3.5, not 4."), ["it", "costs", "3.5", ",", "not", "4", "."]);
    }

    #[test]
    fn apostrophe_stays_attached() {
        assert_eq!(toks("It's fine"), ["It's", "fine"]);
    }

    #[test]
    fn entities_are_unescaped() {
        assert_eq!(toks("&quot;Hi&quot;"), ["\"", "Hi", "\""]);
        assert_eq!(toks("A &amp; B"), ["A", "&", "B"]);
        assert_eq!(toks("a<skipped>b"), ["ab"]);
    }

    #[test]
    fn case_is_preserved_and_non_ascii_attached() {
        assert_eq!(toks("Der Hund"), ["Der", "Hund"]);
        // Non-ASCII punctuation is not in the split set.
        assert_eq!(toks("„Hallo“"), ["„Hallo“"]);
    }

    proptest! {
        #[test]
        fn tokens_never_contain_whitespace(s in "[ -~]{0,40}") {
            for token in tokenize(&s).tokens() {
                prop_assert!(!token.chars().any(char::is_whitespace));
                prop_assert!(!token.is_empty());
            }
        }

        #[test]
        fn tokenization_is_deterministic(s in "\\PC{0,40}") {
            prop_assert_eq!(tokenize(&s).tokens().to_vec(), tokenize(&s).tokens().to_vec());
        }

        #[test]
        fn plain_words_split_like_whitespace(s in "[a-zA-Z]{1,8}( [a-zA-Z]{1,8}){0,5}") {
            let expected: Vec<String> = s.split_whitespace().map(str::to_string).collect();
            prop_assert_eq!(tokenize(&s).tokens().to_vec(), expected);
        }
    }
}
