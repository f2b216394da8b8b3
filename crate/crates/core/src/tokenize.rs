//! Deterministic token counting.
//!
//! Every budget in the harness is expressed in the unit produced here.
//! The default unit is whitespace-delimited words with punctuation
//! attached to its word, which is model-independent and stable across
//! runs and platforms. A model-specific tokenizer can be plugged in via
//! the [`Tokenizer`] trait; all downstream budget arithmetic follows
//! whichever implementation is configured.

/// Pluggable token-counting unit.
pub trait Tokenizer: Send + Sync {
    fn count(&self, text: &str) -> usize;
}

/// Default tokenizer: whitespace word count, punctuation attached.
/// Repeated whitespace collapses.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceTokenizer;

impl Tokenizer for WhitespaceTokenizer {
    fn count(&self, text: &str) -> usize {
        text.split_whitespace().count()
    }
}

/// Count tokens under the default whitespace tokenizer.
pub fn count_tokens(text: &str) -> usize {
    WhitespaceTokenizer.count(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_zero() {
        assert_eq!(count_tokens(""), 0);
    }

    #[test]
    fn punctuation_attaches_to_word() {
        assert_eq!(count_tokens("Do not use external tools."), 5);
    }

    #[test]
    fn repeated_whitespace_collapses() {
        assert_eq!(count_tokens("a b  c"), 3);
    }

    #[test]
    fn deterministic_across_calls() {
        let s = "Proceed only if condition Z is true.";
        assert_eq!(count_tokens(s), count_tokens(s));
        assert_eq!(count_tokens(s), 7);
    }
}
