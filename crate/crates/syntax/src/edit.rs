use std::ops::Range;

/// Replacement of one byte range of a source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub range: Range<usize>,
    pub replacement: String,
}

impl Edit {
    pub fn replace(range: Range<usize>, replacement: impl Into<String>) -> Self {
        Edit {
            range,
            replacement: replacement.into(),
        }
    }

    pub fn insert(at: usize, text: impl Into<String>) -> Self {
        Edit {
            range: at..at,
            replacement: text.into(),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EditError {
    #[error("edit {0:?} lies outside the source ({1} bytes)")]
    OutOfBounds(Range<usize>, usize),
    #[error("edits {0:?} and {1:?} overlap")]
    Overlap(Range<usize>, Range<usize>),
    #[error("edit {0:?} does not fall on a character boundary")]
    NotCharBoundary(Range<usize>),
}

/// Applies non-overlapping edits. Insertions at the same offset keep their
/// relative order.
pub fn apply_edits(text: &str, edits: &[Edit]) -> Result<String, EditError> {
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.range.start, e.range.end));
    for e in &sorted {
        if e.range.start > e.range.end || e.range.end > text.len() {
            return Err(EditError::OutOfBounds(e.range.clone(), text.len()));
        }
        if !text.is_char_boundary(e.range.start) || !text.is_char_boundary(e.range.end) {
            return Err(EditError::NotCharBoundary(e.range.clone()));
        }
    }
    for pair in sorted.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.range.end > b.range.start {
            return Err(EditError::Overlap(a.range.clone(), b.range.clone()));
        }
    }
    let mut out = String::with_capacity(text.len() + 64);
    let mut cursor = 0;
    for e in sorted {
        out.push_str(&text[cursor..e.range.start]);
        out.push_str(&e.replacement);
        cursor = e.range.end;
    }
    out.push_str(&text[cursor..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn applies_in_offset_order() {
        let out = apply_edits(
            "abcdef",
            &[Edit::replace(4..5, "E"), Edit::insert(0, ">"), Edit::replace(1..2, "")],
        )
        .unwrap();
        assert_eq!(out, ">acdEf");
    }

    #[test]
    fn rejects_overlap_and_bounds() {
        assert!(matches!(
            apply_edits("abc", &[Edit::replace(0..2, "x"), Edit::replace(1..3, "y")]),
            Err(EditError::Overlap(..))
        ));
        assert!(matches!(apply_edits("abc", &[Edit::insert(9, "x")]), Err(EditError::OutOfBounds(..))));
    }

    proptest! {
        #[test]
        fn single_replacement_matches_splice(s in "[a-z ]{0,40}", a in 0usize..40, b in 0usize..40, r in "[A-Z]{0,5}") {
            let (lo, hi) = (a.min(b).min(s.len()), a.max(b).min(s.len()));
            let out = apply_edits(&s, &[Edit::replace(lo..hi, r.clone())]).unwrap();
            let mut expected = s.clone();
            expected.replace_range(lo..hi, &r);
            prop_assert_eq!(out, expected);
        }
    }
}
