use super::RagError;

/// A manual excerpt before embedding. `span` is a half-open range of
/// character (not byte) offsets into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextChunk {
    pub chunk_id: usize,
    pub text: String,
    pub span: (usize, usize),
}

/// Fixed-size character windows starting every `chunk_chars - overlap_chars`
/// characters; the last window is cut at the end of the text.
pub fn chunk_manual(text: &str, chunk_chars: usize, overlap_chars: usize) -> Result<Vec<TextChunk>, RagError> {
    if chunk_chars == 0 || overlap_chars >= chunk_chars {
        return Err(RagError::InvalidChunking {
            chunk_chars,
            overlap_chars,
        });
    }
    let chars: Vec<char> = text.chars().collect();
    let stride = chunk_chars - overlap_chars;
    let mut out = Vec::new();
    let mut start = 0usize;
    while start < chars.len() {
        let end = (start + chunk_chars).min(chars.len());
        out.push(TextChunk {
            chunk_id: out.len(),
            text: chars[start..end].iter().collect(),
            span: (start, end),
        });
        if end == chars.len() {
            break;
        }
        start += stride;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spans(len: usize, chunk: usize, overlap: usize) -> Vec<(usize, usize)> {
        chunk_manual(&"x".repeat(len), chunk, overlap)
            .unwrap()
            .into_iter()
            .map(|c| c.span)
            .collect()
    }

    #[test]
    fn documented_layouts() {
        assert_eq!(spans(2500, 1000, 200), vec![(0, 1000), (800, 1800), (1600, 2500)]);
        assert_eq!(spans(500, 1000, 200), vec![(0, 500)]);
        assert_eq!(spans(1000, 1000, 200), vec![(0, 1000)]);
        assert!(chunk_manual("", 1000, 200).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(chunk_manual("abc", 0, 0).is_err());
        assert!(chunk_manual("abc", 10, 10).is_err());
        assert!(chunk_manual("abc", 10, 11).is_err());
    }

    #[test]
    fn character_offsets_not_bytes() {
        let chunks = chunk_manual("ééééé", 2, 0).unwrap();
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[2].text, "é");
        assert_eq!(chunks[2].span, (4, 5));
    }

    proptest! {
        #[test]
        fn spans_tile_the_document(text in "[a-zé ]{0,300}", chunk in 1usize..60, overlap_frac in 0.0f64..1.0) {
            let overlap = ((chunk as f64) * overlap_frac) as usize % chunk;
            let chunks = chunk_manual(&text, chunk, overlap).unwrap();
            let chars: Vec<char> = text.chars().collect();
            if chars.is_empty() {
                prop_assert!(chunks.is_empty());
            } else {
                prop_assert_eq!(chunks[0].span.0, 0);
                prop_assert_eq!(chunks.last().unwrap().span.1, chars.len());
            }
            for (i, c) in chunks.iter().enumerate() {
                prop_assert_eq!(c.chunk_id, i);
                let expected: String = chars[c.span.0..c.span.1].iter().collect();
                prop_assert_eq!(&c.text, &expected);
                if i + 1 < chunks.len() {
                    prop_assert_eq!(c.span.1 - c.span.0, chunk);
                    prop_assert_eq!(c.span.1 - chunks[i + 1].span.0, overlap);
                }
            }
        }
    }
}
