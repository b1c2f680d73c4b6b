/// Splits text into maximal letter runs, maximal runs of digits, `.` and
/// `-`, and single punctuation characters. Whitespace separates tokens and
/// is dropped.
pub fn tokenize_reference(text: &str) -> Vec<&str> {
    #[derive(PartialEq, Clone, Copy)]
    enum Class {
        Letter,
        Number,
        Punct,
        Space,
    }
    let class = |c: char| {
        if c.is_alphabetic() {
            Class::Letter
        } else if c.is_ascii_digit() || c == '.' || c == '-' {
            Class::Number
        } else if c.is_whitespace() {
            Class::Space
        } else {
            Class::Punct
        }
    };
    let mut out = Vec::new();
    let mut start: Option<(usize, Class)> = None;
    for (i, c) in text.char_indices() {
        let k = class(c);
        if let Some((s, prev)) = start {
            if prev == k && k != Class::Punct {
                continue;
            }
            out.push(&text[s..i]);
            start = None;
        }
        if k != Class::Space {
            start = Some((i, k));
        }
    }
    if let Some((s, _)) = start {
        out.push(&text[s..]);
    }
    out
}

/// Windows of at most `window` tokens starting every `window - overlap`
/// tokens. The last window always reaches the end of the sequence.
pub fn window_segments<T>(tokens: &[T], window: usize, overlap: usize) -> Vec<&[T]> {
    assert!(overlap < window, "overlap must be smaller than the window");
    if tokens.len() <= window {
        return vec![tokens];
    }
    let stride = window - overlap;
    let mut out = Vec::new();
    let mut start = 0;
    loop {
        let end = (start + window).min(tokens.len());
        out.push(&tokens[start..end]);
        if end == tokens.len() {
            break;
        }
        start += stride;
    }
    out
}
