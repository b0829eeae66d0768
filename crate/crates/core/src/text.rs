//! Small text helpers shared across stages. All offsets exposed outside this
//! crate are character (Unicode scalar value) offsets, not byte offsets.

/// Collapses runs of whitespace to a single space and trims both ends.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte offset of the character at `char_idx` (or `s.len()` when past the end).
pub fn byte_offset(s: &str, char_idx: usize) -> usize {
    s.char_indices().nth(char_idx).map_or(s.len(), |(b, _)| b)
}

/// Slice by character offsets. Out-of-range bounds are clamped.
pub fn char_slice(s: &str, start: usize, end: usize) -> &str {
    let b0 = byte_offset(s, start);
    let b1 = byte_offset(s, end.max(start));
    &s[b0..b1]
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn chars_eq_ci(a: char, b: char) -> bool {
    a == b || a.to_lowercase().eq(b.to_lowercase())
}

/// First case-insensitive occurrence of `needle` in `hay` that starts and ends
/// on word boundaries. Returns character offsets `[start, end)`.
pub fn find_word_ci(hay: &str, needle: &str) -> Option<(usize, usize)> {
    let h: Vec<char> = hay.chars().collect();
    let n: Vec<char> = needle.trim().chars().collect();
    if n.is_empty() || n.len() > h.len() {
        return None;
    }
    (0..=h.len() - n.len()).find_map(|i| {
        let hit = n.iter().zip(&h[i..]).all(|(a, b)| chars_eq_ci(*a, *b));
        if !hit {
            return None;
        }
        let end = i + n.len();
        // A boundary is only required where the needle itself starts/ends with a word char.
        let left_ok = !is_word_char(n[0]) || i == 0 || !is_word_char(h[i - 1]);
        let right_ok = !is_word_char(n[n.len() - 1]) || end == h.len() || !is_word_char(h[end]);
        (left_ok && right_ok).then_some((i, end))
    })
}

/// Case-sensitive exact substring search in character offsets.
pub fn find_chars(hay: &str, needle: &str) -> Option<(usize, usize)> {
    let b = hay.find(needle)?;
    let start = hay[..b].chars().count();
    Some((start, start + needle.chars().count()))
}

/// Number of non-whitespace characters in `s`.
pub fn non_ws_count(s: &str) -> usize {
    s.chars().filter(|c| !c.is_whitespace()).count()
}
