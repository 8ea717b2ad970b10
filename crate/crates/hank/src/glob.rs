//! Minimal glob matching for exclude patterns and ignore file scopes.
//!
//! Supported syntax: `*` matches any run of characters within one path
//! segment, `**` as a whole segment matches zero or more segments. There is
//! no brace expansion, no character classes, no `?`. Patterns without
//! wildcards are plain path equality.

/// Matches `path` (a `/`-separated relative path) against `pattern`.
pub fn glob_match(pattern: &str, path: &str) -> bool {
    let pat: Vec<&str> = pattern.split('/').collect();
    let segs: Vec<&str> = path.split('/').collect();
    match_segments(&pat, &segs)
}

fn match_segments(pat: &[&str], segs: &[&str]) -> bool {
    match pat.first() {
        None => segs.is_empty(),
        Some(&"**") => {
            // Zero segments, or swallow one and stay on `**`.
            match_segments(&pat[1..], segs)
                || (!segs.is_empty() && match_segments(pat, &segs[1..]))
        }
        Some(first) => match segs.first() {
            Some(seg) if match_one(first, seg) => match_segments(&pat[1..], &segs[1..]),
            _ => false,
        },
    }
}

/// Single-segment match where `*` matches any (possibly empty) run.
fn match_one(pat: &str, seg: &str) -> bool {
    match pat.split_once('*') {
        None => pat == seg,
        Some((prefix, rest)) => {
            if let Some(tail) = seg.strip_prefix(prefix) {
                // Try every split point for the `*`.
                (0..=tail.len())
                    .filter(|&n| tail.is_char_boundary(n))
                    .any(|n| match_one(rest, &tail[n..]))
            } else {
                false
            }
        }
    }
}
