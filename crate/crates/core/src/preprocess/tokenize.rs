//! Whitespace/punctuation tokenizer with special handling for numbers,
//! abbreviations, apostrophe-attached suffixes, and ellipses.

fn is_letter(c: char) -> bool {
    c.is_alphabetic()
}

fn is_upper(c: char) -> bool {
    c.is_uppercase()
}

/// Split raw text into surface tokens.
///
/// - Numbers keep their internal separators (`32.542.432`, `0,23`, `23:15`,
///   `3/4`), a trailing ordinal period, a leading `%`, and any attached
///   suffix (`1915'te`, `32.si`).
/// - Abbreviations keep their periods: single-capital chains (`T.B.M.M.`),
///   short capitalized titles (`Dr.`, `Prof.`), one/two-letter lowercase
///   forms (`m.`, `vb.`).
/// - A run of two or more periods becomes one ellipsis token; double quotes
///   always stand alone; other punctuation separates into single tokens.
/// - Apostrophes stay inside words (`Carter'a`).
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0usize;
    let n = chars.len();
    let at = |i: usize| chars.get(i).copied();

    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        // numeric token, optionally %-prefixed
        if c.is_ascii_digit() || (c == '%' && at(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            if c == '%' {
                i += 1;
            }
            while i < n {
                let d = chars[i];
                if d.is_ascii_digit() {
                    i += 1;
                } else if matches!(d, '.' | ',' | ':' | '/') && at(i + 1).is_some_and(|x| x.is_ascii_digit()) {
                    i += 1;
                } else {
                    break;
                }
            }
            // ordinal period: a dot not followed by a digit
            if at(i) == Some('.') && !at(i + 1).is_some_and(|x| x.is_ascii_digit()) {
                i += 1;
            }
            // attached suffix, with or without an apostrophe
            if at(i) == Some('\'') && at(i + 1).is_some_and(is_letter) {
                i += 1;
                while at(i).is_some_and(is_letter) {
                    i += 1;
                }
            } else if at(i).is_some_and(is_letter) {
                while at(i).is_some_and(is_letter) {
                    i += 1;
                }
            }
            out.push(chars[start..i].iter().collect());
            continue;
        }
        if c == '"' {
            out.push("\"".to_string());
            i += 1;
            continue;
        }
        if c == '.' {
            let start = i;
            while at(i) == Some('.') {
                i += 1;
            }
            if i - start >= 2 {
                out.push(chars[start..i].iter().collect());
            } else {
                out.push(".".to_string());
            }
            continue;
        }
        if is_letter(c) {
            let start = i;
            while at(i).is_some_and(is_letter) {
                i += 1;
            }
            let len = i - start;
            // single-capital abbreviation chains: T.B.M.M.
            if len == 1 && is_upper(c) && at(i) == Some('.') {
                i += 1;
                while at(i).is_some_and(is_upper) && at(i + 1) == Some('.') {
                    i += 2;
                }
                out.push(chars[start..i].iter().collect());
                continue;
            }
            // short abbreviations with a period: Dr., Prof., vb., m.
            let capitalized = is_upper(c) && chars[start + 1..i].iter().all(|x| !is_upper(*x));
            let lowercase_short = len <= 2 && chars[start..i].iter().all(|x| !is_upper(*x));
            if at(i) == Some('.')
                && at(i + 1) != Some('.')
                && ((capitalized && len <= 4) || lowercase_short)
            {
                i += 1;
                out.push(chars[start..i].iter().collect());
                continue;
            }
            // apostrophe-attached suffix stays in the token
            if at(i) == Some('\'') && at(i + 1).is_some_and(is_letter) {
                i += 1;
                while at(i).is_some_and(is_letter) {
                    i += 1;
                }
            }
            out.push(chars[start..i].iter().collect());
            continue;
        }
        // any other punctuation: one token per character
        out.push(c.to_string());
        i += 1;
    }
    out
}
