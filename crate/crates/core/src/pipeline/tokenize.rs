//! Rule-based sentence splitting.
//!
//! A boundary is a run of terminal punctuation (`.`, `!`, `?`, `…`, so also
//! `...` and `?!`), optionally followed by closing quotes or brackets, then
//! whitespace, then a character that can open a sentence: an uppercase
//! letter or opening punctuation such as `"`, `«` or `¿`. A lone `.` after a
//! known abbreviation of the line's language is not a boundary.
//!
//! Sentences are trimmed slices of the input, so joining them with spaces
//! reproduces the input up to whitespace.

const TERMINALS: &[char] = &['.', '!', '?', '…'];
const CLOSERS: &[char] = &['"', '\'', '”', '’', '»', ')', ']'];
const OPENERS: &[char] = &['"', '\'', '“', '„', '‘', '«', '¿', '¡', '(', '['];

const EN: &[&str] = &[
    "Mr", "Mrs", "Ms", "Dr", "St", "Jr", "Sr", "Prof", "Capt", "Cpt", "Gen", "Lt", "Col", "Sgt", "Cmdr", "Adm",
    "Rev", "Mt", "vs", "etc", "e.g", "i.e", "No",
];
const DE: &[&str] = &[
    "Hr", "Hrn", "Fr", "Dr", "Prof", "St", "Nr", "z.B", "bzw", "usw", "ca", "vgl", "Hl", "d.h", "u.a",
];
const FR: &[&str] = &["M", "MM", "Mme", "Mmes", "Mlle", "Mlles", "Dr", "Pr", "St", "Ste", "etc", "cf"];
const IT: &[&str] = &["Sig", "Sigg", "Sig.ra", "Sig.na", "Dott", "Dott.ssa", "Prof", "Ing", "Avv", "S", "ecc"];
const ES: &[&str] = &["Sr", "Sra", "Srta", "Sres", "Dr", "Dra", "Ud", "Uds", "Vd", "Vds", "D", "Dña", "etc"];

/// Abbreviations (without the final period) protected for `language`.
/// Unknown languages use the English list.
pub fn abbreviations(language: &str) -> &'static [&'static str] {
    match language {
        "de" => DE,
        "fr" => FR,
        "it" => IT,
        "es" => ES,
        _ => EN,
    }
}

fn ends_with_abbreviation(before: &str, language: &str) -> bool {
    let word = before
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(OPENERS);
    !word.is_empty() && abbreviations(language).contains(&word)
}

fn opens_sentence(c: char) -> bool {
    c.is_uppercase() || OPENERS.contains(&c)
}

pub fn sentence_tokenize(text: &str, language: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        if !TERMINALS.contains(&chars[i].1) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && TERMINALS.contains(&chars[i].1) {
            i += 1;
        }
        let run = &text[byte_at(run_start)..byte_at(i)];
        while i < chars.len() && CLOSERS.contains(&chars[i].1) {
            i += 1;
        }
        let end = byte_at(i);
        let mut next = i;
        while next < chars.len() && chars[next].1.is_whitespace() {
            next += 1;
        }
        if next == i || next == chars.len() || !opens_sentence(chars[next].1) {
            continue;
        }
        if run == "." && ends_with_abbreviation(&text[start..byte_at(run_start)], language) {
            continue;
        }
        let sentence = text[start..end].trim();
        if !sentence.is_empty() {
            sentences.push(sentence.to_string());
        }
        start = byte_at(next);
        i = next;
    }

    let tail = text[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_string());
    }
    sentences
}
