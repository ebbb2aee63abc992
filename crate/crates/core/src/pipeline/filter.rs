use regex::Regex;

use super::DialogLine;

/// Splits `lines` into (kept, dropped) by the developer-comment denylist,
/// matched against the raw text.
pub fn filter_developer_comments(
    lines: Vec<DialogLine>,
    denylist: &[Regex],
) -> (Vec<DialogLine>, Vec<DialogLine>) {
    lines
        .into_iter()
        .partition(|line| !denylist.iter().any(|re| re.is_match(&line.raw_text)))
}
