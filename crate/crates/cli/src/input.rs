//! Reading command arguments that name either inline text, a file, or stdin.

use std::io::Read;

use anyhow::{Context, Result};

/// Resolves an argument to text. `-` reads stdin; a value made only of digits and whitespace
/// is taken literally; anything else is a file path.
pub fn resolve(arg: &str) -> Result<String> {
    if arg == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        return Ok(text);
    }
    if is_inline(arg) {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

/// Reads a file argument (`-` is stdin).
pub fn read_file(arg: &str) -> Result<String> {
    if arg == "-" {
        return resolve(arg);
    }
    std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

fn is_inline(arg: &str) -> bool {
    !arg.trim().is_empty() && arg.chars().all(|c| c.is_ascii_digit() || c.is_whitespace())
}

/// One instance of a corpus file: "pattern | text".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusLine {
    pub line: usize,
    pub pattern: String,
    pub text: String,
}

/// Parses a corpus: one "pattern | text" instance per line; blank lines and `#` comments are
/// skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusLine>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (pattern, text) = line
            .split_once('|')
            .with_context(|| format!("corpus line {}: expected \"pattern | text\"", idx + 1))?;
        out.push(CorpusLine {
            line: idx + 1,
            pattern: pattern.trim().to_string(),
            text: text.trim().to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_values_are_digits_and_spaces() {
        assert!(is_inline("3 1 4 2"));
        assert!(is_inline("1\n2 3 4\n"));
        assert!(!is_inline("perm.txt"));
        assert!(!is_inline("  "));
    }

    #[test]
    fn corpus_lines_split_on_bar() {
        let c = parse_corpus("# header\n\n1 2 | 2 1 3\n 2 1|1 2 \n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0], CorpusLine { line: 3, pattern: "1 2".into(), text: "2 1 3".into() });
        assert_eq!(c[1].text, "1 2");
        assert!(parse_corpus("1 2 3").is_err());
    }
}
