use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::lexer::{tokenize, Token, TokenKind};

/// Result of stripping OpenMP from a source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerialDerivation {
    pub source: String,
    pub pragmas_removed: usize,
    pub includes_removed: usize,
    /// Distinct `omp_*` runtime functions still called by the derived code.
    /// They are left in place; a derived member that fails to build because
    /// of them is rejected at verification time.
    pub runtime_calls: Vec<String>,
}

/// Derives a Serial candidate from OpenMP source by deleting every
/// `#pragma omp` directive (with its continuation lines) and every
/// `#include <omp.h>` line.
///
/// Never fails: text the scanner cannot handle is returned unchanged with
/// zero removals.
pub fn derive_serial(openmp_source: &str) -> SerialDerivation {
    let unchanged = || SerialDerivation {
        source: openmp_source.to_string(),
        pragmas_removed: 0,
        includes_removed: 0,
        runtime_calls: Vec::new(),
    };
    let Ok(tokens) = tokenize(openmp_source) else {
        return unchanged();
    };

    let mut remove: Vec<(usize, usize)> = Vec::new();
    let mut pragmas = 0;
    let mut includes = 0;
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        if !(tok.in_directive && tok.kind == TokenKind::Punct && tok.text(openmp_source) == "#") {
            i += 1;
            continue;
        }
        let end = directive_end(&tokens, i);
        let words: Vec<&str> = tokens[i..end]
            .iter()
            .filter(|t| !t.is_trivia())
            .map(|t| t.text(openmp_source))
            .collect();
        let is_pragma = words.len() >= 3 && words[1] == "pragma" && words[2] == "omp";
        let is_include = words.len() >= 3
            && words[1] == "include"
            && (words[2] == "\"omp.h\"" || words[2..].concat() == "<omp.h>");
        if is_pragma || is_include {
            let line_start = openmp_source[..tok.span.start].rfind('\n').map_or(0, |p| p + 1);
            let line_end = tokens[end - 1].span.end;
            remove.push((line_start, line_end));
            if is_pragma {
                pragmas += 1;
            } else {
                includes += 1;
            }
        }
        i = end;
    }

    let mut source = String::with_capacity(openmp_source.len());
    let mut cursor = 0;
    for (start, end) in &remove {
        source.push_str(&openmp_source[cursor..*start]);
        cursor = *end;
    }
    source.push_str(&openmp_source[cursor..]);

    SerialDerivation {
        runtime_calls: runtime_calls(&source),
        source,
        pragmas_removed: pragmas,
        includes_removed: includes,
    }
}

/// Index one past the directive's last token (its terminating newline, if any).
fn directive_end(tokens: &[Token], start: usize) -> usize {
    let mut j = start;
    while j < tokens.len() && tokens[j].in_directive {
        j += 1;
        if tokens[j - 1].kind == TokenKind::Newline {
            break;
        }
    }
    j
}

fn runtime_calls(source: &str) -> Vec<String> {
    let Ok(tokens) = crate::lexer::significant_tokens(source) else {
        return Vec::new();
    };
    let calls: BTreeSet<String> = tokens
        .windows(2)
        .filter(|w| {
            w[0].kind == TokenKind::Ident
                && w[0].text(source).starts_with("omp_")
                && w[1].text(source) == "("
        })
        .map(|w| w[0].text(source).to_string())
        .collect();
    calls.into_iter().collect()
}
