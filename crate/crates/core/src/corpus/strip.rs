use crate::lexer::{tokenize, LexError, TokenKind};

/// Removes `//` and `/* */` comments from C/C++/CUDA text.
///
/// Lines that held nothing but comments and whitespace are dropped. Lines
/// with code keep their position; trailing whitespace left behind by a
/// removed comment is trimmed. A block comment sitting between two tokens
/// is replaced by one space so the tokens do not fuse. Lines untouched by
/// comments (including blank ones) are copied verbatim.
pub fn strip_comments(source: &str) -> Result<String, LexError> {
    let tokens = tokenize(source)?;
    let mut lines: Vec<(String, bool)> = vec![(String::new(), false)];

    for (i, tok) in tokens.iter().enumerate() {
        let text = tok.text(source);
        match tok.kind {
            TokenKind::Newline => lines.push((String::new(), false)),
            TokenKind::LineComment | TokenKind::BlockComment => {
                let breaks = text.matches('\n').count();
                let cur = lines.last_mut().expect("non-empty");
                cur.1 = true;
                for _ in 0..breaks {
                    lines.push((String::new(), true));
                }
                if tok.kind == TokenKind::BlockComment {
                    let prev_solid = lines
                        .last()
                        .and_then(|(l, _)| l.chars().last())
                        .is_some_and(|c| !c.is_whitespace());
                    let next_solid = tokens.get(i + 1).is_some_and(|n| {
                        !matches!(
                            n.kind,
                            TokenKind::Whitespace | TokenKind::Newline | TokenKind::Continuation
                        )
                    });
                    if prev_solid && next_solid {
                        lines.last_mut().expect("non-empty").0.push(' ');
                    }
                }
            }
            _ => lines.last_mut().expect("non-empty").0.push_str(text),
        }
    }

    let kept: Vec<String> = lines
        .into_iter()
        .filter_map(|(line, had_comment)| {
            if !had_comment {
                return Some(line);
            }
            let trimmed = line.trim_end();
            (!trimmed.is_empty()).then(|| trimmed.to_string())
        })
        .collect();
    Ok(kept.join("\n"))
}
