use super::PromptError;

const FENCE: &str = "```";

/// Pulls source code out of a model response.
///
/// With fenced blocks present, the longest block body wins (first on ties).
/// Otherwise leading and trailing lines that look like prose are dropped:
/// a line is code-like when it contains one of `; { } # ( )`.
pub fn extract_code(response: &str) -> Result<String, PromptError> {
    if response.trim().is_empty() {
        return Err(PromptError::EmptyCompletion);
    }
    if let Some(body) = longest_fence(response).filter(|b| !b.trim().is_empty()) {
        return Ok(body.to_string());
    }
    Ok(strip_prose(response))
}

fn is_fence_line(line: &str) -> bool {
    line.trim_start().starts_with(FENCE)
}

fn longest_fence(text: &str) -> Option<&str> {
    let mut best: Option<&str> = None;
    let mut open_body: Option<usize> = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        if !is_fence_line(line) {
            continue;
        }
        match open_body {
            None => open_body = Some(offset),
            Some(start) => {
                let end = line_start;
                let body = &text[start..end];
                let body = body.strip_suffix('\n').unwrap_or(body);
                if best.is_none_or(|b| body.len() > b.len()) {
                    best = Some(body);
                }
                open_body = None;
            }
        }
    }
    if let Some(start) = open_body {
        let body = &text[start.min(text.len())..];
        if best.is_none_or(|b| body.len() > b.len()) {
            best = Some(body);
        }
    }
    best
}

fn strip_prose(text: &str) -> String {
    let code_like = |l: &str| l.contains([';', '{', '}', '#', '(', ')']);
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    let first = lines.iter().position(|l| code_like(l));
    let last = lines.iter().rposition(|l| code_like(l));
    match (first, last) {
        (Some(0), Some(l)) if l + 1 == lines.len() => text.to_string(),
        (Some(f), Some(l)) => {
            let joined: String = lines[f..=l].concat();
            joined.strip_suffix('\n').unwrap_or(&joined).to_string()
        }
        _ => text.trim().to_string(),
    }
}
