//! A lexical scanner for C, C++ and CUDA source text.
//!
//! This is not a preprocessor or a parser. It splits text into tokens with
//! byte spans so that callers can remove comments, find preprocessor lines
//! and match braces without being confused by string or character literals.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    /// String literal, including raw strings and encoding prefixes.
    Str,
    Char,
    Punct,
    LineComment,
    BlockComment,
    /// Spaces, tabs, form feeds and carriage returns.
    Whitespace,
    Newline,
    /// A backslash immediately followed by a newline.
    Continuation,
    /// Any byte sequence the scanner does not recognise (stray `\`, `@`, non-ASCII...).
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Range<usize>,
    /// True when the token belongs to a preprocessor directive line
    /// (including its continuation lines).
    pub in_directive: bool,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.span.clone()]
    }

    pub fn is_trivia(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Whitespace
                | TokenKind::Newline
                | TokenKind::Continuation
                | TokenKind::LineComment
                | TokenKind::BlockComment
        )
    }

    pub fn is_comment(&self) -> bool {
        matches!(self.kind, TokenKind::LineComment | TokenKind::BlockComment)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexError {
    #[error("unterminated block comment starting at byte offset {offset}")]
    UnterminatedComment { offset: usize },
}

const PUNCT3: [&str; 5] = ["<<=", ">>=", "...", "->*", "<=>"];
const PUNCT2: [&str; 20] = [
    "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=",
];

const RAW_PREFIXES: [&str; 5] = ["R", "u8R", "uR", "UR", "LR"];
const STR_PREFIXES: [&str; 4] = ["u8", "u", "U", "L"];

/// Splits `src` into tokens. The concatenation of all token spans covers
/// the input exactly.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    Lexer::new(src).run()
}

/// Tokens that carry meaning: no whitespace, newlines, continuations or comments.
pub fn significant_tokens(src: &str) -> Result<Vec<Token>, LexError> {
    Ok(tokenize(src)?.into_iter().filter(|t| !t.is_trivia()).collect())
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    tokens: Vec<Token>,
    line_has_code: bool,
    in_directive: bool,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            tokens: Vec::new(),
            line_has_code: false,
            in_directive: false,
        }
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        self.tokens.push(Token { kind, span: start..self.pos, in_directive: self.in_directive });
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let b = self.bytes[self.pos];
            match b {
                b'\n' => {
                    self.pos += 1;
                    self.push(TokenKind::Newline, start);
                    self.in_directive = false;
                    self.line_has_code = false;
                }
                b'\\' if self.peek(1) == Some(b'\n') => {
                    self.pos += 2;
                    self.push(TokenKind::Continuation, start);
                }
                b'\\' if self.peek(1) == Some(b'\r') && self.peek(2) == Some(b'\n') => {
                    self.pos += 3;
                    self.push(TokenKind::Continuation, start);
                }
                b' ' | b'\t' | b'\r' | 0x0b | 0x0c => {
                    while matches!(self.peek(0), Some(b' ' | b'\t' | b'\r' | 0x0b | 0x0c)) {
                        // A lone \r before \n still counts as whitespace; the \n ends the line.
                        self.pos += 1;
                    }
                    self.push(TokenKind::Whitespace, start);
                }
                b'/' if self.peek(1) == Some(b'/') => {
                    self.line_comment();
                    self.push(TokenKind::LineComment, start);
                }
                b'/' if self.peek(1) == Some(b'*') => {
                    match self.src[self.pos + 2..].find("*/") {
                        Some(end) => self.pos += 2 + end + 2,
                        None => return Err(LexError::UnterminatedComment { offset: start }),
                    }
                    self.push(TokenKind::BlockComment, start);
                }
                b'#' if !self.line_has_code => {
                    self.in_directive = true;
                    self.line_has_code = true;
                    self.pos += 1;
                    self.push(TokenKind::Punct, start);
                }
                b'"' => {
                    self.quoted(b'"');
                    self.code(TokenKind::Str, start);
                }
                b'\'' => {
                    self.quoted(b'\'');
                    self.code(TokenKind::Char, start);
                }
                b'0'..=b'9' => {
                    self.number();
                    self.code(TokenKind::Number, start);
                }
                b'.' if matches!(self.peek(1), Some(b'0'..=b'9')) => {
                    self.number();
                    self.code(TokenKind::Number, start);
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' | b'$' => {
                    while matches!(
                        self.peek(0),
                        Some(b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_' | b'$')
                    ) {
                        self.pos += 1;
                    }
                    let word = &self.src[start..self.pos];
                    if self.peek(0) == Some(b'"') && RAW_PREFIXES.contains(&word) {
                        self.raw_string();
                        self.code(TokenKind::Str, start);
                    } else if self.peek(0) == Some(b'"') && STR_PREFIXES.contains(&word) {
                        self.quoted(b'"');
                        self.code(TokenKind::Str, start);
                    } else if self.peek(0) == Some(b'\'') && STR_PREFIXES.contains(&word) {
                        self.quoted(b'\'');
                        self.code(TokenKind::Char, start);
                    } else {
                        self.code(TokenKind::Ident, start);
                    }
                }
                _ if b.is_ascii_punctuation() => {
                    let rest = &self.src[self.pos..];
                    let len = if PUNCT3.iter().any(|p| rest.starts_with(p)) {
                        3
                    } else if PUNCT2.iter().any(|p| rest.starts_with(p)) {
                        2
                    } else {
                        1
                    };
                    self.pos += len;
                    self.code(TokenKind::Punct, start);
                }
                _ => {
                    let ch_len = self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
                    self.pos += ch_len;
                    self.code(TokenKind::Other, start);
                }
            }
        }
        Ok(self.tokens)
    }

    fn code(&mut self, kind: TokenKind, start: usize) {
        self.line_has_code = true;
        self.push(kind, start);
    }

    /// Consumes a `//` comment up to (not including) the terminating newline.
    /// Backslash-newline continues the comment onto the next line.
    fn line_comment(&mut self) {
        self.pos += 2;
        while let Some(b) = self.peek(0) {
            if b == b'\n' {
                let escaped = self.pos > 0 && self.bytes[self.pos - 1] == b'\\'
                    || self.pos > 1 && self.bytes[self.pos - 1] == b'\r' && self.bytes[self.pos - 2] == b'\\';
                if !escaped {
                    break;
                }
            }
            self.pos += 1;
        }
    }

    /// Consumes a quoted literal starting at the opening quote. Unterminated
    /// literals end at the line break, which is left unconsumed.
    fn quoted(&mut self, quote: u8) {
        self.pos += 1;
        while let Some(b) = self.peek(0) {
            match b {
                b'\\' => self.pos += if self.peek(1).is_some() { 2 } else { 1 },
                b'\n' => return,
                _ if b == quote => {
                    self.pos += 1;
                    return;
                }
                _ => self.pos += 1,
            }
        }
    }

    fn raw_string(&mut self) {
        // pos is at the opening quote: R"delim( ... )delim"
        let open = self.pos + 1;
        let Some(paren) = self.src[open..].find('(') else {
            self.quoted(b'"');
            return;
        };
        let delim = &self.src[open..open + paren];
        if delim.len() > 16 || delim.contains(|c: char| c.is_whitespace() || c == '\\' || c == ')') {
            self.quoted(b'"');
            return;
        }
        let close = format!("){delim}\"");
        let body = open + paren + 1;
        self.pos = match self.src[body..].find(&close) {
            Some(i) => body + i + close.len(),
            None => self.bytes.len(),
        };
    }

    /// pp-number: digits, letters, `.`, `'` digit separators and signed exponents.
    fn number(&mut self) {
        self.pos += 1;
        while let Some(b) = self.peek(0) {
            match b {
                b'0'..=b'9' | b'a'..=b'z' | b'A'..=b'Z' | b'_' | b'.' => self.pos += 1,
                b'\'' if matches!(self.peek(1), Some(b'0'..=b'9' | b'a'..=b'f' | b'A'..=b'F')) => {
                    self.pos += 1
                }
                b'+' | b'-' if matches!(self.bytes[self.pos - 1], b'e' | b'E' | b'p' | b'P') => {
                    self.pos += 1
                }
                _ => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, &str)> {
        significant_tokens(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, &src[t.span]))
            .collect()
    }

    #[test]
    fn comment_markers_inside_literals_are_not_comments() {
        let src = r#"char* s = "//not /* a */ comment"; char c = '/';"#;
        let toks = tokenize(src).unwrap();
        assert!(toks.iter().all(|t| !t.is_comment()));
    }

    #[test]
    fn raw_strings_and_digit_separators() {
        let src = "auto s = R\"x(a \" // b)x\"; int n = 1'000'000;";
        let k = kinds(src);
        assert!(k.contains(&(TokenKind::Str, "R\"x(a \" // b)x\"")));
        assert!(k.contains(&(TokenKind::Number, "1'000'000")));
    }

    #[test]
    fn directive_spans_continuation_lines() {
        let src = "#pragma omp target \\\n map(to:a)\nint x;";
        let toks = tokenize(src).unwrap();
        let map = toks.iter().find(|t| t.text(src) == "map").unwrap();
        assert!(map.in_directive);
        let int = toks.iter().find(|t| t.text(src) == "int").unwrap();
        assert!(!int.in_directive);
    }

    #[test]
    fn hash_after_code_is_not_a_directive() {
        let src = "x = a # b;";
        assert!(tokenize(src).unwrap().iter().all(|t| !t.in_directive));
    }

    #[test]
    fn cuda_launch_syntax() {
        let k = kinds("k<<<g, b>>>(x);");
        assert_eq!(k[1], (TokenKind::Punct, "<<"));
        assert_eq!(k[2], (TokenKind::Punct, "<"));
    }

    #[test]
    fn unterminated_block_comment_reports_offset() {
        assert_eq!(tokenize("int a; /* oops").unwrap_err(), LexError::UnterminatedComment { offset: 7 });
    }

    #[test]
    fn line_comment_continues_after_backslash() {
        let src = "// a \\\n still comment\nint x;";
        let toks = tokenize(src).unwrap();
        assert_eq!(toks[0].kind, TokenKind::LineComment);
        assert_eq!(toks[0].text(src), "// a \\\n still comment");
    }

    #[test]
    fn spans_cover_input() {
        let src = "int main() { /* c */ return 0; } // end\n\u{00e9}";
        let toks = tokenize(src).unwrap();
        let joined: String = toks.iter().map(|t| t.text(src)).collect();
        assert_eq!(joined, src);
    }
}
