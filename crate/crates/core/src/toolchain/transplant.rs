//! Locating function definitions lexically, swapping `main`, and the
//! kernel guard that checks non-`main` code was not edited.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::lexer::{tokenize, LexError, Token, TokenKind};

/// A top-level function (or type) definition found by brace matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    /// From the first token of the declaration through the closing brace.
    pub span: Range<usize>,
    pub is_function: bool,
}

const TYPE_KEYWORDS: [&str; 5] = ["struct", "class", "union", "enum", "typedef"];
const NOT_NAMES: [&str; 6] = [
    "__attribute__",
    "__declspec",
    "alignas",
    "__launch_bounds__",
    "decltype",
    "__align__",
];

/// Finds definitions at file scope, looking through `namespace` and
/// `extern "C"` blocks. Preprocessor lines are ignored for structure.
pub fn function_definitions(src: &str) -> Result<Vec<Definition>, LexError> {
    let toks: Vec<Token> = tokenize(src)?
        .into_iter()
        .filter(|t| !t.is_trivia() && !t.in_directive)
        .collect();
    let mut defs = Vec::new();
    scan_items(src, &toks, 0, toks.len(), &mut defs);
    Ok(defs)
}

fn text<'a>(src: &'a str, t: &Token) -> &'a str {
    t.text(src)
}

/// Index of the token closing the group opened at `open`, or `hi - 1` if unbalanced.
fn matching(src: &str, toks: &[Token], open: usize, hi: usize) -> usize {
    let mut depth = 0i64;
    for (j, t) in toks.iter().enumerate().take(hi).skip(open) {
        if t.kind != TokenKind::Punct {
            continue;
        }
        match text(src, t) {
            "{" | "(" | "[" => depth += 1,
            "}" | ")" | "]" => {
                depth -= 1;
                if depth == 0 {
                    return j;
                }
            }
            _ => {}
        }
    }
    hi.saturating_sub(1).max(open)
}

fn scan_items(src: &str, toks: &[Token], lo: usize, hi: usize, out: &mut Vec<Definition>) {
    let mut i = lo;
    let mut item_start = lo;
    while i < hi {
        let t = &toks[i];
        let s = if t.kind == TokenKind::Punct { text(src, t) } else { "" };
        match s {
            ";" => {
                i += 1;
                item_start = i;
            }
            "}" => {
                i += 1;
                item_start = i;
            }
            "(" | "[" => i = matching(src, toks, i, hi) + 1,
            "{" => {
                let close = matching(src, toks, i, hi);
                let item = &toks[item_start..i];
                let words: Vec<&str> = item.iter().map(|t| text(src, t)).collect();
                let transparent = matches!(words.first(), Some(&"namespace"))
                    || (words.first() == Some(&"extern")
                        && item.get(1).is_some_and(|t| t.kind == TokenKind::Str)
                        && item.len() == 2);
                if transparent {
                    scan_items(src, toks, i + 1, close, out);
                    i = close + 1;
                    item_start = i;
                    continue;
                }
                if let Some(def) = classify(src, item, &toks[close]) {
                    let function = def.is_function;
                    out.push(def);
                    i = close + 1;
                    if function {
                        item_start = i;
                    }
                    continue;
                }
                i = close + 1;
            }
            _ => i += 1,
        }
    }
}

fn classify(src: &str, item: &[Token], close: &Token) -> Option<Definition> {
    let first = item.first()?;
    let words: Vec<&str> = item.iter().map(|t| text(src, t)).collect();
    let span = first.span.start..close.span.end;

    let type_kw = words
        .iter()
        .position(|w| TYPE_KEYWORDS.contains(w))
        .filter(|&p| !words[..p].contains(&"("));
    if let Some(p) = type_kw {
        let name = words[p..].iter().take(2).copied().collect::<Vec<_>>().join(" ");
        return Some(Definition { name, span, is_function: false });
    }

    // A top-level `=` means an initializer, unless it is part of `operator=`.
    let mut depth = 0;
    let mut name = None;
    for (k, w) in words.iter().enumerate() {
        match *w {
            "(" | "[" => {
                if *w == "(" && depth == 0 && name.is_none() && k > 0 {
                    let prev = &item[k - 1];
                    if prev.kind == TokenKind::Ident && !NOT_NAMES.contains(&words[k - 1]) {
                        name = Some(words[k - 1].to_string());
                    } else if k >= 2 && words[k - 2] == "operator" {
                        name = Some(format!("operator{}", words[k - 1]));
                    }
                }
                depth += 1;
            }
            ")" | "]" => depth -= 1,
            "=" if depth == 0 && !(k > 0 && words[k - 1] == "operator") => return None,
            _ => {}
        }
    }
    name.map(|name| Definition { name, span, is_function: true })
}

/// Byte span of the top-level `int main(...) { ... }` definition.
pub fn find_main(src: &str) -> Result<Option<Range<usize>>, LexError> {
    Ok(function_definitions(src)?
        .into_iter()
        .find(|d| d.is_function && d.name == "main" && declares_int_main(src, &d.span))
        .map(|d| d.span))
}

fn declares_int_main(src: &str, span: &Range<usize>) -> bool {
    let Ok(toks) = crate::lexer::significant_tokens(&src[span.clone()]) else {
        return false;
    };
    let s = &src[span.clone()];
    toks.windows(2).any(|w| w[0].text(s) == "int" && w[1].text(s) == "main")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelGuard {
    Unchanged,
    Changed,
    NotChecked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransplantOutcome {
    pub merged_source: String,
    pub main_replaced: bool,
    pub repair_rounds_used: u8,
    pub kernel_guard: KernelGuard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Generated,
    GroundTruth,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransplantError {
    #[error("no `int main` definition found in the {0:?} source")]
    MainNotFound(Which),
    #[error("cannot scan the {0:?} source: {1}")]
    Lex(Which, LexError),
}

/// Replaces the generated program's `main` with the ground truth's, keeping
/// every other byte of the generated text. When the generated program has no
/// `main`, the ground-truth one is appended and `main_replaced` is false.
pub fn transplant_main(generated: &str, ground_truth: &str) -> Result<TransplantOutcome, TransplantError> {
    let gt_span = find_main(ground_truth)
        .map_err(|e| TransplantError::Lex(Which::GroundTruth, e))?
        .ok_or(TransplantError::MainNotFound(Which::GroundTruth))?;
    let gt_main = &ground_truth[gt_span];
    let gen_span = find_main(generated).map_err(|e| TransplantError::Lex(Which::Generated, e))?;

    let (merged_source, main_replaced) = match gen_span {
        Some(span) => {
            let mut merged = String::with_capacity(generated.len() + gt_main.len());
            merged.push_str(&generated[..span.start]);
            merged.push_str(gt_main);
            merged.push_str(&generated[span.end..]);
            (merged, true)
        }
        None => {
            let mut merged = generated.to_string();
            if !merged.is_empty() && !merged.ends_with('\n') {
                merged.push('\n');
            }
            merged.push('\n');
            merged.push_str(gt_main);
            merged.push('\n');
            (merged, false)
        }
    };
    Ok(TransplantOutcome {
        merged_source,
        main_replaced,
        repair_rounds_used: 0,
        kernel_guard: KernelGuard::NotChecked,
    })
}

/// Normalised token streams of every definition other than `main`, sorted.
fn guarded_streams(src: &str) -> Result<Vec<Vec<String>>, LexError> {
    let defs = function_definitions(src)?;
    let all = tokenize(src)?;
    let mut streams: Vec<Vec<String>> = defs
        .iter()
        .filter(|d| !(d.is_function && d.name == "main"))
        .map(|d| {
            let mut stream = Vec::new();
            for t in all.iter().filter(|t| t.span.start >= d.span.start && t.span.end <= d.span.end) {
                if !t.is_trivia() {
                    stream.push(t.text(src).to_string());
                } else if t.kind == TokenKind::Newline && t.in_directive {
                    stream.push("\n".to_string());
                }
            }
            stream
        })
        .collect();
    streams.sort();
    Ok(streams)
}

/// Compares all non-`main` definitions token by token, ignoring comments and
/// whitespace. Any difference, including a renamed local, is `Changed`.
/// Unscannable input is treated as changed.
pub fn kernel_guard_check(before: &str, after: &str) -> KernelGuard {
    match (guarded_streams(before), guarded_streams(after)) {
        (Ok(a), Ok(b)) if a == b => KernelGuard::Unchanged,
        _ => KernelGuard::Changed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_functions_and_types() {
        let src = "#include <x>\nstruct P { int a; };\nstatic int tbl[] = {1,2};\n\
                   __global__ void k(float* a) { a[0] = 1; }\nint main() { return 0; }\n";
        let defs = function_definitions(src).unwrap();
        let names: Vec<_> = defs.iter().map(|d| (d.name.as_str(), d.is_function)).collect();
        assert_eq!(names, vec![("struct P", false), ("k", true), ("main", true)]);
    }

    #[test]
    fn namespaces_are_transparent() {
        let src = "namespace a { void f() {} }\nextern \"C\" { int g(int x) { return x; } }";
        let names: Vec<_> = function_definitions(src).unwrap().into_iter().map(|d| d.name).collect();
        assert_eq!(names, vec!["f", "g"]);
    }

    #[test]
    fn attribute_and_operator_names() {
        let src = "__attribute__((noinline)) void f() {}\nV& operator=(const V& o) { return *this; }";
        let names: Vec<_> = function_definitions(src).unwrap().into_iter().map(|d| d.name).collect();
        assert_eq!(names, vec!["f", "operator="]);
    }

    #[test]
    fn transplant_replaces_main() {
        let generated = "void k(){}\nint main(){ k(); return 0; }\n";
        let gt = "void k();\nint main(){ k(); puts(\"PASS\"); return 0; }";
        let out = transplant_main(generated, gt).unwrap();
        assert_eq!(out.merged_source, "void k(){}\nint main(){ k(); puts(\"PASS\"); return 0; }\n");
        assert!(out.main_replaced);
        assert_eq!(out.kernel_guard, KernelGuard::NotChecked);
    }

    #[test]
    fn transplant_appends_when_generated_has_no_main() {
        let out = transplant_main("void k(){}", "int main(){return 0;}").unwrap();
        assert_eq!(out.merged_source, "void k(){}\n\nint main(){return 0;}\n");
        assert!(!out.main_replaced);
    }

    #[test]
    fn ground_truth_without_main_is_error() {
        assert_eq!(
            transplant_main("int main(){}", "void f(){}").unwrap_err(),
            TransplantError::MainNotFound(Which::GroundTruth)
        );
    }

    #[test]
    fn guard_rules() {
        let before = "void k(int* a) { int i = 0; a[i] = 1; }\nint main() { return 0; }";
        let reformatted = "void k(int* a)\n{\n  int i = 0;  // idx\n  a[i] = 1;\n}\nint main() { return 1; }";
        assert_eq!(kernel_guard_check(before, reformatted), KernelGuard::Unchanged);
        let renamed = "void k(int* a) { int j = 0; a[j] = 1; }\nint main() { return 0; }";
        assert_eq!(kernel_guard_check(before, renamed), KernelGuard::Changed);
        let with_include = format!("#include <cstdio>\n{before}");
        assert_eq!(kernel_guard_check(before, &with_include), KernelGuard::Unchanged);
    }

    #[test]
    fn guard_sees_pragmas_inside_kernels() {
        let a = "void k(int* a) {\n#pragma omp parallel for\nfor(int i=0;i<4;i++) a[i]=i;\n}";
        let b = "void k(int* a) {\nfor(int i=0;i<4;i++) a[i]=i;\n}";
        assert_eq!(kernel_guard_check(a, b), KernelGuard::Changed);
    }
}
