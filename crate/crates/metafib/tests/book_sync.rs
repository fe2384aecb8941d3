//! The guide promises that every Rust block it shows is also a doc-test in
//! the crate. This test enforces the promise: each fenced `rust` block in
//! `book/src/*.md` must appear, modulo whitespace, inside the crate's doc
//! comments (where `cargo test --doc` compiles and runs it).

use std::fs;
use std::path::Path;

/// All `///` and `//!` comment text across `src/`, whitespace-squeezed and
/// concatenated in source order.
fn doc_comment_text(dir: &Path, out: &mut String) {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("reading {}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            doc_comment_text(&path, out);
        } else if path.extension().is_some_and(|e| e == "rs") {
            let source = fs::read_to_string(&path).unwrap();
            for line in source.lines() {
                let trimmed = line.trim_start();
                let rest = trimmed
                    .strip_prefix("///")
                    .or_else(|| trimmed.strip_prefix("//!"));
                if let Some(rest) = rest {
                    out.extend(rest.chars().filter(|c| !c.is_whitespace()));
                }
            }
        }
    }
}

fn squeeze(text: &str) -> String {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

#[test]
fn every_book_rust_block_is_a_doc_test() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let book_src = manifest.join("../../book/src");
    let mut docs = String::new();
    doc_comment_text(&manifest.join("src"), &mut docs);

    let mut checked = 0;
    for entry in fs::read_dir(&book_src).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "md") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let mut fence: Option<String> = None;
        let mut block = String::new();
        for line in text.lines() {
            match (&fence, line.trim_end().strip_prefix("```")) {
                (None, Some(info)) => fence = Some(info.to_string()),
                (Some(info), Some("")) => {
                    if info == "rust" || info.starts_with("rust,") {
                        let needle = squeeze(&block);
                        assert!(
                            docs.contains(&needle),
                            "rust block in {} is not among the crate's doc comments:\n{block}",
                            path.display()
                        );
                        checked += 1;
                    }
                    fence = None;
                    block.clear();
                }
                (Some(_), _) => {
                    block.push_str(line);
                    block.push('\n');
                }
                (None, None) => {}
            }
        }
        assert!(fence.is_none(), "unclosed code fence in {}", path.display());
    }
    assert!(
        checked >= 10,
        "expected the guide to carry at least 10 rust blocks, found {checked}"
    );
}
