//! Pinned leaf tags for representative fixture files and the hello-world
//! alignment golden. Regenerate the tag files after an intentional grammar
//! change with:
//!
//! ```text
//! cargo test -p toklens-core --test goldens -- --ignored regenerate
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use toklens_core::fixtures::bundled_corpus;
use toklens_core::syntax::{leaves, parse};

const GOLDEN_FILES: &[(&str, &str)] = &[
    ("textkit/casing.py", "tags_textkit_casing.jsonl"),
    ("webstub/handlers.py", "tags_webstub_handlers.jsonl"),
    ("brokenlab/legacy.py", "tags_brokenlab_legacy.jsonl"),
];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/goldens")
}

fn render_tags(doc: &[u8]) -> String {
    let mut out = String::new();
    for (tag, span) in leaves(&parse(doc)) {
        writeln!(
            out,
            "{{\"parent_type\":{},\"node_type\":{},\"span\":[{},{}]}}",
            serde_json::to_string(&tag.parent_type).unwrap(),
            serde_json::to_string(&tag.node_type).unwrap(),
            span.start,
            span.end
        )
        .unwrap();
    }
    out
}

fn fixture_content(repo_path: &str) -> String {
    let (repo, name) = repo_path.split_once('/').unwrap();
    bundled_corpus()
        .into_iter()
        .find(|f| f.repo_name == repo && f.path == name)
        .unwrap_or_else(|| panic!("fixture {repo_path} missing"))
        .content
}

#[test]
fn leaf_tags_match_golden_files() {
    for (fixture, golden) in GOLDEN_FILES {
        let content = fixture_content(fixture);
        let rendered = render_tags(content.as_bytes());
        let pinned = std::fs::read_to_string(golden_dir().join(golden))
            .unwrap_or_else(|e| panic!("{golden}: {e}"));
        assert_eq!(rendered, pinned, "leaf tags for {fixture} drifted");
    }
}

#[test]
#[ignore = "rewrites the golden tag files"]
fn regenerate() {
    for (fixture, golden) in GOLDEN_FILES {
        let content = fixture_content(fixture);
        std::fs::write(golden_dir().join(golden), render_tags(content.as_bytes())).unwrap();
    }
}
