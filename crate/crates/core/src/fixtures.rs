//! Bundled sample corpora used by the test suites and handy for demo runs.

use crate::corpus::CorpusFile;

macro_rules! fixture {
    ($repo:literal, $path:literal) => {
        CorpusFile {
            repo_name: $repo.to_string(),
            path: $path.to_string(),
            content: include_str!(concat!("../fixtures/corpus/", $repo, "/", $path)).to_string(),
            license: "gpl-3.0".to_string(),
        }
    };
}

/// Thirty small Python-style files across six repositories; two of the
/// `brokenlab` files contain deliberate single-line syntax errors.
pub fn bundled_corpus() -> Vec<CorpusFile> {
    vec![
        fixture!("textkit", "casing.py"),
        fixture!("textkit", "wrap.py"),
        fixture!("textkit", "tokens.py"),
        fixture!("textkit", "report.py"),
        fixture!("textkit", "cli.py"),
        fixture!("gridmath", "vec2.py"),
        fixture!("gridmath", "grid.py"),
        fixture!("gridmath", "flood.py"),
        fixture!("gridmath", "stats.py"),
        fixture!("gridmath", "path.py"),
        fixture!("taskrunner", "config.py"),
        fixture!("taskrunner", "registry.py"),
        fixture!("taskrunner", "runner.py"),
        fixture!("taskrunner", "queue.py"),
        fixture!("taskrunner", "audit.py"),
        fixture!("webstub", "routes.py"),
        fixture!("webstub", "handlers.py"),
        fixture!("webstub", "render.py"),
        fixture!("webstub", "server.py"),
        fixture!("webstub", "middleware.py"),
        fixture!("datapipe", "reader.py"),
        fixture!("datapipe", "clean.py"),
        fixture!("datapipe", "aggregate.py"),
        fixture!("datapipe", "export.py"),
        fixture!("datapipe", "validate.py"),
        fixture!("brokenlab", "experiment.py"),
        fixture!("brokenlab", "notes.py"),
        fixture!("brokenlab", "legacy.py"),
        fixture!("brokenlab", "harness.py"),
        fixture!("brokenlab", "units.py"),
    ]
}

/// Paths of bundled files that contain a deliberate parse error.
pub const BROKEN_FIXTURES: &[&str] = &["experiment.py", "legacy.py"];

macro_rules! pipeline_file {
    ($repo:literal, $path:literal) => {
        CorpusFile {
            repo_name: $repo.to_string(),
            path: $path.to_string(),
            content: include_str!(concat!("../fixtures/pipeline/", $repo, "/", $path))
                .to_string(),
            license: "gpl-3.0".to_string(),
        }
    };
}

/// Three repositories, eight files, with fully hand-traced cascade behavior:
/// `alpha/big.py` exceeds 4096 bytes, `gamma` is a single-file repository,
/// and `beta/two.py` and `beta/noop.py` contain no internal calls.
pub fn pipeline_corpus() -> Vec<CorpusFile> {
    let mut big = String::from("# padding module kept out of the analysis by the size filter\n");
    big.push_str("def filler_block():\n    value = 0\n");
    for _ in 0..190 {
        big.push_str("    value = value + 1\n");
    }
    big.push_str("    return value\n");
    debug_assert!(big.len() > 4096);
    vec![
        pipeline_file!("alpha", "utils.py"),
        pipeline_file!("alpha", "config.py"),
        pipeline_file!("alpha", "main.py"),
        CorpusFile {
            repo_name: "alpha".to_string(),
            path: "big.py".to_string(),
            content: big,
            license: "gpl-3.0".to_string(),
        },
        pipeline_file!("beta", "one.py"),
        pipeline_file!("beta", "two.py"),
        pipeline_file!("beta", "noop.py"),
        pipeline_file!("gamma", "lone.py"),
    ]
}

/// The hello-world program with a hand-built vocabulary and golden
/// alignment, all under `fixtures/`.
pub fn hello_world_source() -> &'static [u8] {
    include_bytes!("../fixtures/hello_world.py")
}

pub fn hello_world_golden() -> &'static str {
    include_str!("../fixtures/goldens/hello_world_alignment.jsonl")
}
