//! Deterministic generator of small Python-style repositories.
//!
//! Produces desk-scale corpora for end-to-end runs and held-out evaluation:
//! every construct stays inside the built-in grammar, names are drawn from
//! weighted pools so token frequencies are skewed, and repositories share
//! helper modules so cross-file (internal) calls occur naturally.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::CorpusFile;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub repos: usize,
    pub files_per_repo: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            repos: 24,
            files_per_repo: 10,
            seed: 1,
        }
    }
}

const VERBS: &[&str] = &[
    "load", "save", "parse", "build", "make", "read", "write", "merge", "split", "check",
    "run", "init", "clean", "update", "fetch", "render", "scan", "apply",
];
const NOUNS: &[&str] = &[
    "config", "data", "index", "table", "record", "batch", "cache", "report", "token",
    "graph", "queue", "state", "buffer", "entry", "chunk", "field",
];
const VARS: &[&str] = &[
    "value", "result", "items", "total", "count", "path", "name", "out", "row", "key",
    "text", "size", "flag", "left", "right",
];
const MODULES: &[&str] = &["os", "sys", "json", "math", "re", "time"];
const EXTERNAL_CALLS: &[&str] = &[
    "os.path.join", "os.path.exists", "json.dumps", "json.loads", "math.sqrt", "math.floor",
    "re.compile", "time.time", "np.zeros", "np.array", "pd.concat",
];

/// Zipf-like choice: earlier pool entries are much more frequent.
fn weighted<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    let weights: Vec<f64> = (0..pool.len()).map(|i| 1.0 / (i + 1) as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut pick = rng.gen_range(0.0..total);
    for (item, w) in pool.iter().zip(weights) {
        if pick < w {
            return item;
        }
        pick -= w;
    }
    pool[pool.len() - 1]
}

fn method_name(rng: &mut ChaCha8Rng) -> String {
    format!("{}_{}", weighted(rng, VERBS), weighted(rng, NOUNS))
}

pub fn generate(config: &SynthConfig) -> Vec<CorpusFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();
    for repo_idx in 0..config.repos {
        let repo_name = format!("synth/repo{repo_idx:03}");
        // Helper functions defined in the repo's first files and called from
        // the later ones.
        let mut helpers: Vec<String> = Vec::new();
        for file_idx in 0..config.files_per_repo {
            let path = format!("src/mod{file_idx:02}.py");
            let content = render_file(&mut rng, file_idx, &mut helpers);
            out.push(CorpusFile {
                repo_name: repo_name.clone(),
                path,
                content,
                license: "gpl-3.0".to_string(),
            });
        }
    }
    out
}

fn render_file(rng: &mut ChaCha8Rng, file_idx: usize, helpers: &mut Vec<String>) -> String {
    let mut lines = Vec::new();
    lines.push(format!("# module {file_idx}"));
    let import_count = rng.gen_range(1..=3);
    let mut imports: Vec<&str> = MODULES.choose_multiple(rng, import_count).copied().collect();
    imports.sort_unstable();
    for module in imports {
        lines.push(format!("import {module}"));
    }
    lines.push(String::new());

    let mut new_helpers = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let name = method_name(rng);
        render_function(rng, &mut lines, &name, helpers);
        new_helpers.push(name);
    }
    // Functions become callable from files generated after this one.
    helpers.extend(new_helpers);

    let mut text = lines.join("\n");
    text.push('\n');
    text
}

fn render_function(
    rng: &mut ChaCha8Rng,
    lines: &mut Vec<String>,
    name: &str,
    helpers: &[String],
) {
    let arg_a = weighted(rng, VARS);
    let mut arg_b = weighted(rng, VARS);
    while arg_b == arg_a {
        arg_b = weighted(rng, VARS);
    }
    lines.push(format!("def {name}({arg_a}, {arg_b}=None):"));
    if rng.gen_bool(0.4) {
        lines.push(format!("    \"\"\"Combine {arg_a} with {arg_b}.\"\"\""));
    }
    let local = weighted(rng, VARS);
    match rng.gen_range(0..4) {
        0 => lines.push(format!("    {local} = {arg_a} + 1")),
        1 => lines.push(format!("    {local} = [{arg_a}, {arg_b}]")),
        2 => lines.push(format!("    {local} = {{'key': {arg_a}}}")),
        _ => lines.push(format!("    {local} = str({arg_a})")),
    }
    if rng.gen_bool(0.6) {
        let external = weighted(rng, EXTERNAL_CALLS);
        lines.push(format!("    {local} = {external}({local})"));
    }
    if !helpers.is_empty() && rng.gen_bool(0.75) {
        let callee = helpers[rng.gen_range(0..helpers.len())].clone();
        lines.push(format!("    {local} = {callee}({local}, {arg_b})"));
    }
    match rng.gen_range(0..4) {
        0 => {
            lines.push(format!("    if {arg_b} is None:"));
            lines.push(format!("        return {local}"));
            lines.push(format!("    return {arg_b}"));
        }
        1 => {
            lines.push(format!("    for item in range(len({local})):"));
            lines.push(format!("        print(item, {local})"));
            lines.push(format!("    return {local}"));
        }
        2 => {
            lines.push(format!("    while {arg_a} < 10:"));
            lines.push(format!("        {arg_a} += 1"));
            lines.push(format!("    return {arg_a}"));
        }
        _ => lines.push(format!("    return {local}")),
    }
    lines.push(String::new());
}
