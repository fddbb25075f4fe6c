//! Concrete syntax trees for Python-like source with error recovery.
//!
//! The built-in parser covers the subset needed for call-structure analysis:
//! imports, function and class definitions, assignments, expression
//! statements, calls, attributes, subscripts, operators, literals, comments,
//! `for`/`while`/`if`/`with`, and `return`. Node-type names follow the
//! tree-sitter-python vocabulary so reports are comparable across parsers.
//! Parsing never fails: a logical line that cannot be parsed is wrapped in an
//! `ERROR` node attached at statement level and parsing resynchronizes on the
//! next line. Other parsers can be plugged in through [`SyntaxProvider`].

mod lexer;
mod parser;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::span::Span;

/// A typed syntax-tree node over byte spans. Leaves have no children and a
/// non-empty span; child spans are disjoint, ordered, and inside the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxNode {
    pub node_type: String,
    pub span: Span,
    pub children: Vec<SyntaxNode>,
}

impl SyntaxNode {
    pub fn leaf(node_type: impl Into<String>, span: Span) -> Self {
        SyntaxNode {
            node_type: node_type.into(),
            span,
            children: Vec::new(),
        }
    }

    /// Interior node spanning the hull of its children.
    pub fn branch(node_type: impl Into<String>, children: Vec<SyntaxNode>) -> Self {
        debug_assert!(!children.is_empty(), "interior nodes need children");
        let span = children
            .iter()
            .map(|c| c.span)
            .reduce(|a, b| a.hull(&b))
            .unwrap_or_else(|| Span::empty(0));
        SyntaxNode {
            node_type: node_type.into(),
            span,
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Pre-order walk over this node and all descendants.
    pub fn walk(&self, f: &mut dyn FnMut(&SyntaxNode)) {
        f(self);
        for child in &self.children {
            child.walk(f);
        }
    }
}

/// The label a leaf contributes to alignment: its own type plus the type of
/// the node that contains it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeTag {
    pub parent_type: String,
    pub node_type: String,
}

impl NodeTag {
    pub fn new(parent_type: impl Into<String>, node_type: impl Into<String>) -> Self {
        NodeTag {
            parent_type: parent_type.into(),
            node_type: node_type.into(),
        }
    }
}

impl std::fmt::Display for NodeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.parent_type, self.node_type)
    }
}

/// Parse a document into a full-coverage tree. Never fails; syntactically
/// invalid regions come back wrapped in `ERROR` nodes.
pub fn parse(doc: &[u8]) -> SyntaxNode {
    parser::parse(doc)
}

/// In-order leaf list with each leaf's containing node type. The root itself
/// is never reported, so an empty document yields an empty list.
pub fn leaves(root: &SyntaxNode) -> Vec<(NodeTag, Span)> {
    fn walk(node: &SyntaxNode, out: &mut Vec<(NodeTag, Span)>) {
        for child in &node.children {
            if child.is_leaf() {
                out.push((NodeTag::new(&*node.node_type, &*child.node_type), child.span));
            } else {
                walk(child, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(root, &mut out);
    out
}

/// Names of all `function_definition` nodes, including methods nested in
/// classes.
pub fn extract_declarations(root: &SyntaxNode, doc: &[u8]) -> std::collections::BTreeSet<String> {
    let mut names = std::collections::BTreeSet::new();
    root.walk(&mut |node| {
        if node.node_type == "function_definition" {
            if let Some(name) = node.children.iter().find(|c| c.node_type == "identifier") {
                names.insert(String::from_utf8_lossy(name.span.slice(doc)).into_owned());
            }
        }
    });
    names
}

/// One method invocation found in a parsed tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invocation {
    /// Called identifier, or the final attribute segment for `obj.m()` calls.
    pub name: String,
    /// Full extent of the call node (callee plus argument list).
    pub call_span: Span,
    /// Extent of the name leaf.
    pub name_span: Span,
    /// Extent of the argument list including its parentheses.
    pub args_span: Span,
}

/// One entry per call node with a resolvable name. Calls whose callee is
/// itself a call or subscript expression carry no name and are skipped.
pub fn extract_invocations(root: &SyntaxNode, doc: &[u8]) -> Vec<Invocation> {
    let mut out = Vec::new();
    root.walk(&mut |node| {
        if node.node_type != "call" || node.children.len() < 2 {
            return;
        }
        let callee = &node.children[0];
        let args = &node.children[node.children.len() - 1];
        if args.node_type != "argument_list" {
            return;
        }
        let name_leaf = match callee.node_type.as_str() {
            "identifier" => Some(callee),
            "attribute" => callee
                .children
                .iter()
                .rev()
                .find(|c| c.node_type == "identifier"),
            _ => None,
        };
        if let Some(leaf) = name_leaf {
            out.push(Invocation {
                name: String::from_utf8_lossy(leaf.span.slice(doc)).into_owned(),
                call_span: node.span,
                name_span: leaf.span,
                args_span: args.span,
            });
        }
    });
    out
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("syntax provider produced invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("syntax provider tree is malformed: {0}")]
    Malformed(String),
    #[error("syntax provider command failed: {0}")]
    Command(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Anything that can turn document bytes into a root [`SyntaxNode`].
pub trait SyntaxProvider: Send + Sync {
    fn parse(&self, doc: &[u8]) -> Result<SyntaxNode, ProviderError>;
}

/// The built-in recovering parser.
#[derive(Debug, Default, Clone, Copy)]
pub struct BuiltinParser;

impl SyntaxProvider for BuiltinParser {
    fn parse(&self, doc: &[u8]) -> Result<SyntaxNode, ProviderError> {
        Ok(parse(doc))
    }
}

#[derive(Deserialize)]
struct JsonNode {
    node_type: String,
    span: Span,
    #[serde(default)]
    children: Vec<JsonNode>,
}

fn convert_json_node(node: JsonNode, doc_len: usize) -> Result<SyntaxNode, ProviderError> {
    if node.span.end > doc_len {
        return Err(ProviderError::Malformed(format!(
            "node {:?} span {} exceeds document length {doc_len}",
            node.node_type, node.span
        )));
    }
    let mut children = Vec::with_capacity(node.children.len());
    let mut cursor = node.span.start;
    for child in node.children {
        if child.span.start < cursor || child.span.end > node.span.end {
            return Err(ProviderError::Malformed(format!(
                "child {:?} span {} escapes parent {:?} span {}",
                child.node_type, child.span, node.node_type, node.span
            )));
        }
        cursor = child.span.end;
        children.push(convert_json_node(child, doc_len)?);
    }
    if children.is_empty() && node.span.is_empty() && node.node_type != "module" {
        return Err(ProviderError::Malformed(format!(
            "leaf {:?} has an empty span",
            node.node_type
        )));
    }
    Ok(SyntaxNode {
        node_type: node.node_type,
        span: node.span,
        children,
    })
}

/// Parse a provider's JSON tree (`{node_type, span: [s, e], children}`).
pub fn tree_from_json(json: &[u8], doc_len: usize) -> Result<SyntaxNode, ProviderError> {
    let root: JsonNode = serde_json::from_slice(json)?;
    convert_json_node(root, doc_len)
}

/// External parser invoked per document: the document arrives on stdin and
/// the JSON tree is expected on stdout.
pub struct CommandProvider {
    pub program: std::path::PathBuf,
}

impl SyntaxProvider for CommandProvider {
    fn parse(&self, doc: &[u8]) -> Result<SyntaxNode, ProviderError> {
        use std::io::Write;
        use std::process::{Command, Stdio};
        let mut child = Command::new(&self.program)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| ProviderError::Command(format!("{}: {e}", self.program.display())))?;
        child
            .stdin
            .take()
            .expect("stdin piped")
            .write_all(doc)?;
        let output = child.wait_with_output()?;
        if !output.status.success() {
            return Err(ProviderError::Command(format!(
                "{} exited with {}: {}",
                self.program.display(),
                output.status,
                String::from_utf8_lossy(&output.stderr)
            )));
        }
        tree_from_json(&output.stdout, doc.len())
    }
}

/// Serialize a tree in the provider JSON schema.
pub fn tree_to_json(node: &SyntaxNode) -> serde_json::Value {
    serde_json::json!({
        "node_type": node.node_type,
        "span": node.span,
        "children": node.children.iter().map(tree_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(src: &[u8]) -> Vec<(String, String)> {
        leaves(&parse(src))
            .into_iter()
            .map(|(t, _)| (t.parent_type, t.node_type))
            .collect()
    }

    #[test]
    fn hello_world_call_structure() {
        let root = parse(b"print('hello')");
        assert_eq!(root.node_type, "module");
        let stmt = &root.children[0];
        assert_eq!(stmt.node_type, "expression_statement");
        let call = &stmt.children[0];
        assert_eq!(call.node_type, "call");
        assert_eq!(call.children[0].node_type, "identifier");
        let args = &call.children[1];
        assert_eq!(args.node_type, "argument_list");
        let arg_types: Vec<&str> = args.children.iter().map(|c| c.node_type.as_str()).collect();
        assert_eq!(arg_types, vec!["(", "string", ")"]);
    }

    #[test]
    fn empty_document_parses_to_bare_module() {
        let root = parse(b"");
        assert_eq!(root.node_type, "module");
        assert!(root.children.is_empty());
        assert!(leaves(&root).is_empty());
    }

    #[test]
    fn malformed_header_is_wrapped_in_error() {
        let root = parse(b"def f(:");
        let mut saw_error = false;
        root.walk(&mut |n| saw_error |= n.node_type == "ERROR");
        assert!(saw_error, "expected an ERROR node: {root:#?}");
    }

    #[test]
    fn assignment_leaves_match_hand_parse() {
        let got = leaves(&parse(b"x=1"));
        let expected = vec![
            (NodeTag::new("assignment", "identifier"), Span::new(0, 1)),
            (NodeTag::new("assignment", "="), Span::new(1, 2)),
            (NodeTag::new("assignment", "integer"), Span::new(2, 3)),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn unparseable_file_tags_everything_error() {
        let got = tags(b"def def def");
        assert!(!got.is_empty());
        for (parent, _) in &got {
            assert_eq!(parent, "ERROR");
        }
    }

    #[test]
    fn comment_only_file_tags_module_comment() {
        let got = tags(b"# one\n# two\n");
        assert_eq!(
            got,
            vec![
                ("module".to_string(), "comment".to_string()),
                ("module".to_string(), "comment".to_string()),
            ]
        );
    }

    #[test]
    fn declarations_include_nested_methods() {
        let doc = b"def foo():\n    pass\n\nclass C:\n    def bar(self): pass\n";
        let names = extract_declarations(&parse(doc), doc);
        assert_eq!(
            names.into_iter().collect::<Vec<_>>(),
            vec!["bar".to_string(), "foo".to_string()]
        );
        let empty = extract_declarations(&parse(b"x = 1\n"), b"x = 1\n");
        assert!(empty.is_empty());
    }

    #[test]
    fn invocation_names_use_final_attribute() {
        let doc = b"np.random.randint(3)\n";
        let calls = extract_invocations(&parse(doc), doc);
        assert_eq!(calls.len(), 1);
        assert_eq!(calls[0].name, "randint");

        let doc = b"foo(1)\n";
        let calls = extract_invocations(&parse(doc), doc);
        assert_eq!(calls.len(), 1);
        assert_eq!(calls[0].name, "foo");
        assert_eq!(calls[0].call_span, Span::new(0, 6));

        let doc = b"print(x)\n";
        let calls = extract_invocations(&parse(doc), doc);
        assert_eq!(calls[0].name, "print");
    }

    #[test]
    fn leaf_spans_are_total_and_ordered() {
        let doc: &[u8] = b"import os\n\ndef main(argv):\n    # entry\n    value = os.path.join('a', 'b')\n    if value:\n        return [len(value), 2 ** 8]\n    return None\n$$$\nx = 1\n";
        let root = parse(doc);
        let ls = leaves(&root);
        let mut covered = vec![false; doc.len()];
        let mut last_start = 0;
        for (i, (_, span)) in ls.iter().enumerate() {
            assert!(!span.is_empty(), "leaf {i} has empty span");
            assert!(span.start >= last_start, "leaves out of order at {i}");
            last_start = span.start;
            for b in span.start..span.end {
                assert!(!covered[b], "byte {b} covered twice");
                covered[b] = true;
            }
        }
        for (i, &c) in covered.iter().enumerate() {
            if !c {
                assert!(
                    crate::bpe::is_whitespace_byte(doc[i]),
                    "non-whitespace byte {i} ({:?}) uncovered",
                    doc[i] as char
                );
            }
        }
    }

    #[test]
    fn error_region_deletion_reparses_clean() {
        let broken = b"a = 1\ndef f(:\nb = 2\n";
        let root = parse(broken);
        let mut errors = 0;
        root.walk(&mut |n| errors += (n.node_type == "ERROR") as usize);
        assert_eq!(errors, 1);

        let fixed = b"a = 1\nb = 2\n";
        let root = parse(fixed);
        root.walk(&mut |n| assert_ne!(n.node_type, "ERROR"));
    }

    #[test]
    fn provider_json_round_trip() {
        let doc = b"x = 1\n";
        let root = parse(doc);
        let json = serde_json::to_vec(&tree_to_json(&root)).unwrap();
        let back = tree_from_json(&json, doc.len()).unwrap();
        assert_eq!(back, root);
    }

    #[test]
    fn provider_json_rejects_escaping_child() {
        let bad = br#"{"node_type":"module","span":[0,3],"children":[{"node_type":"identifier","span":[2,5]}]}"#;
        assert!(tree_from_json(bad, 3).is_err());
    }
}
