//! Concrete syntax trees for Java sources.
//!
//! Everything downstream that needs to look at Java code structurally goes
//! through this crate: the reference toolchain lowers these trees into its
//! own IR, and the mutation engine rewrites sources by byte-range edits over
//! them so untouched text keeps its original formatting.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

pub use tree_sitter::{Node, Tree};

mod edit;
mod walk;

pub use edit::{apply_edits, Edit, EditError};
pub use walk::{ancestors, descendants, named_children, Descendants};

/// A parse problem located in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxIssue {
    /// 1-based line.
    pub line: usize,
    /// 1-based column.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SyntaxError {
    #[error("source is not valid Java: {}", .0.first().map(|i| i.to_string()).unwrap_or_default())]
    Invalid(Vec<SyntaxIssue>),
    #[error("the Java grammar could not be loaded: {0}")]
    Grammar(String),
}

/// A parsed Java compilation unit together with its text.
pub struct JavaSource {
    text: String,
    tree: Tree,
}

impl fmt::Debug for JavaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JavaSource").field("bytes", &self.text.len()).finish()
    }
}

impl Clone for JavaSource {
    fn clone(&self) -> Self {
        JavaSource {
            text: self.text.clone(),
            tree: self.tree.clone(),
        }
    }
}

fn parser() -> Result<tree_sitter::Parser, SyntaxError> {
    let mut parser = tree_sitter::Parser::new();
    parser
        .set_language(&tree_sitter_java::LANGUAGE.into())
        .map_err(|e| SyntaxError::Grammar(e.to_string()))?;
    Ok(parser)
}

impl JavaSource {
    /// Parses `text`, rejecting sources that contain syntax errors.
    pub fn parse(text: impl Into<String>) -> Result<Self, SyntaxError> {
        let source = Self::parse_lenient(text)?;
        let issues = source.syntax_issues();
        if issues.is_empty() {
            Ok(source)
        } else {
            Err(SyntaxError::Invalid(issues))
        }
    }

    /// Parses `text`, keeping error-recovery nodes in the tree.
    pub fn parse_lenient(text: impl Into<String>) -> Result<Self, SyntaxError> {
        let text = text.into();
        let tree = parser()?
            .parse(&text, None)
            .ok_or_else(|| SyntaxError::Grammar("parser returned no tree".into()))?;
        Ok(JavaSource { text, tree })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn into_text(self) -> String {
        self.text
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn root(&self) -> Node<'_> {
        self.tree.root_node()
    }

    pub fn node_text(&self, node: Node<'_>) -> &str {
        &self.text[node.byte_range()]
    }

    /// 1-based line of a byte offset.
    pub fn line_of(&self, byte: usize) -> usize {
        line_of(&self.text, byte)
    }

    /// 1-based starting line of a node.
    pub fn line(&self, node: Node<'_>) -> usize {
        node.start_position().row + 1
    }

    pub fn line_count(&self) -> usize {
        self.text.lines().count()
    }

    /// Every `ERROR` and `MISSING` node, in source order.
    pub fn syntax_issues(&self) -> Vec<SyntaxIssue> {
        let mut issues = Vec::new();
        if !self.root().has_error() {
            return issues;
        }
        for node in descendants(self.root()) {
            if node.is_error() {
                let snippet: String = self.node_text(node).chars().take(24).collect();
                issues.push(SyntaxIssue {
                    line: node.start_position().row + 1,
                    column: node.start_position().column + 1,
                    message: format!("illegal start of expression or statement near '{}'", snippet.trim()),
                });
            } else if node.is_missing() {
                issues.push(SyntaxIssue {
                    line: node.start_position().row + 1,
                    column: node.start_position().column + 1,
                    message: format!("'{}' expected", node.kind()),
                });
            }
        }
        issues
    }

    /// All nodes of the given kind, in source order.
    pub fn nodes_of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = Node<'a>> + 'a {
        descendants(self.root()).filter(move |n| n.kind() == kind)
    }

    /// Set of every identifier-like token spelled in the source, including
    /// type names and labels. Used to pick names that cannot capture or
    /// collide with anything already in the program.
    pub fn identifiers(&self) -> BTreeSet<String> {
        descendants(self.root())
            .filter(|n| matches!(n.kind(), "identifier" | "type_identifier"))
            .map(|n| self.node_text(n).to_string())
            .collect()
    }

    pub fn imports(&self) -> Vec<Import> {
        let mut out = Vec::new();
        for node in named_children(self.root()) {
            if node.kind() != "import_declaration" {
                continue;
            }
            let mut path = None;
            let mut wildcard = false;
            let mut is_static = false;
            let mut cursor = node.walk();
            for child in node.children(&mut cursor) {
                match child.kind() {
                    "static" => is_static = true,
                    "asterisk" => wildcard = true,
                    "identifier" | "scoped_identifier" => path = Some(self.node_text(child).to_string()),
                    _ => {}
                }
            }
            if let Some(path) = path {
                out.push(Import {
                    path,
                    is_static,
                    wildcard,
                    line: self.line(node),
                });
            }
        }
        out
    }

    pub fn package(&self) -> Option<String> {
        named_children(self.root())
            .find(|n| n.kind() == "package_declaration")
            .and_then(|n| named_children(n).find(|c| matches!(c.kind(), "identifier" | "scoped_identifier")))
            .map(|n| self.node_text(n).to_string())
    }

    /// Names of top-level type declarations.
    pub fn top_level_types(&self) -> Vec<String> {
        named_children(self.root())
            .filter(|n| {
                matches!(
                    n.kind(),
                    "class_declaration" | "interface_declaration" | "enum_declaration" | "record_declaration"
                )
            })
            .filter_map(|n| n.child_by_field_name("name"))
            .map(|n| self.node_text(n).to_string())
            .collect()
    }

    /// Method and constructor declarations in the whole unit.
    pub fn methods(&self) -> Vec<MethodInfo<'_>> {
        descendants(self.root())
            .filter(|n| matches!(n.kind(), "method_declaration" | "constructor_declaration"))
            .filter_map(|n| {
                let name = self.node_text(n.child_by_field_name("name")?).to_string();
                let owner = ancestors(n)
                    .find(|a| {
                        matches!(
                            a.kind(),
                            "class_declaration" | "interface_declaration" | "enum_declaration" | "record_declaration"
                        )
                    })
                    .and_then(|a| a.child_by_field_name("name"))
                    .map(|a| self.node_text(a).to_string());
                Some(MethodInfo {
                    name,
                    owner,
                    node: n,
                    annotations: annotations_of(self, n),
                })
            })
            .collect()
    }

    pub fn find_method(&self, name: &str) -> Option<MethodInfo<'_>> {
        self.methods().into_iter().find(|m| m.name == name)
    }

    /// Method invocations (`name(...)` or `recv.name(...)`) under `scope`.
    pub fn invocations<'a>(&'a self, scope: Node<'a>) -> Vec<Invocation<'a>> {
        descendants(scope)
            .filter(|n| n.kind() == "method_invocation")
            .filter_map(|n| {
                let name = n.child_by_field_name("name")?;
                Some(Invocation {
                    name: self.node_text(name).to_string(),
                    receiver: n.child_by_field_name("object").map(|o| self.node_text(o).to_string()),
                    node: n,
                })
            })
            .collect()
    }
}

fn annotations_of(src: &JavaSource, decl: Node<'_>) -> Vec<String> {
    let Some(mods) = named_children(decl).find(|c| c.kind() == "modifiers") else {
        return Vec::new();
    };
    named_children(mods)
        .filter(|c| matches!(c.kind(), "annotation" | "marker_annotation"))
        .filter_map(|c| c.child_by_field_name("name"))
        .map(|n| src.node_text(n).to_string())
        .collect()
}

/// 1-based line of `byte` within `text`.
pub fn line_of(text: &str, byte: usize) -> usize {
    text.as_bytes()[..byte.min(text.len())].iter().filter(|b| **b == b'\n').count() + 1
}

/// Leading whitespace of the line containing `byte`.
pub fn indentation_at(text: &str, byte: usize) -> &str {
    let line_start = text[..byte.min(text.len())].rfind('\n').map(|i| i + 1).unwrap_or(0);
    let rest = &text[line_start..];
    let len = rest.len() - rest.trim_start_matches([' ', '\t']).len();
    &rest[..len]
}

/// Collapses all whitespace runs to a single space and trims both ends.
/// Two sources with equal normal forms are treated as the same program text.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub path: String,
    pub is_static: bool,
    pub wildcard: bool,
    pub line: usize,
}

impl Import {
    /// Package or type prefix the import reaches into.
    pub fn namespace(&self) -> &str {
        &self.path
    }
}

#[derive(Debug, Clone)]
pub struct MethodInfo<'a> {
    pub name: String,
    pub owner: Option<String>,
    pub node: Node<'a>,
    pub annotations: Vec<String>,
}

impl MethodInfo<'_> {
    pub fn body(&self) -> Option<Node<'_>> {
        self.node.child_by_field_name("body")
    }

    pub fn is_test(&self) -> bool {
        self.annotations.iter().any(|a| a == "Test" || a.ends_with(".Test"))
    }

    pub fn range(&self) -> Range<usize> {
        self.node.byte_range()
    }
}

#[derive(Debug, Clone)]
pub struct Invocation<'a> {
    pub name: String,
    pub receiver: Option<String>,
    pub node: Node<'a>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"package demo;
import java.util.List;
import static org.junit.Assert.*;

public class Sample {
    private int count = 0;
    public int showBug(String input) {
        int h = input.hashCode();
        return Math.abs(h);
    }
}
"#;

    #[test]
    fn parses_and_lists_structure() {
        let src = JavaSource::parse(SAMPLE).unwrap();
        assert_eq!(src.package().as_deref(), Some("demo"));
        assert_eq!(src.top_level_types(), vec!["Sample".to_string()]);
        let imports = src.imports();
        assert_eq!(imports.len(), 2);
        assert_eq!(imports[0].path, "java.util.List");
        assert!(imports[1].is_static && imports[1].wildcard);
        assert_eq!(imports[1].path, "org.junit.Assert");
        let m = src.find_method("showBug").unwrap();
        assert_eq!(m.owner.as_deref(), Some("Sample"));
        let calls: Vec<_> = src.invocations(m.node).into_iter().map(|i| i.name).collect();
        assert_eq!(calls, vec!["hashCode", "abs"]);
    }

    #[test]
    fn rejects_broken_code_with_location() {
        let err = JavaSource::parse("class A { void f() { int x = ; } }").unwrap_err();
        match err {
            SyntaxError::Invalid(issues) => {
                assert!(!issues.is_empty());
                assert_eq!(issues[0].line, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identifier_set_covers_types_and_locals() {
        let src = JavaSource::parse(SAMPLE).unwrap();
        let ids = src.identifiers();
        for name in ["Sample", "count", "showBug", "input", "h", "Math", "abs"] {
            assert!(ids.contains(name), "{name}");
        }
    }

    #[test]
    fn indentation_and_lines() {
        assert_eq!(indentation_at(SAMPLE, SAMPLE.find("int h").unwrap()), "        ");
        assert_eq!(line_of(SAMPLE, SAMPLE.find("return").unwrap()), 9);
    }

    #[test]
    fn whitespace_normal_form() {
        assert_eq!(normalize_whitespace("  a \n\t b  "), "a b");
    }
}
