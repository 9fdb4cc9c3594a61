//! Site discovery and rewriting for the deterministic operators. Every
//! candidate carries one or more fully built edit sets; the driver picks one.

use std::collections::BTreeSet;

use metaprobe_syntax::{ancestors, descendants, indentation_at, named_children, Edit, JavaSource, Node};

use super::Operator;

#[derive(Debug, Clone)]
pub struct Candidate {
    pub line: usize,
    pub label: String,
    pub options: Vec<Vec<Edit>>,
}

pub fn candidates(src: &JavaSource, op: Operator) -> Vec<Candidate> {
    let cx = Cx::new(src);
    match op {
        Operator::DeadStore => cx.insertions(|cx| {
            let name = cx.fresh("unused");
            DEAD_STORE_POOL.iter().map(|(ty, v)| vec![format!("{ty} {name} = {v};")]).collect()
        }),
        Operator::UnreachableIf => cx.insertions(|cx| vec![guarded(cx, &["if ({p}) {", "}"])]),
        Operator::UnreachableIfElse => cx.insertions(|cx| vec![guarded(cx, &["if ({p}) {", "} else {", "}"])]),
        Operator::UnreachableSwitch => cx.insertions(|cx| {
            vec![guarded(cx, &["switch ({p} ? 1 : 0) {", "    case 1:", "        break;", "    default:", "        break;", "}"])]
        }),
        Operator::UnreachableFor => cx.insertions(|cx| vec![guarded(cx, &["for (; {p}; ) {", "}"])]),
        Operator::UnreachableWhile => cx.insertions(|cx| vec![guarded(cx, &["while ({p}) {", "}"])]),
        Operator::DuplicateAssignment => cx.duplications(),
        Operator::ObfuscateNumeric => cx.obfuscations(),
        Operator::RenameLocal => cx.renames(),
        Operator::ForWhileToDoWhile => cx.loop_rewrites(),
    }
}

const DEAD_STORE_POOL: [(&str, &str); 6] = [("int", "0"), ("long", "0L"), ("double", "0.0"), ("String", "\"\""), ("boolean", "false"), ("char", "'a'")];

/// Opaque-predicate declaration followed by the construct it guards.
fn guarded(cx: &Cx<'_>, construct: &[&str]) -> Vec<String> {
    let p = cx.fresh("flag");
    let mut lines = vec![format!("boolean {p} = false;")];
    lines.extend(construct.iter().map(|l| l.replace("{p}", &p)));
    lines
}

const BLOCK_PARENTS: [&str; 3] = ["block", "constructor_body", "switch_block_statement_group"];

fn is_comment(n: Node<'_>) -> bool {
    matches!(n.kind(), "line_comment" | "block_comment")
}

fn statements(block: Node<'_>) -> Vec<Node<'_>> {
    named_children(block).filter(|n| !is_comment(*n)).collect()
}

fn is_executable_body(n: Node<'_>) -> bool {
    n.parent().is_some_and(|p| {
        matches!(p.kind(), "method_declaration" | "constructor_declaration") && p.child_by_field_name("body").is_some_and(|b| b.id() == n.id())
    })
}

fn in_executable(n: Node<'_>) -> bool {
    is_executable_body(n) || ancestors(n).any(is_executable_body)
}

fn enclosing_executable(n: Node<'_>) -> Option<Node<'_>> {
    std::iter::once(n).chain(ancestors(n)).find(|a| matches!(a.kind(), "method_declaration" | "constructor_declaration"))
}

struct Cx<'a> {
    src: &'a JavaSource,
    text: &'a str,
    idents: BTreeSet<String>,
    finals: BTreeSet<String>,
}

impl<'a> Cx<'a> {
    fn new(src: &'a JavaSource) -> Self {
        let mut finals = BTreeSet::new();
        for n in descendants(src.root()) {
            if !matches!(n.kind(), "local_variable_declaration" | "field_declaration" | "formal_parameter" | "constant_declaration") {
                continue;
            }
            let is_final = n.kind() == "constant_declaration"
                || named_children(n).any(|c| c.kind() == "modifiers" && descendants(c).any(|m| m.kind() == "final"));
            if is_final {
                for d in named_children(n) {
                    if let Some(name) = d.child_by_field_name("name") {
                        finals.insert(src.node_text(name).to_string());
                    }
                }
            }
        }
        Cx { src, text: src.text(), idents: src.identifiers(), finals }
    }

    fn t(&self, n: Node<'_>) -> &'a str {
        &self.text[n.byte_range()]
    }

    fn fresh(&self, base: &str) -> String {
        if !self.idents.contains(base) {
            return base.to_string();
        }
        (1..).map(|i| format!("{base}{i}")).find(|c| !self.idents.contains(c)).expect("unbounded supply")
    }

    fn line(&self, n: Node<'_>) -> usize {
        self.src.line(n)
    }

    /// One candidate per position where statements can be inserted inside a
    /// method or constructor body.
    fn insertions(&self, build: impl Fn(&Cx<'_>) -> Vec<Vec<String>>) -> Vec<Candidate> {
        let variants = build(self);
        let mut out = Vec::new();
        for block in descendants(self.src.root()).filter(|n| matches!(n.kind(), "block" | "constructor_body")) {
            if !in_executable(block) {
                continue;
            }
            let stmts = statements(block);
            if stmts.is_empty() {
                let at = block.start_byte() + 1;
                let options = variants.iter().map(|lines| vec![Edit::insert(at, format!(" {} ", lines.join(" ")))]).collect();
                out.push(Candidate { line: self.line(block), label: format!("empty block at line {}", self.line(block)), options });
                continue;
            }
            for s in &stmts {
                if s.kind() == "explicit_constructor_invocation" {
                    continue;
                }
                let indent = indentation_at(self.text, s.start_byte());
                let options = variants
                    .iter()
                    .map(|lines| {
                        let text: String = lines.iter().map(|l| format!("{l}\n{indent}")).collect();
                        vec![Edit::insert(s.start_byte(), text)]
                    })
                    .collect();
                out.push(Candidate { line: self.line(*s), label: format!("before line {}", self.line(*s)), options });
            }
            let last = *stmts.last().expect("non-empty");
            if matches!(last.kind(), "expression_statement" | "local_variable_declaration" | "explicit_constructor_invocation") {
                let indent = indentation_at(self.text, last.start_byte());
                let options = variants
                    .iter()
                    .map(|lines| {
                        let text: String = lines.iter().map(|l| format!("\n{indent}{l}")).collect();
                        vec![Edit::insert(last.end_byte(), text)]
                    })
                    .collect();
                out.push(Candidate { line: self.line(last), label: format!("after line {}", self.line(last)), options });
            }
        }
        out
    }

    fn duplications(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for stmt in descendants(self.src.root()).filter(|n| n.kind() == "expression_statement") {
            if !in_executable(stmt) || !stmt.parent().is_some_and(|p| BLOCK_PARENTS.contains(&p.kind())) {
                continue;
            }
            let Some(asg) = named_children(stmt).next().filter(|n| n.kind() == "assignment_expression") else { continue };
            if asg.child_by_field_name("operator").map(|o| self.t(o)) != Some("=") {
                continue;
            }
            let (Some(lhs), Some(rhs)) = (asg.child_by_field_name("left"), asg.child_by_field_name("right")) else { continue };
            if self.duplicable(stmt, lhs, rhs) {
                let indent = indentation_at(self.text, stmt.start_byte());
                let copy = format!("\n{indent}{}", self.t(stmt));
                out.push(Candidate {
                    line: self.line(stmt),
                    label: format!("assignment at line {}", self.line(stmt)),
                    options: vec![vec![Edit::insert(stmt.end_byte(), copy)]],
                });
            }
        }
        out
    }

    fn duplicable(&self, stmt: Node<'_>, lhs: Node<'_>, rhs: Node<'_>) -> bool {
        let lhs_names: BTreeSet<&str> = match lhs.kind() {
            "identifier" => [self.t(lhs)].into(),
            "field_access" => {
                let (Some(obj), Some(field)) = (lhs.child_by_field_name("object"), lhs.child_by_field_name("field")) else { return false };
                if !matches!(obj.kind(), "this" | "identifier") {
                    return false;
                }
                let mut s: BTreeSet<&str> = [self.t(field)].into();
                if obj.kind() == "identifier" {
                    s.insert(self.t(obj));
                }
                s
            }
            "array_access" => {
                let (Some(arr), Some(idx)) = (lhs.child_by_field_name("array"), lhs.child_by_field_name("index")) else { return false };
                if arr.kind() != "identifier" || !matches!(idx.kind(), "identifier" | "decimal_integer_literal") {
                    return false;
                }
                [self.t(arr), self.t(idx)].into_iter().filter(|s| !s.chars().next().is_some_and(|c| c.is_ascii_digit())).collect()
            }
            _ => return false,
        };
        if lhs_names.iter().any(|n| self.finals.contains(*n)) {
            return false;
        }
        for n in descendants(rhs) {
            let ok = match n.kind() {
                "identifier" | "this" | "parenthesized_expression" | "binary_expression" | "unary_expression" | "cast_expression"
                | "ternary_expression" | "field_access" | "true" | "false" | "null_literal" | "string_literal" | "string_fragment"
                | "escape_sequence" | "character_literal" | "decimal_integer_literal" | "hex_integer_literal" | "octal_integer_literal"
                | "binary_integer_literal" | "decimal_floating_point_literal" | "hex_floating_point_literal" => true,
                k if !n.is_named() => !matches!(k, "++" | "--"),
                "multiline_string_fragment" => true,
                k => k.contains("type"),
            };
            if !ok {
                return false;
            }
            if n.kind() == "field_access" && n.child_by_field_name("object").is_some_and(|o| o.kind() != "this") {
                return false;
            }
        }
        let method = enclosing_executable(stmt);
        let declared_locally = |name: &str| {
            method.is_some_and(|m| {
                descendants(m)
                    .filter(|d| matches!(d.kind(), "formal_parameter" | "variable_declarator"))
                    .filter_map(|d| d.child_by_field_name("name"))
                    .any(|d| self.t(d) == name)
            })
        };
        for id in descendants(rhs).filter(|n| n.kind() == "identifier") {
            let name = self.t(id);
            if !lhs_names.contains(name) {
                continue;
            }
            let bare = id.parent().is_none_or(|p| p.kind() != "field_access");
            let this_field = lhs.kind() == "field_access" && lhs.child_by_field_name("object").is_some_and(|o| o.kind() == "this");
            if !(this_field && bare && declared_locally(name)) {
                return false;
            }
        }
        if lhs.kind() == "identifier" {
            if let Some(m) = method {
                let name = self.t(lhs);
                let captured = descendants(m)
                    .filter(|d| matches!(d.kind(), "lambda_expression" | "class_body"))
                    .any(|scope| descendants(scope).any(|d| d.kind() == "identifier" && self.t(d) == name));
                if captured {
                    return false;
                }
            }
        }
        true
    }

    fn obfuscations(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for n in descendants(self.src.root()) {
            let value = match n.kind() {
                "assignment_expression" if n.child_by_field_name("operator").map(|o| self.t(o)) == Some("=") => {
                    let lhs = n.child_by_field_name("left");
                    if lhs.is_some_and(|l| l.kind() == "identifier" && self.declared_types(self.t(l)).iter().any(|t| NARROW.contains(&t.as_str()))) {
                        continue;
                    }
                    n.child_by_field_name("right")
                }
                "variable_declarator" => {
                    let ty = n.parent().and_then(|p| p.child_by_field_name("type")).map(|t| self.t(t));
                    if ty.is_none_or(|t| NARROW.contains(&t)) {
                        continue;
                    }
                    n.child_by_field_name("value")
                }
                "return_statement" => {
                    let owner = ancestors(n).find(|a| matches!(a.kind(), "method_declaration" | "lambda_expression"));
                    let Some(m) = owner.filter(|m| m.kind() == "method_declaration") else { continue };
                    if m.child_by_field_name("type").is_none_or(|t| NARROW.contains(&self.t(t))) {
                        continue;
                    }
                    named_children(n).find(|c| !is_comment(*c))
                }
                _ => continue,
            };
            let Some(v) = value else { continue };
            let Some(ty) = self.numeric_type(v) else { continue };
            let text = self.t(v);
            let options: Vec<Vec<Edit>> = ty
                .pool()
                .iter()
                .filter(|c| ty.exact(text, c))
                .map(|c| vec![Edit::replace(v.byte_range(), format!("{text} + {c} - {c}"))])
                .collect();
            if !options.is_empty() {
                out.push(Candidate { line: self.line(v), label: format!("value `{text}` at line {}", self.line(v)), options });
            }
        }
        out
    }

    /// Declared types of every variable named `name`; `None` entries stand
    /// for declarations whose type is not spelled out.
    fn declared_types(&self, name: &str) -> Vec<String> {
        let mut out = Vec::new();
        for d in descendants(self.src.root()) {
            let ty = match d.kind() {
                "variable_declarator" => {
                    if d.child_by_field_name("name").map(|n| self.t(n)) != Some(name) {
                        continue;
                    }
                    if d.child_by_field_name("dimensions").is_some() {
                        out.push("[]".into());
                        continue;
                    }
                    d.parent().and_then(|p| p.child_by_field_name("type"))
                }
                "formal_parameter" | "catch_formal_parameter" | "enhanced_for_statement" => {
                    if d.child_by_field_name("name").map(|n| self.t(n)) != Some(name) {
                        continue;
                    }
                    if d.child_by_field_name("dimensions").is_some() {
                        out.push("[]".into());
                        continue;
                    }
                    d.child_by_field_name("type")
                }
                "lambda_expression" | "inferred_parameters" => {
                    let params = if d.kind() == "lambda_expression" { d.child_by_field_name("parameters") } else { Some(d) };
                    if params.is_some_and(|p| p.kind() != "formal_parameters" && descendants(p).any(|i| i.kind() == "identifier" && self.t(i) == name)) {
                        out.push("?".into());
                    }
                    continue;
                }
                _ => continue,
            };
            out.push(ty.map(|t| self.t(t).to_string()).unwrap_or_else(|| "?".into()));
        }
        out
    }

    fn numeric_type(&self, v: Node<'_>) -> Option<NumType> {
        match v.kind() {
            "decimal_integer_literal" | "hex_integer_literal" | "octal_integer_literal" | "binary_integer_literal" => {
                Some(if self.t(v).ends_with(['l', 'L']) { NumType::Long } else { NumType::Int })
            }
            "decimal_floating_point_literal" => Some(if self.t(v).ends_with(['f', 'F']) { NumType::Float } else { NumType::Double }),
            "unary_expression" => {
                let op = v.child_by_field_name("operator").map(|o| self.t(o));
                let operand = v.child_by_field_name("operand")?;
                if op != Some("-") || operand.kind() == "identifier" {
                    return None;
                }
                self.numeric_type(operand)
            }
            "identifier" => {
                let types = self.declared_types(self.t(v));
                let first = types.first()?;
                if !types.iter().all(|t| t == first) {
                    return None;
                }
                match first.as_str() {
                    "int" => Some(NumType::Int),
                    "long" => Some(NumType::Long),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn renames(&self) -> Vec<Candidate> {
        let free: Vec<String> = ('a'..='z').map(String::from).filter(|c| !self.idents.contains(c)).collect();
        if free.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for decl in descendants(self.src.root()).filter(|n| n.kind() == "local_variable_declaration") {
            if !in_executable(decl) {
                continue;
            }
            let Some(parent) = decl.parent() else { continue };
            let scope = match parent.kind() {
                "block" | "constructor_body" | "for_statement" => parent,
                "switch_block_statement_group" => match parent.parent() {
                    Some(p) => p,
                    None => continue,
                },
                _ => continue,
            };
            for d in named_children(decl).filter(|c| c.kind() == "variable_declarator") {
                let Some(name_node) = d.child_by_field_name("name") else { continue };
                let name = self.t(name_node);
                if let Some(refs) = self.references(name, d.start_byte(), scope) {
                    let options = free
                        .iter()
                        .map(|letter| refs.iter().map(|r| Edit::replace(r.clone(), letter.clone())).collect())
                        .collect();
                    out.push(Candidate { line: self.line(d), label: format!("local `{name}` at line {}", self.line(d)), options });
                }
            }
        }
        out
    }

    /// Ranges of every use of local `name` declared at `from` within `scope`,
    /// the declaration included. `None` when renaming is not provably safe.
    fn references(&self, name: &str, from: usize, scope: Node<'_>) -> Option<Vec<std::ops::Range<usize>>> {
        let mut refs = Vec::new();
        for id in descendants(scope) {
            if id.kind() != "identifier" || id.start_byte() < from || self.t(id) != name {
                continue;
            }
            if ancestors(id).take_while(|a| a.id() != scope.id()).any(|a| a.kind() == "class_body") {
                return None;
            }
            let parent = id.parent()?;
            let excluded = match parent.kind() {
                "field_access" => parent.child_by_field_name("field").is_some_and(|f| f.id() == id.id()),
                "method_invocation" => parent.child_by_field_name("name").is_some_and(|f| f.id() == id.id()),
                "labeled_statement" | "break_statement" | "continue_statement" => true,
                "element_value_pair" => parent.child_by_field_name("key").is_some_and(|f| f.id() == id.id()),
                "method_reference" => parent.named_child(0).is_none_or(|f| f.id() != id.id()),
                _ => false,
            };
            if !excluded {
                refs.push(id.byte_range());
            }
        }
        (!refs.is_empty()).then_some(refs)
    }

    fn loop_rewrites(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for l in descendants(self.src.root()).filter(|n| matches!(n.kind(), "while_statement" | "for_statement")) {
            if !in_executable(l) {
                continue;
            }
            let rewritten = if l.kind() == "while_statement" { self.rewrite_while(l) } else { self.rewrite_for(l) };
            if let Some(edit) = rewritten {
                out.push(Candidate { line: self.line(l), label: format!("{} at line {}", l.kind().replace('_', " "), self.line(l)), options: vec![vec![edit]] });
            }
        }
        out
    }

    /// The node the rewrite replaces (the loop or its label) plus the label.
    fn loop_target<'n>(&self, l: Node<'n>) -> Option<(Node<'n>, String)> {
        match l.parent() {
            Some(p) if p.kind() == "labeled_statement" => {
                if p.parent().is_some_and(|g| g.kind() == "labeled_statement") {
                    return None;
                }
                let label = named_children(p).find(|c| c.kind() == "identifier")?;
                Some((p, format!("{}: ", self.t(label))))
            }
            _ => Some((l, String::new())),
        }
    }

    /// `Some(true)` for a literal `true`, `Some(false)` for an ordinary
    /// runtime condition, `None` when it may be a compile-time constant.
    fn condition_kind(&self, cond: Option<Node<'_>>) -> Option<bool> {
        let Some(c) = cond else { return Some(true) };
        let inner = if c.kind() == "parenthesized_expression" { named_children(c).next()? } else { c };
        if self.t(inner) == "true" {
            return Some(true);
        }
        let nodes: Vec<Node<'_>> = descendants(inner).collect();
        if nodes.iter().any(|n| n.kind() == "method_invocation") {
            return Some(false);
        }
        let ids: Vec<&str> = nodes.iter().filter(|n| n.kind() == "identifier").map(|n| self.t(*n)).collect();
        if ids.is_empty() || ids.iter().any(|i| self.finals.contains(*i)) {
            return None;
        }
        Some(false)
    }

    fn shifted(&self, n: Node<'_>, by: usize) -> String {
        let protected: Vec<std::ops::Range<usize>> =
            descendants(n).filter(|d| matches!(d.kind(), "string_literal" | "text_block")).map(|d| d.byte_range()).collect();
        let pad = " ".repeat(by);
        let mut out = String::new();
        for (i, ch) in self.t(n).char_indices() {
            out.push(ch);
            let at = n.start_byte() + i;
            if ch == '\n' && !protected.iter().any(|r| r.contains(&at)) {
                out.push_str(&pad);
            }
        }
        out
    }

    fn needs_braces(&self, target: Node<'_>) -> bool {
        !target.parent().is_some_and(|p| BLOCK_PARENTS.contains(&p.kind()))
    }

    fn rewrite_while(&self, l: Node<'_>) -> Option<Edit> {
        let (target, label) = self.loop_target(l)?;
        let cond = l.child_by_field_name("condition")?;
        let body = l.child_by_field_name("body")?;
        let ind = indentation_at(self.text, target.start_byte());
        let c = self.t(cond);
        let text = if self.condition_kind(Some(cond))? {
            format!("{label}do {} while {c};", self.braced(body, 0))
        } else {
            let inner = format!("if {c} {{\n{ind}    {label}do {} while {c};\n{ind}}}", self.braced(body, 4));
            if self.needs_braces(target) {
                format!("{{ {inner} }}")
            } else {
                inner
            }
        };
        Some(Edit::replace(target.byte_range(), text))
    }

    fn braced(&self, body: Node<'_>, shift: usize) -> String {
        if body.kind() == "block" {
            self.shifted(body, shift)
        } else {
            format!("{{ {} }}", self.shifted(body, shift))
        }
    }

    fn rewrite_for(&self, l: Node<'_>) -> Option<Edit> {
        let (target, label) = self.loop_target(l)?;
        let body = l.child_by_field_name("body")?;
        if descendants(body).any(|n| n.kind() == "continue_statement") {
            return None;
        }
        let cond = l.child_by_field_name("condition");
        let literal_true = self.condition_kind(cond)?;
        let mut cursor = l.walk();
        let inits: Vec<Node<'_>> = l.children_by_field_name("init", &mut cursor).collect();
        let mut cursor = l.walk();
        let updates: Vec<Node<'_>> = l.children_by_field_name("update", &mut cursor).collect();
        if !updates.is_empty() && completes(body) != Completion::Yes {
            return None;
        }
        let ind = indentation_at(self.text, target.start_byte());
        let init_lines: Vec<String> = inits
            .iter()
            .map(|n| if n.kind() == "local_variable_declaration" { self.t(*n).to_string() } else { format!("{};", self.t(*n)) })
            .collect();
        let c = cond.map(|c| self.t(c)).unwrap_or("true");
        let depth = if literal_true { 4 } else { 8 };
        let pad = " ".repeat(depth);
        let mut do_block = format!("{label}do {{\n{ind}{pad}    {}", self.shifted(body, depth + 4));
        for u in &updates {
            do_block.push_str(&format!("\n{ind}{pad}    {};", self.t(*u)));
        }
        do_block.push_str(&format!("\n{ind}{pad}}} while ({c});"));
        let mut text = String::from("{");
        for i in &init_lines {
            text.push_str(&format!("\n{ind}    {i}"));
        }
        if literal_true {
            text.push_str(&format!("\n{ind}    {do_block}"));
        } else {
            text.push_str(&format!("\n{ind}    if ({c}) {{\n{ind}        {do_block}\n{ind}    }}"));
        }
        text.push_str(&format!("\n{ind}}}"));
        Some(Edit::replace(target.byte_range(), text))
    }
}

/// Types whose constant assignments rely on implicit narrowing.
const NARROW: [&str; 6] = ["byte", "short", "char", "Byte", "Short", "Character"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NumType {
    Int,
    Long,
    Double,
    Float,
}

impl NumType {
    fn pool(self) -> &'static [&'static str] {
        match self {
            NumType::Int => &["0", "1"],
            NumType::Long => &["0L", "1L"],
            NumType::Double => &["0.0", "1.0", "0.1"],
            NumType::Float => &["0.0f", "1.0f", "0.1f"],
        }
    }

    /// Whether `v + c - c` evaluates to exactly `v`. Two's-complement
    /// arithmetic always restores the value; floating point is computed.
    fn exact(self, value: &str, c: &str) -> bool {
        match self {
            NumType::Int | NumType::Long => true,
            NumType::Double => match (parse_float(value), parse_float(c)) {
                (Some(v), Some(c)) => ((v + c) - c).to_bits() == v.to_bits(),
                _ => false,
            },
            NumType::Float => match (parse_float(value), parse_float(c)) {
                (Some(v), Some(c)) => {
                    let (v, c) = (v as f32, c as f32);
                    ((v + c) - c).to_bits() == v.to_bits()
                }
                _ => false,
            },
        }
    }
}

fn parse_float(lit: &str) -> Option<f64> {
    let lit = lit.trim();
    let (neg, body) = match lit.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, lit),
    };
    let cleaned: String = body.chars().filter(|c| *c != '_').collect();
    let single = cleaned.ends_with(['f', 'F']);
    let digits = cleaned.trim_end_matches(['d', 'D', 'f', 'F']);
    let v = if single { digits.parse::<f32>().ok()? as f64 } else { digits.parse::<f64>().ok()? };
    Some(if neg { -v } else { v })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Completion {
    Yes,
    No,
    Unknown,
}

/// Conservative approximation of "can complete normally".
fn completes(n: Node<'_>) -> Completion {
    match n.kind() {
        "return_statement" | "throw_statement" | "break_statement" | "continue_statement" | "yield_statement" => Completion::No,
        "expression_statement" | "local_variable_declaration" | "empty_statement" | "assert_statement" | "enhanced_for_statement" => Completion::Yes,
        "block" => {
            let mut unknown = false;
            for s in statements(n) {
                match completes(s) {
                    Completion::No => return Completion::No,
                    Completion::Unknown => unknown = true,
                    Completion::Yes => {}
                }
            }
            if unknown {
                Completion::Unknown
            } else {
                Completion::Yes
            }
        }
        "if_statement" => match n.child_by_field_name("alternative") {
            None => Completion::Yes,
            Some(alt) => match (n.child_by_field_name("consequence").map(completes), completes(alt)) {
                (Some(Completion::No), Completion::No) => Completion::No,
                (Some(Completion::Yes), _) | (_, Completion::Yes) => Completion::Yes,
                _ => Completion::Unknown,
            },
        },
        "synchronized_statement" => n.child_by_field_name("body").map(completes).unwrap_or(Completion::Unknown),
        "while_statement" | "for_statement" => {
            // Single-token conditions such as `(true)` may be constant.
            match n.child_by_field_name("condition") {
                Some(c) if descendants(c).filter(|d| d.is_named()).count() > 2 || c.kind() == "identifier" => Completion::Yes,
                _ => Completion::Unknown,
            }
        }
        _ => Completion::Unknown,
    }
}
