//! Semantic checking: resolves names and types, enforces the compile-time
//! rules the toolchain models, and lowers bodies into [`crate::ir`].

mod body;
mod expr;
mod flow;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use metaprobe_syntax::{named_children, JavaSource, Node};

use crate::builtins::{self, Entry, Kind, P};
use crate::ir::{self, Annotation, Const, Program, SourceFile};
use crate::types::{Builtin, ClassRef, Prim, Type};

/// One source file handed to the checker.
#[derive(Debug, Clone)]
pub struct Input {
    pub path: String,
    pub text: String,
}

/// A compile error in javac's layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub line: u32,
    pub column: u32,
    pub message: String,
    /// Extra indented lines (`symbol:`, `location:` and the like).
    pub notes: Vec<String>,
    /// Offending source line, echoed under the message.
    pub source_line: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}:{}: error: {}", self.path, self.line, self.message)?;
        writeln!(f, "{}", self.source_line)?;
        writeln!(f, "{}^", " ".repeat(self.column.saturating_sub(1) as usize))?;
        for n in &self.notes {
            writeln!(f, "  {n}")?;
        }
        Ok(())
    }
}

/// Renders diagnostics followed by javac's error count line.
pub fn render(diags: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diags {
        out.push_str(&d.to_string());
    }
    match diags.len() {
        0 => {}
        1 => out.push_str("1 error\n"),
        n => out.push_str(&format!("{n} errors\n")),
    }
    out
}

pub fn check(inputs: &[Input]) -> Result<Program, Vec<Diagnostic>> {
    let mut sources = Vec::new();
    let mut diags = Vec::new();
    for input in inputs {
        match JavaSource::parse_lenient(input.text.clone()) {
            Ok(src) => {
                for issue in src.syntax_issues() {
                    diags.push(Diagnostic {
                        path: input.path.clone(),
                        line: issue.line as u32,
                        column: issue.column as u32,
                        message: issue.message.clone(),
                        notes: Vec::new(),
                        source_line: input.text.lines().nth(issue.line - 1).unwrap_or("").to_string(),
                    });
                }
                sources.push(src);
            }
            Err(e) => diags.push(Diagnostic {
                path: input.path.clone(),
                line: 1,
                column: 1,
                message: e.to_string(),
                notes: Vec::new(),
                source_line: String::new(),
            }),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut ck = Checker::new(inputs, &sources);
    ck.run();
    if ck.diags.is_empty() {
        Ok(ck.finish())
    } else {
        let mut d = ck.diags;
        d.sort_by_key(|a| (a.path.clone(), a.line));
        d.dedup();
        Err(d)
    }
}

pub(crate) fn is_comment(n: Node<'_>) -> bool {
    matches!(n.kind(), "line_comment" | "block_comment")
}

/// Named children without comments.
pub(crate) fn kids(n: Node<'_>) -> impl Iterator<Item = Node<'_>> {
    named_children(n).filter(|c| !is_comment(*c))
}

pub(crate) struct FileCtx<'a> {
    pub src: &'a JavaSource,
    pub path: String,
    pub package: Option<String>,
    pub single: HashMap<String, ClassRef>,
    pub annotations: HashMap<String, String>,
    pub wildcards: Vec<String>,
    pub static_single: Vec<(ClassRef, String)>,
    pub static_wild: Vec<ClassRef>,
}

pub(crate) struct FieldInfo<'a> {
    pub name: String,
    pub ty: Type,
    pub is_static: bool,
    pub is_final: bool,
    pub is_private: bool,
    pub declarator: Option<Node<'a>>,
    pub constant: Option<Const>,
}

pub(crate) struct MethodSig<'a> {
    pub name: String,
    pub params: Vec<(String, Type, bool)>,
    pub varargs: bool,
    pub ret: Type,
    pub is_static: bool,
    pub is_abstract: bool,
    pub is_private: bool,
    pub throws: Vec<ClassRef>,
    pub node: Node<'a>,
    pub annotations: Vec<Annotation>,
    pub has_override: bool,
}

impl MethodSig<'_> {
    pub fn param_types(&self) -> Vec<Type> {
        self.params.iter().map(|p| p.1.clone()).collect()
    }
}

pub(crate) struct CtorSig<'a> {
    pub params: Vec<(String, Type, bool)>,
    pub varargs: bool,
    pub throws: Vec<ClassRef>,
    pub node: Option<Node<'a>>,
}

pub(crate) struct ClassInfo<'a> {
    pub name: String,
    pub display: String,
    pub binary: String,
    pub file: usize,
    pub node: Node<'a>,
    pub outer: Option<usize>,
    pub is_static: bool,
    pub is_interface: bool,
    pub is_abstract: bool,
    pub is_final: bool,
    pub superclass: ClassRef,
    pub interfaces: Vec<ClassRef>,
    pub nested: Vec<(String, usize)>,
    pub fields: Vec<FieldInfo<'a>>,
    pub methods: Vec<MethodSig<'a>>,
    pub ctors: Vec<CtorSig<'a>>,
    pub line: u32,
}

/// Resolved method or constructor target.
#[derive(Clone)]
pub(crate) enum Callee {
    User { class: usize, index: usize },
    Builtin(&'static Entry),
}

#[derive(Clone)]
pub(crate) struct Cand {
    pub params: Vec<Type>,
    /// Parameters that accept any argument unconverted.
    pub any: Vec<bool>,
    pub varargs: bool,
    pub callee: Callee,
    pub is_static: bool,
    pub ret: Type,
}

pub(crate) struct Checker<'a> {
    pub files: Vec<FileCtx<'a>>,
    pub classes: Vec<ClassInfo<'a>>,
    pub diags: Vec<Diagnostic>,
    pub lowered_methods: BTreeMap<(usize, usize), ir::Method>,
    pub lowered_ctors: BTreeMap<(usize, usize), ir::Ctor>,
    pub static_init: BTreeMap<usize, ir::Body>,
    pub instance_init: BTreeMap<usize, ir::Body>,
}

const KNOWN_ANNOTATIONS: &[&str] = &[
    "org.junit.Test",
    "org.junit.Before",
    "org.junit.After",
    "org.junit.BeforeClass",
    "org.junit.AfterClass",
    "org.junit.Ignore",
    "org.junit.jupiter.api.Test",
    "org.junit.jupiter.api.BeforeEach",
    "org.junit.jupiter.api.AfterEach",
    "org.junit.jupiter.api.BeforeAll",
    "org.junit.jupiter.api.AfterAll",
    "org.junit.jupiter.api.Disabled",
    "org.junit.jupiter.api.DisplayName",
    "java.lang.Override",
    "java.lang.SuppressWarnings",
    "java.lang.Deprecated",
    "java.lang.FunctionalInterface",
    "java.lang.SafeVarargs",
];

const KNOWN_PACKAGES: &[&str] = &["java.lang", "java.util", "java.io", "org.junit", "org.junit.jupiter.api"];

fn modifiers_of<'a>(decl: Node<'a>) -> Option<Node<'a>> {
    kids(decl).find(|c| c.kind() == "modifiers")
}

impl<'a> Checker<'a> {
    fn new(inputs: &[Input], sources: &'a [JavaSource]) -> Self {
        let files = inputs
            .iter()
            .zip(sources)
            .map(|(input, src)| FileCtx {
                src,
                path: input.path.clone(),
                package: src.package(),
                single: HashMap::new(),
                annotations: HashMap::new(),
                wildcards: Vec::new(),
                static_single: Vec::new(),
                static_wild: Vec::new(),
            })
            .collect();
        Checker {
            files,
            classes: Vec::new(),
            diags: Vec::new(),
            lowered_methods: BTreeMap::new(),
            lowered_ctors: BTreeMap::new(),
            static_init: BTreeMap::new(),
            instance_init: BTreeMap::new(),
        }
    }

    pub fn text(&self, file: usize, n: Node<'_>) -> &'a str {
        let src: &'a JavaSource = self.files[file].src;
        &src.text()[n.byte_range()]
    }

    pub fn error(&mut self, file: usize, n: Node<'_>, message: impl Into<String>) {
        self.error_notes(file, n, message, Vec::new());
    }

    pub fn error_notes(&mut self, file: usize, n: Node<'_>, message: impl Into<String>, notes: Vec<String>) {
        let f = &self.files[file];
        let line = n.start_position().row as u32 + 1;
        self.diags.push(Diagnostic {
            path: f.path.clone(),
            line,
            column: n.start_position().column as u32 + 1,
            message: message.into(),
            notes,
            source_line: f.src.text().lines().nth(line as usize - 1).unwrap_or("").to_string(),
        });
    }

    pub fn class_name(&self, i: usize) -> String {
        self.classes[i].display.clone()
    }

    pub fn show(&self, t: &Type) -> String {
        let names = |i: usize| self.classes[i].display.clone();
        t.display(&names).to_string()
    }

    pub fn show_ref(&self, c: ClassRef) -> String {
        match c {
            ClassRef::Builtin(b) => b.info().simple.to_string(),
            ClassRef::User(i) => self.class_name(i),
        }
    }

    fn run(&mut self) {
        for f in 0..self.files.len() {
            self.collect_imports(f);
            let root = self.files[f].src.root();
            for n in kids(root) {
                self.collect_class(f, n, None);
            }
        }
        self.check_duplicate_classes();
        for c in 0..self.classes.len() {
            self.resolve_supertypes(c);
        }
        self.check_cycles();
        for c in 0..self.classes.len() {
            self.collect_members(c);
        }
        self.compute_constants();
        for c in 0..self.classes.len() {
            self.check_class_rules(c);
        }
        if !self.diags.is_empty() {
            return;
        }
        for c in 0..self.classes.len() {
            body::lower_class(self, c);
        }
    }

    fn collect_imports(&mut self, f: usize) {
        let src = self.files[f].src;
        let imports = src.imports();
        let node_of_line = |line: usize| {
            kids(src.root())
                .find(|n| n.kind() == "import_declaration" && n.start_position().row + 1 == line)
                .unwrap()
        };
        for imp in imports {
            let node = node_of_line(imp.line);
            if imp.is_static {
                let (owner, member) = if imp.wildcard {
                    (imp.path.as_str(), None)
                } else {
                    match imp.path.rsplit_once('.') {
                        Some((o, m)) => (o, Some(m.to_string())),
                        None => (imp.path.as_str(), None),
                    }
                };
                match self.class_by_fqn(owner) {
                    Some(c) => match member {
                        Some(m) => self.files[f].static_single.push((c, m)),
                        None => self.files[f].static_wild.push(c),
                    },
                    None => self.import_error(f, node, owner),
                }
            } else if imp.wildcard {
                let known = KNOWN_PACKAGES.contains(&imp.path.as_str())
                    || imp.path.starts_with("java.")
                    || self.files.iter().any(|x| x.package.as_deref() == Some(imp.path.as_str()));
                if known {
                    self.files[f].wildcards.push(imp.path.clone());
                } else {
                    self.error(f, node, format!("package {} does not exist", imp.path));
                }
            } else if KNOWN_ANNOTATIONS.contains(&imp.path.as_str()) {
                let simple = imp.path.rsplit('.').next().unwrap().to_string();
                self.files[f].annotations.insert(simple, imp.path.clone());
            } else if let Some(c) = self.class_by_fqn(&imp.path) {
                let simple = imp.path.rsplit('.').next().unwrap().to_string();
                self.files[f].single.insert(simple, c);
            } else {
                self.import_error(f, node, &imp.path);
            }
        }
    }

    fn import_error(&mut self, f: usize, node: Node<'_>, path: &str) {
        let (pkg, simple) = path.rsplit_once('.').unwrap_or(("", path));
        if KNOWN_PACKAGES.contains(&pkg) || pkg.starts_with("java.") {
            self.error(f, node, format!("class {path} is not supported by this toolchain"));
        } else if self.files.iter().any(|x| x.package.as_deref() == Some(pkg)) {
            self.error_notes(f, node, "cannot find symbol", vec![format!("symbol:   class {simple}"), format!("location: package {pkg}")]);
        } else {
            self.error(f, node, format!("package {pkg} does not exist"));
        }
    }

    /// Finds a class by fully qualified name among library and user classes.
    /// User classes are only known after collection, so user lookups made
    /// while imports are processed scan the syntax trees directly.
    fn class_by_fqn(&self, fqn: &str) -> Option<ClassRef> {
        if let Some(b) = Builtin::by_fqn(fqn) {
            return Some(ClassRef::Builtin(b));
        }
        for (i, c) in self.classes.iter().enumerate() {
            let pkg = self.files[c.file].package.clone();
            let full = match pkg {
                Some(p) => format!("{}.{}", p, c.display),
                None => c.display.clone(),
            };
            if full == fqn {
                return Some(ClassRef::User(i));
            }
        }
        if self.classes.is_empty() {
            for f in &self.files {
                for name in f.src.top_level_types() {
                    let full = match &f.package {
                        Some(p) => format!("{p}.{name}"),
                        None => name.clone(),
                    };
                    if full == fqn {
                        return Some(ClassRef::User(usize::MAX));
                    }
                }
            }
        }
        None
    }

    fn collect_class(&mut self, f: usize, n: Node<'a>, outer: Option<usize>) {
        match n.kind() {
            "class_declaration" | "interface_declaration" => {}
            "enum_declaration" | "record_declaration" | "annotation_type_declaration" => {
                let what = n.kind().trim_end_matches("_declaration").replace('_', " ");
                self.error(f, n, format!("{what} declarations are not supported by this toolchain"));
                return;
            }
            _ => return,
        }
        let Some(name_node) = n.child_by_field_name("name") else { return };
        let name = self.text(f, name_node).to_string();
        if n.child_by_field_name("type_parameters").is_some() {
            self.error(f, n, "generic class declarations are not supported by this toolchain");
        }
        let is_interface = n.kind() == "interface_declaration";
        let mods = modifiers_of(n).map(|m| self.text(f, m)).unwrap_or("");
        let has = |m: &str| mods.split(|c: char| !c.is_alphanumeric()).any(|w| w == m);
        let outer_is_interface = outer.map(|o| self.classes[o].is_interface).unwrap_or(false);
        let (display, binary) = match outer {
            Some(o) => (format!("{}.{}", self.classes[o].display, name), format!("{}${}", self.classes[o].binary, name)),
            None => {
                let bin = match &self.files[f].package {
                    Some(p) => format!("{p}.{name}"),
                    None => name.clone(),
                };
                (name.clone(), bin)
            }
        };
        let idx = self.classes.len();
        self.classes.push(ClassInfo {
            name: name.clone(),
            display,
            binary,
            file: f,
            node: n,
            outer,
            is_static: outer.is_none() || has("static") || is_interface || outer_is_interface,
            is_interface,
            is_abstract: is_interface || has("abstract"),
            is_final: has("final"),
            superclass: ClassRef::Builtin(Builtin::Object),
            interfaces: Vec::new(),
            nested: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            ctors: Vec::new(),
            line: n.start_position().row as u32 + 1,
        });
        if let Some(o) = outer {
            self.classes[o].nested.push((name, idx));
        }
        if let Some(body) = n.child_by_field_name("body") {
            for m in kids(body) {
                self.collect_class(f, m, Some(idx));
            }
        }
    }

    fn check_duplicate_classes(&mut self) {
        let mut seen: HashMap<(Option<String>, String), usize> = HashMap::new();
        for i in 0..self.classes.len() {
            let c = &self.classes[i];
            if c.outer.is_some() {
                continue;
            }
            let key = (self.files[c.file].package.clone(), c.name.clone());
            if seen.insert(key, i).is_some() {
                let (f, n, name) = (c.file, c.node, c.name.clone());
                self.error(f, n, format!("duplicate class: {name}"));
            }
        }
    }

    fn resolve_supertypes(&mut self, c: usize) {
        let (f, n) = (self.classes[c].file, self.classes[c].node);
        if let Some(sup) = n.child_by_field_name("superclass") {
            if let Some(t) = kids(sup).next() {
                if let Some(Type::Class(r, _)) = self.resolve_type(t, f, Some(c)) {
                    if self.is_interface_ref(r) {
                        self.error(f, t, "no interface expected here");
                    } else if self.is_final_ref(r) {
                        let what = self.show_ref(r);
                        self.error(f, t, format!("cannot inherit from final {what}"));
                    } else {
                        self.classes[c].superclass = r;
                    }
                }
            }
        }
        let list = n.child_by_field_name("interfaces").or_else(|| kids(n).find(|k| k.kind() == "extends_interfaces"));
        if let Some(list) = list {
            let tl = kids(list).find(|k| k.kind() == "type_list").unwrap_or(list);
            for t in kids(tl) {
                if let Some(Type::Class(r, _)) = self.resolve_type(t, f, Some(c)) {
                    if !self.is_interface_ref(r) {
                        self.error(f, t, "interface expected here");
                    } else {
                        self.classes[c].interfaces.push(r);
                    }
                }
            }
        }
    }

    fn check_cycles(&mut self) {
        for c in 0..self.classes.len() {
            let mut cur = self.classes[c].superclass;
            let mut steps = 0;
            while let ClassRef::User(i) = cur {
                if i == c || steps > self.classes.len() {
                    let (f, n, name) = (self.classes[c].file, self.classes[c].node, self.classes[c].display.clone());
                    self.error(f, n, format!("cyclic inheritance involving {name}"));
                    self.classes[c].superclass = ClassRef::Builtin(Builtin::Object);
                    break;
                }
                cur = self.classes[i].superclass;
                steps += 1;
            }
        }
    }

    pub fn is_interface_ref(&self, r: ClassRef) -> bool {
        match r {
            ClassRef::Builtin(b) => b.info().is_interface,
            ClassRef::User(i) => self.classes[i].is_interface,
        }
    }

    pub fn is_final_ref(&self, r: ClassRef) -> bool {
        match r {
            ClassRef::Builtin(b) => b.info().is_final,
            ClassRef::User(i) => self.classes[i].is_final,
        }
    }

    fn parse_annotations(&mut self, f: usize, decl: Node<'a>, c: usize) -> (Vec<Annotation>, bool) {
        let mut out = Vec::new();
        let mut has_override = false;
        let Some(mods) = modifiers_of(decl) else { return (out, false) };
        for a in kids(mods) {
            if !matches!(a.kind(), "annotation" | "marker_annotation") {
                continue;
            }
            let Some(name_node) = a.child_by_field_name("name") else { continue };
            let name = self.text(f, name_node).to_string();
            let Some(fqn) = self.resolve_annotation(f, &name) else {
                self.error_notes(
                    f,
                    name_node,
                    "cannot find symbol",
                    vec![format!("symbol:   class {name}"), format!("location: class {}", self.class_name(c))],
                );
                continue;
            };
            let simple = fqn.rsplit('.').next().unwrap();
            let ann = match simple {
                "Test" => {
                    let mut expected = None;
                    let mut timeout_ms = None;
                    if let Some(args) = a.child_by_field_name("arguments") {
                        for pair in kids(args).filter(|p| p.kind() == "element_value_pair") {
                            let key = pair.child_by_field_name("key").map(|k| self.text(f, k)).unwrap_or("");
                            let Some(value) = pair.child_by_field_name("value") else { continue };
                            match key {
                                "expected" if fqn.starts_with("org.junit.") && !fqn.contains("jupiter") => {
                                    let ty = if value.kind() == "class_literal" { kids(value).next() } else { None };
                                    match ty.and_then(|t| self.resolve_type(t, f, Some(c))) {
                                        Some(Type::Class(r, _)) => expected = Some(r),
                                        _ => self.error(f, value, "incompatible types: expected a class literal"),
                                    }
                                }
                                "timeout" => timeout_ms = self.text(f, value).trim_end_matches(['L', 'l']).parse().ok(),
                                _ => {
                                    self.error(f, pair, format!("cannot find symbol: method {key}()"));
                                }
                            }
                        }
                    }
                    Annotation::Test { expected, timeout_ms }
                }
                "Before" | "BeforeEach" => Annotation::Before,
                "After" | "AfterEach" => Annotation::After,
                "BeforeClass" | "BeforeAll" => Annotation::BeforeClass,
                "AfterClass" | "AfterAll" => Annotation::AfterClass,
                "Override" => {
                    has_override = true;
                    Annotation::Other(fqn.clone())
                }
                _ => Annotation::Other(fqn.clone()),
            };
            out.push(ann);
        }
        (out, has_override)
    }

    fn resolve_annotation(&self, f: usize, name: &str) -> Option<String> {
        if name.contains('.') {
            return KNOWN_ANNOTATIONS.contains(&name).then(|| name.to_string());
        }
        if let Some(fqn) = self.files[f].annotations.get(name) {
            return Some(fqn.clone());
        }
        let lang = format!("java.lang.{name}");
        if KNOWN_ANNOTATIONS.contains(&lang.as_str()) {
            return Some(lang);
        }
        for w in &self.files[f].wildcards {
            let fqn = format!("{w}.{name}");
            if KNOWN_ANNOTATIONS.contains(&fqn.as_str()) {
                return Some(fqn);
            }
        }
        None
    }

    fn collect_members(&mut self, c: usize) {
        let (f, n) = (self.classes[c].file, self.classes[c].node);
        let is_interface = self.classes[c].is_interface;
        let Some(body) = n.child_by_field_name("body") else { return };
        for m in kids(body) {
            let mods = modifiers_of(m).map(|x| self.text(f, x)).unwrap_or("");
            let has = |w: &str| mods.split(|ch: char| !ch.is_alphanumeric()).any(|x| x == w);
            match m.kind() {
                "field_declaration" | "constant_declaration" => {
                    let Some(tn) = m.child_by_field_name("type") else { continue };
                    let Some(base) = self.resolve_type(tn, f, Some(c)) else { continue };
                    let mut cur = m.walk();
                    let decls: Vec<Node<'a>> = m.children_by_field_name("declarator", &mut cur).collect();
                    for d in decls {
                        let Some(nn) = d.child_by_field_name("name") else { continue };
                        let name = self.text(f, nn).to_string();
                        if self.classes[c].fields.iter().any(|x| x.name == name) {
                            let cname = self.class_name(c);
                            self.error(f, nn, format!("variable {name} is already defined in class {cname}"));
                            continue;
                        }
                        let ty = self.with_dims(base.clone(), d, f);
                        self.classes[c].fields.push(FieldInfo {
                            name,
                            ty,
                            is_static: has("static") || is_interface,
                            is_final: has("final") || is_interface,
                            is_private: has("private"),
                            declarator: Some(d),
                            constant: None,
                        });
                    }
                }
                "method_declaration" => {
                    if m.child_by_field_name("type_parameters").is_some() {
                        self.error(f, m, "generic methods are not supported by this toolchain");
                        continue;
                    }
                    let Some(nn) = m.child_by_field_name("name") else { continue };
                    let name = self.text(f, nn).to_string();
                    let ret = match m.child_by_field_name("type") {
                        Some(t) => match self.resolve_type(t, f, Some(c)) {
                            Some(t) => t,
                            None => continue,
                        },
                        None => continue,
                    };
                    let ret = self.with_dims(ret, m, f);
                    let Some((params, varargs)) = self.params(m, f, c) else { continue };
                    let throws = self.throws(m, f, c);
                    let (annotations, has_override) = self.parse_annotations(f, m, c);
                    let has_body = m.child_by_field_name("body").is_some();
                    let is_abstract = has("abstract") || (is_interface && !has_body);
                    if has_body && has("abstract") {
                        self.error(f, nn, "abstract methods cannot have a body");
                    }
                    if !has_body && !is_abstract && !has("native") {
                        self.error(f, nn, "missing method body, or declare abstract");
                    }
                    if is_abstract && !self.classes[c].is_abstract {
                        let cname = self.class_name(c);
                        self.error(f, nn, format!("{cname} is not abstract and does not override abstract method {name}() in {cname}"));
                    }
                    let sig = MethodSig {
                        name: name.clone(),
                        params,
                        varargs,
                        ret,
                        is_static: has("static"),
                        is_abstract,
                        is_private: has("private"),
                        throws,
                        node: m,
                        annotations,
                        has_override,
                    };
                    let key = ir::signature_key(&name, &sig.param_types());
                    if self.classes[c].methods.iter().any(|x| ir::signature_key(&x.name, &x.param_types()) == key) {
                        let cname = self.class_name(c);
                        let shown = self.show_params(&sig.param_types());
                        self.error(f, nn, format!("method {name}({shown}) is already defined in class {cname}"));
                        continue;
                    }
                    self.classes[c].methods.push(sig);
                }
                "constructor_declaration" => {
                    let Some(nn) = m.child_by_field_name("name") else { continue };
                    if self.text(f, nn) != self.classes[c].name {
                        self.error(f, nn, "invalid method declaration; return type required");
                        continue;
                    }
                    let Some((params, varargs)) = self.params(m, f, c) else { continue };
                    let throws = self.throws(m, f, c);
                    self.parse_annotations(f, m, c);
                    let key: Vec<Type> = params.iter().map(|p| p.1.clone()).collect();
                    if self.classes[c].ctors.iter().any(|x| x.params.iter().map(|p| p.1.clone()).collect::<Vec<_>>() == key) {
                        let cname = self.class_name(c);
                        self.error(f, nn, format!("constructor {cname} is already defined in class {cname}"));
                        continue;
                    }
                    self.classes[c].ctors.push(CtorSig { params, varargs, throws, node: Some(m) });
                }
                "class_declaration" | "interface_declaration" | "static_initializer" | "block" | ";" => {}
                "enum_declaration" | "record_declaration" => {}
                "compact_constructor_declaration" => {
                    self.error(f, m, "records are not supported by this toolchain");
                }
                _ => {}
            }
        }
        if self.classes[c].ctors.is_empty() && !is_interface {
            self.classes[c].ctors.push(CtorSig { params: Vec::new(), varargs: false, throws: Vec::new(), node: None });
        }
    }

    pub fn show_params(&self, ps: &[Type]) -> String {
        ps.iter().map(|p| self.show(p)).collect::<Vec<_>>().join(",")
    }

    fn params(&mut self, m: Node<'a>, f: usize, c: usize) -> Option<(Vec<(String, Type, bool)>, bool)> {
        let fp = m.child_by_field_name("parameters")?;
        let mut out = Vec::new();
        let mut varargs = false;
        let mut ok = true;
        for p in kids(fp) {
            match p.kind() {
                "formal_parameter" | "spread_parameter" => {
                    let is_final = modifiers_of(p).map(|x| self.text(f, x).contains("final")).unwrap_or(false);
                    let tn = p.child_by_field_name("type").or_else(|| kids(p).find(|k| k.kind() != "modifiers"));
                    let Some(tn) = tn else { continue };
                    let Some(mut ty) = self.resolve_type(tn, f, Some(c)) else {
                        ok = false;
                        continue;
                    };
                    let name_node = p
                        .child_by_field_name("name")
                        .or_else(|| kids(p).find(|k| k.kind() == "variable_declarator").and_then(|d| d.child_by_field_name("name")));
                    let Some(nn) = name_node else { continue };
                    let owner = if p.kind() == "spread_parameter" { kids(p).find(|k| k.kind() == "variable_declarator").unwrap_or(p) } else { p };
                    ty = self.with_dims(ty, owner, f);
                    if p.kind() == "spread_parameter" {
                        ty = Type::Array(Box::new(ty));
                        varargs = true;
                    }
                    let name = self.text(f, nn).to_string();
                    if out.iter().any(|(n, _, _): &(String, Type, bool)| *n == name) {
                        self.error(f, nn, format!("variable {name} is already defined in method"));
                    }
                    out.push((name, ty, is_final));
                }
                "receiver_parameter" => {}
                _ => {}
            }
        }
        ok.then_some((out, varargs))
    }

    fn throws(&mut self, m: Node<'a>, f: usize, c: usize) -> Vec<ClassRef> {
        let mut out = Vec::new();
        if let Some(t) = kids(m).find(|k| k.kind() == "throws") {
            for tn in kids(t) {
                if let Some(Type::Class(r, _)) = self.resolve_type(tn, f, Some(c)) {
                    if !self.is_throwable_ref(r) {
                        let shown = self.show_ref(r);
                        self.error(f, tn, format!("incompatible types: {shown} cannot be converted to Throwable"));
                    }
                    out.push(r);
                }
            }
        }
        out
    }

    /// Applies C-style `[]` suffixes found on a declarator.
    pub fn with_dims(&self, mut t: Type, owner: Node<'_>, f: usize) -> Type {
        if let Some(d) = owner.child_by_field_name("dimensions") {
            let count = self.text(f, d).matches('[').count();
            for _ in 0..count {
                t = Type::Array(Box::new(t));
            }
        }
        t
    }

    /// Resolves a type node, reporting unknown names.
    pub fn resolve_type(&mut self, n: Node<'_>, f: usize, c: Option<usize>) -> Option<Type> {
        match n.kind() {
            "integral_type" | "floating_point_type" | "boolean_type" => {
                Prim::from_name(self.text(f, n).trim()).map(Type::Prim)
            }
            "void_type" => Some(Type::Void),
            "type_identifier" => {
                let name = self.text(f, n);
                match self.lookup_type_name(name, f, c) {
                    Some(r) => Some(Type::Class(r, Vec::new())),
                    None => {
                        let loc = c.map(|c| format!("location: class {}", self.class_name(c))).unwrap_or_default();
                        self.error_notes(f, n, "cannot find symbol", vec![format!("symbol:   class {name}"), loc]);
                        None
                    }
                }
            }
            "scoped_type_identifier" => {
                let full = self.text(f, n).split_whitespace().collect::<String>();
                if let Some(r) = self.class_by_fqn(&full).filter(|r| *r != ClassRef::User(usize::MAX)) {
                    return Some(Type::Class(r, Vec::new()));
                }
                let mut parts = full.split('.');
                let first = parts.next().unwrap_or("");
                let mut cur = self.lookup_type_name(first, f, c);
                for p in parts {
                    cur = match cur {
                        Some(ClassRef::User(i)) => self.classes[i].nested.iter().find(|(n, _)| n == p).map(|(_, j)| ClassRef::User(*j)),
                        _ => None,
                    };
                }
                match cur {
                    Some(r) => Some(Type::Class(r, Vec::new())),
                    None => {
                        self.error_notes(f, n, "cannot find symbol", vec![format!("symbol:   class {full}")]);
                        None
                    }
                }
            }
            "generic_type" => {
                let base = kids(n).next()?;
                let Type::Class(r, _) = self.resolve_type(base, f, c)? else { return None };
                let mut args = Vec::new();
                if let Some(ta) = kids(n).find(|k| k.kind() == "type_arguments") {
                    for a in kids(ta) {
                        let t = if a.kind() == "wildcard" {
                            match kids(a).find(|k| !matches!(k.kind(), "annotation" | "marker_annotation")) {
                                Some(b) => self.resolve_type(b, f, c)?,
                                None => Type::object(),
                            }
                        } else {
                            self.resolve_type(a, f, c)?
                        };
                        if let Type::Prim(p) = t {
                            self.error_notes(f, a, "unexpected type", vec!["required: reference".into(), format!("found:    {}", p.name())]);
                            return None;
                        }
                        args.push(t);
                    }
                }
                let expected = match r {
                    ClassRef::Builtin(b) => b.type_params(),
                    ClassRef::User(_) => 0,
                };
                if !args.is_empty() && args.len() != expected {
                    let shown = self.show_ref(r);
                    self.error(f, n, format!("wrong number of type arguments; required {expected}").replace("type arguments", &format!("type arguments for {shown}")));
                    return None;
                }
                Some(Type::Class(r, args))
            }
            "array_type" => {
                let elem = self.resolve_type(n.child_by_field_name("element")?, f, c)?;
                let dims = n.child_by_field_name("dimensions").map(|d| self.text(f, d).matches('[').count()).unwrap_or(1);
                let mut t = elem;
                for _ in 0..dims {
                    t = Type::Array(Box::new(t));
                }
                Some(t)
            }
            _ => {
                self.error(f, n, format!("unsupported type syntax: {}", self.text(f, n)));
                None
            }
        }
    }

    pub fn lookup_type_name(&self, name: &str, f: usize, c: Option<usize>) -> Option<ClassRef> {
        let mut cur = c;
        while let Some(ci) = cur {
            let cls = &self.classes[ci];
            if cls.name == name {
                return Some(ClassRef::User(ci));
            }
            if let Some((_, j)) = cls.nested.iter().find(|(n, _)| n == name) {
                return Some(ClassRef::User(*j));
            }
            let mut sup = cls.superclass;
            while let ClassRef::User(s) = sup {
                if let Some((_, j)) = self.classes[s].nested.iter().find(|(n, _)| n == name) {
                    return Some(ClassRef::User(*j));
                }
                sup = self.classes[s].superclass;
            }
            cur = cls.outer;
        }
        let pkg = &self.files[f].package;
        for (i, cls) in self.classes.iter().enumerate() {
            if cls.outer.is_none() && cls.name == name && &self.files[cls.file].package == pkg {
                return Some(ClassRef::User(i));
            }
        }
        if let Some(r) = self.files[f].single.get(name) {
            if *r == ClassRef::User(usize::MAX) {
                return self.classes.iter().position(|k| k.outer.is_none() && k.name == name).map(ClassRef::User);
            }
            return Some(*r);
        }
        if let Some(b) = Builtin::by_simple_name(name) {
            if b.package().is_none() {
                return Some(ClassRef::Builtin(b));
            }
        }
        for w in &self.files[f].wildcards {
            if let Some(b) = Builtin::by_fqn(&format!("{w}.{name}")) {
                return Some(ClassRef::Builtin(b));
            }
            for (i, cls) in self.classes.iter().enumerate() {
                if cls.outer.is_none() && cls.name == name && self.files[cls.file].package.as_deref() == Some(w.as_str()) {
                    return Some(ClassRef::User(i));
                }
            }
        }
        None
    }

    fn compute_constants(&mut self) {
        // Constant initializers can refer to other constants; iterate until
        // nothing changes.
        loop {
            let mut changed = false;
            for c in 0..self.classes.len() {
                for i in 0..self.classes[c].fields.len() {
                    let fi = &self.classes[c].fields[i];
                    if !fi.is_final || fi.constant.is_some() {
                        continue;
                    }
                    let is_const_type = matches!(fi.ty, Type::Prim(_)) || fi.ty.is_string();
                    if !is_const_type {
                        continue;
                    }
                    let Some(value) = fi.declarator.and_then(|d| d.child_by_field_name("value")) else { continue };
                    let ty = fi.ty.clone();
                    let f = self.classes[c].file;
                    if let Some(k) = expr::const_eval(self, value, f, c, 0) {
                        if let Some(k) = expr::const_assign(&k, &ty) {
                            self.classes[c].fields[i].constant = Some(k);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn check_class_rules(&mut self, c: usize) {
        let (f, n) = (self.classes[c].file, self.classes[c].node);
        let name_node = n.child_by_field_name("name").unwrap_or(n);
        // Overrides.
        for m in 0..self.classes[c].methods.len() {
            let sig = &self.classes[c].methods[m];
            let key = ir::signature_key(&sig.name, &sig.param_types());
            let (has_override, node, is_static, ret) = (sig.has_override, sig.node, sig.is_static, sig.ret.clone());
            let overridden = self.find_inherited(c, &key);
            if has_override && overridden.is_none() {
                let nn = node.child_by_field_name("name").unwrap_or(node);
                self.error(f, nn, "method does not override or implement a method from a supertype");
            }
            if let Some((oret, ostatic)) = overridden {
                let nn = node.child_by_field_name("name").unwrap_or(node);
                if ostatic != is_static && !is_static {
                    self.error(f, nn, "overriding method is static or overridden method is static");
                } else if !is_static && !self.return_compatible(&ret, &oret) {
                    let shown = self.show(&ret);
                    self.error(f, nn, format!("return type {shown} is not compatible with {}", self.show(&oret)));
                }
            }
        }
        // Unimplemented abstract methods.
        if !self.classes[c].is_abstract {
            if let Some((mname, owner)) = self.unimplemented_abstract(c) {
                let cname = self.class_name(c);
                self.error(f, name_node, format!("{cname} is not abstract and does not override abstract method {mname} in {owner}"));
            }
        }
    }

    fn return_compatible(&self, sub: &Type, sup: &Type) -> bool {
        if sub == sup {
            return true;
        }
        sub.is_reference() && sup.is_reference() && self.is_subtype(sub, sup)
    }

    /// Return type and staticness of a method with signature `key` declared
    /// in a proper supertype of `c`.
    fn find_inherited(&self, c: usize, key: &str) -> Option<(Type, bool)> {
        let mut supers: Vec<ClassRef> = vec![self.classes[c].superclass];
        supers.extend(self.classes[c].interfaces.iter().copied());
        while let Some(s) = supers.pop() {
            match s {
                ClassRef::User(i) => {
                    if let Some(m) = self.classes[i].methods.iter().find(|m| ir::signature_key(&m.name, &m.param_types()) == key) {
                        return Some((m.ret.clone(), m.is_static));
                    }
                    supers.push(self.classes[i].superclass);
                    supers.extend(self.classes[i].interfaces.iter().copied());
                }
                ClassRef::Builtin(b) => {
                    for e in builtins::TABLE.iter().filter(|e| matches!(e.kind, Kind::Instance) && b.is_subtype_of(e.owner)) {
                        let params: Vec<Type> = e.params.iter().map(|p| builtins::resolve(*p, None, &[])).collect();
                        if ir::signature_key(e.name, &params) == key {
                            return Some((builtins::resolve(e.ret, None, &[]), false));
                        }
                    }
                    if b == Builtin::Comparable && key.starts_with("compareTo(") {
                        return Some((Type::INT, false));
                    }
                }
            }
        }
        None
    }

    fn unimplemented_abstract(&self, c: usize) -> Option<(String, String)> {
        let mut abstracts: Vec<(String, String, String)> = Vec::new();
        let mut chain = Vec::new();
        let mut cur = ClassRef::User(c);
        while let ClassRef::User(i) = cur {
            chain.push(i);
            cur = self.classes[i].superclass;
        }
        let mut ifaces: Vec<usize> = Vec::new();
        for &i in &chain {
            let mut stack: Vec<ClassRef> = self.classes[i].interfaces.clone();
            while let Some(r) = stack.pop() {
                if let ClassRef::User(j) = r {
                    if !ifaces.contains(&j) {
                        ifaces.push(j);
                        stack.extend(self.classes[j].interfaces.iter().copied());
                    }
                }
            }
        }
        for &i in chain.iter().chain(ifaces.iter()) {
            for m in &self.classes[i].methods {
                if m.is_abstract {
                    abstracts.push((ir::signature_key(&m.name, &m.param_types()), format!("{}({})", m.name, self.show_params(&m.param_types())), self.class_name(i)));
                }
            }
        }
        for (key, shown, owner) in abstracts {
            let implemented = chain.iter().chain(ifaces.iter()).any(|&i| {
                self.classes[i].methods.iter().any(|m| !m.is_abstract && ir::signature_key(&m.name, &m.param_types()) == key)
            });
            if !implemented {
                return Some((shown, owner));
            }
        }
        None
    }

    pub fn is_throwable_ref(&self, r: ClassRef) -> bool {
        self.builtin_ancestor(r).is_throwable()
    }

    pub fn is_unchecked_ref(&self, r: ClassRef) -> bool {
        self.builtin_ancestor(r).is_unchecked()
    }

    /// Nearest library class in the superclass chain.
    pub fn builtin_ancestor(&self, r: ClassRef) -> Builtin {
        let mut cur = r;
        loop {
            match cur {
                ClassRef::Builtin(b) => return b,
                ClassRef::User(i) => {
                    if self.classes[i].is_interface {
                        return Builtin::Object;
                    }
                    cur = self.classes[i].superclass;
                }
            }
        }
    }

    /// Class-level subtyping including interfaces.
    pub fn class_subtype(&self, a: ClassRef, b: ClassRef) -> bool {
        if a == b || b == ClassRef::Builtin(Builtin::Object) {
            return true;
        }
        match a {
            ClassRef::Builtin(x) => match b {
                ClassRef::Builtin(y) => x.is_subtype_of(y),
                ClassRef::User(_) => false,
            },
            ClassRef::User(i) => {
                let cls = &self.classes[i];
                if self.class_subtype(cls.superclass, b) {
                    return true;
                }
                cls.interfaces.iter().any(|x| self.class_subtype(*x, b))
            }
        }
    }

    pub fn is_subtype(&self, a: &Type, b: &Type) -> bool {
        match (a, b) {
            (Type::Null, t) => t.is_reference(),
            (Type::Class(x, xa), Type::Class(y, ya)) => {
                if !self.class_subtype(*x, *y) {
                    return false;
                }
                if xa.is_empty() || ya.is_empty() || x != y && !same_generic_family(*x, *y) {
                    return true;
                }
                xa.iter().zip(ya).all(|(p, q)| p == q || *q == Type::object() || *p == Type::object() && q.is_reference())
            }
            (Type::Array(_), Type::Class(ClassRef::Builtin(Builtin::Object), _)) => true,
            (Type::Array(x), Type::Array(y)) => match (&**x, &**y) {
                (Type::Prim(p), Type::Prim(q)) => p == q,
                (x, y) if x.is_reference() && y.is_reference() => self.is_subtype(x, y),
                _ => false,
            },
            (x, y) => x == y,
        }
    }

    /// Conversion allowed in method invocation contexts.
    /// Phase 1 is strict (no boxing); phase 2 adds boxing and unboxing.
    pub fn method_convertible(&self, from: &Type, to: &Type, phase: u8) -> bool {
        match (from, to) {
            (Type::Prim(a), Type::Prim(b)) => a.widens_to(*b),
            (Type::Prim(a), t) if phase >= 2 && t.is_reference() => self.is_subtype(&Type::builtin(a.box_class()), t),
            (t, Type::Prim(b)) if phase >= 2 => t.unboxed().filter(|_| t.prim().is_none()).map(|p| p.widens_to(*b)).unwrap_or(false),
            (Type::Void, _) | (_, Type::Void) => false,
            (a, b) => self.is_subtype(a, b),
        }
    }

    /// Candidate methods called `name` on a receiver of static type `recv`
    /// (or, when `recv` is a class, its static members).
    pub fn instance_candidates(&self, recv: &Type, name: &str, args: &[Type]) -> Vec<Cand> {
        match recv {
            Type::Class(ClassRef::User(i), _) => self.user_candidates(*i, name, args, false),
            Type::Class(ClassRef::Builtin(b), _) => builtin_cands(builtins::lookup(*b, name, false), Some(recv), args),
            Type::Array(_) => builtin_cands(builtins::lookup(Builtin::Object, name, false), Some(recv), args),
            _ => Vec::new(),
        }
    }

    pub fn static_candidates(&self, owner: ClassRef, name: &str, args: &[Type]) -> Vec<Cand> {
        match owner {
            ClassRef::User(i) => self.user_candidates(i, name, args, true),
            ClassRef::Builtin(b) => builtin_cands(builtins::lookup(b, name, true), None, args),
        }
    }

    /// Methods of user class `c` and its supertypes; `include_static` is
    /// set for unqualified and class-qualified calls.
    pub fn user_candidates(&self, c: usize, name: &str, args: &[Type], statics_only: bool) -> Vec<Cand> {
        let mut out: Vec<Cand> = Vec::new();
        let mut keys: Vec<String> = Vec::new();
        let mut queue = vec![ClassRef::User(c)];
        let mut seen = Vec::new();
        let mut builtin_base = None;
        while !queue.is_empty() {
            let r = queue.remove(0);
            if seen.contains(&r) {
                continue;
            }
            seen.push(r);
            match r {
                ClassRef::User(i) => {
                    for (mi, m) in self.classes[i].methods.iter().enumerate() {
                        if m.name != name || (statics_only && !m.is_static) {
                            continue;
                        }
                        if m.is_private && i != c && !self.same_outermost(i, c) {
                            continue;
                        }
                        let key = ir::signature_key(&m.name, &m.param_types());
                        if keys.contains(&key) {
                            continue;
                        }
                        keys.push(key);
                        out.push(Cand {
                            params: m.param_types(),
                            any: vec![false; m.params.len()],
                            varargs: m.varargs,
                            callee: Callee::User { class: i, index: mi },
                            is_static: m.is_static,
                            ret: m.ret.clone(),
                        });
                    }
                    queue.push(self.classes[i].superclass);
                    queue.extend(self.classes[i].interfaces.iter().copied());
                }
                ClassRef::Builtin(b) => {
                    if builtin_base.is_none() && !b.info().is_interface {
                        builtin_base = Some(b);
                    }
                }
            }
        }
        if !statics_only {
            let base = builtin_base.unwrap_or(Builtin::Object);
            for cand in builtin_cands(builtins::lookup(base, name, false), None, args) {
                let key = ir::signature_key(name, &cand.params);
                if !keys.contains(&key) {
                    out.push(cand);
                }
            }
        }
        out
    }

    pub fn same_outermost(&self, a: usize, b: usize) -> bool {
        let top = |mut i: usize| {
            while let Some(o) = self.classes[i].outer {
                i = o;
            }
            i
        };
        top(a) == top(b)
    }

    fn finish(self) -> Program {
        let mut classes = Vec::new();
        let mut slots_of: Vec<(Vec<Option<usize>>, usize)> = Vec::new();
        for (i, c) in self.classes.iter().enumerate() {
            let base = match c.superclass {
                ClassRef::User(s) if s < i => slots_of[s].1,
                ClassRef::User(s) => instance_size(&self.classes, s),
                ClassRef::Builtin(_) => 0,
            };
            let mut next = base;
            let slots = c
                .fields
                .iter()
                .map(|fi| {
                    if fi.is_static {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect();
            slots_of.push((slots, next));
        }
        let mut lowered_methods = self.lowered_methods;
        let mut lowered_ctors = self.lowered_ctors;
        let mut static_init = self.static_init;
        let mut instance_init = self.instance_init;
        for (i, c) in self.classes.iter().enumerate() {
            let methods = (0..c.methods.len()).map(|m| lowered_methods.remove(&(i, m)).expect("lowered method")).collect();
            let ctors = (0..c.ctors.len()).map(|k| lowered_ctors.remove(&(i, k)).expect("lowered ctor")).collect();
            let (slots, instance_size) = slots_of[i].clone();
            classes.push(ir::Class {
                name: c.display.clone(),
                binary_name: c.binary.clone(),
                file: c.file,
                superclass: c.superclass,
                interfaces: c.interfaces.clone(),
                is_interface: c.is_interface,
                is_abstract: c.is_abstract,
                fields: c
                    .fields
                    .iter()
                    .map(|fi| ir::Field {
                        name: fi.name.clone(),
                        ty: fi.ty.clone(),
                        is_static: fi.is_static,
                        is_final: fi.is_final,
                        constant: fi.constant.clone(),
                    })
                    .collect(),
                methods,
                ctors,
                static_init: static_init.remove(&i).unwrap_or_default(),
                instance_init: instance_init.remove(&i).unwrap_or_default(),
                line: c.line,
                slots,
                instance_size,
            });
        }
        let files = self
            .files
            .iter()
            .map(|f| SourceFile {
                path: f.path.clone(),
                name: std::path::Path::new(&f.path).file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            })
            .collect();
        Program { files, classes }
    }
}

fn instance_size(classes: &[ClassInfo<'_>], c: usize) -> usize {
    let own = classes[c].fields.iter().filter(|f| !f.is_static).count();
    match classes[c].superclass {
        ClassRef::User(s) => own + instance_size(classes, s),
        ClassRef::Builtin(_) => own,
    }
}

fn same_generic_family(a: ClassRef, b: ClassRef) -> bool {
    use Builtin::*;
    let fam = |r: ClassRef| match r {
        ClassRef::Builtin(List | ArrayList | Collection | Iterable | Set | HashSet) => 1,
        ClassRef::Builtin(Map | HashMap) => 2,
        _ => 0,
    };
    fam(a) != 0 && fam(a) == fam(b)
}

pub(crate) fn builtin_cands(entries: Vec<&'static Entry>, recv: Option<&Type>, args: &[Type]) -> Vec<Cand> {
    entries
        .into_iter()
        .map(|e| {
            let params: Vec<Type> = e
                .params
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    if *p == P::Arg0 {
                        args.first().cloned().unwrap_or_else(Type::object)
                    } else if e.varargs && i + 1 == e.params.len() {
                        builtins::resolve(*p, recv, args)
                    } else {
                        builtins::resolve(*p, recv, &args[..0])
                    }
                })
                .collect();
            let vararg_args: Vec<Type> = if e.varargs { args.iter().skip(e.params.len() - 1).cloned().collect() } else { Vec::new() };
            let ret = match e.ret {
                P::ListOfArgs | P::SetOfArgs => builtins::resolve(e.ret, recv, &vararg_args),
                other => builtins::resolve(other, recv, args),
            };
            Cand {
                any: e.params.iter().map(|p| matches!(p, P::Any | P::AnyArr)).collect(),
                params,
                varargs: e.varargs,
                callee: Callee::Builtin(e),
                is_static: matches!(e.kind, Kind::Static),
                ret,
            }
        })
        .collect()
}
