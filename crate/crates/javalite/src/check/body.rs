//! Lowering of method bodies, constructors and initializers, statement by
//! statement, with reachability and definite assignment.

use metaprobe_syntax::Node;

use super::flow::{Da, Target, TargetKind};
use super::{kids, Callee, Checker};
use crate::builtins;
use crate::ir::{self, Const, CtorCall, Expr, ExprKind, LValue, Stmt, SwitchGroup, SwitchKind};
use crate::types::{Builtin, ClassRef, Prim, Type};

pub(crate) struct Local {
    pub name: String,
    pub ty: Type,
    pub is_final: bool,
    /// Declared with an initializer (or a parameter).
    pub initialized: bool,
    pub constant: Option<Const>,
    pub catch_param: bool,
}

struct Handler {
    types: Vec<ClassRef>,
    thrown: Vec<ClassRef>,
}

pub(crate) struct Lowerer<'c, 'a> {
    pub ck: &'c mut Checker<'a>,
    pub class: usize,
    pub file: usize,
    pub is_static: bool,
    pub locals: Vec<Local>,
    scopes: Vec<Vec<usize>>,
    /// Declared return type; `None` inside initializers.
    pub ret: Option<Type>,
    /// Method description for "already defined" messages.
    pub context: String,
    targets: Vec<Target>,
    pub da: Da,
    pub reachable: bool,
    handlers: Vec<Handler>,
    throws: Vec<ClassRef>,
    pub in_ctor: bool,
    pending_label: Option<String>,
}

pub(crate) fn lower_class(ck: &mut Checker<'_>, c: usize) {
    let file = ck.classes[c].file;
    for m in 0..ck.classes[c].methods.len() {
        let sig = &ck.classes[c].methods[m];
        let (node, is_static, ret, throws) = (sig.node, sig.is_static, sig.ret.clone(), sig.throws.clone());
        let params = sig.params.clone();
        let context = format!("method {}({})", sig.name, ck.show_params(&sig.param_types()));
        let method = ir::Method {
            name: sig.name.clone(),
            params: sig.param_types(),
            ret: ret.clone(),
            is_static,
            is_abstract: sig.is_abstract,
            body: None,
            line: node.start_position().row as u32 + 1,
            annotations: sig.annotations.clone(),
        };
        let body = match node.child_by_field_name("body") {
            Some(b) => {
                let mut lw = Lowerer::new(ck, c, is_static, Some(ret.clone()), context, throws);
                for (name, ty, fin) in &params {
                    lw.add_param(name, ty.clone(), *fin);
                }
                let stmts = lw.block_body(b);
                if lw.reachable && ret != Type::Void {
                    let close = b.child(b.child_count().saturating_sub(1)).unwrap_or(b);
                    lw.err(close, "missing return statement");
                }
                Some(ir::Body { stmts, locals: lw.locals.len() })
            }
            None => None,
        };
        ck.lowered_methods.insert((c, m), ir::Method { body, ..method });
    }
    for k in 0..ck.classes[c].ctors.len() {
        let ctor = lower_ctor(ck, c, k);
        ck.lowered_ctors.insert((c, k), ctor);
    }
    lower_initializers(ck, c, file);
}

fn lower_ctor(ck: &mut Checker<'_>, c: usize, k: usize) -> ir::Ctor {
    let sig = &ck.classes[c].ctors[k];
    let (node, params, throws) = (sig.node, sig.params.clone(), sig.throws.clone());
    let types: Vec<Type> = params.iter().map(|p| p.1.clone()).collect();
    let context = format!("constructor {}({})", ck.classes[c].name, ck.show_params(&types));
    let line = node.map(|n| n.start_position().row as u32 + 1).unwrap_or(ck.classes[c].line);
    let class_node = ck.classes[c].node;
    let mut lw = Lowerer::new(ck, c, false, Some(Type::Void), context, throws);
    lw.in_ctor = true;
    for (name, ty, fin) in &params {
        lw.add_param(name, ty.clone(), *fin);
    }
    let mut call = None;
    let mut stmts = Vec::new();
    if let Some(body) = node.and_then(|n| n.child_by_field_name("body")) {
        lw.push_scope();
        let mut rest: Vec<Node<'_>> = kids(body).collect();
        if let Some(first) = rest.first().copied() {
            if first.kind() == "explicit_constructor_invocation" {
                call = lw.explicit_ctor_call(first);
                rest.remove(0);
            }
        }
        stmts = lw.stmt_list(rest.into_iter());
        lw.pop_scope();
    }
    let call = match call {
        Some(c) => c,
        None => lw.implicit_super(node.unwrap_or(class_node)),
    };
    ir::Ctor { params: types, call, body: ir::Body { stmts, locals: lw.locals.len() }, line }
}

fn lower_initializers(ck: &mut Checker<'_>, c: usize, file: usize) {
    let Some(body) = ck.classes[c].node.child_by_field_name("body") else { return };
    let mut statics = Lowerer::new(ck, c, true, None, "static initializer".into(), Vec::new());
    let mut static_stmts = Vec::new();
    for m in kids(body) {
        match m.kind() {
            "static_initializer" => {
                if let Some(b) = kids(m).find(|k| k.kind() == "block") {
                    statics.reachable = true;
                    let s = statics.block(b);
                    static_stmts.push(s);
                }
            }
            "field_declaration" | "constant_declaration" => {
                let is_static = statics.ck.classes[c].is_interface || statics.ck.text(file, m).split_whitespace().take_while(|w| *w != "=").any(|w| w == "static");
                if is_static {
                    static_stmts.extend(statics.field_inits(m, true));
                }
            }
            _ => {}
        }
    }
    let sl = statics.locals.len();
    ck.static_init.insert(c, ir::Body { stmts: static_stmts, locals: sl });

    let mut inst = Lowerer::new(ck, c, false, None, "instance initializer".into(), Vec::new());
    let mut inst_stmts = Vec::new();
    for m in kids(body) {
        match m.kind() {
            "block" => {
                inst.reachable = true;
                let s = inst.block(m);
                inst_stmts.push(s);
            }
            "field_declaration" => {
                let fields_static = inst.ck.classes[c].is_interface || inst.ck.text(file, m).split_whitespace().take_while(|w| *w != "=").any(|w| w == "static");
                if !fields_static {
                    inst_stmts.extend(inst.field_inits(m, false));
                }
            }
            _ => {}
        }
    }
    let il = inst.locals.len();
    ck.instance_init.insert(c, ir::Body { stmts: inst_stmts, locals: il });
}

impl<'c, 'a> Lowerer<'c, 'a> {
    fn new(ck: &'c mut Checker<'a>, class: usize, is_static: bool, ret: Option<Type>, context: String, throws: Vec<ClassRef>) -> Self {
        let file = ck.classes[class].file;
        Lowerer {
            ck,
            class,
            file,
            is_static,
            locals: Vec::new(),
            scopes: vec![Vec::new()],
            ret,
            context,
            targets: Vec::new(),
            da: Da::empty(),
            reachable: true,
            handlers: Vec::new(),
            throws,
            in_ctor: false,
            pending_label: None,
        }
    }

    pub fn text(&self, n: Node<'_>) -> &'a str {
        self.ck.text(self.file, n)
    }

    pub fn line(n: Node<'_>) -> u32 {
        n.start_position().row as u32 + 1
    }

    pub fn err(&mut self, n: Node<'_>, msg: impl Into<String>) {
        self.ck.error(self.file, n, msg);
    }

    pub fn err_notes(&mut self, n: Node<'_>, msg: impl Into<String>, notes: Vec<String>) {
        self.ck.error_notes(self.file, n, msg, notes);
    }

    pub fn location(&self) -> String {
        format!("location: class {}", self.ck.class_name(self.class))
    }

    fn push_scope(&mut self) {
        self.scopes.push(Vec::new());
    }

    fn pop_scope(&mut self) {
        self.scopes.pop();
    }

    pub fn find_local(&self, name: &str) -> Option<usize> {
        self.scopes.iter().rev().flat_map(|s| s.iter().rev()).copied().find(|&i| self.locals[i].name == name)
    }

    fn add_param(&mut self, name: &str, ty: Type, is_final: bool) {
        let slot = self.new_local(name, ty, is_final, true);
        self.da.set(slot);
    }

    fn new_local(&mut self, name: &str, ty: Type, is_final: bool, initialized: bool) -> usize {
        let slot = self.locals.len();
        self.locals.push(Local { name: name.to_string(), ty, is_final, initialized, constant: None, catch_param: false });
        self.scopes.last_mut().unwrap().push(slot);
        self.da.unset(slot);
        slot
    }

    fn declare(&mut self, name_node: Node<'_>, ty: Type, is_final: bool, initialized: bool) -> usize {
        let name = self.text(name_node).to_string();
        if self.find_local(&name).is_some() {
            let ctx = self.context.clone();
            self.err(name_node, format!("variable {name} is already defined in {ctx}"));
        }
        self.new_local(&name, ty, is_final, initialized)
    }

    fn field_inits(&mut self, m: Node<'a>, is_static: bool) -> Vec<Stmt> {
        let mut out = Vec::new();
        let mut cur = m.walk();
        let decls: Vec<Node<'a>> = m.children_by_field_name("declarator", &mut cur).collect();
        for d in decls {
            let Some(value) = d.child_by_field_name("value") else { continue };
            let Some(nn) = d.child_by_field_name("name") else { continue };
            let name = self.text(nn);
            let Some(fi) = self.ck.classes[self.class].fields.iter().position(|f| f.name == name) else { continue };
            if self.ck.classes[self.class].fields[fi].constant.is_some() {
                continue;
            }
            let ty = self.ck.classes[self.class].fields[fi].ty.clone();
            self.reachable = true;
            let Some(v) = self.init_value(value, &ty) else { continue };
            let line = Self::line(d);
            let target = if is_static {
                LValue::StaticField { class: self.class, field: fi }
            } else {
                LValue::Field { obj: Box::new(self.this_expr(line)), class: self.class, field: fi }
            };
            out.push(Stmt::Expr(Expr { kind: ExprKind::Assign { target, value: Box::new(v) }, ty, line }));
        }
        out
    }

    pub fn this_expr(&self, line: u32) -> Expr {
        Expr { kind: ExprKind::This, ty: Type::Class(ClassRef::User(self.class), Vec::new()), line }
    }

    /// Initializer of a variable of type `ty`, accepting array initializers.
    pub fn init_value(&mut self, value: Node<'a>, ty: &Type) -> Option<Expr> {
        if value.kind() == "array_initializer" {
            return self.array_init(value, ty);
        }
        let e = self.expr(value)?;
        self.assign_conv(e, ty, value)
    }

    pub fn array_init(&mut self, n: Node<'a>, ty: &Type) -> Option<Expr> {
        let Some(elem) = ty.element().cloned() else {
            let shown = self.ck.show(ty);
            self.err(n, format!("illegal initializer for {shown}"));
            return None;
        };
        let mut elems = Vec::new();
        for k in kids(n) {
            elems.push(self.init_value(k, &elem)?);
        }
        Some(Expr { kind: ExprKind::ArrayLit { elem, elems }, ty: ty.clone(), line: Self::line(n) })
    }

    // ---- checked exceptions ----

    pub fn throw_checked(&mut self, r: ClassRef, n: Node<'_>) {
        if self.ck.is_unchecked_ref(r) {
            return;
        }
        for h in self.handlers.iter_mut().rev() {
            h.thrown.push(r);
            if h.types.iter().any(|t| self.ck.class_subtype(r, *t)) {
                return;
            }
        }
        if self.throws.iter().any(|t| self.ck.class_subtype(r, *t)) {
            return;
        }
        let shown = self.ck.show_ref(r);
        self.err(n, format!("unreported exception {shown}; must be caught or declared to be thrown"));
    }

    pub fn callee_throws(&mut self, callee: &Callee, n: Node<'_>) {
        if let Callee::User { class, index } = callee {
            let throws = self.ck.classes[*class].methods[*index].throws.clone();
            for t in throws {
                self.throw_checked(t, n);
            }
        }
    }

    pub fn ctor_throws(&mut self, class: usize, ctor: usize, n: Node<'_>) {
        let throws = self.ck.classes[class].ctors[ctor].throws.clone();
        for t in throws {
            self.throw_checked(t, n);
        }
    }

    // ---- constructors ----

    fn explicit_ctor_call(&mut self, n: Node<'a>) -> Option<CtorCall> {
        let which = n.child_by_field_name("constructor").map(|c| c.kind()).unwrap_or("super");
        if n.child_by_field_name("object").is_some() {
            self.err(n, "qualified superclass constructor calls are not supported by this toolchain");
            return None;
        }
        let args = self.args(n.child_by_field_name("arguments")?)?;
        let saved = self.is_static;
        self.is_static = true;
        let result = match which {
            "this" => {
                let (ctor, args) = self.pick_ctor(self.class, args, n)?;
                self.ctor_throws(self.class, ctor, n);
                Some(CtorCall::This { ctor, args })
            }
            _ => self.super_call(args, n),
        };
        self.is_static = saved;
        result
    }

    fn implicit_super(&mut self, n: Node<'a>) -> CtorCall {
        self.super_call(Vec::new(), n).unwrap_or(CtorCall::SuperBuiltin { method: None, args: Vec::new() })
    }

    fn super_call(&mut self, args: Vec<Expr>, n: Node<'a>) -> Option<CtorCall> {
        match self.ck.classes[self.class].superclass {
            ClassRef::User(s) => {
                let (ctor, args) = self.pick_ctor(s, args, n)?;
                self.ctor_throws(s, ctor, n);
                Some(CtorCall::Super { class: s, ctor, args })
            }
            ClassRef::Builtin(b) => {
                if args.is_empty() {
                    return Some(CtorCall::SuperBuiltin { method: None, args });
                }
                let (e, args) = self.pick_builtin_ctor(b, args, n)?;
                Some(CtorCall::SuperBuiltin { method: Some(e.method), args })
            }
        }
    }

    // ---- statements ----

    /// Statements of a method body block, in the method's top scope.
    fn block_body(&mut self, b: Node<'a>) -> Vec<Stmt> {
        self.push_scope();
        let out = self.stmt_list(kids(b));
        self.pop_scope();
        out
    }

    fn stmt_list(&mut self, items: impl Iterator<Item = Node<'a>>) -> Vec<Stmt> {
        let mut out = Vec::new();
        let mut reported = false;
        for s in items {
            if !self.reachable {
                if !reported {
                    self.err(s, "unreachable statement");
                    reported = true;
                }
                self.reachable = true;
            }
            self.stmt(s, &mut out);
        }
        out
    }

    pub fn block(&mut self, b: Node<'a>) -> Stmt {
        self.push_scope();
        let out = self.stmt_list(kids(b));
        self.pop_scope();
        Stmt::Block(out)
    }

    /// A statement in a position that takes exactly one (loop and `if`
    /// bodies).
    fn sub_stmt(&mut self, n: Node<'a>) -> Stmt {
        self.push_scope();
        let mut out = Vec::new();
        self.stmt(n, &mut out);
        self.pop_scope();
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Stmt::Block(out)
        }
    }

    fn unreachable_now(&mut self) {
        self.reachable = false;
        self.da = Da::all();
    }

    fn stmt(&mut self, n: Node<'a>, out: &mut Vec<Stmt>) {
        let label = self.pending_label.take();
        match n.kind() {
            "block" => out.push(self.block(n)),
            "local_variable_declaration" => self.local_decl(n, out),
            "expression_statement" => {
                if let Some(e) = kids(n).next() {
                    if let Some(s) = self.expr_stmt(e) {
                        out.push(s);
                    }
                }
            }
            "if_statement" => out.push(self.if_stmt(n)),
            "while_statement" => out.push(self.while_stmt(n, label)),
            "do_statement" => out.push(self.do_stmt(n, label)),
            "for_statement" => out.push(self.for_stmt(n, label)),
            "enhanced_for_statement" => out.push(self.foreach_stmt(n, label)),
            "labeled_statement" => out.push(self.labeled(n)),
            "switch_expression" => {
                if let Some(s) = self.switch_stmt(n, label) {
                    out.push(s);
                }
            }
            "break_statement" => out.push(self.break_stmt(n)),
            "continue_statement" => out.push(self.continue_stmt(n)),
            "return_statement" => out.push(self.return_stmt(n)),
            "throw_statement" => {
                if let Some(s) = self.throw_stmt(n) {
                    out.push(s);
                }
            }
            "try_statement" => out.push(self.try_stmt(n)),
            "try_with_resources_statement" => self.err(n, "try-with-resources is not supported by this toolchain"),
            "assert_statement" => {
                let before = self.da.clone();
                let mut it = kids(n);
                if let Some(c) = it.next() {
                    self.condition(c);
                }
                if let Some(m) = it.next() {
                    self.expr(m);
                }
                self.da = before;
            }
            "synchronized_statement" => {
                if let Some(lock) = kids(n).next() {
                    self.expr(lock);
                }
                if let Some(b) = n.child_by_field_name("body") {
                    out.push(self.block(b));
                }
            }
            "explicit_constructor_invocation" => {
                let what = n.child_by_field_name("constructor").map(|c| self.text(c)).unwrap_or("super");
                self.err(n, format!("call to {what} must be first statement in constructor"));
            }
            "class_declaration" | "interface_declaration" | "local_class_declaration" | "enum_declaration" | "record_declaration" => {
                self.err(n, "local classes are not supported by this toolchain")
            }
            "yield_statement" => self.err(n, "switch expressions are not supported by this toolchain"),
            ";" | "empty_statement" => {}
            other => self.err(n, format!("unsupported statement: {other}")),
        }
    }

    fn local_decl(&mut self, n: Node<'a>, out: &mut Vec<Stmt>) {
        let is_final = kids(n).find(|k| k.kind() == "modifiers").map(|m| self.text(m).contains("final")).unwrap_or(false);
        let Some(tn) = n.child_by_field_name("type") else { return };
        let is_var = tn.kind() == "type_identifier" && self.text(tn) == "var" && self.ck.lookup_type_name("var", self.file, Some(self.class)).is_none();
        let base = if is_var {
            None
        } else {
            match self.ck.resolve_type(tn, self.file, Some(self.class)) {
                Some(t) => Some(t),
                None => return,
            }
        };
        let mut cur = n.walk();
        let decls: Vec<Node<'a>> = n.children_by_field_name("declarator", &mut cur).collect();
        for d in decls {
            let Some(nn) = d.child_by_field_name("name") else { continue };
            let value = d.child_by_field_name("value");
            let line = Self::line(d);
            match &base {
                Some(base) => {
                    let ty = self.ck.with_dims(base.clone(), d, self.file);
                    let slot = self.declare(nn, ty.clone(), is_final, value.is_some());
                    let init = match value {
                        Some(v) => self.init_value(v, &ty),
                        None => None,
                    };
                    if value.is_some() {
                        self.da.set(slot);
                    }
                    if let Some(Expr { kind: ExprKind::Const(k), .. }) = &init {
                        if is_final && (matches!(ty, Type::Prim(_)) || ty.is_string()) {
                            self.locals[slot].constant = Some(k.clone());
                        }
                    }
                    out.push(Stmt::Local { slot, init });
                    let _ = line;
                }
                None => {
                    let Some(v) = value else {
                        self.err(nn, "cannot infer type for local variable ".to_string() + self.text(nn));
                        continue;
                    };
                    if v.kind() == "array_initializer" {
                        self.err(v, "cannot infer type for local variable ".to_string() + self.text(nn));
                        continue;
                    }
                    let Some(init) = self.expr(v) else { continue };
                    if init.ty == Type::Null {
                        self.err(nn, "cannot infer type for local variable ".to_string() + self.text(nn));
                        continue;
                    }
                    let slot = self.declare(nn, init.ty.clone(), is_final, true);
                    self.da.set(slot);
                    out.push(Stmt::Local { slot, init: Some(init) });
                }
            }
        }
    }

    fn expr_stmt(&mut self, e: Node<'a>) -> Option<Stmt> {
        match e.kind() {
            "assignment_expression" | "update_expression" | "method_invocation" | "object_creation_expression" => {}
            "switch_expression" => return self.switch_stmt(e, None),
            _ => {
                self.err(e, "not a statement");
                return None;
            }
        }
        let ex = self.expr_any(e)?;
        Some(Stmt::Expr(ex))
    }

    fn if_stmt(&mut self, n: Node<'a>) -> Stmt {
        let cond_node = n.child_by_field_name("condition");
        let cond = cond_node.and_then(|c| self.condition(c));
        let k = cond.as_ref().and_then(const_bool);
        let da0 = self.da.clone();
        self.da = if k == Some(false) { Da::all() } else { da0.clone() };
        let then = match n.child_by_field_name("consequence") {
            Some(c) => self.sub_stmt(c),
            None => Stmt::Empty,
        };
        let (then_r, then_da) = (self.reachable, self.da.clone());
        self.reachable = true;
        self.da = if k == Some(true) { Da::all() } else { da0 };
        let els = n.child_by_field_name("alternative").map(|a| Box::new(self.sub_stmt(a)));
        self.reachable = self.reachable || then_r;
        self.da = then_da.meet(&self.da);
        Stmt::If { cond: cond.unwrap_or_else(|| bool_expr(true, 0)), then: Box::new(then), els }
    }

    fn loop_body(&mut self, body: Option<Node<'a>>, cond_false: bool, label: Option<String>) -> (Stmt, Target) {
        self.targets.push(Target::new(label, TargetKind::Loop));
        let stmt = match body {
            Some(b) => {
                if cond_false {
                    self.err(b, "unreachable statement");
                    self.da = Da::all();
                }
                self.reachable = true;
                self.sub_stmt(b)
            }
            None => Stmt::Empty,
        };
        let t = self.targets.pop().unwrap();
        (stmt, t)
    }

    fn while_stmt(&mut self, n: Node<'a>, label: Option<String>) -> Stmt {
        let cond = n.child_by_field_name("condition").and_then(|c| self.condition(c));
        let k = cond.as_ref().and_then(const_bool);
        let da_cond = self.da.clone();
        let (body, t) = self.loop_body(n.child_by_field_name("body"), k == Some(false), label.clone());
        self.reachable = k != Some(true) || t.broken;
        self.da = if k == Some(true) { Da::all() } else { da_cond }.meet(&t.break_da);
        wrap_label(label, Stmt::While { cond: cond.unwrap_or_else(|| bool_expr(true, 0)), body: Box::new(body) })
    }

    fn do_stmt(&mut self, n: Node<'a>, label: Option<String>) -> Stmt {
        let (body, t) = self.loop_body(n.child_by_field_name("body"), false, label.clone());
        let cond_reachable = self.reachable || t.continued;
        self.da = self.da.meet(&t.continue_da);
        self.reachable = true;
        let cond = n.child_by_field_name("condition").and_then(|c| self.condition(c));
        let k = cond.as_ref().and_then(const_bool);
        self.reachable = (cond_reachable && k != Some(true)) || t.broken;
        let after_cond = if k == Some(true) || !cond_reachable { Da::all() } else { self.da.clone() };
        self.da = after_cond.meet(&t.break_da);
        wrap_label(label, Stmt::DoWhile { body: Box::new(body), cond: cond.unwrap_or_else(|| bool_expr(true, 0)) })
    }

    fn for_stmt(&mut self, n: Node<'a>, label: Option<String>) -> Stmt {
        self.push_scope();
        let mut init = Vec::new();
        let mut cur = n.walk();
        let inits: Vec<Node<'a>> = n.children_by_field_name("init", &mut cur).collect();
        for i in inits {
            if i.kind() == "local_variable_declaration" {
                self.local_decl(i, &mut init);
            } else if let Some(s) = self.expr_stmt(i) {
                init.push(s);
            }
        }
        let cond = n.child_by_field_name("condition").and_then(|c| self.condition(c));
        let k = match &cond {
            Some(c) => const_bool(c),
            None if n.child_by_field_name("condition").is_none() => Some(true),
            None => None,
        };
        let da_cond = self.da.clone();
        let (body, t) = self.loop_body(n.child_by_field_name("body"), k == Some(false), label.clone());
        self.da = self.da.meet(&t.continue_da);
        self.reachable = true;
        let mut update = Vec::new();
        let mut cur = n.walk();
        let updates: Vec<Node<'a>> = n.children_by_field_name("update", &mut cur).collect();
        for u in updates {
            if let Some(Stmt::Expr(e)) = self.expr_stmt(u) {
                update.push(e);
            }
        }
        self.reachable = k != Some(true) || t.broken;
        self.da = if k == Some(true) { Da::all() } else { da_cond }.meet(&t.break_da);
        self.pop_scope();
        wrap_label(label, Stmt::For { init, cond, update, body: Box::new(body) })
    }

    fn foreach_stmt(&mut self, n: Node<'a>, label: Option<String>) -> Stmt {
        self.push_scope();
        let result = self.foreach_inner(n, label.clone());
        self.pop_scope();
        match result {
            Some(s) => wrap_label(label, s),
            None => Stmt::Empty,
        }
    }

    fn foreach_inner(&mut self, n: Node<'a>, label: Option<String>) -> Option<Stmt> {
        let value = n.child_by_field_name("value")?;
        let iterable = self.expr(value)?;
        let elem = match &iterable.ty {
            Type::Array(e) => (**e).clone(),
            t @ Type::Class(r, _) if self.ck.class_subtype(*r, ClassRef::Builtin(Builtin::Iterable)) => builtins::boxed_type(&t.type_arg(0)),
            other => {
                let shown = self.ck.show(other);
                self.err_notes(value, "for-each not applicable to expression type", vec![format!("required: array or java.lang.Iterable"), format!("found:    {shown}")]);
                return None;
            }
        };
        let tn = n.child_by_field_name("type")?;
        let nn = n.child_by_field_name("name")?;
        let is_final = kids(n).find(|k| k.kind() == "modifiers").map(|m| self.text(m).contains("final")).unwrap_or(false);
        let declared = if tn.kind() == "type_identifier" && self.text(tn) == "var" {
            elem.clone()
        } else {
            self.ck.resolve_type(tn, self.file, Some(self.class))?
        };
        let probe = Expr { kind: ExprKind::Const(Const::Null), ty: elem.clone(), line: 0 };
        let elem_conv = if declared == elem {
            None
        } else {
            self.assign_conv(probe, &declared, value)?;
            Some(declared.clone())
        };
        let da0 = self.da.clone();
        let slot = self.declare(nn, declared, is_final, true);
        self.da.set(slot);
        let (body, t) = self.loop_body(n.child_by_field_name("body"), false, label);
        self.reachable = true;
        self.da = da0.meet(&t.break_da);
        Some(Stmt::ForEach { slot, iterable, elem_conv, body: Box::new(body) })
    }

    fn labeled(&mut self, n: Node<'a>) -> Stmt {
        let mut it = kids(n);
        let Some(id) = it.next() else { return Stmt::Empty };
        let label = self.text(id).to_string();
        let Some(body) = it.next() else { return Stmt::Empty };
        if self.targets.iter().any(|t| t.label.as_deref() == Some(label.as_str())) {
            self.err(id, format!("label {label} already in use"));
        }
        if matches!(body.kind(), "while_statement" | "do_statement" | "for_statement" | "enhanced_for_statement") {
            self.pending_label = Some(label);
            let mut out = Vec::new();
            self.stmt(body, &mut out);
            return out.pop().unwrap_or(Stmt::Empty);
        }
        self.targets.push(Target::new(Some(label.clone()), TargetKind::Block));
        let s = self.sub_stmt(body);
        let t = self.targets.pop().unwrap();
        self.reachable = self.reachable || t.broken;
        self.da = self.da.meet(&t.break_da);
        Stmt::Labeled { label, body: Box::new(s) }
    }

    fn break_stmt(&mut self, n: Node<'a>) -> Stmt {
        let label = kids(n).next().map(|l| self.text(l).to_string());
        let idx = match &label {
            Some(l) => self.targets.iter().rposition(|t| t.label.as_deref() == Some(l.as_str())),
            None => self.targets.iter().rposition(|t| matches!(t.kind, TargetKind::Loop | TargetKind::Switch)),
        };
        match idx {
            Some(i) => {
                let da = self.da.clone();
                let t = &mut self.targets[i];
                t.broken = true;
                t.break_da = t.break_da.meet(&da);
            }
            None => match &label {
                Some(l) => self.err(n, format!("undefined label: {l}")),
                None => self.err(n, "break outside switch or loop"),
            },
        }
        self.unreachable_now();
        Stmt::Break(label)
    }

    fn continue_stmt(&mut self, n: Node<'a>) -> Stmt {
        let label = kids(n).next().map(|l| self.text(l).to_string());
        let idx = match &label {
            Some(l) => self.targets.iter().rposition(|t| t.label.as_deref() == Some(l.as_str())),
            None => self.targets.iter().rposition(|t| t.kind == TargetKind::Loop),
        };
        match idx {
            Some(i) if self.targets[i].kind == TargetKind::Loop => {
                let da = self.da.clone();
                let t = &mut self.targets[i];
                t.continued = true;
                t.continue_da = t.continue_da.meet(&da);
            }
            Some(_) => self.err(n, format!("not a loop label: {}", label.clone().unwrap_or_default())),
            None => match &label {
                Some(l) => self.err(n, format!("undefined label: {l}")),
                None => self.err(n, "continue outside of loop"),
            },
        }
        self.unreachable_now();
        Stmt::Continue(label)
    }

    fn return_stmt(&mut self, n: Node<'a>) -> Stmt {
        let line = Self::line(n);
        let value = kids(n).next();
        let result = match (self.ret.clone(), value) {
            (None, _) => {
                self.err(n, "return outside method");
                None
            }
            (Some(Type::Void), Some(v)) => {
                self.expr_any(v);
                self.err(v, "incompatible types: unexpected return value");
                None
            }
            (Some(Type::Void), None) => None,
            (Some(_), None) => {
                self.err(n, "incompatible types: missing return value");
                None
            }
            (Some(t), Some(v)) => self.expr(v).and_then(|e| self.assign_conv(e, &t, v)),
        };
        self.unreachable_now();
        Stmt::Return(result, line)
    }

    fn throw_stmt(&mut self, n: Node<'a>) -> Option<Stmt> {
        let line = Self::line(n);
        let v = kids(n).next()?;
        let e = self.expr(v);
        self.unreachable_now();
        let e = e?;
        let throwable = Type::builtin(Builtin::Throwable);
        if e.ty != Type::Null && !self.ck.is_subtype(&e.ty, &throwable) {
            let shown = self.ck.show(&e.ty);
            self.err(v, format!("incompatible types: {shown} cannot be converted to Throwable"));
            return None;
        }
        let rethrow = matches!(e.kind, ExprKind::Local(s) if self.locals[s].catch_param);
        if let (Some(r), false) = (e.ty.class(), rethrow) {
            self.throw_checked(r, v);
        }
        Some(Stmt::Throw(e, line))
    }

    fn try_stmt(&mut self, n: Node<'a>) -> Stmt {
        let da0 = self.da.clone();
        let mut clauses = Vec::new();
        for c in kids(n).filter(|k| k.kind() == "catch_clause") {
            let Some(param) = kids(c).find(|k| k.kind() == "catch_formal_parameter") else { continue };
            let mut types = Vec::new();
            if let Some(ct) = kids(param).find(|k| k.kind() == "catch_type") {
                for t in kids(ct) {
                    if let Some(Type::Class(r, _)) = self.ck.resolve_type(t, self.file, Some(self.class)) {
                        if !self.ck.is_throwable_ref(r) {
                            let shown = self.ck.show_ref(r);
                            self.err(t, format!("incompatible types: {shown} cannot be converted to Throwable"));
                        }
                        types.push((r, t));
                    }
                }
            }
            clauses.push((c, param, types));
        }
        let all_types: Vec<ClassRef> = clauses.iter().flat_map(|c| c.2.iter().map(|t| t.0)).collect();
        self.handlers.push(Handler { types: all_types, thrown: Vec::new() });
        let body = match n.child_by_field_name("body") {
            Some(b) => self.block(b),
            None => Stmt::Empty,
        };
        let thrown = self.handlers.pop().unwrap().thrown;
        let (try_r, try_da) = (self.reachable, self.da.clone());
        let mut any_r = try_r;
        let mut after = try_da;
        let mut catches = Vec::new();
        let mut seen: Vec<ClassRef> = Vec::new();
        for (c, param, types) in clauses {
            for &(r, tn) in &types {
                if let Some(prev) = seen.iter().find(|p| self.ck.class_subtype(r, **p)) {
                    let (a, b) = (self.ck.show_ref(r), self.ck.show_ref(*prev));
                    self.err(tn, format!("exception {a} has already been caught").replace(&format!("{a} has"), &format!("{a} has")));
                    let _ = b;
                } else if !self.ck.is_unchecked_ref(r)
                    && !matches!(r, ClassRef::Builtin(Builtin::Exception | Builtin::Throwable))
                    && !thrown.iter().any(|t| self.ck.class_subtype(*t, r) || self.ck.class_subtype(r, *t))
                {
                    let shown = self.ck.show_ref(r);
                    self.err(tn, format!("exception {shown} is never thrown in body of corresponding try statement"));
                }
            }
            seen.extend(types.iter().map(|t| t.0));
            self.reachable = true;
            self.da = da0.clone();
            self.push_scope();
            let ty = if types.len() == 1 {
                Type::Class(types[0].0, Vec::new())
            } else {
                Type::builtin(types.first().map(|t| self.ck.builtin_ancestor(t.0)).map(common_throwable).unwrap_or(Builtin::Throwable))
            };
            let slot = match param.child_by_field_name("name") {
                Some(nn) => self.declare(nn, ty, true, true),
                None => self.new_local("$catch", ty, true, true),
            };
            self.locals[slot].catch_param = true;
            self.da.set(slot);
            let cbody = match c.child_by_field_name("body") {
                Some(b) => self.block(b),
                None => Stmt::Empty,
            };
            self.pop_scope();
            any_r |= self.reachable;
            after = after.meet(&self.da);
            catches.push(ir::Catch { types: types.iter().map(|t| t.0).collect(), slot, body: vec![cbody] });
        }
        let mut finally = None;
        if let Some(f) = kids(n).find(|k| k.kind() == "finally_clause") {
            self.reachable = true;
            self.da = da0.clone();
            let fb = kids(f).find(|k| k.kind() == "block").map(|b| self.block(b)).unwrap_or(Stmt::Empty);
            let fin_r = self.reachable;
            let fin_da = self.da.clone();
            finally = Some(vec![fb]);
            self.reachable = any_r && fin_r;
            self.da = if fin_r { after.join(&fin_da) } else { Da::all() };
        } else {
            self.reachable = any_r;
            self.da = after;
        }
        if catches.is_empty() && finally.is_none() {
            self.err(n, "'try' without 'catch', 'finally' or resource declarations");
        }
        if !self.reachable {
            self.da = Da::all();
        }
        Stmt::Try(Box::new(ir::Try { body: vec![body], catches, finally }))
    }

    fn switch_stmt(&mut self, n: Node<'a>, label: Option<String>) -> Option<Stmt> {
        let line = Self::line(n);
        let cond = n.child_by_field_name("condition")?;
        let selector = self.condition_value(cond)?;
        let (kind, sel_prim) = match selector.ty.unboxed() {
            Some(p @ (Prim::Int | Prim::Char | Prim::Short | Prim::Byte)) => (SwitchKind::Integral, Some(p)),
            _ if selector.ty.is_string() => (SwitchKind::String, None),
            _ => {
                let shown = self.ck.show(&selector.ty);
                self.err(cond, format!("switch on values of type {shown} is not supported by this toolchain"));
                return None;
            }
        };
        let selector = match sel_prim {
            Some(p) => self.convert_to(selector, &Type::Prim(p)),
            None => selector,
        };
        let body = n.child_by_field_name("body")?;
        let da_sel = self.da.clone();
        self.targets.push(Target::new(label.clone(), TargetKind::Switch));
        self.push_scope();
        let mut groups = Vec::new();
        let mut has_default = false;
        let mut seen: Vec<Const> = Vec::new();
        let mut arrow = false;
        let mut prev_r = false;
        let mut prev_da = Da::all();
        let mut any_rule_r = false;
        let mut after_rules = Da::all();
        for g in kids(body) {
            let is_rule = g.kind() == "switch_rule";
            arrow |= is_rule;
            let mut labels = Vec::new();
            let mut is_default = false;
            let mut stmts_nodes = Vec::new();
            for k in kids(g) {
                if k.kind() == "switch_label" {
                    let vals: Vec<Node<'a>> = kids(k).collect();
                    if vals.is_empty() {
                        if has_default {
                            self.err(k, "duplicate default label");
                        }
                        has_default = true;
                        is_default = true;
                    }
                    for v in vals {
                        if let Some(c) = self.case_const(v, sel_prim) {
                            if seen.contains(&c) {
                                self.err(v, "duplicate case label");
                            }
                            seen.push(c.clone());
                            labels.push(c);
                        }
                    }
                } else {
                    stmts_nodes.push(k);
                }
            }
            self.reachable = true;
            if is_rule {
                self.da = da_sel.clone();
                let mut out = Vec::new();
                for s in stmts_nodes {
                    match s.kind() {
                        "expression_statement" | "block" | "throw_statement" => self.stmt(s, &mut out),
                        _ => self.err(s, "not a statement"),
                    }
                }
                if self.reachable {
                    any_rule_r = true;
                    after_rules = after_rules.meet(&self.da);
                }
                groups.push(SwitchGroup { labels, is_default, body: out });
            } else {
                self.da = if prev_r { da_sel.meet(&prev_da) } else { da_sel.clone() };
                let out = self.stmt_list(stmts_nodes.into_iter());
                prev_r = self.reachable;
                prev_da = self.da.clone();
                groups.push(SwitchGroup { labels, is_default, body: out });
            }
        }
        self.pop_scope();
        let t = self.targets.pop().unwrap();
        let mut da = t.break_da.clone();
        let completes = if arrow {
            da = da.meet(&after_rules);
            any_rule_r || t.broken || !has_default || groups.is_empty()
        } else {
            if prev_r || groups.is_empty() {
                da = da.meet(&prev_da);
            }
            prev_r || t.broken || !has_default || groups.is_empty()
        };
        if !has_default {
            da = da.meet(&da_sel);
        }
        self.reachable = completes;
        self.da = if completes { da } else { Da::all() };
        let sw = Stmt::Switch(Box::new(ir::Switch { selector, kind, groups, arrow, line }));
        Some(wrap_label(label, sw))
    }

    fn case_const(&mut self, v: Node<'a>, sel: Option<Prim>) -> Option<Const> {
        let e = self.expr(v)?;
        let ExprKind::Const(c) = &e.kind else {
            self.err(v, "constant expression required");
            return None;
        };
        match sel {
            Some(p) => {
                let target = Type::Prim(p);
                let conv = self.assign_conv(e.clone(), &target, v)?;
                match conv.kind {
                    ExprKind::Const(c) => Some(c),
                    _ => None,
                }
            }
            None => match c {
                Const::Str(_) => Some(c.clone()),
                _ => {
                    let shown = self.ck.show(&e.ty);
                    self.err(v, format!("incompatible types: {shown} cannot be converted to String"));
                    None
                }
            },
        }
    }

    /// Boolean condition, with or without surrounding parentheses.
    pub fn condition(&mut self, n: Node<'a>) -> Option<Expr> {
        let e = self.condition_value(n)?;
        self.assign_conv(e, &Type::BOOLEAN, n)
    }

    fn condition_value(&mut self, n: Node<'a>) -> Option<Expr> {
        let inner = if n.kind() == "parenthesized_expression" { kids(n).next()? } else { n };
        self.expr(inner)
    }

    /// Constructor of user class `c` for the given arguments.
    pub fn pick_ctor(&mut self, c: usize, args: Vec<Expr>, n: Node<'_>) -> Option<(usize, Vec<Expr>)> {
        let arg_types: Vec<Type> = args.iter().map(|a| a.ty.clone()).collect();
        let cands: Vec<super::Cand> = self.ck.classes[c]
            .ctors
            .iter()
            .enumerate()
            .map(|(i, k)| super::Cand {
                params: k.params.iter().map(|p| p.1.clone()).collect(),
                any: vec![false; k.params.len()],
                varargs: k.varargs,
                callee: Callee::User { class: c, index: i },
                is_static: false,
                ret: Type::Void,
            })
            .collect();
        let name = self.ck.classes[c].name.clone();
        let shown = self.ck.class_name(c);
        let cand = self.select(&cands, &arg_types, n, &format!("constructor {name}"), &shown)?;
        let Callee::User { index, .. } = cand.callee else { return None };
        let args = self.coerce_args(args, &cand);
        Some((index, args))
    }

    pub fn pick_builtin_ctor(&mut self, b: Builtin, args: Vec<Expr>, n: Node<'_>) -> Option<(&'static builtins::Entry, Vec<Expr>)> {
        let arg_types: Vec<Type> = args.iter().map(|a| a.ty.clone()).collect();
        let cands = super::builtin_cands(builtins::constructors(b), None, &arg_types);
        let simple = b.info().simple;
        let cand = self.select(&cands, &arg_types, n, &format!("constructor {simple}"), simple)?;
        let Callee::Builtin(e) = cand.callee else { return None };
        let args = self.coerce_args(args, &cand);
        Some((e, args))
    }
}

fn common_throwable(b: Builtin) -> Builtin {
    if b.is_subclass_of(Builtin::RuntimeException) {
        Builtin::RuntimeException
    } else if b.is_subclass_of(Builtin::Exception) {
        Builtin::Exception
    } else {
        Builtin::Throwable
    }
}

fn wrap_label(label: Option<String>, s: Stmt) -> Stmt {
    match label {
        Some(label) => Stmt::Labeled { label, body: Box::new(s) },
        None => s,
    }
}

pub(crate) fn const_bool(e: &Expr) -> Option<bool> {
    match &e.kind {
        ExprKind::Const(Const::Bool(b)) => Some(*b),
        _ => None,
    }
}

pub(crate) fn bool_expr(b: bool, line: u32) -> Expr {
    Expr { kind: ExprKind::Const(Const::Bool(b)), ty: Type::BOOLEAN, line }
}
