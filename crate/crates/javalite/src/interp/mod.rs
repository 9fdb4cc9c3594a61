//! Tree-walking interpreter for checked programs.

mod format;
mod lib;
mod text;

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;
use std::time::Instant;

use crate::builtins::{self, BuiltinMethod, Kind};
use crate::ir::{signature_key, BinOp, Body, CtorCall, Expr, ExprKind, LValue, Program, Stmt, SwitchKind};
use crate::jfmt;
use crate::types::{Builtin, ClassRef, Prim, Type};
use crate::value::{self, Frame, ListMode, Obj, ObjKind, Ref, ThrowData, Value};

#[derive(Debug, Clone)]
pub struct Options {
    /// Frames allowed before `StackOverflowError`.
    pub max_depth: usize,
    /// Array elements, collection entries and string units allowed before
    /// `OutOfMemoryError`.
    pub max_alloc: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_depth: 1024, max_alloc: 50_000_000 }
    }
}

#[derive(Debug)]
pub enum Unwind {
    Throw(Ref),
    Timeout,
}

pub type R<T> = Result<T, Unwind>;

enum Flow {
    Normal,
    Break(Option<String>),
    Continue(Option<String>),
    Return(Value),
}

struct Active {
    class: String,
    method: String,
    file: Option<String>,
    line: u32,
}

struct Ctx {
    locals: Vec<Value>,
    this: Value,
}

enum Place {
    Local(usize),
    Static(usize, usize),
    Field(Ref, usize),
    Index(Ref, usize),
}

pub struct Interp<'p> {
    pub prog: &'p Program,
    statics: Vec<Vec<Value>>,
    init: Vec<u8>,
    next_id: u32,
    pub stdout: String,
    pub stderr: String,
    stack: Vec<Active>,
    opts: Options,
    deadline: Option<Instant>,
    ticks: u32,
    alloc: u64,
    interned: HashMap<String, Ref>,
    box_cache: HashMap<(Prim, i64), Ref>,
    streams: Option<(Ref, Ref)>,
    dispatch: HashMap<(usize, String), Option<(usize, usize)>>,
}

fn identity_hash(id: u32) -> i32 {
    let mut x = (id as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    (x as u32 & 0x7fff_ffff) as i32
}

impl<'p> Interp<'p> {
    pub fn new(prog: &'p Program, opts: Options) -> Self {
        let statics = prog
            .classes
            .iter()
            .map(|c| {
                c.fields
                    .iter()
                    .map(|f| match &f.constant {
                        Some(k) => Value::from_const(k).unwrap_or(Value::Null),
                        None => Value::default_for(&f.ty),
                    })
                    .collect()
            })
            .collect();
        let mut it = Interp {
            prog,
            statics,
            init: vec![0; prog.classes.len()],
            next_id: 1,
            stdout: String::new(),
            stderr: String::new(),
            stack: Vec::new(),
            opts,
            deadline: None,
            ticks: 0,
            alloc: 0,
            interned: HashMap::new(),
            box_cache: HashMap::new(),
            streams: None,
            dispatch: HashMap::new(),
        };
        let out = it.alloc_obj(ObjKind::PrintStream(true));
        let err = it.alloc_obj(ObjKind::PrintStream(false));
        it.streams = Some((out, err));
        // String constants of static final fields are interned objects.
        for (ci, c) in prog.classes.iter().enumerate() {
            for (fi, f) in c.fields.iter().enumerate() {
                if let Some(crate::ir::Const::Str(s)) = &f.constant {
                    let v = it.intern(s);
                    it.statics[ci][fi] = v;
                }
            }
        }
        it
    }

    pub fn set_deadline(&mut self, d: Option<Instant>) {
        self.deadline = d;
    }

    /// Drops frames left by an aborted run.
    pub fn reset_stack(&mut self) {
        self.stack.clear();
    }

    pub fn class_index(&self, binary_name: &str) -> Option<usize> {
        self.prog.classes.iter().position(|c| c.binary_name == binary_name)
    }

    // ---- allocation ----

    fn alloc_obj(&mut self, kind: ObjKind) -> Ref {
        let id = self.next_id;
        self.next_id += 1;
        Rc::new(Obj { id, kind })
    }

    fn charge(&mut self, units: u64) -> R<()> {
        self.alloc += units;
        if self.alloc > self.opts.max_alloc {
            self.alloc = 0;
            return Err(self.throw(Builtin::OutOfMemoryError, Some("Java heap space".into())));
        }
        Ok(())
    }

    pub fn string(&mut self, s: &str) -> Value {
        Value::Ref(self.alloc_obj(ObjKind::Str(jfmt::to_utf16(s))))
    }

    fn string16(&mut self, s: Vec<u16>) -> Value {
        Value::Ref(self.alloc_obj(ObjKind::Str(s)))
    }

    fn intern(&mut self, s: &str) -> Value {
        if let Some(r) = self.interned.get(s) {
            return Value::Ref(r.clone());
        }
        let r = self.alloc_obj(ObjKind::Str(jfmt::to_utf16(s)));
        self.interned.insert(s.to_string(), r.clone());
        Value::Ref(r)
    }

    fn new_list(&mut self, items: Vec<Value>, mode: ListMode) -> Value {
        Value::Ref(self.alloc_obj(ObjKind::List { items: RefCell::new(items), mode, mods: Cell::new(0) }))
    }

    fn new_array(&mut self, elem: Type, data: Vec<Value>) -> Value {
        Value::Ref(self.alloc_obj(ObjKind::Array { elem, data: RefCell::new(data) }))
    }

    pub fn box_value(&mut self, p: Prim, v: Value) -> Value {
        let key = match (p, &v) {
            (Prim::Boolean, Value::Bool(b)) => Some(*b as i64),
            (Prim::Byte, _) => Some(v.as_i64()),
            (Prim::Char, Value::Char(c)) if *c <= 127 => Some(*c as i64),
            (Prim::Short | Prim::Int | Prim::Long, _) if (-128..=127).contains(&v.as_i64()) => Some(v.as_i64()),
            _ => None,
        };
        let v = value::convert(&v, p);
        if let Some(k) = key {
            if let Some(r) = self.box_cache.get(&(p, k)) {
                return Value::Ref(r.clone());
            }
            let r = self.alloc_obj(ObjKind::Boxed(p, v));
            self.box_cache.insert((p, k), r.clone());
            return Value::Ref(r);
        }
        Value::Ref(self.alloc_obj(ObjKind::Boxed(p, v)))
    }

    // ---- exceptions ----

    fn frames(&self) -> Vec<Frame> {
        self.stack
            .iter()
            .rev()
            .map(|a| Frame { class: a.class.clone(), method: a.method.clone(), file: a.file.clone(), line: (a.line > 0).then_some(a.line) })
            .collect()
    }

    pub fn throwable(&mut self, b: Builtin, message: Option<String>) -> Ref {
        let frames = self.frames();
        self.alloc_obj(ObjKind::Throwable { class: b, data: RefCell::new(ThrowData { message, cause: None, frames }) })
    }

    pub fn throw(&mut self, b: Builtin, message: Option<String>) -> Unwind {
        Unwind::Throw(self.throwable(b, message))
    }

    fn npe(&mut self) -> Unwind {
        self.throw(Builtin::NullPointerException, None)
    }

    fn tick(&mut self) -> R<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks & 1023 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(Unwind::Timeout);
                }
            }
        }
        Ok(())
    }

    fn set_line(&mut self, line: u32) {
        if line > 0 {
            if let Some(a) = self.stack.last_mut() {
                a.line = line;
            }
        }
    }

    fn push_frame(&mut self, class: usize, method: &str) -> R<()> {
        if self.stack.len() >= self.opts.max_depth {
            return Err(self.throw(Builtin::StackOverflowError, None));
        }
        let c = &self.prog.classes[class];
        let file = Some(self.prog.files[c.file].name.clone());
        self.stack.push(Active { class: c.binary_name.clone(), method: method.to_string(), file, line: 0 });
        Ok(())
    }

    fn push_lib_frame(&mut self, owner: Builtin, method: &str) -> R<()> {
        if self.stack.len() >= self.opts.max_depth {
            return Err(self.throw(Builtin::StackOverflowError, None));
        }
        let info = owner.info();
        self.stack.push(Active { class: info.fqn.to_string(), method: method.to_string(), file: Some(format!("{}.java", info.simple)), line: 0 });
        Ok(())
    }

    /// Message, cause and frames of a throwable object.
    pub fn throw_data(&self, r: &Ref) -> Option<ThrowData> {
        match &r.kind {
            ObjKind::Throwable { data, .. } => Some(data.borrow().clone()),
            ObjKind::Instance { throw: Some(d), .. } => Some(d.borrow().clone()),
            _ => None,
        }
    }

    /// `getMessage()` including user overrides.
    pub fn call_get_message(&mut self, r: &Ref) -> Option<String> {
        if let ObjKind::Instance { class, .. } = &r.kind {
            if let Some((c, m)) = self.find_impl(*class, "getMessage()") {
                let v = self.invoke(c, m, Value::Ref(r.clone()), Vec::new()).ok()?;
                return self.opt_string(&v);
            }
        }
        self.throw_data(r).and_then(|d| d.message)
    }

    fn throw_cell<'r>(&self, r: &'r Ref) -> Option<&'r RefCell<ThrowData>> {
        match &r.kind {
            ObjKind::Throwable { data, .. } => Some(data),
            ObjKind::Instance { throw: Some(d), .. } => Some(d),
            _ => None,
        }
    }

    /// Binary class name of an object as `getClass().getName()` reports it.
    pub fn class_name_of(&self, r: &Ref) -> String {
        match &r.kind {
            ObjKind::Plain => "java.lang.Object".into(),
            ObjKind::Str(_) => "java.lang.String".into(),
            ObjKind::Boxed(p, _) => p.box_class().info().fqn.into(),
            ObjKind::Instance { class, .. } => self.prog.classes[*class].binary_name.clone(),
            ObjKind::Throwable { class, .. } => class.info().fqn.into(),
            ObjKind::Array { elem, .. } => format!("[{}", self.descriptor(elem)),
            ObjKind::Builder(_) => "java.lang.StringBuilder".into(),
            ObjKind::List { mode: ListMode::Mutable, .. } => "java.util.ArrayList".into(),
            ObjKind::List { mode: ListMode::FixedSize, .. } => "java.util.Arrays$ArrayList".into(),
            ObjKind::List { mode: ListMode::Immutable, .. } => "java.util.ImmutableCollections$ListN".into(),
            ObjKind::Map(_) => "java.util.HashMap".into(),
            ObjKind::Set(_, false) => "java.util.HashSet".into(),
            ObjKind::Set(_, true) => "java.util.ImmutableCollections$SetN".into(),
            ObjKind::MapView(_, true) => "java.util.HashMap$KeySet".into(),
            ObjKind::MapView(_, false) => "java.util.HashMap$Values".into(),
            ObjKind::PrintStream(_) => "java.io.PrintStream".into(),
        }
    }

    fn descriptor(&self, t: &Type) -> String {
        match t {
            Type::Prim(p) => match p {
                Prim::Boolean => "Z",
                Prim::Byte => "B",
                Prim::Short => "S",
                Prim::Char => "C",
                Prim::Int => "I",
                Prim::Long => "J",
                Prim::Float => "F",
                Prim::Double => "D",
            }
            .into(),
            Type::Array(e) => format!("[{}", self.descriptor(e)),
            Type::Class(ClassRef::Builtin(b), _) => format!("L{};", b.info().fqn),
            Type::Class(ClassRef::User(i), _) => format!("L{};", self.prog.classes[*i].binary_name),
            _ => "Ljava.lang.Object;".into(),
        }
    }

    // ---- types at run time ----

    fn user_subclass(&self, c: usize, target: ClassRef) -> bool {
        if target == ClassRef::User(c) {
            return true;
        }
        let cls = &self.prog.classes[c];
        if cls.interfaces.iter().any(|i| match i {
            ClassRef::User(j) => self.user_subclass(*j, target),
            ClassRef::Builtin(b) => matches!(target, ClassRef::Builtin(t) if b.is_subtype_of(t)),
        }) {
            return true;
        }
        match cls.superclass {
            ClassRef::User(s) => self.user_subclass(s, target),
            ClassRef::Builtin(b) => matches!(target, ClassRef::Builtin(t) if b.is_subtype_of(t)),
        }
    }

    fn builtin_of(&self, r: &Ref) -> Option<Builtin> {
        Some(match &r.kind {
            ObjKind::Plain => Builtin::Object,
            ObjKind::Str(_) => Builtin::String,
            ObjKind::Boxed(p, _) => p.box_class(),
            ObjKind::Throwable { class, .. } => *class,
            ObjKind::Builder(_) => Builtin::StringBuilder,
            ObjKind::List { mode: ListMode::Mutable, .. } => Builtin::ArrayList,
            ObjKind::List { .. } => Builtin::List,
            ObjKind::Map(_) => Builtin::HashMap,
            ObjKind::Set(_, false) => Builtin::HashSet,
            ObjKind::Set(_, true) | ObjKind::MapView(_, true) => Builtin::Set,
            ObjKind::MapView(_, false) => Builtin::Collection,
            ObjKind::PrintStream(_) => Builtin::PrintStream,
            _ => return None,
        })
    }

    pub fn instance_of(&self, v: &Value, t: &Type) -> bool {
        let Value::Ref(r) = v else { return false };
        match (&r.kind, t) {
            (_, Type::Class(ClassRef::Builtin(Builtin::Object), _)) => true,
            (ObjKind::Array { elem, .. }, Type::Array(te)) => match (elem, &**te) {
                (Type::Prim(a), Type::Prim(b)) => a == b,
                (Type::Prim(_), _) | (_, Type::Prim(_)) => false,
                (a, b) => self.type_assignable(a, b),
            },
            (ObjKind::Array { .. }, _) | (_, Type::Array(_)) => false,
            (ObjKind::Instance { class, .. }, Type::Class(target, _)) => self.user_subclass(*class, *target),
            (_, Type::Class(ClassRef::Builtin(b), _)) => self.builtin_of(r).map(|own| own.is_subtype_of(*b)).unwrap_or(false),
            _ => false,
        }
    }

    fn type_assignable(&self, a: &Type, b: &Type) -> bool {
        match (a, b) {
            (_, Type::Class(ClassRef::Builtin(Builtin::Object), _)) => true,
            (Type::Array(x), Type::Array(y)) => match (&**x, &**y) {
                (Type::Prim(p), Type::Prim(q)) => p == q,
                (Type::Prim(_), _) | (_, Type::Prim(_)) => false,
                (x, y) => self.type_assignable(x, y),
            },
            (Type::Class(ClassRef::User(i), _), Type::Class(t, _)) => self.user_subclass(*i, *t),
            (Type::Class(ClassRef::Builtin(x), _), Type::Class(ClassRef::Builtin(y), _)) => x.is_subtype_of(*y),
            _ => false,
        }
    }

    fn type_name(&self, t: &Type) -> String {
        match t {
            Type::Class(ClassRef::User(i), _) => self.prog.classes[*i].binary_name.clone(),
            Type::Class(ClassRef::Builtin(b), _) => b.info().fqn.into(),
            Type::Array(_) => format!("[{}", match t {
                Type::Array(e) => self.descriptor(e),
                _ => unreachable!(),
            }),
            Type::Prim(p) => p.name().into(),
            _ => "java.lang.Object".into(),
        }
    }

    // ---- classes and invocation ----

    fn ensure_init(&mut self, c: usize) -> R<()> {
        if self.init[c] != 0 {
            return Ok(());
        }
        self.init[c] = 1;
        if let ClassRef::User(s) = self.prog.classes[c].superclass {
            self.ensure_init(s)?;
        }
        let body = &self.prog.classes[c].static_init;
        if body.stmts.is_empty() {
            self.init[c] = 2;
            return Ok(());
        }
        self.push_frame(c, "<clinit>")?;
        let mut cx = Ctx { locals: vec![Value::Null; body.locals], this: Value::Null };
        let r = self.exec_block(&body.stmts, &mut cx);
        self.stack.pop();
        self.init[c] = 2;
        r.map(|_| ())
    }

    /// The implementation `key` resolves to for an object of class `c`.
    fn find_impl(&mut self, c: usize, key: &str) -> Option<(usize, usize)> {
        if let Some(hit) = self.dispatch.get(&(c, key.to_string())) {
            return *hit;
        }
        let mut found = None;
        let mut cur = Some(c);
        while let Some(ci) = cur {
            let cls = &self.prog.classes[ci];
            if let Some(mi) = cls.methods.iter().position(|m| !m.is_static && m.body.is_some() && m.signature_key() == key) {
                found = Some((ci, mi));
                break;
            }
            cur = match cls.superclass {
                ClassRef::User(s) => Some(s),
                _ => None,
            };
        }
        if found.is_none() {
            // Interface methods with bodies.
            let mut stack = vec![c];
            while let Some(ci) = stack.pop() {
                let cls = &self.prog.classes[ci];
                for i in &cls.interfaces {
                    if let ClassRef::User(j) = i {
                        if let Some(mi) = self.prog.classes[*j].methods.iter().position(|m| m.body.is_some() && !m.is_static && m.signature_key() == key) {
                            found = Some((*j, mi));
                        }
                        stack.push(*j);
                    }
                }
                if let ClassRef::User(s) = cls.superclass {
                    stack.push(s);
                }
                if found.is_some() {
                    break;
                }
            }
        }
        self.dispatch.insert((c, key.to_string()), found);
        found
    }

    /// User override of a library instance method, for objects of user classes.
    fn user_override(&mut self, v: &Value, m: BuiltinMethod) -> Option<(usize, usize)> {
        let Value::Ref(r) = v else { return None };
        let ObjKind::Instance { class, .. } = &r.kind else { return None };
        let e = m.entry();
        let params: Vec<Type> = e.params.iter().map(|p| builtins::resolve(*p, None, &[])).collect();
        let key = signature_key(e.name, &params);
        self.find_impl(*class, &key)
    }

    pub fn invoke(&mut self, class: usize, method: usize, this: Value, args: Vec<Value>) -> R<Value> {
        self.tick()?;
        let m = &self.prog.classes[class].methods[method];
        let Some(body) = &m.body else {
            return Err(self.throw(Builtin::Error, Some(format!("abstract method {} called", m.name))));
        };
        self.push_frame(class, &m.name)?;
        let mut locals = vec![Value::Null; body.locals.max(args.len())];
        for (i, a) in args.into_iter().enumerate() {
            locals[i] = a;
        }
        let mut cx = Ctx { locals, this };
        let r = self.exec_block(&body.stmts, &mut cx);
        self.stack.pop();
        match r? {
            Flow::Return(v) => Ok(v),
            _ => Ok(Value::Null),
        }
    }

    /// Calls the implementation of `key` on `recv`.
    pub fn call_virtual(&mut self, recv: Value, key: &str, args: Vec<Value>) -> R<Value> {
        let Value::Ref(r) = &recv else { return Err(self.npe()) };
        let ObjKind::Instance { class, .. } = &r.kind else {
            return Err(self.throw(Builtin::Error, Some(format!("no implementation of {key}"))));
        };
        match self.find_impl(*class, key) {
            Some((c, m)) => self.invoke(c, m, recv.clone(), args),
            None => Err(self.throw(Builtin::Error, Some(format!("AbstractMethodError: {key}")))),
        }
    }

    fn default_fields(&self, c: usize) -> Vec<Value> {
        let cls = &self.prog.classes[c];
        let mut v = vec![Value::Null; cls.instance_size];
        let mut cur = Some(c);
        while let Some(ci) = cur {
            let k = &self.prog.classes[ci];
            for (f, slot) in k.fields.iter().zip(&k.slots) {
                if let Some(s) = slot {
                    v[*s] = Value::default_for(&f.ty);
                }
            }
            cur = match k.superclass {
                ClassRef::User(s) => Some(s),
                _ => None,
            };
        }
        v
    }

    fn is_throwable_class(&self, c: usize) -> bool {
        let mut cur = c;
        loop {
            match self.prog.classes[cur].superclass {
                ClassRef::User(s) => cur = s,
                ClassRef::Builtin(b) => return b.is_throwable(),
            }
        }
    }

    pub fn instantiate(&mut self, c: usize, ctor: usize, args: Vec<Value>) -> R<Value> {
        self.ensure_init(c)?;
        let fields = RefCell::new(self.default_fields(c));
        let throw = self.is_throwable_class(c).then(|| RefCell::new(ThrowData { message: None, cause: None, frames: self.frames() }));
        let obj = Value::Ref(self.alloc_obj(ObjKind::Instance { class: c, fields, throw }));
        self.run_ctor(c, ctor, obj.clone(), args)?;
        Ok(obj)
    }

    /// Index of the no-argument constructor.
    pub fn default_ctor(&self, c: usize) -> Option<usize> {
        self.prog.classes[c].ctors.iter().position(|k| k.params.is_empty())
    }

    fn run_ctor(&mut self, c: usize, k: usize, obj: Value, args: Vec<Value>) -> R<()> {
        self.tick()?;
        self.push_frame(c, "<init>")?;
        let r = self.run_ctor_inner(c, k, obj, args);
        self.stack.pop();
        r
    }

    fn run_ctor_inner(&mut self, c: usize, k: usize, obj: Value, args: Vec<Value>) -> R<()> {
        let ctor = &self.prog.classes[c].ctors[k];
        let mut locals = vec![Value::Null; ctor.body.locals.max(args.len())];
        for (i, a) in args.into_iter().enumerate() {
            locals[i] = a;
        }
        let mut cx = Ctx { locals, this: obj.clone() };
        self.set_line(ctor.line);
        match &ctor.call {
            CtorCall::This { ctor: other, args } => {
                let vals = self.eval_args(args, &mut cx)?;
                self.run_ctor(c, *other, obj.clone(), vals)?;
            }
            CtorCall::Super { class, ctor: sk, args } => {
                let vals = self.eval_args(args, &mut cx)?;
                self.run_ctor(*class, *sk, obj.clone(), vals)?;
                self.run_instance_init(c, &obj)?;
            }
            CtorCall::SuperBuiltin { method, args } => {
                let vals = self.eval_args(args, &mut cx)?;
                if let Some(m) = method {
                    if let Value::Ref(r) = &obj {
                        self.init_throwable(r, *m, &vals)?;
                    }
                }
                self.run_instance_init(c, &obj)?;
            }
        }
        self.exec_block(&ctor.body.stmts, &mut cx)?;
        Ok(())
    }

    fn run_instance_init(&mut self, c: usize, obj: &Value) -> R<()> {
        let body: &Body = &self.prog.classes[c].instance_init;
        if body.stmts.is_empty() {
            return Ok(());
        }
        let mut cx = Ctx { locals: vec![Value::Null; body.locals], this: obj.clone() };
        self.exec_block(&body.stmts, &mut cx)?;
        Ok(())
    }

    fn init_throwable(&mut self, r: &Ref, m: BuiltinMethod, args: &[Value]) -> R<()> {
        let (message, cause) = match m {
            BuiltinMethod::ThrNewMsg => (self.opt_string(&args[0]), None),
            BuiltinMethod::ThrNewMsgCause => (self.opt_string(&args[0]), args[1].as_ref().cloned()),
            BuiltinMethod::ThrNewCause => {
                let msg = match &args[0] {
                    Value::Null => None,
                    v => Some(self.to_jstring(v)?),
                };
                (msg, args[0].as_ref().cloned())
            }
            BuiltinMethod::AssertionErrorNewObj => {
                let msg = Some(self.to_jstring(&args[0])?);
                let cause = args[0].as_ref().filter(|c| self.throw_cell(c).is_some()).cloned();
                (msg, cause)
            }
            _ => (None, None),
        };
        if let Some(cell) = self.throw_cell(r) {
            let mut d = cell.borrow_mut();
            d.message = message;
            d.cause = cause;
        }
        Ok(())
    }

    fn opt_string(&self, v: &Value) -> Option<String> {
        match v {
            Value::Ref(r) => match &r.kind {
                ObjKind::Str(s) => Some(jfmt::from_utf16(s)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn str_units(&self, v: &Value) -> Vec<u16> {
        match v {
            Value::Ref(r) => match &r.kind {
                ObjKind::Str(s) => s.clone(),
                _ => Vec::new(),
            },
            _ => Vec::new(),
        }
    }

    pub fn rust_string(&self, v: &Value) -> String {
        jfmt::from_utf16(&self.str_units(v))
    }

    // ---- statements ----

    fn exec_block(&mut self, stmts: &[Stmt], cx: &mut Ctx) -> R<Flow> {
        for s in stmts {
            match self.exec(s, cx)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn exec(&mut self, s: &Stmt, cx: &mut Ctx) -> R<Flow> {
        self.tick()?;
        match s {
            Stmt::Local { slot, init } => {
                if let Some(e) = init {
                    let v = self.eval(e, cx)?;
                    cx.locals[*slot] = v;
                }
                Ok(Flow::Normal)
            }
            Stmt::Expr(e) => {
                self.eval(e, cx)?;
                Ok(Flow::Normal)
            }
            Stmt::If { cond, then, els } => {
                if self.eval(cond, cx)?.as_bool() {
                    self.exec(then, cx)
                } else if let Some(e) = els {
                    self.exec(e, cx)
                } else {
                    Ok(Flow::Normal)
                }
            }
            Stmt::While { .. } | Stmt::DoWhile { .. } | Stmt::For { .. } | Stmt::ForEach { .. } => self.exec_loop(s, None, cx),
            Stmt::Switch(sw) => {
                let sel = self.eval(&sw.selector, cx)?;
                let start = match sw.kind {
                    SwitchKind::Integral => {
                        let k = sel.as_i64();
                        sw.groups.iter().position(|g| g.labels.iter().any(|l| l.as_i64() == Some(k)))
                    }
                    SwitchKind::String => {
                        if sel.is_null() {
                            return Err(self.npe());
                        }
                        let s = self.rust_string(&sel);
                        sw.groups.iter().position(|g| g.labels.iter().any(|l| matches!(l, crate::ir::Const::Str(x) if *x == s)))
                    }
                };
                let Some(start) = start.or_else(|| sw.groups.iter().position(|g| g.is_default)) else {
                    return Ok(Flow::Normal);
                };
                for g in &sw.groups[start..] {
                    match self.exec_block(&g.body, cx)? {
                        Flow::Normal => {
                            if sw.arrow {
                                return Ok(Flow::Normal);
                            }
                        }
                        Flow::Break(None) => return Ok(Flow::Normal),
                        other => return Ok(other),
                    }
                }
                Ok(Flow::Normal)
            }
            Stmt::Block(b) => self.exec_block(b, cx),
            Stmt::Labeled { label, body } => {
                let r = match &**body {
                    Stmt::While { .. } | Stmt::DoWhile { .. } | Stmt::For { .. } | Stmt::ForEach { .. } => self.exec_loop(body, Some(label), cx)?,
                    other => self.exec(other, cx)?,
                };
                match r {
                    Flow::Break(Some(l)) if l == *label => Ok(Flow::Normal),
                    other => Ok(other),
                }
            }
            Stmt::Break(l) => Ok(Flow::Break(l.clone())),
            Stmt::Continue(l) => Ok(Flow::Continue(l.clone())),
            Stmt::Return(e, line) => {
                self.set_line(*line);
                let v = match e {
                    Some(e) => self.eval(e, cx)?,
                    None => Value::Null,
                };
                Ok(Flow::Return(v))
            }
            Stmt::Throw(e, line) => {
                self.set_line(*line);
                let v = self.eval(e, cx)?;
                match v {
                    Value::Ref(r) => Err(Unwind::Throw(r)),
                    _ => Err(self.npe()),
                }
            }
            Stmt::Try(t) => {
                let mut r = self.exec_block(&t.body, cx);
                if let Err(Unwind::Throw(ex)) = &r {
                    let ex = ex.clone();
                    let v = Value::Ref(ex.clone());
                    let hit = t.catches.iter().find(|c| c.types.iter().any(|ty| self.instance_of(&v, &Type::Class(*ty, Vec::new()))));
                    if let Some(c) = hit {
                        cx.locals[c.slot] = v;
                        r = self.exec_block(&c.body, cx);
                    }
                }
                match &t.finally {
                    Some(fin) if !matches!(r, Err(Unwind::Timeout)) => match self.exec_block(fin, cx)? {
                        Flow::Normal => r,
                        other => Ok(other),
                    },
                    _ => r,
                }
            }
            Stmt::Empty => Ok(Flow::Normal),
        }
    }

    /// Ok(true) continues the loop, Ok(false) leaves it normally,
    /// Err(flow) propagates.
    fn loop_step(flow: Flow, label: Option<&String>) -> Result<bool, Flow> {
        match flow {
            Flow::Normal | Flow::Continue(None) => Ok(true),
            Flow::Continue(Some(l)) if Some(&l) == label => Ok(true),
            Flow::Break(None) => Ok(false),
            Flow::Break(Some(l)) if Some(&l) == label => Ok(false),
            other => Err(other),
        }
    }

    fn exec_loop(&mut self, s: &Stmt, label: Option<&String>, cx: &mut Ctx) -> R<Flow> {
        macro_rules! step {
            ($flow:expr) => {
                match Self::loop_step($flow, label) {
                    Ok(true) => {}
                    Ok(false) => break,
                    Err(f) => return Ok(f),
                }
            };
        }
        match s {
            Stmt::While { cond, body } => loop {
                self.tick()?;
                if !self.eval(cond, cx)?.as_bool() {
                    break;
                }
                let f = self.exec(body, cx)?;
                step!(f);
            },
            Stmt::DoWhile { body, cond } => loop {
                self.tick()?;
                let f = self.exec(body, cx)?;
                step!(f);
                if !self.eval(cond, cx)?.as_bool() {
                    break;
                }
            },
            Stmt::For { init, cond, update, body } => {
                for i in init {
                    self.exec(i, cx)?;
                }
                loop {
                    self.tick()?;
                    if let Some(c) = cond {
                        if !self.eval(c, cx)?.as_bool() {
                            break;
                        }
                    }
                    let f = self.exec(body, cx)?;
                    step!(f);
                    for u in update {
                        self.eval(u, cx)?;
                    }
                }
            }
            Stmt::ForEach { slot, iterable, elem_conv, body } => {
                let it = self.eval(iterable, cx)?;
                let Value::Ref(r) = it else { return Err(self.npe()) };
                let mut cursor = 0usize;
                let snapshot: Option<(Vec<Value>, &RefCell<value::HashTable>, bool)> = match &r.kind {
                    ObjKind::Set(t, _) => Some((t.borrow().entries.iter().map(|e| e.key.clone()).collect(), t, true)),
                    ObjKind::MapView(m, keys) => match &m.kind {
                        ObjKind::Map(t) => Some((t.borrow().entries.iter().map(|e| if *keys { e.key.clone() } else { e.value.clone() }).collect(), t, true)),
                        _ => None,
                    },
                    _ => None,
                };
                let expected = match (&r.kind, &snapshot) {
                    (ObjKind::List { mods, .. }, _) => mods.get(),
                    (_, Some((_, t, _))) => t.borrow().mods,
                    _ => 0,
                };
                loop {
                    self.tick()?;
                    let v = match &r.kind {
                        ObjKind::Array { data, .. } => {
                            let d = data.borrow();
                            if cursor >= d.len() {
                                break;
                            }
                            d[cursor].clone()
                        }
                        ObjKind::List { items, mods, .. } => {
                            let len = items.borrow().len();
                            if cursor == len {
                                break;
                            }
                            if mods.get() != expected || cursor > len {
                                return Err(self.throw(Builtin::ConcurrentModificationException, None));
                            }
                            items.borrow()[cursor].clone()
                        }
                        _ => match &snapshot {
                            Some((items, t, _)) => {
                                if cursor >= items.len() {
                                    break;
                                }
                                if t.borrow().mods != expected {
                                    return Err(self.throw(Builtin::ConcurrentModificationException, None));
                                }
                                items[cursor].clone()
                            }
                            None => return Err(self.throw(Builtin::ClassCastException, Some("not iterable".into()))),
                        },
                    };
                    cursor += 1;
                    let v = match elem_conv {
                        Some(Type::Prim(p)) => {
                            let raw = match &v {
                                Value::Null => return Err(self.npe()),
                                Value::Ref(b) => match &b.kind {
                                    ObjKind::Boxed(_, inner) => inner.clone(),
                                    _ => v.clone(),
                                },
                                other => other.clone(),
                            };
                            value::convert(&raw, *p)
                        }
                        _ => v,
                    };
                    cx.locals[*slot] = v;
                    let f = self.exec(body, cx)?;
                    step!(f);
                }
            }
            _ => unreachable!(),
        }
        Ok(Flow::Normal)
    }

    // ---- expressions ----

    fn eval_args(&mut self, args: &[Expr], cx: &mut Ctx) -> R<Vec<Value>> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            out.push(self.eval(a, cx)?);
        }
        Ok(out)
    }

    fn field_of(&self, r: &Ref, class: usize, field: usize) -> Value {
        match &r.kind {
            ObjKind::Instance { fields, .. } => {
                let slot = self.prog.classes[class].slots[field].expect("instance field slot");
                fields.borrow()[slot].clone()
            }
            _ => Value::Null,
        }
    }

    fn place(&mut self, lv: &LValue, cx: &mut Ctx) -> R<Place> {
        Ok(match lv {
            LValue::Local(s) => Place::Local(*s),
            LValue::StaticField { class, field } => {
                self.ensure_init(*class)?;
                Place::Static(*class, *field)
            }
            LValue::Field { obj, class, field } => match self.eval(obj, cx)? {
                Value::Ref(r) => Place::Field(r, self.prog.classes[*class].slots[*field].expect("instance field slot")),
                _ => return Err(self.npe()),
            },
            LValue::Index { arr, index } => {
                let a = self.eval(arr, cx)?;
                let i = self.eval(index, cx)?.as_i32();
                let Value::Ref(r) = a else { return Err(self.npe()) };
                let len = match &r.kind {
                    ObjKind::Array { data, .. } => data.borrow().len(),
                    _ => 0,
                };
                if i < 0 || i as usize >= len {
                    return Err(self.throw(Builtin::ArrayIndexOutOfBoundsException, Some(format!("Index {i} out of bounds for length {len}"))));
                }
                Place::Index(r, i as usize)
            }
        })
    }

    fn load(&self, p: &Place, cx: &Ctx) -> Value {
        match p {
            Place::Local(s) => cx.locals[*s].clone(),
            Place::Static(c, f) => self.statics[*c][*f].clone(),
            Place::Field(r, slot) => match &r.kind {
                ObjKind::Instance { fields, .. } => fields.borrow()[*slot].clone(),
                _ => Value::Null,
            },
            Place::Index(r, i) => match &r.kind {
                ObjKind::Array { data, .. } => data.borrow()[*i].clone(),
                _ => Value::Null,
            },
        }
    }

    fn store(&mut self, p: &Place, v: Value, cx: &mut Ctx) -> R<()> {
        match p {
            Place::Local(s) => cx.locals[*s] = v,
            Place::Static(c, f) => self.statics[*c][*f] = v,
            Place::Field(r, slot) => {
                if let ObjKind::Instance { fields, .. } = &r.kind {
                    fields.borrow_mut()[*slot] = v;
                }
            }
            Place::Index(r, i) => {
                if let ObjKind::Array { elem, data } = &r.kind {
                    if elem.is_reference() && !v.is_null() && !self.instance_of(&v, elem) {
                        let name = match &v {
                            Value::Ref(o) => self.class_name_of(o),
                            _ => String::new(),
                        };
                        return Err(self.throw(Builtin::ArrayStoreException, Some(name)));
                    }
                    data.borrow_mut()[*i] = v;
                }
            }
        }
        Ok(())
    }

    fn unbox(&mut self, v: Value) -> R<Value> {
        match v {
            Value::Null => Err(self.npe()),
            Value::Ref(r) => match &r.kind {
                ObjKind::Boxed(_, inner) => Ok(inner.clone()),
                _ => Ok(Value::Ref(r)),
            },
            other => Ok(other),
        }
    }

    fn arith(&mut self, op: BinOp, operand: Prim, a: &Value, b: &Value) -> R<Value> {
        value::binary(op, operand, a, b).map_err(|_| self.throw(Builtin::ArithmeticException, Some("/ by zero".into())))
    }

    fn eval(&mut self, e: &Expr, cx: &mut Ctx) -> R<Value> {
        match &e.kind {
            ExprKind::Const(c) => Ok(match c {
                crate::ir::Const::Str(s) => self.intern(s),
                other => Value::from_const(other).unwrap_or(Value::Null),
            }),
            ExprKind::Local(s) => Ok(cx.locals[*s].clone()),
            ExprKind::This => Ok(cx.this.clone()),
            ExprKind::StaticField { class, field } => {
                self.ensure_init(*class)?;
                Ok(self.statics[*class][*field].clone())
            }
            ExprKind::Field { obj, class, field } => {
                let o = self.eval(obj, cx)?;
                self.set_line(e.line);
                match o {
                    Value::Ref(r) => Ok(self.field_of(&r, *class, *field)),
                    _ => Err(self.npe()),
                }
            }
            ExprKind::ArrayLength(a) => {
                let v = self.eval(a, cx)?;
                self.set_line(e.line);
                match &v {
                    Value::Ref(r) => match &r.kind {
                        ObjKind::Array { data, .. } => Ok(Value::Int(data.borrow().len() as i32)),
                        _ => Ok(Value::Int(0)),
                    },
                    _ => Err(self.npe()),
                }
            }
            ExprKind::Index { arr, index } => {
                let a = self.eval(arr, cx)?;
                let i = self.eval(index, cx)?.as_i32();
                self.set_line(e.line);
                let Value::Ref(r) = a else { return Err(self.npe()) };
                let ObjKind::Array { data, .. } = &r.kind else { return Ok(Value::Null) };
                let d = data.borrow();
                if i < 0 || i as usize >= d.len() {
                    let len = d.len();
                    drop(d);
                    return Err(self.throw(Builtin::ArrayIndexOutOfBoundsException, Some(format!("Index {i} out of bounds for length {len}"))));
                }
                Ok(d[i as usize].clone())
            }
            ExprKind::Assign { target, value } => {
                let p = self.place(target, cx)?;
                let v = self.eval(value, cx)?;
                self.set_line(e.line);
                self.store(&p, v.clone(), cx)?;
                Ok(v)
            }
            ExprKind::Compound { target, op, value, op_type, target_ty, concat } => {
                let p = self.place(target, cx)?;
                let old = self.load(&p, cx);
                let rhs = self.eval(value, cx)?;
                self.set_line(e.line);
                let result = if *concat {
                    let mut s = self.to_jstring16(&old)?;
                    s.extend(self.to_jstring16(&rhs)?);
                    self.charge(s.len() as u64)?;
                    self.string16(s)
                } else {
                    let boxed = target_ty.prim().is_none();
                    let tp = target_ty.unboxed().unwrap_or(*op_type);
                    let o = if boxed { self.unbox(old)? } else { old };
                    let o = value::convert(&o, *op_type);
                    let r = self.arith(*op, *op_type, &o, &rhs)?;
                    let r = value::convert(&r, tp);
                    if boxed {
                        self.box_value(tp, r)
                    } else {
                        r
                    }
                };
                self.store(&p, result.clone(), cx)?;
                Ok(result)
            }
            ExprKind::IncDec { target, delta, prefix, prim, boxed } => {
                let p = self.place(target, cx)?;
                let old = self.load(&p, cx);
                self.set_line(e.line);
                let raw = if *boxed { self.unbox(old.clone())? } else { old.clone() };
                let wide = match prim {
                    Prim::Long => Prim::Long,
                    Prim::Float => Prim::Float,
                    Prim::Double => Prim::Double,
                    _ => Prim::Int,
                };
                let a = value::convert(&raw, wide);
                let one = value::convert(&Value::Int(*delta as i32), wide);
                let n = value::convert(&self.arith(BinOp::Add, wide, &a, &one)?, *prim);
                let stored = if *boxed { self.box_value(*prim, n.clone()) } else { n.clone() };
                self.store(&p, stored.clone(), cx)?;
                Ok(if *prefix {
                    stored
                } else if *boxed {
                    old
                } else {
                    raw
                })
            }
            ExprKind::Unary { op, operand } => {
                let v = self.eval(operand, cx)?;
                let p = operand.ty.prim().unwrap_or(Prim::Int);
                Ok(value::unary(*op, p, &v))
            }
            ExprKind::Binary { op, lhs, rhs, operand } => {
                let a = self.eval(lhs, cx)?;
                let b = self.eval(rhs, cx)?;
                self.set_line(e.line);
                self.arith(*op, *operand, &a, &b)
            }
            ExprKind::LogicalAnd(a, b) => Ok(Value::Bool(self.eval(a, cx)?.as_bool() && self.eval(b, cx)?.as_bool())),
            ExprKind::LogicalOr(a, b) => Ok(Value::Bool(self.eval(a, cx)?.as_bool() || self.eval(b, cx)?.as_bool())),
            ExprKind::RefEq { lhs, rhs, negate } => {
                let a = self.eval(lhs, cx)?;
                let b = self.eval(rhs, cx)?;
                Ok(Value::Bool(a.same(&b) != *negate))
            }
            ExprKind::Concat(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    let v = self.eval(p, cx)?;
                    self.set_line(e.line);
                    out.extend(self.to_jstring16(&v)?);
                }
                self.charge(out.len() as u64)?;
                Ok(self.string16(out))
            }
            ExprKind::Cond { cond, then, els } => {
                if self.eval(cond, cx)?.as_bool() {
                    self.eval(then, cx)
                } else {
                    self.eval(els, cx)
                }
            }
            ExprKind::Convert { expr, conv } => {
                let v = self.eval(expr, cx)?;
                self.set_line(e.line);
                match conv {
                    crate::ir::Conversion::Prim(_, to) => Ok(value::convert(&v, *to)),
                    crate::ir::Conversion::Box(p) => Ok(self.box_value(*p, v)),
                    crate::ir::Conversion::Unbox(_) => self.unbox(v),
                    crate::ir::Conversion::CheckCast(t) => {
                        if v.is_null() || self.instance_of(&v, t) {
                            Ok(v)
                        } else {
                            let from = match &v {
                                Value::Ref(r) => self.class_name_of(r),
                                _ => String::new(),
                            };
                            let to = self.type_name(t);
                            Err(self.throw(Builtin::ClassCastException, Some(format!("class {from} cannot be cast to class {to}"))))
                        }
                    }
                }
            }
            ExprKind::InstanceOf { expr, target } => {
                let v = self.eval(expr, cx)?;
                Ok(Value::Bool(self.instance_of(&v, target)))
            }
            ExprKind::CallStatic { class, method, args } => {
                let vals = self.eval_args(args, cx)?;
                self.set_line(e.line);
                self.ensure_init(*class)?;
                self.invoke(*class, *method, Value::Null, vals)
            }
            ExprKind::CallVirtual { recv, key, args, .. } => {
                let r = self.eval(recv, cx)?;
                let vals = self.eval_args(args, cx)?;
                self.set_line(e.line);
                self.call_virtual(r, key, vals)
            }
            ExprKind::CallSpecial { recv, class, method, args } => {
                let r = self.eval(recv, cx)?;
                let vals = self.eval_args(args, cx)?;
                self.set_line(e.line);
                if r.is_null() {
                    return Err(self.npe());
                }
                self.invoke(*class, *method, r, vals)
            }
            ExprKind::CallBuiltin { method, recv, args, special } => {
                let r = match recv {
                    Some(x) => Some(self.eval(x, cx)?),
                    None => None,
                };
                let vals = self.eval_args(args, cx)?;
                self.set_line(e.line);
                if let Some(rv) = &r {
                    if rv.is_null() {
                        return Err(self.npe());
                    }
                    if !*special {
                        if let Some((c, m)) = self.user_override(rv, *method) {
                            return self.invoke(c, m, rv.clone(), vals);
                        }
                    }
                }
                self.call_lib(*method, r, vals, &e.ty)
            }
            ExprKind::New { class, ctor, args } => {
                let vals = self.eval_args(args, cx)?;
                self.set_line(e.line);
                self.instantiate(*class, *ctor, vals)
            }
            ExprKind::NewBuiltin { class, args, method } => {
                let vals = self.eval_args(args, cx)?;
                self.set_line(e.line);
                self.construct_lib(*class, *method, vals)
            }
            ExprKind::NewArray { elem, dims, extra_dims } => {
                let mut ns = Vec::new();
                for d in dims {
                    ns.push(self.eval(d, cx)?.as_i32());
                }
                self.set_line(e.line);
                if let Some(n) = ns.iter().find(|n| **n < 0) {
                    return Err(self.throw(Builtin::NegativeArraySizeException, Some(n.to_string())));
                }
                self.make_array(elem, &ns, *extra_dims)
            }
            ExprKind::ArrayLit { elem, elems } => {
                let vals = self.eval_args(elems, cx)?;
                self.charge(vals.len() as u64)?;
                Ok(self.new_array(elem.clone(), vals))
            }
        }
    }

    fn make_array(&mut self, base: &Type, dims: &[i32], extra: usize) -> R<Value> {
        let mut elem = base.clone();
        for _ in 0..dims.len() - 1 + extra {
            elem = Type::Array(Box::new(elem));
        }
        let n = dims[0] as usize;
        self.charge(n as u64)?;
        let data = if dims.len() == 1 {
            vec![Value::default_for(&elem); n]
        } else {
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push(self.make_array(base, &dims[1..], extra)?);
            }
            v
        };
        Ok(self.new_array(elem, data))
    }

    fn construct_lib(&mut self, class: Builtin, method: BuiltinMethod, args: Vec<Value>) -> R<Value> {
        use BuiltinMethod as M;
        if class.is_throwable() {
            let r = self.throwable(class, None);
            self.init_throwable(&r, method, &args)?;
            return Ok(Value::Ref(r));
        }
        Ok(match method {
            M::ObjNew => Value::Ref(self.alloc_obj(ObjKind::Plain)),
            M::StrNew => self.string16(Vec::new()),
            M::StrNewStr => {
                if args[0].is_null() {
                    return Err(self.npe());
                }
                let s = self.str_units(&args[0]);
                self.string16(s)
            }
            M::StrNewChars => {
                let s = self.char_array(&args[0])?;
                self.string16(s)
            }
            M::SbNew | M::SbNewCap => {
                if let (M::SbNewCap, Some(n)) = (method, args.first()) {
                    if n.as_i32() < 0 {
                        return Err(self.throw(Builtin::NegativeArraySizeException, Some(n.as_i32().to_string())));
                    }
                }
                Value::Ref(self.alloc_obj(ObjKind::Builder(RefCell::new(Vec::new()))))
            }
            M::SbNewStr => {
                if args[0].is_null() {
                    return Err(self.npe());
                }
                let s = self.str_units(&args[0]);
                Value::Ref(self.alloc_obj(ObjKind::Builder(RefCell::new(s))))
            }
            M::ArrayListNew => self.new_list(Vec::new(), ListMode::Mutable),
            M::ArrayListNewCap => {
                if args[0].as_i32() < 0 {
                    return Err(self.throw(Builtin::IllegalArgumentException, Some(format!("Illegal Capacity: {}", args[0].as_i32()))));
                }
                self.new_list(Vec::new(), ListMode::Mutable)
            }
            M::ArrayListNewColl => {
                let items = self.collection_items(&args[0])?;
                self.new_list(items, ListMode::Mutable)
            }
            M::HashSetNew => Value::Ref(self.alloc_obj(ObjKind::Set(RefCell::new(value::HashTable::default()), false))),
            M::HashSetNewColl => {
                let items = self.collection_items(&args[0])?;
                let mut table = value::HashTable::default();
                let want = ((items.len() as f64 / 0.75) as usize + 1).max(16);
                table.capacity = want.next_power_of_two();
                let set = self.alloc_obj(ObjKind::Set(RefCell::new(table), false));
                for it in items {
                    self.set_add(&set, it)?;
                }
                Value::Ref(set)
            }
            M::HashMapNew => Value::Ref(self.alloc_obj(ObjKind::Map(RefCell::new(value::HashTable::default())))),
            _ => return Err(self.throw(Builtin::UnsupportedOperationException, Some(format!("{:?}", method)))),
        })
    }

    /// Runs a library method inside its own stack frame.
    fn call_lib(&mut self, m: BuiltinMethod, recv: Option<Value>, args: Vec<Value>, ret: &Type) -> R<Value> {
        let e = m.entry();
        let pass_through = matches!(m, BuiltinMethod::SysOut | BuiltinMethod::SysErr);
        if pass_through {
            return self.lib(m, recv, args, ret);
        }
        let owner = match (&recv, e.kind) {
            (Some(Value::Ref(r)), Kind::Instance) => self.builtin_of(r).filter(|b| b.is_subtype_of(e.owner)).unwrap_or(e.owner),
            _ => e.owner,
        };
        self.push_lib_frame(owner, e.name)?;
        let r = self.lib(m, recv, args, ret);
        self.stack.pop();
        r
    }
}

/// Runs `f` on a thread with a deep stack; the interpreter recurses once
/// per Java frame.
pub fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| std::thread::Builder::new().stack_size(512 << 20).spawn_scoped(s, f).expect("spawn interpreter thread").join().expect("interpreter thread panicked"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MainResult {
    pub stdout: String,
    pub stderr: String,
    /// Stack trace of an uncaught exception.
    pub uncaught: Option<String>,
    pub timed_out: bool,
}

/// Runs `public static void main(String[])` of the class with `binary_name`.
pub fn run_main(prog: &Program, binary_name: &str, opts: Options, deadline: Option<Instant>) -> Option<MainResult> {
    let mut it = Interp::new(prog, opts);
    let c = it.class_index(binary_name)?;
    let string_arr = Type::Array(Box::new(Type::string()));
    let m = prog.classes[c].methods.iter().position(|m| m.is_static && m.name == "main" && m.params == [string_arr.clone()])?;
    it.set_deadline(deadline);
    let args = it.new_array(Type::string(), Vec::new());
    let mut res = MainResult { stdout: String::new(), stderr: String::new(), uncaught: None, timed_out: false };
    match it.ensure_init(c).and_then(|_| it.invoke(c, m, Value::Null, vec![args])) {
        Ok(_) => {}
        Err(Unwind::Throw(ex)) => {
            it.reset_stack();
            it.set_deadline(None);
            let trace = it.stack_trace(&ex).unwrap_or_default();
            res.uncaught = Some(format!("Exception in thread \"main\" {trace}"));
        }
        Err(Unwind::Timeout) => res.timed_out = true,
    }
    res.stdout = std::mem::take(&mut it.stdout);
    res.stderr = std::mem::take(&mut it.stderr);
    Some(res)
}
