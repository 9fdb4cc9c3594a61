//! Checked program representation the interpreter executes.
//!
//! All implicit conversions (promotion, boxing, widening) are explicit
//! `Convert` nodes, locals are numbered slots, and every call names its
//! resolved target.

use crate::builtins::BuiltinMethod;
use crate::types::{Builtin, ClassRef, Prim, Type};

pub type Line = u32;

#[derive(Debug, Clone)]
pub struct Program {
    pub files: Vec<SourceFile>,
    pub classes: Vec<Class>,
}

#[derive(Debug, Clone)]
pub struct SourceFile {
    /// Path the file was loaded from; used in stack traces.
    pub path: String,
    /// Bare file name.
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct Class {
    pub name: String,
    /// Binary name used in stack traces (`pkg.Outer$Inner`).
    pub binary_name: String,
    pub file: usize,
    pub superclass: ClassRef,
    pub interfaces: Vec<ClassRef>,
    pub is_interface: bool,
    pub is_abstract: bool,
    pub fields: Vec<Field>,
    pub methods: Vec<Method>,
    pub ctors: Vec<Ctor>,
    /// Static field initializers and static blocks, in textual order.
    pub static_init: Body,
    /// Instance field initializers and instance blocks, in textual order.
    pub instance_init: Body,
    pub line: Line,
    /// Instance field slot for each entry of `fields` (None for statics),
    /// counting inherited fields first.
    pub slots: Vec<Option<usize>>,
    pub instance_size: usize,
}

#[derive(Debug, Clone)]
pub struct Field {
    pub name: String,
    pub ty: Type,
    pub is_static: bool,
    pub is_final: bool,
    /// Compile-time constant value for `static final` primitives/strings.
    pub constant: Option<Const>,
}

#[derive(Debug, Clone, Default)]
pub struct Body {
    pub stmts: Vec<Stmt>,
    pub locals: usize,
}

#[derive(Debug, Clone)]
pub struct Method {
    pub name: String,
    pub params: Vec<Type>,
    pub ret: Type,
    pub is_static: bool,
    pub is_abstract: bool,
    pub body: Option<Body>,
    pub line: Line,
    pub annotations: Vec<Annotation>,
}

impl Method {
    pub fn signature_key(&self) -> String {
        signature_key(&self.name, &self.params)
    }
}

pub fn signature_key(name: &str, params: &[Type]) -> String {
    let mut s = String::from(name);
    s.push('(');
    for p in params {
        s.push_str(&erasure_key(p));
        s.push(';');
    }
    s.push(')');
    s
}

fn erasure_key(t: &Type) -> String {
    match t {
        Type::Prim(p) => p.name().to_string(),
        Type::Void => "void".into(),
        Type::Null => "null".into(),
        Type::Class(ClassRef::Builtin(b), _) => b.info().fqn.to_string(),
        Type::Class(ClassRef::User(i), _) => format!("user#{i}"),
        Type::Array(e) => format!("{}[]", erasure_key(e)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Annotation {
    Test { expected: Option<ClassRef>, timeout_ms: Option<u64> },
    Before,
    After,
    BeforeClass,
    AfterClass,
    Other(String),
}

#[derive(Debug, Clone)]
pub struct Ctor {
    pub params: Vec<Type>,
    /// Runs before `body`. Unless it is a `this(...)` call, instance
    /// initializers run between this call and `body`.
    pub call: CtorCall,
    pub body: Body,
    pub line: Line,
}

#[derive(Debug, Clone)]
pub enum CtorCall {
    This { ctor: usize, args: Vec<Expr> },
    Super { class: usize, ctor: usize, args: Vec<Expr> },
    /// Superclass is a library class (`Object` or an exception type).
    SuperBuiltin { method: Option<BuiltinMethod>, args: Vec<Expr> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Const {
    Bool(bool),
    Char(u16),
    Int(i32),
    Long(i64),
    Float(f32),
    Double(f64),
    Str(String),
    Null,
}

impl Const {
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Const::Char(c) => Some(*c as i64),
            Const::Int(i) => Some(*i as i64),
            Const::Long(l) => Some(*l),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Local { slot: usize, init: Option<Expr> },
    Expr(Expr),
    If { cond: Expr, then: Box<Stmt>, els: Option<Box<Stmt>> },
    While { cond: Expr, body: Box<Stmt> },
    DoWhile { body: Box<Stmt>, cond: Expr },
    For { init: Vec<Stmt>, cond: Option<Expr>, update: Vec<Expr>, body: Box<Stmt> },
    ForEach { slot: usize, iterable: Expr, elem_conv: Option<Type>, body: Box<Stmt> },
    Switch(Box<Switch>),
    Block(Vec<Stmt>),
    Labeled { label: String, body: Box<Stmt> },
    Break(Option<String>),
    Continue(Option<String>),
    Return(Option<Expr>, Line),
    Throw(Expr, Line),
    Try(Box<Try>),
    Empty,
}

#[derive(Debug, Clone)]
pub struct Switch {
    pub selector: Expr,
    pub kind: SwitchKind,
    /// Each group: the constants it matches, whether it carries `default`,
    /// and its statements. Colon-style groups fall through; arrow groups do not.
    pub groups: Vec<SwitchGroup>,
    pub arrow: bool,
    pub line: Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchKind {
    Integral,
    String,
}

#[derive(Debug, Clone)]
pub struct SwitchGroup {
    pub labels: Vec<Const>,
    pub is_default: bool,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub struct Try {
    pub body: Vec<Stmt>,
    pub catches: Vec<Catch>,
    pub finally: Option<Vec<Stmt>>,
}

#[derive(Debug, Clone)]
pub struct Catch {
    pub types: Vec<ClassRef>,
    pub slot: usize,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub ty: Type,
    pub line: Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Shl,
    Shr,
    UShr,
    And,
    Or,
    Xor,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl BinOp {
    pub fn from_token(tok: &str) -> Option<BinOp> {
        Some(match tok {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Rem,
            "<<" => BinOp::Shl,
            ">>" => BinOp::Shr,
            ">>>" => BinOp::UShr,
            "&" => BinOp::And,
            "|" => BinOp::Or,
            "^" => BinOp::Xor,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            _ => return None,
        })
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne)
    }

    pub fn is_shift(self) -> bool {
        matches!(self, BinOp::Shl | BinOp::Shr | BinOp::UShr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
    BitNot,
    Plus,
}

#[derive(Debug, Clone)]
pub enum LValue {
    Local(usize),
    StaticField { class: usize, field: usize },
    Field { obj: Box<Expr>, class: usize, field: usize },
    Index { arr: Box<Expr>, index: Box<Expr> },
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Const(Const),
    Local(usize),
    This,
    StaticField { class: usize, field: usize },
    Field { obj: Box<Expr>, class: usize, field: usize },
    ArrayLength(Box<Expr>),
    Index { arr: Box<Expr>, index: Box<Expr> },
    Assign { target: LValue, value: Box<Expr> },
    /// `target op= value`; arithmetic happens in `op_type`, then the result is
    /// narrowed back to the target type.
    Compound { target: LValue, op: BinOp, value: Box<Expr>, op_type: Prim, target_ty: Type, concat: bool },
    IncDec { target: LValue, delta: i8, prefix: bool, prim: Prim, boxed: bool },
    Unary { op: UnOp, operand: Box<Expr> },
    /// Numeric/boolean binary operation on operands already promoted to `operand`.
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, operand: Prim },
    LogicalAnd(Box<Expr>, Box<Expr>),
    LogicalOr(Box<Expr>, Box<Expr>),
    RefEq { lhs: Box<Expr>, rhs: Box<Expr>, negate: bool },
    Concat(Vec<Expr>),
    Cond { cond: Box<Expr>, then: Box<Expr>, els: Box<Expr> },
    Convert { expr: Box<Expr>, conv: Conversion },
    InstanceOf { expr: Box<Expr>, target: Type },
    CallStatic { class: usize, method: usize, args: Vec<Expr> },
    CallVirtual { recv: Box<Expr>, key: String, static_class: ClassRef, args: Vec<Expr> },
    CallSpecial { recv: Box<Expr>, class: usize, method: usize, args: Vec<Expr> },
    /// `special` is set for `super.m()` calls, which must not dispatch to
    /// a user override.
    CallBuiltin { method: BuiltinMethod, recv: Option<Box<Expr>>, args: Vec<Expr>, special: bool },
    New { class: usize, ctor: usize, args: Vec<Expr> },
    NewBuiltin { class: Builtin, args: Vec<Expr>, method: BuiltinMethod },
    NewArray { elem: Type, dims: Vec<Expr>, extra_dims: usize },
    ArrayLit { elem: Type, elems: Vec<Expr> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Conversion {
    /// Primitive widening or narrowing cast.
    Prim(Prim, Prim),
    Box(Prim),
    Unbox(Prim),
    /// Checked reference cast.
    CheckCast(Type),
}
