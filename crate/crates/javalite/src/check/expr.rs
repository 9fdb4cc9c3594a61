//! Expression typing, conversions, overload resolution and constant folding.

use metaprobe_syntax::Node;

use super::body::Lowerer;
use super::{builtin_cands, kids, Callee, Cand, Checker};
use crate::builtins::{self, StaticField, P};
use crate::ir::{BinOp, Const, Conversion, Expr, ExprKind, LValue, UnOp};
use crate::jfmt;
use crate::types::{Builtin, ClassRef, Prim, Type};
use crate::value::{self, Value};

// ---- constants ----

pub(crate) fn const_prim(c: &Const) -> Option<Prim> {
    Some(match c {
        Const::Bool(_) => Prim::Boolean,
        Const::Char(_) => Prim::Char,
        Const::Int(_) => Prim::Int,
        Const::Long(_) => Prim::Long,
        Const::Float(_) => Prim::Float,
        Const::Double(_) => Prim::Double,
        _ => return None,
    })
}

/// Java's string conversion of a constant.
pub(crate) fn const_str(c: &Const) -> String {
    match c {
        Const::Bool(b) => b.to_string(),
        Const::Char(ch) => jfmt::char(*ch),
        Const::Int(i) => i.to_string(),
        Const::Long(l) => l.to_string(),
        Const::Float(f) => jfmt::float(*f),
        Const::Double(d) => jfmt::double(*d),
        Const::Str(s) => s.clone(),
        Const::Null => "null".into(),
    }
}

fn convert_const(c: &Const, to: Prim) -> Option<Const> {
    let v = Value::from_const(c)?;
    value::convert(&v, to).to_const(to)
}

pub(crate) fn fold_binary(op: BinOp, operand: Prim, a: &Const, b: &Const) -> Option<Const> {
    let a = Value::from_const(&convert_const(a, operand)?)?;
    let b = Value::from_const(&convert_const(b, operand)?)?;
    let r = value::binary(op, operand, &a, &b).ok()?;
    let res_prim = if op.is_comparison() { Prim::Boolean } else { operand };
    r.to_const(res_prim)
}

pub(crate) fn promote(a: Prim, b: Prim) -> Prim {
    if a == Prim::Double || b == Prim::Double {
        Prim::Double
    } else if a == Prim::Float || b == Prim::Float {
        Prim::Float
    } else if a == Prim::Long || b == Prim::Long {
        Prim::Long
    } else {
        Prim::Int
    }
}

fn unary_promote(p: Prim) -> Prim {
    match p {
        Prim::Byte | Prim::Short | Prim::Char => Prim::Int,
        other => other,
    }
}

fn fits(v: i64, p: Prim) -> bool {
    match p {
        Prim::Byte => (i8::MIN as i64..=i8::MAX as i64).contains(&v),
        Prim::Short => (i16::MIN as i64..=i16::MAX as i64).contains(&v),
        Prim::Char => (0..=u16::MAX as i64).contains(&v),
        Prim::Int => (i32::MIN as i64..=i32::MAX as i64).contains(&v),
        _ => true,
    }
}

/// Converts a field initializer constant to the field's declared type.
pub(crate) fn const_assign(c: &Const, ty: &Type) -> Option<Const> {
    match (c, ty) {
        (Const::Str(_), t) if t.is_string() => Some(c.clone()),
        (_, Type::Prim(p)) => {
            let from = const_prim(c)?;
            if from.widens_to(*p) || (matches!(from, Prim::Int | Prim::Char | Prim::Short | Prim::Byte) && matches!(p, Prim::Byte | Prim::Short | Prim::Char) && fits(c.as_i64()?, *p)) {
                convert_const(c, *p)
            } else {
                None
            }
        }
        _ => None,
    }
}

pub(crate) enum LitError {
    TooLarge,
    Unsupported(&'static str),
    Bad,
}

pub(crate) fn unescape(s: &str) -> Option<Vec<u16>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c != '\\' {
            let mut buf = [0u16; 2];
            out.extend_from_slice(c.encode_utf16(&mut buf));
            i += 1;
            continue;
        }
        i += 1;
        let e = *chars.get(i)?;
        i += 1;
        let unit: u16 = match e {
            'n' => 10,
            't' => 9,
            'b' => 8,
            'r' => 13,
            'f' => 12,
            's' => 32,
            '0'..='7' => {
                let mut v = e.to_digit(8)?;
                let max = if e <= '3' { 2 } else { 1 };
                for _ in 0..max {
                    match chars.get(i).and_then(|d| d.to_digit(8)) {
                        Some(d) => {
                            v = v * 8 + d;
                            i += 1;
                        }
                        None => break,
                    }
                }
                v as u16
            }
            'u' => {
                while chars.get(i) == Some(&'u') {
                    i += 1;
                }
                let hex: String = chars.get(i..i + 4)?.iter().collect();
                i += 4;
                u16::from_str_radix(&hex, 16).ok()?
            }
            '\\' | '\'' | '"' => e as u16,
            _ => return None,
        };
        out.push(unit);
    }
    Some(out)
}

/// Parses a literal token. `negated` is set when the literal is the
/// operand of unary minus, which admits `2147483648`.
pub(crate) fn literal(kind: &str, text: &str, negated: bool) -> Result<Const, LitError> {
    let clean: String = text.chars().filter(|c| *c != '_').collect();
    match kind {
        "decimal_integer_literal" | "hex_integer_literal" | "octal_integer_literal" | "binary_integer_literal" => {
            let long = clean.ends_with('L') || clean.ends_with('l');
            let digits = clean.trim_end_matches(['L', 'l']);
            let (radix, body) = match kind {
                "hex_integer_literal" => (16, &digits[2..]),
                "binary_integer_literal" => (2, &digits[2..]),
                "octal_integer_literal" => (8, digits.trim_start_matches('0')),
                _ => (10, digits),
            };
            let body = if body.is_empty() { "0" } else { body };
            let v = u128::from_str_radix(body, radix).map_err(|_| LitError::TooLarge)?;
            if long {
                if radix == 10 {
                    if v == 1u128 << 63 && negated {
                        return Ok(Const::Long(i64::MIN));
                    }
                    if v > i64::MAX as u128 {
                        return Err(LitError::TooLarge);
                    }
                    Ok(Const::Long(v as i64))
                } else if v > u64::MAX as u128 {
                    Err(LitError::TooLarge)
                } else {
                    Ok(Const::Long(v as u64 as i64))
                }
            } else if radix == 10 {
                if v == 1u128 << 31 && negated {
                    return Ok(Const::Int(i32::MIN));
                }
                if v > i32::MAX as u128 {
                    return Err(LitError::TooLarge);
                }
                Ok(Const::Int(v as i32))
            } else if v > u32::MAX as u128 {
                Err(LitError::TooLarge)
            } else {
                Ok(Const::Int(v as u32 as i32))
            }
        }
        "decimal_floating_point_literal" => {
            let is_float = clean.ends_with(['f', 'F']);
            let body = clean.trim_end_matches(['f', 'F', 'd', 'D']);
            if is_float {
                body.parse::<f32>().map(Const::Float).map_err(|_| LitError::Bad)
            } else {
                body.parse::<f64>().map(Const::Double).map_err(|_| LitError::Bad)
            }
        }
        "hex_floating_point_literal" => Err(LitError::Unsupported("hexadecimal floating-point literals")),
        "true" => Ok(Const::Bool(true)),
        "false" => Ok(Const::Bool(false)),
        "null_literal" => Ok(Const::Null),
        "character_literal" => {
            let inner = text.strip_prefix('\'').and_then(|t| t.strip_suffix('\'')).ok_or(LitError::Bad)?;
            let units = unescape(inner).ok_or(LitError::Bad)?;
            if units.len() != 1 {
                return Err(LitError::Bad);
            }
            Ok(Const::Char(units[0]))
        }
        "string_literal" => {
            if text.starts_with("\"\"\"") {
                return Err(LitError::Unsupported("text blocks"));
            }
            let inner = text.strip_prefix('"').and_then(|t| t.strip_suffix('"')).ok_or(LitError::Bad)?;
            let units = unescape(inner).ok_or(LitError::Bad)?;
            Ok(Const::Str(jfmt::from_utf16(&units)))
        }
        _ => Err(LitError::Bad),
    }
}

fn is_literal_kind(k: &str) -> bool {
    matches!(
        k,
        "decimal_integer_literal"
            | "hex_integer_literal"
            | "octal_integer_literal"
            | "binary_integer_literal"
            | "decimal_floating_point_literal"
            | "hex_floating_point_literal"
            | "true"
            | "false"
            | "null_literal"
            | "character_literal"
            | "string_literal"
    )
}

/// Evaluates a field initializer as a constant expression without
/// lowering it. Used before bodies are checked so constants can be
/// inlined wherever they are referenced.
pub(crate) fn const_eval(ck: &Checker<'_>, n: Node<'_>, f: usize, c: usize, depth: usize) -> Option<Const> {
    if depth > 64 {
        return None;
    }
    let ev = |m: Node<'_>| const_eval(ck, m, f, c, depth + 1);
    let k = n.kind();
    if is_literal_kind(k) {
        return literal(k, ck.text(f, n), false).ok().filter(|c| *c != Const::Null);
    }
    match k {
        "parenthesized_expression" => ev(kids(n).next()?),
        "unary_expression" => {
            let op = n.child_by_field_name("operator")?.kind();
            let operand = n.child_by_field_name("operand")?;
            if op == "-" && is_literal_kind(operand.kind()) {
                if let Ok(v) = literal(operand.kind(), ck.text(f, operand), true) {
                    if matches!(v, Const::Int(i32::MIN) | Const::Long(i64::MIN)) {
                        return Some(v);
                    }
                }
            }
            let v = ev(operand)?;
            let p = const_prim(&v)?;
            let (uop, prim) = match op {
                "-" => (UnOp::Neg, unary_promote(p)),
                "+" => (UnOp::Plus, unary_promote(p)),
                "~" => (UnOp::BitNot, unary_promote(p)),
                "!" => (UnOp::Not, Prim::Boolean),
                _ => return None,
            };
            let vv = Value::from_const(&convert_const(&v, prim)?)?;
            value::unary(uop, prim, &vv).to_const(prim)
        }
        "binary_expression" => {
            let op = n.child_by_field_name("operator")?.kind();
            let a = ev(n.child_by_field_name("left")?)?;
            let b = ev(n.child_by_field_name("right")?)?;
            match op {
                "&&" => Some(Const::Bool(matches!(a, Const::Bool(true)) && matches!(b, Const::Bool(true)))),
                "||" => Some(Const::Bool(matches!(a, Const::Bool(true)) || matches!(b, Const::Bool(true)))),
                "+" if matches!(a, Const::Str(_)) || matches!(b, Const::Str(_)) => Some(Const::Str(const_str(&a) + &const_str(&b))),
                _ => {
                    let bop = BinOp::from_token(op)?;
                    let (pa, pb) = (const_prim(&a)?, const_prim(&b)?);
                    let operand = if pa == Prim::Boolean && pb == Prim::Boolean {
                        Prim::Boolean
                    } else if bop.is_shift() {
                        unary_promote(pa)
                    } else {
                        promote(pa, pb)
                    };
                    fold_binary(bop, operand, &a, &b)
                }
            }
        }
        "ternary_expression" => {
            let cond = ev(n.child_by_field_name("condition")?)?;
            let a = ev(n.child_by_field_name("consequence")?)?;
            let b = ev(n.child_by_field_name("alternative")?)?;
            match cond {
                Const::Bool(true) => Some(a),
                Const::Bool(false) => Some(b),
                _ => None,
            }
        }
        "cast_expression" => {
            let t = n.child_by_field_name("type")?;
            let v = ev(n.child_by_field_name("value")?)?;
            match t.kind() {
                "integral_type" | "floating_point_type" | "boolean_type" => convert_const(&v, Prim::from_name(ck.text(f, t))?),
                "type_identifier" if ck.text(f, t) == "String" && matches!(v, Const::Str(_)) => Some(v),
                _ => None,
            }
        }
        "identifier" => {
            let name = ck.text(f, n);
            let mut cur = Some(c);
            while let Some(ci) = cur {
                if let Some((owner, fi)) = find_field(ck, ci, name) {
                    return ck.classes[owner].fields[fi].constant.clone();
                }
                cur = ck.classes[ci].outer;
            }
            None
        }
        "field_access" => {
            let obj = n.child_by_field_name("object")?;
            let field = ck.text(f, n.child_by_field_name("field")?);
            if !matches!(obj.kind(), "identifier" | "scoped_identifier" | "field_access") {
                return None;
            }
            let name = ck.text(f, obj).split_whitespace().collect::<String>();
            let r = if name.contains('.') { ck.class_by_fqn_public(&name) } else { ck.lookup_type_name(&name, f, Some(c)) }?;
            match r {
                ClassRef::User(i) => {
                    let (owner, fi) = find_field(ck, i, field)?;
                    ck.classes[owner].fields[fi].constant.clone()
                }
                ClassRef::Builtin(b) => match builtins::static_field(b, field)? {
                    StaticField::Const(_, v) => Some(v),
                    _ => None,
                },
            }
        }
        _ => None,
    }
}

/// Field `name` visible in class `c` (own, inherited, or from an
/// implemented interface).
pub(crate) fn find_field(ck: &Checker<'_>, c: usize, name: &str) -> Option<(usize, usize)> {
    let mut stack = vec![ClassRef::User(c)];
    let mut seen = Vec::new();
    while let Some(r) = stack.pop() {
        let ClassRef::User(i) = r else { continue };
        if seen.contains(&i) {
            continue;
        }
        seen.push(i);
        if let Some(fi) = ck.classes[i].fields.iter().position(|f| f.name == name) {
            return Some((i, fi));
        }
        stack.extend(ck.classes[i].interfaces.iter().rev().copied());
        stack.push(ck.classes[i].superclass);
    }
    None
}

impl Checker<'_> {
    pub(crate) fn class_by_fqn_public(&self, fqn: &str) -> Option<ClassRef> {
        let r = self.class_by_fqn(fqn)?;
        (r != ClassRef::User(usize::MAX)).then_some(r)
    }

    /// Reference cast legality.
    pub(crate) fn castable(&self, from: &Type, to: &Type) -> bool {
        match (from, to) {
            (Type::Null, t) => t.is_reference(),
            (Type::Array(a), Type::Array(b)) => match (&**a, &**b) {
                (Type::Prim(x), Type::Prim(y)) => x == y,
                (x, y) if x.is_reference() && y.is_reference() => self.castable(x, y),
                _ => false,
            },
            (Type::Array(_), Type::Class(r, _)) | (Type::Class(r, _), Type::Array(_)) => *r == ClassRef::Builtin(Builtin::Object),
            (Type::Class(a, _), Type::Class(b, _)) => {
                if self.class_subtype(*a, *b) || self.class_subtype(*b, *a) {
                    return true;
                }
                let (ia, ib) = (self.is_interface_ref(*a), self.is_interface_ref(*b));
                if ia && ib {
                    return true;
                }
                if ia {
                    return !self.is_final_ref(*b);
                }
                if ib {
                    return !self.is_final_ref(*a);
                }
                false
            }
            _ => false,
        }
    }
}

fn line(n: Node<'_>) -> u32 {
    n.start_position().row as u32 + 1
}

fn mk(kind: ExprKind, ty: Type, line: u32) -> Expr {
    Expr { kind, ty, line }
}

fn konst(c: Const, ty: Type, line: u32) -> Expr {
    mk(ExprKind::Const(c), ty, line)
}

fn const_of(e: &Expr) -> Option<&Const> {
    match &e.kind {
        ExprKind::Const(c) => Some(c),
        _ => None,
    }
}

impl<'c, 'a> Lowerer<'c, 'a> {
    /// Lowers an expression that must produce a value.
    pub fn expr(&mut self, n: Node<'a>) -> Option<Expr> {
        let e = self.expr_any(n)?;
        if e.ty == Type::Void {
            self.err(n, "'void' type not allowed here");
            return None;
        }
        Some(e)
    }

    pub fn expr_any(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let k = n.kind();
        if is_literal_kind(k) {
            return self.literal_expr(n, false);
        }
        match k {
            "parenthesized_expression" => self.expr_any(kids(n).next()?),
            "identifier" => self.name_expr(n),
            "this" => {
                if self.is_static {
                    self.err(n, "non-static variable this cannot be referenced from a static context");
                    return None;
                }
                Some(self.this_expr(l))
            }
            "field_access" => self.field_access(n),
            "array_access" => {
                let arr = self.expr(n.child_by_field_name("array")?)?;
                let idx_node = n.child_by_field_name("index")?;
                let idx = self.expr(idx_node)?;
                let Some(elem) = arr.ty.element().cloned() else {
                    let shown = self.ck.show(&arr.ty);
                    self.err_notes(n, "array required, but ".to_string() + &shown + " found", vec![]);
                    return None;
                };
                let idx = self.int_index(idx, idx_node)?;
                Some(mk(ExprKind::Index { arr: Box::new(arr), index: Box::new(idx) }, elem, l))
            }
            "method_invocation" => self.call(n),
            "object_creation_expression" => self.new_object(n),
            "array_creation_expression" => self.new_array(n),
            "array_initializer" => {
                self.err(n, "array initializer is not allowed here");
                None
            }
            "assignment_expression" => self.assignment(n),
            "binary_expression" => self.binary(n),
            "unary_expression" => self.unary(n),
            "update_expression" => self.update(n),
            "ternary_expression" => self.ternary(n),
            "cast_expression" => self.cast(n),
            "instanceof_expression" => self.instance_of(n),
            "lambda_expression" => {
                self.err(n, "lambda expressions are not supported by this toolchain");
                None
            }
            "method_reference" => {
                self.err(n, "method references are not supported by this toolchain");
                None
            }
            "class_literal" => {
                self.err(n, "class literals are not supported by this toolchain");
                None
            }
            "switch_expression" => {
                self.err(n, "switch expressions are not supported by this toolchain");
                None
            }
            "super" => {
                self.err(n, "'.' expected");
                None
            }
            other => {
                self.err(n, format!("unsupported expression: {other}"));
                None
            }
        }
    }

    fn literal_expr(&mut self, n: Node<'a>, negated: bool) -> Option<Expr> {
        let l = line(n);
        match literal(n.kind(), self.text(n), negated) {
            Ok(c) => {
                let ty = match &c {
                    Const::Str(_) => Type::string(),
                    Const::Null => Type::Null,
                    other => Type::Prim(const_prim(other).unwrap()),
                };
                Some(konst(c, ty, l))
            }
            Err(LitError::TooLarge) => {
                self.err(n, "integer number too large");
                None
            }
            Err(LitError::Unsupported(what)) => {
                self.err(n, format!("{what} are not supported by this toolchain"));
                None
            }
            Err(LitError::Bad) => {
                self.err(n, "illegal literal");
                None
            }
        }
    }

    fn int_index(&mut self, idx: Expr, n: Node<'_>) -> Option<Expr> {
        match idx.ty.unboxed().map(unary_promote) {
            Some(Prim::Int) => Some(self.convert_to(idx, &Type::INT)),
            Some(p) if p.is_numeric() => {
                self.err(n, format!("incompatible types: possible lossy conversion from {} to int", p.name()));
                None
            }
            _ => {
                let shown = self.ck.show(&idx.ty);
                self.err(n, format!("incompatible types: {shown} cannot be converted to int"));
                None
            }
        }
    }

    // ---- names and fields ----

    fn name_expr(&mut self, n: Node<'a>) -> Option<Expr> {
        let name = self.text(n);
        let l = line(n);
        if let Some(slot) = self.find_local(name) {
            if !self.da.has(slot) {
                self.err(n, format!("variable {name} might not have been initialized"));
                return None;
            }
            let local = &self.locals[slot];
            if let Some(c) = &local.constant {
                return Some(konst(c.clone(), local.ty.clone(), l));
            }
            return Some(mk(ExprKind::Local(slot), local.ty.clone(), l));
        }
        let mut cur = Some(self.class);
        let mut direct = true;
        while let Some(ci) = cur {
            if let Some((owner, fi)) = find_field(self.ck, ci, name) {
                return self.field_ref(owner, fi, None, n, direct);
            }
            cur = self.ck.classes[ci].outer;
            direct = false;
        }
        if let Some(e) = self.static_import_field(name, l) {
            return Some(e);
        }
        let loc = self.location();
        self.err_notes(n, "cannot find symbol", vec![format!("symbol:   variable {name}"), loc]);
        None
    }

    fn static_import_field(&mut self, name: &str, l: u32) -> Option<Expr> {
        let f = &self.ck.files[self.file];
        let owners: Vec<ClassRef> = f.static_single.iter().filter(|(_, m)| m == name).map(|(c, _)| *c).chain(f.static_wild.iter().copied()).collect();
        for o in owners {
            if let Some(e) = self.static_member(o, name, l) {
                return Some(e);
            }
        }
        None
    }

    fn static_member(&mut self, owner: ClassRef, name: &str, l: u32) -> Option<Expr> {
        match owner {
            ClassRef::User(i) => {
                let (o, fi) = find_field(self.ck, i, name)?;
                let f = &self.ck.classes[o].fields[fi];
                if !f.is_static {
                    return None;
                }
                Some(match &f.constant {
                    Some(c) => konst(c.clone(), f.ty.clone(), l),
                    None => mk(ExprKind::StaticField { class: o, field: fi }, f.ty.clone(), l),
                })
            }
            ClassRef::Builtin(b) => Some(match builtins::static_field(b, name)? {
                StaticField::Const(t, c) => konst(c, t, l),
                StaticField::Method(m) => {
                    let ret = builtins::resolve(m.entry().ret, None, &[]);
                    mk(ExprKind::CallBuiltin { method: m, recv: None, args: Vec::new(), special: false }, ret, l)
                }
                StaticField::Boxed(p, c) => {
                    let inner = konst(c, Type::Prim(p), l);
                    mk(ExprKind::Convert { expr: Box::new(inner), conv: Conversion::Box(p) }, Type::builtin(p.box_class()), l)
                }
            }),
        }
    }

    /// Reference to field `fi` of class `owner`; `obj` is the explicit
    /// receiver, if any. `direct` is false when the field belongs to an
    /// enclosing class.
    fn field_ref(&mut self, owner: usize, fi: usize, obj: Option<Expr>, n: Node<'a>, direct: bool) -> Option<Expr> {
        let l = line(n);
        let f = &self.ck.classes[owner].fields[fi];
        let (ty, is_static, name, constant, private) = (f.ty.clone(), f.is_static, f.name.clone(), f.constant.clone(), f.is_private);
        if private && !self.ck.same_outermost(owner, self.class) {
            let cname = self.ck.class_name(owner);
            self.err(n, format!("{name} has private access in {cname}"));
            return None;
        }
        if let Some(c) = constant {
            return Some(konst(c, ty, l));
        }
        if is_static {
            return Some(mk(ExprKind::StaticField { class: owner, field: fi }, ty, l));
        }
        let obj = match obj {
            Some(o) => o,
            None => {
                if !direct {
                    if self.ck.classes[self.class].is_static {
                        self.err(n, format!("non-static variable {name} cannot be referenced from a static context"));
                    } else {
                        self.err(n, "access to an enclosing instance is not supported by this toolchain");
                    }
                    return None;
                }
                if self.is_static {
                    self.err(n, format!("non-static variable {name} cannot be referenced from a static context"));
                    return None;
                }
                self.this_expr(l)
            }
        };
        Some(mk(ExprKind::Field { obj: Box::new(obj), class: owner, field: fi }, ty, l))
    }

    /// Interprets `n` as a type name used as a qualifier (`Math.PI`,
    /// `java.util.List.of`), if it is not a variable.
    fn type_qualifier(&mut self, n: Node<'a>) -> Option<ClassRef> {
        match n.kind() {
            "identifier" => {
                let name = self.text(n);
                if self.find_local(name).is_some() {
                    return None;
                }
                let mut cur = Some(self.class);
                while let Some(ci) = cur {
                    if find_field(self.ck, ci, name).is_some() {
                        return None;
                    }
                    cur = self.ck.classes[ci].outer;
                }
                if self.ck.files[self.file].static_single.iter().any(|(_, m)| m == name) {
                    return None;
                }
                self.ck.lookup_type_name(name, self.file, Some(self.class))
            }
            "field_access" | "scoped_identifier" => {
                let full = self.text(n).split_whitespace().collect::<String>();
                if full.contains('(') {
                    return None;
                }
                if let Some(r) = self.ck.class_by_fqn_public(&full) {
                    return Some(r);
                }
                let obj = n.child_by_field_name("object").or_else(|| n.child_by_field_name("scope"))?;
                let field = n.child_by_field_name("field").or_else(|| n.child_by_field_name("name"))?;
                match self.type_qualifier(obj)? {
                    ClassRef::User(i) => {
                        let fname = self.text(field);
                        self.ck.classes[i].nested.iter().find(|(nm, _)| nm == fname).map(|(_, j)| ClassRef::User(*j))
                    }
                    ClassRef::Builtin(_) => None,
                }
            }
            _ => None,
        }
    }

    fn is_package_prefix(&self, n: Node<'_>) -> bool {
        let text = self.text(n).split_whitespace().collect::<String>();
        ["java", "javax", "org"].iter().any(|p| text == *p || text.starts_with(&format!("{p}.")))
    }

    fn field_access(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let obj_node = n.child_by_field_name("object")?;
        let field_node = n.child_by_field_name("field")?;
        if field_node.kind() == "this" {
            return match self.type_qualifier(obj_node) {
                Some(ClassRef::User(i)) if i == self.class && !self.is_static => Some(self.this_expr(l)),
                _ => {
                    self.err(n, "access to an enclosing instance is not supported by this toolchain");
                    None
                }
            };
        }
        let name = self.text(field_node);
        if obj_node.kind() == "super" {
            if self.is_static {
                self.err(obj_node, "non-static variable super cannot be referenced from a static context");
                return None;
            }
            if let ClassRef::User(s) = self.ck.classes[self.class].superclass {
                if let Some((owner, fi)) = find_field(self.ck, s, name) {
                    let this = self.this_expr(l);
                    return self.field_ref(owner, fi, Some(this), n, true);
                }
            }
            let loc = self.location();
            self.err_notes(field_node, "cannot find symbol", vec![format!("symbol: variable {name}"), loc]);
            return None;
        }
        if let Some(r) = self.type_qualifier(obj_node) {
            if let ClassRef::User(i) = r {
                if let Some((owner, fi)) = find_field(self.ck, i, name) {
                    if !self.ck.classes[owner].fields[fi].is_static {
                        self.err(n, format!("non-static variable {name} cannot be referenced from a static context"));
                        return None;
                    }
                    return self.field_ref(owner, fi, None, n, true);
                }
            }
            if let Some(e) = self.static_member(r, name, l) {
                return Some(e);
            }
            let shown = self.ck.show_ref(r);
            self.err_notes(field_node, "cannot find symbol", vec![format!("symbol:   variable {name}"), format!("location: class {shown}")]);
            return None;
        }
        if self.is_package_prefix(obj_node) && obj_node.kind() != "method_invocation" {
            let full = self.text(n).split_whitespace().collect::<String>();
            self.err(n, format!("class {full} is not supported by this toolchain"));
            return None;
        }
        let obj = self.expr(obj_node)?;
        match &obj.ty {
            Type::Array(_) if name == "length" => Some(mk(ExprKind::ArrayLength(Box::new(obj)), Type::INT, l)),
            Type::Class(ClassRef::User(i), _) => {
                let i = *i;
                match find_field(self.ck, i, name) {
                    Some((owner, fi)) => self.field_ref(owner, fi, Some(obj), n, true),
                    None => {
                        let shown = self.ck.class_name(i);
                        self.err_notes(field_node, "cannot find symbol", vec![format!("symbol:   variable {name}"), format!("location: class {shown}")]);
                        None
                    }
                }
            }
            Type::Prim(p) => {
                self.err(n, format!("{} cannot be dereferenced", p.name()));
                None
            }
            other => {
                let shown = self.ck.show(other);
                self.err_notes(field_node, "cannot find symbol", vec![format!("symbol:   variable {name}"), format!("location: class {shown}")]);
                None
            }
        }
    }

    // ---- conversions ----

    fn prim_conv(&self, e: Expr, from: Prim, to: Prim) -> Expr {
        if from == to {
            return e;
        }
        if let ExprKind::Const(c) = &e.kind {
            if let Some(k) = convert_const(c, to) {
                return konst(k, Type::Prim(to), e.line);
            }
        }
        let l = e.line;
        mk(ExprKind::Convert { expr: Box::new(e), conv: Conversion::Prim(from, to) }, Type::Prim(to), l)
    }

    /// Inserts the conversion nodes that turn `e` into a value of type `to`.
    /// Legality is checked by callers.
    pub fn convert_to(&self, e: Expr, to: &Type) -> Expr {
        let from = e.ty.clone();
        if &from == to || from == Type::Void {
            return e;
        }
        let l = e.line;
        match (&from, to) {
            (Type::Prim(a), Type::Prim(b)) => self.prim_conv(e, *a, *b),
            (Type::Prim(a), t) => {
                let target = t.unboxed().unwrap_or(*a);
                let e = self.prim_conv(e, *a, target);
                mk(ExprKind::Convert { expr: Box::new(e), conv: Conversion::Box(target) }, to.clone(), l)
            }
            (t, Type::Prim(b)) => {
                let (e, p) = match t.unboxed() {
                    Some(p) => (e, p),
                    None => {
                        let bx = Type::builtin(b.box_class());
                        (mk(ExprKind::Convert { expr: Box::new(e), conv: Conversion::CheckCast(bx.clone()) }, bx, l), *b)
                    }
                };
                let un = mk(ExprKind::Convert { expr: Box::new(e), conv: Conversion::Unbox(p) }, Type::Prim(p), l);
                self.prim_conv(un, p, *b)
            }
            (Type::Null, _) => Expr { ty: to.clone(), ..e },
            (a, b) => {
                if self.ck.is_subtype(a, b) {
                    Expr { ty: to.clone(), ..e }
                } else {
                    mk(ExprKind::Convert { expr: Box::new(e), conv: Conversion::CheckCast(to.clone()) }, to.clone(), l)
                }
            }
        }
    }

    fn assignable(&self, e: &Expr, to: &Type) -> bool {
        let from = &e.ty;
        if self.ck.method_convertible(from, to, 2) {
            return true;
        }
        // Constant narrowing to byte, short and char (and their boxes).
        if let (Some(c), Type::Prim(Prim::Int | Prim::Short | Prim::Char | Prim::Byte)) = (const_of(e), from) {
            let target = match to {
                Type::Prim(p) => Some(*p),
                Type::Class(ClassRef::Builtin(b @ (Builtin::Byte | Builtin::Short | Builtin::Character)), _) => b.unbox(),
                _ => None,
            };
            if let (Some(t @ (Prim::Byte | Prim::Short | Prim::Char)), Some(v)) = (target, c.as_i64()) {
                return fits(v, t);
            }
        }
        false
    }

    pub fn assign_conv(&mut self, e: Expr, to: &Type, n: Node<'_>) -> Option<Expr> {
        if self.assignable(&e, to) {
            return Some(self.convert_to(e, to));
        }
        let (a, b) = (self.ck.show(&e.ty), self.ck.show(to));
        match (&e.ty, to) {
            (Type::Prim(p), Type::Prim(q)) if p.is_numeric() && q.is_numeric() => {
                self.err(n, format!("incompatible types: possible lossy conversion from {a} to {b}"));
            }
            _ => self.err(n, format!("incompatible types: {a} cannot be converted to {b}")),
        }
        None
    }

    fn numeric(&mut self, e: &Expr) -> Option<Prim> {
        e.ty.unboxed().filter(|p| p.is_numeric())
    }

    fn bad_operands(&mut self, n: Node<'_>, op: &str, a: &Type, b: Option<&Type>) {
        let sa = self.ck.show(a);
        match b {
            Some(b) => {
                let sb = self.ck.show(b);
                self.err_notes(n, format!("bad operand types for binary operator '{op}'"), vec![format!("first type:  {sa}"), format!("second type: {sb}")]);
            }
            None => self.err(n, format!("bad operand type {sa} for unary operator '{op}'")),
        }
    }

    // ---- operators ----

    fn binary(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let op = n.child_by_field_name("operator")?.kind();
        let ln = n.child_by_field_name("left")?;
        let rn = n.child_by_field_name("right")?;
        if op == "&&" || op == "||" {
            let a = self.condition(ln)?;
            let da_after_lhs = self.da.clone();
            let rhs_da = match (op, const_of(&a)) {
                ("&&", Some(Const::Bool(false))) | ("||", Some(Const::Bool(true))) => super::flow::Da::all(),
                _ => da_after_lhs.clone(),
            };
            self.da = rhs_da;
            let b = self.condition(rn);
            self.da = da_after_lhs;
            let b = b?;
            if let (Some(Const::Bool(x)), Some(Const::Bool(y))) = (const_of(&a), const_of(&b)) {
                let v = if op == "&&" { *x && *y } else { *x || *y };
                return Some(konst(Const::Bool(v), Type::BOOLEAN, l));
            }
            let kind = if op == "&&" { ExprKind::LogicalAnd(Box::new(a), Box::new(b)) } else { ExprKind::LogicalOr(Box::new(a), Box::new(b)) };
            return Some(mk(kind, Type::BOOLEAN, l));
        }
        let a = self.expr(ln)?;
        let b = self.expr(rn)?;
        let bop = BinOp::from_token(op)?;
        self.binary_typed(bop, op, a, b, n, l)
    }

    fn binary_typed(&mut self, bop: BinOp, op: &str, a: Expr, b: Expr, n: Node<'_>, l: u32) -> Option<Expr> {
        if bop == BinOp::Add && (a.ty.is_string() || b.ty.is_string()) {
            return Some(self.concat(a, b, l));
        }
        match bop {
            BinOp::Eq | BinOp::Ne => return self.equality(bop, op, a, b, n, l),
            BinOp::And | BinOp::Or | BinOp::Xor if a.ty.unboxed() == Some(Prim::Boolean) && b.ty.unboxed() == Some(Prim::Boolean) => {
                return Some(self.arith(bop, Prim::Boolean, a, b, Type::BOOLEAN, l));
            }
            _ => {}
        }
        let (Some(pa), Some(pb)) = (self.numeric(&a), self.numeric(&b)) else {
            self.bad_operands(n, op, &a.ty, Some(&b.ty));
            return None;
        };
        if (bop.is_shift() || matches!(bop, BinOp::And | BinOp::Or | BinOp::Xor))
            && (!pa.is_integral() || !pb.is_integral()) {
                self.bad_operands(n, op, &a.ty, Some(&b.ty));
                return None;
            }
        let operand = if bop.is_shift() { unary_promote(pa) } else { promote(pa, pb) };
        let ty = if bop.is_comparison() { Type::BOOLEAN } else { Type::Prim(operand) };
        Some(self.arith(bop, operand, a, b, ty, l))
    }

    fn arith(&mut self, op: BinOp, operand: Prim, a: Expr, b: Expr, ty: Type, l: u32) -> Expr {
        let a = self.convert_to(a, &Type::Prim(operand));
        let b = self.convert_to(b, &Type::Prim(operand));
        if let (Some(x), Some(y)) = (const_of(&a), const_of(&b)) {
            if let Some(k) = fold_binary(op, operand, x, y) {
                return konst(k, ty, l);
            }
        }
        mk(ExprKind::Binary { op, lhs: Box::new(a), rhs: Box::new(b), operand }, ty, l)
    }

    fn equality(&mut self, bop: BinOp, op: &str, a: Expr, b: Expr, n: Node<'_>, l: u32) -> Option<Expr> {
        let both_ref = a.ty.is_reference() && b.ty.is_reference();
        if !both_ref {
            let (ua, ub) = (a.ty.unboxed(), b.ty.unboxed());
            match (ua, ub) {
                (Some(Prim::Boolean), Some(Prim::Boolean)) => return Some(self.arith(bop, Prim::Boolean, a, b, Type::BOOLEAN, l)),
                (Some(x), Some(y)) if x.is_numeric() && y.is_numeric() => {
                    return Some(self.arith(bop, promote(x, y), a, b, Type::BOOLEAN, l));
                }
                _ => {
                    self.bad_operands(n, op, &a.ty, Some(&b.ty));
                    return None;
                }
            }
        }
        if !self.ck.castable(&a.ty, &b.ty) {
            let (sa, sb) = (self.ck.show(&a.ty), self.ck.show(&b.ty));
            self.err(n, format!("incomparable types: {sa} and {sb}"));
            return None;
        }
        Some(mk(ExprKind::RefEq { lhs: Box::new(a), rhs: Box::new(b), negate: bop == BinOp::Ne }, Type::BOOLEAN, l))
    }

    fn concat(&mut self, a: Expr, b: Expr, l: u32) -> Expr {
        let mut parts = match a.kind {
            ExprKind::Concat(p) => p,
            _ => vec![a],
        };
        parts.push(b);
        // Fold adjacent constants.
        let mut folded: Vec<Expr> = Vec::new();
        for p in parts {
            if let (Some(last), Some(c)) = (folded.last_mut(), const_of(&p).filter(|c| **c != Const::Null).cloned()) {
                if let Some(Const::Str(prev)) = const_of(last).cloned() {
                    *last = konst(Const::Str(prev + &const_str(&c)), Type::string(), l);
                    continue;
                }
                if folded.len() == 1 && matches!(const_of(&folded[0]), Some(k) if *k != Const::Null) && matches!(c, Const::Str(_)) {
                    let prev = const_str(const_of(&folded[0]).unwrap());
                    folded[0] = konst(Const::Str(prev + &const_str(&c)), Type::string(), l);
                    continue;
                }
            }
            folded.push(p);
        }
        if folded.len() == 1 && matches!(const_of(&folded[0]), Some(Const::Str(_))) {
            return folded.pop().unwrap();
        }
        mk(ExprKind::Concat(folded), Type::string(), l)
    }

    fn unary(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let op = n.child_by_field_name("operator")?.kind();
        let on = n.child_by_field_name("operand")?;
        let e = if op == "-" && matches!(on.kind(), "decimal_integer_literal") { self.literal_expr(on, true) } else { self.expr(on) }?;
        if op == "-" && matches!(on.kind(), "decimal_integer_literal") && matches!(const_of(&e), Some(Const::Int(i32::MIN) | Const::Long(i64::MIN))) {
            return Some(e);
        }
        let (uop, prim) = match op {
            "!" => {
                if e.ty.unboxed() != Some(Prim::Boolean) {
                    self.bad_operands(n, op, &e.ty, None);
                    return None;
                }
                (UnOp::Not, Prim::Boolean)
            }
            "-" | "+" | "~" => {
                let Some(p) = self.numeric(&e) else {
                    self.bad_operands(n, op, &e.ty, None);
                    return None;
                };
                if op == "~" && !p.is_integral() {
                    self.bad_operands(n, op, &e.ty, None);
                    return None;
                }
                (
                    match op {
                        "-" => UnOp::Neg,
                        "+" => UnOp::Plus,
                        _ => UnOp::BitNot,
                    },
                    unary_promote(p),
                )
            }
            _ => return None,
        };
        let e = self.convert_to(e, &Type::Prim(prim));
        if let Some(c) = const_of(&e) {
            if let Some(v) = Value::from_const(c) {
                if let Some(k) = value::unary(uop, prim, &v).to_const(prim) {
                    return Some(konst(k, Type::Prim(prim), l));
                }
            }
        }
        Some(mk(ExprKind::Unary { op: uop, operand: Box::new(e) }, Type::Prim(prim), l))
    }

    /// Resolves an assignment target. Returns the target, its type and
    /// the local slot when it is a local variable.
    fn lvalue(&mut self, n: Node<'a>, compound: bool) -> Option<(LValue, Type, Option<usize>)> {
        match n.kind() {
            "parenthesized_expression" => self.lvalue(kids(n).next()?, compound),
            "identifier" => {
                let name = self.text(n);
                if let Some(slot) = self.find_local(name) {
                    let local = &self.locals[slot];
                    let ty = local.ty.clone();
                    if local.is_final {
                        if local.initialized || local.catch_param {
                            self.err(n, format!("cannot assign a value to final variable {name}"));
                            return None;
                        }
                        if self.da.has(slot) {
                            self.err(n, format!("variable {name} might already have been assigned"));
                            return None;
                        }
                    }
                    if compound && !self.da.has(slot) {
                        self.err(n, format!("variable {name} might not have been initialized"));
                        return None;
                    }
                    return Some((LValue::Local(slot), ty, Some(slot)));
                }
                let e = self.name_expr(n)?;
                self.expr_to_lvalue(e, n, true)
            }
            "field_access" => {
                let obj = n.child_by_field_name("object")?;
                let own = obj.kind() == "this";
                let e = self.field_access(n)?;
                self.expr_to_lvalue(e, n, own)
            }
            "array_access" => {
                let e = self.expr_any(n)?;
                self.expr_to_lvalue(e, n, false)
            }
            _ => {
                self.err_notes(n, "unexpected type", vec!["required: variable".into(), "found:    value".into()]);
                None
            }
        }
    }

    fn expr_to_lvalue(&mut self, e: Expr, n: Node<'a>, own_access: bool) -> Option<(LValue, Type, Option<usize>)> {
        let ty = e.ty.clone();
        let (lv, class, field) = match e.kind {
            ExprKind::StaticField { class, field } => (LValue::StaticField { class, field }, Some(class), Some(field)),
            ExprKind::Field { obj, class, field } => (LValue::Field { obj, class, field }, Some(class), Some(field)),
            ExprKind::Index { arr, index } => (LValue::Index { arr, index }, None, None),
            ExprKind::Const(_) => {
                let name = self.text(n).rsplit('.').next().unwrap_or("").trim().to_string();
                self.err(n, format!("cannot assign a value to final variable {name}"));
                return None;
            }
            ExprKind::ArrayLength(_) => {
                self.err(n, "cannot assign a value to final variable length");
                return None;
            }
            _ => {
                self.err_notes(n, "unexpected type", vec!["required: variable".into(), "found:    value".into()]);
                return None;
            }
        };
        if let (Some(c), Some(fi)) = (class, field) {
            let f = &self.ck.classes[c].fields[fi];
            if f.is_final {
                let in_init = self.ret.is_none() || self.in_ctor;
                let allowed = c == self.class && own_access && in_init && (f.is_static == self.is_static || (!f.is_static && self.in_ctor));
                if !allowed {
                    let name = f.name.clone();
                    self.err(n, format!("cannot assign a value to final variable {name}"));
                    return None;
                }
            }
        }
        Some((lv, ty, None))
    }

    fn assignment(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let op = n.child_by_field_name("operator")?.kind();
        let ln = n.child_by_field_name("left")?;
        let rn = n.child_by_field_name("right")?;
        if op == "=" {
            // The right side is evaluated before the variable counts as
            // assigned.
            let (target, ty, slot) = self.lvalue(ln, false)?;
            let v = if rn.kind() == "array_initializer" {
                self.err(rn, "array initializer is not allowed here");
                return None;
            } else {
                let e = self.expr(rn)?;
                self.assign_conv(e, &ty, rn)?
            };
            if let Some(s) = slot {
                self.da.set(s);
            }
            return Some(mk(ExprKind::Assign { target, value: Box::new(v) }, ty, l));
        }
        let (target, ty, _) = self.lvalue(ln, true)?;
        let v = self.expr(rn)?;
        let tok = op.trim_end_matches('=');
        let bop = BinOp::from_token(tok)?;
        if bop == BinOp::Add && ty.is_string() {
            return Some(mk(
                ExprKind::Compound { target, op: bop, value: Box::new(v), op_type: Prim::Int, target_ty: ty.clone(), concat: true },
                ty,
                l,
            ));
        }
        let Some(tp) = ty.unboxed() else {
            self.bad_operands(n, tok, &ty, Some(&v.ty));
            return None;
        };
        let Some(vp) = v.ty.unboxed() else {
            self.bad_operands(n, tok, &ty, Some(&v.ty));
            return None;
        };
        let op_type = if tp == Prim::Boolean && vp == Prim::Boolean && matches!(bop, BinOp::And | BinOp::Or | BinOp::Xor) {
            Prim::Boolean
        } else if tp.is_numeric() && vp.is_numeric() {
            if (bop.is_shift() || matches!(bop, BinOp::And | BinOp::Or | BinOp::Xor)) && (!tp.is_integral() || !vp.is_integral()) {
                self.bad_operands(n, tok, &ty, Some(&v.ty));
                return None;
            }
            if bop.is_shift() {
                unary_promote(tp)
            } else {
                promote(tp, vp)
            }
        } else {
            self.bad_operands(n, tok, &ty, Some(&v.ty));
            return None;
        };
        let v = self.convert_to(v, &Type::Prim(op_type));
        Some(mk(ExprKind::Compound { target, op: bop, value: Box::new(v), op_type, target_ty: ty.clone(), concat: false }, ty, l))
    }

    fn update(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let mut prefix = false;
        let mut delta = 1i8;
        let mut operand = None;
        let mut cur = n.walk();
        for (i, c) in n.children(&mut cur).enumerate() {
            match c.kind() {
                "++" | "--" => {
                    prefix = i == 0;
                    delta = if c.kind() == "++" { 1 } else { -1 };
                }
                _ if c.is_named() => operand = Some(c),
                _ => {}
            }
        }
        let on = operand?;
        let (target, ty, _) = self.lvalue(on, true)?;
        let Some(prim) = ty.unboxed().filter(|p| p.is_numeric()) else {
            let shown = self.ck.show(&ty);
            let op = if delta > 0 { "++" } else { "--" };
            self.err(n, format!("bad operand type {shown} for unary operator '{op}'"));
            return None;
        };
        let boxed = ty.prim().is_none();
        Some(mk(ExprKind::IncDec { target, delta, prefix, prim, boxed }, ty, l))
    }

    fn ternary(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let cond = self.condition(n.child_by_field_name("condition")?)?;
        let da0 = self.da.clone();
        let a = self.expr(n.child_by_field_name("consequence")?);
        let da_a = self.da.clone();
        self.da = da0;
        let b = self.expr(n.child_by_field_name("alternative")?);
        self.da = da_a.meet(&self.da);
        let (a, b) = (a?, b?);
        let ty = self.ternary_type(&a, &b);
        let a = self.convert_to(a, &ty);
        let b = self.convert_to(b, &ty);
        if let (Some(Const::Bool(c)), Some(x), Some(y)) = (const_of(&cond), const_of(&a), const_of(&b)) {
            let _ = (x, y);
            return Some(if *c { a } else { b });
        }
        Some(mk(ExprKind::Cond { cond: Box::new(cond), then: Box::new(a), els: Box::new(b) }, ty, l))
    }

    fn ternary_type(&self, a: &Expr, b: &Expr) -> Type {
        let (ta, tb) = (&a.ty, &b.ty);
        if ta == tb {
            return ta.clone();
        }
        match (ta.unboxed(), tb.unboxed()) {
            (Some(Prim::Boolean), Some(Prim::Boolean)) => return Type::BOOLEAN,
            (Some(x), Some(y)) if x.is_numeric() && y.is_numeric() => {
                // A constant int that fits the other operand's narrower type keeps that type.
                for (e, other) in [(a, y), (b, x)] {
                    if matches!(other, Prim::Byte | Prim::Short | Prim::Char) && e.ty == Type::INT {
                        if let Some(v) = const_of(e).and_then(|c| c.as_i64()) {
                            if fits(v, other) {
                                return Type::Prim(other);
                            }
                        }
                    }
                }
                if x == y {
                    return Type::Prim(x);
                }
                if matches!((x, y), (Prim::Byte, Prim::Short) | (Prim::Short, Prim::Byte)) {
                    return Type::Prim(Prim::Short);
                }
                return Type::Prim(promote(x, y));
            }
            _ => {}
        }
        match (ta, tb) {
            (Type::Null, t) | (t, Type::Null) => builtins::boxed_type(t),
            (Type::Prim(p), t) | (t, Type::Prim(p)) => {
                let bx = Type::builtin(p.box_class());
                if self.ck.is_subtype(&bx, t) {
                    t.clone()
                } else {
                    Type::object()
                }
            }
            (x, y) => {
                if self.ck.is_subtype(x, y) {
                    y.clone()
                } else if self.ck.is_subtype(y, x) {
                    x.clone()
                } else {
                    Type::object()
                }
            }
        }
    }

    fn cast(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let tn = n.child_by_field_name("type")?;
        let to = self.ck.resolve_type(tn, self.file, Some(self.class))?;
        let e = self.expr(n.child_by_field_name("value")?)?;
        let from = e.ty.clone();
        let ok = match (&from, &to) {
            (Type::Prim(a), Type::Prim(b)) => (*a == Prim::Boolean) == (*b == Prim::Boolean),
            (Type::Prim(a), t) => self.ck.is_subtype(&Type::builtin(a.box_class()), t),
            (t, Type::Prim(b)) => match t.unboxed() {
                Some(p) => p.widens_to(*b),
                None => self.ck.castable(t, &Type::builtin(b.box_class())),
            },
            (a, b) => self.ck.castable(a, b),
        };
        if !ok {
            let (sa, sb) = (self.ck.show(&from), self.ck.show(&to));
            self.err(n, format!("incompatible types: {sa} cannot be converted to {sb}"));
            return None;
        }
        let out = self.convert_to(e, &to);
        Some(Expr { line: l, ..out })
    }

    fn instance_of(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        if n.child_by_field_name("name").is_some() || n.child_by_field_name("pattern").is_some() {
            self.err(n, "pattern matching in instanceof is not supported by this toolchain");
            return None;
        }
        let e = self.expr(n.child_by_field_name("left")?)?;
        let tn = n.child_by_field_name("right")?;
        let target = self.ck.resolve_type(tn, self.file, Some(self.class))?;
        if !e.ty.is_reference() || !target.is_reference() {
            let shown = self.ck.show(&e.ty);
            self.err_notes(n, "unexpected type", vec!["required: reference".into(), format!("found:    {shown}")]);
            return None;
        }
        if !self.ck.castable(&e.ty, &target) {
            let (sa, sb) = (self.ck.show(&e.ty), self.ck.show(&target));
            self.err(n, format!("incompatible types: {sa} cannot be converted to {sb}"));
            return None;
        }
        Some(mk(ExprKind::InstanceOf { expr: Box::new(e), target }, Type::BOOLEAN, l))
    }

    // ---- calls ----

    pub fn args(&mut self, list: Node<'a>) -> Option<Vec<Expr>> {
        let mut out = Vec::new();
        let mut ok = true;
        for a in kids(list) {
            match self.expr(a) {
                Some(e) => out.push(e),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn applicable(&self, c: &Cand, args: &[Type], phase: u8) -> bool {
        let any_arr = |i: usize| matches!(&c.callee, Callee::Builtin(e) if e.params.get(i) == Some(&P::AnyArr));
        let conv = |i: usize, a: &Type, p: &Type, ph: u8| {
            if any_arr(i) {
                return matches!(a, Type::Array(_) | Type::Null);
            }
            if c.any.get(i).copied().unwrap_or(false) {
                return *a != Type::Void;
            }
            self.ck.method_convertible(a, p, ph)
        };
        if phase < 3 {
            return c.params.len() == args.len() && args.iter().zip(&c.params).enumerate().all(|(i, (a, p))| conv(i, a, p, phase));
        }
        if !c.varargs || args.len() + 1 < c.params.len() {
            return false;
        }
        let fixed = c.params.len() - 1;
        let elem = c.params[fixed].element().cloned().unwrap_or_else(Type::object);
        args[..fixed].iter().zip(&c.params).enumerate().all(|(i, (a, p))| conv(i, a, p, 2)) && args[fixed..].iter().all(|a| self.ck.method_convertible(a, &elem, 2))
    }

    fn more_specific(&self, a: &Cand, b: &Cand) -> bool {
        let n = a.params.len().max(b.params.len());
        let get = |c: &Cand, i: usize| -> Type {
            if c.varargs && i + 1 >= c.params.len() {
                c.params.last().and_then(|p| p.element().cloned()).unwrap_or_else(Type::object)
            } else {
                c.params.get(i).cloned().unwrap_or_else(Type::object)
            }
        };
        if !a.varargs && !b.varargs && a.params.len() != b.params.len() {
            return false;
        }
        (0..n).all(|i| {
            let (x, y) = (get(a, i), get(b, i));
            self.ck.method_convertible(&x, &y, 1)
        })
    }

    /// Overload resolution. `what` names the member for diagnostics
    /// (`method foo`, `constructor Foo`); `owner` is the class display name.
    pub fn select(&mut self, cands: &[Cand], args: &[Type], n: Node<'_>, what: &str, owner: &str) -> Option<Cand> {
        for phase in 1..=3 {
            let app: Vec<&Cand> = cands.iter().filter(|c| self.applicable(c, args, phase)).collect();
            if app.is_empty() {
                continue;
            }
            let best = app.iter().find(|a| app.iter().all(|b| std::ptr::eq(**a, *b) || self.more_specific(a, b))).unwrap_or(&app[0]);
            return Some((*best).clone());
        }
        let shown_args = if args.is_empty() { "no arguments".to_string() } else { self.ck.show_params(args) };
        if cands.len() == 1 {
            let c = &cands[0];
            let req = if c.params.is_empty() {
                "no arguments".to_string()
            } else {
                let mut s = self.ck.show_params(&c.params);
                if c.varargs {
                    s = s.trim_end_matches("[]").to_string() + "...";
                }
                s
            };
            let reason = if c.params.len() != args.len() && !c.varargs {
                "actual and formal argument lists differ in length".to_string()
            } else {
                let mismatch = args.iter().zip(&c.params).find(|(a, p)| !self.ck.method_convertible(a, p, 2));
                match mismatch {
                    Some((a, p)) => {
                        let (sa, sp) = (self.ck.show(a), self.ck.show(p));
                        match (a, p) {
                            (Type::Prim(x), Type::Prim(y)) if x.is_numeric() && y.is_numeric() => format!("argument mismatch; possible lossy conversion from {sa} to {sp}"),
                            _ => format!("argument mismatch; {sa} cannot be converted to {sp}"),
                        }
                    }
                    None => "argument mismatch".into(),
                }
            };
            self.err_notes(
                n,
                format!("{what} in class {owner} cannot be applied to given types;"),
                vec![format!("required: {req}"), format!("found:    {shown_args}"), format!("reason: {reason}")],
            );
        } else {
            let (kind, name) = what.split_once(' ').unwrap_or(("method", what));
            let shown = if args.is_empty() { String::new() } else { self.ck.show_params(args) };
            self.err(n, format!("no suitable {kind} found for {name}({shown})"));
        }
        None
    }

    pub fn coerce_args(&mut self, args: Vec<Expr>, c: &Cand) -> Vec<Expr> {
        let types: Vec<Type> = args.iter().map(|a| a.ty.clone()).collect();
        let fixed_ok = self.applicable(c, &types, 2);
        let mut out = Vec::new();
        if !c.varargs || fixed_ok {
            for (i, a) in args.into_iter().enumerate() {
                if c.any.get(i).copied().unwrap_or(false) {
                    out.push(a);
                } else {
                    out.push(self.convert_to(a, &c.params[i]));
                }
            }
            return out;
        }
        let fixed = c.params.len() - 1;
        let arr_ty = c.params[fixed].clone();
        let elem = arr_ty.element().cloned().unwrap_or_else(Type::object);
        let mut it = args.into_iter();
        for i in 0..fixed {
            let a = it.next().unwrap();
            out.push(if c.any[i] { a } else { self.convert_to(a, &c.params[i]) });
        }
        let l = out.last().map(|e: &Expr| e.line).unwrap_or(0);
        let elems: Vec<Expr> = it.map(|a| self.convert_to(a, &elem)).collect();
        let l = elems.first().map(|e| e.line).unwrap_or(l);
        out.push(mk(ExprKind::ArrayLit { elem, elems }, arr_ty, l));
        out
    }

    fn no_method(&mut self, n: Node<'_>, name: &str, args: &[Type], location: String) {
        let shown = self.ck.show_params(args);
        self.err_notes(n, "cannot find symbol", vec![format!("symbol:   method {name}({shown})"), location]);
    }

    fn call(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let name_node = n.child_by_field_name("name")?;
        let name = self.text(name_node).to_string();
        if n.child_by_field_name("type_arguments").is_some() {
            self.err(n, "explicit type arguments are not supported by this toolchain");
            return None;
        }
        let obj = n.child_by_field_name("object");
        let args = self.args(n.child_by_field_name("arguments")?)?;
        let types: Vec<Type> = args.iter().map(|a| a.ty.clone()).collect();
        match obj {
            None => self.unqualified_call(n, &name, args, &types, l),
            Some(o) if o.kind() == "super" => self.super_method_call(n, o, &name, args, &types, l),
            Some(o) => {
                if let Some(r) = self.type_qualifier(o) {
                    let cands = self.ck.static_candidates(r, &name, &types);
                    let cands = if cands.is_empty() {
                        if let ClassRef::User(i) = r {
                            self.ck.user_candidates(i, &name, &types, false)
                        } else {
                            cands
                        }
                    } else {
                        cands
                    };
                    if cands.is_empty() {
                        let shown = self.ck.show_ref(r);
                        self.no_method(name_node, &name, &types, format!("location: class {shown}"));
                        return None;
                    }
                    let owner = self.ck.show_ref(r);
                    let cand = self.select(&cands, &types, n, &format!("method {name}"), &owner)?;
                    if !cand.is_static {
                        let shown = self.ck.show_params(&cand.params);
                        self.err(n, format!("non-static method {name}({shown}) cannot be referenced from a static context"));
                        return None;
                    }
                    return self.finish_call(cand, None, args, n, l);
                }
                if self.is_package_prefix(o) && o.kind() != "method_invocation" {
                    let full = self.text(o).split_whitespace().collect::<String>();
                    self.err(o, format!("class {full} is not supported by this toolchain"));
                    return None;
                }
                let recv = self.expr(o)?;
                if let Type::Prim(p) = &recv.ty {
                    self.err(n, format!("{} cannot be dereferenced", p.name()));
                    return None;
                }
                if recv.ty == Type::Null {
                    self.err(n, "<null> cannot be dereferenced");
                    return None;
                }
                let cands = self.ck.instance_candidates(&recv.ty, &name, &types);
                let owner = match &recv.ty {
                    Type::Class(r, _) => self.ck.show_ref(*r),
                    other => self.ck.show(other),
                };
                if cands.is_empty() {
                    let shown = self.ck.show(&recv.ty);
                    self.no_method(name_node, &name, &types, format!("location: class {shown}"));
                    return None;
                }
                let cand = self.select(&cands, &types, n, &format!("method {name}"), &owner)?;
                self.finish_call(cand, Some(recv), args, n, l)
            }
        }
    }

    fn unqualified_call(&mut self, n: Node<'a>, name: &str, args: Vec<Expr>, types: &[Type], l: u32) -> Option<Expr> {
        let mut cur = Some(self.class);
        let mut direct = true;
        while let Some(ci) = cur {
            let cands = self.ck.user_candidates(ci, name, types, false);
            let cands: Vec<Cand> = if direct { cands } else { cands.into_iter().filter(|c| matches!(c.callee, Callee::User { .. })).collect() };
            if !cands.is_empty() {
                let owner = self.ck.class_name(ci);
                let cand = self.select(&cands, types, n, &format!("method {name}"), &owner)?;
                if !cand.is_static {
                    let shown = self.ck.show_params(&cand.params);
                    if !direct {
                        if self.ck.classes[self.class].is_static {
                            self.err(n, format!("non-static method {name}({shown}) cannot be referenced from a static context"));
                        } else {
                            self.err(n, "access to an enclosing instance is not supported by this toolchain");
                        }
                        return None;
                    }
                    if self.is_static {
                        self.err(n, format!("non-static method {name}({shown}) cannot be referenced from a static context"));
                        return None;
                    }
                    let this = self.this_expr(l);
                    return self.finish_call(cand, Some(this), args, n, l);
                }
                return self.finish_call(cand, None, args, n, l);
            }
            cur = self.ck.classes[ci].outer;
            direct = false;
        }
        let f = &self.ck.files[self.file];
        let singles: Vec<ClassRef> = f.static_single.iter().filter(|(_, m)| m == name).map(|(c, _)| *c).collect();
        let wild: Vec<ClassRef> = f.static_wild.clone();
        for group in [singles, wild] {
            let mut cands = Vec::new();
            for o in &group {
                cands.extend(self.ck.static_candidates(*o, name, types));
            }
            if !cands.is_empty() {
                let owner = group.first().map(|r| self.ck.show_ref(*r)).unwrap_or_default();
                let cand = self.select(&cands, types, n, &format!("method {name}"), &owner)?;
                return self.finish_call(cand, None, args, n, l);
            }
        }
        let loc = self.location();
        self.no_method(n.child_by_field_name("name").unwrap_or(n), name, types, loc);
        None
    }

    fn super_method_call(&mut self, n: Node<'a>, o: Node<'a>, name: &str, args: Vec<Expr>, types: &[Type], l: u32) -> Option<Expr> {
        if self.is_static {
            self.err(o, "non-static variable super cannot be referenced from a static context");
            return None;
        }
        let sup = self.ck.classes[self.class].superclass;
        let cands = match sup {
            ClassRef::User(s) => self.ck.user_candidates(s, name, types, false),
            ClassRef::Builtin(b) => builtin_cands(builtins::lookup(b, name, false), None, types),
        };
        if cands.is_empty() {
            let shown = self.ck.show_ref(sup);
            self.no_method(n.child_by_field_name("name").unwrap_or(n), name, types, format!("location: class {shown}"));
            return None;
        }
        let owner = self.ck.show_ref(sup);
        let cand = self.select(&cands, types, n, &format!("method {name}"), &owner)?;
        let this = self.this_expr(l);
        let args = self.coerce_args(args, &cand);
        let ret = cand.ret.clone();
        match cand.callee {
            Callee::User { class, index } => {
                if self.ck.classes[class].methods[index].is_abstract {
                    let cname = self.ck.class_name(class);
                    self.err(n, format!("abstract method {name}() in {cname} cannot be accessed directly"));
                    return None;
                }
                self.callee_throws(&cand.callee, n);
                if cand.is_static {
                    return Some(mk(ExprKind::CallStatic { class, method: index, args }, ret, l));
                }
                Some(mk(ExprKind::CallSpecial { recv: Box::new(this), class, method: index, args }, ret, l))
            }
            Callee::Builtin(e) => Some(mk(ExprKind::CallBuiltin { method: e.method, recv: Some(Box::new(this)), args, special: true }, ret, l)),
        }
    }

    fn finish_call(&mut self, cand: Cand, recv: Option<Expr>, args: Vec<Expr>, n: Node<'a>, l: u32) -> Option<Expr> {
        let args = self.coerce_args(args, &cand);
        self.callee_throws(&cand.callee, n);
        let ret = cand.ret.clone();
        Some(match cand.callee {
            Callee::User { class, index } => {
                let m = &self.ck.classes[class].methods[index];
                if m.is_private && !self.ck.same_outermost(class, self.class) {
                    let (mname, cname) = (m.name.clone(), self.ck.class_name(class));
                    let shown = self.ck.show_params(&cand.params);
                    self.err(n, format!("{mname}({shown}) has private access in {cname}"));
                    return None;
                }
                if cand.is_static {
                    mk(ExprKind::CallStatic { class, method: index, args }, ret, l)
                } else {
                    let recv = recv?;
                    if m.is_private {
                        mk(ExprKind::CallSpecial { recv: Box::new(recv), class, method: index, args }, ret, l)
                    } else {
                        let key = crate::ir::signature_key(&m.name, &m.param_types());
                        let static_class = recv.ty.class().unwrap_or(ClassRef::User(class));
                        mk(ExprKind::CallVirtual { recv: Box::new(recv), key, static_class, args }, ret, l)
                    }
                }
            }
            Callee::Builtin(e) => {
                let recv = if cand.is_static { None } else { recv.map(Box::new) };
                mk(ExprKind::CallBuiltin { method: e.method, recv, args, special: false }, ret, l)
            }
        })
    }

    fn new_object(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        if kids(n).any(|k| k.kind() == "class_body") {
            self.err(n, "anonymous classes are not supported by this toolchain");
            return None;
        }
        if n.child_by_field_name("object").is_some() || kids(n).next().map(|k| k.kind() != "type_arguments" && k.kind() != "type_identifier" && k.kind() != "generic_type" && k.kind() != "scoped_type_identifier").unwrap_or(false) && n.child_by_field_name("type").is_none() {
            self.err(n, "qualified instance creation is not supported by this toolchain");
            return None;
        }
        let tn = n.child_by_field_name("type")?;
        let ty = self.ck.resolve_type(tn, self.file, Some(self.class))?;
        let args = self.args(n.child_by_field_name("arguments")?)?;
        match ty.clone() {
            Type::Class(ClassRef::User(c), _) => {
                if self.ck.classes[c].is_abstract {
                    let cname = self.ck.class_name(c);
                    self.err(n, format!("{cname} is abstract; cannot be instantiated"));
                    return None;
                }
                let (ctor, args) = self.pick_ctor(c, args, n)?;
                self.ctor_throws(c, ctor, n);
                Some(mk(ExprKind::New { class: c, ctor, args }, ty, l))
            }
            Type::Class(ClassRef::Builtin(b), targs) => {
                if b.info().is_interface {
                    self.err(n, format!("{} is abstract; cannot be instantiated", b.info().simple));
                    return None;
                }
                if !builtins::instantiable(b) {
                    self.err(n, format!("constructor {} is not supported by this toolchain", b.info().simple));
                    return None;
                }
                let (e, args) = self.pick_builtin_ctor(b, args, n)?;
                let ty = Type::Class(ClassRef::Builtin(b), targs);
                Some(mk(ExprKind::NewBuiltin { class: b, args, method: e.method }, ty, l))
            }
            other => {
                let shown = self.ck.show(&other);
                self.err(n, format!("unexpected type {shown}"));
                None
            }
        }
    }

    fn new_array(&mut self, n: Node<'a>) -> Option<Expr> {
        let l = line(n);
        let tn = n.child_by_field_name("type")?;
        let elem = self.ck.resolve_type(tn, self.file, Some(self.class))?;
        let mut dims = Vec::new();
        let mut extra = 0;
        for k in kids(n) {
            match k.kind() {
                "dimensions_expr" => {
                    let de = kids(k).next()?;
                    let e = self.expr(de)?;
                    dims.push(self.int_index(e, de)?);
                }
                "dimensions" => extra += self.text(k).matches('[').count(),
                _ => {}
            }
        }
        let mut full = elem.clone();
        for _ in 0..dims.len() + extra {
            full = Type::Array(Box::new(full));
        }
        if let Some(v) = n.child_by_field_name("value") {
            return self.array_init(v, &full);
        }
        Some(mk(ExprKind::NewArray { elem, dims, extra_dims: extra }, full, l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_literal_bounds() {
        assert!(matches!(literal("decimal_integer_literal", "2147483647", false), Ok(Const::Int(i32::MAX))));
        assert!(matches!(literal("decimal_integer_literal", "2147483648", false), Err(LitError::TooLarge)));
        assert!(matches!(literal("decimal_integer_literal", "2147483648", true), Ok(Const::Int(i32::MIN))));
        assert!(matches!(literal("hex_integer_literal", "0xFFFFFFFF", false), Ok(Const::Int(-1))));
        assert!(matches!(literal("decimal_integer_literal", "1_000L", false), Ok(Const::Long(1000))));
    }

    #[test]
    fn char_and_string_escapes() {
        assert!(matches!(literal("character_literal", "'\\n'", false), Ok(Const::Char(10))));
        assert!(matches!(literal("character_literal", "'\\u0041'", false), Ok(Const::Char(65))));
        match literal("string_literal", "\"a\\tb\"", false) {
            Ok(Const::Str(s)) => assert_eq!(s, "a\tb"),
            _ => panic!(),
        }
    }

    #[test]
    fn folding_follows_java_arithmetic() {
        assert_eq!(fold_binary(BinOp::Add, Prim::Int, &Const::Int(i32::MAX), &Const::Int(1)), Some(Const::Int(i32::MIN)));
        assert_eq!(fold_binary(BinOp::Div, Prim::Int, &Const::Int(1), &Const::Int(0)), None);
        assert_eq!(fold_binary(BinOp::Lt, Prim::Int, &Const::Int(1), &Const::Int(2)), Some(Const::Bool(true)));
        assert_eq!(const_str(&Const::Double(1.0)), "1.0");
    }
}
