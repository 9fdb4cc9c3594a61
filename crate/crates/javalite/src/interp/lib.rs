//! Library method implementations.

use std::cmp::Ordering;

use super::text::{java_double_cmp, prim_hash, prim_string};
use super::{Interp, Unwind, R};
use crate::builtins::BuiltinMethod;
use crate::jfmt;
use crate::types::{Builtin, Prim, Type};
use crate::value::{self, ListMode, ObjKind, Ref, Value};

fn ord_int(o: Ordering) -> Value {
    Value::Int(match o {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    })
}

fn java_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else if a == 0.0 && b == 0.0 {
        if a.is_sign_positive() {
            a
        } else {
            b
        }
    } else if a > b {
        a
    } else {
        b
    }
}

fn java_min(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else if a == 0.0 && b == 0.0 {
        if a.is_sign_negative() {
            a
        } else {
            b
        }
    } else if a < b {
        a
    } else {
        b
    }
}

fn java_pow(x: f64, y: f64) -> f64 {
    if y.is_nan() || (x.is_nan() && y != 0.0) || (x.abs() == 1.0 && y.is_infinite()) {
        return f64::NAN;
    }
    x.powf(y)
}

fn round_d(x: f64) -> i64 {
    if x.is_nan() {
        return 0;
    }
    let f = x.floor();
    let r = if x - f >= 0.5 { f + 1.0 } else { f };
    r as i64
}

fn round_f(x: f32) -> i32 {
    if x.is_nan() {
        return 0;
    }
    let f = x.floor();
    let r = if x - f >= 0.5 { f + 1.0 } else { f };
    r as i32
}

fn floor_div(x: i64, y: i64) -> i64 {
    let q = x.wrapping_div(y);
    if (x % y != 0) && ((x < 0) != (y < 0)) {
        q - 1
    } else {
        q
    }
}

fn floor_mod(x: i64, y: i64) -> i64 {
    let m = x.wrapping_rem(y);
    if m != 0 && ((m < 0) != (y < 0)) {
        m + y
    } else {
        m
    }
}

fn java_whitespace(c: u16) -> bool {
    matches!(c, 0x09..=0x0d | 0x1c..=0x1f)
        || (char::from_u32(c as u32).is_some_and(|ch| ch.is_whitespace()) && !matches!(c, 0x00a0 | 0x2007 | 0x202f) && c != 0x85)
}

fn upper(c: u16) -> u16 {
    match char::from_u32(c as u32) {
        Some(ch) => {
            let mut it = ch.to_uppercase();
            match (it.next(), it.next()) {
                (Some(u), None) if (u as u32) < 0x10000 => u as u16,
                _ => c,
            }
        }
        None => c,
    }
}

fn lower(c: u16) -> u16 {
    match char::from_u32(c as u32) {
        Some(ch) => {
            let mut it = ch.to_lowercase();
            match (it.next(), it.next()) {
                (Some(u), None) if (u as u32) < 0x10000 => u as u16,
                _ => c,
            }
        }
        None => c,
    }
}

fn find_sub(hay: &[u16], needle: &[u16], from: usize) -> Option<usize> {
    if needle.is_empty() {
        return Some(from.min(hay.len()));
    }
    if needle.len() > hay.len() {
        return None;
    }
    (from..=hay.len() - needle.len()).find(|&i| hay[i..i + needle.len()] == *needle)
}

fn rfind_sub(hay: &[u16], needle: &[u16]) -> Option<usize> {
    if needle.len() > hay.len() {
        return None;
    }
    (0..=hay.len() - needle.len()).rev().find(|&i| hay[i..i + needle.len()] == *needle)
}

/// `String.compareTo`: difference of the first differing units, else of lengths.
fn str_compare(a: &[u16], b: &[u16]) -> i32 {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return *x as i32 - *y as i32;
        }
    }
    a.len() as i32 - b.len() as i32
}

fn array_label(elem: &Type) -> String {
    match elem {
        Type::Prim(p) => format!("{}[]", p.name()),
        _ => "object array[]".into(),
    }
}

impl Interp<'_> {
    fn streams(&self) -> (Ref, Ref) {
        self.streams.clone().expect("streams")
    }

    fn emit(&mut self, stream: &Value, s: &str) -> R<()> {
        self.charge(s.len() as u64 / 8)?;
        let to_out = match stream {
            Value::Ref(r) => matches!(r.kind, ObjKind::PrintStream(true)),
            _ => true,
        };
        if to_out {
            self.stdout.push_str(s);
        } else {
            self.stderr.push_str(s);
        }
        Ok(())
    }

    fn sioobe(&mut self, msg: String) -> Unwind {
        self.throw(Builtin::StringIndexOutOfBoundsException, Some(msg))
    }

    fn uoe(&mut self) -> Unwind {
        self.throw(Builtin::UnsupportedOperationException, None)
    }

    fn array_parts(&self, v: &Value) -> Option<(Type, Vec<Value>)> {
        match v {
            Value::Ref(r) => match &r.kind {
                ObjKind::Array { elem, data } => Some((elem.clone(), data.borrow().clone())),
                _ => None,
            },
            _ => None,
        }
    }

    fn array_elem_string(&mut self, v: &Value) -> R<String> {
        match v {
            Value::Ref(_) => self.to_jstring(v),
            other => Ok(prim_string(other)),
        }
    }

    /// `Throwable.printStackTrace` text.
    pub fn stack_trace(&mut self, r: &Ref) -> R<String> {
        let mut out = String::new();
        let head = self.to_jstring(&Value::Ref(r.clone()))?;
        out.push_str(&head);
        out.push('\n');
        let Some(data) = self.throw_data(r) else { return Ok(out) };
        for f in &data.frames {
            out.push_str(&format_frame(f));
        }
        let mut enclosing = data.frames.clone();
        let mut seen = vec![r.id];
        let mut cur = data.cause.clone();
        while let Some(c) = cur {
            if seen.contains(&c.id) {
                out.push_str(&format!("\t[CIRCULAR REFERENCE: {}]\n", self.to_jstring(&Value::Ref(c.clone()))?));
                break;
            }
            seen.push(c.id);
            let head = self.to_jstring(&Value::Ref(c.clone()))?;
            out.push_str("Caused by: ");
            out.push_str(&head);
            out.push('\n');
            let d = self.throw_data(&c).unwrap_or_default();
            let mut common = 0;
            while common < d.frames.len() && common < enclosing.len() && d.frames[d.frames.len() - 1 - common] == enclosing[enclosing.len() - 1 - common] {
                common += 1;
            }
            for f in &d.frames[..d.frames.len() - common] {
                out.push_str(&format_frame(f));
            }
            if common > 0 {
                out.push_str(&format!("\t... {common} more\n"));
            }
            enclosing = d.frames.clone();
            cur = d.cause.clone();
        }
        Ok(out)
    }

    fn sort_values(&mut self, items: Vec<Value>) -> R<Vec<Value>> {
        if items.len() <= 1 {
            return Ok(items);
        }
        let mid = items.len() / 2;
        let mut left = items;
        let right = left.split_off(mid);
        let left = self.sort_values(left)?;
        let right = self.sort_values(right)?;
        let mut out = Vec::with_capacity(left.len() + right.len());
        let (mut i, mut j) = (0, 0);
        while i < left.len() && j < right.len() {
            if self.compare_values(&right[j], &left[i])? == Ordering::Less {
                out.push(right[j].clone());
                j += 1;
            } else {
                out.push(left[i].clone());
                i += 1;
            }
        }
        out.extend_from_slice(&left[i..]);
        out.extend_from_slice(&right[j..]);
        Ok(out)
    }

    fn list_parts<'r>(&self, r: &'r Ref) -> Option<(&'r std::cell::RefCell<Vec<Value>>, ListMode, &'r std::cell::Cell<u32>)> {
        match &r.kind {
            ObjKind::List { items, mode, mods } => Some((items, *mode, mods)),
            _ => None,
        }
    }

    fn list_index_error(&mut self, mode: ListMode, i: i32, len: usize) -> Unwind {
        let msg = Some(format!("Index {i} out of bounds for length {len}"));
        match mode {
            ListMode::Mutable => self.throw(Builtin::IndexOutOfBoundsException, msg),
            _ => self.throw(Builtin::ArrayIndexOutOfBoundsException, msg),
        }
    }

    fn junit4_format(&mut self, message: &Value, expected: &Value, actual: &Value) -> R<String> {
        let prefix = match message {
            Value::Null => String::new(),
            m => {
                let s = self.rust_string(m);
                if s.is_empty() {
                    s
                } else {
                    format!("{s} ")
                }
            }
        };
        let es = self.to_jstring(expected)?;
        let as_ = self.to_jstring(actual)?;
        if es == as_ {
            let en = expected.as_ref().map(|r| self.class_name_of(r)).unwrap_or_else(|| "null".into());
            let an = actual.as_ref().map(|r| self.class_name_of(r)).unwrap_or_else(|| "null".into());
            Ok(format!("{prefix}expected: {en}<{es}> but was: {an}<{as_}>"))
        } else {
            Ok(format!("{prefix}expected:<{es}> but was:<{as_}>"))
        }
    }

    fn junit4_fail(&mut self, class: Builtin, message: Option<String>) -> Unwind {
        self.throw(class, message)
    }

    fn junit4_assert_equals(&mut self, message: &Value, expected: &Value, actual: &Value) -> R<()> {
        if self.null_safe_equals(expected, actual)? {
            return Ok(());
        }
        let is_str = |v: &Value| v.as_ref().is_some_and(|r| matches!(r.kind, ObjKind::Str(_)));
        if is_str(expected) && is_str(actual) {
            let e = self.rust_string(expected);
            let a = self.rust_string(actual);
            let (ce, ca) = compact(&e, &a, 20);
            let m = self.opt_string(message);
            let msg = self.junit4_format_strs(m, &ce, &ca);
            return Err(self.junit4_fail(Builtin::ComparisonFailure, Some(msg)));
        }
        let msg = self.junit4_format(message, expected, actual)?;
        Err(self.junit4_fail(Builtin::AssertionError, Some(msg)))
    }

    fn junit4_format_strs(&self, message: Option<String>, e: &str, a: &str) -> String {
        let prefix = match message {
            Some(s) if !s.is_empty() => format!("{s} "),
            _ => String::new(),
        };
        format!("{prefix}expected:<{e}> but was:<{a}>")
    }

    fn jupiter_prefix(&self, message: Option<&Value>) -> String {
        match message.and_then(|m| self.opt_string(m)) {
            Some(s) if !s.trim().is_empty() => format!("{s} ==> "),
            _ => String::new(),
        }
    }

    fn jupiter_values(&mut self, expected: &Value, actual: &Value) -> R<String> {
        let es = self.to_jstring(expected)?;
        let as_ = self.to_jstring(actual)?;
        if es == as_ {
            let fmt = |it: &mut Self, v: &Value, s: &str| match v {
                Value::Ref(r) => format!("{}@{:x}<{s}>", it.class_name_of(r), it.identity_hash(r) as u32),
                _ => "<null>".to_string(),
            };
            let e = fmt(self, expected, &es);
            let a = fmt(self, actual, &as_);
            Ok(format!("expected: {e} but was: {a}"))
        } else {
            Ok(format!("expected: <{es}> but was: <{as_}>"))
        }
    }

    fn jupiter_fail(&mut self, msg: String) -> Unwind {
        self.throw(Builtin::AssertionFailedError, Some(msg))
    }

    fn jupiter_assert_equals(&mut self, expected: &Value, actual: &Value, message: Option<&Value>) -> R<()> {
        if self.null_safe_equals(expected, actual)? {
            return Ok(());
        }
        let msg = format!("{}{}", self.jupiter_prefix(message), self.jupiter_values(expected, actual)?);
        Err(self.jupiter_fail(msg))
    }

    fn junit4_array_equals(&mut self, header: String, expected: &Value, actual: &Value, path: &mut Vec<usize>) -> R<Result<(), (Builtin, String)>> {
        if expected.same(actual) {
            return Ok(Ok(()));
        }
        let (Some((_, e)), Some((_, a))) = (self.array_parts(expected), self.array_parts(actual)) else {
            if expected.is_null() {
                return Ok(Err((Builtin::AssertionError, format!("{header}expected array was null"))));
            }
            return Ok(Err((Builtin::AssertionError, format!("{header}actual array was null"))));
        };
        let mut header = header;
        if e.len() != a.len() {
            header = format!("{header}array lengths differed, expected.length={} actual.length={}", e.len(), a.len());
        }
        for i in 0..e.len().min(a.len()) {
            let (x, y) = (&e[i], &a[i]);
            let both_arrays = self.array_parts(x).is_some() && self.array_parts(y).is_some();
            if both_arrays {
                path.push(i);
                let r = self.junit4_array_equals(header.clone(), x, y, path)?;
                path.pop();
                if r.is_err() {
                    return Ok(r);
                }
                continue;
            }
            let xb = self.boxed_elem(x);
            let yb = self.boxed_elem(y);
            if let Err(Unwind::Throw(ex)) = self.junit4_assert_equals(&Value::Null, &xb, &yb) {
                let inner = self.throw_data(&ex).and_then(|d| d.message).unwrap_or_default();
                let mut idx = String::new();
                for p in path.iter().chain(std::iter::once(&i)) {
                    idx.push_str(&format!("[{p}]"));
                }
                return Ok(Err((Builtin::AssertionError, format!("{header}arrays first differed at element {idx}; {inner}"))));
            }
        }
        if e.len() != a.len() {
            return Ok(Err((Builtin::AssertionError, header)));
        }
        Ok(Ok(()))
    }

    fn boxed_elem(&mut self, v: &Value) -> Value {
        match v {
            Value::Null | Value::Ref(_) => v.clone(),
            Value::Bool(_) => self.box_value(Prim::Boolean, v.clone()),
            Value::Char(_) => self.box_value(Prim::Char, v.clone()),
            Value::Int(_) => self.box_value(Prim::Int, v.clone()),
            Value::Long(_) => self.box_value(Prim::Long, v.clone()),
            Value::Float(_) => self.box_value(Prim::Float, v.clone()),
            Value::Double(_) => self.box_value(Prim::Double, v.clone()),
        }
    }

    fn elem_equals(&mut self, x: &Value, y: &Value) -> R<bool> {
        match (x, y) {
            (Value::Ref(_) | Value::Null, _) => self.null_safe_equals(x, y),
            (Value::Double(a), Value::Double(b)) => Ok(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())),
            (Value::Float(a), Value::Float(b)) => Ok(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())),
            (Value::Bool(a), Value::Bool(b)) => Ok(a == b),
            _ => Ok(x.as_i64() == y.as_i64()),
        }
    }

    fn elem_hash(&mut self, elem: &Type, v: &Value) -> R<i32> {
        match elem {
            Type::Prim(p) => Ok(prim_hash(*p, v)),
            _ => self.hash_code(v),
        }
    }

    pub(super) fn lib(&mut self, m: BuiltinMethod, recv: Option<Value>, args: Vec<Value>, ret: &Type) -> R<Value> {
        use BuiltinMethod as M;
        let _ = ret;
        let this = recv.clone().unwrap_or(Value::Null);
        let obj = this.as_ref().cloned();
        let a0 = args.first().cloned().unwrap_or(Value::Null);
        let a1 = args.get(1).cloned().unwrap_or(Value::Null);
        let a2 = args.get(2).cloned().unwrap_or(Value::Null);
        macro_rules! s16 {
            () => {
                self.str_units(&this)
            };
        }
        macro_rules! need {
            ($v:expr) => {
                if $v.is_null() {
                    return Err(self.npe());
                }
            };
        }
        Ok(match m {
            // Object
            M::ObjEquals => {
                let r = obj.expect("receiver");
                if matches!(r.kind, ObjKind::Instance { .. }) {
                    Value::Bool(this.same(&a0))
                } else {
                    Value::Bool(self.builtin_equals(&r, &a0)?)
                }
            }
            M::ObjHashCode => {
                let r = obj.expect("receiver");
                if matches!(r.kind, ObjKind::Instance { .. }) {
                    Value::Int(self.identity_hash(&r))
                } else {
                    Value::Int(self.builtin_hash(&r)?)
                }
            }
            M::ObjToString => {
                let r = obj.expect("receiver");
                let s = match &r.kind {
                    ObjKind::Instance { throw: Some(_), .. } => self.throwable_to_string(&r)?,
                    ObjKind::Instance { .. } => self.default_to_string(&r)?,
                    _ => self.builtin_to_string(&r)?,
                };
                self.string(&s)
            }
            M::ObjNew => Value::Null,

            // String
            M::StrLength | M::CsLength => match obj.as_ref().map(|r| &r.kind) {
                Some(ObjKind::Builder(b)) => Value::Int(b.borrow().len() as i32),
                _ => Value::Int(s16!().len() as i32),
            },
            M::StrCharAt | M::CsCharAt => {
                let s = match obj.as_ref().map(|r| &r.kind) {
                    Some(ObjKind::Builder(b)) => b.borrow().clone(),
                    _ => s16!(),
                };
                let i = a0.as_i32();
                if i < 0 || i as usize >= s.len() {
                    let builder = matches!(obj.as_ref().map(|r| &r.kind), Some(ObjKind::Builder(_)));
                    let msg = if builder { format!("index {i},length {}", s.len()) } else { format!("index {i}, length {}", s.len()) };
                    return Err(self.sioobe(msg));
                }
                Value::Char(s[i as usize])
            }
            M::StrIsEmpty => Value::Bool(s16!().is_empty()),
            M::StrIsBlank => Value::Bool(s16!().iter().all(|c| java_whitespace(*c))),
            M::StrEquals => Value::Bool(matches!(&a0, Value::Ref(r) if matches!(&r.kind, ObjKind::Str(s) if *s == s16!()))),
            M::StrEqualsIgnoreCase => {
                if a0.is_null() {
                    Value::Bool(false)
                } else {
                    let (x, y) = (s16!(), self.str_units(&a0));
                    Value::Bool(x.len() == y.len() && x.iter().zip(&y).all(|(a, b)| a == b || upper(*a) == upper(*b) || lower(upper(*a)) == lower(upper(*b))))
                }
            }
            M::StrHashCode => Value::Int(jfmt::string_hash(&s16!())),
            M::StrCompareTo => {
                need!(a0);
                Value::Int(str_compare(&s16!(), &self.str_units(&a0)))
            }
            M::StrCompareToIgnoreCase => {
                need!(a0);
                let f = |s: Vec<u16>| s.into_iter().map(|c| lower(upper(c))).collect::<Vec<u16>>();
                Value::Int(str_compare(&f(s16!()), &f(self.str_units(&a0))))
            }
            M::StrSubstring1 | M::StrSubstring2 => {
                let s = s16!();
                let b = a0.as_i32();
                let e = if m == M::StrSubstring2 { a1.as_i32() } else { s.len() as i32 };
                if b < 0 || e > s.len() as i32 || b > e {
                    return Err(self.sioobe(format!("begin {b}, end {e}, length {}", s.len())));
                }
                self.string16(s[b as usize..e as usize].to_vec())
            }
            M::StrIndexOfStr | M::StrIndexOfStrFrom => {
                need!(a0);
                let from = if m == M::StrIndexOfStrFrom { a1.as_i32().max(0) as usize } else { 0 };
                let s = s16!();
                Value::Int(if from > s.len() { -1 } else { find_sub(&s, &self.str_units(&a0), from).map(|i| i as i32).unwrap_or(-1) })
            }
            M::StrIndexOfChar => {
                let c = a0.as_i32();
                Value::Int(s16!().iter().position(|u| *u as i32 == c).map(|i| i as i32).unwrap_or(-1))
            }
            M::StrLastIndexOfStr => {
                need!(a0);
                Value::Int(rfind_sub(&s16!(), &self.str_units(&a0)).map(|i| i as i32).unwrap_or(-1))
            }
            M::StrLastIndexOfChar => {
                let c = a0.as_i32();
                Value::Int(s16!().iter().rposition(|u| *u as i32 == c).map(|i| i as i32).unwrap_or(-1))
            }
            M::StrContains => {
                need!(a0);
                let needle = self.to_jstring16(&a0)?;
                Value::Bool(find_sub(&s16!(), &needle, 0).is_some())
            }
            M::StrStartsWith => {
                need!(a0);
                Value::Bool(s16!().starts_with(&self.str_units(&a0)))
            }
            M::StrEndsWith => {
                need!(a0);
                Value::Bool(s16!().ends_with(&self.str_units(&a0)))
            }
            M::StrToUpperCase => {
                let s = self.rust_string(&this).to_uppercase();
                self.string(&s)
            }
            M::StrToLowerCase => {
                let s = self.rust_string(&this).to_lowercase();
                self.string(&s)
            }
            M::StrTrim => {
                let s = s16!();
                let b = s.iter().position(|c| *c > b' ' as u16).unwrap_or(s.len());
                let e = s.iter().rposition(|c| *c > b' ' as u16).map(|i| i + 1).unwrap_or(b);
                if b == 0 && e == s.len() {
                    this.clone()
                } else {
                    self.string16(s[b..e.max(b)].to_vec())
                }
            }
            M::StrStrip => {
                let s = s16!();
                let b = s.iter().position(|c| !java_whitespace(*c)).unwrap_or(s.len());
                let e = s.iter().rposition(|c| !java_whitespace(*c)).map(|i| i + 1).unwrap_or(b);
                self.string16(s[b..e.max(b)].to_vec())
            }
            M::StrConcat => {
                need!(a0);
                let mut s = s16!();
                s.extend(self.str_units(&a0));
                self.charge(s.len() as u64)?;
                self.string16(s)
            }
            M::StrReplaceChar => {
                let (from, to) = (a0.as_i32() as u16, a1.as_i32() as u16);
                let s: Vec<u16> = s16!().into_iter().map(|c| if c == from { to } else { c }).collect();
                self.string16(s)
            }
            M::StrReplace => {
                need!(a0);
                need!(a1);
                let target = self.to_jstring(&a0)?;
                let repl = self.to_jstring(&a1)?;
                let s = self.rust_string(&this).replace(&target, &repl);
                self.charge(s.len() as u64)?;
                self.string(&s)
            }
            M::StrToCharArray => {
                let s = s16!();
                self.charge(s.len() as u64)?;
                self.new_array(Type::CHAR, s.into_iter().map(Value::Char).collect())
            }
            M::StrToString | M::CsToString => match obj.as_ref().map(|r| &r.kind) {
                Some(ObjKind::Str(_)) => this.clone(),
                _ => {
                    let s = self.to_jstring16(&this)?;
                    self.string16(s)
                }
            },
            M::StrIntern => {
                let s = self.rust_string(&this);
                self.intern(&s)
            }
            M::StrRepeat => {
                let n = a0.as_i32();
                if n < 0 {
                    return Err(self.throw(Builtin::IllegalArgumentException, Some(format!("count is negative: {n}"))));
                }
                let s = s16!();
                self.charge(s.len() as u64 * n as u64)?;
                self.string16(s.repeat(n as usize))
            }
            M::StrSplit => {
                need!(a0);
                let s = self.rust_string(&this);
                let pat = self.rust_string(&a0);
                let re = match regex::Regex::new(&pat) {
                    Ok(r) => r,
                    Err(_) => return Err(self.throw(Builtin::IllegalArgumentException, Some(format!("Unclosed or invalid pattern near index 0\n{pat}")))),
                };
                let mut parts: Vec<&str> = Vec::new();
                let mut last = 0;
                let mut matched = false;
                for mt in re.find_iter(&s) {
                    if mt.end() == 0 {
                        continue;
                    }
                    if mt.start() == mt.end() && mt.start() >= s.len() {
                        continue;
                    }
                    matched = true;
                    parts.push(&s[last..mt.start()]);
                    last = mt.end();
                }
                let parts = if !matched {
                    vec![s.as_str()]
                } else {
                    parts.push(&s[last..]);
                    while parts.last().is_some_and(|p| p.is_empty()) {
                        parts.pop();
                    }
                    parts
                };
                let vals: Vec<Value> = parts.iter().map(|p| self.string(p)).collect();
                self.charge(vals.len() as u64)?;
                self.new_array(Type::string(), vals)
            }
            M::StrValueOfBool | M::StrValueOfChar | M::StrValueOfInt | M::StrValueOfLong | M::StrValueOfFloat | M::StrValueOfDouble | M::BoolToStringStatic | M::CharToStringStatic | M::IntToStringStatic | M::LongToStringStatic | M::DblToStringStatic | M::FltToStringStatic => {
                let s = prim_string(&a0);
                self.string(&s)
            }
            M::StrValueOfChars => {
                let s = self.char_array(&a0)?;
                self.string16(s)
            }
            M::StrValueOfObj | M::ObjsToString => {
                let s = self.to_jstring16(&a0)?;
                self.string16(s)
            }
            M::ObjsToStringDefault => {
                if a0.is_null() {
                    a1.clone()
                } else {
                    let s = self.to_jstring16(&a0)?;
                    self.string16(s)
                }
            }
            M::StrFormat => {
                need!(a0);
                let fmt = self.rust_string(&a0);
                let items = self.array_parts(&a1).map(|(_, d)| d).unwrap_or_default();
                let s = self.format(&fmt, &items)?;
                self.string(&s)
            }
            M::StrJoin => {
                need!(a0);
                let delim = self.to_jstring(&a0)?;
                let mut items = self.array_parts(&a1).map(|(_, d)| d).unwrap_or_default();
                if items.len() == 1 {
                    if let Some(r) = items[0].as_ref() {
                        if matches!(r.kind, ObjKind::List { .. } | ObjKind::Set(..) | ObjKind::MapView(..)) {
                            items = self.collection_items(&items[0].clone())?;
                        }
                    }
                }
                let mut parts = Vec::new();
                for it in &items {
                    parts.push(self.to_jstring(it)?);
                }
                let s = parts.join(&delim);
                self.string(&s)
            }

            // StringBuilder
            M::SbAppendBool | M::SbAppendChar | M::SbAppendInt | M::SbAppendLong | M::SbAppendFloat | M::SbAppendDouble | M::SbAppendStr | M::SbAppendObj | M::SbAppendChars => {
                let add = if m == M::SbAppendChars { self.char_array(&a0)? } else { self.to_jstring16(&a0)? };
                self.charge(add.len() as u64)?;
                if let Some(ObjKind::Builder(b)) = obj.as_ref().map(|r| &r.kind) {
                    b.borrow_mut().extend(add);
                }
                this.clone()
            }
            M::SbToString => {
                let s = match obj.as_ref().map(|r| &r.kind) {
                    Some(ObjKind::Builder(b)) => b.borrow().clone(),
                    _ => Vec::new(),
                };
                self.string16(s)
            }
            M::SbLength | M::SbIsEmpty | M::SbReverse | M::SbInsertStr | M::SbInsertChar | M::SbInsertInt | M::SbDeleteCharAt | M::SbSetLength | M::SbSetCharAt | M::SbIndexOf | M::SbCharAt => {
                let Some(ObjKind::Builder(b)) = obj.as_ref().map(|r| &r.kind) else { return Ok(Value::Null) };
                let len = b.borrow().len();
                match m {
                    M::SbLength => Value::Int(len as i32),
                    M::SbIsEmpty => Value::Bool(len == 0),
                    M::SbCharAt => {
                        let i = a0.as_i32();
                        if i < 0 || i as usize >= len {
                            return Err(self.sioobe(format!("index {i},length {len}")));
                        }
                        Value::Char(b.borrow()[i as usize])
                    }
                    M::SbReverse => {
                        let mut v = b.borrow().clone();
                        v.reverse();
                        let mut i = 0;
                        while i + 1 < v.len() {
                            if (0xdc00..0xe000).contains(&v[i]) && (0xd800..0xdc00).contains(&v[i + 1]) {
                                v.swap(i, i + 1);
                                i += 2;
                            } else {
                                i += 1;
                            }
                        }
                        *b.borrow_mut() = v;
                        this.clone()
                    }
                    M::SbInsertStr | M::SbInsertChar | M::SbInsertInt => {
                        let i = a0.as_i32();
                        if i < 0 || i as usize > len {
                            return Err(self.sioobe(format!("offset {i}, length {len}")));
                        }
                        let add = self.to_jstring16(&a1)?;
                        self.charge(add.len() as u64)?;
                        let mut v = b.borrow_mut();
                        let tail = v.split_off(i as usize);
                        v.extend(add);
                        v.extend(tail);
                        drop(v);
                        this.clone()
                    }
                    M::SbDeleteCharAt => {
                        let i = a0.as_i32();
                        if i < 0 || i as usize >= len {
                            return Err(self.sioobe(format!("index {i},length {len}")));
                        }
                        b.borrow_mut().remove(i as usize);
                        this.clone()
                    }
                    M::SbSetLength => {
                        let n = a0.as_i32();
                        if n < 0 {
                            return Err(self.sioobe(format!("String index out of range: {n}")));
                        }
                        self.charge(n as u64)?;
                        b.borrow_mut().resize(n as usize, 0);
                        Value::Null
                    }
                    M::SbSetCharAt => {
                        let i = a0.as_i32();
                        if i < 0 || i as usize >= len {
                            return Err(self.sioobe(format!("index {i},length {len}")));
                        }
                        b.borrow_mut()[i as usize] = a1.as_i32() as u16;
                        Value::Null
                    }
                    M::SbIndexOf => {
                        need!(a0);
                        let needle = self.str_units(&a0);
                        Value::Int(find_sub(&b.borrow(), &needle, 0).map(|i| i as i32).unwrap_or(-1))
                    }
                    _ => unreachable!(),
                }
            }
            M::SbNew | M::SbNewStr | M::SbNewCap | M::StrNew | M::StrNewStr | M::StrNewChars | M::ArrayListNew | M::ArrayListNewCap | M::ArrayListNewColl | M::HashSetNew | M::HashSetNewColl | M::HashMapNew | M::ThrNew | M::ThrNewMsg | M::ThrNewMsgCause | M::ThrNewCause | M::AssertionErrorNewObj => Value::Null,

            // Math
            M::MathAbsI => Value::Int(a0.as_i32().wrapping_abs()),
            M::MathAbsJ => Value::Long(a0.as_i64().wrapping_abs()),
            M::MathAbsF => Value::Float(a0.as_f32().abs()),
            M::MathAbsD => Value::Double(a0.as_f64().abs()),
            M::MathMaxI | M::IntMax => Value::Int(a0.as_i32().max(a1.as_i32())),
            M::MathMaxJ => Value::Long(a0.as_i64().max(a1.as_i64())),
            M::MathMaxF => Value::Float(java_max(a0.as_f64(), a1.as_f64()) as f32),
            M::MathMaxD => Value::Double(java_max(a0.as_f64(), a1.as_f64())),
            M::MathMinI | M::IntMin => Value::Int(a0.as_i32().min(a1.as_i32())),
            M::MathMinJ => Value::Long(a0.as_i64().min(a1.as_i64())),
            M::MathMinF => Value::Float(java_min(a0.as_f64(), a1.as_f64()) as f32),
            M::MathMinD => Value::Double(java_min(a0.as_f64(), a1.as_f64())),
            M::MathPow => Value::Double(java_pow(a0.as_f64(), a1.as_f64())),
            M::MathSqrt => Value::Double(a0.as_f64().sqrt()),
            M::MathCbrt => Value::Double(a0.as_f64().cbrt()),
            M::MathFloor => Value::Double(a0.as_f64().floor()),
            M::MathCeil => Value::Double(a0.as_f64().ceil()),
            M::MathRint => Value::Double(a0.as_f64().round_ties_even()),
            M::MathRoundD => Value::Long(round_d(a0.as_f64())),
            M::MathRoundF => Value::Int(round_f(a0.as_f32())),
            M::MathFloorModI | M::MathFloorModJ | M::MathFloorDivI | M::MathFloorDivJ => {
                let (x, y) = (a0.as_i64(), a1.as_i64());
                if y == 0 {
                    return Err(self.throw(Builtin::ArithmeticException, Some("/ by zero".into())));
                }
                match m {
                    M::MathFloorModI => Value::Int(floor_mod(x, y) as i32),
                    M::MathFloorModJ => Value::Long(floor_mod(x, y)),
                    M::MathFloorDivI => Value::Int(floor_div(x, y) as i32),
                    _ => Value::Long(floor_div(x, y)),
                }
            }
            M::MathAddExactI | M::MathSubtractExactI | M::MathMultiplyExactI => {
                let (x, y) = (a0.as_i32(), a1.as_i32());
                let r = match m {
                    M::MathAddExactI => x.checked_add(y),
                    M::MathSubtractExactI => x.checked_sub(y),
                    _ => x.checked_mul(y),
                };
                match r {
                    Some(v) => Value::Int(v),
                    None => return Err(self.throw(Builtin::ArithmeticException, Some("integer overflow".into()))),
                }
            }
            M::MathAddExactJ | M::MathSubtractExactJ | M::MathMultiplyExactJ => {
                let (x, y) = (a0.as_i64(), a1.as_i64());
                let r = match m {
                    M::MathAddExactJ => x.checked_add(y),
                    M::MathSubtractExactJ => x.checked_sub(y),
                    _ => x.checked_mul(y),
                };
                match r {
                    Some(v) => Value::Long(v),
                    None => return Err(self.throw(Builtin::ArithmeticException, Some("long overflow".into()))),
                }
            }
            M::MathNegateExactI => match a0.as_i32().checked_neg() {
                Some(v) => Value::Int(v),
                None => return Err(self.throw(Builtin::ArithmeticException, Some("integer overflow".into()))),
            },
            M::MathToIntExact => {
                let x = a0.as_i64();
                if x < i32::MIN as i64 || x > i32::MAX as i64 {
                    return Err(self.throw(Builtin::ArithmeticException, Some("integer overflow".into())));
                }
                Value::Int(x as i32)
            }
            M::MathSignum => {
                let x = a0.as_f64();
                Value::Double(if x.is_nan() || x == 0.0 { x } else { x.signum() })
            }
            M::MathLog => Value::Double(a0.as_f64().ln()),
            M::MathLog10 => Value::Double(a0.as_f64().log10()),
            M::MathExp => Value::Double(a0.as_f64().exp()),
            M::MathSin => Value::Double(a0.as_f64().sin()),
            M::MathCos => Value::Double(a0.as_f64().cos()),
            M::MathTan => Value::Double(a0.as_f64().tan()),
            M::MathAtan => Value::Double(a0.as_f64().atan()),
            M::MathAtan2 => Value::Double(a0.as_f64().atan2(a1.as_f64())),
            M::MathHypot => Value::Double(a0.as_f64().hypot(a1.as_f64())),

            // System / PrintStream
            M::SysOut => Value::Ref(self.streams().0),
            M::SysErr => Value::Ref(self.streams().1),
            M::SysLineSeparator => self.string("\n"),
            M::SysIdentityHashCode => Value::Int(a0.as_ref().map(|r| self.identity_hash(r)).unwrap_or(0)),
            M::SysArraycopy => {
                let (src, sp, dst, dp, len) = (&args[0], args[1].as_i32(), &args[2], args[3].as_i32(), args[4].as_i32());
                if src.is_null() || dst.is_null() {
                    return Err(self.npe());
                }
                let (Some((se, sd)), Some((de, dd))) = (self.array_parts(src), self.array_parts(dst)) else {
                    return Err(self.throw(Builtin::ArrayStoreException, Some("arraycopy: source type is not an array".into())));
                };
                let compatible = match (&se, &de) {
                    (Type::Prim(a), Type::Prim(b)) => a == b,
                    (Type::Prim(_), _) | (_, Type::Prim(_)) => false,
                    _ => true,
                };
                if !compatible {
                    return Err(self.throw(Builtin::ArrayStoreException, Some(format!("arraycopy: type mismatch: can not copy {} into {}", array_label(&se), array_label(&de)))));
                }
                let sl = array_label(&se).replace("[]", &format!("[{}]", sd.len())).to_string();
                let dl = array_label(&de).replace("[]", &format!("[{}]", dd.len())).to_string();
                let err = if sp < 0 {
                    Some(format!("arraycopy: source index {sp} out of bounds for {sl}"))
                } else if dp < 0 {
                    Some(format!("arraycopy: destination index {dp} out of bounds for {dl}"))
                } else if len < 0 {
                    Some(format!("arraycopy: length {len} is negative"))
                } else if sp as i64 + len as i64 > sd.len() as i64 {
                    Some(format!("arraycopy: last source index {} out of bounds for {sl}", sp as i64 + len as i64))
                } else if dp as i64 + len as i64 > dd.len() as i64 {
                    Some(format!("arraycopy: last destination index {} out of bounds for {dl}", dp as i64 + len as i64))
                } else {
                    None
                };
                if let Some(msg) = err {
                    return Err(self.throw(Builtin::ArrayIndexOutOfBoundsException, Some(msg)));
                }
                let chunk: Vec<Value> = sd[sp as usize..(sp + len) as usize].to_vec();
                for v in &chunk {
                    if de.is_reference() && !v.is_null() && !self.instance_of(v, &de) {
                        let name = v.as_ref().map(|r| self.class_name_of(r)).unwrap_or_default();
                        return Err(self.throw(Builtin::ArrayStoreException, Some(format!("arraycopy: element type mismatch: {name}"))));
                    }
                }
                if let Some(ObjKind::Array { data, .. }) = dst.as_ref().map(|r| &r.kind) {
                    let mut d = data.borrow_mut();
                    for (k, v) in chunk.into_iter().enumerate() {
                        d[dp as usize + k] = v;
                    }
                }
                Value::Null
            }
            M::PsPrintln => {
                self.emit(&this, "\n")?;
                Value::Null
            }
            M::PsPrintlnZ | M::PsPrintlnC | M::PsPrintlnI | M::PsPrintlnJ | M::PsPrintlnF | M::PsPrintlnD | M::PsPrintlnStr | M::PsPrintlnObj | M::PsPrintlnChars | M::PsPrintZ | M::PsPrintC | M::PsPrintI | M::PsPrintJ | M::PsPrintF | M::PsPrintD | M::PsPrintStr | M::PsPrintObj | M::PsPrintChars => {
                let mut s = if matches!(m, M::PsPrintlnChars | M::PsPrintChars) {
                    let units = self.char_array(&a0)?;
                    jfmt::from_utf16(&units)
                } else {
                    self.to_jstring(&a0)?
                };
                if matches!(m, M::PsPrintlnZ | M::PsPrintlnC | M::PsPrintlnI | M::PsPrintlnJ | M::PsPrintlnF | M::PsPrintlnD | M::PsPrintlnStr | M::PsPrintlnObj | M::PsPrintlnChars) {
                    s.push('\n');
                }
                self.emit(&this, &s)?;
                Value::Null
            }
            M::PsPrintf => {
                need!(a0);
                let fmt = self.rust_string(&a0);
                let items = self.array_parts(&a1).map(|(_, d)| d).unwrap_or_default();
                let s = self.format(&fmt, &items)?;
                self.emit(&this, &s)?;
                this.clone()
            }
            M::PsFlush => Value::Null,

            // Boxes
            M::IntParse => Value::Int(self.parse_integral(&a0, 10, i32::MIN as i64, i32::MAX as i64)? as i32),
            M::IntParseRadix => Value::Int(self.parse_integral(&a0, a1.as_i32(), i32::MIN as i64, i32::MAX as i64)? as i32),
            M::IntValueOf => self.box_value(Prim::Int, a0.clone()),
            M::IntValueOfStr => {
                let n = self.parse_integral(&a0, 10, i32::MIN as i64, i32::MAX as i64)?;
                self.box_value(Prim::Int, Value::Int(n as i32))
            }
            M::IntToStringRadix => {
                let s = jfmt::int_radix(a0.as_i32() as i64, a1.as_i32() as u32);
                self.string(&s)
            }
            M::IntCompare => ord_int(a0.as_i32().cmp(&a1.as_i32())),
            M::IntSum => Value::Int(a0.as_i32().wrapping_add(a1.as_i32())),
            M::IntSignum => Value::Int(a0.as_i32().signum()),
            M::IntBitCount => Value::Int(a0.as_i32().count_ones() as i32),
            M::IntToBinaryString => {
                let s = format!("{:b}", a0.as_i32() as u32);
                self.string(&s)
            }
            M::IntToHexString => {
                let s = format!("{:x}", a0.as_i32() as u32);
                self.string(&s)
            }
            M::IntHashCodeStatic => Value::Int(a0.as_i32()),
            M::IntCompareTo | M::LongCompareTo | M::CharCompareTo | M::DblCompareTo => {
                need!(a0);
                let x = self.unbox(this.clone())?;
                let y = self.unbox(a0.clone())?;
                match m {
                    M::CharCompareTo => Value::Int(x.as_i32() - y.as_i32()),
                    M::DblCompareTo => ord_int(java_double_cmp(x.as_f64(), y.as_f64())),
                    _ => ord_int(x.as_i64().cmp(&y.as_i64())),
                }
            }
            M::LongParse => Value::Long(self.parse_integral(&a0, 10, i64::MIN, i64::MAX)?),
            M::LongValueOf => self.box_value(Prim::Long, a0.clone()),
            M::LongCompare => ord_int(a0.as_i64().cmp(&a1.as_i64())),
            M::LongSum => Value::Long(a0.as_i64().wrapping_add(a1.as_i64())),
            M::LongHashCodeStatic => Value::Int(jfmt::long_hash(a0.as_i64())),
            M::DblParse => Value::Double(self.parse_double(&a0)?),
            M::DblValueOf => self.box_value(Prim::Double, a0.clone()),
            M::DblCompare => ord_int(java_double_cmp(a0.as_f64(), a1.as_f64())),
            M::DblIsNaN => Value::Bool(a0.as_f64().is_nan()),
            M::DblIsInfinite => Value::Bool(a0.as_f64().is_infinite()),
            M::DblIsFinite => Value::Bool(a0.as_f64().is_finite()),
            M::DblHashCodeStatic => Value::Int(jfmt::double_hash(a0.as_f64())),
            M::DblIsNaNInst => Value::Bool(self.unbox(this.clone())?.as_f64().is_nan()),
            M::FltParse => Value::Float(self.parse_double(&a0)? as f32),
            M::FltValueOf => self.box_value(Prim::Float, a0.clone()),
            M::FltCompare => ord_int(java_double_cmp(a0.as_f64(), a1.as_f64())),
            M::FltIsNaN => Value::Bool(a0.as_f32().is_nan()),
            M::ShortValueOf => self.box_value(Prim::Short, a0.clone()),
            M::ShortParse => Value::Int(self.parse_small(&a0, i16::MIN as i64, i16::MAX as i64)? as i32),
            M::ByteValueOf => self.box_value(Prim::Byte, a0.clone()),
            M::ByteParse => Value::Int(self.parse_small(&a0, i8::MIN as i64, i8::MAX as i64)? as i32),
            M::BoolParse => Value::Bool(!a0.is_null() && self.rust_string(&a0).eq_ignore_ascii_case("true")),
            M::BoolValueOf => self.box_value(Prim::Boolean, a0.clone()),
            M::BoolValueOfStr => {
                let b = !a0.is_null() && self.rust_string(&a0).eq_ignore_ascii_case("true");
                self.box_value(Prim::Boolean, Value::Bool(b))
            }
            M::BoolCompare => Value::Int(match (a0.as_bool(), a1.as_bool()) {
                (x, y) if x == y => 0,
                (true, _) => 1,
                _ => -1,
            }),
            M::BoolBooleanValue | M::CharCharValue => self.unbox(this.clone())?,
            M::CharIsDigit | M::CharIsLetter | M::CharIsLetterOrDigit | M::CharIsAlphabetic | M::CharIsWhitespace | M::CharIsUpperCase | M::CharIsLowerCase => {
                let code = a0.as_i32() as u32;
                let ch = char::from_u32(code);
                let digit = |c: char| c.is_ascii_digit() || matches!(c as u32, 0x0660..=0x0669 | 0x06f0..=0x06f9 | 0x0966..=0x096f | 0xff10..=0xff19);
                Value::Bool(match (m, ch) {
                    (_, None) => false,
                    (M::CharIsDigit, Some(c)) => digit(c),
                    (M::CharIsLetter, Some(c)) | (M::CharIsAlphabetic, Some(c)) => c.is_alphabetic(),
                    (M::CharIsLetterOrDigit, Some(c)) => c.is_alphabetic() || digit(c),
                    (M::CharIsWhitespace, Some(_)) => java_whitespace(code as u16),
                    (M::CharIsUpperCase, Some(c)) => c.is_uppercase(),
                    (M::CharIsLowerCase, Some(c)) => c.is_lowercase(),
                    _ => false,
                })
            }
            M::CharToUpperCase => Value::Char(upper(a0.as_i32() as u16)),
            M::CharToLowerCase => Value::Char(lower(a0.as_i32() as u16)),
            M::CharGetNumericValue => {
                let c = a0.as_i32() as u8 as char;
                Value::Int(if a0.as_i32() < 128 { c.to_digit(36).map(|d| d as i32).unwrap_or(-1) } else { -1 })
            }
            M::CharValueOf => self.box_value(Prim::Char, a0.clone()),
            M::NumIntValue | M::NumLongValue | M::NumDoubleValue | M::NumFloatValue | M::NumShortValue | M::NumByteValue => {
                let v = self.unbox(this.clone())?;
                let p = match m {
                    M::NumIntValue => Prim::Int,
                    M::NumLongValue => Prim::Long,
                    M::NumDoubleValue => Prim::Double,
                    M::NumFloatValue => Prim::Float,
                    M::NumShortValue => Prim::Short,
                    _ => Prim::Byte,
                };
                value::convert(&v, p)
            }

            // Objects / Arrays
            M::ObjsEquals => Value::Bool(self.null_safe_equals(&a0, &a1)?),
            M::ObjsHashCode => Value::Int(self.hash_code(&a0)?),
            M::ObjsHash | M::ArrHashCode => match self.array_parts(&a0) {
                None => Value::Int(0),
                Some((elem, items)) => {
                    let mut h = 1i32;
                    for it in &items {
                        h = h.wrapping_mul(31).wrapping_add(self.elem_hash(&elem, it)?);
                    }
                    Value::Int(h)
                }
            },
            M::ObjsRequireNonNull => {
                need!(a0);
                a0.clone()
            }
            M::ObjsRequireNonNullMsg => {
                if a0.is_null() {
                    let msg = self.opt_string(&a1);
                    return Err(self.throw(Builtin::NullPointerException, msg));
                }
                a0.clone()
            }
            M::ObjsIsNull => Value::Bool(a0.is_null()),
            M::ObjsNonNull => Value::Bool(!a0.is_null()),
            M::ArrToString => match self.array_parts(&a0) {
                None => self.string("null"),
                Some((_, items)) => {
                    let mut parts = Vec::new();
                    for it in &items {
                        parts.push(self.array_elem_string(it)?);
                    }
                    let s = format!("[{}]", parts.join(", "));
                    self.string(&s)
                }
            },
            M::ArrSort => {
                need!(a0);
                let (elem, items) = self.array_parts(&a0).expect("array");
                let sorted = match elem {
                    Type::Prim(Prim::Double | Prim::Float) => {
                        let mut v = items;
                        v.sort_by(|x, y| java_double_cmp(x.as_f64(), y.as_f64()));
                        v
                    }
                    Type::Prim(_) => {
                        let mut v = items;
                        v.sort_by_key(|x| x.as_i64());
                        v
                    }
                    _ => self.sort_values(items)?,
                };
                if let Some(ObjKind::Array { data, .. }) = a0.as_ref().map(|r| &r.kind) {
                    *data.borrow_mut() = sorted;
                }
                Value::Null
            }
            M::ArrFill => {
                need!(a0);
                let Some(ObjKind::Array { elem, data }) = a0.as_ref().map(|r| &r.kind) else { return Ok(Value::Null) };
                let v = match elem {
                    Type::Prim(p) => {
                        let raw = self.unbox(a1.clone())?;
                        value::convert(&raw, *p)
                    }
                    _ => {
                        if !a1.is_null() && !self.instance_of(&a1, elem) {
                            let name = a1.as_ref().map(|r| self.class_name_of(r)).unwrap_or_default();
                            return Err(self.throw(Builtin::ArrayStoreException, Some(name)));
                        }
                        a1.clone()
                    }
                };
                for slot in data.borrow_mut().iter_mut() {
                    *slot = v.clone();
                }
                Value::Null
            }
            M::ArrEquals => {
                if a0.same(&a1) {
                    Value::Bool(true)
                } else {
                    match (self.array_parts(&a0), self.array_parts(&a1)) {
                        (Some((_, x)), Some((_, y))) if x.len() == y.len() => {
                            let mut eq = true;
                            for (p, q) in x.iter().zip(&y) {
                                if !self.elem_equals(p, q)? {
                                    eq = false;
                                    break;
                                }
                            }
                            Value::Bool(eq)
                        }
                        _ => Value::Bool(false),
                    }
                }
            }
            M::ArrCopyOf => {
                need!(a0);
                let n = a1.as_i32();
                if n < 0 {
                    return Err(self.throw(Builtin::NegativeArraySizeException, Some(n.to_string())));
                }
                let (elem, mut items) = self.array_parts(&a0).expect("array");
                self.charge(n as u64)?;
                items.resize(n as usize, Value::default_for(&elem));
                self.new_array(elem, items)
            }
            M::ArrCopyOfRange => {
                need!(a0);
                let (from, to) = (a1.as_i32(), a2.as_i32());
                let (elem, items) = self.array_parts(&a0).expect("array");
                if from > to {
                    return Err(self.throw(Builtin::IllegalArgumentException, Some(format!("{from} > {to}"))));
                }
                if from < 0 || from as usize > items.len() {
                    return Err(self.throw(Builtin::ArrayIndexOutOfBoundsException, Some(format!("Array index out of range: {from}"))));
                }
                self.charge((to - from) as u64)?;
                let mut out: Vec<Value> = items[from as usize..(to as usize).min(items.len())].to_vec();
                out.resize((to - from) as usize, Value::default_for(&elem));
                self.new_array(elem, out)
            }
            M::ArrAsList => {
                let items = self.array_parts(&a0).map(|(_, d)| d).unwrap_or_default();
                self.new_list(items, ListMode::FixedSize)
            }

            // Collections
            M::CollSize | M::MapSize => Value::Int(self.collection_len(&this) as i32),
            M::CollIsEmpty | M::MapIsEmpty => Value::Bool(self.collection_len(&this) == 0),
            M::CollContains => Value::Bool(self.contains(&this, &a0)?),
            M::CollAdd => {
                let r = obj.expect("receiver");
                match &r.kind {
                    ObjKind::List { items, mode: ListMode::Mutable, mods } => {
                        self.charge(1)?;
                        items.borrow_mut().push(a0.clone());
                        mods.set(mods.get() + 1);
                        Value::Bool(true)
                    }
                    ObjKind::Set(_, false) => Value::Bool(self.set_add(&r, a0.clone())?),
                    _ => return Err(self.uoe()),
                }
            }
            M::CollRemoveObj => {
                let r = obj.expect("receiver");
                match &r.kind {
                    ObjKind::List { items, mode, mods } => {
                        let idx = self.index_of(&this, &a0)?;
                        match idx {
                            Some(i) => {
                                if *mode != ListMode::Mutable {
                                    return Err(self.uoe());
                                }
                                items.borrow_mut().remove(i);
                                mods.set(mods.get() + 1);
                                Value::Bool(true)
                            }
                            None => {
                                if *mode == ListMode::Immutable {
                                    return Err(self.uoe());
                                }
                                Value::Bool(false)
                            }
                        }
                    }
                    ObjKind::Set(t, false) => match self.map_find(&r, &a0)? {
                        Some(i) => {
                            t.borrow_mut().remove_at(i);
                            Value::Bool(true)
                        }
                        None => Value::Bool(false),
                    },
                    ObjKind::MapView(map, true) => match self.map_find(map, &a0)? {
                        Some(i) => {
                            if let Some(t) = self.table_of(map) {
                                t.borrow_mut().remove_at(i);
                            }
                            Value::Bool(true)
                        }
                        None => Value::Bool(false),
                    },
                    ObjKind::MapView(map, false) => {
                        let values: Vec<Value> = self.table_of(map).map(|t| t.borrow().entries.iter().map(|e| e.value.clone()).collect()).unwrap_or_default();
                        let mut hit = None;
                        for (i, v) in values.iter().enumerate() {
                            if self.null_safe_equals(&a0, v)? {
                                hit = Some(i);
                                break;
                            }
                        }
                        match hit {
                            Some(i) => {
                                if let Some(t) = self.table_of(map) {
                                    t.borrow_mut().remove_at(i);
                                }
                                Value::Bool(true)
                            }
                            None => Value::Bool(false),
                        }
                    }
                    _ => return Err(self.uoe()),
                }
            }
            M::CollClear | M::MapClear => {
                let r = obj.expect("receiver");
                match &r.kind {
                    ObjKind::List { items, mode: ListMode::Mutable, mods } => {
                        items.borrow_mut().clear();
                        mods.set(mods.get() + 1);
                    }
                    ObjKind::Set(t, false) | ObjKind::Map(t) => t.borrow_mut().clear(),
                    ObjKind::MapView(map, _) => {
                        if let Some(t) = self.table_of(map) {
                            t.borrow_mut().clear();
                        }
                    }
                    _ => return Err(self.uoe()),
                }
                Value::Null
            }
            M::CollAddAll => {
                let add = self.collection_items(&a0)?;
                let r = obj.expect("receiver");
                match &r.kind {
                    ObjKind::List { items, mode: ListMode::Mutable, mods } => {
                        self.charge(add.len() as u64)?;
                        let changed = !add.is_empty();
                        items.borrow_mut().extend(add);
                        mods.set(mods.get() + 1);
                        Value::Bool(changed)
                    }
                    ObjKind::Set(_, false) => {
                        let mut changed = false;
                        for x in add {
                            changed |= self.set_add(&r, x)?;
                        }
                        Value::Bool(changed)
                    }
                    _ => return Err(self.uoe()),
                }
            }
            M::ListGet => {
                let r = obj.expect("receiver");
                let (items, mode, _) = self.list_parts(&r).expect("list");
                let i = a0.as_i32();
                let len = items.borrow().len();
                if i < 0 || i as usize >= len {
                    return Err(self.list_index_error(mode, i, len));
                }
                let v = items.borrow()[i as usize].clone();
                v
            }
            M::ListSet => {
                let r = obj.expect("receiver");
                let (items, mode, _) = self.list_parts(&r).expect("list");
                if mode == ListMode::Immutable {
                    return Err(self.uoe());
                }
                let i = a0.as_i32();
                let len = items.borrow().len();
                if i < 0 || i as usize >= len {
                    return Err(self.list_index_error(mode, i, len));
                }
                let old = std::mem::replace(&mut items.borrow_mut()[i as usize], a1.clone());
                old
            }
            M::ListAddAt => {
                let r = obj.expect("receiver");
                let (items, mode, mods) = self.list_parts(&r).expect("list");
                if mode != ListMode::Mutable {
                    return Err(self.uoe());
                }
                let i = a0.as_i32();
                let len = items.borrow().len();
                if i < 0 || i as usize > len {
                    return Err(self.throw(Builtin::IndexOutOfBoundsException, Some(format!("Index: {i}, Size: {len}"))));
                }
                self.charge(1)?;
                items.borrow_mut().insert(i as usize, a1.clone());
                mods.set(mods.get() + 1);
                Value::Null
            }
            M::ListRemoveAt => {
                let r = obj.expect("receiver");
                let (items, mode, mods) = self.list_parts(&r).expect("list");
                if mode != ListMode::Mutable {
                    return Err(self.uoe());
                }
                let i = a0.as_i32();
                let len = items.borrow().len();
                if i < 0 || i as usize >= len {
                    return Err(self.list_index_error(mode, i, len));
                }
                mods.set(mods.get() + 1);
                let old = items.borrow_mut().remove(i as usize);
                old
            }
            M::ListIndexOf => Value::Int(self.index_of(&this, &a0)?.map(|i| i as i32).unwrap_or(-1)),
            M::ListLastIndexOf => {
                let items = self.collection_items(&this)?;
                let mut hit = -1;
                for (i, it) in items.iter().enumerate().rev() {
                    if self.null_safe_equals(&a0, it)? {
                        hit = i as i32;
                        break;
                    }
                }
                Value::Int(hit)
            }
            M::ListOf => {
                let items = self.array_parts(&a0).map(|(_, d)| d).unwrap_or_default();
                if items.iter().any(|v| v.is_null()) {
                    return Err(self.npe());
                }
                self.new_list(items, ListMode::Immutable)
            }
            M::SetOf => {
                let items = self.array_parts(&a0).map(|(_, d)| d).unwrap_or_default();
                if items.iter().any(|v| v.is_null()) {
                    return Err(self.npe());
                }
                let set = self.alloc_obj(ObjKind::Set(std::cell::RefCell::new(value::HashTable::default()), true));
                for it in items {
                    if !self.set_add(&set, it.clone())? {
                        let s = self.to_jstring(&it)?;
                        return Err(self.throw(Builtin::IllegalArgumentException, Some(format!("duplicate element: {s}"))));
                    }
                }
                Value::Ref(set)
            }
            M::MapPut => {
                let r = obj.expect("receiver");
                self.map_put(&r, a0.clone(), a1.clone())?
            }
            M::MapGet | M::MapGetOrDefault | M::MapContainsKey | M::MapRemove => {
                let r = obj.expect("receiver");
                let hit = self.map_find(&r, &a0)?;
                let t = self.table_of(&r).expect("map table");
                match (m, hit) {
                    (M::MapGet, Some(i)) | (M::MapGetOrDefault, Some(i)) => t.borrow().entries[i].value.clone(),
                    (M::MapGet, None) => Value::Null,
                    (M::MapGetOrDefault, None) => a1.clone(),
                    (M::MapContainsKey, h) => Value::Bool(h.is_some()),
                    (M::MapRemove, Some(i)) => t.borrow_mut().remove_at(i).value,
                    _ => Value::Null,
                }
            }
            M::MapContainsValue => {
                let r = obj.expect("receiver");
                let values: Vec<Value> = self.table_of(&r).map(|t| t.borrow().entries.iter().map(|e| e.value.clone()).collect()).unwrap_or_default();
                let mut found = false;
                for v in &values {
                    if self.null_safe_equals(&a0, v)? {
                        found = true;
                        break;
                    }
                }
                Value::Bool(found)
            }
            M::MapPutIfAbsent => {
                let r = obj.expect("receiver");
                match self.map_find(&r, &a0)? {
                    Some(i) => {
                        let t = self.table_of(&r).expect("map table");
                        let cur = t.borrow().entries[i].value.clone();
                        if cur.is_null() {
                            t.borrow_mut().entries[i].value = a1.clone();
                        }
                        cur
                    }
                    None => self.map_put(&r, a0.clone(), a1.clone())?,
                }
            }
            M::MapKeySet | M::MapValues => {
                let r = obj.expect("receiver");
                Value::Ref(self.alloc_obj(ObjKind::MapView(r, m == M::MapKeySet)))
            }

            // Throwable
            M::ThrGetMessage => {
                let r = obj.expect("receiver");
                self.throw_message(&r)
            }
            M::ThrGetLocalizedMessage => {
                let r = obj.expect("receiver");
                match &r.kind {
                    ObjKind::Instance { class, .. } => match self.find_impl(*class, "getMessage()") {
                        Some((c, mi)) => self.invoke(c, mi, this.clone(), Vec::new())?,
                        None => self.throw_message(&r),
                    },
                    _ => self.throw_message(&r),
                }
            }
            M::ThrGetCause => {
                let r = obj.expect("receiver");
                self.throw_data(&r).and_then(|d| d.cause).map(Value::Ref).unwrap_or(Value::Null)
            }
            M::ThrToString => {
                let r = obj.expect("receiver");
                let s = self.throwable_to_string(&r)?;
                self.string(&s)
            }
            M::ThrPrintStackTrace => {
                let r = obj.expect("receiver");
                let s = self.stack_trace(&r)?;
                self.stderr.push_str(&s);
                Value::Null
            }

            // JUnit 4
            M::JuAssertTrue | M::JuAssertTrueMsg | M::JuAssertFalse | M::JuAssertFalseMsg | M::JuAssertNotNull | M::JuAssertNotNullMsg => {
                let with_msg = matches!(m, M::JuAssertTrueMsg | M::JuAssertFalseMsg | M::JuAssertNotNullMsg);
                let (msg, v) = if with_msg { (self.opt_string(&a0), a1.clone()) } else { (None, a0.clone()) };
                let ok = match m {
                    M::JuAssertTrue | M::JuAssertTrueMsg => v.as_bool(),
                    M::JuAssertFalse | M::JuAssertFalseMsg => !v.as_bool(),
                    _ => !v.is_null(),
                };
                if !ok {
                    return Err(self.junit4_fail(Builtin::AssertionError, msg));
                }
                Value::Null
            }
            M::JuAssertEqualsLong | M::JuAssertEqualsLongMsg => {
                let (msg, e, a) = if m == M::JuAssertEqualsLongMsg { (a0.clone(), a1.as_i64(), a2.as_i64()) } else { (Value::Null, a0.as_i64(), a1.as_i64()) };
                if e != a {
                    let eb = self.box_value(Prim::Long, Value::Long(e));
                    let ab = self.box_value(Prim::Long, Value::Long(a));
                    let s = self.junit4_format(&msg, &eb, &ab)?;
                    return Err(self.junit4_fail(Builtin::AssertionError, Some(s)));
                }
                Value::Null
            }
            M::JuAssertEqualsDouble | M::JuAssertEqualsDoubleMsg | M::JuAssertEqualsFloat => {
                let (msg, e, a, d) = if m == M::JuAssertEqualsDoubleMsg { (a0.clone(), a1.as_f64(), a2.as_f64(), args[3].as_f64()) } else { (Value::Null, a0.as_f64(), a1.as_f64(), a2.as_f64()) };
                let different = java_double_cmp(e, a) != Ordering::Equal && !((e - a).abs() <= d);
                if different {
                    let p = if m == M::JuAssertEqualsFloat { Prim::Float } else { Prim::Double };
                    let eb = self.box_value(p, value::convert(&Value::Double(e), p));
                    let ab = self.box_value(p, value::convert(&Value::Double(a), p));
                    let s = self.junit4_format(&msg, &eb, &ab)?;
                    return Err(self.junit4_fail(Builtin::AssertionError, Some(s)));
                }
                Value::Null
            }
            M::JuAssertEqualsObj => {
                self.junit4_assert_equals(&Value::Null, &a0, &a1)?;
                Value::Null
            }
            M::JuAssertEqualsObjMsg => {
                self.junit4_assert_equals(&a0, &a1, &a2)?;
                Value::Null
            }
            M::JuAssertNotEqualsObj | M::JuAssertNotEqualsLong => {
                let (first, second) = if m == M::JuAssertNotEqualsLong {
                    (self.box_value(Prim::Long, a0.clone()), self.box_value(Prim::Long, a1.clone()))
                } else {
                    (a0.clone(), a1.clone())
                };
                if self.null_safe_equals(&first, &second)? {
                    let s = self.to_jstring(&second)?;
                    return Err(self.junit4_fail(Builtin::AssertionError, Some(format!("Values should be different. Actual: {s}"))));
                }
                Value::Null
            }
            M::JuAssertNull | M::JuAssertNullMsg => {
                let (msg, v) = if m == M::JuAssertNullMsg { (self.opt_string(&a0), a1.clone()) } else { (None, a0.clone()) };
                if !v.is_null() {
                    let prefix = msg.map(|s| format!("{s} ")).unwrap_or_default();
                    let s = self.to_jstring(&v)?;
                    return Err(self.junit4_fail(Builtin::AssertionError, Some(format!("{prefix}expected null, but was:<{s}>"))));
                }
                Value::Null
            }
            M::JuAssertSame => {
                if !a0.same(&a1) {
                    let (e, a) = (self.to_jstring(&a0)?, self.to_jstring(&a1)?);
                    return Err(self.junit4_fail(Builtin::AssertionError, Some(format!("expected same:<{e}> was not:<{a}>"))));
                }
                Value::Null
            }
            M::JuAssertNotSame => {
                if a0.same(&a1) {
                    return Err(self.junit4_fail(Builtin::AssertionError, Some("expected not same".into())));
                }
                Value::Null
            }
            M::JuFail => return Err(self.junit4_fail(Builtin::AssertionError, None)),
            M::JuFailMsg => {
                let msg = self.opt_string(&a0);
                return Err(self.junit4_fail(Builtin::AssertionError, msg));
            }
            M::JuAssertArrayEquals => {
                if let Err((b, msg)) = self.junit4_array_equals(String::new(), &a0, &a1, &mut Vec::new())? {
                    return Err(self.junit4_fail(b, Some(msg)));
                }
                Value::Null
            }

            // JUnit 5
            M::JpAssertTrue | M::JpAssertTrueMsg | M::JpAssertFalse | M::JpAssertFalseMsg => {
                let want = matches!(m, M::JpAssertTrue | M::JpAssertTrueMsg);
                if a0.as_bool() != want {
                    let prefix = self.jupiter_prefix(args.get(1));
                    return Err(self.jupiter_fail(format!("{prefix}expected: <{want}> but was: <{}>", !want)));
                }
                Value::Null
            }
            M::JpAssertEqualsInt | M::JpAssertEqualsIntMsg | M::JpAssertEqualsLong | M::JpAssertEqualsLongMsg | M::JpAssertEqualsDouble => {
                let p = match m {
                    M::JpAssertEqualsInt | M::JpAssertEqualsIntMsg => Prim::Int,
                    M::JpAssertEqualsDouble => Prim::Double,
                    _ => Prim::Long,
                };
                let eb = self.box_value(p, a0.clone());
                let ab = self.box_value(p, a1.clone());
                self.jupiter_assert_equals(&eb, &ab, args.get(2))?;
                Value::Null
            }
            M::JpAssertEqualsDoubleDelta => {
                let (e, a, d) = (a0.as_f64(), a1.as_f64(), a2.as_f64());
                if java_double_cmp(e, a) != Ordering::Equal && !((e - a).abs() <= d) {
                    let eb = self.box_value(Prim::Double, a0.clone());
                    let ab = self.box_value(Prim::Double, a1.clone());
                    let s = self.jupiter_values(&eb, &ab)?;
                    return Err(self.jupiter_fail(s));
                }
                Value::Null
            }
            M::JpAssertEqualsObj | M::JpAssertEqualsObjMsg => {
                self.jupiter_assert_equals(&a0, &a1, args.get(2))?;
                Value::Null
            }
            M::JpAssertNotEqualsObj => {
                if self.null_safe_equals(&a0, &a1)? {
                    let s = self.to_jstring(&a1)?;
                    return Err(self.jupiter_fail(format!("expected: not equal but was: <{s}>")));
                }
                Value::Null
            }
            M::JpAssertNull | M::JpAssertNullMsg => {
                if !a0.is_null() {
                    let prefix = self.jupiter_prefix(args.get(1));
                    let s = self.jupiter_values(&Value::Null, &a0)?;
                    return Err(self.jupiter_fail(format!("{prefix}{s}")));
                }
                Value::Null
            }
            M::JpAssertNotNull | M::JpAssertNotNullMsg => {
                if a0.is_null() {
                    let prefix = self.jupiter_prefix(args.get(1));
                    return Err(self.jupiter_fail(format!("{prefix}expected: not <null>")));
                }
                Value::Null
            }
            M::JpAssertSame => {
                if !a0.same(&a1) {
                    let s = self.jupiter_values(&a0, &a1)?;
                    return Err(self.jupiter_fail(s));
                }
                Value::Null
            }
            M::JpFail => {
                let msg = self.opt_string(&a0);
                return Err(self.throw(Builtin::AssertionFailedError, msg));
            }
            M::JpAssertArrayEquals => {
                match (self.array_parts(&a0), self.array_parts(&a1)) {
                    (Some((_, e)), Some((_, a))) => {
                        if e.len() != a.len() {
                            return Err(self.jupiter_fail(format!("array lengths differ, expected: <{}> but was: <{}>", e.len(), a.len())));
                        }
                        for (i, (x, y)) in e.iter().zip(&a).enumerate() {
                            if !self.elem_equals(x, y)? {
                                let (xs, ys) = (self.array_elem_string(x)?, self.array_elem_string(y)?);
                                return Err(self.jupiter_fail(format!("array contents differ at index [{i}], expected: <{xs}> but was: <{ys}>")));
                            }
                        }
                    }
                    (None, None) => {}
                    (None, Some(_)) => return Err(self.jupiter_fail("expected array was <null> but actual array was not".into())),
                    (Some(_), None) => return Err(self.jupiter_fail("expected array was not <null> but actual array was <null>".into())),
                }
                Value::Null
            }
        })
    }
}

pub fn format_frame(f: &crate::value::Frame) -> String {
    let loc = match (&f.file, f.line) {
        (Some(file), Some(l)) => format!("{file}:{l}"),
        (Some(file), None) => file.clone(),
        (None, _) => "Unknown Source".into(),
    };
    format!("\tat {}.{}({loc})\n", f.class, f.method)
}

/// JUnit 4's string comparison compaction with `context` characters of
/// shared prefix and suffix.
pub fn compact(expected: &str, actual: &str, context: usize) -> (String, String) {
    let e: Vec<char> = expected.chars().collect();
    let a: Vec<char> = actual.chars().collect();
    if e == a {
        return (expected.to_string(), actual.to_string());
    }
    let end = e.len().min(a.len());
    let mut prefix = 0;
    while prefix < end && e[prefix] == a[prefix] {
        prefix += 1;
    }
    let mut es = e.len() as isize - 1;
    let mut as_ = a.len() as isize - 1;
    while as_ >= prefix as isize && es >= prefix as isize {
        if e[es as usize] != a[as_ as usize] {
            break;
        }
        as_ -= 1;
        es -= 1;
    }
    let suffix = (e.len() as isize - es) as usize;
    let common_prefix = || -> String {
        let start = prefix.saturating_sub(context);
        let mut s = String::new();
        if prefix > context {
            s.push_str("...");
        }
        s.extend(&e[start..prefix]);
        s
    };
    let common_suffix = || -> String {
        let from = e.len() + 1 - suffix;
        let to = (from + context).min(e.len());
        let mut s: String = e[from..to].iter().collect();
        if (from as isize) < e.len() as isize - context as isize {
            s.push_str("...");
        }
        s
    };
    let compact_one = |src: &[char]| -> String {
        let mid: String = src[prefix..src.len() + 1 - suffix].iter().collect();
        let mut out = format!("[{mid}]");
        if prefix > 0 {
            out = common_prefix() + &out;
        }
        if suffix > 0 {
            out.push_str(&common_suffix());
        }
        out
    };
    (compact_one(&e), compact_one(&a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compaction_matches_junit() {
        assert_eq!(compact("abc", "abd", 20), ("ab[c]".into(), "ab[d]".into()));
        assert_eq!(compact("hello world", "hello there", 20), ("hello [world]".into(), "hello [there]".into()));
        assert_eq!(compact("a", "b", 20), ("[a]".into(), "[b]".into()));
        assert_eq!(compact("ab", "abc", 20), ("ab[]".into(), "ab[c]".into()));
        assert_eq!(compact("xbc", "abc", 20), ("[x]bc".into(), "[a]bc".into()));
        let long_e = format!("{}X{}", "p".repeat(30), "s".repeat(30));
        let long_a = format!("{}Y{}", "p".repeat(30), "s".repeat(30));
        let (ce, _) = compact(&long_e, &long_a, 20);
        assert_eq!(ce, format!("...{}[X]{}...", "p".repeat(20), "s".repeat(20)));
    }

    #[test]
    fn math_helpers() {
        assert_eq!(round_d(2.5), 3);
        assert_eq!(round_d(-2.5), -2);
        assert_eq!(round_d(0.49999999999999994), 0);
        assert_eq!(floor_mod(-7, 3), 2);
        assert_eq!(floor_div(-7, 3), -3);
        assert!(java_pow(1.0, f64::NAN).is_nan());
        assert_eq!(str_compare(&[97, 98], &[97, 100]), -2);
        assert_eq!(str_compare(&[97], &[97, 98, 99]), -2);
    }
}
