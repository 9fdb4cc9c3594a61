//! String conversion, equality, hashing and ordering of runtime values.

use std::cmp::Ordering;

use super::{Interp, Unwind, R};
use crate::jfmt;
use crate::types::{Builtin, Prim};
use crate::value::{HashTable, ObjKind, Ref, Value};

pub(super) fn prim_string(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Char(c) => jfmt::char(*c),
        Value::Int(i) => i.to_string(),
        Value::Long(l) => l.to_string(),
        Value::Float(f) => jfmt::float(*f),
        Value::Double(d) => jfmt::double(*d),
        Value::Ref(_) => String::new(),
    }
}

impl Interp<'_> {
    /// `String.valueOf(v)`, dispatching to user `toString` overrides.
    pub fn to_jstring(&mut self, v: &Value) -> R<String> {
        Ok(jfmt::from_utf16(&self.to_jstring16(v)?))
    }

    pub(super) fn to_jstring16(&mut self, v: &Value) -> R<Vec<u16>> {
        match v {
            Value::Ref(r) => {
                if let ObjKind::Str(s) = &r.kind {
                    return Ok(s.clone());
                }
                let out = self.call_to_string(r)?;
                Ok(match out {
                    Value::Null => jfmt::to_utf16("null"),
                    s => self.str_units(&s),
                })
            }
            other => Ok(jfmt::to_utf16(&prim_string(other))),
        }
    }

    fn call_to_string(&mut self, r: &Ref) -> R<Value> {
        let v = Value::Ref(r.clone());
        if let ObjKind::Instance { class, .. } = &r.kind {
            if let Some((c, m)) = self.find_impl(*class, "toString()") {
                return self.invoke(c, m, v, Vec::new());
            }
        }
        let s = self.builtin_to_string(r)?;
        Ok(self.string(&s))
    }

    pub(super) fn default_to_string(&mut self, r: &Ref) -> R<String> {
        let h = self.hash_code(&Value::Ref(r.clone()))?;
        Ok(format!("{}@{:x}", self.class_name_of(r), h as u32))
    }

    pub(super) fn throwable_to_string(&mut self, r: &Ref) -> R<String> {
        let v = Value::Ref(r.clone());
        let msg = match &r.kind {
            ObjKind::Instance { class, .. } => match self.find_impl(*class, "getLocalizedMessage()").or_else(|| self.find_impl(*class, "getMessage()")) {
                Some((c, m)) => self.invoke(c, m, v, Vec::new())?,
                None => self.throw_message(r),
            },
            _ => self.throw_message(r),
        };
        let name = self.class_name_of(r);
        Ok(match msg {
            Value::Null => name,
            m => format!("{name}: {}", self.rust_string(&m)),
        })
    }

    pub(super) fn throw_message(&mut self, r: &Ref) -> Value {
        match self.throw_cell(r).and_then(|c| c.borrow().message.clone()) {
            Some(m) => self.string(&m),
            None => Value::Null,
        }
    }

    /// `toString` of library objects and the `Object` default.
    pub(super) fn builtin_to_string(&mut self, r: &Ref) -> R<String> {
        Ok(match &r.kind {
            ObjKind::Str(s) => jfmt::from_utf16(s),
            ObjKind::Boxed(_, v) => prim_string(v),
            ObjKind::Builder(b) => jfmt::from_utf16(&b.borrow()),
            ObjKind::Throwable { .. } => self.throwable_to_string(r)?,
            ObjKind::Instance { throw: Some(_), .. } => self.throwable_to_string(r)?,
            ObjKind::List { .. } | ObjKind::Set(..) | ObjKind::MapView(..) => {
                let items = self.collection_items(&Value::Ref(r.clone()))?;
                let mut out = String::from("[");
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    if it.as_ref().is_some_and(|x| std::rc::Rc::ptr_eq(x, r)) {
                        out.push_str("(this Collection)");
                    } else {
                        out.push_str(&self.to_jstring(it)?);
                    }
                }
                out.push(']');
                out
            }
            ObjKind::Map(t) => {
                let entries: Vec<(Value, Value)> = t.borrow().entries.iter().map(|e| (e.key.clone(), e.value.clone())).collect();
                let mut out = String::from("{");
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let self_ref = |x: &Value| x.as_ref().is_some_and(|x| std::rc::Rc::ptr_eq(x, r));
                    out.push_str(&if self_ref(k) { "(this Map)".into() } else { self.to_jstring(k)? });
                    out.push('=');
                    out.push_str(&if self_ref(v) { "(this Map)".into() } else { self.to_jstring(v)? });
                }
                out.push('}');
                out
            }
            _ => self.default_to_string(r)?,
        })
    }

    pub fn identity_hash(&self, r: &Ref) -> i32 {
        super::identity_hash(r.id)
    }

    /// `v.hashCode()` with user overrides; `null` hashes to 0.
    pub fn hash_code(&mut self, v: &Value) -> R<i32> {
        let Value::Ref(r) = v else { return Ok(0) };
        if let ObjKind::Instance { class, .. } = &r.kind {
            if let Some((c, m)) = self.find_impl(*class, "hashCode()") {
                return Ok(self.invoke(c, m, v.clone(), Vec::new())?.as_i32());
            }
            return Ok(self.identity_hash(r));
        }
        self.builtin_hash(r)
    }

    pub(super) fn builtin_hash(&mut self, r: &Ref) -> R<i32> {
        Ok(match &r.kind {
            ObjKind::Str(s) => jfmt::string_hash(s),
            ObjKind::Boxed(p, v) => prim_hash(*p, v),
            ObjKind::List { .. } => {
                let items = self.collection_items(&Value::Ref(r.clone()))?;
                let mut h = 1i32;
                for it in &items {
                    h = h.wrapping_mul(31).wrapping_add(self.hash_code(it)?);
                }
                h
            }
            ObjKind::Set(..) | ObjKind::MapView(_, true) => {
                let items = self.collection_items(&Value::Ref(r.clone()))?;
                let mut h = 0i32;
                for it in &items {
                    h = h.wrapping_add(self.hash_code(it)?);
                }
                h
            }
            ObjKind::Map(t) => {
                let entries: Vec<(Value, Value)> = t.borrow().entries.iter().map(|e| (e.key.clone(), e.value.clone())).collect();
                let mut h = 0i32;
                for (k, v) in &entries {
                    h = h.wrapping_add(self.hash_code(k)? ^ self.hash_code(v)?);
                }
                h
            }
            _ => self.identity_hash(r),
        })
    }

    /// `a.equals(b)` with user overrides. `a` must be non-null.
    pub fn equals(&mut self, a: &Value, b: &Value) -> R<bool> {
        let Value::Ref(r) = a else { return Ok(b.is_null()) };
        if let ObjKind::Instance { class, .. } = &r.kind {
            if let Some((c, m)) = self.find_impl(*class, "equals(java.lang.Object;)") {
                return Ok(self.invoke(c, m, a.clone(), vec![b.clone()])?.as_bool());
            }
            return Ok(a.same(b));
        }
        self.builtin_equals(r, b)
    }

    /// `Objects.equals`.
    pub fn null_safe_equals(&mut self, a: &Value, b: &Value) -> R<bool> {
        if a.same(b) {
            return Ok(true);
        }
        if a.is_null() {
            return Ok(false);
        }
        self.equals(a, b)
    }

    pub(super) fn builtin_equals(&mut self, r: &Ref, b: &Value) -> R<bool> {
        let Value::Ref(o) = b else { return Ok(false) };
        if std::rc::Rc::ptr_eq(r, o) {
            return Ok(true);
        }
        Ok(match (&r.kind, &o.kind) {
            (ObjKind::Str(x), ObjKind::Str(y)) => x == y,
            (ObjKind::Boxed(p, x), ObjKind::Boxed(q, y)) => p == q && prim_bits_eq(x, y),
            (ObjKind::List { .. }, ObjKind::List { .. }) => {
                let xs = self.collection_items(&Value::Ref(r.clone()))?;
                let ys = self.collection_items(b)?;
                if xs.len() != ys.len() {
                    return Ok(false);
                }
                for (x, y) in xs.iter().zip(&ys) {
                    if !self.null_safe_equals(x, y)? {
                        return Ok(false);
                    }
                }
                true
            }
            (ObjKind::Set(..) | ObjKind::MapView(_, true), ObjKind::Set(..) | ObjKind::MapView(_, true)) => {
                let xs = self.collection_items(&Value::Ref(r.clone()))?;
                let ys = self.collection_items(b)?;
                if xs.len() != ys.len() {
                    return Ok(false);
                }
                for y in &ys {
                    if !self.contains(&Value::Ref(r.clone()), y)? {
                        return Ok(false);
                    }
                }
                true
            }
            (ObjKind::Map(x), ObjKind::Map(_)) => {
                let entries: Vec<(Value, Value)> = x.borrow().entries.iter().map(|e| (e.key.clone(), e.value.clone())).collect();
                if entries.len() != self.collection_len(b) {
                    return Ok(false);
                }
                for (k, v) in &entries {
                    match self.map_find(o, k)? {
                        Some(i) => {
                            let ov = match &o.kind {
                                ObjKind::Map(t) => t.borrow().entries[i].value.clone(),
                                _ => Value::Null,
                            };
                            if !self.null_safe_equals(v, &ov)? {
                                return Ok(false);
                            }
                        }
                        None => return Ok(false),
                    }
                }
                true
            }
            _ => false,
        })
    }

    /// `Comparable.compareTo` for natural ordering.
    pub(super) fn compare_values(&mut self, a: &Value, b: &Value) -> R<Ordering> {
        let (Value::Ref(x), Value::Ref(y)) = (a, b) else { return Err(self.npe()) };
        match (&x.kind, &y.kind) {
            (ObjKind::Str(s), ObjKind::Str(t)) => Ok(s.cmp(t)),
            (ObjKind::Boxed(p, u), ObjKind::Boxed(q, v)) if p == q => Ok(match p {
                Prim::Float | Prim::Double => java_double_cmp(u.as_f64(), v.as_f64()),
                Prim::Boolean => u.as_bool().cmp(&v.as_bool()),
                _ => u.as_i64().cmp(&v.as_i64()),
            }),
            (ObjKind::Instance { class, .. }, _) => {
                let hit = {
                    let mut cur = Some(*class);
                    let mut found = None;
                    while let Some(c) = cur {
                        let cls = &self.prog.classes[c];
                        if let Some(m) = cls.methods.iter().position(|m| m.name == "compareTo" && m.params.len() == 1 && !m.is_static && m.body.is_some()) {
                            found = Some((c, m));
                            break;
                        }
                        cur = match cls.superclass {
                            crate::types::ClassRef::User(s) => Some(s),
                            _ => None,
                        };
                    }
                    found
                };
                match hit {
                    Some((c, m)) => {
                        let param = self.prog.classes[c].methods[m].params[0].clone();
                        if !self.instance_of(b, &param) {
                            let from = self.class_name_of(y);
                            return Err(self.throw(Builtin::ClassCastException, Some(format!("class {from} cannot be cast to class {}", self.type_name(&param)))));
                        }
                        let r = self.invoke(c, m, a.clone(), vec![b.clone()])?.as_i32();
                        Ok(r.cmp(&0))
                    }
                    None => Err(self.not_comparable(x)),
                }
            }
            _ => Err(self.not_comparable(x)),
        }
    }

    fn not_comparable(&mut self, x: &Ref) -> Unwind {
        let name = self.class_name_of(x);
        self.throw(Builtin::ClassCastException, Some(format!("class {name} cannot be cast to class java.lang.Comparable")))
    }

    // ---- collections ----

    /// Elements of a list, set, map view or array; NPE on null.
    pub(super) fn collection_items(&mut self, v: &Value) -> R<Vec<Value>> {
        let Value::Ref(r) = v else { return Err(self.npe()) };
        Ok(match &r.kind {
            ObjKind::List { items, .. } => items.borrow().clone(),
            ObjKind::Set(t, _) => t.borrow().entries.iter().map(|e| e.key.clone()).collect(),
            ObjKind::MapView(m, keys) => match &m.kind {
                ObjKind::Map(t) => t.borrow().entries.iter().map(|e| if *keys { e.key.clone() } else { e.value.clone() }).collect(),
                _ => Vec::new(),
            },
            ObjKind::Array { data, .. } => data.borrow().clone(),
            _ => Vec::new(),
        })
    }

    pub(super) fn collection_len(&self, v: &Value) -> usize {
        let Value::Ref(r) = v else { return 0 };
        match &r.kind {
            ObjKind::List { items, .. } => items.borrow().len(),
            ObjKind::Set(t, _) | ObjKind::Map(t) => t.borrow().entries.len(),
            ObjKind::MapView(m, _) => self.collection_len(&Value::Ref(m.clone())),
            _ => 0,
        }
    }

    pub(super) fn table_of<'r>(&self, r: &'r Ref) -> Option<&'r std::cell::RefCell<HashTable>> {
        match &r.kind {
            ObjKind::Set(t, _) | ObjKind::Map(t) => Some(t),
            _ => None,
        }
    }

    /// Entry index of `key` in a set or map.
    pub(super) fn map_find(&mut self, r: &Ref, key: &Value) -> R<Option<usize>> {
        let Some(t) = self.table_of(r) else { return Ok(None) };
        let h = self.hash_code(key)?;
        let cands: Vec<(usize, Value)> = {
            let tb = t.borrow();
            tb.candidates(h).map(|i| (i, tb.entries[i].key.clone())).collect()
        };
        for (i, k) in cands {
            if k.same(key) || (!key.is_null() && self.equals(key, &k)?) {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub(super) fn contains(&mut self, coll: &Value, x: &Value) -> R<bool> {
        let Value::Ref(r) = coll else { return Err(self.npe()) };
        match &r.kind {
            ObjKind::Set(..) => Ok(self.map_find(r, x)?.is_some()),
            ObjKind::MapView(m, true) => Ok(self.map_find(m, x)?.is_some()),
            _ => Ok(self.index_of(coll, x)?.is_some()),
        }
    }

    pub(super) fn index_of(&mut self, coll: &Value, x: &Value) -> R<Option<usize>> {
        let items = self.collection_items(coll)?;
        for (i, it) in items.iter().enumerate() {
            if self.null_safe_equals(x, it)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub(super) fn set_add(&mut self, set: &Ref, x: Value) -> R<bool> {
        if self.map_find(set, &x)?.is_some() {
            return Ok(false);
        }
        let h = self.hash_code(&x)?;
        self.charge(1)?;
        if let Some(t) = self.table_of(set) {
            t.borrow_mut().insert(x, Value::Null, h);
        }
        Ok(true)
    }

    /// `put`; returns the previous value.
    pub(super) fn map_put(&mut self, map: &Ref, k: Value, v: Value) -> R<Value> {
        if let Some(i) = self.map_find(map, &k)? {
            let t = self.table_of(map).expect("map table");
            let old = std::mem::replace(&mut t.borrow_mut().entries[i].value, v);
            return Ok(old);
        }
        let h = self.hash_code(&k)?;
        self.charge(1)?;
        if let Some(t) = self.table_of(map) {
            t.borrow_mut().insert(k, v, h);
        }
        Ok(Value::Null)
    }

    pub(super) fn char_array(&mut self, v: &Value) -> R<Vec<u16>> {
        let Value::Ref(r) = v else { return Err(self.npe()) };
        Ok(match &r.kind {
            ObjKind::Array { data, .. } => data.borrow().iter().map(|c| c.as_i32() as u16).collect(),
            _ => Vec::new(),
        })
    }
}

pub(super) fn prim_hash(p: Prim, v: &Value) -> i32 {
    match p {
        Prim::Boolean => {
            if v.as_bool() {
                1231
            } else {
                1237
            }
        }
        Prim::Long => jfmt::long_hash(v.as_i64()),
        Prim::Double => jfmt::double_hash(v.as_f64()),
        Prim::Float => {
            let f = v.as_f32();
            if f.is_nan() {
                0x7fc0_0000
            } else {
                f.to_bits() as i32
            }
        }
        _ => v.as_i32(),
    }
}

/// `Double.equals`: bitwise, with all NaNs equal.
fn prim_bits_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Double(x), Value::Double(y)) => (x.is_nan() && y.is_nan()) || x.to_bits() == y.to_bits(),
        (Value::Float(x), Value::Float(y)) => (x.is_nan() && y.is_nan()) || x.to_bits() == y.to_bits(),
        (Value::Bool(x), Value::Bool(y)) => x == y,
        _ => a.as_i64() == b.as_i64(),
    }
}

/// `Double.compare`: -0.0 below 0.0, NaN above everything.
pub(super) fn java_double_cmp(a: f64, b: f64) -> Ordering {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ => a.total_cmp(&b),
    }
}
