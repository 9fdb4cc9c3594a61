//! Runtime values and the primitive operations shared by constant folding
//! and the interpreter.

use std::cell::{Cell, RefCell};
use std::rc::Rc;

use crate::ir::{BinOp, Const, UnOp};
use crate::types::{Builtin, Prim, Type};

#[derive(Clone, Debug)]
pub enum Value {
    Null,
    Bool(bool),
    Char(u16),
    /// Also carries `byte` and `short` values.
    Int(i32),
    Long(i64),
    Float(f32),
    Double(f64),
    Ref(Ref),
}

pub type Ref = Rc<Obj>;

#[derive(Debug)]
pub struct Obj {
    pub id: u32,
    pub kind: ObjKind,
}

#[derive(Debug)]
pub enum ObjKind {
    Plain,
    Str(Vec<u16>),
    Boxed(Prim, Value),
    Instance { class: usize, fields: RefCell<Vec<Value>>, throw: Option<RefCell<ThrowData>> },
    Throwable { class: Builtin, data: RefCell<ThrowData> },
    Array { elem: Type, data: RefCell<Vec<Value>> },
    Builder(RefCell<Vec<u16>>),
    List { items: RefCell<Vec<Value>>, mode: ListMode, mods: Cell<u32> },
    Map(RefCell<HashTable>),
    /// The flag marks `Set.of` results.
    Set(RefCell<HashTable>, bool),
    /// `keySet()` (true) or `values()` (false) of a map.
    MapView(Ref, bool),
    PrintStream(bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListMode {
    Mutable,
    /// `Arrays.asList`: elements may be replaced but not added or removed.
    FixedSize,
    Immutable,
}

#[derive(Debug, Clone, Default)]
pub struct ThrowData {
    pub message: Option<String>,
    pub cause: Option<Ref>,
    pub frames: Vec<Frame>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub class: String,
    pub method: String,
    pub file: Option<String>,
    pub line: Option<u32>,
}

/// Entries of a `HashMap`/`HashSet` with the iteration order Java's
/// bucket layout produces: by bucket index under the current capacity,
/// then by insertion.
#[derive(Debug, Clone)]
pub struct HashTable {
    pub entries: Vec<TableEntry>,
    pub capacity: usize,
    /// Structural modification count, checked by iterators.
    pub mods: u32,
    next_seq: u64,
}

#[derive(Debug, Clone)]
pub struct TableEntry {
    pub key: Value,
    pub value: Value,
    pub hash: i32,
    seq: u64,
}

impl Default for HashTable {
    fn default() -> Self {
        HashTable { entries: Vec::new(), capacity: 16, mods: 0, next_seq: 0 }
    }
}

impl HashTable {
    fn bucket(&self, hash: i32) -> usize {
        let h = hash as u32;
        ((h ^ (h >> 16)) as usize) & (self.capacity - 1)
    }

    pub fn insert(&mut self, key: Value, value: Value, hash: i32) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.mods += 1;
        self.entries.push(TableEntry { key, value, hash, seq });
        while self.entries.len() as f64 > self.capacity as f64 * 0.75 {
            self.capacity *= 2;
        }
        self.reorder();
    }

    pub fn remove_at(&mut self, i: usize) -> TableEntry {
        self.mods += 1;
        self.entries.remove(i)
    }

    pub fn clear(&mut self) {
        self.mods += 1;
        self.entries.clear();
    }

    fn reorder(&mut self) {
        let cap = self.capacity;
        let bucket = |h: i32| {
            let h = h as u32;
            ((h ^ (h >> 16)) as usize) & (cap - 1)
        };
        self.entries.sort_by_key(|e| (bucket(e.hash), e.seq));
    }

    /// Indices into `entries` whose hash equals `hash`.
    pub fn candidates(&self, hash: i32) -> impl Iterator<Item = usize> + '_ {
        let b = self.bucket(hash);
        self.entries.iter().enumerate().filter(move |(_, e)| e.hash == hash && self.bucket(e.hash) == b).map(|(i, _)| i)
    }
}

impl Value {
    pub fn from_const(c: &Const) -> Option<Value> {
        Some(match c {
            Const::Bool(b) => Value::Bool(*b),
            Const::Char(c) => Value::Char(*c),
            Const::Int(i) => Value::Int(*i),
            Const::Long(l) => Value::Long(*l),
            Const::Float(f) => Value::Float(*f),
            Const::Double(d) => Value::Double(*d),
            Const::Null => Value::Null,
            Const::Str(_) => return None,
        })
    }

    pub fn to_const(&self, prim: Prim) -> Option<Const> {
        Some(match (self, prim) {
            (Value::Bool(b), _) => Const::Bool(*b),
            (Value::Char(c), _) => Const::Char(*c),
            (Value::Int(i), Prim::Char) => Const::Char(*i as u16),
            (Value::Int(i), _) => Const::Int(*i),
            (Value::Long(l), _) => Const::Long(*l),
            (Value::Float(f), _) => Const::Float(*f),
            (Value::Double(d), _) => Const::Double(*d),
            _ => return None,
        })
    }

    pub fn as_bool(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    pub fn as_i32(&self) -> i32 {
        match self {
            Value::Int(i) => *i,
            Value::Char(c) => *c as i32,
            Value::Long(l) => *l as i32,
            Value::Float(f) => *f as i32,
            Value::Double(d) => *d as i32,
            Value::Bool(b) => *b as i32,
            _ => 0,
        }
    }

    pub fn as_i64(&self) -> i64 {
        match self {
            Value::Int(i) => *i as i64,
            Value::Char(c) => *c as i64,
            Value::Long(l) => *l,
            Value::Float(f) => *f as i64,
            Value::Double(d) => *d as i64,
            _ => 0,
        }
    }

    pub fn as_f32(&self) -> f32 {
        match self {
            Value::Int(i) => *i as f32,
            Value::Char(c) => *c as f32,
            Value::Long(l) => *l as f32,
            Value::Float(f) => *f,
            Value::Double(d) => *d as f32,
            _ => 0.0,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Value::Int(i) => *i as f64,
            Value::Char(c) => *c as f64,
            Value::Long(l) => *l as f64,
            Value::Float(f) => *f as f64,
            Value::Double(d) => *d,
            _ => 0.0,
        }
    }

    pub fn as_ref(&self) -> Option<&Ref> {
        match self {
            Value::Ref(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// `==` on references.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Null, Value::Null) => true,
            (Value::Ref(a), Value::Ref(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }

    pub fn default_for(t: &Type) -> Value {
        match t {
            Type::Prim(Prim::Boolean) => Value::Bool(false),
            Type::Prim(Prim::Char) => Value::Char(0),
            Type::Prim(Prim::Long) => Value::Long(0),
            Type::Prim(Prim::Float) => Value::Float(0.0),
            Type::Prim(Prim::Double) => Value::Double(0.0),
            Type::Prim(_) => Value::Int(0),
            _ => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithError {
    DivideByZero,
}

/// Primitive conversion, widening or narrowing.
pub fn convert(v: &Value, to: Prim) -> Value {
    match to {
        Prim::Boolean => Value::Bool(v.as_bool()),
        Prim::Byte => Value::Int(v.as_i64_java() as i8 as i32),
        Prim::Short => Value::Int(v.as_i64_java() as i16 as i32),
        Prim::Char => Value::Char(v.as_i64_java() as u16),
        Prim::Int => match v {
            Value::Float(f) => Value::Int(*f as i32),
            Value::Double(d) => Value::Int(*d as i32),
            _ => Value::Int(v.as_i64() as i32),
        },
        Prim::Long => Value::Long(v.as_i64()),
        Prim::Float => Value::Float(v.as_f32()),
        Prim::Double => Value::Double(v.as_f64()),
    }
}

impl Value {
    /// Integral value used for narrowing to sub-int types: floating values
    /// first go through `int`.
    fn as_i64_java(&self) -> i64 {
        match self {
            Value::Float(f) => (*f as i32) as i64,
            Value::Double(d) => (*d as i32) as i64,
            _ => self.as_i64(),
        }
    }
}

pub fn binary(op: BinOp, operand: Prim, a: &Value, b: &Value) -> Result<Value, ArithError> {
    use BinOp::*;
    Ok(match operand {
        Prim::Boolean => {
            let (x, y) = (a.as_bool(), b.as_bool());
            Value::Bool(match op {
                And => x & y,
                Or => x | y,
                Xor => x ^ y,
                Eq => x == y,
                Ne => x != y,
                _ => unreachable!("boolean operator {op:?}"),
            })
        }
        Prim::Long if !op.is_shift() => {
            let (x, y) = (a.as_i64(), b.as_i64());
            match op {
                Add => Value::Long(x.wrapping_add(y)),
                Sub => Value::Long(x.wrapping_sub(y)),
                Mul => Value::Long(x.wrapping_mul(y)),
                Div if y == 0 => return Err(ArithError::DivideByZero),
                Div => Value::Long(x.wrapping_div(y)),
                Rem if y == 0 => return Err(ArithError::DivideByZero),
                Rem => Value::Long(x.wrapping_rem(y)),
                And => Value::Long(x & y),
                Or => Value::Long(x | y),
                Xor => Value::Long(x ^ y),
                _ => Value::Bool(compare(op, x.cmp(&y))),
            }
        }
        Prim::Long => {
            let x = a.as_i64();
            let s = (b.as_i64() & 63) as u32;
            Value::Long(match op {
                Shl => x.wrapping_shl(s),
                Shr => x.wrapping_shr(s),
                _ => ((x as u64) >> s) as i64,
            })
        }
        Prim::Float => {
            let (x, y) = (a.as_f32(), b.as_f32());
            match op {
                Add => Value::Float(x + y),
                Sub => Value::Float(x - y),
                Mul => Value::Float(x * y),
                Div => Value::Float(x / y),
                Rem => Value::Float(x % y),
                _ => Value::Bool(fcompare(op, x as f64, y as f64)),
            }
        }
        Prim::Double => {
            let (x, y) = (a.as_f64(), b.as_f64());
            match op {
                Add => Value::Double(x + y),
                Sub => Value::Double(x - y),
                Mul => Value::Double(x * y),
                Div => Value::Double(x / y),
                Rem => Value::Double(x % y),
                _ => Value::Bool(fcompare(op, x, y)),
            }
        }
        _ if op.is_shift() => {
            let x = a.as_i32();
            let s = (b.as_i64() & 31) as u32;
            Value::Int(match op {
                Shl => x.wrapping_shl(s),
                Shr => x.wrapping_shr(s),
                _ => ((x as u32) >> s) as i32,
            })
        }
        _ => {
            let (x, y) = (a.as_i32(), b.as_i32());
            match op {
                Add => Value::Int(x.wrapping_add(y)),
                Sub => Value::Int(x.wrapping_sub(y)),
                Mul => Value::Int(x.wrapping_mul(y)),
                Div if y == 0 => return Err(ArithError::DivideByZero),
                Div => Value::Int(x.wrapping_div(y)),
                Rem if y == 0 => return Err(ArithError::DivideByZero),
                Rem => Value::Int(x.wrapping_rem(y)),
                And => Value::Int(x & y),
                Or => Value::Int(x | y),
                Xor => Value::Int(x ^ y),
                _ => Value::Bool(compare(op, x.cmp(&y))),
            }
        }
    })
}

fn compare(op: BinOp, ord: std::cmp::Ordering) -> bool {
    use std::cmp::Ordering::*;
    match op {
        BinOp::Lt => ord == Less,
        BinOp::Le => ord != Greater,
        BinOp::Gt => ord == Greater,
        BinOp::Ge => ord != Less,
        BinOp::Eq => ord == Equal,
        BinOp::Ne => ord != Equal,
        _ => unreachable!(),
    }
}

fn fcompare(op: BinOp, x: f64, y: f64) -> bool {
    match op {
        BinOp::Lt => x < y,
        BinOp::Le => x <= y,
        BinOp::Gt => x > y,
        BinOp::Ge => x >= y,
        BinOp::Eq => x == y,
        BinOp::Ne => x != y,
        _ => unreachable!(),
    }
}

/// Unary operator on an operand already promoted to `prim`.
pub fn unary(op: UnOp, prim: Prim, v: &Value) -> Value {
    match (op, prim) {
        (UnOp::Not, _) => Value::Bool(!v.as_bool()),
        (UnOp::Plus, _) => v.clone(),
        (UnOp::Neg, Prim::Long) => Value::Long(v.as_i64().wrapping_neg()),
        (UnOp::Neg, Prim::Float) => Value::Float(-v.as_f32()),
        (UnOp::Neg, Prim::Double) => Value::Double(-v.as_f64()),
        (UnOp::Neg, _) => Value::Int(v.as_i32().wrapping_neg()),
        (UnOp::BitNot, Prim::Long) => Value::Long(!v.as_i64()),
        (UnOp::BitNot, _) => Value::Int(!v.as_i32()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_arithmetic_wraps() {
        let r = binary(BinOp::Add, Prim::Int, &Value::Int(i32::MAX), &Value::Int(1)).unwrap();
        assert_eq!(r.as_i32(), i32::MIN);
        assert_eq!(unary(UnOp::Neg, Prim::Int, &Value::Int(i32::MIN)).as_i32(), i32::MIN);
        assert!(binary(BinOp::Div, Prim::Int, &Value::Int(1), &Value::Int(0)).is_err());
        assert_eq!(binary(BinOp::Div, Prim::Int, &Value::Int(i32::MIN), &Value::Int(-1)).unwrap().as_i32(), i32::MIN);
    }

    #[test]
    fn shifts_mask_distance() {
        assert_eq!(binary(BinOp::Shl, Prim::Int, &Value::Int(1), &Value::Int(33)).unwrap().as_i32(), 2);
        assert_eq!(binary(BinOp::UShr, Prim::Int, &Value::Int(-1), &Value::Int(28)).unwrap().as_i32(), 15);
    }

    #[test]
    fn narrowing_follows_java() {
        assert_eq!(convert(&Value::Double(f64::NAN), Prim::Int).as_i32(), 0);
        assert_eq!(convert(&Value::Double(1e20), Prim::Int).as_i32(), i32::MAX);
        assert_eq!(convert(&Value::Int(200), Prim::Byte).as_i32(), -56);
        assert_eq!(convert(&Value::Double(1e10), Prim::Byte).as_i32(), -1);
    }

    #[test]
    fn hash_table_orders_by_bucket() {
        let mut t = HashTable::default();
        for (k, h) in [(0, 5), (1, 17), (2, 3), (3, 1)] {
            t.insert(Value::Int(k), Value::Null, h);
        }
        let order: Vec<i32> = t.entries.iter().map(|e| e.key.as_i32()).collect();
        assert_eq!(order, vec![1, 3, 2, 0]);
    }
}
