use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prim {
    Boolean,
    Byte,
    Short,
    Char,
    Int,
    Long,
    Float,
    Double,
}

impl Prim {
    pub fn name(self) -> &'static str {
        match self {
            Prim::Boolean => "boolean",
            Prim::Byte => "byte",
            Prim::Short => "short",
            Prim::Char => "char",
            Prim::Int => "int",
            Prim::Long => "long",
            Prim::Float => "float",
            Prim::Double => "double",
        }
    }

    pub fn from_name(name: &str) -> Option<Prim> {
        Some(match name {
            "boolean" => Prim::Boolean,
            "byte" => Prim::Byte,
            "short" => Prim::Short,
            "char" => Prim::Char,
            "int" => Prim::Int,
            "long" => Prim::Long,
            "float" => Prim::Float,
            "double" => Prim::Double,
            _ => return None,
        })
    }

    pub fn is_numeric(self) -> bool {
        self != Prim::Boolean
    }

    pub fn is_integral(self) -> bool {
        matches!(self, Prim::Byte | Prim::Short | Prim::Char | Prim::Int | Prim::Long)
    }

    /// Widening primitive conversion (identity included).
    pub fn widens_to(self, to: Prim) -> bool {
        use Prim::*;
        if self == to {
            return true;
        }
        matches!(
            (self, to),
            (Byte, Short | Int | Long | Float | Double)
                | (Short, Int | Long | Float | Double)
                | (Char, Int | Long | Float | Double)
                | (Int, Long | Float | Double)
                | (Long, Float | Double)
                | (Float, Double)
        )
    }

    pub fn box_class(self) -> Builtin {
        match self {
            Prim::Boolean => Builtin::Boolean,
            Prim::Byte => Builtin::Byte,
            Prim::Short => Builtin::Short,
            Prim::Char => Builtin::Character,
            Prim::Int => Builtin::Integer,
            Prim::Long => Builtin::Long,
            Prim::Float => Builtin::Float,
            Prim::Double => Builtin::Double,
        }
    }
}

/// Library classes the toolchain models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Object,
    String,
    StringBuilder,
    Math,
    System,
    PrintStream,
    Number,
    Integer,
    Long,
    Double,
    Float,
    Short,
    Byte,
    Character,
    Boolean,
    Objects,
    Arrays,
    Collection,
    List,
    ArrayList,
    Map,
    HashMap,
    Set,
    HashSet,
    Iterable,
    Comparable,
    CharSequence,
    Throwable,
    Exception,
    RuntimeException,
    Error,
    AssertionError,
    StackOverflowError,
    OutOfMemoryError,
    ArithmeticException,
    NullPointerException,
    IllegalArgumentException,
    IllegalStateException,
    NumberFormatException,
    IndexOutOfBoundsException,
    ArrayIndexOutOfBoundsException,
    StringIndexOutOfBoundsException,
    ClassCastException,
    UnsupportedOperationException,
    NegativeArraySizeException,
    ArrayStoreException,
    CloneNotSupportedException,
    InterruptedException,
    IoException,
    ConcurrentModificationException,
    NoSuchElementException,
    // JUnit
    JunitAssert,
    JupiterAssertions,
    AssertionFailedError,
    ComparisonFailure,
    TestTimedOutException,
}

pub struct BuiltinInfo {
    pub simple: &'static str,
    pub fqn: &'static str,
    pub parent: Option<Builtin>,
    pub interfaces: &'static [Builtin],
    pub is_interface: bool,
    pub is_final: bool,
    pub is_throwable: bool,
}

macro_rules! info {
    ($simple:expr, $fqn:expr, $parent:expr) => {
        BuiltinInfo { simple: $simple, fqn: $fqn, parent: $parent, interfaces: &[], is_interface: false, is_final: false, is_throwable: false }
    };
}

impl Builtin {
    pub const ALL: &'static [Builtin] = &[
        Builtin::Object,
        Builtin::String,
        Builtin::StringBuilder,
        Builtin::Math,
        Builtin::System,
        Builtin::PrintStream,
        Builtin::Number,
        Builtin::Integer,
        Builtin::Long,
        Builtin::Double,
        Builtin::Float,
        Builtin::Short,
        Builtin::Byte,
        Builtin::Character,
        Builtin::Boolean,
        Builtin::Objects,
        Builtin::Arrays,
        Builtin::Collection,
        Builtin::List,
        Builtin::ArrayList,
        Builtin::Map,
        Builtin::HashMap,
        Builtin::Set,
        Builtin::HashSet,
        Builtin::Iterable,
        Builtin::Comparable,
        Builtin::CharSequence,
        Builtin::Throwable,
        Builtin::Exception,
        Builtin::RuntimeException,
        Builtin::Error,
        Builtin::AssertionError,
        Builtin::StackOverflowError,
        Builtin::OutOfMemoryError,
        Builtin::ArithmeticException,
        Builtin::NullPointerException,
        Builtin::IllegalArgumentException,
        Builtin::IllegalStateException,
        Builtin::NumberFormatException,
        Builtin::IndexOutOfBoundsException,
        Builtin::ArrayIndexOutOfBoundsException,
        Builtin::StringIndexOutOfBoundsException,
        Builtin::ClassCastException,
        Builtin::UnsupportedOperationException,
        Builtin::NegativeArraySizeException,
        Builtin::ArrayStoreException,
        Builtin::CloneNotSupportedException,
        Builtin::InterruptedException,
        Builtin::IoException,
        Builtin::ConcurrentModificationException,
        Builtin::NoSuchElementException,
        Builtin::JunitAssert,
        Builtin::JupiterAssertions,
        Builtin::AssertionFailedError,
        Builtin::ComparisonFailure,
        Builtin::TestTimedOutException,
    ];

    pub fn info(self) -> BuiltinInfo {
        use Builtin::*;
        let mut i = match self {
            Object => info!("Object", "java.lang.Object", None),
            String => BuiltinInfo {
                interfaces: &[CharSequence, Comparable],
                is_final: true,
                ..info!("String", "java.lang.String", Some(Object))
            },
            StringBuilder => BuiltinInfo {
                interfaces: &[CharSequence],
                is_final: true,
                ..info!("StringBuilder", "java.lang.StringBuilder", Some(Object))
            },
            Math => BuiltinInfo { is_final: true, ..info!("Math", "java.lang.Math", Some(Object)) },
            System => BuiltinInfo { is_final: true, ..info!("System", "java.lang.System", Some(Object)) },
            PrintStream => info!("PrintStream", "java.io.PrintStream", Some(Object)),
            Number => info!("Number", "java.lang.Number", Some(Object)),
            Integer => BuiltinInfo { interfaces: &[Comparable], is_final: true, ..info!("Integer", "java.lang.Integer", Some(Number)) },
            Long => BuiltinInfo { interfaces: &[Comparable], is_final: true, ..info!("Long", "java.lang.Long", Some(Number)) },
            Double => BuiltinInfo { interfaces: &[Comparable], is_final: true, ..info!("Double", "java.lang.Double", Some(Number)) },
            Float => BuiltinInfo { interfaces: &[Comparable], is_final: true, ..info!("Float", "java.lang.Float", Some(Number)) },
            Short => BuiltinInfo { interfaces: &[Comparable], is_final: true, ..info!("Short", "java.lang.Short", Some(Number)) },
            Byte => BuiltinInfo { interfaces: &[Comparable], is_final: true, ..info!("Byte", "java.lang.Byte", Some(Number)) },
            Character => BuiltinInfo { interfaces: &[Comparable], is_final: true, ..info!("Character", "java.lang.Character", Some(Object)) },
            Boolean => BuiltinInfo { interfaces: &[Comparable], is_final: true, ..info!("Boolean", "java.lang.Boolean", Some(Object)) },
            Objects => BuiltinInfo { is_final: true, ..info!("Objects", "java.util.Objects", Some(Object)) },
            Arrays => BuiltinInfo { is_final: true, ..info!("Arrays", "java.util.Arrays", Some(Object)) },
            Iterable => BuiltinInfo { is_interface: true, ..info!("Iterable", "java.lang.Iterable", Some(Object)) },
            Comparable => BuiltinInfo { is_interface: true, ..info!("Comparable", "java.lang.Comparable", Some(Object)) },
            CharSequence => BuiltinInfo { is_interface: true, ..info!("CharSequence", "java.lang.CharSequence", Some(Object)) },
            Collection => BuiltinInfo { is_interface: true, interfaces: &[Iterable], ..info!("Collection", "java.util.Collection", Some(Object)) },
            List => BuiltinInfo { is_interface: true, interfaces: &[Collection], ..info!("List", "java.util.List", Some(Object)) },
            ArrayList => BuiltinInfo { interfaces: &[List], ..info!("ArrayList", "java.util.ArrayList", Some(Object)) },
            Map => BuiltinInfo { is_interface: true, ..info!("Map", "java.util.Map", Some(Object)) },
            HashMap => BuiltinInfo { interfaces: &[Map], ..info!("HashMap", "java.util.HashMap", Some(Object)) },
            Set => BuiltinInfo { is_interface: true, interfaces: &[Collection], ..info!("Set", "java.util.Set", Some(Object)) },
            HashSet => BuiltinInfo { interfaces: &[Set], ..info!("HashSet", "java.util.HashSet", Some(Object)) },
            Throwable => info!("Throwable", "java.lang.Throwable", Some(Object)),
            Exception => info!("Exception", "java.lang.Exception", Some(Throwable)),
            RuntimeException => info!("RuntimeException", "java.lang.RuntimeException", Some(Exception)),
            Error => info!("Error", "java.lang.Error", Some(Throwable)),
            AssertionError => info!("AssertionError", "java.lang.AssertionError", Some(Error)),
            StackOverflowError => info!("StackOverflowError", "java.lang.StackOverflowError", Some(Error)),
            OutOfMemoryError => info!("OutOfMemoryError", "java.lang.OutOfMemoryError", Some(Error)),
            ArithmeticException => info!("ArithmeticException", "java.lang.ArithmeticException", Some(RuntimeException)),
            NullPointerException => info!("NullPointerException", "java.lang.NullPointerException", Some(RuntimeException)),
            IllegalArgumentException => info!("IllegalArgumentException", "java.lang.IllegalArgumentException", Some(RuntimeException)),
            IllegalStateException => info!("IllegalStateException", "java.lang.IllegalStateException", Some(RuntimeException)),
            NumberFormatException => info!("NumberFormatException", "java.lang.NumberFormatException", Some(IllegalArgumentException)),
            IndexOutOfBoundsException => info!("IndexOutOfBoundsException", "java.lang.IndexOutOfBoundsException", Some(RuntimeException)),
            ArrayIndexOutOfBoundsException => info!("ArrayIndexOutOfBoundsException", "java.lang.ArrayIndexOutOfBoundsException", Some(IndexOutOfBoundsException)),
            StringIndexOutOfBoundsException => info!("StringIndexOutOfBoundsException", "java.lang.StringIndexOutOfBoundsException", Some(IndexOutOfBoundsException)),
            ClassCastException => info!("ClassCastException", "java.lang.ClassCastException", Some(RuntimeException)),
            UnsupportedOperationException => info!("UnsupportedOperationException", "java.lang.UnsupportedOperationException", Some(RuntimeException)),
            NegativeArraySizeException => info!("NegativeArraySizeException", "java.lang.NegativeArraySizeException", Some(RuntimeException)),
            ArrayStoreException => info!("ArrayStoreException", "java.lang.ArrayStoreException", Some(RuntimeException)),
            CloneNotSupportedException => info!("CloneNotSupportedException", "java.lang.CloneNotSupportedException", Some(Exception)),
            InterruptedException => info!("InterruptedException", "java.lang.InterruptedException", Some(Exception)),
            IoException => info!("IOException", "java.io.IOException", Some(Exception)),
            ConcurrentModificationException => info!("ConcurrentModificationException", "java.util.ConcurrentModificationException", Some(RuntimeException)),
            NoSuchElementException => info!("NoSuchElementException", "java.util.NoSuchElementException", Some(RuntimeException)),
            JunitAssert => info!("Assert", "org.junit.Assert", Some(Object)),
            JupiterAssertions => info!("Assertions", "org.junit.jupiter.api.Assertions", Some(Object)),
            AssertionFailedError => info!("AssertionFailedError", "org.opentest4j.AssertionFailedError", Some(AssertionError)),
            ComparisonFailure => info!("ComparisonFailure", "org.junit.ComparisonFailure", Some(AssertionError)),
            TestTimedOutException => info!("TestTimedOutException", "org.junit.runners.model.TestTimedOutException", Some(Exception)),
        };
        i.is_throwable = self.is_subclass_of(Throwable);
        i
    }

    pub fn parent(self) -> Option<Builtin> {
        self.info().parent
    }

    pub fn is_subclass_of(self, other: Builtin) -> bool {
        let mut cur = Some(self);
        while let Some(c) = cur {
            if c == other {
                return true;
            }
            cur = match c {
                Builtin::Object => None,
                _ => c.info_parent_only(),
            };
        }
        false
    }

    fn info_parent_only(self) -> Option<Builtin> {
        use Builtin::*;
        match self {
            Object => None,
            Exception | Error => Some(Throwable),
            RuntimeException | CloneNotSupportedException | InterruptedException | IoException | TestTimedOutException => Some(Exception),
            AssertionError | StackOverflowError | OutOfMemoryError => Some(Error),
            AssertionFailedError | ComparisonFailure => Some(AssertionError),
            ArithmeticException
            | NullPointerException
            | IllegalArgumentException
            | IllegalStateException
            | IndexOutOfBoundsException
            | ClassCastException
            | UnsupportedOperationException
            | NegativeArraySizeException
            | ArrayStoreException
            | ConcurrentModificationException
            | NoSuchElementException => Some(RuntimeException),
            NumberFormatException => Some(IllegalArgumentException),
            ArrayIndexOutOfBoundsException | StringIndexOutOfBoundsException => Some(IndexOutOfBoundsException),
            Integer | Long | Double | Float | Short | Byte => Some(Number),
            _ => Some(Object),
        }
    }

    /// Whether `self` is `other` or reaches it through supertypes and
    /// interfaces.
    pub fn is_subtype_of(self, other: Builtin) -> bool {
        if other == Builtin::Object || self.is_subclass_of(other) {
            return true;
        }
        let info = self.info();
        if info.interfaces.iter().any(|i| i.is_subtype_of(other)) {
            return true;
        }
        match info.parent {
            Some(p) if p != self => p.is_subtype_of(other),
            _ => false,
        }
    }

    pub fn is_throwable(self) -> bool {
        self.is_subclass_of(Builtin::Throwable)
    }

    pub fn is_unchecked(self) -> bool {
        self.is_subclass_of(Builtin::RuntimeException) || self.is_subclass_of(Builtin::Error)
    }

    pub fn unbox(self) -> Option<Prim> {
        Some(match self {
            Builtin::Boolean => Prim::Boolean,
            Builtin::Byte => Prim::Byte,
            Builtin::Short => Prim::Short,
            Builtin::Character => Prim::Char,
            Builtin::Integer => Prim::Int,
            Builtin::Long => Prim::Long,
            Builtin::Float => Prim::Float,
            Builtin::Double => Prim::Double,
            _ => return None,
        })
    }

    /// Package that must be imported for the simple name to resolve, or
    /// `None` for `java.lang` types.
    pub fn package(self) -> Option<&'static str> {
        let fqn = self.info().fqn;
        let pkg = &fqn[..fqn.rfind('.').unwrap_or(0)];
        if pkg == "java.lang" {
            None
        } else {
            Some(pkg)
        }
    }

    pub fn by_simple_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.iter().copied().find(|b| b.info().simple == name)
    }

    pub fn by_fqn(name: &str) -> Option<Builtin> {
        Builtin::ALL.iter().copied().find(|b| b.info().fqn == name)
    }

    /// Number of generic type parameters.
    pub fn type_params(self) -> usize {
        match self {
            Builtin::List | Builtin::ArrayList | Builtin::Set | Builtin::HashSet | Builtin::Collection | Builtin::Iterable | Builtin::Comparable => 1,
            Builtin::Map | Builtin::HashMap => 2,
            _ => 0,
        }
    }
}

/// Reference to a class: either modelled library class or a user class index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassRef {
    Builtin(Builtin),
    User(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Prim(Prim),
    Void,
    Null,
    Class(ClassRef, Vec<Type>),
    Array(Box<Type>),
}

impl Type {
    pub const INT: Type = Type::Prim(Prim::Int);
    pub const LONG: Type = Type::Prim(Prim::Long);
    pub const DOUBLE: Type = Type::Prim(Prim::Double);
    pub const FLOAT: Type = Type::Prim(Prim::Float);
    pub const BOOLEAN: Type = Type::Prim(Prim::Boolean);
    pub const CHAR: Type = Type::Prim(Prim::Char);

    pub fn builtin(b: Builtin) -> Type {
        Type::Class(ClassRef::Builtin(b), Vec::new())
    }

    pub fn string() -> Type {
        Type::builtin(Builtin::String)
    }

    pub fn object() -> Type {
        Type::builtin(Builtin::Object)
    }

    pub fn prim(&self) -> Option<Prim> {
        match self {
            Type::Prim(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, Type::Null | Type::Class(..) | Type::Array(_))
    }

    pub fn is_string(&self) -> bool {
        matches!(self, Type::Class(ClassRef::Builtin(Builtin::String), _))
    }

    pub fn class(&self) -> Option<ClassRef> {
        match self {
            Type::Class(c, _) => Some(*c),
            _ => None,
        }
    }

    pub fn builtin_class(&self) -> Option<Builtin> {
        match self {
            Type::Class(ClassRef::Builtin(b), _) => Some(*b),
            _ => None,
        }
    }

    /// Primitive type after unboxing, if this is a primitive or a box.
    pub fn unboxed(&self) -> Option<Prim> {
        match self {
            Type::Prim(p) => Some(*p),
            Type::Class(ClassRef::Builtin(b), _) => b.unbox(),
            _ => None,
        }
    }

    pub fn type_arg(&self, i: usize) -> Type {
        match self {
            Type::Class(_, args) => args.get(i).cloned().unwrap_or_else(Type::object),
            _ => Type::object(),
        }
    }

    pub fn element(&self) -> Option<&Type> {
        match self {
            Type::Array(e) => Some(e),
            _ => None,
        }
    }

    /// Source-level spelling used in diagnostics.
    pub fn display<'a>(&'a self, names: &'a dyn Fn(usize) -> String) -> TypeDisplay<'a> {
        TypeDisplay { ty: self, names }
    }
}

pub struct TypeDisplay<'a> {
    ty: &'a Type,
    names: &'a dyn Fn(usize) -> String,
}

impl fmt::Display for TypeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ty {
            Type::Prim(p) => f.write_str(p.name()),
            Type::Void => f.write_str("void"),
            Type::Null => f.write_str("<null>"),
            Type::Class(c, args) => {
                match c {
                    ClassRef::Builtin(b) => f.write_str(b.info().simple)?,
                    ClassRef::User(i) => f.write_str(&(self.names)(*i))?,
                }
                if !args.is_empty() {
                    f.write_str("<")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", a.display(self.names))?;
                    }
                    f.write_str(">")?;
                }
                Ok(())
            }
            Type::Array(e) => write!(f, "{}[]", e.display(self.names)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exception_hierarchy() {
        assert!(Builtin::NumberFormatException.is_subclass_of(Builtin::RuntimeException));
        assert!(Builtin::ArrayIndexOutOfBoundsException.is_subclass_of(Builtin::IndexOutOfBoundsException));
        assert!(Builtin::AssertionFailedError.is_subclass_of(Builtin::AssertionError));
        assert!(!Builtin::Exception.is_subclass_of(Builtin::RuntimeException));
        assert!(Builtin::AssertionError.is_unchecked());
        assert!(!Builtin::IoException.is_unchecked());
    }

    #[test]
    fn interface_subtyping() {
        assert!(Builtin::ArrayList.is_subtype_of(Builtin::List));
        assert!(Builtin::ArrayList.is_subtype_of(Builtin::Iterable));
        assert!(Builtin::String.is_subtype_of(Builtin::CharSequence));
        assert!(!Builtin::String.is_subtype_of(Builtin::Integer));
        assert!(Builtin::Integer.is_subtype_of(Builtin::Number));
    }

    #[test]
    fn widening() {
        assert!(Prim::Int.widens_to(Prim::Long));
        assert!(Prim::Char.widens_to(Prim::Int));
        assert!(!Prim::Char.widens_to(Prim::Short));
        assert!(!Prim::Long.widens_to(Prim::Int));
    }

    #[test]
    fn packages() {
        assert_eq!(Builtin::ArrayList.package(), Some("java.util"));
        assert_eq!(Builtin::String.package(), None);
        assert_eq!(Builtin::JunitAssert.package(), Some("org.junit"));
    }
}
