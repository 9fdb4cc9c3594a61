//! Signatures of the library methods the toolchain models.

use crate::ir::Const;
use crate::types::{Builtin, ClassRef, Prim, Type};

/// Parameter or result type in a library signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P {
    V,
    Z,
    B,
    S,
    C,
    I,
    J,
    F,
    D,
    Str,
    Obj,
    Cs,
    Sb,
    Thr,
    PrintStream,
    /// Box class of a primitive.
    Boxed(Prim),
    CharArr,
    StrArr,
    IntArr,
    ObjArr,
    /// Any array type.
    AnyArr,
    /// Any type, passed through unconverted.
    Any,
    /// Receiver type argument.
    E0,
    E1,
    /// `Collection<? extends E0>`.
    CollE0,
    /// `List<E0>` / `Set<E0>` / `Collection<E1>` of the receiver.
    ListE0,
    SetE0,
    CollE1,
    /// Same type as the first argument.
    Arg0,
    /// `List<T>` where `T` is the (boxed) type of the varargs elements.
    ListOfArgs,
    SetOfArgs,
}

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    Static,
    Instance,
    Ctor,
}

pub struct Entry {
    pub method: BuiltinMethod,
    pub owner: Builtin,
    pub kind: Kind,
    pub name: &'static str,
    pub params: &'static [P],
    pub ret: P,
    pub varargs: bool,
}

macro_rules! table {
    ($( $variant:ident = $owner:ident $kind:ident $name:literal ( $($p:ident $(($pa:ident))?),* ) $($va:ident)? -> $ret:ident $(($ra:ident))? ; )*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum BuiltinMethod { $($variant),* }

        pub static TABLE: &[Entry] = &[
            $( Entry {
                method: BuiltinMethod::$variant,
                owner: Builtin::$owner,
                kind: Kind::$kind,
                name: $name,
                params: &[$(P::$p $((Prim::$pa))?),*],
                ret: P::$ret $((Prim::$ra))?,
                varargs: table!(@va $($va)?),
            } ),*
        ];
    };
    (@va) => { false };
    (@va $x:ident) => { true };
}

table! {
    // Object
    ObjEquals = Object Instance "equals"(Obj) -> Z;
    ObjHashCode = Object Instance "hashCode"() -> I;
    ObjToString = Object Instance "toString"() -> Str;
    ObjNew = Object Ctor "<init>"() -> V;

    // String
    StrLength = String Instance "length"() -> I;
    StrCharAt = String Instance "charAt"(I) -> C;
    StrIsEmpty = String Instance "isEmpty"() -> Z;
    StrIsBlank = String Instance "isBlank"() -> Z;
    StrEquals = String Instance "equals"(Obj) -> Z;
    StrEqualsIgnoreCase = String Instance "equalsIgnoreCase"(Str) -> Z;
    StrHashCode = String Instance "hashCode"() -> I;
    StrCompareTo = String Instance "compareTo"(Str) -> I;
    StrCompareToIgnoreCase = String Instance "compareToIgnoreCase"(Str) -> I;
    StrSubstring1 = String Instance "substring"(I) -> Str;
    StrSubstring2 = String Instance "substring"(I, I) -> Str;
    StrIndexOfStr = String Instance "indexOf"(Str) -> I;
    StrIndexOfChar = String Instance "indexOf"(I) -> I;
    StrIndexOfStrFrom = String Instance "indexOf"(Str, I) -> I;
    StrLastIndexOfStr = String Instance "lastIndexOf"(Str) -> I;
    StrLastIndexOfChar = String Instance "lastIndexOf"(I) -> I;
    StrContains = String Instance "contains"(Cs) -> Z;
    StrStartsWith = String Instance "startsWith"(Str) -> Z;
    StrEndsWith = String Instance "endsWith"(Str) -> Z;
    StrToUpperCase = String Instance "toUpperCase"() -> Str;
    StrToLowerCase = String Instance "toLowerCase"() -> Str;
    StrTrim = String Instance "trim"() -> Str;
    StrStrip = String Instance "strip"() -> Str;
    StrConcat = String Instance "concat"(Str) -> Str;
    StrReplaceChar = String Instance "replace"(C, C) -> Str;
    StrReplace = String Instance "replace"(Cs, Cs) -> Str;
    StrToCharArray = String Instance "toCharArray"() -> CharArr;
    StrToString = String Instance "toString"() -> Str;
    StrIntern = String Instance "intern"() -> Str;
    StrRepeat = String Instance "repeat"(I) -> Str;
    StrSplit = String Instance "split"(Str) -> StrArr;
    StrValueOfBool = String Static "valueOf"(Z) -> Str;
    StrValueOfChar = String Static "valueOf"(C) -> Str;
    StrValueOfInt = String Static "valueOf"(I) -> Str;
    StrValueOfLong = String Static "valueOf"(J) -> Str;
    StrValueOfFloat = String Static "valueOf"(F) -> Str;
    StrValueOfDouble = String Static "valueOf"(D) -> Str;
    StrValueOfChars = String Static "valueOf"(CharArr) -> Str;
    StrValueOfObj = String Static "valueOf"(Obj) -> Str;
    StrFormat = String Static "format"(Str, ObjArr) varargs -> Str;
    StrJoin = String Static "join"(Cs, ObjArr) varargs -> Str;
    StrNew = String Ctor "<init>"() -> V;
    StrNewStr = String Ctor "<init>"(Str) -> V;
    StrNewChars = String Ctor "<init>"(CharArr) -> V;
    CsLength = CharSequence Instance "length"() -> I;
    CsCharAt = CharSequence Instance "charAt"(I) -> C;
    CsToString = CharSequence Instance "toString"() -> Str;

    // StringBuilder
    SbNew = StringBuilder Ctor "<init>"() -> V;
    SbNewStr = StringBuilder Ctor "<init>"(Str) -> V;
    SbNewCap = StringBuilder Ctor "<init>"(I) -> V;
    SbAppendBool = StringBuilder Instance "append"(Z) -> Sb;
    SbAppendChar = StringBuilder Instance "append"(C) -> Sb;
    SbAppendInt = StringBuilder Instance "append"(I) -> Sb;
    SbAppendLong = StringBuilder Instance "append"(J) -> Sb;
    SbAppendFloat = StringBuilder Instance "append"(F) -> Sb;
    SbAppendDouble = StringBuilder Instance "append"(D) -> Sb;
    SbAppendChars = StringBuilder Instance "append"(CharArr) -> Sb;
    SbAppendStr = StringBuilder Instance "append"(Str) -> Sb;
    SbAppendObj = StringBuilder Instance "append"(Obj) -> Sb;
    SbToString = StringBuilder Instance "toString"() -> Str;
    SbLength = StringBuilder Instance "length"() -> I;
    SbCharAt = StringBuilder Instance "charAt"(I) -> C;
    SbReverse = StringBuilder Instance "reverse"() -> Sb;
    SbInsertStr = StringBuilder Instance "insert"(I, Str) -> Sb;
    SbInsertChar = StringBuilder Instance "insert"(I, C) -> Sb;
    SbInsertInt = StringBuilder Instance "insert"(I, I) -> Sb;
    SbDeleteCharAt = StringBuilder Instance "deleteCharAt"(I) -> Sb;
    SbSetLength = StringBuilder Instance "setLength"(I) -> V;
    SbSetCharAt = StringBuilder Instance "setCharAt"(I, C) -> V;
    SbIndexOf = StringBuilder Instance "indexOf"(Str) -> I;
    SbIsEmpty = StringBuilder Instance "isEmpty"() -> Z;

    // Math
    MathAbsI = Math Static "abs"(I) -> I;
    MathAbsJ = Math Static "abs"(J) -> J;
    MathAbsF = Math Static "abs"(F) -> F;
    MathAbsD = Math Static "abs"(D) -> D;
    MathMaxI = Math Static "max"(I, I) -> I;
    MathMaxJ = Math Static "max"(J, J) -> J;
    MathMaxF = Math Static "max"(F, F) -> F;
    MathMaxD = Math Static "max"(D, D) -> D;
    MathMinI = Math Static "min"(I, I) -> I;
    MathMinJ = Math Static "min"(J, J) -> J;
    MathMinF = Math Static "min"(F, F) -> F;
    MathMinD = Math Static "min"(D, D) -> D;
    MathPow = Math Static "pow"(D, D) -> D;
    MathSqrt = Math Static "sqrt"(D) -> D;
    MathCbrt = Math Static "cbrt"(D) -> D;
    MathFloor = Math Static "floor"(D) -> D;
    MathCeil = Math Static "ceil"(D) -> D;
    MathRint = Math Static "rint"(D) -> D;
    MathRoundD = Math Static "round"(D) -> J;
    MathRoundF = Math Static "round"(F) -> I;
    MathFloorModI = Math Static "floorMod"(I, I) -> I;
    MathFloorModJ = Math Static "floorMod"(J, J) -> J;
    MathFloorDivI = Math Static "floorDiv"(I, I) -> I;
    MathFloorDivJ = Math Static "floorDiv"(J, J) -> J;
    MathAddExactI = Math Static "addExact"(I, I) -> I;
    MathAddExactJ = Math Static "addExact"(J, J) -> J;
    MathSubtractExactI = Math Static "subtractExact"(I, I) -> I;
    MathSubtractExactJ = Math Static "subtractExact"(J, J) -> J;
    MathMultiplyExactI = Math Static "multiplyExact"(I, I) -> I;
    MathMultiplyExactJ = Math Static "multiplyExact"(J, J) -> J;
    MathNegateExactI = Math Static "negateExact"(I) -> I;
    MathToIntExact = Math Static "toIntExact"(J) -> I;
    MathSignum = Math Static "signum"(D) -> D;
    MathLog = Math Static "log"(D) -> D;
    MathLog10 = Math Static "log10"(D) -> D;
    MathExp = Math Static "exp"(D) -> D;
    MathSin = Math Static "sin"(D) -> D;
    MathCos = Math Static "cos"(D) -> D;
    MathTan = Math Static "tan"(D) -> D;
    MathAtan = Math Static "atan"(D) -> D;
    MathAtan2 = Math Static "atan2"(D, D) -> D;
    MathHypot = Math Static "hypot"(D, D) -> D;

    // System / PrintStream
    SysOut = System Static "out"() -> PrintStream;
    SysErr = System Static "err"() -> PrintStream;
    SysLineSeparator = System Static "lineSeparator"() -> Str;
    SysIdentityHashCode = System Static "identityHashCode"(Obj) -> I;
    SysArraycopy = System Static "arraycopy"(Obj, I, Obj, I, I) -> V;
    PsPrintln = PrintStream Instance "println"() -> V;
    PsPrintlnZ = PrintStream Instance "println"(Z) -> V;
    PsPrintlnC = PrintStream Instance "println"(C) -> V;
    PsPrintlnI = PrintStream Instance "println"(I) -> V;
    PsPrintlnJ = PrintStream Instance "println"(J) -> V;
    PsPrintlnF = PrintStream Instance "println"(F) -> V;
    PsPrintlnD = PrintStream Instance "println"(D) -> V;
    PsPrintlnChars = PrintStream Instance "println"(CharArr) -> V;
    PsPrintlnStr = PrintStream Instance "println"(Str) -> V;
    PsPrintlnObj = PrintStream Instance "println"(Obj) -> V;
    PsPrintZ = PrintStream Instance "print"(Z) -> V;
    PsPrintC = PrintStream Instance "print"(C) -> V;
    PsPrintI = PrintStream Instance "print"(I) -> V;
    PsPrintJ = PrintStream Instance "print"(J) -> V;
    PsPrintF = PrintStream Instance "print"(F) -> V;
    PsPrintD = PrintStream Instance "print"(D) -> V;
    PsPrintChars = PrintStream Instance "print"(CharArr) -> V;
    PsPrintStr = PrintStream Instance "print"(Str) -> V;
    PsPrintObj = PrintStream Instance "print"(Obj) -> V;
    PsPrintf = PrintStream Instance "printf"(Str, ObjArr) varargs -> PrintStream;
    PsFlush = PrintStream Instance "flush"() -> V;

    // Boxes
    IntParse = Integer Static "parseInt"(Str) -> I;
    IntParseRadix = Integer Static "parseInt"(Str, I) -> I;
    IntValueOf = Integer Static "valueOf"(I) -> Boxed(Int);
    IntValueOfStr = Integer Static "valueOf"(Str) -> Boxed(Int);
    IntToStringStatic = Integer Static "toString"(I) -> Str;
    IntToStringRadix = Integer Static "toString"(I, I) -> Str;
    IntCompare = Integer Static "compare"(I, I) -> I;
    IntSum = Integer Static "sum"(I, I) -> I;
    IntMax = Integer Static "max"(I, I) -> I;
    IntMin = Integer Static "min"(I, I) -> I;
    IntSignum = Integer Static "signum"(I) -> I;
    IntBitCount = Integer Static "bitCount"(I) -> I;
    IntToBinaryString = Integer Static "toBinaryString"(I) -> Str;
    IntToHexString = Integer Static "toHexString"(I) -> Str;
    IntHashCodeStatic = Integer Static "hashCode"(I) -> I;
    IntCompareTo = Integer Instance "compareTo"(Boxed(Int)) -> I;
    LongParse = Long Static "parseLong"(Str) -> J;
    LongValueOf = Long Static "valueOf"(J) -> Boxed(Long);
    LongToStringStatic = Long Static "toString"(J) -> Str;
    LongCompare = Long Static "compare"(J, J) -> I;
    LongSum = Long Static "sum"(J, J) -> J;
    LongHashCodeStatic = Long Static "hashCode"(J) -> I;
    LongCompareTo = Long Instance "compareTo"(Boxed(Long)) -> I;
    DblParse = Double Static "parseDouble"(Str) -> D;
    DblValueOf = Double Static "valueOf"(D) -> Boxed(Double);
    DblToStringStatic = Double Static "toString"(D) -> Str;
    DblCompare = Double Static "compare"(D, D) -> I;
    DblIsNaN = Double Static "isNaN"(D) -> Z;
    DblIsInfinite = Double Static "isInfinite"(D) -> Z;
    DblIsFinite = Double Static "isFinite"(D) -> Z;
    DblHashCodeStatic = Double Static "hashCode"(D) -> I;
    DblIsNaNInst = Double Instance "isNaN"() -> Z;
    DblCompareTo = Double Instance "compareTo"(Boxed(Double)) -> I;
    FltParse = Float Static "parseFloat"(Str) -> F;
    FltValueOf = Float Static "valueOf"(F) -> Boxed(Float);
    FltCompare = Float Static "compare"(F, F) -> I;
    FltIsNaN = Float Static "isNaN"(F) -> Z;
    FltToStringStatic = Float Static "toString"(F) -> Str;
    ShortValueOf = Short Static "valueOf"(S) -> Boxed(Short);
    ShortParse = Short Static "parseShort"(Str) -> S;
    ByteValueOf = Byte Static "valueOf"(B) -> Boxed(Byte);
    ByteParse = Byte Static "parseByte"(Str) -> B;
    BoolParse = Boolean Static "parseBoolean"(Str) -> Z;
    BoolValueOf = Boolean Static "valueOf"(Z) -> Boxed(Boolean);
    BoolValueOfStr = Boolean Static "valueOf"(Str) -> Boxed(Boolean);
    BoolToStringStatic = Boolean Static "toString"(Z) -> Str;
    BoolCompare = Boolean Static "compare"(Z, Z) -> I;
    BoolBooleanValue = Boolean Instance "booleanValue"() -> Z;
    CharIsDigit = Character Static "isDigit"(C) -> Z;
    CharIsLetter = Character Static "isLetter"(C) -> Z;
    CharIsLetterOrDigit = Character Static "isLetterOrDigit"(C) -> Z;
    CharIsAlphabetic = Character Static "isAlphabetic"(I) -> Z;
    CharIsWhitespace = Character Static "isWhitespace"(C) -> Z;
    CharIsUpperCase = Character Static "isUpperCase"(C) -> Z;
    CharIsLowerCase = Character Static "isLowerCase"(C) -> Z;
    CharToUpperCase = Character Static "toUpperCase"(C) -> C;
    CharToLowerCase = Character Static "toLowerCase"(C) -> C;
    CharGetNumericValue = Character Static "getNumericValue"(C) -> I;
    CharValueOf = Character Static "valueOf"(C) -> Boxed(Char);
    CharToStringStatic = Character Static "toString"(C) -> Str;
    CharCharValue = Character Instance "charValue"() -> C;
    CharCompareTo = Character Instance "compareTo"(Boxed(Char)) -> I;
    NumIntValue = Number Instance "intValue"() -> I;
    NumLongValue = Number Instance "longValue"() -> J;
    NumDoubleValue = Number Instance "doubleValue"() -> D;
    NumFloatValue = Number Instance "floatValue"() -> F;
    NumShortValue = Number Instance "shortValue"() -> S;
    NumByteValue = Number Instance "byteValue"() -> B;

    // Objects / Arrays
    ObjsEquals = Objects Static "equals"(Obj, Obj) -> Z;
    ObjsHashCode = Objects Static "hashCode"(Obj) -> I;
    ObjsHash = Objects Static "hash"(ObjArr) varargs -> I;
    ObjsRequireNonNull = Objects Static "requireNonNull"(Obj) -> Arg0;
    ObjsRequireNonNullMsg = Objects Static "requireNonNull"(Obj, Str) -> Arg0;
    ObjsIsNull = Objects Static "isNull"(Obj) -> Z;
    ObjsNonNull = Objects Static "nonNull"(Obj) -> Z;
    ObjsToString = Objects Static "toString"(Obj) -> Str;
    ObjsToStringDefault = Objects Static "toString"(Obj, Str) -> Str;
    ArrToString = Arrays Static "toString"(AnyArr) -> Str;
    ArrSort = Arrays Static "sort"(AnyArr) -> V;
    ArrFill = Arrays Static "fill"(AnyArr, Any) -> V;
    ArrEquals = Arrays Static "equals"(AnyArr, AnyArr) -> Z;
    ArrHashCode = Arrays Static "hashCode"(AnyArr) -> I;
    ArrCopyOf = Arrays Static "copyOf"(AnyArr, I) -> Arg0;
    ArrCopyOfRange = Arrays Static "copyOfRange"(AnyArr, I, I) -> Arg0;
    ArrAsList = Arrays Static "asList"(ObjArr) varargs -> ListOfArgs;

    // Collections
    CollSize = Collection Instance "size"() -> I;
    CollIsEmpty = Collection Instance "isEmpty"() -> Z;
    CollContains = Collection Instance "contains"(Obj) -> Z;
    CollAdd = Collection Instance "add"(E0) -> Z;
    CollRemoveObj = Collection Instance "remove"(Obj) -> Z;
    CollClear = Collection Instance "clear"() -> V;
    CollAddAll = Collection Instance "addAll"(CollE0) -> Z;
    ListGet = List Instance "get"(I) -> E0;
    ListSet = List Instance "set"(I, E0) -> E0;
    ListAddAt = List Instance "add"(I, E0) -> V;
    ListRemoveAt = List Instance "remove"(I) -> E0;
    ListIndexOf = List Instance "indexOf"(Obj) -> I;
    ListLastIndexOf = List Instance "lastIndexOf"(Obj) -> I;
    ListOf = List Static "of"(ObjArr) varargs -> ListOfArgs;
    ArrayListNew = ArrayList Ctor "<init>"() -> V;
    ArrayListNewCap = ArrayList Ctor "<init>"(I) -> V;
    ArrayListNewColl = ArrayList Ctor "<init>"(CollE0) -> V;
    SetOf = Set Static "of"(ObjArr) varargs -> SetOfArgs;
    HashSetNew = HashSet Ctor "<init>"() -> V;
    HashSetNewColl = HashSet Ctor "<init>"(CollE0) -> V;
    MapPut = Map Instance "put"(E0, E1) -> E1;
    MapGet = Map Instance "get"(Obj) -> E1;
    MapGetOrDefault = Map Instance "getOrDefault"(Obj, E1) -> E1;
    MapContainsKey = Map Instance "containsKey"(Obj) -> Z;
    MapContainsValue = Map Instance "containsValue"(Obj) -> Z;
    MapRemove = Map Instance "remove"(Obj) -> E1;
    MapSize = Map Instance "size"() -> I;
    MapIsEmpty = Map Instance "isEmpty"() -> Z;
    MapClear = Map Instance "clear"() -> V;
    MapPutIfAbsent = Map Instance "putIfAbsent"(E0, E1) -> E1;
    MapKeySet = Map Instance "keySet"() -> SetE0;
    MapValues = Map Instance "values"() -> CollE1;
    HashMapNew = HashMap Ctor "<init>"() -> V;

    // Throwable
    ThrGetMessage = Throwable Instance "getMessage"() -> Str;
    ThrGetLocalizedMessage = Throwable Instance "getLocalizedMessage"() -> Str;
    ThrGetCause = Throwable Instance "getCause"() -> Thr;
    ThrToString = Throwable Instance "toString"() -> Str;
    ThrPrintStackTrace = Throwable Instance "printStackTrace"() -> V;
    ThrNew = Throwable Ctor "<init>"() -> V;
    ThrNewMsg = Throwable Ctor "<init>"(Str) -> V;
    ThrNewMsgCause = Throwable Ctor "<init>"(Str, Thr) -> V;
    ThrNewCause = Throwable Ctor "<init>"(Thr) -> V;
    AssertionErrorNewObj = AssertionError Ctor "<init>"(Obj) -> V;

    // JUnit 4
    JuAssertTrue = JunitAssert Static "assertTrue"(Z) -> V;
    JuAssertTrueMsg = JunitAssert Static "assertTrue"(Str, Z) -> V;
    JuAssertFalse = JunitAssert Static "assertFalse"(Z) -> V;
    JuAssertFalseMsg = JunitAssert Static "assertFalse"(Str, Z) -> V;
    JuAssertEqualsLong = JunitAssert Static "assertEquals"(J, J) -> V;
    JuAssertEqualsLongMsg = JunitAssert Static "assertEquals"(Str, J, J) -> V;
    JuAssertEqualsDouble = JunitAssert Static "assertEquals"(D, D, D) -> V;
    JuAssertEqualsDoubleMsg = JunitAssert Static "assertEquals"(Str, D, D, D) -> V;
    JuAssertEqualsFloat = JunitAssert Static "assertEquals"(F, F, F) -> V;
    JuAssertEqualsObj = JunitAssert Static "assertEquals"(Obj, Obj) -> V;
    JuAssertEqualsObjMsg = JunitAssert Static "assertEquals"(Str, Obj, Obj) -> V;
    JuAssertNotEqualsObj = JunitAssert Static "assertNotEquals"(Obj, Obj) -> V;
    JuAssertNotEqualsLong = JunitAssert Static "assertNotEquals"(J, J) -> V;
    JuAssertNull = JunitAssert Static "assertNull"(Obj) -> V;
    JuAssertNullMsg = JunitAssert Static "assertNull"(Str, Obj) -> V;
    JuAssertNotNull = JunitAssert Static "assertNotNull"(Obj) -> V;
    JuAssertNotNullMsg = JunitAssert Static "assertNotNull"(Str, Obj) -> V;
    JuAssertSame = JunitAssert Static "assertSame"(Obj, Obj) -> V;
    JuAssertNotSame = JunitAssert Static "assertNotSame"(Obj, Obj) -> V;
    JuFail = JunitAssert Static "fail"() -> V;
    JuFailMsg = JunitAssert Static "fail"(Str) -> V;
    JuAssertArrayEquals = JunitAssert Static "assertArrayEquals"(AnyArr, AnyArr) -> V;

    // JUnit 5
    JpAssertTrue = JupiterAssertions Static "assertTrue"(Z) -> V;
    JpAssertTrueMsg = JupiterAssertions Static "assertTrue"(Z, Str) -> V;
    JpAssertFalse = JupiterAssertions Static "assertFalse"(Z) -> V;
    JpAssertFalseMsg = JupiterAssertions Static "assertFalse"(Z, Str) -> V;
    JpAssertEqualsInt = JupiterAssertions Static "assertEquals"(I, I) -> V;
    JpAssertEqualsIntMsg = JupiterAssertions Static "assertEquals"(I, I, Str) -> V;
    JpAssertEqualsLong = JupiterAssertions Static "assertEquals"(J, J) -> V;
    JpAssertEqualsLongMsg = JupiterAssertions Static "assertEquals"(J, J, Str) -> V;
    JpAssertEqualsDouble = JupiterAssertions Static "assertEquals"(D, D) -> V;
    JpAssertEqualsDoubleDelta = JupiterAssertions Static "assertEquals"(D, D, D) -> V;
    JpAssertEqualsObj = JupiterAssertions Static "assertEquals"(Obj, Obj) -> V;
    JpAssertEqualsObjMsg = JupiterAssertions Static "assertEquals"(Obj, Obj, Str) -> V;
    JpAssertNotEqualsObj = JupiterAssertions Static "assertNotEquals"(Obj, Obj) -> V;
    JpAssertNull = JupiterAssertions Static "assertNull"(Obj) -> V;
    JpAssertNullMsg = JupiterAssertions Static "assertNull"(Obj, Str) -> V;
    JpAssertNotNull = JupiterAssertions Static "assertNotNull"(Obj) -> V;
    JpAssertNotNullMsg = JupiterAssertions Static "assertNotNull"(Obj, Str) -> V;
    JpAssertSame = JupiterAssertions Static "assertSame"(Obj, Obj) -> V;
    JpFail = JupiterAssertions Static "fail"(Str) -> V;
    JpAssertArrayEquals = JupiterAssertions Static "assertArrayEquals"(AnyArr, AnyArr) -> V;
}

impl BuiltinMethod {
    pub fn entry(self) -> &'static Entry {
        TABLE.iter().find(|e| e.method == self).expect("every method has a table entry")
    }
}

/// Entries named `name` that are callable on `owner` (directly or through
/// a supertype).
pub fn lookup(owner: Builtin, name: &str, statics: bool) -> Vec<&'static Entry> {
    TABLE
        .iter()
        .filter(|e| e.name == name)
        .filter(|e| match e.kind {
            Kind::Static => statics && e.owner == owner,
            Kind::Instance => !statics && owner.is_subtype_of(e.owner),
            Kind::Ctor => false,
        })
        .collect()
}

/// Constructors of a library class. Exception classes share the
/// `Throwable` constructor set.
pub fn constructors(class: Builtin) -> Vec<&'static Entry> {
    let owner = if class.is_throwable() { Builtin::Throwable } else { class };
    let mut out: Vec<&'static Entry> = TABLE.iter().filter(|e| matches!(e.kind, Kind::Ctor) && e.owner == owner).collect();
    if class == Builtin::AssertionError || class == Builtin::AssertionFailedError {
        out.push(BuiltinMethod::AssertionErrorNewObj.entry());
    }
    out
}

/// Whether `new C(...)` is allowed for library class `C`.
pub fn instantiable(class: Builtin) -> bool {
    class.is_throwable()
        || matches!(class, Builtin::Object | Builtin::String | Builtin::StringBuilder | Builtin::ArrayList | Builtin::HashMap | Builtin::HashSet)
}

fn prim_type(p: P) -> Option<Prim> {
    Some(match p {
        P::Z => Prim::Boolean,
        P::B => Prim::Byte,
        P::S => Prim::Short,
        P::C => Prim::Char,
        P::I => Prim::Int,
        P::J => Prim::Long,
        P::F => Prim::Float,
        P::D => Prim::Double,
        _ => return None,
    })
}

pub fn boxed_type(t: &Type) -> Type {
    match t {
        Type::Prim(p) => Type::builtin(p.box_class()),
        other => other.clone(),
    }
}

/// Concrete type for a signature slot. `recv` is the receiver's static type,
/// `args` the argument types at the call site.
pub fn resolve(p: P, recv: Option<&Type>, args: &[Type]) -> Type {
    if let Some(prim) = prim_type(p) {
        return Type::Prim(prim);
    }
    let targ = |i: usize| recv.map(|r| boxed_type(&r.type_arg(i))).unwrap_or_else(Type::object);
    match p {
        P::V => Type::Void,
        P::Str => Type::string(),
        P::Obj | P::Any => Type::object(),
        P::Cs => Type::builtin(Builtin::CharSequence),
        P::Sb => Type::builtin(Builtin::StringBuilder),
        P::Thr => Type::builtin(Builtin::Throwable),
        P::PrintStream => Type::builtin(Builtin::PrintStream),
        P::Boxed(prim) => Type::builtin(prim.box_class()),
        P::CharArr => Type::Array(Box::new(Type::CHAR)),
        P::StrArr => Type::Array(Box::new(Type::string())),
        P::IntArr => Type::Array(Box::new(Type::INT)),
        P::ObjArr | P::AnyArr => Type::Array(Box::new(Type::object())),
        P::E0 => targ(0),
        P::E1 => targ(1),
        P::CollE0 => Type::Class(ClassRef::Builtin(Builtin::Collection), vec![targ(0)]),
        P::ListE0 => Type::Class(ClassRef::Builtin(Builtin::List), vec![targ(0)]),
        P::SetE0 => Type::Class(ClassRef::Builtin(Builtin::Set), vec![targ(0)]),
        P::CollE1 => Type::Class(ClassRef::Builtin(Builtin::Collection), vec![targ(1)]),
        P::Arg0 => args.first().cloned().unwrap_or_else(Type::object),
        P::ListOfArgs | P::SetOfArgs => {
            let b = if p == P::ListOfArgs { Builtin::List } else { Builtin::Set };
            let elem = common_elem(args);
            Type::Class(ClassRef::Builtin(b), vec![elem])
        }
        _ => unreachable!(),
    }
}

fn common_elem(args: &[Type]) -> Type {
    let mut it = args.iter().map(boxed_type);
    match it.next() {
        Some(first) if it.all(|t| t == first) && first != Type::Null => first,
        _ => Type::object(),
    }
}

/// Static constants and fields of library classes.
pub enum StaticField {
    Const(Type, Const),
    Method(BuiltinMethod),
    /// Boxed constant such as `Boolean.TRUE`.
    Boxed(Prim, Const),
}

pub fn static_field(owner: Builtin, name: &str) -> Option<StaticField> {
    use Builtin::*;
    let c = |t: Type, v: Const| Some(StaticField::Const(t, v));
    match (owner, name) {
        (Integer, "MAX_VALUE") => c(Type::INT, Const::Int(i32::MAX)),
        (Integer, "MIN_VALUE") => c(Type::INT, Const::Int(i32::MIN)),
        (Integer, "SIZE") => c(Type::INT, Const::Int(32)),
        (Long, "MAX_VALUE") => c(Type::LONG, Const::Long(i64::MAX)),
        (Long, "MIN_VALUE") => c(Type::LONG, Const::Long(i64::MIN)),
        (Short, "MAX_VALUE") => c(Type::Prim(Prim::Short), Const::Int(i16::MAX as i32)),
        (Short, "MIN_VALUE") => c(Type::Prim(Prim::Short), Const::Int(i16::MIN as i32)),
        (Byte, "MAX_VALUE") => c(Type::Prim(Prim::Byte), Const::Int(i8::MAX as i32)),
        (Byte, "MIN_VALUE") => c(Type::Prim(Prim::Byte), Const::Int(i8::MIN as i32)),
        (Character, "MAX_VALUE") => c(Type::CHAR, Const::Char(u16::MAX)),
        (Character, "MIN_VALUE") => c(Type::CHAR, Const::Char(0)),
        (Double, "MAX_VALUE") => c(Type::DOUBLE, Const::Double(f64::MAX)),
        (Double, "MIN_VALUE") => c(Type::DOUBLE, Const::Double(f64::from_bits(1))),
        (Double, "NaN") => c(Type::DOUBLE, Const::Double(f64::NAN)),
        (Double, "POSITIVE_INFINITY") => c(Type::DOUBLE, Const::Double(f64::INFINITY)),
        (Double, "NEGATIVE_INFINITY") => c(Type::DOUBLE, Const::Double(f64::NEG_INFINITY)),
        (Float, "MAX_VALUE") => c(Type::FLOAT, Const::Float(f32::MAX)),
        (Float, "MIN_VALUE") => c(Type::FLOAT, Const::Float(f32::from_bits(1))),
        (Float, "NaN") => c(Type::FLOAT, Const::Float(f32::NAN)),
        (Math, "PI") => c(Type::DOUBLE, Const::Double(std::f64::consts::PI)),
        (Math, "E") => c(Type::DOUBLE, Const::Double(std::f64::consts::E)),
        (System, "out") => Some(StaticField::Method(BuiltinMethod::SysOut)),
        (System, "err") => Some(StaticField::Method(BuiltinMethod::SysErr)),
        (Boolean, "TRUE") => Some(StaticField::Boxed(Prim::Boolean, Const::Bool(true))),
        (Boolean, "FALSE") => Some(StaticField::Boxed(Prim::Boolean, Const::Bool(false))),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_variant_has_one_entry() {
        for (i, e) in TABLE.iter().enumerate() {
            assert_eq!(TABLE.iter().position(|o| o.method == e.method), Some(i));
        }
    }

    #[test]
    fn instance_lookup_walks_supertypes() {
        let names: Vec<_> = lookup(Builtin::ArrayList, "add", false).iter().map(|e| e.method).collect();
        assert!(names.contains(&BuiltinMethod::CollAdd));
        assert!(names.contains(&BuiltinMethod::ListAddAt));
        assert!(!lookup(Builtin::Integer, "hashCode", false).is_empty());
        assert!(!lookup(Builtin::NullPointerException, "getMessage", false).is_empty());
    }

    #[test]
    fn generic_slots_follow_receiver() {
        let recv = Type::Class(ClassRef::Builtin(Builtin::Map), vec![Type::string(), Type::builtin(Builtin::Integer)]);
        assert_eq!(resolve(P::E1, Some(&recv), &[]), Type::builtin(Builtin::Integer));
        assert_eq!(resolve(P::SetE0, Some(&recv), &[]).type_arg(0), Type::string());
    }
}
