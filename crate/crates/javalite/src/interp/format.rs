//! `String.format` and the numeric parsers of the box classes.

use super::{Interp, R};
use crate::types::{Builtin, Prim};
use crate::value::{ObjKind, Value};

/// Decimal digits and exponent of the shortest representation of `x >= 0`:
/// `x = 0.d1d2... * 10^point`.
fn shortest_digits(x: f64) -> (Vec<u8>, i32) {
    if x == 0.0 {
        return (vec![0], 1);
    }
    let s = format!("{:e}", x);
    let (m, e) = s.split_once('e').expect("scientific form");
    let digits: Vec<u8> = m.bytes().filter(|b| b.is_ascii_digit()).map(|b| b - b'0').collect();
    (digits, e.parse::<i32>().expect("exponent") + 1)
}

/// Rounds half-up to `keep` leading digits. Returns the digits and the
/// possibly shifted point.
fn round_digits(mut ds: Vec<u8>, mut point: i32, keep: i32) -> (Vec<u8>, i32) {
    if keep < 0 {
        return (Vec::new(), point);
    }
    let keep = keep as usize;
    if ds.len() <= keep {
        return (ds, point);
    }
    let up = ds[keep] >= 5;
    ds.truncate(keep);
    if up {
        let mut i = ds.len();
        loop {
            if i == 0 {
                ds.insert(0, 1);
                point += 1;
                break;
            }
            i -= 1;
            if ds[i] == 9 {
                ds[i] = 0;
            } else {
                ds[i] += 1;
                break;
            }
        }
    }
    (ds, point)
}

/// `%.{prec}f` of a finite non-negative value, HALF_UP on the shortest
/// decimal representation.
pub(super) fn fixed(x: f64, prec: usize) -> String {
    let (ds, point) = shortest_digits(x);
    let (ds, point) = round_digits(ds, point, point + prec as i32);
    let digit = |i: i32| -> char {
        if i >= 0 && (i as usize) < ds.len() {
            (b'0' + ds[i as usize]) as char
        } else {
            '0'
        }
    };
    let mut out = String::new();
    if point <= 0 {
        out.push('0');
    } else {
        for i in 0..point {
            out.push(digit(i));
        }
    }
    if prec > 0 {
        out.push('.');
        for i in 0..prec as i32 {
            out.push(digit(point + i));
        }
    }
    out
}

/// `%.{prec}e` of a finite non-negative value.
fn scientific(x: f64, prec: usize) -> String {
    let (ds, point) = shortest_digits(x);
    let (ds, point) = if x == 0.0 { (vec![0], 1) } else { round_digits(ds, point, prec as i32 + 1) };
    let mut out = String::new();
    out.push((b'0' + ds[0]) as char);
    if prec > 0 {
        out.push('.');
        for i in 1..=prec {
            out.push((b'0' + ds.get(i).copied().unwrap_or(0)) as char);
        }
    }
    let e = if x == 0.0 { 0 } else { point - 1 };
    out.push('e');
    out.push(if e < 0 { '-' } else { '+' });
    out.push_str(&format!("{:02}", e.abs()));
    out
}

fn group(int_part: &str) -> String {
    let n = int_part.len();
    let mut out = String::new();
    for (i, c) in int_part.chars().enumerate() {
        if i > 0 && (n - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

#[derive(Default)]
struct Spec {
    left: bool,
    zero: bool,
    plus: bool,
    space: bool,
    comma: bool,
    paren: bool,
    width: Option<usize>,
    prec: Option<usize>,
}

impl Spec {
    /// Applies sign flags, grouping and padding to a magnitude.
    fn number(&self, neg: bool, mag: &str) -> String {
        let mag = if self.comma {
            match mag.split_once('.') {
                Some((i, f)) => format!("{}.{}", group(i), f),
                None => group(mag),
            }
        } else {
            mag.to_string()
        };
        let (pre, post) = if neg {
            if self.paren {
                ("(", ")")
            } else {
                ("-", "")
            }
        } else if self.plus {
            ("+", "")
        } else if self.space {
            (" ", "")
        } else {
            ("", "")
        };
        let len = pre.len() + mag.len() + post.len();
        let width = self.width.unwrap_or(0);
        if self.zero && len < width {
            format!("{pre}{}{mag}{post}", "0".repeat(width - len))
        } else {
            self.pad(format!("{pre}{mag}{post}"))
        }
    }

    fn pad(&self, s: String) -> String {
        let n = s.chars().count();
        match self.width {
            Some(w) if n < w => {
                if self.left {
                    format!("{s}{}", " ".repeat(w - n))
                } else {
                    format!("{}{s}", " ".repeat(w - n))
                }
            }
            _ => s,
        }
    }
}

impl Interp<'_> {
    fn format_error(&mut self, b: Builtin, msg: String) -> super::Unwind {
        self.throw(b, Some(msg))
    }

    pub(super) fn format(&mut self, fmt: &str, args: &[Value]) -> R<String> {
        let chars: Vec<char> = fmt.chars().collect();
        let mut out = String::new();
        let mut i = 0;
        let mut next_arg = 0usize;
        while i < chars.len() {
            let c = chars[i];
            if c != '%' {
                out.push(c);
                i += 1;
                continue;
            }
            let start = i;
            i += 1;
            // explicit index: digits followed by '$'
            let mut explicit = None;
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j > i && j < chars.len() && chars[j] == '$' {
                explicit = chars[i..j].iter().collect::<String>().parse::<usize>().ok();
                i = j + 1;
            }
            let mut spec = Spec::default();
            while i < chars.len() {
                match chars[i] {
                    '-' => spec.left = true,
                    '0' => spec.zero = true,
                    '+' => spec.plus = true,
                    ' ' => spec.space = true,
                    ',' => spec.comma = true,
                    '(' => spec.paren = true,
                    '#' => {}
                    _ => break,
                }
                i += 1;
            }
            let ws = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i > ws {
                spec.width = chars[ws..i].iter().collect::<String>().parse().ok();
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let ps = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                spec.prec = Some(chars[ps..i].iter().collect::<String>().parse().unwrap_or(0));
            }
            let Some(&conv) = chars.get(i) else {
                let s: String = chars[start..].iter().collect();
                return Err(self.format_error(Builtin::IllegalArgumentException, format!("Format specifier '{s}'")));
            };
            i += 1;
            let spec_text: String = chars[start..i].iter().collect();
            if conv == '%' {
                out.push_str(&spec.pad("%".into()));
                continue;
            }
            if conv == 'n' {
                out.push('\n');
                continue;
            }
            let idx = match explicit {
                Some(n) => n.saturating_sub(1),
                None => {
                    next_arg += 1;
                    next_arg - 1
                }
            };
            let Some(arg) = args.get(idx).cloned() else {
                return Err(self.format_error(Builtin::IllegalArgumentException, format!("Format specifier '{spec_text}'")));
            };
            let raw = match &arg {
                Value::Ref(r) => match &r.kind {
                    ObjKind::Boxed(p, v) => Some((*p, v.clone())),
                    _ => None,
                },
                _ => None,
            };
            let mismatch = |it: &mut Self, arg: &Value| {
                let name = match arg {
                    Value::Ref(r) => it.class_name_of(r),
                    _ => "null".into(),
                };
                it.format_error(Builtin::IllegalArgumentException, format!("{conv} != {name}"))
            };
            let piece = match conv {
                's' | 'S' => {
                    let mut s = self.to_jstring(&arg)?;
                    if let Some(p) = spec.prec {
                        s = s.chars().take(p).collect();
                    }
                    if conv == 'S' {
                        s = s.to_uppercase();
                    }
                    spec.pad(s)
                }
                'b' | 'B' => {
                    let b = match &raw {
                        _ if arg.is_null() => false,
                        Some((Prim::Boolean, v)) => v.as_bool(),
                        _ => true,
                    };
                    let s = b.to_string();
                    spec.pad(if conv == 'B' { s.to_uppercase() } else { s })
                }
                'c' | 'C' => match &raw {
                    Some((Prim::Char, v)) => {
                        let s = crate::jfmt::char(v.as_i32() as u16);
                        spec.pad(if conv == 'C' { s.to_uppercase() } else { s })
                    }
                    Some((Prim::Int | Prim::Short | Prim::Byte, v)) => {
                        let s = char::from_u32(v.as_i32() as u32).map(|c| c.to_string()).unwrap_or_default();
                        spec.pad(s)
                    }
                    _ if arg.is_null() => spec.pad("null".into()),
                    _ => return Err(mismatch(self, &arg)),
                },
                'd' => match &raw {
                    Some((Prim::Int | Prim::Long | Prim::Short | Prim::Byte, v)) => {
                        let n = v.as_i64();
                        spec.number(n < 0, &n.unsigned_abs().to_string())
                    }
                    _ if arg.is_null() => spec.pad("null".into()),
                    _ => return Err(mismatch(self, &arg)),
                },
                'x' | 'X' | 'o' => match &raw {
                    Some((p @ (Prim::Int | Prim::Long | Prim::Short | Prim::Byte), v)) => {
                        let bits: u64 = match p {
                            Prim::Long => v.as_i64() as u64,
                            Prim::Byte => v.as_i64() as u8 as u64,
                            Prim::Short => v.as_i64() as u16 as u64,
                            _ => v.as_i32() as u32 as u64,
                        };
                        let s = match conv {
                            'x' => format!("{bits:x}"),
                            'X' => format!("{bits:X}"),
                            _ => format!("{bits:o}"),
                        };
                        let w = spec.width.unwrap_or(0);
                        if spec.zero && s.len() < w {
                            format!("{}{s}", "0".repeat(w - s.len()))
                        } else {
                            spec.pad(s)
                        }
                    }
                    _ if arg.is_null() => spec.pad("null".into()),
                    _ => return Err(mismatch(self, &arg)),
                },
                'f' | 'e' | 'E' => match &raw {
                    Some((Prim::Float | Prim::Double, v)) => {
                        let d = match v {
                            Value::Float(f) => {
                                // Float arguments format through their decimal string.
                                crate::jfmt::float(*f).parse::<f64>().unwrap_or(*f as f64)
                            }
                            other => other.as_f64(),
                        };
                        if d.is_nan() {
                            spec.pad("NaN".into())
                        } else if d.is_infinite() {
                            let s = if d > 0.0 {
                                if spec.plus {
                                    "+Infinity"
                                } else {
                                    "Infinity"
                                }
                            } else if spec.paren {
                                "(Infinity)"
                            } else {
                                "-Infinity"
                            };
                            spec.pad(s.into())
                        } else {
                            let prec = spec.prec.unwrap_or(6);
                            let neg = d.is_sign_negative();
                            let mag = if conv == 'f' {
                                fixed(d.abs(), prec)
                            } else {
                                let s = scientific(d.abs(), prec);
                                if conv == 'E' {
                                    s.to_uppercase()
                                } else {
                                    s
                                }
                            };
                            spec.number(neg, &mag)
                        }
                    }
                    _ if arg.is_null() => spec.pad("null".into()),
                    _ => return Err(mismatch(self, &arg)),
                },
                'h' | 'H' => {
                    let h = self.hash_code(&arg)?;
                    let s = if arg.is_null() { "null".into() } else { format!("{:x}", h as u32) };
                    spec.pad(if conv == 'H' { s.to_uppercase() } else { s })
                }
                other => {
                    return Err(self.format_error(Builtin::IllegalArgumentException, format!("Conversion = '{other}'")));
                }
            };
            out.push_str(&piece);
        }
        Ok(out)
    }

    fn nfe(&mut self, s: &str, radix: u32) -> super::Unwind {
        let msg = if radix == 10 { format!("For input string: \"{s}\"") } else { format!("For input string: \"{s}\" under radix {radix}") };
        self.throw(Builtin::NumberFormatException, Some(msg))
    }

    /// `Long.parseLong` bounded to `[min, max]`.
    pub(super) fn parse_integral(&mut self, v: &Value, radix: i32, min: i64, max: i64) -> R<i64> {
        if v.is_null() {
            return Err(self.throw(Builtin::NumberFormatException, Some("Cannot parse null string: null".into())));
        }
        let s = self.rust_string(v);
        if !(2..=36).contains(&radix) {
            let msg = if radix < 2 { format!("radix {radix} less than Character.MIN_RADIX") } else { format!("radix {radix} greater than Character.MAX_RADIX") };
            return Err(self.throw(Builtin::NumberFormatException, Some(msg)));
        }
        let radix = radix as u32;
        let (neg, digits) = match s.chars().next() {
            Some('-') => (true, &s[1..]),
            Some('+') => (false, &s[1..]),
            _ => (false, &s[..]),
        };
        if digits.is_empty() {
            return Err(self.nfe(&s, radix));
        }
        let mut acc: i128 = 0;
        for c in digits.chars() {
            let Some(d) = c.to_digit(radix) else { return Err(self.nfe(&s, radix)) };
            acc = acc * radix as i128 + d as i128;
            if acc > (max as i128) + 1 {
                return Err(self.nfe(&s, radix));
            }
        }
        let val = if neg { -acc } else { acc };
        if val < min as i128 || val > max as i128 {
            return Err(self.nfe(&s, radix));
        }
        Ok(val as i64)
    }

    /// `Byte`/`Short` parsing reports range errors differently.
    pub(super) fn parse_small(&mut self, v: &Value, min: i64, max: i64) -> R<i64> {
        let n = self.parse_integral(v, 10, i32::MIN as i64, i32::MAX as i64)?;
        if n < min || n > max {
            let s = self.rust_string(v);
            return Err(self.throw(Builtin::NumberFormatException, Some(format!("Value out of range. Value:\"{s}\" Radix:10"))));
        }
        Ok(n)
    }

    pub(super) fn parse_double(&mut self, v: &Value) -> R<f64> {
        if v.is_null() {
            return Err(self.npe());
        }
        let raw = self.rust_string(v);
        let s = raw.trim_matches(|c: char| c <= ' ');
        if s.is_empty() {
            return Err(self.throw(Builtin::NumberFormatException, Some("empty String".into())));
        }
        let body = s.strip_suffix(['d', 'D', 'f', 'F']).unwrap_or(s);
        let (sign, mag) = match body.chars().next() {
            Some('-') => (-1.0, &body[1..]),
            Some('+') => (1.0, &body[1..]),
            _ => (1.0, body),
        };
        let ok = match mag {
            "NaN" if body.len() == s.len() => return Ok(f64::NAN),
            "Infinity" if body.len() == s.len() => return Ok(sign * f64::INFINITY),
            _ => {
                let re = regex::Regex::new(r"^(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$").expect("float pattern");
                re.is_match(mag)
            }
        };
        if !ok {
            return Err(self.throw(Builtin::NumberFormatException, Some(format!("For input string: \"{raw}\""))));
        }
        Ok(sign * mag.parse::<f64>().unwrap_or(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_rounds_half_up_on_decimal_digits() {
        assert_eq!(fixed(1.005, 2), "1.01");
        assert_eq!(fixed(0.5, 0), "1");
        assert_eq!(fixed(2.5, 0), "3");
        assert_eq!(fixed(0.05, 1), "0.1");
        assert_eq!(fixed(1.23456, 2), "1.23");
        assert_eq!(fixed(9.999, 2), "10.00");
        assert_eq!(fixed(0.0, 3), "0.000");
        assert_eq!(fixed(123.0, 1), "123.0");
        assert_eq!(fixed(0.001, 2), "0.00");
        assert_eq!(fixed(1e20, 0), "100000000000000000000");
    }

    #[test]
    fn scientific_layout() {
        assert_eq!(scientific(12.3456, 6), "1.234560e+01");
        assert_eq!(scientific(0.0, 2), "0.00e+00");
        assert_eq!(scientific(9.99, 1), "1.0e+01");
    }

    #[test]
    fn grouping() {
        assert_eq!(group("1234567"), "1,234,567");
        assert_eq!(group("123"), "123");
    }
}
