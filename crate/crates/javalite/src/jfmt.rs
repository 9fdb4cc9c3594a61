//! Java's textual forms of primitive values.

/// `Double.toString`.
pub fn double(d: f64) -> String {
    if d.is_nan() {
        return "NaN".into();
    }
    if d.is_infinite() {
        return if d > 0.0 { "Infinity".into() } else { "-Infinity".into() };
    }
    if d == 0.0 {
        return if d.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    layout(&format!("{:e}", d), d.abs() >= 1e-3 && d.abs() < 1e7)
}

/// `Float.toString`.
pub fn float(f: f32) -> String {
    if f.is_nan() {
        return "NaN".into();
    }
    if f.is_infinite() {
        return if f > 0.0 { "Infinity".into() } else { "-Infinity".into() };
    }
    if f == 0.0 {
        return if f.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    layout(&format!("{:e}", f), f.abs() >= 1e-3 && f.abs() < 1e7)
}

/// Turns Rust's shortest `{:e}` output (`-1.2345e3`) into Java's layout.
fn layout(sci: &str, plain: bool) -> String {
    let (neg, body) = match sci.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, sci),
    };
    let (mantissa, exp) = body.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if plain {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(&digits);
                out.extend(std::iter::repeat_n('0', int_len - digits.len()));
                out.push_str(".0");
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(&digits);
        }
    } else {
        out.push_str(&digits[..1]);
        out.push('.');
        if digits.len() > 1 {
            out.push_str(&digits[1..]);
        } else {
            out.push('0');
        }
        out.push('E');
        out.push_str(&exp.to_string());
    }
    out
}

pub fn char(c: u16) -> String {
    String::from_utf16_lossy(&[c])
}

pub fn to_utf16(s: &str) -> Vec<u16> {
    s.encode_utf16().collect()
}

pub fn from_utf16(s: &[u16]) -> String {
    String::from_utf16_lossy(s)
}

/// `String.hashCode`.
pub fn string_hash(s: &[u16]) -> i32 {
    s.iter().fold(0i32, |h, &c| h.wrapping_mul(31).wrapping_add(c as i32))
}

/// `Double.hashCode`.
pub fn double_hash(d: f64) -> i32 {
    let bits = if d.is_nan() { 0x7ff8000000000000u64 } else { d.to_bits() };
    (bits ^ (bits >> 32)) as i32
}

pub fn long_hash(l: i64) -> i32 {
    (l ^ ((l as u64) >> 32) as i64) as i32
}

/// `Integer.toString(i, radix)`.
pub fn int_radix(i: i64, radix: u32) -> String {
    let radix = if (2..=36).contains(&radix) { radix } else { 10 };
    if i == 0 {
        return "0".into();
    }
    let neg = i < 0;
    let mut n = (i as i128).unsigned_abs();
    let mut digits = Vec::new();
    while n > 0 {
        digits.push(std::char::from_digit((n % radix as u128) as u32, radix).unwrap());
        n /= radix as u128;
    }
    if neg {
        digits.push('-');
    }
    digits.iter().rev().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_match_java() {
        assert_eq!(double(1.0), "1.0");
        assert_eq!(double(0.1), "0.1");
        assert_eq!(double(100.0), "100.0");
        assert_eq!(double(1234567.0), "1234567.0");
        assert_eq!(double(1.0e7), "1.0E7");
        assert_eq!(double(0.001), "0.001");
        assert_eq!(double(0.0001), "1.0E-4");
        assert_eq!(double(-2.5), "-2.5");
        assert_eq!(double(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(double(1.2345e-10), "1.2345E-10");
        assert_eq!(double(f64::MAX), "1.7976931348623157E308");
        assert_eq!(double(-0.0), "-0.0");
    }

    #[test]
    fn floats_match_java() {
        assert_eq!(float(1.5), "1.5");
        assert_eq!(float(0.1), "0.1");
        assert_eq!(float(3.4028235e38), "3.4028235E38");
    }

    #[test]
    fn string_hash_overflows_like_java() {
        assert_eq!(string_hash(&to_utf16("polygenelubricants")), i32::MIN);
        assert_eq!(string_hash(&to_utf16("hello")), 99162322);
        assert_eq!(string_hash(&[]), 0);
    }

    #[test]
    fn radix_output() {
        assert_eq!(int_radix(255, 16), "ff");
        assert_eq!(int_radix(-5, 2), "-101");
    }
}
