//! Number formatting shared by the CSV writers.

/// `printf("%.{digits}g")`: shortest of fixed or exponent notation with
/// trailing zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Joins already-formatted fields with commas and a trailing LF.
pub fn csv_line<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = fields
        .into_iter()
        .map(|f| f.as_ref().to_string())
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

/// `a/b` with the denominator always written, so `8` prints as `8/1`.
pub fn ratio_string(r: &crate::Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serializes an exact rational through [`ratio_string`].
pub(crate) fn ser_ratio<S: serde::Serializer>(
    r: &crate::Rational,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}
