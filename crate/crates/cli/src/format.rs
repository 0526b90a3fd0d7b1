//! Number formatting and CSV helpers shared by the commands.

/// `x` with 12 significant digits, in the style of C's `%.12g`.
pub fn g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// CSV table with a fixed header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Reads a single-column CSV with a one-line header.
pub fn read_samples(text: &str) -> Result<Vec<f64>, String> {
    let mut lines = text.lines().enumerate();
    lines.next().ok_or("sample file is empty")?;
    let mut out = Vec::new();
    for (i, line) in lines {
        let v = line.trim();
        if v.is_empty() {
            continue;
        }
        let first = v.split(',').next().unwrap().trim();
        out.push(
            first
                .parse::<f64>()
                .map_err(|_| format!("line {}: '{first}' is not a number", i + 1))?,
        );
    }
    if out.is_empty() {
        return Err("sample file has no values".into());
    }
    Ok(out)
}

/// Single-column CSV. Samples use Rust's shortest round-trip form so that
/// files read back bit for bit.
pub fn write_samples(name: &str, values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20 + name.len() + 1);
    out.push_str(name);
    out.push('\n');
    for v in values {
        out.push_str(&format!("{v:?}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(-2.95), "-2.95");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(5.377_710_123_456_789), "5.37771012346");
        assert_eq!(g12(123456789012.0), "123456789012");
        assert_eq!(g12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(g12(1.5e-7), "1.5e-07");
        assert_eq!(g12(f64::NAN), "nan");
        assert_eq!(g12(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn samples_round_trip() {
        let v = vec![0.1, 0.0, 1e-300, 12.5];
        assert_eq!(read_samples(&write_samples("s", &v)).unwrap(), v);
        assert!(read_samples("s\n").is_err());
        assert!(read_samples("s\n1\nx\n").is_err());
    }
}
