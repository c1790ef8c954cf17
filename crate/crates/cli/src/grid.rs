//! Sweep grids: `lo:hi`, `lo:hi:count`, `lo:hi:count:log`, `lo:hi:log` and comma lists.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

/// Points per decade of a `lo:hi:log` grid.
pub const POINTS_PER_DECADE: usize = 8;

/// A parsed sweep specification; the source text is kept for the config echo.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    source: String,
    values: Vec<f64>,
}

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The values as non-negative integers, rounded, in order and without repeats.
    pub fn integers(&self) -> Result<Vec<usize>, String> {
        let mut out: Vec<usize> = Vec::with_capacity(self.values.len());
        for &v in &self.values {
            let integral = (v - v.round()).abs() <= 1e-9 * v.abs().max(1.0);
            if v < 0.0 || (!integral && !self.is_log()) {
                return Err(format!("grid '{}' must hold non-negative integers, got {v}", self.source));
            }
            let k = v.round() as usize;
            if out.last() != Some(&k) {
                out.push(k);
            }
        }
        Ok(out)
    }

    fn is_log(&self) -> bool {
        self.source.ends_with(":log")
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

fn number(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let v = match t.as_str() {
        "pi" => std::f64::consts::PI,
        "-pi" => -std::f64::consts::PI,
        _ => t.parse::<f64>().map_err(|e| format!("'{s}': {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn linear(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 }).collect()
}

fn logarithmic(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, String> {
    if lo <= 0.0 || hi <= 0.0 {
        return Err("log grids need positive bounds".into());
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok(linear(a, b, count).into_iter().enumerate().map(|(i, x)| if i == 0 { lo } else if i + 1 == count { hi } else { x.exp() }).collect())
}

fn count(s: &str) -> Result<usize, String> {
    let c = s.trim().parse::<usize>().map_err(|e| format!("count '{s}': {e}"))?;
    if c == 0 {
        return Err("grid count must be positive".into());
    }
    Ok(c)
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let source = s.trim().to_string();
        if source.is_empty() {
            return Err("empty grid".into());
        }
        let values = if source.contains(',') {
            source.split(',').map(number).collect::<Result<Vec<_>, _>>()?
        } else {
            let parts: Vec<&str> = source.split(':').collect();
            match parts.as_slice() {
                [v] => vec![number(v)?],
                [lo, hi] => {
                    let (lo, hi) = (number(lo)?, number(hi)?);
                    if hi < lo {
                        return Err(format!("grid '{source}' has hi < lo"));
                    }
                    let steps = (hi - lo + 1e-9).floor() as usize;
                    (0..=steps).map(|i| lo + i as f64).collect()
                }
                [lo, hi, "log"] => {
                    let (lo, hi) = (number(lo)?, number(hi)?);
                    if lo <= 0.0 || hi < lo {
                        return Err(format!("grid '{source}' needs 0 < lo ≤ hi"));
                    }
                    let n = ((hi / lo).log10() * POINTS_PER_DECADE as f64).round() as usize + 1;
                    logarithmic(lo, hi, n)?
                }
                [lo, hi, c] => linear(number(lo)?, number(hi)?, count(c)?),
                [lo, hi, c, "log"] => logarithmic(number(lo)?, number(hi)?, count(c)?)?,
                _ => return Err(format!("cannot parse grid '{source}'")),
            }
        };
        Ok(Self { source, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> Vec<f64> {
        s.parse::<Grid>().unwrap().values().to_vec()
    }

    #[test]
    fn forms() {
        assert_eq!(g("3"), vec![3.0]);
        assert_eq!(g("1,2.5,-4"), vec![1.0, 2.5, -4.0]);
        assert_eq!(g("10:13"), vec![10.0, 11.0, 12.0, 13.0]);
        assert_eq!(g("0:1:5"), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let l = g("1:100:3:log");
        assert_eq!(l[0], 1.0);
        assert!((l[1] - 10.0).abs() < 1e-12);
        assert_eq!(l[2], 100.0);
        let d = g("10:100000:log");
        assert_eq!(d.len(), 33);
        assert_eq!(*d.last().unwrap(), 100000.0);
        assert_eq!(g("pi"), vec![std::f64::consts::PI]);
    }

    #[test]
    fn integer_grids() {
        let v = "10:200:30:log".parse::<Grid>().unwrap().integers().unwrap();
        assert_eq!(v[0], 10);
        assert_eq!(*v.last().unwrap(), 200);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!("0.5,1".parse::<Grid>().unwrap().integers().is_err());
    }

    #[test]
    fn rejects_bad_input() {
        for s in ["", "a:b", "5:1", "1:2:0", "0:10:log", "1:2:3:4:5", "nan"] {
            assert!(s.parse::<Grid>().is_err(), "{s}");
        }
    }
}
