//! Parsers for flag values.

use erws_core::sim::default_checkpoints;

/// Positive integer, also accepting integral scientific notation such as `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return if v > 0 { Ok(v) } else { Err("must be at least 1".into()) };
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 9.0e15 {
        Ok(v as u64)
    } else {
        Err(format!("`{s}` is not a positive integer"))
    }
}

/// `lo:hi` time window.
pub fn parse_window(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let (lo, hi) = (parse_count(a)?, parse_count(b)?);
    if lo >= hi {
        return Err(format!("window `{s}` is empty"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == n { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / n as f64 })
            .collect()
    }
}

/// `lo:hi:n` with `n >= 2` evenly spaced values, endpoints included.
pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("expected lo:hi:n, got `{s}`"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound in `{s}`"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound in `{s}`"))?;
    let steps: usize = n.parse().map_err(|_| format!("bad step count in `{s}`"))?;
    if steps < 2 || !(lo < hi) {
        return Err(format!("range `{s}` needs lo < hi and at least 2 steps"));
    }
    Ok(Range { lo, hi, steps })
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckpointSpec {
    Log,
    Linear,
    List(Vec<u64>),
}

pub fn parse_checkpoints(s: &str) -> Result<CheckpointSpec, String> {
    match s {
        "log" => Ok(CheckpointSpec::Log),
        "linear" => Ok(CheckpointSpec::Linear),
        list => {
            let mut ts = list.split(',').map(|v| parse_count(v.trim())).collect::<Result<Vec<_>, _>>()?;
            ts.sort_unstable();
            ts.dedup();
            Ok(CheckpointSpec::List(ts))
        }
    }
}

impl CheckpointSpec {
    /// Checkpoint times and the horizon they imply.
    pub fn resolve(&self, t_max: Option<u64>, points: usize) -> Result<(Vec<u64>, u64), String> {
        match self {
            CheckpointSpec::List(ts) => {
                let last = *ts.last().expect("non-empty list");
                let horizon = t_max.unwrap_or(last);
                if last > horizon {
                    return Err(format!("checkpoint {last} exceeds --t-max {horizon}"));
                }
                Ok((ts.clone(), horizon))
            }
            CheckpointSpec::Log => {
                let t = t_max.ok_or("--t-max is required with log checkpoints")?;
                Ok((default_checkpoints(t), t))
            }
            CheckpointSpec::Linear => {
                let t = t_max.ok_or("--t-max is required with linear checkpoints")?;
                let n = points.max(2) as u64;
                let mut ts: Vec<u64> = (0..n).map(|i| 1 + (t - 1) * i / (n - 1)).collect();
                ts.dedup();
                Ok((ts, t))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seed {
    Fixed(u64),
    Random,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn parse_seed(s: &str) -> Result<Seed, String> {
    if s == "random" {
        return Ok(Seed::Random);
    }
    s.parse().map(Seed::Fixed).map_err(|_| format!("seed must be an unsigned integer or `random`, got `{s}`"))
}

impl Seed {
    pub fn resolve(self) -> u64 {
        match self {
            Seed::Fixed(v) => v,
            Seed::Random => rand::random(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("10000"), Ok(10_000));
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert!(parse_count("0").is_err());
        assert!(parse_count("2.5").is_err());
        assert!(parse_count("x").is_err());
    }

    #[test]
    fn ranges() {
        let r = parse_range("0.05:0.3:6").unwrap();
        let v = r.values();
        assert_eq!(v.len(), 6);
        assert_eq!((v[0], v[5]), (0.05, 0.3));
        assert!(parse_range("0.3:0.1:4").is_err());
        assert!(parse_range("0.1:0.3:1").is_err());
        assert!(parse_range("0.1:0.3").is_err());
        assert_eq!(parse_window("1e4:1e6"), Ok((10_000, 1_000_000)));
    }

    #[test]
    fn checkpoint_specs() {
        let (ts, t) = parse_checkpoints("3,1,2").unwrap().resolve(None, 0).unwrap();
        assert_eq!((ts, t), (vec![1, 2, 3], 3));
        let (ts, _) = parse_checkpoints("log").unwrap().resolve(Some(10), 0).unwrap();
        assert_eq!(ts, vec![1, 2, 4, 8, 10]);
        let (ts, _) = parse_checkpoints("linear").unwrap().resolve(Some(101), 5).unwrap();
        assert_eq!(ts, vec![1, 26, 51, 76, 101]);
        assert!(parse_checkpoints("5").unwrap().resolve(Some(4), 0).is_err());
        assert!(parse_checkpoints("log").unwrap().resolve(None, 0).is_err());
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("42"), Ok(Seed::Fixed(42)));
        assert_eq!(parse_seed("random"), Ok(Seed::Random));
        assert!(parse_seed("-1").is_err());
    }
}
