use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{usage, CliError, CliResult};

/// Variables that may be swept.
pub const SWEEP_VARIABLES: [&str; 3] = ["R", "p", "gamma"];
/// Keys accepted by `--set`.
pub const SET_KEYS: [&str; 6] = ["R", "p", "gamma", "d", "n", "k"];

/// `VAR:START:STOP:STEP`, inclusive of `STOP` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [var, start, stop, step] = parts[..] else {
            return Err(format!("sweep `{s}` is not VAR:START:STOP:STEP"));
        };
        if !SWEEP_VARIABLES.contains(&var) {
            return Err(format!("sweep variable `{var}` is not one of R, p, gamma"));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        };
        let spec = SweepSpec {
            variable: var.to_string(),
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        };
        if spec.step <= 0.0 {
            return Err(format!("sweep step must be positive, got {}", spec.step));
        }
        if spec.start > spec.stop {
            return Err(format!(
                "sweep start {} exceeds stop {}",
                spec.start, spec.stop
            ));
        }
        if (spec.stop - spec.start) / spec.step > 1e6 {
            return Err("sweep has more than a million points".into());
        }
        Ok(spec)
    }
}

impl SweepSpec {
    /// `start + i step` for `i = 0..=floor((stop - start)/step)`, each value
    /// computed directly from `i` so grids do not drift.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.start + i as f64 * self.step)
            .map(|x| if x > self.stop { self.stop } else { x })
            .collect()
    }
}

/// `KEY=VALUE` for `--set`.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub key: String,
    pub value: f64,
}

impl FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| format!("setting `{s}` is not KEY=VALUE"))?;
        if !SET_KEYS.contains(&key) {
            return Err(format!(
                "unknown key `{key}`; expected one of {}",
                SET_KEYS.join(", ")
            ));
        }
        let value = value
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{value}` is not a finite number"))?;
        Ok(Setting {
            key: key.to_string(),
            value,
        })
    }
}

/// One grid point: the swept values (in sweep order) and all parameters.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub index: usize,
    pub swept: Vec<f64>,
    pub params: BTreeMap<String, f64>,
}

impl GridPoint {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn require(&self, key: &str) -> CliResult<f64> {
        self.get(key).ok_or_else(|| {
            usage(format!(
                "parameter `{key}` is required; pass --set {key}=... or --sweep {key}:..."
            ))
        })
    }

    /// An integer-valued parameter such as `d` or `n`.
    pub fn integer(&self, key: &str) -> CliResult<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(x) if x >= 0.0 && x.fract() == 0.0 && x < 1e9 => Ok(Some(x as u64)),
            Some(x) => Err(usage(format!(
                "`{key}` must be a non-negative integer, got {x}"
            ))),
        }
    }
}

/// Cartesian product of the sweeps, the first sweep varying slowest.
pub fn grid(sweeps: &[SweepSpec], fixed: &[Setting]) -> CliResult<Vec<GridPoint>> {
    let mut params = BTreeMap::new();
    for s in fixed {
        if params.insert(s.key.clone(), s.value).is_some() {
            return Err(usage(format!("`{}` is set twice", s.key)));
        }
    }
    for (i, s) in sweeps.iter().enumerate() {
        if params.contains_key(&s.variable) || sweeps[..i].iter().any(|t| t.variable == s.variable)
        {
            return Err(usage(format!(
                "`{}` is both swept and set, or swept twice",
                s.variable
            )));
        }
    }
    let mut points = vec![(Vec::new(), params)];
    for s in sweeps {
        let values = s.values();
        points = points
            .into_iter()
            .flat_map(|(swept, params)| {
                values.iter().map(move |&x| {
                    let mut swept = swept.clone();
                    swept.push(x);
                    let mut params = params.clone();
                    params.insert(s.variable.clone(), x);
                    (swept, params)
                })
            })
            .collect();
    }
    Ok(points
        .into_iter()
        .enumerate()
        .map(|(index, (swept, params))| GridPoint {
            index,
            swept,
            params,
        })
        .collect())
}

pub fn check_allowed(
    sweeps: &[SweepSpec],
    fixed: &[Setting],
    allowed: &[&str],
) -> Result<(), CliError> {
    let keys = sweeps
        .iter()
        .map(|s| &s.variable)
        .chain(fixed.iter().map(|s| &s.key));
    for k in keys {
        if !allowed.contains(&k.as_str()) {
            return Err(usage(format!(
                "parameter `{k}` does not apply here; allowed: {}",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands() {
        let s: SweepSpec = "R:0:1:0.25".parse().unwrap();
        assert_eq!(s.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let s: SweepSpec = "gamma:0:1:0.01".parse().unwrap();
        assert_eq!(s.values().len(), 101);
        assert_eq!(*s.values().last().unwrap(), 1.0);
        let s: SweepSpec = "p:0:0.19:0.0015".parse().unwrap();
        assert_eq!(s.values().len(), 127);
    }

    #[test]
    fn rejects_bad_sweeps() {
        for bad in [
            "R:1:0:0.1",
            "R:0:1:0",
            "R:0:1:-1",
            "q:0:1:0.1",
            "R:0:1",
            "R:a:1:0.1",
        ] {
            assert!(bad.parse::<SweepSpec>().is_err(), "{bad}");
        }
        assert!("x=1".parse::<Setting>().is_err());
        assert!("p=nan".parse::<Setting>().is_err());
    }

    #[test]
    fn grid_order_is_row_major() {
        let sweeps = vec!["p:0:0.1:0.1".parse().unwrap(), "R:0:1:0.5".parse().unwrap()];
        let g = grid(&sweeps, &[]).unwrap();
        let swept: Vec<_> = g.iter().map(|p| p.swept.clone()).collect();
        assert_eq!(
            swept,
            vec![
                vec![0.0, 0.0],
                vec![0.0, 0.5],
                vec![0.0, 1.0],
                vec![0.1, 0.0],
                vec![0.1, 0.5],
                vec![0.1, 1.0]
            ]
        );
        let fixed = vec!["R=0.5".parse().unwrap()];
        assert!(grid(&sweeps, &fixed).is_err());
    }
}
