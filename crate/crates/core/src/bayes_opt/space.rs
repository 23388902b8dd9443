use serde_json::{Map, Value};
use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("search space has no dimensions")]
    Empty,
    #[error("dimension {0:?}: bounds must satisfy lo < hi and be finite")]
    Bounds(String),
    #[error("dimension {0:?}: log scale needs lo > 0")]
    LogBound(String),
    #[error("dimension {0:?}: no choices")]
    NoChoices(String),
    #[error("duplicate dimension name {0:?}")]
    Duplicate(String),
    #[error("configuration does not fit the space: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dimension {
    Continuous {
        name: String,
        lo: f64,
        hi: f64,
        scale: Scale,
    },
    Categorical {
        name: String,
        choices: Vec<String>,
    },
}

impl Dimension {
    pub fn linear(name: &str, lo: f64, hi: f64) -> Self {
        Self::Continuous {
            name: name.into(),
            lo,
            hi,
            scale: Scale::Linear,
        }
    }

    pub fn log(name: &str, lo: f64, hi: f64) -> Self {
        Self::Continuous {
            name: name.into(),
            lo,
            hi,
            scale: Scale::Log,
        }
    }

    pub fn categorical(name: &str, choices: &[&str]) -> Self {
        Self::Categorical {
            name: name.into(),
            choices: choices.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Continuous { name, .. } | Self::Categorical { name, .. } => name,
        }
    }

    fn encoded_width(&self) -> usize {
        match self {
            Self::Continuous { .. } => 1,
            Self::Categorical { choices, .. } => choices.len(),
        }
    }

    /// Maps a unit-interval coordinate to a value.
    fn at_unit(&self, u: f64) -> ParamValue {
        match self {
            Self::Continuous { lo, hi, scale, .. } => {
                let u = u.clamp(0.0, 1.0);
                let v = match scale {
                    Scale::Linear => lo + u * (hi - lo),
                    Scale::Log => (lo.ln() + u * (hi.ln() - lo.ln())).exp(),
                };
                ParamValue::Real(v.clamp(*lo, *hi))
            }
            Self::Categorical { choices, .. } => {
                ParamValue::Choice(((u * choices.len() as f64) as usize).min(choices.len() - 1))
            }
        }
    }

    fn to_unit(&self, v: f64) -> f64 {
        match self {
            Self::Continuous { lo, hi, scale, .. } => match scale {
                Scale::Linear => (v - lo) / (hi - lo),
                Scale::Log => (v.ln() - lo.ln()) / (hi.ln() - lo.ln()),
            },
            Self::Categorical { .. } => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Choice(usize),
}

pub type Config = Vec<ParamValue>;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self, SpaceError> {
        if dims.is_empty() {
            return Err(SpaceError::Empty);
        }
        for (i, d) in dims.iter().enumerate() {
            if dims[..i].iter().any(|e| e.name() == d.name()) {
                return Err(SpaceError::Duplicate(d.name().into()));
            }
            match d {
                Dimension::Continuous { name, lo, hi, scale } => {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(SpaceError::Bounds(name.clone()));
                    }
                    if *scale == Scale::Log && *lo <= 0.0 {
                        return Err(SpaceError::LogBound(name.clone()));
                    }
                }
                Dimension::Categorical { name, choices } => {
                    if choices.is_empty() {
                        return Err(SpaceError::NoChoices(name.clone()));
                    }
                }
            }
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name() == name)
    }

    pub fn check(&self, config: &Config) -> Result<(), SpaceError> {
        if config.len() != self.dims.len() {
            return Err(SpaceError::BadConfig(format!(
                "{} values for {} dimensions",
                config.len(),
                self.dims.len()
            )));
        }
        for (d, v) in self.dims.iter().zip(config) {
            let ok = match (d, v) {
                (Dimension::Continuous { lo, hi, .. }, ParamValue::Real(x)) => x >= lo && x <= hi,
                (Dimension::Categorical { choices, .. }, ParamValue::Choice(c)) => *c < choices.len(),
                _ => false,
            };
            if !ok {
                return Err(SpaceError::BadConfig(format!("{} = {v:?}", d.name())));
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> Config {
        self.dims.iter().map(|d| d.at_unit(rng.next_f64())).collect()
    }

    /// Latin hypercube over every dimension: each of the `n` strata of each
    /// coordinate is hit once.
    pub fn latin_hypercube(&self, n: usize, rng: &mut SplitMix64) -> Vec<Config> {
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(self.dims.len());
        for _ in &self.dims {
            let mut strata: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut strata);
            columns.push(
                strata
                    .into_iter()
                    .map(|s| (s as f64 + rng.next_f64()) / n as f64)
                    .collect(),
            );
        }
        (0..n)
            .map(|i| self.dims.iter().zip(&columns).map(|(d, c)| d.at_unit(c[i])).collect())
            .collect()
    }

    /// Perturbs continuous coordinates by a Gaussian step of `scale` in unit
    /// space and resamples each categorical with probability `scale`.
    pub fn perturb(&self, config: &Config, scale: f64, rng: &mut SplitMix64) -> Config {
        self.dims
            .iter()
            .zip(config)
            .map(|(d, v)| match (d, v) {
                (Dimension::Continuous { .. }, ParamValue::Real(x)) => {
                    d.at_unit(d.to_unit(*x) + scale * rng.next_normal())
                }
                (Dimension::Categorical { .. }, _) if rng.next_f64() < scale => d.at_unit(rng.next_f64()),
                _ => *v,
            })
            .collect()
    }

    /// Surrogate coordinates: continuous dimensions in `[0, 1]` (log dims in
    /// log space), categoricals one-hot.
    pub fn encode(&self, config: &Config) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.encoded_dim());
        for (d, v) in self.dims.iter().zip(config) {
            match (d, v) {
                (Dimension::Continuous { .. }, ParamValue::Real(x)) => out.push(d.to_unit(*x)),
                (Dimension::Categorical { choices, .. }, ParamValue::Choice(c)) => {
                    out.extend((0..choices.len()).map(|j| if j == *c { 1.0 } else { 0.0 }))
                }
                _ => panic!("configuration does not match the space"),
            }
        }
        out
    }

    pub fn encoded_dim(&self) -> usize {
        self.dims.iter().map(Dimension::encoded_width).sum()
    }

    pub fn to_json(&self, config: &Config) -> Value {
        let mut map = Map::new();
        for (d, v) in self.dims.iter().zip(config) {
            let value = match (d, v) {
                (Dimension::Categorical { choices, .. }, ParamValue::Choice(c)) => Value::from(choices[*c].clone()),
                (_, ParamValue::Real(x)) => Value::from(*x),
                (_, ParamValue::Choice(c)) => Value::from(*c),
            };
            map.insert(d.name().to_string(), value);
        }
        Value::Object(map)
    }

    pub fn real(&self, config: &Config, name: &str) -> Option<f64> {
        match config.get(self.index_of(name)?)? {
            ParamValue::Real(x) => Some(*x),
            ParamValue::Choice(_) => None,
        }
    }

    pub fn choice<'a>(&'a self, config: &Config, name: &str) -> Option<&'a str> {
        let i = self.index_of(name)?;
        match (&self.dims[i], config.get(i)?) {
            (Dimension::Categorical { choices, .. }, ParamValue::Choice(c)) => choices.get(*c).map(String::as_str),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> SearchSpace {
        SearchSpace::new(vec![
            Dimension::linear("x", -1.0, 1.0),
            Dimension::log("c", 1e-3, 1e3),
            Dimension::categorical("k", &["a", "b", "c"]),
        ])
        .unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(SearchSpace::new(vec![]), Err(SpaceError::Empty));
        assert!(matches!(
            SearchSpace::new(vec![Dimension::linear("x", 1.0, 1.0)]),
            Err(SpaceError::Bounds(_))
        ));
        assert!(matches!(
            SearchSpace::new(vec![Dimension::log("x", 0.0, 1.0)]),
            Err(SpaceError::LogBound(_))
        ));
        assert!(matches!(
            SearchSpace::new(vec![Dimension::categorical("k", &[])]),
            Err(SpaceError::NoChoices(_))
        ));
        assert!(matches!(
            SearchSpace::new(vec![Dimension::linear("x", 0.0, 1.0), Dimension::linear("x", 0.0, 2.0)]),
            Err(SpaceError::Duplicate(_))
        ));
    }

    #[test]
    fn encoding() {
        let s = space();
        let cfg = vec![ParamValue::Real(0.0), ParamValue::Real(1.0), ParamValue::Choice(2)];
        let e = s.encode(&cfg);
        assert_eq!(e.len(), 5);
        assert!((e[0] - 0.5).abs() < 1e-15 && (e[1] - 0.5).abs() < 1e-12);
        assert_eq!(&e[2..], [0.0, 0.0, 1.0]);
        assert_eq!(s.to_json(&cfg).to_string(), r#"{"c":1.0,"k":"c","x":0.0}"#);
        assert_eq!(s.choice(&cfg, "k"), Some("c"));
        assert_eq!(s.real(&cfg, "c"), Some(1.0));
    }

    #[test]
    fn lhs_stratifies() {
        let s = space();
        let mut rng = SplitMix64::new(3);
        let pts = s.latin_hypercube(10, &mut rng);
        let mut strata: Vec<usize> = pts
            .iter()
            .map(|p| match p[0] {
                ParamValue::Real(x) => (((x + 1.0) / 2.0) * 10.0) as usize,
                _ => unreachable!(),
            })
            .collect();
        strata.sort_unstable();
        assert_eq!(strata, (0..10).collect::<Vec<_>>());
        for p in &pts {
            s.check(p).unwrap();
        }
    }

    #[test]
    fn samples_stay_in_bounds() {
        let s = space();
        let mut rng = SplitMix64::new(9);
        for _ in 0..500 {
            let c = s.sample(&mut rng);
            s.check(&c).unwrap();
            s.check(&s.perturb(&c, 0.3, &mut rng)).unwrap();
        }
    }
}
