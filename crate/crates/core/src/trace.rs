//! Realized minimizer sequences and their CSV form.

use serde::{Deserialize, Serialize};

use crate::environments::TraceSpec;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// How a trace was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: TraceSpec,
    pub replication: u64,
}

/// Minimizers `v_1..v_T` and the start point `x₀` (which doubles as `v₀`).
#[derive(Clone, Debug, PartialEq)]
pub struct MinimizerTrace<T> {
    x0: Vec<T>,
    v: Vec<Vec<T>>,
    provenance: Option<Provenance>,
}

impl<T: Real> MinimizerTrace<T> {
    pub fn new(x0: Vec<T>, v: Vec<Vec<T>>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyInput("trace has no rounds"));
        }
        let d = x0.len();
        if let Some(bad) = v.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        if x0.iter().chain(v.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("trace contains non-finite values".into()));
        }
        Ok(Self {
            x0,
            v,
            provenance: None,
        })
    }

    /// Trace starting at the origin.
    pub fn from_minimizers(v: Vec<Vec<T>>) -> Result<Self> {
        let d = v.first().map_or(0, Vec::len);
        Self::new(vec![T::zero(); d], v)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn horizon(&self) -> usize {
        self.v.len()
    }

    pub fn x0(&self) -> &[T] {
        &self.x0
    }

    pub fn minimizers(&self) -> &[Vec<T>] {
        &self.v
    }

    /// `v_t` for 1-based `t`; `v_0` is `x₀`.
    pub fn v(&self, t: usize) -> &[T] {
        if t == 0 {
            &self.x0
        } else {
            &self.v[t - 1]
        }
    }

    /// `v_t - v_{t-1}` for 1-based `t`.
    pub fn increment(&self, t: usize) -> Vec<T> {
        self.v(t).iter().zip(self.v(t - 1)).map(|(&a, &b)| a - b).collect()
    }

    /// The first `horizon` rounds.
    pub fn truncated(&self, horizon: usize) -> Result<Self> {
        if horizon == 0 || horizon > self.horizon() {
            return Err(Error::HorizonMismatch {
                expected: self.horizon(),
                got: horizon,
            });
        }
        Ok(Self {
            x0: self.x0.clone(),
            v: self.v[..horizon].to_vec(),
            provenance: self.provenance.clone(),
        })
    }

    /// Long-format CSV `t,coord,value`. Rows with `t = 0` hold `x₀`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,coord,value\n");
        for t in 0..=self.horizon() {
            for (i, x) in self.v(t).iter().enumerate() {
                out.push_str(&format!("{t},{i},{}\n", to_f64(*x)));
            }
        }
        out
    }

    /// Parses [`to_csv`](Self::to_csv) output. Rows may come in any order;
    /// missing `t = 0` rows mean `x₀ = 0`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut cells: Vec<(usize, usize, f64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('t')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match fields.as_slice() {
                [t, i, x] => t
                    .parse::<usize>()
                    .ok()
                    .zip(i.parse::<usize>().ok())
                    .zip(x.parse::<f64>().ok())
                    .map(|((t, i), x)| (t, i, x)),
                _ => None,
            };
            let cell = parsed.ok_or_else(|| {
                Error::InvalidParameter(format!("trace csv line {}: expected t,coord,value", lineno + 1))
            })?;
            cells.push(cell);
        }
        let horizon = cells.iter().map(|c| c.0).max().ok_or(Error::EmptyInput("trace csv"))?;
        let dim = cells.iter().map(|c| c.1).max().map_or(0, |m| m + 1);
        let mut grid = vec![vec![None; dim]; horizon + 1];
        for (t, i, x) in cells {
            if grid[t][i].replace(x).is_some() {
                return Err(Error::InvalidParameter(format!("trace csv: duplicate cell t={t} coord={i}")));
            }
        }
        let has_x0 = grid[0].iter().any(Option::is_some);
        let mut rows = Vec::with_capacity(horizon + 1);
        for (t, row) in grid.into_iter().enumerate() {
            if t == 0 && !has_x0 {
                rows.push(vec![T::zero(); dim]);
                continue;
            }
            let row = row
                .into_iter()
                .enumerate()
                .map(|(i, x)| {
                    x.map(lit::<T>)
                        .ok_or_else(|| Error::InvalidParameter(format!("trace csv: missing cell t={t} coord={i}")))
                })
                .collect::<Result<Vec<T>>>()?;
            rows.push(row);
        }
        let x0 = rows.remove(0);
        Self::new(x0, rows)
    }
}
