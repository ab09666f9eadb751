//! Sampled paths on the uniform grid and their CSV form.

use std::io::{self, BufRead, Write};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::SosBmParams;

/// Reproducibility token: one independent ChaCha stream per path. The same
/// `(seed, stream)` always produces the bit-identical path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Equally spaced observations `X_{i/n}`, `i = 0..[nt]`, with the metadata
/// needed to reproduce and post-process them. Exact zeros mark the sticky
/// state and are tested by exact equality downstream.
#[derive(Debug, Clone)]
pub struct SamplePath {
    params: SosBmParams,
    n: u64,
    horizon: f64,
    start: f64,
    stream: RngStream,
    values: Vec<f64>,
}

impl SamplePath {
    pub(crate) fn from_parts(
        params: SosBmParams,
        n: u64,
        horizon: f64,
        start: f64,
        stream: RngStream,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(values.len() as u64, (n as f64 * horizon).floor() as u64 + 1);
        Self { params, n, horizon, start, stream, values }
    }

    /// Builds a path from externally produced observations (e.g. a pointwise
    /// transform of another path). The length must be `[n t] + 1` and
    /// `values[0]` must equal `start`.
    pub fn from_values(
        params: SosBmParams,
        n: u64,
        horizon: f64,
        start: f64,
        stream: RngStream,
        values: Vec<f64>,
    ) -> Result<Self> {
        let expect = (n as f64 * horizon).floor() as usize + 1;
        if values.len() != expect {
            return Err(Error::InvalidParameter(format!(
                "expected {expect} observations for n={n}, t={horizon}, got {}",
                values.len()
            )));
        }
        if values[0] != start {
            return Err(Error::InvalidParameter("values[0] must equal the start point".into()));
        }
        Ok(Self { params, n, horizon, start, stream, values })
    }

    pub fn params(&self) -> &SosBmParams {
        &self.params
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stream(&self) -> RngStream {
        self.stream
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of grid steps `[nt]`.
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Writes the path as CSV: `# key=value` metadata comments, an `i,t,x`
    /// header, then one row per observation with round-trip float precision.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# rho={}", self.params.rho())?;
        writeln!(w, "# beta={}", self.params.beta())?;
        writeln!(w, "# sigma_minus={}", self.params.sigma_minus())?;
        writeln!(w, "# sigma_plus={}", self.params.sigma_plus())?;
        writeln!(w, "# n={}", self.n)?;
        writeln!(w, "# t={}", self.horizon)?;
        writeln!(w, "# x0={}", self.start)?;
        writeln!(w, "# seed={}", self.stream.seed)?;
        writeln!(w, "# stream={}", self.stream.stream)?;
        writeln!(w, "i,t,x")?;
        for (i, x) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{}", i, i as f64 / self.n as f64, x)?;
        }
        Ok(())
    }

    /// Parses a path written by `write_csv`. Schema violations report the
    /// 1-based line number.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut meta: Vec<(String, String)> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut saw_header = false;

        for (idx, line) in r.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::PathCsvSchema { line: lineno, message: e.to_string() })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if !saw_header {
                if trimmed != "i,t,x" {
                    return Err(Error::PathCsvSchema {
                        line: lineno,
                        message: format!("expected header 'i,t,x', found '{trimmed}'"),
                    });
                }
                saw_header = true;
                continue;
            }
            let mut cols = trimmed.split(',');
            let (i_s, _t_s, x_s) = match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => {
                    return Err(Error::PathCsvSchema {
                        line: lineno,
                        message: "expected three comma-separated columns".into(),
                    })
                }
            };
            let i: usize = i_s.parse().map_err(|_| Error::PathCsvSchema {
                line: lineno,
                message: format!("non-integer index '{i_s}'"),
            })?;
            if i != values.len() {
                return Err(Error::PathCsvSchema {
                    line: lineno,
                    message: format!("index {i} out of order, expected {}", values.len()),
                });
            }
            let x: f64 = x_s.parse().map_err(|_| Error::PathCsvSchema {
                line: lineno,
                message: format!("non-numeric cell '{x_s}'"),
            })?;
            values.push(x);
        }

        let get = |key: &str| -> Option<f64> {
            meta.iter().rev().find(|(k, _)| k == key).and_then(|(_, v)| v.parse().ok())
        };
        if values.is_empty() {
            return Err(Error::PathCsvSchema { line: 1, message: "no observation rows".into() });
        }
        let n = get("n").unwrap_or((values.len() - 1) as f64);
        let params = SosBmParams::new(
            get("rho").unwrap_or(0.0),
            get("beta").unwrap_or(0.0),
            get("sigma_minus").unwrap_or(1.0),
            get("sigma_plus").unwrap_or(1.0),
        )?;
        let n = n as u64;
        let horizon = get("t").unwrap_or((values.len() - 1) as f64 / n as f64);
        let start = values[0];
        let stream = RngStream::new(get("seed").unwrap_or(0.0) as u64, get("stream").unwrap_or(0.0) as u64);
        Ok(Self { params, n, horizon, start, stream, values })
    }
}
