//! Experiment configuration: a flat `key = value` text file or an equivalent
//! JSON object.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use sosbm::stats::{NormalizingSequence, TestFunction};
use sosbm::SosBmParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    SkewSticky,
    Oscillating,
}

#[derive(Clone)]
pub struct ExperimentConfig {
    pub process: ProcessKind,
    pub params: SosBmParams,
    pub x0: f64,
    pub horizon: f64,
    pub n_ladder: Vec<u64>,
    pub u: NormalizingSequence,
    pub g: TestFunction,
    pub paths: u64,
    pub seed: u64,
    pub out: PathBuf,
}

impl fmt::Debug for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ExperimentConfig(process={:?}, rho={}, beta={}, sigma=({},{}), x0={}, t={}, ladder={:?}, u={}, g={}, paths={}, seed={})",
            self.process,
            self.params.rho(),
            self.params.beta(),
            self.params.sigma_minus(),
            self.params.sigma_plus(),
            self.x0,
            self.horizon,
            self.n_ladder,
            self.u.name(),
            self.g.name(),
            self.paths,
            self.seed
        )
    }
}

fn parse_pairs_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {} is not 'key = value': '{line}'", idx + 1))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_pairs_json(text: &str) -> Result<Vec<(String, String)>> {
    let value: serde_json::Value = serde_json::from_str(text).context("invalid JSON config")?;
    let obj = value.as_object().ok_or_else(|| anyhow!("JSON config must be an object"))?;
    let mut pairs = Vec::new();
    for (k, v) in obj {
        let s = match v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Array(items) => items
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
            other => other.to_string(),
        };
        pairs.push((k.clone(), s));
    }
    Ok(pairs)
}

pub fn parse_u_family(s: &str) -> Result<NormalizingSequence> {
    match s {
        "sqrt" => Ok(NormalizingSequence::sqrt()),
        "log" => Ok(NormalizingSequence::Log),
        other => {
            if let Some(alpha) = other.strip_prefix("pow:") {
                let alpha: f64 = alpha.parse().with_context(|| format!("bad exponent in '{other}'"))?;
                let seq = NormalizingSequence::Power(alpha);
                seq.validate().map_err(|e| anyhow!("field 'u': {e}"))?;
                Ok(seq)
            } else {
                bail!("field 'u': unknown family '{other}' (expected sqrt, log or pow:ALPHA)")
            }
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let pairs = if path.extension().map(|e| e == "json").unwrap_or(false)
            || text.trim_start().starts_with('{')
        {
            parse_pairs_json(&text)?
        } else {
            parse_pairs_text(&text)?
        };
        Self::from_pairs(&pairs)
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let get = |key: &str| -> Option<&str> {
            pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
        };
        let get_f64 = |key: &str, default: f64| -> Result<f64> {
            match get(key) {
                None => Ok(default),
                Some(v) => v.parse().with_context(|| format!("field '{key}': not a number: '{v}'")),
            }
        };

        let process = match get("process").unwrap_or("sks") {
            "sks" => ProcessKind::SkewSticky,
            "sos" => ProcessKind::Oscillating,
            other => bail!("field 'process': expected 'sks' or 'sos', got '{other}'"),
        };
        let rho = get_f64("rho", 0.0)?;
        let beta = get_f64("beta", 0.0)?;
        let (sm, sp) = match process {
            ProcessKind::SkewSticky => {
                if get("sigma_minus").is_some() || get("sigma_plus").is_some() {
                    bail!("fields 'sigma_minus'/'sigma_plus' require process = sos");
                }
                (1.0, 1.0)
            }
            ProcessKind::Oscillating => (get_f64("sigma_minus", 1.0)?, get_f64("sigma_plus", 1.0)?),
        };
        let params = SosBmParams::new(rho, beta, sm, sp)
            .map_err(|e| anyhow!("invalid process parameters: {e}"))?;

        let x0 = get_f64("x0", 0.0)?;
        let horizon = get_f64("t", 1.0)?;
        if horizon.is_nan() || horizon <= 0.0 {
            bail!("field 't': horizon must be positive, got {horizon}");
        }

        let ladder_text = get("n_ladder").unwrap_or("1000,10000,100000");
        let mut n_ladder = Vec::new();
        for item in ladder_text.split(',') {
            let n: u64 = item
                .trim()
                .parse()
                .with_context(|| format!("field 'n_ladder': bad entry '{}'", item.trim()))?;
            n_ladder.push(n);
        }
        if n_ladder.is_empty() || !n_ladder.windows(2).all(|w| w[0] < w[1]) {
            bail!("field 'n_ladder': must be a strictly increasing list, got {n_ladder:?}");
        }

        let u = parse_u_family(get("u").unwrap_or("sqrt"))?;
        let g_name = get("g").unwrap_or("hat");
        let g = TestFunction::by_name(g_name)
            .ok_or_else(|| anyhow!("field 'g': unknown test function '{g_name}'"))?;

        let paths: u64 = get("paths")
            .unwrap_or("200")
            .parse()
            .context("field 'paths': not an integer")?;
        if paths < 1 {
            bail!("field 'paths': must be at least 1");
        }
        let seed: u64 = get("seed").unwrap_or("0").parse().context("field 'seed': not an integer")?;
        let out = PathBuf::from(get("out").unwrap_or("out"));

        Ok(Self { process, params, x0, horizon, n_ladder, u, g, paths, seed, out })
    }

    /// Limit constant `m_0(g)` used by the convergence tables.
    pub fn limit_constant(&self) -> f64 {
        self.g.speed_measure_limit(&self.params)
    }
}

/// Make a TestFunction argument for estimate-like commands.
pub fn parse_test_function(name: &str) -> Result<TestFunction> {
    TestFunction::by_name(name).ok_or_else(|| anyhow!("unknown test function '{name}'"))
}

#[allow(dead_code)]
pub fn arc_custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
    Arc::new(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_text() {
        let pairs = parse_pairs_text(
            "# comment\nprocess = sks\nrho = 1.0\nbeta=0.5\nn_ladder = 100, 1000\npaths = 8\nseed = 7\n",
        )
        .unwrap();
        let cfg = ExperimentConfig::from_pairs(&pairs).unwrap();
        assert_eq!(cfg.params.rho(), 1.0);
        assert_eq!(cfg.params.beta(), 0.5);
        assert_eq!(cfg.n_ladder, vec![100, 1000]);
        assert_eq!(cfg.paths, 8);
    }

    #[test]
    fn parses_json() {
        let pairs = parse_pairs_json(
            r#"{"process":"sos","rho":1,"beta":0.3,"sigma_minus":1,"sigma_plus":2,"n_ladder":[100,200]}"#,
        )
        .unwrap();
        let cfg = ExperimentConfig::from_pairs(&pairs).unwrap();
        assert_eq!(cfg.process, ProcessKind::Oscillating);
        assert_eq!(cfg.params.sigma_plus(), 2.0);
        assert_eq!(cfg.n_ladder, vec![100, 200]);
    }

    #[test]
    fn field_level_errors() {
        let bad = [
            ("rho = -1", "invalid process parameters"),
            ("n_ladder = 100,100", "n_ladder"),
            ("u = pow:1.5", "u"),
            ("g = nope", "g"),
            ("paths = 0", "paths"),
            ("process = sks\nsigma_plus = 2", "sigma"),
        ];
        for (text, needle) in bad {
            let pairs = parse_pairs_text(text).unwrap();
            let err = ExperimentConfig::from_pairs(&pairs).unwrap_err().to_string();
            assert!(err.contains(needle), "'{text}' -> '{err}'");
        }
    }
}
