//! Plain-text key-value run configuration.
//!
//! Format: one `key = value` per line, `#` starts a comment.  Unknown keys
//! and out-of-range values are rejected with their line number.

use crate::error::{Error, Result};

pub const DEFAULT_MC_SEED: u64 = 0x5eeb;

/// Validated run configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Complex transverse dimension (1..=3).
    pub n: usize,
    /// Quadrature rule family; only "gauss" is implemented.
    pub quad_rule: String,
    /// Gauss nodes per simplex axis; 0 means the per-dimension default.
    pub quad_points: usize,
    pub quad_mc_samples: u64,
    pub quad_mc_seed: u64,
    pub flow_dt0: f64,
    pub flow_grad_tol: f64,
    pub flow_t_max: f64,
    pub flow_boundary_guard: f64,
    pub out_dir: String,
    /// 0 = quiet, 1 = normal, 2 = chatty (stderr).
    pub verbosity: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            quad_rule: "gauss".to_string(),
            quad_points: 0,
            quad_mc_samples: 1_000_000,
            quad_mc_seed: DEFAULT_MC_SEED,
            flow_dt0: 0.01,
            flow_grad_tol: 1e-8,
            flow_t_max: 1e3,
            flow_boundary_guard: 1e-6,
            out_dir: "out".to_string(),
            verbosity: 1,
        }
    }
}

impl RunConfig {
    /// Build the quadrature link this configuration describes.
    pub fn link(&self) -> crate::quad::WeightedSphereLink {
        let mut link = if self.quad_points == 0 {
            crate::quad::WeightedSphereLink::new(self.n)
        } else {
            crate::quad::WeightedSphereLink::with_rule(self.n, self.quad_points)
        };
        link.set_mc_seed(self.quad_mc_seed);
        link.set_mc_samples(self.quad_mc_samples);
        link
    }

    pub fn flow_options(&self) -> crate::flow::FlowOptions {
        crate::flow::FlowOptions {
            dt0: self.flow_dt0,
            grad_tol: self.flow_grad_tol,
            t_max: self.flow_t_max,
            boundary_guard: self.flow_boundary_guard,
            attach_mu: self.n == 1,
        }
    }

    /// Render in the same key-value format `parse_config` reads.
    pub fn serialize(&self) -> String {
        format!(
            "n = {}\n\
             quad.rule = {}\n\
             quad.points = {}\n\
             quad.mc_samples = {}\n\
             quad.mc_seed = {}\n\
             flow.dt0 = {}\n\
             flow.grad_tol = {}\n\
             flow.t_max = {}\n\
             flow.boundary_guard = {}\n\
             out.dir = {}\n\
             verbosity = {}\n",
            self.n,
            self.quad_rule,
            self.quad_points,
            self.quad_mc_samples,
            self.quad_mc_seed,
            self.flow_dt0,
            self.flow_grad_tol,
            self.flow_t_max,
            self.flow_boundary_guard,
            self.out_dir,
            self.verbosity,
        )
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| bad(line, format!("key `{key}`: malformed number `{value}`")))
}

fn check_range<T: PartialOrd + std::fmt::Display>(
    line: usize,
    key: &str,
    value: T,
    lo: T,
    hi: T,
) -> Result<T> {
    if value < lo || value > hi {
        return Err(bad(
            line,
            format!("key `{key}`: value {value} outside [{lo}, {hi}]"),
        ));
    }
    Ok(value)
}

/// Parse configuration text into a validated [`RunConfig`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(bad(
                line,
                format!("expected `key = value`, got `{content}`"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "n" => cfg.n = check_range(line, key, parse_num(line, key, value)?, 1usize, 3)?,
            "quad.rule" => {
                if value != "gauss" {
                    return Err(bad(
                        line,
                        format!("key `quad.rule`: unknown rule `{value}`"),
                    ));
                }
                cfg.quad_rule = value.to_string();
            }
            "quad.points" => {
                let v: usize = parse_num(line, key, value)?;
                if v != 0 {
                    check_range(line, key, v, 4usize, 4096)?;
                }
                cfg.quad_points = v;
            }
            "quad.mc_samples" => {
                cfg.quad_mc_samples = check_range(
                    line,
                    key,
                    parse_num(line, key, value)?,
                    1_000u64,
                    1_000_000_000,
                )?
            }
            "quad.mc_seed" => cfg.quad_mc_seed = parse_num(line, key, value)?,
            "flow.dt0" => {
                let v: f64 = parse_num(line, key, value)?;
                if !(v > 0.0 && v <= 10.0) {
                    return Err(bad(
                        line,
                        format!("key `flow.dt0`: value {v} outside (0, 10]"),
                    ));
                }
                cfg.flow_dt0 = v;
            }
            "flow.grad_tol" => {
                let v: f64 = parse_num(line, key, value)?;
                if !(v > 0.0 && v <= 1e-2) {
                    return Err(bad(
                        line,
                        format!("key `flow.grad_tol`: value {v} outside (0, 1e-2]"),
                    ));
                }
                cfg.flow_grad_tol = v;
            }
            "flow.t_max" => {
                let v: f64 = parse_num(line, key, value)?;
                if !(v > 0.0 && v <= 1e6) {
                    return Err(bad(
                        line,
                        format!("key `flow.t_max`: value {v} outside (0, 1e6]"),
                    ));
                }
                cfg.flow_t_max = v;
            }
            "flow.boundary_guard" => {
                let v: f64 = parse_num(line, key, value)?;
                if !(v > 0.0 && v <= 1e-2) {
                    return Err(bad(
                        line,
                        format!("key `flow.boundary_guard`: value {v} outside (0, 1e-2]"),
                    ));
                }
                cfg.flow_boundary_guard = v;
            }
            "out.dir" => cfg.out_dir = value.to_string(),
            "verbosity" => {
                cfg.verbosity = check_range(line, key, parse_num(line, key, value)?, 0u32, 2)?
            }
            other => return Err(bad(line, format!("unknown key `{other}`"))),
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.n, 1);
        assert_eq!(cfg.flow_dt0, 0.01);
        assert_eq!(cfg.flow_grad_tol, 1e-8);
    }

    #[test]
    fn seed_key_is_honored() {
        let cfg = parse_config("quad.mc_seed = 42\n").unwrap();
        assert_eq!(cfg.quad_mc_seed, 42);
    }

    #[test]
    fn range_errors_name_the_key_and_line() {
        let err = parse_config("# comment\nflow.dt0 = -1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("flow.dt0"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config("quod.points = 12\n").unwrap_err();
        assert!(err.to_string().contains("unknown key `quod.points`"));
    }

    #[test]
    fn malformed_numbers_are_rejected() {
        let err = parse_config("quad.points = twelve\n").unwrap_err();
        assert!(err.to_string().contains("malformed number"));
    }

    #[test]
    fn round_trips_through_serialization() {
        let cfg = parse_config("n = 2\nquad.mc_seed = 7\nflow.dt0 = 0.02\n").unwrap();
        let again = parse_config(&cfg.serialize()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = parse_config("\n# full line comment\nn = 2 # trailing\n\n").unwrap();
        assert_eq!(cfg.n, 2);
    }
}
