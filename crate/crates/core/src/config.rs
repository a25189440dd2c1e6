//! Flat `key = value` run configuration.
//!
//! Floats are written with the shortest representation that reparses to the
//! same bits, so `parse_config(&cfg.serialize())` returns an equal config.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::{Point, ProblemParams, MIN_NODES};
use crate::solver::SolveConfig;

const KEYS: [&str; 12] = ["a", "q", "b1", "b2", "A", "nx", "L", "tol_residual", "tol_pohozaev", "seed_x0", "q_schedule", "seed"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Interaction strength; `None` resolves to `a*/2` once `a*` is known.
    pub a: Option<f64>,
    pub q: f64,
    pub b1: f64,
    pub b2: f64,
    /// Ring radius `A`.
    pub ring: f64,
    /// Interior nodes per axis of the solve window.
    pub nx: usize,
    /// Window half-width in units of the blow-up scale `1/tau`.
    pub l: f64,
    pub tol_residual: f64,
    pub tol_pohozaev: f64,
    /// Seed concentration point; `None` uses `(b1 A, 0)`.
    pub seed_x0: Option<Point>,
    /// Exponents for `sweep`, strictly decreasing.
    pub q_schedule: Vec<f64>,
    /// Seed for randomized property checks.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            a: None,
            q: 2.2,
            b1: 1.2,
            b2: 1.0,
            ring: 1.0,
            nx: 255,
            l: 11.0,
            tol_residual: 1e-8,
            tol_pohozaev: 1e-4,
            seed_x0: None,
            q_schedule: vec![2.2, 2.1, 2.05],
            seed: 7,
        }
    }
}

fn parse_f64(line: usize, key: &str, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("`{key}` expects a number, got `{s}`") })
}

fn parse_list(line: usize, key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|p| parse_f64(line, key, p.trim())).collect()
}

fn range(key: &str, msg: impl Into<String>) -> Error {
    Error::Range { key: key.into(), msg: msg.into() }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Parse { line, msg: format!("expected `key = value`, got `{body}`") })?;
        if !KEYS.contains(&key) {
            return Err(Error::Parse { line, msg: format!("unknown key `{key}`") });
        }
        if seen.contains(&key) {
            return Err(Error::Parse { line, msg: format!("duplicate key `{key}`") });
        }
        seen.push(key);
        match key {
            "a" => cfg.a = Some(parse_f64(line, key, value)?),
            "q" => cfg.q = parse_f64(line, key, value)?,
            "b1" => cfg.b1 = parse_f64(line, key, value)?,
            "b2" => cfg.b2 = parse_f64(line, key, value)?,
            "A" => cfg.ring = parse_f64(line, key, value)?,
            "nx" => {
                cfg.nx = value.parse().map_err(|_| Error::Parse { line, msg: format!("`nx` expects an integer, got `{value}`") })?
            }
            "L" => cfg.l = parse_f64(line, key, value)?,
            "tol_residual" => cfg.tol_residual = parse_f64(line, key, value)?,
            "tol_pohozaev" => cfg.tol_pohozaev = parse_f64(line, key, value)?,
            "seed_x0" => {
                let v = parse_list(line, key, value)?;
                if v.len() != 2 {
                    return Err(Error::Parse { line, msg: format!("`seed_x0` expects `x, y`, got `{value}`") });
                }
                cfg.seed_x0 = Some([v[0], v[1]]);
            }
            "q_schedule" => cfg.q_schedule = parse_list(line, key, value)?,
            "seed" => {
                cfg.seed = value.parse().map_err(|_| Error::Parse { line, msg: format!("`seed` expects an integer, got `{value}`") })?
            }
            _ => unreachable!(),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// Range checks that do not need the soliton constants.
    pub fn validate(&self) -> Result<()> {
        ProblemParams::new(self.a.unwrap_or(1.0), self.q, self.b1, self.b2, self.ring)?;
        if self.nx < MIN_NODES {
            return Err(range("nx", format!("need at least {MIN_NODES} nodes, got {}", self.nx)));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(range("L", format!("window half-width must be positive, got {}", self.l)));
        }
        if !(self.tol_residual > 0.0) {
            return Err(range("tol_residual", "must be positive"));
        }
        if !(self.tol_pohozaev > 0.0) {
            return Err(range("tol_pohozaev", "must be positive"));
        }
        if let Some(p) = self.seed_x0 {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(range("seed_x0", "must be finite"));
            }
        }
        if self.q_schedule.is_empty() {
            return Err(range("q_schedule", "must not be empty"));
        }
        if let Some(q) = self.q_schedule.iter().find(|q| !(**q > 2.0 && **q <= 4.0)) {
            return Err(range("q_schedule", format!("exponents must lie in (2, 4], got {q}")));
        }
        if self.q_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(range("q_schedule", "exponents must be strictly decreasing"));
        }
        Ok(())
    }

    /// Writes every key, so the output documents the defaults in effect.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        if let Some(a) = self.a {
            writeln!(s, "a = {a:?}").unwrap();
        }
        writeln!(s, "q = {:?}", self.q).unwrap();
        writeln!(s, "b1 = {:?}", self.b1).unwrap();
        writeln!(s, "b2 = {:?}", self.b2).unwrap();
        writeln!(s, "A = {:?}", self.ring).unwrap();
        writeln!(s, "nx = {}", self.nx).unwrap();
        writeln!(s, "L = {:?}", self.l).unwrap();
        writeln!(s, "tol_residual = {:?}", self.tol_residual).unwrap();
        writeln!(s, "tol_pohozaev = {:?}", self.tol_pohozaev).unwrap();
        if let Some(p) = self.seed_x0 {
            writeln!(s, "seed_x0 = {:?}, {:?}", p[0], p[1]).unwrap();
        }
        let sched: Vec<String> = self.q_schedule.iter().map(|q| format!("{q:?}")).collect();
        writeln!(s, "q_schedule = {}", sched.join(", ")).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        s
    }

    /// Problem parameters at exponent `q`, with `a` defaulting to `a*/2`.
    pub fn params_at(&self, q: f64, a_star: f64) -> Result<ProblemParams> {
        let p = ProblemParams::new(self.a.unwrap_or(0.5 * a_star), q, self.b1, self.b2, self.ring)?;
        p.check_below_critical(a_star)?;
        Ok(p)
    }

    pub fn params(&self, a_star: f64) -> Result<ProblemParams> {
        self.params_at(self.q, a_star)
    }

    pub fn solve_config(&self, params: &ProblemParams) -> SolveConfig {
        let mut cfg = SolveConfig::new(params);
        cfg.n = self.nx;
        cfg.radius = self.l;
        cfg.tol_residual = self.tol_residual;
        cfg.tol_pohozaev = self.tol_pohozaev;
        if let Some(p) = self.seed_x0 {
            cfg.seed_x0 = p;
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn subcritical_exponent_is_a_range_error() {
        match parse_config("q = 1.5") {
            Err(Error::Range { key, .. }) => assert_eq!(key, "q"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_config("q = 2.1\n\nfoo = 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_config("nx = many") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_config("q 2.1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("q = 2.1\nq = 2.2"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn range_errors_name_the_key() {
        for (text, key) in [
            ("b1 = 0.9", "b1"),
            ("A = -1", "A"),
            ("nx = 4", "nx"),
            ("L = 0", "L"),
            ("tol_pohozaev = 0", "tol_pohozaev"),
            ("q_schedule = 2.1, 2.2", "q_schedule"),
            ("a = -2", "a"),
        ] {
            match parse_config(text) {
                Err(Error::Range { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn serialize_round_trips() {
        let text = "a = 5.85\nq = 2.1  # target\nseed_x0 = -1.2, 0.0\nq_schedule = 2.3,2.2,2.1\nnx = 191\nL = 9.5\nseed = 42\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.seed_x0, Some([-1.2, 0.0]));
        let again = parse_config(&cfg.serialize()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.serialize(), cfg.serialize());
        let odd = RunConfig { tol_residual: 0.1 + 0.2, ..RunConfig::default() };
        assert_eq!(parse_config(&odd.serialize()).unwrap(), odd);
    }

    #[test]
    fn params_default_to_half_critical_mass() {
        let cfg = RunConfig::default();
        let p = cfg.params(11.7).unwrap();
        assert_eq!(p.a, 5.85);
        let over = RunConfig { a: Some(12.0), ..cfg };
        assert!(matches!(over.params(11.7), Err(Error::Range { .. })));
    }
}
