//! Flat `key = value` job configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, ensure, Context, Result};
use voa_core::algebra::AlgebraKind;
use voa_core::blocks::Point;
use voa_core::rational::Q;

const KEYS: &[&str] = &[
    "algebra", "c", "l", "rank", "module", "truncation", "window", "span_weight", "suite", "points", "pole_bound", "mode",
    "perturb", "u", "v", "w", "w_dual", "order", "coordinate", "check", "execution", "out",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    Value(Q),
    Symbolic,
}

/// A module over the algebra: `vacuum`, `verma:h`, `simple:h` (simple
/// quotient; `simple:0` is the quotient of the vacuum module), optionally
/// prefixed by `dual:`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpec {
    pub dual: bool,
    pub base: BaseModule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseModule {
    Vacuum,
    Verma(Q),
    Simple(Q),
}

impl std::str::FromStr for ModuleSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<ModuleSpec> {
        let s = s.trim();
        let (dual, rest) = match s.strip_prefix("dual:") {
            Some(r) => (true, r),
            None => (false, s),
        };
        let weight = |t: &str| t.trim().parse::<Q>().map_err(|e| anyhow!("bad weight {t:?}: {}", e.0));
        let base = match rest.split_once(':') {
            None if rest == "vacuum" => BaseModule::Vacuum,
            Some(("verma", h)) => BaseModule::Verma(weight(h)?),
            Some(("simple", h)) => BaseModule::Simple(weight(h)?),
            _ => bail!("unknown module {s:?} (expected vacuum, verma:h, simple:h, optionally prefixed by dual:)"),
        };
        Ok(ModuleSpec { dual, base })
    }
}

impl std::fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.dual {
            f.write_str("dual:")?;
        }
        match &self.base {
            BaseModule::Vacuum => f.write_str("vacuum"),
            BaseModule::Verma(h) => write!(f, "verma:{h}"),
            BaseModule::Simple(h) => write!(f, "simple:{h}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Voa,
    Module,
    Contragredient,
    Skew,
    Virasoro,
    Sugawara,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMode {
    Certify,
    Dim,
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub algebra: AlgebraKind,
    pub param: Param,
    pub rank: usize,
    /// Overrides `[a, b] = value` for affine tables, from `bracket.a.b` keys.
    pub brackets: Vec<(String, String, String)>,
    pub module: ModuleSpec,
    pub truncation: u32,
    pub window: i64,
    pub span_weight: Option<u32>,
    pub suite: Option<Suite>,
    pub points: Vec<Point>,
    /// Module per marked point, from `module.<point>` keys.
    pub point_modules: BTreeMap<usize, ModuleSpec>,
    pub pole_bound: i64,
    pub block_mode: BlockMode,
    pub perturb: bool,
    pub u: Option<String>,
    pub v: Option<String>,
    pub w: String,
    pub w_dual: String,
    pub order: i64,
    pub coordinate: Option<Vec<Q>>,
    pub huang: bool,
    pub sequential: bool,
    pub out: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> JobConfig {
        JobConfig {
            algebra: AlgebraKind::Virasoro,
            param: Param::Symbolic,
            rank: 1,
            brackets: Vec::new(),
            module: ModuleSpec { dual: false, base: BaseModule::Vacuum },
            truncation: 4,
            window: 3,
            span_weight: None,
            suite: None,
            points: Vec::new(),
            point_modules: BTreeMap::new(),
            pole_bound: 2,
            block_mode: BlockMode::Certify,
            perturb: false,
            u: None,
            v: None,
            w: "vac".into(),
            w_dual: "vac".into(),
            order: 4,
            coordinate: None,
            huang: false,
            sequential: false,
            out: None,
        }
    }
}

/// Key/value pairs in file order; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_q(key: &str, v: &str) -> Result<Q> {
    v.parse::<Q>().map_err(|e| anyhow!("{key}: {}", e.0))
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| anyhow!("{key}: {v:?} is not a valid number"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("{key}: expected true or false, got {v:?}"),
    }
}

impl JobConfig {
    /// Validates every pair; later pairs override earlier ones.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<JobConfig> {
        let mut cfg = JobConfig::default();
        let mut c = None;
        let mut l = None;
        let mut point_modules = Vec::new();
        for (k, v) in pairs {
            if let Some(rest) = k.strip_prefix("bracket.") {
                let (a, b) = rest.split_once('.').ok_or_else(|| anyhow!("{k}: expected bracket.<a>.<b>"))?;
                cfg.brackets.push((a.to_string(), b.to_string(), v.clone()));
                continue;
            }
            if let Some(p) = k.strip_prefix("module.") {
                point_modules.push((p.parse::<Point>().with_context(|| k.clone())?, v.parse::<ModuleSpec>().with_context(|| k.clone())?));
                continue;
            }
            ensure!(KEYS.contains(&k.as_str()), "unknown key {k:?}");
            match k.as_str() {
                "algebra" => {
                    cfg.algebra = match v.as_str() {
                        "virasoro" => AlgebraKind::Virasoro,
                        "heisenberg" => AlgebraKind::Heisenberg,
                        "affine-sl2" | "sl2" => AlgebraKind::AffineSl2,
                        _ => bail!("algebra: unknown {v:?} (virasoro, heisenberg, affine-sl2)"),
                    }
                }
                "c" => c = Some(v.clone()),
                "l" => l = Some(v.clone()),
                "rank" => cfg.rank = parse_num(k, v)?,
                "module" => cfg.module = v.parse()?,
                "truncation" => cfg.truncation = parse_num(k, v)?,
                "window" => cfg.window = parse_num(k, v)?,
                "span_weight" => cfg.span_weight = Some(parse_num(k, v)?),
                "suite" => {
                    cfg.suite = Some(match v.as_str() {
                        "voa" | "jacobi" => Suite::Voa,
                        "module" => Suite::Module,
                        "contragredient" => Suite::Contragredient,
                        "skew" | "skew-symmetry" => Suite::Skew,
                        "virasoro" => Suite::Virasoro,
                        "sugawara" => Suite::Sugawara,
                        _ => bail!("suite: unknown {v:?}"),
                    })
                }
                "points" => {
                    cfg.points = v.split(',').map(|p| p.parse::<Point>().map_err(|e| anyhow!("points: {e}"))).collect::<Result<_>>()?;
                }
                "pole_bound" => cfg.pole_bound = parse_num(k, v)?,
                "mode" => {
                    cfg.block_mode = match v.as_str() {
                        "certify" => BlockMode::Certify,
                        "dim" => BlockMode::Dim,
                        _ => bail!("mode: expected certify or dim"),
                    }
                }
                "perturb" => cfg.perturb = parse_bool(k, v)?,
                "u" => cfg.u = Some(v.clone()),
                "v" => cfg.v = Some(v.clone()),
                "w" => cfg.w = v.clone(),
                "w_dual" => cfg.w_dual = v.clone(),
                "order" => cfg.order = parse_num(k, v)?,
                "coordinate" => cfg.coordinate = Some(v.split(',').map(|x| parse_q(k, x.trim())).collect::<Result<_>>()?),
                "check" => {
                    cfg.huang = match v.as_str() {
                        "huang" | "covariance" => true,
                        "none" => false,
                        _ => bail!("check: expected covariance or none"),
                    }
                }
                "execution" => {
                    cfg.sequential = match v.as_str() {
                        "sequential" => true,
                        "parallel" => false,
                        _ => bail!("execution: expected sequential or parallel"),
                    }
                }
                "out" => cfg.out = Some(PathBuf::from(v)),
                _ => unreachable!(),
            }
        }
        cfg.set_param(c, l)?;
        ensure!(cfg.rank >= 1 && cfg.rank <= 16, "rank must be between 1 and 16");
        ensure!(cfg.window >= 0, "window must be nonnegative");
        ensure!(cfg.pole_bound >= 0, "pole_bound must be nonnegative");
        ensure!(cfg.order >= 0, "order must be nonnegative");
        ensure!(cfg.brackets.is_empty() || cfg.algebra == AlgebraKind::AffineSl2, "bracket overrides apply to affine-sl2 only");
        for (p, m) in point_modules {
            let i = cfg.points.iter().position(|x| *x == p).ok_or_else(|| anyhow!("module.{p}: {p} is not a marked point"))?;
            cfg.point_modules.insert(i, m);
        }
        Ok(cfg)
    }

    fn set_param(&mut self, c: Option<String>, l: Option<String>) -> Result<()> {
        let (key, value) = match (self.algebra, c, l) {
            (_, Some(_), Some(_)) => bail!("c and l cannot both be set: only one parameter may be symbolic or given"),
            (AlgebraKind::Virasoro, c, None) => ("c", c),
            (AlgebraKind::Virasoro, None, Some(_)) => bail!("l does not apply to the virasoro algebra; use c"),
            (_, None, l) => ("l", l),
            (_, Some(_), None) => bail!("c does not apply to affine algebras; use l"),
        };
        self.param = match value.as_deref() {
            None | Some("symbolic") => Param::Symbolic,
            Some(v) => Param::Value(parse_q(key, v)?),
        };
        Ok(())
    }

    /// Applies a `--param` flag: `c=<rat>`, `l=<rat>` or `symbolic`.
    pub fn apply_param_flag(&mut self, flag: &str) -> Result<()> {
        if flag == "symbolic" {
            self.param = Param::Symbolic;
            return Ok(());
        }
        let (k, v) = flag.split_once('=').ok_or_else(|| anyhow!("--param: expected c=<rat>, l=<rat> or symbolic"))?;
        let want = if self.algebra == AlgebraKind::Virasoro { "c" } else { "l" };
        ensure!(k == want, "--param: {k} does not apply to {}", self.algebra.as_str());
        self.param = if v == "symbolic" { Param::Symbolic } else { Param::Value(parse_q(k, v)?) };
        Ok(())
    }

    /// Normalized view of the keys that `command` reads.
    pub fn summary(&self, command: &str) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("truncation", self.truncation.to_string());
        if command == "oracle" {
            return m;
        }
        put("algebra", self.algebra.as_str().to_string());
        let pname = if self.algebra == AlgebraKind::Virasoro { "c" } else { "l" };
        put(
            pname,
            match &self.param {
                Param::Symbolic => "symbolic".into(),
                Param::Value(q) => q.to_string(),
            },
        );
        if self.algebra == AlgebraKind::Heisenberg {
            put("rank", self.rank.to_string());
        }
        for (a, b, v) in &self.brackets {
            put(&format!("bracket.{a}.{b}"), v.clone());
        }
        if command != "blocks" || self.block_mode == BlockMode::Certify {
            put("module", self.module.to_string());
        }
        let exec = if self.sequential { "sequential" } else { "parallel" };
        match command {
            "verify" => {
                put("window", self.window.to_string());
                if let Some(s) = self.span_weight {
                    put("span_weight", s.to_string());
                }
                if let Some(s) = self.suite {
                    put("suite", format!("{s:?}").to_lowercase());
                }
                put("execution", exec.into());
            }
            "npoint" => {
                put("u", self.u.clone().unwrap_or_default());
                put("v", self.v.clone().unwrap_or_default());
                put("w", self.w.clone());
                put("w_dual", self.w_dual.clone());
                put("order", self.order.to_string());
            }
            "blocks" => {
                let pts: Vec<String> = self.points.iter().map(Point::to_string).collect();
                put("points", pts.join(", "));
                put("mode", format!("{:?}", self.block_mode).to_lowercase());
                match self.block_mode {
                    BlockMode::Certify => {
                        put("pole_bound", self.pole_bound.to_string());
                        put("perturb", self.perturb.to_string());
                    }
                    BlockMode::Dim => {
                        for (i, spec) in &self.point_modules {
                            put(&format!("module.{}", self.points[*i]), spec.to_string());
                        }
                    }
                }
                put("execution", exec.into());
            }
            "coords" => {
                if let Some(c) = &self.coordinate {
                    put("coordinate", c.iter().map(Q::to_string).collect::<Vec<_>>().join(", "));
                }
                put("order", self.order.to_string());
                put("check", if self.huang { "covariance" } else { "none" }.into());
            }
            _ => {}
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<JobConfig> {
        JobConfig::from_pairs(&parse_pairs(text)?)
    }

    #[test]
    fn parses_and_validates() {
        let c = cfg("algebra = virasoro\nc = 1/2 # Ising\ntruncation = 6\npoints = 0, 2, inf\n").unwrap();
        assert_eq!(c.param, Param::Value(Q::new(1, 2)));
        assert_eq!(c.points, vec![Point::Finite(Q::ZERO), Point::Finite(Q::from_int(2)), Point::Infinity]);
        assert!(cfg("algebra = virasoro\nc = symbolic\nl = symbolic\n").is_err());
        assert!(cfg("algebra = heisenberg\nc = 1\n").is_err());
        assert!(cfg("colour = blue\n").is_err());
        assert!(cfg("truncation = -1\n").is_err());
        assert!(cfg("module = dual:simple:1/16\n").unwrap().module.dual);
    }
}
