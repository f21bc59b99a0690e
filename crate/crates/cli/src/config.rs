//! Experiment configuration: TOML text with a fixed set of sections.
//!
//! Parsing never stops at the first problem. Every unknown key, type mismatch
//! and constraint violation is collected together with its source line.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use ikfp_core::solver::{CflPolicy, Scheme};
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Stability,
    Rescaled,
    Dd,
    Sweep,
    Verify,
    Particles,
    Compare,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Stability,
        Kind::Rescaled,
        Kind::Dd,
        Kind::Sweep,
        Kind::Verify,
        Kind::Particles,
        Kind::Compare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Stability => "stability",
            Kind::Rescaled => "rescaled",
            Kind::Dd => "dd",
            Kind::Sweep => "sweep",
            Kind::Verify => "verify",
            Kind::Particles => "particles",
            Kind::Compare => "compare",
        }
    }

    fn default_t_final(self) -> f64 {
        match self {
            Kind::Stability => 10.0,
            Kind::Rescaled | Kind::Dd | Kind::Sweep => 0.5,
            Kind::Verify => 1.0,
            Kind::Particles | Kind::Compare => 2.0,
        }
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Equilibrium,
    CosinePerturbed,
    HermiteMode,
    WellPrepared,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Equilibrium => "equilibrium",
            Family::CosinePerturbed => "cosine-perturbed",
            Family::HermiteMode => "hermite-mode",
            Family::WellPrepared => "well-prepared",
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            Family::Equilibrium,
            Family::CosinePerturbed,
            Family::HermiteMode,
            Family::WellPrepared,
        ]
        .into_iter()
        .find(|f| f.name() == s)
        .ok_or_else(|| format!("unknown initial family '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamsConfig {
    pub m: f64,
    pub kappa_t: f64,
    pub sigma_t: f64,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub n_theta: usize,
    pub n_hermite: usize,
    /// `[ν, g, γ̄]` triples; `None` is the single node at `ν = 0`.
    pub nodes: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    /// `None` picks a step from the stability bound.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub scheme: Scheme,
    pub stride: usize,
    pub cfl_constant: f64,
    pub cfl_policy: CflPolicy,
    pub snapshot_stride: Option<usize>,
}

/// One extra coefficient `c` at Hermite level `n`, Fourier mode `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub n: usize,
    pub k: i64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    pub family: Family,
    pub mass: f64,
    pub delta: f64,
    /// Used by `hermite-mode`.
    pub mode: ModeSpec,
    /// Added on top of any family.
    pub extra_modes: Vec<ModeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub eps: Vec<f64>,
    pub layer_factor: f64,
    pub dd_dt: f64,
    pub step_budget: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub n_fields: usize,
    pub sigma_values: Vec<f64>,
    pub slack: f64,
    pub n_sources: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticlesConfig {
    pub n: usize,
    /// `None` means `t_final / 2000`.
    pub dt: Option<f64>,
    pub bins: usize,
    /// Number of output rows after the initial one.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    pub output_dir: String,
    pub c_inf: Option<f64>,
    pub params: ParamsConfig,
    pub grid: GridConfig,
    pub solver: SolverSection,
    pub initial: InitialConfig,
    pub sweep: SweepConfig,
    pub verify: VerifyConfig,
    pub particles: ParticlesConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

struct Ctx {
    lines: HashMap<String, usize>,
    errors: Vec<ConfigError>,
}

impl Ctx {
    fn err(&mut self, key: &str, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line: self.lines.get(key).copied(),
            key: key.to_string(),
            message: message.into(),
        });
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|b| *b == b'\n')
        .count()
        + 1
}

fn index_lines(
    text: &str,
    table: &toml::de::DeTable<'_>,
    prefix: &str,
    out: &mut HashMap<String, usize>,
) {
    for (k, v) in table {
        let path = if prefix.is_empty() {
            k.get_ref().to_string()
        } else {
            format!("{prefix}.{}", k.get_ref())
        };
        out.insert(path.clone(), line_of(text, k.span().start));
        if let Some(t) = v.get_ref().as_table() {
            index_lines(text, t, &path, out);
        }
    }
}

/// A section whose keys are removed as they are read; leftovers are unknown.
struct Section {
    name: &'static str,
    table: Table,
}

impl Section {
    fn path(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    fn take<T>(
        &mut self,
        ctx: &mut Ctx,
        key: &str,
        expected: &str,
        conv: impl Fn(&Value) -> Option<T>,
    ) -> Option<T> {
        let v = self.table.remove(key)?;
        match conv(&v) {
            Some(x) => Some(x),
            None => {
                ctx.err(
                    &self.path(key),
                    format!("expected {expected}, found {}", v.type_str()),
                );
                None
            }
        }
    }

    fn f64_opt(&mut self, ctx: &mut Ctx, key: &str) -> Option<f64> {
        self.take(ctx, key, "a number", as_f64)
    }

    fn f64_or(&mut self, ctx: &mut Ctx, key: &str, default: f64) -> f64 {
        self.f64_opt(ctx, key).unwrap_or(default)
    }

    fn usize_opt(&mut self, ctx: &mut Ctx, key: &str) -> Option<usize> {
        self.take(ctx, key, "a nonnegative integer", |v| {
            v.as_integer().and_then(|i| usize::try_from(i).ok())
        })
    }

    fn usize_or(&mut self, ctx: &mut Ctx, key: &str, default: usize) -> usize {
        self.usize_opt(ctx, key).unwrap_or(default)
    }

    fn str_opt(&mut self, ctx: &mut Ctx, key: &str) -> Option<String> {
        self.take(ctx, key, "a string", |v| v.as_str().map(str::to_string))
    }

    fn parsed_or<T: FromStr<Err = E>, E: fmt::Display>(
        &mut self,
        ctx: &mut Ctx,
        key: &str,
        default: T,
    ) -> T {
        match self.str_opt(ctx, key) {
            None => default,
            Some(s) => match s.parse() {
                Ok(x) => x,
                Err(e) => {
                    ctx.err(&self.path(key), e.to_string());
                    default
                }
            },
        }
    }

    fn f64_list_or(&mut self, ctx: &mut Ctx, key: &str, default: &[f64]) -> Vec<f64> {
        self.take(ctx, key, "an array of numbers", |v| {
            v.as_array()?.iter().map(as_f64).collect::<Option<Vec<_>>>()
        })
        .unwrap_or_else(|| default.to_vec())
    }

    fn finish(self, ctx: &mut Ctx) {
        for key in self.table.keys() {
            let path = self.path(key);
            ctx.err(&path, "unknown key");
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn as_mode(v: &Value) -> Option<ModeSpec> {
    let a = v.as_array()?;
    if a.len() != 3 {
        return None;
    }
    Some(ModeSpec {
        n: usize::try_from(a[0].as_integer()?).ok()?,
        k: a[1].as_integer()?,
        c: as_f64(&a[2])?,
    })
}

const SECTIONS: [&str; 8] = [
    "params",
    "grid",
    "solver",
    "initial",
    "regime",
    "sweep",
    "verify",
    "particles",
];

fn section(ctx: &mut Ctx, root: &mut Table, name: &'static str) -> Section {
    let table = match root.remove(name) {
        None => Table::new(),
        Some(Value::Table(t)) => t,
        Some(other) => {
            ctx.err(
                name,
                format!("expected a table, found {}", other.type_str()),
            );
            Table::new()
        }
    };
    Section { name, table }
}

fn check(ctx: &mut Ctx, ok: bool, key: &str, message: impl FnOnce() -> String) {
    if !ok {
        ctx.err(key, message());
    }
}

/// Applies `section.key=value`; the value is read as TOML and falls back to a bare string.
pub fn apply_override(root: &mut Table, assignment: &str) -> Result<(), ConfigError> {
    let fail = |m: String| ConfigError {
        line: None,
        key: assignment.to_string(),
        message: m,
    };
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| fail("override must look like key=value".into()))?;
    let path = path.trim();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("single key"),
        Err(_) => Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) || parts.len() > 2 {
        return Err(fail(format!("bad key path '{path}'")));
    }
    let mut target = root;
    for p in &parts[..parts.len() - 1] {
        let entry = target
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        target = entry
            .as_table_mut()
            .ok_or_else(|| fail(format!("'{p}' is not a table")))?;
    }
    target.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Parses and validates `text`, with `overrides` applied before validation.
/// `kind` fills in (or must agree with) the `kind` key.
pub fn parse_config(
    text: &str,
    overrides: &[String],
    kind: Option<Kind>,
) -> Result<ExperimentConfig, ConfigErrors> {
    let mut lines = HashMap::new();
    let mut root: Table = match toml::de::DeTable::parse(text) {
        Ok(doc) => {
            index_lines(text, doc.get_ref(), "", &mut lines);
            match text.parse::<Table>() {
                Ok(t) => t,
                Err(e) => return Err(ConfigErrors(vec![syntax_error(text, &e)])),
            }
        }
        Err(e) => return Err(ConfigErrors(vec![syntax_error(text, &e)])),
    };
    let mut ctx = Ctx {
        lines,
        errors: Vec::new(),
    };
    for o in overrides {
        if let Err(e) = apply_override(&mut root, o) {
            ctx.errors.push(e);
        }
    }
    let cfg = build(&mut ctx, root, kind);
    if ctx.errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(ctx.errors))
    }
}

fn syntax_error(text: &str, e: &toml::de::Error) -> ConfigError {
    ConfigError {
        line: e.span().map(|s| line_of(text, s.start)),
        key: "syntax".into(),
        message: e.message().trim().to_string(),
    }
}

fn build(ctx: &mut Ctx, mut root: Table, forced: Option<Kind>) -> ExperimentConfig {
    let sections: Vec<Section> = SECTIONS
        .iter()
        .map(|s| section(ctx, &mut root, s))
        .collect();
    let mut top = Section {
        name: "",
        table: root,
    };
    let [mut params, mut grid, mut solver, mut initial, mut regime, mut sweep, mut verify, mut particles]: [Section; 8] =
        sections.try_into().ok().expect("eight sections");

    let declared: Option<Kind> = top.str_opt(ctx, "kind").and_then(|s| match s.parse() {
        Ok(k) => Some(k),
        Err(e) => {
            ctx.err("kind", e);
            None
        }
    });
    let kind = match (forced, declared) {
        (Some(f), Some(d)) if f != d => {
            ctx.err(
                "kind",
                format!(
                    "config declares '{}' but '{}' was requested",
                    d.name(),
                    f.name()
                ),
            );
            f
        }
        (Some(f), _) => f,
        (None, Some(d)) => d,
        (None, None) => {
            ctx.err("kind", "missing experiment kind");
            Kind::Stability
        }
    };
    let seed = top
        .take(ctx, "seed", "a nonnegative integer", |v| {
            v.as_integer().and_then(|i| u64::try_from(i).ok())
        })
        .unwrap_or(0);
    let output_dir = top
        .str_opt(ctx, "output_dir")
        .unwrap_or_else(|| "out".into());
    top.finish(ctx);

    let p = ParamsConfig {
        m: params.f64_or(ctx, "m", 1.0),
        kappa_t: params.f64_or(ctx, "kappa_t", 0.0),
        sigma_t: params.f64_or(ctx, "sigma_t", 1.0),
        epsilon: params.f64_opt(ctx, "epsilon"),
    };
    params.finish(ctx);
    check(ctx, p.m > 0.0 && p.m.is_finite(), "params.m", || {
        format!("must be positive, got {}", p.m)
    });
    check(
        ctx,
        p.kappa_t >= 0.0 && p.kappa_t.is_finite(),
        "params.kappa_t",
        || format!("must be nonnegative, got {}", p.kappa_t),
    );
    check(
        ctx,
        p.sigma_t > 0.0 && p.sigma_t.is_finite(),
        "params.sigma_t",
        || format!("must be positive, got {}", p.sigma_t),
    );
    if let Some(e) = p.epsilon {
        check(ctx, e > 0.0 && e.is_finite(), "params.epsilon", || {
            format!("must be positive, got {e}")
        });
    }
    if kind == Kind::Rescaled {
        check(ctx, p.epsilon.is_some(), "params.epsilon", || {
            "rescaled runs need epsilon".into()
        });
    }

    let nodes = grid.take(ctx, "nodes", "an array of [nu, g, gbar] triples", |v| {
        v.as_array()?
            .iter()
            .map(|t| {
                let a = t.as_array()?;
                (a.len() == 3).then_some(())?;
                Some([as_f64(&a[0])?, as_f64(&a[1])?, as_f64(&a[2])?])
            })
            .collect::<Option<Vec<_>>>()
    });
    let g = GridConfig {
        n_theta: grid.usize_or(ctx, "n_theta", 32),
        n_hermite: grid.usize_or(ctx, "n_hermite", 16),
        nodes,
    };
    grid.finish(ctx);
    check(
        ctx,
        g.n_theta >= 4 && g.n_theta.is_multiple_of(2),
        "grid.n_theta",
        || format!("must be even and at least 4, got {}", g.n_theta),
    );
    check(ctx, g.n_hermite >= 2, "grid.n_hermite", || {
        format!("must be at least 2, got {}", g.n_hermite)
    });
    if let Some(ns) = &g.nodes {
        check(ctx, !ns.is_empty(), "grid.nodes", || {
            "node list is empty".into()
        });
        for (i, n) in ns.iter().enumerate() {
            check(
                ctx,
                n[1] >= 0.0 && n[2] > 0.0 && n.iter().all(|x| x.is_finite()),
                "grid.nodes",
                || format!("node {i} needs g >= 0 and gbar > 0, got {n:?}"),
            );
        }
        check(
            ctx,
            ns.iter().map(|n| n[1]).sum::<f64>() > 0.0,
            "grid.nodes",
            || "weights g sum to zero".into(),
        );
        let single = ns.len() == 1;
        if matches!(kind, Kind::Rescaled | Kind::Sweep | Kind::Dd) {
            check(ctx, single, "grid.nodes", || {
                format!("{} runs need a single node", kind.name())
            });
        }
    }

    let s = SolverSection {
        dt: solver.f64_opt(ctx, "dt"),
        t_final: solver.f64_or(ctx, "t_final", kind.default_t_final()),
        scheme: solver.parsed_or(ctx, "scheme", Scheme::ExpSplitRk4),
        stride: solver.usize_or(ctx, "stride", 1),
        cfl_constant: solver.f64_or(ctx, "cfl_constant", 0.5),
        cfl_policy: solver.parsed_or(ctx, "cfl_policy", CflPolicy::Refuse),
        snapshot_stride: solver.usize_opt(ctx, "snapshot_stride"),
    };
    solver.finish(ctx);
    if let Some(dt) = s.dt {
        check(ctx, dt > 0.0 && dt.is_finite(), "solver.dt", || {
            format!("must be positive, got {dt}")
        });
        check(ctx, s.t_final >= dt, "solver.t_final", || {
            format!("must be at least dt = {dt}, got {}", s.t_final)
        });
    }
    check(
        ctx,
        s.t_final > 0.0 && s.t_final.is_finite(),
        "solver.t_final",
        || format!("must be positive, got {}", s.t_final),
    );
    check(ctx, s.stride >= 1, "solver.stride", || {
        "must be at least 1".into()
    });
    check(ctx, s.cfl_constant > 0.0, "solver.cfl_constant", || {
        "must be positive".into()
    });
    if let Some(k) = s.snapshot_stride {
        check(ctx, k >= 1, "solver.snapshot_stride", || {
            "must be at least 1".into()
        });
    }

    let mode = initial.take(ctx, "mode", "an [n, k, c] triple", as_mode);
    let extra_modes = initial
        .take(ctx, "extra_modes", "an array of [n, k, c] triples", |v| {
            v.as_array()?
                .iter()
                .map(as_mode)
                .collect::<Option<Vec<_>>>()
        })
        .unwrap_or_default();
    let i = InitialConfig {
        family: initial.parsed_or(ctx, "family", Family::Equilibrium),
        mass: initial.f64_or(ctx, "mass", 1.0),
        delta: initial.f64_or(ctx, "delta", 0.0),
        mode: mode.unwrap_or(ModeSpec {
            n: 2,
            k: 1,
            c: 0.01,
        }),
        extra_modes,
    };
    initial.finish(ctx);
    check(
        ctx,
        i.mass > 0.0 && i.mass.is_finite(),
        "initial.mass",
        || format!("must be positive, got {}", i.mass),
    );
    check(ctx, i.delta.is_finite(), "initial.delta", || {
        "must be finite".into()
    });
    for m in std::iter::once(&i.mode).chain(&i.extra_modes) {
        check(ctx, m.n <= g.n_hermite, "initial.mode", || {
            format!("Hermite level {} exceeds n_hermite = {}", m.n, g.n_hermite)
        });
        check(
            ctx,
            m.k.unsigned_abs() < (g.n_theta / 2) as u64,
            "initial.mode",
            || format!("Fourier mode {} outside the retained band", m.k),
        );
        check(ctx, !(m.n == 0 && m.k == 0), "initial.mode", || {
            "the mass mode cannot be perturbed".into()
        });
        check(ctx, m.c.is_finite(), "initial.mode", || {
            "coefficient must be finite".into()
        });
    }

    let c_inf = regime.f64_opt(ctx, "c_inf");
    regime.finish(ctx);
    if let Some(c) = c_inf {
        check(ctx, c > 0.0, "regime.c_inf", || {
            format!("must be positive, got {c}")
        });
    }

    let sw = SweepConfig {
        eps: sweep.f64_list_or(ctx, "eps", &[0.2, 0.1, 0.05, 0.025]),
        layer_factor: sweep.f64_or(ctx, "layer_factor", 0.25),
        dd_dt: sweep.f64_or(ctx, "dd_dt", 1e-4),
        step_budget: sweep.usize_or(ctx, "step_budget", 200_000),
    };
    sweep.finish(ctx);
    check(
        ctx,
        sw.eps.len() >= 2
            && sw.eps.iter().all(|e| *e > 0.0)
            && sw.eps.windows(2).all(|w| w[1] < w[0]),
        "sweep.eps",
        || "needs two or more positive, strictly decreasing values".into(),
    );
    check(ctx, sw.layer_factor > 0.0, "sweep.layer_factor", || {
        "must be positive".into()
    });
    check(ctx, sw.dd_dt > 0.0, "sweep.dd_dt", || {
        "must be positive".into()
    });

    let v = VerifyConfig {
        n_fields: verify.usize_or(ctx, "n_fields", 1000),
        sigma_values: verify.f64_list_or(ctx, "sigma_values", &[0.5, 1.0, 2.0]),
        slack: verify.f64_or(ctx, "slack", 1e-12),
        n_sources: verify.usize_or(ctx, "n_sources", 100),
    };
    verify.finish(ctx);
    check(
        ctx,
        v.sigma_values.iter().all(|s| *s > 0.0),
        "verify.sigma_values",
        || "must be positive".into(),
    );
    check(ctx, v.slack >= 0.0, "verify.slack", || {
        "must be nonnegative".into()
    });

    let pc = ParticlesConfig {
        n: particles.usize_or(ctx, "n", 50_000),
        dt: particles.f64_opt(ctx, "dt"),
        bins: particles.usize_or(ctx, "bins", 32),
        samples: particles.usize_or(ctx, "samples", 10),
    };
    particles.finish(ctx);
    check(ctx, pc.n >= 1, "particles.n", || {
        "must be at least 1".into()
    });
    check(ctx, pc.bins >= 4, "particles.bins", || {
        format!("must be at least 4, got {}", pc.bins)
    });
    check(ctx, pc.samples >= 1, "particles.samples", || {
        "must be at least 1".into()
    });
    if let Some(dt) = pc.dt {
        check(ctx, dt > 0.0, "particles.dt", || {
            format!("must be positive, got {dt}")
        });
    }

    ExperimentConfig {
        kind,
        seed,
        output_dir,
        c_inf,
        params: p,
        grid: g,
        solver: s,
        initial: i,
        sweep: sw,
        verify: v,
        particles: pc,
    }
}

fn mode_value(m: &ModeSpec) -> Value {
    Value::Array(vec![
        Value::Integer(m.n as i64),
        Value::Integer(m.k),
        Value::Float(m.c),
    ])
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| Value::Float(*x)).collect())
}

impl ExperimentConfig {
    /// Complete TOML text; parsing it yields `self` again.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        root.insert("kind".into(), self.kind.name().into());
        root.insert("seed".into(), Value::Integer(self.seed as i64));
        root.insert("output_dir".into(), self.output_dir.clone().into());

        let mut t = Table::new();
        t.insert("m".into(), self.params.m.into());
        t.insert("kappa_t".into(), self.params.kappa_t.into());
        t.insert("sigma_t".into(), self.params.sigma_t.into());
        if let Some(e) = self.params.epsilon {
            t.insert("epsilon".into(), e.into());
        }
        root.insert("params".into(), t.into());

        let mut t = Table::new();
        t.insert("n_theta".into(), Value::Integer(self.grid.n_theta as i64));
        t.insert(
            "n_hermite".into(),
            Value::Integer(self.grid.n_hermite as i64),
        );
        if let Some(ns) = &self.grid.nodes {
            t.insert(
                "nodes".into(),
                Value::Array(ns.iter().map(|n| floats(n)).collect()),
            );
        }
        root.insert("grid".into(), t.into());

        let mut t = Table::new();
        if let Some(dt) = self.solver.dt {
            t.insert("dt".into(), dt.into());
        }
        t.insert("t_final".into(), self.solver.t_final.into());
        t.insert("scheme".into(), self.solver.scheme.name().into());
        t.insert("stride".into(), Value::Integer(self.solver.stride as i64));
        t.insert("cfl_constant".into(), self.solver.cfl_constant.into());
        let policy = match self.solver.cfl_policy {
            CflPolicy::Refuse => "refuse",
            CflPolicy::Warn => "warn",
        };
        t.insert("cfl_policy".into(), policy.into());
        if let Some(k) = self.solver.snapshot_stride {
            t.insert("snapshot_stride".into(), Value::Integer(k as i64));
        }
        root.insert("solver".into(), t.into());

        let mut t = Table::new();
        t.insert("family".into(), self.initial.family.name().into());
        t.insert("mass".into(), self.initial.mass.into());
        t.insert("delta".into(), self.initial.delta.into());
        t.insert("mode".into(), mode_value(&self.initial.mode));
        if !self.initial.extra_modes.is_empty() {
            t.insert(
                "extra_modes".into(),
                Value::Array(self.initial.extra_modes.iter().map(mode_value).collect()),
            );
        }
        root.insert("initial".into(), t.into());

        if let Some(c) = self.c_inf {
            let mut t = Table::new();
            t.insert("c_inf".into(), c.into());
            root.insert("regime".into(), t.into());
        }

        let mut t = Table::new();
        t.insert("eps".into(), floats(&self.sweep.eps));
        t.insert("layer_factor".into(), self.sweep.layer_factor.into());
        t.insert("dd_dt".into(), self.sweep.dd_dt.into());
        t.insert(
            "step_budget".into(),
            Value::Integer(self.sweep.step_budget as i64),
        );
        root.insert("sweep".into(), t.into());

        let mut t = Table::new();
        t.insert(
            "n_fields".into(),
            Value::Integer(self.verify.n_fields as i64),
        );
        t.insert("sigma_values".into(), floats(&self.verify.sigma_values));
        t.insert("slack".into(), self.verify.slack.into());
        t.insert(
            "n_sources".into(),
            Value::Integer(self.verify.n_sources as i64),
        );
        root.insert("verify".into(), t.into());

        let mut t = Table::new();
        t.insert("n".into(), Value::Integer(self.particles.n as i64));
        if let Some(dt) = self.particles.dt {
            t.insert("dt".into(), dt.into());
        }
        t.insert("bins".into(), Value::Integer(self.particles.bins as i64));
        t.insert(
            "samples".into(),
            Value::Integer(self.particles.samples as i64),
        );
        root.insert("particles".into(), t.into());

        toml::to_string(&root).expect("plain tables serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("kind = \"stability\"\n", &[], None).unwrap();
        assert_eq!(c.grid.n_theta, 32);
        assert_eq!(c.solver.t_final, 10.0);
        assert_eq!(c.solver.scheme, Scheme::ExpSplitRk4);
        assert_eq!(c.initial.family, Family::Equilibrium);
    }

    #[test]
    fn odd_n_theta_is_named() {
        let e = parse_config("kind = \"stability\"\n[grid]\nn_theta = 7\n", &[], None).unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!(e.0[0].line, Some(3));
        assert!(e.0[0].to_string().contains("even"));
    }

    #[test]
    fn all_errors_are_reported() {
        let text = "kind = \"stability\"\ncolour = 3\n[grid]\nn_theta = 7\nn_hermite = \"many\"\n[params]\nm = -1\n";
        let e = parse_config(text, &[], None).unwrap_err();
        let lines: Vec<Option<usize>> = e.0.iter().map(|x| x.line).collect();
        assert_eq!(e.0.len(), 4, "{e}");
        for l in [2, 4, 5, 7] {
            assert!(lines.contains(&Some(l)), "{e}");
        }
    }

    #[test]
    fn serialization_round_trips() {
        let text = "kind = \"sweep\"\nseed = 9\n[params]\nkappa_t = 1.0\n[sweep]\neps = [0.2, 0.1]\n[initial]\nfamily = \"well-prepared\"\ndelta = 0.5\nextra_modes = [[1, 0, 0.01]]\n";
        let a = parse_config(text, &[], None).unwrap();
        let s = a.to_toml();
        let b = parse_config(&s, &[], None).unwrap();
        assert_eq!(a, b);
        assert_eq!(s, b.to_toml());
    }

    #[test]
    fn overrides_apply_before_validation() {
        let c = parse_config(
            "kind = \"stability\"\n",
            &[
                "grid.n_theta=16".into(),
                "initial.family=cosine-perturbed".into(),
                "seed=4".into(),
            ],
            None,
        )
        .unwrap();
        assert_eq!(c.grid.n_theta, 16);
        assert_eq!(c.initial.family, Family::CosinePerturbed);
        assert_eq!(c.seed, 4);
        assert!(parse_config("kind = \"stability\"\n", &["grid.n_theta=5".into()], None).is_err());
    }

    #[test]
    fn requested_kind_must_agree() {
        assert!(parse_config("kind = \"dd\"\n", &[], Some(Kind::Sweep)).is_err());
        assert_eq!(
            parse_config("", &[], Some(Kind::Dd)).unwrap().kind,
            Kind::Dd
        );
        assert!(parse_config("", &[], None).is_err());
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = parse_config("kind = \"stability\"\n[grid\n", &[], None).unwrap_err();
        assert_eq!(e.0[0].line, Some(2));
    }
}
