//! Flat `key = value` run configuration.
//!
//! A document is UTF-8 text, one pair per line, with `#` starting a
//! comment and blank lines ignored. Every key is either consumed by the
//! schema below or rejected; errors carry the offending key and line.
//!
//! Defaults: `grid_n = 1024`, `grid_length = 64 pi`, `sign = defocusing`,
//! `output_every = 100`, `seed = 0`, `k = 2`, and `dt` falls back to the
//! default step rule snapped to divide `t_end`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::dispersion::{Dispersion, EquationSpec, Sign};
use crate::dynamics::{default_dt, snapped_dt, RunPlan};
use crate::init::InitialData;
use crate::spectral::{Field, SpectralGrid};
use crate::{FdfError, Result};

/// Which member of the equation family a run solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    Mfdf,
    Mfdf2,
    Mbo,
    Mkdv,
    Gfdf,
}

impl EquationKind {
    pub fn label(self) -> &'static str {
        match self {
            EquationKind::Mfdf => "mfdf",
            EquationKind::Mfdf2 => "mfdf2",
            EquationKind::Mbo => "mbo",
            EquationKind::Mkdv => "mkdv",
            EquationKind::Gfdf => "gfdf",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        match name {
            "mfdf" => Some(EquationKind::Mfdf),
            "mfdf2" => Some(EquationKind::Mfdf2),
            "mbo" => Some(EquationKind::Mbo),
            "mkdv" => Some(EquationKind::Mkdv),
            "gfdf" => Some(EquationKind::Gfdf),
            _ => None,
        }
    }

    fn needs_delta(self) -> bool {
        matches!(
            self,
            EquationKind::Mfdf | EquationKind::Mfdf2 | EquationKind::Gfdf
        )
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub equation: EquationKind,
    /// Depth parameter; present exactly when the equation has one.
    pub delta: Option<f64>,
    /// Nonlinearity power; 2 except for explicitly general runs.
    pub k: u32,
    pub sign: Sign,
    pub grid_n: usize,
    pub grid_length: f64,
    /// Explicit step size; `None` defers to the default step rule.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub output_every: u64,
    pub snapshot_times: Vec<f64>,
    pub init: InitialData,
    pub seed: u64,
}

impl SimConfig {
    /// The equation this configuration describes.
    pub fn equation_spec(&self) -> Result<EquationSpec> {
        let delta = || {
            self.delta.ok_or_else(|| {
                FdfError::config_key("delta", format!("required for `{}`", self.equation.label()))
            })
        };
        let dispersion = match self.equation {
            EquationKind::Mfdf | EquationKind::Gfdf => Dispersion::Fdf { delta: delta()? },
            EquationKind::Mfdf2 => Dispersion::Fdf2 { delta: delta()? },
            EquationKind::Mbo => Dispersion::Bo,
            EquationKind::Mkdv => Dispersion::Airy,
        };
        EquationSpec::new(dispersion, self.k, self.sign)
    }

    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.grid_n, self.grid_length)
    }

    pub fn initial_field(&self, grid: &SpectralGrid) -> Result<Field> {
        self.init.build(grid, self.seed)
    }

    /// The explicit `dt` if one was given, otherwise the default step rule
    /// snapped so `t_end` divides into whole steps.
    pub fn resolved_dt(&self, grid: &SpectralGrid, dispersion: Dispersion) -> f64 {
        self.dt
            .unwrap_or_else(|| snapped_dt(self.t_end, default_dt(grid, dispersion)))
    }

    /// The schedule this configuration asks for.
    pub fn run_plan(&self, grid: &SpectralGrid, dispersion: Dispersion) -> RunPlan {
        RunPlan {
            dt: self.resolved_dt(grid, dispersion),
            t_end: self.t_end,
            output_every: self.output_every,
            snapshot_times: self.snapshot_times.clone(),
        }
    }
}

struct RawDoc {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawDoc {
    fn lex(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (String, usize)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(FdfError::Config {
                    line: Some(line_no),
                    key: None,
                    message: format!("expected `key = value`, found `{content}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(FdfError::Config {
                    line: Some(line_no),
                    key: None,
                    message: "missing key before `=`".into(),
                });
            }
            if value.is_empty() {
                return Err(FdfError::config_at(line_no, key, "missing value after `=`"));
            }
            if let Some((_, first)) = entries.get(key) {
                return Err(FdfError::config_at(
                    line_no,
                    key,
                    format!("duplicate key (first set at line {first})"),
                ));
            }
            entries.insert(key.to_string(), (value.to_string(), line_no));
        }
        Ok(RawDoc { entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<(f64, usize)>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some((x, line))),
                _ => Err(FdfError::config_at(
                    line,
                    key,
                    format!("expected a finite number, found `{v}`"),
                )),
            },
        }
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<(u64, usize)>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => match v.parse::<u64>() {
                Ok(x) => Ok(Some((x, line))),
                Err(_) => Err(FdfError::config_at(
                    line,
                    key,
                    format!("expected a non-negative integer, found `{v}`"),
                )),
            },
        }
    }

    fn require_f64(&mut self, key: &str) -> Result<(f64, usize)> {
        self.take_f64(key)?
            .ok_or_else(|| FdfError::config_key(key, "required key is missing"))
    }

    fn require_positive_f64(&mut self, key: &str) -> Result<f64> {
        let (x, line) = self.require_f64(key)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(FdfError::config_at(
                line,
                key,
                format!("must be positive, found `{x}`"),
            ))
        }
    }

    fn reject_leftovers(&self) -> Result<()> {
        if let Some((key, (_, line))) = self
            .entries
            .iter()
            .min_by_key(|(_, (_, line))| *line)
        {
            return Err(FdfError::config_at(*line, key, "unknown key"));
        }
        Ok(())
    }
}

/// Parses and fully validates a configuration document.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut doc = RawDoc::lex(text)?;

    let (eq_name, eq_line) = doc
        .take("equation")
        .ok_or_else(|| FdfError::config_key("equation", "required key is missing"))?;
    let equation = EquationKind::parse(&eq_name).ok_or_else(|| {
        FdfError::config_at(
            eq_line,
            "equation",
            format!("unknown equation `{eq_name}`; expected mfdf, mfdf2, mbo, mkdv, or gfdf"),
        )
    })?;

    let delta = match (equation.needs_delta(), doc.take_f64("delta")?) {
        (true, Some((d, line))) => {
            if d <= 0.0 {
                return Err(FdfError::config_at(
                    line,
                    "delta",
                    format!("must be positive, found `{d}`"),
                ));
            }
            Some(d)
        }
        (true, None) => {
            return Err(FdfError::config_key(
                "delta",
                format!("required for equation `{}`", equation.label()),
            ));
        }
        (false, Some((_, line))) => {
            return Err(FdfError::config_at(
                line,
                "delta",
                format!("incompatible with equation `{}`", equation.label()),
            ));
        }
        (false, None) => None,
    };

    let k = match doc.take_u64("k")? {
        Some((kv, line)) => {
            if equation != EquationKind::Gfdf {
                return Err(FdfError::config_at(
                    line,
                    "k",
                    format!("only valid for equation `gfdf`, not `{}`", equation.label()),
                ));
            }
            if !(1..=4).contains(&kv) {
                return Err(FdfError::config_at(
                    line,
                    "k",
                    format!("supported nonlinearity powers are 1..=4, found `{kv}`"),
                ));
            }
            kv as u32
        }
        None => 2,
    };

    let sign = match doc.take("sign") {
        None => Sign::Defocusing,
        Some((v, line)) => match v.as_str() {
            "defocusing" => Sign::Defocusing,
            "focusing" => Sign::Focusing,
            _ => {
                return Err(FdfError::config_at(
                    line,
                    "sign",
                    format!("expected `defocusing` or `focusing`, found `{v}`"),
                ));
            }
        },
    };

    let grid_n = match doc.take_u64("grid_n")? {
        Some((n, line)) => {
            if n % 2 != 0 || n < 8 {
                return Err(FdfError::config_at(
                    line,
                    "grid_n",
                    format!("must be an even integer of at least 8, found `{n}`"),
                ));
            }
            n as usize
        }
        None => 1024,
    };

    let grid_length = match doc.take_f64("grid_length")? {
        Some((l, line)) => {
            if l <= 0.0 {
                return Err(FdfError::config_at(
                    line,
                    "grid_length",
                    format!("must be positive, found `{l}`"),
                ));
            }
            l
        }
        None => 64.0 * PI,
    };

    let dt = match doc.take_f64("dt")? {
        Some((d, line)) => {
            if d <= 0.0 {
                return Err(FdfError::config_at(
                    line,
                    "dt",
                    format!("must be positive, found `{d}`"),
                ));
            }
            Some(d)
        }
        None => None,
    };

    let (t_end, t_end_line) = doc.require_f64("t_end")?;
    if t_end < 0.0 {
        return Err(FdfError::config_at(
            t_end_line,
            "t_end",
            format!("must be non-negative, found `{t_end}`"),
        ));
    }

    let output_every = match doc.take_u64("output_every")? {
        Some((n, line)) => {
            if n == 0 {
                return Err(FdfError::config_at(
                    line,
                    "output_every",
                    "must be at least 1",
                ));
            }
            n
        }
        None => 100,
    };

    let seed = doc.take_u64("seed")?.map(|(s, _)| s).unwrap_or(0);

    let snapshot_times = match doc.take("snapshot_times") {
        None => Vec::new(),
        Some((v, line)) => {
            let mut times = Vec::new();
            for part in v.split(',') {
                let part = part.trim();
                let t: f64 = part.parse().map_err(|_| {
                    FdfError::config_at(
                        line,
                        "snapshot_times",
                        format!("expected a comma-separated list of numbers, found `{part}`"),
                    )
                })?;
                if !t.is_finite() || t < 0.0 || t > t_end {
                    return Err(FdfError::config_at(
                        line,
                        "snapshot_times",
                        format!("time `{part}` is outside [0, {t_end}]"),
                    ));
                }
                times.push(t);
            }
            times
        }
    };

    let (init_name, init_line) = doc
        .take("init")
        .ok_or_else(|| FdfError::config_key("init", "required key is missing"))?;
    let init = match init_name.as_str() {
        "gaussian" => InitialData::Gaussian {
            amplitude: doc.require_f64("init.amplitude")?.0,
            sigma: doc.require_positive_f64("init.sigma")?,
        },
        "sech" => InitialData::Sech {
            amplitude: doc.require_f64("init.amplitude")?.0,
            width: doc.require_positive_f64("init.width")?,
        },
        "bandlimited" => {
            let (amplitude, amp_line) = doc.require_f64("init.amplitude")?;
            if amplitude < 0.0 {
                return Err(FdfError::config_at(
                    amp_line,
                    "init.amplitude",
                    format!("must be non-negative, found `{amplitude}`"),
                ));
            }
            let (jmax, jmax_line) = doc
                .take_u64("init.jmax")?
                .ok_or_else(|| FdfError::config_key("init.jmax", "required key is missing"))?;
            if jmax == 0 {
                return Err(FdfError::config_at(
                    jmax_line,
                    "init.jmax",
                    "must be at least 1",
                ));
            }
            InitialData::Bandlimited {
                amplitude,
                jmax: jmax as usize,
            }
        }
        "phiN" => InitialData::PhiN {
            carrier: doc.require_positive_f64("init.carrier")?,
            gamma: doc.require_positive_f64("init.gamma")?,
            s: doc.require_f64("init.s")?.0,
        },
        _ => {
            return Err(FdfError::config_at(
                init_line,
                "init",
                format!(
                    "unknown initial data `{init_name}`; expected gaussian, sech, \
                     bandlimited, or phiN"
                ),
            ));
        }
    };

    doc.reject_leftovers()?;

    Ok(SimConfig {
        equation,
        delta,
        k,
        sign,
        grid_n,
        grid_length,
        dt,
        t_end,
        output_every,
        snapshot_times,
        init,
        seed,
    })
}
