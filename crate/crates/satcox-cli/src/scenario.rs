//! Plain-text scenario files.
//!
//! A scenario file is a sequence of `key = value` lines mirroring
//! [`ScenarioConfig`], with human units at the boundary: geometry as
//! altitudes above the mean Earth radius and link budgets in dB. `#`
//! starts a comment, blank lines are skipped, and every key is optional —
//! omitted keys keep the built-in defaults, which are exactly the standard
//! simulation setting. Unknown keys, duplicate keys, and malformed values
//! are rejected with the offending 1-based line number.
//!
//! Recognized keys (defaults in parentheses):
//!
//! - `lambda` (25) — mean number of orbits
//! - `mu` (25) — mean satellites per orbit
//! - `platform` (`on`) — aerial-platform relay tier, `on` or `off`
//! - `platform_altitude_km` (20), `satellite_altitude_km` (550)
//! - `angular_speed_rad_s` (0.0011) — satellite angular speed ν
//! - `sat_power_dbm` (30), `sat_gain_db` (26), `sat_bandwidth_hz` (1e7),
//!   `sat_noise_dbm_hz` (−174), `sat_path_loss_exp` (2) — the
//!   platform↔satellite link budget
//! - `ground_power_dbm`, `ground_gain_db`, `ground_bandwidth_hz`,
//!   `ground_noise_dbm_hz`, `ground_path_loss_exp` — the platform↔gateway
//!   link budget, same defaults
//! - `fading` (`nakagami`) — `nakagami`, `shadowed-rice`, or `none`
//! - `fading_m` (1), `fading_omega` (1) — Nakagami shape and mean power
//! - `fading_b`, `fading_m_tilde`, `fading_omega_tilde` — shadowed-Rice
//!   parameters, required with that family
//! - `lambda_g` — terrestrial node density; enters no metric and is only
//!   echoed into CSV output as an annotation

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use satcox::analysis::{LinkBudget, ScenarioConfig};
use satcox::coxnet::Densities;
use satcox::fading::FadingModel;
use satcox::geometry::NetworkGeometry;

/// A parse or validation failure, anchored to a 1-based line where one
/// line is responsible.
#[derive(Debug)]
pub struct ScenarioError {
    line: Option<usize>,
    message: String,
}

impl ScenarioError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn unanchored(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    /// Line the error is anchored to, if any.
    pub fn line(&self) -> Option<usize> {
        self.line
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "scenario line {n}: {}", self.message),
            None => write!(f, "scenario: {}", self.message),
        }
    }
}

impl std::error::Error for ScenarioError {}

/// A fully resolved scenario: the evaluation config plus the terrestrial
/// density annotation that rides along into CSV output.
#[derive(Clone, Copy, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig<f64>,
    /// Terrestrial node density λ_g; no metric depends on it.
    pub lambda_g: Option<f64>,
}

impl Scenario {
    /// The built-in defaults (the standard simulation setting).
    pub fn table1() -> Self {
        Self {
            config: ScenarioConfig::table1(),
            lambda_g: None,
        }
    }

    /// Reads and parses a scenario file.
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|e| {
            ScenarioError::unanchored(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Parses scenario text.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        build(tokenize(text)?)
    }
}

const KEYS: &[&str] = &[
    "lambda",
    "mu",
    "platform",
    "platform_altitude_km",
    "satellite_altitude_km",
    "angular_speed_rad_s",
    "sat_power_dbm",
    "sat_gain_db",
    "sat_bandwidth_hz",
    "sat_noise_dbm_hz",
    "sat_path_loss_exp",
    "ground_power_dbm",
    "ground_gain_db",
    "ground_bandwidth_hz",
    "ground_noise_dbm_hz",
    "ground_path_loss_exp",
    "fading",
    "fading_m",
    "fading_omega",
    "fading_b",
    "fading_m_tilde",
    "fading_omega_tilde",
    "lambda_g",
];

/// Key → (raw value, 1-based line).
type Entries = HashMap<&'static str, (String, usize)>;

/// A numeric entry with the line it came from, for error anchoring.
type Numeric = Option<(f64, usize)>;

fn tokenize(text: &str) -> Result<Entries, ScenarioError> {
    let mut entries = Entries::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(ScenarioError::at(
                line,
                format!("expected `key = value`, got `{stripped}`"),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(canon) = KEYS.iter().copied().find(|k| *k == key) else {
            return Err(ScenarioError::at(line, format!("unknown key `{key}`")));
        };
        if value.is_empty() {
            return Err(ScenarioError::at(line, format!("key `{key}` has an empty value")));
        }
        if entries.insert(canon, (value.to_owned(), line)).is_some() {
            return Err(ScenarioError::at(line, format!("duplicate key `{key}`")));
        }
    }
    Ok(entries)
}

fn take_f64(entries: &mut Entries, key: &str) -> Result<Numeric, ScenarioError> {
    let Some((text, line)) = entries.remove(key) else {
        return Ok(None);
    };
    let value: f64 = text
        .parse()
        .map_err(|_| ScenarioError::at(line, format!("key `{key}`: `{text}` is not a number")))?;
    if !value.is_finite() {
        return Err(ScenarioError::at(line, format!("key `{key}` must be finite")));
    }
    Ok(Some((value, line)))
}

/// Maps a domain error from a constructor onto the last explicit line that
/// fed it, so range failures still point into the file when they can.
fn anchored(err: satcox::Error, sources: &[Numeric]) -> ScenarioError {
    ScenarioError {
        line: sources.iter().flatten().map(|&(_, l)| l).max(),
        message: err.to_string(),
    }
}

fn value_or(entry: Numeric, default: f64) -> f64 {
    entry.map_or(default, |(v, _)| v)
}

fn reject_inapplicable(
    family: &str,
    params: &[(&str, Numeric)],
) -> Result<(), ScenarioError> {
    for (name, entry) in params {
        if let Some((_, line)) = entry {
            return Err(ScenarioError::at(
                *line,
                format!("key `{name}` does not apply to fading `{family}`"),
            ));
        }
    }
    Ok(())
}

fn take_link(
    entries: &mut Entries,
    prefix: &str,
    default: LinkBudget<f64>,
) -> Result<LinkBudget<f64>, ScenarioError> {
    let power = take_f64(entries, &format!("{prefix}_power_dbm"))?;
    let gain = take_f64(entries, &format!("{prefix}_gain_db"))?;
    let bandwidth = take_f64(entries, &format!("{prefix}_bandwidth_hz"))?;
    let noise = take_f64(entries, &format!("{prefix}_noise_dbm_hz"))?;
    let alpha = take_f64(entries, &format!("{prefix}_path_loss_exp"))?;
    LinkBudget::new(
        value_or(power, default.rx_power_at_1m_dbm()),
        value_or(gain, default.aggregate_gain_db()),
        value_or(bandwidth, default.bandwidth_hz()),
        value_or(noise, default.noise_density_dbm_hz()),
        value_or(alpha, default.path_loss_exponent()),
    )
    .map_err(|e| anchored(e, &[power, gain, bandwidth, noise, alpha]))
}

fn build(mut entries: Entries) -> Result<Scenario, ScenarioError> {
    let defaults = ScenarioConfig::<f64>::table1();

    let lambda = take_f64(&mut entries, "lambda")?;
    let mu = take_f64(&mut entries, "mu")?;
    let densities = Densities::new(
        value_or(lambda, defaults.densities.mean_orbits()),
        value_or(mu, defaults.densities.mean_sats_per_orbit()),
    )
    .map_err(|e| anchored(e, &[lambda, mu]))?;

    let platform_alt = take_f64(&mut entries, "platform_altitude_km")?;
    let satellite_alt = take_f64(&mut entries, "satellite_altitude_km")?;
    let nu = take_f64(&mut entries, "angular_speed_rad_s")?;
    let geom = NetworkGeometry::from_altitudes(
        value_or(platform_alt, defaults.geom.platform_altitude_km()),
        value_or(satellite_alt, defaults.geom.satellite_altitude_km()),
        value_or(nu, defaults.geom.satellite_angular_speed_rad_s()),
    )
    .map_err(|e| anchored(e, &[platform_alt, satellite_alt, nu]))?;

    let platform_enabled = match entries.remove("platform") {
        None => defaults.platform_enabled,
        Some((text, line)) => match text.as_str() {
            "on" => true,
            "off" => false,
            other => {
                return Err(ScenarioError::at(
                    line,
                    format!("key `platform` takes `on` or `off`, got `{other}`"),
                ))
            }
        },
    };

    let sat_link = take_link(&mut entries, "sat", defaults.sat_link)?;
    let platform_link = take_link(&mut entries, "ground", defaults.platform_link)?;

    let family = entries.remove("fading");
    let m = take_f64(&mut entries, "fading_m")?;
    let omega = take_f64(&mut entries, "fading_omega")?;
    let b = take_f64(&mut entries, "fading_b")?;
    let m_tilde = take_f64(&mut entries, "fading_m_tilde")?;
    let omega_tilde = take_f64(&mut entries, "fading_omega_tilde")?;
    let family_line = family.as_ref().map(|&(_, l)| l);
    let family_name = family.as_ref().map_or("nakagami", |(t, _)| t.as_str());
    let fading = match family_name {
        "nakagami" => {
            reject_inapplicable(
                "nakagami",
                &[
                    ("fading_b", b),
                    ("fading_m_tilde", m_tilde),
                    ("fading_omega_tilde", omega_tilde),
                ],
            )?;
            FadingModel::nakagami(value_or(m, 1.0), value_or(omega, 1.0))
                .map_err(|e| anchored(e, &[m, omega]))?
        }
        "none" => {
            reject_inapplicable(
                "none",
                &[
                    ("fading_m", m),
                    ("fading_omega", omega),
                    ("fading_b", b),
                    ("fading_m_tilde", m_tilde),
                    ("fading_omega_tilde", omega_tilde),
                ],
            )?;
            FadingModel::no_fading()
        }
        "shadowed-rice" => {
            reject_inapplicable("shadowed-rice", &[("fading_m", m), ("fading_omega", omega)])?;
            let need = |name: &str, entry: Numeric| {
                entry.map(|(v, _)| v).ok_or_else(|| ScenarioError {
                    line: family_line,
                    message: format!("fading `shadowed-rice` requires `{name}`"),
                })
            };
            FadingModel::shadowed_rice(
                need("fading_b", b)?,
                need("fading_m_tilde", m_tilde)?,
                need("fading_omega_tilde", omega_tilde)?,
            )
            .map_err(|e| anchored(e, &[b, m_tilde, omega_tilde]))?
        }
        other => {
            let line = family_line.expect("non-default family came from a line");
            return Err(ScenarioError::at(
                line,
                format!("unknown fading family `{other}` (expected nakagami, shadowed-rice, or none)"),
            ));
        }
    };

    let lambda_g = take_f64(&mut entries, "lambda_g")?;
    if let Some((v, line)) = lambda_g {
        if v <= 0.0 {
            return Err(ScenarioError::at(line, "key `lambda_g` must be positive"));
        }
    }

    debug_assert!(entries.is_empty(), "tokenizer admitted an unhandled key");
    Ok(Scenario {
        config: ScenarioConfig {
            geom,
            densities,
            platform_enabled,
            sat_link,
            platform_link,
            fading,
        },
        lambda_g: lambda_g.map(|(v, _)| v),
    })
}
