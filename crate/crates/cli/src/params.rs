//! Small textual parameters accepted by the flags: mirror models, sweeps, motions.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use casimir_inertia::time_domain::Motion;
use casimir_inertia::{MirrorModel, ReflectivityTable};
use serde::{Serialize, Serializer};

/// Splits `name:k=v,k=v` into the name and its key/value pairs.
fn split_params(s: &str) -> Result<(String, Vec<(String, f64)>), String> {
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, r),
        None => (s, ""),
    };
    let mut params = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in `{item}`"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("`{}` is not a number", v.trim()))?;
        params.push((k.trim().to_ascii_lowercase(), v));
    }
    Ok((name.trim().to_ascii_lowercase(), params))
}

fn take(params: &mut Vec<(String, f64)>, key: &str) -> Option<f64> {
    let i = params.iter().position(|(k, _)| k == key)?;
    Some(params.remove(i).1)
}

fn reject_rest(name: &str, params: &[(String, f64)]) -> Result<(), String> {
    match params.first() {
        Some((k, _)) => Err(format!("unknown parameter `{k}` for `{name}`")),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MirrorSpec {
    Perfect,
    Lorentzian { omega: Option<f64> },
    File(PathBuf),
}

impl FromStr for MirrorSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err("file: needs a path".into());
            }
            return Ok(MirrorSpec::File(PathBuf::from(path)));
        }
        let (name, mut params) = split_params(s)?;
        let spec = match name.as_str() {
            "perfect" => MirrorSpec::Perfect,
            "lorentzian" => MirrorSpec::Lorentzian {
                omega: take(&mut params, "omega"),
            },
            other => {
                return Err(format!(
                    "unknown mirror `{other}` (expected perfect|lorentzian|file:<path>)"
                ))
            }
        };
        reject_rest(&name, &params)?;
        Ok(spec)
    }
}

impl fmt::Display for MirrorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MirrorSpec::Perfect => f.write_str("perfect"),
            MirrorSpec::Lorentzian { omega: Some(w) } => write!(f, "lorentzian:omega={w}"),
            MirrorSpec::Lorentzian { omega: None } => f.write_str("lorentzian"),
            MirrorSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl Serialize for MirrorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl MirrorSpec {
    /// Builds the model; `default_omega` fills a bare `lorentzian`.
    pub fn build(&self, default_omega: Option<f64>) -> Result<MirrorModel, String> {
        match self {
            MirrorSpec::Perfect => Ok(MirrorModel::perfect()),
            MirrorSpec::Lorentzian { omega } => {
                let w = omega.or(default_omega).ok_or(
                    "lorentzian mirror needs a cutoff: lorentzian:omega=<value> or --omega",
                )?;
                MirrorModel::lorentzian(w).map_err(|e| e.to_string())
            }
            MirrorSpec::File(path) => {
                let table = ReflectivityTable::from_csv(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                Ok(MirrorModel::tabulated(table, path.display().to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Q,
    Omega,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub log: bool,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if !(parts.len() == 4 || parts.len() == 5) {
            return Err("expected <q|omega>:<min>:<max>:<steps>[:log]".into());
        }
        let param = match parts[0].to_ascii_lowercase().as_str() {
            "q" => SweepParam::Q,
            "omega" => SweepParam::Omega,
            other => return Err(format!("cannot sweep `{other}` (expected q or omega)")),
        };
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| format!("`{p}` is not a number"))
        };
        let min = num(parts[1])?;
        let max = num(parts[2])?;
        let steps: usize = parts[3]
            .parse()
            .map_err(|_| format!("`{}` is not a step count", parts[3]))?;
        let log = match parts.get(4).map(|p| p.to_ascii_lowercase()) {
            None => false,
            Some(p) if p == "log" => true,
            Some(p) if p == "lin" || p == "linear" => false,
            Some(p) => return Err(format!("unknown spacing `{p}` (expected log)")),
        };
        if !(min > 0.0 && max > 0.0 && min.is_finite() && max.is_finite()) {
            return Err("sweep bounds must be positive and finite".into());
        }
        if max < min {
            return Err("sweep max must not be below min".into());
        }
        if steps < 1 {
            return Err("sweep needs at least one step".into());
        }
        Ok(SweepSpec {
            param,
            min,
            max,
            steps,
            log,
        })
    }
}

impl SweepSpec {
    /// The `steps + 1` sweep values from `min` to `max`.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps as f64;
        (0..=self.steps)
            .map(|k| {
                let u = k as f64 / n;
                if self.log {
                    (self.min.ln() + u * (self.max / self.min).ln()).exp()
                } else {
                    self.min + u * (self.max - self.min)
                }
            })
            .collect()
    }
}

/// Generated trajectory. Unset fields take τ-scaled defaults once the cavity
/// is known.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MotionSpec {
    Rest,
    Pulse {
        amplitude: Option<f64>,
        start: Option<f64>,
        width: Option<f64>,
    },
    Sinusoid {
        amplitude: Option<f64>,
        omega: Option<f64>,
        ramp: Option<f64>,
    },
    Acceleration {
        a: Option<f64>,
        ramp: Option<f64>,
    },
    Velocity {
        v: Option<f64>,
        ramp: Option<f64>,
    },
}

impl FromStr for MotionSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, mut p) = split_params(s)?;
        let spec = match name.as_str() {
            "rest" => MotionSpec::Rest,
            "pulse" => MotionSpec::Pulse {
                amplitude: take(&mut p, "amplitude"),
                start: take(&mut p, "start"),
                width: take(&mut p, "width"),
            },
            "sinusoid" => MotionSpec::Sinusoid {
                amplitude: take(&mut p, "amplitude"),
                omega: take(&mut p, "omega"),
                ramp: take(&mut p, "ramp"),
            },
            "acceleration" => MotionSpec::Acceleration {
                a: take(&mut p, "a"),
                ramp: take(&mut p, "ramp"),
            },
            "velocity" => MotionSpec::Velocity {
                v: take(&mut p, "v"),
                ramp: take(&mut p, "ramp"),
            },
            other => {
                return Err(format!(
                    "unknown motion `{other}` (expected rest|pulse|sinusoid|acceleration|velocity)"
                ))
            }
        };
        reject_rest(&name, &p)?;
        Ok(spec)
    }
}

impl MotionSpec {
    /// Builds the motion for a cavity of separation `q` and delay `tau`,
    /// multiplied by `sign`.
    pub fn build(&self, q: f64, tau: f64, sign: f64) -> Result<Motion, String> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(format!(
                    "motion parameter `{name}` must be positive, got {v}"
                ))
            }
        };
        let motion = match *self {
            MotionSpec::Rest => Motion::Rest,
            MotionSpec::Pulse {
                amplitude,
                start,
                width,
            } => Motion::pulse(
                sign * amplitude.unwrap_or(1e-4 * q),
                start.unwrap_or(10.0 * tau),
                positive("width", width.unwrap_or(100.0 * tau))?,
            ),
            MotionSpec::Sinusoid {
                amplitude,
                omega,
                ramp,
            } => Motion::sinusoid(
                sign * amplitude.unwrap_or(1e-4 * q),
                omega.unwrap_or(0.1 / tau),
            )
            .switched(0.0, positive("ramp", ramp.unwrap_or(100.0 * tau))?),
            MotionSpec::Acceleration { a, ramp } => Motion::polynomial(vec![
                0.0,
                0.0,
                0.5 * sign * a.unwrap_or(1e-10 * q / (tau * tau)),
            ])
            .switched(0.0, positive("ramp", ramp.unwrap_or(100.0 * tau))?),
            MotionSpec::Velocity { v, ramp } => {
                Motion::polynomial(vec![0.0, sign * v.unwrap_or(1e-7 * q / tau)])
                    .switched(0.0, positive("ramp", ramp.unwrap_or(100.0 * tau))?)
            }
        };
        Ok(motion)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_specs_round_trip() {
        for s in [
            "perfect",
            "lorentzian",
            "lorentzian:omega=100",
            "file:r.csv",
        ] {
            assert_eq!(s.parse::<MirrorSpec>().unwrap().to_string(), s);
        }
        assert!("lorentzian:cutoff=3".parse::<MirrorSpec>().is_err());
        assert!("glass".parse::<MirrorSpec>().is_err());
    }

    #[test]
    fn bare_lorentzian_needs_a_cutoff() {
        let spec: MirrorSpec = "lorentzian".parse().unwrap();
        assert!(spec.build(None).is_err());
        assert_eq!(spec.build(Some(10.0)).unwrap().cutoff(), Some(10.0));
    }

    #[test]
    fn sweep_values() {
        let s: SweepSpec = "omega:1:100:2:log".parse().unwrap();
        let v = s.values();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 10.0).abs() < 1e-12);
        let s: SweepSpec = "q:1:2:4".parse().unwrap();
        assert_eq!(s.values(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn bad_sweeps_rejected() {
        for s in [
            "q:0:1:3",
            "q:1:2:0",
            "q:2:1:3",
            "x:1:2:3",
            "q:1:2",
            "q:1:2:3:cubic",
        ] {
            assert!(s.parse::<SweepSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn motion_specs() {
        let m: MotionSpec = "pulse:amplitude=1e-4,start=10,width=20".parse().unwrap();
        assert_eq!(
            m.build(1.0, 1.0, -1.0).unwrap(),
            Motion::pulse(-1e-4, 10.0, 20.0)
        );
        assert!("pulse:height=1".parse::<MotionSpec>().is_err());
        assert!("velocity:v=1e-7,ramp=0"
            .parse::<MotionSpec>()
            .unwrap()
            .build(1.0, 1.0, 1.0)
            .is_err());
    }
}
