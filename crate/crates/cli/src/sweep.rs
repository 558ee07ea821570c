//! Convergence tables: one Gauss-Bonnet experiment over N, theta or tol.

use std::fmt;
use std::str::FromStr;

use crate::config::{Config, ConfigError, Experiment, DEFAULT_THETA};
use crate::run::{gauss_bonnet_point, SweepPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    N,
    Theta,
    Tol,
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" | "n" => Ok(Param::N),
            "theta" => Ok(Param::Theta),
            "tol" => Ok(Param::Tol),
            _ => Err(format!(
                "unknown sweep parameter {s:?} (expected N, theta or tol)"
            )),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::N => "N",
            Param::Theta => "theta",
            Param::Tol => "tol",
        })
    }
}

pub struct Row {
    pub param: f64,
    pub point: Result<SweepPoint, String>,
    /// The experiment's `max_abs` bound, when it has one, is met.
    pub within_bound: bool,
}

/// Runs the named (or first) Gauss-Bonnet experiment once per value.
/// With `fail_fast`, stops after the first row outside the bound.
pub fn sweep(
    cfg: &Config,
    experiment: Option<&str>,
    param: Param,
    values: Option<&[f64]>,
    oracle_q: usize,
    fail_fast: bool,
) -> Result<Vec<Row>, ConfigError> {
    let found = cfg.experiments.iter().find(|e| {
        matches!(e, Experiment::GaussBonnet { .. })
            && experiment.is_none_or(|name| e.name() == name)
    });
    let Some(Experiment::GaussBonnet {
        metric,
        radii,
        tol,
        max_abs,
        ..
    }) = found
    else {
        return Err(ConfigError(match experiment {
            Some(name) => format!("no gauss_bonnet experiment named {name:?}"),
            None => "the config has no gauss_bonnet experiment to sweep".into(),
        }));
    };
    let top = *radii.iter().max().expect("radii validated non-empty");
    let defaults: Vec<f64> = match param {
        Param::N => radii.iter().map(|&n| n as f64).collect(),
        Param::Theta => vec![0.2, 1.0 / 3.0, DEFAULT_THETA],
        Param::Tol => vec![1e-6, 1e-8, 1e-10, 1e-12],
    };
    let values = values.map(<[f64]>::to_vec).unwrap_or(defaults);
    for &v in &values {
        let ok = match param {
            Param::N => v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64,
            Param::Theta => (0.0..1.0).contains(&v),
            Param::Tol => v.is_finite() && v > 0.0,
        };
        if !ok {
            return Err(ConfigError(format!("--values: {v} is not a valid {param}")));
        }
    }
    let mut rows = Vec::new();
    for &v in &values {
        let (theta, radius, t) = match param {
            Param::N => (cfg.theta, v as u32, *tol),
            Param::Theta => (v, top, *tol),
            Param::Tol => (cfg.theta, top, v),
        };
        let point =
            gauss_bonnet_point(metric, theta, radius, t, oracle_q).map_err(|e| e.to_string());
        let within_bound = match (&point, max_abs) {
            (Ok(p), Some(limit)) => p.abs <= *limit,
            (Ok(_), None) => true,
            (Err(_), _) => false,
        };
        rows.push(Row {
            param: v,
            point,
            within_bound,
        });
        if fail_fast && !within_bound {
            break;
        }
    }
    Ok(rows)
}

pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "param",
        "gb_value_re",
        "gb_value_im",
        "tail_mass",
        "max_residual",
        "seconds",
    ])?;
    for r in rows {
        let fields = match &r.point {
            Ok(p) => [
                p.value[0],
                p.value[1],
                p.tail_mass,
                p.max_residual,
                p.seconds,
            ],
            Err(_) => [f64::NAN; 5],
        };
        let mut rec = vec![r.param.to_string()];
        rec.extend(fields.iter().map(|x| format!("{x:e}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
