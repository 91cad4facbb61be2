use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ScenarioConfig;
use super::engine::run;
use super::output::write_csv_rows;
use super::report::RunReport;
use crate::{Error, Result};

/// One sweep point: the value written at the parameter path and the run it produced.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub value: toml::Value,
    pub report: RunReport,
}

/// Parse a comma-separated list of TOML scalars.
pub fn parse_sweep_values(list: &str) -> Result<Vec<toml::Value>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let doc: toml::Table = toml::from_str(&format!("v = {s}"))?;
            Ok(doc["v"].clone())
        })
        .collect()
}

fn slot<'a>(root: &'a mut toml::Value, path: &str) -> Result<&'a mut toml::Value> {
    let mut cur = root;
    for key in path.split('.') {
        cur = cur
            .get_mut(key)
            .ok_or_else(|| Error::Config(format!("unknown parameter path `{path}` (at `{key}`)")))?;
    }
    match cur {
        toml::Value::Integer(_) | toml::Value::Float(_) | toml::Value::Boolean(_) | toml::Value::String(_) => Ok(cur),
        _ => Err(Error::Config(format!("parameter path `{path}` is not a scalar"))),
    }
}

/// Config for each point, validated before anything runs.
fn point_configs(base: &ScenarioConfig, path: &str, values: &[toml::Value]) -> Result<Vec<ScenarioConfig>> {
    if values.is_empty() {
        return Err(Error::Empty("sweep values"));
    }
    let root = toml::Value::try_from(base).map_err(Error::TomlSer)?;
    let mut probe = root.clone();
    slot(&mut probe, path)?;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut doc = root.clone();
            let s = slot(&mut doc, path)?;
            *s = match (&*s, v) {
                (toml::Value::Float(_), toml::Value::Integer(x)) => toml::Value::Float(*x as f64),
                _ => v.clone(),
            };
            let mut cfg: ScenarioConfig = doc.try_into()?;
            cfg.seed = base.seed.wrapping_add(i as u64);
            cfg.validate()?;
            Ok(cfg)
        })
        .collect()
}

/// Independent runs with `path` set to each value; seeds advance by point index.
pub fn sweep(base: &ScenarioConfig, path: &str, values: &[toml::Value]) -> Result<Vec<SweepPoint>> {
    let cfgs = point_configs(base, path, values)?;
    cfgs.par_iter()
        .zip(values.par_iter())
        .map(|(c, v)| {
            Ok(SweepPoint {
                value: v.clone(),
                report: run(c)?.report,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct Row<'a> {
    parameter: &'a str,
    value: String,
    seed: u64,
    lane: usize,
    lock_phase_ui: f64,
    k_ratio: f64,
    pdlev_code: u8,
    vem_measured: f64,
    vem_oracle: f64,
    residual_ppm: f64,
    ber: f64,
    mean_division_ratio: f64,
    loss_of_lock: bool,
}

pub fn write_sweep_csv(path: &Path, parameter: &str, points: &[SweepPoint]) -> Result<()> {
    let mut rows = Vec::new();
    for p in points {
        for l in &p.report.lanes {
            rows.push(Row {
                parameter,
                value: p.value.to_string(),
                seed: p.report.seed,
                lane: l.lane,
                lock_phase_ui: l.lock_phase_ui,
                k_ratio: l.k_ratio,
                pdlev_code: l.pdlev_code,
                vem_measured: l.vem_measured,
                vem_oracle: l.vem_oracle,
                residual_ppm: l.residual_ppm,
                ber: l.ber,
                mean_division_ratio: p.report.global.mean_division_ratio,
                loss_of_lock: p.report.loss_of_lock,
            });
        }
    }
    write_csv_rows(path, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse() {
        let v = parse_sweep_values("0, 1000,2500.5,true").unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], toml::Value::Integer(0));
        assert_eq!(v[2], toml::Value::Float(2500.5));
    }

    #[test]
    fn bad_path_fails_before_running() {
        let base = ScenarioConfig::default();
        let v = parse_sweep_values("1").unwrap();
        assert!(point_configs(&base, "clock.nope", &v).is_err());
        assert!(point_configs(&base, "clock", &v).is_err());
        assert!(point_configs(&base, "clock.ppm_offset", &[]).is_err());
    }

    #[test]
    fn integer_into_float_slot() {
        let base = ScenarioConfig::default();
        let v = parse_sweep_values("0,1000,2500").unwrap();
        let cfgs = point_configs(&base, "clock.ppm_offset", &v).unwrap();
        assert_eq!(
            cfgs.iter().map(|c| c.clock.ppm_offset).collect::<Vec<_>>(),
            vec![0.0, 1000.0, 2500.0]
        );
        assert_eq!(cfgs[2].seed, base.seed + 2);
    }

    #[test]
    fn invalid_value_rejected() {
        let base = ScenarioConfig::default();
        let v = parse_sweep_values("9").unwrap();
        assert!(point_configs(&base, "lanes", &v).is_err());
    }
}
