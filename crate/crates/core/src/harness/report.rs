use serde::{Deserialize, Serialize};

/// Per-lane results over the measurement window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaneReport {
    pub lane: usize,
    /// Mean sampling phase relative to the main-cursor peak, UI.
    pub lock_phase_ui: f64,
    pub lock_phase_std_ui: f64,
    pub dlev_code: u8,
    pub pdlev_code: u8,
    pub pdlev_volts: f64,
    pub dfe_tap_volts: f64,
    pub k_ratio: f64,
    pub pi_code: u32,
    pub residual_ppm: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub slips: u64,
    pub ups: u64,
    pub dns: u64,
    /// Full vertical opening over all sampled instants, volts.
    pub vem_measured: f64,
    /// Full worst-case opening from the cursor oracle at `lock_phase_ui`, volts.
    pub vem_oracle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalReport {
    pub mean_division_ratio: f64,
    pub final_frac_ctrl: f64,
    pub k_dcdl_rel: f64,
    pub dcw_clamp_count: u64,
    pub integral_saturated: bool,
    pub k_floor_hit: bool,
    pub fdiv_cycles: u64,
}

/// Cursor-oracle reference points for the configured channel and DFE tap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub crossing_phase_ui: Option<f64>,
    pub argmax_vem_phase_ui: f64,
    /// Full opening at the argmax, volts.
    pub vem_at_argmax: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub config_hash: String,
    pub n_ui: u64,
    pub warmup_ui: u64,
    pub lanes: Vec<LaneReport>,
    pub global: GlobalReport,
    pub oracle: OracleReport,
    pub loss_of_lock: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat `key=value` lines.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: String, v: String| {
            out.push_str(&k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("seed".into(), self.seed.to_string());
        kv("config_hash".into(), self.config_hash.clone());
        kv("n_ui".into(), self.n_ui.to_string());
        kv("warmup_ui".into(), self.warmup_ui.to_string());
        kv("loss_of_lock".into(), self.loss_of_lock.to_string());
        kv(
            "mean_division_ratio".into(),
            format!("{:.6}", self.global.mean_division_ratio),
        );
        kv("k_dcdl_rel".into(), format!("{:.6}", self.global.k_dcdl_rel));
        if let Some(x) = self.oracle.crossing_phase_ui {
            kv("oracle.crossing_phase_ui".into(), format!("{x:.5}"));
        }
        kv(
            "oracle.argmax_vem_phase_ui".into(),
            format!("{:.5}", self.oracle.argmax_vem_phase_ui),
        );
        kv(
            "oracle.vem_at_argmax".into(),
            format!("{:.5}", self.oracle.vem_at_argmax),
        );
        for l in &self.lanes {
            let p = format!("lane{}", l.lane);
            kv(format!("{p}.lock_phase_ui"), format!("{:.5}", l.lock_phase_ui));
            kv(format!("{p}.k_ratio"), format!("{:.4}", l.k_ratio));
            kv(format!("{p}.pdlev_code"), l.pdlev_code.to_string());
            kv(format!("{p}.dlev_code"), l.dlev_code.to_string());
            kv(format!("{p}.residual_ppm"), format!("{:.4}", l.residual_ppm));
            kv(format!("{p}.ber"), format!("{:.3e}", l.ber));
            kv(format!("{p}.slips"), l.slips.to_string());
            kv(format!("{p}.vem_measured"), format!("{:.5}", l.vem_measured));
            kv(format!("{p}.vem_oracle"), format!("{:.5}", l.vem_oracle));
        }
        out
    }
}
