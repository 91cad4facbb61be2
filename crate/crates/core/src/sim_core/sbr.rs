use std::io::{BufRead, Write};
use std::path::Path;

use crate::{Error, Result};

/// Oversampled single-bit response of the channel (and any CTLE).
///
/// `samples[cursor_index]` is the main-cursor peak. A time offset `t` in UI
/// relative to the peak maps to the fractional index `cursor_index + t * oversampling`;
/// values in between samples are linearly interpolated and the response is
/// zero outside the stored support.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleBitResponse {
    samples: Vec<f64>,
    oversampling: usize,
    cursor_index: usize,
}

pub const DEFAULT_OVERSAMPLING: usize = 32;

impl SingleBitResponse {
    pub fn new(samples: Vec<f64>, oversampling: usize, cursor_index: usize) -> Result<Self> {
        if oversampling < 8 {
            return Err(Error::range("oversampling", oversampling));
        }
        if cursor_index < oversampling || cursor_index + oversampling >= samples.len() {
            return Err(Error::range("cursor_index", cursor_index));
        }
        let sbr = Self {
            samples,
            oversampling,
            cursor_index,
        };
        let h0 = sbr.cursor(0);
        if !(h0 > 0.0) {
            return Err(Error::Config(format!("main cursor must be positive, got {h0}")));
        }
        let (lo, hi) = sbr.cursor_span();
        for k in lo..=hi {
            if k != 0 && sbr.cursor(k).abs() > h0 {
                return Err(Error::Config(format!(
                    "cursor h({k}) = {} dominates h0 = {h0}",
                    sbr.cursor(k)
                )));
            }
        }
        Ok(sbr)
    }

    /// Build from UI-spaced cursor values, `main` being the index of h0 in `taps`.
    /// Adjacent cursors are joined linearly, with zero one UI beyond each end.
    pub fn from_taps(taps: &[f64], main: usize, oversampling: usize) -> Result<Self> {
        if main >= taps.len() {
            return Err(Error::range("main tap index", main));
        }
        let mut pts = Vec::with_capacity(taps.len() + 2);
        pts.push(0.0);
        pts.extend_from_slice(taps);
        pts.push(0.0);
        let os = oversampling;
        let mut samples = Vec::with_capacity((pts.len() - 1) * os + 1);
        for w in pts.windows(2) {
            for j in 0..os {
                let f = j as f64 / os as f64;
                samples.push(w[0] * (1.0 - f) + w[1] * f);
            }
        }
        samples.push(0.0);
        Self::new(samples, os, (main + 1) * os)
    }

    /// Unit NRZ pulse through two coincident real poles placed so the channel
    /// loss at Nyquist equals `loss_db`, normalized so the peak is `peak` volts.
    pub fn two_pole_lowpass(loss_db: f64, peak: f64, span_ui: usize, oversampling: usize) -> Result<Self> {
        if !(loss_db > 0.0) || span_ui < 4 {
            return Err(Error::Config(format!(
                "two-pole template needs loss > 0 dB and span >= 4 UI (got {loss_db}, {span_ui})"
            )));
        }
        // |H(f_nyq)| = 1 / (1 + (f_nyq/fp)^2) for two coincident poles
        let ratio = 10f64.powf(loss_db / 20.0) - 1.0;
        let fp = 0.5 / ratio.sqrt(); // cycles per UI
        let tau = 1.0 / (2.0 * std::f64::consts::PI * fp); // UI
                                                           // step response of two coincident poles: 1 - (1 + t/tau) e^{-t/tau}
        let step = |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                1.0 - (1.0 + t / tau) * (-t / tau).exp()
            }
        };
        let os = oversampling;
        let n = span_ui * os + 1;
        let mut samples: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / os as f64 - 1.0; // pulse starts one UI in
                step(t) - step(t - 1.0)
            })
            .collect();
        let (imax, vmax) = argmax(&samples);
        samples.iter_mut().for_each(|s| *s *= peak / vmax);
        Self::new(samples, os, imax)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn cursor_index(&self) -> usize {
        self.cursor_index
    }

    /// Response at `t` UI relative to the main-cursor peak.
    #[inline]
    pub fn value_at(&self, t: f64) -> f64 {
        let x = self.cursor_index as f64 + t * self.oversampling as f64;
        if x < 0.0 {
            return 0.0;
        }
        let i = x.floor() as usize;
        if i + 1 >= self.samples.len() {
            return if i + 1 == self.samples.len() && x == i as f64 {
                self.samples[i]
            } else {
                0.0
            };
        }
        let f = x - i as f64;
        self.samples[i] * (1.0 - f) + self.samples[i + 1] * f
    }

    /// Cursor h_k at the nominal sampling instant.
    pub fn cursor(&self, k: i64) -> f64 {
        self.value_at(k as f64)
    }

    /// Cursor h_k when sampling `phase` UI after the peak.
    pub fn cursor_at(&self, k: i64, phase: f64) -> f64 {
        self.value_at(k as f64 + phase)
    }

    /// Inclusive range of cursor indices with any support at phases in [-1, 1).
    pub fn cursor_span(&self) -> (i64, i64) {
        let os = self.oversampling as i64;
        let c = self.cursor_index as i64;
        let last = self.samples.len() as i64 - 1;
        (-(c / os) - 1, (last - c) / os + 1)
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn with_samples(samples: Vec<f64>, oversampling: usize) -> Result<Self> {
        let (imax, _) = argmax(&samples);
        Self::new(samples, oversampling, imax)
    }

    /// Header line `oversampling=<n>,cursor_index=<i>` then one voltage per line.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let err = |msg: String| Error::SbrFormat {
            path: path.to_path_buf(),
            msg,
        };
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = file.lines();
        let header = lines.next().ok_or_else(|| err("empty file".into()))??;
        let mut os = None;
        let mut cursor = None;
        for field in header.trim().trim_start_matches('#').split(',') {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| err(format!("bad header field {field:?}")))?;
            let v: usize = v.trim().parse().map_err(|_| err(format!("bad value in {field:?}")))?;
            match k.trim() {
                "oversampling" => os = Some(v),
                "cursor_index" => cursor = Some(v),
                other => return Err(err(format!("unknown header key {other:?}"))),
            }
        }
        let os = os.ok_or_else(|| err("missing oversampling".into()))?;
        let cursor = cursor.ok_or_else(|| err("missing cursor_index".into()))?;
        let body = lines.collect::<std::io::Result<Vec<_>>>()?.join("\n");
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(body.as_bytes());
        let mut samples = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let v = rec.get(0).ok_or_else(|| err("empty row".into()))?;
            samples.push(v.trim().parse().map_err(|_| err(format!("bad sample {v:?}")))?);
        }
        Self::new(samples, os, cursor)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            f,
            "oversampling={},cursor_index={}",
            self.oversampling, self.cursor_index
        )?;
        for s in &self.samples {
            writeln!(f, "{s:e}")?;
        }
        Ok(())
    }
}

fn argmax(xs: &[f64]) -> (usize, f64) {
    xs.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
    )
}
