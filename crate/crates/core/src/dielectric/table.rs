//! Tabulated absorption spectra ε″(ω) and their extrapolation tails.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AngularFrequency;
use crate::error::{Error, Result};

pub const OMEGA_HEADER: &str = "omega_rad_per_s,eps_imag";
pub const WAVELENGTH_HEADER: &str = "wavelength_um,eps_imag";

/// Extrapolation of ε″ below the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowTail {
    /// ε″ ∝ 1/ω, the free-carrier divergence of a metal.
    DrudeLike,
    /// ε″ falls linearly to zero at ω = 0, as for an insulator.
    LinearToZero,
    /// No absorption below the table.
    Zero,
}

impl LowTail {
    /// Metals absorb more toward low frequency; insulators less.
    pub fn infer(eps_imag: &[f64]) -> LowTail {
        match eps_imag {
            [a, b, ..] if *a > *b && *a > 0.0 => LowTail::DrudeLike,
            _ => LowTail::LinearToZero,
        }
    }
}

/// Power-law extrapolation ε″(ω) = ε″_last · (ω_last/ω)^exponent above the
/// last sample, truncated at `cutoff_factor · ω_last`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighTail {
    exponent: f64,
    cutoff_factor: f64,
}

impl HighTail {
    pub const DEFAULT_EXPONENT: f64 = 3.0;
    pub const DEFAULT_CUTOFF_FACTOR: f64 = 1e4;

    /// Rejects tails that decay slower than ω⁻².
    pub fn new(exponent: f64, cutoff_factor: f64) -> Result<Self> {
        if !(exponent >= 2.0) || !exponent.is_finite() {
            return Err(Error::Config(format!(
                "high tail exponent {exponent} does not give a convergent integral; need ε″ to fall at least as fast as ω^-2"
            )));
        }
        if !(cutoff_factor > 1.0) || !cutoff_factor.is_finite() {
            return Err(Error::Config(format!(
                "high tail cutoff factor must be finite and > 1, got {cutoff_factor}"
            )));
        }
        Ok(Self {
            exponent,
            cutoff_factor,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn cutoff_factor(&self) -> f64 {
        self.cutoff_factor
    }
}

impl Default for HighTail {
    fn default() -> Self {
        Self {
            exponent: Self::DEFAULT_EXPONENT,
            cutoff_factor: Self::DEFAULT_CUTOFF_FACTOR,
        }
    }
}

/// Sampled ε″(ω) with declared tails.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionTable {
    omega: Vec<f64>,
    eps_imag: Vec<f64>,
    ln_omega: Vec<f64>,
    low_tail: LowTail,
    high_tail: HighTail,
}

impl AbsorptionTable {
    /// `low_tail = None` picks [`LowTail::infer`].
    pub fn new(samples: Vec<(AngularFrequency, f64)>, low_tail: Option<LowTail>, high_tail: HighTail) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Config(format!(
                "absorption table needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        let (omega, eps_imag): (Vec<f64>, Vec<f64>) = samples.into_iter().map(|(w, e)| (w.value(), e)).unzip();
        if let Some(i) = omega.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Config(format!(
                "absorption table frequencies must be strictly increasing (rows {} and {})",
                i + 1,
                i + 2
            )));
        }
        if omega[0] <= 0.0 {
            return Err(Error::Config("absorption table frequencies must be > 0".into()));
        }
        if let Some(i) = eps_imag.iter().position(|e| !(*e >= 0.0) || !e.is_finite()) {
            return Err(Error::Config(format!(
                "eps_imag must be finite and non-negative (row {}: {})",
                i + 1,
                eps_imag[i]
            )));
        }
        let low_tail = low_tail.unwrap_or_else(|| LowTail::infer(&eps_imag));
        let ln_omega = omega.iter().map(|w| w.ln()).collect();
        Ok(Self {
            omega,
            eps_imag,
            ln_omega,
            low_tail,
            high_tail,
        })
    }

    /// Samples `eps_imag(ω)` on `n` log-spaced points over `[omega_min, omega_max]`.
    pub fn sample_fn<F: Fn(f64) -> f64>(
        f: F,
        omega_min: f64,
        omega_max: f64,
        n: usize,
        low_tail: Option<LowTail>,
        high_tail: HighTail,
    ) -> Result<Self> {
        let samples = crate::grid::log_space(omega_min, omega_max, n)
            .into_iter()
            .map(|w| Ok((AngularFrequency::new(w)?, f(w))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, low_tail, high_tail)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omega
    }

    pub fn eps_imag(&self) -> &[f64] {
        &self.eps_imag
    }

    pub(crate) fn ln_omegas(&self) -> &[f64] {
        &self.ln_omega
    }

    pub fn low_tail(&self) -> LowTail {
        self.low_tail
    }

    pub fn high_tail(&self) -> HighTail {
        self.high_tail
    }

    pub fn first(&self) -> (f64, f64) {
        (self.omega[0], self.eps_imag[0])
    }

    pub fn last(&self) -> (f64, f64) {
        let n = self.omega.len() - 1;
        (self.omega[n], self.eps_imag[n])
    }

    /// Upper end of the high tail.
    pub fn cutoff(&self) -> f64 {
        self.last().0 * self.high_tail.cutoff_factor
    }

    pub fn with_high_tail(mut self, high_tail: HighTail) -> Self {
        self.high_tail = high_tail;
        self
    }

    /// ε″(ω) including tails; zero beyond the high-tail cutoff.
    pub fn absorption(&self, omega: f64) -> f64 {
        let (w0, e0) = self.first();
        let (wn, en) = self.last();
        if omega < w0 {
            return match self.low_tail {
                LowTail::DrudeLike => e0 * w0 / omega,
                LowTail::LinearToZero => e0 * omega / w0,
                LowTail::Zero => 0.0,
            };
        }
        if omega > wn {
            if omega > self.cutoff() {
                return 0.0;
            }
            return en * (wn / omega).powf(self.high_tail.exponent);
        }
        self.interpolate_ln(omega.ln())
    }

    /// Interpolates inside the table at `s = ln ω`: log-log between positive
    /// samples, linear in ln ω otherwise.
    pub(crate) fn interpolate_ln(&self, s: f64) -> f64 {
        let n = self.ln_omega.len();
        let i = self.ln_omega.partition_point(|x| *x <= s).clamp(1, n - 1);
        let (s0, s1) = (self.ln_omega[i - 1], self.ln_omega[i]);
        let (e0, e1) = (self.eps_imag[i - 1], self.eps_imag[i]);
        let t = (s - s0) / (s1 - s0);
        if e0 > 0.0 && e1 > 0.0 {
            (e0.ln() + t * (e1.ln() - e0.ln())).exp()
        } else {
            e0 + t * (e1 - e0)
        }
    }

    /// Reads a CSV with header `omega_rad_per_s,eps_imag` or
    /// `wavelength_um,eps_imag`. Wavelength rows are converted and re-sorted.
    pub fn read_csv<R: Read>(reader: R, low_tail: Option<LowTail>, high_tail: HighTail) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
        let by_wavelength = match header.as_str() {
            OMEGA_HEADER => false,
            WAVELENGTH_HEADER => true,
            other => {
                return Err(Error::Config(format!(
                    "unrecognised absorption table header `{other}`; expected `{OMEGA_HEADER}` or `{WAVELENGTH_HEADER}`"
                )))
            }
        };
        let mut samples = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Config(format!("row {}: expected 2 columns", row + 1)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("row {}: `{s}`: {e}", row + 1)))
            };
            let x = parse(&rec[0])?;
            let e = parse(&rec[1])?;
            let w = if by_wavelength {
                AngularFrequency::from_wavelength(x / 1e6)?
            } else {
                AngularFrequency::new(x)?
            };
            samples.push((w, e));
        }
        if by_wavelength {
            samples.sort_by(|a, b| a.0.value().total_cmp(&b.0.value()));
        }
        Self::new(samples, low_tail, high_tail)
    }

    pub fn load(path: &Path, low_tail: Option<LowTail>, high_tail: HighTail) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Config(format!("cannot open table {}: {e}", path.display())))?;
        Self::read_csv(file, low_tail, high_tail)
    }

    /// Writes the `omega_rad_per_s,eps_imag` form.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{OMEGA_HEADER}")?;
        for (o, e) in self.omega.iter().zip(&self.eps_imag) {
            writeln!(w, "{o:e},{e:e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(x: f64) -> AngularFrequency {
        AngularFrequency::new(x).unwrap()
    }

    #[test]
    fn rejects_short_unsorted_and_negative_tables() {
        let ht = HighTail::default();
        assert!(AbsorptionTable::new(vec![(w(1.0), 1.0)], None, ht).is_err());
        assert!(AbsorptionTable::new(vec![(w(2.0), 1.0), (w(1.0), 1.0)], None, ht).is_err());
        assert!(AbsorptionTable::new(vec![(w(1.0), 1.0), (w(1.0), 1.0)], None, ht).is_err());
        assert!(AbsorptionTable::new(vec![(w(1.0), -0.1), (w(2.0), 1.0)], None, ht).is_err());
    }

    #[test]
    fn slow_high_tail_is_a_config_error() {
        assert!(matches!(HighTail::new(1.5, 1e4), Err(Error::Config(_))));
        assert!(HighTail::new(2.0, 1e4).is_ok());
        assert!(HighTail::new(3.0, 1.0).is_err());
    }

    #[test]
    fn low_tail_inference() {
        assert_eq!(LowTail::infer(&[5.0, 2.0]), LowTail::DrudeLike);
        assert_eq!(LowTail::infer(&[1.0, 2.0]), LowTail::LinearToZero);
        assert_eq!(LowTail::infer(&[0.0, 0.0]), LowTail::LinearToZero);
    }

    #[test]
    fn interpolation_is_exact_for_power_laws() {
        let t = AbsorptionTable::sample_fn(|x| 3.0 * x.powf(-1.7), 1.0, 100.0, 5, None, HighTail::default()).unwrap();
        for x in [1.3, 7.7, 42.0] {
            let exact = 3.0 * f64::powf(x, -1.7);
            assert!((t.absorption(x) - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn tails_match_edges() {
        let t = AbsorptionTable::new(
            vec![(w(10.0), 4.0), (w(20.0), 2.0)],
            Some(LowTail::DrudeLike),
            HighTail::new(3.0, 10.0).unwrap(),
        )
        .unwrap();
        assert_eq!(t.absorption(5.0), 8.0);
        assert!((t.absorption(40.0) - 0.25).abs() < 1e-15);
        assert_eq!(t.absorption(201.0), 0.0);
    }

    #[test]
    fn wavelength_csv_is_converted_and_sorted() {
        let csv = "wavelength_um,eps_imag\n0.5,1.0\n1.0,2.0\n2.0,3.0\n";
        let t = AbsorptionTable::read_csv(csv.as_bytes(), None, HighTail::default()).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.omegas().windows(2).all(|p| p[1] > p[0]));
        assert_eq!(t.eps_imag(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn bad_header_is_rejected() {
        let csv = "omega,eps\n1,1\n2,1\n";
        assert!(matches!(
            AbsorptionTable::read_csv(csv.as_bytes(), None, HighTail::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let t = AbsorptionTable::sample_fn(|x| 1.0 / x, 1e12, 1e16, 9, None, HighTail::default()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = AbsorptionTable::read_csv(buf.as_slice(), None, HighTail::default()).unwrap();
        assert_eq!(t, back);
    }
}
