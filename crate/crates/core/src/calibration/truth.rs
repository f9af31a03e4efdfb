//! Ground-truth Casimir force curves for the simulated apparatus.

use std::fmt::Debug;
use std::io::Read;
use std::path::Path;

use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};
use crate::lifshitz::{ideal_sphere_plate_force, lifshitz_sphere_plate, ForceQuery, Geometry, QuadratureSettings};

/// |F_C| as a function of separation (meters → newtons).
pub trait ForceLaw: Send + Sync + Debug {
    fn casimir_force(&self, separation: f64) -> Result<f64>;

    fn describe(&self) -> String {
        format!("{self:?}")
    }
}

/// π³ħcR/(360d³).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealMetalPfa {
    pub sphere_radius: f64,
}

impl IdealMetalPfa {
    pub fn new(sphere_radius: f64) -> Self {
        Self { sphere_radius }
    }
}

impl ForceLaw for IdealMetalPfa {
    fn casimir_force(&self, separation: f64) -> Result<f64> {
        Geometry::new(self.sphere_radius, separation)?;
        Ok(ideal_sphere_plate_force(self.sphere_radius, separation))
    }
}

/// Full Lifshitz evaluation at each requested separation.
#[derive(Debug, Clone, PartialEq)]
pub struct LifshitzCurve {
    pub sphere: DielectricModel,
    pub plate: DielectricModel,
    pub sphere_radius: f64,
    pub settings: QuadratureSettings,
}

impl ForceLaw for LifshitzCurve {
    fn casimir_force(&self, separation: f64) -> Result<f64> {
        let q = ForceQuery::new(
            Geometry::new(self.sphere_radius, separation)?,
            self.sphere.clone(),
            self.plate.clone(),
            self.settings,
        );
        Ok(lifshitz_sphere_plate(&q)?.force)
    }

    fn describe(&self) -> String {
        format!("lifshitz({}, {})", self.sphere.kind(), self.plate.kind())
    }
}

/// Force interpolated from a table, log-log where the force is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCurve {
    separations: Vec<f64>,
    forces: Vec<f64>,
}

impl TabulatedCurve {
    pub fn new(separations: Vec<f64>, forces: Vec<f64>) -> Result<Self> {
        if separations.len() != forces.len() || separations.len() < 2 {
            return Err(Error::Config(
                "force table needs at least 2 (separation, force) rows".into(),
            ));
        }
        if !separations.windows(2).all(|w| w[1] > w[0]) || separations[0] <= 0.0 {
            return Err(Error::Config(
                "force table separations must be positive and increasing".into(),
            ));
        }
        Ok(Self { separations, forces })
    }

    /// F ≡ 0 everywhere.
    pub fn zero() -> Self {
        Self {
            separations: vec![f64::MIN_POSITIVE, f64::MAX],
            forces: vec![0.0, 0.0],
        }
    }

    /// Reads a CSV whose first two columns are `separation_nm,force_pN`
    /// (the sweep output format qualifies).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("separation_nm") || headers.get(1) != Some("force_pN") {
            return Err(Error::Config(format!(
                "force table header must start with `separation_nm,force_pN`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let (mut d, mut f) = (Vec::new(), Vec::new());
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Config(format!("force table row {}: bad column {}", row + 1, i + 1)))
            };
            d.push(parse(0)? / 1e9);
            f.push(parse(1)? / 1e12);
        }
        Self::new(d, f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Config(format!("cannot open force table {}: {e}", path.display())))?;
        Self::read_csv(file)
    }
}

impl ForceLaw for TabulatedCurve {
    fn casimir_force(&self, separation: f64) -> Result<f64> {
        let (lo, hi) = (self.separations[0], self.separations[self.separations.len() - 1]);
        if !(separation >= lo && separation <= hi) {
            return Err(Error::Domain(format!(
                "separation {separation:e} m outside force table [{lo:e}, {hi:e}]"
            )));
        }
        let i = self
            .separations
            .partition_point(|s| *s <= separation)
            .clamp(1, self.separations.len() - 1);
        let (d0, d1) = (self.separations[i - 1], self.separations[i]);
        let (f0, f1) = (self.forces[i - 1], self.forces[i]);
        if f0 > 0.0 && f1 > 0.0 {
            let t = (separation / d0).ln() / (d1 / d0).ln();
            Ok(f0 * (f1 / f0).powf(t))
        } else {
            let t = (separation - d0) / (d1 - d0);
            Ok(f0 + t * (f1 - f0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates_power_law_exactly() {
        let d: Vec<f64> = [70.0, 100.0, 200.0, 400.0].iter().map(|x| x / 1e9).collect();
        let f: Vec<f64> = d.iter().map(|x| ideal_sphere_plate_force(1e-4, *x)).collect();
        let t = TabulatedCurve::new(d, f).unwrap();
        let got = t.casimir_force(150e-9).unwrap();
        let exact = ideal_sphere_plate_force(1e-4, 150e-9);
        assert!(((got - exact) / exact).abs() < 1e-12);
        assert!(t.casimir_force(500e-9).is_err());
    }

    #[test]
    fn table_csv() {
        let csv = "separation_nm,force_pN,est_error_pN,node_count\n100,272,0.1,5\n200,34,0.1,5\n";
        let t = TabulatedCurve::read_csv(csv.as_bytes()).unwrap();
        assert!((t.casimir_force(100e-9).unwrap() - 272e-12).abs() < 1e-20);
        assert!(TabulatedCurve::read_csv("d,f\n1,2\n3,4\n".as_bytes()).is_err());
    }

    #[test]
    fn zero_curve() {
        assert_eq!(TabulatedCurve::zero().casimir_force(1e-7).unwrap(), 0.0);
    }
}
