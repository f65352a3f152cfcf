//! Catalog ingestion: spectroscopic galaxy rows to typed Cartesian points.

use std::io::Read;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::model::{ObjectType, SpatialObject};

/// Speed of light, km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;
/// Hubble constant, km s⁻¹ Mpc⁻¹.
pub const DEFAULT_H0: f64 = 71.0;

/// u − r color at or above which a galaxy is "Early".
pub const EARLY_COLOR_CUT: f64 = 2.22;
/// r-band magnitude at or below which a galaxy is "Main" (else "LRG").
pub const MAIN_R_LIMIT: f64 = 17.77;
/// Slack on the color cut so decimal boundary values such as
/// 20.22 − 18.00 land on the inclusive side despite binary rounding.
pub const COLOR_TOLERANCE: f64 = 1e-9;
pub const ZCONF_CUT: f64 = 0.95;
const UNIT_NORM_TOLERANCE: f64 = 1e-6;

/// One spectroscopic catalog row. Extra CSV columns are ignored.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[allow(non_snake_case)]
pub struct CatalogRow {
    pub specObjID: String,
    pub z: f64,
    pub ra: f64,
    pub dec: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
    pub objType: i64,
    pub modelMag_u: f64,
    pub modelMag_r: f64,
    pub zConf: f64,
    pub zWarning: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbleParams {
    pub c: f64,
    pub h0: f64,
}

impl HubbleParams {
    pub fn new(c: f64, h0: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::input(format!("speed of light must be positive, got {c}")));
        }
        if !(h0.is_finite() && h0 > 0.0) {
            return Err(Error::input(format!("h0 must be positive, got {h0}")));
        }
        Ok(HubbleParams { c, h0 })
    }

    pub fn with_h0(h0: f64) -> Result<Self> {
        HubbleParams::new(SPEED_OF_LIGHT_KM_S, h0)
    }
}

impl Default for HubbleParams {
    fn default() -> Self {
        HubbleParams {
            c: SPEED_OF_LIGHT_KM_S,
            h0: DEFAULT_H0,
        }
    }
}

/// Which side of the 0.95 redshift-confidence cut is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZConfDirection {
    /// Accept `zConf < 0.95`.
    #[default]
    Lt,
    /// Accept `zConf >= 0.95`.
    Ge,
}

impl std::str::FromStr for ZConfDirection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lt" => Ok(ZConfDirection::Lt),
            "ge" => Ok(ZConfDirection::Ge),
            other => Err(Error::input(format!("zconf direction must be lt or ge, got {other}"))),
        }
    }
}

impl std::fmt::Display for ZConfDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ZConfDirection::Lt => "lt",
            ZConfDirection::Ge => "ge",
        })
    }
}

/// Hubble-law distance D ≈ c·z / H0, Mpc.
pub fn comoving_distance(z: f64, params: HubbleParams) -> Result<f64> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::input(format!("redshift must be a non-negative number, got {z}")));
    }
    Ok(params.c * z / params.h0)
}

/// (D·cx, D·cy, D·cz). Rejects direction vectors that are not unit length.
pub fn to_cartesian(row: &CatalogRow, params: HubbleParams) -> Result<[f64; 3]> {
    let norm = (row.cx * row.cx + row.cy * row.cy + row.cz * row.cz).sqrt();
    // written so that a NaN norm is rejected too
    let unit = (norm - 1.0).abs() <= UNIT_NORM_TOLERANCE;
    if !unit {
        return Err(Error::input(format!(
            "row {}: direction ({}, {}, {}) has norm {norm}, expected 1",
            row.specObjID, row.cx, row.cy, row.cz
        )));
    }
    let d = comoving_distance(row.z, params)?;
    Ok([d * row.cx, d * row.cy, d * row.cz])
}

/// Galaxies with a clean redshift that pass the confidence cut.
pub fn filter_row(row: &CatalogRow, direction: ZConfDirection) -> bool {
    let zconf_ok = match direction {
        ZConfDirection::Lt => row.zConf < ZCONF_CUT,
        ZConfDirection::Ge => row.zConf >= ZCONF_CUT,
    };
    row.objType == 0 && row.zWarning == 0 && zconf_ok
}

/// Main/LRG by r-band magnitude, Early/Late by u − r color.
pub fn categorize_galaxy(mag_u: f64, mag_r: f64) -> Result<ObjectType> {
    if !(mag_u.is_finite() && mag_r.is_finite()) {
        return Err(Error::input(format!("non-finite magnitude (u={mag_u}, r={mag_r})")));
    }
    let sample = if mag_r <= MAIN_R_LIMIT { "Main" } else { "LRG" };
    let color = if mag_u - mag_r >= EARLY_COLOR_CUT - COLOR_TOLERANCE { "Early" } else { "Late" };
    ObjectType::new(format!("{sample}-{color}"))
}

/// The four labels `categorize_galaxy` can produce.
pub fn galaxy_labels() -> [&'static str; 4] {
    ["Main-Late", "Main-Early", "LRG-Late", "LRG-Early"]
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub objects: Vec<SpatialObject>,
    pub accepted: usize,
    pub filtered: usize,
    pub malformed: usize,
}

impl IngestReport {
    pub fn rejected(&self) -> usize {
        self.filtered + self.malformed
    }
}

fn transform(row: &CatalogRow, params: HubbleParams, direction: ZConfDirection) -> Result<Option<SpatialObject>> {
    if !filter_row(row, direction) {
        return Ok(None);
    }
    let xyz = to_cartesian(row, params)?;
    let kind = categorize_galaxy(row.modelMag_u, row.modelMag_r)?;
    SpatialObject::new(row.specObjID.clone(), kind, &xyz).map(Some)
}

/// Parses and transforms a headered catalog CSV. Rows failing the filter
/// or carrying unusable values are counted and skipped; CSV syntax or type
/// errors abort with the offending line.
pub fn read_catalog<R: Read>(
    reader: R,
    source: &str,
    params: HubbleParams,
    direction: ZConfDirection,
    exec: Execution,
) -> Result<IngestReport> {
    let mut csv = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in csv.deserialize::<CatalogRow>() {
        let row = record.map_err(|e| Error::Parse {
            path: source.into(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        rows.push(row);
    }

    let outcomes = map_slice(exec, &rows, |row| transform(row, params, direction));
    let mut report = IngestReport::default();
    for (row, outcome) in rows.iter().zip(outcomes) {
        match outcome {
            Ok(Some(obj)) => {
                report.accepted += 1;
                report.objects.push(obj);
            }
            Ok(None) => report.filtered += 1,
            Err(err) => {
                log::debug!("skipping row {}: {err}", row.specObjID);
                report.malformed += 1;
            }
        }
    }
    log::info!(
        "{source}: {} rows accepted, {} filtered out, {} malformed",
        report.accepted,
        report.filtered,
        report.malformed
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn row(z: f64, c: [f64; 3]) -> CatalogRow {
        CatalogRow {
            specObjID: "1".into(),
            z,
            ra: 0.0,
            dec: 0.0,
            cx: c[0],
            cy: c[1],
            cz: c[2],
            objType: 0,
            modelMag_u: 20.0,
            modelMag_r: 17.0,
            zConf: 0.5,
            zWarning: 0,
        }
    }

    #[test]
    fn distance_examples() {
        let p = HubbleParams::default();
        assert_eq!(comoving_distance(0.0, p).unwrap(), 0.0);
        assert_relative_eq!(comoving_distance(0.1, p).unwrap(), 422.242_898_591_549_3, max_relative = 1e-12);
        let half = comoving_distance(0.1, HubbleParams::with_h0(142.0).unwrap()).unwrap();
        assert_relative_eq!(half, comoving_distance(0.1, p).unwrap() / 2.0, max_relative = 1e-15);
        assert!(comoving_distance(-0.1, p).is_err());
        assert!(HubbleParams::with_h0(0.0).is_err());
    }

    #[test]
    fn cartesian_examples() {
        let p = HubbleParams::default();
        assert_eq!(to_cartesian(&row(0.0, [0.0, 0.0, 1.0]), p).unwrap(), [0.0, 0.0, 0.0]);
        let xyz = to_cartesian(&row(0.1, [1.0, 0.0, 0.0]), p).unwrap();
        assert_relative_eq!(xyz[0], 422.242_898_591_549_3, max_relative = 1e-12);
        assert_eq!((xyz[1], xyz[2]), (0.0, 0.0));
        let xyz = to_cartesian(&row(0.1, [0.6, 0.8, 0.0]), p).unwrap();
        assert_relative_eq!(xyz[0], 253.345_739_154_929_56, max_relative = 1e-12);
        assert_relative_eq!(xyz[1], 337.794_318_873_239_5, max_relative = 1e-12);
        assert!(to_cartesian(&row(0.1, [1.0, 1.0, 0.0]), p).is_err());
    }

    #[test]
    fn filter_examples() {
        let ok = row(0.1, [1.0, 0.0, 0.0]);
        assert!(filter_row(&ok, ZConfDirection::Lt));
        assert!(!filter_row(&ok, ZConfDirection::Ge));
        assert!(!filter_row(&CatalogRow { objType: 1, ..ok.clone() }, ZConfDirection::Lt));
        assert!(!filter_row(&CatalogRow { zWarning: 5, ..ok.clone() }, ZConfDirection::Lt));
        let confident = CatalogRow { zConf: 0.95, ..ok };
        assert!(!filter_row(&confident, ZConfDirection::Lt));
        assert!(filter_row(&confident, ZConfDirection::Ge));
    }

    #[test]
    fn categorize_examples() {
        assert_eq!(categorize_galaxy(20.0, 17.0).unwrap().as_str(), "Main-Early");
        assert_eq!(categorize_galaxy(18.0, 17.0).unwrap().as_str(), "Main-Late");
        assert_eq!(categorize_galaxy(20.22, 18.0).unwrap().as_str(), "LRG-Early");
        assert_eq!(categorize_galaxy(17.77 + 2.0, 17.77).unwrap().as_str(), "Main-Late");
        assert!(categorize_galaxy(f64::NAN, 17.0).is_err());
    }

    #[test]
    fn catalog_parsing() {
        let text = "\
specObjID,z,ra,dec,cx,cy,cz,objType,modelMag_u,modelMag_r,zConf,zWarning,extra
10,0.1,0,0,1,0,0,0,20,17,0.5,0,foo
11,0.1,0,0,1,0,0,1,20,17,0.5,0,foo
12,0.1,0,0,2,0,0,0,20,17,0.5,0,foo
13,0.05,0,0,0,1,0,0,18,18,0.5,0,foo
";
        let report = read_catalog(text.as_bytes(), "mem", HubbleParams::default(), ZConfDirection::Lt, Execution::Parallel).unwrap();
        assert_eq!(report.accepted, 2);
        assert_eq!(report.filtered, 1);
        assert_eq!(report.malformed, 1);
        assert_eq!(report.objects[0].id, "10");
        assert_eq!(report.objects[1].kind.as_str(), "LRG-Late");
    }

    #[test]
    fn catalog_errors_carry_line() {
        let text = "specObjID,z,ra,dec,cx,cy,cz,objType,modelMag_u,modelMag_r,zConf,zWarning\n1,abc,0,0,1,0,0,0,20,17,0.5,0\n";
        match read_catalog(text.as_bytes(), "mem", HubbleParams::default(), ZConfDirection::Lt, Execution::Sequential) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn distance_is_linear(z in 0.0f64..2.0, k in 0.1f64..10.0, h0 in 20.0f64..200.0) {
            let p = HubbleParams::with_h0(h0).unwrap();
            let d = comoving_distance(z, p).unwrap();
            prop_assert!((comoving_distance(z * k, p).unwrap() - k * d).abs() <= 1e-9 * (1.0 + k * d));
            let p2 = HubbleParams::with_h0(h0 * k).unwrap();
            prop_assert!((comoving_distance(z, p2).unwrap() - d / k).abs() <= 1e-9 * (1.0 + d / k));
        }

        #[test]
        fn cartesian_norm_is_distance(z in 0.0f64..1.0, theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..std::f64::consts::TAU) {
            let c = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let p = HubbleParams::default();
            let xyz = to_cartesian(&row(z, c), p).unwrap();
            let norm = (xyz[0] * xyz[0] + xyz[1] * xyz[1] + xyz[2] * xyz[2]).sqrt();
            let d = comoving_distance(z, p).unwrap();
            prop_assert!((norm - d).abs() <= 1e-9 * d.max(1e-300));
        }

        #[test]
        fn accepted_rows_get_one_of_four_labels(u in 10.0f64..30.0, r in 10.0f64..30.0) {
            let label = categorize_galaxy(u, r).unwrap();
            prop_assert!(galaxy_labels().contains(&label.as_str()));
        }
    }
}
