//! Combined measure report for one measurement and one state.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geam::{design_params, DesignParams, Geam};
use crate::measures::{self, BzInvariants};
use crate::states::DensityMatrix;

/// Frame symmetry constants may differ by this much before the measurement
/// is treated as something other than a conical 2-design.
pub const DESIGN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEntry {
    pub nu: f64,
    #[serde(rename = "type")]
    pub kind: String,
    pub value: f64,
    /// Present where a lower bound is available for this order.
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceEntry {
    pub mu: f64,
    pub nu: Option<f64>,
    pub direct: f64,
    pub formula: Option<f64>,
}

/// Quantities computed by direct summation alongside their closed forms.
/// Closed forms are `None` when the measurement is not a conical 2-design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub state_purity: f64,
    pub design: Option<DesignParams>,
    pub ioc_direct: f64,
    pub ioc_formula: Option<f64>,
    pub bz: BzInvariants,
    pub bz_formula: Option<BzInvariants>,
    pub entropy: Vec<EntropyEntry>,
    pub coherence: Vec<CoherenceEntry>,
}

/// Build a report. Each `nu` yields a Renyi and a Tsallis entry (a single
/// Shannon entry at `nu = 1`); each `(mu, nu)` yields one coherence entry.
pub fn measure_report(
    geam: &Geam,
    rho: &DensityMatrix,
    entropy_orders: &[f64],
    coherence_pairs: &[(f64, Option<f64>)],
) -> Result<MeasureReport> {
    let design = design_params(geam, DESIGN_TOL).ok();
    let d = geam.dim;
    let purity = rho.purity();
    let probs = measures::born_probabilities(geam, rho)?;
    let ioc = probs.coincidence();

    let mut entropy = Vec::new();
    for &nu in entropy_orders {
        if nu == 1.0 {
            entropy.push(EntropyEntry {
                nu,
                kind: "shannon".into(),
                value: measures::shannon_entropy(&probs),
                bound: Some(measures::tsallis_bound(ioc, 1.0)?),
            });
            continue;
        }
        entropy.push(EntropyEntry {
            nu,
            kind: "renyi".into(),
            value: measures::renyi_entropy(&probs, nu)?,
            bound: (nu >= 2.0).then(|| measures::renyi_bound(ioc, nu)).transpose()?,
        });
        entropy.push(EntropyEntry {
            nu,
            kind: "tsallis".into(),
            value: measures::tsallis_entropy(&probs, nu)?,
            bound: (nu <= 2.0).then(|| measures::tsallis_bound(ioc, nu)).transpose()?,
        });
    }

    let coherence = coherence_pairs
        .iter()
        .map(|&(mu, nu)| {
            Ok(CoherenceEntry {
                mu,
                nu,
                direct: measures::quantum_uncertainty(geam, rho, mu, nu)?,
                formula: design
                    .as_ref()
                    .map(|p| measures::coherence_formula(p, rho, mu, nu))
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MeasureReport {
        state_purity: purity,
        design,
        ioc_direct: ioc,
        ioc_formula: design
            .as_ref()
            .map(|p| measures::ioc_formula(p, purity.clamp(1.0 / d as f64, 1.0), d))
            .transpose()?,
        bz: measures::bz_direct(geam, rho)?,
        bz_formula: design
            .as_ref()
            .map(|p| measures::bz_formulas(p, purity.clamp(1.0 / d as f64, 1.0), d))
            .transpose()?,
        entropy,
        coherence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{preset, Preset};
    use crate::states::{random_mixed, seeded_rng};

    #[test]
    fn report_routes_agree() {
        let g = preset(&Preset::Mub, 3).unwrap();
        let rho = random_mixed(3, 3, &mut seeded_rng(10)).unwrap();
        let r = measure_report(&g, &rho, &[0.5, 1.0, 2.0, 3.0], &[(0.3, None), (0.2, Some(0.5))]).unwrap();
        assert!((r.ioc_direct - r.ioc_formula.unwrap()).abs() < 1e-12);
        let f = r.bz_formula.unwrap();
        assert!((r.bz.v - f.v).abs() < 1e-12);
        assert!((r.bz.u - f.u).abs() < 1e-12);
        assert_eq!(r.entropy.len(), 7);
        for e in &r.entropy {
            if let Some(b) = e.bound {
                assert!(e.value >= b - 1e-12, "{e:?}");
            }
        }
        for c in &r.coherence {
            assert!((c.direct - c.formula.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_has_no_coherence() {
        let g = preset(&Preset::Sic, 2).unwrap();
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let r = measure_report(&g, &rho, &[2.0], &[(0.1, None), (0.5, None)]).unwrap();
        for c in &r.coherence {
            assert!(c.direct.abs() < 1e-12);
        }
    }
}
