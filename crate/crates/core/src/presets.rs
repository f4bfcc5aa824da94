//! Named measurement families: MUBs, MUMs, SIC POVMs, general SIC POVMs and
//! `(N, M)`-POVMs, together with their closed-form parameter table.
//!
//! Projective families come from explicit vectors: Pauli stabilizer classes
//! for `d = 2, 4`, quadratic-phase bases for odd primes, and Weyl-Heisenberg
//! orbits of shipped SIC fiducials for `d = 2..=7`. Non-projective families
//! reuse the operator basis recovered from the projective parent, so every
//! admissible `b` yields a positive measurement. Shapes without a parent fall
//! back to the Gell-Mann partition and may fail with a positivity violation.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GeamError, Result};
use crate::geam::{
    build_geam, build_geam_with_basis, recover_basis, Geam, GeamConfig,
};
use crate::linalg::{c64, identity, kron, outer, CMatrix, Tolerances};

/// Dimensions with a shipped complete set of mutually unbiased bases.
pub const MUB_DIMENSIONS: &[usize] = &[2, 3, 4, 5, 7, 11, 13];

/// Dimensions with a shipped SIC fiducial.
pub const SIC_DIMENSIONS: &[usize] = &[2, 3, 4, 5, 6, 7];

/// Largest dimension accepted by the Gell-Mann fallback.
pub const MAX_GELLMANN_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    Mub,
    Mum { b: f64 },
    Sic,
    Gsic { b: f64 },
    NmPovm { frames: usize, outcomes: usize, b: f64 },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Mub => "mub",
            Preset::Mum { .. } => "mum",
            Preset::Sic => "sic",
            Preset::Gsic { .. } => "gsic",
            Preset::NmPovm { .. } => "nm_povm",
        }
    }

    /// Parse a preset name with its optional parameters.
    pub fn parse(
        name: &str,
        b: Option<f64>,
        frames: Option<usize>,
        outcomes: Option<usize>,
    ) -> Result<Self> {
        let need_b = || {
            b.ok_or_else(|| GeamError::InvalidParameter(format!("preset {name} requires b")))
        };
        Ok(match name {
            "mub" => Preset::Mub,
            "sic" => Preset::Sic,
            "mum" => Preset::Mum { b: need_b()? },
            "gsic" => Preset::Gsic { b: need_b()? },
            "nm_povm" | "nm-povm" => Preset::NmPovm {
                frames: frames.ok_or_else(|| {
                    GeamError::InvalidParameter("nm_povm requires the number of frames".into())
                })?,
                outcomes: outcomes.ok_or_else(|| {
                    GeamError::InvalidParameter("nm_povm requires the number of outcomes".into())
                })?,
                b: need_b()?,
            },
            other => return Err(GeamError::Unsupported(format!("unknown preset {other}"))),
        })
    }

    /// Frame count and size for dimension `d`.
    pub fn shape(&self, d: usize) -> (usize, usize) {
        match *self {
            Preset::Mub | Preset::Mum { .. } => (d + 1, d),
            Preset::Sic | Preset::Gsic { .. } => (1, d * d),
            Preset::NmPovm { frames, outcomes, .. } => (frames, outcomes),
        }
    }

    pub fn b(&self) -> f64 {
        match *self {
            Preset::Mub | Preset::Sic => 1.0,
            Preset::Mum { b } | Preset::Gsic { b } | Preset::NmPovm { b, .. } => b,
        }
    }

    /// Closed-form parameters of this family in dimension `d`.
    pub fn family_params(&self, d: usize) -> FamilyParams {
        let df = d as f64;
        match *self {
            Preset::Mub => FamilyParams {
                frames: d + 1,
                outcomes: d,
                gamma: 1.0 / (df + 1.0),
                a: 1.0 / (df + 1.0),
                b: 1.0,
                c: 0.0,
                mu: 1.0 / (df * (df + 1.0)),
                s: 1.0 / (df + 1.0).powi(2),
                c_max: 2.0 / (df + 1.0).powi(2),
            },
            Preset::Mum { b } => FamilyParams {
                frames: d + 1,
                outcomes: d,
                gamma: 1.0 / (df + 1.0),
                a: 1.0 / (df + 1.0),
                b,
                c: (1.0 - b) / (df - 1.0),
                mu: 1.0 / (df * (df + 1.0)),
                s: (df * b - 1.0) / ((df + 1.0) * (df * df - 1.0)),
                c_max: (b + 1.0) / (df + 1.0).powi(2),
            },
            Preset::Sic => FamilyParams {
                frames: 1,
                outcomes: d * d,
                gamma: 1.0,
                a: 1.0 / df,
                b: 1.0,
                c: 1.0 / (df + 1.0),
                mu: 1.0 / (df * df),
                s: 1.0 / (df * (df + 1.0)),
                c_max: 2.0 / (df * (df + 1.0)),
            },
            Preset::Gsic { b } => FamilyParams {
                frames: 1,
                outcomes: d * d,
                gamma: 1.0,
                a: 1.0 / df,
                b,
                c: (df - b) / (df * df - 1.0),
                mu: 1.0 / (df * df),
                s: (df * b - 1.0) / (df * (df * df - 1.0)),
                c_max: (b + 1.0) / (df * (df + 1.0)),
            },
            Preset::NmPovm { frames, outcomes, b } => {
                let (n, m) = (frames as f64, outcomes as f64);
                FamilyParams {
                    frames,
                    outcomes,
                    gamma: 1.0 / n,
                    a: df / (n * m),
                    b,
                    c: (m - df * b) / (df * (m - 1.0)),
                    mu: 1.0 / (n * m),
                    s: df * (df * b - 1.0) / (n * m * (df * df - 1.0)),
                    c_max: df * (b + 1.0) / (n * m * (df + 1.0)),
                }
            }
        }
    }
}

/// Parameters of one column of the standard table of conical 2-design
/// families, evaluated at a concrete `(d, b, N, M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(rename = "N")]
    pub frames: usize,
    #[serde(rename = "M")]
    pub outcomes: usize,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mu: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "C_max")]
    pub c_max: f64,
}

/// Build a preset measurement in dimension `d`.
pub fn preset(kind: &Preset, d: usize) -> Result<Geam> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    match *kind {
        Preset::Mub => mub(d),
        Preset::Sic => sic(d),
        Preset::Mum { b } => derived(d, d + 1, d, b),
        Preset::Gsic { b } => derived(d, 1, d * d, b),
        Preset::NmPovm { frames, outcomes, b } => {
            if frames == 0 || outcomes < 2 || frames * (outcomes - 1) != d * d - 1 {
                return Err(GeamError::InvalidConfig(format!(
                    "(N, M) = ({frames}, {outcomes}) does not satisfy N (M - 1) = d^2 - 1 for d = {d}"
                )));
            }
            derived(d, frames, outcomes, b)
        }
    }
}

/// Non-projective family on the basis of a projective parent when one ships,
/// otherwise on the Gell-Mann partition.
fn derived(d: usize, frames: usize, outcomes: usize, b: f64) -> Result<Geam> {
    let config = GeamConfig::uniform(d, frames, outcomes, b);
    config.check()?;
    let parent = if (frames, outcomes) == (d + 1, d) && MUB_DIMENSIONS.contains(&d) {
        Some(mub(d)?)
    } else if (frames, outcomes) == (1, d * d) && SIC_DIMENSIONS.contains(&d) {
        Some(sic(d)?)
    } else {
        None
    };
    match parent {
        Some(parent) => {
            let basis = recover_basis(&parent)?;
            build_geam_with_basis(&config, &basis, &Tolerances::default())
        }
        None if d <= MAX_GELLMANN_DIM => build_geam(&config),
        None => Err(GeamError::Unsupported(format!(
            "no construction for ({frames}, {outcomes}) in d = {d}"
        ))),
    }
}

fn projector_frames(d: usize, gamma: f64, frames: Vec<Vec<CMatrix>>) -> Result<Geam> {
    let scaled = frames
        .into_iter()
        .map(|projectors| {
            let a = d as f64 * gamma / projectors.len() as f64;
            let ops = projectors.into_iter().map(|p| p.scale(a)).collect();
            (gamma, ops)
        })
        .collect();
    Geam::from_operators(d, scaled)
}

/// Complete set of `d + 1` mutually unbiased bases, weighted `1/(d+1)`.
pub fn mub(d: usize) -> Result<Geam> {
    let frames = mub_projectors(d)?;
    projector_frames(d, 1.0 / (d as f64 + 1.0), frames)
}

/// SIC POVM `P_k = Pi_k / d` from the shipped fiducial.
pub fn sic(d: usize) -> Result<Geam> {
    let projectors = sic_projectors(d)?;
    projector_frames(d, 1.0, vec![projectors])
}

fn pauli(label: char) -> CMatrix {
    let (o, l, i) = (c64(0., 0.), c64(1., 0.), c64(0., 1.));
    match label {
        'I' => identity(2),
        'X' => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => unreachable!("not a Pauli label"),
    }
}

fn pauli_string(labels: &str) -> CMatrix {
    labels
        .chars()
        .map(pauli)
        .reduce(|acc, p| kron(&acc, &p))
        .expect("non-empty Pauli string")
}

/// Joint eigenprojectors `prod_i (I + s_i g_i)/2` of commuting Pauli generators.
fn stabilizer_projectors(generators: &[&str]) -> Vec<CMatrix> {
    let ops: Vec<CMatrix> = generators.iter().map(|g| pauli_string(g)).collect();
    let dim = ops[0].nrows();
    (0..1usize << ops.len())
        .map(|signs| {
            ops.iter().enumerate().fold(identity(dim), |acc, (i, g)| {
                let s = if signs >> i & 1 == 0 { 1.0 } else { -1.0 };
                acc * (identity(dim) + g.scale(s)).scale(0.5)
            })
        })
        .collect()
}

fn is_odd_prime(d: usize) -> bool {
    d > 2 && d % 2 == 1 && (3..).step_by(2).take_while(|k| k * k <= d).all(|k| d % k != 0)
}

/// Rank-one projectors of `d + 1` mutually unbiased bases, one list per basis.
pub fn mub_projectors(d: usize) -> Result<Vec<Vec<CMatrix>>> {
    match d {
        2 => Ok(["X", "Y", "Z"]
            .iter()
            .map(|g| stabilizer_projectors(&[g]))
            .collect()),
        4 => Ok([
            ["ZI", "IZ"],
            ["XI", "IX"],
            ["YI", "IY"],
            ["XZ", "ZY"],
            ["YZ", "ZX"],
        ]
        .iter()
        .map(|gens| stabilizer_projectors(gens))
        .collect()),
        _ if is_odd_prime(d) && MUB_DIMENSIONS.contains(&d) => {
            let mut bases = vec![(0..d)
                .map(|k| {
                    let mut p = CMatrix::zeros(d, d);
                    p[(k, k)] = c64(1.0, 0.0);
                    p
                })
                .collect::<Vec<_>>()];
            let norm = 1.0 / (d as f64).sqrt();
            for j in 0..d {
                bases.push(
                    (0..d)
                        .map(|k| {
                            let v = DVector::from_fn(d, |n, _| {
                                let phase = ((j * n * n + k * n) % d) as f64;
                                Complex64::from_polar(norm, 2.0 * PI * phase / d as f64)
                            });
                            outer(&v)
                        })
                        .collect(),
                );
            }
            Ok(bases)
        }
        _ => Err(GeamError::Unsupported(format!(
            "no complete MUB construction shipped for d = {d}"
        ))),
    }
}

/// Weyl-Heisenberg displacement `X^j Z^k` with `X|n> = |n+1>` and
/// `Z|n> = w^n |n>`.
pub fn displacement(d: usize, j: usize, k: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for n in 0..d {
        let phase = 2.0 * PI * ((k * n) % d) as f64 / d as f64;
        out[((n + j) % d, n)] = Complex64::from_polar(1.0, phase);
    }
    out
}

/// Shipped fiducial vector of a Weyl-Heisenberg covariant SIC, normalized.
pub fn sic_fiducial(d: usize) -> Result<DVector<Complex64>> {
    let raw: Vec<Complex64> = match d {
        2 => {
            let theta = (1.0 / 3.0_f64.sqrt()).acos();
            vec![
                c64((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), PI / 4.0),
            ]
        }
        3 => vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)],
        4 => vec![
            c64(0.20118858648686588, 0.0),
            c64(0.30763455310591914, -0.25698329627163186),
            c64(1.1359387979728501e-16, -0.485712214091264),
            c64(-0.10644596661905344, 0.7426955103628959),
        ],
        5 => vec![
            c64(0.19993636214633706, 0.0),
            c64(-0.3904256732209187, -0.2886855777081881),
            c64(0.31395370760812197, -0.2730814100216849),
            c64(0.45621614149038264, 0.533452501131906),
            c64(0.048846699566617094, -0.23669126770086601),
        ],
        6 => vec![
            c64(0.26382706695067, 0.0),
            c64(0.015588609723353797, 0.4372954263719898),
            c64(-0.05069153037665056, 0.1985513807170069),
            c64(-0.06270409596733022, -0.6659327898253323),
            c64(-0.11132536713553208, 0.43246667251381976),
            c64(-0.22111825986319159, 0.034933834102343),
        ],
        7 => vec![
            c64(0.13352677645810035, 0.0),
            c64(0.275381804048967, -0.12270824674357077),
            c64(0.14993208375961004, -0.13969632927185593),
            c64(-0.5482380649229102, 0.2867650338925619),
            c64(0.37974456765599646, -0.2708747791803822),
            c64(0.040664167360990475, -0.19173705146668832),
            c64(0.02590131294126155, 0.45805857858746774),
        ],
        _ => {
            return Err(GeamError::Unsupported(format!(
                "no SIC fiducial shipped for d = {d}"
            )))
        }
    };
    let v = DVector::from_vec(raw);
    let norm = v.norm();
    Ok(v.unscale(norm))
}

/// The `d^2` rank-one projectors of the Weyl-Heisenberg orbit of the fiducial.
pub fn sic_projectors(d: usize) -> Result<Vec<CMatrix>> {
    let fiducial = sic_fiducial(d)?;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            out.push(outer(&(displacement(d, j, k) * &fiducial)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geam::{design_params, validate_geam};
    use crate::linalg::trace_product;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mub_bases_are_unbiased() {
        for &d in MUB_DIMENSIONS {
            let bases = mub_projectors(d).unwrap();
            assert_eq!(bases.len(), d + 1);
            for (x, bx) in bases.iter().enumerate() {
                for (y, by) in bases.iter().enumerate() {
                    for (k, p) in bx.iter().enumerate() {
                        for (l, q) in by.iter().enumerate() {
                            let expected = if x != y {
                                1.0 / d as f64
                            } else if k == l {
                                1.0
                            } else {
                                0.0
                            };
                            assert_abs_diff_eq!(trace_product(p, q).re, expected, epsilon = 1e-12);
                        }
                    }
                }
            }
        }
        assert!(mub_projectors(6).is_err());
    }

    #[test]
    fn sic_overlaps() {
        for &d in SIC_DIMENSIONS {
            let projectors = sic_projectors(d).unwrap();
            let target = 1.0 / (d as f64 + 1.0);
            for (k, p) in projectors.iter().enumerate() {
                for (l, q) in projectors.iter().enumerate() {
                    let expected = if k == l { 1.0 } else { target };
                    assert_abs_diff_eq!(trace_product(p, q).re, expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn qubit_mub_preset() {
        let geam = preset(&Preset::Mub, 2).unwrap();
        assert_eq!(geam.num_frames(), 3);
        assert_eq!(geam.num_operators(), 6);
        for f in &geam.frames {
            assert_abs_diff_eq!(f.gamma, 1.0 / 3.0);
        }
        // frames are the X, Y, Z eigenbases
        let x = pauli('X');
        let p = &geam.frames[0].operators[0];
        assert_abs_diff_eq!(trace_product(p, &x).re.abs(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit_sic_preset() {
        let geam = preset(&Preset::Sic, 2).unwrap();
        assert_eq!(geam.num_operators(), 4);
        for p in geam.operators() {
            assert_abs_diff_eq!(crate::linalg::trace(p).re, 0.5, epsilon = 1e-15);
        }
        let report = validate_geam(&geam, 1e-9);
        assert!(report.passed);
        assert_eq!(report.condition("cross_frame_overlap").unwrap().max_deviation, 0.0);
        assert_abs_diff_eq!(geam.frames[0].c, 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn nm_povm_qutrit() {
        let kind = Preset::NmPovm { frames: 4, outcomes: 3, b: 2.0 / 3.0 };
        let geam = preset(&kind, 3).unwrap();
        assert_eq!(geam.num_operators(), 12);
        assert!(validate_geam(&geam, 1e-10).passed);
        let params = design_params(&geam, 1e-10).unwrap();
        assert_abs_diff_eq!(params.s, 1.0 / 32.0, epsilon = 1e-13);
        assert_abs_diff_eq!(kind.family_params(3).s, 1.0 / 32.0, epsilon = 1e-15);
    }

    #[test]
    fn unsupported_combinations() {
        assert!(matches!(preset(&Preset::Mub, 6), Err(GeamError::Unsupported(_))));
        assert!(matches!(preset(&Preset::Sic, 8), Err(GeamError::Unsupported(_))));
        let bad = Preset::NmPovm { frames: 3, outcomes: 3, b: 0.5 };
        assert!(matches!(preset(&bad, 3), Err(GeamError::InvalidConfig(_))));
        assert!(Preset::parse("mum", None, None, None).is_err());
        assert!(matches!(
            Preset::parse("tetra", None, None, None),
            Err(GeamError::Unsupported(_))
        ));
    }
}
