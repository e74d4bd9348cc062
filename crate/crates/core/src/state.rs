//! Internal-mode Hilbert space for one and two labeled photons.
//!
//! Each photon carries a polarization (`H`/`V`) and an OAM sign (`+m`/`-m`) for
//! a fixed OAM order `m`, giving four internal modes. Photons are labeled
//! (first-quantized): a two-photon amplitude is indexed by the ordered pair
//! (photon-1 mode, photon-2 mode). Bosonic symmetrization only happens at the
//! interference elements, see [`crate::hom`].

use std::fmt;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the norm of externally supplied states.
pub const INPUT_NORM_TOL: f64 = 1e-9;
/// Tolerance for internal consistency checks.
pub const INTERNAL_TOL: f64 = 1e-12;

pub type SingleAmplitudes = SVector<C64, 4>;
pub type PairAmplitudes = SMatrix<C64, 4, 4>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state norm {norm} deviates from 1 by more than {INPUT_NORM_TOL}")]
    NotNormalized { norm: f64 },
    #[error("state has zero norm (annihilated by post-selection)")]
    ZeroNorm,
    #[error("OAM order must be >= 1, got {0}")]
    InvalidOamOrder(i64),
    #[error("OAM orders differ: {0} vs {1}")]
    OamOrderMismatch(u32, u32),
    #[error("invalid amplitude record: {0}")]
    InvalidRecord(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::H => write!(f, "H"),
            Self::V => write!(f, "V"),
        }
    }
}

/// Sign of the OAM quantum number, `+m` or `-m`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OamSign {
    Plus,
    Minus,
}

impl OamSign {
    pub fn flipped(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }
}

/// OAM carried by one photon, `sign * m` units of ħ.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct OamIndex {
    m: u32,
    sign: OamSign,
}

impl OamIndex {
    pub fn new(m: i64, sign: OamSign) -> Result<Self, StateError> {
        Ok(Self { m: check_order(m)?, sign })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn sign(&self) -> OamSign {
        self.sign
    }

    /// Signed OAM quantum number.
    pub fn value(&self) -> i64 {
        self.sign.as_i64() * self.m as i64
    }
}

pub(crate) fn check_order(m: i64) -> Result<u32, StateError> {
    if m < 1 || m > u32::MAX as i64 {
        return Err(StateError::InvalidOamOrder(m));
    }
    Ok(m as u32)
}

/// One of the four internal modes of a photon for fixed `m`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InternalMode {
    pub pol: Polarization,
    pub oam: OamSign,
}

impl InternalMode {
    /// Canonical order: H+, H-, V+, V-.
    pub const ALL: [InternalMode; 4] = [
        InternalMode { pol: Polarization::H, oam: OamSign::Plus },
        InternalMode { pol: Polarization::H, oam: OamSign::Minus },
        InternalMode { pol: Polarization::V, oam: OamSign::Plus },
        InternalMode { pol: Polarization::V, oam: OamSign::Minus },
    ];

    pub const fn new(pol: Polarization, oam: OamSign) -> Self {
        Self { pol, oam }
    }

    pub fn index(self) -> usize {
        let p = match self.pol {
            Polarization::H => 0,
            Polarization::V => 2,
        };
        let o = match self.oam {
            OamSign::Plus => 0,
            OamSign::Minus => 1,
        };
        p + o
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

impl fmt::Display for InternalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.oam {
            OamSign::Plus => '+',
            OamSign::Minus => '-',
        };
        write!(f, "{}{}", self.pol, s)
    }
}

/// A single-photon state over the four internal modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SinglePhotonState {
    amps: SingleAmplitudes,
    m: u32,
}

impl SinglePhotonState {
    pub fn from_amplitudes(amps: SingleAmplitudes) -> Self {
        Self { amps, m: 1 }
    }

    pub fn with_oam_order(mut self, m: i64) -> Result<Self, StateError> {
        self.m = check_order(m)?;
        Ok(self)
    }

    pub fn basis(mode: InternalMode) -> Self {
        let mut amps = SingleAmplitudes::zeros();
        amps[mode.index()] = C64::new(1.0, 0.0);
        Self::from_amplitudes(amps)
    }

    /// `alpha |H> + beta |V>` with the OAM fixed to `oam`.
    pub fn polarized(alpha: C64, beta: C64, oam: OamSign) -> Self {
        let mut amps = SingleAmplitudes::zeros();
        amps[InternalMode::new(Polarization::H, oam).index()] = alpha;
        amps[InternalMode::new(Polarization::V, oam).index()] = beta;
        Self::from_amplitudes(amps)
    }

    pub fn amplitude(&self, mode: InternalMode) -> C64 {
        self.amps[mode.index()]
    }

    pub fn amplitudes(&self) -> &SingleAmplitudes {
        &self.amps
    }

    pub fn oam_order(&self) -> u32 {
        self.m
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<(Self, f64), StateError> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(StateError::ZeroNorm);
        }
        let amps = self.amps.unscale(n2.sqrt());
        Ok((Self { amps, m: self.m }, n2))
    }

    fn check_normalized(&self) -> Result<(), StateError> {
        let norm = self.norm_sqr().sqrt();
        if (norm - 1.0).abs() > INPUT_NORM_TOL {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(())
    }
}

/// A two-photon state: amplitudes over ordered pairs (photon-1 mode, photon-2 mode).
///
/// Stored as a 4x4 matrix whose row is the photon-1 mode and whose column is
/// the photon-2 mode, so particle exchange is a transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonState {
    amps: PairAmplitudes,
    m: u32,
}

impl TwoPhotonState {
    pub fn zero() -> Self {
        Self::from_matrix(PairAmplitudes::zeros())
    }

    /// Wraps raw amplitudes without normalizing; post-selected branches are
    /// represented this way.
    pub fn from_matrix(amps: PairAmplitudes) -> Self {
        Self { amps, m: 1 }
    }

    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = ((InternalMode, InternalMode), C64)>,
    {
        let mut amps = PairAmplitudes::zeros();
        for ((a, b), z) in entries {
            amps[(a.index(), b.index())] += z;
        }
        Self::from_matrix(amps)
    }

    pub fn with_oam_order(mut self, m: i64) -> Result<Self, StateError> {
        self.m = check_order(m)?;
        Ok(self)
    }

    pub fn oam_order(&self) -> u32 {
        self.m
    }

    pub fn amplitude(&self, m1: InternalMode, m2: InternalMode) -> C64 {
        self.amps[(m1.index(), m2.index())]
    }

    pub fn matrix(&self) -> &PairAmplitudes {
        &self.amps
    }

    /// All 16 entries in canonical order, zero amplitudes included.
    pub fn iter(&self) -> impl Iterator<Item = (InternalMode, InternalMode, C64)> + '_ {
        InternalMode::ALL.into_iter().flat_map(move |a| {
            InternalMode::ALL
                .into_iter()
                .map(move |b| (a, b, self.amps[(a.index(), b.index())]))
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.amps.iter().filter(|a| a.norm_sqr() > 0.0).count()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Returns the unit-norm state together with the original squared norm,
    /// which for a post-selected branch is the branch probability.
    pub fn normalize(&self) -> Result<(Self, f64), StateError> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(StateError::ZeroNorm);
        }
        Ok((Self { amps: self.amps.unscale(n2.sqrt()), m: self.m }, n2))
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { amps: self.amps * z, m: self.m }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { amps: self.amps + other.amps, m: self.m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { amps: self.amps - other.amps, m: self.m }
    }

    /// Swaps the photon labels: `amp'(m1, m2) = amp(m2, m1)`.
    pub fn exchange(&self) -> Self {
        Self { amps: self.amps.transpose(), m: self.m }
    }

    /// Hermitian inner product `<self|other>`. States of different OAM order
    /// live in orthogonal subspaces.
    pub fn inner_product(&self, other: &Self) -> C64 {
        if self.m != other.m {
            return C64::new(0.0, 0.0);
        }
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `<state|exchange(state)>`, the exchange-symmetry expectation in [-1, 1].
    pub fn symmetry_expectation(&self) -> f64 {
        let z = self.inner_product(&self.exchange());
        debug_assert!(z.im.abs() <= 1e-12 * self.norm_sqr().max(1.0));
        z.re
    }

    /// Fidelity `|<self|other>|^2` between normalized states.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner_product(other).norm_sqr()
    }

    /// `sum conj(bra1(m1)) conj(bra2(m2)) amp(m1, m2)`.
    pub fn project(&self, bra1: &SinglePhotonState, bra2: &SinglePhotonState) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..4 {
            let b1 = bra1.amps[i].conj();
            if b1.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..4 {
                acc += b1 * bra2.amps[j].conj() * self.amps[(i, j)];
            }
        }
        acc
    }

    /// Applies independent single-photon operators to photon 1 and photon 2.
    pub fn apply_local(&self, op1: &SMatrix<C64, 4, 4>, op2: &SMatrix<C64, 4, 4>) -> Self {
        Self { amps: op1 * self.amps * op2.transpose(), m: self.m }
    }

    pub fn to_records(&self) -> Vec<AmplitudeRecord> {
        let m = self.m as i64;
        self.iter()
            .filter(|(_, _, z)| z.norm_sqr() > 0.0)
            .map(|(a, b, z)| AmplitudeRecord {
                pol1: a.pol,
                oam1: a.oam.as_i64() * m,
                pol2: b.pol,
                oam2: b.oam.as_i64() * m,
                re: round_sig15(z.re),
                im: round_sig15(z.im),
            })
            .collect()
    }

    pub fn from_records(records: &[AmplitudeRecord]) -> Result<Self, StateError> {
        let mut m: Option<u32> = None;
        let mut amps = PairAmplitudes::zeros();
        for r in records {
            let mut sign = |oam: i64| -> Result<OamSign, StateError> {
                let order = check_order(oam.abs())?;
                match m {
                    Some(prev) if prev != order => {
                        return Err(StateError::OamOrderMismatch(prev, order));
                    }
                    _ => m = Some(order),
                }
                Ok(if oam > 0 { OamSign::Plus } else { OamSign::Minus })
            };
            let a = InternalMode::new(r.pol1, sign(r.oam1)?);
            let b = InternalMode::new(r.pol2, sign(r.oam2)?);
            let slot = &mut amps[(a.index(), b.index())];
            if slot.norm_sqr() > 0.0 {
                return Err(StateError::InvalidRecord(format!("duplicate entry ({a}, {b})")));
            }
            *slot = C64::new(r.re, r.im);
        }
        Ok(Self { amps, m: m.unwrap_or(1) })
    }
}

/// Product state `s1 (x) s2`. Both inputs must be normalized.
pub fn tensor_product(
    s1: &SinglePhotonState,
    s2: &SinglePhotonState,
) -> Result<TwoPhotonState, StateError> {
    s1.check_normalized()?;
    s2.check_normalized()?;
    if s1.m != s2.m {
        return Err(StateError::OamOrderMismatch(s1.m, s2.m));
    }
    Ok(TwoPhotonState { amps: s1.amps * s2.amps.transpose(), m: s1.m })
}

/// One serialized amplitude entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRecord {
    pub pol1: Polarization,
    pub oam1: i64,
    pub pol2: Polarization,
    pub oam2: i64,
    pub re: f64,
    pub im: f64,
}

fn round_sig15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

impl Serialize for TwoPhotonState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TwoPhotonState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<AmplitudeRecord>::deserialize(deserializer)?;
        Self::from_records(&records).map_err(serde::de::Error::custom)
    }
}
