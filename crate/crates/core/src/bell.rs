//! Polarization and OAM Bell states, their 16 hyper-entangled products, and
//! exchange-symmetry classification.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{check_order, InternalMode, OamSign, Polarization, StateError, TwoPhotonState};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;
const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabelError {
    #[error("unknown Bell label `{0}` (expected phi+, phi-, psi+, psi-, mu+, mu-, nu+ or nu-)")]
    Unknown(String),
    #[error("hyper label `{0}` must have the form `<polarization> x <oam>`, e.g. `phi+ x nu+`")]
    BadHyper(String),
    #[error("parity rule needs at least one degree of freedom")]
    Empty,
}

/// Polarization Bell states `phi±`, `psi±`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolBellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// OAM Bell states `mu±`, `nu±`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OamBellLabel {
    MuPlus,
    MuMinus,
    NuPlus,
    NuMinus,
}

impl PolBellLabel {
    pub const ALL: [Self; 4] = [Self::PhiPlus, Self::PhiMinus, Self::PsiPlus, Self::PsiMinus];

    /// Only the singlet `psi-` is antisymmetric.
    pub fn is_fermion(self) -> bool {
        self == Self::PsiMinus
    }

    fn pattern(self) -> BellPattern {
        match self {
            Self::PhiPlus => BellPattern { correlated: true, minus: false },
            Self::PhiMinus => BellPattern { correlated: true, minus: true },
            Self::PsiPlus => BellPattern { correlated: false, minus: false },
            Self::PsiMinus => BellPattern { correlated: false, minus: true },
        }
    }
}

impl OamBellLabel {
    pub const ALL: [Self; 4] = [Self::MuPlus, Self::MuMinus, Self::NuPlus, Self::NuMinus];

    pub fn is_fermion(self) -> bool {
        self == Self::NuMinus
    }

    fn pattern(self) -> BellPattern {
        match self {
            Self::MuPlus => BellPattern { correlated: true, minus: false },
            Self::MuMinus => BellPattern { correlated: true, minus: true },
            Self::NuPlus => BellPattern { correlated: false, minus: false },
            Self::NuMinus => BellPattern { correlated: false, minus: true },
        }
    }
}

/// `(|00> ± |11>)/√2` when correlated, `(|01> ± |10>)/√2` otherwise.
#[derive(Copy, Clone, Debug)]
struct BellPattern {
    correlated: bool,
    minus: bool,
}

impl BellPattern {
    /// Amplitude for single-DoF levels `a`, `b` in {0, 1}.
    fn amplitude(self, a: usize, b: usize) -> f64 {
        let same = a == b;
        if same != self.correlated {
            return 0.0;
        }
        if self.minus && a == 1 {
            -SQRT_HALF
        } else {
            SQRT_HALF
        }
    }
}

fn pol_level(p: Polarization) -> usize {
    match p {
        Polarization::H => 0,
        Polarization::V => 1,
    }
}

fn oam_level(o: OamSign) -> usize {
    match o {
        OamSign::Plus => 0,
        OamSign::Minus => 1,
    }
}

impl fmt::Display for PolBellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PhiPlus => "phi+",
            Self::PhiMinus => "phi-",
            Self::PsiPlus => "psi+",
            Self::PsiMinus => "psi-",
        })
    }
}

impl fmt::Display for OamBellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MuPlus => "mu+",
            Self::MuMinus => "mu-",
            Self::NuPlus => "nu+",
            Self::NuMinus => "nu-",
        })
    }
}

impl FromStr for PolBellLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "phi+" => Ok(Self::PhiPlus),
            "phi-" => Ok(Self::PhiMinus),
            "psi+" => Ok(Self::PsiPlus),
            "psi-" => Ok(Self::PsiMinus),
            other => Err(LabelError::Unknown(other.to_string())),
        }
    }
}

impl FromStr for OamBellLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "mu+" => Ok(Self::MuPlus),
            "mu-" => Ok(Self::MuMinus),
            "nu+" => Ok(Self::NuPlus),
            "nu-" => Ok(Self::NuMinus),
            other => Err(LabelError::Unknown(other.to_string())),
        }
    }
}

/// A Bell label in either degree of freedom.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BellLabel {
    Pol(PolBellLabel),
    Oam(OamBellLabel),
}

impl BellLabel {
    pub fn is_fermion(self) -> bool {
        match self {
            Self::Pol(p) => p.is_fermion(),
            Self::Oam(o) => o.is_fermion(),
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pol(p) => p.fmt(f),
            Self::Oam(o) => o.fmt(f),
        }
    }
}

impl FromStr for BellLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<PolBellLabel>()
            .map(Self::Pol)
            .or_else(|_| s.parse::<OamBellLabel>().map(Self::Oam))
            .map_err(|_| LabelError::Unknown(s.trim().to_string()))
    }
}

/// A polarization ⊗ OAM hyper-entangled Bell label.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperLabel {
    pub pol: PolBellLabel,
    pub oam: OamBellLabel,
}

impl HyperLabel {
    pub const fn new(pol: PolBellLabel, oam: OamBellLabel) -> Self {
        Self { pol, oam }
    }

    /// All 16 labels, polarization-major.
    pub fn all() -> impl Iterator<Item = HyperLabel> {
        PolBellLabel::ALL
            .into_iter()
            .flat_map(|p| OamBellLabel::ALL.into_iter().map(move |o| HyperLabel::new(p, o)))
    }

    pub fn dofs(self) -> [BellLabel; 2] {
        [BellLabel::Pol(self.pol), BellLabel::Oam(self.oam)]
    }
}

impl fmt::Display for HyperLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", self.pol, self.oam)
    }
}

impl FromStr for HyperLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(" x ");
        match (parts.next(), parts.next(), parts.next()) {
            (Some(p), Some(o), None) => Ok(Self::new(p.parse()?, o.parse()?)),
            _ => Err(LabelError::BadHyper(s.trim().to_string())),
        }
    }
}

/// A catalog entry: a single-DoF Bell state or a hyper-entangled product.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateLabel {
    Single(BellLabel),
    Hyper(HyperLabel),
}

impl StateLabel {
    /// The 16 hyper states followed by the 4 polarization and 4 OAM Bell states.
    pub fn catalog() -> Vec<StateLabel> {
        HyperLabel::all()
            .map(StateLabel::Hyper)
            .chain(PolBellLabel::ALL.map(|p| StateLabel::Single(BellLabel::Pol(p))))
            .chain(OamBellLabel::ALL.map(|o| StateLabel::Single(BellLabel::Oam(o))))
            .collect()
    }

    pub fn state(self) -> TwoPhotonState {
        match self {
            Self::Single(BellLabel::Pol(p)) => polarization_bell(p),
            Self::Single(BellLabel::Oam(o)) => oam_bell(o, 1).expect("m = 1 is valid"),
            Self::Hyper(h) => hyper_state(h),
        }
    }

    pub fn dofs(self) -> Vec<BellLabel> {
        match self {
            Self::Single(b) => vec![b],
            Self::Hyper(h) => h.dofs().to_vec(),
        }
    }

    /// The OAM label, if this is a pure OAM Bell state.
    pub fn as_oam(self) -> Option<OamBellLabel> {
        match self {
            Self::Single(BellLabel::Oam(o)) => Some(o),
            _ => None,
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Single(b) => b.fmt(f),
            Self::Hyper(h) => h.fmt(f),
        }
    }
}

impl FromStr for StateLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(" x ") {
            s.parse().map(Self::Hyper)
        } else {
            s.parse().map(Self::Single)
        }
    }
}

impl Serialize for StateLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StateLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Polarization Bell state; both photons carry OAM `+1`.
pub fn polarization_bell(label: PolBellLabel) -> TwoPhotonState {
    let pat = label.pattern();
    TwoPhotonState::from_entries(pairs().filter_map(|(a, b)| {
        if a.oam != OamSign::Plus || b.oam != OamSign::Plus {
            return None;
        }
        let amp = pat.amplitude(pol_level(a.pol), pol_level(b.pol));
        (amp != 0.0).then_some(((a, b), C64::new(amp, 0.0)))
    }))
}

/// OAM Bell state of order `m`; both photons are horizontally polarized.
pub fn oam_bell(label: OamBellLabel, m: i64) -> Result<TwoPhotonState, StateError> {
    check_order(m)?;
    let pat = label.pattern();
    TwoPhotonState::from_entries(pairs().filter_map(|(a, b)| {
        if a.pol != Polarization::H || b.pol != Polarization::H {
            return None;
        }
        let amp = pat.amplitude(oam_level(a.oam), oam_level(b.oam));
        (amp != 0.0).then_some(((a, b), C64::new(amp, 0.0)))
    }))
    .with_oam_order(m)
}

/// `amp((p1,o1),(p2,o2)) = pol(p1,p2) * oam(o1,o2)`.
pub fn hyper_state(label: HyperLabel) -> TwoPhotonState {
    let pp = label.pol.pattern();
    let op = label.oam.pattern();
    TwoPhotonState::from_entries(pairs().filter_map(|(a, b)| {
        let amp = pp.amplitude(pol_level(a.pol), pol_level(b.pol))
            * op.amplitude(oam_level(a.oam), oam_level(b.oam));
        (amp != 0.0).then_some(((a, b), C64::new(amp, 0.0)))
    }))
}

fn pairs() -> impl Iterator<Item = (InternalMode, InternalMode)> {
    InternalMode::ALL
        .into_iter()
        .flat_map(|a| InternalMode::ALL.into_iter().map(move |b| (a, b)))
}

/// Exchange symmetry of a two-photon state.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum SymmetryClass {
    /// Boson-like, `P|s> = |s>`.
    Symmetric,
    /// Fermion-like, `P|s> = -|s>`.
    Antisymmetric,
    /// Not an exchange eigenstate; carries `<s|P|s>`.
    Mixed(f64),
}

impl SymmetryClass {
    pub fn is_symmetric(self) -> bool {
        self == Self::Symmetric
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Symmetric => f.write_str("symmetric"),
            Self::Antisymmetric => f.write_str("antisymmetric"),
            Self::Mixed(s) => write!(f, "mixed({s:.6})"),
        }
    }
}

/// Classifies a normalized state with the swap operator.
pub fn classify_exchange(state: &TwoPhotonState) -> SymmetryClass {
    let swapped = state.exchange();
    if swapped.sub(state).norm_sqr().sqrt() < CLASSIFY_TOL {
        SymmetryClass::Symmetric
    } else if swapped.add(state).norm_sqr().sqrt() < CLASSIFY_TOL {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::Mixed(state.symmetry_expectation())
    }
}

/// A product of Bell states is antisymmetric iff it contains an odd number of
/// Fermion (singlet) factors. Works for any number of degrees of freedom.
pub fn parity_rule(labels: &[BellLabel]) -> Result<SymmetryClass, LabelError> {
    if labels.is_empty() {
        return Err(LabelError::Empty);
    }
    let fermions = labels.iter().filter(|l| l.is_fermion()).count();
    Ok(if fermions % 2 == 1 {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::Symmetric
    })
}
