//! Optical elements and their single-photon actions.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, SMatrix};
use num_complex::Complex64 as C64;

use super::OpticsError;
use crate::units::{from_si, to_si, DEG, PS};

/// A 4x4 operator on the internal modes (H+, H-, V+, V-) of one photon.
pub type InternalOp = SMatrix<C64, 4, 4>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds `pol ⊗ oam` in the canonical (pol-major) internal ordering.
pub fn internal_op(pol: &Matrix2<C64>, oam: &Matrix2<C64>) -> InternalOp {
    InternalOp::from_fn(|r, col| pol[(r / 2, col / 2)] * oam[(r % 2, col % 2)])
}

fn on_pol(pol: Matrix2<C64>) -> InternalOp {
    internal_op(&pol, &Matrix2::identity())
}

fn on_oam(oam: Matrix2<C64>) -> InternalOp {
    internal_op(&Matrix2::identity(), &oam)
}

/// Half-wave plate with fast axis at `theta` from horizontal.
pub fn hwp_unitary(theta: f64) -> InternalOp {
    let (s, co) = (2.0 * theta).sin_cos();
    on_pol(Matrix2::new(c(co, 0.0), c(s, 0.0), c(s, 0.0), c(-co, 0.0)))
}

/// Quarter-wave plate with fast axis at `theta`; `diag(1, i)` at zero angle.
pub fn qwp_unitary(theta: f64) -> InternalOp {
    let (s, co) = theta.sin_cos();
    let i = C64::i();
    on_pol(Matrix2::new(
        co * co + i * s * s,
        (1.0 - i) * s * co,
        (1.0 - i) * s * co,
        s * s + i * co * co,
    ))
}

/// Dove prism rotated by `alpha`: `|±m> -> exp(∓ 2 i m alpha) |∓m>`.
pub fn dove_unitary(alpha: f64, m: u32) -> InternalOp {
    let phase = 2.0 * m as f64 * alpha;
    let zero = c(0.0, 0.0);
    // column = input (+, -), row = output (+, -)
    on_oam(Matrix2::new(
        zero,
        C64::from_polar(1.0, phase),
        C64::from_polar(1.0, -phase),
        zero,
    ))
}

/// A single reflection flips the OAM handedness.
pub fn mirror_unitary() -> InternalOp {
    let (zero, one) = (c(0.0, 0.0), c(1.0, 0.0));
    on_oam(Matrix2::new(zero, one, one, zero))
}

/// Phase `exp(i phi)` on V relative to H.
pub fn bc_internal(phi: f64) -> InternalOp {
    on_pol(Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, phi)))
}

/// Spatial ports of the interference unit.
///
/// `In1`/`Out3` share spatial path 0 and `In2`/`Out4` path 1: a beam splitter
/// maps the photon in `In1` onto `Out3` and `Out4`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortLabel {
    In1,
    In2,
    Out3,
    Out4,
}

impl PortLabel {
    pub const ALL: [Self; 4] = [Self::In1, Self::In2, Self::Out3, Self::Out4];

    pub fn path(self) -> usize {
        match self {
            Self::In1 | Self::Out3 => 0,
            Self::In2 | Self::Out4 => 1,
        }
    }
}

impl fmt::Display for PortLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::In1 => "arm1",
            Self::In2 => "arm2",
            Self::Out3 => "out3",
            Self::Out4 => "out4",
        })
    }
}

impl FromStr for PortLabel {
    type Err = OpticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "arm1" | "in1" => Ok(Self::In1),
            "arm2" | "in2" => Ok(Self::In2),
            "out3" => Ok(Self::Out3),
            "out4" => Ok(Self::Out4),
            other => Err(OpticsError::BadSetting(format!("unknown arm `{other}`"))),
        }
    }
}

/// Where an element sits: on one port or across both paths.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Placement {
    Arm(PortLabel),
    Both,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Arm(p) => p.fmt(f),
            Self::Both => f.write_str("both"),
        }
    }
}

/// Element kinds. Angles are in radians, delays in seconds.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum ElementKind {
    Hwp(f64),
    Qwp(f64),
    DovePrism(f64),
    BabinetCompensator(f64),
    Mirror,
    /// Acts only on the temporal envelope; identity on internal modes.
    DelayLine(f64),
    BeamSplitter,
    PolarizingBeamSplitter,
}

impl ElementKind {
    pub fn spans_both(&self) -> bool {
        matches!(self, Self::BeamSplitter | Self::PolarizingBeamSplitter)
    }

    /// Single-photon action for per-arm elements.
    pub fn internal_op(&self, m: u32) -> Option<InternalOp> {
        Some(match *self {
            Self::Hwp(t) => hwp_unitary(t),
            Self::Qwp(t) => qwp_unitary(t),
            Self::DovePrism(a) => dove_unitary(a, m),
            Self::BabinetCompensator(p) => bc_internal(p),
            Self::Mirror => mirror_unitary(),
            Self::DelayLine(_) => InternalOp::identity(),
            Self::BeamSplitter | Self::PolarizingBeamSplitter => return None,
        })
    }
}

/// An element and its placement, e.g. `arm1: HWP 45deg` or `both: BS`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ElementSetting {
    pub kind: ElementKind,
    pub placement: Placement,
}

impl ElementSetting {
    pub fn on(arm: PortLabel, kind: ElementKind) -> Self {
        Self { kind, placement: Placement::Arm(arm) }
    }

    pub fn both(kind: ElementKind) -> Self {
        Self { kind, placement: Placement::Both }
    }

    pub fn validate(&self) -> Result<(), OpticsError> {
        match (self.kind.spans_both(), self.placement) {
            (true, Placement::Arm(_)) => Err(OpticsError::BadSetting(format!(
                "{self}: beam splitters act on both paths"
            ))),
            (false, Placement::Both) => Err(OpticsError::BadSetting(format!(
                "{self}: this element sits on a single arm"
            ))),
            _ => Ok(()),
        }
    }
}

fn deg(rad: f64) -> f64 {
    from_si(rad, DEG)
}

impl fmt::Display for ElementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.placement)?;
        match self.kind {
            ElementKind::Hwp(t) => write!(f, "HWP {}deg", deg(t)),
            ElementKind::Qwp(t) => write!(f, "QWP {}deg", deg(t)),
            ElementKind::DovePrism(a) => write!(f, "DP {}deg", deg(a)),
            ElementKind::BabinetCompensator(p) => write!(f, "BC {}deg", deg(p)),
            ElementKind::Mirror => write!(f, "Mirror"),
            ElementKind::DelayLine(t) => write!(f, "Delay {}ps", from_si(t, PS)),
            ElementKind::BeamSplitter => write!(f, "BS"),
            ElementKind::PolarizingBeamSplitter => write!(f, "PBS"),
        }
    }
}

fn parse_quantity(s: &str, suffix: &str, factor: f64) -> Result<f64, OpticsError> {
    let num = s
        .strip_suffix(suffix)
        .ok_or_else(|| OpticsError::BadSetting(format!("`{s}` needs the unit `{suffix}`")))?;
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| OpticsError::BadSetting(format!("`{num}` is not a number")))?;
    if !v.is_finite() {
        return Err(OpticsError::BadSetting(format!("`{num}` is not finite")));
    }
    Ok(to_si(v, factor))
}

impl FromStr for ElementSetting {
    type Err = OpticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (place, rest) = s
            .split_once(':')
            .ok_or_else(|| OpticsError::BadSetting(format!("`{}` lacks `<arm>:`", s.trim())))?;
        let placement = match place.trim() {
            "both" => Placement::Both,
            arm => Placement::Arm(arm.parse()?),
        };
        let mut words = rest.split_whitespace();
        let name = words.next().ok_or_else(|| OpticsError::UnknownElement(String::new()))?;
        let arg = words.next();
        if words.next().is_some() {
            return Err(OpticsError::BadSetting(format!("trailing input in `{}`", s.trim())));
        }
        let need = || arg.ok_or_else(|| OpticsError::BadSetting(format!("{name} needs an argument")));
        let no_arg = |kind: ElementKind| match arg {
            None => Ok(kind),
            Some(a) => Err(OpticsError::BadSetting(format!("{name} takes no argument, got `{a}`"))),
        };
        let kind = match name {
            "HWP" => ElementKind::Hwp(parse_quantity(need()?, "deg", DEG)?),
            "QWP" => ElementKind::Qwp(parse_quantity(need()?, "deg", DEG)?),
            "DP" => ElementKind::DovePrism(parse_quantity(need()?, "deg", DEG)?),
            "BC" => ElementKind::BabinetCompensator(parse_quantity(need()?, "deg", DEG)?),
            "Delay" => ElementKind::DelayLine(parse_quantity(need()?, "ps", PS)?),
            "Mirror" => no_arg(ElementKind::Mirror)?,
            "BS" => no_arg(ElementKind::BeamSplitter)?,
            "PBS" => no_arg(ElementKind::PolarizingBeamSplitter)?,
            other => return Err(OpticsError::UnknownElement(other.to_string())),
        };
        let setting = Self { kind, placement };
        setting.validate()?;
        Ok(setting)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    const HP: usize = 0;
    const HM: usize = 1;
    const VP: usize = 2;
    const VM: usize = 3;

    fn assert_close(a: C64, b: C64) {
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
        assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
    }

    fn is_unitary(u: &InternalOp) -> bool {
        (u.adjoint() * u - InternalOp::identity()).norm() < 1e-12
    }

    #[test]
    fn hwp_special_angles() {
        let u = hwp_unitary(0.0);
        assert_close(u[(HP, HP)], c(1.0, 0.0));
        assert_close(u[(VP, VP)], c(-1.0, 0.0));
        let u = hwp_unitary(FRAC_PI_4);
        assert_close(u[(VP, HP)], c(1.0, 0.0));
        assert_close(u[(HP, VP)], c(1.0, 0.0));
        assert_close(u[(HP, HP)], c(0.0, 0.0));
        let u = hwp_unitary(FRAC_PI_8);
        assert_close(u[(HP, HP)], c(FRAC_1_SQRT_2, 0.0));
        assert_close(u[(VP, HP)], c(FRAC_1_SQRT_2, 0.0));
        // OAM untouched
        assert_close(u[(HM, HP)], c(0.0, 0.0));
        assert_close(u[(VM, HM)], c(FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn qwp_special_angles() {
        let u = qwp_unitary(0.0);
        assert_close(u[(HP, HP)], c(1.0, 0.0));
        assert_close(u[(VP, VP)], c(0.0, 1.0));
        // H -> circular: equal magnitudes, quarter-wave relative phase
        let u = qwp_unitary(FRAC_PI_4);
        let (h, v) = (u[(HP, HP)], u[(VP, HP)]);
        assert_abs_diff_eq!(h.norm(), FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(v.norm(), FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!((v / h).arg().abs(), FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn dove_prism_flip_and_phase() {
        let u = dove_unitary(0.0, 1);
        assert_close(u[(HM, HP)], c(1.0, 0.0));
        assert_close(u[(HP, HM)], c(1.0, 0.0));
        let u = dove_unitary(FRAC_PI_2, 1);
        assert_close(u[(HM, HP)], c(-1.0, 0.0));
        assert_close(u[(VM, VP)], c(-1.0, 0.0));
        // m = 2 doubles the phase: exp(-i*4*pi/8) = -i
        let u = dove_unitary(FRAC_PI_8, 2);
        assert_close(u[(HM, HP)], c(0.0, -1.0));
    }

    #[test]
    fn mirrors_flip_oam() {
        let u = mirror_unitary();
        assert_close(u[(HM, HP)], c(1.0, 0.0));
        let uu = u * u;
        assert!((uu - InternalOp::identity()).norm() < 1e-15);
    }

    #[test]
    fn bc_phases() {
        assert!((bc_internal(0.0) - InternalOp::identity()).norm() < 1e-15);
        assert_close(bc_internal(FRAC_PI_2)[(VP, VP)], c(0.0, 1.0));
    }

    #[test]
    fn all_elements_unitary() {
        for k in 0..50 {
            let t = k as f64 * 0.37 - 5.0;
            for m in 1..4 {
                for u in [hwp_unitary(t), qwp_unitary(t), dove_unitary(t, m), bc_internal(t)] {
                    assert!(is_unitary(&u));
                }
            }
        }
        assert!(is_unitary(&mirror_unitary()));
    }

    #[test]
    fn setting_text_roundtrip() {
        for text in [
            "arm1: HWP 45deg",
            "arm2: QWP -22.5deg",
            "arm1: DP 0deg",
            "out4: BC -180deg",
            "arm2: Mirror",
            "arm2: Delay 0.15ps",
            "both: BS",
            "both: PBS",
        ] {
            let s: ElementSetting = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        let s: ElementSetting = "arm1: HWP 45deg".parse().unwrap();
        assert_eq!(s.kind, ElementKind::Hwp(FRAC_PI_4));
    }

    #[test]
    fn setting_text_errors() {
        assert!(matches!("arm1: Lens 3deg".parse::<ElementSetting>(), Err(OpticsError::UnknownElement(_))));
        assert!("arm1: BS".parse::<ElementSetting>().is_err());
        assert!("both: HWP 3deg".parse::<ElementSetting>().is_err());
        assert!("arm1: HWP 3".parse::<ElementSetting>().is_err());
        assert!("arm3: HWP 3deg".parse::<ElementSetting>().is_err());
        assert!("HWP 3deg".parse::<ElementSetting>().is_err());
        assert!("arm1: Mirror 2deg".parse::<ElementSetting>().is_err());
    }
}
