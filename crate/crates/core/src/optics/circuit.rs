//! Mode unitaries over (spatial path × internal mode), circuit composition and
//! the two-photon lift.

use std::collections::BTreeMap;

use nalgebra::{Matrix2, SMatrix};
use num_complex::Complex64 as C64;

use super::element::{bc_internal, ElementKind, ElementSetting, InternalOp, Placement, PortLabel};
use super::OpticsError;
use crate::state::{PairAmplitudes, TwoPhotonState};

/// Single-photon mode space dimension: 2 paths × 4 internal modes.
pub const MODE_DIM: usize = 8;

pub type ModeMatrix = SMatrix<C64, MODE_DIM, MODE_DIM>;

/// Mode index for `(path, internal)`.
pub fn mode_index(path: usize, internal: usize) -> usize {
    path * 4 + internal
}

/// A single-photon linear-optics transformation on the 8-dimensional mode space.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    matrix: ModeMatrix,
}

impl ModeUnitary {
    pub fn identity() -> Self {
        Self { matrix: ModeMatrix::identity() }
    }

    pub fn from_matrix(matrix: ModeMatrix) -> Self {
        Self { matrix }
    }

    /// `path_op ⊗ internal`.
    pub fn from_parts(path_op: &Matrix2<C64>, internal: &InternalOp) -> Self {
        Self {
            matrix: ModeMatrix::from_fn(|r, c| path_op[(r / 4, c / 4)] * internal[(r % 4, c % 4)]),
        }
    }

    /// Applies `op` to the photon on `port`'s path; identity on the other path.
    pub fn local(op: &InternalOp, port: PortLabel) -> Self {
        let path = port.path();
        let mut matrix = ModeMatrix::identity();
        for r in 0..4 {
            for c in 0..4 {
                matrix[(mode_index(path, r), mode_index(path, c))] = op[(r, c)];
            }
        }
        Self { matrix }
    }

    pub fn matrix(&self) -> &ModeMatrix {
        &self.matrix
    }

    /// The circuit `self` followed by `next`.
    pub fn then(&self, next: &ModeUnitary) -> ModeUnitary {
        Self { matrix: next.matrix * self.matrix }
    }

    /// Deviation `‖U†U − I‖` (Frobenius).
    pub fn unitarity_error(&self) -> f64 {
        (self.matrix.adjoint() * self.matrix - ModeMatrix::identity()).norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }
}

/// Sign convention of the 50:50 beam splitter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum BsConvention {
    /// `In1 -> (Out3 + Out4)/√2`, `In2 -> (Out3 − Out4)/√2`.
    #[default]
    Real,
    /// `In1 -> (Out3 + i Out4)/√2`, `In2 -> (i Out3 + Out4)/√2`.
    Symmetric,
}

impl BsConvention {
    /// 2x2 path matrix, row = output path, column = input path.
    pub fn path_matrix(self) -> Matrix2<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = C64::new(h, 0.0);
        match self {
            Self::Real => Matrix2::new(r, r, r, -r),
            Self::Symmetric => {
                let i = C64::new(0.0, h);
                Matrix2::new(r, i, i, r)
            }
        }
    }
}

/// Lossless 50:50 beam splitter, identity on internal modes.
pub fn bs_unitary() -> ModeUnitary {
    bs_unitary_with(BsConvention::Real)
}

pub fn bs_unitary_with(conv: BsConvention) -> ModeUnitary {
    ModeUnitary::from_parts(&conv.path_matrix(), &InternalOp::identity())
}

/// Per-reflection phase of the default polarizing beam splitter.
pub fn pbs_reflection_phase() -> C64 {
    C64::i()
}

/// Polarizing beam splitter: H transmits (path kept), V reflects onto the
/// other path picking up `pbs_reflection_phase()` per reflection.
pub fn pbs_unitary() -> ModeUnitary {
    pbs_unitary_with(pbs_reflection_phase())
}

pub fn pbs_unitary_with(reflection: C64) -> ModeUnitary {
    let mut m = ModeMatrix::zeros();
    for path in 0..2 {
        let other = 1 - path;
        for internal in 0..4 {
            let col = mode_index(path, internal);
            if internal < 2 {
                m[(col, col)] = C64::new(1.0, 0.0);
            } else {
                m[(mode_index(other, internal), col)] = reflection;
            }
        }
    }
    ModeUnitary::from_matrix(m)
}

/// Babinet compensator on one arm: `exp(i phi)` on V relative to H.
pub fn bc_unitary(phi: f64, arm: PortLabel) -> ModeUnitary {
    ModeUnitary::local(&bc_internal(phi), arm)
}

/// Mode unitary for one placed element.
pub fn element_unitary(setting: &ElementSetting, m: u32) -> Result<ModeUnitary, OpticsError> {
    setting.validate()?;
    Ok(match (setting.kind, setting.placement) {
        (ElementKind::BeamSplitter, _) => bs_unitary(),
        (ElementKind::PolarizingBeamSplitter, _) => pbs_unitary(),
        (kind, Placement::Arm(port)) => {
            let op = kind.internal_op(m).expect("per-arm element");
            ModeUnitary::local(&op, port)
        }
        (_, Placement::Both) => unreachable!("validated"),
    })
}

/// Composes elements in propagation order with OAM order 1.
pub fn compose_circuit(elements: &[ElementSetting]) -> Result<ModeUnitary, OpticsError> {
    compose_circuit_with_order(elements, 1)
}

/// Composes elements in propagation order. Every port segment must contain an
/// even number of mirrors so the OAM handedness is preserved along the path.
pub fn compose_circuit_with_order(
    elements: &[ElementSetting],
    m: u32,
) -> Result<ModeUnitary, OpticsError> {
    let mut mirrors: BTreeMap<PortLabel, usize> = BTreeMap::new();
    for e in elements {
        if let (ElementKind::Mirror, Placement::Arm(p)) = (e.kind, e.placement) {
            *mirrors.entry(p).or_default() += 1;
        }
    }
    if let Some((&port, &count)) = mirrors.iter().find(|(_, &n)| n % 2 == 1) {
        return Err(OpticsError::OddReflections { port, count });
    }
    elements.iter().try_fold(ModeUnitary::identity(), |acc, e| {
        Ok(acc.then(&element_unitary(e, m)?))
    })
}

/// A two-photon state over (path × internal) modes for each labeled photon.
///
/// Row index is photon 1's mode, column photon 2's. Photon 1 enters on path 0
/// (`In1`) and photon 2 on path 1 (`In2`).
#[derive(Clone, Debug, PartialEq)]
pub struct PortedState {
    amps: SMatrix<C64, MODE_DIM, MODE_DIM>,
    m: u32,
}

impl PortedState {
    pub fn from_inputs(state: &TwoPhotonState) -> Self {
        let mut amps = SMatrix::<C64, MODE_DIM, MODE_DIM>::zeros();
        let src = state.matrix();
        for a in 0..4 {
            for b in 0..4 {
                amps[(mode_index(0, a), mode_index(1, b))] = src[(a, b)];
            }
        }
        Self { amps, m: state.oam_order() }
    }

    pub fn amplitude(&self, mode1: usize, mode2: usize) -> C64 {
        self.amps[(mode1, mode2)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Labeled amplitudes with photon 1 on `path1` and photon 2 on `path2`.
    pub fn arm_state(&self, path1: usize, path2: usize) -> TwoPhotonState {
        let m = PairAmplitudes::from_fn(|a, b| self.amps[(mode_index(path1, a), mode_index(path2, b))]);
        TwoPhotonState::from_matrix(m)
            .with_oam_order(self.m as i64)
            .expect("order carried from a valid state")
    }

    /// Post-selects one photon per output. The photons are indistinguishable
    /// bosons, so the returned (unnormalized) amplitude for "mode `x` at Out3,
    /// mode `y` at Out4" is `ψ(3x, 4y) + ψ(4y, 3x)`; its squared norm is the
    /// coincidence probability. Row = Out3 photon, column = Out4 photon.
    pub fn coincidence_state(&self) -> TwoPhotonState {
        let m = PairAmplitudes::from_fn(|x, y| {
            self.amps[(mode_index(0, x), mode_index(1, y))]
                + self.amps[(mode_index(1, y), mode_index(0, x))]
        });
        TwoPhotonState::from_matrix(m)
            .with_oam_order(self.m as i64)
            .expect("order carried from a valid state")
    }

    /// Bosonic output statistics. Valid for states whose two labeled photons
    /// started in different paths, which every `U ⊗ U` image of
    /// [`PortedState::from_inputs`] satisfies.
    pub fn output_probabilities(&self) -> OutputProbabilities {
        let coincidence = self.coincidence_state().norm_sqr();
        let bunched = |path: usize| {
            let mut p = 0.0;
            for x in 0..4 {
                for y in 0..4 {
                    let (i, j) = (mode_index(path, x), mode_index(path, y));
                    p += 0.5 * (self.amps[(i, j)] + self.amps[(j, i)]).norm_sqr();
                }
            }
            p
        };
        OutputProbabilities { coincidence, bunched_out3: bunched(0), bunched_out4: bunched(1) }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct OutputProbabilities {
    pub coincidence: f64,
    pub bunched_out3: f64,
    pub bunched_out4: f64,
}

impl OutputProbabilities {
    pub fn total(&self) -> f64 {
        self.coincidence + self.bunched_out3 + self.bunched_out4
    }
}

/// `U ⊗ U`: every labeled photon sees the same mode unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonTransform {
    unitary: ModeUnitary,
}

pub fn lift_two_photon(u: &ModeUnitary) -> TwoPhotonTransform {
    TwoPhotonTransform { unitary: u.clone() }
}

impl TwoPhotonTransform {
    pub fn apply(&self, state: &PortedState) -> PortedState {
        let u = &self.unitary.matrix;
        PortedState { amps: u * state.amps * u.transpose(), m: state.m }
    }

    /// Convenience for per-arm circuits: embeds `state` at the inputs, applies
    /// the transform and reads the photons back on their input paths.
    pub fn apply_on_arms(&self, state: &TwoPhotonState) -> TwoPhotonState {
        self.apply(&PortedState::from_inputs(state)).arm_state(0, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{polarization_bell, PolBellLabel};
    use crate::optics::element::hwp_unitary;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn fixed_elements_are_unitary() {
        assert!(bs_unitary().is_unitary(1e-15));
        assert!(bs_unitary_with(BsConvention::Symmetric).is_unitary(1e-15));
        assert!(pbs_unitary().is_unitary(1e-15));
        for k in 0..20 {
            assert!(bc_unitary(k as f64 * 0.4, PortLabel::Out4).is_unitary(1e-12));
        }
    }

    #[test]
    fn bs_single_photon_splits_evenly() {
        let u = bs_unitary();
        let col = mode_index(0, 0);
        assert_abs_diff_eq!(u.matrix()[(mode_index(0, 0), col)].norm_sqr(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(u.matrix()[(mode_index(1, 0), col)].norm_sqr(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pbs_routes_by_polarization() {
        let u = pbs_unitary();
        // H+ in In1 stays in Out3
        assert_eq!(u.matrix()[(mode_index(0, 0), mode_index(0, 0))], C64::new(1.0, 0.0));
        // V+ in In1 reflects to Out4 with amplitude i
        assert_eq!(u.matrix()[(mode_index(1, 2), mode_index(0, 2))], C64::i());
        assert_eq!(u.matrix()[(mode_index(0, 2), mode_index(0, 2))], C64::new(0.0, 0.0));
    }

    #[test]
    fn empty_circuit_is_identity() {
        assert_eq!(compose_circuit(&[]).unwrap(), ModeUnitary::identity());
    }

    #[test]
    fn odd_mirrors_rejected() {
        let m = ElementSetting::on(PortLabel::In1, ElementKind::Mirror);
        assert_eq!(
            compose_circuit(&[m]),
            Err(OpticsError::OddReflections { port: PortLabel::In1, count: 1 })
        );
        let u = compose_circuit(&[m, m]).unwrap();
        assert!((u.matrix() - ModeMatrix::identity()).norm() < 1e-15);
    }

    #[test]
    fn hwp_on_arm1_maps_phi_plus_to_psi_plus() {
        let u = ModeUnitary::local(&hwp_unitary(FRAC_PI_4), PortLabel::In1);
        let out = lift_two_photon(&u).apply_on_arms(&polarization_bell(PolBellLabel::PhiPlus));
        let target = polarization_bell(PolBellLabel::PsiPlus);
        assert_abs_diff_eq!(out.fidelity(&target), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn bs_distinguishable_photons_give_half() {
        use crate::state::{InternalMode, OamSign, Polarization};
        let h = InternalMode::new(Polarization::H, OamSign::Plus);
        let v = InternalMode::new(Polarization::V, OamSign::Plus);
        let s = TwoPhotonState::from_entries([((h, v), C64::new(1.0, 0.0))]);
        let out = lift_two_photon(&bs_unitary()).apply(&PortedState::from_inputs(&s));
        let p = out.output_probabilities();
        assert_abs_diff_eq!(p.coincidence, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.total(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn singlet_always_coincides() {
        let s = polarization_bell(PolBellLabel::PsiMinus);
        let out = lift_two_photon(&bs_unitary()).apply(&PortedState::from_inputs(&s));
        assert_abs_diff_eq!(out.output_probabilities().coincidence, 1.0, epsilon = 1e-15);
    }
}
