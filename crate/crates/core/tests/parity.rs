//! The Fermion-counting rule against brute-force swap symmetry of explicit
//! tensor products of up to four two-level degrees of freedom.

use num_complex::Complex64 as C64;

use hyperhom::bell::{parity_rule, BellLabel, OamBellLabel, PolBellLabel, SymmetryClass};

/// Bell state of one two-level DoF as a 4-vector indexed `2 * a + b`.
fn bell(correlated: bool, minus: bool) -> [C64; 4] {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let sign = if minus { -h } else { h };
    let zero = C64::new(0.0, 0.0);
    if correlated {
        [h, zero, zero, sign]
    } else {
        [zero, h, sign, zero]
    }
}

/// Joint amplitudes over photon-1 digits (a_1..a_k) and photon-2 digits
/// (b_1..b_k), flattened as index(a) * 2^k + index(b).
fn product(factors: &[[C64; 4]]) -> Vec<C64> {
    let k = factors.len();
    let n = 1 << k;
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for b in 0..n {
            let mut z = C64::new(1.0, 0.0);
            for (d, f) in factors.iter().enumerate() {
                let (ad, bd) = ((a >> d) & 1, (b >> d) & 1);
                z *= f[2 * ad + bd];
            }
            out[a * n + b] = z;
        }
    }
    out
}

fn swap_class(v: &[C64], n: usize) -> SymmetryClass {
    let swapped: Vec<C64> = (0..n * n).map(|i| v[(i % n) * n + i / n]).collect();
    let diff: f64 = v.iter().zip(&swapped).map(|(x, y)| (x - y).norm_sqr()).sum();
    let sum: f64 = v.iter().zip(&swapped).map(|(x, y)| (x + y).norm_sqr()).sum();
    if diff < 1e-20 {
        SymmetryClass::Symmetric
    } else if sum < 1e-20 {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::Mixed(f64::NAN)
    }
}

fn labels() -> Vec<(BellLabel, [C64; 4])> {
    vec![
        (BellLabel::Pol(PolBellLabel::PhiPlus), bell(true, false)),
        (BellLabel::Pol(PolBellLabel::PhiMinus), bell(true, true)),
        (BellLabel::Pol(PolBellLabel::PsiPlus), bell(false, false)),
        (BellLabel::Pol(PolBellLabel::PsiMinus), bell(false, true)),
        (BellLabel::Oam(OamBellLabel::MuPlus), bell(true, false)),
        (BellLabel::Oam(OamBellLabel::MuMinus), bell(true, true)),
        (BellLabel::Oam(OamBellLabel::NuPlus), bell(false, false)),
        (BellLabel::Oam(OamBellLabel::NuMinus), bell(false, true)),
    ]
}

#[test]
fn parity_rule_matches_brute_force_up_to_four_dofs() {
    let all = labels();
    let mut checked = 0;
    for k in 1..=4u32 {
        for combo in 0..all.len().pow(k) {
            let picks: Vec<usize> = (0..k).map(|d| combo / all.len().pow(d) % all.len()).collect();
            let names: Vec<BellLabel> = picks.iter().map(|&i| all[i].0).collect();
            let factors: Vec<[C64; 4]> = picks.iter().map(|&i| all[i].1).collect();
            let brute = swap_class(&product(&factors), 1 << k);
            assert_eq!(parity_rule(&names).unwrap(), brute, "{names:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 8 + 64 + 512 + 4096);
}

#[test]
fn empty_label_list_is_rejected() {
    assert!(parity_rule(&[]).is_err());
}
