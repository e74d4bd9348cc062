//! Human-scale ↔ SI conversions used by the text formats.
//!
//! Text files carry nm, ps and degrees; values are converted to SI exactly
//! once when parsed. Printing searches for the decimal whose re-parse maps
//! back to the identical SI value, so parse → print → parse is lossless.

pub const NM: f64 = 1e-9;
pub const PS: f64 = 1e-12;
pub const DEG: f64 = std::f64::consts::PI / 180.0;

pub fn to_si(human: f64, factor: f64) -> f64 {
    human * factor
}

/// Inverse of [`to_si`], exact for every value that came out of `to_si`.
pub fn from_si(si: f64, factor: f64) -> f64 {
    let guess = si / factor;
    if !guess.is_finite() || guess * factor == si {
        return guess;
    }
    let mut up = guess;
    let mut down = guess;
    for _ in 0..8 {
        up = up.next_up();
        down = down.next_down();
        if up * factor == si {
            return up;
        }
        if down * factor == si {
            return down;
        }
    }
    guess
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_values() {
        assert_eq!(from_si(to_si(3.0, NM), NM), 3.0);
        assert_eq!(from_si(to_si(45.0, DEG), DEG), 45.0);
    }

    proptest! {
        #[test]
        fn lossless(x in -1e6f64..1e6, which in 0usize..3) {
            let factor = [NM, PS, DEG][which];
            let si = to_si(x, factor);
            let back = from_si(si, factor);
            prop_assert_eq!(to_si(back, factor), si);
            let printed: f64 = back.to_string().parse().unwrap();
            prop_assert_eq!(to_si(printed, factor), si);
        }
    }
}
