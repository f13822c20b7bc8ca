//! Wigner 3j symbols by the Racah sum.
//!
//! Angular momenta are carried as doubled integers so half-integers stay
//! exact; factorials are exact `u128` values converted to `f64` per term.

use crate::error::{Error, Result};

const MAX_FACTORIAL: usize = 34;

fn factorial(n: i64) -> f64 {
    debug_assert!(n >= 0 && (n as usize) <= MAX_FACTORIAL);
    let mut acc: u128 = 1;
    for i in 2..=n as u128 {
        acc *= i;
    }
    acc as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThreeJSymbol {
    pub two_j: [i64; 3],
    pub two_m: [i64; 3],
}

fn doubled(x: f64, what: &str) -> Result<i64> {
    let d = 2.0 * x;
    if !d.is_finite() || (d - d.round()).abs() > 1e-9 {
        return Err(Error::InvalidAngularMomentum(format!(
            "{what} = {x} is not a multiple of 1/2"
        )));
    }
    Ok(d.round() as i64)
}

impl ThreeJSymbol {
    pub fn new(j: [f64; 3], m: [f64; 3]) -> Result<Self> {
        let mut two_j = [0; 3];
        let mut two_m = [0; 3];
        for i in 0..3 {
            two_j[i] = doubled(j[i], "j")?;
            two_m[i] = doubled(m[i], "m")?;
            if two_j[i] < 0 {
                return Err(Error::InvalidAngularMomentum(format!(
                    "j = {} is negative",
                    j[i]
                )));
            }
        }
        Self::from_doubled(two_j, two_m)
    }

    pub fn from_doubled(two_j: [i64; 3], two_m: [i64; 3]) -> Result<Self> {
        if two_j.iter().any(|&j| j < 0) {
            return Err(Error::InvalidAngularMomentum("negative j".into()));
        }
        if two_j.iter().sum::<i64>() / 2 + 1 > MAX_FACTORIAL as i64 {
            return Err(Error::InvalidAngularMomentum(
                "angular momenta too large for exact factorials".into(),
            ));
        }
        Ok(Self { two_j, two_m })
    }

    /// Whether the symbol can be nonzero.
    pub fn allowed(&self) -> bool {
        let [j1, j2, j3] = self.two_j;
        let [m1, m2, m3] = self.two_m;
        if m1 + m2 + m3 != 0 {
            return false;
        }
        for i in 0..3 {
            if self.two_m[i].abs() > self.two_j[i] || (self.two_j[i] + self.two_m[i]) % 2 != 0 {
                return false;
            }
        }
        if (j1 + j2 + j3) % 2 != 0 {
            return false;
        }
        j3 <= j1 + j2 && j3 >= (j1 - j2).abs()
    }

    pub fn value(&self) -> f64 {
        if !self.allowed() {
            return 0.0;
        }
        // Everything below is an integer once halved.
        let [tj1, tj2, tj3] = self.two_j;
        let [tm1, tm2, tm3] = self.two_m;
        let h = |x: i64| x / 2;

        let triangle = factorial(h(tj1 + tj2 - tj3))
            * factorial(h(tj1 - tj2 + tj3))
            * factorial(h(-tj1 + tj2 + tj3))
            / factorial(h(tj1 + tj2 + tj3) + 1);
        let projections = factorial(h(tj1 + tm1))
            * factorial(h(tj1 - tm1))
            * factorial(h(tj2 + tm2))
            * factorial(h(tj2 - tm2))
            * factorial(h(tj3 + tm3))
            * factorial(h(tj3 - tm3));

        let a1 = h(tj3 - tj2 + tm1);
        let a2 = h(tj3 - tj1 - tm2);
        let b1 = h(tj1 + tj2 - tj3);
        let b2 = h(tj1 - tm1);
        let b3 = h(tj2 + tm2);
        let k_min = 0.max(-a1).max(-a2);
        let k_max = b1.min(b2).min(b3);

        let mut sum = 0.0;
        for k in k_min..=k_max {
            let denom = factorial(k)
                * factorial(a1 + k)
                * factorial(a2 + k)
                * factorial(b1 - k)
                * factorial(b2 - k)
                * factorial(b3 - k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign / denom;
        }

        let phase_exp = h(tj1 - tj2 - tm3);
        let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        phase * (triangle * projections).sqrt() * sum
    }
}

/// `(j1 j2 j3; m1 m2 m3)` for half-integral arguments.
pub fn wigner_3j(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> Result<f64> {
    Ok(ThreeJSymbol::new([j1, j2, j3], [m1, m2, m3])?.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_rule_zero() {
        assert_eq!(wigner_3j(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(wigner_3j(1.0, 1.0, 3.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(wigner_3j(0.5, 0.5, 1.0, 1.5, -0.5, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_half_integral() {
        assert!(matches!(
            wigner_3j(0.3, 1.0, 1.0, 0.0, 0.0, 0.0),
            Err(Error::InvalidAngularMomentum(_))
        ));
        assert!(wigner_3j(-1.0, 1.0, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn monopole_column_closed_form() {
        for two_s in 1..=6i64 {
            let s = two_s as f64 / 2.0;
            let mut n = -s;
            while n <= s + 1e-9 {
                let v = wigner_3j(s, 0.0, s, -n, 0.0, n).unwrap();
                let sign = if ((s - n).round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
                let expected = sign / (2.0 * s + 1.0).sqrt();
                assert!((v - expected).abs() < 1e-14, "S={s} n={n}");
                n += 1.0;
            }
        }
    }

    #[test]
    fn known_values() {
        // (1/2 1/2 1; 1/2 -1/2 0) = 1/√6
        let v = wigner_3j(0.5, 0.5, 1.0, 0.5, -0.5, 0.0).unwrap();
        assert!((v - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        // (1 1 0; 0 0 0) = -1/√3
        let v = wigner_3j(1.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!((v + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        // (2 2 2; 0 0 0) = -√(2/35)
        let v = wigner_3j(2.0, 2.0, 2.0, 0.0, 0.0, 0.0).unwrap();
        assert!((v + (2.0f64 / 35.0).sqrt()).abs() < 1e-15);
    }
}
