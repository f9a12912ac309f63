use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub holds: bool,
    pub bound: f64,
    /// `bound - lhs`; negative iff the bound fails.
    pub margin: f64,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// `|c2| / 2 <= C(edges, 4)`.
pub fn check_stick_bound(edges: usize, c2: i64) -> BoundCheck {
    let bound = binomial(edges as u64, 4) as f64;
    let lhs = c2.unsigned_abs() as f64 / 2.0;
    BoundCheck {
        holds: lhs <= bound,
        bound,
        margin: bound - lhs,
    }
}

/// `|c2| <= (2n)^4` for a polynomial knot of degree `n`.
pub fn check_polynomial_bound(degree: usize, c2: i64) -> BoundCheck {
    let bound = ((2 * degree) as f64).powi(4);
    let lhs = c2.unsigned_abs() as f64;
    BoundCheck {
        holds: lhs <= bound,
        bound,
        margin: bound - lhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let t = check_stick_bound(3, 0);
        assert!(t.holds && t.margin == 0.0);
        assert!(check_stick_bound(6, 1).holds);
        assert_eq!(check_stick_bound(6, 1).bound, 15.0);
        assert_eq!(check_polynomial_bound(3, 0).bound, 1296.0);
        assert_eq!(check_polynomial_bound(5, 1).bound, 10000.0);
        assert!(!check_stick_bound(4, 3).holds);
        assert_eq!(binomial(32, 4), 35960);
    }
}
