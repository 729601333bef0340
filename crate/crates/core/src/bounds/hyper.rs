use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Monomials (coefficient, power of n, power of r, power of s) of the
/// numerator of the conditional-mean variance under the marked-ball coupling.
const NUMERATOR: [(i64, u32, u32, u32); 54] = [
    (1, 1, 1, 1),
    (-1, 3, 1, 1),
    (-1, 0, 2, 1),
    (5, 2, 2, 1),
    (2, 3, 2, 1),
    (-8, 1, 3, 1),
    (-8, 2, 3, 1),
    (2, 1, 1, 5),
    (-1, 3, 3, 1),
    (4, 0, 4, 1),
    (10, 1, 4, 1),
    (3, 2, 4, 1),
    (-4, 0, 5, 1),
    (-3, 1, 5, 1),
    (1, 0, 6, 1),
    (1, 1, 0, 2),
    (-1, 3, 0, 2),
    (-2, 0, 1, 2),
    (4, 2, 1, 2),
    (-2, 3, 1, 2),
    (-14, 1, 2, 2),
    (-4, 2, 2, 2),
    (1, 3, 2, 2),
    (12, 0, 3, 2),
    (20, 1, 3, 2),
    (2, 2, 3, 2),
    (-14, 0, 4, 2),
    (-7, 1, 4, 2),
    (4, 0, 5, 2),
    (-1, 0, 0, 3),
    (-1, 2, 0, 3),
    (2, 3, 0, 3),
    (-5, 1, 1, 3),
    (4, 2, 1, 3),
    (1, 3, 1, 3),
    (13, 0, 2, 3),
    (8, 1, 2, 3),
    (-4, 2, 2, 3),
    (-18, 0, 3, 3),
    (-3, 1, 3, 3),
    (6, 0, 4, 3),
    (1, 1, 0, 4),
    (-1, 3, 0, 4),
    (6, 0, 1, 4),
    (-4, 1, 1, 4),
    (-2, 2, 1, 4),
    (-10, 0, 2, 4),
    (3, 1, 2, 4),
    (4, 0, 3, 4),
    (1, 0, 0, 5),
    (-2, 1, 0, 5),
    (1, 2, 0, 5),
    (-2, 0, 1, 5),
    (1, 0, 2, 5),
];

/// Var(E[D | N]) for the marked-ball coupling of Hyp(n; r, s), as an exact
/// rational.
pub fn hyper_eps(n: u64, r: u64, s: u64) -> Result<BigRational> {
    if n == 0 || n > r.min(s) {
        return Err(Error::InvalidParameter(format!("need 1 <= n <= min(r, s), got n={n}, r={r}, s={s}")));
    }
    if r + s <= 3 {
        return Err(Error::InvalidParameter("need r + s >= 4".into()));
    }
    let (bn, br, bs) = (BigInt::from(n), BigInt::from(r), BigInt::from(s));
    let mut num = BigInt::zero();
    for &(c, pn, pr, ps) in NUMERATOR.iter() {
        num += BigInt::from(c) * bn.pow(pn) * br.pow(pr) * bs.pow(ps);
    }
    let t = &br + &bs;
    let one = BigInt::from(1);
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let t1 = &t - &one;
    let den = &bn * &br * &t * &t * &t1 * &t1 * (&t - &two) * (&t - &three);
    Ok(BigRational::new(num, den))
}

/// [`hyper_eps`] rounded to the nearest double.
pub fn hyper_eps_f64(n: u64, r: u64, s: u64) -> Result<f64> {
    Ok(hyper_eps(n, r, s)?.to_f64().unwrap_or(f64::NAN))
}
