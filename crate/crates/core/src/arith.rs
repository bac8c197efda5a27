//! Rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Splits an exponent into its integer floor and fractional part in [0,1).
pub fn split_exponent(e: &Q) -> (i64, Q) {
    let fl = e.floor();
    let k = fl.to_integer().to_i64().expect("exponent out of range");
    (k, e - fl)
}

/// Falling factorial s(s-1)...(s-m+1); equals 1 when m = 0.
pub fn falling_factorial(s: &Q, m: usize) -> Q {
    let mut acc = one();
    for i in 0..m {
        acc *= s - qi(i as i64);
    }
    acc
}

pub fn binom(n: usize, k: usize) -> Q {
    if k > n {
        return zero();
    }
    let mut acc = one();
    for i in 0..k {
        acc = acc * qi((n - i) as i64) / qi((i + 1) as i64);
    }
    acc
}

/// Integer power with a possibly negative exponent.
pub fn qpow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// x^e for a rational exponent when the value is rational (x = 1, or e an integer).
pub fn qpow_rat(x: &Q, e: &Q) -> Option<Q> {
    if e.is_integer() {
        return Some(qpow(x, e.to_integer().to_i64()?));
    }
    if x.is_one() {
        return Some(one());
    }
    if x.is_zero() && e.is_positive() {
        return Some(zero());
    }
    None
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // very large numerators: scale down through the exponent
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn lcm_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p` or `p/q`. Decimal literals are rejected.
pub fn parse_q(s: &str) -> Result<Q, crate::Error> {
    let t = s.trim();
    if t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(crate::Error::Parse {
            pos: 0,
            msg: format!("decimal literal `{t}` is not exact; write it as a fraction such as 1/2"),
        });
    }
    let bad = || crate::Error::Parse { pos: 0, msg: format!("`{t}` is not a rational number") };
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(crate::Error::Parse { pos: 0, msg: "division by zero".into() });
    }
    Ok(Q::new(n, d))
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}
