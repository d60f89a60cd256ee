//! Elements of Q(zeta_m) as reduced rational coefficient vectors.
//!
//! An element is a polynomial in z = zeta_m of degree < m, kept in the
//! canonical normal form obtained by reducing modulo Phi_m(z). Since Phi_m is
//! irreducible over Q, the quotient is a field and equality of reduced
//! coefficient vectors decides equality of values. Mixed-order arithmetic
//! promotes both operands to the lcm of their orders via
//! zeta_m^j -> zeta_M^(j*M/m).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num::bigint::BigInt;
use num::{Complex, Integer, One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use super::{Rational, MAX_CYCLOTOMIC_ORDER};
use crate::error::{QaleError, Result};

/// Cached data for one cyclotomic order: the monic polynomial Phi_m as an
/// integer coefficient vector (ascending degree) and its degree phi(m).
struct OrderData {
    phi: Vec<BigInt>,
    degree: usize,
}

static ORDER_CACHE: Lazy<Mutex<HashMap<usize, Arc<OrderData>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn divisors(n: usize) -> Vec<usize> {
    let mut divs = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            divs.push(i);
            if i != n / i {
                divs.push(n / i);
            }
        }
        i += 1;
    }
    divs.sort_unstable();
    divs
}

/// Exact division of integer polynomials, used by the Phi_m recursion.
/// Both inputs ascending-degree; the divisor must be monic and divide evenly.
fn exact_poly_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    assert!(nd >= dd);
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            for (i, d) in den.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
        }
        quot[k] = c;
    }
    assert!(
        rem.iter().all(|c| c.is_zero()),
        "non-exact polynomial division"
    );
    quot
}

/// Compute Phi_m(z) by dividing z^m - 1 by the product of Phi_d for all
/// proper divisors d of m.
pub fn cyclotomic_polynomial(m: usize) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic order must be positive");
    order_data(m).phi.clone()
}

fn order_data(m: usize) -> Arc<OrderData> {
    assert!(
        (1..=MAX_CYCLOTOMIC_ORDER).contains(&m),
        "cyclotomic order {m} outside supported range"
    );
    let cache = ORDER_CACHE.lock().unwrap();
    if let Some(d) = cache.get(&m) {
        return d.clone();
    }
    // Collect the divisor polynomials first; recursion via the same cache.
    drop(cache);
    let phi = if m == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        let mut num = vec![BigInt::zero(); m + 1];
        num[0] = BigInt::from(-1);
        num[m] = BigInt::from(1);
        let mut poly = num;
        for d in divisors(m) {
            if d == m {
                continue;
            }
            let phi_d = order_data(d).phi.clone();
            poly = exact_poly_div(&poly, &phi_d);
        }
        poly
    };
    let degree = phi.len() - 1;
    let data = Arc::new(OrderData { phi, degree });
    let mut cache = ORDER_CACHE.lock().unwrap();
    cache.entry(m).or_insert_with(|| data.clone());
    cache.get(&m).unwrap().clone()
}

/// An element of Q(zeta_m), stored as `coeffs[j] * zeta_m^j` with the vector
/// reduced modulo Phi_m (so `coeffs[j] = 0` for `j >= phi(m)`). The vector
/// always has length `order`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNumber {
    order: usize,
    coeffs: Vec<Rational>,
}

impl CycNumber {
    /// Build from an arbitrary coefficient vector (any length); exponents are
    /// folded modulo the order and the result is reduced modulo Phi_m.
    pub fn from_coeffs(order: usize, coeffs: &[Rational]) -> Result<Self> {
        if order == 0 || order > MAX_CYCLOTOMIC_ORDER {
            return Err(QaleError::OrderTooLarge(order));
        }
        let mut folded = vec![Rational::zero(); order];
        for (j, c) in coeffs.iter().enumerate() {
            folded[j % order] += c;
        }
        Ok(Self::reduced(order, folded))
    }

    /// Reduce a length-`order` vector modulo Phi_order. Internal entry point;
    /// assumes the order guard already passed.
    fn reduced(order: usize, mut coeffs: Vec<Rational>) -> Self {
        debug_assert_eq!(coeffs.len(), order);
        let data = order_data(order);
        let deg = data.degree;
        if order > 1 {
            for k in (deg..order).rev() {
                let c = std::mem::replace(&mut coeffs[k], Rational::zero());
                if !c.is_zero() {
                    // z^k = z^(k-deg) * (z^deg - Phi_m(z))   [Phi_m monic]
                    for (i, p) in data.phi.iter().enumerate().take(deg) {
                        let pr = Rational::from_integer(p.clone());
                        coeffs[k - deg + i] -= &c * pr;
                    }
                }
            }
        }
        CycNumber { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        let _ = order_data(order);
        CycNumber {
            order,
            coeffs: vec![Rational::zero(); order],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::from_rational(order, Rational::one())
    }

    pub fn from_rational(order: usize, r: Rational) -> Self {
        let _ = order_data(order);
        let mut coeffs = vec![Rational::zero(); order];
        if order == 1 {
            // Phi_1 = z - 1, so z == 1 and the constant slot is coeffs[0].
            coeffs[0] = r;
            return CycNumber { order, coeffs };
        }
        coeffs[0] = r;
        CycNumber { order, coeffs }
    }

    pub fn from_integer(order: usize, n: i64) -> Self {
        Self::from_rational(order, super::rat(n))
    }

    /// zeta_order^exp (exp arbitrary, folded modulo order).
    pub fn root_of_unity(order: usize, exp: i64) -> Result<Self> {
        if order == 0 || order > MAX_CYCLOTOMIC_ORDER {
            return Err(QaleError::OrderTooLarge(order));
        }
        let e = exp.rem_euclid(order as i64) as usize;
        let mut coeffs = vec![Rational::zero(); order];
        coeffs[e] = Rational::one();
        Ok(Self::reduced(order, coeffs))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in Q, else None.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Promote to the lcm of the current order and `order`.
    pub fn promote_to_lcm(&self, order: usize) -> Self {
        self.promote(self.order.lcm(&order))
    }

    /// Promote to a multiple `target` of the current order.
    pub fn promote(&self, target: usize) -> Self {
        assert!(
            target.is_multiple_of(self.order),
            "promotion target {target} is not a multiple of order {}",
            self.order
        );
        if target == self.order {
            return self.clone();
        }
        let _ = order_data(target);
        let step = target / self.order;
        let mut coeffs = vec![Rational::zero(); target];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[j * step] = c.clone();
            }
        }
        Self::reduced(target, coeffs)
    }

    fn common_order(a: &Self, b: &Self) -> usize {
        let m = a.order.lcm(&b.order);
        assert!(
            m <= MAX_CYCLOTOMIC_ORDER,
            "promoted cyclotomic order {m} exceeds the supported maximum"
        );
        m
    }

    /// Value equality across possibly different orders.
    pub fn eq_value(&self, other: &Self) -> bool {
        let m = Self::common_order(self, other);
        self.promote(m) == other.promote(m)
    }

    /// Complex conjugation: zeta^j -> zeta^(m-j).
    pub fn conj(&self) -> Self {
        let m = self.order;
        let mut coeffs = vec![Rational::zero(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[(m - j) % m] += c;
            }
        }
        Self::reduced(m, coeffs)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in the
    /// polynomial ring over Q against Phi_m (irreducible, so every nonzero
    /// element is invertible).
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(QaleError::DivisionByZero { order: self.order });
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.order, r.recip()));
        }
        let data = order_data(self.order);
        let modulus: Vec<Rational> = data
            .phi
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let a: Vec<Rational> = self.coeffs[..data.degree].to_vec();
        let inv = poly_mod_inverse(&a, &modulus).ok_or_else(|| {
            QaleError::InternalInconsistency(format!(
                "no inverse modulo Phi_{} for a nonzero element",
                self.order
            ))
        })?;
        let mut coeffs = vec![Rational::zero(); self.order];
        for (j, c) in inv.into_iter().enumerate() {
            coeffs[j] = c;
        }
        Ok(Self::reduced(self.order, coeffs))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let m = Self::common_order(self, other);
        let b = other.promote(m);
        let inv = b.inverse()?;
        Ok(self.promote(m) * inv)
    }

    /// Floating-point value at zeta_m = exp(2 pi i / m). Test oracle only.
    pub fn to_complex(&self) -> Complex<f64> {
        let m = self.order as f64;
        let mut acc = Complex::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            let theta = 2.0 * std::f64::consts::PI * (j as f64) / m;
            acc += Complex::new(theta.cos(), theta.sin()) * v;
        }
        acc
    }
}

/// Inverse of `a` modulo the monic polynomial `m` over Q, both ascending.
fn poly_mod_inverse(a: &[Rational], m: &[Rational]) -> Option<Vec<Rational>> {
    // Extended Euclid on (m, a): maintain r = s*m + t*a.
    let trim = |v: &mut Vec<Rational>| {
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
    };
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut t0: Vec<Rational> = vec![];
    let mut t1: Vec<Rational> = vec![Rational::one()];
    while !r1.is_empty() {
        // quotient, remainder of r0 / r1
        let mut rem = r0.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(r1.len()) + 1];
        let lead = r1.last().unwrap().clone();
        while rem.len() >= r1.len() && !rem.is_empty() {
            let shift = rem.len() - r1.len();
            let c = rem.last().unwrap() / &lead;
            quot[shift] = c.clone();
            for (i, rc) in r1.iter().enumerate() {
                let idx = shift + i;
                let delta = &c * rc;
                rem[idx] -= delta;
            }
            trim(&mut rem);
        }
        trim(&mut quot);
        // cofactor update: t0 - quot * t1
        let mut qt = vec![Rational::zero(); quot.len() + t1.len()];
        for (i, qc) in quot.iter().enumerate() {
            if qc.is_zero() {
                continue;
            }
            for (j, tc) in t1.iter().enumerate() {
                let prod = qc * tc;
                qt[i + j] += prod;
            }
        }
        let mut t2 = t0.clone();
        if t2.len() < qt.len() {
            t2.resize(qt.len(), Rational::zero());
        }
        for (i, qc) in qt.into_iter().enumerate() {
            t2[i] -= qc;
        }
        trim(&mut t2);
        r0 = r1;
        r1 = rem;
        t0 = t1;
        t1 = t2;
    }
    // r0 = gcd; must be a nonzero constant since Phi is irreducible.
    if r0.len() != 1 {
        return None;
    }
    let g = r0[0].clone();
    Some(t0.into_iter().map(|c| c / &g).collect())
}

impl Add for CycNumber {
    type Output = CycNumber;
    fn add(self, rhs: CycNumber) -> CycNumber {
        &self + &rhs
    }
}

impl Add for &CycNumber {
    type Output = CycNumber;
    fn add(self, rhs: &CycNumber) -> CycNumber {
        let m = CycNumber::common_order(self, rhs);
        let a = self.promote(m);
        let b = rhs.promote(m);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x + y)
            .collect();
        CycNumber { order: m, coeffs }
    }
}

impl Sub for CycNumber {
    type Output = CycNumber;
    fn sub(self, rhs: CycNumber) -> CycNumber {
        &self - &rhs
    }
}

impl Sub for &CycNumber {
    type Output = CycNumber;
    fn sub(self, rhs: &CycNumber) -> CycNumber {
        let m = CycNumber::common_order(self, rhs);
        let a = self.promote(m);
        let b = rhs.promote(m);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x - y)
            .collect();
        CycNumber { order: m, coeffs }
    }
}

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        -self.clone()
    }
}

impl Mul for CycNumber {
    type Output = CycNumber;
    fn mul(self, rhs: CycNumber) -> CycNumber {
        &self * &rhs
    }
}

impl Mul for &CycNumber {
    type Output = CycNumber;
    fn mul(self, rhs: &CycNumber) -> CycNumber {
        let m = CycNumber::common_order(self, rhs);
        let a = self.promote(m);
        let b = rhs.promote(m);
        // Convolution folded modulo z^m - 1, then reduced modulo Phi_m.
        let mut coeffs = vec![Rational::zero(); m];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                coeffs[(i + j) % m] += x * y;
            }
        }
        CycNumber::reduced(m, coeffs)
    }
}

impl Div for &CycNumber {
    type Output = CycNumber;
    /// Panics on division by zero; use [`CycNumber::checked_div`] to recover.
    fn div(self, rhs: &CycNumber) -> CycNumber {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div for CycNumber {
    type Output = CycNumber;
    fn div(self, rhs: CycNumber) -> CycNumber {
        &self / &rhs
    }
}

impl fmt::Display for CycNumber {
    /// Renders in the group-file entry grammar, e.g. `1/2*z^3 - z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_is_one = abs.is_one();
            match (j, coeff_is_one) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{abs}*z")?,
                (_, true) => write!(f, "z^{j}")?,
                (_, false) => write!(f, "{abs}*z^{j}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNumber(m={}, {})", self.order, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn zeta(m: usize, e: i64) -> CycNumber {
        CycNumber::root_of_unity(m, e).unwrap()
    }

    #[test]
    fn phi_polynomials() {
        let as_i64 =
            |v: Vec<BigInt>| -> Vec<i64> { v.iter().map(|c| c.to_i64().unwrap()).collect() };
        assert_eq!(as_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(2)), vec![1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(3)), vec![1, 1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = zeta(4, 1);
        let prod = &i * &i;
        assert_eq!(prod, CycNumber::from_integer(4, -1));
    }

    #[test]
    fn zeta3_times_zeta3_squared_is_one() {
        let a = zeta(3, 1);
        let b = zeta(3, 2);
        assert!((&a * &b).is_one());
    }

    #[test]
    fn rationalize_by_conjugate() {
        // (1 + i) / (1 - i) = i, checked by (1 - i) * i = i + 1.
        let one = CycNumber::one(4);
        let i = zeta(4, 1);
        let num = &one + &i;
        let den = &one - &i;
        let q = num.checked_div(&den).unwrap();
        assert_eq!(q, i);
        assert_eq!(&den * &i, &i + &one);
    }

    #[test]
    fn conjugation() {
        assert_eq!(zeta(4, 1).conj(), zeta(4, 3));
        let r = CycNumber::from_rational(5, ratio(3, 2));
        assert_eq!(r.conj(), r);
        let a = &CycNumber::one(3) + &zeta(3, 1);
        let b = &CycNumber::one(3) + &zeta(3, 2);
        assert_eq!(a.conj(), b);
        assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let z = CycNumber::zero(4);
        assert_eq!(
            CycNumber::one(4).checked_div(&z),
            Err(QaleError::DivisionByZero { order: 4 })
        );
    }

    #[test]
    fn mixed_order_promotion() {
        // zeta_2 = -1 and zeta_4^2 agree after promotion.
        let a = zeta(2, 1);
        let b = zeta(4, 2);
        assert!(a.eq_value(&b));
        let sum = &zeta(3, 1) + &zeta(4, 1);
        assert_eq!(sum.order(), 12);
    }

    #[test]
    fn order_guard() {
        assert!(matches!(
            CycNumber::root_of_unity(10_001, 1),
            Err(QaleError::OrderTooLarge(_))
        ));
    }

    #[test]
    fn numeric_evaluation_matches_reduction() {
        // zeta_6 satisfies z^2 = z - 1 after reduction by Phi_6.
        let z = zeta(6, 1);
        let sq = &z * &z;
        let direct = sq.to_complex();
        let expect = (&z - &CycNumber::one(6)).to_complex();
        assert!((direct - expect).norm() < 1e-12);
    }

    #[test]
    fn display_round_trips_grammar_style() {
        // zeta_4^3 reduces to -zeta_4 modulo Phi_4 = z^2 + 1
        let x = &CycNumber::from_rational(4, ratio(1, 2)) - &zeta(4, 3);
        assert_eq!(x.to_string(), "1/2 + z");
        // at order 5 the degree-3 term survives reduction (phi(5) = 4)
        let y = &CycNumber::from_rational(5, ratio(1, 2)) * &zeta(5, 3);
        assert_eq!((&y - &zeta(5, 1)).to_string(), "-z + 1/2*z^3");
        assert_eq!(CycNumber::from_integer(4, -1).to_string(), "-1");
        assert_eq!(zeta(4, 1).to_string(), "z");
    }

    proptest::proptest! {
        #[test]
        fn field_axioms(
            ac in proptest::collection::vec(-4i64..5, 4),
            bc in proptest::collection::vec(-4i64..5, 4),
            cc in proptest::collection::vec(-4i64..5, 4),
        ) {
            let mk = |v: &Vec<i64>| {
                let coeffs: Vec<Rational> = v.iter().map(|&n| rat(n)).collect();
                CycNumber::from_coeffs(12, &coeffs).unwrap()
            };
            let (a, b, c) = (mk(&ac), mk(&bc), mk(&cc));
            // associativity and distributivity
            proptest::prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            proptest::prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            proptest::prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            // inverses
            if !a.is_zero() {
                let inv = a.inverse().unwrap();
                proptest::prop_assert!((&a * &inv).is_one());
            }
        }

        #[test]
        fn reduce_is_sound_numerically(
            raw in proptest::collection::vec(-6i64..7, 12),
            m in 1usize..13,
        ) {
            // Evaluating before and after reduction agrees at zeta_m.
            let coeffs: Vec<Rational> = raw.iter().map(|&n| rat(n)).collect();
            let reduced = CycNumber::from_coeffs(m, &coeffs).unwrap();
            let mut direct = Complex::new(0.0, 0.0);
            for (j, c) in raw.iter().enumerate() {
                let theta = 2.0 * std::f64::consts::PI * ((j % m) as f64) / m as f64;
                direct += Complex::new(theta.cos(), theta.sin()) * (*c as f64);
            }
            proptest::prop_assert!((reduced.to_complex() - direct).norm() < 1e-9);
        }
    }
}
