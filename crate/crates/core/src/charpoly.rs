//! Characteristic polynomials of integral arrangements.
//!
//! The main routine counts complement points over prime fields and
//! interpolates. A slow Möbius-function computation over the intersection
//! poset is kept as a reference.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::linalg::{max_abs_minor, rank};
use crate::restrict::TreeNode;
use crate::rootsys::ExponentMultiset;

/// Hyperplane cap of [`char_poly_mobius`].
pub const MOBIUS_CAP: usize = 16;

/// Upper limit on the number of projective points visited for one polynomial.
const POINT_BUDGET: u64 = 1 << 34;

/// Monic integer polynomial, coefficients in increasing degree.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    /// `t^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[n] = 1;
        IntPolynomial { coeffs }
    }

    /// Product of `(t - r)` over the given roots.
    pub fn from_roots(roots: &[u32]) -> Self {
        let mut coeffs = vec![1i64];
        for &r in roots {
            let mut next = vec![0i64; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r as i64;
            }
            coeffs = next;
        }
        IntPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: i64) -> i128 {
        self.coeffs
            .iter()
            .rev()
            .fold(0i128, |acc, &c| acc * t as i128 + c as i128)
    }

    /// Coefficient-wise difference `self - other`.
    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).copied().unwrap_or(0) - other.coeffs.get(i).copied().unwrap_or(0))
            .collect();
        IntPolynomial::from_coeffs(c)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Primitive, sign-normalized normals with duplicates removed.
/// Zero vectors and wrong lengths are rejected.
pub fn normalize_normals(rank: usize, normals: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in normals {
        if v.len() != rank {
            return Err(Error::Domain(format!(
                "normal vector {v:?} does not have {rank} coordinates"
            )));
        }
        let g = v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        if g == 0 {
            return Err(Error::Domain("zero normal vector".into()));
        }
        let lead = v.iter().find(|&&x| x != 0).copied().unwrap_or(1);
        let s = if lead < 0 { -g } else { g };
        let w: Vec<i64> = v.iter().map(|&x| x / s).collect();
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    Ok(out)
}

/// Number of points of `F_p^rank` lying on none of the hyperplanes.
pub fn complement_count(rank: usize, normals: &[Vec<i64>], p: u64) -> u64 {
    if normals.is_empty() {
        return p.pow(rank as u32);
    }
    let pi = p as i64;
    let a: Vec<Vec<u64>> = normals
        .iter()
        .map(|v| v.iter().map(|&x| x.rem_euclid(pi) as u64).collect())
        .collect();
    // projective points: first nonzero coordinate is 1 at position `lead`
    let mut projective = 0u64;
    let mut dots = vec![0u64; a.len()];
    let mut digits = vec![0u64; rank];
    for lead in 0..rank {
        for (h, d) in dots.iter_mut().enumerate() {
            *d = a[h][lead];
        }
        digits.iter_mut().for_each(|d| *d = 0);
        loop {
            if dots.iter().all(|&d| d != 0) {
                projective += 1;
            }
            // odometer over coordinates after `lead`; every changed digit
            // moves by +1 mod p, including the ones that wrap to 0
            let mut j = rank;
            let mut done = true;
            while j > lead + 1 {
                j -= 1;
                for (h, d) in dots.iter_mut().enumerate() {
                    *d = (*d + a[h][j]) % p;
                }
                digits[j] += 1;
                if digits[j] < p {
                    done = false;
                    break;
                }
                digits[j] = 0;
            }
            if done {
                break;
            }
        }
    }
    projective * (p - 1)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The `count` smallest primes strictly above `bound`.
fn primes_above(bound: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = bound + 1;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n += 1;
    }
    out
}

/// `chi(t)` of the arrangement with the given integer normals in `F^rank`,
/// computing the bad-prime bound from the normals.
pub fn char_poly(rank: usize, normals: &[Vec<i64>]) -> Result<IntPolynomial> {
    let normals = normalize_normals(rank, normals)?;
    let bound = max_abs_minor(&normals);
    char_poly_normalized(rank, &normals, bound)
}

/// As [`char_poly`], with a known bound on every square minor. Subsets of a
/// fixed root system can share the bound of the whole system.
pub fn char_poly_with_bound(rank: usize, normals: &[Vec<i64>], minor_bound: i64) -> Result<IntPolynomial> {
    let normals = normalize_normals(rank, normals)?;
    char_poly_normalized(rank, &normals, minor_bound)
}

/// Characteristic polynomial of a label set of a tree node.
pub fn node_char_poly(node: &TreeNode, set: LabelSet) -> Result<IntPolynomial> {
    char_poly_with_bound(node.rank, &node.normals(set), node.minor_bound())
}

fn char_poly_normalized(rank: usize, normals: &[Vec<i64>], minor_bound: i64) -> Result<IntPolynomial> {
    if normals.is_empty() {
        return Ok(IntPolynomial::monomial(rank));
    }
    if minor_bound < 1 || minor_bound > (1 << 20) {
        return Err(Error::Resource(format!(
            "minor bound {minor_bound} is outside the supported range"
        )));
    }
    // chi is monic of degree `rank`, so `rank` values fix it; one more checks
    let primes = primes_above(minor_bound as u64, rank + 1);
    let points: u64 = primes
        .iter()
        .try_fold(0u64, |acc, &p| p.checked_pow(rank as u32 - 1).and_then(|q| acc.checked_add(q)))
        .unwrap_or(u64::MAX);
    if points > POINT_BUDGET {
        return Err(Error::Resource(format!(
            "finite-field count would visit {points} points"
        )));
    }
    let counts: Vec<(i64, i128)> = primes
        .iter()
        .map(|&p| (p as i64, complement_count(rank, normals, p) as i128))
        .collect();
    let poly = interpolate_monic(rank, &counts[..rank])?;
    let (p, c) = counts[rank];
    if poly.eval(p) != c {
        return Err(Error::Internal(format!(
            "interpolated polynomial {poly} gives {} at {p}, counted {c}",
            poly.eval(p)
        )));
    }
    Ok(poly)
}

/// The monic degree-`n` polynomial through the given `n` points.
fn interpolate_monic(n: usize, points: &[(i64, i128)]) -> Result<IntPolynomial> {
    // g(t) = chi(t) - t^n has degree < n; Newton divided differences
    let xs: Vec<i128> = points.iter().map(|&(x, _)| x as i128).collect();
    let mut dd: Vec<Ratio<i128>> = points
        .iter()
        .map(|&(x, y)| Ratio::from_integer(y - (x as i128).pow(n as u32)))
        .collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / Ratio::from_integer(xs[i] - xs[i - level]);
        }
    }
    // expand the Newton form into monomial coefficients
    let mut coeffs = vec![Ratio::from_integer(0i128); n + 1];
    for k in (0..n).rev() {
        // coeffs = coeffs * (t - xs[k]) + dd[k]
        let mut next = vec![Ratio::from_integer(0i128); n + 1];
        for i in 0..n {
            next[i + 1] += coeffs[i];
            next[i] -= coeffs[i] * Ratio::from_integer(xs[k]);
        }
        next[0] += dd[k];
        coeffs = next;
    }
    let mut out = Vec::with_capacity(n + 1);
    for c in &coeffs[..n] {
        if !c.is_integer() {
            return Err(Error::Internal("non-integral interpolation".into()));
        }
        out.push(i64::try_from(c.to_integer()).map_err(|_| Error::Resource("coefficient overflow".into()))?);
    }
    out.push(1);
    Ok(IntPolynomial { coeffs: out })
}

/// Reference computation through the Möbius function of the intersection
/// poset. Flats are stored as the sets of hyperplanes containing them.
pub fn char_poly_mobius(rank_dim: usize, normals: &[Vec<i64>]) -> Result<IntPolynomial> {
    let normals = normalize_normals(rank_dim, normals)?;
    let n = normals.len();
    if n > MOBIUS_CAP {
        return Err(Error::Resource(format!(
            "{n} hyperplanes exceed the Möbius cap of {MOBIUS_CAP}"
        )));
    }
    let rank_of = |set: u32| -> usize {
        let rows: Vec<Vec<i64>> = (0..n).filter(|&i| set >> i & 1 == 1).map(|i| normals[i].clone()).collect();
        rank(&rows)
    };
    let closure = |set: u32| -> (u32, usize) {
        let r = rank_of(set);
        let mut closed = set;
        for i in 0..n {
            if closed >> i & 1 == 0 && rank_of(set | 1 << i) == r {
                closed |= 1 << i;
            }
        }
        (closed, r)
    };
    let mut flats: HashMap<u32, usize> = HashMap::from([(0, 0)]);
    let mut frontier = vec![0u32];
    while let Some(f) = frontier.pop() {
        for i in 0..n {
            if f >> i & 1 == 0 {
                let (c, r) = closure(f | 1 << i);
                if let std::collections::hash_map::Entry::Vacant(e) = flats.entry(c) {
                    e.insert(r);
                    frontier.push(c);
                }
            }
        }
    }
    let mut order: Vec<(u32, usize)> = flats.into_iter().collect();
    order.sort_by_key(|&(set, r)| (r, set));
    let mut mu: Vec<i64> = Vec::with_capacity(order.len());
    let mut coeffs = vec![0i64; rank_dim + 1];
    for (k, &(x, r)) in order.iter().enumerate() {
        let m = if x == 0 {
            1
        } else {
            -order[..k]
                .iter()
                .zip(&mu)
                .filter(|((y, _), _)| y & x == *y && *y != x)
                .map(|(_, &m)| m)
                .sum::<i64>()
        };
        mu.push(m);
        coeffs[rank_dim - r] += m;
    }
    Ok(IntPolynomial::from_coeffs(coeffs))
}

/// Roots of `p` if it splits into linear factors `t - r` with integers
/// `r >= 0`.
pub fn integer_root_multiset(p: &IntPolynomial) -> Option<ExponentMultiset> {
    let mut roots = Vec::new();
    let mut q: Vec<i64> = p.coeffs().to_vec();
    if *q.last()? != 1 {
        return None;
    }
    while q.len() > 1 && q[0] == 0 {
        q.remove(0);
        roots.push(0);
    }
    while q.len() > 1 {
        let c = q[0].unsigned_abs();
        let r = divisors(c).into_iter().find(|&r| eval_i128(&q, r as i128) == 0)?;
        // synthetic division by (t - r)
        let deg = q.len() - 1;
        let mut quotient = vec![0i64; deg];
        let mut carry = 0i64;
        for i in (0..deg).rev() {
            carry = q[i + 1] + carry * r as i64;
            quotient[i] = carry;
        }
        q = quotient;
        roots.push(r as u32);
    }
    Some(ExponentMultiset::new(roots))
}

fn eval_i128(coeffs: &[i64], t: i128) -> i128 {
    coeffs.iter().rev().fold(0i128, |acc, &c| acc * t + c as i128)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
