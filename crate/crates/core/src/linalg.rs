//! Exact dense linear algebra over the rationals, plus a word-sized prime
//! field used for rank profiling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` with decimal integers and a positive denominator.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    fn int(part: &str) -> Result<BigInt, String> {
        let digits = part.strip_prefix(['-', '+']).unwrap_or(part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed integer {part:?}"));
        }
        part.parse::<BigInt>().map_err(|e| e.to_string())
    }
    if s.len() > 4096 {
        return Err("coefficient string too long".into());
    }
    match s.split_once('/') {
        None => Ok(Rational::from_integer(int(s)?)),
        Some((n, d)) => {
            let numer = int(n)?;
            let denom = int(d)?;
            if !denom.is_positive() {
                return Err(format!("denominator must be positive in {s:?}"));
            }
            Ok(Rational::new(numer, denom))
        }
    }
}

pub fn zeros(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn axpy(acc: &mut [Rational], c: &Rational, v: &[Rational]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += c * x;
        }
    }
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Scales a nonzero vector to a primitive integer vector with positive
/// leading entry. The zero vector is returned unchanged.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    let Some(lead) = v.iter().find(|x| !x.is_zero()) else {
        return v.to_vec();
    };
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if lead.is_negative() {
        g = -g;
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect()
}

pub fn transpose(m: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Reduced row-echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut ech = Echelon::new(rows.first().map_or(0, Vec::len));
    for r in rows {
        ech.insert(r.clone());
    }
    ech.into_sorted()
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut ech = Echelon::new(rows.first().map_or(0, Vec::len));
    for r in rows {
        ech.insert(r.clone());
    }
    ech.dim()
}

/// Basis of `{x : m x = 0}` for an `_ × ncols` matrix.
pub fn nullspace(m: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut ech = Echelon::new(ncols);
    for r in m {
        ech.insert(r.clone());
    }
    ech.nullspace()
}

/// Some solution of `m x = b`, if one exists.
pub fn solve(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let ncols = m.first().map_or(0, Vec::len);
    let augmented: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (rows, pivots) = rref(&augmented);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = zeros(ncols);
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            let (top, bottom) = a.split_at_mut(r);
            axpy(&mut bottom[0], &-f, &top[col]);
        }
    }
    det
}

pub fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let augmented: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit(n, i));
            r
        })
        .collect();
    let (rows, pivots) = rref(&augmented);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Incrementally maintained reduced row-echelon basis of a subspace of
/// `Q^ncols`. Every stored row has a unit pivot and zeros in the pivot
/// columns of all other rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = -v[p].clone();
                axpy(&mut v, &c, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Inserts `v`; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: Vec<Rational>) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        let mut v = self.reduce(&v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = -row[p].clone();
                axpy(row, &c, &v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    /// Coefficients of `v` with respect to the stored rows, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = unit(self.ncols, f);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if !row[f].is_zero() {
                        x[p] = -row[f].clone();
                    }
                }
                x
            })
            .collect()
    }

    /// Rows sorted by pivot column: the canonical RREF.
    pub fn into_sorted(self) -> (Vec<Vec<Rational>>, Vec<usize>) {
        let mut pairs: Vec<(usize, Vec<Rational>)> =
            self.pivots.into_iter().zip(self.rows).collect();
        pairs.sort_by_key(|(p, _)| *p);
        let (pivots, rows) = pairs.into_iter().unzip();
        (rows, pivots)
    }
}

/// The Mersenne prime 2^61 - 1.
pub const PRIME: u64 = (1 << 61) - 1;

pub fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

pub fn mod_pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mod_mul(r, a);
        }
        a = mod_mul(a, a);
        e >>= 1;
    }
    r
}

pub fn mod_inv(a: u64) -> u64 {
    mod_pow(a, PRIME - 2)
}

/// Image of a rational in the prime field, or `None` if the prime divides the denominator.
pub fn to_mod_p(q: &Rational) -> Option<u64> {
    let p = BigInt::from(PRIME);
    let n = q.numer().mod_floor(&p).to_u64()?;
    let d = q.denom().mod_floor(&p).to_u64()?;
    if d == 0 {
        return None;
    }
    Some(mod_mul(n, mod_inv(d)))
}

/// Row-streaming rank computation over the prime field.
#[derive(Clone, Debug)]
pub struct ModPEchelon {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModPEchelon {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (p, row) in &self.rows {
            let c = v[*p];
            if c != 0 {
                let c = PRIME - c;
                for (x, r) in v.iter_mut().zip(row) {
                    if *r != 0 {
                        *x = (*x + mod_mul(c, *r)) % PRIME;
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inv(v[p]);
        for x in v.iter_mut() {
            *x = mod_mul(*x, inv);
        }
        self.rows.push((p, v));
        true
    }
}

impl Default for ModPEchelon {
    fn default() -> Self {
        Self::new()
    }
}
