//! Sparse multivariate polynomials in three variables with exact rational
//! coefficients, and their vector-valued counterpart.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the construction path.
pub type Q = BigRational;

/// Exponent triple `(a, b, c)` of the monomial `x^a y^b z^c`.
pub type Exp = [u8; 3];

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(v: &Q) -> f64 {
    match (v.numer().to_f64(), v.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        // Huge numerators/denominators: scale both down before dividing.
        _ => {
            let shift = v.numer().bits().max(v.denom().bits()).saturating_sub(900);
            let n = (v.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (v.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

pub fn exp_degree(e: &Exp) -> usize {
    e.iter().map(|&a| a as usize).sum()
}

/// All exponents of total degree `<= deg`, ordered by degree then
/// lexicographically descending in `(a, b, c)`.
pub fn monomials_upto(deg: usize) -> Vec<Exp> {
    let mut out = Vec::new();
    for d in 0..=deg {
        out.extend(homogeneous_monomials(d));
    }
    out
}

/// Exponents of total degree exactly `deg`.
pub fn homogeneous_monomials(deg: usize) -> Vec<Exp> {
    let mut out = Vec::new();
    for a in (0..=deg).rev() {
        for b in (0..=deg - a).rev() {
            let c = deg - a - b;
            out.push([a as u8, b as u8, c as u8]);
        }
    }
    out
}

/// Dimension of `P_k` in three variables (zero for negative `k`).
pub fn dim_p3(k: i64) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) * (k + 3) / 6
    }
}

/// Dimension of `P_k` in two variables (zero for negative `k`).
pub fn dim_p2(k: i64) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

/// Dimension of the homogeneous degree-`k` polynomials in three variables.
pub fn dim_h3(k: i64) -> usize {
    dim_p2(k)
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Exp, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(i: usize) -> Self {
        let mut e = [0u8; 3];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(e: Exp, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// Affine function `c0 + c·x`.
    pub fn affine(c0: Q, c: [Q; 3]) -> Self {
        let mut p = Self::constant(c0);
        for (i, ci) in c.into_iter().enumerate() {
            p.add_term(Self::var(i).lead_exp(), ci);
        }
        p
    }

    fn lead_exp(&self) -> Exp {
        *self.terms.keys().next().expect("non-empty")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(exp_degree).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exp) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, e: Exp, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[i] -= 1;
            out.add_term(e2, c * qi(e[i] as i64));
        }
        out
    }

    pub fn grad(&self) -> VecPoly {
        VecPoly([self.deriv(0), self.deriv(1), self.deriv(2)])
    }

    pub fn eval(&self, x: &[Q; 3]) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..3 {
                for _ in 0..e[i] {
                    t *= &x[i];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                q_to_f64(c)
                    * x[0].powi(e[0] as i32)
                    * x[1].powi(e[1] as i32)
                    * x[2].powi(e[2] as i32)
            })
            .sum()
    }

    /// Composition `p(f_0(y), f_1(y), f_2(y))`.
    pub fn substitute(&self, forms: &[Poly; 3]) -> Poly {
        let maxe: [usize; 3] = std::array::from_fn(|i| {
            self.terms.keys().map(|e| e[i] as usize).max().unwrap_or(0)
        });
        let powers: Vec<Vec<Poly>> = (0..3)
            .map(|i| {
                let mut v = vec![Poly::one()];
                for k in 1..=maxe[i] {
                    let next = &v[k - 1] * &forms[i];
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let t = &(&powers[0][e[0] as usize] * &powers[1][e[1] as usize])
                * &powers[2][e[2] as usize];
            for (e2, c2) in t.terms {
                out.add_term(e2, c2 * c);
            }
        }
        out
    }

    /// `p(x + w)`.
    pub fn translate(&self, w: &[Q; 3]) -> Poly {
        let forms = std::array::from_fn(|i| {
            let mut f = Poly::var(i);
            f.add_term([0, 0, 0], w[i].clone());
            f
        });
        self.substitute(&forms)
    }

    /// Split into homogeneous components; entry `m` holds the degree-`m` part.
    pub fn homogeneous_parts(&self) -> Vec<Poly> {
        let n = self.degree().map_or(0, |d| d + 1);
        let mut parts = vec![Poly::zero(); n];
        for (e, c) in &self.terms {
            parts[exp_degree(e)].add_term(*e, c.clone());
        }
        parts
    }

    /// Coefficient vector with respect to an ordered monomial list.
    pub fn coeffs_in(&self, basis: &MonomialIndex) -> Vec<Q> {
        let mut v = vec![Q::zero(); basis.len()];
        for (e, c) in &self.terms {
            let i = basis
                .index(e)
                .unwrap_or_else(|| panic!("monomial {e:?} outside index of degree {}", basis.degree));
            v[i] = c.clone();
        }
        v
    }

    pub fn from_coeffs(basis: &MonomialIndex, coeffs: &[Q]) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in basis.exps.iter().zip(coeffs) {
            p.add_term(*e, c.clone());
        }
        p
    }

    /// Text dump: one `coeff * x^a y^b z^c` line per term, sorted.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{} * x^{} y^{} z^{}", c, e[0], e[1], e[2]))
            .collect();
        lines.sort();
        lines.join("\n")
    }

    pub fn max_abs_coeff(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("({})x^{}y^{}z^{}", c, e[0], e[1], e[2]))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], c1 * c2);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

/// Ordered monomial list up to a fixed total degree, with reverse lookup.
#[derive(Clone, Debug)]
pub struct MonomialIndex {
    pub degree: usize,
    pub exps: Vec<Exp>,
    lookup: BTreeMap<Exp, usize>,
}

impl MonomialIndex {
    pub fn new(degree: usize) -> Self {
        let exps = monomials_upto(degree);
        let lookup = exps.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Self {
            degree,
            exps,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn index(&self, e: &Exp) -> Option<usize> {
        self.lookup.get(e).copied()
    }
}

/// A vector field with three polynomial components.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct VecPoly(pub [Poly; 3]);

impl VecPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(a: Poly, b: Poly, c: Poly) -> Self {
        Self([a, b, c])
    }

    /// Constant vector field.
    pub fn constant(v: [Q; 3]) -> Self {
        let [a, b, c] = v;
        Self([Poly::constant(a), Poly::constant(b), Poly::constant(c)])
    }

    /// Coordinate field `(x, y, z)`.
    pub fn position() -> Self {
        Self([Poly::var(0), Poly::var(1), Poly::var(2)])
    }

    /// `p e_c`.
    pub fn along(p: Poly, c: usize) -> Self {
        let mut v = Self::zero();
        v.0[c] = p;
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Poly::is_zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().filter_map(Poly::degree).max()
    }

    pub fn curl(&self) -> VecPoly {
        let [u, v, w] = &self.0;
        VecPoly([
            &w.deriv(1) - &v.deriv(2),
            &u.deriv(2) - &w.deriv(0),
            &v.deriv(0) - &u.deriv(1),
        ])
    }

    pub fn div(&self) -> Poly {
        let mut d = self.0[0].deriv(0);
        d += &self.0[1].deriv(1);
        d += &self.0[2].deriv(2);
        d
    }

    /// Row `i` holds the gradient of component `i`.
    pub fn jacobian(&self) -> [VecPoly; 3] {
        std::array::from_fn(|i| self.0[i].grad())
    }

    pub fn dot(&self, other: &VecPoly) -> Poly {
        let mut s = &self.0[0] * &other.0[0];
        s += &(&self.0[1] * &other.0[1]);
        s += &(&self.0[2] * &other.0[2]);
        s
    }

    pub fn cross(&self, other: &VecPoly) -> VecPoly {
        let [a1, a2, a3] = &self.0;
        let [b1, b2, b3] = &other.0;
        VecPoly([
            &(a2 * b3) - &(a3 * b2),
            &(a3 * b1) - &(a1 * b3),
            &(a1 * b2) - &(a2 * b1),
        ])
    }

    pub fn scale(&self, c: &Q) -> VecPoly {
        VecPoly(std::array::from_fn(|i| self.0[i].scale(c)))
    }

    pub fn mul_scalar(&self, p: &Poly) -> VecPoly {
        VecPoly(std::array::from_fn(|i| &self.0[i] * p))
    }

    pub fn eval(&self, x: &[Q; 3]) -> [Q; 3] {
        std::array::from_fn(|i| self.0[i].eval(x))
    }

    pub fn eval_f64(&self, x: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| self.0[i].eval_f64(x))
    }

    pub fn substitute(&self, forms: &[Poly; 3]) -> VecPoly {
        VecPoly(std::array::from_fn(|i| self.0[i].substitute(forms)))
    }

    pub fn translate(&self, w: &[Q; 3]) -> VecPoly {
        VecPoly(std::array::from_fn(|i| self.0[i].translate(w)))
    }

    /// Matrix-vector product `M v` with a constant matrix.
    pub fn transform(&self, m: &[[Q; 3]; 3]) -> VecPoly {
        VecPoly(std::array::from_fn(|i| {
            let mut s = Poly::zero();
            for j in 0..3 {
                s += &self.0[j].scale(&m[i][j]);
            }
            s
        }))
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.0.iter().enumerate() {
            out.push_str(&format!("[{}]\n", i));
            let d = c.dump();
            if !d.is_empty() {
                out.push_str(&d);
                out.push('\n');
            }
        }
        out
    }
}

impl<'a> Add<&'a VecPoly> for &'a VecPoly {
    type Output = VecPoly;
    fn add(self, rhs: &VecPoly) -> VecPoly {
        VecPoly(std::array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }
}

impl<'a> Sub<&'a VecPoly> for &'a VecPoly {
    type Output = VecPoly;
    fn sub(self, rhs: &VecPoly) -> VecPoly {
        VecPoly(std::array::from_fn(|i| &self.0[i] - &rhs.0[i]))
    }
}

impl AddAssign<&VecPoly> for VecPoly {
    fn add_assign(&mut self, rhs: &VecPoly) {
        for i in 0..3 {
            self.0[i] += &rhs.0[i];
        }
    }
}

impl Neg for &VecPoly {
    type Output = VecPoly;
    fn neg(self) -> VecPoly {
        VecPoly(std::array::from_fn(|i| -&self.0[i]))
    }
}

/// Exact factorial.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Polynomial with `f64` coefficients, for fast repeated evaluation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FloatPoly(pub Vec<(Exp, f64)>);

impl FloatPoly {
    pub fn from_exact(p: &Poly) -> Self {
        Self(p.terms().map(|(e, c)| (*e, q_to_f64(c))).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|(e, _)| exp_degree(e)).max().unwrap_or(0)
    }

    /// Evaluation from a table of coordinate powers, see [`powers`].
    pub fn eval_powers(&self, pw: &[Vec<f64>; 3]) -> f64 {
        self.0
            .iter()
            .map(|(e, c)| c * pw[0][e[0] as usize] * pw[1][e[1] as usize] * pw[2][e[2] as usize])
            .sum()
    }

    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        self.eval_powers(&powers(x, self.degree()))
    }
}

/// Powers `x_d^0 ..= x_d^deg` of each coordinate.
pub fn powers(x: &[f64; 3], deg: usize) -> [Vec<f64>; 3] {
    std::array::from_fn(|d| {
        let mut v = vec![1.0; deg + 1];
        for i in 1..=deg {
            v[i] = v[i - 1] * x[d];
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }
    fn z() -> Poly {
        Poly::var(2)
    }

    #[test]
    fn grad_of_xy() {
        let g = (&x() * &y()).grad();
        assert_eq!(g, VecPoly::new(y(), x(), Poly::zero()));
    }

    #[test]
    fn div_of_squares() {
        let f = VecPoly::new(&x() * &x(), &y() * &y(), &z() * &z());
        let expect = &(&x().scale(&qi(2)) + &y().scale(&qi(2))) + &z().scale(&qi(2));
        assert_eq!(f.div(), expect);
    }

    #[test]
    fn degrees_and_zero() {
        assert_eq!(Poly::zero().degree(), None);
        let p = &(&x() * &y()) + &Poly::constant(qi(3));
        assert_eq!(p.degree(), Some(2));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn translate_roundtrip() {
        let p = &(&x() * &x()) * &z() + Poly::constant(q(1, 3));
        let w = [q(1, 4), q(-2, 3), qi(5)];
        let back = p.translate(&w).translate(&w.clone().map(|v| -v));
        assert_eq!(back, p);
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_upto(3).len(), dim_p3(3));
        assert_eq!(homogeneous_monomials(2).len(), dim_h3(2));
        assert_eq!(dim_p3(-1), 0);
    }

    #[test]
    fn dump_is_sorted_text() {
        let p = &x().scale(&q(1, 2)) + &Poly::constant(qi(-1));
        assert_eq!(p.dump(), "-1 * x^0 y^0 z^0\n1/2 * x^1 y^0 z^0");
    }
}
