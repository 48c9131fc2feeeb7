//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt` / `BigRational`. The cone routines use
//! the double description method with lineality handling, which is adequate
//! for the small ambient dimensions (at most six or seven) this crate targets.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

/// Render a rational as `p` or `p/q`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().map_err(|_| bad())?;
            let d: Int = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn serialize_int<S: Serializer>(v: &Int, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

/// An integer vector (lattice element or integral functional).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(Vec<Int>);

impl IntVector {
    pub fn new(coords: Vec<Int>) -> Self {
        IntVector(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        IntVector(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![Int::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Int::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Int] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Int> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> Int {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn dot_rat(&self, p: &RatPoint) -> Rat {
        debug_assert_eq!(self.dim(), p.dim());
        self.0
            .iter()
            .zip(p.coords())
            .map(|(a, b)| b * a)
            .fold(Rat::zero(), |acc, x| acc + x)
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Int) -> IntVector {
        IntVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    /// gcd of the entries (zero for the zero vector).
    pub fn content(&self) -> Int {
        self.0.iter().fold(Int::zero(), |g, a| g.gcd(a))
    }

    /// Divide by the gcd of the entries.
    pub fn primitive(&self) -> Result<IntVector> {
        let g = self.content();
        if g.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(IntVector(self.0.iter().map(|a| a / &g).collect()))
    }

    pub(crate) fn primitive_or_zero(&self) -> IntVector {
        self.primitive().unwrap_or_else(|_| self.clone())
    }

    pub fn to_rat(&self) -> RatPoint {
        RatPoint::from_int(self)
    }

    pub fn concat(&self, other: &IntVector) -> IntVector {
        let mut c = self.0.clone();
        c.extend(other.0.iter().cloned());
        IntVector(c)
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Entry<'a>(&'a Int);
        impl Serialize for Entry<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_int(self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for c in &self.0 {
            seq.serialize_element(&Entry(c))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = IntVector;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an array of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<IntVector, A::Error> {
                let mut out = Vec::new();
                while let Some(v) = seq.next_element::<serde_json::Value>()? {
                    let x = match &v {
                        serde_json::Value::Number(n) => n
                            .as_i64()
                            .map(Int::from)
                            .ok_or_else(|| de::Error::custom(format!("not an integer: {n}")))?,
                        serde_json::Value::String(s) => s
                            .parse::<Int>()
                            .map_err(|_| de::Error::custom(format!("not an integer: {s:?}")))?,
                        other => return Err(de::Error::custom(format!("not an integer: {other}"))),
                    };
                    out.push(x);
                }
                Ok(IntVector(out))
            }
        }
        d.deserialize_seq(V)
    }
}

/// A point with rational coordinates, always in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatPoint(Vec<Rat>);

impl RatPoint {
    pub fn new(coords: Vec<Rat>) -> Self {
        RatPoint(coords)
    }

    pub fn from_int(v: &IntVector) -> Self {
        RatPoint(v.coords().iter().map(rat_int).collect())
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        RatPoint(coords.iter().map(|&c| rat(c, 1)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        RatPoint(vec![Rat::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn to_int(&self) -> Option<IntVector> {
        if self.is_integral() {
            Some(IntVector(self.0.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }

    pub fn add(&self, o: &RatPoint) -> RatPoint {
        RatPoint(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &RatPoint) -> RatPoint {
        RatPoint(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rat) -> RatPoint {
        RatPoint(self.0.iter().map(|a| a * c).collect())
    }

    pub fn concat(&self, o: &RatPoint) -> RatPoint {
        let mut c = self.0.clone();
        c.extend(o.0.iter().cloned());
        RatPoint(c)
    }

    /// Coordinates selected by `idx`.
    pub fn select(&self, idx: &[usize]) -> RatPoint {
        RatPoint(idx.iter().map(|&i| self.0[i].clone()).collect())
    }

    pub fn barycenter(points: &[RatPoint]) -> RatPoint {
        assert!(!points.is_empty());
        let n = rat(points.len() as i64, 1);
        let mut acc = RatPoint::zeros(points[0].dim());
        for p in points {
            acc = acc.add(p);
        }
        acc.scale(&(Rat::one() / n))
    }

    /// Common denominator and integer numerators.
    pub fn clear_denominators(&self) -> (IntVector, Int) {
        let den = self.0.iter().fold(Int::one(), |l, c| l.lcm(c.denom()));
        let num = self.0.iter().map(|c| (c * rat_int(&den)).to_integer()).collect();
        (IntVector(num), den)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(rat_to_string).collect()
    }
}

impl fmt::Debug for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(","))
    }
}

impl Serialize for RatPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if let Some(v) = self.to_int() {
            v.serialize(s)
        } else {
            self.to_strings().serialize(s)
        }
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * c + j] = int(x);
            }
        }
        m
    }

    pub fn from_rows(rows: &[IntVector]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.dim());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.coords().iter().enumerate() {
                m.data[i * c + j] = x.clone();
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[IntVector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.coords().iter().enumerate() {
                m.data[i * cols.len() + j] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> IntVector {
        IntVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn col_vectors(&self) -> Vec<IntVector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "matrix dimension mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.get(i, j) + a * o.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.cols, v.dim());
        IntVector((0..self.rows).map(|i| self.row(i).dot(v)).collect())
    }

    pub fn sub(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    pub fn rank(&self) -> usize {
        rat_rank(&self.row_vectors())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &Int) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + c * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + c * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// Inverse over the rationals, returned as (integer adjugate-like matrix, denominator).
    pub fn rat_inverse(&self) -> Option<Vec<Vec<Rat>>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rat> = (0..n).map(|j| rat_int(self.get(i, j))).collect();
                row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(p, c);
            let inv = Rat::one() / a[c][c].clone();
            for x in a[c].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for j in 0..2 * n {
                        let v = &a[c][j] * &f;
                        a[r][j] -= v;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
    }

    /// Integer inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        let inv = self.rat_inverse()?;
        let n = self.rows;
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if !inv[i][j].is_integer() {
                    return None;
                }
                m.set(i, j, inv[i][j].to_integer());
            }
        }
        Some(m)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.row_vectors().serialize(s)
    }
}

/// Smith normal form `S = U * M * V` with `U`, `V` unimodular and
/// `S` diagonal with nonnegative entries `d1 | d2 | ...`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (r, c) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut t = 0;
    while t < r.min(c) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let x = s.get(i, j);
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if !s.get(i, t).is_zero() {
                    let q = -s.get(i, t).div_floor(s.get(t, t));
                    s.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    if !s.get(i, t).is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..c {
                if !s.get(t, j).is_zero() {
                    let q = -s.get(t, j).div_floor(s.get(t, t));
                    s.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    if !s.get(t, j).is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // move the smallest remainder in row/column t into the pivot
                let mut bi = t;
                let mut bj = t;
                let mut bv = s.get(t, t).abs();
                for i in t + 1..r {
                    let x = s.get(i, t).abs();
                    if !x.is_zero() && x < bv {
                        bv = x;
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..c {
                    let x = s.get(t, j).abs();
                    if !x.is_zero() && x < bv {
                        bv = x;
                        bi = t;
                        bj = j;
                    }
                }
                s.swap_rows(t, bi);
                u.swap_rows(t, bi);
                s.swap_cols(t, bj);
                v.swap_cols(t, bj);
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut offending = None;
            'outer: for i in t + 1..r {
                for j in t + 1..c {
                    if !(s.get(i, j) % s.get(t, t)).is_zero() {
                        offending = Some(i);
                        break 'outer;
                    }
                }
            }
            match offending {
                Some(i) => {
                    let one = Int::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithForm { s, u, v }
}

/// True iff `M: Z^cols -> Z^rows` is onto.
pub fn is_integrally_surjective(m: &IntMatrix) -> bool {
    if m.rows == 0 {
        return true;
    }
    if m.rows > m.cols {
        return false;
    }
    let snf = smith_normal_form(m);
    snf.diagonal().iter().all(|d| d.is_one())
}

/// Integer `L` with `L * B = I` for an `n x m` matrix `B` whose columns span a
/// saturated sublattice; `None` otherwise.
pub fn integral_left_inverse(b: &IntMatrix) -> Option<IntMatrix> {
    let (n, m) = (b.rows, b.cols);
    if m == 0 {
        return Some(IntMatrix::zeros(0, n));
    }
    let snf = smith_normal_form(b);
    if snf.diagonal().len() < m || !snf.diagonal().iter().all(|d| d.is_one()) {
        return None;
    }
    let mut top = IntMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            top.set(i, j, snf.u.get(i, j).clone());
        }
    }
    Some(snf.v.mul(&top))
}

/// Some integer solution of `M x = b`, if one exists.
pub fn solve_integer(m: &IntMatrix, b: &IntVector) -> Option<IntVector> {
    let snf = smith_normal_form(m);
    // S (V^-1 x) = U b
    let ub = snf.u.mul_vec(b);
    let mut y = vec![Int::zero(); m.cols];
    for i in 0..m.rows {
        let d = if i < m.cols { snf.s.get(i, i).clone() } else { Int::zero() };
        if d.is_zero() {
            if !ub.coords()[i].is_zero() {
                return None;
            }
        } else {
            if !(&ub.coords()[i] % &d).is_zero() {
                return None;
            }
            y[i] = &ub.coords()[i] / &d;
        }
    }
    Some(snf.v.mul_vec(&IntVector::new(y)))
}

/// Basis of the integer kernel lattice `{x in Z^cols : M x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> Vec<IntVector> {
    if m.rows == 0 {
        return (0..m.cols).map(|i| IntVector::unit(m.cols, i)).collect();
    }
    let snf = smith_normal_form(m);
    let r = snf.rank();
    (r..m.cols).map(|j| snf.v.col(j)).collect()
}

/// Reduced row echelon form over Q; returns (rows, pivot columns).
pub fn rat_rref(rows: &[Vec<Rat>], ncols: usize) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = Rat::one() / a[r][c].clone();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rat_rank(rows: &[IntVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].dim();
    let r: Vec<Vec<Rat>> = rows.iter().map(|v| v.coords().iter().map(rat_int).collect()).collect();
    rat_rref(&r, n).1.len()
}

pub fn rat_rank_points(rows: &[RatPoint]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].dim();
    let r: Vec<Vec<Rat>> = rows.iter().map(|v| v.coords().to_vec()).collect();
    rat_rref(&r, n).1.len()
}

/// Primitive integer basis of the rational orthogonal complement of the row space.
pub fn orthogonal_complement(rows: &[RatPoint], n: usize) -> Vec<IntVector> {
    let r: Vec<Vec<Rat>> = rows.iter().map(|v| v.coords().to_vec()).collect();
    let (red, piv) = rat_rref(&r, n);
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); n];
            x[f] = Rat::one();
            for (row, &p) in red.iter().zip(&piv) {
                x[p] = -row[f].clone();
            }
            let (num, _) = RatPoint::new(x).clear_denominators();
            num.primitive_or_zero()
        })
        .collect()
}

/// Basis (as columns) of the saturated lattice `span_Q(dirs) ∩ Z^n`.
pub fn saturated_basis(dirs: &[RatPoint], n: usize) -> Vec<IntVector> {
    let rank = rat_rank_points(dirs);
    if rank == 0 {
        return Vec::new();
    }
    let comp = orthogonal_complement(dirs, n);
    if comp.is_empty() {
        return (0..n).map(|i| IntVector::unit(n, i)).collect();
    }
    integer_kernel(&IntMatrix::from_rows(&comp))
        .into_iter()
        .take(rank)
        .collect()
}

/// Coordinates of `x` in the basis `basis` (vectors in Z^n), if `x` lies in their Q-span.
pub fn coordinates_in(basis: &[IntVector], x: &RatPoint) -> Option<Vec<Rat>> {
    let d = basis.len();
    let n = x.dim();
    if d == 0 {
        return if x.coords().iter().all(Zero::is_zero) { Some(vec![]) } else { None };
    }
    // augmented system B c = x, rows = ambient coordinates
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut r: Vec<Rat> = basis.iter().map(|b| rat_int(&b.coords()[i])).collect();
            r.push(x.coords()[i].clone());
            r
        })
        .collect();
    let (red, piv) = rat_rref(&rows, d + 1);
    if piv.contains(&d) {
        return None;
    }
    let mut c = vec![Rat::zero(); d];
    for (row, &p) in red.iter().zip(&piv) {
        c[p] = row[d].clone();
    }
    Some(c)
}

/// Extended gcd: returns (g, s, t) with s a + t b = g >= 0.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Minimal Bitset used for zero sets in the double description method.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct BitSet(Vec<u64>);

impl BitSet {
    fn new() -> Self {
        BitSet(Vec::new())
    }
    fn insert(&mut self, i: usize) {
        let w = i / 64;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }
    fn intersect(&self, o: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn is_subset(&self, o: &BitSet) -> bool {
        self.0.iter().enumerate().all(|(i, a)| a & !o.0.get(i).copied().unwrap_or(0) == 0)
    }
    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Generators of the cone `{x in Q^dim : <a, x> >= 0 for all a}`.
///
/// Returns `(rays, lineality)`: primitive extreme rays of the cone modulo its
/// lineality space, and a primitive basis of the lineality space.
pub fn dd_generators(constraints: &[IntVector], dim: usize) -> (Vec<IntVector>, Vec<IntVector>) {
    let mut lin: Vec<IntVector> = (0..dim).map(|i| IntVector::unit(dim, i)).collect();
    let mut rays: Vec<(IntVector, BitSet)> = Vec::new();
    let mut nproc = 0usize;
    for a in constraints {
        if a.is_zero() {
            continue;
        }
        let j = nproc;
        nproc += 1;
        if let Some(idx) = lin.iter().position(|l| !a.dot(l).is_zero()) {
            let mut l0 = lin.remove(idx);
            let mut s = a.dot(&l0);
            if s.is_negative() {
                l0 = l0.neg();
                s = -s;
            }
            for l in lin.iter_mut() {
                let c = a.dot(l);
                if !c.is_zero() {
                    *l = l.scale(&s).sub(&l0.scale(&c)).primitive_or_zero();
                }
            }
            for (r, z) in rays.iter_mut() {
                let c = a.dot(r);
                if !c.is_zero() {
                    *r = r.scale(&s).sub(&l0.scale(&c)).primitive_or_zero();
                }
                z.insert(j);
            }
            let mut z0 = BitSet::new();
            for i in 0..j {
                z0.insert(i);
            }
            rays.push((l0, z0));
            continue;
        }
        let vals: Vec<Int> = rays.iter().map(|(r, _)| a.dot(r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (i, (_, z)) in rays.iter_mut().enumerate() {
                if vals[i].is_zero() {
                    z.insert(j);
                }
            }
            continue;
        }
        let min_zero = (dim - lin.len()).saturating_sub(2);
        let pairs: Vec<(usize, usize)> =
            pos.iter().flat_map(|&p| neg.iter().map(move |&n| (p, n))).collect();
        let rays_ref = &rays;
        let vals_ref = &vals;
        let mut created: Vec<(IntVector, BitSet)> = par::filter_map(&pairs, |&(p, n)| {
            let zp = &rays_ref[p].1;
            let zn = &rays_ref[n].1;
            let common = zp.intersect(zn);
            if common.len() < min_zero {
                return None;
            }
            let blocked = rays_ref
                .iter()
                .enumerate()
                .any(|(k, (_, zk))| k != p && k != n && common.is_subset(zk));
            if blocked {
                return None;
            }
            let r = rays_ref[n]
                .0
                .scale(&vals_ref[p])
                .sub(&rays_ref[p].0.scale(&vals_ref[n]))
                .primitive_or_zero();
            let mut z = common;
            z.insert(j);
            Some((r, z))
        });
        let mut next: Vec<(IntVector, BitSet)> = Vec::with_capacity(pos.len() + created.len());
        for (i, (r, z)) in rays.into_iter().enumerate() {
            match vals[i].sign() {
                num_bigint::Sign::Plus => next.push((r, z)),
                num_bigint::Sign::NoSign => {
                    let mut z = z;
                    z.insert(j);
                    next.push((r, z));
                }
                num_bigint::Sign::Minus => {}
            }
        }
        next.append(&mut created);
        rays = next;
    }
    let mut out: Vec<IntVector> = rays.into_iter().map(|(r, _)| r).collect();
    out.sort();
    out.dedup();
    (out, lin)
}

/// A polyhedral cone given by both extreme rays and facet normals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalCone {
    pub ambient_dim: usize,
    /// Extreme rays modulo the lineality space.
    pub generators: Vec<IntVector>,
    /// Basis of the lineality space.
    pub lineality: Vec<IntVector>,
    /// Inequalities `<n, x> >= 0`.
    pub facet_normals: Vec<IntVector>,
    /// Equations `<e, x> = 0` cutting out the linear span.
    pub equations: Vec<IntVector>,
}

impl RationalCone {
    /// Cone generated by nonnegative combinations of `gens`.
    pub fn from_generators(ambient_dim: usize, gens: &[IntVector]) -> Self {
        // the dual cone's generators are our facets and equations
        let (facets, eqs) = dd_generators(gens, ambient_dim);
        Self::from_inequalities(ambient_dim, &facets, &eqs)
    }

    /// Cone `{x : <n, x> >= 0 for n in ineqs, <e, x> = 0 for e in eqs}`.
    pub fn from_inequalities(ambient_dim: usize, ineqs: &[IntVector], eqs: &[IntVector]) -> Self {
        let mut rows: Vec<IntVector> = ineqs.to_vec();
        for e in eqs {
            rows.push(e.clone());
            rows.push(e.neg());
        }
        let (gens, lin) = dd_generators(&rows, ambient_dim);
        // canonical irredundant facets: dual generators of the generators
        let mut grows = gens.clone();
        for l in &lin {
            grows.push(l.clone());
            grows.push(l.neg());
        }
        let (facets, equations) = dd_generators(&grows, ambient_dim);
        RationalCone { ambient_dim, generators: gens, lineality: lin, facet_normals: facets, equations }
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        self.facet_normals.iter().all(|n| !n.dot(x).is_negative())
            && self.equations.iter().all(|e| e.dot(x).is_zero())
    }

    pub fn contains_rat(&self, x: &RatPoint) -> bool {
        self.facet_normals.iter().all(|n| !n.dot_rat(x).is_negative())
            && self.equations.iter().all(|e| e.dot_rat(x).is_zero())
    }

    /// `{m : <m, v> >= 0 for all v in C}`.
    pub fn dual(&self) -> RationalCone {
        RationalCone {
            ambient_dim: self.ambient_dim,
            generators: self.facet_normals.clone(),
            lineality: self.equations.clone(),
            facet_normals: self.generators.clone(),
            equations: self.lineality.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim - self.equations.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }
}

pub fn dualize_cone(c: &RationalCone) -> RationalCone {
    c.dual()
}

pub fn primitive(v: &IntVector) -> Result<IntVector> {
    v.primitive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_inverse_of_saturated_columns() {
        let b = IntMatrix::from_rows_i64(&[&[1, 0], &[2, 1], &[3, 5]]);
        let l = integral_left_inverse(&b).unwrap();
        assert!(l.mul(&b).is_identity());
        let b2 = IntMatrix::from_rows_i64(&[&[2], &[0]]);
        assert!(integral_left_inverse(&b2).is_none());
    }

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows_i64(rows)
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(IntVector::from_i64(&[2, 4, 6]).primitive().unwrap(), IntVector::from_i64(&[1, 2, 3]));
        assert_eq!(IntVector::from_i64(&[0, -5]).primitive().unwrap(), IntVector::from_i64(&[0, -1]));
        assert_eq!(IntVector::from_i64(&[1, 0, 0]).primitive().unwrap(), IntVector::from_i64(&[1, 0, 0]));
        let err = IntVector::from_i64(&[0, 0]).primitive().unwrap_err();
        assert_eq!(err.to_string(), "zero vector has no primitive form");
    }

    fn check_snf(a: &IntMatrix) -> SmithForm {
        let f = smith_normal_form(a);
        assert_eq!(f.u.mul(a).mul(&f.v), f.s);
        assert!(f.u.det().abs().is_one());
        assert!(f.v.det().abs().is_one());
        let d = f.diagonal();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    assert!(f.s.get(i, j).is_zero());
                }
            }
        }
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        f
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check_snf(&IntMatrix::identity(3)).s, IntMatrix::identity(3));
        let f = check_snf(&m(&[&[2, 4], &[6, 8]]));
        // d1 | d2 and d1 d2 = |det| = 8
        assert_eq!(f.diagonal(), vec![int(2), int(4)]);
        let f = check_snf(&m(&[&[2, 3]]));
        assert_eq!(f.s, m(&[&[1, 0]]));
    }

    #[test]
    fn surjectivity_examples() {
        assert!(is_integrally_surjective(&IntMatrix::identity(2)));
        assert!(!is_integrally_surjective(&m(&[&[1, 0], &[0, 2]])));
        assert!(is_integrally_surjective(&m(&[&[2, 3]])));
        assert!(!is_integrally_surjective(&m(&[&[2, 4]])));
    }

    #[test]
    fn dual_cone_examples() {
        let orth = RationalCone::from_generators(2, &[IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1])]);
        assert_eq!(orth.dual().generators, orth.generators);

        let c = RationalCone::from_generators(2, &[IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[1, 2])]);
        let d = dualize_cone(&c);
        let mut expect = vec![IntVector::from_i64(&[0, 1]), IntVector::from_i64(&[2, -1])];
        expect.sort();
        assert_eq!(d.generators, expect);

        let full = RationalCone::from_generators(
            2,
            &[
                IntVector::from_i64(&[1, 0]),
                IntVector::from_i64(&[-1, 0]),
                IntVector::from_i64(&[0, 1]),
                IntVector::from_i64(&[0, -1]),
            ],
        );
        let d = full.dual();
        assert!(d.generators.is_empty() && d.lineality.is_empty());
        assert_eq!(d.dim(), 0);
    }

    #[test]
    fn kernel_and_saturation() {
        let k = integer_kernel(&m(&[&[1, 1, 1]]));
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v.dot(&IntVector::from_i64(&[1, 1, 1])).is_zero());
        }
        // span of (2,0) saturates to (1,0)
        let b = saturated_basis(&[RatPoint::from_i64(&[2, 0])], 2);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].content(), int(1));
        assert!(b[0].coords()[1].is_zero());
    }

    #[test]
    fn solve_integer_bezout() {
        let a = m(&[&[2, 3]]);
        let x = solve_integer(&a, &IntVector::from_i64(&[1])).unwrap();
        assert_eq!(a.mul_vec(&x), IntVector::from_i64(&[1]));
        assert!(solve_integer(&m(&[&[2, 4]]), &IntVector::from_i64(&[1])).is_none());
    }

    #[test]
    fn det_bareiss() {
        assert_eq!(m(&[&[2, 4], &[6, 8]]).det(), int(-8));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), int(-1));
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).det(), int(-3));
    }
}
