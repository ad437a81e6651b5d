//! `log(e^X e^Y) = X + c(D)·Y` in the two-dimensional algebra `[X, Y] = DY`,
//! computed in the representation `X ↦ [[D,0],[0,0]]`, `Y ↦ [[0,1],[0,0]]`
//! with entries in `ℚ[[D]]`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::matrix::factorial;

type Poly = Vec<BigRational>;
type Mat = [[Poly; 2]; 2];

fn zero_poly(order: usize) -> Poly {
    vec![BigRational::zero(); order + 1]
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = zero_poly(a.len() - 1);
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn poly_scale(a: &Poly, c: &BigRational) -> Poly {
    a.iter().map(|x| x * c).collect()
}

/// `Σ_k (s·D)^k / k!`.
fn exp_poly(order: usize, s: &BigRational) -> Poly {
    (0..=order)
        .map(|k| num_traits::pow(s.clone(), k) / BigRational::from_integer(factorial(k as u32)))
        .collect()
}

/// `1/a` for `a(0) ≠ 0`.
fn poly_inv(a: &Poly) -> Poly {
    let mut out = zero_poly(a.len() - 1);
    out[0] = a[0].recip();
    for n in 1..a.len() {
        let mut s = BigRational::zero();
        for k in 1..=n {
            s += &a[k] * &out[n - k];
        }
        out[n] = -s * &out[0];
    }
    out
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let e = |i: usize, j: usize| poly_add(&poly_mul(&a[i][0], &b[0][j]), &poly_mul(&a[i][1], &b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// The matrix `log(e^X e^Y)` through `D^order`.
fn log_product(order: usize) -> Mat {
    let one = BigRational::one();
    let exp_d = exp_poly(order, &one);
    let mut exp_d_minus_one = exp_d.clone();
    exp_d_minus_one[0] -= &one;
    let z = zero_poly(order);
    // e^X e^Y − 1 = [[e^D − 1, e^D], [0, 0]]
    let a: Mat = [[exp_d_minus_one, exp_d], [z.clone(), z.clone()]];
    let mut power = a.clone();
    let mut acc: Mat = [[z.clone(), z.clone()], [z.clone(), z]];
    // entries of A^k are O(D^{k−1})
    for k in 1..=order + 1 {
        let c = BigRational::new(if k % 2 == 1 { BigInt::one() } else { -BigInt::one() }, BigInt::from(k));
        for i in 0..2 {
            for j in 0..2 {
                acc[i][j] = poly_add(&acc[i][j], &poly_scale(&power[i][j], &c));
            }
        }
        power = mat_mul(&power, &a);
    }
    acc
}

/// Coefficients of `c(D)` through `D^order`.
pub fn bch_coefficients(order: usize) -> Vec<BigRational> {
    log_product(order)[0][1].clone()
}

/// Bernoulli numbers with `B_1 = −1/2`, from `Σ_{k≤m} C(m+1,k) B_k = 0`.
fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=n {
        let mut s = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += BigRational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(k))) * bk;
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// `D/(1 − e^{−D}) = Σ B_n⁺ Dⁿ/n!` with `B_1⁺ = +1/2`.
pub fn bernoulli_series(order: usize) -> Vec<BigRational> {
    bernoulli_numbers(order)
        .into_iter()
        .enumerate()
        .map(|(n, b)| {
            let b = if n == 1 { -b } else { b };
            b / BigRational::from_integer(factorial(n as u32))
        })
        .collect()
}

/// `(D/2) e^{D/2} / sinh(D/2)`, by series division.
pub fn half_angle_series(order: usize) -> Vec<BigRational> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    // sinh(D/2)/(D/2) = Σ (D/2)^{2m} / (2m+1)!
    let mut shc = zero_poly(order);
    for m in (0..=order).step_by(2) {
        shc[m] = num_traits::pow(half.clone(), m) / BigRational::from_integer(factorial(m as u32 + 1));
    }
    poly_mul(&exp_poly(order, &half), &poly_inv(&shc))
}

#[derive(Clone, Debug)]
pub struct BchCheck {
    pub order: usize,
    pub computed: Vec<BigRational>,
    pub bernoulli: Vec<BigRational>,
    pub half_angle: Vec<BigRational>,
    /// The `X` component of the logarithm is exactly `X`.
    pub x_part_exact: bool,
}

impl BchCheck {
    /// Orders at which the three series disagree.
    pub fn mismatches(&self) -> Vec<usize> {
        (0..=self.order)
            .filter(|&n| self.computed[n] != self.bernoulli[n] || self.bernoulli[n] != self.half_angle[n])
            .collect()
    }

    pub fn passes(&self) -> bool {
        self.x_part_exact && self.mismatches().is_empty()
    }
}

pub fn bch_series_check(order: usize) -> BchCheck {
    let log = log_product(order);
    let mut d = zero_poly(order);
    if order >= 1 {
        d[1] = BigRational::one();
    }
    let z = zero_poly(order);
    let x_part_exact = log[0][0] == d && log[1][0] == z && log[1][1] == z;
    BchCheck {
        order,
        computed: log[0][1].clone(),
        bernoulli: bernoulli_series(order),
        half_angle: half_angle_series(order),
        x_part_exact,
    }
}
