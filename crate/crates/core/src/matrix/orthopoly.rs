//! Orthogonal polynomials for the measure `dμ(x) = e^{−s(x²/2 + t_4 x⁴/4)} dx`
//! (normalized by its Gaussian part), obtained as `⟨det(x − M)⟩`.
//!
//! The scale `s` is fixed independently of the matrix size so that a single
//! measure serves every `Z_N = ∫ ∏ dμ(x_i) Δ(x)²`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::factorial;
use super::free_energy::T4;
use crate::error::Result;
use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TruncSpec};
use crate::wick::pairing::bijections;
use crate::wick::{hermitian_moment_at, TraceWord};

fn t4_trunc(order: u32) -> TruncSpec {
    TruncSpec::new(0, order, 4, (0, 0))
}

fn rat(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `(−s/4)^j / j!`.
fn vertex_weight(scale: u32, j: u32) -> BigRational {
    let num = num_traits::pow(BigInt::from(scale), j as usize);
    let num = if j % 2 == 0 { num } else { -num };
    rat(num, factorial(j) * num_traits::pow(BigInt::from(4), j as usize))
}

/// `∫ x^k dμ` through `t_4^order`, with `∫ dμ = 1` at `t_4 = 0`.
pub fn measure_moment(k: u32, scale: u32, order: u32) -> Series {
    let mut out = Series::zero(t4_trunc(order));
    if k % 2 == 1 {
        return out;
    }
    for j in 0..=order {
        let m = (k + 4 * j) / 2;
        // (2m − 1)!! / s^m
        let dfact: BigInt = (1..=m).map(|i| BigInt::from(2 * i - 1)).product();
        let gauss = rat(dfact, num_traits::pow(BigInt::from(scale), m as usize));
        out.add_term(Monomial::time_pow(T4, j), GaussRat::real(gauss * vertex_weight(scale, j)));
    }
    out
}

/// Monic polynomial with coefficients in `ℚ[[t_4]]`; `coeffs[k]` multiplies `x^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoPoly {
    pub n: u32,
    pub scale: u32,
    pub coeffs: Vec<Series>,
}

impl OrthoPoly {
    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == Series::one(c.trunc().clone()))
    }

    /// `∫ P(x) x^m dμ`.
    pub fn pair_with_power(&self, m: u32, order: u32) -> Series {
        let mut out = Series::zero(t4_trunc(order));
        for (k, c) in self.coeffs.iter().enumerate() {
            out = &out + &(c * &measure_moment(k as u32 + m, self.scale, order));
        }
        out
    }
}

/// Integer partitions of `k` in non-increasing order.
fn partitions(k: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

/// `e_k = Σ_λ (−1)^{k−ℓ(λ)} p_λ / z_λ`, as (λ, coefficient) pairs.
fn elementary_in_power_sums(k: u32) -> Vec<(Vec<u32>, BigRational)> {
    partitions(k)
        .into_iter()
        .map(|lambda| {
            let mut z = BigInt::one();
            let mut i = 0;
            while i < lambda.len() {
                let part = lambda[i];
                let mult = lambda[i..].iter().take_while(|&&x| x == part).count();
                z *= num_traits::pow(BigInt::from(part), mult) * factorial(mult as u32);
                i += mult;
            }
            let sign = if (k as usize - lambda.len()) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            (lambda, rat(sign, z))
        })
        .collect()
}

/// `⟨∏ Tr M^{λ_i}⟩` in the size-`n` quartic model, through `t_4^order`,
/// before dividing by the partition function.
fn unnormalized_moment(lambda: &[u32], n: u32, scale: u32, order: u32) -> Series {
    let s = BigRational::from_integer(BigInt::from(scale));
    let mut out = Series::zero(t4_trunc(order));
    for j in 0..=order {
        let mut powers = lambda.to_vec();
        powers.extend(std::iter::repeat(4).take(j as usize));
        let v = hermitian_moment_at(&TraceWord::new(powers), n, &s) * vertex_weight(scale, j);
        out.add_term(Monomial::time_pow(T4, j), GaussRat::real(v));
    }
    out
}

/// `P_n(x) = ⟨det(x − M)⟩` for `n × n` matrices with weight `e^{−s Tr V(M)}`.
pub fn charpoly_expectation(n: u32, scale: u32, order: u32) -> Result<OrthoPoly> {
    let z_inv = unnormalized_moment(&[], n, scale, order).inv_trunc()?;
    let mut coeffs = vec![Series::zero(t4_trunc(order)); n as usize + 1];
    // det(x − M) = Σ_k (−1)^k e_k(M) x^{n−k}
    for k in 0..=n {
        let mut ek = Series::zero(t4_trunc(order));
        for (lambda, c) in elementary_in_power_sums(k) {
            let m = unnormalized_moment(&lambda, n, scale, order);
            ek = &ek + &m.scale(&GaussRat::real(c));
        }
        let ek = &ek * &z_inv;
        coeffs[(n - k) as usize] = if k % 2 == 0 { ek } else { -ek };
    }
    Ok(OrthoPoly { n, scale, coeffs })
}

/// `∫ P_n(x) x^m dμ`; zero whenever `m < n`.
pub fn orthogonality_residual(n: u32, m: u32, scale: u32, order: u32) -> Result<Series> {
    Ok(charpoly_expectation(n, scale, order)?.pair_with_power(m, order))
}

/// `Z_n = n! det[m_{i+j}]_{0 ≤ i,j < n}`.
pub fn eigenvalue_partition_function(n: u32, scale: u32, order: u32) -> Series {
    let moments: Vec<Series> = (0..2 * n.max(1)).map(|k| measure_moment(k, scale, order)).collect();
    let mut det = Series::zero(t4_trunc(order));
    for perm in bijections(n as usize) {
        let mut term = Series::one(t4_trunc(order));
        for (i, &j) in perm.iter().enumerate() {
            term = &term * &moments[i + j];
            if term.is_zero() {
                break;
            }
        }
        if permutation_is_odd(&perm) {
            term = -term;
        }
        det = &det + &term;
    }
    det.scale(&GaussRat::from_bigint(factorial(n)))
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let inversions: usize = (0..perm.len())
        .map(|i| (i + 1..perm.len()).filter(|&j| perm[j] < perm[i]).count())
        .sum();
    inversions % 2 == 1
}

#[derive(Clone, Debug)]
pub struct KnResidual {
    pub n: u32,
    /// `K_n = ∫ P_n(x) xⁿ dμ`.
    pub kn: Series,
    /// `K_n − Z_{n+1}/((n+1) Z_n)`.
    pub ratio: Series,
    /// `Z_n − n! ∏_{i<n} K_i`.
    pub product: Series,
}

impl KnResidual {
    pub fn is_zero(&self) -> bool {
        self.ratio.is_zero() && self.product.is_zero()
    }
}

pub fn kn_identity_residual(n: u32, scale: u32, order: u32) -> Result<KnResidual> {
    let k_of = |i: u32| -> Result<Series> { Ok(charpoly_expectation(i, scale, order)?.pair_with_power(i, order)) };
    let kn = k_of(n)?;
    let zn = eigenvalue_partition_function(n, scale, order);
    let zn1 = eigenvalue_partition_function(n + 1, scale, order);
    let ratio_rhs = (&zn1 * &zn.inv_trunc()?).scale(&GaussRat::from_ratio(1, n as i64 + 1));
    let ratio = &kn - &ratio_rhs;
    let mut prod = Series::constant(GaussRat::from_bigint(factorial(n)), t4_trunc(order));
    for i in 0..n {
        prod = &prod * &k_of(i)?;
    }
    let product = &zn - &prod;
    Ok(KnResidual { n, kn, ratio, product })
}
