//! `∮ dz (V_+ τ)(V_− τ̃) = 0` for the 1-matrix partition function at a
//! concrete size, and for the deformed product `e^Ŷ ∏_c Z(t^c)` with the
//! conjugated operators `V^c_±(z, λ)`.
//!
//! Every partition function entering a factor is expanded up to a weight
//! `W` (`Σ p·e` over one color's times) chosen so that the `z^{−1}`
//! coefficient of the product is complete at the retained orders; terms that
//! could still receive contributions from beyond `W` are dropped right after
//! the `t_n`-shift.

use serde::Serialize;

use super::conjugation::build_conjugated_vertex;
use super::{residue_of_product, AScale, Sign, VertexConvention, VertexOp};
use crate::decomposition::build_y;
use crate::error::{Error, Result};
use crate::matrix::{NMode, OneMatrixModel};
use num_traits::One;

use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TimeVar, TruncSpec};

/// Sizes and orders of a bilinear check. Both factors use the same size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BilinearParams {
    pub nsize: u32,
    /// Joint time degree kept in the residual.
    pub deg: u32,
    /// Largest time index kept in the residual.
    pub p_max: u32,
    /// Added to the minimal expansion weight; the residual must not change.
    pub extra_weight: u32,
    /// Half-width of the z-window; defaults to the smallest sufficient one.
    pub z_half_width: Option<i32>,
}

impl BilinearParams {
    pub fn new(nsize: u32, deg: u32, p_max: u32) -> Self {
        BilinearParams { nsize, deg, p_max, extra_weight: 0, z_half_width: None }
    }

    pub fn with_extra_weight(mut self, w: u32) -> Self {
        self.extra_weight = w;
        self
    }

    pub fn with_z_half_width(mut self, w: i32) -> Self {
        self.z_half_width = Some(w);
        self
    }

    /// Weight up to which each partition function is expanded.
    pub fn exact_weight(&self, max_hl: u32) -> u32 {
        self.p_max * self.deg + 2 * max_hl + 1 + self.extra_weight
    }

    fn min_half_width(&self, max_hl: u32) -> i32 {
        (self.exact_weight(max_hl) + self.nsize + 1) as i32
    }

    pub fn z_window(&self, max_hl: u32) -> (i32, i32) {
        let w = self.z_half_width.unwrap_or_else(|| self.min_half_width(max_hl));
        (-w, w)
    }

    fn factor_trunc(&self, max_hl: u32) -> TruncSpec {
        TruncSpec::new(max_hl, self.deg, self.p_max, self.z_window(max_hl))
    }

    fn residual_trunc(&self, max_hl: u32) -> TruncSpec {
        TruncSpec::new(max_hl, self.deg, self.p_max, (0, 0))
    }

    fn validate(&self, max_hl: u32) -> Result<()> {
        if self.nsize == 0 {
            return Err(Error::Config("Nsize must be positive".into()));
        }
        let (lo, hi) = self.z_window(max_hl);
        if hi < self.min_half_width(max_hl) {
            return Err(Error::WindowInsufficient {
                min: lo,
                max: hi,
                reason: format!("the factors need |z| up to {}", self.min_half_width(max_hl) - 1),
            });
        }
        if self.p_max > 60 || self.exact_weight(0) > 120 {
            return Err(Error::Budget(format!("expansion weight {} too large", self.exact_weight(0))));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BilinearCheck {
    pub params: BilinearParams,
    pub convention: VertexConvention,
    pub z_window: (i32, i32),
    pub factor_terms: (usize, usize),
    pub residual: Series,
}

/// `Z(t^color)` of size `n` up to weight `w`, with at most `t0_cap` powers of `t_0`.
fn color_z(n: u32, color: u8, set: u8, trunc: TruncSpec, t0_cap: u32) -> Series {
    let t0 = TimeVar { set, color, p: 0 };
    OneMatrixModel::new(trunc)
        .with_color(color)
        .with_set(set)
        .with_n_mode(NMode::Concrete(n))
        .partition_function()
        .filter(|m| m.times.exp(t0) <= t0_cap)
}

/// `V_sign(z) Z(t^color)` on the time set `set`.
pub fn hirota_factor(params: &BilinearParams, color: u8, sign: Sign, set: u8, conv: VertexConvention) -> Result<Series> {
    params.validate(0)?;
    let w = params.exact_weight(0);
    let z = color_z(params.nsize, color, set, TruncSpec::new(0, params.deg + w, w, (0, 0)).with_weight(w), params.deg);
    let v = VertexOp::new(sign, params.nsize).with_color(color).with_set(set).with_convention(conv);
    v.apply(&z, w, &params.factor_trunc(0))
}

/// Residue of `(V_+ Z[t])(V_− Z[t̃])` in the joint times.
pub fn hirota_residual_1mm(params: &BilinearParams, conv: VertexConvention) -> Result<BilinearCheck> {
    let (f, g) = rayon::join(
        || hirota_factor(params, 1, Sign::Plus, 0, conv),
        || hirota_factor(params, 1, Sign::Minus, 1, conv),
    );
    let (f, g) = (f?, g?);
    let residual = residue_of_product(&f, &g, &params.residual_trunc(0))?;
    Ok(BilinearCheck {
        params: *params,
        convention: conv,
        z_window: params.z_window(0),
        factor_terms: (f.len(), g.len()),
        residual,
    })
}

/// Result of fixing the charge bookkeeping at the Gaussian point.
#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub nsize: u32,
    pub chosen: VertexConvention,
    /// Every candidate whose residual vanishes with all times at zero.
    pub vanishing: Vec<VertexConvention>,
    pub candidates: usize,
}

/// Tries the charge assignments with all times set to zero and keeps the
/// first that works, starting from `V_+ ↦ z^{−N}`, `V_− ↦ z^{+N}`.
pub fn calibrate_convention(nsize: u32, a_scale: AScale) -> Result<Calibration> {
    let mut candidates = Vec::new();
    for same_charge in [false, true] {
        for plus_charge in [-1, 1] {
            candidates.push(VertexConvention { a_scale, plus_charge, same_charge });
        }
    }
    let params = BilinearParams::new(nsize, 0, 1);
    let mut vanishing = Vec::new();
    for conv in &candidates {
        if hirota_residual_1mm(&params, *conv)?.residual.is_zero() {
            vanishing.push(*conv);
        }
    }
    let chosen = *vanishing
        .first()
        .ok_or_else(|| Error::Config("no charge assignment vanishes at the Gaussian point".into()))?;
    Ok(Calibration { nsize, chosen, vanishing, candidates: candidates.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorBilinearCheck {
    pub color: u8,
    pub d: u8,
    pub k: u32,
    pub params: BilinearParams,
    pub convention: VertexConvention,
    pub z_window: (i32, i32),
    pub factor_terms: (usize, usize),
    pub residual: Series,
}

/// `V^c_sign(z, λ) e^Ŷ ∏_{c'} Z(t^{c'})` on the time set `set`, at `N = nsize`.
pub fn tensor_bilinear_factor(
    color: u8,
    d: u8,
    k: u32,
    params: &BilinearParams,
    sign: Sign,
    set: u8,
    conv: VertexConvention,
) -> Result<Series> {
    params.validate(2 * k)?;
    if color == 0 || color > d {
        return Err(Error::Config(format!("color {color} outside 1..={d}")));
    }
    let n = params.nsize;
    let max_hl = 2 * k;
    let w = params.exact_weight(max_hl);
    let (deg, p_max) = (params.deg, params.p_max);
    let to_set = |v: TimeVar| v.with_set(set);

    // every color is consumed by at most max_hl derivatives of Ŷ
    let wide = TruncSpec::new(max_hl, deg + max_hl + w, w, (0, 0));
    let mut g = color_z(n, color, set, TruncSpec::new(0, deg + max_hl + w, w, (0, 0)).with_weight(w), deg + max_hl)
        .with_trunc(wide.clone());
    let spectator = TruncSpec::new(0, deg + max_hl, p_max.max(max_hl), (0, 0)).with_weight(p_max * deg + max_hl);
    for c in (1..=d).filter(|&c| c != color) {
        g = g.mul_series(&color_z(n, c, set, spectator.clone(), deg + max_hl).with_trunc(wide.clone()));
    }

    let y = build_y(d, k).eval_n(n)?.map_vars(to_set);
    let deformed = y.exp_apply(&g, max_hl as usize + 1)?;

    let out = params.factor_trunc(max_hl);
    let v = VertexOp::new(sign, n).with_color(color).with_set(set).with_convention(conv);
    let in_color = |t: &TimeVar| t.set == set && t.color == color;
    let shifted = v
        .b_shift(&deformed.with_trunc(wide.with_z_window(out.z_window)), Some(w))
        .filter(|m| {
            m.times.iter().filter(|(t, _)| in_color(t)).all(|(t, _)| t.p as u32 <= p_max)
                && m.times.iter().filter(|(t, _)| in_color(t)).map(|(_, e)| e).sum::<u32>() <= deg
        });

    let mut middle = build_conjugated_vertex(color, sign, d, k, p_max).middle;
    if conv.a_scale == AScale::Unit {
        middle = middle.compose(&crate::series::DiffOp::multiplication(Monomial::n_pow(-1), GaussRat::one(), max_hl));
    }
    let middle = middle.eval_n(n)?.map_vars(to_set);
    let mid = middle.exp_apply(&shifted, max_hl as usize + 1)?.with_trunc(out.clone());
    let charged = mid.mul_term(&Monomial::z_pow(v.charge()), &GaussRat::one());
    Ok(v.a_part(p_max, &out)?.mul_series(&charged))
}

/// Residue of `(V^c_+ e^Ŷ ∏Z[t])(V^c_− e^Ŷ ∏Z[t̃])`.
pub fn tensor_bilinear_residual(
    color: u8,
    d: u8,
    k: u32,
    params: &BilinearParams,
    conv: VertexConvention,
) -> Result<TensorBilinearCheck> {
    let (f, g) = rayon::join(
        || tensor_bilinear_factor(color, d, k, params, Sign::Plus, 0, conv),
        || tensor_bilinear_factor(color, d, k, params, Sign::Minus, 1, conv),
    );
    let (f, g) = (f?, g?);
    let residual = residue_of_product(&f, &g, &params.residual_trunc(2 * k))?;
    Ok(TensorBilinearCheck {
        color,
        d,
        k,
        params: *params,
        convention: conv,
        z_window: params.z_window(2 * k),
        factor_terms: (f.len(), g.len()),
        residual,
    })
}

/// The `λ = 0` reduction: differences between the undeformed tensor
/// factors with the spectator colors set to zero and the 1-matrix factors in
/// color `c` (for `V_+` and `V_−`), then between the two residuals.
pub fn tensor_reduction_residuals(
    color: u8,
    d: u8,
    params: &BilinearParams,
    conv: VertexConvention,
) -> Result<Vec<Series>> {
    let only_c = |v: &TimeVar| v.color == color;
    let mut out = Vec::new();
    let mut factors = Vec::new();
    for (sign, set) in [(Sign::Plus, 0), (Sign::Minus, 1)] {
        let tensor = tensor_bilinear_factor(color, d, 0, params, sign, set, conv)?;
        let matrix = hirota_factor(params, color, sign, set, conv)?;
        out.push(&tensor.restrict_vars(only_c) - &matrix);
        factors.push((tensor, matrix));
    }
    let tr = params.residual_trunc(0);
    let tensor_res = residue_of_product(&factors[0].0, &factors[1].0, &tr)?.restrict_vars(only_c);
    let matrix_res = residue_of_product(&factors[0].1, &factors[1].1, &tr)?;
    out.push(&tensor_res - &matrix_res);
    Ok(out)
}
