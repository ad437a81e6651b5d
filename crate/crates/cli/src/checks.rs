//! One function per subcommand, each producing its reports in a fixed order.

use std::path::Path;

use melonic_core::bilinear::{
    calibrate_convention, conjugation_residual, hirota_residual_1mm, tensor_bilinear_residual,
    tensor_reduction_residuals, AScale, BilinearParams,
};
use melonic_core::decomposition::{bch_series_check, commutator_residual, decomposition_residual, degree_grading, MelonicModel};
use melonic_core::graphs::ColoredGraph;
use melonic_core::matrix::{
    charpoly_expectation, kn_identity_residual, orthogonality_residual, planar_two_point, quartic_free_energy,
    tutte_closed_form, virasoro_residual,
};
use melonic_core::wick::{hermitian_moment, hermitian_oracle, tensor_moment, tensor_oracle, TraceWord};
use melonic_core::{Error, GaussRat, Result, Series};
use serde_json::json;

use crate::report::{CheckReport, Params};

/// Flags shared by the `verify` and `compute` subcommands.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Knobs {
    /// Tensor rank.
    #[arg(long = "D")]
    pub d: Option<u8>,
    /// Truncation order: `K` for tensor checks (√λ^{2K}), the t_4 order or
    /// the BCH order elsewhere.
    #[arg(long = "order", short = 'K')]
    pub order: Option<u32>,
    #[arg(long)]
    pub pmax: Option<u32>,
    /// Time degree.
    #[arg(long)]
    pub deg: Option<u32>,
    /// Matrix size (largest size for checks that sweep sizes).
    #[arg(long)]
    pub nsize: Option<u32>,
    /// Half-width of the z-window for residue checks.
    #[arg(long)]
    pub zwindow: Option<i32>,
    /// Restrict tensor bilinear checks to one color.
    #[arg(long)]
    pub color: Option<u8>,
}

fn lines(s: &Series) -> serde_json::Value {
    json!(s.text_lines())
}

fn rank(k: &Knobs) -> Result<u8> {
    let d = k.d.unwrap_or(3);
    if !(2..=6).contains(&d) {
        return Err(Error::Config(format!("D = {d} outside 2..=6")));
    }
    Ok(d)
}

/// Runs `f`, turning a grading violation into a failed report and any other
/// error into an error report.
fn guarded(check: &str, params: Params, f: impl FnOnce(Params) -> Result<CheckReport>) -> CheckReport {
    match f(params.clone()) {
        Ok(r) => r,
        Err(e @ Error::Grading { .. }) => {
            let mut r = CheckReport::new(check, params).require(false, "grading");
            r.notes.push(e.to_string());
            r
        }
        Err(e) => CheckReport::error(check, params, &e),
    }
}

pub fn decomposition(k: &Knobs) -> Vec<CheckReport> {
    let d = match rank(k) {
        Ok(d) => d,
        Err(e) => return vec![CheckReport::error("decomposition", Params::default(), &e)],
    };
    let kk = k.order.unwrap_or(1);
    let nmax = k.nsize.unwrap_or(2);
    let params = Params { d: Some(d), k: Some(kk), nsize: Some(nmax), ..Default::default() };
    if kk > 3 || (d > 3 && kk > 2) {
        return vec![CheckReport::error("decomposition", params, &Error::Budget(format!("D = {d}, K = {kk}")))];
    }
    let model = MelonicModel::new(d, kk);
    let sizes: Vec<u32> = (1..=nmax).collect();
    let main = guarded("decomposition", params.clone(), |p| {
        let rep = decomposition_residual(&model, &sizes)?;
        let labels: Vec<(String, &Series)> = rep
            .oracle
            .iter()
            .flat_map(|(n, a, b)| [(format!("direct at N={n}"), a), (format!("intermediate at N={n}"), b)])
            .collect();
        let mut all: Vec<(&str, &Series)> = vec![("y-route - intermediate", &rep.r1), ("intermediate - direct", &rep.r2)];
        all.extend(labels.iter().map(|(l, s)| (l.as_str(), *s)));
        Ok(CheckReport::new("decomposition", p).with_residuals(all).data(json!({ "Z": lines(&rep.direct) })))
    });
    let grading = guarded("degree-grading", Params { nsize: None, ..params }, |p| {
        let f = degree_grading(&model)?;
        Ok(CheckReport::new("degree-grading", p).data(json!({ "logZ": lines(&f) })))
    });
    vec![main, grading]
}

pub fn commutator(k: &Knobs) -> Vec<CheckReport> {
    let (kk, p_max, deg) = (k.order.unwrap_or(1), k.pmax.unwrap_or(4), k.deg.unwrap_or(3));
    let d = match rank(k) {
        Ok(d) => d,
        Err(e) => return vec![CheckReport::error("commutator", Params::default(), &e)],
    };
    let params = Params { d: Some(d), k: Some(kk), p_max: Some(p_max), deg: Some(deg), ..Default::default() };
    if kk > 4 || p_max > 8 || deg > 4 {
        return vec![CheckReport::error("commutator", params, &Error::Budget("commutator sweep too large".into()))];
    }
    let c = commutator_residual(d, p_max, deg, kk);
    let mut r = CheckReport::new("commutator", params).data(json!({ "monomials": c.monomials, "y_terms": c.y_terms }));
    if let Some((m, s)) = &c.failure {
        let label = format!("on {m:?}");
        r = r.with_residuals([(label.as_str(), s)]);
    }
    vec![r]
}

pub fn bch(k: &Knobs) -> Vec<CheckReport> {
    let order = k.order.unwrap_or(8);
    let params = Params { order: Some(order), ..Default::default() };
    if order > 40 {
        return vec![CheckReport::error("bch", params, &Error::Budget(format!("order {order}")))];
    }
    let c = bch_series_check(order as usize);
    let mut r = CheckReport::new("bch", params)
        .require(c.x_part_exact, "X-component of log(e^X e^Y) equals X")
        .data(json!({ "coefficients": c.computed.iter().map(|x| x.to_string()).collect::<Vec<_>>() }));
    for n in c.mismatches() {
        r = r.require(false, &format!("order {n}: {} vs {} vs {}", c.computed[n], c.bernoulli[n], c.half_angle[n]));
    }
    vec![r]
}

pub fn virasoro(k: &Knobs) -> Vec<CheckReport> {
    let (p_max, deg) = (k.pmax.unwrap_or(4), k.deg.unwrap_or(3));
    (-1..=2)
        .map(|n| {
            let params = Params { n: Some(n), p_max: Some(p_max), deg: Some(deg), ..Default::default() };
            if p_max > 8 || deg > 4 {
                return CheckReport::error("virasoro", params, &Error::Budget("truncation too large".into()));
            }
            guarded("virasoro", params, |p| {
                let r = virasoro_residual(n, p_max, deg)?;
                Ok(CheckReport::new("virasoro", p).with_residuals([("", &r)]))
            })
        })
        .collect()
}

pub fn orthopoly(k: &Knobs) -> Vec<CheckReport> {
    let (nmax, order) = (k.nsize.unwrap_or(3), k.order.unwrap_or(2));
    if nmax == 0 || nmax > 5 || order > 4 {
        let params = Params { nsize: Some(nmax), order: Some(order), ..Default::default() };
        return vec![CheckReport::error("orthopoly", params, &Error::Budget("sizes 1..=5, t_4 order <= 4".into()))];
    }
    let mut out = Vec::new();
    for n in 1..=nmax {
        let params = Params { nsize: Some(n), order: Some(order), ..Default::default() };
        out.push(guarded("orthogonality", params.clone(), |p| {
            let res: Vec<(String, Series)> = (0..n)
                .map(|m| Ok((format!("M={m}"), orthogonality_residual(n, m, n, order)?)))
                .collect::<Result<_>>()?;
            let r = CheckReport::new("orthogonality", p).note(format!("measure scale s = {n}"));
            Ok(r.with_residuals(res.iter().map(|(l, s)| (l.as_str(), s))))
        }));
        out.push(guarded("kn-identities", params.clone(), |p| {
            let kr = kn_identity_residual(n, n, order)?;
            Ok(CheckReport::new("kn-identities", p)
                .with_residuals([("K_N ratio", &kr.ratio), ("Z_N product", &kr.product)])
                .data(json!({ "K_N": lines(&kr.kn) })))
        }));
        out.push(guarded("gaussian-norms", Params { order: Some(0), ..params }, |p| {
            // h_j/h_0 = j!/N^j for the weight e^{−N x²/2}
            let h0 = charpoly_expectation(0, n, 0)?.pair_with_power(0, 0).constant_term();
            let mut r = CheckReport::new("gaussian-norms", p);
            let mut ratios = Vec::new();
            for j in 0..=n {
                let hj = charpoly_expectation(j, n, 0)?.pair_with_power(j, 0).constant_term();
                let ratio = &hj * &h0.inv().ok_or(Error::NotInvertible)?;
                let fact: i64 = (1..=j as i64).product();
                let want = GaussRat::from_ratio(fact, (n as i64).pow(j));
                r = r.require(ratio == want, &format!("h_{j}/h_0 = {want}, got {ratio}"));
                ratios.push(ratio.to_string());
            }
            Ok(r.data(json!({ "ratios": ratios })))
        }));
    }
    out
}

fn bilinear_params(k: &Knobs, default_deg: u32, nsize: u32) -> BilinearParams {
    let mut p = BilinearParams::new(nsize, k.deg.unwrap_or(default_deg), k.pmax.unwrap_or(4));
    if let Some(w) = k.zwindow {
        p = p.with_z_half_width(w);
    }
    p
}

fn budget_ok(p: &BilinearParams) -> Result<()> {
    if p.nsize > 4 || p.deg > 3 || p.p_max > 6 {
        return Err(Error::Budget("bilinear checks support Nsize <= 4, deg <= 3, pmax <= 6".into()));
    }
    Ok(())
}

pub fn hirota(k: &Knobs) -> Vec<CheckReport> {
    let nmax = k.nsize.unwrap_or(2);
    let mut out = Vec::new();
    for n in 1..=nmax.max(1) {
        let bp = bilinear_params(k, 2, n);
        let params = Params {
            nsize: Some(n),
            deg: Some(bp.deg),
            p_max: Some(bp.p_max),
            z_window: Some(bp.z_window(0)),
            ..Default::default()
        };
        out.push(guarded("hirota", params, |p| {
            budget_ok(&bp)?;
            let cal = calibrate_convention(n, AScale::N)?;
            let c = hirota_residual_1mm(&bp, cal.chosen)?;
            let mut r = CheckReport::new("hirota", p).with_residuals([("", &c.residual)]).note(format!(
                "convention: A-part scaled by N, V_+ carries z^{}N, V_- carries z^{}N",
                if cal.chosen.plus_charge < 0 { "-" } else { "+" },
                if cal.chosen.plus_charge < 0 { "+" } else { "-" },
            ));
            if cal.vanishing.len() > 1 {
                r = r.note(format!(
                    "{} of {} charge assignments vanish at the Gaussian point; the first was kept",
                    cal.vanishing.len(),
                    cal.candidates
                ));
            }
            Ok(r.data(json!({ "factor_terms": [c.factor_terms.0, c.factor_terms.1] })))
        }));
    }
    out
}

pub fn conjugation(k: &Knobs) -> Vec<CheckReport> {
    let d = match rank(k) {
        Ok(d) => d,
        Err(e) => return vec![CheckReport::error("conjugation", Params::default(), &e)],
    };
    let (kk, p_max, deg) = (k.order.unwrap_or(1), k.pmax.unwrap_or(4), k.deg.unwrap_or(2));
    let params = Params { d: Some(d), k: Some(kk), p_max: Some(p_max), deg: Some(deg), ..Default::default() };
    if kk > 2 || p_max > 6 || deg > 3 || d > 4 {
        return vec![CheckReport::error("conjugation", params, &Error::Budget("D <= 4, K <= 2, pmax <= 6, deg <= 3".into()))];
    }
    vec![guarded("conjugation", params, |p| {
        let c = conjugation_residual(d, kk, p_max, deg)?;
        let mut r = CheckReport::new("conjugation", p)
            .require(c.b_commutes, "[B, Y] = 0")
            .require(c.ad2_vanishes, "[A, [A, Y]] = 0")
            .require(c.commutator_pure_derivative, "[A, Y] is a pure derivative")
            .require(c.commutator_commutes_with_y, "[[A, Y], Y] = 0")
            .require(c.commutator_commutes_with_b, "[[A, Y], B] = 0")
            .require(c.charge_commutes, "[d/dt_0, Y] = 0")
            .require(c.closed_form_matches_commutator, "closed form = -+N[A, Y]")
            .data(json!({ "monomials": c.monomials }));
        for (color, sign, m, diff) in &c.failures {
            r = r.require(false, &format!("color {color}, sign {sign:?}, monomial {m}: {diff}"));
        }
        Ok(r)
    })]
}

pub fn tensor_bilinear(k: &Knobs) -> Vec<CheckReport> {
    let d = match rank(k) {
        Ok(d) => d,
        Err(e) => return vec![CheckReport::error("tensor-bilinear", Params::default(), &e)],
    };
    let kk = k.order.unwrap_or(1);
    let bp = bilinear_params(k, 1, k.nsize.unwrap_or(1));
    let colors: Vec<u8> = match k.color {
        Some(c) => vec![c],
        None => (1..=d).collect(),
    };
    let mut out = Vec::new();
    for c in colors {
        let params = Params {
            d: Some(d),
            k: Some(kk),
            nsize: Some(bp.nsize),
            deg: Some(bp.deg),
            p_max: Some(bp.p_max),
            color: Some(c),
            z_window: Some(bp.z_window(2 * kk)),
            ..Default::default()
        };
        out.push(guarded("tensor-bilinear", params.clone(), |p| {
            budget_ok(&bp)?;
            if kk > 1 || d > 3 {
                return Err(Error::Budget("tensor bilinear checks support D <= 3, K <= 1".into()));
            }
            let conv = calibrate_convention(bp.nsize, AScale::N)?.chosen;
            let t = tensor_bilinear_residual(c, d, kk, &bp, conv)?;
            Ok(CheckReport::new("tensor-bilinear", p)
                .with_residuals([("", &t.residual)])
                .data(json!({ "factor_terms": [t.factor_terms.0, t.factor_terms.1] })))
        }));
        let red_params = Params { k: Some(0), z_window: Some(bp.z_window(0)), ..params };
        out.push(guarded("tensor-bilinear-reduction", red_params, |p| {
            budget_ok(&bp)?;
            let conv = calibrate_convention(bp.nsize, AScale::N)?.chosen;
            let res = tensor_reduction_residuals(c, d, &bp, conv)?;
            Ok(CheckReport::new("tensor-bilinear-reduction", p).with_residuals([
                ("V+ factor", &res[0]),
                ("V- factor", &res[1]),
                ("residual", &res[2]),
            ]))
        }));
    }
    out
}

pub fn tutte(nmax: u32) -> Vec<CheckReport> {
    let params = Params { order: Some(nmax), ..Default::default() };
    if nmax > 7 {
        return vec![CheckReport::error("tutte", params, &Error::Budget(format!("nmax {nmax} > 7")))];
    }
    vec![guarded("tutte", params, |p| {
        let wick = planar_two_point(nmax)?;
        let closed: Vec<GaussRat> = (0..=nmax).map(|n| GaussRat::from_bigint(tutte_closed_form(n))).collect();
        let mut r = CheckReport::new("tutte", p);
        for (n, (a, b)) in wick.iter().zip(&closed).enumerate() {
            r = r.require(a == b, &format!("n = {n}: Wick {a} vs closed form {b}"));
        }
        let coeffs: Vec<String> = closed.iter().map(|c| c.to_string()).collect();
        Ok(r.data(json!({ "coefficients": coeffs })))
    })]
}

pub fn free_energy(k: &Knobs) -> Vec<CheckReport> {
    let order = k.order.unwrap_or(3);
    let params = Params { order: Some(order), ..Default::default() };
    if order > 5 {
        return vec![CheckReport::error("free-energy", params, &Error::Budget(format!("t_4 order {order} > 5")))];
    }
    vec![guarded("free-energy", params, |p| {
        let f = quartic_free_energy(order)?;
        Ok(CheckReport::new("free-energy", p).data(json!({ "F": lines(&f) })))
    })]
}

fn load_graph(file: &Path) -> Result<ColoredGraph> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
    let g = ColoredGraph::from_json(&text)?;
    g.validate().map_err(|v| Error::InvalidGraph(v.message))?;
    Ok(g)
}

fn file_params(file: &Path) -> Params {
    Params { file: Some(file.display().to_string()), ..Default::default() }
}

pub fn graph_degree(file: &Path) -> Vec<CheckReport> {
    vec![guarded("graph-degree", file_params(file), |p| {
        let g = load_graph(file)?;
        let deg = g.degree()?;
        let mut r = CheckReport::new("graph-degree", Params { d: Some(g.d), ..p })
            .data(json!({ "degree": deg.value, "jackets": deg.jackets, "components": deg.components }));
        if let Some(n) = deg.notice {
            r = r.note(n);
        }
        Ok(r)
    })]
}

pub fn graph_jackets(file: &Path) -> Vec<CheckReport> {
    vec![guarded("graph-jackets", file_params(file), |p| {
        let g = load_graph(file)?;
        let jackets = g.jackets()?;
        let list: Vec<serde_json::Value> = jackets
            .iter()
            .map(|j| {
                Ok(json!({
                    "cycle": j.cycle,
                    "faces": j.face_count(),
                    "euler_characteristic": j.euler_characteristic(),
                    "genus": j.genus()?,
                }))
            })
            .collect::<Result<_>>()?;
        Ok(CheckReport::new("graph-jackets", Params { d: Some(g.d), ..p }).data(json!({ "jackets": list })))
    })]
}

/// Symbolic moment, compared against the explicit-index sum at sizes `1..=nsize`.
fn moment_report(
    check: &str,
    params: Params,
    nsize: u32,
    moment: impl FnOnce() -> Result<Series>,
    oracle: impl Fn(u32) -> Result<GaussRat>,
) -> CheckReport {
    guarded(check, params, |p| {
        let s = moment()?;
        let mut r = CheckReport::new(check, p).data(json!({ "moment": lines(&s) }));
        for n in 1..=nsize {
            let sym = s.eval_n(n)?.constant_term();
            let exact = oracle(n)?;
            r = r.require(sym == exact, &format!("N = {n}: symbolic {sym} vs explicit {exact}"));
        }
        Ok(r)
    })
}

pub fn moment_matrix(word: &[u32], nsize: u32) -> Vec<CheckReport> {
    let params = Params { word: Some(word.to_vec()), nsize: Some(nsize), ..Default::default() };
    let slots: u32 = word.iter().sum();
    if slots > 16 {
        return vec![CheckReport::error("moment-matrix", params, &Error::Budget(format!("{slots} slots > 16")))];
    }
    let w = TraceWord::new(word.to_vec());
    let w2 = w.clone();
    vec![moment_report("moment-matrix", params, nsize, move || Ok(hermitian_moment(&w)), move |n| hermitian_oracle(&w2, n).map(GaussRat::real))]
}

pub fn moment_tensor(file: &Path, nsize: u32) -> Vec<CheckReport> {
    let params = Params { nsize: Some(nsize), ..file_params(file) };
    let tc = match load_graph(file).and_then(|g| g.to_contraction()) {
        Ok(tc) => tc,
        Err(e) => return vec![CheckReport::error("moment-tensor", params, &e)],
    };
    let tc2 = tc.clone();
    vec![moment_report("moment-tensor", params, nsize, move || Ok(tensor_moment(&tc)), move |n| tensor_oracle(&tc2, n).map(GaussRat::real))]
}
