//! Scenario files: JSON documents describing a curve, a representation, a
//! bundle, and optionally explicit points and tangents. Rationals and
//! rational functions are strings so that every value stays exact.

use std::sync::Arc;

use serde::Deserialize;

use crate::curve::{curve_validate, MarkedCurve};
use crate::error::Error;
use crate::field::{parse_ratfunc, GaussRat, RatFunc};
use crate::hamiltonian::{rep_validate, HamiltonianRep, SymplecticSpace, XVector};
use crate::lie::{CoadjointElement, LoopAlgebraElement, LoopGroupElement, MatrixLieAlgebra};
use crate::linalg::Matrix;
use crate::moduli::{
    higgs_from_y, make_higgs_point, make_higgs_tangent, make_y_point, make_y_tangent, pushforward_tangent, Bundle,
    HiggsPoint, HiggsTangent, YPoint, YTangent,
};
use crate::residue::{OneForm, P1Point};
use crate::solver::random::{random_instance, random_y_tangent, trial_rng, BundleRecipe, GeneratorParams};
use crate::solver::{build_section_space, sample_with, Bounds};

pub const F1: &str = include_str!("../../../fixtures/f1.json");
pub const F2: &str = include_str!("../../../fixtures/f2.json");
pub const F3: &str = include_str!("../../../fixtures/f3.json");

type RawMatrix = Vec<Vec<String>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    name: Option<String>,
    field: String,
    algebra: String,
    representation: RawRep,
    curve: RawCurve,
    #[serde(default)]
    bundle: Option<RawBundle>,
    #[serde(default)]
    section: Option<RawSection>,
    #[serde(default)]
    tangents: Option<Vec<RawYTangent>>,
    #[serde(default)]
    higgs: Option<RawHiggs>,
    #[serde(default)]
    bounds: Bounds,
    #[serde(default)]
    generator: GeneratorParams,
    #[serde(default)]
    form: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRep {
    Named(String),
    Explicit(RawExplicitRep),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExplicitRep {
    name: String,
    omega: RawMatrix,
    rho: Vec<RawMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    marked_points: Vec<String>,
    alpha: String,
    transitions: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    #[serde(default)]
    g: Option<Vec<RawMatrix>>,
    #[serde(default)]
    random: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    #[serde(default)]
    s_circ: Option<Vec<String>>,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawYTangent {
    g_dot: Vec<RawMatrix>,
    s_circ_dot: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHiggs {
    phi_circ: RawMatrix,
    tangents: Vec<RawHiggsTangent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHiggsTangent {
    g_dot: Vec<RawMatrix>,
    phi_circ_dot: RawMatrix,
}

/// Explicit Higgs data: a field `phi°` and tangents `(g_dot, phi°_dot)`.
#[derive(Clone, Debug)]
pub struct HiggsData {
    pub point: HiggsPoint,
    pub tangents: Vec<HiggsTangent>,
}

/// A parsed and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: Option<String>,
    pub curve: MarkedCurve,
    pub rep: HamiltonianRep,
    /// The explicit bundle, when cocycles are given.
    pub bundle: Option<Arc<Bundle>>,
    /// Suites redraw cocycles per trial.
    pub random_bundle: bool,
    pub point: Option<YPoint>,
    pub seed: u64,
    pub tangents: Vec<YTangent>,
    pub higgs: Option<HiggsData>,
    pub bounds: Bounds,
    pub generator: GeneratorParams,
    pub form: Option<OneForm>,
}

/// Attach a scenario path to an error; anything that is not already a parse
/// or validation error becomes a validation error there.
fn located(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse { .. } | Error::Validation { .. } => e.at(path),
        other => Error::validation(path, other.to_string()),
    }
}

fn func(text: &str, var: &str, path: &str) -> Result<RatFunc, Error> {
    parse_ratfunc(text, var).map_err(located(path))
}

fn constant(text: &str, path: &str) -> Result<GaussRat, Error> {
    text.trim().parse::<GaussRat>().map_err(located(path))
}

fn vector(v: &[String], var: &str, path: &str) -> Result<XVector, Error> {
    Ok(XVector(v.iter().enumerate().map(|(k, s)| func(s, var, &format!("{path}[{k}]"))).collect::<Result<_, _>>()?))
}

fn matrix(m: &RawMatrix, var: &str, path: &str) -> Result<Matrix<RatFunc>, Error> {
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, s)| func(s, var, &format!("{path}[{i}][{j}]"))).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Matrix::from_rows(rows).map_err(located(path))
}

fn constant_matrix(m: &RawMatrix, path: &str) -> Result<Matrix<GaussRat>, Error> {
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, s)| constant(s, &format!("{path}[{i}][{j}]"))).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Matrix::from_rows(rows).map_err(located(path))
}

fn square(m: &Matrix<RatFunc>, n: usize, path: &str) -> Result<(), Error> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::validation(path, format!("expected a {n} x {n} matrix, found {} x {}", m.rows(), m.cols())));
    }
    Ok(())
}

fn algebra_elements(
    raw: &[RawMatrix],
    alg: &MatrixLieAlgebra,
    count: usize,
    path: &str,
) -> Result<Vec<LoopAlgebraElement>, Error> {
    if raw.len() != count {
        return Err(Error::validation(path, format!("{} entries for {count} marked points", raw.len())));
    }
    raw.iter()
        .enumerate()
        .map(|(i, m)| {
            let p = format!("{path}[{i}]");
            let m = matrix(m, "u", &p)?;
            square(&m, alg.n(), &p)?;
            LoopAlgebraElement::new(alg, m).map_err(located(&p))
        })
        .collect()
}

fn coadjoint(raw: &RawMatrix, alg: &MatrixLieAlgebra, path: &str) -> Result<CoadjointElement, Error> {
    let m = matrix(raw, "z", path)?;
    square(&m, alg.n(), path)?;
    CoadjointElement::new(alg, m).map_err(located(path))
}

fn representation(raw: &RawRep, alg: &MatrixLieAlgebra) -> Result<HamiltonianRep, Error> {
    let rep = match raw {
        RawRep::Named(name) => HamiltonianRep::by_name(name, alg).ok_or_else(|| {
            Error::validation("representation", format!("unknown representation {name:?} for {}", alg.name()))
        })?,
        RawRep::Explicit(e) => {
            let omega = constant_matrix(&e.omega, "representation.omega")?;
            let space = SymplecticSpace::new(omega).map_err(located("representation.omega"))?;
            let rho = e
                .rho
                .iter()
                .enumerate()
                .map(|(k, m)| constant_matrix(m, &format!("representation.rho[{k}]")))
                .collect::<Result<_, _>>()?;
            HamiltonianRep::explicit(e.name.clone(), alg.clone(), space, rho).map_err(located("representation"))?
        }
    };
    let report = rep_validate(&rep);
    if !report.is_valid() {
        return Err(Error::validation("representation", report.violations.join("; ")));
    }
    Ok(rep)
}

fn curve(raw: &RawCurve) -> Result<MarkedCurve, Error> {
    let points = raw
        .marked_points
        .iter()
        .enumerate()
        .map(|(k, s)| s.parse::<P1Point>().map_err(located(&format!("curve.marked_points[{k}]"))))
        .collect::<Result<Vec<_>, _>>()?;
    let alpha = OneForm::new(func(&raw.alpha, "z", "curve.alpha")?);
    let transitions = raw
        .transitions
        .iter()
        .enumerate()
        .map(|(k, s)| func(s, "u", &format!("curve.transitions[{k}]")))
        .collect::<Result<_, _>>()?;
    let c = MarkedCurve::new(points, alpha, transitions);
    let report = curve_validate(&c);
    if !report.is_valid() {
        return Err(Error::validation("curve", report.violations.join("; ")));
    }
    Ok(c)
}

/// Parses and fully validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, Error> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    if raw.field != "gauss-rational" {
        return Err(Error::validation("field", format!("unsupported field {:?}; only \"gauss-rational\"", raw.field)));
    }
    let alg = MatrixLieAlgebra::by_name(&raw.algebra)
        .ok_or_else(|| Error::validation("algebra", format!("unknown algebra {:?}", raw.algebra)))?;
    let rep = representation(&raw.representation, &alg)?;
    let curve = curve(&raw.curve)?;
    let n = alg.n();

    let (cocycles, random_bundle) = match &raw.bundle {
        None => (None, false),
        Some(b) => {
            let g = match &b.g {
                None => None,
                Some(gs) => {
                    if gs.len() != curve.len() {
                        return Err(Error::validation(
                            "bundle.g",
                            format!("{} cocycles for {} marked points", gs.len(), curve.len()),
                        ));
                    }
                    Some(
                        gs.iter()
                            .enumerate()
                            .map(|(i, m)| {
                                let p = format!("bundle.g[{i}]");
                                let m = matrix(m, "u", &p)?;
                                square(&m, n, &p)?;
                                LoopGroupElement::new(m).map_err(located(&p))
                            })
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
            };
            (g, b.random)
        }
    };
    let bundle = match cocycles {
        Some(g) => Some(Bundle::new(curve.clone(), rep.clone(), g).map_err(located("bundle"))?),
        None => None,
    };
    if bundle.is_none() && !random_bundle {
        return Err(Error::validation("bundle", "give explicit cocycles \"g\" or set \"random\": true"));
    }

    let seed = raw.section.as_ref().map_or(0, |s| s.seed);
    let explicit_s = raw.section.as_ref().and_then(|s| s.s_circ.as_ref());
    let point = match (&bundle, explicit_s) {
        (Some(b), Some(s)) => {
            let v = vector(s, "z", "section.s_circ")?;
            Some(make_y_point(b, v).map_err(located("section.s_circ"))?)
        }
        (None, Some(_)) => return Err(Error::validation("section.s_circ", "an explicit section needs explicit cocycles")),
        _ => None,
    };
    let tangents = match (&raw.tangents, &point) {
        (None, _) => Vec::new(),
        (Some(ts), Some(p)) => ts
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let path = format!("tangents[{k}]");
                let g_dot = algebra_elements(&t.g_dot, &alg, curve.len(), &format!("{path}.g_dot"))?;
                let s_dot = vector(&t.s_circ_dot, "z", &format!("{path}.s_circ_dot"))?;
                make_y_tangent(p, g_dot, s_dot).map_err(located(&path))
            })
            .collect::<Result<_, _>>()?,
        (Some(_), None) => return Err(Error::validation("tangents", "explicit tangents need an explicit section")),
    };
    let higgs = match (&raw.higgs, &bundle) {
        (None, _) => None,
        (Some(_), None) => return Err(Error::validation("higgs", "explicit Higgs data needs explicit cocycles")),
        (Some(h), Some(b)) => {
            let phi = coadjoint(&h.phi_circ, &alg, "higgs.phi_circ")?;
            let point = make_higgs_point(b, phi).map_err(located("higgs.phi_circ"))?;
            let tangents = h
                .tangents
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let path = format!("higgs.tangents[{k}]");
                    let g_dot = algebra_elements(&t.g_dot, &alg, curve.len(), &format!("{path}.g_dot"))?;
                    let phi_dot = coadjoint(&t.phi_circ_dot, &alg, &format!("{path}.phi_circ_dot"))?;
                    make_higgs_tangent(&point, g_dot, phi_dot).map_err(located(&path))
                })
                .collect::<Result<_, _>>()?;
            Some(HiggsData { point, tangents })
        }
    };
    let form = raw.form.as_deref().map(|f| func(f, "z", "form").map(OneForm::new)).transpose()?;

    Ok(Scenario {
        name: raw.name,
        curve,
        rep,
        bundle,
        random_bundle,
        point,
        seed,
        tangents,
        higgs,
        bounds: raw.bounds,
        generator: raw.generator,
        form,
    })
}

impl Scenario {
    /// One of the bundled fixtures `f1`, `f2`, `f3`.
    pub fn fixture(name: &str) -> Result<Scenario, Error> {
        let text = match name {
            "f1" => F1,
            "f2" => F2,
            "f3" => F3,
            other => return Err(Error::Io(format!("no bundled fixture named {other:?}"))),
        };
        parse_scenario(text)
    }

    pub fn recipe(&self) -> BundleRecipe {
        match (&self.bundle, self.random_bundle) {
            (Some(b), false) => BundleRecipe::Explicit(b.cocycles().to_vec()),
            _ => BundleRecipe::Random,
        }
    }

    /// The point and two tangents used by single-instance commands: explicit
    /// data where given, otherwise sampled with the scenario seed.
    pub fn y_instance(&self) -> Result<(YPoint, YTangent, YTangent), Error> {
        let Some(bundle) = &self.bundle else {
            let inst =
                random_instance(&self.curve, &self.rep, &BundleRecipe::Random, &self.generator, self.bounds, self.seed, 0)?;
            return Ok((inst.point, inst.t1, inst.t2));
        };
        let mut rng = trial_rng(self.seed, 0);
        let point = match &self.point {
            Some(p) => p.clone(),
            None => {
                let space = build_section_space(bundle, self.bounds)?;
                make_y_point(bundle, sample_with(&space.basis, &mut rng)?)?
            }
        };
        let mut ts = self.tangents.clone();
        while ts.len() < 2 {
            ts.push(random_y_tangent(&point, &self.generator, self.bounds, &mut rng)?);
        }
        Ok((point, ts[0].clone(), ts[1].clone()))
    }

    /// Higgs point and two tangents: the explicit Higgs block when present,
    /// otherwise the moment-map image of [`Scenario::y_instance`].
    pub fn higgs_instance(&self) -> Result<(HiggsPoint, HiggsTangent, HiggsTangent), Error> {
        if let Some(h) = &self.higgs {
            let zero = HiggsTangent::zero(&h.point);
            let t1 = h.tangents.first().cloned().unwrap_or_else(|| zero.clone());
            let t2 = h.tangents.get(1).cloned().unwrap_or(zero);
            return Ok((h.point.clone(), t1, t2));
        }
        let (p, t1, t2) = self.y_instance()?;
        Ok((higgs_from_y(&p)?, pushforward_tangent(&p, &t1)?, pushforward_tangent(&p, &t2)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        for name in ["f1", "f2", "f3"] {
            let s = Scenario::fixture(name).unwrap();
            assert!(s.bundle.is_some(), "{name}");
        }
    }

    #[test]
    fn alpha_with_a_zero() {
        let text = F1.replace("\"alpha\": \"-1\"", "\"alpha\": \"z\"");
        match parse_scenario(&text) {
            Err(Error::Validation { location, message }) => {
                assert_eq!(location, "curve");
                assert!(message.contains("vanishes at 0"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_rational() {
        let text = F1.replace("\"alpha\": \"-1\"", "\"alpha\": \"3//4\"");
        match parse_scenario(&text) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "curve.alpha, column 3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_syntax_error_has_line_and_column() {
        match parse_scenario("{\n  \"field\": ,\n}") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 2, column"), "{location}"),
            other => panic!("{other:?}"),
        }
    }
}
