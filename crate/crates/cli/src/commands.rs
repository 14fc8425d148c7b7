use std::collections::BTreeMap;

use mpqg_core::parse::{parse_coefficient, parse_expr, parse_rational};
use mpqg_core::qmatrix::{build_matrix_algebra, coproduct_check, gauss_residual_n2, minor, IndexSet};
use mpqg_core::rep::verify::{
    classical_spot_check, compare_report, intertwining, serre_residuals, verify_relations, well_definedness,
};
use mpqg_core::rep::{BasisVector, Closed3, Engine, GeneratorAction, ModuleElement, Operator};
use mpqg_core::yflag::{build_flag_algebra, relation_residuals, rules_json};
use mpqg_core::{
    confluence_check, specialize, Coefficient, NCPoly, ParamSymbol, PresetAlgebra, Report, Substitution,
};
use num::BigRational;
use serde_json::{json, Value};

use crate::args::{self, CoeffCmd, ConfluenceArgs, Eval, QmatrixCmd, RepCmd, Top, YflagCmd};
use crate::Outcome;

type Res<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn dispatch(top: &Top) -> Res<Outcome> {
    match top {
        Top::Coeff(c) => coeff(c),
        Top::Qmatrix(c) => qmatrix(c),
        Top::Yflag(c) => yflag(c),
        Top::Rep(c) => rep(c),
    }
}

/// Numeric values from `--params`.
struct Values {
    params: BTreeMap<ParamSymbol, BigRational>,
    labels: BTreeMap<u32, BigRational>,
}

fn parse_values(src: &str) -> Res<Values> {
    let mut v = Values { params: BTreeMap::new(), labels: BTreeMap::new() };
    for item in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item.split_once('=').ok_or_else(|| format!("expected name=value, got `{item}`"))?;
        let (name, value) = (name.trim(), parse_rational(value.trim()).map_err(err)?);
        if let Some(idx) = name.strip_prefix('r').and_then(|d| d.parse::<u32>().ok()) {
            v.labels.insert(idx, value);
        } else {
            let s = ParamSymbol::parse_name(name).ok_or_else(|| format!("unknown parameter `{name}`"))?;
            v.params.insert(s, value);
        }
    }
    Ok(v)
}

/// Applies `--one-param` and `--params` to every coefficient of a result.
struct Post {
    sub: Substitution,
    values: Option<Values>,
}

impl Post {
    fn new(eval: &Eval, n: u32) -> Res<Self> {
        let sub = if eval.one_param { Substitution::one_param(n) } else { Substitution::new() };
        let values = eval.params.as_deref().map(parse_values).transpose()?;
        Ok(Post { sub, values })
    }

    fn coeff(&self, c: &Coefficient) -> Coefficient {
        c.substitute(&self.sub)
    }

    fn value(&self, c: &Coefficient) -> Res<Option<String>> {
        match &self.values {
            None => Ok(None),
            Some(v) => specialize(c, &v.params, &v.labels).map(|x| Some(x.to_string())).map_err(err),
        }
    }

    fn poly(&self, p: &NCPoly) -> Res<(Value, Vec<String>)> {
        let p = p.map_coeffs(|c| self.coeff(c));
        let mut out = json!({ "terms": p.to_json(), "text": p.to_string() });
        let mut text = vec![p.to_string()];
        if self.values.is_some() {
            let mut values = Vec::new();
            for (w, c) in p.terms() {
                let x = self.value(c)?.expect("values present");
                text.push(format!("  {w}: {x}"));
                values.push(json!({ "word": w.to_string(), "value": x }));
            }
            out["values"] = Value::Array(values);
        }
        Ok((out, text))
    }

    fn element(&self, e: &ModuleElement) -> Res<(Value, Vec<String>)> {
        let e = e.map_coeffs(|c| self.coeff(c));
        let mut out = json!({ "terms": e.to_json(), "text": e.to_string() });
        let mut text = vec![e.to_string()];
        if self.values.is_some() {
            let mut values = Vec::new();
            for (v, c) in e.basis_vectors() {
                let x = self.value(c)?.expect("values present");
                text.push(format!("  {v}: {x}"));
                values.push(json!({ "vector": v.to_string(), "value": x }));
            }
            out["values"] = Value::Array(values);
        }
        Ok((out, text))
    }
}

fn coeff(cmd: &CoeffCmd) -> Res<Outcome> {
    let CoeffCmd::Normalize { expr, eval } = cmd;
    let c = parse_coefficient(expr).map_err(err)?;
    let post = Post::new(eval, COEFF_RANK)?;
    let c = post.coeff(&c);
    let mut result = json!({ "coef": c.to_json(), "text": c.to_string() });
    let mut text = vec![c.to_string()];
    if let Some(x) = post.value(&c)? {
        text.push(format!("value: {x}"));
        result["value"] = json!(x);
    }
    Ok(Outcome::result(result, text))
}

/// `--one-param` on a bare coefficient covers every `q_ij` up to this rank.
const COEFF_RANK: u32 = 12;

fn rules_outcome(alg: &PresetAlgebra, post: &Post) -> Res<Outcome> {
    let rules = alg.rules();
    let mut text = Vec::new();
    for r in &rules {
        let rhs = r.rhs.map_coeffs(|c| post.coeff(c));
        text.push(format!("{} -> {rhs}", r.lhs_word()));
    }
    let alg = alg.substituted(&post.sub, alg.name()).map_err(err)?;
    Ok(Outcome::result(json!({ "algebra": alg.name(), "count": rules.len(), "rules": rules_json(&alg) }), text))
}

fn confluence(alg: &PresetAlgebra, a: &ConfluenceArgs, n: u32) -> Res<Outcome> {
    if a.len == 0 {
        return Err("--len must be positive".into());
    }
    let alg = if a.one_param {
        alg.substituted(&Substitution::one_param(n), format!("{},one-param", alg.name())).map_err(err)?
    } else {
        alg.clone()
    };
    let r = confluence_check(&alg, a.len, a.trials, a.seed);
    let mut report = Report::new();
    let status = mpqg_core::Status::from_bool(r.passed());
    report.push(mpqg_core::Check::new(format!("confluence {}", alg.name()), status, r.to_json()));
    Ok(Outcome::report(report))
}

fn index_list(s: &str) -> Res<Vec<u32>> {
    s.split(',').map(|x| x.trim().parse::<u32>().map_err(|_| format!("bad index `{x}`"))).collect()
}

fn qmatrix(cmd: &QmatrixCmd) -> Res<Outcome> {
    match cmd {
        QmatrixCmd::Rules { n, eval } => {
            let m = build_matrix_algebra(*n).map_err(err)?;
            rules_outcome(&m.alg, &Post::new(eval, *n)?)
        }
        QmatrixCmd::Minor { n, rows, cols, eval } => {
            let (r, c) = (index_list(rows)?, index_list(cols)?);
            let n = if *n == 0 { r.iter().chain(&c).copied().max().unwrap_or(1).max(2) } else { *n };
            let m = build_matrix_algebra(n).map_err(err)?;
            let rs = IndexSet::new(r).map_err(err)?;
            let cs = IndexSet::new(c).map_err(err)?;
            let p = minor(&rs, &cs, &m).map_err(err)?;
            let post = Post::new(eval, n)?;
            let (written, mut text) = post.poly(&p)?;
            let (nf, nf_text) = post.poly(&m.alg.normal_form(&p).map_err(err)?)?;
            text.push(format!("normal form: {}", nf_text.join("\n")));
            Ok(Outcome::result(json!({ "minor": written, "normal_form": nf, "rows": rows, "cols": cols, "n": n }), text))
        }
        QmatrixCmd::Nf { n, expr, eval } => {
            let m = build_matrix_algebra(*n).map_err(err)?;
            let p = parse_expr(expr, &m.alg).map_err(err)?;
            let nf = m.alg.normal_form(&p).map_err(err)?;
            let (out, text) = Post::new(eval, *n)?.poly(&nf)?;
            Ok(Outcome::result(json!({ "input": expr, "normal_form": out }), text))
        }
        QmatrixCmd::CheckCoproduct { n } => Ok(Outcome::report(coproduct_check(*n).map_err(err)?)),
        QmatrixCmd::Gauss2 => Ok(Outcome::report(gauss_residual_n2().map_err(err)?)),
        QmatrixCmd::Confluence(a) => {
            if a.split {
                return Err("--split applies to flag algebras only".into());
            }
            let m = build_matrix_algebra(a.n).map_err(err)?;
            confluence(&m.alg, a, a.n)
        }
    }
}

fn yflag(cmd: &YflagCmd) -> Res<Outcome> {
    match cmd {
        YflagCmd::Rules { n, split, eval } => {
            let f = build_flag_algebra(*n, *split).map_err(err)?;
            rules_outcome(&f.alg, &Post::new(eval, *n)?)
        }
        YflagCmd::Nf { n, split, expr, eval } => {
            let f = build_flag_algebra(*n, *split).map_err(err)?;
            let p = parse_expr(expr, &f.alg).map_err(err)?;
            let p = p.map_coeffs(|c| c.substitute(&f.substitution()));
            let nf = f.normal_form(&p).map_err(err)?;
            let (out, text) = Post::new(eval, *n)?.poly(&nf)?;
            Ok(Outcome::result(json!({ "input": expr, "normal_form": out }), text))
        }
        YflagCmd::Relations { n, split } => {
            let f = build_flag_algebra(*n, *split).map_err(err)?;
            Ok(Outcome::report(relation_residuals(&f)))
        }
        YflagCmd::Confluence(a) => {
            let f = build_flag_algebra(a.n, a.split).map_err(err)?;
            confluence(&f.alg, a, a.n)
        }
    }
}

fn operator(e: &args::Engine) -> Res<Box<dyn Operator>> {
    if e.closed3 {
        if e.n != 3 {
            return Err(format!("--closed3 needs --n 3, got {}", e.n));
        }
        Ok(Box::new(Closed3::new(e.split)))
    } else {
        Ok(Box::new(Engine::new(e.n, e.split).map_err(err)?))
    }
}

/// `j=1,n=0,l=2` at rank 3, or a comma list of exponents.
fn parse_vector(src: &str, n: u32) -> Res<BasisVector> {
    let items: Vec<&str> = src.split(',').map(str::trim).collect();
    let exps = if items.iter().any(|s| s.contains('=')) {
        if n != 3 {
            return Err("named exponents j, n, l are only defined at rank 3".into());
        }
        let mut e = [None; 3];
        for item in &items {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected name=value, got `{item}`"))?;
            let slot = match k.trim() {
                "j" => 0,
                "n" => 1,
                "l" => 2,
                other => return Err(format!("unknown exponent `{other}`, expected j, n or l")),
            };
            e[slot] = Some(v.trim().parse::<u32>().map_err(|_| format!("bad exponent `{v}`"))?);
        }
        e.iter().map(|x| x.unwrap_or(0)).collect()
    } else {
        items.iter().map(|v| v.parse::<u32>().map_err(|_| format!("bad exponent `{v}`"))).collect::<Res<Vec<_>>>()?
    };
    BasisVector::symbolic(n, exps).map_err(err)
}

fn rep(cmd: &RepCmd) -> Res<Outcome> {
    match cmd {
        RepCmd::Act { engine, gen, vec, eval } => {
            let op = operator(engine)?;
            let g: GeneratorAction = gen.parse().map_err(err)?;
            g.check(engine.n).map_err(err)?;
            let v = parse_vector(vec, engine.n)?;
            let e = op.act_basis(g, &v).map_err(err)?;
            let (out, text) = Post::new(eval, engine.n)?.element(&e)?;
            Ok(Outcome::result(
                json!({ "operator": op.name(), "generator": g.to_string(), "vector": v.to_string(), "image": out }),
                text,
            ))
        }
        RepCmd::Verify { engine, degree } => {
            let op = operator(engine)?;
            let mut report = verify_relations(op.as_ref(), *degree).map_err(err)?;
            report.extend(serre_residuals(op.as_ref(), *degree).map_err(err)?);
            Ok(Outcome::report(report))
        }
        RepCmd::Welldef { n, split, degree, families } => {
            let engine = Engine::new(*n, *split).map_err(err)?;
            let fam: Option<Vec<char>> = families.as_ref().map(|s| {
                s.split(',').filter_map(|x| x.trim().chars().next()).collect()
            });
            let report = well_definedness(&engine, *degree, fam.as_deref()).map_err(err)?;
            Ok(Outcome::report(report))
        }
        RepCmd::Compare { n, degree } => {
            if *n != 3 {
                return Err(format!("compare needs --n 3, got {n}"));
            }
            let engine = Engine::new(3, true).map_err(err)?;
            Ok(Outcome::report(compare_report(&engine, &Closed3::new(true), *degree).map_err(err)?))
        }
        RepCmd::Serre { engine, degree } => {
            let op = operator(engine)?;
            Ok(Outcome::report(serre_residuals(op.as_ref(), *degree).map_err(err)?))
        }
        RepCmd::Intertwine { engine, degree } => {
            let op = operator(engine)?;
            Ok(Outcome::report(intertwining(op.as_ref(), *degree).map_err(err)?))
        }
        RepCmd::Classical { engine, degree, count, seed } => {
            let op = operator(engine)?;
            Ok(Outcome::report(classical_spot_check(op.as_ref(), *degree, *count, *seed).map_err(err)?))
        }
    }
}
