//! JSON and LaTeX emitters, and the matching parsers for round trips.
//!
//! Exact rationals are serialized as strings ("-3/4") so that round trips
//! lose nothing.

use crate::algebra::{Involution, SparseVec, StructAlgebra};
use crate::diffcoeff::{FieldSymbol, NCPoly, Word};
use crate::error::{Error, Result};
use crate::hierarchy::FlowSystem;
use crate::psido::PsiDO;
use crate::reductions::ResidualReport;
use crate::scalar::{parse_rational, Scalar};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

pub fn scalar_to_json(s: &Scalar) -> Value {
    json!([s.re.to_string(), s.im.to_string()])
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("expected [re, im], got {}", v)))?;
    let part = |x: &Value| -> Result<_> {
        x.as_str()
            .and_then(parse_rational)
            .ok_or_else(|| Error::Parse(format!("bad rational {}", x)))
    };
    Ok(Scalar {
        re: part(&arr[0])?,
        im: part(&arr[1])?,
    })
}

pub fn ncpoly_to_json(p: &NCPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(w, c)| {
            let word: Vec<Value> = w.iter().map(|s| json!(s.render())).collect();
            json!([word, scalar_to_json(c)])
        })
        .collect();
    Value::Array(terms)
}

pub fn ncpoly_from_json(v: &Value) -> Result<NCPoly> {
    let terms = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of terms".into()))?;
    let mut p = NCPoly::zero();
    for t in terms {
        let pair = t
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse(format!("expected [word, coeff], got {}", t)))?;
        let word_json = pair[0]
            .as_array()
            .ok_or_else(|| Error::Parse("word must be a list of symbols".into()))?;
        let mut word: Word = Vec::with_capacity(word_json.len());
        for s in word_json {
            let text = s
                .as_str()
                .ok_or_else(|| Error::Parse(format!("symbol must be a string: {}", s)))?;
            word.push(
                FieldSymbol::parse(text)
                    .ok_or_else(|| Error::Parse(format!("bad symbol {}", text)))?,
            );
        }
        p = p.add(&NCPoly::from_word(word, scalar_from_json(&pair[1])?));
    }
    Ok(p)
}

pub fn psido_to_json(p: &PsiDO<NCPoly>, backend: &str) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| json!([e, ncpoly_to_json(c)]))
        .collect();
    json!({
        "depth": p.depth(),
        "backend": backend,
        "terms": terms,
    })
}

pub fn psido_from_json(v: &Value) -> Result<PsiDO<NCPoly>> {
    let depth = v["depth"]
        .as_i64()
        .ok_or_else(|| Error::Parse("missing depth".into()))?;
    let mut p = PsiDO::new(depth);
    let terms = v["terms"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing terms".into()))?;
    for t in terms {
        let pair = t
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse(format!("expected [e, coeff], got {}", t)))?;
        let e = pair[0]
            .as_i64()
            .ok_or_else(|| Error::Parse("exponent must be an integer".into()))?;
        p.insert(e, ncpoly_from_json(&pair[1])?);
    }
    Ok(p)
}

pub fn flow_system_to_json(f: &FlowSystem) -> Value {
    let mut equations = Map::new();
    for (k, p) in &f.equations {
        equations.insert(k.to_string(), ncpoly_to_json(p));
    }
    let mut tail = Map::new();
    for (k, p) in &f.tail {
        tail.insert(k.to_string(), ncpoly_to_json(p));
    }
    json!({
        "n": f.n,
        "K": f.k_max,
        "depth": f.depth,
        "equations": Value::Object(equations),
        "tail": Value::Object(tail),
    })
}

pub fn flow_system_from_json(v: &Value) -> Result<FlowSystem> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| Error::Parse("missing n".into()))? as u32;
    let k_max = v["K"]
        .as_u64()
        .ok_or_else(|| Error::Parse("missing K".into()))? as u32;
    let depth = v["depth"]
        .as_i64()
        .ok_or_else(|| Error::Parse("missing depth".into()))?;
    let read_map = |val: &Value| -> Result<BTreeMap<u32, NCPoly>> {
        let mut out = BTreeMap::new();
        if let Some(obj) = val.as_object() {
            for (k, p) in obj {
                let key: u32 = k
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient index {}", k)))?;
                out.insert(key, ncpoly_from_json(p)?);
            }
        }
        Ok(out)
    };
    Ok(FlowSystem {
        n,
        k_max,
        depth,
        equations: read_map(&v["equations"])?,
        tail: read_map(&v["tail"])?,
    })
}

pub fn residual_report_to_json(r: &ResidualReport) -> Value {
    json!({
        "kind": r.kind.to_string(),
        "n": r.n,
        "depth": r.depth,
        "vanishes": r.vanishes,
        "residual": psido_to_json(&r.residual, "free"),
        "note": r.note,
    })
}

// ---- explicit algebra tables ----

fn sparse_to_json(v: &SparseVec) -> Value {
    Value::Array(
        v.iter()
            .map(|(k, c)| json!([k, c.re.to_string(), c.im.to_string()]))
            .collect(),
    )
}

fn sparse_from_json(v: &Value) -> Result<SparseVec> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected sparse vector".into()))?;
    let mut out = SparseVec::new();
    for e in arr {
        let t = e
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::Parse(format!("expected [k, re, im], got {}", e)))?;
        let k = t[0]
            .as_u64()
            .ok_or_else(|| Error::Parse("basis index must be an integer".into()))?
            as usize;
        let re = t[1]
            .as_str()
            .and_then(parse_rational)
            .ok_or_else(|| Error::Parse(format!("bad rational {}", t[1])))?;
        let im = t[2]
            .as_str()
            .and_then(parse_rational)
            .ok_or_else(|| Error::Parse(format!("bad rational {}", t[2])))?;
        out.push((k, Scalar { re, im }));
    }
    Ok(out)
}

pub fn algebra_to_json(alg: &StructAlgebra) -> Value {
    let mut constants = Vec::new();
    for i in 0..alg.dim {
        for j in 0..alg.dim {
            constants.push(json!([i, j, sparse_to_json(&alg.table[i][j])]));
        }
    }
    let involution = alg.involution.as_ref().map(|inv| {
        json!({
            "conjugate_scalars": inv.conjugate_scalars,
            "images": inv.images.iter().map(sparse_to_json).collect::<Vec<_>>(),
        })
    });
    json!({
        "name": alg.name,
        "dim": alg.dim,
        "labels": alg.labels,
        "unit": alg.unit.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "constants": constants,
        "involution": involution,
        "associative": alg.associative,
        "alternative": alg.alternative,
    })
}

pub fn algebra_from_json(v: &Value) -> Result<StructAlgebra> {
    let dim = v["dim"]
        .as_u64()
        .ok_or_else(|| Error::Parse("missing dim".into()))? as usize;
    let labels: Vec<String> = match v["labels"].as_array() {
        Some(arr) => arr
            .iter()
            .map(|l| l.as_str().map(str::to_string))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse("labels must be strings".into()))?,
        None => (0..dim).map(|i| format!("e{}", i)).collect(),
    };
    if labels.len() != dim {
        return Err(Error::Parse("label count does not match dim".into()));
    }
    let unit: Vec<Scalar> = v["unit"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing unit".into()))?
        .iter()
        .map(scalar_from_json)
        .collect::<Result<_>>()?;
    if unit.len() != dim {
        return Err(Error::Parse("unit vector length does not match dim".into()));
    }
    let mut table = vec![vec![SparseVec::new(); dim]; dim];
    let constants = v["constants"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing constants".into()))?;
    for c in constants {
        let t = c
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::Parse(format!("expected [i, j, products], got {}", c)))?;
        let i = t[0].as_u64().ok_or_else(|| Error::Parse("bad i".into()))? as usize;
        let j = t[1].as_u64().ok_or_else(|| Error::Parse("bad j".into()))? as usize;
        if i >= dim || j >= dim {
            return Err(Error::Parse(format!("index ({}, {}) out of range", i, j)));
        }
        table[i][j] = sparse_from_json(&t[2])?;
    }
    let involution = match &v["involution"] {
        Value::Null => None,
        inv => {
            let images = inv["images"]
                .as_array()
                .ok_or_else(|| Error::Parse("involution needs images".into()))?
                .iter()
                .map(sparse_from_json)
                .collect::<Result<Vec<_>>>()?;
            if images.len() != dim {
                return Err(Error::Parse("involution image count mismatch".into()));
            }
            Some(Involution {
                images,
                conjugate_scalars: inv["conjugate_scalars"].as_bool().unwrap_or(true),
            })
        }
    };
    let name = v["name"].as_str().unwrap_or("custom").to_string();
    let alg = StructAlgebra {
        name,
        dim,
        labels,
        table,
        unit,
        involution,
        associative: v["associative"].as_bool().unwrap_or(true),
        alternative: v["alternative"].as_bool().unwrap_or(true),
    };
    alg.verify_unit()?;
    if alg.involution.is_some() {
        alg.verify_involution()?;
    }
    Ok(alg)
}

// ---- LaTeX ----

fn symbol_to_latex(s: &FieldSymbol) -> String {
    let core = format!("U_{{{}}}", s.field);
    let body = match s.order {
        0 => core,
        1 => format!("D({})", core),
        m => format!("D^{{{}}}({})", m, core),
    };
    if s.dagger {
        format!("{}^{{\\dagger}}", body)
    } else {
        body
    }
}

pub fn scalar_to_latex(c: &Scalar) -> String {
    let fmt_rat = |r: &num::BigRational| -> String {
        if r.is_integer() {
            r.to_string()
        } else {
            format!("\\tfrac{{{}}}{{{}}}", r.numer(), r.denom())
        }
    };
    if c.im.to_string() == "0" {
        fmt_rat(&c.re)
    } else if c.re.to_string() == "0" {
        format!("{} i", fmt_rat(&c.im))
    } else {
        format!("\\left({} + {} i\\right)", fmt_rat(&c.re), fmt_rat(&c.im))
    }
}

pub fn ncpoly_to_latex(p: &NCPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (w, c) in p.terms() {
        let word = w
            .iter()
            .map(symbol_to_latex)
            .collect::<Vec<_>>()
            .join(" \\, ");
        let coeff = scalar_to_latex(c);
        let piece = if w.is_empty() {
            coeff
        } else if coeff == "1" {
            word
        } else if coeff == "-1" {
            format!("-{}", word)
        } else {
            format!("{} \\, {}", coeff, word)
        };
        parts.push(piece);
    }
    parts.join(" + ").replace("+ -", "- ")
}

pub fn psido_to_latex(p: &PsiDO<NCPoly>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (e, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
        let dpow = match *e {
            0 => String::new(),
            1 => "D".to_string(),
            k => format!("D^{{{}}}", k),
        };
        let coeff = ncpoly_to_latex(c);
        let piece = if dpow.is_empty() {
            coeff
        } else if coeff == "1" {
            dpow
        } else if c.num_terms() > 1 {
            format!("\\left({}\\right) {}", coeff, dpow)
        } else {
            format!("{} {}", coeff, dpow)
        };
        parts.push(piece);
    }
    parts.join(" + ").replace("+ -", "- ")
}

pub fn flow_system_to_latex(f: &FlowSystem) -> String {
    let mut lines = Vec::new();
    for (k, p) in &f.equations {
        lines.push(format!(
            "\\partial_{{t_{{{}}}}} U_{{{}}} = {}",
            f.n,
            k,
            ncpoly_to_latex(p)
        ));
    }
    lines.join(" \\\\\n")
}
