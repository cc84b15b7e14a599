use std::collections::BTreeMap;

use cayley_core::bounds::{
    cor11_cor12_bounds, cor9, hoeffding_tail, lemma10_bound, lemma6_bound_ln, prop16_bound,
    prop16_composed_exponent, prop8_bound, theorem_thresholds, Theorem,
};
use serde_json::{json, Value};

use crate::Failure;

struct Params(BTreeMap<String, f64>);

impl Params {
    fn parse(raw: &[String]) -> Result<Self, Failure> {
        let mut map = BTreeMap::new();
        for kv in raw {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("expected key=val, got {kv:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{k}: not a number: {v:?}")))?;
            map.insert(k.trim().to_string(), v);
        }
        Ok(Params(map))
    }

    fn get(&self, key: &str) -> Result<f64, Failure> {
        self.0
            .get(key)
            .copied()
            .ok_or_else(|| Failure::Usage(format!("missing parameter {key}")))
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    /// `logN` directly, or `ln N` from `N`.
    fn log_n(&self) -> Result<f64, Failure> {
        match (self.0.get("logN"), self.0.get("N")) {
            (Some(&l), _) => Ok(l),
            (None, Some(&n)) => Ok(n.ln()),
            (None, None) => Err(Failure::Usage("missing parameter logN (or N)".into())),
        }
    }

    fn count(&self, key: &str) -> Result<u64, Failure> {
        let v = self.get(key)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Failure::Usage(format!("{key} must be a non-negative integer, got {v}")));
        }
        Ok(v as u64)
    }
}

pub fn evaluate(name: &str, raw: &[String]) -> Result<Value, Failure> {
    let p = Params::parse(raw)?;
    let result = match name {
        "hoeffding" => json!({ "bound": hoeffding_tail(p.get("lambda")?, p.count("count")?)? }),
        "lemma10" => json!(lemma10_bound(p.get("eps")?, p.count("k")?, p.count("n")?)?),
        "cor11" | "cor12" => json!(cor11_cor12_bounds(p.log_n()?, p.get("eps")?, p.count("n")?, p.count("k")?)?),
        "prop8" => json!(prop8_bound(p.log_n()?, p.get("eps")?, p.get("r")?, p.get("k")?, p.get_or("c", 1.0))?),
        "cor9" => json!(cor9(p.log_n()?, p.get("w")?, p.get("eps")?, p.get_or("c", 1.0))?),
        "prop16" => {
            let (eps, m, k) = (p.get("eps")?, p.get("m")?, p.get("K")?);
            let mut v = json!({ "bound": prop16_bound(eps, m, k)? });
            if let Ok(n) = p.get("n") {
                v["composed_exponent"] = json!(prop16_composed_exponent(eps, m, k, n));
            }
            v
        }
        "lemma6" => json!(lemma6_bound_ln(p.log_n()?, p.get("n")?, p.get("d")?)),
        "thm1" | "thm2" | "thm7" => {
            let which: Theorem = name.parse()?;
            json!(theorem_thresholds(which, p.log_n()?, p.get("w")?)?)
        }
        other => return Err(Failure::Usage(format!("unknown bound {other:?}"))),
    };
    Ok(json!({ "name": name, "params": p.0, "result": result }))
}
