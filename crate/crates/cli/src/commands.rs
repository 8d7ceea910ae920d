use std::path::Path;

use iwasawa_core::fitting::{FPModule, IdealLattice};
use iwasawa_core::group_ring::{GroupRingElement, RingShape};
use iwasawa_core::mazur_tate::{self, Conventions};
use iwasawa_core::modsym::{load_or_compute, resolve_cache_dir, CurveData, PlusEigenSymbol};
use iwasawa_core::parallel::{map_indexed, Execution};
use iwasawa_core::verify::{run_verify, VerifyConfig};
use iwasawa_core::Error;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{CurveArgs, Failure, LayerArgs, Outcome, OutputArgs};

fn tool() -> Value {
    json!({ "name": "iwasawa", "version": env!("CARGO_PKG_VERSION") })
}

fn ok(report: Value) -> Result<Outcome, Failure> {
    Ok(Outcome { report, ok: true })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    serde_json::from_str(&text).map_err(|e| Failure::Core(Error::Json(e)))
}

/// A built-in label, otherwise a curve file.
fn load_curve(arg: &str) -> Result<CurveData, Failure> {
    if let Some(c) = CurveData::named(arg) {
        return Ok(c);
    }
    let curve: CurveData = read_json(Path::new(arg))?;
    curve.validate()?;
    Ok(curve)
}

fn load_symbol(out: &OutputArgs, curve: &CurveData) -> Result<PlusEigenSymbol, Failure> {
    let dir = resolve_cache_dir(out.cache_dir.as_deref());
    Ok(load_or_compute(Some(&dir), curve)?)
}

fn header(command: &str, curve: &CurveData, a: &LayerArgs, a_p: i64) -> Value {
    json!({
        "tool": tool(),
        "command": command,
        "curve": curve,
        "p": a.curve.p,
        "n": a.n,
        "k": a.k,
        "a_p": a_p,
        "conventions": Conventions::default(),
    })
}

struct Layer {
    curve: CurveData,
    symbol: PlusEigenSymbol,
    a_p: i64,
}

fn layer_setup(out: &OutputArgs, a: &LayerArgs) -> Result<Layer, Failure> {
    let curve = load_curve(&a.curve.curve)?;
    // Validates p and k before the (possibly slow) symbol computation.
    RingShape::modular(a.curve.p, a.n, a.k)?;
    if curve.conductor % a.curve.p == 0 {
        return Err(Error::BadPrime {
            p: a.curve.p,
            conductor: curve.conductor,
        }
        .into());
    }
    let a_p = curve.ap(a.curve.p)?;
    let symbol = load_symbol(out, &curve)?;
    Ok(Layer { curve, symbol, a_p })
}

pub fn ap(curve: &str, p: Option<u64>, bound: Option<u64>) -> Result<Outcome, Failure> {
    let curve = load_curve(curve)?;
    let primes = match (p, bound) {
        (Some(p), _) => vec![p],
        (None, Some(b)) => curve.good_primes(b),
        (None, None) => return Err(Failure::Usage("ap needs --p or --bound".into())),
    };
    let traces = primes
        .iter()
        .map(|&l| Ok(json!({ "ell": l, "a_ell": curve.ap(l)? })))
        .collect::<Result<Vec<_>, Error>>()?;
    ok(json!({ "tool": tool(), "command": "ap", "curve": curve, "traces": traces }))
}

pub fn theta(out: &OutputArgs, a: &LayerArgs) -> Result<Outcome, Failure> {
    let l = layer_setup(out, a)?;
    let t = mazur_tate::theta(&l.symbol, a.curve.p, a.n)?;
    let group: Vec<String> = t
        .element
        .group_coeffs_exact()?
        .iter()
        .map(|c| c.to_string())
        .collect();
    let mut report = header("theta", &l.curve, a, l.a_p);
    report["theta"] = serde_json::to_value(&t.element).map_err(Error::Json)?;
    report["group_coeffs"] = json!(group);
    report["reduced"] = serde_json::to_value(t.reduce(a.k)?).map_err(Error::Json)?;
    ok(report)
}

pub fn stabilize(out: &OutputArgs, a: &LayerArgs) -> Result<Outcome, Failure> {
    let l = layer_setup(out, a)?;
    let r = mazur_tate::principality_check(&l.symbol, a.curve.p, a.n, a.k)?;
    // Principality is only claimed away from the anomalous case a_p = 1 mod p.
    let anomalous = (l.a_p - 1).rem_euclid(a.curve.p as i64) == 0;
    let mut report = header("stabilize", &l.curve, a, l.a_p);
    report["anomalous"] = json!(anomalous);
    report["principality"] = serde_json::to_value(&r).map_err(Error::Json)?;
    Ok(Outcome {
        ok: r.equal || anomalous,
        report,
    })
}

pub fn pm_check(out: &OutputArgs, a: &LayerArgs) -> Result<Outcome, Failure> {
    let l = layer_setup(out, a)?;
    let p = a.curve.p;
    let t = mazur_tate::theta(&l.symbol, p, a.n)?;
    let ext = mazur_tate::pm_extract(&t.reduce(a.k)?, Some(&t))?;
    let cross = if a.n >= 2 && l.a_p == 0 {
        let low = mazur_tate::theta(&l.symbol, p, a.n - 2)?;
        Some(mazur_tate::cross_layer_check(&t, &low)?)
    } else {
        None
    };
    let mut report = header("pm-check", &l.curve, a, l.a_p);
    report["extraction"] = serde_json::to_value(&ext).map_err(Error::Json)?;
    report["cross_layer"] = serde_json::to_value(&cross).map_err(Error::Json)?;
    Ok(Outcome {
        ok: ext.holds() && cross.as_ref().map_or(true, |c| c.compatible),
        report,
    })
}

#[derive(Deserialize)]
struct IdealFile {
    shape: RingShape,
    generators: Vec<GroupRingElement>,
}

/// A bare `{"shape", "generators"}` object, or any report carrying one under `"ideal"`.
fn read_ideal(path: &Path) -> Result<IdealLattice, Failure> {
    let mut v: Value = read_json(path)?;
    if let Some(inner) = v.get_mut("ideal") {
        v = inner.take();
    }
    let f: IdealFile = serde_json::from_value(v).map_err(Error::Json)?;
    Ok(IdealLattice::from_generators(&f.shape, f.generators)?)
}

pub fn ideal(out: &OutputArgs, a: &LayerArgs, contains: Option<&Path>) -> Result<Outcome, Failure> {
    let l = layer_setup(out, a)?;
    let p = a.curve.p;
    let t = mazur_tate::theta(&l.symbol, p, a.n)?.reduce(a.k)?;
    let prev = if a.n == 0 {
        t.shape().zero()
    } else {
        mazur_tate::theta(&l.symbol, p, a.n - 1)?.reduce(a.k)?
    };
    let ideal = mazur_tate::ideal_theta(&t, &prev)?;
    let pm_identity = if a.n >= 2 && l.a_p == 0 {
        Some(mazur_tate::pm_ideal_identity(&t, &prev)?)
    } else {
        None
    };
    let membership = contains
        .map(|path| mazur_tate::weak_mc_membership(&t, &read_ideal(path)?).map_err(Failure::from))
        .transpose()?;
    let mut report = header("ideal", &l.curve, a, l.a_p);
    report["ideal"] = serde_json::to_value(ideal.report()).map_err(Error::Json)?;
    report["pm_identity"] = json!(pm_identity);
    report["theta_in_ideal"] = json!(membership);
    Ok(Outcome {
        ok: pm_identity != Some(false),
        report,
    })
}

pub fn fitt(module: &Path, contains: Option<&Path>) -> Result<Outcome, Failure> {
    let m: FPModule = read_json(module)?;
    let ideal = m.fitting_ideal()?;
    let membership = contains
        .map(|path| -> Result<bool, Failure> {
            let f: GroupRingElement = read_json(path)?;
            Ok(ideal.contains(&f)?)
        })
        .transpose()?;
    ok(json!({
        "tool": tool(),
        "command": "fitt",
        "generators": m.num_generators(),
        "relations": m.num_relations(),
        "ideal": ideal.report(),
        "contains": membership,
    }))
}

pub fn delta_search(out: &OutputArgs, c: &CurveArgs, bound: u64) -> Result<Outcome, Failure> {
    if bound == 0 {
        return Err(Failure::Usage("--bound must be positive".into()));
    }
    let curve = load_curve(&c.curve)?;
    let p = c.p;
    RingShape::modular(p, 0, 1)?;
    if curve.conductor % p == 0 {
        return Err(Error::BadPrime {
            p,
            conductor: curve.conductor,
        }
        .into());
    }
    let primes = mazur_tate::kolyvagin_primes(&curve, p, bound)?;
    let mut products: Vec<Vec<u64>> = primes.iter().map(|&l| vec![l]).collect();
    for (i, &a) in primes.iter().enumerate() {
        for &b in &primes[i + 1..] {
            products.push(vec![a, b]);
        }
    }
    let symbol = if primes.is_empty() {
        None
    } else {
        Some(load_symbol(out, &curve)?)
    };
    let rows = match &symbol {
        None => Vec::new(),
        Some(phi) => map_indexed(Execution::Parallel, products.len(), |i| {
            let n: u64 = products[i].iter().product();
            mazur_tate::delta_tilde(phi, p, n, &[])
        })
        .into_iter()
        .collect::<Result<Vec<_>, Error>>()?,
    };
    let nonzero: Vec<u64> = rows.iter().filter(|d| d.value != 0).map(|d| d.n).collect();
    ok(json!({
        "tool": tool(),
        "command": "delta-search",
        "curve": curve,
        "p": p,
        "bound": bound,
        "primitive_roots": "smallest primitive root modulo each ell",
        "kolyvagin_primes": primes,
        "values": rows,
        "nonzero": nonzero,
    }))
}

pub fn verify(out: &OutputArgs, mut cfg: VerifyConfig) -> Result<Outcome, Failure> {
    cfg.cache_dir = Some(resolve_cache_dir(out.cache_dir.as_deref()));
    let report = run_verify(&cfg)?;
    let passed = report.all_passed;
    let mut value = serde_json::to_value(&report).map_err(Error::Json)?;
    value["tool"] = tool();
    value["command"] = json!("verify");
    Ok(Outcome {
        report: value,
        ok: passed,
    })
}
