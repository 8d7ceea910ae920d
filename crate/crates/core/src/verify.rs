//! The full verification suite: every invariant of the library, each reported
//! as one pass/fail property with the seed needed to reproduce it.

use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::primitive_roots;
use crate::error::{Error, Result};
use crate::fitting::enumerate::{all_elements, ideal_by_enumeration};
use crate::fitting::lemmas::{random_element, run_lemma_suite, Lemma};
use crate::fitting::IdealLattice;
use crate::group_ring::omega::{cyclo_group, omega_group, omega_pm_group, omega_tilde_group};
use crate::group_ring::{RingShape, Sign};
use crate::mazur_tate::{
    cross_layer_check, delta_tilde, kolyvagin_primes, norm_relation_check, pm_extract, principality_check, theta,
};
use crate::modsym::{load_or_compute, CurveData, PlusEigenSymbol};
use crate::parallel::{instance_rng, map_indexed, Execution};
use crate::selmer::{fitt_yprime, involution_identity_check, kernel_basis_check, local_quotient_module, GlobalImagePair};

pub const PROPERTIES: [&str; 12] = [
    "omega-identities",
    "involution-identities",
    "kernel-basis",
    "fitt-yprime",
    "local-quotient",
    "lemma-suite",
    "enumeration-cross-check",
    "modular-symbols",
    "norm-relation",
    "pm-extraction",
    "ordinary-principality",
    "delta-invariance",
];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub exec: Execution,
    pub cache_dir: Option<PathBuf>,
    /// Random pairs per `(p, n)` for the `Fitt(Y')` formula.
    pub yprime_pairs: usize,
    /// Random instances per lemma.
    pub lemma_instances: usize,
    /// Test-only: negate the verdict of the first instance of this property.
    pub inject_fault: Option<String>,
    /// Restrict to these properties (all when empty).
    pub only: Vec<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            exec: Execution::Parallel,
            cache_dir: None,
            yprime_pairs: 100,
            lemma_instances: 200,
            inject_fault: None,
            only: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    /// Labels of failing instances; randomized ones carry `seed` and index.
    pub failures: Vec<String>,
    pub seed: Option<u64>,
    pub error: Option<String>,
    #[serde(default)]
    pub elapsed_ms: u64,
}

impl PropertyResult {
    /// Everything except timing.
    pub fn verdict(&self) -> (String, bool, usize, Vec<String>, Option<String>) {
        (
            self.name.clone(),
            self.passed,
            self.instances,
            self.failures.clone(),
            self.error.clone(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub seed: u64,
    pub parallel: bool,
    pub properties: Vec<PropertyResult>,
    pub all_passed: bool,
}

type Outcomes = Vec<(String, bool)>;

fn run_property(name: &str, seed: Option<u64>, fault: bool, f: impl FnOnce() -> Result<Outcomes>) -> PropertyResult {
    let start = Instant::now();
    let (mut outcomes, error) = match f() {
        Ok(o) => (o, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    if fault {
        match outcomes.first_mut() {
            Some(first) => {
                first.1 = !first.1;
                first.0.push_str(" [injected fault]");
            }
            None => outcomes.push(("injected fault".into(), false)),
        }
    }
    let failures: Vec<String> = outcomes.iter().filter(|(_, ok)| !ok).map(|(l, _)| l.clone()).collect();
    PropertyResult {
        name: name.into(),
        passed: error.is_none() && failures.is_empty() && !outcomes.is_empty(),
        instances: outcomes.len(),
        failures,
        seed,
        error,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    for name in cfg.inject_fault.iter().chain(&cfg.only) {
        if !PROPERTIES.contains(&name.as_str()) {
            return Err(Error::InvalidInput(format!(
                "unknown property {name}; known: {}",
                PROPERTIES.join(", ")
            )));
        }
    }
    let wanted = |name: &str| cfg.only.is_empty() || cfg.only.iter().any(|o| o == name);
    let fault = |name: &str| cfg.inject_fault.as_deref() == Some(name);
    let seed = cfg.seed;
    let exec = cfg.exec;

    // Symbols are shared by the last five properties.
    let needs_symbols = PROPERTIES[7..].iter().any(|n| wanted(n));
    let symbols = if needs_symbols {
        let dir = cfg.cache_dir.as_deref();
        Some((
            load_or_compute(dir, &CurveData::named("11a1").expect("built in"))?,
            load_or_compute(dir, &CurveData::named("17a1").expect("built in"))?,
        ))
    } else {
        None
    };

    let mut properties = Vec::new();
    let mut push = |name: &str, seed: Option<u64>, f: &dyn Fn() -> Result<Outcomes>| {
        if wanted(name) {
            properties.push(run_property(name, seed, fault(name), f));
        }
    };
    push("omega-identities", None, &omega_identities);
    push("involution-identities", None, &|| involution_identities(exec));
    push("kernel-basis", None, &|| kernel_basis(exec));
    push("fitt-yprime", Some(seed), &|| yprime_formula(seed, cfg.yprime_pairs, exec));
    push("local-quotient", None, &|| local_quotient(exec));
    push("lemma-suite", Some(seed), &|| lemma_suite(seed, cfg.lemma_instances, exec));
    push("enumeration-cross-check", Some(seed), &|| enumeration_cross_check(seed, cfg.lemma_instances, exec));
    if let Some((e11, e17)) = &symbols {
        push("modular-symbols", Some(seed), &|| modular_symbols(&[e11, e17], seed, exec));
        push("norm-relation", None, &|| norm_relations(&[e17, e11]));
        push("pm-extraction", None, &|| pm_extraction(e17));
        push("ordinary-principality", None, &|| ordinary_principality(e11));
        push("delta-invariance", None, &|| delta_invariance(e17));
    }
    let all_passed = properties.iter().all(|p| p.passed);
    Ok(VerifyReport {
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        parallel: exec.is_parallel(),
        properties,
        all_passed,
    })
}

/// `omega_n = omega^+ omega~^- = omega^- omega~^+` and `omega_n / omega_{n-1} = Phi_n`,
/// as polynomials in `T = 1 + X`, for `p in {3, 5, 7}`, `n <= 5`.
pub fn omega_identities() -> Result<Outcomes> {
    let mut out = Vec::new();
    for p in [3u64, 5, 7] {
        for n in 0..=5u32 {
            let w = omega_group(p, n);
            let mut ok = [Sign::Plus, Sign::Minus]
                .iter()
                .all(|&s| omega_pm_group(p, n, s).mul(&omega_tilde_group(p, n, s.opposite())) == w);
            if n >= 1 {
                let (q, r) = w.divrem_monic(&omega_group(p, n - 1));
                ok &= r.is_zero() && q == cyclo_group(p, n);
            }
            out.push((format!("p={p} n={n}"), ok));
        }
    }
    Ok(out)
}

fn grid(ps: &[u64], n_max: u32, k_max: u32) -> Vec<(u64, u32, u32)> {
    let mut v = Vec::new();
    for &p in ps {
        for n in 0..=n_max {
            for k in 1..=k_max {
                v.push((p, n, k));
            }
        }
    }
    v
}

/// `iota(omega~^s) = c^s omega~^s` with `c^s` a unit, `p in {3, 5}`, `n <= 4`, `k <= 6`.
pub fn involution_identities(exec: Execution) -> Result<Outcomes> {
    let cases = grid(&[3, 5], 4, 6);
    map_indexed(exec, cases.len(), |i| {
        let (p, n, k) = cases[i];
        let shape = RingShape::modular(p, n, k)?;
        let ok = [Sign::Plus, Sign::Minus]
            .iter()
            .map(|&s| involution_identity_check(&shape, s).map(|r| r.1))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|b| b);
        Ok((format!("p={p} n={n} k={k}"), ok))
    })
    .into_iter()
    .collect()
}

/// `ker r` is spanned by `((p-1)/2, 1)` and `(X, 0)`, `p in {3, 5}`, `n <= 3`, `k <= 6`.
pub fn kernel_basis(exec: Execution) -> Result<Outcomes> {
    let cases = grid(&[3, 5], 3, 6);
    map_indexed(exec, cases.len(), |i| {
        let (p, n, k) = cases[i];
        let r = kernel_basis_check(&RingShape::modular(p, n, k)?)?;
        Ok((format!("p={p} n={n} k={k}"), r.holds()))
    })
    .into_iter()
    .collect()
}

/// Random admissible pairs `(b1, b2)` at `k = 4`: the ideal of 2x2 minors of `A`
/// equals `(omega~^+ b1, omega~^- b2)`.
pub fn yprime_formula(seed: u64, pairs: usize, exec: Execution) -> Result<Outcomes> {
    let cases: Vec<(u64, u32)> = [3u64, 5]
        .iter()
        .flat_map(|&p| (1..=3u32).map(move |n| (p, n)))
        .collect();
    let total = cases.len() * pairs;
    map_indexed(exec, total, |idx| {
        let (p, n) = cases[idx / pairs];
        let shape = RingShape::modular(p, n, 4)?;
        let mut rng = instance_rng(seed, idx as u64);
        let b2 = random_element(&shape, &mut rng);
        let h = random_element(&shape, &mut rng);
        let pair = GlobalImagePair::from_b2_and_quotient(b2, &h)?;
        let (_, report) = fitt_yprime(&pair)?;
        Ok((
            format!("p={p} n={n} instance {} (seed {seed}, stream {idx})", idx % pairs),
            report.holds,
        ))
    })
    .into_iter()
    .collect()
}

/// `Fitt((omega~^+, omega~^-) / omega~^{-s}) = (omega~^{-s})`, `p in {3, 5}`, `n <= 3`, `k <= 4`.
pub fn local_quotient(exec: Execution) -> Result<Outcomes> {
    let cases = grid(&[3, 5], 3, 4);
    let signs = [Sign::Plus, Sign::Minus];
    map_indexed(exec, cases.len() * 2, |i| {
        let (p, n, k) = cases[i / 2];
        let sign = signs[i % 2];
        let shape = RingShape::modular(p, n, k)?;
        let fitt = local_quotient_module(&shape, sign)?.fitting_ideal()?;
        let expected = IdealLattice::from_generators(&shape, [shape.omega_tilde(sign.opposite())])?;
        Ok((format!("p={p} n={n} k={k} kill omega~^{}", sign.opposite().symbol()), fitt == expected))
    })
    .into_iter()
    .collect()
}

/// All Fitting-ideal lemmas at `p = 3`, `n in {1, 2}`, `k = 2`.
pub fn lemma_suite(seed: u64, instances: usize, exec: Execution) -> Result<Outcomes> {
    let mut out = Vec::new();
    for n in [1u32, 2] {
        let shape = RingShape::modular(3, n, 2)?;
        // Distinct seeds per layer so the two layers draw independent instances.
        let layer_seed = seed.wrapping_add(n as u64);
        for summary in run_lemma_suite(&shape, &Lemma::ALL, instances, layer_seed, exec)? {
            let name = summary.lemma.name();
            out.push((
                format!(
                    "n={n} {name}: {} instances, failing {:?} (seed {layer_seed})",
                    summary.instances, summary.failures
                ),
                summary.passed() && summary.instances >= instances,
            ));
        }
    }
    Ok(out)
}

/// Lattice membership and Fitting ideals against exhaustive enumeration of the
/// 27-element ring `p = 3, n = 1, k = 1`.
pub fn enumeration_cross_check(seed: u64, instances: usize, exec: Execution) -> Result<Outcomes> {
    let shape = RingShape::modular(3, 1, 1)?;
    let elements = all_elements(&shape)?;
    map_indexed(exec, instances, |i| {
        let mut rng = instance_rng(seed ^ 0x5eed, i as u64);
        // A random 1 x s or 2 x 2 presentation; its minors are written out by hand.
        let (matrix, minors) = if rng.gen_bool(0.5) {
            let s = rng.gen_range(1..=3);
            let row: Vec<_> = (0..s).map(|_| random_element(&shape, &mut rng)).collect();
            (vec![row.clone()], row)
        } else {
            let m: Vec<Vec<_>> = (0..2)
                .map(|_| (0..2).map(|_| random_element(&shape, &mut rng)).collect())
                .collect();
            let det = m[0][0].mul(&m[1][1])?.sub(&m[0][1].mul(&m[1][0])?)?;
            (m, vec![det])
        };
        let cols = matrix[0].len();
        let fitt = crate::fitting::FPModule::new(&shape, matrix, cols)?.fitting_ideal()?;
        let brute = ideal_by_enumeration(&shape, &minors)?;
        let mut ok = 3u64.pow(fitt.log_p_size()) as usize == brute.len();
        for f in &elements {
            ok &= fitt.contains(f)? == brute.contains(f.residues());
        }
        Ok((format!("instance {i} (seed {seed})"), ok))
    })
    .into_iter()
    .collect()
}

/// Manin relations, Hecke eigenvalues for good `ell <= 20`, plus symmetry on
/// random cusps and the value lattice being `Z`.
pub fn modular_symbols(symbols: &[&PlusEigenSymbol], seed: u64, exec: Execution) -> Result<Outcomes> {
    let mut out = Vec::new();
    for (j, phi) in symbols.iter().enumerate() {
        let label = &phi.curve.label;
        out.push((format!("{label} Manin relations"), phi.manin_relations_hold()));
        for (ell, ok) in phi.hecke_report(20, exec)? {
            out.push((format!("{label} T_{ell}"), ok));
        }
        let mut rng = instance_rng(seed, j as u64);
        let symmetric = (0..100).all(|_| {
            let b = rng.gen_range(1..500i64);
            let a = rng.gen_range(-1000..1000i64);
            phi.eval_plus(a, b) == phi.eval_plus(-a, b)
        });
        out.push((format!("{label} plus symmetry (seed {seed}, stream {j})"), symmetric));
        out.push((format!("{label} value lattice is Z"), phi.lattice_is_z()));
    }
    Ok(out)
}

/// The norm relation at `p = 3`, `n in {2, 3}`.
pub fn norm_relations(symbols: &[&PlusEigenSymbol]) -> Result<Outcomes> {
    let mut out = Vec::new();
    for phi in symbols {
        for n in [2, 3] {
            let r = norm_relation_check(phi, 3, n)?;
            out.push((format!("{} p=3 n={n} a_p={}", phi.curve.label, r.a_p), r.holds));
        }
    }
    Ok(out)
}

/// Plus/minus extraction for the supersingular curve at `p = 3`, `n <= 3`, `k = 4`.
pub fn pm_extraction(phi: &PlusEigenSymbol) -> Result<Outcomes> {
    let thetas = (0..=3).map(|n| theta(phi, 3, n)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for n in 1..=3usize {
        let ext = pm_extract(&thetas[n].reduce(4)?, Some(&thetas[n]))?;
        out.push((format!("{} n={n} divisibility and annihilator", phi.curve.label), ext.holds()));
        if n >= 2 {
            let r = cross_layer_check(&thetas[n], &thetas[n - 2])?;
            out.push((format!("{} n={n} vs n={}", phi.curve.label, n - 2), r.compatible));
        }
    }
    Ok(out)
}

/// `(theta_1, trace(theta_0)) = (stabilized theta_1)` at `p = 3`, `k in {2, 4, 6}`.
pub fn ordinary_principality(phi: &PlusEigenSymbol) -> Result<Outcomes> {
    [2, 4, 6]
        .iter()
        .map(|&k| {
            let r = principality_check(phi, 3, 1, k)?;
            Ok((format!("{} p=3 n=1 k={k} alpha={}", phi.curve.label, r.alpha), r.equal))
        })
        .collect()
}

/// Zero/nonzero verdict of `delta~_ell` for the smallest Kolyvagin prime below 500
/// agrees across two primitive roots.
pub fn delta_invariance(phi: &PlusEigenSymbol) -> Result<Outcomes> {
    let primes = kolyvagin_primes(&phi.curve, 3, 500)?;
    let Some(&ell) = primes.first() else {
        return Err(Error::InvalidInput("no Kolyvagin prime below 500".into()));
    };
    let roots: Vec<u64> = primitive_roots(ell).take(2).collect();
    let values = roots
        .iter()
        .map(|&g| delta_tilde(phi, 3, ell, &[(ell, g)]).map(|d| d.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![(
        format!("{} ell={ell} roots {roots:?} values {values:?}", phi.curve.label),
        (values[0] == 0) == (values[1] == 0),
    )])
}
