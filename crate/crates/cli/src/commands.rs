//! Subcommand implementations. Each returns a JSON result and whether the
//! verification it ran (if any) passed.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde_json::{json, Value};
use voa_core::algebra::{Algebra, AlgebraKind, LieTable};
use voa_core::blocks::{
    coinvariant_dim_estimate, intertwiner_dim, is_conformal_block, vertex_operator_block, MarkedSphere, Point,
};
use voa_core::contragredient::{verify_contragredient, Contragredient, DualModule};
use voa_core::coords::{solve_exp_coefficients, verify_huang_covariance, FormalCoordinate};
use voa_core::correlation::check_comm_assoc;
use voa_core::exec::Execution;
use voa_core::field::{FieldEngine, VertexOperators};
use voa_core::module::{basis_upto, dims, parse_vector, Bid, GradedModule, ModVec, PbwModule};
use voa_core::oracle::{gram_matrix, radical_dims, verma_radical_dims, Expectation};
use voa_core::quotient::{simple_quotient, QuotientModule};
use voa_core::rational::Q;
use voa_core::scalar::Scalar;
use voa_core::verify::{
    check_sugawara_commutator, check_virasoro_relation, verify_module_axioms, verify_skew_symmetry, verify_voa_axioms,
    weight1_lie_structure, VerificationReport, VerifyOptions,
};

use crate::config::{BaseModule, BlockMode, JobConfig, ModuleSpec, Param, Suite};

pub type Outcome = (Value, bool);

fn param_scalar(cfg: &JobConfig) -> Scalar {
    let sym = if cfg.algebra == AlgebraKind::Virasoro { 'c' } else { 'l' };
    match &cfg.param {
        Param::Symbolic => Scalar::param(sym),
        Param::Value(q) => Scalar::Rat(q.clone()),
    }
}

/// `2h`, `2*h`, `-h + e`, `0`: a linear combination of generator names.
fn parse_combination(table: &LieTable, text: &str) -> Result<Vec<(u8, Q)>> {
    let mut out = Vec::new();
    let s = text.replace(' ', "");
    if s == "0" {
        return Ok(out);
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(b) => (-Q::ONE, b),
            None => (Q::ONE, t.strip_prefix('+').unwrap_or(t)),
        };
        let split = body.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(|| anyhow!("bracket value {text:?}: missing generator"))?;
        let (coef, name) = body.split_at(split);
        let coef = coef.trim_end_matches('*');
        let k = if coef.is_empty() { Q::ONE } else { coef.parse::<Q>().map_err(|e| anyhow!("bracket value {text:?}: {}", e.0))? };
        let g = table.index(name).ok_or_else(|| anyhow!("bracket value {text:?}: unknown generator {name:?}"))?;
        out.push((g, &sign * &k));
    }
    Ok(out)
}

pub fn build_algebra(cfg: &JobConfig) -> Result<Algebra> {
    let p = param_scalar(cfg);
    Ok(match cfg.algebra {
        AlgebraKind::Virasoro => Algebra::virasoro(p),
        AlgebraKind::Heisenberg => Algebra::heisenberg(cfg.rank, p),
        AlgebraKind::AffineSl2 if cfg.brackets.is_empty() => Algebra::affine_sl2(p),
        AlgebraKind::AffineSl2 => {
            let mut table = LieTable::sl2();
            for (a, b, v) in &cfg.brackets {
                let ga = table.index(a).ok_or_else(|| anyhow!("bracket.{a}.{b}: unknown generator {a:?}"))?;
                let gb = table.index(b).ok_or_else(|| anyhow!("bracket.{a}.{b}: unknown generator {b:?}"))?;
                let value = parse_combination(&table, v)?;
                table.set_bracket(ga, gb, value);
            }
            Algebra::affine_with_table(AlgebraKind::AffineSl2, table, p)
        }
    })
}

pub struct Instance {
    pub voa: Arc<PbwModule>,
    pub vv: Arc<FieldEngine>,
}

pub struct ModuleInstance {
    /// The module itself (the dual when requested).
    pub module: Arc<dyn GradedModule>,
    pub ops: Arc<dyn VertexOperators>,
    pub quotient: Option<Arc<QuotientModule>>,
}

impl Instance {
    pub fn new(cfg: &JobConfig) -> Result<Instance> {
        let alg = build_algebra(cfg)?;
        let voa = PbwModule::vacuum(Arc::new(alg));
        let vv = FieldEngine::on_self(voa.clone());
        Ok(Instance { voa, vv })
    }

    pub fn module(&self, spec: &ModuleSpec, n: u32) -> Result<ModuleInstance> {
        let alg = self.voa.algebra_arc().clone();
        let (base, ops, quotient): (Arc<dyn GradedModule>, Arc<dyn VertexOperators>, _) = match &spec.base {
            BaseModule::Vacuum => (self.voa.clone(), self.vv.clone(), None),
            BaseModule::Verma(h) => {
                let m: Arc<dyn GradedModule> = PbwModule::verma(alg, Scalar::Rat(h.clone()))?;
                (m.clone(), FieldEngine::new(self.voa.clone(), m), None)
            }
            BaseModule::Simple(h) => {
                let base = if h.is_zero() { self.voa.clone() } else { PbwModule::verma(alg, Scalar::Rat(h.clone()))? };
                let q = simple_quotient(base, n)?;
                let m: Arc<dyn GradedModule> = q.clone();
                (m.clone(), FieldEngine::new(self.voa.clone(), m), Some(q))
            }
        };
        if spec.dual {
            let d = Contragredient::new(ops, base);
            return Ok(ModuleInstance { module: d.dual().clone(), ops: d, quotient });
        }
        Ok(ModuleInstance { module: base, ops, quotient })
    }
}

fn exec(cfg: &JobConfig) -> Execution {
    if cfg.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn options(cfg: &JobConfig) -> VerifyOptions {
    let mut o = VerifyOptions::new(cfg.truncation, cfg.window);
    if let Some(s) = cfg.span_weight {
        o.span_weight = s;
    }
    o.exec = exec(cfg);
    o
}

fn basis_vector(m: &dyn GradedModule, text: &str) -> Result<Bid> {
    let v = parse_vector(m, text)?;
    match v.iter().collect::<Vec<_>>().as_slice() {
        [(b, c)] if c.is_one() => Ok(*b),
        _ => bail!("{text:?} is not a basis vector of the {}", m.name()),
    }
}

fn homogeneous(m: &dyn GradedModule, text: &str) -> Result<ModVec> {
    let v = parse_vector(m, text)?;
    let ws: Vec<_> = v.keys().map(|b| b.w).collect();
    ensure!(ws.windows(2).all(|p| p[0] == p[1]), "{text:?} is not homogeneous");
    Ok(v)
}

pub fn build(cfg: &JobConfig) -> Result<Outcome> {
    let inst = Instance::new(cfg)?;
    let m = inst.module(&cfg.module, cfg.truncation)?;
    let alg = inst.voa.algebra();
    let mut out = json!({
        "algebra": alg.describe(),
        "module": m.module.name(),
        "dims": dims(&*m.module, cfg.truncation),
        "structure_defects": alg.lie.as_ref().map(|t| t.structure_defects()).unwrap_or_default(),
    });
    if let Ok(c) = alg.central_charge() {
        out["central_charge"] = json!(c);
    }
    if cfg.module.base == BaseModule::Vacuum && !cfg.module.dual {
        out["weight1"] = serde_json::to_value(weight1_lie_structure(&*inst.vv)?)?;
    }
    Ok((out, true))
}

pub fn dims_cmd(cfg: &JobConfig) -> Result<Outcome> {
    let inst = Instance::new(cfg)?;
    let m = inst.module(&cfg.module, cfg.truncation)?;
    let mut out = json!({ "module": m.module.name(), "dims": dims(&*m.module, cfg.truncation) });
    if let Some(q) = &m.quotient {
        out["radical_dims"] = json!(q.radical_dims(cfg.truncation));
        out["base_dims"] = json!(dims(&**q.base(), cfg.truncation));
    }
    Ok((out, true))
}

fn single(subject: String, opts: &VerifyOptions, axioms: Vec<voa_core::verify::AxiomReport>) -> VerificationReport {
    let mut params = BTreeMap::new();
    params.insert("truncation".to_string(), opts.truncation.to_string());
    params.insert("window".to_string(), opts.window.to_string());
    VerificationReport { subject, params, axioms }
}

pub fn verify(cfg: &JobConfig) -> Result<Outcome> {
    let inst = Instance::new(cfg)?;
    let opts = options(cfg);
    let is_vacuum = cfg.module.base == BaseModule::Vacuum && !cfg.module.dual;
    let suite = cfg.suite.unwrap_or(if is_vacuum { Suite::Voa } else { Suite::Module });
    let report = match suite {
        Suite::Voa => {
            ensure!(is_vacuum, "suite voa needs module = vacuum");
            verify_voa_axioms(&*inst.vv, &opts)
        }
        Suite::Module => {
            let m = inst.module(&cfg.module, cfg.truncation)?;
            verify_module_axioms(&*m.ops, &*inst.vv, &opts)
        }
        Suite::Contragredient => {
            ensure!(!cfg.module.dual, "suite contragredient takes the undualized module");
            let m = inst.module(&cfg.module, cfg.truncation)?;
            verify_contragredient(m.ops.clone(), m.module.clone(), &*inst.vv, &opts)
        }
        Suite::Skew => {
            ensure!(is_vacuum, "suite skew needs module = vacuum");
            let a = verify_skew_symmetry(&*inst.vv, cfg.truncation, opts.span_weight, opts.exec);
            single(inst.voa.name(), &opts, vec![a])
        }
        Suite::Virasoro => {
            let m = inst.module(&cfg.module, cfg.truncation)?;
            single(m.module.name(), &opts, vec![check_virasoro_relation(&*m.module, cfg.truncation, cfg.window)])
        }
        Suite::Sugawara => {
            ensure!(cfg.algebra != AlgebraKind::Virasoro, "suite sugawara needs an affine algebra");
            let m = inst.module(&cfg.module, cfg.truncation)?;
            let axioms = vec![
                check_sugawara_commutator(&*m.module, cfg.truncation, cfg.window),
                check_virasoro_relation(&*m.module, cfg.truncation, cfg.window),
            ];
            single(m.module.name(), &opts, axioms)
        }
    };
    let passed = report.passed();
    Ok((serde_json::to_value(report)?, passed))
}

pub fn npoint(cfg: &JobConfig) -> Result<Outcome> {
    let inst = Instance::new(cfg)?;
    let m = inst.module(&cfg.module, cfg.truncation)?;
    let u = homogeneous(&*inst.voa, cfg.u.as_deref().ok_or_else(|| anyhow!("npoint needs u"))?)?;
    let v = homogeneous(&*inst.voa, cfg.v.as_deref().ok_or_else(|| anyhow!("npoint needs v"))?)?;
    let w = basis_vector(&*m.module, &cfg.w)?;
    let wd = basis_vector(&*m.module, &cfg.w_dual)?;
    let r = check_comm_assoc(&*m.ops, &*inst.vv, wd, &u, &v, w, cfg.order)?;
    let passed = r.passed();
    Ok((
        json!({
            "function": r.function.to_factored_string(),
            "commutativity": r.commutativity,
            "associativity": r.associativity,
            "compared": r.compared,
        }),
        passed,
    ))
}

fn sphere_json(points: &[Point], specs: &[String]) -> Value {
    Value::Array(points.iter().zip(specs).map(|(p, s)| json!({ "point": p.to_string(), "module": s })).collect())
}

pub fn blocks(cfg: &JobConfig) -> Result<Outcome> {
    let inst = Instance::new(cfg)?;
    ensure!(!cfg.points.is_empty(), "blocks needs points");
    match cfg.block_mode {
        BlockMode::Certify => certify(cfg, &inst),
        BlockMode::Dim => estimate(cfg, &inst),
    }
}

fn certify(cfg: &JobConfig, inst: &Instance) -> Result<Outcome> {
    let finite: Vec<&Q> = cfg.points.iter().filter_map(|p| if let Point::Finite(q) = p { Some(q) } else { None }).collect();
    let gamma = match (cfg.points.len(), finite.as_slice()) {
        (3, [a, b]) if a.is_zero() && !b.is_zero() => (*b).clone(),
        (3, [a, b]) if b.is_zero() && !a.is_zero() => (*a).clone(),
        _ => bail!("certify uses the vertex-operator block on points 0, gamma, inf"),
    };
    ensure!(!cfg.module.dual, "certify places W at 0 and its contragredient at infinity; give the undualized module");
    let m = inst.module(&cfg.module, cfg.truncation)?;
    let d = Contragredient::new(m.ops.clone(), m.module.clone());
    let sphere = MarkedSphere::new(vec![
        (Point::Finite(Q::ZERO), m.ops.clone()),
        (Point::Finite(gamma.clone()), inst.vv.clone() as Arc<dyn VertexOperators>),
        (Point::Infinity, d as Arc<dyn VertexOperators>),
    ])?;
    let k = cfg.truncation;
    let mut phi = vertex_operator_block(&*m.ops, &gamma, k);
    if cfg.perturb {
        let key = vec![Bid::TOP; 3];
        phi.set(key.clone(), &phi.get(&key) + &Scalar::one());
    }
    let r = is_conformal_block(&sphere, &phi, k, cfg.pole_bound, exec(cfg))?;
    let w = cfg.module.to_string();
    let specs = [w.clone(), "vacuum".into(), format!("dual:{w}")];
    let points = [Point::Finite(Q::ZERO), Point::Finite(gamma), Point::Infinity];
    let passed = r.passed();
    Ok((
        json!({
            "sphere": sphere_json(&points, &specs),
            "truncation": k,
            "pole_bound": cfg.pole_bound,
            "perturbed": cfg.perturb,
            "report": r,
        }),
        passed,
    ))
}

fn estimate(cfg: &JobConfig, inst: &Instance) -> Result<Outcome> {
    let vacuum = ModuleSpec { dual: false, base: BaseModule::Vacuum };
    let specs: Vec<ModuleSpec> = (0..cfg.points.len()).map(|i| cfg.point_modules.get(&i).cloned().unwrap_or(vacuum.clone())).collect();
    let mods: Vec<ModuleInstance> = specs.iter().map(|s| inst.module(s, cfg.truncation.max(1))).collect::<Result<_>>()?;
    let sphere = MarkedSphere::new(cfg.points.iter().cloned().zip(mods.iter().map(|m| m.ops.clone())).collect())?;
    let est = coinvariant_dim_estimate(&sphere, cfg.truncation, exec(cfg))?;
    // Intertwiner oracle for one or two points with infinity marked.
    let at = |p: &Point| cfg.points.iter().position(|x| x == p);
    let oracle = match (cfg.points.len(), at(&Point::Infinity), at(&Point::Finite(Q::ZERO))) {
        (1, Some(i), _) => Some(intertwiner_dim(&*inst.voa, &*DualModule::new(mods[i].module.clone()), cfg.truncation)),
        (2, Some(i), Some(j)) => Some(intertwiner_dim(&*mods[j].module, &*DualModule::new(mods[i].module.clone()), cfg.truncation)),
        _ => None,
    };
    let passed = oracle.is_none_or(|o| o == est.value);
    let texts: Vec<String> = specs.iter().map(ModuleSpec::to_string).collect();
    Ok((
        json!({
            "sphere": sphere_json(&cfg.points, &texts),
            "truncation": cfg.truncation,
            "estimate": est,
            "oracle": oracle,
        }),
        passed,
    ))
}

pub fn coords(cfg: &JobConfig) -> Result<Outcome> {
    let coeffs = cfg.coordinate.as_ref().ok_or_else(|| anyhow!("coords needs coordinate = a0, a1, ..."))?;
    let alpha = FormalCoordinate::polynomial(coeffs.iter().cloned().map(Scalar::Rat).collect());
    let form = solve_exp_coefficients(&alpha, cfg.order.max(1) as usize)?;
    let mut out = json!({ "coordinate": coeffs.iter().map(Q::to_string).collect::<Vec<_>>(), "exp_form": form });
    let mut passed = true;
    if cfg.huang {
        let inst = Instance::new(cfg)?;
        let m = inst.module(&cfg.module, cfg.truncation)?;
        ensure!(!cfg.module.dual, "covariance check takes the undualized module");
        let dual = DualModule::new(m.module.clone());
        let (mut cases, mut failures) = (0, Vec::new());
        for v in basis_upto(&*inst.voa, cfg.truncation) {
            for w in basis_upto(&*m.module, cfg.truncation) {
                for wd in basis_upto(&*m.module, cfg.truncation) {
                    let r = verify_huang_covariance(&alpha, &*m.ops, &dual, &voa_core::module::unit(v), w, wd, cfg.order as u32)
                        .context("covariance check")?;
                    cases += 1;
                    if !r.passed() {
                        failures.push(r);
                    }
                }
            }
        }
        passed = failures.is_empty();
        out["covariance"] = json!({ "cases": cases, "failures": failures.len(), "first_failure": failures.first() });
    }
    Ok((out, passed))
}

/// Regression values from the slow reference paths only: dense Gram
/// matrices with fraction-free elimination and direct bracket expansion of
/// vacuum expectations.
pub fn oracle(cfg: &JobConfig) -> Result<Outcome> {
    let n = cfg.truncation;
    let vir = |c: Scalar| Algebra::virasoro(c);
    let sizes = |alg: &Algebra| (0..=n).map(|w| gram_matrix(alg, true, &Scalar::zero(), w).len()).collect::<Vec<_>>();
    let mut out = serde_json::Map::new();

    let ising = vir(Scalar::ratio(1, 2));
    let full = sizes(&ising);
    let rad = radical_dims(&ising, n);
    let quot: Vec<usize> = full.iter().zip(&rad).map(|(a, b)| a - b).collect();
    out.insert("virasoro_c=1/2".into(), json!({ "dims": full, "radical_dims": rad, "quotient_dims": quot }));

    let mm = vir(Scalar::ratio(-22, 5));
    let rad = radical_dims(&mm, n);
    let first = rad.iter().position(|d| *d > 0);
    out.insert("virasoro_c=-22/5".into(), json!({ "radical_dims": rad, "first_radical_weight": first }));

    let generic = vir(Scalar::ratio(7, 3));
    out.insert("virasoro_c=7/3".into(), json!({ "radical_dims": radical_dims(&generic, n) }));

    for h in [Scalar::ratio(1, 2), Scalar::ratio(1, 16)] {
        let rad = verma_radical_dims(&ising, &h, n);
        let dims: Vec<usize> = (0..=n).map(|w| gram_matrix(&ising, false, &h, w).len()).collect();
        let irr: Vec<usize> = dims.iter().zip(&rad).map(|(a, b)| a - b).collect();
        out.insert(format!("virasoro_c=1/2_h={h}"), json!({ "radical_dims": rad, "irreducible_dims": irr }));
    }

    let heis = Algebra::heisenberg(1, Scalar::param('l'));
    let mut e = Expectation::new(&heis, Scalar::zero());
    let xx: Vec<Scalar> = (1..=5).map(|k| e.eval(&[(0, k), (0, -k)])).collect();
    out.insert("heisenberg".into(), json!({ "dims": sizes(&heis), "two_point_modes": xx }));

    let virc = vir(Scalar::param('c'));
    let mut e = Expectation::new(&virc, Scalar::zero());
    let tt: Vec<Scalar> = (2..=6).map(|k| e.eval(&[(0, k), (0, -k)])).collect();
    out.insert("virasoro".into(), json!({ "dims": sizes(&virc), "two_point_modes": tt }));

    Ok((Value::Object(out), true))
}
