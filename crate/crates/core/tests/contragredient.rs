use std::sync::Arc;

use voa_core::algebra::Algebra;
use voa_core::contragredient::{compare_actions, verify_contragredient, Contragredient};
use voa_core::field::{mode, FieldEngine, ModeOperator, VertexOperators};
use voa_core::module::{basis_upto, dims, unit, Bid, GradedModule, PbwModule};
use voa_core::scalar::Scalar;
use voa_core::verify::VerifyOptions;

#[test]
fn vacuum_acts_as_identity_on_the_dual() {
    let v = PbwModule::vacuum(Arc::new(Algebra::heisenberg(1, Scalar::one())));
    let e = FieldEngine::on_self(v.clone());
    let w: Arc<dyn GradedModule> = v.clone();
    let d = Contragredient::new(e, w);
    let id = ModeOperator::from_fn(d.module(), 0, 4, unit);
    assert_eq!(mode(&*d, &unit(Bid::TOP), -1, 4), id);
    assert!(mode(&*d, &unit(Bid::TOP), 0, 4).blocks.values().all(|m| m.is_zero()));
    assert_eq!(dims(d.module(), 6), dims(&*v, 6));
}

#[test]
fn virasoro_dual_suite() {
    let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(Scalar::ratio(1, 2))));
    let e = FieldEngine::on_self(v.clone());
    let mut o = VerifyOptions::new(5, 2);
    o.span_weight = 3;
    let r = verify_contragredient(e.clone(), v.clone(), &*e, &o);
    assert!(r.passed(), "{r:?}");
    assert!(r.axiom("grading").is_some_and(|a| a.checks > 0));
}

#[test]
fn double_dual_of_a_verma_module() {
    let alg = Arc::new(Algebra::virasoro(Scalar::ratio(1, 2)));
    let vv = PbwModule::vacuum(alg.clone());
    let w: Arc<dyn GradedModule> = PbwModule::verma(alg, Scalar::ratio(1, 16)).unwrap();
    let ops: Arc<dyn VertexOperators> = FieldEngine::new(vv.clone(), w.clone());
    let d = Contragredient::new(ops.clone(), w);
    let dd = Contragredient::new(d.clone(), d.dual().clone());
    let (checks, bad) = compare_actions(&*dd, &*ops, &basis_upto(&*vv, 4), 4, 3);
    assert!(checks > 0);
    assert_eq!(bad, None);
}
