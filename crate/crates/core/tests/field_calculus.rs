use std::sync::Arc;

use voa_core::algebra::Algebra;
use voa_core::field::{mode, normal_ordered_mode, sugawara_mode, Field, FieldEngine, ModeOperator};
use voa_core::module::{basis_upto, parse_vector, unit, vir_vec, Bid, GradedModule, PbwModule};
use voa_core::scalar::Scalar;
use voa_core::verify::{sugawara_vector, verify_module_axioms, verify_skew_symmetry, verify_voa_axioms, VerifyOptions};

fn vacuum(alg: Algebra) -> Arc<PbwModule> {
    PbwModule::vacuum(Arc::new(alg))
}

#[test]
fn vacuum_mode_is_identity() {
    let v = vacuum(Algebra::virasoro(Scalar::param('c')));
    let e = FieldEngine::on_self(v.clone());
    let id = ModeOperator::from_fn(&*v, 0, 5, unit);
    for n in -3..3 {
        let m = mode(&*e, &unit(Bid::TOP), n, 5);
        if n == -1 {
            assert_eq!(m, id);
        } else {
            assert!(m.blocks.values().all(|b| b.is_zero()));
        }
    }
}

#[test]
fn translation_on_matrices() {
    let v = vacuum(Algebra::heisenberg(1, Scalar::one()));
    let e = FieldEngine::on_self(v.clone());
    for x in basis_upto(&*v, 3) {
        let dx = vir_vec(&*v, -1, &unit(x));
        if dx.is_zero() {
            continue;
        }
        for n in -2..=3 {
            let lhs = mode(&*e, &dx, n, 4);
            let rhs = mode(&*e, &unit(x), n - 1, 4);
            for (s, m) in &lhs.blocks {
                assert_eq!(*m, rhs.blocks[s].scale(&Scalar::int(-n)));
            }
        }
    }
}

#[test]
fn heisenberg_sugawara_is_a_vertex_operator() {
    let v = vacuum(Algebra::heisenberg(1, Scalar::ratio(3, 2)));
    let e = FieldEngine::on_self(v.clone());
    let c = sugawara_vector(&v).unwrap();
    for m in -3..=3 {
        assert_eq!(sugawara_mode(&*v, m, 5), mode(&*e, &c, m + 1, 5), "m = {m}");
    }
}

#[test]
fn normal_ordered_product_against_direct_mode() {
    let v = vacuum(Algebra::virasoro(Scalar::param('c')));
    let e = FieldEngine::on_self(v.clone());
    let t = Field::Generator(0);
    let cc = parse_vector(&*v, "L[-2]L[-2]").unwrap();
    for w in basis_upto(&*v, 3) {
        for k in -1..=4 {
            let a = normal_ordered_mode(&*e, &t, &t, 0, k, w);
            let b = voa_core::field::apply_to(&*e, &cc, k, w);
            assert_eq!(a, b);
        }
    }
}

#[test]
fn virasoro_axioms_with_symbolic_charge() {
    let v = vacuum(Algebra::virasoro(Scalar::param('c')));
    let e = FieldEngine::on_self(v.clone());
    let mut o = VerifyOptions::new(6, 3);
    o.span_weight = 2;
    let r = verify_voa_axioms(&*e, &o);
    assert!(r.passed(), "{r:?}");
    assert!(r.axiom("creation").unwrap().checks > 0);
}

#[test]
fn vacuum_module_report_matches_voa_report() {
    let v = vacuum(Algebra::heisenberg(1, Scalar::one()));
    let e = FieldEngine::on_self(v.clone());
    let o = VerifyOptions::new(3, 2);
    let a = verify_module_axioms(&*e, &*e, &o);
    let mut b = verify_voa_axioms(&*e, &o);
    b.axioms.remove(0);
    assert_eq!(a, b);
}

#[test]
fn verma_and_affine_modules_pass() {
    let alg = Arc::new(Algebra::virasoro(Scalar::ratio(1, 2)));
    let vv = PbwModule::vacuum(alg.clone());
    let w: Arc<dyn GradedModule> = PbwModule::verma(alg, Scalar::ratio(1, 16)).unwrap();
    let ops = FieldEngine::new(vv.clone(), w);
    let vops = FieldEngine::on_self(vv);
    let mut o = VerifyOptions::new(4, 2);
    o.span_weight = 3;
    assert!(verify_module_axioms(&*ops, &*vops, &o).passed());

    let s = vacuum(Algebra::affine_sl2(Scalar::one()));
    let e = FieldEngine::on_self(s);
    let mut o = VerifyOptions::new(3, 2);
    o.span_weight = 2;
    assert!(verify_voa_axioms(&*e, &o).passed());
}

#[test]
fn corrupted_bracket_fails_verification() {
    let mut t = voa_core::algebra::LieTable::sl2();
    t.set_bracket(0, 1, vec![(2, voa_core::rational::Q::from_int(2))]);
    let alg = Algebra::affine_with_table(voa_core::algebra::AlgebraKind::AffineSl2, t, Scalar::one());
    let v = vacuum(alg);
    let e = FieldEngine::on_self(v);
    let mut o = VerifyOptions::new(3, 2);
    o.span_weight = 2;
    let r = verify_voa_axioms(&*e, &o);
    assert!(!r.passed());
    assert!(r.axioms.iter().any(|a| a.counterexample.is_some()));
}

#[test]
fn skew_symmetry_up_to_weight_four() {
    let v = vacuum(Algebra::virasoro(Scalar::param('c')));
    let e = FieldEngine::on_self(v);
    let r = verify_skew_symmetry(&*e, 6, 4, voa_core::exec::Execution::Sequential);
    assert!(r.passed(), "{r:?}");
}
