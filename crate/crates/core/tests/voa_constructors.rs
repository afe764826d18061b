use std::sync::Arc;

use voa_core::algebra::{Algebra, AlgebraKind, LieTable};
use voa_core::field::FieldEngine;
use voa_core::module::{basis, format_vec, parse_vector, vir_vec, GradedModule, PbwModule};
use voa_core::oracle::radical_dims;
use voa_core::quotient::{quotient_dims, radical_defects, simple_quotient};
use voa_core::scalar::Scalar;
use voa_core::verify::{check_sugawara_commutator, weight1_lie_structure};

fn vacuum(alg: Algebra) -> Arc<PbwModule> {
    PbwModule::vacuum(Arc::new(alg))
}

#[test]
fn virasoro_actions() {
    let v = vacuum(Algebra::virasoro(Scalar::param('c')));
    let c = parse_vector(&*v, "L[-2]").unwrap();
    assert_eq!(format_vec(&*v, &vir_vec(&*v, 2, &c)), "1/2*c*vac");
    assert!(vir_vec(&*v, 1, &c).is_zero());
}

#[test]
fn affine_actions() {
    let h = vacuum(Algebra::heisenberg(1, Scalar::param('l')));
    let x = parse_vector(&*h, "X[-1]").unwrap();
    let g = h.algebra().gen_index("X").unwrap();
    assert_eq!(format_vec(&*h, &voa_core::module::act_vec(&*h, g, 1, &x)), "l*vac");

    let s = vacuum(Algebra::affine_sl2(Scalar::one()));
    let f = parse_vector(&*s, "f[-1]").unwrap();
    let e = s.algebra().gen_index("e").unwrap();
    assert_eq!(format_vec(&*s, &voa_core::module::act_vec(&*s, e, 1, &f)), "vac");
}

#[test]
fn sugawara_examples() {
    let s = vacuum(Algebra::affine_sl2(Scalar::one()));
    for b in basis(&*s, 1) {
        assert_eq!(*s.virasoro(0, b), voa_core::module::unit(b));
    }
    let c = vir_vec(&*s, -2, &voa_core::module::unit(voa_core::module::Bid::TOP));
    assert_eq!(format_vec(&*s, &vir_vec(&*s, 2, &c)), "1/2*vac");
    assert!(check_sugawara_commutator(&*s, 4, 2).passed());
}

#[test]
fn ising_quotient_dimensions() {
    let alg = Algebra::virasoro(Scalar::ratio(1, 2));
    let q = simple_quotient(vacuum(alg.clone()), 6).unwrap();
    assert!(radical_defects(&q, 6).is_empty());
    let fixture: serde_json::Value = serde_json::from_str(include_str!("../fixtures/oracle_regression.json")).unwrap();
    let want: Vec<usize> = serde_json::from_value(fixture["result"]["virasoro_c=1/2"]["quotient_dims"].clone()).unwrap();
    assert_eq!(quotient_dims(&q, 6), want);
    let rad = radical_dims(&alg, 6);
    let full = voa_core::module::dims(&*vacuum(alg), 6);
    assert_eq!(full.iter().zip(&rad).map(|(a, b)| a - b).collect::<Vec<_>>(), want);
}

#[test]
fn generic_central_charge_is_irreducible() {
    let q = simple_quotient(vacuum(Algebra::virasoro(Scalar::ratio(7, 3))), 4).unwrap();
    assert_eq!(q.radical_dims(4), vec![0; 5]);
}

#[test]
fn weight_one_structures() {
    let h = vacuum(Algebra::heisenberg(1, Scalar::param('l')));
    let w = weight1_lie_structure(&*FieldEngine::on_self(h)).unwrap();
    assert_eq!(w.form, vec![vec![Scalar::param('l')]]);
    assert!(w.bracket[0][0].iter().all(Scalar::is_zero));
    assert!(w.defects.is_empty());

    let s = vacuum(Algebra::affine_sl2(Scalar::param('l')));
    let w = weight1_lie_structure(&*FieldEngine::on_self(s.clone())).unwrap();
    assert!(w.defects.is_empty());
    let table = LieTable::sl2();
    let pos = |name: &str| w.labels.iter().position(|x| x == &format!("{name}[-1]")).unwrap();
    for a in ["e", "f", "h"] {
        for b in ["e", "f", "h"] {
            let mut want = vec![Scalar::zero(); 3];
            for (g, k) in &table.bracket[table.index(a).unwrap() as usize][table.index(b).unwrap() as usize] {
                want[pos(&table.names[*g as usize])] = Scalar::Rat(k.clone());
            }
            assert_eq!(w.bracket[pos(a)][pos(b)], want, "[{a}, {b}]");
        }
    }

    let v = vacuum(Algebra::virasoro(Scalar::param('c')));
    let w = weight1_lie_structure(&*FieldEngine::on_self(v)).unwrap();
    assert!(w.labels.is_empty());
}

#[test]
fn corrupted_table_is_reported() {
    let mut t = LieTable::sl2();
    t.set_bracket(0, 1, vec![(2, voa_core::rational::Q::from_int(2))]);
    assert!(!t.structure_defects().is_empty());
    let alg = Algebra::affine_with_table(AlgebraKind::AffineSl2, t, Scalar::one());
    let v = vacuum(alg);
    assert!(v.dim(1) == 3);
}
