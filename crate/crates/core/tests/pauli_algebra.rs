use proptest::prelude::*;
use qecmetro::pauli::{
    build_block_mapper, conjugate_by_circuit, pauli_multiply, verify_scenario2_mapping, CliffordCircuit, CliffordGate,
    Letter, PauliString,
};

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::I), Just(Letter::X), Just(Letter::Y), Just(Letter::Z)]
}

fn pauli(width: usize) -> impl Strategy<Value = PauliString> {
    (0u8..4, prop::collection::vec(letter(), width)).prop_map(|(phase, ls)| PauliString::new(phase, &ls))
}

fn hermitian_pauli(width: usize) -> impl Strategy<Value = PauliString> {
    (prop_oneof![Just(0u8), Just(2u8)], prop::collection::vec(letter(), width))
        .prop_map(|(phase, ls)| PauliString::new(phase, &ls))
}

fn gate(width: usize) -> BoxedStrategy<CliffordGate> {
    let single = (0..width).prop_map(CliffordGate::Hadamard);
    if width == 1 {
        return single.boxed();
    }
    let pair = (0..width, 0..width - 1).prop_map(|(a, b)| (a, if b >= a { b + 1 } else { b }));
    prop_oneof![
        single,
        pair.clone().prop_map(|(a, b)| CliffordGate::ControlledPhase(a, b)),
        pair.prop_map(|(a, b)| CliffordGate::ControlledX(a, b)),
    ]
    .boxed()
}

fn circuit(width: usize, max_gates: usize) -> impl Strategy<Value = CliffordCircuit> {
    prop::collection::vec(gate(width), 0..max_gates)
        .prop_map(move |gates| CliffordCircuit::from_gates(width, gates).unwrap())
}

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

#[test]
fn product_examples() {
    assert_eq!(pauli_multiply(&ps("X"), &ps("Y")).unwrap(), ps("+iZ"));
    assert_eq!(pauli_multiply(&ps("X"), &ps("X")).unwrap(), ps("I"));
    assert_eq!(pauli_multiply(&ps("XZ"), &ps("ZZ")).unwrap(), ps("-iYI"));
    assert!(pauli_multiply(&ps("XZ"), &ps("Z")).is_err());
}

#[test]
fn conjugation_examples() {
    let cx = CliffordCircuit::from_gates(2, [CliffordGate::ControlledX(0, 1)]).unwrap();
    assert_eq!(conjugate_by_circuit(&ps("ZI"), &cx).unwrap(), ps("ZX"));
    assert_eq!(conjugate_by_circuit(&ps("XI"), &cx).unwrap(), ps("XI"));
    let empty = CliffordCircuit::new(3);
    assert_eq!(conjugate_by_circuit(&ps("-YZX"), &empty).unwrap(), ps("-YZX"));
    assert!(conjugate_by_circuit(&ps("YZ"), &empty).is_err());
}

#[test]
fn block_mapper_shapes() {
    assert!(build_block_mapper(1).unwrap().is_empty());
    let v3 = build_block_mapper(3).unwrap();
    assert_eq!(v3.gates(), &[CliffordGate::ControlledX(0, 1), CliffordGate::ControlledX(0, 2)]);
    let v5 = build_block_mapper(5).unwrap();
    assert_eq!(v5.gates().len(), 4);
    assert!(v5.gates().iter().enumerate().all(|(i, g)| *g == CliffordGate::ControlledX(0, i + 1)));
    assert!(build_block_mapper(0).is_err());
}

#[test]
fn mapping_identities() {
    for m in [1, 3, 5] {
        let r = verify_scenario2_mapping(m).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.hamiltonian_image.phase(), 0);
        assert!(r.dense_max_error.unwrap() <= 1e-12);
    }
    assert_eq!(verify_scenario2_mapping(3).unwrap().hamiltonian_image, ps("ZXX"));
}

#[test]
fn circuit_text_roundtrip() {
    let c = CliffordCircuit::parse(3, "# block mapper\nCX 1 2\nCX 1 3\nH 2\nCP 2 3\n").unwrap();
    assert_eq!(c.gates().len(), 4);
    let again = CliffordCircuit::parse(3, &c.to_string()).unwrap();
    assert_eq!(again, c);
    assert!(CliffordCircuit::parse(2, "CX 1 3").is_err());
    assert!(CliffordCircuit::parse(2, "CX 1 1").is_err());
    assert!(CliffordCircuit::parse(2, "T 1").is_err());
}

proptest! {
    #[test]
    fn inverse_gives_identity(p in pauli(5)) {
        let prod = p.multiply(&p.inverse()).unwrap();
        prop_assert_eq!(prod, PauliString::identity(5));
    }

    #[test]
    fn text_roundtrip(p in pauli(4)) {
        prop_assert_eq!(p.to_string().parse::<PauliString>().unwrap(), p);
    }

    #[test]
    fn conjugation_is_group_action(p in pauli(4), c1 in circuit(4, 6), c2 in circuit(4, 6)) {
        let seq = p.conjugate_by_circuit(&c1).unwrap().conjugate_by_circuit(&c2).unwrap();
        let joint = p.conjugate_by_circuit(&c1.then(&c2).unwrap()).unwrap();
        prop_assert_eq!(seq, joint);
    }

    #[test]
    fn inverse_circuit_recovers(p in pauli(4), c in circuit(4, 8)) {
        let back = p.conjugate_by_circuit(&c).unwrap().conjugate_by_circuit(&c.inverse()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn conjugation_preserves_hermiticity(p in hermitian_pauli(4), c in circuit(4, 8)) {
        let img = p.conjugate_by_circuit(&c).unwrap();
        prop_assert!(img.is_hermitian());
    }

    #[test]
    fn symbolic_matches_dense(
        (p, c) in (1usize..=6).prop_flat_map(|w| (pauli(w), circuit(w, 8)))
    ) {
        let u = c.to_dense();
        let dense = u.matmul(&p.to_dense()).matmul(&u.adjoint());
        let symbolic = p.conjugate_by_circuit(&c).unwrap().to_dense();
        prop_assert!(dense.max_abs_diff(&symbolic) <= 1e-12);
    }
}
