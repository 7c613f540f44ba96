use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::blocks::is_symplectic;

type Q = Rational;

fn q(p: i64, d: i64) -> Q {
    rat(p, d)
}

/// Integer symplectic matrix: alternating upper and lower shears by small
/// symmetric integer matrices.
fn integer_symplectic(m: usize, steps: usize, rng: &mut ChaCha8Rng) -> Matrix<Q> {
    let mut s = Matrix::identity(2 * m);
    for step in 0..steps {
        let mut x = Matrix::<Q>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = q(rng.random_range(-1..=1), 1);
                x[(i, j)] = v.clone();
                x[(j, i)] = v;
            }
        }
        let mut e = Matrix::identity(2 * m);
        if step % 2 == 0 {
            e.set_block(0, m, &x);
        } else {
            e.set_block(m, 0, &x);
        }
        s = &s * &e;
    }
    s
}

fn disguise(a: &Matrix<Q>, seed: u64) -> (Matrix<Q>, Matrix<Q>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = integer_symplectic(a.rows() / 2, 4, &mut rng);
    assert!(is_symplectic(&s).unwrap());
    (a.congruent(&s).unwrap(), s)
}

fn assemble(summands: &[Summand<Q>]) -> Matrix<Q> {
    let blocks: Vec<Matrix<Q>> = summands.iter().map(Summand::symmetric_block).collect();
    Matrix::block_direct_sum(&blocks).unwrap()
}

fn sorted(mut v: Vec<Summand<Q>>) -> Vec<Summand<Q>> {
    v.sort_by(Summand::normal_cmp);
    v
}

fn round_trip(summands: Vec<Summand<Q>>, seed: u64) {
    let a = assemble(&summands);
    let (disguised, _) = disguise(&a, seed);
    let dec = canonicalize_real(&disguised).unwrap();
    assert_eq!(dec.summands, sorted(summands.clone()), "input {summands:?}");
    if let Some(s) = &dec.certificate {
        assert!(is_symplectic(s).unwrap());
        assert_eq!(disguised.congruent(s).unwrap(), dec.symmetric_form());
        assert_eq!(dec.residual, Some(0.0));
    }
}

#[test]
fn signed_p_blocks_are_recognised() {
    for n in 1..=3 {
        for sign in [1, -1] {
            round_trip(
                vec![Summand::P { n, sign }],
                10 * n as u64 + (sign > 0) as u64,
            );
        }
    }
}

#[test]
fn signed_q_blocks_are_recognised() {
    for n in 1..=4 {
        for sign in [1, -1] {
            for c in [q(1, 1), q(3, 2)] {
                round_trip(
                    vec![Summand::Q { n, sign, c }],
                    7 * n as u64 + (sign > 0) as u64,
                );
            }
        }
    }
}

#[test]
fn hyperbolic_summands_are_recognised() {
    round_trip(
        vec![Summand::Hyperbolic {
            n: 1,
            phi: Phi::Jordan { a: q(2, 1) },
        }],
        1,
    );
    round_trip(
        vec![Summand::Hyperbolic {
            n: 2,
            phi: Phi::Jordan { a: q(1, 2) },
        }],
        2,
    );
    round_trip(
        vec![Summand::Hyperbolic {
            n: 1,
            phi: Phi::Jordan { a: q(0, 1) },
        }],
        3,
    );
    round_trip(
        vec![Summand::Hyperbolic {
            n: 2,
            phi: Phi::Realified {
                a: q(1, 1),
                b: q(2, 1),
            },
        }],
        4,
    );
    round_trip(
        vec![Summand::Hyperbolic {
            n: 4,
            phi: Phi::Realified {
                a: q(1, 1),
                b: q(1, 1),
            },
        }],
        5,
    );
}

#[test]
fn mixed_sums_are_recognised() {
    round_trip(
        vec![
            Summand::P { n: 1, sign: 1 },
            Summand::P { n: 1, sign: -1 },
            Summand::Q {
                n: 1,
                sign: -1,
                c: q(2, 1),
            },
            Summand::Hyperbolic {
                n: 1,
                phi: Phi::Jordan { a: q(3, 1) },
            },
        ],
        99,
    );
    round_trip(
        vec![
            Summand::P { n: 2, sign: -1 },
            Summand::P { n: 1, sign: 1 },
            Summand::Q {
                n: 2,
                sign: 1,
                c: q(1, 1),
            },
            Summand::Q {
                n: 1,
                sign: -1,
                c: q(1, 1),
            },
        ],
        5,
    );
    round_trip(
        vec![
            Summand::Q {
                n: 1,
                sign: 1,
                c: q(1, 1),
            },
            Summand::Q {
                n: 1,
                sign: -1,
                c: q(1, 1),
            },
        ],
        6,
    );
}

#[test]
fn semisimple_inputs_get_exact_certificates() {
    let summands = vec![
        Summand::Q {
            n: 1,
            sign: -1,
            c: q(1, 1),
        },
        Summand::Q {
            n: 1,
            sign: 1,
            c: q(9, 4),
        },
        Summand::Hyperbolic {
            n: 1,
            phi: Phi::Jordan { a: q(5, 1) },
        },
        Summand::Hyperbolic {
            n: 2,
            phi: Phi::Realified {
                a: q(1, 1),
                b: q(1, 1),
            },
        },
    ];
    let (a, _) = disguise(&assemble(&summands), 17);
    let dec = canonicalize_real(&a).unwrap();
    let s = dec.certificate.as_ref().expect("certificate");
    assert_eq!(a.congruent(s).unwrap(), dec.symmetric_form());
    assert_eq!(Matrix::omega(5).congruent(s).unwrap(), Matrix::omega(5));
}

#[test]
fn fractional_parameters_are_kept() {
    let (a, _) = disguise(
        &assemble(&[Summand::Q {
            n: 1,
            sign: 1,
            c: q(1, 2),
        }]),
        3,
    );
    let dec = canonicalize_real(&a).unwrap();
    assert_eq!(
        dec.summands,
        vec![Summand::Q {
            n: 1,
            sign: 1,
            c: q(1, 2)
        }]
    );
}

#[test]
fn float_backend_matches_exact() {
    let summands = vec![
        Summand::P { n: 1, sign: 1 },
        Summand::Q {
            n: 2,
            sign: -1,
            c: q(1, 1),
        },
        Summand::Hyperbolic {
            n: 1,
            phi: Phi::Jordan { a: q(2, 1) },
        },
    ];
    let (a, _) = disguise(&assemble(&summands), 8);
    let exact = canonicalize_real(&a).unwrap();
    let af = a.map(RealScalar::to_f64);
    let float = canonicalize_real(&af).unwrap();
    assert_eq!(float.summands.len(), exact.summands.len());
    for (x, y) in float.summands.iter().zip(&exact.summands) {
        assert_eq!(
            (x.type_name(), x.half(), x.sign()),
            (y.type_name(), y.half(), y.sign())
        );
        for ((_, p), (_, r)) in x.params().iter().zip(y.params()) {
            assert!((p - r.to_f64()).abs() < 1e-6, "{x:?} vs {y:?}");
        }
    }
}

#[test]
fn float_certificate_for_semisimple_input() {
    let summands = vec![
        Summand::Q {
            n: 1,
            sign: -1,
            c: q(2, 1),
        },
        Summand::Q {
            n: 1,
            sign: 1,
            c: q(1, 2),
        },
        Summand::Hyperbolic {
            n: 2,
            phi: Phi::Realified {
                a: q(1, 1),
                b: q(3, 1),
            },
        },
    ];
    let (a, _) = disguise(&assemble(&summands), 21);
    let dec = canonicalize_real(&a.map(RealScalar::to_f64)).unwrap();
    assert!(
        dec.residual.expect("certificate") < 1e-9,
        "{:?}",
        dec.residual
    );
}

#[test]
fn complex_list_forgets_signs() {
    let base = assemble(&[
        Summand::P { n: 1, sign: -1 },
        Summand::Q {
            n: 1,
            sign: 1,
            c: q(2, 1),
        },
    ]);
    let dec = canonicalize_complex(&disguise(&base, 4).0).unwrap();
    assert_eq!(dec.list, SummandList::Complex);
    assert_eq!(dec.summands.len(), 2);
    assert_eq!(dec.summands[1], Summand::P { n: 1, sign: 1 });
    let Summand::Hyperbolic {
        n: 1,
        phi: Phi::Jordan { a },
    } = &dec.summands[0]
    else {
        panic!("{:?}", dec.summands)
    };
    assert_eq!(a.clone() * a.clone(), Gaussian::from_rational(&q(-4, 1)));
    assert!(dec.certificate.is_none());

    let base = assemble(&[
        Summand::Q {
            n: 1,
            sign: -1,
            c: q(1, 1),
        },
        Summand::Q {
            n: 1,
            sign: 1,
            c: q(1, 1),
        },
    ]);
    let (input, _) = disguise(&base, 9);
    let dec = canonicalize_complex(&input).unwrap();
    assert_eq!(dec.summands[0], dec.summands[1]);
    let s = dec.certificate.as_ref().expect("certificate");
    assert_eq!(
        lift_matrix(&input).congruent(s).unwrap(),
        dec.symmetric_form()
    );
    assert_eq!(dec.residual, Some(0.0));
}

#[test]
fn negation_flips_signs() {
    let summands = vec![
        Summand::P { n: 2, sign: 1 },
        Summand::Q {
            n: 3,
            sign: -1,
            c: q(1, 1),
        },
    ];
    let (a, _) = disguise(&assemble(&summands), 12);
    let plus = canonicalize_real(&a).unwrap();
    let minus = canonicalize_real(&-a).unwrap();
    assert!(plus.negated().same_summands(&minus, 0.0));
    assert!(!plus.same_summands(&minus, 0.0));
}

#[test]
fn pairs_with_general_skew_form() {
    let b: Matrix<Q> = Matrix::from_i64_rows(&[
        &[0, 3, -1, 2],
        &[-3, 0, 5, 1],
        &[1, -5, 0, 4],
        &[-2, -1, -4, 0],
    ]);
    let summands = vec![
        Summand::Q {
            n: 1,
            sign: -1,
            c: q(1, 1),
        },
        Summand::Hyperbolic {
            n: 1,
            phi: Phi::Jordan { a: q(2, 1) },
        },
    ];
    let t_inv = reduce_skew_to_omega(&b).unwrap().inverse().unwrap();
    let a = assemble(&summands).congruent(&t_inv).unwrap();
    let pair = MatrixPair::new(a.clone(), b.clone()).unwrap();
    let dec = canonicalize_pair(&pair).unwrap();
    assert_eq!(dec.summands, sorted(summands));
    let s = dec.certificate.as_ref().expect("certificate");
    assert_eq!(a.congruent(s).unwrap(), dec.symmetric_form());
    assert_eq!(b.congruent(s).unwrap(), Matrix::omega(2));
    let (moved, _) = disguise(&assemble(&[Summand::P { n: 2, sign: 1 }]), 1);
    let other = MatrixPair::new(moved, Matrix::omega(2)).unwrap();
    let same = MatrixPair::with_omega(Summand::P { n: 2, sign: 1 }.symmetric_block()).unwrap();
    assert!(congruent_pairs(&same, &other).unwrap());
}

#[test]
fn congruence_decisions() {
    let plus = MatrixPair::with_omega(p_block_q(1, 1)).unwrap();
    let minus = MatrixPair::with_omega(p_block_q(1, -1)).unwrap();
    assert!(!congruent_pairs(&plus, &minus).unwrap());
    let (moved, _) = disguise(plus.a(), 2);
    assert!(congruent_pairs(&plus, &MatrixPair::with_omega(moved).unwrap()).unwrap());
}

fn p_block_q(n: usize, sign: i8) -> Matrix<Q> {
    Summand::<Q>::P { n, sign }.symmetric_block()
}

#[test]
fn hamiltonian_canonical_forms() {
    let summands = vec![
        Summand::P { n: 2, sign: -1 },
        Summand::Q {
            n: 1,
            sign: 1,
            c: q(1, 1),
        },
        Summand::Hyperbolic {
            n: 2,
            phi: Phi::Jordan { a: q(1, 1) },
        },
        Summand::Hyperbolic {
            n: 2,
            phi: Phi::Realified {
                a: q(1, 1),
                b: q(2, 1),
            },
        },
    ];
    let (a, _) = disguise(&assemble(&summands), 30);
    let h = hamiltonian_of_form(&a).unwrap();
    let dec = canonicalize_hamiltonian(&h).unwrap();
    assert_eq!(dec.form, Form::Hamiltonian);
    assert_eq!(dec.summands, sorted(summands));
    assert!(is_hamiltonian(&dec.canonical_matrix()).unwrap());

    let semisimple = vec![
        Summand::Q {
            n: 1,
            sign: 1,
            c: q(1, 2),
        },
        Summand::Q {
            n: 1,
            sign: -1,
            c: q(2, 1),
        },
        Summand::Hyperbolic {
            n: 1,
            phi: Phi::Jordan { a: q(3, 1) },
        },
        Summand::Hyperbolic {
            n: 2,
            phi: Phi::Realified {
                a: q(1, 1),
                b: q(1, 1),
            },
        },
    ];
    let (a, _) = disguise(&assemble(&semisimple), 31);
    let h = hamiltonian_of_form(&a).unwrap();
    let dec = canonicalize_hamiltonian(&h).unwrap();
    let s = dec.certificate.as_ref().expect("certificate");
    assert!(is_symplectic(s).unwrap());
    assert_eq!(&(&s.inverse().unwrap() * &h) * s, dec.hamiltonian_form());
    assert_eq!(dec.residual, Some(0.0));
}

#[test]
fn symplectic_similarity_decisions() {
    let h1 = hamiltonian_of_form(&p_block_q(2, 1)).unwrap();
    let h2 = hamiltonian_of_form(&p_block_q(2, -1)).unwrap();
    assert!(!symplectically_similar(&h1, &h2).unwrap());
    assert!(crate::spectra::is_similar(&h1, &h2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = integer_symplectic(2, 5, &mut rng);
    let moved = &(&s.inverse().unwrap() * &h1) * &s;
    assert!(symplectically_similar(&h1, &moved).unwrap());
    assert!(matches!(
        canonicalize_hamiltonian(&Matrix::<Q>::identity(2)),
        Err(Error::NotHamiltonian)
    ));
}

#[test]
fn sign_characteristic_reports_sizes_and_signs() {
    let summands = vec![
        Summand::P { n: 1, sign: -1 },
        Summand::P { n: 2, sign: 1 },
        Summand::Q {
            n: 2,
            sign: -1,
            c: q(1, 1),
        },
        Summand::Q {
            n: 1,
            sign: 1,
            c: q(3, 1),
        },
    ];
    let (a, _) = disguise(&assemble(&summands), 44);
    let h = hamiltonian_of_form(&a).unwrap();
    assert_eq!(
        sign_characteristic(&h, &a, &SignClass::Zero).unwrap(),
        vec![(2, -1), (4, 1)]
    );
    assert_eq!(
        sign_characteristic(&h, &a, &SignClass::Imaginary(q(1, 1))).unwrap(),
        vec![(2, -1)]
    );
    assert_eq!(
        sign_characteristic(&h, &a, &SignClass::Imaginary(q(3, 1))).unwrap(),
        vec![(1, 1)]
    );
    assert!(sign_characteristic(&a, &a, &SignClass::Zero).is_err());
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(
        canonicalize_real(&Matrix::<Q>::identity(3)),
        Err(Error::OddSize(3))
    ));
    let nonsym: Matrix<Q> = Matrix::from_i64_rows(&[&[1, 2], &[0, 1]]);
    assert!(canonicalize_real(&nonsym).is_err());
}
