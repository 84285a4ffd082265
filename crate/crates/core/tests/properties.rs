use num_bigint::BigInt;
use proptest::prelude::*;

use z2tower::arith::{legendre_i64, primes_up_to, OddPrime, SymbolValue};
use z2tower::genus::{ambiguous_order, norm_index_over_q, splitting_in_qn, GenusRankInput};
use z2tower::hilbert::{hilbert_places_q, hilbert_symbol_q_int, symbol_table, PlaceOfQ};
use z2tower::quadform::{compose, BinaryQuadForm, ClassGroup, QuadDiscriminant, DEFAULT_DISC_BOUND};
use z2tower::zsqrt2::{totally_positive_associate, Zsqrt2Elem};

fn nonzero(range: i64) -> impl Strategy<Value = i64> {
    (-range..=range).prop_filter("nonzero", |x| *x != 0)
}

fn elem(range: i64) -> impl Strategy<Value = Zsqrt2Elem> {
    (-range..=range, -range..=range)
        .prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0)
        .prop_map(|(a, b)| Zsqrt2Elem::new(a, b))
}

fn place() -> impl Strategy<Value = PlaceOfQ> {
    prop_oneof![
        Just(PlaceOfQ::Real),
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]).prop_map(PlaceOfQ::Prime),
    ]
}

fn h(a: i64, b: i64, v: PlaceOfQ) -> SymbolValue {
    hilbert_symbol_q_int(&BigInt::from(a), &BigInt::from(b), v).unwrap()
}

proptest! {
    #[test]
    fn euclidean_division(x in elem(10_000), y in elem(300)) {
        let (q, r) = x.divmod(&y).unwrap();
        prop_assert_eq!(&(&q * &y) + &r, x);
        prop_assert!(r.norm().magnitude() < y.norm().magnitude());
    }

    #[test]
    fn hilbert_q_symmetric_and_bimultiplicative(a in nonzero(500), b in nonzero(500), c in nonzero(500), v in place()) {
        prop_assert_eq!(h(a, b, v), h(b, a, v));
        prop_assert_eq!(h(a, b * c, v), h(a, b, v) * h(a, c, v));
    }

    #[test]
    fn hilbert_q_product_formula(a in nonzero(100_000), b in nonzero(100_000)) {
        let places = hilbert_places_q(&BigInt::from(a), &BigInt::from(b)).unwrap();
        let product = places.iter().fold(SymbolValue::PlusOne, |acc, (_, s)| acc * *s);
        prop_assert_eq!(product, SymbolValue::PlusOne);
    }

    #[test]
    fn hilbert_q1_symmetric_and_bimultiplicative(a in elem(60), b in elem(60), c in elem(60)) {
        let ab = symbol_table(&a, &b).unwrap();
        let ba = symbol_table(&b, &a).unwrap();
        let ac = symbol_table(&a, &c).unwrap();
        let abc = symbol_table(&a, &(&b * &c)).unwrap();
        for t in [&ab, &ba, &ac, &abc] {
            prop_assert_eq!(t.product, SymbolValue::PlusOne);
            for e in &t.entries {
                let v = &e.place;
                prop_assert_eq!(ab.value_at(v), ba.value_at(v));
                prop_assert_eq!(abc.value_at(v), ab.value_at(v) * ac.value_at(v));
            }
        }
    }

    #[test]
    fn quadratic_reciprocity(i in 1usize..300, j in 1usize..300) {
        let primes = primes_up_to(2000);
        let (p, q) = (primes[i], primes[j]);
        prop_assume!(p != q);
        let pq = legendre_i64(p as i64, OddPrime::new(q).unwrap()) * legendre_i64(q as i64, OddPrime::new(p).unwrap());
        let sign = if p % 4 == 3 && q % 4 == 3 { SymbolValue::MinusOne } else { SymbolValue::PlusOne };
        prop_assert_eq!(pq, sign);
    }

    #[test]
    fn totally_positive_associate_is_canonical(x in elem(200), k in -4i32..=4, neg in any::<bool>()) {
        prop_assume!(x.norm() > BigInt::from(0));
        let eps = Zsqrt2Elem::new(3, 2);
        let mut y = if k >= 0 { &x * &eps.pow(k as u32) } else { &x * &eps.conjugate().pow((-k) as u32) };
        if neg {
            y = -y;
        }
        let t = totally_positive_associate(&x).unwrap();
        prop_assert!(t.is_totally_positive());
        prop_assert_eq!(totally_positive_associate(&y).unwrap(), t);
    }

    #[test]
    fn composition_respects_equivalence(d in 5u64..5000, i in 0usize..64, j in 0usize..64, shift in -20i64..20) {
        let Ok(disc) = QuadDiscriminant::new(d) else { return Ok(()) };
        let cg = ClassGroup::compute(&disc, DEFAULT_DISC_BOUND).unwrap();
        let reps = cg.class_representatives();
        let f = &reps[i % reps.len()];
        let g = &reps[j % reps.len()];
        // (a, b, c) ~ (a, b + 2at, at^2 + bt + c)
        let t = BigInt::from(shift);
        let f2 = BinaryQuadForm::new(f.a.clone(), &f.b + BigInt::from(2) * &f.a * &t, &f.a * &t * &t + &f.b * &t + &f.c);
        let lhs = cg.class_of(&compose(f, g).unwrap()).unwrap();
        let rhs = cg.class_of(&compose(&f2, g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn splitting_number_at_most_doubles(i in 1usize..500, n in 0u32..4) {
        let p = primes_up_to(4000)[i];
        let g0 = splitting_in_qn(p, n).unwrap().g;
        let g1 = splitting_in_qn(p, n + 1).unwrap().g;
        prop_assert!(g1 == g0 || g1 == 2 * g0);
    }
}

#[test]
fn minus_one_not_a_norm_with_prime_three_mod_four() {
    for d in 2i64..10_000 {
        let Ok(true) = z2tower::arith::is_squarefree(d) else { continue };
        let mut n = d;
        let mut has_three = false;
        let mut f = 2;
        while f * f <= n {
            if n % f == 0 {
                has_three |= f % 4 == 3;
                n /= f;
            } else {
                f += 1;
            }
        }
        has_three |= n % 4 == 3;
        if has_three {
            assert_eq!(norm_index_over_q(d).unwrap(), 1, "d = {d}");
        }
    }
}

#[test]
fn ambiguous_classes_match_two_ranks() {
    for d in 5u64..5000 {
        let Ok(disc) = QuadDiscriminant::new(d) else { continue };
        let cg = ClassGroup::compute(&disc, DEFAULT_DISC_BOUND).unwrap();
        let t = disc.ramified_primes().len() as u32;
        let narrow = ambiguous_order(GenusRankInput { t, unit_norm_index_log: 0, base_class_order: 1 }).unwrap();
        assert_eq!(1u64 << cg.narrow_structure().two_rank(), narrow, "narrow, D = {d}");
        let e = norm_index_over_q(disc.radicand() as i64).unwrap();
        let wide = ambiguous_order(GenusRankInput { t, unit_norm_index_log: e, base_class_order: 1 }).unwrap();
        assert_eq!(1u64 << cg.wide_structure().two_rank(), wide, "wide, D = {d}");
    }
}
