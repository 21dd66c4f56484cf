//! Contraction cost of dynamic fermion moments: the subset-transfer pass
//! against the naive placement sum, plus a full end-pair density matrix.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use endspin::correlator::{dynamic_moment_naive, dynamic_moment_transfer, FermionFactor, FermionWord};
use endspin::lattice::{ChainSpec, ProductStateSpec};
use endspin::propagator::Propagator;
use endspin::rdm::rdm_product;

fn quartic_word(n: usize) -> FermionWord {
    FermionWord::new(
        vec![
            FermionFactor::evolved(1, true),
            FermionFactor::evolved(1, false),
            FermionFactor::evolved(n, true),
            FermionFactor::evolved(n, false),
        ],
        false,
    )
    .unwrap()
}

fn bench_moments(c: &mut Criterion) {
    let small = 12;
    let spec_small = ProductStateSpec::neel(small).unwrap();
    let prop_small =
        Propagator::analytic(&ChainSpec::new(small, 1.0).unwrap(), 2.0).unwrap();
    let word_small = quartic_word(small);

    c.bench_function("naive_quartic_n12", |b| {
        b.iter(|| {
            dynamic_moment_naive(black_box(&word_small), &spec_small, &prop_small).unwrap()
        })
    });
    c.bench_function("transfer_quartic_n12", |b| {
        b.iter(|| {
            dynamic_moment_transfer(black_box(&word_small), &spec_small, &prop_small).unwrap()
        })
    });

    let large = 50;
    let spec_large = ProductStateSpec::neel(large).unwrap();
    let prop_large =
        Propagator::analytic(&ChainSpec::new(large, 1.0).unwrap(), 6.25).unwrap();
    let word_large = quartic_word(large);

    c.bench_function("transfer_quartic_n50", |b| {
        b.iter(|| {
            dynamic_moment_transfer(black_box(&word_large), &spec_large, &prop_large).unwrap()
        })
    });
    c.bench_function("rdm_neel_n50", |b| {
        b.iter(|| rdm_product(black_box(&spec_large), &prop_large).unwrap())
    });
}

criterion_group!(benches, bench_moments);
criterion_main!(benches);
