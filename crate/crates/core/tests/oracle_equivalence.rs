//! Production blockers against the brute-force reference on random corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use erblock::ac::{ac_pairs, AcMode};
use erblock::dynamic::dyn_pairs;
use erblock::oracle::{brute_force_oracle, BlockerSpec};
use erblock::testkit::{random_configs, random_corpus, random_schema};
use erblock::NormalizationConfig;

#[test]
fn hundred_random_corpora_match_the_oracle() {
    let schema = random_schema();
    let norm = NormalizationConfig::for_schema(&schema);
    let mut mismatches = Vec::new();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(10..=200);
        let sparsity = rng.gen_range(0.2..=0.8);
        let profiles = random_corpus(&mut rng, n, sparsity);
        let (ac, dy) = random_configs(&mut rng);

        let got = ac_pairs(&profiles, &schema, &ac, &norm).unwrap();
        let want = brute_force_oracle(&profiles, &schema, &BlockerSpec::Ac(ac.clone()), &norm).unwrap();
        if got != want {
            mismatches.push(format!("seed {seed}: AC {:?} T={} differs", ac.mode, ac.purge_threshold));
        }
        let (got, _) = dyn_pairs(&profiles, &schema, &dy, &norm).unwrap();
        let want = brute_force_oracle(&profiles, &schema, &BlockerSpec::Dynamic(dy.clone()), &norm).unwrap();
        if got != want {
            mismatches.push(format!("seed {seed}: Dynamic T={} depth={} differs", dy.threshold, dy.max_depth));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn both_ac_modes_match_the_oracle_on_dense_corpora() {
    let schema = random_schema();
    let norm = NormalizationConfig::for_schema(&schema);
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let profiles = random_corpus(&mut rng, 120, 0.2);
        let (mut ac, _) = random_configs(&mut rng);
        ac.attributes_used = schema.attributes().to_vec();
        for mode in [AcMode::SchemaAware, AcMode::SchemaAgnostic] {
            let cfg = ac.clone().with_mode(mode);
            let got = ac_pairs(&profiles, &schema, &cfg, &norm).unwrap();
            let want = brute_force_oracle(&profiles, &schema, &BlockerSpec::Ac(cfg), &norm).unwrap();
            assert_eq!(got, want, "seed {seed} mode {mode:?}");
        }
    }
}
