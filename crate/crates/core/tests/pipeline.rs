use std::io::Cursor;

use hypenet::analysis::{evaluate, rank_paths};
use hypenet::baselines::{DistClassifier, DistMethod, LogRegConfig, PathClassifier};
use hypenet::corpus::{index_corpus_with, parse_conllu, write_conllu, PairPathIndex, TermMatcher};
use hypenet::dataset::{
    attach_paths, filter_and_balance, read_pairs, split_lexical, split_random, write_pairs, Fractions, LabeledInstance,
    PositiveWhitelist,
};
use hypenet::exec::Exec;
use hypenet::features::build_feature_space_with;
use hypenet::network::{
    is_positive, loss_and_gradients, predict_all, train_with, BatchItem, Checkpoint, Dims, Mode, TrainConfig,
};
use hypenet::synth::{generate, SynthConfig};

fn small_corpus() -> SynthConfig {
    SynthConfig {
        categories: 6,
        hyponyms_per_category: 5,
        unrelated_terms: 20,
        negatives: 120,
        seed: 3,
        ..Default::default()
    }
}

fn instances(config: &SynthConfig) -> (hypenet::synth::SynthCorpus, PairPathIndex, Vec<LabeledInstance>) {
    let corpus = generate(config).unwrap();
    let matcher = TermMatcher::new(corpus.vocabulary.iter()).unwrap();
    let index = index_corpus_with(Exec::Sequential, &corpus.sentences, &matcher).unwrap();
    let wl = PositiveWhitelist::default();
    let records: Vec<_> = corpus.relations.iter().map(|r| (r.clone(), wl.contains(&r.resource, &r.relation))).collect();
    let inst = filter_and_balance(&records, &index, 4, config.seed).unwrap();
    (corpus, index, inst)
}

#[test]
fn files_round_trip_through_the_pipeline() {
    let config = small_corpus();
    let (corpus, index, inst) = instances(&config);

    // CoNLL-U out and back in gives the same index.
    let mut buf = Vec::new();
    write_conllu(&mut buf, &corpus.sentences).unwrap();
    let parsed = parse_conllu(Cursor::new(buf)).unwrap();
    assert_eq!(parsed.rejected, 0);
    assert_eq!(parsed.sentences, corpus.sentences);

    let mut tsv = Vec::new();
    index.write_tsv(&mut tsv).unwrap();
    let reread = PairPathIndex::read_tsv(Cursor::new(&tsv)).unwrap();
    assert_eq!(reread, index);

    // Pair files plus the index restore the instances.
    let mut pairs = Vec::new();
    write_pairs(&mut pairs, &inst).unwrap();
    let restored = attach_paths(&read_pairs(Cursor::new(pairs)).unwrap(), &reread);
    assert_eq!(restored, inst);
}

#[test]
fn parallel_and_sequential_agree() {
    let config = small_corpus();
    let (corpus, _, inst) = instances(&config);
    let matcher = TermMatcher::new(corpus.vocabulary.iter()).unwrap();
    assert_eq!(
        index_corpus_with(Exec::Sequential, &corpus.sentences, &matcher).unwrap(),
        index_corpus_with(Exec::Parallel, &corpus.sentences, &matcher).unwrap()
    );
    assert_eq!(
        build_feature_space_with(Exec::Sequential, &inst, true, 50).unwrap(),
        build_feature_space_with(Exec::Parallel, &inst, true, 50).unwrap()
    );

    let split = split_random(&inst, Fractions::default(), 1).unwrap();
    let cfg = TrainConfig {
        epochs: 2,
        dims: Dims { lemma: 8, pos: 2, dep: 2, dir: 1, hidden: 6, word: 8 },
        ..TrainConfig::path_only()
    };
    let seq = train_with(Exec::Sequential, &split, &cfg, None).unwrap();
    let par = train_with(Exec::Parallel, &split, &cfg, None).unwrap();
    assert_eq!(seq.params, par.params);

    let pairs: Vec<_> = split.train.iter().map(|i| seq.params.encode(&i.x, &i.y, &i.paths)).collect();
    let batch: Vec<BatchItem> = pairs
        .iter()
        .zip(&split.train)
        .enumerate()
        .map(|(k, (p, i))| BatchItem { pair: p, label: i.label, key: k as u64 })
        .collect();
    assert_eq!(
        loss_and_gradients(&seq.params, &batch, 0.5, 9, Exec::Sequential).unwrap(),
        loss_and_gradients(&seq.params, &batch, 0.5, 9, Exec::Parallel).unwrap()
    );
}

#[test]
fn checkpoint_predictions_survive_serialization() {
    let config = small_corpus();
    let (corpus, _, inst) = instances(&config);
    let split = split_random(&inst, Fractions::default(), 2).unwrap();
    let cfg = TrainConfig { epochs: 2, ..TrainConfig::integrated() };
    let out = train_with(Exec::Parallel, &split, &cfg, Some(&corpus.embeddings)).unwrap();
    assert_eq!(out.params.mode, Mode::Integrated);
    assert_eq!(out.params.word_dim(), corpus.embeddings.dim());

    let mut buf = Vec::new();
    Checkpoint::new(cfg.clone(), out.params.clone()).write(&mut buf).unwrap();
    let ck = Checkpoint::read(Cursor::new(buf)).unwrap();
    let encode = |p: &hypenet::network::NetworkParams| -> Vec<_> {
        split.test.iter().map(|i| p.encode(&i.x, &i.y, &i.paths)).collect()
    };
    assert_eq!(
        predict_all(&out.params, &encode(&out.params), Exec::Sequential),
        predict_all(&ck.params, &encode(&ck.params), Exec::Sequential)
    );
}

#[test]
fn baselines_and_network_learn_the_small_corpus() {
    let config = small_corpus();
    let (corpus, _, inst) = instances(&config);
    let split = split_random(&inst, Fractions { train: 0.6, test: 0.3, validation: 0.1 }, 4).unwrap();
    let gold: Vec<bool> = split.test.iter().map(|i| i.label).collect();

    let (snow, tuning) =
        PathClassifier::fit(Exec::Parallel, &split.train, &split.validation, true, 200, &LogRegConfig::default())
            .unwrap();
    let pred: Vec<bool> = split.test.iter().map(|i| snow.predict(i)).collect();
    let m = evaluate(&pred, &gold).unwrap();
    assert!(m.f1 > 0.8, "snow+gen {m:?} {tuning:?}");

    let (dist, _) = DistClassifier::fit(
        Exec::Parallel,
        &split.train,
        &split.validation,
        &corpus.embeddings,
        DistMethod::Concat,
        &LogRegConfig::default(),
    )
    .unwrap();
    let pred: Vec<bool> = split.test.iter().map(|i| dist.predict(&i.x, &i.y, &corpus.embeddings)).collect();
    assert_eq!(evaluate(&pred, &gold).unwrap().total(), gold.len());

    let out =
        train_with(Exec::Parallel, &split, &TrainConfig { epochs: 25, ..TrainConfig::path_only() }, None).unwrap();
    let pairs: Vec<_> = split.test.iter().map(|i| out.params.encode(&i.x, &i.y, &i.paths)).collect();
    let pred: Vec<bool> = predict_all(&out.params, &pairs, Exec::Parallel).into_iter().map(is_positive).collect();
    let m = evaluate(&pred, &gold).unwrap();
    assert!(m.f1 > 0.8, "hypenet {m:?}");
    assert_eq!(out.history.len(), 25);
    assert!((1..=25).contains(&out.best_epoch));

    let all = inst.iter().flat_map(|i| i.paths.keys());
    let top = rank_paths(&out.params, all, 5, Exec::Parallel).unwrap();
    assert_eq!(top.len(), 5);
    assert!(top.windows(2).all(|w| w[0].score >= w[1].score));
}

#[test]
fn lexical_split_keeps_terms_apart() {
    let (_, _, inst) = instances(&small_corpus());
    for seed in 0..5 {
        let s = split_lexical(&inst, Fractions { train: 0.5, test: 0.3, validation: 0.2 }, seed).unwrap();
        let terms = |set: &[LabeledInstance]| -> std::collections::BTreeSet<String> {
            set.iter().flat_map(|i| [i.x.clone(), i.y.clone()]).collect()
        };
        let (a, b, c) = (terms(&s.train), terms(&s.test), terms(&s.validation));
        assert!(a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c));
        assert_eq!(s.train.len() + s.test.len() + s.validation.len() + s.discarded, inst.len());
    }
}
