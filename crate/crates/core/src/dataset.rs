//! Distant-supervision dataset construction and train/test/validation splits.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{PairPathIndex, PathCounts};
use crate::{tsv, Error, Result};

/// A relation triple from a knowledge resource.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub x: String,
    pub y: String,
    pub relation: String,
    pub resource: String,
}

/// `(resource, relation)` combinations that count as hypernymy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositiveWhitelist(BTreeSet<(String, String)>);

impl PositiveWhitelist {
    pub fn new<I, A, B>(entries: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        PositiveWhitelist(entries.into_iter().map(|(a, b)| (a.into(), b.into())).collect())
    }

    pub fn contains(&self, resource: &str, relation: &str) -> bool {
        self.0.contains(&(resource.to_owned(), relation.to_owned()))
    }
}

impl Default for PositiveWhitelist {
    fn default() -> Self {
        PositiveWhitelist::new([
            ("wordnet", "instance hypernym"),
            ("wordnet", "hypernym"),
            ("dbpedia", "type"),
            ("wikidata", "subclass of"),
            ("wikidata", "instance of"),
            ("yago", "subclass of"),
        ])
    }
}

/// Read `x<TAB>y<TAB>relation<TAB>resource` rows and label them.
///
/// Duplicate `(x, y)` pairs keep one record; a positive label wins over a
/// negative one.
pub fn load_relations<R: BufRead>(reader: R, whitelist: &PositiveWhitelist) -> Result<Vec<(RelationRecord, bool)>> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut by_pair: BTreeMap<(String, String), (RelationRecord, bool)> = BTreeMap::new();
    for row in tsv::rows(reader) {
        let (line, cols) = row?;
        if cols.len() != 4 {
            return Err(Error::parse(line, format!("expected 4 columns, found {}", cols.len())));
        }
        let rec = RelationRecord {
            x: cols[0].trim().to_lowercase(),
            y: cols[1].trim().to_lowercase(),
            relation: cols[2].trim().to_owned(),
            resource: cols[3].trim().to_lowercase(),
        };
        if rec.x.is_empty() || rec.y.is_empty() {
            return Err(Error::parse(line, "empty term"));
        }
        if rec.x == rec.y {
            return Err(Error::parse(line, format!("x and y are both {:?}", rec.x)));
        }
        let label = whitelist.contains(&rec.resource, &rec.relation);
        let key = (rec.x.clone(), rec.y.clone());
        match by_pair.get_mut(&key) {
            None => {
                order.push(key.clone());
                by_pair.insert(key, (rec, label));
            }
            Some(slot) if label && !slot.1 => *slot = (rec, true),
            Some(_) => {}
        }
    }
    Ok(order.into_iter().map(|k| by_pair.remove(&k).expect("present")).collect())
}

/// A labeled term pair with its corpus paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledInstance {
    pub x: String,
    pub y: String,
    /// True when y is a hypernym of x.
    pub label: bool,
    pub paths: PathCounts,
}

/// Minimum number of distinct paths an instance needs.
pub const MIN_DISTINCT_PATHS: usize = 2;

/// Keep pairs with enough corpus evidence and subsample negatives to
/// `1 : negatives_per_positive`.
///
/// Positives are never dropped; when negatives are deficient all of them are
/// kept. The output is ordered by `(x, y)`.
pub fn filter_and_balance(
    records: &[(RelationRecord, bool)],
    index: &PairPathIndex,
    negatives_per_positive: usize,
    seed: u64,
) -> Result<Vec<LabeledInstance>> {
    if negatives_per_positive == 0 {
        return Err(Error::arg("negative ratio must be >= 1"));
    }
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for (rec, label) in records {
        let Some(paths) = index.get(&rec.x, &rec.y) else { continue };
        if paths.len() < MIN_DISTINCT_PATHS {
            continue;
        }
        let inst = LabeledInstance { x: rec.x.clone(), y: rec.y.clone(), label: *label, paths: paths.clone() };
        if *label {
            positives.push(inst);
        } else {
            negatives.push(inst);
        }
    }
    if positives.is_empty() {
        return Err(Error::data("no positive pairs survive the co-occurrence filter"));
    }
    negatives.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
    let target = positives.len() * negatives_per_positive;
    if negatives.len() > target {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        negatives.shuffle(&mut rng);
        negatives.truncate(target);
    }
    let mut out = positives;
    out.extend(negatives);
    out.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Random,
    Lexical,
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitMode::Random => "random",
            SplitMode::Lexical => "lexical",
        })
    }
}

impl std::str::FromStr for SplitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SplitMode::Random),
            "lexical" => Ok(SplitMode::Lexical),
            _ => Err(Error::arg(format!("unknown split mode {s:?}"))),
        }
    }
}

/// Train/test/validation fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fractions {
    pub train: f64,
    pub test: f64,
    pub validation: f64,
}

impl Default for Fractions {
    fn default() -> Self {
        Fractions { train: 0.70, test: 0.25, validation: 0.05 }
    }
}

impl Fractions {
    fn validate(&self) -> Result<()> {
        let all = [self.train, self.test, self.validation];
        if all.iter().any(|f| !(0.0..=1.0).contains(f)) || ((all.iter().sum::<f64>()) - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!("split fractions {all:?} must be in [0,1] and sum to 1")));
        }
        Ok(())
    }

    /// Sizes `(train, test, validation)` for `n` items: test and validation
    /// take the floor of their share but at least one item each; train takes
    /// the remainder.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let test = ((n as f64 * self.test).floor() as usize).max(1);
        let val = ((n as f64 * self.validation).floor() as usize).max(1);
        (n - test - val, test, val)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<LabeledInstance>,
    pub test: Vec<LabeledInstance>,
    pub validation: Vec<LabeledInstance>,
    pub mode: SplitMode,
    /// Instances dropped because their terms fell into different sets.
    pub discarded: usize,
}

/// Seeded shuffle, then contiguous slicing into train/test/validation.
pub fn split_random(instances: &[LabeledInstance], fractions: Fractions, seed: u64) -> Result<DatasetSplit> {
    fractions.validate()?;
    if instances.len() < 3 {
        return Err(Error::arg(format!("need at least 3 instances to split, got {}", instances.len())));
    }
    let mut shuffled = instances.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (n_train, n_test, _) = fractions.sizes(shuffled.len());
    let validation = shuffled.split_off(n_train + n_test);
    let test = shuffled.split_off(n_train);
    Ok(DatasetSplit { train: shuffled, test, validation, mode: SplitMode::Random, discarded: 0 })
}

/// Partition terms into three disjoint vocabularies, then keep each instance
/// only where both of its terms fall in the same set.
pub fn split_lexical(instances: &[LabeledInstance], fractions: Fractions, seed: u64) -> Result<DatasetSplit> {
    fractions.validate()?;
    let terms: BTreeSet<&str> = instances.iter().flat_map(|i| [i.x.as_str(), i.y.as_str()]).collect();
    if terms.len() < 3 {
        return Err(Error::arg(format!("need at least 3 distinct terms, got {}", terms.len())));
    }
    let mut terms: Vec<&str> = terms.into_iter().collect();
    terms.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (n_train, n_test, _) = fractions.sizes(terms.len());
    let partition = [
        terms[..n_train].iter().copied().collect::<HashSet<_>>(),
        terms[n_train..n_train + n_test].iter().copied().collect(),
        terms[n_train + n_test..].iter().copied().collect(),
    ];
    split_by_term_partition(instances, &partition)
}

/// Assign instances to the train/test/validation term sets of `partition`.
/// Cross-set instances are counted as discarded.
pub fn split_by_term_partition(instances: &[LabeledInstance], partition: &[HashSet<&str>; 3]) -> Result<DatasetSplit> {
    let mut sets: [Vec<LabeledInstance>; 3] = Default::default();
    let mut discarded = 0;
    for inst in instances {
        match partition.iter().position(|p| p.contains(inst.x.as_str()) && p.contains(inst.y.as_str())) {
            Some(k) => sets[k].push(inst.clone()),
            None => discarded += 1,
        }
    }
    for (name, set) in ["train", "test", "validation"].iter().zip(&sets) {
        if set.is_empty() {
            return Err(Error::data(format!(
                "lexical split left the {name} set empty; try a different seed or fractions"
            )));
        }
    }
    let [train, test, validation] = sets;
    Ok(DatasetSplit { train, test, validation, mode: SplitMode::Lexical, discarded })
}

/// `x<TAB>y<TAB>label` rows.
pub fn write_pairs<W: Write>(mut w: W, instances: &[LabeledInstance]) -> Result<()> {
    tsv::write_header(&mut w, "dataset")?;
    for i in instances {
        writeln!(w, "{}\t{}\t{}", i.x, i.y, u8::from(i.label))?;
    }
    Ok(())
}

/// Read `x<TAB>y<TAB>label` rows.
pub fn read_pairs<R: BufRead>(r: R) -> Result<Vec<(String, String, bool)>> {
    tsv::rows(r)
        .map(|row| {
            let (line, cols) = row?;
            if cols.len() != 3 {
                return Err(Error::parse(line, format!("expected 3 columns, found {}", cols.len())));
            }
            let label = match cols[2].as_str() {
                "1" => true,
                "0" => false,
                other => return Err(Error::parse(line, format!("bad label {other:?}"))),
            };
            Ok((cols[0].clone(), cols[1].clone(), label))
        })
        .collect()
}

/// Attach index paths to labeled pairs. Pairs absent from the index get an
/// empty multiset.
pub fn attach_paths(pairs: &[(String, String, bool)], index: &PairPathIndex) -> Vec<LabeledInstance> {
    pairs
        .iter()
        .map(|(x, y, label)| LabeledInstance {
            x: x.clone(),
            y: y.clone(),
            label: *label,
            paths: index.get(x, y).cloned().unwrap_or_default(),
        })
        .collect()
}

/// Summary written next to the split files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub seed: u64,
    pub mode: SplitMode,
    pub train: usize,
    pub test: usize,
    pub validation: usize,
    pub positives: usize,
    pub negatives: usize,
    pub discarded: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
}

impl Manifest {
    pub fn new(split: &DatasetSplit, seed: u64) -> Self {
        let all = || split.train.iter().chain(&split.test).chain(&split.validation);
        Manifest {
            format_version: crate::FORMAT_VERSION,
            seed,
            mode: split.mode,
            train: split.train.len(),
            test: split.test.len(),
            validation: split.validation.len(),
            positives: all().filter(|i| i.label).count(),
            negatives: all().filter(|i| !i.label).count(),
            discarded: split.discarded,
            index: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::DepPath;

    fn path(n: usize) -> DepPath {
        format!("X/NOUN/d{n}/< be/VERB/ROOT/- Y/NOUN/attr/>").parse().unwrap()
    }

    fn inst(x: &str, y: &str, label: bool) -> LabeledInstance {
        let paths = [(path(0), 1), (path(1), 2)].into_iter().collect();
        LabeledInstance { x: x.into(), y: y.into(), label, paths }
    }

    fn many(n: usize) -> Vec<LabeledInstance> {
        (0..n).map(|i| inst(&format!("x{i}"), &format!("y{i}"), i % 5 == 0)).collect()
    }

    #[test]
    fn loads_relations_with_whitelist() {
        let text = "parrot\tbird\thypernym\twordnet\ngoethe\tnovelist\toccupation\tdbpedia\n";
        let rel = load_relations(text.as_bytes(), &PositiveWhitelist::default()).unwrap();
        assert_eq!(rel.len(), 2);
        assert!(rel[0].1);
        assert!(!rel[1].1);
        assert!(load_relations("".as_bytes(), &PositiveWhitelist::default()).unwrap().is_empty());
    }

    #[test]
    fn positive_wins_and_errors() {
        let text = "a\tb\tpart of\twikidata\na\tb\tsubclass of\twikidata\na\tb\tsynonym\twordnet\n";
        let rel = load_relations(text.as_bytes(), &PositiveWhitelist::default()).unwrap();
        assert_eq!(rel.len(), 1);
        assert!(rel[0].1);
        assert_eq!(rel[0].0.relation, "subclass of");
        let bad = "a\tb\thypernym\n";
        assert!(matches!(
            load_relations(bad.as_bytes(), &PositiveWhitelist::default()),
            Err(Error::Parse { line: 1, .. })
        ));
        let same = "ok\tfine\ttype\tdbpedia\na\ta\ttype\tdbpedia\n";
        assert!(matches!(
            load_relations(same.as_bytes(), &PositiveWhitelist::default()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    fn index_for(pairs: &[(String, String)], distinct: usize) -> PairPathIndex {
        let mut idx = PairPathIndex::new();
        for (x, y) in pairs {
            for k in 0..distinct {
                idx.add(x, y, path(k), 1);
            }
        }
        idx
    }

    fn records(pos: usize, neg: usize) -> Vec<(RelationRecord, bool)> {
        let rec = |i: usize, label| {
            (
                RelationRecord { x: format!("t{i}"), y: format!("h{i}"), relation: "r".into(), resource: "s".into() },
                label,
            )
        };
        (0..pos).map(|i| rec(i, true)).chain((pos..pos + neg).map(|i| rec(i, false))).collect()
    }

    #[test]
    fn balance_subsamples_negatives() {
        let recs = records(10, 100);
        let pairs: Vec<_> = recs.iter().map(|(r, _)| (r.x.clone(), r.y.clone())).collect();
        let idx = index_for(&pairs, 2);
        let out = filter_and_balance(&recs, &idx, 4, 7).unwrap();
        assert_eq!(out.iter().filter(|i| i.label).count(), 10);
        assert_eq!(out.iter().filter(|i| !i.label).count(), 40);
        assert_eq!(out, filter_and_balance(&recs, &idx, 4, 7).unwrap());
        assert_ne!(out, filter_and_balance(&recs, &idx, 4, 8).unwrap());
    }

    #[test]
    fn balance_keeps_deficient_class() {
        let recs = records(10, 20);
        let pairs: Vec<_> = recs.iter().map(|(r, _)| (r.x.clone(), r.y.clone())).collect();
        let out = filter_and_balance(&recs, &index_for(&pairs, 2), 4, 1).unwrap();
        assert_eq!(out.len(), 30);
    }

    #[test]
    fn single_path_pairs_are_filtered() {
        let recs = records(2, 0);
        let mut idx = index_for(&[("t0".into(), "h0".into())], 2);
        idx.add("t1", "h1", path(0), 5);
        let out = filter_and_balance(&recs, &idx, 4, 1).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].x, "t0");
        let none = filter_and_balance(&records(0, 3), &idx, 4, 1);
        assert!(matches!(none, Err(Error::Data(_))));
    }

    #[test]
    fn random_split_sizes() {
        let s = split_random(&many(100), Fractions::default(), 1).unwrap();
        assert_eq!((s.train.len(), s.test.len(), s.validation.len()), (70, 25, 5));
        let s = split_random(&many(3), Fractions::default(), 1).unwrap();
        assert_eq!((s.train.len(), s.test.len(), s.validation.len()), (1, 1, 1));
        assert!(split_random(&many(2), Fractions::default(), 1).is_err());
        let bad = Fractions { train: 0.5, test: 0.1, validation: 0.1 };
        assert!(split_random(&many(10), bad, 1).is_err());
        assert_eq!(
            split_random(&many(50), Fractions::default(), 9).unwrap(),
            split_random(&many(50), Fractions::default(), 9).unwrap()
        );
    }

    #[test]
    fn hand_partition() {
        let insts = vec![inst("a", "b", true), inst("c", "d", false), inst("a", "d", false), inst("e", "f", true)];
        let partition =
            [["a", "b"].into_iter().collect(), ["c", "d"].into_iter().collect(), ["e", "f"].into_iter().collect()];
        let s = split_by_term_partition(&insts, &partition).unwrap();
        assert_eq!(s.train, vec![insts[0].clone()]);
        assert_eq!(s.test, vec![insts[1].clone()]);
        assert_eq!(s.validation, vec![insts[3].clone()]);
        assert_eq!(s.discarded, 1);
        let empty_val = [partition[0].clone(), partition[1].clone(), HashSet::new()];
        assert!(split_by_term_partition(&insts, &empty_val).is_err());
    }

    #[test]
    fn lexical_vocabularies_disjoint() {
        // dense pair graph over 40 terms so every set gets instances
        let mut insts = Vec::new();
        for a in 0..40 {
            for b in 0..40 {
                if a != b && (a * 7 + b) % 3 == 0 {
                    insts.push(inst(&format!("t{a}"), &format!("t{b}"), a % 4 == 0));
                }
            }
        }
        let s = split_lexical(&insts, Fractions { train: 0.6, test: 0.25, validation: 0.15 }, 3).unwrap();
        let vocab = |v: &[LabeledInstance]| v.iter().flat_map(|i| [i.x.clone(), i.y.clone()]).collect::<BTreeSet<_>>();
        let (a, b, c) = (vocab(&s.train), vocab(&s.test), vocab(&s.validation));
        assert!(a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c));
        assert_eq!(s.train.len() + s.test.len() + s.validation.len() + s.discarded, insts.len());
        assert!(s.discarded > 0);
    }

    #[test]
    fn pairs_tsv_round_trip() {
        let insts = many(4);
        let mut buf = Vec::new();
        write_pairs(&mut buf, &insts).unwrap();
        let back = read_pairs(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 4);
        assert_eq!(back[0], ("x0".into(), "y0".into(), true));
        assert!(read_pairs("a\tb\t2\n".as_bytes()).is_err());
    }
}
