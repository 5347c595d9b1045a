//! CART decision trees and bagged random forests.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ModelParams, Prediction, TrainedModel};
use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::label::Label;
use crate::util::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl Criterion {
    /// Impurity of a node holding `counts` (Bee, NoBee).
    pub fn impurity(self, counts: [usize; 2]) -> f64 {
        let n = (counts[0] + counts[1]) as f64;
        if n == 0.0 {
            return 0.0;
        }
        let p = [counts[0] as f64 / n, counts[1] as f64 / n];
        match self {
            Criterion::Gini => 1.0 - p[0] * p[0] - p[1] * p[1],
            Criterion::Entropy => p
                .iter()
                .filter(|&&q| q > 0.0)
                .map(|&q| -q * q.log2())
                .sum(),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Criterion::Gini => "gini",
            Criterion::Entropy => "entropy",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gini" => Ok(Criterion::Gini),
            "entropy" => Ok(Criterion::Entropy),
            _ => Err(Error::invalid(format!("unknown criterion {s:?}"))),
        }
    }
}

/// Number of features examined at each split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> usize {
        let m = match self {
            MaxFeatures::All => d,
            MaxFeatures::Sqrt => (d as f64).sqrt().floor() as usize,
            MaxFeatures::Count(k) => k,
        };
        m.clamp(1, d.max(1))
    }
}

impl FromStr for MaxFeatures {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(MaxFeatures::All),
            "sqrt" => Ok(MaxFeatures::Sqrt),
            other => other
                .parse::<usize>()
                .ok()
                .filter(|&k| k > 0)
                .map(MaxFeatures::Count)
                .ok_or_else(|| Error::invalid(format!("bad max_features {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: Criterion,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_split: usize,
    pub max_features: MaxFeatures,
    /// Drives the per-split feature draw when `max_features` is not `All`.
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            criterion: Criterion::Gini,
            max_depth: None,
            min_split: 2,
            max_features: MaxFeatures::All,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        /// Training rows reaching the leaf (Bee, NoBee).
        counts: [usize; 2],
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Root at index 0; children always follow their parent.
    pub nodes: Vec<Node>,
    /// Normalized impurity decrease per feature.
    pub importances: Vec<f64>,
}

impl DecisionTree {
    fn leaf(&self, x: &[f64]) -> [usize; 2] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return *counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Fraction of NoBee training rows in the leaf reached by `x`.
    pub fn score(&self, x: &[f64]) -> f64 {
        let c = self.leaf(x);
        c[1] as f64 / (c[0] + c[1]) as f64
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        Label::from_score(self.score(x))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Structural checks for a tree read from disk.
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Format("tree has no nodes".into()));
        }
        if self.importances.len() != n_features {
            return Err(Error::Format("tree importances do not match features".into()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Leaf { counts } if counts[0] + counts[1] == 0 => {
                    return Err(Error::Format(format!("empty leaf at node {i}")));
                }
                Node::Leaf { .. } => {}
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let in_range = |c: usize| c > i && c < self.nodes.len();
                    if *feature >= n_features
                        || !threshold.is_finite()
                        || !in_range(*left)
                        || !in_range(*right)
                    {
                        return Err(Error::Format(format!("malformed split at node {i}")));
                    }
                }
            }
        }
        Ok(())
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    params: &'a TreeParams,
    m: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    gain: Vec<f64>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn class_counts(y: &[usize], idx: &[usize]) -> [usize; 2] {
    let mut c = [0, 0];
    for &i in idx {
        c[y[i]] += 1;
    }
    c
}

impl Builder<'_> {
    fn best_on(&self, feature: usize, idx: &[usize], total: [usize; 2], best: &mut Option<BestSplit>) {
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]));
        let n = order.len() as f64;
        let mut left = [0usize; 2];
        for k in 0..order.len() - 1 {
            left[self.y[order[k]]] += 1;
            let lo = self.x[order[k]][feature];
            let hi = self.x[order[k + 1]][feature];
            if lo == hi {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let nl = (k + 1) as f64;
            let imp = (nl * self.params.criterion.impurity(left)
                + (n - nl) * self.params.criterion.impurity(right))
                / n;
            let better = match best {
                None => true,
                Some(b) => imp < b.impurity || (imp == b.impurity && feature < b.feature),
            };
            if better {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                *best = Some(BestSplit {
                    feature,
                    threshold,
                    impurity: imp,
                });
            }
        }
    }

    fn find_split(&mut self, idx: &[usize], total: [usize; 2]) -> Option<BestSplit> {
        let d = self.x[0].len();
        let mut candidates: Vec<usize> = if self.m >= d {
            (0..d).collect()
        } else {
            sample(&mut self.rng, d, self.m).into_vec()
        };
        candidates.sort_unstable();
        let mut best = None;
        for &f in &candidates {
            self.best_on(f, idx, total, &mut best);
        }
        if best.is_none() && candidates.len() < d {
            for f in (0..d).filter(|f| !candidates.contains(f)) {
                self.best_on(f, idx, total, &mut best);
                if best.is_some() {
                    break;
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = class_counts(self.y, &idx);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });
        let pure = counts[0] == 0 || counts[1] == 0;
        let capped = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || idx.len() < self.params.min_split || capped {
            return id;
        }
        let Some(split) = self.find_split(&idx, counts) else {
            return id;
        };
        let n = idx.len() as f64;
        let parent = self.params.criterion.impurity(counts);
        self.gain[split.feature] += n * (parent - split.impurity);
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.x[i][split.feature] <= split.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

/// Grows a tree on the rows listed in `idx` (repeats allowed).
/// `targets` are 0 (Bee) or 1 (NoBee).
pub fn fit_tree(
    rows: &[Vec<f64>],
    targets: &[usize],
    idx: Vec<usize>,
    params: &TreeParams,
    rng: ChaCha8Rng,
) -> Result<DecisionTree> {
    if idx.is_empty() {
        return Err(Error::degenerate("cannot grow a tree on zero rows"));
    }
    if params.min_split < 2 {
        return Err(Error::invalid("min_split must be at least 2"));
    }
    let d = rows[0].len();
    let mut b = Builder {
        x: rows,
        y: targets,
        params,
        m: params.max_features.resolve(d),
        rng,
        nodes: Vec::new(),
        gain: vec![0.0; d],
    };
    b.grow(idx, 0);
    let total: f64 = b.gain.iter().sum();
    let importances = if total > 0.0 {
        b.gain.iter().map(|g| g / total).collect()
    } else {
        b.gain
    };
    Ok(DecisionTree {
        nodes: b.nodes,
        importances,
    })
}

fn table_rows(table: &FeatureTable) -> (Vec<Vec<f64>>, Vec<usize>) {
    table
        .rows()
        .iter()
        .map(|r| (r.values.clone(), r.label.index()))
        .unzip()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn train_tree(table: &FeatureTable, params: &TreeParams) -> Result<TrainedModel> {
    if table.is_empty() {
        return Err(Error::degenerate("cannot train on an empty table"));
    }
    let (rows, targets) = table_rows(table);
    let tree = fit_tree(&rows, &targets, (0..rows.len()).collect(), params, stream_rng(params.seed, 0))?;
    Ok(TrainedModel::new(
        table.feature_names().to_vec(),
        None,
        ModelParams::Tree {
            params: params.clone(),
            tree,
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_split: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    /// Label returned when the vote is split evenly.
    pub tie_label: Label,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            criterion: Criterion::Gini,
            max_depth: None,
            min_split: 2,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            tie_label: Label::NoBee,
            seed: 0,
        }
    }
}

impl ForestParams {
    /// Seed of tree `i`; its split draws use stream 0, its bootstrap stream 1.
    pub fn tree_seed(&self, i: usize) -> u64 {
        derive_seed(self.seed, i as u64)
    }

    fn tree_params(&self, i: usize) -> TreeParams {
        TreeParams {
            criterion: self.criterion,
            max_depth: self.max_depth,
            min_split: self.min_split,
            max_features: self.max_features,
            seed: self.tree_seed(i),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    tie_label: Label,
    /// Mean of the per-tree normalized importances.
    pub importances: Vec<f64>,
    /// Accuracy of out-of-bag votes over rows left out by at least one tree.
    pub oob_accuracy: Option<f64>,
}

impl RandomForest {
    pub fn from_trees(trees: Vec<DecisionTree>, tie_label: Label) -> Result<Self> {
        let Some(first) = trees.first() else {
            return Err(Error::invalid("a forest needs at least one tree"));
        };
        let d = first.importances.len();
        let mut importances = vec![0.0; d];
        for t in &trees {
            if t.importances.len() != d {
                return Err(Error::invalid("trees disagree on feature count"));
            }
            importances.iter_mut().zip(&t.importances).for_each(|(a, b)| *a += b);
        }
        importances.iter_mut().for_each(|a| *a /= trees.len() as f64);
        Ok(RandomForest {
            trees,
            tie_label,
            importances,
            oob_accuracy: None,
        })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn tie_label(&self) -> Label {
        self.tie_label
    }

    /// Majority vote; the score is the NoBee vote share.
    pub fn predict(&self, x: &[f64]) -> Prediction {
        let n = self.trees.len();
        let votes = self
            .trees
            .iter()
            .filter(|t| t.predict(x) == Label::NoBee)
            .count();
        let score = votes as f64 / n as f64;
        if 2 * votes == n && self.tie_label == Label::Bee {
            return Prediction {
                label: Label::Bee,
                score: f64::from_bits(0.5f64.to_bits() - 1),
            };
        }
        Prediction::from_score(score)
    }
}

/// Bags `params.n_trees` trees; trees are grown in parallel from
/// pre-derived seeds, so the result does not depend on thread count.
pub fn fit_forest(rows: &[Vec<f64>], targets: &[usize], params: &ForestParams) -> Result<RandomForest> {
    if params.n_trees == 0 {
        return Err(Error::invalid("n_trees must be positive"));
    }
    let n = rows.len();
    let grown: Vec<(DecisionTree, Vec<bool>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let tp = params.tree_params(i);
            let mut boot_rng = stream_rng(tp.seed, 1);
            let mut in_bag = vec![!params.bootstrap; n];
            let idx: Vec<usize> = if params.bootstrap {
                (0..n)
                    .map(|_| {
                        let j = boot_rng.gen_range(0..n);
                        in_bag[j] = true;
                        j
                    })
                    .collect()
            } else {
                (0..n).collect()
            };
            fit_tree(rows, targets, idx, &tp, stream_rng(tp.seed, 0)).map(|t| (t, in_bag))
        })
        .collect::<Result<_>>()?;
    let mut oob_votes = vec![[0usize; 2]; n];
    for (tree, in_bag) in &grown {
        for (j, bagged) in in_bag.iter().enumerate() {
            if !bagged {
                oob_votes[j][tree.predict(&rows[j]).index()] += 1;
            }
        }
    }
    let (mut seen, mut correct) = (0usize, 0usize);
    for (votes, &t) in oob_votes.iter().zip(targets) {
        if votes[0] + votes[1] == 0 {
            continue;
        }
        seen += 1;
        let label = match votes[0].cmp(&votes[1]) {
            std::cmp::Ordering::Greater => Label::Bee,
            std::cmp::Ordering::Less => Label::NoBee,
            std::cmp::Ordering::Equal => params.tie_label,
        };
        correct += (label.index() == t) as usize;
    }
    let mut forest =
        RandomForest::from_trees(grown.into_iter().map(|(t, _)| t).collect(), params.tie_label)?;
    forest.oob_accuracy = (seen > 0).then(|| correct as f64 / seen as f64);
    Ok(forest)
}

pub fn train_forest(table: &FeatureTable, params: &ForestParams) -> Result<TrainedModel> {
    if table.is_empty() {
        return Err(Error::degenerate("cannot train on an empty table"));
    }
    let (rows, targets) = table_rows(table);
    let forest = fit_forest(&rows, &targets, params)?;
    Ok(TrainedModel::new(
        table.feature_names().to_vec(),
        None,
        ModelParams::Forest {
            params: params.clone(),
            forest,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest};

    fn grow(rows: &[Vec<f64>], y: &[usize], params: &TreeParams) -> DecisionTree {
        fit_tree(rows, y, (0..rows.len()).collect(), params, stream_rng(params.seed, 0)).unwrap()
    }

    #[test]
    fn one_feature_separable_gives_a_stump() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![(i * 7 % 3) as f64, i as f64]).collect();
        let y: Vec<usize> = (0..10).map(|i| (i >= 5) as usize).collect();
        let t = grow(&rows, &y, &TreeParams::default());
        assert_eq!(t.depth(), 1);
        match &t.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 1);
                assert_eq!(*threshold, 4.5);
            }
            _ => panic!("expected split"),
        }
        assert!(rows.iter().zip(&y).all(|(r, &c)| t.predict(r).index() == c));
        assert_eq!(t.importances, vec![0.0, 1.0]);
    }

    #[test]
    fn impurity_ties_prefer_lower_feature() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let t = grow(&rows, &[0, 1], &TreeParams::default());
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn conflicting_duplicates_predict_majority() {
        let rows = vec![vec![1.0]; 5];
        let t = grow(&rows, &[1, 0, 1, 1, 0], &TreeParams::default());
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&[1.0]), Label::NoBee);
        assert!((t.score(&[1.0]) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn entropy_and_depth_limit() {
        assert!((Criterion::Entropy.impurity([2, 2]) - 1.0).abs() < 1e-12);
        assert!((Criterion::Gini.impurity([2, 2]) - 0.5).abs() < 1e-12);
        let rows: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..16).map(|i| (i / 2) % 2).collect();
        let p = TreeParams {
            criterion: Criterion::Entropy,
            max_depth: Some(2),
            ..Default::default()
        };
        assert!(grow(&rows, &y, &p).depth() <= 2);
    }

    proptest! {
        #[test]
        fn unbounded_tree_fits_unique_rows(
            pts in prop::collection::btree_set((0i32..50, 0i32..50), 2..40),
            bits in prop::collection::vec(0usize..2, 40),
        ) {
            let rows: Vec<Vec<f64>> = pts.iter().map(|&(a, b)| vec![a as f64, b as f64]).collect();
            let y = &bits[..rows.len()];
            let t = grow(&rows, y, &TreeParams::default());
            for (r, &c) in rows.iter().zip(y) {
                prop_assert_eq!(t.predict(r).index(), c);
            }
            prop_assert!(t.validate(2).is_ok());
        }
    }

    fn blobs(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let c = i % 2;
                let shift = if c == 1 { 1.5 } else { 0.0 };
                let row = (0..9).map(|_| rng.gen_range(-1.0..1.0) + shift).collect();
                (row, c)
            })
            .unzip()
    }

    #[test]
    fn single_unbagged_tree_matches_train_tree() {
        let (rows, y) = blobs(80, 1);
        let fp = ForestParams {
            n_trees: 1,
            bootstrap: false,
            seed: 17,
            ..Default::default()
        };
        let forest = fit_forest(&rows, &y, &fp).unwrap();
        let tp = TreeParams {
            max_features: MaxFeatures::Sqrt,
            seed: fp.tree_seed(0),
            ..Default::default()
        };
        let tree = grow(&rows, &y, &tp);
        assert_eq!(forest.trees()[0], tree);
        let (probe, _) = blobs(50, 2);
        for r in &probe {
            assert_eq!(forest.predict(r).label, tree.predict(r));
        }
        assert_eq!(forest.oob_accuracy, None);
    }

    #[test]
    fn oob_tracks_holdout_accuracy() {
        let (rows, y) = blobs(300, 3);
        let (test, ty) = blobs(200, 4);
        let forest = fit_forest(&rows, &y, &ForestParams { n_trees: 60, seed: 5, ..Default::default() }).unwrap();
        let tree = grow(&rows, &y, &TreeParams::default());
        let tree_acc = test
            .iter()
            .zip(&ty)
            .filter(|(r, &c)| tree.predict(r).index() == c)
            .count() as f64
            / test.len() as f64;
        let oob = forest.oob_accuracy.unwrap();
        assert!(oob > tree_acc - 0.02, "oob {oob} vs tree {tree_acc}");
        assert!((forest.importances.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn forest_is_deterministic_and_thread_independent() {
        let (rows, y) = blobs(60, 6);
        let p = ForestParams { n_trees: 12, seed: 9, ..Default::default() };
        let a = fit_forest(&rows, &y, &p).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| fit_forest(&rows, &y, &p).unwrap());
        assert_eq!(a, b);
    }

    fn stub(label: Label) -> DecisionTree {
        let counts = if label == Label::Bee { [1, 0] } else { [0, 1] };
        DecisionTree {
            nodes: vec![Node::Leaf { counts }],
            importances: vec![0.0],
        }
    }

    #[test]
    fn stub_majority_vote() {
        let f = RandomForest::from_trees(
            vec![stub(Label::Bee), stub(Label::Bee), stub(Label::NoBee)],
            Label::NoBee,
        )
        .unwrap();
        let p = f.predict(&[0.0]);
        assert_eq!(p.label, Label::Bee);
        assert!((p.score - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tie_vote_follows_configuration() {
        let trees = vec![stub(Label::Bee), stub(Label::NoBee)];
        let nobee = RandomForest::from_trees(trees.clone(), Label::NoBee).unwrap();
        assert_eq!(nobee.predict(&[0.0]).label, Label::NoBee);
        let bee = RandomForest::from_trees(trees, Label::Bee).unwrap();
        let p = bee.predict(&[0.0]);
        assert_eq!(p.label, Label::Bee);
        assert_eq!(Label::from_score(p.score), Label::Bee);
    }

    #[test]
    fn validation_rejects_bad_structure() {
        let t = DecisionTree {
            nodes: vec![Node::Split { feature: 3, threshold: 0.0, left: 1, right: 2 }],
            importances: vec![0.0; 2],
        };
        assert!(t.validate(2).is_err());
        let cyc = DecisionTree {
            nodes: vec![
                Node::Split { feature: 0, threshold: 0.0, left: 0, right: 1 },
                Node::Leaf { counts: [1, 0] },
            ],
            importances: vec![0.0],
        };
        assert!(cyc.validate(1).is_err());
    }

    #[test]
    fn max_features_parsing() {
        assert_eq!("sqrt".parse::<MaxFeatures>().unwrap(), MaxFeatures::Sqrt);
        assert_eq!("7".parse::<MaxFeatures>().unwrap(), MaxFeatures::Count(7));
        assert!("0".parse::<MaxFeatures>().is_err());
        assert_eq!(MaxFeatures::Sqrt.resolve(134), 11);
    }
}
