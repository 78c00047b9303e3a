//! Shared generators and brute-force oracles for integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catsynth::{BayesNet, CategoricalSchema, Dag, VariableKind, VariableSpec};

/// Largest joint table the brute-force oracle is asked to enumerate.
pub const MAX_JOINT: usize = 200_000;

pub fn labelled_schema(cards: &[usize]) -> CategoricalSchema {
    let vars = cards
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let labels: Vec<String> = (0..c).map(|k| format!("v{i}_{k}")).collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            VariableSpec::new(format!("X{i}"), VariableKind::Nominal, &refs)
        })
        .collect();
    CategoricalSchema::new(vars).unwrap()
}

/// Random network: 2..=max_nodes nodes, 2..=max_card categories, at most three
/// parents per node, topological order a random permutation of the indices.
/// Cardinalities are redrawn until the joint has at most `MAX_JOINT` cells.
/// With `zeros`, roughly one CPT entry in eight is exactly zero.
pub fn random_network(seed: u64, max_nodes: usize, max_card: usize, zeros: bool) -> BayesNet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let cards: Vec<usize> = loop {
        let c: Vec<usize> = (0..n).map(|_| rng.random_range(2..=max_card)).collect();
        if c.iter().product::<usize>() <= MAX_JOINT {
            break c;
        }
    };
    let mut topo: Vec<usize> = (0..n).collect();
    topo.shuffle(&mut rng);
    let mut parents = vec![Vec::new(); n];
    for j in 1..n {
        let mut pool = topo[..j].to_vec();
        pool.shuffle(&mut rng);
        let k = rng.random_range(0..=pool.len().min(3));
        parents[topo[j]] = pool[..k].to_vec();
    }
    let names: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let dag = Dag::new(names, parents.clone()).unwrap();
    let rows = (0..n)
        .map(|v| {
            let configs: usize = parents[v].iter().map(|&p| cards[p]).product();
            (0..configs)
                .map(|_| {
                    let mut w: Vec<f64> = (0..cards[v])
                        .map(|_| if zeros && rng.random_bool(0.125) { 0.0 } else { rng.random_range(0.05..1.0) })
                        .collect();
                    if w.iter().all(|&x| x == 0.0) {
                        w[0] = 1.0;
                    }
                    let s: f64 = w.iter().sum();
                    w.iter().map(|x| x / s).collect()
                })
                .collect()
        })
        .collect();
    BayesNet::from_rows(Arc::new(labelled_schema(&cards)), dag, rows).unwrap()
}

/// Decodes a joint index, last variable varying fastest.
pub fn decode(cards: &[usize], mut index: usize, out: &mut [usize]) {
    for i in (0..cards.len()).rev() {
        out[i] = index % cards[i];
        index /= cards[i];
    }
}

/// Full joint by direct product of CPT entries, computed without library helpers.
pub fn brute_joint(model: &BayesNet) -> Vec<f64> {
    let cards = model.schema().cardinalities();
    let size: usize = cards.iter().product();
    let mut x = vec![0; cards.len()];
    (0..size)
        .map(|i| {
            decode(&cards, i, &mut x);
            (0..cards.len())
                .map(|v| {
                    let cpt = model.cpt(v);
                    let cfg = cpt.parents().iter().fold(0, |acc, &p| acc * cards[p] + x[p]);
                    cpt.rows()[cfg].probs()[x[v]]
                })
                .product::<f64>()
        })
        .collect()
}

/// `P(target | evidence)` by summing the joint; `None` if the evidence has zero mass.
pub fn brute_posterior(model: &BayesNet, joint: &[f64], target: usize, evidence: &[(usize, usize)]) -> Option<Vec<f64>> {
    let cards = model.schema().cardinalities();
    let mut x = vec![0; cards.len()];
    let mut acc = vec![0.0; cards[target]];
    for (i, &p) in joint.iter().enumerate() {
        decode(&cards, i, &mut x);
        if evidence.iter().all(|&(v, val)| x[v] == val) {
            acc[x[target]] += p;
        }
    }
    let total: f64 = acc.iter().sum();
    (total > 0.0).then(|| acc.iter().map(|a| a / total).collect())
}

/// Pairwise tables `t[a][b][x_a * card_b + x_b]` in one pass over the joint.
pub fn brute_pair_tables(model: &BayesNet, joint: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let cards = model.schema().cardinalities();
    let n = cards.len();
    let mut t: Vec<Vec<Vec<f64>>> =
        (0..n).map(|a| (0..n).map(|b| vec![0.0; cards[a] * cards[b]]).collect()).collect();
    let mut x = vec![0; n];
    for (i, &p) in joint.iter().enumerate() {
        decode(&cards, i, &mut x);
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    t[a][b][x[a] * cards[b] + x[b]] += p;
                }
            }
        }
    }
    t
}
