//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use creativity_core::{AttributeSpec, ArtifactRecord, Corpus, Kernel, Payload};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Corpus with a 4-d vector attribute and a numeric attribute, years drawn
/// from `first..first + span` so same-year ties occur.
pub fn random_corpus(rng: &mut ChaCha8Rng, m: usize, first: i32, span: i32) -> Corpus {
    let attributes = vec![
        AttributeSpec::vector("v", 4),
        AttributeSpec::numeric("x", Kernel::Exponential),
    ];
    let artifacts = (0..m)
        .map(|i| {
            let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            ArtifactRecord {
                id: format!("a{i}"),
                year: rng.random_range(first..first + span),
                values: vec![Payload::Vector(v), Payload::Scalar(rng.random_range(-2.0..2.0))],
            }
        })
        .collect();
    Corpus::new(attributes, artifacts, Vec::new()).unwrap()
}

/// Symmetric weights in [0, 1] with roughly a fifth of the entries zero.
pub fn random_weights(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(m, m);
    for i in 0..m {
        w[(i, i)] = 1.0;
        for j in i + 1..m {
            let v = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..1.0) };
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    w
}

pub fn random_years(rng: &mut ChaCha8Rng, m: usize, span: i32) -> Vec<i32> {
    (0..m).map(|_| rng.random_range(1990..1990 + span)).collect()
}

pub fn percentile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p / 100.0 * (v.len() as f64 - 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (pos - lo as f64) * (v[hi] - v[lo]))
}

pub enum Tau {
    Fixed(f64),
    Percentile(f64),
}

/// Column-stochastic prior and subsequent graphs, each with all-zero
/// columns already replaced by uniform ones.
pub struct OracleGraphs {
    pub prior: Vec<Vec<f64>>,
    pub subsequent: Vec<Vec<f64>>,
    pub prior_dangling: Vec<bool>,
    pub subsequent_dangling: Vec<bool>,
}

pub fn graphs(w: &DMatrix<f64>, times: &[i32], tau: Tau) -> OracleGraphs {
    let m = times.len();
    let mut positive = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if times[a] < times[b] && w[(a, b)] > 0.0 {
                positive.push(w[(a, b)]);
            }
        }
    }
    let tau = match tau {
        Tau::Fixed(t) => Some(t),
        Tau::Percentile(p) => percentile(&positive, p),
    };
    let mut prior = vec![vec![0.0; m]; m];
    let mut subsequent = vec![vec![0.0; m]; m];
    if let Some(tau) = tau {
        for a in 0..m {
            for b in 0..m {
                if times[a] >= times[b] {
                    continue;
                }
                // a is earlier than b
                let e = w[(a, b)] - tau;
                if e >= 0.0 {
                    subsequent[a][b] = e;
                } else {
                    prior[b][a] = -e;
                }
            }
        }
    }
    let prior_dangling = repair(&mut prior);
    let subsequent_dangling = repair(&mut subsequent);
    OracleGraphs {
        prior,
        subsequent,
        prior_dangling,
        subsequent_dangling,
    }
}

fn repair(g: &mut [Vec<f64>]) -> Vec<bool> {
    let m = g.len();
    (0..m)
        .map(|j| {
            let s: f64 = (0..m).map(|i| g[i][j]).sum();
            for row in g.iter_mut() {
                row[j] = if s > 0.0 { row[j] / s } else { 1.0 / m as f64 };
            }
            s == 0.0
        })
        .collect()
}

pub fn iteration(g: &OracleGraphs, alpha: f64, beta: f64) -> Vec<Vec<f64>> {
    let m = g.prior.len();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (1.0 - alpha) / m as f64
                        + alpha * beta * g.prior[i][j]
                        + alpha * (1.0 - beta) * g.subsequent[i][j]
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

/// Repeated dense multiplication from the uniform vector until the L1 step
/// falls below 1e-12.
pub fn fixed_point(matrix: &[Vec<f64>]) -> Vec<f64> {
    let m = matrix.len();
    let mut c = vec![1.0 / m as f64; m];
    for _ in 0..1_000_000 {
        let mut next = mat_vec(matrix, &c);
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        let change: f64 = next.iter().zip(&c).map(|(a, b)| (a - b).abs()).sum();
        c = next;
        if change < 1e-12 {
            break;
        }
    }
    c
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Descending order with scores within `tol` grouped; groups list indices
/// in increasing order.
pub fn ordering(scores: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut last = None::<f64>;
    for i in idx {
        match (out.last_mut(), last) {
            (Some(g), Some(prev)) if (prev - scores[i]).abs() <= tol => g.push(i),
            _ => out.push(vec![i]),
        }
        last = Some(scores[i]);
    }
    out.iter_mut().for_each(|g| g.sort());
    out
}

/// Unexpectedness of artifact `i` by direct scan over every other artifact.
pub fn unexpectedness(i: usize, sim: &DMatrix<f64>, times: &[i32], window: i32, measure: &str) -> Option<f64> {
    let mut sims = Vec::new();
    let mut gaps = Vec::new();
    for j in 0..times.len() {
        if times[j] < times[i] && times[j] >= times[i] - window {
            sims.push(sim[(i, j)].max(0.0));
            gaps.push(times[i] - times[j]);
        }
    }
    if sims.is_empty() {
        return None;
    }
    Some(match measure {
        "max" => -sims.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        "mean" => -(sims.iter().sum::<f64>() / sims.len() as f64),
        _ => {
            let mut num = 0.0;
            let mut den = 0.0;
            for (s, g) in sims.iter().zip(&gaps) {
                let v = 1.0 / f64::from(*g);
                num += v * s;
                den += v;
            }
            -(num / den)
        }
    })
}

/// Predictions of a k-nearest-neighbour regressor by full sort, after
/// standardizing with the training population statistics.
pub fn knn_predict(train: &DMatrix<f64>, labels: &[f64], k: usize, queries: &DMatrix<f64>) -> Vec<f64> {
    let n = train.nrows() as f64;
    let d = train.ncols();
    let stats: Vec<(f64, f64)> = (0..d)
        .map(|j| {
            let mu = train.column(j).iter().sum::<f64>() / n;
            let var = train.column(j).iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            (mu, if sd > 1e-12 * mu.abs().max(1.0) { sd } else { 1.0 })
        })
        .collect();
    let z = |row: Vec<f64>| -> Vec<f64> { row.iter().zip(&stats).map(|(v, (mu, sd))| (v - mu) / sd).collect() };
    let rows: Vec<Vec<f64>> = (0..train.nrows()).map(|i| z(train.row(i).iter().copied().collect())).collect();
    (0..queries.nrows())
        .map(|q| {
            let query = z(queries.row(q).iter().copied().collect());
            let mut d: Vec<(f64, usize)> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| (r.iter().zip(&query).map(|(a, b)| (a - b) * (a - b)).sum(), i))
                .collect();
            d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let mut nn: Vec<usize> = d[..k].iter().map(|p| p.1).collect();
            nn.sort();
            nn.iter().map(|&i| labels[i]).sum::<f64>() / k as f64
        })
        .collect()
}

/// Two-pass Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}
