//! Independent oracles shared by the integration tests. Nothing here calls
//! into the FFT path or the metric implementation.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// O(D²) circular convolution straight from the definition.
pub fn direct_convolution(a: &[f64], b: &[f64]) -> Vec<f64> {
    let d = a.len();
    (0..d)
        .map(|k| (0..d).map(|j| a[j] * b[(k + d - j) % d]).sum())
        .collect()
}

pub fn cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Modularity straight from a dumped change-table CSV: group rows by
/// (object, unit), sum the 0/1 columns, softmax, entropy in nats, mean.
pub fn dmm_from_csv(csv: &str) -> f64 {
    let mut groups: BTreeMap<(u64, u64), Vec<f64>> = BTreeMap::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let key = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        let bits: Vec<f64> = cols[3..].iter().map(|c| c.parse().unwrap()).collect();
        let acc = groups.entry(key).or_insert_with(|| vec![0.0; bits.len()]);
        for (a, b) in acc.iter_mut().zip(bits) {
            *a += b;
        }
    }
    let mut total = 0.0;
    for counts in groups.values() {
        let z: f64 = counts.iter().map(|c| c.exp()).sum();
        let h: f64 = counts
            .iter()
            .map(|c| {
                let p = c.exp() / z;
                -p * p.ln()
            })
            .sum();
        total += h;
    }
    total / groups.len() as f64
}

/// Compactness straight from the CSV.
pub fn dcm_from_csv(csv: &str) -> f64 {
    let mut groups: BTreeMap<(u64, u64), (f64, usize)> = BTreeMap::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let key = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        let flips: f64 = cols[3..].iter().map(|c| c.parse::<f64>().unwrap()).sum();
        let e = groups.entry(key).or_insert((0.0, 0));
        e.0 += (flips - 1.0).abs();
        e.1 += 1;
    }
    groups.values().map(|(s, n)| s / *n as f64).sum::<f64>() / groups.len() as f64
}
