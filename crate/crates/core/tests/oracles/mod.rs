//! Reference implementations that share no code with the crate under test.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;

/// `Σ min(p, q)`, written out term by term.
pub fn brute_ds(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for g in 0..p.len() {
        s += if p[g] < q[g] { p[g] } else { q[g] };
    }
    s
}

/// `Σ min(p, q) / Σ max(p, q)`, written out term by term.
pub fn brute_jaccard(p: &[f64], q: &[f64]) -> f64 {
    let (mut lo, mut hi) = (0.0, 0.0);
    for g in 0..p.len() {
        if p[g] < q[g] {
            lo += p[g];
            hi += q[g];
        } else {
            lo += q[g];
            hi += p[g];
        }
    }
    lo / hi
}

/// `1 − ½ Σ |p − q|`, written out term by term.
pub fn brute_l1_ds(p: &[f64], q: &[f64]) -> f64 {
    let mut l1 = 0.0;
    for g in 0..p.len() {
        l1 += (p[g] - q[g]).abs();
    }
    1.0 - 0.5 * l1
}

/// Proportions of a materialized sample of group indices.
pub fn brute_profile(samples: &[usize], groups: usize) -> Vec<f64> {
    (0..groups).map(|g| samples.iter().filter(|&&s| s == g).count() as f64 / samples.len() as f64).collect()
}

/// Stereotypical-bias average built from explicit subsets: for each label
/// (ascending) collect its samples and everyone else's, profile both,
/// average DS over labels where both subsets are non-empty.
pub fn brute_ds_s(samples: &[(usize, usize)], groups: usize) -> Option<f64> {
    let mut labels: Vec<usize> = samples.iter().map(|s| s.0).collect();
    labels.sort();
    labels.dedup();
    let mut sum = 0.0;
    let mut used = 0;
    for y in labels {
        let inside: Vec<usize> = samples.iter().filter(|s| s.0 == y).map(|s| s.1).collect();
        let outside: Vec<usize> = samples.iter().filter(|s| s.0 != y).map(|s| s.1).collect();
        if inside.is_empty() || outside.is_empty() {
            continue;
        }
        sum += brute_ds(&brute_profile(&inside, groups), &brute_profile(&outside, groups));
        used += 1;
    }
    (used > 0).then(|| sum / used as f64)
}

/// Textbook χ² via `Σ O²/E − n` over the non-empty rows and columns.
pub fn textbook_chi_square(table: &[Vec<u64>]) -> Option<(f64, usize, usize, f64)> {
    let rows: Vec<&Vec<u64>> = table.iter().filter(|r| r.iter().sum::<u64>() > 0).collect();
    let width = table.first().map_or(0, Vec::len);
    let cols: Vec<usize> = (0..width).filter(|&c| rows.iter().map(|r| r[c]).sum::<u64>() > 0).collect();
    if rows.len() < 2 || cols.len() < 2 {
        return None;
    }
    let n: u64 = rows.iter().map(|r| r.iter().sum::<u64>()).sum();
    let mut acc = 0.0;
    for r in &rows {
        let rs: u64 = r.iter().sum();
        for &c in &cols {
            let cs: u64 = rows.iter().map(|x| x[c]).sum();
            let e = (rs as f64) * (cs as f64) / n as f64;
            acc += (r[c] as f64).powi(2) / e;
        }
    }
    Some((acc - n as f64, rows.len(), cols.len(), n as f64))
}

pub fn textbook_cramers_v(table: &[Vec<u64>]) -> Option<f64> {
    let (chi2, r, c, n) = textbook_chi_square(table)?;
    Some((chi2.max(0.0) / n / (r.min(c) - 1) as f64).sqrt())
}

/// Naive complete linkage: clusters are explicit member lists and every
/// step recomputes each cluster-pair distance from the leaf distances.
/// Equal distances go to the pair with the smallest `(min id, max id)`.
pub fn brute_complete_linkage(dist: &[Vec<f64>]) -> Vec<(usize, usize, f64, usize)> {
    let n = dist.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut out = Vec::new();
    let mut next = n;
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in 0..clusters.len() {
                if x == y {
                    continue;
                }
                let (ia, ma) = &clusters[x];
                let (ib, mb) = &clusters[y];
                if ia > ib {
                    continue;
                }
                let mut h = f64::NEG_INFINITY;
                for &a in ma {
                    for &b in mb {
                        h = h.max(dist[a][b]);
                    }
                }
                let better = match best {
                    None => true,
                    Some((bh, blo, bhi, _, _)) => h < bh || (h == bh && (*ia, *ib) < (blo, bhi)),
                };
                if better {
                    best = Some((h, *ia, *ib, x, y));
                }
            }
        }
        let (h, ia, ib, x, y) = best.unwrap();
        let mut members = clusters[x].1.clone();
        members.extend(clusters[y].1.iter().copied());
        let size = members.len();
        clusters.retain(|(id, _)| *id != ia && *id != ib);
        clusters.push((next, members));
        out.push((ia, ib, h, size));
        next += 1;
    }
    out
}

/// Random symmetric distance matrix with zero diagonal. Values are drawn
/// from a coarse grid when `coarse` is set, which produces ties.
pub fn random_distances(rng: &mut impl Rng, n: usize, coarse: bool) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in i + 1..n {
            let v = if coarse { rng.gen_range(0..5) as f64 / 4.0 } else { rng.gen::<f64>() };
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Uniform point on the `k`-simplex (normalized exponentials).
pub fn random_simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Draws a group index from `p` by inverse CDF.
pub fn draw(rng: &mut impl Rng, p: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}
