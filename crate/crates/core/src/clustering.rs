//! Pairwise similarity matrices and complete-linkage clustering on `1 − DS`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::profile::DatasetProfile;
use crate::similarity::ds;

/// Cut height used when none is given.
pub const DEFAULT_THRESHOLD: f64 = 0.6;

/// Symmetric DS matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub axis_id: String,
    pub dataset_ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn from_values(axis_id: impl Into<String>, dataset_ids: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = dataset_ids.len();
        let invalid = |reason: String| Err(Error::InvalidMatrix { reason });
        if n < 2 {
            return Err(Error::TooFewDatasets { got: n });
        }
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return invalid(format!("expected a {n}x{n} matrix"));
        }
        for (i, row) in values.iter().enumerate() {
            if row[i] != 1.0 {
                return invalid(format!("diagonal entry {i} is {}", row[i]));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return invalid(format!("entry ({i}, {j}) = {v} is outside [0, 1]"));
                }
                if v != values[j][i] {
                    return invalid(format!("entries ({i}, {j}) and ({j}, {i}) differ"));
                }
            }
        }
        Ok(Self { axis_id: axis_id.into(), dataset_ids, values })
    }

    pub fn len(&self) -> usize {
        self.dataset_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dataset_ids.is_empty()
    }

    /// `1 − similarity`, the dissimilarity the clustering runs on.
    pub fn distances(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(|r| r.iter().map(|s| 1.0 - s).collect()).collect()
    }
}

/// DS between every pair of datasets on one axis.
pub fn pairwise_matrix(profiles: &[DatasetProfile], axis_id: &str) -> Result<SimilarityMatrix> {
    if profiles.len() < 2 {
        return Err(Error::TooFewDatasets { got: profiles.len() });
    }
    let axis_profiles = profiles
        .iter()
        .map(|d| {
            d.profile(axis_id).ok_or_else(|| Error::MissingAxis { dataset: d.dataset_id.clone(), axis: axis_id.into() })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = profiles.len();
    let mut values = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = ds(axis_profiles[i], axis_profiles[j])?.value;
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(SimilarityMatrix {
        axis_id: axis_id.into(),
        dataset_ids: profiles.iter().map(|d| d.dataset_id.clone()).collect(),
        values,
    })
}

/// One agglomeration step. Leaves are nodes `0..n`; the cluster created by
/// merge `k` is node `n + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaf_ids: Vec<String>,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn leaves(&self) -> usize {
        self.leaf_ids.len()
    }

    /// Leaves in display order: depth-first from the root, left before right.
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.leaves();
        if self.merges.is_empty() {
            return (0..n).collect();
        }
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![n + self.merges.len() - 1];
        while let Some(node) = stack.pop() {
            if node < n {
                order.push(node);
            } else {
                let m = &self.merges[node - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        order
    }

    /// Height at which each pair of leaves first shares a cluster.
    pub fn cophenetic(&self) -> Vec<Vec<f64>> {
        let n = self.leaves();
        let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut out = vec![vec![0.0; n]; n];
        for m in &self.merges {
            for &a in &members[m.left] {
                for &b in &members[m.right] {
                    out[a][b] = m.height;
                    out[b][a] = m.height;
                }
            }
            let mut joined = members[m.left].clone();
            joined.extend_from_slice(&members[m.right]);
            members.push(joined);
        }
        out
    }
}

/// Complete-linkage clustering of a similarity matrix on `d = 1 − s`.
pub fn complete_linkage(matrix: &SimilarityMatrix) -> Dendrogram {
    Dendrogram { leaf_ids: matrix.dataset_ids.clone(), merges: complete_linkage_distances(&matrix.distances()) }
}

/// Complete linkage on a distance matrix.
///
/// Each step merges the closest pair of active clusters; among equally close
/// pairs the one with the lexicographically smallest `(min id, max id)`
/// wins. The merged cluster's distance to any other is the larger of its
/// parts' distances.
pub fn complete_linkage_distances(dist: &[Vec<f64>]) -> Vec<Merge> {
    let n = dist.len();
    if n < 2 {
        return Vec::new();
    }
    let nodes = 2 * n - 1;
    let mut d = vec![vec![0.0f64; nodes]; nodes];
    for i in 0..n {
        d[i][..n].copy_from_slice(&dist[i]);
    }
    let mut size = vec![1usize; nodes];
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for (x, &a) in active.iter().enumerate() {
            for &b in &active[x + 1..] {
                if best.is_none_or(|(h, _, _)| d[a][b] < h) {
                    best = Some((d[a][b], a, b));
                }
            }
        }
        let (height, a, b) = best.expect("at least two active clusters");
        let node = n + step;
        active.retain(|&c| c != a && c != b);
        for &c in &active {
            let v = d[a][c].max(d[b][c]);
            d[node][c] = v;
            d[c][node] = v;
        }
        size[node] = size[a] + size[b];
        active.push(node);
        merges.push(Merge { left: a, right: b, height, size: size[node] });
    }
    merges
}

/// Flat clusters from a dendrogram cut.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub threshold: f64,
    pub dataset_ids: Vec<String>,
    /// Cluster letter of each dataset, aligned with `dataset_ids`.
    pub labels: Vec<String>,
}

impl ClusterAssignment {
    pub fn label_of(&self, dataset_id: &str) -> Option<&str> {
        self.dataset_ids.iter().position(|d| d == dataset_id).map(|i| self.labels[i].as_str())
    }

    pub fn cluster_count(&self) -> usize {
        let mut l: Vec<&String> = self.labels.iter().collect();
        l.sort();
        l.dedup();
        l.len()
    }

    /// Clusters as sorted lists of leaf indices, sorted.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, l) in self.labels.iter().enumerate() {
            match groups.iter_mut().find(|(g, _)| g == l) {
                Some((_, v)) => v.push(i),
                None => groups.push((l.clone(), vec![i])),
            }
        }
        let mut out: Vec<Vec<usize>> = groups.into_iter().map(|(_, v)| v).collect();
        out.sort();
        out
    }
}

/// Spreadsheet-style letters: A..Z, AA, AB, ...
pub fn cluster_letter(mut index: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (index % 26) as u8);
        if index < 26 {
            break;
        }
        index = index / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap_or_default()
}

/// Cuts the dendrogram at `threshold`: merges at or below it are kept.
/// Clusters are lettered in order of their first leaf.
pub fn cut_dendrogram(dendrogram: &Dendrogram, threshold: f64) -> ClusterAssignment {
    let n = dendrogram.leaves();
    let mut parent: Vec<usize> = (0..n + dendrogram.merges.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (k, m) in dendrogram.merges.iter().enumerate() {
        if m.height <= threshold {
            let node = n + k;
            let (l, r) = (root(&mut parent, m.left), root(&mut parent, m.right));
            parent[l] = node;
            parent[r] = node;
        }
    }
    let mut letters: Vec<(usize, String)> = Vec::new();
    let mut labels = Vec::with_capacity(n);
    for leaf in 0..n {
        let r = root(&mut parent, leaf);
        let label = match letters.iter().find(|(root, _)| *root == r) {
            Some((_, l)) => l.clone(),
            None => {
                let l = cluster_letter(letters.len());
                letters.push((r, l.clone()));
                l
            }
        };
        labels.push(label);
    }
    ClusterAssignment { threshold, dataset_ids: dendrogram.leaf_ids.clone(), labels }
}
