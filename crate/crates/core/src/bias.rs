//! Bias measures: similarity to ideal profiles (representation, evenness,
//! class association) and the classical diversity and association baselines.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::axis::DemographicAxis;
use crate::error::{Error, Result};
use crate::profile::{align_pairs, AxisProfile, DatasetProfile, NORMALIZATION_TOLERANCE};
use crate::similarity::demographic_similarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// Built from the axis (or the profile's support) on demand.
    UniformAuto,
    /// Supplied by the user.
    Custom,
}

impl TargetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetKind::UniformAuto => "uniform",
            TargetKind::Custom => "custom",
        }
    }
}

/// An ideal profile to measure a dataset against.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDistribution {
    pub axis_id: String,
    pub groups: Vec<String>,
    pub proportions: Vec<f64>,
    pub kind: TargetKind,
}

impl TargetDistribution {
    /// `1/|G|` on every group of the axis.
    pub fn uniform(axis: &DemographicAxis) -> Self {
        let share = 1.0 / axis.len() as f64;
        Self {
            axis_id: axis.id().into(),
            groups: axis.groups().to_vec(),
            proportions: vec![share; axis.len()],
            kind: TargetKind::UniformAuto,
        }
    }

    /// `1/|G'|` on every group represented in `profile`, zero elsewhere.
    pub fn even(profile: &AxisProfile) -> Self {
        let share = 1.0 / richness(profile) as f64;
        Self {
            axis_id: profile.axis_id().into(),
            groups: profile.groups().to_vec(),
            proportions: profile.proportions().iter().map(|&p| if p > 0.0 { share } else { 0.0 }).collect(),
            kind: TargetKind::UniformAuto,
        }
    }

    /// User-supplied target; groups of `axis` not listed get zero.
    pub fn custom<'a, I>(axis: &DemographicAxis, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let proportions = align_pairs(axis, pairs)?;
        crate::profile::validate_simplex(axis, &proportions)?;
        Ok(Self { axis_id: axis.id().into(), groups: axis.groups().to_vec(), proportions, kind: TargetKind::Custom })
    }

    /// The target laid out over `axis`'s groups, checked against the
    /// distribution constraints.
    pub fn aligned_to(&self, axis: &DemographicAxis) -> Result<Vec<f64>> {
        let invalid = |reason: String| Error::InvalidTarget { axis: axis.id().into(), reason };
        if self.axis_id != axis.id() {
            return Err(invalid(format!("target is for axis '{}'", self.axis_id)));
        }
        if self.groups.len() != self.proportions.len() {
            return Err(invalid("groups and proportions differ in length".into()));
        }
        let mut out = vec![0.0; axis.len()];
        for (g, &p) in self.groups.iter().zip(&self.proportions) {
            let i = axis.index_of(g).ok_or_else(|| invalid(format!("unknown group '{g}'")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("proportion {p} for '{g}' is outside [0, 1]")));
            }
            out[i] += p;
        }
        let sum: f64 = out.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(invalid(format!("proportions sum to {sum}")));
        }
        Ok(out)
    }
}

/// Number of groups with non-zero representation.
pub fn richness(p: &AxisProfile) -> usize {
    p.proportions().iter().filter(|&&x| x > 0.0).count()
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &AxisProfile) -> f64 {
    -p.proportions().iter().filter(|&&x| x > 0.0).map(|&x| x * libm::log(x)).sum::<f64>()
}

/// Effective number of species, `exp(H)`.
pub fn ens(p: &AxisProfile) -> f64 {
    libm::exp(shannon_entropy(p)).clamp(1.0, richness(p) as f64)
}

/// Shannon evenness, `ln(ENS) / ln(richness)`; undefined below two groups.
pub fn sei(p: &AxisProfile) -> Option<f64> {
    let r = richness(p);
    if r < 2 {
        return None;
    }
    Some((shannon_entropy(p) / libm::log(r as f64)).clamp(0.0, 1.0))
}

/// A class-by-group table of counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub classes: Vec<String>,
    pub groups: Vec<String>,
    /// `counts[class][group]`.
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    /// Builds the table from `(class, group) → count` entries. Rows and
    /// columns are sorted by label.
    pub fn from_joint(joint: &BTreeMap<(String, String), u64>) -> Self {
        let mut classes: Vec<String> = joint.keys().map(|(c, _)| c.clone()).collect();
        classes.dedup();
        let mut groups: Vec<String> = joint.keys().map(|(_, g)| g.clone()).collect();
        groups.sort();
        groups.dedup();
        let mut counts = vec![vec![0u64; groups.len()]; classes.len()];
        for ((c, g), &n) in joint {
            let ci = classes.binary_search(c).unwrap_or_default();
            let gi = groups.binary_search(g).unwrap_or_default();
            counts[ci][gi] += n;
        }
        Self { classes, groups, counts }
    }

    pub fn chi_square(&self) -> Result<f64> {
        chi_square(&self.counts)
    }

    pub fn cramers_v(&self) -> Option<f64> {
        cramers_v(&self.counts)
    }
}

struct Margins {
    rows: Vec<f64>,
    cols: Vec<f64>,
    cells: Vec<Vec<f64>>,
    total: f64,
}

/// Drops all-zero rows and columns and requires at least a 2×2 table.
fn margins(table: &[Vec<u64>]) -> Result<Margins> {
    let width = table.iter().map(Vec::len).max().unwrap_or(0);
    let cell = |r: &Vec<u64>, c: usize| r.get(c).copied().unwrap_or(0);
    let keep_cols: Vec<usize> = (0..width).filter(|&c| table.iter().any(|r| cell(r, c) > 0)).collect();
    let cells: Vec<Vec<f64>> = table
        .iter()
        .filter(|r| r.iter().any(|&n| n > 0))
        .map(|r| keep_cols.iter().map(|&c| cell(r, c) as f64).collect())
        .collect();
    if cells.len() < 2 || keep_cols.len() < 2 {
        return Err(Error::DegenerateTable { rows: cells.len(), cols: keep_cols.len() });
    }
    let rows: Vec<f64> = cells.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..keep_cols.len()).map(|c| cells.iter().map(|r| r[c]).sum()).collect();
    let total = rows.iter().sum();
    Ok(Margins { rows, cols, cells, total })
}

/// Pearson's χ² statistic of a class-by-group count table.
///
/// Rows and columns with zero margin are dropped first. Fewer than two
/// remaining rows or columns is a `DegenerateTable`.
pub fn chi_square(table: &[Vec<u64>]) -> Result<f64> {
    let m = margins(table)?;
    let mut chi2 = 0.0;
    for (r, row) in m.cells.iter().enumerate() {
        for (c, &observed) in row.iter().enumerate() {
            let expected = m.rows[r] * m.cols[c] / m.total;
            let diff = observed - expected;
            chi2 += diff * diff / expected;
        }
    }
    Ok(chi2)
}

/// Cramér's V of a class-by-group count table; `None` when the table has
/// fewer than two non-empty rows or columns.
pub fn cramers_v(table: &[Vec<u64>]) -> Option<f64> {
    let m = margins(table).ok()?;
    let chi2 = chi_square(table).ok()?;
    let dof = (m.rows.len().min(m.cols.len()) - 1) as f64;
    Some(libm::sqrt(chi2 / m.total / dof).clamp(0.0, 1.0))
}

/// Representational bias: similarity to the uniform profile, or to `target`.
pub fn ds_r(p: &AxisProfile, target: Option<&TargetDistribution>) -> Result<f64> {
    let ideal = match target {
        Some(t) => t.aligned_to(p.axis())?,
        None => TargetDistribution::uniform(p.axis()).proportions,
    };
    Ok(demographic_similarity(p.proportions(), &ideal))
}

/// Evenness: similarity to the uniform profile over represented groups, or
/// to `target`, which must put positive mass exactly on those groups.
pub fn ds_e(p: &AxisProfile, target: Option<&TargetDistribution>) -> Result<f64> {
    let ideal = match target {
        Some(t) => {
            let ideal = t.aligned_to(p.axis())?;
            for ((g, &have), &want) in p.groups().iter().zip(p.proportions()).zip(&ideal) {
                if (have > 0.0) != (want > 0.0) {
                    return Err(Error::InvalidTarget {
                        axis: p.axis_id().into(),
                        reason: format!(
                            "group '{g}' has proportion {have} in the profile but {want} in the evenness target"
                        ),
                    });
                }
            }
            ideal
        }
        None => TargetDistribution::even(p).proportions,
    };
    Ok(demographic_similarity(p.proportions(), &ideal))
}

/// Stereotypical bias: mean similarity between each class and the rest of
/// the dataset, over classes whose subset and complement are both non-empty.
pub fn ds_s(dataset: &DatasetProfile, axis_id: &str) -> Result<f64> {
    let split = dataset
        .class_split(axis_id)
        .filter(|s| !s.classes.is_empty())
        .ok_or_else(|| Error::NoClasses { axis: axis_id.into() })?;
    let total: f64 = split
        .classes
        .values()
        .map(|pair| demographic_similarity(pair.class.proportions(), pair.rest.proportions()))
        .sum();
    Ok(total / split.classes.len() as f64)
}

/// Every bias measure of one dataset on one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasReport {
    pub dataset_id: String,
    pub axis_id: String,
    /// Against the representation target (uniform unless a custom one is given).
    pub ds_r: f64,
    /// Against the uniform target, whatever `ds_r` used.
    pub ds_r_uniform: f64,
    pub ds_e: f64,
    pub ds_s: Option<f64>,
    pub ens: f64,
    pub sei: Option<f64>,
    pub richness: usize,
    pub cramers_v: Option<f64>,
    pub rep_target: TargetKind,
    pub even_target: TargetKind,
    /// Classes averaged into `ds_s`.
    pub classes_used: usize,
    /// Classes skipped because their complement is empty.
    pub classes_excluded: Vec<String>,
}

pub fn bias_report(
    dataset: &DatasetProfile,
    axis_id: &str,
    rep_target: Option<&TargetDistribution>,
    even_target: Option<&TargetDistribution>,
) -> Result<BiasReport> {
    let p = dataset
        .profile(axis_id)
        .ok_or_else(|| Error::MissingAxis { dataset: dataset.dataset_id.clone(), axis: axis_id.into() })?;
    let split = dataset.class_split(axis_id);
    let ds_s = match ds_s(dataset, axis_id) {
        Ok(v) => Some(v),
        Err(Error::NoClasses { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(BiasReport {
        dataset_id: dataset.dataset_id.clone(),
        axis_id: axis_id.into(),
        ds_r: ds_r(p, rep_target)?,
        ds_r_uniform: ds_r(p, None)?,
        ds_e: ds_e(p, even_target)?,
        ds_s,
        ens: ens(p),
        sei: sei(p),
        richness: richness(p),
        cramers_v: split.and_then(|s| cramers_v(&s.joint_counts())),
        rep_target: rep_target.map_or(TargetKind::UniformAuto, |t| t.kind),
        even_target: even_target.map_or(TargetKind::UniformAuto, |t| t.kind),
        classes_used: split.map_or(0, |s| s.classes.len()),
        classes_excluded: split.map(|s| s.excluded.clone()).unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::SampleRecord;
    use proptest::prelude::*;

    fn axis(k: usize) -> DemographicAxis {
        DemographicAxis::new("a", (0..k).map(|i| format!("g{i}"))).unwrap()
    }

    fn prof(values: &[f64]) -> AxisProfile {
        AxisProfile::from_proportions(axis(values.len()), values.to_vec()).unwrap()
    }

    fn uniform(k: usize) -> AxisProfile {
        AxisProfile::from_counts(axis(k), vec![1; k]).unwrap()
    }

    fn point(k: usize) -> AxisProfile {
        let mut c = vec![0; k];
        c[0] = 5;
        AxisProfile::from_counts(axis(k), c).unwrap()
    }

    #[test]
    fn richness_cases() {
        assert_eq!(richness(&uniform(3)), 3);
        assert_eq!(richness(&point(7)), 1);
        assert_eq!(richness(&prof(&[0.5, 0.5, 0.0])), 2);
    }

    #[test]
    fn ens_and_sei() {
        for k in 2..=9 {
            assert!((ens(&uniform(k)) - k as f64).abs() < 1e-12, "k={k}");
            assert!((sei(&uniform(k)).unwrap() - 1.0).abs() < 1e-12, "k={k}");
        }
        assert_eq!(ens(&point(4)), 1.0);
        assert_eq!(sei(&point(4)), None);
        let p = prof(&[0.5, 0.25, 0.25]);
        // mpmath, 40 digits
        assert!((ens(&p) - 2.828_427_124_746_190_1).abs() < 1e-12);
        assert!((sei(&p).unwrap() - 0.946_394_630_357_186_2).abs() < 1e-12);
    }

    #[test]
    fn chi_square_cases() {
        assert_eq!(chi_square(&[vec![10, 0], vec![0, 10]]), Ok(20.0));
        // outer product of margins (2, 3) x (1, 4)
        let independent = [vec![2, 8], vec![3, 12]];
        assert!(chi_square(&independent).unwrap().abs() < 1e-12);
        assert_eq!(chi_square(&[vec![4], vec![6]]), Err(Error::DegenerateTable { rows: 2, cols: 1 }));
        assert_eq!(chi_square(&[vec![4, 0, 0], vec![6, 0, 0]]), Err(Error::DegenerateTable { rows: 2, cols: 1 }));
        // zero rows and columns are dropped, not divided by
        assert_eq!(chi_square(&[vec![10, 0, 0], vec![0, 0, 0], vec![0, 0, 10]]), Ok(20.0));
    }

    #[test]
    fn cramers_v_cases() {
        assert!(cramers_v(&[vec![2, 8], vec![3, 12]]).unwrap().abs() < 1e-12);
        assert!((cramers_v(&[vec![10, 0], vec![0, 10]]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cramers_v(&[vec![5], vec![7]]), None);
        assert_eq!(cramers_v(&[]), None);
    }

    #[test]
    fn contingency_from_joint() {
        let mut joint = BTreeMap::new();
        joint.insert(("y1".into(), "A".into()), 10);
        joint.insert(("y2".into(), "B".into()), 10);
        let t = ContingencyTable::from_joint(&joint);
        assert_eq!(t.counts, [vec![10, 0], vec![0, 10]]);
        assert_eq!(t.chi_square(), Ok(20.0));
        assert!((t.cramers_v().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ds_r_closed_forms() {
        assert_eq!(ds_r(&uniform(5), None).unwrap(), 1.0);
        let v = ds_r(&point(7), None).unwrap();
        assert!((v - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn ds_r_custom_target() {
        let a = axis(3);
        let p = prof(&[0.6, 0.4, 0.0]);
        let t = TargetDistribution::custom(&a, [("g0", 0.5), ("g1", 0.5)]).unwrap();
        assert!((ds_r(&p, Some(&t)).unwrap() - 0.9).abs() < 1e-12);
        assert!(ds_r(&p, Some(&t)).unwrap() > ds_r(&p, None).unwrap());

        let mut bad = t.clone();
        bad.proportions[0] = 0.7;
        assert!(matches!(ds_r(&p, Some(&bad)), Err(Error::InvalidTarget { .. })));
        let mut neg = t.clone();
        neg.proportions = vec![1.5, -0.5, 0.0];
        assert!(matches!(ds_r(&p, Some(&neg)), Err(Error::InvalidTarget { .. })));
        let mut unknown = t;
        unknown.groups[0] = "zz".into();
        assert!(matches!(ds_r(&p, Some(&unknown)), Err(Error::InvalidTarget { .. })));
    }

    #[test]
    fn ds_e_cases() {
        assert_eq!(ds_e(&point(7), None).unwrap(), 1.0);
        assert_eq!(ds_e(&prof(&[0.5, 0.5, 0.0]), None).unwrap(), 1.0);
        assert!((ds_e(&prof(&[0.75, 0.25, 0.0]), None).unwrap() - 0.75).abs() < 1e-12);

        let a = axis(3);
        let p = prof(&[0.75, 0.25, 0.0]);
        let ok = TargetDistribution::custom(&a, [("g0", 0.6), ("g1", 0.4)]).unwrap();
        assert!((ds_e(&p, Some(&ok)).unwrap() - 0.85).abs() < 1e-12);
        let covers_absent = TargetDistribution::uniform(&a);
        assert!(matches!(ds_e(&p, Some(&covers_absent)), Err(Error::InvalidTarget { .. })));
        let misses_present = TargetDistribution::custom(&a, [("g0", 1.0)]).unwrap();
        assert!(matches!(ds_e(&p, Some(&misses_present)), Err(Error::InvalidTarget { .. })));
    }

    fn dataset(rows: &[(&str, &str, u64)]) -> DatasetProfile {
        let a = DemographicAxis::new("a", ["A", "B"]).unwrap();
        let mut records = Vec::new();
        for (class, group, n) in rows {
            for _ in 0..*n {
                records.push(SampleRecord::new(format!("s{}", records.len())).assign("a", *group).with_class(*class));
            }
        }
        DatasetProfile::from_records("d", &records, &[a]).unwrap()
    }

    #[test]
    fn ds_s_cases() {
        let same = dataset(&[("x", "A", 2), ("x", "B", 2), ("y", "A", 3), ("y", "B", 3)]);
        assert_eq!(ds_s(&same, "a").unwrap(), 1.0);
        let disjoint = dataset(&[("x", "A", 4), ("y", "B", 3)]);
        assert_eq!(ds_s(&disjoint, "a").unwrap(), 0.0);
        let half = dataset(&[("x", "A", 4), ("y", "A", 2), ("y", "B", 2)]);
        assert_eq!(ds_s(&half, "a").unwrap(), 0.5);
        let one_class = dataset(&[("x", "A", 4), ("x", "B", 1)]);
        assert_eq!(ds_s(&one_class, "a"), Err(Error::NoClasses { axis: "a".into() }));
    }

    #[test]
    fn report_single_group() {
        let d = dataset(&[("x", "A", 3), ("y", "A", 5)]);
        let r = bias_report(&d, "a", None, None).unwrap();
        assert_eq!(r.ds_e, 1.0);
        assert_eq!(r.ds_s, Some(1.0));
        assert_eq!(r.sei, None);
        assert_eq!(r.cramers_v, None);
        assert_eq!(r.richness, 1);
        assert_eq!(r.ens, 1.0);
    }

    #[test]
    fn report_balanced_independent() {
        let d = dataset(&[("x", "A", 2), ("x", "B", 2), ("y", "A", 2), ("y", "B", 2)]);
        let r = bias_report(&d, "a", None, None).unwrap();
        assert_eq!((r.ds_r, r.ds_e, r.ds_s), (1.0, 1.0, Some(1.0)));
        assert_eq!(r.cramers_v, Some(0.0));
        assert_eq!(r.sei, Some(1.0));
    }

    #[test]
    fn report_unlabeled() {
        let a = DemographicAxis::new("a", ["A", "B"]).unwrap();
        let d = DatasetProfile::new("d").with_profile(AxisProfile::from_counts(a, vec![3, 1]).unwrap());
        let r = bias_report(&d, "a", None, None).unwrap();
        assert_eq!((r.ds_s, r.cramers_v), (None, None));
        assert_eq!(r.ds_r, 0.75);
        assert!(matches!(bias_report(&d, "b", None, None), Err(Error::MissingAxis { .. })));
    }

    fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, k).prop_filter_map("non-zero", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| w.iter().map(|x| x / s).collect())
        })
    }

    proptest! {
        #[test]
        fn measures_in_range(p in (1usize..10).prop_flat_map(simplex)) {
            let p = prof(&p);
            let r = richness(&p);
            let e = ens(&p);
            prop_assert!(e >= 1.0 && e <= r as f64);
            if let Some(s) = sei(&p) { prop_assert!((0.0..=1.0).contains(&s)); }
            let dr = ds_r(&p, None).unwrap();
            let de = ds_e(&p, None).unwrap();
            prop_assert!((0.0..=1.0).contains(&dr) && (0.0..=1.0).contains(&de));
        }

        #[test]
        fn even_equals_rep_at_full_richness(p in (1usize..10).prop_flat_map(simplex)) {
            let p = prof(&p);
            if richness(&p) == p.groups().len() {
                prop_assert_eq!(ds_e(&p, None).unwrap(), ds_r(&p, None).unwrap());
            }
        }

        #[test]
        fn v_in_range(table in prop::collection::vec(prop::collection::vec(0u64..20, 3), 2..5)) {
            if let Some(v) = cramers_v(&table) { prop_assert!((0.0..=1.0).contains(&v)); }
        }
    }
}
