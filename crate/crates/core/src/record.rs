//! Per-sample predictions and subject-level aggregation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::axis::{DemographicAxis, COMBINATION_SEPARATOR};
use crate::error::{Error, Result};

/// One prediction row: identifiers plus a group assignment per axis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleRecord {
    pub sample_id: String,
    pub subject_id: Option<String>,
    pub class_label: Option<String>,
    pub partition: Option<String>,
    pub assignments: BTreeMap<String, String>,
}

impl SampleRecord {
    pub fn new(sample_id: impl Into<String>) -> Self {
        Self { sample_id: sample_id.into(), ..Self::default() }
    }

    pub fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject_id = Some(subject.into());
        self
    }

    pub fn with_class(mut self, class: impl Into<String>) -> Self {
        self.class_label = Some(class.into());
        self
    }

    pub fn with_partition(mut self, partition: impl Into<String>) -> Self {
        self.partition = Some(partition.into());
        self
    }

    pub fn assign(mut self, axis: impl Into<String>, group: impl Into<String>) -> Self {
        self.assignments.insert(axis.into(), group.into());
        self
    }

    pub fn group_on(&self, axis: &str) -> Option<&str> {
        self.assignments.get(axis).map(String::as_str)
    }

    /// The assigned group's index on `axis`.
    pub fn group_index(&self, axis: &DemographicAxis) -> Result<usize> {
        let group = self
            .group_on(axis.id())
            .ok_or_else(|| Error::MissingAssignment { sample: self.sample_id.clone(), axis: axis.id().into() })?;
        axis.require(group)
    }

    fn subject(&self) -> Option<&str> {
        self.subject_id.as_deref().filter(|s| !s.is_empty())
    }
}

/// A majority vote that had to be broken between equally frequent groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieFlag {
    pub subject_id: String,
    pub class_label: Option<String>,
    pub partition: Option<String>,
    pub axis_id: String,
    pub tied_groups: Vec<String>,
    pub chosen: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Aggregation {
    pub records: Vec<SampleRecord>,
    pub ties: Vec<TieFlag>,
}

type SubjectKey = (String, Option<String>, Option<String>);

/// Collapses samples of the same subject into one record by majority vote.
///
/// Samples are grouped by `(subject, class label, partition)`, so a subject
/// who appears under several classes or partitions keeps one record for each.
/// On every axis in `axes` the aggregated group is the most frequent one; ties
/// go to the lexicographically smallest group id and are reported in
/// [`Aggregation::ties`]. The aggregated record keeps the sample id and the
/// non-voted assignments of the subject's first sample and sits where that
/// sample was. Records without a subject pass through unchanged.
pub fn aggregate_by_subject(records: &[SampleRecord], axes: &[DemographicAxis]) -> Aggregation {
    let mut slots: Vec<Slot> = Vec::with_capacity(records.len());
    let mut index: BTreeMap<SubjectKey, usize> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        match r.subject() {
            None => slots.push(Slot::Single(i)),
            Some(s) => {
                let key = (String::from(s), r.class_label.clone(), r.partition.clone());
                match index.get(&key) {
                    Some(&slot) => {
                        if let Slot::Group(members) = &mut slots[slot] {
                            members.push(i);
                        }
                    }
                    None => {
                        index.insert(key, slots.len());
                        slots.push(Slot::Group(vec![i]));
                    }
                }
            }
        }
    }

    let mut out = Aggregation::default();
    for slot in slots {
        match slot {
            Slot::Single(i) => out.records.push(records[i].clone()),
            Slot::Group(members) => {
                let first = &records[members[0]];
                let mut merged = first.clone();
                for axis in axes {
                    let votes = members.iter().filter_map(|&m| records[m].group_on(axis.id()));
                    if let Some(vote) = majority(votes) {
                        if vote.tied.len() > 1 {
                            out.ties.push(TieFlag {
                                subject_id: first.subject_id.clone().unwrap_or_default(),
                                class_label: first.class_label.clone(),
                                partition: first.partition.clone(),
                                axis_id: axis.id().into(),
                                tied_groups: vote.tied.clone(),
                                chosen: vote.winner.clone(),
                            });
                        }
                        merged.assignments.insert(axis.id().into(), vote.winner);
                    }
                }
                out.records.push(merged);
            }
        }
    }
    out
}

enum Slot {
    Single(usize),
    Group(Vec<usize>),
}

struct Vote {
    winner: String,
    tied: Vec<String>,
}

fn majority<'a>(votes: impl Iterator<Item = &'a str>) -> Option<Vote> {
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for v in votes {
        *tally.entry(v).or_default() += 1;
    }
    let best = *tally.values().max()?;
    // BTreeMap iterates in ascending key order, so the first tied group wins.
    let tied: Vec<String> = tally.iter().filter(|(_, &n)| n == best).map(|(g, _)| String::from(*g)).collect();
    Some(Vote { winner: tied[0].clone(), tied })
}

/// Adds the record's assignment on the combination axis `combo`.
pub fn project_record_to_combination(record: &SampleRecord, combo: &DemographicAxis) -> Result<SampleRecord> {
    if !combo.is_combination() {
        return Err(Error::InvalidArity { got: 1 });
    }
    let mut name = String::new();
    for (i, axis_id) in combo.components().iter().enumerate() {
        let group = record
            .group_on(axis_id)
            .ok_or_else(|| Error::MissingAssignment { sample: record.sample_id.clone(), axis: axis_id.clone() })?;
        if i > 0 {
            name.push(COMBINATION_SEPARATOR);
        }
        name.push_str(group);
    }
    combo.require(&name)?;
    let mut out = record.clone();
    out.assignments.insert(combo.id().into(), name);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axis::combination_axis;
    use alloc::format;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn axis() -> DemographicAxis {
        DemographicAxis::new("a", ["A", "B", "C"]).unwrap()
    }

    fn rec(id: &str, subject: Option<&str>, group: &str) -> SampleRecord {
        let mut r = SampleRecord::new(id).assign("a", group);
        r.subject_id = subject.map(Into::into);
        r
    }

    #[test]
    fn strict_majority() {
        let rs = [rec("1", Some("s1"), "A"), rec("2", Some("s1"), "A"), rec("3", Some("s1"), "B")];
        let out = aggregate_by_subject(&rs, &[axis()]);
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].group_on("a"), Some("A"));
        assert_eq!(out.records[0].sample_id, "1");
        assert!(out.ties.is_empty());
    }

    #[test]
    fn tie_goes_to_smallest_and_is_flagged() {
        let rs = [rec("1", Some("s2"), "B"), rec("2", Some("s2"), "A")];
        let out = aggregate_by_subject(&rs, &[axis()]);
        assert_eq!(out.records[0].group_on("a"), Some("A"));
        assert_eq!(out.ties.len(), 1);
        assert_eq!(out.ties[0].tied_groups, ["A", "B"]);
        assert_eq!(out.ties[0].chosen, "A");
    }

    #[test]
    fn no_subjects_is_identity() {
        let rs = [rec("1", None, "A"), rec("2", None, "B"), rec("3", Some(""), "C")];
        let out = aggregate_by_subject(&rs, &[axis()]);
        assert_eq!(out.records, rs);
        assert!(out.ties.is_empty());
    }

    #[test]
    fn subject_split_by_class_and_partition() {
        let rs = [
            rec("1", Some("s"), "A").with_class("happy"),
            rec("2", Some("s"), "B").with_class("sad"),
            rec("3", Some("s"), "A").with_class("happy").with_partition("test"),
            rec("4", Some("s"), "C").with_class("happy"),
            rec("5", Some("s"), "A").with_class("happy"),
        ];
        let out = aggregate_by_subject(&rs, &[axis()]);
        let ids: Vec<&str> = out.records.iter().map(|r| r.sample_id.as_str()).collect();
        assert_eq!(ids, ["1", "2", "3"]);
        assert_eq!(out.records[0].group_on("a"), Some("A"));
    }

    /// Brute-force mode: count every group by scanning, keep the first group
    /// (in sorted order) whose count equals the maximum.
    fn brute_mode(votes: &[&str]) -> (String, bool) {
        let mut groups: Vec<&str> = votes.to_vec();
        groups.sort();
        groups.dedup();
        let count = |g: &str| votes.iter().filter(|v| **v == g).count();
        let best = groups.iter().map(|g| count(g)).max().unwrap();
        let winners: Vec<&&str> = groups.iter().filter(|g| count(g) == best).collect();
        (winners[0].to_string(), winners.len() > 1)
    }

    #[test]
    fn tie_cases_match_brute_force_mode() {
        // every vote sequence of length 1..=5 over 3 groups
        let names = ["A", "B", "C"];
        for len in 1..=5u32 {
            for code in 0..3usize.pow(len) {
                let mut c = code;
                let mut votes = Vec::new();
                for _ in 0..len {
                    votes.push(names[c % 3]);
                    c /= 3;
                }
                let rs: Vec<SampleRecord> =
                    votes.iter().enumerate().map(|(i, g)| rec(&format!("{i}"), Some("s"), g)).collect();
                let out = aggregate_by_subject(&rs, &[axis()]);
                let (expected, tied) = brute_mode(&votes);
                assert_eq!(out.records[0].group_on("a"), Some(expected.as_str()), "{votes:?}");
                assert_eq!(!out.ties.is_empty(), tied, "{votes:?}");
            }
        }
    }

    #[test]
    fn projection_joins_groups() {
        let age = DemographicAxis::new("age", ["20-29", "30-39"]).unwrap();
        let gender = DemographicAxis::new("gender", ["Male", "Female"]).unwrap();
        let race = DemographicAxis::new("race", ["White", "Black"]).unwrap();
        let combo = combination_axis(&[age, gender, race]).unwrap();
        let r = SampleRecord::new("x").assign("age", "20-29").assign("gender", "Male").assign("race", "White");
        let p = project_record_to_combination(&r, &combo).unwrap();
        assert_eq!(p.group_on("age+gender+race"), Some("20-29+Male+White"));

        let missing = SampleRecord::new("y").assign("age", "20-29").assign("gender", "Male");
        assert_eq!(
            project_record_to_combination(&missing, &combo),
            Err(Error::MissingAssignment { sample: "y".into(), axis: "race".into() })
        );
    }

    fn arb_records() -> impl Strategy<Value = Vec<SampleRecord>> {
        prop::collection::vec((prop::option::of(0u8..4), prop::option::of(0u8..2), 0usize..3), 1..30).prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (s, c, g))| {
                    let mut r = SampleRecord::new(format!("r{i}")).assign("a", ["A", "B", "C"][g]);
                    r.subject_id = s.map(|s| format!("s{s}"));
                    r.class_label = c.map(|c| format!("c{c}"));
                    r
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn aggregation_is_idempotent(rs in arb_records()) {
            let once = aggregate_by_subject(&rs, &[axis()]);
            let twice = aggregate_by_subject(&once.records, &[axis()]);
            prop_assert_eq!(&once.records, &twice.records);
            prop_assert!(twice.ties.is_empty());
        }
    }
}
