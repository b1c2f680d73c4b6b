use std::collections::{BTreeMap, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{
    classify_relation, collapse, de9im, min_distance, named_predicates, PredicateName,
    RelationLabel, RelationTriplet,
};
use crate::geometry::{GeometryKind, GeometryRecord};
use crate::index::{BBox, GridIndex};

use super::{BuilderConfig, DatasetError, LocationQuery};

/// Predicate classes of the relation tasks. Far disjoint pairs keep the
/// plain `disjoint` label there.
pub const T4_LABELS: [PredicateName; 7] = [
    PredicateName::Equals,
    PredicateName::Disjoint,
    PredicateName::Crosses,
    PredicateName::Touches,
    PredicateName::Contains,
    PredicateName::Within,
    PredicateName::Overlaps,
];

/// One ordered (subject, object) pair found by the join, by record position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub subject: usize,
    pub object: usize,
    pub label: RelationLabel,
    pub distance: f64,
}

/// Every ordered pair within the near radius, classified once.
#[derive(Debug, Clone, Default)]
pub struct RelationCandidates {
    /// Pairs at distance zero, labelled with their most specific predicate.
    pub intersecting: Vec<Candidate>,
    /// Disjoint pairs with `0 < distance <= near_radius`.
    pub near: Vec<Candidate>,
    /// Unordered pairs skipped because a geometry was degenerate.
    pub degenerate_pairs: usize,
}

impl RelationCandidates {
    pub fn all(&self) -> impl Iterator<Item = &Candidate> {
        self.intersecting.iter().chain(&self.near)
    }

    /// Candidate count per relation label.
    pub fn label_counts(&self) -> BTreeMap<RelationLabel, usize> {
        let mut out = BTreeMap::new();
        for c in self.all() {
            *out.entry(c.label).or_insert(0) += 1;
        }
        out
    }
}

/// Joins the records against themselves at the near radius and classifies
/// each unordered pair once; the reverse direction uses the transposed matrix.
pub fn discover_relations(records: &[GeometryRecord], cfg: &BuilderConfig) -> RelationCandidates {
    let index = GridIndex::build(records, cfg.cell_size);
    let radius = cfg.near_radius;
    let slack = radius * (1.0 + 1e-9) + 1e-12;
    let mut out = RelationCandidates::default();
    for (si, s) in records.iter().enumerate() {
        let q = BBox::of(&s.geometry).expand(slack);
        for oi in index.query_bbox(&q) {
            if oi <= si {
                continue;
            }
            let o = &records[oi];
            let d = min_distance(&s.geometry, &o.geometry);
            if d > radius {
                continue;
            }
            if d > 0.0 {
                for (a, b) in [(si, oi), (oi, si)] {
                    out.near.push(Candidate {
                        subject: a,
                        object: b,
                        label: RelationLabel::DisjointButNear,
                        distance: d,
                    });
                }
                continue;
            }
            let m = match de9im(&s.geometry, &o.geometry) {
                Ok(m) => m,
                Err(e) => {
                    log::debug!("skipping pair {} / {}: {e}", s.id, o.id);
                    out.degenerate_pairs += 1;
                    continue;
                }
            };
            let forward = collapse(&named_predicates(&m, s.kind(), o.kind()));
            let backward = collapse(&named_predicates(&m.transpose(), o.kind(), s.kind()));
            if forward == PredicateName::Disjoint {
                // Touching within rounding of the distance computation but not
                // of the noding; neither label is trustworthy.
                out.degenerate_pairs += 1;
                continue;
            }
            for (a, b, p) in [(si, oi, forward), (oi, si, backward)] {
                out.intersecting.push(Candidate {
                    subject: a,
                    object: b,
                    label: p.into(),
                    distance: 0.0,
                });
            }
        }
    }
    out
}

/// Kept triplets plus the bookkeeping that goes into the build manifest.
#[derive(Debug, Clone, Default)]
pub struct TripletBuild {
    pub triplets: Vec<RelationTriplet>,
    /// Kept triplets per "<Subject>|<predicate>|<Object>" category.
    pub counts: BTreeMap<String, usize>,
    pub shortfalls: Vec<String>,
}

fn category(s: GeometryKind, p: impl std::fmt::Display, o: GeometryKind) -> String {
    format!("{s}|{p}|{o}")
}

/// Candidate pairs grouped per category, each group sorted by ids so the
/// seeded sampling below does not depend on discovery order.
fn triplet_pool(
    records: &[GeometryRecord],
    candidates: &RelationCandidates,
) -> BTreeMap<String, Vec<RelationTriplet>> {
    let mut pool: BTreeMap<String, Vec<RelationTriplet>> = BTreeMap::new();
    for c in &candidates.intersecting {
        let RelationLabel::Named(p) = c.label else {
            continue;
        };
        if !T4_LABELS.contains(&p) {
            continue;
        }
        let (s, o) = (&records[c.subject], &records[c.object]);
        pool.entry(category(s.kind(), p, o.kind()))
            .or_default()
            .push(RelationTriplet {
                subject_id: s.id.clone(),
                predicate: c.label,
                object_id: o.id.clone(),
                distance: c.distance,
            });
    }
    for group in pool.values_mut() {
        group.sort_by(|a, b| (&a.subject_id, &a.object_id).cmp(&(&b.subject_id, &b.object_id)));
    }
    pool
}

/// Far disjoint pairs drawn uniformly per (subject type, object type).
fn sample_disjoint(
    records: &[GeometryRecord],
    cfg: &BuilderConfig,
    rng: &mut ChaCha8Rng,
    build: &mut TripletBuild,
) {
    let quota = cfg.triplets_per_category;
    let mut by_kind: BTreeMap<GeometryKind, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_kind.entry(r.kind()).or_default().push(i);
    }
    for sk in GeometryKind::ALL {
        for ok in GeometryKind::ALL {
            let name = category(sk, PredicateName::Disjoint, ok);
            let (Some(subjects), Some(objects)) = (by_kind.get(&sk), by_kind.get(&ok)) else {
                continue;
            };
            let mut seen = HashSet::new();
            let mut kept = Vec::new();
            let mut attempts = 0;
            while kept.len() < quota && attempts < 50 * quota {
                attempts += 1;
                let si = *subjects.choose(rng).expect("non-empty");
                let oi = *objects.choose(rng).expect("non-empty");
                if si == oi || !seen.insert((si, oi)) {
                    continue;
                }
                let (s, o) = (&records[si], &records[oi]);
                let d = min_distance(&s.geometry, &o.geometry);
                if d <= cfg.near_radius {
                    continue;
                }
                match classify_relation(&s.geometry, &o.geometry) {
                    Ok(PredicateName::Disjoint) => kept.push(RelationTriplet {
                        subject_id: s.id.clone(),
                        predicate: PredicateName::Disjoint.into(),
                        object_id: o.id.clone(),
                        distance: d,
                    }),
                    _ => continue,
                }
            }
            if kept.len() < quota {
                build
                    .shortfalls
                    .push(format!("{name}: {} of {quota}", kept.len()));
            }
            build.counts.insert(name, kept.len());
            build.triplets.extend(kept);
        }
    }
}

pub fn build_relation_triplets(
    records: &[GeometryRecord],
    cfg: &BuilderConfig,
) -> Result<TripletBuild, DatasetError> {
    cfg.validate()?;
    let candidates = discover_relations(records, cfg);
    Ok(build_relation_triplets_from(records, &candidates, cfg))
}

/// Down-samples every non-disjoint category to the quota and adds
/// rejection-sampled far disjoint pairs.
pub fn build_relation_triplets_from(
    records: &[GeometryRecord],
    candidates: &RelationCandidates,
    cfg: &BuilderConfig,
) -> TripletBuild {
    let quota = cfg.triplets_per_category;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7452_4950);
    let mut build = TripletBuild::default();
    for (name, mut group) in triplet_pool(records, candidates) {
        if group.len() < quota {
            build
                .shortfalls
                .push(format!("{name}: {} of {quota}", group.len()));
        }
        group.shuffle(&mut rng);
        group.truncate(quota);
        build.counts.insert(name, group.len());
        build.triplets.extend(group);
    }
    sample_disjoint(records, cfg, &mut rng, &mut build);
    for s in &build.shortfalls {
        log::info!("triplet shortfall {s}");
    }
    build
}

/// Location-prediction queries plus the relations that back their answers.
#[derive(Debug, Clone, Default)]
pub struct LocationBuild {
    pub queries: Vec<LocationQuery>,
    pub relations: Vec<RelationTriplet>,
    /// Emitted queries per "<predicate>|<Object>" category.
    pub counts: BTreeMap<String, usize>,
    pub shortfalls: Vec<String>,
}

pub fn build_location_queries(
    records: &[GeometryRecord],
    cfg: &BuilderConfig,
) -> Result<LocationBuild, DatasetError> {
    cfg.validate()?;
    let candidates = discover_relations(records, cfg);
    Ok(build_location_queries_from(records, &candidates, cfg))
}

/// Groups pairs by (object, label); objects related to more than the minimum
/// number of subjects become queries, up to the per-category quota.
pub fn build_location_queries_from(
    records: &[GeometryRecord],
    candidates: &RelationCandidates,
    cfg: &BuilderConfig,
) -> LocationBuild {
    let mut groups: BTreeMap<(RelationLabel, usize), Vec<&Candidate>> = BTreeMap::new();
    for c in candidates.all() {
        let eligible = match c.label {
            RelationLabel::DisjointButNear => true,
            RelationLabel::Named(p) => T4_LABELS.contains(&p) && p != PredicateName::Disjoint,
        };
        if eligible {
            groups.entry((c.label, c.object)).or_default().push(c);
        }
    }
    // (label, object kind) -> [(object position, answers)]
    type Groups<'a> = Vec<(usize, Vec<&'a Candidate>)>;
    let mut per_category: BTreeMap<(RelationLabel, GeometryKind), Groups> = BTreeMap::new();
    for ((label, object), members) in groups {
        if members.len() > cfg.min_subjects_per_object {
            per_category
                .entry((label, records[object].kind()))
                .or_default()
                .push((object, members));
        }
    }
    let quota = cfg.location_objects_per_category;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4c4f_4351);
    let mut build = LocationBuild::default();
    for label in location_labels() {
        for kind in GeometryKind::ALL {
            let name = format!("{label}|{kind}");
            let mut objects = per_category.remove(&(label, kind)).unwrap_or_default();
            objects.sort_by(|a, b| records[a.0].id.cmp(&records[b.0].id));
            if objects.len() < quota {
                build
                    .shortfalls
                    .push(format!("{name}: {} of {quota}", objects.len()));
            }
            objects.shuffle(&mut rng);
            objects.truncate(quota);
            objects.sort_by(|a, b| records[a.0].id.cmp(&records[b.0].id));
            build.counts.insert(name, objects.len());
            for (object, members) in objects {
                let mut answers: Vec<&Candidate> = members;
                answers.sort_by(|a, b| records[a.subject].id.cmp(&records[b.subject].id));
                build
                    .relations
                    .extend(answers.iter().map(|c| RelationTriplet {
                        subject_id: records[c.subject].id.clone(),
                        predicate: c.label,
                        object_id: records[c.object].id.clone(),
                        distance: c.distance,
                    }));
                build.queries.push(LocationQuery {
                    object_id: records[object].id.clone(),
                    object_kind: kind,
                    predicate: label,
                    answers: answers
                        .iter()
                        .map(|c| records[c.subject].id.clone())
                        .collect(),
                });
            }
        }
    }
    for s in &build.shortfalls {
        log::info!("location query shortfall {s}");
    }
    build
}

fn location_labels() -> impl Iterator<Item = RelationLabel> {
    T4_LABELS
        .into_iter()
        .filter(|p| *p != PredicateName::Disjoint)
        .map(RelationLabel::Named)
        .chain(std::iter::once(RelationLabel::DisjointButNear))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parse_wkt;

    fn rec(id: &str, wkt: &str) -> GeometryRecord {
        GeometryRecord::new(id, parse_wkt(wkt).unwrap(), "test")
    }

    fn cfg() -> BuilderConfig {
        BuilderConfig {
            triplets_per_category: 3,
            location_objects_per_category: 2,
            min_subjects_per_object: 2,
            near_radius: 0.5,
            cell_size: 1.0,
            ..Default::default()
        }
    }

    fn sample() -> Vec<GeometryRecord> {
        vec![
            rec("sq", "POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0))"),
            rec("a", "POINT (1 1)"),
            rec("b", "POINT (2 2)"),
            rec("c", "POINT (3 1)"),
            rec("edge", "POINT (4 2)"),
            rec("near", "POINT (4.2 2)"),
            rec("far", "POINT (40 40)"),
            rec("far2", "LINESTRING (50 50, 51 51)"),
        ]
    }

    #[test]
    fn discovers_both_directions() {
        let recs = sample();
        let c = discover_relations(&recs, &cfg());
        let label = |s: &str, o: &str| {
            c.all()
                .find(|x| recs[x.subject].id == s && recs[x.object].id == o)
                .map(|x| x.label)
        };
        assert_eq!(label("a", "sq"), Some(PredicateName::Within.into()));
        assert_eq!(label("sq", "a"), Some(PredicateName::Contains.into()));
        assert_eq!(label("edge", "sq"), Some(PredicateName::Touches.into()));
        assert_eq!(label("near", "sq"), Some(RelationLabel::DisjointButNear));
        assert_eq!(label("far", "sq"), None);
    }

    #[test]
    fn quotas_respected_and_verified() {
        let recs = sample();
        let b = build_relation_triplets(&recs, &cfg()).unwrap();
        assert!(b.counts.values().all(|&n| n <= 3));
        for t in &b.triplets {
            let s = recs.iter().find(|r| r.id == t.subject_id).unwrap();
            let o = recs.iter().find(|r| r.id == t.object_id).unwrap();
            let p = classify_relation(&s.geometry, &o.geometry).unwrap();
            assert_eq!(RelationLabel::from(p), t.predicate);
            assert!((min_distance(&s.geometry, &o.geometry) - t.distance).abs() <= 1e-12);
        }
        assert_eq!(b.counts["Point|within|Polygon"], 3);
        assert!(b
            .shortfalls
            .iter()
            .any(|s| s.starts_with("Point|touches|Polygon")));
    }

    #[test]
    fn location_queries_need_enough_subjects() {
        let recs = sample();
        let b = build_location_queries(&recs, &cfg()).unwrap();
        assert_eq!(b.queries.len(), 1);
        let q = &b.queries[0];
        assert_eq!(q.object_id, "sq");
        assert_eq!(q.predicate, PredicateName::Within.into());
        assert_eq!(q.answers, ["a", "b", "c"].map(String::from));
    }

    #[test]
    fn deterministic() {
        let recs = sample();
        let a = build_relation_triplets(&recs, &cfg()).unwrap();
        let b = build_relation_triplets(&recs, &cfg()).unwrap();
        assert_eq!(a.triplets, b.triplets);
    }
}
