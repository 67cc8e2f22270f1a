//! Corpora shaped like single-repository harvests, built in code because
//! they are too large to commit. Each one is sized so that cleaning lands
//! on a known count.

use datahunt_core::model::{Agent, DatasetRecord, NameType, Registry, RelatedIdentifier, SourceTag};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rec(doi: String, publisher: &str) -> DatasetRecord {
    let mut r = DatasetRecord::new(doi, SourceTag::DataciteGeneral);
    r.registry = Registry::DataCite;
    r.publisher_raw = publisher.into();
    r.repository = publisher.into();
    r.resource_type_general = "Dataset".into();
    r.title = format!("Deposit {}", r.doi);
    r
}

/// Splits `total` into `parts` sizes of at least `min`, deterministically.
fn spread(rng: &mut ChaCha8Rng, total: usize, parts: usize, min: usize) -> Vec<usize> {
    let mut sizes = vec![min; parts];
    for _ in 0..total - min * parts {
        let k = rng.random_range(0..parts);
        sizes[k] += 1;
    }
    sizes
}

fn code(i: usize) -> String {
    const A: &[u8] = b"ABCDEFGHJKLMNPQRSTUVWXYZ23456789";
    let mut n = i + 7919 * 31;
    (0..6)
        .map(|_| {
            let c = A[n % A.len()] as char;
            n /= A.len();
            c
        })
        .collect()
}

/// Texas Data Repository: 1,328 datasets carrying 70,588 file DOIs
/// (71,916 in all). The datasets form 868 same-day, same-creator,
/// same-license clusters.
pub fn tdr() -> Vec<DatasetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(71916);
    let clusters = spread(&mut rng, 1328, 868, 1);
    let mut out = Vec::with_capacity(71916);
    let mut ds = 0usize;
    let mut datasets = Vec::new();
    for (c, size) in clusters.iter().enumerate() {
        let date = format!("20{:02}-{:02}-{:02}", 16 + c % 9, 1 + c % 12, 1 + c % 28);
        let creators = vec![
            Agent::personal(format!("Researcher {c}"), &["The University of Texas at Austin"]),
            Agent::personal(format!("Collaborator {}", c % 50), &[]),
        ];
        let rights = if c % 3 == 0 { "cc0-1.0" } else { "cc-by-4.0" };
        for _ in 0..*size {
            let mut r = rec(format!("10.18738/t8/{}", code(ds).to_lowercase()), "Texas Data Repository");
            r.available = Some(date.clone());
            r.registered = Some(format!("{date}T15:00:00Z"));
            r.creators = creators.clone();
            r.rights_identifiers = vec![rights.into()];
            datasets.push(r.doi.clone());
            out.push(r);
            ds += 1;
        }
    }
    let files = spread(&mut rng, 70588, datasets.len(), 1);
    for (parent, n) in datasets.iter().zip(files) {
        for f in 0..n {
            let mut r = rec(format!("{parent}/{}", code(f + 100_000).to_lowercase()), "Texas Data Repository");
            r.resource_type_general = "Dataset".into();
            if f % 2 == 0 {
                r.related_identifiers.push(RelatedIdentifier::new("IsPartOf", parent, "DOI"));
            }
            out.push(r);
        }
    }
    out
}

/// Zenodo: 713 DOIs in 400 lineages. 230 concept+version pairs, 27
/// three-member and 3 four-member lineages, 20 lineages whose concept
/// record is missing, and 120 records with no version relations.
pub fn zenodo() -> Vec<DatasetRecord> {
    let mut out = Vec::new();
    let mut next = 4_000_000u64;
    let mut lineage = |sizes: usize, with_concept: bool, out: &mut Vec<DatasetRecord>| {
        let concept = next;
        next += 20;
        if with_concept {
            let mut r = rec(format!("10.5281/zenodo.{concept}"), "Zenodo");
            for k in 1..sizes as u64 {
                r.related_identifiers.push(RelatedIdentifier::new("HasVersion", &format!("10.5281/zenodo.{}", concept + k), "DOI"));
            }
            out.push(r);
        }
        let versions = if with_concept { sizes - 1 } else { sizes };
        for k in 1..=versions as u64 {
            let mut r = rec(format!("10.5281/zenodo.{}", concept + k), "Zenodo");
            r.related_identifiers.push(RelatedIdentifier::new("IsVersionOf", &format!("10.5281/zenodo.{concept}"), "DOI"));
            out.push(r);
        }
    };
    (0..230).for_each(|_| lineage(2, true, &mut out));
    (0..27).for_each(|_| lineage(3, true, &mut out));
    (0..3).for_each(|_| lineage(4, true, &mut out));
    (0..20).for_each(|_| lineage(2, false, &mut out));
    for i in 0..120u64 {
        out.push(rec(format!("10.5281/zenodo.{}", 9_000_000 + i * 3), "Zenodo"));
    }
    out
}

/// DesignSafe: 172 deposits all naming the institution as a contributor;
/// 49 also carry the qualified affiliation form.
pub fn designsafe() -> Vec<DatasetRecord> {
    (0..172)
        .map(|i| {
            let mut r = rec(format!("10.17603/ds2-{:04x}-{:04x}", 0x1000 + i, 0xa000 + i * 7), "DesignSafe-CI");
            r.contributors = vec![Agent {
                name: "University of Texas at Austin".into(),
                name_type: NameType::Organizational,
                ..Default::default()
            }];
            let aff = if (i * 7) % 172 < 49 {
                "University of Texas at Austin (utexas.edu)"
            } else {
                "Oregon State University"
            };
            r.creators = vec![Agent::personal(format!("Engineer {i}"), &[aff])];
            r
        })
        .collect()
}

const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November", "December",
];

/// EMSL: 1,469 flat records in 42 sets sharing title, first creator,
/// relation list and container.
pub fn emsl() -> Vec<DatasetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(1469);
    let mut sizes = spread(&mut rng, 1469 - 15, 41, 2);
    sizes.insert(0, 15);
    let mut out = Vec::new();
    let mut n = 0usize;
    for (s, size) in sizes.iter().enumerate() {
        let project = if s == 0 { 47414 } else { 47000 + s * 13 };
        let title = if s == 0 {
            "Data for EMSL Project 47414 from March 2020".to_string()
        } else {
            format!("Data for EMSL Project {project} from {} {}", MONTHS[s % 12], 2018 + s % 5)
        };
        for _ in 0..*size {
            let mut r = rec(format!("10.25584/{}", 1_900_000 + n), "EMSL");
            r.title = title.clone();
            r.creators = vec![Agent::personal(format!("PI {project}"), &["University of Texas at Austin"])];
            r.related_identifiers.push(RelatedIdentifier::new("IsPartOf", &format!("https://www.emsl.pnnl.gov/project/{project}"), "URL"));
            r.container_identifier = Some(format!("emsl-project-{project}"));
            out.push(r);
            n += 1;
        }
    }
    out
}
