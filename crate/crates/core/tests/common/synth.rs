//! Seeded random corpora that collide on every cleaning rule.

use datahunt_core::model::{Agent, DatasetRecord, NameType, RelatedIdentifier, SourceTag};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SOURCES: [SourceTag; 5] = [
    SourceTag::DataciteGeneral,
    SourceTag::RepoCrossValidation,
    SourceTag::DataciteOpenalex,
    SourceTag::Crossref,
    SourceTag::Ncbi,
];

fn base(rng: &mut ChaCha8Rng, doi: String, publisher: &str) -> DatasetRecord {
    let mut r = DatasetRecord::new(doi, *SOURCES.choose(rng).unwrap());
    r.publisher_raw = publisher.to_string();
    r.repository = publisher.to_string();
    r.title = format!("title of {}", r.doi);
    let who = ["Doe, Jane", "Roe, Rick", "Poe, Ann"];
    r.creators = vec![Agent::personal(*who.choose(rng).unwrap(), &["University of Texas at Austin"])];
    r
}

fn rel(r: &mut DatasetRecord, relation: &str, target: &str) {
    r.related_identifiers.push(RelatedIdentifier::new(relation, target, "DOI"));
}

fn one(rng: &mut ChaCha8Rng) -> DatasetRecord {
    let a = rng.random_range(0..12u32);
    let b = rng.random_range(0..5u32);
    match rng.random_range(0..10u8) {
        0 | 1 => {
            let doi = if b < 2 { format!("10.18738/t8/ds{a}") } else { format!("10.18738/t8/ds{a}/f{b}") };
            let mut r = base(rng, doi, "Texas Data Repository");
            r.available = Some(format!("2023-0{}-1{}", 1 + a % 2, b % 2));
            let who = ["Doe, Jane", "Roe, Rick"];
            r.creators = vec![Agent::personal(*who.choose(rng).unwrap(), &["University of Texas at Austin"])];
            r.rights_identifiers = vec![["cc0-1.0", "cc-by-4.0"].choose(rng).unwrap().to_string()];
            r
        }
        2 => {
            let doi = if b < 2 { format!("10.5061/dryad.d{a}") } else { format!("10.5061/dryad.d{a}/{b}") };
            base(rng, doi, "Dryad")
        }
        3 | 4 => {
            let lineage = a % 8;
            let concept = 1000 + lineage * 10;
            match b {
                0 => {
                    let mut r = base(rng, format!("10.5281/zenodo.{concept}"), "Zenodo");
                    if rng.random_bool(0.5) {
                        for k in 1..=4 {
                            rel(&mut r, "HasVersion", &format!("10.5281/zenodo.{}", concept + k));
                        }
                    }
                    r
                }
                1..=3 => {
                    let k = 1 + rng.random_range(0..4);
                    let mut r = base(rng, format!("10.5281/zenodo.{}", concept + k), "Zenodo");
                    rel(&mut r, "IsVersionOf", &format!("10.5281/zenodo.{concept}"));
                    r
                }
                _ => {
                    let n = 5000 + rng.random_range(0..24);
                    base(rng, format!("10.5281/zenodo.{n}"), "Zenodo")
                }
            }
        }
        5 | 6 => {
            let doi = if b == 0 { format!("10.6084/m9.figshare.{a}") } else { format!("10.6084/m9.figshare.{a}.v{b}") };
            let publisher = if rng.random_bool(0.3) { "Taylor & Francis" } else { "figshare" };
            let mut r = base(rng, doi, publisher);
            match rng.random_range(0..4) {
                0 => rel(&mut r, "IsSupplementTo", &format!("10.1080/ART{}", a % 4)),
                1 => {
                    rel(&mut r, "IsSupplementTo", &format!("10.1080/art{}", a % 4));
                    rel(&mut r, "IsSupplementTo", &format!("10.1080/art{}", a % 3));
                }
                2 => r.linked_article = Some(format!("10.1080/art{}", a % 4)),
                _ => {}
            }
            r
        }
        7 => {
            let doi = if b == 0 { format!("10.3886/icpsr{a}") } else { format!("10.3886/icpsr{a}.v{b}") };
            base(rng, doi, "ICPSR")
        }
        8 => {
            let mut r = base(rng, format!("10.25584/e{a}-{b}"), "EMSL");
            r.title = format!("Data for EMSL Project {} from March 2020", 47414 + a % 2);
            match rng.random_range(0..3) {
                0 => r.container_identifier = Some(format!("emsl-{}", b % 2)),
                1 => rel(&mut r, "IsPartOf", &format!("10.25584/p{}", b % 2)),
                _ => {}
            }
            r
        }
        _ => {
            let mut r = base(rng, format!("10.17603/ds2-{a}{b}"), "DesignSafe-CI");
            r.contributors = vec![Agent {
                name: "University of Texas at Austin".into(),
                name_type: NameType::Organizational,
                ..Default::default()
            }];
            if rng.random_bool(0.4) {
                r.creators[0].affiliations = vec!["University of Texas at Austin (utexas.edu)".into()];
            }
            r
        }
    }
}

/// `n` records from `seed`. DOIs repeat across draws, so the corpus also
/// exercises same-DOI resolution.
pub fn corpus(seed: u64, n: usize) -> Vec<DatasetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| one(&mut rng)).collect()
}

pub fn shuffled(records: &[DatasetRecord], seed: u64) -> Vec<DatasetRecord> {
    use rand::seq::SliceRandom;
    let mut out = records.to_vec();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out
}
