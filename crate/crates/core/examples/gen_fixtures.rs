//! Regenerates the committed test fixtures under `tests/fixtures`.
//!
//!     cargo run -p datahunt-core --example gen_fixtures -- crates/core/tests/fixtures
//!
//! Output is a pure function of the seeds below, so rerunning it leaves the
//! files unchanged.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use datahunt_core::corpus::write_jsonl;
use datahunt_core::model::{Agent, DatasetRecord, Registry, RelatedIdentifier, SourceTag};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const RADS_INSTITUTIONS: [(&str, usize); 6] = [
    ("Duke University", 70),
    ("University of Michigan", 55),
    ("University of Minnesota", 50),
    ("Cornell University", 40),
    ("Washington University in St. Louis", 33),
    ("Virginia Tech", 20),
];

fn main() -> std::io::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("crates/core/tests/fixtures"));
    fs::create_dir_all(&out)?;
    rads(&out)?;
    drift(&out)?;
    crossref(&out)?;
    mediated(&out)?;
    dryad(&out)?;
    println!("fixtures written to {}", out.display());
    Ok(())
}

fn figshare_id(rng: &mut ChaCha8Rng, used: &mut std::collections::BTreeSet<u64>) -> u64 {
    loop {
        let id = rng.random_range(5_000_000..25_000_000u64);
        if used.insert(id) {
            return id;
        }
    }
}

fn springer_article(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..4) {
        0 => format!("10.1038/s41467-0{}-{:05}-{}", rng.random_range(19..23), rng.random_range(10000..99999), rng.random_range(0..10)),
        1 => format!("10.1038/s41598-0{}-{:05}-{}", rng.random_range(19..23), rng.random_range(10000..99999), rng.random_range(0..10)),
        2 => format!("10.1186/s{:05}-0{}-{:05}-{}", rng.random_range(12859..13059), rng.random_range(19..23), rng.random_range(1000..9999), rng.random_range(0..10)),
        _ => format!("10.1007/s{:05}-0{}-{:05}-{}", rng.random_range(10000..12000), rng.random_range(19..23), rng.random_range(1000..9999), rng.random_range(0..10)),
    }
}

fn mdy(rng: &mut ChaCha8Rng) -> String {
    format!("{:02}/{:02}/{}", rng.random_range(1..13), rng.random_range(1..29), rng.random_range(2015..2023))
}

/// Figshare slice: 268 articles, 1,040 parent deposits, 2,276 rows in all.
/// Every parent has at least one `.vN` row, so no institution keeps more
/// than half of its rows once versions go.
fn rads(out: &Path) -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ad5);
    let mut used = std::collections::BTreeSet::new();
    let mut w = csv::Writer::from_path(out.join("rads_subset.csv"))?;
    w.write_record(["doi", "institution", "publisher", "resourceTypeGeneral", "publicationDate", "relatedIdentifiers"])?;

    let total_articles: usize = RADS_INSTITUTIONS.iter().map(|(_, n)| n).sum();
    assert_eq!(total_articles, 268);
    // Parents per article: one each, the remaining 772 spread with a
    // heavier hand at Duke and Virginia Tech.
    let mut articles: Vec<(usize, String, usize)> = Vec::new();
    let mut non_sn_done = false;
    for (i, (_, n)) in RADS_INSTITUTIONS.iter().enumerate() {
        for _ in 0..*n {
            let a = if !non_sn_done {
                non_sn_done = true;
                "10.1371/journal.pone.0231507".to_string()
            } else {
                springer_article(&mut rng)
            };
            articles.push((i, a, 1));
        }
    }
    let mut extra = 1040 - articles.len();
    while extra > 0 {
        let k = rng.random_range(0..articles.len());
        let heavy = matches!(articles[k].0, 0 | 5);
        if heavy || rng.random_bool(0.45) {
            articles[k].2 += 1;
            extra -= 1;
        }
    }
    // Version rows: one per parent, 196 more spread around; a few lineages
    // only carry the later versions.
    let mut parents: Vec<(usize, usize, u64, Vec<u32>)> = Vec::new();
    for (ai, (inst, _, n)) in articles.iter().enumerate() {
        for _ in 0..*n {
            parents.push((*inst, ai, figshare_id(&mut rng, &mut used), vec![1]));
        }
    }
    let mut extra_versions = 2276 - 1040 - parents.len();
    while extra_versions > 0 {
        let k = rng.random_range(0..parents.len());
        let next = parents[k].3.len() as u32 + 1;
        parents[k].3.push(next);
        extra_versions -= 1;
    }
    for p in parents.iter_mut().step_by(97) {
        if p.3.len() >= 3 {
            let n = p.3.len() as u32;
            p.3 = (6..6 + n).collect();
        }
    }

    let mut rows: Vec<[String; 6]> = Vec::new();
    let dates: Vec<String> = articles.iter().map(|_| mdy(&mut rng)).collect();
    for (inst, ai, id, versions) in &parents {
        let rel = format!("IsSupplementTo:{}", articles[*ai].1);
        let base = format!("10.6084/m9.figshare.{id}");
        let row = |doi: String| {
            [doi, RADS_INSTITUTIONS[*inst].0.to_string(), "figshare".into(), "Dataset".into(), dates[*ai].clone(), rel.clone()]
        };
        rows.push(row(base.clone()));
        for v in versions {
            rows.push(row(format!("{base}.v{v}")));
        }
    }
    // Rows outside the slice: partner-labelled Figshare deposits, software,
    // and other repositories.
    for i in 0..160 {
        let inst = RADS_INSTITUTIONS[i % 6].0.to_string();
        let id = figshare_id(&mut rng, &mut used);
        let (doi, publisher, kind) = match i % 4 {
            0 => (format!("10.6084/m9.figshare.{id}.v1"), "Taylor & Francis", "Dataset"),
            1 => (format!("10.6084/m9.figshare.{id}"), "figshare", "Software"),
            2 => (format!("10.5061/dryad.{}", id % 99991), "Dryad", "Dataset"),
            _ => (format!("10.5281/zenodo.{id}"), "Zenodo", "Dataset"),
        };
        rows.push([doi, inst, publisher.into(), kind.into(), mdy(&mut rng), "NA".into()]);
    }
    rows.shuffle(&mut rng);
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()
}

const OTHER_REPOS: [&str; 20] = [
    "Dryad",
    "ICPSR",
    "Mendeley Data",
    "Deep Blue Data",
    "Data Repository for the University of Minnesota",
    "Duke Research Data Repository",
    "eCommons",
    "VTechData",
    "Open Science Framework",
    "PANGAEA",
    "Qualitative Data Repository",
    "Environmental Data Initiative",
    "Arctic Data Center",
    "ESS-DIVE",
    "DesignSafe",
    "Texas Data Repository",
    "Borealis",
    "DataverseNL",
    "ScholarSphere",
    "Mass Spectrometry Interactive Virtual Environment",
];

/// 4,000 DOIs over 76 repositories and the records as they read today.
/// Only Figshare, Harvard Dataverse, Neotoma and Zenodo lost affiliations.
fn drift(out: &Path) -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd21f7);
    let mut entries: Vec<(String, String, Vec<Agent>)> = Vec::new();
    let rads = |rng: &mut ChaCha8Rng| RADS_INSTITUTIONS.choose(rng).unwrap().0;
    let person = |rng: &mut ChaCha8Rng, affs: &[&str]| Agent::personal(format!("Author {}", rng.random_range(1000..9999)), affs);

    let mut add = |repo: &str, prefix: &str, total: usize, unmatched: usize, bad: &dyn Fn(&mut ChaCha8Rng, usize) -> Vec<Agent>, rng: &mut ChaCha8Rng| {
        for i in 0..total {
            let doi = format!("{prefix}{:07}", rng.random_range(0..10_000_000u32) * 10 + i as u32 % 10);
            let agents = if i < unmatched {
                bad(rng, i)
            } else {
                let a = rads(rng);
                vec![person(rng, &[a]), person(rng, &[])]
            };
            entries.push((doi, repo.to_string(), agents));
        }
    };
    let chinese = ["Sichuan University", "Zhejiang University", "Central South University", "Shandong University", "Jilin University"];
    add(
        "Figshare",
        "10.6084/m9.figshare.",
        443,
        290,
        &|rng, i| {
            if i % 3 == 0 {
                vec![person(rng, &[])]
            } else {
                let inst = *chinese.choose(rng).unwrap();
                vec![person(rng, &[inst])]
            }
        },
        &mut rng,
    );
    add(
        "Harvard Dataverse",
        "10.7910/DVN/",
        1832,
        6,
        &|rng, i| vec![person(rng, &[if i == 5 { "MIT" } else { "Duke Kunshan University" }])],
        &mut rng,
    );
    add("Neotoma", "10.21233/", 32, 14, &|rng, _| vec![person(rng, &[])], &mut rng);
    let zen_bad = ["Duke Kunshan University", "Duke Kinsman University", "West Virginia Institute of Technology"];
    add("Zenodo", "10.5281/zenodo.", 563, 5, &|rng, i| vec![person(rng, &[zen_bad[i % 3]])], &mut rng);
    // 72 further repositories share the remaining 1,130 DOIs.
    let mut names: Vec<String> = OTHER_REPOS.iter().map(|s| s.to_string()).collect();
    for i in names.len()..72 {
        names.push(format!("Data Archive {i:02}"));
    }
    let mut left = 1130usize;
    for (i, name) in names.iter().enumerate() {
        let n = if i == names.len() - 1 { left } else { (1 + rng.random_range(0..28)).min(left - (names.len() - 1 - i)) };
        left -= n;
        add(name, &format!("10.{}/rads.", 20000 + i), n, 0, &|_, _| vec![], &mut rng);
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries.dedup_by(|a, b| a.0 == b.0);
    assert_eq!(entries.len(), 4000, "DOI collision in drift fixture");

    let mut w = csv::Writer::from_path(out.join("rads_drift_dois.csv"))?;
    w.write_record(["doi", "repository"])?;
    let mut records = Vec::new();
    for (doi, repo, agents) in &entries {
        w.write_record([doi, repo])?;
        let mut r = DatasetRecord::new(doi.to_lowercase(), SourceTag::DataciteGeneral);
        r.registry = Registry::DataCite;
        r.publisher_raw = repo.clone();
        r.repository = repo.clone();
        r.resource_type_general = "Dataset".into();
        r.creators = agents.clone();
        records.push(r);
    }
    w.flush()?;
    write_jsonl(fs::File::create(out.join("rads_drift_snapshot.jsonl"))?, &records)?;

    let mut f = fs::File::create(out.join("rads_institutions.toml"))?;
    writeln!(
        f,
        r#"# Any of the six institutions counts as a match.
official_name = "Duke University"
permutations = [
  "Duke University",
  "University of Michigan",
  "University of Minnesota",
  "Cornell University",
  "Washington University in St. Louis",
  "Virginia Tech",
  "Virginia Polytechnic Institute and State University",
]
ror_id = "https://ror.org/00py81415""#
    )
}

fn crossref_item(doi: &str, kind: &str, publisher: &str, title: &str, affs: &[&str]) -> Value {
    let authors: Vec<Value> = affs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let aff: Vec<Value> = if a.is_empty() { vec![] } else { vec![json!({"name": a})] };
            json!({"given": format!("A{i}"), "family": format!("Author{i}"), "sequence": if i == 0 {"first"} else {"additional"}, "affiliation": aff})
        })
        .collect();
    json!({
        "DOI": doi,
        "type": kind,
        "publisher": publisher,
        "title": [title],
        "author": authors,
        "created": {"date-time": "2023-05-04T10:00:00Z"},
        "issued": {"date-parts": [[2023, 5, 4]]},
    })
}

/// 120 candidates from a fuzzy affiliation search; six are truly affiliated.
fn crossref(out: &Path) -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc205);
    let true_affs = [
        "University of Texas at Austin",
        "The University of Texas at Austin, Department of Chemistry",
        "Jackson School of Geosciences, The University of Texas at Austin, Austin, TX, USA",
        "UT Austin",
        "Univ. of Texas at Austin",
        "Bureau of Economic Geology, University of Texas at Austin",
    ];
    let confounders = [
        "Stephen F. Austin State University",
        "Stephen F. Austin University",
        "University of Texas at Dallas",
        "The University of Texas at Arlington",
        "University of Texas at San Antonio",
        "The University of Texas at El Paso",
        "University of Texas Medical Branch",
        "UT Southwestern Medical Center",
        "The University of Texas Health Science Center at Houston",
        "The University of Texas MD Anderson Cancer Center",
        "Austin College",
        "Austin Peay State University",
        "Texas State University",
        "Austin Community College",
        "University of Texas System",
        "Texas A&M University",
    ];
    let publishers = ["Dryad", "American Geophysical Union", "Elsevier BV", "Wiley", "Optica Publishing Group", "ENCODE Data Coordination Center"];
    let mut items = Vec::new();
    let mut labels = Vec::new();
    for (i, aff) in true_affs.iter().enumerate() {
        let doi = format!("10.{}/ut.{:04}", 5000 + i, rng.random_range(0..9999));
        items.push(crossref_item(&doi, "dataset", publishers[i % publishers.len()], &format!("Affiliated dataset {i}"), &["", aff]));
        labels.push((doi, true));
    }
    // Peer reviews carry the right affiliation but are not datasets.
    for i in 0..14 {
        let doi = format!("10.3410/f.{}.{}", 700000 + rng.random_range(0..99999), 790000 + i);
        items.push(crossref_item(&doi, "peer-review", if i % 2 == 0 { "H1 Connect" } else { "Faculty Opinions Ltd" }, "Faculty recommendation", &[true_affs[i % 6]]));
        labels.push((doi, false));
    }
    while items.len() < 120 {
        let i = items.len();
        let doi = format!("10.{}/x.{:05}", 6000 + i % 40, rng.random_range(0..99999));
        let aff = confounders.choose(&mut rng).unwrap();
        let second = if rng.random_bool(0.3) { *confounders.choose(&mut rng).unwrap() } else { "" };
        items.push(crossref_item(&doi, "dataset", publishers.choose(&mut rng).unwrap(), &format!("Candidate {i}"), &[aff, second]));
        labels.push((doi, false));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut rng);
    let items: Vec<Value> = order.iter().map(|&i| items[i].clone()).collect();
    let page = json!({"status": "ok", "message-type": "work-list", "message": {"total-results": 120, "items": items, "next-cursor": "END"}});
    fs::write(out.join("crossref_works.json"), serde_json::to_vec_pretty(&page).unwrap())?;
    let mut w = csv::Writer::from_path(out.join("crossref_labels.csv"))?;
    w.write_record(["doi", "affiliated"])?;
    labels.sort();
    for (d, a) in labels {
        w.write_record([d.to_lowercase(), a.to_string()])?;
    }
    w.flush()
}

/// 50 partner-published Figshare records; 14 supplement one of the 10
/// affiliated articles.
fn mediated(out: &Path) -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3ed1);
    let articles: Vec<String> = (0..10).map(|i| format!("10.1080/{}.2023.{:07}", 14000000 + i * 311, rng.random_range(0..9_999_999))).collect();
    let strangers: Vec<String> = (0..24).map(|i| format!("10.1080/{}.2022.{:07}", 15000000 + i * 17, rng.random_range(0..9_999_999))).collect();
    let per_article = [3, 2, 2, 1, 1, 1, 1, 1, 1, 1];
    let mut used = std::collections::BTreeSet::new();
    let mut records = Vec::new();
    let mut push = |article: &str, upper: bool, rng: &mut ChaCha8Rng| {
        let id = figshare_id(rng, &mut used);
        let mut r = DatasetRecord::new(format!("10.6084/m9.figshare.{id}.v1"), SourceTag::DataciteOpenalex);
        r.registry = Registry::DataCite;
        r.publisher_raw = "Taylor & Francis".into();
        r.repository = "Taylor & Francis".into();
        r.title = format!("Supplemental material for {article}");
        r.resource_type_general = "Dataset".into();
        r.publication_year = Some(2023);
        let target = if upper { article.to_uppercase() } else { article.to_string() };
        r.related_identifiers.push(RelatedIdentifier::new("IsSupplementTo", &target, "DOI"));
        r.creators = vec![Agent::personal(format!("Author {}", rng.random_range(100..999)), &[])];
        records.push(r);
    };
    for (a, n) in articles.iter().zip(per_article) {
        for k in 0..n {
            push(a, k == 1, &mut rng);
        }
    }
    for i in 0..36 {
        push(&strangers[i % strangers.len()], false, &mut rng);
    }
    records.shuffle(&mut rng);
    write_jsonl(fs::File::create(out.join("mediated_records.jsonl"))?, &records)?;
    let body: String = articles.iter().map(|a| format!("https://doi.org/{a}\n")).collect();
    fs::write(out.join("mediated_articles.txt"), body)
}

/// 200 Dryad records; 20 list publicationYear 2025 against a 2024
/// registration and repository date.
fn dryad(out: &Path) -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd27ad);
    let mut records = Vec::new();
    let mut dates = csv::Writer::from_path(out.join("dryad_repo_dates.csv"))?;
    dates.write_record(["doi", "date"])?;
    let mut ids: Vec<String> = Vec::new();
    while ids.len() < 200 {
        let alphabet = b"0123456789abcdefghjkmnpqrstvwxyz";
        let id: String = (0..10).map(|_| alphabet[rng.random_range(0..alphabet.len())] as char).collect();
        let doi = format!("10.5061/dryad.{id}");
        if !ids.contains(&doi) {
            ids.push(doi);
        }
    }
    let injected: std::collections::BTreeSet<usize> = rand::seq::index::sample(&mut rng, 200, 20).into_iter().collect();
    for (i, doi) in ids.iter().enumerate() {
        let mut r = DatasetRecord::new(doi.clone(), SourceTag::DataciteGeneral);
        r.registry = Registry::DataCite;
        r.publisher_raw = "Dryad".into();
        r.repository = "Dryad".into();
        r.resource_type_general = "Dataset".into();
        let (year, m, d) = if injected.contains(&i) {
            (2024, rng.random_range(1..13), rng.random_range(1..29))
        } else {
            (rng.random_range(2012..2025), rng.random_range(1..13), rng.random_range(1..29))
        };
        let date = format!("{year}-{m:02}-{d:02}");
        r.registered = Some(format!("{date}T12:00:00Z"));
        r.publication_year = Some(if injected.contains(&i) { 2025 } else { year });
        records.push(r);
        // A few records have no repository date at all.
        if i % 67 != 5 {
            dates.write_record([doi.as_str(), date.as_str()])?;
        }
    }
    dates.flush()?;
    write_jsonl(fs::File::create(out.join("dryad_records.jsonl"))?, &records)?;
    let mut w = csv::Writer::from_path(out.join("dryad_injected.csv"))?;
    w.write_record(["doi"])?;
    for i in &injected {
        w.write_record([&ids[*i]])?;
    }
    w.flush()
}
