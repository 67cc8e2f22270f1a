//! Brute-force reference for the cleaning pipeline. Every rule is written
//! as a plain scan or group-by over the generator's DOI shapes, without the
//! library's grammar, lineage or name-resolution code.

use std::collections::BTreeMap;

use datahunt_core::model::DatasetRecord;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Drop {
    pub doi: String,
    pub stage: &'static str,
    pub into: Option<String>,
}

#[derive(Debug, Default)]
pub struct Expected {
    pub records: Vec<DatasetRecord>,
    pub stages: Vec<(&'static str, usize, usize)>,
    pub drops: Vec<Drop>,
}

pub struct OracleOptions {
    pub designsafe: bool,
    pub dataverse_partial: bool,
}

fn lower(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn prefix(doi: &str) -> &str {
    doi.split('/').next().unwrap()
}

fn repository(r: &DatasetRecord) -> String {
    if r.doi.contains("zenodo") {
        return "Zenodo".into();
    }
    match prefix(&r.doi) {
        "10.6084" => return "Figshare".into(),
        "10.5061" => return "Dryad".into(),
        "10.5281" => return "Zenodo".into(),
        _ => {}
    }
    match lower(&r.publisher_raw).as_str() {
        "texas data repository" => "Texas Data Repository".into(),
        "designsafe-ci" | "designsafe" => "DesignSafe".into(),
        "icpsr" => "ICPSR".into(),
        "emsl" => "EMSL".into(),
        "figshare" => "Figshare".into(),
        "dryad" => "Dryad".into(),
        _ => r.publisher_raw.clone(),
    }
}

const PARTNERS: [&str; 3] = ["taylor & francis", "sage journals", "optica publishing group"];

fn is_dataverse(r: &DatasetRecord) -> bool {
    matches!(prefix(&r.doi), "10.18738" | "10.7910")
}

/// `stem, n` for a trailing `.vN`.
fn version_of(doi: &str) -> Option<(String, u32)> {
    let (stem, tail) = doi.rsplit_once('.')?;
    let n: u32 = tail.strip_prefix('v')?.parse().ok()?;
    Some((stem.to_string(), n))
}

fn zenodo_n(doi: &str) -> u64 {
    doi.rsplit('.').next().unwrap().parse().unwrap()
}

fn supplemented(r: &DatasetRecord) -> Vec<String> {
    let mut v: Vec<String> = r
        .related_identifiers
        .iter()
        .filter(|x| x.relation_type == "IsSupplementTo")
        .map(|x| x.identifier.to_lowercase())
        .collect();
    v.sort();
    v
}

struct Acc {
    stages: Vec<(&'static str, usize, usize)>,
    drops: Vec<Drop>,
}

impl Acc {
    fn run(&mut self, stage: &'static str, input: Vec<DatasetRecord>, f: impl FnOnce(Vec<DatasetRecord>, &mut Vec<Drop>) -> Vec<DatasetRecord>) -> Vec<DatasetRecord> {
        let before = input.len();
        let mut drops = Vec::new();
        let mut out = f(input, &mut drops);
        for d in &mut drops {
            d.stage = stage;
        }
        out.sort_by(|a, b| a.doi.cmp(&b.doi));
        self.stages.push((stage, before, out.len()));
        self.drops.extend(drops);
        out
    }
}

type FlatKey = (String, String, String, Vec<(String, String)>, Option<String>);
type PartialKey = (String, String, Vec<(String, Vec<String>)>, Vec<String>);

fn drop(doi: &str, into: Option<String>) -> Drop {
    Drop { doi: doi.to_string(), stage: "", into }
}

/// Keeps the smallest DOI per key; the kept record inherits a group id
/// (its own DOI unless one is already set) once anything merged into it.
fn keep_smallest<K: Ord>(groups: BTreeMap<K, Vec<DatasetRecord>>, drops: &mut Vec<Drop>, out: &mut Vec<DatasetRecord>) {
    for (_, mut g) in groups {
        g.sort_by(|a, b| a.doi.cmp(&b.doi));
        let mut keep = g.remove(0);
        for other in &g {
            drops.push(drop(&other.doi, Some(keep.doi.clone())));
        }
        if !g.is_empty() && keep.consolidation_group.is_none() {
            keep.consolidation_group = Some(keep.doi.clone());
        }
        out.push(keep);
    }
}

pub fn clean(input: &[DatasetRecord], opts: &OracleOptions) -> Expected {
    let mut acc = Acc { stages: vec![], drops: vec![] };
    let records: Vec<DatasetRecord> = input.iter().filter(|r| r.retained).cloned().collect();

    let records = acc.run("normalize_names", records, |rs, drops| {
        let mut out: Vec<DatasetRecord> = Vec::new();
        let mut dois: Vec<String> = rs.iter().map(|r| r.doi.clone()).collect();
        dois.sort();
        dois.dedup();
        for doi in dois {
            let mut same: Vec<DatasetRecord> = rs
                .iter()
                .filter(|r| r.doi == doi)
                .map(|r| {
                    let mut r = r.clone();
                    r.repository = repository(&r);
                    r
                })
                .collect();
            same.sort_by_key(|r| (r.source.precedence(), serde_json::to_string(r).unwrap()));
            for _ in 1..same.len() {
                drops.push(drop(&doi, Some(doi.clone())));
            }
            out.push(same.remove(0));
        }
        out
    });

    let records = acc.run("remove_file_level", records, |rs, drops| {
        let present: Vec<String> = rs.iter().map(|r| r.doi.clone()).collect();
        let mut out = Vec::new();
        for r in rs {
            let parts: Vec<&str> = r.doi.split('/').collect();
            let file_parent = match prefix(&r.doi) {
                "10.18738" if parts.len() == 4 => Some(parts[..3].join("/")),
                "10.5061" if parts.len() == 3 && parts[2].chars().all(|c| c.is_ascii_digit()) => Some(parts[..2].join("/")),
                _ => None,
            };
            match file_parent {
                Some(p) => drops.push(drop(&r.doi, present.contains(&p).then_some(p))),
                None => out.push(r),
            }
        }
        out
    });

    let records = acc.run("consolidate_zenodo", records, |rs, drops| {
        let (zen, mut out): (Vec<_>, Vec<_>) = rs.into_iter().partition(|r| r.repository == "Zenodo");
        let concept_of = |r: &DatasetRecord| -> Option<String> {
            if let Some(t) = r.related_identifiers.iter().find(|x| x.relation_type == "IsVersionOf") {
                return Some(t.identifier.clone());
            }
            let referenced = zen.iter().any(|o| o.related_identifiers.iter().any(|x| x.relation_type == "IsVersionOf" && x.identifier == r.doi));
            let has_versions = r.related_identifiers.iter().any(|x| x.relation_type == "HasVersion");
            (referenced || has_versions).then(|| r.doi.clone())
        };
        let mut groups: BTreeMap<String, Vec<DatasetRecord>> = BTreeMap::new();
        let mut loose: Vec<DatasetRecord> = Vec::new();
        for r in &zen {
            match concept_of(r) {
                Some(k) => groups.entry(k).or_default().push(r.clone()),
                None => loose.push(r.clone()),
            }
        }
        loose.sort_by_key(|r| zenodo_n(&r.doi));
        let mut i = 0;
        while i < loose.len() {
            let key = loose[i].doi.clone();
            let g = groups.entry(key).or_default();
            g.push(loose[i].clone());
            if i + 1 < loose.len() && zenodo_n(&loose[i + 1].doi) == zenodo_n(&loose[i].doi) + 1 {
                g.push(loose[i + 1].clone());
                i += 1;
            }
            i += 1;
        }
        for (key, mut g) in groups {
            g.sort_by(|a, b| a.doi.cmp(&b.doi));
            let rep = g.iter().find(|r| r.doi == key).unwrap_or(&g[0]).doi.clone();
            for mut r in g {
                if r.doi == rep {
                    r.consolidation_group = Some(key.clone());
                    out.push(r);
                } else {
                    drops.push(drop(&r.doi, Some(rep.clone())));
                }
            }
        }
        out
    });

    let records = acc.run("consolidate_versions", records, |rs, drops| {
        let mut out = Vec::new();
        let mut groups: BTreeMap<String, Vec<(u32, DatasetRecord)>> = BTreeMap::new();
        for r in rs {
            if !matches!(prefix(&r.doi), "10.6084" | "10.3886" | "10.17632") {
                out.push(r);
                continue;
            }
            match version_of(&r.doi) {
                Some((stem, n)) => groups.entry(stem).or_default().push((n, r)),
                None => groups.entry(r.doi.clone()).or_default().push((0, r)),
            }
        }
        for (stem, mut g) in groups {
            g.sort_by(|a, b| (a.0, &a.1.doi).cmp(&(b.0, &b.1.doi)));
            let (_, mut keep) = g.remove(0);
            for (_, other) in &g {
                drops.push(drop(&other.doi, Some(keep.doi.clone())));
            }
            if !g.is_empty() && keep.consolidation_group.is_none() {
                keep.consolidation_group = Some(stem);
            }
            out.push(keep);
        }
        out
    });

    let records = acc.run("consolidate_figshare_by_article", records, |rs, drops| {
        let mut out = Vec::new();
        let mut groups: BTreeMap<String, Vec<DatasetRecord>> = BTreeMap::new();
        for r in rs {
            let family = r.repository == "Figshare" || PARTNERS.contains(&lower(&r.publisher_raw).as_str());
            let key = supplemented(&r).into_iter().next().or_else(|| r.linked_article.clone());
            match (family, key) {
                (true, Some(k)) => groups.entry(k).or_default().push(r),
                _ => out.push(r),
            }
        }
        keep_smallest(groups, drops, &mut out);
        out
    });

    let records = acc.run("dedup_flat_metadata", records, |rs, drops| {
        let mut out = Vec::new();
        let mut groups: BTreeMap<FlatKey, Vec<DatasetRecord>> = BTreeMap::new();
        for r in rs {
            if r.title.trim().is_empty() || (r.related_identifiers.is_empty() && r.container_identifier.is_none()) {
                out.push(r);
                continue;
            }
            let related = r.related_identifiers.iter().map(|x| (x.relation_type.clone(), x.identifier.to_lowercase())).collect();
            let first = r.creators.first().map(|a| a.name.clone()).unwrap_or_default();
            groups
                .entry((r.repository.clone(), r.title.clone(), first, related, r.container_identifier.clone()))
                .or_default()
                .push(r);
        }
        keep_smallest(groups, drops, &mut out);
        out
    });

    let records = if opts.designsafe {
        acc.run("filter_designsafe", records, |rs, drops| {
            let mut out = Vec::new();
            for r in rs {
                let qualified = r.creators.iter().chain(&r.contributors).any(|a| {
                    a.affiliations.iter().chain(std::iter::once(&a.name)).any(|s| lower(s).contains("university of texas at austin (utexas.edu)"))
                });
                if lower(&r.repository) != "designsafe" || qualified {
                    out.push(r);
                } else {
                    drops.push(drop(&r.doi, None));
                }
            }
            out
        })
    } else {
        records
    };

    let records = if opts.dataverse_partial {
        acc.run("dedup_dataverse_partial", records, |rs, drops| {
            let mut out = Vec::new();
            let mut groups: BTreeMap<PartialKey, Vec<DatasetRecord>> = BTreeMap::new();
            for r in rs {
                let date = r.available.clone().or(r.registered.clone()).map(|d| d.chars().take(10).collect::<String>());
                match date {
                    Some(d) if is_dataverse(&r) && !r.creators.is_empty() && d.len() == 10 => {
                        let creators = r.creators.iter().map(|a| (a.name.clone(), a.affiliations.clone())).collect();
                        groups.entry((r.repository.clone(), d, creators, r.rights_identifiers.clone())).or_default().push(r);
                    }
                    _ => out.push(r),
                }
            }
            keep_smallest(groups, drops, &mut out);
            out
        })
    } else {
        records
    };

    let mut drops = acc.drops;
    drops.sort();
    Expected { records, stages: acc.stages, drops }
}
