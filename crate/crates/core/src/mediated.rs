//! Figshare deposits made through publisher partnerships. These usually
//! carry no affiliation, so they are tied to the institution through the
//! article they supplement.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{SchemaError, SourceError};
use crate::model::{DatasetRecord, SourceTag};
use crate::sources::datacite::DataciteClient;
use crate::sources::http::{HttpClient, Request};
use crate::sources::{ResourceType, SourceBatch};
use crate::tabular::CsvInput;
use crate::text::normalize_doi;

pub const DOI_RESOLVER: &str = "https://doi.org";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartnerRegistry {
    DataCite,
    Crossref,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartnerPublisher {
    /// Publisher string as it appears in DataCite metadata.
    pub name: String,
    /// OpenAlex publisher id used to find affiliated articles.
    pub openalex_id: String,
    pub registry: PartnerRegistry,
    /// Deposits are split into one DOI per file.
    #[serde(default)]
    pub splits_files: bool,
}

/// Every dataset listing a DataCite-registered partner as publisher, tagged
/// as mediated. Crossref-registered partners are skipped.
pub fn fetch_partner_datasets(client: &DataciteClient, partners: &[PartnerPublisher]) -> Result<SourceBatch, SourceError> {
    let mut out = SourceBatch::default();
    for p in partners.iter().filter(|p| p.registry == PartnerRegistry::DataCite) {
        let b = client.query_publisher(&p.name, &[ResourceType::Dataset])?;
        out.raw_count += b.raw_count;
        if let Some(t) = b.reported_total {
            *out.reported_total.get_or_insert(0) += t;
        }
        out.warnings.extend(b.warnings);
        out.records.extend(b.records.into_iter().map(|mut r| {
            r.source = SourceTag::DataciteOpenalex;
            r
        }));
    }
    out.records.sort_by(|a, b| a.doi.cmp(&b.doi));
    out.records.dedup_by(|a, b| a.doi == b.doi);
    Ok(out)
}

/// Mediated records supplementing one of the affiliated articles, with
/// `linked_article` set to the smallest such article DOI.
pub fn join_on_article_doi(mediated: &[DatasetRecord], affiliated_articles: &[String]) -> Vec<DatasetRecord> {
    let wanted: BTreeSet<String> = affiliated_articles.iter().filter_map(|d| normalize_doi(d).ok()).collect();
    let mut out: Vec<DatasetRecord> = mediated
        .iter()
        .filter_map(|r| {
            let article = r.supplemented_articles().into_iter().find(|a| wanted.contains(a))?;
            let mut r = r.clone();
            r.linked_article = Some(article);
            Some(r)
        })
        .collect();
    out.sort_by(|a, b| a.doi.cmp(&b.doi));
    out
}

/// Supplementary-file DOI kind: `.sNNN` files or `.tNNN` tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiKind {
    S,
    T,
}

impl SiKind {
    fn letter(self) -> char {
        match self {
            SiKind::S => 's',
            SiKind::T => 't',
        }
    }
}

/// A supplementary-information DOI: article DOI plus `.s001`-style suffix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiSuffix {
    pub article_doi: String,
    pub kind: SiKind,
    pub n: u16,
}

impl SiSuffix {
    pub fn parse(doi: &str) -> Option<Self> {
        let (article, tail) = doi.rsplit_once('.')?;
        let mut chars = tail.chars();
        let kind = match chars.next()? {
            's' => SiKind::S,
            't' => SiKind::T,
            _ => return None,
        };
        let digits = chars.as_str();
        if digits.len() != 3 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let n: u16 = digits.parse().ok()?;
        if n == 0 || !article.contains('/') {
            return None;
        }
        Some(SiSuffix { article_doi: article.to_string(), kind, n })
    }

    pub fn assemble(&self) -> String {
        format!("{}.{}{:03}", self.article_doi, self.kind.letter(), self.n)
    }

    /// `.k001` through `.k{max_n}` in order.
    pub fn candidates(article_doi: &str, kind: SiKind, max_n: u16) -> Vec<String> {
        (1..=max_n.min(999))
            .map(|n| SiSuffix { article_doi: article_doi.to_string(), kind, n }.assemble())
            .collect()
    }
}

/// Resolver HEAD probes for `.s001..` then `.t001..`, each series stopping
/// after `max_misses` consecutive misses. Probe errors count as misses.
pub fn probe_si_suffixes(
    http: &HttpClient,
    resolver: &str,
    article_doi: &str,
    max_n: u16,
    max_misses: u32,
) -> Result<Vec<String>, SourceError> {
    if max_n > 99 {
        return Err(SourceError::InvalidRequest(format!("max_n {max_n} above 99")));
    }
    let article = normalize_doi(article_doi)?;
    let mut found = Vec::new();
    for kind in [SiKind::S, SiKind::T] {
        let mut misses = 0;
        for doi in SiSuffix::candidates(&article, kind, max_n) {
            let req = Request::head(format!("{}/{}", resolver.trim_end_matches('/'), doi));
            let hit = match http.send(&req) {
                Ok(resp) => resp.status < 400,
                Err(e) => {
                    log::warn!("SI probe {doi}: {e}");
                    false
                }
            };
            if hit {
                found.push(doi);
                misses = 0;
            } else {
                misses += 1;
                if misses >= max_misses.max(1) {
                    break;
                }
            }
        }
    }
    Ok(found)
}

pub const OSI_DOI_COLUMN: &str = "DOI";
pub const OSI_LOCATION_COLUMN: &str = "Data_Location";
pub const OSI_SI_MARKER: &str = "Supplementary Information";

/// Affiliated article DOIs whose OSI row says data were shared through
/// supplementary information. Sorted and unique.
pub fn filter_osi(osi: &CsvInput, affiliated: &[String]) -> Result<Vec<String>, SchemaError> {
    let (d, l) = (osi.column(OSI_DOI_COLUMN)?, osi.column(OSI_LOCATION_COLUMN)?);
    let wanted: BTreeSet<String> = affiliated.iter().filter_map(|a| normalize_doi(a).ok()).collect();
    let marker = OSI_SI_MARKER.to_lowercase();
    let mut out = BTreeSet::new();
    for (_, row) in osi.rows() {
        let Ok(doi) = normalize_doi(row.get(d).unwrap_or("")) else { continue };
        if wanted.contains(&doi) && row.get(l).unwrap_or("").to_lowercase().contains(&marker) {
            out.insert(doi);
        }
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RelatedIdentifier;
    use crate::sources::http::{FnTransport, Response};
    use crate::sources::ratelimit::{RateLimiter, VirtualClock};
    use proptest::prelude::*;
    use std::sync::Arc;

    #[test]
    fn si_round_trip() {
        let s = SiSuffix::parse("10.1371/journal.pone.0297637.s001").unwrap();
        assert_eq!(s.article_doi, "10.1371/journal.pone.0297637");
        assert_eq!((s.kind, s.n), (SiKind::S, 1));
        assert_eq!(s.assemble(), "10.1371/journal.pone.0297637.s001");
        assert_eq!(SiSuffix::parse("10.1371/journal.pone.0297637"), None);
        assert_eq!(SiSuffix::parse("10.1371/x.s000"), None);
        assert_eq!(SiSuffix::parse("10.1371/x.s01"), None);
        let c = SiSuffix::candidates("10.1371/x", SiKind::S, 3);
        assert_eq!(c, vec!["10.1371/x.s001", "10.1371/x.s002", "10.1371/x.s003"]);
    }

    proptest! {
        #[test]
        fn candidates_parse_back(n in 1u16..100, t in prop::bool::ANY) {
            let kind = if t { SiKind::T } else { SiKind::S };
            let c = SiSuffix::candidates("10.1371/journal.pone.0297637", kind, n);
            prop_assert_eq!(c.len(), n as usize);
            for (i, doi) in c.iter().enumerate() {
                let s = SiSuffix::parse(doi).unwrap();
                prop_assert_eq!(s.n as usize, i + 1);
                prop_assert_eq!(&s.assemble(), doi);
            }
        }
    }

    fn mediated(doi: &str, article: Option<&str>) -> DatasetRecord {
        let mut r = DatasetRecord::new(doi, SourceTag::DataciteOpenalex);
        if let Some(a) = article {
            r.related_identifiers.push(RelatedIdentifier::new("IsSupplementTo", a, "DOI"));
        }
        r
    }

    #[test]
    fn join_keeps_linked_records() {
        let m = vec![
            mediated("10.6084/m9.figshare.1", Some("10.1080/A")),
            mediated("10.6084/m9.figshare.2", Some("10.1080/a")),
            mediated("10.6084/m9.figshare.3", Some("10.1080/b")),
            mediated("10.6084/m9.figshare.4", None),
        ];
        let out = join_on_article_doi(&m, &["https://doi.org/10.1080/a".into()]);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|r| r.linked_article.as_deref() == Some("10.1080/a")));
        assert!(join_on_article_doi(&m, &[]).is_empty());
    }

    #[test]
    fn probe_stops_after_misses() {
        let t = Arc::new(FnTransport::new(|r: &Request| {
            let exists = r.url.contains("pone.1.") && ["s001", "s002", "s004", "t001"].iter().any(|s| r.url.ends_with(s));
            Ok(Response { status: if exists { 302 } else { 404 }, body: vec![] })
        }));
        let http = HttpClient::new(t.clone(), Arc::new(RateLimiter::new(Arc::new(VirtualClock::default()), 10.0)));
        let found = probe_si_suffixes(&http, DOI_RESOLVER, "10.1371/journal.pone.1", 10, 2).unwrap();
        assert_eq!(
            found,
            vec!["10.1371/journal.pone.1.s001", "10.1371/journal.pone.1.s002", "10.1371/journal.pone.1.s004", "10.1371/journal.pone.1.t001"]
        );
        let reqs = t.requests();
        assert!(reqs.iter().all(|r| !r.follow_redirects));
        // s001..s006 (two misses after s004), then t001..t003
        assert_eq!(reqs.len(), 9);
        let none = probe_si_suffixes(&http, DOI_RESOLVER, "10.1371/journal.pone.2", 10, 2).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn osi_filter() {
        let csv = "DOI,Data_Location\n10.1371/a,Supplementary Information\n10.1371/b,Online Repository\n10.1371/c,Supplementary Information; Online Repository\n10.1371/d,Supplementary Information\n";
        let t = CsvInput::read("osi.csv", csv.as_bytes()).unwrap();
        let out = filter_osi(&t, &["10.1371/a".into(), "10.1371/b".into(), "10.1371/C".into()]).unwrap();
        assert_eq!(out, vec!["10.1371/a", "10.1371/c"]);
        let bad = CsvInput::read("osi.csv", "DOI\n10.1371/a\n".as_bytes()).unwrap();
        assert!(matches!(filter_osi(&bad, &[]), Err(SchemaError::MissingColumn { .. })));
    }
}
