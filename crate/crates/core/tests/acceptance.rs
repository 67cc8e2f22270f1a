//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion over all of them.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use datahunt_core::assess::dates::{audit_date_discordance, read_repo_dates};
use datahunt_core::assess::drift::{audit_affiliation_drift, SnapshotFetcher};
use datahunt_core::cleaning::{run_cleaning_pipeline, CleaningOptions, CleaningOutcome};
use datahunt_core::mediated::{join_on_article_doi, SiKind, SiSuffix};
use datahunt_core::model::{DatasetRecord, InstitutionProfile};
use datahunt_core::rads::{read_rads, reanalyze, remove_versions, figshare_datasets, is_version_doi};
use datahunt_core::sources::cache::{CacheMode, RawResponseCache};
use datahunt_core::sources::crossref::{default_excluded_publishers, parse_item, post_filter, CrossrefClient};
use datahunt_core::sources::http::{FnTransport, HttpClient, NetworkGuard, Request, Response};
use datahunt_core::sources::ratelimit::{Clock, RateLimiter, VirtualClock};
use datahunt_core::sources::SourceConfig;
use datahunt_core::tabular::CsvInput;

use common::{fixture, oracle, synth};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn csv_input(name: &str) -> CsvInput {
    CsvInput::open(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn rads_reanalysis() -> Check {
    let start = Instant::now();
    let rows = read_rads(&csv_input("rads_subset.csv")).map_err(|e| e.to_string())?;
    let a = reanalyze(&rows);
    let elapsed = start.elapsed();

    let slice = figshare_datasets(&rows);
    let kept = remove_versions(&slice);
    ensure(kept.iter().all(|r| !is_version_doi(&r.doi)), || "a .v* DOI survived version removal".into())?;
    ensure(slice.len() - kept.len() == slice.iter().filter(|r| is_version_doi(&r.doi)).count(), || {
        "version removal dropped a non-version DOI".into()
    })?;
    for c in &a.institutions {
        ensure(c.retained_after_versions() <= 0.5, || {
            format!("{} keeps {}/{} rows after version removal", c.institution, c.versions_removed, c.reported)
        })?;
    }
    ensure((a.figshare_rows, a.after_versions, a.articles) == (2276, 1040, 268), || {
        format!("{} -> {} -> {}", a.figshare_rows, a.after_versions, a.articles)
    })?;
    ensure(a.consolidated == a.articles, || format!("consolidation left {} entries for {} articles", a.consolidated, a.articles))?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{} -> {} -> {} in {:.2?}", a.figshare_rows, a.after_versions, a.articles, elapsed))
}

fn compare_with_oracle(seed: u64) -> Result<(), String> {
    let corpus = synth::corpus(seed, 200);
    let partial = seed % 2 == 1;
    let opts = CleaningOptions { dataverse_partial_dedup: partial, ..CleaningOptions::default() };
    let got = run_cleaning_pipeline(corpus.clone(), &opts);
    let want = oracle::clean(&corpus, &oracle::OracleOptions { designsafe: true, dataverse_partial: partial });

    let stages: Vec<(&str, usize, usize)> = got.report.stages.iter().map(|s| (s.name.as_str(), s.before, s.after)).collect();
    ensure(stages == want.stages, || format!("seed {seed}: stages {stages:?} vs {:?}", want.stages))?;
    let mut drops: Vec<(String, String, Option<String>)> =
        got.report.drops.iter().map(|d| (d.doi.clone(), d.stage.clone(), d.consolidated_into.clone())).collect();
    drops.sort();
    let mut expected: Vec<(String, String, Option<String>)> =
        want.drops.iter().map(|d| (d.doi.clone(), d.stage.to_string(), d.into.clone())).collect();
    expected.sort();
    ensure(drops == expected, || format!("seed {seed}: drop logs differ"))?;
    ensure(got.records == want.records, || {
        let a: Vec<&str> = got.records.iter().map(|r| r.doi.as_str()).collect();
        let b: Vec<&str> = want.records.iter().map(|r| r.doi.as_str()).collect();
        format!("seed {seed}: records differ\n  pipeline {a:?}\n  oracle   {b:?}")
    })
}

fn oracle_equivalence() -> Check {
    let failures: Vec<String> = (0..100).filter_map(|s| compare_with_oracle(s).err()).collect();
    match failures.first() {
        None => Ok("100/100 seeds match".into()),
        Some(f) => Err(format!("{}/100 seeds match; first: {f}", 100 - failures.len())),
    }
}

fn fixtures_outcomes() -> Vec<(String, Vec<DatasetRecord>, CleaningOutcome)> {
    common::cleaning_fixtures()
        .into_iter()
        .map(|(name, records)| {
            let o = common::clean(records.clone());
            (name, records, o)
        })
        .collect()
}

fn idempotence_and_order(fixtures: &[(String, Vec<DatasetRecord>, CleaningOutcome)]) -> Check {
    for (i, (name, records, once)) in fixtures.iter().enumerate() {
        let twice = common::clean(once.records.clone());
        ensure(twice.records == once.records, || format!("{name}: second pass changed the output"))?;
        let shuffled = common::clean(synth::shuffled(records, 1000 + i as u64));
        ensure(shuffled.records == once.records, || format!("{name}: shuffled input changed the output"))?;
        ensure(shuffled.report == once.report, || format!("{name}: shuffled input changed the report"))?;
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn conservation(fixtures: &[(String, Vec<DatasetRecord>, CleaningOutcome)]) -> Check {
    let mut stages = 0;
    for (name, records, o) in fixtures {
        let mut prev_after = records.len();
        for s in &o.report.stages {
            ensure(s.before == prev_after, || format!("{name}/{}: before {} but previous after {prev_after}", s.name, s.before))?;
            let drops = o.report.drops_in(&s.name).count();
            ensure(s.before - s.after == drops, || format!("{name}/{}: {} - {} != {drops} drops", s.name, s.before, s.after))?;
            prev_after = s.after;
            stages += 1;
        }
        ensure(prev_after == o.records.len(), || format!("{name}: final stage count disagrees with output"))?;
    }
    Ok(format!("{stages} stage reports across {} fixtures", fixtures.len()))
}

fn crossref_post_filter() -> Check {
    let page: serde_json::Value =
        serde_json::from_slice(&std::fs::read(fixture("crossref_works.json")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let items = page["message"]["items"].as_array().ok_or("no items")?;
    let candidates: Vec<DatasetRecord> = items.iter().map(parse_item).collect::<Result<_, _>>()?;
    let kept: BTreeSet<String> = post_filter(candidates.clone(), &InstitutionProfile::ut_austin(), &default_excluded_publishers())
        .into_iter()
        .map(|r| r.doi)
        .collect();

    let labels = csv_input("crossref_labels.csv");
    let (d, a) = (labels.column("doi").unwrap(), labels.column("affiliated").unwrap());
    let truth: BTreeSet<String> = labels.rows().filter(|(_, r)| &r[a] == "true").map(|(_, r)| r[d].to_string()).collect();
    let tp = kept.intersection(&truth).count();
    let precision = if kept.is_empty() { 0.0 } else { tp as f64 / kept.len() as f64 };
    let recall = tp as f64 / truth.len() as f64;
    ensure(candidates.len() == 120 && truth.len() == 6, || format!("fixture has {} items, {} labelled", candidates.len(), truth.len()))?;
    ensure(precision == 1.0 && recall == 1.0, || format!("precision {precision:.3}, recall {recall:.3}"))?;
    Ok(format!("{tp}/{} kept of {} candidates, precision = recall = 100%", truth.len(), candidates.len()))
}

fn mediated_join() -> Check {
    let mediated = common::records("mediated_records.jsonl");
    let articles: Vec<String> =
        std::fs::read_to_string(fixture("mediated_articles.txt")).map_err(|e| e.to_string())?.lines().map(str::to_string).collect();
    let joined = join_on_article_doi(&mediated, &articles);
    ensure((mediated.len(), articles.len()) == (50, 10), || "fixture sizes changed".into())?;
    ensure(joined.len() == 14, || format!("join returned {}", joined.len()))?;
    let cleaned = common::clean(joined);
    ensure(cleaned.records.len() == 10, || format!("consolidation left {}", cleaned.records.len()))?;
    let linked: BTreeSet<_> = cleaned.records.iter().filter_map(|r| r.linked_article.clone()).collect();
    ensure(linked.len() == 10, || "consolidated entries do not cover the ten articles".into())?;
    Ok("50 mediated / 10 articles -> 14 joined -> 10 entries".into())
}

fn suffix_grammar() -> Check {
    let example = "10.1371/journal.pone.0297637.s001";
    let s = SiSuffix::parse(example).ok_or("example did not parse")?;
    ensure(s.article_doi == "10.1371/journal.pone.0297637" && s.kind == SiKind::S && s.n == 1, || format!("parsed {s:?}"))?;
    ensure(s.assemble() == example, || format!("reassembled {}", s.assemble()))?;
    let mut checked = 0;
    for article in ["10.1371/journal.pone.0297637", "10.1371/journal.pbio.3002345", "10.1371/journal.pcbi.1011000", "10.5555/x.y"] {
        for kind in [SiKind::S, SiKind::T] {
            let c = SiSuffix::candidates(article, kind, 99);
            let letter = if kind == SiKind::S { 's' } else { 't' };
            for (i, doi) in c.iter().enumerate() {
                ensure(*doi == format!("{article}.{letter}{:03}", i + 1), || format!("candidate {i} is {doi}"))?;
                ensure(SiSuffix::parse(doi).map(|p| p.assemble()).as_deref() == Some(doi.as_str()), || format!("{doi} does not round-trip"))?;
                checked += 1;
            }
            ensure(c.windows(2).all(|w| w[0] < w[1]), || "candidates out of order".into())?;
        }
    }
    Ok(format!("example round-trips; {checked} candidates in .s001/.t001 order"))
}

type DriftInputs = (Vec<(String, String)>, SnapshotFetcher, InstitutionProfile);

fn drift_inputs() -> Result<DriftInputs, String> {
    let list = csv_input("rads_drift_dois.csv");
    let (d, r) = (list.column("doi").unwrap(), list.column("repository").unwrap());
    let dois: Vec<(String, String)> = list.rows().map(|(_, row)| (row[d].to_lowercase(), row[r].to_string())).collect();
    let snapshot = SnapshotFetcher::new(common::records("rads_drift_snapshot.jsonl"));
    let profile: InstitutionProfile =
        toml::from_str(&std::fs::read_to_string(fixture("rads_institutions.toml")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    Ok((dois, snapshot, profile))
}

fn drift_determinism() -> Check {
    let (dois, snapshot, profile) = drift_inputs()?;
    let render = |size: usize, seed: u64| -> Result<Vec<u8>, String> {
        let report = audit_affiliation_drift(&dois, &profile, size, seed, &snapshot).map_err(|e| e.to_string())?;
        let mut out = Vec::new();
        report.write_csv(&mut out).map_err(|e| e.to_string())?;
        Ok(out)
    };
    for (size, seed) in [(4000, 42), (1000, 7), (250, 2025)] {
        let (a, b) = (render(size, seed)?, render(size, seed)?);
        ensure(a == b, || format!("sample {size} seed {seed} differs between runs"))?;
        let text = String::from_utf8(a).unwrap();
        ensure(text.starts_with("repository,total,unmatched,errors\n"), || "unexpected header".into())?;
        ensure(text.lines().last().is_some_and(|l| l.starts_with("TOTAL,")), || "no TOTAL row".into())?;
    }
    let full = audit_affiliation_drift(&dois, &profile, 4000, 42, &snapshot).map_err(|e| e.to_string())?;
    let shown: Vec<(String, usize, usize)> =
        full.rows.iter().filter(|r| r.unmatched > 0).map(|r| (r.repository.clone(), r.total, r.unmatched)).collect();
    let expected = vec![
        ("Figshare".to_string(), 443, 290),
        ("Harvard Dataverse".to_string(), 1832, 6),
        ("Neotoma".to_string(), 32, 14),
        ("Zenodo".to_string(), 563, 5),
    ];
    ensure(shown == expected, || format!("unmatched rows {shown:?}"))?;
    ensure(full.totals().unmatched == 315 && full.rows.len() == 76, || format!("{} repositories, {} unmatched", full.rows.len(), full.totals().unmatched))?;
    Ok("byte-identical reruns; 4,000 sample gives Figshare 443/290, TOTAL 315 unmatched".into())
}

fn date_discordance() -> Check {
    let records = common::records("dryad_records.jsonl");
    let repo = read_repo_dates(&csv_input("dryad_repo_dates.csv")).map_err(|e| e.to_string())?;
    let injected = csv_input("dryad_injected.csv");
    let col = injected.column("doi").unwrap();
    let truth: BTreeSet<String> = injected.rows().map(|(_, r)| r[col].to_string()).collect();
    let audit = audit_date_discordance(&records, &repo);
    let flagged: BTreeSet<String> = audit.discordant().map(|r| r.doi.clone()).collect();
    ensure(records.len() == 200 && truth.len() == 20, || "fixture sizes changed".into())?;
    ensure(flagged == truth, || {
        format!("flagged {} ({} missed, {} extra)", flagged.len(), truth.difference(&flagged).count(), flagged.difference(&truth).count())
    })?;
    Ok("20/20 injected mismatches flagged, no others".into())
}

fn max_in_window(times: &[Duration], window: Duration) -> usize {
    let mut sorted = times.to_vec();
    sorted.sort();
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..sorted.len() {
        while sorted[hi] - sorted[lo] >= window {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best
}

fn crossref_page(req: &Request) -> Result<Response, String> {
    let cursor = req.query.iter().find(|(k, _)| k == "cursor").map(|(_, v)| v.as_str()).unwrap_or("*");
    let body = if cursor == "*" {
        std::fs::read(fixture("crossref_works.json")).map_err(|e| e.to_string())?
    } else {
        br#"{"status":"ok","message":{"total-results":120,"items":[]}}"#.to_vec()
    };
    Ok(Response { status: 200, body })
}

fn limiter_and_replay() -> Check {
    // Sequential client traffic, timestamped by the transport.
    let clock = Arc::new(VirtualClock::default());
    let stamps = Arc::new(Mutex::new(Vec::new()));
    let (c, s) = (clock.clone(), stamps.clone());
    let transport = Arc::new(FnTransport::new(move |_: &Request| {
        s.lock().unwrap().push(c.now());
        Ok(Response { status: 200, body: b"{}".to_vec() })
    }));
    let limiter = Arc::new(RateLimiter::new(clock.clone(), 10.0));
    let http = HttpClient::new(transport, limiter);
    for i in 0..500 {
        http.send(&Request::get(format!("https://api.example.org/items/{i}"))).map_err(|e| e.to_string())?;
    }
    let sequential = max_in_window(&stamps.lock().unwrap(), Duration::from_secs(1));

    // Eight threads queueing on one host.
    let limiter = Arc::new(RateLimiter::new(Arc::new(VirtualClock::default()), 10.0));
    let slots = Arc::new(Mutex::new(Vec::new()));
    std::thread::scope(|scope| {
        for _ in 0..8 {
            let (l, s) = (limiter.clone(), slots.clone());
            scope.spawn(move || {
                for _ in 0..62 {
                    let t = l.acquire("api.example.org");
                    s.lock().unwrap().push(t);
                }
            });
        }
    });
    let mut slots = slots.lock().unwrap().clone();
    slots.extend((0..4).map(|_| limiter.acquire("api.example.org")));
    let concurrent = max_in_window(&slots, Duration::from_secs(1));
    ensure(stamps.lock().unwrap().len() == 500 && slots.len() == 500, || "request count".into())?;
    ensure(sequential <= 11 && concurrent <= 11, || format!("peak {sequential} / {concurrent} requests in one second"))?;

    // Record a Crossref harvest, then replay it behind a network guard.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = SourceConfig::new("https://api.crossref.org");
    let profile = InstitutionProfile::ut_austin();
    let recorder = HttpClient::new(Arc::new(FnTransport::new(crossref_page)), Arc::new(RateLimiter::new(Arc::new(VirtualClock::default()), 50.0)))
        .with_cache(RawResponseCache::new(dir.path(), CacheMode::Record));
    let recorded = CrossrefClient::new(recorder, cfg.clone()).query(&profile).map_err(|e| e.to_string())?;

    let guard = Arc::new(NetworkGuard::default());
    let replay = HttpClient::new(guard.clone(), Arc::new(RateLimiter::new(Arc::new(VirtualClock::default()), 10.0)))
        .with_cache(RawResponseCache::new(dir.path(), CacheMode::Replay));
    let replayed = CrossrefClient::new(replay, cfg).query(&profile).map_err(|e| e.to_string())?;
    ensure(guard.calls() == 0, || format!("replay attempted {} network calls", guard.calls()))?;
    ensure(replayed == recorded && recorded.records.len() == 120, || "replayed batch differs from the recording".into())?;
    Ok(format!("peak {sequential} (sequential) / {concurrent} (8 threads) per second; replay made 0 network calls"))
}

fn run(results: &mut Vec<(u32, &'static str, Check)>, id: u32, name: &'static str, f: impl FnOnce() -> Check) {
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let (tag, detail) = match &r {
        Ok(d) => ("PASS", d.as_str()),
        Err(d) => ("FAIL", d.as_str()),
    };
    println!("[{tag}] {id:>2}. {name}: {detail}");
    results.push((id, name, r));
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut results = Vec::new();
    run(&mut results, 1, "RADS reanalysis", rads_reanalysis);
    run(&mut results, 2, "cleaning matches brute-force oracle", oracle_equivalence);
    let fixtures = fixtures_outcomes();
    run(&mut results, 3, "cleaning is idempotent and order-invariant", || idempotence_and_order(&fixtures));
    run(&mut results, 4, "cleaning report conserves records", || conservation(&fixtures));
    drop(fixtures);
    run(&mut results, 5, "Crossref post-filter", crossref_post_filter);
    run(&mut results, 6, "mediated Figshare join", mediated_join);
    run(&mut results, 7, "supplementary suffix grammar", suffix_grammar);
    run(&mut results, 8, "drift audit determinism", drift_determinism);
    run(&mut results, 9, "date-discordance audit", date_discordance);
    run(&mut results, 10, "rate limiter and offline replay", limiter_and_replay);
    let elapsed = start.elapsed();
    run(&mut results, 11, "offline suite under 60 s", || {
        ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.2?}"))?;
        Ok(format!("{elapsed:.2?}"))
    });

    let failed: Vec<String> = results.iter().filter(|(_, _, r)| r.is_err()).map(|(id, name, _)| format!("{id} ({name})")).collect();
    let passed = results.len() - failed.len();
    println!("{passed}/{} acceptance criteria passed", results.len());
    assert!(failed.is_empty(), "failed: {}", failed.join(", "));
}
