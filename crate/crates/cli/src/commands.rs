use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use datahunt_core::assess::dates::{audit_date_discordance, read_repo_dates};
use datahunt_core::assess::drift::{audit_affiliation_drift, RecordFetcher, SnapshotFetcher};
use datahunt_core::assess::Assessment;
use datahunt_core::cleaning::run_cleaning_pipeline;
use datahunt_core::config::RunConfig;
use datahunt_core::corpus::{load_jsonl, save_jsonl, write_csv};
use datahunt_core::error::{ConfigError, SchemaError};
use datahunt_core::harvest::run_primary_harvest;
use datahunt_core::model::InstitutionProfile;
use datahunt_core::rads::{read_rads, reanalyze};
use datahunt_core::sources::datacite::DataciteClient;
use datahunt_core::tabular::CsvInput;

use crate::{AssessArgs, AuditCommand, CleanArgs, Cli, Command, DatesArgs, DriftArgs, HarvestArgs, RadsArgs};

struct Ctx {
    config: Option<RunConfig>,
    out: PathBuf,
}

impl Ctx {
    fn load(cli: &Cli) -> Result<Self> {
        let config = match &cli.config {
            Some(p) => Some(RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?),
            None => None,
        };
        let out = cli
            .out
            .clone()
            .or_else(|| config.as_ref().map(|c| c.output_dir.clone()))
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Ctx { config, out })
    }

    fn config(&self, command: &str) -> Result<&RunConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid(format!("`{command}` needs --config")).into())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Ctx::load(&cli)?;
    match cli.command {
        Command::Harvest(a) => harvest(ctx, a),
        Command::Clean(a) => clean(&ctx, a),
        Command::Assess(a) => assess(&ctx, a),
        Command::Audit(AuditCommand::Dates(a)) => audit_dates(&ctx, a),
        Command::Audit(AuditCommand::Drift(a)) => audit_drift(&ctx, a),
        Command::Rads(a) => rads(&ctx, a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn save_records(path: &Path, records: &[datahunt_core::model::DatasetRecord]) -> Result<()> {
    save_jsonl(path, records).with_context(|| format!("writing {}", path.display()))
}

fn harvest(mut ctx: Ctx, a: HarvestArgs) -> Result<()> {
    let mut cfg = ctx.config.take().ok_or_else(|| ConfigError::Invalid("`harvest` needs --config".into()))?;
    if !a.sources.is_empty() {
        cfg.restrict_sources(&a.sources)?;
    }
    if let Some(m) = a.mode {
        cfg.harvest.mode = m;
    }
    if !a.resource_types.is_empty() {
        cfg.harvest.resource_types = a.resource_types;
    }
    cfg.harvest.allow_partial |= a.allow_partial;
    if let Some(m) = a.cache_mode {
        cfg.cache.mode = m;
    }
    if let Some(d) = a.cache_dir {
        cfg.cache.dir = d;
    }

    let http = cfg.http_client();
    let clients = cfg.clients(&http)?;
    let outcome = run_primary_harvest(&cfg.institution, &cfg.plan(), &clients)?;

    let raw = ctx.path("raw");
    std::fs::create_dir_all(&raw).with_context(|| format!("creating {}", raw.display()))?;
    for (name, records) in &outcome.streams {
        save_records(&raw.join(format!("{}.jsonl", name.replace([':', '/', ' '], "_"))), records)?;
    }
    save_records(&ctx.path("corpus.jsonl"), &outcome.corpus)?;
    write_csv(create(&ctx.path("corpus.csv"))?, &outcome.corpus)?;
    serde_json::to_writer_pretty(create(&ctx.path("manifest.json"))?, &outcome.manifest)?;

    for s in &outcome.manifest.sources {
        println!("{:<24} {:?} {} records", s.name, s.status, s.record_count);
    }
    println!("merged corpus: {} records", outcome.corpus.len());
    if outcome.manifest.partial {
        eprintln!("warning: partial harvest, see manifest.json");
    }
    Ok(())
}

fn clean(ctx: &Ctx, a: CleanArgs) -> Result<()> {
    let mut opts = ctx.config.as_ref().map(|c| c.cleaning.clone()).unwrap_or_default();
    opts.dataverse_partial_dedup |= a.enable_dataverse_consolidation;
    let input = a.input.unwrap_or_else(|| ctx.path("corpus.jsonl"));
    let records = load_jsonl(&input)?;
    let n = records.len();
    let outcome = run_cleaning_pipeline(records, &opts);

    save_records(&ctx.path("cleaned.jsonl"), &outcome.records)?;
    write_csv(create(&ctx.path("cleaned.csv"))?, &outcome.records)?;
    outcome.report.write_json(create(&ctx.path("cleaning_report.json"))?)?;
    outcome.report.write_drops_csv(create(&ctx.path("drops.csv"))?)?;

    for s in &outcome.report.stages {
        println!("{:<34} {:>7} -> {:>7}", s.name, s.before, s.after);
    }
    println!("{n} records in, {} retained", outcome.records.len());
    Ok(())
}

fn assess(ctx: &Ctx, a: AssessArgs) -> Result<()> {
    let cfg = ctx.config("assess")?;
    let input = a.input.unwrap_or_else(|| ctx.path("cleaned.jsonl"));
    let records = load_jsonl(&input)?;
    let assessment = Assessment::build(&records, &cfg.institution, &cfg.assessment);
    let dir = ctx.path("assessment");
    for path in assessment.write_dir(&dir).with_context(|| format!("writing tables to {}", dir.display()))? {
        println!("{}", path.display());
    }
    Ok(())
}

fn audit_dates(ctx: &Ctx, a: DatesArgs) -> Result<()> {
    let records = load_jsonl(&a.records)?;
    let repo_dates = read_repo_dates(&CsvInput::open(&a.repo_dates)?)?;
    let audit = audit_date_discordance(&records, &repo_dates);
    let path = ctx.path("date_audit.csv");
    audit.write_csv(create(&path)?)?;
    println!("{} records compared, {} discordant -> {}", audit.rows.len(), audit.discordant().count(), path.display());
    Ok(())
}

fn read_doi_list(path: &Path) -> Result<Vec<(String, String)>, SchemaError> {
    let input = CsvInput::open(path)?;
    let doi = input.column("doi")?;
    let repo = input.column("repository").or_else(|_| input.column("publisher"))?;
    Ok(input.rows().map(|(_, r)| (r[doi].trim().to_lowercase(), r[repo].to_string())).collect())
}

fn audit_drift(ctx: &Ctx, a: DriftArgs) -> Result<()> {
    let profile = match (&a.profile, &ctx.config) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let profile: InstitutionProfile = toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
            profile.validate()?;
            profile
        }
        (None, Some(c)) => c.institution.clone(),
        (None, None) => bail!(ConfigError::Invalid("`audit drift` needs --profile or --config".into())),
    };
    let dois = read_doi_list(&a.dois)?;
    let fetcher: Box<dyn RecordFetcher> = match &a.snapshot {
        Some(p) => Box::new(SnapshotFetcher::new(load_jsonl(p)?)),
        None => {
            let mut cfg = ctx.config("audit drift")?.clone();
            if let Some(m) = a.cache_mode {
                cfg.cache.mode = m;
            }
            let datacite = cfg.source("datacite").ok_or_else(|| ConfigError::Invalid("the datacite source is disabled".into()))?;
            Box::new(DataciteClient::new(cfg.http_client(), datacite.clone()))
        }
    };
    let report = audit_affiliation_drift(&dois, &profile, a.sample_size, a.seed, fetcher.as_ref())?;
    let path = ctx.path("drift_audit.csv");
    report.write_csv(create(&path)?)?;
    let t = report.totals();
    println!("{} sampled, {} unmatched, {} errors -> {}", t.total, t.unmatched, t.errors, path.display());
    Ok(())
}

fn rads(ctx: &Ctx, a: RadsArgs) -> Result<()> {
    let rows = read_rads(&CsvInput::open(&a.input)?)?;
    let r = reanalyze(&rows);
    let path = ctx.path("rads_reanalysis.csv");
    r.write_csv(create(&path)?)?;
    println!(
        "figshare rows {}, after version removal {}, unique articles {}, consolidated {}",
        r.figshare_rows, r.after_versions, r.articles, r.consolidated
    );
    Ok(())
}
