"""Smoke test for the datahunt Python bindings.

Build and install first:
    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/datahunt-*.whl
then run `python python/smoke_test.py` from the repository root.
"""

import json
import pathlib

import datahunt

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "crates" / "core" / "tests" / "fixtures"


def load_jsonl(name):
    with open(FIXTURES / name, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def main():
    ut = datahunt.InstitutionProfile.ut_austin()
    assert len(ut.permutations) == 14, ut.permutations
    assert ut.match_text("Dept. of Geology, University of Texas at Austin") is not None
    assert ut.match_text("Stephen F. Austin State University") is None

    custom = datahunt.InstitutionProfile("Rice University", ["Rice University"], "https://ror.org/008zs3103")
    assert custom.match_text("rice university") == "Rice University"
    try:
        datahunt.InstitutionProfile("X", ["Y"], "https://ror.org/008zs3103")
    except ValueError:
        pass
    else:
        raise AssertionError("official name outside permutations should be rejected")

    assert datahunt.normalize_doi("https://doi.org/10.5061/DRYAD.ABC") == "10.5061/dryad.abc"

    mediated = load_jsonl("mediated_records.jsonl")
    articles = (FIXTURES / "mediated_articles.txt").read_text().split()
    joined = datahunt.join_mediated(mediated, articles)
    assert len(joined) == 14, len(joined)
    cleaned, report = datahunt.clean(joined)
    assert len(cleaned) == 10, len(cleaned)
    for stage in report["stages"]:
        dropped = sum(1 for d in report["drops"] if d["stage"] == stage["name"])
        assert stage["before"] - stage["after"] == dropped
    again, _ = datahunt.clean(cleaned)
    assert again == cleaned

    page = json.loads((FIXTURES / "crossref_works.json").read_text())
    kept = datahunt.crossref_post_filter(page["message"]["items"], ut)
    assert len(kept) == 6, len(kept)

    assert datahunt.parse_si_suffix("10.1371/journal.pone.0297637.s001") == ("10.1371/journal.pone.0297637", "s", 1)
    assert datahunt.si_candidates("10.1371/journal.pone.0297637", "s", 3)[-1] == "10.1371/journal.pone.0297637.s003"

    rads = datahunt.rads_reanalyze(str(FIXTURES / "rads_subset.csv"))
    assert (rads["figshare_rows"], rads["after_versions"], rads["articles"]) == (2276, 1040, 268)

    dryad = load_jsonl("dryad_records.jsonl")
    with open(FIXTURES / "dryad_repo_dates.csv", encoding="utf-8") as f:
        next(f)
        repo_dates = dict(line.strip().split(",", 1) for line in f if line.strip())
    audit = datahunt.audit_dates(dryad, repo_dates)
    assert sum(1 for r in audit["rows"] if r["concordant"] is False) == 20

    with open(FIXTURES / "rads_drift_dois.csv", encoding="utf-8") as f:
        next(f)
        dois = [tuple(line.rstrip("\n").split(",", 1)) for line in f if line.strip()]
    rads_profile = datahunt.InstitutionProfile.from_toml((FIXTURES / "rads_institutions.toml").read_text())
    snapshot = load_jsonl("rads_drift_snapshot.jsonl")
    a = datahunt.audit_drift(dois, rads_profile, snapshot, 300, 5)
    b = datahunt.audit_drift(dois, rads_profile, snapshot, 300, 5)
    assert a["csv"] == b["csv"] and a["csv"].startswith("repository,total,unmatched,errors")

    tables = datahunt.assess(dryad, ut)
    assert tables["repositories"] == {"Dryad": 200}, tables["repositories"]

    cfg = datahunt.load_config(str(ROOT / "config" / "utaustin.toml"))
    assert cfg["institution"]["ror_id"] == "https://ror.org/00hj54h04"

    print(f"datahunt {datahunt.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
