"""Corpus generation, batch splitting and the verification run."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from pathlib import Path

from . import verify as V
from .config import RunConfig
from .corpus import CorpusItem, field_hash, gen_corpus
from .decompose import SplitConfig, SplitResult, split
from .grid import GridField, lp_quasinorm
from .io import read_field, write_field

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "id", "family", "split", "alpha", "beta", "lambda", "K", "measures", "atom_count",
    "C_w", "C_w_atomic", "C_v", "norm_residual", "norm_localization", "reconstruction", "degenerate",
]
STABLE_CONSTANTS = ("C_w", "C_w_atomic", "C_v")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_fmt(x) for x in v)
    return str(v)


def corpus_for(cfg: RunConfig, points: int | None = None) -> list[CorpusItem]:
    c = cfg.corpus
    return gen_corpus(cfg.spec(points), c["count"], c["seed"], tuple(c["families"]), tuple(c["splits"]), cfg.p1, cfg.p2, c["band"])


def split_item(cfg: RunConfig, item: CorpusItem) -> SplitResult:
    spec = item.f.spec
    return split(item.kin, SplitConfig(ladder=cfg.ladder(spec), cone=cfg.cone()))


def summary_row(item: CorpusItem, res: SplitResult) -> dict:
    d = res.diagnostics
    verdict = V.kclosed_verdict(item.kin, res).constants
    fn = lp_quasinorm(item.f, 2)
    return {
        "id": item.id,
        "family": item.family,
        "split": item.descriptor(),
        "alpha": d["alpha"],
        "beta": d["beta"],
        "lambda": d["lambda"],
        "K": d.get("K"),
        "measures": d["measures"],
        "atom_count": d["atom_count"],
        "C_w": verdict["C_w"],
        "C_w_atomic": verdict["C_w_atomic"] if res.degenerate is None else math.nan,
        "C_v": verdict["C_v"],
        "norm_residual": d["norm_residual"] / fn if fn > 0 else 0.0,
        "norm_localization": d["norm_localization"] / fn if fn > 0 else 0.0,
        "reconstruction": verdict["reconstruction_rel_error"],
        "degenerate": d.get("degenerate") or "",
    }


def summary_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in SUMMARY_COLUMNS])
    return buf.getvalue()


def write_corpus(items: list[CorpusItem], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    rows = ["id,family,split,parameter,sha256"]
    for it in items:
        d = out / f"item_{it.id:03d}"
        d.mkdir(exist_ok=True)
        write_field(d / "f.hsf", it.f)
        for i, (a, b) in enumerate(zip(it.kin.alpha, it.kin.beta)):
            write_field(d / f"alpha{i + 1}.hsf", a)
            write_field(d / f"beta{i + 1}.hsf", b)
        rows.append(f"{it.id},{it.family},{it.split},{it.parameter!r},{field_hash(it.f)}")
    (out / "corpus.csv").write_text("\n".join(rows) + "\n")


def run_gen_corpus(cfg: RunConfig) -> list[CorpusItem]:
    items = corpus_for(cfg)
    write_corpus(items, cfg.out / "corpus")
    return items


def run_decompose(cfg: RunConfig) -> list[dict]:
    """Split every corpus item; writes ``summary.csv`` (and item directories)."""
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for item in corpus_for(cfg):
        res = split_item(cfg, item)
        rows.append(summary_row(item, res))
        if cfg.data["save_items"]:
            res.save(out / "items" / f"item_{item.id:03d}")
        log.info("item %d: K=%s atoms=%d", item.id, res.diagnostics.get("K"), len(res.atoms))
    (out / "summary.csv").write_text(summary_csv(rows))
    return rows


# ---------------------------------------------------------------------------
# verification


def _merge_reports(name: str, reports: list[V.Report]) -> V.Report:
    """Corpus-level report: fails if any item fails; numeric constants become maxima."""
    if not reports:
        return V.Report(name, V.REPORT, {}, 0, blocking=False)
    status = V.FAIL if any(r.status == V.FAIL for r in reports) else (V.PASS if any(r.status == V.PASS for r in reports) else V.REPORT)
    consts: dict = {}
    for r in reports:
        for k, v in r.constants.items():
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                continue
            if k not in consts or (v > consts[k]) or (isinstance(v, float) and math.isnan(v)):
                consts[k] = v
    rep = V.Report(name, status, consts, sum(r.samples for r in reports), reports[0].seed, reports[0].blocking)
    rep.notes = [n for r in reports for n in r.notes][:20]
    return rep


def item_checks(cfg: RunConfig, item: CorpusItem, res: SplitResult) -> list[V.Report]:
    ladder, cone = res.ladder, res.cone
    kin, p1 = item.kin, cfg.p1
    tol = cfg.tolerances["majorization"]
    out = [
        V.reproduction_check(item.f, ladder),
        V.majorization_check(kin, ladder, None, tol),
        V.majorization_check(kin, ladder, cfg.verify["exploratory_delta"], tol),
        V.maximal_domination_check(kin, ladder, cone),
        V.measure_bound_check(kin, res),
        V.layer_cake_check(res, p1),
        V.atom_check(res, p1),
        V.boundary_diagnostics(res),
        V.v_norm_check(res, kin, seed=item.id),
        V.kclosed_verdict(kin, res),
    ]
    out[2].check_name = "majorization_exploratory"
    for r in out:
        r.notes = [f"item {item.id}: {n}" for n in r.notes]
    return out


def corpus_pass(cfg: RunConfig, points: int | None = None) -> tuple[list[CorpusItem], list[dict], dict[str, list[V.Report]]]:
    items = corpus_for(cfg, points)
    rows, by_check = [], {}
    for item in items:
        res = split_item(cfg, item)
        rows.append(summary_row(item, res))
        for r in item_checks(cfg, item, res):
            if r.check_name == "kclosed" and res.degenerate is not None:
                r.notes.append(f"item {item.id}: degenerate ({res.degenerate})")
            by_check.setdefault(r.check_name, []).append(r)
    return items, rows, by_check


def stability_report(coarse: dict[str, list[V.Report]], fine: dict[str, list[V.Report]], tol: float) -> V.Report:
    """Relative change of corpus maxima of the implied constants between two grids."""
    consts, ok = {}, True
    pairs = [("kclosed", k) for k in STABLE_CONSTANTS]
    extra = [("maximal_domination", "C"), ("measure_bound", "C"), ("boundary", "C_u"), ("boundary", "C_grad")]
    notes = []
    for check, key in pairs + extra:
        a = [r.constants.get(key) for r in coarse.get(check, [])]
        b = [r.constants.get(key) for r in fine.get(check, [])]
        a = [x for x in a if isinstance(x, float) and math.isfinite(x)]
        b = [x for x in b if isinstance(x, float) and math.isfinite(x)]
        if not a or not b:
            continue
        ma, mb = max(a), max(b)
        change = abs(mb - ma) / ma if ma > 0 else (0.0 if mb == 0 else math.inf)
        consts[f"{check}.{key}"] = [ma, mb, change]
        if change > tol:
            if (check, key) in pairs:
                ok = False
            notes.append(f"{check}.{key}: corpus max {ma:.4g} -> {mb:.4g} ({change:.1%})")
    return V.Report("refinement_stability", V.PASS if ok else V.FAIL, consts, len(coarse.get("kclosed", [])), notes=notes)


def identity_checks(cfg: RunConfig, items: list[CorpusItem]) -> list[V.Report]:
    k = cfg.verify["identity_items"]
    green = [V.green_identity_check(it.f, cfg.ladder(it.f.spec)) for it in items[:k]]
    single = V.single_mode_green()
    single_rep = V.Report("green_single_mode", V.PASS if single <= 1e-6 else V.FAIL, {"rel_error": single}, 1)
    ball = [V.ball_divergence_check(it.f, cfg.ladder(it.f.spec), seed=it.id, samples=cfg.verify["ball_samples"]) for it in items[:k]]
    return [_merge_reports("green_identity", green), single_rep, _merge_reports("ball_divergence", ball)]


def plot_data(out: Path, rows: list[dict], by_check: dict[str, list[V.Report]], extra: list[V.Report]) -> None:
    """CSV series for threshold-vs-measure curves, constant histograms and refinement curves."""
    buf = ["item,k,threshold,measure"]
    for r in rows:
        lam = r["lambda"]
        if lam is None:
            continue
        for k, m in enumerate(r["measures"]):
            buf.append(f"{r['id']},{k},{lam * 2.0**k!r},{m!r}")
    (out / "level_measures.csv").write_text("\n".join(buf) + "\n")
    buf = ["item,check,constant,value"]
    for name in sorted(by_check):
        for i, rep in enumerate(by_check[name]):
            for k, v in rep.constants.items():
                if isinstance(v, float):
                    buf.append(f"{rows[i]['id']},{name},{k},{v!r}")
    (out / "constants.csv").write_text("\n".join(buf) + "\n")
    buf = ["check,quantity,coarse,fine,factor"]
    for rep in extra:
        c = rep.constants
        if rep.check_name == "green_identity":
            buf.append(f"green_identity,residual,{c.get('residual')!r},{c.get('residual_refined')!r},{c.get('factor')!r}")
        elif rep.check_name == "ball_divergence":
            buf.append(f"ball_divergence,rel_error,{c.get('rel_error')!r},{c.get('rel_error_refined')!r},{c.get('factor')!r}")
        elif rep.check_name == "refinement_stability":
            for k, (a, b, ch) in c.items():
                buf.append(f"refinement,{k},{a!r},{b!r},{ch!r}")
    (out / "refinement.csv").write_text("\n".join(buf) + "\n")


def run_verify(cfg: RunConfig, lemma_hook: float | None = None) -> tuple[dict, int]:
    """All checks on the corpus; returns the verdict and the exit code (0 pass, 1 failure).

    ``lemma_hook`` replaces the factor of the scalar lemma (test fixture).
    """
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    vcfg = cfg.verify
    factor = vcfg["lemma_factor"] if lemma_hook is None else lemma_hook
    seed = cfg.corpus["seed"]
    reports = [V.scalar_lemma_suite(vcfg["lemma_samples"], seed, factor, adversarial=1000)]
    items, rows, by_check = corpus_pass(cfg)
    reports += [_merge_reports(name, reps) for name, reps in by_check.items()]
    extra = identity_checks(cfg, items)
    if vcfg["refine"] and cfg.spec().points >= 32:
        _, _, coarse = corpus_pass(cfg, cfg.spec().points // 2)
        extra.append(stability_report(coarse, by_check, cfg.tolerances["stability"]))
    reports += extra
    failures = [r.check_name for r in reports if r.blocking and r.status == V.FAIL]
    code = 1 if failures else 0
    verdict = {
        "status": "pass" if code == 0 else "fail",
        "exit_code": code,
        "failures": failures,
        "seed": seed,
        "grid": cfg.data["grid"],
        "checks": [r.to_dict() for r in reports],
    }
    (out / "verdict.json").write_text(json.dumps(verdict, indent=1, sort_keys=True))
    (out / "summary.csv").write_text(summary_csv(rows))
    plot_data(out, rows, by_check, extra)
    return verdict, code


# ---------------------------------------------------------------------------
# report


def run_report(out: Path) -> tuple[dict, int]:
    """Reload a run directory and re-check ``w + v = f`` for every saved item."""
    summary = out / "summary.csv"
    if not summary.exists():
        raise FileNotFoundError(f"no summary.csv in {out}")
    with summary.open() as fh:
        rows = list(csv.DictReader(fh))
    bad, checked = [], 0
    for r in rows:
        d = out / "items" / f"item_{int(r['id']):03d}"
        if not d.exists():
            continue
        f, w, v = (read_field(d / f"{n}.hsf") for n in ("f", "w", "v"))
        err = lp_quasinorm(GridField(f.spec, w.samples + v.samples - f.samples), 2)
        fn = lp_quasinorm(f, 2)
        checked += 1
        if err > 1e-10 * max(fn, 1e-300):
            bad.append(int(r["id"]))

    def _max(col):
        vals = [float(r[col]) for r in rows if r[col] not in ("", "nan")]
        return max(vals) if vals else None

    report = {
        "items": len(rows),
        "rechecked": checked,
        "reconstruction_failures": bad,
        "max": {c: _max(c) for c in STABLE_CONSTANTS},
        "degenerate": sorted({r["degenerate"] for r in rows if r["degenerate"]}),
    }
    verdict = out / "verdict.json"
    if verdict.exists():
        v = json.loads(verdict.read_text())
        report["verdict"] = v["status"]
        report["failures"] = v["failures"]
    (out / "report.json").write_text(json.dumps(report, indent=1, sort_keys=True))
    return report, (1 if bad else 0)
