"""Command line driver: ``adlvkit {tables,verify,tree,bset}``.

Exit codes: 0 everything matched, 1 a mismatch or failed check, 2 a search
budget was exhausted, 3 bad usage.
"""

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import resources

from .affine_weyl import AffineWeylGroup
from .bset import (chai_length, defect, enumerate_bset, graph_identity, verify_a_identity,
                   verify_identity)
from .errors import BudgetExceeded, ContractError
from .qlaurent import QLaurent
from .reduction import DEFAULT_BUDGET, Reducer, verify_prop_id, verify_thm_7_1, verify_thm_main
from .root_datum import RootDatum

EXIT_OK, EXIT_MISMATCH, EXIT_RESOURCE, EXIT_USAGE = 0, 1, 2, 3

TARGETS = ("identity", "prop-id", "thm-main", "thm-7-1", "graph-lemma", "a-type")


class UsageError(Exception):
    pass


@dataclass
class JobSpec:
    command: str
    type: str = None
    rank: int = None
    twist: int = 0
    coweight: str = None
    element: str = None
    target: str = None
    series: str = "all"
    mode: str = "all"
    maxlen: int = 8
    n: int = None
    trials: int = 1000
    format: str = "json"
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else dict(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        if "command" not in data:
            raise UsageError("config needs a 'command'")
        return cls(**data)

    def datum(self):
        if not self.type:
            raise UsageError("--type is required")
        kind, rank = self.type[0].upper(), self.rank
        if len(self.type) > 1:
            rank = int(self.type[1:])
        if rank is None:
            raise UsageError("rank missing: use e.g. --type E8 or --type E --rank 8")
        try:
            return RootDatum.of_type(kind, rank, twisted=bool(self.twist), order=self.twist or 2)
        except (ContractError, ValueError, KeyError) as exc:
            raise UsageError(str(exc)) from None


def parse_coweight(datum, text):
    """``w4`` for a fundamental coweight, or comma separated coweight coordinates."""
    text = text.strip()
    if text.lower().startswith(("w", "omega")):
        i = int(text.lstrip("wWomega"))
        if not 1 <= i <= datum.rank:
            raise UsageError(f"no fundamental coweight {text}")
        return tuple(int(i == j) for j in datum.nodes)
    try:
        coords = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse coweight {text!r}") from None
    if len(coords) != datum.rank:
        raise UsageError(f"coweight needs {datum.rank} coordinates")
    return coords


def _load_golden():
    with resources.files("adlvkit").joinpath("data/tables.json").open() as fh:
        return json.load(fh)


def _emit(rows, fmt, out, columns=None):
    if fmt == "csv":
        w = csv.DictWriter(out, fieldnames=columns or list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    else:
        for r in rows:
            out.write(json.dumps(r, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# tables


def table_rows(series="all"):
    golden = _load_golden()
    names = ["E6", "E7", "E8"] if series == "all" else [series.upper()]
    rows = []
    for name in names:
        if name not in ("E6", "E7", "E8"):
            raise UsageError(f"unknown series {name}")
        d = RootDatum.of_type("E", int(name[1]))
        for i, expected in golden[name].items():
            mu = tuple(int(j == int(i)) for j in d.nodes)
            indec = enumerate_bset(d, mu, mode="indec")
            _, ok = verify_identity(d, mu, indec.classes)
            rows.append({"type": "E", "rank": d.rank, "twist": 0, "coweight": f"w{i}",
                         "count_indec": len(indec), "identity_ok": ok,
                         "expected": expected})
    return rows


def cmd_tables(spec, out):
    rows = table_rows(spec.series)
    cols = ["type", "rank", "twist", "coweight", "count_indec", "identity_ok"]
    _emit([{k: r[k] for k in cols} for r in rows], spec.format, out, cols)
    bad = [r for r in rows if r["count_indec"] != r["expected"] or not r["identity_ok"]]
    for r in bad:
        sys.stderr.write(f"mismatch: E{r['rank']} {r['coweight']}: got {r['count_indec']}, "
                         f"expected {r['expected']}, identity_ok={r['identity_ok']}\n")
    return EXIT_MISMATCH if bad else EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _chunks(seq, k):
    size = max(1, -(-len(seq) // k))
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def _element_worker(args):
    desc, seed, budget, target, texts = args
    d = RootDatum.from_descriptor(desc)
    G = AffineWeylGroup(d)
    R = Reducer(G, seed=seed, budget=budget)
    cache = {}
    out = []
    for t in texts:
        w = G.parse(t)
        try:
            if target == "prop-id":
                out.append({"target": target, "element": t, "ok": verify_prop_id(R, w)})
            else:
                out.append(verify_thm_7_1(R, w, cache).to_json())
        except BudgetExceeded as exc:
            out.append({"target": target, "element": t, "ok": False, "resource": str(exc)})
    return out


def _thm_main_worker(args):
    desc, seed, budget, items = args
    d = RootDatum.from_descriptor(desc)
    R = Reducer(AffineWeylGroup(d), seed=seed, budget=budget)
    out = []
    for mu, c in items:
        try:
            out.append(verify_thm_main(R, mu, c).to_json())
        except BudgetExceeded as exc:
            out.append({"target": "thm-main", "element": f"{mu} {c}", "ok": False,
                        "resource": str(exc)})
    return out


def _run_parallel(worker, payloads, jobs):
    if jobs <= 1 or len(payloads) <= 1:
        return [r for p in payloads for r in worker(p)]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return [r for part in ex.map(worker, payloads) for r in part]


def verify_reports(spec):
    target = spec.target
    if target not in TARGETS:
        raise UsageError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    if target == "a-type":
        if not spec.n:
            raise UsageError("a-type needs --n")
        reps = []
        for n in range(2, spec.n + 1):
            for i in range(1, n):
                ok, terms = verify_a_identity(n, i)
                d = RootDatum.of_type("A", n - 1)
                count = len(enumerate_bset(d, d.fundamental_coweight(i), mode="indec"))
                reps.append({"target": target, "n": n, "i": i, "terms": terms,
                             "enumerated": count, "ok": ok and terms == count})
        return reps
    if target == "graph-lemma":
        rng = random.Random(spec.seed)
        reps = []
        for t in range(spec.trials):
            m = rng.randint(0, 8)
            edges = [(a, b) for a in range(m) for b in range(a + 1, m) if rng.random() < 0.4]
            Y = [v for v in range(m) if rng.random() < 0.5]
            f = graph_identity(range(m), edges, Y)
            reps.append({"target": target, "trial": t, "nodes": m, "edges": edges, "Y": Y,
                         "ok": f == QLaurent.q_power(m)})
        return reps
    d = spec.datum()
    if target == "identity":
        mus = ([parse_coweight(d, spec.coweight)] if spec.coweight else
               [tuple(int(j in o) for j in d.nodes) for o in d.orbits])
        reps = []
        for mu in mus:
            res, ok = verify_identity(d, mu)
            reps.append({"target": target, "datum": d.label, "coweight": list(mu),
                         "terms": len(enumerate_bset(d, mu, mode="indec")),
                         "residual": str(res), "ok": ok})
        return reps
    G = AffineWeylGroup(d)
    desc = d.descriptor()
    if target == "thm-main":
        items = []
        for mu in G.dominant_coweights(spec.maxlen):
            for c in G.sigma_coxeter_elements():
                w = G.mul(G.translation(mu), G.finite(G.W.words[c]))
                if G.coset_decompose(w)[0] == 0:
                    items.append((mu, c))
        payloads = [(desc, spec.seed, spec.budget, ch) for ch in _chunks(items, spec.jobs)]
        return _run_parallel(_thm_main_worker, payloads, spec.jobs)
    texts = []
    for layer in G.elements_by_length(spec.maxlen):
        for w in layer:
            if target == "thm-7-1" and not G.is_partial_coxeter(G.eta_sigma(w)):
                continue
            texts.append(G.format(w))
    payloads = [(desc, spec.seed, spec.budget, target, ch) for ch in _chunks(texts, spec.jobs)]
    return _run_parallel(_element_worker, payloads, spec.jobs)


def cmd_verify(spec, out):
    reps = verify_reports(spec)
    for r in reps:
        out.write(json.dumps(r, sort_keys=True, default=str) + "\n")
    passed = sum(1 for r in reps if r["ok"])
    resource = sum(1 for r in reps if "resource" in r)
    out.write(json.dumps({"summary": spec.target, "passed": passed,
                          "failed": len(reps) - passed, "resource": resource}) + "\n")
    if resource:
        return EXIT_RESOURCE
    return EXIT_OK if passed == len(reps) else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# tree and bset


def cmd_tree(spec, out):
    if not spec.element:
        raise UsageError("tree needs an element expression")
    d = spec.datum()
    G = AffineWeylGroup(d)
    try:
        w = G.parse(spec.element)
    except ContractError as exc:
        raise UsageError(str(exc)) from None
    tree = Reducer(G, seed=spec.seed, budget=spec.budget).build_tree(w)
    if spec.format == "dot":
        out.write(tree.to_dot())
    else:
        out.write(json.dumps(tree.to_json(), sort_keys=True, indent=1) + "\n")
    return EXIT_OK


def cmd_bset(spec, out):
    d = spec.datum()
    if not spec.coweight:
        raise UsageError("bset needs --coweight")
    mu = parse_coweight(d, spec.coweight)
    bs = enumerate_bset(d, mu, mode=spec.mode)
    rows = []
    for b in bs:
        row = b.to_json()
        row.update({"I_nu": sorted(d.newton_level_set(b.newton)),
                    "chai_length": chai_length(d, mu, b), "defect": defect(d, mu, b)})
        rows.append(row)
    if spec.format == "csv":
        for r in rows:
            r["newton"] = " ".join(r["newton"])
            r["I_nu"] = " ".join(map(str, r["I_nu"]))
        if rows:
            _emit(rows, "csv", out, ["newton", "kottwitz", "I_nu", "chai_length", "defect"])
    else:
        _emit(rows, "json", out)
    return EXIT_OK


COMMANDS = {"tables": cmd_tables, "verify": cmd_verify, "tree": cmd_tree, "bset": cmd_bset}


def build_parser():
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--format", choices=["csv", "json", "dot"])
    common.add_argument("--seed", type=int)
    common.add_argument("--budget", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--config", help="JSON file with JobSpec fields")
    p = argparse.ArgumentParser(prog="adlvkit", description=__doc__.splitlines()[0],
                                parents=[common])
    sub = p.add_subparsers(dest="command")

    def datum_args(sp):
        sp.add_argument("--type", help="e.g. E8, A2, or a letter together with --rank")
        sp.add_argument("--rank", type=int)
        sp.add_argument("--twist", type=int, choices=[0, 2, 3], help="order of sigma")

    t = sub.add_parser("tables", parents=[common], help="reproduce the E6/E7/E8 indecomposable counts")
    t.add_argument("series", nargs="?", choices=["E6", "E7", "E8", "all"])
    v = sub.add_parser("verify", parents=[common], help="run a verification target")
    v.add_argument("target", choices=TARGETS)
    datum_args(v)
    v.add_argument("--coweight")
    v.add_argument("--maxlen", type=int)
    v.add_argument("--n", type=int)
    v.add_argument("--trials", type=int)
    tr = sub.add_parser("tree", parents=[common], help="export a reduction tree")
    tr.add_argument("element")
    datum_args(tr)
    b = sub.add_parser("bset", parents=[common], help="list B(G, mu)")
    datum_args(b)
    b.add_argument("--coweight")
    b.add_argument("--mode", choices=["all", "indec", "irr"])
    return p


def spec_from_args(ns):
    base = {}
    config = getattr(ns, "config", None)
    if config:
        try:
            with open(config) as fh:
                base = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for k, val in vars(ns).items():
        if k != "config" and val is not None:
            base[k] = val
    if not base.get("command"):
        raise UsageError("no command given")
    return JobSpec.from_json(base)


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        spec = spec_from_args(ns)
        if spec.command not in COMMANDS:
            raise UsageError(f"unknown command {spec.command!r}")
        return COMMANDS[spec.command](spec, out)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        sys.stderr.write(f"resource error: {exc}\n")
        return EXIT_RESOURCE


def run(argv):
    """Convenience wrapper returning (exit code, captured stdout)."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
