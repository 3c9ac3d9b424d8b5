"""Command-line front end orchestrating all pipelines with reproducible reports.

Reports are JSON-first: one sorted, indented JSON document per run, written
to stdout and optionally to ``--out``.  Identical configuration and seed
produce byte-identical reports.  ``--table`` switches stdout to a plain-text
rendering; the JSON still goes to ``--out`` when given.  Exit codes: 0
success, 1 internal invariant violation, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .budget import Budget
from .errors import BudgetError, CapError, InputError, ParityKSError
from .incidence import (
    INCONCLUSIVE,
    NO_PROOF_POSSIBLE,
    PROOF_FOUND,
    decide_structure,
    decision_to_json_obj,
    generate_cubic_structures,
    load_graph6,
    load_structure,
)
from .prooffinder import (
    ConstraintSystem,
    build_general_constraints,
    build_mermin_constraints,
    build_ray_constraints,
    enumerate_proofs,
    min_weight_proofs,
    proof_size_distribution,
    proof_to_json_obj,
    sample_proof,
    solve_proof_space,
)
from .raysystems import (
    RaySystem,
    build_600cell,
    build_60_105,
    build_e8_roots,
    find_bases,
    load_rays,
)

__all__ = ["RunConfig", "main"]

_BUILTIN_RAY_SYSTEMS: Dict[str, Callable[[], RaySystem]] = {
    "600cell": build_600cell,
    "60-105": build_60_105,
    "e8": build_e8_roots,
}

_PROOF_LIST_CAP = 1000


@dataclass(frozen=True)
class RunConfig:
    """One validated command invocation."""

    command: str
    system: Optional[str]
    rays: Optional[str]
    graph6: Optional[str]
    structure: Optional[str]
    cubic: Optional[int]
    mode: str
    max_size: Optional[int]
    threads: int
    seed: int
    budget_mem: Optional[float]
    budget_time: Optional[float]
    out: Optional[str]
    table: bool

    @property
    def input_label(self) -> str:
        for value in (self.system, self.rays, self.graph6, self.structure):
            if value is not None:
                return value
        return f"cubic:{self.cubic}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parityks",
        description="Exact construction, counting, enumeration and "
        "minimization of generalized parity proofs.",
    )
    parser.add_argument(
        "command",
        choices=[
            "bases",
            "count",
            "distribution",
            "minproofs",
            "incidence",
            "sample",
            "enumerate",
        ],
    )
    parser.add_argument("--system", choices=["600cell", "60-105", "e8", "mermin"])
    parser.add_argument("--rays", metavar="FILE")
    parser.add_argument("--graph6", metavar="FILE")
    parser.add_argument("--structure", metavar="FILE")
    parser.add_argument("--cubic", type=int, metavar="N")
    parser.add_argument(
        "--mode", choices=["ray", "general-full", "general-basis"], default="ray"
    )
    parser.add_argument("--max-size", type=int, metavar="W")
    parser.add_argument("--threads", type=int, default=1, metavar="N")
    parser.add_argument("--seed", type=int, default=0, metavar="S")
    parser.add_argument("--budget-mem", type=float, metavar="MB")
    parser.add_argument("--budget-time", type=float, metavar="S")
    parser.add_argument("--out", metavar="FILE")
    parser.add_argument("--table", action="store_true")
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command,
        system=ns.system,
        rays=ns.rays,
        graph6=ns.graph6,
        structure=ns.structure,
        cubic=ns.cubic,
        mode=ns.mode,
        max_size=ns.max_size,
        threads=ns.threads,
        seed=ns.seed,
        budget_mem=ns.budget_mem,
        budget_time=ns.budget_time,
        out=ns.out,
        table=ns.table,
    )
    if cfg.command == "incidence":
        wanted = {"--cubic": cfg.cubic, "--graph6": cfg.graph6, "--structure": cfg.structure}
        stray = {"--system": cfg.system, "--rays": cfg.rays}
    else:
        wanted = {"--system": cfg.system, "--rays": cfg.rays}
        stray = {
            "--cubic": cfg.cubic,
            "--graph6": cfg.graph6,
            "--structure": cfg.structure,
        }
    given = [flag for flag, value in wanted.items() if value is not None]
    extra = [flag for flag, value in stray.items() if value is not None]
    if len(given) != 1 or extra:
        options = "/".join(wanted)
        raise InputError(f"{cfg.command} needs exactly one input source ({options})")
    for flag, value in (("--budget-mem", cfg.budget_mem), ("--budget-time", cfg.budget_time)):
        if value is not None and value <= 0:
            raise InputError(f"{flag} must be positive")
    if cfg.threads < 1:
        raise InputError("--threads must be positive")
    if cfg.max_size is not None and cfg.max_size < 1:
        raise InputError("--max-size must be positive")
    return cfg


def _budget(cfg: RunConfig) -> Optional[Budget]:
    if cfg.budget_mem is None and cfg.budget_time is None:
        return None
    return Budget(time_limit_s=cfg.budget_time, mem_limit_mb=cfg.budget_mem)


def _ray_system(cfg: RunConfig) -> RaySystem:
    if cfg.system is not None:
        if cfg.system == "mermin":
            raise InputError("the mermin system has no ray system; it is a fixed constraint system")
        return _BUILTIN_RAY_SYSTEMS[cfg.system]()
    try:
        text = Path(cfg.rays).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read rays file: {exc}") from exc
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            dimension = len(line.split(","))
            break
    else:
        raise InputError("rays file has no vectors")
    return load_rays(cfg.rays, dimension)


def _constraint_system(cfg: RunConfig) -> ConstraintSystem:
    if cfg.system == "mermin":
        return build_mermin_constraints()
    rs = _ray_system(cfg)
    bases = find_bases(rs)
    if cfg.mode == "ray":
        return build_ray_constraints(bases, rs)
    general_mode = "full" if cfg.mode == "general-full" else "basis_columns"
    cs, _family = build_general_constraints(bases, rs, mode=general_mode)
    return cs


def cmd_bases(cfg: RunConfig) -> dict:
    rs = _ray_system(cfg)
    bases = find_bases(rs)
    return {
        "command": "bases",
        "input": cfg.input_label,
        "rays": len(rs.rays),
        "bases": len(bases.bases),
        "basis_set": bases.to_json_obj(),
    }


def cmd_count(cfg: RunConfig) -> dict:
    cs = _constraint_system(cfg)
    sol = solve_proof_space(cs)
    report = {
        "command": "count",
        "input": cfg.input_label,
        "mode": cfg.mode,
        "observables": len(cs.observables),
        "constraints": len(cs.constraints),
    }
    if sol.consistent:
        report["k"] = sol.dimension
        report["proof_count"] = str(1 << sol.dimension)
    else:
        report["k"] = "none"
        report["proof_count"] = "0"
    return report


def cmd_distribution(cfg: RunConfig) -> dict:
    cs = _constraint_system(cfg)
    try:
        dist = proof_size_distribution(cs, threads=cfg.threads, budget=_budget(cfg))
    except CapError as exc:
        raise CapError(
            f"{exc}; bounded-size search is available via the minproofs command"
        ) from exc
    return {
        "command": "distribution",
        "input": cfg.input_label,
        "mode": cfg.mode,
        "constraints": len(cs.constraints),
        "distribution": dist.to_json_obj(),
    }


def cmd_minproofs(cfg: RunConfig) -> dict:
    if cfg.max_size is None:
        raise InputError("minproofs needs --max-size W")
    cs = _constraint_system(cfg)
    proofs = min_weight_proofs(
        cs, cfg.max_size, budget=_budget(cfg), threads=cfg.threads
    )
    sizes = Counter(p.size for p in proofs)
    report = {
        "command": "minproofs",
        "input": cfg.input_label,
        "mode": cfg.mode,
        "max_size": cfg.max_size,
        "total": len(proofs),
        "sizes": [[s, sizes[s]] for s in sorted(sizes)],
    }
    if len(proofs) <= _PROOF_LIST_CAP:
        report["proofs"] = [list(p.constraints) for p in proofs]
    else:
        report["proofs_omitted"] = True
    return report


def cmd_sample(cfg: RunConfig) -> dict:
    cs = _constraint_system(cfg)
    proof = sample_proof(cs, cfg.seed)
    return {
        "command": "sample",
        "input": cfg.input_label,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "proof": proof_to_json_obj(cs, proof),
    }


def cmd_enumerate(cfg: RunConfig) -> dict:
    cs = _constraint_system(cfg)
    sizes: Counter = Counter()
    kept: List[List[int]] = []

    def visit(proof) -> None:
        sizes[proof.size] += 1
        if len(kept) <= _PROOF_LIST_CAP:
            kept.append(sorted(proof.constraints))

    enumerate_proofs(cs, visit, budget=_budget(cfg))
    total = sum(sizes.values())
    report = {
        "command": "enumerate",
        "input": cfg.input_label,
        "mode": cfg.mode,
        "total": total,
        "sizes": [[s, sizes[s]] for s in sorted(sizes)],
    }
    if total <= _PROOF_LIST_CAP:
        report["proofs"] = sorted(kept)
    else:
        report["proofs_omitted"] = True
    return report


def cmd_incidence(cfg: RunConfig) -> dict:
    if cfg.cubic is not None:
        structures = generate_cubic_structures(cfg.cubic)
    elif cfg.graph6 is not None:
        try:
            structures = load_graph6(cfg.graph6)
        except OSError as exc:
            raise InputError(f"cannot read graph6 file: {exc}") from exc
    else:
        structures = [load_structure(cfg.structure)]
    rows = []
    tally = Counter()
    for inc in structures:
        decision = decide_structure(inc, search_qubits=3)
        tally[decision.status] += 1
        rows.append(decision_to_json_obj(inc, decision))
    return {
        "command": "incidence",
        "input": cfg.input_label,
        "structures": rows,
        "producing": tally[PROOF_FOUND],
        "not_producing": tally[NO_PROOF_POSSIBLE],
        "inconclusive": tally[INCONCLUSIVE],
    }


_COMMANDS: Dict[str, Callable[[RunConfig], dict]] = {
    "bases": cmd_bases,
    "count": cmd_count,
    "distribution": cmd_distribution,
    "minproofs": cmd_minproofs,
    "incidence": cmd_incidence,
    "sample": cmd_sample,
    "enumerate": cmd_enumerate,
}

_TABLE_SKIP = {"command", "structures", "proofs", "basis_set", "distribution", "assignment"}


def _render_table(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    for key in sorted(report):
        if key not in _TABLE_SKIP:
            lines.append(f"{key}: {report[key]}")
    if "distribution" in report:
        for w, c in report["distribution"]["counts"]:
            lines.append(f"  size {w}: {c}")
    for i, row in enumerate(report.get("structures", ())):
        detail = f" ({row['qubits']} qubits)" if "qubits" in row else ""
        lines.append(f"  structure {i}: {row['status']}{detail}")
    return "\n".join(lines) + "\n"


def main(argv: Optional[List[str]] = None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = _config(ns)
        report = _COMMANDS[cfg.command](cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ParityKSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out is not None:
        Path(cfg.out).write_text(payload, encoding="utf-8")
    sys.stdout.write(_render_table(report) if cfg.table else payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
