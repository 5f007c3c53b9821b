"""Command-line front end: JSON payload in, one JSON report out.

    toric-periods <command> [--input FILE] [--precision N] ...
    toric-periods --batch FILE
    toric-periods emit-corpus --seed S --out DIR

Exit codes: 0 for any computed verdict, 1 for input errors, 2 for
precision or convergence failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import jsonschema

from . import characters as ch
from . import dichotomy as dc
from . import etale as et
from . import global_periods as gp
from .errors import InputError, ParityObstruction, PrecisionError, SchemaError, ToricPeriodError
from .padic import element_from_json

COMMANDS = ("classify", "epsilon", "local-dichotomy", "sum-check", "find-lambda", "global-decide")

# ---------------------------------------------------------------------------
# schemas

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"},
    ]
}
LABEL = {"enum": list(et.COMPONENT_LABELS)}
CHARACTER = {
    "type": "object",
    "properties": {
        "domain_field": {"type": "string"},
        "level": {"type": "integer", "minimum": 0},
        "images": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"generator": {"type": "string"}, "rotation": RATIONAL},
                "required": ["generator", "rotation"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["level", "images"],
    "additionalProperties": False,
}
K_CHARACTER = {
    "oneOf": [
        CHARACTER,
        {
            "type": "object",
            "properties": {"split": {"type": "array", "items": CHARACTER, "minItems": 2, "maxItems": 2}},
            "required": ["split"],
            "additionalProperties": False,
        },
    ]
}
NORM_ONE = {
    "type": "object",
    "properties": {"phi": CHARACTER, "alpha_L": CHARACTER, "split_phi": CHARACTER},
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
}
ELEMENT = {
    "oneOf": [
        RATIONAL,
        {
            "type": "object",
            "properties": {"field_id": {"type": "string"}, "coeffs": {"type": "array", "items": RATIONAL}},
            "required": ["coeffs"],
            "additionalProperties": False,
        },
    ]
}
HERMITIAN = {
    "type": "object",
    "properties": {"n": {"type": "integer", "minimum": 1}, "disc_sign": {"enum": [1, -1]}},
    "required": ["n"],
    "additionalProperties": False,
}
LOCAL_BASE = {
    "p": {"type": "integer", "minimum": 2},
    "d": RATIONAL,
    "delta_t": RATIONAL,
    "E": {"type": "array", "items": LABEL, "minItems": 1},
}
CHARACTER_DATA = {
    "alpha": {"type": "array", "items": NORM_ONE, "minItems": 1},
    "beta": NORM_ONE,
    "mu": K_CHARACTER,
    "chi_V": K_CHARACTER,
    "chi_W": K_CHARACTER,
    "psi_scale": RATIONAL,
}
HECKE = {
    "type": "object",
    "properties": {
        "d": {"type": "integer"},
        "w": {"type": "integer"},
        "unit_data": {
            "type": "object",
            "patternProperties": {
                "^[0-9]+$": {
                    "type": "object",
                    "properties": {
                        "level": {"type": "integer", "minimum": 0},
                        "rotations": {"type": "array", "items": RATIONAL},
                    },
                    "required": ["level", "rotations"],
                    "additionalProperties": False,
                }
            },
            "additionalProperties": False,
        },
    },
    "required": ["w"],
    "additionalProperties": False,
}
COMPLEX = {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}  # x or [re, im]


def _obj(props: dict, required: list) -> dict:
    return {"type": "object", "properties": props, "required": required, "additionalProperties": False}


SCHEMAS = {
    "classify": _obj(
        {**LOCAL_BASE, "lambda": {"type": "array", "items": ELEMENT}, "V": HERMITIAN},
        ["p", "d", "E"],
    ),
    "epsilon": {
        "oneOf": [
            _obj(
                {
                    "p": {"type": "integer", "minimum": 2},
                    "field": LABEL,
                    "character": CHARACTER,
                    "psi_w": RATIONAL,
                },
                ["p", "field", "character"],
            ),
            _obj(
                {
                    "archimedean": _obj(
                        {"m": {"type": "integer"}, "s": {"enum": [1, -1]}},
                        ["m", "s"],
                    )
                },
                ["archimedean"],
            ),
        ]
    },
    "local-dichotomy": _obj(
        {**LOCAL_BASE, **CHARACTER_DATA, "lambda": {"type": "array", "items": ELEMENT}, "V": HERMITIAN},
        ["p", "d", "E", "lambda", "alpha", "beta"],
    ),
    "sum-check": _obj({**LOCAL_BASE, **CHARACTER_DATA}, ["p", "d", "E", "alpha", "beta"]),
    "find-lambda": _obj(
        {
            "d": {"type": "integer"},
            "targets": {
                "type": "array",
                "items": {
                    "type": "object",
                    "patternProperties": {"^([0-9]+|inf)$": {"enum": [1, -1]}},
                    "additionalProperties": False,
                },
            },
        },
        ["d", "targets"],
    ),
    "global-decide": _obj(
        {
            "setup": _obj(
                {"d": {"type": "integer"}, "n": {"type": "integer", "minimum": 1}, "mu": HECKE, "delta_t": RATIONAL},
                ["d", "n", "mu"],
            ),
            "alpha": {"type": "array", "items": HECKE, "minItems": 1},
            "beta": HECKE,
            "lambda": {"oneOf": [{"type": "array", "items": RATIONAL}, {"const": "auto"}]},
            "l_value": {"oneOf": [{"type": "number"}, {"type": "array", "items": COMPLEX}, {"type": "null"}]},
        },
        ["setup", "alpha", "beta", "lambda"],
    ),
}
OPTIONS = _obj(
    {
        "precision": {"type": "integer", "minimum": 4},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "search_bound": {"type": "integer", "minimum": 2},
        "enable_lvalue": {"type": "boolean"},
        "seed": {"type": "integer"},
    },
    [],
)
TASK = _obj(
    {"command": {"enum": list(COMMANDS)}, "payload": {"type": "object"}, "options": OPTIONS},
    ["command", "payload"],
)
DEFAULT_OPTIONS = {
    "precision": et.DEFAULT_PRECISION,
    "tolerance": 1e-8,
    "search_bound": 50,
    "enable_lvalue": False,
    "seed": 0,
}


def validate(instance, schema, where: str = "") -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        # report the deepest matching error for oneOf branches
        if err.context:
            err = max(err.context, key=lambda e: len(e.absolute_path))
        pointer = where + "".join(f"/{p}" for p in err.absolute_path)
        raise SchemaError(err.message, pointer or "/")


# ---------------------------------------------------------------------------
# payload decoding


def _q(x) -> Fraction:
    return Fraction(x) if not isinstance(x, int) else Fraction(x)


def _pair(payload: dict, opts: dict) -> et.EtalePair:
    p = int(payload["p"])
    N = int(opts["precision"])
    K = et.BaseQuadratic(p, _q(payload["d"]), _q(payload.get("delta_t", 1)), N)
    E = et.EtaleAlgebra(p, payload["E"], N)
    return et.EtalePair(E, K)


def _element(field, obj):
    if isinstance(obj, dict):
        return element_from_json(field, {"coeffs": obj["coeffs"]})
    return field.element(_q(obj))


def _char(field, obj) -> ch.MultiplicativeCharacter:
    return ch.character_from_json(field, obj)


def _k_char(K: et.BaseQuadratic, obj):
    if "split" in obj:
        if not K.is_split:
            raise InputError("split character given for a field K")
        a, b = obj["split"]
        return ch.PairCharacter(_char(K.F, a), _char(K.F, b))
    if K.is_split:
        raise InputError("K is split: give the character as {'split': [c1, c2]}")
    return _char(K.K, obj)


def _norm_one(comp: et.Component, obj) -> ch.NormOneCharacter:
    if comp.is_split:
        key = next(iter(obj))
        if key not in ("phi", "split_phi"):
            raise InputError(f"component {comp.label} is split: use 'phi' or 'split_phi'")
        return ch.NormOneCharacter(comp, _char(comp.field, obj[key]))
    if "phi" in obj:
        return ch.NormOneCharacter.from_character(comp, _char(comp.L, obj["phi"]))
    if "alpha_L" in obj:
        return ch.NormOneCharacter(comp, _char(comp.L, obj["alpha_L"]))
    raise InputError(f"component {comp.label} is a field: use 'phi' or 'alpha_L'")


def _character_data(pair: et.EtalePair, payload: dict):
    K = pair.K
    if len(payload["alpha"]) != len(pair.components):
        raise InputError("one alpha entry per component of E is required")
    alphas = [_norm_one(c, a) for c, a in zip(pair.components, payload["alpha"])]
    beta = _norm_one(dc.k1_component(K), payload["beta"])
    if "chi_V" in payload or "chi_W" in payload:
        if not ("chi_V" in payload and "chi_W" in payload):
            raise InputError("give both chi_V and chi_W, or mu")
        chi_W, chi_V = _k_char(K, payload["chi_W"]), _k_char(K, payload["chi_V"])
    elif "mu" in payload:
        mu = _k_char(K, payload["mu"])
        chi_W, chi_V = mu, mu ** pair.n
    else:
        raise InputError("splitting characters missing: give mu or (chi_V, chi_W)")
    return alphas, beta, chi_V, chi_W, _q(payload.get("psi_scale", 1))


def _lambda(pair: et.EtalePair, items) -> tuple:
    if len(items) != len(pair.components):
        raise InputError("lambda needs one entry per component")
    return tuple(_element(c.field, x) for c, x in zip(pair.components, items))


def _hermitian(obj) -> et.HermitianClass:
    return et.HermitianClass(int(obj["n"]), obj.get("disc_sign"))


# ---------------------------------------------------------------------------
# commands


def cmd_classify(payload: dict, opts: dict) -> dict:
    pair = _pair(payload, opts)
    K = pair.K
    out = {
        "n": pair.n,
        "K": K.to_json(),
        "hermitian_classes": [V.to_json() for V in et.classify_hermitian_spaces(pair.n, K)],
        "disc_E": et.disc_etale(pair.E)[0],
        "embeddings": [],
    }
    for V in et.classify_hermitian_spaces(pair.n, K):
        for lam in et.embedding_classes(pair, V):
            out["embeddings"].append(
                {
                    "V_class": V.label,
                    "lambda_class": [x.to_json() for x in lam],
                    "omega": list(et.omega_vector(pair, lam).signs),
                }
            )
    if "lambda" in payload:
        lam = _lambda(pair, payload["lambda"])
        info = et.disc_hermitian_lambda(pair, lam)
        out["lambda"] = {
            "disc_square_class": info["square_class"],
            "disc_sign": info["sign"],
            "omega": et.omega_vector(pair, lam).to_json(),
            "V_class": et.hermitian_class_of(pair, lam).label,
        }
        if "V" in payload:
            out["lambda"]["embeds_into_V"] = et.hermitian_class_of(pair, lam) == _hermitian(payload["V"])
    return out


def cmd_epsilon(payload: dict, opts: dict) -> dict:
    if "archimedean" in payload:
        a = payload["archimedean"]
        s = ch.archimedean_epsilon(int(a["m"]), int(a["s"]))
        return {"value": [float(s), 0.0], "sign": s}
    p = int(payload["p"])
    F = et.quadratic_field(p, payload["field"], int(opts["precision"]))
    chi = _char(F, payload["character"])
    psi = ch.AdditiveCharacter(F, F.element(_q(payload.get("psi_w", 1))))
    v = ch.tate_epsilon(chi, psi)
    try:
        sign = ch.sign_of(v, opts["tolerance"])
    except ToricPeriodError:
        sign = None
    return {
        "value": [v.real, v.imag],
        "sign": sign,
        "conductor": chi.conductor,
        "additive_level": psi.level,
    }


def cmd_local_dichotomy(payload: dict, opts: dict) -> dict:
    pair = _pair(payload, opts)
    alphas, beta, chi_V, chi_W, psi_scale = _character_data(pair, payload)
    lam = _lambda(pair, payload["lambda"])
    V = _hermitian(payload["V"]) if "V" in payload else et.hermitian_class_of(pair, lam)
    res = dc.local_hom_dimension(dc.DichotomyInput(pair, lam, V, alphas, beta, chi_V, chi_W, psi_scale))
    out = res.to_json()
    out["V_class"] = V.label
    return out


def cmd_sum_check(payload: dict, opts: dict) -> dict:
    pair = _pair(payload, opts)
    alphas, beta, chi_V, chi_W, psi_scale = _character_data(pair, payload)
    return dc.sum_check(pair, alphas, beta, chi_V, chi_W, psi_scale)


def cmd_find_lambda(payload: dict, opts: dict) -> dict:
    d = int(payload["d"])
    try:
        lam = gp.find_lambda(payload["targets"], d, int(opts["search_bound"]))
    except ParityObstruction as exc:
        return {"error_kind": exc.kind, "message": str(exc)}
    per_place = []
    for x, tgt in zip(lam, payload["targets"]):
        places = sorted(set(gp.relevant_places([x, d])) | {gp._place_key(k) for k in tgt}, key=str)
        per_place.append({str(v): gp.rational_hilbert_symbol(x, d, v) for v in places})
    return {"lambda": [str(x) for x in lam], "symbols": per_place}


def _hecke(d: int, obj: dict) -> gp.GlobalHeckeCharacter:
    if "d" in obj and int(obj["d"]) != d:
        raise InputError("character field differs from the setup")
    return gp.hecke_from_json({**obj, "d": d})


def cmd_global_decide(payload: dict, opts: dict) -> dict:
    s = payload["setup"]
    d = int(s["d"])
    gp.check_setup_field(d)
    setup = gp.GlobalSetup(d, int(s["n"]), _hecke(d, s["mu"]), _q(s.get("delta_t", 1)))
    alphas = [_hecke(d, a) for a in payload["alpha"]]
    beta = _hecke(d, payload["beta"])
    if payload["lambda"] == "auto":
        try:
            lam = gp.lambda_from_epsilon(setup, alphas, int(opts["search_bound"]))
        except ParityObstruction as exc:
            # no lambda matches the root numbers: the period vanishes identically
            return {"verdict": False, "obstruction": exc.kind, "message": str(exc)}
    else:
        lam = [_q(x) for x in payload["lambda"]]
    lv = payload.get("l_value")
    if isinstance(lv, list):
        # one entry per component, each a real number or [re, im]
        lv = [complex(*v) if isinstance(v, list) else complex(v) for v in lv]
    return gp.global_decision(
        setup,
        alphas,
        beta,
        lam,
        l_value=lv,
        enable_lvalue=bool(opts["enable_lvalue"]),
        tolerance=float(opts["tolerance"]),
        seed=int(opts["seed"]),
    )


HANDLERS = {
    "classify": cmd_classify,
    "epsilon": cmd_epsilon,
    "local-dichotomy": cmd_local_dichotomy,
    "sum-check": cmd_sum_check,
    "find-lambda": cmd_find_lambda,
    "global-decide": cmd_global_decide,
}


def run(command: str, payload, options: Optional[dict] = None) -> tuple[dict, int]:
    """Validate and execute one task; returns (report, exit code)."""
    opts = dict(DEFAULT_OPTIONS)
    try:
        if command not in HANDLERS:
            raise SchemaError(f"unknown command {command!r}", "/command")
        validate(options or {}, OPTIONS, "/options")
        opts.update(options or {})
        validate(payload, SCHEMAS[command], "/payload")
        report = HANDLERS[command](payload, opts)
        return {"command": command, **report}, 0
    except SchemaError as exc:
        return {"command": command, "error_kind": exc.kind, "message": str(exc), "pointer": exc.pointer}, 1
    except PrecisionError as exc:
        return {"command": command, "error_kind": exc.kind, "message": str(exc)}, 2
    except InputError as exc:
        return {"command": command, "error_kind": exc.kind, "message": str(exc)}, 1


# ---------------------------------------------------------------------------
# corpus


def instance_payload(inst: dc.LocalInstance) -> dict:
    """sum-check payload for a generated local instance."""

    def norm_one(a: ch.NormOneCharacter) -> dict:
        if a.component.is_split:
            return {"split_phi": a.phi.to_json()}
        return {"alpha_L": a.lchar.to_json()}

    K = inst.pair.K
    mu = inst.chi_W
    return {
        "p": K.p,
        "d": str(K.d),
        "delta_t": str(K.t),
        "E": list(inst.pair.E.labels),
        "alpha": [norm_one(a) for a in inst.alphas],
        "beta": norm_one(inst.beta),
        "mu": mu.to_json(),
        "psi_scale": str(inst.psi_scale),
    }


def emit_corpus(seed: int, out_dir, per_cell: int = 8, primes=(3, 5, 7)) -> list[Path]:
    """Write one sum-check task per generated instance; byte-identical per seed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, inst in enumerate(dc.generate_corpus(seed, per_cell=per_cell, primes=primes)):
        task = {
            "command": "sum-check",
            "payload": instance_payload(inst),
            "expected_total": 1 if inst.compatible_by_construction else 0,
        }
        path = out / f"instance_{i:04d}.json"
        path.write_text(json.dumps(task, sort_keys=True, indent=1) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# entry point


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toric-periods", description="Toric period non-vanishing criteria.")
    ap.add_argument("command", nargs="?", choices=COMMANDS + ("emit-corpus",))
    ap.add_argument("--input", help="payload file (default: stdin)")
    ap.add_argument("--batch", help="file with a JSON array of {command, payload, options}")
    ap.add_argument("--precision", type=int)
    ap.add_argument("--tolerance", type=float)
    ap.add_argument("--search-bound", type=int)
    ap.add_argument("--enable-lvalue", action="store_true")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output directory for emit-corpus")
    ap.add_argument("--per-cell", type=int, default=8)
    return ap


def main(argv=None, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    flags = {}
    for name in ("precision", "tolerance", "search_bound", "seed"):
        v = getattr(args, name)
        if v is not None:
            flags[name] = v
    if args.enable_lvalue:
        flags["enable_lvalue"] = True

    if args.command == "emit-corpus":
        if not args.out:
            stdout.write(_dump({"error_kind": "SchemaError", "message": "--out is required", "pointer": "/out"}))
            return 1
        paths = emit_corpus(flags.get("seed", 0), args.out, args.per_cell)
        stdout.write(_dump({"command": "emit-corpus", "written": len(paths), "directory": str(args.out)}))
        return 0

    def load(path: Optional[str]):
        text = Path(path).read_text(encoding="utf-8") if path else stdin.read()
        try:
            return json.loads(text), None
        except json.JSONDecodeError as exc:
            return None, {"error_kind": "SchemaError", "message": f"invalid JSON: {exc}", "pointer": "/"}

    if args.batch:
        tasks, err = load(args.batch)
        if err:
            stdout.write(_dump(err))
            return 1
        reports, code = [], 0
        for i, task in enumerate(tasks if isinstance(tasks, list) else [tasks]):
            try:
                validate(task, TASK, f"/{i}")
            except SchemaError as exc:
                reports.append({"error_kind": exc.kind, "message": str(exc), "pointer": exc.pointer})
                code = max(code, 1)
                continue
            rep, c = run(task["command"], task["payload"], {**task.get("options", {}), **flags})
            reports.append(rep)
            code = max(code, c)
        stdout.write(_dump(reports))
        return code

    if not args.command:
        stdout.write(_dump({"error_kind": "SchemaError", "message": "a command is required", "pointer": "/command"}))
        return 1
    payload, err = load(args.input)
    if err:
        stdout.write(_dump(err))
        return 1
    report, code = run(args.command, payload, flags)
    stdout.write(_dump(report))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
