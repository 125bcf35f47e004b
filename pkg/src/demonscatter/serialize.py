"""JSON/CSV import and export for models, S-matrices and analysis tables.

JSON numbers are written with full round-trip precision (repr); CSV uses 12
significant digits.  Complex values are [re, im] pairs throughout.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .channels import ChannelSet, SMatrix
from .errors import ConfigError
from .local_solver import LocalPotentialModel
from .nonlocal_solver import NonlocalKernel
from .units import make_grid

CSV_FMT = "%.12g"


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _unpair(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    raise ConfigError(f"expected a number or [re, im] pair, got {v!r}")


def smatrix_to_dict(S: SMatrix) -> dict:
    """{n_open, blocks: {T, R, Rt, Tt}} with row-major [re, im] entries."""
    return {
        "n_open": S.n_open,
        "blocks": {
            name: [_pair(z) for z in getattr(S, name).ravel()]
            for name in ("T", "R", "Rt", "Tt")
        },
    }


def smatrix_from_dict(d: dict) -> SMatrix:
    n = int(d["n_open"])
    blocks = {}
    for name in ("T", "R", "Rt", "Tt"):
        flat = [_unpair(v) for v in d["blocks"][name]]
        if len(flat) != n * n:
            raise ConfigError(f"block {name} must have {n * n} entries")
        blocks[name] = np.array(flat, dtype=complex).reshape(n, n)
    return SMatrix(**blocks)


def write_smatrix(path, S: SMatrix, diagnostics: dict = None):
    doc = smatrix_to_dict(S)
    if diagnostics:
        doc["diagnostics"] = diagnostics
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def model_from_dict(d: dict) -> LocalPotentialModel:
    """Model import: {grid: {xmin, xmax, n}, thresholds: [...], V: [...]}.

    V is one row-major N_ch x N_ch matrix per grid point, entries numbers
    or [re, im] pairs.
    """
    try:
        g = d["grid"]
        grid = make_grid(float(g["xmin"]), float(g["xmax"]), int(g["n"]))
        thresholds = tuple(_unpair(t) for t in d["thresholds"])
        raw_v = d["V"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed model document: missing {exc}") from exc
    nch = len(thresholds)
    if len(raw_v) != grid.n:
        raise ConfigError(
            f"V must have one matrix per grid point ({grid.n}), got {len(raw_v)}"
        )
    V = np.empty((grid.n, nch, nch), dtype=complex)
    for i, mat in enumerate(raw_v):
        flat = [_unpair(v) for v in mat]
        if len(flat) != nch * nch:
            raise ConfigError(
                f"V[{i}] must have {nch * nch} entries, got {len(flat)}"
            )
        V[i] = np.array(flat, dtype=complex).reshape(nch, nch)
    return LocalPotentialModel(
        grid=grid, channels=ChannelSet(thresholds=thresholds), V=V
    )


def read_model(path) -> LocalPotentialModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def write_model(path, model: LocalPotentialModel):
    doc = {
        "grid": {
            "xmin": model.grid.x_min,
            "xmax": model.grid.x_max,
            "n": model.grid.n,
        },
        "thresholds": [_pair(t) for t in model.channels.thresholds],
        "V": [[_pair(z) for z in mat.ravel()] for mat in model.V],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def write_kernel_csv(path, kernel: NonlocalKernel, polar: bool = True):
    """Kernel surface CSV: x, y, |K|, arg K (polar) or x, y, Re K, Im K."""
    x = kernel.grid.points
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y", "absK", "argK"] if polar else ["x", "y", "reK", "imK"])
        for i, xi in enumerate(x):
            row_k = kernel.K[i]
            if polar:
                a, b = np.abs(row_k), np.angle(row_k)
            else:
                a, b = row_k.real, row_k.imag
            for j, yj in enumerate(x):
                wr.writerow(
                    [CSV_FMT % xi, CSV_FMT % yj, CSV_FMT % a[j], CSV_FMT % b[j]]
                )


def write_sweep_csv(path, reports):
    """Demon sweep CSV: v, |T|^2, |R|^2, |Tt|^2, |Rt|^2, D, code."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["v", "T2", "R2", "Tt2", "Rt2", "D", "code"])
        for v, rep in reports:
            t2, r2, tt2, rt2 = rep.probabilities
            wr.writerow(
                [CSV_FMT % v]
                + [CSV_FMT % p for p in (t2, r2, tt2, rt2, rep.D)]
                + [rep.code]
            )


def write_regions_csv(path, rows):
    """D=0 region CSV: t2, rt2, lower, upper, region."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t2", "rt2", "lower", "upper", "region"])
        for t2, rt2, bounds in rows:
            wr.writerow(
                [CSV_FMT % t2, CSV_FMT % rt2, CSV_FMT % bounds.lower,
                 CSV_FMT % bounds.upper, bounds.region]
            )


def symmetry_report_to_dict(report, verification=None) -> dict:
    doc = {
        "classes": {
            name: {"residual": report.residuals[name], "verdict": report.verdicts[name]}
            for name in report.residuals
        },
        "tol": report.tol,
        "predictions": sorted(report.predictions),
        "trivial_only": report.trivial_only,
    }
    if verification is not None:
        doc["verification"] = {
            "violations": verification.violations,
            "tol": verification.tol,
            "all_hold": verification.all_hold,
        }
    return doc


def optimization_result_to_dict(result) -> dict:
    doc = {
        "parameters": {
            k: v for k, v in zip(("b", "c", "x0", "delta"), result.parameters)
        },
        "cost": result.cost,
        "probabilities": list(result.probabilities),
        "D": result.D,
        "evaluations": result.evaluations,
        "converged": result.converged,
    }
    if result.initial_cost is not None:
        doc["initial_cost"] = result.initial_cost
    return doc


def write_optimization_log_csv(path, log):
    """Evaluation log CSV: index, b, c, x0, delta, cost."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["eval", "b", "c", "x0", "delta", "cost"])
        for idx, params, c in log:
            wr.writerow([idx] + [CSV_FMT % p for p in params] + [CSV_FMT % c])
