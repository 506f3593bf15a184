"""Enumeration of small cyclic presentations and their invariants."""

from itertools import product
from math import floor

from .dieudonne import CyclicPresentation
from .errors import BudgetError, CycleNotFoundError, PrecisionError
from .invariants import report
from .newton import isogeny_cutoff_bound
from .witt import ring_create

FIELDS = ["id", "p", "n", "c", "d", "h", "psi", "polygon", "isoclinic", "b", "j_nu", "q",
          "floor_nu_c", "ell", "ell_lo", "ell_hi", "n_upper", "min_cd", "status"]


def enumerate_presentations(p, n=1, h_max=5, max_val=2, N=None):
    """All F^c + V^d deformed by p^k in the free slots, 1 <= k <= max_val.

    Order: by h, then c, then the slot pattern in lexicographic order with 0
    (coefficient absent) first.
    """
    for h in range(2, h_max + 1):
        ring = ring_create(p, n, N if N is not None else 2 * h + max_val + 4)
        choices = [ring.zero] + [ring.p_power(k) for k in range(1, max_val + 1)]
        for c in range(1, h):
            d = h - c
            for slots in product(choices, repeat=h - 1):
                a = [ring.one] + list(slots[:c])
                b = list(slots[c:]) + [ring.one]
                yield CyclicPresentation(ring, c, d, a, b)


def sweep(p=2, n=1, h_max=5, max_val=2, N=None, q_max=None):
    rows = []
    for k, psi in enumerate(enumerate_presentations(p, n, h_max, max_val, N)):
        nu = psi.newton()
        row = {"id": k, "p": p, "n": n, "c": psi.c, "d": psi.d, "h": psi.h,
               "psi": psi.describe(), "polygon": str(nu), "isoclinic": nu.is_isoclinic(),
               "j_nu": isogeny_cutoff_bound(nu), "floor_nu_c": floor(nu(psi.c)),
               "min_cd": min(psi.c, psi.d), "b": None, "q": None, "ell": None,
               "ell_lo": None, "ell_hi": None, "n_upper": None, "status": "ok"}
        try:
            rep = report(psi, q_max=q_max, differential=False)
        except (BudgetError, CycleNotFoundError, PrecisionError) as exc:
            row["status"] = f"budget: {exc}"
            rows.append(row)
            continue
        row.update(b=rep.b_exact, q=rep.q_exact, n_upper=rep.n_upper)
        if "exact" in rep.ell:
            row["ell"] = row["ell_lo"] = row["ell_hi"] = rep.ell["exact"]
        else:
            row["ell_lo"], row["ell_hi"] = rep.ell["interval"]
        rows.append(row)
    return rows


def sandwich_violations(rows):
    """Rows breaking min(c,d) <= ell <= floor(2 nu(c)) (isoclinic) or 1 <= b = j(nu) <= floor(nu(c)) + 1."""
    bad = []
    for row in rows:
        if row["status"] != "ok":
            continue
        if not (1 <= row["b"] == row["j_nu"] <= row["floor_nu_c"] + 1):
            bad.append((row["id"], "b"))
        if row["isoclinic"] and not (row["min_cd"] <= row["ell"] <= row["n_upper"]):
            bad.append((row["id"], "ell"))
    return bad
