"""Golden values from the extended-precision oracle, and the fixture file that stores them.

Each case pairs an oracle evaluation with the fast-path evaluation of the
same quantity.  A fixture record holds the inputs, the oracle value rounded
to binary64, the working precision, the truncation depths the oracle used,
and a sha256 checksum over all of these so that a hand-edited or damaged
fixture is detected on load.
"""

from __future__ import annotations

import cmath
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional

import mpmath as mp

from . import oracle as O
from .errors import EllBetaError
from .kernels.elliptic import (
    ThetaIdentity,
    cert_g_an,
    cert_g_cn,
    cert_g_univariate,
    delta_dn,
    rho_an,
    rho_cn,
    rho_univariate,
    theta_identity_locus,
    theta_identity_residual,
)
from .kernels.params import AnParams, AnSymParams, CnParams, DnParams, ModifiedParams, QReducedParams, UnivariateParams
from .kernels.unit import cert_f_qreduced, rho_modified, rho_qreduced
from .integrals import rhs_closed_form
from .special import (
    BaseSet,
    GPath,
    KappaPath,
    OmegaTriple,
    b22,
    double_sine,
    elliptic_gamma,
    kappa,
    modified_gamma_g,
    poly_p,
    qpoch_inf,
    theta,
)

FIXTURE_FORMAT = 1
DEFAULT_FIXTURE = Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "golden.json"
GOLDEN_DPS = 30
OVERWRITE_TOL = 1e-12
PHI = (1 + 5**0.5) / 2


class FixtureCorrupted(EllBetaError):
    """A fixture record does not match its checksum."""


class GoldenConflict(EllBetaError):
    """A regenerated value disagrees with the stored one."""


@dataclass(frozen=True)
class GoldenCase:
    name: str
    inputs: dict
    oracle: Callable[[], object]
    fast: Callable[[], complex]


def _j(x):
    if isinstance(x, (list, tuple)):
        return [_j(v) for v in x]
    x = complex(x)
    return [x.real, x.imag]


def _cases() -> List[GoldenCase]:
    cases = []

    def add(name, inputs, oracle_fn, fast_fn):
        cases.append(GoldenCase(name, inputs, oracle_fn, fast_fn))

    # base special functions
    add("qpoch", {"a": _j(0.2 + 0.1j), "b": _j(0.4)},
        lambda: O.qpoch(0.2 + 0.1j, 0.4), lambda: qpoch_inf(0.2 + 0.1j, 0.4))
    add("theta", {"z": _j(0.5 + 0.2j), "p": _j(0.25)},
        lambda: O.theta(0.5 + 0.2j, 0.25), lambda: theta(0.5 + 0.2j, 0.25))
    add("elliptic_gamma", {"z": _j(0.4 + 0.3j), "q": _j(0.35), "p": _j(0.15)},
        lambda: O.egamma(0.4 + 0.3j, 0.35, 0.15), lambda: elliptic_gamma(0.4 + 0.3j, 0.35, 0.15))
    add("b22", {"u": _j(0.3j), "omega": _j([1, 2 + 1j])},
        lambda: O.b22(0.3j, 1, 2 + 1j), lambda: b22(0.3j, OmegaTriple(1, 2 + 1j, 1j)))
    add("poly_p", {"u": _j(0.2), "omega": _j([1, 1 + 0.5j, 2j])},
        lambda: O.poly_p(0.2, 1, 1 + 0.5j, 2j), lambda: poly_p(0.2, OmegaTriple(1, 1 + 0.5j, 2j)))
    add("modified_gamma_modular", {"u": _j(0.25), "omega": _j([1, 1.618, 3j])},
        lambda: O.gmod_modular(0.25, 1, 1.618, 3j),
        lambda: modified_gamma_g(0.25, OmegaTriple(1, 1.618, 3j), GPath.MODULAR))
    add("double_sine", {"u": _j(0.5), "omega": _j([1, 1 - 2j])},
        lambda: O.double_sine(0.5, 1, 1 - 2j), lambda: double_sine(0.5, OmegaTriple(1, 1 - 2j, 3j)))
    add("kappa_eta", {"omega": _j([1, 1 - 2j, 3j])},
        lambda: O.kappa_eta(1, 1 - 2j, 3j), lambda: kappa(OmegaTriple(1, 1 - 2j, 3j), KappaPath.ETA_PRODUCTS))
    add("kappa_omega_unit_circle", {"omega": _j([1, PHI, 2j])},
        lambda: O.kappa_omega(1, PHI, 2j), lambda: kappa(OmegaTriple(1, PHI, 2j), KappaPath.OMEGA_FORM))

    # elliptic-gamma kernels and certificates
    tu = (0.3, 0.4, 0.21, 0.35, 0.25)
    bu = BaseSet(0.3, 0.2)
    add("rho_univariate", {"z": _j(cmath.exp(0.7j)), "t": _j(tu), "q": _j(0.3), "p": _j(0.2)},
        lambda: O.rho_univariate(mp.expj(0.7), tu, 0.3, 0.2),
        lambda: rho_univariate(cmath.exp(0.7j), UnivariateParams(tu), bu))
    add("cert_g_univariate", {"z": _j(cmath.exp(0.4j)), "t": _j(tu), "q": _j(0.3), "p": _j(0.2)},
        lambda: O.cert_g_univariate(mp.expj(0.4), tu, 0.3, 0.2),
        lambda: cert_g_univariate(cmath.exp(0.4j), UnivariateParams(tu), bu))

    tc = (0.3, 0.4, 0.21, 0.35, 0.25, 0.33, 0.38)
    zc = [cmath.exp(0.5j), cmath.exp(1.3j)]
    add("rho_cn_n2", {"z": _j(zc), "t": _j(tc), "q": _j(0.3), "p": _j(0.2)},
        lambda: O.rho_cn([mp.expj(0.5), mp.expj(1.3)], tc, 0.3, 0.2),
        lambda: rho_cn(zc, CnParams(2, tc), bu))
    add("cert_g_cn_n2_i1", {"i": 1, "z": _j(zc), "t": _j(tc), "q": _j(0.3), "p": _j(0.2)},
        lambda: O.cert_g_cn(0, [mp.expj(0.5), mp.expj(1.3)], tc, 0.3, 0.2),
        lambda: cert_g_cn(0, zc, CnParams(2, tc), bu))

    ta, sa = (0.3, 0.35, 0.4), (0.25, 0.3, 0.33, 0.38)
    za = [cmath.exp(0.2j), cmath.exp(-0.9j)]
    add("rho_an_n2", {"z": _j(za), "t": _j(ta), "s": _j(sa), "q": _j(0.3), "p": _j(0.2)},
        lambda: O.rho_an([mp.expj(0.2), mp.expj(-0.9)], ta, sa, 0.3, 0.2),
        lambda: rho_an(za, AnParams(2, ta, sa), bu))
    add("cert_g_an_n2_i2", {"i": 2, "z": _j(za), "t": _j(ta), "s": _j(sa), "q": _j(0.3), "p": _j(0.2)},
        lambda: O.cert_g_an(1, [mp.expj(0.2), mp.expj(-0.9)], ta, sa, 0.3, 0.2),
        lambda: cert_g_an(1, za, AnParams(2, ta, sa), bu))

    td, sd = (0.7,), (0.6, 0.65, 0.7, 0.62)
    zd = [cmath.exp(0.6j)]
    add("delta_dn_n1", {"z": _j(zd), "t": _j(td), "s": _j(sd), "q": _j(0.3), "p": _j(0.2)},
        lambda: O.delta_dn([mp.expj(0.6)], td, sd, 0.3, 0.2),
        lambda: delta_dn(zd, DnParams(1, td, sd), bu))

    # unit-circle and line kernels
    wm = OmegaTriple(1, PHI, 3j)
    gm = (0.4, 0.35 + 0.1j, 0.45, 0.3 - 0.05j, 0.38)
    pm = ModifiedParams("Cn", gm, (), wm)
    add("rho_cn_unit_n1", {"u": _j([0.4j]), "g": _j(gm), "omega": _j(wm.omegas)},
        lambda: O.rho_modified_cn([0.4j], gm, 1, PHI, 3j), lambda: rho_modified([0.4j], pm))
    # u and u - omega3 near the ends of the segment (the kernel is omega3-periodic)
    for tag, u in (("plus", 1.4j), ("minus", -1.6j)):
        add(f"rho_cn_unit_n1_near_end_{tag}", {"u": _j([u]), "g": _j(gm), "omega": _j(wm.omegas)},
            (lambda u=u: O.rho_modified_cn([u], gm, 1, PHI, 3j)), (lambda u=u: rho_modified([u], pm)))

    wq = OmegaTriple(1, 1 - 0.4j, 5j)
    gq = tuple(x * wq.omega2 for x in (0.3, 0.25, 0.2 + 0.1j, 0.22, 0.27))
    pq = QReducedParams("Cn", gq, (), wq)
    uq = [0.3j * wq.omega2]
    add("rho_cn_q_n1", {"u": _j(uq), "g": _j(gq), "omega": _j([1, 1 - 0.4j])},
        lambda: O.rho_qreduced_cn(uq, gq, 1, 1 - 0.4j), lambda: rho_qreduced(uq, pq))
    add("cert_f_cn_q_n1_i1", {"i": 1, "u": _j(uq), "g": _j(gq), "omega": _j([1, 1 - 0.4j])},
        lambda: O.cert_f_qreduced_cn(0, uq, gq, 1, 1 - 0.4j), lambda: cert_f_qreduced(0, uq, pq))

    # closed-form right-hand sides
    add("integral_univariate_rhs", {"q": _j(0.3), "p": _j(0.2)},
        lambda: O.rhs_univariate(0.3, 0.2),
        lambda: rhs_closed_form(UnivariateParams((0.6, 0.65, 0.7, 0.55, 0.62)), bu))
    add("integral_cn_unit_n1_rhs", {"omega": _j(wm.omegas)},
        lambda: 2 * O.kappa_omega(1, PHI, 3j), lambda: rhs_closed_form(pm))
    def cn_q_rhs():
        b = O.bases(1, 1 - 0.4j, 5j)
        return -2 * O.qpoch(b["qt"], b["qt"]) / O.qpoch(b["q"], b["q"])

    add("integral_cn_q_n1_rhs", {"omega": _j([1, 1 - 0.4j])}, cn_q_rhs, lambda: rhs_closed_form(pq))
    ts = (0.7, 0.75, 0.72)
    ss2 = (0.6, 0.65)
    ss = ss2 + (0.3 * 0.2 / (0.7 * 0.75 * 0.72 * 0.6 * 0.65),)
    add("integral_an_sym_n1_rhs", {"t": _j(ts), "s": _j(ss), "q": _j(0.3), "p": _j(0.2)},
        lambda: O.rhs_an_sym(1, ts, ss, 0.3, 0.2), lambda: rhs_closed_form(AnSymParams(1, ts, ss), bu))

    # theta identity met at z_{n+1}^{-1} = TS, three fixed points at n = 3
    tf = (0.6, 0.7 * cmath.exp(0.3j), 0.65, 0.75 * cmath.exp(-0.5j))
    sf = (0.7, 0.6 * cmath.exp(1.1j), 0.8, 0.65, 0.72 * cmath.exp(-0.2j))
    bf = BaseSet(0.35 * cmath.exp(0.4j), 0.2)
    par = AnParams(3, tf, sf)
    for k, free in enumerate(([cmath.exp(0.3j), cmath.exp(2.1j)],
                              [cmath.exp(-1.2j), 0.9 * cmath.exp(0.8j)],
                              [1.1 * cmath.exp(2.7j), cmath.exp(-0.4j)]), 1):
        z = theta_identity_locus(ThetaIdentity.A_FUNCTION, free, par, bf)
        inputs = {"z": _j(z), "t": _j(tf), "s": _j(sf), "q": _j(bf.q), "p": _j(bf.p)}
        for side, idx in (("lhs", 0), ("rhs", 1)):
            add(f"afunction_n3_pt{k}_{side}", inputs,
                (lambda z=z, idx=idx: O.afunction(z, tf, sf, bf.q, bf.p)[idx]),
                (lambda z=z, idx=idx: theta_identity_residual(ThetaIdentity.A_FUNCTION, z, par, bf)[idx]))
    return cases


CASES: Dict[str, GoldenCase] = {c.name: c for c in _cases()}


def checksum(record: dict) -> str:
    body = {k: v for k, v in record.items() if k != "sha256"}
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode("utf-8")).hexdigest()


def compute_record(case: GoldenCase, dps: int = GOLDEN_DPS) -> dict:
    O.last_depths.clear()
    with O.precision(dps):
        v = mp.mpc(case.oracle())
        re, im = float(v.real), float(v.imag)
    record = {
        "name": case.name,
        "inputs": case.inputs,
        "re": re,
        "im": im,
        "dps": dps,
        "depths": dict(sorted(O.last_depths.items())),
    }
    record["sha256"] = checksum(record)
    return record


def load_fixture(path=DEFAULT_FIXTURE) -> Dict[str, dict]:
    """Records by name; raises FixtureCorrupted if any checksum is off."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    out = {}
    for rec in doc["records"]:
        if rec.get("sha256") != checksum(rec):
            raise FixtureCorrupted(f"checksum mismatch in golden record {rec.get('name')!r}")
        out[rec["name"]] = rec
    return out


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def write_fixture(records: Iterable[dict], path=DEFAULT_FIXTURE) -> None:
    doc = {"format": FIXTURE_FORMAT, "records": sorted(records, key=lambda r: r["name"])}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8", newline="\n")


def regenerate(path=DEFAULT_FIXTURE, names: Optional[Iterable[str]] = None, force: bool = False,
               dps: int = GOLDEN_DPS, write: bool = True) -> List[dict]:
    """Recompute the selected records (all by default) and merge them into the fixture.

    A new value that moves by more than 1e-12 relative from the stored one
    raises GoldenConflict unless ``force`` is set; nothing is written then.
    """
    names = list(CASES) if names is None else list(names)
    unknown = [n for n in names if n not in CASES]
    if unknown:
        raise KeyError(f"unknown golden cases: {', '.join(unknown)}")
    path = Path(path)
    existing = load_fixture(path) if path.exists() else {}
    fresh = [compute_record(CASES[n], dps) for n in names]
    conflicts = []
    for rec in fresh:
        old = existing.get(rec["name"])
        if old is not None:
            d = _rel(complex(rec["re"], rec["im"]), complex(old["re"], old["im"]))
            if d > OVERWRITE_TOL:
                conflicts.append(f"{rec['name']}: relative change {d:.3g}")
    if conflicts and not force:
        raise GoldenConflict("oracle disagrees with the stored fixture: " + "; ".join(conflicts))
    merged = dict(existing)
    merged.update({r["name"]: r for r in fresh})
    if write:
        write_fixture(merged.values(), path)
    return fresh


def compare_fast(records: Dict[str, dict]) -> Dict[str, float]:
    """Relative difference between the fast path and each stored golden value."""
    out = {}
    for name, rec in records.items():
        gold = complex(rec["re"], rec["im"])
        out[name] = _rel(complex(CASES[name].fast()), gold)
    return out
