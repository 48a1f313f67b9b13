"""The catalogue of exact bracket claims and its JSON report."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterator

from .algebra import Observable, RationalComplex, conjugate, fourier, poisson_bracket, var
from .integrals import Coefficients, build_named
from .model import Parameters
from .superintegrability import casimir_residual, verify_relation

SCHEMA_VERSION = 1

Builder = Callable[[str, Parameters, str], Observable]


@dataclass(frozen=True)
class ClaimResult:
    claim_id: str
    description: str
    passed: bool
    residual_term_count: int
    details: str = ""

    def to_dict(self) -> dict:
        return {
            "claim-id": self.claim_id,
            "description": self.description,
            "status": "pass" if self.passed else "fail",
            "residual-term-count": self.residual_term_count,
            "details": self.details,
        }


def k_family(max_m: int = 4, max_n: int = 4) -> list[tuple[int, int]]:
    """Coprime ``(m, n)`` with ``1 <= m <= max_m`` and ``0 < |n| <= max_n``."""
    return [
        (m, n)
        for m in range(1, max_m + 1)
        for n in range(-max_n, max_n + 1)
        if n != 0 and math.gcd(m, abs(n)) == 1
    ]


def _relation(claim_id, description, lhs, rhs) -> ClaimResult:
    check = verify_relation(lhs, rhs)
    details = "" if check.exact_zero else f"residual has {len(check.residual)} terms"
    return ClaimResult(claim_id, description, check.exact_zero, len(check.residual), details)


def _bracket_claims(params: Parameters, variant: str, build: Builder, prime: str, prefix: str) -> Iterator[ClaimResult]:
    c = Coefficients.of(params)

    def b(name):
        return build(name, params, variant)

    f1, f2 = b("F1"), b("F2")
    ang, g1, g2 = b("L" + prime), b("G1" + prime), b("G2" + prime)
    tag = prime and "p"
    la, g1a, g2a = f"L{tag}", f"G1{tag}", f"G2{tag}"

    yield _relation(f"{prefix}abelian.F1_F2", "{F1, F2} = 0", poisson_bracket(f1, f2), Observable())
    yield _relation(f"{prefix}abelian.F1_{la}", f"{{F1, {la}}} = 0", poisson_bracket(f1, ang), Observable())
    yield _relation(f"{prefix}abelian.F2_{la}", f"{{F2, {la}}} = 0", poisson_bracket(f2, ang), Observable())
    yield _relation(f"{prefix}integral.F1_{g1a}", f"{{F1, {g1a}}} = 0", poisson_bracket(f1, g1), Observable())
    yield _relation(f"{prefix}integral.F1_{g2a}", f"{{F1, {g2a}}} = 0", poisson_bracket(f1, g2), Observable())
    yield _relation(f"{prefix}su2.bracket.{la}_{g1a}", f"{{{la}, {g1a}}} = -{g2a}", poisson_bracket(ang, g1), -g2)
    yield _relation(f"{prefix}su2.bracket.{la}_{g2a}", f"{{{la}, {g2a}}} = 4 {g1a}", poisson_bracket(ang, g2), 4 * g1)
    yield _relation(
        f"{prefix}su2.bracket.{g1a}_{g2a}", f"{{{g1a}, {g2a}}} = -omega^2 {la}", poisson_bracket(g1, g2), -(c.omega**2) * ang
    )

    residual = casimir_residual(params, variant, build)
    yield ClaimResult(
        f"casimir.{variant}",
        "4 G1^2 + G2^2 + omega^2 L^2 = (F1 - F2)^2" if variant == "isotropic"
        else "4 G1'^2 + G2'^2 + omega^2 L'^2 = (F1 - F2 + M g^2 / 2 omega^2)^2",
        not residual,
        len(residual),
    )

    z = b("Z")
    iw = RationalComplex(0, c.omega)
    yield _relation(f"{prefix}ladder.Z_F1", "{Z, F1} = i omega Z", poisson_bracket(z, f1), iw * z)
    yield _relation(f"{prefix}ladder.Zbar_F1", "{Zbar, F1} = -i omega Zbar", poisson_bracket(conjugate(z), f1), -iw * conjugate(z))

    p_theta = b("p_theta")
    for m, n in k_family():
        k = z**m * fourier(-n)
        # I {K, F1} = i (m omega I - n p_theta) K
        rate = (p_theta * (-n) + m * c.omega * c.inertia) * RationalComplex(0, 1)
        yield _relation(
            f"{prefix}kbracket.K_{m}_{n}",
            f"I {{K_{m},{n}, F1}} = i (m omega I - n p_theta) K_{m},{n}",
            poisson_bracket(k, f1) * c.inertia,
            rate * k,
        )
        kb = conjugate(k)
        yield _relation(
            f"{prefix}kbracket.Kbar_{m}_{n}",
            f"I {{Kbar_{m},{n}, F1}} = -i (m omega I - n p_theta) Kbar_{m},{n}",
            poisson_bracket(kb, f1) * c.inertia,
            -rate * kb,
        )


def isotropic_claims(params: Parameters, build: Builder = build_named) -> list[ClaimResult]:
    return list(_bracket_claims(params, "isotropic", build, "", ""))


def gravity_claims(params: Parameters, build: Builder = build_named) -> list[ClaimResult]:
    c = Coefficients.of(params)
    f1 = build("F1", params, "gravity")
    ang = build("L", params, "gravity")
    out = [
        _relation(
            "gravity.L_not_conserved",
            "{F1, L} = M g x",
            poisson_bracket(f1, ang),
            var("x") * (c.mass * c.gravity),
        )
    ]
    out += list(_bracket_claims(params, "gravity", build, "'", "gravity."))
    return out


def run_claims(params: Parameters, gravity: bool = False, build: Builder = build_named) -> list[ClaimResult]:
    """All isotropic claims, plus the gravity ones when ``gravity`` is set."""
    results = isotropic_claims(params, build)
    if gravity:
        results += gravity_claims(params, build)
    return results


def report(params: Parameters, results: list[ClaimResult], variant: str) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "variant": variant,
        "parameters": {k: str(v) for k, v in asdict(params).items() if v is not None},
        "summary": {
            "total": len(results),
            "passed": sum(r.passed for r in results),
            "failed": sum(not r.passed for r in results),
        },
        "claims": [r.to_dict() for r in results],
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
