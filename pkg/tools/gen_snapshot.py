"""Regenerate the bundled concept snapshot.

The bundled corpus is deliberately mixed: most records quiz cleanly, a few
reproduce known hard cases (derivative notation, a conservation statement,
a summation constraint, a double equality, missing units, a missing
identifier entry, an unsupported macro) so the evaluation harness has
something to measure.

Run from the repository root:

    python tools/gen_snapshot.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from physquiz.dimensions import parse_isq
from physquiz.knowledge import ConceptRecord, IdentifierInfo, parse_symbol_text, snapshot_fixture

AUTHORED_AT = "2026-08-16T00:00:00Z"


def info(symbol: str, name: str, qid: str | None, dim: str | None) -> IdentifierInfo:
    return IdentifierInfo(
        symbol=parse_symbol_text(symbol),
        name=name,
        qid=qid,
        dimension=parse_isq(dim) if dim is not None else None,
    )


def record(qid: str, label: str, formula: str, dim: str | None, identifiers) -> ConceptRecord:
    return ConceptRecord(
        qid=qid,
        label=label,
        defining_formula_latex=formula,
        formula_dimension=parse_isq(dim) if dim is not None else None,
        identifiers=tuple(identifiers),
        source="fixture",
        retrieved_at=AUTHORED_AT,
    )


RECORDS = [
    record(
        "Q3711325", "speed", r"v = \frac{s}{t}", "L T^-1",
        [
            info("v", "velocity", "Q11465", "L T^-1"),
            info("s", "distance", "Q126017", "L"),
            info("t", "duration", "Q2199864", "T"),
        ],
    ),
    record(
        "Q11376", "acceleration", r"a = \frac{dv}{dt}", "L T^-2",
        [
            info("a", "acceleration", "Q11376", "L T^-2"),
            info("v", "velocity", "Q11465", "L T^-1"),
            info("t", "time", "Q11471", "T"),
        ],
    ),
    record(
        "Q2945123", "center of mass", r"\sum_{i=1}^n m_i (r_i - R) = 0", None,
        [
            info("m_i", "mass of particle i", None, "M"),
            info("r_i", "position of particle i", None, "L"),
            info("R", "center of mass position", None, "L"),
            info("n", "number of particles", None, "1"),
        ],
    ),
    record(
        "Q2305665", "conservation of momentum", r"p_{tot,1} = p_{tot,2}", "M L T^-1",
        [
            info("p_{tot,1}", "total momentum before", None, "M L T^-1"),
            info("p_{tot,2}", "total momentum after", None, "M L T^-1"),
        ],
    ),
    record(
        "Q35875", "mass-energy equivalence", r"E = m c^2", "M L^2 T^-2",
        [
            info("E", "energy", "Q11379", "M L^2 T^-2"),
            info("m", "mass", "Q11423", "M"),
            info("c", "speed of light", "Q2111", "L T^-1"),
        ],
    ),
    record(
        "Q11402", "force", r"F = m a", "M L T^-2",
        [
            info("F", "force", "Q11402", "M L T^-2"),
            info("m", "mass", "Q11423", "M"),
            info("a", "acceleration", "Q11376", "L T^-2"),
        ],
    ),
    record(
        "Q46276", "kinetic energy", r"E_k = \frac{1}{2} m v^2", "M L^2 T^-2",
        [
            info("E_k", "kinetic energy", "Q46276", "M L^2 T^-2"),
            info("m", "mass", "Q11423", "M"),
            info("v", "velocity", "Q11465", "L T^-1"),
        ],
    ),
    record(
        "Q41273", "momentum", r"p = m v", "M L T^-1",
        [
            info("p", "momentum", "Q41273", "M L T^-1"),
            info("m", "mass", "Q11423", "M"),
            info("v", "velocity", "Q11465", "L T^-1"),
        ],
    ),
    record(
        "Q29539", "density", r"\rho = \frac{m}{V}", "M L^-3",
        [
            info("rho", "density", "Q29539", "M L^-3"),
            info("m", "mass", "Q11423", "M"),
            info("V", "volume", "Q39297", "L^3"),
        ],
    ),
    record(
        "Q25342", "power", r"P = \frac{W}{t}", "M L^2 T^-3",
        [
            info("P", "power", "Q25342", "M L^2 T^-3"),
            info("W", "work", "Q42213", "M L^2 T^-2"),
            info("t", "time", "Q11471", "T"),
        ],
    ),
    record(
        "Q11652", "frequency", r"f = \frac{1}{T}", "T^-1",
        [
            info("f", "frequency", "Q11652", "T^-1"),
            info("T", "period", "Q2642727", "T"),
        ],
    ),
    record(
        "Q41591", "Ohm's law", r"U = R I", "M L^2 T^-3 I^-1",
        [
            info("U", "voltage", "Q25428", "M L^2 T^-3 I^-1"),
            info("R", "electrical resistance", "Q25358", "M L^2 T^-3 I^-2"),
            info("I", "electric current", "Q11651", "I"),
        ],
    ),
    record(
        "Q39552", "pressure", r"p = \frac{F}{A}", "M L^-1 T^-2",
        [
            info("p", "pressure", "Q39552", "M L^-1 T^-2"),
            info("F", "force", "Q11402", "M L T^-2"),
            info("A", "area", "Q11500", "L^2"),
        ],
    ),
    record(
        "Q42213", "work", r"W = F s", "M L^2 T^-2",
        [
            info("W", "work", "Q42213", "M L^2 T^-2"),
            info("F", "force", "Q11402", "M L T^-2"),
            info("s", "displacement", "Q190291", "L"),
        ],
    ),
    record(
        "Q155640", "potential energy", r"E_p = m g h", "M L^2 T^-2",
        [
            info("E_p", "potential energy", "Q155640", "M L^2 T^-2"),
            info("m", "mass", "Q11423", "M"),
            info("g", "gravitational acceleration", "Q30006", "L T^-2"),
            info("h", "height", "Q208826", "L"),
        ],
    ),
    # omega has no identifier entry on purpose: the record is incomplete and
    # the harness should say so.
    record(
        "Q161254", "angular momentum", r"L = I \omega", "M L^2 T^-1",
        [
            info("L", "angular momentum", "Q161254", "M L^2 T^-1"),
            info("I", "moment of inertia", "Q165618", "M L^2"),
        ],
    ),
    # Double equality: translation must reject this loudly.
    record(
        "Q25358", "electrical resistance", r"R = \frac{U}{I} = \frac{\rho l}{A}",
        "M L^2 T^-3 I^-2",
        [
            info("R", "electrical resistance", "Q25358", "M L^2 T^-3 I^-2"),
            info("U", "voltage", "Q25428", "M L^2 T^-3 I^-1"),
            info("I", "electric current", "Q11651", "I"),
        ],
    ),
    record(
        "Q193547", "escape velocity", r"v_e = \sqrt{\frac{2 G M}{r}}", "L T^-1",
        [
            info("v_e", "escape velocity", "Q193547", "L T^-1"),
            info("G", "gravitational constant", "Q18373", "M^-1 L^3 T^-2"),
            info("M", "mass", "Q11423", "M"),
            info("r", "distance", "Q126017", "L"),
        ],
    ),
    # No formula dimension and no dimension for B: units are unavailable.
    record(
        "Q177831", "magnetic flux", r"\Phi = B A", None,
        [
            info("Phi", "magnetic flux", "Q177831", None),
            info("B", "magnetic flux density", "Q30204", None),
            info("A", "area", "Q11500", "L^2"),
        ],
    ),
    # \Delta is not in the grammar: translation fails with the macro named.
    record(
        "Q837940", "impulse", r"J = F \Delta t", "M L T^-1",
        [
            info("J", "impulse", "Q837940", "M L T^-1"),
            info("F", "force", "Q11402", "M L T^-2"),
            info("t", "time", "Q11471", "T"),
        ],
    ),
]


def main():
    out = Path(__file__).resolve().parent.parent / "src" / "physquiz" / "data" / "concepts_snapshot.json"
    snapshot_fixture(RECORDS, out)
    print(f"wrote {len(RECORDS)} records to {out}")


if __name__ == "__main__":
    main()
