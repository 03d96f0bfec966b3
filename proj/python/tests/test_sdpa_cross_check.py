"""Exported programs solved by an independent reader and conic solver."""

import pytest

import pepkit

cvxpy = pytest.importorskip("cvxpy")
from sdpa_reference import solve_sdpa  # noqa: E402


@pytest.mark.parametrize(
    "H, mu, criterion",
    [
        (pepkit.gm(1, 1.5), 0.0, "obj"),
        (pepkit.gm(3, 1.0), 0.1, "obj"),
        (pepkit.fgm(3, "primary"), 0.0, "mingrad"),
        (pepkit.ogm(2, "secondary"), 0.0, "grad"),
    ],
)
def test_exported_program_value(H, mu, criterion):
    p = pepkit.assemble(pepkit.FunctionClass(mu, 1.0), H, 1.0, criterion)
    ours = pepkit.solve(p).value
    status, theirs = solve_sdpa(p.to_sdpa())
    assert status == "optimal"
    assert theirs == pytest.approx(ours, rel=1e-5, abs=1e-7)
