"""Regenerate the committed figure fixtures in plots/tests/fixtures.

Small deterministic runs of the simulation CLI plus two exported geodesic
traces.  Rerunning must reproduce every file byte for byte; the figure
tests read these fixtures and nothing else.
"""

from __future__ import annotations

from pathlib import Path

from halfspace_lpp.cli import main as lpp_main
from halfspace_lpp.engine import last_passage_line
from halfspace_lpp.env import EnvironmentSpec, PointToPointRate, StationaryRho
from halfspace_lpp.geodesic import backtrack, geodesic_to_csv
from halfspace_lpp.scaling import ScalingFrame, q_point

FIXTURES = Path(__file__).resolve().parent.parent / "plots" / "tests" / "fixtures"


def run(argv: list[str]) -> None:
    code = lpp_main(argv)
    if code != 0:
        raise SystemExit(f"fixture run failed with exit {code}: {argv}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for tag, tau in (("03", "0.3"), ("05", "0.5"), ("07", "0.7")):
        run(["covariance", "--n", "40", "--tau", tau, "--replicas", "1000",
             "--seed", "0", "--out", str(FIXTURES / f"covariance_tau{tag}.csv")])
    run(["localization", "--n", "40", "--tau", "0.5", "--m1", "0.4",
         "--m-values", "0.5,1,1.5", "--replicas", "1000", "--seed", "0",
         "--out", str(FIXTURES / "localization.csv")])
    run(["rw-bounds", "--n", "60", "--replicas", "3000", "--seed", "0",
         "--out", str(FIXTURES / "rw_bounds.csv")])
    run(["tails", "--n", "40", "--kind", "diag", "--w-grid", "-1,-1.5",
         "--mu-grid", "1,2", "--replicas", "3000", "--seed", "0",
         "--out", str(FIXTURES / "tails_diag.csv")])
    run(["kernel", "--n", "20", "--s-grid", "58,66,74,82,90", "--x-nodes", "24",
         "--contour-nodes", "128", "--m-max", "8",
         "--out", str(FIXTURES / "kernel.csv")])

    frame = ScalingFrame(N=60)
    end = q_point(frame, 0.0, 1.0)
    for name, kind in (
        ("stationary", StationaryRho(frame.rho)),
        ("pp", PointToPointRate(frame.rho)),
    ):
        table = last_passage_line(EnvironmentSpec(kind=kind, size=frame.N, seed=7), end)
        geodesic_to_csv(backtrack(table, end), str(FIXTURES / f"geodesic_{name}.csv"))


if __name__ == "__main__":
    main()
