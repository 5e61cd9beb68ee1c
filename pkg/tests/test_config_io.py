import numpy as np
import pytest

from trijunction.config import parse_config
from trijunction.errors import IoError, ParseError, ValidationError
from trijunction.storage import (
    TRAJECTORY_HEADER,
    TrajectoryRow,
    read_network,
    read_trajectory,
    row_from_record,
    write_network,
    write_trajectory,
)

MINIMAL = """
# a disk
domain.type = circle
domain.radius = 1.0
tensions = 1.0, 1.0, 1.0
"""


def test_minimal_config_fills_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.domain_type == "circle"
    assert cfg.n == 100
    assert cfg.dt is None
    assert cfg.t_end == 1.0
    assert cfg.output == "trajectory.csv"
    assert cfg.perturbation_type == "cosine"
    assert cfg.make_domain().family == "circle"
    assert cfg.make_tensions().array.tolist() == [1.0, 1.0, 1.0]


def test_config_full_round():
    text = MINIMAL + """
n = 64
dt = 1e-5
t_end = 0.25
output_every = 10
gauge = 0.0
guess.p = 0.05, 0.03
perturbation.type = eigenmode
perturbation.amplitude = 0.02
spectrum_n = 128
output = out.csv
seed = 3
"""
    cfg = parse_config(text)
    assert cfg.n == 64 and cfg.dt == 1e-5 and cfg.spectrum_n == 128
    assert cfg.gauge == 0.0 and cfg.guess_p == (0.05, 0.03)
    assert cfg.perturbation_type == "eigenmode"
    assert cfg.seed == 3


def test_polynomial_domain_config():
    cfg = parse_config(
        "domain.type = polynomial\n"
        "domain.coefficients = 2 0 1; 0 2 1; 0 0 -1\n"
        "domain.bounding_box = -2, 2, -2, 2\n"
        "tensions = 1, 1, 1\n"
    )
    dom = cfg.make_domain()
    assert dom.family == "polynomial"
    assert abs(float(dom.psi(np.array([1.0, 0.0])))) < 1e-15


def test_unknown_key_rejected_with_line():
    with pytest.raises(ParseError) as err:
        parse_config(MINIMAL + "foo = 1\n")
    assert "foo" in str(err.value)
    assert err.value.line == 6


def test_degenerate_tensions_rejected():
    with pytest.raises(ValidationError) as err:
        parse_config("domain.type = circle\ntensions = 1, 1, 2.5\n")
    assert err.value.field == "tensions"


@pytest.mark.parametrize(
    "text,field",
    [
        ("domain.type = circle\ntensions = 1, 1, 1\nn = 4\n", "n"),
        ("domain.type = circle\ntensions = 1, 1, 1\ndt = -1\n", "dt"),
        ("domain.type = circle\ntensions = 1, 1, 1\nt_end = oops\n", "t_end"),
        ("domain.type = ellipse\ntensions = 1, 1, 1\n", "domain.semi_axes"),
        ("tensions = 1, 1, 1\n", "domain.type"),
        ("domain.type = circle\ntensions = 1, 1\n", "tensions"),
    ],
)
def test_validation_errors_name_the_field(text, field):
    with pytest.raises(ValidationError) as err:
        parse_config(text)
    assert err.value.field == field


def test_duplicate_key_rejected():
    with pytest.raises(ParseError):
        parse_config(MINIMAL + "tensions = 1, 1, 1\n")


# ---------------------------------------------------------------------------
# trajectory files


def sample_rows():
    rng = np.random.default_rng(0)
    rows = []
    for k in range(3):
        vals = rng.uniform(-1.0, 1.0, 14)
        vals[0] = 0.1 * k
        rows.append(TrajectoryRow(*vals))
    return rows


def test_trajectory_round_trip_bitwise(tmp_path):
    rows = sample_rows()
    path = tmp_path / "t.csv"
    write_trajectory(rows, path)
    back = read_trajectory(path)
    assert back == rows  # dataclass equality is fieldwise float equality


def test_empty_trajectory(tmp_path):
    path = tmp_path / "empty.csv"
    write_trajectory([], path)
    assert path.read_text().strip() == TRAJECTORY_HEADER
    assert read_trajectory(path) == []


def test_malformed_row_reports_index(tmp_path):
    path = tmp_path / "bad.csv"
    write_trajectory(sample_rows(), path)
    lines = path.read_text().splitlines()
    lines[2] = lines[2].rsplit(",", 1)[0]  # drop a field from row 2
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(IoError) as err:
        read_trajectory(path)
    assert "row 2" in str(err.value)


def test_wrong_header_rejected(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("nope\n1,2\n")
    with pytest.raises(IoError):
        read_trajectory(path)


def test_row_from_record_mapping(trefoil, trefoil_network, unit_tensions):
    from trijunction.diagnostics import record_from_state
    from trijunction.parameterization import GraphState

    state = GraphState(np.zeros((3, 17)), np.zeros(3), t=0.5)
    rec = record_from_state(trefoil_network, trefoil, unit_tensions, state)
    row = row_from_record(rec)
    assert row.t == 0.5
    assert row.E == rec.E
    assert row.mu1 == 0.0


# ---------------------------------------------------------------------------
# network blocks


def test_network_round_trip(tmp_path, trefoil_network):
    path = tmp_path / "net.txt"
    write_network(trefoil_network, path)
    back = read_network(path)
    assert np.array_equal(back.p_star, trefoil_network.p_star)
    assert np.array_equal(back.tangents, trefoil_network.tangents)
    assert np.array_equal(back.lengths, trefoil_network.lengths)
    assert np.array_equal(back.h_star, trefoil_network.h_star)
    assert np.array_equal(back.endpoints, trefoil_network.endpoints)
    assert np.abs(back.normals - trefoil_network.normals).max() < 1e-16


def test_network_missing_field(tmp_path):
    path = tmp_path / "net.txt"
    path.write_text("p = 0, 0\n")
    with pytest.raises(IoError):
        read_network(path)
