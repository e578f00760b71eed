import io

import numpy as np
import pytest

from avoidance.sequences import is_permissible
from avoidance.traces import (
    CouplingTrace,
    WalkerTrace,
    check_1avoidance,
    check_walker_avoidance,
    encode,
    project,
    read_trace,
    write_trace,
)


def binary(rows):
    rows = np.array(rows, dtype=np.uint8)
    return CouplingTrace(rows.shape[1], rows)


def walkers(rows, n, looped=False):
    rows = np.array(rows, dtype=np.int64)
    return WalkerTrace(n, rows.shape[1], looped, rows)


# ------------------------------------------------------------- check_1avoidance

def test_simultaneous_violation():
    report = check_1avoidance(binary([[1, 1]]))
    assert not report.ok
    v = report.violations[0]
    assert (v.kind, v.t, v.i, v.j) == ("simultaneous", 1, 1, 2)


def test_cross_time_violation():
    report = check_1avoidance(binary([[0, 1], [1, 0]]))
    assert [v.kind for v in report.violations] == ["cross_time"]
    v = report.violations[0]
    assert (v.t, v.i, v.j) == (1, 1, 2)


def test_increasing_order_passes():
    assert check_1avoidance(binary([[1, 0], [0, 1]])).ok


def test_same_walker_consecutively_allowed():
    # only a lower index immediately after a higher one is forbidden
    assert check_1avoidance(binary([[0, 1], [0, 1]])).ok


# ------------------------------------------------------------------- encode

def test_encode_simple():
    s = encode(binary([[1, 0], [0, 0], [0, 1]]))
    assert s.text() == "1 B 2"


def test_encode_all_zero():
    s = encode(CouplingTrace(3, np.zeros((5, 3), dtype=np.uint8)))
    assert s.text() == "B B B B B"


def test_encode_rejects_collision():
    with pytest.raises(ValueError):
        encode(binary([[1, 1]]))


def test_encode_of_valid_trace_is_permissible():
    rows = [[1, 0], [0, 0], [0, 1], [0, 1], [0, 0], [1, 0]]
    tr = binary(rows)
    assert check_1avoidance(tr).ok
    assert is_permissible(encode(tr))


# -------------------------------------------------------- check_walker_avoidance

def test_within_round_collision():
    report = check_walker_avoidance(walkers([[1, 1]], n=4))
    assert report.count("within_round") == 1
    v = report.violations[0]
    assert (v.t, v.i, v.j) == (1, 1, 2)


def test_cross_round_collision():
    # walker 1 moves onto vertex 1 while walker 2 still sits there
    report = check_walker_avoidance(walkers([[2, 1], [1, 3]], n=4))
    assert report.count("cross_round") == 1
    v = [v for v in report.violations if v.kind == "cross_round"][0]
    assert (v.t, v.i, v.j) == (2, 1, 2)


def test_loopless_walker_must_move():
    report = check_walker_avoidance(walkers([[2], [2]], n=4, looped=False))
    assert report.count("self_loop") == 1
    assert check_walker_avoidance(walkers([[2], [2]], n=4, looped=True)).ok


def test_clean_walker_trace_passes():
    report = check_walker_avoidance(walkers([[1, 2], [3, 4], [1, 2]], n=4))
    assert report.ok


# ------------------------------------------------------------------- project

def test_project_single_visit():
    rows = [[2, 3], [3, 1], [2, 3]]
    tr = walkers(rows, n=3)
    proj = project(tr, 1)
    assert proj.rows.tolist() == [[0, 0], [0, 1], [0, 0]]


def test_project_no_visits():
    tr = walkers([[2, 3], [3, 2]], n=4)
    assert project(tr, 4).rows.sum() == 0


def test_project_bad_vertex():
    with pytest.raises(ValueError):
        project(walkers([[1]], n=3), 4)


# --------------------------------------------------------------------- file io

def test_binary_trace_round_trip(tmp_path):
    tr = binary([[1, 0], [0, 1], [0, 0]])
    path = tmp_path / "trace.txt"
    text = write_trace(tr, path)
    assert text.splitlines()[0] == "3 2"
    back = read_trace(path)
    assert isinstance(back, CouplingTrace)
    assert (back.rows == tr.rows).all()
    assert write_trace(back) == text


def test_walker_trace_round_trip():
    tr = walkers([[1, 2], [3, 4]], n=5, looped=True)
    text = write_trace(tr)
    assert text.splitlines()[0] == "2 2 5 1"
    back = read_trace(io.StringIO(text))
    assert isinstance(back, WalkerTrace)
    assert back.n == 5 and back.looped
    assert (back.rows == tr.rows).all()


def test_read_trace_rejects_garbage():
    with pytest.raises(ValueError):
        read_trace(io.StringIO("1 2 3\n"))
    with pytest.raises(ValueError):
        read_trace(io.StringIO("2 1\n0\n"))


def test_trace_validation():
    with pytest.raises(ValueError):
        CouplingTrace(2, np.array([[0, 2]], dtype=np.uint8))
    with pytest.raises(ValueError):
        WalkerTrace(3, 1, False, np.array([[4]], dtype=np.int64))
    tr = binary([[1, 0]])
    with pytest.raises(ValueError):
        tr.rows[0, 0] = 0  # rows are frozen read-only
