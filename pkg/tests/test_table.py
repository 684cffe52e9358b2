import io

import pytest
from pydantic import ValidationError

from cgmlab.config import TABLE_HEADER
from cgmlab.schemas import PlaneKind, TableConfig, TableRow
from cgmlab.table import emit_table, write_table


def test_table_config_validation():
    cfg = TableConfig(c_list=[1.0], m_list=[0.0], r_list=[0.0])
    assert cfg.planes == list(PlaneKind)
    with pytest.raises(ValidationError):
        TableConfig(c_list=[0.0], m_list=[0.0], r_list=[0.0])
    with pytest.raises(ValidationError):
        TableConfig(c_list=[1.0], m_list=[0.0], r_list=[-1.0])
    with pytest.raises(ValidationError):
        TableConfig(c_list=[], m_list=[0.0], r_list=[0.0])
    with pytest.raises(ValidationError):
        TableConfig(c_list=[1.0], m_list=[0.0], r_list=[0.0], planes=[])
    with pytest.raises(ValidationError):
        TableConfig(c_list=[1.0], m_list=[0.0], r_list=[0.0], planes=["VV"])


def test_write_table_format():
    row = TableRow(c=4.0, m=2.0, r=0.0, plane=PlaneKind.hh, closed_form=1.0, oracle=1.00001, delta=1e-05)
    stream = io.StringIO()
    write_table([row], stream)
    lines = stream.getvalue().split("\n")
    assert lines[0] == ",".join(TABLE_HEADER)
    assert lines[1] == "4.0,2.0,0.0,HH,1.0,1.00001,1e-05"
    assert lines[2] == ""


@pytest.mark.slow
def test_emit_table_rows():
    cfg = TableConfig(c_list=[4.0, 1.0], m_list=[2.0, 0.0], r_list=[0.0], planes=[PlaneKind.hh, PlaneKind.hv_e])
    rows = emit_table(cfg)
    assert len(rows) == 2 * 2 * 1 * 2
    assert [(row.c, row.m, row.plane) for row in rows[:2]] == [(4.0, 2.0, PlaneKind.hh), (4.0, 2.0, PlaneKind.hv_e)]
    closed = {(row.c, row.m, row.plane): row.closed_form for row in rows}
    assert closed[(4.0, 2.0, PlaneKind.hh)] == pytest.approx(1.0, abs=1e-15)
    assert closed[(1.0, 0.0, PlaneKind.hv_e)] == pytest.approx(0.25, abs=1e-15)
    for row in rows:
        assert row.delta == abs(row.oracle - row.closed_form)
        assert row.delta <= 1e-4


@pytest.mark.slow
def test_emit_table_is_seeded():
    cfg = TableConfig(c_list=[4.0], m_list=[4.0], r_list=[0.0, 1.0], planes=[PlaneKind.hh], seed=3)
    first, second = emit_table(cfg), emit_table(cfg)
    assert [row.oracle for row in first] == [row.oracle for row in second]
    assert first[0].closed_form == pytest.approx(3.25, abs=1e-15)
