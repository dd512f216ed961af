import pytest

from geomforge import budget
from geomforge import classical as cl
from geomforge import forms as fm
from geomforge.named import parse_named_group
from geomforge.projgeom import build_pg
from geomforge.scalar import GF


def test_env_formats():
    assert budget.Budget.from_env('{"max_group_order": 5}').max_group_order == 5
    b = budget.Budget.from_env("max_grassmannian=7, time_ceiling=2.5")
    assert b.max_grassmannian == 7 and b.time_ceiling == 2.5
    assert budget.Budget.from_env("") == budget.Budget()
    with pytest.raises(ValueError):
        budget.Budget.from_env("bogus=1")


def test_limits_are_scoped():
    with budget.use(budget.Budget(max_group_order=10)):
        with pytest.raises(budget.BudgetExceeded) as exc:
            parse_named_group("psl(2,7)")[0].order()
        assert exc.value.kind == "group_order"
    assert parse_named_group("psl(2,7)")[0].order() == 168


@pytest.mark.parametrize("job", [
    lambda: build_pg(3, GF(3)),
    lambda: cl.build_unitary(fm.symplectic_form(GF(2), 2)),
    lambda: fm.witt_index(fm.symplectic_form(GF(3), 2)),
    lambda: cl.check_moufang(cl.moufang_set_projective_line(GF(7))),
])
def test_tiny_budgets_fail_fast(job):
    tiny = budget.Budget(max_group_order=4, max_grassmannian=4, max_enumeration=4)
    with budget.use(tiny):
        with pytest.raises(budget.BudgetExceeded):
            job()


def test_time_ceiling():
    with budget.use(budget.Budget(time_ceiling=0.0)):
        with pytest.raises(budget.BudgetExceeded) as exc:
            cl.build_unitary(fm.symplectic_form(GF(2), 2), method="backtrack")
        assert exc.value.kind == "time"
