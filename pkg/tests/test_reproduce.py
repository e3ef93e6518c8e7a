"""
End-to-end reproduction cases checked against the stored reference values.

The 10-digit cases run in a few seconds; the 60-digit ones are marked slow.
"""
import pytest

from painlab.config import parse_complex
from painlab.errors import ConfigError
from painlab.pipelines import CASES, ReferenceBook, run_case


@pytest.fixture(scope="module")
def book():
    return ReferenceBook()


def _rows(report, prefix):
    return [row for row in report.comparisons if row.quantity.startswith(prefix)]


def _reference(report, row):
    return parse_complex(row.reference, report.prec)


def _relative_errors_match(report):
    """Computed relative errors of the predictions sit within 20% of the stored one-digit figures."""
    rows = _rows(report, "relative error")
    assert len(rows) == 2
    for row in rows:
        assert abs(row.computed / _reference(report, row) - 1) <= 0.2


def test_every_case_is_registered():
    assert len(CASES) == 12
    for name, case in CASES.items():
        assert case.name == name
        assert case.default_digits >= 10


def test_unknown_case(book):
    with pytest.raises(ConfigError):
        run_case("mu3-stokes", book=book)


@pytest.mark.parametrize("name", ["mu157-stokes", "mu4-stokes", "mu157-seed"])
def test_ten_digit_cases(name, book):
    report = run_case(name, book=book)
    assert report.comparisons
    assert report.worst_digits() >= 9
    payload = report.to_dict()
    assert payload["case"] == name
    assert payload["digits"] == 10
    assert payload["guard_digits"] == 20


def test_guard_digits_reach_the_case(book):
    report = run_case("mu157-stokes", book=book, guard_digits=35)
    assert report.prec.guard_digits == 35
    assert report.prec.working_digits == 45
    assert report.to_dict()["guard_digits"] == 35
    assert report.worst_digits() >= 9


def test_stored_h1_follows_the_laurent_convention(book):
    """h is the u⁴ coefficient of u⁻² + x_j u²/10 + u³/6 + h u⁴; for the first real pole it is negative."""
    assert book.text("mu1", "h_1").startswith("-0.0621357392")
    assert "u^4" in book.text("mu1", "h_1_convention")


@pytest.mark.slow
@pytest.mark.parametrize("name", ["mu1-stokes", "mu1-origin", "mu1-zero"])
def test_mu1_sixty_digit_cases(name, book):
    report = run_case(name, book=book)
    assert report.prec.target_digits == 60
    assert report.worst_digits() >= 58


@pytest.mark.slow
def test_mu1_poles_and_h(book):
    report = run_case("mu1-poles", book=book)
    assert report.worst_digits() >= 55
    (h_row,) = _rows(report, "h1")
    assert report.prec.mp.re(h_row.computed) < 0
    assert h_row.digits >= 55


@pytest.mark.slow
@pytest.mark.parametrize("name, label", [("mu157-p1", "p1 (r="), ("mu157-p2", "p2 (r=")])
def test_mu157_singularities(name, label, book):
    """Ten digits throughout, and each radius shrink moves the estimate far less than the one before."""
    report = run_case(name, book=book)
    assert report.worst_digits() >= 9
    half, tenth, hundredth = (row.computed for row in _rows(report, label))
    assert abs(half - tenth) >= 100 * abs(tenth - hundredth)


@pytest.mark.slow
def test_mu157_predictions(book):
    report = run_case("mu157-predict", book=book)
    predicted = _rows(report, "predicted")
    assert len(predicted) == 2
    assert all(row.digits >= 2 for row in predicted)
    _relative_errors_match(report)


@pytest.mark.slow
def test_mu1_predictions(book):
    report = run_case("mu1-predict", book=book)
    predicted = _rows(report, "predicted")
    assert len(predicted) == 2
    assert all(row.digits >= 2 for row in predicted)
    _relative_errors_match(report)


@pytest.mark.slow
def test_mu4_scan(book):
    """Padé candidates land within 1e-2 of each singularity; the contours confirm them to ten digits."""
    report = run_case("mu4-scan", book=book)
    pade_rows = [row for row in report.comparisons if row.quantity.endswith("(Pade)")]
    contour_rows = [row for row in report.comparisons if row.quantity.endswith("(contour)")]
    assert len(pade_rows) == len(contour_rows) == 3
    for row in pade_rows:
        assert abs(row.computed - _reference(report, row)) < 1e-2
    assert all(row.digits >= 9 for row in contour_rows)
