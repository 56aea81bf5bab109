import pytest

from nnmix.distributions import Exponential, Gaussian, GaussianMixture, Laplace, Scenario, Uniform
from nnmix.experiments import catalog_densities
from nnmix.scenario_io import ScenarioParseError, dump_scenario, load_scenario, parse_density, parse_scenario


def test_parse_each_kind():
    assert parse_density("gaussian(mean=0, var=1)") == Gaussian(0, 1)
    assert parse_density("uniform(lo=-1, hi=2.5)") == Uniform(-1, 2.5)
    assert parse_density("exponential(rate=2)") == Exponential(2.0, 0.0)
    assert parse_density("laplace(loc=0.5, scale=1e-1)") == Laplace(0.5, 0.1)
    m = parse_density("mixture(0.3*gaussian(mean=-1, var=0.5) + 0.7*gaussian(mean=2, var=1))")
    assert m == GaussianMixture([(0.3, -1.0, 0.5), (0.7, 2.0, 1.0)])


@pytest.mark.parametrize("d", catalog_densities(), ids=lambda d: d.to_text())
def test_round_trip(d):
    s = Scenario(d, Gaussian(0.25, 3.0))
    assert parse_scenario(dump_scenario(s)) == s


def test_comments_and_blank_lines(tmp_path):
    p = tmp_path / "s.cfg"
    p.write_text("# pair\n\nfx = gaussian(mean=0, var=1)  # left\nFZ = laplace(loc=1, scale=1)\n")
    assert load_scenario(p) == Scenario(Gaussian(0, 1), Laplace(1, 1))


@pytest.mark.parametrize(
    "text,line",
    [
        ("fx = gaussian(mean=0, var=1)\nfz = gausian(mean=1, var=1)\n", 2),
        ("fx = gaussian(mean=0, var=1)\n\nfz = gaussian(mean=1)\n", 3),
        ("fx = gaussian(mean=0, var=-1)\nfz = gaussian(mean=1, var=1)\n", 1),
        ("fx = gaussian(mean=0, var=1)\nfz gaussian(mean=1, var=1)\n", 2),
        ("fx = gaussian(mean=0, var=1)\nfx = gaussian(mean=1, var=1)\n", 2),
        ("fx = gaussian(mean=0, var=1\nfz = gaussian(mean=1, var=1)\n", 1),
        ("fx = mixture(0.5*gaussian(mean=0, var=1) + 0.6*gaussian(mean=1, var=1))\nfz = uniform(lo=0, hi=1)\n", 1),
        ("fx = __import__('os')\nfz = uniform(lo=0, hi=1)\n", 1),
    ],
)
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ScenarioParseError) as info:
        parse_scenario(text, source="s.cfg")
    assert info.value.line == line
    assert str(info.value).startswith(f"s.cfg:{line}:")


def test_missing_key_and_missing_file(tmp_path):
    with pytest.raises(ScenarioParseError, match="missing fz"):
        parse_scenario("fx = gaussian(mean=0, var=1)\n")
    with pytest.raises(ScenarioParseError, match="cannot read"):
        load_scenario(tmp_path / "nope.cfg")
