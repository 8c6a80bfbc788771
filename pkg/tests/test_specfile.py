import pytest

from diracdeform.courant import assemble_theta, verify_master
from diracdeform.specfile import (
    SpecFileError,
    bundled_names,
    bundled_path,
    dumps_spec,
    load_spec,
    loads_spec,
    resolve_spec_path,
)

EXPECTED = {
    "abelian_point", "aff1_point", "bialgebra_k3_point", "broken_aff1", "obstructed_k4_point",
    "poisson_R2", "poisson_R3", "so3_phi_point", "standard_courant_R2",
    "standard_courant_R2_curved", "standard_courant_R3",
}

MINIMAL = """\
name: "t"
description: ""
n: 1
k: 2
rho_L:
  - ["1"]
  - ["0"]
rho_Lstar:
  - ["0"]
  - ["0"]
c_low:
  "1,2,2": "q1"
  "2,1,2": "-q1"
c_up: {}
phi: {}
psi: {}
connection: {}
"""


def test_bundled_set():
    assert set(bundled_names()) == EXPECTED


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_byte_identical_round_trip(name):
    text = bundled_path(name).read_text()
    sf = loads_spec(text)
    assert dumps_spec(sf) == text
    assert loads_spec(dumps_spec(sf)).canonical() == text


def test_digest_is_stable():
    a = load_spec("poisson_R3").digest()
    b = loads_spec(bundled_path("poisson_R3").read_text()).digest()
    assert a == b and len(a) == 16


def test_minimal_spec_loads():
    sf = loads_spec(MINIMAL)
    assert sf.spec.n == 1 and sf.defaults == {}
    assert verify_master(assemble_theta(sf.spec)).passed
    assert loads_spec(dumps_spec(sf)).canonical() == dumps_spec(sf)


def test_noncanonical_input_is_normalised():
    sf = loads_spec(MINIMAL.replace('"q1"', '"q1 + 0"').replace('"-q1"', '"-(q1)"'))
    assert dumps_spec(sf) == dumps_spec(loads_spec(MINIMAL))


def _error(text):
    with pytest.raises(SpecFileError) as info:
        loads_spec(text)
    return str(info.value)


def test_yaml_error_has_position():
    msg = _error(MINIMAL.replace('k: 2', 'k: [2'))
    assert "line" in msg and "column" in msg


def test_expression_error_has_position():
    msg = _error(MINIMAL.replace('"1,2,2": "q1"', '"1,2,2": "q1 +* 2"'))
    assert "c_low[1,2,2]" in msg and "column 5" in msg


def test_antisymmetry_violation_is_named():
    msg = _error(MINIMAL.replace('  "2,1,2": "-q1"\n', ''))
    assert "invariant violation" in msg and "c_low" in msg


@pytest.mark.parametrize("mutate,needle", [
    (lambda t: t.replace("n: 1", "n: x"), "'n'"),
    (lambda t: t + "extra: 1\n", "unknown keys"),
    (lambda t: t.replace('  - ["1"]\n  - ["0"]\nrho_Lstar', '  - ["1"]\nrho_Lstar'), "expected 2 rows"),
    (lambda t: t.replace('"1,2,2": "q1"', '"1,2,3": "q1"'), "out of range"),
    (lambda t: t.replace('"1,2,2": "q1"', '"1,2,2": "f1"'), "polynomials in q"),
    (lambda t: t + "defaults:\n  color: 1\n", "defaults"),
])
def test_shape_errors(mutate, needle):
    assert needle in _error(mutate(MINIMAL))


def test_resolve():
    assert resolve_spec_path("aff1_point") == bundled_path("aff1_point")
    with pytest.raises(SpecFileError):
        resolve_spec_path("no_such_spec")


def test_connection_round_trip(tmp_path):
    sf = load_spec("standard_courant_R2_curved")
    assert sf.spec.connection is not None and not sf.spec.connection.is_flat()
    path = tmp_path / "c.yaml"
    path.write_text(sf.canonical())
    assert load_spec(path).canonical() == sf.canonical()
