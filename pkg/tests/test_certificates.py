import json

import pytest
from hypothesis import given, settings, strategies as st

from diffavoid.certificates import INLINE_LIMIT, CertificateFile, CertificateFormatError

scalars = st.one_of(
    st.none(), st.booleans(), st.integers(-(2**70), 2**70),
    st.floats(allow_nan=False, allow_infinity=False), st.text(max_size=12),
)
json_values = st.recursive(
    scalars,
    lambda inner: st.one_of(st.lists(inner, max_size=4), st.dictionaries(st.text(max_size=6), inner, max_size=4)),
    max_leaves=12,
)

certificates = st.builds(
    CertificateFile,
    command=st.lists(st.text(max_size=10), max_size=6),
    spec=st.text(max_size=40),
    verdict=st.one_of(st.none(), st.sampled_from(["verified-exhaustive", "verified-sampled", "refuted"])),
    elements=st.one_of(st.none(), st.lists(st.integers(1, 2**63 - 1), max_size=30)),
    set_path=st.one_of(st.none(), st.text(max_size=20)),
    exponents=st.lists(st.dictionaries(st.text(max_size=6), json_values, max_size=4), max_size=3),
    timings=st.dictionaries(st.text(max_size=6), st.floats(0, 1e6), max_size=3),
    result=st.dictionaries(st.text(max_size=6), json_values, max_size=4),
)


@settings(max_examples=100)
@given(certificates)
def test_round_trip(cert):
    text = cert.serialize()
    back = CertificateFile.parse(text)
    assert back == cert
    assert back.serialize() == text


def test_schema_fields(tmp_path):
    cert = CertificateFile(command=["diffavoid", "search"], spec="s")
    path = tmp_path / "c.json"
    cert.write(path)
    d = json.loads(path.read_text(encoding="utf-8"))
    assert d["schemaVersion"] == "1"
    assert set(d) >= {"command", "spec", "elements", "verdict", "exponents", "timings", "toolVersion"}
    assert CertificateFile.read(path) == cert


def test_inline_versus_sidecar():
    cert = CertificateFile(command=[], spec="")
    cert.attach_elements(range(1, INLINE_LIMIT + 1), None)
    assert len(cert.elements) == INLINE_LIMIT and cert.set_path is None
    cert.attach_elements(range(1, INLINE_LIMIT + 2), "big.set")
    assert cert.elements is None and cert.set_path == "big.set"
    with pytest.raises(ValueError):
        cert.attach_elements(range(1, INLINE_LIMIT + 2), None)


@pytest.mark.parametrize("text", ["nope", "[]", '{"schemaVersion": "2"}', '{"schemaVersion": "1"}'])
def test_parse_rejects(text):
    with pytest.raises(CertificateFormatError):
        CertificateFile.parse(text)
