"""Binary field container: roundtrips and corruption handling."""

import struct

import numpy as np
import pytest

from halfwave.errors import FieldLoadError
from halfwave.fieldio import MAGIC, read_field, write_field
from halfwave.grid import (
    Field,
    SpacetimeField,
    SpacetimeGrid,
    SpacetimeSpectrum,
    SpatialGrid,
    Spectrum,
)


@pytest.fixture
def sg():
    return SpatialGrid(8, np.pi)


@pytest.fixture
def stg(sg):
    return SpacetimeGrid(sg, 4, 2.0)


def _rand(shape, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.mark.parametrize("cls", [Field, Spectrum])
def test_spatial_roundtrip_bit_exact(tmp_path, sg, cls):
    obj = cls(sg, _rand(sg.shape))
    path = tmp_path / "field.hw"
    write_field(path, obj)
    back = read_field(path)
    assert type(back) is cls
    assert back.grid == sg
    assert np.array_equal(back.data, obj.data)


@pytest.mark.parametrize("cls", [SpacetimeField, SpacetimeSpectrum])
def test_spacetime_roundtrip_bit_exact(tmp_path, stg, cls):
    obj = cls(stg, _rand((stg.m,) + stg.spatial.shape))
    path = tmp_path / "field.hw"
    write_field(path, obj)
    back = read_field(path)
    assert type(back) is cls
    assert back.grid == stg
    assert np.array_equal(back.data, obj.data)


def test_wrong_magic(tmp_path, sg):
    path = tmp_path / "field.hw"
    write_field(path, Field(sg, _rand(sg.shape)))
    raw = bytearray(path.read_bytes())
    raw[:2] = b"ZZ"
    path.write_bytes(bytes(raw))
    with pytest.raises(FieldLoadError, match="magic"):
        read_field(path)


def test_wrong_version(tmp_path, sg):
    path = tmp_path / "field.hw"
    write_field(path, Field(sg, _rand(sg.shape)))
    raw = bytearray(path.read_bytes())
    raw[8:16] = struct.pack("<Q", 99)
    path.write_bytes(bytes(raw))
    with pytest.raises(FieldLoadError, match="version"):
        read_field(path)


def test_truncated_header(tmp_path):
    path = tmp_path / "field.hw"
    path.write_bytes(MAGIC)
    with pytest.raises(FieldLoadError, match="truncated header"):
        read_field(path)


def test_truncated_payload_reports_bytes(tmp_path, sg):
    path = tmp_path / "field.hw"
    write_field(path, Field(sg, _rand(sg.shape)))
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) - 128])
    with pytest.raises(FieldLoadError, match="bytes"):
        read_field(path)


def test_bad_grid_descriptor(tmp_path, sg):
    path = tmp_path / "field.hw"
    write_field(path, Field(sg, _rand(sg.shape)))
    raw = bytearray(path.read_bytes())
    raw[16:24] = struct.pack("<q", -4)  # negative N
    path.write_bytes(bytes(raw))
    with pytest.raises(FieldLoadError, match="descriptor"):
        read_field(path)
