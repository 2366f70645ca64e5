"""Test cases for the classification pipeline."""

import pytest

from am_operators.description import parse_description
from am_operators.errors import FiniteDimensionalError
from am_operators.pipeline import ClassificationPipeline, run_pipeline
from am_operators.schemas.description import FiniteMatrixDescription
from am_operators.utils.description_loader import DescriptionLoader

from ..conftest import DESCRIPTIONS_DIR


@pytest.fixture
def loader():
    return DescriptionLoader(str(DESCRIPTIONS_DIR))


@pytest.fixture
def pipeline(config):
    return ClassificationPipeline(config)


class TestPositiveDiagonal:
    """Test cases for positive diagonal descriptions."""

    def test_positive_below(self, pipeline, loader):
        """Test the AM, not AN operator diag(1 - 1/n)."""
        report = pipeline.run(loader.load_description("positive-below"))

        assert report.success
        assert report.kind == "positive-diagonal"
        assert report.min_modulus == "0"
        assert report.essential_min_modulus == "1"
        assert report.norm == "1"
        assert report.spectrum.essential == ["1"]
        assert report.spectrum.discrete_truncated
        assert report.min_attaining.attained
        assert not report.norm_attaining.attained
        assert report.am.verdict == "AM"
        assert report.am_decomposition.level == "1"
        assert report.an.verdict == "NotAN"
        assert report.an_decomposition is None
        assert report.duality.range_closed
        assert report.duality.an_of_pinv == "AN"
        assert report.duality.consistent
        assert report.truncation.n == 64
        assert report.truncation.within_bound

    def test_positive_above(self, pipeline, loader):
        """Test the not AM, AN operator diag(1 + 1/n)."""
        report = pipeline.run(loader.load_description("positive-above"))

        assert report.min_modulus == "1"
        assert not report.min_attaining.attained
        assert report.norm_attaining.attained
        assert report.am.verdict == "NotAM"
        assert report.an.verdict == "AN"
        assert "counterexample_streams" not in report.to_document()["am"]

    def test_emit_witness(self, config, loader):
        """Test that witnesses are only reported on request."""
        report = ClassificationPipeline(config, emit_witness=True).run(loader.load_description("positive-above"))

        assert report.am.counterexample_streams == [0]
        assert report.an.counterexample_streams is None


class TestOtherKinds:
    """Test cases for the remaining description kinds."""

    def test_normal_blocks(self, pipeline, loader):
        """Test the block decomposition of a normal operator."""
        report = pipeline.run(loader.load_description("normal-blocks"))

        assert report.success
        assert report.am.verdict == "AM"
        assert [block.beta for block in report.spectral_decomposition.blocks] == ["2"]
        assert len(report.spectral_decomposition.blocks[0].members) == 2
        assert len(report.spectral_decomposition.tail_families) == 1
        assert report.spectral_decomposition.round_trip_exact

    def test_shifted(self, pipeline, loader):
        """Test the adjoint transfer readings of a weighted shift."""
        report = pipeline.run(loader.load_description("shifted"))

        assert report.adjoint_transfer.ess_equal
        assert report.adjoint_transfer.ess_tstar_t == ["1"]
        assert report.adjoint_transfer.min_modulus_tstar == "0"

    def test_direct_sum(self, pipeline, loader):
        """Test the dense block shifted by the level."""
        report = pipeline.run(loader.load_description("direct-sum"))

        assert report.direct_sum.verdict == "AM"
        assert report.direct_sum.shifted_block == ["1"]
        assert report.direct_sum.shifted_block_positive
        assert report.am.verdict == "AM"

    def test_multiplication(self, pipeline, loader):
        """Test the layered sweep on atoms."""
        report = pipeline.run(loader.load_description("multiplication"))

        assert report.am.verdict == "AM"
        assert report.multiplication.ess_inf == "1/2"
        assert report.multiplication.ess_sup == "2"
        assert report.multiplication.am_layers[0] == "1/2"
        assert report.multiplication.diagonal_reduction_agrees
        assert report.min_attaining.witness == "atoms[2]"

    def test_truncated_shift(self, pipeline, loader):
        """Test the matrix oracle readings."""
        report = pipeline.run(loader.load_description("truncated-shift"))

        assert report.success
        assert report.matrix.numerical_rank == 2
        assert not report.matrix.hyponormal
        assert not report.matrix.paranormal
        assert report.matrix.moore_penrose_hold
        assert report.matrix.spectral_equalities_hold
        assert report.min_modulus == "0"
        assert report.norm == "1"

    def test_non_square_matrix(self, pipeline):
        """Test that the square-only checks are skipped and recorded."""
        description = FiniteMatrixDescription(name="wide", matrix=[[1, 0, 0], [0, 2, 0]])
        report = pipeline.run(description)

        assert not report.success
        assert report.matrix is None
        assert report.norm == "2"
        assert "square matrix" in report.errors[0]


class TestReporting:
    """Test cases for report bookkeeping."""

    def test_failed_step_is_recorded(self, pipeline, loader, mocker):
        """Test that a failing derived quantity does not abort the report."""
        mocker.patch(
            "am_operators.pipeline.essential_min_modulus",
            side_effect=FiniteDimensionalError("x"),
        )
        report = pipeline.run(loader.load_description("positive-below"))

        assert not report.success
        assert report.essential_min_modulus is None
        assert "essential_min_modulus: x" in report.errors
        assert report.am.verdict == "AM"

    def test_timing(self, config, loader):
        """Test that timing is only reported on request."""
        description = loader.load_description("positive-below")
        assert ClassificationPipeline(config).run(description).timing_seconds is None

        config.include_timing = True
        assert ClassificationPipeline(config).run(description).timing_seconds >= 0

    def test_document(self, config):
        """Test the serialized report."""
        description = parse_description('{"kind": "positive-diagonal", "name": "z", "cells": [{"value": 0}]}')
        document = run_pipeline(description, config).to_document()

        assert document["schema_version"] == "1"
        assert document["name"] == "z"
        assert "timing_seconds" not in document
        assert "multiplication" not in document
