"""Terminal densities: closed forms, the gap-model search, classical bounds."""

import math

import numpy as np
import pytest

from conftest import REFERENCE_TABLE
from packbound.models import structure_factor_gap
from packbound.optimizer import (
    TABLE_DIMS,
    TerminalDensityRecord,
    classical_bounds,
    find_minima,
    gap_feasible_t,
    terminal_delta,
    terminal_gap,
    terminal_step,
)

# regression pins from this implementation, tighter than the 7-digit references
SIGMA_PINS = {
    3: 1.2469966708,
    8: 1.1379678403,
    24: 1.0589923493,
    200: 1.0085095231,
}


def test_step_closed_form():
    for d in range(1, 65):
        rec = terminal_step(d)
        assert rec.phi_star == 2.0**-d
        assert rec.Z_star == 0.0 and rec.sigma_star == 1.0 and rec.k_min == 0.0
        assert rec.ratio == pytest.approx(2.0 / (d + 2), rel=1e-13)


def test_delta_closed_form():
    for d in range(1, 65):
        rec = terminal_delta(d)
        assert rec.phi_star == (d + 2) / 2.0 ** (d + 1)
        assert rec.Z_star == 0.5 * d
        # the contact optimum is exactly the crossover where the ratio is 1
        assert rec.ratio == pytest.approx(1.0, abs=1e-13)
    assert terminal_delta(24).phi_star == 26 / 2.0**25


@pytest.mark.parametrize("d", TABLE_DIMS)
def test_gap_sigma_phi_match_reference(d, table_records):
    sig, _, phi, _ = REFERENCE_TABLE[d]
    rec = table_records[d]
    assert abs(rec.sigma_star - sig) / sig <= 1e-4
    assert abs(rec.phi_star - phi) / phi <= 1e-4


@pytest.mark.parametrize("d", TABLE_DIMS)
def test_gap_Z_reproduction_band(d, table_records):
    # Z = (2 sigma)^d phi - 1 amplifies a sigma offset by a factor of d, and
    # several reference rows sit a few parts in 1e4 off the constraint-curve
    # maximum (their phi at their sigma matches ours to 1e-6, but the sigma is
    # not the argmax). The strict 1e-4 comparison lives in the acceptance
    # suite; this band guards against regressions in the search itself.
    Z_ref = REFERENCE_TABLE[d][1]
    rec = table_records[d]
    assert abs(rec.Z_star - Z_ref) / Z_ref <= 2.5e-3


@pytest.mark.parametrize("d", TABLE_DIMS)
def test_ratio_matches_reference(d, table_records):
    ratio_ref = REFERENCE_TABLE[d][3]
    rec = table_records[d]
    assert abs(rec.ratio - ratio_ref) / ratio_ref <= 1e-4, (
        f"improvement column mismatch at d={d}: ours {rec.ratio:.7e} is "
        f"2^(d+1) phi/(d+2) of our phi_star (phi agrees with the reference row "
        f"to {abs(rec.phi_star - REFERENCE_TABLE[d][2]) / REFERENCE_TABLE[d][2]:.1e}), "
        f"but the quoted column value {ratio_ref:.7e} is not consistent with the "
        f"quoted phi_star in the same row"
    )


def test_ratio_identity(table_records):
    for d, rec in table_records.items():
        expect = math.exp(
            math.log(rec.phi_star) + (d + 1) * math.log(2.0) - math.log(d + 2.0)
        )
        assert rec.ratio == pytest.approx(expect, rel=1e-12)


def test_sigma_regression_pins(table_records):
    for d, sig in SIGMA_PINS.items():
        assert table_records[d].sigma_star == pytest.approx(sig, rel=1e-6)


def test_d2_quoted_optimum():
    rec = terminal_gap(2)
    assert rec.sigma_star == pytest.approx(1.2946, rel=1e-4)
    assert rec.Z_star == pytest.approx(4.0148, rel=1e-4)
    assert rec.phi_star == pytest.approx(0.74803, rel=1e-4)


def test_d200_binding_wavenumber(table_records):
    assert abs(table_records[200].k_min - 108.4395) <= 1e-3


def test_d12_first_minimum_is_deepest():
    rec = terminal_gap(12)
    minima = find_minima(rec.d, rec.phi_star, rec.sigma_star, rec.Z_star, 60.0)
    assert minima
    depths = [s for _, s in minima]
    assert depths[0] == min(depths)


def test_minima_refined_to_stationarity(table_records):
    rec = table_records[3]
    assert rec.k_min == pytest.approx(4.015993, abs=1e-5)
    h = 1e-6
    s = structure_factor_gap(3, rec.phi_star, rec.sigma_star, rec.Z_star,
                             np.array([rec.k_min - h, rec.k_min + h]))
    assert abs(s[1] - s[0]) / (2 * h) < 1e-5


def test_no_minima_for_ideal_gas():
    assert find_minima(3, 0.0, 1.0, 0.0, 40.0) == []


def test_short_grid_rejected():
    with pytest.raises(ValueError):
        find_minima(24, 1e-4, 1.06, 5000.0, 12.0 + 6.0)


def test_structure_factor_nonnegative_on_grid(table_records):
    for d in (2, 3, 8, 24, 100):
        rec = table_records[d] if d in table_records else terminal_gap(d)
        kk = np.linspace(1e-9, rec.d / 2 + 40.0, 4000)
        s = structure_factor_gap(d, rec.phi_star, rec.sigma_star, rec.Z_star, kk)
        assert s.min() >= -1e-9


def test_gap_optima_hyperuniform(table_records):
    for d, rec in table_records.items():
        t = math.exp(d * math.log(2.0 * rec.sigma_star) + math.log(rec.phi_star))
        # Z + 1 = (2 sigma)^d phi holds at every scale; below d ~ 56 the
        # cancellation in S(0) = 1 - t + Z is also resolvable in doubles
        assert rec.Z_star + 1.0 == pytest.approx(t, rel=1e-12)
        if d <= 24:
            s0 = structure_factor_gap(d, rec.phi_star, rec.sigma_star, rec.Z_star, 0.0)
            assert abs(s0) <= 1e-9
        assert rec.min_S_residual <= 1e-7


def test_monotone_improvement(table_records):
    for d in (3, 4, 5, 8, 24, 64, 100, 200):
        gap = table_records[d].phi_star
        delta = terminal_delta(d).phi_star
        step = terminal_step(d).phi_star
        assert gap > delta > step


def test_below_blichfeldt(table_records):
    for d, rec in table_records.items():
        assert rec.phi_star <= classical_bounds(d).blichfeldt


def test_perturbation_certificate(table_records):
    for d in (3, 24, 200):
        rec = table_records[d]
        log_phi_star = math.log(rec.phi_star)
        for s in (rec.sigma_star - 0.002, rec.sigma_star + 0.002):
            if s < 1.0:
                continue
            t, _ = gap_feasible_t(d, s)
            log_phi = math.log(t) - d * math.log(2.0 * s)
            assert log_phi <= log_phi_star + 1e-12


def test_classical_values():
    b2 = classical_bounds(2)
    assert b2.minkowski == pytest.approx(math.pi**2 / 12.0, rel=1e-14)
    assert b2.rogers == pytest.approx(1.0 / math.e, rel=1e-14)
    assert b2.blichfeldt == pytest.approx(1.0, rel=1e-14)
    assert b2.kabatiansky_levenshtein == pytest.approx(2.0**-1.1980, rel=1e-14)
    assert classical_bounds(3).greedy == 0.125
    zeta3 = sum(1.0 / n**3 for n in range(1, 200000))
    assert classical_bounds(3).ball == pytest.approx(zeta3 / 2.0, rel=1e-9)


def test_densest_known_comparison(table_records):
    assert classical_bounds(56).densest_known == 2.327670e-11
    assert classical_bounds(3).densest_known is None
    # at d=60 the terminal density exceeds the best packing known there
    assert table_records[60].phi_star > classical_bounds(60).densest_known
    assert table_records[56].phi_star < classical_bounds(56).densest_known


def test_domain_errors():
    with pytest.raises(ValueError):
        terminal_gap(1)
    with pytest.raises(ValueError):
        terminal_gap(301)
    with pytest.raises(ValueError):
        terminal_step(0)
    with pytest.raises(ValueError):
        terminal_delta(-3)
    with pytest.raises(ValueError):
        classical_bounds(1)


def test_record_validation():
    with pytest.raises(ValueError):
        TerminalDensityRecord(3, "gap", 1.2, 7.9, 1.5, 4.0, 1.8, 0.0)
    with pytest.raises(ValueError):
        TerminalDensityRecord(3, "gap", 1.2, 7.9, 0.5, 4.0, 1.8, 1e-6)
