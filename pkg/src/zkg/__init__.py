"""Pseudospectral simulator and analysis harness for a coupled
wave-Schrodinger system with fractional-derivative wave coupling."""

from .besov import DyadicPartition, besov_norm, partition_for, project
from .evolution import (
    Params,
    State,
    initial_state,
    reconstruct_n,
    reconstruct_nt,
    reduce_to_first_order,
    rhs_profiles,
    run,
    step_ifrk4,
)
from .diagnostics import (
    DiagnosticsRecord,
    conserved_quantities,
    dispersive_estimate_check,
    fit_decay,
    make_record,
    scattering_monitor,
    xnorm_report,
)
from .initial_data import (
    CertReport,
    DataSpec,
    certified_spec,
    certify_data,
    choose_parameters,
    make_data,
)
from .phases import (
    check_schrodinger_scaling_identity,
    check_wave_null_identity,
    duhamel_oracle_schrodinger,
    duhamel_oracle_wave,
    phase_schrodinger,
    phase_wave,
)
from .propagators import (
    ProfilePair,
    schrodinger_group,
    schrodinger_physical_of,
    schrodinger_profile_of,
    t_wrap,
    wave_half_group,
    wave_physical_of,
    wave_profile_of,
)
from .spectral import (
    FREQUENCY,
    PHYSICAL,
    Field,
    Grid,
    apply_multiplier,
    dealias,
    frequency_field,
    l2_norm,
    lambda_pow,
    lp_norm,
    multiply_by_weight,
    physical_field,
    sobolev_norm,
    to_frequency,
    to_physical,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
