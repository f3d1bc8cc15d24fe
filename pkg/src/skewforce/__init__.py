"""Skewed PM machine post-processing: skew factors, Maxwell-stress torque and tooth forces, spectra."""

__version__ = "0.1.0"

from .core import (
    MU_0,
    AirGapFieldMap,
    ConventionMismatchError,
    GridMismatchError,
    InvalidArgumentError,
    MachineGeometry,
    MissingDataError,
    ParseError,
    SkewConfiguration,
    SkewForceError,
    SkewStyle,
    ToothForceSeries,
    ToothWindow,
    TorqueSeries,
    tooth_windows,
    validate_geometry,
)
from .field_synth import FieldHarmonic, apply_slice_shifts, collapse_slices, synthesize
from .harmonics import (
    RippleMetrics,
    Spectrum1D,
    Spectrum2D,
    order_amplitude,
    peak_to_peak,
    ripple_metrics,
    spectrum_space_time,
    spectrum_time,
    suppression_ratio,
)
from .mst import (
    SlotPathField,
    axial_force_estimate,
    stress_tensor,
    surface_force_components,
    tooth_forces_one_section,
    tooth_forces_three_section,
    torque_2d,
    torque_total,
    traction,
)
from .skew import (
    SliceSchedule,
    continuous_inclination,
    discrete_skew_factor,
    harmonic_orders,
    optimal_skew_angle,
    skew_factor,
    slice_schedule,
)
