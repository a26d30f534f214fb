"""Python access to the kakeya-lab experiments and exact exponent tables."""

from ._kakeya import (  # noqa: F401
    Tube,
    TubeFamily,
    bezout,
    cordoba,
    easy_exponent,
    emit_table,
    equal_mass,
    exponent_system,
    final_conjugate,
    gamma_weights,
    hausdorff_bound,
    kakeya_ratio,
    linear_exponent,
    make_direction_separated_family,
    poly_average_bound,
    poly_bound_fuzz,
    pwa_exponent,
    p_ladder,
    rasterize,
    set_workers,
    sharpness,
    vanishing,
    verify_xy_zero,
    workers,
    write_artifacts,
)

__all__ = [name for name in dir() if not name.startswith("_")]
