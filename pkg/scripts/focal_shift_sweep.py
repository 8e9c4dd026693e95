"""Axial peak position versus aperture size for a broadside focus.

Small apertures pull the on-axis maximum toward the surface; the design
range is only reached once the Fresnel number is large. Prints one row per
aperture: elements per side, size D, near-field interval, axial argmax.

    python3 scripts/focal_shift_sweep.py --frequency 30e9 --distance 0.45
"""

import argparse

import numpy as np

from irsholo.geometry import ApertureGrid, DirectionAngles, FresnelRegionError, PropagationContext, fresnel_bounds
from irsholo.modulation import depth_profile
from irsholo.propagation import SourceModel, incident_field
from irsholo.synthesis import FocalSpec, focusing_profile


def main():
    parser = argparse.ArgumentParser(description="focal shift sweep")
    parser.add_argument("--frequency", type=float, default=30e9)
    parser.add_argument("--distance", type=float, default=0.45)
    parser.add_argument("--sizes", type=int, nargs="*", default=[10, 20, 40, 60, 80, 120])
    args = parser.parse_args()

    ctx = PropagationContext(args.frequency)
    tag = SourceModel.at_incidence(DirectionAngles.from_degrees(10, 10), 1.0)
    z = np.arange(0.01, 3 * args.distance, 0.001)
    print("n,size_m,fresnel_lower_m,fresnel_upper_m,argmax_m,error_pct")
    for n in args.sizes:
        ap = ApertureGrid.square(n, ctx.wavelength / 2)
        try:
            lower, upper = fresnel_bounds(ap, ctx)
        except FresnelRegionError:
            lower = upper = float("nan")
        profile = focusing_profile(ap, incident_field(ap, tag, ctx), FocalSpec(DirectionAngles(0, 0), args.distance), ctx)
        d, db, _ = depth_profile(ap, tag, profile, z, ctx)
        peak = d[np.argmax(db)]
        err = 100 * abs(peak - args.distance) / args.distance
        print(f"{n},{ap.extent:.4f},{lower:.4f},{upper:.4f},{peak:.3f},{err:.1f}")


if __name__ == "__main__":
    main()
