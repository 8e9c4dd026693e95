"""Plot a field map written by the CLI (needs matplotlib).

Angular maps become a theta/phi heat map, point maps along a ray become a
depth cut, spectra become a stem plot.

    python3 scripts/plot_field_map.py results/steer/steer_pattern.csv -o steer.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from irsholo.fieldio import read_field_map


def plot(path, out, floor_db=-40.0):
    header, data = read_field_map(path)
    kind = header.get("kind")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if kind == "spectrum":
        ax.stem(data[:, 0], np.maximum(data[:, 4], floor_db), bottom=floor_db)
        ax.set_xlabel("harmonic k")
        ax.set_ylabel("magnitude (dB)")
    elif kind == "point_field":
        r = np.linalg.norm(data[:, :3], axis=1)
        ax.plot(r, data[:, 3])
        ax.set_xlabel("distance (m)")
        ax.set_ylabel("magnitude (dB)")
        ax.set_ylim(bottom=floor_db)
    else:
        cols = header["columns"].split(",")
        t = data[:, cols.index("theta_deg")]
        p = data[:, cols.index("phi_deg")]
        db = np.maximum(data[:, cols.index("magnitude_db")], floor_db)
        nt, npp = len(np.unique(t)), len(np.unique(p))
        im = ax.pcolormesh(
            np.unique(p), np.unique(t), db.reshape(nt, npp), shading="auto", cmap="viridis"
        )
        fig.colorbar(im, ax=ax, label="magnitude (dB)")
        ax.set_xlabel("phi (deg)")
        ax.set_ylabel("theta (deg)")
    ax.set_title(f"{kind} ({header.get('normalization', 'absolute')})")
    fig.tight_layout()
    fig.savefig(out, dpi=120)


def main():
    parser = argparse.ArgumentParser(description="Plot an irsholo field map")
    parser.add_argument("path")
    parser.add_argument("-o", "--out", default="field.png")
    parser.add_argument("--floor-db", type=float, default=-40.0)
    args = parser.parse_args()
    plot(args.path, args.out, args.floor_db)


if __name__ == "__main__":
    main()
