"""Regenerates the synthetic 64x64 population sample in this directory.

Outputs region.txt, density_1876.txt, density_1936.txt and schedule.csv.
Run from this directory: python3 generate.py
"""

import numpy as np

N = 64
N0 = 12
SCALE = 1e-5  # inhabitants -> mass units, matches the preset's schedule scale
YEARS = np.arange(1876, 1937, 5)

# Region outline in (row, col) coordinates of the unit square, row 0 at the top.
OUTLINE = np.array([
    (0.08, 0.30), (0.06, 0.55), (0.12, 0.78), (0.24, 0.90), (0.45, 0.93),
    (0.62, 0.88), (0.80, 0.84), (0.93, 0.70), (0.92, 0.48), (0.84, 0.30),
    (0.70, 0.12), (0.50, 0.07), (0.30, 0.10), (0.15, 0.18),
])

# Towns: (row, col, spread, inhabitants in 1876, inhabitants in 1936).
TOWNS = [
    (0.45, 0.42, 0.035, 14000.0, 24000.0),  # prefecture, center
    (0.22, 0.78, 0.025, 4500.0, 14000.0),   # industrial town, top right
    (0.78, 0.74, 0.025, 4000.0, 4200.0),
    (0.33, 0.70, 0.020, 3500.0, 3200.0),
    (0.62, 0.25, 0.025, 3000.0, 2600.0),
]


def inside(points, poly):
    """Even-odd ray casting along the column axis."""
    r, c = points[:, 0], points[:, 1]
    hit = np.zeros(len(points), dtype=bool)
    for (r0, c0), (r1, c1) in zip(poly, np.roll(poly, -1, axis=0)):
        crosses = (r0 > r) != (r1 > r)
        with np.errstate(divide="ignore", invalid="ignore"):
            cx = c0 + (r - r0) * (c1 - c0) / (r1 - r0)
        hit ^= crosses & (c < cx)
    return hit


def schedule_values():
    t = (YEARS - YEARS[0]) / (YEARS[-1] - YEARS[0])
    return 363000.0 - 52000.0 * t + 6000.0 * np.sin(np.pi * t) * (1.0 - t)


def resample(times, values, n):
    centers = (np.arange(n) + 0.5) / n
    return np.interp(centers, times, values)


def density(region, rows, cols, year_weight, rural_total):
    rng = np.random.default_rng(1876)
    texture = 1.0 + 0.25 * rng.standard_normal((N, N))
    texture = np.clip(texture, 0.3, None)
    rural = np.where(region, texture, 0.0)
    rural *= rural_total / rural.sum()
    towns = np.zeros((N, N))
    for r, c, s, a, b in TOWNS:
        people = (1.0 - year_weight) * a + year_weight * b
        g = np.exp(-((rows - r) ** 2 + (cols - c) ** 2) / (2.0 * s * s))
        g = np.where(region, g, 0.0)
        towns += people * g / g.sum()
    return rural + towns


def main():
    h = 1.0 / N
    centers = (np.arange(N) + 0.5) * h
    rows, cols = np.meshgrid(centers, centers, indexing="ij")
    region = inside(np.stack([rows.ravel(), cols.ravel()], axis=1), OUTLINE).reshape(N, N)

    pop = schedule_values()
    t = (YEARS - YEARS[0]) / (YEARS[-1] - YEARS[0])
    town0 = sum(x[3] for x in TOWNS)
    town1 = sum(x[4] for x in TOWNS)
    # Inhabitants per cell -> density in mass units per unit area.
    rho0 = density(region, rows, cols, 0.0, pop[0] - town0) * SCALE / (h * h)
    rho1 = density(region, rows, cols, 1.0, pop[-1] - town1) * SCALE / (h * h)

    # Centered masses are averages of adjacent face masses, so the face masses
    # obey f[k+1] = 2 F[k] - f[k]; the last one fixes the 1936 mass.
    F = resample(t, pop * SCALE, N0)
    f = rho0.sum() * h * h
    for k in range(N0):
        f = 2.0 * F[k] - f
        assert f > 0.0
    rho1 *= f / (rho1.sum() * h * h)

    np.savetxt("region.txt", region.astype(int), fmt="%d", delimiter=",")
    for name, a in [("density_1876.txt", rho0), ("density_1936.txt", rho1)]:
        with open(name, "w") as out:
            for row in a:
                out.write(",".join(repr(float(x)) for x in row) + "\n")
    with open("schedule.csv", "w") as out:
        out.write("year,population\n")
        for y, p in zip(YEARS, pop):
            out.write(f"{int(y)},{float(p)!r}\n")


if __name__ == "__main__":
    main()
