"""Plot tables written by `tdlhf fx`, `tdlhf eps`, `tdlhf static-fx` and the
dipole trace of `tdlhf tdlhf run`.

    python docs/plot_tables.py fx_rs5.csv [more.csv ...] -o fig.png

The command is read from the "# command:" header line. Needs matplotlib.
"""

import argparse
import csv

import matplotlib.pyplot as plt


def read_table(path):
    meta, rows, header = {}, [], None
    with open(path) as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                meta[key] = value.strip()
            elif header is None:
                header = line.strip().split(",")
            else:
                rows.append([float(v) for v in next(csv.reader([line]))])
    cols = {name: [r[i] for r in rows] for i, name in enumerate(header)}
    return meta, cols


def plot_one(ax, path):
    meta, c = read_table(path)
    cmd = meta.get("command", "")
    label = f"r_s = {meta.get('r_s', '?')}"
    if cmd == "fx":
        kf2 = float(meta["k_F_au"]) ** 2
        ax.plot(c["omega_over_epsF"], [v * kf2 for v in c["re_fx_au"]], label=f"Re, {label}")
        ax.plot(c["omega_over_epsF"], [v * kf2 for v in c["im_fx_au"]], "--", label=f"Im, {label}")
        ax.set_xlabel("omega / eps_F")
        ax.set_ylabel("k_F^2 f_x")
    elif cmd == "eps":
        ax.plot(c["omega_over_epsF"], c["re_eps"], label=f"Re eps, {label}")
        ax.plot(c["omega_over_epsF"], c["im_eps"], "--", label=f"Im eps, {label}")
        ax.plot(c["omega_over_epsF"], c["re_eps_lindhard"], ":", label=f"Re eps RPA, {label}")
        ax.set_xlabel("omega / eps_F")
        ax.set_ylim(-5, 5)
    elif cmd == "static-fx":
        ax.plot(c["q_over_kF"], c["fx_au"], label=f"f_x, {label}")
        ax.plot(c["q_over_kF"], c["asymptote_au"], ":", label="-2 pi / q^2")
        ax.set_xlabel("q / k_F")
        ax.set_ylabel("f_x (a.u.)")
    elif cmd == "tdlhf run":
        ax.plot(c["t"], c["dipole"], label=path)
        ax.set_xlabel("t (a.u.)")
        ax.set_ylabel("dipole (a.u.)")
    else:
        raise SystemExit(f"{path}: unknown command '{cmd}'")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("tables", nargs="+")
    ap.add_argument("-o", "--out", default="plot.png")
    args = ap.parse_args()
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.tables:
        plot_one(ax, path)
    ax.axhline(0.0, color="0.7", lw=0.5)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
