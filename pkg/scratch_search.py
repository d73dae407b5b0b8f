"""Parameter search for the intersection placement-trend experiment."""
import statistics
import sys
from multiprocessing import Pool

from semv2x.config import HazardConfig, RsuConfig, ScenarioConfig
from semv2x.engine import run
from semv2x.policy import CautionParams

SEEDS = list(range(5, 11))
LOCS = (1, 3, 5, 6)


def one_gap(args):
    loc, rate, xf, cap, seed = args
    cfg = ScenarioConfig(scenario_kind="intersection", mode="traditional", seed=seed,
                         duration_s=300.0, spawn_rate=rate, cross_rate_factor=xf,
                         caution=CautionParams(speed_cap=cap),
                         rsu=RsuConfig(location_label=loc), hazard=HazardConfig())
    rt = run(cfg)
    rs = run(cfg.with_mode("semantic"))
    return (loc, rate, xf, cap, seed,
            rs.weighted_mean_speed_mps - rt.weighted_mean_speed_mps)


def main():
    configs = []
    for rate in (0.10, 0.14, 0.18):
        for xf in (0.4, 1.0, 1.8):
            for cap in (8.0, 12.0):
                configs.append((rate, xf, cap))
    jobs = [(loc, rate, xf, cap, seed)
            for (rate, xf, cap) in configs for loc in LOCS for seed in SEEDS]
    results = {}
    with Pool(2) as pool:
        for loc, rate, xf, cap, seed, g in pool.imap_unordered(one_gap, jobs, chunksize=4):
            results.setdefault((rate, xf, cap), {}).setdefault(loc, []).append(g)

    print("rate xf cap | g1 g3 g5 g6 | (g3-g1)/se (g3-g5)/se (g6-g5)/se")
    for (rate, xf, cap) in configs:
        cells = results[(rate, xf, cap)]
        m = {loc: statistics.fmean(cells[loc]) for loc in LOCS}
        v = {loc: statistics.variance(cells[loc]) / len(cells[loc]) for loc in LOCS}

        def margin(a, b):
            se = (v[a] + v[b]) ** 0.5
            return (m[a] - m[b]) / se if se > 0 else float("inf")

        score = min(margin(3, 1), margin(3, 5), margin(6, 5))
        print(f"{rate:.2f} {xf:.1f} {cap:4.1f} | "
              f"{m[1]:+.3f} {m[3]:+.3f} {m[5]:+.3f} {m[6]:+.3f} | "
              f"{margin(3, 1):+5.1f} {margin(3, 5):+5.1f} {margin(6, 5):+5.1f} "
              f"| min={score:+.1f}", flush=True)


if __name__ == "__main__":
    sys.exit(main())
