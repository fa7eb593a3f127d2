"""Write synthetic daily station files for two regions plus a run config.

The output directory can be fed straight to the command line:

    python3 scripts/make_station_files.py demo
    climhet ingest --config demo/run.yaml
    climhet analyze --config demo/run.yaml
    climhet compare --config demo/run.yaml
    climhet report --config demo/run.yaml
"""
import argparse
from pathlib import Path

import yaml

from climhet.synthetic import write_station_file


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir")
    parser.add_argument("--stations", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    write_station_file(out / "north.csv", 1950, 2019, args.stations, location_slope=0.03,
                       scale_slope=0.004, seed=args.seed, missing_months=2, bad_rows=10)
    write_station_file(out / "south.csv", 1950, 2019, args.stations, location_slope=0.015,
                       seed=args.seed + 1)
    config = {
        "start_year": 1950,
        "end_year": 2019,
        "periods": ["1950-2019", "1950-1984", "1985-2019"],
        "split_year": 1985,
        "level": 0.10,
        "regions": {"north": {"paths": ["north.csv"]}, "south": {"paths": ["south.csv"]}},
        "reference": "south",
        "compare": {"a": "north", "b": "south"},
        "out": "results",
    }
    (out / "run.yaml").write_text(yaml.safe_dump(config, sort_keys=False))
    print(f"wrote {out}/north.csv, {out}/south.csv and {out}/run.yaml")


if __name__ == "__main__":
    main()
