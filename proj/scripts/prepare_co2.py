"""Builds data/co2_monthly.csv from the weekly Mauna Loa series bundled with statsmodels.

Monthly means of the weekly readings. The five months without any reading are
filled by linear interpolation, as the NOAA monthly record does, so the series
is regular. Time is encoded in fractional years since the first month.
"""
import pathlib

import statsmodels.datasets.co2 as co2

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "co2_monthly.csv"


def main() -> None:
    weekly = co2.load_pandas().data["co2"]
    monthly = weekly.resample("MS").mean().interpolate()
    with OUT.open("w") as f:
        f.write("t,y\n")
        for i, value in enumerate(monthly.to_numpy()):
            f.write(f"{i / 12:.10g},{value:.6g}\n")


if __name__ == "__main__":
    main()
