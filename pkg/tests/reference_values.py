"""Reference results for the benchmark cells.

Gbp/Usd MAE and MSE are stated in units of 1e-5, matching the harness's
``report_scale`` for that dataset.
"""

METHODS = ("ann", "arima", "zhang", "khashei_bijari", "babu_reddy", "proposed")


def _grid(rows):
    out = {}
    for dataset, by_metric in rows.items():
        for metric, values in by_metric.items():
            for method, v in zip(METHODS, values):
                out[(dataset, method, metric)] = v
    return out


PLAIN = _grid({
    "sunspot": {"mae": (14.23, 13.37, 13.14, 10.62, 11.39, 10.48),
                "mse": (353.12, 306.97, 289.31, 205.08, 239.90, 194.29),
                "mase": (0.629, 0.591, 0.581, 0.470, 0.504, 0.463)},
    "lynx": {"mae": (0.1249, 0.1198, 0.1003, 0.1025, 0.1102, 0.1013),
             "mse": (0.0241, 0.0231, 0.0173, 0.0175, 0.0189, 0.0162),
             "mase": (0.6185, 0.5932, 0.4966, 0.50757, 0.5457, 0.5016)},
    "gbpusd": {"mae": (428.55, 435.72, 429.52, 406.22, 436.34, 404.90),
               "mse": (3.4681, 3.5272, 3.4496, 3.1053, 3.5053, 2.9538),
               "mase": (1.085, 1.103, 1.087, 1.028, 1.104, 1.025)},
    "intraday": {"mae": (20.10, 20.22, 19.16, 19.79, 19.50, 18.81),
                 "mse": (617.46, 652.72, 594.09, 600.93, 619.67, 581.38),
                 "mase": (1.048, 1.054, 0.999, 1.031, 1.016, 0.980)},
})

WITH_EMD = _grid({
    "sunspot": {"mae": (8.33, 7.72, 7.46, 7.76, 7.92, 7.28),
                "mse": (120.14, 99.07, 90.04, 99.17, 100.64, 87.86),
                "mase": (0.368, 0.341, 0.330, 0.343, 0.350, 0.322)},
    "lynx": {"mae": (0.0912, 0.0772, 0.0764, 0.0782, 0.0788, 0.0760),
             "mse": (0.01318, 0.00996, 0.00995, 0.00998, 0.01014, 0.00923),
             "mase": (0.4516, 0.3822, 0.3783, 0.3872, 0.3902, 0.3763)},
    "gbpusd": {"mae": (190.08, 146.03, 142.92, 146.11, 147.18, 141.38),
               "mse": (0.5610, 0.3578, 0.3479, 0.3581, 0.3633, 0.3285),
               "mase": (0.4812, 0.3697, 0.3618, 0.3699, 0.3726, 0.3579)},
    "intraday": {"mae": (10.96, 10.79, 10.37, 9.88, 10.05, 8.93),
                 "mse": (182.86, 158.64, 158.88, 162.55, 165.41, 130.79),
                 "mase": (0.571, 0.562, 0.540, 0.515, 0.524, 0.456)},
})

# Percentage improvements as printed, rounded to one decimal.
IMPROVEMENT = _grid({
    "sunspot": {"mae": (41.1, 42.2, 43.2, 26.9, 30.4, 30.5),
                "mse": (65.9, 67.7, 68.8, 51.6, 58.0, 54.7),
                "mase": (41.1, 42.2, 43.2, 26.9, 30.4, 30.5)},
    "lynx": {"mae": (26.9, 35.5, 25.1, 23.7, 28.4, 28.4),
             "mse": (45.6, 57.1, 42.7, 43.4, 46.5, 43.2),
             "mase": (26.9, 35.5, 25.1, 23.7, 28.4, 28.4)},
    "gbpusd": {"mae": (55.6, 66.4, 62.3, 64.0, 66.2, 65.0),
               "mse": (83.8, 90.0, 90.1, 88.7, 89.7, 89.1),
               "mase": (55.6, 66.4, 62.3, 64.0, 66.2, 65.0)},
    "intraday": {"mae": (45.4, 46.6, 44.4, 50.0, 48.4, 52.5),
                 "mse": (70.3, 75.6, 73.2, 72.9, 73.3, 77.5),
                 "mase": (45.4, 46.6, 44.4, 50.0, 48.4, 52.5)},
})
