"""Reference values used by ``reproduce`` and the acceptance suite.

Numbers are copied as printed, including their rounding. Table numbers
follow the order of the original result tables (1: quantiles, 2: raw
moments, 3: variance/skewness/kurtosis, 4: simulation, 5: data summaries,
6-9: model fits on the four datasets).
"""

from __future__ import annotations

QUANTILE_PARAMS = ((0.4, 0.2), (0.4, 3.0), (1.2, 0.2), (1.2, 3.0))
QUANTILE_PROBS = (0.01, 0.05, 0.10, 0.25, 0.40, 0.42, 0.43, 0.45, 0.50, 0.60, 0.75, 0.90, 0.95, 0.99)
QUANTILES = (
    (0.0311, 0.0363, 0.0094, 0.0117),
    (0.1544, 0.1741, 0.0473, 0.0566),
    (0.3069, 0.3363, 0.0955, 0.1100),
    (0.7736, 0.8036, 0.2500, 0.2658),
    (1.2886, 1.2943, 0.4279, 0.4310),
    (1.3635, 1.3643, 0.4543, 0.4547),
    (1.4016, 1.3998, 0.4677, 0.4667),
    (1.4795, 1.4722, 0.4952, 0.4912),
    (1.6841, 1.6611, 0.5680, 0.5552),
    (2.1495, 2.08456, 0.7355, 0.6991),
    (3.0927, 2.9203, 1.0815, 0.9846),
    (4.8874, 4.4343, 1.7547, 1.5079),
    (6.2642, 5.5294, 2.2759, 1.8925),
    (9.6642, 8.0174, 3.5386, 2.7954),
)

MOMENT_ETAS = (0.2, 0.6, 1.0)
# omega -> (mu1..mu4 for eta=0.2, then eta=0.6, then eta=1)
MOMENTS = {
    0.2: (4.375, 34.375, 398.437, 6328.125, 4.25, 31.25, 328.125, 4593.75, 4.219, 30.469, 310.547, 4160.156),
    0.4: (2.25, 9.375, 58.594, 503.906, 2.159, 8.239, 45.81, 346.236, 2.132, 7.904, 42.05, 299.862),
    0.6: (1.528, 4.398, 19.097, 113.812, 1.458, 3.819, 14.757, 78.125, 1.435, 3.627, 13.31, 66.229),
    0.8: (1.161, 2.567, 8.58, 39.237, 1.106, 2.224, 6.648, 27.325, 1.086, 2.097, 5.936, 22.936),
    1.0: (0.938, 1.688, 4.594, 17.062, 0.893, 1.464, 3.589, 12.107, 0.875, 1.375, 3.188, 10.125),
    1.2: (0.787, 1.196, 2.749, 8.6, 0.75, 1.042, 2.17, 6.221, 0.734, 0.976, 1.922, 5.201),
    1.4: (0.679, 0.893, 1.777, 4.803, 0.647, 0.781, 1.418, 3.539, 0.633, 0.731, 1.255, 2.964),
    1.6: (0.597, 0.692, 1.215, 2.892, 0.57, 0.609, 0.98, 2.168, 0.557, 0.569, 0.868, 1.821),
    1.8: (0.532, 0.553, 0.868, 1.846, 0.509, 0.489, 0.707, 1.405, 0.498, 0.457, 0.627, 1.185),
    2.0: (0.481, 0.452, 0.642, 1.233, 0.461, 0.401, 0.528, 0.952, 0.45, 0.375, 0.469, 0.806),
    2.2: (0.438, 0.376, 0.488, 0.855, 0.42, 0.336, 0.405, 0.669, 0.411, 0.314, 0.36, 0.569),
    2.4: (0.403, 0.318, 0.38, 0.612, 0.387, 0.285, 0.318, 0.484, 0.378, 0.267, 0.283, 0.414),
    2.6: (0.373, 0.273, 0.301, 0.449, 0.358, 0.245, 0.254, 0.36, 0.35, 0.23, 0.227, 0.308),
    2.8: (0.347, 0.236, 0.243, 0.337, 0.334, 0.214, 0.206, 0.273, 0.326, 0.2, 0.185, 0.235),
    3.0: (0.324, 0.207, 0.199, 0.258, 0.312, 0.187, 0.17, 0.211, 0.306, 0.176, 0.153, 0.182),
    3.2: (0.304, 0.182, 0.165, 0.201, 0.294, 0.166, 0.142, 0.165, 0.287, 0.156, 0.128, 0.144),
    3.4: (0.287, 0.162, 0.138, 0.159, 0.277, 0.148, 0.12, 0.132, 0.271, 0.139, 0.108, 0.115),
    3.6: (0.271, 0.145, 0.117, 0.127, 0.262, 0.133, 0.102, 0.106, 0.257, 0.125, 0.092, 0.093),
    3.8: (0.257, 0.131, 0.1, 0.103, 0.249, 0.12, 0.087, 0.087, 0.244, 0.113, 0.079, 0.076),
    4.0: (0.245, 0.118, 0.086, 0.084, 0.237, 0.109, 0.076, 0.071, 0.232, 0.103, 0.069, 0.063),
}

SHAPE_ETAS = (0.2, 0.6, 1.0, 1.5)
# omega -> (variance, skewness, kurtosis) for each eta in SHAPE_ETAS
SHAPES = {
    0.2: (15.234, 1.93, 9.497, 13.187, 1.738, 8.186, 12.671, 1.665, 7.618, 12.395, 1.621, 7.26),
    0.4: (4.312, 2.02, 9.917, 3.577, 1.859, 9.054, 3.357, 1.768, 8.412, 3.234, 1.704, 7.923),
    0.6: (2.064, 2.047, 9.942, 1.693, 1.93, 9.497, 1.567, 1.84, 8.925, 1.492, 1.768, 8.412),
    0.8: (1.22, 2.055, 9.886, 1.001, 1.974, 9.731, 0.919, 1.892, 9.266, 0.868, 1.818, 8.777),
    1.0: (0.809, 2.057, 9.815, 0.667, 2.002, 9.855, 0.609, 1.93, 9.497, 0.572, 1.859, 9.054),
    1.2: (0.577, 2.056, 9.748, 0.479, 2.02, 9.917, 0.437, 1.958, 9.655, 0.408, 1.892, 9.266),
    1.4: (0.432, 2.054, 9.687, 0.362, 2.033, 9.944, 0.33, 1.98, 9.763, 0.307, 1.918, 9.43),
    1.6: (0.337, 2.051, 9.634, 0.284, 2.041, 9.95, 0.259, 1.997, 9.836, 0.241, 1.94, 9.556),
    1.8: (0.27, 2.049, 9.587, 0.229, 2.047, 9.942, 0.209, 2.01, 9.886, 0.194, 1.958, 9.655),
    2.0: (0.221, 2.046, 9.547, 0.189, 2.051, 9.927, 0.172, 2.02, 9.917, 0.16, 1.974, 9.731),
    2.2: (0.184, 2.044, 9.511, 0.159, 2.054, 9.908, 0.145, 2.029, 9.937, 0.135, 1.986, 9.791),
    2.4: (0.156, 2.042, 9.479, 0.136, 2.055, 9.886, 0.124, 2.035, 9.947, 0.115, 1.997, 9.836),
    2.6: (0.134, 2.04, 9.451, 0.117, 2.056, 9.863, 0.107, 2.04, 9.95, 0.099, 2.006, 9.871),
    2.8: (0.116, 2.038, 9.426, 0.102, 2.057, 9.839, 0.094, 2.044, 9.948, 0.087, 2.014, 9.898),
    3.0: (0.102, 2.036, 9.404, 0.09, 2.057, 9.815, 0.083, 2.047, 9.942, 0.077, 2.02, 9.917),
    3.2: (0.09, 2.034, 9.384, 0.08, 2.057, 9.792, 0.073, 2.05, 9.934, 0.068, 2.026, 9.931),
    3.4: (0.08, 2.033, 9.365, 0.071, 2.056, 9.769, 0.066, 2.052, 9.924, 0.061, 2.031, 9.941),
    3.6: (0.072, 2.032, 9.348, 0.064, 2.056, 9.748, 0.059, 2.053, 9.912, 0.055, 2.035, 9.947),
    3.8: (0.064, 2.03, 9.333, 0.058, 2.055, 9.727, 0.054, 2.055, 9.899, 0.05, 2.038, 9.949),
    4.0: (0.058, 2.029, 9.319, 0.053, 2.054, 9.706, 0.049, 2.055, 9.886, 0.045, 2.041, 9.95),
    4.2: (0.053, 2.028, 9.306, 0.048, 2.054, 9.687, 0.045, 2.056, 9.872, 0.042, 2.044, 9.948),
    4.4: (0.049, 2.027, 9.294, 0.044, 2.053, 9.668, 0.041, 2.057, 9.858, 0.038, 2.046, 9.944),
    4.6: (0.045, 2.026, 9.283, 0.041, 2.052, 9.651, 0.038, 2.057, 9.844, 0.035, 2.048, 9.94),
    4.8: (0.041, 2.025, 9.273, 0.037, 2.051, 9.634, 0.035, 2.057, 9.829, 0.033, 2.05, 9.934),
    5.0: (0.038, 2.025, 9.264, 0.035, 2.05, 9.618, 0.032, 2.057, 9.815, 0.03, 2.051, 9.927),
}

SIM_SAMPLE_SIZES = (30, 50, 100, 200, 300, 600)
# (omega, eta) -> rows of (bias_omega, bias_eta, mse_omega, mse_eta) per sample size.
# The last row of the (1, 1) block is printed with n = 400; the pattern of
# every other block says 600, and it is read as 600 here.
SIM_RELABELLED = {((1.0, 1.0), 600)}
SIMULATION = {
    (0.5, 0.5): ((0.0287, 0.1753, 0.0100, 0.2702), (0.0203, 0.1507, 0.0059, 0.2480),
                 (0.0118, 0.1398, 0.0029, 0.2183), (0.0073, 0.1219, 0.0015, 0.1807),
                 (0.0057, 0.1133, 0.0010, 0.1633), (0.0023, 0.1043, 0.0005, 0.1236)),
    (1.0, 0.5): ((0.0480, 0.1463, 0.0398, 0.2625), (0.0337, 0.1311, 0.0240, 0.2396),
                 (0.0189, 0.1165, 0.0120, 0.2069), (0.0122, 0.0985, 0.0063, 0.1674),
                 (0.0093, 0.0955, 0.0044, 0.1455), (0.0033, 0.0822, 0.0022, 0.1049)),
    (0.5, 1.0): ((0.0320, 0.2313, 0.0098, 0.7653), (0.0237, 0.1903, 0.0059, 0.7206),
                 (0.0142, 0.1751, 0.0029, 0.6441), (0.0087, 0.1548, 0.0014, 0.5593),
                 (0.0067, 0.1498, 0.0009, 0.5105), (0.0031, 0.1436, 0.0004, 0.4223)),
    (1.0, 1.0): ((0.0579, 0.2410, 0.0398, 0.8409), (0.0413, 0.2026, 0.0238, 0.7759),
                 (0.0244, 0.1929, 0.0115, 0.6830), (0.0153, 0.1732, 0.0061, 0.5681),
                 (0.0120, 0.1627, 0.0041, 0.5127), (0.0049, 0.1538, 0.0020, 0.3952)),
    (0.5, 1.5): ((0.0331, 0.1091, 0.0097, 1.1293), (0.0248, 0.0571, 0.0059, 1.0913),
                 (0.0157, 0.0280, 0.0029, 0.9955), (0.0097, 0.0248, 0.0014, 0.8718),
                 (0.0074, 0.0187, 0.0009, 0.7911), (0.0038, 0.0108, 0.0004, 0.6626)),
    (1.0, 1.5): ((0.0637, 0.0566, 0.0401, 1.1088), (0.0474, 0.0300, 0.0243, 1.0424),
                 (0.0282, 0.0250, 0.0116, 0.9098), (0.0177, 0.0233, 0.0058, 0.7683),
                 (0.0144, 0.0148, 0.0038, 0.6933), (0.0067, 0.0116, 0.0018, 0.5503)),
    (0.5, 2.0): ((0.0338, 0.1501, 0.0097, 2.0222), (0.0253, 0.0812, 0.0059, 1.9704),
                 (0.0156, 0.0434, 0.0029, 1.8135), (0.0099, 0.0318, 0.0014, 1.6171),
                 (0.0075, 0.0173, 0.0009, 1.4908), (0.0039, 0.0157, 0.0004, 1.2554)),
    (1.0, 2.0): ((0.0648, 0.1041, 0.0390, 1.9827), (0.0485, 0.0498, 0.0239, 1.8855),
                 (0.0294, 0.0480, 0.0114, 1.6686), (0.0184, 0.0445, 0.0056, 1.4372),
                 (0.0142, 0.0387, 0.0037, 1.2858), (0.0071, 0.0345, 0.0017, 1.0501)),
}
SIM_REPLICATIONS = 10000

# dataset -> (min, q1, median, q3, max, mean, variance, skewness, kurtosis)
# The kurtosis column equals m4/m2**2 + 3 for every dataset.
SUMMARIES = {
    "failure_times": (2.998, 21.187, 51.38, 75.436, 138.5, 55.123, 1685.495, 0.555, 5.108),
    "vinyl_chloride": (0.1, 0.5, 1.15, 2.475, 8, 1.879, 3.813, 1.604, 8.005),
    "karachi_precipitation": (5.6, 39.6, 92.7, 160.25, 429.3, 118.397, 8688.987, 1.024, 6.766),
    "electronic_components": (1.4, 11.45, 22.2, 41.8, 66.2, 27.547, 431.117, 0.566, 5.06),
}

# table number -> (dataset, {family: (params, aic, bic, ad, ad_p, ks, ks_p)})
# TPGLD parameters are listed in (omega, eta, alpha) order as printed.
FITS = {
    6: ("failure_times", {
        "shiha": ((0.0152, 1.4689), 242.5978, 244.9539, 0.2988, 0.9385, 0.1210, 0.8326),
        "aptxgd": ((0.0447, 0.3623), 246.9883, 249.3444, 1.2148, 0.2616, 0.1665, 0.4693),
        "pld": ((0.0602, 0.8744), 243.0938, 245.4499, 0.3691, 0.8776, 0.1231, 0.8177),
        "tpgld": ((0.0118, 1.1825, 109.8619), 244.0922, 247.6263, 0.3134, 0.9271, 0.1259, 0.7963),
        "cjd": ((0.0527,), 247.4051, 248.5831, 1.8339, 0.1140, 0.1862, 0.3340),
        "akd": ((0.0544,), 250.5197, 251.6977, 2.3536, 0.0597, 0.1944, 0.2859),
    }),
    7: ("vinyl_chloride", {
        "shiha": ((0.532, 1e-4), 114.9055, 117.9582, 0.2720, 0.9573, 0.0890, 0.9506),
        "aptxgd": ((0.6911, 0.1182), 115.2675, 118.3202, 0.2979, 0.9394, 0.1012, 0.8774),
        "pld": ((0.9139, 0.8832), 115.5198, 118.5726, 0.3119, 0.9285, 0.0944, 0.9226),
        "tpgld": ((0.5272, 1.0102, 1000.0), 116.8992, 121.4783, 0.2826, 0.9504, 0.0918, 0.9366),
        "cjd": ((1.1644,), 117.8536, 119.3800, 1.2426, 0.2517, 0.1783, 0.2301),
        "akd": ((1.1657,), 117.1493, 118.6756, 0.9436, 0.3876, 0.1564, 0.3762),
    }),
    8: ("karachi_precipitation", {
        "shiha": ((0.0071, 0.0586), 681.6567, 685.8118, 0.2854, 0.9485, 0.0973, 0.6317),
        "aptxgd": ((0.0207, 0.2844), 696.3373, 700.4924, 3.3364, 0.0187, 0.1669, 0.0748),
        "pld": ((0.0354, 0.8498), 681.7449, 685.9000, 0.3749, 0.8728, 0.1057, 0.5255),
        "tpgld": ((0.0389, 0.8333, 0.231), 683.6996, 689.9322, 0.3870, 0.8610, 0.1069, 0.5106),
        "cjd": ((0.0249,), 699.7348, 701.8123, 4.6818, 0.0041, 0.1852, 0.0350),
        "akd": ((0.0253,), 703.7940, 705.8715, 5.2981, 0.0021, 0.1886, 0.0301),
    }),
    9: ("electronic_components", {
        "shiha": ((0.0304, 5.6774), 132.2349, 133.6510, 0.1661, 0.9973, 0.0979, 0.9958),
        "aptxgd": ((0.0861, 0.3527), 133.4417, 134.8578, 0.4649, 0.7801, 0.1342, 0.9169),
        "pld": ((0.0977, 0.9043), 132.4768, 133.8929, 0.1950, 0.9920, 0.0986, 0.9954),
        "tpgld": ((0.02231, 1.2231, 71.4391), 133.9388, 136.0629, 0.1819, 0.9948, 0.0971, 0.9962),
        "cjd": ((0.1034,), 132.9871, 133.6951, 0.8732, 0.4291, 0.1731, 0.6978),
        "akd": ((0.1085,), 135.6842, 136.3922, 1.2757, 0.2400, 0.1841, 0.6248),
    }),
}
FIT_TABLES = tuple(FITS)
