"""Printed precision/recall/F1 triples for four learners at four cluster counts."""
LEARNERS = ("lr", "ann", "rf", "gb")

# (K, demand, (P, R, F1) for lr, then ann, rf, gb)
ROWS = [
    (5, "Low", (0.5032, 0.3719, 0.4277, 0.5195, 0.5593, 0.5387, 0.8857, 0.65, 0.7497, 0.8999, 0.7215, 0.8009)),
    (5, "Medium", (0.4618, 0.3293, 0.3844, 0.6294, 0.5412, 0.582, 0.3854, 0.5282, 0.4457, 0.4453, 0.5009, 0.4715)),
    (5, "High", (0.3593, 0.4902, 0.4147, 0.4201, 0.5414, 0.4731, 0.6721, 0.6374, 0.6543, 0.6912, 0.6987, 0.6949)),
    (5, "Average", (0.4414, 0.3971, 0.4089, 0.523, 0.5473, 0.5312, 0.6477, 0.6052, 0.6165, 0.6788, 0.6404, 0.6558)),
    (10, "Low", (0.5035, 0.368, 0.4252, 0.5793, 0.4947, 0.5337, 0.8179, 0.6657, 0.734, 0.7767, 0.7138, 0.7439)),
    (10, "Medium", (0.4627, 0.3344, 0.3882, 0.5467, 0.4632, 0.5015, 0.3547, 0.4229, 0.3858, 0.3707, 0.4509, 0.4069)),
    (10, "High", (0.3585, 0.4838, 0.4118, 0.4399, 0.5813, 0.5008, 0.8425, 0.625, 0.7177, 0.8759, 0.6797, 0.7654)),
    (10, "Average", (0.4416, 0.3954, 0.4084, 0.522, 0.5131, 0.512, 0.6717, 0.5712, 0.6125, 0.6744, 0.6148, 0.6387)),
    (15, "Low", (0.5152, 0.5083, 0.5118, 0.5813, 0.5818, 0.5815, 0.7824, 0.7326, 0.7567, 0.8143, 0.7224, 0.7656)),
    (15, "Medium", (0.4087, 0.356, 0.3805, 0.5173, 0.443, 0.4772, 0.352, 0.4253, 0.3852, 0.37, 0.4351, 0.3999)),
    (15, "High", (0.3615, 0.3367, 0.3487, 0.489, 0.3655, 0.4184, 0.8399, 0.701, 0.7642, 0.8855, 0.6529, 0.7516)),
    (15, "Average", (0.4285, 0.4003, 0.4136, 0.5292, 0.4634, 0.4924, 0.6581, 0.6196, 0.6354, 0.6899, 0.6035, 0.639)),
    (20, "Low", (0.4773, 0.4677, 0.4725, 0.5002, 0.6018, 0.5463, 0.8039, 0.748, 0.7749, 0.8223, 0.8124, 0.8173)),
    (20, "Medium", (0.3326, 0.3332, 0.3329, 0.5661, 0.5756, 0.5708, 0.3478, 0.3898, 0.3676, 0.3944, 0.4389, 0.4155)),
    (20, "High", (0.3928, 0.3865, 0.3896, 0.4607, 0.4034, 0.4302, 0.9274, 0.7133, 0.8064, 0.858, 0.6011, 0.7069)),
    (20, "Average", (0.4009, 0.3958, 0.3983, 0.509, 0.5269, 0.5158, 0.693, 0.617, 0.6496, 0.6916, 0.6175, 0.6466)),
]
