"""QBZZB: quantum Bell-Ziv-Zakai error bounds for Gaussian priors."""
