# Acceptance-scale Monte Carlo runs
